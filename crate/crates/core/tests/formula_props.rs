use ltlcheck_core::formula::random::{next_kind, FormulaGen};
use ltlcheck_core::formula::{
    evaluate_trace, negate, simplify, step_forward, unroll, Formula, NextKind, Outcome, Simplified,
};
use ltlcheck_core::oracle::eval_direct;
use ltlcheck_core::{ExtVerdict, State};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn case(seed: u64) -> (ChaCha8Rng, FormulaGen, Formula, Vec<State>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = FormulaGen::default();
    let f = gen.formula(&mut rng);
    let len = rng.random_range(1..=6);
    let t = gen.trace(&mut rng, len);
    (rng, gen, f, t)
}

fn outcome(f: &Formula, t: &[State]) -> Outcome {
    evaluate_trace(f, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn progression_agrees_with_oracle(seed: u64) {
        let (_, _, f, t) = case(seed);
        prop_assert_eq!(outcome(&f, &t).verdict, eval_direct(&f, &t, 0).unwrap(), "formula {}", f);
    }

    #[test]
    fn negation_is_dual(seed: u64) {
        let (_, _, f, t) = case(seed);
        let pos = outcome(&f, &t);
        let neg = outcome(&Formula::not(f.clone()), &t);
        prop_assert_eq!(neg.verdict, pos.verdict.negate());
        prop_assert_eq!(neg.definitive_at, pos.definitive_at);
    }

    #[test]
    fn definitive_verdicts_survive_extension(seed: u64) {
        let (mut rng, gen, f, t) = case(seed);
        let o = outcome(&f, &t);
        if o.definitive_at.is_some() {
            let mut longer = t.clone();
            let extra = rng.random_range(1..=4);
            longer.extend(gen.trace(&mut rng, extra));
            let o2 = outcome(&f, &longer);
            prop_assert_eq!(o2.verdict, o.verdict);
            prop_assert_eq!(o2.definitive_at, o.definitive_at);
        }
    }

    #[test]
    fn simplify_is_idempotent_and_stepping_consumes_guards(seed: u64) {
        let (_, _, f, t) = case(seed);
        let mut current = f;
        for s in &t {
            match simplify(&unroll(&current, s).unwrap()) {
                Simplified::Definitive(_) => break,
                Simplified::Guarded(g) => {
                    prop_assert_eq!(simplify(&g.to_formula()), Simplified::Guarded(g.clone()));
                    let stepped = step_forward(&g);
                    prop_assert_eq!(stepped.next_count(), g.next_count() - g.guard_count());
                    prop_assert!(stepped.next_count() < g.next_count());
                    current = stepped;
                }
            }
        }
    }

    #[test]
    fn negation_identities(seed: u64) {
        let (mut rng, gen, phi, t) = case(seed);
        let psi = gen.formula(&mut rng);
        let n = rng.random_range(0..=3);
        let not = |f: Formula| Formula::not(f);
        // 1, 2
        prop_assert_eq!(outcome(&not(Formula::eventually(n, phi.clone())), &t), outcome(&Formula::always(n, not(phi.clone())), &t));
        prop_assert_eq!(outcome(&not(Formula::always(n, phi.clone())), &t), outcome(&Formula::eventually(n, not(phi.clone())), &t));
        // 3, for each modality
        let k = next_kind(&mut rng);
        prop_assert_eq!(outcome(&not(Formula::next(k, phi.clone())), &t), outcome(&Formula::next(k.dual(), not(phi.clone())), &t));
        // 4, 5
        prop_assert_eq!(
            outcome(&not(Formula::until(n, phi.clone(), psi.clone())), &t),
            outcome(&Formula::release(n, not(phi.clone()), not(psi.clone())), &t)
        );
        prop_assert_eq!(
            outcome(&not(Formula::release(n, phi.clone(), psi.clone())), &t),
            outcome(&Formula::until(n, not(phi.clone()), not(psi.clone())), &t)
        );
        // the rewriting used by simplification preserves outcomes
        prop_assert_eq!(outcome(&not(phi.clone()), &t), outcome(&negate(&phi), &t));
    }

    #[test]
    fn derived_operator_identities(seed: u64) {
        let (mut rng, _, phi, t) = case(seed);
        let n = rng.random_range(0..=3);
        prop_assert_eq!(outcome(&Formula::eventually(n, phi.clone()), &t), outcome(&Formula::until(n, Formula::Top, phi.clone()), &t));
        prop_assert_eq!(outcome(&Formula::always(n, phi.clone()), &t), outcome(&Formula::release(n, Formula::Bottom, phi.clone()), &t));
    }

    #[test]
    fn expansion_identities(seed: u64) {
        let (mut rng, gen, phi, t) = case(seed);
        let psi = gen.formula(&mut rng);
        let n = rng.random_range(0..=3);
        for (lhs, rhs) in expansions(n, &phi, &psi) {
            prop_assert_eq!(outcome(&lhs, &t), outcome(&rhs, &t), "{} vs {}", lhs, rhs);
        }
    }
}

/// One-step expansions of the four temporal operators at subscript `n`.
fn expansions(n: u32, phi: &Formula, psi: &Formula) -> Vec<(Formula, Formula)> {
    let (kind_g, kind_f, m) = if n == 0 {
        (NextKind::Weak, NextKind::Strong, 0)
    } else {
        (NextKind::Required, NextKind::Required, n - 1)
    };
    vec![
        (
            Formula::always(n, phi.clone()),
            Formula::and(phi.clone(), Formula::next(kind_g, Formula::always(m, phi.clone()))),
        ),
        (
            Formula::eventually(n, phi.clone()),
            Formula::or(phi.clone(), Formula::next(kind_f, Formula::eventually(m, phi.clone()))),
        ),
        (
            Formula::until(n, phi.clone(), psi.clone()),
            Formula::or(
                psi.clone(),
                Formula::and(phi.clone(), Formula::next(kind_f, Formula::until(m, phi.clone(), psi.clone()))),
            ),
        ),
        (
            Formula::release(n, phi.clone(), psi.clone()),
            Formula::and(
                psi.clone(),
                Formula::or(phi.clone(), Formula::next(kind_g, Formula::release(m, phi.clone(), psi.clone()))),
            ),
        ),
    ]
}

#[test]
fn demands_identified_on_both_sides() {
    let x = Formula::atom(ltlcheck_core::Expr::field("a.v"));
    let t = vec![State::new().with_field("a.v", false), State::new().with_field("a.v", false)];
    let f = Formula::eventually(2, x);
    assert_eq!(outcome(&f, &t).verdict, ExtVerdict::Demands);
    assert_eq!(eval_direct(&f, &t, 0).unwrap(), ExtVerdict::Demands);
}
