use std::collections::BTreeSet;

use ltlcheck_core::expr::Expr;
use ltlcheck_core::formula::Formula;
use ltlcheck_core::speclang::ast::*;
use ltlcheck_core::speclang::{
    analyze_deps, compile, parse, print_program, ElaborationError, SpecError, TypeErrorKind,
};
use ltlcheck_core::{evaluate_trace, NextKind, State, StateView, Value, Verdict};
use proptest::prelude::*;

fn read(path: &str) -> String {
    std::fs::read_to_string(format!("{}/../../{}", env!("CARGO_MANIFEST_DIR"), path)).unwrap()
}

fn type_error(src: &str) -> TypeErrorKind {
    match compile(src, 100) {
        Err(SpecError::Elaboration(ElaborationError::Type(e))) => e.kind,
        other => panic!("expected a type error, got {:?}", other),
    }
}

#[test]
fn parses_lazy_selector_binding() {
    let p = parse("let ~stopped = `#toggle`.text == \"start\";").unwrap();
    let TopLevel::Let(b) = &p.items[0] else { panic!() };
    assert_eq!((b.name.as_str(), b.lazy, b.params.is_none()), ("stopped", true, true));
    let AstKind::Binary(SurfaceBinOp::Eq, lhs, rhs) = &b.body.kind else { panic!("{:?}", b.body) };
    assert!(matches!(&lhs.kind, AstKind::Field(base, f) if f == "text" && base.kind == AstKind::Selector("#toggle".into())));
    assert_eq!(rhs.kind, AstKind::Str("start".into()));
}

#[test]
fn parses_action_with_timeout() {
    let p = parse("action wait! = noop! timeout 1000 when started;").unwrap();
    let TopLevel::Action(a) = &p.items[0] else { panic!() };
    assert_eq!((a.name.as_str(), a.kind, a.primitive.as_str(), a.timeout), ("wait!", ActionKind::User, "noop!", Some(1000)));
    assert_eq!(a.guard.as_ref().unwrap().kind, AstKind::Ident("started".into()));
}

#[test]
fn malformed_binding_is_a_syntax_error() {
    let e = parse("let x = ;").unwrap_err();
    assert_eq!((e.line, e.col), (1, 9));
}

#[test]
fn type_errors() {
    assert_eq!(type_error("let f(x) = x; let a = [f];"), TypeErrorKind::FunctionInData);
    assert_eq!(type_error("let g = g;"), TypeErrorKind::UnboundName);
    assert_eq!(type_error("let f(x) = f(x);"), TypeErrorKind::RecursionForbidden);
    assert!(compile("let id(x) = x; let y = id(1);", 100).is_ok());
}

const EQUAL_FNS: &str = "let lazy(~x) = let v = x; always (x == v);
let eager(x) = let v = x; always (x == v);";

#[test]
fn lazy_parameter_freezes_the_first_value() {
    let spec = compile(&format!("{}\nlet ~p = lazy(`#s`.v);\ncheck p;", EQUAL_FNS), 100).unwrap();
    let s = Expr::field("#s.v");
    let expected = Formula::freeze("v_1", s.clone(), Formula::always(100, Formula::atom(Expr::eq(s, Expr::var("v_1")))));
    assert_eq!(spec.properties["p"], expected);
}

#[test]
fn eager_parameter_outside_temporal_context_is_rejected() {
    let e = compile(&format!("{}\nlet q = eager(`#s`.v);", EQUAL_FNS), 100).unwrap_err();
    assert!(matches!(e, SpecError::Elaboration(ElaborationError::StateAccessOutsideTemporalContext { .. })), "{:?}", e);
}

#[test]
fn lazy_and_eager_readings_differ_on_a_changing_selector() {
    let spec = compile(&format!("{}\nlet ~l = lazy(`#s`.v);\nlet ~e = eager(`#s`.v);\ncheck l e;", EQUAL_FNS), 3).unwrap();
    let trace: Vec<State> = [1, 2, 2, 2].iter().map(|v| State::new().with_field("#s.v", *v as i64)).collect();
    let lazy = evaluate_trace(&spec.properties["l"], &trace).unwrap();
    let eager = evaluate_trace(&spec.properties["e"], &trace).unwrap();
    assert_eq!(lazy.verdict, Verdict::DefinitelyFalse.into());
    assert_eq!(eager.verdict, Verdict::PresumablyTrue.into());
}

#[test]
fn default_subscript_fills_unsubscripted_operators() {
    let spec = compile("let ~p = always (1 == 1);\ncheck p;", 100).unwrap();
    assert!(matches!(spec.properties["p"], Formula::Always(100, _)));
}

#[test]
fn deeply_nested_functions_elaborate() {
    // Each function calls the previous one; the expansion depth stays
    // within the number of bindings.
    let mut src = String::from("let f0(~x) = x;\n");
    for i in 1..30 {
        src.push_str(&format!("let f{}(~x) = f{}(x) && nextW f{}(x);\n", i, i - 1, i - 1));
        if i > 8 {
            break;
        }
    }
    src.push_str("let ~p = always f9(`#a`.v == 1);\ncheck p;");
    let spec = compile(&src, 2).unwrap();
    assert!(spec.properties["p"].node_count() > 100);
}

#[test]
fn egg_timer_dependencies() {
    let spec = compile(&read("specs/eggtimer.strom"), 100).unwrap();
    let deps = |p: &str| {
        let check = spec.checks.iter().find(|c| c.properties.iter().any(|q| q == p)).unwrap();
        analyze_deps(&spec, &check.for_property(p)).into_iter().collect::<Vec<_>>()
    };
    assert_eq!(deps("safety"), ["#remaining.text", "#toggle.text"]);
    assert_eq!(deps("timeUp"), ["#remaining.text", "#toggle.text"]);
    // Neither the property nor any action guard mentions the counter.
    assert_eq!(deps("liveness"), ["#toggle.text"]);
}

/// A state view that records every field read.
struct Recording<'a> {
    state: &'a State,
    reads: &'a std::cell::RefCell<BTreeSet<String>>,
}

impl StateView for Recording<'_> {
    fn field(&self, key: &str) -> Option<&Value> {
        self.reads.borrow_mut().insert(key.to_string());
        self.state.field(key)
    }

    fn happened(&self) -> &[String] {
        self.state.happened()
    }
}

proptest! {
    #[test]
    fn todo_list_reads_stay_within_dependencies(
        rows in proptest::collection::vec(("[a]{0,3}", 0u8..4, 0u8..4, 0usize..3, 0usize..8), 1..12)
    ) {
        let spec = compile(&read("specs/todomvc_lite.strom"), 5).unwrap();
        let names = ["type!", "submit!", "showAll!", "toggleAll!", "clearCompleted!", "loaded?", "tick?", "x?"];
        let filters = ["all", "active", "completed"];
        let trace: Vec<State> = rows
            .iter()
            .map(|(input, items, completed, filter, h)| {
                State::new()
                    .with_field("#new-todo.value", input.as_str())
                    .with_field("#items.count", *items as i64)
                    .with_field("#completed.count", *completed as i64)
                    .with_field("#filter.text", filters[*filter])
                    .with_field("#unrelated.text", "x")
                    .with_happened([names[*h]])
            })
            .collect();
        for check in &spec.checks {
            for p in &check.properties {
                let config = check.for_property(p);
                let deps = analyze_deps(&spec, &config);
                let reads = std::cell::RefCell::new(BTreeSet::new());
                let views: Vec<Recording> = trace.iter().map(|s| Recording { state: s, reads: &reads }).collect();
                let _ = evaluate_trace(&spec.properties[p], &views);
                for a in spec.actions.values().filter(|a| config.allows(&a.name)) {
                    for v in &views {
                        if let Some(g) = &a.guard {
                            let _ = g.eval(v);
                        }
                    }
                }
                let reads = reads.into_inner();
                prop_assert!(reads.is_subset(&deps), "{}: read {:?}, deps {:?}", p, reads, deps);
            }
        }
    }
}

fn leaf() -> impl Strategy<Value = AstKind> {
    prop_oneof![
        (0u32..1000).prop_map(|n| AstKind::Number(n as f64)),
        (0u32..100).prop_map(|n| AstKind::Number(n as f64 + 0.5)),
        "[a-z \"\\\\]{0,4}".prop_map(AstKind::Str),
        any::<bool>().prop_map(AstKind::Bool),
        Just(AstKind::Null),
        prop::sample::select(vec!["a", "b", "happened", "start!", "tick?"]).prop_map(|s| AstKind::Ident(s.into())),
        prop::sample::select(vec!["#toggle", ".item", "li > a"]).prop_map(|s| AstKind::Selector(s.into())),
    ]
}

fn ast(kind: AstKind) -> Ast {
    Ast::new(kind, Pos::default())
}

fn tree() -> impl Strategy<Value = Ast> {
    leaf().prop_map(ast).prop_recursive(4, 40, 3, |inner| {
        let b = |a: Ast| Box::new(a);
        let ops = vec![
            SurfaceBinOp::Implies,
            SurfaceBinOp::Or,
            SurfaceBinOp::And,
            SurfaceBinOp::Eq,
            SurfaceBinOp::Ne,
            SurfaceBinOp::Lt,
            SurfaceBinOp::In,
            SurfaceBinOp::Add,
            SurfaceBinOp::Sub,
            SurfaceBinOp::Mul,
            SurfaceBinOp::Div,
        ];
        prop_oneof![
            (prop::sample::select(vec!["#toggle", "#x"]), prop::sample::select(vec!["text", "value"]))
                .prop_map(move |(s, f)| ast(AstKind::Field(b(ast(AstKind::Selector(s.into()))), f.into()))),
            (prop::sample::select(vec!["f", "parseInt"]), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(n, args)| ast(AstKind::Call(n.into(), args))),
            inner.clone().prop_map(move |a| ast(AstKind::Not(b(a)))),
            inner.clone().prop_map(move |a| ast(AstKind::Neg(b(a)))),
            (prop::sample::select(ops), inner.clone(), inner.clone())
                .prop_map(move |(op, l, r)| ast(AstKind::Binary(op, b(l), b(r)))),
            (inner.clone(), inner.clone(), inner.clone())
                .prop_map(move |(c, t, e)| ast(AstKind::If(b(c), b(t), b(e)))),
            prop::collection::vec(inner.clone(), 0..3).prop_map(|xs| ast(AstKind::Seq(xs))),
            prop::collection::vec(("[a-z]{1,3}", inner.clone()), 0..3).prop_map(|es| ast(AstKind::Map(es))),
            (any::<bool>(), inner.clone(), inner.clone()).prop_map(move |(lazy, v, body)| ast(AstKind::Let {
                name: "y".into(),
                lazy,
                value: b(v),
                body: b(body)
            })),
            (prop::sample::select(vec![NextKind::Required, NextKind::Weak, NextKind::Strong]), inner.clone())
                .prop_map(move |(k, a)| ast(AstKind::Next(k, b(a)))),
            (any::<bool>(), prop::option::of(0u32..5), inner.clone()).prop_map(move |(always, n, a)| {
                let op = if always { TemporalOp::Always } else { TemporalOp::Eventually };
                ast(AstKind::Temporal(op, n, b(a)))
            }),
            (any::<bool>(), prop::option::of(0u32..5), inner.clone(), inner).prop_map(move |(until, n, l, r)| {
                let op = if until { BinaryTemporalOp::Until } else { BinaryTemporalOp::Release };
                ast(AstKind::BinaryTemporal(op, n, b(l), b(r)))
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_round_trips(body in tree(), lazy in any::<bool>()) {
        let mut program = Program {
            items: vec![TopLevel::Let(LetBinding { name: "x".into(), lazy, params: None, body, pos: Pos::default() })],
        };
        let text = print_program(&program);
        let mut reparsed = parse(&text).map_err(|e| TestCaseError::fail(format!("{}\n{}", e, text)))?;
        program.clear_positions();
        reparsed.clear_positions();
        prop_assert_eq!(reparsed, program, "{}", text);
    }
}
