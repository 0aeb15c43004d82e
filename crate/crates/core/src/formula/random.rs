//! Random formulas and traces over boolean fields, for property tests.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::{Formula, NextKind};
use crate::expr::Expr;
use crate::state::State;

/// Shape of generated formulas.
#[derive(Debug, Clone)]
pub struct FormulaGen {
    /// Maximum operator nesting depth.
    pub max_depth: u32,
    pub max_subscript: u32,
    /// Boolean field keys atoms may read.
    pub fields: Vec<String>,
    /// Whether to generate freeze nodes.
    pub freeze: bool,
}

impl Default for FormulaGen {
    fn default() -> Self {
        FormulaGen {
            max_depth: 4,
            max_subscript: 3,
            fields: ["a.v", "b.v", "c.v"].iter().map(|s| String::from(*s)).collect(),
            freeze: true,
        }
    }
}

impl FormulaGen {
    pub fn formula<R: Rng + ?Sized>(&self, rng: &mut R) -> Formula {
        self.gen(rng, self.max_depth, 0)
    }

    /// A random trace assigning every field a boolean.
    pub fn trace<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Vec<State> {
        (0..len)
            .map(|_| {
                let mut s = State::new();
                for f in &self.fields {
                    s.fields.insert(f.clone(), rng.random_bool(0.5).into());
                }
                s
            })
            .collect()
    }

    fn field<R: Rng + ?Sized>(&self, rng: &mut R) -> Expr {
        Expr::field(self.fields[rng.random_range(0..self.fields.len())].clone())
    }

    fn leaf<R: Rng + ?Sized>(&self, rng: &mut R, bound: u32) -> Formula {
        match rng.random_range(0..10) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            2 | 3 if bound > 0 => {
                let v = format!("v{}", rng.random_range(0..bound));
                Formula::atom(Expr::eq(Expr::var(v), self.field(rng)))
            }
            _ => Formula::atom(self.field(rng)),
        }
    }

    fn gen<R: Rng + ?Sized>(&self, rng: &mut R, depth: u32, bound: u32) -> Formula {
        if depth == 0 || rng.random_range(0..5) == 0 {
            return self.leaf(rng, bound);
        }
        let d = depth - 1;
        let n = rng.random_range(0..=self.max_subscript);
        let kinds = if self.freeze { 12 } else { 11 };
        match rng.random_range(0..kinds) {
            0 => Formula::not(self.gen(rng, d, bound)),
            1 => Formula::and(self.gen(rng, d, bound), self.gen(rng, d, bound)),
            2 => Formula::or(self.gen(rng, d, bound), self.gen(rng, d, bound)),
            3 => Formula::next_required(self.gen(rng, d, bound)),
            4 => Formula::next_weak(self.gen(rng, d, bound)),
            5 => Formula::next_strong(self.gen(rng, d, bound)),
            6 => Formula::always(n, self.gen(rng, d, bound)),
            7 => Formula::eventually(n, self.gen(rng, d, bound)),
            8 => Formula::until(n, self.gen(rng, d, bound), self.gen(rng, d, bound)),
            9 => Formula::release(n, self.gen(rng, d, bound), self.gen(rng, d, bound)),
            10 => Formula::implies(self.gen(rng, d, bound), self.gen(rng, d, bound)),
            _ => {
                let expr = self.field(rng);
                Formula::freeze(format!("v{}", bound), expr, self.gen(rng, d, bound + 1))
            }
        }
    }
}

/// Random next modality.
pub fn next_kind<R: Rng + ?Sized>(rng: &mut R) -> NextKind {
    match rng.random_range(0..3) {
        0 => NextKind::Required,
        1 => NextKind::Weak,
        _ => NextKind::Strong,
    }
}
