//! Four-valued verdicts and their extension with `Demands`.

use core::fmt;

use serde::{Deserialize, Serialize};

/// Truth value of a formula over a partial trace.
///
/// Ordered `DefinitelyFalse < PresumablyFalse < PresumablyTrue < DefinitelyTrue`;
/// conjunction is the minimum and disjunction the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    DefinitelyFalse,
    PresumablyFalse,
    PresumablyTrue,
    DefinitelyTrue,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [
        Verdict::DefinitelyFalse,
        Verdict::PresumablyFalse,
        Verdict::PresumablyTrue,
        Verdict::DefinitelyTrue,
    ];

    pub fn definite(b: bool) -> Self {
        if b {
            Verdict::DefinitelyTrue
        } else {
            Verdict::DefinitelyFalse
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Verdict::DefinitelyFalse => Verdict::DefinitelyTrue,
            Verdict::PresumablyFalse => Verdict::PresumablyTrue,
            Verdict::PresumablyTrue => Verdict::PresumablyFalse,
            Verdict::DefinitelyTrue => Verdict::DefinitelyFalse,
        }
    }

    pub fn and(self, other: Self) -> Self {
        self.min(other)
    }

    pub fn or(self, other: Self) -> Self {
        self.max(other)
    }

    /// Drops definiteness: a result reached through end-of-trace defaults is
    /// never evidence.
    pub fn weaken(self) -> Self {
        match self {
            Verdict::DefinitelyFalse => Verdict::PresumablyFalse,
            Verdict::DefinitelyTrue => Verdict::PresumablyTrue,
            v => v,
        }
    }

    pub fn is_definitive(self) -> bool {
        matches!(self, Verdict::DefinitelyFalse | Verdict::DefinitelyTrue)
    }

    pub fn is_true(self) -> bool {
        matches!(self, Verdict::PresumablyTrue | Verdict::DefinitelyTrue)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::DefinitelyFalse => "definitely false",
            Verdict::PresumablyFalse => "presumably false",
            Verdict::PresumablyTrue => "presumably true",
            Verdict::DefinitelyTrue => "definitely true",
        })
    }
}

/// A verdict, or the statement that the trace must be extended before any
/// verdict can be given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtVerdict {
    Verdict(Verdict),
    Demands,
}

impl ExtVerdict {
    pub fn negate(self) -> Self {
        match self {
            ExtVerdict::Verdict(v) => ExtVerdict::Verdict(v.negate()),
            ExtVerdict::Demands => ExtVerdict::Demands,
        }
    }

    pub fn and(self, other: Self) -> Self {
        use ExtVerdict::*;
        match (self, other) {
            (Verdict(crate::Verdict::DefinitelyFalse), _) | (_, Verdict(crate::Verdict::DefinitelyFalse)) => {
                Verdict(crate::Verdict::DefinitelyFalse)
            }
            (Demands, _) | (_, Demands) => Demands,
            (Verdict(a), Verdict(b)) => Verdict(a.and(b)),
        }
    }

    pub fn or(self, other: Self) -> Self {
        use ExtVerdict::*;
        match (self, other) {
            (Verdict(crate::Verdict::DefinitelyTrue), _) | (_, Verdict(crate::Verdict::DefinitelyTrue)) => {
                Verdict(crate::Verdict::DefinitelyTrue)
            }
            (Demands, _) | (_, Demands) => Demands,
            (Verdict(a), Verdict(b)) => Verdict(a.or(b)),
        }
    }

    pub fn verdict(self) -> Option<Verdict> {
        match self {
            ExtVerdict::Verdict(v) => Some(v),
            ExtVerdict::Demands => None,
        }
    }
}

impl From<Verdict> for ExtVerdict {
    fn from(v: Verdict) -> Self {
        ExtVerdict::Verdict(v)
    }
}

impl fmt::Display for ExtVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtVerdict::Verdict(v) => v.fmt(f),
            ExtVerdict::Demands => f.write_str("demands more states"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL_EXT: [ExtVerdict; 5] = [
        ExtVerdict::Verdict(Verdict::DefinitelyFalse),
        ExtVerdict::Verdict(Verdict::PresumablyFalse),
        ExtVerdict::Verdict(Verdict::PresumablyTrue),
        ExtVerdict::Verdict(Verdict::DefinitelyTrue),
        ExtVerdict::Demands,
    ];

    #[test]
    fn lattice_laws() {
        for a in Verdict::ALL {
            assert_eq!(a.and(a), a);
            assert_eq!(a.or(a), a);
            assert_eq!(a.negate().negate(), a);
            for b in Verdict::ALL {
                assert_eq!(a.and(b), b.and(a));
                assert_eq!(a.or(b), b.or(a));
                // negation reverses the order
                assert_eq!(a <= b, b.negate() <= a.negate());
                assert_eq!(a.and(b).negate(), a.negate().or(b.negate()));
                for c in Verdict::ALL {
                    assert_eq!(a.and(b).and(c), a.and(b.and(c)));
                    assert_eq!(a.or(b).or(c), a.or(b.or(c)));
                }
            }
        }
    }

    #[test]
    fn ext_algebra_is_dual() {
        for a in ALL_EXT {
            assert_eq!(a.negate().negate(), a);
            for b in ALL_EXT {
                assert_eq!(a.and(b), b.and(a));
                assert_eq!(a.or(b), b.or(a));
                assert_eq!(a.and(b).negate(), a.negate().or(b.negate()));
                for c in ALL_EXT {
                    assert_eq!(a.and(b).and(c), a.and(b.and(c)));
                    assert_eq!(a.or(b).or(c), a.or(b.or(c)));
                }
            }
        }
    }

    #[test]
    fn demands_absorption() {
        let d = ExtVerdict::Demands;
        assert_eq!(d.and(Verdict::DefinitelyFalse.into()), Verdict::DefinitelyFalse.into());
        assert_eq!(d.and(Verdict::DefinitelyTrue.into()), d);
        assert_eq!(d.or(Verdict::DefinitelyTrue.into()), Verdict::DefinitelyTrue.into());
        assert_eq!(d.or(Verdict::PresumablyTrue.into()), d);
        assert_eq!(d.negate(), d);
    }
}
