use std::fmt;

use serde::{Serialize, Serializer};

/// Valuation of an element known to finite precision.
///
/// Zealous elements whose known digits all vanish only give a lower bound;
/// exact zero is the only element with infinite valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    /// Indistinguishable from zero: valuation is at least this.
    AtLeast(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Best known lower bound; `None` for exact zero.
    pub fn lower_bound(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// True when the element is known to vanish to its available precision.
    pub fn is_zero_like(self) -> bool {
        !matches!(self, Valuation::Finite(_))
    }

    /// Whether the valuation is known to be at least `n`.
    pub fn is_at_least(self, n: i64) -> bool {
        self.lower_bound().is_none_or(|v| v >= n)
    }

    /// Valuation of a sum-like aggregate: the minimum, tracking whether
    /// it is actually attained or only bounded.
    pub fn min(self, other: Valuation) -> Valuation {
        use Valuation::*;
        match (self, other) {
            (Infinite, x) | (x, Infinite) => x,
            (Finite(a), Finite(b)) => Finite(a.min(b)),
            (Finite(a), AtLeast(b)) | (AtLeast(b), Finite(a)) => {
                if a <= b {
                    Finite(a)
                } else {
                    AtLeast(b)
                }
            }
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}
