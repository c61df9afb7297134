use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{parse_system, PolySystem};
use crate::error::Error;

/// The three benchmark families, indexed by the parameter `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    F1,
    F2,
    F3,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::F1, Family::F2, Family::F3];

    pub fn source(self) -> &'static str {
        match self {
            Family::F1 => {
                "m = 2
poly: (x1 - 1)^2 + (x2 - 1)^2 - 4 - t*x1*x2 - t^2*x1
poly: (x1 + 1)^2 + (x2 + 1)^2 - 4 - t*x1
"
            }
            Family::F2 => {
                "m = 3
poly: (x1 - 1)^2 + (x2 - 1)^2 + (x3 - 1)^2 - 5 - t - t^2
poly: (x1 + 1)^2 + (x2 + 1)^2 + (x3 + 1)^2 - 5 - t
poly: 2*x1^2 + x2^2 + x3^2 - 3 - t^2
"
            }
            Family::F3 => {
                "m = 4
poly: (x1 - 1)^2 + (x2 - 1)^2 + (x3 - 1)^2 + (x4 - 1)^2 - 8 - t - t^2
poly: (x1 + 1)^2 + (x2 + 1)^2 + (x3 + 1)^2 + (x4 + 1)^2 - 8 - t
poly: 2*x1^2 + x2^2 + x3^2 + x4^2 - 5 - t^2
poly: 2*x1*x2 + x3*x2 - 2*x3*x4 + 2*x4*x1 + 3 - t^2
"
            }
        }
    }

    /// Residue root at `t = 0` used to start runs, as signed
    /// representatives. F2 and F3 take the first root found by
    /// [`PolySystem::residue_roots`] at p = 17; see `fixtures/residue_roots.json`.
    pub fn start_residue(self) -> &'static [i64] {
        match self {
            Family::F1 => &[1, -1],
            Family::F2 => &[-1, 1, 0],
            Family::F3 => &[-1, -1, 1, 1],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_uppercase().as_str() {
            "F1" => Ok(Family::F1),
            "F2" => Ok(Family::F2),
            "F3" => Ok(Family::F3),
            _ => Err(Error::InvalidArgument(format!("unknown system '{s}'"))),
        }
    }
}

pub fn builtin_family(f: Family) -> PolySystem {
    parse_system(f.source()).expect("builtin systems parse")
}
