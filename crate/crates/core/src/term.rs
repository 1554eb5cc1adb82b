//! Precomputed terms: numerals and symbolic constants.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

/// A numeral or a symbolic constant.
///
/// The derived order is the one used everywhere in the crate: numerals are
/// ordered as the integers they denote and precede every symbolic constant;
/// symbolic constants are ordered lexicographically by name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Precomputed {
    Numeral(i64),
    Symbol(String),
}

impl Precomputed {
    pub fn numeral(n: i64) -> Self {
        Precomputed::Numeral(n)
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        Precomputed::Symbol(name.into())
    }

    pub fn as_numeral(&self) -> Option<i64> {
        match self {
            Precomputed::Numeral(n) => Some(*n),
            Precomputed::Symbol(_) => None,
        }
    }

    pub fn is_numeral(&self) -> bool {
        matches!(self, Precomputed::Numeral(_))
    }
}

/// Total order on precomputed terms.
pub fn compare_precomputed(a: &Precomputed, b: &Precomputed) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for Precomputed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precomputed::Numeral(n) => write!(f, "{n}"),
            Precomputed::Symbol(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Precomputed {
    fn from(n: i64) -> Self {
        Precomputed::Numeral(n)
    }
}
