//! Ranks: non-negative integers extended with infinity.

use std::fmt;
use std::ops::Add;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Degree of surprise. `Finite(0)` is a serious possibility, `Infinite` is
/// ruled out.
///
/// The derived ordering places every finite rank below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Finite(u64),
    Infinite,
}

pub const ZERO: Rank = Rank::Finite(0);
pub const INF: Rank = Rank::Infinite;

impl Rank {
    pub fn is_finite(self) -> bool {
        matches!(self, Rank::Finite(_))
    }

    pub fn is_zero(self) -> bool {
        self == ZERO
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Rank::Finite(v) => Some(v),
            Rank::Infinite => None,
        }
    }

    /// `∞ - x = ∞` for finite `x`; `x - ∞` and negative results are errors.
    pub fn checked_sub(self, rhs: Rank) -> Result<Rank> {
        match (self, rhs) {
            (_, Rank::Infinite) => Err(Error::RankArithmetic("subtracting an infinite rank")),
            (Rank::Infinite, Rank::Finite(_)) => Ok(Rank::Infinite),
            (Rank::Finite(a), Rank::Finite(b)) => a
                .checked_sub(b)
                .map(Rank::Finite)
                .ok_or(Error::RankArithmetic("negative rank")),
        }
    }

    pub fn checked_add(self, rhs: Rank) -> Option<Rank> {
        match (self, rhs) {
            (Rank::Finite(a), Rank::Finite(b)) => a.checked_add(b).map(Rank::Finite),
            _ => Some(Rank::Infinite),
        }
    }
}

impl Add for Rank {
    type Output = Rank;

    /// Infinity absorbs. Finite overflow panics.
    fn add(self, rhs: Rank) -> Rank {
        self.checked_add(rhs).expect("rank overflow")
    }
}

impl std::iter::Sum for Rank {
    fn sum<I: Iterator<Item = Rank>>(iter: I) -> Rank {
        iter.fold(ZERO, |acc, r| acc + r)
    }
}

impl From<u64> for Rank {
    fn from(v: u64) -> Self {
        Rank::Finite(v)
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(v) => write!(f, "{v}"),
            Rank::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rank::Finite(v) => s.serialize_u64(*v),
            Rank::Infinite => s.serialize_str("inf"),
        }
    }
}
