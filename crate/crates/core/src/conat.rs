use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// A natural number or `Top` (the limit of the naturals).
///
/// Addition saturates at `Top`; subtraction is monus with `Top - Top = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoNat {
    Fin(u64),
    Top,
}

pub use CoNat::{Fin, Top};

impl CoNat {
    pub const ZERO: CoNat = Fin(0);

    pub fn is_top(self) -> bool {
        self == Top
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Fin(n) => Some(n),
            Top => None,
        }
    }

    /// Monus: `self ∸ rhs`.
    pub fn monus(self, rhs: CoNat) -> CoNat {
        match (self, rhs) {
            (Fin(a), Fin(b)) => Fin(a.saturating_sub(b)),
            (Top, Fin(_)) => Top,
            (_, Top) => Fin(0),
        }
    }

    pub fn succ(self) -> CoNat {
        self + Fin(1)
    }
}

impl Add for CoNat {
    type Output = CoNat;
    fn add(self, rhs: CoNat) -> CoNat {
        match (self, rhs) {
            (Fin(a), Fin(b)) => a.checked_add(b).map_or(Top, Fin),
            _ => Top,
        }
    }
}

impl From<u64> for CoNat {
    fn from(n: u64) -> Self {
        Fin(n)
    }
}

impl fmt::Display for CoNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fin(n) => write!(f, "{n}"),
            Top => f.write_str("inf"),
        }
    }
}

impl Serialize for CoNat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Fin(n) => s.serialize_u64(*n),
            Top => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CoNat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Fin(n)),
            Raw::S(s) if s == "inf" => Ok(Top),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad extended natural `{s}`"))),
        }
    }
}

/// Either an exact value or a lower bound reached before some budget ran out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Approx {
    Exact(CoNat),
    AtLeast(u64),
}

impl Approx {
    /// The certain lower bound carried by this value.
    pub fn lower(self) -> CoNat {
        match self {
            Approx::Exact(v) => v,
            Approx::AtLeast(b) => Fin(b),
        }
    }

    pub fn exact(self) -> Option<CoNat> {
        match self {
            Approx::Exact(v) => Some(v),
            Approx::AtLeast(_) => None,
        }
    }

    /// Whether `v` is a value this approximation allows.
    pub fn admits(self, v: CoNat) -> bool {
        match self {
            Approx::Exact(e) => e == v,
            Approx::AtLeast(b) => v >= Fin(b),
        }
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Approx::Exact(v) => write!(f, "{v}"),
            Approx::AtLeast(b) => write!(f, ">={b}"),
        }
    }
}
