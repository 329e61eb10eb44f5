use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// A non-archimedean absolute value, always a power of q or zero.
///
/// `Exact(v)` is q^{-v}; `Below(v)` means the value is at most q^{-v} but
/// was not resolved because the precision horizon ran out. The exponent is
/// the valuation, so polynomials of degree d carry `Exact(-d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AbsValue {
    Zero,
    Exact(BigInt),
    Below(BigInt),
}

impl AbsValue {
    pub fn exact(v: impl Into<BigInt>) -> AbsValue {
        AbsValue::Exact(v.into())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AbsValue::Exact(_))
    }

    /// The valuation of an exact value.
    pub fn valuation(&self) -> Option<&BigInt> {
        match self {
            AbsValue::Exact(v) => Some(v),
            _ => None,
        }
    }

    /// q-logarithm of an exact value (`-valuation`).
    pub fn log_q(&self) -> Option<BigInt> {
        self.valuation().map(|v| -v)
    }

    /// Product of two absolute values; `Below` absorbs exact factors.
    pub fn mul(&self, other: &AbsValue) -> AbsValue {
        use AbsValue::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Exact(a), Exact(b)) => Exact(a + b),
            (Exact(a), Below(b)) | (Below(a), Exact(b)) | (Below(a), Below(b)) => Below(a + b),
        }
    }

    /// Compares two exact (or zero) values; `None` when either is `Below`.
    pub fn partial_cmp_exact(&self, other: &AbsValue) -> Option<Ordering> {
        use AbsValue::*;
        match (self, other) {
            (Zero, Zero) => Some(Ordering::Equal),
            (Zero, Exact(_)) => Some(Ordering::Less),
            (Exact(_), Zero) => Some(Ordering::Greater),
            // larger valuation means smaller value
            (Exact(a), Exact(b)) => Some(b.cmp(a)),
            _ => None,
        }
    }
}

impl fmt::Display for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsValue::Zero => write!(f, "0"),
            AbsValue::Exact(v) if v.is_zero() => write!(f, "1"),
            AbsValue::Exact(v) if v.is_negative() => write!(f, "q^{}", -v),
            AbsValue::Exact(v) => write!(f, "q^-{v}"),
            AbsValue::Below(v) => write!(f, "<=q^-{v}"),
        }
    }
}
