//! Value types that information measures can produce.
//!
//! Every measure is generic over the arithmetic it uses for joint and
//! conditional information. Floating point (`f32`, `f64`) serves entropy-style
//! measures, `i64` serves exact counts (LZ components, grammar symbols, word
//! counts), and [`LogRatio`] represents logarithms of positive rationals
//! exactly, so lattice identities such as `log lcm + log gcd = log a + log b`
//! can be checked without rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Additive value type for information quantities.
///
/// Only the operations needed for `R(s|t)`, `I(s:t|u)` and axiom checks are
/// required: addition, subtraction, zero and a total-enough order.
pub trait InfoValue:
    Clone + fmt::Debug + PartialOrd + Zero + Add<Output = Self> + Sub<Output = Self> + Send + Sync + 'static
{
    /// Lossy conversion used at the reporting and threshold boundary.
    fn to_f64(&self) -> f64;

    /// Whether this arithmetic is exact (no rounding in `+`/`-`).
    fn is_exact() -> bool;
}

impl InfoValue for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
}

impl InfoValue for f32 {
    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
    fn is_exact() -> bool {
        false
    }
}

impl InfoValue for i64 {
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn is_exact() -> bool {
        true
    }
}

impl InfoValue for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_exact() -> bool {
        true
    }
}

/// The logarithm of a positive rational number, kept symbolically.
///
/// `LogRatio(q)` stands for `ln q`. Addition multiplies the arguments and
/// subtraction divides them, so sums and differences of logarithms of integers
/// stay exact. Ordering follows the order of the logarithms.
#[derive(Clone, PartialEq, Eq)]
pub struct LogRatio(BigRational);

impl LogRatio {
    /// `ln n` for a positive integer `n`.
    ///
    /// # Panics
    /// Panics if `n` is not positive.
    pub fn ln_of(n: impl Into<BigInt>) -> Self {
        let n = n.into();
        assert!(n.is_positive(), "logarithm argument must be positive");
        LogRatio(BigRational::from_integer(n))
    }

    /// `ln q` for a positive rational `q`.
    pub fn ln_of_ratio(q: BigRational) -> Self {
        assert!(q.is_positive(), "logarithm argument must be positive");
        LogRatio(q)
    }

    /// The argument `q` of `ln q`.
    pub fn argument(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Debug for LogRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ln({})", self.0)
    }
}

impl Add for LogRatio {
    type Output = LogRatio;
    fn add(self, rhs: LogRatio) -> LogRatio {
        LogRatio(self.0 * rhs.0)
    }
}

impl Sub for LogRatio {
    type Output = LogRatio;
    fn sub(self, rhs: LogRatio) -> LogRatio {
        LogRatio(self.0 / rhs.0)
    }
}

impl Neg for LogRatio {
    type Output = LogRatio;
    fn neg(self) -> LogRatio {
        LogRatio(self.0.recip())
    }
}

impl Zero for LogRatio {
    fn zero() -> Self {
        LogRatio(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.0.is_one()
    }
}

impl PartialOrd for LogRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl InfoValue for LogRatio {
    fn to_f64(&self) -> f64 {
        ln_rational(&self.0)
    }
    fn is_exact() -> bool {
        true
    }
}

/// Natural logarithm of a positive big integer without overflowing `f64`.
pub fn ln_bigint(n: &BigInt) -> f64 {
    if let Some(v) = n.to_f64().filter(|v| v.is_finite()) {
        return v.ln();
    }
    let bits = n.bits();
    let shift = bits.saturating_sub(60);
    let top: BigInt = n >> shift;
    top.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_rational(q: &BigRational) -> f64 {
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_ratio_arithmetic_is_exact() {
        let a = LogRatio::ln_of(12);
        let b = LogRatio::ln_of(18);
        let lcm = LogRatio::ln_of(36);
        let gcd = LogRatio::ln_of(6);
        assert_eq!(a.clone() + b.clone(), lcm + gcd);
        assert!((a - b).to_f64() < 0.0);
        assert!(LogRatio::zero().is_zero());
    }

    #[test]
    fn ln_of_huge_integer() {
        let n = BigInt::from(2).pow(2000u32) * 3;
        let expected = 2000.0 * std::f64::consts::LN_2 + 3f64.ln();
        assert!((ln_bigint(&n) - expected).abs() < 1e-9);
    }
}
