//! Logarithm of the least common multiple of period lengths.
//!
//! Observations are positive integers ordered by divisibility; the join of a
//! set is its lcm and the meet of two joins is their gcd. `R(S) = ln lcm(S)`
//! is then modular: `R(a) + R(b) = R(a∨b) + R(a∧b)` for all lattice values.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Element, GroundSet};
use crate::measure::{Exactness, InformationMeasure};
use crate::scalar::{ln_bigint, InfoValue, LogRatio};

/// A value type that can represent `ln n` for positive integers `n`.
pub trait LogValue: InfoValue {
    fn ln_of(n: &BigUint) -> Self;
}

impl LogValue for f64 {
    fn ln_of(n: &BigUint) -> Self {
        ln_bigint(&BigInt::from(n.clone()))
    }
}

impl LogValue for LogRatio {
    fn ln_of(n: &BigUint) -> Self {
        LogRatio::ln_of(BigInt::from(n.clone()))
    }
}

/// One positive integer (a period length) per observation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodObservations {
    values: Vec<BigUint>,
}

impl PeriodObservations {
    pub fn new<I, T>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let values = values
            .into_iter()
            .map(|v| {
                let v: BigInt = v.into();
                v.to_biguint()
                    .filter(|u| !u.is_zero())
                    .ok_or_else(|| Error::Input(format!("period lengths must be positive, got {v}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::Input("at least one period length required".into()));
        }
        Ok(PeriodObservations { values })
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    /// The lattice value of a set of observations: their lcm (1 for the
    /// empty set).
    pub fn join_value(&self, e: Element) -> BigUint {
        e.indices().fold(BigUint::one(), |acc, i| acc.lcm(&self.values[i]))
    }
}

/// `R(S) = ln lcm(S)`, in the arithmetic `V` (floating or exact).
#[derive(Debug, Clone)]
pub struct PeriodMeasure<V> {
    obs: PeriodObservations,
    ground: GroundSet,
    _value: std::marker::PhantomData<fn() -> V>,
}

impl<V: LogValue> PeriodMeasure<V> {
    pub fn new(obs: PeriodObservations) -> Self {
        let ground = GroundSet::indexed(obs.values.len()).expect("period observation count within limit");
        PeriodMeasure { obs, ground, _value: std::marker::PhantomData }
    }

    pub fn with_labels<I, S>(obs: PeriodObservations, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ground = GroundSet::new(labels)?;
        if ground.len() != obs.values.len() {
            return Err(Error::Input("one label per period length required".into()));
        }
        Ok(PeriodMeasure { obs, ground, _value: std::marker::PhantomData })
    }

    pub fn observations(&self) -> &PeriodObservations {
        &self.obs
    }
}

impl<V: LogValue> InformationMeasure for PeriodMeasure<V> {
    type Value = V;

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn evaluate(&self, e: Element) -> Result<V> {
        self.ground.check(e)?;
        Ok(V::ln_of(&self.obs.join_value(e)))
    }

    fn exactness(&self) -> Exactness {
        Exactness::ExactSubmodular
    }

    /// `ln gcd(lcm S, lcm T)`: the meet in the divisibility lattice.
    fn meet_value(&self, s: Element, t: Element) -> Result<V> {
        self.ground.check(s.join(t))?;
        Ok(V::ln_of(&self.obs.join_value(s).gcd(&self.obs.join_value(t))))
    }

    fn name(&self) -> &str {
        "lcm"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{cond_info, cond_mutual_info, joint_info};
    use crate::verify::verify_axioms;
    use crate::{ExactLcmMeasure, LcmMeasure};
    use approx::assert_abs_diff_eq;
    use num_traits::Zero;

    fn e(i: usize) -> Element {
        Element::singleton(i)
    }

    #[test]
    fn lcm_values() {
        let m = LcmMeasure::new(PeriodObservations::new([12, 18, 4, 6, 7]).unwrap());
        assert_abs_diff_eq!(joint_info(&m, e(0).join(e(1))).unwrap(), 36f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(joint_info(&m, e(2).join(e(3))).unwrap(), 12f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(joint_info(&m, e(4)).unwrap(), 7f64.ln(), epsilon = 1e-12);
        assert_eq!(joint_info(&m, Element::EMPTY).unwrap(), 0.0);
        assert_abs_diff_eq!(cond_info(&m, e(0), e(2)).unwrap(), 3f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn cmi_is_log_gcd_ratio() {
        let m = ExactLcmMeasure::new(PeriodObservations::new([12, 18, 6]).unwrap());
        assert!(cond_mutual_info(&m, e(0), e(1), e(2)).unwrap().is_zero());
        assert_eq!(cond_mutual_info(&m, e(0), e(1), Element::EMPTY).unwrap(), LogRatio::ln_of(6));
    }

    #[test]
    fn rejects_non_positive() {
        assert!(PeriodObservations::new([3, 0]).is_err());
        assert!(PeriodObservations::new([-2]).is_err());
        assert!(PeriodObservations::new(Vec::<i64>::new()).is_err());
    }

    #[test]
    fn modular_in_exact_arithmetic() {
        let m = ExactLcmMeasure::new(PeriodObservations::new([12, 18, 35, 8, 45]).unwrap());
        let rep = verify_axioms(&m, 0.0).unwrap();
        assert!(rep.is_clean());
        assert_eq!(rep.tight_pairs, rep.submodular_pairs);
    }

    #[test]
    fn huge_periods_do_not_overflow() {
        let big: BigInt = BigInt::from(2).pow(400u32) - 1;
        let m = LcmMeasure::new(PeriodObservations::new([big.clone(), BigInt::from(3)]).unwrap());
        let v = m.evaluate(e(0)).unwrap();
        assert!((v - 400.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }
}
