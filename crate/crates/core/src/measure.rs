//! Information measures on the lattice of observations and the conditional
//! quantities derived from them.
//!
//! An [`InformationMeasure`] assigns a value `R(s)` to every lattice element.
//! Everything else is built from `R`:
//!
//! * conditional information `R(s|t) = R(s∨t) - R(t)`,
//! * conditional mutual information
//!   `I(s:t|u) = R(s∨u) + R(t∨u) - R(s∨t∨u) - R(u)`,
//! * thresholded independence decisions.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Element, GroundSet};
use crate::scalar::InfoValue;

/// How faithfully a measure satisfies the information-measure axioms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exactness {
    /// Normalized, monotone and submodular without exception.
    ExactSubmodular,
    /// Axiom violations are bounded in magnitude by `slack`.
    Approximate { slack: f64 },
}

impl Exactness {
    pub fn slack(self) -> f64 {
        match self {
            Exactness::ExactSubmodular => 0.0,
            Exactness::Approximate { slack } => slack,
        }
    }
}

/// A function `R` from lattice elements to non-negative values.
///
/// Implementations must return zero on the empty element. `evaluate` may
/// assume its argument has been validated against [`ground`](Self::ground);
/// the free functions in this module do that validation.
pub trait InformationMeasure: Send + Sync {
    type Value: InfoValue;

    fn ground(&self) -> &GroundSet;

    fn evaluate(&self, e: Element) -> Result<Self::Value>;

    fn exactness(&self) -> Exactness;

    /// `R` of the meet of `s` and `t` in the measure's own lattice.
    ///
    /// For most measures this is `R(s ∧ t)` in the subset lattice. Measures
    /// whose observations live in a different lattice (for instance integers
    /// under gcd/lcm) override it.
    fn meet_value(&self, s: Element, t: Element) -> Result<Self::Value> {
        self.evaluate(s.meet(t))
    }

    fn name(&self) -> &str;
}

impl<M: InformationMeasure + ?Sized> InformationMeasure for &M {
    type Value = M::Value;
    fn ground(&self) -> &GroundSet {
        (**self).ground()
    }
    fn evaluate(&self, e: Element) -> Result<Self::Value> {
        (**self).evaluate(e)
    }
    fn exactness(&self) -> Exactness {
        (**self).exactness()
    }
    fn meet_value(&self, s: Element, t: Element) -> Result<Self::Value> {
        (**self).meet_value(s, t)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}

impl<M: InformationMeasure + ?Sized> InformationMeasure for Box<M> {
    type Value = M::Value;
    fn ground(&self) -> &GroundSet {
        (**self).ground()
    }
    fn evaluate(&self, e: Element) -> Result<Self::Value> {
        (**self).evaluate(e)
    }
    fn exactness(&self) -> Exactness {
        (**self).exactness()
    }
    fn meet_value(&self, s: Element, t: Element) -> Result<Self::Value> {
        (**self).meet_value(s, t)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}

/// `R(s)`.
pub fn joint_info<M: InformationMeasure + ?Sized>(m: &M, s: Element) -> Result<M::Value> {
    m.ground().check(s)?;
    m.evaluate(s)
}

/// `R(s|t) = R(s∨t) - R(t)`.
pub fn cond_info<M: InformationMeasure + ?Sized>(m: &M, s: Element, t: Element) -> Result<M::Value> {
    Ok(joint_info(m, s.join(t))? - joint_info(m, t)?)
}

/// `I(s:t|u) = R(s∨u) + R(t∨u) - R(s∨t∨u) - R(u)`.
pub fn cond_mutual_info<M: InformationMeasure + ?Sized>(m: &M, s: Element, t: Element, u: Element) -> Result<M::Value> {
    let su = joint_info(m, s.join(u))?;
    let tu = joint_info(m, t.join(u))?;
    let stu = joint_info(m, s.join(t).join(u))?;
    let r_u = joint_info(m, u)?;
    Ok(su + tu - stu - r_u)
}

/// Outcome of a thresholded independence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndependenceDecision {
    pub cmi_value: f64,
    pub threshold: f64,
    pub independent: bool,
}

impl IndependenceDecision {
    /// Applies the rule `independent ⇔ cmi ≤ threshold`.
    pub fn from_value(cmi_value: f64, threshold: f64) -> Result<Self> {
        if !(threshold >= 0.0) {
            return Err(Error::Input(format!("threshold must be non-negative, got {threshold}")));
        }
        Ok(IndependenceDecision { cmi_value, threshold, independent: cmi_value <= threshold })
    }
}

/// Decides `s ⫫ t | u` by comparing `I(s:t|u)` against `threshold`.
pub fn decide_independence<M: InformationMeasure + ?Sized>(
    m: &M,
    s: Element,
    t: Element,
    u: Element,
    threshold: f64,
) -> Result<IndependenceDecision> {
    let cmi = cond_mutual_info(m, s, t, u)?.to_f64();
    IndependenceDecision::from_value(cmi, threshold)
}

/// A conditional dependence function `I(s:t|u)` on lattice elements.
///
/// Every information measure induces one; some dependence notions (such as the
/// projection dimension between linear subspaces) are defined directly and do
/// not come from any `R`.
pub trait DependenceMeasure {
    type Value: InfoValue;

    fn observation_count(&self) -> usize;

    fn dependence(&self, s: Element, t: Element, u: Element) -> Result<Self::Value>;
}

impl<M: InformationMeasure> DependenceMeasure for M {
    type Value = M::Value;

    fn observation_count(&self) -> usize {
        self.ground().len()
    }

    fn dependence(&self, s: Element, t: Element, u: Element) -> Result<Self::Value> {
        cond_mutual_info(self, s, t, u)
    }
}

/// Caches `R` per element. Cached and uncached evaluation return identical
/// values; the cache is safe to share between threads.
pub struct Memoized<M: InformationMeasure> {
    inner: M,
    cache: RwLock<HashMap<Element, M::Value>>,
}

impl<M: InformationMeasure> Memoized<M> {
    pub fn new(inner: M) -> Self {
        Memoized { inner, cache: RwLock::new(HashMap::new()) }
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().map(|c| c.len()).unwrap_or(0)
    }

    pub fn into_inner(self) -> M {
        self.inner
    }
}

impl<M: InformationMeasure> InformationMeasure for Memoized<M> {
    type Value = M::Value;

    fn ground(&self) -> &GroundSet {
        self.inner.ground()
    }

    fn evaluate(&self, e: Element) -> Result<Self::Value> {
        if let Some(v) = self.cache.read().ok().and_then(|c| c.get(&e).cloned()) {
            return Ok(v);
        }
        let v = self.inner.evaluate(e)?;
        if let Ok(mut c) = self.cache.write() {
            c.entry(e).or_insert_with(|| v.clone());
        }
        Ok(v)
    }

    fn exactness(&self) -> Exactness {
        self.inner.exactness()
    }

    fn meet_value(&self, s: Element, t: Element) -> Result<Self::Value> {
        self.inner.meet_value(s, t)
    }

    fn name(&self) -> &str {
        self.inner.name()
    }
}

/// Presents any measure with `f64` values, for front ends that pick a measure
/// at run time.
pub struct AsF64<M>(pub M);

impl<M: InformationMeasure> InformationMeasure for AsF64<M> {
    type Value = f64;

    fn ground(&self) -> &GroundSet {
        self.0.ground()
    }

    fn evaluate(&self, e: Element) -> Result<f64> {
        Ok(self.0.evaluate(e)?.to_f64())
    }

    fn exactness(&self) -> Exactness {
        self.0.exactness()
    }

    fn meet_value(&self, s: Element, t: Element) -> Result<f64> {
        Ok(self.0.meet_value(s, t)?.to_f64())
    }

    fn name(&self) -> &str {
        self.0.name()
    }
}

/// A measure given by an explicit table of values, one per subset.
///
/// Mostly useful for tests and for measures computed elsewhere.
pub struct TableMeasure<V: InfoValue> {
    ground: GroundSet,
    values: Vec<V>,
    exactness: Exactness,
}

impl<V: InfoValue> TableMeasure<V> {
    /// `values[bits]` is `R` of the element with those bits.
    pub fn new(ground: GroundSet, values: Vec<V>, exactness: Exactness) -> Result<Self> {
        if ground.len() > 20 || values.len() != 1usize << ground.len() {
            return Err(Error::Input(format!("table needs 2^{} values, got {}", ground.len(), values.len())));
        }
        Ok(TableMeasure { ground, values, exactness })
    }
}

impl<V: InfoValue> InformationMeasure for TableMeasure<V> {
    type Value = V;

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn evaluate(&self, e: Element) -> Result<V> {
        self.values
            .get(e.bits() as usize)
            .cloned()
            .ok_or(Error::UnknownObservation { index: e.max_index().unwrap_or(0), len: self.ground.len() })
    }

    fn exactness(&self) -> Exactness {
        self.exactness
    }

    fn name(&self) -> &str {
        "table"
    }
}
