//! Exhaustive checks of the information-measure axioms and of the properties
//! of the induced dependence measure (semi-graphoid axioms, chain rule, data
//! processing inequality).

use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Element;
use crate::measure::{cond_info, cond_mutual_info, DependenceMeasure, InformationMeasure};
use crate::scalar::InfoValue;

/// Largest ground set [`verify_axioms`] will enumerate.
pub const AXIOM_LIMIT: usize = 12;
/// Largest ground set [`verify_semigraphoid`] will enumerate.
pub const SEMIGRAPHOID_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Normalization,
    Monotonicity,
    Submodularity,
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
}

/// One violated instance. `magnitude` is how far the inequality fails.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub s: Element,
    pub t: Element,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AxiomReport {
    pub ground_size: usize,
    pub tolerance: f64,
    pub violations: Vec<Violation>,
    pub monotone_pairs: usize,
    pub submodular_pairs: usize,
    /// Pairs where `R(s)+R(t) = R(s∨t)+R(s∧t)` (exactly, or within tolerance
    /// for inexact arithmetic).
    pub tight_pairs: usize,
    pub max_violation: f64,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, axiom: Axiom) -> usize {
        self.violations.iter().filter(|v| v.axiom == axiom).count()
    }

    fn record(&mut self, axiom: Axiom, s: Element, t: Element, magnitude: f64) {
        self.max_violation = self.max_violation.max(magnitude);
        self.violations.push(Violation { axiom, s, t, magnitude });
    }
}

/// Amount by which `diff >= 0` fails, if it fails by more than `tol`.
fn shortfall<V: InfoValue>(diff: &V, tol: f64) -> Option<f64> {
    if *diff < V::zero() {
        let m = (V::zero() - diff.clone()).to_f64();
        (m > tol).then_some(m)
    } else {
        None
    }
}

/// Checks normalization, monotonicity over all comparable pairs and
/// submodularity over all incomparable pairs of the measure's lattice.
///
/// Violations smaller than `tolerance` are ignored; pass `0.0` for exact
/// arithmetic and the declared slack for approximate measures.
pub fn verify_axioms<M: InformationMeasure + ?Sized>(m: &M, tolerance: f64) -> Result<AxiomReport> {
    let n = m.ground().len();
    if n > AXIOM_LIMIT {
        return Err(Error::TooLarge { what: "ground set", actual: n, limit: AXIOM_LIMIT });
    }
    let values: Vec<M::Value> = m.ground().elements().map(|e| m.evaluate(e)).collect::<Result<_>>()?;
    let r = |e: Element| &values[e.bits() as usize];
    let mut report = AxiomReport { ground_size: n, tolerance, ..Default::default() };

    let zero = M::Value::zero();
    let bottom = r(Element::EMPTY).to_f64().abs();
    if *r(Element::EMPTY) != zero && bottom > tolerance {
        report.record(Axiom::Normalization, Element::EMPTY, Element::EMPTY, bottom);
    }

    let top = m.ground().top();
    for t in top.subsets() {
        for s in t.subsets() {
            if s == t {
                continue;
            }
            report.monotone_pairs += 1;
            if let Some(mag) = shortfall(&(r(t).clone() - r(s).clone()), tolerance) {
                report.record(Axiom::Monotonicity, s, t, mag);
            }
        }
    }

    let exact = M::Value::is_exact();
    for s in top.subsets() {
        for t in top.subsets() {
            if t.bits() <= s.bits() || s.is_subset_of(t) || t.is_subset_of(s) {
                continue;
            }
            report.submodular_pairs += 1;
            let diff = r(s).clone() + r(t).clone() - r(s.join(t)).clone() - m.meet_value(s, t)?;
            let tight = if exact { diff == zero } else { diff.to_f64().abs() <= tolerance };
            if tight {
                report.tight_pairs += 1;
            }
            if let Some(mag) = shortfall(&diff, tolerance) {
                report.record(Axiom::Submodularity, s, t, mag);
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SemigraphoidReport {
    pub ground_size: usize,
    pub tolerance: f64,
    /// Number of instances whose premise held, per axiom.
    pub premises_held: HashMap<String, usize>,
    pub violations: Vec<SemigraphoidViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemigraphoidViolation {
    pub axiom: Axiom,
    pub x: Element,
    pub y: Element,
    pub w: Element,
    pub z: Element,
    pub conclusion_value: f64,
}

impl SemigraphoidReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustively checks symmetry, decomposition, weak union and contraction
/// over all pairwise disjoint `x, y, w, z` (with `x`, `y` non-empty).
///
/// A statement counts as an independence when its value is at most
/// `tolerance`. Conclusions are checked against `2 * tolerance` because
/// contraction adds two premises.
pub fn verify_semigraphoid<D: DependenceMeasure + ?Sized>(d: &D, tolerance: f64) -> Result<SemigraphoidReport> {
    let n = d.observation_count();
    if n > SEMIGRAPHOID_LIMIT {
        return Err(Error::TooLarge { what: "ground set", actual: n, limit: SEMIGRAPHOID_LIMIT });
    }
    let cache: RefCell<HashMap<(Element, Element, Element), f64>> = RefCell::new(HashMap::new());
    let cmi = |s: Element, t: Element, u: Element| -> Result<f64> {
        if let Some(v) = cache.borrow().get(&(s, t, u)) {
            return Ok(*v);
        }
        let v = d.dependence(s, t, u)?.to_f64();
        cache.borrow_mut().insert((s, t, u), v);
        Ok(v)
    };
    let conclusion_tol = 2.0 * tolerance;
    let mut report = SemigraphoidReport { ground_size: n, tolerance, ..Default::default() };
    let mut held = |axiom: Axiom| {
        *report.premises_held.entry(format!("{axiom:?}").to_lowercase()).or_insert(0) += 1;
    };
    let mut violations = Vec::new();

    // assign every observation to one of x, y, w, z or none
    let total = 5usize.pow(n as u32);
    for code in 0..total {
        let mut parts = [Element::EMPTY; 4];
        let mut c = code;
        for i in 0..n {
            let slot = c % 5;
            c /= 5;
            if slot < 4 {
                parts[slot] = parts[slot].join(Element::singleton(i));
            }
        }
        let [x, y, w, z] = parts;
        if x.is_empty() || y.is_empty() {
            continue;
        }
        let mut fail = |axiom, value: f64| {
            violations.push(SemigraphoidViolation { axiom, x, y, w, z, conclusion_value: value });
        };

        if w.is_empty() {
            if cmi(x, y, z)? <= tolerance {
                held(Axiom::Symmetry);
                let v = cmi(y, x, z)?;
                if v > conclusion_tol {
                    fail(Axiom::Symmetry, v);
                }
            }
            continue;
        }

        if cmi(x, y.join(w), z)? <= tolerance {
            held(Axiom::Decomposition);
            for part in [y, w] {
                let v = cmi(x, part, z)?;
                if v > conclusion_tol {
                    fail(Axiom::Decomposition, v);
                }
            }
            held(Axiom::WeakUnion);
            let v = cmi(x, y, z.join(w))?;
            if v > conclusion_tol {
                fail(Axiom::WeakUnion, v);
            }
        }

        if cmi(x, w, z.join(y))? <= tolerance && cmi(x, y, z)? <= tolerance {
            held(Axiom::Contraction);
            let v = cmi(x, w.join(y), z)?;
            if v > conclusion_tol {
                fail(Axiom::Contraction, v);
            }
        }
    }
    report.violations = violations;
    Ok(report)
}

/// `I(s : t∨u | x) - I(s:t|x) - I(s:u|t∨x)`.
///
/// Identically zero for any dependence measure induced by an information
/// measure; non-zero residuals certify that no such measure exists.
pub fn verify_chain_rule<D: DependenceMeasure + ?Sized>(
    d: &D,
    s: Element,
    t: Element,
    u: Element,
    x: Element,
) -> Result<D::Value> {
    let whole = d.dependence(s, t.join(u), x)?;
    let first = d.dependence(s, t, x)?;
    let second = d.dependence(s, u, t.join(x))?;
    Ok(whole - first - second)
}

#[derive(Debug, Clone, Serialize)]
pub struct DataProcessingReport {
    /// `R(s|t)`.
    pub residual_information: f64,
    /// `I(s:x|t)`.
    pub conditional_dependence: f64,
    /// `I(s:x)`.
    pub dependence_processed: f64,
    /// `I(t:x)`.
    pub dependence_source: f64,
    /// Whether `s` is (approximately) determined by `t`.
    pub premise: bool,
    pub holds: bool,
}

/// If `R(s|t) ≤ tolerance`, checks `I(s:x|t) ≤ tolerance` and
/// `I(s:x) ≤ I(t:x) + tolerance`.
pub fn verify_data_processing<M: InformationMeasure + ?Sized>(
    m: &M,
    s: Element,
    t: Element,
    x: Element,
    tolerance: f64,
) -> Result<DataProcessingReport> {
    let residual_information = cond_info(m, s, t)?.to_f64();
    let conditional_dependence = cond_mutual_info(m, s, x, t)?.to_f64();
    let dependence_processed = cond_mutual_info(m, s, x, Element::EMPTY)?.to_f64();
    let dependence_source = cond_mutual_info(m, t, x, Element::EMPTY)?.to_f64();
    let premise = residual_information <= tolerance;
    let holds =
        !premise || (conditional_dependence <= tolerance && dependence_processed <= dependence_source + tolerance);
    Ok(DataProcessingReport {
        residual_information,
        conditional_dependence,
        dependence_processed,
        dependence_source,
        premise,
        holds,
    })
}
