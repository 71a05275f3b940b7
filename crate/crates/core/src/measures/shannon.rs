//! Joint Shannon entropy of discrete random variables.

use std::fmt::Write as _;
use std::path::Path;

use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::lattice::{Element, GroundSet};
use crate::measure::{Exactness, InformationMeasure};
use crate::scalar::InfoValue;

/// A joint probability mass function over finitely many discrete variables.
///
/// Probabilities are stored densely in row-major order: the first variable is
/// the most significant digit of the assignment index.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable<F> {
    names: Vec<String>,
    cards: Vec<usize>,
    probs: Vec<F>,
}

impl<F: Float + InfoValue> JointTable<F> {
    pub fn new(names: Vec<String>, cards: Vec<usize>, probs: Vec<F>) -> Result<Self> {
        if names.len() != cards.len() {
            return Err(Error::Input("one cardinality per variable required".into()));
        }
        if cards.contains(&0) {
            return Err(Error::Input("variable cardinalities must be positive".into()));
        }
        let size = cards.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
        if size != Some(probs.len()) {
            return Err(Error::Input(format!(
                "table needs {} entries, got {}",
                size.map_or("too many".to_string(), |s| s.to_string()),
                probs.len()
            )));
        }
        if probs.iter().any(|p| !(InfoValue::to_f64(p) >= 0.0)) {
            return Err(Error::Input("probabilities must be non-negative".into()));
        }
        let total: f64 = probs.iter().map(InfoValue::to_f64).sum();
        let tol = (InfoValue::to_f64(&F::epsilon()) * probs.len() as f64 * 4.0).max(1e-12);
        if (total - 1.0).abs() > tol {
            return Err(Error::Input(format!("probabilities sum to {total}, not 1")));
        }
        GroundSet::new(names.iter().cloned())?;
        Ok(JointTable { names, cards, probs })
    }

    /// Builds a table from a probability function over assignments.
    pub fn from_fn(names: Vec<String>, cards: Vec<usize>, mut p: impl FnMut(&[usize]) -> F) -> Result<Self> {
        let size: usize = cards.iter().product();
        let mut probs = Vec::with_capacity(size);
        let mut assignment = vec![0; cards.len()];
        for idx in 0..size {
            decode(idx, &cards, &mut assignment);
            probs.push(p(&assignment));
        }
        Self::new(names, cards, probs)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn probabilities(&self) -> &[F] {
        &self.probs
    }

    /// Probability of a full assignment.
    pub fn prob(&self, assignment: &[usize]) -> F {
        self.probs[encode(assignment, &self.cards)]
    }

    /// Marginal distribution over the variables in `subset`, in index order.
    pub fn marginal(&self, subset: Element) -> Vec<F> {
        let vars: Vec<usize> = subset.indices().collect();
        let sub_cards: Vec<usize> = vars.iter().map(|&v| self.cards[v]).collect();
        let mut out = vec![F::zero(); sub_cards.iter().product()];
        let mut assignment = vec![0; self.cards.len()];
        let mut sub = vec![0; vars.len()];
        for (idx, &p) in self.probs.iter().enumerate() {
            if p == F::zero() {
                continue;
            }
            decode(idx, &self.cards, &mut assignment);
            for (k, &v) in vars.iter().enumerate() {
                sub[k] = assignment[v];
            }
            let j = encode(&sub, &sub_cards);
            out[j] = out[j] + p;
        }
        out
    }

    /// Joint entropy in bits of the variables in `subset`.
    pub fn entropy(&self, subset: Element) -> F {
        if subset.is_empty() {
            return F::zero();
        }
        self.marginal(subset).into_iter().filter(|&p| p > F::zero()).fold(F::zero(), |h, p| h - p * p.log2())
    }

    /// Parses the plain-text table format:
    ///
    /// ```text
    /// # comment
    /// x:2 y:2
    /// 0 0 0.25
    /// 0 1 0.25
    /// 1 0 0.25
    /// 1 1 0.25
    /// ```
    ///
    /// The first non-comment line declares `name:cardinality` pairs, every
    /// further line gives one assignment and its probability. Assignments not
    /// listed have probability zero.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Input("empty table".into()))?;
        let mut names = Vec::new();
        let mut cards = Vec::new();
        for tok in header.split_whitespace() {
            let (name, card) = tok
                .split_once(':')
                .ok_or_else(|| Error::Input(format!("header token {tok:?} is not name:cardinality")))?;
            let card: usize =
                card.parse().map_err(|_| Error::Input(format!("bad cardinality in header token {tok:?}")))?;
            names.push(name.to_string());
            cards.push(card);
        }
        let size = cards
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .filter(|&s| s <= 1 << 24)
            .ok_or_else(|| Error::Input("table too large".into()))?;
        let mut probs = vec![F::zero(); size];
        let mut seen = vec![false; size];
        for (lineno, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != cards.len() + 1 {
                return Err(Error::Input(format!("line {lineno}: expected {} fields", cards.len() + 1)));
            }
            let mut assignment = Vec::with_capacity(cards.len());
            for (k, t) in toks[..cards.len()].iter().enumerate() {
                let v: usize = t.parse().map_err(|_| Error::Input(format!("line {lineno}: bad value {t:?}")))?;
                if v >= cards[k] {
                    return Err(Error::Input(format!("line {lineno}: value {v} out of range for {}", names[k])));
                }
                assignment.push(v);
            }
            let p: f64 =
                toks[cards.len()].parse().map_err(|_| Error::Input(format!("line {lineno}: bad probability")))?;
            let idx = encode(&assignment, &cards);
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::Input(format!("line {lineno}: duplicate assignment")));
            }
            probs[idx] = F::from(p).ok_or_else(|| Error::Input(format!("line {lineno}: bad probability")))?;
        }
        Self::new(names, cards, probs)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Serializes to the format accepted by [`parse`](Self::parse), listing
    /// only non-zero entries.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.names.iter().zip(&self.cards).map(|(n, c)| format!("{n}:{c}")).collect();
        out.push_str(&header.join(" "));
        out.push('\n');
        let mut assignment = vec![0; self.cards.len()];
        for (idx, p) in self.probs.iter().enumerate() {
            if *p == F::zero() {
                continue;
            }
            decode(idx, &self.cards, &mut assignment);
            for v in &assignment {
                let _ = write!(out, "{v} ");
            }
            let _ = writeln!(out, "{:e}", InfoValue::to_f64(p));
        }
        out
    }
}

fn decode(mut idx: usize, cards: &[usize], out: &mut [usize]) {
    for k in (0..cards.len()).rev() {
        out[k] = idx % cards[k];
        idx /= cards[k];
    }
}

fn encode(assignment: &[usize], cards: &[usize]) -> usize {
    assignment.iter().zip(cards).fold(0, |acc, (&v, &c)| acc * c + v)
}

/// Shannon entropy (in bits) as an information measure over the variables of
/// a [`JointTable`].
#[derive(Debug, Clone)]
pub struct ShannonMeasure<F> {
    table: JointTable<F>,
    ground: GroundSet,
}

impl<F: Float + InfoValue> ShannonMeasure<F> {
    pub fn new(table: JointTable<F>) -> Self {
        let ground = GroundSet::new(table.names.iter().cloned()).expect("names validated by JointTable");
        ShannonMeasure { table, ground }
    }

    pub fn table(&self) -> &JointTable<F> {
        &self.table
    }
}

impl<F: Float + InfoValue> InformationMeasure for ShannonMeasure<F> {
    type Value = F;

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn evaluate(&self, e: Element) -> Result<F> {
        self.ground.check(e)?;
        Ok(self.table.entropy(e))
    }

    fn exactness(&self) -> Exactness {
        Exactness::ExactSubmodular
    }

    fn name(&self) -> &str {
        "shannon"
    }
}

/// A random discrete structural model `x_j = f_j(pa_j, n_j)` over a DAG.
///
/// The generated table contains the observed variables `x0..x{k-1}` followed
/// by the noise variables `n0..n{k-1}`; noises are mutually independent with
/// random marginals and each `f_j` is a random lookup table.
#[derive(Debug, Clone)]
pub struct StructuralModel {
    pub card: usize,
    pub noise_card: usize,
}

impl Default for StructuralModel {
    fn default() -> Self {
        StructuralModel { card: 2, noise_card: 2 }
    }
}

impl StructuralModel {
    pub fn sample<R: Rng + ?Sized>(&self, dag: &Dag, rng: &mut R) -> Result<JointTable<f64>> {
        let k = dag.len();
        let noise: Vec<Vec<f64>> = (0..k).map(|_| random_distribution(self.noise_card, rng)).collect();
        let order = dag.topological_order();
        let parents: Vec<Vec<usize>> = (0..k).map(|j| dag.parent_list(j)).collect();
        // f_j: (parent values, noise value) -> value, as a flat random table
        let funcs: Vec<Vec<usize>> = (0..k)
            .map(|j| {
                let size = self.card.pow(parents[j].len() as u32) * self.noise_card;
                (0..size).map(|_| rng.gen_range(0..self.card)).collect()
            })
            .collect();

        let mut names: Vec<String> = (0..k).map(|j| format!("x{j}")).collect();
        names.extend((0..k).map(|j| format!("n{j}")));
        let mut cards = vec![self.card; k];
        cards.extend(std::iter::repeat_n(self.noise_card, k));
        let total: usize = cards.iter().product();
        let mut probs = vec![0.0; total];
        let mut noise_vals = vec![0usize; k];
        let mut xs = vec![0usize; k];
        for code in 0..self.noise_card.pow(k as u32) {
            let mut c = code;
            let mut p = 1.0;
            for j in 0..k {
                noise_vals[j] = c % self.noise_card;
                c /= self.noise_card;
                p *= noise[j][noise_vals[j]];
            }
            for &j in &order {
                let pa_code = parents[j].iter().fold(0, |acc, &q| acc * self.card + xs[q]);
                xs[j] = funcs[j][pa_code * self.noise_card + noise_vals[j]];
            }
            let mut full = xs.clone();
            full.extend_from_slice(&noise_vals);
            probs[encode(&full, &cards)] += p;
        }
        JointTable::new(names, cards, probs)
    }
}

/// Strictly positive random distribution over `n` outcomes.
pub fn random_distribution<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{cond_info, cond_mutual_info, joint_info};
    use approx::assert_abs_diff_eq;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    fn xor_table() -> ShannonMeasure<f64> {
        let t =
            JointTable::from_fn(
                names(&["x", "y", "z"]),
                vec![2, 2, 2],
                |a| {
                    if a[2] == a[0] ^ a[1] {
                        0.25
                    } else {
                        0.0
                    }
                },
            )
            .unwrap();
        ShannonMeasure::new(t)
    }

    #[test]
    fn fair_coin_has_one_bit() {
        let t = JointTable::new(names(&["c"]), vec![2], vec![0.5, 0.5]).unwrap();
        let m = ShannonMeasure::new(t);
        assert_abs_diff_eq!(joint_info(&m, Element::singleton(0)).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(joint_info(&m, Element::EMPTY).unwrap(), 0.0);
    }

    #[test]
    fn point_mass_and_product() {
        let t = JointTable::new(names(&["d"]), vec![3], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(ShannonMeasure::new(t).evaluate(Element::singleton(0)).unwrap(), 0.0);
        let t = JointTable::from_fn(names(&["a", "b"]), vec![2, 2], |_| 0.25).unwrap();
        let m = ShannonMeasure::new(t);
        assert_abs_diff_eq!(m.evaluate(Element::full(2)).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            cond_mutual_info(&m, Element::singleton(0), Element::singleton(1), Element::EMPTY).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn copy_has_no_conditional_information() {
        let t = JointTable::from_fn(names(&["x", "y"]), vec![2, 2], |a| if a[0] == a[1] { 0.5 } else { 0.0 }).unwrap();
        let m = ShannonMeasure::new(t);
        assert_abs_diff_eq!(cond_info(&m, Element::singleton(1), Element::singleton(0)).unwrap(), 0.0);
    }

    #[test]
    fn xor_triple() {
        let m = xor_table();
        let (x, y, z) = (Element::singleton(0), Element::singleton(1), Element::singleton(2));
        assert_abs_diff_eq!(cond_mutual_info(&m, x, y, Element::EMPTY).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cond_mutual_info(&m, x, y, z).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cond_mutual_info(&m, x, z, Element::EMPTY).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cond_mutual_info(&m, x, z.join(y), Element::EMPTY).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn table_text_round_trip() {
        let text = "# xor\nx:2 y:2 z:2\n0 0 0 0.25\n0 1 1 0.25\n1 0 1 0.25\n1 1 0 0.25\n";
        let t: JointTable<f64> = JointTable::parse(text).unwrap();
        assert_eq!(t, xor_table().table().clone());
        assert_eq!(JointTable::<f64>::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn malformed_tables() {
        assert!(JointTable::<f64>::parse("").is_err());
        assert!(JointTable::<f64>::parse("x:2\n0 0.5\n").is_err());
        assert!(JointTable::<f64>::parse("x:2\n0 0.5\n0 0.5\n").is_err());
        assert!(JointTable::<f64>::parse("x:2\n2 1.0\n").is_err());
        assert!(JointTable::<f64>::parse("x:2\n0 -0.5\n1 1.5\n").is_err());
        assert!(JointTable::<f64>::new(names(&["x"]), vec![2], vec![0.5]).is_err());
    }

    #[test]
    fn single_precision_tables_work() {
        let t = JointTable::<f32>::from_fn(names(&["a", "b"]), vec![2, 2], |_| 0.25).unwrap();
        let m = ShannonMeasure::new(t);
        assert!((m.evaluate(Element::full(2)).unwrap() - 2.0).abs() < 1e-6);
    }
}
