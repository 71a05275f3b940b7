//! Markov conditions of an information measure relative to a DAG.
//!
//! Graph node `j` is identified with observation `j` of the measure; the
//! measure may carry further observations (noise terms, background) past the
//! last node.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::lattice::Element;
use crate::measure::{cond_info, cond_mutual_info, joint_info, InformationMeasure};
use crate::scalar::InfoValue;
use num_traits::Zero;

/// Bounds on the global Markov enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumerationGuard {
    pub max_nodes: usize,
    pub max_conditioning: usize,
}

impl Default for EnumerationGuard {
    fn default() -> Self {
        EnumerationGuard { max_nodes: 6, max_conditioning: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalEntry {
    pub node: usize,
    pub label: String,
    pub non_descendants: Element,
    pub parents: Element,
    /// `I(nd_j : x_j | pa_j)`
    pub cmi: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionEntry {
    pub ancestral_set: Element,
    /// `R(A) − Σ_{j∈A} R(x_j | pa_j)`
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalEntry {
    pub a: Element,
    pub b: Element,
    pub c: Element,
    pub cmi: f64,
    pub pass: bool,
}

/// The three equivalent Markov conditions, evaluated on one measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovReport {
    pub measure: String,
    pub threshold: f64,
    pub local: Vec<LocalEntry>,
    pub decomposition: Vec<DecompositionEntry>,
    pub global: Vec<GlobalEntry>,
}

impl MarkovReport {
    pub fn local_pass(&self) -> bool {
        self.local.iter().all(|e| e.pass)
    }

    pub fn decomposition_pass(&self) -> bool {
        self.decomposition.iter().all(|e| e.pass)
    }

    pub fn global_pass(&self) -> bool {
        self.global.iter().all(|e| e.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

fn check_embedding<M: InformationMeasure + ?Sized>(g: &Dag, m: &M) -> Result<()> {
    if g.len() > m.ground().len() {
        return Err(Error::Input(format!(
            "graph has {} nodes but the measure only {} observations",
            g.len(),
            m.ground().len()
        )));
    }
    Ok(())
}

fn check_threshold(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("threshold must be non-negative, got {t}")))
    }
}

/// `I(nd_j : x_j | pa_j) ≤ threshold` for every node.
pub fn local_markov_report<M: InformationMeasure + ?Sized>(g: &Dag, m: &M, threshold: f64) -> Result<Vec<LocalEntry>> {
    check_embedding(g, m)?;
    check_threshold(threshold)?;
    (0..g.len())
        .map(|j| {
            let nd = g.non_descendants(j);
            let pa = g.parents(j);
            let cmi = cond_mutual_info(m, nd, Element::singleton(j), pa)?.to_f64();
            Ok(LocalEntry {
                node: j,
                label: g.label(j).to_string(),
                non_descendants: nd,
                parents: pa,
                cmi,
                pass: cmi <= threshold,
            })
        })
        .collect()
}

/// `R(A) − Σ_{j∈A} R(x_j | pa_j)` for an ancestral set `A`.
pub fn decomposition_report<M: InformationMeasure + ?Sized>(g: &Dag, m: &M, a: Element) -> Result<f64> {
    check_embedding(g, m)?;
    g.check_set(a)?;
    if !g.is_ancestral(a) {
        return Err(Error::Input(format!("{a} is not ancestral")));
    }
    let mut sum = M::Value::zero();
    for j in a.indices() {
        sum = sum + cond_info(m, Element::singleton(j), g.parents(j))?;
    }
    Ok((joint_info(m, a)? - sum).to_f64())
}

/// Every ancestral subset of the graph.
pub fn ancestral_sets(g: &Dag) -> Vec<Element> {
    g.nodes().subsets().filter(|&s| g.is_ancestral(s)).collect()
}

/// Measured `I(A:B|C)` for every d-separated triple with nonempty `A`, `B`,
/// `|C| ≤ guard.max_conditioning`. Each unordered `{A, B}` appears once, with
/// the smaller lowest index in `A`.
pub fn global_markov_report<M: InformationMeasure + ?Sized>(
    g: &Dag,
    m: &M,
    threshold: f64,
    guard: EnumerationGuard,
) -> Result<Vec<GlobalEntry>> {
    check_embedding(g, m)?;
    check_threshold(threshold)?;
    if g.len() > guard.max_nodes {
        return Err(Error::TooLarge { what: "global Markov nodes", actual: g.len(), limit: guard.max_nodes });
    }
    let all = g.nodes();
    let mut out = Vec::new();
    for c in all.subsets().filter(|c| c.len() <= guard.max_conditioning) {
        let rest = all.minus(c);
        for a in rest.subsets().filter(|a| !a.is_empty()) {
            let lowest = a.indices().next().expect("nonempty");
            for b in rest.minus(a).subsets().filter(|b| !b.is_empty()) {
                if b.indices().next().expect("nonempty") < lowest || !g.d_separated_unchecked(a, b, c) {
                    continue;
                }
                let cmi = cond_mutual_info(m, a, b, c)?.to_f64();
                out.push(GlobalEntry { a, b, c, cmi, pass: cmi <= threshold });
            }
        }
    }
    Ok(out)
}

/// All three Markov sections from a single measure.
pub fn markov_report<M: InformationMeasure + ?Sized>(
    g: &Dag,
    m: &M,
    threshold: f64,
    guard: EnumerationGuard,
) -> Result<MarkovReport> {
    let local = local_markov_report(g, m, threshold)?;
    let decomposition = ancestral_sets(g)
        .into_iter()
        .map(|a| {
            let residual = decomposition_report(g, m, a)?;
            Ok(DecompositionEntry { ancestral_set: a, residual, pass: residual.abs() <= threshold })
        })
        .collect::<Result<Vec<_>>>()?;
    let global = global_markov_report(g, m, threshold, guard)?;
    Ok(MarkovReport { measure: m.name().to_string(), threshold, local, decomposition, global })
}

/// The base graph plus one parentless noise node `n_j → x_j` per node.
/// Base node `j` keeps index `j`; its noise node is `len + j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedDag {
    dag: Dag,
    base_len: usize,
}

impl ExtendedDag {
    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn base_len(&self) -> usize {
        self.base_len
    }

    pub fn noise(&self, j: usize) -> usize {
        self.base_len + j
    }

    pub fn noise_nodes(&self) -> Element {
        self.dag.nodes().minus(Element::full(self.base_len))
    }
}

pub fn extend_graph(g: &Dag) -> Result<ExtendedDag> {
    let k = g.len();
    let mut labels: Vec<String> = g.labels().to_vec();
    labels.extend(g.labels().iter().map(|l| format!("n_{l}")));
    let mut edges = g.edges();
    edges.extend((0..k).map(|j| (k + j, j)));
    let dag = Dag::from_edges(labels, &edges)?;
    Ok(ExtendedDag { dag, base_len: k })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalTolerances {
    /// Bound on `R(x_j, pa_j, n_j) − R(pa_j, n_j)`.
    pub equality: f64,
    /// Bound on `I(n_j : n_{−j})`.
    pub noise_independence: f64,
    /// Threshold for the implied local Markov condition.
    pub markov: f64,
}

impl FunctionalTolerances {
    pub fn uniform(t: f64) -> Self {
        FunctionalTolerances { equality: t, noise_independence: t, markov: t }
    }

    /// Markov threshold implied by the premise tolerances on a graph with
    /// `nodes` nodes. `I(x_j : nd_j | pa_j)` is at most the noise dependence
    /// of `n_j`, plus the equality residuals of `j` and of every
    /// non-descendant, plus one `slack` per submodularity step used.
    pub fn derived(equality: f64, noise_independence: f64, nodes: usize, slack: f64) -> Self {
        let markov = noise_independence + nodes as f64 * equality + (nodes + 3) as f64 * slack;
        FunctionalTolerances { equality, noise_independence, markov }
    }
}

impl Default for FunctionalTolerances {
    fn default() -> Self {
        Self::uniform(1e-9)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub tolerances: FunctionalTolerances,
    /// Per node: `R(x_j, pa_j, n_j) − R(pa_j, n_j)`.
    pub equality_residuals: Vec<f64>,
    /// Per node: `I(n_j : n_{−j})`.
    pub noise_dependence: Vec<f64>,
    pub premises_hold: bool,
    /// Local Markov condition, evaluated only when the premises hold.
    pub local_markov: Option<Vec<LocalEntry>>,
}

impl FunctionalReport {
    /// False only if the premises hold but the Markov condition fails.
    pub fn consistent(&self) -> bool {
        match &self.local_markov {
            Some(entries) => entries.iter().all(|e| e.pass),
            None => true,
        }
    }
}

/// Checks whether `m` is a functional model for `g` with noise term
/// `noise[j]` at node `j`, and if so whether it satisfies the local Markov
/// condition.
pub fn functional_model_check<M: InformationMeasure + ?Sized>(
    g: &Dag,
    m: &M,
    noise: &[Element],
    tolerances: FunctionalTolerances,
) -> Result<FunctionalReport> {
    check_embedding(g, m)?;
    if noise.len() != g.len() {
        return Err(Error::Input(format!("noise assignment covers {} of {} nodes", noise.len(), g.len())));
    }
    for (j, &n) in noise.iter().enumerate() {
        m.ground().check(n)?;
        if n.is_empty() {
            return Err(Error::Input(format!("node {} has an empty noise term", g.label(j))));
        }
    }
    let mut equality_residuals = Vec::with_capacity(g.len());
    let mut noise_dependence = Vec::with_capacity(g.len());
    for j in 0..g.len() {
        let pn = g.parents(j).join(noise[j]);
        let r = cond_info(m, Element::singleton(j), pn)?.to_f64();
        equality_residuals.push(r);
        let others = noise.iter().enumerate().filter(|&(i, _)| i != j).fold(Element::EMPTY, |a, (_, &n)| a.join(n));
        let others = others.minus(noise[j]);
        let d = if others.is_empty() { 0.0 } else { cond_mutual_info(m, noise[j], others, Element::EMPTY)?.to_f64() };
        noise_dependence.push(d);
    }
    let premises_hold = equality_residuals.iter().all(|&r| r <= tolerances.equality)
        && noise_dependence.iter().all(|&d| d <= tolerances.noise_independence);
    let local_markov = if premises_hold { Some(local_markov_report(g, m, tolerances.markov)?) } else { None };
    Ok(FunctionalReport { tolerances, equality_residuals, noise_dependence, premises_hold, local_markov })
}
