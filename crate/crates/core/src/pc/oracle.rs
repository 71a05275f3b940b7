use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::lattice::Element;
use crate::measure::{decide_independence, IndependenceDecision, InformationMeasure};

/// Answers "is `s ⫫ t | u`?" for sets of graph nodes.
pub trait IndependenceOracle: Send + Sync {
    fn node_count(&self) -> usize;

    fn query(&self, s: Element, t: Element, u: Element) -> Result<IndependenceDecision>;
}

impl<O: IndependenceOracle + ?Sized> IndependenceOracle for &O {
    fn node_count(&self) -> usize {
        (**self).node_count()
    }

    fn query(&self, s: Element, t: Element, u: Element) -> Result<IndependenceDecision> {
        (**self).query(s, t, u)
    }
}

/// Perfect oracle: independence is d-separation in a known graph. Reports a
/// dependence value of 1 for connected sets and 0 otherwise.
#[derive(Debug, Clone)]
pub struct DSepOracle {
    dag: Dag,
}

impl DSepOracle {
    pub fn new(dag: Dag) -> Self {
        DSepOracle { dag }
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }
}

impl IndependenceOracle for DSepOracle {
    fn node_count(&self) -> usize {
        self.dag.len()
    }

    fn query(&self, s: Element, t: Element, u: Element) -> Result<IndependenceDecision> {
        let sep = self.dag.d_separated(s, t, u)?;
        IndependenceDecision::from_value(if sep { 0.0 } else { 1.0 }, 0.5)
    }
}

/// Thresholded conditional mutual information of a measure. Node `i` stands
/// for the observations `nodes[i]`; `background` is joined into every
/// conditioning set.
#[derive(Debug, Clone)]
pub struct MeasureOracle<M> {
    measure: M,
    nodes: Vec<Element>,
    background: Element,
    threshold: f64,
}

impl<M: InformationMeasure> MeasureOracle<M> {
    /// Node `i` is observation `i`.
    pub fn new(measure: M, nodes: usize, threshold: f64) -> Result<Self> {
        Self::with_nodes(measure, (0..nodes).map(Element::singleton).collect(), threshold)
    }

    pub fn with_nodes(measure: M, nodes: Vec<Element>, threshold: f64) -> Result<Self> {
        if !(threshold >= 0.0) {
            return Err(Error::Input(format!("threshold must be non-negative, got {threshold}")));
        }
        for &e in &nodes {
            measure.ground().check(e)?;
            if e.is_empty() {
                return Err(Error::Input("node mapped to the empty element".into()));
            }
        }
        Ok(MeasureOracle { measure, nodes, background: Element::EMPTY, threshold })
    }

    pub fn with_background(mut self, background: Element) -> Result<Self> {
        self.measure.ground().check(background)?;
        if let Some(i) = self.nodes.iter().position(|&n| !n.is_disjoint(background)) {
            return Err(Error::Input(format!("node {i} overlaps the background")));
        }
        self.background = background;
        Ok(self)
    }

    pub fn measure(&self) -> &M {
        &self.measure
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    fn lift(&self, s: Element) -> Result<Element> {
        s.indices().try_fold(Element::EMPTY, |acc, i| {
            self.nodes.get(i).map(|&e| acc.join(e)).ok_or(Error::UnknownObservation { index: i, len: self.nodes.len() })
        })
    }
}

impl<M: InformationMeasure> IndependenceOracle for MeasureOracle<M> {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn query(&self, s: Element, t: Element, u: Element) -> Result<IndependenceDecision> {
        let (s, t, u) = (self.lift(s)?, self.lift(t)?, self.lift(u)?.join(self.background));
        decide_independence(&self.measure, s, t, u, self.threshold)
    }
}

/// One answered query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCall {
    pub s: Element,
    pub t: Element,
    pub u: Element,
    pub cmi: f64,
    pub threshold: f64,
    pub independent: bool,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    s: &'a str,
    t: &'a str,
    conditioning: &'a str,
    cmi: f64,
    threshold: f64,
    independent: bool,
}

/// Records every query answered by the wrapped oracle, in call order.
#[derive(Debug)]
pub struct LoggingOracle<O> {
    inner: O,
    log: Mutex<Vec<OracleCall>>,
}

impl<O: IndependenceOracle> LoggingOracle<O> {
    pub fn new(inner: O) -> Self {
        LoggingOracle { inner, log: Mutex::new(Vec::new()) }
    }

    pub fn calls(&self) -> Vec<OracleCall> {
        self.log.lock().expect("log lock").clone()
    }

    pub fn into_inner(self) -> (O, Vec<OracleCall>) {
        (self.inner, self.log.into_inner().expect("log lock"))
    }

    /// CSV with node sets written as space-separated labels.
    pub fn to_csv(&self, labels: &[String]) -> Result<String> {
        calls_to_csv(&self.calls(), labels)
    }
}

pub fn calls_to_csv(calls: &[OracleCall], labels: &[String]) -> Result<String> {
    let name = |e: Element| -> Result<String> {
        e.indices()
            .map(|i| labels.get(i).cloned().ok_or(Error::UnknownObservation { index: i, len: labels.len() }))
            .collect::<Result<Vec<_>>>()
            .map(|v| v.join(" "))
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in calls {
        let (s, t, u) = (name(c.s)?, name(c.t)?, name(c.u)?);
        w.serialize(CsvRow {
            s: &s,
            t: &t,
            conditioning: &u,
            cmi: c.cmi,
            threshold: c.threshold,
            independent: c.independent,
        })
        .map_err(|e| Error::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

pub fn write_calls_csv(calls: &[OracleCall], labels: &[String], path: &Path) -> Result<()> {
    std::fs::write(path, calls_to_csv(calls, labels)?).map_err(|e| Error::io(path, e))
}

impl<O: IndependenceOracle> IndependenceOracle for LoggingOracle<O> {
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn query(&self, s: Element, t: Element, u: Element) -> Result<IndependenceDecision> {
        let d = self.inner.query(s, t, u)?;
        self.log.lock().expect("log lock").push(OracleCall {
            s,
            t,
            u,
            cmi: d.cmi_value,
            threshold: d.threshold,
            independent: d.independent,
        });
        Ok(d)
    }
}

/// Answers from a recorded log; unknown queries are errors.
#[derive(Debug, Clone)]
pub struct ReplayOracle {
    nodes: usize,
    answers: HashMap<(Element, Element, Element), IndependenceDecision>,
}

impl ReplayOracle {
    pub fn new(nodes: usize, calls: &[OracleCall]) -> Self {
        let answers = calls
            .iter()
            .map(|c| {
                let d = IndependenceDecision { cmi_value: c.cmi, threshold: c.threshold, independent: c.independent };
                ((c.s, c.t, c.u), d)
            })
            .collect();
        ReplayOracle { nodes, answers }
    }
}

impl IndependenceOracle for ReplayOracle {
    fn node_count(&self) -> usize {
        self.nodes
    }

    fn query(&self, s: Element, t: Element, u: Element) -> Result<IndependenceDecision> {
        self.answers
            .get(&(s, t, u))
            .or_else(|| self.answers.get(&(t, s, u)))
            .copied()
            .ok_or_else(|| Error::Input(format!("query {s} ⫫ {t} | {u} not in the replay log")))
    }
}

/// Fails once more than `budget` queries have been made.
#[derive(Debug)]
pub struct Budgeted<O> {
    inner: O,
    budget: usize,
    calls: AtomicUsize,
}

impl<O: IndependenceOracle> Budgeted<O> {
    pub fn new(inner: O, budget: usize) -> Self {
        Budgeted { inner, budget, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<O: IndependenceOracle> IndependenceOracle for Budgeted<O> {
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn query(&self, s: Element, t: Element, u: Element) -> Result<IndependenceDecision> {
        let calls = self.calls.fetch_add(1, Ordering::Relaxed) + 1;
        if calls > self.budget {
            return Err(Error::BudgetExhausted { budget: self.budget, calls: calls - 1 });
        }
        self.inner.query(s, t, u)
    }
}
