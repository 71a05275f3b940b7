//! Seeded, parallel structure-recovery experiments on text-derived strings.
//!
//! Every trial draws its randomness from its own seed, derived from the
//! master seed and the trial number, so results do not depend on the number
//! of worker threads.

use std::fmt;
use std::ops::Range;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grammar::GrammarMeasure;
use crate::graph::Dag;
use crate::lattice::{Element, GroundSet};
use crate::lz::{LzConfig, LzMeasure, Symbol};
use crate::measure::{cond_mutual_info, Exactness, InformationMeasure, Memoized};
use crate::pc::{cpdag, run_pc, LoggingOracle, MeasureOracle, PcConfig};
use crate::textpipe::{
    background_element, build_chain, build_fournode, chain_graph, sample_span, ChainSpec, Corpus, GraphId, LengthRange,
    SegmentOrder, SegmentSpec, Transformer, DEFAULT_BACKGROUND_LEN,
};

pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_QUANTILE: f64 = 0.99;
pub const DEFAULT_CALIBRATION_SAMPLES: usize = 200;

/// Compression measures usable on text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextMeasureKind {
    Lz,
    Grammar,
}

impl fmt::Display for TextMeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TextMeasureKind::Lz => "lz",
            TextMeasureKind::Grammar => "grammar",
        })
    }
}

impl std::str::FromStr for TextMeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lz" => Ok(TextMeasureKind::Lz),
            "grammar" | "gr" => Ok(TextMeasureKind::Grammar),
            _ => Err(Error::Config(format!("measure {s:?} does not apply to text strings (use lz or grammar)"))),
        }
    }
}

/// LZ or grammar information over a fixed list of strings.
#[derive(Debug, Clone)]
pub enum TextMeasure {
    Lz(LzMeasure),
    Grammar(GrammarMeasure),
}

impl TextMeasure {
    pub fn new(kind: TextMeasureKind, strings: Vec<Vec<Symbol>>) -> Result<Self> {
        let cfg = LzConfig::default();
        Ok(match kind {
            TextMeasureKind::Lz => TextMeasure::Lz(LzMeasure::new(strings, cfg)?),
            TextMeasureKind::Grammar => TextMeasure::Grammar(GrammarMeasure::new(strings, cfg)?),
        })
    }
}

impl InformationMeasure for TextMeasure {
    type Value = i64;

    fn ground(&self) -> &GroundSet {
        match self {
            TextMeasure::Lz(m) => m.ground(),
            TextMeasure::Grammar(m) => m.ground(),
        }
    }

    fn evaluate(&self, e: Element) -> Result<i64> {
        match self {
            TextMeasure::Lz(m) => m.evaluate(e),
            TextMeasure::Grammar(m) => m.evaluate(e),
        }
    }

    fn exactness(&self) -> Exactness {
        match self {
            TextMeasure::Lz(m) => m.exactness(),
            TextMeasure::Grammar(m) => m.exactness(),
        }
    }

    fn name(&self) -> &str {
        match self {
            TextMeasure::Lz(m) => m.name(),
            TextMeasure::Grammar(m) => m.name(),
        }
    }
}

/// The seed of trial `i`: the `i`-th output of a stream keyed by the master
/// seed. Stream 0 is reserved for per-experiment draws.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial as u64 + 1);
    rng.next_u64()
}

fn experiment_rng(master: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(0);
    rng
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Error::Config("jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::Internal(e.to_string()))
}

/// One trial's outcome. Wall time is left out so that tables are
/// reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub graph: String,
    pub n_min: usize,
    pub n_max: usize,
    pub measure: String,
    pub threshold: f64,
    pub pattern: String,
    pub correct: bool,
    pub oracle_calls: usize,
    /// Set when structure search failed (e.g. contradictory orientations);
    /// such trials count as incorrect.
    pub error: Option<String>,
}

pub fn records_to_csv(records: &[TrialRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| Error::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

pub fn write_records_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    std::fs::write(path, records_to_csv(records)?).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub graph: String,
    pub measure: String,
    pub n_min: usize,
    pub n_max: usize,
    pub threshold: f64,
    pub trials: usize,
    pub correct: usize,
    /// `correct / trials`.
    pub fraction: f64,
}

pub fn summarize(records: &[TrialRecord]) -> Option<Summary> {
    let first = records.first()?;
    let correct = records.iter().filter(|r| r.correct).count();
    Some(Summary {
        graph: first.graph.clone(),
        measure: first.measure.clone(),
        n_min: first.n_min,
        n_max: first.n_max,
        threshold: first.threshold,
        trials: records.len(),
        correct,
        fraction: correct as f64 / records.len() as f64,
    })
}

/// Structure search on `strings[..nodes]`, with any further strings joined
/// into every conditioning set.
fn recover(
    kind: TextMeasureKind,
    strings: Vec<Vec<Symbol>>,
    labels: &[String],
    truth: &Dag,
    threshold: f64,
    pc: &PcConfig,
) -> Result<(String, bool, usize, Option<String>)> {
    let n = labels.len();
    let extra = Element::full(strings.len()).minus(Element::full(n));
    let m = Memoized::new(TextMeasure::new(kind, strings)?);
    let oracle = LoggingOracle::new(MeasureOracle::new(m, n, threshold)?.with_background(extra)?);
    let want = cpdag(truth)?;
    let out = match run_pc(&oracle, labels, pc) {
        Ok(p) => (p.to_string(), p == want, None),
        Err(e @ Error::Inconsistent(..)) => (String::new(), false, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok((out.0, out.1, oracle.calls().len(), out.2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp2Config {
    pub graph: GraphId,
    pub measure: TextMeasureKind,
    pub lengths: LengthRange,
    pub threshold: f64,
    pub trials: usize,
    pub background_len: usize,
    pub order: SegmentOrder,
    pub seed: u64,
    pub jobs: usize,
    pub pc: PcConfig,
}

impl Exp2Config {
    pub fn new(graph: GraphId, measure: TextMeasureKind, lengths: LengthRange, threshold: f64) -> Self {
        Exp2Config {
            graph,
            measure,
            lengths,
            threshold,
            trials: DEFAULT_TRIALS,
            background_len: DEFAULT_BACKGROUND_LEN,
            order: SegmentOrder::Sorted,
            seed: 0,
            jobs: 1,
            pc: PcConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        self.lengths.validate()?;
        if !(self.threshold >= 0.0) {
            return Err(Error::Config(format!("threshold must be non-negative, got {}", self.threshold)));
        }
        if self.trials == 0 {
            return Err(Error::Config("at least one trial required".into()));
        }
        Ok(())
    }
}

/// Four-node networks: sample, search, compare with the true pattern.
pub fn run_exp2(corpus: &[Symbol], cfg: &Exp2Config) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let dag = cfg.graph.dag();
    let background = if cfg.background_len > 0 {
        Some(background_element(corpus, cfg.background_len, &mut experiment_rng(cfg.seed))?)
    } else {
        None
    };
    let avoid: Vec<Range<usize>> = background.iter().map(|(r, _)| r.clone()).collect();
    let trial = |i: usize| -> Result<TrialRecord> {
        let seed = trial_seed(cfg.seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = SegmentSpec::for_graph(dag.clone(), cfg.lengths, seed);
        spec.order = cfg.order;
        let net = build_fournode(&spec, corpus, &avoid, &mut rng)?;
        let mut strings = net.nodes;
        strings.extend(background.iter().map(|(_, s)| s.clone()));
        let (pattern, correct, oracle_calls, error) =
            recover(cfg.measure, strings, dag.labels(), &dag, cfg.threshold, &cfg.pc)?;
        Ok(TrialRecord {
            trial: i,
            seed,
            graph: cfg.graph.to_string(),
            n_min: cfg.lengths.min,
            n_max: cfg.lengths.max,
            measure: cfg.measure.to_string(),
            threshold: cfg.threshold,
            pattern,
            correct,
            oracle_calls,
            error,
        })
    };
    pool(cfg.jobs)?.install(|| (0..cfg.trials).into_par_iter().map(trial).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp1Config {
    pub k: usize,
    pub measure: TextMeasureKind,
    pub transformer: Transformer,
    /// Source text length in bytes.
    pub source_len: LengthRange,
    pub threshold: f64,
    pub trials: usize,
    pub seed: u64,
    pub jobs: usize,
    pub pc: PcConfig,
}

impl Exp1Config {
    pub fn new(measure: TextMeasureKind, transformer: Transformer, threshold: f64) -> Self {
        Exp1Config {
            k: 3,
            measure,
            transformer,
            source_len: LengthRange { min: 1000, max: 5000 },
            threshold,
            trials: DEFAULT_TRIALS,
            seed: 0,
            jobs: 1,
            pc: PcConfig::default(),
        }
    }
}

/// Chains `s_0 → … → s_k` from random corpus passages; the expected pattern
/// is the undirected chain.
pub fn run_exp1(corpus: &Corpus, cfg: &Exp1Config) -> Result<Vec<TrialRecord>> {
    cfg.source_len.validate()?;
    cfg.transformer.validate()?;
    if cfg.k == 0 || cfg.trials == 0 {
        return Err(Error::Config("k and trials must be at least 1".into()));
    }
    let dag = chain_graph(cfg.k)?;
    let trial = |i: usize| -> Result<TrialRecord> {
        let seed = trial_seed(cfg.seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = rand::Rng::gen_range(&mut rng, cfg.source_len.min..=cfg.source_len.max);
        let source = corpus.sample_raw(len, &mut rng)?;
        let spec = ChainSpec { source, k: cfg.k, transformer: cfg.transformer.clone(), seed };
        let strings = build_chain(&spec)?;
        let (pattern, correct, oracle_calls, error) =
            recover(cfg.measure, strings, dag.labels(), &dag, cfg.threshold, &cfg.pc)?;
        Ok(TrialRecord {
            trial: i,
            seed,
            graph: format!("chain{}", cfg.k),
            n_min: cfg.source_len.min,
            n_max: cfg.source_len.max,
            measure: cfg.measure.to_string(),
            threshold: cfg.threshold,
            pattern,
            correct,
            oracle_calls,
            error,
        })
    };
    pool(cfg.jobs)?.install(|| (0..cfg.trials).into_par_iter().map(trial).collect())
}

/// Pairs that are independent by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NullModel {
    /// `x`, `y` each concatenate `pieces` disjoint corpus segments; the
    /// statistic is `I(x:y | background)`.
    Segments { pieces: usize },
    /// `x`, `z` are two independent transforms of a corpus passage `y`; the
    /// statistic is `I(x:z | y)`.
    Fork { transformer: Transformer },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub measure: TextMeasureKind,
    /// Segment lengths in symbols, or passage lengths in bytes for
    /// [`NullModel::Fork`].
    pub lengths: LengthRange,
    pub null: NullModel,
    /// Only used by [`NullModel::Segments`].
    pub background_len: usize,
    pub samples: usize,
    pub quantile: f64,
    pub seed: u64,
    pub jobs: usize,
}

impl CalibrationConfig {
    /// Null model matching [`run_exp2`]: five segments per string, with
    /// background.
    pub fn segments(measure: TextMeasureKind, lengths: LengthRange) -> Self {
        CalibrationConfig {
            measure,
            lengths,
            null: NullModel::Segments { pieces: 5 },
            background_len: DEFAULT_BACKGROUND_LEN,
            samples: DEFAULT_CALIBRATION_SAMPLES,
            quantile: DEFAULT_QUANTILE,
            seed: 0,
            jobs: 1,
        }
    }

    /// Null model matching [`run_exp1`].
    pub fn fork(measure: TextMeasureKind, transformer: Transformer, lengths: LengthRange) -> Self {
        CalibrationConfig {
            null: NullModel::Fork { transformer },
            background_len: 0,
            ..Self::segments(measure, lengths)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub measure: String,
    pub n_min: usize,
    pub n_max: usize,
    pub quantile: f64,
    /// The `quantile` of the null sample, floored at 0.
    pub threshold: f64,
    /// Null statistics, sorted.
    pub null: Vec<f64>,
    /// Matching statistics for dependent pairs: one shared segment added to
    /// both strings, or `I(x:y | z)` for the fork.
    pub dependent: Vec<f64>,
    /// Fraction of `dependent` above the threshold.
    pub power: f64,
}

/// Nearest-rank quantile of a sorted sample.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

fn cmi_of(kind: TextMeasureKind, strings: Vec<Vec<Symbol>>, s: usize, t: usize, u: Element) -> Result<f64> {
    let m = TextMeasure::new(kind, strings)?;
    Ok(cond_mutual_info(&m, Element::singleton(s), Element::singleton(t), u)? as f64)
}

/// Estimates the null distribution of the conditional information of
/// independent pairs and returns its upper quantile.
pub fn calibrate(corpus: &Corpus, cfg: &CalibrationConfig) -> Result<Calibration> {
    cfg.lengths.validate()?;
    if cfg.samples == 0 || !(0.0..=1.0).contains(&cfg.quantile) {
        return Err(Error::Config("calibration needs samples ≥ 1 and a quantile in [0, 1]".into()));
    }
    let symbols = corpus.symbols();
    let background = match cfg.null {
        NullModel::Segments { pieces: 0 } => return Err(Error::Config("pieces must be at least 1".into())),
        NullModel::Segments { .. } if cfg.background_len > 0 => {
            Some(background_element(symbols, cfg.background_len, &mut experiment_rng(cfg.seed))?)
        }
        NullModel::Segments { .. } => None,
        NullModel::Fork { ref transformer } => {
            transformer.validate()?;
            None
        }
    };
    let segments = |rng: &mut ChaCha8Rng, pieces: usize| -> Result<(f64, f64)> {
        let mut taken: Vec<Range<usize>> = background.iter().map(|(r, _)| r.clone()).collect();
        let mut draw = |rng: &mut ChaCha8Rng| -> Result<Vec<Symbol>> {
            let len = rand::Rng::gen_range(rng, cfg.lengths.min..=cfg.lengths.max);
            let span = sample_span(symbols.len(), len, &taken, rng)?;
            taken.push(span.clone());
            Ok(symbols[span].to_vec())
        };
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..pieces {
            x.extend(draw(rng)?);
            y.extend(draw(rng)?);
        }
        let shared = draw(rng)?;
        let (xs, ys) = ([x.as_slice(), &shared].concat(), [y.as_slice(), &shared].concat());
        let bg: Vec<Vec<Symbol>> = background.iter().map(|(_, s)| s.clone()).collect();
        let u = Element::full(2 + bg.len()).minus(Element::full(2));
        let null = cmi_of(cfg.measure, [vec![x, y], bg.clone()].concat(), 0, 1, u)?;
        let dep = cmi_of(cfg.measure, [vec![xs, ys], bg].concat(), 0, 1, u)?;
        Ok((null, dep))
    };
    let fork = |rng: &mut ChaCha8Rng, t: &Transformer| -> Result<(f64, f64)> {
        let len = rand::Rng::gen_range(rng, cfg.lengths.min..=cfg.lengths.max);
        let y = corpus.sample_raw(len, rng)?;
        let x = t.apply(&y, rng)?;
        let z = t.apply(&y, rng)?;
        let strings: Vec<Vec<Symbol>> =
            [&x, &y, &z].iter().map(|s| crate::textpipe::encode_text(s.as_bytes())).collect();
        let null = cmi_of(cfg.measure, strings.clone(), 0, 2, Element::singleton(1))?;
        let dep = cmi_of(cfg.measure, strings, 0, 1, Element::singleton(2))?;
        Ok((null, dep))
    };
    let sample = |i: usize| -> Result<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, i));
        match &cfg.null {
            NullModel::Segments { pieces } => segments(&mut rng, *pieces),
            NullModel::Fork { transformer } => fork(&mut rng, transformer),
        }
    };
    let pairs: Vec<(f64, f64)> =
        pool(cfg.jobs)?.install(|| (0..cfg.samples).into_par_iter().map(sample).collect::<Result<_>>())?;
    let (mut null, mut dependent): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    null.sort_by(f64::total_cmp);
    dependent.sort_by(f64::total_cmp);
    let threshold = quantile(&null, cfg.quantile).max(0.0);
    let power = dependent.iter().filter(|&&v| v > threshold).count() as f64 / dependent.len() as f64;
    Ok(Calibration {
        measure: cfg.measure.to_string(),
        n_min: cfg.lengths.min,
        n_max: cfg.lengths.max,
        quantile: cfg.quantile,
        threshold,
        null,
        dependent,
        power,
    })
}
