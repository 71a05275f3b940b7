use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use infocausal::experiment::{
    calibrate as run_calibration, run_exp1, run_exp2, summarize, write_records_csv, Calibration, CalibrationConfig,
    Exp1Config, Exp2Config, NullModel, Summary, TextMeasureKind, TrialRecord, DEFAULT_CALIBRATION_SAMPLES,
    DEFAULT_QUANTILE, DEFAULT_TRIALS,
};
use infocausal::grammar::{grammar_length, greedy_grammar_transform};
use infocausal::graph::{markov_report, Dag, EnumerationGuard};
use infocausal::lz::exhaustive_history;
use infocausal::pc::{run_pc, LoggingOracle, MeasureOracle, PcConfig, SearchScope};
use infocausal::textpipe::{
    build_chain_texts, format_digits, ChainSpec, Corpus, GraphId, LengthRange, SegmentOrder, Transformer,
    DEFAULT_BACKGROUND_LEN,
};
use infocausal::verify::{verify_axioms, verify_semigraphoid};
use infocausal::{cond_mutual_info, joint_info, Error, InformationMeasure, Memoized, Result};
use serde::Serialize;

use crate::default_jobs;
use crate::load::{each, load, Encoding, InputArgs, Loaded};

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

/// Prints `json` to stdout, or writes it to `out` when given.
fn emit(json: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_file(p, json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// info

#[derive(Debug, Args)]
pub struct InfoArgs {
    /// Observation files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    /// Condition on these files (lz, grammar, vocab) or observation names
    /// (shannon, lcm).
    #[arg(long, num_args = 1..)]
    given: Vec<String>,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct InfoReport {
    measure: String,
    given: Vec<String>,
    observations: Vec<ObservationInfo>,
    pairs: Vec<PairInfo>,
}

#[derive(Serialize)]
struct ObservationInfo {
    label: String,
    /// `R(x)`.
    information: f64,
}

#[derive(Serialize)]
struct PairInfo {
    a: String,
    b: String,
    /// `I(a : b | given)`.
    dependence: f64,
}

pub fn info(args: InfoArgs) -> Result<()> {
    let Loaded { measure, labels, nodes, background, given_labels } = load(&args.input, &args.files, &args.given)?;
    let observations = labels
        .iter()
        .zip(&nodes)
        .map(|(l, &e)| Ok(ObservationInfo { label: l.clone(), information: joint_info(&measure, e)? }))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let dependence = cond_mutual_info(&measure, nodes[i], nodes[j], background)?;
            pairs.push(PairInfo { a: labels[i].clone(), b: labels[j].clone(), dependence });
        }
    }
    let report = InfoReport { measure: measure.name().to_string(), given: given_labels, observations, pairs };
    let json = to_json(&report);
    if let Some(p) = &args.out {
        write_file(p, &json)?;
    }
    if args.json {
        print!("{json}");
        return Ok(());
    }
    let width = labels.iter().map(String::len).max().unwrap_or(0).max(5);
    println!("{:<width$}  R", "label");
    for o in &report.observations {
        println!("{:<width$}  {}", o.label, o.information);
    }
    if !report.pairs.is_empty() {
        let cond = if report.given.is_empty() { String::new() } else { format!(" | {}", report.given.join(", ")) };
        println!();
        for p in &report.pairs {
            println!("I({} : {}{cond}) = {}", p.a, p.b, p.dependence);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// pc

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Scope {
    /// Condition only on current neighbours (standard PC).
    #[default]
    Adjacent,
    /// Condition on any other nodes; sepsets are cardinality-minimal.
    Full,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = Scope::Adjacent)]
    scope: Scope,
    /// Largest conditioning set.
    #[arg(long)]
    max_conditioning: Option<usize>,
}

impl SearchArgs {
    fn config(&self) -> PcConfig {
        let scope = match self.scope {
            Scope::Adjacent => SearchScope::Adjacent,
            Scope::Full => SearchScope::Full,
        };
        PcConfig { max_conditioning: self.max_conditioning, scope }
    }
}

#[derive(Debug, Args)]
pub struct PcArgs {
    /// Observation files (at least three).
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    /// Background observations joined into every conditioning set.
    #[arg(long, num_args = 1..)]
    given: Vec<String>,
    /// Independence threshold; defaults to 1e-9 for exact measures.
    #[arg(long)]
    threshold: Option<f64>,
    /// Take the threshold from a `calibrate` report.
    #[arg(long, conflicts_with = "threshold")]
    calibration: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the oracle log (CSV) here.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Write the pattern (JSON) here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_calibration(path: &Path) -> Result<Calibration> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn pc(args: PcArgs) -> Result<()> {
    if args.files.len() < 3 {
        // single-file measures hold every observation in one file
        if !matches!(args.input.measure, crate::load::MeasureKind::Shannon | crate::load::MeasureKind::Lcm) {
            return Err(Error::Config("structure search needs at least three observation files".into()));
        }
    }
    let threshold = match (args.threshold, &args.calibration) {
        (Some(t), _) => t,
        (None, Some(p)) => read_calibration(p)?.threshold,
        (None, None) if args.input.measure.is_exact() => 1e-9,
        (None, None) => {
            return Err(Error::Config("--threshold or --calibration is required for compression measures".into()))
        }
    };
    let Loaded { measure, labels, nodes, background, .. } = load(&args.input, &args.files, &args.given)?;
    let oracle = LoggingOracle::new(
        MeasureOracle::with_nodes(Memoized::new(measure), nodes, threshold)?.with_background(background)?,
    );
    let pattern = run_pc(&oracle, &labels, &args.search.config())?;
    if let Some(p) = &args.log {
        write_file(p, &oracle.to_csv(&labels)?)?;
    }
    eprintln!("{} independence tests at threshold {threshold}", oracle.calls().len());
    emit(&(pattern.to_json() + "\n"), args.out.as_deref())
}

// ---------------------------------------------------------------------------
// experiments

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Plain-text corpus.
    #[arg(long, env = "INFOCAUSAL_CORPUS")]
    corpus: PathBuf,
    /// lz or grammar.
    #[arg(long, default_value = "lz")]
    measure: TextMeasureKind,
    /// Independence threshold; calibrated on the corpus when absent.
    #[arg(long)]
    threshold: Option<f64>,
    /// Take the threshold from a `calibrate` report.
    #[arg(long, conflicts_with = "threshold")]
    calibration: Option<PathBuf>,
    /// Null samples for automatic calibration.
    #[arg(long, default_value_t = DEFAULT_CALIBRATION_SAMPLES)]
    calibration_samples: usize,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "INFOCAUSAL_JOBS")]
    jobs: Option<usize>,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the per-trial table (CSV) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(default_jobs)
    }

    /// The fixed threshold, or `None` when it has to be calibrated.
    fn fixed_threshold(&self) -> Result<Option<f64>> {
        match (self.threshold, &self.calibration) {
            (Some(t), _) => Ok(Some(t)),
            (None, Some(p)) => Ok(Some(read_calibration(p)?.threshold)),
            (None, None) => Ok(None),
        }
    }

    fn calibrated(&self, corpus: &Corpus, mut cfg: CalibrationConfig) -> Result<f64> {
        cfg.samples = self.calibration_samples;
        cfg.seed = self.seed;
        cfg.jobs = self.jobs();
        let c = run_calibration(corpus, &cfg)?;
        eprintln!(
            "calibrated {} threshold for lengths {}: {} ({} null samples, power {:.2})",
            c.measure,
            cfg.lengths,
            c.threshold,
            c.null.len(),
            c.power
        );
        Ok(c.threshold)
    }

    fn finish(&self, records: &[TrialRecord], summaries: Vec<Summary>) -> Result<()> {
        if let Some(p) = &self.out {
            write_records_csv(records, p)?;
        }
        print!("{}", to_json(&summaries));
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct Exp1Args {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Number of transformation steps; the chain has k+1 nodes.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// `perturb[:rate]`, `identity` or `cmd:<program> [args]`.
    #[arg(long, default_value = "perturb")]
    transformer: String,
    /// Source passage length in bytes.
    #[arg(long, default_value = "1000-5000")]
    source_len: LengthRange,
}

pub fn exp1(args: Exp1Args) -> Result<()> {
    let c = &args.common;
    let transformer = Transformer::from_name(&args.transformer)?;
    let mut cfg = Exp1Config::new(c.measure, transformer.clone(), 0.0);
    cfg.k = args.k;
    cfg.source_len = args.source_len;
    cfg.trials = c.trials;
    cfg.seed = c.seed;
    cfg.jobs = c.jobs();
    cfg.pc = c.search.config();
    let fixed = c.fixed_threshold()?;
    let corpus = Corpus::read(&c.corpus)?;
    cfg.threshold = match fixed {
        Some(t) => t,
        None => c.calibrated(&corpus, CalibrationConfig::fork(c.measure, transformer, args.source_len))?,
    };
    let records = run_exp1(&corpus, &cfg)?;
    let summaries = summarize(&records).into_iter().collect();
    c.finish(&records, summaries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Order {
    #[default]
    Sorted,
    Shuffled,
}

#[derive(Debug, Args)]
pub struct Exp2Args {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Generating graph, `a` or `b`; repeat for both.
    #[arg(long, default_values = ["a", "b"])]
    graph: Vec<GraphId>,
    /// Segment length range, e.g. `300-500`; repeat for several.
    #[arg(long, default_values = ["300-500"])]
    nrange: Vec<LengthRange>,
    /// Length of the background segment conditioned on; 0 disables it.
    #[arg(long, default_value_t = DEFAULT_BACKGROUND_LEN)]
    background_len: usize,
    /// Order of the segments within each node string.
    #[arg(long, value_enum, default_value_t = Order::Sorted)]
    order: Order,
}

pub fn exp2(args: Exp2Args) -> Result<()> {
    let c = &args.common;
    let fixed = c.fixed_threshold()?;
    let corpus = Corpus::read(&c.corpus)?;
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &lengths in &args.nrange {
        lengths.validate()?;
        // one threshold per measure and length range, shared by both graphs
        let threshold = match fixed {
            Some(t) => t,
            None => {
                let mut cal = CalibrationConfig::segments(c.measure, lengths);
                cal.background_len = args.background_len;
                c.calibrated(&corpus, cal)?
            }
        };
        for &graph in &args.graph {
            let mut cfg = Exp2Config::new(graph, c.measure, lengths, threshold);
            cfg.trials = c.trials;
            cfg.background_len = args.background_len;
            cfg.order = match args.order {
                Order::Sorted => SegmentOrder::Sorted,
                Order::Shuffled => SegmentOrder::Shuffled,
            };
            cfg.seed = c.seed;
            cfg.jobs = c.jobs();
            cfg.pc = c.search.config();
            let r = run_exp2(corpus.symbols(), &cfg)?;
            summaries.extend(summarize(&r));
            records.extend(r);
        }
    }
    c.finish(&records, summaries)
}

// ---------------------------------------------------------------------------
// calibrate

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Null {
    /// Strings of disjoint corpus segments, conditioned on a background
    /// (matches exp2).
    #[default]
    Segments,
    /// Two independent transforms of one passage, conditioned on it
    /// (matches exp1).
    Fork,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long, env = "INFOCAUSAL_CORPUS")]
    corpus: PathBuf,
    #[arg(long, default_value = "lz")]
    measure: TextMeasureKind,
    /// Segment lengths (segments) or passage lengths in bytes (fork).
    #[arg(long, default_value = "300-500")]
    nrange: LengthRange,
    #[arg(long, value_enum, default_value_t = Null::Segments)]
    null: Null,
    /// Segments per string (segments).
    #[arg(long, default_value_t = 5)]
    pieces: usize,
    /// Transformer of the fork null.
    #[arg(long, default_value = "perturb")]
    transformer: String,
    #[arg(long, default_value_t = DEFAULT_BACKGROUND_LEN)]
    background_len: usize,
    #[arg(long, default_value_t = DEFAULT_CALIBRATION_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_QUANTILE)]
    quantile: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "INFOCAUSAL_JOBS")]
    jobs: Option<usize>,
    /// Write the full report, including the null sample, here; it can be
    /// passed back with `--calibration`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CalibrationSummary<'a> {
    measure: &'a str,
    n_min: usize,
    n_max: usize,
    quantile: f64,
    threshold: f64,
    samples: usize,
    power: f64,
    corpus_sha256: String,
}

pub fn calibrate(args: CalibrateArgs) -> Result<()> {
    let mut cfg = match args.null {
        Null::Segments => {
            let mut c = CalibrationConfig::segments(args.measure, args.nrange);
            c.null = NullModel::Segments { pieces: args.pieces };
            c.background_len = args.background_len;
            c
        }
        Null::Fork => CalibrationConfig::fork(args.measure, Transformer::from_name(&args.transformer)?, args.nrange),
    };
    cfg.samples = args.samples;
    cfg.quantile = args.quantile;
    cfg.seed = args.seed;
    cfg.jobs = args.jobs.unwrap_or_else(default_jobs);
    let corpus = Corpus::read(&args.corpus)?;
    let c = run_calibration(&corpus, &cfg)?;
    if let Some(p) = &args.out {
        write_file(p, &to_json(&c))?;
    }
    let summary = CalibrationSummary {
        measure: &c.measure,
        n_min: c.n_min,
        n_max: c.n_max,
        quantile: c.quantile,
        threshold: c.threshold,
        samples: c.null.len(),
        power: c.power,
        corpus_sha256: corpus.fingerprint(),
    };
    print!("{}", to_json(&summary));
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Observation files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    /// Also check the Markov conditions for this DAG; its node names must
    /// match the observation labels.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Defaults to 1e-9 for exact measures and the declared slack otherwise.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyReport {
    measure: String,
    tolerance: f64,
    axioms: infocausal::verify::AxiomReport,
    semigraphoid: infocausal::verify::SemigraphoidReport,
    markov: Option<infocausal::graph::MarkovReport>,
}

/// `g` with its nodes renumbered to follow `labels`.
fn align_graph(g: &Dag, labels: &[String]) -> Result<Dag> {
    let mut names: Vec<&String> = g.labels().iter().collect();
    let mut want: Vec<&String> = labels.iter().collect();
    names.sort();
    want.sort();
    if names != want {
        return Err(Error::Input(format!("graph nodes {:?} do not match the observations {:?}", g.labels(), labels)));
    }
    let pos = |i: usize| labels.iter().position(|l| *l == g.labels()[i]).expect("same label set");
    let edges: Vec<(usize, usize)> = g.edges().into_iter().map(|(a, b)| (pos(a), pos(b))).collect();
    Dag::from_edges(labels.to_vec(), &edges)
}

pub fn verify(args: VerifyArgs) -> Result<()> {
    let Loaded { measure, labels, .. } = load(&args.input, &args.files, &[])?;
    let tolerance = args.tolerance.unwrap_or(match measure.exactness().slack() {
        s if s > 0.0 => s,
        _ => 1e-9,
    });
    let axioms = each!(&measure, m => verify_axioms(m, tolerance))?;
    let semigraphoid = each!(&measure, m => verify_semigraphoid(m, tolerance))?;
    let markov = match &args.graph {
        Some(p) => {
            let g = align_graph(&Dag::read(p)?, &labels)?;
            Some(markov_report(&g, &measure, tolerance, EnumerationGuard::default())?)
        }
        None => None,
    };
    eprintln!(
        "{} axiom violations (largest {}), {} semi-graphoid violations",
        axioms.violations.len(),
        axioms.max_violation,
        semigraphoid.violations.len()
    );
    if let Some(m) = &markov {
        eprintln!(
            "Markov conditions: local {}, decomposition {}, global {}",
            pass(m.local_pass()),
            pass(m.decomposition_pass()),
            pass(m.global_pass())
        );
    }
    let report = VerifyReport { measure: measure.name().to_string(), tolerance, axioms, semigraphoid, markov };
    emit(&to_json(&report), args.out.as_deref())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

// ---------------------------------------------------------------------------
// inspect, chain

#[derive(Debug, Args)]
pub struct InspectArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Encoding::Text)]
    encoding: Encoding,
    #[arg(long, default_value_t = infocausal::lz::DEFAULT_MAX_MATCH)]
    max_match: usize,
    /// Print JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct Inspection {
    symbols: String,
    lz_complexity: usize,
    lz_components: Vec<String>,
    grammar_length: usize,
    grammar: Vec<String>,
}

pub fn inspect(args: InspectArgs) -> Result<()> {
    let input = InputArgs {
        measure: crate::load::MeasureKind::Lz,
        encoding: args.encoding,
        max_match: args.max_match,
        stopwords: None,
        no_stopwords: false,
    };
    let Loaded { measure, .. } = load(&input, std::slice::from_ref(&args.file), &[])?;
    let crate::load::AnyMeasure::Lz(m) = measure else { unreachable!("loaded as lz") };
    let s = &m.strings()[0];
    let history = exhaustive_history(s, &input.lz_config())?;
    let grammar = greedy_grammar_transform(s);
    let report = Inspection {
        symbols: format_digits(s),
        lz_complexity: history.len(),
        lz_components: history.components(s).map(format_digits).collect(),
        grammar_length: grammar_length(&grammar),
        grammar: grammar.to_string().lines().map(str::to_string).collect(),
    };
    if args.json {
        print!("{}", to_json(&report));
    } else {
        println!("LZ complexity {}: ({})", report.lz_complexity, report.lz_components.join(")("));
        println!("grammar length {}:", report.grammar_length);
        for rule in &report.grammar {
            println!("  {rule}");
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// TOML with `k`, `seed`, a `[transformer]` table and `source` or
    /// `source_file`.
    spec: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

pub fn chain(args: ChainArgs) -> Result<()> {
    let spec = ChainSpec::read(&args.spec)?;
    let texts = build_chain_texts(&spec)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    for (i, t) in texts.iter().enumerate() {
        let p = args.out_dir.join(format!("s{i}.txt"));
        write_file(&p, t)?;
        println!("{}", p.display());
    }
    Ok(())
}
