//! Turning input files into observations and a measure over them.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use infocausal::grammar::GrammarMeasure;
use infocausal::lz::{LzConfig, LzMeasure, Symbol};
use infocausal::measures::{JointTable, PeriodObservations, Stopwords, VocabMeasure, WordSetObservations};
use infocausal::textpipe::{encode_text, parse_digits};
use infocausal::{
    Element, Error, ExactLcmMeasure, Exactness, GroundSet, InfoValue, InformationMeasure, Result, Shannon,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    /// Entropy of a joint probability table (one table file).
    Shannon,
    /// Log of the lcm of period lengths (one file of integers).
    Lcm,
    /// Number of distinct meaningful words (one text per file).
    Vocab,
    /// Lempel-Ziv complexity (one string per file).
    Lz,
    /// Greedy grammar length (one string per file).
    Grammar,
}

impl MeasureKind {
    pub fn is_exact(self) -> bool {
        matches!(self, MeasureKind::Shannon | MeasureKind::Lcm | MeasureKind::Vocab)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Encoding {
    /// Raw text: whitespace runs become 9, other bytes their value mod 9.
    #[default]
    Text,
    /// Files already hold digits 0–9; whitespace is ignored.
    Digits,
}

/// Options shared by every command that reads observations.
#[derive(Debug, Clone, clap::Args)]
pub struct InputArgs {
    #[arg(long, value_enum, default_value_t = MeasureKind::Lz)]
    pub measure: MeasureKind,
    /// How string files are turned into symbols (lz, grammar).
    #[arg(long, value_enum, default_value_t = Encoding::Text)]
    pub encoding: Encoding,
    /// Longest copied part of an LZ component; 0 for unbounded (lz, grammar).
    #[arg(long, default_value_t = infocausal::lz::DEFAULT_MAX_MATCH)]
    pub max_match: usize,
    /// Stop-word list, one word per line (vocab; default: built-in English).
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Keep every word (vocab).
    #[arg(long, conflicts_with = "stopwords")]
    pub no_stopwords: bool,
}

impl InputArgs {
    pub fn lz_config(&self) -> LzConfig {
        match self.max_match {
            0 => LzConfig::unbounded(),
            n => LzConfig::default().with_max_match(n),
        }
    }
}

/// One of the built-in measures, evaluated in floating point.
pub enum AnyMeasure {
    Shannon(Shannon),
    Lcm(ExactLcmMeasure),
    Vocab(VocabMeasure),
    Lz(LzMeasure),
    Grammar(GrammarMeasure),
}

macro_rules! each {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            $crate::load::AnyMeasure::Shannon($m) => $body,
            $crate::load::AnyMeasure::Lcm($m) => $body,
            $crate::load::AnyMeasure::Vocab($m) => $body,
            $crate::load::AnyMeasure::Lz($m) => $body,
            $crate::load::AnyMeasure::Grammar($m) => $body,
        }
    };
}
pub(crate) use each;

impl InformationMeasure for AnyMeasure {
    type Value = f64;

    fn ground(&self) -> &GroundSet {
        each!(self, m => m.ground())
    }

    fn evaluate(&self, e: Element) -> Result<f64> {
        each!(self, m => m.evaluate(e).map(|v| v.to_f64()))
    }

    fn exactness(&self) -> Exactness {
        each!(self, m => m.exactness())
    }

    fn meet_value(&self, s: Element, t: Element) -> Result<f64> {
        each!(self, m => m.meet_value(s, t).map(|v| v.to_f64()))
    }

    fn name(&self) -> &str {
        each!(self, m => m.name())
    }
}

/// Observations loaded for a command.
pub struct Loaded {
    pub measure: AnyMeasure,
    /// Labels of `nodes`.
    pub labels: Vec<String>,
    /// The observations under study, in input order.
    pub nodes: Vec<Element>,
    /// Joined into every conditioning set.
    pub background: Element,
    pub given_labels: Vec<String>,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn file_labels(paths: &[PathBuf]) -> Vec<String> {
    let stems: Vec<String> = paths
        .iter()
        .map(|p| p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()))
        .collect();
    let unique: HashSet<&String> = stems.iter().collect();
    if unique.len() == stems.len() {
        stems
    } else {
        paths.iter().map(|p| p.display().to_string()).collect()
    }
}

fn read_symbols(path: &Path, encoding: Encoding) -> Result<Vec<Symbol>> {
    match encoding {
        Encoding::Text => Ok(encode_text(&std::fs::read(path).map_err(|e| Error::io(path, e))?)),
        Encoding::Digits => {
            let text = read_text(path)?;
            let digits: String = text.split_whitespace().collect();
            parse_digits(&digits).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
        }
    }
}

/// `NAME VALUE` or bare `VALUE` per line; `#` starts a comment.
fn parse_periods(text: &str) -> Result<(Vec<String>, Vec<u64>)> {
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let (label, value) = match parts.as_slice() {
            [v] => (format!("x{}", values.len()), *v),
            [l, v] => (l.to_string(), *v),
            _ => return Err(Error::Input(format!("line {}: expected `[name] value`, got {raw:?}", i + 1))),
        };
        let value =
            value.parse().map_err(|_| Error::Input(format!("line {}: {value:?} is not a positive integer", i + 1)))?;
        labels.push(label);
        values.push(value);
    }
    Ok((labels, values))
}

/// Resolves `given` against `labels` for measures whose observations live in
/// a single file.
fn split_by_label(labels: Vec<String>, given: &[String]) -> Result<(Vec<String>, Vec<Element>, Element)> {
    let mut background = Element::EMPTY;
    for g in given {
        let i = labels.iter().position(|l| l == g).ok_or_else(|| Error::Input(format!("unknown observation {g:?}")))?;
        background = background.join(Element::singleton(i));
    }
    let (keep, nodes) = labels
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| !background.contains(i))
        .map(|(i, l)| (l, Element::singleton(i)))
        .unzip();
    Ok((keep, nodes, background))
}

/// Loads `files` (plus conditioning observations) for `args.measure`.
///
/// For lz, grammar and vocab every file is one observation and `given`
/// names further files. For shannon and lcm a single file holds all
/// observations and `given` names some of them.
pub fn load(args: &InputArgs, files: &[PathBuf], given: &[String]) -> Result<Loaded> {
    if files.is_empty() {
        return Err(Error::Config("no input files".into()));
    }
    let single = |what: &str| -> Result<&PathBuf> {
        match files {
            [f] => Ok(f),
            _ => Err(Error::Config(format!("the {what} measure reads exactly one file"))),
        }
    };
    match args.measure {
        MeasureKind::Shannon => {
            let table = JointTable::read(single("shannon")?)?;
            let (labels, nodes, background) = split_by_label(table.names().to_vec(), given)?;
            let measure = AnyMeasure::Shannon(Shannon::new(table));
            Ok(Loaded { measure, labels, nodes, background, given_labels: given.to_vec() })
        }
        MeasureKind::Lcm => {
            let path = single("lcm")?;
            let (labels, values) = parse_periods(&read_text(path)?)?;
            let obs = PeriodObservations::new(values)?;
            let (labels, nodes, background) = split_by_label(labels, given)?;
            let measure = AnyMeasure::Lcm(ExactLcmMeasure::new(obs));
            Ok(Loaded { measure, labels, nodes, background, given_labels: given.to_vec() })
        }
        MeasureKind::Vocab | MeasureKind::Lz | MeasureKind::Grammar => {
            let all: Vec<PathBuf> = files.iter().cloned().chain(given.iter().map(PathBuf::from)).collect();
            let mut labels = file_labels(&all);
            let given_labels = labels.split_off(files.len());
            let nodes = (0..files.len()).map(Element::singleton).collect();
            let background = Element::full(all.len()).minus(Element::full(files.len()));
            let measure = match args.measure {
                MeasureKind::Vocab => {
                    let stop = match (&args.stopwords, args.no_stopwords) {
                        (Some(p), _) => Stopwords::read(p)?,
                        (None, true) => Stopwords::none(),
                        (None, false) => Stopwords::english(),
                    };
                    let texts = all.iter().map(|p| read_text(p)).collect::<Result<Vec<_>>>()?;
                    AnyMeasure::Vocab(VocabMeasure::new(WordSetObservations::from_texts(texts, &stop))?)
                }
                kind => {
                    let strings = all.iter().map(|p| read_symbols(p, args.encoding)).collect::<Result<Vec<_>>>()?;
                    if kind == MeasureKind::Lz {
                        AnyMeasure::Lz(LzMeasure::new(strings, args.lz_config())?)
                    } else {
                        AnyMeasure::Grammar(GrammarMeasure::new(strings, args.lz_config())?)
                    }
                }
            };
            Ok(Loaded { measure, labels, nodes, background, given_labels })
        }
    }
}
