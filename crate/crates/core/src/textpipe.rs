//! Text encoding and synthetic observations built from a text corpus.
//!
//! Text becomes a string over `0..=9`: whitespace runs turn into a single
//! `9`, every other byte into `byte % 9`. Chains of strings come from
//! repeatedly applying a transformer to a source text; networks of strings
//! are concatenations of corpus segments shared along the edges and
//! non-collider paths of a DAG.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::lz::Symbol;

/// The symbol standing for a run of whitespace.
pub const SPACE: Symbol = 9;
/// Length of the background segment joined into every conditioning set.
pub const DEFAULT_BACKGROUND_LEN: usize = 5000;
/// Word perturbation rate of the built-in chain transformer.
pub const DEFAULT_PERTURB_RATE: f64 = 0.3;
const PLACEMENT_ATTEMPTS: usize = 10_000;

pub fn encode_text(raw: &[u8]) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(raw.len());
    for &b in raw {
        if b.is_ascii_whitespace() {
            if out.last() != Some(&SPACE) {
                out.push(SPACE);
            }
        } else {
            out.push(b % 9);
        }
    }
    out
}

/// `[1, 0, 9]` → `"109"`.
pub fn format_digits(s: &[Symbol]) -> String {
    s.iter().map(|&d| char::from(b'0' + d)).collect()
}

/// Inverse of [`format_digits`]; whitespace is ignored.
pub fn parse_digits(text: &str) -> Result<Vec<Symbol>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as Symbol)
                .ok_or_else(|| Error::Input(format!("expected a decimal digit, found {c:?}")))
        })
        .collect()
}

/// An inclusive range of segment lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthRange {
    pub min: usize,
    pub max: usize,
}

impl LengthRange {
    pub fn new(min: usize, max: usize) -> Result<Self> {
        let r = LengthRange { min, max };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min == 0 || self.min > self.max {
            return Err(Error::Config(format!("invalid length range {self}")));
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.gen_range(self.min..=self.max)
    }
}

impl fmt::Display for LengthRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.min, self.max)
    }
}

impl std::str::FromStr for LengthRange {
    type Err = Error;

    /// `"300-500"`, `"300..500"` or a single length.
    fn from_str(s: &str) -> Result<Self> {
        let parse =
            |t: &str| t.trim().parse::<usize>().map_err(|_| Error::Config(format!("invalid length range {s:?}")));
        match s.split_once('-').or_else(|| s.split_once("..")) {
            Some((a, b)) => LengthRange::new(parse(a)?, parse(b)?),
            None => {
                let n = parse(s)?;
                LengthRange::new(n, n)
            }
        }
    }
}

/// A loaded text: raw bytes and their encoding.
#[derive(Debug, Clone)]
pub struct Corpus {
    raw: Vec<u8>,
    symbols: Vec<Symbol>,
}

impl Corpus {
    pub fn from_text(raw: impl Into<Vec<u8>>) -> Self {
        let raw = raw.into();
        let symbols = encode_text(&raw);
        Corpus { raw, symbols }
    }

    pub fn read(path: &Path) -> Result<Self> {
        std::fs::read(path).map(Corpus::from_text).map_err(|e| Error::io(path, e))
    }

    pub fn raw(&self) -> &[u8] {
        &self.raw
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Hex SHA-256 of the raw text.
    pub fn fingerprint(&self) -> String {
        Sha256::digest(&self.raw).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// A source text of `len` bytes starting at a word boundary.
    pub fn sample_raw<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Result<String> {
        if self.raw.len() < len {
            return Err(Error::Input(format!("corpus has {} bytes, {len} requested", self.raw.len())));
        }
        let mut start = rng.gen_range(0..=self.raw.len() - len);
        while start > 0 && !self.raw[start - 1].is_ascii_whitespace() {
            start -= 1;
        }
        Ok(String::from_utf8_lossy(&self.raw[start..start + len]).into_owned())
    }
}

fn overlaps(a: &Range<usize>, b: &Range<usize>) -> bool {
    a.start < b.end && b.start < a.end
}

/// Position of a segment of the given length, uniform over the corpus and
/// disjoint from every range in `avoid` (resampled on overlap).
pub fn sample_span<R: Rng + ?Sized>(
    corpus_len: usize,
    len: usize,
    avoid: &[Range<usize>],
    rng: &mut R,
) -> Result<Range<usize>> {
    if corpus_len < len {
        return Err(Error::Input(format!("corpus has {corpus_len} symbols, a segment of {len} requested")));
    }
    for _ in 0..PLACEMENT_ATTEMPTS {
        let start = rng.gen_range(0..=corpus_len - len);
        let span = start..start + len;
        if !avoid.iter().any(|a| overlaps(a, &span)) {
            return Ok(span);
        }
    }
    Err(Error::Input(format!("corpus of {corpus_len} symbols too short to place disjoint segments")))
}

/// A contiguous slice at a uniform offset, with length uniform in `range`.
pub fn sample_segment<R: Rng + ?Sized>(corpus: &[Symbol], range: LengthRange, rng: &mut R) -> Result<Vec<Symbol>> {
    range.validate()?;
    if corpus.len() < range.max {
        return Err(Error::Input(format!("corpus has {} symbols, segments need up to {}", corpus.len(), range.max)));
    }
    let len = range.sample(rng);
    Ok(corpus[sample_span(corpus.len(), len, &[], rng)?].to_vec())
}

/// The fixed background segment of an experiment.
pub fn background_element<R: Rng + ?Sized>(
    corpus: &[Symbol],
    length: usize,
    rng: &mut R,
) -> Result<(Range<usize>, Vec<Symbol>)> {
    let span = sample_span(corpus.len(), length, &[], rng)?;
    Ok((span.clone(), corpus[span].to_vec()))
}

// ---------------------------------------------------------------------------
// chains

/// How `s_{i+1}` is produced from `s_i` (on raw text).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transformer {
    Identity,
    /// Each word is, with probability `rate`, swapped with its successor,
    /// replaced by a random pseudo-word of the same length, or dropped.
    Perturb {
        rate: f64,
    },
    /// Pipes the text through an external program (stdin → stdout).
    Command {
        program: String,
        #[serde(default)]
        args: Vec<String>,
    },
}

impl Transformer {
    pub fn validate(&self) -> Result<()> {
        match self {
            Transformer::Perturb { rate } if !(0.0..=1.0).contains(rate) => {
                Err(Error::Config(format!("perturbation rate must lie in [0, 1], got {rate}")))
            }
            Transformer::Command { program, .. } if program.is_empty() => {
                Err(Error::Config("transformer command is empty".into()))
            }
            _ => Ok(()),
        }
    }

    /// Looks up a transformer by name: `identity`, `perturb[:rate]` or
    /// `cmd:<program> [args…]`.
    pub fn from_name(name: &str) -> Result<Self> {
        let t = if name == "identity" {
            Transformer::Identity
        } else if name == "perturb" {
            Transformer::Perturb { rate: DEFAULT_PERTURB_RATE }
        } else if let Some(rate) = name.strip_prefix("perturb:") {
            let rate = rate.parse().map_err(|_| Error::Config(format!("invalid perturbation rate {rate:?}")))?;
            Transformer::Perturb { rate }
        } else if let Some(cmd) = name.strip_prefix("cmd:") {
            let mut words = cmd.split_whitespace().map(str::to_string);
            let program = words.next().unwrap_or_default();
            Transformer::Command { program, args: words.collect() }
        } else {
            return Err(Error::Config(format!("unknown transformer {name:?}")));
        };
        t.validate()?;
        Ok(t)
    }

    pub fn apply<R: Rng + ?Sized>(&self, text: &str, rng: &mut R) -> Result<String> {
        match self {
            Transformer::Identity => Ok(text.to_string()),
            Transformer::Perturb { rate } => Ok(perturb(text, *rate, rng)),
            Transformer::Command { program, args } => run_command(program, args, text),
        }
    }
}

fn perturb<R: Rng + ?Sized>(text: &str, rate: f64, rng: &mut R) -> String {
    let words: Vec<&str> = text.split_whitespace().collect();
    let mut out: Vec<String> = Vec::with_capacity(words.len());
    let mut i = 0;
    while i < words.len() {
        if !rng.gen_bool(rate) {
            out.push(words[i].to_string());
            i += 1;
            continue;
        }
        match rng.gen_range(0..3) {
            0 if i + 1 < words.len() => {
                out.push(words[i + 1].to_string());
                out.push(words[i].to_string());
                i += 2;
            }
            1 => {
                // a fresh pseudo-word of the same length
                let n = words[i].chars().count();
                out.push((0..n).map(|_| char::from(rng.gen_range(b'a'..=b'z'))).collect());
                i += 1;
            }
            _ => i += 1,
        }
    }
    out.join(" ")
}

fn run_command(program: &str, args: &[String], text: &str) -> Result<String> {
    let fail = |e: std::io::Error| Error::io(PathBuf::from(program), e);
    let mut child =
        Command::new(program).args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().map_err(fail)?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let input = text.to_string();
    let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
    let out = child.wait_with_output().map_err(fail)?;
    writer.join().map_err(|_| Error::Internal("transformer writer panicked".into()))?.map_err(fail)?;
    if !out.status.success() {
        return Err(Error::Config(format!("transformer {program} exited with {}", out.status)));
    }
    String::from_utf8(out.stdout).map_err(|_| Error::Input(format!("transformer {program} produced non-UTF-8 output")))
}

/// A chain `s_0 → … → s_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub source: String,
    pub k: usize,
    pub transformer: Transformer,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    source: Option<String>,
    source_file: Option<PathBuf>,
    k: usize,
    transformer: Transformer,
    #[serde(default)]
    seed: u64,
}

impl ChainSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("chain length k must be at least 1".into()));
        }
        self.transformer.validate()
    }

    /// TOML with `k`, `seed`, a `[transformer]` table and either `source`
    /// or `source_file` (relative to `base`).
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let f: ChainFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let source = match (f.source, f.source_file) {
            (Some(s), None) => s,
            (None, Some(p)) => {
                let p = base.join(p);
                std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?
            }
            _ => return Err(Error::Config("exactly one of source and source_file is required".into())),
        };
        let spec = ChainSpec { source, k: f.k, transformer: f.transformer, seed: f.seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

/// Raw texts `s_0..=s_k`.
pub fn build_chain_texts(spec: &ChainSpec) -> Result<Vec<String>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut texts = vec![spec.source.clone()];
    for _ in 0..spec.k {
        let next = spec.transformer.apply(texts.last().expect("non-empty"), &mut rng)?;
        texts.push(next);
    }
    Ok(texts)
}

/// Encoded `s_0..=s_k`.
pub fn build_chain(spec: &ChainSpec) -> Result<Vec<Vec<Symbol>>> {
    Ok(build_chain_texts(spec)?.iter().map(|t| encode_text(t.as_bytes())).collect())
}

/// The path `s_0 → s_1 → … → s_k`.
pub fn chain_graph(k: usize) -> Result<Dag> {
    let labels: Vec<String> = (0..=k).map(|i| format!("s{i}")).collect();
    let edges: Vec<(usize, usize)> = (0..k).map(|i| (i, i + 1)).collect();
    Dag::from_edges(labels, &edges)
}

// ---------------------------------------------------------------------------
// networks

/// Index of a shared segment: a node, an edge `(x, y)` with `x < y`, or a
/// non-collider path `x – y – z` stored with `x < z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SegmentLabel(Vec<usize>);

impl SegmentLabel {
    pub fn node(x: usize) -> Self {
        SegmentLabel(vec![x])
    }

    pub fn edge(x: usize, y: usize) -> Self {
        SegmentLabel(vec![x.min(y), x.max(y)])
    }

    pub fn triple(x: usize, y: usize, z: usize) -> Self {
        SegmentLabel(vec![x.min(z), y, x.max(z)])
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn mentions(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    /// `"bac"` style name; labels longer than one character are joined by
    /// commas.
    pub fn name(&self, labels: &[String]) -> String {
        let parts: Vec<&str> = self.0.iter().map(|&i| labels[i].as_str()).collect();
        if parts.iter().all(|p| p.chars().count() == 1) {
            parts.concat()
        } else {
            parts.join(",")
        }
    }

    fn key(&self) -> (usize, Vec<usize>) {
        match self.0.as_slice() {
            &[x, y, z] => (3, vec![y, x, z]),
            v => (v.len(), v.to_vec()),
        }
    }
}

/// Nodes, then edges, then paths ordered by middle node.
impl Ord for SegmentLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for SegmentLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order in which a node's segments are concatenated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentOrder {
    #[default]
    Sorted,
    Shuffled,
}

/// Every segment label a DAG calls for: one per node, one per edge and one
/// per path `x – y – z` whose induced subgraph is not the collider
/// `x → y ← z`.
pub fn segment_labels(g: &Dag) -> Vec<SegmentLabel> {
    let n = g.len();
    let mut out: Vec<SegmentLabel> = (0..n).map(SegmentLabel::node).collect();
    out.extend(g.skeleton().into_iter().map(|(a, b)| SegmentLabel::edge(a, b)));
    for y in 0..n {
        for x in 0..n {
            for z in x + 1..n {
                if x == y || z == y || !g.adjacent(x, y) || !g.adjacent(y, z) {
                    continue;
                }
                let collider = g.has_edge(x, y) && g.has_edge(z, y) && !g.adjacent(x, z);
                if !collider {
                    out.push(SegmentLabel::triple(x, y, z));
                }
            }
        }
    }
    out.sort();
    out
}

/// What to sample for one network observation.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSpec {
    pub graph: Dag,
    pub labels: Vec<SegmentLabel>,
    pub lengths: LengthRange,
    pub order: SegmentOrder,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentFile {
    graph: String,
    n_min: usize,
    n_max: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    order: SegmentOrder,
    /// Explicit labels as lists of node names; derived when absent.
    labels: Option<Vec<Vec<String>>>,
}

impl SegmentSpec {
    /// The labels the graph calls for.
    pub fn for_graph(graph: Dag, lengths: LengthRange, seed: u64) -> Self {
        let labels = segment_labels(&graph);
        SegmentSpec { graph, labels, lengths, order: SegmentOrder::Sorted, seed }
    }

    /// Labels must match [`segment_labels`]; the error lists the offending
    /// ones.
    pub fn validate(&self) -> Result<()> {
        self.lengths.validate()?;
        let want = segment_labels(&self.graph);
        let mut have = self.labels.clone();
        have.sort();
        let names = |v: Vec<&SegmentLabel>| -> String {
            v.iter().map(|l| format!("s_{}", l.name(self.graph.labels()))).collect::<Vec<_>>().join(", ")
        };
        let missing: Vec<&SegmentLabel> = want.iter().filter(|l| !have.contains(l)).collect();
        let extra: Vec<&SegmentLabel> = have.iter().filter(|l| !want.contains(l)).collect();
        let dup = have.windows(2).any(|w| w[0] == w[1]);
        if missing.is_empty() && extra.is_empty() && !dup {
            return Ok(());
        }
        let mut msg = String::from("segment labels inconsistent with the graph");
        if !missing.is_empty() {
            msg += &format!("; missing {}", names(missing));
        }
        if !extra.is_empty() {
            msg += &format!("; unexpected {}", names(extra));
        }
        if dup {
            msg += "; duplicate labels";
        }
        Err(Error::Config(msg))
    }

    /// TOML: `graph` (edge list text), `n_min`, `n_max`, optional `seed`,
    /// `order` and `labels`.
    pub fn from_toml(text: &str) -> Result<Self> {
        let f: SegmentFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let graph = Dag::parse(&f.graph)?;
        let lengths = LengthRange::new(f.n_min, f.n_max)?;
        let labels = match f.labels {
            None => segment_labels(&graph),
            Some(ls) => ls
                .iter()
                .map(|names| {
                    let idx: Vec<usize> = names
                        .iter()
                        .map(|n| graph.index_of(n).map_err(|_| Error::Config(format!("unknown node {n:?}"))))
                        .collect::<Result<_>>()?;
                    match *idx.as_slice() {
                        [x] => Ok(SegmentLabel::node(x)),
                        [x, y] => Ok(SegmentLabel::edge(x, y)),
                        [x, y, z] => Ok(SegmentLabel::triple(x, y, z)),
                        _ => Err(Error::Config(format!("segment label {names:?} must name 1 to 3 nodes"))),
                    }
                })
                .collect::<Result<_>>()?,
        };
        let spec = SegmentSpec { graph, labels, lengths, order: f.order, seed: f.seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }
}

/// One sampled network observation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    /// Each label with the corpus span it was cut from.
    pub segments: Vec<(SegmentLabel, Range<usize>)>,
    /// One string per graph node.
    pub nodes: Vec<Vec<Symbol>>,
}

/// Samples one segment per label, pairwise disjoint and disjoint from
/// `avoid`, and concatenates at every node the segments mentioning it.
pub fn build_fournode<R: Rng + ?Sized>(
    spec: &SegmentSpec,
    corpus: &[Symbol],
    avoid: &[Range<usize>],
    rng: &mut R,
) -> Result<Network> {
    spec.validate()?;
    if corpus.len() < spec.lengths.max {
        return Err(Error::Input(format!(
            "corpus has {} symbols, segments need up to {}",
            corpus.len(),
            spec.lengths.max
        )));
    }
    let mut labels = spec.labels.clone();
    labels.sort();
    let mut taken: Vec<Range<usize>> = avoid.to_vec();
    let mut segments = Vec::with_capacity(labels.len());
    for l in labels {
        let span = sample_span(corpus.len(), spec.lengths.sample(rng), &taken, rng)?;
        taken.push(span.clone());
        segments.push((l, span));
    }
    let nodes = (0..spec.graph.len())
        .map(|v| {
            let mut mine: Vec<&Range<usize>> = segments.iter().filter(|(l, _)| l.mentions(v)).map(|(_, r)| r).collect();
            if spec.order == SegmentOrder::Shuffled {
                mine.shuffle(rng);
            }
            mine.into_iter().flat_map(|r| corpus[r.clone()].iter().copied()).collect()
        })
        .collect();
    Ok(Network { segments, nodes })
}

/// The two four-node reference graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphId {
    /// `a → b → d ← c ← a`: one collider, at `d`.
    A,
    /// `a → c ← b`, `a → d ← b`: colliders at `c` and `d`.
    B,
}

impl GraphId {
    pub fn dag(self) -> Dag {
        let text = match self {
            GraphId::A => "a\nb\nc\nd\na -> b -> d\na -> c -> d",
            GraphId::B => "a\nb\nc\nd\na -> c\nb -> c\na -> d\nb -> d",
        };
        Dag::parse(text).expect("reference graph parses")
    }
}

impl fmt::Display for GraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphId::A => "a",
            GraphId::B => "b",
        })
    }
}

impl std::str::FromStr for GraphId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(GraphId::A),
            "b" | "B" => Ok(GraphId::B),
            _ => Err(Error::Config(format!("unknown reference graph {s:?} (expected a or b)"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_examples() {
        assert_eq!(encode_text(b"  "), vec![9]);
        assert_eq!(encode_text(b"A"), vec![2]);
        assert_eq!(encode_text(b""), Vec::<Symbol>::new());
        assert_eq!(encode_text(b"ab \n\tc"), vec![7, 8, 9, 0]);
        assert_eq!(parse_digits(&format_digits(&[1, 0, 9])).unwrap(), vec![1, 0, 9]);
    }

    #[test]
    fn reference_labels() {
        let name = |g: GraphId| -> Vec<String> {
            let d = g.dag();
            segment_labels(&d).iter().map(|l| l.name(d.labels())).collect()
        };
        assert_eq!(name(GraphId::A), ["a", "b", "c", "d", "ab", "ac", "bd", "cd", "bac", "abd", "acd"]);
        assert_eq!(name(GraphId::B), ["a", "b", "c", "d", "ac", "ad", "bc", "bd", "cad", "cbd"]);
    }

    #[test]
    fn node_strings_concatenate_their_segments() {
        let corpus: Vec<Symbol> = (0..100_000u32).map(|i| (i * 7919 % 10) as Symbol).collect();
        let spec = SegmentSpec::for_graph(GraphId::A.dag(), LengthRange::new(5, 9).unwrap(), 0);
        let net = build_fournode(&spec, &corpus, &[], &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let d = spec.graph.clone();
        let b = d.index_of("b").unwrap();
        let parts: Vec<String> =
            net.segments.iter().filter(|(l, _)| l.mentions(b)).map(|(l, _)| l.name(d.labels())).collect();
        assert_eq!(parts, ["b", "ab", "bd", "bac", "abd"]);
        let want: Vec<Symbol> =
            net.segments.iter().filter(|(l, _)| l.mentions(b)).flat_map(|(_, r)| corpus[r.clone()].to_vec()).collect();
        assert_eq!(net.nodes[b], want);
        for (i, (_, r)) in net.segments.iter().enumerate() {
            assert!((5..=9).contains(&r.len()));
            for (_, q) in &net.segments[i + 1..] {
                assert!(!overlaps(r, q));
            }
        }
    }

    #[test]
    fn inconsistent_labels_are_listed() {
        let mut spec = SegmentSpec::for_graph(GraphId::A.dag(), LengthRange::new(5, 9).unwrap(), 0);
        spec.labels.push(SegmentLabel::triple(1, 3, 2));
        spec.labels.retain(|l| l != &SegmentLabel::triple(1, 0, 2));
        let err = spec.validate().unwrap_err().to_string();
        assert!(err.contains("missing s_bac") && err.contains("unexpected s_bdc"), "{err}");
    }

    #[test]
    fn chains_are_reproducible() {
        let spec = ChainSpec {
            source: "the quick brown fox jumps over the lazy dog ".repeat(20),
            k: 3,
            transformer: Transformer::Identity,
            seed: 0,
        };
        let c = build_chain(&spec).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|s| s == &c[0]));
        let spec = ChainSpec { transformer: Transformer::Perturb { rate: 0.1 }, seed: 5, ..spec };
        let (x, y) = (build_chain(&spec).unwrap(), build_chain(&spec).unwrap());
        assert_eq!(x, y);
        assert_ne!(x[0], x[3]);
    }

    #[test]
    fn spec_files() {
        let s = SegmentSpec::from_toml("graph = \"a -> b -> c\"\nn_min = 10\nn_max = 20\nseed = 3\n").unwrap();
        assert_eq!(s.labels.len(), 3 + 2 + 1);
        let bad = "graph = \"a -> b\\nc -> b\"\nn_min = 1\nn_max = 2\nlabels = [[\"a\"], [\"b\"], [\"c\"], [\"a\", \"b\"], [\"b\", \"c\"], [\"a\", \"b\", \"c\"]]\n";
        assert!(SegmentSpec::from_toml(bad).unwrap_err().to_string().contains("unexpected s_abc"));
        let c = ChainSpec::from_toml(
            "source = \"x y z\"\nk = 2\n[transformer]\nkind = \"perturb\"\nrate = 0.2\n",
            Path::new("."),
        )
        .unwrap();
        assert_eq!(c.transformer, Transformer::Perturb { rate: 0.2 });
        assert!(ChainSpec::from_toml("source = \"x\"\nk = 0\n[transformer]\nkind = \"identity\"\n", Path::new("."))
            .is_err());
        assert!(Transformer::from_name("translate").is_err());
    }
}
