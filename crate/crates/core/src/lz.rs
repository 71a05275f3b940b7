//! Lempel–Ziv (1976) complexity and the LZ information of a set of strings.
//!
//! `c(s)` is the number of components of the exhaustive history of `s`: the
//! parse in which every component extends as far as it can be copied from
//! earlier text (the copy may overlap the component itself), plus one fresh
//! symbol. The longest admissible copy at a position is its longest previous
//! factor, found through a suffix array.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Element, GroundSet};
use crate::measure::{Exactness, InformationMeasure};

pub type Symbol = u8;

/// Digits `0..=9`.
pub const DEFAULT_ALPHABET: Symbol = 10;
pub const DEFAULT_MAX_MATCH: usize = 30;

/// Submodularity slack of [`LzMeasure`] per bit of total input length.
/// Violations grow roughly logarithmically: random strings of up to a few
/// thousand symbols stay below `log2(total length)` components.
pub const LZ_SLACK_PER_BIT: f64 = 2.0;

/// `per_bit * log2(2 + total length)`: the default slack for a collection
/// of strings.
pub fn length_slack(strings: &[Vec<Symbol>], per_bit: f64) -> f64 {
    let total: usize = strings.iter().map(Vec::len).sum();
    per_bit * ((total + 2) as f64).log2()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LzConfig {
    /// Longest copied part of a component; `None` means unbounded.
    pub max_match_length: Option<usize>,
    /// Data symbols are `0..alphabet_size`.
    pub alphabet_size: Symbol,
    /// Explicit separator codes; empty means `alphabet_size, alphabet_size + 1, …`.
    pub separators: Vec<Symbol>,
}

impl Default for LzConfig {
    fn default() -> Self {
        LzConfig { max_match_length: Some(DEFAULT_MAX_MATCH), alphabet_size: DEFAULT_ALPHABET, separators: Vec::new() }
    }
}

impl LzConfig {
    /// No cap on copy length: exact LZ76 complexity.
    pub fn unbounded() -> Self {
        LzConfig { max_match_length: None, ..Self::default() }
    }

    pub fn with_max_match(mut self, max: usize) -> Self {
        self.max_match_length = Some(max);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_match_length == Some(0) {
            return Err(Error::Config("max_match_length must be positive".into()));
        }
        if self.alphabet_size == 0 {
            return Err(Error::Config("alphabet must be nonempty".into()));
        }
        for (i, &a) in self.separators.iter().enumerate() {
            if a < self.alphabet_size {
                return Err(Error::Config(format!("separator {a} collides with the data alphabet")));
            }
            if self.separators[..i].contains(&a) {
                return Err(Error::Config(format!("separator {a} listed twice")));
            }
        }
        Ok(())
    }

    /// The `i`-th separator symbol.
    pub fn separator(&self, i: usize) -> Result<Symbol> {
        if self.separators.is_empty() {
            let code = self.alphabet_size as usize + i;
            Symbol::try_from(code).map_err(|_| Error::TooLarge {
                what: "separator code",
                actual: code,
                limit: Symbol::MAX as usize,
            })
        } else {
            self.separators.get(i).copied().ok_or(Error::TooLarge {
                what: "separators",
                actual: i + 1,
                limit: self.separators.len(),
            })
        }
    }

    pub fn check_symbols(&self, s: &[Symbol]) -> Result<()> {
        match s.iter().find(|&&c| c >= self.alphabet_size) {
            Some(&c) => Err(Error::SymbolOutOfRange { symbol: c as u32, alphabet: self.alphabet_size as u32 }),
            None => Ok(()),
        }
    }
}

/// Whether `s = x·y` with `y` a substring of `x·ȳ` (`ȳ`: `y` without its last
/// symbol), i.e. `y` can be copied from earlier positions.
pub fn is_reproducible(x: &[Symbol], s: &[Symbol]) -> Result<bool> {
    if !s.starts_with(x) {
        return Err(Error::Input("x is not a prefix of s".into()));
    }
    let y = &s[x.len()..];
    if y.is_empty() {
        return Ok(true);
    }
    Ok((0..x.len()).any(|j| s[j..j + y.len()] == *y))
}

/// Whether `s̄` (all but the last symbol of `s`) is reproducible from `x`.
pub fn is_producible(x: &[Symbol], s: &[Symbol]) -> Result<bool> {
    if s.len() <= x.len() || !s.starts_with(x) {
        return Err(Error::Input("x is not a proper prefix of s".into()));
    }
    is_reproducible(x, &s[..s.len() - 1])
}

/// Component boundaries `0 = h_1 < h_2 < … < h_{k+1} = |s|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LzHistory {
    boundaries: Vec<usize>,
}

impl LzHistory {
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// `c(s)`.
    pub fn len(&self) -> usize {
        self.boundaries.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.boundaries.windows(2).map(|w| w[0]..w[1])
    }

    pub fn components<'a>(&'a self, s: &'a [Symbol]) -> impl Iterator<Item = &'a [Symbol]> + 'a {
        self.ranges().map(move |r| &s[r])
    }
}

/// Exhaustive history of `s`. Symbols must lie in the data alphabet.
pub fn exhaustive_history(s: &[Symbol], cfg: &LzConfig) -> Result<LzHistory> {
    cfg.validate()?;
    cfg.check_symbols(s)?;
    Ok(parse(s, cfg.max_match_length))
}

/// `c(s)`.
pub fn lz_complexity(s: &[Symbol], cfg: &LzConfig) -> Result<usize> {
    Ok(exhaustive_history(s, cfg)?.len())
}

// Longest-previous-factor parse; no symbol validation.
fn parse(s: &[Symbol], cap: Option<usize>) -> LzHistory {
    let n = s.len();
    let mut boundaries = vec![0];
    if n == 0 {
        return LzHistory { boundaries: Vec::new() };
    }
    let (prev, next) = nearest_earlier_suffixes(s);
    let cap = cap.unwrap_or(usize::MAX);
    let mut i = 0;
    while i < n {
        let limit = cap.min(n - i);
        let lcp = |j: usize| (0..limit).take_while(|&k| s[j + k] == s[i + k]).count();
        let copied = prev[i].map_or(0, lcp).max(next[i].map_or(0, lcp));
        i = (i + copied + 1).min(n);
        boundaries.push(i);
    }
    LzHistory { boundaries }
}

/// For each text position `i`, the nearest suffixes before and after
/// suffix `i` in lexicographic order among those starting before `i`. The
/// longest previous factor at `i` is shared with one of them.
fn nearest_earlier_suffixes(s: &[Symbol]) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let n = s.len();
    let mut sa = vec![0i32; n];
    divsufsort::sort_in_place(s, &mut sa);
    let mut prev = vec![None; n];
    let mut next = vec![None; n];
    let mut stack: Vec<usize> = Vec::new();
    // Forward pass: when a smaller text position arrives, it is the next
    // earlier suffix for every larger position still on the stack.
    for &p in &sa {
        let p = p as usize;
        while let Some(&top) = stack.last() {
            if top > p {
                next[top] = Some(p);
                stack.pop();
            } else {
                break;
            }
        }
        prev[p] = stack.last().copied();
        stack.push(p);
    }
    (prev, next)
}

/// Strings of `xs` in canonical order: ascending content, ties by index.
fn canonical_order(xs: &[&[Symbol]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].cmp(xs[b]).then(a.cmp(&b)));
    idx
}

/// `x_{i1} α_{i1} … x_{im} α_{im}` in canonical order, where `α_i` is the
/// separator of the string's position in `xs`.
pub fn set_concat(xs: &[&[Symbol]], cfg: &LzConfig) -> Result<Vec<Symbol>> {
    let mut out = Vec::with_capacity(xs.iter().map(|x| x.len() + 1).sum());
    for i in canonical_order(xs) {
        cfg.check_symbols(xs[i])?;
        out.extend_from_slice(xs[i]);
        out.push(cfg.separator(i)?);
    }
    Ok(out)
}

/// LZ information of a set of strings: `c` of the canonical separated
/// concatenation.
pub fn lz_set_info(xs: &[&[Symbol]], cfg: &LzConfig) -> Result<usize> {
    cfg.validate()?;
    Ok(parse(&set_concat(xs, cfg)?, cfg.max_match_length).len())
}

/// `c(zαx) + c(zαy) − c(zαxβy) − c(z)`, never below −1.
pub fn lz_cmi_asymmetric(x: &[Symbol], y: &[Symbol], z: &[Symbol], cfg: &LzConfig) -> Result<i64> {
    cfg.validate()?;
    for s in [x, y, z] {
        cfg.check_symbols(s)?;
    }
    let (alpha, beta) = (cfg.separator(0)?, cfg.separator(1)?);
    let c = |parts: &[&[Symbol]]| parse(&parts.concat(), cfg.max_match_length).len() as i64;
    Ok(c(&[z, &[alpha], x]) + c(&[z, &[alpha], y]) - c(&[z, &[alpha], x, &[beta], y]) - c(&[z]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PieceSource {
    Parent,
    Noise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub source: PieceSource,
    pub start: usize,
    pub len: usize,
}

/// A string assembled from substrings of a parent string and a noise string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalConcat {
    pub output: Vec<Symbol>,
    pub pieces: Vec<Piece>,
}

/// Concatenates `k` random substrings of `pa` and `n`. The source of each
/// piece is chosen uniformly among the nonempty inputs, then a uniform start
/// and a uniform length up to the end of the source.
pub fn functional_concat<R: Rng + ?Sized>(
    pa: &[Symbol],
    n: &[Symbol],
    k: usize,
    rng: &mut R,
) -> Result<FunctionalConcat> {
    if pa.is_empty() && n.is_empty() && k > 0 {
        return Err(Error::Input("parent and noise strings are both empty".into()));
    }
    let mut output = Vec::new();
    let mut pieces = Vec::with_capacity(k);
    for _ in 0..k {
        let source = match (pa.is_empty(), n.is_empty()) {
            (false, true) => PieceSource::Parent,
            (true, false) => PieceSource::Noise,
            _ if rng.gen_bool(0.5) => PieceSource::Parent,
            _ => PieceSource::Noise,
        };
        let src = if source == PieceSource::Parent { pa } else { n };
        let start = rng.gen_range(0..src.len());
        let len = rng.gen_range(1..=src.len() - start);
        output.extend_from_slice(&src[start..start + len]);
        pieces.push(Piece { source, start, len });
    }
    Ok(FunctionalConcat { output, pieces })
}

/// `R(X) = LZ(X)` on a fixed collection of strings.
#[derive(Debug, Clone)]
pub struct LzMeasure {
    ground: GroundSet,
    strings: Vec<Vec<Symbol>>,
    cfg: LzConfig,
    slack: f64,
}

impl LzMeasure {
    pub fn new(strings: Vec<Vec<Symbol>>, cfg: LzConfig) -> Result<Self> {
        let ground = GroundSet::indexed(strings.len())?;
        Self::with_ground(strings, ground, cfg)
    }

    pub fn with_ground(strings: Vec<Vec<Symbol>>, ground: GroundSet, cfg: LzConfig) -> Result<Self> {
        cfg.validate()?;
        if ground.len() != strings.len() {
            return Err(Error::Input("one label per string required".into()));
        }
        for s in &strings {
            cfg.check_symbols(s)?;
        }
        cfg.separator(strings.len().saturating_sub(1))?;
        let slack = length_slack(&strings, LZ_SLACK_PER_BIT);
        Ok(LzMeasure { ground, strings, cfg, slack })
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self
    }

    pub fn strings(&self) -> &[Vec<Symbol>] {
        &self.strings
    }

    pub fn config(&self) -> &LzConfig {
        &self.cfg
    }
}

/// The separated concatenation of the strings selected by `e`, each string
/// keeping the separator of its index in `strings`.
pub(crate) fn element_concat(strings: &[Vec<Symbol>], e: Element, cfg: &LzConfig) -> Result<Vec<Symbol>> {
    let idx: Vec<usize> = e.indices().collect();
    let mut order = idx.clone();
    order.sort_by(|&a, &b| strings[a].cmp(&strings[b]).then(a.cmp(&b)));
    let mut out = Vec::with_capacity(idx.iter().map(|&i| strings[i].len() + 1).sum());
    for i in order {
        out.extend_from_slice(&strings[i]);
        out.push(cfg.separator(i)?);
    }
    Ok(out)
}

impl InformationMeasure for LzMeasure {
    type Value = i64;

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn evaluate(&self, e: Element) -> Result<i64> {
        self.ground.check(e)?;
        let s = element_concat(&self.strings, e, &self.cfg)?;
        Ok(parse(&s, self.cfg.max_match_length).len() as i64)
    }

    fn exactness(&self) -> Exactness {
        Exactness::Approximate { slack: self.slack }
    }

    fn name(&self) -> &str {
        "lz"
    }
}
