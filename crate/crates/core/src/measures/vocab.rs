//! Vocabulary size: the number of distinct meaningful words in a set of
//! texts.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::{Element, GroundSet};
use crate::measure::{Exactness, InformationMeasure};

/// Articles, prepositions, conjunctions and pronouns ignored by default.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "an", "the", "of", "in", "on", "at", "to", "for", "from", "by", "with", "about", "into", "onto", "over",
    "under", "upon", "within", "without", "through", "between", "among", "against", "during", "before", "after",
    "above", "below", "up", "down", "off", "out", "as", "and", "or", "but", "nor", "so", "yet", "if", "than", "that",
    "this", "these", "those", "is", "are", "was", "were", "be", "been", "it", "its",
];

/// A fixed set of tokens to ignore.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn none() -> Self {
        Stopwords(HashSet::new())
    }

    pub fn english() -> Self {
        Stopwords(DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect())
    }

    /// One token per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect(),
        )
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, w: &str) -> bool {
        self.0.contains(w)
    }
}

/// Lowercased alphabetic tokens of `text`.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphabetic()).filter(|t| !t.is_empty()).map(str::to_lowercase)
}

/// The meaningful-word vocabulary of each text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSetObservations {
    vocabularies: Vec<BTreeSet<String>>,
}

impl WordSetObservations {
    pub fn from_texts<I, S>(texts: I, stopwords: &Stopwords) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let vocabularies =
            texts.into_iter().map(|t| tokenize(t.as_ref()).filter(|w| !stopwords.contains(w)).collect()).collect();
        WordSetObservations { vocabularies }
    }

    pub fn vocabulary(&self, i: usize) -> &BTreeSet<String> {
        &self.vocabularies[i]
    }

    pub fn len(&self) -> usize {
        self.vocabularies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocabularies.is_empty()
    }
}

/// `R(S) = |⋃_{x∈S} words(x)|`.
#[derive(Debug, Clone)]
pub struct VocabMeasure {
    ground: GroundSet,
    // word ids per text, sorted
    ids: Vec<Vec<u32>>,
    obs: WordSetObservations,
}

impl VocabMeasure {
    pub fn new(obs: WordSetObservations) -> Result<Self> {
        let ground = GroundSet::indexed(obs.len())?;
        Self::with_ground(obs, ground)
    }

    pub fn with_ground(obs: WordSetObservations, ground: GroundSet) -> Result<Self> {
        if ground.len() != obs.len() {
            return Err(Error::Input("one label per text required".into()));
        }
        let mut dict: HashMap<&str, u32> = HashMap::new();
        let ids = obs
            .vocabularies
            .iter()
            .map(|v| {
                v.iter()
                    .map(|w| {
                        let next = dict.len() as u32;
                        *dict.entry(w.as_str()).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        Ok(VocabMeasure { ground, ids, obs })
    }

    pub fn observations(&self) -> &WordSetObservations {
        &self.obs
    }
}

impl InformationMeasure for VocabMeasure {
    type Value = i64;

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn evaluate(&self, e: Element) -> Result<i64> {
        self.ground.check(e)?;
        let union: HashSet<u32> = e.indices().flat_map(|i| self.ids[i].iter().copied()).collect();
        Ok(union.len() as i64)
    }

    fn exactness(&self) -> Exactness {
        Exactness::ExactSubmodular
    }

    fn name(&self) -> &str {
        "vocab"
    }
}
