//! The lattice of observation sets.
//!
//! Observations are labelled items of a [`GroundSet`]; an [`Element`] is a set
//! of them, standing for their join. Join is set union, meet is intersection
//! and the bottom element is the empty set.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of observations an [`Element`] can address.
pub const MAX_OBSERVATIONS: usize = 64;

/// Ordered, uniquely labelled observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > MAX_OBSERVATIONS {
            return Err(Error::TooLarge { what: "ground set", actual: labels.len(), limit: MAX_OBSERVATIONS });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate observation label {l:?}")));
            }
        }
        Ok(GroundSet { labels, index })
    }

    /// Ground set labelled `x0, x1, ...`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("x{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.get(i).map(String::as_str)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// The join of every observation.
    pub fn top(&self) -> Element {
        Element::full(self.len())
    }

    /// Rejects elements that mention indices outside this ground set.
    pub fn check(&self, e: Element) -> Result<()> {
        match e.max_index() {
            Some(i) if i >= self.len() => Err(Error::UnknownObservation { index: i, len: self.len() }),
            _ => Ok(()),
        }
    }

    /// Iterates every element of the lattice (all `2^n` subsets).
    pub fn elements(&self) -> impl Iterator<Item = Element> {
        let n = self.len();
        (0..1u64 << n).map(Element)
    }
}

/// A set of observation indices; the join of its members.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Element(u64);

impl Element {
    pub const EMPTY: Element = Element(0);

    pub fn from_bits(bits: u64) -> Self {
        Element(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_OBSERVATIONS);
        Element(1 << i)
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_OBSERVATIONS);
        if n == MAX_OBSERVATIONS {
            Element(u64::MAX)
        } else {
            Element((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(Element::EMPTY, |acc, i| acc.join(Element::singleton(i)))
    }

    pub fn join(self, other: Element) -> Element {
        Element(self.0 | other.0)
    }

    pub fn meet(self, other: Element) -> Element {
        Element(self.0 & other.0)
    }

    pub fn minus(self, other: Element) -> Element {
        Element(self.0 & !other.0)
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_OBSERVATIONS && self.0 & (1 << i) != 0
    }

    pub fn is_subset_of(self, other: Element) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Element) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// Member indices in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Element> {
        let full = self.0;
        let mut cur = 0u64;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = Element(cur);
            if cur == full {
                done = true;
            } else {
                cur = (cur.wrapping_sub(full)) & full;
            }
            Some(out)
        })
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
