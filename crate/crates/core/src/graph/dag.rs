use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Element, MAX_OBSERVATIONS};

/// Largest node count accepted by [`all_dags`].
pub const ENUMERATION_LIMIT: usize = 6;

/// A directed acyclic graph on at most 64 labelled nodes. Node sets are
/// [`Element`] bitmasks, so a node index doubles as an observation index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dag {
    labels: Vec<String>,
    parents: Vec<Element>,
}

impl Dag {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > MAX_OBSERVATIONS {
            return Err(Error::TooLarge { what: "graph nodes", actual: labels.len(), limit: MAX_OBSERVATIONS });
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.contains(char::is_whitespace) {
                return Err(Error::Input(format!("invalid node label {l:?}")));
            }
            if labels[..i].contains(l) {
                return Err(Error::Input(format!("duplicate node label {l:?}")));
            }
        }
        let n = labels.len();
        Ok(Dag { labels, parents: vec![Element::EMPTY; n] })
    }

    /// Nodes labelled `x0, x1, …`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("x{i}")))
    }

    /// Builds a graph from labelled edges, rejecting cycles.
    pub fn from_edges<I, S>(labels: I, edges: &[(usize, usize)]) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut g = Self::new(labels)?;
        for &(p, c) in edges {
            g.add_edge(p, c)?;
        }
        Ok(g)
    }

    /// Convenience for fixtures: `Dag::from_labelled_edges(&["a","b"], &[("a","b")])`.
    pub fn from_labelled_edges(labels: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let mut g = Self::new(labels.iter().copied())?;
        for &(p, c) in edges {
            let (p, c) = (g.index_of(p)?, g.index_of(c)?);
            g.add_edge(p, c)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, parent: usize, child: usize) -> Result<()> {
        self.check_node(parent)?;
        self.check_node(child)?;
        if parent == child {
            return Err(Error::Structure(format!("self-loop on {}", self.labels[parent])));
        }
        if self.ancestors_of(Element::singleton(parent)).contains(child) {
            return Err(Error::Structure(format!(
                "edge {} -> {} would create a cycle",
                self.labels[parent], self.labels[child]
            )));
        }
        self.parents[child] = self.parents[child].join(Element::singleton(parent));
        Ok(())
    }

    pub fn remove_edge(&mut self, parent: usize, child: usize) -> Result<()> {
        self.check_node(parent)?;
        self.check_node(child)?;
        self.parents[child] = self.parents[child].minus(Element::singleton(parent));
        Ok(())
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

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::Input(format!("unknown node {label:?}")))
    }

    pub fn nodes(&self) -> Element {
        Element::full(self.len())
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownObservation { index: v, len: self.len() })
        }
    }

    pub fn check_set(&self, s: Element) -> Result<()> {
        match s.max_index() {
            Some(i) if i >= self.len() => Err(Error::UnknownObservation { index: i, len: self.len() }),
            _ => Ok(()),
        }
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        child < self.len() && self.parents[child].contains(parent)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Edges as (parent, child), sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = (0..self.len()).flat_map(|c| self.parents[c].indices().map(move |p| (p, c))).collect();
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    pub fn parents(&self, v: usize) -> Element {
        self.parents[v]
    }

    pub fn parent_list(&self, v: usize) -> Vec<usize> {
        self.parents[v].indices().collect()
    }

    pub fn children(&self, v: usize) -> Element {
        Element::from_indices((0..self.len()).filter(|&c| self.parents[c].contains(v)))
    }

    /// Ancestors of the nodes in `s`, including `s` itself.
    pub fn ancestors_of(&self, s: Element) -> Element {
        let mut acc = s;
        let mut frontier = s;
        while !frontier.is_empty() {
            let next = frontier.indices().fold(Element::EMPTY, |a, v| a.join(self.parents[v]));
            frontier = next.minus(acc);
            acc = acc.join(next);
        }
        acc
    }

    /// Descendants of `v`, including `v`.
    pub fn descendants(&self, v: usize) -> Element {
        let mut acc = Element::singleton(v);
        for u in self.topological_order() {
            if !self.parents[u].is_disjoint(acc) {
                acc = acc.join(Element::singleton(u));
            }
        }
        acc
    }

    /// Nodes that are neither descendants nor parents of `v`.
    pub fn non_descendants(&self, v: usize) -> Element {
        self.nodes().minus(self.descendants(v)).minus(self.parents[v])
    }

    /// Smallest ancestral set containing `s`.
    pub fn ancestral_closure(&self, s: Element) -> Result<Element> {
        self.check_set(s)?;
        Ok(self.ancestors_of(s))
    }

    pub fn is_ancestral(&self, s: Element) -> bool {
        s.indices().all(|v| self.parents[v].is_subset_of(s))
    }

    /// Kahn's algorithm, smallest index first among ready nodes.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.len();
        let mut done = Element::EMPTY;
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let v = (0..n)
                .find(|&v| !done.contains(v) && self.parents[v].is_subset_of(done))
                .expect("graph is acyclic by construction");
            done = done.join(Element::singleton(v));
            order.push(v);
        }
        order
    }

    /// Unordered adjacent pairs `(a, b)` with `a < b`.
    pub fn skeleton(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.edges().into_iter().map(|(p, c)| (p.min(c), p.max(c))).collect();
        out.sort_unstable();
        out
    }

    /// Unshielded colliders `(a, c, b)` with `a → c ← b`, `a < b`, `a`,`b`
    /// non-adjacent.
    pub fn v_structures(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for c in 0..self.len() {
            let ps = self.parent_list(c);
            for (i, &a) in ps.iter().enumerate() {
                for &b in &ps[i + 1..] {
                    if !self.adjacent(a, b) {
                        out.push((a, c, b));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Whether `a` and `b` are d-separated given `c`, by moralizing the
    /// ancestral subgraph of `a ∪ b ∪ c`.
    pub fn d_separated(&self, a: Element, b: Element, c: Element) -> Result<bool> {
        self.check_set(a.join(b).join(c))?;
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(Error::Input(format!("d-separation needs disjoint sets, got {a}, {b}, {c}")));
        }
        Ok(self.d_separated_unchecked(a, b, c))
    }

    pub(crate) fn d_separated_unchecked(&self, a: Element, b: Element, c: Element) -> bool {
        if a.is_empty() || b.is_empty() {
            return true;
        }
        let anc = self.ancestors_of(a.join(b).join(c));
        let mut moral = vec![Element::EMPTY; self.len()];
        for v in anc.indices() {
            let ps = self.parents[v];
            for p in ps.indices() {
                moral[p] = moral[p].join(Element::singleton(v)).join(ps.minus(Element::singleton(p)));
                moral[v] = moral[v].join(Element::singleton(p));
            }
        }
        let allowed = anc.minus(c);
        let mut seen = a;
        let mut queue: VecDeque<usize> = a.indices().collect();
        while let Some(v) = queue.pop_front() {
            for w in moral[v].meet(allowed).minus(seen).indices() {
                if b.contains(w) {
                    return false;
                }
                seen = seen.join(Element::singleton(w));
                queue.push_back(w);
            }
        }
        true
    }

    /// Parses one edge chain per line (`a -> b -> c`) or a bare node label;
    /// `#` starts a comment. Nodes are indexed in order of first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut prev = None;
            for part in line.split("->") {
                let name = part.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(Error::Input(format!("line {}: cannot parse {raw:?}", lineno + 1)));
                }
                let id = *index.entry(name.to_string()).or_insert_with(|| {
                    labels.push(name.to_string());
                    labels.len() - 1
                });
                if let Some(p) = prev {
                    edges.push((p, id));
                }
                prev = Some(id);
            }
        }
        Self::from_edges(labels, &edges)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Inverse of [`Dag::parse`]: every node on its own line, then the edges.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.labels {
            out.push_str(l);
            out.push('\n');
        }
        for (p, c) in self.edges() {
            out.push_str(&format!("{} -> {}\n", self.labels[p], self.labels[c]));
        }
        out
    }
}

impl fmt::Display for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> =
            self.edges().iter().map(|&(p, c)| format!("{}->{}", self.labels[p], self.labels[c])).collect();
        write!(f, "[{}]", edges.join(", "))
    }
}

/// Every labelled DAG on `n` nodes (543 for n = 4, 29281 for n = 5).
pub fn all_dags(n: usize) -> Result<Vec<Dag>> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { what: "DAG enumeration nodes", actual: n, limit: ENUMERATION_LIMIT });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let base = Dag::indexed(n)?;
    let mut out = Vec::new();
    let total = 3usize.pow(pairs.len() as u32);
    'codes: for code in 0..total {
        let mut g = base.clone();
        let mut c = code;
        for &(a, b) in &pairs {
            let state = c % 3;
            c /= 3;
            let r = match state {
                0 => Ok(()),
                1 => g.add_edge(a, b),
                _ => g.add_edge(b, a),
            };
            if r.is_err() {
                continue 'codes;
            }
        }
        out.push(g);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &Dag, names: &[&str]) -> Element {
        Element::from_indices(names.iter().map(|n| g.index_of(n).unwrap()))
    }

    fn diamond() -> Dag {
        Dag::from_labelled_edges(&["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]).unwrap()
    }

    #[test]
    fn chain_relations() {
        let g = Dag::parse("a -> b -> c").unwrap();
        assert_eq!(g.parents(2), set(&g, &["b"]));
        assert_eq!(g.non_descendants(2), set(&g, &["a"]));
        assert_eq!(g.parents(0), Element::EMPTY);
        assert_eq!(g.non_descendants(0), Element::EMPTY);
    }

    #[test]
    fn closure_and_ancestral() {
        let g = diamond();
        assert_eq!(g.ancestral_closure(set(&g, &["d"])).unwrap(), g.nodes());
        assert!(g.is_ancestral(set(&g, &["a", "b"])));
        assert!(!g.is_ancestral(set(&g, &["b"])));
        assert!(g.ancestral_closure(Element::singleton(9)).is_err());
    }

    #[test]
    fn textbook_d_separation() {
        let col = Dag::parse("a -> b\nc -> b").unwrap();
        let (a, b, c) = (set(&col, &["a"]), set(&col, &["b"]), set(&col, &["c"]));
        assert!(col.d_separated(a, c, Element::EMPTY).unwrap());
        assert!(!col.d_separated(a, c, b).unwrap());

        let chain = Dag::parse("a -> b -> c").unwrap();
        assert!(chain.d_separated(set(&chain, &["a"]), set(&chain, &["c"]), set(&chain, &["b"])).unwrap());

        let g = diamond();
        let (b, c) = (set(&g, &["b"]), set(&g, &["c"]));
        assert!(g.d_separated(b, c, set(&g, &["a"])).unwrap());
        assert!(!g.d_separated(b, c, set(&g, &["a", "d"])).unwrap());
        assert!(g.d_separated(b, b, Element::EMPTY).is_err());
    }

    #[test]
    fn parse_errors_and_round_trip() {
        assert!(Dag::parse("a -> b\nb -> a").is_err());
        assert!(Dag::parse("a -> a").is_err());
        assert!(Dag::parse("a -> \n").is_err());
        assert!(Dag::parse("a b -> c").is_err());
        let g = Dag::parse("# fig\nlonely\na -> b # edge\n").unwrap();
        assert_eq!(g.labels(), ["lonely", "a", "b"]);
        assert_eq!(Dag::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn dag_counts() {
        assert_eq!(all_dags(1).unwrap().len(), 1);
        assert_eq!(all_dags(2).unwrap().len(), 3);
        assert_eq!(all_dags(3).unwrap().len(), 25);
        assert_eq!(all_dags(4).unwrap().len(), 543);
        assert!(all_dags(7).is_err());
    }

    #[test]
    fn v_structures_of_collider_and_diamond() {
        let g = Dag::parse("a -> c\nb -> c\na -> d\nb -> d").unwrap();
        assert_eq!(g.v_structures(), vec![(0, 1, 2), (0, 3, 2)]);
        assert_eq!(diamond().v_structures(), vec![(1, 3, 2)]);
    }
}
