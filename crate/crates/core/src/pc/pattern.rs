use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Dag;

/// A partially directed graph: adjacencies, some of them oriented.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    labels: Vec<String>,
    adj: Vec<Vec<bool>>,
    // dir[a][b]: a → b
    dir: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternEdge {
    pub from: String,
    pub to: String,
    pub directed: bool,
}

#[derive(Serialize)]
struct PatternJson<'a> {
    nodes: &'a [String],
    edges: Vec<PatternEdge>,
}

impl Pattern {
    /// No edges.
    pub fn empty(labels: Vec<String>) -> Self {
        let n = labels.len();
        Pattern { labels, adj: vec![vec![false; n]; n], dir: vec![vec![false; n]; n] }
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

    pub fn add_undirected(&mut self, a: usize, b: usize) {
        self.adj[a][b] = true;
        self.adj[b][a] = true;
        self.dir[a][b] = false;
        self.dir[b][a] = false;
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.adj[a][b] = false;
        self.adj[b][a] = false;
        self.dir[a][b] = false;
        self.dir[b][a] = false;
    }

    /// Orients `a → b`; fails if the edge is absent or already `b → a`.
    pub fn orient(&mut self, a: usize, b: usize) -> Result<()> {
        if !self.adj[a][b] {
            return Err(Error::Internal(format!("orienting missing edge {a}-{b}")));
        }
        if self.dir[b][a] {
            return Err(Error::Inconsistent(a.min(b), a.max(b)));
        }
        self.dir[a][b] = true;
        Ok(())
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn directed(&self, a: usize, b: usize) -> bool {
        self.dir[a][b]
    }

    pub fn undirected(&self, a: usize, b: usize) -> bool {
        self.adj[a][b] && !self.dir[a][b] && !self.dir[b][a]
    }

    pub fn neighbours(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&b| self.adj[a][b])
    }

    /// Sorted edges; undirected ones as `(min, max)`.
    pub fn edges(&self) -> Vec<(usize, usize, bool)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in 0..self.len() {
                if self.dir[a][b] {
                    out.push((a, b, true));
                } else if a < b && self.undirected(a, b) {
                    out.push((a, b, false));
                }
            }
        }
        out
    }

    pub fn edge_list(&self) -> Vec<PatternEdge> {
        self.edges()
            .into_iter()
            .map(|(a, b, directed)| PatternEdge { from: self.labels[a].clone(), to: self.labels[b].clone(), directed })
            .collect()
    }

    /// Whether oriented edges contain a directed cycle; returns an edge on it.
    pub fn directed_cycle(&self) -> Option<(usize, usize)> {
        let n = self.len();
        let mut indeg: Vec<usize> = (0..n).map(|b| (0..n).filter(|&a| self.dir[a][b]).count()).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = vec![false; n];
        while let Some(v) = queue.pop() {
            removed[v] = true;
            for w in 0..n {
                if self.dir[v][w] {
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        queue.push(w);
                    }
                }
            }
        }
        (0..n).find(|&a| !removed[a]).and_then(|a| (0..n).find(|&b| !removed[b] && self.dir[a][b]).map(|b| (a, b)))
    }

    /// Applies a node permutation: node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.len();
        let mut labels = vec![String::new(); n];
        let mut p = Pattern::empty(vec![String::new(); n]);
        for i in 0..n {
            labels[perm[i]] = self.labels[i].clone();
            for j in 0..n {
                p.adj[perm[i]][perm[j]] = self.adj[i][j];
                p.dir[perm[i]][perm[j]] = self.dir[i][j];
            }
        }
        p.labels = labels;
        p
    }

    /// Same adjacencies and orientations, ignoring labels.
    pub fn same_structure(&self, other: &Pattern) -> bool {
        self.adj == other.adj && self.dir == other.dir
    }

    pub fn to_json(&self) -> String {
        let j = PatternJson { nodes: &self.labels, edges: self.edge_list() };
        serde_json::to_string_pretty(&j).expect("pattern serializes")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// The pattern with every edge of `dag` oriented.
    pub fn from_dag(dag: &Dag) -> Self {
        let mut p = Pattern::empty(dag.labels().to_vec());
        for (a, b) in dag.edges() {
            p.add_undirected(a, b);
            p.dir[a][b] = true;
        }
        p
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(a, b, d)| format!("{}{}{}", self.labels[a], if d { "->" } else { "--" }, self.labels[b]))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// All DAGs Markov equivalent to `dag` (same skeleton and v-structures),
/// by trying every orientation of its skeleton.
pub fn markov_equivalence_class(dag: &Dag) -> Result<Vec<Dag>> {
    let skel = dag.skeleton();
    if skel.len() > 20 {
        return Err(Error::TooLarge { what: "skeleton edges", actual: skel.len(), limit: 20 });
    }
    let target = dag.v_structures();
    let mut out = Vec::new();
    'orient: for code in 0u32..(1 << skel.len()) {
        let mut g = Dag::new(dag.labels().iter().cloned())?;
        for (i, &(a, b)) in skel.iter().enumerate() {
            let (p, c) = if code >> i & 1 == 0 { (a, b) } else { (b, a) };
            if g.add_edge(p, c).is_err() {
                continue 'orient;
            }
        }
        if g.v_structures() == target {
            out.push(g);
        }
    }
    Ok(out)
}

/// Completed pattern of `dag`: an edge is directed iff every Markov
/// equivalent DAG orients it the same way.
pub fn cpdag(dag: &Dag) -> Result<Pattern> {
    let class = markov_equivalence_class(dag)?;
    let mut p = Pattern::empty(dag.labels().to_vec());
    for (a, b) in dag.skeleton() {
        p.add_undirected(a, b);
        if class.iter().all(|g| g.has_edge(a, b)) {
            p.dir[a][b] = true;
        } else if class.iter().all(|g| g.has_edge(b, a)) {
            p.dir[b][a] = true;
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_class() {
        let g = Dag::parse("a -> b\na -> c\nb -> d\nc -> d").unwrap();
        assert_eq!(markov_equivalence_class(&g).unwrap().len(), 3);
        let p = cpdag(&g).unwrap();
        assert_eq!(p.to_string(), "a--b a--c b->d c->d");
    }

    #[test]
    fn chain_class_is_undirected() {
        let g = Dag::parse("s0 -> s1 -> s2 -> s3").unwrap();
        assert_eq!(markov_equivalence_class(&g).unwrap().len(), 4);
        assert_eq!(cpdag(&g).unwrap().to_string(), "s0--s1 s1--s2 s2--s3");
    }

    #[test]
    fn cycle_detection_and_json() {
        let mut p = Pattern::empty(vec!["a".into(), "b".into(), "c".into()]);
        p.add_undirected(0, 1);
        p.add_undirected(1, 2);
        p.add_undirected(0, 2);
        p.orient(0, 1).unwrap();
        p.orient(1, 2).unwrap();
        assert!(p.directed_cycle().is_none());
        p.orient(2, 0).unwrap();
        assert!(p.directed_cycle().is_some());
        assert!(matches!(p.orient(1, 0), Err(Error::Inconsistent(0, 1))));
        let v: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(v["edges"].as_array().unwrap().len(), 3);
    }
}
