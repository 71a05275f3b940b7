use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Element;
use crate::pc::oracle::IndependenceOracle;
use crate::pc::pattern::Pattern;

/// Where separating sets for `a`, `b` are searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SearchScope {
    /// Every subset of the other nodes; recorded separating sets are of
    /// minimal size.
    Full,
    /// Subsets of the current neighbours of `a` or of `b`, level by level
    /// (the usual PC search, in its order-independent "stable" form). Never
    /// conditions on nodes that are already cut off from both ends.
    #[default]
    Adjacent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PcConfig {
    /// Largest conditioning set; `None` means all remaining nodes.
    pub max_conditioning: Option<usize>,
    pub scope: SearchScope,
}

/// Undirected adjacencies plus the separating set found for each removed
/// pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    labels: Vec<String>,
    adj: Vec<Element>,
    sepsets: BTreeMap<(usize, usize), Element>,
}

impl Skeleton {
    fn complete(labels: &[String]) -> Self {
        let n = labels.len();
        let all = Element::full(n);
        Skeleton {
            labels: labels.to_vec(),
            adj: (0..n).map(|i| all.minus(Element::singleton(i))).collect(),
            sepsets: BTreeMap::new(),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbours(&self, a: usize) -> Element {
        self.adj[a]
    }

    /// Adjacent pairs `(a, b)`, `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len()).flat_map(|a| self.adj[a].indices().filter(move |&b| b > a).map(move |b| (a, b))).collect()
    }

    pub fn sepset(&self, a: usize, b: usize) -> Option<Element> {
        self.sepsets.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn sepsets(&self) -> &BTreeMap<(usize, usize), Element> {
        &self.sepsets
    }

    fn separate(&mut self, a: usize, b: usize, by: Element) {
        self.adj[a] = self.adj[a].minus(Element::singleton(b));
        self.adj[b] = self.adj[b].minus(Element::singleton(a));
        self.sepsets.insert((a.min(b), a.max(b)), by);
    }
}

fn check_nodes<O: IndependenceOracle + ?Sized>(oracle: &O, labels: &[String]) -> Result<()> {
    if labels.len() < 2 {
        return Err(Error::Input("structure search needs at least two nodes".into()));
    }
    if oracle.node_count() < labels.len() {
        return Err(Error::Input(format!("oracle covers {} nodes, {} labelled", oracle.node_count(), labels.len())));
    }
    Ok(())
}

/// Removes `a – b` as soon as some conditioning set separates them. Sets are
/// tried by increasing size, lexicographically within a size, so a recorded
/// separating set is the first of minimal size.
pub fn pc_skeleton<O: IndependenceOracle + ?Sized>(oracle: &O, labels: &[String], cfg: &PcConfig) -> Result<Skeleton> {
    let (skel, err) = pc_skeleton_partial(oracle, labels, cfg);
    match err {
        Some(e) => Err(e),
        None => Ok(skel),
    }
}

/// Like [`pc_skeleton`], but on failure (e.g. an exhausted call budget) also
/// returns the skeleton reached so far: pairs not yet separated stay
/// adjacent.
pub fn pc_skeleton_partial<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    labels: &[String],
    cfg: &PcConfig,
) -> (Skeleton, Option<Error>) {
    let mut skel = Skeleton::complete(labels);
    if let Err(e) = check_nodes(oracle, labels) {
        return (skel, Some(e));
    }
    let r = match cfg.scope {
        SearchScope::Full => full_search(oracle, &mut skel, cfg),
        SearchScope::Adjacent => adjacent_search(oracle, &mut skel, cfg),
    };
    (skel, r.err())
}

fn full_search<O: IndependenceOracle + ?Sized>(oracle: &O, skel: &mut Skeleton, cfg: &PcConfig) -> Result<()> {
    let n = skel.len();
    for a in 0..n {
        for b in a + 1..n {
            let rest: Vec<usize> = (0..n).filter(|&v| v != a && v != b).collect();
            let max = cfg.max_conditioning.unwrap_or(rest.len()).min(rest.len());
            'sizes: for k in 0..=max {
                for u in rest.iter().copied().combinations(k) {
                    let u = Element::from_indices(u);
                    if oracle.query(Element::singleton(a), Element::singleton(b), u)?.independent {
                        skel.separate(a, b, u);
                        break 'sizes;
                    }
                }
            }
        }
    }
    Ok(())
}

fn adjacent_search<O: IndependenceOracle + ?Sized>(oracle: &O, skel: &mut Skeleton, cfg: &PcConfig) -> Result<()> {
    let n = skel.len();
    let max = cfg.max_conditioning.unwrap_or(n - 2);
    for level in 0..=max {
        let snapshot = skel.adj.clone();
        if (0..n).all(|v| snapshot[v].len() <= level) {
            break;
        }
        for (a, b) in skel.edges() {
            let mut tried = std::collections::HashSet::new();
            let ab = Element::singleton(a).join(Element::singleton(b));
            'sides: for side in [snapshot[a], snapshot[b]] {
                let cands: Vec<usize> = side.minus(ab).indices().collect();
                for u in cands.into_iter().combinations(level) {
                    let u = Element::from_indices(u);
                    if !tried.insert(u) {
                        continue;
                    }
                    if oracle.query(Element::singleton(a), Element::singleton(b), u)?.independent {
                        skel.separate(a, b, u);
                        break 'sides;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Orients `a → b ← c` for every non-adjacent `a`, `c` with common neighbour
/// `b` outside their separating set.
pub fn orient_v_structures(skel: &Skeleton) -> Result<Pattern> {
    let n = skel.len();
    let mut p = Pattern::empty(skel.labels.clone());
    for (a, b) in skel.edges() {
        p.add_undirected(a, b);
    }
    for a in 0..n {
        for c in a + 1..n {
            if skel.adjacent(a, c) {
                continue;
            }
            let common = skel.neighbours(a).meet(skel.neighbours(c));
            if common.is_empty() {
                continue;
            }
            let sep =
                skel.sepset(a, c).ok_or_else(|| Error::Internal(format!("no separating set recorded for {a}, {c}")))?;
            for b in common.indices().filter(|&b| !sep.contains(b)) {
                p.orient(a, b)?;
                p.orient(c, b)?;
            }
        }
    }
    Ok(p)
}

/// Closes the pattern under the four Meek rules.
pub fn propagate_orientations(mut p: Pattern) -> Result<Pattern> {
    let n = p.len();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i != j && p.undirected(i, j) && forced(&p, i, j) {
                    p.orient(i, j)?;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if let Some((a, b)) = p.directed_cycle() {
        return Err(Error::Inconsistent(a.min(b), a.max(b)));
    }
    Ok(p)
}

/// Whether some rule forces the undirected edge `i – j` into `i → j`.
fn forced(p: &Pattern, i: usize, j: usize) -> bool {
    let n = p.len();
    let nodes = || (0..n).filter(move |&k| k != i && k != j);
    // R1: k → i – j, k and j non-adjacent
    if nodes().any(|k| p.directed(k, i) && !p.adjacent(k, j)) {
        return true;
    }
    // R2: i → k → j
    if nodes().any(|k| p.directed(i, k) && p.directed(k, j)) {
        return true;
    }
    // R3: i – k → j and i – l → j, k and l non-adjacent
    let r3: Vec<usize> = nodes().filter(|&k| p.undirected(i, k) && p.directed(k, j)).collect();
    if r3.iter().array_combinations().any(|[&k, &l]| !p.adjacent(k, l)) {
        return true;
    }
    // R4: i – k → l → j, i adjacent to l, k and j non-adjacent
    nodes().any(|k| {
        p.undirected(i, k)
            && !p.adjacent(k, j)
            && nodes().any(|l| l != k && p.directed(k, l) && p.directed(l, j) && p.adjacent(i, l))
    })
}

/// Skeleton search, v-structures, then orientation propagation.
pub fn run_pc<O: IndependenceOracle + ?Sized>(oracle: &O, labels: &[String], cfg: &PcConfig) -> Result<Pattern> {
    let skel = pc_skeleton(oracle, labels, cfg)?;
    propagate_orientations(orient_v_structures(&skel)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Dag;
    use crate::pc::oracle::{Budgeted, DSepOracle};

    fn oracle(text: &str) -> (DSepOracle, Vec<String>) {
        let g = Dag::parse(text).unwrap();
        let labels = g.labels().to_vec();
        (DSepOracle::new(g), labels)
    }

    #[test]
    fn chain_and_collider_skeletons() {
        let (o, l) = oracle("a -> b -> c");
        let s = pc_skeleton(&o, &l, &PcConfig::default()).unwrap();
        assert_eq!(s.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(s.sepset(0, 2), Some(Element::singleton(1)));
        assert_eq!(run_pc(&o, &l, &PcConfig::default()).unwrap().to_string(), "a--b b--c");

        let (o, l) = oracle("a -> b\nc -> b");
        let s = pc_skeleton(&o, &l, &PcConfig::default()).unwrap();
        assert_eq!(s.sepset(0, 2), Some(Element::EMPTY));
        assert_eq!(run_pc(&o, &l, &PcConfig::default()).unwrap().to_string(), "a->b c->b");
    }

    #[test]
    fn meek_rule_one() {
        let mut p = Pattern::empty(vec!["a".into(), "b".into(), "c".into()]);
        p.add_undirected(0, 1);
        p.add_undirected(1, 2);
        p.orient(0, 1).unwrap();
        let p = propagate_orientations(p).unwrap();
        assert!(p.directed(1, 2));
    }

    #[test]
    fn undirected_tree_unchanged() {
        let mut p = Pattern::empty((0..4).map(|i| format!("x{i}")).collect());
        for (a, b) in [(0, 1), (1, 2), (1, 3)] {
            p.add_undirected(a, b);
        }
        assert_eq!(propagate_orientations(p.clone()).unwrap(), p);
    }

    #[test]
    fn budget_exhaustion_keeps_partial_state() {
        let (o, l) = oracle("a -> b -> c -> d");
        let b = Budgeted::new(o, 3);
        let (skel, err) = pc_skeleton_partial(&b, &l, &PcConfig::default());
        assert!(matches!(err, Some(Error::BudgetExhausted { budget: 3, .. })));
        assert_eq!(skel.edges().len(), 6);
    }

    #[test]
    fn full_scope_agrees_on_diamond() {
        let (o, l) = oracle("a -> b\na -> c\nb -> d\nc -> d");
        let cfg = PcConfig { scope: SearchScope::Full, ..PcConfig::default() };
        assert_eq!(run_pc(&o, &l, &cfg).unwrap().to_string(), "a--b a--c b->d c->d");
    }
}
