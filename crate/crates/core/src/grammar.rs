//! Greedy sequential grammar transform and grammar-length information.
//!
//! The input is consumed phrase by phrase: each phrase is the longest prefix
//! of the remaining input that equals the expansion of an existing variable
//! (a single terminal if none matches). The phrase symbol is appended to the
//! start rule, after which the grammar is reduced until no digram repeats
//! without overlap and every variable other than `s0` is used at least twice.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{Element, GroundSet};
use crate::lz::{element_concat, length_slack, set_concat, LzConfig, Symbol};
use crate::measure::{Exactness, InformationMeasure};

/// Submodularity slack of [`GrammarMeasure`] per bit of total input length;
/// the greedy transform violates submodularity more than LZ does.
pub const GR_SLACK_PER_BIT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GSym {
    Terminal(Symbol),
    Var(usize),
}

/// A straight-line grammar; rule `0` is the start variable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Grammar {
    rules: Vec<Vec<GSym>>,
}

impl Grammar {
    /// Rejects undefined and cyclic variable references.
    pub fn new(rules: Vec<Vec<GSym>>) -> Result<Self> {
        let g = Grammar { rules };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.rules.len()];
        for root in 0..self.rules.len() {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (r, ref mut pos)) = stack.last_mut() {
                if let Some(&sym) = self.rules[r].get(*pos) {
                    *pos += 1;
                    if let GSym::Var(v) = sym {
                        match state.get(v) {
                            None => return Err(Error::Structure(format!("s{r} references undefined s{v}"))),
                            Some(1) => return Err(Error::Structure(format!("s{v} is defined in terms of itself"))),
                            Some(0) => {
                                state[v] = 1;
                                stack.push((v, 0));
                            }
                            _ => {}
                        }
                    }
                } else {
                    state[r] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    pub fn rules(&self) -> &[Vec<GSym>] {
        &self.rules
    }

    /// Total number of symbols on right-hand sides.
    pub fn len(&self) -> usize {
        self.rules.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn expand(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        if !self.rules.is_empty() {
            self.expand_into(0, &mut out);
        }
        out
    }

    fn expand_into(&self, r: usize, out: &mut Vec<Symbol>) {
        for &s in &self.rules[r] {
            match s {
                GSym::Terminal(t) => out.push(t),
                GSym::Var(v) => self.expand_into(v, out),
            }
        }
    }

    /// Inverse of the `Display` form: lines `s<i> -> <symbols>`, rules in
    /// order, terminals as decimal codes.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (n, line) in text.lines().map(str::trim).filter(|l| !l.is_empty()).enumerate() {
            let (head, body) =
                line.split_once("->").ok_or_else(|| Error::Input(format!("rule {n}: missing '->' in {line:?}")))?;
            if head.trim() != format!("s{n}") {
                return Err(Error::Input(format!("rule {n}: expected head s{n}, found {:?}", head.trim())));
            }
            let syms = body
                .split_whitespace()
                .map(|tok| match tok.strip_prefix('s') {
                    Some(v) => v.parse().map(GSym::Var),
                    None => tok.parse().map(GSym::Terminal),
                })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Input(format!("rule {n}: {e}")))?;
            rules.push(syms);
        }
        Self::new(rules)
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, body) in self.rules.iter().enumerate() {
            write!(f, "s{i} ->")?;
            for s in body {
                match s {
                    GSym::Terminal(t) => write!(f, " {t}")?,
                    GSym::Var(v) => write!(f, " s{v}")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `|G(s)|`.
pub fn grammar_length(g: &Grammar) -> usize {
    g.len()
}

pub fn greedy_grammar_transform(s: &[Symbol]) -> Grammar {
    if s.is_empty() {
        return Grammar::default();
    }
    let mut b = Builder::new();
    let mut pos = 0;
    while pos < s.len() {
        let (sym, len) = b.longest_phrase(&s[pos..]);
        b.append(sym);
        pos += len;
    }
    b.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Sym {
    T(Symbol),
    V(usize),
    Guard(usize),
}

#[derive(Debug, Clone)]
struct Node {
    sym: Sym,
    prev: usize,
    next: usize,
    alive: bool,
}

#[derive(Debug, Clone)]
struct Rule {
    guard: usize,
    uses: usize,
    alive: bool,
    trie: usize,
}

/// Rule arena plus digram index and expansion trie.
struct Builder {
    nodes: Vec<Node>,
    rules: Vec<Rule>,
    digrams: HashMap<(Sym, Sym), usize>,
    pending: VecDeque<usize>,
    // trie over expansions: (node, terminal) -> child; marker = variable
    trie_children: HashMap<(usize, Symbol), usize>,
    trie_marker: Vec<Option<usize>>,
}

impl Builder {
    fn new() -> Self {
        let mut b = Builder {
            nodes: Vec::new(),
            rules: Vec::new(),
            digrams: HashMap::new(),
            pending: VecDeque::new(),
            trie_children: HashMap::new(),
            trie_marker: vec![None],
        };
        b.new_rule();
        b
    }

    fn new_rule(&mut self) -> usize {
        let r = self.rules.len();
        let g = self.nodes.len();
        self.nodes.push(Node { sym: Sym::Guard(r), prev: g, next: g, alive: true });
        self.rules.push(Rule { guard: g, uses: 0, alive: true, trie: 0 });
        r
    }

    fn first(&self, r: usize) -> usize {
        self.nodes[self.rules[r].guard].next
    }

    fn last(&self, r: usize) -> usize {
        self.nodes[self.rules[r].guard].prev
    }

    fn is_guard(&self, n: usize) -> bool {
        matches!(self.nodes[n].sym, Sym::Guard(_))
    }

    fn insert_after(&mut self, at: usize, sym: Sym) -> usize {
        let n = self.nodes.len();
        let next = self.nodes[at].next;
        self.nodes.push(Node { sym, prev: at, next, alive: true });
        self.nodes[at].next = n;
        self.nodes[next].prev = n;
        if let Sym::V(v) = sym {
            self.rules[v].uses += 1;
        }
        n
    }

    fn key(&self, n: usize) -> Option<(Sym, Sym)> {
        let next = self.nodes[n].next;
        if self.is_guard(n) || self.is_guard(next) {
            None
        } else {
            Some((self.nodes[n].sym, self.nodes[next].sym))
        }
    }

    /// Forget the digram starting at `n` if the index points at it. An
    /// overlapping twin (as in `aaa`) was shadowed by this entry, so the
    /// neighbours are checked again.
    fn forget(&mut self, n: usize) {
        if let Some(k) = self.key(n) {
            if self.digrams.get(&k) == Some(&n) {
                self.digrams.remove(&k);
                self.pending.push_back(self.nodes[n].prev);
                self.pending.push_back(self.nodes[n].next);
            }
        }
    }

    /// Links `left → right`, dropping the digram that started at `left`.
    fn join(&mut self, left: usize, right: usize) {
        self.forget(left);
        self.nodes[left].next = right;
        self.nodes[right].prev = left;
    }

    /// Unlinks `n`, releasing its variable use.
    fn remove(&mut self, n: usize) {
        let (prev, next) = (self.nodes[n].prev, self.nodes[n].next);
        self.forget(n);
        self.join(prev, next);
        self.nodes[n].alive = false;
        if let Sym::V(v) = self.nodes[n].sym {
            self.rules[v].uses -= 1;
        }
        self.pending.push_back(prev);
    }

    fn append(&mut self, sym: Sym) {
        let last = self.last(0);
        let n = self.insert_after(last, sym);
        self.pending.push_back(self.nodes[n].prev);
        self.reduce();
    }

    fn reduce(&mut self) {
        while let Some(n) = self.pending.pop_front() {
            if self.nodes[n].alive {
                self.check(n);
            }
        }
    }

    fn check(&mut self, n: usize) {
        let Some(k) = self.key(n) else { return };
        let m = match self.digrams.get(&k) {
            Some(&m) if m != n && self.nodes[m].alive && self.key(m) == Some(k) => m,
            _ => {
                self.digrams.insert(k, n);
                return;
            }
        };
        if self.nodes[m].next == n || self.nodes[n].next == m {
            return;
        }
        self.matched(n, m);
    }

    /// `n` and `m` start equal, non-overlapping digrams.
    fn matched(&mut self, n: usize, m: usize) {
        let m_prev = self.nodes[m].prev;
        let m_next = self.nodes[m].next;
        let reuse = match self.nodes[m_prev].sym {
            Sym::Guard(r) if r != 0 && self.is_guard(self.nodes[m_next].next) => Some(r),
            _ => None,
        };
        let r = match reuse {
            Some(r) => {
                self.substitute(n, r);
                r
            }
            None => {
                let (a, b) = (self.nodes[m].sym, self.nodes[m_next].sym);
                let r = self.new_rule();
                let g = self.rules[r].guard;
                let f = self.insert_after(g, a);
                self.insert_after(f, b);
                self.index_expansion(r);
                self.substitute(m, r);
                self.substitute(n, r);
                let f = self.first(r);
                if let Some(k) = self.key(f) {
                    self.digrams.insert(k, f);
                }
                r
            }
        };
        for end in [self.first(r), self.last(r)] {
            if let Sym::V(v) = self.nodes[end].sym {
                if self.rules[v].uses == 1 && self.rules[r].alive {
                    self.inline(end, v);
                }
            }
        }
    }

    /// Replaces the digram starting at `n` with a use of `r`.
    fn substitute(&mut self, n: usize, r: usize) {
        let prev = self.nodes[n].prev;
        let second = self.nodes[n].next;
        self.remove(second);
        self.remove(n);
        let v = self.insert_after(prev, Sym::V(r));
        self.pending.push_back(prev);
        self.pending.push_back(v);
    }

    /// Splices the body of `v` in place of its only use `n`.
    fn inline(&mut self, n: usize, v: usize) {
        let (left, right) = (self.nodes[n].prev, self.nodes[n].next);
        let (f, l) = (self.first(v), self.last(v));
        self.forget(left);
        self.forget(n);
        self.nodes[n].alive = false;
        self.rules[v].uses -= 1;
        self.join(left, f);
        self.join(l, right);
        let guard = self.rules[v].guard;
        self.nodes[guard].alive = false;
        self.rules[v].alive = false;
        let t = self.rules[v].trie;
        if self.trie_marker[t] == Some(v) {
            self.trie_marker[t] = None;
        }
        self.pending.push_back(left);
        self.pending.push_back(l);
    }

    fn trie_child(&mut self, node: usize, t: Symbol) -> usize {
        let next = self.trie_marker.len();
        let child = *self.trie_children.entry((node, t)).or_insert(next);
        if child == next {
            self.trie_marker.push(None);
        }
        child
    }

    fn expansion_of(&self, sym: Sym, out: &mut Vec<Symbol>) {
        match sym {
            Sym::T(t) => out.push(t),
            Sym::V(v) => {
                let mut n = self.first(v);
                while !self.is_guard(n) {
                    self.expansion_of(self.nodes[n].sym, out);
                    n = self.nodes[n].next;
                }
            }
            Sym::Guard(_) => {}
        }
    }

    /// Records the expansion of the two-symbol rule `r` in the trie.
    fn index_expansion(&mut self, r: usize) {
        let f = self.first(r);
        let (a, b) = (self.nodes[f].sym, self.nodes[self.nodes[f].next].sym);
        let mut node = match a {
            Sym::V(v) => self.rules[v].trie,
            Sym::T(t) => self.trie_child(0, t),
            Sym::Guard(_) => unreachable!("guards never occur in bodies"),
        };
        let mut tail = Vec::new();
        self.expansion_of(b, &mut tail);
        for t in tail {
            node = self.trie_child(node, t);
        }
        self.rules[r].trie = node;
        // equal expansions keep the earliest variable
        if self.trie_marker[node].is_none() {
            self.trie_marker[node] = Some(r);
        }
    }

    /// Longest prefix of `rest` that is the expansion of a live variable.
    fn longest_phrase(&self, rest: &[Symbol]) -> (Sym, usize) {
        let mut best = (Sym::T(rest[0]), 1);
        let mut node = 0;
        for (depth, &t) in rest.iter().enumerate() {
            match self.trie_children.get(&(node, t)) {
                Some(&c) => node = c,
                None => break,
            }
            if let Some(v) = self.trie_marker[node] {
                best = (Sym::V(v), depth + 1);
            }
        }
        best
    }

    fn finish(self) -> Grammar {
        let mut id = vec![usize::MAX; self.rules.len()];
        let live: Vec<usize> = (0..self.rules.len()).filter(|&r| self.rules[r].alive).collect();
        for (i, &r) in live.iter().enumerate() {
            id[r] = i;
        }
        let rules = live
            .iter()
            .map(|&r| {
                let mut body = Vec::new();
                let mut n = self.first(r);
                while !self.is_guard(n) {
                    body.push(match self.nodes[n].sym {
                        Sym::T(t) => GSym::Terminal(t),
                        Sym::V(v) => GSym::Var(id[v]),
                        Sym::Guard(_) => unreachable!(),
                    });
                    n = self.nodes[n].next;
                }
                body
            })
            .collect();
        Grammar { rules }
    }
}

/// Grammar-based information of a set of strings: `|G|` of the transform of
/// the canonical separated concatenation. Ordering and separators follow
/// [`crate::lz::set_concat`].
pub fn gr_set_info(xs: &[&[Symbol]], cfg: &LzConfig) -> Result<usize> {
    cfg.validate()?;
    Ok(greedy_grammar_transform(&set_concat(xs, cfg)?).len())
}

/// `R(X) = GR(X)` on a fixed collection of strings.
#[derive(Debug, Clone)]
pub struct GrammarMeasure {
    ground: GroundSet,
    strings: Vec<Vec<Symbol>>,
    cfg: LzConfig,
    slack: f64,
}

impl GrammarMeasure {
    /// Only the alphabet and separator settings of `cfg` are used.
    pub fn new(strings: Vec<Vec<Symbol>>, cfg: LzConfig) -> Result<Self> {
        cfg.validate()?;
        for s in &strings {
            cfg.check_symbols(s)?;
        }
        cfg.separator(strings.len().saturating_sub(1))?;
        let ground = GroundSet::indexed(strings.len())?;
        let slack = length_slack(&strings, GR_SLACK_PER_BIT);
        Ok(GrammarMeasure { ground, strings, cfg, slack })
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self
    }

    pub fn strings(&self) -> &[Vec<Symbol>] {
        &self.strings
    }
}

impl InformationMeasure for GrammarMeasure {
    type Value = i64;

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn evaluate(&self, e: Element) -> Result<i64> {
        self.ground.check(e)?;
        let s = element_concat(&self.strings, e, &self.cfg)?;
        Ok(greedy_grammar_transform(&s).len() as i64)
    }

    fn exactness(&self) -> Exactness {
        Exactness::Approximate { slack: self.slack }
    }

    fn name(&self) -> &str {
        "grammar"
    }
}
