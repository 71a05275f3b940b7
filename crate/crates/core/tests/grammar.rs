use std::collections::{HashMap, HashSet};

use infocausal::grammar::{gr_set_info, greedy_grammar_transform, GSym, Grammar, GrammarMeasure};
use infocausal::lz::{LzConfig, Symbol};
use infocausal::verify::verify_axioms;
use infocausal::InformationMeasure;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn expansions(g: &Grammar) -> Vec<Vec<Symbol>> {
    let mut memo: Vec<Option<Vec<Symbol>>> = vec![None; g.rules().len()];
    fn go(g: &Grammar, r: usize, memo: &mut Vec<Option<Vec<Symbol>>>) -> Vec<Symbol> {
        if let Some(e) = &memo[r] {
            return e.clone();
        }
        let mut out = Vec::new();
        for &s in &g.rules()[r] {
            match s {
                GSym::Terminal(t) => out.push(t),
                GSym::Var(v) => out.extend(go(g, v, memo)),
            }
        }
        memo[r] = Some(out.clone());
        out
    }
    (0..g.rules().len()).map(|r| go(g, r, &mut memo)).collect()
}

/// Irreducibility: variables used at least twice, no repeated
/// non-overlapping digram, distinct expansions.
fn assert_irreducible(g: &Grammar) {
    let mut uses = vec![0usize; g.rules().len()];
    let mut seen: HashMap<(GSym, GSym), (usize, usize)> = HashMap::new();
    for (r, body) in g.rules().iter().enumerate() {
        for (i, &s) in body.iter().enumerate() {
            if let GSym::Var(v) = s {
                uses[v] += 1;
            }
            if i + 1 < body.len() {
                let k = (s, body[i + 1]);
                match seen.get(&k) {
                    Some(&(r0, i0)) => assert!(r0 == r && i0 + 1 == i, "digram {k:?} repeats in\n{g}"),
                    None => {
                        seen.insert(k, (r, i));
                    }
                }
            }
        }
    }
    for (v, &u) in uses.iter().enumerate().skip(1) {
        assert!(u >= 2, "s{v} used {u} times in\n{g}");
    }
    let ex = expansions(g);
    let distinct: HashSet<&Vec<Symbol>> = ex.iter().collect();
    assert_eq!(distinct.len(), ex.len(), "duplicate expansions in\n{g}");
}

fn random_string(rng: &mut ChaCha8Rng, len: usize, alphabet: u8) -> Vec<Symbol> {
    (0..len).map(|_| rng.gen_range(0..alphabet)).collect()
}

#[test]
fn round_trip_many_random_strings() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..1000 {
        let len = rng.gen_range(0..=2000);
        let alphabet = [2, 3, 10][i % 3];
        let s = random_string(&mut rng, len, alphabet);
        let g = greedy_grammar_transform(&s);
        assert_eq!(g.expand(), s);
    }
}

#[test]
fn transforms_are_irreducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..300 {
        let len = rng.gen_range(1..400);
        let s = random_string(&mut rng, len, [2, 4][i % 2]);
        assert_irreducible(&greedy_grammar_transform(&s));
    }
}

#[test]
fn repetitive_input_is_fast_and_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let block = random_string(&mut rng, 5000, 10);
    let s: Vec<Symbol> = block.iter().chain(&block).chain(&block).chain(&block).copied().collect();
    let t = std::time::Instant::now();
    let g = greedy_grammar_transform(&s);
    assert!(t.elapsed().as_secs_f64() < 2.0);
    assert_eq!(g.expand(), s);
    let single = greedy_grammar_transform(&block).len();
    assert!(g.len() < 2 * single, "{} vs {single}", g.len());
}

#[test]
fn gr_monotone_under_extension() {
    let cfg = LzConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let family: Vec<Vec<Symbol>> = (0..4)
            .map(|_| {
                let n = rng.gen_range(20..200);
                random_string(&mut rng, n, 10)
            })
            .collect();
        let refs: Vec<&[Symbol]> = family.iter().map(Vec::as_slice).collect();
        for k in 1..refs.len() {
            assert!(gr_set_info(&refs[..k], &cfg).unwrap() <= gr_set_info(&refs[..k + 1], &cfg).unwrap());
        }
    }
}

proptest! {
    #[test]
    fn round_trip(s in prop::collection::vec(0u8..3, 0..300)) {
        let g = greedy_grammar_transform(&s);
        prop_assert_eq!(g.expand(), s);
        prop_assert_eq!(Grammar::parse(&g.to_string()).unwrap(), g);
    }
}

#[test]
fn axiom_violations_stay_within_declared_slack() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for i in 0..40 {
        let alphabet = [2, 10][i % 2];
        let max_len = [50, 300, 1000][i % 3];
        let k = rng.gen_range(2..=5);
        let strings: Vec<Vec<Symbol>> = (0..k)
            .map(|_| {
                let len = rng.gen_range(1..=max_len);
                random_string(&mut rng, len, alphabet)
            })
            .collect();
        let m = GrammarMeasure::new(strings, LzConfig::default()).unwrap();
        let rep = verify_axioms(&m, m.exactness().slack()).unwrap();
        assert!(rep.is_clean(), "{:?}", rep.violations.first());
    }
}
