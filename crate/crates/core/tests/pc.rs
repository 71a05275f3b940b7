use std::collections::HashMap;

use infocausal::graph::{all_dags, Dag};
use infocausal::measures::PeriodObservations;
use infocausal::pc::{
    cpdag, pc_skeleton, run_pc, DSepOracle, IndependenceOracle, LoggingOracle, MeasureOracle, Pattern, PcConfig,
    ReplayOracle, SearchScope,
};
use infocausal::{Element, LcmMeasure};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn check_all(n: usize, cfg: PcConfig) {
    let dags = all_dags(n).unwrap();
    // CPDAG depends only on skeleton and v-structures
    let mut classes: HashMap<(Vec<(usize, usize)>, Vec<(usize, usize, usize)>), Pattern> = HashMap::new();
    for g in &dags {
        classes.entry((g.skeleton(), g.v_structures())).or_insert_with(|| cpdag(g).unwrap());
    }
    let failures: Vec<String> = dags
        .par_iter()
        .filter_map(|g| {
            let labels = g.labels().to_vec();
            let p = run_pc(&DSepOracle::new(g.clone()), &labels, &cfg).unwrap();
            let want = &classes[&(g.skeleton(), g.v_structures())];
            (p != *want).then(|| format!("{g}: got {p}, want {want}"))
        })
        .collect();
    assert!(failures.is_empty(), "{} mismatches, e.g. {}", failures.len(), failures[0]);
}

#[test]
fn recovers_cpdag_of_every_small_dag() {
    for n in 2..=5 {
        check_all(n, PcConfig::default());
    }
}

#[test]
fn full_search_on_small_dags() {
    for n in 2..=5 {
        check_all(n, PcConfig { scope: SearchScope::Full, ..PcConfig::default() });
    }
}

#[test]
fn sepsets_are_cardinality_minimal() {
    for g in all_dags(4).unwrap() {
        let labels = g.labels().to_vec();
        let full = PcConfig { scope: SearchScope::Full, ..PcConfig::default() };
        let skel = pc_skeleton(&DSepOracle::new(g.clone()), &labels, &full).unwrap();
        for (&(a, b), &sep) in skel.sepsets() {
            let (sa, sb) = (Element::singleton(a), Element::singleton(b));
            let rest = g.nodes().minus(sa).minus(sb);
            let smallest = rest.subsets().filter(|&u| g.d_separated(sa, sb, u).unwrap()).map(|u| u.len()).min();
            assert_eq!(Some(sep.len()), smallest);
            assert!(g.d_separated(sa, sb, sep).unwrap());
        }
    }
}

#[test]
fn relabeling_permutes_output() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let dags = all_dags(5).unwrap();
    for _ in 0..300 {
        let g = dags.choose(&mut rng).unwrap();
        let mut perm: Vec<usize> = (0..5).collect();
        perm.shuffle(&mut rng);
        let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let mut labels = vec![String::new(); 5];
        for i in 0..5 {
            labels[perm[i]] = g.label(i).to_string();
        }
        let h = Dag::from_edges(labels.clone(), &edges).unwrap();
        let p = run_pc(&DSepOracle::new(g.clone()), g.labels(), &PcConfig::default()).unwrap();
        let q = run_pc(&DSepOracle::new(h), &labels, &PcConfig::default()).unwrap();
        assert_eq!(p.permuted(&perm), q);
    }
}

#[test]
fn replaying_the_log_reproduces_the_pattern() {
    // periods: d combines the factors of coprime a and b plus its own 17
    let obs = PeriodObservations::new([4 * 9, 5 * 7, 11 * 13, 4 * 9 * 5 * 7 * 17]).unwrap();
    let m = LcmMeasure::new(obs);
    let oracle = LoggingOracle::new(MeasureOracle::new(m, 4, 1e-9).unwrap());
    let labels: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let p = run_pc(&oracle, &labels, &PcConfig::default()).unwrap();
    assert_eq!(p.to_string(), "a->d b->d");
    let calls = oracle.calls();
    assert!(!calls.is_empty());
    let replay = ReplayOracle::new(4, &calls);
    assert_eq!(run_pc(&replay, &labels, &PcConfig::default()).unwrap(), p);
    let csv = oracle.to_csv(&labels).unwrap();
    assert_eq!(csv.lines().count(), calls.len() + 1);
    assert!(csv.starts_with("s,t,conditioning,cmi,threshold,independent"));
    assert!(replay.query(Element::singleton(0), Element::singleton(1), Element::full(4)).is_err());
}

#[test]
fn experiment_graph_b_colliders() {
    let g = Dag::parse("a -> c\nb -> c\na -> d\nb -> d").unwrap();
    let p = run_pc(&DSepOracle::new(g.clone()), g.labels(), &PcConfig::default()).unwrap();
    assert_eq!(p, Pattern::from_dag(&g));
}
