//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 10–12 need a plain-text English corpus of at least a million
//! symbols, read from `$INFOCAUSAL_CORPUS` or `data/corpus.txt` at the
//! workspace root (see `scripts/fetch_corpus.sh`). Experiments and their
//! calibrations run with the default seed 0.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use infocausal::experiment::{
    calibrate, records_to_csv, run_exp1, run_exp2, summarize, CalibrationConfig, Exp1Config, Exp2Config,
    TextMeasureKind, TrialRecord,
};
use infocausal::grammar::{grammar_length, greedy_grammar_transform};
use infocausal::graph::{all_dags, functional_model_check, markov_report, Dag, EnumerationGuard, FunctionalTolerances};
use infocausal::lz::{exhaustive_history, functional_concat, lz_cmi_asymmetric, LzConfig, LzMeasure, Symbol};
use infocausal::measures::{random_distribution, JointTable, PeriodObservations, StructuralModel};
use infocausal::pc::{cpdag, run_pc, DSepOracle, PcConfig};
use infocausal::textpipe::{Corpus, GraphId, LengthRange, Transformer, DEFAULT_PERTURB_RATE};
use infocausal::verify::{verify_axioms, verify_chain_rule, verify_semigraphoid};
use infocausal::{cond_mutual_info, Element, ExactLcmMeasure, InformationMeasure, RationalSubspaces, Shannon};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn report(id: u32, name: &str, pass: bool, detail: &str, elapsed: Duration) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    // straight to the handle, which the test harness does not capture
    let _ = writeln!(std::io::stderr(), "criterion {id:>2} {verdict}: {name} — {detail} [{elapsed:.2?}]");
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn digits(s: &str) -> Vec<Symbol> {
    s.bytes().map(|b| b - b'0').collect()
}

fn random_string(rng: &mut ChaCha8Rng, len: usize, alphabet: u8) -> Vec<Symbol> {
    (0..len).map(|_| rng.gen_range(0..alphabet)).collect()
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get()).max(4)
}

fn corpus() -> Result<Corpus, String> {
    let path = std::env::var_os("INFOCAUSAL_CORPUS")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/corpus.txt"));
    let c = Corpus::read(&path).map_err(|e| {
        format!("no corpus at {} ({e}); run scripts/fetch_corpus.sh or set INFOCAUSAL_CORPUS", path.display())
    })?;
    if c.len() < 1_000_000 {
        return Err(format!("corpus {} has only {} symbols", path.display(), c.len()));
    }
    Ok(c)
}

/// Fastest of a few runs, to keep scheduler noise out of sub-millisecond budgets.
fn best_of<T>(runs: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..runs {
        let t = Instant::now();
        let v = f();
        best = best.min(t.elapsed());
        out = Some(v);
    }
    (out.unwrap(), best)
}

#[test]
fn c01_lz_example() {
    let s = digits("000100101100110");
    let (h, elapsed) = best_of(5, || exhaustive_history(&s, &LzConfig::default()).unwrap());
    let parts: Vec<String> = h.components(&s).map(|p| p.iter().map(|d| char::from(b'0' + d)).collect()).collect();
    let ok = h.len() == 5 && parts == ["0", "001", "00101", "10011", "0"] && elapsed < Duration::from_millis(1);
    report(1, "LZ conformance", ok, &format!("c = {}, components ({})", h.len(), parts.join(")(")), elapsed);
}

#[test]
fn c02_grammar_example() {
    let s = digits("1001110001000");
    let (g, elapsed) = best_of(5, || greedy_grammar_transform(&s));
    let text = g.to_string();
    let ok = grammar_length(&g) == 10
        && text == "s0 -> s1 1 1 s2 s2\ns1 -> 1 0 0\ns2 -> s1 0\n"
        && g.expand() == s
        && elapsed < Duration::from_millis(1);
    report(2, "grammar conformance", ok, &format!("|G| = {}, rules {:?}", grammar_length(&g), text.trim()), elapsed);
}

#[test]
fn c03_asymmetric_cmi_bound() {
    let t = Instant::now();
    let cfg = LzConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let triples: Vec<_> = (0..10_000)
        .map(|_| {
            let mut pick = || {
                let len = rng.gen_range(0..=200);
                random_string(&mut rng, len, 2)
            };
            (pick(), pick(), pick())
        })
        .collect();
    let values: Vec<i64> = triples.par_iter().map(|(x, y, z)| lz_cmi_asymmetric(x, y, z, &cfg).unwrap()).collect();
    let exceptions = values.iter().filter(|&&v| v < -1).count();
    let worst = values.iter().min().unwrap();
    let elapsed = t.elapsed();
    let ok = exceptions == 0 && elapsed < Duration::from_secs(60);
    report(
        3,
        "asymmetric CMI ≥ −1",
        ok,
        &format!("10000 binary triples, {exceptions} exceptions, min {worst}"),
        elapsed,
    );
}

#[test]
fn c04_functional_concat_bound() {
    let t = Instant::now();
    let cfg = LzConfig::unbounded();
    // the raw parser needs the separators inside the alphabet
    let wide = LzConfig { alphabet_size: 12, separators: vec![], ..cfg.clone() };
    let (alpha, beta) = (10, 11);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let instances: Vec<_> = (0..1000)
        .map(|_| {
            let pa_len = rng.gen_range(0..=1000);
            let pa = random_string(&mut rng, pa_len, 10);
            let n_len = rng.gen_range(1..=1000);
            let n = random_string(&mut rng, n_len, 10);
            let k = rng.gen_range(1..=20);
            let x = functional_concat(&pa, &n, k, &mut rng).unwrap().output;
            (pa, n, k, x)
        })
        .collect();
    let exceptions = instances
        .par_iter()
        .filter(|(pa, n, k, x)| {
            let mut prefix = pa.clone();
            prefix.push(alpha);
            prefix.extend(n);
            prefix.push(beta);
            let mut full = prefix.clone();
            full.extend(x);
            let c = |s: &[Symbol]| exhaustive_history(s, &wide).unwrap().len();
            c(&full) > c(&prefix) + k
        })
        .count();
    let elapsed = t.elapsed();
    let ok = exceptions == 0 && elapsed < Duration::from_secs(60);
    report(4, "functional concatenation bound", ok, &format!("1000 instances, {exceptions} exceptions"), elapsed);
}

#[test]
fn c05_exact_measure_axioms() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut shannon_bad = 0;
    for _ in 0..100 {
        let cards: Vec<usize> = (0..4).map(|_| rng.gen_range(2..=3)).collect();
        let size = cards.iter().product();
        let names = (0..4).map(|i| format!("v{i}")).collect();
        let m = Shannon::new(JointTable::new(names, cards, random_distribution(size, &mut rng)).unwrap());
        if !verify_axioms(&m, 1e-9).unwrap().is_clean() || !verify_semigraphoid(&m, 1e-9).unwrap().is_clean() {
            shannon_bad += 1;
        }
    }
    let tuples: Vec<Vec<u64>> = (0..1000)
        .map(|_| {
            let n = rng.gen_range(2..=5);
            (0..n).map(|_| rng.gen_range(1..=10_000)).collect()
        })
        .collect();
    let lcm_bad = tuples
        .par_iter()
        .filter(|vals| {
            let m = ExactLcmMeasure::new(PeriodObservations::new(vals.to_vec()).unwrap());
            let axioms = verify_axioms(&m, 0.0).unwrap();
            !axioms.is_clean()
                || axioms.tight_pairs != axioms.submodular_pairs
                || !verify_semigraphoid(&m, 0.0).unwrap().is_clean()
        })
        .count();
    let elapsed = t.elapsed();
    let ok = shannon_bad == 0 && lcm_bad == 0 && elapsed < Duration::from_secs(120);
    let detail = format!("Shannon: {shannon_bad}/100 with violations; lcm: {lcm_bad}/1000 with violations or slack");
    report(5, "exact-measure axioms", ok, &detail, elapsed);
}

/// A 5-node model: `g` plus a hidden node `h` (index 4) pointing into the
/// non-adjacent pair `(u, v)`.
fn confounded_model(g: &Dag, u: usize, v: usize, rng: &mut ChaCha8Rng) -> Shannon {
    let mut edges = g.edges();
    edges.extend([(4, u), (4, v)]);
    let mut labels = g.labels().to_vec();
    labels.push("h".into());
    let full = Dag::from_edges(labels, &edges).unwrap();
    let model = StructuralModel::default();
    loop {
        let m = Shannon::new(model.sample(&full, rng).unwrap());
        let h = Element::singleton(4);
        let reaches = |x: usize| {
            let pa = g.parents(x);
            cond_mutual_info(&m, h, Element::singleton(x), pa).unwrap() > 1e-6
        };
        let pa = g.parents(u).join(g.parents(v));
        let induced = cond_mutual_info(&m, Element::singleton(u), Element::singleton(v), pa).unwrap();
        if reaches(u) && reaches(v) && induced > 1e-6 {
            return m;
        }
    }
}

#[test]
fn c06_markov_equivalence() {
    let t = Instant::now();
    let dags = all_dags(4).unwrap();
    let guard = EnumerationGuard::default();
    let disagreements = dags
        .par_iter()
        .enumerate()
        .filter(|(i, g)| {
            let mut rng = ChaCha8Rng::seed_from_u64(600 + *i as u64);
            let m = Shannon::new(StructuralModel::default().sample(g, &mut rng).unwrap());
            let r = markov_report(g, &m, 1e-9, guard).unwrap();
            !(r.local_pass() && r.decomposition_pass() && r.global_pass())
        })
        .count();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let candidates: Vec<(Dag, usize, usize)> = dags
        .iter()
        .flat_map(|g| {
            (0..4)
                .flat_map(move |u| (u + 1..4).map(move |v| (u, v)))
                .filter(|&(u, v)| !g.adjacent(u, v))
                .map(|(u, v)| (g.clone(), u, v))
        })
        .collect();
    let picks: Vec<_> = candidates.choose_multiple(&mut rng, 50).cloned().collect();
    let mut not_all_failing = 0;
    for (g, u, v) in &picks {
        let m = confounded_model(g, *u, *v, &mut rng);
        let r = markov_report(g, &m, 1e-9, guard).unwrap();
        if r.local_pass() || r.decomposition_pass() || r.global_pass() {
            not_all_failing += 1;
        }
    }
    let elapsed = t.elapsed();
    let ok = dags.len() == 543 && disagreements == 0 && not_all_failing == 0 && elapsed < Duration::from_secs(600);
    let detail = format!(
        "{} DAGs, {disagreements} without a joint pass; 50 confounded models, {not_all_failing} without a joint failure",
        dags.len()
    );
    report(6, "local ⇔ decomposition ⇔ global", ok, &detail, elapsed);
}

struct FunctionalTally {
    models: usize,
    premises: usize,
    exceptions: usize,
    worst_ratio: f64,
}

impl FunctionalTally {
    fn add(&mut self, r: &infocausal::graph::FunctionalReport) {
        self.models += 1;
        if let Some(local) = &r.local_markov {
            self.premises += 1;
            if local.iter().any(|e| !e.pass) {
                self.exceptions += 1;
            }
            if r.tolerances.markov > 0.0 {
                for e in local {
                    self.worst_ratio = self.worst_ratio.max(e.cmi / r.tolerances.markov);
                }
            }
        }
    }
}

fn shuffled_prime_pool(rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut primes = vec![2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
    primes.shuffle(rng);
    primes
}

#[test]
fn c07_functional_models() {
    let t = Instant::now();
    let dags = all_dags(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise: Vec<Element> = (4..8).map(Element::singleton).collect();
    let mut tally = FunctionalTally { models: 0, premises: 0, exceptions: 0, worst_ratio: 0.0 };

    // Shannon: x_j = f_j(pa_j, n_j) with independent noises
    for _ in 0..70 {
        let g = dags.choose(&mut rng).unwrap();
        let m = Shannon::new(StructuralModel::default().sample(g, &mut rng).unwrap());
        let tol = FunctionalTolerances::derived(1e-9, 1e-9, g.len(), 0.0);
        tally.add(&functional_model_check(g, &m, &noise, tol).unwrap());
    }

    // lcm: noises are products of private primes; x_j divides lcm(pa_j, n_j)
    for _ in 0..65 {
        let g = dags.choose(&mut rng).unwrap();
        let pool = shuffled_prime_pool(&mut rng);
        let noises: Vec<u64> =
            (0..4).map(|j| pool[2 * j] * if rng.gen_bool(0.5) { pool[2 * j + 1] } else { 1 }).collect();
        let mut xs = [0u64; 4];
        for &j in &g.topological_order() {
            let mut x = noises[j];
            for p in g.parents(j).indices() {
                for q in &pool {
                    if xs[p] % q == 0 && rng.gen_bool(0.6) {
                        x = num_integer::lcm(x, *q);
                    }
                }
            }
            xs[j] = x;
        }
        let mut vals = xs.to_vec();
        vals.extend(&noises);
        let m = ExactLcmMeasure::new(PeriodObservations::new(vals).unwrap());
        tally.add(&functional_model_check(g, &m, &noise, FunctionalTolerances::uniform(0.0)).unwrap());
    }

    // LZ: each x_j concatenates up to 6 substrings of its parents and noise.
    // Equality holds up to k plus the slack; the noise tolerance is the 0.99
    // quantile of the same statistic on fresh independent noise quadruples.
    let cfg = LzConfig::unbounded();
    let noise_strings = |rng: &mut ChaCha8Rng| -> Vec<Vec<Symbol>> {
        (0..4)
            .map(|_| {
                let len = rng.gen_range(100..=400);
                random_string(rng, len, 10)
            })
            .collect()
    };
    let mut null: Vec<f64> = (0..200)
        .map(|_| {
            let ns = noise_strings(&mut rng);
            let m = LzMeasure::new(ns, cfg.clone()).unwrap();
            (0..4)
                .map(|j| {
                    let me = Element::singleton(j);
                    cond_mutual_info(&m, me, Element::full(4).minus(me), Element::EMPTY).unwrap() as f64
                })
                .fold(f64::MIN, f64::max)
        })
        .collect();
    null.sort_by(f64::total_cmp);
    let noise_tol = infocausal::experiment::quantile(&null, 0.99);
    const K_MAX: usize = 6;
    for _ in 0..65 {
        let g = dags.choose(&mut rng).unwrap();
        let ns = noise_strings(&mut rng);
        let mut xs: Vec<Vec<Symbol>> = vec![Vec::new(); 4];
        for &j in &g.topological_order() {
            let pa: Vec<Symbol> = g.parents(j).indices().flat_map(|p| xs[p].clone()).collect();
            let k = rng.gen_range(1..=K_MAX);
            xs[j] = functional_concat(&pa, &ns[j], k, &mut rng).unwrap().output;
        }
        xs.extend(ns);
        let m = LzMeasure::new(xs, cfg.clone()).unwrap();
        let slack = m.exactness().slack();
        let tol = FunctionalTolerances::derived(K_MAX as f64 + slack, noise_tol, g.len(), slack);
        tally.add(&functional_model_check(g, &m, &noise, tol).unwrap());
    }

    let elapsed = t.elapsed();
    let ok = tally.models == 200 && tally.exceptions == 0;
    let detail = format!(
        "{} models, premises held in {}, {} Markov failures; largest CMI is {:.0}% of its tolerance",
        tally.models,
        tally.premises,
        tally.exceptions,
        100.0 * tally.worst_ratio
    );
    report(7, "functional model ⇒ local Markov", ok, &detail, elapsed);
}

#[test]
fn c08_pc_with_dsep_oracle() {
    let t = Instant::now();
    let cfg = PcConfig::default();
    let mut total = 0;
    let mut wrong = 0;
    // a single node has nothing to search
    for n in 2..=5 {
        let dags = all_dags(n).unwrap();
        total += dags.len();
        wrong += dags
            .par_iter()
            .filter(|g| run_pc(&DSepOracle::new((*g).clone()), g.labels(), &cfg).unwrap() != cpdag(g).unwrap())
            .count();
    }
    let elapsed = t.elapsed();
    let ok = wrong == 0 && elapsed < Duration::from_secs(300);
    report(8, "PC recovers the CPDAG", ok, &format!("{total} DAGs on 2–5 nodes, {wrong} mismatches"), elapsed);
}

#[test]
fn c09_chain_rule_counterexample() {
    let t = Instant::now();
    let f = RationalSubspaces::chain_rule_counterexample();
    let (a, b, c) = (Element::singleton(0), Element::singleton(1), Element::singleton(2));
    let residual = verify_chain_rule(&f, a, b, c, Element::EMPTY).unwrap();
    report(9, "subspace chain-rule residual", residual != 0, &format!("residual {residual}"), t.elapsed());
}

fn percent(records: &[TrialRecord]) -> (usize, usize) {
    let s = summarize(records).unwrap();
    (s.correct, s.trials)
}

#[test]
fn c10_four_node_networks() {
    let t = Instant::now();
    let corpus = match corpus() {
        Ok(c) => c,
        Err(e) => return report(10, "four-node networks", false, &e, t.elapsed()),
    };
    let lengths = LengthRange::new(300, 500).unwrap();
    let threshold = |kind| {
        let mut c = CalibrationConfig::segments(kind, lengths);
        c.jobs = jobs();
        calibrate(&corpus, &c).unwrap().threshold
    };
    let run = |graph, kind, thr| {
        let mut cfg = Exp2Config::new(graph, kind, lengths, thr);
        cfg.trials = 50;
        cfg.jobs = jobs();
        percent(&run_exp2(corpus.symbols(), &cfg).unwrap())
    };
    let (lz_thr, gr_thr) = (threshold(TextMeasureKind::Lz), threshold(TextMeasureKind::Grammar));
    let lz_b = run(GraphId::B, TextMeasureKind::Lz, lz_thr);
    let lz_a = run(GraphId::A, TextMeasureKind::Lz, lz_thr);
    let gr_a = run(GraphId::A, TextMeasureKind::Grammar, gr_thr);
    let elapsed = t.elapsed();
    let ok = lz_b.0 * 5 >= lz_b.1 * 4 && lz_a.0 * 5 >= lz_a.1 * 4 && gr_a.0 < lz_a.0;
    let detail = format!(
        "LZ (threshold {lz_thr}): graph b {}/{}, graph a {}/{}; GR (threshold {gr_thr}): graph a {}/{}",
        lz_b.0, lz_b.1, lz_a.0, lz_a.1, gr_a.0, gr_a.1
    );
    report(10, "four-node networks", ok, &detail, elapsed);
}

#[test]
fn c11_perturbation_chain() {
    let t = Instant::now();
    let corpus = match corpus() {
        Ok(c) => c,
        Err(e) => return report(11, "perturbation chain", false, &e, t.elapsed()),
    };
    let transformer = Transformer::Perturb { rate: DEFAULT_PERTURB_RATE };
    let mut cfg = Exp1Config::new(TextMeasureKind::Lz, transformer.clone(), 0.0);
    let mut cal = CalibrationConfig::fork(TextMeasureKind::Lz, transformer, cfg.source_len);
    cal.jobs = jobs();
    cfg.threshold = calibrate(&corpus, &cal).unwrap().threshold;
    cfg.trials = 10;
    cfg.jobs = jobs();
    let (correct, trials) = percent(&run_exp1(&corpus, &cfg).unwrap());
    let detail = format!("k = 3, threshold {}, chain recovered in {correct}/{trials}", cfg.threshold);
    report(11, "perturbation chain", correct >= 8, &detail, t.elapsed());
}

#[test]
fn c12_parallel_determinism() {
    let t = Instant::now();
    let corpus = match corpus() {
        Ok(c) => c,
        Err(e) => return report(12, "parallel determinism", false, &e, t.elapsed()),
    };
    let csv = |jobs| {
        let mut cfg = Exp2Config::new(GraphId::B, TextMeasureKind::Lz, LengthRange::new(300, 500).unwrap(), 29.0);
        cfg.trials = 16;
        cfg.jobs = jobs;
        records_to_csv(&run_exp2(corpus.symbols(), &cfg).unwrap()).unwrap()
    };
    let (one, eight) = (csv(1), csv(8));
    let ok = one == eight && one.lines().count() == 17;
    report(
        12,
        "parallel determinism",
        ok,
        &format!("{} CSV bytes, identical: {}", one.len(), one == eight),
        t.elapsed(),
    );
}
