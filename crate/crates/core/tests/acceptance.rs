//! Acceptance suite: one PASS/FAIL line per criterion, tolerances and
//! budgets pinned below. Runs as a plain binary so the lines always print.

#[path = "oracles/failure_bound_grid.rs"]
mod grid;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rsra_core::analysis::{
    self, BoundExponent, BoundInputs, DistanceBound, Ratio, LEMMA1_DEFAULT_BUDGET,
};
use rsra_core::f2::{BitVec, F2Matrix};
use rsra_core::pauli::{PauliOp, StabilizerCode};
use rsra_core::rsra::{self, ConversionPath, RsraConfig, SearchError};
use rsra_core::sim::{self, Axis, LogicalFrame, LogicalSpec, Outcome, OutcomeSchedule};
use rsra_core::{catalog, circuit, fixtures};

const SEED: u64 = 0x5EED;
const DISTANCE: usize = 3;
const TABLE1_GATES: usize = 17;
const SEARCH_RETRIES: usize = 10_000;
const MC_SAMPLES: u64 = 1_000_000;
const MC_SIGMAS: f64 = 4.0;
const LEMMA2_PAIRS: usize = 100;
const LEMMA2_BASIS_CHANGES: usize = 5;
const SIM_SEEDS: usize = 20;
const INJECT_CAP: usize = 2;
const BOUND_DIGITS: i32 = 12;

const BUDGET_TABLE1: Duration = Duration::from_secs(1);
const BUDGET_TABLE23: Duration = Duration::from_secs(5);
const BUDGET_SEARCH: Duration = Duration::from_secs(30 * 60);
const BUDGET_LEMMA2: Duration = Duration::from_secs(60);
const BUDGET_CHANNEL: Duration = Duration::from_secs(1);
const BUDGET_SIM: Duration = Duration::from_secs(10);

struct Verdict {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn fixture_path(text: &str) -> ConversionPath {
    rsra::build_path(&rsra::load_fixture_decomposition(text).expect("fixture loads"))
        .expect("fixture path builds")
}

fn within(elapsed: Duration, budget: Duration) -> bool {
    elapsed <= budget
}

fn table1() -> Verdict {
    let start = Instant::now();
    let path = fixture_path(fixtures::TABLE1);
    let v = analysis::verify_path(&path, DISTANCE);
    let distances: Vec<DistanceBound> = v.reports.iter().map(|r| r.distance).collect();
    let gates = circuit::gate_count(&path);
    let elapsed = start.elapsed();
    let exact = distances.len() == 6 && distances.iter().all(|&d| d == DistanceBound::Exact(3));
    check(
        exact
            && gates == TABLE1_GATES
            && path.check_adjacency().is_ok()
            && within(elapsed, BUDGET_TABLE1),
        format!("distances {distances:?}, {gates} gates, {elapsed:.2?}"),
    )
}

fn table2() -> Verdict {
    let start = Instant::now();
    let dec = rsra::load_fixture_decomposition(fixtures::TABLE2).expect("fixture loads");
    let path = rsra::build_path(&dec).expect("path builds");
    let v = analysis::verify_path(&path, DISTANCE);
    let left: PauliOp = "XXXXXXXXX".parse().unwrap();
    let right: PauliOp = "XXXXXXXII".parse().unwrap();
    let product = left.multiply(&right).unwrap();
    let bridged = dec.gbars == vec![product.clone()];
    let elapsed = start.elapsed();
    check(
        path.n == 9
            && v.pass
            && bridged
            && path.check_adjacency().is_ok()
            && within(elapsed, BUDGET_TABLE23),
        format!(
            "n = {}, verified {}, bridge {:?} (expected {product}), {elapsed:.2?}",
            path.n, v.pass, dec.gbars
        ),
    )
}

fn table3() -> Verdict {
    let start = Instant::now();
    let path = fixture_path(fixtures::TABLE3);
    let v = analysis::verify_path(&path, DISTANCE);
    let elapsed = start.elapsed();
    check(
        path.m == 2
            && path.n == 9
            && v.pass
            && path.check_adjacency().is_ok()
            && within(elapsed, BUDGET_TABLE23),
        format!(
            "m = {}, n = {}, verified {}, {elapsed:.2?}",
            path.m, path.n, v.pass
        ),
    )
}

fn minimal_ancilla() -> Verdict {
    let start = Instant::now();
    let s = catalog::steane7();
    let sp = catalog::resolve("perm(steane7,(34))").unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for m in 0..=2 {
        let config = RsraConfig {
            m,
            seed: SEED,
            max_retries: SEARCH_RETRIES,
            min_distance: DISTANCE,
            gbar_weight_search: 0,
        };
        match rsra::search(&s, &sp, &config) {
            Ok(found) => {
                pass &= m == 2;
                parts.push(format!("m = {m}: found at draw {}", found.retry));
            }
            Err(SearchError::Exhausted { error, .. }) => {
                pass &= m < 2;
                parts.push(format!("m = {m}: {error}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("m = {m}: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        pass && within(elapsed, BUDGET_SEARCH),
        format!("{}; {elapsed:.2?}", parts.join("; ")),
    )
}

fn unit(n: usize, bits: &[usize]) -> BitVec {
    BitVec::from_bools((0..n).map(|i| bits.contains(&i)))
}

fn lemma1() -> Verdict {
    let n = 3;
    let orthogonal = [
        (vec![0], vec![1]),
        (vec![0], vec![2]),
        (vec![0, 1], vec![2]),
        (vec![0, 1], vec![0, 1, 2]),
        (vec![1, 2], vec![0]),
        (vec![0, 1, 2], vec![0, 2]),
    ];
    let closed = analysis::lemma1_exact(n).unwrap();
    let expected = Ratio::new(5, 21);
    let mut pass = closed == expected;
    for (v, w) in &orthogonal {
        let r =
            analysis::lemma1_enumerate(n, &unit(n, v), &unit(n, w), LEMMA1_DEFAULT_BUDGET).unwrap();
        pass &= r == expected;
    }
    let odd = [
        (vec![0], vec![0]),
        (vec![0, 1], vec![1]),
        (vec![0, 1, 2], vec![2]),
    ];
    for (v, w) in &odd {
        let r =
            analysis::lemma1_enumerate(n, &unit(n, v), &unit(n, w), LEMMA1_DEFAULT_BUDGET).unwrap();
        pass &= r == Ratio::new(0, 1);
    }

    let n = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mc = analysis::lemma1_mc(n, &unit(n, &[0]), &unit(n, &[1]), MC_SAMPLES, &mut rng).unwrap();
    let pairs = analysis::lemma1_mc_pairs(n, false, MC_SAMPLES, &mut rng).unwrap();
    let se = (mc.stderr.powi(2) + pairs.stderr.powi(2)).sqrt();
    let agree = (mc.mean - pairs.mean).abs() <= MC_SIGMAS * se;
    let bound = analysis::lemma1_bound(n);
    let bounded = pairs.mean <= bound + MC_SIGMAS * pairs.stderr;
    let exact5 = analysis::lemma1_exact(n).unwrap().value();
    let near_exact = (mc.mean - exact5).abs() <= MC_SIGMAS * mc.stderr;

    let v2 = analysis::lemma1_enumerate(2, &unit(2, &[0]), &unit(2, &[1]), LEMMA1_DEFAULT_BUDGET)
        .unwrap();
    let n2 = v2 == Ratio::new(1, 3) && v2.value() > analysis::lemma1_bound(2);
    check(
        pass && agree && bounded && near_exact && n2,
        format!(
            "n = 3: {closed} over {} pairs, 0 on {} non-orthogonal; n = 5: {:.5} vs {:.5} (bound {bound}); n = 2: {v2}",
            orthogonal.len(),
            odd.len(),
            mc.mean,
            pairs.mean
        ),
    )
}

fn rebased(gens: &[PauliOp], rng: &mut ChaCha8Rng) -> Vec<PauliOp> {
    let u = F2Matrix::random_gl(gens.len(), rng);
    u.rows()
        .iter()
        .map(|row| {
            row.iter_ones()
                .fold(PauliOp::identity(gens[0].num_qubits()), |acc, i| {
                    acc.multiply(&gens[i]).expect("generators commute")
                })
        })
        .collect()
}

fn lemma2() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut checked, mut failures) = (0, 0);
    for _ in 0..LEMMA2_PAIRS {
        let a = StabilizerCode::random(6, 1, &mut rng);
        let b = StabilizerCode::random(6, 1, &mut rng);
        for m in 0..=3 {
            checked += 1;
            let pair = rsra::pad(&a, &b, m).expect("same size and k");
            let report = analysis::lemma2_check(&pair).expect("bases exist");
            let mut ok = report.pass();
            for _ in 0..LEMMA2_BASIS_CHANGES {
                let ga = rebased(pair.source.generators(), &mut rng);
                let gb = rebased(pair.target.generators(), &mut rng);
                ok &= analysis::commutation_rank(&ga, &gb) == report.generator_rank;
            }
            failures += usize::from(!ok);
        }
    }
    let elapsed = start.elapsed();
    check(
        failures == 0 && within(elapsed, BUDGET_LEMMA2),
        format!("{checked} padded pairs, {failures} failures, {elapsed:.2?}"),
    )
}

fn channel() -> Verdict {
    let start = Instant::now();
    let path = fixture_path(fixtures::TABLE1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut branches = 0;
    let mut pass = true;
    for (i, step) in path.steps.iter().enumerate() {
        let pre = &path.intermediates[i];
        let post = &path.intermediates[i + 1];
        let frame = LogicalFrame::for_code(pre).expect("frame exists");
        let base = sim::encode(pre, &frame, &LogicalSpec::all(Axis::Z, pre.k())).expect("encodes");
        for forced in [Outcome::Plus, Outcome::Minus] {
            let mut t = base.clone();
            let record = sim::run_step(&mut t, step, Some(forced), &mut rng).expect("step runs");
            pass &= record.outcome == forced && !record.deterministic && t.is_stabilized_by(post);
            branches += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        pass && within(elapsed, BUDGET_CHANNEL),
        format!(
            "{branches} forced branches over {} steps, {elapsed:.2?}",
            path.steps.len()
        ),
    )
}

fn information() -> Verdict {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for name in fixtures::NAMES {
        let path = fixture_path(fixtures::by_name(name).unwrap());
        let reports =
            sim::simulate(&path, SIM_SEEDS, SEED, &OutcomeSchedule::Random).expect("runs");
        let ok = reports
            .iter()
            .filter(|r| r.target_stabilized && r.ancillas_disentangled && r.logical_preserved)
            .count();
        pass &= reports.len() == 2 * SIM_SEEDS && ok == reports.len();
        parts.push(format!("{name} {ok}/{}", reports.len()));
    }
    let elapsed = start.elapsed();
    check(
        pass && within(elapsed, BUDGET_SIM),
        format!("{}, {elapsed:.2?}", parts.join(", ")),
    )
}

/// Table 1 with one intermediate replaced by a valid code that has a
/// weight-one logical operator.
fn corrupted_path() -> ConversionPath {
    let mut path = fixture_path(fixtures::TABLE1);
    let gens: Vec<PauliOp> = (0..6)
        .map(|q| PauliOp::single(7, q, rsra_core::pauli::Letter::Z))
        .collect();
    path.intermediates[2] = StabilizerCode::new(7, gens).unwrap();
    path
}

fn cross_oracle() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for name in fixtures::NAMES {
        let path = fixture_path(fixtures::by_name(name).unwrap());
        let v = analysis::verify_path(&path, DISTANCE).pass;
        let inj = sim::inject_and_check(&path, INJECT_CAP).expect("injection runs");
        pass &= v && inj.pass && inj.syndrome_mismatches == 0;
        parts.push(format!("{name} {v}/{}", inj.pass));
    }
    let path = corrupted_path();
    let v = analysis::verify_path(&path, DISTANCE);
    let inj = sim::inject_and_check(&path, INJECT_CAP).expect("injection runs");
    let witness_ok =
        |w: &Option<(usize, PauliOp)>| w.as_ref().is_some_and(|(_, p)| p.weight() <= INJECT_CAP);
    pass &= !v.pass && !inj.pass && witness_ok(&v.first_failure) && witness_ok(&inj.failure);
    parts.push(format!(
        "corrupted {}/{} with witnesses {:?} / {:?}",
        v.pass,
        inj.pass,
        v.first_failure.map(|(i, p)| format!("{p}@{i}")),
        inj.failure.map(|(i, p)| format!("{p}@{i}"))
    ));
    check(pass, parts.join(", "))
}

fn bounds() -> Verdict {
    let mut worst: f64 = 0.0;
    for (n, m, d, gc, use_d, expected) in grid::FAILURE_BOUND_GRID {
        let exponent = if use_d {
            BoundExponent::D
        } else {
            BoundExponent::DMinusOne
        };
        let got = analysis::failure_bound(BoundInputs { n, m, d, gc }, exponent)
            .unwrap()
            .raw;
        worst = worst.max((got - expected).abs() / expected.abs());
    }
    let grid_ok = worst <= 0.5 * 10f64.powi(1 - BOUND_DIGITS);

    let epsilons = [1.0, 0.5, 0.1, 1e-2, 1e-3, 1e-6, 1e-9];
    let mut monotone = true;
    let mut minimal = true;
    for (n, d) in [(7, 3), (9, 3), (17, 5), (23, 7)] {
        let mut last = 0;
        for &eps in &epsilons {
            let r = analysis::min_ancilla(n, d, eps, BoundExponent::DMinusOne).unwrap();
            monotone &= r.m >= last;
            last = r.m;
            let at = |m: usize| {
                analysis::failure_bound(BoundInputs { n, m, d, gc: m }, BoundExponent::DMinusOne)
                    .map(|v| v.raw)
            };
            minimal &= at(r.m).is_ok_and(|v| v < eps);
            if r.m > 0 {
                minimal &= at(r.m - 1).map_or(true, |v| v >= eps);
            }
        }
    }
    check(
        grid_ok && monotone && minimal,
        format!(
            "{} grid points, worst relative error {worst:.1e}; min_ancilla monotone {monotone}, minimal {minimal}",
            grid::FAILURE_BOUND_GRID.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("table 1 reproduction", table1),
        ("table 2 reproduction", table2),
        ("table 3 reproduction", table3),
        ("minimal ancilla count", minimal_ancilla),
        ("orthogonal-pair probability", lemma1),
        ("commutativity matrix properties", lemma2),
        ("measure-and-correct channel", channel),
        ("logical information preserved", information),
        ("distance check vs error injection", cross_oracle),
        ("failure bound and minimal ancilla", bounds),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        failed += usize::from(!v.pass);
        println!(
            "criterion {:>2} {}: {name}: {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
