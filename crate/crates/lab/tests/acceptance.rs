//! Acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line; run with `--nocapture` to see them all.

use std::collections::BTreeMap;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use hyperent::entropy::{greedy_separated, greedy_spanning, PointSystem};
use hyperent::families::{grid_arcs, grid_points};
use hyperent::symbolic::{complexity_enumerated, covering_windows, cylinder_join_count, entropy_from_complexity, words_sampled};
use hyperent::{EdgeMap, GrowthMode, HyperSystem, StarHomeo, StarSpace, Subcontinuum, SymbolicFamily};
use lab::{RunResult, Scenario};
use num_bigint::BigUint;

/// Criteria share one CPU budget; running them one at a time keeps the
/// runtime limits meaningful.
static SERIAL: Mutex<()> = Mutex::new(());

/// Scenario runs reused by more than one criterion.
static RUNS: Mutex<BTreeMap<&'static str, (RunResult, Duration)>> = Mutex::new(BTreeMap::new());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn run_default(s: Scenario) -> (RunResult, Duration) {
    let mut runs = RUNS.lock().unwrap_or_else(|e| e.into_inner());
    runs.entry(s.name())
        .or_insert_with(|| {
            let dir = tempfile::tempdir().unwrap();
            let start = Instant::now();
            let r = lab::run(s, s.default_config(), None, dir.path()).unwrap();
            (r, start.elapsed())
        })
        .clone()
}

fn verdict(r: &RunResult, name: &str) -> (bool, String) {
    let v = r.verdicts.iter().find(|v| v.name == name).unwrap_or_else(|| panic!("{} has no verdict {name}", r.scenario));
    (v.pass, format!("{name}: {}", v.measured))
}

fn report(id: u32, what: &str, pass: bool, measured: &str) {
    println!("{} criterion {id}: {what} ({measured})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {what} ({measured})");
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

#[test]
fn criterion_01_exact_one_per_track_counts() {
    let _g = serial();
    let start = Instant::now();
    let mut bad = Vec::new();
    for k in 1..=3usize {
        let fam = SymbolicFamily::AtMostOnePerTrack(k);
        for m in 1..=20usize {
            let want = BigUint::from(m + 1).pow(k as u32);
            if complexity_enumerated(fam, m).unwrap() != want {
                bad.push(format!("enumerated k={k} m={m}"));
            }
            if m <= 8 {
                let w = covering_windows(fam, m).unwrap();
                if BigUint::from(words_sampled(&w, m).unwrap().count()) != want {
                    bad.push(format!("sampled k={k} m={m}"));
                }
            }
        }
    }
    let t = start.elapsed();
    report(
        1,
        "one 1 per track: enumerated complexity is (m+1)^k for m <= 20 and sampled words match for m <= 8, under 1 s",
        bad.is_empty() && t < Duration::from_secs(1),
        &format!("mismatches {bad:?}, {}", secs(t)),
    );
}

#[test]
fn criterion_02_full_shift_counts() {
    let _g = serial();
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut rates = Vec::new();
    for k in 1..=3usize {
        let fam = SymbolicFamily::FullShift(k);
        let mut counts = Vec::new();
        for m in 1..=12usize {
            let c = complexity_enumerated(fam, m).unwrap();
            if c != BigUint::from(1u8) << (k * m) {
                bad.push(format!("k={k} m={m}"));
            }
            counts.push((m as u64, c));
        }
        let rate = entropy_from_complexity(&counts, GrowthMode::Exponential).unwrap().slope;
        if (rate - k as f64 * std::f64::consts::LN_2).abs() > 1e-9 {
            bad.push(format!("rate k={k}: {rate}"));
        }
        rates.push(rate);
    }
    let t = start.elapsed();
    report(
        2,
        "full shift: count is 2^(km) for m <= 12 and the exponential rate is k log 2 within 1e-9, under 1 s",
        bad.is_empty() && t < Duration::from_secs(1),
        &format!("rates {rates:?}, mismatches {bad:?}, {}", secs(t)),
    );
}

#[test]
fn criterion_03_polynomial_exponent_of_exact_counts() {
    let _g = serial();
    let start = Instant::now();
    let mut slopes = Vec::new();
    let mut pass = true;
    for k in 1..=4usize {
        let fam = SymbolicFamily::AtMostOnePerTrack(k);
        let counts: Vec<(u64, BigUint)> =
            (64..=1024).step_by(64).map(|m| (m as u64, complexity_enumerated(fam, m).unwrap())).collect();
        let slope = entropy_from_complexity(&counts, GrowthMode::Polynomial).unwrap().slope;
        pass &= (slope - k as f64).abs() <= 0.05;
        slopes.push(slope);
    }
    let t = start.elapsed();
    report(
        3,
        "one 1 per track, m in [64, 1024]: polynomial exponent within 0.05 of k for k <= 4, under 1 s",
        pass && t < Duration::from_secs(1),
        &format!("exponents {slopes:?}, {}", secs(t)),
    );
}

#[test]
fn criterion_04_star_hyperspace_estimate() {
    let _g = serial();
    let (r, t) = run_default(Scenario::StarHpol);
    let (ok, m) = verdict(&r, "exponent");
    report(4, "star_hpol, k = 3: exponent on Y within 3 ± 0.5, under 2 min", ok && t < Duration::from_secs(120), &format!("{m}, {}", secs(t)));
}

#[test]
fn criterion_05_interval_hyperspace_estimate() {
    let _g = serial();
    let (r, t) = run_default(Scenario::IntervalC);
    let (a, ma) = verdict(&r, "arcs_exponent");
    let (p, mp) = verdict(&r, "points_exponent");
    report(
        5,
        "interval_C with x^2: subcontinua within 2 ± 0.4, points within 1 ± 0.3, under 1 min",
        a && p && t < Duration::from_secs(60),
        &format!("{ma}; {mp}; {}", secs(t)),
    );
}

#[test]
fn criterion_06_c2_estimate() {
    let _g = serial();
    let (r, t) = run_default(Scenario::IntervalCn);
    let (u, mu) = verdict(&r, "unions_exponent");
    let (p, mp) = verdict(&r, "points_exponent");
    report(
        6,
        "interval_Cn, n = 2: C_2 within 4 ± 0.6 and F_4 within 4 ± 0.5, under 3 min",
        u && p && t < Duration::from_secs(180),
        &format!("{mu}; {mp}; {}", secs(t)),
    );
}

#[test]
fn criterion_07_structural_equalities() {
    let _g = serial();
    let (r, _) = run_default(Scenario::IsometryCheck);
    let checks = ["endpoint_conjugacy", "boundary_conjugacy", "boundary_isometry_on_A"].map(|n| verdict(&r, n));
    let pass = checks.iter().all(|c| c.0);
    let measured: Vec<&str> = checks.iter().map(|c| c.1.as_str()).collect();
    report(
        7,
        "endpoint and boundary conjugacies exact on 10^3 cases; boundary map isometric within 1e-12 on 10^4 class-A pairs",
        pass,
        &measured.join("; "),
    );
}

#[test]
fn criterion_08_hausdorff_oracle() {
    let _g = serial();
    let (r, _) = run_default(Scenario::IsometryCheck);
    let (ok, m) = verdict(&r, "hausdorff_oracle");
    report(8, "closed form within 2e-4 of the dense oracle at resolution 1e-4 on 10^3 pairs", ok, &m);
}

fn squaring() -> StarHomeo {
    StarHomeo::fixing_edges(StarSpace::unit_interval(), vec![EdgeMap::power(2.0).unwrap()]).unwrap()
}

const EPS: [f64; 3] = [0.2, 0.1, 0.05];
const NS: [usize; 6] = [1, 2, 4, 8, 16, 32];

/// Span and separated counts over the grid, with every violated relation
/// named.
fn inequality_grid<S: hyperent::DynSystem>(label: &str, sys: &S, cands: &[S::State], bad: &mut Vec<String>) {
    let mut sep = [[0usize; NS.len()]; EPS.len()];
    for (i, &e) in EPS.iter().enumerate() {
        for (j, &n) in NS.iter().enumerate() {
            sep[i][j] = greedy_separated(sys, cands, n, e).unwrap().count();
            let span = greedy_spanning(sys, cands, cands, n, e).unwrap();
            if span > sep[i][j] {
                bad.push(format!("{label}: span {span} > sep {} at n={n} eps={e}", sep[i][j]));
            }
            if j > 0 && sep[i][j] < sep[i][j - 1] {
                bad.push(format!("{label}: sep decreases in n at n={n} eps={e}"));
            }
            if i > 0 && sep[i][j] < sep[i - 1][j] {
                bad.push(format!("{label}: sep decreases as eps shrinks at n={n} eps={e}"));
            }
        }
    }
}

#[test]
fn criterion_09_inequality_suite() {
    let _g = serial();
    let h = squaring();
    let mut bad = Vec::new();
    let points = PointSystem { h: h.clone() };
    inequality_grid("points", &points, &grid_points(h.space(), 200).unwrap(), &mut bad);
    let arcs: Vec<Subcontinuum> = grid_arcs(h.space(), 40).unwrap();
    inequality_grid("arcs", &HyperSystem::<Subcontinuum>::new(h.clone()), &arcs, &mut bad);
    let (r, _) = run_default(Scenario::IntervalCn);
    let (factor, mf) = verdict(&r, "factor_inequality");
    report(
        9,
        "span <= sep, sep monotone in n and anti-monotone in eps, and the factor inequality for the boundary map with L = 1",
        bad.is_empty() && factor,
        &format!("order violations {bad:?}; {mf}"),
    );
}

#[test]
fn criterion_10_product_and_power() {
    let _g = serial();
    let (r, t) = run_default(Scenario::ProductPower);
    let checks = ["stable", "product_exponent", "power_exponent"].map(|n| verdict(&r, n));
    let pass = checks.iter().all(|c| c.0) && t < Duration::from_secs(120);
    let measured: Vec<&str> = checks.iter().map(|c| c.1.as_str()).collect();
    report(
        10,
        "product exponent within 2x base ± 0.4 and power exponent within base ± 0.2, under 2 min",
        pass,
        &format!("{}; {}", measured.join("; "), secs(t)),
    );
}

#[test]
fn criterion_11_cylinder_identity() {
    let _g = serial();
    let mut bad = Vec::new();
    let mut cells = 0;
    for fam in [1, 2, 3].map(SymbolicFamily::AtMostOnePerTrack).into_iter().chain([1, 2].map(SymbolicFamily::FullShift)) {
        for n in 0..=4usize {
            for l in 1..=8usize {
                cells += 1;
                if cylinder_join_count(fam, n, l).unwrap() != complexity_enumerated(fam, 2 * n + l).unwrap() {
                    bad.push(format!("{} k={} n={n} l={l}", fam.name(), fam.tracks()));
                }
            }
        }
    }
    report(
        11,
        "join of cylinder covers counts the words of length 2n+l, n <= 4, l <= 8, both families",
        bad.is_empty(),
        &format!("{cells} cells, mismatches {bad:?}"),
    );
}
