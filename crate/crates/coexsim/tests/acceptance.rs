//! End-to-end acceptance suite. Each test prints one PASS/FAIL line for
//! its criterion; run with `cargo test --test acceptance -- --nocapture`
//! to see the lines for passing criteria too.

use coexsim::array::{array_gain, lcmv_weights};
use coexsim::coexistence::{access_delay, airtime_lte, csat_trace_backlogged, NullingDecision};
use coexsim::harness::{
    aggregate, run_sweep, trials_csv, CellAggregate, ExperimentConfig, SweepAxes,
};
use coexsim::optimizer::{solve_exhaustive, solve_greedy, solve_no_null, Method};
use coexsim::rate::{evaluate, Policy};
use coexsim::scenario::{sample_scenario, RadioParams};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(criterion: &str, pass: bool, detail: &str) -> bool {
    println!(
        "ACCEPTANCE {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

/// Criterion 1: CSAT trace converges exactly to T_csat/(N_cs+1) for
/// N_cs in 1..=10 under backlogged WiFi (T_on 40, T_csat 80, step 5).
#[test]
fn criterion_1_airtime_fixed_point() {
    let params = RadioParams::default();
    let mut ok = true;
    for n_cs in 1..=10usize {
        let trace = csat_trace_backlogged(&params, n_cs, 64);
        let fixed = 80.0 / (n_cs as f64 + 1.0);
        let tail = &trace[trace.len() - 4..];
        ok &= tail.iter().all(|&t| t == fixed);
        // once reached, pinned
        let first = trace.iter().position(|&t| t == fixed).unwrap();
        ok &= trace[first..].iter().all(|&t| t == fixed);
    }
    assert!(report(
        "1 airtime fixed point",
        ok,
        "T_on converges to T_csat/(N_cs+1) exactly for N_cs in 1..=10"
    ));
}

/// Criterion 2: nulling airtime gain, exact rational values over the
/// (N_cs, K_null) surface.
#[test]
fn criterion_2_nulling_airtime_gain() {
    let mut ok = true;
    let gain = airtime_lte(10, 2).unwrap() - airtime_lte(10, 0).unwrap();
    ok &= gain == 1.0 / 9.0 - 1.0 / 11.0;
    for n_cs in 2..=10usize {
        for k_null in 1..=4usize.min(n_cs) {
            let a = airtime_lte(n_cs, k_null).unwrap();
            ok &= a == 1.0 / ((n_cs - k_null) as f64 + 1.0);
            let g = a - airtime_lte(n_cs, 0).unwrap();
            ok &= g > 0.0;
        }
    }
    assert!(report(
        "2 nulling airtime gain",
        ok,
        "alpha_l(10,2)-alpha_l(10,0) = 1/9-1/11 exactly; full surface matches"
    ));
}

/// Criterion 3: access-delay formulas across alpha_l and T_csat grids,
/// 1e-12 tolerance; AP-nulled case zeroes tau_w.
#[test]
fn criterion_3_delay_formulas() {
    let mut ok = true;
    for t_csat in [40.0f64, 80.0] {
        for i in 0..=10 {
            let alpha = i as f64 / 10.0;
            let (tau_l, tau_w) = access_delay(alpha, t_csat, true);
            ok &= (tau_l - (1.0 - alpha).powi(2) * t_csat / 2.0).abs() <= 1e-12;
            ok &= (tau_w - alpha.powi(2) * t_csat / 2.0).abs() <= 1e-12;
            let (_, tau_w_nulled) = access_delay(alpha, t_csat, false);
            ok &= tau_w_nulled == 0.0;
        }
    }
    assert!(report(
        "3 delay formulas",
        ok,
        "tau_l, tau_w match the quadratic forms on the alpha x T_csat grid"
    ));
}

/// Criterion 4: 200 random configurations, null gains <= 1e-12 linear and
/// matched-filter gain exactly K within 1e-9.
#[test]
fn criterion_4_null_depth() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let ks = [2usize, 4, 6, 10];
    let mut checked = 0usize;
    let mut worst_null = 0.0f64;
    let mut worst_peak_err = 0.0f64;
    while checked < 200 {
        let k = ks[rng.random_range(0..ks.len())];
        let served = rng.random_range(-1.5..1.5f64);
        let n_nulls = rng.random_range(0..k);
        let nulls: Vec<f64> = (0..n_nulls)
            .map(|_| rng.random_range(-1.5..1.5f64))
            .collect();
        let Ok(w) = lcmv_weights(k, served, &nulls) else {
            continue; // ill-conditioned draw, redraw
        };
        for &t in &nulls {
            worst_null = worst_null.max(array_gain(&w, t));
        }
        let no_null = lcmv_weights(k, served, &[]).unwrap();
        worst_peak_err = worst_peak_err.max((array_gain(&no_null, served) - k as f64).abs());
        checked += 1;
    }
    let ok = worst_null <= 1e-12 && worst_peak_err <= 1e-9;
    assert!(report(
        "4 null depth",
        ok,
        &format!("200 configs: worst null gain {worst_null:.2e}, worst peak error {worst_peak_err:.2e}")
    ));
}

/// Criterion 5: on 500 paired seeds (N=8, K=6, MaxSum): greedy objective
/// never exceeds the exhaustive optimum, never falls below no-null, and
/// stays within the (N+2)^2 evaluation budget.
#[test]
fn criterion_5_oracle_equivalence() {
    let params = RadioParams {
        n_antennas: 6,
        ..RadioParams::default()
    };
    let mut ok = true;
    let mut max_evals = 0usize;
    let mut gaps = Vec::new();
    for seed in 0..500u64 {
        let s = sample_scenario(params.clone(), 50.0, 1, 8, 50.0, 50.0, seed).unwrap();
        let base = solve_no_null(&s, Policy::MaxSum, 0);
        let g = solve_greedy(&s, Policy::MaxSum, 0);
        let e = solve_exhaustive(&s, Policy::MaxSum, 0).unwrap();
        ok &= g.report.objective_value <= e.report.objective_value * (1.0 + 1e-12);
        ok &= g.report.objective_value >= base.report.objective_value;
        ok &= g.evaluations <= (8 + 2) * (8 + 2);
        max_evals = max_evals.max(g.evaluations);
        if e.report.objective_value > 0.0 {
            gaps.push(1.0 - g.report.objective_value / e.report.objective_value);
        }
    }
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    assert!(report(
        "5 oracle equivalence",
        ok,
        &format!(
            "500 seeds: greedy <= exhaustive, greedy >= no-null, max evals {max_evals} <= 100; mean optimality gap {mean_gap:.2e}"
        )
    ));
}

fn trend_sweep() -> Vec<coexsim::harness::TrialResult> {
    let cfg = ExperimentConfig {
        sweep: SweepAxes {
            d_sep: vec![10.0, 30.0, 50.0, 70.0, 90.0, 110.0, 130.0],
            k: vec![2, 4, 6, 10],
            n: vec![8],
        },
        policies: vec![Policy::MaxSum],
        methods: vec![Method::NoNull, Method::Greedy],
        runs: 500,
        base_seed: 1,
        ..ExperimentConfig::default()
    };
    run_sweep(&cfg).unwrap()
}

fn stat(aggs: &[CellAggregate], d: f64, k: usize, field: &str) -> (f64, f64) {
    let cell = aggs
        .iter()
        .find(|a| a.d_sep == d && a.k == k && a.method == Method::Greedy)
        .unwrap();
    let s = cell.stat(field).unwrap();
    (s.mean, s.se)
}

/// Criterion 6: MaxSum never degrades WiFi below the same-seed no-null
/// baseline, across every sweep cell and seed.
#[test]
fn criterion_6_maxsum_non_degradation() {
    let trials = trend_sweep();
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for t in trials.iter().filter(|t| t.method == Method::Greedy) {
        let g = t.gain_wifi.unwrap();
        worst = worst.min(g);
        ok &= g >= -1e-9;
    }
    assert!(report(
        "6 MaxSum non-degradation",
        ok,
        &format!("worst per-seed WiFi gain {worst:.3e} across 14000 trials")
    ));
}

/// Criterion 7: qualitative trend reproduction over the 500-run sweep with
/// defaults (gamma=3, eta0=-174 dBm/Hz):
/// (a) mean LTE gain vs d unimodal with peak in [30, 70] m (K=6);
/// (b) mean gains for d >= 110 m within +-2 SE of zero;
/// (c) peak LTE gain monotonically increasing in K in {2,4,6,10};
/// (d) mean WiFi gain >= -2 SE everywhere.
#[test]
fn criterion_7_trend_reproduction() {
    let ds = [10.0, 30.0, 50.0, 70.0, 90.0, 110.0, 130.0];
    let trials = trend_sweep();
    let aggs = aggregate(&trials);

    // (a) unimodality for K=6, with 2-SE slack per comparison
    let series: Vec<(f64, f64)> = ds.iter().map(|&d| stat(&aggs, d, 6, "gain_lte")).collect();
    let unimodal_about = |p: usize| -> bool {
        let rising = (0..p).all(|i| {
            series[i].0 <= series[i + 1].0 + 2.0 * (series[i].1 + series[i + 1].1)
        });
        let falling = (p..series.len() - 1).all(|i| {
            series[i + 1].0 <= series[i].0 + 2.0 * (series[i].1 + series[i + 1].1)
        });
        rising && falling
    };
    let peak_idx = series
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
        .unwrap()
        .0;
    let a_ok = (30.0..=70.0).contains(&ds[peak_idx]) && unimodal_about(peak_idx);

    // (b) mean gains at d >= 110 within 2 SE of zero, every K, both networks
    let mut b_ok = true;
    for &d in &[110.0, 130.0] {
        for &k in &[2usize, 4, 6, 10] {
            for field in ["gain_lte", "gain_wifi"] {
                let (mean, se) = stat(&aggs, d, k, field);
                b_ok &= mean.abs() <= 2.0 * se.max(1e-15);
            }
        }
    }

    // (c) peak LTE gain increases monotonically in K
    let peaks: Vec<f64> = [2usize, 4, 6, 10]
        .iter()
        .map(|&k| {
            ds.iter()
                .map(|&d| stat(&aggs, d, k, "gain_lte").0)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let c_ok = peaks.windows(2).all(|w| w[1] > w[0]);

    // (d) WiFi gain never below -2 SE
    let mut d_ok = true;
    for &d in &ds {
        for &k in &[2usize, 4, 6, 10] {
            let (mean, se) = stat(&aggs, d, k, "gain_wifi");
            d_ok &= mean >= -2.0 * se.max(1e-15);
        }
    }

    let pass = a_ok && b_ok && c_ok && d_ok;
    report(
        "7 trend reproduction",
        pass,
        &format!(
            "(a) unimodal peak in [30,70]m: {a_ok} (peak at {}m); (b) zero gain at d>=110m: {b_ok}; (c) peak gain monotone in K: {c_ok} (peaks {peaks:?}); (d) WiFi gain non-negative: {d_ok}",
            ds[peak_idx]
        ),
    );
    assert!(pass);
}

/// Criterion 8: two identical sweep runs produce byte-identical CSV.
#[test]
fn criterion_8_determinism() {
    let cfg = ExperimentConfig {
        sweep: SweepAxes {
            d_sep: vec![30.0, 90.0],
            k: vec![4],
            n: vec![6],
        },
        policies: vec![Policy::MaxSum, Policy::MaxLte],
        methods: vec![Method::NoNull, Method::Greedy],
        runs: 20,
        base_seed: 99,
        ..ExperimentConfig::default()
    };
    let a = run_sweep(&cfg).unwrap();
    let b = run_sweep(&cfg).unwrap();
    let ok = trials_csv(&a) == trials_csv(&b);
    assert!(report(
        "8 determinism",
        ok,
        "byte-identical trial CSV across two identical sweep runs"
    ));
}

/// Regression companion to criterion 7: the harness example claims gains
/// near zero for d >= 110 m; see criterion 7 output for the measured
/// values. Here we pin the structural guarantees that hold regardless:
/// the all-zeros decision reproduces the baseline exactly and gains are
/// computed against the same-seed scenario.
#[test]
fn no_null_identity_reproduces_baseline() {
    let params = RadioParams {
        n_antennas: 6,
        ..RadioParams::default()
    };
    let mut ok = true;
    for seed in 0..50u64 {
        let s = sample_scenario(params.clone(), 70.0, 1, 8, 50.0, 50.0, seed).unwrap();
        let base = solve_no_null(&s, Policy::MaxSum, 0);
        let direct = evaluate(&s, &NullingDecision::no_null(8, 0), Policy::MaxSum, None);
        ok &= base.report.objective_value == direct.objective_value;
        ok &= base.report.feasible;
    }
    assert!(ok);
}
