//! Monte Carlo sweep harness: runs trials over separation distance,
//! antenna count, station count, and policy; aggregates means and standard
//! errors; writes CSV/JSON results.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::array::{array_gain, lcmv_weights};
use crate::coexistence::csat_trace_backlogged;
use crate::optimizer::{
    solve_exhaustive, solve_greedy, solve_no_null, Method, NullingSolution,
};
use crate::rate::Policy;
use crate::scenario::{sample_scenario, RadioParams, Scenario};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] crate::scenario::ScenarioError),
    #[error(transparent)]
    Optimizer(#[from] crate::optimizer::OptimizerError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepAxes {
    /// BS-AP separation distances (m).
    pub d_sep: Vec<f64>,
    /// Antenna counts.
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    /// STA counts.
    #[serde(rename = "N")]
    pub n: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub radio: RadioParams,
    pub sweep: SweepAxes,
    pub policies: Vec<Policy>,
    pub methods: Vec<Method>,
    pub runs: usize,
    pub base_seed: u64,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_radius")]
    pub radius_lte: f64,
    #[serde(default = "default_radius")]
    pub radius_wifi: f64,
    #[serde(default)]
    pub output_path: Option<String>,
}

fn default_m() -> usize {
    1
}

fn default_radius() -> f64 {
    50.0
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            radio: RadioParams::default(),
            sweep: SweepAxes {
                d_sep: vec![10.0, 30.0, 50.0, 70.0, 90.0, 110.0, 130.0],
                k: vec![6],
                n: vec![8],
            },
            policies: vec![Policy::MaxSum],
            methods: vec![Method::NoNull, Method::Greedy],
            runs: 500,
            base_seed: 1,
            m: 1,
            radius_lte: 50.0,
            radius_wifi: 50.0,
            output_path: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |m: String| Err(HarnessError::Config(m));
        self.radio
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.runs < 1 {
            return err("runs must be at least 1".into());
        }
        if self.sweep.d_sep.is_empty() || self.sweep.k.is_empty() || self.sweep.n.is_empty() {
            return err("sweep axes must be non-empty".into());
        }
        if self.policies.is_empty() || self.methods.is_empty() {
            return err("policies and methods must be non-empty".into());
        }
        if self.m < 1 {
            return err("m must be at least 1".into());
        }
        if self.methods.contains(&Method::Exhaustive) {
            let max_n = *self.sweep.n.iter().max().unwrap();
            if max_n + 1 > crate::optimizer::ENUMERATION_GUARD_BITS {
                return err(format!(
                    "exhaustive method with N={max_n} exceeds the enumeration guard"
                ));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }
}

/// One evaluated trial; gains are relative to the same-seed no-null
/// baseline and absent for the baseline itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub d_sep: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub policy: Policy,
    pub method: Method,
    pub lte_throughput: f64,
    pub wifi_mean_throughput: f64,
    pub alpha_l: f64,
    pub alpha_w: f64,
    pub tau_l: f64,
    pub tau_w: f64,
    pub nulled_sta_count: usize,
    pub ap_nulled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain_lte: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain_wifi: Option<f64>,
}

/// Per-cell mean and standard error of every numeric trial field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellAggregate {
    pub d_sep: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub policy: Policy,
    pub method: Method,
    pub runs: usize,
    pub stats: Vec<FieldStat>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldStat {
    pub field: String,
    pub mean: f64,
    pub se: f64,
}

impl CellAggregate {
    pub fn stat(&self, field: &str) -> Option<&FieldStat> {
        self.stats.iter().find(|s| s.field == field)
    }
}

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(SPLITMIX_GAMMA);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-trial seed: a splitmix64 chain over the base seed and the
/// (d_sep, K, N, run) indices, so any cell is reproducible in isolation.
pub fn trial_seed(base_seed: u64, d_idx: usize, k_idx: usize, n_idx: usize, run: usize) -> u64 {
    let mut s = splitmix64(base_seed);
    for v in [d_idx as u64, k_idx as u64, n_idx as u64, run as u64] {
        s = splitmix64(s ^ v);
    }
    s
}

fn trial_from_solution(
    scenario: &Scenario,
    policy: Policy,
    sol: &NullingSolution,
    baseline: Option<&NullingSolution>,
) -> TrialResult {
    let rel_gain = |value: f64, base: f64| {
        if base > 0.0 {
            Some(value / base - 1.0)
        } else {
            Some(0.0)
        }
    };
    let (gain_lte, gain_wifi) = match baseline {
        Some(b) => (
            rel_gain(sol.report.lte_throughput, b.report.lte_throughput),
            rel_gain(sol.report.wifi_mean_throughput, b.report.wifi_mean_throughput),
        ),
        None => (None, None),
    };
    let ap_nulled = sol.decision.ap_nulled();
    TrialResult {
        seed: scenario.seed,
        d_sep: scenario.d_sep,
        k: scenario.params.n_antennas,
        n: scenario.stas.len(),
        policy,
        method: sol.method,
        lte_throughput: sol.report.lte_throughput,
        wifi_mean_throughput: sol.report.wifi_mean_throughput,
        alpha_l: sol.report.coex.alpha_l,
        alpha_w: sol.report.coex.alpha_w,
        tau_l: sol.report.coex.tau_l_ms,
        tau_w: sol.report.coex.tau_w_ms,
        nulled_sta_count: sol.decision.null_count() - usize::from(ap_nulled),
        ap_nulled,
        gain_lte,
        gain_wifi,
    }
}

/// Runs the full sweep. Trials are independent work items executed in
/// parallel; output order is deterministic by (cell, run, method).
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<TrialResult>, HarnessError> {
    config.validate()?;

    struct Cell {
        d_idx: usize,
        k_idx: usize,
        n_idx: usize,
        policy: Policy,
    }
    let mut cells = Vec::new();
    for (d_idx, _) in config.sweep.d_sep.iter().enumerate() {
        for (k_idx, _) in config.sweep.k.iter().enumerate() {
            for (n_idx, _) in config.sweep.n.iter().enumerate() {
                for &policy in &config.policies {
                    cells.push(Cell {
                        d_idx,
                        k_idx,
                        n_idx,
                        policy,
                    });
                }
            }
        }
    }

    let work: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.runs).map(move |r| (c, r)))
        .collect();

    let trials: Result<Vec<Vec<TrialResult>>, HarnessError> = work
        .par_iter()
        .map(|&(cell_idx, run)| {
            let cell = &cells[cell_idx];
            let d_sep = config.sweep.d_sep[cell.d_idx];
            let k = config.sweep.k[cell.k_idx];
            let n = config.sweep.n[cell.n_idx];
            let seed = trial_seed(config.base_seed, cell.d_idx, cell.k_idx, cell.n_idx, run);
            let params = RadioParams {
                n_antennas: k,
                ..config.radio.clone()
            };
            let scenario = sample_scenario(
                params,
                d_sep,
                config.m,
                n,
                config.radius_lte,
                config.radius_wifi,
                seed,
            )?;
            // UEs are served round-robin across runs.
            let served_ue = run % config.m;
            let baseline = solve_no_null(&scenario, cell.policy, served_ue);
            let mut out = Vec::with_capacity(config.methods.len());
            for &method in &config.methods {
                let trial = match method {
                    Method::NoNull => {
                        trial_from_solution(&scenario, cell.policy, &baseline, None)
                    }
                    Method::Greedy => {
                        let sol = solve_greedy(&scenario, cell.policy, served_ue);
                        trial_from_solution(&scenario, cell.policy, &sol, Some(&baseline))
                    }
                    Method::Exhaustive => {
                        let sol = solve_exhaustive(&scenario, cell.policy, served_ue)?;
                        trial_from_solution(&scenario, cell.policy, &sol, Some(&baseline))
                    }
                };
                out.push(trial);
            }
            Ok(out)
        })
        .collect();

    Ok(trials?.into_iter().flatten().collect())
}

const NUMERIC_FIELDS: &[&str] = &[
    "lte_throughput",
    "wifi_mean_throughput",
    "alpha_l",
    "alpha_w",
    "tau_l",
    "tau_w",
    "nulled_sta_count",
    "ap_nulled",
    "gain_lte",
    "gain_wifi",
];

fn numeric_value(t: &TrialResult, field: &str) -> Option<f64> {
    match field {
        "lte_throughput" => Some(t.lte_throughput),
        "wifi_mean_throughput" => Some(t.wifi_mean_throughput),
        "alpha_l" => Some(t.alpha_l),
        "alpha_w" => Some(t.alpha_w),
        "tau_l" => Some(t.tau_l),
        "tau_w" => Some(t.tau_w),
        "nulled_sta_count" => Some(t.nulled_sta_count as f64),
        "ap_nulled" => Some(f64::from(t.ap_nulled)),
        "gain_lte" => t.gain_lte,
        "gain_wifi" => t.gain_wifi,
        _ => None,
    }
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Groups trials by (d_sep, K, N, policy, method) and computes mean and
/// standard error (sd / sqrt(runs)) of every numeric field. Aggregation is
/// permutation-invariant: cells are keyed, then trials summed per key in
/// input order within the key.
pub fn aggregate(trials: &[TrialResult]) -> Vec<CellAggregate> {
    use std::collections::BTreeMap;
    // Keys ordered by (d_sep bits, K, N, policy, method) for stable output.
    let mut groups: BTreeMap<(u64, usize, usize, String, String), Vec<&TrialResult>> =
        BTreeMap::new();
    for t in trials {
        groups
            .entry((
                t.d_sep.to_bits(),
                t.k,
                t.n,
                t.policy.as_str().to_string(),
                t.method.as_str().to_string(),
            ))
            .or_default()
            .push(t);
    }
    groups
        .into_values()
        .map(|group| {
            let first = group[0];
            let stats = NUMERIC_FIELDS
                .iter()
                .filter_map(|&field| {
                    let values: Vec<f64> =
                        group.iter().filter_map(|t| numeric_value(t, field)).collect();
                    if values.is_empty() {
                        return None;
                    }
                    let (mean, se) = mean_se(&values);
                    Some(FieldStat {
                        field: field.to_string(),
                        mean,
                        se,
                    })
                })
                .collect();
            CellAggregate {
                d_sep: first.d_sep,
                k: first.k,
                n: first.n,
                policy: first.policy,
                method: first.method,
                runs: group.len(),
                stats,
            }
        })
        .collect()
}

/// 17 significant digits; enough to round-trip any f64 bit-exactly.
fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

pub fn trials_csv(trials: &[TrialResult]) -> String {
    let mut out = String::new();
    out.push_str(
        "seed,d_sep,K,N,policy,method,lte_throughput,wifi_mean_throughput,alpha_l,alpha_w,tau_l,tau_w,nulled_sta_count,ap_nulled,gain_lte,gain_wifi\n",
    );
    for t in trials {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            t.seed,
            fmt_f64(t.d_sep),
            t.k,
            t.n,
            t.policy.as_str(),
            t.method.as_str(),
            fmt_f64(t.lte_throughput),
            fmt_f64(t.wifi_mean_throughput),
            fmt_f64(t.alpha_l),
            fmt_f64(t.alpha_w),
            fmt_f64(t.tau_l),
            fmt_f64(t.tau_w),
            t.nulled_sta_count,
            u8::from(t.ap_nulled),
            opt(t.gain_lte),
            opt(t.gain_wifi),
        ));
    }
    out
}

pub fn aggregates_csv(aggregates: &[CellAggregate]) -> String {
    let mut out = String::from("d_sep,K,N,policy,method,runs");
    for field in NUMERIC_FIELDS {
        out.push_str(&format!(",{field}_mean,{field}_se"));
    }
    out.push('\n');
    for a in aggregates {
        out.push_str(&format!(
            "{},{},{},{},{},{}",
            fmt_f64(a.d_sep),
            a.k,
            a.n,
            a.policy.as_str(),
            a.method.as_str(),
            a.runs
        ));
        for field in NUMERIC_FIELDS {
            match a.stat(field) {
                Some(s) => out.push_str(&format!(",{},{}", fmt_f64(s.mean), fmt_f64(s.se))),
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

/// Writes trial and aggregate files into `dir` in the requested format.
/// Returns the written paths.
pub fn emit(
    trials: &[TrialResult],
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<std::path::PathBuf>, HarnessError> {
    if trials.is_empty() {
        return Err(HarnessError::Config("no trials to emit".into()));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let aggregates = aggregate(trials);
    let mut written = Vec::new();
    match format {
        OutputFormat::Csv => {
            let tp = dir.join("trials.csv");
            fs::write(&tp, trials_csv(trials)).map_err(io_err(&tp))?;
            let ap = dir.join("aggregates.csv");
            fs::write(&ap, aggregates_csv(&aggregates)).map_err(io_err(&ap))?;
            written.push(tp);
            written.push(ap);
        }
        OutputFormat::Json => {
            let tp = dir.join("trials.json");
            fs::write(&tp, serde_json::to_string_pretty(trials)?).map_err(io_err(&tp))?;
            let ap = dir.join("aggregates.json");
            fs::write(&ap, serde_json::to_string_pretty(&aggregates)?).map_err(io_err(&ap))?;
            written.push(tp);
            written.push(ap);
        }
    }
    Ok(written)
}

/// CSAT adaptation traces for N_cs = 1..=max_n_cs under backlogged WiFi,
/// as CSV rows (n_cs, step, t_on_ms).
pub fn csat_traces_csv(params: &RadioParams, max_n_cs: usize, steps: usize) -> String {
    let mut out = String::from("n_cs,step,t_on_ms\n");
    for n_cs in 1..=max_n_cs {
        let trace = csat_trace_backlogged(params, n_cs, steps);
        for (step, t_on) in trace.iter().enumerate() {
            out.push_str(&format!("{n_cs},{step},{}\n", fmt_f64(*t_on)));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct NullDepthRow {
    pub k: usize,
    pub n_nulls: usize,
    /// Largest linear gain across the requested null angles.
    pub worst_null_gain: f64,
    /// Gain toward the served angle.
    pub served_gain: f64,
}

/// Array diagnostics: random (K, null set) configurations with the
/// achieved null depth and served-direction gain. Ill-conditioned draws
/// are redrawn.
pub fn null_depth_report(n_configs: usize, seed: u64) -> Vec<NullDepthRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ks = [2usize, 4, 6, 10];
    let mut rows = Vec::with_capacity(n_configs);
    while rows.len() < n_configs {
        let k = ks[rng.random_range(0..ks.len())];
        let served = rng.random_range(-1.5..1.5f64);
        let n_nulls = rng.random_range(0..k);
        let nulls: Vec<f64> = (0..n_nulls).map(|_| rng.random_range(-1.5..1.5f64)).collect();
        let Ok(w) = lcmv_weights(k, served, &nulls) else {
            continue;
        };
        let worst = nulls
            .iter()
            .map(|&t| array_gain(&w, t))
            .fold(0.0f64, f64::max);
        rows.push(NullDepthRow {
            k,
            n_nulls,
            worst_null_gain: worst,
            served_gain: array_gain(&w, served),
        });
    }
    rows
}
