//! Shannon rates, network throughputs, and the policy objective.
//!
//! Rates are base-2 log capacities in bit/s. The LTE-U UE sees the WiFi AP
//! as interference whenever the AP is unblocked (it does not sense the BS,
//! or it is nulled); WiFi STAs see beamformed LTE-U interference during
//! on-periods whenever sharing extends into the space domain.

use serde::{Deserialize, Serialize};

use crate::array::{array_gain, lcmv_weights};
use crate::coexistence::{
    access_delay, airtime_lte, airtime_wifi, ap_senses_bs, bs_sensing_flags, CoexState,
    NullingDecision,
};
use crate::scenario::{dbm_to_watts, pathloss_gain, Node, Scenario};

/// Relative slack for the MaxSum non-degradation comparison, so the
/// identity configuration is never rejected by rounding.
const BASELINE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Policy {
    /// Equal weights, with the constraint that WiFi does not fall below the
    /// no-null baseline.
    MaxSum,
    /// beta_l = 1: LTE-U capacity only.
    #[serde(rename = "MaxLTE")]
    MaxLte,
    /// beta_w = 1: WiFi capacity only.
    #[serde(rename = "MaxWiFi")]
    MaxWifi,
}

impl Policy {
    /// (beta_l, beta_w)
    pub fn betas(self) -> (f64, f64) {
        match self {
            Policy::MaxSum => (0.5, 0.5),
            Policy::MaxLte => (1.0, 0.0),
            Policy::MaxWifi => (0.0, 1.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::MaxSum => "MaxSum",
            Policy::MaxLte => "MaxLTE",
            Policy::MaxWifi => "MaxWiFi",
        }
    }
}

impl std::str::FromStr for Policy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "maxsum" => Ok(Policy::MaxSum),
            "maxlte" => Ok(Policy::MaxLte),
            "maxwifi" => Ok(Policy::MaxWifi),
            other => Err(format!("unknown policy '{other}'")),
        }
    }
}

/// Everything a nulling decision produces: throughputs, airtimes, delays,
/// and the policy objective. `feasible = false` (with a zeroed objective)
/// marks decisions the optimizer must skip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub lte_throughput: f64,
    pub wifi_throughput_per_sta: Vec<f64>,
    pub wifi_mean_throughput: f64,
    pub objective_value: f64,
    pub coex: CoexState,
    pub feasible: bool,
}

impl ThroughputReport {
    fn infeasible(n_stas: usize) -> Self {
        Self {
            lte_throughput: 0.0,
            wifi_throughput_per_sta: vec![0.0; n_stas],
            wifi_mean_throughput: 0.0,
            objective_value: 0.0,
            coex: CoexState {
                sigma_w: false,
                sigma_l: Vec::new(),
                n_cs: 0,
                alpha_l: 0.0,
                alpha_w: 0.0,
                tau_l_ms: 0.0,
                tau_w_ms: 0.0,
            },
            feasible: false,
        }
    }
}

fn pl(distance: f64, gamma: f64) -> f64 {
    pathloss_gain(distance, gamma).expect("scenario generation enforces minimum distance")
}

/// DL Shannon rate of the served UE (bit/s). Blocked AP: noise-limited.
/// Unblocked AP: the AP's signal adds to the denominator.
pub fn lte_rate(scenario: &Scenario, ue: &Node, phi: f64, ap_blocked: bool) -> f64 {
    let p = &scenario.params;
    let signal = dbm_to_watts(p.p_l_dbm) * pl(ue.dist_from_lte, p.pathloss_exp) * phi;
    let mut denom = p.noise_watts();
    if !ap_blocked {
        denom += dbm_to_watts(p.p_w_dbm) * pl(ue.dist_from_wifi, p.pathloss_exp);
    }
    p.bandwidth_hz * (1.0 + signal / denom).log2()
}

/// DL throughput of one WiFi STA (bit/s). Time-only sharing gives the
/// off-period rate; time+space sharing adds an on-period term whose SINR
/// carries the beamformed LTE-U interference at this STA.
pub fn wifi_throughput(
    scenario: &Scenario,
    sta: &Node,
    phi_i: f64,
    time_space_sharing: bool,
    alpha_l: f64,
) -> f64 {
    let p = &scenario.params;
    let signal = dbm_to_watts(p.p_w_dbm) * pl(sta.dist_from_wifi, p.pathloss_exp);
    let noise = p.noise_watts();
    let off_rate = p.bandwidth_hz * (1.0 + signal / noise).log2();
    if !time_space_sharing {
        return (1.0 - alpha_l) * off_rate;
    }
    let interference = dbm_to_watts(p.p_l_dbm) * pl(sta.dist_from_lte, p.pathloss_exp) * phi_i;
    let on_rate = p.bandwidth_hz * (1.0 + signal / (noise + interference)).log2();
    alpha_l * on_rate + (1.0 - alpha_l) * off_rate
}

/// Evaluates one nulling decision end to end: LCMV weights, sensing,
/// airtimes, rates, delays, objective, and the constraint structure.
///
/// Violated constraints (nulling an unsensed node, exceeding the antenna
/// budget, LCMV infeasibility, MaxSum WiFi degradation) return
/// `feasible = false` with a zeroed objective rather than an error, since
/// the optimizers enumerate many candidates.
pub fn evaluate(
    scenario: &Scenario,
    decision: &NullingDecision,
    policy: Policy,
    baseline_wifi: Option<f64>,
) -> ThroughputReport {
    let n_stas = scenario.stas.len();
    let k = scenario.params.n_antennas;
    if decision.nulled.len() != n_stas + 1 || decision.served_ue >= scenario.ues.len() {
        return ThroughputReport::infeasible(n_stas);
    }
    // Antenna budget: every null, the AP's included, consumes one of the
    // K - 1 spare degrees of freedom.
    if decision.null_count() > k.saturating_sub(1) {
        return ThroughputReport::infeasible(n_stas);
    }
    let sigma_l = bs_sensing_flags(scenario);
    // Only nodes inside the BS's ED range may be nulled.
    if decision.nulled_indices().any(|i| !sigma_l[i]) {
        return ThroughputReport::infeasible(n_stas);
    }

    let ue = &scenario.ues[decision.served_ue];
    let null_thetas: Vec<f64> = decision
        .nulled_indices()
        .map(|i| {
            if i == 0 {
                scenario.ap.angle_from_lte
            } else {
                scenario.stas[i - 1].angle_from_lte
            }
        })
        .collect();
    let weights = match lcmv_weights(k, ue.angle_from_lte, &null_thetas) {
        Ok(w) => w,
        Err(_) => return ThroughputReport::infeasible(n_stas),
    };

    let n_cs = sigma_l.iter().filter(|&&b| b).count();
    let k_null_counted = decision.null_count();
    let alpha_l = airtime_lte(n_cs, k_null_counted)
        .expect("nulled set is a subset of the sensed set");
    let sigma_w = ap_senses_bs(scenario, &weights);
    let ap_nulled = decision.ap_nulled();
    let alpha_w = airtime_wifi(sigma_w, ap_nulled, alpha_l);

    let ap_blocked = sigma_w && !ap_nulled;
    let phi_ue = array_gain(&weights, ue.angle_from_lte);
    let lte_throughput = alpha_l * lte_rate(scenario, ue, phi_ue, ap_blocked);

    let time_space = !ap_blocked;
    let wifi_throughput_per_sta: Vec<f64> = scenario
        .stas
        .iter()
        .map(|sta| {
            let phi_i = array_gain(&weights, sta.angle_from_lte);
            wifi_throughput(scenario, sta, phi_i, time_space, alpha_l)
        })
        .collect();
    let wifi_mean_throughput = if n_stas > 0 {
        wifi_throughput_per_sta.iter().sum::<f64>() / n_stas as f64
    } else {
        0.0
    };

    let mut feasible = true;
    if policy == Policy::MaxSum {
        if let Some(baseline) = baseline_wifi {
            if wifi_mean_throughput < baseline * (1.0 - BASELINE_TOLERANCE) {
                feasible = false;
            }
        }
    }

    let (tau_l_ms, tau_w_ms) =
        access_delay(alpha_l, scenario.params.t_csat_ms, ap_blocked);
    let (beta_l, beta_w) = policy.betas();
    let objective_value = if feasible {
        beta_w * wifi_mean_throughput + beta_l * lte_throughput
    } else {
        0.0
    };

    ThroughputReport {
        lte_throughput,
        wifi_throughput_per_sta,
        wifi_mean_throughput,
        objective_value,
        coex: CoexState {
            sigma_w,
            sigma_l,
            n_cs,
            alpha_l,
            alpha_w,
            tau_l_ms,
            tau_w_ms,
        },
        feasible,
    }
}
