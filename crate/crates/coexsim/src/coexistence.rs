//! Carrier sensing, airtime, CSAT adaptation, and channel-access delay.
//!
//! Energy detection compares received power in dBm against the threshold in
//! dBm (inclusive). The LTE-U airtime under nulling is
//! 1 / ((N_cs - K_null) + 1): nulled nodes drop out of the fairness count
//! because an efficiently nulled node never senses the BS.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::array::{array_gain, BeamWeights};
use crate::scenario::{Node, RadioParams, Scenario};

#[derive(Debug, Error)]
pub enum CoexError {
    #[error("cannot null {nulled} nodes when only {sensed} are sensed")]
    MoreNulledThanSensed { nulled: usize, sensed: usize },
}

/// Binary nulling vector over {AP, STA_1..STA_N} plus the served-UE index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullingDecision {
    /// `nulled[0]` is the AP, `nulled[i]` (i >= 1) is STA i.
    pub nulled: Vec<bool>,
    /// Index of the UE being served this scheduling period.
    pub served_ue: usize,
}

impl NullingDecision {
    pub fn no_null(n_stas: usize, served_ue: usize) -> Self {
        Self {
            nulled: vec![false; n_stas + 1],
            served_ue,
        }
    }

    pub fn ap_nulled(&self) -> bool {
        self.nulled.first().copied().unwrap_or(false)
    }

    pub fn null_count(&self) -> usize {
        self.nulled.iter().filter(|&&b| b).count()
    }

    /// Indices into the {AP, STA_1..} vector that are nulled.
    pub fn nulled_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.nulled
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }
}

/// Sensing flags, airtimes, and access delays for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoexState {
    /// AP senses the BS.
    pub sigma_w: bool,
    /// BS senses node i (index 0 is the AP).
    pub sigma_l: Vec<bool>,
    pub n_cs: usize,
    pub alpha_l: f64,
    pub alpha_w: f64,
    pub tau_l_ms: f64,
    pub tau_w_ms: f64,
}

/// Received power of a WiFi node at the BS vs. the BS's ED threshold.
pub fn bs_senses_node(scenario: &Scenario, node: &Node) -> bool {
    let p = &scenario.params;
    let received_dbm = p.p_w_dbm - 10.0 * p.pathloss_exp * node.dist_from_lte.log10();
    received_dbm >= p.gamma_w_dbm
}

/// Beamformed BS power at the AP vs. the AP's ED threshold. With the AP
/// nulled the beam gain collapses and the AP no longer senses the BS.
pub fn ap_senses_bs(scenario: &Scenario, weights: &BeamWeights) -> bool {
    let p = &scenario.params;
    let phi0 = array_gain(weights, scenario.ap.angle_from_lte);
    if phi0 <= 0.0 {
        return false;
    }
    let received_dbm =
        p.p_l_dbm + 10.0 * phi0.log10() - 10.0 * p.pathloss_exp * scenario.d_sep.log10();
    received_dbm >= p.gamma_l_dbm
}

/// BS-side sensing flags for {AP, STA_1..STA_N}.
pub fn bs_sensing_flags(scenario: &Scenario) -> Vec<bool> {
    std::iter::once(bs_senses_node(scenario, &scenario.ap))
        .chain(scenario.stas.iter().map(|s| bs_senses_node(scenario, s)))
        .collect()
}

/// LTE-U airtime 1 / ((N_cs - K_null) + 1).
pub fn airtime_lte(n_cs: usize, k_null_counted: usize) -> Result<f64, CoexError> {
    if k_null_counted > n_cs {
        return Err(CoexError::MoreNulledThanSensed {
            nulled: k_null_counted,
            sensed: n_cs,
        });
    }
    Ok(1.0 / ((n_cs - k_null_counted) as f64 + 1.0))
}

/// WiFi airtime per the CSR table: a nulled AP or an AP that does not sense
/// the BS transmits all the time, otherwise it gets the LTE-U off-period.
pub fn airtime_wifi(sigma_w: bool, ap_nulled: bool, alpha_l: f64) -> f64 {
    if ap_nulled || !sigma_w {
        1.0
    } else {
        1.0 - alpha_l
    }
}

/// CSAT T_on trace, one entry per step plus the initial value. Step t
/// applies the downward adaptation iff `mu_above_threshold[t]`, clamped at
/// T_on_min = T_csat / (N_cs + 1).
pub fn csat_trace(params: &RadioParams, n_cs: usize, mu_above_threshold: &[bool]) -> Vec<f64> {
    let t_on_min = params.t_csat_ms / (n_cs as f64 + 1.0);
    let mut t_on = params.t_on_init_ms;
    let mut trace = Vec::with_capacity(mu_above_threshold.len() + 1);
    trace.push(t_on);
    for &mu in mu_above_threshold {
        if mu {
            t_on = (t_on - params.dt_down_ms).max(t_on_min);
        }
        trace.push(t_on);
    }
    trace
}

/// Trace under backlogged WiFi DL traffic (medium utilization pinned at 1,
/// so every step adapts).
pub fn csat_trace_backlogged(params: &RadioParams, n_cs: usize, steps: usize) -> Vec<f64> {
    csat_trace(params, n_cs, &vec![true; steps])
}

/// Expected channel-access delays (tau_l, tau_w) in ms. `ap_defers` is
/// true when the AP actually waits for LTE-U off-periods (sigma_w = 1 and
/// the AP is not nulled); otherwise its access delay is zero.
pub fn access_delay(alpha_l: f64, t_csat_ms: f64, ap_defers: bool) -> (f64, f64) {
    let tau_l = (1.0 - alpha_l).powi(2) * t_csat_ms / 2.0;
    let tau_w = if ap_defers {
        alpha_l.powi(2) * t_csat_ms / 2.0
    } else {
        0.0
    };
    (tau_l, tau_w)
}
