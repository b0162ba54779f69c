//! Random coexistence geometry and RF parameters.
//!
//! The world a trial runs in: one LTE-U BS at the origin, one WiFi AP at
//! distance `d_sep` on the positive x-axis, M UEs placed around the BS and
//! N STAs placed around the AP. All pathloss and unit conversions used by
//! the rest of the simulator live here.

use std::f64::consts::TAU;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Nodes are never placed closer than this to a transmitter, so the
/// d^-gamma pathloss never becomes singular.
pub const MIN_NODE_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid radio parameters: {0}")]
    InvalidParams(String),
    #[error("invalid geometry argument: {0}")]
    InvalidGeometry(String),
    #[error("pathloss undefined at distance {0} m")]
    SingularPathloss(f64),
    #[error("power must be positive to convert to dBm, got {0} W")]
    NonPositivePower(f64),
}

/// RF and CSAT parameters shared by every node in a scenario.
///
/// Powers and thresholds are in dBm, bandwidth in Hz, CSAT periods in ms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// LTE-U BS transmit power (dBm).
    #[serde(rename = "P_l")]
    pub p_l_dbm: f64,
    /// WiFi transmit power, used for the AP and for STAs in sensing (dBm).
    #[serde(rename = "P_w")]
    pub p_w_dbm: f64,
    /// ED threshold at the LTE-U BS for WiFi signals (dBm).
    #[serde(rename = "Gamma_w")]
    pub gamma_w_dbm: f64,
    /// ED threshold at the WiFi AP for LTE-U signals (dBm).
    #[serde(rename = "Gamma_l")]
    pub gamma_l_dbm: f64,
    /// Channel bandwidth (Hz).
    #[serde(rename = "B")]
    pub bandwidth_hz: f64,
    /// Pathloss exponent.
    #[serde(rename = "gamma")]
    pub pathloss_exp: f64,
    /// Noise power spectral density (dBm/Hz).
    #[serde(rename = "eta0")]
    pub noise_dbm_per_hz: f64,
    /// Number of LTE-U BS antennas.
    #[serde(rename = "K")]
    pub n_antennas: usize,
    /// CSAT cycle length (ms).
    #[serde(rename = "T_csat")]
    pub t_csat_ms: f64,
    /// CSAT downward adaptation step (ms).
    #[serde(rename = "DeltaT_down")]
    pub dt_down_ms: f64,
    /// Initial CSAT on-period (ms).
    #[serde(rename = "T_on_init")]
    pub t_on_init_ms: f64,
    /// Initial CSAT off-period (ms).
    #[serde(rename = "T_off_init")]
    pub t_off_init_ms: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            p_l_dbm: 17.0,
            p_w_dbm: 17.0,
            gamma_w_dbm: -82.0,
            gamma_l_dbm: -72.0,
            bandwidth_hz: 20e6,
            pathloss_exp: 3.0,
            noise_dbm_per_hz: -174.0,
            n_antennas: 4,
            t_csat_ms: 80.0,
            dt_down_ms: 5.0,
            t_on_init_ms: 40.0,
            t_off_init_ms: 40.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let err = |m: &str| Err(ScenarioError::InvalidParams(m.to_string()));
        if !self.p_l_dbm.is_finite() || !self.p_w_dbm.is_finite() {
            return err("transmit powers must be finite");
        }
        if !(self.bandwidth_hz > 0.0) {
            return err("bandwidth must be positive");
        }
        if !(self.pathloss_exp > 0.0) {
            return err("pathloss exponent must be positive");
        }
        if self.n_antennas < 1 {
            return err("antenna count must be at least 1");
        }
        if !(self.t_csat_ms > 0.0) {
            return err("T_csat must be positive");
        }
        if !(self.dt_down_ms > 0.0 && self.dt_down_ms <= self.t_csat_ms) {
            return err("adaptation step must be in (0, T_csat]");
        }
        if (self.t_on_init_ms + self.t_off_init_ms - self.t_csat_ms).abs() > 1e-9 {
            return err("T_on_init + T_off_init must equal T_csat");
        }
        Ok(())
    }

    /// Noise power over the full channel bandwidth, in watts.
    pub fn noise_watts(&self) -> f64 {
        dbm_to_watts(self.noise_dbm_per_hz) * self.bandwidth_hz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeRole {
    LteBs,
    LteUe,
    WifiAp,
    WifiSta,
}

/// A single network node with its planar position expressed as the angle
/// from the LTE-U BS and distances from both transmitters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub role: NodeRole,
    pub index: usize,
    /// Angle from the LTE-U BS, radians in [0, 2pi).
    pub angle_from_lte: f64,
    pub dist_from_lte: f64,
    pub dist_from_wifi: f64,
}

/// An immutable coexistence geometry; safe to share across trial workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: RadioParams,
    pub d_sep: f64,
    pub ues: Vec<Node>,
    pub stas: Vec<Node>,
    pub ap: Node,
    pub seed: u64,
}

impl Scenario {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario is always serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// d^-gamma linear power gain.
pub fn pathloss_gain(distance_m: f64, gamma: f64) -> Result<f64, ScenarioError> {
    if !(distance_m > 0.0) {
        return Err(ScenarioError::SingularPathloss(distance_m));
    }
    Ok(distance_m.powf(-gamma))
}

pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(p_watts: f64) -> Result<f64, ScenarioError> {
    if !(p_watts > 0.0) {
        return Err(ScenarioError::NonPositivePower(p_watts));
    }
    Ok(10.0 * p_watts.log10() + 30.0)
}

/// Draw one node around a transmitter at `(cx, 0)`: uniform angle in
/// [0, 2pi), uniform distance in [MIN_NODE_DISTANCE_M, radius]. Rejects
/// draws that land within the minimum distance of the *other* transmitter
/// (at `(ox, 0)`) so pathloss stays finite from both.
fn place_node(
    rng: &mut ChaCha8Rng,
    cx: f64,
    ox: f64,
    radius: f64,
) -> (f64, f64, f64, f64) {
    loop {
        let angle = rng.random_range(0.0..TAU);
        let r = rng.random_range(MIN_NODE_DISTANCE_M..=radius);
        let x = cx + r * angle.cos();
        let y = r * angle.sin();
        let d_other = ((x - ox).powi(2) + y * y).sqrt();
        if d_other >= MIN_NODE_DISTANCE_M {
            let d_lte_origin = (x * x + y * y).sqrt();
            let mut theta = y.atan2(x);
            if theta < 0.0 {
                theta += TAU;
            }
            // (theta from BS, dist from BS, x, y); caller sorts out roles
            return (theta % TAU, d_lte_origin, x, y);
        }
    }
}

/// Samples a random geometry. Deterministic for a given seed.
///
/// The AP sits on the x-axis at `(d_sep, 0)`, i.e. at angle 0 from the BS.
pub fn sample_scenario(
    params: RadioParams,
    d_sep: f64,
    m: usize,
    n: usize,
    radius_lte: f64,
    radius_wifi: f64,
    seed: u64,
) -> Result<Scenario, ScenarioError> {
    params.validate()?;
    if m < 1 {
        return Err(ScenarioError::InvalidGeometry("M must be at least 1".into()));
    }
    if !(radius_lte >= MIN_NODE_DISTANCE_M && radius_wifi >= MIN_NODE_DISTANCE_M) {
        return Err(ScenarioError::InvalidGeometry(format!(
            "coverage radii must be at least {MIN_NODE_DISTANCE_M} m"
        )));
    }
    if !(d_sep >= MIN_NODE_DISTANCE_M) {
        return Err(ScenarioError::InvalidGeometry(format!(
            "d_sep must be at least {MIN_NODE_DISTANCE_M} m"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let ues = (0..m)
        .map(|i| {
            let (theta, d_l, x, y) = place_node(&mut rng, 0.0, d_sep, radius_lte);
            let d_w = ((x - d_sep).powi(2) + y * y).sqrt();
            Node {
                role: NodeRole::LteUe,
                index: i,
                angle_from_lte: theta,
                dist_from_lte: d_l,
                dist_from_wifi: d_w,
            }
        })
        .collect();

    let stas = (1..=n)
        .map(|i| {
            let (theta, d_l, x, y) = place_node(&mut rng, d_sep, 0.0, radius_wifi);
            let d_w = ((x - d_sep).powi(2) + y * y).sqrt();
            Node {
                role: NodeRole::WifiSta,
                index: i,
                angle_from_lte: theta,
                dist_from_lte: d_l,
                dist_from_wifi: d_w,
            }
        })
        .collect();

    let ap = Node {
        role: NodeRole::WifiAp,
        index: 0,
        angle_from_lte: 0.0,
        dist_from_lte: d_sep,
        dist_from_wifi: 0.0,
    };

    Ok(Scenario {
        params,
        d_sep,
        ues,
        stas,
        ap,
        seed,
    })
}
