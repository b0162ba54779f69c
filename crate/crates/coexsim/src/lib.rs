//! System-level simulator for LTE-U/WiFi unlicensed-spectrum coexistence.
//!
//! A multi-antenna LTE-U base station shares a channel with a WiFi cell by
//! duty cycling (CSAT). Steering interference nulls toward selected WiFi
//! nodes removes them from the fair-airtime count, trading antenna
//! diversity for airtime. This crate models the geometry, the array, the
//! sensing/airtime/delay mechanics, per-node Shannon rates, and the
//! null-group selection (exhaustive and greedy), plus a Monte Carlo sweep
//! harness with CSV/JSON output.

pub mod array;
pub mod coexistence;
pub mod harness;
pub mod optimizer;
pub mod rate;
pub mod scenario;

pub use array::{array_gain, lcmv_weights, steering_vector, ArrayError, BeamWeights};
pub use coexistence::{
    access_delay, airtime_lte, airtime_wifi, ap_senses_bs, bs_senses_node, csat_trace,
    csat_trace_backlogged, CoexState, NullingDecision,
};
pub use harness::{
    aggregate, emit, run_sweep, CellAggregate, ExperimentConfig, HarnessError, OutputFormat,
    TrialResult,
};
pub use optimizer::{
    solve_exhaustive, solve_greedy, solve_no_null, Method, NullingSolution, OptimizerError,
};
pub use rate::{evaluate, lte_rate, wifi_throughput, Policy, ThroughputReport};
pub use scenario::{
    dbm_to_watts, pathloss_gain, sample_scenario, watts_to_dbm, Node, NodeRole, RadioParams,
    Scenario, ScenarioError,
};
