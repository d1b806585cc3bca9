//! Utility-based channel ranking for cognitive radio.
//!
//! A cognitive radio senses many channels and must pick the best one. Rating
//! channels by occupancy alone ignores signal quality; this crate scores each
//! channel by passing its SNR and its occupancy rate through sigmoid-family
//! utility curves and combining the two scores with a
//! constant-elasticity-of-substitution (CES) function, so a strength in one
//! parameter can stand in for a weakness in the other.
//!
//! - [`utility`] — the four curve families, their mirrored (occupancy) forms,
//!   and the hard-decision SINR reference utility.
//! - [`ces`] — CES combination, channel ranking, the occupancy-only
//!   baseline, and grid-search parameter fitting scored by Kendall tau-b.
//! - [`sim`] — an energy-detection sensing simulator producing observations:
//!   two-state Markov primary-user activity, chi-square calibrated detection
//!   thresholds, Frequentist occupancy estimates.
//! - [`io`] — CSV/TOML wire formats and the text/JSON reports.
//! - [`cli`] — the `chanrank` command-line tool.

pub mod ces;
pub mod cli;
pub mod error;
pub mod io;
pub mod sim;
pub mod utility;

pub use ces::{
    ces_combine, default_ces_params, default_occupancy_curve, default_snr_curve, fit_ces_params,
    kendall_tau_b, rank_by_occupancy, rank_channels, CesGrid, CesParams, ChannelObservation,
    RankedChannel, Rho,
};
pub use error::{Error, Result};
pub use sim::{
    energy_detect, estimate_occupancy_frequentist, observe_channel, parse_scenario, run_scenario,
    simulate_trace, threshold_for_false_alarm, Decision, Scenario, SensingTrace, SimChannelConfig,
    SlotRecord, TrueState,
};
pub use utility::{
    sample_curve, utility_occupancy, utility_sinr_hard, utility_snr, CurveFamily, UtilityCurve,
    UtilityValue,
};
