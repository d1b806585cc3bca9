//! CES combination of SNR and occupancy utilities, channel ranking, the
//! occupancy-only baseline, and parameter fitting against a reference
//! ranking.
//!
//! The combined utility of a channel is
//!
//! ```text
//! U = w_snr^(1-sigma) * U_snr^sigma + w_occ^(1-sigma) * U_occ^sigma
//! ```
//!
//! an additive constant-elasticity-of-substitution form with no outer
//! exponent. `sigma` in (0, 1] sets how readily one parameter substitutes
//! for the other; at `sigma = 1` the weights vanish and the form collapses
//! to the plain sum. The raw value peaks at
//! `w_snr^(1-sigma) + w_occ^(1-sigma)`; [`CesParams::combine_normalized`]
//! divides by that maximum so combined utilities live in [0, 1] regardless
//! of the parameters.

use crate::error::{Error, Result};
use crate::utility::{utility_occupancy, utility_snr, CurveFamily, UtilityCurve, UtilityValue};

/// One sensed channel: carrier frequency, SNR, and occupancy rate.
///
/// Occupancy is stored as a fraction in [0, 1]; the CSV wire format carries
/// it as a percentage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelObservation {
    frequency_ghz: f64,
    snr_db: f64,
    occupancy: f64,
}

impl ChannelObservation {
    pub fn new(frequency_ghz: f64, snr_db: f64, occupancy: f64) -> Result<Self> {
        if !(frequency_ghz.is_finite() && frequency_ghz > 0.0) {
            return Err(Error::Domain(format!(
                "frequency must be finite and > 0 GHz, got {frequency_ghz}"
            )));
        }
        if !snr_db.is_finite() {
            return Err(Error::Domain(format!("SNR must be finite, got {snr_db}")));
        }
        if !occupancy.is_finite() || !(0.0..=1.0).contains(&occupancy) {
            return Err(Error::Domain(format!(
                "occupancy must lie in [0, 1], got {occupancy}"
            )));
        }
        Ok(Self {
            frequency_ghz,
            snr_db,
            occupancy,
        })
    }

    pub fn frequency_ghz(&self) -> f64 {
        self.frequency_ghz
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    /// Occupancy as a fraction in [0, 1].
    pub fn occupancy(&self) -> f64 {
        self.occupancy
    }
}

/// Elasticity of substitution derived from sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho {
    /// `rho = 1 / (1 - sigma)` for sigma < 1.
    Finite(f64),
    /// The sigma = 1 limit, where the two utilities are perfect substitutes.
    PerfectSubstitutes,
}

/// CES weights and elasticity exponent.
///
/// Weights are normalized to sum to 1 at construction; sigma must lie in
/// (0, 1]. Sigma = 0 would collapse the form to the constant
/// `w_snr + w_occ` and is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesParams {
    w_snr: f64,
    w_occ: f64,
    sigma: f64,
}

impl CesParams {
    pub fn new(w_snr: f64, w_occ: f64, sigma: f64) -> Result<Self> {
        if !(w_snr.is_finite() && w_snr > 0.0 && w_occ.is_finite() && w_occ > 0.0) {
            return Err(Error::Parameter(format!(
                "CES weights must be finite and > 0, got {w_snr} and {w_occ}"
            )));
        }
        if !sigma.is_finite() || sigma <= 0.0 || sigma > 1.0 {
            return Err(Error::Parameter(format!(
                "sigma must lie in (0, 1], got {sigma}"
            )));
        }
        let sum = w_snr + w_occ;
        Ok(Self {
            w_snr: w_snr / sum,
            w_occ: w_occ / sum,
            sigma,
        })
    }

    pub fn w_snr(&self) -> f64 {
        self.w_snr
    }

    pub fn w_occ(&self) -> f64 {
        self.w_occ
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho(&self) -> Rho {
        if self.sigma == 1.0 {
            Rho::PerfectSubstitutes
        } else {
            Rho::Finite(1.0 / (1.0 - self.sigma))
        }
    }

    /// Largest raw value [`ces_combine`] can produce (both utilities at 1).
    pub fn max_raw(&self) -> f64 {
        if self.sigma == 1.0 {
            2.0
        } else {
            let e = 1.0 - self.sigma;
            self.w_snr.powf(e) + self.w_occ.powf(e)
        }
    }

    /// Raw CES value rescaled to [0, 1] by [`CesParams::max_raw`].
    pub fn combine_normalized(&self, u_snr: UtilityValue, u_occ: UtilityValue) -> f64 {
        ces_combine(self, u_snr, u_occ) / self.max_raw()
    }
}

/// The additive CES form, exactly as printed: no outer exponent.
///
/// At sigma = 1 the weight exponents vanish and the result is exactly
/// `u_snr + u_occ`.
pub fn ces_combine(params: &CesParams, u_snr: UtilityValue, u_occ: UtilityValue) -> f64 {
    let (a, b) = (u_snr.value(), u_occ.value());
    if params.sigma == 1.0 {
        return a + b;
    }
    let e = 1.0 - params.sigma;
    params.w_snr.powf(e) * a.powf(params.sigma) + params.w_occ.powf(e) * b.powf(params.sigma)
}

/// An observation with its component utilities, combined utility, and rank.
///
/// `combined` is the normalized CES value in [0, 1]; reports scale it to
/// 0-100 at display time. `input_index` is the observation's position in
/// the list that was ranked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedChannel {
    pub observation: ChannelObservation,
    pub u_snr: UtilityValue,
    pub u_occ: UtilityValue,
    pub combined: f64,
    pub rank: usize,
    pub input_index: usize,
}

/// Default SNR curve: the half tanh sigmoid with alpha 0.5 and midpoint 0,
/// i.e. `1/2 + 1/2 * tanh(x/2)`.
pub fn default_snr_curve() -> UtilityCurve {
    UtilityCurve::new(CurveFamily::TanhHalf, 0.5, 1.0, 0.0, 20.0)
        .expect("default SNR curve parameters are valid")
}

/// Default occupancy curve: the half tanh sigmoid mirrored about 0.5 with
/// alpha 0.5.
pub fn default_occupancy_curve() -> UtilityCurve {
    UtilityCurve::new(CurveFamily::TanhHalf, 0.5, 1.0, 0.5, 1.0)
        .expect("default occupancy curve parameters are valid")
}

/// Default CES parameters: symmetric weights, sigma 0.5.
pub fn default_ces_params() -> CesParams {
    CesParams::new(0.5, 0.5, 0.5).expect("default CES parameters are valid")
}

fn evaluate(
    observations: &[ChannelObservation],
    snr_curve: &UtilityCurve,
    occ_curve: &UtilityCurve,
    params: &CesParams,
) -> Result<Vec<RankedChannel>> {
    observations
        .iter()
        .enumerate()
        .map(|(input_index, &observation)| {
            let u_snr = utility_snr(snr_curve, observation.snr_db())?;
            let u_occ = utility_occupancy(occ_curve, observation.occupancy())?;
            Ok(RankedChannel {
                observation,
                u_snr,
                u_occ,
                combined: params.combine_normalized(u_snr, u_occ),
                rank: 0,
                input_index,
            })
        })
        .collect()
}

/// Rank channels by combined CES utility, descending.
///
/// Ties break on higher SNR, then lower occupancy, then higher frequency,
/// then input order. The frequency direction follows the published ranking
/// of equal-utility channels; see the baseline tables this reproduces.
pub fn rank_channels(
    observations: &[ChannelObservation],
    snr_curve: &UtilityCurve,
    occ_curve: &UtilityCurve,
    params: &CesParams,
) -> Result<Vec<RankedChannel>> {
    if observations.is_empty() {
        return Err(Error::EmptyInput(
            "rank_channels needs at least one observation",
        ));
    }
    let mut ranked = evaluate(observations, snr_curve, occ_curve, params)?;
    ranked.sort_by(|a, b| {
        b.combined
            .total_cmp(&a.combined)
            .then(b.observation.snr_db().total_cmp(&a.observation.snr_db()))
            .then(
                a.observation
                    .occupancy()
                    .total_cmp(&b.observation.occupancy()),
            )
            .then(
                b.observation
                    .frequency_ghz()
                    .total_cmp(&a.observation.frequency_ghz()),
            )
    });
    for (i, channel) in ranked.iter_mut().enumerate() {
        channel.rank = i + 1;
    }
    Ok(ranked)
}

/// The occupancy-only baseline: sort ascending by occupancy, ties on higher
/// SNR then lower frequency.
///
/// Component and combined utilities are populated from the default curves
/// and parameters but play no part in the ordering.
pub fn rank_by_occupancy(observations: &[ChannelObservation]) -> Result<Vec<RankedChannel>> {
    if observations.is_empty() {
        return Err(Error::EmptyInput(
            "rank_by_occupancy needs at least one observation",
        ));
    }
    let mut ranked = evaluate(
        observations,
        &default_snr_curve(),
        &default_occupancy_curve(),
        &default_ces_params(),
    )?;
    ranked.sort_by(|a, b| {
        a.observation
            .occupancy()
            .total_cmp(&b.observation.occupancy())
            .then(b.observation.snr_db().total_cmp(&a.observation.snr_db()))
            .then(
                a.observation
                    .frequency_ghz()
                    .total_cmp(&b.observation.frequency_ghz()),
            )
    });
    for (i, channel) in ranked.iter_mut().enumerate() {
        channel.rank = i + 1;
    }
    Ok(ranked)
}

/// Grid of candidate CES parameters for [`fit_ces_params`].
#[derive(Debug, Clone, PartialEq)]
pub struct CesGrid {
    pub sigmas: Vec<f64>,
    pub w_snrs: Vec<f64>,
}

impl Default for CesGrid {
    /// sigma in {0.1, ..., 1.0} step 0.1; w_snr in {0.05, ..., 0.95} step 0.05.
    fn default() -> Self {
        Self {
            sigmas: (1..=10).map(|i| i as f64 / 10.0).collect(),
            w_snrs: (1..=19).map(|j| j as f64 * 0.05).collect(),
        }
    }
}

/// Kendall rank correlation with tie correction (tau-b).
///
/// Returns a value in [-1, 1]; 0 when either sequence is fully tied.
/// Both slices must have the same length.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "kendall_tau_b needs paired samples");
    let n = x.len();
    let (mut concordant, mut discordant) = (0u64, 0u64);
    let (mut ties_x, mut ties_y) = (0u64, 0u64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 && dy == 0.0 {
                continue;
            } else if dx == 0.0 {
                ties_x += 1;
            } else if dy == 0.0 {
                ties_y += 1;
            } else if (dx > 0.0) == (dy > 0.0) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let pairs_x = (concordant + discordant + ties_x) as f64;
    let pairs_y = (concordant + discordant + ties_y) as f64;
    let denom = (pairs_x * pairs_y).sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (concordant as f64 - discordant as f64) / denom
}

/// Exhaustive grid search for the CES parameters whose induced ranking best
/// agrees with a reference ranking, scored by Kendall tau-b.
///
/// `reference` pairs observation indices with their reference ranks and may
/// cover any subset of at least two observations. Ties in the achieved score
/// resolve to the smaller sigma, then the smaller w_snr (the grid is scanned
/// in ascending order and only strict improvements replace the incumbent).
pub fn fit_ces_params(
    observations: &[ChannelObservation],
    reference: &[(usize, usize)],
    snr_curve: &UtilityCurve,
    occ_curve: &UtilityCurve,
    grid: &CesGrid,
) -> Result<(CesParams, f64)> {
    if observations.is_empty() {
        return Err(Error::EmptyInput(
            "fit_ces_params needs at least one observation",
        ));
    }
    if grid.sigmas.is_empty() || grid.w_snrs.is_empty() {
        return Err(Error::Parameter("parameter grid must be non-empty".into()));
    }
    if reference.len() < 2 {
        return Err(Error::Parameter(format!(
            "reference ranking needs at least two entries, got {}",
            reference.len()
        )));
    }
    let mut seen = vec![false; observations.len()];
    for &(index, _) in reference {
        if index >= observations.len() {
            return Err(Error::Consistency(format!(
                "reference names observation index {index}, but only {} observations exist",
                observations.len()
            )));
        }
        if seen[index] {
            return Err(Error::Consistency(format!(
                "reference names observation index {index} more than once"
            )));
        }
        seen[index] = true;
    }

    let reference_ranks: Vec<f64> = reference.iter().map(|&(_, rank)| rank as f64).collect();
    let mut best: Option<(CesParams, f64)> = None;
    for &sigma in &grid.sigmas {
        for &w_snr in &grid.w_snrs {
            let params = CesParams::new(w_snr, 1.0 - w_snr, sigma)?;
            let ranked = rank_channels(observations, snr_curve, occ_curve, &params)?;
            let mut position = vec![0usize; observations.len()];
            for channel in &ranked {
                position[channel.input_index] = channel.rank;
            }
            let induced: Vec<f64> = reference
                .iter()
                .map(|&(index, _)| position[index] as f64)
                .collect();
            let score = kendall_tau_b(&reference_ranks, &induced);
            if best
                .as_ref()
                .is_none_or(|&(_, incumbent)| score > incumbent)
            {
                best = Some((params, score));
            }
        }
    }
    Ok(best.expect("grid is non-empty"))
}
