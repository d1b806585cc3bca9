//! End-to-end sensing simulator: primary-user ON/OFF activity, noisy energy
//! measurements, threshold detection, and Frequentist occupancy estimation.
//!
//! The traffic model is a two-state Markov chain with geometric holding
//! times. Holding means are chosen as `h_on = 2 * mean_hold_slots * duty`
//! and `h_off = 2 * mean_hold_slots * (1 - duty)`, which makes the
//! stationary ON probability exactly `duty_cycle` and the average sojourn
//! (over alternating ON/OFF visits) equal to `mean_hold_slots`. When a
//! holding mean would fall below one slot, both transition probabilities are
//! scaled down together, which preserves the stationary distribution.
//!
//! Each slot's energy is the mean of `samples_per_slot` squared real-valued
//! samples: pure Gaussian noise when the primary user is OFF, a constant
//! amplitude at the configured SNR plus the same noise when ON. Under noise
//! only, `N * energy / noise_power` follows a chi-square distribution with
//! `N` degrees of freedom, which is what the false-alarm calibration
//! inverts.
//!
//! All randomness comes from a ChaCha8 stream cipher seeded explicitly, so
//! identical inputs produce bit-identical traces on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Deserialize;
use statrs::function::gamma::gamma_ur;

use crate::ces::ChannelObservation;
use crate::error::{Error, Result};

/// Ground-truth description of one simulated channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimChannelConfig {
    /// Carrier label in GHz.
    pub frequency_ghz: f64,
    /// SNR in dB while the primary user transmits.
    pub true_snr_db: f64,
    /// Long-run fraction of ON time, in (0, 1).
    pub duty_cycle: f64,
    /// Expected slots per ON or OFF sojourn.
    pub mean_hold_slots: f64,
    /// Linear-scale noise variance (reference 1.0).
    pub noise_power: f64,
}

impl SimChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.frequency_ghz.is_finite() && self.frequency_ghz > 0.0) {
            return Err(Error::Parameter(format!(
                "frequency must be finite and > 0 GHz, got {}",
                self.frequency_ghz
            )));
        }
        if !self.true_snr_db.is_finite() {
            return Err(Error::Parameter(format!(
                "true SNR must be finite, got {}",
                self.true_snr_db
            )));
        }
        if !self.duty_cycle.is_finite() || self.duty_cycle <= 0.0 || self.duty_cycle >= 1.0 {
            return Err(Error::Parameter(format!(
                "duty cycle must lie in (0, 1), got {}",
                self.duty_cycle
            )));
        }
        if !self.mean_hold_slots.is_finite() || self.mean_hold_slots < 1.0 {
            return Err(Error::Parameter(format!(
                "mean hold must be at least one slot, got {}",
                self.mean_hold_slots
            )));
        }
        if !(self.noise_power.is_finite() && self.noise_power > 0.0) {
            return Err(Error::Parameter(format!(
                "noise power must be finite and > 0, got {}",
                self.noise_power
            )));
        }
        Ok(())
    }
}

/// Whether the primary user actually transmitted in a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrueState {
    On,
    Off,
}

/// The detector's verdict for a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Busy,
    Idle,
}

/// One sensing slot: ground truth, measured energy, detector decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRecord {
    pub true_state: TrueState,
    pub measured_energy: f64,
    pub decision: Decision,
}

/// Time series of per-slot measurements from one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingTrace {
    pub slots: Vec<SlotRecord>,
    pub samples_per_slot: usize,
    pub threshold: f64,
    pub seed: u64,
}

/// Threshold comparison: busy only when the energy strictly exceeds the
/// threshold.
pub fn energy_detect(measured_energy: f64, threshold: f64) -> Result<Decision> {
    if !measured_energy.is_finite() || measured_energy < 0.0 {
        return Err(Error::Domain(format!(
            "measured energy must be finite and >= 0, got {measured_energy}"
        )));
    }
    if !threshold.is_finite() || threshold <= 0.0 {
        return Err(Error::Domain(format!(
            "detection threshold must be finite and > 0, got {threshold}"
        )));
    }
    Ok(if measured_energy > threshold {
        Decision::Busy
    } else {
        Decision::Idle
    })
}

/// Detection threshold achieving a target false-alarm probability on pure
/// noise.
///
/// Solves `P(chi2_N > N * t / noise_power) = target_pfa` for `t` by
/// bisection on the regularized upper incomplete gamma tail, to a relative
/// tolerance of 1e-10.
pub fn threshold_for_false_alarm(
    target_pfa: f64,
    samples_per_slot: usize,
    noise_power: f64,
) -> Result<f64> {
    if !target_pfa.is_finite() || target_pfa <= 0.0 || target_pfa >= 1.0 {
        return Err(Error::Domain(format!(
            "target false-alarm probability must lie strictly in (0, 1), got {target_pfa}"
        )));
    }
    if samples_per_slot == 0 {
        return Err(Error::Parameter("samples_per_slot must be >= 1".into()));
    }
    if !(noise_power.is_finite() && noise_power > 0.0) {
        return Err(Error::Parameter(format!(
            "noise power must be finite and > 0, got {noise_power}"
        )));
    }
    let n = samples_per_slot as f64;
    let survival = |t: f64| gamma_ur(n / 2.0, n * t / (2.0 * noise_power));

    let mut hi = noise_power;
    let mut guard = 0;
    while survival(hi) > target_pfa {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::Parameter(
                "false-alarm threshold bracket failed to close".into(),
            ));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if survival(mid) > target_pfa {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn slot_energy<R: Rng>(
    rng: &mut R,
    noise: &Normal<f64>,
    samples_per_slot: usize,
    amplitude: f64,
) -> f64 {
    let mut acc = 0.0;
    for _ in 0..samples_per_slot {
        let sample = amplitude + noise.sample(rng);
        acc += sample * sample;
    }
    acc / samples_per_slot as f64
}

/// Simulate a channel for `n_slots` sensing slots.
///
/// Deterministic for a given seed: the per-slot sequence draws the initial
/// state, then for each slot the energy samples followed by one transition
/// draw.
pub fn simulate_trace(
    config: &SimChannelConfig,
    n_slots: usize,
    samples_per_slot: usize,
    threshold: f64,
    seed: u64,
) -> Result<SensingTrace> {
    config.validate()?;
    if n_slots == 0 {
        return Err(Error::Parameter("n_slots must be >= 1".into()));
    }
    if samples_per_slot == 0 {
        return Err(Error::Parameter("samples_per_slot must be >= 1".into()));
    }
    if !threshold.is_finite() || threshold <= 0.0 {
        return Err(Error::Parameter(format!(
            "detection threshold must be finite and > 0, got {threshold}"
        )));
    }

    // Geometric holding times with stationary ON probability = duty_cycle.
    let h_on = 2.0 * config.mean_hold_slots * config.duty_cycle;
    let h_off = 2.0 * config.mean_hold_slots * (1.0 - config.duty_cycle);
    let mut p_on_off = 1.0 / h_on;
    let mut p_off_on = 1.0 / h_off;
    let overshoot = p_on_off.max(p_off_on).max(1.0);
    p_on_off /= overshoot;
    p_off_on /= overshoot;

    let snr_linear = 10f64.powf(config.true_snr_db / 10.0);
    let amplitude = (config.noise_power * snr_linear).sqrt();
    let noise = Normal::new(0.0, config.noise_power.sqrt())
        .map_err(|e| Error::Parameter(format!("noise distribution: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = if rng.gen::<f64>() < config.duty_cycle {
        TrueState::On
    } else {
        TrueState::Off
    };

    let mut slots = Vec::with_capacity(n_slots);
    for _ in 0..n_slots {
        let signal = match state {
            TrueState::On => amplitude,
            TrueState::Off => 0.0,
        };
        let measured_energy = slot_energy(&mut rng, &noise, samples_per_slot, signal);
        let decision = energy_detect(measured_energy, threshold)?;
        slots.push(SlotRecord {
            true_state: state,
            measured_energy,
            decision,
        });

        let flip = match state {
            TrueState::On => p_on_off,
            TrueState::Off => p_off_on,
        };
        if rng.gen::<f64>() < flip {
            state = match state {
                TrueState::On => TrueState::Off,
                TrueState::Off => TrueState::On,
            };
        }
    }

    Ok(SensingTrace {
        slots,
        samples_per_slot,
        threshold,
        seed,
    })
}

/// Frequentist occupancy estimate: the fraction of slots decided busy.
pub fn estimate_occupancy_frequentist(trace: &SensingTrace) -> Result<f64> {
    if trace.slots.is_empty() {
        return Err(Error::EmptyInput(
            "occupancy estimation needs at least one slot",
        ));
    }
    let busy = trace
        .slots
        .iter()
        .filter(|s| s.decision == Decision::Busy)
        .count();
    Ok(busy as f64 / trace.slots.len() as f64)
}

/// Sense one channel end to end and package the result as a
/// [`ChannelObservation`]: calibrate the detector for `target_pfa`, run the
/// trace, estimate occupancy.
pub fn observe_channel(
    config: &SimChannelConfig,
    n_slots: usize,
    samples_per_slot: usize,
    target_pfa: f64,
    seed: u64,
) -> Result<ChannelObservation> {
    let threshold = threshold_for_false_alarm(target_pfa, samples_per_slot, config.noise_power)?;
    let trace = simulate_trace(config, n_slots, samples_per_slot, threshold, seed)?;
    let occupancy = estimate_occupancy_frequentist(&trace)?;
    ChannelObservation::new(config.frequency_ghz, config.true_snr_db, occupancy)
}

/// Sensing settings shared by every channel of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensingSettings {
    pub n_slots: usize,
    pub samples_per_slot: usize,
    pub target_pfa: f64,
}

/// A parsed scenario: sensing settings plus the channel list.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sensing: SensingSettings,
    pub channels: Vec<SimChannelConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    sensing: SensingSettings,
    #[serde(default)]
    channel: Vec<ChannelDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDoc {
    frequency_ghz: f64,
    true_snr_db: f64,
    duty_cycle: f64,
    #[serde(default = "default_mean_hold_slots")]
    mean_hold_slots: f64,
    #[serde(default = "default_noise_power")]
    noise_power: f64,
}

fn default_mean_hold_slots() -> f64 {
    10.0
}

fn default_noise_power() -> f64 {
    1.0
}

/// Parse a TOML scenario file.
///
/// Expected shape:
///
/// ```toml
/// [sensing]
/// n_slots = 10000
/// samples_per_slot = 100
/// target_pfa = 0.05
///
/// [[channel]]
/// frequency_ghz = 2.462
/// true_snr_db = 12.0
/// duty_cycle = 0.01
/// mean_hold_slots = 10.0   # optional, default 10
/// noise_power = 1.0        # optional, default 1
/// ```
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|span| text[..span.start.min(text.len())].lines().count().max(1) as u64)
            .unwrap_or(0);
        Error::Parse {
            line,
            message: e.message().to_string(),
        }
    })?;
    if doc.channel.is_empty() {
        return Err(Error::Parameter("scenario lists no channels".into()));
    }
    if !doc.sensing.target_pfa.is_finite()
        || doc.sensing.target_pfa <= 0.0
        || doc.sensing.target_pfa >= 1.0
    {
        return Err(Error::Parameter(format!(
            "target_pfa must lie in (0, 1), got {}",
            doc.sensing.target_pfa
        )));
    }
    if doc.sensing.n_slots == 0 || doc.sensing.samples_per_slot == 0 {
        return Err(Error::Parameter(
            "n_slots and samples_per_slot must be >= 1".into(),
        ));
    }
    let channels: Vec<SimChannelConfig> = doc
        .channel
        .into_iter()
        .map(|c| {
            let config = SimChannelConfig {
                frequency_ghz: c.frequency_ghz,
                true_snr_db: c.true_snr_db,
                duty_cycle: c.duty_cycle,
                mean_hold_slots: c.mean_hold_slots,
                noise_power: c.noise_power,
            };
            config.validate().map(|()| config)
        })
        .collect::<Result<_>>()?;
    Ok(Scenario {
        sensing: doc.sensing,
        channels,
    })
}

/// Observe every channel of a scenario. Channel `i` runs with seed
/// `base_seed + i`, so a scenario is reproducible from one seed.
pub fn run_scenario(scenario: &Scenario, base_seed: u64) -> Result<Vec<ChannelObservation>> {
    scenario
        .channels
        .iter()
        .enumerate()
        .map(|(i, config)| {
            observe_channel(
                config,
                scenario.sensing.n_slots,
                scenario.sensing.samples_per_slot,
                scenario.sensing.target_pfa,
                base_seed.wrapping_add(i as u64),
            )
        })
        .collect()
}
