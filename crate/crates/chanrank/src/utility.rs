//! Sigmoid-family utility models for channel quality.
//!
//! Four curve families map a channel parameter to a usefulness score:
//! two logistic forms (one with an explicit midpoint, one anchored at the
//! origin), a hyperbolic tangent scaled by the maximum input value, and a
//! half-offset hyperbolic tangent with intrinsic range [0, 1].
//!
//! Every family is evaluated on the steepness argument
//! `alpha * (x - midpoint)` for an increasing (SNR) curve and on the mirrored
//! argument `-alpha * (x - midpoint)` for a decreasing (occupancy) curve, so
//! the occupancy curve is the exact reflection of the SNR curve about the
//! midpoint.
//!
//! All outputs are normalized to [0, 1] by dividing by the family's intrinsic
//! maximum (`A` for the logistic forms, `2 * input_max` for the scaled tanh,
//! 1 for the half tanh). Display scaling to a 0-100 range happens only at
//! report time; combining utilities from mismatched scales would make the
//! CES combination meaningless.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The four supported curve shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveFamily {
    /// `A / (1 + e^(-alpha * (x - midpoint)))` — logistic with explicit midpoint.
    LogisticMidpoint,
    /// `A * e^t / (1 + e^t)` with `t = alpha * (x - midpoint)` — algebraically
    /// the same function as [`CurveFamily::LogisticMidpoint`], kept as a
    /// separate evaluation route (midpoint defaults to 0).
    Logistic,
    /// `input_max * (1 + tanh(alpha * (x - midpoint)))` — peaks at `2 * input_max`.
    TanhScaled,
    /// `1/2 + 1/2 * tanh(alpha * (x - midpoint))` — intrinsic range [0, 1].
    /// With `alpha = 0.5` and `midpoint = 0` this is the plain
    /// `1/2 + 1/2 * tanh(x/2)` sigmoid.
    TanhHalf,
}

impl CurveFamily {
    pub const ALL: [CurveFamily; 4] = [
        CurveFamily::LogisticMidpoint,
        CurveFamily::Logistic,
        CurveFamily::TanhScaled,
        CurveFamily::TanhHalf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurveFamily::LogisticMidpoint => "logistic-midpoint",
            CurveFamily::Logistic => "logistic",
            CurveFamily::TanhScaled => "tanh-scaled",
            CurveFamily::TanhHalf => "tanh-half",
        }
    }
}

impl fmt::Display for CurveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurveFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CurveFamily::ALL
            .into_iter()
            .find(|fam| fam.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown curve family {s:?}")))
    }
}

/// A curve family plus its shape parameters.
///
/// Invariants enforced at construction: `alpha > 0`, `max_utility > 0`,
/// `input_max > midpoint`, all parameters finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityCurve {
    family: CurveFamily,
    alpha: f64,
    max_utility: f64,
    midpoint: f64,
    input_max: f64,
}

impl UtilityCurve {
    pub fn new(
        family: CurveFamily,
        alpha: f64,
        max_utility: f64,
        midpoint: f64,
        input_max: f64,
    ) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Parameter(format!(
                "curve steepness alpha must be finite and > 0, got {alpha}"
            )));
        }
        if !(max_utility.is_finite() && max_utility > 0.0) {
            return Err(Error::Parameter(format!(
                "max_utility must be finite and > 0, got {max_utility}"
            )));
        }
        if !midpoint.is_finite() || !input_max.is_finite() || input_max <= midpoint {
            return Err(Error::Parameter(format!(
                "curve requires finite input_max > midpoint, got midpoint {midpoint}, input_max {input_max}"
            )));
        }
        Ok(Self {
            family,
            alpha,
            max_utility,
            midpoint,
            input_max,
        })
    }

    pub fn family(&self) -> CurveFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn max_utility(&self) -> f64 {
        self.max_utility
    }

    pub fn midpoint(&self) -> f64 {
        self.midpoint
    }

    pub fn input_max(&self) -> f64 {
        self.input_max
    }

    /// The value the raw curve approaches as its argument grows without
    /// bound; raw outputs are divided by this before leaving the module.
    pub fn intrinsic_max(&self) -> f64 {
        match self.family {
            CurveFamily::LogisticMidpoint | CurveFamily::Logistic => self.max_utility,
            CurveFamily::TanhScaled => 2.0 * self.input_max,
            CurveFamily::TanhHalf => 1.0,
        }
    }

    /// Normalized curve value on the steepness argument `t`.
    fn eval_normalized(&self, t: f64) -> f64 {
        match self.family {
            CurveFamily::LogisticMidpoint => 1.0 / (1.0 + (-t).exp()),
            CurveFamily::Logistic => {
                // e^t / (1 + e^t) overflows for large positive t; switch to
                // the complementary form there. Both branches are the same
                // function.
                if t <= 0.0 {
                    let e = t.exp();
                    e / (1.0 + e)
                } else {
                    1.0 / (1.0 + (-t).exp())
                }
            }
            CurveFamily::TanhScaled | CurveFamily::TanhHalf => 0.5 + 0.5 * t.tanh(),
        }
    }
}

/// A utility score normalized to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UtilityValue(f64);

impl UtilityValue {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::Domain(format!(
                "utility value must lie in [0, 1], got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Utility of a signal-to-noise ratio: the selected family evaluated at
/// `alpha * (snr_db - midpoint)`, normalized to [0, 1]. Strictly increasing
/// in `snr_db`.
pub fn utility_snr(curve: &UtilityCurve, snr_db: f64) -> Result<UtilityValue> {
    if !snr_db.is_finite() {
        return Err(Error::Domain(format!("SNR must be finite, got {snr_db}")));
    }
    let t = curve.alpha * (snr_db - curve.midpoint);
    UtilityValue::new(curve.eval_normalized(t))
}

/// Utility of a spectrum occupancy rate: the same family evaluated on the
/// mirrored argument `-alpha * (occupancy - midpoint)`, normalized to [0, 1].
/// Strictly decreasing in `occupancy`; low occupancy earns high utility.
pub fn utility_occupancy(curve: &UtilityCurve, occupancy: f64) -> Result<UtilityValue> {
    if !occupancy.is_finite() || !(0.0..=1.0).contains(&occupancy) {
        return Err(Error::Domain(format!(
            "occupancy must lie in [0, 1], got {occupancy}"
        )));
    }
    let t = -curve.alpha * (occupancy - curve.midpoint);
    UtilityValue::new(curve.eval_normalized(t))
}

/// Hard-decision SINR utility: 0 below the threshold, 1 at or above it.
/// The threshold itself is assigned to the acceptable side.
pub fn utility_sinr_hard(sinr_db: f64, threshold_db: f64) -> Result<UtilityValue> {
    if !sinr_db.is_finite() || !threshold_db.is_finite() {
        return Err(Error::Domain(format!(
            "SINR and threshold must be finite, got {sinr_db} and {threshold_db}"
        )));
    }
    UtilityValue::new(if sinr_db >= threshold_db { 1.0 } else { 0.0 })
}

/// Evenly spaced samples of a curve, endpoints inclusive.
///
/// With `mirrored` set the curve is evaluated through [`utility_occupancy`],
/// so the domain must stay within [0, 1].
pub fn sample_curve(
    curve: &UtilityCurve,
    domain_lo: f64,
    domain_hi: f64,
    n_points: usize,
    mirrored: bool,
) -> Result<Vec<(f64, UtilityValue)>> {
    if !domain_lo.is_finite() || !domain_hi.is_finite() || domain_lo >= domain_hi {
        return Err(Error::Parameter(format!(
            "sample domain must satisfy lo < hi, got [{domain_lo}, {domain_hi}]"
        )));
    }
    if n_points < 2 {
        return Err(Error::Parameter(format!(
            "need at least 2 sample points, got {n_points}"
        )));
    }
    let step = (domain_hi - domain_lo) / (n_points - 1) as f64;
    let mut samples = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let x = if i == n_points - 1 {
            domain_hi
        } else {
            domain_lo + step * i as f64
        };
        let u = if mirrored {
            utility_occupancy(curve, x)?
        } else {
            utility_snr(curve, x)?
        };
        samples.push((x, u));
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn logistic_midpoint(alpha: f64, midpoint: f64) -> UtilityCurve {
        UtilityCurve::new(
            CurveFamily::LogisticMidpoint,
            alpha,
            100.0,
            midpoint,
            midpoint + 40.0,
        )
        .unwrap()
    }

    fn tanh_half(alpha: f64, midpoint: f64) -> UtilityCurve {
        UtilityCurve::new(CurveFamily::TanhHalf, alpha, 1.0, midpoint, midpoint + 40.0).unwrap()
    }

    #[test]
    fn logistic_midpoint_symmetry_at_zero() {
        let curve = logistic_midpoint(0.2, 0.0);
        assert_eq!(utility_snr(&curve, 0.0).unwrap().value(), 0.5);
    }

    #[test]
    fn logistic_midpoint_high_snr_frozen() {
        // 100/(1 + e^-4) then normalized by 100
        let curve = logistic_midpoint(0.2, 0.0);
        let u = utility_snr(&curve, 20.0).unwrap().value();
        assert!((u - 0.9820137900379084).abs() < 1e-12, "got {u}");
    }

    #[test]
    fn tanh_scaled_midpoint_is_half() {
        // raw value 20, intrinsic max 2 * 20 = 40
        let curve = UtilityCurve::new(CurveFamily::TanhScaled, 0.1, 100.0, 0.0, 20.0).unwrap();
        assert_eq!(curve.intrinsic_max(), 40.0);
        assert_eq!(utility_snr(&curve, 0.0).unwrap().value(), 0.5);
    }

    #[test]
    fn tanh_half_frozen_values() {
        let curve = tanh_half(0.5, 0.0);
        assert_eq!(utility_snr(&curve, 0.0).unwrap().value(), 0.5);
        // 0.5 + 0.5 * tanh(6)
        let u = utility_snr(&curve, 12.0).unwrap().value();
        assert!((u - 0.9999938558253978).abs() < 1e-12, "got {u}");
    }

    #[test]
    fn occupancy_midpoint_symmetry() {
        let curve = tanh_half(0.5, 0.5);
        assert_eq!(utility_occupancy(&curve, 0.5).unwrap().value(), 0.5);
    }

    #[test]
    fn occupancy_mirrored_logistic_frozen() {
        // 1/(1 + e^-2.5) at occupancy 0 and its reflection at occupancy 1
        let curve = UtilityCurve::new(CurveFamily::LogisticMidpoint, 5.0, 100.0, 0.5, 1.0).unwrap();
        let at_zero = utility_occupancy(&curve, 0.0).unwrap().value();
        let at_one = utility_occupancy(&curve, 1.0).unwrap().value();
        assert!(
            (at_zero - 0.9241418199787564).abs() < 1e-12,
            "got {at_zero}"
        );
        assert!((at_one - 0.07585818002124355).abs() < 1e-12, "got {at_one}");
        assert!((at_zero + at_one - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hard_utility_threshold_sides() {
        assert_eq!(utility_sinr_hard(10.0, 5.0).unwrap().value(), 1.0);
        assert_eq!(utility_sinr_hard(4.999, 5.0).unwrap().value(), 0.0);
        // boundary belongs to the acceptable side
        assert_eq!(utility_sinr_hard(5.0, 5.0).unwrap().value(), 1.0);
    }

    #[test]
    fn hard_utility_is_two_valued() {
        for i in -200..=200 {
            let u = utility_sinr_hard(i as f64 * 0.5, 3.0).unwrap().value();
            assert!(u == 0.0 || u == 1.0);
        }
    }

    #[test]
    fn sample_curve_endpoints_frozen() {
        let curve = tanh_half(0.5, 0.0);
        let samples = sample_curve(&curve, -20.0, 20.0, 2, false).unwrap();
        assert_eq!(samples.len(), 2);
        assert_eq!(samples[0].0, -20.0);
        assert_eq!(samples[1].0, 20.0);
        // 0.5 + 0.5*tanh(-10) and its complement
        assert!((samples[0].1.value() - 2.0611536181902036e-9).abs() < 1e-12);
        assert!((samples[1].1.value() - 0.9999999979388464).abs() < 1e-12);
    }

    #[test]
    fn sample_curve_mirrored_decreases() {
        for family in CurveFamily::ALL {
            let curve = UtilityCurve::new(family, 5.0, 100.0, 0.5, 1.0).unwrap();
            let samples = sample_curve(&curve, 0.0, 1.0, 2, true).unwrap();
            assert!(samples[0].1.value() > samples[1].1.value(), "{family}");
        }
    }

    #[test]
    fn sample_curve_sweep_is_monotone() {
        let curve = logistic_midpoint(0.2, 0.0);
        let samples = sample_curve(&curve, -20.0, 20.0, 41, false).unwrap();
        assert_eq!(samples.len(), 41);
        for pair in samples.windows(2) {
            assert!(pair[0].1.value() < pair[1].1.value());
        }
    }

    #[test]
    fn snr_monotone_strictly_increasing_10k() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for family in CurveFamily::ALL {
            for _ in 0..10_000 {
                let alpha = rng.gen_range(0.05..=0.6);
                let midpoint = rng.gen_range(-2.0..=2.0);
                let curve =
                    UtilityCurve::new(family, alpha, 100.0, midpoint, midpoint + 40.0).unwrap();
                let a = rng.gen_range(-12.0..12.0);
                let b = a + rng.gen_range(0.01..6.0);
                let ua = utility_snr(&curve, a).unwrap().value();
                let ub = utility_snr(&curve, b).unwrap().value();
                assert!(
                    ua < ub,
                    "{family} alpha={alpha} at {a} vs {b}: {ua} !< {ub}"
                );
            }
        }
    }

    #[test]
    fn occupancy_monotone_strictly_decreasing_10k() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for family in CurveFamily::ALL {
            for _ in 0..10_000 {
                let alpha = rng.gen_range(0.5..=8.0);
                let curve = UtilityCurve::new(family, alpha, 100.0, 0.5, 1.0).unwrap();
                let a: f64 = rng.gen_range(0.0..0.99);
                let b = (a + rng.gen_range(0.001..0.5)).min(1.0);
                let ua = utility_occupancy(&curve, a).unwrap().value();
                let ub = utility_occupancy(&curve, b).unwrap().value();
                assert!(
                    ua > ub,
                    "{family} alpha={alpha} at {a} vs {b}: {ua} !> {ub}"
                );
            }
        }
    }

    #[test]
    fn midpoint_symmetry_within_1e12() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let alpha = rng.gen_range(0.05..=2.0);
            let midpoint = rng.gen_range(-5.0..=5.0);
            let d = rng.gen_range(0.0..=20.0);
            let lm = logistic_midpoint(alpha, midpoint);
            let th = tanh_half(alpha, midpoint);
            for curve in [&lm, &th] {
                let hi = utility_snr(curve, midpoint + d).unwrap().value();
                let lo = utility_snr(curve, midpoint - d).unwrap().value();
                assert!((hi + lo - 1.0).abs() < 1e-12, "d={d} alpha={alpha}");
            }
        }
    }

    #[test]
    fn logistic_routes_agree_within_1e12() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let alpha = rng.gen_range(0.01..=3.0);
            let x = rng.gen_range(-100.0..=100.0);
            let eq2 =
                UtilityCurve::new(CurveFamily::LogisticMidpoint, alpha, 100.0, 0.0, 40.0).unwrap();
            let eq3 = UtilityCurve::new(CurveFamily::Logistic, alpha, 100.0, 0.0, 40.0).unwrap();
            let a = utility_snr(&eq2, x).unwrap().value();
            let b = utility_snr(&eq3, x).unwrap().value();
            assert!((a - b).abs() < 1e-12, "alpha={alpha} x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(UtilityCurve::new(CurveFamily::Logistic, 0.0, 100.0, 0.0, 20.0).is_err());
        assert!(UtilityCurve::new(CurveFamily::Logistic, -1.0, 100.0, 0.0, 20.0).is_err());
        assert!(UtilityCurve::new(CurveFamily::Logistic, 1.0, 0.0, 0.0, 20.0).is_err());
        assert!(UtilityCurve::new(CurveFamily::Logistic, 1.0, 100.0, 20.0, 20.0).is_err());
        assert!(UtilityCurve::new(CurveFamily::Logistic, f64::NAN, 100.0, 0.0, 20.0).is_err());
    }

    #[test]
    fn rejects_domain_violations() {
        let curve = tanh_half(0.5, 0.0);
        assert!(matches!(
            utility_snr(&curve, f64::NAN),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            utility_snr(&curve, f64::INFINITY),
            Err(Error::Domain(_))
        ));
        let occ = tanh_half(0.5, 0.5);
        assert!(matches!(
            utility_occupancy(&occ, -0.1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            utility_occupancy(&occ, 1.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            utility_sinr_hard(f64::NAN, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sample_curve_rejects_bad_arguments() {
        let curve = tanh_half(0.5, 0.0);
        assert!(matches!(
            sample_curve(&curve, 1.0, 1.0, 2, false),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            sample_curve(&curve, 2.0, 1.0, 2, false),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            sample_curve(&curve, 0.0, 1.0, 1, false),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn family_names_round_trip() {
        for family in CurveFamily::ALL {
            assert_eq!(family.name().parse::<CurveFamily>().unwrap(), family);
        }
        assert!("nonsense".parse::<CurveFamily>().is_err());
    }

    proptest! {
        #[test]
        fn snr_utility_stays_in_unit_interval(
            x in -100.0f64..=100.0,
            alpha in 0.01f64..=5.0,
            fam_ix in 0usize..4,
        ) {
            let curve = UtilityCurve::new(CurveFamily::ALL[fam_ix], alpha, 100.0, 0.0, 20.0).unwrap();
            let u = utility_snr(&curve, x).unwrap().value();
            prop_assert!((0.0..=1.0).contains(&u));
        }

        #[test]
        fn occupancy_utility_stays_in_unit_interval(
            y in 0.0f64..=1.0,
            alpha in 0.01f64..=10.0,
            fam_ix in 0usize..4,
        ) {
            let curve = UtilityCurve::new(CurveFamily::ALL[fam_ix], alpha, 100.0, 0.5, 1.0).unwrap();
            let u = utility_occupancy(&curve, y).unwrap().value();
            prop_assert!((0.0..=1.0).contains(&u));
        }

        #[test]
        fn sampling_is_deterministic(
            lo in -50.0f64..0.0,
            span in 1.0f64..50.0,
            n in 2usize..64,
        ) {
            let curve = UtilityCurve::new(CurveFamily::TanhHalf, 0.5, 1.0, 0.0, 60.0).unwrap();
            let a = sample_curve(&curve, lo, lo + span, n, false).unwrap();
            let b = sample_curve(&curve, lo, lo + span, n, false).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
