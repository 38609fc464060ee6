//! Joint pass/fail probabilities of two one-channel polarizers for the three
//! pair-correlation models: orthodox quantum mechanics on the state
//! `(|H,H⟩ + e^{iφ}|V,V⟩)/√2`, and superluminal communication that falls back
//! to either uncorrelated or local-hidden-variable outcomes when the tachyon
//! cannot connect the two measurements in time.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::relativity::TachyonSpeed;
use crate::scalar::{lit, Real};

/// Polarization-entangled photon pair with relative phase `phi` (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledState<T> {
    pub phi: T,
}

impl<T: Real> EntangledState<T> {
    pub fn new(phi: T) -> Self {
        EntangledState { phi }
    }
}

impl<T: Real> Default for EntangledState<T> {
    fn default() -> Self {
        EntangledState { phi: T::zero() }
    }
}

/// Orientation of a one-channel polarizer, measured from the vertical axis, or
/// a removed polarizer (the `∞` setting) that transmits every photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolarizerSetting<T> {
    Angle(T),
    Removed,
}

impl<T: Real> PolarizerSetting<T> {
    /// Polarizer at `theta` radians, normalized into `[0, π)`.
    pub fn angle(theta: T) -> Self {
        let pi = T::PI();
        let mut a = theta % pi;
        if a < T::zero() {
            a = a + pi;
        }
        if a >= pi {
            a = a - pi;
        }
        PolarizerSetting::Angle(a)
    }

    pub fn is_removed(&self) -> bool {
        matches!(self, PolarizerSetting::Removed)
    }
}

/// Local-hidden-variable law used by the fallback.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LhvKind {
    /// Both photons carry a shared polarization angle `λ`; a photon passes iff
    /// the acute angle between `λ` and the polarizer axis is below `π/4`.
    Threshold,
}

/// Correlation law governing a pair when communication is infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    Uncorrelated,
    DeterministicLhv(LhvKind),
}

impl Fallback {
    pub fn needs_hidden_variable(&self) -> bool {
        matches!(self, Fallback::DeterministicLhv(_))
    }
}

impl FromStr for Fallback {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uncorrelated" => Ok(Fallback::Uncorrelated),
            "lhv" | "lhv-threshold" | "deterministic-lhv" => {
                Ok(Fallback::DeterministicLhv(LhvKind::Threshold))
            }
            other => Err(Error::invalid(format!(
                "unknown fallback kind '{}' (expected 'uncorrelated' or 'lhv-threshold')",
                other
            ))),
        }
    }
}

impl fmt::Display for Fallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fallback::Uncorrelated => f.write_str("uncorrelated"),
            Fallback::DeterministicLhv(LhvKind::Threshold) => f.write_str("lhv-threshold"),
        }
    }
}

/// Superluminal-communication model: finite tachyon speed plus fallback law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TachyonModel<T> {
    pub beta_t: TachyonSpeed<T>,
    pub fallback: Fallback,
}

impl<T: Real> TachyonModel<T> {
    pub fn new(beta_t: TachyonSpeed<T>, fallback: Fallback) -> Self {
        TachyonModel { beta_t, fallback }
    }
}

/// Shared hidden polarization angle `λ ∈ [0, π)` of one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenSample<T> {
    pub lambda: T,
}

/// Probabilities of (pass, pass), (pass, fail), (fail, pass), (fail, fail).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOutcomeDistribution<T> {
    pub p_pp: T,
    pub p_pf: T,
    pub p_fp: T,
    pub p_ff: T,
}

impl<T: Real> JointOutcomeDistribution<T> {
    /// Builds the table from the joint pass probability and the two marginals.
    pub fn from_marginals(p_pp: T, pass_a: T, pass_b: T) -> Self {
        let zero = T::zero();
        JointOutcomeDistribution {
            p_pp,
            p_pf: (pass_a - p_pp).max(zero),
            p_fp: (pass_b - p_pp).max(zero),
            p_ff: (T::one() - pass_a - pass_b + p_pp).max(zero),
        }
    }

    pub fn independent(pass_a: T, pass_b: T) -> Self {
        Self::from_marginals(pass_a * pass_b, pass_a, pass_b)
    }

    pub fn deterministic(pass_a: bool, pass_b: bool) -> Self {
        let (o, z) = (T::one(), T::zero());
        let pick = |x: bool| if x { o } else { z };
        JointOutcomeDistribution {
            p_pp: pick(pass_a && pass_b),
            p_pf: pick(pass_a && !pass_b),
            p_fp: pick(!pass_a && pass_b),
            p_ff: pick(!pass_a && !pass_b),
        }
    }

    pub fn pass_a(&self) -> T {
        self.p_pp + self.p_pf
    }

    pub fn pass_b(&self) -> T {
        self.p_pp + self.p_fp
    }

    pub fn total(&self) -> T {
        self.p_pp + self.p_pf + self.p_fp + self.p_ff
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.p_pp, self.p_pf, self.p_fp, self.p_ff]
    }
}

/// Quantum prediction for the entangled state.
///
/// With both polarizers present, `p_pp = ½|cos θ_a cos θ_b + e^{iφ} sin θ_a sin θ_b|²`
/// and each marginal is `½`. A removed polarizer always transmits.
pub fn qm_joint<T: Real>(
    state: &EntangledState<T>,
    a: PolarizerSetting<T>,
    b: PolarizerSetting<T>,
) -> JointOutcomeDistribution<T> {
    let half = lit::<T>(0.5);
    match (a, b) {
        (PolarizerSetting::Removed, PolarizerSetting::Removed) => {
            JointOutcomeDistribution::from_marginals(T::one(), T::one(), T::one())
        }
        (PolarizerSetting::Angle(_), PolarizerSetting::Removed) => {
            JointOutcomeDistribution::from_marginals(half, half, T::one())
        }
        (PolarizerSetting::Removed, PolarizerSetting::Angle(_)) => {
            JointOutcomeDistribution::from_marginals(half, T::one(), half)
        }
        (PolarizerSetting::Angle(ta), PolarizerSetting::Angle(tb)) => {
            let (sa, ca) = ta.sin_cos();
            let (sb, cb) = tb.sin_cos();
            let (sp, cp) = state.phi.sin_cos();
            let re = ca * cb + cp * sa * sb;
            let im = sp * sa * sb;
            let p_pp = half * (re * re + im * im);
            JointOutcomeDistribution::from_marginals(p_pp, half, half)
        }
    }
}

/// Acute angle between two polarizer axes, in `[0, π/2]`.
fn axis_separation<T: Real>(x: T, y: T) -> T {
    let pi = T::PI();
    let mut d = (x - y).abs() % pi;
    if d > T::FRAC_PI_2() {
        d = pi - d;
    }
    d
}

/// Deterministic outcome of the threshold hidden-variable model.
pub fn lhv_passes<T: Real>(kind: LhvKind, lambda: T, setting: PolarizerSetting<T>) -> bool {
    match (kind, setting) {
        (_, PolarizerSetting::Removed) => true,
        (LhvKind::Threshold, PolarizerSetting::Angle(theta)) => {
            axis_separation(lambda, theta) < T::FRAC_PI_4()
        }
    }
}

/// Joint distribution of the hidden-variable model averaged over `λ` uniform
/// on `[0, π)`: two pass arcs of length `π/2` overlap on `π/2 − |θ_a − θ_b|`.
pub fn lhv_averaged_joint<T: Real>(
    kind: LhvKind,
    a: PolarizerSetting<T>,
    b: PolarizerSetting<T>,
) -> JointOutcomeDistribution<T> {
    let half = lit::<T>(0.5);
    let LhvKind::Threshold = kind;
    match (a, b) {
        (PolarizerSetting::Angle(ta), PolarizerSetting::Angle(tb)) => {
            let p_pp = half - axis_separation(ta, tb) / T::PI();
            JointOutcomeDistribution::from_marginals(p_pp, half, half)
        }
        _ => qm_joint(&EntangledState::default(), a, b),
    }
}

/// Pair statistics when no tachyon connects the two measurements.
pub fn fallback_joint<T: Real>(
    model: &TachyonModel<T>,
    hidden: Option<HiddenSample<T>>,
    a: PolarizerSetting<T>,
    b: PolarizerSetting<T>,
) -> Result<JointOutcomeDistribution<T>> {
    let half = lit::<T>(0.5);
    let pass = |s: PolarizerSetting<T>| if s.is_removed() { T::one() } else { half };
    match model.fallback {
        Fallback::Uncorrelated => Ok(JointOutcomeDistribution::independent(pass(a), pass(b))),
        Fallback::DeterministicLhv(kind) => {
            let h = hidden.ok_or_else(|| {
                Error::invalid("hidden-variable fallback requires a hidden sample per pair")
            })?;
            Ok(JointOutcomeDistribution::deterministic(
                lhv_passes(kind, h.lambda, a),
                lhv_passes(kind, h.lambda, b),
            ))
        }
    }
}

/// Quantum statistics when the tachyon arrives in time, fallback otherwise.
pub fn effective_joint<T: Real>(
    model: &TachyonModel<T>,
    state: &EntangledState<T>,
    feasible: bool,
    hidden: Option<HiddenSample<T>>,
    a: PolarizerSetting<T>,
    b: PolarizerSetting<T>,
) -> Result<JointOutcomeDistribution<T>> {
    if feasible {
        Ok(qm_joint(state, a, b))
    } else {
        fallback_joint(model, hidden, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn ang(deg: f64) -> PolarizerSetting<f64> {
        PolarizerSetting::angle(deg.to_radians())
    }

    #[test]
    fn qm_examples() {
        let s = EntangledState::new(0.0);
        assert_relative_eq!(qm_joint(&s, ang(30.0), ang(30.0)).p_pp, 0.5, epsilon = 1e-15);
        assert!(qm_joint(&s, ang(10.0), ang(100.0)).p_pp.abs() < 1e-15);
        let both = qm_joint(&s, PolarizerSetting::Removed, PolarizerSetting::Removed);
        assert_eq!(both.p_pp, 1.0);
        assert_eq!(both.p_ff, 0.0);
        let p = qm_joint(&s, ang(0.0), ang(22.5)).p_pp;
        assert_relative_eq!(p, 0.5 * 22.5f64.to_radians().cos().powi(2), epsilon = 1e-15);
        assert!((p - 0.4268).abs() < 1e-4);
    }

    #[test]
    fn one_removed_polarizer_gives_marginal() {
        let s = EntangledState::new(0.7);
        let d = qm_joint(&s, ang(33.0), PolarizerSetting::Removed);
        assert_relative_eq!(d.p_pp, 0.5, epsilon = 1e-15);
        assert_eq!(d.p_fp, 0.5);
        assert_eq!(d.pass_b(), 1.0);
    }

    #[test]
    fn angle_normalization() {
        let PolarizerSetting::Angle(a) = PolarizerSetting::angle(-0.25 * PI) else { panic!() };
        assert_relative_eq!(a, 0.75 * PI, epsilon = 1e-15);
        let PolarizerSetting::Angle(b) = PolarizerSetting::angle(PI) else { panic!() };
        assert!(b >= 0.0 && b < PI);
    }

    #[test]
    fn uncorrelated_fallback() {
        let m = TachyonModel::new(TachyonSpeed::Finite(10.0), Fallback::Uncorrelated);
        let d = fallback_joint(&m, None, ang(0.0), ang(22.5)).unwrap();
        assert_eq!(d.p_pp, 0.25);
        assert_eq!(d.pass_a(), 0.5);
        let r = fallback_joint(&m, None, PolarizerSetting::Removed, PolarizerSetting::Removed).unwrap();
        assert_eq!(r.p_pp, 1.0);
        let one = fallback_joint(&m, None, ang(45.0), PolarizerSetting::Removed).unwrap();
        assert_eq!(one.p_pp, 0.5);
    }

    #[test]
    fn lhv_threshold_outcomes() {
        let k = LhvKind::Threshold;
        assert!(lhv_passes(k, 0.1, ang(0.0)));
        assert!(!lhv_passes(k, FRAC_PI_2, ang(0.0)));
        assert!(lhv_passes(k, PI - 0.1, ang(0.0)));
        assert!(!lhv_passes(k, FRAC_PI_4 + 1e-9, ang(0.0)));
        assert!(lhv_passes(k, 1.3, PolarizerSetting::Removed));

        let m = TachyonModel::new(TachyonSpeed::Finite(10.0), Fallback::DeterministicLhv(k));
        let d = fallback_joint(&m, Some(HiddenSample { lambda: 0.0 }), ang(0.0), ang(90.0)).unwrap();
        assert_eq!(d.as_array(), [0.0, 1.0, 0.0, 0.0]);
        assert!(fallback_joint(&m, None, ang(0.0), ang(0.0)).is_err());
        let r = fallback_joint(
            &m,
            Some(HiddenSample { lambda: 2.0 }),
            PolarizerSetting::Removed,
            PolarizerSetting::Removed,
        )
        .unwrap();
        assert_eq!(r.p_pp, 1.0);
    }

    #[test]
    fn lhv_average_closed_form() {
        let k = LhvKind::Threshold;
        assert_relative_eq!(lhv_averaged_joint(k, ang(20.0), ang(20.0)).p_pp, 0.5, epsilon = 1e-15);
        assert_relative_eq!(lhv_averaged_joint(k, ang(0.0), ang(22.5)).p_pp, 0.375, epsilon = 1e-15);
        assert!(lhv_averaged_joint(k, ang(0.0), ang(90.0)).p_pp.abs() < 1e-15);
        assert_relative_eq!(lhv_averaged_joint(k, ang(170.0), ang(10.0)).p_pp, 0.5 - 20.0 / 180.0, epsilon = 1e-14);
    }

    #[test]
    fn effective_dispatch() {
        let s = EntangledState::new(0.0);
        let m = TachyonModel::new(TachyonSpeed::Finite(10.0), Fallback::Uncorrelated);
        let q = effective_joint(&m, &s, true, None, ang(0.0), ang(22.5)).unwrap();
        assert_eq!(q, qm_joint(&s, ang(0.0), ang(22.5)));
        let f = effective_joint(&m, &s, false, None, ang(0.0), ang(22.5)).unwrap();
        assert_eq!(f.p_pp, 0.25);
    }

    #[test]
    fn fallback_parsing() {
        assert_eq!("uncorrelated".parse::<Fallback>().unwrap(), Fallback::Uncorrelated);
        assert_eq!(
            "LHV-threshold".parse::<Fallback>().unwrap(),
            Fallback::DeterministicLhv(LhvKind::Threshold)
        );
        assert!("bohmian".parse::<Fallback>().is_err());
        for f in [Fallback::Uncorrelated, Fallback::DeterministicLhv(LhvKind::Threshold)] {
            assert_eq!(f.to_string().parse::<Fallback>().unwrap(), f);
        }
    }
}
