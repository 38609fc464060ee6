//! Detectable tachyon-speed lower bound `β_t,min` for an Earth-based experiment,
//! its brute-force oracle, and the auxiliary design checks (acquisition time,
//! misalignment, optical drift).

use crate::error::{Error, Result};
use crate::relativity::{boost_delta_ct, pf_separation, Vec3, SIDEREAL_DAY_S};
use crate::scalar::{lit, Real};

/// Temperature coefficient of the group index of air at 810 nm, per kelvin.
pub const DN_DT_AIR_810NM: f64 = 9.47e-7;

/// Default threshold for the "δt ≪ ρ̄T/π" acquisition check.
pub const DEFAULT_ACQUISITION_THRESHOLD: f64 = 0.1;

/// Parameters of the bound at a single preferred-frame speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs<T> {
    /// `ρ̄ = Δd / d_AB`, in `(0, 1)`.
    pub rho_bar: T,
    /// Acquisition time `δt`, seconds.
    pub delta_t_acq: T,
    /// Sidereal period `T`, seconds.
    pub sidereal_period: T,
    /// Preferred-frame speed `β`, in `[0, 1)`.
    pub beta: T,
    /// Polar angle `χ`, radians in `[0, π]`.
    pub chi: T,
}

impl<T: Real> BoundInputs<T> {
    pub fn new(rho_bar: T, delta_t_acq: T, sidereal_period: T, beta: T, chi: T) -> Result<Self> {
        CurveInputs::new(rho_bar, delta_t_acq, sidereal_period, chi)?.at(beta)
    }

    pub fn curve_inputs(&self) -> CurveInputs<T> {
        CurveInputs {
            rho_bar: self.rho_bar,
            delta_t_acq: self.delta_t_acq,
            sidereal_period: self.sidereal_period,
            chi: self.chi,
        }
    }

    /// `sin(πδt/T)`: how far the frame velocity swings off perpendicular
    /// during an acquisition window centred on an orthogonality time.
    pub fn window_swing(&self) -> T {
        (T::PI() * self.delta_t_acq / self.sidereal_period).sin()
    }

    /// Half-width of the reachable `β⃗·Δx⃗ / d_AB` interval, `β sin χ sin(πδt/T)`.
    pub fn projection_half_width(&self) -> T {
        self.beta * self.chi.sin().abs() * self.window_swing()
    }
}

/// Bound parameters without the frame speed: one curve of `β_t,min` versus `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveInputs<T> {
    pub rho_bar: T,
    pub delta_t_acq: T,
    pub sidereal_period: T,
    pub chi: T,
}

impl<T: Real> CurveInputs<T> {
    pub fn new(rho_bar: T, delta_t_acq: T, sidereal_period: T, chi: T) -> Result<Self> {
        if !(rho_bar > T::zero() && rho_bar < T::one()) {
            return Err(Error::invalid(format!(
                "rho_bar must lie in (0, 1), got {:?}",
                rho_bar
            )));
        }
        if !(sidereal_period > T::zero() && sidereal_period.is_finite()) {
            return Err(Error::invalid("sidereal period must be positive"));
        }
        if !(delta_t_acq > T::zero() && delta_t_acq < sidereal_period) {
            return Err(Error::invalid(format!(
                "acquisition time must satisfy 0 < delta_t < T, got {:?}",
                delta_t_acq
            )));
        }
        if !(chi >= T::zero() && chi <= T::PI()) {
            return Err(Error::invalid(format!(
                "polar angle chi must lie in [0, pi], got {:?}",
                chi
            )));
        }
        Ok(CurveInputs {
            rho_bar,
            delta_t_acq,
            sidereal_period,
            chi,
        })
    }

    /// Perpendicular-frame parameters with the standard sidereal day.
    pub fn perpendicular(rho_bar: T, delta_t_acq: T) -> Result<Self> {
        Self::new(rho_bar, delta_t_acq, lit(SIDEREAL_DAY_S), T::FRAC_PI_2())
    }

    pub fn at(&self, beta: T) -> Result<BoundInputs<T>> {
        if !(beta >= T::zero() && beta < T::one()) {
            return Err(Error::invalid(format!(
                "preferred-frame beta must lie in [0, 1), got {:?}",
                beta
            )));
        }
        Ok(BoundInputs {
            rho_bar: self.rho_bar,
            delta_t_acq: self.delta_t_acq,
            sidereal_period: self.sidereal_period,
            beta,
            chi: self.chi,
        })
    }
}

/// `β_t,min` sampled along a grid of frame speeds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve<T> {
    pub inputs: CurveInputs<T>,
    /// `(β, β_t,min)` pairs, strictly increasing in `β`.
    pub points: Vec<(T, T)>,
    pub label: String,
}

impl<T: Real> BoundCurve<T> {
    /// First grid speed at which this curve lies strictly above `other`.
    /// Both curves must share the same grid.
    pub fn first_beta_above(&self, other: &BoundCurve<T>) -> Result<Option<T>> {
        if self.points.len() != other.points.len()
            || self.points.iter().zip(&other.points).any(|(a, b)| a.0 != b.0)
        {
            return Err(Error::invalid("curves are sampled on different beta grids"));
        }
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .find(|(a, b)| a.1 > b.1)
            .map(|(a, _)| a.0))
    }
}

/// Optical path drift from a temperature difference between the two arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftBudget<T> {
    /// Initial optical path length `L₀`, meters.
    pub l0: T,
    /// Group-index temperature coefficient `∂n*/∂T`, per kelvin.
    pub dn_dtemp: T,
    /// Mean temperature difference between the two paths, kelvin.
    pub delta_temp: T,
}

impl<T: Real> DriftBudget<T> {
    pub fn new(l0: T, dn_dtemp: T, delta_temp: T) -> Result<Self> {
        if !(l0 > T::zero() && l0.is_finite()) {
            return Err(Error::invalid(format!("path length must be positive, got {:?}", l0)));
        }
        if !dn_dtemp.is_finite() || !delta_temp.is_finite() {
            return Err(Error::invalid("drift coefficients must be finite"));
        }
        Ok(DriftBudget {
            l0,
            dn_dtemp,
            delta_temp,
        })
    }

    /// Budget in air at 810 nm.
    pub fn in_air(l0: T, delta_temp: T) -> Result<Self> {
        Self::new(l0, lit(DN_DT_AIR_810NM), delta_temp)
    }
}

/// Closed-form lower bound
/// `β_t,min = √(1 + (1−β²)(1−ρ̄²) / (ρ̄ + β sin χ sin(πδt/T))²)`.
pub fn beta_t_min<T: Real>(inputs: &BoundInputs<T>) -> T {
    let rho = inputs.rho_bar;
    let denom = rho + inputs.projection_half_width();
    let num = (T::one() - inputs.beta * inputs.beta) * (T::one() - rho * rho);
    (T::one() + num / (denom * denom)).sqrt()
}

/// Squared ratio `(d′_AB / Δct′)²` for a unit baseline, computed by boosting the
/// event separation into the preferred frame. `v` is `β⃗·Δx⃗ / d_AB`.
fn pf_ratio_squared<T: Real>(beta: T, delta_ct: T, v: T) -> T {
    let transverse = (beta * beta - v * v).max(T::zero()).sqrt();
    let beta_vec = Vec3::new(v, transverse, T::zero());
    let unit_baseline = Vec3::new(T::one(), T::zero(), T::zero());
    let Ok(dct_prime) = boost_delta_ct(delta_ct, unit_baseline, beta_vec) else {
        return T::infinity();
    };
    if dct_prime == T::zero() {
        return T::infinity();
    }
    match pf_separation(delta_ct, dct_prime, T::one()) {
        Ok(d_prime) => (d_prime / dct_prime).powi(2),
        Err(_) => T::infinity(),
    }
}

/// Minimizes `f` over `[lo, hi]` by golden-section search; endpoints are
/// compared explicitly since the search never evaluates them.
fn golden_section<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, iters: usize) -> (T, T) {
    let inv_phi = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if b - a <= T::epsilon() * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) / lit(2.0);
    [(lo, f(lo)), (hi, f(hi)), (mid, f(mid)), (c, fc), (d, fd)]
        .into_iter()
        .fold((mid, T::infinity()), |best, cand| if cand.1 < best.1 { cand } else { best })
}

fn linspace<T: Real>(lo: T, hi: T, n: usize) -> impl Iterator<Item = T> {
    let last = T::from_usize(n.saturating_sub(1).max(1)).unwrap();
    (0..n).map(move |i| {
        let s = T::from_usize(i).unwrap() / last;
        lo + (hi - lo) * s
    })
}

/// Numerical minimum of `d′_AB/|Δct′|` over the reachable box
/// `Δct ∈ [−Δd, Δd]`, `β⃗·Δx⃗ ∈ [−β d_AB sin χ sin(πδt/T), +…]`.
///
/// The ratio is evaluated through the Lorentz boost and interval invariance
/// rather than the closed form, so it serves as an independent check of
/// [`beta_t_min`]. Search: a coarse 2-D grid with pattern-search refinement,
/// dense scans of the four box edges with golden-section refinement, and the
/// four corners.
pub fn brute_force_bound<T: Real>(inputs: &BoundInputs<T>, grid_n: usize) -> Result<T> {
    if grid_n < 100 {
        return Err(Error::invalid(format!("grid_n must be at least 100, got {}", grid_n)));
    }
    let beta = inputs.beta;
    let rho = inputs.rho_bar;
    let vmax = inputs.projection_half_width();
    let f = |u: T, v: T| pf_ratio_squared(beta, u, v);
    let clamp = |x: T, lo: T, hi: T| x.max(lo).min(hi);

    let mut best = T::infinity();
    let mut best_at = (rho, -vmax);

    // coarse grid
    let side = ((grid_n as f64).sqrt().ceil() as usize).max(10);
    let v_side = if vmax > T::zero() { side } else { 1 };
    let us: Vec<T> = linspace(-rho, rho, side).collect();
    let vs: Vec<T> = if v_side == 1 {
        vec![T::zero()]
    } else {
        linspace(-vmax, vmax, v_side).collect()
    };
    for &u in &us {
        for &v in &vs {
            let val = f(u, v);
            if val < best {
                best = val;
                best_at = (u, v);
            }
        }
    }

    // pattern search from the best grid node
    let two = lit::<T>(2.0);
    let mut step_u = two * rho / T::from_usize(side).unwrap();
    let mut step_v = if vmax > T::zero() {
        two * vmax / T::from_usize(side).unwrap()
    } else {
        T::zero()
    };
    let floor_u = rho * lit(1e-15);
    for _ in 0..400 {
        let (u0, v0) = best_at;
        let mut improved = false;
        for (du, dv) in [(step_u, T::zero()), (-step_u, T::zero()), (T::zero(), step_v), (T::zero(), -step_v)] {
            let cand = (clamp(u0 + du, -rho, rho), clamp(v0 + dv, -vmax, vmax));
            let val = f(cand.0, cand.1);
            if val < best {
                best = val;
                best_at = cand;
                improved = true;
            }
        }
        if !improved {
            step_u = step_u / two;
            step_v = step_v / two;
            if step_u < floor_u {
                break;
            }
        }
    }

    // box edges
    let edge_samples = grid_n.min(100_000);
    let mut scan_edge = |g: &dyn Fn(T) -> T, lo: T, hi: T| {
        if hi <= lo {
            let val = g(lo);
            if val < best {
                best = val;
            }
            return;
        }
        let pts: Vec<T> = linspace(lo, hi, edge_samples).collect();
        let (idx, _) = pts
            .iter()
            .enumerate()
            .map(|(i, &x)| (i, g(x)))
            .fold((0, T::infinity()), |b, c| if c.1 < b.1 { c } else { b });
        let a = pts[idx.saturating_sub(1)];
        let b = pts[(idx + 1).min(pts.len() - 1)];
        let (_, val) = golden_section(g, a, b, 200);
        if val < best {
            best = val;
        }
    };
    scan_edge(&|v| f(rho, v), -vmax, vmax);
    scan_edge(&|v| f(-rho, v), -vmax, vmax);
    scan_edge(&|u| f(u, vmax), -rho, rho);
    scan_edge(&|u| f(u, -vmax), -rho, rho);

    // corners
    for (u, v) in [(rho, vmax), (rho, -vmax), (-rho, vmax), (-rho, -vmax)] {
        let val = f(u, v);
        if val < best {
            best = val;
        }
    }

    if !best.is_finite() {
        return Err(Error::domain("no finite preferred-frame ratio inside the constraint box"));
    }
    Ok(best.sqrt())
}

/// Outcome of the "δt ≪ ρ̄T/π" check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionCheck<T> {
    /// `πδt / (ρ̄T)`.
    pub ratio: T,
    pub satisfied: bool,
}

/// The bound is insensitive to the acquisition time when `πδt/(ρ̄T)` is below
/// `threshold` (strict).
pub fn acquisition_condition<T: Real>(inputs: &BoundInputs<T>, threshold: T) -> AcquisitionCheck<T> {
    let ratio = T::PI() * inputs.delta_t_acq / (inputs.rho_bar * inputs.sidereal_period);
    AcquisitionCheck {
        ratio,
        satisfied: ratio < threshold,
    }
}

/// Frame speed `β₀ = ρ̄T/(πδt)` above which the bound starts to fall off its
/// `1/ρ̄` plateau, clipped to 1.
pub fn crossover_beta<T: Real>(inputs: &BoundInputs<T>) -> T {
    let b0 = inputs.rho_bar * inputs.sidereal_period / (T::PI() * inputs.delta_t_acq);
    b0.min(T::one())
}

/// Smallest polar angle for which a detector axis misaligned by `gamma_align`
/// from West-East still becomes perpendicular to the frame velocity during a
/// sidereal day.
pub fn sensitivity_min_chi<T: Real>(gamma_align: T) -> Result<T> {
    if !(gamma_align >= T::zero() && gamma_align <= T::FRAC_PI_2()) {
        return Err(Error::invalid(format!(
            "misalignment angle must lie in [0, pi/2], got {:?}",
            gamma_align
        )));
    }
    Ok(gamma_align)
}

/// Whether a frame at polar angle `chi` lies in the blind cone around the
/// Earth's axis (either pole) for misalignment `gamma_align`.
pub fn in_blind_cone<T: Real>(chi: T, gamma_align: T) -> Result<bool> {
    let min_chi = sensitivity_min_chi(gamma_align)?;
    let folded = chi.min(T::PI() - chi);
    Ok(folded < min_chi)
}

/// Evaluates [`beta_t_min`] along `beta_grid`.
pub fn sweep_bound_curve<T: Real>(
    inputs: &CurveInputs<T>,
    beta_grid: &[T],
    label: impl Into<String>,
) -> Result<BoundCurve<T>> {
    if beta_grid.is_empty() {
        return Err(Error::invalid("beta grid is empty"));
    }
    if beta_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("beta grid must be strictly increasing"));
    }
    let points = beta_grid
        .iter()
        .map(|&beta| inputs.at(beta).map(|b| (beta, beta_t_min(&b))))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve {
        inputs: *inputs,
        points,
        label: label.into(),
    })
}

/// `ΔL = (∂n*/∂T) L₀ ΔT`, meters.
pub fn drift_length<T: Real>(budget: &DriftBudget<T>) -> T {
    budget.dn_dtemp * budget.l0 * budget.delta_temp
}

/// True when the drift magnitude is strictly larger than the equalization
/// tolerance `delta_d`, i.e. active path feedback is needed.
pub fn drift_exceeds_budget<T: Real>(budget: &DriftBudget<T>, delta_d: T) -> Result<bool> {
    if !(delta_d > T::zero()) {
        return Err(Error::invalid(format!(
            "equalization tolerance must be positive, got {:?}",
            delta_d
        )));
    }
    Ok(drift_length(budget).abs() > delta_d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    const T_SID: f64 = SIDEREAL_DAY_S;

    fn perp(rho: f64, dt: f64, beta: f64) -> BoundInputs<f64> {
        BoundInputs::new(rho, dt, T_SID, beta, FRAC_PI_2).unwrap()
    }

    #[test]
    fn plateau_at_rest_frame() {
        assert_relative_eq!(beta_t_min(&perp(1e-3, 4.0, 0.0)), 1000.0, max_relative = 1e-12);
        assert_relative_eq!(beta_t_min(&perp(1.9e-7, 0.1, 0.0)), 1.0 / 1.9e-7, max_relative = 1e-12);
        assert_relative_eq!(beta_t_min(&perp(1.6e-4, 4.0, 0.0)), 6250.0, max_relative = 1e-12);
    }

    #[test]
    fn relativistic_limit_approaches_one() {
        let v = beta_t_min(&perp(1e-3, 4.0, 1.0 - 1e-12));
        assert!(v >= 1.0 && v < 1.0 + 1e-6, "{v}");
    }

    #[test]
    fn polar_frame_ignores_window() {
        let inputs = BoundInputs::new(1e-4, 3000.0, T_SID, 0.6, 0.0).unwrap();
        let rho: f64 = 1e-4;
        let expect = (1.0 + (1.0 - 0.36) * (1.0 - rho * rho) / (rho * rho)).sqrt();
        assert_relative_eq!(beta_t_min(&inputs), expect, max_relative = 1e-12);
        assert_relative_eq!(brute_force_bound(&inputs, 400).unwrap(), expect, max_relative = 1e-9);
    }

    #[test]
    fn brute_force_matches_closed_form_spot_checks() {
        for &(rho, dt, beta, chi) in &[
            (1e-3, 0.1 * T_SID / PI, 0.01, FRAC_PI_2),
            (5.4e-6, 360.0, 0.3, 1.0),
            (1.9e-7, 0.1, 0.9, 2.5),
            (0.5, 40000.0, 0.99, 0.2),
        ] {
            let inputs = BoundInputs::new(rho, dt, T_SID, beta, chi).unwrap();
            assert_relative_eq!(
                brute_force_bound(&inputs, 10_000).unwrap(),
                beta_t_min(&inputs),
                max_relative = 1e-6
            );
        }
        let at_rest = perp(2e-5, 10.0, 0.0);
        assert_relative_eq!(brute_force_bound(&at_rest, 100).unwrap(), 5e4, max_relative = 1e-9);
    }

    #[test]
    fn brute_force_rejects_small_grid() {
        assert!(brute_force_bound(&perp(1e-3, 1.0, 0.1), 99).is_err());
    }

    #[test]
    fn acquisition_examples() {
        let c = acquisition_condition(&BoundInputs::new(1.9e-7, 0.1, 86164.0, 0.0, FRAC_PI_2).unwrap(), 0.1);
        assert_relative_eq!(c.ratio, PI * 0.1 / (1.9e-7 * 86164.0), max_relative = 1e-14);
        assert!((c.ratio - 19.19).abs() < 0.01);
        assert!(!c.satisfied);

        let tiny = acquisition_condition(&perp(1e-3, 1e-300, 0.0), 0.1);
        assert!(tiny.ratio < 1e-290 && tiny.satisfied);

        let inputs = BoundInputs::new(0.5, 0.25 * T_SID / PI, T_SID, 0.0, FRAC_PI_2).unwrap();
        let ratio = acquisition_condition(&inputs, 1.0).ratio;
        assert_relative_eq!(ratio, 0.5, max_relative = 1e-15);
        let at = acquisition_condition(&inputs, ratio);
        assert!(!at.satisfied);
        assert!(acquisition_condition(&inputs, ratio * (1.0 + 1e-15)).satisfied);
    }

    #[test]
    fn crossover_examples() {
        let c = perp(1e-6, 0.1 * T_SID / PI, 0.0);
        assert_relative_eq!(crossover_beta(&c), 1e-5, max_relative = 1e-12);
        let d = perp(0.5, T_SID / PI, 0.0);
        assert_relative_eq!(crossover_beta(&d), 0.5, max_relative = 1e-12);
        assert_eq!(crossover_beta(&perp(1.6e-4, 4.0, 0.0)), 1.0);
    }

    #[test]
    fn misalignment_cone() {
        assert_eq!(sensitivity_min_chi(0.0).unwrap(), 0.0);
        let g = 5.8f64.to_radians();
        assert_eq!(sensitivity_min_chi(g).unwrap(), g);
        assert_eq!(sensitivity_min_chi(FRAC_PI_2).unwrap(), FRAC_PI_2);
        assert!(sensitivity_min_chi(-0.1).is_err());
        assert!(in_blind_cone(3f64.to_radians(), g).unwrap());
        assert!(in_blind_cone(PI - 3f64.to_radians(), g).unwrap());
        assert!(!in_blind_cone(10f64.to_radians(), g).unwrap());
        assert!(!in_blind_cone(0.0, 0.0).unwrap());
    }

    #[test]
    fn sweep_validation_and_single_point() {
        let inputs = CurveInputs::perpendicular(1e-4, 1.0).unwrap();
        assert!(sweep_bound_curve(&inputs, &[], "x").is_err());
        assert!(sweep_bound_curve(&inputs, &[0.2, 0.1], "x").is_err());
        assert!(sweep_bound_curve(&inputs, &[0.1, 0.1], "x").is_err());
        assert!(sweep_bound_curve(&inputs, &[0.5, 1.0], "x").is_err());
        let curve = sweep_bound_curve(&inputs, &[0.25], "one").unwrap();
        assert_eq!(curve.points, vec![(0.25, beta_t_min(&inputs.at(0.25).unwrap()))]);
    }

    #[test]
    fn drift_examples() {
        let b = DriftBudget::in_air(800.0, 1.0).unwrap();
        assert_relative_eq!(drift_length(&b), 7.576e-4, max_relative = 1e-12);
        assert!(drift_exceeds_budget(&b, 220e-6).unwrap());
        let cold = DriftBudget::in_air(800.0, 0.0).unwrap();
        assert_eq!(drift_length(&cold), 0.0);
        assert!(!drift_exceeds_budget(&cold, 220e-6).unwrap());
        let empty = DriftBudget { l0: 0.0, dn_dtemp: DN_DT_AIR_810NM, delta_temp: 1.0 };
        assert_eq!(drift_length(&empty), 0.0);
        let exact = DriftBudget { l0: 2.0, dn_dtemp: 0.25, delta_temp: 1.0 };
        assert!(!drift_exceeds_budget(&exact, 0.5).unwrap());
        assert!(drift_exceeds_budget(&b, 0.0).is_err());
        assert!(DriftBudget::in_air(0.0, 1.0).is_err());
    }

    #[test]
    fn curve_comparison_requires_same_grid() {
        let a = sweep_bound_curve(&CurveInputs::perpendicular(1e-4, 1.0).unwrap(), &[0.1, 0.2], "a").unwrap();
        let b = sweep_bound_curve(&CurveInputs::perpendicular(1e-4, 1.0).unwrap(), &[0.1, 0.3], "b").unwrap();
        assert!(a.first_beta_above(&b).is_err());
        assert_eq!(a.first_beta_above(&a).unwrap(), None);
    }
}
