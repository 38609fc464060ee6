//! Special-relativistic kinematics of the two polarization measurements and the
//! daily rotation of the preferred-frame velocity seen from the laboratory.
//!
//! Laboratory axes: `x` points West to East along the detector baseline, `z`
//! is the Earth's polar (North-South) axis. Time-like coordinates are carried
//! as lengths (`ct`, meters) so every quantity in a Lorentz transform shares
//! one unit.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, lit, Real};

/// Length of the sidereal day in seconds.
pub const SIDEREAL_DAY_S: f64 = 86164.0905;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3<T>(pub [T; 3]);

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([T::zero(); 3])
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, k: T) -> Self {
        Vec3([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl<T: Real> std::ops::Sub for Vec3<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Vec3([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
        ])
    }
}

impl<T: Real> std::ops::Add for Vec3<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Vec3([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

/// A measurement event in the laboratory frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeEvent<T> {
    /// Position in meters.
    pub x: Vec3<T>,
    /// Time coordinate times `c`, in meters.
    pub ct: T,
}

impl<T: Real> SpacetimeEvent<T> {
    pub fn new(x: Vec3<T>, ct: T) -> Result<Self> {
        if !x.is_finite() || !ct.is_finite() {
            return Err(Error::invalid("spacetime event components must be finite"));
        }
        Ok(SpacetimeEvent { x, ct })
    }
}

/// Candidate preferred frame of tachyon propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreferredFrameSpec<T> {
    /// Frame speed as a fraction of `c`, in `[0, 1)`.
    pub beta: T,
    /// Polar angle between the frame velocity and the Earth's axis, radians in `[0, π]`.
    pub chi: T,
    /// Sidereal time (seconds) at which the azimuth of the frame velocity is zero.
    pub t0: T,
}

impl<T: Real> PreferredFrameSpec<T> {
    pub fn new(beta: T, chi: T, t0: T) -> Result<Self> {
        if !(beta >= T::zero() && beta < T::one()) {
            return Err(Error::invalid(format!(
                "preferred-frame beta must lie in [0, 1), got {:?}",
                beta
            )));
        }
        if !(chi >= T::zero() && chi <= T::PI()) {
            return Err(Error::invalid(format!(
                "polar angle chi must lie in [0, pi], got {:?}",
                chi
            )));
        }
        if !t0.is_finite() {
            return Err(Error::invalid("t0 must be finite"));
        }
        Ok(PreferredFrameSpec { beta, chi, t0 })
    }

    pub fn lorentz_gamma(&self) -> T {
        T::one() / (T::one() - self.beta * self.beta).sqrt()
    }

    /// Rotation phase `ω(t − t0)` reduced to one turn.
    pub fn phase(&self, t: T, period: T) -> T {
        let turns = (t - self.t0) / period;
        T::TAU() * (turns - turns.floor())
    }

    /// Lab-frame velocity `β⃗(t)` of the preferred frame.
    pub fn velocity_at(&self, t: T, period: T) -> Vec3<T> {
        let phase = self.phase(t, period);
        let (s, c) = self.chi.sin_cos();
        Vec3::new(s * phase.cos(), s * phase.sin(), c).scale(self.beta)
    }
}

/// Detector layout and timing parameters of an Earth-based experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentGeometry<T> {
    /// Detector separation `|Δx⃗|` in meters.
    pub d_ab: T,
    /// Path-equalization uncertainty in meters.
    pub delta_d: T,
    /// Acquisition time in seconds.
    pub delta_t_acq: T,
    /// Angle between the detector axis and West-East, radians.
    pub gamma_align: T,
    /// Sidereal period in seconds.
    pub sidereal_period: T,
}

impl<T: Real> ExperimentGeometry<T> {
    pub fn new(d_ab: T, delta_d: T, delta_t_acq: T, gamma_align: T, sidereal_period: T) -> Result<Self> {
        if !(d_ab > T::zero() && d_ab.is_finite()) {
            return Err(Error::invalid(format!("d_ab must be positive, got {:?}", d_ab)));
        }
        if !(delta_d >= T::zero() && delta_d < d_ab) {
            return Err(Error::invalid(format!(
                "delta_d must satisfy 0 <= delta_d < d_ab, got delta_d = {:?}, d_ab = {:?}",
                delta_d, d_ab
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
        if !(gamma_align >= T::zero() && gamma_align <= T::FRAC_PI_2()) {
            return Err(Error::invalid(format!(
                "misalignment angle must lie in [0, pi/2], got {:?}",
                gamma_align
            )));
        }
        Ok(ExperimentGeometry {
            d_ab,
            delta_d,
            delta_t_acq,
            gamma_align,
            sidereal_period,
        })
    }

    /// Same as [`ExperimentGeometry::new`] with the standard sidereal day.
    pub fn with_sidereal_day(d_ab: T, delta_d: T, delta_t_acq: T, gamma_align: T) -> Result<Self> {
        Self::new(d_ab, delta_d, delta_t_acq, gamma_align, lit(SIDEREAL_DAY_S))
    }

    /// `ρ̄ = Δd / d_AB`.
    pub fn rho_bar(&self) -> T {
        self.delta_d / self.d_ab
    }

    /// `Δx⃗ = x⃗_B − x⃗_A`, along the West-East axis.
    pub fn separation(&self) -> Vec3<T> {
        Vec3::new(self.d_ab, T::zero(), T::zero())
    }
}

/// Reduced tachyon speed `β_t = v_t / c`; `Infinite` recovers instantaneous collapse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TachyonSpeed<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> TachyonSpeed<T> {
    /// Builds a speed from a plain number, mapping `+∞` to [`TachyonSpeed::Infinite`].
    pub fn new(beta_t: T) -> Result<Self> {
        if beta_t == T::infinity() {
            return Ok(TachyonSpeed::Infinite);
        }
        if !(beta_t > T::one() && beta_t.is_finite()) {
            return Err(Error::invalid(format!(
                "tachyon speed must exceed 1 (superluminal), got {:?}",
                beta_t
            )));
        }
        Ok(TachyonSpeed::Finite(beta_t))
    }

    pub fn value(&self) -> T {
        match *self {
            TachyonSpeed::Finite(v) => v,
            TachyonSpeed::Infinite => T::infinity(),
        }
    }
}

/// Squared spacetime interval `|Δx⃗|² − (Δct)²` between two events.
pub fn interval_squared<T: Real>(a: &SpacetimeEvent<T>, b: &SpacetimeEvent<T>) -> T {
    let dx = b.x - a.x;
    let dct = b.ct - a.ct;
    dx.norm_squared() - dct * dct
}

/// Time separation in the boosted frame, `Δct′ = γ(Δct − β⃗·Δx⃗)`.
pub fn boost_delta_ct<T: Real>(delta_ct: T, delta_x: Vec3<T>, beta_vec: Vec3<T>) -> Result<T> {
    let b2 = beta_vec.norm_squared();
    if !(b2 < T::one()) {
        return Err(Error::domain(format!(
            "boost speed must be below c, got |beta| = {:?}",
            b2.sqrt()
        )));
    }
    let gamma = T::one() / (T::one() - b2).sqrt();
    Ok(gamma * (delta_ct - beta_vec.dot(&delta_x)))
}

/// Angle between the preferred-frame velocity and the West-East axis at
/// sidereal time `t`, `θ(t) = arccos[sin χ cos ω(t − t0)]`.
pub fn theta_of_t<T: Real>(pf: &PreferredFrameSpec<T>, t: T, period: T) -> T {
    let arg = pf.chi.sin() * pf.phase(t, period).cos();
    arg.max(-T::one()).min(T::one()).acos()
}

/// `β⃗·Δx⃗ = β d_AB sin χ cos ω(t − t0)` for a West-East baseline, in meters.
pub fn beta_dot_dx<T: Real>(pf: &PreferredFrameSpec<T>, geom: &ExperimentGeometry<T>, t: T) -> T {
    pf.beta * geom.d_ab * pf.chi.sin() * pf.phase(t, geom.sidereal_period).cos()
}

/// Preferred-frame detector separation from interval invariance,
/// `d′_AB = √(d_AB² − Δct² + Δct′²)`.
pub fn pf_separation<T: Real>(delta_ct: T, delta_ct_prime: T, d_ab: T) -> Result<T> {
    let radicand = d_ab * d_ab - delta_ct * delta_ct + delta_ct_prime * delta_ct_prime;
    if radicand < T::zero() || radicand.is_nan() {
        return Err(Error::domain(format!(
            "negative squared separation {} (delta_ct = {}, delta_ct' = {}, d_ab = {})",
            as_f64(radicand),
            as_f64(delta_ct),
            as_f64(delta_ct_prime),
            as_f64(d_ab)
        )));
    }
    Ok(radicand.sqrt())
}

/// Whether a tachyon emitted at one event reaches the other before it happens,
/// i.e. `β_t |Δct′| ≥ d′_AB`. An infinite speed always connects the events.
pub fn communication_feasible<T: Real>(
    beta_t: TachyonSpeed<T>,
    delta_ct_prime: T,
    d_prime_ab: T,
) -> bool {
    match beta_t {
        TachyonSpeed::Infinite => true,
        TachyonSpeed::Finite(bt) => bt * delta_ct_prime.abs() >= d_prime_ab,
    }
}
