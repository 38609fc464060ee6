//! Run configuration documents (TOML) and the bundled presets.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bound::{CurveInputs, DriftBudget, DN_DT_AIR_810NM};
use crate::correlation::{EntangledState, Fallback, TachyonModel};
use crate::error::{Error, Result};
use crate::relativity::{ExperimentGeometry, PreferredFrameSpec, TachyonSpeed, SIDEREAL_DAY_S};
use crate::sim::{BellSettings, SimulationConfig, DEFAULT_PAIR_RATE};
use crate::units::{Angle, Length, PerKelvin, Rate, Seconds, TempDiff};

fn sidereal_day() -> Seconds {
    Seconds(SIDEREAL_DAY_S)
}

fn right_angle() -> Angle {
    Angle(PI / 2.0)
}

fn zero_angle() -> Angle {
    Angle(0.0)
}

fn zero_seconds() -> Seconds {
    Seconds(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub d_ab: Length,
    pub delta_d: Length,
    pub delta_t_acq: Seconds,
    #[serde(default = "zero_angle")]
    pub gamma_align: Angle,
    #[serde(default = "sidereal_day")]
    pub sidereal_period: Seconds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSection {
    pub beta: f64,
    #[serde(default = "right_angle")]
    pub chi: Angle,
    #[serde(default = "zero_seconds")]
    pub t0: Seconds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TachyonSection {
    /// Reduced tachyon speed; `inf` for instantaneous communication.
    pub beta_t: f64,
    #[serde(default = "default_fallback")]
    pub fallback: String,
}

fn default_fallback() -> String {
    Fallback::Uncorrelated.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    #[serde(default = "zero_angle")]
    pub phi: Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsSection {
    pub a: Angle,
    pub a_prime: Angle,
    pub b: Angle,
    pub b_prime: Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(default = "default_rate")]
    pub pairs_per_second: Rate,
    /// Defaults to the acquisition time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<Seconds>,
    /// Defaults to `+delta_d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_mismatch: Option<Length>,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to one sidereal period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<Seconds>,
    #[serde(default = "unit_efficiency")]
    pub efficiency: f64,
    #[serde(default)]
    pub accidental_rate: Rate,
}

fn default_rate() -> Rate {
    Rate(DEFAULT_PAIR_RATE)
}

fn unit_efficiency() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub label: String,
    pub rho_bar: f64,
    pub delta_t_acq: Seconds,
    #[serde(default = "right_angle")]
    pub chi: Angle,
    #[serde(default = "sidereal_day")]
    pub sidereal_period: Seconds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSection {
    pub l0: Length,
    #[serde(default = "default_dn_dt")]
    pub dn_dtemp: PerKelvin,
    pub delta_temp: TempDiff,
    /// Path-equalization tolerance the drift is compared against.
    #[serde(default = "default_budget")]
    pub budget: Length,
}

fn default_dn_dt() -> PerKelvin {
    PerKelvin(DN_DT_AIR_810NM)
}

fn default_budget() -> Length {
    Length(220e-6)
}

/// A complete run description. Each subcommand reads the sections it needs
/// and reports the ones that are missing.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tachyon: Option<TachyonSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<SettingsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftSection>,
}

fn missing(section: &str) -> Error {
    Error::Config(format!("config has no [{}] section", section))
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every present section against the domain invariants.
    pub fn validate(&self) -> Result<()> {
        if self.bounds.is_some() {
            self.curve_inputs()?;
        }
        if self.geometry.is_some() {
            self.geometry()?;
        }
        if let Some(f) = &self.frame {
            PreferredFrameSpec::new(f.beta, f.chi.si(), f.t0.si())?;
        }
        if self.tachyon.is_some() {
            self.tachyon_model()?;
        }
        if self.settings.is_some() {
            self.bell_settings()?;
        }
        if self.drift.is_some() {
            self.drift_budget()?;
        }
        if self.simulation.is_some() && self.geometry.is_some() && self.frame.is_some() && self.tachyon.is_some() {
            self.simulation_config()?;
        }
        Ok(())
    }

    pub fn curve_inputs(&self) -> Result<CurveInputs<f64>> {
        if let Some(b) = &self.bounds {
            return CurveInputs::new(b.rho_bar, b.delta_t_acq.si(), b.sidereal_period.si(), b.chi.si());
        }
        let g = self.geometry()?;
        let chi = self.frame.as_ref().map_or(PI / 2.0, |f| f.chi.si());
        CurveInputs::new(g.rho_bar(), g.delta_t_acq, g.sidereal_period, chi)
    }

    pub fn curve_label(&self) -> String {
        self.bounds
            .as_ref()
            .map_or_else(|| "bound".to_string(), |b| b.label.clone())
    }

    pub fn geometry(&self) -> Result<ExperimentGeometry<f64>> {
        let g = self.geometry.as_ref().ok_or_else(|| missing("geometry"))?;
        ExperimentGeometry::new(
            g.d_ab.si(),
            g.delta_d.si(),
            g.delta_t_acq.si(),
            g.gamma_align.si(),
            g.sidereal_period.si(),
        )
    }

    pub fn frame(&self) -> Result<PreferredFrameSpec<f64>> {
        let f = self.frame.as_ref().ok_or_else(|| missing("frame"))?;
        PreferredFrameSpec::new(f.beta, f.chi.si(), f.t0.si())
    }

    pub fn tachyon_model(&self) -> Result<TachyonModel<f64>> {
        let t = self.tachyon.as_ref().ok_or_else(|| missing("tachyon"))?;
        Ok(TachyonModel::new(TachyonSpeed::new(t.beta_t)?, t.fallback.parse()?))
    }

    pub fn bell_settings(&self) -> Result<BellSettings> {
        match &self.settings {
            Some(s) => BellSettings::new(s.a.si(), s.a_prime.si(), s.b.si(), s.b_prime.si()),
            None => Ok(BellSettings::default()),
        }
    }

    pub fn simulation_config(&self) -> Result<SimulationConfig> {
        let geometry = self.geometry()?;
        let mut c = SimulationConfig::new(geometry, self.frame()?, self.tachyon_model()?);
        c.settings = self.bell_settings()?;
        c.state = EntangledState::new(self.state.as_ref().map_or(0.0, |s| s.phi.si()));
        let s = self.simulation.as_ref().ok_or_else(|| missing("simulation"))?;
        c.pairs_per_second = s.pairs_per_second.si();
        if let Some(w) = s.bin_width {
            c.bin_width = w.si();
        }
        if let Some(p) = s.path_mismatch {
            c.path_mismatch = p.si();
        }
        c.seed = s.seed;
        if let Some(d) = s.duration {
            c.duration = d.si();
        }
        c.efficiency = s.efficiency;
        c.accidental_rate = s.accidental_rate.si();
        c.validate()?;
        Ok(c)
    }

    pub fn drift_budget(&self) -> Result<(DriftBudget<f64>, f64)> {
        let d = self.drift.as_ref().ok_or_else(|| missing("drift"))?;
        let budget = DriftBudget::new(d.l0.si(), d.dn_dtemp.si(), d.delta_temp.si())?;
        if !(d.budget.si() > 0.0) {
            return Err(Error::invalid("drift budget must be positive"));
        }
        Ok((budget, d.budget.si()))
    }

    /// Sidereal period used for window scans.
    pub fn sidereal_period(&self) -> f64 {
        self.geometry
            .as_ref()
            .map(|g| g.sidereal_period.si())
            .or_else(|| self.bounds.as_ref().map(|b| b.sidereal_period.si()))
            .unwrap_or(SIDEREAL_DAY_S)
    }
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 12] = [
    "fig3-a", "fig3-b", "fig3-c", "fig3-d", "fig3-e", "fig4-I", "fig4-II", "fig4-III", "ego-qm",
    "ego-subbound", "ego-lhv", "ego-drift",
];

fn bounds_preset(label: &str, rho_bar: f64, delta_t_acq: f64) -> RunConfig {
    RunConfig {
        bounds: Some(BoundsSection {
            label: label.to_string(),
            rho_bar,
            delta_t_acq: Seconds(delta_t_acq),
            chi: right_angle(),
            sidereal_period: sidereal_day(),
        }),
        ..RunConfig::default()
    }
}

/// The long-baseline layout: 1600 m baseline, 220 µm equalization, 0.1 s
/// acquisition, frame at β = 10⁻³ perpendicular to the Earth's axis.
fn ego_simulation(beta_t: f64, fallback: Fallback, rate: f64, bin: f64, duration: Option<f64>) -> RunConfig {
    RunConfig {
        geometry: Some(GeometrySection {
            d_ab: Length(1600.0),
            delta_d: Length(220e-6),
            delta_t_acq: Seconds(0.1),
            gamma_align: zero_angle(),
            sidereal_period: sidereal_day(),
        }),
        frame: Some(FrameSection {
            beta: 1e-3,
            chi: right_angle(),
            t0: zero_seconds(),
        }),
        tachyon: Some(TachyonSection {
            beta_t,
            fallback: fallback.to_string(),
        }),
        state: Some(StateSection { phi: zero_angle() }),
        settings: Some(SettingsSection {
            a: Angle::from_degrees(0.0),
            a_prime: Angle::from_degrees(45.0),
            b: Angle::from_degrees(22.5),
            b_prime: Angle::from_degrees(67.5),
        }),
        simulation: Some(SimulationSection {
            pairs_per_second: Rate(rate),
            bin_width: Some(Seconds(bin)),
            path_mismatch: None,
            seed: 1,
            duration: duration.map(Seconds),
            efficiency: 1.0,
            accidental_rate: Rate(0.0),
        }),
        ..RunConfig::default()
    }
}

/// Bundled configurations.
///
/// `fig3-*` and `fig4-*` are the bound curves for the perpendicular frame
/// (`χ = π/2`); `ego-*` are simulation and drift setups for the long-baseline
/// experiment.
pub fn preset(name: &str) -> Result<RunConfig> {
    let t = SIDEREAL_DAY_S;
    let cfg = match name {
        "fig3-a" => bounds_preset(name, 1e-3, 0.1 * t / PI),
        "fig3-b" => bounds_preset(name, 1e-5, 0.1 * t / PI),
        "fig3-c" => bounds_preset(name, 1e-6, 0.1 * t / PI),
        "fig3-d" => bounds_preset(name, 1e-6, 1e-3 * t / PI),
        "fig3-e" => bounds_preset(name, 1e-6, 1e-7 * t / PI),
        "fig4-I" => bounds_preset(name, 1.6e-4, 4.0),
        "fig4-II" => bounds_preset(name, 5.4e-6, 360.0),
        "fig4-III" => bounds_preset(name, 1.9e-7, 0.1),
        "ego-qm" => ego_simulation(f64::INFINITY, Fallback::Uncorrelated, 1e4, 10.0, Some(100.0)),
        "ego-subbound" => ego_simulation(1e6, Fallback::Uncorrelated, 1e3, 10.0, None),
        "ego-lhv" => ego_simulation(
            1e6,
            Fallback::DeterministicLhv(crate::correlation::LhvKind::Threshold),
            1e3,
            10.0,
            None,
        ),
        "ego-drift" => RunConfig {
            drift: Some(DriftSection {
                l0: Length(800.0),
                dn_dtemp: default_dn_dt(),
                delta_temp: TempDiff(1.0),
                budget: default_budget(),
            }),
            ..RunConfig::default()
        },
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{}' (available: {})",
                other,
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(cfg)
}

/// Frame-speed grid given as `lo:hi:n:log|lin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub log: bool,
}

impl BetaGrid {
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let [lo, hi, n, kind] = parts[..] else {
            return Err(Error::Config(format!(
                "beta grid '{}' must look like lo:hi:n:log or lo:hi:n:lin",
                spec
            )));
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("beta grid: '{}' is not a number", s)))
        };
        let grid = BetaGrid {
            lo: num(lo)?,
            hi: num(hi)?,
            n: n
                .parse()
                .map_err(|_| Error::Config(format!("beta grid: '{}' is not a point count", n)))?,
            log: match kind {
                "log" => true,
                "lin" => false,
                other => {
                    return Err(Error::Config(format!(
                        "beta grid spacing must be 'log' or 'lin', got '{}'",
                        other
                    )))
                }
            },
        };
        grid.check()?;
        Ok(grid)
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("beta grid is empty (n = 0)".into()));
        }
        if !(self.lo >= 0.0 && self.hi < 1.0) {
            return Err(Error::Config("beta grid must lie in [0, 1)".into()));
        }
        if self.n > 1 && !(self.hi > self.lo) {
            return Err(Error::Config("beta grid needs hi > lo".into()));
        }
        if self.log && !(self.lo > 0.0) {
            return Err(Error::Config("log-spaced beta grid needs lo > 0".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let last = (self.n - 1) as f64;
        let mut pts: Vec<f64> = (0..self.n)
            .map(|i| {
                let s = i as f64 / last;
                if self.log {
                    (self.lo.ln() + (self.hi.ln() - self.lo.ln()) * s).exp()
                } else {
                    self.lo + (self.hi - self.lo) * s
                }
            })
            .collect();
        pts[0] = self.lo;
        pts[self.n - 1] = self.hi;
        pts
    }
}

impl Default for BetaGrid {
    fn default() -> Self {
        BetaGrid {
            lo: 1e-9,
            hi: 1.0 - 1e-9,
            n: 400,
            log: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn every_preset_round_trips() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            cfg.validate().unwrap();
            let text = cfg.to_toml().unwrap();
            let back = RunConfig::from_toml(&text).unwrap();
            assert_eq!(back, cfg, "{name}:\n{text}");
        }
        assert!(preset("fig5").is_err());
    }

    #[test]
    fn parses_a_hand_written_config() {
        let text = r#"
            [geometry]
            d_ab = "1.6 km"
            delta_d = "220 um"
            delta_t_acq = "100 ms"
            gamma_align = "0.1 deg"

            [frame]
            beta = 1e-3
            chi = "90 deg"

            [tachyon]
            beta_t = 1e3
            fallback = "lhv-threshold"

            [simulation]
            pairs_per_second = "2 kHz"
            bin_width = "10 s"
            seed = 99
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        let sim = cfg.simulation_config().unwrap();
        assert_eq!(sim.geometry.d_ab, 1600.0);
        assert_relative_eq!(sim.path_mismatch, 220e-6);
        assert_eq!(sim.pairs_per_second, 2000.0);
        assert_eq!(sim.duration, SIDEREAL_DAY_S);
        assert_eq!(sim.seed, 99);
        assert_eq!(sim.settings, BellSettings::default());
        let inputs = cfg.curve_inputs().unwrap();
        assert_relative_eq!(inputs.rho_bar, 220e-6 / 1600.0);
    }

    #[test]
    fn infinite_tachyon_speed_parses() {
        let text = "[tachyon]\nbeta_t = inf\n";
        let cfg = RunConfig::from_toml(text).unwrap();
        assert_eq!(cfg.tachyon_model().unwrap().beta_t, TachyonSpeed::Infinite);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_toml("[frame]\nbeta = 0.1\nspeed = 2\n").is_err());
        assert!(RunConfig::from_toml("[extra]\nx = 1\n").is_err());
        assert!(RunConfig::from_toml("[frame]\nbeta = 1.5\n").is_err());
        assert!(RunConfig::from_toml("[geometry]\nd_ab = \"1 m\"\ndelta_d = \"2 m\"\ndelta_t_acq = \"1 s\"\n").is_err());
        assert!(RunConfig::from_toml("[geometry]\nd_ab = 1600\ndelta_d = \"2 m\"\ndelta_t_acq = \"1 s\"\n").is_err());
        assert!(RunConfig::from_toml("[tachyon]\nbeta_t = 0.5\n").is_err());
        assert!(RunConfig::from_toml("[tachyon]\nbeta_t = 5\nfallback = \"magic\"\n").is_err());
        let err = RunConfig::from_toml("[bounds]\nlabel = \"x\"\nrho_bar = 2.0\ndelta_t_acq = \"1 s\"\n").unwrap_err();
        assert!(err.to_string().contains("rho_bar"), "{err}");
    }

    #[test]
    fn missing_sections_are_named() {
        let err = RunConfig::default().simulation_config().unwrap_err();
        assert!(err.to_string().contains("[geometry]"));
        assert!(RunConfig::default().drift_budget().is_err());
    }

    #[test]
    fn beta_grid_parsing() {
        let g = BetaGrid::parse("1e-9:0.999999999:5:log").unwrap();
        let p = g.points();
        assert_eq!(p.len(), 5);
        assert_eq!(p[0], 1e-9);
        assert_eq!(p[4], 0.999999999);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
        let lin = BetaGrid::parse("0:0.5:3:lin").unwrap().points();
        assert_eq!(lin, vec![0.0, 0.25, 0.5]);
        assert!(BetaGrid::parse("0:0.5:0:lin").is_err());
        assert!(BetaGrid::parse("0:0.5:3:log").is_err());
        assert!(BetaGrid::parse("0:1.5:3:lin").is_err());
        assert!(BetaGrid::parse("0:0.5:3").is_err());
        assert!(BetaGrid::parse("0:0.5:3:cubic").is_err());
    }

    #[test]
    fn preset_values() {
        let c = preset("fig3-c").unwrap().curve_inputs().unwrap();
        assert_eq!(c.rho_bar, 1e-6);
        assert_relative_eq!(c.delta_t_acq, 0.1 * SIDEREAL_DAY_S / PI);
        let sub = preset("ego-subbound").unwrap().simulation_config().unwrap();
        assert_eq!(sub.tachyon.beta_t, TachyonSpeed::Finite(1e6));
        assert_eq!(sub.bin_width, 10.0);
    }
}
