//! Monte Carlo of a seven-day coincidence campaign.
//!
//! Each polarizer-setting combination is measured for a full sidereal day
//! ("pass"). The day is cut into bins; in every bin the engine decides at the
//! bin centre whether a tachyon can connect the two measurements, draws a
//! Poisson number of pairs and samples each pair's outcome from the quantum or
//! fallback statistics.
//!
//! Randomness is counter based: the master seed keys a ChaCha8 generator and
//! every `(pass, bin)` unit reads its own stream, pair after pair. Units can
//! therefore be processed in any order or on any number of threads without
//! changing a single count.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::correlation::{
    effective_joint, EntangledState, HiddenSample, JointOutcomeDistribution, PolarizerSetting,
    TachyonModel,
};
use crate::error::{Error, Result};
use crate::relativity::{
    boost_delta_ct, communication_feasible, pf_separation, ExperimentGeometry, PreferredFrameSpec,
};

/// Default pair rate, pairs per second.
pub const DEFAULT_PAIR_RATE: f64 = 1e5;

/// The seven polarizer combinations of the one-channel inequality, in
/// measurement order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Combo {
    AB,
    ABPrime,
    APrimeB,
    APrimeBPrime,
    APrimeInf,
    InfB,
    InfInf,
}

impl Combo {
    pub const ALL: [Combo; 7] = [
        Combo::AB,
        Combo::ABPrime,
        Combo::APrimeB,
        Combo::APrimeBPrime,
        Combo::APrimeInf,
        Combo::InfB,
        Combo::InfInf,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Combo::AB => "ab",
            Combo::ABPrime => "ab'",
            Combo::APrimeB => "a'b",
            Combo::APrimeBPrime => "a'b'",
            Combo::APrimeInf => "a'inf",
            Combo::InfB => "infb",
            Combo::InfInf => "infinf",
        }
    }

    /// Polarizer settings on the two sides for this combination.
    pub fn settings(self, s: &BellSettings) -> (PolarizerSetting<f64>, PolarizerSetting<f64>) {
        use PolarizerSetting::Removed;
        let p = PolarizerSetting::angle;
        match self {
            Combo::AB => (p(s.a), p(s.b)),
            Combo::ABPrime => (p(s.a), p(s.b_prime)),
            Combo::APrimeB => (p(s.a_prime), p(s.b)),
            Combo::APrimeBPrime => (p(s.a_prime), p(s.b_prime)),
            Combo::APrimeInf => (p(s.a_prime), Removed),
            Combo::InfB => (Removed, p(s.b)),
            Combo::InfInf => (Removed, Removed),
        }
    }
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Combo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Combo::ALL
            .into_iter()
            .find(|c| c.label() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown setting combination '{}'", s)))
    }
}

/// Polarizer angles (radians from vertical) for the two settings per side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl BellSettings {
    pub fn new(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<Self> {
        let norm = |x: f64| match PolarizerSetting::angle(x) {
            PolarizerSetting::Angle(v) => v,
            PolarizerSetting::Removed => unreachable!(),
        };
        if ![a, a_prime, b, b_prime].iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("polarizer angles must be finite"));
        }
        let s = BellSettings {
            a: norm(a),
            a_prime: norm(a_prime),
            b: norm(b),
            b_prime: norm(b_prime),
        };
        let same = |x: f64, y: f64| {
            let d = (x - y).abs();
            d.min(std::f64::consts::PI - d) < 1e-12
        };
        if same(s.a, s.a_prime) || same(s.b, s.b_prime) {
            return Err(Error::invalid(
                "the two settings on each side must differ (a != a', b != b')",
            ));
        }
        Ok(s)
    }
}

impl Default for BellSettings {
    /// 0°, 45°, 22.5°, 67.5°: the orientations of maximal quantum violation.
    fn default() -> Self {
        BellSettings {
            a: 0.0,
            a_prime: 45f64.to_radians(),
            b: 22.5f64.to_radians(),
            b_prime: 67.5f64.to_radians(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub geometry: ExperimentGeometry<f64>,
    pub pf: PreferredFrameSpec<f64>,
    pub tachyon: TachyonModel<f64>,
    pub state: EntangledState<f64>,
    pub settings: BellSettings,
    /// Mean pair emission rate, Hz.
    pub pairs_per_second: f64,
    /// Sidereal-time bin width, seconds.
    pub bin_width: f64,
    /// Actual optical path difference `Δct` (meters), `|value| ≤ Δd`.
    pub path_mismatch: f64,
    pub seed: u64,
    /// Length of each pass, seconds.
    pub duration: f64,
    /// Per-detector efficiency; a coincidence is registered with probability `η²`.
    pub efficiency: f64,
    /// Accidental coincidence rate added to every count, Hz.
    pub accidental_rate: f64,
}

impl SimulationConfig {
    /// Config with the defaults: rate 1e5 Hz, bins of one acquisition time,
    /// worst-case mismatch `+Δd`, one sidereal day, ideal detectors.
    pub fn new(
        geometry: ExperimentGeometry<f64>,
        pf: PreferredFrameSpec<f64>,
        tachyon: TachyonModel<f64>,
    ) -> Self {
        SimulationConfig {
            geometry,
            pf,
            tachyon,
            state: EntangledState::default(),
            settings: BellSettings::default(),
            pairs_per_second: DEFAULT_PAIR_RATE,
            bin_width: geometry.delta_t_acq,
            path_mismatch: geometry.delta_d,
            seed: 0,
            duration: geometry.sidereal_period,
            efficiency: 1.0,
            accidental_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.path_mismatch.abs() <= self.geometry.delta_d) {
            return Err(Error::invalid(format!(
                "path_mismatch {} m exceeds the equalization uncertainty delta_d = {} m",
                self.path_mismatch, self.geometry.delta_d
            )));
        }
        if !(self.pairs_per_second > 0.0 && self.pairs_per_second.is_finite()) {
            return Err(Error::invalid(format!(
                "pairs_per_second must be positive, got {}",
                self.pairs_per_second
            )));
        }
        if !(self.bin_width >= self.geometry.delta_t_acq && self.bin_width.is_finite()) {
            return Err(Error::invalid(format!(
                "bin_width {} s must be at least the acquisition time {} s",
                self.bin_width, self.geometry.delta_t_acq
            )));
        }
        if !(self.duration >= self.bin_width && self.duration.is_finite()) {
            return Err(Error::invalid(format!(
                "duration {} s must cover at least one bin of {} s",
                self.duration, self.bin_width
            )));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::invalid(format!(
                "detector efficiency must lie in (0, 1], got {}",
                self.efficiency
            )));
        }
        if !(self.accidental_rate >= 0.0 && self.accidental_rate.is_finite()) {
            return Err(Error::invalid("accidental rate must be non-negative"));
        }
        Ok(())
    }

    /// Whole bins per pass and the seconds left over at the end of the pass.
    pub fn bin_layout(&self) -> (usize, f64) {
        let ratio = self.duration / self.bin_width;
        let mut n = ratio.floor();
        if ratio - n > 1.0 - 1e-9 {
            n += 1.0;
        }
        let leftover = (self.duration - n * self.bin_width).max(0.0);
        let leftover = if leftover <= 1e-9 * self.duration { 0.0 } else { leftover };
        (n as usize, leftover)
    }

    pub fn bin_center(&self, bin: usize) -> f64 {
        (bin as f64 + 0.5) * self.bin_width
    }
}

/// Coincidence counts of all seven combinations at one sidereal-time bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceTable {
    pub bin_center: f64,
    pub counts: [u64; 7],
}

impl CoincidenceTable {
    pub fn count(&self, combo: Combo) -> u64 {
        self.counts[combo.index()]
    }
}

/// What happened in one bin of one pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinTally {
    /// Pairs emitted.
    pub pairs: u64,
    /// True outcomes (pass-pass, pass-fail, fail-pass, fail-fail); sums to `pairs`.
    pub outcomes: [u64; 4],
    /// Registered coincidences: detected pass-pass pairs plus accidentals.
    pub coincidences: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassRecord {
    pub combo: Combo,
    pub bins: Vec<BinTally>,
}

impl PassRecord {
    pub fn total_pairs(&self) -> u64 {
        self.bins.iter().map(|b| b.pairs).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationMetadata {
    pub seed: u64,
    pub bins: usize,
    pub bin_width_s: f64,
    pub duration_s: f64,
    /// Number of partial trailing bins dropped (0 or 1).
    pub dropped_partial_bins: usize,
    pub dropped_seconds: f64,
    pub infeasible_bins: usize,
    /// Total pairs drawn per pass, keyed by combination label.
    pub pairs_per_pass: Vec<(String, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    /// One table per bin, ordered by bin centre.
    pub tables: Vec<CoincidenceTable>,
    pub passes: Vec<PassRecord>,
    /// Communication feasibility at each bin centre.
    pub feasible: Vec<bool>,
    pub metadata: SimulationMetadata,
}

/// Whether a tachyon can connect the two measurements at sidereal time `t`,
/// given the configured path mismatch.
pub fn feasibility_at(config: &SimulationConfig, t: f64) -> Result<bool> {
    let geom = &config.geometry;
    let beta_vec = config.pf.velocity_at(t, geom.sidereal_period);
    let dct = config.path_mismatch;
    let dct_prime = boost_delta_ct(dct, geom.separation(), beta_vec)?;
    let d_prime = pf_separation(dct, dct_prime, geom.d_ab)?;
    Ok(communication_feasible(config.tachyon.beta_t, dct_prime, d_prime))
}

fn stream_id(pass: usize, bin: usize) -> u64 {
    ((pass as u64) << 48) | bin as u64
}

fn categorize(u: f64, d: &JointOutcomeDistribution<f64>) -> usize {
    let c1 = d.p_pp;
    let c2 = c1 + d.p_pf;
    let c3 = c2 + d.p_fp;
    if u < c1 {
        0
    } else if u < c2 {
        1
    } else if u < c3 {
        2
    } else {
        3
    }
}

fn simulate_unit(config: &SimulationConfig, combo: Combo, pass: usize, bin: usize, feasible: bool) -> Result<BinTally> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream_id(pass, bin));

    let mean = config.pairs_per_second * config.bin_width;
    let poisson = Poisson::new(mean)
        .map_err(|e| Error::invalid(format!("pair count mean {}: {}", mean, e)))?;
    let pairs = poisson.sample(&mut rng) as u64;

    let (sa, sb) = combo.settings(&config.settings);
    let model = &config.tachyon;
    let per_pair_hidden = !feasible && model.fallback.needs_hidden_variable();
    let fixed = if per_pair_hidden {
        None
    } else {
        Some(effective_joint(model, &config.state, feasible, None, sa, sb)?)
    };
    let detect_p = config.efficiency * config.efficiency;

    let mut tally = BinTally {
        pairs,
        ..BinTally::default()
    };
    for _ in 0..pairs {
        let dist = match fixed {
            Some(d) => d,
            None => {
                let lambda = rng.random::<f64>() * std::f64::consts::PI;
                effective_joint(model, &config.state, false, Some(HiddenSample { lambda }), sa, sb)?
            }
        };
        let outcome = categorize(rng.random::<f64>(), &dist);
        tally.outcomes[outcome] += 1;
        if outcome == 0 && (detect_p >= 1.0 || rng.random::<f64>() < detect_p) {
            tally.coincidences += 1;
        }
    }
    if config.accidental_rate > 0.0 {
        let acc = Poisson::new(config.accidental_rate * config.bin_width)
            .map_err(|e| Error::invalid(format!("accidental rate: {}", e)))?;
        tally.coincidences += acc.sample(&mut rng) as u64;
    }
    Ok(tally)
}

/// Runs the seven passes on the current rayon pool.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationRun> {
    config.validate()?;
    let (nbins, leftover) = config.bin_layout();
    if nbins == 0 {
        return Err(Error::invalid("duration shorter than one bin"));
    }

    let feasible = (0..nbins)
        .into_par_iter()
        .map(|k| feasibility_at(config, config.bin_center(k)))
        .collect::<Result<Vec<bool>>>()?;

    let tallies = (0..Combo::ALL.len() * nbins)
        .into_par_iter()
        .map(|unit| {
            let (pass, bin) = (unit / nbins, unit % nbins);
            simulate_unit(config, Combo::ALL[pass], pass, bin, feasible[bin])
        })
        .collect::<Result<Vec<BinTally>>>()?;

    let passes: Vec<PassRecord> = Combo::ALL
        .iter()
        .zip(tallies.chunks(nbins))
        .map(|(&combo, bins)| PassRecord {
            combo,
            bins: bins.to_vec(),
        })
        .collect();

    let tables = (0..nbins)
        .map(|k| {
            let mut counts = [0u64; 7];
            for (c, p) in counts.iter_mut().zip(&passes) {
                *c = p.bins[k].coincidences;
            }
            CoincidenceTable {
                bin_center: config.bin_center(k),
                counts,
            }
        })
        .collect();

    let metadata = SimulationMetadata {
        seed: config.seed,
        bins: nbins,
        bin_width_s: config.bin_width,
        duration_s: config.duration,
        dropped_partial_bins: usize::from(leftover > 0.0),
        dropped_seconds: leftover,
        infeasible_bins: feasible.iter().filter(|f| !**f).count(),
        pairs_per_pass: passes
            .iter()
            .map(|p| (p.combo.label().to_string(), p.total_pairs()))
            .collect(),
    };

    Ok(SimulationRun {
        tables,
        passes,
        feasible,
        metadata,
    })
}

/// Runs the simulation on a dedicated pool of `threads` workers. The result
/// does not depend on the worker count.
pub fn run_simulation_with_threads(config: &SimulationConfig, threads: usize) -> Result<SimulationRun> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot build worker pool: {}", e)))?;
    pool.install(|| run_simulation(config))
}
