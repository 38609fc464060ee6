//! One-channel Bell quantity
//! `M = [N(a,b) − N(a,b′) + N(a′,b) + N(a′,b′) − N(a′,∞) − N(∞,b)] / N(∞,∞)`
//! per sidereal-time bin, its Poisson error, and the search for bins where the
//! quantum violation disappears.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sim::{Combo, CoincidenceTable};

/// Default half-width of the decision interval, in standard errors.
pub const DEFAULT_N_SIGMA: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MEstimate {
    pub bin_center: f64,
    pub m: f64,
    pub sigma_m: f64,
    /// `N(∞,∞)`.
    pub n_norm: u64,
}

/// `M` from the seven rates or probabilities, ordered as [`Combo::ALL`].
pub fn m_value(x: &[f64; 7]) -> f64 {
    (x[0] - x[1] + x[2] + x[3] - x[4] - x[5]) / x[6]
}

/// `M` and its standard error for one bin, treating the seven counts as
/// independent Poisson variables.
pub fn m_statistic(table: &CoincidenceTable) -> Result<MEstimate> {
    let n_norm = table.count(Combo::InfInf);
    if n_norm == 0 {
        return Err(Error::domain(format!(
            "N(inf,inf) is zero in the bin at {} s",
            table.bin_center
        )));
    }
    let counts = table.counts.map(|c| c as f64);
    let m = m_value(&counts);
    let norm = n_norm as f64;
    let numerator_var: f64 = counts[..6].iter().sum();
    let sigma_m = (numerator_var / (norm * norm) + m * m / norm).sqrt();
    Ok(MEstimate {
        bin_center: table.bin_center,
        m,
        sigma_m,
        n_norm,
    })
}

pub fn m_series(tables: &[CoincidenceTable]) -> Result<Vec<MEstimate>> {
    tables.iter().map(m_statistic).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The whole interval lies inside `[−1, 0]`.
    Consistent,
    /// Significantly above 0: quantum-like correlations.
    ViolatesUpper,
    /// Significantly below −1.
    ViolatesLower,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::ViolatesUpper => "violates-upper",
            Verdict::ViolatesLower => "violates-lower",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Verdict::Consistent,
            Verdict::ViolatesUpper,
            Verdict::ViolatesLower,
            Verdict::Inconclusive,
        ]
        .into_iter()
        .find(|v| v.label() == s.trim())
        .ok_or_else(|| Error::invalid(format!("unknown verdict '{}'", s)))
    }
}

/// Classifies `m ± n_sigma·σ` against `−1 ≤ M ≤ 0`.
pub fn inequality_verdict(e: &MEstimate, n_sigma: f64) -> Verdict {
    let lo = e.m - n_sigma * e.sigma_m;
    let hi = e.m + n_sigma * e.sigma_m;
    if lo > 0.0 {
        Verdict::ViolatesUpper
    } else if hi < -1.0 {
        Verdict::ViolatesLower
    } else if lo >= -1.0 && hi <= 0.0 {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    }
}

/// A contiguous run of bins without a significant quantum violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnomalyWindow {
    /// Midpoint of the run, reduced into `[0, period)` when it wraps.
    pub center: f64,
    pub first_bin: f64,
    pub last_bin: f64,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowScan {
    pub verdicts: Vec<(f64, Verdict)>,
    pub anomalies: Vec<AnomalyWindow>,
}

/// Finds runs of bins whose verdict is anything but `ViolatesUpper`.
///
/// When the series spans a whole period, a run touching both ends is merged
/// across the day boundary.
pub fn window_scan(series: &[MEstimate], period: f64, n_sigma: f64) -> Result<WindowScan> {
    if !(period > 0.0) {
        return Err(Error::invalid("period must be positive"));
    }
    let mut sorted = series.to_vec();
    sorted.sort_by(|a, b| a.bin_center.total_cmp(&b.bin_center));
    let verdicts: Vec<(f64, Verdict)> = sorted
        .iter()
        .map(|e| (e.bin_center, inequality_verdict(e, n_sigma)))
        .collect();

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut open: Option<usize> = None;
    for (i, (_, v)) in verdicts.iter().enumerate() {
        let anomalous = *v != Verdict::ViolatesUpper;
        match (anomalous, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        runs.push((s, verdicts.len() - 1));
    }

    let n = verdicts.len();
    let mut wrapped = false;
    if runs.len() >= 2 && n >= 2 {
        let first = verdicts[0].0;
        let last = verdicts[n - 1].0;
        let spacing = (last - first) / (n - 1) as f64;
        let covers_period = last - first + spacing >= period - 2.0 * spacing;
        let (s0, _) = runs[0];
        let (_, e_last) = runs[runs.len() - 1];
        if covers_period && s0 == 0 && e_last == n - 1 {
            wrapped = true;
        }
    }

    let window = |s: usize, e: usize, shift_end: f64, bins: usize| {
        let first_bin = verdicts[s].0;
        let last_bin = verdicts[e].0;
        let center = (0.5 * (first_bin + last_bin + shift_end)).rem_euclid(period);
        AnomalyWindow {
            center,
            first_bin,
            last_bin,
            bins,
        }
    };

    let mut anomalies = Vec::new();
    if wrapped {
        let (s_tail, _) = runs.pop().unwrap();
        let (_, e_head) = runs.remove(0);
        let bins = (n - s_tail) + e_head + 1;
        anomalies.extend(runs.iter().map(|&(s, e)| window(s, e, 0.0, e - s + 1)));
        anomalies.push(window(s_tail, e_head, period, bins));
        anomalies.sort_by(|a, b| a.center.total_cmp(&b.center));
    } else {
        anomalies.extend(runs.iter().map(|&(s, e)| window(s, e, 0.0, e - s + 1)));
    }

    Ok(WindowScan {
        verdicts,
        anomalies,
    })
}
