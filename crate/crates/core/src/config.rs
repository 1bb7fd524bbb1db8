// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: defaults, TOML files, and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::IntegratorParams;
use crate::error::{QuenchError, Result};
use crate::model::{build_grid, NoiseKind, NoiseSpec, QuenchProtocol};
use crate::oracle::MAX_ED_EVOLVE_SITES;
use crate::scaling::geometric_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Static,
    Quench,
    SweepTau,
    SweepXi,
    Defects,
    Fit,
    OracleCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Static => "static",
            Self::Quench => "quench",
            Self::SweepTau => "sweep-tau",
            Self::SweepXi => "sweep-xi",
            Self::Defects => "defects",
            Self::Fit => "fit",
            Self::OracleCheck => "oracle-check",
        }
    }

    /// Final field used when none is configured: next-nearest-neighbour
    /// sweeps end deep in the paramagnet, ramps along the field stop at 5.
    pub fn default_h_f(self) -> f64 {
        match self {
            Self::SweepTau | Self::SweepXi | Self::Defects => 30.0,
            _ => 5.0,
        }
    }
}

/// Geometric grid `lo:hi:points-per-decade`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        geometric_grid(self.lo, self.hi, self.per_decade).map_err(|e| QuenchError::config(e.to_string()))
    }
}

impl FromStr for GridSpec {
    type Err = QuenchError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || QuenchError::config(format!("grid `{s}` is not lo:hi:points-per-decade"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let spec = GridSpec {
            lo: parts[0].trim().parse().map_err(|_| bad())?,
            hi: parts[1].trim().parse().map_err(|_| bad())?,
            per_decade: parts[2].trim().parse().map_err(|_| bad())?,
        };
        spec.points()?;
        Ok(spec)
    }
}

impl TryFrom<String> for GridSpec {
    type Error = QuenchError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        g.to_string()
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.per_decade)
    }
}

/// Parses `a,b,c` or a linear range `lo:hi:count`.
pub fn parse_value_list(s: &str) -> Result<Vec<f64>> {
    let bad = || QuenchError::config(format!("`{s}` is neither a comma list nor lo:hi:count"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return match count {
            0 => Err(bad()),
            1 => Ok(vec![lo]),
            _ => Ok((0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect()),
        };
    }
    s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

/// τ grid used by the sweeps when none is given.
pub const DEFAULT_TAU_GRID: GridSpec = GridSpec { lo: 1.0, hi: 1000.0, per_decade: 24 };

/// Full description of one run. Field names double as TOML keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Chain length.
    pub n: usize,
    pub h_i: f64,
    /// Final field; the experiment's default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_f: Option<f64>,
    pub tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<GridSpec>,
    pub xi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_grid: Option<Vec<f64>>,
    pub noise: NoiseKind,
    /// Correlation time of Ornstein-Uhlenbeck noise.
    pub tau_n: f64,
    pub seed: u64,
    pub out: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Record observables along the ramp instead of only at its end.
    pub hf_scan: bool,
    /// Number of field values in `static` scans and `--hf-scan` readouts.
    pub scan_points: usize,
    pub integrator: IntegratorParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 200,
            h_i: -30.0,
            h_f: None,
            tau: 10.0,
            tau_grid: None,
            xi: 0.0,
            xi_grid: None,
            noise: NoiseKind::White,
            tau_n: 1.0,
            seed: 0,
            out: PathBuf::from("out"),
            threads: None,
            hf_scan: false,
            scan_points: 241,
            integrator: IntegratorParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| QuenchError::config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QuenchError::config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }

    pub fn h_f_for(&self, kind: ExperimentKind) -> f64 {
        self.h_f.unwrap_or_else(|| kind.default_h_f())
    }

    /// Noise strengths of the run: the grid when given, otherwise `[xi]`.
    /// τ grid of the sweeps; `1:1000:24` when none is configured.
    pub fn tau_points(&self) -> Result<Vec<f64>> {
        match &self.tau_grid {
            Some(g) => g.points(),
            None => DEFAULT_TAU_GRID.points(),
        }
    }

    pub fn xi_values(&self) -> Vec<f64> {
        self.xi_grid.clone().unwrap_or_else(|| vec![self.xi])
    }

    pub fn noise_spec(&self, xi: f64) -> NoiseSpec {
        match self.noise {
            NoiseKind::White => NoiseSpec::white(xi),
            NoiseKind::OrnsteinUhlenbeck => NoiseSpec::ornstein_uhlenbeck(xi, self.tau_n),
        }
    }

    /// Checks every field the experiment reads, before any computation.
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        let cfg = |e: QuenchError| match e {
            QuenchError::InvalidInput(m) => QuenchError::Config(m),
            other => other,
        };
        if kind == ExperimentKind::Fit {
            return Ok(());
        }
        build_grid(self.n).map_err(cfg)?;
        self.integrator.validate()?;
        if self.threads == Some(0) {
            return Err(QuenchError::config("thread count must be positive"));
        }
        let h_f = self.h_f_for(kind);
        if !self.h_i.is_finite() || !h_f.is_finite() {
            return Err(QuenchError::config("fields must be finite"));
        }
        for xi in self.xi_values() {
            self.noise_spec(xi).validate()?;
        }
        if self.noise != NoiseKind::White && !self.xi_values().iter().all(|&x| x == 0.0) {
            return Err(QuenchError::config(
                "chain experiments average over white noise only; Ornstein-Uhlenbeck noise is limited to the single-mode trajectory sampler",
            ));
        }
        match kind {
            ExperimentKind::Static => {
                if self.scan_points < 2 {
                    return Err(QuenchError::config("static scans need at least two fields"));
                }
            }
            ExperimentKind::Quench => {
                QuenchProtocol::new(self.h_i, h_f, self.tau).map_err(cfg)?;
                if self.hf_scan && self.scan_points < 2 {
                    return Err(QuenchError::config("--hf-scan needs at least two readouts"));
                }
            }
            ExperimentKind::SweepTau | ExperimentKind::Defects => {
                QuenchProtocol::new(self.h_i, h_f, 1.0).map_err(cfg)?;
                self.tau_points().map_err(cfg)?;
            }
            ExperimentKind::SweepXi => {
                QuenchProtocol::new(self.h_i, h_f, 1.0).map_err(cfg)?;
                self.tau_points().map_err(cfg)?;
                let xs = self
                    .xi_grid
                    .as_ref()
                    .ok_or_else(|| QuenchError::config("sweep-xi needs --xi-grid"))?;
                if xs.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(QuenchError::config("--xi-grid must be strictly increasing"));
                }
            }
            ExperimentKind::OracleCheck => {
                if self.n > MAX_ED_EVOLVE_SITES || self.n < 4 {
                    return Err(QuenchError::config(format!(
                        "oracle-check supports 4 <= n <= {MAX_ED_EVOLVE_SITES}"
                    )));
                }
            }
            ExperimentKind::Fit => unreachable!(),
        }
        Ok(())
    }
}
