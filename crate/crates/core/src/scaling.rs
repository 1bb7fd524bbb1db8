// SPDX-License-Identifier: Apache-2.0

//! Fits and threshold searches over sweep data.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{QuenchError, Result};

/// Concurrence below this value counts as vanishing.
pub const CONCURRENCE_THRESHOLD: f64 = 1e-6;
/// Default density of geometric τ grids.
pub const POINTS_PER_DECADE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVariable {
    Tau,
    Xi,
    Hf,
}

/// Ordered `(x, y)` samples of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub variable: SweepVariable,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Parameters held fixed during the sweep, by name.
    pub fixed: Vec<(String, f64)>,
    pub seed: Option<u64>,
}

impl SweepSeries {
    pub fn new(variable: SweepVariable, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(QuenchError::input("x and y lengths differ"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(QuenchError::input("x must be strictly increasing"));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(QuenchError::input("sweep values must be finite"));
        }
        Ok(Self {
            variable,
            x,
            y,
            fixed: Vec::new(),
            seed: None,
        })
    }

    pub fn with_fixed(mut self, name: &str, value: f64) -> Self {
        self.fixed.push((name.to_owned(), value));
        self
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Points with `lo ≤ x ≤ hi`.
    pub fn window(&self, window: FitWindow) -> (Vec<f64>, Vec<f64>) {
        self.x
            .iter()
            .zip(&self.y)
            .filter(|(x, _)| **x >= window.lo && **x <= window.hi)
            .map(|(x, y)| (*x, *y))
            .unzip()
    }

    /// SHA-256 over the variable, samples (bit patterns) and metadata.
    pub fn inputs_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&self.variable).expect("enum serializes"));
        for v in self.x.iter().chain(&self.y) {
            h.update(v.to_bits().to_le_bytes());
        }
        for (name, v) in &self.fixed {
            h.update(name.as_bytes());
            h.update(v.to_bits().to_le_bytes());
        }
        if let Some(seed) = self.seed {
            h.update(seed.to_le_bytes());
        }
        hex(&h.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FitWindow {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn all() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitKind {
    /// `ln y = slope · ln x + intercept`
    PowerLaw,
    /// `y = slope · ln x + intercept`
    Logarithmic,
    /// `y = slope · x + intercept`
    Linear,
}

/// Least-squares line with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: FitKind,
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    /// Residuals in the fitted coordinates.
    pub residuals: Vec<f64>,
    pub window: FitWindow,
    pub points: usize,
    pub inputs_hash: String,
}

impl FitResult {
    /// Power-law exponent (the slope).
    pub fn exponent(&self) -> f64 {
        self.slope
    }

    /// Prefactor of a power law, `e^intercept`.
    pub fn amplitude(&self) -> f64 {
        match self.kind {
            FitKind::PowerLaw => self.intercept.exp(),
            _ => self.intercept,
        }
    }

    /// Abscissa where the fitted line crosses zero.
    pub fn zero_crossing(&self) -> f64 {
        match self.kind {
            FitKind::Logarithmic => (-self.intercept / self.slope).exp(),
            FitKind::Linear => -self.intercept / self.slope,
            FitKind::PowerLaw => f64::NAN,
        }
    }

    /// JSON record with the exported field names.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "kind": self.kind,
            "slope": self.slope,
            "intercept": self.intercept,
            "slope_stderr": self.slope_stderr,
            "r_squared": self.r_squared,
            "window": [self.window.lo, self.window.hi],
            "points": self.points,
            "residuals": self.residuals,
            "inputs_hash": self.inputs_hash,
        });
        match self.kind {
            FitKind::PowerLaw => {
                v["exponent"] = self.slope.into();
                v["amplitude"] = self.amplitude().into();
            }
            FitKind::Logarithmic => v["zero_crossing"] = self.zero_crossing().into(),
            FitKind::Linear => {}
        }
        v
    }
}

struct Line {
    slope: f64,
    intercept: f64,
    slope_stderr: f64,
    r_squared: f64,
    residuals: Vec<f64>,
}

fn least_squares(x: &[f64], y: &[f64]) -> Line {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (slope * a + intercept)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let slope_stderr = if x.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Line {
        slope,
        intercept,
        slope_stderr,
        r_squared,
        residuals,
    }
}

fn fit(series: &SweepSeries, window: FitWindow, kind: FitKind, min_points: usize) -> Result<FitResult> {
    let (x, y) = series.window(window);
    if x.len() < min_points {
        return Err(QuenchError::Fit(format!(
            "{} points in window [{}, {}], need {min_points}",
            x.len(),
            window.lo,
            window.hi
        )));
    }
    let (fx, fy): (Vec<f64>, Vec<f64>) = match kind {
        FitKind::PowerLaw => {
            if x.iter().chain(&y).any(|v| *v <= 0.0) {
                return Err(QuenchError::Fit("power-law fit needs positive x and y".into()));
            }
            (x.iter().map(|v| v.ln()).collect(), y.iter().map(|v| v.ln()).collect())
        }
        FitKind::Logarithmic => {
            if x.iter().any(|v| *v <= 0.0) {
                return Err(QuenchError::Fit("logarithmic fit needs positive x".into()));
            }
            (x.iter().map(|v| v.ln()).collect(), y)
        }
        FitKind::Linear => (x, y),
    };
    let line = least_squares(&fx, &fy);
    Ok(FitResult {
        kind,
        slope: line.slope,
        intercept: line.intercept,
        slope_stderr: line.slope_stderr,
        r_squared: line.r_squared,
        residuals: line.residuals,
        window,
        points: fx.len(),
        inputs_hash: series.inputs_hash(),
    })
}

/// Straight line through `(ln x, ln y)`. Needs at least 5 points for τ
/// sweeps and 3 for sweeps over a handful of noise strengths or fields.
pub fn fit_power_law(series: &SweepSeries, window: FitWindow) -> Result<FitResult> {
    let min_points = match series.variable {
        SweepVariable::Tau => 5,
        SweepVariable::Xi | SweepVariable::Hf => 3,
    };
    fit(series, window, FitKind::PowerLaw, min_points)
}

/// Straight line through `(ln x, y)`; needs at least 6 points.
pub fn fit_log_scaling(series: &SweepSeries, window: FitWindow) -> Result<FitResult> {
    fit(series, window, FitKind::Logarithmic, 6)
}

/// Straight line through `(x, y)`; needs at least 3 points.
pub fn fit_linear(series: &SweepSeries, window: FitWindow) -> Result<FitResult> {
    fit(series, window, FitKind::Linear, 3)
}

/// `per_decade` geometric points per decade from `lo` to `hi`, both included.
pub fn geometric_grid(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || per_decade == 0 {
        return Err(QuenchError::input(format!(
            "bad geometric grid {lo}:{hi}:{per_decade}"
        )));
    }
    let decades = (hi / lo).log10();
    let intervals = ((decades * per_decade as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok((0..=intervals)
        .map(|i| {
            if i == intervals {
                hi
            } else {
                lo * (hi / lo).powf(i as f64 / intervals as f64)
            }
        })
        .collect())
}

/// Bisects for the boundary between `lo` (predicate false) and `hi` (true).
fn bisect<F>(mut pred: F, mut lo: f64, mut hi: f64, iterations: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest τ in `[lo, hi]` at which `concurrence(τ)` exceeds `eps`,
/// by 20 bisection steps.
pub fn estimate_tau0<F>(mut concurrence: F, lo: f64, hi: f64, eps: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(QuenchError::input("empty bracket"));
    }
    let (c_lo, c_hi) = (concurrence(lo)?, concurrence(hi)?);
    if c_lo > eps || c_hi <= eps {
        return Err(QuenchError::Search(format!(
            "no onset in [{lo}, {hi}]: C = {c_lo:.3e}, {c_hi:.3e}"
        )));
    }
    bisect(|t| Ok(concurrence(t)? > eps), lo, hi, 20)
}

/// Largest τ at which `concurrence(τ)` exceeds `eps`: a scan over `grid`
/// followed by 20 bisection steps inside the last entangled interval.
pub fn estimate_tau_c<F>(mut concurrence: F, grid: &[f64], eps: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let values = grid.iter().map(|&t| concurrence(t)).collect::<Result<Vec<_>>>()?;
    tau_c_from_scan(&mut concurrence, grid, &values, eps)
}

/// [`estimate_tau_c`] reusing already computed scan values.
pub fn tau_c_from_scan<F>(mut concurrence: F, grid: &[f64], values: &[f64], eps: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let last = values
        .iter()
        .rposition(|&c| c > eps)
        .ok_or_else(|| QuenchError::Search("no entangled window on the scan grid".into()))?;
    if last + 1 == grid.len() {
        return Err(QuenchError::Search(format!(
            "entangled window extends beyond the scan end {}",
            grid[last]
        )));
    }
    bisect(|t| Ok(concurrence(t)? <= eps), grid[last], grid[last + 1], 20)
}

/// Location of the interior minimum of `y(x)`, by a parabola through the
/// discrete minimum and its neighbours in `(ln x, ln y)`.
pub fn estimate_tau_opt(series: &SweepSeries) -> Result<f64> {
    if series.y.iter().any(|v| *v <= 0.0) || series.x.iter().any(|v| *v <= 0.0) {
        return Err(QuenchError::Fit("defect series must be positive".into()));
    }
    let (i, _) = series
        .y
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| QuenchError::Fit("empty series".into()))?;
    if i == 0 || i + 1 == series.len() {
        return Err(QuenchError::Fit("series has no interior minimum".into()));
    }
    let lx: Vec<f64> = series.x[i - 1..=i + 1].iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = series.y[i - 1..=i + 1].iter().map(|v| v.ln()).collect();
    let (d1, d2) = (lx[1] - lx[0], lx[2] - lx[1]);
    let (s1, s2) = ((ly[1] - ly[0]) / d1, (ly[2] - ly[1]) / d2);
    let curvature = (s2 - s1) / (0.5 * (d1 + d2));
    // Vertex of the parabola through the three points.
    let slope_mid = 0.5 * (s1 + s2);
    let centre = 0.5 * (lx[0] + lx[2]);
    let vertex = centre - slope_mid / curvature;
    Ok(vertex.clamp(lx[0], lx[2]).exp())
}

/// Largest sample `(x, y)` of a series.
pub fn max_concurrence(series: &SweepSeries) -> Result<(f64, f64)> {
    series
        .x
        .iter()
        .zip(&series.y)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(x, y)| (*x, *y))
        .ok_or_else(|| QuenchError::Fit("empty series".into()))
}
