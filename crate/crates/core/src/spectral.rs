//! Carmona density approximants and spectral-type diagnostics.

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::potential::{BoundaryAngle, PotentialSpec};
use crate::propagate::{transfer, transfer_samples, Tolerances};
use crate::prufer::{prufer_advance, to_prufer};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest spacing of the sampling grid used for `x`-integrals of `‖T‖`.
pub const SAMPLE_SPACING: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityVariant {
    /// `1 / (π(φ² + (φ^{[1]})²))`.
    Standard,
    /// `√E / (π(Eφ² + (φ^{[1]})²))`, for `E > 0`.
    SqrtWeighted,
}

impl DensityVariant {
    pub fn name(self) -> &'static str {
        match self {
            DensityVariant::Standard => "standard",
            DensityVariant::SqrtWeighted => "sqrt_weighted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySamples {
    pub alpha: BoundaryAngle,
    pub x: f64,
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub variant: DensityVariant,
}

/// A positive quantity held by its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogValue {
    pub ln: f64,
}

impl LogValue {
    pub fn from_value(v: f64) -> Self {
        LogValue { ln: v.ln() }
    }

    /// The value, saturating at `f64::MAX`.
    pub fn value(self) -> f64 {
        self.ln.exp().min(f64::MAX)
    }
}

fn phi_initial(alpha: BoundaryAngle) -> [C64; 2] {
    let (s, c) = alpha.value().sin_cos();
    [C64::new(c, 0.0), C64::new(-s, 0.0)]
}

/// Carmona density of `φ_{α,E}` at `x`.
pub fn carmona_density(
    pot: &PotentialSpec,
    alpha: BoundaryAngle,
    x: f64,
    e: f64,
    variant: DensityVariant,
    tol: &Tolerances,
) -> Result<f64> {
    if variant == DensityVariant::SqrtWeighted && !(e > 0.0) {
        return Err(Error::InvalidParams(format!(
            "sqrt_weighted density needs E > 0, got {e}"
        )));
    }
    let t = transfer(pot, C64::new(e, 0.0), x, 0.0, tol)?;
    let (w, ls) = t.apply_scaled(phi_initial(alpha));
    let (q, u) = (w[0].re, w[1].re);
    let (num, den) = match variant {
        DensityVariant::Standard => (1.0, u * u + q * q),
        DensityVariant::SqrtWeighted => (e.sqrt(), e * u * u + q * q),
    };
    Ok(num / (PI * den) * (-2.0 * ls).exp())
}

/// [`carmona_density`] over an energy grid, computed in parallel.
pub fn carmona_densities(
    pot: &PotentialSpec,
    alpha: BoundaryAngle,
    x: f64,
    energies: &[f64],
    variant: DensityVariant,
    tol: &Tolerances,
) -> Result<DensitySamples> {
    let values = energies
        .par_iter()
        .map(|&e| carmona_density(pot, alpha, x, e, variant, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensitySamples {
        alpha,
        x,
        energies: energies.to_vec(),
        values,
        variant,
    })
}

/// Uniform grid on `[0, l]` with spacing at most [`SAMPLE_SPACING`], plus
/// the potential's breakpoints.
pub fn sampling_grid(pot: &PotentialSpec, l: f64) -> Vec<f64> {
    let n = ((l / SAMPLE_SPACING).ceil() as usize).max(1);
    let mut g: Vec<f64> = (0..=n).map(|i| l * i as f64 / n as f64).collect();
    g.extend(pot.breakpoints(0.0, l));
    g.sort_by(|a, b| a.partial_cmp(b).unwrap());
    g.dedup();
    g
}

fn log_norms(pot: &PotentialSpec, e: f64, grid: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    Ok(transfer_samples(pot, C64::new(e, 0.0), 0.0, grid, tol)?
        .iter()
        .map(|t| t.log_norm())
        .collect())
}

/// `ln ∫ e^{f}` by the trapezoid rule, stable for large `f`.
fn log_trapezoid(xs: &[f64], logs: &[f64]) -> f64 {
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for i in 1..xs.len() {
        s += 0.5 * (xs[i] - xs[i - 1]) * ((logs[i] - m).exp() + (logs[i - 1] - m).exp());
    }
    m + s.ln()
}

/// `(1/l) ∫₀ˡ ‖T(E; x)‖² dx`.
pub fn cesaro_average(pot: &PotentialSpec, e: f64, l: f64, tol: &Tolerances) -> Result<LogValue> {
    if !(l > 0.0) {
        return Err(Error::InvalidParams(format!("l must be positive, got {l}")));
    }
    let grid = sampling_grid(pot, l);
    let ln2: Vec<f64> = log_norms(pot, e, &grid, tol)?.iter().map(|v| 2.0 * v).collect();
    Ok(LogValue {
        ln: log_trapezoid(&grid, &ln2) - l.ln(),
    })
}

/// `∫₀ᴸ dx / ‖T(E; x)‖²`, integrating the linear interpolant on the grid of
/// multiples of [`SAMPLE_SPACING`] and breakpoints, so the value is monotone in `L`.
pub fn simon_stolz_integral(pot: &PotentialSpec, e: f64, l: f64, tol: &Tolerances) -> Result<f64> {
    if l == 0.0 {
        return Ok(0.0);
    }
    if !(l > 0.0) {
        return Err(Error::InvalidParams(format!("L must be nonnegative, got {l}")));
    }
    let cells = (l / SAMPLE_SPACING).ceil();
    let end = (cells * SAMPLE_SPACING).max(l).min(pot.x_max()).max(l);
    let mut grid: Vec<f64> = (0..cells as usize)
        .map(|j| j as f64 * SAMPLE_SPACING)
        .chain([end])
        .chain(pot.breakpoints(0.0, end))
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let ys: Vec<f64> = log_norms(pot, e, &grid, tol)?
        .iter()
        .map(|v| (-2.0 * v).exp())
        .collect();
    let n = grid.partition_point(|&g| g <= l);
    let mut total = crate::quadrature::trapezoid(&grid[..n], &ys[..n]);
    if n < grid.len() {
        let (x0, x1) = (grid[n - 1], grid[n]);
        let yl = ys[n - 1] + (ys[n] - ys[n - 1]) * (l - x0) / (x1 - x0);
        total += 0.5 * (l - x0) * (ys[n - 1] + yl);
    }
    Ok(total)
}

/// `∫_{E1}^{E2} ‖T(E; x)‖ᵖ dE` by the trapezoid rule on `n_grid` energies.
pub fn transfer_lp_norm(
    pot: &PotentialSpec,
    x: f64,
    p: f64,
    e1: f64,
    e2: f64,
    n_grid: usize,
    tol: &Tolerances,
) -> Result<f64> {
    if e1 == e2 {
        return Ok(0.0);
    }
    if !(e1 < e2) || !(p >= 1.0) || n_grid < 2 {
        return Err(Error::InvalidParams(
            "need E1 < E2, p >= 1 and at least two grid energies".into(),
        ));
    }
    let es: Vec<f64> = (0..n_grid)
        .map(|i| e1 + (e2 - e1) * i as f64 / (n_grid - 1) as f64)
        .collect();
    let logs = es
        .par_iter()
        .map(|&e| Ok(p * transfer(pot, C64::new(e, 0.0), x, 0.0, tol)?.log_norm()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(log_trapezoid(&es, &logs).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortRangeDensity {
    pub value: f64,
    pub x_stop: f64,
}

/// `w_α(E) = 1 / (π k R_∞²)` from the Prüfer radius of `φ_{α,E}`, stepping
/// in unit intervals until `|δ log R| < increment_tol`.
pub fn shortrange_density(
    pot: &PotentialSpec,
    alpha: BoundaryAngle,
    e: f64,
    increment_tol: f64,
    x_max: f64,
    tol: &Tolerances,
) -> Result<ShortRangeDensity> {
    if !(e > 0.0) {
        return Err(Error::InvalidParams(format!("E must be positive, got {e}")));
    }
    let k = e.sqrt();
    let v = phi_initial(alpha);
    let mut st = to_prufer([v[0].re, v[1].re], k, None)?;
    let mut x = 0.0;
    while x < x_max {
        let next = (x + 1.0).min(x_max);
        let nst = prufer_advance(pot, &st, next, tol)?;
        let delta = (nst.log_r - st.log_r).abs();
        st = nst;
        x = next;
        if delta < increment_tol {
            return Ok(ShortRangeDensity {
                value: 1.0 / (PI * k * (2.0 * st.log_r).exp()),
                x_stop: x,
            });
        }
    }
    Err(Error::NoConvergence(format!(
        "Prüfer radius still changing at x = {x_max}"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralTag {
    AcSupportCandidate,
    NotAc,
    Inconclusive,
}

impl SpectralTag {
    pub fn name(self) -> &'static str {
        match self {
            SpectralTag::AcSupportCandidate => "ac-support-candidate",
            SpectralTag::NotAc => "not-ac",
            SpectralTag::Inconclusive => "inconclusive",
        }
    }
}

/// Thresholds for [`classify_grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyParams {
    /// Cesàro lengths are `l0`, `2 l0`, `4 l0`.
    pub l0: f64,
    pub ratio_max: f64,
    pub cesaro_cap: f64,
    pub blowup_threshold: f64,
    /// `(x, y)` windows for `‖T(E; x, y)‖`; empty means `(l, 0)` for each Cesàro length.
    pub windows: Vec<(f64, f64)>,
    /// Simon–Stolz length; `None` means `4 l0`.
    pub stolz_length: Option<f64>,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            l0: 25.0,
            ratio_max: 4.0,
            cesaro_cap: 1e6,
            blowup_threshold: 1e6,
            windows: Vec::new(),
            stolz_length: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticEntry {
    pub e: f64,
    /// Cesàro averages at `l0`, `2 l0`, `4 l0`.
    pub cesaro: [LogValue; 3],
    pub simon_stolz: f64,
    /// Largest log-norm over the blow-up windows.
    pub window_log_norms: Vec<f64>,
    pub tag: SpectralTag,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticReport {
    pub entries: Vec<DiagnosticEntry>,
}

impl DiagnosticReport {
    pub fn tags(&self) -> Vec<SpectralTag> {
        self.entries.iter().map(|e| e.tag).collect()
    }
}

fn classify_one(
    pot: &PotentialSpec,
    e: f64,
    params: &ClassifyParams,
    tol: &Tolerances,
) -> Result<DiagnosticEntry> {
    let ls = [params.l0, 2.0 * params.l0, 4.0 * params.l0];
    let grid = sampling_grid(pot, ls[2]);
    let ln2: Vec<f64> = log_norms(pot, e, &grid, tol)?.iter().map(|v| 2.0 * v).collect();
    let mut cesaro = [LogValue { ln: 0.0 }; 3];
    for (c, &l) in cesaro.iter_mut().zip(&ls) {
        let n = grid.partition_point(|&g| g <= l);
        c.ln = log_trapezoid(&grid[..n], &ln2[..n]) - l.ln();
    }
    let simon_stolz = simon_stolz_integral(pot, e, params.stolz_length.unwrap_or(ls[2]), tol)?;
    let windows: Vec<(f64, f64)> = if params.windows.is_empty() {
        ls.iter().map(|&l| (l, 0.0)).collect()
    } else {
        params.windows.clone()
    };
    let window_log_norms = windows
        .iter()
        .map(|&(x, y)| Ok(transfer(pot, C64::new(e, 0.0), x, y, tol)?.log_norm()))
        .collect::<Result<Vec<f64>>>()?;
    let hi = cesaro.iter().map(|c| c.ln).fold(f64::NEG_INFINITY, f64::max);
    let lo = cesaro.iter().map(|c| c.ln).fold(f64::INFINITY, f64::min);
    let tag = if hi - lo < params.ratio_max.ln() && hi < params.cesaro_cap.ln() {
        SpectralTag::AcSupportCandidate
    } else if window_log_norms
        .iter()
        .all(|&v| v > params.blowup_threshold.ln())
    {
        SpectralTag::NotAc
    } else {
        SpectralTag::Inconclusive
    };
    Ok(DiagnosticEntry {
        e,
        cesaro,
        simon_stolz,
        window_log_norms,
        tag,
    })
}

/// Cesàro, Simon–Stolz and blow-up evidence per energy, with a tag.
pub fn classify_grid(
    pot: &PotentialSpec,
    e_grid: &[f64],
    params: &ClassifyParams,
    tol: &Tolerances,
) -> Result<DiagnosticReport> {
    if !(params.l0 > 0.0) {
        return Err(Error::InvalidParams("l0 must be positive".into()));
    }
    if e_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParams("energy grid must be strictly increasing".into()));
    }
    let entries = e_grid
        .par_iter()
        .map(|&e| classify_one(pot, e, params, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticReport { entries })
}
