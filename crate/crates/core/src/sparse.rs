//! Sparse potentials `Σ dₙ Wₙ(x − xₙ)`, per-bump Prüfer propagation with
//! exact gaps, drift predictors and transition traces.

use crate::dd::{Dd, ExactLength};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::potential::{
    build_potential, profile_fourier, BoundaryAngle, Form, Part, PotentialSpec, Profile,
    SegmentDescriptor,
};
use crate::propagate::Tolerances;
use crate::prufer::{gap_advance, prufer_advance, to_prufer, PruferState};
use crate::quadrature::integrate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Largest accepted phase reduction error after a gap, in radians.
pub const PHASE_TOL: f64 = 1e-4;

/// Bump positions below this bound are included in the assembled potential.
pub const POTENTIAL_POSITION_LIMIT: u128 = 1 << 50;

/// Coupling constants `dₙ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DRule {
    /// `dₙ = scale · n^{−exponent}`.
    Power {
        exponent: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    List { values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl DRule {
    pub fn value(&self, n: usize) -> Result<f64> {
        match self {
            DRule::Power { exponent, scale } => Ok(scale * (n as f64).powf(-exponent)),
            DRule::List { values } => values.get(n - 1).copied().ok_or_else(|| {
                Error::InvalidParams(format!("d list has {} entries, need n = {n}", values.len()))
            }),
        }
    }
}

/// Bump centres `xₙ`, held exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum XRule {
    /// `xₙ = c · n!`.
    Factorial { c: u64 },
    /// `xₙ = c · 2^{n²}`.
    SuperExponential { c: u64 },
    /// Explicit positions; each must be a double with an exact binary value.
    List { values: Vec<f64> },
}

fn exact_from_f64(v: f64) -> Result<ExactLength> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::InvalidParams(format!("position {v} must be finite and nonnegative")));
    }
    let w = v.floor();
    ExactLength::new(w as u128, v - w)
        .ok_or_else(|| Error::InvalidParams(format!("position {v} is not representable")))
}

impl XRule {
    pub fn position(&self, n: usize) -> Result<ExactLength> {
        let overflow = || Error::InvalidParams(format!("position x_{n} overflows 128 bits"));
        match self {
            XRule::Factorial { c } => {
                let mut acc = *c as u128;
                for i in 2..=n as u128 {
                    acc = acc.checked_mul(i).ok_or_else(overflow)?;
                }
                Ok(ExactLength::integer(acc))
            }
            XRule::SuperExponential { c } => {
                let e = (n as u32).checked_mul(n as u32).filter(|e| *e < 128).ok_or_else(overflow)?;
                let v = (*c as u128).checked_mul(1u128 << e).ok_or_else(overflow)?;
                Ok(ExactLength::integer(v))
            }
            XRule::List { values } => exact_from_f64(*values.get(n - 1).ok_or_else(|| {
                Error::InvalidParams(format!("x list has {} entries, need n = {n}", values.len()))
            })?),
        }
    }
}

/// Classification thresholds for transition traces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitionThresholds {
    /// `Y(n_max) > growth_factor · Y(n_max / 2)` on the singular side.
    pub growth_factor: f64,
    /// Accepted range of `Y(n_max) / ΣX̊` on the singular side.
    pub band: (f64, f64),
    /// Largest `max − min` of `Y` over the last half of bumps on the ac side.
    pub ac_band: f64,
}

impl Default for TransitionThresholds {
    fn default() -> Self {
        TransitionThresholds {
            growth_factor: 1.1,
            band: (0.5, 1.5),
            ac_band: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseConfig {
    pub profile: Arc<Profile>,
    /// Bump `n` uses the profile scaled by `1 + profile_perturbation / n`.
    pub profile_perturbation: f64,
    pub d_rule: DRule,
    pub x_rule: XRule,
    pub n_max: usize,
    pub k_window: (f64, f64),
    pub k_points: usize,
    pub margin: f64,
    pub alpha: BoundaryAngle,
    pub thresholds: TransitionThresholds,
    pub tol: Tolerances,
}

impl SparseConfig {
    pub fn new(profile: Profile, d_rule: DRule, x_rule: XRule, n_max: usize) -> Self {
        SparseConfig {
            profile: Arc::new(profile),
            profile_perturbation: 0.0,
            d_rule,
            x_rule,
            n_max,
            k_window: (0.7, 1.3),
            k_points: 200,
            margin: 0.01,
            alpha: BoundaryAngle::DIRICHLET,
            thresholds: TransitionThresholds::default(),
            tol: Tolerances::default(),
        }
    }

    /// Profile of bump `n` (1-based).
    pub fn profile_n(&self, n: usize) -> Arc<Profile> {
        if self.profile_perturbation == 0.0 {
            self.profile.clone()
        } else {
            let c = 1.0 + self.profile_perturbation / n as f64;
            Arc::new(self.profile.scaled(c, c))
        }
    }
}

/// A sparse potential with its exact gap plan.
#[derive(Debug, Clone)]
pub struct SparseBuild {
    /// Bumps with centres below [`POTENTIAL_POSITION_LIMIT`].
    pub potential: PotentialSpec,
    pub bumps_in_potential: usize,
    pub positions: Vec<ExactLength>,
    pub d: Vec<f64>,
    /// `gaps[0]` runs from 0 to the first bump; `gaps[n]` separates bumps `n` and `n + 1`.
    pub gaps: Vec<ExactLength>,
}

/// Builds the potential and gap plan, validating separation and decay.
pub fn build_sparse(config: &SparseConfig) -> Result<SparseBuild> {
    let delta = config.profile.half_width();
    if config.n_max == 0 {
        return Err(Error::InvalidParams("n_max must be at least 1".into()));
    }
    let mut positions = Vec::with_capacity(config.n_max);
    let mut d = Vec::with_capacity(config.n_max);
    for n in 1..=config.n_max {
        positions.push(config.x_rule.position(n)?);
        let dn = config.d_rule.value(n)?;
        if !(dn >= 0.0) || !dn.is_finite() {
            return Err(Error::DecayViolated(format!("d_{n} = {dn} must be finite and nonnegative")));
        }
        d.push(dn);
    }
    let half = config.n_max / 2;
    if half >= 1 {
        let head = d[..half].iter().cloned().fold(0.0, f64::max);
        let tail = d[half..].iter().cloned().fold(0.0, f64::max);
        if tail > head || (tail == head && tail > 0.0) {
            return Err(Error::DecayViolated(format!(
                "max d over the second half ({tail}) is not below the first half ({head})"
            )));
        }
    }
    let mut gaps = Vec::with_capacity(config.n_max);
    gaps.push(positions[0].minus_f64(delta).filter(|g| !g.is_zero()).ok_or(Error::PositionsNotSparse { index: 0 })?);
    for n in 1..config.n_max {
        let g = positions[n]
            .checked_sub(&positions[n - 1])
            .and_then(|g| g.minus_f64(2.0 * delta))
            .filter(|g| !g.is_zero())
            .ok_or(Error::PositionsNotSparse { index: n })?;
        gaps.push(g);
    }
    let mut segs = Vec::new();
    let mut bumps = 0;
    for n in 0..config.n_max {
        if positions[n].whole >= POTENTIAL_POSITION_LIMIT {
            break;
        }
        bumps += 1;
        if d[n] == 0.0 {
            continue;
        }
        let c = positions[n].approx();
        let prof = config.profile_n(n + 1);
        let part = |p: Part| Form::ScaledProfile {
            profile: prof.clone(),
            part: p,
            center: c,
            amplitude: d[n],
        };
        segs.push(SegmentDescriptor::new(c - delta, c + delta, part(Part::S), part(Part::T)));
    }
    let potential = build_potential(segs, f64::INFINITY)?.with_description(format!(
        "sparse({}, n_max={})",
        config.profile.label(),
        config.n_max
    ));
    Ok(SparseBuild {
        potential,
        bumps_in_potential: bumps,
        positions,
        d,
        gaps,
    })
}

/// One bump `d·W` centred at `Δ` on `[0, 2Δ]`.
pub fn bump_potential(profile: &Arc<Profile>, d: f64) -> Result<PotentialSpec> {
    let delta = profile.half_width();
    if d == 0.0 {
        return build_potential(vec![], f64::INFINITY);
    }
    let part = |p: Part| Form::ScaledProfile {
        profile: profile.clone(),
        part: p,
        center: delta,
        amplitude: d,
    };
    build_potential(
        vec![SegmentDescriptor::new(0.0, 2.0 * delta, part(Part::S), part(Part::T))],
        f64::INFINITY,
    )
}

/// `Φ(k) = T̂(k)/(2k) − i Ŝ(k)`.
pub fn phi_transform(profile: &Profile, k: f64) -> C64 {
    profile_fourier(profile, k, Part::T) / (2.0 * k)
        - C64::new(0.0, 1.0) * profile_fourier(profile, k, Part::S)
}

/// Non-oscillatory drift `X̊ = (d²/2)|Φ(k)|²`.
pub fn drift_predictor(profile: &Profile, d: f64, k: f64) -> f64 {
    0.5 * d * d * phi_transform(profile, k).norm_sqr()
}

/// The three terms of the second-order increment of `log R` across a bump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementPrediction {
    pub x: f64,
    pub x_tilde: f64,
    pub x_ring: f64,
}

impl IncrementPrediction {
    pub fn total(&self) -> f64 {
        self.x + self.x_tilde + self.x_ring
    }
}

/// `(Xₙ, X̃ₙ, X̊ₙ)` for entry phase `theta_entry` at the bump centre.
pub fn increment_predictor(profile: &Profile, d: f64, k: f64, theta_entry: f64) -> IncrementPrediction {
    if d == 0.0 {
        return IncrementPrediction {
            x: 0.0,
            x_tilde: 0.0,
            x_ring: 0.0,
        };
    }
    let delta = profile.half_width();
    let s = profile.part(Part::S);
    let t = profile.part(Part::T);
    let q = |y: f64| (d * t.eval(y) - d * d * s.eval(y).powi(2)) / (2.0 * k);
    let q_cum = |y: f64| (d * t.cumulative(y) - d * d * s.cumulative_sq(y)) / (2.0 * k);
    let bps = profile.breakpoints();
    let f = |y: f64| {
        let a = 2.0 * (theta_entry + k * y);
        let (sa, ca) = a.sin_cos();
        let sg = d * s.eval(y);
        let qy = q(y);
        (qy * sa - sg * ca) - 2.0 * q_cum(y) * (sg * sa + qy * ca)
    };
    let x = integrate(f, -delta, delta, &bps, 1e-14, 1e-12).value;
    let phi = phi_transform(profile, k);
    let x_tilde = 0.5 * d * d * (C64::from_polar(1.0, 4.0 * theta_entry) * phi * phi).re;
    IncrementPrediction {
        x,
        x_tilde,
        x_ring: 0.5 * d * d * phi.norm_sqr(),
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

const ZERO_SCAN: usize = 4000;
const ZERO_TOL: f64 = 1e-9;

fn zeros_of<F: Fn(f64) -> f64>(f: F, k1: f64, k2: f64) -> Vec<f64> {
    let h = (k2 - k1) / ZERO_SCAN as f64;
    let vals: Vec<f64> = (0..=ZERO_SCAN).map(|i| f(k1 + h * i as f64)).collect();
    let scale = vals.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for i in 0..=ZERO_SCAN {
        let left = if i == 0 { f64::INFINITY } else { vals[i - 1] };
        let right = if i == ZERO_SCAN { f64::INFINITY } else { vals[i + 1] };
        if vals[i] <= left && vals[i] < right {
            let a = (k1 + h * (i as f64 - 1.0)).max(k1);
            let b = (k1 + h * (i as f64 + 1.0)).min(k2);
            let (x, fx) = golden_min(&f, a, b);
            if fx <= ZERO_TOL * scale {
                out.push(x);
            }
        }
    }
    out
}

/// Maximal subintervals of `[k1, k2]` at distance at least `margin` from
/// every zero of `|Ŝ|`, `|T̂|`, `|Φ|` and from the window edges.
pub fn admissible_intervals(profile: &Profile, k1: f64, k2: f64, margin: f64) -> Result<Vec<(f64, f64)>> {
    if !(0.0 < k1 && k1 < k2) || !(margin >= 0.0) {
        return Err(Error::InvalidParams("need 0 < k1 < k2 and margin >= 0".into()));
    }
    let mut zeros = vec![k1, k2];
    let has = |p: Part| !matches!(profile.shape(p), crate::potential::Shape::Zero);
    if has(Part::S) {
        zeros.extend(zeros_of(|k| profile_fourier(profile, k, Part::S).norm(), k1, k2));
    }
    if has(Part::T) {
        zeros.extend(zeros_of(|k| profile_fourier(profile, k, Part::T).norm(), k1, k2));
    }
    zeros.extend(zeros_of(|k| phi_transform(profile, k).norm(), k1, k2));
    zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::new();
    for w in zeros.windows(2) {
        let (a, b) = (w[0] + margin, w[1] - margin);
        if b > a {
            out.push((a, b));
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyResult);
    }
    Ok(out)
}

/// `n` points at midpoints of equal cells spread over the intervals.
pub fn k_grid(intervals: &[(f64, f64)], n: usize) -> Vec<f64> {
    let total: f64 = intervals.iter().map(|(a, b)| b - a).sum();
    let h = total / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut iv = 0;
    let mut offset = 0.0;
    for i in 0..n {
        let mut s = (i as f64 + 0.5) * h - offset;
        while iv + 1 < intervals.len() && s > intervals[iv].1 - intervals[iv].0 {
            offset += intervals[iv].1 - intervals[iv].0;
            s -= intervals[iv].1 - intervals[iv].0;
            iv += 1;
        }
        out.push(intervals[iv].0 + s);
    }
    out
}

/// Per-bump record of one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct KTrace {
    pub k: f64,
    /// `Yₙ = log R(xₙ + Δ)`.
    pub log_r: Vec<f64>,
    pub drift: Vec<f64>,
    pub predicted: Vec<IncrementPrediction>,
    /// Entry phase at the bump centre, reduced into `[0, 2π)`.
    pub theta_entry: Vec<f64>,
    /// Largest phase reduction error estimate over all gaps.
    pub reduction_error: f64,
}

/// Runs the bump/gap alternation for one `k`.
pub fn run_k(config: &SparseConfig, build: &SparseBuild, k: f64) -> Result<KTrace> {
    let delta = config.profile.half_width();
    let (s, c) = config.alpha.value().sin_cos();
    let init = to_prufer([c, -s], k, None)?;
    let mut st = PruferState::new(0.0, init.theta_f64(), 0.0, k);
    let n_max = config.n_max;
    let mut out = KTrace {
        k,
        log_r: Vec::with_capacity(n_max),
        drift: Vec::with_capacity(n_max),
        predicted: Vec::with_capacity(n_max),
        theta_entry: Vec::with_capacity(n_max),
        reduction_error: 0.0,
    };
    for n in 0..n_max {
        st = gap_advance(&st, &build.gaps[n]);
        let err = st.theta.reduction_error();
        out.reduction_error = out.reduction_error.max(err);
        if err > PHASE_TOL {
            return Err(Error::PhasePrecisionLoss { estimate: err });
        }
        let (r, base) = st.theta.rem_two_pi();
        let prof = config.profile_n(n + 1);
        let entry = (Dd::from_f64(r) + Dd::mul_exact(k, delta)).rem_two_pi().0;
        let local = PruferState::new(0.0, r, st.log_r, k);
        let bump = bump_potential(&prof, build.d[n])?;
        let after = prufer_advance(&bump, &local, 2.0 * delta, &config.tol)?;
        st.theta = base + after.theta;
        st.log_r = after.log_r;
        out.log_r.push(st.log_r);
        out.drift.push(drift_predictor(&prof, build.d[n], k));
        out.predicted.push(increment_predictor(&prof, build.d[n], k, entry));
        out.theta_entry.push(entry);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionClass {
    SingularSideGrowth,
    AcSideBounded,
    Inconclusive,
}

impl TransitionClass {
    pub fn name(self) -> &'static str {
        match self {
            TransitionClass::SingularSideGrowth => "singular-side growth",
            TransitionClass::AcSideBounded => "ac-side bounded",
            TransitionClass::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub x_n: ExactLength,
    pub d_n: f64,
    pub y_mean: f64,
    pub y_q10: f64,
    pub y_q90: f64,
    /// k-average of `Σ_{m ≤ n} X̊ₘ`.
    pub drift_cum: f64,
    /// `y_mean − drift_cum`.
    pub residual: f64,
    /// Largest `|Yₙ − Yₙ₋₁| / dₙ` over the k-grid.
    pub per_bump_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTrace {
    pub rows: Vec<TraceRow>,
    pub k_grid: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
    pub traces: Vec<KTrace>,
    pub classification: TransitionClass,
    pub thresholds: TransitionThresholds,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (pos - i as f64) * (sorted[j] - sorted[i])
}

/// Classifies k-averaged `Y` against cumulative drift.
pub fn classify_trace(y: &[f64], drift_cum: &[f64], th: &TransitionThresholds) -> TransitionClass {
    let n = y.len();
    if n == 0 {
        return TransitionClass::Inconclusive;
    }
    let last = y[n - 1];
    let mid = y[(n / 2).max(1) - 1];
    let dc = drift_cum[n - 1];
    if last > th.growth_factor * mid && dc > 0.0 {
        let r = last / dc;
        if r >= th.band.0 && r <= th.band.1 {
            return TransitionClass::SingularSideGrowth;
        }
    }
    let tail = &y[(n / 2).max(1) - 1..];
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi - lo <= th.ac_band {
        TransitionClass::AcSideBounded
    } else {
        TransitionClass::Inconclusive
    }
}

/// Runs all `k` in parallel and aggregates per bump.
pub fn transition_experiment(config: &SparseConfig) -> Result<TransitionTrace> {
    let build = build_sparse(config)?;
    let intervals = admissible_intervals(&config.profile, config.k_window.0, config.k_window.1, config.margin)?;
    if config.k_points == 0 {
        return Err(Error::InvalidParams("k_points must be positive".into()));
    }
    let ks = k_grid(&intervals, config.k_points);
    let traces = ks
        .par_iter()
        .map(|&k| run_k(config, &build, k))
        .collect::<Result<Vec<_>>>()?;
    let nk = traces.len() as f64;
    let mut rows = Vec::with_capacity(config.n_max);
    let mut cum = vec![0.0; traces.len()];
    for n in 0..config.n_max {
        let mut ys: Vec<f64> = traces.iter().map(|t| t.log_r[n]).collect();
        for (c, t) in cum.iter_mut().zip(&traces) {
            *c += t.drift[n];
        }
        let y_mean = ys.iter().sum::<f64>() / nk;
        let drift_cum = cum.iter().sum::<f64>() / nk;
        let per_bump_ratio = if build.d[n] > 0.0 {
            traces
                .iter()
                .map(|t| {
                    let prev = if n == 0 { 0.0 } else { t.log_r[n - 1] };
                    (t.log_r[n] - prev).abs() / build.d[n]
                })
                .fold(0.0, f64::max)
        } else {
            0.0
        };
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rows.push(TraceRow {
            n: n + 1,
            x_n: build.positions[n],
            d_n: build.d[n],
            y_mean,
            y_q10: quantile(&ys, 0.1),
            y_q90: quantile(&ys, 0.9),
            drift_cum,
            residual: y_mean - drift_cum,
            per_bump_ratio,
        });
    }
    let y: Vec<f64> = rows.iter().map(|r| r.y_mean).collect();
    let dc: Vec<f64> = rows.iter().map(|r| r.drift_cum).collect();
    Ok(TransitionTrace {
        classification: classify_trace(&y, &dc, &config.thresholds),
        rows,
        k_grid: ks,
        intervals,
        traces,
        thresholds: config.thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::delta_decomposition;
    use crate::prufer::prufer_flow;
    use std::f64::consts::{PI, TAU};

    fn delta_cfg(d: DRule, n_max: usize) -> SparseConfig {
        SparseConfig::new(delta_decomposition(1.0).unwrap(), d, XRule::Factorial { c: 10 }, n_max)
    }

    #[test]
    fn single_bump_support() {
        let cfg = delta_cfg(DRule::List { values: vec![1.0] }, 1);
        let b = build_sparse(&cfg).unwrap();
        let p = &b.potential;
        assert_eq!(p.sigma(8.9).unwrap(), 0.0);
        assert_eq!(p.tau(11.0).unwrap(), 0.0);
        assert!((p.sigma(10.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((p.tau(10.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(b.gaps[0], ExactLength::integer(9));
    }

    #[test]
    fn factorial_gaps_are_exact() {
        let cfg = delta_cfg(DRule::Power { exponent: 1.0, scale: 1.0 }, 20);
        let b = build_sparse(&cfg).unwrap();
        let f20: u128 = (1..=20u128).product();
        assert_eq!(b.positions[19].whole, 10 * f20);
        assert_eq!(b.gaps[19].whole, 10 * f20 - 10 * (f20 / 20) - 2);
        let s: f64 = b.d.iter().map(|d| d * d).sum();
        assert!(s < PI * PI / 6.0);
        for w in b.positions.windows(3) {
            let r1 = w[0].approx() / w[1].approx();
            let r2 = w[1].approx() / w[2].approx();
            assert!(r2 < r1);
        }
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = delta_cfg(DRule::Power { exponent: 1.0, scale: 1.0 }, 3);
        cfg.x_rule = XRule::List { values: vec![1.0, 10.0, 20.0] };
        assert!(matches!(build_sparse(&cfg), Err(Error::PositionsNotSparse { index: 0 })));
        cfg.x_rule = XRule::List { values: vec![5.0, 6.5, 20.0] };
        assert!(matches!(build_sparse(&cfg), Err(Error::PositionsNotSparse { index: 1 })));
        cfg.x_rule = XRule::Factorial { c: 10 };
        cfg.d_rule = DRule::List { values: vec![1.0, 1.0, 1.0] };
        assert!(matches!(build_sparse(&cfg), Err(Error::DecayViolated(_))));
    }

    #[test]
    fn drift_examples() {
        let p = delta_decomposition(1.0).unwrap();
        assert_eq!(drift_predictor(&p, 0.0, 1.0), 0.0);
        let th = (C64::from_polar(1.0, 2.0) - 1.0) / C64::new(0.0, 2.0);
        // ∫₀¹ e^{2iy}(1 − y) dy = i/2 + (1 − e^{2i})/4
        let sh = C64::new(0.0, 0.5) + (1.0 - C64::from_polar(1.0, 2.0)) / 4.0;
        let phi = th / 2.0 - C64::new(0.0, 1.0) * sh;
        assert!((drift_predictor(&p, 0.1, 1.0) - 0.005 * phi.norm_sqr()).abs() < 1e-15);
        assert!((phi.norm() - 0.5).abs() < 1e-15);
        let r = drift_predictor(&p, 0.2, 1.3) / drift_predictor(&p, 0.1, 1.3);
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn phase_average_of_oscillatory_terms() {
        let p = delta_decomposition(1.0).unwrap();
        let d = 0.05;
        let n = 256;
        let mean: f64 = (0..n)
            .map(|i| {
                let r = increment_predictor(&p, d, 1.0, TAU * i as f64 / n as f64);
                r.x + r.x_tilde
            })
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 1e-3 * d);
        let z = increment_predictor(&p, 0.0, 1.0, 0.3);
        assert_eq!(z.total(), 0.0);
    }

    #[test]
    fn one_bump_residual_is_cubic() {
        let p = Arc::new(delta_decomposition(1.0).unwrap());
        let tol = Tolerances {
            rtol: 1e-12,
            atol: 1e-14,
            ..Tolerances::default()
        };
        for &d in &[0.05, 0.025] {
            let bump = bump_potential(&p, d).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..64 {
                let th = TAU * i as f64 / 64.0;
                let got = prufer_flow(&bump, 1.0, th, 0.0, 2.0, &tol).unwrap().last().unwrap().log_r;
                let pred = increment_predictor(&p, d, 1.0, th + 1.0).total();
                worst = worst.max((got - pred).abs());
            }
            assert!(worst <= 5.0 * d * d * d, "d={d} worst={worst}");
        }
    }

    #[test]
    fn admissible_examples() {
        let p = delta_decomposition(1.0).unwrap();
        let iv = admissible_intervals(&p, 0.5, 2.0, 0.05).unwrap();
        assert!(!iv.is_empty());
        for &(a, b) in &iv {
            for i in 0..=100 {
                let k = a + (b - a) * i as f64 / 100.0;
                assert!(phi_transform(&p, k).norm() > 10.0 * ZERO_TOL);
            }
        }
        assert!(matches!(admissible_intervals(&p, 0.5, 2.0, 1.0), Err(Error::EmptyResult)));
        // T̂ vanishes at k = π for Δ = 1
        let w = admissible_intervals(&p, 2.5, 4.0, 0.05).unwrap();
        assert_eq!(w.len(), 2);
        assert!((w[0].1 - (PI - 0.05)).abs() < 1e-6);
    }

    #[test]
    fn k_grid_is_uniform_over_intervals() {
        let g = k_grid(&[(0.0, 1.0), (2.0, 3.0)], 4);
        assert_eq!(g, vec![0.25, 0.75, 2.25, 2.75]);
    }

    #[test]
    fn zero_couplings_give_flat_trace() {
        let mut cfg = delta_cfg(DRule::List { values: vec![0.0; 8] }, 8);
        cfg.k_points = 16;
        let t = transition_experiment(&cfg).unwrap();
        assert!(t.rows.iter().all(|r| r.y_mean == 0.0 && r.drift_cum == 0.0));
        assert_eq!(t.classification, TransitionClass::AcSideBounded);
    }
}
