//! Prüfer phase and radius for real energies `E = k²`, with `u = R sin θ`
//! and `u^{[1]} = kR cos θ`.

use crate::dd::{Dd, ExactLength};
use crate::error::{Error, Result};
use crate::ode::{dopri5, ErrorNorm, OdeStats};
use crate::potential::PotentialSpec;
use crate::propagate::{piece_coeffs, pieces, PieceKind, Tolerances};
use std::f64::consts::TAU;

/// Phase is unwrapped and stored as a double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruferState {
    pub x: f64,
    pub theta: Dd,
    pub log_r: f64,
    pub k: f64,
    pub dtheta_dk: Option<f64>,
    pub dlogr_dk: Option<f64>,
    pub d2theta_dk2: Option<f64>,
}

impl PruferState {
    pub fn new(x: f64, theta: f64, log_r: f64, k: f64) -> Self {
        PruferState {
            x,
            theta: Dd::from_f64(theta),
            log_r,
            k,
            dtheta_dk: None,
            dlogr_dk: None,
            d2theta_dk2: None,
        }
    }

    /// Same state with all k-derivatives set to zero.
    pub fn with_derivatives(mut self) -> Self {
        self.dtheta_dk = Some(0.0);
        self.dlogr_dk = Some(0.0);
        self.d2theta_dk2 = Some(0.0);
        self
    }

    pub fn at(mut self, x: f64) -> Self {
        self.x = x;
        self
    }

    pub fn has_derivatives(&self) -> bool {
        self.dtheta_dk.is_some()
    }

    pub fn theta_f64(&self) -> f64 {
        self.theta.to_f64()
    }

    /// Phase reduced into `[0, 2π)`.
    pub fn theta_mod_two_pi(&self) -> f64 {
        self.theta.rem_two_pi().0
    }

    /// `(u^{[1]}, u)`.
    pub fn reconstruct(&self) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        let r = self.log_r.exp();
        [self.k * r * c, r * s]
    }
}

/// Polar coordinates of a real vector `(u^{[1]}, u)`. The phase is placed on
/// the branch nearest `hint`, or in `[0, 2π)` without one.
pub fn to_prufer(v: [f64; 2], k: f64, hint: Option<f64>) -> Result<PruferState> {
    if !(k > 0.0) {
        return Err(Error::InvalidParams(format!("k must be positive, got {k}")));
    }
    let (uq, u) = (v[0], v[1]);
    let c = uq / k;
    let r = u.hypot(c);
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::ZeroVector);
    }
    let mut th = u.atan2(c);
    match hint {
        Some(h) => th += TAU * ((h - th) / TAU).round(),
        None => {
            if th < 0.0 {
                th += TAU;
            }
        }
    }
    Ok(PruferState::new(0.0, th, r.ln(), k))
}

#[inline]
fn flow(k: f64, sigma: f64, q: f64, th: f64) -> (f64, f64) {
    let (sn, cs) = th.sin_cos();
    let s2 = 2.0 * sn * cs;
    let c2 = cs * cs - sn * sn;
    (
        k - (q / k) * sn * sn + sigma * s2,
        (q / (2.0 * k)) * s2 - sigma * c2,
    )
}

#[inline]
fn flow_with_derivatives(k: f64, sigma: f64, q: f64, th: f64, y: &[f64; 5]) -> [f64; 5] {
    let (sn, cs) = th.sin_cos();
    let s2 = 2.0 * sn * cs;
    let c2 = cs * cs - sn * sn;
    let ssq = sn * sn;
    let (h, w) = (y[2], y[4]);
    let f = 1.0 + (q / (k * k)) * ssq;
    let g = 2.0 * sigma * c2 - (q / k) * s2;
    [
        k - (q / k) * ssq + sigma * s2,
        (q / (2.0 * k)) * s2 - sigma * c2,
        f + g * h,
        -(q / (2.0 * k * k)) * s2 + (q / k) * c2 * h + 2.0 * sigma * s2 * h,
        -2.0 * q * ssq / (k * k * k)
            + 2.0 * (q / (k * k)) * s2 * h
            + (-4.0 * sigma * s2 - (2.0 * q / k) * c2) * h * h
            + g * w,
    ]
}

fn advance_into(
    pot: &PotentialSpec,
    start: &PruferState,
    x_to: f64,
    tol: &Tolerances,
    mut record: Option<&mut Vec<PruferState>>,
) -> Result<PruferState> {
    if !(start.k > 0.0) {
        return Err(Error::InvalidParams(format!("k must be positive, got {}", start.k)));
    }
    if x_to < start.x {
        return Err(Error::InvalidParams("Prüfer flow runs forward only".into()));
    }
    let k = start.k;
    let mut st = *start;
    if x_to == st.x {
        return Ok(st);
    }
    let derivs = st.has_derivatives();
    let opts = tol.ode(ErrorNorm::Componentwise);
    let mut stats = OdeStats::default();
    let mut h_guess = None;
    for p in pieces(pot, st.x, x_to, tol.chunk, &[])? {
        let seg = &pot.segments()[p.seg];
        let constant = match p.kind {
            PieceKind::Constant { sigma, tau } => Some((sigma, tau - sigma * sigma)),
            PieceKind::Averaged { sigma, q } => Some((sigma, q)),
            PieceKind::Smooth => None,
        };
        if constant == Some((0.0, 0.0)) {
            st.theta = st.theta + Dd::mul_exact(k, p.len());
            if let Some(h) = st.dtheta_dk.as_mut() {
                *h += p.len();
            }
        } else {
            let th0 = st.theta.rem_two_pi().0;
            let coeffs = |x: f64| match constant {
                Some(c) => c,
                None => {
                    let (s, t) = piece_coeffs(seg, &p, x);
                    (s, t - s * s)
                }
            };
            if derivs {
                let y0 = [
                    0.0,
                    st.log_r,
                    st.dtheta_dk.unwrap_or(0.0),
                    st.dlogr_dk.unwrap_or(0.0),
                    st.d2theta_dk2.unwrap_or(0.0),
                ];
                let rhs = |x: f64, y: &[f64; 5]| {
                    let (s, q) = coeffs(x);
                    flow_with_derivatives(k, s, q, th0 + y[0], y)
                };
                let (y, h) = dopri5(rhs, p.a, p.b, y0, h_guess, &opts, &mut stats)?;
                h_guess = Some(h);
                st.theta = st.theta.add_f64(y[0]);
                st.log_r = y[1];
                st.dtheta_dk = Some(y[2]);
                st.dlogr_dk = Some(y[3]);
                st.d2theta_dk2 = Some(y[4]);
            } else {
                let rhs = |x: f64, y: &[f64; 2]| {
                    let (s, q) = coeffs(x);
                    let (a, b) = flow(k, s, q, th0 + y[0]);
                    [a, b]
                };
                let (y, h) = dopri5(rhs, p.a, p.b, [0.0, st.log_r], h_guess, &opts, &mut stats)?;
                h_guess = Some(h);
                st.theta = st.theta.add_f64(y[0]);
                st.log_r = y[1];
            }
        }
        st.x = p.b;
        if !st.log_r.is_finite() {
            return Err(Error::ToleranceNotMet {
                x: p.b,
                reason: "Prüfer radius is not finite".into(),
            });
        }
        if let Some(r) = record.as_deref_mut() {
            r.push(st);
        }
    }
    st.x = x_to;
    Ok(st)
}

/// Advances a state to `x_to`, carrying derivative fields when present.
pub fn prufer_advance(
    pot: &PotentialSpec,
    state: &PruferState,
    x_to: f64,
    tol: &Tolerances,
) -> Result<PruferState> {
    advance_into(pot, state, x_to, tol, None)
}

/// States at every sorted grid point at or after the start.
pub fn prufer_samples(
    pot: &PotentialSpec,
    state: &PruferState,
    grid: &[f64],
    tol: &Tolerances,
) -> Result<Vec<PruferState>> {
    let mut st = *state;
    grid.iter()
        .map(|&g| {
            st = advance_into(pot, &st, g, tol, None)?;
            Ok(st)
        })
        .collect()
}

/// Integrates the phase/radius flow from `(theta0, log R = 0)` at `x_from`,
/// returning the state at `x_from` and after every integration piece.
pub fn prufer_flow(
    pot: &PotentialSpec,
    k: f64,
    theta0: f64,
    x_from: f64,
    x_to: f64,
    tol: &Tolerances,
) -> Result<Vec<PruferState>> {
    let st = PruferState::new(x_from, theta0, 0.0, k);
    let mut out = vec![st];
    advance_into(pot, &st, x_to, tol, Some(&mut out))?;
    Ok(out)
}

/// As [`prufer_flow`], also integrating `∂θ/∂k`, `∂log R/∂k` and `∂²θ/∂k²`
/// from zero initial values.
pub fn prufer_flow_with_k_derivatives(
    pot: &PotentialSpec,
    k: f64,
    theta0: f64,
    x_from: f64,
    x_to: f64,
    tol: &Tolerances,
) -> Result<Vec<PruferState>> {
    let st = PruferState::new(x_from, theta0, 0.0, k).with_derivatives();
    let mut out = vec![st];
    advance_into(pot, &st, x_to, tol, Some(&mut out))?;
    Ok(out)
}

/// Free advance over an exact gap length: `θ += k·gap`.
pub fn gap_advance(state: &PruferState, gap: &ExactLength) -> PruferState {
    if gap.is_zero() {
        return *state;
    }
    let mut st = *state;
    st.theta = st.theta + gap.scaled(st.k);
    st.x += gap.approx();
    if let Some(h) = st.dtheta_dk.as_mut() {
        *h += gap.approx();
    }
    st
}
