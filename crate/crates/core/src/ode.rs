//! Dormand–Prince 5(4) integrator on fixed-size real states.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// How the local error is weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorNorm {
    /// Each component against its own magnitude.
    Componentwise,
    /// Every component against the largest magnitude in the state.
    Normwise,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub norm: ErrorNorm,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            norm: ErrorNorm::Componentwise,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let ch = c * h;
        for i in 0..N {
            out[i] += ch * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`, returning the final
/// state and the last accepted step size (useful as the next initial guess).
pub fn dopri5<const N: usize, F>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    h_init: Option<f64>,
    opts: &OdeOptions,
    stats: &mut OdeStats,
) -> Result<([f64; N], f64)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok((y0, h_init.unwrap_or(0.0)));
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let mut h = match h_init {
        Some(h) if h > 0.0 => h.min(span),
        _ => initial_step(&y, &k1, span, opts),
    };
    let h_min = 1e-15 * t0.abs().max(t1.abs()).max(1.0);
    let mut last_h = h;
    let mut steps = 0usize;
    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::ToleranceNotMet {
                x: t,
                reason: "step budget exhausted".into(),
            });
        }
        steps += 1;
        let last = t + h >= t1 || (t1 - (t + h)) < 1e-12 * h;
        if last {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = f(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(
            t + C4 * h,
            &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
        );
        let k5 = f(
            t + C5 * h,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = f(
            t + h,
            &axpy(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            ),
        );
        let y_new = axpy(
            &y,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            h,
        );
        let t_new = if last { t1 } else { t + h };
        let k7 = f(t_new, &y_new);
        stats.evaluations += 6;

        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&err, &y, &y_new, opts);
        if !en.is_finite() {
            return Err(Error::ToleranceNotMet {
                x: t,
                reason: "non-finite state".into(),
            });
        }
        if en <= 1.0 {
            stats.accepted += 1;
            t = t_new;
            y = y_new;
            k1 = k7;
            last_h = h;
            let fac = if en == 0.0 {
                5.0
            } else {
                (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            stats.rejected += 1;
            h *= (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
            if h < h_min {
                return Err(Error::ToleranceNotMet {
                    x: t,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }
        }
    }
    Ok((y, last_h))
}

fn error_norm<const N: usize>(err: &[f64; N], y: &[f64; N], yn: &[f64; N], o: &OdeOptions) -> f64 {
    match o.norm {
        ErrorNorm::Componentwise => {
            let mut m: f64 = 0.0;
            for i in 0..N {
                let sc = o.atol + o.rtol * y[i].abs().max(yn[i].abs());
                m = m.max(err[i].abs() / sc);
            }
            m
        }
        ErrorNorm::Normwise => {
            let mut big: f64 = 0.0;
            let mut e: f64 = 0.0;
            for i in 0..N {
                big = big.max(y[i].abs()).max(yn[i].abs());
                e = e.max(err[i].abs());
            }
            e / (o.atol + o.rtol * big)
        }
    }
}

fn initial_step<const N: usize>(y: &[f64; N], f0: &[f64; N], span: f64, o: &OdeOptions) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y[i].abs();
        d0 = d0.max(y[i].abs() / sc);
        d1 = d1.max(f0[i].abs() / sc);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(span).max(1e-12 * span)
}
