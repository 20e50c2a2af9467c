//! Scalar function descriptors used for σ, τ and gauge functions.

use super::profile::{Part, PieceFn, Profile, Shape};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::quadrature::integrate;
use crate::special::sine_integral;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

/// Smallest cell width used when clustering toward a singular point.
pub const SINGULAR_CELL: f64 = 1e-12;

/// Piecewise-linear function of absolute position; repeated abscissae mark
/// jumps. Zero outside the node range.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub(crate) f: PieceFn,
}

impl Table {
    pub fn new(xs: &[f64], values: &[f64]) -> Result<Table> {
        let shape = Shape::PiecewiseLinear {
            nodes: xs.iter().zip(values).map(|(x, v)| [*x, *v]).collect(),
        };
        if xs.len() != values.len() {
            return Err(Error::InvalidParams("table lengths differ".into()));
        }
        let p = Profile::new(f64::MAX / 4.0, shape, Shape::Zero, "table")?;
        Ok(Table {
            f: p.part(Part::S).clone(),
        })
    }

    fn from_nodes(nodes: Vec<[f64; 2]>) -> Result<Table> {
        let xs: Vec<f64> = nodes.iter().map(|n| n[0]).collect();
        let vs: Vec<f64> = nodes.iter().map(|n| n[1]).collect();
        Table::new(&xs, &vs)
    }
}

/// `σ` of the growing oscillation `V(x) = x^α sin(x^β)`, i.e. `−∫ₓ^∞ V`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowingOscTail {
    pub alpha: f64,
    pub beta: f64,
    gamma: f64,
    x_switch: f64,
    tail_at_switch: f64,
}

const GROWING_SWITCH: f64 = 40.0;

impl GrowingOscTail {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite() && beta.is_finite() && beta > alpha + 1.0) {
            return Err(Error::InvalidParams(format!(
                "growing_osc needs alpha >= 0 and beta > alpha + 1 (alpha={alpha}, beta={beta})"
            )));
        }
        let gamma = (alpha + 1.0) / beta - 1.0;
        let x_switch = GROWING_SWITCH.powf(1.0 / beta);
        let tail_at_switch = -tail_integral(gamma, GROWING_SWITCH).im / beta;
        Ok(GrowingOscTail {
            alpha,
            beta,
            gamma,
            x_switch,
            tail_at_switch,
        })
    }

    pub fn potential(&self, x: f64) -> f64 {
        x.powf(self.alpha) * x.powf(self.beta).sin()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x >= self.x_switch {
            return -tail_integral(self.gamma, x.powf(self.beta)).im / self.beta;
        }
        let (a, b) = (self.alpha, self.beta);
        let r = integrate(
            |t: f64| t.powf(a) * t.powf(b).sin(),
            x,
            self.x_switch,
            &[],
            1e-15,
            1e-14,
        );
        self.tail_at_switch - r.value
    }
}

/// `∫_X^∞ s^γ e^{is} ds` by its integration-by-parts asymptotic series
/// (valid for large `X`; terms are summed until they stop decreasing).
fn tail_integral(gamma: f64, x: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let mut coef = i; // i^{n+1} γ(γ−1)…(γ−n+1)
    let mut pow = x.powf(gamma);
    let mut sum = C64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for n in 0..200 {
        let term = coef * pow;
        let mag = term.norm();
        if mag > last {
            break;
        }
        sum += term;
        if mag < 1e-18 * sum.norm() {
            break;
        }
        last = mag;
        coef = coef * i * (gamma - n as f64);
        pow /= x;
    }
    C64::from_polar(1.0, x) * sum
}

/// Closed-form presets.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// `amplitude · e^{−rate·x}`
    Exp { amplitude: f64, rate: f64 },
    /// `amplitude · sin(omega·x + phase)`
    Sinusoid {
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    /// `amplitude · |x − x0|^exponent`
    Power {
        x0: f64,
        amplitude: f64,
        exponent: f64,
    },
    /// `height·(1 − frac((x − start)/period))` for `x ≥ start`, zero before.
    Sawtooth {
        start: f64,
        period: f64,
        height: f64,
    },
    /// Antiderivative of `SquareWave`: triangle wave of height `1/(2n)` on `[n−1, n)`.
    TriangleWave,
    /// `(−1)^{⌊2n(x−n)⌋}` on `[n−1, n)`.
    SquareWave,
    /// σ for `x^α sin(x^β)`.
    GrowingOscSigma(GrowingOscTail),
    /// `x^α sin(x^β)`.
    GrowingOscPotential { alpha: f64, beta: f64 },
    /// σ for the asymptotic Wigner–von Neumann potential.
    WignerVonNeumannSigma,
    /// `−8 sin(2x)/x` with a polynomial cutoff below 1.
    WignerVonNeumannPotential,
}

fn smoothstep(x: f64) -> (f64, f64) {
    (x * x * (3.0 - 2.0 * x), 6.0 * x * (1.0 - x))
}

fn wvn_sigma_one() -> f64 {
    8.0 * (FRAC_PI_2 - sine_integral(2.0))
}

fn cell_of(x: f64) -> (f64, f64) {
    // cell n covers [n−1, n); returns (n, 2n(x − (n−1)))
    let n = x.floor() + 1.0;
    (n, 2.0 * n * (x - (n - 1.0)))
}

impl ClosedForm {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ClosedForm::Exp { amplitude, rate } => amplitude * (-rate * x).exp(),
            ClosedForm::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude * (omega * x + phase).sin(),
            ClosedForm::Power {
                x0,
                amplitude,
                exponent,
            } => amplitude * (x - x0).abs().powf(*exponent),
            ClosedForm::Sawtooth {
                start,
                period,
                height,
            } => {
                if x < *start {
                    0.0
                } else {
                    let u = (x - start) / period;
                    height * (1.0 - (u - u.floor()))
                }
            }
            ClosedForm::TriangleWave => {
                if x < 0.0 {
                    return 0.0;
                }
                let (n, m) = cell_of(x);
                let j = m.floor();
                let f = m - j;
                let v = if (j as i64) % 2 == 0 { f } else { 1.0 - f };
                v / (2.0 * n)
            }
            ClosedForm::SquareWave => {
                if x < 0.0 {
                    return 0.0;
                }
                let (_, m) = cell_of(x);
                if (m.floor() as i64) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            ClosedForm::GrowingOscSigma(g) => g.eval(x),
            ClosedForm::GrowingOscPotential { alpha, beta } => {
                x.powf(*alpha) * x.powf(*beta).sin()
            }
            ClosedForm::WignerVonNeumannSigma => {
                if x >= 1.0 {
                    8.0 * (FRAC_PI_2 - sine_integral(2.0 * x))
                } else {
                    let (s, _) = smoothstep(x.max(0.0));
                    s * (wvn_sigma_one() - 8.0 * 2f64.sin() * (x - 1.0))
                }
            }
            ClosedForm::WignerVonNeumannPotential => {
                if x >= 1.0 {
                    -8.0 * (2.0 * x).sin() / x
                } else {
                    let x = x.max(0.0);
                    let (s, ds) = smoothstep(x);
                    let v1 = -8.0 * 2f64.sin();
                    ds * (wvn_sigma_one() + v1 * (x - 1.0)) + s * v1
                }
            }
        }
    }

    fn breakpoints(&self, a: f64, b: f64, out: &mut Vec<f64>) {
        match self {
            ClosedForm::Power { x0, .. } => push_in(out, *x0, a, b),
            ClosedForm::Sawtooth { start, period, .. } => {
                let first = ((a - start) / period).floor().max(0.0);
                let mut n = first;
                loop {
                    let p = start + n * period;
                    if p >= b {
                        break;
                    }
                    push_in(out, p, a, b);
                    n += 1.0;
                }
            }
            ClosedForm::TriangleWave | ClosedForm::SquareWave => {
                let mut cell = a.max(0.0).floor();
                while cell < b {
                    let n = cell + 1.0;
                    let m = 2.0 * n;
                    for j in 0..(m as usize) {
                        push_in(out, cell + j as f64 / m, a, b);
                    }
                    cell += 1.0;
                }
            }
            ClosedForm::WignerVonNeumannSigma | ClosedForm::WignerVonNeumannPotential => {
                push_in(out, 1.0, a, b)
            }
            _ => {}
        }
    }

    fn derivative(&self) -> Option<ClosedForm> {
        match self {
            ClosedForm::Exp { amplitude, rate } => Some(ClosedForm::Exp {
                amplitude: -amplitude * rate,
                rate: *rate,
            }),
            ClosedForm::Sinusoid {
                amplitude,
                omega,
                phase,
            } => Some(ClosedForm::Sinusoid {
                amplitude: amplitude * omega,
                omega: *omega,
                phase: phase + FRAC_PI_2,
            }),
            ClosedForm::TriangleWave => Some(ClosedForm::SquareWave),
            ClosedForm::GrowingOscSigma(g) => Some(ClosedForm::GrowingOscPotential {
                alpha: g.alpha,
                beta: g.beta,
            }),
            ClosedForm::WignerVonNeumannSigma => Some(ClosedForm::WignerVonNeumannPotential),
            _ => None,
        }
    }
}

fn push_in(out: &mut Vec<f64>, p: f64, a: f64, b: f64) {
    if p > a && p < b {
        out.push(p);
    }
}

/// Tagged description of a real function on the half-line.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Constant(f64),
    /// `scale · log|x − x0|`
    LogSingularity { x0: f64, scale: f64 },
    /// `amplitude · part(x − center)` of a profile.
    ScaledProfile {
        profile: Arc<Profile>,
        part: Part,
        center: f64,
        amplitude: f64,
    },
    ClosedForm(ClosedForm),
    SampledTable(Table),
    Sum(Vec<Form>),
    Scaled(f64, Box<Form>),
}

impl Form {
    pub fn zero() -> Form {
        Form::Constant(0.0)
    }

    pub fn log_singularity(x0: f64) -> Form {
        Form::LogSingularity { x0, scale: 1.0 }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Form::Constant(c) if *c == 0.0)
    }

    /// Sum that drops zero terms.
    pub fn plus(self, other: Form) -> Form {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        if let (Form::Constant(a), Form::Constant(b)) = (&self, &other) {
            return Form::Constant(a + b);
        }
        let mut terms = match self {
            Form::Sum(v) => v,
            f => vec![f],
        };
        match other {
            Form::Sum(v) => terms.extend(v),
            f => terms.push(f),
        }
        Form::Sum(terms)
    }

    pub fn times(self, c: f64) -> Form {
        match self {
            Form::Constant(v) => Form::Constant(c * v),
            _ if c == 1.0 => self,
            _ if c == 0.0 => Form::zero(),
            f => Form::Scaled(c, Box::new(f)),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        match self {
            Form::Constant(c) if !c.is_finite() => bad("constant must be finite".into()),
            Form::LogSingularity { x0, scale } if !x0.is_finite() || !scale.is_finite() => {
                bad("log singularity parameters must be finite".into())
            }
            Form::ScaledProfile {
                center, amplitude, ..
            } if !center.is_finite() || !amplitude.is_finite() => {
                bad("profile placement must be finite".into())
            }
            Form::ClosedForm(ClosedForm::Sawtooth { period, .. }) if !(*period > 0.0) => {
                bad("sawtooth period must be positive".into())
            }
            Form::ClosedForm(ClosedForm::Exp { amplitude, rate })
                if !amplitude.is_finite() || !rate.is_finite() =>
            {
                bad("exp parameters must be finite".into())
            }
            Form::Sum(v) => v.iter().try_for_each(|f| f.validate()),
            Form::Scaled(c, f) => {
                if !c.is_finite() {
                    return bad("scale must be finite".into());
                }
                f.validate()
            }
            _ => Ok(()),
        }
    }

    /// Right-continuous value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Form::Constant(c) => *c,
            Form::LogSingularity { x0, scale } => scale * (x - x0).abs().ln(),
            Form::ScaledProfile {
                profile,
                part,
                center,
                amplitude,
            } => amplitude * profile.eval(*part, x - center),
            Form::ClosedForm(c) => c.eval(x),
            Form::SampledTable(t) => t.f.eval(x),
            Form::Sum(v) => v.iter().map(|f| f.eval(x)).sum(),
            Form::Scaled(c, f) => c * f.eval(x),
        }
    }

    /// Points in `(a, b)` where the form has a kink, jump or singularity, plus
    /// geometric clustering points toward singularities.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        assert!(b.is_finite(), "breakpoint scan needs a finite upper end");
        let mut out = Vec::new();
        self.collect_breakpoints(a, b, &mut out);
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, a: f64, b: f64, out: &mut Vec<f64>) {
        match self {
            Form::Constant(_) => {}
            Form::LogSingularity { x0, .. } => {
                push_in(out, *x0, a, b);
                let mut w = 1.0;
                while w >= SINGULAR_CELL {
                    push_in(out, x0 - w, a, b);
                    push_in(out, x0 + w, a, b);
                    w *= 0.5;
                }
                // innermost cells end exactly at the minimal width
                push_in(out, x0 - SINGULAR_CELL, a, b);
                push_in(out, x0 + SINGULAR_CELL, a, b);
            }
            Form::ScaledProfile {
                profile, center, ..
            } => {
                for p in profile.breakpoints() {
                    push_in(out, center + p, a, b);
                }
            }
            Form::ClosedForm(c) => c.breakpoints(a, b, out),
            Form::SampledTable(t) => {
                for p in t.f.breakpoints() {
                    push_in(out, p, a, b);
                }
            }
            Form::Sum(v) => v.iter().for_each(|f| f.collect_breakpoints(a, b, out)),
            Form::Scaled(_, f) => f.collect_breakpoints(a, b, out),
        }
    }

    /// Points where the form is unbounded.
    pub fn singular_points(&self) -> Vec<f64> {
        match self {
            Form::LogSingularity { x0, .. } => vec![*x0],
            Form::ClosedForm(ClosedForm::Power { x0, exponent, .. }) if *exponent < 0.0 => {
                vec![*x0]
            }
            Form::Sum(v) => v.iter().flat_map(|f| f.singular_points()).collect(),
            Form::Scaled(_, f) => f.singular_points(),
            _ => vec![],
        }
    }

    /// The constant value on `(a, b)`, when the form is constant there.
    pub fn constant_on(&self, a: f64, b: f64) -> Option<f64> {
        match self {
            Form::Constant(c) => Some(*c),
            Form::ScaledProfile {
                profile,
                part,
                center,
                amplitude,
            } => profile
                .part(*part)
                .constant_on(a - center, b - center)
                .map(|v| v * amplitude),
            Form::SampledTable(t) => t.f.constant_on(a, b),
            Form::ClosedForm(ClosedForm::Sawtooth { start, .. }) if b <= *start => Some(0.0),
            Form::ClosedForm(ClosedForm::SquareWave) => {
                if b.is_finite() && self.breakpoints(a, b).is_empty() {
                    Some(self.eval(0.5 * (a + b)))
                } else {
                    None
                }
            }
            Form::ClosedForm(ClosedForm::Exp { amplitude, .. }) if *amplitude == 0.0 => Some(0.0),
            Form::Sum(v) => v.iter().map(|f| f.constant_on(a, b)).sum(),
            Form::Scaled(c, f) => f.constant_on(a, b).map(|v| c * v),
            _ => None,
        }
    }

    /// Derivative as a form, when the function is locally absolutely continuous.
    pub fn derivative(&self) -> Option<Form> {
        match self {
            Form::Constant(_) => Some(Form::zero()),
            Form::LogSingularity { .. } => None,
            Form::ScaledProfile {
                profile,
                part,
                center,
                amplitude,
            } => {
                let f = profile.part(*part);
                if !f.is_continuous() {
                    return None;
                }
                let d = Profile::new(
                    profile.half_width(),
                    Shape::PiecewiseLinear {
                        nodes: f.derivative_nodes(),
                    },
                    Shape::Zero,
                    format!("d/dy {}", profile.label()),
                )
                .ok()?;
                Some(Form::ScaledProfile {
                    profile: Arc::new(d),
                    part: Part::S,
                    center: *center,
                    amplitude: *amplitude,
                })
            }
            Form::ClosedForm(c) => c.derivative().map(Form::ClosedForm),
            Form::SampledTable(t) => {
                if !t.f.is_continuous() {
                    return None;
                }
                Table::from_nodes(t.f.derivative_nodes())
                    .ok()
                    .map(Form::SampledTable)
            }
            Form::Sum(v) => {
                let mut acc = Form::zero();
                for f in v {
                    acc = acc.plus(f.derivative()?);
                }
                Some(acc)
            }
            Form::Scaled(c, f) => f.derivative().map(|d| d.times(*c)),
        }
    }

    /// Whether the form has a jump inside `(a, b)` (sampled at breakpoints).
    pub fn jumps(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        self.breakpoints(a, b)
            .into_iter()
            .filter(|p| !self.singular_points().contains(p))
            .filter_map(|p| {
                let j = self.eval(p) - self.eval(p.next_down());
                let scale = self.eval(p).abs().max(1.0);
                (j.abs() > 1e-9 * scale).then_some((p, j))
            })
            .collect()
    }

    /// ∫_a^b f².
    pub fn l2_sq(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Form::Constant(c) => c * c * (b - a),
            Form::LogSingularity { x0, scale } => scale * scale * log_sq_integral(*x0, a, b),
            Form::ClosedForm(ClosedForm::Power {
                x0,
                amplitude,
                exponent,
            }) => amplitude * amplitude * abs_power_integral(*x0, 2.0 * exponent, a, b),
            Form::Scaled(c, f) => c * c * f.l2_sq(a, b),
            _ => self.quadrature(a, b, |v| v * v),
        }
    }

    /// ∫_a^b |f|.
    pub fn l1(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Form::Constant(c) => c.abs() * (b - a),
            Form::LogSingularity { x0, scale } => scale.abs() * log_abs_integral(*x0, a, b),
            Form::ClosedForm(ClosedForm::Power {
                x0,
                amplitude,
                exponent,
            }) => amplitude.abs() * abs_power_integral(*x0, *exponent, a, b),
            Form::Scaled(c, f) => c.abs() * f.l1(a, b),
            _ => self.quadrature(a, b, f64::abs),
        }
    }

    /// ∫_a^b f.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Form::Constant(c) => c * (b - a),
            Form::Scaled(c, f) => c * f.integral(a, b),
            Form::Sum(v) => v.iter().map(|f| f.integral(a, b)).sum(),
            _ => self.quadrature(a, b, |v| v),
        }
    }

    fn quadrature(&self, a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
        let bp = self.breakpoints(a, b);
        let r = integrate(|x| g(self.eval(x)), a, b, &bp, 1e-13, 1e-11);
        if !r.value.is_finite() || r.error > 1e-6 * r.value.abs().max(1.0) {
            f64::INFINITY
        } else {
            r.value
        }
    }
}

/// ∫_a^b log²|x − x0| dx.
fn log_sq_integral(x0: f64, a: f64, b: f64) -> f64 {
    // F(u) = u(ln²u − 2 ln u + 2) on u > 0
    let f = |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            let l = u.ln();
            u * (l * l - 2.0 * l + 2.0)
        }
    };
    split_symmetric(x0, a, b, f)
}

/// ∫_a^b |log|x − x0|| dx.
fn log_abs_integral(x0: f64, a: f64, b: f64) -> f64 {
    // G(u) = ∫_0^u |ln t| dt
    let g = |u: f64| {
        if u <= 0.0 {
            0.0
        } else if u <= 1.0 {
            u - u * u.ln()
        } else {
            2.0 + u * u.ln() - u
        }
    };
    split_symmetric(x0, a, b, g)
}

/// ∫_a^b |x − x0|^p dx (infinite when divergent).
fn abs_power_integral(x0: f64, p: f64, a: f64, b: f64) -> f64 {
    let contains = a <= x0 && x0 <= b;
    if contains && p <= -1.0 {
        return f64::INFINITY;
    }
    let f = |u: f64| {
        if u <= 0.0 {
            0.0
        } else if (p + 1.0).abs() < 1e-300 {
            u.ln()
        } else {
            u.powf(p + 1.0) / (p + 1.0)
        }
    };
    if contains {
        split_symmetric(x0, a, b, f)
    } else {
        let (lo, hi) = ((a - x0).abs(), (b - x0).abs());
        (f(hi) - f(lo)).abs()
    }
}

/// Integrates an even function of `u = |x − x0|` given its antiderivative
/// `F` on `u ≥ 0` with `F(0) = 0`.
fn split_symmetric(x0: f64, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    if b <= x0 {
        f(x0 - a) - f(x0 - b)
    } else if a >= x0 {
        f(b - x0) - f(a - x0)
    } else {
        f(x0 - a) + f(b - x0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_integrals_match_quadrature() {
        let f = Form::log_singularity(3.0);
        let q = integrate(|x: f64| (x - 3.0).abs().ln().powi(2), 2.4, 3.7, &[3.0], 1e-14, 1e-13);
        assert!((f.l2_sq(2.4, 3.7) - q.value).abs() < 1e-10);
        let q1 = integrate(|x: f64| (x - 3.0).abs().ln().abs(), 2.4, 4.7, &[2.0, 3.0, 4.0], 1e-14, 1e-13);
        assert!((f.l1(2.4, 4.7) - q1.value).abs() < 1e-10);
    }

    #[test]
    fn triangle_wave_is_antiderivative_of_square_wave() {
        let tri = Form::ClosedForm(ClosedForm::TriangleWave);
        let sq = Form::ClosedForm(ClosedForm::SquareWave);
        for &x in &[0.1, 0.77, 1.3, 2.9, 4.01] {
            let q = sq.integral(0.0, x);
            assert!((q - tri.eval(x)).abs() < 1e-12, "x={x}");
        }
        assert!(tri.eval(3.0).abs() < 1e-15);
    }

    #[test]
    fn growing_tail_derivative_is_potential() {
        let g = GrowingOscTail::new(0.5, 3.0).unwrap();
        for &x in &[0.7, 2.0, 3.3, 3.5, 5.0] {
            let h = 1e-5;
            let fd = (g.eval(x + h) - g.eval(x - h)) / (2.0 * h);
            let v = g.potential(x);
            assert!((fd - v).abs() < 1e-5 * (1.0 + v.abs() * x * x), "x={x} fd={fd} v={v}");
        }
        // continuity across the switch point
        let xs = g.x_switch;
        assert!((g.eval(xs.next_down()) - g.eval(xs)).abs() < 1e-12);
    }

    #[test]
    fn growing_tail_rejects_bad_exponents() {
        assert!(GrowingOscTail::new(1.0, 2.0).is_err());
        assert!(GrowingOscTail::new(-0.1, 3.0).is_err());
    }

    #[test]
    fn wvn_sigma_derivative() {
        let s = Form::ClosedForm(ClosedForm::WignerVonNeumannSigma);
        let v = s.derivative().unwrap();
        for &x in &[0.3, 0.99, 1.0001, 2.5, 40.0] {
            let h = 1e-6;
            let fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
            assert!((fd - v.eval(x)).abs() < 1e-6, "x={x}");
        }
        assert!((s.eval(1.0) - s.eval(1.0f64.next_down())).abs() < 1e-12);
    }

    #[test]
    fn sawtooth_jumps() {
        let s = Form::ClosedForm(ClosedForm::Sawtooth {
            start: 0.5,
            period: 1.0,
            height: 2.0,
        });
        let j = s.jumps(0.0, 3.0);
        assert_eq!(j.len(), 3);
        for (_, h) in j {
            assert!((h - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn profile_derivative() {
        let p = Profile::new(
            1.0,
            Shape::Triangle {
                lo: -1.0,
                peak: 0.0,
                hi: 1.0,
                height: 2.0,
            },
            Shape::Zero,
            "hat",
        )
        .unwrap();
        let f = Form::ScaledProfile {
            profile: Arc::new(p),
            part: Part::S,
            center: 5.0,
            amplitude: 0.5,
        };
        let d = f.derivative().unwrap();
        assert!((d.eval(4.5) - 1.0).abs() < 1e-15);
        assert!((d.eval(5.5) + 1.0).abs() < 1e-15);
        assert_eq!(d.eval(7.0), 0.0);
    }

    #[test]
    fn power_integrability() {
        let p = Form::ClosedForm(ClosedForm::Power {
            x0: 1.0,
            amplitude: 1.0,
            exponent: -0.5,
        });
        assert!(p.l1(0.0, 2.0).is_finite());
        assert!(p.l2_sq(0.0, 2.0).is_infinite());
    }
}
