//! Compactly supported bump profiles `(S, T)` with exact transforms.

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::quadrature::{GL8_NODES, GL8_WEIGHTS};
use serde::{Deserialize, Serialize};

/// Shape of one profile component, in local coordinates `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Zero,
    /// `height` on `[lo, hi)`.
    Box { lo: f64, hi: f64, height: f64 },
    /// Rises linearly from 0 at `lo` to `height` at `peak`, falls to 0 at `hi`.
    /// `peak == lo` or `peak == hi` gives a one-sided (jumping) triangle.
    Triangle {
        lo: f64,
        peak: f64,
        hi: f64,
        height: f64,
    },
    /// Linear interpolation through `(y, value)` nodes; repeated `y` encodes a
    /// jump. Zero outside the node range.
    PiecewiseLinear { nodes: Vec<[f64; 2]> },
    /// Like `PiecewiseLinear`, but Fourier transforms use composite quadrature.
    SampledTable { ys: Vec<f64>, values: Vec<f64> },
}

/// Which component of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    S,
    T,
}

/// Linear function on `[a, b)` running from `va` to `vb`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Lin {
    pub a: f64,
    pub b: f64,
    pub va: f64,
    pub vb: f64,
}

impl Lin {
    fn len(&self) -> f64 {
        self.b - self.a
    }

    fn slope(&self) -> f64 {
        (self.vb - self.va) / self.len()
    }

    fn at(&self, y: f64) -> f64 {
        self.va + self.slope() * (y - self.a)
    }

    fn integral_to(&self, y: f64) -> f64 {
        let t = (y - self.a).clamp(0.0, self.len());
        self.va * t + 0.5 * self.slope() * t * t
    }

    fn sq_integral_to(&self, y: f64) -> f64 {
        // ∫_a^y (va + s t)^2 dt
        let t = (y - self.a).clamp(0.0, self.len());
        let s = self.slope();
        self.va * self.va * t + self.va * s * t * t + s * s * t * t * t / 3.0
    }

    /// ∫_a^b e^{iωy} f(y) dy, closed form with a series for small ωL.
    fn fourier(&self, omega: f64) -> C64 {
        let l = self.len();
        let s = self.slope();
        let wl = omega * l;
        let ea = C64::from_polar(1.0, omega * self.a);
        if wl.abs() < 0.25 {
            // e^{iωa} Σ (iω)^n/n! (va L^{n+1}/(n+1) + s L^{n+2}/(n+2))
            let iw = C64::new(0.0, omega);
            let mut pow = C64::new(1.0, 0.0);
            let mut sum = C64::new(0.0, 0.0);
            let mut ln = l;
            for n in 0..30 {
                let nf = n as f64;
                let term = pow * (self.va * ln / (nf + 1.0) + s * ln * l / (nf + 2.0));
                sum += term;
                if term.norm() < 1e-18 * sum.norm().max(1e-300) {
                    break;
                }
                pow = pow * iw / (nf + 1.0);
                ln *= l;
            }
            return ea * sum;
        }
        let i = C64::new(0.0, 1.0);
        let eb = C64::from_polar(1.0, omega * self.b);
        let base = (eb - ea) / (i * omega);
        let lin = l * eb / (i * omega) + (eb - ea) / (omega * omega);
        base * self.va + lin * s
    }
}

/// A profile component lowered to sorted linear pieces.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PieceFn {
    pub pieces: Vec<Lin>,
    pub sampled: bool,
}

impl PieceFn {
    fn lower(shape: &Shape) -> Result<PieceFn> {
        let bad = |m: &str| Error::InvalidParams(m.to_string());
        let mut sampled = false;
        let nodes: Vec<[f64; 2]> = match shape {
            Shape::Zero => vec![],
            Shape::Box { lo, hi, height } => {
                if !(lo < hi) {
                    return Err(bad("box requires lo < hi"));
                }
                vec![[*lo, *height], [*hi, *height]]
            }
            Shape::Triangle {
                lo,
                peak,
                hi,
                height,
            } => {
                if !(lo <= peak && peak <= hi && lo < hi) {
                    return Err(bad("triangle requires lo <= peak <= hi, lo < hi"));
                }
                vec![[*lo, 0.0], [*peak, *height], [*hi, 0.0]]
            }
            Shape::PiecewiseLinear { nodes } => nodes.clone(),
            Shape::SampledTable { ys, values } => {
                if ys.len() != values.len() {
                    return Err(bad("sampled table lengths differ"));
                }
                sampled = true;
                ys.iter().zip(values).map(|(y, v)| [*y, *v]).collect()
            }
        };
        if nodes.iter().any(|n| !n[0].is_finite() || !n[1].is_finite()) {
            return Err(bad("profile nodes must be finite"));
        }
        if nodes.windows(2).any(|w| w[1][0] < w[0][0]) {
            return Err(bad("profile nodes must be sorted"));
        }
        let pieces = nodes
            .windows(2)
            .filter(|w| w[1][0] > w[0][0])
            .map(|w| Lin {
                a: w[0][0],
                b: w[1][0],
                va: w[0][1],
                vb: w[1][1],
            })
            .collect();
        Ok(PieceFn { pieces, sampled })
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.a, self.pieces.last()?.b))
    }

    pub fn eval(&self, y: f64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.b <= y);
        match self.pieces.get(idx) {
            Some(p) if p.a <= y => p.at(y),
            _ => 0.0,
        }
    }

    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(|p| p.integral_to(p.b)).sum()
    }

    /// ∫_{-∞}^y f.
    pub fn cumulative(&self, y: f64) -> f64 {
        self.pieces
            .iter()
            .take_while(|p| p.a < y)
            .map(|p| p.integral_to(y))
            .sum()
    }

    /// ∫_{-∞}^y f².
    pub fn cumulative_sq(&self, y: f64) -> f64 {
        self.pieces
            .iter()
            .take_while(|p| p.a < y)
            .map(|p| p.sq_integral_to(y))
            .sum()
    }

    pub fn l2_sq(&self) -> f64 {
        self.pieces.iter().map(|p| p.sq_integral_to(p.b)).sum()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pieces.iter().flat_map(|p| [p.a, p.b]).collect();
        v.dedup();
        v
    }

    /// Constant value on `(lo, hi)` if the function is constant there.
    pub fn constant_on(&self, lo: f64, hi: f64) -> Option<f64> {
        let (s0, s1) = match self.support() {
            None => return Some(0.0),
            Some(s) => s,
        };
        if hi <= s0 || lo >= s1 {
            return Some(0.0);
        }
        let idx = self.pieces.partition_point(|p| p.b <= lo);
        let p = self.pieces.get(idx)?;
        if p.a <= lo && hi <= p.b && p.va == p.vb {
            Some(p.va)
        } else {
            None
        }
    }

    pub fn is_continuous(&self) -> bool {
        let first_ok = self.pieces.first().is_none_or(|p| p.va == 0.0);
        let last_ok = self.pieces.last().is_none_or(|p| p.vb == 0.0);
        let inner_ok = self
            .pieces
            .windows(2)
            .all(|w| w[0].b == w[1].a && w[0].vb == w[1].va);
        first_ok && last_ok && inner_ok
    }

    /// Piecewise constant derivative as nodes with jumps.
    pub fn derivative_nodes(&self) -> Vec<[f64; 2]> {
        let mut nodes = Vec::with_capacity(2 * self.pieces.len());
        for p in &self.pieces {
            let s = p.slope();
            nodes.push([p.a, s]);
            nodes.push([p.b, s]);
        }
        nodes
    }

    pub fn fourier(&self, k: f64) -> C64 {
        let omega = 2.0 * k;
        if !self.sampled {
            return self.pieces.iter().map(|p| p.fourier(omega)).sum();
        }
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.pieces {
            let panels = ((omega * p.len()).abs() / 2.0).ceil().max(1.0) as usize;
            let h = p.len() / panels as f64;
            for j in 0..panels {
                let lo = p.a + j as f64 * h;
                let c = lo + 0.5 * h;
                for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
                    let y = c + 0.5 * h * x;
                    acc += C64::from_polar(p.at(y) * w * 0.5 * h, omega * y);
                }
            }
        }
        acc
    }

    /// ∫ f(y) φ(y) dy for a polynomial φ with coefficients `c` (ascending),
    /// exact for degree ≤ 14.
    pub fn pair_poly(&self, c: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                let mid = 0.5 * (p.a + p.b);
                let h = 0.5 * p.len();
                GL8_NODES
                    .iter()
                    .zip(GL8_WEIGHTS.iter())
                    .map(|(x, w)| {
                        let y = mid + h * x;
                        w * p.at(y) * poly(c, y)
                    })
                    .sum::<f64>()
                    * h
            })
            .sum()
    }
}

pub(crate) fn poly(c: &[f64], y: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * y + ci)
}

pub(crate) fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, ci)| i as f64 * ci)
        .collect()
}

/// Compactly supported pair `(S, T)` on `[-Δ, Δ]` representing `W = S' + T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    half_width: f64,
    s_shape: Shape,
    t_shape: Shape,
    label: String,
    s: PieceFn,
    t: PieceFn,
}

impl Profile {
    pub fn new(half_width: f64, s: Shape, t: Shape, label: impl Into<String>) -> Result<Profile> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParams("half width must be positive".into()));
        }
        let sp = PieceFn::lower(&s)?;
        let tp = PieceFn::lower(&t)?;
        let tol = 1e-12 * half_width;
        for f in [&sp, &tp] {
            if let Some((a, b)) = f.support() {
                if a < -half_width - tol || b > half_width + tol {
                    return Err(Error::InvalidParams(format!(
                        "profile support [{a}, {b}] exceeds [-{half_width}, {half_width}]"
                    )));
                }
            }
        }
        Ok(Profile {
            half_width,
            s_shape: s,
            t_shape: t,
            label: label.into(),
            s: sp,
            t: tp,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn shape(&self, part: Part) -> &Shape {
        match part {
            Part::S => &self.s_shape,
            Part::T => &self.t_shape,
        }
    }

    pub(crate) fn part(&self, part: Part) -> &PieceFn {
        match part {
            Part::S => &self.s,
            Part::T => &self.t,
        }
    }

    pub fn eval(&self, part: Part, y: f64) -> f64 {
        self.part(part).eval(y)
    }

    pub fn mass(&self, part: Part) -> f64 {
        self.part(part).integral()
    }

    pub fn l2_norm_sq(&self, part: Part) -> f64 {
        self.part(part).l2_sq()
    }

    /// Distributional pairing `⟨S' + T, φ⟩ = −∫Sφ' + ∫Tφ` for a polynomial
    /// test function with ascending coefficients.
    pub fn pairing(&self, coeffs: &[f64]) -> f64 {
        let dphi = poly_derivative(coeffs);
        -self.s.pair_poly(&dphi) + self.t.pair_poly(coeffs)
    }

    /// All piece endpoints of both components, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = self.s.breakpoints();
        v.extend(self.t.breakpoints());
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    /// Same profile with every value multiplied by `c`.
    pub fn scaled(&self, cs: f64, ct: f64) -> Profile {
        let mut out = self.clone();
        for p in &mut out.s.pieces {
            p.va *= cs;
            p.vb *= cs;
        }
        for p in &mut out.t.pieces {
            p.va *= ct;
            p.vb *= ct;
        }
        out
    }
}

/// `f̂(k) = ∫ e^{2iky} f(y) dy` for one component of the profile.
pub fn profile_fourier(profile: &Profile, k: f64, which: Part) -> C64 {
    profile.part(which).fourier(k)
}

/// Profile whose `S' + T` is the Dirac mass at the origin:
/// `S(y) = (1 − y/Δ)` on `[0, Δ]`, `T(y) = 1/Δ` on `(0, Δ)`.
pub fn delta_decomposition(half_width: f64) -> Result<Profile> {
    Profile::new(
        half_width,
        Shape::Triangle {
            lo: 0.0,
            peak: 0.0,
            hi: half_width,
            height: 1.0,
        },
        Shape::Box {
            lo: 0.0,
            hi: half_width,
            height: 1.0 / half_width,
        },
        format!("delta(half_width={half_width})"),
    )
}
