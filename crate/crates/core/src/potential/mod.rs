//! Half-line potentials in the form `V = σ' + τ`.

mod form;
mod profile;

pub use form::{ClosedForm, Form, GrowingOscTail, Table, SINGULAR_CELL};
pub use profile::{delta_decomposition, profile_fourier, Part, Profile, Shape};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Unit intervals per segment checked for local integrability.
pub const VALIDATION_HORIZON: f64 = 64.0;

/// Boundary condition `u(0) cos α + u^{[1]}(0) sin α = 0`, `α ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BoundaryAngle(f64);

impl BoundaryAngle {
    pub const DIRICHLET: BoundaryAngle = BoundaryAngle(0.0);

    /// Reduces any real angle into `[0, π)`.
    pub fn new(alpha: f64) -> BoundaryAngle {
        let mut a = alpha.rem_euclid(PI);
        if a >= PI {
            a = 0.0;
        }
        BoundaryAngle(a)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Input description of one segment `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentDescriptor {
    pub start: f64,
    pub end: f64,
    pub sigma: Form,
    pub tau: Form,
}

impl SegmentDescriptor {
    pub fn new(start: f64, end: f64, sigma: Form, tau: Form) -> Self {
        SegmentDescriptor {
            start,
            end,
            sigma,
            tau,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub sigma: Form,
    pub tau: Form,
}

/// Validated half-line potential covering `[0, x_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    segments: Vec<Segment>,
    sigma_jumps: Vec<(f64, f64)>,
    description: String,
    x_max: f64,
}

impl PotentialSpec {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `(position, jump height)` of σ discontinuities within the validated range.
    pub fn sigma_jumps(&self) -> &[(f64, f64)] {
        &self.sigma_jumps
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn with_description(mut self, d: impl Into<String>) -> Self {
        self.description = d.into();
        self
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn check_range(&self, x: f64) -> Result<()> {
        if x >= 0.0 && x <= self.x_max {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                x,
                lo: 0.0,
                hi: self.x_max,
            })
        }
    }

    /// Index of the segment containing `x` (right-continuous).
    pub fn segment_index(&self, x: f64) -> Result<usize> {
        self.check_range(x)?;
        let i = self.segments.partition_point(|s| s.end <= x);
        Ok(i.min(self.segments.len() - 1))
    }

    pub fn sigma(&self, x: f64) -> Result<f64> {
        Ok(self.segments[self.segment_index(x)?].sigma.eval(x))
    }

    pub fn tau(&self, x: f64) -> Result<f64> {
        Ok(self.segments[self.segment_index(x)?].tau.eval(x))
    }

    /// Segment edges and form breakpoints in `(a, b)`, sorted.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for s in &self.segments {
            if s.end <= a || s.start >= b {
                continue;
            }
            if s.start > a {
                out.push(s.start);
            }
            let lo = s.start.max(a);
            let hi = s.end.min(b);
            out.extend(s.sigma.breakpoints(lo, hi));
            out.extend(s.tau.breakpoints(lo, hi));
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.dedup();
        out
    }

    /// Points in `[a, b]` where σ or τ is unbounded.
    pub fn singular_points(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .segments
            .iter()
            .filter(|s| s.end > a && s.start < b)
            .flat_map(|s| {
                let mut v = s.sigma.singular_points();
                v.extend(s.tau.singular_points());
                v.into_iter().filter(move |p| *p >= s.start && *p <= s.end)
            })
            .filter(|p| *p >= a && *p <= b)
            .collect();
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.dedup();
        out
    }
}

/// Builds and validates a potential from sorted, disjoint segments. Gaps are
/// filled with `σ = τ = 0`; segments reaching beyond `x_max` are clipped.
pub fn build_potential(segments: Vec<SegmentDescriptor>, x_max: f64) -> Result<PotentialSpec> {
    if !(x_max > 0.0) {
        return Err(Error::InvalidParams("x_max must be positive".into()));
    }
    let mut out: Vec<Segment> = Vec::new();
    let mut cursor = 0.0;
    for d in segments {
        if !(d.start >= 0.0) || !(d.end > d.start) || d.start < cursor {
            return Err(Error::OverlappingSegments { at: d.start });
        }
        d.sigma.validate()?;
        d.tau.validate()?;
        if d.start >= x_max {
            continue;
        }
        if d.start > cursor {
            out.push(Segment {
                start: cursor,
                end: d.start,
                sigma: Form::zero(),
                tau: Form::zero(),
            });
        }
        let end = d.end.min(x_max);
        out.push(Segment {
            start: d.start,
            end,
            sigma: d.sigma,
            tau: d.tau,
        });
        cursor = end;
    }
    if cursor < x_max {
        out.push(Segment {
            start: cursor,
            end: x_max,
            sigma: Form::zero(),
            tau: Form::zero(),
        });
    }
    let mut jumps = Vec::new();
    for (i, s) in out.iter().enumerate() {
        validate_segment(s)?;
        let hi = s.end.min(s.start + VALIDATION_HORIZON);
        jumps.extend(s.sigma.jumps(s.start, hi));
        if i > 0 {
            let prev = &out[i - 1];
            let j = s.sigma.eval(s.start) - prev.sigma.eval(s.start.next_down());
            if j.abs() > 1e-12 {
                jumps.push((s.start, j));
            }
        }
    }
    jumps.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(PotentialSpec {
        segments: out,
        sigma_jumps: jumps,
        description: String::new(),
        x_max,
    })
}

fn validate_segment(s: &Segment) -> Result<()> {
    let hi = s.end.min(s.start + VALIDATION_HORIZON);
    if s.sigma.constant_on(s.start, s.end).is_some() && s.tau.constant_on(s.start, s.end).is_some()
    {
        return Ok(());
    }
    let mut a = s.start;
    while a < hi {
        let b = (a + 1.0).min(hi);
        if !s.tau.l1(a, b).is_finite() {
            return Err(Error::NonIntegrableTau { from: a, to: b });
        }
        if !s.sigma.l2_sq(a, b).is_finite() {
            return Err(Error::SigmaNotLocallyL2 { from: a, to: b });
        }
        a = b;
    }
    Ok(())
}

/// Named potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    Free,
    /// `Σ strength·δ(x − first − n·spacing)`.
    DeltaComb {
        #[serde(default = "one")]
        strength: f64,
        #[serde(default = "one")]
        spacing: f64,
        #[serde(default = "half")]
        first: f64,
    },
    /// `strength/(x − x0)` through `σ = strength·log|x − x0|`.
    Coulomb {
        #[serde(default = "three")]
        x0: f64,
        #[serde(default = "one")]
        strength: f64,
    },
    /// `(−1)^{⌊2n(x−n)⌋}` on `[n−1, n)`.
    SquareWaveOsc,
    /// `x^α sin(x^β)`.
    GrowingOsc { alpha: f64, beta: f64 },
    /// Asymptotic Wigner–von Neumann `−8 sin(2t)/t`, cut off below 1.
    WignerVonNeumann,
    /// `σ = amplitude·e^{−rate·x}`.
    ExpDecay {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        rate: f64,
    },
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn three() -> f64 {
    3.0
}

impl Preset {
    pub fn exp_decay() -> Preset {
        Preset::ExpDecay {
            amplitude: 1.0,
            rate: 1.0,
        }
    }

    pub fn delta_comb() -> Preset {
        Preset::DeltaComb {
            strength: 1.0,
            spacing: 1.0,
            first: 0.5,
        }
    }

    pub fn coulomb() -> Preset {
        Preset::Coulomb {
            x0: 3.0,
            strength: 1.0,
        }
    }
}

/// Builds a named potential on `[0, ∞)`.
pub fn preset_potential(preset: &Preset) -> Result<PotentialSpec> {
    let inf = f64::INFINITY;
    let (segs, desc) = match preset {
        Preset::Free => (vec![], "free".to_string()),
        Preset::DeltaComb {
            strength,
            spacing,
            first,
        } => {
            if !(*spacing > 0.0 && *first >= 0.0 && strength.is_finite()) {
                return Err(Error::InvalidParams(
                    "delta_comb needs spacing > 0, first >= 0".into(),
                ));
            }
            let sigma = Form::ClosedForm(ClosedForm::Sawtooth {
                start: *first,
                period: *spacing,
                height: *strength,
            });
            let mut v = vec![];
            if *first > 0.0 {
                v.push(SegmentDescriptor::new(0.0, *first, Form::zero(), Form::zero()));
            }
            v.push(SegmentDescriptor::new(
                *first,
                inf,
                sigma,
                Form::Constant(strength / spacing),
            ));
            (
                v,
                format!("delta_comb(strength={strength}, spacing={spacing}, first={first})"),
            )
        }
        Preset::Coulomb { x0, strength } => {
            if !(x0.is_finite() && strength.is_finite()) {
                return Err(Error::InvalidParams("coulomb parameters must be finite".into()));
            }
            (
                vec![SegmentDescriptor::new(
                    0.0,
                    inf,
                    Form::LogSingularity {
                        x0: *x0,
                        scale: *strength,
                    },
                    Form::zero(),
                )],
                format!("coulomb(x0={x0}, strength={strength})"),
            )
        }
        Preset::SquareWaveOsc => (
            vec![SegmentDescriptor::new(
                0.0,
                inf,
                Form::ClosedForm(ClosedForm::TriangleWave),
                Form::zero(),
            )],
            "square_wave_osc".to_string(),
        ),
        Preset::GrowingOsc { alpha, beta } => {
            let tail = GrowingOscTail::new(*alpha, *beta)?;
            (
                vec![SegmentDescriptor::new(
                    0.0,
                    inf,
                    Form::ClosedForm(ClosedForm::GrowingOscSigma(tail)),
                    Form::zero(),
                )],
                format!("growing_osc(alpha={alpha}, beta={beta})"),
            )
        }
        Preset::WignerVonNeumann => (
            vec![SegmentDescriptor::new(
                0.0,
                inf,
                Form::ClosedForm(ClosedForm::WignerVonNeumannSigma),
                Form::zero(),
            )],
            "asymptotic_wigner_von_neumann".to_string(),
        ),
        Preset::ExpDecay { amplitude, rate } => (
            vec![SegmentDescriptor::new(
                0.0,
                inf,
                Form::ClosedForm(ClosedForm::Exp {
                    amplitude: *amplitude,
                    rate: *rate,
                }),
                Form::zero(),
            )],
            format!("exp_decay(amplitude={amplitude}, rate={rate})"),
        ),
    };
    Ok(build_potential(segs, inf)?.with_description(desc))
}

/// Returns the potential `(σ + θ, τ − θ')`, which represents the same `V`.
pub fn gauge_transform(pot: &PotentialSpec, theta: &Form) -> Result<PotentialSpec> {
    let dtheta = theta.derivative().ok_or_else(|| {
        Error::NonDifferentiableTheta(format!("{theta:?} has no absolutely continuous derivative"))
    })?;
    let segs = pot
        .segments
        .iter()
        .map(|s| {
            SegmentDescriptor::new(
                s.start,
                s.end,
                s.sigma.clone().plus(theta.clone()),
                s.tau.clone().plus(dtheta.clone().times(-1.0)),
            )
        })
        .collect();
    let mut out = build_potential(segs, pot.x_max)?;
    out.description = if theta.is_zero() {
        pot.description.clone()
    } else {
        format!("gauge({})", pot.description)
    };
    Ok(out)
}

/// Relabels a boundary angle across a gauge change: `cot α₂ = cot α₁ − θ(0)`.
/// `α₁` is the angle used with the gauge-transformed potential, `α₂` the
/// matching angle for the original one. Dirichlet (`α = 0`) is fixed.
pub fn relabel_boundary(alpha1: BoundaryAngle, theta0: f64) -> BoundaryAngle {
    let a = alpha1.value();
    if a == 0.0 {
        return BoundaryAngle::DIRICHLET;
    }
    let cot = a.cos() / a.sin() - theta0;
    BoundaryAngle::new(1f64.atan2(cot))
}

/// `‖σ χ_{[x,x+1)}‖₂ + ‖τ χ_{[x,x+1)}‖₁`.
pub fn local_size(pot: &PotentialSpec, x: f64) -> Result<f64> {
    if !(x >= 0.0) || x + 1.0 > pot.x_max {
        return Err(Error::OutOfRange {
            x,
            lo: 0.0,
            hi: pot.x_max,
        });
    }
    let (a, b) = (x, x + 1.0);
    let mut l2 = 0.0;
    let mut l1 = 0.0;
    for s in &pot.segments {
        let lo = s.start.max(a);
        let hi = s.end.min(b);
        if hi <= lo {
            continue;
        }
        l2 += s.sigma.l2_sq(lo, hi);
        l1 += s.tau.l1(lo, hi);
    }
    Ok(l2.sqrt() + l1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_free() {
        let p = build_potential(vec![], 10.0).unwrap();
        assert_eq!(p.segments().len(), 1);
        assert_eq!(p.sigma(3.0).unwrap(), 0.0);
        assert_eq!(p.tau(9.99).unwrap(), 0.0);
        assert!(matches!(p.sigma(11.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn single_delta_via_step_sigma() {
        let p = build_potential(
            vec![SegmentDescriptor::new(2.0, f64::INFINITY, Form::Constant(1.0), Form::zero())],
            f64::INFINITY,
        )
        .unwrap();
        assert_eq!(p.sigma(1.999).unwrap(), 0.0);
        assert_eq!(p.sigma(2.0).unwrap(), 1.0);
        assert_eq!(p.sigma_jumps(), &[(2.0, 1.0)]);
        assert!((local_size(&p, 2.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlapping_segments_rejected() {
        let r = build_potential(
            vec![
                SegmentDescriptor::new(0.0, 2.0, Form::zero(), Form::zero()),
                SegmentDescriptor::new(1.0, 3.0, Form::zero(), Form::zero()),
            ],
            5.0,
        );
        assert!(matches!(r, Err(Error::OverlappingSegments { .. })));
    }

    #[test]
    fn non_integrable_inputs_rejected() {
        let pw = |e: f64| {
            Form::ClosedForm(ClosedForm::Power {
                x0: 1.5,
                amplitude: 1.0,
                exponent: e,
            })
        };
        let r = build_potential(vec![SegmentDescriptor::new(0.0, 3.0, Form::zero(), pw(-1.0))], 3.0);
        assert!(matches!(r, Err(Error::NonIntegrableTau { .. })));
        let r = build_potential(vec![SegmentDescriptor::new(0.0, 3.0, pw(-0.5), Form::zero())], 3.0);
        assert!(matches!(r, Err(Error::SigmaNotLocallyL2 { .. })));
        let ok = build_potential(vec![SegmentDescriptor::new(0.0, 3.0, pw(-0.4), pw(-0.9))], 3.0);
        assert!(ok.is_ok());
    }

    #[test]
    fn coulomb_is_locally_l2() {
        let p = build_potential(
            vec![SegmentDescriptor::new(0.0, f64::INFINITY, Form::log_singularity(3.0), Form::zero())],
            f64::INFINITY,
        )
        .unwrap();
        let s = local_size(&p, 2.5).unwrap();
        assert!(s.is_finite() && s > 0.0);
    }

    #[test]
    fn exp_decay_values() {
        let p = preset_potential(&Preset::exp_decay()).unwrap();
        assert!((p.sigma(1.0).unwrap() - (-1f64).exp()).abs() < 1e-16);
        let want = ((1.0 - (-2f64).exp()) / 2.0).sqrt();
        assert!((local_size(&p, 0.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn relabel_examples() {
        let a = relabel_boundary(BoundaryAngle::new(PI / 2.0), 1.0);
        assert!((a.value() - 3.0 * PI / 4.0).abs() < 1e-15);
        let b = relabel_boundary(BoundaryAngle::new(0.7), 0.0);
        assert!((b.value() - 0.7).abs() < 1e-15);
        assert_eq!(relabel_boundary(BoundaryAngle::DIRICHLET, 2.0).value(), 0.0);
    }

    #[test]
    fn gauge_zero_is_identity() {
        let p = preset_potential(&Preset::exp_decay()).unwrap();
        let q = gauge_transform(&p, &Form::zero()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn gauge_sine_on_free() {
        let p = preset_potential(&Preset::Free).unwrap();
        let th = Form::ClosedForm(ClosedForm::Sinusoid {
            amplitude: 0.3,
            omega: 1.0,
            phase: 0.0,
        });
        let q = gauge_transform(&p, &th).unwrap();
        for &x in &[0.0, 0.4, 2.2, 7.5] {
            assert!((q.sigma(x).unwrap() - 0.3 * x.sin()).abs() < 1e-15);
            assert!((q.tau(x).unwrap() + 0.3 * x.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn gauge_moves_tau_into_sigma() {
        // (σ = 0, τ = V) with θ = ∫₀ˣ V gives (σ = θ, τ = 0)
        let p = build_potential(
            vec![SegmentDescriptor::new(
                0.0,
                f64::INFINITY,
                Form::zero(),
                Form::ClosedForm(ClosedForm::SquareWave),
            )],
            f64::INFINITY,
        )
        .unwrap();
        let th = Form::ClosedForm(ClosedForm::TriangleWave);
        let q = gauge_transform(&p, &th).unwrap();
        for &x in &[0.1, 0.3, 1.55, 4.2] {
            assert_eq!(q.tau(x).unwrap(), 0.0);
            assert_eq!(q.sigma(x).unwrap(), th.eval(x));
        }
    }

    #[test]
    fn log_theta_is_rejected() {
        let p = preset_potential(&Preset::Free).unwrap();
        let r = gauge_transform(&p, &Form::log_singularity(1.0));
        assert!(matches!(r, Err(Error::NonDifferentiableTheta(_))));
    }

    #[test]
    fn wvn_decay_rate() {
        let p = preset_potential(&Preset::WignerVonNeumann).unwrap();
        let mut worst: f64 = 0.0;
        let mut x = 10.0;
        while x <= 1000.0 {
            worst = worst.max((p.sigma(x).unwrap() * x).abs());
            x += 0.37;
        }
        assert!(worst <= 10.0, "{worst}");
    }
}
