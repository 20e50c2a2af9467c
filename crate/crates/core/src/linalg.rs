//! Dense 2×2 complex matrices.
//!
//! Entries are stored row-major as `[[a, b], [c, d]]`. Rows are ordered
//! `(u^{[1]}, u)` throughout the crate.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: C64::new(1.0, 0.0),
        b: C64::new(0.0, 0.0),
        c: C64::new(0.0, 0.0),
        d: C64::new(1.0, 0.0),
    };

    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    /// Adjugate; equals the inverse for unimodular matrices.
    pub fn adjugate(&self) -> Mat2 {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        self.adjugate().scale(det.inv())
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn scale_re(&self, s: f64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn conj(&self) -> Mat2 {
        Mat2::new(self.a.conj(), self.b.conj(), self.c.conj(), self.d.conj())
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn frobenius(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    /// Largest and smallest singular values, closed form.
    pub fn singular_values(&self) -> (f64, f64) {
        let fro2 = self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr();
        let det = self.det().norm();
        // s1^2 + s2^2 = fro2, s1 s2 = |det|
        let disc = ((fro2 - 2.0 * det) * (fro2 + 2.0 * det)).max(0.0).sqrt();
        let s1_sq = 0.5 * (fro2 + disc);
        let s1 = s1_sq.sqrt();
        let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
        (s1, s2)
    }

    /// Spectral (operator 2-) norm.
    pub fn norm(&self) -> f64 {
        self.singular_values().0
    }

    pub fn max_abs(&self) -> f64 {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn to_array(self) -> [f64; 8] {
        [
            self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im,
        ]
    }

    pub(crate) fn from_array(y: &[f64; 8]) -> Mat2 {
        Mat2::new(
            C64::new(y[0], y[1]),
            C64::new(y[2], y[3]),
            C64::new(y[4], y[5]),
            C64::new(y[6], y[7]),
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}
