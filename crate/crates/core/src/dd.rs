//! Double-double phase arithmetic and reduction modulo 2π.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

// 2π split into three doubles; the sum carries about 160 bits.
const TWO_PI_HI: f64 = std::f64::consts::TAU;
const TWO_PI_MID: f64 = 2.4492935982947064e-16;
const TWO_PI_LO: f64 = -5.989539619436679e-33;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Dd {
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact product of two doubles.
    pub fn mul_exact(a: f64, b: f64) -> Dd {
        let (p, e) = two_prod(a, b);
        Dd { hi: p, lo: e }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add_f64(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        let (h, l) = quick_two_sum(s, e + self.lo);
        Dd { hi: h, lo: l }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (h, l) = quick_two_sum(p, e + self.lo * b);
        Dd { hi: h, lo: l }
    }

    /// Reduce into `[0, 2π)`. Returns `(r, base)` with `self = base + r`
    /// and `base` a multiple of 2π (as computed in extended precision).
    pub fn rem_two_pi(self) -> (f64, Dd) {
        let n = (self.hi / TWO_PI_HI).floor();
        let mut r = self.sub_multiple(n);
        // for large values n is only accurate to its own ulp; finish on the small remainder
        for _ in 0..4 {
            let m = (r.hi / TWO_PI_HI).floor();
            if m == 0.0 {
                break;
            }
            r = r.sub_multiple(m);
        }
        let rf = r.to_f64().clamp(0.0, TWO_PI_HI.next_down());
        (rf, self - Dd::from_f64(rf))
    }

    fn sub_multiple(self, n: f64) -> Dd {
        let (p1, e1) = two_prod(n, TWO_PI_HI);
        let (p2, e2) = two_prod(n, TWO_PI_MID);
        let p3 = n * TWO_PI_LO;
        // self - (p1 + e1 + p2 + e2 + p3), largest terms first
        let (s, t) = two_sum(self.hi, -p1);
        let t = t + self.lo - e1 - p2 - e2 - p3;
        let (h, l) = quick_two_sum(s, t);
        Dd { hi: h, lo: l }
    }

    /// Representation error bound, in radians, after reducing this value.
    pub fn reduction_error(self) -> f64 {
        // relative precision of the stored sum plus the truncated 2π tail
        self.hi.abs() * (2f64).powi(-104) + (self.hi / TWO_PI_HI).abs() * 1e-48
    }

    pub fn sin_cos(self) -> (f64, f64) {
        self.rem_two_pi().0.sin_cos()
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (h, l) = quick_two_sum(s, e + f);
        Dd { hi: h, lo: l }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

/// Nonnegative length `whole + frac` held exactly (`frac` in `[0, 1)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ExactLength {
    pub whole: u128,
    frac_bits: u64,
}

impl ExactLength {
    pub fn integer(whole: u128) -> Self {
        ExactLength {
            whole,
            frac_bits: 0f64.to_bits(),
        }
    }

    /// `frac` must lie in `[0, 1)`; every finite double is a dyadic rational.
    pub fn new(whole: u128, frac: f64) -> Option<Self> {
        if !(0.0..1.0).contains(&frac) {
            return None;
        }
        Some(ExactLength {
            whole,
            frac_bits: frac.to_bits(),
        })
    }

    pub fn frac(&self) -> f64 {
        f64::from_bits(self.frac_bits)
    }

    pub fn is_zero(&self) -> bool {
        self.whole == 0 && self.frac() == 0.0
    }

    /// Nearest double (lossy for lengths above 2^53).
    pub fn approx(&self) -> f64 {
        self.whole as f64 + self.frac()
    }

    /// `k · self` as a double-double. The product of `k` with each exact
    /// part is formed without rounding.
    pub fn scaled(&self, k: f64) -> Dd {
        let hi = self.whole as f64;
        // `hi` may round; the remainder is small and exact
        let rem = self.whole as i128 - hi as i128;
        let mut acc = Dd::mul_exact(k, hi);
        acc = acc + Dd::mul_exact(k, rem as f64);
        acc + Dd::mul_exact(k, self.frac())
    }

    /// `self − d` for a small nonnegative double `d`; `None` if negative.
    pub fn minus_f64(&self, d: f64) -> Option<Self> {
        if d < 0.0 || !d.is_finite() {
            return None;
        }
        let dw = d.floor();
        let df = d - dw;
        let mut whole = self.whole.checked_sub(dw as u128)?;
        let mut frac = self.frac() - df;
        if frac < 0.0 {
            whole = whole.checked_sub(1)?;
            frac += 1.0;
        }
        // frac + 1 can round to 1 for tiny negatives; such gaps are not dyadic-exact
        if frac >= 1.0 {
            return None;
        }
        ExactLength::new(whole, frac)
    }

    pub fn checked_sub(&self, other: &ExactLength) -> Option<Self> {
        let mut whole = self.whole.checked_sub(other.whole)?;
        let mut frac = self.frac() - other.frac();
        if frac < 0.0 {
            whole = whole.checked_sub(1)?;
            frac += 1.0;
        }
        ExactLength::new(whole, frac)
    }
}

/// Integer part in full, then the shortest round-trip digits of the fraction.
impl std::fmt::Display for ExactLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let frac = self.frac();
        if frac == 0.0 {
            write!(f, "{}", self.whole)
        } else {
            let s = frac.to_string();
            write!(f, "{}{}", self.whole, s.trim_start_matches('0'))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_addition_keeps_low_bits() {
        let a = Dd::from_f64(1e20);
        let b = a.add_f64(1.5);
        assert_eq!((b - a).to_f64(), 1.5);
    }

    #[test]
    fn reduction_of_small_multiples() {
        let x = Dd::from_f64(3.0 * TWO_PI_HI + 0.25);
        let (r, base) = x.rem_two_pi();
        assert!((r - (0.25 - 3.0 * TWO_PI_MID)).abs() < 1e-14);
        assert!(((base + Dd::from_f64(r)) - x).to_f64().abs() < 1e-30);
    }

    #[test]
    fn reduction_range() {
        for i in 0..200 {
            let v = Dd::from_f64(-50.0 + i as f64 * 0.731);
            let (r, _) = v.rem_two_pi();
            assert!((0.0..TWO_PI_HI).contains(&r));
            let d = (r.sin() - v.hi.sin()).abs();
            assert!(d < 1e-13, "{i} {d}");
        }
    }

    #[test]
    fn reduction_of_huge_values() {
        let x = ExactLength::integer(24_329_020_081_766_400_000).scaled(0.93);
        let (r, base) = x.rem_two_pi();
        assert!((0.0..TWO_PI_HI).contains(&r));
        assert!(((base + Dd::from_f64(r)) - x).to_f64().abs() < 1e-12);
    }

    #[test]
    fn exact_length_scaling() {
        let g = ExactLength::integer((1u128 << 70) + 3);
        let p = g.scaled(1.0);
        assert_eq!(p.hi, 2f64.powi(70));
        assert_eq!(p.lo, 3.0);
    }

    #[test]
    fn exact_length_subtraction() {
        let g = ExactLength::integer(10);
        let h = g.minus_f64(2.5).unwrap();
        assert_eq!(h.whole, 7);
        assert_eq!(h.frac(), 0.5);
        assert!(ExactLength::integer(1).minus_f64(2.0).is_none());
    }

    #[test]
    fn exact_length_display() {
        let f20: u128 = (1..=20u128).product();
        assert_eq!(ExactLength::integer(10 * f20).to_string(), "24329020081766400000");
        assert_eq!(ExactLength::new(7, 0.375).unwrap().to_string(), "7.375");
    }
}
