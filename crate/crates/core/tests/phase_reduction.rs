//! Gap phase reduction against a big-integer fixed-point reference.

use h1spec_core::dd::ExactLength;
use h1spec_core::prufer::{gap_advance, PruferState};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

const BITS: u32 = 256;

/// `atan(1/n)` scaled by `2^BITS`.
fn atan_inv(n: u32) -> BigInt {
    let one = BigInt::from(1) << BITS;
    let n2 = BigInt::from(n * n);
    let mut power = &one / BigInt::from(n);
    let mut sum = BigInt::zero();
    let mut j = 0u32;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * j + 1);
        if j.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        j += 1;
    }
    sum
}

fn two_pi_fixed() -> BigInt {
    (BigInt::from(16) * atan_inv(5) - BigInt::from(4) * atan_inv(239)) * 2
}

/// `(k · whole) mod 2π` for a dyadic `k`, in radians.
fn reference(whole: u128, k: f64) -> f64 {
    // k = mant · 2^exp exactly
    let bits = k.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32 - 1075;
    let mant = (bits & ((1 << 52) - 1)) | (1 << 52);
    let mut v = BigInt::from(whole) * BigInt::from(mant);
    let shift = BITS as i32 + exp;
    v = if shift >= 0 { v << shift as u32 } else { v >> (-shift) as u32 };
    let tp = two_pi_fixed();
    let r = ((v % &tp) + &tp) % &tp;
    (r >> (BITS - 60)).to_f64().unwrap() / 2f64.powi(60)
}

fn reduced_after_gap(whole: u128, k: f64) -> f64 {
    let st = PruferState::new(0.0, 0.0, 0.0, k);
    gap_advance(&st, &ExactLength::integer(whole)).theta_mod_two_pi()
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

#[test]
fn reference_two_pi_is_accurate() {
    let tp = two_pi_fixed();
    let approx = (tp >> (BITS - 60)).to_f64().unwrap() / 2f64.powi(60);
    assert!((approx - std::f64::consts::TAU).abs() < 1e-15);
}

#[test]
fn gap_of_ten_to_sixteen() {
    let g = 10u128.pow(16);
    let err = circular_distance(reduced_after_gap(g, 1.0), reference(g, 1.0));
    assert!(err <= 1e-6, "error {err}");
}

#[test]
fn factorial_gaps_at_non_dyadic_k() {
    let f20: u128 = (1..=20u128).product();
    for &k in &[0.7, 0.93, 1.0, 1.2999] {
        for g in [10 * f20, 10 * f20 - 10 * (f20 / 20) - 2, 123_456_789_012_345_678_901u128] {
            let err = circular_distance(reduced_after_gap(g, k), reference(g, k));
            assert!(err <= 1e-6, "k={k} g={g} error {err}");
        }
    }
}
