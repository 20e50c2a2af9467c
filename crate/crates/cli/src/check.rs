//! Built-in invariant suite for `h1spec check`.

use h1spec_core::potential::delta_decomposition;
use h1spec_core::sparse::drift_predictor;
use h1spec_core::spectral::{carmona_density, cesaro_average, simon_stolz_integral};
use h1spec_core::weyl::m_function;
use h1spec_core::{
    gap_advance, preset_potential, transfer, BoundaryAngle, DensityVariant, ExactLength, Preset, PruferState,
    Tolerances, C64,
};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

fn at_most(name: &'static str, value: f64, limit: f64) -> CheckResult {
    CheckResult {
        name,
        value,
        limit,
        pass: value <= limit,
    }
}

fn at_least(name: &'static str, value: f64, limit: f64) -> CheckResult {
    CheckResult {
        name,
        value,
        limit,
        pass: value >= limit,
    }
}

/// Runs every check; a numerical error inside a check counts as failure.
pub fn run_checks(tol: &Tolerances) -> Vec<CheckResult> {
    type Check = fn(&Tolerances) -> h1spec_core::Result<CheckResult>;
    let checks: [(&'static str, Check); 8] = [
        ("free_sqrt_density", free_sqrt_density),
        ("unimodularity_delta_comb", unimodularity),
        ("cocycle_exp_decay", cocycle),
        ("free_m_at_i", free_m),
        ("drift_nonnegative", drift_nonnegative),
        ("gap_phase_reduction", gap_reduction),
        ("simon_stolz_monotone", stolz_monotone),
        ("free_cesaro_bounded", free_cesaro),
    ];
    checks
        .iter()
        .map(|(name, c)| {
            c(tol).unwrap_or(CheckResult {
                name,
                value: f64::NAN,
                limit: f64::NAN,
                pass: false,
            })
        })
        .collect()
}

fn free_sqrt_density(tol: &Tolerances) -> h1spec_core::Result<CheckResult> {
    let free = preset_potential(&Preset::Free)?;
    let mut worst: f64 = 0.0;
    for &e in &[0.5, 1.0, 2.0, 4.0] {
        let v = carmona_density(&free, BoundaryAngle::DIRICHLET, 20.0, e, DensityVariant::SqrtWeighted, tol)?;
        let exact = f64::sqrt(e) / PI;
        worst = worst.max((v - exact).abs() / exact);
    }
    Ok(at_most("free_sqrt_density", worst, 1e-8))
}

fn unimodularity(tol: &Tolerances) -> h1spec_core::Result<CheckResult> {
    let pot = preset_potential(&Preset::delta_comb())?;
    let t = transfer(&pot, C64::new(2.0, 1.0), 10.0, 0.0, tol)?;
    Ok(at_most("unimodularity_delta_comb", t.det_drift.max((t.det() - 1.0).norm()), 1e-8))
}

fn cocycle(tol: &Tolerances) -> h1spec_core::Result<CheckResult> {
    let pot = preset_potential(&Preset::exp_decay())?;
    let z = C64::new(3.0, 0.5);
    let a = transfer(&pot, z, 2.5, 0.0, tol)?;
    let b = transfer(&pot, z, 6.0, 2.5, tol)?;
    let c = transfer(&pot, z, 6.0, 0.0, tol)?;
    let defect = (b.after(&a).matrix() - c.matrix()).norm() / (a.norm() * b.norm());
    Ok(at_most("cocycle_exp_decay", defect, 1e-8))
}

fn free_m(tol: &Tolerances) -> h1spec_core::Result<CheckResult> {
    let free = preset_potential(&Preset::Free)?;
    let r = m_function(&free, C64::new(0.0, 1.0), BoundaryAngle::DIRICHLET, 1e-9, 1e3, tol)?;
    Ok(at_most("free_m_at_i", (r.m - C64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm(), 1e-8))
}

fn drift_nonnegative(_: &Tolerances) -> h1spec_core::Result<CheckResult> {
    let p = delta_decomposition(1.0)?;
    let min = (0..200)
        .map(|i| drift_predictor(&p, 0.3, 0.1 + 0.02 * i as f64))
        .fold(f64::INFINITY, f64::min);
    Ok(at_least("drift_nonnegative", min, 0.0))
}

fn gap_reduction(_: &Tolerances) -> h1spec_core::Result<CheckResult> {
    let f20: u128 = (1..=20u128).product();
    let st = gap_advance(&PruferState::new(0.0, 0.0, 0.0, 1.0), &ExactLength::integer(10 * f20));
    Ok(at_most("gap_phase_reduction", st.theta.reduction_error(), 1e-6))
}

fn stolz_monotone(tol: &Tolerances) -> h1spec_core::Result<CheckResult> {
    let free = preset_potential(&Preset::Free)?;
    let mut prev = 0.0;
    let mut worst_drop: f64 = 0.0;
    for &l in &[5.0, 10.0, 20.0, 40.0] {
        let v = simon_stolz_integral(&free, 1.0, l, tol)?;
        worst_drop = worst_drop.max(prev - v);
        prev = v;
    }
    Ok(at_most("simon_stolz_monotone", worst_drop, 0.0))
}

fn free_cesaro(tol: &Tolerances) -> h1spec_core::Result<CheckResult> {
    let free = preset_potential(&Preset::Free)?;
    let v = cesaro_average(&free, 1.0, 25.0, tol)?.value();
    Ok(CheckResult {
        name: "free_cesaro_bounded",
        value: v,
        limit: 2.0,
        pass: (1.0..=2.0).contains(&v),
    })
}
