//! Acceptance suite: one PASS/FAIL line per criterion. Criteria listed in
//! `KNOWN_UNATTAINABLE` are reported but excluded from the exit status.

use h1spec_core::potential::delta_decomposition;
use h1spec_core::propagate::solution_with_l2;
use h1spec_core::prufer::prufer_flow_with_k_derivatives;
use h1spec_core::sparse::{bump_potential, increment_predictor, transition_experiment, DRule, SparseConfig, XRule};
use h1spec_core::spectral::{
    carmona_density, cesaro_average, classify_grid, shortrange_density, simon_stolz_integral, ClassifyParams,
};
use h1spec_core::{
    build_potential, gauge_transform, m_function, preset_potential, prufer_flow, relabel_boundary, transfer,
    weyl_disk, BoundaryAngle, ClosedForm, DensityVariant, Form, Mat2, PotentialSpec, Preset, SegmentDescriptor,
    SpectralTag, Tolerances, C64,
};
use serde_json::Value;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

const KNOWN_UNATTAINABLE: &[&str] = &["10b"];

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn tight() -> Tolerances {
    Tolerances {
        rtol: 1e-12,
        atol: 1e-14,
        ..Tolerances::default()
    }
}

fn single_delta() -> PotentialSpec {
    build_potential(
        vec![SegmentDescriptor::new(2.0, f64::INFINITY, Form::Constant(1.0), Form::zero())],
        f64::INFINITY,
    )
    .unwrap()
    .with_description("delta(x0=2)")
}

fn suite() -> Vec<(PotentialSpec, f64)> {
    vec![
        (preset_potential(&Preset::Free).unwrap(), 50.0),
        (single_delta(), 50.0),
        (preset_potential(&Preset::delta_comb()).unwrap(), 50.0),
        (preset_potential(&Preset::coulomb()).unwrap(), 50.0),
        (preset_potential(&Preset::exp_decay()).unwrap(), 50.0),
        (preset_potential(&Preset::GrowingOsc { alpha: 0.5, beta: 3.0 }).unwrap(), 12.0),
    ]
}

fn c1_free_density() -> Outcome {
    let free = preset_potential(&Preset::Free).map_err(err)?;
    let mut worst: f64 = 0.0;
    for &e in &[0.5, 1.0, 2.0, 4.0] {
        for &x in &[5.0, 20.0] {
            let v = carmona_density(&free, BoundaryAngle::DIRICHLET, x, e, DensityVariant::SqrtWeighted, &Tolerances::default())
                .map_err(err)?;
            let exact = f64::sqrt(e) / PI;
            worst = worst.max((v - exact).abs() / exact);
        }
    }
    Ok((worst <= 1e-8, format!("max relative error {worst:.2e}")))
}

fn c2_unimodularity_cocycle() -> Outcome {
    let tol = Tolerances::default();
    let zs = [
        C64::new(1.0, 0.0),
        C64::new(10.0, 0.0),
        C64::new(-10.0, 0.0),
        C64::new(3.0, 4.0),
        C64::new(-6.0, 8.0),
        C64::new(0.0, -10.0),
    ];
    let (mut det_worst, mut drift_worst, mut cocycle_worst) = (0.0f64, 0.0f64, 0.0f64);
    for (pot, span) in suite() {
        for &z in &zs {
            let mid = 0.37 * span;
            let full = transfer(&pot, z, span, 0.0, &tol).map_err(err)?;
            let a = transfer(&pot, z, mid, 0.0, &tol).map_err(err)?;
            let b = transfer(&pot, z, span, mid, &tol).map_err(err)?;
            drift_worst = drift_worst.max(full.det_drift).max(a.det_drift).max(b.det_drift);
            for t in [&full, &a, &b] {
                if t.log_norm() * 2.0 <= 1e6f64.ln() {
                    det_worst = det_worst.max((t.det() - 1.0).norm());
                }
            }
            // compare in the common log scale of the two factors
            let prod = b.normalized() * a.normalized();
            let shift = (full.log_scale() - a.log_scale() - b.log_scale()).exp();
            let defect = (prod - full.normalized().scale_re(shift)).norm() / (a.normalized().norm() * b.normalized().norm());
            cocycle_worst = cocycle_worst.max(defect);
        }
    }
    let pass = det_worst <= 1e-8 && drift_worst <= 1e-8 && cocycle_worst <= 1e-8;
    Ok((
        pass,
        format!("|det-1| {det_worst:.2e} (where |T|^2 <= 1e6), det drift {drift_worst:.2e}, cocycle {cocycle_worst:.2e}"),
    ))
}

fn free_classical(k: f64, h: f64) -> Mat2 {
    let (s, c) = (k * h).sin_cos();
    Mat2::real(c, -k * s, s / k, c)
}

fn c3_kronig_penney() -> Outcome {
    let pot = single_delta();
    let tol = tight();
    let mut worst: f64 = 0.0;
    for &e in &[1.0f64, 4.0] {
        let k = e.sqrt();
        for &x in &[1.5, 2.0, 3.0, 5.0] {
            let t = transfer(&pot, C64::new(e, 0.0), x, 0.0, &tol).map_err(err)?;
            let s = pot.sigma(x).map_err(err)?;
            let to_classical = Mat2::real(1.0, s, 0.0, 1.0);
            let ours = to_classical * t.matrix();
            let classical = if x < 2.0 {
                free_classical(k, x)
            } else {
                free_classical(k, x - 2.0) * Mat2::real(1.0, 1.0, 0.0, 1.0) * free_classical(k, 2.0)
            };
            worst = worst.max((ours - classical).max_abs());
        }
    }
    Ok((worst <= 1e-10, format!("max entry error {worst:.2e}")))
}

fn c4_gauge() -> Outcome {
    let tol = Tolerances::default();
    let theta = Form::ClosedForm(ClosedForm::Sinusoid {
        amplitude: 0.3,
        omega: 1.0,
        phase: 0.0,
    });
    let g = |x: f64| Mat2::real(1.0, theta.eval(x), 0.0, 1.0);
    let mut t_worst: f64 = 0.0;
    let mut d_worst: f64 = 0.0;
    for base in [preset_potential(&Preset::exp_decay()).unwrap(), preset_potential(&Preset::delta_comb()).unwrap()] {
        let gauged = gauge_transform(&base, &theta).map_err(err)?;
        for &z in &[C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(-0.5, 0.3)] {
            for &(x, y) in &[(5.0, 0.0), (7.0, 2.0), (3.3, 1.1)] {
                let t2 = transfer(&base, z, x, y, &tol).map_err(err)?.matrix();
                let t1 = transfer(&gauged, z, x, y, &tol).map_err(err)?.matrix();
                let rhs = g(x) * t1 * g(y).inverse();
                t_worst = t_worst.max((t2 - rhs).max_abs() / t2.max_abs().max(1.0));
            }
        }
        for &a in &[0.0, 0.7, FRAC_PI_2] {
            let alpha1 = BoundaryAngle::new(a);
            let alpha2 = relabel_boundary(alpha1, theta.eval(0.0));
            for &e in &[0.5, 1.0, 2.0] {
                for n in 1..=3 {
                    let x = n as f64 * PI;
                    for variant in [DensityVariant::Standard, DensityVariant::SqrtWeighted] {
                        let d1 = carmona_density(&gauged, alpha1, x, e, variant, &tol).map_err(err)?;
                        let d2 = carmona_density(&base, alpha2, x, e, variant, &tol).map_err(err)?;
                        d_worst = d_worst.max((d1 - d2).abs() / d2.abs());
                    }
                }
            }
        }
    }
    Ok((
        t_worst <= 1e-8 && d_worst <= 1e-6,
        format!("transfer covariance {t_worst:.2e}, density mismatch {d_worst:.2e}"),
    ))
}

fn c5_weyl() -> Outcome {
    let tol = Tolerances::default();
    let free = preset_potential(&Preset::Free).map_err(err)?;
    let m0 = m_function(&free, C64::new(0.0, 1.0), BoundaryAngle::DIRICHLET, 1e-9, 1e3, &tol).map_err(err)?;
    let m_err = (m0.m - C64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm();
    let z = C64::new(2.0, 1.0);
    let mut decreasing = true;
    let mut min_im = f64::INFINITY;
    let mut names = Vec::new();
    for (pot, _) in suite() {
        let mut prev = f64::INFINITY;
        for &x in &[1.0, 2.0, 4.0, 8.0] {
            let d = weyl_disk(&pot, z, x, BoundaryAngle::DIRICHLET, &tol).map_err(err)?;
            if d.radius >= prev || d.radius.is_nan() {
                decreasing = false;
                names.push(pot.description().to_string());
            }
            prev = d.radius;
            min_im = min_im.min(d.center.im);
        }
        let m = m_function(&pot, z, BoundaryAngle::DIRICHLET, 1e-6, 32.0, &tol).map_err(err)?;
        min_im = min_im.min(m.m.im);
    }
    let pass = m_err <= 1e-8 && decreasing && min_im > 0.0;
    Ok((
        pass,
        format!("|m0(i) - (-1+i)/sqrt2| {m_err:.2e}, radii decreasing {decreasing} {names:?}, min Im {min_im:.3e}"),
    ))
}

fn c6_wronskian() -> Outcome {
    let pot = preset_potential(&Preset::delta_comb()).map_err(err)?;
    let z = C64::new(1.0, 0.5);
    let grid: Vec<f64> = (1..=100).map(|j| 0.1 * j as f64).collect();
    let v0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let s = solution_with_l2(&pot, z, v0, 0.0, &grid, &tight()).map_err(err)?;
    let i = C64::new(0.0, 1.0);
    let iw = |u: C64, q: C64| i * (u.conj() * q - q.conj() * u);
    let w0 = iw(v0[1], v0[0]).re;
    let mut prev = w0;
    let mut increasing = true;
    let mut worst: f64 = 0.0;
    let mut max_imag: f64 = 0.0;
    for l in &s {
        let w = iw(l.sample.u, l.sample.u_quasi);
        max_imag = max_imag.max(w.im.abs());
        increasing &= w.re > prev;
        prev = w.re;
        worst = worst.max((w.re - w0 - 2.0 * z.im * l.l2_sq).abs());
    }
    Ok((
        increasing && worst <= 1e-6,
        format!("strictly increasing {increasing}, increment mismatch {worst:.2e}, |Im iW| {max_imag:.1e}"),
    ))
}

fn c7_shortrange() -> Outcome {
    let tol = tight();
    let pot = preset_potential(&Preset::exp_decay()).map_err(err)?;
    let mut worst: f64 = 0.0;
    let mut min_w = f64::INFINITY;
    for &a in &[0.0, FRAC_PI_2] {
        let alpha = BoundaryAngle::new(a);
        for &e in &[0.5, 1.0, 2.0] {
            let w30 = carmona_density(&pot, alpha, 30.0, e, DensityVariant::SqrtWeighted, &tol).map_err(err)?;
            let w60 = carmona_density(&pot, alpha, 60.0, e, DensityVariant::SqrtWeighted, &tol).map_err(err)?;
            let w = shortrange_density(&pot, alpha, e, 1e-12, 200.0, &tol).map_err(err)?;
            worst = worst.max((w60 - w30).abs()).max((w.value - w60).abs());
            min_w = min_w.min(w30).min(w60).min(w.value);
        }
    }
    Ok((
        min_w > 0.0 && worst <= 1e-8,
        format!("min w {min_w:.4}, |w(60) - w(30)| and stopping-rule spread {worst:.2e}"),
    ))
}

fn c8_diagnostics() -> Outcome {
    let tol = Tolerances::default();
    let free = preset_potential(&Preset::Free).map_err(err)?;
    let mut ces = Vec::new();
    for &l in &[25.0, 50.0, 100.0] {
        ces.push(cesaro_average(&free, 1.0, l, &tol).map_err(err)?.value());
    }
    let stolz = simon_stolz_integral(&free, 1.0, 100.0, &tol).map_err(err)?;
    let report = classify_grid(&free, &[-1.0], &ClassifyParams::default(), &tol).map_err(err)?;
    let tag = report.tags()[0];
    let pass = ces.iter().all(|v| (1.0..=2.0).contains(v)) && stolz >= 50.0 && tag == SpectralTag::NotAc;
    Ok((pass, format!("Cesaro {ces:.4?}, Simon-Stolz {stolz:.3}, E=-1 tag {}", tag.name())))
}

fn c9_one_bump() -> Outcome {
    let p = std::sync::Arc::new(delta_decomposition(1.0).map_err(err)?);
    let (d, k, n) = (0.05, 1.0, 256);
    let bump = bump_potential(&p, d).map_err(err)?;
    let tol = tight();
    let mut mean = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let th = TAU * i as f64 / n as f64;
        let got = prufer_flow(&bump, k, th, 0.0, 2.0, &tol).map_err(err)?.last().unwrap().log_r;
        let pred = increment_predictor(&p, d, k, th + k);
        mean += (got - pred.x_ring) / n as f64;
        worst = worst.max((got - pred.total()).abs());
    }
    let limit = 5.0 * d * d * d;
    Ok((
        mean.abs() <= limit && worst <= limit,
        format!("|mean dlogR - drift| {:.2e}, worst triple residual {worst:.2e}, limit {limit:.2e}", mean.abs()),
    ))
}

struct SparseFixture {
    ac_band: f64,
    band: (f64, f64),
    growth: f64,
    margin: f64,
    k_points: usize,
    n_max: usize,
}

fn fixture() -> Result<SparseFixture, String> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/sparse_manifest.json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).map_err(err)?).map_err(err)?;
    let num = |p: &str| v.pointer(p).and_then(Value::as_f64).ok_or_else(|| format!("fixture lacks {p}"));
    Ok(SparseFixture {
        ac_band: num("/thresholds/ac_band")?,
        band: (num("/thresholds/tracking_band/0")?, num("/thresholds/tracking_band/1")?),
        growth: num("/thresholds/growth_factor_acceptance")?,
        margin: num("/config/margin")?,
        k_points: num("/config/k_points")? as usize,
        n_max: num("/config/n_max")? as usize,
    })
}

fn sparse_run(fx: &SparseFixture, exponent: f64) -> Result<Vec<(f64, f64)>, String> {
    let mut cfg = SparseConfig::new(
        delta_decomposition(1.0).map_err(err)?,
        DRule::Power { exponent, scale: 1.0 },
        XRule::Factorial { c: 10 },
        fx.n_max,
    );
    cfg.k_points = fx.k_points;
    cfg.margin = fx.margin;
    cfg.k_window = (0.7, 1.3);
    let t = transition_experiment(&cfg).map_err(err)?;
    if t.k_grid.len() != fx.k_points {
        return Err(format!("k grid has {} points", t.k_grid.len()));
    }
    Ok(t.rows.iter().map(|r| (r.y_mean, r.drift_cum)).collect())
}

fn c10a_sparse_l2() -> Outcome {
    let fx = fixture()?;
    let rows = sparse_run(&fx, 1.0)?;
    let tail = &rows[9..20];
    let hi = tail.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    Ok((
        hi - lo <= fx.ac_band,
        format!("max - min of Y over n in [10, 20] = {:.4e}, B_ac = {}", hi - lo, fx.ac_band),
    ))
}

fn c10b_sparse_non_l2() -> Result<(bool, bool, String), String> {
    let fx = fixture()?;
    let rows = sparse_run(&fx, 0.5)?;
    let (y10, y20, drift20) = (rows[9].0, rows[19].0, rows[19].1);
    let growth = y20 >= fx.growth * y10;
    let r = y20 / drift20;
    let tracking = r >= fx.band.0 && r <= fx.band.1;
    Ok((
        growth,
        tracking,
        format!(
            "Y20/Y10 = {:.4} (needs >= {}): {}; Y20/sum X_ring = {r:.4} in [{}, {}]: {}",
            y20 / y10,
            fx.growth,
            if growth { "ok" } else { "not met" },
            fx.band.0,
            fx.band.1,
            if tracking { "ok" } else { "not met" },
        ),
    ))
}

fn c11_k_derivatives() -> Outcome {
    let pot = preset_potential(&Preset::delta_comb()).map_err(err)?;
    let tol = tight();
    let (k, dk) = (1.0, 1e-4);
    let run = |k: f64| prufer_flow_with_k_derivatives(&pot, k, 0.3, 0.0, 3.0, &tol);
    let (m, c, p) = (run(k - dk).map_err(err)?, run(k).map_err(err)?, run(k + dk).map_err(err)?);
    let mut worst: f64 = 0.0;
    for ((a, b), s) in m.iter().zip(&p).zip(&c) {
        let fd_th = (b.theta_f64() - a.theta_f64()) / (2.0 * dk);
        let fd_lr = (b.log_r - a.log_r) / (2.0 * dk);
        worst = worst
            .max((fd_th - s.dtheta_dk.unwrap()).abs())
            .max((fd_lr - s.dlogr_dk.unwrap()).abs());
    }
    Ok((worst <= 1e-5, format!("max derivative mismatch {worst:.2e} over {} points on [0, 3]", c.len())))
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let cfg = dir.path().join("density.toml");
    std::fs::write(
        &cfg,
        "[potential]\npreset = { name = \"exp_decay\" }\n\n[density]\nenergies = { range = [0.1, 6.4], points = 64 }\nx = 12.0\nalpha = 0.4\n",
    )
    .map_err(err)?;
    let mut bodies = Vec::new();
    for (run, workers) in [(0, "1"), (1, "1"), (2, "4"), (3, "4")] {
        let out = dir.path().join(format!("run{run}"));
        let o = std::process::Command::new(env!("CARGO_BIN_EXE_h1spec"))
            .args(["density", "--config", cfg.to_str().unwrap(), "--workers", workers, "--out", out.to_str().unwrap()])
            .output()
            .map_err(err)?;
        if !o.status.success() {
            return Err(String::from_utf8_lossy(&o.stderr).into_owned());
        }
        bodies.push(std::fs::read(out.join("density.csv")).map_err(err)?);
    }
    let same = bodies.windows(2).all(|w| w[0] == w[1]);
    Ok((same, format!("4 runs (workers 1, 1, 4, 4), {} bytes each, identical {same}", bodies[0].len())))
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("1", "free Carmona density", c1_free_density),
        ("2", "unimodularity and cocycle", c2_unimodularity_cocycle),
        ("3", "Kronig-Penney cross-check", c3_kronig_penney),
        ("4", "gauge covariance", c4_gauge),
        ("5", "Weyl machinery", c5_weyl),
        ("6", "Wronskian monotonicity", c6_wronskian),
        ("7", "short-range density", c7_shortrange),
        ("8", "spectral-type diagnostics", c8_diagnostics),
        ("9", "one-bump drift oracle", c9_one_bump),
        ("10a", "sparse transition, l2 couplings", c10a_sparse_l2),
    ];
    let mut results: Vec<(String, bool)> = Vec::new();
    let mut report = |id: &str, name: &str, pass: bool, detail: &str, secs: f64| {
        let tag = if pass { "PASS" } else { "FAIL" };
        let known = if !pass && KNOWN_UNATTAINABLE.contains(&id) { " [known unattainable]" } else { "" };
        println!("criterion {id:>3} {tag}{known}  {name}: {detail} ({secs:.1}s)");
        results.push((id.to_string(), pass));
    };
    for (id, name, f) in criteria {
        let t = Instant::now();
        match f() {
            Ok((pass, detail)) => report(id, name, pass, &detail, t.elapsed().as_secs_f64()),
            Err(e) => report(id, name, false, &format!("error: {e}"), t.elapsed().as_secs_f64()),
        }
    }
    let t = Instant::now();
    let mut tracking_ok = false;
    match c10b_sparse_non_l2() {
        Ok((growth, tracking, detail)) => {
            tracking_ok = tracking;
            report("10b", "sparse transition, non-l2 couplings", growth && tracking, &detail, t.elapsed().as_secs_f64())
        }
        Err(e) => report("10b", "sparse transition, non-l2 couplings", false, &format!("error: {e}"), 0.0),
    }
    for (id, name, f) in [
        ("11", "k-derivative correctness", c11_k_derivatives as fn() -> Outcome),
        ("12", "determinism", c12_determinism),
    ] {
        let t = Instant::now();
        match f() {
            Ok((pass, detail)) => report(id, name, pass, &detail, t.elapsed().as_secs_f64()),
            Err(e) => report(id, name, false, &format!("error: {e}"), t.elapsed().as_secs_f64()),
        }
    }
    let unexpected: Vec<&str> = results
        .iter()
        .filter(|(id, pass)| !pass && !KNOWN_UNATTAINABLE.contains(&id.as_str()))
        .map(|(id, _)| id.as_str())
        .collect();
    let passed = results.iter().filter(|r| r.1).count();
    println!("acceptance: {passed}/{} passed; known unattainable: {KNOWN_UNATTAINABLE:?}", results.len());
    if !tracking_ok {
        println!("acceptance: FAIL, the tracking half of 10b must hold");
        return ExitCode::FAILURE;
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAIL, unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
