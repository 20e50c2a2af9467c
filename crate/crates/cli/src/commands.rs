use crate::check::run_checks;
use crate::config::{Config, VariantConfig};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, write_outputs, RunManifest, Table};
use h1spec_core::prufer::prufer_samples;
use h1spec_core::sparse::{SparseConfig, PHASE_TOL};
use h1spec_core::spectral::{carmona_densities, classify_grid, shortrange_density};
use h1spec_core::weyl::m_function;
use h1spec_core::{transfer, BoundaryAngle, DensityVariant, PruferState, C64};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Transfer,
    Prufer,
    Mfun,
    Density,
    Classify,
    Shortrange,
    Sparse,
    Check,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Transfer,
        Command::Prufer,
        Command::Mfun,
        Command::Density,
        Command::Classify,
        Command::Shortrange,
        Command::Sparse,
        Command::Check,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Transfer => "transfer",
            Command::Prufer => "prufer",
            Command::Mfun => "mfun",
            Command::Density => "density",
            Command::Classify => "classify",
            Command::Shortrange => "shortrange",
            Command::Sparse => "sparse",
            Command::Check => "check",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

struct Outcome {
    table: Table,
    thresholds: Value,
    summary: Value,
    failure: Option<CliError>,
}

impl Outcome {
    fn plain(table: Table) -> Self {
        Outcome {
            table,
            thresholds: Value::Null,
            summary: Value::Null,
            failure: None,
        }
    }
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> CliResult<&'a T> {
    s.as_ref()
        .ok_or_else(|| CliError::validation(name, "section is required for this command"))
}

fn f(v: f64) -> String {
    fmt_f64(v)
}

/// Runs one command on a thread pool with `workers` threads and writes
/// `<out>/<command>.csv` plus its manifest. A failing `check` still writes
/// its table before returning the error.
pub fn run(command: Command, config: &Config, workers: usize, out: &Path) -> CliResult<PathBuf> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    let outcome = pool.install(|| execute(command, config))?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        config_digest: config.digest(),
        command: command.name().to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        tolerances: serde_json::to_value(config.tolerances).expect("tolerances serialize"),
        thresholds: outcome.thresholds,
        workers,
        output: format!("{}.csv", command.name()),
        summary: outcome.summary,
    };
    let path = write_outputs(out, command.name(), &outcome.table, &manifest)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(path),
    }
}

fn execute(command: Command, cfg: &Config) -> CliResult<Outcome> {
    let tol = cfg.tolerances;
    match command {
        Command::Transfer => {
            let s = section(&cfg.transfer, "transfer")?;
            let pot = cfg.build_potential()?;
            let rows = s
                .z
                .par_iter()
                .map(|&[re, im]| {
                    let t = transfer(&pot, C64::new(re, im), s.x, s.y, &tol).map_err(|e| CliError::from_core("transfer", e))?;
                    let n = t.normalized();
                    let mut row = vec![f(re), f(im), f(s.y), f(s.x), f(t.log_scale())];
                    for c in [n.a, n.b, n.c, n.d] {
                        row.push(f(c.re));
                        row.push(f(c.im));
                    }
                    row.push(f(t.det_drift));
                    Ok(row)
                })
                .collect::<CliResult<Vec<_>>>()?;
            let mut table = Table::new(vec![
                "z_re", "z_im", "y", "x", "log_scale", "n11_re", "n11_im", "n12_re", "n12_im", "n21_re", "n21_im",
                "n22_re", "n22_im", "det_drift",
            ]);
            rows.into_iter().for_each(|r| table.push(r));
            Ok(Outcome::plain(table))
        }
        Command::Prufer => {
            let s = section(&cfg.prufer, "prufer")?;
            let pot = cfg.build_potential()?;
            let per_k = s
                .k
                .par_iter()
                .map(|&k| {
                    let mut st = PruferState::new(s.x_from, s.theta0, 0.0, k);
                    if s.k_derivatives {
                        st = st.with_derivatives();
                    }
                    prufer_samples(&pot, &st, &s.x, &tol).map_err(|e| CliError::from_core("prufer", e))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
            let mut table = Table::new(vec!["k", "x", "theta", "log_r", "dtheta_dk", "dlogr_dk"]);
            for states in per_k {
                for st in states {
                    table.push(vec![
                        f(st.k),
                        f(st.x),
                        f(st.theta_f64()),
                        f(st.log_r),
                        opt(st.dtheta_dk),
                        opt(st.dlogr_dk),
                    ]);
                }
            }
            Ok(Outcome::plain(table))
        }
        Command::Mfun => {
            let s = section(&cfg.mfun, "mfun")?;
            let pot = cfg.build_potential()?;
            let alpha = BoundaryAngle::new(s.alpha);
            let rows = s
                .z
                .par_iter()
                .map(|&[re, im]| {
                    let r = m_function(&pot, C64::new(re, im), alpha, s.radius_tol, s.x_max, &tol)
                        .map_err(|e| CliError::from_core("mfun", e))?;
                    Ok(vec![
                        f(re),
                        f(im),
                        f(alpha.value()),
                        f(r.m.re),
                        f(r.m.im),
                        f(r.x_used),
                        f(r.radius_at_stop),
                    ])
                })
                .collect::<CliResult<Vec<_>>>()?;
            let mut table = Table::new(vec!["z_re", "z_im", "alpha", "m_re", "m_im", "x_used", "radius"]);
            rows.into_iter().for_each(|r| table.push(r));
            Ok(Outcome {
                thresholds: json!({ "radius_tol": s.radius_tol, "x_max": s.x_max }),
                ..Outcome::plain(table)
            })
        }
        Command::Density => {
            let s = section(&cfg.density, "density")?;
            let pot = cfg.build_potential()?;
            let energies = s.energies.resolve("density.energies")?;
            let variant = match s.variant {
                VariantConfig::Standard => DensityVariant::Standard,
                VariantConfig::SqrtWeighted => DensityVariant::SqrtWeighted,
            };
            let alpha = BoundaryAngle::new(s.alpha);
            let d = carmona_densities(&pot, alpha, s.x, &energies, variant, &tol)
                .map_err(|e| CliError::from_core("density", e))?;
            let mut table = Table::new(vec!["E", "value", "x", "alpha", "variant"]);
            for (e, v) in d.energies.iter().zip(&d.values) {
                table.push(vec![f(*e), f(*v), f(d.x), f(alpha.value()), variant.name().to_string()]);
            }
            Ok(Outcome::plain(table))
        }
        Command::Classify => {
            let s = section(&cfg.classify, "classify")?;
            let pot = cfg.build_potential()?;
            let energies = s.energies.resolve("classify.energies")?;
            let report = classify_grid(&pot, &energies, &s.params, &tol).map_err(|e| CliError::from_core("classify", e))?;
            let mut table = Table::new(vec![
                "E",
                "log_cesaro_l0",
                "log_cesaro_2l0",
                "log_cesaro_4l0",
                "simon_stolz",
                "max_window_log_norm",
                "tag",
            ]);
            for en in &report.entries {
                let w = en.window_log_norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                table.push(vec![
                    f(en.e),
                    f(en.cesaro[0].ln),
                    f(en.cesaro[1].ln),
                    f(en.cesaro[2].ln),
                    f(en.simon_stolz),
                    f(w),
                    en.tag.name().to_string(),
                ]);
            }
            Ok(Outcome {
                thresholds: serde_json::to_value(&s.params).expect("params serialize"),
                ..Outcome::plain(table)
            })
        }
        Command::Shortrange => {
            let s = section(&cfg.shortrange, "shortrange")?;
            let pot = cfg.build_potential()?;
            let energies = s.energies.resolve("shortrange.energies")?;
            let alpha = BoundaryAngle::new(s.alpha);
            let rows = energies
                .par_iter()
                .map(|&e| {
                    let r = shortrange_density(&pot, alpha, e, s.increment_tol, s.x_max, &tol)
                        .map_err(|err| CliError::from_core("shortrange", err))?;
                    Ok(vec![f(e), f(alpha.value()), f(r.value), f(r.x_stop)])
                })
                .collect::<CliResult<Vec<_>>>()?;
            let mut table = Table::new(vec!["E", "alpha", "value", "x_stop"]);
            rows.into_iter().for_each(|r| table.push(r));
            Ok(Outcome {
                thresholds: json!({ "increment_tol": s.increment_tol, "x_max": s.x_max }),
                ..Outcome::plain(table)
            })
        }
        Command::Sparse => {
            let s = section(&cfg.sparse, "sparse")?;
            let config = SparseConfig {
                profile: Arc::new(s.build_profile()?),
                profile_perturbation: s.profile_perturbation,
                d_rule: s.d_rule.clone(),
                x_rule: s.x_rule.clone(),
                n_max: s.n_max,
                k_window: (s.k_window[0], s.k_window[1]),
                k_points: s.k_points,
                margin: s.margin,
                alpha: s.alpha(),
                thresholds: s.thresholds,
                tol,
            };
            let trace = h1spec_core::sparse::transition_experiment(&config).map_err(|e| CliError::from_core("sparse", e))?;
            let mut table = Table::new(vec!["n", "x_n", "d_n", "Y_mean", "Y_q10", "Y_q90", "drift_cum", "residual"]);
            for r in &trace.rows {
                table.push(vec![
                    r.n.to_string(),
                    r.x_n.to_string(),
                    f(r.d_n),
                    f(r.y_mean),
                    f(r.y_q10),
                    f(r.y_q90),
                    f(r.drift_cum),
                    f(r.residual),
                ]);
            }
            let per_bump = trace.rows.iter().map(|r| r.per_bump_ratio).fold(0.0, f64::max);
            let reduction = trace.traces.iter().map(|t| t.reduction_error).fold(0.0, f64::max);
            Ok(Outcome {
                thresholds: json!({
                    "growth_factor": s.thresholds.growth_factor,
                    "band": [s.thresholds.band.0, s.thresholds.band.1],
                    "ac_band": s.thresholds.ac_band,
                    "phase_tol": PHASE_TOL,
                }),
                summary: json!({
                    "classification": trace.classification.name(),
                    "admissible_intervals": trace.intervals,
                    "k_points": trace.k_grid.len(),
                    "per_bump_constant": per_bump,
                    "max_phase_reduction_error": reduction,
                }),
                ..Outcome::plain(table)
            })
        }
        Command::Check => {
            let results = run_checks(&tol);
            let mut table = Table::new(vec!["check", "value", "limit", "status"]);
            let mut failed = Vec::new();
            for r in &results {
                if !r.pass {
                    failed.push(r.name.to_string());
                }
                table.push(vec![
                    r.name.to_string(),
                    f(r.value),
                    f(r.limit),
                    if r.pass { "PASS" } else { "FAIL" }.to_string(),
                ]);
            }
            let summary = json!({ "checks": results.len(), "failed": failed });
            Ok(Outcome {
                table,
                thresholds: Value::Null,
                summary,
                failure: (!failed.is_empty()).then_some(CliError::CheckFailed { failed }),
            })
        }
    }
}

