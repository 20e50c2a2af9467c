//! TOML experiment descriptions.

use crate::error::{CliError, CliResult};
use h1spec_core::potential::{delta_decomposition, Table};
use h1spec_core::sparse::{DRule, XRule};
use h1spec_core::spectral::ClassifyParams;
use h1spec_core::{
    build_potential, preset_potential, BoundaryAngle, ClosedForm, Form, PotentialSpec, Preset,
    Profile, SegmentDescriptor, Shape, Tolerances, TransitionThresholds,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub potential: Option<PotentialConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub transfer: Option<TransferSection>,
    pub prufer: Option<PruferSection>,
    pub mfun: Option<MfunSection>,
    pub density: Option<DensitySection>,
    pub classify: Option<ClassifySection>,
    pub shortrange: Option<ShortrangeSection>,
    pub sparse: Option<SparseSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub preset: Option<Preset>,
    pub segments: Option<Vec<SegmentConfig>>,
    /// Right end of the covered range; unbounded when absent.
    pub x_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub start: f64,
    pub end: Option<f64>,
    #[serde(default)]
    pub sigma: FormConfig,
    #[serde(default)]
    pub tau: FormConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormConfig {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    Exp {
        amplitude: f64,
        rate: f64,
    },
    Sinusoid {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    Power {
        x0: f64,
        amplitude: f64,
        exponent: f64,
    },
    Log {
        x0: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Table {
        xs: Vec<f64>,
        values: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

/// Energies as an explicit list or as `points` equally spaced values on `range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyGrid {
    pub values: Option<Vec<f64>>,
    pub range: Option<[f64; 2]>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferSection {
    /// Spectral parameters `[re, im]`.
    pub z: Vec<[f64; 2]>,
    pub x: f64,
    #[serde(default)]
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PruferSection {
    pub k: Vec<f64>,
    #[serde(default)]
    pub theta0: f64,
    #[serde(default)]
    pub x_from: f64,
    /// Sample points, sorted, at or after `x_from`.
    pub x: Vec<f64>,
    #[serde(default)]
    pub k_derivatives: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfunSection {
    pub z: Vec<[f64; 2]>,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_radius_tol")]
    pub radius_tol: f64,
    #[serde(default = "default_mfun_x_max")]
    pub x_max: f64,
}

fn default_radius_tol() -> f64 {
    1e-8
}
fn default_mfun_x_max() -> f64 {
    1e4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantConfig {
    Standard,
    SqrtWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub energies: EnergyGrid,
    pub x: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_variant")]
    pub variant: VariantConfig,
}

fn default_variant() -> VariantConfig {
    VariantConfig::SqrtWeighted
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    pub energies: EnergyGrid,
    #[serde(default)]
    pub params: ClassifyParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortrangeSection {
    pub energies: EnergyGrid,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_increment_tol")]
    pub increment_tol: f64,
    #[serde(default = "default_shortrange_x_max")]
    pub x_max: f64,
}

fn default_increment_tol() -> f64 {
    1e-10
}
fn default_shortrange_x_max() -> f64 {
    500.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    /// `S' + T = δ` on `[−Δ, Δ]`.
    Delta {
        #[serde(default = "one")]
        half_width: f64,
    },
    Custom {
        half_width: f64,
        s: Shape,
        t: Shape,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseSection {
    pub profile: ProfileConfig,
    #[serde(default)]
    pub profile_perturbation: f64,
    pub d_rule: DRule,
    pub x_rule: XRule,
    pub n_max: usize,
    #[serde(default = "default_k_window")]
    pub k_window: [f64; 2],
    #[serde(default = "default_k_points")]
    pub k_points: usize,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub thresholds: TransitionThresholds,
}

fn default_k_window() -> [f64; 2] {
    [0.7, 1.3]
}
fn default_k_points() -> usize {
    200
}
fn default_margin() -> f64 {
    0.01
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Parses TOML text. Syntax errors, type errors and unknown keys are parse errors.
pub fn parse_config_str(src: &str) -> CliResult<Config> {
    let cfg: Config = toml::from_str(src).map_err(|e| CliError::Parse {
        line: e.span().map(|s| line_of(src, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> CliResult<Config> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&src)
}

fn require(cond: bool, field: &str, message: &str) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::validation(field, message))
    }
}

fn finite(v: f64) -> bool {
    v.is_finite()
}

impl Config {
    /// SHA-256 of the canonical JSON form (sorted keys, defaults filled in).
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_value(self).expect("config serializes");
        format!("{:x}", Sha256::digest(canonical.to_string().as_bytes()))
    }

    fn validate(&self) -> CliResult<()> {
        let t = &self.tolerances;
        for (name, v) in [("rtol", t.rtol), ("atol", t.atol), ("det_tol", t.det_tol), ("chunk", t.chunk)] {
            require(v > 0.0 && finite(v), &format!("tolerances.{name}"), "must be positive and finite")?;
        }
        if self.potential.is_some() {
            self.build_potential()?;
        }
        if let Some(s) = &self.transfer {
            require(!s.z.is_empty(), "transfer.z", "needs at least one point")?;
            require(s.z.iter().flatten().all(|v| finite(*v)), "transfer.z", "entries must be finite")?;
            require(s.x >= 0.0 && finite(s.x), "transfer.x", "must be finite and nonnegative")?;
            require(s.y >= 0.0 && finite(s.y), "transfer.y", "must be finite and nonnegative")?;
        }
        if let Some(s) = &self.prufer {
            require(!s.k.is_empty() && s.k.iter().all(|k| *k > 0.0 && finite(*k)), "prufer.k", "needs positive finite values")?;
            require(s.x_from >= 0.0 && finite(s.x_from), "prufer.x_from", "must be finite and nonnegative")?;
            require(
                !s.x.is_empty() && s.x.windows(2).all(|w| w[0] <= w[1]) && s.x[0] >= s.x_from && s.x.iter().all(|v| finite(*v)),
                "prufer.x",
                "must be sorted, finite and start at or after x_from",
            )?;
        }
        if let Some(s) = &self.mfun {
            require(!s.z.is_empty(), "mfun.z", "needs at least one point")?;
            require(s.z.iter().all(|z| z[1] > 0.0 && finite(z[0]) && finite(z[1])), "mfun.z", "points must lie in the upper half-plane")?;
            require(s.radius_tol > 0.0, "mfun.radius_tol", "must be positive")?;
            require(s.x_max > 0.0, "mfun.x_max", "must be positive")?;
        }
        if let Some(s) = &self.density {
            let e = s.energies.resolve("density.energies")?;
            require(s.x >= 0.0 && finite(s.x), "density.x", "must be finite and nonnegative")?;
            if s.variant == VariantConfig::SqrtWeighted {
                require(e.iter().all(|v| *v > 0.0), "density.energies", "sqrt_weighted needs E > 0")?;
            }
        }
        if let Some(s) = &self.classify {
            s.energies.resolve("classify.energies")?;
            let p = &s.params;
            require(p.l0 > 0.0 && finite(p.l0), "classify.params.l0", "must be positive")?;
            require(p.ratio_max > 1.0, "classify.params.ratio_max", "must exceed 1")?;
            require(p.cesaro_cap > 0.0, "classify.params.cesaro_cap", "must be positive")?;
            require(p.blowup_threshold > 0.0, "classify.params.blowup_threshold", "must be positive")?;
        }
        if let Some(s) = &self.shortrange {
            let e = s.energies.resolve("shortrange.energies")?;
            require(e.iter().all(|v| *v > 0.0), "shortrange.energies", "needs E > 0")?;
            require(s.increment_tol > 0.0, "shortrange.increment_tol", "must be positive")?;
            require(s.x_max > 0.0 && finite(s.x_max), "shortrange.x_max", "must be positive and finite")?;
        }
        if let Some(s) = &self.sparse {
            s.validate()?;
        }
        Ok(())
    }

    pub fn build_potential(&self) -> CliResult<PotentialSpec> {
        let p = self
            .potential
            .as_ref()
            .ok_or_else(|| CliError::validation("potential", "section is required for this command"))?;
        let x_max = p.x_max.unwrap_or(f64::INFINITY);
        let pot = match (&p.preset, &p.segments) {
            (Some(preset), None) => {
                require(p.x_max.is_none(), "potential.x_max", "presets cover the whole half-line")?;
                preset_potential(preset).map_err(|e| CliError::validation("potential.preset", e.to_string()))?
            }
            (None, Some(segs)) => {
                let descs = segs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let f = |fc: &FormConfig, part: &str| {
                            fc.to_form().map_err(|m| CliError::validation(format!("potential.segments[{i}].{part}"), m))
                        };
                        Ok(SegmentDescriptor::new(s.start, s.end.unwrap_or(x_max), f(&s.sigma, "sigma")?, f(&s.tau, "tau")?))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                build_potential(descs, x_max).map_err(|e| CliError::validation("potential.segments", e.to_string()))?
            }
            _ => return Err(CliError::validation("potential", "give exactly one of `preset` or `segments`")),
        };
        Ok(pot)
    }
}

impl FormConfig {
    fn to_form(&self) -> Result<Form, String> {
        Ok(match self {
            FormConfig::Zero => Form::zero(),
            FormConfig::Constant { value } => Form::Constant(*value),
            FormConfig::Exp { amplitude, rate } => Form::ClosedForm(ClosedForm::Exp {
                amplitude: *amplitude,
                rate: *rate,
            }),
            FormConfig::Sinusoid { amplitude, omega, phase } => Form::ClosedForm(ClosedForm::Sinusoid {
                amplitude: *amplitude,
                omega: *omega,
                phase: *phase,
            }),
            FormConfig::Power { x0, amplitude, exponent } => Form::ClosedForm(ClosedForm::Power {
                x0: *x0,
                amplitude: *amplitude,
                exponent: *exponent,
            }),
            FormConfig::Log { x0, scale } => Form::LogSingularity { x0: *x0, scale: *scale },
            FormConfig::Table { xs, values } => Form::SampledTable(Table::new(xs, values).map_err(|e| e.to_string())?),
        })
    }
}

impl EnergyGrid {
    pub fn resolve(&self, field: &str) -> CliResult<Vec<f64>> {
        let e = match (&self.values, self.range, self.points) {
            (Some(v), None, None) => v.clone(),
            (None, Some([a, b]), Some(n)) => {
                require(n >= 1, &format!("{field}.points"), "must be at least 1")?;
                require(a <= b, &format!("{field}.range"), "must be increasing")?;
                if n == 1 {
                    vec![a]
                } else {
                    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
                }
            }
            _ => return Err(CliError::validation(field, "give either `values` or both `range` and `points`")),
        };
        require(e.iter().all(|v| finite(*v)), field, "energies must be finite")?;
        require(e.windows(2).all(|w| w[0] <= w[1]), field, "energies must be sorted")?;
        Ok(e)
    }
}

impl SparseSection {
    pub fn build_profile(&self) -> CliResult<Profile> {
        match &self.profile {
            ProfileConfig::Delta { half_width } => delta_decomposition(*half_width),
            ProfileConfig::Custom { half_width, s, t } => Profile::new(*half_width, s.clone(), t.clone(), "custom"),
        }
        .map_err(|e| CliError::validation("sparse.profile", e.to_string()))
    }

    fn validate(&self) -> CliResult<()> {
        let profile = self.build_profile()?;
        require(self.n_max >= 1, "sparse.n_max", "must be at least 1")?;
        require(self.k_points >= 1, "sparse.k_points", "must be at least 1")?;
        let [k1, k2] = self.k_window;
        require(k1 > 0.0 && k1 < k2 && finite(k2), "sparse.k_window", "needs 0 < k1 < k2")?;
        require(self.margin >= 0.0 && finite(self.margin), "sparse.margin", "must be finite and nonnegative")?;
        require(self.profile_perturbation.abs() < 1.0, "sparse.profile_perturbation", "must lie in (-1, 1)")?;
        let th = &self.thresholds;
        require(th.growth_factor > 0.0, "sparse.thresholds.growth_factor", "must be positive")?;
        require(th.band.0 <= th.band.1, "sparse.thresholds.band", "must be an increasing pair")?;
        require(th.ac_band >= 0.0, "sparse.thresholds.ac_band", "must be nonnegative")?;
        let x1 = self
            .x_rule
            .position(1)
            .map_err(|e| CliError::validation("sparse.x_rule", e.to_string()))?;
        let delta = profile.half_width();
        require(
            x1.approx() > delta,
            "sparse.x_rule",
            &format!("first bump centre x_1 = {x1} must exceed the profile half-width Δ = {delta} (x_1 > Δ)"),
        )?;
        Ok(())
    }

    pub fn alpha(&self) -> BoundaryAngle {
        BoundaryAngle::new(self.alpha)
    }
}
