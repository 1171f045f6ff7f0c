use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};
use timeopt_core::control::{ControlProblem, SolverSettings, VerifyTolerances};
use timeopt_core::homogenize::{CellPreset, EpsilonFamily, FamilySpec, ReactionPreset};
use timeopt_core::presets::PsiPreset;
use timeopt_core::spectral::{ControlMask, DiscreteOperator, Mesh1D};
use timeopt_core::sweep::SweepConfig;

/// Marks an error as caused by the configuration or command line (exit 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl fmt::Display) -> anyhow::Error {
    anyhow::Error::new(ConfigError(msg.to_string()))
}

pub const DEFAULT_OUTPUT_DIR: &str = "timeopt-out";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemBlock,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub verify: VerifyTolerances,
    #[serde(default)]
    pub norm: NormBlock,
    #[serde(default)]
    pub time: TimeBlock,
    #[serde(default)]
    pub curve: CurveBlock,
    #[serde(default)]
    pub sweep: SweepBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    #[serde(default = "default_n_interior")]
    pub n_interior: usize,
    /// Retained eigenpairs; all of them when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_modes: Option<usize>,
    #[serde(default = "default_omega")]
    pub omega: [f64; 2],
    pub r: f64,
    /// Simpson nodes per horizon.
    #[serde(default = "default_n_t")]
    pub n_t: usize,
    pub operator: OperatorSpec,
    pub psi: PsiPreset,
}

/// The elliptic operator, by preset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// Prescribed eigenvalues on the discrete sine modes.
    Modal { eigenvalues: Vec<f64> },
    /// `-(a(x/eps) z')'`; the homogenized coefficient when `epsilon` is absent.
    Diffusion {
        coefficient: CellPreset,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
    },
    /// `-z'' + (base + amplitude eps sin(wavenumber pi x)) z`; `eps = 0` when absent.
    Reaction {
        base: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_u32")]
        wavenumber: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeBlock {
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveBlock {
    #[serde(default)]
    pub tau_list: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            epsilons: default_epsilons(),
            m: None,
            delta: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_output_dir")]
    pub dir: PathBuf,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            dir: default_output_dir(),
        }
    }
}

fn default_n_interior() -> usize {
    255
}

fn default_omega() -> [f64; 2] {
    [0.3, 0.8]
}

fn default_n_t() -> usize {
    201
}

fn default_epsilons() -> Vec<f64> {
    vec![0.25, 0.125, 0.0625, 0.03125]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(DEFAULT_OUTPUT_DIR)
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

/// A parsed configuration plus the keys that were filled from defaults.
#[derive(Debug)]
pub struct Loaded {
    pub config: RunConfig,
    pub defaulted: Vec<String>,
}

/// Strictly parses the TOML file at `path` and checks value ranges.
pub fn load_config(path: &Path) -> anyhow::Result<Loaded> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
    let loaded = parse_config(&text).map_err(|e| config_error(format!("{}: {e:#}", path.display())))?;
    Ok(loaded)
}

pub fn parse_config(text: &str) -> anyhow::Result<Loaded> {
    let raw: toml::Table = toml::from_str(text).map_err(|e| anyhow!("{}", e.to_string().trim_end()))?;
    let config: RunConfig = toml::from_str(text).map_err(|e| anyhow!("{}", e.to_string().trim_end()))?;
    config.validate()?;
    let effective = toml::Table::try_from(&config).context("re-encoding the config")?;
    let mut defaulted = Vec::new();
    collect_defaults(&effective, &raw, "", &mut defaulted);
    Ok(Loaded { config, defaulted })
}

/// `key = value` for every leaf present in `effective` but not in `raw`.
fn collect_defaults(effective: &toml::Table, raw: &toml::Table, prefix: &str, out: &mut Vec<String>) {
    for (key, value) in effective {
        let path = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}.{key}")
        };
        match (value, raw.get(key)) {
            (toml::Value::Table(eff), Some(toml::Value::Table(given))) => {
                collect_defaults(eff, given, &path, out)
            }
            (_, Some(_)) => {}
            (toml::Value::Table(eff), None) => collect_defaults(eff, &toml::Table::new(), &path, out),
            (v, None) => out.push(format!("{path} = {v}")),
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> anyhow::Result<()> {
    if ok {
        Ok(())
    } else {
        Err(anyhow!(msg()))
    }
}

fn positive(name: &str, v: f64) -> anyhow::Result<()> {
    check(v > 0.0 && v.is_finite(), || {
        format!("{name} must be positive and finite, got {v}")
    })
}

impl RunConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        let p = &self.problem;
        check(p.n_interior >= 2, || {
            format!("problem.n_interior must be at least 2, got {}", p.n_interior)
        })?;
        if let Some(k) = p.k_modes {
            check(k >= 1 && k <= p.n_interior, || {
                format!("problem.k_modes must lie in [1, {}], got {k}", p.n_interior)
            })?;
        }
        let [l, r] = p.omega;
        check(0.0 <= l && l < r && r <= 1.0, || {
            format!("problem.omega must satisfy 0 <= left < right <= 1, got [{l}, {r}]")
        })?;
        positive("problem.r", p.r)?;
        check(p.n_t >= 3 && p.n_t % 2 == 1, || {
            format!("problem.n_t must be odd and at least 3, got {}", p.n_t)
        })?;
        match &p.operator {
            OperatorSpec::Modal { eigenvalues } => {
                check(!eigenvalues.is_empty(), || {
                    "problem.operator.eigenvalues is empty".into()
                })?;
                for &l in eigenvalues {
                    positive("problem.operator.eigenvalues entry", l)?;
                }
                check(eigenvalues.len() <= p.n_interior, || {
                    format!(
                        "problem.operator has {} eigenvalues but the mesh has {} interior points",
                        eigenvalues.len(),
                        p.n_interior
                    )
                })?;
            }
            OperatorSpec::Diffusion { epsilon, .. } | OperatorSpec::Reaction { epsilon, .. } => {
                if let Some(e) = epsilon {
                    positive("problem.operator.epsilon", *e)?;
                }
            }
        }
        p.psi.validate().map_err(|e| anyhow!("problem.psi: {e}"))?;
        self.solver.validate().map_err(|e| anyhow!("solver: {e}"))?;
        for (name, v) in [
            ("verify.bang_bang", self.verify.bang_bang),
            ("verify.transversality", self.verify.transversality),
            ("verify.max_principle", self.verify.max_principle),
            ("verify.duality", self.verify.duality),
            ("verify.inverse_relation", self.verify.inverse_relation),
        ] {
            positive(name, v)?;
        }
        if let Some(tau) = self.norm.tau {
            positive("norm.tau", tau)?;
        }
        if let Some(m) = self.time.m {
            positive("time.M", m)?;
        }
        for &tau in &self.curve.tau_list {
            positive("curve.tau_list entry", tau)?;
        }
        for &e in &self.sweep.epsilons {
            positive("sweep.epsilons entry", e)?;
        }
        if let Some(m) = self.sweep.m {
            positive("sweep.M", m)?;
        }
        if let Some(d) = self.sweep.delta {
            positive("sweep.delta", d)?;
        }
        Ok(())
    }

    /// Assembles the control problem described by the `problem` block.
    pub fn build_problem(&self) -> anyhow::Result<ControlProblem<f64>> {
        let p = &self.problem;
        let mesh = Mesh1D::<f64>::new(p.n_interior).map_err(config_error)?;
        let op = match &p.operator {
            OperatorSpec::Modal { eigenvalues } => {
                DiscreteOperator::with_sine_modes(&mesh, eigenvalues.clone())
            }
            spec => {
                let (family, eps) = family_of(spec).expect("non-modal operator");
                let family = EpsilonFamily::new(&family, eps.into_iter().collect()).map_err(config_error)?;
                family.validate_on(&mesh).map_err(config_error)?;
                let field = match eps {
                    Some(e) => family.member_field(e, &mesh),
                    None => family.limit_field(&mesh),
                }
                .map_err(config_error)?;
                DiscreteOperator::assemble(&field, &mesh, p.k_modes)
            }
        }
        .map_err(|e| config_error(format!("problem.operator: {e}")))?;
        let mask = ControlMask::interval(&mesh, p.omega[0], p.omega[1])
            .map_err(|e| config_error(format!("problem.omega: {e}")))?;
        let psi = p
            .psi
            .sample(&mesh)
            .map_err(|e| config_error(format!("problem.psi: {e}")))?;
        ControlProblem::new(op, mask, psi, p.r, p.n_t).map_err(config_error)
    }

    /// The sweep described by the `problem` and `sweep` blocks.
    pub fn sweep_config(&self) -> anyhow::Result<SweepConfig> {
        let p = &self.problem;
        let (family, eps) = family_of(&p.operator)
            .ok_or_else(|| config_error("sweep needs a diffusion or reaction operator, not a modal one"))?;
        if eps.is_some() {
            return Err(config_error(
                "sweep takes its epsilons from sweep.epsilons; remove problem.operator.epsilon",
            ));
        }
        let m = self
            .sweep
            .m
            .ok_or_else(|| config_error("sweep needs a control bound: set sweep.M"))?;
        let config = SweepConfig {
            family,
            epsilons: self.sweep.epsilons.clone(),
            n_interior: p.n_interior,
            k_modes: p.k_modes,
            omega: p.omega,
            psi: p.psi.clone(),
            r: p.r,
            m,
            delta: self.sweep.delta,
            n_t: p.n_t,
            settings: self.solver.clone(),
        };
        config.validate().map_err(config_error)?;
        Ok(config)
    }
}

fn family_of(spec: &OperatorSpec) -> Option<(FamilySpec, Option<f64>)> {
    match spec {
        OperatorSpec::Modal { .. } => None,
        OperatorSpec::Diffusion { coefficient, epsilon } => Some((
            FamilySpec::Diffusion {
                coefficient: coefficient.clone(),
            },
            *epsilon,
        )),
        OperatorSpec::Reaction {
            base,
            amplitude,
            wavenumber,
            epsilon,
        } => Some((
            FamilySpec::Reaction(ReactionPreset {
                base: *base,
                amplitude: *amplitude,
                wavenumber: *wavenumber,
            }),
            *epsilon,
        )),
    }
}
