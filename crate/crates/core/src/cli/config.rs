//! Experiment configuration files (TOML).
//!
//! Every key is optional. Missing model keys fall back to the two-qubit
//! baseline; keys marked `auto` are resolved from the model before a run and
//! the resolved values are what `--print-config` and the CSV headers show.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::transfer_rate_estimate;
use crate::dynamics::{IntegratorConfig, Method};
use crate::hilbert::FockCutoff;
use crate::linalg::{c, C64};
use crate::model::ModelParams;

/// Normalization tolerance for `(alpha, beta)`.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    EnergyTransfer,
    StateTransfer,
    EigenReport,
    Sweep,
    Validate,
}

impl ExperimentKind {
    pub fn default_name(self) -> &'static str {
        match self {
            Self::EnergyTransfer => "energy",
            Self::StateTransfer => "state",
            Self::EigenReport => "eigen",
            Self::Sweep => "sweep",
            Self::Validate => "validate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub detunings: Vec<f64>,
    pub g: f64,
    pub omega_c: f64,
    pub couplings: Vec<f64>,
    pub kappa: f64,
    pub n_max: usize,
    /// Defaults to `true` for four qubits.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paired: Option<bool>,
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = ModelParams::two_qubit_baseline();
        Self {
            detunings: p.detunings,
            g: p.g,
            omega_c: p.omega_c,
            couplings: p.couplings,
            kappa: p.kappa,
            n_max: p.cutoff.n_max(),
            paired: None,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            detunings: self.detunings.clone(),
            g: self.g,
            omega_c: self.omega_c,
            couplings: self.couplings.clone(),
            kappa: self.kappa,
            cutoff: FockCutoff(self.n_max),
            paired: self.paired.unwrap_or(self.detunings.len() == 4),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Adaptive,
    Propagator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    /// `propagator` (exact, default) or `adaptive` (Dormand-Prince).
    pub method: MethodName,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub record_stride: f64,
    /// Length of recorded trajectories; `auto` scales with the estimated
    /// transfer rate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    pub ss_tol: f64,
    /// `auto` scales with the estimated transfer rate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    pub ss_first_step: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            method: MethodName::Propagator,
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_step: d.max_step,
            record_stride: d.record_stride,
            t_final: None,
            ss_tol: d.ss_tol,
            horizon: None,
            ss_first_step: d.ss_first_step,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn level(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// Either explicit qubit labels (cavity in vacuum) or the logical
/// amplitudes of `alpha |up down>_13 + beta |down up>_13` for four qubits.
/// Amplitudes are `[re, im]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Spin>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// `g`, `omega_c`, `kappa`, `n_max`, `detuning.<k>` or `coupling.<k>`
    /// with 1-based qubit `k`.
    pub axis: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSection {
    /// Grid points per axis for the analytic-vs-numeric scans.
    pub grid: usize,
    /// Perturb the Hamiltonian off Hermiticity; every dependent check must fail.
    pub broken_hamiltonian: bool,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self { grid: 10, broken_hamiltonian: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    pub model: ModelSection,
    pub integrator: IntegratorSection,
    pub initial: InitialSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    pub validate: ValidateSection,
    pub output: OutputSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    G,
    OmegaC,
    Kappa,
    NMax,
    /// 0-based qubit index.
    Detuning(usize),
    Coupling(usize),
}

impl Axis {
    pub fn parse(name: &str, n_qubits: usize) -> Result<Self, String> {
        let indexed = |rest: &str| -> Result<usize, String> {
            match rest.parse::<usize>() {
                Ok(k) if (1..=n_qubits).contains(&k) => Ok(k - 1),
                _ => Err(format!("axis '{name}': qubit index must be in 1..={n_qubits}")),
            }
        };
        match name {
            "g" => Ok(Self::G),
            "omega_c" => Ok(Self::OmegaC),
            "kappa" => Ok(Self::Kappa),
            "n_max" => Ok(Self::NMax),
            _ => {
                if let Some(rest) = name.strip_prefix("detuning.") {
                    indexed(rest).map(Self::Detuning)
                } else if let Some(rest) = name.strip_prefix("coupling.") {
                    indexed(rest).map(Self::Coupling)
                } else {
                    Err(format!(
                        "unknown sweep axis '{name}' (expected g, omega_c, kappa, n_max, detuning.<k>, coupling.<k>)"
                    ))
                }
            }
        }
    }

    /// `params` with this axis set to `value`. Paired four-qubit models
    /// move the partner qubit too.
    pub fn apply(self, params: &ModelParams, value: f64) -> Result<ModelParams, String> {
        let mut p = params.clone();
        let partner = |k: usize| if p.paired { Some((k + 2) % 4) } else { None };
        match self {
            Self::G => p.g = value,
            Self::OmegaC => p.omega_c = value,
            Self::Kappa => p.kappa = value,
            Self::NMax => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= 64.0) {
                    return Err(format!("n_max must be an integer in 1..=64, got {value}"));
                }
                p.cutoff = FockCutoff(value as usize);
            }
            Self::Detuning(k) => {
                if let Some(other) = partner(k) {
                    p.detunings[other] = value;
                }
                p.detunings[k] = value;
            }
            Self::Coupling(k) => {
                if let Some(other) = partner(k) {
                    p.couplings[other] = value;
                }
                p.couplings[k] = value;
            }
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// Per-qubit levels; the cavity starts empty.
    Labels(Vec<usize>),
    Logical { alpha: C64, beta: C64 },
}

impl InitialState {
    /// Qubit-level amplitudes `(labels, amplitude)` of the initial ket.
    pub fn components(&self) -> Vec<(Vec<usize>, C64)> {
        match self {
            Self::Labels(labels) => vec![(labels.clone(), c(1.0, 0.0))],
            Self::Logical { alpha, beta } => vec![(vec![0, 1, 1, 1], *alpha), (vec![1, 1, 0, 1], *beta)],
        }
    }
}

/// A configuration with every `auto` field filled in and all checks passed.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub params: ModelParams,
    pub integrator: IntegratorConfig,
    pub t_final: f64,
    pub initial: InitialState,
    pub sweep: Option<(Axis, Vec<f64>)>,
}

impl Resolved {
    /// Output file stem.
    pub fn name(&self) -> &str {
        self.config.output.name.as_deref().unwrap_or(self.kind.default_name())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.config.output.dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    /// TOML of the resolved configuration, including the output section.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.config).expect("configuration serializes")
    }

    /// TOML of the resolved configuration without the output section; this
    /// is what result files embed and hash.
    pub fn echo(&self) -> String {
        let mut cfg = self.config.clone();
        cfg.output = OutputSection::default();
        toml::to_string(&cfg).expect("configuration serializes")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.echo().as_bytes()))
    }
}

pub fn parse(text: &str) -> Result<ExperimentConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}

pub fn load(path: &Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

const FALLBACK_HORIZON: f64 = 1e4;
const MIN_HORIZON: f64 = 100.0;

/// Time to wait for a steady state: 50 estimated transfer times, at least
/// `MIN_HORIZON`.
pub fn auto_horizon(params: &ModelParams) -> f64 {
    match transfer_rate_estimate(params) {
        Ok(rate) if rate > 0.0 && rate.is_finite() => (50.0 / rate).clamp(MIN_HORIZON, 1e7),
        _ => FALLBACK_HORIZON,
    }
}

/// Recorded trajectory length: 10 estimated transfer times.
pub fn auto_t_final(params: &ModelParams, horizon: f64) -> f64 {
    match transfer_rate_estimate(params) {
        Ok(rate) if rate > 0.0 && rate.is_finite() => (10.0 / rate).clamp(1.0, horizon),
        _ => 20.0_f64.min(horizon),
    }
}

/// Check `cfg` for `kind` and fill in every `auto` field.
pub fn resolve(mut cfg: ExperimentConfig, kind: ExperimentKind) -> Result<Resolved, String> {
    if let Some(declared) = cfg.experiment {
        if declared != kind {
            return Err(format!("config declares experiment {declared:?} but {kind:?} was requested"));
        }
    }
    cfg.experiment = Some(kind);
    let n = cfg.model.detunings.len();
    cfg.model.paired = Some(cfg.model.paired.unwrap_or(n == 4));
    let params = cfg.model.params();
    params.validate().map_err(|e| e.to_string())?;

    match kind {
        ExperimentKind::EnergyTransfer if n != 2 => return Err(format!("energy transfer needs 2 qubits, got {n}")),
        ExperimentKind::StateTransfer if n != 4 => return Err(format!("state transfer needs 4 qubits, got {n}")),
        _ => {}
    }

    let initial = resolve_initial(&mut cfg.initial, n)?;

    let sweep = match (kind, &cfg.sweep) {
        (ExperimentKind::Sweep, None) => return Err("sweep needs a [sweep] section".into()),
        (ExperimentKind::Sweep, Some(s)) => {
            if s.values.is_empty() {
                return Err("sweep values are empty".into());
            }
            let axis = Axis::parse(&s.axis, n)?;
            let mut rows = Vec::with_capacity(s.values.len());
            for &v in &s.values {
                if !v.is_finite() {
                    return Err(format!("sweep value {v} is not finite"));
                }
                let p = axis.apply(&params, v)?;
                p.validate().map_err(|e| format!("sweep value {v}: {e}"))?;
                rows.push(p);
            }
            Some((axis, s.values.clone(), rows))
        }
        _ => None,
    };

    let horizon = match cfg.integrator.horizon {
        Some(h) => h,
        None => match &sweep {
            Some((_, _, rows)) => rows.iter().map(auto_horizon).fold(0.0, f64::max),
            None => auto_horizon(&params),
        },
    };
    cfg.integrator.horizon = Some(horizon);
    let t_final = *cfg.integrator.t_final.get_or_insert_with(|| auto_t_final(&params, horizon));

    let s = &cfg.integrator;
    let integrator = IntegratorConfig {
        method: match s.method {
            MethodName::Adaptive => Method::Adaptive,
            MethodName::Propagator => Method::Propagator,
        },
        rel_tol: s.rel_tol,
        abs_tol: s.abs_tol,
        max_step: s.max_step,
        record_stride: s.record_stride,
        keep_states: false,
        ss_tol: s.ss_tol,
        horizon,
        ss_first_step: s.ss_first_step,
    };
    integrator.validate().map_err(|e| e.to_string())?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(format!("t_final must be positive, got {t_final}"));
    }
    if cfg.validate.grid < 2 {
        return Err("validate.grid must be at least 2".into());
    }
    if let Some(name) = &cfg.output.name {
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(format!("output name '{name}' must be a plain file stem"));
        }
    }

    Ok(Resolved {
        kind,
        config: cfg,
        params,
        integrator,
        t_final,
        initial,
        sweep: sweep.map(|(axis, values, _)| (axis, values)),
    })
}

fn resolve_initial(section: &mut InitialSection, n_qubits: usize) -> Result<InitialState, String> {
    let has_amplitudes = section.alpha.is_some() || section.beta.is_some();
    if section.labels.is_some() && has_amplitudes {
        return Err("initial state: give either labels or alpha/beta, not both".into());
    }
    if let Some(labels) = &section.labels {
        if labels.len() != n_qubits {
            return Err(format!("initial state: {} labels for {n_qubits} qubits", labels.len()));
        }
        return Ok(InitialState::Labels(labels.iter().map(|s| s.level()).collect()));
    }
    if n_qubits == 2 {
        if has_amplitudes {
            return Err("initial state: alpha/beta need four qubits".into());
        }
        section.labels = Some(vec![Spin::Up, Spin::Down]);
        return Ok(InitialState::Labels(vec![0, 1]));
    }
    let default = [FRAC_1_SQRT_2, 0.0];
    let alpha = *section.alpha.get_or_insert(default);
    let beta = *section.beta.get_or_insert(default);
    let (alpha, beta) = (c(alpha[0], alpha[1]), c(beta[0], beta[1]));
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if norm.is_nan() || (norm - 1.0).abs() > NORM_TOL {
        return Err(format!("initial state: |alpha|^2 + |beta|^2 = {norm}, expected 1"));
    }
    Ok(InitialState::Logical { alpha, beta })
}
