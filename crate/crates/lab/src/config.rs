//! Experiment configuration: a TOML file, optionally one of the bundled
//! recipes, with `section.key=value` overrides applied on top.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use echolab_core::analysis::ThresholdRule;
use echolab_core::classical::TangentInit;
use echolab_core::maps::ModelKind;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    KickedEcho,
    ClassicalOracle,
    IsingEcho,
    Scan,
    Fit,
    Report,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::KickedEcho => "kicked-echo",
            ExperimentKind::ClassicalOracle => "classical-oracle",
            ExperimentKind::IsingEcho => "ising-echo",
            ExperimentKind::Scan => "scan",
            ExperimentKind::Fit => "fit",
            ExperimentKind::Report => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub classical: ClassicalConfig,
    #[serde(default)]
    pub ising: IsingConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub inputs: InputsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// `sawtooth` or `rotator`.
    pub name: String,
    pub k: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            name: "sawtooth".into(),
            k: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Hilbert-space dimensions.
    pub n: Vec<usize>,
    pub sigma: Vec<f64>,
    /// Kick strengths; empty means `model.k` only.
    pub k: Vec<f64>,
    /// Spin counts.
    pub n_p: Vec<usize>,
    /// Explicit `(λ₀, λ)` pairs.
    pub pairs: Vec<[f64; 2]>,
    /// Each `δλ` adds the pair `(λ_c − δλ, λ_c − 2δλ)`.
    pub delta_lambda: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleConfig {
    pub n_states: usize,
    /// Packet width; absent means the coherent width `√ħ`.
    pub xi: Option<f64>,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_states: echolab_core::maps::EnsembleSpec::DEFAULT_N_STATES,
            xi: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    /// Kicks for the maps.
    pub t_max: usize,
    /// Ising time step; absent means the quench's default step.
    pub dt: Option<f64>,
    /// Ising time points after `t = 0`.
    pub steps: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            t_max: 50,
            dt: None,
            steps: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassicalConfig {
    /// Trajectories for `C(l)`.
    pub n_traj: usize,
    pub length: usize,
    pub l_max: usize,
    pub lyapunov_traj: usize,
    pub lyapunov_steps: usize,
    pub lambda1_traj: usize,
    pub lambda1_steps: usize,
    /// `aligned` or `random`.
    pub tangent_init: String,
    pub burn_in: usize,
    /// `ΔS` samples for the semiclassical reconstruction; 0 skips it.
    pub action_samples: usize,
    /// Hilbert-space dimension that fixes `ħ` for the reconstruction.
    pub action_n: usize,
    pub action_sigma: f64,
    pub action_t_max: usize,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self {
            n_traj: 64,
            length: echolab_core::classical::CORRELATION_TRAJECTORY_LENGTH,
            l_max: 30,
            lyapunov_traj: 64,
            lyapunov_steps: 5000,
            lambda1_traj: 100_000,
            lambda1_steps: 40,
            tangent_init: "aligned".into(),
            burn_in: 32,
            action_samples: 0,
            action_n: 1024,
            action_sigma: 0.5,
            action_t_max: 10,
        }
    }
}

impl ClassicalConfig {
    pub fn tangent(&self) -> LabResult<TangentInit> {
        match self.tangent_init.as_str() {
            "aligned" => Ok(TangentInit::Aligned { burn_in: self.burn_in }),
            "random" => Ok(TangentInit::Random),
            other => Err(config_err(
                "classical.tangent_init",
                format!("expected `aligned` or `random`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IsingConfig {
    /// Automatic `N_p` grid for scans, in units of `1/|λ − λ_c|`.
    pub control_min: f64,
    pub control_max: f64,
    pub control_points: usize,
    /// Time points in the deviation window `[0, 1/(4|λ − λ_c|)]`.
    pub window_points: usize,
    /// Chains at least this long form the reference set of a collapse check.
    pub collapse_min_n_p: usize,
    /// Also run exact diagonalization for chains small enough.
    pub ed_check: bool,
}

impl Default for IsingConfig {
    fn default() -> Self {
        Self {
            control_min: 0.04,
            control_max: 2.0,
            control_points: 48,
            window_points: 200,
            collapse_min_n_p: 100,
            ed_check: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prediction {
    None,
    Fgr,
    Lyapunov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub prediction: Prediction,
    /// Fixed action diffusion constant; absent means the classical oracle.
    pub r: Option<f64>,
    /// The fit window starts where `M` first drops to this level.
    pub onset_level: f64,
    pub onset_min: f64,
    /// Explicit fit window, overriding the onset rule.
    pub window: Option<[f64; 2]>,
    /// Window `[t_on, t_on + window_length]`; absent means
    /// `[t_on, tn_fraction · t_n]`.
    pub window_length: Option<f64>,
    pub tn_fraction: f64,
    pub delta_ln: f64,
    pub w_sustain: usize,
    /// The second stage ends where `M` first drops to `stage_floor / N`.
    pub stage_floor: f64,
    /// `large-plateau`, `small-plateau` or `absolute`.
    pub threshold_rule: String,
    pub threshold_value: Option<f64>,
    /// Least-squares anchoring window for the Lyapunov prediction; absent
    /// anchors at the window start.
    pub anchor_window: Option<[f64; 2]>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let td = echolab_core::analysis::TdOptions::default();
        Self {
            prediction: Prediction::None,
            r: None,
            onset_level: 0.5,
            onset_min: 2.0,
            window: None,
            window_length: None,
            tn_fraction: 0.8,
            delta_ln: td.delta_ln,
            w_sustain: td.w_sustain,
            stage_floor: 4.0,
            threshold_rule: "large-plateau".into(),
            threshold_value: None,
            anchor_window: None,
        }
    }
}

impl AnalysisConfig {
    pub fn threshold(&self) -> LabResult<ThresholdRule> {
        let field = "analysis.threshold_value";
        match (self.threshold_rule.as_str(), self.threshold_value) {
            ("large-plateau", v) => Ok(ThresholdRule::LargeControlPlateau { factor: v.unwrap_or(2.0) }),
            ("small-plateau", Some(v)) => Ok(ThresholdRule::SmallControlPlateau { fraction: v }),
            ("absolute", Some(v)) => Ok(ThresholdRule::Absolute(v)),
            ("small-plateau" | "absolute", None) => Err(config_err(field, "required by this threshold rule")),
            (other, _) => Err(config_err(
                "analysis.threshold_rule",
                format!("expected large-plateau, small-plateau or absolute, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InputsConfig {
    pub series: Vec<PathBuf>,
    pub manifest: Option<PathBuf>,
}

/// Parses `value` as a TOML value, falling back to a bare string.
fn parse_value(value: &str) -> toml::Value {
    format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()))
}

/// Sets `path` (dot-separated) in `table`, creating sections as needed.
pub fn set_path(table: &mut toml::Table, path: &str, value: &str) -> LabResult<()> {
    let mut keys: Vec<&str> = path.split('.').collect();
    let last = keys.pop().filter(|k| !k.is_empty()).ok_or_else(|| config_err(path, "empty key"))?;
    let mut cur = table;
    for k in keys {
        let entry = cur
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| config_err(path, format!("`{k}` is not a section")))?;
    }
    cur.insert(last.to_string(), parse_value(value));
    Ok(())
}

/// A `key=value` override as given on the command line.
pub fn parse_override(s: &str) -> LabResult<(String, String)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| config_err(s, "override must look like section.key=value"))
}

impl ExperimentConfig {
    /// Builds a config from TOML text plus overrides; overrides win.
    pub fn from_toml_with(text: &str, overrides: &[(String, String)]) -> LabResult<Self> {
        let mut table: toml::Table = text.parse()?;
        for (k, v) in overrides {
            set_path(&mut table, k, v)?;
        }
        let cfg: ExperimentConfig = toml::Value::Table(table).try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path, overrides: &[(String, String)]) -> LabResult<Self> {
        if !path.exists() {
            return Err(LabError::MissingInput(path.to_path_buf()));
        }
        Self::from_toml_with(&std::fs::read_to_string(path)?, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn seed(&self) -> u64 {
        self.seed.expect("validated config has a seed")
    }

    pub fn model_kind(&self) -> LabResult<ModelKind> {
        ModelKind::from_str(&self.model.name)
            .map_err(|_| config_err("model.name", format!("unknown model `{}`", self.model.name)))
    }

    pub fn k_values(&self) -> Vec<f64> {
        if self.sweep.k.is_empty() {
            vec![self.model.k]
        } else {
            self.sweep.k.clone()
        }
    }

    /// `(λ₀, λ)` pairs from `sweep.pairs` then `sweep.delta_lambda`.
    pub fn ising_pairs(&self) -> Vec<(f64, f64)> {
        let lc = echolab_core::ising::LAMBDA_C;
        self.sweep
            .pairs
            .iter()
            .map(|p| (p[0], p[1]))
            .chain(self.sweep.delta_lambda.iter().map(|d| (lc - d, lc - 2.0 * d)))
            .collect()
    }

    pub fn validate(&self) -> LabResult<()> {
        let safe = !self.name.is_empty()
            && self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
        if !safe || self.name.starts_with('.') {
            return Err(config_err("name", "must be a non-empty file-name-safe identifier"));
        }
        if self.seed.is_none() {
            return Err(config_err("seed", "a seed is mandatory"));
        }
        if self.ensemble.n_states < 1 {
            return Err(config_err("ensemble.n_states", "need at least one state"));
        }
        if let Some(xi) = self.ensemble.xi {
            if !(xi > 0.0 && xi.is_finite()) {
                return Err(config_err("ensemble.xi", "must be positive"));
            }
        }
        if self.sweep.n.iter().any(|&n| n < 2) {
            return Err(config_err("sweep.n", "dimensions must be at least 2"));
        }
        if self.sweep.n_p.iter().any(|&n| n < 2) {
            return Err(config_err("sweep.n_p", "chains need at least two spins"));
        }
        if self.sweep.sigma.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(config_err("sweep.sigma", "must be finite and nonnegative"));
        }
        if let Some(r) = self.analysis.r {
            if !(r > 0.0) {
                return Err(config_err("analysis.r", "must be positive"));
            }
        }
        if !(self.analysis.stage_floor >= 1.0) {
            return Err(config_err("analysis.stage_floor", "must be at least 1"));
        }
        for (field, w) in [("analysis.window", self.analysis.window), ("analysis.anchor_window", self.analysis.anchor_window)] {
            if let Some([a, b]) = w {
                if !(a < b) {
                    return Err(config_err(field, "start must be below end"));
                }
            }
        }
        self.classical.tangent()?;
        self.analysis.threshold()?;
        let kind = self.kind;
        let needs = |field: &str, empty: bool| {
            if empty {
                Err(config_err(field, format!("required for {}", kind.name())))
            } else {
                Ok(())
            }
        };
        match kind {
            ExperimentKind::KickedEcho => {
                self.model_kind()?;
                needs("sweep.n", self.sweep.n.is_empty())?;
                needs("sweep.sigma", self.sweep.sigma.is_empty())?;
                if self.time.t_max < 1 {
                    return Err(config_err("time.t_max", "need at least one kick"));
                }
            }
            ExperimentKind::ClassicalOracle => {
                self.model_kind()?;
            }
            ExperimentKind::IsingEcho => {
                needs("sweep.n_p", self.sweep.n_p.is_empty())?;
                needs("sweep.pairs", self.ising_pairs().is_empty())?;
            }
            ExperimentKind::Scan => {
                if self.ising_pairs().is_empty() {
                    self.model_kind()?;
                    needs("sweep.sigma", self.sweep.sigma.is_empty())?;
                    if self.sweep.n.len() < 3 {
                        return Err(config_err("sweep.n", "a scan needs at least 3 dimensions"));
                    }
                } else if self.ising_pairs().iter().any(|(_, l)| *l == echolab_core::ising::LAMBDA_C) {
                    return Err(config_err("sweep.pairs", "λ must differ from the critical field"));
                }
            }
            ExperimentKind::Fit => {
                needs("inputs.series", self.inputs.series.is_empty())?;
            }
            ExperimentKind::Report => {
                needs("inputs.manifest", self.inputs.manifest.is_none())?;
            }
        }
        Ok(())
    }
}
