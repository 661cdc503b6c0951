//! Run configuration, read from TOML.

use crate::error::CliError;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use sgsim_core::observables::GroundSource;
use sgsim_core::qite::PotentialMode;
use sgsim_core::sinegordon::{EvolutionMode, QuadNormalization};
use sgsim_core::trig::TrotterOrder;
use std::path::PathBuf;

/// A scalar or a list of scalars.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub qite: QiteSection,
    #[serde(default)]
    pub correlator: CorrelatorSection,
    #[serde(default)]
    pub kink: KinkSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub gatecheck: GatecheckSection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    #[serde(rename = "L")]
    pub sites: usize,
    pub m: f64,
    pub beta: OneOrMany<f64>,
    #[serde(default)]
    pub normalization: QuadNormalization,
}

/// Trotter steps per grid interval, or automatic refinement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum StepsSetting {
    Fixed(usize),
    Auto,
}

impl<'de> Deserialize<'de> for StepsSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(i64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) if n > 0 => Ok(StepsSetting::Fixed(n as usize)),
            Raw::N(n) => Err(de::Error::custom(format!("trotter_steps must be positive, got {n}"))),
            Raw::S(s) if s == "auto" => Ok(StepsSetting::Auto),
            Raw::S(s) => Err(de::Error::custom(format!("trotter_steps must be an integer or \"auto\", got \"{s}\""))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub lambda: Option<usize>,
    pub lambda_list: Option<Vec<usize>>,
    #[serde(default = "default_order")]
    pub trotter_order: TrotterOrder,
    #[serde(default = "default_steps")]
    pub trotter_steps: StepsSetting,
    /// Tolerance on max |ΔP| for automatic refinement.
    #[serde(default = "default_auto_tol")]
    pub auto_tol: f64,
    #[serde(default = "default_auto_max")]
    pub auto_max_steps: usize,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub n_points: usize,
    #[serde(default = "default_mode")]
    pub mode: EvolutionMode,
}

fn default_order() -> TrotterOrder {
    TrotterOrder::SecondSymmetric
}
fn default_steps() -> StepsSetting {
    StepsSetting::Fixed(4)
}
fn default_auto_tol() -> f64 {
    1e-4
}
fn default_auto_max() -> usize {
    1024
}
fn default_t_max() -> f64 {
    10.0
}
fn default_points() -> usize {
    41
}
fn default_mode() -> EvolutionMode {
    EvolutionMode::Reference
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            lambda: None,
            lambda_list: None,
            trotter_order: default_order(),
            trotter_steps: default_steps(),
            auto_tol: default_auto_tol(),
            auto_max_steps: default_auto_max(),
            t_max: default_t_max(),
            n_points: default_points(),
            mode: default_mode(),
        }
    }
}

impl SimSection {
    /// `lambda_list` if given, else `[lambda]`.
    pub fn cutoffs(&self) -> Result<Vec<usize>, CliError> {
        match (&self.lambda_list, self.lambda) {
            (Some(_), Some(_)) => Err(CliError::config("give either sim.lambda or sim.lambda_list, not both")),
            (Some(list), None) if list.is_empty() => Err(CliError::config("sim.lambda_list is empty")),
            (Some(list), None) => Ok(list.clone()),
            (None, Some(l)) => Ok(vec![l]),
            (None, None) => Err(CliError::config("missing sim.lambda (or sim.lambda_list)")),
        }
    }

    /// `n_points` equally spaced times on `[0, t_max]`; a single point when
    /// `t_max = 0`.
    pub fn time_grid(&self) -> Result<Vec<f64>, CliError> {
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(CliError::config(format!("sim.t_max must be >= 0, got {}", self.t_max)));
        }
        if self.t_max == 0.0 {
            return Ok(vec![0.0]);
        }
        if self.n_points < 2 {
            return Err(CliError::config("sim.n_points must be at least 2 when t_max > 0"));
        }
        let n = self.n_points - 1;
        Ok((0..=n).map(|i| self.t_max * i as f64 / n as f64).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QiteSection {
    #[serde(default = "default_dtau")]
    pub dtau: f64,
    #[serde(default = "default_qite_steps")]
    pub steps: i64,
    #[serde(default)]
    pub pot_mode: PotentialMode,
}

fn default_dtau() -> f64 {
    0.5
}
fn default_qite_steps() -> i64 {
    10
}

impl Default for QiteSection {
    fn default() -> Self {
        Self {
            dtau: default_dtau(),
            steps: default_qite_steps(),
            pot_mode: PotentialMode::default(),
        }
    }
}

impl QiteSection {
    pub fn to_core(&self) -> Result<sgsim_core::qite::QiteConfig, CliError> {
        if self.steps <= 0 {
            return Err(CliError::config(format!("qite.steps must be positive, got {}", self.steps)));
        }
        Ok(sgsim_core::qite::QiteConfig::new(self.dtau, self.steps as usize)
            .map_err(|e| CliError::config(format!("qite: {e}")))?
            .with_pot_mode(self.pot_mode))
    }
}

/// How the correlator propagates between grid points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorChoice {
    /// Spectral when the dense Hamiltonian fits, Trotter otherwise.
    #[default]
    Auto,
    Spectral,
    Trotter,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelatorSection {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub n: usize,
    pub k: Option<usize>,
    #[serde(default = "default_correlator_source", deserialize_with = "sources")]
    pub ground_source: Vec<GroundSource>,
    #[serde(default)]
    pub propagator: PropagatorChoice,
}

fn default_alpha() -> f64 {
    1.0
}
fn default_correlator_source() -> Vec<GroundSource> {
    vec![GroundSource::Ed]
}

fn sources<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<GroundSource>, D::Error> {
    OneOrMany::<String>::deserialize(d)?
        .to_vec()
        .iter()
        .map(|s| s.parse().map_err(de::Error::custom))
        .collect()
}

impl Default for CorrelatorSection {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            n: 0,
            k: None,
            ground_source: default_correlator_source(),
            propagator: PropagatorChoice::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KinkSection {
    #[serde(default)]
    pub phi_left: f64,
    /// Defaults to `phi_left + 2π/β` per β.
    pub phi_right: Option<f64>,
    #[serde(default = "default_kink_source", deserialize_with = "sources")]
    pub ground_source: Vec<GroundSource>,
}

fn default_kink_source() -> Vec<GroundSource> {
    vec![GroundSource::Qite]
}

impl Default for KinkSection {
    fn default() -> Self {
        Self {
            phi_left: 0.0,
            phi_right: None,
            ground_source: default_kink_source(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    /// Base name of the output files; defaults to the subcommand.
    pub name: Option<String>,
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: OutputFormat::default(),
            name: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateFamily {
    /// The conditional-displacement circuit for `e^{-it cos(cx)}`.
    CosineX,
    /// The generic Σ-block circuit for `e^{it cos(cx)}`.
    TrigCos,
    /// The generic Σ-block circuit for `e^{it sin(cx)}`.
    TrigSin,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatecheckSection {
    #[serde(default = "default_gc_c")]
    pub c: Vec<f64>,
    #[serde(default = "default_gc_t")]
    pub t: Vec<f64>,
    #[serde(default = "default_gc_lambda")]
    pub lambda: usize,
    #[serde(default = "default_gc_orders")]
    pub orders: Vec<TrotterOrder>,
    #[serde(default = "default_gc_steps")]
    pub steps: Vec<usize>,
    #[serde(default = "default_gc_family")]
    pub circuit: GateFamily,
}

fn default_gc_c() -> Vec<f64> {
    vec![1.0]
}
fn default_gc_t() -> Vec<f64> {
    vec![0.0, 0.1, 0.2, 0.4]
}
fn default_gc_lambda() -> usize {
    14
}
fn default_gc_orders() -> Vec<TrotterOrder> {
    vec![TrotterOrder::First, TrotterOrder::SecondSymmetric]
}
fn default_gc_steps() -> Vec<usize> {
    vec![1]
}
fn default_gc_family() -> GateFamily {
    GateFamily::CosineX
}

impl Default for GatecheckSection {
    fn default() -> Self {
        Self {
            c: default_gc_c(),
            t: default_gc_t(),
            lambda: default_gc_lambda(),
            orders: default_gc_orders(),
            steps: default_gc_steps(),
            circuit: default_gc_family(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let l = &self.lattice;
        if l.sites == 0 {
            return Err(CliError::config("lattice.L must be at least 1"));
        }
        if !(l.m >= 0.0 && l.m.is_finite()) {
            return Err(CliError::config(format!("lattice.m must be >= 0, got {}", l.m)));
        }
        let betas = l.beta.to_vec();
        if betas.is_empty() || betas.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return Err(CliError::config("lattice.beta must be positive (scalar or non-empty list)"));
        }
        if !(self.sim.auto_tol > 0.0) {
            return Err(CliError::config("sim.auto_tol must be positive"));
        }
        if self.correlator.ground_source.is_empty() || self.kink.ground_source.is_empty() {
            return Err(CliError::config("ground_source list is empty"));
        }
        Ok(())
    }

    pub fn betas(&self) -> Vec<f64> {
        self.lattice.beta.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[lattice]\nL = 3\nm = 1.0\nbeta = 2.0\n";

    #[test]
    fn minimal_config_takes_defaults() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.lattice.sites, 3);
        assert_eq!(c.betas(), vec![2.0]);
        assert_eq!(c.qite.steps, 10);
        assert_eq!(c.correlator.ground_source, vec![GroundSource::Ed]);
        assert_eq!(c.kink.ground_source, vec![GroundSource::Qite]);
    }

    #[test]
    fn beta_list_and_auto_steps() {
        let text = format!("{MINIMAL}\n[sim]\nlambda_list = [11, 13]\ntrotter_steps = \"auto\"\n").replace("beta = 2.0", "beta = [0.8, 2]");
        let c = RunConfig::parse(&text).unwrap();
        assert_eq!(c.betas(), vec![0.8, 2.0]);
        assert_eq!(c.sim.trotter_steps, StepsSetting::Auto);
        assert_eq!(c.sim.cutoffs().unwrap(), vec![11, 13]);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::parse(&format!("{MINIMAL}\n[sim]\nlamda = 4\n")).unwrap_err();
        assert!(err.to_string().contains("lamda"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bad_values_rejected() {
        assert!(RunConfig::parse(&MINIMAL.replace("beta = 2.0", "beta = -1.0")).is_err());
        assert!(RunConfig::parse(&format!("{MINIMAL}\n[sim]\ntrotter_steps = 0\n")).is_err());
        assert!(RunConfig::parse(&format!("{MINIMAL}\n[sim]\ntrotter_steps = \"many\"\n")).is_err());
        let c = RunConfig::parse(&format!("{MINIMAL}\n[qite]\nsteps = 0\n")).unwrap();
        assert!(c.qite.to_core().is_err());
    }

    #[test]
    fn time_grid_edges() {
        let mut s = SimSection::default();
        s.t_max = 0.0;
        assert_eq!(s.time_grid().unwrap(), vec![0.0]);
        s.t_max = 2.0;
        s.n_points = 5;
        assert_eq!(s.time_grid().unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn ground_source_list() {
        let c = RunConfig::parse(&format!("{MINIMAL}\n[correlator]\nground_source = [\"ED\", \"qite\"]\n")).unwrap();
        assert_eq!(c.correlator.ground_source, vec![GroundSource::Ed, GroundSource::Qite]);
    }
}
