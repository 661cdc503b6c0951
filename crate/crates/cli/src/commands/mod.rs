//! One module per subcommand. Each returns its table and the circuit that
//! `--dump-circuit` writes.

pub mod correlator;
pub mod evolve;
pub mod gatecheck;
pub mod kink;
pub mod qite;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::output::write_table;
use sgsim_core::circuit::Circuit;
use sgsim_core::sinegordon::{lowest_states, LowState, SineGordonModel, SineGordonParams};
use sgsim_core::FockCutoff;
use std::path::Path;

/// Largest mode dimension for which the CLI runs exact diagonalization as a
/// reference (Lanczos memory grows with the Krylov basis).
pub const ED_LIMIT: usize = 50_000;

pub enum Table {
    Survival(Vec<evolve::SurvivalRow>),
    Qite(Vec<qite::QiteRow>),
    Correlator(Vec<correlator::CorrelatorRow>),
    Kink(Vec<kink::KinkRow>),
    Gatecheck(Vec<gatecheck::GatecheckRow>),
}

impl Table {
    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<(), CliError> {
        match self {
            Table::Survival(r) => write_table(path, format, r),
            Table::Qite(r) => write_table(path, format, r),
            Table::Correlator(r) => write_table(path, format, r),
            Table::Kink(r) => write_table(path, format, r),
            Table::Gatecheck(r) => write_table(path, format, r),
        }
    }
}

pub struct CommandOutput {
    pub table: Table,
    pub circuit: Option<Circuit>,
}

pub(crate) fn params(cfg: &RunConfig, beta: f64) -> Result<SineGordonParams, CliError> {
    SineGordonParams::new(cfg.lattice.sites, cfg.lattice.m, beta).map_err(|e| CliError::config(e.to_string()))
}

pub(crate) fn cutoff(lambda: usize) -> Result<FockCutoff, CliError> {
    FockCutoff::new(lambda).map_err(|e| CliError::config(e.to_string()))
}

pub(crate) fn model(cfg: &RunConfig, beta: f64, lambda: usize) -> Result<SineGordonModel, CliError> {
    Ok(SineGordonModel::with_normalization(params(cfg, beta)?, cutoff(lambda)?, cfg.lattice.normalization)?)
}

/// Exact ground state when the register is small enough, else `None`.
pub(crate) fn ed_ground(model: &SineGordonModel) -> Result<Option<LowState>, CliError> {
    if model.register(0)?.dim() > ED_LIMIT {
        return Ok(None);
    }
    Ok(Some(lowest_states(model, 1)?.remove(0)))
}

pub(crate) fn single<T: Copy>(values: &[T], what: &str) -> Result<T, CliError> {
    match values {
        [v] => Ok(*v),
        _ => Err(CliError::config(format!("{what} needs a single value for this subcommand"))),
    }
}
