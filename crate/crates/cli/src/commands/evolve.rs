use super::{model, CommandOutput, Table};
use crate::config::{RunConfig, StepsSetting};
use crate::error::CliError;
use crate::output::Report;
use serde::Serialize;
use sgsim_core::sinegordon::{survival_series, survival_series_auto, EvolutionMode};
use sgsim_core::trig::TrotterSchedule;

#[derive(Debug, Serialize)]
pub struct SurvivalRow {
    pub t: f64,
    pub survival_prob: f64,
    #[serde(rename = "L")]
    pub sites: usize,
    pub m: f64,
    pub beta: f64,
    pub lambda: usize,
    pub trotter_steps: usize,
    pub mode: EvolutionMode,
}

pub fn run(cfg: &RunConfig, report: &mut Report) -> Result<CommandOutput, CliError> {
    let sim = &cfg.sim;
    let grid = sim.time_grid()?;
    let mut rows = Vec::new();
    let mut circuit = None;
    for beta in cfg.betas() {
        for lambda in sim.cutoffs()? {
            let mdl = model(cfg, beta, lambda)?;
            let series = match sim.trotter_steps {
                StepsSetting::Fixed(n) => survival_series(&mdl, &grid, TrotterSchedule::new(sim.trotter_order, n)?, sim.mode)?,
                StepsSetting::Auto if grid.len() == 1 => survival_series(&mdl, &grid, TrotterSchedule::new(sim.trotter_order, 1)?, sim.mode)?,
                StepsSetting::Auto => {
                    let r = survival_series_auto(&mdl, &grid, sim.trotter_order, sim.mode, sim.auto_tol, sim.auto_max_steps)?;
                    report.record(
                        format!("refinement_beta{beta}_lambda{lambda}"),
                        serde_json::json!({
                            "steps_per_interval": r.steps_per_interval,
                            "last_change": r.last_change,
                            "tolerance": sim.auto_tol,
                        }),
                    );
                    r.series
                }
            };
            if circuit.is_none() && grid.len() > 1 {
                let steps = series[1].steps.max(1);
                let dt = grid[1] / steps as f64;
                circuit = Some(mdl.trotter_step_circuit(dt, sim.trotter_order, sim.mode)?);
            }
            rows.extend(series.iter().map(|p| SurvivalRow {
                t: p.t,
                survival_prob: p.probability,
                sites: cfg.lattice.sites,
                m: cfg.lattice.m,
                beta,
                lambda,
                trotter_steps: p.steps,
                mode: sim.mode,
            }));
        }
    }
    Ok(CommandOutput {
        table: Table::Survival(rows),
        circuit,
    })
}
