use super::{ed_ground, model, CommandOutput, Table};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Report;
use serde::Serialize;
use sgsim_core::qite::{qite_run, qite_step_circuit, PotentialMode};
use sgsim_core::HybridState;

#[derive(Debug, Serialize)]
pub struct QiteRow {
    pub tau: f64,
    pub energy: f64,
    /// Empty when no exact ground state is available.
    pub fidelity: Option<f64>,
    pub success_prob: f64,
    #[serde(rename = "L")]
    pub sites: usize,
    pub m: f64,
    pub beta: f64,
    pub lambda: usize,
    pub dtau: f64,
    pub mode: PotentialMode,
}

pub fn run(cfg: &RunConfig, report: &mut Report) -> Result<CommandOutput, CliError> {
    let qcfg = cfg.qite.to_core()?;
    let mut rows = Vec::new();
    let mut circuit = None;
    for beta in cfg.betas() {
        for lambda in cfg.sim.cutoffs()? {
            let mdl = model(cfg, beta, lambda)?;
            let ground = ed_ground(&mdl)?;
            let vac = HybridState::vacuum(mdl.register(0)?);
            let out = qite_run(&mdl, &qcfg, &vac, ground.as_ref())?;
            let key = format!("beta{beta}_lambda{lambda}");
            if let Some(g) = &ground {
                report.record(format!("ed_energy_{key}"), g.energy);
            }
            report.record(format!("qite_energy_{key}"), out.energy);
            report.record(format!("max_energy_rise_{key}"), out.trace.max_energy_rise());
            if circuit.is_none() {
                circuit = Some(qite_step_circuit(&mdl, &qcfg)?);
            }
            rows.extend(out.trace.records.iter().map(|r| QiteRow {
                tau: r.tau,
                energy: r.energy,
                fidelity: r.fidelity,
                success_prob: r.success_probability,
                sites: cfg.lattice.sites,
                m: cfg.lattice.m,
                beta,
                lambda,
                dtau: qcfg.dtau(),
                mode: qcfg.pot_mode(),
            }));
        }
    }
    Ok(CommandOutput {
        table: Table::Qite(rows),
        circuit,
    })
}
