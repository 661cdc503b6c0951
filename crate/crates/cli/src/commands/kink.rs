use super::{cutoff, ed_ground, params, CommandOutput, Table};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Report;
use serde::Serialize;
use sgsim_core::observables::{kink_profile, prepare_ground, GroundSource, KinkConfig};
use sgsim_core::qite::qite_step_circuit;
use sgsim_core::sinegordon::SineGordonModel;
use std::f64::consts::PI;

#[derive(Debug, Serialize)]
pub struct KinkRow {
    pub site: usize,
    pub mean_phi: f64,
    pub variance: f64,
    pub classical_phi: f64,
    pub beta: f64,
    pub lambda: usize,
    pub ground_source: GroundSource,
}

pub fn run(cfg: &RunConfig, report: &mut Report) -> Result<CommandOutput, CliError> {
    let sec = &cfg.kink;
    let qcfg = cfg.qite.to_core()?;
    let mut rows = Vec::new();
    let mut circuit = None;
    for beta in cfg.betas() {
        let right = sec.phi_right.unwrap_or(sec.phi_left + 2.0 * PI / beta);
        if !(right > sec.phi_left) {
            return Err(CliError::config("kink.phi_right must exceed kink.phi_left"));
        }
        let kcfg = KinkConfig::with_boundaries(sec.phi_left, right);
        let p = params(cfg, beta)?;
        let classical = sgsim_core::observables::classical_kink(&p, &kcfg)?;
        for lambda in cfg.sim.cutoffs()? {
            let mdl = SineGordonModel::with_normalization(p, cutoff(lambda)?, cfg.lattice.normalization)?.with_background(classical.clone())?;
            let key = format!("beta{beta}_lambda{lambda}");
            let ed = if sec.ground_source.contains(&GroundSource::Qite) { ed_ground(&mdl)? } else { None };
            for &source in &sec.ground_source {
                let ground = match (source, &ed) {
                    (GroundSource::Ed, Some(g)) => g.clone(),
                    _ => prepare_ground(&mdl, source, &qcfg)?,
                };
                let prof = kink_profile(&mdl, &ground.state)?;
                report.record(format!("charge_{source}_{key}"), prof.charge(beta));
                report.record(format!("energy_{source}_{key}"), ground.energy);
                if let (GroundSource::Qite, Some(g)) = (source, &ed) {
                    report.record(format!("qite_fidelity_vs_ed_{key}"), ground.state.fidelity(&g.state)?);
                }
                rows.extend((0..cfg.lattice.sites).map(|n| KinkRow {
                    site: n,
                    mean_phi: prof.mean_phi[n],
                    variance: prof.variance[n],
                    classical_phi: prof.classical_phi[n],
                    beta,
                    lambda,
                    ground_source: source,
                }));
            }
            if circuit.is_none() {
                circuit = Some(qite_step_circuit(&mdl, &qcfg)?);
            }
        }
    }
    Ok(CommandOutput {
        table: Table::Kink(rows),
        circuit,
    })
}
