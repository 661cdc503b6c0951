use super::{model, single, CommandOutput, Table};
use crate::config::{PropagatorChoice, RunConfig, StepsSetting};
use crate::error::CliError;
use crate::output::Report;
use serde::Serialize;
use sgsim_core::observables::{prepare_ground, vertex_correlator_series, GroundSource, Propagator, VertexConfig};
use sgsim_core::sinegordon::{EvolutionMode, DENSE_LIMIT};
use sgsim_core::trig::TrotterSchedule;

#[derive(Debug, Serialize)]
pub struct CorrelatorRow {
    pub t: f64,
    pub re_gc: f64,
    pub im_gc: f64,
    pub abs_gc: f64,
    pub alpha: f64,
    pub n: usize,
    pub k: usize,
    pub ground_source: GroundSource,
}

pub fn run(cfg: &RunConfig, report: &mut Report) -> Result<CommandOutput, CliError> {
    let beta = single(&cfg.betas(), "lattice.beta")?;
    let lambda = single(&cfg.sim.cutoffs()?, "sim.lambda")?;
    let mdl = model(cfg, beta, lambda)?;
    let sec = &cfg.correlator;
    let sites = cfg.lattice.sites;
    let k = sec.k.unwrap_or(sites - 1);
    if sec.n >= sites || k >= sites {
        return Err(CliError::config(format!("correlator sites n={}, k={k} must be below L={sites}", sec.n)));
    }
    let grid = cfg.sim.time_grid()?;
    let dim = mdl.register(0)?.dim();
    let trotter = || match cfg.sim.trotter_steps {
        StepsSetting::Fixed(n) => Ok(Propagator::Trotter(TrotterSchedule::new(cfg.sim.trotter_order, n)?)),
        StepsSetting::Auto => Err(CliError::config("correlator needs a fixed sim.trotter_steps for Trotter propagation")),
    };
    let propagator = match sec.propagator {
        PropagatorChoice::Spectral => Propagator::Spectral,
        PropagatorChoice::Trotter => trotter()?,
        PropagatorChoice::Auto if dim <= DENSE_LIMIT => Propagator::Spectral,
        PropagatorChoice::Auto => trotter()?,
    };
    report.record("propagator", format!("{propagator:?}"));
    let vcfg = VertexConfig {
        alpha: sec.alpha,
        site_n: sec.n,
        site_k: k,
        t_grid: grid.clone(),
    };
    let qcfg = cfg.qite.to_core()?;
    let mut rows = Vec::new();
    let mut grounds = Vec::new();
    for &source in &sec.ground_source {
        let ground = prepare_ground(&mdl, source, &qcfg)?;
        report.record(format!("ground_energy_{source}"), ground.energy);
        let series = vertex_correlator_series(&mdl, &ground, &vcfg, propagator)?;
        rows.extend(series.iter().map(|p| CorrelatorRow {
            t: p.t,
            re_gc: p.value.re,
            im_gc: p.value.im,
            abs_gc: p.value.norm(),
            alpha: sec.alpha,
            n: sec.n,
            k,
            ground_source: source,
        }));
        grounds.push(ground);
    }
    if let [a, b] = grounds.as_slice() {
        report.record("ground_state_fidelity", a.state.fidelity(&b.state)?);
    }
    let circuit = match (propagator, grid.get(1)) {
        (Propagator::Trotter(s), Some(&t1)) => Some(mdl.trotter_step_circuit(t1 / s.steps() as f64, s.order(), EvolutionMode::Reference)?),
        _ => None,
    };
    Ok(CommandOutput {
        table: Table::Correlator(rows),
        circuit,
    })
}
