use super::{cutoff, CommandOutput, Table};
use crate::config::{GateFamily, RunConfig};
use crate::error::CliError;
use crate::output::Report;
use serde::Serialize;
use sgsim_core::circuit::Circuit;
use sgsim_core::trig::{
    circuit_error, cosine_x_circuit, trig_gate_circuit, trig_oracle, AncillaLayout, HermitianArg, TrigKind, TrotterOrder,
    TrotterSchedule,
};

#[derive(Debug, Serialize)]
pub struct GatecheckRow {
    pub t: f64,
    pub c: f64,
    pub order: TrotterOrder,
    pub steps: usize,
    pub circuit_error: f64,
}

/// Circuit for `family` and the exact single-mode operator it approximates.
pub fn circuit_and_target(
    family: GateFamily,
    c: f64,
    t: f64,
    schedule: TrotterSchedule,
    layout: &AncillaLayout,
) -> Result<(Circuit, sgsim_core::OperatorMatrix), CliError> {
    let arg = HermitianArg::single(0, c)?;
    let cut = layout.shape.cutoff();
    Ok(match family {
        GateFamily::CosineX => (cosine_x_circuit(c, t, 0, schedule, layout)?, trig_oracle(TrigKind::Cos, &arg, -t, cut)?),
        GateFamily::TrigCos => (trig_gate_circuit(TrigKind::Cos, &arg, t, schedule, layout)?, trig_oracle(TrigKind::Cos, &arg, t, cut)?),
        GateFamily::TrigSin => (trig_gate_circuit(TrigKind::Sin, &arg, t, schedule, layout)?, trig_oracle(TrigKind::Sin, &arg, t, cut)?),
    })
}

pub fn run(cfg: &RunConfig, report: &mut Report) -> Result<CommandOutput, CliError> {
    let sec = &cfg.gatecheck;
    if sec.c.is_empty() || sec.t.is_empty() || sec.orders.is_empty() || sec.steps.is_empty() {
        return Err(CliError::config("gatecheck lists must be non-empty"));
    }
    let layout = AncillaLayout::unitary(1, cutoff(sec.lambda)?)?;
    report.record("circuit", sec.circuit);
    report.record("lambda", sec.lambda);
    let mut rows = Vec::new();
    let mut circuit = None;
    for &c in &sec.c {
        for &order in &sec.orders {
            for &steps in &sec.steps {
                let schedule = TrotterSchedule::new(order, steps).map_err(|e| CliError::config(e.to_string()))?;
                for &t in &sec.t {
                    let (circ, target) = circuit_and_target(sec.circuit, c, t, schedule, &layout)?;
                    rows.push(GatecheckRow {
                        t,
                        c,
                        order,
                        steps,
                        circuit_error: circuit_error(&circ, &target)?,
                    });
                    circuit.get_or_insert(circ);
                }
            }
        }
    }
    Ok(CommandOutput {
        table: Table::Gatecheck(rows),
        circuit,
    })
}
