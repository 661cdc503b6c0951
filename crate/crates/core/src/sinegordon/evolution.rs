use super::SineGordonModel;
use crate::circuit::{Circuit, Gate, Program};
use crate::error::{Error, Result};
use crate::state::HybridState;
use crate::trig::{trig_gate_circuit, AncillaLayout, HermitianArg, TrigKind, TrotterOrder, TrotterSchedule};
use crate::register::Subsystem;
use crate::POSTSELECTION_FLOOR;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// How the evolution factors are realized.
///
/// `Reference` applies exact exponentials of the truncated quadratic and
/// potential terms. `Compiled` uses the gate constructions a device would
/// run: squeeze-rotate-squeeze for each oscillator and ancilla-based cosine
/// gates for the potential, on two extra qubits. `CompiledPotential` keeps
/// the exact quadratic factor and compiles only the potential, which isolates
/// the cosine-gate error from the squeezer truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMode {
    Reference,
    Compiled,
    CompiledPotential,
}

impl EvolutionMode {
    pub fn ancillas(self) -> usize {
        match self {
            EvolutionMode::Reference => 0,
            EvolutionMode::Compiled | EvolutionMode::CompiledPotential => 2,
        }
    }
}

impl fmt::Display for EvolutionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvolutionMode::Reference => "reference",
            EvolutionMode::Compiled => "compiled",
            EvolutionMode::CompiledPotential => "compiled_potential",
        })
    }
}

impl SineGordonModel {
    /// `exp(-i t H_quad)` as gates: a quadratic phase on the zero mode and
    /// `S(r)† R(Ωt) S(r)` on every other mode (time order `S(r)`, `R`, `S(-r)`).
    pub fn u_quad_circuit(&self, t: f64, n_qubits: usize) -> Result<Circuit> {
        let mut c = Circuit::new(self.register(n_qubits)?);
        for (mode, srs) in self.fourier().srs().iter().enumerate() {
            match srs {
                None => {
                    let a = self.fourier().a_coeff()[mode];
                    c.push(Gate::QuadraticPhase { t: 2.0 * a * t, mode })?;
                }
                Some(p) => {
                    c.push(Gate::Squeeze { z: C64::new(p.r, 0.0), mode })?;
                    c.push(Gate::ModeRotation { theta: p.omega * t, mode })?;
                    c.push(Gate::Squeeze { z: C64::new(-p.r, 0.0), mode })?;
                }
            }
        }
        Ok(c)
    }

    /// `exp(-i t H_quad)` as one exact exponential per mode.
    pub fn u_quad_reference(&self, t: f64, n_qubits: usize) -> Result<Circuit> {
        let mut c = Circuit::new(self.register(n_qubits)?);
        for mode in 0..self.params().sites() {
            c.push(Gate::Operator {
                label: "QUAD".into(),
                matrix: Arc::new(self.quad_exponential(mode, C64::new(0.0, -t))?),
                targets: vec![Subsystem::Mode(mode)],
            })?;
        }
        Ok(c)
    }

    /// `exp(-i t H_pot)` as a product of one cosine gate per site; the
    /// constant part of the potential is carried as the global phase
    /// `-t L m²/β²`.
    pub fn u_pot_circuit(&self, t: f64, schedule: TrotterSchedule, mode: EvolutionMode) -> Result<Circuit> {
        let shape = self.register(mode.ancillas())?;
        let mut c = Circuit::new(shape);
        let scale = self.params().potential_scale();
        c.add_global_phase(-t * self.params().sites() as f64 * scale);
        if scale == 0.0 {
            return Ok(c);
        }
        for site in 0..self.params().sites() {
            let (terms, shift) = self.cosine_argument(site);
            match mode {
                EvolutionMode::Reference => {
                    c.push(Gate::CosineOfPosition {
                        weight: C64::new(0.0, t * scale),
                        terms,
                        shift,
                    })?;
                }
                EvolutionMode::Compiled | EvolutionMode::CompiledPotential => {
                    let layout = AncillaLayout::new(shape, 0, 1, None)?;
                    let arg = HermitianArg::linear_terms(terms, shift)?;
                    let gate = trig_gate_circuit(TrigKind::Cos, &arg, t * scale, schedule, &layout)?;
                    c.extend(&gate)?;
                }
            }
        }
        Ok(c)
    }

    /// One Trotter step of `exp(-i dt H)` in time order: quadratic then
    /// potential (first order) or half-quadratic, potential, half-quadratic.
    pub fn trotter_step_circuit(&self, dt: f64, order: TrotterOrder, mode: EvolutionMode) -> Result<Circuit> {
        let nq = mode.ancillas();
        let quad = |t: f64| match mode {
            EvolutionMode::Reference | EvolutionMode::CompiledPotential => self.u_quad_reference(t, nq),
            EvolutionMode::Compiled => self.u_quad_circuit(t, nq),
        };
        let pot = self.u_pot_circuit(dt, TrotterSchedule::new(order, 1)?, mode)?;
        let mut c = Circuit::new(self.register(nq)?);
        match order {
            TrotterOrder::First => {
                c.extend(&quad(dt)?)?;
                c.extend(&pot)?;
            }
            TrotterOrder::SecondSymmetric => {
                let half = quad(dt / 2.0)?;
                c.extend(&half)?;
                c.extend(&pot)?;
                c.extend(&half)?;
            }
        }
        Ok(c)
    }
}

/// Applies Trotter steps, compiling each distinct step size once.
pub struct TrotterPropagator<'a> {
    model: &'a SineGordonModel,
    order: TrotterOrder,
    mode: EvolutionMode,
    programs: Vec<(u64, Program, f64)>,
}

impl<'a> TrotterPropagator<'a> {
    pub fn new(model: &'a SineGordonModel, order: TrotterOrder, mode: EvolutionMode) -> Self {
        Self {
            model,
            order,
            mode,
            programs: Vec::new(),
        }
    }

    /// Applies `steps` steps of size `dt` in place; returns the global phase
    /// they carry.
    pub fn advance(&mut self, state: &mut HybridState, dt: f64, steps: usize) -> Result<f64> {
        if !dt.is_finite() {
            return Err(Error::NonFinite("Trotter step"));
        }
        let key = dt.to_bits();
        let idx = match self.programs.iter().position(|(k, _, _)| *k == key) {
            Some(i) => i,
            None => {
                let c = self.model.trotter_step_circuit(dt, self.order, self.mode)?;
                self.programs.push((key, c.compile()?, c.global_phase()));
                self.programs.len() - 1
            }
        };
        let (_, program, phase) = &self.programs[idx];
        for _ in 0..steps {
            program.run(state, POSTSELECTION_FLOOR)?;
        }
        Ok(phase * steps as f64)
    }
}

#[derive(Clone, Debug)]
pub struct Evolution {
    /// Evolved state without the global phase applied.
    pub state: HybridState,
    pub steps: usize,
    pub mode: EvolutionMode,
    /// Phase `φ` with `U(t)|ψ> = e^{iφ} state`.
    pub global_phase: f64,
}

impl Evolution {
    pub fn phased_state(&self) -> HybridState {
        let mut s = self.state.clone();
        let ph = C64::from_polar(1.0, self.global_phase);
        s.amplitudes_mut().iter_mut().for_each(|a| *a *= ph);
        s
    }
}

fn check_register(state: &HybridState, model: &SineGordonModel, mode: EvolutionMode) -> Result<()> {
    let expect = model.register(mode.ancillas())?;
    if *state.shape() != expect {
        return Err(Error::DimensionMismatch {
            expected: expect.dim(),
            found: state.shape().dim(),
        });
    }
    Ok(())
}

/// Trotterized `exp(-i t H)|ψ>`.
pub fn trotter_evolve(state: &HybridState, model: &SineGordonModel, t_total: f64, schedule: TrotterSchedule, mode: EvolutionMode) -> Result<Evolution> {
    check_register(state, model, mode)?;
    let mut out = state.clone();
    let mut prop = TrotterPropagator::new(model, schedule.order(), mode);
    let dt = t_total / schedule.steps() as f64;
    let global_phase = prop.advance(&mut out, dt, schedule.steps())?;
    let n = out.norm();
    if (n - 1.0).abs() > 1e-9 * state.norm().max(1.0) && (state.norm() - 1.0).abs() < 1e-12 {
        return Err(Error::NoConvergence(format!("norm drifted to {n}")));
    }
    Ok(Evolution {
        state: out,
        steps: schedule.steps(),
        mode,
        global_phase,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub t: f64,
    /// `|<vac|U(t)|vac>|²`
    pub probability: f64,
    /// Trotter steps applied to reach `t`.
    pub steps: usize,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.first() != Some(&0.0) {
        return Err(Error::param("time grid must start at 0"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::param("time grid must be finite and strictly increasing"));
    }
    Ok(())
}

/// Survival probability of the free vacuum (all ancillas and modes in their
/// ground level) on `t_grid`, with `schedule.steps()` Trotter steps per grid
/// interval.
pub fn survival_series(model: &SineGordonModel, t_grid: &[f64], schedule: TrotterSchedule, mode: EvolutionMode) -> Result<Vec<SurvivalPoint>> {
    check_grid(t_grid)?;
    let mut state = HybridState::vacuum(model.register(mode.ancillas())?);
    let mut prop = TrotterPropagator::new(model, schedule.order(), mode);
    let mut out = vec![SurvivalPoint {
        t: 0.0,
        probability: state.amplitudes()[0].norm_sqr(),
        steps: 0,
    }];
    let mut steps = 0;
    for w in t_grid.windows(2) {
        let dt = (w[1] - w[0]) / schedule.steps() as f64;
        prop.advance(&mut state, dt, schedule.steps())?;
        steps += schedule.steps();
        out.push(SurvivalPoint {
            t: w[1],
            probability: state.amplitudes()[0].norm_sqr(),
            steps,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct AutoRefinement {
    pub series: Vec<SurvivalPoint>,
    pub steps_per_interval: usize,
    /// Largest change over the grid between the last two refinements.
    pub last_change: f64,
}

/// Doubles the steps per grid interval until the survival series changes by
/// less than `tol` at every grid point (which includes the final time).
pub fn survival_series_auto(
    model: &SineGordonModel,
    t_grid: &[f64],
    order: TrotterOrder,
    mode: EvolutionMode,
    tol: f64,
    max_steps_per_interval: usize,
) -> Result<AutoRefinement> {
    let mut steps = 1;
    let mut prev = survival_series(model, t_grid, TrotterSchedule::new(order, steps)?, mode)?;
    loop {
        steps *= 2;
        if steps > max_steps_per_interval {
            return Err(Error::NoConvergence(format!(
                "survival series did not settle to {tol:e} within {max_steps_per_interval} steps per interval"
            )));
        }
        let next = survival_series(model, t_grid, TrotterSchedule::new(order, steps)?, mode)?;
        let change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a.probability - b.probability).abs())
            .fold(0.0, f64::max);
        if change < tol {
            return Ok(AutoRefinement {
                series: next,
                steps_per_interval: steps,
                last_change: change,
            });
        }
        prev = next;
    }
}
