//! Imaginary-time evolution toward the sine-Gordon ground state.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::register::Subsystem;
use crate::sinegordon::{HamiltonianOperator, LowState, SineGordonModel};
use crate::state::HybridState;
use crate::trig::{nonunitary_trig_circuit, AncillaLayout, HermitianArg, TrigKind, TrotterSchedule};
use crate::POSTSELECTION_FLOOR;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Order of the two factors inside one imaginary-time step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QiteSplit {
    #[default]
    QuadThenPot,
}

/// How `exp(-Δτ H_pot)` is applied. The quadratic factor is always an exact
/// truncated exponential.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialMode {
    #[default]
    Reference,
    /// Post-selected cosine circuits on three ancillas.
    CompiledNonUnitary,
}

impl PotentialMode {
    pub fn ancillas(self) -> usize {
        match self {
            PotentialMode::Reference => 0,
            PotentialMode::CompiledNonUnitary => 3,
        }
    }
}

impl fmt::Display for PotentialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PotentialMode::Reference => "reference",
            PotentialMode::CompiledNonUnitary => "compiled_non_unitary",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QiteConfig {
    dtau: f64,
    steps: usize,
    split: QiteSplit,
    pot_mode: PotentialMode,
    /// Trotter schedule of each compiled cosine circuit.
    trig_schedule: TrotterSchedule,
}

impl QiteConfig {
    pub fn new(dtau: f64, steps: usize) -> Result<Self> {
        if !(dtau > 0.0 && dtau.is_finite()) {
            return Err(Error::param(format!("dtau must be positive, got {dtau}")));
        }
        if steps == 0 {
            return Err(Error::param("QITE needs at least one step"));
        }
        Ok(Self {
            dtau,
            steps,
            split: QiteSplit::QuadThenPot,
            pot_mode: PotentialMode::Reference,
            trig_schedule: TrotterSchedule::first(1)?,
        })
    }

    pub fn with_pot_mode(mut self, mode: PotentialMode) -> Self {
        self.pot_mode = mode;
        self
    }

    pub fn with_trig_schedule(mut self, schedule: TrotterSchedule) -> Self {
        self.trig_schedule = schedule;
        self
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn split(&self) -> QiteSplit {
        self.split
    }

    pub fn pot_mode(&self) -> PotentialMode {
        self.pot_mode
    }

    pub fn trig_schedule(&self) -> TrotterSchedule {
        self.trig_schedule
    }

    pub fn total_tau(&self) -> f64 {
        self.dtau * self.steps as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiteRecord {
    pub tau: f64,
    pub energy: f64,
    /// Overlap with the supplied ground state, when one was given.
    pub fidelity: Option<f64>,
    /// Cumulative squared norm of the unnormalized output: `‖e^{-τH}ψ‖²` in
    /// reference mode, times the post-selection probabilities in compiled mode.
    pub success_probability: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QiteTrace {
    /// One record per step, preceded by the initial state at `τ = 0`.
    pub records: Vec<QiteRecord>,
}

impl QiteTrace {
    pub fn last(&self) -> Option<&QiteRecord> {
        self.records.last()
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.energy)
    }

    /// Largest rise of the energy between consecutive records (0 when the
    /// trace is non-increasing).
    pub fn max_energy_rise(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| w[1].energy - w[0].energy)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct QiteOutcome {
    pub trace: QiteTrace,
    /// Normalized mode-register state (ancillas projected on `|0…0>`).
    pub state: HybridState,
    pub energy: f64,
}

/// `exp(-Δτ H_quad)` as one exact exponential per mode.
pub fn quad_factor_circuit(model: &SineGordonModel, dtau: f64, n_qubits: usize) -> Result<Circuit> {
    let mut c = Circuit::new(model.register(n_qubits)?);
    for mode in 0..model.params().sites() {
        c.push(Gate::Operator {
            label: "QUAD_IM".into(),
            matrix: Arc::new(model.quad_exponential(mode, C64::new(-dtau, 0.0))?),
            targets: vec![Subsystem::Mode(mode)],
        })?;
    }
    Ok(c)
}

/// `exp(-Δτ H_pot)` up to the constant `e^{-Δτ L m²/β²}`.
pub fn pot_factor_circuit(model: &SineGordonModel, config: &QiteConfig) -> Result<Circuit> {
    let shape = model.register(config.pot_mode.ancillas())?;
    let dtau = config.dtau;
    let scale = model.params().potential_scale();
    let mut c = Circuit::new(shape);
    if scale == 0.0 {
        return Ok(c);
    }
    for site in 0..model.params().sites() {
        let (terms, shift) = model.cosine_argument(site);
        match config.pot_mode {
            PotentialMode::Reference => {
                c.push(Gate::CosineOfPosition {
                    weight: C64::new(dtau * scale, 0.0),
                    terms,
                    shift,
                })?;
            }
            PotentialMode::CompiledNonUnitary => {
                let layout = AncillaLayout::new(shape, 0, 1, Some(2))?;
                let arg = HermitianArg::linear_terms(terms, shift)?;
                c.extend(&nonunitary_trig_circuit(TrigKind::Cos, &arg, -dtau * scale, config.trig_schedule, &layout)?)?;
            }
        }
    }
    Ok(c)
}

/// One imaginary-time step (quadratic factor, then potential factor).
pub fn qite_step_circuit(model: &SineGordonModel, config: &QiteConfig) -> Result<Circuit> {
    let mut c = quad_factor_circuit(model, config.dtau, config.pot_mode.ancillas())?;
    c.extend(&pot_factor_circuit(model, config)?)?;
    Ok(c)
}

/// Runs `config.steps` imaginary-time steps from `initial` (a mode-register
/// state), renormalizing after every factor.
///
/// With `ground` given, the initial overlap is checked and each record
/// carries the fidelity against it.
pub fn qite_run(model: &SineGordonModel, config: &QiteConfig, initial: &HybridState, ground: Option<&LowState>) -> Result<QiteOutcome> {
    let mode_shape = model.register(0)?;
    if *initial.shape() != mode_shape {
        return Err(Error::DimensionMismatch {
            expected: mode_shape.dim(),
            found: initial.shape().dim(),
        });
    }
    if let Some(g) = ground {
        let overlap = initial.fidelity(&g.state)?;
        if overlap < 1e-14 {
            return Err(Error::param(format!("initial state has overlap {overlap:e} with the ground state")));
        }
    }
    let h = HamiltonianOperator::new(model)?;
    let nq = config.pot_mode.ancillas();
    let mut state = HybridState::with_qubits(&vec![0; nq], initial)?;
    state.normalize()?;
    state.reset_norm_factor();

    let quad = quad_factor_circuit(model, config.dtau, nq)?.compile()?;
    let pot = pot_factor_circuit(model, config)?.compile()?;
    let dropped = match config.pot_mode {
        PotentialMode::Reference => -config.dtau * model.params().sites() as f64 * model.params().potential_scale(),
        PotentialMode::CompiledNonUnitary => 0.0,
    };

    let record = |state: &HybridState, tau: f64, log_weight: f64| -> Result<QiteRecord> {
        Ok(QiteRecord {
            tau,
            energy: h.expectation(state)?,
            fidelity: ground.map(|g| state.mode_fidelity(&g.state)).transpose()?,
            success_probability: (2.0 * log_weight).exp(),
        })
    };
    let mut log_weight = 0.0;
    let mut records = vec![record(&state, 0.0, 0.0)?];
    for step in 1..=config.steps {
        for program in [&quad, &pot] {
            program.run(&mut state, POSTSELECTION_FLOOR)?;
            state.normalize()?;
        }
        log_weight += state.norm_factor().ln() + dropped;
        state.reset_norm_factor();
        records.push(record(&state, step as f64 * config.dtau, log_weight)?);
    }

    let mut modes = state.mode_block(&vec![0; nq])?;
    modes.normalize()?;
    modes.reset_norm_factor();
    let energy = records.last().map(|r| r.energy).unwrap_or_default();
    Ok(QiteOutcome {
        trace: QiteTrace { records },
        state: modes,
        energy,
    })
}
