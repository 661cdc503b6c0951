//! Ground-state observables of the lattice model: vertex-operator
//! correlators and quantum kink profiles.

mod kink;
mod vertex;

pub use kink::{
    classical_energy, classical_gradient, classical_kink, kink_model, kink_profile, KinkConfig, KinkProfile,
};
pub use vertex::{
    apply_vertex, vertex_correlator_series, vertex_expectation, vertex_factors, CorrelatorPoint, Propagator, VertexConfig,
};

use crate::error::Result;
use crate::qite::{qite_run, QiteConfig};
use crate::sinegordon::{lowest_states, LowState, SineGordonModel};
use crate::state::HybridState;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Where the ground state comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundSource {
    /// Exact diagonalization (Lanczos on the truncated Hamiltonian).
    Ed,
    /// Imaginary-time evolution from the vacuum; the energy is the final
    /// estimate of the run.
    Qite,
}

impl fmt::Display for GroundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroundSource::Ed => "ED",
            GroundSource::Qite => "QITE",
        })
    }
}

impl FromStr for GroundSource {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ed" => Ok(GroundSource::Ed),
            "qite" => Ok(GroundSource::Qite),
            other => Err(crate::Error::param(format!("unknown ground source '{other}'"))),
        }
    }
}

/// Ground state and energy from the chosen source.
pub fn prepare_ground(model: &SineGordonModel, source: GroundSource, qite: &QiteConfig) -> Result<LowState> {
    match source {
        GroundSource::Ed => Ok(lowest_states(model, 1)?.remove(0)),
        GroundSource::Qite => {
            let vac = HybridState::vacuum(model.register(0)?);
            let out = qite_run(model, qite, &vac, None)?;
            Ok(LowState {
                energy: out.energy,
                state: out.state,
            })
        }
    }
}
