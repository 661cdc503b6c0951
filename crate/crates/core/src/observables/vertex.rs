use crate::error::{Error, Result};
use crate::gates::displacement;
use crate::operator::{OperatorMatrix, Spectrum};
use crate::register::Subsystem;
use crate::sinegordon::{EvolutionMode, LowState, SineGordonModel, TrotterPropagator, DENSE_LIMIT, hamiltonian_matrix};
use crate::state::HybridState;
use crate::trig::TrotterSchedule;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Per-mode factors of `e^{iαφ_n}` with `φ_n = Σ_s V_ns x_s`: the
/// displacements `D(iαV_ns/√2) = e^{iαV_ns x_s}`.
pub fn vertex_factors(model: &SineGordonModel, alpha: f64, site: usize) -> Result<Vec<OperatorMatrix>> {
    let sites = model.params().sites();
    if site >= sites {
        return Err(Error::InvalidTarget(format!("site {site} outside a lattice of {sites}")));
    }
    let v = model.fourier().v();
    (0..sites)
        .map(|s| displacement(C64::new(0.0, alpha * v[(site, s)] / SQRT_2), model.cutoff()))
        .collect()
}

/// `e^{iα(φ_n + φ^cl_n)} |ψ>` in place.
pub fn apply_vertex(state: &mut HybridState, model: &SineGordonModel, alpha: f64, site: usize) -> Result<()> {
    for (s, f) in vertex_factors(model, alpha, site)?.iter().enumerate() {
        state.apply(f, &[Subsystem::Mode(s)])?;
    }
    let phase = C64::from_polar(1.0, alpha * model.background()[site]);
    state.amplitudes_mut().iter_mut().for_each(|a| *a *= phase);
    Ok(())
}

/// `<ψ| e^{iαφ_n} |ψ>`
pub fn vertex_expectation(state: &HybridState, model: &SineGordonModel, alpha: f64, site: usize) -> Result<C64> {
    let mut moved = state.clone();
    apply_vertex(&mut moved, model, alpha, site)?;
    state.inner(&moved)
}

/// How `U(t) = e^{-iHt}` is applied between grid points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Propagator {
    /// Reference-mode Trotter steps; `schedule.steps()` per grid interval.
    Trotter(TrotterSchedule),
    /// Exact, through a dense eigendecomposition (small registers only).
    Spectral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexConfig {
    pub alpha: f64,
    pub site_n: usize,
    pub site_k: usize,
    /// Ascending, starting at 0.
    pub t_grid: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorPoint {
    pub t: f64,
    pub value: C64,
}

/// Connected correlator
/// `G_c(t) = e^{iE₀t} <Ω|e^{iαφ_n} U(t) e^{-iαφ_k}|Ω> - <e^{iαφ_n}><e^{-iαφ_k}>`
/// with `Ω` and `E₀` taken from `ground`.
pub fn vertex_correlator_series(
    model: &SineGordonModel,
    ground: &LowState,
    config: &VertexConfig,
    propagator: Propagator,
) -> Result<Vec<CorrelatorPoint>> {
    let grid = &config.t_grid;
    if grid.first() != Some(&0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("correlator time grid must start at 0 and increase"));
    }
    let omega = &ground.state;
    let (alpha, n, k) = (config.alpha, config.site_n, config.site_k);
    let disconnected = vertex_expectation(omega, model, alpha, n)? * vertex_expectation(omega, model, -alpha, k)?;

    // bra = e^{-iαφ_n}|Ω>, ket(t) = U(t) e^{-iαφ_k}|Ω>
    let mut bra = omega.clone();
    apply_vertex(&mut bra, model, -alpha, n)?;
    let mut ket = omega.clone();
    apply_vertex(&mut ket, model, -alpha, k)?;

    let mut out = Vec::with_capacity(grid.len());
    let point = |t: f64, ket: &HybridState, phase: f64| -> Result<CorrelatorPoint> {
        let full = bra.inner(ket)? * C64::from_polar(1.0, ground.energy * t + phase);
        Ok(CorrelatorPoint {
            t,
            value: full - disconnected,
        })
    };
    match propagator {
        Propagator::Trotter(schedule) => {
            let mut prop = TrotterPropagator::new(model, schedule.order(), EvolutionMode::Reference);
            let mut phase = 0.0;
            out.push(point(0.0, &ket, 0.0)?);
            for w in grid.windows(2) {
                let dt = (w[1] - w[0]) / schedule.steps() as f64;
                phase += prop.advance(&mut ket, dt, schedule.steps())?;
                out.push(point(w[1], &ket, phase)?);
            }
        }
        Propagator::Spectral => {
            let dim = model.register(0)?.dim();
            if dim > DENSE_LIMIT {
                return Err(Error::DimensionGuard { dim, limit: DENSE_LIMIT });
            }
            let spec = Spectrum::of(&hamiltonian_matrix(model)?)?;
            let coeffs = spec.vectors.adjoint() * nalgebra::DVector::from_column_slice(ket.amplitudes());
            for &t in grid {
                let evolved: Vec<C64> = coeffs
                    .iter()
                    .zip(&spec.values)
                    .map(|(c, e)| c * C64::from_polar(1.0, -e * t))
                    .collect();
                let amps = &spec.vectors * nalgebra::DVector::from_vec(evolved);
                let state = HybridState::from_amplitudes(*ket.shape(), amps.as_slice().to_vec())?;
                out.push(point(t, &state, 0.0)?);
            }
        }
    }
    Ok(out)
}
