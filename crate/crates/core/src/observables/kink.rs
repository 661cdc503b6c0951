use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::register::{FockCutoff, Subsystem};
use crate::sinegordon::{SineGordonModel, SineGordonParams};
use crate::state::HybridState;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Fixed boundary values and minimizer settings for the classical kink.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinkConfig {
    pub phi_left: f64,
    pub phi_right: f64,
    /// Max-norm of the interior gradient at convergence.
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl KinkConfig {
    /// Boundaries `(0, 2π/β)`: one unit of topological charge.
    pub fn unit_charge(beta: f64) -> Self {
        Self::with_boundaries(0.0, 2.0 * PI / beta)
    }

    pub fn with_boundaries(phi_left: f64, phi_right: f64) -> Self {
        Self {
            phi_left,
            phi_right,
            grad_tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// Static lattice energy with open ends:
/// `Σ_{n<L-1} (φ_{n+1} - φ_n)²/2 + (m²/β²) Σ_n (1 - cos βφ_n)`.
pub fn classical_energy(params: &SineGordonParams, phi: &[f64]) -> f64 {
    let beta = params.beta();
    let gradient: f64 = phi.windows(2).map(|w| 0.5 * (w[1] - w[0]).powi(2)).sum();
    let potential: f64 = phi.iter().map(|p| 1.0 - (beta * p).cos()).sum();
    gradient + params.potential_scale() * potential
}

/// Derivative of [`classical_energy`] with respect to every interior site.
pub fn classical_gradient(params: &SineGordonParams, phi: &[f64]) -> Vec<f64> {
    let beta = params.beta();
    let m2 = params.mass().powi(2);
    (1..phi.len().saturating_sub(1))
        .map(|n| (phi[n] - phi[n - 1]) - (phi[n + 1] - phi[n]) + m2 / beta * (beta * phi[n]).sin())
        .collect()
}

fn interior_hessian(params: &SineGordonParams, phi: &[f64]) -> DMatrix<f64> {
    let k = phi.len() - 2;
    let beta = params.beta();
    let m2 = params.mass().powi(2);
    DMatrix::from_fn(k, k, |i, j| match i.abs_diff(j) {
        0 => 2.0 + m2 * (beta * phi[i + 1]).cos(),
        1 => -1.0,
        _ => 0.0,
    })
}

/// Newton step `-(H + μ)⁻¹ g`, with the smallest shift `μ` that makes the
/// system positive definite. At negative curvature the step also moves along
/// the lowest Hessian eigenvector, so symmetric saddles are left.
fn newton_direction(hessian: DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    if let Some(ch) = hessian.clone().cholesky() {
        return -ch.solve(g);
    }
    let k = hessian.nrows();
    let eig = hessian.clone().symmetric_eigen();
    let (imin, lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &l)| if l < acc.1 { (i, l) } else { acc });
    let shifted = &hessian + DMatrix::<f64>::identity(k, k) * (1e-3 - lmin);
    let mut d = -shifted.cholesky().expect("shifted Hessian is positive definite").solve(g);
    let v = eig.eigenvectors.column(imin).into_owned();
    let sign = if v.dot(g) > 0.0 { -1.0 } else { 1.0 };
    d += v * (sign * lmin.abs().sqrt().min(1.0));
    d
}

/// Minimizes the static energy with `φ_0` and `φ_{L-1}` clamped, starting
/// from the linear interpolant, by damped Newton steps.
pub fn classical_kink(params: &SineGordonParams, config: &KinkConfig) -> Result<Vec<f64>> {
    let l = params.sites();
    if l < 2 {
        return Err(Error::param("a kink needs at least two sites"));
    }
    let (left, right) = (config.phi_left, config.phi_right);
    let mut phi: Vec<f64> = (0..l)
        .map(|n| left + (right - left) * n as f64 / (l - 1) as f64)
        .collect();
    if l == 2 {
        return Ok(phi);
    }
    let max_norm = |g: &[f64]| g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for _ in 0..config.max_iter {
        let g = classical_gradient(params, &phi);
        if max_norm(&g) < config.grad_tol && interior_hessian(params, &phi).cholesky().is_some() {
            return Ok(phi);
        }
        let gv = DVector::from_vec(g.clone());
        let direction = newton_direction(interior_hessian(params, &phi), &gv);
        let slope = direction.dot(&gv);
        let e0 = classical_energy(params, &phi);
        let g0 = max_norm(&g);
        let mut step = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = phi
                .iter()
                .enumerate()
                .map(|(n, p)| if n == 0 || n == l - 1 { *p } else { p + step * direction[n - 1] })
                .collect();
            let e = classical_energy(params, &trial);
            // Near the minimum the energy change drops below rounding; the gradient still resolves it.
            let rounding = 1e-13 * e0.abs().max(1.0);
            if e <= e0 + 1e-4 * step * slope || (e <= e0 + rounding && max_norm(&classical_gradient(params, &trial)) < g0) {
                break Some(trial);
            }
            step *= 0.5;
            if step < 1e-12 {
                break None;
            }
        };
        match accepted {
            Some(next) => phi = next,
            None => break,
        }
    }
    let g = classical_gradient(params, &phi);
    if max_norm(&g) < config.grad_tol && interior_hessian(params, &phi).cholesky().is_some() {
        return Ok(phi);
    }
    Err(Error::NoConvergence(format!(
        "classical kink gradient {:e} after {} iterations",
        max_norm(&g),
        config.max_iter
    )))
}

/// The lattice model expanded around the classical kink.
pub fn kink_model(params: SineGordonParams, cutoff: FockCutoff, config: &KinkConfig) -> Result<SineGordonModel> {
    let phi = classical_kink(&params, config)?;
    SineGordonModel::new(params, cutoff)?.with_background(phi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinkProfile {
    /// `<φ_n> = Σ_s V_ns <x_s> + φ^cl_n`
    pub mean_phi: Vec<f64>,
    /// Variance of `Σ_s V_ns x_s`; the classical shift drops out.
    pub variance: Vec<f64>,
    pub classical_phi: Vec<f64>,
}

impl KinkProfile {
    /// `(<φ_{L-1}> - <φ_0>) β / 2π`
    pub fn charge(&self, beta: f64) -> f64 {
        match (self.mean_phi.first(), self.mean_phi.last()) {
            (Some(a), Some(b)) => (b - a) * beta / (2.0 * PI),
            _ => 0.0,
        }
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.mean_phi.windows(2).all(|w| w[1] >= w[0] - tol)
    }
}

/// Field mean and variance per site in `state`, a state of `model`'s mode
/// register (qubit blocks, if any, are traced over).
pub fn kink_profile(model: &SineGordonModel, state: &HybridState) -> Result<KinkProfile> {
    let sites = model.params().sites();
    let shape = *state.shape();
    if shape.n_modes() != sites || shape.cutoff() != model.cutoff() {
        return Err(Error::DimensionMismatch {
            expected: model.register(shape.n_qubits())?.dim(),
            found: shape.dim(),
        });
    }
    let basis = model.position_basis();
    let to_position = OperatorMatrix::from_matrix(basis.vectors().transpose().map(|v| C64::new(v, 0.0)));
    let mut grid = state.clone();
    for s in 0..sites {
        grid.apply(&to_position, &[Subsystem::Mode(s)])?;
    }
    let v = model.fourier().v();
    let nodes = basis.nodes();
    let mut weight = 0.0;
    let mut first = vec![0.0; sites];
    let mut second = vec![0.0; sites];
    let md = shape.mode_dim();
    for (i, a) in grid.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        weight += p;
        let idx = i % md;
        for n in 0..sites {
            let phi: f64 = (0..sites)
                .map(|s| v[(n, s)] * nodes[shape.digit(idx, Subsystem::Mode(s))])
                .sum();
            first[n] += p * phi;
            second[n] += p * phi * phi;
        }
    }
    if weight < 1e-300 {
        return Err(Error::VanishingNorm);
    }
    let classical_phi = model.background();
    let mean_phi = (0..sites).map(|n| first[n] / weight + classical_phi[n]).collect();
    let variance = (0..sites)
        .map(|n| second[n] / weight - (first[n] / weight).powi(2))
        .collect();
    Ok(KinkProfile {
        mean_phi,
        variance,
        classical_phi,
    })
}
