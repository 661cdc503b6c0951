//! Lattice sine-Gordon model with periodic boundaries, unit lattice spacing,
//! written in the real-DFT mode basis where the quadratic part is a sum of
//! independent oscillators.

mod evolution;
mod hamiltonian;

pub use evolution::{
    survival_series, survival_series_auto, trotter_evolve, AutoRefinement, Evolution, EvolutionMode, SurvivalPoint,
    TrotterPropagator,
};
pub use hamiltonian::{energy_estimate, hamiltonian_matrix, lowest_states, HamiltonianOperator, LowState, DENSE_LIMIT};

use crate::error::{Error, Result};
use crate::fock::{momentum, position, PositionBasis};
use crate::operator::{matrix_exponential, OperatorMatrix};
use crate::register::{FockCutoff, RegisterShape};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SineGordonParams {
    sites: usize,
    mass: f64,
    beta: f64,
}

impl SineGordonParams {
    /// `sites ≥ 1`, `mass ≥ 0`, `beta > 0`. A single site has no gradient term.
    pub fn new(sites: usize, mass: f64, beta: f64) -> Result<Self> {
        if sites == 0 {
            return Err(Error::param("lattice needs at least one site"));
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::param(format!("mass must be finite and non-negative, got {mass}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::param(format!("beta must be finite and positive, got {beta}")));
        }
        Ok(Self { sites, mass, beta })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `m²/β²`, the amplitude of every cosine term.
    pub fn potential_scale(&self) -> f64 {
        self.mass * self.mass / (self.beta * self.beta)
    }
}

/// Weights of the mode oscillators `A_s p_s² + B_s x_s²`.
///
/// `Printed` uses 1/4 weights on the paired (non-zero, non-Nyquist) modes
/// and 1/2 on the zero and Nyquist modes. `Canonical` uses 1/2 everywhere,
/// which is what the orthogonal basis change of `½Σπ² + ½φᵀKφ` gives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadNormalization {
    #[default]
    Printed,
    Canonical,
}

/// Circulant nearest-neighbour Laplacian with first row `(2, -1, 0, …, 0, -1)`.
pub fn coupling_matrix(sites: usize) -> DMatrix<f64> {
    let mut k = DMatrix::<f64>::zeros(sites, sites);
    for n in 0..sites {
        k[(n, n)] += 2.0;
        k[(n, (n + 1) % sites)] -= 1.0;
        k[(n, (n + sites - 1) % sites)] -= 1.0;
    }
    k
}

/// `ω_s² = 2 - 2 cos(2πs/L)`
pub fn mode_frequencies_sq(sites: usize) -> Vec<f64> {
    (0..sites)
        .map(|s| 2.0 - 2.0 * (2.0 * PI * s as f64 / sites as f64).cos())
        .collect()
}

/// `V` with `φ_n = Σ_s V_ns x_s`; the transpose of the real-DFT matrix whose
/// rows are the constant mode, cosine modes, the Nyquist mode (even L) and
/// sine modes.
pub fn real_dft_matrix(sites: usize) -> DMatrix<f64> {
    let l = sites as f64;
    let mut m = DMatrix::<f64>::zeros(sites, sites);
    for s in 0..sites {
        for n in 0..sites {
            let angle = 2.0 * PI * (n * s) as f64 / l;
            m[(s, n)] = if s == 0 {
                1.0 / l.sqrt()
            } else if 2 * s < sites {
                (2.0 / l).sqrt() * angle.cos()
            } else if 2 * s == sites {
                (if n % 2 == 0 { 1.0 } else { -1.0 }) / l.sqrt()
            } else {
                (2.0 / l).sqrt() * angle.sin()
            };
        }
    }
    m.transpose()
}

pub fn quad_coefficients(sites: usize, normalization: QuadNormalization) -> (Vec<f64>, Vec<f64>) {
    let omega_sq = mode_frequencies_sq(sites);
    (0..sites)
        .map(|s| {
            let paired = s != 0 && 2 * s != sites;
            let w = match normalization {
                QuadNormalization::Printed if paired => 0.25,
                _ => 0.5,
            };
            (w, if s == 0 { 0.0 } else { w * omega_sq[s] })
        })
        .unzip()
}

/// Squeeze-rotate-squeeze parameters for `A p² + B x²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SrsParameters {
    /// `r = ¼ ln(A/B)`
    pub r: f64,
    /// `Ω = 2√(AB)`
    pub omega: f64,
}

pub fn srs_parameters(a: f64, b: f64) -> Result<SrsParameters> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::param(format!("squeeze-rotate-squeeze needs A, B > 0, got A={a}, B={b}")));
    }
    Ok(SrsParameters {
        r: 0.25 * (a / b).ln(),
        omega: 2.0 * (a * b).sqrt(),
    })
}

/// Mode-basis data derived from the lattice size.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierData {
    v: DMatrix<f64>,
    omega_sq: Vec<f64>,
    a_coeff: Vec<f64>,
    b_coeff: Vec<f64>,
    srs: Vec<Option<SrsParameters>>,
}

impl FourierData {
    pub fn new(sites: usize, normalization: QuadNormalization) -> Self {
        let (a_coeff, b_coeff) = quad_coefficients(sites, normalization);
        let srs = a_coeff
            .iter()
            .zip(&b_coeff)
            .map(|(&a, &b)| srs_parameters(a, b).ok())
            .collect();
        Self {
            v: real_dft_matrix(sites),
            omega_sq: mode_frequencies_sq(sites),
            a_coeff,
            b_coeff,
            srs,
        }
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn omega_sq(&self) -> &[f64] {
        &self.omega_sq
    }

    pub fn a_coeff(&self) -> &[f64] {
        &self.a_coeff
    }

    pub fn b_coeff(&self) -> &[f64] {
        &self.b_coeff
    }

    /// `None` for the zero mode, which has no restoring force.
    pub fn srs(&self) -> &[Option<SrsParameters>] {
        &self.srs
    }

    /// Mode amplitudes `Vᵀ φ` of a site profile.
    pub fn project(&self, phi: &[f64]) -> Vec<f64> {
        (0..self.v.ncols())
            .map(|s| (0..self.v.nrows()).map(|n| self.v[(n, s)] * phi[n]).sum())
            .collect()
    }

    /// Site profile `V x` of mode amplitudes.
    pub fn reconstruct(&self, modes: &[f64]) -> Vec<f64> {
        (0..self.v.nrows())
            .map(|n| (0..self.v.ncols()).map(|s| self.v[(n, s)] * modes[s]).sum())
            .collect()
    }
}

/// A sine-Gordon lattice at a given Fock cutoff, optionally expanded around a
/// static classical background `φ^cl` (the kink sector). The background
/// shifts every cosine argument; the quadratic part is unchanged.
#[derive(Clone, Debug)]
pub struct SineGordonModel {
    params: SineGordonParams,
    cutoff: FockCutoff,
    normalization: QuadNormalization,
    fourier: FourierData,
    background: Option<Vec<f64>>,
    basis: PositionBasis,
}

impl SineGordonModel {
    pub fn new(params: SineGordonParams, cutoff: FockCutoff) -> Result<Self> {
        Self::with_normalization(params, cutoff, QuadNormalization::default())
    }

    pub fn with_normalization(params: SineGordonParams, cutoff: FockCutoff, normalization: QuadNormalization) -> Result<Self> {
        RegisterShape::new(0, params.sites(), cutoff)?;
        Ok(Self {
            params,
            cutoff,
            normalization,
            fourier: FourierData::new(params.sites(), normalization),
            background: None,
            basis: PositionBasis::new(cutoff),
        })
    }

    /// Expands the cosine terms around `phi` (one value per site).
    pub fn with_background(mut self, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != self.params.sites() {
            return Err(Error::DimensionMismatch {
                expected: self.params.sites(),
                found: phi.len(),
            });
        }
        if phi.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("classical background"));
        }
        self.background = Some(phi);
        Ok(self)
    }

    pub fn params(&self) -> &SineGordonParams {
        &self.params
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn normalization(&self) -> QuadNormalization {
        self.normalization
    }

    pub fn fourier(&self) -> &FourierData {
        &self.fourier
    }

    pub fn position_basis(&self) -> &PositionBasis {
        &self.basis
    }

    /// Classical profile per site (zeros without a background).
    pub fn background(&self) -> Vec<f64> {
        self.background
            .clone()
            .unwrap_or_else(|| vec![0.0; self.params.sites()])
    }

    /// Mode register with `n_qubits` ancillas in front.
    pub fn register(&self, n_qubits: usize) -> Result<RegisterShape> {
        RegisterShape::new(n_qubits, self.params.sites(), self.cutoff)
    }

    /// `A_s p² + B_s x²` on one mode.
    pub fn quad_local(&self, mode: usize) -> OperatorMatrix {
        let x = position(self.cutoff);
        let p = momentum(self.cutoff);
        &(&p * &p).scale_real(self.fourier.a_coeff[mode]) + &(&x * &x).scale_real(self.fourier.b_coeff[mode])
    }

    /// `exp(scale · (A_s p² + B_s x²))`
    pub fn quad_exponential(&self, mode: usize, scale: C64) -> Result<OperatorMatrix> {
        matrix_exponential(&self.quad_local(mode), scale)
    }

    /// `(Σ_s β V_ns x_s, β φ^cl_n)`: mode coefficients and constant of the
    /// cosine argument at `site`.
    pub fn cosine_argument(&self, site: usize) -> (Vec<(usize, f64)>, f64) {
        let beta = self.params.beta();
        let terms = (0..self.params.sites())
            .map(|s| (s, beta * self.fourier.v[(site, s)]))
            .collect();
        let shift = beta * self.background.as_ref().map_or(0.0, |b| b[site]);
        (terms, shift)
    }

    /// Potential `(m²/β²) Σ_n (1 - cos β(φ_n + φ^cl_n))` on the product
    /// position grid, first mode slowest.
    pub fn potential_diagonal(&self) -> Vec<f64> {
        let l = self.cutoff.levels();
        let sites = self.params.sites();
        let nodes = self.basis.nodes();
        let scale = self.params.potential_scale();
        let args: Vec<(Vec<(usize, f64)>, f64)> = (0..sites).map(|n| self.cosine_argument(n)).collect();
        let mut digits = vec![0usize; sites];
        (0..l.pow(sites as u32))
            .map(|idx| {
                let mut rest = idx;
                for d in digits.iter_mut().rev() {
                    *d = rest % l;
                    rest /= l;
                }
                args.iter()
                    .map(|(terms, shift)| {
                        let arg: f64 = shift + terms.iter().map(|(s, c)| c * nodes[digits[*s]]).sum::<f64>();
                        scale * (1.0 - arg.cos())
                    })
                    .sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{momentum, position};
    use crate::register::{embed, Subsystem};

    #[test]
    fn coupling_small_cases() {
        let k3 = coupling_matrix(3);
        let expect = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        assert_eq!(k3, expect);
        let k2 = coupling_matrix(2);
        assert_eq!(k2, DMatrix::from_row_slice(2, 2, &[2.0, -2.0, -2.0, 2.0]));
        assert_eq!(coupling_matrix(1)[(0, 0)], 0.0);
    }

    #[test]
    fn dft_diagonalizes_coupling() {
        for l in 2..=8 {
            let v = real_dft_matrix(l);
            let id = v.transpose() * &v;
            assert!((id - DMatrix::<f64>::identity(l, l)).abs().max() < 1e-12);
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(mode_frequencies_sq(l)));
            let k = &v * d * v.transpose();
            assert!((k - coupling_matrix(l)).abs().max() < 1e-12, "L={l}");
        }
        let m2 = real_dft_matrix(2).transpose();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m2 - DMatrix::from_row_slice(2, 2, &[h, h, h, -h])).abs().max() < 1e-15);
    }

    #[test]
    fn frequencies_pair_up() {
        let w = mode_frequencies_sq(6);
        assert_eq!(w[0], 0.0);
        assert!((w[3] - 4.0).abs() < 1e-15);
        assert!((w[1] - w[5]).abs() < 1e-14);
    }

    #[test]
    fn printed_coefficients() {
        let (a, b) = quad_coefficients(3, QuadNormalization::Printed);
        assert_eq!(a, vec![0.5, 0.25, 0.25]);
        assert!((b[1] - 0.75).abs() < 1e-15 && (b[2] - 0.75).abs() < 1e-15 && b[0] == 0.0);
        let (a, b) = quad_coefficients(2, QuadNormalization::Printed);
        assert_eq!(a, vec![0.5, 0.5]);
        assert!((b[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn srs_parameter_values() {
        let p = srs_parameters(0.25, 0.75).unwrap();
        assert!((p.r - (-0.274653)).abs() < 1e-6);
        assert!((p.omega - 0.866025).abs() < 1e-6);
        let q = srs_parameters(0.3, 0.3).unwrap();
        assert_eq!(q.r, 0.0);
        assert!((q.omega - 0.6).abs() < 1e-15);
        assert!(srs_parameters(0.5, 0.0).is_err());
    }

    #[test]
    fn canonical_quadratic_reconstructs_lattice_form() {
        // Σ_s ½ p_s² + ½ ω_s² x_s² versus ½ Σ π_n² + ½ φᵀ K φ with φ = V x, π = V p.
        let l = 3;
        let cut = FockCutoff::new(8).unwrap();
        let shape = RegisterShape::new(0, l, cut).unwrap();
        let (a, b) = quad_coefficients(l, QuadNormalization::Canonical);
        let x = position(cut);
        let p = momentum(cut);
        let xs: Vec<_> = (0..l).map(|s| embed(&x, &[Subsystem::Mode(s)], &shape).unwrap()).collect();
        let ps: Vec<_> = (0..l).map(|s| embed(&p, &[Subsystem::Mode(s)], &shape).unwrap()).collect();
        let mut mode_form = OperatorMatrix::zeros(shape.dim());
        for s in 0..l {
            mode_form = &mode_form + &(&(&ps[s] * &ps[s]).scale_real(a[s]) + &(&xs[s] * &xs[s]).scale_real(b[s]));
        }
        let v = real_dft_matrix(l);
        let k = coupling_matrix(l);
        let combo = |ops: &[OperatorMatrix], n: usize| {
            (0..l).fold(OperatorMatrix::zeros(shape.dim()), |acc, s| &acc + &ops[s].scale_real(v[(n, s)]))
        };
        let phi: Vec<_> = (0..l).map(|n| combo(&xs, n)).collect();
        let pi: Vec<_> = (0..l).map(|n| combo(&ps, n)).collect();
        let mut lattice = OperatorMatrix::zeros(shape.dim());
        for n in 0..l {
            lattice = &lattice + &(&pi[n] * &pi[n]).scale_real(0.5);
            for m in 0..l {
                lattice = &lattice + &(&phi[n] * &phi[m]).scale_real(0.5 * k[(n, m)]);
            }
        }
        assert!(mode_form.max_abs_diff(&lattice) < 1e-8);
    }

    #[test]
    fn projection_round_trip() {
        let f = FourierData::new(5, QuadNormalization::Printed);
        let phi = [0.0, 0.3, 1.7, 2.2, 3.1];
        let back = f.reconstruct(&f.project(&phi));
        for (a, b) in back.iter().zip(phi) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn params_validate() {
        assert!(SineGordonParams::new(0, 1.0, 1.0).is_err());
        assert!(SineGordonParams::new(3, 1.0, 0.0).is_err());
        assert!(SineGordonParams::new(3, -1.0, 1.0).is_err());
        assert!((SineGordonParams::new(3, 2.0, 4.0).unwrap().potential_scale() - 0.25).abs() < 1e-15);
    }
}
