use super::SineGordonModel;
use crate::error::{Error, Result};
use crate::lanczos::{lowest_eigenpairs, LanczosOptions};
use crate::operator::OperatorMatrix;
use crate::register::{RegisterShape, Subsystem, TargetLayout};
use crate::state::{apply_dense, HybridState};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Largest mode-register dimension for which a dense Hamiltonian is built.
pub const DENSE_LIMIT: usize = 4096;

/// Matrix-free `H = Σ_s (A_s p_s² + B_s x_s²) + V_pot` on the mode register.
pub struct HamiltonianOperator {
    shape: RegisterShape,
    quad: Vec<(TargetLayout, DMatrix<C64>)>,
    to_position: DMatrix<C64>,
    from_position: DMatrix<C64>,
    mode_layouts: Vec<TargetLayout>,
    potential: Vec<f64>,
}

impl HamiltonianOperator {
    pub fn new(model: &SineGordonModel) -> Result<Self> {
        let shape = model.register(0)?;
        let sites = model.params().sites();
        let mode_layouts = (0..sites)
            .map(|s| shape.layout(&[Subsystem::Mode(s)]))
            .collect::<Result<Vec<_>>>()?;
        let quad = mode_layouts
            .iter()
            .enumerate()
            .map(|(s, l)| (l.clone(), model.quad_local(s).into_matrix()))
            .collect();
        let w = model.position_basis().vectors().map(|v| C64::new(v, 0.0));
        Ok(Self {
            shape,
            quad,
            to_position: w.transpose(),
            from_position: w,
            mode_layouts,
            potential: model.potential_diagonal(),
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    /// `out = H v`
    pub fn apply(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        let mut tmp = v.to_vec();
        for (layout, m) in &self.quad {
            tmp.copy_from_slice(v);
            apply_dense(&mut tmp, m, layout);
            out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += t);
        }
        tmp.copy_from_slice(v);
        for l in &self.mode_layouts {
            apply_dense(&mut tmp, &self.to_position, l);
        }
        tmp.iter_mut().zip(&self.potential).for_each(|(t, p)| *t *= p);
        for l in &self.mode_layouts {
            apply_dense(&mut tmp, &self.from_position, l);
        }
        out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += t);
    }

    /// `<ψ|H|ψ> / <ψ|ψ>`, with `H` acting on the modes of every qubit block.
    pub fn expectation(&self, state: &HybridState) -> Result<f64> {
        let md = self.dim();
        if state.shape().mode_dim() != md || state.shape().n_modes() != self.shape.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: md,
                found: state.shape().mode_dim(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); md];
        let mut num = C64::new(0.0, 0.0);
        let mut norm2 = 0.0;
        for block in state.amplitudes().chunks(md) {
            self.apply(block, &mut out);
            num += block.iter().zip(&out).map(|(a, b)| a.conj() * b).sum::<C64>();
            norm2 += block.iter().map(|a| a.norm_sqr()).sum::<f64>();
        }
        if norm2 < 1e-300 {
            return Err(Error::VanishingNorm);
        }
        Ok(num.re / norm2)
    }
}

/// Dense Hamiltonian on the mode register (first mode slowest).
pub fn hamiltonian_matrix(model: &SineGordonModel) -> Result<OperatorMatrix> {
    let op = HamiltonianOperator::new(model)?;
    let n = op.dim();
    if n > DENSE_LIMIT {
        return Err(Error::DimensionGuard { dim: n, limit: DENSE_LIMIT });
    }
    let mut m = DMatrix::<C64>::zeros(n, n);
    let mut e = vec![C64::new(0.0, 0.0); n];
    let mut col = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = C64::new(1.0, 0.0);
        op.apply(&e, &mut col);
        m.set_column(j, &nalgebra::DVector::from_column_slice(&col));
        e[j] = C64::new(0.0, 0.0);
    }
    // Symmetrize away rounding from the position-basis round trip.
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Ok(OperatorMatrix::from_matrix(m))
}

/// `<ψ|H|ψ>` for a normalized state on the model's modes (any ancillas are
/// traced over).
pub fn energy_estimate(state: &HybridState, model: &SineGordonModel) -> Result<f64> {
    HamiltonianOperator::new(model)?.expectation(state)
}

/// An eigenpair of the Hamiltonian on the mode register.
#[derive(Clone, Debug)]
pub struct LowState {
    pub energy: f64,
    pub state: HybridState,
}

/// The `k` lowest eigenstates, by Lanczos on the matrix-free Hamiltonian.
pub fn lowest_states(model: &SineGordonModel, k: usize) -> Result<Vec<LowState>> {
    let op = HamiltonianOperator::new(model)?;
    let n = op.dim();
    // Vacuum plus a small deterministic spread so every symmetry sector is seeded.
    let mut seed = 0x9E37_79B9_7F4A_7C15u64;
    let start: Vec<C64> = (0..n)
        .map(|i| {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            let r = (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            C64::new(if i == 0 { 1.0 } else { 0.0 } + 0.05 * r, 0.0)
        })
        .collect();
    let pairs = lowest_eigenpairs(n, k, |v, out| op.apply(v, out), &start, LanczosOptions::default())?;
    pairs
        .into_iter()
        .map(|p| {
            let mut amps = p.vector;
            // Fix the global phase: largest component real and positive.
            let (imax, _) = amps
                .iter()
                .enumerate()
                .fold((0, 0.0), |acc, (i, a)| if a.norm() > acc.1 { (i, a.norm()) } else { acc });
            let ph = amps[imax].conj() / amps[imax].norm();
            amps.iter_mut().for_each(|a| *a *= ph);
            Ok(LowState {
                energy: p.value,
                state: HybridState::from_amplitudes(*op.shape(), amps)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::hermitian_eigensolve;
    use crate::register::FockCutoff;
    use crate::sinegordon::{SineGordonParams, SineGordonModel};

    fn model(l: usize, lam: usize, m: f64, beta: f64) -> SineGordonModel {
        SineGordonModel::new(SineGordonParams::new(l, m, beta).unwrap(), FockCutoff::new(lam).unwrap()).unwrap()
    }

    #[test]
    fn dense_is_hermitian_and_matches_lanczos() {
        let mdl = model(2, 8, 1.0, 1.3);
        let h = hamiltonian_matrix(&mdl).unwrap();
        assert!(h.hermiticity_residual() < 1e-12);
        let dense = hermitian_eigensolve(&h, 2).unwrap();
        let low = lowest_states(&mdl, 2).unwrap();
        for (d, l) in dense.iter().zip(&low) {
            assert!((d.value - l.energy).abs() < 1e-9);
        }
        let e = energy_estimate(&low[0].state, &mdl).unwrap();
        assert!((e - low[0].energy).abs() < 1e-9);
    }

    #[test]
    fn large_beta_leaves_quadratic_part() {
        let mdl = model(2, 6, 1.0, 1e4);
        let h = hamiltonian_matrix(&mdl).unwrap();
        let mut quad = OperatorMatrix::zeros(36);
        let shape = mdl.register(0).unwrap();
        for s in 0..2 {
            quad = &quad + &crate::register::embed(&mdl.quad_local(s), &[Subsystem::Mode(s)], &shape).unwrap();
        }
        assert!(h.max_abs_diff(&quad) < 1e-6);
    }

    #[test]
    fn vacuum_energy_without_mass() {
        // m = 0: <vac| Σ A p² + B x² |vac> = Σ (A + B)/2.
        let mdl = model(3, 8, 0.0, 1.0);
        let vac = HybridState::vacuum(mdl.register(0).unwrap());
        let e = energy_estimate(&vac, &mdl).unwrap();
        let f = mdl.fourier();
        let expect: f64 = f.a_coeff().iter().zip(f.b_coeff()).map(|(a, b)| (a + b) / 2.0).sum();
        assert!((e - expect).abs() < 1e-12);
    }

    #[test]
    fn dense_guard() {
        let mdl = model(5, 6, 1.0, 1.0);
        assert!(matches!(hamiltonian_matrix(&mdl), Err(Error::DimensionGuard { .. })));
    }
}
