//! Ladder and quadrature operators on a truncated Fock space.
//!
//! Operators are built directly in the truncated space; nothing here
//! truncates a product of infinite matrices.

use crate::operator::{OperatorMatrix, Spectrum};
use crate::register::FockCutoff;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::f64::consts::SQRT_2;

/// `a` with `a[n-1][n] = sqrt(n)`.
pub fn annihilation(cutoff: FockCutoff) -> OperatorMatrix {
    let l = cutoff.levels();
    let mut m = DMatrix::<f64>::zeros(l, l);
    for n in 1..l {
        m[(n - 1, n)] = (n as f64).sqrt();
    }
    OperatorMatrix::from_real(&m)
}

pub fn creation(cutoff: FockCutoff) -> OperatorMatrix {
    annihilation(cutoff).adjoint()
}

pub fn number(cutoff: FockCutoff) -> OperatorMatrix {
    let diag: Vec<C64> = (0..cutoff.levels()).map(|n| C64::new(n as f64, 0.0)).collect();
    OperatorMatrix::from_diagonal(&diag)
}

/// `x = (a + a†)/sqrt(2)`
pub fn position(cutoff: FockCutoff) -> OperatorMatrix {
    let a = annihilation(cutoff);
    (&a + &a.adjoint()).scale_real(1.0 / SQRT_2)
}

/// `p = -i (a - a†)/sqrt(2)`
pub fn momentum(cutoff: FockCutoff) -> OperatorMatrix {
    let a = annihilation(cutoff);
    (&a - &a.adjoint()).scale(C64::new(0.0, -1.0 / SQRT_2))
}

/// Eigenbasis of the truncated position operator: `x = W diag(xi) Wᵀ`
/// with `W` real orthogonal.
#[derive(Clone, Debug)]
pub struct PositionBasis {
    nodes: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl PositionBasis {
    pub fn new(cutoff: FockCutoff) -> Self {
        let x = position(cutoff);
        let spec = Spectrum::of(&x).expect("truncated position operator is real symmetric");
        let mut vectors = spec.vectors.map(|v| v.re);
        // Fix the sign of each column so the basis is reproducible.
        for j in 0..vectors.ncols() {
            let (imax, _) = vectors
                .column(j)
                .iter()
                .enumerate()
                .fold((0, 0.0), |acc, (i, v)| if v.abs() > acc.1 + 1e-12 { (i, v.abs()) } else { acc });
            if vectors[(imax, j)] < 0.0 {
                vectors.column_mut(j).neg_mut();
            }
        }
        Self {
            nodes: spec.values,
            vectors,
        }
    }

    pub fn levels(&self) -> usize {
        self.nodes.len()
    }

    /// Eigenvalues of the truncated `x`, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Columns are position eigenvectors in the Fock basis.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// `f(x)` in the Fock basis.
    pub fn function(&self, f: impl Fn(f64) -> C64) -> OperatorMatrix {
        let w = self.vectors.map(|v| C64::new(v, 0.0));
        let diag: Vec<C64> = self.nodes.iter().map(|&x| f(x)).collect();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
        OperatorMatrix::from_matrix(&w * d * w.transpose())
    }
}
