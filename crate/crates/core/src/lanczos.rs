//! Matrix-free Lanczos for the lowest eigenpairs of a Hermitian operator.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub max_krylov: usize,
    /// Residual `‖Hv - θv‖` accepted for every requested pair.
    pub tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_krylov: 600,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RitzPair {
    pub value: f64,
    pub vector: Vec<C64>,
    pub residual: f64,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lowest `k` eigenpairs of the Hermitian operator `apply` (`out = H v`)
/// using Lanczos with full reorthogonalization.
pub fn lowest_eigenpairs<F>(dim: usize, k: usize, mut apply: F, start: &[C64], opts: LanczosOptions) -> Result<Vec<RitzPair>>
where
    F: FnMut(&[C64], &mut [C64]),
{
    if start.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: start.len(),
        });
    }
    let k = k.min(dim);
    let q0n = norm(start);
    if q0n == 0.0 || !q0n.is_finite() {
        return Err(Error::param("Lanczos start vector must be nonzero"));
    }
    let max_m = opts.max_krylov.min(dim).max(k);
    let mut basis: Vec<Vec<C64>> = vec![start.iter().map(|v| v / q0n).collect()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); dim];
    loop {
        let j = basis.len() - 1;
        apply(&basis[j], &mut w);
        let alpha = dot(&basis[j], &w).re;
        alphas.push(alpha);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for q in &basis {
                let proj = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let beta = norm(&w);
        let m = alphas.len();
        let exhausted = beta < 1e-12 * alpha.abs().max(1.0) || m >= max_m;
        if m >= k && (m % 8 == 0 || exhausted) {
            let mut t = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alphas[i];
                if i + 1 < m {
                    t[(i, i + 1)] = betas[i];
                    t[(i + 1, i)] = betas[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let estimates: Vec<f64> = order[..k]
                .iter()
                .map(|&i| (beta * eig.eigenvectors[(m - 1, i)]).abs())
                .collect();
            let converged = estimates.iter().all(|&e| e < 0.1 * opts.tol);
            if converged || exhausted {
                let mut out = Vec::with_capacity(k);
                for &i in &order[..k] {
                    let y = eig.eigenvectors.column(i);
                    let mut v = vec![C64::new(0.0, 0.0); dim];
                    for (q, &yc) in basis.iter().zip(y.iter()) {
                        v.iter_mut().zip(q).for_each(|(x, qv)| *x += qv * yc);
                    }
                    let nv = norm(&v);
                    v.iter_mut().for_each(|x| *x /= nv);
                    let theta = eig.eigenvalues[i];
                    apply(&v, &mut w);
                    let residual = w
                        .iter()
                        .zip(&v)
                        .map(|(hv, x)| (hv - x * theta).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    out.push(RitzPair {
                        value: theta,
                        vector: v,
                        residual,
                    });
                }
                if let Some(bad) = out.iter().find(|p| p.residual > opts.tol) {
                    return Err(Error::NoConvergence(format!(
                        "Lanczos residual {:.2e} after {m} iterations",
                        bad.residual
                    )));
                }
                return Ok(out);
            }
        }
        if exhausted {
            return Err(Error::NoConvergence("Lanczos subspace exhausted".into()));
        }
        betas.push(beta);
        basis.push(w.iter().map(|v| v / beta).collect());
    }
}
