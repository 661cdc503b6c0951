//! Dense complex operators, the matrix exponential and Hermitian
//! eigendecomposition.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Sub};

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix(DMatrix<C64>);

impl OperatorMatrix {
    /// Wraps a square matrix. Panics if `m` is not square.
    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "operator matrix must be square");
        Self(m)
    }

    pub fn try_from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(Self(m))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Self {
        Self::from_matrix(m.map(|v| C64::new(v, 0.0)))
    }

    /// Row-major real entries.
    pub fn from_real_rows(dim: usize, rows: &[f64]) -> Self {
        Self::from_real(&DMatrix::from_row_slice(dim, dim, rows))
    }

    pub fn from_rows(dim: usize, rows: &[C64]) -> Self {
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, rows))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        self.0
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// max |U†U - I|
    pub fn unitarity_residual(&self) -> f64 {
        let prod = Self(self.0.adjoint() * &self.0);
        prod.max_abs_diff(&Self::identity(self.dim()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    fn max_imag(&self) -> f64 {
        self.0.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    fn real_part(&self) -> DMatrix<f64> {
        self.0.map(|v| v.re)
    }

    /// Diagonal entries if every off-diagonal entry is exactly zero.
    pub fn diagonal_entries(&self) -> Option<Vec<C64>> {
        let n = self.dim();
        for j in 0..n {
            for i in 0..n {
                if i != j && self.0[(i, j)] != C64::new(0.0, 0.0) {
                    return None;
                }
            }
        }
        Some((0..n).map(|i| self.0[(i, i)]).collect())
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 - &rhs.0)
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: DVector<C64>,
}

/// Full spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn of(h: &OperatorMatrix) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::NonFinite("Hermitian eigensolve input"));
        }
        let scale = h.max_abs().max(1.0);
        let res = h.hermiticity_residual();
        if res > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(res));
        }
        let (values, vectors) = if h.max_imag() <= 1e-15 * scale {
            let eig = SymmetricEigen::new(h.real_part());
            (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors.map(|v| C64::new(v, 0.0)))
        } else {
            let sym = (&h.0 + h.0.adjoint()) * C64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(sym);
            (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
        };
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let n = h.dim();
        let mut sorted = DMatrix::<C64>::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            sorted.set_column(dst, &vectors.column(src));
        }
        Ok(Self {
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: sorted,
        })
    }

    /// `f(H)` built from the decomposition.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64) -> OperatorMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fv = f(v);
            for i in 0..n {
                scaled[(i, j)] *= fv;
            }
        }
        OperatorMatrix(scaled * self.vectors.adjoint())
    }
}

/// The `k` lowest eigenpairs of a Hermitian matrix, ascending.
pub fn hermitian_eigensolve(h: &OperatorMatrix, k: usize) -> Result<Vec<EigenPair>> {
    let spec = Spectrum::of(h)?;
    Ok((0..k.min(h.dim()))
        .map(|i| EigenPair {
            value: spec.values[i],
            vector: spec.vectors.column(i).into_owned(),
        })
        .collect())
}

/// `exp(scale * g)`.
///
/// Hermitian and anti-Hermitian generators go through an eigendecomposition,
/// which keeps unitaries unitary to machine precision. Anything else uses
/// Padé(13) scaling and squaring.
pub fn matrix_exponential(g: &OperatorMatrix, scale: C64) -> Result<OperatorMatrix> {
    if !g.is_finite() || !(scale.re.is_finite() && scale.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let tol = HERMITIAN_TOL * g.max_abs().max(1.0);
    if g.hermiticity_residual() <= tol {
        let spec = Spectrum::of(g)?;
        return Ok(spec.apply_function(|v| (scale * v).exp()));
    }
    let ig = g.scale(C64::i());
    if ig.hermiticity_residual() <= tol {
        // g = -i (i g), so exp(s g) = exp(-i s (i g)).
        let spec = Spectrum::of(&ig)?;
        return Ok(spec.apply_function(|v| (-C64::i() * scale * v).exp()));
    }
    let out = pade13(&(g.0.clone() * scale))?;
    let out = OperatorMatrix(out);
    if !out.is_finite() {
        return Err(Error::NonFinite("matrix exponential result"));
    }
    Ok(out)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn pade13(a: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    const THETA13: f64 = 5.371920351148152;
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * C64::new(2f64.powi(-s), 0.0);
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);
    let lu = (&v - &u).lu();
    let mut r = lu
        .solve(&(&v + &u))
        .ok_or_else(|| Error::NoConvergence("singular Padé denominator".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}
