//! Gate matrices. Bosonic gates are exponentials of generators built in the
//! truncated space; qubit rotations use `R_σ(θ) = exp(-iθσ/2)`.

use crate::error::Result;
use crate::fock::{annihilation, momentum, number, position};
use crate::operator::{matrix_exponential, OperatorMatrix};
use crate::register::FockCutoff;
use num_complex::Complex64 as C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `D(ξ) = exp(ξ a† - ξ* a)`
pub fn displacement(xi: C64, cutoff: FockCutoff) -> Result<OperatorMatrix> {
    matrix_exponential(&displacement_generator(xi, cutoff), c(1.0, 0.0))
}

fn displacement_generator(xi: C64, cutoff: FockCutoff) -> OperatorMatrix {
    let a = annihilation(cutoff);
    &a.adjoint().scale(xi) - &a.scale(xi.conj())
}

/// `S(z) = exp((z* a² - z a†²)/2)`, so that `S(r)† x S(r) = e^{-r} x` for real `r`.
pub fn squeeze(z: C64, cutoff: FockCutoff) -> Result<OperatorMatrix> {
    let a = annihilation(cutoff);
    let a2 = &a * &a;
    let gen = &a2.scale(z.conj() * 0.5) - &a2.adjoint().scale(z * 0.5);
    matrix_exponential(&gen, c(1.0, 0.0))
}

/// `BS(z) = exp(z a† b - z* a b†)` on two modes, first mode slowest.
pub fn beamsplitter(z: C64, cutoff: FockCutoff) -> Result<OperatorMatrix> {
    let a = annihilation(cutoff);
    let id = OperatorMatrix::identity(cutoff.levels());
    let a1 = a.kron(&id);
    let b1 = id.kron(&a);
    let gen = &(&a1.adjoint() * &b1).scale(z) - &(&a1 * &b1.adjoint()).scale(z.conj());
    matrix_exponential(&gen, c(1.0, 0.0))
}

/// `V(γ) = exp(iγ x³/3)`
pub fn cubic_phase(gamma: f64, cutoff: FockCutoff) -> Result<OperatorMatrix> {
    let x = position(cutoff);
    let x3 = &(&x * &x) * &x;
    matrix_exponential(&x3, c(0.0, gamma / 3.0))
}

/// `exp(-i (t/2) p²)`
pub fn quadratic_phase(t: f64, cutoff: FockCutoff) -> Result<OperatorMatrix> {
    let p = momentum(cutoff);
    matrix_exponential(&(&p * &p), c(0.0, -t / 2.0))
}

/// `R(θ) = exp(-iθ(n + 1/2))`
pub fn mode_rotation(theta: f64, cutoff: FockCutoff) -> OperatorMatrix {
    let diag: Vec<C64> = (0..cutoff.levels())
        .map(|n| c(0.0, -theta * (n as f64 + 0.5)).exp())
        .collect();
    OperatorMatrix::from_diagonal(&diag)
}

/// Generator `n + 1/2` of [`mode_rotation`].
pub fn rotation_generator(cutoff: FockCutoff) -> OperatorMatrix {
    &number(cutoff) + &OperatorMatrix::identity(cutoff.levels()).scale_real(0.5)
}

/// `CD(α) = exp((α a† - α* a) ⊗ Z)` on (qubit, mode), qubit slowest:
/// `D(α)` when the qubit is |0> and `D(-α)` when it is |1>.
pub fn conditional_displacement(alpha: C64, cutoff: FockCutoff) -> Result<OperatorMatrix> {
    let (plus, minus) = conditional_displacement_blocks(alpha, cutoff)?;
    let l = cutoff.levels();
    let mut m = nalgebra::DMatrix::<C64>::zeros(2 * l, 2 * l);
    m.view_mut((0, 0), (l, l)).copy_from(plus.as_matrix());
    m.view_mut((l, l), (l, l)).copy_from(minus.as_matrix());
    Ok(OperatorMatrix::from_matrix(m))
}

/// The two diagonal blocks `(D(α), D(-α))` of [`conditional_displacement`].
pub fn conditional_displacement_blocks(alpha: C64, cutoff: FockCutoff) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let gen = displacement_generator(alpha, cutoff);
    Ok((
        matrix_exponential(&gen, c(1.0, 0.0))?,
        matrix_exponential(&gen, c(-1.0, 0.0))?,
    ))
}

pub fn pauli_x() -> OperatorMatrix {
    OperatorMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> OperatorMatrix {
    OperatorMatrix::from_rows(2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> OperatorMatrix {
    OperatorMatrix::from_real_rows(2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn hadamard() -> OperatorMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    OperatorMatrix::from_real_rows(2, &[h, h, h, -h])
}

/// Phase gate `diag(1, i)`.
pub fn phase_s() -> OperatorMatrix {
    OperatorMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)])
}

pub fn rx(theta: f64) -> OperatorMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    OperatorMatrix::from_rows(2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
}

pub fn ry(theta: f64) -> OperatorMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    OperatorMatrix::from_real_rows(2, &[co, -s, s, co])
}

pub fn rz(theta: f64) -> OperatorMatrix {
    OperatorMatrix::from_diagonal(&[c(0.0, -theta / 2.0).exp(), c(0.0, theta / 2.0).exp()])
}

/// Control is the first (slowest) qubit.
pub fn cnot() -> OperatorMatrix {
    OperatorMatrix::from_real_rows(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
}

pub fn cz() -> OperatorMatrix {
    OperatorMatrix::from_real_rows(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, -1.0,
        ],
    )
}
