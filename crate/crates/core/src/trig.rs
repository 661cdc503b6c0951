//! Ancilla-based exponentiation: Pauli-string exponentials, the Σ/Σ̄
//! embedding of trigonometric functions of a Hermitian operator, the compiled
//! controlled-Σ gate, trigonometric gates and the post-selected non-unitary
//! wrapper.
//!
//! Sign conventions used throughout:
//!
//! | builder                                   | operator on the mode register |
//! |-------------------------------------------|-------------------------------|
//! | `trig_gate_circuit(Cos, A, t)`            | `exp(+i t cos A)`             |
//! | `trig_gate_circuit(Sin, A, t)`            | `exp(+i t sin A)`             |
//! | `cosine_x_circuit(c, t)`                  | `exp(-i t cos(c x))`          |
//! | `nonunitary_trig_circuit(Cos, A, t)`      | `exp(-t cos A)` (normalized)  |
//! | `nonunitary_trig_circuit(Sin, A, t)`      | `exp(-t sin A)` (normalized)  |
//!
//! `cosine_x_circuit(c, t)` is therefore the same operator as
//! `trig_gate_circuit(Cos, c x, -t)`.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::fock::position;
use crate::gates;
use crate::operator::{matrix_exponential, OperatorMatrix};
use crate::register::{FockCutoff, RegisterShape, Subsystem};
use crate::state::HybridState;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> OperatorMatrix {
        match self {
            Pauli::I => OperatorMatrix::identity(2),
            Pauli::X => gates::pauli_x(),
            Pauli::Y => gates::pauli_y(),
            Pauli::Z => gates::pauli_z(),
        }
    }
}

/// Tensor product of Paulis; character `i` acts on qubit `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(paulis: Vec<Pauli>) -> Result<Self> {
        if paulis.is_empty() {
            return Err(Error::param("Pauli string must not be empty"));
        }
        Ok(Self(paulis))
    }

    pub fn paulis(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|p| *p == Pauli::I)
    }

    pub fn matrix(&self) -> OperatorMatrix {
        self.0
            .iter()
            .fold(OperatorMatrix::identity(1), |acc, p| acc.kron(&p.matrix()))
    }

    /// Every string of length `n` except the identity.
    pub fn all_nontrivial(n: usize) -> Vec<PauliString> {
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        (1..4usize.pow(n as u32))
            .map(|mut k| {
                let mut v = vec![Pauli::I; n];
                for slot in v.iter_mut().rev() {
                    *slot = letters[k % 4];
                    k /= 4;
                }
                PauliString(v)
            })
            .collect()
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let paulis = s
            .chars()
            .filter(|c| !matches!(c, ' ' | '⊗' | '*'))
            .map(|c| match c {
                'I' | '1' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::param(format!("unknown Pauli {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(paulis)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}

/// Circuit for `exp(-i (t/2) P)` on qubits `0..n`, using qubit `n` as an
/// ancilla that starts and ends in |0>. The construction is exact:
/// `H_a · C-P · R_x(t)_a · C-P · H_a` equals `exp(-i (t/2) P ⊗ Z_a)`.
///
/// The identity string gives an empty circuit carrying the global phase `-t/2`.
pub fn pauli_exponential_circuit(p: &PauliString, t: f64) -> Result<Circuit> {
    let n = p.len();
    let anc = n;
    let mut c = Circuit::new(RegisterShape::qubits(n + 1)?);
    if p.is_identity() {
        c.add_global_phase(-t / 2.0);
        return Ok(c);
    }
    c.push(Gate::H { qubit: anc })?;
    push_controlled_pauli(&mut c, p, anc)?;
    c.push(Gate::Rx { theta: t, qubit: anc })?;
    push_controlled_pauli(&mut c, p, anc)?;
    c.push(Gate::H { qubit: anc })?;
    Ok(c)
}

fn push_controlled_pauli(c: &mut Circuit, p: &PauliString, control: usize) -> Result<()> {
    for (q, pauli) in p.paulis().iter().enumerate() {
        match pauli {
            Pauli::I => {}
            Pauli::X => {
                c.push(Gate::Cnot { control, target: q })?;
            }
            Pauli::Z => {
                c.push(Gate::Cz { a: control, b: q })?;
            }
            Pauli::Y => {
                // CY = S · CNOT · S†, with S† = Z S
                c.push(Gate::Z { qubit: q })?;
                c.push(Gate::S { qubit: q })?;
                c.push(Gate::Cnot { control, target: q })?;
                c.push(Gate::S { qubit: q })?;
            }
        }
    }
    Ok(())
}

/// The Hermitian operator inside a trigonometric gate.
#[derive(Clone, Debug, PartialEq)]
pub enum HermitianArg {
    /// `Σ_j c_j x_{m_j} + offset`.
    LinearInX { terms: Vec<(usize, f64)>, offset: f64 },
    /// A dense Hermitian matrix on `modes` (first mode slowest).
    ExplicitMatrix {
        matrix: Arc<OperatorMatrix>,
        modes: Vec<usize>,
    },
}

impl HermitianArg {
    /// `Σ_s c_s x_s` over modes `0..coeffs.len()`.
    pub fn linear(coeffs: &[f64]) -> Result<Self> {
        Self::linear_terms(coeffs.iter().copied().enumerate().collect(), 0.0)
    }

    /// `c x_mode`
    pub fn single(mode: usize, c: f64) -> Result<Self> {
        Self::linear_terms(vec![(mode, c)], 0.0)
    }

    pub fn linear_terms(terms: Vec<(usize, f64)>, offset: f64) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::param("linear argument needs at least one mode"));
        }
        if terms.iter().any(|(_, c)| !c.is_finite()) || !offset.is_finite() {
            return Err(Error::NonFinite("linear argument coefficients"));
        }
        for (i, (m, _)) in terms.iter().enumerate() {
            if terms[..i].iter().any(|(o, _)| o == m) {
                return Err(Error::param(format!("mode {m} appears twice")));
            }
        }
        Ok(HermitianArg::LinearInX { terms, offset })
    }

    pub fn explicit(matrix: OperatorMatrix, modes: Vec<usize>) -> Result<Self> {
        let res = matrix.hermiticity_residual();
        if res > 1e-10 {
            return Err(Error::NotHermitian(res));
        }
        if modes.is_empty() {
            return Err(Error::param("explicit argument needs at least one mode"));
        }
        Ok(HermitianArg::ExplicitMatrix {
            matrix: Arc::new(matrix),
            modes,
        })
    }

    pub fn modes(&self) -> Vec<usize> {
        match self {
            HermitianArg::LinearInX { terms, .. } => terms.iter().map(|(m, _)| *m).collect(),
            HermitianArg::ExplicitMatrix { modes, .. } => modes.clone(),
        }
    }

    /// The operator on [`HermitianArg::modes`], in that order.
    pub fn operator(&self, cutoff: FockCutoff) -> Result<OperatorMatrix> {
        match self {
            HermitianArg::LinearInX { terms, offset } => {
                let l = cutoff.levels();
                let k = terms.len();
                let x = position(cutoff);
                let id = OperatorMatrix::identity(l);
                let mut sum = OperatorMatrix::identity(l.pow(k as u32)).scale_real(*offset);
                for (j, (_, c)) in terms.iter().enumerate() {
                    let mut term = OperatorMatrix::identity(1);
                    for i in 0..k {
                        term = term.kron(if i == j { &x } else { &id });
                    }
                    sum = &sum + &term.scale_real(*c);
                }
                Ok(sum)
            }
            HermitianArg::ExplicitMatrix { matrix, modes } => {
                let expect = cutoff.levels().pow(modes.len() as u32);
                if matrix.dim() != expect {
                    return Err(Error::DimensionMismatch {
                        expected: expect,
                        found: matrix.dim(),
                    });
                }
                Ok((**matrix).clone())
            }
        }
    }
}

/// `Σ = exp(i X ⊗ A)(Z ⊗ 1)` or, with `bar`, `Σ̄ = (Z ⊗ 1) exp(i X ⊗ A)`,
/// on (qubit, argument modes) with the qubit slowest. Both are Hermitian,
/// unitary and square to the identity, and
/// `Σ + Σ̄ = 2 Z ⊗ cos A`, `Σ - Σ̄ = 2 Y ⊗ sin A`.
pub fn sigma_matrix(arg: &HermitianArg, bar: bool, cutoff: FockCutoff) -> Result<OperatorMatrix> {
    let a = arg.operator(cutoff)?;
    let e = matrix_exponential(&gates::pauli_x().kron(&a), C64::new(0.0, 1.0))?;
    let z = gates::pauli_z().kron(&OperatorMatrix::identity(a.dim()));
    Ok(if bar { &z * &e } else { &e * &z })
}

/// Qubit/mode assignment for the trigonometric circuits: `a` carries the
/// Σ operator, `b` controls it, and `c` (when present) drives the
/// post-selected non-unitary wrapper.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AncillaLayout {
    pub shape: RegisterShape,
    pub a: usize,
    pub b: usize,
    pub c: Option<usize>,
}

impl AncillaLayout {
    pub fn new(shape: RegisterShape, a: usize, b: usize, c: Option<usize>) -> Result<Self> {
        let mut qs = vec![Subsystem::Qubit(a), Subsystem::Qubit(b)];
        qs.extend(c.map(Subsystem::Qubit));
        shape.check_targets(&qs)?;
        Ok(Self { shape, a, b, c })
    }

    /// Qubits `a = 0`, `b = 1` in front of `n_modes` modes.
    pub fn unitary(n_modes: usize, cutoff: FockCutoff) -> Result<Self> {
        Self::new(RegisterShape::new(2, n_modes, cutoff)?, 0, 1, None)
    }

    /// Qubits `a = 0`, `b = 1`, `c = 2` in front of `n_modes` modes.
    pub fn nonunitary(n_modes: usize, cutoff: FockCutoff) -> Result<Self> {
        Self::new(RegisterShape::new(3, n_modes, cutoff)?, 0, 1, Some(2))
    }

    fn control(&self) -> Result<usize> {
        self.c
            .ok_or_else(|| Error::param("non-unitary circuits need a third ancilla"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrotterOrder {
    First,
    #[serde(rename = "second", alias = "second_symmetric")]
    SecondSymmetric,
}

impl fmt::Display for TrotterOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrotterOrder::First => "first",
            TrotterOrder::SecondSymmetric => "second",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrotterSchedule {
    order: TrotterOrder,
    steps: usize,
}

impl TrotterSchedule {
    pub fn new(order: TrotterOrder, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::param("Trotter schedule needs at least one step"));
        }
        Ok(Self { order, steps })
    }

    pub fn first(steps: usize) -> Result<Self> {
        Self::new(TrotterOrder::First, steps)
    }

    pub fn second(steps: usize) -> Result<Self> {
        Self::new(TrotterOrder::SecondSymmetric, steps)
    }

    pub fn order(&self) -> TrotterOrder {
        self.order
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `(bar?, fraction of the step)` for each factor of one Trotter step
    /// of `exp(Σ̄ + Σ)`, in time order.
    fn factors(&self) -> &'static [(bool, f64)] {
        match self.order {
            TrotterOrder::First => &[(true, 1.0), (false, 1.0)],
            TrotterOrder::SecondSymmetric => &[(true, 0.5), (false, 1.0), (true, 0.5)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigKind {
    Cos,
    Sin,
}

/// Controlled-Σ (or Σ̄) with qubit `b` as control, in time order.
///
/// `CΣ = exp(+i A X_a Π₋ᵇ) CZ_ab` and `CΣ̄ = exp(-i A X_a Π₋ᵇ) CZ_ab`, where
/// `Π₋ = |1><1|`. A linear argument compiles to CZ, an `R_y` frame on `a`
/// and conditional displacements; an explicit matrix becomes one dense gate.
pub fn controlled_sigma_circuit(arg: &HermitianArg, bar: bool, layout: &AncillaLayout) -> Result<Circuit> {
    let mut c = Circuit::new(layout.shape);
    push_controlled_sigma(&mut c, arg, bar, layout)?;
    Ok(c)
}

fn push_controlled_sigma(c: &mut Circuit, arg: &HermitianArg, bar: bool, layout: &AncillaLayout) -> Result<()> {
    let (a, b) = (layout.a, layout.b);
    let sign = if bar { -1.0 } else { 1.0 };
    match arg {
        HermitianArg::LinearInX { terms, offset } => {
            c.push(Gate::H { qubit: b })?;
            c.push(Gate::Cnot { control: a, target: b })?;
            c.push(Gate::H { qubit: b })?;
            c.push(Gate::Ry { theta: -FRAC_PI_2, qubit: a })?;
            c.push(Gate::Cnot { control: b, target: a })?;
            for &(mode, coeff) in terms {
                c.push(Gate::ConditionalDisplacement {
                    alpha: cd_alpha(-sign * coeff),
                    qubit: a,
                    mode,
                })?;
            }
            if *offset != 0.0 {
                c.push(Gate::Rz { theta: sign * offset, qubit: a })?;
            }
            c.push(Gate::Cnot { control: b, target: a })?;
            for &(mode, coeff) in terms {
                c.push(Gate::ConditionalDisplacement {
                    alpha: cd_alpha(sign * coeff),
                    qubit: a,
                    mode,
                })?;
            }
            if *offset != 0.0 {
                c.push(Gate::Rz { theta: -sign * offset, qubit: a })?;
            }
            c.push(Gate::Ry { theta: FRAC_PI_2, qubit: a })?;
        }
        HermitianArg::ExplicitMatrix { modes, .. } => {
            let sigma = sigma_matrix(arg, bar, layout.shape.cutoff())?;
            let n = sigma.dim();
            let mut m = DMatrix::<C64>::identity(2 * n, 2 * n);
            m.view_mut((n, n), (n, n)).copy_from(sigma.as_matrix());
            let mut targets = vec![Subsystem::Qubit(b), Subsystem::Qubit(a)];
            targets.extend(modes.iter().map(|m| Subsystem::Mode(*m)));
            c.push(Gate::Operator {
                label: if bar { "CSIGMABAR".into() } else { "CSIGMA".into() },
                matrix: Arc::new(OperatorMatrix::from_matrix(m)),
                targets,
            })?;
        }
    }
    Ok(())
}

/// Displacement argument with `CD(α) = exp(i (c/2) x ⊗ Z)`.
fn cd_alpha(c: f64) -> C64 {
    C64::new(0.0, c / (2.0 * SQRT_2))
}

/// `exp(-i θ Z_b Σ)`: `H_b, CΣ, R_x(2θ)_b, CΣ, H_b`. With `b` in |0> this
/// is `exp(-i θ Σ)`.
fn push_sigma_block(c: &mut Circuit, arg: &HermitianArg, bar: bool, theta: f64, layout: &AncillaLayout) -> Result<()> {
    let b = layout.b;
    c.push(Gate::H { qubit: b })?;
    push_controlled_sigma(c, arg, bar, layout)?;
    c.push(Gate::Rx { theta: 2.0 * theta, qubit: b })?;
    push_controlled_sigma(c, arg, bar, layout)?;
    c.push(Gate::H { qubit: b })?;
    Ok(())
}

fn check_finite(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("evolution time"))
    }
}

/// `exp(+i t cos A)` or `exp(+i t sin A)` on the modes, with ancillas `a`
/// and `b` entering and (up to Trotter error) leaving in |0>.
///
/// Cos uses `Σ + Σ̄ = 2 Z_a cos A` with `a` in |0>. Sin prepares `a` in the
/// +1 eigenstate `S H|0>` of `Y` and uses `Σ - Σ̄ = 2 Y_a sin A`.
pub fn trig_gate_circuit(kind: TrigKind, arg: &HermitianArg, t: f64, schedule: TrotterSchedule, layout: &AncillaLayout) -> Result<Circuit> {
    check_finite(t)?;
    let mut c = Circuit::new(layout.shape);
    let a = layout.a;
    if kind == TrigKind::Sin {
        c.push(Gate::H { qubit: a })?;
        c.push(Gate::S { qubit: a })?;
    }
    let dt = t / schedule.steps() as f64;
    for _ in 0..schedule.steps() {
        for &(bar, frac) in schedule.factors() {
            // exp(i (dt/2) Σ) = block(-dt/2); Sin flips the sign of the Σ̄ half.
            let sign = if bar && kind == TrigKind::Sin { 1.0 } else { -1.0 };
            push_sigma_block(&mut c, arg, bar, sign * frac * dt / 2.0, layout)?;
        }
    }
    if kind == TrigKind::Sin {
        c.push(Gate::Z { qubit: a })?;
        c.push(Gate::S { qubit: a })?;
        c.push(Gate::H { qubit: a })?;
    }
    Ok(c)
}

/// `exp(-i t cos(c x))` on `mode`, in the conditional-displacement layout: per Trotter step
/// an `R_y`/`H` frame around `CD(α) [CNOT R_x CNOT] CD(-2α) [CNOT R_x CNOT] CD(α)`
/// (second order: `CD(α) E CD(-2α) E E CD(2α) E CD(-α)` with half-angle outer `E`).
pub fn cosine_x_circuit(c: f64, t: f64, mode: usize, schedule: TrotterSchedule, layout: &AncillaLayout) -> Result<Circuit> {
    check_finite(t)?;
    let mut circ = Circuit::new(layout.shape);
    let (a, b) = (layout.a, layout.b);
    let dt = t / schedule.steps() as f64;
    let alpha = cd_alpha(c);
    let cd = |k: f64| Gate::ConditionalDisplacement { alpha: alpha * k, qubit: a, mode };
    let entangler = |circ: &mut Circuit, angle: f64| -> Result<()> {
        circ.push(Gate::Cnot { control: b, target: a })?;
        circ.push(Gate::Rx { theta: angle, qubit: b })?;
        circ.push(Gate::Cnot { control: b, target: a })?;
        Ok(())
    };
    for _ in 0..schedule.steps() {
        circ.push(Gate::Ry { theta: -FRAC_PI_2, qubit: a })?;
        circ.push(Gate::H { qubit: b })?;
        circ.push(cd(1.0))?;
        match schedule.order() {
            TrotterOrder::First => {
                entangler(&mut circ, -dt)?;
                circ.push(cd(-2.0))?;
                entangler(&mut circ, -dt)?;
                circ.push(cd(1.0))?;
            }
            TrotterOrder::SecondSymmetric => {
                entangler(&mut circ, -dt / 2.0)?;
                circ.push(cd(-2.0))?;
                entangler(&mut circ, -dt)?;
                circ.push(cd(2.0))?;
                entangler(&mut circ, -dt / 2.0)?;
                circ.push(cd(-1.0))?;
            }
        }
        circ.push(Gate::Ry { theta: FRAC_PI_2, qubit: a })?;
        circ.push(Gate::H { qubit: b })?;
    }
    Ok(circ)
}

/// Inner rotation angle that makes [`nonunitary_wrap`] produce
/// `exp(-(t/2) G)`: `2 atan(tanh(t/2))`.
pub fn nonunitary_angle(t: f64) -> f64 {
    2.0 * (t / 2.0).tanh().atan()
}

/// Amplitude prefactor of the wrapped operator for `G² = 1`:
/// post-selected output is this times `exp(-(t/2) G)|ψ>`.
pub fn nonunitary_prefactor(t: f64) -> f64 {
    let th = (t / 2.0).tanh();
    1.0 / ((t / 2.0).cosh() * (2.0 * (1.0 + th * th)).sqrt())
}

/// Post-selected circuit for `exp(-(t/2) G)` (up to the prefactor above).
///
/// `build_inner(θ)` must return `exp(-i (θ/2) G ⊗ Z_k)` on the layout's
/// register, where `k = coupling`, and must not touch the control qubit `c`.
/// The wrapper is `R_x(-π/2)_c, CNOT(c→k), inner, CNOT(c→k), R_x(π/2)_c, H_c`
/// followed by post-selecting `c` on 0.
pub fn nonunitary_wrap<F>(t: f64, coupling: usize, layout: &AncillaLayout, build_inner: F) -> Result<Circuit>
where
    F: FnOnce(f64) -> Result<Circuit>,
{
    check_finite(t)?;
    let c = layout.control()?;
    let inner = build_inner(nonunitary_angle(t))?;
    if inner.gates().any(|g| g.targets().contains(&Subsystem::Qubit(c))) {
        return Err(Error::InvalidTarget(format!("inner circuit acts on the control qubit {c}")));
    }
    let mut circ = Circuit::new(layout.shape);
    circ.push(Gate::Rx { theta: -FRAC_PI_2, qubit: c })?;
    circ.push(Gate::Cnot { control: c, target: coupling })?;
    circ.extend(&inner)?;
    circ.push(Gate::Cnot { control: c, target: coupling })?;
    circ.push(Gate::Rx { theta: FRAC_PI_2, qubit: c })?;
    circ.push(Gate::H { qubit: c })?;
    circ.postselect(c, 0)?;
    Ok(circ)
}

/// Post-selected `exp(-t cos A)` or `exp(-t sin A)`: each Σ block of the
/// unitary construction is replaced by a wrapped `exp(-(τ/2) Σ)`.
pub fn nonunitary_trig_circuit(kind: TrigKind, arg: &HermitianArg, t: f64, schedule: TrotterSchedule, layout: &AncillaLayout) -> Result<Circuit> {
    check_finite(t)?;
    layout.control()?;
    let mut c = Circuit::new(layout.shape);
    let a = layout.a;
    if kind == TrigKind::Sin {
        c.push(Gate::H { qubit: a })?;
        c.push(Gate::S { qubit: a })?;
    }
    let dt = t / schedule.steps() as f64;
    for _ in 0..schedule.steps() {
        for &(bar, frac) in schedule.factors() {
            let sign = if bar && kind == TrigKind::Sin { -1.0 } else { 1.0 };
            let tau = sign * frac * dt;
            let block = nonunitary_wrap(tau, layout.b, layout, |theta| {
                let mut inner = Circuit::new(layout.shape);
                push_sigma_block(&mut inner, arg, bar, theta / 2.0, layout)?;
                Ok(inner)
            })?;
            c.extend(&block)?;
        }
    }
    if kind == TrigKind::Sin {
        c.push(Gate::Z { qubit: a })?;
        c.push(Gate::S { qubit: a })?;
        c.push(Gate::H { qubit: a })?;
    }
    Ok(c)
}

/// Trace-norm distance between the circuit's action on
/// `|0…0>_qubits ⊗ (mode space)` and `|0…0> ⊗ target`, with `target` an
/// operator on the whole mode register. The circuit's global phase is
/// included; post-selection is not allowed.
pub fn circuit_error(circuit: &Circuit, target: &OperatorMatrix) -> Result<f64> {
    let shape = *circuit.shape();
    let md = shape.mode_dim();
    if target.dim() != md {
        return Err(Error::DimensionMismatch {
            expected: md,
            found: target.dim(),
        });
    }
    if circuit.has_postselection() {
        return Err(Error::param("circuit_error needs a unitary circuit"));
    }
    let program = circuit.compile()?;
    let phase = C64::from_polar(1.0, circuit.global_phase());
    let mut diff = DMatrix::<C64>::zeros(shape.dim(), md);
    for j in 0..md {
        let mut amps = vec![C64::new(0.0, 0.0); shape.dim()];
        amps[j] = C64::new(1.0, 0.0);
        let mut s = HybridState::from_amplitudes(shape, amps)?;
        program.run(&mut s, 0.0)?;
        for (i, v) in s.amplitudes().iter().enumerate() {
            diff[(i, j)] = v * phase;
        }
        for i in 0..md {
            diff[(i, j)] -= target.as_matrix()[(i, j)];
        }
    }
    Ok(diff.singular_values().iter().sum())
}

/// Dense `exp(i t f(A))` on the argument's modes, `f = cos` or `sin`.
pub fn trig_oracle(kind: TrigKind, arg: &HermitianArg, t: f64, cutoff: FockCutoff) -> Result<OperatorMatrix> {
    let a = arg.operator(cutoff)?;
    let u = matrix_exponential(&a, C64::new(0.0, 1.0))?;
    let f = match kind {
        TrigKind::Cos => (&u + &u.adjoint()).scale_real(0.5),
        TrigKind::Sin => (&u - &u.adjoint()).scale(C64::new(0.0, -0.5)),
    };
    matrix_exponential(&f, C64::new(0.0, t))
}
