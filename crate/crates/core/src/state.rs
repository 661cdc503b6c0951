//! Hybrid qubit/qumode state vectors.

use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::register::{RegisterShape, Subsystem, TargetLayout};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A state vector on a [`RegisterShape`].
///
/// `norm_factor` accumulates the norms divided out by [`HybridState::normalize`]
/// and by post-selection, so the product of success probabilities of a
/// non-unitary run is `norm_factor²`.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridState {
    shape: RegisterShape,
    amplitudes: Vec<C64>,
    norm_factor: f64,
}

impl HybridState {
    /// All qubits in |0>, all modes in the vacuum.
    pub fn vacuum(shape: RegisterShape) -> Self {
        let mut amplitudes = vec![ZERO; shape.dim()];
        amplitudes[0] = C64::new(1.0, 0.0);
        Self {
            shape,
            amplitudes,
            norm_factor: 1.0,
        }
    }

    /// Computational/Fock basis state.
    pub fn basis(shape: RegisterShape, qubits: &[u8], levels: &[usize]) -> Result<Self> {
        if qubits.len() != shape.n_qubits() || levels.len() != shape.n_modes() {
            return Err(Error::param("basis state needs one entry per qubit and per mode"));
        }
        let mut index = 0;
        for (q, &b) in qubits.iter().enumerate() {
            if b > 1 {
                return Err(Error::param(format!("qubit value {b} is not 0 or 1")));
            }
            index += b as usize * shape.stride(Subsystem::Qubit(q));
        }
        for (s, &n) in levels.iter().enumerate() {
            if n >= shape.cutoff().levels() {
                return Err(Error::param(format!("level {n} exceeds the cutoff")));
            }
            index += n * shape.stride(Subsystem::Mode(s));
        }
        let mut state = Self::vacuum(shape);
        state.amplitudes[0] = ZERO;
        state.amplitudes[index] = C64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn from_amplitudes(shape: RegisterShape, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        Ok(Self {
            shape,
            amplitudes,
            norm_factor: 1.0,
        })
    }

    /// Qubit register in `qubits` (qubit 0 first) tensored with the mode state `modes`.
    pub fn with_qubits(qubits: &[u8], modes: &HybridState) -> Result<Self> {
        if modes.shape.n_qubits() != 0 {
            return Err(Error::param("mode state must not carry qubits"));
        }
        let shape = modes.shape.with_qubits(qubits.len())?;
        let block = qubits.iter().fold(0usize, |acc, &b| 2 * acc + b as usize);
        let md = shape.mode_dim();
        let mut amplitudes = vec![ZERO; shape.dim()];
        amplitudes[block * md..(block + 1) * md].copy_from_slice(&modes.amplitudes);
        Ok(Self {
            shape,
            amplitudes,
            norm_factor: modes.norm_factor,
        })
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    /// Probability that every normalization and post-selection so far
    /// would have succeeded.
    pub fn success_probability(&self) -> f64 {
        self.norm_factor * self.norm_factor
    }

    pub fn reset_norm_factor(&mut self) {
        self.norm_factor = 1.0;
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm and returns the norm that was divided out.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if !n.is_finite() {
            return Err(Error::NonFinite("state norm"));
        }
        if n < 1e-300 {
            return Err(Error::VanishingNorm);
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        self.norm_factor *= n;
        Ok(n)
    }

    /// Applies `op` acting on `targets` (first target is the slowest local index).
    pub fn apply(&mut self, op: &OperatorMatrix, targets: &[Subsystem]) -> Result<()> {
        let layout = self.shape.layout(targets)?;
        if op.dim() != layout.offsets.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.offsets.len(),
                found: op.dim(),
            });
        }
        apply_dense(&mut self.amplitudes, op.as_matrix(), &layout);
        Ok(())
    }

    /// Applies an operator on the whole register.
    pub fn apply_full(&mut self, op: &OperatorMatrix) -> Result<()> {
        if op.dim() != self.shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.shape.dim(),
                found: op.dim(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        let out = op.as_matrix() * v;
        self.amplitudes.copy_from_slice(out.as_slice());
        Ok(())
    }

    /// Applies `op` to the bosonic part of every qubit block.
    pub fn apply_to_modes(&mut self, op: &OperatorMatrix) -> Result<()> {
        let md = self.shape.mode_dim();
        if op.dim() != md {
            return Err(Error::DimensionMismatch {
                expected: md,
                found: op.dim(),
            });
        }
        for block in self.amplitudes.chunks_mut(md) {
            let v = nalgebra::DVector::from_column_slice(block);
            let out = op.as_matrix() * v;
            block.copy_from_slice(out.as_slice());
        }
        Ok(())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &HybridState) -> Result<C64> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch {
                expected: self.shape.dim(),
                found: other.shape.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|²` for normalized inputs.
    pub fn fidelity(&self, other: &HybridState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `<self| op |self>` for `op` on `targets`.
    pub fn expectation(&self, op: &OperatorMatrix, targets: &[Subsystem]) -> Result<C64> {
        let mut tmp = self.clone();
        tmp.apply(op, targets)?;
        self.inner(&tmp)
    }

    /// Probability that `qubit` reads `outcome`.
    pub fn outcome_probability(&self, qubit: usize, outcome: u8) -> Result<f64> {
        let sub = Subsystem::Qubit(qubit);
        self.shape.check_targets(&[sub])?;
        let norm2: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let hit: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.shape.digit(*i, sub) == outcome as usize)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok(hit / norm2)
    }

    /// Projects `qubit` onto `outcome` and renormalizes. The qubit stays in
    /// the register. Returns the success probability, which is folded into
    /// `norm_factor`. Fails when it is below `floor`.
    pub fn postselect(&mut self, qubit: usize, outcome: u8, floor: f64) -> Result<f64> {
        if outcome > 1 {
            return Err(Error::param(format!("qubit outcome {outcome} is not 0 or 1")));
        }
        let probability = self.outcome_probability(qubit, outcome)?;
        if !(probability >= floor) {
            return Err(Error::PostselectionFloor {
                qubit,
                probability,
                floor,
            });
        }
        let sub = Subsystem::Qubit(qubit);
        let shape = self.shape;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if shape.digit(i, sub) != outcome as usize {
                *a = ZERO;
            }
        }
        self.normalize()?;
        Ok(probability)
    }

    /// Amplitudes of the mode register with every qubit in the given
    /// computational state.
    pub fn mode_block(&self, qubits: &[u8]) -> Result<HybridState> {
        if qubits.len() != self.shape.n_qubits() {
            return Err(Error::param("need one value per qubit"));
        }
        let block = qubits.iter().fold(0usize, |acc, &b| 2 * acc + b as usize);
        let md = self.shape.mode_dim();
        let shape = self.shape.with_qubits(0)?;
        HybridState::from_amplitudes(shape, self.amplitudes[block * md..(block + 1) * md].to_vec())
    }

    /// `Σ_q |<q ⊗ target|self>|²` for a mode-only `target`: the overlap of the
    /// reduced bosonic state with `target`.
    pub fn mode_fidelity(&self, target: &HybridState) -> Result<f64> {
        let md = self.shape.mode_dim();
        if target.shape.n_qubits() != 0 || target.shape.dim() != md {
            return Err(Error::DimensionMismatch {
                expected: md,
                found: target.shape.dim(),
            });
        }
        let norm2: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        Ok(self
            .amplitudes
            .chunks(md)
            .map(|block| {
                block
                    .iter()
                    .zip(&target.amplitudes)
                    .map(|(a, t)| t.conj() * a)
                    .sum::<C64>()
                    .norm_sqr()
            })
            .sum::<f64>()
            / norm2)
    }
}

pub fn inner_product(a: &HybridState, b: &HybridState) -> Result<C64> {
    a.inner(b)
}

pub fn fidelity(a: &HybridState, b: &HybridState) -> Result<f64> {
    a.fidelity(b)
}

pub(crate) fn apply_dense(amps: &mut [C64], op: &DMatrix<C64>, layout: &TargetLayout) {
    let k = layout.offsets.len();
    let mut buf = vec![ZERO; k];
    for &base in &layout.bases {
        for (b, off) in buf.iter_mut().zip(&layout.offsets) {
            *b = amps[base + off];
        }
        for (i, off) in layout.offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (j, b) in buf.iter().enumerate() {
                acc += op[(i, j)] * b;
            }
            amps[base + off] = acc;
        }
    }
}

pub(crate) fn apply_diagonal(amps: &mut [C64], diag: &[C64], layout: &TargetLayout) {
    for &base in &layout.bases {
        for (d, off) in diag.iter().zip(&layout.offsets) {
            amps[base + off] *= d;
        }
    }
}
