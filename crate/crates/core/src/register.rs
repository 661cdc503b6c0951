//! Register geometry: how qubits and truncated modes map onto a flat
//! state-vector index.

use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::DIMENSION_GUARD;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Number of Fock levels kept per mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidCutoff(levels));
        }
        Ok(Self(levels))
    }

    pub fn levels(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for FockCutoff {
    type Error = Error;
    fn try_from(levels: usize) -> Result<Self> {
        Self::new(levels)
    }
}

impl From<FockCutoff> for usize {
    fn from(c: FockCutoff) -> usize {
        c.0
    }
}

impl fmt::Display for FockCutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    Qubit(usize),
    Mode(usize),
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::Qubit(q) => write!(f, "q{q}"),
            Subsystem::Mode(s) => write!(f, "m{s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegisterShape {
    n_qubits: usize,
    n_modes: usize,
    cutoff: FockCutoff,
}

impl RegisterShape {
    pub fn new(n_qubits: usize, n_modes: usize, cutoff: FockCutoff) -> Result<Self> {
        let shape = Self {
            n_qubits,
            n_modes,
            cutoff,
        };
        let dim = shape.checked_dim().ok_or(Error::DimensionGuard {
            dim: usize::MAX,
            limit: DIMENSION_GUARD,
        })?;
        if dim > DIMENSION_GUARD {
            return Err(Error::DimensionGuard {
                dim,
                limit: DIMENSION_GUARD,
            });
        }
        Ok(shape)
    }

    /// A register of qubits only.
    pub fn qubits(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 0, FockCutoff(2))
    }

    fn checked_dim(&self) -> Option<usize> {
        let modes = self.cutoff.0.checked_pow(self.n_modes as u32)?;
        1usize.checked_shl(self.n_qubits as u32)?.checked_mul(modes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        (1 << self.n_qubits) * self.mode_dim()
    }

    /// Dimension of the bosonic part alone.
    pub fn mode_dim(&self) -> usize {
        self.cutoff.0.pow(self.n_modes as u32)
    }

    /// Same modes, a different number of qubits.
    pub fn with_qubits(&self, n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, self.n_modes, self.cutoff)
    }

    pub fn contains(&self, sub: Subsystem) -> bool {
        match sub {
            Subsystem::Qubit(q) => q < self.n_qubits,
            Subsystem::Mode(s) => s < self.n_modes,
        }
    }

    pub fn subsystem_dim(&self, sub: Subsystem) -> usize {
        match sub {
            Subsystem::Qubit(_) => 2,
            Subsystem::Mode(_) => self.cutoff.0,
        }
    }

    /// Distance in the flat index between neighbouring levels of `sub`.
    pub fn stride(&self, sub: Subsystem) -> usize {
        let lam = self.cutoff.0;
        match sub {
            Subsystem::Qubit(q) => {
                (1 << (self.n_qubits - 1 - q)) * self.mode_dim()
            }
            Subsystem::Mode(s) => lam.pow((self.n_modes - 1 - s) as u32),
        }
    }

    /// Level of `sub` in the flat basis index `index`.
    pub fn digit(&self, index: usize, sub: Subsystem) -> usize {
        (index / self.stride(sub)) % self.subsystem_dim(sub)
    }

    pub fn check_targets(&self, targets: &[Subsystem]) -> Result<()> {
        for (i, t) in targets.iter().enumerate() {
            if !self.contains(*t) {
                return Err(Error::InvalidTarget(format!(
                    "{t} is outside a register with {} qubits and {} modes",
                    self.n_qubits, self.n_modes
                )));
            }
            if targets[..i].contains(t) {
                return Err(Error::InvalidTarget(format!("{t} listed twice")));
            }
        }
        Ok(())
    }

    /// Dimension of the tensor factor spanned by `targets`.
    pub fn local_dim(&self, targets: &[Subsystem]) -> usize {
        targets.iter().map(|t| self.subsystem_dim(*t)).product()
    }

    pub(crate) fn layout(&self, targets: &[Subsystem]) -> Result<TargetLayout> {
        self.check_targets(targets)?;
        let mut offsets = vec![0usize];
        for t in targets {
            let stride = self.stride(*t);
            let d = self.subsystem_dim(*t);
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..d).map(move |k| o + k * stride))
                .collect();
        }
        let bases = (0..self.dim())
            .filter(|&i| targets.iter().all(|t| self.digit(i, *t) == 0))
            .collect();
        Ok(TargetLayout { offsets, bases })
    }
}

/// Index bookkeeping for applying a local operator: `offsets[j]` is the
/// flat offset of local basis state `j`, and every entry of `bases` is a
/// flat index whose target digits are all zero.
#[derive(Clone, Debug)]
pub(crate) struct TargetLayout {
    pub offsets: Vec<usize>,
    pub bases: Vec<usize>,
}

/// Lifts an operator on `targets` (first target is the slowest local index)
/// to the full register.
pub fn embed(op: &OperatorMatrix, targets: &[Subsystem], shape: &RegisterShape) -> Result<OperatorMatrix> {
    let layout = shape.layout(targets)?;
    let k = layout.offsets.len();
    if op.dim() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: op.dim(),
        });
    }
    let n = shape.dim();
    let local = op.as_matrix();
    let mut full = DMatrix::<C64>::zeros(n, n);
    for &base in &layout.bases {
        for (i, oi) in layout.offsets.iter().enumerate() {
            for (j, oj) in layout.offsets.iter().enumerate() {
                let v = local[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    full[(base + oi, base + oj)] = v;
                }
            }
        }
    }
    Ok(OperatorMatrix::from_matrix(full))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_rejects_small() {
        assert!(FockCutoff::new(1).is_err());
        assert_eq!(FockCutoff::new(2).unwrap().levels(), 2);
    }

    #[test]
    fn strides_put_qubits_first() {
        let shape = RegisterShape::new(2, 2, FockCutoff::new(3).unwrap()).unwrap();
        assert_eq!(shape.dim(), 36);
        assert_eq!(shape.stride(Subsystem::Qubit(0)), 18);
        assert_eq!(shape.stride(Subsystem::Qubit(1)), 9);
        assert_eq!(shape.stride(Subsystem::Mode(0)), 3);
        assert_eq!(shape.stride(Subsystem::Mode(1)), 1);
        assert_eq!(shape.digit(18 + 5, Subsystem::Mode(0)), 1);
    }

    #[test]
    fn guard_trips() {
        let c = FockCutoff::new(10).unwrap();
        assert!(matches!(
            RegisterShape::new(0, 6, c),
            Err(Error::DimensionGuard { .. })
        ));
        assert!(RegisterShape::new(1, 5, c).is_ok());
    }

    #[test]
    fn duplicate_targets_rejected() {
        let shape = RegisterShape::qubits(2).unwrap();
        assert!(shape.check_targets(&[Subsystem::Qubit(0), Subsystem::Qubit(0)]).is_err());
        assert!(shape.check_targets(&[Subsystem::Qubit(2)]).is_err());
    }

    #[test]
    fn embed_matches_kron() {
        let shape = RegisterShape::qubits(2).unwrap();
        let x = OperatorMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]);
        let id = OperatorMatrix::identity(2);
        let e0 = embed(&x, &[Subsystem::Qubit(0)], &shape).unwrap();
        assert!(e0.max_abs_diff(&x.kron(&id)) < 1e-15);
        let e1 = embed(&x, &[Subsystem::Qubit(1)], &shape).unwrap();
        assert!(e1.max_abs_diff(&id.kron(&x)) < 1e-15);
    }
}
