//! Circuit IR, its line-oriented text format, and the state-vector runner.
//!
//! Steps are stored in time order: the first step acts first.

use crate::error::{Error, Result};
use crate::fock::PositionBasis;
use crate::gates;
use crate::operator::OperatorMatrix;
use crate::register::{RegisterShape, Subsystem, TargetLayout};
use crate::state::{apply_dense, apply_diagonal, HybridState};
use crate::POSTSELECTION_FLOOR;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Displacement { xi: C64, mode: usize },
    Squeeze { z: C64, mode: usize },
    Beamsplitter { z: C64, modes: (usize, usize) },
    CubicPhase { gamma: f64, mode: usize },
    QuadraticPhase { t: f64, mode: usize },
    ModeRotation { theta: f64, mode: usize },
    ConditionalDisplacement { alpha: C64, qubit: usize, mode: usize },
    Rx { theta: f64, qubit: usize },
    Ry { theta: f64, qubit: usize },
    Rz { theta: f64, qubit: usize },
    H { qubit: usize },
    X { qubit: usize },
    Y { qubit: usize },
    Z { qubit: usize },
    S { qubit: usize },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
    /// `exp(weight · cos(Σ_j c_j x_{m_j} + shift))`, applied exactly in the
    /// position eigenbasis. Non-unitary unless `weight` is imaginary.
    CosineOfPosition {
        weight: C64,
        terms: Vec<(usize, f64)>,
        shift: f64,
    },
    /// Arbitrary dense operator.
    Operator {
        label: String,
        matrix: Arc<OperatorMatrix>,
        targets: Vec<Subsystem>,
    },
}

impl Gate {
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::Displacement { .. } => "DISP",
            Gate::Squeeze { .. } => "SQZ",
            Gate::Beamsplitter { .. } => "BS",
            Gate::CubicPhase { .. } => "CUBIC",
            Gate::QuadraticPhase { .. } => "QPHASE",
            Gate::ModeRotation { .. } => "ROT",
            Gate::ConditionalDisplacement { .. } => "CD",
            Gate::Rx { .. } => "RX",
            Gate::Ry { .. } => "RY",
            Gate::Rz { .. } => "RZ",
            Gate::H { .. } => "H",
            Gate::X { .. } => "X",
            Gate::Y { .. } => "Y",
            Gate::Z { .. } => "Z",
            Gate::S { .. } => "S",
            Gate::Cnot { .. } => "CNOT",
            Gate::Cz { .. } => "CZ",
            Gate::CosineOfPosition { .. } => "COSX",
            Gate::Operator { .. } => "OP",
        }
    }

    pub fn targets(&self) -> Vec<Subsystem> {
        use Subsystem::{Mode as M, Qubit as Q};
        match self {
            Gate::Displacement { mode, .. }
            | Gate::Squeeze { mode, .. }
            | Gate::CubicPhase { mode, .. }
            | Gate::QuadraticPhase { mode, .. }
            | Gate::ModeRotation { mode, .. } => vec![M(*mode)],
            Gate::Beamsplitter { modes, .. } => vec![M(modes.0), M(modes.1)],
            Gate::ConditionalDisplacement { qubit, mode, .. } => vec![Q(*qubit), M(*mode)],
            Gate::Rx { qubit, .. }
            | Gate::Ry { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::H { qubit }
            | Gate::X { qubit }
            | Gate::Y { qubit }
            | Gate::Z { qubit }
            | Gate::S { qubit } => vec![Q(*qubit)],
            Gate::Cnot { control, target } => vec![Q(*control), Q(*target)],
            Gate::Cz { a, b } => vec![Q(*a), Q(*b)],
            Gate::CosineOfPosition { terms, .. } => terms.iter().map(|(m, _)| M(*m)).collect(),
            Gate::Operator { targets, .. } => targets.clone(),
        }
    }

    fn params(&self) -> Vec<f64> {
        match self {
            Gate::Displacement { xi: z, .. } | Gate::Squeeze { z, .. } | Gate::Beamsplitter { z, .. } => {
                vec![z.re, z.im]
            }
            Gate::ConditionalDisplacement { alpha, .. } => vec![alpha.re, alpha.im],
            Gate::CubicPhase { gamma, .. } => vec![*gamma],
            Gate::QuadraticPhase { t, .. } => vec![*t],
            Gate::ModeRotation { theta, .. }
            | Gate::Rx { theta, .. }
            | Gate::Ry { theta, .. }
            | Gate::Rz { theta, .. } => vec![*theta],
            Gate::CosineOfPosition { weight, terms, shift } => {
                let mut p = vec![weight.re, weight.im, *shift];
                p.extend(terms.iter().map(|(_, c)| *c));
                p
            }
            _ => Vec::new(),
        }
    }

    /// Dense matrix on [`Gate::targets`], for every gate with a fixed local form.
    pub fn local_matrix(&self, shape: &RegisterShape) -> Result<OperatorMatrix> {
        let cut = shape.cutoff();
        Ok(match self {
            Gate::Displacement { xi, .. } => gates::displacement(*xi, cut)?,
            Gate::Squeeze { z, .. } => gates::squeeze(*z, cut)?,
            Gate::Beamsplitter { z, .. } => gates::beamsplitter(*z, cut)?,
            Gate::CubicPhase { gamma, .. } => gates::cubic_phase(*gamma, cut)?,
            Gate::QuadraticPhase { t, .. } => gates::quadratic_phase(*t, cut)?,
            Gate::ModeRotation { theta, .. } => gates::mode_rotation(*theta, cut),
            Gate::ConditionalDisplacement { alpha, .. } => gates::conditional_displacement(*alpha, cut)?,
            Gate::Rx { theta, .. } => gates::rx(*theta),
            Gate::Ry { theta, .. } => gates::ry(*theta),
            Gate::Rz { theta, .. } => gates::rz(*theta),
            Gate::H { .. } => gates::hadamard(),
            Gate::X { .. } => gates::pauli_x(),
            Gate::Y { .. } => gates::pauli_y(),
            Gate::Z { .. } => gates::pauli_z(),
            Gate::S { .. } => gates::phase_s(),
            Gate::Cnot { .. } => gates::cnot(),
            Gate::Cz { .. } => gates::cz(),
            Gate::CosineOfPosition { weight, terms, shift } => {
                let targets = self.targets();
                let basis = PositionBasis::new(cut);
                let diag = cosine_diagonal(&basis, *weight, terms, *shift);
                let w1 = basis.vectors().map(|v| C64::new(v, 0.0));
                let mut w = OperatorMatrix::identity(1);
                for _ in &targets {
                    w = w.kron(&OperatorMatrix::from_matrix(w1.clone()));
                }
                let d = OperatorMatrix::from_diagonal(&diag);
                &(&w * &d) * &w.adjoint()
            }
            Gate::Operator { matrix, .. } => (**matrix).clone(),
        })
    }
}

/// Diagonal of a [`Gate::CosineOfPosition`] in the product position basis,
/// first term slowest.
fn cosine_diagonal(basis: &PositionBasis, weight: C64, terms: &[(usize, f64)], shift: f64) -> Vec<C64> {
    let l = basis.levels();
    let nodes = basis.nodes();
    let size = l.pow(terms.len() as u32);
    (0..size)
        .map(|mut idx| {
            let mut arg = shift;
            for (_, c) in terms.iter().rev() {
                arg += c * nodes[idx % l];
                idx /= l;
            }
            (weight * arg.cos()).exp()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Gate(Gate),
    /// Project `qubit` onto `outcome` and renormalize.
    PostSelect { qubit: usize, outcome: u8 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    shape: RegisterShape,
    steps: Vec<Step>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(shape: RegisterShape) -> Self {
        Self {
            shape,
            steps: Vec::new(),
            global_phase: 0.0,
        }
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.steps.iter().filter_map(|s| match s {
            Step::Gate(g) => Some(g),
            Step::PostSelect { .. } => None,
        })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Phase `φ` such that the intended operator is `e^{iφ}` times the gate product.
    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn add_global_phase(&mut self, phi: f64) {
        self.global_phase += phi;
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        let targets = gate.targets();
        if targets.is_empty() {
            return Err(Error::InvalidTarget(format!("{} needs at least one target", gate.kind())));
        }
        self.shape.check_targets(&targets)?;
        if let Gate::Operator { matrix, .. } = &gate {
            let k = self.shape.local_dim(&targets);
            if matrix.dim() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: matrix.dim(),
                });
            }
        }
        self.steps.push(Step::Gate(gate));
        Ok(self)
    }

    pub fn postselect(&mut self, qubit: usize, outcome: u8) -> Result<&mut Self> {
        self.shape.check_targets(&[Subsystem::Qubit(qubit)])?;
        if outcome > 1 {
            return Err(Error::param("post-selection outcome must be 0 or 1"));
        }
        self.steps.push(Step::PostSelect { qubit, outcome });
        Ok(self)
    }

    /// Appends `other`, which must live on the same register.
    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.shape != self.shape {
            return Err(Error::param("cannot concatenate circuits on different registers"));
        }
        self.steps.extend(other.steps.iter().cloned());
        self.global_phase += other.global_phase;
        Ok(self)
    }

    pub fn has_postselection(&self) -> bool {
        self.steps.iter().any(|s| matches!(s, Step::PostSelect { .. }))
    }

    pub fn gate_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for g in self.gates() {
            *counts.entry(g.kind()).or_insert(0) += 1;
        }
        counts
    }

    pub fn count(&self, kind: &str) -> usize {
        self.gates().filter(|g| g.kind() == kind).count()
    }

    pub fn compile(&self) -> Result<Program> {
        let mut ops = Vec::with_capacity(self.steps.len());
        let mut cache: Vec<(Gate, Arc<CompiledKernel>)> = Vec::new();
        for step in &self.steps {
            match step {
                Step::PostSelect { qubit, outcome } => ops.push(Op::Post {
                    qubit: *qubit,
                    outcome: *outcome,
                }),
                Step::Gate(gate) => {
                    let kernel = match cache.iter().find(|(g, _)| g == gate) {
                        Some((_, k)) => k.clone(),
                        None => {
                            let k = Arc::new(CompiledKernel::new(gate, &self.shape)?);
                            cache.push((gate.clone(), k.clone()));
                            k
                        }
                    };
                    ops.push(Op::Kernel(kernel));
                }
            }
        }
        Ok(Program {
            shape: self.shape,
            ops,
        })
    }

    /// Runs the circuit on a copy of `state`. The global phase is not applied.
    pub fn run(&self, state: &HybridState) -> Result<HybridState> {
        let mut out = state.clone();
        self.compile()?.run(&mut out, POSTSELECTION_FLOOR)?;
        Ok(out)
    }

    /// Dense matrix of the gate product, global phase included. Fails if
    /// the circuit post-selects.
    pub fn unitary(&self) -> Result<OperatorMatrix> {
        if self.has_postselection() {
            return Err(Error::param("a post-selecting circuit has no unitary"));
        }
        let program = self.compile()?;
        let n = self.shape.dim();
        let mut m = DMatrix::<C64>::zeros(n, n);
        let phase = C64::from_polar(1.0, self.global_phase);
        for j in 0..n {
            let mut amps = vec![C64::new(0.0, 0.0); n];
            amps[j] = C64::new(1.0, 0.0);
            let mut s = HybridState::from_amplitudes(self.shape, amps)?;
            program.run(&mut s, POSTSELECTION_FLOOR)?;
            for (i, a) in s.amplitudes().iter().enumerate() {
                m[(i, j)] = a * phase;
            }
        }
        Ok(OperatorMatrix::from_matrix(m))
    }

    /// The same gates on a register with `n_qubits` qubits; existing qubit
    /// indices are kept.
    pub fn widened(&self, n_qubits: usize) -> Result<Circuit> {
        if n_qubits < self.shape.n_qubits() {
            return Err(Error::param("cannot drop qubits while widening"));
        }
        Ok(Circuit {
            shape: self.shape.with_qubits(n_qubits)?,
            steps: self.steps.clone(),
            global_phase: self.global_phase,
        })
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Circuit> {
        text.parse()
    }
}

enum CompiledKernel {
    Dense {
        layout: TargetLayout,
        matrix: DMatrix<C64>,
    },
    Diagonal {
        layout: TargetLayout,
        diag: Vec<C64>,
    },
    /// Gate that is block diagonal in its first (qubit) target.
    Conditioned {
        layout0: TargetLayout,
        layout1: TargetLayout,
        block0: DMatrix<C64>,
        block1: DMatrix<C64>,
    },
    /// Position-basis diagonal with basis changes on each listed mode.
    PositionDiagonal {
        to_position: DMatrix<C64>,
        from_position: DMatrix<C64>,
        mode_layouts: Vec<TargetLayout>,
        layout: TargetLayout,
        diag: Vec<C64>,
    },
}

impl CompiledKernel {
    fn new(gate: &Gate, shape: &RegisterShape) -> Result<Self> {
        let targets = gate.targets();
        match gate {
            Gate::ConditionalDisplacement { alpha, qubit, mode } => {
                let (b0, b1) = gates::conditional_displacement_blocks(*alpha, shape.cutoff())?;
                let m = Subsystem::Mode(*mode);
                let stride = shape.stride(Subsystem::Qubit(*qubit));
                let base = shape.layout(&[m])?;
                let mut layout0 = TargetLayout {
                    offsets: base.offsets.clone(),
                    bases: Vec::new(),
                };
                let mut layout1 = layout0.clone();
                for &b in &base.bases {
                    if shape.digit(b, Subsystem::Qubit(*qubit)) == 0 {
                        layout0.bases.push(b);
                        layout1.bases.push(b + stride);
                    }
                }
                Ok(CompiledKernel::Conditioned {
                    layout0,
                    layout1,
                    block0: b0.into_matrix(),
                    block1: b1.into_matrix(),
                })
            }
            Gate::CosineOfPosition { weight, terms, shift } => {
                let basis = PositionBasis::new(shape.cutoff());
                let w = basis.vectors().map(|v| C64::new(v, 0.0));
                let mode_layouts = targets.iter().map(|t| shape.layout(&[*t])).collect::<Result<Vec<_>>>()?;
                Ok(CompiledKernel::PositionDiagonal {
                    to_position: w.transpose(),
                    from_position: w,
                    mode_layouts,
                    layout: shape.layout(&targets)?,
                    diag: cosine_diagonal(&basis, *weight, terms, *shift),
                })
            }
            _ => {
                let m = gate.local_matrix(shape)?;
                let layout = shape.layout(&targets)?;
                if layout.offsets.len() != m.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: layout.offsets.len(),
                        found: m.dim(),
                    });
                }
                if !m.is_finite() {
                    return Err(Error::NonFinite("gate matrix"));
                }
                Ok(match m.diagonal_entries() {
                    Some(diag) => CompiledKernel::Diagonal { layout, diag },
                    None => CompiledKernel::Dense {
                        layout,
                        matrix: m.into_matrix(),
                    },
                })
            }
        }
    }

    fn apply(&self, amps: &mut [C64]) {
        match self {
            CompiledKernel::Dense { layout, matrix } => apply_dense(amps, matrix, layout),
            CompiledKernel::Diagonal { layout, diag } => apply_diagonal(amps, diag, layout),
            CompiledKernel::Conditioned {
                layout0,
                layout1,
                block0,
                block1,
            } => {
                apply_dense(amps, block0, layout0);
                apply_dense(amps, block1, layout1);
            }
            CompiledKernel::PositionDiagonal {
                to_position,
                from_position,
                mode_layouts,
                layout,
                diag,
            } => {
                for l in mode_layouts {
                    apply_dense(amps, to_position, l);
                }
                apply_diagonal(amps, diag, layout);
                for l in mode_layouts {
                    apply_dense(amps, from_position, l);
                }
            }
        }
    }
}

enum Op {
    Kernel(Arc<CompiledKernel>),
    Post { qubit: usize, outcome: u8 },
}

/// A circuit with every gate matrix precomputed.
pub struct Program {
    shape: RegisterShape,
    ops: Vec<Op>,
}

impl Program {
    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    /// Applies every step in place. Post-selection below `floor` is an error.
    pub fn run(&self, state: &mut HybridState, floor: f64) -> Result<()> {
        if *state.shape() != self.shape {
            return Err(Error::DimensionMismatch {
                expected: self.shape.dim(),
                found: state.shape().dim(),
            });
        }
        for op in &self.ops {
            match op {
                Op::Kernel(k) => k.apply(state.amplitudes_mut()),
                Op::Post { qubit, outcome } => {
                    state.postselect(*qubit, *outcome, floor)?;
                }
            }
        }
        Ok(())
    }
}

fn fmt_targets(targets: &[Subsystem]) -> String {
    targets.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "REGISTER qubits={} modes={} cutoff={}",
            self.shape.n_qubits(),
            self.shape.n_modes(),
            self.shape.cutoff()
        )?;
        if self.global_phase != 0.0 {
            writeln!(f, "PHASE {}", self.global_phase)?;
        }
        for step in &self.steps {
            match step {
                Step::PostSelect { qubit, outcome } => writeln!(f, "POST q{qubit}={outcome}")?,
                Step::Gate(g) => {
                    write!(f, "{}", g.kind())?;
                    if let Gate::Operator { label, .. } = g {
                        write!(f, " {label}")?;
                    }
                    for p in g.params() {
                        write!(f, " {p}")?;
                    }
                    writeln!(f, " @{}", fmt_targets(&g.targets()))?;
                }
            }
        }
        Ok(())
    }
}

fn parse_target(tok: &str) -> Option<Subsystem> {
    if let Some(q) = tok.strip_prefix('q') {
        q.parse().ok().map(Subsystem::Qubit)
    } else if let Some(m) = tok.strip_prefix('m') {
        m.parse().ok().map(Subsystem::Mode)
    } else {
        None
    }
}

fn parse_gate(kind: &str, p: &[f64], t: &[Subsystem]) -> std::result::Result<Gate, String> {
    use Subsystem::{Mode as M, Qubit as Q};
    let want = |np: usize, nt: usize| -> std::result::Result<(), String> {
        if p.len() != np || t.len() != nt {
            Err(format!("{kind} takes {np} parameters and {nt} targets"))
        } else {
            Ok(())
        }
    };
    let z = |i: usize| C64::new(p[i], p[i + 1]);
    let qubit = |i: usize| match t[i] {
        Q(q) => Ok(q),
        M(_) => Err(format!("{kind} target {} must be a qubit", i + 1)),
    };
    let mode = |i: usize| match t[i] {
        M(m) => Ok(m),
        Q(_) => Err(format!("{kind} target {} must be a mode", i + 1)),
    };
    Ok(match kind {
        "DISP" => {
            want(2, 1)?;
            Gate::Displacement { xi: z(0), mode: mode(0)? }
        }
        "SQZ" => {
            want(2, 1)?;
            Gate::Squeeze { z: z(0), mode: mode(0)? }
        }
        "BS" => {
            want(2, 2)?;
            Gate::Beamsplitter {
                z: z(0),
                modes: (mode(0)?, mode(1)?),
            }
        }
        "CUBIC" => {
            want(1, 1)?;
            Gate::CubicPhase { gamma: p[0], mode: mode(0)? }
        }
        "QPHASE" => {
            want(1, 1)?;
            Gate::QuadraticPhase { t: p[0], mode: mode(0)? }
        }
        "ROT" => {
            want(1, 1)?;
            Gate::ModeRotation { theta: p[0], mode: mode(0)? }
        }
        "CD" => {
            want(2, 2)?;
            Gate::ConditionalDisplacement {
                alpha: z(0),
                qubit: qubit(0)?,
                mode: mode(1)?,
            }
        }
        "RX" | "RY" | "RZ" => {
            want(1, 1)?;
            let (theta, q) = (p[0], qubit(0)?);
            match kind {
                "RX" => Gate::Rx { theta, qubit: q },
                "RY" => Gate::Ry { theta, qubit: q },
                _ => Gate::Rz { theta, qubit: q },
            }
        }
        "H" | "X" | "Y" | "Z" | "S" => {
            want(0, 1)?;
            let q = qubit(0)?;
            match kind {
                "H" => Gate::H { qubit: q },
                "X" => Gate::X { qubit: q },
                "Y" => Gate::Y { qubit: q },
                "Z" => Gate::Z { qubit: q },
                _ => Gate::S { qubit: q },
            }
        }
        "CNOT" => {
            want(0, 2)?;
            Gate::Cnot {
                control: qubit(0)?,
                target: qubit(1)?,
            }
        }
        "CZ" => {
            want(0, 2)?;
            Gate::Cz { a: qubit(0)?, b: qubit(1)? }
        }
        "COSX" => {
            if p.len() != 3 + t.len() || t.is_empty() {
                return Err("COSX takes weight (re im), shift and one coefficient per mode".into());
            }
            let terms = (0..t.len()).map(|i| Ok((mode(i)?, p[3 + i]))).collect::<std::result::Result<_, String>>()?;
            Gate::CosineOfPosition {
                weight: z(0),
                terms,
                shift: p[2],
            }
        }
        "OP" => return Err("dense OP gates cannot be read back from text".into()),
        other => return Err(format!("unknown gate kind {other}")),
    })
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| Error::Parse { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let kind = words.next().unwrap_or_default();
            if kind == "REGISTER" {
                if circuit.is_some() {
                    return Err(err("REGISTER given twice".into()));
                }
                let mut vals = BTreeMap::new();
                for w in words {
                    let (k, v) = w.split_once('=').ok_or_else(|| err(format!("expected key=value, got {w}")))?;
                    let v: usize = v.parse().map_err(|_| err(format!("bad integer {v}")))?;
                    vals.insert(k.to_string(), v);
                }
                let get = |k: &str| vals.get(k).copied().ok_or_else(|| err(format!("REGISTER missing {k}")));
                let cutoff = crate::FockCutoff::new(get("cutoff")?)?;
                let shape = RegisterShape::new(get("qubits")?, get("modes")?, cutoff)?;
                circuit = Some(Circuit::new(shape));
                continue;
            }
            let c = circuit.as_mut().ok_or_else(|| err("REGISTER line must come first".into()))?;
            match kind {
                "PHASE" => {
                    let v = words
                        .next()
                        .and_then(|w| w.parse::<f64>().ok())
                        .ok_or_else(|| err("PHASE needs a number".into()))?;
                    c.global_phase += v;
                }
                "POST" => {
                    let spec = words.next().ok_or_else(|| err("POST needs q<index>=<outcome>".into()))?;
                    let (q, o) = spec.split_once('=').ok_or_else(|| err("POST needs q<index>=<outcome>".into()))?;
                    let qubit = match parse_target(q) {
                        Some(Subsystem::Qubit(q)) => q,
                        _ => return Err(err(format!("bad qubit {q}"))),
                    };
                    let outcome: u8 = o.parse().map_err(|_| err(format!("bad outcome {o}")))?;
                    c.postselect(qubit, outcome).map_err(|e| err(e.to_string()))?;
                }
                _ => {
                    let rest: Vec<&str> = words.collect();
                    let at = rest
                        .iter()
                        .position(|w| w.starts_with('@'))
                        .ok_or_else(|| err("missing @targets".into()))?;
                    let params = rest[..at]
                        .iter()
                        .map(|w| w.parse::<f64>().map_err(|_| err(format!("bad number {w}"))))
                        .collect::<Result<Vec<f64>>>()?;
                    let mut target_words: Vec<&str> = rest[at..].to_vec();
                    target_words[0] = &target_words[0][1..];
                    let targets = target_words
                        .iter()
                        .filter(|w| !w.is_empty())
                        .map(|w| parse_target(w).ok_or_else(|| err(format!("bad target {w}"))))
                        .collect::<Result<Vec<_>>>()?;
                    let gate = parse_gate(kind, &params, &targets).map_err(err)?;
                    c.push(gate).map_err(|e| err(e.to_string()))?;
                }
            }
        }
        circuit.ok_or(Error::Parse {
            line: 0,
            message: "empty circuit text".into(),
        })
    }
}
