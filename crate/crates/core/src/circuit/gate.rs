use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{OqwError, Result};
use crate::matrix::ComplexMatrix;

/// Gate kinds understood by the circuit layer. Phases are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    S,
    Sdg,
    T,
    Tdg,
    /// `diag(1, e^{iπ/8})`.
    R,
    Phase(f64),
    Cnot,
    CPhase(f64),
}

impl GateKind {
    /// Number of qubits the gate acts on.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::CPhase(_) => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::T => "T",
            GateKind::Tdg => "Tdg",
            GateKind::R => "R",
            GateKind::Phase(_) => "P",
            GateKind::Cnot => "CNOT",
            GateKind::CPhase(_) => "CP",
        }
    }

    fn phase(self) -> Option<f64> {
        match self {
            GateKind::Phase(theta) | GateKind::CPhase(theta) => Some(theta),
            _ => None,
        }
    }

    /// The 2×2 or 4×4 unitary of this gate. Two-qubit matrices are ordered
    /// (control, target) with the control as the more significant bit.
    pub fn matrix(self) -> Result<ComplexMatrix> {
        if let Some(theta) = self.phase() {
            if !theta.is_finite() {
                return Err(OqwError::Domain(format!("non-finite phase {theta}")));
            }
        }
        let one = Complex64::new(1.0, 0.0);
        let phase = |theta: f64| ComplexMatrix::diag(&[one, Complex64::from_polar(1.0, theta)]);
        Ok(match self {
            GateKind::H => ComplexMatrix::from_real(
                2,
                2,
                &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            )?,
            GateKind::X => ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])?,
            GateKind::S => phase(PI / 2.0),
            GateKind::Sdg => phase(-PI / 2.0),
            GateKind::T => phase(PI / 4.0),
            GateKind::Tdg => phase(-PI / 4.0),
            GateKind::R => phase(PI / 8.0),
            GateKind::Phase(theta) => phase(theta),
            GateKind::Cnot => ComplexMatrix::from_real(
                4,
                4,
                &[
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, 1.0, 0.0, 0.0, //
                    0.0, 0.0, 0.0, 1.0, //
                    0.0, 0.0, 1.0, 0.0,
                ],
            )?,
            GateKind::CPhase(theta) => {
                ComplexMatrix::diag(&[one, one, one, Complex64::from_polar(1.0, theta)])
            }
        })
    }
}

/// Unitary of a gate kind; see [`GateKind::matrix`].
pub fn gate_matrix(kind: GateKind) -> Result<ComplexMatrix> {
    kind.matrix()
}

/// A gate placed on specific 1-based qubits. For controlled kinds the first
/// qubit is the control.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
}

impl Gate {
    /// Builds a gate, checking arity, distinctness and that qubits are ≥ 1.
    /// Controlled-phase gates are symmetric and stored with ascending qubits.
    pub fn new(kind: GateKind, qubits: &[usize]) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(OqwError::Validation(format!(
                "{} takes {} qubit(s), got {}",
                kind.name(),
                kind.arity(),
                qubits.len()
            )));
        }
        if qubits.contains(&0) {
            return Err(OqwError::Validation("qubit indices are 1-based".into()));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(OqwError::Validation(format!(
                "{} uses qubit {} twice",
                kind.name(),
                qubits[0]
            )));
        }
        kind.matrix()?;
        let mut qubits = qubits.to_vec();
        if matches!(kind, GateKind::CPhase(_)) {
            qubits.sort_unstable();
        }
        Ok(Self { kind, qubits })
    }

    pub fn single(kind: GateKind, qubit: usize) -> Result<Self> {
        Self::new(kind, &[qubit])
    }

    pub fn controlled(kind: GateKind, control: usize, target: usize) -> Result<Self> {
        Self::new(kind, &[control, target])
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    /// The gate as a `2^n × 2^n` unitary on `num_qubits` qubits, qubit 1
    /// being the most significant bit of the basis index.
    pub fn embed(&self, num_qubits: usize) -> Result<ComplexMatrix> {
        embed(self, num_qubits)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        if let Some(theta) = self.kind.phase() {
            write!(f, " {}", format_phase(theta))?;
        }
        Ok(())
    }
}

pub(crate) fn format_phase(theta: f64) -> String {
    const NAMED: [(f64, &str); 4] = [
        (PI / 2.0, "pi/2"),
        (PI / 4.0, "pi/4"),
        (PI / 8.0, "pi/8"),
        (-PI / 4.0, "-pi/4"),
    ];
    NAMED
        .iter()
        .find(|(value, _)| *value == theta)
        .map_or_else(|| format!("{theta:?}"), |(_, name)| (*name).to_string())
}

/// Embeds `gate` into an `n`-qubit register (qubit 1 = most significant bit).
pub fn embed(gate: &Gate, num_qubits: usize) -> Result<ComplexMatrix> {
    if num_qubits == 0 || num_qubits >= usize::BITS as usize {
        return Err(OqwError::Domain(format!(
            "unsupported qubit count {num_qubits}"
        )));
    }
    if let Some(&q) = gate.qubits.iter().find(|&&q| q > num_qubits) {
        return Err(OqwError::Domain(format!(
            "qubit {q} out of range for {num_qubits} qubits"
        )));
    }
    let local = gate.kind.matrix()?;
    let dim = 1usize << num_qubits;
    let shifts: Vec<usize> = gate.qubits.iter().map(|&q| num_qubits - q).collect();
    let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let k = shifts.len();

    // Local index of a global basis state: the gate's qubits read in order,
    // the first gate qubit being the most significant local bit.
    let local_index = |global: usize| {
        shifts
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((global >> s) & 1))
    };
    let with_local = |global: usize, local: usize| {
        shifts
            .iter()
            .enumerate()
            .fold(global & !mask, |acc, (pos, &s)| {
                acc | (((local >> (k - 1 - pos)) & 1) << s)
            })
    };

    let mut out = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let lc = local_index(col);
        for lr in 0..(1usize << k) {
            let amp = local[(lr, lc)];
            if amp != Complex64::new(0.0, 0.0) {
                out[(with_local(col, lr), col)] = amp;
            }
        }
    }
    Ok(out)
}
