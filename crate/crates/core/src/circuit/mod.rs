//! Circuits as ordered lists of time slices.
//!
//! Each slice holds gates on pairwise-disjoint qubits and compiles to one
//! unitary `U_t`; a circuit with `T` slices therefore drives a chain walk
//! with `T + 1` time registers.

mod builtin;
mod gate;
mod text;

use std::collections::BTreeSet;
use std::fmt;

pub use builtin::{dft_matrix, qft, toffoli13, toffoli_permutation};
pub use gate::{embed, gate_matrix, Gate, GateKind};
pub use text::{parse_circuit, parse_circuit_named, render};

use crate::error::{OqwError, Result};
use crate::matrix::ComplexMatrix;

/// Gates applied in the same time step. Qubit sets are disjoint and the
/// slice is never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    gates: Vec<Gate>,
}

impl Slice {
    pub fn new(gates: Vec<Gate>) -> Result<Self> {
        if gates.is_empty() {
            return Err(OqwError::Validation("empty slice".into()));
        }
        if let Some(q) = first_overlap(&gates) {
            return Err(OqwError::Validation(format!(
                "qubit {q} is used by more than one gate in a slice"
            )));
        }
        Ok(Self { gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Highest qubit index touched by the slice.
    pub fn max_qubit(&self) -> usize {
        self.gates
            .iter()
            .flat_map(|g| g.qubits().iter().copied())
            .max()
            .unwrap_or(0)
    }
}

pub(crate) fn first_overlap(gates: &[Gate]) -> Option<usize> {
    let mut seen = BTreeSet::new();
    gates
        .iter()
        .flat_map(|g| g.qubits().iter().copied())
        .find(|&q| !seen.insert(q))
}

impl From<Gate> for Slice {
    fn from(gate: Gate) -> Self {
        Self { gates: vec![gate] }
    }
}

/// Product of the embedded member gates of a slice.
pub fn slice_unitary(slice: &Slice, num_qubits: usize) -> Result<ComplexMatrix> {
    if let Some(q) = first_overlap(&slice.gates) {
        return Err(OqwError::Validation(format!(
            "qubit {q} overlaps within slice"
        )));
    }
    let mut acc: Option<ComplexMatrix> = None;
    for gate in &slice.gates {
        let u = embed(gate, num_qubits)?;
        acc = Some(match acc {
            None => u,
            Some(prev) => u.matmul(&prev)?,
        });
    }
    acc.ok_or_else(|| OqwError::Validation("empty slice".into()))
}

/// A named quantum circuit on `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    name: String,
    num_qubits: usize,
    slices: Vec<Slice>,
}

impl Circuit {
    /// Largest register handled by the dense simulator.
    pub const MAX_QUBITS: usize = 12;

    pub fn new(name: impl Into<String>, num_qubits: usize, slices: Vec<Slice>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(OqwError::Validation(
                "a circuit needs at least one qubit".into(),
            ));
        }
        if num_qubits > Self::MAX_QUBITS {
            return Err(OqwError::Validation(format!(
                "{num_qubits} qubits exceeds the supported maximum of {}",
                Self::MAX_QUBITS
            )));
        }
        if let Some(bad) = slices.iter().find(|s| s.max_qubit() > num_qubits) {
            return Err(OqwError::Validation(format!(
                "qubit {} out of range for {num_qubits} qubits",
                bad.max_qubit()
            )));
        }
        Ok(Self {
            name: name.into(),
            num_qubits,
            slices,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Hilbert-space dimension `2^num_qubits`.
    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    /// Number of time slices `T`.
    pub fn depth(&self) -> usize {
        self.slices.len()
    }

    pub fn unitaries(&self) -> Result<Vec<ComplexMatrix>> {
        circuit_unitaries(self)
    }

    pub fn product(&self) -> Result<ComplexMatrix> {
        circuit_product(self)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// `[U_1, …, U_T]`, one unitary per slice.
pub fn circuit_unitaries(circuit: &Circuit) -> Result<Vec<ComplexMatrix>> {
    circuit
        .slices
        .iter()
        .map(|s| slice_unitary(s, circuit.num_qubits))
        .collect()
}

/// `U_T · … · U_1`; the identity for a circuit without slices.
pub fn circuit_product(circuit: &Circuit) -> Result<ComplexMatrix> {
    circuit_unitaries(circuit)?
        .iter()
        .try_fold(ComplexMatrix::identity(circuit.dim()), |acc, u| {
            u.matmul(&acc)
        })
}
