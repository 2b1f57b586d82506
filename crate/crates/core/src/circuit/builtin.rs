use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::{Circuit, Gate, GateKind, Slice};
use crate::error::{OqwError, Result};
use crate::matrix::ComplexMatrix;

fn one(kind: GateKind, q: usize) -> Slice {
    Gate::single(kind, q).expect("static gate").into()
}

fn two(kind: GateKind, c: usize, t: usize) -> Slice {
    Gate::controlled(kind, c, t).expect("static gate").into()
}

fn pair(a: Gate, b: Gate) -> Slice {
    Slice::new(vec![a, b]).expect("static slice")
}

/// Toffoli gate (controls 1 and 2, target 3) from H, T, T† and CNOT in 13
/// slices. Two pairs of parallel single-qubit gates share a slice.
pub fn toffoli13() -> Circuit {
    use GateKind::*;
    let slices = vec![
        one(H, 3),
        two(Cnot, 2, 3),
        one(Tdg, 3),
        two(Cnot, 1, 3),
        one(T, 3),
        two(Cnot, 2, 3),
        one(Tdg, 3),
        two(Cnot, 1, 3),
        pair(Gate::single(T, 2).unwrap(), Gate::single(T, 3).unwrap()),
        one(H, 3),
        two(Cnot, 1, 2),
        pair(Gate::single(T, 1).unwrap(), Gate::single(Tdg, 2).unwrap()),
        two(Cnot, 1, 2),
    ];
    Circuit::new("toffoli", 3, slices).expect("static circuit")
}

/// Quantum Fourier transform on 3 or 4 qubits: Hadamards and controlled
/// phases, then the bit reversal as swaps of three CNOTs each, so the
/// product is the plain DFT matrix. `qft(3)` has 9 slices, `qft(4)` 16.
pub fn qft(n: usize) -> Result<Circuit> {
    if !(3..=4).contains(&n) {
        return Err(OqwError::Domain(format!(
            "built-in QFT exists for 3 or 4 qubits, not {n}"
        )));
    }
    let mut slices = Vec::new();
    for target in 1..=n {
        slices.push(one(GateKind::H, target));
        for control in target + 1..=n {
            let theta = PI / f64::from(1u32 << (control - target));
            slices.push(two(GateKind::CPhase(theta), control, target));
        }
    }
    for low in 1..=n / 2 {
        let high = n + 1 - low;
        slices.push(two(GateKind::Cnot, low, high));
        slices.push(two(GateKind::Cnot, high, low));
        slices.push(two(GateKind::Cnot, low, high));
    }
    Circuit::new(format!("qft{n}"), n, slices)
}

/// The 8×8 Toffoli permutation: identity except `|110⟩ ↔ |111⟩`.
pub fn toffoli_permutation() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(8, 8);
    for basis in 0..8usize {
        let image = match basis {
            0b110 => 0b111,
            0b111 => 0b110,
            other => other,
        };
        m[(image, basis)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// `dim × dim` DFT matrix with entries `e^{2πi·jk/dim}/√dim`.
pub fn dft_matrix(dim: usize) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(OqwError::Domain("DFT dimension must be positive".into()));
    }
    let norm = 1.0 / (dim as f64).sqrt();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        for k in 0..dim {
            // Reduce jk mod dim before scaling to keep the angle exact.
            let angle = TAU * ((j * k) % dim) as f64 / dim as f64;
            m[(j, k)] = Complex64::from_polar(norm, angle);
        }
    }
    Ok(m)
}
