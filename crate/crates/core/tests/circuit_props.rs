use proptest::prelude::*;

use oqw::circuit::{
    circuit_product, embed, parse_circuit_named, qft, render, toffoli13, Circuit, Gate, GateKind,
    Slice,
};
use oqw::ComplexMatrix;

fn kind(index: usize, phase: f64) -> GateKind {
    match index {
        0 => GateKind::H,
        1 => GateKind::X,
        2 => GateKind::S,
        3 => GateKind::Sdg,
        4 => GateKind::T,
        5 => GateKind::Tdg,
        6 => GateKind::R,
        7 => GateKind::Phase(phase),
        8 => GateKind::Cnot,
        _ => GateKind::CPhase(phase),
    }
}

/// Packs a gate list into slices greedily, opening a new slice on overlap.
fn pack(num_qubits: usize, gates: Vec<Gate>) -> Circuit {
    let mut slices: Vec<Vec<Gate>> = Vec::new();
    for gate in gates {
        let fits = slices.last().is_some_and(|s| {
            s.iter()
                .all(|g| g.qubits().iter().all(|q| !gate.qubits().contains(q)))
        });
        if fits {
            slices.last_mut().unwrap().push(gate);
        } else {
            slices.push(vec![gate]);
        }
    }
    let slices = slices.into_iter().map(|g| Slice::new(g).unwrap()).collect();
    Circuit::new("random", num_qubits, slices).unwrap()
}

fn random_circuit() -> impl Strategy<Value = Circuit> {
    (1usize..=4).prop_flat_map(|n| {
        let gate = (0usize..10, 1..=n, 1..=n, -10.0f64..10.0).prop_filter_map(
            "two-qubit gates need distinct qubits",
            move |(k, a, b, phase)| {
                let kind = kind(k, phase);
                if kind.arity() == 2 {
                    (a != b).then(|| Gate::new(kind, &[a, b]).unwrap())
                } else {
                    Some(Gate::single(kind, a).unwrap())
                }
            },
        );
        prop::collection::vec(gate, 1..12).prop_map(move |gates| pack(n, gates))
    })
}

proptest! {
    #[test]
    fn render_parse_round_trip(circuit in random_circuit()) {
        let text = render(&circuit);
        let parsed = parse_circuit_named(&text, circuit.name()).unwrap();
        prop_assert_eq!(parsed, circuit);
    }

    #[test]
    fn product_matches_gate_by_gate_embedding(circuit in random_circuit()) {
        let n = circuit.num_qubits();
        let mut want = ComplexMatrix::identity(circuit.dim());
        for slice in circuit.slices() {
            for gate in slice.gates() {
                want = embed(gate, n).unwrap().matmul(&want).unwrap();
            }
        }
        let got = circuit_product(&circuit).unwrap();
        prop_assert!(got.frobenius_distance(&want).unwrap() < 1e-12);
        prop_assert!(got.is_unitary(1e-12));
    }
}

#[test]
fn builtin_slices_are_unitary() {
    for circuit in [toffoli13(), qft(3).unwrap(), qft(4).unwrap()] {
        for (t, u) in circuit.unitaries().unwrap().iter().enumerate() {
            assert!(u.is_unitary(1e-12), "{} slice {}", circuit.name(), t + 1);
        }
    }
}

#[test]
fn builtin_depths() {
    assert_eq!(toffoli13().depth(), 13);
    assert_eq!(qft(3).unwrap().depth(), 9);
    assert_eq!(qft(4).unwrap().depth(), 16);
}

#[test]
fn builtins_round_trip_through_text() {
    for circuit in [toffoli13(), qft(3).unwrap(), qft(4).unwrap()] {
        let parsed = parse_circuit_named(&render(&circuit), circuit.name()).unwrap();
        assert_eq!(parsed, circuit);
    }
}
