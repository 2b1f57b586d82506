use proptest::prelude::*;

use oqw::circuit::{qft, toffoli13, Circuit, Gate, GateKind, Slice};
use oqw::lindblad::{
    build_dqc_lindblad, integrate, integrate_observed, lindblad_rhs, uniform_history_state,
};
use oqw::report::basis_state;
use oqw::{Complex64, ComplexMatrix};

fn single_gate(num_qubits: usize, gate: Gate) -> Circuit {
    Circuit::new("gate", num_qubits, vec![Slice::from(gate)]).unwrap()
}

fn random_density(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        let data = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let a = ComplexMatrix::from_vec(dim, dim, data).unwrap();
        let rho = a.matmul(&a.dagger()).unwrap();
        let trace = rho.trace().unwrap().re;
        rho.scale_real(1.0 / trace).hermitian_part().unwrap()
    })
}

fn state(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| {
            let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            v.into_iter()
                .map(|(a, b)| Complex64::new(a / norm, b / norm))
                .collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generator_is_traceless_and_hermitian(reset in any::<bool>(), rho in random_density(16)) {
        // Spread a random 16-dimensional state over registers 0 and 1 of the
        // 80-dimensional qft3 model (basis index a·10 + t).
        let model = build_dqc_lindblad(&qft(3).unwrap(), reset).unwrap();
        let idx = |k: usize| (k / 2) * model.num_nodes() + k % 2;
        let mut full = ComplexMatrix::zeros(model.dim(), model.dim());
        for r in 0..16 {
            for c in 0..16 {
                full[(idx(r), idx(c))] = rho[(r, c)];
            }
        }
        let rhs = lindblad_rhs(&model, &full).unwrap();
        prop_assert!(rhs.trace().unwrap().norm() < 1e-10);
        prop_assert!(rhs.hermiticity_residual().unwrap() < 1e-10);
    }

    #[test]
    fn history_state_is_stationary_for_one_qubit_gates(
        kind in prop::sample::select(vec![GateKind::H, GateKind::X, GateKind::S, GateKind::T, GateKind::R, GateKind::Phase(0.3)]),
        psi in state(2),
    ) {
        let circuit = single_gate(1, Gate::single(kind, 1).unwrap());
        let model = build_dqc_lindblad(&circuit, false).unwrap();
        let star = uniform_history_state(&circuit, &psi).unwrap();
        prop_assert!(lindblad_rhs(&model, &star).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn history_state_is_stationary_for_two_qubit_gates(
        kind in prop::sample::select(vec![GateKind::Cnot, GateKind::CPhase(std::f64::consts::FRAC_PI_2), GateKind::CPhase(-0.7)]),
        flip in any::<bool>(),
        psi in state(4),
    ) {
        let (a, b) = if flip { (2, 1) } else { (1, 2) };
        let circuit = single_gate(2, Gate::controlled(kind, a, b).unwrap());
        let model = build_dqc_lindblad(&circuit, false).unwrap();
        let star = uniform_history_state(&circuit, &psi).unwrap();
        prop_assert!(lindblad_rhs(&model, &star).unwrap().frobenius_norm() < 1e-10);
    }
}

#[test]
fn trajectory_keeps_trace_and_hermiticity() {
    let circuit = qft(3).unwrap();
    let model = build_dqc_lindblad(&circuit, false).unwrap();
    let rho0 = model
        .register_state(&basis_state("101", 3).unwrap(), 0)
        .unwrap();
    let mut worst = (0.0f64, 0.0f64);
    let out = integrate_observed(&model, &rho0, 0.05, 1e-12, 20.0, 1, |_, rho| {
        let drift = (rho.trace().unwrap().re - 1.0).abs();
        worst = (
            worst.0.max(drift),
            worst.1.max(rho.hermiticity_residual().unwrap()),
        );
    })
    .unwrap();
    assert!(!out.stationary);
    assert!(worst.0 < 1e-10 && worst.1 < 1e-10, "{worst:?}");
}

#[test]
fn desk_scale_toffoli_reaches_the_history_state() {
    let circuit = toffoli13();
    let model = build_dqc_lindblad(&circuit, false).unwrap();
    let psi0 = basis_state("110", 3).unwrap();
    let rho0 = model.register_state(&psi0, 0).unwrap();
    let out = integrate(&model, &rho0, 0.1, 1e-8, 2000.0).unwrap();
    assert!(out.stationary);

    let marginals = model.node_marginals(&out.state).unwrap();
    for p in &marginals {
        assert!((p - 1.0 / 14.0).abs() < 1e-4, "{marginals:?}");
    }
    // Conditional state in the last register versus the circuit output |111⟩.
    let last = 13;
    let target = circuit.product().unwrap().apply(&psi0).unwrap();
    let mut block = ComplexMatrix::zeros(8, 8);
    for a in 0..8 {
        for b in 0..8 {
            block[(a, b)] = out.state[(a * 14 + last, b * 14 + last)];
        }
    }
    let p = block.trace().unwrap().re;
    let fidelity = block.scale_real(1.0 / p).expectation(&target).unwrap();
    assert!(fidelity >= 1.0 - 1e-4, "{fidelity}");
}
