//! Continuous-time master equation for the dissipative-computing chain.
//!
//! `dρ/dt = Σ_k L_k ρ L_k† − ½{L_k† L_k, ρ}` with no Hamiltonian. The full
//! space is ordered internal ⊗ node, so basis index `a·(T+1) + t` is internal
//! state `a` in register `t`. Everything is dense, which caps the dimension
//! at [`DESK_SCALE_CAP`].

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{OqwError, Result};
use crate::matrix::ComplexMatrix;

/// Largest full dimension accepted by [`build_dqc_lindblad`].
pub const DESK_SCALE_CAP: usize = 256;

/// Default integration step, in units where every jump rate is 1.
pub const DEFAULT_DT: f64 = 0.01;

/// Tolerance on trace and Hermiticity of inputs to [`lindblad_rhs`].
const INPUT_TOL: f64 = 1e-8;

/// Trace drift that triggers renormalization during integration.
const TRACE_DRIFT: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-wise nonzeros of a dense operator, used in the generator hot loop.
#[derive(Debug, Clone)]
struct SparseRows {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseRows {
    fn from_dense(m: &ComplexMatrix) -> Self {
        let rows = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .filter(|&j| m[(i, j)] != ZERO)
                    .map(|j| (j, m[(i, j)]))
                    .collect()
            })
            .collect();
        Self {
            dim: m.rows(),
            rows,
        }
    }

    /// `out += A · X`
    fn left_mul_into(&self, x: &[Complex64], out: &mut [Complex64], factor: Complex64) {
        let n = self.dim;
        for (i, row) in self.rows.iter().enumerate() {
            let out_row = &mut out[i * n..(i + 1) * n];
            for &(k, v) in row {
                let v = v * factor;
                for (o, xv) in out_row.iter_mut().zip(&x[k * n..(k + 1) * n]) {
                    *o += v * xv;
                }
            }
        }
    }

    /// `out += X · A`
    fn right_mul_into(&self, x: &[Complex64], out: &mut [Complex64], factor: Complex64) {
        let n = self.dim;
        for (k, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                let v = v * factor;
                for i in 0..n {
                    out[i * n + j] += x[i * n + k] * v;
                }
            }
        }
    }

    /// `out += X · A†`
    fn right_mul_dagger_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        for (j, row) in self.rows.iter().enumerate() {
            for &(k, v) in row {
                let v = v.conj();
                for i in 0..n {
                    out[i * n + j] += x[i * n + k] * v;
                }
            }
        }
    }
}

/// Purely dissipative master-equation model.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    dim: usize,
    num_nodes: usize,
    jumps: Vec<ComplexMatrix>,
    sparse_jumps: Vec<SparseRows>,
    decay: SparseRows,
}

impl LindbladModel {
    /// Model on a `dim`-dimensional space with the given jump operators. The
    /// space is treated as a single register for node marginals.
    pub fn new(dim: usize, jumps: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_nodes(dim, 1, jumps)
    }

    /// Model whose space is ordered internal ⊗ node with `num_nodes` nodes.
    pub fn with_nodes(dim: usize, num_nodes: usize, jumps: Vec<ComplexMatrix>) -> Result<Self> {
        if dim == 0 || num_nodes == 0 || !dim.is_multiple_of(num_nodes) {
            return Err(OqwError::Shape(format!(
                "dimension {dim} is not a multiple of {num_nodes} nodes"
            )));
        }
        if let Some(bad) = jumps.iter().find(|l| l.rows() != dim || l.cols() != dim) {
            return Err(OqwError::Shape(format!(
                "jump operator is {}x{}, expected {dim}x{dim}",
                bad.rows(),
                bad.cols()
            )));
        }
        let mut decay = ComplexMatrix::zeros(dim, dim);
        for l in &jumps {
            decay.add_assign(&l.dagger().matmul(l)?)?;
        }
        Ok(Self {
            dim,
            num_nodes,
            sparse_jumps: jumps.iter().map(SparseRows::from_dense).collect(),
            decay: SparseRows::from_dense(&decay),
            jumps,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn internal_dim(&self) -> usize {
        self.dim / self.num_nodes
    }

    pub fn jumps(&self) -> &[ComplexMatrix] {
        &self.jumps
    }

    /// Node-register marginals `p_t = Σ_a ρ[(a,t),(a,t)]`.
    pub fn node_marginals(&self, rho: &ComplexMatrix) -> Result<Vec<f64>> {
        self.check_shape(rho)?;
        let n = self.num_nodes;
        let mut p = vec![0.0; n];
        for a in 0..self.internal_dim() {
            for (t, pt) in p.iter_mut().enumerate() {
                let idx = a * n + t;
                *pt += rho[(idx, idx)].re;
            }
        }
        Ok(p)
    }

    /// Embeds a state of the internal space in register `node`:
    /// `|ψ⟩⟨ψ| ⊗ |node⟩⟨node|`.
    pub fn register_state(&self, psi: &[Complex64], node: usize) -> Result<ComplexMatrix> {
        if psi.len() != self.internal_dim() || node >= self.num_nodes {
            return Err(OqwError::Shape(
                "state does not fit the model layout".into(),
            ));
        }
        let mut ket = vec![ZERO; self.num_nodes];
        ket[node] = Complex64::new(1.0, 0.0);
        ComplexMatrix::projector(psi).kron(&ComplexMatrix::projector(&ket))
    }

    fn check_shape(&self, rho: &ComplexMatrix) -> Result<()> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(OqwError::Shape(format!(
                "density matrix is {}x{}, model dimension is {}",
                rho.rows(),
                rho.cols(),
                self.dim
            )));
        }
        Ok(())
    }

    fn generator(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim;
        let x = rho.as_slice();
        let mut out = ComplexMatrix::zeros(n, n);
        let mut scratch = vec![ZERO; n * n];
        let one = Complex64::new(1.0, 0.0);
        for l in &self.sparse_jumps {
            scratch.fill(ZERO);
            l.left_mul_into(x, &mut scratch, one);
            l.right_mul_dagger_into(&scratch, out.as_mut_slice());
        }
        let half = Complex64::new(-0.5, 0.0);
        self.decay.left_mul_into(x, out.as_mut_slice(), half);
        self.decay.right_mul_into(x, out.as_mut_slice(), half);
        out
    }
}

/// Master equation for a circuit chain: for each slice `t = 1..=T` a
/// register jump `L_t = U_t ⊗ |t⟩⟨t−1| + U_t† ⊗ |t−1⟩⟨t|`, and with
/// `include_reset` one jump `σ⁻_q ⊗ |0⟩⟨0|` per qubit.
pub fn build_dqc_lindblad(circuit: &Circuit, include_reset: bool) -> Result<LindbladModel> {
    let depth = circuit.depth();
    if depth == 0 {
        return Err(OqwError::Domain(format!(
            "circuit `{}` has no slices",
            circuit.name()
        )));
    }
    let nodes = depth + 1;
    let internal = circuit.dim();
    let dim = internal.saturating_mul(nodes);
    if dim > DESK_SCALE_CAP {
        return Err(OqwError::Capacity {
            dim,
            cap: DESK_SCALE_CAP,
        });
    }
    let hop = |to: usize, from: usize| {
        let mut m = ComplexMatrix::zeros(nodes, nodes);
        m[(to, from)] = Complex64::new(1.0, 0.0);
        m
    };

    let mut jumps = Vec::with_capacity(depth + circuit.num_qubits());
    for (i, u) in circuit.unitaries()?.iter().enumerate() {
        let t = i + 1;
        let forward = u.kron(&hop(t, t - 1))?;
        let backward = u.dagger().kron(&hop(t - 1, t))?;
        jumps.push(forward.add(&backward)?);
    }
    if include_reset {
        let n = circuit.num_qubits();
        for q in 1..=n {
            // σ⁻ = |0⟩⟨1| on qubit q (qubit 1 is the most significant bit).
            let bit = 1usize << (n - q);
            let mut sigma = ComplexMatrix::zeros(internal, internal);
            for basis in (0..internal).filter(|b| b & bit != 0) {
                sigma[(basis & !bit, basis)] = Complex64::new(1.0, 0.0);
            }
            jumps.push(sigma.kron(&hop(0, 0))?);
        }
    }
    LindbladModel::with_nodes(dim, nodes, jumps)
}

/// Right-hand side of the master equation.
///
/// `rho` must be a unit-trace Hermitian matrix (within 1e-8).
pub fn lindblad_rhs(model: &LindbladModel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    model.check_shape(rho)?;
    check_density(rho)?;
    Ok(model.generator(rho))
}

fn check_density(rho: &ComplexMatrix) -> Result<()> {
    let trace = rho.trace()?;
    if (trace - Complex64::new(1.0, 0.0)).norm() > INPUT_TOL {
        return Err(OqwError::Domain(format!(
            "density matrix has trace {trace}"
        )));
    }
    let residual = rho.hermiticity_residual()?;
    if residual > INPUT_TOL {
        return Err(OqwError::Domain(format!(
            "density matrix is not Hermitian (residual {residual:e})"
        )));
    }
    Ok(())
}

/// Result of [`integrate`].
#[derive(Debug, Clone)]
pub struct Integration {
    pub state: ComplexMatrix,
    pub time: f64,
    pub steps: usize,
    /// `‖rhs‖_F` fell below the stopping tolerance before `max_time`.
    pub stationary: bool,
    /// `‖rhs‖_F` at the returned state.
    pub residual: f64,
}

/// Fixed-step classical Runge–Kutta integration until `‖rhs‖_F < stop_tol`
/// or `max_time` is reached.
pub fn integrate(
    model: &LindbladModel,
    rho0: &ComplexMatrix,
    dt: f64,
    stop_tol: f64,
    max_time: f64,
) -> Result<Integration> {
    integrate_observed(model, rho0, dt, stop_tol, max_time, 0, |_, _| {})
}

/// [`integrate`] calling `observer(time, ρ)` at time 0, every `every` steps
/// (never when `every == 0`) and at the final state.
pub fn integrate_observed<F>(
    model: &LindbladModel,
    rho0: &ComplexMatrix,
    dt: f64,
    stop_tol: f64,
    max_time: f64,
    every: usize,
    mut observer: F,
) -> Result<Integration>
where
    F: FnMut(f64, &ComplexMatrix),
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(OqwError::Domain(format!("time step {dt} must be positive")));
    }
    if !(stop_tol > 0.0) || max_time.is_nan() {
        return Err(OqwError::Domain("stop tolerance must be positive".into()));
    }
    model.check_shape(rho0)?;
    check_density(rho0)?;

    let mut rho = rho0.clone();
    let mut time = 0.0;
    let mut steps = 0;
    observer(time, &rho);
    loop {
        let k1 = model.generator(&rho);
        let residual = k1.frobenius_norm();
        if residual < stop_tol || time >= max_time {
            if every > 0 && steps % every != 0 {
                observer(time, &rho);
            }
            return Ok(Integration {
                state: rho,
                time,
                steps,
                stationary: residual < stop_tol,
                residual,
            });
        }
        let k2 = model.generator(&axpy(&rho, &k1, dt / 2.0));
        let k3 = model.generator(&axpy(&rho, &k2, dt / 2.0));
        let k4 = model.generator(&axpy(&rho, &k3, dt));
        let mut next = rho.clone();
        {
            let out = next.as_mut_slice();
            let (a, b, c, d) = (k1.as_slice(), k2.as_slice(), k3.as_slice(), k4.as_slice());
            for idx in 0..out.len() {
                out[idx] += (a[idx] + 2.0 * b[idx] + 2.0 * c[idx] + d[idx]) * (dt / 6.0);
            }
        }
        next = next.hermitian_part()?;
        let trace = next.trace()?.re;
        if (trace - 1.0).abs() > TRACE_DRIFT {
            next = next.scale_real(1.0 / trace);
        }
        rho = next;
        time += dt;
        steps += 1;
        if every > 0 && steps % every == 0 {
            observer(time, &rho);
        }
    }
}

fn axpy(x: &ComplexMatrix, y: &ComplexMatrix, a: f64) -> ComplexMatrix {
    let mut out = x.clone();
    for (o, v) in out.as_mut_slice().iter_mut().zip(y.as_slice()) {
        *o += v * a;
    }
    out
}

/// The uniform mixture `(1/(T+1)) Σ_t |ψ_t⟩⟨ψ_t| ⊗ |t⟩⟨t|` with
/// `ψ_t = U_t⋯U_1 ψ_0`.
pub fn uniform_history_state(circuit: &Circuit, psi0: &[Complex64]) -> Result<ComplexMatrix> {
    let nodes = circuit.depth() + 1;
    let mut psi = psi0.to_vec();
    let mut ket = vec![ZERO; nodes];
    ket[0] = Complex64::new(1.0, 0.0);
    let mut rho = ComplexMatrix::projector(&psi).kron(&ComplexMatrix::projector(&ket))?;
    for (i, u) in circuit.unitaries()?.iter().enumerate() {
        psi = u.apply(&psi)?;
        ket.fill(ZERO);
        ket[i + 1] = Complex64::new(1.0, 0.0);
        rho.add_assign(&ComplexMatrix::projector(&psi).kron(&ComplexMatrix::projector(&ket))?)?;
    }
    Ok(rho.scale_real(1.0 / nodes as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gate_matrix, qft, toffoli13, Gate, GateKind, Slice};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn hadamard_circuit() -> Circuit {
        Circuit::new(
            "h",
            1,
            vec![Slice::from(Gate::single(GateKind::H, 1).unwrap())],
        )
        .unwrap()
    }

    #[test]
    fn single_gate_jump_has_quoted_form() {
        let model = build_dqc_lindblad(&hadamard_circuit(), false).unwrap();
        assert_eq!(model.dim(), 4);
        assert_eq!(model.jumps().len(), 1);
        let h = gate_matrix(GateKind::H).unwrap();
        let up = ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        let want = h
            .kron(&up)
            .unwrap()
            .add(&h.dagger().kron(&up.dagger()).unwrap())
            .unwrap();
        assert_eq!(model.jumps()[0], want);
    }

    #[test]
    fn register_jumps_are_hermitian() {
        let model = build_dqc_lindblad(&toffoli13(), false).unwrap();
        assert_eq!(model.jumps().len(), 13);
        assert_eq!(model.dim(), 112);
        for l in model.jumps() {
            assert!(l.hermiticity_residual().unwrap() < 1e-12);
        }
    }

    #[test]
    fn reset_jumps_lower_each_qubit_at_register_zero() {
        let model = build_dqc_lindblad(&toffoli13(), true).unwrap();
        assert_eq!(model.jumps().len(), 16);
        let reset = &model.jumps()[13];
        // σ⁻ on qubit 1 maps |100⟩|0⟩ to |000⟩|0⟩.
        let from = 0b100 * 14;
        assert_eq!(reset[(0, from)], c(1.0));
        assert_eq!(
            reset.as_slice().iter().filter(|z| z.norm() > 0.0).count(),
            4
        );
    }

    #[test]
    fn capacity_and_empty_circuit() {
        assert!(matches!(
            build_dqc_lindblad(&qft(4).unwrap(), false),
            Err(OqwError::Capacity { dim: 272, cap: 256 })
        ));
        let empty = Circuit::new("empty", 1, vec![]).unwrap();
        assert!(matches!(
            build_dqc_lindblad(&empty, false),
            Err(OqwError::Domain(_))
        ));
    }

    #[test]
    fn amplitude_damping_by_hand() {
        let l = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let model = LindbladModel::new(2, vec![l]).unwrap();
        let rho = ComplexMatrix::diag(&[c(0.0), c(1.0)]);
        let rhs = lindblad_rhs(&model, &rho).unwrap();
        let want = ComplexMatrix::diag(&[c(1.0), c(-1.0)]);
        assert!(rhs.frobenius_distance(&want).unwrap() < 1e-15);
    }

    #[test]
    fn dense_generator_matches_sparse() {
        let model = build_dqc_lindblad(&qft(3).unwrap(), true).unwrap();
        let psi0 = vec![
            c(FRAC_1_SQRT_2),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(FRAC_1_SQRT_2),
        ];
        let rho = model.register_state(&psi0, 3).unwrap();
        let got = lindblad_rhs(&model, &rho).unwrap();
        let mut want = ComplexMatrix::zeros(model.dim(), model.dim());
        for l in model.jumps() {
            let ld = l.dagger();
            let ll = ld.matmul(l).unwrap();
            want.add_assign(&l.sandwich(&rho).unwrap()).unwrap();
            let anti = ll
                .matmul(&rho)
                .unwrap()
                .add(&rho.matmul(&ll).unwrap())
                .unwrap();
            want.add_assign(&anti.scale_real(-0.5)).unwrap();
        }
        assert!(got.frobenius_distance(&want).unwrap() < 1e-13);
    }

    #[test]
    fn uniform_history_state_is_stationary() {
        let psi0 = [c(0.6), c(0.8)];
        let model = build_dqc_lindblad(&hadamard_circuit(), false).unwrap();
        let star = uniform_history_state(&hadamard_circuit(), &psi0).unwrap();
        assert!(lindblad_rhs(&model, &star).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn rhs_input_checks() {
        let model = build_dqc_lindblad(&hadamard_circuit(), false).unwrap();
        assert!(matches!(
            lindblad_rhs(&model, &ComplexMatrix::identity(3)),
            Err(OqwError::Shape(_))
        ));
        assert!(matches!(
            lindblad_rhs(&model, &ComplexMatrix::identity(4)),
            Err(OqwError::Domain(_))
        ));
    }

    #[test]
    fn zero_jump_model_leaves_state_unchanged() {
        let model = LindbladModel::new(2, vec![]).unwrap();
        let rho = ComplexMatrix::from_real(2, 2, &[0.25, 0.1, 0.1, 0.75]).unwrap();
        let out = integrate(&model, &rho, DEFAULT_DT, 1e-12, 1.0).unwrap();
        assert!(out.stationary);
        assert_eq!(out.state, rho);
    }

    #[test]
    fn single_gate_integration_reaches_uniform_marginals() {
        let circuit = hadamard_circuit();
        let model = build_dqc_lindblad(&circuit, false).unwrap();
        let psi0 = [c(1.0), c(0.0)];
        let rho0 = model.register_state(&psi0, 0).unwrap();
        let out = integrate(&model, &rho0, DEFAULT_DT, 1e-9, 100.0).unwrap();
        assert!(out.stationary);
        let p = model.node_marginals(&out.state).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-6 && (p[1] - 0.5).abs() < 1e-6);
        let star = uniform_history_state(&circuit, &psi0).unwrap();
        let distance = out.state.sub(&star).unwrap().trace_norm().unwrap();
        assert!(distance < 1e-6, "{distance}");
    }

    #[test]
    fn integration_rejects_bad_arguments() {
        let model = build_dqc_lindblad(&hadamard_circuit(), false).unwrap();
        let rho0 = model.register_state(&[c(1.0), c(0.0)], 0).unwrap();
        assert!(integrate(&model, &rho0, 0.0, 1e-9, 1.0).is_err());
        assert!(integrate(&model, &rho0, 0.01, 0.0, 1.0).is_err());
        let out = integrate(&model, &rho0, 0.01, 1e-30, 0.05).unwrap();
        assert!(!out.stationary);
    }
}
