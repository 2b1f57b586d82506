//! Dissipative-computing chains: one node per time register, forward hops
//! weighted by `ω` and applying the next circuit unitary, backward hops
//! weighted by `λ = 1 − ω` and undoing the last one.

use crate::circuit::Circuit;
use crate::error::{OqwError, Result};
use crate::matrix::ComplexMatrix;
use crate::tolerance::Tolerances;

use super::{OpenQuantumWalk, Transition};

/// Forward weight `ω` and backward weight `λ = 1 − ω`.
///
/// `ω` must lie in `(0, 1]`; `ω = 1` is the zero-temperature forward sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    omega: f64,
    lambda: f64,
}

impl ChainParams {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega <= 1.0) {
            return Err(OqwError::Domain(format!("omega {omega} outside (0, 1]")));
        }
        Ok(Self {
            omega,
            lambda: 1.0 - omega,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.lambda == 0.0
    }
}

/// Bath seen by a hop: spontaneous-emission coefficient `γ` and mean thermal
/// occupation `n̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    gamma: f64,
    nbar: f64,
}

impl BathParams {
    pub fn new(gamma: f64, nbar: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(OqwError::Domain(format!("gamma {gamma} must be positive")));
        }
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(OqwError::Domain(format!(
                "nbar {nbar} must be finite and >= 0"
            )));
        }
        Ok(Self { gamma, nbar })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }
}

/// Maps bath parameters to chain weights via `ω ∝ γ(n̄+1)`, `λ ∝ γn̄`,
/// normalized to `λ + ω = 1`: `ω = (n̄+1)/(2n̄+1)`. `γ` cancels.
///
/// The proportionality constant is not fixed by the physics; this
/// normalization is one reading of it.
pub fn bath_to_rates(bath: &BathParams) -> ChainParams {
    let n = bath.nbar;
    let omega = (n + 1.0) / (2.0 * n + 1.0);
    ChainParams {
        omega,
        lambda: n / (2.0 * n + 1.0),
    }
}

fn chain_from_unitaries(
    unitaries: &[ComplexMatrix],
    params: ChainParams,
) -> Result<OpenQuantumWalk> {
    let depth = unitaries.len();
    if depth == 0 {
        return Err(OqwError::Domain("chain needs at least one unitary".into()));
    }
    let dim = unitaries[0].rows();
    let fwd = params.omega.sqrt();
    let back = params.lambda.sqrt();
    let id = ComplexMatrix::identity(dim);

    let mut transitions = Vec::with_capacity(2 * (depth + 1));
    let mut push = |source, target, op: ComplexMatrix, weight: f64| {
        if weight > 0.0 {
            transitions.push(Transition::new(source, target, op.scale_real(weight)));
        }
    };
    for t in 0..=depth {
        // Forward hop t -> t+1 applies U_{t+1}; the terminal node stays put.
        if t < depth {
            push(t, t + 1, unitaries[t].clone(), fwd);
        } else {
            push(t, t, id.clone(), fwd);
        }
        // Backward hop t -> t-1 undoes U_t; node 0 stays put.
        if t > 0 {
            push(t, t - 1, unitaries[t - 1].dagger(), back);
        } else {
            push(t, t, id.clone(), back);
        }
    }
    OpenQuantumWalk::new(depth + 1, dim, transitions)
}

/// Compiles a circuit with `T` slices into a `T + 1` node chain walk.
pub fn build_dqc_chain(circuit: &Circuit, params: ChainParams) -> Result<OpenQuantumWalk> {
    if circuit.depth() == 0 {
        return Err(OqwError::Domain(format!(
            "circuit `{}` has no slices",
            circuit.name()
        )));
    }
    chain_from_unitaries(&circuit.unitaries()?, params)
}

/// The 2-node walk implementing a single gate `u`:
/// `B_0^0 = √λ I`, `B_0^1 = √ω U`, `B_1^1 = √ω I`, `B_1^0 = √λ U†`.
pub fn two_node_gate_walk(u: &ComplexMatrix, params: ChainParams) -> Result<OpenQuantumWalk> {
    match u.unitarity_residual() {
        Some(r) if r <= Tolerances::DEFAULT.unitary_input => {}
        _ => return Err(OqwError::Domain("gate matrix is not unitary".into())),
    }
    chain_from_unitaries(std::slice::from_ref(u), params)
}

/// One step of the node-marginal birth–death chain of a DQC walk:
/// `p'_t = λ p_{t+1} + ω p_{t−1}`, with self-loops `λ p_0` at node 0 and
/// `ω p_T` at node `T`.
pub fn classical_marginal_step(params: ChainParams, depth: usize, p: &[f64]) -> Result<Vec<f64>> {
    if p.len() != depth + 1 {
        return Err(OqwError::Shape(format!(
            "expected {} probabilities, got {}",
            depth + 1,
            p.len()
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > Tolerances::DEFAULT.trace {
        return Err(OqwError::Domain(format!("probabilities sum to {total}")));
    }
    let (w, l) = (params.omega, params.lambda);
    let mut next = vec![0.0; p.len()];
    for (t, &pt) in p.iter().enumerate() {
        if t < depth {
            next[t + 1] += w * pt;
        } else {
            next[t] += w * pt;
        }
        if t > 0 {
            next[t - 1] += l * pt;
        } else {
            next[t] += l * pt;
        }
    }
    Ok(next)
}

/// Stationary node distribution of the chain.
///
/// Uniform `1/(T+1)` when `ω = λ`; otherwise geometric by detailed balance,
/// `p_t ∝ (ω/λ)^t`. Weights are formed relative to the largest one so that
/// large ratios do not overflow.
pub fn analytic_chain_steady(params: ChainParams, depth: usize) -> Result<Vec<f64>> {
    let (w, l) = (params.omega, params.lambda);
    if !(w > 0.0 && w < 1.0) {
        return Err(OqwError::Domain(format!(
            "stationary distribution needs omega in (0, 1), got {w}"
        )));
    }
    let n = depth + 1;
    if w == l {
        return Ok(vec![1.0 / n as f64; n]);
    }
    let log_ratio = (w / l).ln();
    let anchor = if log_ratio > 0.0 { depth as f64 } else { 0.0 };
    let weights: Vec<f64> = (0..n)
        .map(|t| ((t as f64 - anchor) * log_ratio).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|x| x / total).collect())
}
