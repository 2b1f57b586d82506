use num_complex::Complex64;

use crate::error::{OqwError, Result};
use crate::matrix::{vector_norm, ComplexMatrix};
use crate::tolerance::Tolerances;

use super::{step, BlockState, OpenQuantumWalk};

/// Outcome of iterating a walk towards its steady state.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Steps executed.
    pub steps: usize,
    /// Whether the step-to-step distance fell below the tolerance.
    pub converged: bool,
    /// Node probabilities after each step; row 0 is the initial state.
    pub history: Vec<Vec<f64>>,
    /// `Tr(ρ_target)` in the final state.
    pub final_detection: f64,
    /// `⟨ψ|ρ_target/Tr ρ_target|ψ⟩`; zero when the target node is empty.
    pub final_fidelity: f64,
    /// Distance between the last two states.
    pub final_distance: f64,
    pub final_state: BlockState,
}

/// `Σ_i ‖ρ_i − σ_i‖_1`, the summed per-block trace distance.
pub fn state_distance(a: &BlockState, b: &BlockState) -> Result<f64> {
    if a.num_nodes() != b.num_nodes() {
        return Err(OqwError::Shape("states have different node counts".into()));
    }
    a.blocks()
        .iter()
        .zip(b.blocks())
        .map(|(x, y)| x.sub(y)?.trace_norm())
        .sum()
}

/// `ρ_node / Tr(ρ_node)`.
pub fn conditional_state(state: &BlockState, node: usize) -> Result<ComplexMatrix> {
    let block = state
        .block(node)
        .ok_or_else(|| OqwError::Domain(format!("node {node} outside 0..{}", state.num_nodes())))?;
    let p = block.trace()?.re;
    if !(p > 0.0) {
        return Err(OqwError::Domain(format!(
            "node {node} has zero probability"
        )));
    }
    Ok(block.scale_real(1.0 / p))
}

/// Iterates `walk` from `init` until the summed trace distance between
/// consecutive states drops below `tol`, or `max_steps` steps have run.
///
/// Running out of steps is reported through `converged == false`.
pub fn run_until_converged(
    walk: &OpenQuantumWalk,
    init: &BlockState,
    tol: f64,
    max_steps: usize,
    target_node: usize,
    target_state: &[Complex64],
) -> Result<ConvergenceReport> {
    if !(tol > 0.0) {
        return Err(OqwError::Domain(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if target_node >= walk.num_nodes() {
        return Err(OqwError::Domain(format!(
            "target node {target_node} outside 0..{}",
            walk.num_nodes()
        )));
    }
    if target_state.len() != walk.dim() {
        return Err(OqwError::Shape(format!(
            "target state has length {}, walk dimension is {}",
            target_state.len(),
            walk.dim()
        )));
    }
    let norm = vector_norm(target_state);
    if (norm - 1.0).abs() > Tolerances::DEFAULT.trace {
        return Err(OqwError::Domain(format!("target state has norm {norm}")));
    }
    init.check(&Tolerances::DEFAULT)?;

    let mut current = init.clone();
    let mut history = vec![current.node_probabilities()];
    let mut steps = 0;
    let mut converged = false;
    let mut distance = f64::INFINITY;
    while steps < max_steps {
        let next = step(walk, &current)?;
        distance = state_distance(&next, &current)?;
        history.push(next.node_probabilities());
        current = next;
        steps += 1;
        if distance < tol {
            converged = true;
            break;
        }
    }

    let final_detection = current.node_probabilities()[target_node];
    let final_fidelity = match conditional_state(&current, target_node) {
        Ok(rho) => rho.expectation(target_state)?,
        Err(_) => 0.0,
    };
    Ok(ConvergenceReport {
        steps,
        converged,
        history,
        final_detection,
        final_fidelity,
        final_distance: distance,
        final_state: current,
    })
}
