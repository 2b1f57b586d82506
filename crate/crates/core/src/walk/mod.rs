//! Open quantum walks on finite graphs.
//!
//! A walk is a table of transition operators `B_j^i` (source `j`, target `i`)
//! acting on the walker's internal space. States are block diagonal in the
//! node basis, `ρ = Σ_i ρ_i ⊗ |i⟩⟨i|`, and one step maps the blocks to
//! `ρ_i' = Σ_j B_j^i ρ_j B_j^{i†}`.

mod chain;
mod convergence;

pub use chain::{
    analytic_chain_steady, bath_to_rates, build_dqc_chain, classical_marginal_step,
    two_node_gate_walk, BathParams, ChainParams,
};
pub use convergence::{conditional_state, run_until_converged, state_distance, ConvergenceReport};

use num_complex::Complex64;

use crate::error::{OqwError, Result};
use crate::matrix::{vector_norm, ComplexMatrix};
use crate::tolerance::Tolerances;

/// One transition operator `B_source^target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub source: usize,
    pub target: usize,
    pub operator: ComplexMatrix,
}

impl Transition {
    pub fn new(source: usize, target: usize, operator: ComplexMatrix) -> Self {
        Self {
            source,
            target,
            operator,
        }
    }
}

/// An open quantum walk on `num_nodes` vertices with internal dimension `dim`.
///
/// Construction checks shapes and node indices only; the normalization
/// `Σ_i B_j^{i†} B_j^i = I` is reported by [`validate`].
#[derive(Debug, Clone)]
pub struct OpenQuantumWalk {
    num_nodes: usize,
    dim: usize,
    outgoing: Vec<Vec<(usize, ComplexMatrix)>>,
}

impl OpenQuantumWalk {
    pub fn new(num_nodes: usize, dim: usize, transitions: Vec<Transition>) -> Result<Self> {
        if num_nodes == 0 || dim == 0 {
            return Err(OqwError::Validation(
                "walk needs at least one node and dimension".into(),
            ));
        }
        let mut outgoing: Vec<Vec<(usize, ComplexMatrix)>> = vec![Vec::new(); num_nodes];
        for Transition {
            source,
            target,
            operator,
        } in transitions
        {
            if source >= num_nodes || target >= num_nodes {
                return Err(OqwError::Validation(format!(
                    "transition {source}->{target} outside 0..{num_nodes}"
                )));
            }
            if operator.rows() != dim || operator.cols() != dim {
                return Err(OqwError::Shape(format!(
                    "operator {source}->{target} is {}x{}, expected {dim}x{dim}",
                    operator.rows(),
                    operator.cols()
                )));
            }
            if outgoing[source].iter().any(|(t, _)| *t == target) {
                return Err(OqwError::Validation(format!(
                    "duplicate transition {source}->{target}"
                )));
            }
            outgoing[source].push((target, operator));
        }
        for list in &mut outgoing {
            list.sort_by_key(|(t, _)| *t);
        }
        Ok(Self {
            num_nodes,
            dim,
            outgoing,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `B_source^target`, if the edge exists.
    pub fn transition(&self, source: usize, target: usize) -> Option<&ComplexMatrix> {
        self.outgoing
            .get(source)?
            .iter()
            .find(|(t, _)| *t == target)
            .map(|(_, b)| b)
    }

    /// Outgoing edges of `source` as `(target, B)` pairs sorted by target.
    pub fn outgoing(&self, source: usize) -> &[(usize, ComplexMatrix)] {
        &self.outgoing[source]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, &ComplexMatrix)> {
        self.outgoing
            .iter()
            .enumerate()
            .flat_map(|(j, list)| list.iter().map(move |(i, b)| (j, *i, b)))
    }

    /// Applies one step; see [`step`].
    pub fn step(&self, state: &BlockState) -> Result<BlockState> {
        step(self, state)
    }
}

/// A source node whose operators fail the normalization condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub source: usize,
    /// `‖Σ_i B_j^{i†} B_j^i − I‖_F`.
    pub residual: f64,
}

/// Normalization residual `‖Σ_i B_j^{i†} B_j^i − I‖_F` for every source node.
pub fn normalization_residuals(walk: &OpenQuantumWalk) -> Vec<f64> {
    (0..walk.num_nodes)
        .map(|j| {
            let mut sum = ComplexMatrix::zeros(walk.dim, walk.dim);
            for (_, b) in &walk.outgoing[j] {
                let term = b.dagger().matmul(b).expect("square operators");
                sum.add_assign(&term).expect("same shape");
            }
            sum.frobenius_distance(&ComplexMatrix::identity(walk.dim))
                .expect("same shape")
        })
        .collect()
}

/// Sources whose operators violate `Σ_i B_j^{i†} B_j^i = I` by more than `tol`.
pub fn validate(walk: &OpenQuantumWalk, tol: f64) -> Vec<Violation> {
    normalization_residuals(walk)
        .into_iter()
        .enumerate()
        .filter(|(_, r)| !(*r <= tol))
        .map(|(source, residual)| Violation { source, residual })
        .collect()
}

/// The local CP map `M_j(ρ) = Σ_i B_j^i ρ B_j^{i†}` at node `j`.
pub fn local_map(
    walk: &OpenQuantumWalk,
    node: usize,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if node >= walk.num_nodes {
        return Err(OqwError::Domain(format!(
            "node {node} outside 0..{}",
            walk.num_nodes
        )));
    }
    if rho.rows() != walk.dim || rho.cols() != walk.dim {
        return Err(OqwError::Shape(format!(
            "density matrix must be {0}x{0}",
            walk.dim
        )));
    }
    let mut out = ComplexMatrix::zeros(walk.dim, walk.dim);
    for (_, b) in &walk.outgoing[node] {
        out.add_assign(&b.sandwich(rho)?)?;
    }
    Ok(out)
}

/// One step of the walk: `ρ_i' = Σ_j B_j^i ρ_j B_j^{i†}`.
pub fn step(walk: &OpenQuantumWalk, state: &BlockState) -> Result<BlockState> {
    if state.num_nodes() != walk.num_nodes || state.dim() != walk.dim {
        return Err(OqwError::Shape(format!(
            "state has {} nodes of dimension {}, walk has {} of dimension {}",
            state.num_nodes(),
            state.dim(),
            walk.num_nodes,
            walk.dim
        )));
    }
    let mut next = vec![ComplexMatrix::zeros(walk.dim, walk.dim); walk.num_nodes];
    for (j, rho_j) in state.blocks.iter().enumerate() {
        if rho_j.as_slice().iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        for (i, b) in &walk.outgoing[j] {
            next[*i].add_assign(&b.sandwich(rho_j)?)?;
        }
    }
    Ok(BlockState { blocks: next })
}

/// Walker state `ρ = Σ_i ρ_i ⊗ |i⟩⟨i|`, one unnormalized block per node.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockState {
    blocks: Vec<ComplexMatrix>,
}

impl BlockState {
    /// Wraps per-node blocks. All blocks must be square of one dimension.
    pub fn new(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(OqwError::Shape(
                "block state needs at least one node".into(),
            ));
        };
        let dim = first.rows();
        if blocks.iter().any(|b| b.rows() != dim || b.cols() != dim) {
            return Err(OqwError::Shape(
                "blocks must share one square dimension".into(),
            ));
        }
        Ok(Self { blocks })
    }

    /// The pure state `|ψ⟩⟨ψ| ⊗ |node⟩⟨node|`. `psi` must be normalized.
    pub fn concentrated(num_nodes: usize, node: usize, psi: &[Complex64]) -> Result<Self> {
        if node >= num_nodes {
            return Err(OqwError::Domain(format!(
                "node {node} outside 0..{num_nodes}"
            )));
        }
        if psi.is_empty() {
            return Err(OqwError::Shape("empty state vector".into()));
        }
        let norm = vector_norm(psi);
        if (norm - 1.0).abs() > Tolerances::DEFAULT.trace {
            return Err(OqwError::Domain(format!("state vector has norm {norm}")));
        }
        let dim = psi.len();
        let mut blocks = vec![ComplexMatrix::zeros(dim, dim); num_nodes];
        blocks[node] = ComplexMatrix::projector(psi);
        Ok(Self { blocks })
    }

    pub fn num_nodes(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].rows()
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, node: usize) -> Option<&ComplexMatrix> {
        self.blocks.get(node)
    }

    /// `p_i = Tr(ρ_i)` (real part).
    pub fn node_probabilities(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| b.trace().expect("square block").re)
            .collect()
    }

    /// `Σ_i Tr(ρ_i)`.
    pub fn total_trace(&self) -> f64 {
        self.node_probabilities().iter().sum()
    }

    /// Smallest eigenvalue over all blocks.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.blocks
            .iter()
            .map(ComplexMatrix::min_eigenvalue)
            .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
    }

    /// Checks unit total trace, Hermiticity and positivity of every block.
    pub fn check(&self, tol: &Tolerances) -> Result<()> {
        let total = self.total_trace();
        if (total - 1.0).abs() > tol.trace {
            return Err(OqwError::Validation(format!("total trace {total} != 1")));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            let residual = b.hermiticity_residual()?;
            if residual > tol.hermitian {
                return Err(OqwError::Validation(format!(
                    "block {i} not Hermitian (residual {residual:e})"
                )));
            }
            let lowest = b.min_eigenvalue()?;
            if lowest < -tol.psd {
                return Err(OqwError::Validation(format!(
                    "block {i} has negative eigenvalue {lowest:e}"
                )));
            }
        }
        Ok(())
    }
}
