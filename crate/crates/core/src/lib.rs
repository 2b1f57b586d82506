//! Discrete-time open quantum walks and their use for dissipative quantum
//! computing.
//!
//! A circuit with `T` time slices compiles to a chain walk on `T + 1` nodes
//! whose forward hops (weight `ω`) apply the next gate layer and whose
//! backward hops (weight `λ = 1 − ω`) undo the last one. Iterating the walk
//! to its steady state leaves the computation's output in the last node with
//! a probability that grows with `ω`.
//!
//! Modules:
//! - [`matrix`]: dense complex matrices.
//! - [`circuit`]: gates, slices, built-in Toffoli and QFT circuits, text format.
//! - [`walk`]: the walk model, chain construction and steady-state iteration.
//! - [`lindblad`]: the continuous-time master equation used as a cross-check.
//! - [`report`]: CSV output and the sweep driver behind the `oqw` binary.

// `!(x > 0.0)` is used on purpose so that NaN fails argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod error;
pub mod lindblad;
pub mod matrix;
pub mod report;
pub mod tolerance;
pub mod walk;

pub use error::{OqwError, ParseErrorKind, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use tolerance::Tolerances;
