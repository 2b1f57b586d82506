//! Numerical tolerances shared by every module.

/// Tolerance record. The defaults are the values every check in the crate uses
/// unless a caller passes its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum `‖A − A†‖_F` for a matrix to count as Hermitian.
    pub hermitian: f64,
    /// Maximum `‖Σ_i B†B − I‖_F` per source node for a walk to be normalized.
    pub normalization: f64,
    /// Maximum `‖U†U − I‖_F` accepted when a unitary is required as input.
    pub unitary_input: f64,
    /// Lowest eigenvalue still accepted as non-negative.
    pub psd: f64,
    /// Allowed drift of the total trace of a block state.
    pub trace: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-10,
        normalization: 1e-10,
        unitary_input: 1e-10,
        psd: 1e-10,
        trace: 1e-10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
