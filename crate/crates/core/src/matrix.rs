//! Dense complex matrices.
//!
//! Everything in the simulator (coins, circuit unitaries, density blocks,
//! jump operators) is a small dense square matrix, so a plain row-major
//! `Vec<Complex64>` is all the storage we need. Hermitian eigenvalues are
//! delegated to `nalgebra`.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{OqwError, Result};
use crate::tolerance::Tolerances;

/// Dense row-major complex matrix with at least one row and one column.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// All-zero matrix.
    ///
    /// Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// `n × n` identity. Panics if `n == 0`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(OqwError::Shape(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(OqwError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(OqwError::Domain("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(OqwError::Shape("ragged rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    /// Matrix with real entries given row-major.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_vec(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Diagonal matrix. Panics on an empty slice.
    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Outer product `|ket⟩⟨bra|`. Panics on empty vectors.
    pub fn outer(ket: &[Complex64], bra: &[Complex64]) -> Self {
        let mut m = Self::zeros(ket.len(), bra.len());
        for (i, a) in ket.iter().enumerate() {
            for (j, b) in bra.iter().enumerate() {
                m[(i, j)] = a * b.conj();
            }
        }
        m
    }

    /// Density matrix `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &[Complex64]) -> Self {
        Self::outer(psi, psi)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(OqwError::Shape(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows == other.rows && self.cols == other.cols {
            Ok(())
        } else {
            Err(OqwError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )))
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let overflow = || OqwError::Size("kronecker product dimension overflows".into());
        let rows = self.rows.checked_mul(other.rows).ok_or_else(overflow)?;
        let cols = self.cols.checked_mul(other.cols).ok_or_else(overflow)?;
        rows.checked_mul(cols).ok_or_else(overflow)?;
        let mut out = Self::zeros(rows, cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self[(i1, j1)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out[(i1 * other.rows + i2, j1 * other.cols + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(OqwError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · rho · self†`, the conjugation used by every Kraus-type map.
    pub fn sandwich(&self, rho: &Self) -> Result<Self> {
        self.matmul(rho)?.matmul(&self.dagger())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { data, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { data, ..*self })
    }

    /// In-place `self += other`.
    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.require_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * factor).collect(),
            ..*self
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Result<Complex64> {
        self.require_square("trace")?;
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self − other‖_F`.
    pub fn frobenius_distance(&self, other: &Self) -> Result<f64> {
        self.require_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `‖self − self†‖_F`.
    pub fn hermiticity_residual(&self) -> Result<f64> {
        self.require_square("hermiticity check")?;
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> Result<Self> {
        self.require_square("hermitian part")?;
        Ok(self.add(&self.dagger())?.scale_real(0.5))
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Fails with a domain error when `‖A − A†‖_F` exceeds `tol`.
    pub fn hermitian_eigenvalues(&self, tol: f64) -> Result<Vec<f64>> {
        let residual = self.hermiticity_residual()?;
        if residual > tol {
            return Err(OqwError::Domain(format!(
                "matrix is not Hermitian (residual {residual:e})"
            )));
        }
        let n = self.rows;
        // Symmetrize so the solver only sees the Hermitian part.
        let m = DMatrix::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    /// Sum of absolute eigenvalues of a Hermitian matrix.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self
            .hermitian_eigenvalues(Tolerances::DEFAULT.hermitian)?
            .iter()
            .map(|l| l.abs())
            .sum())
    }

    /// True iff `‖A†A − I‖_F ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual().is_some_and(|r| r <= tol)
    }

    /// `‖A†A − I‖_F`, or `None` for a non-square matrix.
    pub fn unitarity_residual(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let product = self.dagger().matmul(self).ok()?;
        product.frobenius_distance(&Self::identity(self.rows)).ok()
    }

    /// True iff the matrix is Hermitian (within the default tolerance) and its
    /// smallest eigenvalue is at least `-tol`.
    pub fn psd_check(&self, tol: f64) -> bool {
        self.min_eigenvalue().is_ok_and(|lowest| lowest >= -tol)
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let values = self.hermitian_eigenvalues(Tolerances::DEFAULT.hermitian)?;
        Ok(values[0])
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(OqwError::Shape(format!(
                "vector of length {} for a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Real part of `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &[Complex64]) -> Result<f64> {
        let a_psi = self.apply(psi)?;
        Ok(psi
            .iter()
            .zip(&a_psi)
            .map(|(p, q)| p.conj() * q)
            .sum::<Complex64>()
            .re)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Euclidean norm of a state vector.
pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hadamard() -> ComplexMatrix {
        ComplexMatrix::from_real(
            2,
            2,
            &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        )
        .unwrap()
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_diagonal_case() {
        let d = ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let got = d.kron(&ComplexMatrix::identity(2)).unwrap();
        let want = ComplexMatrix::diag(&[c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(got, want);
    }

    #[test]
    fn kron_matches_entry_formula() {
        let p0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let x = pauli_x();
        let got = p0.kron(&x).unwrap();
        // Brute force: entry (i1*2+i2, j1*2+j2) = a[i1,j1] * b[i2,j2].
        let mut want = ComplexMatrix::zeros(4, 4);
        for i1 in 0..2 {
            for j1 in 0..2 {
                for i2 in 0..2 {
                    for j2 in 0..2 {
                        want[(i1 * 2 + i2, j1 * 2 + j2)] = p0[(i1, j1)] * x[(i2, j2)];
                    }
                }
            }
        }
        assert_eq!(got, want);
        let literal = ComplexMatrix::from_real(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        )
        .unwrap();
        assert_eq!(got, literal);
    }

    #[test]
    fn kron_rectangular_shape() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(4, 1);
        let k = a.kron(&b).unwrap();
        assert_eq!((k.rows(), k.cols()), (8, 3));
    }

    #[test]
    fn dagger_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.dagger(), i2);
        let raise = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let lower = ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(raise.dagger(), lower);
        let h = hadamard();
        let hh = h.dagger().matmul(&h).unwrap();
        assert!(hh.frobenius_distance(&i2).unwrap() < 1e-15);
    }

    #[test]
    fn matmul_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(pauli_x().matmul(&pauli_x()).unwrap(), i2);
        let h = hadamard();
        assert!(h.matmul(&h).unwrap().frobenius_distance(&i2).unwrap() < 1e-15);
        let s = ComplexMatrix::diag(&[c(1.0, 0.0), Complex64::from_polar(1.0, PI / 2.0)]);
        let z = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(s.matmul(&s).unwrap().frobenius_distance(&z).unwrap() < 1e-15);
    }

    #[test]
    fn matmul_shape_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(OqwError::Shape(_))));
    }

    #[test]
    fn trace_cases() {
        assert_eq!(ComplexMatrix::identity(4).trace().unwrap(), c(4.0, 0.0));
        let off = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(off.trace().unwrap(), c(0.0, 0.0));
        let h = hadamard();
        let p0 = ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let t = h.sandwich(&p0).unwrap().trace().unwrap();
        assert!((t - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            ComplexMatrix::zeros(2, 3).trace(),
            Err(OqwError::Shape(_))
        ));
    }

    #[test]
    fn trace_norm_cases() {
        let d = ComplexMatrix::diag(&[c(0.5, 0.0), c(-0.5, 0.0)]);
        assert!((d.trace_norm().unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(ComplexMatrix::zeros(3, 3).trace_norm().unwrap(), 0.0);

        // |+⟩⟨+| − |0⟩⟨0| = [[-1/2, 1/2], [1/2, 1/2]].
        let plus = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        let zero = [c(1.0, 0.0), c(0.0, 0.0)];
        let m = ComplexMatrix::projector(&plus)
            .sub(&ComplexMatrix::projector(&zero))
            .unwrap();
        // 2x2 Hermitian eigenvalues: (a+d)/2 ± sqrt(((a−d)/2)² + |b|²).
        let (a, b, dd) = (m[(0, 0)].re, m[(0, 1)], m[(1, 1)].re);
        let mean = (a + dd) / 2.0;
        let radius = (((a - dd) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        let want = (mean + radius).abs() + (mean - radius).abs();
        assert!((m.trace_norm().unwrap() - want).abs() < 1e-14);
        // Pure-state trace distance: 2·sqrt(1 − |⟨+|0⟩|²) = √2.
        assert!((want - 2.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(m.trace_norm(), Err(OqwError::Domain(_))));
    }

    #[test]
    fn unitary_checks() {
        assert!(hadamard().is_unitary(1e-12));
        assert!(!ComplexMatrix::identity(2).scale_real(2.0).is_unitary(1e-12));
        assert!(!ComplexMatrix::zeros(2, 3).is_unitary(1e-12));
    }

    #[test]
    fn psd_checks() {
        assert!(ComplexMatrix::identity(2).scale_real(0.5).psd_check(1e-10));
        assert!(!ComplexMatrix::diag(&[c(1.0, 0.0), c(-0.1, 0.0)]).psd_check(1e-10));
    }

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(ComplexMatrix::from_vec(0, 1, vec![]).is_err());
        assert!(ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(matches!(
            ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(OqwError::Domain(_))
        ));
    }

    #[test]
    fn expectation_of_projector() {
        let plus = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        let p = ComplexMatrix::projector(&plus);
        assert!((p.expectation(&plus).unwrap() - 1.0).abs() < 1e-15);
    }
}
