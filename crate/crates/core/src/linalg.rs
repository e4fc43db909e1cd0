//! Dense complex matrices.
//!
//! [`ComplexMatrix`] is the carrier for every operator and density matrix in
//! the crate. Indexing is logical row-major `(row, col)`; storage is a
//! column-major `nalgebra::DMatrix` and never leaks through the public API.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `max |h - h^dagger|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

/// Output of [`ComplexMatrix::eigh`]: ascending eigenvalues, eigenvectors as
/// columns in matching order.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { data: DMatrix::zeros(rows, cols) }
    }

    pub fn identity(n: usize) -> Self {
        Self { data: DMatrix::identity(n, n) }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { data: DMatrix::from_fn(rows, cols, f) }
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { data: DMatrix::from_row_slice(rows, cols, entries) })
    }

    /// Real-valued convenience constructor, row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let entries: Vec<C64> = rows.iter().flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0))).collect();
        Self::from_row_slice(n_rows, n_cols, &entries)
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn real_diagonal(entries: &[f64]) -> Self {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&c)
    }

    /// Column vector from amplitudes.
    pub fn column(amplitudes: &[C64]) -> Self {
        Self { data: DMatrix::from_column_slice(amplitudes.len(), 1, amplitudes) }
    }

    /// Projector `|v><v|` for a column vector `v`.
    pub fn projector(ket: &ComplexMatrix) -> Self {
        Self { data: &ket.data * ket.data.adjoint() }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[(row, col)] = value;
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { data: self.data.transpose() }
    }

    pub fn conj(&self) -> Self {
        Self { data: self.data.map(|z| z.conj()) }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { data: &self.data * factor }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::Shape(format!(
                "matmul of {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self { data: &self.data * &other.data })
    }

    /// Kronecker product; `self` is the slow (leftmost) index.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        Self { data: self.data.kronecker(&other.data) }
    }

    pub fn trace(&self) -> C64 {
        self.data.diagonal().iter().sum()
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<Self> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise max deviation. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(
            (self.rows(), self.cols()),
            (other.rows(), other.cols()),
            "max_abs_diff: shape mismatch"
        );
        self.data.iter().zip(other.data.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `max |h - h^dagger|`; infinite for non-square input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn hermitian_part(&self) -> Self {
        Self { data: (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0) }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius inner product `Tr(A^dagger B)`.
    pub fn inner(&self, other: &ComplexMatrix) -> C64 {
        self.data.iter().zip(other.data.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Sub-block with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.data[(rows[i], cols[j])])
    }

    /// Hermitian eigendecomposition with ascending eigenvalues.
    ///
    /// The input is symmetrized before decomposition; anything further than
    /// [`HERMITIAN_TOL`] from Hermitian is rejected.
    pub fn eigh(&self) -> Result<Eigh> {
        let deviation = self.hermiticity_error();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let sym = self.hermitian_part();
        let eig = sym.data.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let n = self.rows();
        let vectors = Self::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(Eigh { values, vectors })
    }

    /// Matrix exponential of `scale * self`.
    ///
    /// Hermitian input goes through the spectral decomposition
    /// `V exp(scale Lambda) V^dagger`; anything else through Pade
    /// scaling-and-squaring.
    pub fn expm(&self, scale: C64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape(format!("expm of {}x{} matrix", self.rows(), self.cols())));
        }
        if self.is_hermitian(HERMITIAN_TOL) {
            let Eigh { values, vectors } = self.eigh()?;
            let phases: Vec<C64> = values.iter().map(|&l| (scale * l).exp()).collect();
            let n = self.rows();
            let scaled = Self::from_fn(n, n, |i, j| vectors.get(i, j) * phases[j]);
            return scaled.matmul(&vectors.adjoint());
        }
        Ok(self.scale(scale).expm_pade())
    }

    /// Pade scaling-and-squaring exponential of `self`, regardless of structure.
    pub fn expm_pade(&self) -> Self {
        assert!(self.is_square(), "expm_pade: non-square matrix");
        Self { data: self.data.exp() }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: &self.data + &rhs.data }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: &self.data - &rhs.data }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { data: -&self.data }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.data += &rhs.data;
    }
}

/// Panics on inner-dimension mismatch; use [`ComplexMatrix::matmul`] for the
/// fallible form.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: &self.data * &rhs.data }
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
