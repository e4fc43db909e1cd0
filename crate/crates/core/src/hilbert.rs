//! Composite Hilbert-space bookkeeping.
//!
//! Sites are ordered left to right with site 0 the slowest-varying tensor
//! factor. Qubits use level 0 for `|up>` and level 1 for `|down>`, so
//! `sigma_z |up> = +|up>`. A cavity, when present, is always the last site.

use crate::error::{Error, Result};
use crate::linalg::{re, ComplexMatrix, ONE, ZERO};

/// Highest retained photon number of the truncated cavity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockCutoff(pub usize);

impl FockCutoff {
    pub fn n_max(self) -> usize {
        self.0
    }

    pub fn dim(self) -> usize {
        self.0 + 1
    }
}

impl Default for FockCutoff {
    fn default() -> Self {
        FockCutoff(6)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceLayout {
    dims: Vec<usize>,
    has_cavity: bool,
}

impl SpaceLayout {
    pub fn qubits(n: usize) -> Result<Self> {
        Self::build(n, None)
    }

    pub fn qubits_with_cavity(n: usize, cutoff: FockCutoff) -> Result<Self> {
        Self::build(n, Some(cutoff))
    }

    fn build(n_qubits: usize, cutoff: Option<FockCutoff>) -> Result<Self> {
        let mut dims = vec![2; n_qubits];
        if let Some(c) = cutoff {
            dims.push(c.dim());
        }
        if dims.iter().product::<usize>() < 2 {
            return Err(Error::Layout("total dimension must be at least 2".into()));
        }
        Ok(Self { dims, has_cavity: cutoff.is_some() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.dims.len() - usize::from(self.has_cavity)
    }

    pub fn cavity_site(&self) -> Option<usize> {
        self.has_cavity.then(|| self.dims.len() - 1)
    }

    pub fn cutoff(&self) -> Option<FockCutoff> {
        self.has_cavity.then(|| FockCutoff(self.dims[self.dims.len() - 1] - 1))
    }

    pub fn is_qubit(&self, site: usize) -> bool {
        site < self.n_qubits()
    }

    /// Flat basis index for per-site levels (mixed radix, site 0 slowest).
    pub fn index_of(&self, labels: &[usize]) -> Result<usize> {
        if labels.len() != self.dims.len() {
            return Err(Error::Layout(format!(
                "{} labels for {} sites",
                labels.len(),
                self.dims.len()
            )));
        }
        let mut index = 0;
        for (site, (&label, &dim)) in labels.iter().zip(&self.dims).enumerate() {
            if label >= dim {
                return Err(Error::Layout(format!("label {label} out of range at site {site} (dim {dim})")));
            }
            index = index * dim + label;
        }
        Ok(index)
    }

    pub fn labels_of(&self, mut index: usize) -> Vec<usize> {
        let mut labels = vec![0; self.dims.len()];
        for (slot, &dim) in labels.iter_mut().zip(&self.dims).rev() {
            *slot = index % dim;
            index /= dim;
        }
        labels
    }
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&[1.0, -1.0])
}

/// `|up><down|`.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { ONE } else { ZERO })
}

/// `|down><up|`.
pub fn sigma_minus() -> ComplexMatrix {
    sigma_plus().adjoint()
}

/// `|up><up|`.
pub fn projector_up() -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&[1.0, 0.0])
}

/// Truncated annihilation operator, `a[n-1, n] = sqrt(n)`.
pub fn annihilator(cutoff: FockCutoff) -> ComplexMatrix {
    let d = cutoff.dim();
    ComplexMatrix::from_fn(d, d, |i, j| if j == i + 1 { re((j as f64).sqrt()) } else { ZERO })
}

/// `I x ... x op x ... x I` with `op` on `site`.
pub fn embed(layout: &SpaceLayout, site: usize, op: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dims = layout.dims();
    if site >= dims.len() {
        return Err(Error::Layout(format!("site {site} out of range ({} sites)", dims.len())));
    }
    if !op.is_square() || op.rows() != dims[site] {
        return Err(Error::Shape(format!(
            "operator {}x{} on site {site} of dim {}",
            op.rows(),
            op.cols(),
            dims[site]
        )));
    }
    let left: usize = dims[..site].iter().product();
    let right: usize = dims[site + 1..].iter().product();
    Ok(ComplexMatrix::identity(left).kron(op).kron(&ComplexMatrix::identity(right)))
}

/// Computational basis state as a column vector.
pub fn basis_state(layout: &SpaceLayout, labels: &[usize]) -> Result<ComplexMatrix> {
    let index = layout.index_of(labels)?;
    let mut amps = vec![ZERO; layout.total_dim()];
    amps[index] = ONE;
    Ok(ComplexMatrix::column(&amps))
}

/// Reduced density matrix on the sites in `keep` (kept in ascending order).
pub fn partial_trace(layout: &SpaceLayout, rho: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    let d = layout.total_dim();
    if !rho.is_square() || rho.rows() != d {
        return Err(Error::Shape(format!("rho is {}x{}, layout dim {d}", rho.rows(), rho.cols())));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() != keep.len() || kept.iter().any(|&s| s >= layout.n_sites()) {
        return Err(Error::Layout(format!("invalid keep set {keep:?}")));
    }
    let dims = layout.dims();
    let kept_dim: usize = kept.iter().map(|&s| dims[s]).product();
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);

    // Index within the kept subsystem for every full basis index.
    let reduced_index = |labels: &[usize]| kept.iter().fold(0, |acc, &s| acc * dims[s] + labels[s]);
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !kept.contains(s)).collect();
    let traced_key = |labels: &[usize]| traced.iter().fold(0, |acc, &s| acc * dims[s] + labels[s]);

    let info: Vec<(usize, usize)> = (0..d)
        .map(|i| {
            let labels = layout.labels_of(i);
            (reduced_index(&labels), traced_key(&labels))
        })
        .collect();
    for i in 0..d {
        let (ri, ti) = info[i];
        for (j, &(rj, tj)) in info.iter().enumerate() {
            if ti == tj {
                let v = out.get(ri, rj) + rho.get(i, j);
                out.set(ri, rj, v);
            }
        }
    }
    Ok(out)
}
