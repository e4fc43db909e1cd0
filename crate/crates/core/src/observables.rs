//! Scalar diagnostics of density matrices.

use crate::error::{Error, Result};
use crate::hilbert::{annihilator, embed, partial_trace, projector_up, SpaceLayout};
use crate::linalg::{re, ComplexMatrix, C64, HERMITIAN_TOL};

const UP: usize = 0;
const DOWN: usize = 1;

/// Largest imaginary part tolerated in an expectation value.
const IMAG_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ObservableSpec {
    name: String,
    operator: ComplexMatrix,
}

impl ObservableSpec {
    pub fn new(name: impl Into<String>, operator: ComplexMatrix) -> Result<Self> {
        let deviation = operator.hermiticity_error();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { name: name.into(), operator })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    /// `|up><up|` on a qubit site; named `pe<site+1>`.
    pub fn excitation(layout: &SpaceLayout, site: usize) -> Result<Self> {
        if !layout.is_qubit(site) {
            return Err(Error::Layout(format!("site {site} is not a qubit")));
        }
        Self::new(format!("pe{}", site + 1), embed(layout, site, &projector_up())?)
    }

    /// Cavity photon number `a^dagger a`.
    pub fn photon_number(layout: &SpaceLayout) -> Result<Self> {
        let (site, cutoff) = layout
            .cavity_site()
            .zip(layout.cutoff())
            .ok_or_else(|| Error::Layout("layout has no cavity".into()))?;
        let a = annihilator(cutoff);
        Self::new("photons", embed(layout, site, &a.adjoint().matmul(&a)?)?)
    }
}

/// `Tr(rho O)`.
pub fn expectation(rho: &ComplexMatrix, spec: &ObservableSpec) -> Result<f64> {
    let op = &spec.operator;
    if !rho.is_square() || rho.rows() != op.rows() {
        return Err(Error::Shape(format!(
            "rho {}x{} against observable '{}' of dim {}",
            rho.rows(),
            rho.cols(),
            spec.name,
            op.rows()
        )));
    }
    let n = rho.rows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho.get(i, j) * op.get(j, i);
        }
    }
    if acc.im.abs() > IMAG_TOL {
        return Err(Error::InvalidState(format!(
            "expectation of '{}' has imaginary part {:.3e}",
            spec.name, acc.im
        )));
    }
    Ok(acc.re)
}

/// Clamp a probability that may sit a hair outside `[0, 1]` from rounding.
pub fn clamp_probability(raw: f64) -> f64 {
    raw.clamp(0.0, 1.0)
}

/// `Tr(rho^2)`.
pub fn purity(rho: &ComplexMatrix) -> f64 {
    rho.inner(rho).re
}

fn require_four_qubits(layout: &SpaceLayout) -> Result<()> {
    if layout.n_qubits() != 4 {
        return Err(Error::Layout(format!(
            "state-transfer observables need four qubits, layout has {}",
            layout.n_qubits()
        )));
    }
    Ok(())
}

/// Basis indices of `|labels, n>` for every cavity level `n` (just the one
/// index when there is no cavity).
fn indices_over_cavity(layout: &SpaceLayout, qubit_labels: &[usize]) -> Result<Vec<usize>> {
    let levels = layout.cutoff().map_or(0, |c| c.dim());
    if levels == 0 {
        return Ok(vec![layout.index_of(qubit_labels)?]);
    }
    (0..levels)
        .map(|n| {
            let mut labels = qubit_labels.to_vec();
            labels.push(n);
            layout.index_of(&labels)
        })
        .collect()
}

/// Target of the four-qubit transfer: qubits 1 and 3 down, qubits 2 and 4
/// in `alpha |up down> + beta |down up>`.
///
/// Returns the two qubit-label sets with their amplitudes.
fn transfer_target(alpha: C64, beta: C64) -> [([usize; 4], C64); 2] {
    [([DOWN, UP, DOWN, DOWN], alpha), ([DOWN, DOWN, DOWN, UP], beta)]
}

/// Pieces of `<psi| rho |psi>` for `psi = alpha|a> + beta|b>` tensored with
/// the identity on the cavity: `(sum_n rho_an,an, sum_n rho_bn,bn, sum_n rho_an,bn)`.
fn two_level_blocks(layout: &SpaceLayout, rho: &ComplexMatrix, a: &[usize], b: &[usize]) -> Result<(f64, f64, C64)> {
    if rho.rows() != layout.total_dim() || !rho.is_square() {
        return Err(Error::Shape(format!("rho {}x{} for layout dim {}", rho.rows(), rho.cols(), layout.total_dim())));
    }
    let ia = indices_over_cavity(layout, a)?;
    let ib = indices_over_cavity(layout, b)?;
    let mut paa = 0.0;
    let mut pbb = 0.0;
    let mut cab = C64::new(0.0, 0.0);
    for (&x, &y) in ia.iter().zip(&ib) {
        paa += rho.get(x, x).re;
        pbb += rho.get(y, y).re;
        cab += rho.get(x, y);
    }
    Ok((paa, pbb, cab))
}

/// `Tr[rho (|target><target| x I_cav)]` with the target built from the
/// given amplitudes exactly as supplied.
pub fn transfer_fidelity(layout: &SpaceLayout, rho: &ComplexMatrix, alpha: C64, beta: C64) -> Result<f64> {
    require_four_qubits(layout)?;
    let [(a, alpha), (b, beta)] = transfer_target(alpha, beta);
    let (paa, pbb, cab) = two_level_blocks(layout, rho, &a, &b)?;
    Ok(alpha.norm_sqr() * paa + beta.norm_sqr() * pbb + 2.0 * (alpha.conj() * beta * cab).re)
}

/// `max_phi F(alpha, e^{i phi} beta)`, the transfer fidelity after the best
/// fixed relative-phase correction.
pub fn phase_optimized_fidelity(layout: &SpaceLayout, rho: &ComplexMatrix, alpha: C64, beta: C64) -> Result<f64> {
    require_four_qubits(layout)?;
    let [(a, alpha), (b, beta)] = transfer_target(alpha, beta);
    let (paa, pbb, cab) = two_level_blocks(layout, rho, &a, &b)?;
    Ok(alpha.norm_sqr() * paa + beta.norm_sqr() * pbb + 2.0 * (alpha.conj() * beta * cab).norm())
}

/// Fidelity with `|down down>_13 (|up down> + |down up>)_24 / sqrt 2`.
pub fn bell_fidelity(layout: &SpaceLayout, rho: &ComplexMatrix) -> Result<f64> {
    let s = re(std::f64::consts::FRAC_1_SQRT_2);
    transfer_fidelity(layout, rho, s, s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalPair {
    /// Population of `|0_L> = |up down>`.
    pub p00: f64,
    /// Population of `|1_L> = |down up>`.
    pub p11: f64,
    /// `<0_L| rho_pair |1_L>`.
    pub coherence: C64,
}

/// Logical-qubit content of the reduced state of two qubit sites.
pub fn logical_populations(layout: &SpaceLayout, rho: &ComplexMatrix, pair: (usize, usize)) -> Result<LogicalPair> {
    let (s1, s2) = pair;
    if s1 == s2 || !layout.is_qubit(s1) || !layout.is_qubit(s2) {
        return Err(Error::Layout(format!("invalid qubit pair {pair:?}")));
    }
    let reduced = partial_trace(layout, rho, &[s1, s2])?;
    // partial_trace orders the kept sites ascending
    let idx = |first: usize, second: usize| if s1 < s2 { 2 * first + second } else { 2 * second + first };
    let zero = idx(UP, DOWN);
    let one = idx(DOWN, UP);
    Ok(LogicalPair {
        p00: reduced.get(zero, zero).re,
        p11: reduced.get(one, one).re,
        coherence: reduced.get(zero, one),
    })
}

/// `|psi><psi| x I_cav` for the transfer target with the given amplitudes,
/// named `fidelity`. Its expectation equals [`transfer_fidelity`].
pub fn transfer_observable(layout: &SpaceLayout, alpha: C64, beta: C64) -> Result<ObservableSpec> {
    require_four_qubits(layout)?;
    let [(a, alpha), (b, beta)] = transfer_target(alpha, beta);
    let n = layout.total_dim();
    let mut op = ComplexMatrix::zeros(n, n);
    for (&x, &y) in indices_over_cavity(layout, &a)?.iter().zip(&indices_over_cavity(layout, &b)?) {
        op.set(x, x, re(alpha.norm_sqr()));
        op.set(y, y, re(beta.norm_sqr()));
        op.set(x, y, alpha * beta.conj());
        op.set(y, x, beta * alpha.conj());
    }
    ObservableSpec::new("fidelity", op)
}

/// `op` (indexed `2 l1 + l2` by the labels of `s1`, `s2`) tensored with the
/// identity on every other site.
fn embed_pair(layout: &SpaceLayout, (s1, s2): (usize, usize), op: &ComplexMatrix) -> ComplexMatrix {
    let n = layout.total_dim();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let (li, lj) = (layout.labels_of(i), layout.labels_of(j));
        let spectators_agree = (0..li.len()).all(|k| k == s1 || k == s2 || li[k] == lj[k]);
        if spectators_agree {
            op.get(2 * li[s1] + li[s2], 2 * lj[s1] + lj[s2])
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Linear observables reproducing the fields of [`LogicalPair`] for a
/// qubit pair: `<prefix>_p00`, `<prefix>_p11`, `<prefix>_coh_re`,
/// `<prefix>_coh_im`.
pub fn logical_observables(layout: &SpaceLayout, pair: (usize, usize), prefix: &str) -> Result<[ObservableSpec; 4]> {
    let (s1, s2) = pair;
    if s1 == s2 || !layout.is_qubit(s1) || !layout.is_qubit(s2) {
        return Err(Error::Layout(format!("invalid qubit pair {pair:?}")));
    }
    let zero = 2 * UP + DOWN;
    let one = 2 * DOWN + UP;
    let two_qubit = |entries: &[(usize, usize, C64)]| {
        let mut m = ComplexMatrix::zeros(4, 4);
        for &(i, j, v) in entries {
            m.set(i, j, v);
        }
        embed_pair(layout, pair, &m)
    };
    let half = re(0.5);
    let half_i = C64::new(0.0, 0.5);
    Ok([
        ObservableSpec::new(format!("{prefix}_p00"), two_qubit(&[(zero, zero, re(1.0))]))?,
        ObservableSpec::new(format!("{prefix}_p11"), two_qubit(&[(one, one, re(1.0))]))?,
        ObservableSpec::new(format!("{prefix}_coh_re"), two_qubit(&[(zero, one, half), (one, zero, half)]))?,
        // Tr[rho Y] = Im <0|rho|1> for Y = (i/2)(|0><1| - |1><0|)
        ObservableSpec::new(format!("{prefix}_coh_im"), two_qubit(&[(zero, one, half_i), (one, zero, -half_i)]))?,
    ])
}
