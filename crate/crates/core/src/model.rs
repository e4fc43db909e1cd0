//! Hamiltonians and the photon-loss collapse operator for qubits
//! longitudinally coupled to one lossy cavity mode, in the rotating frame.
//!
//! All user-facing rates are ordinary frequencies (the "/2pi" values); every
//! rate is multiplied by 2pi on assembly and hbar = 1, so times come out in
//! inverse frequency units.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::hilbert::{annihilator, embed, sigma_minus, sigma_plus, sigma_z, FockCutoff, SpaceLayout};
use crate::linalg::{re, ComplexMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Qubit detunings from the rotating frame, one per qubit.
    pub detunings: Vec<f64>,
    /// Flip-flop coupling within each pair.
    pub g: f64,
    pub omega_c: f64,
    /// Longitudinal qubit-cavity couplings, one per qubit.
    pub couplings: Vec<f64>,
    /// Photon loss rate.
    pub kappa: f64,
    pub cutoff: FockCutoff,
    /// Four-qubit only: enforce that qubit 1 (2) matches qubit 3 (4).
    pub paired: bool,
}

impl ModelParams {
    /// The baseline two-qubit parameter set: detunings 15 and 0, g = 1,
    /// cavity at 15, couplings 2 and 1, loss 3.
    pub fn two_qubit_baseline() -> Self {
        Self {
            detunings: vec![15.0, 0.0],
            g: 1.0,
            omega_c: 15.0,
            couplings: vec![2.0, 1.0],
            kappa: 3.0,
            cutoff: FockCutoff::default(),
            paired: false,
        }
    }

    /// Two copies of the baseline pair, qubits (1,3) and (2,4) identical.
    pub fn four_qubit_baseline() -> Self {
        Self {
            detunings: vec![15.0, 0.0, 15.0, 0.0],
            couplings: vec![2.0, 1.0, 2.0, 1.0],
            paired: true,
            ..Self::two_qubit_baseline()
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.detunings.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.detunings.len();
        if n != 2 && n != 4 {
            return Err(Error::Params(format!("{n} qubits; expected 2 or 4")));
        }
        if self.couplings.len() != n {
            return Err(Error::Params(format!("{} couplings for {n} qubits", self.couplings.len())));
        }
        let all_finite = self
            .detunings
            .iter()
            .chain(&self.couplings)
            .chain([&self.g, &self.omega_c, &self.kappa])
            .all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::Params("non-finite parameter".into()));
        }
        if self.kappa < 0.0 {
            return Err(Error::Params(format!("negative loss rate {}", self.kappa)));
        }
        if self.cutoff.n_max() < 1 {
            return Err(Error::Params("Fock cutoff must keep at least one photon".into()));
        }
        if self.paired {
            if n != 4 {
                return Err(Error::Params("pairing applies to four qubits only".into()));
            }
            let (d, j) = (&self.detunings, &self.couplings);
            if d[0] != d[2] || d[1] != d[3] || j[0] != j[2] || j[1] != j[3] {
                return Err(Error::Params(format!(
                    "pairing violated: detunings {d:?}, couplings {j:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Assembled open system. The Hamiltonian is kept split into its three
/// physical parts so their algebra can be inspected.
#[derive(Clone, Debug)]
pub struct CavitySystem {
    pub layout: SpaceLayout,
    pub qubit_part: ComplexMatrix,
    pub cavity_part: ComplexMatrix,
    pub interaction_part: ComplexMatrix,
    pub hamiltonian: ComplexMatrix,
    /// `sqrt(2 pi kappa) a`.
    pub collapse: ComplexMatrix,
}

impl CavitySystem {
    /// `sum_j sigma_z^(j)` on this layout.
    pub fn total_excitation(&self) -> ComplexMatrix {
        total_excitation(&self.layout)
    }
}

pub fn total_excitation(layout: &SpaceLayout) -> ComplexMatrix {
    let d = layout.total_dim();
    (0..layout.n_qubits()).fold(ComplexMatrix::zeros(d, d), |acc, j| {
        &acc + &embed(layout, j, &sigma_z()).expect("qubit site")
    })
}

fn flip_flop_pairs(n_qubits: usize) -> Vec<(usize, usize)> {
    (0..n_qubits).step_by(2).map(|j| (j, j + 1)).collect()
}

/// Qubit Hamiltonian on any layout containing the qubits: Zeeman terms plus
/// the in-pair flip-flop coupling.
fn qubit_terms(layout: &SpaceLayout, params: &ModelParams) -> Result<ComplexMatrix> {
    let d = layout.total_dim();
    let mut h = ComplexMatrix::zeros(d, d);
    for (j, &delta) in params.detunings.iter().enumerate() {
        h += &embed(layout, j, &sigma_z())?.scale_real(TAU * delta / 2.0);
    }
    for (i, j) in flip_flop_pairs(params.n_qubits()) {
        let exchange = &embed(layout, i, &sigma_plus())?.matmul(&embed(layout, j, &sigma_minus())?)?
            + &embed(layout, i, &sigma_minus())?.matmul(&embed(layout, j, &sigma_plus())?)?;
        h += &exchange.scale_real(TAU * params.g);
    }
    Ok(h)
}

fn assemble(params: &ModelParams) -> Result<CavitySystem> {
    params.validate()?;
    let n = params.n_qubits();
    let layout = SpaceLayout::qubits_with_cavity(n, params.cutoff)?;
    let cav = layout.cavity_site().expect("cavity present");
    let a = embed(&layout, cav, &annihilator(params.cutoff))?;
    let a_dag = a.adjoint();

    let qubit_part = qubit_terms(&layout, params)?;
    let cavity_part = a_dag.matmul(&a)?.scale_real(TAU * params.omega_c);
    let d = layout.total_dim();
    let mut weighted_z = ComplexMatrix::zeros(d, d);
    for (j, &coupling) in params.couplings.iter().enumerate() {
        weighted_z += &embed(&layout, j, &sigma_z())?.scale_real(TAU * coupling);
    }
    let interaction_part = (&a + &a_dag).matmul(&weighted_z)?;
    let hamiltonian = &(&qubit_part + &cavity_part) + &interaction_part;
    let collapse = a.scale(re((TAU * params.kappa).sqrt()));
    Ok(CavitySystem { layout, qubit_part, cavity_part, interaction_part, hamiltonian, collapse })
}

pub fn build_two_qubit(params: &ModelParams) -> Result<CavitySystem> {
    if params.n_qubits() != 2 {
        return Err(Error::Params(format!("two-qubit model given {} qubits", params.n_qubits())));
    }
    assemble(params)
}

pub fn build_four_qubit(params: &ModelParams) -> Result<CavitySystem> {
    if params.n_qubits() != 4 {
        return Err(Error::Params(format!("four-qubit model given {} qubits", params.n_qubits())));
    }
    if !params.paired {
        return Err(Error::Params("four-qubit model requires paired parameters".into()));
    }
    assemble(params)
}

/// Cavity-free qubit Hamiltonian on a qubits-only layout.
pub fn closed_qubit_hamiltonian(params: &ModelParams) -> Result<(ComplexMatrix, SpaceLayout)> {
    params.validate()?;
    let layout = SpaceLayout::qubits(params.n_qubits())?;
    Ok((qubit_terms(&layout, params)?, layout))
}
