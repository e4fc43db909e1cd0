//! Closed-form dressed basis of one flip-flop pair and the selection rules
//! of the longitudinal cavity coupling in that basis.
//!
//! For a pair with detuning difference `D = dw1 - dw2` and coupling `g`
//! (angular units) the qubit Hamiltonian has
//!
//! ```text
//! |E1> = |up up>                                  E1 =  (dw1 + dw2) / 2
//! |E2> = cos(t/2)|up down> + sin(t/2)|down up>    E2 =  sqrt(D^2 + 4 g^2) / 2
//! |E3> = sin(t/2)|up down> - cos(t/2)|down up>    E3 = -sqrt(D^2 + 4 g^2) / 2
//! |E4> = |down down>                              E4 = -(dw1 + dw2) / 2
//! ```
//!
//! with `cos t = D / sqrt(D^2 + 4 g^2)` and `sin t = 2g / sqrt(D^2 + 4 g^2)`.
//! Four-qubit parameter sets are analysed through their first pair; under
//! the pairing constraints the second pair is identical.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::hilbert::{embed, sigma_z, SpaceLayout};
use crate::linalg::{re, ComplexMatrix, ZERO};
use crate::model::{closed_qubit_hamiltonian, ModelParams};

#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Mixing angle, `atan2(2g, D)`.
    pub theta: f64,
    /// `E1..E4` in angular units.
    pub energies: [f64; 4],
    /// `|E1>..|E4>` as columns over `(|up up>, |up down>, |down up>, |down down>)`.
    pub vectors: [ComplexMatrix; 4],
}

impl EigenSystem {
    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }

    pub fn sin_theta(&self) -> f64 {
        self.theta.sin()
    }

    /// `|<down up|E3>|^2 = cos^2(theta/2)`: the target-qubit excitation left
    /// after `|E2>` has fully decayed into `|E3>`.
    pub fn transfer_prediction(&self) -> f64 {
        (0.5 * self.theta).cos().powi(2)
    }

    /// `(E2 - E3) / 2pi`, the dressed splitting in frequency units.
    pub fn dressed_splitting(&self) -> f64 {
        (self.energies[1] - self.energies[2]) / TAU
    }
}

/// Parameters of the flip-flop pair `(0, 1)`.
fn pair(params: &ModelParams) -> Result<(f64, f64, f64, f64, f64)> {
    if params.detunings.len() < 2 || params.couplings.len() < 2 {
        return Err(Error::Params("need at least one qubit pair".into()));
    }
    Ok((params.detunings[0], params.detunings[1], params.g, params.couplings[0], params.couplings[1]))
}

pub fn analytic_eigensystem(params: &ModelParams) -> Result<EigenSystem> {
    let (d1, d2, g, _, _) = pair(params)?;
    let (w1, w2, g) = (TAU * d1, TAU * d2, TAU * g);
    let delta = w1 - w2;
    let splitting = (delta * delta + 4.0 * g * g).sqrt();
    if splitting == 0.0 {
        return Err(Error::DegenerateAngle);
    }
    let theta = (2.0 * g).atan2(delta);
    let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let ket = |amps: [f64; 4]| ComplexMatrix::column(&amps.map(re));
    Ok(EigenSystem {
        theta,
        energies: [(w1 + w2) / 2.0, splitting / 2.0, -splitting / 2.0, -(w1 + w2) / 2.0],
        vectors: [
            ket([1.0, 0.0, 0.0, 0.0]),
            ket([0.0, c, s, 0.0]),
            ket([0.0, s, -c, 0.0]),
            ket([0.0, 0.0, 0.0, 1.0]),
        ],
    })
}

/// Largest disagreement between the closed form and a numerical
/// diagonalization of the pair Hamiltonian.
#[derive(Clone, Copy, Debug)]
pub struct NumericCheck {
    /// `max |E_analytic - E_numeric|` over the sorted spectra.
    pub energy_deviation: f64,
    /// `max (1 - |projection of |E_j> onto the numeric eigenspace of E_j|)`.
    pub vector_deviation: f64,
}

impl NumericCheck {
    pub fn max(&self) -> f64 {
        self.energy_deviation.max(self.vector_deviation)
    }
}

fn pair_hamiltonian(params: &ModelParams) -> Result<ComplexMatrix> {
    let (d1, d2, g, j1, j2) = pair(params)?;
    let two = ModelParams { detunings: vec![d1, d2], couplings: vec![j1, j2], g, paired: false, ..params.clone() };
    Ok(closed_qubit_hamiltonian(&two)?.0)
}

pub fn verify_against_numeric(params: &ModelParams, eig: &EigenSystem) -> Result<NumericCheck> {
    let h = pair_hamiltonian(params)?;
    let numeric = h.eigh()?;
    let mut analytic = eig.energies;
    analytic.sort_by(f64::total_cmp);
    let energy_deviation = analytic
        .iter()
        .zip(&numeric.values)
        .map(|(a, n)| (a - n).abs())
        .fold(0.0, f64::max);

    let scale = numeric.values.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let mut vector_deviation: f64 = 0.0;
    for (energy, v) in eig.energies.iter().zip(&eig.vectors) {
        // project onto every numeric eigenvector sharing this eigenvalue
        let mut weight = 0.0;
        for (k, &value) in numeric.values.iter().enumerate() {
            if (value - energy).abs() <= 1e-9 * scale {
                let col = ComplexMatrix::from_fn(4, 1, |i, _| numeric.vectors.get(i, k));
                weight += v.inner(&col).norm_sqr();
            }
        }
        vector_deviation = vector_deviation.max((1.0 - weight.sqrt()).abs());
    }
    Ok(NumericCheck { energy_deviation, vector_deviation })
}

/// Qubit-sector matrix elements of `sum_j J_j sigma_z^(j)` between dressed
/// states, in angular units.
#[derive(Clone, Copy, Debug)]
pub struct TransitionElements {
    pub m12: f64,
    pub m23: f64,
    pub m34: f64,
}

pub fn transition_elements(params: &ModelParams) -> Result<TransitionElements> {
    let eig = analytic_eigensystem(params)?;
    let (_, _, _, j1, j2) = pair(params)?;
    let layout = SpaceLayout::qubits(2)?;
    let coupling = &embed(&layout, 0, &sigma_z())?.scale_real(TAU * j1) + &embed(&layout, 1, &sigma_z())?.scale_real(TAU * j2);
    let element = |a: usize, b: usize| -> Result<f64> {
        let z = eig.vectors[a].adjoint().matmul(&coupling.matmul(&eig.vectors[b])?)?.get(0, 0);
        debug_assert!(z.im == 0.0 || z == ZERO);
        Ok(z.re)
    };
    Ok(TransitionElements { m12: element(0, 1)?, m23: element(1, 2)?, m34: element(2, 3)? })
}

/// `|omega_c - (E2 - E3)/2pi|` in frequency units; zero is the fastest
/// transfer.
pub fn resonance_detuning(params: &ModelParams) -> Result<f64> {
    let (d1, d2, g, _, _) = pair(params)?;
    let splitting = ((d1 - d2).powi(2) + 4.0 * g * g).sqrt();
    Ok((params.omega_c - splitting).abs())
}

/// Rough `|E2> -> |E3>` rate (angular) for a lossy mode detuned from the
/// dressed splitting: `m23^2 kappa / (mismatch^2 + kappa^2/4)`. Only used to
/// size default time horizons.
pub fn transfer_rate_estimate(params: &ModelParams) -> Result<f64> {
    let m23 = transition_elements(params)?.m23;
    let kappa = TAU * params.kappa;
    let mismatch = TAU * resonance_detuning(params)?;
    let denom = mismatch * mismatch + 0.25 * kappa * kappa;
    Ok(if denom == 0.0 { 0.0 } else { m23 * m23 * kappa / denom })
}
