//! A four-qubit run with only pair (1, 2) excited reduces to a two-qubit run
//! once the idle pair's constant push on the cavity is included.

use std::f64::consts::TAU;

use oneway::dynamics::{steady_state, IntegratorConfig};
use oneway::hilbert::{annihilator, basis_state, embed, FockCutoff};
use oneway::linalg::{re, ComplexMatrix};
use oneway::model::{build_four_qubit, build_two_qubit, ModelParams};
use oneway::observables::{expectation, transfer_fidelity, ObservableSpec};

const UP: usize = 0;
const DOWN: usize = 1;

fn four_qubit_fidelity(p: &ModelParams) -> f64 {
    let sys = build_four_qubit(p).unwrap();
    let rho0 = ComplexMatrix::projector(&basis_state(&sys.layout, &[UP, DOWN, DOWN, DOWN, 0]).unwrap());
    let ss = steady_state(&sys.hamiltonian, &sys.collapse, &rho0, &IntegratorConfig::default()).unwrap();
    assert!(ss.converged);
    transfer_fidelity(&sys.layout, &ss.rho, re(1.0), re(0.0)).unwrap()
}

/// Steady `P_e2` of the pair with an extra drive `drive * 2pi (a + a^dagger)`.
fn two_qubit_pe2(p: &ModelParams, drive: f64) -> f64 {
    let sys = build_two_qubit(p).unwrap();
    let a = embed(&sys.layout, 2, &annihilator(p.cutoff)).unwrap();
    let push = (&a + &a.adjoint()).scale_real(TAU * drive);
    let h = &sys.hamiltonian + &push;
    let rho0 = ComplexMatrix::projector(&basis_state(&sys.layout, &[UP, DOWN, 0]).unwrap());
    let ss = steady_state(&h, &sys.collapse, &rho0, &IntegratorConfig::default()).unwrap();
    assert!(ss.converged);
    expectation(&ss.rho, &ObservableSpec::excitation(&sys.layout, 1).unwrap()).unwrap()
}

fn pair(p4: &ModelParams) -> ModelParams {
    ModelParams {
        detunings: p4.detunings[..2].to_vec(),
        couplings: p4.couplings[..2].to_vec(),
        paired: false,
        ..p4.clone()
    }
}

#[test]
fn idle_pair_acts_as_a_static_cavity_drive() {
    for g in [0.25, 1.0] {
        let p4 = ModelParams { g, ..ModelParams::four_qubit_baseline() };
        let p2 = pair(&p4);
        // qubits 3 and 4 sit in |down>, so sigma_z = -1 on each
        let drive = -(p4.couplings[2] + p4.couplings[3]);
        let f4 = four_qubit_fidelity(&p4);
        let f2 = two_qubit_pe2(&p2, drive);
        assert!((f4 - f2).abs() < 1e-9, "g = {g}: four-qubit {f4}, driven pair {f2}");
    }
}

#[test]
fn dropping_the_drive_changes_the_answer() {
    // the undriven pair is a different model: the displaced cavity shifts
    // the steady population at the 1e-4 level
    let p4 = ModelParams { g: 0.25, ..ModelParams::four_qubit_baseline() };
    let f4 = four_qubit_fidelity(&p4);
    let bare = two_qubit_pe2(&pair(&p4), 0.0);
    assert!((f4 - bare).abs() > 1e-5, "four-qubit {f4}, bare pair {bare}");
    assert!((f4 - bare).abs() < 5e-3);
}

#[test]
fn cutoff_does_not_matter_for_the_reduction() {
    let p4 = ModelParams { g: 1.0, cutoff: FockCutoff(8), ..ModelParams::four_qubit_baseline() };
    let drive = -(p4.couplings[2] + p4.couplings[3]);
    assert!((four_qubit_fidelity(&p4) - two_qubit_pe2(&pair(&p4), drive)).abs() < 1e-9);
}
