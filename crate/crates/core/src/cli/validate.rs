//! Self-checks run by the `validate` subcommand.

use std::f64::consts::TAU;

use super::config::Resolved;
use super::experiments::{build, prepare};
use super::output::{num, Table};
use crate::analysis::{analytic_eigensystem, transition_elements, verify_against_numeric};
use crate::dynamics::{evolve, IntegratorConfig, Lindbladian, Method};
use crate::error::Error;
use crate::hilbert::{annihilator, FockCutoff};
use crate::linalg::{c, ComplexMatrix};
use crate::model::{total_excitation, ModelParams};
use crate::observables::ObservableSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn below(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { name, passed: value < tolerance, value, tolerance, detail: String::new() }
    }

    fn failed(name: &'static str, detail: impl ToString) -> Self {
        Self { name, passed: false, value: f64::NAN, tolerance: f64::NAN, detail: detail.to_string() }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
}

/// Add a non-Hermitian entry to `h`.
fn break_hermiticity(h: &mut ComplexMatrix) {
    let v = h.get(0, 1);
    h.set(0, 1, v + c(1e-3, 0.0));
}

pub fn run_validate(r: &Resolved) -> Vec<Check> {
    let mut checks = Vec::new();
    let p = &r.params;
    let grid = r.config.validate.grid;

    match build(p) {
        Ok(mut sys) => {
            if r.config.validate.broken_hamiltonian {
                break_hermiticity(&mut sys.hamiltonian);
            }
            let h = &sys.hamiltonian;
            let scale = h.max_abs().max(1.0);
            checks.push(Check::below("hamiltonian_hermitian", h.hermiticity_error() / scale, 1e-14));
            let n_exc = total_excitation(&sys.layout);
            match h.commutator(&n_exc) {
                Ok(comm) => checks.push(Check::below("excitation_conserved", comm.max_abs(), 1e-12)),
                Err(e) => checks.push(Check::failed("excitation_conserved", e)),
            }
            let mut up_down = vec![0, 1];
            let mut down_up = vec![1, 0];
            up_down.resize(p.n_qubits(), 1);
            down_up.resize(p.n_qubits(), 1);
            up_down.push(0);
            down_up.push(0);
            let element = sys
                .layout
                .index_of(&up_down)
                .and_then(|i| sys.layout.index_of(&down_up).map(|j| h.get(i, j)));
            match element {
                Ok(z) => checks.push(Check::below("flip_flop_element", (z - c(TAU * p.g, 0.0)).norm(), 1e-12)),
                Err(e) => checks.push(Check::failed("flip_flop_element", e)),
            }
            checks.push(short_run(r, h, &sys.collapse));
        }
        Err(e) => checks.push(Check::failed("model_builds", e)),
    }

    checks.push(uniform_coupling_commutes(p));
    checks.extend(eigensystem_scan(p, grid));
    checks.push(photon_decay(p.kappa));
    checks.push(negative_control());
    checks
}

/// Trace, positivity and excitation-number bookkeeping over a short run.
fn short_run(r: &Resolved, h: &ComplexMatrix, l: &ComplexMatrix) -> Check {
    let name = "short_run_integrity";
    let rho0 = match prepare(&r.params, &r.initial) {
        Ok(p) => p.rho0,
        Err(e) => return Check::failed(name, e),
    };
    let layout = match build(&r.params) {
        Ok(s) => s.layout,
        Err(e) => return Check::failed(name, e),
    };
    let obs = match ObservableSpec::new("n_exc", total_excitation(&layout)) {
        Ok(o) => o,
        Err(e) => return Check::failed(name, e),
    };
    let cfg = IntegratorConfig { record_stride: 0.05, ..r.integrator.clone() };
    match evolve(h, l, &rho0, r.t_final.min(1.0), &cfg, std::slice::from_ref(&obs)) {
        Ok(traj) => {
            let series = traj.series("n_exc").unwrap_or(&[]);
            let drift = series.iter().map(|x| (x - series[0]).abs()).fold(0.0, f64::max);
            Check {
                name,
                passed: traj.max_trace_error < 1e-7 && drift < 1e-7 && traj.min_eigenvalue > -1e-6,
                value: traj.max_trace_error.max(drift),
                tolerance: 1e-7,
                detail: format!(
                    "trace {} drift {} min_eig {}",
                    num(traj.max_trace_error),
                    num(drift),
                    num(traj.min_eigenvalue)
                ),
            }
        }
        Err(e) => Check::failed(name, e),
    }
}

fn uniform_coupling_commutes(p: &ModelParams) -> Check {
    let name = "uniform_coupling_commutes";
    let j = p.couplings.first().copied().unwrap_or(1.0);
    let uniform = ModelParams { couplings: vec![j; p.couplings.len()], ..p.clone() };
    match build(&uniform).and_then(|s| s.qubit_part.commutator(&s.interaction_part)) {
        Ok(comm) => Check::below(name, comm.max_abs(), 1e-12),
        Err(e) => Check::failed(name, e),
    }
}

/// Closed-form eigensystem and selection rules over a `(delta, g)` grid.
fn eigensystem_scan(p: &ModelParams, grid: usize) -> Vec<Check> {
    let mut eig_dev: f64 = 0.0;
    let mut m34: f64 = 0.0;
    let mut m23_dev: f64 = 0.0;
    let j_pairs = [(p.couplings[0], p.couplings[1]), (2.0, 1.0), (1.0, 1.0), (-0.7, 3.1)];
    for delta in linspace(0.1, 20.0, grid) {
        for g in linspace(0.1, 20.0, grid) {
            for &(j1, j2) in &j_pairs {
                let q = ModelParams {
                    detunings: vec![delta, 0.0],
                    g,
                    couplings: vec![j1, j2],
                    paired: false,
                    ..ModelParams::two_qubit_baseline()
                };
                let outcome = analytic_eigensystem(&q).and_then(|eig| {
                    let check = verify_against_numeric(&q, &eig)?;
                    let t = transition_elements(&q)?;
                    Ok((check.max(), t.m34.abs(), (t.m23 - TAU * eig.sin_theta() * (j1 - j2)).abs()))
                });
                match outcome {
                    Ok((a, b, c)) => {
                        eig_dev = eig_dev.max(a);
                        m34 = m34.max(b);
                        m23_dev = m23_dev.max(c);
                    }
                    Err(e) => return vec![Check::failed("eigensystem_scan", e)],
                }
            }
        }
    }
    vec![
        Check::below("eigensystem_analytic_vs_numeric", eig_dev, 1e-10),
        Check::below("selection_rule_m34", m34, 1e-14),
        Check::below("selection_rule_m23", m23_dev, 1e-12),
    ]
}

/// One photon leaking out of an isolated cavity: `<n>(t) = exp(-2 pi kappa t)`.
fn photon_decay(kappa: f64) -> Check {
    let name = "photon_decay_rate";
    let kappa = if kappa > 0.0 { kappa } else { 1.0 };
    let cutoff = FockCutoff(2);
    let a = annihilator(cutoff);
    let h = ComplexMatrix::zeros(3, 3);
    let l = a.scale_real((TAU * kappa).sqrt());
    let outcome = a.adjoint().matmul(&a).and_then(|n| {
        let obs = ObservableSpec::new("n", n)?;
        let rho0 = ComplexMatrix::real_diagonal(&[0.0, 1.0, 0.0]);
        let t = 0.1 / kappa;
        let cfg = IntegratorConfig { method: Method::Propagator, record_stride: t, ..IntegratorConfig::default() };
        let traj = evolve(&h, &l, &rho0, t, &cfg, std::slice::from_ref(&obs))?;
        let got = traj.series("n").and_then(|s| s.last().copied()).unwrap_or(f64::NAN);
        Ok((got - (-TAU * kappa * t).exp()).abs())
    });
    match outcome {
        Ok(dev) => Check::below(name, dev, 1e-10),
        Err(e) => Check::failed(name, e),
    }
}

/// A non-Hermitian Hamiltonian fixture must be refused.
fn negative_control() -> Check {
    let mut h = ComplexMatrix::real_diagonal(&[1.0, -1.0]);
    break_hermiticity(&mut h);
    let l = ComplexMatrix::zeros(2, 2);
    let rejected = matches!(Lindbladian::new(&h, &l), Err(Error::NotHermitian { .. }));
    Check {
        name: "negative_control_rejects_non_hermitian",
        passed: rejected,
        value: if rejected { 0.0 } else { 1.0 },
        tolerance: 0.5,
        detail: "broken fixture must raise an integrity error".into(),
    }
}

pub fn table(checks: &[Check]) -> Table {
    let mut t = Table::new([
        ("check", "name"),
        ("passed", "bool"),
        ("value", "check-specific"),
        ("tolerance", "check-specific"),
        ("detail", "text"),
    ]);
    for ch in checks {
        t.push(vec![
            ch.name.to_string(),
            ch.passed.to_string(),
            num(ch.value),
            num(ch.tolerance),
            ch.detail.replace(',', ";"),
        ]);
    }
    t.note("failed", checks.iter().filter(|c| !c.passed).count().to_string());
    t
}
