//! Experiment runners behind the `energy`, `state`, `eigen` and `sweep`
//! subcommands. Each returns its table plus the raw numbers for callers that
//! want them.

use std::f64::consts::TAU;

use rayon::prelude::*;

use super::config::{InitialState, Resolved};
use super::output::{num, opt, Table};
use crate::analysis::{analytic_eigensystem, resonance_detuning, transition_elements, verify_against_numeric};
use crate::dynamics::{evolve, first_crossing, steady_state, IntegratorConfig, SteadyState, Trajectory};
use crate::error::{Error, Result};
use crate::hilbert::basis_state;
use crate::linalg::{ComplexMatrix, C64};
use crate::model::{build_four_qubit, build_two_qubit, CavitySystem, ModelParams};
use crate::observables::{
    expectation, logical_observables, phase_optimized_fidelity, transfer_fidelity, transfer_observable, ObservableSpec,
};

/// Model plus initial density matrix.
pub struct Prepared {
    pub system: CavitySystem,
    pub rho0: ComplexMatrix,
}

pub fn build(params: &ModelParams) -> Result<CavitySystem> {
    match params.n_qubits() {
        2 => build_two_qubit(params),
        _ => build_four_qubit(params),
    }
}

pub fn prepare(params: &ModelParams, initial: &InitialState) -> Result<Prepared> {
    let system = build(params)?;
    let n = system.layout.total_dim();
    let mut ket = ComplexMatrix::zeros(n, 1);
    for (mut labels, amp) in initial.components() {
        if labels.len() != params.n_qubits() {
            return Err(Error::Params(format!("{} initial labels for {} qubits", labels.len(), params.n_qubits())));
        }
        labels.push(0);
        ket += &basis_state(&system.layout, &labels)?.scale(amp);
    }
    Ok(Prepared { rho0: ComplexMatrix::projector(&ket), system })
}

fn logical_amplitudes(initial: &InitialState) -> Result<(C64, C64)> {
    match initial {
        InitialState::Logical { alpha, beta } => Ok((*alpha, *beta)),
        InitialState::Labels(_) => Err(Error::Params("state transfer needs alpha/beta amplitudes".into())),
    }
}

/// Largest `|x - x[0]|` over a series.
fn drift(values: &[f64]) -> f64 {
    values.first().map_or(0.0, |&x0| values.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max))
}

fn steady_notes(table: &mut Table, steady: &SteadyState) {
    table.note("steady_t_reached", num(steady.t_reached));
    table.note("steady_residual", num(steady.residual));
    table.note("steady_converged", steady.converged.to_string());
}

fn integrity_notes(table: &mut Table, traj: &Trajectory) {
    table.note("max_trace_error", num(traj.max_trace_error));
    table.note("max_hermiticity_error", num(traj.max_hermiticity_error));
    table.note("min_eigenvalue", num(traj.min_eigenvalue));
}

fn trajectory_table(traj: &Trajectory, units: &[(&str, &str)]) -> Table {
    let mut table = Table::new(std::iter::once(("t", "time")).chain(units.iter().copied()));
    for (k, &t) in traj.times.iter().enumerate() {
        let mut row = vec![num(t)];
        row.extend(traj.records.iter().map(|s| num(s.values[k])));
        table.push(row);
    }
    table
}

pub struct EnergyOutcome {
    pub table: Table,
    pub trajectory: Trajectory,
    pub steady: SteadyState,
    pub steady_pe1: f64,
    pub steady_pe2: f64,
    pub t_half: Option<f64>,
}

pub fn run_energy_transfer(r: &Resolved) -> Result<EnergyOutcome> {
    let Prepared { system, rho0 } = prepare(&r.params, &r.initial)?;
    let layout = &system.layout;
    let pe1 = ObservableSpec::excitation(layout, 0)?;
    let pe2 = ObservableSpec::excitation(layout, 1)?;
    let total = ObservableSpec::new("total_excitation", pe1.operator() + pe2.operator())?;
    let observables = [pe1.clone(), pe2.clone(), ObservableSpec::photon_number(layout)?, total];
    let (h, l) = (&system.hamiltonian, &system.collapse);

    let trajectory = evolve(h, l, &rho0, r.t_final, &r.integrator, &observables)?;
    let steady = steady_state(h, l, &rho0, &r.integrator)?;
    let t_half = first_crossing(h, l, &rho0, &pe2, 0.5, r.integrator.record_stride, r.integrator.horizon)?;
    let steady_pe1 = expectation(&steady.rho, &pe1)?;
    let steady_pe2 = expectation(&steady.rho, &pe2)?;

    let mut table = trajectory_table(
        &trajectory,
        &[("pe1", "probability"), ("pe2", "probability"), ("photons", "mean photon number"), ("total_excitation", "excitations")],
    );
    table.note("steady_pe1", num(steady_pe1));
    table.note("steady_pe2", num(steady_pe2));
    steady_notes(&mut table, &steady);
    table.note("t_half_pe2", opt(t_half));
    table.note("total_excitation_drift", num(drift(trajectory.series("total_excitation").unwrap_or(&[]))));
    integrity_notes(&mut table, &trajectory);
    Ok(EnergyOutcome { table, trajectory, steady, steady_pe1, steady_pe2, t_half })
}

pub struct StateOutcome {
    pub table: Table,
    pub trajectory: Trajectory,
    pub steady: SteadyState,
    pub steady_fidelity: f64,
    /// Fidelity after the best fixed relative-phase correction.
    pub steady_fidelity_phase_optimized: f64,
    pub t_half: Option<f64>,
}

pub fn run_state_transfer(r: &Resolved) -> Result<StateOutcome> {
    let (alpha, beta) = logical_amplitudes(&r.initial)?;
    let Prepared { system, rho0 } = prepare(&r.params, &r.initial)?;
    let layout = &system.layout;
    let fidelity = transfer_observable(layout, alpha, beta)?;
    let n = layout.total_dim();
    let infidelity = ObservableSpec::new("infidelity", &ComplexMatrix::identity(n) - fidelity.operator())?;
    let mut observables = vec![infidelity];
    observables.extend(logical_observables(layout, (0, 2), "pair13")?);
    observables.extend(logical_observables(layout, (1, 3), "pair24")?);
    observables.push(ObservableSpec::photon_number(layout)?);
    let (h, l) = (&system.hamiltonian, &system.collapse);

    let trajectory = evolve(h, l, &rho0, r.t_final, &r.integrator, &observables)?;
    let steady = steady_state(h, l, &rho0, &r.integrator)?;
    let t_half = first_crossing(h, l, &rho0, &fidelity, 0.5, r.integrator.record_stride, r.integrator.horizon)?;
    let steady_fidelity = transfer_fidelity(layout, &steady.rho, alpha, beta)?;
    let steady_fidelity_phase_optimized = phase_optimized_fidelity(layout, &steady.rho, alpha, beta)?;

    let mut units = vec![("infidelity", "1 - fidelity")];
    let names: Vec<(String, &str)> = observables[1..]
        .iter()
        .map(|o| {
            let unit = if o.name().contains("coh") {
                "coherence"
            } else if o.name() == "photons" {
                "mean photon number"
            } else {
                "probability"
            };
            (o.name().to_string(), unit)
        })
        .collect();
    units.extend(names.iter().map(|(n, u)| (n.as_str(), *u)));
    let mut table = trajectory_table(&trajectory, &units);
    table.note("alpha", format!("{} + {}i", num(alpha.re), num(alpha.im)));
    table.note("beta", format!("{} + {}i", num(beta.re), num(beta.im)));
    table.note("steady_fidelity", num(steady_fidelity));
    table.note("steady_infidelity", num(1.0 - steady_fidelity));
    table.note("steady_fidelity_phase_optimized", num(steady_fidelity_phase_optimized));
    steady_notes(&mut table, &steady);
    table.note("t_half_fidelity", opt(t_half));
    integrity_notes(&mut table, &trajectory);
    Ok(StateOutcome { table, trajectory, steady, steady_fidelity, steady_fidelity_phase_optimized, t_half })
}

pub fn run_eigen_report(r: &Resolved) -> Result<Table> {
    let p = &r.params;
    let eig = analytic_eigensystem(p)?;
    let check = verify_against_numeric(p, &eig)?;
    let m = transition_elements(p)?;
    let mut table = Table::new([
        ("state", "label"),
        ("energy", "frequency"),
        ("amp_up_up", "amplitude"),
        ("amp_up_down", "amplitude"),
        ("amp_down_up", "amplitude"),
        ("amp_down_down", "amplitude"),
    ]);
    for (k, (e, v)) in eig.energies.iter().zip(&eig.vectors).enumerate() {
        let mut row = vec![format!("E{}", k + 1), num(e / TAU)];
        row.extend((0..4).map(|i| num(v.get(i, 0).re)));
        table.push(row);
    }
    table.note("theta", num(eig.theta));
    table.note("cos_theta", num(eig.cos_theta()));
    table.note("sin_theta", num(eig.sin_theta()));
    table.note("dressed_splitting", num(eig.dressed_splitting()));
    table.note("resonance_detuning", num(resonance_detuning(p)?));
    table.note("m12", num(m.m12 / TAU));
    table.note("m23", num(m.m23 / TAU));
    table.note("m34", num(m.m34 / TAU));
    table.note("predicted_steady_pe2", num(eig.transfer_prediction()));
    table.note("numeric_energy_deviation", num(check.energy_deviation));
    table.note("numeric_vector_deviation", num(check.vector_deviation));
    Ok(table)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub steady_value: f64,
    pub t_half: Option<f64>,
    pub t_reached: f64,
    pub residual: f64,
    pub converged: bool,
}

/// Steady target observable and time-to-half for one parameter set: `pe2`
/// for two qubits, transfer fidelity for four.
pub fn sweep_point(params: &ModelParams, initial: &InitialState, cfg: &IntegratorConfig) -> Result<(f64, Option<f64>, SteadyState)> {
    let Prepared { system, rho0 } = prepare(params, initial)?;
    let observable = match initial {
        InitialState::Logical { alpha, beta } => transfer_observable(&system.layout, *alpha, *beta)?,
        InitialState::Labels(_) => ObservableSpec::excitation(&system.layout, 1)?,
    };
    let (h, l) = (&system.hamiltonian, &system.collapse);
    let steady = steady_state(h, l, &rho0, cfg)?;
    let t_half = first_crossing(h, l, &rho0, &observable, 0.5, cfg.record_stride, cfg.horizon)?;
    Ok((expectation(&steady.rho, &observable)?, t_half, steady))
}

pub struct SweepOutcome {
    pub table: Table,
    pub rows: Vec<std::result::Result<SweepRow, String>>,
}

pub fn run_sweep(r: &Resolved, workers: usize) -> Result<SweepOutcome> {
    let (axis, values) = r.sweep.clone().ok_or_else(|| Error::Params("no sweep axis".into()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Params(format!("worker pool: {e}")))?;
    let rows: Vec<std::result::Result<SweepRow, String>> = pool.install(|| {
        values
            .par_iter()
            .map(|&value| {
                let params = axis.apply(&r.params, value)?;
                let (steady_value, t_half, steady) =
                    sweep_point(&params, &r.initial, &r.integrator).map_err(|e| e.to_string())?;
                Ok(SweepRow {
                    value,
                    steady_value,
                    t_half,
                    t_reached: steady.t_reached,
                    residual: steady.residual,
                    converged: steady.converged,
                })
            })
            .collect()
    });

    let observable = match r.initial {
        InitialState::Logical { .. } => "fidelity",
        InitialState::Labels(_) => "pe2",
    };
    let mut table = Table::new([
        ("sweep_value", "axis value"),
        ("steady_value", "probability"),
        ("t_half", "time"),
        ("t_reached", "time"),
        ("residual", "1 / time"),
        ("converged", "bool"),
    ]);
    table.note("axis", r.config.sweep.as_ref().map_or("", |s| s.axis.as_str()));
    table.note("observable", observable);
    table.note("t_half_threshold", "0.5");
    for (k, row) in rows.iter().enumerate() {
        match row {
            Ok(s) => table.push(vec![
                num(s.value),
                num(s.steady_value),
                opt(s.t_half),
                num(s.t_reached),
                num(s.residual),
                s.converged.to_string(),
            ]),
            Err(msg) => {
                table.note(format!("row_{k}_error"), msg.clone());
                table.push(vec![num(values[k]), "nan".into(), "nan".into(), "nan".into(), "nan".into(), "false".into()]);
            }
        }
    }
    table.note("failed_rows", rows.iter().filter(|r| r.is_err()).count().to_string());
    Ok(SweepOutcome { table, rows })
}
