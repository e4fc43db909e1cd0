//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::time::Instant;

use oneway::analysis::{analytic_eigensystem, transition_elements, verify_against_numeric};
use oneway::dynamics::{evolve, first_crossing, steady_state, IntegratorConfig, Method, SteadyState, Trajectory};
use oneway::hilbert::{basis_state, partial_trace, FockCutoff};
use oneway::linalg::{re, ComplexMatrix, C64, I};
use oneway::model::{build_four_qubit, build_two_qubit, closed_qubit_hamiltonian, ModelParams};
use oneway::observables::{expectation, transfer_fidelity, ObservableSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const UP: usize = 0;
const DOWN: usize = 1;
const G_GRID: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
const OMEGA_GRID: [f64; 9] = [9.0, 11.0, 13.0, 14.0, 15.0, 16.0, 17.0, 19.0, 21.0];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Trace, positivity and `sum sigma_z` bookkeeping collected from every run.
#[derive(Default)]
struct Conservation {
    trace_error: f64,
    min_eigenvalue: f64,
    sz_drift: f64,
    runs: usize,
}

impl Conservation {
    fn trajectory(&mut self, traj: &Trajectory) {
        let sz = traj.series("sz").expect("sz recorded");
        self.trace_error = self.trace_error.max(traj.max_trace_error);
        self.min_eigenvalue = self.min_eigenvalue.min(traj.min_eigenvalue);
        self.sz_drift = sz.iter().map(|x| (x - sz[0]).abs()).fold(self.sz_drift, f64::max);
        self.runs += 1;
    }

    fn steady(&mut self, rho0: &ComplexMatrix, ss: &SteadyState, sz: &ObservableSpec) {
        self.trace_error = self.trace_error.max((ss.rho.trace() - re(1.0)).norm());
        let min = oneway::dynamics::min_eigenvalue(&ss.rho).expect("hermitian");
        self.min_eigenvalue = self.min_eigenvalue.min(min);
        let drift = (expectation(&ss.rho, sz).unwrap() - expectation(rho0, sz).unwrap()).abs();
        self.sz_drift = self.sz_drift.max(drift);
        self.runs += 1;
    }
}

struct Run {
    steady: SteadyState,
    value: f64,
}

fn two_qubit(g: f64, n_max: usize) -> ModelParams {
    ModelParams { g, cutoff: FockCutoff(n_max), ..ModelParams::two_qubit_baseline() }
}

fn four_qubit(g: f64, n_max: usize) -> ModelParams {
    ModelParams { g, cutoff: FockCutoff(n_max), ..ModelParams::four_qubit_baseline() }
}

fn energy_initial(params: &ModelParams) -> ComplexMatrix {
    let layout = oneway::hilbert::SpaceLayout::qubits_with_cavity(2, params.cutoff).unwrap();
    ComplexMatrix::projector(&basis_state(&layout, &[UP, DOWN, 0]).unwrap())
}

fn steady_pe2(params: &ModelParams, cons: &mut Conservation) -> Run {
    let sys = build_two_qubit(params).unwrap();
    let rho0 = energy_initial(params);
    let steady = steady_state(&sys.hamiltonian, &sys.collapse, &rho0, &IntegratorConfig::default()).unwrap();
    let sz = ObservableSpec::new("sz", sys.total_excitation()).unwrap();
    cons.steady(&rho0, &steady, &sz);
    let pe2 = ObservableSpec::excitation(&sys.layout, 1).unwrap();
    Run { value: expectation(&steady.rho, &pe2).unwrap(), steady }
}

fn logical_initial(params: &ModelParams, alpha: C64, beta: C64) -> ComplexMatrix {
    let layout = oneway::hilbert::SpaceLayout::qubits_with_cavity(4, params.cutoff).unwrap();
    let a = basis_state(&layout, &[UP, DOWN, DOWN, DOWN, 0]).unwrap();
    let b = basis_state(&layout, &[DOWN, DOWN, UP, DOWN, 0]).unwrap();
    ComplexMatrix::projector(&(&a.scale(alpha) + &b.scale(beta)))
}

fn steady_fidelity(params: &ModelParams, alpha: C64, beta: C64, cons: &mut Conservation) -> Run {
    let sys = build_four_qubit(params).unwrap();
    let rho0 = logical_initial(params, alpha, beta);
    let steady = steady_state(&sys.hamiltonian, &sys.collapse, &rho0, &IntegratorConfig::default()).unwrap();
    let sz = ObservableSpec::new("sz", sys.total_excitation()).unwrap();
    cons.steady(&rho0, &steady, &sz);
    Run { value: transfer_fidelity(&sys.layout, &steady.rho, alpha, beta).unwrap(), steady }
}

fn bell() -> (C64, C64) {
    (re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2))
}

fn criterion_1(cons: &mut Conservation) -> Outcome {
    let start = Instant::now();
    let run = steady_pe2(&two_qubit(1.0, 6), cons);
    let elapsed = start.elapsed().as_secs_f64();

    // transient record over the transfer for the conservation suite
    let p = two_qubit(1.0, 6);
    let sys = build_two_qubit(&p).unwrap();
    let sz = ObservableSpec::new("sz", sys.total_excitation()).unwrap();
    let traj = evolve(&sys.hamiltonian, &sys.collapse, &energy_initial(&p), 20.0, &IntegratorConfig::default(), &[sz]).unwrap();
    cons.trajectory(&traj);

    outcome(
        run.value >= 0.99 && run.steady.residual < 1e-9 && run.steady.converged && elapsed < 10.0,
        format!("steady P_e2 = {:.6}, residual = {:.2e}, t = {:.1}, runtime {:.2} s", run.value, run.steady.residual, run.steady.t_reached, elapsed),
    )
}

/// `exp(-iHt) rho exp(iHt)` for Hermitian `H`.
fn unitary(h: &ComplexMatrix, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let u = h.expm(-I * t).unwrap();
    u.matmul(rho).unwrap().matmul(&u.adjoint()).unwrap()
}

fn criterion_2(cons: &mut Conservation) -> Outcome {
    let p = ModelParams { couplings: vec![2.0, 2.0], ..two_qubit(1.0, 6) };
    let sys = build_two_qubit(&p).unwrap();
    let rho0 = energy_initial(&p);
    let cfg = IntegratorConfig { keep_states: true, record_stride: 0.1, ..IntegratorConfig::default() };
    let sz = ObservableSpec::new("sz", sys.total_excitation()).unwrap();
    let traj = evolve(&sys.hamiltonian, &sys.collapse, &rho0, 20.0, &cfg, &[sz]).unwrap();
    cons.trajectory(&traj);

    let (h_q, q_layout) = closed_qubit_hamiltonian(&p).unwrap();
    let rho_q0 = ComplexMatrix::projector(&basis_state(&q_layout, &[UP, DOWN]).unwrap());
    let mut worst: f64 = 0.0;
    for (t, rho) in traj.times.iter().zip(traj.states.as_ref().unwrap()) {
        let reduced = partial_trace(&sys.layout, rho, &[0, 1]).unwrap();
        worst = worst.max(reduced.max_abs_diff(&unitary(&h_q, &rho_q0, *t)));
    }
    outcome(worst < 1e-6, format!("max |rho_q - U rho_q U^dagger| = {worst:.2e} over t in [0, 20]"))
}

fn criterion_3() -> Outcome {
    let mut t_half = Vec::new();
    for &w in &OMEGA_GRID {
        let p = ModelParams { omega_c: w, ..two_qubit(1.0, 6) };
        let sys = build_two_qubit(&p).unwrap();
        let pe2 = ObservableSpec::excitation(&sys.layout, 1).unwrap();
        let t = first_crossing(&sys.hamiltonian, &sys.collapse, &energy_initial(&p), &pe2, 0.5, 0.01, 1e4).unwrap();
        t_half.push(t.unwrap_or(f64::INFINITY));
    }
    let splitting = 229f64.sqrt();
    let nearest = (0..OMEGA_GRID.len())
        .min_by(|&a, &b| (OMEGA_GRID[a] - splitting).abs().total_cmp(&(OMEGA_GRID[b] - splitting).abs()))
        .unwrap();
    let fastest = (0..t_half.len()).min_by(|&a, &b| t_half[a].total_cmp(&t_half[b])).unwrap();
    let left = t_half[..=nearest].windows(2).all(|w| w[0] > w[1]);
    let right = t_half[nearest..].windows(2).all(|w| w[0] < w[1]);
    let listing: Vec<String> = OMEGA_GRID.iter().zip(&t_half).map(|(w, t)| format!("{w}:{t:.2}")).collect();
    outcome(
        fastest == nearest && left && right,
        format!("t_half by omega_c {{{}}}, fastest at {}", listing.join(" "), OMEGA_GRID[fastest]),
    )
}

fn criterion_4(cons: &mut Conservation) -> Outcome {
    let mut values = Vec::new();
    let mut worst: f64 = 0.0;
    for &g in &G_GRID {
        let p = two_qubit(g, 6);
        let v = steady_pe2(&p, cons).value;
        let predicted = analytic_eigensystem(&p).unwrap().transfer_prediction();
        worst = worst.max((v - predicted).abs());
        values.push(v);
    }
    let decreasing = values.windows(2).all(|w| w[0] > w[1]);
    outcome(
        decreasing && worst < 0.005,
        format!("steady P_e2 {values:.6?} over g {G_GRID:?}; max |P - cos^2(theta/2)| = {worst:.4}"),
    )
}

fn criterion_5(cons: &mut Conservation) -> (Outcome, Vec<f64>) {
    let (alpha, beta) = bell();
    let start = Instant::now();
    let infidelity: Vec<f64> = G_GRID.iter().map(|&g| 1.0 - steady_fidelity(&four_qubit(g, 6), alpha, beta, cons).value).collect();
    let elapsed = start.elapsed().as_secs_f64();

    let p = four_qubit(0.25, 6);
    let sys = build_four_qubit(&p).unwrap();
    let sz = ObservableSpec::new("sz", sys.total_excitation()).unwrap();
    let rho0 = logical_initial(&p, alpha, beta);
    // short adaptive run plus a long one with the exact propagator
    let rk = IntegratorConfig { record_stride: 0.1, ..IntegratorConfig::default() };
    cons.trajectory(&evolve(&sys.hamiltonian, &sys.collapse, &rho0, 0.5, &rk, std::slice::from_ref(&sz)).unwrap());
    let exact = IntegratorConfig { method: Method::Propagator, record_stride: 0.5, ..IntegratorConfig::default() };
    cons.trajectory(&evolve(&sys.hamiltonian, &sys.collapse, &rho0, 200.0, &exact, &[sz]).unwrap());

    let increasing_with_g = infidelity.windows(2).all(|w| w[0] < w[1]);
    (
        outcome(
            infidelity[0] < 0.01 && increasing_with_g && elapsed < 60.0,
            format!("1 - F {infidelity:.6?} over g {G_GRID:?}; runtime {elapsed:.2} s"),
        ),
        infidelity,
    )
}

fn criterion_6(cons: &mut Conservation, bell_infidelity: f64) -> Outcome {
    let s = FRAC_1_SQRT_2;
    let cases = [(1.0, 0.0), (0.0, 1.0), (s, s), (s, -s), (0.3f64.sqrt(), 0.7f64.sqrt())];
    let bell_f = 1.0 - bell_infidelity;
    let mut worst: f64 = 0.0;
    let mut listing = Vec::new();
    for (a, b) in cases {
        let f = steady_fidelity(&four_qubit(0.25, 6), re(a), re(b), cons).value;
        worst = worst.max((f - bell_f).abs());
        listing.push(format!("({a:.3},{b:.3}):{f:.6}"));
    }
    outcome(worst < 0.005, format!("F {} vs Bell {bell_f:.6}; max deviation {worst:.2e}", listing.join(" ")))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut m34: f64 = 0.0;
    let mut m23: f64 = 0.0;
    for _ in 0..100 {
        let p = ModelParams {
            detunings: vec![rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)],
            g: rng.random_range(0.05..5.0),
            couplings: vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
            ..ModelParams::two_qubit_baseline()
        };
        let eig = analytic_eigensystem(&p).unwrap();
        let t = transition_elements(&p).unwrap();
        m34 = m34.max(t.m34.abs());
        m23 = m23.max((t.m23 - TAU * eig.sin_theta() * (p.couplings[0] - p.couplings[1])).abs());
    }
    outcome(m34 < 1e-14 && m23 < 1e-12, format!("100 draws: max |m34| = {m34:.1e}, max |m23 - sin(theta)(J1 - J2)| = {m23:.1e}"))
}

fn criterion_8(cons: &Conservation) -> Outcome {
    outcome(
        cons.trace_error < 1e-7 && cons.min_eigenvalue > -1e-6 && cons.sz_drift < 1e-7,
        format!(
            "{} runs: max |Tr rho - 1| = {:.1e}, min eigenvalue = {:.1e}, sum sigma_z drift = {:.1e}",
            cons.runs, cons.trace_error, cons.min_eigenvalue, cons.sz_drift
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut points = 0;
    let grid: Vec<f64> = (0..12).map(|k| 0.1 + 19.9 * k as f64 / 11.0).collect();
    let random: Vec<(f64, f64)> = (0..100).map(|_| (rng.random_range(-20.0..20.0), rng.random_range(0.01..20.0))).collect();
    let pairs = grid.iter().flat_map(|&d| grid.iter().map(move |&g| (d, g))).chain(random);
    for (delta, g) in pairs {
        let p = ModelParams { detunings: vec![delta, 0.0], g, ..ModelParams::two_qubit_baseline() };
        let eig = analytic_eigensystem(&p).unwrap();
        worst = worst.max(verify_against_numeric(&p, &eig).unwrap().max());
        points += 1;
    }
    outcome(worst < 1e-10, format!("{points} (delta, g) points: max deviation {worst:.1e}"))
}

fn criterion_10(cons: &mut Conservation, infidelity_6: &[f64]) -> Outcome {
    let pe2_6 = steady_pe2(&two_qubit(1.0, 6), cons).value;
    let pe2_8 = steady_pe2(&two_qubit(1.0, 8), cons).value;
    let (alpha, beta) = bell();
    let mut shift_5: f64 = 0.0;
    for (&g, inf6) in G_GRID.iter().zip(infidelity_6) {
        let inf8 = 1.0 - steady_fidelity(&four_qubit(g, 8), alpha, beta, cons).value;
        shift_5 = shift_5.max((inf8 - inf6).abs());
    }
    let shift_1 = (pe2_8 - pe2_6).abs();
    outcome(shift_1 < 1e-6 && shift_5 < 1e-6, format!("n_max 6 -> 8: |dP_e2| = {shift_1:.1e}, max |dF| = {shift_5:.1e}"))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn main() {
    let mut cons = Conservation { min_eigenvalue: f64::INFINITY, ..Conservation::default() };
    let mut results: Vec<(&str, Outcome, f64)> = Vec::new();
    let (o, t) = timed(|| criterion_1(&mut cons));
    results.push(("1 baseline energy transfer", o, t));
    let (o, t) = timed(|| criterion_2(&mut cons));
    results.push(("2 uniform coupling is invisible", o, t));
    let (o, t) = timed(criterion_3);
    results.push(("3 resonance ordering", o, t));
    let (o, t) = timed(|| criterion_4(&mut cons));
    results.push(("4 g dependence vs dressed-state prediction", o, t));
    let ((o, infidelity), t) = timed(|| criterion_5(&mut cons));
    results.push(("5 four-qubit state transfer", o, t));
    let (o, t) = timed(|| criterion_6(&mut cons, infidelity[0]));
    results.push(("6 arbitrary logical states", o, t));
    let (o, t) = timed(criterion_7);
    results.push(("7 selection rules", o, t));
    let (o, t) = timed(criterion_9);
    results.push(("9 analytic vs numeric eigensystem", o, t));
    let (o, t) = timed(|| criterion_10(&mut cons, &infidelity));
    results.push(("10 truncation convergence", o, t));
    // last, so it covers every run above
    results.push(("8 conservation suite", criterion_8(&cons), 0.0));
    results.sort_by_key(|(name, _, _)| name.split(' ').next().unwrap().parse::<u32>().unwrap());

    let mut failed = 0;
    for (name, o, t) in &results {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {} [{t:.1} s]", o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
