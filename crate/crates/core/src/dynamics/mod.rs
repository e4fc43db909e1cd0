//! Lindblad time evolution and steady states.
//!
//! Two routes integrate the master equation:
//!
//! * [`Method::Adaptive`]: a Dormand-Prince 5(4) pair acting on the dense
//!   density matrix, with local error control.
//! * [`Method::Propagator`]: exact exponential propagation. The basis splits
//!   into components that neither the Hamiltonian nor the collapse operator
//!   connect; each occupied block of `rho` then evolves under its own small
//!   superoperator, whose exponential is formed once and reused.
//!
//! The steady state is found with the propagator by repeated squaring until
//! the Lindblad right-hand side vanishes to tolerance.

mod adaptive;
mod propagator;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I};
use crate::observables::{expectation, ObservableSpec};

pub use propagator::SectorPropagator;

/// Integrity thresholds checked at every recorded point.
pub const TRACE_TOL: f64 = 1e-7;
pub const HERMITICITY_TOL: f64 = 1e-7;
pub const MIN_EIGENVALUE: f64 = -1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Adaptive,
    Propagator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Spacing of recorded points.
    pub record_stride: f64,
    pub keep_states: bool,
    /// Steady-state residual threshold on `max |d rho / dt|`.
    pub ss_tol: f64,
    /// Give up on the steady state beyond this time.
    pub horizon: f64,
    /// First propagator step of the steady-state search; doubled each round.
    pub ss_first_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Adaptive,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: 0.05,
            record_stride: 0.05,
            keep_states: false,
            ss_tol: 1e-9,
            horizon: 1e4,
            ss_first_step: 0.5,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("record_stride", self.record_stride),
            ("ss_tol", self.ss_tol),
            ("horizon", self.horizon),
            ("ss_first_step", self.ss_first_step),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Params(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

/// `H`, `L` and the effective non-Hermitian `K = H - (i/2) L^dagger L`.
#[derive(Clone, Debug)]
pub struct Lindbladian {
    pub(crate) hamiltonian: ComplexMatrix,
    pub(crate) collapse: ComplexMatrix,
    collapse_dag: ComplexMatrix,
    effective: ComplexMatrix,
}

impl Lindbladian {
    pub fn new(hamiltonian: &ComplexMatrix, collapse: &ComplexMatrix) -> Result<Self> {
        let d = hamiltonian.rows();
        if !hamiltonian.is_square() || !collapse.is_square() || collapse.rows() != d {
            return Err(Error::Shape(format!(
                "H {}x{}, L {}x{}",
                hamiltonian.rows(),
                hamiltonian.cols(),
                collapse.rows(),
                collapse.cols()
            )));
        }
        let deviation = hamiltonian.hermiticity_error();
        if deviation > crate::linalg::HERMITIAN_TOL * hamiltonian.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        let collapse_dag = collapse.adjoint();
        let loss = collapse_dag.matmul(collapse)?;
        let effective = hamiltonian - &loss.scale(I * 0.5);
        Ok(Self { hamiltonian: hamiltonian.clone(), collapse: collapse.clone(), collapse_dag, effective })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    /// `-i(K rho - rho K^dagger) + L rho L^dagger`, relying on `rho` being
    /// Hermitian so that `rho K^dagger = (K rho)^dagger`.
    pub(crate) fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let k_rho = &self.effective * rho;
        let coherent = (&k_rho - &k_rho.adjoint()).scale(-I);
        let jump = &(&self.collapse * rho) * &self.collapse_dag;
        &coherent + &jump
    }

    pub(crate) fn effective(&self) -> &ComplexMatrix {
        &self.effective
    }
}

/// `d rho / dt = -i[H, rho] - (1/2)(L^dagger L rho + rho L^dagger L - 2 L rho L^dagger)`.
pub fn lindblad_rhs(hamiltonian: &ComplexMatrix, collapse: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lind = Lindbladian::new(hamiltonian, collapse)?;
    check_shape(&lind, rho)?;
    let deviation = rho.hermiticity_error();
    if deviation > 1e-8 {
        return Err(Error::InvalidState(format!("rho not Hermitian ({deviation:.3e})")));
    }
    Ok(lind.apply(rho))
}

fn check_shape(lind: &Lindbladian, rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() || rho.rows() != lind.dim() {
        return Err(Error::Shape(format!("rho {}x{} for generator of dim {}", rho.rows(), rho.cols(), lind.dim())));
    }
    Ok(())
}

/// Unit trace, Hermitian, eigenvalues above `-1e-10`.
pub fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::InvalidState("rho is not square".into()));
    }
    if !rho.is_finite() {
        return Err(Error::InvalidState("rho has non-finite entries".into()));
    }
    let herm = rho.hermiticity_error();
    if herm > 1e-10 {
        return Err(Error::InvalidState(format!("rho not Hermitian ({herm:.3e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::InvalidState(format!("trace {tr}")));
    }
    let min = min_eigenvalue(rho)?;
    if min < -1e-10 {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Smallest eigenvalue of a Hermitian matrix, decomposing only the rows and
/// columns that carry nonzero entries.
pub fn min_eigenvalue(rho: &ComplexMatrix) -> Result<f64> {
    let n = rho.rows();
    let support: Vec<usize> = (0..n).filter(|&i| (0..n).any(|j| rho.get(i, j) != crate::linalg::ZERO)).collect();
    if support.is_empty() {
        return Ok(0.0);
    }
    let sub = rho.select(&support, &support).hermitian_part();
    let smallest = sub.eigh()?.values[0];
    Ok(if support.len() < n { smallest.min(0.0) } else { smallest })
}

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

/// Recorded output of one run.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Option<Vec<ComplexMatrix>>,
    pub records: Vec<Series>,
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    /// Final state, always kept.
    pub final_state: Option<ComplexMatrix>,
}

impl Trajectory {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.records.iter().find(|s| s.name == name).map(|s| s.values.as_slice())
    }

    fn new(observables: &[ObservableSpec], keep_states: bool) -> Self {
        Self {
            records: observables.iter().map(|o| Series { name: o.name().to_string(), values: Vec::new() }).collect(),
            states: keep_states.then(Vec::new),
            min_eigenvalue: f64::INFINITY,
            ..Default::default()
        }
    }

    fn record(&mut self, t: f64, rho: &ComplexMatrix, observables: &[ObservableSpec]) -> Result<()> {
        let trace_error = (rho.trace() - crate::linalg::ONE).norm();
        let herm = rho.hermiticity_error();
        if !rho.is_finite() {
            return Err(Error::Integrity { t, reason: "non-finite entries".into() });
        }
        if trace_error > TRACE_TOL {
            return Err(Error::Integrity { t, reason: format!("trace error {trace_error:.3e}") });
        }
        if herm > HERMITICITY_TOL {
            return Err(Error::Integrity { t, reason: format!("hermiticity error {herm:.3e}") });
        }
        let min = min_eigenvalue(rho)?;
        if min < MIN_EIGENVALUE {
            return Err(Error::Integrity { t, reason: format!("eigenvalue {min:.3e}") });
        }
        self.max_trace_error = self.max_trace_error.max(trace_error);
        self.max_hermiticity_error = self.max_hermiticity_error.max(herm);
        self.min_eigenvalue = self.min_eigenvalue.min(min);
        self.times.push(t);
        for (series, obs) in self.records.iter_mut().zip(observables) {
            series.values.push(expectation(rho, obs)?);
        }
        if let Some(states) = self.states.as_mut() {
            states.push(rho.clone());
        }
        Ok(())
    }
}

/// Recording grid `0, stride, 2 stride, ..., t_final`.
pub(crate) fn record_grid(t_final: f64, stride: f64) -> Vec<f64> {
    let n = (t_final / stride).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| k as f64 * stride).collect();
    if t_final - grid[n] > 1e-9 * stride {
        grid.push(t_final);
    }
    grid
}

/// Integrate from `rho0` to `t_final`, recording the observables on a grid of
/// spacing `cfg.record_stride`.
pub fn evolve(
    hamiltonian: &ComplexMatrix,
    collapse: &ComplexMatrix,
    rho0: &ComplexMatrix,
    t_final: f64,
    cfg: &IntegratorConfig,
    observables: &[ObservableSpec],
) -> Result<Trajectory> {
    cfg.validate()?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::Params(format!("t_final must be non-negative, got {t_final}")));
    }
    let lind = Lindbladian::new(hamiltonian, collapse)?;
    check_shape(&lind, rho0)?;
    validate_density(rho0)?;
    let grid = record_grid(t_final, cfg.record_stride);
    let mut traj = Trajectory::new(observables, cfg.keep_states);
    let last = match cfg.method {
        Method::Adaptive => adaptive::integrate(&lind, rho0, &grid, cfg, |t, rho| traj.record(t, rho, observables))?,
        Method::Propagator => {
            let mut prop = SectorPropagator::new(&lind, rho0, cfg.record_stride)?;
            let mut rho = rho0.clone();
            traj.record(0.0, &rho, observables)?;
            for w in grid.windows(2) {
                let dt = w[1] - w[0];
                if (dt - prop.step()).abs() > 1e-12 * dt {
                    prop = SectorPropagator::new(&lind, rho0, dt)?;
                }
                rho = prop.apply(&rho);
                traj.record(w[1], &rho, observables)?;
            }
            rho
        }
    };
    traj.final_state = Some(last);
    Ok(traj)
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: ComplexMatrix,
    pub t_reached: f64,
    /// `max |d rho / dt|` at `t_reached`.
    pub residual: f64,
    pub converged: bool,
}

/// Evolve until the right-hand side drops below `cfg.ss_tol` or the time
/// exceeds `cfg.horizon`. The result depends on `rho0`: every conserved
/// sector keeps its initial weight.
pub fn steady_state(
    hamiltonian: &ComplexMatrix,
    collapse: &ComplexMatrix,
    rho0: &ComplexMatrix,
    cfg: &IntegratorConfig,
) -> Result<SteadyState> {
    cfg.validate()?;
    let lind = Lindbladian::new(hamiltonian, collapse)?;
    check_shape(&lind, rho0)?;
    validate_density(rho0)?;
    let mut prop = SectorPropagator::new(&lind, rho0, cfg.ss_first_step)?;
    steady_state_with(&lind, &mut prop, rho0, cfg)
}

/// Steady-state search reusing an already built propagator; every `rho0`
/// must live in the blocks the propagator was built for.
pub(crate) fn steady_state_with(
    lind: &Lindbladian,
    prop: &mut SectorPropagator,
    rho0: &ComplexMatrix,
    cfg: &IntegratorConfig,
) -> Result<SteadyState> {
    let mut rho = rho0.clone();
    let mut t = 0.0;
    let mut residual = lind.apply(&rho).max_abs();
    while residual >= cfg.ss_tol && t < cfg.horizon {
        rho = prop.apply(&rho);
        t += prop.step();
        residual = lind.apply(&rho).max_abs();
        if !rho.is_finite() {
            return Err(Error::Integration { t, reason: "non-finite state in steady-state search".into() });
        }
        if residual >= cfg.ss_tol && t < cfg.horizon {
            prop.square();
        }
    }
    let trace_error = (rho.trace() - crate::linalg::ONE).norm();
    if trace_error > TRACE_TOL {
        return Err(Error::Integrity { t, reason: format!("trace error {trace_error:.3e}") });
    }
    Ok(SteadyState { rho, t_reached: t, residual, converged: residual < cfg.ss_tol })
}

/// First time the observable reaches `threshold`, stepping the exact
/// propagator with spacing `stride` and interpolating linearly between the
/// bracketing points. `None` if not reached by `t_max`.
pub fn first_crossing(
    hamiltonian: &ComplexMatrix,
    collapse: &ComplexMatrix,
    rho0: &ComplexMatrix,
    observable: &ObservableSpec,
    threshold: f64,
    stride: f64,
    t_max: f64,
) -> Result<Option<f64>> {
    let lind = Lindbladian::new(hamiltonian, collapse)?;
    check_shape(&lind, rho0)?;
    validate_density(rho0)?;
    let prop = SectorPropagator::new(&lind, rho0, stride)?;
    let mut rho = rho0.clone();
    let mut prev = expectation(&rho, observable)?;
    if prev >= threshold {
        return Ok(Some(0.0));
    }
    let mut t = 0.0;
    while t < t_max {
        rho = prop.apply(&rho);
        let value = expectation(&rho, observable)?;
        if value >= threshold {
            let frac = (threshold - prev) / (value - prev);
            return Ok(Some(t + frac * stride));
        }
        prev = value;
        t += stride;
    }
    Ok(None)
}
