//! Browser bindings: a transfer curve, a dressed-state report and the
//! steady-state g scan. The `*_impl` functions carry the logic so they can
//! be tested natively.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use oneway::analysis::{analytic_eigensystem, resonance_detuning, transition_elements, verify_against_numeric};
use oneway::dynamics::{evolve, steady_state, IntegratorConfig, Method};
use oneway::hilbert::{basis_state, FockCutoff};
use oneway::linalg::ComplexMatrix;
use oneway::model::{build_two_qubit, ModelParams};
use oneway::observables::{expectation, ObservableSpec};
use wasm_bindgen::prelude::*;

/// Photon cutoff used in the page; the mean photon number stays well below 0.1.
const N_MAX: usize = 4;

fn params(delta: f64, g: f64, omega_c: f64, j1: f64, j2: f64, kappa: f64) -> Result<ModelParams, String> {
    let p = ModelParams {
        detunings: vec![delta, 0.0],
        g,
        omega_c,
        couplings: vec![j1, j2],
        kappa,
        cutoff: FockCutoff(N_MAX),
        paired: false,
    };
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

fn initial(p: &ModelParams) -> Result<ComplexMatrix, String> {
    let layout = oneway::hilbert::SpaceLayout::qubits_with_cavity(2, p.cutoff).map_err(|e| e.to_string())?;
    Ok(ComplexMatrix::projector(&basis_state(&layout, &[0, 1, 0]).map_err(|e| e.to_string())?))
}

/// `[t..., pe1..., pe2...]`, each block `points` long.
pub fn transfer_curve_impl(p: &ModelParams, t_final: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 || t_final.is_nan() || t_final <= 0.0 {
        return Err("need t_final > 0 and at least two points".into());
    }
    let sys = build_two_qubit(p).map_err(|e| e.to_string())?;
    let obs = [
        ObservableSpec::excitation(&sys.layout, 0).map_err(|e| e.to_string())?,
        ObservableSpec::excitation(&sys.layout, 1).map_err(|e| e.to_string())?,
    ];
    let cfg = IntegratorConfig {
        method: Method::Propagator,
        record_stride: t_final / (points - 1) as f64,
        ..IntegratorConfig::default()
    };
    let traj = evolve(&sys.hamiltonian, &sys.collapse, &initial(p)?, t_final, &cfg, &obs).map_err(|e| e.to_string())?;
    let mut out = traj.times.clone();
    out.truncate(points);
    for s in &traj.records {
        out.extend(s.values.iter().take(points));
    }
    Ok(out)
}

pub fn dressed_report_impl(p: &ModelParams) -> Result<String, String> {
    let eig = analytic_eigensystem(p).map_err(|e| e.to_string())?;
    let check = verify_against_numeric(p, &eig).map_err(|e| e.to_string())?;
    let m = transition_elements(p).map_err(|e| e.to_string())?;
    let mut s = String::new();
    let _ = writeln!(s, "theta = {:.6} rad (cos {:.6}, sin {:.6})", eig.theta, eig.cos_theta(), eig.sin_theta());
    for (k, e) in eig.energies.iter().enumerate() {
        let v: Vec<String> = (0..4).map(|i| format!("{:+.5}", eig.vectors[k].get(i, 0).re)).collect();
        let _ = writeln!(s, "E{} = {:+.6}   [{}]", k + 1, e / TAU, v.join(", "));
    }
    let _ = writeln!(s, "m12 = {:.3e}   m23 = {:.6}   m34 = {:.3e}", m.m12 / TAU, m.m23 / TAU, m.m34 / TAU);
    let _ = writeln!(s, "dressed splitting = {:.6}, cavity mismatch = {:.6}", eig.dressed_splitting(), resonance_detuning(p).map_err(|e| e.to_string())?);
    let _ = writeln!(s, "predicted steady P_e2 = cos^2(theta/2) = {:.6}", eig.transfer_prediction());
    let _ = writeln!(s, "numeric check: energies {:.1e}, vectors {:.1e}", check.energy_deviation, check.vector_deviation);
    Ok(s)
}

/// `[steady pe2, cos^2(theta/2)]` per coupling in `gs`, flattened.
pub fn steady_scan_impl(base: &ModelParams, gs: &[f64]) -> Result<Vec<f64>, String> {
    let mut out = Vec::with_capacity(2 * gs.len());
    for &g in gs {
        let p = ModelParams { g, ..base.clone() };
        let sys = build_two_qubit(&p).map_err(|e| e.to_string())?;
        let ss = steady_state(&sys.hamiltonian, &sys.collapse, &initial(&p)?, &IntegratorConfig::default()).map_err(|e| e.to_string())?;
        let pe2 = ObservableSpec::excitation(&sys.layout, 1).map_err(|e| e.to_string())?;
        out.push(if ss.converged { expectation(&ss.rho, &pe2).map_err(|e| e.to_string())? } else { f64::NAN });
        out.push(analytic_eigensystem(&p).map_or(f64::NAN, |e| e.transfer_prediction()));
    }
    Ok(out)
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn transfer_curve(delta: f64, g: f64, omega_c: f64, j1: f64, j2: f64, kappa: f64, t_final: f64, points: usize) -> Result<Vec<f64>, JsError> {
    transfer_curve_impl(&params(delta, g, omega_c, j1, j2, kappa).map_err(js)?, t_final, points).map_err(js)
}

#[wasm_bindgen]
pub fn dressed_report(delta: f64, g: f64, omega_c: f64, j1: f64, j2: f64, kappa: f64) -> Result<String, JsError> {
    dressed_report_impl(&params(delta, g, omega_c, j1, j2, kappa).map_err(js)?).map_err(js)
}

#[wasm_bindgen]
pub fn steady_scan(delta: f64, omega_c: f64, j1: f64, j2: f64, kappa: f64, gs: Vec<f64>) -> Result<Vec<f64>, JsError> {
    steady_scan_impl(&params(delta, 1.0, omega_c, j1, j2, kappa).map_err(js)?, &gs).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> ModelParams {
        params(15.0, 1.0, 15.0, 2.0, 1.0, 3.0).unwrap()
    }

    #[test]
    fn curve_layout_and_endpoints() {
        let out = transfer_curve_impl(&baseline(), 60.0, 61).unwrap();
        assert_eq!(out.len(), 3 * 61);
        assert_eq!(out[0], 0.0);
        assert!((out[60] - 60.0).abs() < 1e-9);
        assert_eq!(out[61], 1.0);
        assert_eq!(out[122], 0.0);
        assert!(out[3 * 61 - 1] > 0.98);
    }

    #[test]
    fn report_mentions_selection_rule() {
        let text = dressed_report_impl(&baseline()).unwrap();
        assert!(text.contains("m34 = 0.000e0"), "{text}");
        assert!(text.contains("E2 = +7.566373"));
        assert!(text.contains("0.995614"));
    }

    #[test]
    fn scan_tracks_prediction() {
        let out = steady_scan_impl(&baseline(), &[0.5, 2.0]).unwrap();
        assert!(out[0] > out[2]);
        assert!((out[0] - out[1]).abs() < 0.005);
        assert!((out[2] - out[3]).abs() < 0.005);
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(params(15.0, 1.0, 15.0, 2.0, 1.0, -1.0).is_err());
        assert!(transfer_curve_impl(&baseline(), 0.0, 10).is_err());
        let degenerate = params(0.0, 0.0, 15.0, 2.0, 1.0, 3.0).unwrap();
        assert!(dressed_report_impl(&degenerate).is_err());
    }
}
