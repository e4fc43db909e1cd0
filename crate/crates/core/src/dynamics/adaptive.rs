//! Dormand-Prince 5(4) with local error control, stepping exactly onto the
//! recording grid.

use super::{IntegratorConfig, Lindbladian};
use crate::error::{Error, Result};
use crate::linalg::{re, ComplexMatrix};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [&[f64]; 7] = [
    &[],
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

fn combine(y: &ComplexMatrix, h: f64, weights: &[f64], ks: &[ComplexMatrix]) -> ComplexMatrix {
    let mut out = y.clone();
    for (w, k) in weights.iter().zip(ks) {
        if *w != 0.0 {
            out += &k.scale(re(h * w));
        }
    }
    out
}

fn error_norm(err: &ComplexMatrix, y: &ComplexMatrix, y_new: &ComplexMatrix, cfg: &IntegratorConfig) -> f64 {
    let (e, a, b) = (err.to_row_major(), y.to_row_major(), y_new.to_row_major());
    e.iter()
        .zip(a.iter().zip(&b))
        .map(|(e, (a, b))| e.norm() / (cfg.abs_tol + cfg.rel_tol * a.norm().max(b.norm())))
        .fold(0.0, f64::max)
}

/// Integrates across `grid`, calling `on_record` at each grid point
/// (including the first). Returns the state at the last point.
pub(super) fn integrate(
    lind: &Lindbladian,
    rho0: &ComplexMatrix,
    grid: &[f64],
    cfg: &IntegratorConfig,
    mut on_record: impl FnMut(f64, &ComplexMatrix) -> Result<()>,
) -> Result<ComplexMatrix> {
    let mut t = grid[0];
    let mut y = rho0.clone();
    on_record(t, &y)?;
    let mut k_first = lind.apply(&y);
    let mut h_try = cfg.max_step.min(0.01);

    for &target in &grid[1..] {
        while target - t > 1e-12 * target.abs().max(1.0) {
            let h = h_try.min(target - t).min(cfg.max_step);
            if h < 1e-13 * t.abs().max(1.0) {
                return Err(Error::Integration {
                    t,
                    reason: format!("step size underflow (h = {h:.3e}); the problem may be stiff"),
                });
            }
            let mut ks: Vec<ComplexMatrix> = Vec::with_capacity(7);
            ks.push(k_first.clone());
            for stage in 1..7 {
                let y_stage = combine(&y, h, A[stage], &ks);
                debug_assert!(C[stage] > 0.0);
                ks.push(lind.apply(&y_stage));
            }
            // stage 7 evaluates f at the fifth-order solution (FSAL)
            let y_new = combine(&y, h, A[6], &ks[..6]);
            let err = combine(&ComplexMatrix::zeros(y.rows(), y.cols()), h, &E, &ks);
            let norm = error_norm(&err, &y, &y_new, cfg);
            if !norm.is_finite() {
                return Err(Error::Integration { t, reason: "non-finite error estimate".into() });
            }
            let factor = if norm == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if norm <= 1.0 {
                t += h;
                y = y_new;
                k_first = ks.swap_remove(6);
                // a step shortened to land on the grid says nothing about growth
                if h >= h_try || factor < 1.0 {
                    h_try = h * factor;
                }
            } else {
                h_try = h * factor.min(1.0);
            }
        }
        t = target;
        on_record(t, &y)?;
    }
    Ok(y)
}
