//! Adaptive Dormand-Prince 5(4) integration of complex linear or nonlinear
//! systems `dy/dt = f(t, y)`.

use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on a single step (`∞` = only limited by the output grid).
    pub h_max: f64,
    /// Steps below this size abort the integration.
    pub h_min: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-9, atol: 1e-13, h_max: f64::INFINITY, h_min: 1e-12 }
    }
}

// Dormand-Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates from `t_grid[0]` through every grid node, calling
/// `visit(k, t_k, y(t_k))` at each (including the initial node).
pub fn integrate_visit<F, V>(
    mut rhs: F,
    t_grid: &[f64],
    y0: Vec<C64>,
    tol: Tolerances,
    mut visit: V,
) -> Result<()>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    V: FnMut(usize, f64, &[C64]),
{
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("t_grid", "must be strictly increasing"));
    }
    let Some(&t_start) = t_grid.first() else {
        return Ok(());
    };
    let n = y0.len();
    let mut y = y0;
    let mut t = t_start;
    visit(0, t, &y);

    let zero = C64::new(0.0, 0.0);
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];

    rhs(t, &y, &mut k1);
    let mut h = initial_step(&y, &k1, tol, t_grid.get(1).map_or(1.0, |t1| t1 - t_start));

    for (k, &t_target) in t_grid.iter().enumerate().skip(1) {
        while t < t_target {
            let remaining = t_target - t;
            let mut step = h.min(tol.h_max).min(remaining);
            // land exactly on the node instead of leaving a sliver
            if remaining - step < 1e-3 * step {
                step = remaining;
            }
            if step < tol.h_min && step < remaining {
                return Err(Error::StepUnderflow { t });
            }

            stage(&y, step, &[(A21, &k1)], &mut tmp);
            rhs(t + C2 * step, &tmp, &mut k2);
            stage(&y, step, &[(A31, &k1), (A32, &k2)], &mut tmp);
            rhs(t + C3 * step, &tmp, &mut k3);
            stage(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)], &mut tmp);
            rhs(t + C4 * step, &tmp, &mut k4);
            stage(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &mut tmp);
            rhs(t + C5 * step, &tmp, &mut k5);
            stage(&y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], &mut tmp);
            rhs(t + step, &tmp, &mut k6);
            stage(&y, step, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], &mut y_new);
            rhs(t + step, &y_new, &mut k7);

            let mut err: f64 = 0.0;
            for i in 0..n {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
                err = err.max(e.norm() / scale);
            }
            if !err.is_finite() {
                return Err(Error::NonConvergence { residual: err });
            }

            if err <= 1.0 {
                t = if step == remaining { t_target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a step clipped by the grid says little about the step size
                h = if step < h { h.max(step * factor) } else { step * factor };
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h < tol.h_min {
                    return Err(Error::StepUnderflow { t });
                }
            }
        }
        visit(k, t, &y);
    }
    Ok(())
}

/// Integrates and returns the state at every grid node.
pub fn integrate<F>(rhs: F, t_grid: &[f64], y0: Vec<C64>, tol: Tolerances) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let mut out = Vec::with_capacity(t_grid.len());
    integrate_visit(rhs, t_grid, y0, tol, |_, _, y| out.push(y.to_vec()))?;
    Ok(out)
}

fn stage(y: &[C64], h: f64, terms: &[(f64, &Vec<C64>)], out: &mut [C64]) {
    out.copy_from_slice(y);
    for &(a, k) in terms {
        let ha = h * a;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ha * ki;
        }
    }
}

fn initial_step(y: &[C64], dy: &[C64], tol: Tolerances, span: f64) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for (yi, di) in y.iter().zip(dy) {
        let s = tol.atol + tol.rtol * yi.norm();
        d0 = d0.max(yi.norm() / s);
        d1 = d1.max(di.norm() / s);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span).min(tol.h_max).max(tol.h_min * 10.0)
}
