use super::params::SystemParams;
use crate::fock::Mode;
use crate::ode::{self, Tolerances};
use crate::{Error, Result, C64, I};

/// `−i{[Δ̃ⱼ + Uⱼ|αⱼ|²]αⱼ + Jα₃₋ⱼ + Fⱼ}` for both modes.
pub fn mean_field_rhs(params: &SystemParams, alpha: [C64; 2]) -> [C64; 2] {
    let mut out = [C64::new(0.0, 0.0); 2];
    for (j, mode) in [Mode::One, Mode::Two].into_iter().enumerate() {
        let a = alpha[j];
        let bracket = params.delta_tilde(mode) + params.u(mode) * a.norm_sqr();
        out[j] = -I * (bracket * a + params.j_hop * alpha[1 - j] + params.drive(mode));
    }
    out
}

/// Integrates the classical field equations from `alpha0`.
pub fn mean_field_evolve(params: &SystemParams, alpha0: [C64; 2], t_grid: &[f64]) -> Result<Vec<[C64; 2]>> {
    params.validate()?;
    let sol = ode::integrate(
        |_, y, dy| {
            let r = mean_field_rhs(params, [y[0], y[1]]);
            dy[0] = r[0];
            dy[1] = r[1];
        },
        t_grid,
        alpha0.to_vec(),
        Tolerances { rtol: 1e-10, atol: 1e-14, ..Tolerances::default() },
    )?;
    Ok(sol.into_iter().map(|y| [y[0], y[1]]).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoints {
    /// Distinct stationary solutions, ordered by `|α₁|`.
    pub branches: Vec<[C64; 2]>,
    /// Every Newton start converged.
    pub all_converged: bool,
}

impl FixedPoints {
    /// More than one branch was found.
    pub fn multistable(&self) -> bool {
        self.branches.len() > 1
    }
}

const NEWTON_TOL: f64 = 1e-13;

/// Stationary points of the classical field equations by damped Newton
/// iteration from the linear solution and a fan of scaled starts.
pub fn mean_field_fixed_points(params: &SystemParams) -> Result<FixedPoints> {
    params.validate()?;
    let linear = linear_fixed_point(params)?;
    let scale = (linear[0].norm() + linear[1].norm()).max(1e-3);
    let mut starts = vec![linear];
    for k in 1..=8 {
        let s = 0.5 * k as f64;
        for phase in [0.0, 0.5 * std::f64::consts::PI, std::f64::consts::PI, -0.5 * std::f64::consts::PI] {
            let rot = C64::from_polar(s, phase);
            starts.push([linear[0] * rot, linear[1] * rot]);
        }
        starts.push([C64::new(s * scale, 0.0), C64::new(0.0, s * scale)]);
    }
    let mut branches: Vec<[C64; 2]> = Vec::new();
    let mut all_converged = true;
    for start in starts {
        match newton(params, start) {
            Some(root) => {
                let dup = branches.iter().any(|b| {
                    let d = (b[0] - root[0]).norm() + (b[1] - root[1]).norm();
                    d < 1e-8 * (1.0 + root[0].norm() + root[1].norm())
                });
                if !dup {
                    branches.push(root);
                }
            }
            None => all_converged = false,
        }
    }
    if branches.is_empty() {
        return Err(Error::NonConvergence { residual: f64::NAN });
    }
    branches.sort_by(|a, b| a[0].norm().total_cmp(&b[0].norm()));
    Ok(FixedPoints { branches, all_converged })
}

/// `U = 0` stationary point, a 2×2 complex linear solve.
fn linear_fixed_point(params: &SystemParams) -> Result<[C64; 2]> {
    let d1 = params.delta_tilde(Mode::One);
    let d2 = params.delta_tilde(Mode::Two);
    let j = C64::new(params.j_hop, 0.0);
    let det = d1 * d2 - j * j;
    if det.norm() == 0.0 {
        return Err(Error::Singular("linear mean-field system".into()));
    }
    let (f1, f2) = (params.f1, params.f2);
    Ok([(-f1 * d2 + j * f2) / det, (-f2 * d1 + j * f1) / det])
}

/// Residual of the stationary equations in real coordinates
/// `(Re α₁, Im α₁, Re α₂, Im α₂)`.
fn residual(params: &SystemParams, x: [f64; 4]) -> [f64; 4] {
    let a = [C64::new(x[0], x[1]), C64::new(x[2], x[3])];
    let r = mean_field_rhs(params, a);
    [r[0].re, r[0].im, r[1].re, r[1].im]
}

fn newton(params: &SystemParams, start: [C64; 2]) -> Option<[C64; 2]> {
    let mut x = [start[0].re, start[0].im, start[1].re, start[1].im];
    let norm = |r: &[f64; 4]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut r = residual(params, x);
    let scale = params.f1.norm() + params.f2.norm() + 1e-300;
    for _ in 0..200 {
        if norm(&r) <= NEWTON_TOL * scale.max(1.0) {
            return Some([C64::new(x[0], x[1]), C64::new(x[2], x[3])]);
        }
        // forward-difference Jacobian of the smooth real map
        let mut jac = [[0.0; 4]; 4];
        for c in 0..4 {
            let h = 1e-7 * (1.0 + x[c].abs());
            let mut xp = x;
            xp[c] += h;
            let rp = residual(params, xp);
            for row in 0..4 {
                jac[row][c] = (rp[row] - r[row]) / h;
            }
        }
        let step = solve4(jac, r.map(|v| -v))?;
        let mut lambda = 1.0;
        loop {
            let cand = [0, 1, 2, 3].map(|i| x[i] + lambda * step[i]);
            let rc = residual(params, cand);
            if norm(&rc) < (1.0 - 1e-4 * lambda) * norm(&r) {
                x = cand;
                r = rc;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return None;
            }
        }
    }
    (norm(&r) <= 1e-9 * scale.max(1.0)).then(|| [C64::new(x[0], x[1]), C64::new(x[2], x[3])])
}

fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_cavity_fixed_point() {
        let p = SystemParams { delta1: 0.7, f1: C64::new(0.3, 0.1), ..Default::default() };
        let fp = mean_field_fixed_points(&p).unwrap();
        assert_eq!(fp.branches.len(), 1);
        let want = -p.f1 / C64::new(0.7, -0.5);
        assert!((fp.branches[0][0] - want).norm() < 1e-12);
    }

    #[test]
    fn undriven_field_decays() {
        let p = SystemParams { u1: 0.1, j_hop: 1.0, ..Default::default() };
        let traj = mean_field_evolve(&p, [C64::new(1.0, 0.0), C64::new(0.0, 0.5)], &[0.0, 30.0]).unwrap();
        assert!(traj[1][0].norm() < 1e-6 && traj[1][1].norm() < 1e-6);
    }

    #[test]
    fn kerr_bistability_gives_three_branches() {
        // single Kerr cavity red-detuned well past √3 κ/2
        let p = SystemParams { delta1: -3.0, u1: 0.01, f1: C64::new(14.0, 0.0), ..Default::default() };
        let fp = mean_field_fixed_points(&p).unwrap();
        assert!(fp.multistable(), "{:?}", fp.branches);
        for b in &fp.branches {
            let r = mean_field_rhs(&p, *b);
            assert!(r[0].norm() < 1e-9);
        }
    }
}
