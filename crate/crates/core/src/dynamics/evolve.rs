use super::liouvillian::Liouvillian;
use super::params::Pulse;
use crate::fock::{DensityMatrix, Mode};
use crate::linalg::{unvectorize, vectorize};
use crate::ode::{self, Tolerances};
use crate::{Error, Result, C64};

/// Local tolerances of every density-matrix integration.
pub fn default_tolerances() -> Tolerances {
    Tolerances { rtol: 1e-9, atol: 1e-13, ..Tolerances::default() }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

/// Attaches `drive` pulses to a copy of `l`.
pub fn with_drive(l: &Liouvillian, drive: &[(Mode, Pulse)]) -> Liouvillian {
    drive.iter().fold(l.clone(), |acc, &(mode, pulse)| acc.with_pulse(mode, pulse))
}

/// Largest step that cannot jump over a pulse.
pub(crate) fn step_limit(l: &Liouvillian) -> f64 {
    l.pulses().map(|p| 0.5 * p.sigma_t).fold(f64::INFINITY, f64::min)
}

/// Integrates `∂ρ/∂t = L(t)[ρ]` from `t_grid[0]` and returns `ρ` at every node.
///
/// Each snapshot is checked for hermiticity and unit trace.
pub fn evolve(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    drive: &[(Mode, Pulse)],
    t_grid: &[f64],
) -> Result<Trajectory> {
    if rho0.tag() != l.tag() {
        return Err(Error::BasisMismatch { left: rho0.tag(), right: l.tag() });
    }
    let full = with_drive(l, drive);
    let d = rho0.dim();
    let tol = Tolerances { h_max: step_limit(&full), ..default_tolerances() };
    let mut states = Vec::with_capacity(t_grid.len());
    let mut failure = None;
    ode::integrate_visit(
        |t, y, dy| full.apply(t, y, dy),
        t_grid,
        vectorize(rho0.matrix()),
        tol,
        |_, _, y| {
            let rho = DensityMatrix::from_matrix_unchecked(rho0.tag(), unvectorize(y, d));
            if failure.is_none() {
                if let Err(e) = rho.validate_hermitian_trace() {
                    failure = Some(e);
                }
            }
            states.push(rho);
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Trajectory { times: t_grid.to_vec(), states })
}

/// Propagates an arbitrary (not necessarily physical) operator vector and
/// calls `visit(k, x(t_k))` at each grid node.
pub(crate) fn propagate<V>(l: &Liouvillian, x0: Vec<C64>, t_grid: &[f64], visit: V) -> Result<()>
where
    V: FnMut(usize, f64, &[C64]),
{
    let tol = Tolerances { h_max: step_limit(l), ..default_tolerances() };
    ode::integrate_visit(|t, y, dy| l.apply(t, y, dy), t_grid, x0, tol, visit)
}
