//! Master-equation machinery: Hamiltonians, Liouvillians with bath
//! extensions, steady states, time evolution, correlation functions and the
//! classical mean-field equations.

mod correlation;
mod evolve;
mod hamiltonian;
mod liouvillian;
mod meanfield;
mod params;
mod steady;

pub use correlation::{
    default_time_grid, extremum_spacing, g2_pulse_integrated, g2_tau_of, g2_tau_steady, gated_pulse_g2, two_time_g2,
    two_time_g2_of, CorrelationGrid, DEFAULT_TWO_TIME_POINTS, MIN_POINTS_PER_PULSE,
};
pub use evolve::{default_tolerances, evolve, with_drive, Trajectory};
pub use hamiltonian::{build_hamiltonian, build_nonhermitian};
pub use liouvillian::{
    build_fluctuation_liouvillian, build_liouvillian, FluctuationModel, Liouvillian, TRACE_PRESERVATION_TOL,
};
pub use meanfield::{mean_field_evolve, mean_field_fixed_points, mean_field_rhs, FixedPoints};
pub use params::{BathParams, JcParams, Pulse, SqueezedBath, SqueezedBathForm, SystemParams};
pub use steady::{steady_state, steady_state_report, SteadyMethod, SteadyState, STEADY_RESIDUAL_TOL};

use crate::fock::{DensityMatrix, FockBasis, Mode, Operator};
use crate::{Error, Result, C64};

/// `âⱼ + αⱼ𝟙`, the lab-frame field expressed on the fluctuation space.
pub fn displaced_annihilation(basis: &FockBasis, mode: Mode, alpha: C64) -> Operator {
    let a = basis.annihilation(mode);
    let shift = basis.identity().scale(alpha);
    &a + &shift
}

/// Occupation and equal-time `g²` of a field operator `b` on `rho`.
pub fn field_statistics(rho: &DensityMatrix, b: &Operator) -> Result<(f64, f64)> {
    let bd = b.adjoint();
    let n = crate::fock::expectation(rho, &(&bd * b))?.re;
    let g = crate::fock::expectation(rho, &(&(&bd * &bd) * &(b * b)))?.re;
    if !(n > 0.0) {
        return Err(Error::Undefined("zero occupation".into()));
    }
    Ok((n, g / (n * n)))
}

/// Steady state of the fluctuations around a classical field `α`.
#[derive(Clone, Debug)]
pub struct DisplacedSteadyState {
    pub rho: DensityMatrix,
    pub alpha: [C64; 2],
    pub residual: f64,
    pub method: SteadyMethod,
}

impl DisplacedSteadyState {
    pub fn basis(&self) -> FockBasis {
        FockBasis::from_tag(self.rho.tag())
    }

    /// Lab-frame field `âⱼ` on the fluctuation space.
    pub fn field(&self, mode: Mode) -> Operator {
        displaced_annihilation(&self.basis(), mode, self.alpha[mode.index() - 1])
    }

    /// Lab-frame occupation and `g²(0)` of `mode`.
    pub fn statistics(&self, mode: Mode) -> Result<(f64, f64)> {
        field_statistics(&self.rho, &self.field(mode))
    }
}

/// Steady state in the frame displaced by the smallest classical fixed
/// point, which keeps the fluctuation space small when the coherent
/// amplitudes are large. With [`FluctuationModel::Full`] the result is the
/// lab-frame state for any displacement; only the truncation differs.
pub fn displaced_steady_state(
    params: &SystemParams,
    bath: &BathParams,
    basis: &FockBasis,
    model: FluctuationModel,
) -> Result<DisplacedSteadyState> {
    let fixed = mean_field_fixed_points(params)?;
    let alpha = *fixed
        .branches
        .first()
        .ok_or_else(|| Error::Undefined("no classical fixed point".into()))?;
    let l = build_fluctuation_liouvillian(params, bath, alpha, basis, model)?;
    let s = steady_state_report(&l)?;
    Ok(DisplacedSteadyState { rho: s.rho, alpha, residual: s.residual, method: s.method })
}
