//! Input-output field mixing.
//!
//! The detected field is `b̂ = γ₁â₁ + γ₂â₂`; the input-noise part of the
//! output operator drops out of normally ordered moments at zero
//! temperature, so statistics are evaluated on `b̂` directly.

use crate::dynamics::{
    build_liouvillian, g2_tau_of, steady_state, two_time_g2_of, BathParams, CorrelationGrid, Pulse, SystemParams,
};
use crate::fock::{expectation, DensityMatrix, FockBasis, Mode, Operator};
use crate::weakdrive::{solve_manifolds, WeakDriveAmplitudes};
use crate::{Error, Result, C64};

/// `(F₁, F₂) = F₀(cos(θ/2), sin(θ/2)e^{iφ})`.
pub fn stokes_pair(amplitude: f64, theta: f64, phi: f64) -> (C64, C64) {
    (
        C64::new(amplitude * (0.5 * theta).cos(), 0.0),
        C64::from_polar(amplitude * (0.5 * theta).sin(), phi),
    )
}

/// Detection weights of the two cavity fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingSpec {
    pub gamma1: C64,
    pub gamma2: C64,
}

impl MixingSpec {
    pub fn new(gamma1: C64, gamma2: C64) -> Self {
        MixingSpec { gamma1, gamma2 }
    }

    /// `γ₁ = γ₀cos(θ/2)`, `γ₂ = γ₀sin(θ/2)e^{iφ}`.
    pub fn from_stokes(gamma0: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(gamma0 >= 0.0 && gamma0.is_finite()) {
            return Err(Error::param("gamma0", "must be finite and non-negative"));
        }
        let (gamma1, gamma2) = stokes_pair(gamma0, theta, phi);
        Ok(MixingSpec { gamma1, gamma2 })
    }

    /// `b̂ = γ₁â₁ + γ₂â₂` on `basis`.
    pub fn operator(&self, basis: &FockBasis) -> Operator {
        let a1 = basis.annihilation(Mode::One).scale(self.gamma1);
        let a2 = basis.annihilation(Mode::Two).scale(self.gamma2);
        &a1 + &a2
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputStats {
    pub n_out: f64,
    pub g2_out: f64,
}

/// `⟨b̂†b̂⟩` and `⟨b̂†b̂†b̂b̂⟩/⟨b̂†b̂⟩²` on a density matrix.
pub fn output_moments(rho: &DensityMatrix, mix: &MixingSpec) -> Result<OutputStats> {
    let basis = FockBasis::from_tag(rho.tag());
    let b = mix.operator(&basis);
    let bd = b.adjoint();
    let n_out = expectation(rho, &(&bd * &b))?.re;
    if !(n_out > 0.0) {
        return Err(Error::Undefined("zero output occupation".into()));
    }
    let pairs = expectation(rho, &(&(&bd * &bd) * &(&b * &b)))?.re;
    Ok(OutputStats { n_out, g2_out: pairs / (n_out * n_out) })
}

/// Operator-algebra statistics of `b̂` on the normalized weak-drive state.
pub fn output_moments_weak(c: &WeakDriveAmplitudes, mix: &MixingSpec) -> Result<OutputStats> {
    let rho = DensityMatrix::from_pure(c.basis(), c.coefficients())?;
    output_moments(&rho, mix)
}

/// The printed shortcuts `n_out ≈ |γ₁²c₁₀ + γ₂²c₀₁|²` and the three-term
/// `g²_out`, kept for comparison with [`output_moments_weak`].
pub fn printed_output_shortcuts(c: &WeakDriveAmplitudes, mix: &MixingSpec) -> OutputStats {
    let (g1, g2) = (mix.gamma1, mix.gamma2);
    let s2 = std::f64::consts::SQRT_2;
    let (c10, c01, c20, c02, c11) = (c.get(1, 0), c.get(0, 1), c.get(2, 0), c.get(0, 2), c.get(1, 1));
    let n_out = (g1 * g1 * c10 + g2 * g2 * c01).norm_sqr();
    let cross = g1 * g2 * s2 * c11;
    let num = (g1 * g1 * c20 + cross).norm_sqr() + (g2 * g2 * c02 + cross).norm_sqr() + (g1 * g1 * c20 + g2 * g2 * c02).norm_sqr();
    OutputStats { n_out, g2_out: num / (n_out * n_out) }
}

/// Two roots of a mixing condition, as printed and after the sign fix that
/// makes both of them cancel the two-photon output amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingCondition {
    pub printed: [C64; 2],
    pub corrected: [C64; 2],
}

fn identical_cavities(p: &SystemParams) -> Result<(C64, f64)> {
    p.validate()?;
    if p.delta1 != p.delta2 || p.u1 != p.u2 || p.kappa1 != p.kappa2 {
        return Err(Error::param("params", "needs identical cavities (Δ₁=Δ₂, U₁=U₂, κ₁=κ₂)"));
    }
    let dt = p.delta_tilde(Mode::One);
    if dt.norm() == 0.0 {
        return Err(Error::Singular("Δ̃ = 0".into()));
    }
    Ok((dt, p.u1))
}

/// Output weight `γ₁` cancelling the two-photon output amplitude for given
/// drives, `γ₂` and `J = 0`.
pub fn gamma1_opt(params: &SystemParams, gamma2: C64) -> Result<MixingCondition> {
    let (dt, u) = identical_cavities(params)?;
    if params.j_hop != 0.0 {
        return Err(Error::param("j_hop", "the output condition assumes uncoupled cavities"));
    }
    let (f1, f2) = (params.f1, params.f2);
    if f1.norm() == 0.0 {
        return Err(Error::param("f1", "both cavities must be driven"));
    }
    let root = (f1 * f1 * f2 * f2 * (2.0 * dt + u) * u).sqrt();
    let lin = f1 * f2 * (dt + u);
    let den = f1 * f1 * dt;
    Ok(MixingCondition {
        printed: [gamma2 * (root + lin) / den, gamma2 * (root - lin) / den],
        corrected: [gamma2 * (root - lin) / den, gamma2 * (-root - lin) / den],
    })
}

/// Ratio `x` such that `γ₁ = xγ₂` at equal drives, or `F₁ = xF₂` at equal
/// outputs.
pub fn symmetric_io_opt(params: &SystemParams) -> Result<MixingCondition> {
    let (dt, u) = identical_cavities(params)?;
    let root = ((2.0 * dt + u) * u).sqrt();
    let lin = dt + u;
    Ok(MixingCondition {
        printed: [(root + lin) / dt, (root - lin) / dt],
        corrected: [(root - lin) / dt, (-root - lin) / dt],
    })
}

/// `|⟨0|b̂²|ψ⟩| / |F|²` with `F₁ = F₂ = F` and `γ₁ = γ₂ = 1`, which stays
/// nonzero for every `κ > 0`.
pub fn full_symmetry_residual(delta: f64, u: f64, kappa: f64) -> Result<f64> {
    let f = C64::new(1e-3, 0.0);
    let p = SystemParams::symmetric(delta, u, 0.0, f, kappa).with_drives(f, f);
    let c = solve_manifolds(&p, 2, None)?;
    let one = C64::new(1.0, 0.0);
    Ok(c.two_photon_output(one, one).norm() / f.norm_sqr())
}

/// Steady-state `g²_out(τ)` of the mixed field.
pub fn output_g2_tau(
    params: &SystemParams,
    bath: &BathParams,
    basis: &FockBasis,
    mix: &MixingSpec,
    tau_grid: &[f64],
) -> Result<Vec<f64>> {
    let l = build_liouvillian(params, bath, basis)?;
    let rho = steady_state(&l)?;
    g2_tau_of(&l, &rho, &mix.operator(basis), tau_grid)
}

/// Two-time output correlations under pulsed driving from vacuum.
pub fn output_two_time(
    params: &SystemParams,
    bath: &BathParams,
    basis: &FockBasis,
    drive: &[(Mode, Pulse)],
    mix: &MixingSpec,
    times: &[f64],
) -> Result<CorrelationGrid> {
    let l = build_liouvillian(params, bath, basis)?;
    two_time_g2_of(&l, drive, &mix.operator(basis), &DensityMatrix::vacuum(basis), times)
}
