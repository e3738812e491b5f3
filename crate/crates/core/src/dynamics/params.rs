use crate::fock::{FockBasis, Mode};
use crate::{Error, Result, C64};

/// Hamiltonian and loss parameters of the driven coupled-mode system.
///
/// Rates and energies are in units of the reference linewidth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Cavity-laser detunings `Δⱼ = ωⱼ − ω_L`.
    pub delta1: f64,
    pub delta2: f64,
    /// Kerr strengths `Uⱼ` of the `Uⱼ âⱼ†²âⱼ²` terms.
    pub u1: f64,
    pub u2: f64,
    /// Coherent hopping `J`.
    pub j_hop: f64,
    /// Complex coherent drive amplitudes `Fⱼ`.
    pub f1: C64,
    pub f2: C64,
    /// Loss rates `κⱼ > 0`.
    pub kappa1: f64,
    pub kappa2: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            delta1: 0.0,
            delta2: 0.0,
            u1: 0.0,
            u2: 0.0,
            j_hop: 0.0,
            f1: C64::new(0.0, 0.0),
            f2: C64::new(0.0, 0.0),
            kappa1: 1.0,
            kappa2: 1.0,
        }
    }
}

impl SystemParams {
    /// Identical cavities `Δ₁=Δ₂=Δ`, `U₁=U₂=U`, `κ₁=κ₂=κ`, only mode 1 driven.
    pub fn symmetric(delta: f64, u: f64, j_hop: f64, f1: C64, kappa: f64) -> Self {
        SystemParams {
            delta1: delta,
            delta2: delta,
            u1: u,
            u2: u,
            j_hop,
            f1,
            f2: C64::new(0.0, 0.0),
            kappa1: kappa,
            kappa2: kappa,
        }
    }

    pub fn with_drives(mut self, f1: C64, f2: C64) -> Self {
        self.f1 = f1;
        self.f2 = f2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa1 > 0.0 && self.kappa2 > 0.0) {
            return Err(Error::param("kappa", "loss rates must be positive"));
        }
        let finite = [self.delta1, self.delta2, self.u1, self.u2, self.j_hop, self.kappa1, self.kappa2]
            .iter()
            .all(|x| x.is_finite())
            && [self.f1, self.f2].iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::param("params", "all magnitudes must be finite"));
        }
        Ok(())
    }

    pub fn delta(&self, mode: Mode) -> f64 {
        match mode {
            Mode::One => self.delta1,
            Mode::Two => self.delta2,
        }
    }

    pub fn u(&self, mode: Mode) -> f64 {
        match mode {
            Mode::One => self.u1,
            Mode::Two => self.u2,
        }
    }

    pub fn drive(&self, mode: Mode) -> C64 {
        match mode {
            Mode::One => self.f1,
            Mode::Two => self.f2,
        }
    }

    pub fn kappa(&self, mode: Mode) -> f64 {
        match mode {
            Mode::One => self.kappa1,
            Mode::Two => self.kappa2,
        }
    }

    /// Complex detuning `Δ̃ⱼ = Δⱼ − iκⱼ/2`.
    pub fn delta_tilde(&self, mode: Mode) -> C64 {
        C64::new(self.delta(mode), -0.5 * self.kappa(mode))
    }

    /// Exchanges every mode-1 parameter with its mode-2 counterpart.
    pub fn swapped(&self) -> Self {
        SystemParams {
            delta1: self.delta2,
            delta2: self.delta1,
            u1: self.u2,
            u2: self.u1,
            j_hop: self.j_hop,
            f1: self.f2,
            f2: self.f1,
            kappa1: self.kappa2,
            kappa2: self.kappa1,
        }
    }
}

/// Dissipator form used for the squeezed-vacuum reservoir.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SqueezedBathForm {
    /// Quadratic jump operators: `(κ/2)ξ*({â², ρ} − 2âρâ) + (κ/2)ξ({â†², ρ} − 2â†ρâ†)`
    /// added to the ordinary loss term.
    #[default]
    AsPrinted,
    /// Textbook broadband squeezed bath with `N = sinh²r`, `M = −e^{iθ} sinh r cosh r`.
    Standard,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezedBath {
    /// `ξ = r e^{iθ}`.
    pub xi: C64,
    pub port: Mode,
    pub form: SqueezedBathForm,
}

/// Reservoir parameters on top of the zero-temperature losses.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BathParams {
    /// Mean thermal occupation of both reservoirs.
    pub n_th: f64,
    /// Pure-dephasing rate (enters as `(rate/4)·D[â†â]`).
    pub dephasing_rate: f64,
    /// One-directional coupling efficiency of the cascaded link 1 → 2.
    pub cascade_efficiency: f64,
    pub squeeze_reservoir: Option<SqueezedBath>,
}

impl BathParams {
    pub fn cascaded(efficiency: f64) -> Self {
        BathParams { cascade_efficiency: efficiency, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_th >= 0.0 && self.n_th.is_finite()) {
            return Err(Error::param("n_th", "must be finite and non-negative"));
        }
        if !(self.dephasing_rate >= 0.0 && self.dephasing_rate.is_finite()) {
            return Err(Error::param("dephasing_rate", "must be finite and non-negative"));
        }
        if !(0.0..=1.0).contains(&self.cascade_efficiency) {
            return Err(Error::param("cascade_efficiency", "must lie in [0, 1]"));
        }
        if let Some(sq) = &self.squeeze_reservoir {
            if !(sq.xi.re.is_finite() && sq.xi.im.is_finite()) {
                return Err(Error::param("squeeze_reservoir", "ξ must be finite"));
            }
            if self.cascade_efficiency > 0.0 {
                return Err(Error::param(
                    "squeeze_reservoir",
                    "cannot be combined with the cascaded link",
                ));
            }
        }
        Ok(())
    }

    /// `χ = √(η κ₁ κ₂)` of the cascaded link.
    pub fn chi(&self, params: &SystemParams) -> f64 {
        (self.cascade_efficiency * params.kappa1 * params.kappa2).sqrt()
    }
}

/// Gaussian drive envelope `f_peak · exp[−(t − t₀)²/2σ_t²]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pulse {
    pub f_peak: C64,
    pub sigma_t: f64,
    pub t0: f64,
}

impl Pulse {
    pub fn new(f_peak: C64, sigma_t: f64, t0: f64) -> Result<Self> {
        if !(sigma_t > 0.0 && sigma_t.is_finite()) {
            return Err(Error::param("sigma_t", "must be positive"));
        }
        Ok(Pulse { f_peak, sigma_t, t0 })
    }

    pub fn envelope(&self, t: f64) -> f64 {
        let x = (t - self.t0) / self.sigma_t;
        (-0.5 * x * x).exp()
    }

    pub fn amplitude(&self, t: f64) -> C64 {
        self.f_peak * self.envelope(t)
    }

    /// `[t₀ − 3σ_t, t₀ + 3σ_t]`.
    pub fn support(&self) -> (f64, f64) {
        (self.t0 - 3.0 * self.sigma_t, self.t0 + 3.0 * self.sigma_t)
    }
}

/// Cavity (mode 1) coupled to a two-level emitter (mode 2 capped at one
/// excitation).
///
/// The emitter energy enters the Hamiltonian as `(Δ₂/2) σ₊σ₋`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JcParams {
    pub delta1: f64,
    pub delta2: f64,
    pub g: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub f1: C64,
    pub f2: C64,
}

impl JcParams {
    /// Equivalent two-mode parameters: `â₂ → σ₋`, `Δ₂ → Δ₂/2`, `J → g`, `U = 0`.
    pub fn to_system_params(&self) -> SystemParams {
        SystemParams {
            delta1: self.delta1,
            delta2: 0.5 * self.delta2,
            u1: 0.0,
            u2: 0.0,
            j_hop: self.g,
            f1: self.f1,
            f2: self.f2,
            kappa1: self.kappa1,
            kappa2: self.kappa2,
        }
    }

    /// Truncated space `|n⟩ ⊗ {g, e}` with at most `cutoff` total excitations.
    pub fn basis(cutoff: usize) -> FockBasis {
        FockBasis::with_mode2_cap(cutoff, 1)
    }

    /// Effective complex emitter detuning `Δ₂/2 − iκ₂/2`.
    pub fn emitter_delta_tilde(&self) -> C64 {
        C64::new(0.5 * self.delta2, -0.5 * self.kappa2)
    }

    pub fn cavity_delta_tilde(&self) -> C64 {
        C64::new(self.delta1, -0.5 * self.kappa1)
    }
}
