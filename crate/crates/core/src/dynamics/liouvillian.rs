use ndarray::Array2;

use super::hamiltonian::{dagger, hamiltonian_matrix, ModeOps};
use super::params::{BathParams, Pulse, SqueezedBathForm, SystemParams};
use crate::fock::{BasisTag, FockBasis, Mode};
use crate::linalg::{CsrMatrix, SuperopBuilder};
use crate::{Error, Result, C64};

/// Bound on the trace-preservation defect checked at construction.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
struct DriveTerm {
    pulse: Pulse,
    /// `−i[f â† + f* â, ·]` at unit envelope.
    generator: CsrMatrix,
}

/// Generator `L(t) = L₀ + Σₖ envₖ(t)·Lₖ` acting on row-major vectorized
/// density matrices.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    basis: FockBasis,
    static_part: CsrMatrix,
    drives: Vec<DriveTerm>,
}

impl Liouvillian {
    /// Wraps a raw generator. Fails if it does not preserve the trace.
    pub fn from_generator(basis: &FockBasis, generator: CsrMatrix) -> Result<Self> {
        let n = basis.len() * basis.len();
        if generator.nrows() != n || generator.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: generator.nrows() });
        }
        let l = Liouvillian { basis: basis.clone(), static_part: generator, drives: Vec::new() };
        let defect = l.trace_defect();
        if defect > TRACE_PRESERVATION_TOL {
            return Err(Error::InvalidState(format!("generator breaks trace preservation by {defect:.3e}")));
        }
        Ok(l)
    }

    pub fn zero(basis: &FockBasis) -> Self {
        let n = basis.len() * basis.len();
        Liouvillian { basis: basis.clone(), static_part: CsrMatrix::zeros(n, n), drives: Vec::new() }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn tag(&self) -> BasisTag {
        self.basis.tag()
    }

    /// Length of the vectorized density matrix.
    pub fn dim(&self) -> usize {
        self.static_part.nrows()
    }

    pub fn is_time_dependent(&self) -> bool {
        !self.drives.is_empty()
    }

    /// Time-independent part `L₀`.
    pub fn generator(&self) -> &CsrMatrix {
        &self.static_part
    }

    pub fn pulses(&self) -> impl Iterator<Item = &Pulse> {
        self.drives.iter().map(|d| &d.pulse)
    }

    /// Adds a Gaussian coherent drive `F(t) = pulse.amplitude(t)` on `mode`.
    pub fn with_pulse(mut self, mode: Mode, pulse: Pulse) -> Self {
        let a = self.basis.annihilation(mode).into_matrix();
        let f = pulse.f_peak;
        let h = a.mapv(|z| z * f.conj()) + dagger(&a).mapv(|z| z * f);
        let mut sb = SuperopBuilder::new(self.basis.len());
        sb.commutator(C64::new(1.0, 0.0), &h);
        self.drives.push(DriveTerm { pulse, generator: sb.build() });
        self
    }

    /// `out = L(t)·x`.
    pub fn apply(&self, t: f64, x: &[C64], out: &mut [C64]) {
        self.static_part.mul_vec_into(x, out);
        for d in &self.drives {
            let env = d.pulse.envelope(t);
            if env > 1e-300 {
                d.generator.mul_vec_add(C64::new(env, 0.0), x, out);
            }
        }
    }

    /// `max |vec(𝟙)† L|`, zero for an exactly trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.basis.len();
        let mut id = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            id[i * d + i] = C64::new(1.0, 0.0);
        }
        let scale = self.static_part.norm_inf().max(1.0);
        let mut worst = row_max(&self.static_part.left_mul_vec(&id)) / scale;
        for drive in &self.drives {
            let s = drive.generator.norm_inf().max(1.0);
            worst = worst.max(row_max(&drive.generator.left_mul_vec(&id)) / s);
        }
        worst
    }
}

fn row_max(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Master-equation generator with every enabled bath term.
pub fn build_liouvillian(params: &SystemParams, bath: &BathParams, basis: &FockBasis) -> Result<Liouvillian> {
    assemble(params, bath, basis, [C64::new(0.0, 0.0); 2], FluctuationModel::Full)
}

/// How the displaced-frame Hamiltonian is kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluctuationModel {
    /// Every order in the fluctuation operators.
    Full,
    /// Quadratic and linear terms only (Gaussian dynamics).
    Linearized,
}

/// Generator for the fluctuations `δâⱼ = âⱼ − αⱼ`.
///
/// Built from the exact substitution `âⱼ → δâⱼ + αⱼ` in both the Hamiltonian
/// and the jump operators, so the frame shift generates the
/// `4Uⱼ|αⱼ|² δâ†δâ` term and a residual linear drive
/// `Fⱼ + (Δ̃ⱼ + 2Uⱼ|αⱼ|²)αⱼ + Jα₃₋ⱼ` besides the squeezing, cubic and
/// quartic terms. The linear drive vanishes only at the exact quantum fixed
/// point, so it is kept for any supplied `α`. `α = 0` gives back
/// [`build_liouvillian`].
pub fn build_fluctuation_liouvillian(
    params: &SystemParams,
    bath: &BathParams,
    alpha: [C64; 2],
    basis: &FockBasis,
    model: FluctuationModel,
) -> Result<Liouvillian> {
    assemble(params, bath, basis, alpha, model)
}

/// Quadratic-plus-linear part of the displaced Hamiltonian (without the
/// contribution of the displaced jump operators, which are added by the
/// dissipators).
fn linearized_hamiltonian(params: &SystemParams, basis: &FockBasis, alpha: [C64; 2]) -> Array2<C64> {
    let bare = ModeOps::new(basis, [C64::new(0.0, 0.0); 2]);
    let d = basis.len();
    let mut h = Array2::<C64>::zeros((d, d));
    for (j, mode) in [Mode::One, Mode::Two].into_iter().enumerate() {
        let (a, ad) = (&bare.a[j], &bare.ad[j]);
        let al = alpha[j];
        let u = params.u(mode);
        let n = ad.dot(a);
        let shift = params.delta(mode) + 4.0 * u * al.norm_sqr();
        h = h + &n * C64::new(shift, 0.0);
        if u != 0.0 {
            h = h + a.dot(a) * (al.conj() * al.conj() * u) + ad.dot(ad) * (al * al * u);
        }
        let lin = params.drive(mode)
            + al * (params.delta(mode) + 2.0 * u * al.norm_sqr())
            + alpha[1 - j] * params.j_hop;
        h = h + a * lin.conj() + ad * lin;
    }
    if params.j_hop != 0.0 {
        let hop = bare.ad[0].dot(&bare.a[1]) + bare.ad[1].dot(&bare.a[0]);
        h = h + hop * C64::new(params.j_hop, 0.0);
    }
    h
}

fn assemble(
    params: &SystemParams,
    bath: &BathParams,
    basis: &FockBasis,
    alpha: [C64; 2],
    model: FluctuationModel,
) -> Result<Liouvillian> {
    params.validate()?;
    bath.validate()?;
    let d = basis.len();
    let ops = ModeOps::new(basis, alpha);
    let h = match model {
        FluctuationModel::Full => hamiltonian_matrix(params, &ops),
        FluctuationModel::Linearized => linearized_hamiltonian(params, basis, alpha),
    };
    let mut sb = SuperopBuilder::new(d);
    sb.commutator(C64::new(1.0, 0.0), &h);

    let squeeze = bath.squeeze_reservoir;
    for (j, mode) in [Mode::One, Mode::Two].into_iter().enumerate() {
        let kappa = params.kappa(mode);
        let (a, ad) = (&ops.a[j], &ops.ad[j]);
        let mut loss = kappa * (bath.n_th + 1.0);
        let mut gain = kappa * bath.n_th;
        if let Some(sq) = squeeze.filter(|s| s.port == mode) {
            match sq.form {
                SqueezedBathForm::AsPrinted => {
                    // (κ/2)ξ*({â², ρ} − 2âρâ) + (κ/2)ξ({â†², ρ} − 2â†ρâ†)
                    let a2 = a.dot(a);
                    let ad2 = ad.dot(ad);
                    let c = sq.xi.conj() * (0.5 * kappa);
                    sb.left(c, &a2);
                    sb.right(c, &a2);
                    sb.sandwich(-2.0 * c, a, a);
                    let c = sq.xi * (0.5 * kappa);
                    sb.left(c, &ad2);
                    sb.right(c, &ad2);
                    sb.sandwich(-2.0 * c, ad, ad);
                }
                SqueezedBathForm::Standard => {
                    let r = sq.xi.norm();
                    let theta = sq.xi.arg();
                    let n_sq = r.sinh().powi(2);
                    let m_sq = -C64::from_polar(r.cosh() * r.sinh(), theta);
                    loss += kappa * n_sq;
                    gain += kappa * n_sq;
                    // −(κ/2)M(2â†ρâ† − {â†², ρ}) − (κ/2)M*(2âρâ − {â², ρ})
                    let a2 = a.dot(a);
                    let ad2 = ad.dot(ad);
                    let c = m_sq * (0.5 * kappa);
                    sb.sandwich(-2.0 * c, ad, ad);
                    sb.left(c, &ad2);
                    sb.right(c, &ad2);
                    let c = m_sq.conj() * (0.5 * kappa);
                    sb.sandwich(-2.0 * c, a, a);
                    sb.left(c, &a2);
                    sb.right(c, &a2);
                }
            }
        }
        sb.lindblad(loss, a);
        sb.lindblad(gain, ad);
        if bath.dephasing_rate > 0.0 {
            // −(η/4)({n², ρ} − 2nρn) = (η/2)·(nρn − ½{n², ρ})
            sb.lindblad(0.5 * bath.dephasing_rate, &ops.number(j));
        }
    }

    let chi = bath.chi(params);
    if chi > 0.0 {
        // χ(â₁ρâ₂† − â₂†â₁ρ + â₂ρâ₁† − ρâ₁†â₂)
        let c = C64::new(chi, 0.0);
        sb.sandwich(c, &ops.a[0], &ops.ad[1]);
        sb.left(-c, &ops.ad[1].dot(&ops.a[0]));
        sb.sandwich(c, &ops.a[1], &ops.ad[0]);
        sb.right(-c, &ops.ad[0].dot(&ops.a[1]));
    }
    Liouvillian::from_generator(basis, sb.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::params::SqueezedBath;
    use crate::linalg::{unvectorize, vectorize};

    fn generic() -> SystemParams {
        SystemParams {
            delta1: 0.3,
            delta2: -0.1,
            u1: 0.2,
            u2: 0.05,
            j_hop: 0.7,
            f1: C64::new(0.2, 0.1),
            f2: C64::new(0.0, -0.1),
            kappa1: 1.0,
            kappa2: 0.8,
        }
    }

    #[test]
    fn every_bath_term_preserves_trace() {
        let basis = FockBasis::new(4);
        let baths = [
            BathParams::default(),
            BathParams { n_th: 0.3, dephasing_rate: 0.2, ..Default::default() },
            BathParams::cascaded(0.7),
            BathParams {
                squeeze_reservoir: Some(SqueezedBath {
                    xi: C64::from_polar(0.2, 0.4),
                    port: Mode::One,
                    form: SqueezedBathForm::AsPrinted,
                }),
                ..Default::default()
            },
            BathParams {
                squeeze_reservoir: Some(SqueezedBath {
                    xi: C64::from_polar(0.2, 0.4),
                    port: Mode::Two,
                    form: SqueezedBathForm::Standard,
                }),
                ..Default::default()
            },
        ];
        for bath in baths {
            let l = build_liouvillian(&generic(), &bath, &basis).unwrap();
            assert!(l.trace_defect() < 1e-12, "{bath:?}");
            assert_eq!(l.dim(), basis.len() * basis.len());
        }
    }

    #[test]
    fn squeezed_reservoir_with_cascade_is_rejected() {
        let bath = BathParams {
            cascade_efficiency: 0.5,
            squeeze_reservoir: Some(SqueezedBath {
                xi: C64::new(0.1, 0.0),
                port: Mode::One,
                form: SqueezedBathForm::AsPrinted,
            }),
            ..Default::default()
        };
        assert!(build_liouvillian(&generic(), &bath, &FockBasis::new(2)).is_err());
    }

    #[test]
    fn generator_maps_hermitian_to_hermitian() {
        let basis = FockBasis::new(3);
        let bath = BathParams { n_th: 0.1, dephasing_rate: 0.3, cascade_efficiency: 0.5, ..Default::default() };
        let l = build_liouvillian(&generic(), &bath, &basis).unwrap();
        let d = basis.len();
        let rho = Array2::from_shape_fn((d, d), |(i, j)| {
            let re = ((i + j) as f64).cos();
            let im = if i == j { 0.0 } else { (i as f64 - j as f64) * 0.1 };
            C64::new(re, im)
        });
        let out = unvectorize(&l.generator().mul_vec(&vectorize(&rho)), d);
        assert!(crate::linalg::hermitian_defect(&out) < 1e-13);
    }

    #[test]
    fn zero_displacement_reproduces_lab_frame() {
        let basis = FockBasis::new(3);
        let bath = BathParams { n_th: 0.2, dephasing_rate: 0.1, ..Default::default() };
        let lab = build_liouvillian(&generic(), &bath, &basis).unwrap();
        let fl = build_fluctuation_liouvillian(&generic(), &bath, [C64::new(0.0, 0.0); 2], &basis, FluctuationModel::Full)
            .unwrap();
        let diff = lab.generator().add(&fl.generator().scaled(C64::new(-1.0, 0.0)));
        assert!(diff.norm_inf() < 1e-13);
    }
}
