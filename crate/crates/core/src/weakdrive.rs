//! Weak-driving amplitudes of the jumpless steady state.
//!
//! The state `Σ c_nm |n,m⟩` with `c₀₀ = 1` is projected onto the
//! non-Hermitian Schrödinger equation. Dropping the `F*` terms that feed a
//! manifold from the one above makes the system block lower-triangular, so
//! each manifold `n + m = k` is a small linear solve sourced by manifold
//! `k − 1`.

use ndarray::{Array1, Array2};

use crate::dynamics::{JcParams, SystemParams};
use crate::fock::{FockBasis, Mode};
use crate::linalg::solve_dense;
use crate::{Error, Result, C64, I};

/// Drive strength above which the weak-drive expansion is flagged.
pub const WEAK_DRIVE_LIMIT: f64 = 0.1;

/// Coefficients `c_nm` over a truncated basis whose cutoff is the manifold order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakDriveAmplitudes {
    basis: FockBasis,
    coeffs: Vec<C64>,
    pub warnings: Vec<String>,
}

/// Amplitudes of the cavity-emitter system, emitter capped at one excitation.
pub type JcAmplitudes = WeakDriveAmplitudes;

impl WeakDriveAmplitudes {
    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn order(&self) -> usize {
        self.basis.cutoff()
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    /// `c_nm`, zero outside the truncation.
    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.basis.index_of(n, m).map_or(C64::new(0.0, 0.0), |k| self.coeffs[k])
    }

    /// Two-photon amplitude of the field `γ₁â₁ + γ₂â₂`:
    /// `⟨0|b²|ψ⟩ = γ₁²√2c₂₀ + 2γ₁γ₂c₁₁ + γ₂²√2c₀₂`.
    pub fn two_photon_output(&self, gamma1: C64, gamma2: C64) -> C64 {
        let s2 = std::f64::consts::SQRT_2;
        gamma1 * gamma1 * s2 * self.get(2, 0)
            + 2.0 * gamma1 * gamma2 * self.get(1, 1)
            + gamma2 * gamma2 * s2 * self.get(0, 2)
    }
}

/// Steady-state coefficients up to manifold `order`, with an optional
/// cascade coupling `χ` (the `−iχ â₂†â₁` jump term).
pub fn solve_manifolds(params: &SystemParams, order: usize, cascade: Option<f64>) -> Result<WeakDriveAmplitudes> {
    solve_on(params, FockBasis::new(order), cascade)
}

/// Cavity-emitter amplitudes on `|n⟩ ⊗ {g, e}`.
pub fn jc_solve(jc: &JcParams, order: usize) -> Result<JcAmplitudes> {
    solve_on(&jc.to_system_params(), JcParams::basis(order), None)
}

fn solve_on(params: &SystemParams, basis: FockBasis, cascade: Option<f64>) -> Result<WeakDriveAmplitudes> {
    params.validate()?;
    let order = basis.cutoff();
    if order < 2 {
        return Err(Error::param("order", "must be at least 2"));
    }
    let chi = cascade.unwrap_or(0.0);
    if !(chi >= 0.0 && chi.is_finite()) {
        return Err(Error::param("cascade", "χ must be finite and non-negative"));
    }
    let mut warnings = Vec::new();
    let fmax = params.f1.norm().max(params.f2.norm());
    let kmin = params.kappa1.min(params.kappa2);
    if fmax > WEAK_DRIVE_LIMIT * kmin {
        warnings.push(format!("drive |F| = {fmax:.3e} exceeds {WEAK_DRIVE_LIMIT}κ; weak-drive expansion unreliable"));
    }

    let mut coeffs = vec![C64::new(0.0, 0.0); basis.len()];
    coeffs[0] = C64::new(1.0, 0.0);
    let (d1, d2) = (params.delta_tilde(Mode::One), params.delta_tilde(Mode::Two));
    let (u1, u2, j) = (params.u1, params.u2, params.j_hop);
    let sq = |x: usize| (x as f64).sqrt();

    for k in 1..=order {
        let members: Vec<(usize, usize)> =
            basis.states().iter().copied().filter(|&(n, m)| n + m == k).collect();
        let local = |n: usize, m: usize| members.iter().position(|&s| s == (n, m));
        let dim = members.len();
        let mut a = Array2::<C64>::zeros((dim, dim));
        let mut b = Array1::<C64>::zeros(dim);
        for (row, &(n, m)) in members.iter().enumerate() {
            let (nf, mf) = (n as f64, m as f64);
            a[[row, row]] = nf * d1 + mf * d2 + nf * (nf - 1.0) * u1 + mf * (mf - 1.0) * u2;
            if n > 0 {
                if let Some(col) = local(n - 1, m + 1) {
                    a[[row, col]] += j * sq(n * (m + 1));
                }
            }
            if m > 0 {
                if let Some(col) = local(n + 1, m - 1) {
                    a[[row, col]] += j * sq(m * (n + 1)) - I * chi * sq(m * (n + 1));
                }
            }
            let mut src = C64::new(0.0, 0.0);
            if n > 0 {
                if let Some(idx) = basis.index_of(n - 1, m) {
                    src += params.f1 * sq(n) * coeffs[idx];
                }
            }
            if m > 0 {
                if let Some(idx) = basis.index_of(n, m - 1) {
                    src += params.f2 * sq(m) * coeffs[idx];
                }
            }
            b[row] = -src;
        }
        let x = solve_dense(&a, &b).map_err(|_| Error::Singular(format!("manifold {k} block")))?;
        for (row, &(n, m)) in members.iter().enumerate() {
            coeffs[basis.index_of(n, m).expect("member of basis")] = x[row];
        }
    }
    Ok(WeakDriveAmplitudes { basis, coeffs, warnings })
}

/// Printed two-photon closed forms for identical cavities driven on port 1.
pub fn closed_form_single_drive(params: &SystemParams) -> Result<WeakDriveAmplitudes> {
    params.validate()?;
    let symmetric = params.delta1 == params.delta2
        && params.u1 == params.u2
        && params.kappa1 == params.kappa2
        && params.f2 == C64::new(0.0, 0.0);
    if !symmetric {
        return Err(Error::param("params", "needs Δ₁=Δ₂, U₁=U₂, κ₁=κ₂ and F₂=0"));
    }
    let dt = params.delta_tilde(Mode::One);
    let u = params.u1;
    let j = C64::new(params.j_hop, 0.0);
    let f = params.f1;
    let j2 = j * j;
    let s = j2 - dt * dt;
    let q = dt * (u + dt) - j2;
    if s.norm() == 0.0 || q.norm() == 0.0 || (u + dt).norm() == 0.0 {
        return Err(Error::Singular("closed-form denominators vanish".into()));
    }
    let r2 = 2.0 * std::f64::consts::SQRT_2;
    let basis = FockBasis::new(2);
    let mut coeffs = vec![C64::new(0.0, 0.0); basis.len()];
    let mut set = |n: usize, m: usize, v: C64| coeffs[basis.index_of(n, m).unwrap()] = v;
    set(0, 0, C64::new(1.0, 0.0));
    set(1, 0, f * dt / s);
    set(0, 1, -f * j / s);
    set(2, 0, f * f * (j2 * u + 2.0 * dt * dt * (u + dt)) / (r2 * (u + dt) * (-s) * q));
    set(0, 2, f * f * j2 * (u + 2.0 * dt) / (r2 * (u + dt) * (-s) * q));
    set(1, 1, f * f * j * (u + 2.0 * dt) / (2.0 * s * q));
    Ok(WeakDriveAmplitudes { basis, coeffs, warnings: Vec::new() })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observables {
    pub n1: f64,
    pub n2: f64,
    /// NaN when the mode is empty.
    pub g2_1: f64,
    pub g2_2: f64,
}

/// Exact sums over the coefficient table.
pub fn observables(c: &WeakDriveAmplitudes) -> Result<Observables> {
    let mut n1 = 0.0;
    let mut n2 = 0.0;
    let mut pairs1 = 0.0;
    let mut pairs2 = 0.0;
    for (&(n, m), z) in c.basis.states().iter().zip(&c.coeffs) {
        let p = z.norm_sqr();
        let (nf, mf) = (n as f64, m as f64);
        n1 += nf * p;
        n2 += mf * p;
        pairs1 += nf * (nf - 1.0) * p;
        pairs2 += mf * (mf - 1.0) * p;
    }
    if n1 == 0.0 && n2 == 0.0 {
        return Err(Error::Undefined("both modes empty, g² undefined".into()));
    }
    let g = |pairs: f64, n: f64| if n > 0.0 { pairs / (n * n) } else { f64::NAN };
    Ok(Observables { n1, n2, g2_1: g(pairs1, n1), g2_2: g(pairs2, n2) })
}

/// Leading-order shortcuts `n₁ ≈ |c₁₀|²`, `g²₁ ≈ 2|c₂₀|²/|c₁₀|⁴` and mode-2 analogues.
pub fn leading_order(c: &WeakDriveAmplitudes) -> Observables {
    let n1 = c.get(1, 0).norm_sqr();
    let n2 = c.get(0, 1).norm_sqr();
    Observables {
        n1,
        n2,
        g2_1: 2.0 * c.get(2, 0).norm_sqr() / (n1 * n1),
        g2_2: 2.0 * c.get(0, 2).norm_sqr() / (n2 * n2),
    }
}

/// Weak-drive `g²(0)` of a single cavity with Kerr term `U â†²â²`:
/// `|Δ̃|²/|Δ̃ + U|²`.
pub fn kerr_g2(delta: f64, u: f64, kappa: f64) -> f64 {
    let dt = C64::new(delta, -0.5 * kappa);
    dt.norm_sqr() / (dt + u).norm_sqr()
}

/// The printed single-cavity estimate `|Δ̃|⁴/|Δ̃(2U + Δ̃)|²`, which equals
/// [`kerr_g2`] with `U → 2U`.
pub fn kerr_g2_printed(delta: f64, u: f64, kappa: f64) -> f64 {
    let dt = C64::new(delta, -0.5 * kappa);
    dt.norm_sqr().powi(2) / (dt * (2.0 * u + dt)).norm_sqr()
}
