//! Gaussian-state analytics: displaced squeezed (thermal) states, their
//! photon statistics and the optimal displacement/squeezing relations.
//!
//! Convention: `|α, ξ⟩ = D(α)S(ξ)|0⟩` with `S(ξ) = exp[½(ξ*â² − ξâ†²)]`,
//! `ξ = r e^{iθ}` and `α = ᾱ e^{iφ}`; intensity squeezing at `θ = 2φ`.

use ndarray::Array2;

use crate::dynamics::SystemParams;
use crate::fock::{expectation, DensityMatrix, Mode, Operator};
use crate::linalg::hermitian_eigen;
use crate::{Error, Result, C64, I};

/// Largest squeeze magnitude accepted by [`pn_distribution`].
pub const MAX_SQUEEZE: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SqueezeParams {
    pub r: f64,
    pub theta: f64,
    pub alpha_bar: f64,
    pub phi: f64,
    pub n_eff: f64,
}

impl SqueezeParams {
    /// Intensity-squeezed state with real displacement (`θ = 2φ = 0`).
    pub fn intensity(alpha_bar: f64, r: f64) -> Self {
        SqueezeParams { r, alpha_bar, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::param("r", "must be finite and non-negative"));
        }
        if !(self.alpha_bar >= 0.0 && self.alpha_bar.is_finite()) {
            return Err(Error::param("alpha_bar", "must be finite and non-negative"));
        }
        if !(self.n_eff >= 0.0 && self.n_eff.is_finite()) {
            return Err(Error::param("n_eff", "must be finite and non-negative"));
        }
        if !(self.theta.is_finite() && self.phi.is_finite()) {
            return Err(Error::param("theta", "phases must be finite"));
        }
        Ok(())
    }

    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.alpha_bar, self.phi)
    }

    /// `(p, s)` entering the `g²` formula; `p` is the squeezing-noise occupation.
    pub fn noise_moments(&self) -> (f64, f64) {
        let h = self.n_eff + 0.5;
        (h * (2.0 * self.r).cosh() - 0.5, h * (2.0 * self.r).sinh())
    }

    /// `n̄ = ᾱ² + p`.
    pub fn mean_occupation(&self) -> f64 {
        self.alpha_bar * self.alpha_bar + self.noise_moments().0
    }
}

/// Photon-number distribution `𝒫₀ … 𝒫_{n_max}` of a pure displaced squeezed state.
///
/// The Hermite polynomials are folded into the normalized recurrence
/// `Q_{n+1} = (2x̃Q_n − 2t²√n Q_{n−1})/√(n+1)` with `x̃ = γe^{−iθ/2}/(2cosh r)`
/// and `t² = tanh(r)/2`, so no factorial or power overflows.
pub fn pn_distribution(p: &SqueezeParams, n_max: usize) -> Result<Vec<f64>> {
    p.validate()?;
    if p.n_eff != 0.0 {
        return Err(Error::param("n_eff", "the closed form holds for pure states only"));
    }
    if p.r > MAX_SQUEEZE {
        return Err(Error::param("r", format!("must not exceed {MAX_SQUEEZE}")));
    }
    let (r, theta) = (p.r, p.theta);
    let alpha = p.alpha();
    let (ch, sh, th) = (r.cosh(), r.sinh(), r.tanh());
    let e = C64::from_polar(1.0, theta);
    let gamma = alpha * ch + alpha.conj() * e * sh;
    let xt = gamma * C64::from_polar(1.0, -0.5 * theta) / (2.0 * ch);
    let t2 = 0.5 * th;
    let pref = ((-alpha.norm_sqr() - 0.5 * th * (alpha * alpha * e.conj() + alpha.conj() * alpha.conj() * e)).exp()
        / ch)
        .re;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = C64::new(0.0, 0.0);
    let mut cur = C64::new(1.0, 0.0);
    for n in 0..=n_max {
        out.push(pref * cur.norm_sqr());
        let next = (2.0 * xt * cur - 2.0 * t2 * (n as f64).sqrt() * prev) / ((n + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    Ok(out)
}

/// Printed two-photon probability for `θ = 2φ = 0`.
pub fn p2(alpha_bar: f64, r: f64) -> f64 {
    let a2 = alpha_bar * alpha_bar;
    let bracket = (2.0 * r).sinh() - 2.0 * a2 * (2.0 * r).exp();
    0.125 / r.cosh().powi(5) * bracket * bracket * (-a2 * (1.0 + r.tanh())).exp()
}

/// Displacement cancelling `𝒫₂` at squeezing `r`: `½e^{−2r}√(e^{4r} − 1)`.
pub fn alpha_opt(r: f64) -> f64 {
    // ½√(1 − e^{−4r}), written with expm1 for accuracy at small r
    0.5 * (-(-4.0 * r).exp_m1()).sqrt()
}

/// Inverse of [`alpha_opt`]; defined for `ᾱ < ½`.
pub fn r_for_alpha_opt(alpha_bar: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&alpha_bar) {
        return Err(Error::param("alpha_bar", "𝒫₂ = 0 needs 0 ≤ ᾱ < 1/2"));
    }
    Ok(-0.25 * (-4.0 * alpha_bar * alpha_bar).ln_1p())
}

/// `g²(0) = 1 + [p² + s² + 2ᾱ²(p − s cos(θ − 2φ))]/(ᾱ² + p)²`.
pub fn g2_gaussian(p: &SqueezeParams) -> Result<f64> {
    p.validate()?;
    let (pp, s) = p.noise_moments();
    let a2 = p.alpha_bar * p.alpha_bar;
    let n = a2 + pp;
    if !(n > 0.0) {
        return Err(Error::Undefined("zero occupation".into()));
    }
    Ok(1.0 + (pp * pp + s * s + 2.0 * a2 * (pp - s * (p.theta - 2.0 * p.phi).cos())) / (n * n))
}

const GOLDEN_TOL: f64 = 1e-8;

/// Golden-section minimum of `f` on `[a, b]` after a coarse scan that
/// brackets the global minimum.
fn bracketed_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, scan: usize) -> (f64, f64) {
    let xs: Vec<f64> = (0..=scan).map(|k| a + (b - a) * k as f64 / scan as f64).collect();
    let k = (0..xs.len()).min_by(|&i, &j| f(xs[i]).total_cmp(&f(xs[j]))).unwrap_or(0);
    let mut lo = xs[k.saturating_sub(1)];
    let mut hi = xs[(k + 1).min(scan)];
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > GOLDEN_TOL {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    // the bracket may sit on a boundary where the endpoint is best
    [(x, f(x)), (xs[k], f(xs[k]))].into_iter().min_by(|p, q| p.1.total_cmp(&q.1)).unwrap()
}

/// `(r_opt, g²_min)` minimizing [`g2_gaussian`] over `r ∈ [0, 5]` at fixed
/// displacement, with `θ = 2φ`.
pub fn optimal_r(alpha_bar: f64, n_eff: f64) -> Result<(f64, f64)> {
    let base = SqueezeParams { alpha_bar, n_eff, ..Default::default() };
    base.validate()?;
    if alpha_bar == 0.0 && n_eff == 0.0 {
        return Err(Error::Undefined("vacuum: g² undefined at r = 0".into()));
    }
    let f = |r: f64| g2_gaussian(&SqueezeParams { r, ..base }).unwrap_or(f64::INFINITY);
    Ok(bracketed_min(f, 0.0, MAX_SQUEEZE, 500))
}

/// Optimal Gaussian state at fixed mean occupation `n̄`: minimizes `g²` over
/// `r` with `ᾱ² = n̄ − p(r)`. Returns `(r, ᾱ, g²)`.
pub fn optimal_at_occupancy(n_bar: f64, n_eff: f64) -> Result<(f64, f64, f64)> {
    if !(n_bar > 0.0 && n_bar.is_finite()) {
        return Err(Error::param("n_bar", "must be positive"));
    }
    if !(n_eff >= 0.0 && n_eff < n_bar) {
        return Err(Error::param("n_eff", "needs 0 ≤ n_eff < n̄"));
    }
    // p(r) = (n_eff + ½)cosh 2r − ½ ≤ n̄
    let r_max = 0.5 * ((n_bar + 0.5) / (n_eff + 0.5)).acosh();
    let state = |r: f64| {
        let p = SqueezeParams { r, n_eff, ..Default::default() };
        let a2 = (n_bar - p.noise_moments().0).max(0.0);
        SqueezeParams { alpha_bar: a2.sqrt(), ..p }
    };
    let f = |r: f64| g2_gaussian(&state(r)).unwrap_or(f64::INFINITY);
    let (r, g) = bracketed_min(f, 0.0, r_max, 400);
    Ok((r, state(r).alpha_bar, g))
}

/// First and second moments of a single field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldMoments {
    pub mean: C64,
    pub square: C64,
    pub number: f64,
}

impl FieldMoments {
    /// `⟨b⟩`, `⟨b²⟩`, `⟨b†b⟩` on `rho`.
    pub fn of(rho: &DensityMatrix, b: &Operator) -> Result<Self> {
        let mean = expectation(rho, b)?;
        let square = expectation(rho, &(b * b))?;
        let number = expectation(rho, &(&b.adjoint() * b))?.re;
        Ok(FieldMoments { mean, square, number })
    }

    pub fn of_mode(rho: &DensityMatrix, mode: Mode) -> Result<Self> {
        Self::of(rho, &crate::fock::FockBasis::from_tag(rho.tag()).annihilation(mode))
    }
}

/// Squeezing read off the field moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezeEstimate {
    /// `|M| + |⟨â⟩|² − ⟨â†â⟩` with `M = ⟨â²⟩ − ⟨â⟩²`.
    pub r_printed: f64,
    /// `¼ ln[(1 + 2N + 2|M|)/(1 + 2N − 2|M|)]` with `N = ⟨â†â⟩ − |⟨â⟩|²`;
    /// exact for pure squeezed states.
    pub r_covariance: f64,
    /// `arg M`.
    pub theta_printed: f64,
    /// `arg(−M)`, the phase in the convention of [`SqueezeParams`].
    pub theta: f64,
}

pub fn extract_squeeze(m: &FieldMoments) -> SqueezeEstimate {
    let cov = m.square - m.mean * m.mean;
    let n = m.number - m.mean.norm_sqr();
    let a = cov.norm();
    let num = 1.0 + 2.0 * n + 2.0 * a;
    let den = 1.0 + 2.0 * n - 2.0 * a;
    let r_covariance = if den > 0.0 { 0.25 * (num / den).ln() } else { f64::INFINITY };
    SqueezeEstimate { r_printed: a - n, r_covariance, theta_printed: cov.arg(), theta: (-cov).arg() }
}

/// Effective parametric interaction of mode 1 mediated by mode 2:
/// `U₁α₁² − J²U₂α₂²/(U₂²|α₂|⁴ − |Δ̃₂|²)`.
pub fn lambda_eff(params: &SystemParams, alpha1: C64, alpha2: C64) -> Result<C64> {
    let den = params.u2 * params.u2 * alpha2.norm_sqr().powi(2) - params.delta_tilde(Mode::Two).norm_sqr();
    if den == 0.0 {
        return Err(Error::Singular("U₂²|α₂|⁴ = |Δ̃₂|²".into()));
    }
    let j2 = params.j_hop * params.j_hop;
    Ok(params.u1 * alpha1 * alpha1 - j2 * params.u2 * alpha2 * alpha2 / den)
}

/// `(r, θ) ≈ (2|λ|/κ, arg λ)`, valid for `|λ| ≪ κ`.
pub fn squeeze_from_lambda(lambda: C64, kappa: f64) -> (f64, f64) {
    (2.0 * lambda.norm() / kappa, lambda.arg())
}

/// `n̄_eff = (1 − P)/(2P)`.
pub fn n_eff_from_purity(purity: f64) -> Result<f64> {
    if !(purity > 0.0 && purity <= 1.0 + 1e-12) {
        return Err(Error::param("purity", "must lie in (0, 1]"));
    }
    Ok(((1.0 - purity) / (2.0 * purity)).max(0.0))
}

/// Single-mode `ladder` operator on `n_levels` Fock levels.
fn ladder(n_levels: usize) -> Array2<C64> {
    Array2::from_shape_fn((n_levels, n_levels), |(i, j)| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `exp(G)` for anti-Hermitian `G`, via the spectrum of `iG`.
fn expm_anti_hermitian(g: &Array2<C64>) -> Result<Array2<C64>> {
    let h = g.mapv(|z| I * z);
    let (vals, vecs) = hermitian_eigen(&h)?;
    let n = vals.len();
    let phase = Array2::from_shape_fn((n, n), |(i, j)| if i == j { C64::from_polar(1.0, -vals[i]) } else { C64::new(0.0, 0.0) });
    Ok(vecs.dot(&phase).dot(&vecs.t().mapv(|z| z.conj())))
}

/// Fock amplitudes of `D(α)S(ξ)|0⟩` from matrix exponentials on `n_levels`
/// levels. Fails when more than `1e-10` of the weight sits in the top
/// tenth of the truncation.
pub fn fock_displaced_squeezed(p: &SqueezeParams, n_levels: usize) -> Result<Vec<C64>> {
    p.validate()?;
    if n_levels < 10 {
        return Err(Error::param("n_levels", "needs at least 10 levels"));
    }
    let a = ladder(n_levels);
    let ad = a.t().mapv(|z| z.conj());
    let xi = C64::from_polar(p.r, p.theta);
    let alpha = p.alpha();
    let sq = (a.dot(&a).mapv(|z| xi.conj() * z) - ad.dot(&ad).mapv(|z| xi * z)).mapv(|z| 0.5 * z);
    let disp = ad.mapv(|z| alpha * z) - a.mapv(|z| alpha.conj() * z);
    let state = expm_anti_hermitian(&disp)?.dot(&expm_anti_hermitian(&sq)?.column(0));
    let tail: f64 = state.iter().skip(n_levels - n_levels / 10).map(|z| z.norm_sqr()).sum();
    if tail > 1e-10 {
        return Err(Error::param("n_levels", format!("truncation too small (tail weight {tail:.1e})")));
    }
    Ok(state.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_without_squeezing() {
        let p = SqueezeParams::intensity(0.8, 0.0);
        let pn = pn_distribution(&p, 10).unwrap();
        let mut want = (-0.64f64).exp();
        for (n, v) in pn.iter().enumerate() {
            assert!((v - want).abs() < 1e-15);
            want *= 0.64 / (n + 1) as f64;
        }
    }

    #[test]
    fn closed_form_matches_fock_construction() {
        let p = SqueezeParams { r: 0.7, theta: 0.4, alpha_bar: 0.4, phi: -0.3, n_eff: 0.0 };
        let pn = pn_distribution(&p, 30).unwrap();
        let amps = fock_displaced_squeezed(&p, 60).unwrap();
        for n in 0..=30 {
            assert!((pn[n] - amps[n].norm_sqr()).abs() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn p2_matches_distribution_and_vanishes_at_optimum() {
        let pn = pn_distribution(&SqueezeParams::intensity(0.2, 0.3), 2).unwrap();
        assert!((p2(0.2, 0.3) - pn[2]).abs() < 1e-10);
        let a = alpha_opt(1.0);
        assert!(p2(a, 1.0) < 1e-12);
        assert!(pn_distribution(&SqueezeParams::intensity(a, 1.0), 2).unwrap()[2] < 1e-12);
    }

    #[test]
    fn alpha_opt_limits() {
        assert!((alpha_opt(1e-6) / 1e-3 - 1.0).abs() < 1e-4);
        let a = alpha_opt(5.0);
        assert!(a < 0.5 && 0.5 - a < 1e-4);
        assert!((r_for_alpha_opt(alpha_opt(0.37)).unwrap() - 0.37).abs() < 1e-12);
    }

    #[test]
    fn gaussian_g2_limits() {
        assert_eq!(g2_gaussian(&SqueezeParams::intensity(0.5, 0.0)).unwrap(), 1.0);
        let th = SqueezeParams { n_eff: 0.3, ..Default::default() };
        assert!((g2_gaussian(&th).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn weak_displacement_optimum() {
        let (r, g) = optimal_r(0.01, 0.0).unwrap();
        assert!((r / 1e-4 - 1.0).abs() < 0.05, "{r}");
        assert!((g / (4.0 * r) - 1.0).abs() < 0.05);
    }

    #[test]
    fn covariance_estimator_is_exact_for_squeezed_vacuum() {
        let p = SqueezeParams { r: 0.1, theta: 0.6, ..Default::default() };
        let amps = fock_displaced_squeezed(&p, 40).unwrap();
        let basis = crate::fock::FockBasis::with_mode2_cap(39, 0);
        let rho = DensityMatrix::from_pure(&basis, &amps).unwrap();
        let est = extract_squeeze(&FieldMoments::of_mode(&rho, Mode::One).unwrap());
        assert!((est.r_covariance - 0.1).abs() < 1e-10);
        assert!((est.theta - 0.6).abs() < 1e-10);
        // the printed form is sinh(r)e^{−r}
        assert!((est.r_printed - 0.1f64.sinh() * (-0.1f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn purity_mapping() {
        assert_eq!(n_eff_from_purity(1.0).unwrap(), 0.0);
        assert_eq!(n_eff_from_purity(0.5).unwrap(), 0.5);
        assert!(n_eff_from_purity(0.0).is_err());
    }

    #[test]
    fn lambda_reduces_to_kerr_without_hopping() {
        let p = SystemParams { u1: 0.02, u2: 0.05, ..Default::default() };
        let a = C64::new(0.3, 0.1);
        assert_eq!(lambda_eff(&p, a, C64::new(0.2, 0.0)).unwrap(), 0.02 * a * a);
    }
}
