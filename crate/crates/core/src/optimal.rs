//! Closed-form optimal-interference conditions, effective Kerr mappings and
//! a brute-force minimizer used to cross-check them.

use rayon::prelude::*;

use crate::dynamics::{JcParams, SystemParams};
use crate::fock::Mode;
use crate::weakdrive::solve_manifolds;
use crate::{Error, Result, C64, I};

/// A parameter assignment that cancels one weak-drive amplitude.
///
/// Both algebraic branches are kept; `branches[0]` is the `+` root.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalCondition {
    /// Photon numbers `(n, m)` of the cancelled amplitude `c_nm`.
    pub target: (usize, usize),
    pub branches: [Vec<(&'static str, C64)>; 2],
    pub notes: Vec<String>,
}

impl OptimalCondition {
    fn single(target: (usize, usize), name: &'static str, plus: C64, minus: C64) -> Self {
        OptimalCondition { target, branches: [vec![(name, plus)], vec![(name, minus)]], notes: Vec::new() }
    }

    /// Value assigned to `name` on `branch` (0 = `+`, 1 = `−`).
    pub fn value(&self, branch: usize, name: &str) -> Option<C64> {
        self.branches.get(branch)?.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

/// Output of [`delta_u_opt`]; index 0 is the `+` branch of `Δ_opt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaUOpt {
    pub delta: [f64; 2],
    pub u: [f64; 2],
    /// `U ≪ κ` limit `2κ²/(3√3 J²)`.
    pub asymptote: f64,
}

impl DeltaUOpt {
    pub fn condition(&self) -> OptimalCondition {
        let r = |x: f64| C64::new(x, 0.0);
        OptimalCondition {
            target: (2, 0),
            branches: [
                vec![("delta", r(self.delta[0])), ("u", r(self.u[0]))],
                vec![("delta", r(self.delta[1])), ("u", r(self.u[1]))],
            ],
            notes: vec!["identical cavities, only mode 1 driven".into()],
        }
    }
}

/// Detuning and nonlinearity that cancel `c₂₀` for identical cavities
/// driven on mode 1 at hopping `J`.
pub fn delta_u_opt(j: f64, kappa: f64) -> Result<DeltaUOpt> {
    if !(j > 0.0 && kappa > 0.0) {
        return Err(Error::param("j", "J and κ must be positive"));
    }
    let (j2, k2) = (j * j, kappa * kappa);
    if 2.0 * j2 <= k2 {
        return Err(Error::param(
            "j",
            "no real optimum for 2J² ≤ κ²; Δ_opt = 0 would require 2J² = κ², where U_opt has a pole",
        ));
    }
    let inner = (9.0 * j2 * j2 + 8.0 * k2 * j2).sqrt() - k2 - 3.0 * j2;
    let d = 0.5 * inner.max(0.0).sqrt();
    let u = |d: f64| d * (4.0 * d * d + 5.0 * k2) / (2.0 * (2.0 * j2 - k2));
    Ok(DeltaUOpt { delta: [d, -d], u: [u(d), u(-d)], asymptote: 2.0 * k2 / (3.0 * 3f64.sqrt() * j2) })
}

/// Inverse of [`delta_u_opt`] on the `+` branch: the hopping `J` whose
/// optimal nonlinearity equals `u`, with the matching optimum.
pub fn optimum_for_u(u: f64, kappa: f64) -> Result<(f64, DeltaUOpt)> {
    if !(u > 0.0 && u.is_finite() && kappa > 0.0) {
        return Err(Error::param("u", "U and κ must be positive"));
    }
    // U_opt falls monotonically from +∞ at J = κ/√2 to 0 as J → ∞
    let mut lo = (kappa * std::f64::consts::FRAC_1_SQRT_2).ln();
    let mut hi = (1e4 * kappa).ln();
    if delta_u_opt(hi.exp(), kappa)?.u[0] > u {
        return Err(Error::param("u", "below the range reachable with J ≤ 10⁴κ"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match delta_u_opt(mid.exp(), kappa) {
            Ok(o) if o.u[0] <= u => hi = mid,
            _ => lo = mid,
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let j = hi.exp();
    Ok((j, delta_u_opt(j, kappa)?))
}

fn sum_tilde(p: &SystemParams) -> (C64, C64, C64) {
    let d1 = p.delta_tilde(Mode::One);
    let d2 = p.delta_tilde(Mode::Two);
    (d1, d2, d1 + d2)
}

/// Drive on mode 1 that cancels `c₀₂` of the cascaded pair (`J = 0`,
/// one-way coupling `χ`), for the given `F₂`.
pub fn f1_opt_cascaded(params: &SystemParams, chi: f64) -> Result<OptimalCondition> {
    params.validate()?;
    if !(chi > 0.0) {
        return Err(Error::param("chi", "cascade coupling must be positive"));
    }
    let (d1, d2, dt) = sum_tilde(params);
    let u1 = params.u1;
    let ut1 = d1 + u1;
    let den = (dt + u1) * chi;
    if den.norm() == 0.0 {
        return Err(Error::Singular("Δ̃ + U₁ = 0".into()));
    }
    let root = (u1 * ut1 * dt * d2).sqrt();
    let f2 = params.f2;
    let mut c = OptimalCondition::single(
        (0, 2),
        "f1",
        I * f2 * (dt * ut1 + root) / den,
        I * f2 * (dt * ut1 - root) / den,
    );
    c.notes.push("independent of U₂; requires J = 0".into());
    Ok(c)
}

/// Printed drive condition for the coherently coupled pair driven on both
/// ports. Substitution shows it cancels `c₀₂`; the roots that cancel `c₂₀`
/// are computed numerically by [`f1_roots`] and recorded in the notes.
pub fn f1_opt_coherent(params: &SystemParams) -> Result<OptimalCondition> {
    params.validate()?;
    let j = params.j_hop;
    if j == 0.0 {
        return Err(Error::param("j_hop", "J = 0: use the output-mixing condition instead"));
    }
    let (_, d2, dt) = sum_tilde(params);
    let u1 = params.u1;
    let ut1 = params.delta_tilde(Mode::One) + u1;
    let den = j * j * (dt + u1);
    if den.norm() == 0.0 {
        return Err(Error::Singular("Δ̃ + U₁ = 0".into()));
    }
    let f2 = params.f2;
    let root = (f2 * f2 * j * j * u1 * (d2 * dt * ut1 - j * j * (dt + u1))).sqrt();
    let lead = f2 * dt * ut1 * j;
    let mut c = OptimalCondition::single((0, 2), "f1", (lead + root) / den, (lead - root) / den);
    if let Ok(r) = f1_roots(params, (2, 0)) {
        c.notes.push(format!("c20 = 0 numerically at F1 = {:.6e} or {:.6e}", r[0], r[1]));
    }
    Ok(c)
}

/// Both values of `F₁` (at fixed `F₂`) that cancel the two-photon amplitude
/// `target`, from the exact quadratic dependence of the weak-drive solution.
pub fn f1_roots(params: &SystemParams, target: (usize, usize)) -> Result<[C64; 2]> {
    f1_roots_with(params, target, None)
}

pub(crate) fn f1_roots_with(params: &SystemParams, target: (usize, usize), chi: Option<f64>) -> Result<[C64; 2]> {
    if target.0 + target.1 != 2 {
        return Err(Error::param("target", "must be a two-photon amplitude"));
    }
    let s = if params.f2.norm() > 0.0 { params.f2.norm() } else { 1.0 };
    let at = |f1: f64| -> Result<C64> {
        let p = params.with_drives(C64::new(f1, 0.0), params.f2);
        Ok(solve_manifolds(&p, 2, chi)?.get(target.0, target.1))
    };
    let (c0, cp, cm) = (at(0.0)?, at(s)?, at(-s)?);
    let a = (cp + cm - 2.0 * c0) / (2.0 * s * s);
    let b = (cp - cm) / (2.0 * s);
    if a.norm() <= 1e-14 * (b.norm() / s + c0.norm() / (s * s)) {
        if b.norm() == 0.0 {
            return Err(Error::Singular("target amplitude does not depend on F₁".into()));
        }
        let x = -c0 / b;
        return Ok([x, x]);
    }
    let disc = (b * b - 4.0 * a * c0).sqrt();
    // avoid cancellation between -b and the discriminant
    let q = if (b.conj() * disc).re >= 0.0 { -0.5 * (b + disc) } else { -0.5 * (b - disc) };
    if q.norm() == 0.0 {
        return Ok([C64::new(0.0, 0.0); 2]);
    }
    Ok([q / a, c0 / q])
}

/// Cavity-emitter optimum with the emitter undriven: `Δ₁|opt` and `g|opt`
/// cancelling the two-photon cavity amplitude for the given `Δ₂`, `κ₁`, `κ₂`.
pub fn jc_opt(jc: &JcParams) -> Result<OptimalCondition> {
    if !(jc.kappa2 > 0.0 && jc.kappa1 > 0.0) {
        return Err(Error::param("kappa", "loss rates must be positive"));
    }
    let (d2, k1, k2) = (jc.delta2, jc.kappa1, jc.kappa2);
    let d1 = -d2 * (k1 + 2.0 * k2) / (2.0 * k2);
    let g = ((d2 * d2 + k2 * k2) * (k1 + k2)).sqrt() / (2.0 * k2.sqrt());
    let r = |x: f64| C64::new(x, 0.0);
    Ok(OptimalCondition {
        target: (2, 0),
        branches: [vec![("delta1", r(d1)), ("g", r(g))], vec![("delta1", r(d1)), ("g", r(-g))]],
        notes: vec!["emitter undriven (F₂ = 0)".into()],
    })
}

/// Emitter drive `F₂` cancelling the two-photon cavity amplitude at
/// arbitrary cavity-emitter parameters.
pub fn jc_f2_opt(jc: &JcParams) -> Result<OptimalCondition> {
    if jc.g == 0.0 {
        return Err(Error::param("g", "coupling must be nonzero"));
    }
    let d1 = jc.cavity_delta_tilde();
    let d2 = jc.emitter_delta_tilde();
    let root = (d1 * (d1 + d2) - jc.g * jc.g).sqrt();
    let f = |s: f64| jc.f1 * (d1 + d2 + s * root) / jc.g;
    Ok(OptimalCondition::single((2, 0), "f2", f(1.0), f(-1.0)))
}

/// Mapping of a microscopic coupling onto an effective Kerr strength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KerrMapping {
    /// Dispersive cavity-emitter coupling `g` at detuning `Δ_ce`.
    DispersiveJc { g: f64, delta_ce: f64 },
    /// Radiation-pressure coupling `g` to a mechanical mode of frequency `Ω_m`.
    Optomechanical { g: f64, omega_m: f64 },
}

pub fn effective_kerr(map: KerrMapping) -> Result<f64> {
    match map {
        KerrMapping::DispersiveJc { g, delta_ce } => {
            if delta_ce == 0.0 {
                return Err(Error::param("delta_ce", "must be nonzero"));
            }
            Ok(g.powi(4) / delta_ce.powi(3))
        }
        KerrMapping::Optomechanical { g, omega_m } => {
            if !(omega_m > 0.0) {
                return Err(Error::param("omega_m", "must be positive"));
            }
            Ok(g * g / omega_m)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimizeOptions {
    pub grid_points: usize,
    /// Relative objective change below which the compass search stops.
    pub rtol: f64,
    pub max_evaluations: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { grid_points: 64, rtol: 1e-4, max_evaluations: 20_000 }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub argmin: Vec<f64>,
    pub value: f64,
    /// Every evaluated point in evaluation order (grid first, row-major).
    pub log: Vec<(Vec<f64>, f64)>,
}

/// Grid scan over the box `bounds` followed by compass refinement.
///
/// Grid evaluations run in parallel; their order in the log and the choice
/// of the best point do not depend on scheduling. Non-finite objective
/// values are treated as `+∞`.
pub fn minimize_g2<F>(objective: F, bounds: &[(f64, f64)], opts: &MinimizeOptions) -> Result<Minimum>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if bounds.is_empty() || bounds.iter().any(|&(a, b)| !(b > a) || !a.is_finite() || !b.is_finite()) {
        return Err(Error::param("bounds", "needs a non-empty finite box"));
    }
    if opts.grid_points < 2 {
        return Err(Error::param("grid_points", "needs at least two points per axis"));
    }
    let dims = bounds.len();
    let g = opts.grid_points;
    let total = g.checked_pow(dims as u32).ok_or_else(|| Error::param("grid_points", "grid too large"))?;
    let spacing: Vec<f64> = bounds.iter().map(|&(a, b)| (b - a) / (g - 1) as f64).collect();
    let point = |mut k: usize| -> Vec<f64> {
        let mut x = vec![0.0; dims];
        for d in (0..dims).rev() {
            x[d] = bounds[d].0 + spacing[d] * (k % g) as f64;
            k /= g;
        }
        x
    };
    let eval = |x: &[f64]| -> Result<f64> {
        let v = objective(x).map_err(|e| Error::Objective { point: x.to_vec(), source: Box::new(e) })?;
        Ok(if v.is_finite() { v } else { f64::INFINITY })
    };
    let scanned: Vec<Result<(Vec<f64>, f64)>> = (0..total)
        .into_par_iter()
        .map(|k| {
            let x = point(k);
            let v = eval(&x)?;
            Ok((x, v))
        })
        .collect();
    let mut log = Vec::with_capacity(total);
    for s in scanned {
        log.push(s?);
    }
    let best = (0..log.len()).min_by(|&a, &b| log[a].1.total_cmp(&log[b].1)).expect("non-empty grid");
    let (mut x, mut fx) = log[best].clone();

    let mut step = spacing.clone();
    let mut f_anchor = fx;
    let floor: Vec<f64> = spacing.iter().map(|s| s * 1e-6).collect();
    while log.len() < opts.max_evaluations {
        let mut moved = false;
        'axes: for d in 0..dims {
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[d] = (y[d] + sign * step[d]).clamp(bounds[d].0, bounds[d].1);
                if y[d] == x[d] {
                    continue;
                }
                let fy = eval(&y)?;
                log.push((y.clone(), fy));
                if fy < fx {
                    x = y;
                    fx = fy;
                    moved = true;
                    break 'axes;
                }
            }
        }
        if moved {
            continue;
        }
        let gain = f_anchor - fx;
        let small = step.iter().zip(&spacing).all(|(s, h)| *s < h / 8.0);
        if (small && gain <= opts.rtol * fx.abs()) || step.iter().zip(&floor).all(|(s, f)| s < f) {
            break;
        }
        f_anchor = fx;
        step.iter_mut().for_each(|s| *s *= 0.5);
    }
    Ok(Minimum { argmin: x, value: fx, log })
}

/// Secant solve in log-log coordinates for the drive magnitude whose
/// occupancy equals `target` to 0.1 %.
///
/// `occupancy(f)` returns the mean occupation at drive magnitude `f`.
pub fn drive_for_occupancy<F>(target: f64, guess: f64, occupancy: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(target > 0.0 && guess > 0.0) {
        return Err(Error::param("target", "occupancy and initial drive must be positive"));
    }
    let lt = target.ln();
    let mut f0 = guess;
    let mut n0 = occupancy(f0)?;
    if !(n0 > 0.0) {
        return Err(Error::Undefined("zero occupancy at the initial drive".into()));
    }
    if (n0 / target - 1.0).abs() < 1e-3 {
        return Ok((f0, n0));
    }
    // weak-drive scaling n ∝ F² gives the second point
    let mut f1 = f0 * (target / n0).sqrt();
    let mut n1 = occupancy(f1)?;
    for _ in 0..60 {
        if (n1 / target - 1.0).abs() < 1e-3 {
            return Ok((f1, n1));
        }
        let (x0, x1) = (f0.ln(), f1.ln());
        let (y0, y1) = (n0.ln() - lt, n1.ln() - lt);
        let slope = if (y1 - y0).abs() > 0.0 && x1 != x0 { (y1 - y0) / (x1 - x0) } else { 2.0 };
        // bound the step so a flat or bistable region cannot throw the iterate far away
        let dx = (-y1 / slope.max(0.1)).clamp(-2.0, 2.0);
        f0 = f1;
        n0 = n1;
        f1 = (x1 + dx).exp();
        n1 = occupancy(f1)?;
        if !(n1 > 0.0) {
            return Err(Error::Undefined("zero occupancy during the drive search".into()));
        }
    }
    Err(Error::NonConvergence { residual: (n1 / target - 1.0).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimum_for_u_inverts_the_optimum() {
        for u in [1e-3, 1e-2, 4e-2, 1.0] {
            let (j, o) = optimum_for_u(u, 1.0).unwrap();
            assert!((o.u[0] / u - 1.0).abs() < 1e-10, "u={u} j={j}");
        }
        assert!(optimum_for_u(0.0, 1.0).is_err());
    }
    use crate::weakdrive::{closed_form_single_drive, jc_solve};

    #[test]
    fn optimum_at_pi_hopping() {
        let o = delta_u_opt(std::f64::consts::PI, 1.0).unwrap();
        assert!((o.u[0] - 4e-2).abs() < 0.03 * 4e-2, "{}", o.u[0]);
        assert_eq!(o.u[1], -o.u[0]);
    }

    #[test]
    fn pole_is_rejected() {
        assert!(delta_u_opt(1.0 / 2f64.sqrt(), 1.0).is_err());
        assert!(delta_u_opt(0.3, 1.0).is_err());
    }

    #[test]
    fn delta_u_cancels_c20() {
        let o = delta_u_opt(2.5, 1.0).unwrap();
        for b in 0..2 {
            let p = SystemParams::symmetric(o.delta[b], o.u[b], 2.5, C64::new(1e-3, 0.0), 1.0);
            let c = closed_form_single_drive(&p).unwrap();
            assert!(c.get(2, 0).norm() < 1e-12 * 1e-6, "{}", c.get(2, 0));
        }
    }

    #[test]
    fn kerr_mappings() {
        let d = effective_kerr(KerrMapping::DispersiveJc { g: 0.1, delta_ce: 1.0 }).unwrap();
        assert!((d - 1e-4).abs() < 1e-18);
        let o = effective_kerr(KerrMapping::Optomechanical { g: 0.1, omega_m: 10.0 }).unwrap();
        assert!((o - 1e-3).abs() < 1e-18);
        assert!(effective_kerr(KerrMapping::Optomechanical { g: 0.1, omega_m: 0.0 }).is_err());
    }

    #[test]
    fn resonant_jc_optimum() {
        let jc = JcParams {
            delta1: 0.0,
            delta2: 0.0,
            g: 0.0,
            kappa1: 1.0,
            kappa2: 1.0,
            f1: C64::new(1e-3, 0.0),
            f2: C64::new(0.0, 0.0),
        };
        let c = jc_opt(&jc).unwrap();
        assert!((c.value(0, "g").unwrap().re - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.value(0, "delta1").unwrap().re, 0.0);
        let at = JcParams { g: c.value(0, "g").unwrap().re, ..jc };
        let a = jc_solve(&at, 2).unwrap();
        assert!(a.get(2, 0).norm() < 1e-10 * 1e-6);
    }

    #[test]
    fn numeric_roots_cancel_target() {
        let p = SystemParams {
            delta1: 0.2,
            delta2: -0.1,
            u1: 0.03,
            u2: 0.07,
            j_hop: 0.5,
            f2: C64::new(1e-2, 0.0),
            ..Default::default()
        };
        for target in [(2, 0), (0, 2), (1, 1)] {
            for f1 in f1_roots(&p, target).unwrap() {
                let c = solve_manifolds(&p.with_drives(f1, p.f2), 2, None).unwrap();
                assert!(c.get(target.0, target.1).norm() < 1e-12 * 1e-4, "{target:?}");
            }
        }
    }

    #[test]
    fn minimizer_finds_quadratic_bowl() {
        let m = minimize_g2(
            |x| Ok((x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.2).powi(2) + 1.0),
            &[(-1.0, 1.0), (-1.0, 1.0)],
            &MinimizeOptions { grid_points: 9, ..Default::default() },
        )
        .unwrap();
        assert!((m.argmin[0] - 0.3).abs() < 1e-2 && (m.argmin[1] + 0.2).abs() < 1e-2, "{:?}", m.argmin);
    }

    #[test]
    fn minimizer_reports_failing_point() {
        let e = minimize_g2(
            |x| if x[0] > 0.5 { Err(Error::Undefined("boom".into())) } else { Ok(x[0]) },
            &[(0.0, 1.0)],
            &MinimizeOptions { grid_points: 4, ..Default::default() },
        )
        .unwrap_err();
        assert!(matches!(e, Error::Objective { .. }));
    }

    #[test]
    fn secant_hits_occupancy() {
        let (f, n) = drive_for_occupancy(1e-3, 1e-2, |f| Ok(f * f / (1.0 + f * f))).unwrap();
        assert!((n / 1e-3 - 1.0).abs() < 1e-3);
        assert!((f * f / (1.0 + f * f) - n).abs() < 1e-15);
    }
}
