//! Mixed output `b̂ = γ₁â₁ + γ₂â₂`: `(θ_out, φ_out)` maps, `g²_out(τ)` at
//! the optimal weight and the pulsed two-time map.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use upb_core::dynamics::{build_liouvillian, g2_tau_of, steady_state, BathParams, Liouvillian, SystemParams};
use upb_core::iomix::{gamma1_opt, output_moments, stokes_pair, MixingSpec};
use upb_core::{DensityMatrix, FockBasis, Result, C64};

use super::fig5bis::{gate_spec, pulsed_outputs};
use super::{linspace, par_map, Context, Outcome};
use crate::output::Certificate;

pub struct MixingSetup {
    pub params: SystemParams,
    pub gamma0: f64,
    pub optimum: MixingSpec,
}

/// Drives from the input Stokes angles and the optimal output weight on
/// `branch`, with `γ₂ = γ₀/√2` (`θ_out = π/2` when `|γ₁| = |γ₂|`).
pub fn setup(ctx: &Context) -> Result<MixingSetup> {
    let m = ctx.cfg.mixing.clone().unwrap_or_default();
    let (f1, f2) = stokes_pair(m.f0.unwrap_or(0.1), m.theta_in.unwrap_or(PI / 2.0), m.phi_in.unwrap_or(0.0));
    let params = ctx.params.with_drives(f1, f2);
    let gamma0 = m.gamma0.unwrap_or(1.0);
    let g2 = C64::new(gamma0 * FRAC_1_SQRT_2, 0.0);
    let cond = gamma1_opt(&params, g2)?;
    Ok(MixingSetup { params, gamma0, optimum: MixingSpec::new(cond.corrected[m.branch.unwrap_or(0)], g2) })
}

/// Stokes angles `(θ_out, φ_out)` of a weight pair, up to a global phase.
pub fn stokes_angles(mix: &MixingSpec) -> (f64, f64) {
    let theta = 2.0 * mix.gamma2.norm().atan2(mix.gamma1.norm());
    let phi = (mix.gamma2.arg() - mix.gamma1.arg()).rem_euclid(2.0 * PI);
    (theta, phi)
}

fn steady(params: &SystemParams, bath: &BathParams, cutoff: usize) -> Result<(Liouvillian, DensityMatrix)> {
    let l = build_liouvillian(params, bath, &FockBasis::new(cutoff))?;
    let rho = steady_state(&l)?;
    Ok((l, rho))
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let sw = &ctx.cfg.sweep;
    let n = ctx.cutoff;
    let s = setup(ctx)?;
    let mut out = Outcome { frame: "lab".into(), states: Some(FockBasis::new(n).len()), ..Default::default() };
    let (l, rho) = steady(&s.params, &ctx.bath, n)?;

    let m = sw.map_points.unwrap_or(ctx.resolution.pick(128, 32));
    let thetas = linspace(0.0, PI, m);
    let phis = linspace(0.0, 2.0 * PI, m);
    let cells: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| phis.iter().map(move |&p| (t, p))).collect();
    let values = par_map(&cells, |&(t, p)| output_moments(&rho, &MixingSpec::from_stokes(s.gamma0, t, p)?));
    let mut map = ctx
        .table_with_reasons("fig10ab-map", &["theta_out [rad]", "phi_out [rad]", "n_out [kappa]", "g2_out(0) [1]"])
        .meta("F1", format!("{}", s.params.f1))
        .meta("F2", format!("{}", s.params.f2))
        .meta("gamma0", format!("{:e}", s.gamma0));
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    for (&(t, p), v) in cells.iter().zip(values) {
        match v {
            Ok(o) => {
                if o.g2_out < best.2 {
                    best = (t, p, o.g2_out);
                }
                map.push(vec![t.into(), p.into(), o.n_out.into(), o.g2_out.into()]);
            }
            Err(e) => map.push_failed(vec![t.into(), p.into()], e),
        }
    }
    out.tables.push(map);
    let (th, ph) = stokes_angles(&s.optimum);
    out.set("optimal weight: theta_out", th);
    out.set("optimal weight: phi_out", ph);
    out.set("optimal weight: gamma1 re", s.optimum.gamma1.re);
    out.set("optimal weight: gamma1 im", s.optimum.gamma1.im);
    out.set("map minimum: theta_out", best.0);
    out.set("map minimum: phi_out", best.1);
    out.set("map minimum: g2_out", best.2);
    let at_opt = output_moments(&rho, &s.optimum)?;
    out.set("optimal weight: g2_out(0)", at_opt.g2_out);

    let taus = linspace(0.0, sw.tau_max.unwrap_or(10.0), sw.tau_points.unwrap_or(ctx.resolution.pick(2001, 801)));
    let g = g2_tau_of(&l, &rho, &s.optimum.operator(l.basis()), &taus)?;
    let mut c = ctx
        .table("fig10c-g2tau", &["tau [1/kappa]", "g2_out(tau) [1]"])
        .meta("gamma1", format!("{}", s.optimum.gamma1))
        .meta("gamma2", format!("{}", s.optimum.gamma2));
    for (&t, &v) in taus.iter().zip(&g) {
        c.push(vec![t.into(), v.into()]);
    }
    out.tables.push(c);

    let probe = MixingSpec::from_stokes(s.gamma0, PI / 2.0, 0.0)?;
    let (_, rho_plus) = steady(&s.params, &ctx.bath, n + 2)?;
    out.certificates.push(Certificate::new(
        "steady state, theta_out = pi/2, phi_out = 0",
        n,
        "g2_out(0)",
        Some(FockBasis::new(n).top_manifold_population(&rho)),
        output_moments(&rho, &probe)?.g2_out,
        output_moments(&rho_plus, &probe)?.g2_out,
    ));

    let gate = gate_spec(ctx, 1.0);
    let mix = s.optimum;
    let field = move |b: &FockBasis| mix.operator(b);
    pulsed_outputs(ctx, &mut out, "fig10d", &s.params, &ctx.bath, (s.params.f1, s.params.f2), 1.0, &field, &gate)?;
    Ok(out)
}
