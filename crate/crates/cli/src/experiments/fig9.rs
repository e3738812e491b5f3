//! One-way coupled pair: steady-state `g²₂(τ)` at the cascaded optimum and
//! the pulsed two-time map of cavity 2.

use upb_core::dynamics::{build_liouvillian, field_statistics, g2_tau_of, steady_state, BathParams, SystemParams};
use upb_core::optimal::f1_opt_cascaded;
use upb_core::{FockBasis, Mode, Result, C64};

use super::fig5bis::{gate_spec, pulsed_outputs};
use super::{first_crossing, linspace, Context, Outcome};
use crate::output::Certificate;

/// Cascaded parameters with `F₁` on the given optimal branch.
pub fn optimal_pair(params: &SystemParams, bath: &BathParams, branch: usize) -> Result<SystemParams> {
    let cond = f1_opt_cascaded(params, bath.chi(params))?;
    let f1 = cond.value(branch, "f1").unwrap_or(C64::new(0.0, 0.0));
    Ok(params.with_drives(f1, params.f2))
}

/// `(n₂, g²₂(τ), top-manifold population)` of the steady state.
pub fn cw_g2_tau(params: &SystemParams, bath: &BathParams, cutoff: usize, taus: &[f64]) -> Result<(f64, Vec<f64>, f64)> {
    let basis = FockBasis::new(cutoff);
    let l = build_liouvillian(params, bath, &basis)?;
    let rho = steady_state(&l)?;
    let a2 = basis.annihilation(Mode::Two);
    let (n2, _) = field_statistics(&rho, &a2)?;
    Ok((n2, g2_tau_of(&l, &rho, &a2, taus)?, basis.top_manifold_population(&rho)))
}

/// Delay at which `g²₂(τ)` first reaches `level`.
pub fn antibunching_span(taus: &[f64], g2: &[f64], level: f64) -> Option<f64> {
    first_crossing(taus, g2, level)
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let sw = &ctx.cfg.sweep;
    let n = ctx.cutoff;
    let mut out = Outcome { frame: "lab".into(), states: Some(FockBasis::new(n).len()), ..Default::default() };
    let taus = linspace(0.0, sw.tau_max.unwrap_or(10.0), sw.tau_points.unwrap_or(ctx.resolution.pick(2001, 801)));
    let chi = ctx.bath.chi(&ctx.params);
    out.set("chi", chi);

    let mut t = ctx
        .table("fig9a-g2tau", &["tau [1/kappa]", "g2_2(tau) branch + [1]", "g2_2(tau) branch - [1]"])
        .meta("chi", format!("{chi:e}"))
        .meta("F2", format!("{}", ctx.params.f2));
    let mut curves = Vec::new();
    for branch in 0..2 {
        let p = optimal_pair(&ctx.params, &ctx.bath, branch)?;
        let (n2, g, top) = cw_g2_tau(&p, &ctx.bath, n, &taus)?;
        let (_, gp, _) = cw_g2_tau(&p, &ctx.bath, n + 2, &taus[..2])?;
        let tag = if branch == 0 { "+" } else { "-" };
        t = t.meta(&format!("F1 branch {tag}"), format!("{}", p.f1));
        out.set(&format!("branch {tag}: F1 re"), p.f1.re);
        out.set(&format!("branch {tag}: F1 im"), p.f1.im);
        out.set(&format!("branch {tag}: n2"), n2);
        out.set(&format!("branch {tag}: g2_2(0)"), g[0]);
        out.set(
            &format!("branch {tag}: first tau with g2_2 = 0.5"),
            antibunching_span(&taus, &g, 0.5).unwrap_or(f64::NAN),
        );
        out.certificates.push(Certificate::new(&format!("CW branch {tag}"), n, "g2_2(0)", Some(top), g[0], gp[0]));
        curves.push(g);
    }
    for (k, &tau) in taus.iter().enumerate() {
        t.push(vec![tau.into(), curves[0][k].into(), curves[1][k].into()]);
    }
    out.tables.push(t);

    let p = optimal_pair(&ctx.params, &ctx.bath, 0)?;
    let gate = gate_spec(ctx, 5.0);
    let field = |b: &FockBasis| b.annihilation(Mode::Two);
    pulsed_outputs(ctx, &mut out, "fig9b", &p, &ctx.bath, (p.f1, p.f2), 5.0, &field, &gate)?;
    Ok(out)
}
