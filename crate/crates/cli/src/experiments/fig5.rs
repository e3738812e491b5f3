//! Steady-state `g²₁(τ)` at the optimal conditions for several `U`.

use upb_core::dynamics::{
    build_liouvillian, extremum_spacing, field_statistics, g2_tau_of, steady_state, BathParams, SystemParams,
};
use upb_core::{FockBasis, Mode, Result};

use super::fig2::optimum_params;
use super::{linspace, par_map, weak_drive_for, Context, Outcome};
use crate::config::OptimalRule;
use crate::output::Certificate;

/// Curve of one panel.
#[derive(Clone, Debug)]
pub struct Panel {
    pub u: f64,
    pub params: SystemParams,
    pub g2: Vec<f64>,
    pub n1: f64,
    pub top: f64,
    /// Mean spacing of successive extrema.
    pub half_period: Option<f64>,
}

/// `g²₁(τ)` on `taus` in the lab frame at the optimum for `u`, driven to
/// leading-order occupancy `n1`.
pub fn panel(u: f64, kappa: f64, n1: f64, bath: &BathParams, cutoff: usize, taus: &[f64]) -> Result<Panel> {
    let params = weak_drive_for(&optimum_params(u, kappa)?, n1)?;
    let basis = FockBasis::new(cutoff);
    let l = build_liouvillian(&params, bath, &basis)?;
    let rho = steady_state(&l)?;
    let a = basis.annihilation(Mode::One);
    let (n, _) = field_statistics(&rho, &a)?;
    let g2 = g2_tau_of(&l, &rho, &a, taus)?;
    let half_period = extremum_spacing(taus, &g2);
    Ok(Panel { u, params, g2, n1: n, top: basis.top_manifold_population(&rho), half_period })
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let sw = &ctx.cfg.sweep;
    let us = match (&sw.u_values, ctx.cfg.system.optimal) {
        (Some(v), _) => v.clone(),
        (None, OptimalRule::FromU) => vec![ctx.params.u1],
        _ => vec![1e-3, 1e-2, 1e-1, 1.0],
    };
    let n1 = sw.n1_target.unwrap_or(1e-6);
    let taus = linspace(0.0, sw.tau_max.unwrap_or(4.0), sw.tau_points.unwrap_or(ctx.resolution.pick(2001, 801)));
    let n = ctx.cutoff;
    let mut out = Outcome { frame: "lab".into(), states: Some(FockBasis::new(n).len()), ..Default::default() };

    let panels = par_map(&us, |&u| panel(u, ctx.kappa(), n1, &ctx.bath, n, &taus));
    let mut curves = ctx.table_with_reasons("fig5-g2tau", &["U [kappa]", "tau [1/kappa]", "g2_1(tau) [1]"]);
    curves = curves.meta("drive", format!("mode 1, leading-order n1 = {n1:e}"));
    let mut periods = ctx.table_with_reasons(
        "fig5-periods",
        &["U [kappa]", "J_opt [kappa]", "Delta_opt [kappa]", "n1 [1]", "extremum_spacing [1/kappa]", "pi/J [1/kappa]", "ratio [1]"],
    );
    for (&u, p) in us.iter().zip(panels) {
        match p {
            Ok(p) => {
                for (&t, &g) in taus.iter().zip(&p.g2) {
                    curves.push(vec![u.into(), t.into(), g.into()]);
                }
                let expected = std::f64::consts::PI / p.params.j_hop;
                let spacing = p.half_period.unwrap_or(f64::NAN);
                periods.push(vec![
                    u.into(),
                    p.params.j_hop.into(),
                    p.params.delta1.into(),
                    p.n1.into(),
                    spacing.into(),
                    expected.into(),
                    (spacing / expected).into(),
                ]);
                let plus = panel(u, ctx.kappa(), n1, &ctx.bath, n + 2, &taus[..2])?;
                out.certificates.push(Certificate::new(&format!("U={u:e}"), n, "g2_1(0)", Some(p.top), p.g2[0], plus.g2[0]));
            }
            Err(e) => {
                for &t in &taus {
                    curves.push_failed(vec![u.into(), t.into()], &e);
                }
                periods.push_failed(vec![u.into()], e);
            }
        }
    }
    out.tables.push(curves);
    out.tables.push(periods);
    Ok(out)
}
