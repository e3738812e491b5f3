//! Weak-drive `g²₁(0)` maps over `(U, J)` at `Δ = Δ_opt(J)` and over
//! `(Δ₁, Δ₂)` at a fixed `(U, J)`.

use upb_core::dynamics::SystemParams;
use upb_core::optimal::{delta_u_opt, optimum_for_u};
use upb_core::weakdrive::{leading_order, solve_manifolds};
use upb_core::{Result, C64};

use super::{linspace, logspace, par_map, Context, Outcome};
use crate::output::Cell;

const PROBE_DRIVE: f64 = 1e-3;

/// Leading-order `g²₁(0)`; independent of the drive strength.
pub fn weak_g2(params: &SystemParams) -> Result<f64> {
    let p = params.with_drives(C64::new(PROBE_DRIVE, 0.0), C64::new(0.0, 0.0));
    Ok(leading_order(&solve_manifolds(&p, 2, None)?).g2_1)
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let sw = &ctx.cfg.sweep;
    let kappa = ctx.kappa();
    let m = sw.map_points.unwrap_or(ctx.resolution.pick(128, 32));
    let mut out = Outcome::default();

    let [u_lo, u_hi] = sw.u_range.unwrap_or([1e-3, 1.0]);
    let [j_lo, j_hi] = sw.j_range.unwrap_or([0.8, 30.0]);
    let us = logspace(u_lo, u_hi, m);
    let js = logspace(j_lo, j_hi, m);
    let cells: Vec<(f64, f64)> = js.iter().flat_map(|&j| us.iter().map(move |&u| (j, u))).collect();
    let values = par_map(&cells, |&(j, u)| -> Result<(f64, f64)> {
        let o = delta_u_opt(j, kappa)?;
        let p = SystemParams::symmetric(o.delta[0], u, j, C64::new(0.0, 0.0), kappa);
        Ok((o.delta[0], weak_g2(&p)?))
    });
    let mut map = ctx
        .table_with_reasons("fig3a-map-U-J", &["J [kappa]", "U [kappa]", "Delta [kappa]", "g2_1(0) [1]"])
        .meta("detuning", "Delta1 = Delta2 = Delta_opt(J), + branch")
        .meta("method", "weak-drive amplitudes, leading order");
    let mut best: Vec<(f64, f64)> = vec![(f64::NAN, f64::INFINITY); js.len()];
    for (k, (&(j, u), v)) in cells.iter().zip(values).enumerate() {
        match v {
            Ok((d, g)) => {
                map.push(vec![j.into(), u.into(), d.into(), g.into()]);
                let row = &mut best[k / us.len()];
                if g < row.1 {
                    *row = (u, g);
                }
            }
            Err(e) => map.push_failed(vec![j.into(), u.into()], e),
        }
    }
    out.tables.push(map);

    let mut link = ctx.table_with_reasons(
        "fig3a-optimal-link",
        &["J [kappa]", "Delta_opt [kappa]", "U_opt [kappa]", "U_min_on_grid [kappa]", "g2_min_on_grid [1]"],
    );
    for (&j, &(u_min, g_min)) in js.iter().zip(&best) {
        match delta_u_opt(j, kappa) {
            Ok(o) => link.push(vec![j.into(), o.delta[0].into(), o.u[0].into(), u_min.into(), g_min.into()]),
            Err(e) => link.push_failed(vec![j.into()], e),
        }
    }
    out.tables.push(link);

    // (Δ₁, Δ₂) map at fixed U and J
    let (u, j) = if ctx.params.u1 > 0.0 && ctx.params.j_hop > 0.0 {
        (ctx.params.u1, ctx.params.j_hop)
    } else {
        let (j, o) = optimum_for_u(1e-2, kappa)?;
        (o.u[0], j)
    };
    let [d_lo, d_hi] = sw.delta_range.unwrap_or([-1.0, 1.0]);
    let ds = linspace(d_lo, d_hi, m);
    let cells: Vec<(f64, f64)> = ds.iter().flat_map(|&d1| ds.iter().map(move |&d2| (d1, d2))).collect();
    let values = par_map(&cells, |&(d1, d2)| {
        let p = SystemParams { delta1: d1, delta2: d2, ..SystemParams::symmetric(0.0, u, j, C64::new(0.0, 0.0), kappa) };
        weak_g2(&p)
    });
    let mut dmap = ctx
        .table_with_reasons("fig3b-map-Delta1-Delta2", &["Delta1 [kappa]", "Delta2 [kappa]", "g2_1(0) [1]"])
        .meta("U", format!("{u:e}"))
        .meta("J", format!("{j:e}"))
        .meta("method", "weak-drive amplitudes, leading order");
    let mut min = (f64::NAN, f64::NAN, f64::INFINITY);
    for (&(d1, d2), v) in cells.iter().zip(values) {
        match v {
            Ok(g) => {
                if g < min.2 {
                    min = (d1, d2, g);
                }
                dmap.push(vec![Cell::Num(d1), Cell::Num(d2), Cell::Num(g)]);
            }
            Err(e) => dmap.push_failed(vec![d1.into(), d2.into()], e),
        }
    }
    out.tables.push(dmap);
    out.set("Delta map: grid minimum Delta1", min.0);
    out.set("Delta map: grid minimum Delta2", min.1);
    out.set("Delta map: grid minimum g2", min.2);
    if let Ok(o) = delta_u_opt(j, kappa) {
        out.set("Delta map: Delta_opt(J)", o.delta[0]);
    }
    Ok(out)
}
