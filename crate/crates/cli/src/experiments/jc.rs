//! Cavity coupled to a two-level emitter: `g²_c(0)` against the cavity
//! occupation and the steady-state `g²_c(τ)` at one point of that curve.

use upb_core::dynamics::{build_liouvillian, field_statistics, g2_tau_of, steady_state, BathParams, JcParams};
use upb_core::weakdrive::{jc_solve, leading_order};
use upb_core::{Mode, Result, C64};

use super::{first_crossing_log, linspace, logspace, par_map, Context, Outcome};
use crate::output::Certificate;

/// `(n_c, g²_c(0), top-manifold population)` of the full steady state.
pub fn cavity_point(jc: &JcParams, bath: &BathParams, cutoff: usize) -> Result<(f64, f64, f64)> {
    let basis = JcParams::basis(cutoff);
    let l = build_liouvillian(&jc.to_system_params(), bath, &basis)?;
    let rho = steady_state(&l)?;
    let (n, g) = field_statistics(&rho, &basis.annihilation(Mode::One))?;
    Ok((n, g, basis.top_manifold_population(&rho)))
}

/// Cavity-drive sweep; rows are `(F₁, n_c, g²_c)` or the failure.
pub fn sweep(jc: &JcParams, bath: &BathParams, cutoff: usize, drives: &[f64]) -> Vec<Result<(f64, f64, f64)>> {
    par_map(drives, |&f| cavity_point(&JcParams { f1: C64::new(f, 0.0), ..*jc }, bath, cutoff))
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let sw = &ctx.cfg.sweep;
    let n = ctx.cutoff;
    let jc = ctx.cfg.jc_params().map_err(|e| upb_core::Error::param("jc", e.to_string()))?;
    let mut out = Outcome { frame: "lab, emitter capped at one excitation".into(), ..Default::default() };
    out.states = Some(JcParams::basis(n).len());
    out.set("g", jc.g);
    out.set("Delta1", jc.delta1);

    let [d_lo, d_hi] = sw.drive_range.unwrap_or([1e-3, 1.0]);
    let drives = logspace(d_lo, d_hi, sw.points.unwrap_or(ctx.resolution.pick(40, 12)));
    let rows = sweep(&jc, &ctx.bath, n, &drives);
    let mut t = ctx
        .table_with_reasons("jc-g2-vs-nc", &["F1 [kappa]", "n_c [1]", "g2_c(0) [1]", "n_c weak drive [1]", "g2_c(0) weak drive [1]", "top_manifold [1]"])
        .meta("g", format!("{:e}", jc.g))
        .meta("Delta1", format!("{:e}", jc.delta1))
        .meta("Delta2", format!("{:e}", jc.delta2))
        .meta("F2", format!("{}", jc.f2));
    let mut curve = (Vec::new(), Vec::new(), Vec::new());
    for (&f, row) in drives.iter().zip(rows) {
        let weak = jc_solve(&JcParams { f1: C64::new(f, 0.0), ..jc }, 2).map(|c| leading_order(&c));
        match row {
            Ok((nc, g, top)) => {
                let (wn, wg) = weak.map_or((f64::NAN, f64::NAN), |o| (o.n1, o.g2_1));
                t.push(vec![f.into(), nc.into(), g.into(), wn.into(), wg.into(), top.into()]);
                curve.0.push(nc);
                curve.1.push(g);
                curve.2.push(f);
            }
            Err(e) => t.push_failed(vec![f.into()], e),
        }
    }
    out.tables.push(t);
    if let Some(x) = first_crossing_log(&curve.0, &curve.1, 0.5) {
        out.set("n_c where g2_c(0) crosses 0.5", x);
    }
    let f_last = *drives.last().expect("non-empty drive grid");
    let hard = JcParams { f1: C64::new(f_last, 0.0), ..jc };
    let (_, g, top) = cavity_point(&hard, &ctx.bath, n)?;
    let (_, gp, _) = cavity_point(&hard, &ctx.bath, n + 2)?;
    out.certificates.push(Certificate::new("largest drive", n, "g2_c(0)", Some(top), g, gp));

    // delayed correlations at the sweep point closest to n_tau
    let n_tau = ctx.cfg.jc.as_ref().and_then(|j| j.n_tau).unwrap_or(1e-2);
    let k = (0..curve.0.len())
        .min_by(|&a, &b| (curve.0[a] / n_tau).ln().abs().total_cmp(&(curve.0[b] / n_tau).ln().abs()))
        .ok_or_else(|| upb_core::Error::Undefined("no converged sweep point".into()))?;
    let f_tau = curve.2[k];
    let point = JcParams { f1: C64::new(f_tau, 0.0), ..jc };
    let basis = JcParams::basis(n);
    let l = build_liouvillian(&point.to_system_params(), &ctx.bath, &basis)?;
    let rho = steady_state(&l)?;
    let taus = linspace(0.0, sw.tau_max.unwrap_or(10.0), sw.tau_points.unwrap_or(ctx.resolution.pick(2001, 801)));
    let g = g2_tau_of(&l, &rho, &basis.annihilation(Mode::One), &taus)?;
    let mut d = ctx
        .table("jc-g2tau", &["tau [1/kappa]", "g2_c(tau) [1]"])
        .meta("F1", format!("{f_tau:e}"))
        .meta("n_c", format!("{:e}", curve.0[k]));
    for (&t, &v) in taus.iter().zip(&g) {
        d.push(vec![t.into(), v.into()]);
    }
    out.tables.push(d);
    Ok(out)
}
