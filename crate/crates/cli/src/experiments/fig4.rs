//! Mode-1 occupation and `g²₁(0)` against thermal occupation and pure
//! dephasing at a fixed strong drive.

use upb_core::dynamics::{
    build_liouvillian, displaced_steady_state, field_statistics, steady_state, BathParams, FluctuationModel,
    SystemParams,
};
use upb_core::{FockBasis, Mode, Result};

use super::{logspace, par_map, Context, Outcome};
use crate::output::Certificate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Displaced,
}

/// `(n₁, g²₁(0), top-manifold population)` of the steady state.
pub fn point(params: &SystemParams, bath: &BathParams, cutoff: usize, frame: Frame) -> Result<(f64, f64, f64)> {
    let basis = FockBasis::new(cutoff);
    match frame {
        Frame::Lab => {
            let l = build_liouvillian(params, bath, &basis)?;
            let rho = steady_state(&l)?;
            let (n, g) = field_statistics(&rho, &basis.annihilation(Mode::One))?;
            Ok((n, g, basis.top_manifold_population(&rho)))
        }
        Frame::Displaced => {
            let s = displaced_steady_state(params, bath, &basis, FluctuationModel::Full)?;
            let (n, g) = s.statistics(Mode::One)?;
            Ok((n, g, basis.top_manifold_population(&s.rho)))
        }
    }
}

/// Default five-point sweeps: thermal occupation toward the thermal limit
/// and dephasing up to just past `U`.
pub fn default_trend_values(u: f64) -> (Vec<f64>, Vec<f64>) {
    (vec![0.0, 1e-5, 1e-4, 1e-3, 3e-3], vec![0.0, 0.25 * u, 0.5 * u, 0.75 * u, 1.2 * u])
}

/// `g²₁(0)` along the thermal sweep (no dephasing) and the dephasing sweep
/// (zero temperature).
pub fn trend(
    params: &SystemParams,
    cutoff: usize,
    frame: Frame,
    n_th: &[f64],
    dephasing: &[f64],
) -> Result<(Vec<(f64, f64, f64)>, Vec<(f64, f64, f64)>)> {
    let thermal = par_map(n_th, |&x| point(params, &BathParams { n_th: x, ..Default::default() }, cutoff, frame));
    let dephased =
        par_map(dephasing, |&x| point(params, &BathParams { dephasing_rate: x, ..Default::default() }, cutoff, frame));
    Ok((thermal.into_iter().collect::<Result<_>>()?, dephased.into_iter().collect::<Result<_>>()?))
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let sw = &ctx.cfg.sweep;
    let p = ctx.params;
    let n = ctx.cutoff;
    let m = sw.map_points.unwrap_or(ctx.resolution.pick(24, 6));
    let [t_lo, t_hi] = sw.n_th_range.unwrap_or([1e-5, 1e-1]);
    let [e_lo, e_hi] = sw.dephasing_range.unwrap_or([1e-4, 1.0]);
    let nths = logspace(t_lo, t_hi, m);
    let etas = logspace(e_lo, e_hi, m);
    let mut out = Outcome { frame: "displaced (full fluctuation model)".into(), ..Default::default() };
    out.states = Some(FockBasis::new(n).len());

    let cells: Vec<(f64, f64)> = nths.iter().flat_map(|&t| etas.iter().map(move |&e| (t, e))).collect();
    let values = par_map(&cells, |&(t, e)| {
        point(&p, &BathParams { n_th: t, dephasing_rate: e, ..Default::default() }, n, Frame::Displaced)
    });
    let mut map = ctx
        .table_with_reasons("fig4-map", &["n_th [1]", "eta [kappa]", "n1 [1]", "g2_1(0) [1]", "top_manifold [1]"])
        .meta("F1", format!("{:e}", p.f1.re))
        .meta("U", format!("{:e}", p.u1));
    for (&(t, e), v) in cells.iter().zip(values) {
        match v {
            Ok((n1, g, top)) => map.push(vec![t.into(), e.into(), n1.into(), g.into(), top.into()]),
            Err(err) => map.push_failed(vec![t.into(), e.into()], err),
        }
    }
    out.tables.push(map);

    let (tv, dv) = default_trend_values(p.u1);
    let tv = sw.n_th_values.clone().unwrap_or(tv);
    let dv = sw.dephasing_values.clone().unwrap_or(dv);
    let (thermal, dephased) = trend(&p, n, Frame::Displaced, &tv, &dv)?;
    let mut tt = ctx.table("fig4-trends", &["sweep", "value [1 or kappa]", "n1 [1]", "g2_1(0) [1]"]);
    for (x, (n1, g, _)) in tv.iter().zip(&thermal) {
        tt.push(vec!["n_th".into(), (*x).into(), (*n1).into(), (*g).into()]);
    }
    for (x, (n1, g, _)) in dv.iter().zip(&dephased) {
        tt.push(vec!["eta".into(), (*x).into(), (*n1).into(), (*g).into()]);
    }
    out.tables.push(tt);

    for (label, bath) in [
        ("largest n_th", BathParams { n_th: t_hi, dephasing_rate: e_lo, ..Default::default() }),
        ("largest eta", BathParams { n_th: t_lo, dephasing_rate: e_hi, ..Default::default() }),
    ] {
        let (_, g, top) = point(&p, &bath, n, Frame::Displaced)?;
        let (_, g2, _) = point(&p, &bath, n + 2, Frame::Displaced)?;
        out.certificates.push(Certificate::new(label, n, "g2_1(0)", Some(top), g, g2));
    }
    Ok(out)
}
