//! Optimal displacement against squeezing, and the photon-number
//! distribution of the optimal displaced squeezed state.

use upb_core::squeezing::{alpha_opt, g2_gaussian, pn_distribution, SqueezeParams};
use upb_core::Result;

use super::fig2::poisson;
use super::{linspace, Context, Outcome};

pub fn run(ctx: &Context) -> Result<Outcome> {
    let sw = &ctx.cfg.sweep;
    let mut out = Outcome::default();
    let rs = linspace(0.0, sw.r_max.unwrap_or(3.0), sw.r_points.unwrap_or(ctx.resolution.pick(301, 61)));
    let mut a = ctx.table("fig6a-alpha-opt", &["r [1]", "alpha_opt [1]", "n_bar [1]", "g2(0) [1]"]);
    for &r in &rs {
        let al = alpha_opt(r);
        let p = SqueezeParams::intensity(al, r);
        let g = if r > 0.0 { g2_gaussian(&p)? } else { f64::NAN };
        a.push(vec![r.into(), al.into(), p.mean_occupation().into(), g.into()]);
    }
    out.tables.push(a);

    let r = sw.r_display.unwrap_or(1.0);
    let p = SqueezeParams::intensity(alpha_opt(r), r);
    let levels = ctx.cutoff;
    let pn = pn_distribution(&p, levels)?;
    let nbar = p.mean_occupation();
    let pois = poisson(nbar, pn.len());
    let mut b = ctx
        .table("fig6b-pn", &["n [1]", "P_n squeezed [1]", "P_n Poisson [1]"])
        .meta("r", format!("{r:e}"))
        .meta("alpha_bar", format!("{:e}", p.alpha_bar))
        .meta("n_bar", format!("{nbar:e}"));
    for (k, (x, y)) in pn.iter().zip(&pois).enumerate() {
        b.push(vec![k.into(), (*x).into(), (*y).into()]);
    }
    out.tables.push(b);
    out.set("alpha_opt(r_display)", p.alpha_bar);
    out.set("P_2 at r_display", pn.get(2).copied().unwrap_or(f64::NAN));
    out.set("alpha_opt large-r limit", 0.5);
    Ok(out)
}
