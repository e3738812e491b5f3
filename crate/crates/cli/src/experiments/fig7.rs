//! Optimal squeezing against displacement, and `g²` against mean occupation
//! for the optimal Gaussian state and along the `𝒫₂ = 0` line.

use upb_core::squeezing::{alpha_opt, g2_gaussian, optimal_at_occupancy, optimal_r, SqueezeParams};
use upb_core::Result;

use super::{first_crossing_log, linspace, logspace, Context, Outcome};

pub fn run(ctx: &Context) -> Result<Outcome> {
    let sw = &ctx.cfg.sweep;
    let points = sw.points.unwrap_or(ctx.resolution.pick(200, 40));
    let mut out = Outcome::default();

    let [a_lo, a_hi] = sw.alpha_range.unwrap_or([1e-3, 1.0]);
    let mut a = ctx
        .table_with_reasons("fig7a-r-opt", &["alpha_bar [1]", "r_opt [1]", "g2_min [1]", "g2_min/(4 r_opt) [1]"])
        .meta("phases", "theta = 2 phi = 0");
    for al in logspace(a_lo, a_hi, points) {
        match optimal_r(al, 0.0) {
            Ok((r, g)) => a.push(vec![al.into(), r.into(), g.into(), (g / (4.0 * r)).into()]),
            Err(e) => a.push_failed(vec![al.into()], e),
        }
    }
    out.tables.push(a);

    let [n_lo, n_hi] = [sw.n1_min.unwrap_or(1e-4), sw.n1_max.unwrap_or(1.0)];
    let ns = logspace(n_lo, n_hi, points);
    let mut b = ctx.table_with_reasons("fig7b-g2-vs-n", &["n_bar [1]", "r [1]", "alpha_bar [1]", "g2(0) [1]"]);
    let mut curve = (Vec::new(), Vec::new());
    for &n in &ns {
        match optimal_at_occupancy(n, 0.0) {
            Ok((r, al, g)) => {
                b.push(vec![n.into(), r.into(), al.into(), g.into()]);
                curve.0.push(n);
                curve.1.push(g);
            }
            Err(e) => b.push_failed(vec![n.into()], e),
        }
    }
    out.tables.push(b);
    if let Some(x) = first_crossing_log(&curve.0, &curve.1, 0.5) {
        out.set("n_bar where optimal g2 crosses 0.5", x);
    }

    // along 𝒫₂ = 0, parametrized by r
    let mut c = ctx.table("fig7b-g2-alpha-opt-line", &["r [1]", "alpha_bar [1]", "n_bar [1]", "g2(0) [1]"]);
    for r in linspace(0.0, sw.r_max.unwrap_or(2.0), points).into_iter().skip(1) {
        let p = SqueezeParams::intensity(alpha_opt(r), r);
        c.push(vec![r.into(), p.alpha_bar.into(), p.mean_occupation().into(), g2_gaussian(&p)?.into()]);
    }
    out.tables.push(c);
    Ok(out)
}
