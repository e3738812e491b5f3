//! Pulsed excitation from vacuum: occupation dynamics, two-time `g²` map
//! and the time-integrated `g²_pulse`, with and without a detection gate.

use upb_core::dynamics::{
    build_liouvillian, default_time_grid, evolve, g2_pulse_integrated, gated_pulse_g2, two_time_g2_of, BathParams,
    CorrelationGrid, Liouvillian, Pulse, SystemParams,
};
use upb_core::{DensityMatrix, Error, FockBasis, Mode, Operator, Result, C64};

use super::{Context, Outcome};
use crate::config::{GateAnchor, GateCenter};
use crate::output::{Certificate, Table};

/// Fraction of the peak occupation below which `g²(t,t)` is ignored when
/// locating its minimum.
pub const MIN_OCCUPATION_FRACTION: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct GateSpec {
    pub width: f64,
    pub center: GateCenter,
    /// Samples of the refined in-window grid.
    pub points: usize,
}

#[derive(Clone, Debug)]
pub struct Pulsed {
    pub grid: CorrelationGrid,
    pub g2_pulse: f64,
    pub window: (f64, f64),
    /// Gate snapped to the nodes of the main grid.
    pub g2_gated_nodes: f64,
    /// Gate resolved on a dense grid inside the window.
    pub g2_gated: f64,
}

pub fn gate_window(grid: &CorrelationGrid, gate: &GateSpec) -> Result<(f64, f64)> {
    let c = match gate.center {
        GateCenter::Time(t) => t,
        GateCenter::Named(GateAnchor::G2Minimum) => grid
            .equal_time_minimum(MIN_OCCUPATION_FRACTION)
            .ok_or_else(|| Error::Undefined("no equal-time g2 minimum".into()))?,
        GateCenter::Named(GateAnchor::OccupancyPeak) => {
            grid.occupancy_peak().ok_or_else(|| Error::Undefined("no occupancy peak".into()))?
        }
    };
    let a = (c - 0.5 * gate.width).max(grid.times[1]);
    Ok((a, c + 0.5 * gate.width))
}

/// Two-time correlations of `b` from vacuum and the integrated `g²`.
pub fn pulsed(l: &Liouvillian, drive: &[(Mode, Pulse)], b: &Operator, times: &[f64], gate: &GateSpec) -> Result<Pulsed> {
    let rho0 = DensityMatrix::vacuum(l.basis());
    let grid = two_time_g2_of(l, drive, b, &rho0, times)?;
    let g2_pulse = g2_pulse_integrated(&grid, None)?;
    let window = gate_window(&grid, gate)?;
    let g2_gated_nodes = g2_pulse_integrated(&grid, Some(window)).unwrap_or(f64::NAN);
    let g2_gated = gated_pulse_g2(l, drive, b, &rho0, window, gate.points)?;
    Ok(Pulsed { grid, g2_pulse, window, g2_gated_nodes, g2_gated })
}

pub fn gate_spec(ctx: &Context, default_width: f64) -> GateSpec {
    let g = ctx.cfg.gate.clone().unwrap_or_default();
    GateSpec {
        width: g.width.unwrap_or(default_width),
        center: g.center.unwrap_or(GateCenter::Named(GateAnchor::G2Minimum)),
        points: g.points.unwrap_or(ctx.resolution.pick(96, 64)),
    }
}

pub fn time_points(ctx: &Context) -> usize {
    ctx.cfg.sweep.time_points.unwrap_or(ctx.resolution.pick(96, 64))
}

/// Long-format two-time map.
pub fn two_time_table(ctx: &Context, name: &str, grid: &CorrelationGrid) -> Table {
    let mut t = ctx.table(name, &["t1 [1/kappa]", "t2 [1/kappa]", "g2(t1,t2) [1]", "n(t1,t2) [1]", "G2(t1,t2) [1]"]);
    let n = &grid.occupancy;
    for i in 0..grid.times.len() {
        for j in 0..grid.times.len() {
            let big = grid.g2[[i, j]];
            let den = n[i] * n[j];
            let g = if den > 0.0 { big / den } else { f64::NAN };
            t.push(vec![grid.times[i].into(), grid.times[j].into(), g.into(), den.sqrt().into(), big.into()]);
        }
    }
    t
}

/// Occupations of both modes along the pulse, and the largest population
/// of the top manifold.
pub fn dynamics(l: &Liouvillian, drive: &[(Mode, Pulse)], times: &[f64]) -> Result<(Vec<[f64; 2]>, f64)> {
    let basis = l.basis().clone();
    let tr = evolve(&DensityMatrix::vacuum(&basis), l, drive, times)?;
    let n1 = basis.number(Mode::One);
    let n2 = basis.number(Mode::Two);
    let mut occ = Vec::with_capacity(times.len());
    let mut top: f64 = 0.0;
    for rho in &tr.states {
        occ.push([
            upb_core::fock::expectation(rho, &n1)?.re,
            upb_core::fock::expectation(rho, &n2)?.re,
        ]);
        top = top.max(basis.top_manifold_population(rho));
    }
    Ok((occ, top))
}

/// Undriven generator, the pulses and the main time grid.
pub fn pulse_setup(
    ctx: &Context,
    params: &SystemParams,
    bath: &BathParams,
    peaks: (C64, C64),
    default_sigma: f64,
    cutoff: usize,
) -> Result<(Liouvillian, Vec<(Mode, Pulse)>, Vec<f64>)> {
    let drive = ctx.cfg.pulses(peaks, default_sigma).map_err(|e| Error::param("pulse", e.to_string()))?;
    let pulses: Vec<Pulse> = drive.iter().map(|d| d.1).collect();
    let times = default_time_grid(&pulses, time_points(ctx))?;
    let undriven = params.with_drives(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let l = build_liouvillian(&undriven, bath, &FockBasis::new(cutoff))?;
    Ok((l, drive, times))
}

/// Standard outputs of a pulsed run: dynamics, two-time map and summary.
#[allow(clippy::too_many_arguments)]
pub fn pulsed_outputs(
    ctx: &Context,
    out: &mut Outcome,
    prefix: &str,
    params: &SystemParams,
    bath: &BathParams,
    peaks: (C64, C64),
    default_sigma: f64,
    field: &dyn Fn(&FockBasis) -> Operator,
    gate: &GateSpec,
) -> Result<Pulsed> {
    let n = ctx.cutoff;
    let (l, drive, times) = pulse_setup(ctx, params, bath, peaks, default_sigma, n)?;
    let b = field(l.basis());
    let res = pulsed(&l, &drive, &b, &times, gate)?;
    let (occ, top) = dynamics(&l, &drive, &times)?;

    let mut dyn_t = ctx.table(&format!("{prefix}-dynamics"), &["t [1/kappa]", "n1 [1]", "n2 [1]", "n_detected [1]", "g2(t,t) [1]"]);
    for (a, p) in drive.iter().enumerate() {
        dyn_t = dyn_t.meta(&format!("pulse {}", a + 1), format!(
            "mode {}, peak {}, sigma_t {:e}, t0 {:e}",
            p.0.index(),
            p.1.f_peak,
            p.1.sigma_t,
            p.1.t0
        ));
    }
    let eq = res.grid.equal_time_g2();
    for (k, &t) in times.iter().enumerate() {
        dyn_t.push(vec![t.into(), occ[k][0].into(), occ[k][1].into(), res.grid.occupancy[k].into(), eq[k].into()]);
    }
    out.tables.push(dyn_t);
    out.tables.push(two_time_table(ctx, &format!("{prefix}-two-time"), &res.grid));

    let mut s = ctx
        .table(&format!("{prefix}-summary"), &["quantity", "value [1]"])
        .meta("gate width", format!("{:e}", gate.width))
        .meta("gate points", gate.points);
    for (k, v) in [
        ("g2_pulse", res.g2_pulse),
        ("gate_start", res.window.0),
        ("gate_end", res.window.1),
        ("g2_pulse_gated_on_grid_nodes", res.g2_gated_nodes),
        ("g2_pulse_gated", res.g2_gated),
    ] {
        s.push(vec![k.into(), v.into()]);
        out.set(&format!("{prefix}: {k}"), v);
    }
    out.tables.push(s);
    out.warnings.extend(res.grid.warnings.iter().cloned());

    let lp = build_liouvillian(&params.with_drives(C64::new(0.0, 0.0), C64::new(0.0, 0.0)), bath, &FockBasis::new(n + 2))?;
    let bp = field(lp.basis());
    let plus = two_time_g2_of(&lp, &drive, &bp, &DensityMatrix::vacuum(lp.basis()), &times)?;
    out.certificates.push(Certificate::new(prefix, n, "g2_pulse", Some(top), res.g2_pulse, g2_pulse_integrated(&plus, None)?));
    out.states = Some(l.basis().len());
    out.frame = "lab".into();
    Ok(res)
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let mut out = Outcome::default();
    let peak = ctx.cfg.pulse.as_ref().and_then(|p| p.f1).map_or(C64::new(0.1, 0.0), |f| f.value());
    let gate = gate_spec(ctx, 1.0);
    let field = |b: &FockBasis| b.annihilation(Mode::One);
    let p = ctx.params;
    pulsed_outputs(ctx, &mut out, "fig5bis", &p, &ctx.bath, (peak, C64::new(0.0, 0.0)), 3.0, &field, &gate)?;
    out.set("U", p.u1);
    out.set("J", p.j_hop);
    Ok(out)
}
