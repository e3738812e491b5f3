use ndarray::Array2;
use rayon::prelude::*;

use super::evolve::{propagate, with_drive};
use super::liouvillian::{build_liouvillian, Liouvillian};
use super::params::{BathParams, Pulse, SystemParams};
use super::steady::steady_state;
use crate::fock::{DensityMatrix, FockBasis, Mode, Operator};
use crate::linalg::{trace_of_product, unvectorize, vectorize};
use crate::{Error, Result, C64};

/// Minimum number of grid nodes required inside a pulse support before a
/// coarse-grid warning is recorded.
pub const MIN_POINTS_PER_PULSE: usize = 32;

/// Default number of time samples per axis for two-time grids.
pub const DEFAULT_TWO_TIME_POINTS: usize = 96;

/// Steady-state `g²(τ)` of `mode` by the quantum regression theorem.
pub fn g2_tau_steady(
    params: &SystemParams,
    bath: &BathParams,
    basis: &FockBasis,
    mode: Mode,
    tau_grid: &[f64],
) -> Result<Vec<f64>> {
    let l = build_liouvillian(params, bath, basis)?;
    let rho = steady_state(&l)?;
    g2_tau_of(&l, &rho, &basis.annihilation(mode), tau_grid)
}

/// `⟨b†(0)b†(τ)b(τ)b(0)⟩/⟨b†b⟩²` for an arbitrary field operator `b`,
/// propagating `bρb†` under `l`.
pub fn g2_tau_of(l: &Liouvillian, rho: &DensityMatrix, b: &Operator, tau_grid: &[f64]) -> Result<Vec<f64>> {
    if rho.tag() != l.tag() || b.tag() != l.tag() {
        return Err(Error::BasisMismatch { left: l.tag(), right: b.tag() });
    }
    if tau_grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::param("tau_grid", "delays must be non-negative"));
    }
    let d = rho.dim();
    let bm = b.matrix();
    let bd = bm.t().mapv(|z| z.conj());
    let nop = bd.dot(bm);
    let n = trace_of_product(&nop, rho.matrix()).re;
    if !(n > 0.0) {
        return Err(Error::Undefined("zero steady-state occupation".into()));
    }
    let sigma = bm.dot(rho.matrix()).dot(&bd) / C64::new(n, 0.0);

    // the integrator needs a strictly increasing grid that starts at 0
    let prepend = tau_grid.first().map_or(true, |&t| t > 0.0);
    let mut grid = Vec::with_capacity(tau_grid.len() + 1);
    if prepend {
        grid.push(0.0);
    }
    grid.extend_from_slice(tau_grid);
    let mut out = Vec::with_capacity(grid.len());
    propagate(l, vectorize(&sigma), &grid, |_, _, y| {
        out.push(trace_of_product(&nop, &unvectorize(y, d)).re / n);
    })?;
    if prepend {
        out.remove(0);
    }
    Ok(out)
}

/// Two-time intensity correlations under pulsed driving.
#[derive(Clone, Debug)]
pub struct CorrelationGrid {
    /// Shared sample times of both axes.
    pub times: Vec<f64>,
    /// `G²(t₁, t₂)`, symmetric.
    pub g2: Array2<f64>,
    /// `⟨b†b⟩(t)`.
    pub occupancy: Vec<f64>,
    pub gate: Option<(f64, f64)>,
    pub warnings: Vec<String>,
}

impl CorrelationGrid {
    pub fn t1_grid(&self) -> &[f64] {
        &self.times
    }

    pub fn t2_grid(&self) -> &[f64] {
        &self.times
    }

    /// `g²(t,t) = G²(t,t)/n(t)²`, NaN where `n(t) = 0`.
    pub fn equal_time_g2(&self) -> Vec<f64> {
        (0..self.times.len())
            .map(|k| {
                let n = self.occupancy[k];
                if n > 0.0 {
                    self.g2[[k, k]] / (n * n)
                } else {
                    f64::NAN
                }
            })
            .collect()
    }

    /// Time of the `g²(t,t)` minimum among samples whose occupancy exceeds
    /// `min_fraction` of the peak occupancy.
    pub fn equal_time_minimum(&self, min_fraction: f64) -> Option<f64> {
        let peak = self.occupancy.iter().copied().fold(0.0, f64::max);
        let g = self.equal_time_g2();
        (0..self.times.len())
            .filter(|&k| self.occupancy[k] > min_fraction * peak && g[k].is_finite())
            .min_by(|&a, &b| g[a].total_cmp(&g[b]))
            .map(|k| self.times[k])
    }

    /// Time of the occupancy maximum.
    pub fn occupancy_peak(&self) -> Option<f64> {
        (0..self.times.len())
            .max_by(|&a, &b| self.occupancy[a].total_cmp(&self.occupancy[b]))
            .map(|k| self.times[k])
    }
}

/// `n` equally spaced samples over `[0, t₀ + 6σ_t]` of the latest pulse.
pub fn default_time_grid(pulses: &[Pulse], n: usize) -> Result<Vec<f64>> {
    let end = pulses
        .iter()
        .map(|p| p.t0 + 6.0 * p.sigma_t)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(end > 0.0) || n < 2 {
        return Err(Error::param("grid", "needs a pulse and at least two samples"));
    }
    Ok((0..n).map(|k| end * k as f64 / (n - 1) as f64).collect())
}

/// `G²(t₁,t₂) = ⟨a†(t₁)a†(t₂)a(t₂)a(t₁)⟩` of `mode` starting from vacuum at
/// `times[0]`.
pub fn two_time_g2(
    params: &SystemParams,
    bath: &BathParams,
    basis: &FockBasis,
    drive: &[(Mode, Pulse)],
    mode: Mode,
    times: &[f64],
) -> Result<CorrelationGrid> {
    let l = build_liouvillian(params, bath, basis)?;
    two_time_g2_of(&l, drive, &basis.annihilation(mode), &DensityMatrix::vacuum(basis), times)
}

/// Regression-theorem two-time correlation of an arbitrary field operator.
///
/// Conditioned states `bρ(t₁)b†` are propagated independently for every
/// `t₁` (in parallel, with results stored by index so the output is
/// independent of scheduling); `t₂ < t₁` is filled by symmetry.
pub fn two_time_g2_of(
    l: &Liouvillian,
    drive: &[(Mode, Pulse)],
    b: &Operator,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<CorrelationGrid> {
    if b.tag() != l.tag() || rho0.tag() != l.tag() {
        return Err(Error::BasisMismatch { left: l.tag(), right: b.tag() });
    }
    if times.len() < 2 {
        return Err(Error::param("times", "needs at least two samples"));
    }
    let full = with_drive(l, drive);
    let d = rho0.dim();
    let bm = b.matrix().clone();
    let bd = bm.t().mapv(|z| z.conj());
    let nop = bd.dot(&bm);

    let mut states = Vec::with_capacity(times.len());
    propagate(&full, vectorize(rho0.matrix()), times, |_, _, y| states.push(unvectorize(y, d)))?;
    let occupancy: Vec<f64> = states.iter().map(|r| trace_of_product(&nop, r).re).collect();

    let rows: Vec<Result<Vec<f64>>> = (0..times.len())
        .into_par_iter()
        .map(|k| {
            let sigma = bm.dot(&states[k]).dot(&bd);
            let mut row = Vec::with_capacity(times.len() - k);
            propagate(&full, vectorize(&sigma), &times[k..], |_, _, y| {
                row.push(trace_of_product(&nop, &unvectorize(y, d)).re);
            })?;
            Ok(row)
        })
        .collect();

    let n = times.len();
    let mut g2 = Array2::zeros((n, n));
    for (k, row) in rows.into_iter().enumerate() {
        for (off, v) in row?.into_iter().enumerate() {
            g2[[k, k + off]] = v;
            g2[[k + off, k]] = v;
        }
    }

    let mut warnings = Vec::new();
    for (mode_pulse, p) in drive {
        let (a, z) = p.support();
        let inside = times.iter().filter(|&&t| t >= a && t <= z).count();
        if inside < MIN_POINTS_PER_PULSE {
            warnings.push(format!(
                "grid has {inside} samples inside the support of the pulse on mode {mode_pulse}, fewer than {MIN_POINTS_PER_PULSE}"
            ));
        }
    }
    Ok(CorrelationGrid { times: times.to_vec(), g2, occupancy, gate: None, warnings })
}

/// `∬G²dt₁dt₂ / ∬n(t₁)n(t₂)dt₁dt₂` by the trapezoid rule, optionally
/// restricted to the square `gate × gate` (edges snapped to the nearest
/// grid nodes).
pub fn g2_pulse_integrated(grid: &CorrelationGrid, gate: Option<(f64, f64)>) -> Result<f64> {
    let t = &grid.times;
    let (lo, hi) = match gate.or(grid.gate) {
        None => (0, t.len() - 1),
        Some((a, b)) => {
            if !(b > a) {
                return Err(Error::param("gate", "window must have positive width"));
            }
            (nearest(t, a), nearest(t, b))
        }
    };
    if hi <= lo {
        return Err(Error::param("gate", "window contains fewer than two grid nodes"));
    }
    let w = trapezoid_weights(&t[lo..=hi]);
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, wi) in w.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            num += wi * wj * grid.g2[[lo + i, lo + j]];
            den += wi * wj * grid.occupancy[lo + i] * grid.occupancy[lo + j];
        }
    }
    if !(den > 0.0) {
        return Err(Error::Undefined("zero occupancy inside the window".into()));
    }
    Ok(num / den)
}

/// Gated `g²_pulse` with the window itself resolved by `points` samples,
/// so the result does not depend on where the window edges fall on a
/// coarse grid. Evolution starts from `rho0` at `t = 0`.
pub fn gated_pulse_g2(
    l: &Liouvillian,
    drive: &[(Mode, Pulse)],
    b: &Operator,
    rho0: &DensityMatrix,
    window: (f64, f64),
    points: usize,
) -> Result<f64> {
    let (a, z) = window;
    if !(z > a && a > 0.0) || points < 2 {
        return Err(Error::param("gate", "window must lie after t = 0 and hold at least two samples"));
    }
    let mut times = Vec::with_capacity(points + 1);
    times.push(0.0);
    times.extend((0..points).map(|k| a + (z - a) * k as f64 / (points - 1) as f64));
    let grid = two_time_g2_of(l, drive, b, rho0, &times)?;
    g2_pulse_integrated(&grid, Some(window))
}

/// Mean spacing between successive local extrema of a sampled curve
/// (half the period of a sinusoidal oscillation). `None` with fewer than
/// two extrema.
pub fn extremum_spacing(t: &[f64], y: &[f64]) -> Option<f64> {
    let ext: Vec<f64> = (1..y.len().saturating_sub(1))
        .filter(|&k| (y[k] - y[k - 1]) * (y[k + 1] - y[k]) < 0.0)
        .map(|k| {
            // vertex of the parabola through the three samples
            let (h0, h1) = (t[k] - t[k - 1], t[k + 1] - t[k]);
            let (d0, d1) = ((y[k] - y[k - 1]) / h0, (y[k + 1] - y[k]) / h1);
            let curv = (d1 - d0) / (0.5 * (h0 + h1));
            let mid = 0.5 * (t[k - 1] + t[k]);
            if curv != 0.0 { mid - d0 / curv } else { t[k] }
        })
        .collect();
    if ext.len() < 2 {
        return None;
    }
    Some((ext[ext.len() - 1] - ext[0]) / (ext.len() - 1) as f64)
}

fn nearest(t: &[f64], x: f64) -> usize {
    (0..t.len()).min_by(|&a, &b| (t[a] - x).abs().total_cmp(&(t[b] - x).abs())).unwrap_or(0)
}

fn trapezoid_weights(t: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; t.len()];
    for k in 0..t.len() - 1 {
        let h = 0.5 * (t[k + 1] - t[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremum_spacing_of_cosine_is_half_period() {
        let t: Vec<f64> = (0..2000).map(|k| 0.002 * k as f64).collect();
        let y: Vec<f64> = t.iter().map(|&x| (-0.3 * x).exp() * (5.0 * x).cos()).collect();
        let s = extremum_spacing(&t, &y).unwrap();
        assert!((s - std::f64::consts::PI / 5.0).abs() < 1e-3);
        assert_eq!(extremum_spacing(&t[..10], &y[..10]), None);
    }

    #[test]
    fn factorized_grid_integrates_to_one() {
        let times: Vec<f64> = (0..20).map(|k| 0.3 * k as f64).collect();
        let occ: Vec<f64> = times.iter().map(|t| (-(t - 3.0f64).powi(2)).exp()).collect();
        let g2 = Array2::from_shape_fn((20, 20), |(i, j)| occ[i] * occ[j]);
        let grid = CorrelationGrid { times, g2, occupancy: occ, gate: None, warnings: vec![] };
        assert!((g2_pulse_integrated(&grid, None).unwrap() - 1.0).abs() < 1e-12);
        assert!((g2_pulse_integrated(&grid, Some((1.0, 2.0))).unwrap() - 1.0).abs() < 1e-12);
        assert!(g2_pulse_integrated(&grid, Some((1.0, 1.02))).is_err());
    }
}
