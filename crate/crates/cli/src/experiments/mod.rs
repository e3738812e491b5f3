//! One module per figure dataset. Every experiment returns its tables and
//! certificates; nothing here touches the filesystem.

use std::collections::BTreeMap;

use rayon::prelude::*;
use upb_core::dynamics::{
    displaced_steady_state, BathParams, DisplacedSteadyState, FluctuationModel, SystemParams,
};
use upb_core::optimal::drive_for_occupancy;
use upb_core::weakdrive::{leading_order, solve_manifolds};
use upb_core::{Error, FockBasis, Mode, Result, C64};

use crate::config::{Experiment, ExperimentConfig, Resolution};
use crate::output::{Certificate, Table};

pub mod fig10;
pub mod fig2;
pub mod fig3;
pub mod fig4;
pub mod fig5;
pub mod fig5bis;
pub mod fig6;
pub mod fig7;
pub mod fig8;
pub mod fig9;
pub mod jc;

/// Resolved inputs shared by every experiment.
#[derive(Clone, Debug)]
pub struct Context {
    pub cfg: ExperimentConfig,
    pub params: SystemParams,
    pub bath: BathParams,
    pub cutoff: usize,
    pub resolution: Resolution,
}

impl Context {
    pub fn new(cfg: &ExperimentConfig) -> std::result::Result<Self, crate::config::ValidationReport> {
        cfg.validate()?;
        Ok(Context {
            params: cfg.system_params()?,
            bath: cfg.bath_params()?,
            cutoff: cfg.cutoff(),
            resolution: cfg.resolution,
            cfg: cfg.clone(),
        })
    }

    /// Standard metadata lines of every table.
    pub fn table(&self, name: &str, columns: &[&str]) -> Table {
        self.stamp(Table::new(name, columns))
    }

    pub fn table_with_reasons(&self, name: &str, columns: &[&str]) -> Table {
        self.stamp(Table::with_reasons(name, columns))
    }

    fn stamp(&self, t: Table) -> Table {
        let mut t = t
            .meta("experiment", self.cfg.experiment)
            .meta("units", "hbar = 1; rates and energies in kappa; times in 1/kappa")
            .meta("resolution", format!("{:?}", self.resolution).to_lowercase());
        if self.cfg.experiment.uses_master_equation() {
            t = t.meta("cutoff", self.cutoff);
        }
        t
    }

    pub fn kappa(&self) -> f64 {
        self.params.kappa1
    }
}

/// Everything an experiment hands back to the writer.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub certificates: Vec<Certificate>,
    pub summary: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    /// Frame of the master-equation runs, for the manifest.
    pub frame: String,
    pub states: Option<usize>,
}

impl Outcome {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), value);
    }
}

pub fn dispatch(ctx: &Context) -> Result<Outcome> {
    match ctx.cfg.experiment {
        Experiment::Fig2G2VsN1 => fig2::run(ctx),
        Experiment::Fig3Maps => fig3::run(ctx),
        Experiment::Fig4ThermalDephasingMap => fig4::run(ctx),
        Experiment::Fig5G2TauVsU => fig5::run(ctx),
        Experiment::Fig5bisPulsedTwoTime => fig5bis::run(ctx),
        Experiment::Fig6SqueezedDistribution => fig6::run(ctx),
        Experiment::Fig7OptimalSqueeze => fig7::run(ctx),
        Experiment::Fig8UpbVsOptimal => fig8::run(ctx),
        Experiment::Fig9Cascaded => fig9::run(ctx),
        Experiment::Fig10OutputMixing => fig10::run(ctx),
        Experiment::JcFig11 => jc::run(ctx),
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

/// Order-preserving parallel map on the installed pool.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.par_iter().map(f).collect()
}

/// `n/|F|²` of `mode` at leading order for the drive direction of `params`.
pub fn weak_occupancy_per_drive(params: &SystemParams, mode: Mode) -> Result<f64> {
    let scale = params.f1.norm().max(params.f2.norm());
    if scale == 0.0 {
        return Err(Error::param("f1", "no drive"));
    }
    let unit = 1e-3 / scale;
    let probe = params.with_drives(params.f1 * unit, params.f2 * unit);
    let lo = leading_order(&solve_manifolds(&probe, 2, None)?);
    let n = match mode {
        Mode::One => lo.n1,
        Mode::Two => lo.n2,
    };
    Ok(n / 1e-6)
}

/// Real drive on mode 1 giving occupancy `n1` at leading order.
pub fn weak_drive_for(params: &SystemParams, n1: f64) -> Result<SystemParams> {
    let p = params.with_drives(C64::new(1.0, 0.0), params.f2);
    let per = weak_occupancy_per_drive(&p, Mode::One)?;
    Ok(p.with_drives(C64::new((n1 / per).sqrt(), 0.0), params.f2))
}

/// Fluctuation-frame steady state with mode 1 driven at `f` (real).
pub fn displaced_at(
    params: &SystemParams,
    bath: &BathParams,
    cutoff: usize,
    f: f64,
    model: FluctuationModel,
) -> Result<DisplacedSteadyState> {
    let p = params.with_drives(C64::new(f, 0.0), params.f2);
    displaced_steady_state(&p, bath, &FockBasis::new(cutoff), model)
}

/// Drive on mode 1 and the full fluctuation-frame state at mode-1
/// occupancy `n1` (to 0.1 %), starting from the weak-drive estimate.
pub fn state_at_occupancy(
    params: &SystemParams,
    bath: &BathParams,
    cutoff: usize,
    n1: f64,
) -> Result<(f64, DisplacedSteadyState)> {
    let guess = weak_drive_for(params, n1)?.f1.re;
    let occ = |f: f64| displaced_at(params, bath, cutoff, f, FluctuationModel::Full)?.statistics(Mode::One).map(|s| s.0);
    let (f, _) = drive_for_occupancy(n1, guess, occ)?;
    Ok((f, displaced_at(params, bath, cutoff, f, FluctuationModel::Full)?))
}

/// `g²(0)` of mode 1 at cutoff `N` and `N + 2` for a fixed drive.
pub fn certify_displaced(
    label: &str,
    params: &SystemParams,
    bath: &BathParams,
    cutoff: usize,
    f: f64,
) -> Result<Certificate> {
    let a = displaced_at(params, bath, cutoff, f, FluctuationModel::Full)?;
    let b = displaced_at(params, bath, cutoff + 2, f, FluctuationModel::Full)?;
    let top = a.basis().top_manifold_population(&a.rho);
    Ok(Certificate::new(label, cutoff, "g2_1(0)", Some(top), a.statistics(Mode::One)?.1, b.statistics(Mode::One)?.1))
}

/// First crossing of `level` by `y(x)`, linearly interpolated.
pub fn first_crossing(x: &[f64], y: &[f64], level: f64) -> Option<f64> {
    (1..x.len()).find_map(|k| {
        let (a, b) = (y[k - 1] - level, y[k] - level);
        if a.is_finite() && b.is_finite() && a * b <= 0.0 && a != b {
            Some(x[k - 1] + (x[k] - x[k - 1]) * a / (a - b))
        } else {
            None
        }
    })
}

/// Like [`first_crossing`] with logarithmic interpolation in `x`.
pub fn first_crossing_log(x: &[f64], y: &[f64], level: f64) -> Option<f64> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    first_crossing(&lx, y, level).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_hit_their_ends() {
        let g = logspace(1e-4, 1.0, 5);
        assert!((g[0] - 1e-4).abs() < 1e-18 && (g[4] - 1.0).abs() < 1e-14);
        assert!((g[2] - 1e-2).abs() < 1e-15);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn crossing_is_interpolated() {
        let x = [0.0, 1.0, 2.0];
        let y = [0.0, 0.4, 0.8];
        assert!((first_crossing(&x, &y, 0.5).unwrap() - 1.25).abs() < 1e-12);
        assert_eq!(first_crossing(&x, &y, 2.0), None);
    }

    #[test]
    fn weak_drive_estimate_hits_target() {
        let (j, o) = upb_core::optimal::optimum_for_u(1e-2, 1.0).unwrap();
        let p = SystemParams::symmetric(o.delta[0], o.u[0], j, C64::new(0.0, 0.0), 1.0);
        let q = weak_drive_for(&p, 1e-6).unwrap();
        let lo = leading_order(&solve_manifolds(&q, 2, None).unwrap());
        assert!((lo.n1 / 1e-6 - 1.0).abs() < 1e-9);
    }
}
