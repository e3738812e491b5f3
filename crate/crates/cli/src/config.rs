//! Experiment configuration: TOML schema, validation and resolution into
//! solver parameters.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use upb_core::dynamics::{BathParams, JcParams, Pulse, SqueezedBath, SqueezedBathForm, SystemParams};
use upb_core::optimal::{delta_u_opt, optimum_for_u};
use upb_core::{Mode, C64};

pub const DEFAULT_CUTOFF_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "fig2-g2-vs-n1")]
    Fig2G2VsN1,
    #[serde(rename = "fig3-maps")]
    Fig3Maps,
    #[serde(rename = "fig4-thermal-dephasing-map")]
    Fig4ThermalDephasingMap,
    #[serde(rename = "fig5-g2tau-vs-U")]
    Fig5G2TauVsU,
    #[serde(rename = "fig5bis-pulsed-two-time")]
    Fig5bisPulsedTwoTime,
    #[serde(rename = "fig6-squeezed-distribution")]
    Fig6SqueezedDistribution,
    #[serde(rename = "fig7-optimal-squeeze")]
    Fig7OptimalSqueeze,
    #[serde(rename = "fig8-upb-vs-optimal")]
    Fig8UpbVsOptimal,
    #[serde(rename = "fig9-cascaded")]
    Fig9Cascaded,
    #[serde(rename = "fig10-output-mixing")]
    Fig10OutputMixing,
    #[serde(rename = "jc-fig11")]
    JcFig11,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Fig2G2VsN1,
        Experiment::Fig3Maps,
        Experiment::Fig4ThermalDephasingMap,
        Experiment::Fig5G2TauVsU,
        Experiment::Fig5bisPulsedTwoTime,
        Experiment::Fig6SqueezedDistribution,
        Experiment::Fig7OptimalSqueeze,
        Experiment::Fig8UpbVsOptimal,
        Experiment::Fig9Cascaded,
        Experiment::Fig10OutputMixing,
        Experiment::JcFig11,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Experiment::Fig2G2VsN1 => "fig2-g2-vs-n1",
            Experiment::Fig3Maps => "fig3-maps",
            Experiment::Fig4ThermalDephasingMap => "fig4-thermal-dephasing-map",
            Experiment::Fig5G2TauVsU => "fig5-g2tau-vs-U",
            Experiment::Fig5bisPulsedTwoTime => "fig5bis-pulsed-two-time",
            Experiment::Fig6SqueezedDistribution => "fig6-squeezed-distribution",
            Experiment::Fig7OptimalSqueeze => "fig7-optimal-squeeze",
            Experiment::Fig8UpbVsOptimal => "fig8-upb-vs-optimal",
            Experiment::Fig9Cascaded => "fig9-cascaded",
            Experiment::Fig10OutputMixing => "fig10-output-mixing",
            Experiment::JcFig11 => "jc-fig11",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Fig2G2VsN1 => "g²₁(0) versus n₁ at the optimal conditions for several U, with the P_n inset",
            Experiment::Fig3Maps => "weak-drive g²₁(0) maps over (U, J) and (Δ₁, Δ₂)",
            Experiment::Fig4ThermalDephasingMap => "n₁ and g²₁(0) versus thermal occupation and pure dephasing",
            Experiment::Fig5G2TauVsU => "steady-state g²₁(τ) at the optimal conditions for several U",
            Experiment::Fig5bisPulsedTwoTime => "pulsed dynamics and two-time g²₁(t₁,t₂), integrated and gated",
            Experiment::Fig6SqueezedDistribution => "optimal displacement versus r and the squeezed-state P_n",
            Experiment::Fig7OptimalSqueeze => "optimal squeezing versus displacement and g² versus occupation",
            Experiment::Fig8UpbVsOptimal => "UPB state against pure and thermal optimal Gaussian states",
            Experiment::Fig9Cascaded => "cascaded (one-way) pair: steady-state g²₂(τ) and pulsed two-time map",
            Experiment::Fig10OutputMixing => "output-mixing maps over (θ_out, φ_out), g²_out(τ) and pulsed map",
            Experiment::JcFig11 => "cavity-emitter variant: g²_c(0) versus n_c and g²_c(τ)",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.id() == id)
    }

    pub fn default_cutoff(self) -> usize {
        match self {
            Experiment::Fig2G2VsN1 | Experiment::Fig8UpbVsOptimal | Experiment::Fig4ThermalDephasingMap => 8,
            Experiment::Fig5G2TauVsU | Experiment::Fig10OutputMixing => 5,
            Experiment::Fig5bisPulsedTwoTime | Experiment::Fig9Cascaded => 4,
            Experiment::JcFig11 => 10,
            // weak-drive order of the map amplitudes
            Experiment::Fig3Maps => 2,
            // Fock levels of the displayed distribution
            Experiment::Fig6SqueezedDistribution => 12,
            Experiment::Fig7OptimalSqueeze => 2,
        }
    }

    /// Experiments whose cutoff is a master-equation truncation.
    pub fn uses_master_equation(self) -> bool {
        !matches!(self, Experiment::Fig3Maps | Experiment::Fig6SqueezedDistribution | Experiment::Fig7OptimalSqueeze)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Low,
    #[default]
    Paper,
}

impl Resolution {
    pub fn pick<T>(self, paper: T, low: T) -> T {
        match self {
            Resolution::Paper => paper,
            Resolution::Low => low,
        }
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Complex {
    Real(f64),
    Pair([f64; 2]),
}

impl Complex {
    pub fn value(self) -> C64 {
        match self {
            Complex::Real(x) => C64::new(x, 0.0),
            Complex::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimalRule {
    #[default]
    None,
    /// `J` and `Δ₁ = Δ₂` from the optimum whose nonlinearity equals `u`.
    FromU,
    /// `Δ₁ = Δ₂` and `U₁ = U₂` from the optimum at hopping `j`.
    FromJ,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub kappa: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub u: Option<f64>,
    pub u1: Option<f64>,
    pub u2: Option<f64>,
    pub delta: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub j: Option<f64>,
    pub f1: Option<Complex>,
    pub f2: Option<Complex>,
    #[serde(default)]
    pub optimal: OptimalRule,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SqueezeForm {
    #[default]
    AsPrinted,
    Standard,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub n_th: Option<f64>,
    pub dephasing_rate: Option<f64>,
    pub cascade_efficiency: Option<f64>,
    pub squeeze_r: Option<f64>,
    pub squeeze_theta: Option<f64>,
    pub squeeze_port: Option<usize>,
    pub squeeze_form: Option<SqueezeForm>,
}

/// Parameter grids. Each experiment reads the keys it needs and fills the
/// rest with its own defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub u_values: Option<Vec<f64>>,
    pub n1_min: Option<f64>,
    pub n1_max: Option<f64>,
    pub points: Option<usize>,
    pub n1_target: Option<f64>,
    pub map_points: Option<usize>,
    pub u_range: Option<[f64; 2]>,
    pub j_range: Option<[f64; 2]>,
    pub delta_range: Option<[f64; 2]>,
    pub n_th_range: Option<[f64; 2]>,
    pub dephasing_range: Option<[f64; 2]>,
    pub n_th_values: Option<Vec<f64>>,
    pub dephasing_values: Option<Vec<f64>>,
    pub tau_max: Option<f64>,
    pub tau_points: Option<usize>,
    pub time_points: Option<usize>,
    pub r_max: Option<f64>,
    pub r_points: Option<usize>,
    pub r_display: Option<f64>,
    pub alpha_range: Option<[f64; 2]>,
    pub drive_range: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    /// Peak amplitude on mode 1; defaults to the static `system.f1`.
    pub f1: Option<Complex>,
    pub f2: Option<Complex>,
    pub sigma_t: Option<f64>,
    /// Centre; defaults to `3.5 σ_t`.
    pub t0: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateCenter {
    Time(f64),
    Named(GateAnchor),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateAnchor {
    G2Minimum,
    OccupancyPeak,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    pub width: Option<f64>,
    pub center: Option<GateCenter>,
    /// Samples resolving the window in the refined gated integral.
    pub points: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixingSection {
    pub f0: Option<f64>,
    pub theta_in: Option<f64>,
    pub phi_in: Option<f64>,
    pub gamma0: Option<f64>,
    /// Root of the output condition used for g²_out(τ) and the pulse.
    pub branch: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JcSection {
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub g: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub f1: Option<Complex>,
    pub f2: Option<Complex>,
    /// Take `Δ₁` and `g` from the cavity-emitter optimum.
    #[serde(default)]
    pub optimal: bool,
    /// Cavity occupation of the point used for `g²_c(τ)`.
    pub n_tau: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default = "default_cutoff_limit")]
    pub cutoff_limit: usize,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub bath: BathSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing: Option<MixingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jc: Option<JcSection>,
}

fn default_cutoff_limit() -> usize {
    DEFAULT_CUTOFF_LIMIT
}

/// One field-level complaint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub field: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue { field: field.into(), message: message.into() });
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn single(field: impl Into<String>, message: impl Into<String>) -> Self {
        let mut r = ValidationReport::default();
        r.push(field, message);
        r
    }

    fn into_result(self) -> Result<(), ValidationReport> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.issues.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", i.field, i.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ValidationReport> {
        toml::from_str(text).map_err(|e| ValidationReport::single("config", e.to_string().trim_end()))
    }

    pub fn load(path: &Path) -> Result<Self, ValidationReport> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ValidationReport::single("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|mut r| {
            for i in &mut r.issues {
                i.message = format!("{}: {}", path.display(), i.message);
            }
            r
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// A configuration with every section empty.
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            cutoff: None,
            cutoff_limit: DEFAULT_CUTOFF_LIMIT,
            resolution: Resolution::Paper,
            output_dir: None,
            system: SystemSection::default(),
            bath: BathSection::default(),
            sweep: SweepSection::default(),
            pulse: None,
            gate: None,
            mixing: None,
            jc: None,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff.unwrap_or_else(|| self.experiment.default_cutoff())
    }

    /// Schema-independent checks: physical ranges, cutoff sanity and the
    /// requirements of the chosen experiment.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut r = ValidationReport::default();
        let n = self.cutoff();
        if self.cutoff_limit == 0 {
            r.push("cutoff_limit", "must be positive");
        }
        if n > self.cutoff_limit {
            r.push("cutoff", format!("{n} exceeds the hard limit {}", self.cutoff_limit));
        }
        let min_cutoff = match self.experiment {
            Experiment::Fig6SqueezedDistribution => 10,
            Experiment::Fig3Maps | Experiment::Fig7OptimalSqueeze => 2,
            _ => 3,
        };
        if n < min_cutoff {
            r.push("cutoff", format!("must be at least {min_cutoff} for {}", self.experiment));
        }
        self.check_system(&mut r);
        self.check_bath(&mut r);
        self.check_sweep(&mut r);
        self.check_pulse(&mut r);
        self.check_experiment(&mut r);
        if r.is_empty() {
            if let Err(e) = self.system_params() {
                r.issues.extend(e.issues);
            }
            if let Err(e) = self.bath_params() {
                r.issues.extend(e.issues);
            }
        }
        r.into_result()
    }

    fn check_system(&self, r: &mut ValidationReport) {
        let s = &self.system;
        for (name, v) in [("system.kappa", s.kappa), ("system.kappa1", s.kappa1), ("system.kappa2", s.kappa2)] {
            if let Some(k) = v {
                if !(k > 0.0 && k.is_finite()) {
                    r.push(name, "loss rate must be positive and finite");
                }
            }
        }
        for (name, v) in [
            ("system.u", s.u),
            ("system.u1", s.u1),
            ("system.u2", s.u2),
            ("system.delta", s.delta),
            ("system.delta1", s.delta1),
            ("system.delta2", s.delta2),
            ("system.j", s.j),
        ] {
            if v.is_some_and(|x| !x.is_finite()) {
                r.push(name, "must be finite");
            }
        }
        for (name, v) in [("system.f1", s.f1), ("system.f2", s.f2)] {
            if let Some(z) = v {
                let z = z.value();
                if !(z.re.is_finite() && z.im.is_finite()) {
                    r.push(name, "must be finite");
                }
            }
        }
        if s.u.is_some() && (s.u1.is_some() || s.u2.is_some()) {
            r.push("system.u", "give either u or u1/u2, not both");
        }
        if s.delta.is_some() && (s.delta1.is_some() || s.delta2.is_some()) {
            r.push("system.delta", "give either delta or delta1/delta2, not both");
        }
        if s.kappa.is_some() && (s.kappa1.is_some() || s.kappa2.is_some()) {
            r.push("system.kappa", "give either kappa or kappa1/kappa2, not both");
        }
        match s.optimal {
            OptimalRule::None => {}
            OptimalRule::FromU => {
                if s.u.is_none() {
                    r.push("system.u", "required by optimal = \"from-u\"");
                } else if s.u.is_some_and(|u| u <= 0.0) {
                    r.push("system.u", "must be positive for optimal = \"from-u\"");
                }
                if s.j.is_some() {
                    r.push("system.j", "derived from u when optimal = \"from-u\"");
                }
                if s.delta.is_some() || s.delta1.is_some() || s.delta2.is_some() {
                    r.push("system.delta", "derived from u when optimal = \"from-u\"");
                }
                if s.kappa1.is_some() || s.kappa2.is_some() {
                    r.push("system.kappa1", "the optimum assumes identical cavities; use kappa");
                }
            }
            OptimalRule::FromJ => {
                if s.j.is_none() {
                    r.push("system.j", "required by optimal = \"from-j\"");
                }
                if s.u.is_some() || s.u1.is_some() || s.u2.is_some() {
                    r.push("system.u", "derived from j when optimal = \"from-j\"");
                }
                if s.delta.is_some() || s.delta1.is_some() || s.delta2.is_some() {
                    r.push("system.delta", "derived from j when optimal = \"from-j\"");
                }
                if s.kappa1.is_some() || s.kappa2.is_some() {
                    r.push("system.kappa1", "the optimum assumes identical cavities; use kappa");
                }
            }
        }
    }

    fn check_bath(&self, r: &mut ValidationReport) {
        let b = &self.bath;
        if b.n_th.is_some_and(|x| !(x >= 0.0 && x.is_finite())) {
            r.push("bath.n_th", "must be finite and non-negative");
        }
        if b.dephasing_rate.is_some_and(|x| !(x >= 0.0 && x.is_finite())) {
            r.push("bath.dephasing_rate", "must be finite and non-negative");
        }
        if b.cascade_efficiency.is_some_and(|x| !(0.0..=1.0).contains(&x)) {
            r.push("bath.cascade_efficiency", "must lie in [0, 1]");
        }
        if b.squeeze_r.is_some_and(|x| !(x >= 0.0 && x.is_finite())) {
            r.push("bath.squeeze_r", "must be finite and non-negative");
        }
        if b.squeeze_port.is_some_and(|p| p != 1 && p != 2) {
            r.push("bath.squeeze_port", "must be 1 or 2");
        }
        if b.squeeze_r.is_some() && b.cascade_efficiency.is_some_and(|x| x > 0.0) {
            r.push("bath.squeeze_r", "a squeezed reservoir cannot be combined with the cascaded link");
        }
        if (b.squeeze_theta.is_some() || b.squeeze_port.is_some() || b.squeeze_form.is_some()) && b.squeeze_r.is_none() {
            r.push("bath.squeeze_r", "required when other squeeze keys are given");
        }
    }

    fn check_sweep(&self, r: &mut ValidationReport) {
        let s = &self.sweep;
        let positive_list = |r: &mut ValidationReport, name: &str, v: &Option<Vec<f64>>, allow_zero: bool| {
            if let Some(v) = v {
                if v.is_empty() {
                    r.push(name, "sweep grid is empty");
                } else if v.iter().any(|x| !(x.is_finite() && (*x > 0.0 || (allow_zero && *x == 0.0)))) {
                    r.push(name, if allow_zero { "values must be finite and non-negative" } else { "values must be positive" });
                }
            }
        };
        positive_list(r, "sweep.u_values", &s.u_values, false);
        positive_list(r, "sweep.n_th_values", &s.n_th_values, true);
        positive_list(r, "sweep.dephasing_values", &s.dephasing_values, true);
        for (name, v) in [
            ("sweep.points", s.points),
            ("sweep.map_points", s.map_points),
            ("sweep.tau_points", s.tau_points),
            ("sweep.time_points", s.time_points),
            ("sweep.r_points", s.r_points),
        ] {
            match v {
                Some(0) => r.push(name, "sweep grid is empty"),
                Some(1) => r.push(name, "needs at least two points"),
                _ => {}
            }
        }
        if let (Some(a), Some(b)) = (s.n1_min, s.n1_max) {
            if !(b > a) {
                r.push("sweep.n1_max", "must exceed n1_min");
            }
        }
        for (name, v) in [("sweep.n1_min", s.n1_min), ("sweep.n1_max", s.n1_max), ("sweep.n1_target", s.n1_target)] {
            if v.is_some_and(|x| !(x > 0.0 && x.is_finite())) {
                r.push(name, "occupation must be positive");
            }
        }
        for (name, v, positive) in [
            ("sweep.u_range", s.u_range, true),
            ("sweep.j_range", s.j_range, true),
            ("sweep.delta_range", s.delta_range, false),
            ("sweep.n_th_range", s.n_th_range, true),
            ("sweep.dephasing_range", s.dephasing_range, true),
            ("sweep.alpha_range", s.alpha_range, true),
            ("sweep.drive_range", s.drive_range, true),
        ] {
            if let Some([a, b]) = v {
                if !(a.is_finite() && b.is_finite() && b > a) {
                    r.push(name, "needs [low, high] with high > low");
                } else if positive && a <= 0.0 {
                    r.push(name, "bounds must be positive (logarithmic axis)");
                }
            }
        }
        for (name, v) in [("sweep.tau_max", s.tau_max), ("sweep.r_max", s.r_max), ("sweep.r_display", s.r_display)] {
            if v.is_some_and(|x| !(x > 0.0 && x.is_finite())) {
                r.push(name, "must be positive");
            }
        }
    }

    fn check_pulse(&self, r: &mut ValidationReport) {
        if let Some(p) = &self.pulse {
            if p.sigma_t.is_some_and(|s| !(s > 0.0 && s.is_finite())) {
                r.push("pulse.sigma_t", "must be positive");
            }
            if p.t0.is_some_and(|t| !(t >= 0.0 && t.is_finite())) {
                r.push("pulse.t0", "must be finite and non-negative");
            }
        }
        if let Some(g) = &self.gate {
            if g.width.is_some_and(|w| !(w > 0.0 && w.is_finite())) {
                r.push("gate.width", "must be positive");
            }
            if g.points.is_some_and(|n| n < 2) {
                r.push("gate.points", "needs at least two points");
            }
        }
        if let Some(m) = &self.mixing {
            if m.gamma0.is_some_and(|g| !(g >= 0.0 && g.is_finite())) {
                r.push("mixing.gamma0", "must be finite and non-negative");
            }
            if m.branch.is_some_and(|b| b > 1) {
                r.push("mixing.branch", "must be 0 or 1");
            }
        }
        if let Some(j) = &self.jc {
            for (name, v) in [("jc.kappa1", j.kappa1), ("jc.kappa2", j.kappa2)] {
                if v.is_some_and(|k| !(k > 0.0 && k.is_finite())) {
                    r.push(name, "loss rate must be positive and finite");
                }
            }
            if j.optimal && (j.g.is_some() || j.delta1.is_some()) {
                r.push("jc.g", "g and delta1 are derived when optimal = true");
            }
            if j.n_tau.is_some_and(|n| !(n > 0.0)) {
                r.push("jc.n_tau", "must be positive");
            }
        }
    }

    fn check_experiment(&self, r: &mut ValidationReport) {
        let s = &self.system;
        let b = &self.bath;
        let uses_pulse = matches!(
            self.experiment,
            Experiment::Fig5bisPulsedTwoTime | Experiment::Fig9Cascaded | Experiment::Fig10OutputMixing
        );
        if !uses_pulse && (self.pulse.is_some() || self.gate.is_some()) {
            r.push("pulse", format!("{} has no pulsed run", self.experiment));
        }
        if self.experiment != Experiment::Fig10OutputMixing && self.mixing.is_some() {
            r.push("mixing", format!("only used by {}", Experiment::Fig10OutputMixing));
        }
        if self.experiment != Experiment::JcFig11 && self.jc.is_some() {
            r.push("jc", format!("only used by {}", Experiment::JcFig11));
        }
        match self.experiment {
            Experiment::Fig2G2VsN1 | Experiment::Fig8UpbVsOptimal => {
                if s.optimal != OptimalRule::FromU && self.sweep.u_values.is_none() {
                    r.push("system.optimal", "must be \"from-u\" (or give sweep.u_values)");
                }
                if b.cascade_efficiency.is_some_and(|x| x > 0.0) || b.squeeze_r.is_some() {
                    r.push("bath", "the Kerr-dimer sweeps use coherent coupling without a squeezed reservoir");
                }
            }
            Experiment::Fig4ThermalDephasingMap => {
                if s.optimal == OptimalRule::None {
                    r.push("system.optimal", "must select an optimum (\"from-u\" or \"from-j\")");
                }
                if s.f1.is_none() {
                    r.push("system.f1", "required (the drive is held fixed across the map)");
                }
            }
            Experiment::Fig5G2TauVsU => {
                if s.optimal != OptimalRule::FromU && self.sweep.u_values.is_none() {
                    r.push("sweep.u_values", "required unless optimal = \"from-u\"");
                }
            }
            Experiment::Fig5bisPulsedTwoTime => {
                if s.optimal == OptimalRule::None && s.j.is_none() {
                    r.push("system.j", "required");
                }
            }
            Experiment::Fig9Cascaded => {
                if !b.cascade_efficiency.is_some_and(|x| x > 0.0) {
                    r.push("bath.cascade_efficiency", "must be positive for the cascaded pair");
                }
                if s.j.is_some_and(|j| j != 0.0) {
                    r.push("system.j", "the cascaded pair has no coherent hopping");
                }
                if !s.f2.is_some_and(|f| f.value().norm() > 0.0) {
                    r.push("system.f2", "the target cavity must be driven");
                }
                if s.f1.is_some() {
                    r.push("system.f1", "derived from the cascaded optimum");
                }
            }
            Experiment::Fig10OutputMixing => {
                if s.j.is_some_and(|j| j != 0.0) {
                    r.push("system.j", "the output condition assumes uncoupled cavities");
                }
                if s.f1.is_some() || s.f2.is_some() {
                    r.push("system.f1", "drives come from mixing.f0, theta_in, phi_in");
                }
            }
            Experiment::JcFig11 => {
                if self.jc.is_none() {
                    r.push("jc", "section required");
                }
            }
            Experiment::Fig3Maps | Experiment::Fig6SqueezedDistribution | Experiment::Fig7OptimalSqueeze => {}
        }
    }

    /// Hamiltonian parameters after applying the optimal-condition rule.
    pub fn system_params(&self) -> Result<SystemParams, ValidationReport> {
        let s = &self.system;
        let kappa = s.kappa.unwrap_or(1.0);
        let mut p = SystemParams {
            delta1: s.delta1.or(s.delta).unwrap_or(0.0),
            delta2: s.delta2.or(s.delta).unwrap_or(0.0),
            u1: s.u1.or(s.u).unwrap_or(0.0),
            u2: s.u2.or(s.u).unwrap_or(0.0),
            j_hop: s.j.unwrap_or(0.0),
            f1: s.f1.map_or(C64::new(0.0, 0.0), Complex::value),
            f2: s.f2.map_or(C64::new(0.0, 0.0), Complex::value),
            kappa1: s.kappa1.unwrap_or(kappa),
            kappa2: s.kappa2.unwrap_or(kappa),
        };
        match s.optimal {
            OptimalRule::None => {}
            OptimalRule::FromU => {
                let u = s.u.unwrap_or(0.0);
                let (j, o) = optimum_for_u(u, kappa).map_err(|e| ValidationReport::single("system.u", e.to_string()))?;
                p.j_hop = j;
                p.delta1 = o.delta[0];
                p.delta2 = o.delta[0];
            }
            OptimalRule::FromJ => {
                let j = s.j.unwrap_or(0.0);
                let o = delta_u_opt(j, kappa).map_err(|e| ValidationReport::single("system.j", e.to_string()))?;
                p.delta1 = o.delta[0];
                p.delta2 = o.delta[0];
                p.u1 = o.u[0];
                p.u2 = o.u[0];
            }
        }
        p.validate().map_err(|e| ValidationReport::single("system", e.to_string()))?;
        Ok(p)
    }

    pub fn bath_params(&self) -> Result<BathParams, ValidationReport> {
        let b = &self.bath;
        let squeeze = b.squeeze_r.map(|r| SqueezedBath {
            xi: C64::from_polar(r, b.squeeze_theta.unwrap_or(0.0)),
            port: if b.squeeze_port == Some(2) { Mode::Two } else { Mode::One },
            form: match b.squeeze_form.unwrap_or_default() {
                SqueezeForm::AsPrinted => SqueezedBathForm::AsPrinted,
                SqueezeForm::Standard => SqueezedBathForm::Standard,
            },
        });
        let bath = BathParams {
            n_th: b.n_th.unwrap_or(0.0),
            dephasing_rate: b.dephasing_rate.unwrap_or(0.0),
            cascade_efficiency: b.cascade_efficiency.unwrap_or(0.0),
            squeeze_reservoir: squeeze,
        };
        bath.validate().map_err(|e| ValidationReport::single("bath", e.to_string()))?;
        Ok(bath)
    }

    /// Pulses on each driven port; peak amplitudes default to the static drives.
    pub fn pulses(&self, static_drive: (C64, C64), default_sigma: f64) -> Result<Vec<(Mode, Pulse)>, ValidationReport> {
        let p = self.pulse.clone().unwrap_or_default();
        let sigma = p.sigma_t.unwrap_or(default_sigma);
        let t0 = p.t0.unwrap_or(3.5 * sigma);
        let f1 = p.f1.map_or(static_drive.0, Complex::value);
        let f2 = p.f2.map_or(static_drive.1, Complex::value);
        let mut out = Vec::new();
        for (mode, f) in [(Mode::One, f1), (Mode::Two, f2)] {
            if f.norm() > 0.0 {
                let pulse = Pulse::new(f, sigma, t0).map_err(|e| ValidationReport::single("pulse", e.to_string()))?;
                out.push((mode, pulse));
            }
        }
        if out.is_empty() {
            return Err(ValidationReport::single("pulse.f1", "no port is driven"));
        }
        Ok(out)
    }

    pub fn jc_params(&self) -> Result<JcParams, ValidationReport> {
        let j = self.jc.clone().unwrap_or_default();
        let mut jc = JcParams {
            delta1: j.delta1.unwrap_or(0.0),
            delta2: j.delta2.unwrap_or(0.0),
            g: j.g.unwrap_or(0.0),
            kappa1: j.kappa1.unwrap_or(1.0),
            kappa2: j.kappa2.unwrap_or(1.0),
            f1: j.f1.map_or(C64::new(0.0, 0.0), Complex::value),
            f2: j.f2.map_or(C64::new(0.0, 0.0), Complex::value),
        };
        if j.optimal {
            let o = upb_core::optimal::jc_opt(&jc).map_err(|e| ValidationReport::single("jc", e.to_string()))?;
            jc.delta1 = o.value(0, "delta1").map_or(0.0, |z| z.re);
            jc.g = o.value(0, "g").map_or(0.0, |z| z.re);
        }
        if jc.g == 0.0 {
            return Err(ValidationReport::single("jc.g", "coupling must be nonzero"));
        }
        Ok(jc)
    }

    /// Human-readable derived quantities shown by `validate`.
    pub fn derived_summary(&self) -> Vec<String> {
        let mut out = vec![format!("experiment: {} ({})", self.experiment, self.experiment.description())];
        if self.experiment.uses_master_equation() {
            out.push(format!("cutoff: N_max = {} (limit {})", self.cutoff(), self.cutoff_limit));
        }
        out.push(format!("resolution: {:?}", self.resolution).to_lowercase());
        if let Ok(p) = self.system_params() {
            out.push(format!(
                "system: Δ₁={:.6e} Δ₂={:.6e} U₁={:.6e} U₂={:.6e} J={:.6e} κ₁={} κ₂={}",
                p.delta1, p.delta2, p.u1, p.u2, p.j_hop, p.kappa1, p.kappa2
            ));
            if let Ok(b) = self.bath_params() {
                if b.cascade_efficiency > 0.0 {
                    out.push(format!("cascade: χ = √(ηκ₁κ₂) = {:.6e}", b.chi(&p)));
                }
                if b.n_th > 0.0 || b.dephasing_rate > 0.0 {
                    out.push(format!("bath: n_th={} dephasing_rate={}", b.n_th, b.dephasing_rate));
                }
            }
        }
        if self.experiment == Experiment::JcFig11 {
            if let Ok(jc) = self.jc_params() {
                out.push(format!("jc: Δ₁={:.6e} Δ₂={:.6e} g={:.6e}", jc.delta1, jc.delta2, jc.g));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(text).unwrap()
    }

    #[test]
    fn every_id_round_trips() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_id(e.id()), Some(e));
            let cfg = parse(&format!("experiment = \"{}\"", e.id()));
            assert_eq!(cfg.experiment, e);
        }
    }

    #[test]
    fn complex_accepts_number_or_pair() {
        let cfg = parse("experiment = \"fig3-maps\"\n[system]\nf1 = 0.5\nf2 = [0.1, -0.2]\n");
        let p = cfg.system_params().unwrap();
        assert_eq!(p.f1, C64::new(0.5, 0.0));
        assert_eq!(p.f2, C64::new(0.1, -0.2));
    }

    #[test]
    fn unknown_keys_are_rejected_with_context() {
        let err = ExperimentConfig::from_toml("experiment = \"fig3-maps\"\n[system]\nkapa = 1.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("kapa") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn zero_kappa_is_rejected() {
        let cfg = parse("experiment = \"fig3-maps\"\n[system]\nkappa = 0.0\n");
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.issues[0].field, "system.kappa");
    }

    #[test]
    fn cascade_efficiency_above_one_is_rejected() {
        let cfg = parse("experiment = \"fig9-cascaded\"\n[system]\nu = 0.01\nf2 = 0.01\n[bath]\ncascade_efficiency = 1.5\n");
        let err = cfg.validate().unwrap_err();
        assert!(err.issues.iter().any(|i| i.field == "bath.cascade_efficiency"));
    }

    #[test]
    fn empty_sweep_is_rejected() {
        let cfg = parse("experiment = \"fig5-g2tau-vs-U\"\n[sweep]\nu_values = []\n");
        let err = cfg.validate().unwrap_err();
        assert!(err.issues.iter().any(|i| i.message.contains("empty")));
        let cfg = parse("experiment = \"fig2-g2-vs-n1\"\n[system]\nu = 0.01\noptimal = \"from-u\"\n[sweep]\npoints = 0\n");
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn cutoff_limit_is_enforced() {
        let cfg = parse("experiment = \"fig5-g2tau-vs-U\"\ncutoff = 30\n");
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("hard limit 24"));
    }

    #[test]
    fn optimum_from_u_fills_j_and_delta() {
        let cfg = parse("experiment = \"fig2-g2-vs-n1\"\n[system]\nu = 0.01\noptimal = \"from-u\"\n");
        cfg.validate().unwrap();
        let p = cfg.system_params().unwrap();
        let o = delta_u_opt(p.j_hop, 1.0).unwrap();
        assert!((o.u[0] - 0.01).abs() < 1e-12);
        assert_eq!(p.delta1, o.delta[0]);
    }

    #[test]
    fn derived_chi_is_echoed() {
        let cfg = parse("experiment = \"fig9-cascaded\"\n[system]\nu = 0.01\nf2 = 0.01\n[bath]\ncascade_efficiency = 0.25\n");
        cfg.validate().unwrap();
        let s = cfg.derived_summary().join("\n");
        assert!(s.contains("χ = √(ηκ₁κ₂) = 5.000000e-1"), "{s}");
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = parse("experiment = \"fig10-output-mixing\"\n[mixing]\nf0 = 0.1\ntheta_in = 1.5707963267948966\n");
        assert_eq!(parse(&cfg.to_toml()), cfg);
    }
}
