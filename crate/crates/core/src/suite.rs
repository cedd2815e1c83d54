//! Named verification suites with pinned configurations.
//!
//! Each suite returns a list of criteria (value, threshold, verdict) and
//! optionally writes its artifacts under an output directory.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::gevrey::GevreyParams;
use crate::grid::{Field, GridSpec};
use crate::harness::{compare_damping, decay_report, worker_pool};
use crate::io;
use crate::mms;
use crate::solver::{pde_residual, run, Forcing, InitialData, RunConfig, Scheme, SimState, SineTerm, Stepper, Trajectory};
use crate::toy::{run_toy, toy_energy, wave_series, ToyConfig, ToyInitial, ToyTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    OracleLinear,
    Mms,
    RefineResiduals,
    Decay,
    Toy,
    Compare,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::OracleLinear => "oracle-linear",
            SuiteKind::Mms => "mms",
            SuiteKind::RefineResiduals => "refine-residuals",
            SuiteKind::Decay => "decay",
            SuiteKind::Toy => "toy",
            SuiteKind::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One pass/fail check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Criterion {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: Relation::AtMost,
            threshold,
            pass: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: Relation::AtLeast,
            threshold,
            pass: value >= threshold,
        }
    }

    pub fn line(&self) -> String {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        format!(
            "{} {}: {:.6e} {} {:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            rel,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub kind: SuiteKind,
    pub criteria: Vec<Criterion>,
    pub details: serde_json::Value,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        io::ensure_dir(dir)?;
        io::write_json(&dir.join("summary.json"), self)
    }
}

fn finish(kind: SuiteKind, criteria: Vec<Criterion>, details: serde_json::Value, out: Option<&Path>) -> Result<SuiteReport> {
    let r = SuiteReport { kind, criteria, details };
    if let Some(dir) = out {
        r.write(dir)?;
    }
    Ok(r)
}

fn unwrap_run(cfg: &RunConfig) -> Result<Trajectory> {
    run(cfg).map_err(|f| f.error)
}

fn base_config(grid: GridSpec, dt: f64, t_final: f64, initial: InitialData) -> RunConfig {
    RunConfig {
        grid,
        params: GevreyParams::reference(),
        dt,
        t_final,
        initial,
        damping: true,
        advection: true,
        forcing: Forcing::None,
        output_every: 1,
        dump_fields: false,
        scheme: Scheme::CnHeun,
    }
}

// ---------------------------------------------------------------- oracle-linear

/// Terms of the linear-oracle datum, spread over several x-modes.
pub fn oracle_terms() -> Vec<SineTerm> {
    let t = |k, n, coeff, phase| SineTerm { k, n, coeff, phase };
    vec![
        t(0, 1, 0.5, 0.0),
        t(1, 1, 1.0, 0.0),
        t(1, 3, -0.25, 0.3),
        t(2, 2, 0.4, 1.1),
        t(5, 1, 0.2, -0.7),
        t(7, 2, 0.1, 2.0),
    ]
}

pub fn oracle_linear_config() -> RunConfig {
    let mut cfg = base_config(
        GridSpec::new(8, 257, 10.0),
        1e-3,
        1.0,
        InitialData::SineSeries { terms: oracle_terms() },
    );
    cfg.advection = false;
    cfg.output_every = 100;
    cfg
}

/// Damped-heat sine-series solution Σ c_n e^{−(μ_n² + d)t} sin(μ_n y) cos(kx + φ).
pub fn sine_series_exact(terms: &[SineTerm], ymax: f64, damping: f64, t: f64, x: f64, y: f64) -> f64 {
    terms
        .iter()
        .map(|s| {
            let mu = s.n as f64 * PI / ymax;
            s.coeff * (-(mu * mu + damping) * t).exp() * (mu * y).sin() * (s.k as f64 * x + s.phase).cos()
        })
        .sum()
}

pub fn max_physical_error(u: &Field, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let phys = u.to_physical();
    let xs = u.grid().x();
    let ys = u.grid().y();
    let mut err: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            err = err.max((phys[[i, j]] - exact(x, y)).abs());
        }
    }
    err
}

pub fn suite_oracle_linear(out: Option<&Path>) -> Result<SuiteReport> {
    let cfg = oracle_linear_config();
    let traj = unwrap_run(&cfg)?;
    let terms = oracle_terms();
    let ymax = cfg.grid.ymax;
    let last = traj.last();
    let t_end = last.state.t;
    let err = max_physical_error(&last.state.u, |x, y| sine_series_exact(&terms, ymax, 1.0, t_end, x, y));

    let l2_0 = traj.samples[0].state.u.l2_norm();
    let dissipation_excess = traj
        .samples
        .iter()
        .map(|s| s.state.u.l2_norm() - (-s.state.t).exp() * l2_0)
        .fold(f64::NEG_INFINITY, f64::max);

    let stepper = Stepper::new(&cfg)?;
    let next = stepper.step(&last.state)?;
    let residual = pde_residual(&last.state, &next, &cfg);

    let criteria = vec![
        Criterion::at_most("linear oracle max error at T = 1", err, 1e-6),
        Criterion::at_most("linear dissipation excess over e^-t", dissipation_excess, 1e-8),
        Criterion::at_most("linear oracle pde residual", residual, 1e-5),
    ];
    if let Some(dir) = out {
        io::write_run(&dir.join("run"), &traj, "completed")?;
    }
    finish(
        SuiteKind::OracleLinear,
        criteria,
        serde_json::json!({ "max_error": err, "pde_residual": residual }),
        out,
    )
}

// ---------------------------------------------------------------- mms

pub const MMS_DTS: [f64; 3] = [4e-3, 2e-3, 1e-3];
pub const MMS_DT_REFERENCE: f64 = 1.25e-4;
pub const MMS_NYS: [usize; 3] = [65, 129, 257];

fn mms_config(ny: usize, dt: f64, t_final: f64) -> RunConfig {
    let mut cfg = base_config(GridSpec::new(4, ny, 30.0), dt, t_final, InitialData::Manufactured);
    cfg.forcing = Forcing::Manufactured;
    cfg.output_every = usize::MAX / 2;
    cfg
}

/// Temporal study configs: three Δt plus a fine reference on one grid.
pub fn mms_temporal_configs() -> Vec<RunConfig> {
    MMS_DTS
        .iter()
        .chain(std::iter::once(&MMS_DT_REFERENCE))
        .map(|&dt| mms_config(257, dt, 0.5))
        .collect()
}

/// Spatial study configs: three grids at a Δt small enough to hide time error.
pub fn mms_spatial_configs() -> Vec<RunConfig> {
    MMS_NYS.iter().map(|&ny| mms_config(ny, 2.5e-4, 0.25)).collect()
}

pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MmsStudy {
    pub temporal_errors: Vec<f64>,
    pub temporal_orders: Vec<f64>,
    pub spatial_errors: Vec<f64>,
    pub spatial_orders: Vec<f64>,
}

pub fn mms_study() -> Result<MmsStudy> {
    let pool = worker_pool();
    let finals = |cfgs: Vec<RunConfig>| -> Result<Vec<SimState>> {
        pool.install(|| {
            cfgs.par_iter()
                .map(|c| unwrap_run(c).map(|t| t.last().state.clone()))
                .collect()
        })
    };
    let temporal = finals(mms_temporal_configs())?;
    let reference = temporal.last().expect("reference run");
    let temporal_errors: Vec<f64> = temporal[..3].iter().map(|s| (&s.u - &reference.u).l2_norm()).collect();
    let spatial = finals(mms_spatial_configs())?;
    let spatial_errors: Vec<f64> = spatial
        .iter()
        .map(|s| (&s.u - &mms::exact_field(s.grid(), s.t)).l2_norm())
        .collect();
    Ok(MmsStudy {
        temporal_orders: observed_orders(&temporal_errors),
        spatial_orders: observed_orders(&spatial_errors),
        temporal_errors,
        spatial_errors,
    })
}

pub fn suite_mms(out: Option<&Path>) -> Result<SuiteReport> {
    let s = mms_study()?;
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let criteria = vec![
        Criterion::at_least("mms temporal order", min(&s.temporal_orders), 1.9),
        Criterion::at_least("mms y-spatial order", min(&s.spatial_orders), 1.9),
    ];
    finish(SuiteKind::Mms, criteria, serde_json::to_value(&s).unwrap_or_default(), out)
}

// ---------------------------------------------------------------- refine-residuals

/// (Ny, Δt) with Δy and Δt halved together.
pub const REFINE_LEVELS: [(usize, f64); 3] = [(65, 0.02), (129, 0.01), (257, 0.005)];
/// Time at which the relations are checked.
pub const REFINE_T: f64 = 1.0;

pub fn refine_config(ny: usize, dt: f64) -> RunConfig {
    let mut cfg = base_config(
        GridSpec::new(8, ny, 16.0),
        dt,
        REFINE_T + 0.2,
        InitialData::GevreyProfile { amplitude: Some(0.05) },
    );
    // window spacing tied to Δt so the time-difference error refines too
    cfg.output_every = 2;
    cfg
}

#[derive(Debug, Clone, Serialize)]
pub struct RefineStudy {
    pub u_relation: Vec<f64>,
    pub lambda_relation: Vec<f64>,
    pub f_relation: Vec<f64>,
    pub wall_neumann_defect: Vec<f64>,
}

impl RefineStudy {
    pub fn factors(v: &[f64]) -> Vec<f64> {
        v.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

pub fn refine_study() -> Result<RefineStudy> {
    let rows: Vec<(f64, f64, f64, f64)> = worker_pool().install(|| {
        REFINE_LEVELS
            .par_iter()
            .map(|&(ny, dt)| {
                let cfg = refine_config(ny, dt);
                let traj = unwrap_run(&cfg)?;
                let i = traj
                    .samples
                    .iter()
                    .position(|s| (s.state.t - REFINE_T).abs() < 1e-9)
                    .ok_or_else(|| LabError::param("no sample at the check time"))?;
                let r = traj.residuals[i];
                let wall = crate::auxiliary::wall_neumann_defect(&traj.samples[i].aux.aux_u);
                Ok((r.u_relation, r.lambda_relation, r.f_relation, wall))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(RefineStudy {
        u_relation: rows.iter().map(|r| r.0).collect(),
        lambda_relation: rows.iter().map(|r| r.1).collect(),
        f_relation: rows.iter().map(|r| r.2).collect(),
        wall_neumann_defect: rows.iter().map(|r| r.3).collect(),
    })
}

pub fn suite_refine_residuals(out: Option<&Path>) -> Result<SuiteReport> {
    let s = refine_study()?;
    let mut criteria = vec![];
    for (name, v) in [("U-relation", &s.u_relation), ("lambda-relation", &s.lambda_relation)] {
        for (i, f) in RefineStudy::factors(v).into_iter().enumerate() {
            criteria.push(Criterion::at_least(
                format!("{name} residual reduction, level {} to {}", i + 1, i + 2),
                f,
                3.0,
            ));
        }
    }
    finish(
        SuiteKind::RefineResiduals,
        criteria,
        serde_json::to_value(&s).unwrap_or_default(),
        out,
    )
}

// ---------------------------------------------------------------- decay

/// Reference small-data run: ℓ = 1, N = 1056, ρ₀ = 1/2, ε₀ = 1e−3, K = 16, Ny = 257, T = 20.
pub fn decay_config() -> RunConfig {
    RunConfig::reference(16, 257, 20.0)
}

pub fn suite_decay(out: Option<&Path>) -> Result<SuiteReport> {
    let cfg = decay_config();
    let traj = unwrap_run(&cfg)?;
    let d = decay_report(&traj.norms(), &cfg.params);
    let c_ratio = traj.monitor.max_c_ratio();
    let criteria = vec![
        Criterion::at_most("decay envelope max e^(t/4)|a|_X over 12 eps0", d.max_scaled_x / d.bound, 0.9),
        Criterion::at_most("bootstrap lhs over rhs_C, max over samples", c_ratio, 1.0),
    ];
    if let Some(dir) = out {
        io::write_run(&dir.join("run"), &traj, "completed")?;
    }
    finish(
        SuiteKind::Decay,
        criteria,
        serde_json::json!({ "decay": d, "first_violation_c": traj.monitor.first_violation_c() }),
        out,
    )
}

// ---------------------------------------------------------------- toy

pub fn toy_wave_terms() -> (Vec<ToyTerm>, Vec<ToyTerm>) {
    let t = |n, a| ToyTerm { k: 0, n, a, phase: 0.0 };
    (vec![t(1, 1.0), t(3, -0.2)], vec![t(2, 0.5)])
}

pub fn toy_wave_config() -> ToyConfig {
    let (h, g) = toy_wave_terms();
    ToyConfig {
        grid: GridSpec::new(2, 257, PI),
        dt: 1e-3,
        t_final: 2.0,
        rho0: 0.5,
        initial: ToyInitial::SineSeries { h, g },
        output_every: 100,
    }
}

pub fn suite_toy(out: Option<&Path>) -> Result<SuiteReport> {
    let cfg = toy_wave_config();
    let traj = run_toy(&cfg)?;
    let (h, g) = toy_wave_terms();
    let ymax = cfg.grid.ymax;
    let t_end = traj.last.t;
    let err = max_physical_error(&traj.last.h, |_, y| wave_series(&h, &g, ymax, t_end, y));
    let e0 = traj.rows[0].energy;
    let drift = (toy_energy(&traj.last) - e0).abs() / t_end;
    let criteria = vec![
        Criterion::at_most("toy wave eigen-series max error at T = 2", err, 1e-4),
        Criterion::at_most("toy linear energy drift per unit time", drift, 1e-6),
    ];
    if let Some(dir) = out {
        io::write_toy(&dir.join("run"), &traj)?;
    }
    finish(
        SuiteKind::Toy,
        criteria,
        serde_json::json!({ "max_error": err, "energy_drift": drift, "energy0": e0 }),
        out,
    )
}

// ---------------------------------------------------------------- compare

pub fn compare_linear_config() -> RunConfig {
    let mut cfg = base_config(
        GridSpec::new(4, 129, 10.0),
        1e-3,
        1.0,
        InitialData::SineSeries {
            terms: vec![
                SineTerm { k: 1, n: 1, coeff: 1.0, phase: 0.0 },
                SineTerm { k: 2, n: 2, coeff: 0.3, phase: 0.5 },
            ],
        },
    );
    cfg.advection = false;
    cfg.output_every = 100;
    cfg
}

pub fn compare_nonlinear_config() -> RunConfig {
    let mut cfg = base_config(
        GridSpec::new(8, 129, 20.0),
        1e-2,
        10.0,
        InitialData::GevreyProfile { amplitude: Some(0.05) },
    );
    cfg.output_every = 50;
    cfg
}

pub fn suite_compare(out: Option<&Path>) -> Result<SuiteReport> {
    let lin_cfg = compare_linear_config();
    let lin = compare_damping(&lin_cfg);
    let expect = (-lin_cfg.t_final).exp();
    let lin_err = ((lin.final_l2_ratio - expect) / expect).abs();
    let nl_cfg = compare_nonlinear_config();
    let nl = compare_damping(&nl_cfg);
    let criteria = vec![
        Criterion::at_most("linear damped/undamped L2 ratio vs e^-T, relative", lin_err, 1e-6),
        Criterion::at_most("nonlinear damped/undamped X ratio at T = 10", nl.final_x_ratio, (-5.0f64).exp()),
    ];
    if let Some(dir) = out {
        io::write_comparison(&dir.join("linear"), &lin_cfg, &lin)?;
        io::write_comparison(&dir.join("nonlinear"), &nl_cfg, &nl)?;
    }
    finish(
        SuiteKind::Compare,
        criteria,
        serde_json::json!({ "linear": lin, "nonlinear": nl }),
        out,
    )
}

pub fn run_suite(kind: SuiteKind, out: Option<&Path>) -> Result<SuiteReport> {
    match kind {
        SuiteKind::OracleLinear => suite_oracle_linear(out),
        SuiteKind::Mms => suite_mms(out),
        SuiteKind::RefineResiduals => suite_refine_residuals(out),
        SuiteKind::Decay => suite_decay(out),
        SuiteKind::Toy => suite_toy(out),
        SuiteKind::Compare => suite_compare(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criterion_verdicts() {
        assert!(Criterion::at_most("a", 1.0, 1.0).pass);
        assert!(!Criterion::at_most("a", f64::NAN, 1.0).pass);
        assert!(Criterion::at_least("b", 2.0, 1.9).pass);
        assert!(Criterion::at_least("b", 2.0, 1.9).line().starts_with("PASS b:"));
    }

    #[test]
    fn orders_of_geometric_errors() {
        let o = observed_orders(&[1.0, 0.25, 0.0625]);
        assert!(o.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn pinned_configs_are_valid() {
        oracle_linear_config().validate().unwrap();
        decay_config().validate().unwrap();
        for c in mms_temporal_configs().iter().chain(&mms_spatial_configs()) {
            c.validate().unwrap();
        }
        for (ny, dt) in REFINE_LEVELS {
            refine_config(ny, dt).validate().unwrap();
        }
        compare_linear_config().validate().unwrap();
        compare_nonlinear_config().validate().unwrap();
        toy_wave_config().validate().unwrap();
    }
}
