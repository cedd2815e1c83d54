//! Time integration of the damped Prandtl system
//!
//!   ∂ₜu + u∂ₓu + v∂_y u − ∂_y²u + u = S,   v = −∫₀ʸ ∂ₓu dỹ,
//!   u|_{y=0} = u|_{y=Ymax} = 0,
//!
//! co-evolved with the auxiliary primitive f:
//!
//!   ∂ₜf + u∂ₓf + v∂_y f − ∂_y²f + f = −∂ₓ³v = ∫₀ʸ ∂ₓ⁴u dỹ,
//!   f|_{y=0} = 0, ∂_y f|_{y=Ymax} = 0, f|_{t=0} = 0.
//!
//! Both use Crank–Nicolson on ∂_y² and the damping term and a two-stage
//! (Heun) explicit treatment of transport and forcing.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::auxiliary::{AuxSnapshot, Window, WindowPoint, WindowSample};
use crate::error::{LabError, Result};
use crate::gevrey::{norm_x, GevreyParams};
use crate::grid::{Field, Grid, GridSpec};
use crate::harness::BootstrapMonitor;
use crate::mms;
use crate::norms::{norms_xyz, NormReport};
use crate::yop::{CnSystem, TopBoundary};

/// Largest admissible Δt·K·max|u|.
pub const CFL_LIMIT: f64 = 0.5;

fn yes() -> bool {
    true
}

/// One term `coeff · cos(k x + phase) · sin(nπ y / Ymax)` of a sine-series datum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineTerm {
    pub k: u32,
    pub n: u32,
    pub coeff: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Initial-data descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Zero,
    /// c · sin(x) · y² e^{−y²/2}; with no amplitude, c normalizes ‖u₀‖_{X_{2ρ₀}} = ε₀.
    GevreyProfile {
        #[serde(default)]
        amplitude: Option<f64>,
    },
    SineSeries { terms: Vec<SineTerm> },
    /// The manufactured solution at t = 0.
    Manufactured,
}

/// Source term in the u-equation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Forcing {
    #[default]
    None,
    Manufactured,
}

/// Time-integration scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Crank–Nicolson vertical diffusion and damping, Heun transport.
    #[default]
    CnHeun,
}

/// Full description of a run; JSON configs mirror these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub params: GevreyParams,
    pub dt: f64,
    pub t_final: f64,
    pub initial: InitialData,
    #[serde(default = "yes")]
    pub damping: bool,
    /// Test hook: `false` drops u∂ₓ + v∂_y from both equations.
    #[serde(default = "yes")]
    pub advection: bool,
    #[serde(default)]
    pub forcing: Forcing,
    /// Steps between recorded samples.
    pub output_every: usize,
    #[serde(default)]
    pub dump_fields: bool,
    #[serde(default)]
    pub scheme: Scheme,
}

impl RunConfig {
    /// Reference small-data configuration: ℓ = 1, N = 1056, ρ₀ = 1/2, ε₀ = 1e−3.
    pub fn reference(k_max: usize, ny: usize, t_final: f64) -> Self {
        Self {
            grid: GridSpec::new(k_max, ny, 30.0),
            params: GevreyParams::reference(),
            dt: 1e-2,
            t_final,
            initial: InitialData::GevreyProfile { amplitude: None },
            damping: true,
            advection: true,
            forcing: Forcing::None,
            output_every: 10,
            dump_fields: false,
            scheme: Scheme::CnHeun,
        }
    }

    pub fn damping_coeff(&self) -> f64 {
        if self.damping {
            1.0
        } else {
            0.0
        }
    }

    pub fn n_steps(&self) -> Result<usize> {
        let n = (self.t_final / self.dt).round();
        if (n * self.dt - self.t_final).abs() > 1e-9 * self.t_final.max(1.0) {
            return Err(LabError::param(format!(
                "t_final = {} is not a whole number of steps of dt = {}",
                self.t_final, self.dt
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.params.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(LabError::param(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(LabError::param(format!("t_final = {} must be >= 0", self.t_final)));
        }
        if self.output_every == 0 {
            return Err(LabError::param("output_every must be >= 1"));
        }
        self.n_steps()?;
        Ok(())
    }

    pub fn source_at(&self, grid: &Arc<Grid>, t: f64) -> Option<Field> {
        match self.forcing {
            Forcing::None => None,
            Forcing::Manufactured => Some(mms::source_field(grid, t, self.damping_coeff(), self.advection)),
        }
    }
}

/// The unnormalized experimental profile sin(x) · y² e^{−y²/2}.
pub fn gevrey_profile(grid: &Arc<Grid>) -> Field {
    Field::from_physical_fn(grid, |x, y| x.sin() * y * y * (-0.5 * y * y).exp())
}

/// Build u₀ from its descriptor.
pub fn initial_field(grid: &Arc<Grid>, init: &InitialData, params: &GevreyParams) -> Result<Field> {
    Ok(match init {
        InitialData::Zero => Field::zeros(grid),
        InitialData::GevreyProfile { amplitude } => {
            let base = gevrey_profile(grid);
            match amplitude {
                Some(a) => base.scale(*a),
                None => {
                    let norm = norm_x(&base, 2.0 * params.rho0, params)?;
                    base.scale(params.eps0 / norm)
                }
            }
        }
        InitialData::SineSeries { terms } => {
            let ymax = grid.ymax();
            for t in terms {
                if t.k as usize > grid.k_max() || t.n == 0 {
                    return Err(LabError::param(format!(
                        "sine term (k = {}, n = {}) outside 0..=K, n >= 1",
                        t.k, t.n
                    )));
                }
            }
            let terms = terms.clone();
            Field::from_physical_fn(grid, move |x, y| {
                terms
                    .iter()
                    .map(|t| t.coeff * (t.k as f64 * x + t.phase).cos() * (t.n as f64 * PI * y / ymax).sin())
                    .sum()
            })
        }
        InitialData::Manufactured => mms::exact_field(grid, 0.0),
    })
}

/// v = −∫₀ʸ ∂ₓu dỹ.
pub fn normal_velocity(u: &Field) -> Field {
    u.dx(1).integrate_y_from_0().scale(-1.0)
}

/// Solution state at one time.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub u: Field,
    /// Auxiliary primitive f = ∫₀ʸ𝒰.
    pub f: Field,
    pub damping: bool,
    pub forcing: Forcing,
}

impl SimState {
    pub fn initial(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid.build()?;
        let mut u = initial_field(&grid, &cfg.initial, &cfg.params)?;
        u.zero_boundary_rows();
        Ok(Self {
            t: 0.0,
            f: Field::zeros(&grid),
            u,
            damping: cfg.damping,
            forcing: cfg.forcing,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }

    pub fn aux(&self) -> AuxSnapshot {
        AuxSnapshot::from_state(self.t, &self.u, &self.f)
    }
}

/// Precomputed implicit systems for a fixed Δt.
#[derive(Debug, Clone)]
pub struct Stepper {
    cfg: RunConfig,
    grid: Arc<Grid>,
    u_sys: CnSystem,
    f_sys: CnSystem,
}

impl Stepper {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid.build()?;
        Self::with_grid(cfg, grid)
    }

    pub fn with_grid(cfg: &RunConfig, grid: Arc<Grid>) -> Result<Self> {
        if *grid.spec() != cfg.grid {
            return Err(LabError::GridMismatch("stepper grid differs from config".into()));
        }
        let d = cfg.damping_coeff();
        Ok(Self {
            u_sys: CnSystem::new(&grid, cfg.dt, d, TopBoundary::Dirichlet),
            f_sys: CnSystem::new(&grid, cfg.dt, d, TopBoundary::Neumann),
            cfg: cfg.clone(),
            grid,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    fn transport(&self, u: &Field, v: &Field, q: &Field) -> Field {
        &u.mul_unchecked(&q.dx(1)) + &v.mul_unchecked(&q.dy(1))
    }

    fn explicit_u(&self, t: f64, u: &Field, v: Option<&Field>) -> Field {
        let mut eu = match v {
            Some(v) => self.transport(u, v, u).scale(-1.0),
            None => Field::zeros(&self.grid),
        };
        if let Some(s) = self.cfg.source_at(&self.grid, t) {
            eu = &eu + &s;
        }
        eu
    }

    fn explicit_f(&self, u: &Field, v: Option<&Field>, f: &Field) -> Field {
        let forcing = u.dx(4).integrate_y_from_0();
        match v {
            Some(v) => &forcing - &self.transport(u, v, f),
            None => forcing,
        }
    }

    fn velocity(&self, u: &Field) -> Option<Field> {
        self.cfg.advection.then(|| normal_velocity(u))
    }

    fn cn(sys: &CnSystem, q: &Field, e: &Field) -> Field {
        let mut out = Field::zeros(q.grid());
        let ny = q.grid().ny();
        let mut qin = vec![Complex64::default(); ny];
        let mut ein = qin.clone();
        let mut res = qin.clone();
        for ((qr, er), mut or) in q
            .coeffs()
            .rows()
            .into_iter()
            .zip(e.coeffs().rows())
            .zip(out.coeffs_mut().rows_mut())
        {
            qin.iter_mut().zip(qr.iter()).for_each(|(a, b)| *a = *b);
            ein.iter_mut().zip(er.iter()).for_each(|(a, b)| *a = *b);
            sys.advance(&qin, &ein, &mut res);
            or.iter_mut().zip(&res).for_each(|(a, b)| *a = *b);
        }
        out
    }

    /// Δt·K·max|u|
    pub fn cfl_number(&self, u: &Field) -> f64 {
        self.cfg.dt * self.grid.k_max() as f64 * u.max_abs_physical()
    }

    /// Advance (u, f) by one step.
    pub fn step(&self, state: &SimState) -> Result<SimState> {
        let dt = self.cfg.dt;
        let cfl = self.cfl_number(&state.u);
        if cfl > CFL_LIMIT {
            return Err(LabError::StepSize {
                t: state.t,
                detail: format!("dt*K*max|u| = {cfl} exceeds {CFL_LIMIT}"),
            });
        }
        let v0 = self.velocity(&state.u);
        let eu0 = self.explicit_u(state.t, &state.u, v0.as_ref());
        let u_pred = Self::cn(&self.u_sys, &state.u, &eu0);
        let v1 = self.velocity(&u_pred);
        let mut eu = eu0;
        eu.axpy(1.0, &self.explicit_u(state.t + dt, &u_pred, v1.as_ref()));
        let mut u = Self::cn(&self.u_sys, &state.u, &eu.scale(0.5));
        u.zero_boundary_rows();
        let f = self.advance_f(&state.u, v0.as_ref(), &u_pred, v1.as_ref(), &state.f);
        let t = state.t + dt;
        if !u.is_finite() || !f.is_finite() {
            return Err(LabError::Divergence {
                t,
                detail: "non-finite coefficients after step".into(),
            });
        }
        Ok(SimState {
            t,
            u,
            f,
            damping: state.damping,
            forcing: state.forcing,
        })
    }

    fn advance_f(&self, u0: &Field, v0: Option<&Field>, u1: &Field, v1: Option<&Field>, f: &Field) -> Field {
        let ef0 = self.explicit_f(u0, v0, f);
        let f_pred = Self::cn(&self.f_sys, f, &ef0);
        let mut ef = ef0;
        ef.axpy(1.0, &self.explicit_f(u1, v1, &f_pred));
        Self::cn(&self.f_sys, f, &ef.scale(0.5))
    }

    /// One step of the f-equation alone, with u given at both stage times
    /// (pass the same field twice to freeze the coefficients).
    pub fn step_f(&self, u_now: &Field, u_next: &Field, f: &Field) -> Field {
        let v0 = self.velocity(u_now);
        let v1 = self.velocity(u_next);
        self.advance_f(u_now, v0.as_ref(), u_next, v1.as_ref(), f)
    }
}

/// L² norm of the discrete PDE residual at the midpoint of two states.
pub fn pde_residual(before: &SimState, after: &SimState, cfg: &RunConfig) -> f64 {
    pde_residual_field(before, after, cfg).l2_norm()
}

pub fn pde_residual_field(before: &SimState, after: &SimState, cfg: &RunConfig) -> Field {
    let dt = after.t - before.t;
    let grid = before.grid();
    let mut mid = before.u.clone();
    mid.axpy(1.0, &after.u);
    let mid = mid.scale(0.5);
    let mut r = (&after.u - &before.u).scale(1.0 / dt);
    if cfg.advection {
        let v = normal_velocity(&mid);
        r = &r + &mid.mul_unchecked(&mid.dx(1));
        r = &r + &v.mul_unchecked(&mid.dy(1));
    }
    r.axpy(-1.0, &mid.dy(2));
    r.axpy(cfg.damping_coeff(), &mid);
    if let Some(s) = cfg.source_at(grid, 0.5 * (before.t + after.t)) {
        r.axpy(-1.0, &s);
    }
    r
}

/// One recorded sample of a run.
#[derive(Debug, Clone)]
pub struct Sample {
    pub state: SimState,
    pub aux: AuxSnapshot,
    pub norms: NormReport,
}

/// Auxiliary-relation residuals at each sample (NaN when not applicable).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualRow {
    pub u_relation: f64,
    pub lambda_relation: f64,
    pub f_relation: f64,
}

/// Samples at the output cadence plus per-sample diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: RunConfig,
    pub samples: Vec<Sample>,
    pub residuals: Vec<ResidualRow>,
    pub monitor: BootstrapMonitor,
}

impl Trajectory {
    pub fn norms(&self) -> Vec<NormReport> {
        self.samples.iter().map(|s| s.norms).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("a trajectory holds at least the initial sample")
    }
}

/// A run that stopped early; `partial` holds everything recorded before the failure.
#[derive(Debug)]
pub struct RunFailure {
    pub partial: Trajectory,
    pub error: LabError,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({} samples recorded)", self.error, self.partial.samples.len())
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

fn make_sample(state: SimState, p: &GevreyParams) -> Result<Sample> {
    let aux = state.aux();
    let norms = norms_xyz(state.t, &state.u, &aux.aux_u, &aux.lambda, p)?;
    Ok(Sample { state, aux, norms })
}

/// Residuals of the auxiliary relations at every sample of a uniform cadence.
pub fn auxiliary_residuals(samples: &[Sample], cfg: &RunConfig) -> Vec<ResidualRow> {
    let nan = ResidualRow {
        u_relation: f64::NAN,
        lambda_relation: f64::NAN,
        f_relation: f64::NAN,
    };
    if samples.len() < 3 || !cfg.advection {
        return vec![nan; samples.len()];
    }
    let grid = samples[0].state.grid().clone();
    let last = samples.len() - 1;
    (0..samples.len())
        .map(|i| {
            let (lo, point) = match i {
                0 => (0, WindowPoint::Start),
                i if i == last => (last - 2, WindowPoint::End),
                i => (i - 1, WindowPoint::Center),
            };
            let w: [WindowSample; 3] = std::array::from_fn(|j| {
                let s = &samples[lo + j];
                WindowSample {
                    t: s.state.t,
                    u: &s.state.u,
                    aux: &s.aux,
                }
            });
            let source = cfg.source_at(&grid, samples[i].state.t);
            let window = Window {
                samples: w,
                damping: cfg.damping_coeff(),
                source: source.as_ref(),
            };
            ResidualRow {
                u_relation: window.residual_u_relation(point),
                lambda_relation: window.residual_lambda_relation(point),
                f_relation: window.residual_f_relation(point),
            }
        })
        .collect()
}

fn finish(cfg: &RunConfig, mut samples: Vec<Sample>) -> Trajectory {
    let residuals = auxiliary_residuals(&samples, cfg);
    let mut monitor = BootstrapMonitor::new(&cfg.params);
    for s in samples.iter_mut() {
        s.norms.bootstrap_lhs = monitor.push(&s.norms);
    }
    Trajectory {
        config: cfg.clone(),
        samples,
        residuals,
        monitor,
    }
}

/// Integrate to `t_final`, recording samples every `output_every` steps.
pub fn run(cfg: &RunConfig) -> std::result::Result<Trajectory, Box<RunFailure>> {
    let fail = |samples: Vec<Sample>, error: LabError| {
        Box::new(RunFailure {
            partial: finish(cfg, samples),
            error,
        })
    };
    let stepper = Stepper::new(cfg).map_err(|e| fail(vec![], e))?;
    let n_steps = cfg.n_steps().map_err(|e| fail(vec![], e))?;
    let mut state = SimState::initial(cfg).map_err(|e| fail(vec![], e))?;
    let mut samples = Vec::with_capacity(n_steps / cfg.output_every + 2);
    match make_sample(state.clone(), &cfg.params) {
        Ok(s) => samples.push(s),
        Err(e) => return Err(fail(samples, e)),
    }
    for step in 1..=n_steps {
        state = match stepper.step(&state) {
            Ok(s) => s,
            Err(e) => return Err(fail(samples, e)),
        };
        // keep t on the exact lattice
        state.t = step as f64 * cfg.dt;
        if step % cfg.output_every == 0 || step == n_steps {
            match make_sample(state.clone(), &cfg.params) {
                Ok(s) => samples.push(s),
                Err(e) => return Err(fail(samples, e)),
            }
        }
    }
    Ok(finish(cfg, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> RunConfig {
        RunConfig {
            grid: GridSpec::new(2, 33, 8.0),
            params: GevreyParams::reference(),
            dt: 0.01,
            t_final: 0.1,
            initial: InitialData::Zero,
            damping: true,
            advection: true,
            forcing: Forcing::None,
            output_every: 5,
            dump_fields: false,
            scheme: Scheme::CnHeun,
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let cfg = small_cfg();
        let traj = run(&cfg).unwrap();
        for s in &traj.samples {
            assert_eq!(s.state.u.max_abs_coeff(), 0.0);
            assert_eq!(s.state.f.max_abs_coeff(), 0.0);
            assert_eq!(s.norms.x_norm, 0.0);
        }
    }

    #[test]
    fn t_final_zero_gives_single_initial_snapshot() {
        let mut cfg = small_cfg();
        cfg.t_final = 0.0;
        cfg.initial = InitialData::GevreyProfile { amplitude: Some(1e-3) };
        let traj = run(&cfg).unwrap();
        assert_eq!(traj.samples.len(), 1);
        let s = &traj.samples[0];
        assert_eq!(s.aux.aux_u.max_abs_coeff(), 0.0);
        assert!((&s.aux.lambda - &s.state.u.dx(3)).max_abs_coeff() == 0.0);
    }

    #[test]
    fn normal_velocity_vanishes_at_wall_and_for_x_independent_u() {
        let g = GridSpec::new(3, 33, 6.0).build().unwrap();
        let u = Field::from_physical_fn(&g, |x, y| (x.sin() + 0.5) * y * (-y).exp());
        let v = normal_velocity(&u);
        assert!(v.node(0).iter().all(|c| c.norm() == 0.0));
        let flat = Field::single_mode(&g, 0, |y| Complex64::new(y * (-y).exp(), 0.0)).unwrap();
        assert!(normal_velocity(&flat).max_abs_coeff() == 0.0);
    }

    #[test]
    fn cfl_violation_is_a_step_size_error() {
        let mut cfg = small_cfg();
        cfg.initial = InitialData::GevreyProfile { amplitude: Some(100.0) };
        cfg.dt = 0.05;
        let err = run(&cfg).unwrap_err();
        assert!(matches!(err.error, LabError::StepSize { .. }));
        assert_eq!(err.partial.samples.len(), 1);
    }

    #[test]
    fn non_integral_step_count_rejected() {
        let mut cfg = small_cfg();
        cfg.t_final = 0.105;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = RunConfig::reference(16, 257, 20.0);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let minimal = r#"{"grid":{"k_max":4,"ny":33,"ymax":10.0},
            "params":{"ell":1.0,"n":1056,"rho0":0.5,"eps0":0.001},
            "dt":0.01,"t_final":1.0,"initial":{"kind":"zero"},"output_every":10}"#;
        let cfg: RunConfig = serde_json::from_str(minimal).unwrap();
        assert!(cfg.damping && cfg.advection);
        assert_eq!(cfg.grid.y_order, 4);
    }
}
