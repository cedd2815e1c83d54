//! Hyperbolic toy model
//!
//!   ∂ₜh = g,   ∂ₜg − h∂ₓh − ∂_y²h = 0,   h|_{y=0} = h|_{y=Ymax} = 0.
//!
//! The linear part is advanced with the trapezoidal rule, which conserves
//! the discrete wave energy exactly; h∂ₓh is treated explicitly with a
//! two-stage (Heun) average. Eliminating g gives one tridiagonal solve
//!
//!   (B − Δt²/4 D₂) hⁿ⁺¹ = (B + Δt²/4 D₂) hⁿ + Δt B gⁿ + Δt²/2 B N,
//!   gⁿ⁺¹ = 2(hⁿ⁺¹ − hⁿ)/Δt − gⁿ.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gevrey::{radius_rho, weighted_mode_sum, weighted_series, Family, PolyFactor, SERIES_TOL};
use crate::grid::{Field, Grid, GridSpec};
use crate::yop::{CnSystem, TopBoundary};

/// Largest admissible Δt/Δy.
pub const TOY_CFL: f64 = 0.5;

/// `a · sin(nπy/Ymax) · cos(kx + phase)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyTerm {
    #[serde(default)]
    pub k: u32,
    pub n: u32,
    pub a: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ToyInitial {
    SineSeries {
        h: Vec<ToyTerm>,
        #[serde(default)]
        g: Vec<ToyTerm>,
    },
    /// h₀ = amplitude · sin(x) · y² e^{−y²/2}, g₀ = 0.
    Profile { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    pub grid: GridSpec,
    pub dt: f64,
    pub t_final: f64,
    /// ρ₀ of the radius schedule used by the triple norm.
    pub rho0: f64,
    pub initial: ToyInitial,
    pub output_every: usize,
}

impl ToyConfig {
    pub fn n_steps(&self) -> Result<usize> {
        let n = (self.t_final / self.dt).round();
        if !(self.dt > 0.0) || (n * self.dt - self.t_final).abs() > 1e-9 * self.t_final.max(1.0) {
            return Err(LabError::param(format!(
                "t_final = {} is not a whole number of steps of dt = {}",
                self.t_final, self.dt
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.output_every == 0 {
            return Err(LabError::param("output_every must be >= 1"));
        }
        if !(self.rho0 > 0.0 && self.rho0 <= 1.0) {
            return Err(LabError::param(format!("rho0 = {} outside (0, 1]", self.rho0)));
        }
        self.n_steps()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ToyState {
    pub t: f64,
    pub h: Field,
    pub g: Field,
}

fn series_field(grid: &Arc<Grid>, terms: &[ToyTerm]) -> Result<Field> {
    if let Some(t) = terms.iter().find(|t| t.k as usize > grid.k_max() || t.n == 0) {
        return Err(LabError::param(format!("toy term (k = {}, n = {}) outside 0..=K, n >= 1", t.k, t.n)));
    }
    let ymax = grid.ymax();
    Ok(Field::from_physical_fn(grid, |x, y| {
        terms
            .iter()
            .map(|t| t.a * (t.n as f64 * PI * y / ymax).sin() * (t.k as f64 * x + t.phase).cos())
            .sum()
    }))
}

impl ToyState {
    pub fn initial(cfg: &ToyConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid.build()?;
        let (mut h, mut g) = match &cfg.initial {
            ToyInitial::SineSeries { h, g } => (series_field(&grid, h)?, series_field(&grid, g)?),
            ToyInitial::Profile { amplitude } => (
                Field::from_physical_fn(&grid, |x, y| amplitude * x.sin() * y * y * (-0.5 * y * y).exp()),
                Field::zeros(&grid),
            ),
        };
        h.zero_boundary_rows();
        g.zero_boundary_rows();
        Ok(Self { t: 0.0, h, g })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            t: self.t,
            h: self.h.scale(c),
            g: self.g.scale(c),
        }
    }
}

/// Exact solution of the x-independent linear problem for sine-series data:
/// h = Σ [a_n cos(μ_n t) + (b_n/μ_n) sin(μ_n t)] sin(μ_n y).
pub fn wave_series(h: &[ToyTerm], g: &[ToyTerm], ymax: f64, t: f64, y: f64) -> f64 {
    let mu = |n: u32| n as f64 * PI / ymax;
    let a: f64 = h.iter().map(|s| s.a * (mu(s.n) * t).cos() * (mu(s.n) * y).sin()).sum();
    let b: f64 = g
        .iter()
        .map(|s| s.a / mu(s.n) * (mu(s.n) * t).sin() * (mu(s.n) * y).sin())
        .sum();
    a + b
}

pub struct ToyStepper {
    dt: f64,
    sys: CnSystem,
}

impl ToyStepper {
    pub fn new(grid: &Grid, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(LabError::param(format!("dt = {dt} must be positive")));
        }
        Ok(Self {
            dt,
            // CnSystem with step Δt²/2 and no damping is exactly B ∓ Δt²/4 D₂
            sys: CnSystem::new(grid, 0.5 * dt * dt, 0.0, TopBoundary::Dirichlet),
        })
    }

    fn advance(&self, s: &ToyState, n: &Field) -> (Field, Field) {
        let dt = self.dt;
        let mut e = s.g.scale(2.0 / dt);
        e.axpy(1.0, n);
        let ny = s.h.grid().ny();
        let mut h = Field::zeros(s.h.grid());
        let mut q = vec![Complex64::default(); ny];
        let mut ev = q.clone();
        let mut out = q.clone();
        for ((hr, er), mut orow) in s
            .h
            .coeffs()
            .rows()
            .into_iter()
            .zip(e.coeffs().rows())
            .zip(h.coeffs_mut().rows_mut())
        {
            q.iter_mut().zip(hr.iter()).for_each(|(a, b)| *a = *b);
            ev.iter_mut().zip(er.iter()).for_each(|(a, b)| *a = *b);
            self.sys.advance(&q, &ev, &mut out);
            orow.iter_mut().zip(&out).for_each(|(a, b)| *a = *b);
        }
        let mut g = (&h - &s.h).scale(2.0 / dt);
        g.axpy(-1.0, &s.g);
        g.zero_boundary_rows();
        (h, g)
    }

    pub fn step(&self, s: &ToyState) -> Result<ToyState> {
        let n0 = s.h.mul_unchecked(&s.h.dx(1));
        let (hp, _) = self.advance(s, &n0);
        let n1 = hp.mul_unchecked(&hp.dx(1));
        let mut n = n0;
        n.axpy(1.0, &n1);
        let (h, g) = self.advance(s, &n.scale(0.5));
        let t = s.t + self.dt;
        if !h.is_finite() || !g.is_finite() {
            return Err(LabError::Divergence {
                t,
                detail: "non-finite toy state".into(),
            });
        }
        Ok(ToyState { t, h, g })
    }
}

/// One step of the toy model; Δt must satisfy Δt ≤ 0.5·Δy.
pub fn toy_step(state: &ToyState, dt: f64) -> Result<ToyState> {
    check_cfl(state.h.grid(), dt, state.t)?;
    ToyStepper::new(state.h.grid(), dt)?.step(state)
}

fn min_dy(grid: &Grid) -> f64 {
    grid.y().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

fn check_cfl(grid: &Grid, dt: f64, t: f64) -> Result<()> {
    let dy = min_dy(grid);
    if dt > TOY_CFL * dy {
        return Err(LabError::StepSize {
            t,
            detail: format!("dt = {dt} exceeds {TOY_CFL} * dy = {}", TOY_CFL * dy),
        });
    }
    Ok(())
}

/// Triple norm at radius ρ:
/// Σ_m c_m [(m+1)/ρ (‖∂ₓᵐ∂_y h‖² + ‖∂ₓᵐ g‖²) + (m+1)³/ρ³ ‖∂ₓᵐ h‖²],
/// c_m = ρ^{2(m+1)}/(m!)⁴.
pub fn toy_triple_norm(state: &ToyState, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(LabError::param(format!("radius {rho} must be positive")));
    }
    let fam = Family::Toy { rho };
    let lin = PolyFactor {
        offset: 1.0,
        scale: rho,
        power: 1,
    };
    let cubic = PolyFactor {
        offset: 1.0,
        scale: rho,
        power: 3,
    };
    let w1 = |k| weighted_series(fam, lin, k, SERIES_TOL).value;
    let w3 = |k| weighted_series(fam, cubic, k, SERIES_TOL).value;
    let a = weighted_mode_sum(&state.h.dy(1), None, w1, 1)?;
    let b = weighted_mode_sum(&state.g, None, w1, 0)?;
    let c = weighted_mode_sum(&state.h, None, w3, 0)?;
    Ok((a + b + c).sqrt())
}

/// ½(‖g‖² + ‖∂_y h‖²) over the strip.
pub fn toy_energy(state: &ToyState) -> f64 {
    0.5 * (state.g.l2_norm_sq() + state.h.dy(1).l2_norm_sq())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToyRow {
    pub t: f64,
    pub triple_norm: f64,
    pub energy: f64,
    pub max_h: f64,
}

#[derive(Debug, Clone)]
pub struct ToyTrajectory {
    pub config: ToyConfig,
    pub rows: Vec<ToyRow>,
    pub last: ToyState,
}

fn row(s: &ToyState, rho0: f64) -> Result<ToyRow> {
    Ok(ToyRow {
        t: s.t,
        triple_norm: toy_triple_norm(s, radius_rho(s.t, rho0).rho)?,
        energy: toy_energy(s),
        max_h: s.h.max_abs_physical(),
    })
}

pub fn run_toy(cfg: &ToyConfig) -> Result<ToyTrajectory> {
    let mut s = ToyState::initial(cfg)?;
    check_cfl(s.h.grid(), cfg.dt, 0.0)?;
    let stepper = ToyStepper::new(s.h.grid(), cfg.dt)?;
    let n = cfg.n_steps()?;
    let mut rows = vec![row(&s, cfg.rho0)?];
    for i in 1..=n {
        s = stepper.step(&s)?;
        s.t = i as f64 * cfg.dt;
        if i % cfg.output_every == 0 || i == n {
            rows.push(row(&s, cfg.rho0)?);
        }
    }
    Ok(ToyTrajectory {
        config: cfg.clone(),
        rows,
        last: s,
    })
}
