//! Trajectory monitors: the bootstrap inequalities, the decay bound, and
//! the paired damping comparison.

use serde::Serialize;

use crate::gevrey::GevreyParams;
use crate::norms::NormReport;
use crate::solver::{run, RunConfig, Trajectory};

/// Environment variable capping the worker threads used by sweeps.
pub const WORKERS_ENV: &str = "GEVREY_LAB_WORKERS";

/// Thread pool honouring [`WORKERS_ENV`] (unset or 0 means rayon's default).
pub fn worker_pool() -> rayon::ThreadPool {
    let n = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool construction")
}

/// Status of the hypothesis H and conclusion C at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorSample {
    pub t: f64,
    pub lhs: f64,
    pub h_holds: bool,
    pub c_holds: bool,
}

/// Accumulates e^{t/2}|a|²_X + ¼∫₀ᵗ e^{s/2}|a|²_Z ds and compares it with
/// rhs_H = 2(1+ρ₀²)/ρ₀² ε₀² and rhs_C = (1+ρ₀²)/ρ₀² ε₀².
///
/// This is monitoring of a computed trajectory, not a proof device.
#[derive(Debug, Clone, Serialize)]
pub struct BootstrapMonitor {
    pub eps0: f64,
    pub rho0: f64,
    pub rhs_h: f64,
    pub rhs_c: f64,
    /// ¼∫₀ᵗ e^{s/2}|a|²_Z ds up to the last sample
    pub integral: f64,
    pub samples: Vec<MonitorSample>,
    #[serde(skip)]
    prev: Option<(f64, f64)>,
}

impl BootstrapMonitor {
    pub fn new(p: &GevreyParams) -> Self {
        let rhs_c = (1.0 + p.rho0 * p.rho0) / (p.rho0 * p.rho0) * p.eps0 * p.eps0;
        Self {
            eps0: p.eps0,
            rho0: p.rho0,
            rhs_h: 2.0 * rhs_c,
            rhs_c,
            integral: 0.0,
            samples: Vec::new(),
            prev: None,
        }
    }

    /// Record the next sample (times must increase) and return its lhs.
    pub fn push(&mut self, n: &NormReport) -> f64 {
        let zt = (0.5 * n.t).exp() * n.z_norm * n.z_norm;
        if let Some((t0, z0)) = self.prev {
            self.integral += 0.25 * 0.5 * (n.t - t0) * (z0 + zt);
        }
        self.prev = Some((n.t, zt));
        let lhs = (0.5 * n.t).exp() * n.x_norm * n.x_norm + self.integral;
        self.samples.push(MonitorSample {
            t: n.t,
            lhs,
            h_holds: lhs <= self.rhs_h,
            c_holds: lhs <= self.rhs_c,
        });
        lhs
    }

    pub fn first_violation_h(&self) -> Option<f64> {
        self.samples.iter().find(|s| !s.h_holds).map(|s| s.t)
    }

    pub fn first_violation_c(&self) -> Option<f64> {
        self.samples.iter().find(|s| !s.c_holds).map(|s| s.t)
    }

    /// Largest lhs/rhs_C over the samples.
    pub fn max_c_ratio(&self) -> f64 {
        self.samples.iter().map(|s| s.lhs / self.rhs_c).fold(0.0, f64::max)
    }
}

/// Replay a sequence of norm reports through a fresh monitor.
pub fn monitor(norms: &[NormReport], p: &GevreyParams) -> BootstrapMonitor {
    let mut m = BootstrapMonitor::new(p);
    for n in norms {
        m.push(n);
    }
    m
}

/// sup_t e^{t/4}|a(t)|_{X_ρ(t)} against 4(ρ₀+1)/ρ₀ · ε₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayReport {
    pub max_scaled_x: f64,
    pub t_at_max: f64,
    /// Same maximum for ‖u‖_{X_ρ} alone.
    pub max_scaled_u_x: f64,
    pub bound: f64,
    /// (∫ e^{t/2} |a|²_Z dt)^{1/2}
    pub z_integral: f64,
    /// 1 − max/bound
    pub margin: f64,
    pub pass: bool,
}

pub fn decay_bound(p: &GevreyParams) -> f64 {
    4.0 * (p.rho0 + 1.0) / p.rho0 * p.eps0
}

pub fn decay_report(norms: &[NormReport], p: &GevreyParams) -> DecayReport {
    let bound = decay_bound(p);
    let mut max_scaled_x = 0.0;
    let mut t_at_max = 0.0;
    let mut max_scaled_u_x: f64 = 0.0;
    let mut z2 = 0.0;
    for (i, n) in norms.iter().enumerate() {
        let s = (0.25 * n.t).exp() * n.x_norm;
        if s > max_scaled_x {
            max_scaled_x = s;
            t_at_max = n.t;
        }
        max_scaled_u_x = max_scaled_u_x.max((0.25 * n.t).exp() * n.u_x_norm);
        if i > 0 {
            let a = &norms[i - 1];
            let fa = (0.5 * a.t).exp() * a.z_norm * a.z_norm;
            let fb = (0.5 * n.t).exp() * n.z_norm * n.z_norm;
            z2 += 0.5 * (n.t - a.t) * (fa + fb);
        }
    }
    DecayReport {
        max_scaled_x,
        t_at_max,
        max_scaled_u_x,
        bound,
        z_integral: z2.sqrt(),
        margin: 1.0 - max_scaled_x / bound,
        pass: max_scaled_x <= bound,
    }
}

/// Final state of one arm of the damping comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ArmOutcome {
    pub damping: bool,
    pub completed: bool,
    pub error: Option<String>,
    pub final_t: f64,
    pub final_l2: f64,
    pub final_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioPoint {
    pub t: f64,
    pub l2_ratio: f64,
    pub x_ratio: f64,
}

/// Paired damped/undamped runs from identical data.
#[derive(Debug, Clone, Serialize)]
pub struct DampingComparison {
    pub damped: ArmOutcome,
    pub undamped: ArmOutcome,
    /// damped/undamped final ‖u‖_{L²}
    pub final_l2_ratio: f64,
    /// damped/undamped final |a|_X
    pub final_x_ratio: f64,
    pub series: Vec<RatioPoint>,
}

/// a/b with 0/0 := 1.
pub fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        1.0
    } else {
        a / b
    }
}

fn arm(damping: bool, result: &std::result::Result<Trajectory, Box<crate::solver::RunFailure>>) -> ArmOutcome {
    let (traj, error) = match result {
        Ok(t) => (t, None),
        Err(f) => (&f.partial, Some(f.error.to_string())),
    };
    let last = traj.samples.last();
    ArmOutcome {
        damping,
        completed: error.is_none(),
        error,
        final_t: last.map_or(0.0, |s| s.state.t),
        final_l2: last.map_or(f64::NAN, |s| s.state.u.l2_norm()),
        final_x: last.map_or(f64::NAN, |s| s.norms.x_norm),
    }
}

/// Run `cfg` with damping on and off. A diverging undamped arm is an outcome.
pub fn compare_damping(cfg: &RunConfig) -> DampingComparison {
    let mut on = cfg.clone();
    on.damping = true;
    let mut off = cfg.clone();
    off.damping = false;
    let (r_on, r_off) = worker_pool().install(|| rayon::join(|| run(&on), || run(&off)));
    let damped = arm(true, &r_on);
    let undamped = arm(false, &r_off);
    let samples = |r: &std::result::Result<Trajectory, Box<crate::solver::RunFailure>>| match r {
        Ok(t) => t.samples.iter().map(|s| (s.state.t, s.state.u.l2_norm(), s.norms.x_norm)).collect::<Vec<_>>(),
        Err(f) => f.partial.samples.iter().map(|s| (s.state.t, s.state.u.l2_norm(), s.norms.x_norm)).collect(),
    };
    let series = samples(&r_on)
        .into_iter()
        .zip(samples(&r_off))
        .map(|(a, b)| RatioPoint {
            t: a.0,
            l2_ratio: ratio(a.1, b.1),
            x_ratio: ratio(a.2, b.2),
        })
        .collect();
    DampingComparison {
        final_l2_ratio: ratio(damped.final_l2, undamped.final_l2),
        final_x_ratio: ratio(damped.final_x, undamped.final_x),
        damped,
        undamped,
        series,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(t: f64, x: f64, z: f64) -> NormReport {
        let mut n = crate::norms::NormReport {
            t,
            rho: 0.5,
            x_norm: x,
            y_norm: x,
            z_norm: z,
            u_x_norm: x,
            x_parts: Default::default(),
            y_parts: Default::default(),
            z_parts: Default::default(),
            bootstrap_lhs: 0.0,
        };
        n.bootstrap_lhs = 0.0;
        n
    }

    #[test]
    fn monitor_arithmetic() {
        let p = GevreyParams::reference();
        let mut m = BootstrapMonitor::new(&p);
        assert_eq!(m.rhs_h / m.rhs_c, 2.0);
        assert!((m.rhs_c - 5e-6).abs() < 1e-20);
        let lhs0 = m.push(&report(0.0, 1e-3, 2e-3));
        assert_eq!(lhs0, 1e-6);
        let lhs1 = m.push(&report(0.1, 1e-3, 2e-3));
        let expect = (0.05f64).exp() * 1e-6 + 0.25 * 0.05 * (4e-6 + (0.05f64).exp() * 4e-6);
        assert!((lhs1 - expect).abs() < 1e-18);
    }

    #[test]
    fn zero_data_never_violates() {
        let p = GevreyParams::reference();
        let norms: Vec<_> = (0..50).map(|i| report(i as f64 * 0.1, 0.0, 0.0)).collect();
        let m = monitor(&norms, &p);
        assert!(m.first_violation_h().is_none() && m.first_violation_c().is_none());
        let d = decay_report(&norms, &p);
        assert!(d.pass && d.max_scaled_x == 0.0 && d.z_integral == 0.0);
    }

    #[test]
    fn bound_constant_for_half_radius() {
        let p = GevreyParams::reference();
        assert!((decay_bound(&p) - 12.0 * p.eps0).abs() < 1e-18);
    }

    #[test]
    fn ratio_convention() {
        assert_eq!(ratio(0.0, 0.0), 1.0);
        assert_eq!(ratio(1.0, 2.0), 0.5);
    }
}
