use gevrey_prandtl::toy::{run_toy, toy_energy, toy_triple_norm, ToyConfig, ToyInitial, ToyState, ToyTerm};
use gevrey_prandtl::GridSpec;

fn single_mode_state(k: u32) -> ToyState {
    let cfg = ToyConfig {
        grid: GridSpec::new(4, 129, std::f64::consts::PI),
        dt: 0.01,
        t_final: 0.0,
        rho0: 0.5,
        initial: ToyInitial::SineSeries {
            h: vec![ToyTerm { k, n: 2, a: 0.3, phase: 0.0 }],
            g: vec![ToyTerm { k, n: 2, a: -0.7, phase: 0.0 }],
        },
        output_every: 1,
    };
    ToyState::initial(&cfg).unwrap()
}

fn direct_triple_sq(s: &ToyState, k: f64, rho: f64, m_max: u32) -> f64 {
    let hy = s.h.diff_y(1).unwrap().l2_norm_sq();
    let g = s.g.l2_norm_sq();
    let h = s.h.l2_norm_sq();
    let mut ln_fact = 0.0;
    let mut total = 0.0;
    for m in 0..=m_max {
        if m > 0 {
            ln_fact += (m as f64).ln();
        }
        let m1 = m as f64 + 1.0;
        // ρ^{2(m+1)} k^{2m} / (m!)⁴
        let c = (2.0 * m1 * rho.ln() + 2.0 * m as f64 * k.ln() - 4.0 * ln_fact).exp();
        total += c * (m1 / rho * (hy + g) + (m1 / rho).powi(3) * h);
    }
    total
}

#[test]
fn triple_norm_matches_direct_sum() {
    for k in [1u32, 2, 3] {
        let s = single_mode_state(k);
        for rho in [0.25, 0.4, 0.5] {
            let spectral = toy_triple_norm(&s, rho).unwrap();
            let direct = direct_triple_sq(&s, k as f64, rho, 30).sqrt();
            assert!(((spectral - direct) / direct).abs() <= 1e-10, "k {k} rho {rho}: {spectral} vs {direct}");
        }
    }
}

#[test]
fn triple_norm_is_homogeneous() {
    let s = single_mode_state(2);
    let base = toy_triple_norm(&s, 0.4).unwrap();
    for c in [-3.0, 0.5, 1e-4] {
        let scaled = toy_triple_norm(&s.scale(c), 0.4).unwrap();
        assert!((scaled - c.abs() * base).abs() <= 1e-13 * c.abs() * base);
    }
    assert!(toy_triple_norm(&s, 0.0).is_err());
}

#[test]
fn small_data_stays_bounded() {
    let cfg = ToyConfig {
        grid: GridSpec::new(4, 129, 12.0),
        dt: 0.02,
        t_final: 5.0,
        rho0: 0.5,
        initial: ToyInitial::Profile { amplitude: 1e-2 },
        output_every: 10,
    };
    let traj = run_toy(&cfg).unwrap();
    let first = traj.rows[0].triple_norm;
    assert!(first > 0.0);
    for r in &traj.rows {
        assert!(r.triple_norm <= 2.0 * first, "t {}: {} > 2 x {first}", r.t, r.triple_norm);
    }
    assert!((traj.last.t - 5.0).abs() < 1e-12);
    assert!(toy_energy(&traj.last).is_finite());
}

#[test]
fn cfl_violation_is_rejected() {
    let cfg = ToyConfig {
        grid: GridSpec::new(2, 65, 12.0),
        dt: 0.2,
        t_final: 1.0,
        rho0: 0.5,
        initial: ToyInitial::Profile { amplitude: 1e-2 },
        output_every: 1,
    };
    assert!(run_toy(&cfg).is_err());
}
