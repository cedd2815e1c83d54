mod common;

use gevrey_prandtl::gevrey::{
    coeff_l, min_n_for_ell, mode_weight, mode_weight_certified, n_ell_constraint, norm_x, weight_tau, GevreyParams,
    SERIES_TOL,
};
use gevrey_prandtl::norms::{norms_from_parts, norms_xyz};
use gevrey_prandtl::{Field, GridSpec};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn bracket_is_tau_with_unit_offset() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let y: f64 = rng.gen_range(0.0..50.0);
        assert!((weight_tau(y, 1) - (1.0 + y * y).sqrt()).abs() < 1e-14 * (1.0 + y));
    }
}

#[test]
fn min_n_post_check_for_several_ell() {
    for ell in [0.51, 0.75, 1.0, 1.5, 2.0, 3.7] {
        let n = min_n_for_ell(ell).unwrap();
        assert!(n_ell_constraint(ell, n) <= 0.125);
        assert!(n == 1 || n_ell_constraint(ell, n - 1) > 0.125);
    }
    assert_eq!(min_n_for_ell(1.0).unwrap(), 1056);
    assert!((n_ell_constraint(1.0, 1) - 6.0).abs() < 1e-15);
    assert!(min_n_for_ell(0.5).is_err());
}

#[test]
fn mode_weight_matches_long_direct_sum() {
    let direct: f64 = (0..=200u64).map(|m| coeff_l(0.5, m).powi(2) * 4f64.powi(m as i32)).sum();
    let w = mode_weight(0, 2, 0.5, SERIES_TOL);
    assert!(common::rel(w, direct) < 1e-12);
}

#[test]
fn mode_weight_increases_with_wavenumber_and_is_certified() {
    for j in 0..=3 {
        for r in [0.25, 0.5, 1.0] {
            let mut prev = mode_weight(j, 0, r, SERIES_TOL);
            assert!(common::rel(prev, coeff_l(r, j).powi(2)) < 1e-13);
            for k in 1..=40 {
                let s = mode_weight_certified(j, k, r, SERIES_TOL);
                assert!(s.value > prev, "j {j} r {r} k {k}");
                assert!(s.first_omitted < SERIES_TOL * s.value);
                assert_eq!(s.value, mode_weight(j, -k, r, SERIES_TOL));
                prev = s.value;
            }
        }
    }
}

#[test]
fn single_mode_norm_matches_direct_sum() {
    let p = GevreyParams::reference();
    let g = GridSpec::new(2, 97, 14.0).build().unwrap();
    let eps = 1e-3;
    let u = Field::single_mode(&g, 1, |y| Complex64::new(eps * y * y * (-y).exp(), 0.0)).unwrap();
    let spectral = norm_x(&u, 0.5, &p).unwrap();
    let direct = common::direct_norm_x_sq(&u, 0.5, &p, 30).sqrt();
    assert!(common::rel(spectral, direct) < 1e-10);
    assert_eq!(norm_x(&Field::zeros(&g), 0.5, &p).unwrap(), 0.0);
}

#[test]
fn initial_norm_has_closed_form() {
    // 𝒰 = 0 and λ = ∂ₓ³u₀: |a|²_X = ‖u₀‖²_X + Σ_m L²_{ρ₀,m+2}‖∂ₓ^{m+3}u₀‖²
    let p = GevreyParams::reference();
    let g = GridSpec::new(4, 65, 10.0).build().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let u = common::random_field(&g, &mut rng, 3);
    let lambda = u.diff_x(3).unwrap();
    let rep = norms_xyz(0.0, &u, &Field::zeros(&g), &lambda, &p).unwrap();
    let closed = norm_x(&u, 0.5, &p).unwrap().powi(2)
        + common::direct_weighted_sq(&common::dx_pow(&u, 3), 30, |m| coeff_l(0.5, m as u64 + 2).powi(2));
    assert!(common::rel(rep.x_norm.powi(2), closed) < 1e-12);
    assert_eq!(rep.x_parts.aux_u, 0.0);
}

#[test]
fn zero_state_has_zero_norms() {
    let p = GevreyParams::reference();
    let g = GridSpec::new(3, 33, 8.0).build().unwrap();
    let z = Field::zeros(&g);
    let r = norms_xyz(1.0, &z, &z, &z, &p).unwrap();
    assert_eq!((r.x_norm, r.y_norm, r.z_norm), (0.0, 0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_x_is_a_norm(seed in any::<u64>(), c in -5.0f64..5.0) {
        let p = GevreyParams::reference();
        let g = GridSpec::new(4, 33, 10.0).build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = common::random_field(&g, &mut rng, 4);
        let v = common::random_field(&g, &mut rng, 4);
        let nu = norm_x(&u, 0.5, &p).unwrap();
        let nv = norm_x(&v, 0.5, &p).unwrap();
        prop_assert!(common::rel(norm_x(&u.scale(c), 0.5, &p).unwrap(), c.abs() * nu) < 1e-13);
        prop_assert!(norm_x(&(&u + &v), 0.5, &p).unwrap() <= (nu + nv) * (1.0 + 1e-13));
    }

    #[test]
    fn x_norm_below_y_norm_and_breakdown_sums(seed in any::<u64>(), rho in 0.05f64..=1.0) {
        let p = GevreyParams::reference();
        let g = GridSpec::new(4, 33, 10.0).build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = common::random_field(&g, &mut rng, 3).scale(1e-3);
        let aux = common::random_field(&g, &mut rng, 3).scale(1e-4);
        let lam = common::random_field(&g, &mut rng, 3).scale(1e-4);
        let r = norms_from_parts(0.0, rho, &u, &aux, &lam, &p).unwrap();
        prop_assert!(r.x_norm <= r.y_norm);
        for (total, parts) in [(r.x_norm, r.x_parts), (r.y_norm, r.y_parts), (r.z_norm, r.z_parts)] {
            prop_assert!(parts.u.iter().all(|v| *v >= 0.0) && parts.lambda >= 0.0 && parts.aux_u >= 0.0);
            prop_assert!(common::rel(total * total, parts.total()) < 1e-12);
        }
    }
}
