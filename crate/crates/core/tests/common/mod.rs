#![allow(dead_code)]

use std::sync::Arc;

use gevrey_prandtl::gevrey::{coeff_l, tau_profile, GevreyParams};
use gevrey_prandtl::{Field, Grid};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Band-limited random field Σ_{k≤kmax} (a_k cos kx + b_k sin kx) y^{p_k} e^{−β_k y}.
pub fn random_field(grid: &Arc<Grid>, rng: &mut ChaCha8Rng, kmax: usize) -> Field {
    let terms: Vec<(f64, f64, f64, i32, f64)> = (0..=kmax)
        .map(|k| {
            (
                k as f64,
                rng.gen_range(-1.0..1.0),
                if k == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) },
                rng.gen_range(1..=3),
                rng.gen_range(0.8..2.0),
            )
        })
        .collect();
    Field::from_physical_fn(grid, move |x, y| {
        terms
            .iter()
            .map(|&(k, a, b, p, beta)| (a * (k * x).cos() + b * (k * x).sin()) * y.powi(p) * (-beta * y).exp())
            .sum()
    })
}

/// ∂ₓᵐ by explicit multiplication with (ik)ᵐ, with no order cap.
pub fn dx_pow(u: &Field, m: u32) -> Field {
    let g = u.grid();
    let mut c = u.coeffs().clone();
    for (idx, mut row) in c.rows_mut().into_iter().enumerate() {
        let f = Complex64::new(0.0, g.wavenumber(idx) as f64).powu(m);
        row.mapv_inplace(|z| z * f);
    }
    Field::from_coeffs(g, c).unwrap()
}

/// Σ_{j≤3} Σ_{m≤m_max} L²_{r,m+j} ‖τ^{ℓ+j} ∂ₓᵐ ∂_yʲ u‖² by brute force.
pub fn direct_norm_x_sq(u: &Field, r: f64, p: &GevreyParams, m_max: u32) -> f64 {
    let y = u.grid().y();
    let mut total = 0.0;
    for j in 0..=3usize {
        let dj = if j == 0 { u.clone() } else { u.diff_y(j).unwrap() };
        let tau = tau_profile(y, p.n, p.ell + j as f64);
        for m in 0..=m_max {
            let l = coeff_l(r, m as u64 + j as u64);
            total += l * l * dx_pow(&dj, m).scale_y(&tau).l2_norm_sq();
        }
    }
    total
}

/// Σ_{m≤m_max} c_m ‖∂ₓᵐ q‖² for an arbitrary coefficient sequence.
pub fn direct_weighted_sq(q: &Field, m_max: u32, c: impl Fn(u32) -> f64) -> f64 {
    (0..=m_max).map(|m| c(m) * dx_pow(q, m).l2_norm_sq()).sum()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
