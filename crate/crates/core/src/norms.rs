//! The X/Y/Z norm family on the triple a = (u, 𝒰, λ), and the discrete
//! Young inequality for convolutions.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::gevrey::{self, radius_rho, tau_profile, weighted_series, Family, GevreyParams, PolyFactor, SERIES_TOL};
use crate::grid::Field;

/// Squared contributions of each component to one of the norms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NormBreakdown {
    /// u terms for j = 0..=3 (τ^{ℓ+j} ∂_yʲ u)
    pub u: [f64; 4],
    pub lambda: f64,
    pub aux_u: f64,
}

impl NormBreakdown {
    pub fn total(&self) -> f64 {
        self.u.iter().sum::<f64>() + self.lambda + self.aux_u
    }
}

/// |a|_{X_ρ}, |a|_{Y_ρ}, |a|_{Z_ρ} at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub t: f64,
    pub rho: f64,
    pub x_norm: f64,
    pub y_norm: f64,
    pub z_norm: f64,
    /// ‖u‖_{X_ρ} alone.
    pub u_x_norm: f64,
    pub x_parts: NormBreakdown,
    pub y_parts: NormBreakdown,
    pub z_parts: NormBreakdown,
    /// e^{t/2}|a|²_X + ¼∫₀ᵗ e^{s/2}|a|²_Z ds, filled in by the bootstrap monitor.
    pub bootstrap_lhs: f64,
}

/// Which weighting of the m-sum to use.
#[derive(Debug, Clone, Copy)]
enum Weighting {
    X,
    Y,
}

fn u_parts(u: &Field, rho: f64, p: &GevreyParams, w: Weighting) -> Result<[f64; 4]> {
    let y = u.grid().y();
    let mut parts = [0.0; 4];
    for (j, part) in parts.iter_mut().enumerate() {
        let dj = if j == 0 { u.clone() } else { u.dy(j) };
        let tau = tau_profile(y, p.n, p.ell + j as f64);
        let poly = match w {
            Weighting::X => PolyFactor::ONE,
            Weighting::Y => PolyFactor {
                offset: j as f64 + 1.0,
                scale: rho,
                power: 1,
            },
        };
        let fam = Family::GevreyL { r: rho, shift: j as u64 };
        *part = gevrey::weighted_mode_sum(&dj, Some(&tau), |k| weighted_series(fam, poly, k, SERIES_TOL).value, j)?;
    }
    Ok(parts)
}

fn shifted_part(field: &Field, rho: f64, shift: u64, poly: PolyFactor) -> Result<f64> {
    let fam = Family::GevreyL { r: rho, shift };
    gevrey::weighted_mode_sum(field, None, |k| weighted_series(fam, poly, k, SERIES_TOL).value, shift as usize)
}

/// Norms of the triple (u, 𝒰, λ) at radius `rho`.
pub fn norms_from_parts(
    t: f64,
    rho: f64,
    u: &Field,
    aux_u: &Field,
    lambda: &Field,
    p: &GevreyParams,
) -> Result<NormReport> {
    if !(rho > 0.0) {
        return Err(LabError::param(format!("radius {rho} must be positive")));
    }
    let x_parts = NormBreakdown {
        u: u_parts(u, rho, p, Weighting::X)?,
        lambda: shifted_part(lambda, rho, 2, PolyFactor::ONE)?,
        aux_u: shifted_part(aux_u, rho, 3, PolyFactor::ONE)?,
    };
    let y_parts = NormBreakdown {
        u: u_parts(u, rho, p, Weighting::Y)?,
        lambda: shifted_part(
            lambda,
            rho,
            2,
            PolyFactor {
                offset: 3.0,
                scale: rho,
                power: 1,
            },
        )?,
        aux_u: shifted_part(
            aux_u,
            rho,
            3,
            PolyFactor {
                offset: 4.0,
                scale: rho,
                power: 3,
            },
        )?,
    };
    let z_parts = NormBreakdown {
        u: u_parts(&u.dy(1), rho, p, Weighting::X)?,
        lambda: shifted_part(&lambda.dy(1), rho, 2, PolyFactor::ONE)?,
        aux_u: shifted_part(&aux_u.dy(1), rho, 3, PolyFactor::ONE)?,
    };
    Ok(NormReport {
        t,
        rho,
        x_norm: x_parts.total().sqrt(),
        y_norm: y_parts.total().sqrt(),
        z_norm: z_parts.total().sqrt(),
        u_x_norm: x_parts.u.iter().sum::<f64>().sqrt(),
        x_parts,
        y_parts,
        z_parts,
        bootstrap_lhs: 0.0,
    })
}

/// Norms at the scheduled radius ρ(t).
pub fn norms_xyz(t: f64, u: &Field, aux_u: &Field, lambda: &Field, p: &GevreyParams) -> Result<NormReport> {
    norms_from_parts(t, radius_rho(t, p.rho0).rho, u, aux_u, lambda, p)
}

/// Both sides of Σ_m Σ_{j≤m} p_j q_{m−j} r_m ≤ ‖q‖₂ ‖r‖₂ Σ p.
///
/// Sequences of unequal length are treated as zero-padded.
pub fn young_convolution(p: &[f64], q: &[f64], r: &[f64]) -> Result<(f64, f64)> {
    for (name, s) in [("p", p), ("q", q), ("r", r)] {
        if let Some(v) = s.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(LabError::param(format!(
                "sequence {name} has a negative or non-finite entry {v}"
            )));
        }
    }
    let mut lhs = 0.0;
    for (m, &rm) in r.iter().enumerate() {
        if rm == 0.0 {
            continue;
        }
        let conv: f64 = (0..=m)
            .filter(|&j| j < p.len() && m - j < q.len())
            .map(|j| p[j] * q[m - j])
            .sum();
        lhs += conv * rm;
    }
    let q2 = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r2 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let p1: f64 = p.iter().sum();
    Ok((lhs, q2 * r2 * p1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn young_identity_kernel_is_cauchy_schwarz() {
        let p = [1.0, 0.0, 0.0];
        let q = [0.3, 2.0, 1.0, 0.5];
        let r = [1.0, 0.1, 4.0, 0.2];
        let (lhs, rhs) = young_convolution(&p, &q, &r).unwrap();
        let dot: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
        assert!((lhs - dot).abs() < 1e-14);
        assert!(lhs <= rhs);
    }

    #[test]
    fn young_zero_q_gives_zero_both_sides() {
        let (lhs, rhs) = young_convolution(&[1.0, 2.0], &[0.0; 5], &[3.0, 1.0]).unwrap();
        assert_eq!((lhs, rhs), (0.0, 0.0));
    }

    #[test]
    fn young_rejects_negative_entries() {
        assert!(young_convolution(&[1.0], &[-1.0], &[1.0]).is_err());
        assert!(young_convolution(&[f64::NAN], &[1.0], &[1.0]).is_err());
    }
}
