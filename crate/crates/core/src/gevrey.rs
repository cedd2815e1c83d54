//! Scalar machinery of the Gevrey-2 framework: the weight τ_N, the
//! coefficients L_{r,k}, the radius schedule ρ(t), per-mode weights W_j(k)
//! and the weighted norm ‖·‖_{X_r}.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{LabError, Result};
use crate::grid::{Field, LX};

/// Relative truncation tolerance for the infinite m-sums.
pub const SERIES_TOL: f64 = 1e-16;

/// Parameters of the weighted Gevrey norm and the smallness assumption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyParams {
    /// Exponent ℓ of the weight τ^{ℓ+j}.
    pub ell: f64,
    /// Offset N in τ_N(y) = (N + y²)^{1/2}.
    pub n: u64,
    /// Initial radius ρ₀.
    pub rho0: f64,
    /// Smallness parameter ε₀.
    pub eps0: f64,
}

impl GevreyParams {
    /// ℓ = 1 with the smallest admissible N, ρ₀ = 1/2, ε₀ = 1e−3.
    pub fn reference() -> Self {
        Self {
            ell: 1.0,
            n: min_n_for_ell(1.0).expect("ell = 1 is admissible"),
            rho0: 0.5,
            eps0: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ell > 0.5) {
            return Err(LabError::param(format!("ell = {} must exceed 1/2", self.ell)));
        }
        if self.n < 1 {
            return Err(LabError::param("N must be >= 1"));
        }
        let lhs = n_ell_constraint(self.ell, self.n);
        if lhs > 0.125 {
            return Err(LabError::param(format!(
                "N = {} too small for ell = {}: constraint value {lhs} > 1/8",
                self.n, self.ell
            )));
        }
        if !(self.rho0 > 0.0 && self.rho0 <= 1.0) {
            return Err(LabError::param(format!("rho0 = {} must lie in (0, 1]", self.rho0)));
        }
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(LabError::param(format!("eps0 = {} must be positive", self.eps0)));
        }
        Ok(())
    }
}

/// τ_N(y) = (N + y²)^{1/2}.
pub fn weight_tau(y: f64, n: u64) -> f64 {
    (n as f64 + y * y).sqrt()
}

/// (ℓ+3)/√N + (ℓ²+ℓ)/N.
pub fn n_ell_constraint(ell: f64, n: u64) -> f64 {
    let n = n as f64;
    (ell + 3.0) / n.sqrt() + (ell * ell + ell) / n
}

/// Smallest N ≥ 1 with (ℓ+3)/√N + (ℓ²+ℓ)/N ≤ 1/8.
pub fn min_n_for_ell(ell: f64) -> Result<u64> {
    if !(ell > 0.5) || !ell.is_finite() {
        return Err(LabError::param(format!("ell = {ell} must exceed 1/2")));
    }
    // the constraint is decreasing in N; start just below the quadratic root in √N
    let (a, b, c) = (0.125, -(ell + 3.0), -(ell * ell + ell));
    let s = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
    let mut n = ((s * s).floor() as u64).saturating_sub(2).max(1);
    while n > 1 && n_ell_constraint(ell, n - 1) <= 0.125 {
        n -= 1;
    }
    while n_ell_constraint(ell, n) > 0.125 {
        n += 1;
    }
    Ok(n)
}

/// ln L_{r,k} = (k+1) ln r + 10 ln(k+1) − 2 ln k!.
pub fn ln_coeff_l(r: f64, k: u64) -> f64 {
    let kf = k as f64;
    (kf + 1.0) * r.ln() + 10.0 * (kf + 1.0).ln() - 2.0 * ln_gamma(kf + 1.0)
}

/// L_{r,k} = r^{k+1} (k+1)^{10} / (k!)².
pub fn coeff_l(r: f64, k: u64) -> f64 {
    if k <= 20 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        r.powi(k as i32 + 1) * ((k + 1) as f64).powi(10) / (fact * fact)
    } else {
        ln_coeff_l(r, k).exp()
    }
}

/// ρ(t) = ρ₀/2 + (ρ₀/2) e^{−t/12} and its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radius {
    pub rho: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn radius_rho(t: f64, rho0: f64) -> Radius {
    let e = (-t / 12.0).exp();
    Radius {
        rho: 0.5 * rho0 * (1.0 + e),
        d1: -rho0 * e / 24.0,
        d2: rho0 * e / 288.0,
    }
}

/// A positive, log-concave coefficient family c_m indexed by m ≥ 0.
///
/// Every series summed here has terms `c_m · poly(m) · k^{2m}`, whose
/// logarithm is concave in m, so terms rise to a single peak and then
/// fall with a decreasing ratio. Summation stops once past the peak and
/// the next term is below `tol` times the partial sum.
#[derive(Debug, Clone, Copy)]
pub enum Family {
    /// c_m = L²_{r, m+shift}
    GevreyL { r: f64, shift: u64 },
    /// c_m = ρ^{2(m+1)} / (m!)⁴
    Toy { rho: f64 },
}

impl Family {
    fn ln_c(&self, m: u64) -> f64 {
        match *self {
            Family::GevreyL { r, shift } => 2.0 * ln_coeff_l(r, m + shift),
            Family::Toy { rho } => 2.0 * (m as f64 + 1.0) * rho.ln() - 4.0 * ln_gamma(m as f64 + 1.0),
        }
    }
}

/// Polynomial factor ((m + offset)/scale)^power multiplying each term.
#[derive(Debug, Clone, Copy)]
pub struct PolyFactor {
    pub offset: f64,
    pub scale: f64,
    pub power: i32,
}

impl PolyFactor {
    pub const ONE: PolyFactor = PolyFactor {
        offset: 1.0,
        scale: 1.0,
        power: 0,
    };

    fn ln(&self, m: u64) -> f64 {
        if self.power == 0 {
            0.0
        } else {
            self.power as f64 * ((m as f64 + self.offset) / self.scale).ln()
        }
    }
}

/// Result of a certified series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Number of summed terms (m = 0..terms).
    pub terms: u64,
    /// The first omitted term.
    pub first_omitted: f64,
}

const MAX_SERIES_TERMS: u64 = 100_000;

/// Σ_{m≥0} c_m · poly(m) · k^{2m}.
pub fn weighted_series(family: Family, poly: PolyFactor, k: i64, tol: f64) -> SeriesSum {
    let ln_k2 = if k == 0 { f64::NEG_INFINITY } else { 2.0 * (k.unsigned_abs() as f64).ln() };
    let term = |m: u64| -> f64 {
        let ln_pow = if m == 0 { 0.0 } else { m as f64 * ln_k2 };
        (family.ln_c(m) + poly.ln(m) + ln_pow).exp()
    };
    let mut sum = 0.0;
    let mut prev = 0.0;
    let mut m = 0;
    loop {
        let t = term(m);
        let past_peak = m > 0 && t <= prev;
        if past_peak && t < tol * sum {
            return SeriesSum {
                value: sum,
                terms: m,
                first_omitted: t,
            };
        }
        if k == 0 && m > 0 {
            // only m = 0 survives for k = 0
            return SeriesSum {
                value: sum,
                terms: m,
                first_omitted: 0.0,
            };
        }
        sum += t;
        prev = t;
        m += 1;
        if m > MAX_SERIES_TERMS {
            return SeriesSum {
                value: sum,
                terms: m,
                first_omitted: term(m),
            };
        }
    }
}

/// W_j(k) = Σ_{m≥0} L²_{r,m+j} k^{2m}.
pub fn mode_weight(j: u64, k: i64, r: f64, tol: f64) -> f64 {
    mode_weight_certified(j, k, r, tol).value
}

pub fn mode_weight_certified(j: u64, k: i64, r: f64, tol: f64) -> SeriesSum {
    weighted_series(Family::GevreyL { r, shift: j }, PolyFactor::ONE, k, tol)
}

/// Per-mode weighted L²_y norm: Σ_k w(k) · 2π ∫ |g(y) f̂_k(y)|² dy.
pub(crate) fn weighted_mode_sum(
    field: &Field,
    y_weight: Option<&[f64]>,
    mode_w: impl Fn(i64) -> f64,
    j_label: usize,
) -> Result<f64> {
    let grid = field.grid();
    let tw = grid.trapezoid_weights();
    let mut total = 0.0;
    for (idx, row) in field.coeffs().rows().into_iter().enumerate() {
        let k = grid.wavenumber(idx);
        let l2: f64 = match y_weight {
            Some(g) => row
                .iter()
                .zip(g)
                .zip(tw)
                .map(|((c, g), w)| c.norm_sqr() * g * g * w)
                .sum(),
            None => row.iter().zip(tw).map(|(c, w)| c.norm_sqr() * w).sum(),
        };
        if l2 == 0.0 {
            continue;
        }
        let w = mode_w(k);
        let cell = LX * w * l2;
        if !cell.is_finite() {
            return Err(LabError::Overflow {
                j: j_label,
                k,
                what: format!("weight {w:e} times L2 mass {l2:e}"),
            });
        }
        total += cell;
    }
    Ok(total)
}

/// τ^{ℓ+j} at the nodes of the field's grid.
pub fn tau_profile(y: &[f64], n: u64, power: f64) -> Vec<f64> {
    y.iter().map(|&y| weight_tau(y, n).powf(power)).collect()
}

/// Contributions Σ_k W_j(k)‖τ^{ℓ+j}∂_yʲ û_k‖² for j = 0..=3 (squared).
pub fn norm_x_breakdown(u: &Field, r: f64, p: &GevreyParams) -> Result<[f64; 4]> {
    let mut parts = [0.0; 4];
    let y = u.grid().y();
    for (j, part) in parts.iter_mut().enumerate() {
        let dj = if j == 0 { u.clone() } else { u.dy(j) };
        let tau = tau_profile(y, p.n, p.ell + j as f64);
        *part = weighted_mode_sum(&dj, Some(&tau), |k| mode_weight(j as u64, k, r, SERIES_TOL), j)?;
    }
    Ok(parts)
}

/// ‖u‖_{X_r}.
pub fn norm_x(u: &Field, r: f64, p: &GevreyParams) -> Result<f64> {
    Ok(norm_x_breakdown(u, r, p)?.iter().sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_values() {
        assert_eq!(weight_tau(0.0, 9), 3.0);
        assert_eq!(weight_tau(3.0, 16), 5.0);
        for i in 0..100 {
            let y = i as f64 * 0.173;
            assert!((weight_tau(y, 1) - (1.0 + y * y).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn min_n_matches_scan() {
        assert_eq!(min_n_for_ell(1.0).unwrap(), 1056);
        assert!(n_ell_constraint(1.0, 1) > 0.125);
        assert_eq!(n_ell_constraint(1.0, 1), 6.0);
        for ell in [0.51, 0.75, 1.0, 1.5, 2.0, 3.7] {
            let n = min_n_for_ell(ell).unwrap();
            assert!(n_ell_constraint(ell, n) <= 0.125);
            assert!(n == 1 || n_ell_constraint(ell, n - 1) > 0.125);
        }
        assert!(min_n_for_ell(0.5).is_err());
        assert!(min_n_for_ell(0.2).is_err());
    }

    #[test]
    fn coeff_l_values() {
        assert_eq!(coeff_l(1.0, 0), 1.0);
        assert_eq!(coeff_l(2.0, 0), 2.0);
        assert_eq!(coeff_l(1.0, 1), 1024.0);
        // log-domain and direct routes agree where both are finite
        for k in 0..=20 {
            let direct = coeff_l(0.7, k);
            let logd = ln_coeff_l(0.7, k).exp();
            assert!((direct - logd).abs() <= 1e-12 * direct);
        }
        // (k!)² overflows f64 past k ≈ 85; the log route does not
        let l90 = coeff_l(1.0, 90);
        assert!(l90.is_finite() && l90 > 0.0);
        assert!((ln_coeff_l(1.0, 90) - (10.0 * 91f64.ln() - 2.0 * (1..=90).map(|i| (i as f64).ln()).sum::<f64>())).abs() < 1e-9);
    }

    #[test]
    fn radius_at_zero_and_infinity() {
        let r = radius_rho(0.0, 0.5);
        assert_eq!(r.rho, 0.5);
        assert_eq!(r.d1, -0.5 / 24.0);
        let far = radius_rho(1e4, 0.5);
        assert!((far.rho - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mode_weight_k_zero_is_leading_coefficient() {
        for j in 0..4 {
            let w = mode_weight(j, 0, 0.6, SERIES_TOL);
            let l = coeff_l(0.6, j);
            assert!((w - l * l).abs() <= 1e-13 * l * l);
        }
    }

    #[test]
    fn params_validation() {
        let p = GevreyParams::reference();
        assert_eq!(p.n, 1056);
        assert!(p.validate().is_ok());
        assert!(GevreyParams { n: 1000, ..p }.validate().is_err());
        assert!(GevreyParams { rho0: 1.5, ..p }.validate().is_err());
        assert!(GevreyParams { ell: 0.5, ..p }.validate().is_err());
        assert!(GevreyParams { eps0: 0.0, ..p }.validate().is_err());
    }
}
