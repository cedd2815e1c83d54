//! Manufactured solution u* = e^{−t} sin(x) y² e^{−y} and its source term.
//!
//! With g(y) = y² e^{−y} and G(y) = ∫₀ʸ g = 2 − (y² + 2y + 2)e^{−y}, the
//! normal velocity is v* = −e^{−t} cos(x) G(y), and substituting into
//! ∂ₜu + u∂ₓu + v∂_y u − ∂_y²u + d·u = S gives
//!
//!   S = (d − 1) e^{−t} sin x · g − e^{−t} sin x · g''
//!       + a · e^{−2t} (sin 2x / 2) (g² − G g')
//!
//! where a ∈ {0, 1} switches the transport terms.

use std::sync::Arc;

use crate::grid::{Field, Grid};

pub fn profile(y: f64) -> f64 {
    y * y * (-y).exp()
}

pub fn profile_d1(y: f64) -> f64 {
    (2.0 * y - y * y) * (-y).exp()
}

pub fn profile_d2(y: f64) -> f64 {
    (2.0 - 4.0 * y + y * y) * (-y).exp()
}

pub fn profile_integral(y: f64) -> f64 {
    2.0 - (y * y + 2.0 * y + 2.0) * (-y).exp()
}

/// u*(t, x, y)
pub fn exact(t: f64, x: f64, y: f64) -> f64 {
    (-t).exp() * x.sin() * profile(y)
}

/// v*(t, x, y) = −∫₀ʸ ∂ₓu* dỹ
pub fn exact_normal_velocity(t: f64, x: f64, y: f64) -> f64 {
    -(-t).exp() * x.cos() * profile_integral(y)
}

/// S(t, x, y) for damping coefficient `damping` and transport switch `advection`.
pub fn source(t: f64, x: f64, y: f64, damping: f64, advection: bool) -> f64 {
    let e = (-t).exp();
    let lin = (damping - 1.0) * e * x.sin() * profile(y) - e * x.sin() * profile_d2(y);
    if !advection {
        return lin;
    }
    let g = profile(y);
    let nl = e * e * 0.5 * (2.0 * x).sin() * (g * g - profile_integral(y) * profile_d1(y));
    lin + nl
}

pub fn exact_field(grid: &Arc<Grid>, t: f64) -> Field {
    Field::from_physical_fn(grid, |x, y| exact(t, x, y))
}

pub fn source_field(grid: &Arc<Grid>, t: f64, damping: f64, advection: bool) -> Field {
    Field::from_physical_fn(grid, |x, y| source(t, x, y, damping, advection))
}
