//! Tridiagonal systems with real coefficients and complex right-hand sides.
use num_complex::Complex64;

/// Real tridiagonal matrix `A` stored by diagonals.
///
/// `lower[i]` multiplies `x[i-1]` in row `i` (`lower[0]` unused),
/// `upper[i]` multiplies `x[i+1]` in row `i` (`upper[n-1]` unused).
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `y = A x`
    pub fn mul(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.len();
        for i in 0..n {
            let mut acc = x[i] * self.diag[i];
            if i > 0 {
                acc += x[i - 1] * self.lower[i];
            }
            if i + 1 < n {
                acc += x[i + 1] * self.upper[i];
            }
            y[i] = acc;
        }
    }

    /// Precompute the Thomas elimination so repeated solves are O(n).
    pub fn factor(&self) -> TridiagonalLu {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut inv = vec![0.0; n];
        inv[0] = 1.0 / self.diag[0];
        c[0] = self.upper[0] * inv[0];
        for i in 1..n {
            let denom = self.diag[i] - self.lower[i] * c[i - 1];
            inv[i] = 1.0 / denom;
            c[i] = if i + 1 < n { self.upper[i] * inv[i] } else { 0.0 };
        }
        TridiagonalLu {
            lower: self.lower.clone(),
            c,
            inv,
        }
    }
}

/// Factored form of a [`Tridiagonal`] matrix.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    c: Vec<f64>,
    inv: Vec<f64>,
}

impl TridiagonalLu {
    /// Solve in place: on return `rhs` holds `A^{-1} rhs`.
    pub fn solve(&self, rhs: &mut [Complex64]) {
        let n = self.inv.len();
        rhs[0] *= self.inv[0];
        for i in 1..n {
            let prev = rhs[i - 1];
            rhs[i] = (rhs[i] - prev * self.lower[i]) * self.inv[i];
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= next * self.c[i];
        }
    }
}
