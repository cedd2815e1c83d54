//! Implicit vertical operators: Crank–Nicolson systems for
//! ∂ₜq = ∂_y²q − d·q + E, solved independently per Fourier mode.
//!
//! On a uniform grid with fourth-order y-accuracy the second derivative is
//! the compact (Padé) form B q'' = D₂ q with B = (1, 10, 1)/12 and
//! D₂ = (1, −2, 1)/h², which keeps every solve tridiagonal. Otherwise
//! B = I and D₂ is the three-point nonuniform stencil.

use num_complex::Complex64;

use crate::fd::fornberg_weights;
use crate::grid::Grid;
use crate::tridiag::{Tridiagonal, TridiagonalLu};

/// Condition imposed at y = Ymax (y = 0 is always homogeneous Dirichlet).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopBoundary {
    Dirichlet,
    /// ∂_y q = 0 via a one-sided three-point closure.
    Neumann,
}

/// The mass matrix B and second-derivative matrix D₂ of the y-operator.
#[derive(Debug, Clone)]
pub struct VerticalOperator {
    pub mass: Tridiagonal,
    pub d2: Tridiagonal,
    pub compact: bool,
}

impl VerticalOperator {
    pub fn new(grid: &Grid) -> Self {
        let y = grid.y();
        let n = y.len();
        let mut mass = Tridiagonal::zeros(n);
        let mut d2 = Tridiagonal::zeros(n);
        let compact = grid.is_uniform() && grid.spec().y_order == 4;
        for i in 1..n - 1 {
            let hm = y[i] - y[i - 1];
            let hp = y[i + 1] - y[i];
            if compact {
                let h2 = hm * hp;
                mass.lower[i] = 1.0 / 12.0;
                mass.diag[i] = 10.0 / 12.0;
                mass.upper[i] = 1.0 / 12.0;
                d2.lower[i] = 1.0 / h2;
                d2.diag[i] = -2.0 / h2;
                d2.upper[i] = 1.0 / h2;
            } else {
                mass.diag[i] = 1.0;
                d2.lower[i] = 2.0 / (hm * (hm + hp));
                d2.diag[i] = -2.0 / (hm * hp);
                d2.upper[i] = 2.0 / (hp * (hm + hp));
            }
        }
        Self { mass, d2, compact }
    }

    /// w = ∂_y² q at interior nodes (boundary rows of `out` are left at zero).
    pub fn second_derivative(&self, q: &[Complex64], out: &mut [Complex64]) {
        let n = q.len();
        let mut rhs = vec![Complex64::default(); n];
        self.d2.mul(q, &mut rhs);
        if !self.compact {
            out.copy_from_slice(&rhs);
            out[0] = Complex64::default();
            out[n - 1] = Complex64::default();
            return;
        }
        // interior compact solve with w = 0 closure rows at both ends
        let mut m = self.mass.clone();
        m.diag[0] = 1.0;
        m.upper[0] = 0.0;
        m.diag[n - 1] = 1.0;
        m.lower[n - 1] = 0.0;
        rhs[0] = Complex64::default();
        rhs[n - 1] = Complex64::default();
        m.factor().solve(&mut rhs);
        out.copy_from_slice(&rhs);
    }
}

/// Factored Crank–Nicolson system for one step size.
#[derive(Debug, Clone)]
pub struct CnSystem {
    op: VerticalOperator,
    explicit: Tridiagonal,
    lu: TridiagonalLu,
    dt: f64,
    top: TopBoundary,
    /// Multiplier that eliminates q_{n-3} from the Neumann closure row.
    neumann_elim: f64,
}

impl CnSystem {
    /// System for (B(1 + dΔt/2) − Δt/2 D₂) qⁿ⁺¹ = (B(1 − dΔt/2) + Δt/2 D₂) qⁿ + Δt B E.
    pub fn new(grid: &Grid, dt: f64, damping: f64, top: TopBoundary) -> Self {
        let op = VerticalOperator::new(grid);
        let n = grid.ny();
        let mut lhs = Tridiagonal::zeros(n);
        let mut explicit = Tridiagonal::zeros(n);
        let a = 1.0 + 0.5 * damping * dt;
        let b = 1.0 - 0.5 * damping * dt;
        for i in 1..n - 1 {
            lhs.lower[i] = a * op.mass.lower[i] - 0.5 * dt * op.d2.lower[i];
            lhs.diag[i] = a * op.mass.diag[i] - 0.5 * dt * op.d2.diag[i];
            lhs.upper[i] = a * op.mass.upper[i] - 0.5 * dt * op.d2.upper[i];
            explicit.lower[i] = b * op.mass.lower[i] + 0.5 * dt * op.d2.lower[i];
            explicit.diag[i] = b * op.mass.diag[i] + 0.5 * dt * op.d2.diag[i];
            explicit.upper[i] = b * op.mass.upper[i] + 0.5 * dt * op.d2.upper[i];
        }
        lhs.diag[0] = 1.0;
        let mut neumann_elim = 0.0;
        match top {
            TopBoundary::Dirichlet => lhs.diag[n - 1] = 1.0,
            TopBoundary::Neumann => {
                let y = grid.y();
                let w = fornberg_weights(y[n - 1], &y[n - 3..], 1);
                let (w0, w1, w2) = (w[1][0], w[1][1], w[1][2]);
                // row n-1: w0 q[n-3] + w1 q[n-2] + w2 q[n-1] = 0; remove q[n-3] with row n-2
                neumann_elim = w0 / lhs.lower[n - 2];
                lhs.lower[n - 1] = w1 - neumann_elim * lhs.diag[n - 2];
                lhs.diag[n - 1] = w2 - neumann_elim * lhs.upper[n - 2];
            }
        }
        let lu = lhs.factor();
        Self {
            op,
            explicit,
            lu,
            dt,
            top,
            neumann_elim,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn operator(&self) -> &VerticalOperator {
        &self.op
    }

    /// Advance one profile: returns qⁿ⁺¹ given qⁿ and the explicit term E (all nodes).
    pub fn advance(&self, q: &[Complex64], e: &[Complex64], out: &mut [Complex64]) {
        let n = q.len();
        let mut be = vec![Complex64::default(); n];
        self.op.mass.mul(e, &mut be);
        self.explicit.mul(q, out);
        for i in 1..n - 1 {
            out[i] += be[i] * self.dt;
        }
        out[0] = Complex64::default();
        out[n - 1] = match self.top {
            TopBoundary::Dirichlet => Complex64::default(),
            TopBoundary::Neumann => -out[n - 2] * self.neumann_elim,
        };
        self.lu.solve(out);
    }
}
