//! Finite-difference and quadrature weights on arbitrary 1D node sets.

/// Fornberg's recursion: weights for derivatives `0..=max_deriv` at `z`
/// using the nodes `x`. Returns `w[d][j]`.
pub fn fornberg_weights(z: f64, x: &[f64], max_deriv: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_deriv + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// A stencil row: derivative at node `i` is `sum(weights[s] * f[start + s])`.
#[derive(Debug, Clone)]
pub struct StencilRow {
    pub start: usize,
    pub weights: Vec<f64>,
}

impl StencilRow {
    #[inline]
    pub fn apply<T>(&self, f: &[T]) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let mut acc = f[self.start] * self.weights[0];
        for (s, &w) in self.weights.iter().enumerate().skip(1) {
            acc = acc + f[self.start + s] * w;
        }
        acc
    }
}

/// Stencils for the `deriv`-th derivative at every node of `y`, formal accuracy `order`.
///
/// Interior nodes use centered stencils; nodes too close to an end use
/// one-sided stencils of width `deriv + order`.
pub fn derivative_stencils(y: &[f64], deriv: usize, order: usize, uniform: bool) -> Vec<StencilRow> {
    let n = y.len();
    let centered = if uniform {
        2 * deriv.div_ceil(2) + order - 1
    } else {
        let w = deriv + order;
        if w.is_multiple_of(2) {
            w + 1
        } else {
            w
        }
    };
    let one_sided = deriv + order;
    let half = centered / 2;
    (0..n)
        .map(|i| {
            let (start, width) = if i >= half && i + half < n {
                (i - half, centered)
            } else if i < half {
                (0, one_sided)
            } else {
                (n - one_sided, one_sided)
            };
            let w = fornberg_weights(y[i], &y[start..start + width], deriv);
            StencilRow {
                start,
                weights: w[deriv].clone(),
            }
        })
        .collect()
}

/// Weights for the integral over each interval `[y_i, y_{i+1}]`.
///
/// Order 2 is the trapezoid rule; order 4 integrates the cubic through the
/// four nearest nodes exactly (two-point Gauss on the Lagrange basis).
pub fn interval_weights(y: &[f64], order: usize) -> Vec<StencilRow> {
    let n = y.len();
    (0..n - 1)
        .map(|i| {
            let h = y[i + 1] - y[i];
            if order <= 2 {
                return StencilRow {
                    start: i,
                    weights: vec![0.5 * h, 0.5 * h],
                };
            }
            let start = if i == 0 {
                0
            } else if i + 2 >= n {
                n - 4
            } else {
                i - 1
            };
            let nodes = &y[start..start + 4];
            let mid = 0.5 * (y[i] + y[i + 1]);
            let d = 0.5 * h / 3f64.sqrt();
            let mut weights = vec![0.0; 4];
            for z in [mid - d, mid + d] {
                let w = fornberg_weights(z, nodes, 0);
                for (acc, v) in weights.iter_mut().zip(&w[0]) {
                    *acc += 0.5 * h * v;
                }
            }
            StencilRow { start, weights }
        })
        .collect()
}

/// Trapezoid weights for the full-interval quadrature on `y`.
pub fn trapezoid_weights(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = y[i + 1] - y[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}
