//! Periodic-in-x spectral, collocated-in-y discretization.
//!
//! A [`Field`] stores complex Fourier coefficients `c[k, i]` for
//! `k in -K..=K` and y-node `i`; real fields are Hermitian in `k`.
//! Products are formed on a padded physical grid with `nx >= 3K + 1`
//! points, which is the 2/3-rule truncation for quadratic terms.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::ops::{Add, Mul, Neg, Sub};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1, ArrayViewMut1, Axis, Zip};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fd::{self, StencilRow};

/// x-period. Fixed; the real line is replaced by the torus of this length.
pub const LX: f64 = 2.0 * PI;

const fn default_y_order() -> usize {
    4
}

const fn default_max_dx_order() -> u32 {
    8
}

/// User-facing grid parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Maximum Fourier wavenumber K.
    pub k_max: usize,
    /// Number of y-nodes (including both ends).
    pub ny: usize,
    /// Truncation height of the half-line.
    pub ymax: f64,
    /// Algebraic clustering toward y = 0; 0 gives a uniform grid.
    #[serde(default)]
    pub stretch: f64,
    /// Formal accuracy of y-derivatives and cumulative integrals (2 or 4).
    #[serde(default = "default_y_order")]
    pub y_order: usize,
    /// Largest x-derivative order accepted by [`Field::diff_x`].
    #[serde(default = "default_max_dx_order")]
    pub max_dx_order: u32,
}

impl GridSpec {
    pub fn new(k_max: usize, ny: usize, ymax: f64) -> Self {
        Self {
            k_max,
            ny,
            ymax,
            stretch: 0.0,
            y_order: default_y_order(),
            max_dx_order: default_max_dx_order(),
        }
    }

    pub fn with_stretch(mut self, stretch: f64) -> Self {
        self.stretch = stretch;
        self
    }

    pub fn with_y_order(mut self, order: usize) -> Self {
        self.y_order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max < 1 {
            return Err(LabError::param("k_max must be >= 1"));
        }
        if self.ny < 16 {
            return Err(LabError::param(format!("ny = {} must be >= 16", self.ny)));
        }
        if !(self.ymax > 0.0 && self.ymax.is_finite()) {
            return Err(LabError::param(format!("ymax = {} must be positive", self.ymax)));
        }
        if !(self.stretch >= 0.0 && self.stretch.is_finite()) {
            return Err(LabError::param(format!("stretch = {} must be >= 0", self.stretch)));
        }
        if self.y_order != 2 && self.y_order != 4 {
            return Err(LabError::param(format!("y_order = {} must be 2 or 4", self.y_order)));
        }
        if self.y_order == 4 && self.stretch > 0.0 {
            return Err(LabError::param(
                "fourth-order y operators require a uniform grid (stretch = 0)",
            ));
        }
        Ok(())
    }

    pub fn build(self) -> Result<Arc<Grid>> {
        Grid::new(self).map(Arc::new)
    }
}

/// Discretization substrate shared by all fields of a run.
pub struct Grid {
    spec: GridSpec,
    y: Vec<f64>,
    nx: usize,
    deriv: [Vec<StencilRow>; 4],
    interval: Vec<StencilRow>,
    trapezoid: Vec<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("spec", &self.spec)
            .field("nx", &self.nx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.ny;
        let beta = spec.stretch;
        let y: Vec<f64> = (0..n)
            .map(|i| {
                if i == n - 1 {
                    return spec.ymax;
                }
                let s = i as f64 / (n - 1) as f64;
                spec.ymax * s * (1.0 + beta * s) / (1.0 + beta)
            })
            .collect();
        let uniform = beta == 0.0;
        let deriv = [1, 2, 3, 4].map(|d| fd::derivative_stencils(&y, d, spec.y_order, uniform));
        let interval = fd::interval_weights(&y, spec.y_order);
        let trapezoid = fd::trapezoid_weights(&y);
        let nx = 3 * spec.k_max + 1 + (3 * spec.k_max + 1) % 2;
        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(nx);
        let fft_inv = planner.plan_fft_inverse(nx);
        Ok(Self {
            spec,
            y,
            nx,
            deriv,
            interval,
            trapezoid,
            fft_fwd,
            fft_inv,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn k_max(&self) -> usize {
        self.spec.k_max
    }

    pub fn n_modes(&self) -> usize {
        2 * self.spec.k_max + 1
    }

    pub fn ny(&self) -> usize {
        self.spec.ny
    }

    pub fn ymax(&self) -> f64 {
        self.spec.ymax
    }

    pub fn is_uniform(&self) -> bool {
        self.spec.stretch == 0.0
    }

    /// Uniform spacing (or the mean spacing on a stretched grid).
    pub fn dy(&self) -> f64 {
        self.spec.ymax / (self.spec.ny - 1) as f64
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Number of physical x-points used for transforms and products.
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn x(&self) -> Vec<f64> {
        (0..self.nx).map(|j| LX * j as f64 / self.nx as f64).collect()
    }

    /// Wavenumber of row `idx`.
    #[inline]
    pub fn wavenumber(&self, idx: usize) -> i64 {
        idx as i64 - self.spec.k_max as i64
    }

    #[inline]
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let kk = k + self.spec.k_max as i64;
        (kk >= 0 && kk < self.n_modes() as i64).then_some(kk as usize)
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.n_modes()).map(|i| self.wavenumber(i))
    }

    pub fn trapezoid_weights(&self) -> &[f64] {
        &self.trapezoid
    }

    pub(crate) fn stencils(&self, j: usize) -> &[StencilRow] {
        &self.deriv[j - 1]
    }

    /// Apply `d^j/dy^j` to a single profile.
    pub fn diff_profile<T>(&self, j: usize, f: &[T], out: &mut [T])
    where
        T: Copy + Mul<f64, Output = T> + Add<Output = T>,
    {
        for (o, row) in out.iter_mut().zip(self.stencils(j)) {
            *o = row.apply(f);
        }
    }

    /// Cumulative integral of a single profile from y = 0.
    pub fn integrate_profile<T>(&self, f: &[T], out: &mut [T])
    where
        T: Copy + Mul<f64, Output = T> + Add<Output = T>,
    {
        out[0] = f[0] * 0.0;
        for (i, row) in self.interval.iter().enumerate() {
            out[i + 1] = out[i] + row.apply(f);
        }
    }

    /// Trapezoid quadrature of a real profile over [0, Ymax].
    pub fn quad(&self, f: impl IntoIterator<Item = f64>) -> f64 {
        f.into_iter().zip(&self.trapezoid).map(|(v, w)| v * w).sum()
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self.spec != other.spec {
            return Err(LabError::GridMismatch(format!(
                "{:?} vs {:?}",
                self.spec, other.spec
            )));
        }
        Ok(())
    }
}

/// Scalar field on a [`Grid`], stored spectrally in x.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    coeffs: Array2<Complex64>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.grid.spec == other.grid.spec && self.coeffs == other.coeffs
    }
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            coeffs: Array2::zeros((grid.n_modes(), grid.ny())),
        }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Array2<Complex64>) -> Result<Self> {
        if coeffs.dim() != (grid.n_modes(), grid.ny()) {
            return Err(LabError::GridMismatch(format!(
                "coefficient shape {:?} does not match grid ({}, {})",
                coeffs.dim(),
                grid.n_modes(),
                grid.ny()
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Field whose only nonzero mode is `k`, with y-profile `profile(y)`.
    pub fn single_mode(grid: &Arc<Grid>, k: i64, profile: impl Fn(f64) -> Complex64) -> Result<Self> {
        let idx = grid
            .index_of(k)
            .ok_or_else(|| LabError::param(format!("wavenumber {k} exceeds K = {}", grid.k_max())))?;
        let mut f = Self::zeros(grid);
        for (c, &y) in f.coeffs.row_mut(idx).iter_mut().zip(grid.y()) {
            *c = profile(y);
        }
        Ok(f)
    }

    /// Sample a real function on the physical grid and transform.
    /// Content above K is truncated.
    pub fn from_physical_fn(grid: &Arc<Grid>, func: impl Fn(f64, f64) -> f64) -> Self {
        let xs = grid.x();
        let mut phys = Array2::zeros((grid.nx(), grid.ny()));
        for (j, &x) in xs.iter().enumerate() {
            for (i, &y) in grid.y().iter().enumerate() {
                phys[[j, i]] = func(x, y);
            }
        }
        Self::from_physical(grid, &phys)
    }

    /// Forward transform of physical values `(nx, ny)`, truncated to |k| <= K.
    pub fn from_physical(grid: &Arc<Grid>, phys: &Array2<f64>) -> Self {
        let nx = grid.nx();
        let kmax = grid.k_max() as i64;
        let mut out = Self::zeros(grid);
        let mut buf = vec![Complex64::default(); nx];
        let scale = 1.0 / nx as f64;
        for i in 0..grid.ny() {
            for (b, &v) in buf.iter_mut().zip(phys.column(i)) {
                *b = Complex64::new(v, 0.0);
            }
            grid.fft_fwd.process(&mut buf);
            for k in -kmax..=kmax {
                let src = k.rem_euclid(nx as i64) as usize;
                out.coeffs[[(k + kmax) as usize, i]] = buf[src] * scale;
            }
        }
        out
    }

    /// Inverse transform to physical values `(nx, ny)`; imaginary parts dropped.
    pub fn to_physical(&self) -> Array2<f64> {
        let g = &self.grid;
        let nx = g.nx();
        let kmax = g.k_max() as i64;
        let mut phys = Array2::zeros((nx, g.ny()));
        let mut buf = vec![Complex64::default(); nx];
        for i in 0..g.ny() {
            buf.iter_mut().for_each(|b| *b = Complex64::default());
            for k in -kmax..=kmax {
                buf[k.rem_euclid(nx as i64) as usize] = self.coeffs[[(k + kmax) as usize, i]];
            }
            g.fft_inv.process(&mut buf);
            for (p, b) in phys.column_mut(i).iter_mut().zip(&buf) {
                *p = b.re;
            }
        }
        phys
    }

    /// Largest imaginary part produced by the inverse transform, relative to the field scale.
    pub fn imag_residue(&self) -> f64 {
        let g = &self.grid;
        let nx = g.nx();
        let kmax = g.k_max() as i64;
        let mut worst: f64 = 0.0;
        let mut buf = vec![Complex64::default(); nx];
        for i in 0..g.ny() {
            buf.iter_mut().for_each(|b| *b = Complex64::default());
            for k in -kmax..=kmax {
                buf[k.rem_euclid(nx as i64) as usize] = self.coeffs[[(k + kmax) as usize, i]];
            }
            g.fft_inv.process(&mut buf);
            for b in &buf {
                worst = worst.max(b.im.abs());
            }
        }
        worst
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coeffs
    }

    pub fn mode(&self, k: i64) -> Option<ArrayView1<'_, Complex64>> {
        self.grid.index_of(k).map(|i| self.coeffs.row(i))
    }

    pub fn mode_mut(&mut self, k: i64) -> Option<ArrayViewMut1<'_, Complex64>> {
        self.grid.index_of(k).map(move |i| self.coeffs.row_mut(i))
    }

    /// True when `c[-k] = conj(c[k])` to within `tol` (absolute).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.grid.n_modes();
        (0..n).all(|a| {
            let b = n - 1 - a;
            self.coeffs
                .row(a)
                .iter()
                .zip(self.coeffs.row(b))
                .all(|(p, q)| (p - q.conj()).norm() <= tol)
        })
    }

    /// Magnitude of the outermost retained modes |k| = K.
    pub fn edge_mode_amplitude(&self) -> f64 {
        let n = self.grid.n_modes();
        [0, n - 1]
            .iter()
            .flat_map(|&r| self.coeffs.row(r).into_iter().map(|c| c.norm()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_physical(&self) -> f64 {
        self.to_physical().iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Squared L² norm over the torus × [0, Ymax] (Parseval, trapezoid in y).
    pub fn l2_norm_sq(&self) -> f64 {
        let w = self.grid.trapezoid_weights();
        LX * self
            .coeffs
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(w).map(|(c, w)| c.norm_sqr() * w).sum::<f64>())
            .sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// ∂ₓᵐ: multiply mode k by (ik)ᵐ.
    pub fn diff_x(&self, m: u32) -> Result<Field> {
        if m > self.grid.spec.max_dx_order {
            return Err(LabError::param(format!(
                "x-derivative order {m} exceeds configured maximum {}",
                self.grid.spec.max_dx_order
            )));
        }
        Ok(self.dx(m))
    }

    pub(crate) fn dx(&self, m: u32) -> Field {
        let mut out = self.clone();
        for (idx, mut row) in out.coeffs.axis_iter_mut(Axis(0)).enumerate() {
            let k = self.grid.wavenumber(idx) as f64;
            let factor = Complex64::new(0.0, k).powu(m);
            row.mapv_inplace(|c| c * factor);
        }
        out
    }

    /// ∂_yʲ for j in 1..=4 via finite differences of the grid's accuracy order.
    pub fn diff_y(&self, j: usize) -> Result<Field> {
        if !(1..=4).contains(&j) {
            return Err(LabError::param(format!("y-derivative order {j} not in 1..=4")));
        }
        Ok(self.dy(j))
    }

    pub(crate) fn dy(&self, j: usize) -> Field {
        let mut out = Field::zeros(&self.grid);
        let mut buf_in = vec![Complex64::default(); self.grid.ny()];
        let mut buf_out = buf_in.clone();
        for (src, mut dst) in self.coeffs.rows().into_iter().zip(out.coeffs.rows_mut()) {
            buf_in.iter_mut().zip(src.iter()).for_each(|(b, s)| *b = *s);
            self.grid.diff_profile(j, &buf_in, &mut buf_out);
            dst.iter_mut().zip(&buf_out).for_each(|(d, s)| *d = *s);
        }
        out
    }

    /// ∫₀ʸ · dỹ, node by node; zero at y = 0.
    pub fn integrate_y_from_0(&self) -> Field {
        let mut out = Field::zeros(&self.grid);
        let mut buf_in = vec![Complex64::default(); self.grid.ny()];
        let mut buf_out = buf_in.clone();
        for (src, mut dst) in self.coeffs.rows().into_iter().zip(out.coeffs.rows_mut()) {
            buf_in.iter_mut().zip(src.iter()).for_each(|(b, s)| *b = *s);
            self.grid.integrate_profile(&buf_in, &mut buf_out);
            dst.iter_mut().zip(&buf_out).for_each(|(d, s)| *d = *s);
        }
        out
    }

    /// Dealiased product, formed in physical space and truncated to |k| <= K.
    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Field) -> Field {
        let a = self.to_physical();
        let b = other.to_physical();
        Field::from_physical(&self.grid, &(a * b))
    }

    /// Multiply every mode by a real y-profile (pointwise in y).
    pub fn scale_y(&self, profile: &[f64]) -> Field {
        let mut out = self.clone();
        for mut row in out.coeffs.rows_mut() {
            row.iter_mut().zip(profile).for_each(|(c, &w)| *c *= w);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Field {
        let mut out = self.clone();
        out.coeffs.mapv_inplace(|c| c * s);
        out
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Field) {
        Zip::from(&mut self.coeffs)
            .and(&other.coeffs)
            .for_each(|s, &o| *s += o * a);
    }

    /// Pin the y = 0 and y = Ymax rows to zero in every mode.
    pub fn zero_boundary_rows(&mut self) {
        let last = self.grid.ny() - 1;
        for mut row in self.coeffs.rows_mut() {
            row[0] = Complex64::default();
            row[last] = Complex64::default();
        }
    }

    /// Values at y-node `i` across modes.
    pub fn node(&self, i: usize) -> Array1<Complex64> {
        self.coeffs.column(i).to_owned()
    }

    /// Write the grid-core dump: `<stem>.json` sidecar and `<stem>.bin`
    /// (little-endian f64, row-major (mode, node), re/im interleaved).
    pub fn write_dump(&self, stem: &Path, name: &str, t: f64) -> Result<()> {
        let bin = stem.with_extension("bin");
        let json = stem.with_extension("json");
        let meta = DumpMeta {
            name: name.to_string(),
            t,
            grid: self.grid.spec,
            n_modes: self.grid.n_modes(),
            ny: self.grid.ny(),
            k_min: -(self.grid.k_max() as i64),
            layout: "row-major (mode, node); mode index = k + K; re, im interleaved".into(),
            dtype: "float64-le".into(),
            binary: bin
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        };
        let mut bytes = Vec::with_capacity(self.coeffs.len() * 16);
        for c in self.coeffs.iter() {
            bytes.extend_from_slice(&c.re.to_le_bytes());
            bytes.extend_from_slice(&c.im.to_le_bytes());
        }
        let mut fh = fs::File::create(&bin).map_err(|e| LabError::io(&bin, e))?;
        fh.write_all(&bytes).map_err(|e| LabError::io(&bin, e))?;
        let text = serde_json::to_string_pretty(&meta).expect("dump metadata serializes");
        fs::write(&json, text).map_err(|e| LabError::io(&json, e))?;
        Ok(())
    }

    /// Read a dump written by [`Field::write_dump`].
    pub fn read_dump(stem: &Path) -> Result<(Field, DumpMeta)> {
        let json = stem.with_extension("json");
        let text = fs::read_to_string(&json).map_err(|e| LabError::io(&json, e))?;
        let meta: DumpMeta = serde_json::from_str(&text).map_err(|e| LabError::Config {
            path: json.clone(),
            detail: e.to_string(),
        })?;
        let bin: PathBuf = stem.with_extension("bin");
        let bytes = fs::read(&bin).map_err(|e| LabError::io(&bin, e))?;
        let grid = meta.grid.build()?;
        if bytes.len() != grid.n_modes() * grid.ny() * 16 {
            return Err(LabError::Config {
                path: bin,
                detail: format!("expected {} bytes, found {}", grid.n_modes() * grid.ny() * 16, bytes.len()),
            });
        }
        let vals: Vec<Complex64> = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        let coeffs = Array2::from_shape_vec((grid.n_modes(), grid.ny()), vals)
            .expect("shape checked above");
        Ok((Field::from_coeffs(&grid, coeffs)?, meta))
    }
}

/// JSON sidecar of a field dump.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DumpMeta {
    pub name: String,
    pub t: f64,
    pub grid: GridSpec,
    pub n_modes: usize,
    pub ny: usize,
    pub k_min: i64,
    pub layout: String,
    pub dtype: String,
    pub binary: String,
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        let mut out = self.clone();
        out.coeffs += &rhs.coeffs;
        out
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        let mut out = self.clone();
        out.coeffs -= &rhs.coeffs;
        out
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(k: usize, ny: usize, ymax: f64) -> Arc<Grid> {
        GridSpec::new(k, ny, ymax).build().unwrap()
    }

    fn max_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        (a - b).iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(0, 32, 1.0).build().is_err());
        assert!(GridSpec::new(2, 8, 1.0).build().is_err());
        assert!(GridSpec::new(2, 32, -1.0).build().is_err());
        assert!(GridSpec::new(2, 32, 1.0).with_y_order(3).build().is_err());
        assert!(GridSpec::new(2, 32, 1.0).with_stretch(1.0).build().is_err());
        assert!(GridSpec::new(2, 32, 1.0)
            .with_stretch(1.0)
            .with_y_order(2)
            .build()
            .is_ok());
    }

    #[test]
    fn y_nodes_are_increasing_with_pinned_ends() {
        for stretch in [0.0, 0.5, 3.0] {
            let g = GridSpec::new(2, 33, 7.0)
                .with_stretch(stretch)
                .with_y_order(2)
                .build()
                .unwrap();
            assert_eq!(g.y()[0], 0.0);
            assert_eq!(*g.y().last().unwrap(), 7.0);
            assert!(g.y().windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn diff_x_of_sine_is_cosine() {
        let g = grid(4, 17, 3.0);
        let u = Field::from_physical_fn(&g, |x, y| x.sin() * (1.0 + y));
        let du = u.diff_x(1).unwrap().to_physical();
        let expect = Field::from_physical_fn(&g, |x, y| x.cos() * (1.0 + y)).to_physical();
        assert!(max_diff(&du, &expect) < 1e-13);
    }

    #[test]
    fn diff_x_of_x_independent_field_vanishes() {
        let g = grid(3, 17, 2.0);
        let u = Field::from_physical_fn(&g, |_, y| y * y + 1.0);
        assert!(u.diff_x(1).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn diff_x_fourth_order_of_mode_three() {
        let g = grid(4, 16, 1.0);
        let u = Field::single_mode(&g, 3, |y| Complex64::new(y.exp(), 0.0)).unwrap();
        let d4 = u.diff_x(4).unwrap();
        let row = d4.mode(3).unwrap();
        for (c, &y) in row.iter().zip(g.y()) {
            assert!((c - Complex64::new(81.0 * y.exp(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn diff_x_beyond_configured_max_is_rejected() {
        let g = grid(2, 16, 1.0);
        let u = Field::zeros(&g);
        assert!(matches!(u.diff_x(9), Err(LabError::Parameter(_))));
        assert!(u.diff_x(8).is_ok());
    }

    #[test]
    fn diff_y_of_quadratic_is_two() {
        for order in [2, 4] {
            let g = GridSpec::new(1, 21, 4.0).with_y_order(order).build().unwrap();
            let u = Field::from_physical_fn(&g, |_, y| y * y);
            let d2 = u.diff_y(2).unwrap();
            let row = d2.mode(0).unwrap();
            for c in row.iter() {
                assert!((c.re - 2.0).abs() < 1e-10, "order {order}: {c}");
            }
        }
    }

    #[test]
    fn diff_y_zero_and_bad_order() {
        let g = grid(1, 16, 1.0);
        let z = Field::zeros(&g);
        for j in 1..=4 {
            assert_eq!(z.diff_y(j).unwrap().max_abs_coeff(), 0.0);
        }
        assert!(z.diff_y(0).is_err());
        assert!(z.diff_y(5).is_err());
    }

    #[test]
    fn integrate_constant_and_linear() {
        for order in [2, 4] {
            let g = GridSpec::new(1, 33, 3.0).with_y_order(order).build().unwrap();
            let one = Field::from_physical_fn(&g, |_, _| 1.0).integrate_y_from_0();
            let lin = Field::from_physical_fn(&g, |_, y| y).integrate_y_from_0();
            for (i, &y) in g.y().iter().enumerate() {
                assert!((one.mode(0).unwrap()[i].re - y).abs() < 1e-12);
                assert!((lin.mode(0).unwrap()[i].re - 0.5 * y * y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transform_round_trip() {
        let g = grid(5, 20, 2.0);
        let u = Field::from_physical_fn(&g, |x, y| {
            (x.sin() + 0.3 * (4.0 * x).cos() - 0.1 * (5.0 * x + 0.2).sin()) * (-y).exp()
        });
        let phys = u.to_physical();
        let back = Field::from_physical(&g, &phys);
        let rel = (&back - &u).max_abs_coeff() / u.max_abs_coeff();
        assert!(rel < 1e-12);
        assert!(u.is_hermitian(1e-14));
        assert!(u.imag_residue() < 1e-14);
    }

    #[test]
    fn product_is_alias_free_for_band_limited_inputs() {
        let g = grid(4, 16, 1.0);
        let a = Field::from_physical_fn(&g, |x, _| (2.0 * x).cos());
        let b = Field::from_physical_fn(&g, |x, _| (2.0 * x).sin());
        let p = a.mul(&b).unwrap().to_physical();
        let expect = Field::from_physical_fn(&g, |x, _| 0.5 * (4.0 * x).sin()).to_physical();
        assert!(max_diff(&p, &expect) < 1e-14);
        // 3x * 3x = 6x lies above K = 4 and is truncated rather than aliased
        let c = Field::from_physical_fn(&g, |x, _| (3.0 * x).cos());
        let cc = c.mul(&c).unwrap();
        assert!((cc.mode(0).unwrap()[0].re - 0.5).abs() < 1e-14);
        for k in 1..=4 {
            assert!(cc.mode(k).unwrap()[0].norm() < 1e-14);
        }
    }

    #[test]
    fn dump_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = grid(3, 16, 2.0);
        let u = Field::from_physical_fn(&g, |x, y| x.cos() * y + (2.0 * x).sin());
        let stem = dir.path().join("u_0001");
        u.write_dump(&stem, "u", 0.5).unwrap();
        let bytes = fs::read(stem.with_extension("bin")).unwrap();
        assert_eq!(bytes.len(), 7 * 16 * 16);
        let first = f64::from_le_bytes(bytes[..8].try_into().unwrap());
        assert_eq!(first, u.coeffs()[[0, 0]].re);
        let (back, meta) = Field::read_dump(&stem).unwrap();
        assert_eq!(back, u);
        assert_eq!(meta.t, 0.5);
        assert_eq!(meta.k_min, -3);
    }
}
