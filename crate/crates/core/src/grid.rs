//! Uniform 1D grids, complex fields sampled on them, fourth-order finite
//! differences and composite Simpson quadrature.

use std::ops::{Add, Mul, Range, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest grid the stencils and Simpson weights are defined on.
pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
}

impl SpatialGrid {
    /// Builds the grid `x_k = x_min + k dx`, `dx = (x_max - x_min) / (n_points - 1)`.
    ///
    /// `n_points - 1` must be even so Simpson's rule covers the full grid.
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::config(format!(
                "empty domain [{x_min}, {x_max}]"
            )));
        }
        if n_points < MIN_POINTS {
            return Err(Error::config(format!(
                "n_points = {n_points} is below the minimum of {MIN_POINTS}"
            )));
        }
        if !(n_points - 1).is_multiple_of(2) {
            return Err(Error::config(format!(
                "n_points = {n_points} must be odd (n_points - 1 even)"
            )));
        }
        let dx = (x_max - x_min) / (n_points - 1) as f64;
        Ok(SpatialGrid {
            x_min,
            x_max,
            n_points,
            dx,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.x(k))
    }

    /// Index of the grid point closest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let k = ((x - self.x_min) / self.dx).round();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.n_points - 1)
        }
    }

    /// Index range covering `[center - half_width, center + half_width]` with an odd
    /// number of points, suitable for [`simpson`].
    ///
    /// Fails when the interval does not fit inside the grid.
    pub fn window(&self, center: f64, half_width: f64) -> Result<Range<usize>> {
        let lo = center - half_width;
        let hi = center + half_width;
        if !(lo.is_finite() && hi.is_finite()) || lo < self.x_min || hi > self.x_max {
            return Err(Error::range(format!(
                "window [{lo:.6}, {hi:.6}] leaves the grid [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        let first = ((lo - self.x_min) / self.dx).ceil() as usize;
        let mut last = (((hi - self.x_min) / self.dx).floor() as usize).min(self.n_points - 1);
        if !(last - first).is_multiple_of(2) {
            last -= 1;
        }
        if last < first + 2 {
            return Err(Error::range(format!(
                "window of half-width {half_width} is narrower than two grid cells"
            )));
        }
        Ok(first..last + 1)
    }
}

/// Complex samples `u(x_k)`, one per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: SpatialGrid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config(format!(
                "field has {} samples but the grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        ComplexField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        ComplexField { grid, values }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// First derivative of `f`, fourth order everywhere.
pub fn derivative1(f: &ComplexField) -> ComplexField {
    let mut out = vec![Complex64::new(0.0, 0.0); f.values.len()];
    d1_into(&f.values, f.grid.dx, &mut out);
    ComplexField {
        grid: f.grid,
        values: out,
    }
}

/// Second derivative of `f`, fourth order everywhere.
pub fn derivative2(f: &ComplexField) -> ComplexField {
    let mut out = vec![Complex64::new(0.0, 0.0); f.values.len()];
    d2_into(&f.values, f.grid.dx, &mut out);
    ComplexField {
        grid: f.grid,
        values: out,
    }
}

/// Composite Simpson integral of real samples over the whole grid.
pub fn integrate(samples: &[f64], grid: &SpatialGrid) -> f64 {
    assert_eq!(samples.len(), grid.len(), "samples do not match the grid");
    simpson(samples, grid.dx)
}

/// Composite Simpson rule on uniformly spaced samples; `samples.len()` must be odd and ≥ 3.
pub fn simpson(samples: &[f64], dx: f64) -> f64 {
    let n = samples.len();
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd number (>= 3) of samples, got {n}");
    let mut odd = 0.0;
    let mut even = 0.0;
    for (k, &s) in samples.iter().enumerate().take(n - 1).skip(1) {
        if k % 2 == 1 {
            odd += s;
        } else {
            even += s;
        }
    }
    dx / 3.0 * (samples[0] + samples[n - 1] + 4.0 * odd + 2.0 * even)
}

/// Simpson integral of `f(x_k)` over the index range `range` of `grid`.
pub fn simpson_window(grid: &SpatialGrid, range: Range<usize>, f: impl Fn(f64) -> f64) -> f64 {
    let n = range.len();
    debug_assert!(n >= 3 && n % 2 == 1);
    let mut odd = 0.0;
    let mut even = 0.0;
    for (j, k) in range.clone().enumerate().skip(1).take(n - 2) {
        let v = f(grid.x(k));
        if j % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    let ends = f(grid.x(range.start)) + f(grid.x(range.end - 1));
    grid.dx / 3.0 * (ends + 4.0 * odd + 2.0 * even)
}

/// Fourth-order first-derivative stencils: centered in the interior, one-sided at
/// the two points next to each edge.
pub fn d1_into<T>(f: &[T], dx: f64, out: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    assert!(n >= 5 && out.len() == n);
    let s = 1.0 / (12.0 * dx);
    out[0] = (f[1] * 48.0 - f[0] * 25.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) * s;
    out[1] = (f[2] * 18.0 - f[0] * 3.0 - f[1] * 10.0 - f[3] * 6.0 + f[4]) * s;
    for i in 2..n - 2 {
        out[i] = ((f[i + 1] - f[i - 1]) * 8.0 - (f[i + 2] - f[i - 2])) * s;
    }
    let m = n - 1;
    out[m] = (f[m] * 25.0 - f[m - 1] * 48.0 + f[m - 2] * 36.0 - f[m - 3] * 16.0 + f[m - 4] * 3.0) * s;
    out[m - 1] =
        (f[m] * 3.0 + f[m - 1] * 10.0 - f[m - 2] * 18.0 + f[m - 3] * 6.0 - f[m - 4]) * s;
}

/// Fourth-order second-derivative stencils; six-point one-sided rows at the edges.
pub fn d2_into<T>(f: &[T], dx: f64, out: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    assert!(n >= 6 && out.len() == n);
    let s = 1.0 / (12.0 * dx * dx);
    out[0] = (f[0] * 45.0 - f[1] * 154.0 + f[2] * 214.0 - f[3] * 156.0 + f[4] * 61.0
        - f[5] * 10.0)
        * s;
    out[1] = (f[0] * 10.0 - f[1] * 15.0 - f[2] * 4.0 + f[3] * 14.0 - f[4] * 6.0 + f[5]) * s;
    for i in 2..n - 2 {
        out[i] = ((f[i + 1] + f[i - 1]) * 16.0 - (f[i + 2] + f[i - 2]) - f[i] * 30.0) * s;
    }
    let m = n - 1;
    out[m] = (f[m] * 45.0 - f[m - 1] * 154.0 + f[m - 2] * 214.0 - f[m - 3] * 156.0
        + f[m - 4] * 61.0
        - f[m - 5] * 10.0)
        * s;
    out[m - 1] = (f[m] * 10.0 - f[m - 1] * 15.0 - f[m - 2] * 4.0 + f[m - 3] * 14.0
        - f[m - 4] * 6.0
        + f[m - 5])
        * s;
}
