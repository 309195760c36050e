//! Uniform real-line grids and complex samples on them.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_DX: f64 = 0.01;
pub const DEFAULT_HALF_SPAN: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub x0: f64,
    pub dx: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(x0: f64, dx: f64, len: usize) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite() && x0.is_finite()) {
            return Err(Error::InvalidParams(format!("bad grid origin/spacing ({x0}, {dx})")));
        }
        if len < 2 {
            return Err(Error::InvalidParams(format!("grid needs at least 2 points, got {len}")));
        }
        Ok(Self { x0, dx, len })
    }

    /// Grid on `[-half_span, half_span]`, mirror-symmetric about the origin.
    pub fn symmetric(half_span: f64, dx: f64) -> Result<Self> {
        if !(half_span > 0.0) {
            return Err(Error::InvalidParams(format!(
                "half span must be positive, got {half_span}"
            )));
        }
        let steps = (2.0 * half_span / dx).round() as usize;
        let dx = 2.0 * half_span / steps as f64;
        Self::new(-half_span, dx, steps + 1)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.x(i))
    }

    pub fn end(&self) -> f64 {
        self.x(self.len - 1)
    }

    pub fn is_symmetric(&self) -> bool {
        (self.x0 + self.end()).abs() <= 1e-9 * self.dx
    }
}

impl Default for UniformGrid {
    fn default() -> Self {
        Self::symmetric(DEFAULT_HALF_SPAN, DEFAULT_DX).expect("default grid is valid")
    }
}

/// Complex samples of a function on a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len {
            return Err(Error::InvalidParams(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain(format!("non-finite sample at x = {}", grid.x(i))));
        }
        Ok(Self { grid, values })
    }

    pub fn sample<F: Fn(f64) -> Complex64>(grid: UniformGrid, f: F) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Max-abs over the grid, skipping `margin` points at each end.
    pub fn interior_max_abs(&self, margin: usize) -> f64 {
        let hi = self.values.len().saturating_sub(margin);
        self.values
            .get(margin..hi)
            .unwrap_or(&[])
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn map<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.grid.x(i), v))
            .collect();
        Self::new(self.grid, values)
    }

    pub fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid, values)
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidParams("functions live on different grids".into()));
        }
        Ok(())
    }

    /// First derivative: fourth-order central differences in the interior,
    /// second-order one-sided at the two boundary cells on each side.
    pub fn derivative(&self) -> Result<Self> {
        let v = &self.values;
        let n = v.len();
        let h = self.grid.dx;
        if n < 5 {
            return Err(Error::InvalidParams("derivative needs at least 5 samples".into()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 2..n - 2 {
            out[i] = (v[i - 2] - v[i - 1] * 8.0 + v[i + 1] * 8.0 - v[i + 2]) / (12.0 * h);
        }
        out[0] = (v[0] * -3.0 + v[1] * 4.0 - v[2]) / (2.0 * h);
        out[1] = (v[2] - v[0]) / (2.0 * h);
        out[n - 2] = (v[n - 1] - v[n - 3]) / (2.0 * h);
        out[n - 1] = (v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) / (2.0 * h);
        Self::new(self.grid, out)
    }
}

/// `(u|v) = int u*(-x) v(x) dx` for samples on a common mirror-symmetric grid
/// (trapezoidal rule).
pub fn pseudo_inner_grid(u: &GridFunction, v: &GridFunction) -> Result<Complex64> {
    u.check_same_grid(v)?;
    if !u.grid.is_symmetric() {
        return Err(Error::InvalidParams(
            "pseudo inner product needs a grid symmetric about 0".into(),
        ));
    }
    let n = u.values.len();
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let term = u.values[n - 1 - i].conj() * v.values[i];
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        sum += term * w;
    }
    Ok(sum * u.grid.dx)
}
