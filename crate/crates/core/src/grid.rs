use crate::error::{Error, Result};

/// Uniform one-dimensional grid on a closed interval, with composite
/// trapezoid quadrature weights.
///
/// All grid-sampled objects in the crate share this convention, so grid
/// spacing, quadrature weights, and interpolation live in one place.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    lo: f64,
    hi: f64,
    count: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Config("grid endpoints must be finite".into()));
        }
        if lo >= hi {
            return Err(Error::Config(format!(
                "grid requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        if count < 3 {
            return Err(Error::Config(format!(
                "grid requires at least 3 points, got {count}"
            )));
        }
        Ok(Self { lo, hi, count })
    }

    /// Symmetric grid [-half, half] with an odd point count, so that 0 and
    /// the reflection x -> -x land exactly on grid points.
    pub fn symmetric(half: f64, count: usize) -> Result<Self> {
        if count % 2 == 0 {
            return Err(Error::Config(format!(
                "symmetric grid needs an odd point count, got {count}"
            )));
        }
        Self::new(-half, half, count)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Grid spacing.
    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.count);
        self.lo + self.h() * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.point(i))
    }

    /// Composite trapezoid weights: h/2 at the endpoints, h inside.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.h();
        let mut w = vec![h; self.count];
        w[0] = h / 2.0;
        w[self.count - 1] = h / 2.0;
        w
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo - 1e-12 * self.h() && x <= self.hi + 1e-12 * self.h()
    }

    /// Index of the grid point closest to `x`, if `x` is inside the grid.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let i = ((x - self.lo) / self.h()).round() as isize;
        Some(i.clamp(0, self.count as isize - 1) as usize)
    }

    /// Linear interpolation stencil at `x`: (left index, weight of the
    /// right neighbour). `None` when `x` falls outside the grid, which
    /// callers treat as zero extension or skip, depending on context.
    pub fn interp_stencil(&self, x: f64) -> Option<(usize, f64)> {
        if !self.contains(x) {
            return None;
        }
        let t = (x - self.lo) / self.h();
        let mut i = t.floor() as isize;
        if i < 0 {
            i = 0;
        }
        let max_left = self.count as isize - 2;
        if i > max_left {
            i = max_left;
        }
        let frac = (t - i as f64).clamp(0.0, 1.0);
        Some((i as usize, frac))
    }

    /// Linearly interpolate grid samples at `x`, zero outside the grid.
    pub fn interp(&self, values: &[num_complex::Complex64], x: f64) -> num_complex::Complex64 {
        debug_assert_eq!(values.len(), self.count);
        match self.interp_stencil(x) {
            Some((i, t)) => values[i] * (1.0 - t) + values[i + 1] * t,
            None => num_complex::Complex64::new(0.0, 0.0),
        }
    }
}
