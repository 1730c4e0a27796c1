//! Uniform (u, v) grids. Index `i` runs along u (rows), `j` along v (columns).

use crate::error::{GeomError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid2<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid2<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Grid2 { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Grid2 { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(GeomError::Format(format!(
                "expected {} values for a {rows}x{cols} grid, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Grid2 { rows, cols, data })
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Grid2<U> {
        Grid2 { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Column `j` as a vector along u.
    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.data[i * self.cols + j].clone()).collect()
    }
}

impl<T> Grid2<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn same_shape<U>(&self, other: &Grid2<U>) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }
}

impl Grid2<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max |a − b| over nodes at least `margin` away from every edge.
    pub fn max_abs_diff(&self, other: &Grid2<f64>, margin: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in margin..self.rows.saturating_sub(margin) {
            for j in margin..self.cols.saturating_sub(margin) {
                let d = (self.get(i, j) - other.get(i, j)).abs();
                worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
            }
        }
        worst
    }
}

/// Node layout of a uniform rectangular grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub u0: f64,
    pub v0: f64,
    pub du: f64,
    pub dv: f64,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize, u0: f64, v0: f64, du: f64, dv: f64) -> Result<Self> {
        let s = GridSpec { rows, cols, u0, v0, du, dv };
        s.validate()?;
        Ok(s)
    }

    /// `rows × cols` nodes spanning [u0, u0+lu] × [v0, v0+lv].
    pub fn spanning(rows: usize, cols: usize, u0: f64, v0: f64, lu: f64, lv: f64) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(GeomError::param("grid needs at least 2 nodes per direction"));
        }
        GridSpec::new(rows, cols, u0, v0, lu / (rows - 1) as f64, lv / (cols - 1) as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.du > 0.0 && self.dv > 0.0) || !self.du.is_finite() || !self.dv.is_finite() {
            return Err(GeomError::param("grid spacings must be positive"));
        }
        if !self.u0.is_finite() || !self.v0.is_finite() {
            return Err(GeomError::param("grid origin must be finite"));
        }
        if self.rows < 3 || self.cols < 3 {
            return Err(GeomError::param("grid must be at least 3x3"));
        }
        Ok(())
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u0 + self.du * i as f64
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v0 + self.dv * j as f64
    }
}
