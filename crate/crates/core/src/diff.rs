//! Finite-difference weights and grid derivative operators.

use crate::grid::Grid2;
use crate::minkowski::LorentzVec;

/// Values that can be combined linearly by a stencil.
pub trait Linear: Copy {
    fn zero() -> Self;
    fn axpy(self, w: f64, x: Self) -> Self;
}

impl Linear for f64 {
    fn zero() -> Self {
        0.0
    }
    fn axpy(self, w: f64, x: Self) -> Self {
        self + w * x
    }
}

impl Linear for LorentzVec {
    fn zero() -> Self {
        LorentzVec::ZERO
    }
    fn axpy(self, w: f64, x: Self) -> Self {
        self + w * x
    }
}

/// Fornberg's recursion: weights `w[k][j]` so that Σ_j w[k][j] f(xs[j])
/// approximates the k-th derivative at `x0`, for k = 0..=m.
pub fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
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

/// Stencil (start index, weights) for derivative `deriv` at node `i` of a
/// line with `n` nodes and spacing `h`, formally of order `acc`.
///
/// Interior nodes get the centred stencil; nodes near an edge get a shifted
/// one of `acc + deriv` points. Lines shorter than that fall back to all nodes.
pub fn stencil(i: usize, n: usize, h: f64, deriv: usize, acc: usize) -> (usize, Vec<f64>) {
    let half = (acc + deriv - 1) / 2;
    let (start, len) = if i >= half && i + half < n {
        (i - half, 2 * half + 1)
    } else {
        let len = (acc + deriv).min(n);
        let start = (i as isize - half as isize).clamp(0, (n - len) as isize) as usize;
        (start, len)
    };
    let xs: Vec<f64> = (0..len).map(|k| (start + k) as f64).collect();
    let w = fornberg(i as f64, &xs, deriv);
    let scale = h.powi(deriv as i32);
    (start, w[deriv].iter().map(|x| x / scale).collect())
}

/// Cached stencils for every node of a line.
pub struct LineOperator {
    stencils: Vec<(usize, Vec<f64>)>,
}

impl LineOperator {
    pub fn new(n: usize, h: f64, deriv: usize, acc: usize) -> Self {
        LineOperator { stencils: (0..n).map(|i| stencil(i, n, h, deriv, acc)).collect() }
    }

    pub fn apply_at<T: Linear>(&self, i: usize, sample: impl Fn(usize) -> T) -> T {
        let (start, w) = &self.stencils[i];
        w.iter().enumerate().fold(T::zero(), |acc, (k, wk)| acc.axpy(*wk, sample(start + k)))
    }
}

/// ∂^deriv/∂u^deriv of a grid field (along rows index i).
pub fn d_u<T: Linear>(g: &Grid2<T>, du: f64, deriv: usize, acc: usize) -> Grid2<T> {
    let op = LineOperator::new(g.rows(), du, deriv, acc);
    Grid2::from_fn(g.rows(), g.cols(), |i, j| op.apply_at(i, |k| *g.get(k, j)))
}

/// ∂^deriv/∂v^deriv of a grid field (along column index j).
pub fn d_v<T: Linear>(g: &Grid2<T>, dv: f64, deriv: usize, acc: usize) -> Grid2<T> {
    let op = LineOperator::new(g.cols(), dv, deriv, acc);
    Grid2::from_fn(g.rows(), g.cols(), |i, j| op.apply_at(j, |k| *g.get(i, k)))
}

/// Value halfway between consecutive samples by four-point Lagrange
/// interpolation (shifted at the ends). Output has `n − 1` entries.
pub fn midpoints<T: Linear>(vals: &[T]) -> Vec<T> {
    let n = vals.len();
    let lin = |a: T, b: T| T::zero().axpy(0.5, a).axpy(0.5, b);
    if n < 4 {
        return (0..n.saturating_sub(1)).map(|k| lin(vals[k], vals[k + 1])).collect();
    }
    let comb = |w: [f64; 4], s: usize| {
        (0..4).fold(T::zero(), |acc, k| acc.axpy(w[k], vals[s + k]))
    };
    (0..n - 1)
        .map(|k| {
            if k == 0 {
                comb([5.0 / 16.0, 15.0 / 16.0, -5.0 / 16.0, 1.0 / 16.0], 0)
            } else if k == n - 2 {
                comb([1.0 / 16.0, -5.0 / 16.0, 15.0 / 16.0, 5.0 / 16.0], n - 4)
            } else {
                comb([-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0], k - 1)
            }
        })
        .collect()
}
