use crate::classes::NaturalPdeDescriptor;
use crate::error::{GeomError, Result};
use crate::grid::{Grid2, GridSpec};

use super::SolveReport;

#[derive(Debug, Clone)]
pub struct EllipticOptions {
    pub omega: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Extra source s: the solver targets δ(T(λ)) = R(λ) + s.
    pub source: Option<Grid2<f64>>,
}

impl Default for EllipticOptions {
    fn default() -> Self {
        EllipticOptions { omega: 1.9, tol: 1e-10, max_iter: 200_000, source: None }
    }
}

/// SOR factor for the model Poisson problem on this grid.
pub fn optimal_omega(spec: &GridSpec) -> f64 {
    let n = spec.rows.max(spec.cols) as f64;
    2.0 / (1.0 + (std::f64::consts::PI / n).sin())
}

/// Grid whose edges hold λ from `boundary` and whose interior holds `guess`.
pub fn dirichlet_grid(spec: &GridSpec, boundary: impl Fn(f64, f64) -> f64, guess: f64) -> Grid2<f64> {
    Grid2::from_fn(spec.rows, spec.cols, |i, j| {
        if i == 0 || j == 0 || i == spec.rows - 1 || j == spec.cols - 1 {
            boundary(spec.u(i), spec.v(j))
        } else {
            guess
        }
    })
}

/// Red-black nonlinear SOR for Δ(λ) = R or Δ̄*(w) = R with Dirichlet data.
///
/// `initial` carries the boundary values on its edges and the starting
/// guess inside. Each node takes one damped Newton step on its own equation.
pub fn solve_elliptic(
    desc: &NaturalPdeDescriptor,
    initial: &Grid2<f64>,
    spec: &GridSpec,
    opts: &EllipticOptions,
) -> Result<(Grid2<f64>, SolveReport)> {
    spec.validate()?;
    if desc.operator.is_hyperbolic() {
        return Err(GeomError::pre(format!(
            "operator {} is hyperbolic; use the marching solver",
            desc.operator.symbol()
        )));
    }
    if !(opts.omega >= 1.0 && opts.omega < 2.0) {
        return Err(GeomError::pre(format!("omega={} outside [1, 2)", opts.omega)));
    }
    if initial.rows() != spec.rows || initial.cols() != spec.cols {
        return Err(GeomError::pre("initial grid does not match the spec"));
    }
    if initial.iter().any(|x| !x.is_finite()) {
        return Err(GeomError::pre("boundary data must be finite"));
    }
    if let Some(s) = &opts.source {
        if !s.same_shape(initial) {
            return Err(GeomError::pre("source grid does not match the spec"));
        }
    }
    let t = desc.transform;
    let recip = desc.operator.is_reciprocal();
    let sv = desc.operator.v_sign();
    let (iu2, iv2) = (1.0 / (spec.du * spec.du), 1.0 / (spec.dv * spec.dv));
    let mut w = initial.map(|l| t.w(*l));
    if let Some((k, _)) = w.iter().enumerate().find(|(_, x)| !t.admissible_w(**x)) {
        return Err(GeomError::pre(format!("initial value at flat index {k} outside the transform range")));
    }
    let s_of = |x: f64| if recip { 1.0 / x } else { x };
    let ds_of = |x: f64| if recip { -1.0 / (x * x) } else { 1.0 };
    let (rows, cols) = (spec.rows, spec.cols);
    let mut report = SolveReport::default();
    for it in 0..opts.max_iter {
        let mut biggest: f64 = 0.0;
        for color in 0..2 {
            for i in 1..rows - 1 {
                let start = 1 + (i + 1 + color) % 2;
                for j in (start..cols - 1).step_by(2) {
                    let x = *w.get(i, j);
                    let lam = t.lambda_of_w(x);
                    let src = opts.source.as_ref().map_or(0.0, |s| *s.get(i, j));
                    let wuu = (w.get(i + 1, j) + w.get(i - 1, j) - 2.0 * x) * iu2;
                    let svv = (s_of(*w.get(i, j + 1)) + s_of(*w.get(i, j - 1)) - 2.0 * s_of(x)) * iv2;
                    let f = wuu + sv * svv - desc.rhs.eval(lam) - src;
                    let hstep = 1e-6 * lam.abs().max(1.0);
                    let dr = (desc.rhs.eval(lam + hstep) - desc.rhs.eval(lam - hstep)) / (2.0 * hstep);
                    let dl_dw = 1.0 / t.jet(lam).1;
                    let fp = -2.0 * iu2 - 2.0 * sv * ds_of(x) * iv2 - dr * dl_dw;
                    let step = -opts.omega * f / fp;
                    let nx = x + step;
                    if !t.admissible_w(nx) || !nx.is_finite() {
                        return Err(GeomError::num(format!(
                            "relaxation left the admissible range at node ({i},{j})"
                        )));
                    }
                    w.set(i, j, nx);
                    biggest = biggest.max(step.abs());
                }
            }
        }
        report.iterations = it + 1;
        report.final_update = biggest;
        if biggest < opts.tol {
            return Ok((w.map(|x| t.lambda_of_w(*x)), report));
        }
        if !biggest.is_finite() {
            break;
        }
    }
    Err(GeomError::num(format!(
        "relaxation did not converge in {} iterations (last update {:e})",
        report.iterations, report.final_update
    )))
}
