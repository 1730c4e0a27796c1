use std::sync::Arc;

use crate::classes::{NaturalPdeDescriptor, Operator};
use crate::error::{GeomError, Result};
use crate::grid::{Grid2, GridSpec};

use super::{SolveReport, LAMBDA_CAP};

/// How the two boundary columns j = 0 and j = cols−1 are filled.
#[derive(Clone)]
pub enum BoundaryRule {
    /// Linear extrapolation from the two neighbouring interior columns.
    Extrapolate,
    /// λ(u, v) supplied by the caller.
    Prescribed(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for BoundaryRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryRule::Extrapolate => write!(f, "Extrapolate"),
            BoundaryRule::Prescribed(_) => write!(f, "Prescribed"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HyperbolicOptions {
    pub cap: f64,
    pub boundary: BoundaryRule,
}

impl Default for HyperbolicOptions {
    fn default() -> Self {
        HyperbolicOptions { cap: LAMBDA_CAP, boundary: BoundaryRule::Extrapolate }
    }
}

/// Leapfrog march in u for Δ̄(λ) = R or Δ*(w) = R from Cauchy data on u = u₀.
///
/// The scheme works on w = T(λ): w⁺ = 2w − w⁻ + du²·(c·D_vv S(w) + R), with
/// S(w) = w, c = 1 for Δ̄ and S(w) = 1/w, c = −1 for Δ*. The first step uses
/// the Taylor expansion with the initial u-derivative.
pub fn solve_hyperbolic(
    desc: &NaturalPdeDescriptor,
    init_lambda: &[f64],
    init_lambda_u: &[f64],
    spec: &GridSpec,
    opts: &HyperbolicOptions,
) -> Result<(Grid2<f64>, SolveReport)> {
    spec.validate()?;
    if !desc.operator.is_hyperbolic() {
        return Err(GeomError::pre(format!(
            "operator {} is elliptic; use the relaxation solver",
            desc.operator.symbol()
        )));
    }
    let n = spec.cols;
    if init_lambda.len() != n || init_lambda_u.len() != n {
        return Err(GeomError::pre("initial line data must have one value per column"));
    }
    if init_lambda.iter().chain(init_lambda_u).any(|x| !x.is_finite()) {
        return Err(GeomError::pre("initial data must be finite"));
    }
    let t = desc.transform;
    let reciprocal = desc.operator == Operator::Star;
    if !reciprocal && spec.du > spec.dv * (1.0 + 1e-12) {
        return Err(GeomError::pre(format!("CFL violated: du={} > dv={}", spec.du, spec.dv)));
    }
    let (du, dv) = (spec.du, spec.dv);
    let r = (du * du) / (dv * dv);
    let c = if reciprocal { -1.0 } else { 1.0 };

    let to_w = |l: f64| t.w(l);
    let mut w_prev: Vec<f64> = init_lambda.iter().map(|l| to_w(*l)).collect();
    let w_u: Vec<f64> = init_lambda
        .iter()
        .zip(init_lambda_u)
        .map(|(l, lu)| t.jet(*l).1 * lu)
        .collect();

    let check_row = |w: &[f64], i: usize| -> Result<Vec<f64>> {
        let mut lam = Vec::with_capacity(w.len());
        for (j, &x) in w.iter().enumerate() {
            if !t.admissible_w(x) {
                return Err(GeomError::num(format!(
                    "dependent variable left its admissible range at node ({i},{j}) (w={x})"
                )));
            }
            let l = t.lambda_of_w(x);
            if !(l.abs() <= opts.cap) {
                return Err(GeomError::num(format!(
                    "blow-up: |lambda| exceeds cap {} at node ({i},{j}) (u={})",
                    opts.cap,
                    spec.u(i)
                )));
            }
            lam.push(l);
        }
        if reciprocal {
            let wmin = w.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
            if du > wmin * dv * (1.0 + 1e-12) {
                return Err(GeomError::num(format!(
                    "CFL violated at row {i}: du={du} > min(w)*dv={}",
                    wmin * dv
                )));
            }
        }
        Ok(lam)
    };
    let accel = |w: &[f64], lam: &[f64], j: usize| -> f64 {
        let s = |k: usize| if reciprocal { 1.0 / w[k] } else { w[k] };
        c * r * (s(j + 1) - 2.0 * s(j) + s(j - 1)) + du * du * desc.rhs.eval(lam[j])
    };
    let fill_boundary = |w: &mut [f64], i: usize| match &opts.boundary {
        BoundaryRule::Extrapolate => {
            w[0] = 2.0 * w[1] - w[2];
            w[n - 1] = 2.0 * w[n - 2] - w[n - 3];
        }
        BoundaryRule::Prescribed(bc) => {
            let u = spec.u(i);
            w[0] = to_w(bc(u, spec.v(0)));
            w[n - 1] = to_w(bc(u, spec.v(n - 1)));
        }
    };

    let mut out = Grid2::filled(spec.rows, n, 0.0);
    let mut report = SolveReport {
        boundary_extrapolated: matches!(opts.boundary, BoundaryRule::Extrapolate),
        ..SolveReport::default()
    };
    let lam0 = check_row(&w_prev, 0)?;
    out.row_mut(0).copy_from_slice(&lam0);

    let mut w_cur = vec![0.0; n];
    for j in 1..n - 1 {
        w_cur[j] = w_prev[j] + du * w_u[j] + 0.5 * accel(&w_prev, &lam0, j);
    }
    fill_boundary(&mut w_cur, 1);
    let mut lam_cur = check_row(&w_cur, 1)?;
    out.row_mut(1).copy_from_slice(&lam_cur);

    let energy_on = desc.operator == Operator::Wave;
    for i in 1..spec.rows - 1 {
        let mut w_next = vec![0.0; n];
        for j in 1..n - 1 {
            w_next[j] = 2.0 * w_cur[j] - w_prev[j] + accel(&w_cur, &lam_cur, j);
        }
        fill_boundary(&mut w_next, i + 1);
        let lam_next = check_row(&w_next, i + 1)?;
        if energy_on {
            report.energy.push(wave_energy(desc, &w_prev, &w_cur, &w_next, du, dv));
        }
        out.row_mut(i + 1).copy_from_slice(&lam_next);
        w_prev = std::mem::replace(&mut w_cur, w_next);
        lam_cur = lam_next;
        report.iterations += 1;
    }
    report.iterations += 1;
    Ok((out, report))
}

/// ∫ ½λ_u² + ½λ_v² − Φ(λ) dv with Φ′ = R, Φ(0) = 0, at the middle row.
fn wave_energy(desc: &NaturalPdeDescriptor, prev: &[f64], cur: &[f64], next: &[f64], du: f64, dv: f64) -> f64 {
    let n = cur.len();
    let phi = |l: f64| {
        // Simpson on [0, λ] with 16 panels.
        let m = 16;
        let h = l / m as f64;
        let mut s = desc.rhs.eval(0.0) + desc.rhs.eval(l);
        for k in 1..m {
            s += desc.rhs.eval(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let mut e = 0.0;
    for j in 1..n - 1 {
        let lu = (next[j] - prev[j]) / (2.0 * du);
        let lv = (cur[j + 1] - cur[j - 1]) / (2.0 * dv);
        e += (0.5 * lu * lu + 0.5 * lv * lv - phi(cur[j])) * dv;
    }
    e
}
