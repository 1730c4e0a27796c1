//! Discrete differential geometry of a sampled patch.

use crate::diff::{d_u, d_v};
use crate::error::{GeomError, Result};
use crate::grid::{Grid2, GridSpec};
use crate::minkowski::LorentzVec;
use crate::pde::ResidualReport;
use crate::reconstruction::InvariantFields;

/// Accuracy order of the position stencils.
pub const POSITION_ACC: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalForms {
    pub e: Grid2<f64>,
    pub f: Grid2<f64>,
    pub g: Grid2<f64>,
    pub l: Grid2<f64>,
    pub m: Grid2<f64>,
    pub n: Grid2<f64>,
    pub normal: Grid2<LorentzVec>,
}

impl FundamentalForms {
    /// Largest EG − F² over the grid; negative on time-like patches.
    pub fn max_discriminant(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for (k, e) in self.e.as_slice().iter().enumerate() {
            let (g, f) = (self.g.as_slice()[k], self.f.as_slice()[k]);
            m = m.max(e * g - f * f);
        }
        m
    }
}

fn check_positions(z: &Grid2<LorentzVec>, spec: &GridSpec) -> Result<()> {
    spec.validate()?;
    if z.rows() != spec.rows || z.cols() != spec.cols {
        return Err(GeomError::pre("position grid does not match the spec"));
    }
    if z.iter().any(|p| !p.is_finite()) {
        return Err(GeomError::pre("positions must be finite"));
    }
    Ok(())
}

/// First and second fundamental forms from positions.
///
/// The normal is cross(z_u, z_v) normalized, so (z_u, z_v, l) is positively
/// oriented when z_u is time-like and z_v space-like.
pub fn fundamental_forms(z: &Grid2<LorentzVec>, spec: &GridSpec) -> Result<FundamentalForms> {
    check_positions(z, spec)?;
    let zu = d_u(z, spec.du, 1, POSITION_ACC);
    let zv = d_v(z, spec.dv, 1, POSITION_ACC);
    let zuu = d_u(z, spec.du, 2, POSITION_ACC);
    let zvv = d_v(z, spec.dv, 2, POSITION_ACC);
    let zuv = d_v(&zu, spec.dv, 1, POSITION_ACC);
    let (rows, cols) = (spec.rows, spec.cols);
    let zero = Grid2::filled(rows, cols, 0.0);
    let mut out = FundamentalForms {
        e: zero.clone(),
        f: zero.clone(),
        g: zero.clone(),
        l: zero.clone(),
        m: zero.clone(),
        n: zero,
        normal: Grid2::filled(rows, cols, LorentzVec::ZERO),
    };
    for i in 0..rows {
        for j in 0..cols {
            let (a, b) = (*zu.get(i, j), *zv.get(i, j));
            let c = a.cross(b);
            let cc = c.dot(c);
            let scale = a.max_abs() * b.max_abs();
            if !(cc > 1e-24 * scale * scale) || scale == 0.0 {
                return Err(GeomError::num(format!("degenerate tangent plane at node ({i},{j})")));
            }
            let nrm = (1.0 / cc.sqrt()) * c;
            out.e.set(i, j, a.dot(a));
            out.f.set(i, j, a.dot(b));
            out.g.set(i, j, b.dot(b));
            out.l.set(i, j, nrm.dot(*zuu.get(i, j)));
            out.m.set(i, j, nrm.dot(*zuv.get(i, j)));
            out.n.set(i, j, nrm.dot(*zvv.get(i, j)));
            out.normal.set(i, j, nrm);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalData {
    pub nu1: Grid2<f64>,
    pub nu2: Grid2<f64>,
    pub gamma1: Grid2<f64>,
    pub gamma2: Grid2<f64>,
}

/// ν₁ = L/E, ν₂ = N/G, γ₁ = E_v/(2E√G), γ₂ = −G_u/(2G√(−E)).
///
/// With `net_tol`, rejects patches whose normalized F or M exceed it.
pub fn principal_data(forms: &FundamentalForms, spec: &GridSpec, net_tol: Option<f64>) -> Result<PrincipalData> {
    let (rows, cols) = (spec.rows, spec.cols);
    for i in 0..rows {
        for j in 0..cols {
            let (e, g) = (*forms.e.get(i, j), *forms.g.get(i, j));
            if !(e < 0.0 && g > 0.0) {
                return Err(GeomError::pre(format!("E<0<G fails at node ({i},{j})")));
            }
            if let Some(t) = net_tol {
                let s = (-e * g).sqrt();
                let fm = (forms.f.get(i, j) / s).abs().max((forms.m.get(i, j) / s.sqrt()).abs());
                if fm > t {
                    return Err(GeomError::pre(format!(
                        "not a principal net at node ({i},{j}): |F|,|M| ~ {fm:e}"
                    )));
                }
            }
        }
    }
    let ev = d_v(&forms.e, spec.dv, 1, POSITION_ACC);
    let gu = d_u(&forms.g, spec.du, 1, POSITION_ACC);
    let at = |grid: &Grid2<f64>, i: usize, j: usize| *grid.get(i, j);
    Ok(PrincipalData {
        nu1: Grid2::from_fn(rows, cols, |i, j| at(&forms.l, i, j) / at(&forms.e, i, j)),
        nu2: Grid2::from_fn(rows, cols, |i, j| at(&forms.n, i, j) / at(&forms.g, i, j)),
        gamma1: Grid2::from_fn(rows, cols, |i, j| {
            at(&ev, i, j) / (2.0 * at(&forms.e, i, j) * at(&forms.g, i, j).sqrt())
        }),
        gamma2: Grid2::from_fn(rows, cols, |i, j| {
            -at(&gu, i, j) / (2.0 * at(&forms.g, i, j) * (-at(&forms.e, i, j)).sqrt())
        }),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureInvariants {
    pub k: Grid2<f64>,
    pub h: Grid2<f64>,
    pub h_prime: Grid2<f64>,
    /// Nodes with H² − K ≤ `UMBILIC_TOL` (umbilic or worse).
    pub flagged: Vec<(usize, usize)>,
}

pub const UMBILIC_TOL: f64 = 1e-14;

/// K = ν₁ν₂, H = (ν₁+ν₂)/2, H′ = |ν₁−ν₂|/2.
pub fn curvature_invariants(nu1: &Grid2<f64>, nu2: &Grid2<f64>) -> Result<CurvatureInvariants> {
    if !nu1.same_shape(nu2) {
        return Err(GeomError::pre("nu1 and nu2 grids differ in shape"));
    }
    let (rows, cols) = (nu1.rows(), nu1.cols());
    let mut out = CurvatureInvariants {
        k: Grid2::filled(rows, cols, 0.0),
        h: Grid2::filled(rows, cols, 0.0),
        h_prime: Grid2::filled(rows, cols, 0.0),
        flagged: Vec::new(),
    };
    for i in 0..rows {
        for j in 0..cols {
            let (a, b) = (*nu1.get(i, j), *nu2.get(i, j));
            let h = 0.5 * (a + b);
            let k = a * b;
            out.k.set(i, j, k);
            out.h.set(i, j, h);
            out.h_prime.set(i, j, 0.5 * (a - b).abs());
            if !(h * h - k > UMBILIC_TOL) {
                out.flagged.push((i, j));
            }
        }
    }
    Ok(out)
}

fn zero_like(g: &Grid2<f64>) -> Grid2<f64> {
    Grid2::filled(g.rows(), g.cols(), 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodazziReport {
    pub first: ResidualReport,
    pub second: ResidualReport,
}

impl CodazziReport {
    pub fn max_abs(&self) -> f64 {
        self.first.max_abs.max(self.second.max_abs)
    }
}

/// γ₁ + (ν₁)_v/(√G(ν₁−ν₂)) and γ₂ + (ν₂)_u/(√(−E)(ν₁−ν₂)), second-order stencils.
pub fn check_codazzi(inv: &InvariantFields, margin: usize) -> Result<CodazziReport> {
    let spec = inv.spec;
    let n1v = d_v(&inv.nu1, spec.dv, 1, 2);
    let n2u = d_u(&inv.nu2, spec.du, 1, 2);
    let mut r1 = zero_like(&inv.nu1);
    let mut r2 = zero_like(&inv.nu1);
    for i in 0..spec.rows {
        for j in 0..spec.cols {
            let gap = inv.nu1.get(i, j) - inv.nu2.get(i, j);
            if gap == 0.0 {
                return Err(GeomError::pre(format!("nu1 = nu2 at node ({i},{j})")));
            }
            let (s, t) = ((-inv.e.get(i, j)).sqrt(), inv.g.get(i, j).sqrt());
            r1.set(i, j, inv.gamma1.get(i, j) + n1v.get(i, j) / (t * gap));
            r2.set(i, j, inv.gamma2.get(i, j) + n2u.get(i, j) / (s * gap));
        }
    }
    Ok(CodazziReport { first: masked(r1, margin), second: masked(r2, margin) })
}

fn masked(mut g: Grid2<f64>, margin: usize) -> ResidualReport {
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            if i < margin || j < margin || i + margin >= g.rows() || j + margin >= g.cols() {
                g.set(i, j, 0.0);
            }
        }
    }
    ResidualReport::from_grid(g, margin)
}

/// (γ₂)_u/√(−E) + (γ₁)_v/√G + γ₁² − γ₂² + ν₁ν₂.
pub fn check_gauss(inv: &InvariantFields, margin: usize) -> Result<ResidualReport> {
    let spec = inv.spec;
    let g2u = d_u(&inv.gamma2, spec.du, 1, 2);
    let g1v = d_v(&inv.gamma1, spec.dv, 1, 2);
    let r = Grid2::from_fn(spec.rows, spec.cols, |i, j| {
        let (s, t) = ((-inv.e.get(i, j)).sqrt(), inv.g.get(i, j).sqrt());
        let (a, b) = (*inv.gamma1.get(i, j), *inv.gamma2.get(i, j));
        g2u.get(i, j) / s + g1v.get(i, j) / t + a * a - b * b + inv.nu1.get(i, j) * inv.nu2.get(i, j)
    });
    Ok(masked(r, margin))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalCriterion {
    pub mean: f64,
    /// max |q − mean| / |mean| with q = √(−EG)(ν₁−ν₂).
    pub relative_spread: f64,
}

pub fn check_natural_criterion(
    e: &Grid2<f64>,
    g: &Grid2<f64>,
    nu1: &Grid2<f64>,
    nu2: &Grid2<f64>,
    margin: usize,
) -> Result<NaturalCriterion> {
    if !(e.same_shape(g) && e.same_shape(nu1) && e.same_shape(nu2)) {
        return Err(GeomError::pre("grids differ in shape"));
    }
    let mut q = Vec::new();
    for i in margin..e.rows().saturating_sub(margin) {
        for j in margin..e.cols().saturating_sub(margin) {
            q.push((-e.get(i, j) * g.get(i, j)).sqrt() * (nu1.get(i, j) - nu2.get(i, j)));
        }
    }
    if q.is_empty() {
        return Err(GeomError::pre("margin leaves no nodes"));
    }
    let mean = q.iter().sum::<f64>() / q.len() as f64;
    let spread = q.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max) / mean.abs();
    Ok(NaturalCriterion { mean, relative_spread: spread })
}

/// Threshold below which ν₂² − γ₂² counts as zero.
pub const KAPPA2_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalLineGeometry {
    pub kappa1_sq: Grid2<f64>,
    pub theta1: Grid2<f64>,
    /// X(θ₁) with θ₁_u from the quotient rule.
    pub tau1: Grid2<f64>,
    /// X(θ₁) from differencing the unwrapped angle along u.
    pub tau1_direct: Grid2<f64>,
    pub eps2: Grid2<i8>,
    pub kappa2_sq: Grid2<Option<f64>>,
    pub tau2: Grid2<Option<f64>>,
}

/// Unwraps jumps larger than π along each u-line.
pub fn unwrap_along_u(theta: &Grid2<f64>) -> Grid2<f64> {
    use std::f64::consts::{PI, TAU};
    let mut out = theta.clone();
    for j in 0..theta.cols() {
        let mut offset = 0.0;
        for i in 1..theta.rows() {
            let d = theta.get(i, j) - theta.get(i - 1, j);
            if d > PI {
                offset -= TAU;
            } else if d < -PI {
                offset += TAU;
            }
            out.set(i, j, theta.get(i, j) + offset);
        }
    }
    out
}

pub fn principal_line_geometry(inv: &InvariantFields) -> Result<PrincipalLineGeometry> {
    let spec = inv.spec;
    let (rows, cols) = (spec.rows, spec.cols);
    let (n1, n2, g1, g2) = (&inv.nu1, &inv.nu2, &inv.gamma1, &inv.gamma2);
    let kappa1_sq = Grid2::from_fn(rows, cols, |i, j| n1.get(i, j).powi(2) + g1.get(i, j).powi(2));
    let theta1 = unwrap_along_u(&Grid2::from_fn(rows, cols, |i, j| g1.get(i, j).atan2(*n1.get(i, j))));
    let n1u = d_u(n1, spec.du, 1, 2);
    let g1u = d_u(g1, spec.du, 1, 2);
    let th_u = d_u(&theta1, spec.du, 1, 2);
    let s = |i: usize, j: usize| (-inv.e.get(i, j)).sqrt();
    let tau1 = Grid2::from_fn(rows, cols, |i, j| {
        let k2 = *kappa1_sq.get(i, j);
        if k2 == 0.0 {
            return 0.0;
        }
        (n1.get(i, j) * g1u.get(i, j) - g1.get(i, j) * n1u.get(i, j)) / k2 / s(i, j)
    });
    let tau1_direct = Grid2::from_fn(rows, cols, |i, j| th_u.get(i, j) / s(i, j));
    let n2v = d_v(n2, spec.dv, 1, 2);
    let g2v = d_v(g2, spec.dv, 1, 2);
    let mut eps2 = Grid2::filled(rows, cols, 0i8);
    let mut kappa2_sq = Grid2::filled(rows, cols, None);
    let mut tau2 = Grid2::filled(rows, cols, None);
    for i in 0..rows {
        for j in 0..cols {
            let (a, b) = (*n2.get(i, j), *g2.get(i, j));
            let d = a * a - b * b;
            if d.abs() <= KAPPA2_TOL {
                continue;
            }
            let e2 = if d > 0.0 { 1i8 } else { -1 };
            let k2 = d.abs();
            eps2.set(i, j, e2);
            kappa2_sq.set(i, j, Some(k2));
            if a != 0.0 {
                // ε₂(ν₂²/κ₂²)(γ₂/ν₂)_v = ε₂(γ₂_v ν₂ − γ₂ ν₂_v)/κ₂².
                let q = (g2v.get(i, j) * a - b * n2v.get(i, j)) / k2;
                tau2.set(i, j, Some(-(e2 as f64) * q / inv.g.get(i, j).sqrt()));
            }
        }
    }
    Ok(PrincipalLineGeometry { kappa1_sq, theta1, tau1, tau1_direct, eps2, kappa2_sq, tau2 })
}

/// max over interior nodes of |l_u + ν₁z_u| and |l_v + ν₂z_v| (component-wise).
pub fn rodrigues_residual(
    z: &Grid2<LorentzVec>,
    spec: &GridSpec,
    forms: &FundamentalForms,
    principal: &PrincipalData,
    margin: usize,
) -> Result<f64> {
    check_positions(z, spec)?;
    let zu = d_u(z, spec.du, 1, POSITION_ACC);
    let zv = d_v(z, spec.dv, 1, POSITION_ACC);
    let lu = d_u(&forms.normal, spec.du, 1, POSITION_ACC);
    let lv = d_v(&forms.normal, spec.dv, 1, POSITION_ACC);
    let mut worst: f64 = 0.0;
    for i in margin..spec.rows.saturating_sub(margin) {
        for j in margin..spec.cols.saturating_sub(margin) {
            let a = *lu.get(i, j) + *principal.nu1.get(i, j) * *zu.get(i, j);
            let b = *lv.get(i, j) + *principal.nu2.get(i, j) * *zv.get(i, j);
            worst = worst.max(a.max_abs()).max(b.max_abs());
        }
    }
    Ok(worst)
}
