use crate::classes::{NaturalPdeDescriptor, PairJet, Potentials, WeingartenPair};
use crate::error::{GeomError, Result};
use crate::grid::{Grid2, GridSpec};

use super::GridField;

/// Per-node residual values with summary norms over interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub rms: f64,
    /// Full-size grid; nodes closer than `margin` to an edge hold 0.
    pub field: Grid2<f64>,
    pub margin: usize,
}

impl ResidualReport {
    /// Builds the report from interior values, summing in row-major order.
    pub fn from_grid(field: Grid2<f64>, margin: usize) -> Self {
        let mut max_abs: f64 = 0.0;
        let mut sum = 0.0;
        let mut n = 0usize;
        for i in margin..field.rows().saturating_sub(margin) {
            for j in margin..field.cols().saturating_sub(margin) {
                let r = *field.get(i, j);
                max_abs = if r.is_nan() { f64::INFINITY } else { max_abs.max(r.abs()) };
                sum += r * r;
                n += 1;
            }
        }
        let rms = if n == 0 { 0.0 } else { (sum / n as f64).sqrt() };
        ResidualReport { max_abs, rms: rms.min(max_abs), field, margin }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        *self.field.get(i, j)
    }
}

/// ν and its first/second partials at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuJet {
    pub nu: f64,
    pub nu_u: f64,
    pub nu_v: f64,
    pub nu_uu: f64,
    pub nu_vv: f64,
}

/// Second-order central differences of ν at an interior node.
pub fn central_jet(g: &Grid2<f64>, du: f64, dv: f64, i: usize, j: usize) -> NuJet {
    let c = *g.get(i, j);
    let (up, um) = (*g.get(i + 1, j), *g.get(i - 1, j));
    let (vp, vm) = (*g.get(i, j + 1), *g.get(i, j - 1));
    NuJet {
        nu: c,
        nu_u: (up - um) / (2.0 * du),
        nu_v: (vp - vm) / (2.0 * dv),
        nu_uu: (up - 2.0 * c + um) / (du * du),
        nu_vv: (vp - 2.0 * c + vm) / (dv * dv),
    }
}

/// The three natural-PDE signatures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Euclidean,
    Spacelike,
    Timelike,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Variant::Euclidean),
            "spacelike" => Ok(Variant::Spacelike),
            "timelike" => Ok(Variant::Timelike),
            _ => Err(GeomError::param(format!("unknown variant '{s}'"))),
        }
    }

    /// (sign of the 𝔟² term, sign of the fg term) in the I, J form.
    fn signs(self) -> (f64, f64) {
        match self {
            Variant::Euclidean => (1.0, -1.0),
            Variant::Spacelike => (1.0, 1.0),
            Variant::Timelike => (-1.0, 1.0),
        }
    }
}

/// fg(f−g) − [𝔞²e^{2I}(g′ν_uu + (g″ − 2g′²/(g−f))ν_u²) + 𝔟²e^{2J}(f′ν_vv + (f″ − 2f′²/(f−g))ν_v²)].
pub fn natural_residual_point(p: &PairJet, i: f64, jv: f64, a: f64, b: f64, n: &NuJet) -> f64 {
    let (f, g) = (p.f, p.g);
    let bu = p.g1 * n.nu_uu + (p.g2 - 2.0 * p.g1 * p.g1 / (g - f)) * n.nu_u * n.nu_u;
    let bv = p.f1 * n.nu_vv + (p.f2 - 2.0 * p.f1 * p.f1 / (f - g)) * n.nu_v * n.nu_v;
    let lhs = a * a * (2.0 * i).exp() * bu + b * b * (2.0 * jv).exp() * bv;
    f * g * (f - g) - lhs
}

/// 𝔞²e^{2I}(J_uu + I_uJ_u − J_u²) ± 𝔟²e^{2J}(I_vv + I_vJ_v − I_v²) ± fg, by chain rule.
pub fn variant_point(v: Variant, p: &PairJet, i: f64, jv: f64, a: f64, b: f64, n: &NuJet) -> f64 {
    let (di, dj, d2i, d2j) = (p.di(), p.dj(), p.d2i(), p.d2j());
    let (iu, ju) = (di * n.nu_u, dj * n.nu_u);
    let (iv, jvv) = (di * n.nu_v, dj * n.nu_v);
    let juu = d2j * n.nu_u * n.nu_u + dj * n.nu_uu;
    let ivv = d2i * n.nu_v * n.nu_v + di * n.nu_vv;
    let pj = juu + iu * ju - ju * ju;
    let pi = ivv + iv * jvv - iv * iv;
    let (sb, sf) = v.signs();
    a * a * (2.0 * i).exp() * pj + sb * b * b * (2.0 * jv).exp() * pi + sf * p.f * p.g
}

fn evaluate(
    pair: &WeingartenPair,
    field: &GridField,
    node: impl Fn(&PairJet, f64, f64, &NuJet) -> f64,
) -> Result<ResidualReport> {
    field.check_against(pair)?;
    if field.rows() < 3 || field.cols() < 3 {
        return Err(GeomError::pre("residuals need at least a 3x3 grid"));
    }
    let pot: Potentials = pair.potentials();
    let g = &field.values;
    let mut out = Grid2::filled(g.rows(), g.cols(), 0.0);
    for i in 1..g.rows() - 1 {
        for j in 1..g.cols() - 1 {
            let n = central_jet(g, field.du, field.dv, i, j);
            let pj = pair.jet(n.nu);
            let (ii, jj) = pot.eval(n.nu)?;
            out.set(i, j, node(&pj, ii, jj, &n));
        }
    }
    Ok(ResidualReport::from_grid(out, 1))
}

/// Residual of the natural PDE in the ν form (RHS − LHS).
pub fn residual_33(pair: &WeingartenPair, field: &GridField) -> Result<ResidualReport> {
    let (a, b) = (field.a_const, field.b_const);
    evaluate(pair, field, |p, i, j, n| natural_residual_point(p, i, j, a, b, n))
}

/// Residual of the natural PDE in the I, J form; equals residual_33/(f−g).
pub fn residual_36(pair: &WeingartenPair, field: &GridField) -> Result<ResidualReport> {
    residual_variant(Variant::Timelike, pair, field)
}

pub fn residual_variant(v: Variant, pair: &WeingartenPair, field: &GridField) -> Result<ResidualReport> {
    let (a, b) = (field.a_const, field.b_const);
    evaluate(pair, field, |p, i, j, n| variant_point(v, p, i, j, a, b, n))
}

/// Discrete class-PDE defect δ(T(λ)) − R(λ), with the stencils applied to w = T(λ).
pub fn class_pde_residual(
    desc: &NaturalPdeDescriptor,
    lambda: &Grid2<f64>,
    spec: &GridSpec,
) -> ResidualReport {
    let w = lambda.map(|l| desc.transform.w(*l));
    let s = if desc.operator.is_reciprocal() { w.map(|x| 1.0 / x) } else { w.clone() };
    let sv = desc.operator.v_sign();
    let mut out = Grid2::filled(w.rows(), w.cols(), 0.0);
    let (h2u, h2v) = (spec.du * spec.du, spec.dv * spec.dv);
    for i in 1..w.rows() - 1 {
        for j in 1..w.cols() - 1 {
            let wuu = (w.get(i + 1, j) - 2.0 * w.get(i, j) + w.get(i - 1, j)) / h2u;
            let svv = (s.get(i, j + 1) - 2.0 * s.get(i, j) + s.get(i, j - 1)) / h2v;
            out.set(i, j, wuu + sv * svv - desc.rhs.eval(*lambda.get(i, j)));
        }
    }
    ResidualReport::from_grid(out, 1)
}
