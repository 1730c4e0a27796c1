//! Parallel surfaces z̄ = z + a·l: invariant transformation laws, offset
//! Weingarten pairs and the residual relation for their natural PDEs.

use crate::classes::{Interval, PairKind, WeingartenPair};
use crate::error::{GeomError, Result};
use crate::grid::Grid2;
use crate::minkowski::{det3, LorentzVec, Mat3, Motion, MovingFrame};
use crate::pde::{residual_33, GridField, ResidualReport};
use crate::reconstruction::{InvariantFields, SurfacePatch};

/// |(1−aν₁)(1−aν₂)| below this counts as a singular offset.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelOffset {
    pub a: f64,
    pub eps: f64,
}

impl ParallelOffset {
    pub fn new(a: f64, eps: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(GeomError::param("offset distance must be nonzero and finite"));
        }
        if eps != 1.0 && eps != -1.0 {
            return Err(GeomError::param(format!("eps must be +1 or -1, got {eps}")));
        }
        Ok(ParallelOffset { a, eps })
    }

    /// The offset taking the parallel surface back: its normal is εl, so the distance is −εa.
    pub fn inverse(&self) -> ParallelOffset {
        ParallelOffset { a: -self.eps * self.a, eps: self.eps }
    }
}

fn eps_of(nu1: f64, nu2: f64, a: f64) -> Result<f64> {
    let p = (1.0 - a * nu1) * (1.0 - a * nu2);
    if !(p.abs() > SINGULAR_TOL) {
        return Err(GeomError::pre(format!(
            "singular offset: (1-a nu1)(1-a nu2) = {p:e} for nu1={nu1}, nu2={nu2}, a={a}"
        )));
    }
    Ok(p.signum())
}

/// ν̄ᵢ = ενᵢ/(1−aνᵢ), ε = sign((1−aν₁)(1−aν₂)). Returns (ν̄₁, ν̄₂, ε).
pub fn parallel_curvatures(nu1: f64, nu2: f64, a: f64) -> Result<(f64, f64, f64)> {
    let eps = eps_of(nu1, nu2, a)?;
    Ok((eps * nu1 / (1.0 - a * nu1), eps * nu2 / (1.0 - a * nu2), eps))
}

/// ν = εν̄/(1+aεν̄).
pub fn inverse_parallel_curvatures(nb1: f64, nb2: f64, a: f64, eps: f64) -> Result<(f64, f64)> {
    let (d1, d2) = (1.0 + a * eps * nb1, 1.0 + a * eps * nb2);
    if d1 == 0.0 || d2 == 0.0 {
        return Err(GeomError::pre("inverse parallel map is singular"));
    }
    Ok((eps * nb1 / d1, eps * nb2 / d2))
}

/// (K, H, H′) of the base surface from (K̄, H̄, H̄′) of the parallel one.
#[allow(non_snake_case)]
pub fn parallel_KHH(kb: f64, hb: f64, hpb: f64, a: f64, eps: f64) -> Result<(f64, f64, f64)> {
    let d = 1.0 + 2.0 * a * eps * hb + a * a * kb;
    if !(d.abs() > SINGULAR_TOL) {
        return Err(GeomError::pre(format!("1 + 2a eps H + a^2 K = {d:e} vanishes")));
    }
    Ok((kb / d, (eps * hb + a * kb) / d, eps * hpb / d))
}

/// Walks from `start` toward `end` and returns the first crossing of a
/// sign change of `h`, refined by bisection.
fn first_crossing(h: &impl Fn(f64) -> f64, start: f64, end: f64, steps: usize) -> Option<f64> {
    let s0 = h(start).signum();
    let mut prev = start;
    for k in 1..=steps {
        let x = start + (end - start) * k as f64 / steps as f64;
        let hx = h(x);
        if !hx.is_finite() || hx.signum() != s0 || hx == 0.0 {
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let hm = h(mid);
                if hm.is_finite() && hm.signum() == s0 && hm != 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(hi);
        }
        prev = x;
    }
    None
}

/// f̄ = εf/(1−af), ḡ = εg/(1−ag) on the largest interval around ν₀ where
/// (1−af)(1−ag) keeps its sign.
pub fn parallel_weingarten(pair: &WeingartenPair, a: f64) -> Result<WeingartenPair> {
    let j0 = pair.jet(pair.nu0);
    let eps = eps_of(j0.f, j0.g, a)?;
    let prod = |nu: f64| {
        let j = pair.jet(nu);
        (1.0 - a * j.f) * (1.0 - a * j.g)
    };
    let fin = pair.domain.samples(2);
    let lo_end = if pair.domain.lo.is_finite() { pair.domain.lo } else { fin[0].min(pair.nu0) - 50.0 };
    let hi_end = if pair.domain.hi.is_finite() { pair.domain.hi } else { fin[1].max(pair.nu0) + 50.0 };
    let inner = |end: f64| pair.nu0 + (end - pair.nu0) * (1.0 - 1e-12);
    let hi = first_crossing(&prod, pair.nu0, inner(hi_end), 4000).unwrap_or(pair.domain.hi);
    let lo = first_crossing(&prod, pair.nu0, inner(lo_end), 4000).unwrap_or(pair.domain.lo);
    let domain = Interval::new(lo, hi)?;
    let out = WeingartenPair {
        kind: PairKind::Parallel { base: Box::new(pair.clone()), a, eps },
        domain,
        nu0: pair.nu0,
    };
    out.validate(256)?;
    Ok(out)
}

/// 𝔞̄ = 𝔞/|1−af₀|, 𝔟̄ = 𝔟/|1−ag₀|.
pub fn parallel_constants(pair: &WeingartenPair, a: f64, a_const: f64, b_const: f64) -> (f64, f64) {
    let j0 = pair.jet(pair.nu0);
    (a_const / (1.0 - a * j0.f).abs(), b_const / (1.0 - a * j0.g).abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelPdeReport {
    pub base: ResidualReport,
    pub parallel: ResidualReport,
    /// ε·r/((1−af)(1−ag))², the predicted parallel residual per node.
    pub predicted: Grid2<f64>,
    /// max |r̄ − predicted| / max |predicted| over interior nodes.
    pub identity_rel: f64,
    pub a_bar: f64,
    pub b_bar: f64,
    pub eps: f64,
}

/// Evaluates the natural residual of the parallel pair on the same ν field.
pub fn verify_parallel_pde(pair: &WeingartenPair, field: &GridField, a: f64) -> Result<ParallelPdeReport> {
    let par = parallel_weingarten(pair, a)?;
    for nu in field.values.iter() {
        par.check_sample(*nu).map_err(|_| {
            GeomError::pre(format!("nu={nu} lies beyond a pole of the parallel pair (a={a})"))
        })?;
    }
    let base = residual_33(pair, field)?;
    let (a_bar, b_bar) = parallel_constants(pair, a, field.a_const, field.b_const);
    let mut pf = field.clone();
    pf.a_const = a_bar;
    pf.b_const = b_bar;
    pf.class_tag = par.label();
    let parallel = residual_33(&par, &pf)?;
    let eps = match par.kind {
        PairKind::Parallel { eps, .. } => eps,
        _ => unreachable!(),
    };
    let predicted = Grid2::from_fn(field.rows(), field.cols(), |i, j| {
        let p = pair.jet(*field.values.get(i, j));
        let q = (1.0 - a * p.f) * (1.0 - a * p.g);
        eps * base.at(i, j) / (q * q)
    });
    let m = base.margin;
    let diff = parallel.field.max_abs_diff(&predicted, m);
    let scale = predicted.max_abs_diff(&Grid2::filled(predicted.rows(), predicted.cols(), 0.0), m);
    let identity_rel = if diff == 0.0 { 0.0 } else { diff / scale.max(f64::MIN_POSITIVE) };
    Ok(ParallelPdeReport { base, parallel, predicted, identity_rel, a_bar, b_bar, eps })
}

/// Offsets a patch along its normal; returns the parallel patch and ε.
///
/// Rebuilds the frame as (sign(1−aν₁)X, sign(1−aν₂)Y, εl) and transforms
/// the invariant fields accordingly.
pub fn offset_patch(patch: &SurfacePatch, a: f64) -> Result<(SurfacePatch, ParallelOffset)> {
    if a == 0.0 || !a.is_finite() {
        return Err(GeomError::param("offset distance must be nonzero and finite"));
    }
    let inv = &patch.fields;
    let (rows, cols) = (patch.spec.rows, patch.spec.cols);
    let mut singular = Vec::new();
    let mut signs = Grid2::filled(rows, cols, 0.0);
    for i in 0..rows {
        for j in 0..cols {
            match eps_of(*inv.nu1.get(i, j), *inv.nu2.get(i, j), a) {
                Ok(e) => signs.set(i, j, e),
                Err(_) => singular.push((i, j)),
            }
        }
    }
    if !singular.is_empty() {
        return Err(GeomError::pre(format!(
            "singular offset at {} node(s), first: {:?}",
            singular.len(),
            &singular[..singular.len().min(8)]
        )));
    }
    let eps = *signs.get(0, 0);
    let mixed: Vec<(usize, usize)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .filter(|&(i, j)| *signs.get(i, j) != eps)
        .collect();
    if !mixed.is_empty() {
        return Err(GeomError::pre(format!(
            "eps changes sign across the patch at {} node(s), first: {:?}",
            mixed.len(),
            &mixed[..mixed.len().min(8)]
        )));
    }
    let q1 = inv.nu1.map(|n| 1.0 - a * n);
    let q2 = inv.nu2.map(|n| 1.0 - a * n);
    let at = |g: &Grid2<f64>, i: usize, j: usize| *g.get(i, j);
    let fields = InvariantFields {
        spec: inv.spec,
        nu1: Grid2::from_fn(rows, cols, |i, j| eps * at(&inv.nu1, i, j) / at(&q1, i, j)),
        nu2: Grid2::from_fn(rows, cols, |i, j| eps * at(&inv.nu2, i, j) / at(&q2, i, j)),
        gamma1: Grid2::from_fn(rows, cols, |i, j| {
            at(&inv.gamma1, i, j) * at(&q2, i, j).signum() / at(&q1, i, j)
        }),
        gamma2: Grid2::from_fn(rows, cols, |i, j| {
            at(&inv.gamma2, i, j) * at(&q1, i, j).signum() / at(&q2, i, j)
        }),
        e: Grid2::from_fn(rows, cols, |i, j| at(&q1, i, j).powi(2) * at(&inv.e, i, j)),
        g: Grid2::from_fn(rows, cols, |i, j| at(&q2, i, j).powi(2) * at(&inv.g, i, j)),
    };
    let z = Grid2::from_fn(rows, cols, |i, j| *patch.z.get(i, j) + a * patch.frames.get(i, j).l);
    let frames = Grid2::from_fn(rows, cols, |i, j| {
        let f = patch.frames.get(i, j);
        MovingFrame::new(at(&q1, i, j).signum() * f.x, at(&q2, i, j).signum() * f.y, eps * f.l)
    });
    let out = SurfacePatch {
        spec: patch.spec,
        z,
        frames,
        fields,
        renormalizations: 0,
        max_drift: patch.max_drift,
        signs: patch.signs.clone(),
    };
    Ok((out, ParallelOffset { a, eps }))
}

/// Matrix with columns L·e₁ = y, L·e₂ = l, L·e₃ = x.
fn frame_matrix(f: &MovingFrame) -> Mat3 {
    let (y, l, x) = (f.y.to_array(), f.l.to_array(), f.x.to_array());
    [[y[0], l[0], x[0]], [y[1], l[1], x[1]], [y[2], l[2], x[2]]]
}

fn inverse3(m: &Mat3) -> Option<Mat3> {
    let col = |j: usize| LorentzVec::new(m[0][j], m[1][j], m[2][j]);
    let d = det3(col(0), col(1), col(2));
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, e) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[a][c] * m[b][e] - m[a][e] * m[b][c]) / d;
        }
    }
    Some(inv)
}

fn mul3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// The motion taking (z_src, F_src) to (z_dst, F_dst).
pub fn motion_between_frames(
    z_src: LorentzVec,
    f_src: &MovingFrame,
    z_dst: LorentzVec,
    f_dst: &MovingFrame,
) -> Result<Motion> {
    let inv = inverse3(&frame_matrix(f_src)).ok_or_else(|| GeomError::pre("source frame is singular"))?;
    let l = mul3(&frame_matrix(f_dst), &inv);
    let probe = Motion::new(l, LorentzVec::ZERO, 1e-6)?;
    let t = z_dst - probe.apply_linear(z_src);
    Ok(probe.with_translation(t))
}

/// Least-squares motion mapping `src` anchors onto `dst`, projected onto the
/// Lorentz group by signature-aware Gram–Schmidt. Needs ≥ 4 anchors in general position.
pub fn align_anchors(src: &[LorentzVec], dst: &[LorentzVec]) -> Result<Motion> {
    if src.len() != dst.len() || src.len() < 4 {
        return Err(GeomError::pre("alignment needs at least four matching anchors"));
    }
    let n = src.len() as f64;
    let mean = |p: &[LorentzVec]| (1.0 / n) * p.iter().fold(LorentzVec::ZERO, |acc, x| acc + *x);
    let (cs, cd) = (mean(src), mean(dst));
    // L = (Σ d sᵀ)(Σ s sᵀ)⁻¹ on centred anchors.
    let mut ss = [[0.0; 3]; 3];
    let mut ds = [[0.0; 3]; 3];
    for (s, d) in src.iter().zip(dst) {
        let (s, d) = ((*s - cs).to_array(), (*d - cd).to_array());
        for i in 0..3 {
            for j in 0..3 {
                ss[i][j] += s[i] * s[j];
                ds[i][j] += d[i] * s[j];
            }
        }
    }
    let inv = inverse3(&ss).ok_or_else(|| GeomError::pre("anchors are coplanar"))?;
    let raw = mul3(&ds, &inv);
    let col = |j: usize| LorentzVec::new(raw[0][j], raw[1][j], raw[2][j]);
    let f = MovingFrame::new(col(2), col(0), col(1)).renormalized();
    let l = frame_matrix(&f);
    let m = Motion::new(l, LorentzVec::ZERO, 1e-9)?;
    let t = cd - m.apply_linear(cs);
    Ok(m.with_translation(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::apply_motion;

    #[test]
    fn hand_values() {
        let (a, b, e) = parallel_curvatures(2.0, 1.0, 0.25).unwrap();
        assert_eq!(e, 1.0);
        assert!((a - 4.0).abs() < 1e-15 && (b - 4.0 / 3.0).abs() < 1e-15);
        let (a, b, e) = parallel_curvatures(3.0, 1.0, 0.5).unwrap();
        assert_eq!(e, -1.0);
        assert!((a - 6.0).abs() < 1e-15 && (b + 2.0).abs() < 1e-15);
        assert!(parallel_curvatures(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn inverse_offset() {
        let o = ParallelOffset::new(0.3, -1.0).unwrap();
        assert_eq!(o.inverse().a, 0.3);
        assert!(ParallelOffset::new(0.0, 1.0).is_err());
        assert!(ParallelOffset::new(1.0, 0.5).is_err());
    }

    #[test]
    fn anchors_recover_motion() {
        let m = Motion::boost_13(0.4).compose(&Motion::rotation_12(0.7)).with_translation(LorentzVec::new(1.0, -2.0, 0.5));
        let src = [
            LorentzVec::new(0.0, 0.0, 0.0),
            LorentzVec::new(1.0, 0.2, 0.0),
            LorentzVec::new(0.0, 1.0, 0.3),
            LorentzVec::new(0.1, 0.0, 1.0),
            LorentzVec::new(0.5, 0.5, 0.5),
        ];
        let dst: Vec<_> = src.iter().map(|p| apply_motion(&m, *p)).collect();
        let r = align_anchors(&src, &dst).unwrap();
        for p in src {
            assert!((apply_motion(&r, p) - apply_motion(&m, p)).max_abs() < 1e-12);
        }
    }
}
