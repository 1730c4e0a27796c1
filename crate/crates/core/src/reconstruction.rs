//! Bonnet-type reconstruction: invariants from a ν field, frame integration
//! and verification against the recovered geometry.

use crate::classes::WeingartenPair;
use crate::diff::{d_u, d_v, midpoints, Linear};
use crate::error::{GeomError, Result};
use crate::grid::{Grid2, GridSpec};
use crate::invariants::{fundamental_forms, principal_data};
use crate::minkowski::{check_frame, LorentzVec, MovingFrame};
use crate::pde::GridField;

/// Exponent cap on |I|, |J| in the metric factors.
pub const EXP_CAP: f64 = 300.0;

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantFields {
    pub spec: GridSpec,
    pub nu1: Grid2<f64>,
    pub nu2: Grid2<f64>,
    pub gamma1: Grid2<f64>,
    pub gamma2: Grid2<f64>,
    pub e: Grid2<f64>,
    pub g: Grid2<f64>,
}

impl InvariantFields {
    /// E < 0 < G and ν₁ ≠ ν₂ at every node.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.spec.rows {
            for j in 0..self.spec.cols {
                let (e, g) = (*self.e.get(i, j), *self.g.get(i, j));
                if !(e < 0.0 && g > 0.0) {
                    return Err(GeomError::pre(format!("metric signature violated at node ({i},{j})")));
                }
                if self.nu1.get(i, j) == self.nu2.get(i, j) {
                    return Err(GeomError::pre(format!(
                        "nu1 = nu2 at node ({i},{j}); umbilic points are excluded"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Constant invariants: a patch with fixed ν₁, ν₂, γ₁ = γ₂ = 0.
    pub fn constant(spec: GridSpec, nu1: f64, nu2: f64, e: f64, g: f64) -> Self {
        let c = |x: f64| Grid2::filled(spec.rows, spec.cols, x);
        InvariantFields { spec, nu1: c(nu1), nu2: c(nu2), gamma1: c(0.0), gamma2: c(0.0), e: c(e), g: c(g) }
    }
}

fn exp_capped(x: f64) -> Result<f64> {
    if !(x.abs() <= EXP_CAP) {
        return Err(GeomError::num(format!("exponent {x} beyond cap {EXP_CAP}")));
    }
    Ok(x.exp())
}

/// E = −𝔞⁻²e^{−2I(ν)}, G = 𝔟⁻²e^{−2J(ν)}.
pub fn metric_from_nu(pair: &WeingartenPair, field: &GridField) -> Result<(Grid2<f64>, Grid2<f64>)> {
    field.check_against(pair)?;
    let pot = pair.potentials();
    let (a2, b2) = (field.a_const * field.a_const, field.b_const * field.b_const);
    let (rows, cols) = (field.rows(), field.cols());
    let mut e = Grid2::filled(rows, cols, 0.0);
    let mut g = Grid2::filled(rows, cols, 0.0);
    for i in 0..rows {
        for j in 0..cols {
            let (ii, jj) = pot.eval(*field.values.get(i, j))?;
            e.set(i, j, -exp_capped(-2.0 * ii)? / a2);
            g.set(i, j, exp_capped(-2.0 * jj)? / b2);
        }
    }
    Ok((e, g))
}

/// Which of the two equivalent formulas to use for γ₁, γ₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaForm {
    /// γ₁ = −𝔟e^J I_v, γ₂ = 𝔞e^I J_u.
    Potentials,
    /// γ₁ = e^J(−𝔟f′/(f−g))ν_v, γ₂ = e^I(−𝔞g′/(f−g))ν_u.
    Explicit,
}

pub fn invariants_from_nu(pair: &WeingartenPair, field: &GridField) -> Result<InvariantFields> {
    invariants_from_nu_with(pair, field, GammaForm::Potentials)
}

/// ν derivatives use second-order differences (one-sided on edges).
pub fn invariants_from_nu_with(
    pair: &WeingartenPair,
    field: &GridField,
    form: GammaForm,
) -> Result<InvariantFields> {
    let (e, g) = metric_from_nu(pair, field)?;
    let pot = pair.potentials();
    let spec = field.spec();
    let nu_u = d_u(&field.values, spec.du, 1, 2);
    let nu_v = d_v(&field.values, spec.dv, 1, 2);
    let (a, b) = (field.a_const.abs(), field.b_const.abs());
    let (rows, cols) = (spec.rows, spec.cols);
    let mut out = InvariantFields {
        spec,
        nu1: Grid2::filled(rows, cols, 0.0),
        nu2: Grid2::filled(rows, cols, 0.0),
        gamma1: Grid2::filled(rows, cols, 0.0),
        gamma2: Grid2::filled(rows, cols, 0.0),
        e,
        g,
    };
    for i in 0..rows {
        for j in 0..cols {
            let nu = *field.values.get(i, j);
            let p = pair.jet(nu);
            let (ii, jj) = pot.eval(nu)?;
            let (nv, nu_) = (*nu_v.get(i, j), *nu_u.get(i, j));
            let (g1, g2) = match form {
                GammaForm::Potentials => (-b * jj.exp() * p.di() * nv, a * ii.exp() * p.dj() * nu_),
                GammaForm::Explicit => (
                    jj.exp() * (-b * p.f1 / (p.f - p.g)) * nv,
                    ii.exp() * (-a * p.g1 / (p.f - p.g)) * nu_,
                ),
            };
            out.nu1.set(i, j, p.f);
            out.nu2.set(i, j, p.g);
            out.gamma1.set(i, j, g1);
            out.gamma2.set(i, j, g2);
        }
    }
    out.validate()?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrder {
    /// Along v on the seed row, then along u on every column (the construction).
    VThenU,
    /// Along u on the seed column, then along v on every row (diagnostic).
    UThenV,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub z: LorentzVec,
    pub frame: MovingFrame,
    pub node: (usize, usize),
}

impl Default for Seed {
    fn default() -> Self {
        Seed { z: LorentzVec::ZERO, frame: MovingFrame::STANDARD, node: (0, 0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub order: PathOrder,
    /// Frames are re-orthonormalized only past this drift.
    pub drift_budget: f64,
    pub abort_drift: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions { order: PathOrder::VThenU, drift_budget: 1e-8, abort_drift: 1e-3 }
    }
}

/// Nodes failing the sign conditions (ν₁−ν₂)γ₁(ν₁)_v < 0, (ν₁−ν₂)γ₂(ν₂)_u < 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignDiagnostics {
    pub violating: usize,
    /// (i_min, i_max, j_min, j_max) of the violating nodes.
    pub region: Option<(usize, usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePatch {
    pub spec: GridSpec,
    pub z: Grid2<LorentzVec>,
    pub frames: Grid2<MovingFrame>,
    pub fields: InvariantFields,
    pub renormalizations: usize,
    /// Largest frame deviation seen before any re-normalization.
    pub max_drift: f64,
    pub signs: SignDiagnostics,
}

impl SurfacePatch {
    pub fn corner(&self) -> LorentzVec {
        *self.z.get(self.spec.rows - 1, self.spec.cols - 1)
    }

    pub fn max_frame_deviation(&self) -> f64 {
        self.frames.iter().map(|f| check_frame(f).max_deviation()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct State {
    z: LorentzVec,
    x: LorentzVec,
    y: LorentzVec,
    l: LorentzVec,
}

impl Linear for State {
    fn zero() -> Self {
        State { z: LorentzVec::ZERO, x: LorentzVec::ZERO, y: LorentzVec::ZERO, l: LorentzVec::ZERO }
    }
    fn axpy(self, w: f64, o: Self) -> Self {
        State { z: self.z + w * o.z, x: self.x + w * o.x, y: self.y + w * o.y, l: self.l + w * o.l }
    }
}

/// (metric factor, factor·γ, factor·ν) along one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Coef(f64, f64, f64);

impl Linear for Coef {
    fn zero() -> Self {
        Coef(0.0, 0.0, 0.0)
    }
    fn axpy(self, w: f64, o: Self) -> Self {
        Coef(self.0 + w * o.0, self.1 + w * o.1, self.2 + w * o.2)
    }
}

/// z_u = sX, X_u = s(γ₁Y − ν₁l), Y_u = sγ₁X, l_u = −sν₁X.
fn rhs_u(c: Coef, y: &State) -> State {
    State { z: c.0 * y.x, x: c.1 * y.y + (-c.2) * y.l, y: c.1 * y.x, l: (-c.2) * y.x }
}

/// z_v = tY, X_v = −tγ₂Y, Y_v = −tγ₂X + tν₂l, l_v = −tν₂Y.
fn rhs_v(c: Coef, y: &State) -> State {
    State { z: c.0 * y.y, x: (-c.1) * y.y, y: (-c.1) * y.x + c.2 * y.l, l: (-c.2) * y.y }
}

fn rk4(f: fn(Coef, &State) -> State, y: &State, h: f64, c0: Coef, cm: Coef, c1: Coef) -> State {
    let k1 = f(c0, y);
    let k2 = f(cm, &y.axpy(0.5 * h, k1));
    let k3 = f(cm, &y.axpy(0.5 * h, k2));
    let k4 = f(c1, &y.axpy(h, k3));
    y.axpy(h / 6.0, k1).axpy(h / 3.0, k2).axpy(h / 3.0, k3).axpy(h / 6.0, k4)
}

struct Integrator {
    opts: IntegrationOptions,
    renorm: usize,
    max_drift: f64,
}

impl Integrator {
    fn guard(&mut self, s: State, at: (usize, usize)) -> Result<State> {
        let frame = MovingFrame::new(s.x, s.y, s.l);
        if !frame.is_finite() || !s.z.is_finite() {
            return Err(GeomError::num(format!("non-finite state at node {at:?}")));
        }
        let d = check_frame(&frame).max_deviation();
        self.max_drift = self.max_drift.max(d);
        if d > self.opts.abort_drift {
            return Err(GeomError::num(format!("frame drift {d:e} beyond {:e} at node {at:?}", self.opts.abort_drift)));
        }
        if d > self.opts.drift_budget {
            self.renorm += 1;
            let f = frame.renormalized();
            return Ok(State { z: s.z, x: f.x, y: f.y, l: f.l });
        }
        Ok(s)
    }

    /// Integrates a line of coefficients from index `k0` to both ends.
    fn line(
        &mut self,
        f: fn(Coef, &State) -> State,
        coefs: &[Coef],
        h: f64,
        k0: usize,
        start: State,
        node: impl Fn(usize) -> (usize, usize),
    ) -> Result<Vec<State>> {
        let n = coefs.len();
        let mids = midpoints(coefs);
        let mut out = vec![start; n];
        for k in k0..n - 1 {
            let s = rk4(f, &out[k], h, coefs[k], mids[k], coefs[k + 1]);
            out[k + 1] = self.guard(s, node(k + 1))?;
        }
        for k in (1..=k0).rev() {
            let s = rk4(f, &out[k], -h, coefs[k], mids[k - 1], coefs[k - 1]);
            out[k - 1] = self.guard(s, node(k - 1))?;
        }
        Ok(out)
    }
}

/// Integrates the frame system from the seed over the whole grid with RK4.
///
/// Coefficients at half steps come from four-point interpolation along the line.
pub fn integrate_frame(inv: &InvariantFields, seed: &Seed, opts: &IntegrationOptions) -> Result<SurfacePatch> {
    inv.validate()?;
    let seed_report = check_frame(&seed.frame);
    if !seed_report.passes(1e-12) {
        return Err(GeomError::pre(format!(
            "seed frame is not a positive orthonormal frame (deviation {:e})",
            seed_report.max_deviation()
        )));
    }
    let spec = inv.spec;
    let (rows, cols) = (spec.rows, spec.cols);
    let (i0, j0) = seed.node;
    if i0 >= rows || j0 >= cols {
        return Err(GeomError::pre("seed node outside the grid"));
    }
    let cu = Grid2::from_fn(rows, cols, |i, j| {
        let s = (-inv.e.get(i, j)).sqrt();
        Coef(s, s * inv.gamma1.get(i, j), s * inv.nu1.get(i, j))
    });
    let cv = Grid2::from_fn(rows, cols, |i, j| {
        let t = inv.g.get(i, j).sqrt();
        Coef(t, t * inv.gamma2.get(i, j), t * inv.nu2.get(i, j))
    });
    let start = State { z: seed.z, x: seed.frame.x, y: seed.frame.y, l: seed.frame.l };
    let mut it = Integrator { opts: *opts, renorm: 0, max_drift: 0.0 };
    let mut states = Grid2::filled(rows, cols, start);
    match opts.order {
        PathOrder::VThenU => {
            let first = it.line(rhs_v, cv.row(i0), spec.dv, j0, start, |k| (i0, k))?;
            for j in 0..cols {
                let col = cu.column(j);
                let line = it.line(rhs_u, &col, spec.du, i0, first[j], |k| (k, j))?;
                for (i, s) in line.into_iter().enumerate() {
                    states.set(i, j, s);
                }
            }
        }
        PathOrder::UThenV => {
            let col = cu.column(j0);
            let first = it.line(rhs_u, &col, spec.du, i0, start, |k| (k, j0))?;
            for i in 0..rows {
                let line = it.line(rhs_v, cv.row(i), spec.dv, j0, first[i], |k| (i, k))?;
                states.row_mut(i).copy_from_slice(&line);
            }
        }
    }
    Ok(SurfacePatch {
        spec,
        z: states.map(|s| s.z),
        frames: states.map(|s| MovingFrame::new(s.x, s.y, s.l)),
        fields: inv.clone(),
        renormalizations: it.renorm,
        max_drift: it.max_drift,
        signs: sign_diagnostics(inv),
    })
}

fn sign_diagnostics(inv: &InvariantFields) -> SignDiagnostics {
    let spec = inv.spec;
    let n1v = d_v(&inv.nu1, spec.dv, 1, 2);
    let n2u = d_u(&inv.nu2, spec.du, 1, 2);
    let mut d = SignDiagnostics::default();
    for i in 0..spec.rows {
        for j in 0..spec.cols {
            let gap = inv.nu1.get(i, j) - inv.nu2.get(i, j);
            let c1 = gap * inv.gamma1.get(i, j) * n1v.get(i, j);
            let c2 = gap * inv.gamma2.get(i, j) * n2u.get(i, j);
            if !(c1 < 0.0 && c2 < 0.0) {
                d.violating += 1;
                d.region = Some(match d.region {
                    None => (i, i, j, j),
                    Some((a, b, c, e)) => (a.min(i), b.max(i), c.min(j), e.max(j)),
                });
            }
        }
    }
    d
}

/// Max deviations between prescribed and recovered invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    pub nu1: f64,
    pub nu2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// max |F| and |M| (principal net check).
    pub f_mixed: f64,
    pub m_mixed: f64,
    pub margin: usize,
}

impl VerificationReport {
    pub fn max(&self) -> f64 {
        self.nu1.max(self.nu2).max(self.gamma1).max(self.gamma2)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

/// Recovers (ν₁, ν₂, γ₁, γ₂) from positions and compares with the prescription
/// (and with f(ν), g(ν) when a field is supplied), away from a `margin` of edge nodes.
pub fn verify_bonnet(patch: &SurfacePatch, pair: Option<(&WeingartenPair, &GridField)>, margin: usize) -> Result<VerificationReport> {
    let forms = fundamental_forms(&patch.z, &patch.spec)?;
    let rec = principal_data(&forms, &patch.spec, None)?;
    let fields = &patch.fields;
    let mut nu1_ref = fields.nu1.clone();
    let mut nu2_ref = fields.nu2.clone();
    if let Some((p, f)) = pair {
        f.require_nu()?;
        nu1_ref = f.values.map(|n| p.f(*n));
        nu2_ref = f.values.map(|n| p.g(*n));
    }
    Ok(VerificationReport {
        nu1: rec.nu1.max_abs_diff(&nu1_ref, margin),
        nu2: rec.nu2.max_abs_diff(&nu2_ref, margin),
        gamma1: rec.gamma1.max_abs_diff(&fields.gamma1, margin),
        gamma2: rec.gamma2.max_abs_diff(&fields.gamma2, margin),
        f_mixed: forms.f.max_abs_diff(&Grid2::filled(forms.f.rows(), forms.f.cols(), 0.0), margin),
        m_mixed: forms.m.max_abs_diff(&Grid2::filled(forms.m.rows(), forms.m.cols(), 0.0), margin),
        margin,
    })
}

/// max |z_uv-first − z_uv-second| at the far corner for the two path orders.
pub fn two_path_discrepancy(inv: &InvariantFields, seed: &Seed) -> Result<f64> {
    let a = integrate_frame(inv, seed, &IntegrationOptions::default())?;
    let b = integrate_frame(inv, seed, &IntegrationOptions { order: PathOrder::UThenV, ..Default::default() })?;
    Ok((a.corner() - b.corner()).max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_fields_give_cylinder() {
        let spec = GridSpec::spanning(41, 41, 0.0, 0.0, 0.8, 0.8).unwrap();
        let inv = InvariantFields::constant(spec, 1.0, 0.0, -1.0, 1.0);
        let p = integrate_frame(&inv, &Seed::default(), &IntegrationOptions::default()).unwrap();
        // ν₂ = 0: straight lines in v; ν₁ = 1: unit hyperbola in u.
        let z = *p.z.get(40, 0);
        let u: f64 = 0.8;
        assert!((z.x3 - u.sinh()).abs() < 1e-8);
        assert!((z.x2 - (1.0 - u.cosh())).abs() < 1e-8);
        assert!(p.max_frame_deviation() < 1e-8);
    }

    #[test]
    fn umbilic_rejected() {
        let spec = GridSpec::spanning(5, 5, 0.0, 0.0, 1.0, 1.0).unwrap();
        let inv = InvariantFields::constant(spec, 0.5, 0.5, -1.0, 1.0);
        assert!(integrate_frame(&inv, &Seed::default(), &IntegrationOptions::default()).is_err());
    }

    #[test]
    fn bad_seed_rejected() {
        let spec = GridSpec::spanning(5, 5, 0.0, 0.0, 1.0, 1.0).unwrap();
        let inv = InvariantFields::constant(spec, 1.0, 0.0, -1.0, 1.0);
        let seed = Seed { frame: MovingFrame::new(LorentzVec::E1, LorentzVec::E3, LorentzVec::E2), ..Seed::default() };
        assert!(integrate_frame(&inv, &seed, &IntegrationOptions::default()).is_err());
    }
}
