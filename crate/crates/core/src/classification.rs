//! Linear relations δK = αH + βH′ + γ, the fractional form
//! ν₁ = (Aν₂+B)/(Cν₂+D), and reduction to the ten basic classes.

use std::fmt::Write as _;

use crate::classes::{make_basic_class, BasicClass, BasicClassId, ClassParams, NaturalPdeDescriptor};
use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl FractionalCoeffs {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        FractionalCoeffs { a, b, c, d }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.a, self.b, self.c, self.d].iter().all(|x| x.is_finite()) {
            return Err(GeomError::param("coefficients must be finite"));
        }
        if self.a == self.d && self.b == 0.0 && self.c == 0.0 {
            return Err(GeomError::param("A = D, B = C = 0 is the excluded umbilic case"));
        }
        if self.b * self.c - self.a * self.d == 0.0 {
            return Err(GeomError::param("BC - AD = 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRelation {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl LinearRelation {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let r = LinearRelation { alpha, beta, gamma, delta };
        r.validate()?;
        Ok(r)
    }

    pub fn new_unchecked(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        LinearRelation { alpha, beta, gamma, delta }
    }

    /// α² − β² + 4γδ, which equals 4(BC − AD).
    pub fn admissibility(&self) -> f64 {
        self.alpha * self.alpha - self.beta * self.beta + 4.0 * self.gamma * self.delta
    }

    pub fn validate(&self) -> Result<()> {
        if !self.as_array().iter().all(|x| x.is_finite()) {
            return Err(GeomError::param("relation coefficients must be finite"));
        }
        if self.alpha == 0.0 && self.gamma == 0.0 && self.delta == 0.0 {
            return Err(GeomError::param("alpha = gamma = delta = 0 is the excluded umbilic case"));
        }
        if self.admissibility() == 0.0 {
            return Err(GeomError::param("alpha^2 - beta^2 + 4 gamma delta = 0"));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    /// δK − αH − βH′ − γ.
    pub fn evaluate(&self, k: f64, h: f64, hp: f64) -> f64 {
        self.delta * k - self.alpha * h - self.beta * hp - self.gamma
    }

    /// Relation satisfied by the homothetic surface with H ↦ sH, K ↦ s²K.
    pub fn scaled(&self, s: f64) -> LinearRelation {
        LinearRelation::new_unchecked(s * self.alpha, s * self.beta, s * s * self.gamma, self.delta)
    }

    /// Distance between the two coefficient rays (0 when proportional).
    pub fn projective_distance(&self, other: &LinearRelation) -> f64 {
        let unit = |r: &LinearRelation| {
            let a = r.as_array();
            let n = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            a.map(|x| x / n)
        };
        let (p, q) = (unit(self), unit(other));
        let minus: f64 = (0..4).map(|i| (p[i] - q[i]).abs()).fold(0.0, f64::max);
        let plus: f64 = (0..4).map(|i| (p[i] + q[i]).abs()).fold(0.0, f64::max);
        minus.min(plus)
    }
}

/// α = A−D, β = −(A+D), γ = B, δ = C.
pub fn coeffs_to_relation(fc: &FractionalCoeffs) -> Result<LinearRelation> {
    fc.validate()?;
    LinearRelation::new(fc.a - fc.d, -(fc.a + fc.d), fc.b, fc.c)
}

/// A = (α−β)/2, D = −(α+β)/2, B = γ, C = δ.
pub fn relation_to_coeffs(rel: &LinearRelation) -> Result<FractionalCoeffs> {
    rel.validate()?;
    let fc = FractionalCoeffs::new(
        (rel.alpha - rel.beta) / 2.0,
        rel.gamma,
        rel.delta,
        -(rel.alpha + rel.beta) / 2.0,
    );
    fc.validate()?;
    Ok(fc)
}

/// Relation satisfied by the parallel surface at distance `a` with sign ε:
/// (δ − aα − a²γ)K̄ = ε(α+2aγ)H̄ + εβH̄′ + γ.
pub fn reduced_relation(rel: &LinearRelation, a: f64, eps: f64) -> LinearRelation {
    LinearRelation::new_unchecked(
        eps * (rel.alpha + 2.0 * a * rel.gamma),
        eps * rel.beta,
        rel.gamma,
        rel.delta - a * rel.alpha - a * a * rel.gamma,
    )
}

/// Both sign branches ε = +1, −1.
pub fn reduced_relation_both(rel: &LinearRelation, a: f64) -> [LinearRelation; 2] {
    [reduced_relation(rel, a, 1.0), reduced_relation(rel, a, -1.0)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub input: LinearRelation,
    pub basic: BasicClassId,
    pub params: ClassParams,
    pub offset_a: f64,
    pub eps: f64,
    /// Homothety with H_basic = s·H, K_basic = s²·K.
    pub similarity_scale: f64,
    pub case_trace: Vec<String>,
    /// Relation of the parallel surface (δ normalized to 1 in case II).
    pub reduced: LinearRelation,
    /// Relative size of the coefficient the offset is meant to cancel.
    pub reduction_residual: f64,
    /// The other root in case II.6.
    pub alternative_offset: Option<f64>,
    pub domain_note: Option<String>,
}

impl ClassificationResult {
    pub fn basic_class(&self) -> Result<BasicClass> {
        Ok(make_basic_class(self.basic, self.params)?.0)
    }

    /// Projective distance between the scaled reduced relation and the
    /// canonical relation of the basic class.
    pub fn consistency(&self) -> Result<f64> {
        let canon = self.basic_class()?.relation();
        Ok(self.reduced.scaled(self.similarity_scale).projective_distance(&canon))
    }

    pub fn render(&self) -> Result<String> {
        let class = self.basic_class()?;
        let mut s = String::new();
        let r = &self.input;
        writeln!(
            s,
            "class ({}) {}: {}; {}",
            self.basic.number(),
            self.basic.name(),
            self.basic.relation_text(),
            class.pde.symbolic()
        )
        .unwrap();
        writeln!(s, "relation     : {} K = {} H + {} H' + {}", r.delta, r.alpha, r.beta, r.gamma).unwrap();
        writeln!(s, "case trace   : {}", self.case_trace.join(" > ")).unwrap();
        writeln!(s, "offset a     : {}", self.offset_a).unwrap();
        writeln!(s, "similarity   : {}", self.similarity_scale).unwrap();
        writeln!(s, "pde          : {}", class.pde.expanded()).unwrap();
        if let Some(n) = &self.domain_note {
            writeln!(s, "domain       : {n}").unwrap();
        }
        writeln!(s, "[machine]").unwrap();
        writeln!(s, "class_id = {}", self.basic.name()).unwrap();
        writeln!(s, "class_number = {}", self.basic.number()).unwrap();
        if let Some(b) = self.params.beta {
            writeln!(s, "beta = {b:.17e}").unwrap();
        }
        if let Some(g) = self.params.gamma {
            writeln!(s, "gamma = {g:.17e}").unwrap();
        }
        writeln!(s, "offset_a = {:.17e}", self.offset_a).unwrap();
        writeln!(s, "eps = {}", self.eps).unwrap();
        writeln!(s, "similarity_scale = {:.17e}", self.similarity_scale).unwrap();
        writeln!(s, "operator = {}", class.pde.operator.ascii()).unwrap();
        writeln!(s, "case_trace = {}", self.case_trace.join(",")).unwrap();
        Ok(s)
    }
}

struct CaseOutcome {
    id: BasicClassId,
    params: ClassParams,
    scale: f64,
}

/// Case I: δ = 0, relation 0 = αH + βH′ + γ.
fn classify_case_i(alpha: f64, beta: f64, gamma: f64, trace: &mut Vec<String>) -> CaseOutcome {
    let out = |id, params, scale| CaseOutcome { id, params, scale };
    if alpha == 0.0 {
        trace.push("I.1".into());
        return out(BasicClassId::HPrime1, ClassParams::none(), -beta / gamma);
    }
    if gamma == 0.0 {
        let b = -beta / alpha;
        return if b == 0.0 {
            trace.push("I.2.3".into());
            out(BasicClassId::H0, ClassParams::none(), 1.0)
        } else if b * b > 1.0 {
            trace.push("I.2.1".into());
            out(BasicClassId::HBetaHPrimeGt1, ClassParams::beta(b), 1.0)
        } else {
            trace.push("I.2.2".into());
            out(BasicClassId::HBetaHPrimeLt1, ClassParams::beta(b), 1.0)
        };
    }
    if beta == 0.0 {
        trace.push("I.3".into());
        return out(BasicClassId::CmcHalf, ClassParams::none(), -alpha / (2.0 * gamma));
    }
    let b = -beta / alpha;
    let scale = -alpha / gamma;
    if b * b > 1.0 {
        trace.push("I.4.1".into());
        out(BasicClassId::HBetaHPrimePlus1Gt1, ClassParams::beta(b), scale)
    } else {
        trace.push("I.4.2".into());
        out(BasicClassId::HBetaHPrimePlus1Lt1, ClassParams::beta(b), scale)
    }
}

/// Roots of γa² + αa − 1 = 0 ordered by |a| (γ = 0 gives the single root 1/α).
fn case6_roots(alpha: f64, gamma: f64) -> (f64, Option<f64>) {
    if gamma == 0.0 {
        return (1.0 / alpha, None);
    }
    let disc = (alpha * alpha + 4.0 * gamma).max(0.0);
    let s = if alpha >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (alpha + s * disc.sqrt());
    let (r1, r2) = (-1.0 / q, q / gamma);
    if r1.abs() <= r2.abs() { (r1, Some(r2)) } else { (r2, Some(r1)) }
}

pub fn classify(rel: &LinearRelation) -> Result<ClassificationResult> {
    rel.validate()?;
    let mut trace = Vec::new();
    let eps = 1.0;
    let mut offset_a = 0.0;
    let mut reduction_residual = 0.0;
    let mut alternative_offset = None;
    let (outcome, reduced) = if rel.delta == 0.0 {
        let o = classify_case_i(rel.alpha, rel.beta, rel.gamma, &mut trace);
        (o, *rel)
    } else {
        let n = LinearRelation::new_unchecked(
            rel.alpha / rel.delta,
            rel.beta / rel.delta,
            rel.gamma / rel.delta,
            1.0,
        );
        let (alpha, beta, gamma) = (n.alpha, n.beta, n.gamma);
        let disc = alpha * alpha + 4.0 * gamma;
        if alpha == 0.0 && gamma == 0.0 {
            trace.push("II.5".into());
            let o = CaseOutcome { id: BasicClassId::K2HPrime, params: ClassParams::none(), scale: 2.0 / beta };
            (o, n)
        } else if disc >= 0.0 {
            trace.push("II.6".into());
            let (a, alt) = case6_roots(alpha, gamma);
            offset_a = a;
            alternative_offset = alt;
            let k_coeff = 1.0 - a * alpha - a * a * gamma;
            reduction_residual = k_coeff.abs() / (1.0 + (a * alpha).abs() + (a * a * gamma).abs());
            let mut red = reduced_relation(&n, a, eps);
            red.delta = 0.0;
            if disc == 0.0 {
                red.alpha = 0.0;
            }
            let o = classify_case_i(red.alpha, red.beta, red.gamma, &mut trace);
            (o, red)
        } else {
            let a = -alpha / (2.0 * gamma);
            offset_a = a;
            let h_coeff = alpha + 2.0 * a * gamma;
            reduction_residual = h_coeff.abs() / (alpha.abs() + (2.0 * a * gamma).abs()).max(f64::MIN_POSITIVE);
            let kappa = disc / (4.0 * gamma);
            let mut red = reduced_relation(&n, a, eps);
            red.alpha = 0.0;
            let (bt, gt) = (eps * beta / kappa, gamma / kappa);
            let o = if beta == 0.0 {
                trace.push("II.7.1".into());
                CaseOutcome { id: BasicClassId::KMinus1, params: ClassParams::none(), scale: 1.0 / (-gt).sqrt() }
            } else {
                trace.push("II.7.2".into());
                CaseOutcome {
                    id: BasicClassId::KBetaHPrimeGamma,
                    params: ClassParams::beta_gamma(bt, gt),
                    scale: 1.0,
                }
            };
            (o, red)
        }
    };
    trace.push("eps=+1".into());
    let domain_note = match outcome.id {
        BasicClassId::HBetaHPrimePlus1Gt1 | BasicClassId::HBetaHPrimePlus1Lt1 => Some(format!(
            "basic representative admissible where lambda = 2(nu-1)/(beta-1) > 0 (beta = {})",
            outcome.params.beta.unwrap_or(f64::NAN)
        )),
        _ => None,
    };
    Ok(ClassificationResult {
        input: *rel,
        basic: outcome.id,
        params: outcome.params,
        offset_a,
        eps,
        similarity_scale: outcome.scale,
        case_trace: trace,
        reduced,
        reduction_residual,
        alternative_offset,
        domain_note,
    })
}

pub fn natural_pde_of(result: &ClassificationResult) -> Result<NaturalPdeDescriptor> {
    Ok(result.basic_class()?.pde)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64, c: f64, d: f64) -> LinearRelation {
        LinearRelation::new(a, b, c, d).unwrap()
    }

    #[test]
    fn correspondence_example() {
        let r = coeffs_to_relation(&FractionalCoeffs::new(1.0, 1.0, 0.0, -1.0)).unwrap();
        assert_eq!(r.as_array(), [2.0, 0.0, 1.0, 0.0]);
        assert!(coeffs_to_relation(&FractionalCoeffs::new(1.0, 0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn hprime1_case() {
        let c = classify(&rel(0.0, 1.0, -1.0, 0.0)).unwrap();
        assert_eq!(c.basic, BasicClassId::HPrime1);
        assert_eq!(c.case_trace[0], "I.1");
        assert!(c.consistency().unwrap() < 1e-14);
    }

    #[test]
    fn k_minus1_case() {
        let c = classify(&rel(0.0, 0.0, -1.0, 1.0)).unwrap();
        assert_eq!(c.basic, BasicClassId::KMinus1);
        assert_eq!(c.offset_a, 0.0);
        assert_eq!(c.case_trace[0], "II.7.1");
        let text = c.render().unwrap();
        assert!(text.starts_with("class (8)"));
        assert!(text.contains("K = -1"));
    }

    #[test]
    fn case6_offset_root() {
        let c = classify(&rel(1.0, 0.0, 1.0, 1.0)).unwrap();
        let a = c.offset_a;
        assert!((a - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert!((1.0 - a - a * a).abs() < 1e-12);
        assert_eq!(c.case_trace[0], "II.6");
        assert!(c.consistency().unwrap() < 1e-12);
    }

    #[test]
    fn reduced_identity_at_zero_offset() {
        let r = rel(0.3, -1.2, 2.0, 0.7);
        assert_eq!(reduced_relation(&r, 0.0, 1.0), r);
        let [p, m] = reduced_relation_both(&r, 0.0);
        assert_eq!(p.alpha, -m.alpha);
    }

    #[test]
    fn k2hprime_and_h0() {
        assert_eq!(classify(&rel(0.0, 3.0, 0.0, 2.0)).unwrap().basic, BasicClassId::K2HPrime);
        assert_eq!(classify(&rel(2.0, 0.0, 0.0, 0.0)).unwrap().basic, BasicClassId::H0);
    }

    #[test]
    fn excluded_inputs() {
        assert!(LinearRelation::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(LinearRelation::new(1.0, 1.0, 0.0, 0.0).is_err());
    }
}
