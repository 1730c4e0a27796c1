//! Weingarten function pairs (f, g), their potentials I, J and the registry
//! of the ten basic linear fractional classes.

use std::fmt;
use std::sync::Arc;

use crate::classification::{FractionalCoeffs, LinearRelation};
use crate::error::{GeomError, Result};

/// f, g and their first two derivatives at one ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairJet {
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
}

impl PairJet {
    /// I′ = f′/(f−g).
    pub fn di(&self) -> f64 {
        self.f1 / (self.f - self.g)
    }

    /// J′ = g′/(g−f).
    pub fn dj(&self) -> f64 {
        self.g1 / (self.g - self.f)
    }

    pub fn d2i(&self) -> f64 {
        let d = self.f - self.g;
        self.f2 / d - self.f1 * (self.f1 - self.g1) / (d * d)
    }

    pub fn d2j(&self) -> f64 {
        let d = self.g - self.f;
        self.g2 / d - self.g1 * (self.g1 - self.f1) / (d * d)
    }
}

/// Open interval (lo, hi); infinite ends allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(GeomError::param(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// `n` interior points; infinite ends are sampled out to ±(|finite end| + 50).
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => (self.lo, self.hi),
            (true, false) => (self.lo, self.lo + 50.0),
            (false, true) => (self.hi - 50.0, self.hi),
            (false, false) => (-50.0, 50.0),
        };
        (1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64).collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

pub type JetFn = Arc<dyn Fn(f64) -> PairJet + Send + Sync>;

#[derive(Clone)]
pub enum PairKind {
    Basic(BasicClassId, ClassParams),
    LinearFractional(FractionalCoeffs),
    Parallel { base: Box<WeingartenPair>, a: f64, eps: f64 },
    Custom { name: String, jet: JetFn },
}

impl fmt::Debug for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairKind::Basic(id, p) => write!(f, "Basic({id:?}, {p:?})"),
            PairKind::LinearFractional(c) => write!(f, "LinearFractional({c:?})"),
            PairKind::Parallel { base, a, eps } => {
                write!(f, "Parallel {{ base: {:?}, a: {a}, eps: {eps} }}", base.kind)
            }
            PairKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WeingartenPair {
    pub kind: PairKind,
    pub domain: Interval,
    pub nu0: f64,
}

impl WeingartenPair {
    /// A pair given by an arbitrary jet callback. Potentials use quadrature.
    pub fn custom(name: &str, domain: Interval, nu0: f64, jet: JetFn) -> Result<Self> {
        let p = WeingartenPair { kind: PairKind::Custom { name: name.to_string(), jet }, domain, nu0 };
        p.validate(64)?;
        Ok(p)
    }

    pub fn jet(&self, nu: f64) -> PairJet {
        match &self.kind {
            PairKind::Basic(id, p) => basic_jet(*id, p, nu),
            PairKind::LinearFractional(c) => {
                let den = c.c * nu + c.d;
                let det = c.a * c.d - c.b * c.c;
                PairJet {
                    f: (c.a * nu + c.b) / den,
                    f1: det / (den * den),
                    f2: -2.0 * c.c * det / (den * den * den),
                    g: nu,
                    g1: 1.0,
                    g2: 0.0,
                }
            }
            PairKind::Parallel { base, a, eps } => {
                let b = base.jet(nu);
                let (ff, f1, f2) = offset_jet(b.f, b.f1, b.f2, *a, *eps);
                let (g, g1, g2) = offset_jet(b.g, b.g1, b.g2, *a, *eps);
                PairJet { f: ff, f1, f2, g, g1, g2 }
            }
            PairKind::Custom { jet, .. } => jet(nu),
        }
    }

    pub fn f(&self, nu: f64) -> f64 {
        self.jet(nu).f
    }

    pub fn g(&self, nu: f64) -> f64 {
        self.jet(nu).g
    }

    /// Sign of f − g at ν₀ (the registry keeps it constant on the domain).
    pub fn sign(&self) -> f64 {
        let j = self.jet(self.nu0);
        (j.f - j.g).signum()
    }

    pub fn label(&self) -> String {
        match &self.kind {
            PairKind::Basic(id, p) => format!("{}{}", id.name(), p.suffix()),
            PairKind::LinearFractional(c) => {
                format!("LF(A={},B={},C={},D={})", c.a, c.b, c.c, c.d)
            }
            PairKind::Parallel { base, a, .. } => format!("parallel({}, a={a})", base.label()),
            PairKind::Custom { name, .. } => name.clone(),
        }
    }

    /// Checks (f−g)·f′·g′ ≠ 0 and a constant sign of f−g on `n` samples.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !self.domain.contains(self.nu0) {
            return Err(GeomError::param(format!("nu0={} outside domain {}", self.nu0, self.domain)));
        }
        let s = self.sign();
        for nu in self.domain.samples(n).into_iter().chain([self.nu0]) {
            let j = self.jet(nu);
            let d = j.f - j.g;
            if !(d * j.f1 * j.g1).is_finite() || d * j.f1 * j.g1 == 0.0 {
                return Err(GeomError::param(format!("(f-g) f' g' vanishes or is singular at nu={nu}")));
            }
            if d.signum() != s {
                return Err(GeomError::param(format!("f-g changes sign inside the domain (at nu={nu})")));
            }
        }
        Ok(())
    }

    /// Checks that ν lies in the domain and f − g has the recorded sign.
    pub fn check_sample(&self, nu: f64) -> Result<PairJet> {
        if !self.domain.contains(nu) {
            return Err(GeomError::pre(format!("sample nu={nu} outside pair domain {}", self.domain)));
        }
        let j = self.jet(nu);
        if (j.f - j.g).signum() != self.sign() || j.f == j.g {
            return Err(GeomError::pre(format!("f-g changes sign at nu={nu}")));
        }
        Ok(j)
    }

    pub fn has_closed_form(&self) -> bool {
        match &self.kind {
            PairKind::Basic(..) => true,
            PairKind::Parallel { base, .. } => base.has_closed_form(),
            _ => false,
        }
    }

    fn closed_form(&self, nu: f64) -> Option<(f64, f64)> {
        match &self.kind {
            PairKind::Basic(id, p) => {
                let (i, j) = basic_potentials_raw(*id, p, nu);
                let (i0, j0) = basic_potentials_raw(*id, p, self.nu0);
                Some((i - i0, j - j0))
            }
            PairKind::Parallel { base, a, .. } => {
                let (i, j) = base.closed_form(nu)?;
                let b = base.jet(nu);
                let b0 = base.jet(self.nu0);
                let di = ((1.0 - a * b0.f) / (1.0 - a * b.f)).abs().ln();
                let dj = ((1.0 - a * b0.g) / (1.0 - a * b.g)).abs().ln();
                Some((i + di, j + dj))
            }
            _ => None,
        }
    }

    pub fn potentials(&self) -> Potentials {
        let method = if self.has_closed_form() {
            PotentialMethod::ClosedForm
        } else {
            PotentialMethod::Quadrature
        };
        Potentials { pair: self.clone(), method }
    }

    pub fn potentials_with(&self, method: PotentialMethod) -> Result<Potentials> {
        if method == PotentialMethod::ClosedForm && !self.has_closed_form() {
            return Err(GeomError::param("no closed-form potentials for this pair"));
        }
        Ok(Potentials { pair: self.clone(), method })
    }
}

/// (εh/(1−ah), first and second derivative) for h = f or g.
fn offset_jet(h: f64, h1: f64, h2: f64, a: f64, eps: f64) -> (f64, f64, f64) {
    let q = 1.0 - a * h;
    (eps * h / q, eps * h1 / (q * q), eps * (h2 * q + 2.0 * a * h1 * h1) / (q * q * q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialMethod {
    ClosedForm,
    Quadrature,
}

/// I(ν) = ∫ f′/(f−g), J(ν) = ∫ g′/(g−f), both from ν₀.
#[derive(Debug, Clone)]
pub struct Potentials {
    pair: WeingartenPair,
    pub method: PotentialMethod,
}

/// Target relative accuracy of the quadrature fallback.
pub const QUAD_RTOL: f64 = 1e-10;

impl Potentials {
    pub fn pair(&self) -> &WeingartenPair {
        &self.pair
    }

    pub fn eval(&self, nu: f64) -> Result<(f64, f64)> {
        match self.method {
            PotentialMethod::ClosedForm => self
                .pair
                .closed_form(nu)
                .ok_or_else(|| GeomError::param("closed form unavailable")),
            PotentialMethod::Quadrature => {
                let i = self.integrate(nu, |j| j.di())?;
                let jv = self.integrate(nu, |j| j.dj())?;
                Ok((i, jv))
            }
        }
    }

    fn integrate(&self, nu: f64, h: impl Fn(&PairJet) -> f64) -> Result<f64> {
        let nu0 = self.pair.nu0;
        if nu == nu0 {
            return Ok(0.0);
        }
        let pair = &self.pair;
        let out = quadrature::double_exponential::integrate(|x| h(&pair.jet(x)), nu0, nu, 1e-13);
        let bound = QUAD_RTOL * out.integral.abs().max(1.0);
        if !out.integral.is_finite() || !(out.error_estimate <= bound) {
            return Err(GeomError::num(format!(
                "potential quadrature did not converge on [{nu0}, {nu}] (estimate {:e})",
                out.error_estimate
            )));
        }
        Ok(out.integral)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasicClassId {
    H0,
    CmcHalf,
    HPrime1,
    HBetaHPrimeGt1,
    HBetaHPrimeLt1,
    HBetaHPrimePlus1Gt1,
    HBetaHPrimePlus1Lt1,
    KMinus1,
    K2HPrime,
    KBetaHPrimeGamma,
}

impl BasicClassId {
    pub const ALL: [BasicClassId; 10] = [
        BasicClassId::H0,
        BasicClassId::CmcHalf,
        BasicClassId::HPrime1,
        BasicClassId::HBetaHPrimeGt1,
        BasicClassId::HBetaHPrimeLt1,
        BasicClassId::HBetaHPrimePlus1Gt1,
        BasicClassId::HBetaHPrimePlus1Lt1,
        BasicClassId::KMinus1,
        BasicClassId::K2HPrime,
        BasicClassId::KBetaHPrimeGamma,
    ];

    pub fn number(self) -> usize {
        BasicClassId::ALL.iter().position(|c| *c == self).unwrap() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            BasicClassId::H0 => "H0",
            BasicClassId::CmcHalf => "CMC_HALF",
            BasicClassId::HPrime1 => "HPRIME1",
            BasicClassId::HBetaHPrimeGt1 => "H_BETA_HPRIME_GT1",
            BasicClassId::HBetaHPrimeLt1 => "H_BETA_HPRIME_LT1",
            BasicClassId::HBetaHPrimePlus1Gt1 => "H_BETA_HPRIME_PLUS1_GT1",
            BasicClassId::HBetaHPrimePlus1Lt1 => "H_BETA_HPRIME_PLUS1_LT1",
            BasicClassId::KMinus1 => "K_MINUS1",
            BasicClassId::K2HPrime => "K_2HPRIME",
            BasicClassId::KBetaHPrimeGamma => "K_BETA_HPRIME_GAMMA",
        }
    }

    /// Accepts the registry name (case-insensitive) or the class number 1–10.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Ok(n) = t.parse::<usize>() {
            if (1..=10).contains(&n) {
                return Ok(BasicClassId::ALL[n - 1]);
            }
        }
        BasicClassId::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| GeomError::param(format!("unknown class '{s}'")))
    }

    pub fn relation_text(self) -> &'static str {
        match self {
            BasicClassId::H0 => "H = 0",
            BasicClassId::CmcHalf => "H = 1/2",
            BasicClassId::HPrime1 => "H' = 1",
            BasicClassId::HBetaHPrimeGt1 => "H = beta H', beta^2 > 1",
            BasicClassId::HBetaHPrimeLt1 => "H = beta H', 0 < beta^2 < 1",
            BasicClassId::HBetaHPrimePlus1Gt1 => "H = beta H' + 1, beta^2 > 1",
            BasicClassId::HBetaHPrimePlus1Lt1 => "H = beta H' + 1, 0 < beta^2 < 1",
            BasicClassId::KMinus1 => "K = -1",
            BasicClassId::K2HPrime => "K = 2 H'",
            BasicClassId::KBetaHPrimeGamma => "K = beta H' + gamma, beta != 0, gamma < 0",
        }
    }

    /// Which principal curvature the pair parameter ν stands for.
    pub fn nu_role(self) -> &'static str {
        match self {
            BasicClassId::H0 => "nu = nu1 (f = nu, g = -nu)",
            BasicClassId::K2HPrime => "nu = nu2 + 1 (g = nu - 1)",
            BasicClassId::KBetaHPrimeGamma => "nu = nu1 + beta/2 (f = nu - beta/2)",
            _ => "nu = nu2 (g = nu)",
        }
    }

    pub fn needs_beta(self) -> bool {
        matches!(
            self,
            BasicClassId::HBetaHPrimeGt1
                | BasicClassId::HBetaHPrimeLt1
                | BasicClassId::HBetaHPrimePlus1Gt1
                | BasicClassId::HBetaHPrimePlus1Lt1
                | BasicClassId::KBetaHPrimeGamma
        )
    }

    pub fn needs_gamma(self) -> bool {
        self == BasicClassId::KBetaHPrimeGamma
    }
}

impl fmt::Display for BasicClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.number(), self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassParams {
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

impl ClassParams {
    pub fn none() -> Self {
        ClassParams::default()
    }

    pub fn beta(beta: f64) -> Self {
        ClassParams { beta: Some(beta), gamma: None }
    }

    pub fn beta_gamma(beta: f64, gamma: f64) -> Self {
        ClassParams { beta: Some(beta), gamma: Some(gamma) }
    }

    fn b(&self) -> f64 {
        self.beta.unwrap_or(f64::NAN)
    }

    fn c(&self) -> f64 {
        self.gamma.unwrap_or(f64::NAN)
    }

    fn suffix(&self) -> String {
        match (self.beta, self.gamma) {
            (Some(b), Some(g)) => format!("(beta={b},gamma={g})"),
            (Some(b), None) => format!("(beta={b})"),
            _ => String::new(),
        }
    }
}

fn basic_jet(id: BasicClassId, p: &ClassParams, nu: f64) -> PairJet {
    use BasicClassId::*;
    let lin = |c: f64, d: f64| PairJet { f: c * nu + d, f1: c, f2: 0.0, g: nu, g1: 1.0, g2: 0.0 };
    match id {
        H0 => PairJet { f: nu, f1: 1.0, f2: 0.0, g: -nu, g1: -1.0, g2: 0.0 },
        CmcHalf => lin(-1.0, 1.0),
        HPrime1 => lin(1.0, 2.0),
        HBetaHPrimeGt1 | HBetaHPrimeLt1 => {
            let b = p.b();
            lin((b + 1.0) / (b - 1.0), 0.0)
        }
        HBetaHPrimePlus1Gt1 | HBetaHPrimePlus1Lt1 => {
            let b = p.b();
            lin(-(1.0 + b) / (1.0 - b), 2.0 / (1.0 - b))
        }
        KMinus1 => PairJet {
            f: nu,
            f1: 1.0,
            f2: 0.0,
            g: -1.0 / nu,
            g1: 1.0 / (nu * nu),
            g2: -2.0 / (nu * nu * nu),
        },
        K2HPrime => {
            let q = 2.0 - nu;
            PairJet { f: (nu - 1.0) / q, f1: 1.0 / (q * q), f2: 2.0 / (q * q * q), g: nu - 1.0, g1: 1.0, g2: 0.0 }
        }
        KBetaHPrimeGamma => {
            let (b, c) = (p.b(), p.c());
            let q = c - b * b / 4.0;
            PairJet {
                f: nu - b / 2.0,
                f1: 1.0,
                f2: 0.0,
                g: q / nu + b / 2.0,
                g1: -q / (nu * nu),
                g2: 2.0 * q / (nu * nu * nu),
            }
        }
    }
}

/// Antiderivatives before subtracting their values at ν₀.
fn basic_potentials_raw(id: BasicClassId, p: &ClassParams, nu: f64) -> (f64, f64) {
    use BasicClassId::*;
    match id {
        H0 => (0.5 * nu.ln(), 0.5 * nu.ln()),
        CmcHalf => {
            let l = 0.5 * (1.0 - 2.0 * nu).abs().ln();
            (l, l)
        }
        HPrime1 => (nu / 2.0, -nu / 2.0),
        HBetaHPrimeGt1 | HBetaHPrimeLt1 => {
            let b = p.b();
            let l = nu.abs().ln();
            ((b + 1.0) / 2.0 * l, -(b - 1.0) / 2.0 * l)
        }
        HBetaHPrimePlus1Gt1 | HBetaHPrimePlus1Lt1 => {
            let b = p.b();
            let l = (nu - 1.0).abs().ln();
            ((b + 1.0) / 2.0 * l, -(b - 1.0) / 2.0 * l)
        }
        KMinus1 => {
            let s = 0.5 * (1.0 + nu * nu).ln();
            (s, -nu.abs().ln() + s)
        }
        K2HPrime => {
            let m = nu - 1.0;
            (-1.0 / m + m.abs().ln() - (1.0 - m).abs().ln(), 1.0 / m + m.abs().ln())
        }
        KBetaHPrimeGamma => {
            let (b, c) = (p.b(), p.c());
            let lam = nu - b / 2.0;
            let s = 0.5 * (lam * lam - c).ln();
            let ii = arctan_potential(lam, c);
            (s + b / 2.0 * ii, -nu.abs().ln() + s - b / 2.0 * ii)
        }
    }
}

/// ℐ(λ) = arctan(λ/√−γ)/√−γ.
pub fn arctan_potential(lam: f64, gamma: f64) -> f64 {
    let s = (-gamma).sqrt();
    (lam / s).atan() / s
}

/// Invertible change of variable between the class PDE unknown λ and ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Substitution {
    /// ν = e^λ
    Exp,
    /// ν = (1 − e^λ)/2
    HalfOneMinusExp,
    /// ν = λ
    Identity,
    /// ν = ((β−1)λ + 2)/2
    Affine { beta: f64 },
    /// ν = tan(λ/2)
    TanHalf,
    /// ν = (λ−4)/(λ−2)
    Mobius,
    /// ν = λ + β/2
    Shift { beta: f64 },
}

impl Substitution {
    pub fn nu_of_lambda(&self, l: f64) -> f64 {
        match *self {
            Substitution::Exp => l.exp(),
            Substitution::HalfOneMinusExp => (1.0 - l.exp()) / 2.0,
            Substitution::Identity => l,
            Substitution::Affine { beta } => ((beta - 1.0) * l + 2.0) / 2.0,
            Substitution::TanHalf => (l / 2.0).tan(),
            Substitution::Mobius => (l - 4.0) / (l - 2.0),
            Substitution::Shift { beta } => l + beta / 2.0,
        }
    }

    pub fn lambda_of_nu(&self, nu: f64) -> f64 {
        match *self {
            Substitution::Exp => nu.ln(),
            Substitution::HalfOneMinusExp => (1.0 - 2.0 * nu).ln(),
            Substitution::Identity => nu,
            Substitution::Affine { beta } => 2.0 * (nu - 1.0) / (beta - 1.0),
            Substitution::TanHalf => 2.0 * nu.atan(),
            Substitution::Mobius => (2.0 * nu - 4.0) / (nu - 1.0),
            Substitution::Shift { beta } => nu - beta / 2.0,
        }
    }

    /// (dν/dλ, d²ν/dλ²).
    pub fn derivs(&self, l: f64) -> (f64, f64) {
        match *self {
            Substitution::Exp => (l.exp(), l.exp()),
            Substitution::HalfOneMinusExp => (-l.exp() / 2.0, -l.exp() / 2.0),
            Substitution::Identity | Substitution::Shift { .. } => (1.0, 0.0),
            Substitution::Affine { beta } => ((beta - 1.0) / 2.0, 0.0),
            Substitution::TanHalf => {
                let t = (l / 2.0).tan();
                let s = 0.5 * (1.0 + t * t);
                (s, s * t)
            }
            Substitution::Mobius => {
                let q = l - 2.0;
                (2.0 / (q * q), -4.0 / (q * q * q))
            }
        }
    }

    pub fn text(&self) -> String {
        match *self {
            Substitution::Exp => "nu = e^lambda".into(),
            Substitution::HalfOneMinusExp => "nu = (1 - e^lambda)/2".into(),
            Substitution::Identity => "lambda = nu".into(),
            Substitution::Affine { beta } => format!("nu = (({beta} - 1) lambda + 2)/2"),
            Substitution::TanHalf => "nu = tan(lambda/2)".into(),
            Substitution::Mobius => "nu = (lambda - 4)/(lambda - 2)".into(),
            Substitution::Shift { beta } => format!("lambda = nu - {beta}/2"),
        }
    }
}

/// The four operators Δ, Δ̄, Δ*, Δ̄* acting on w(u, v).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// w_uu + w_vv
    Laplace,
    /// w_uu − w_vv
    Wave,
    /// w_uu + (1/w)_vv
    Star,
    /// w_uu − (1/w)_vv
    BarStar,
}

impl Operator {
    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Laplace => "Δ",
            Operator::Wave => "Δ̄",
            Operator::Star => "Δ*",
            Operator::BarStar => "Δ̄*",
        }
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Operator::Laplace => "laplace",
            Operator::Wave => "wave",
            Operator::Star => "star",
            Operator::BarStar => "barstar",
        }
    }

    /// Hyperbolic in the sense of the principal part: Δ̄ and Δ* (speed 1/w).
    pub fn is_hyperbolic(self) -> bool {
        matches!(self, Operator::Wave | Operator::Star)
    }

    pub fn is_reciprocal(self) -> bool {
        matches!(self, Operator::Star | Operator::BarStar)
    }

    /// Sign of the v-term: w_uu + s·T(w)_vv.
    pub fn v_sign(self) -> f64 {
        match self {
            Operator::Laplace | Operator::Star => 1.0,
            Operator::Wave | Operator::BarStar => -1.0,
        }
    }
}

/// Dependent variable w = T(λ) the operator acts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Identity,
    Exp,
    Power { beta: f64 },
    ExpBetaArctan { beta: f64, gamma: f64 },
}

impl Transform {
    pub fn w(&self, l: f64) -> f64 {
        match *self {
            Transform::Identity => l,
            Transform::Exp => l.exp(),
            Transform::Power { beta } => l.powf(beta),
            Transform::ExpBetaArctan { beta, gamma } => (beta * arctan_potential(l, gamma)).exp(),
        }
    }

    /// (w, dw/dλ, d²w/dλ²).
    pub fn jet(&self, l: f64) -> (f64, f64, f64) {
        match *self {
            Transform::Identity => (l, 1.0, 0.0),
            Transform::Exp => {
                let e = l.exp();
                (e, e, e)
            }
            Transform::Power { beta } => {
                (l.powf(beta), beta * l.powf(beta - 1.0), beta * (beta - 1.0) * l.powf(beta - 2.0))
            }
            Transform::ExpBetaArctan { beta, gamma } => {
                let w = self.w(l);
                let q = l * l - gamma;
                (w, beta * w / q, w * (beta * beta - 2.0 * beta * l) / (q * q))
            }
        }
    }

    pub fn lambda_of_w(&self, w: f64) -> f64 {
        match *self {
            Transform::Identity => w,
            Transform::Exp => w.ln(),
            Transform::Power { beta } => w.powf(1.0 / beta),
            Transform::ExpBetaArctan { beta, gamma } => {
                let s = (-gamma).sqrt();
                s * (s * w.ln() / beta).tan()
            }
        }
    }

    /// True where w = T(λ) is a valid, invertible value.
    pub fn admissible_w(&self, w: f64) -> bool {
        match *self {
            Transform::Identity => w.is_finite(),
            Transform::Exp | Transform::Power { .. } => w > 0.0 && w.is_finite(),
            Transform::ExpBetaArctan { beta, gamma } => {
                let s = (-gamma).sqrt();
                w > 0.0 && (s * w.ln() / beta).abs() < std::f64::consts::FRAC_PI_2
            }
        }
    }

    fn text(&self, var: &str, inverse: bool) -> String {
        let m = if inverse { "-" } else { "" };
        match *self {
            Transform::Identity if inverse => format!("1/{var}"),
            Transform::Identity => var.to_string(),
            Transform::Exp => format!("e^({m}{var})"),
            Transform::Power { beta } => format!("{var}^({m}{beta})"),
            Transform::ExpBetaArctan { beta, .. } => format!("e^({m}{beta} I)"),
        }
    }
}

/// Right-hand side R(λ) of a class PDE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rhs {
    Exp,
    Sinh,
    /// 2λ(λ+2)
    Quadratic,
    /// c·λ
    Linear { c: f64 },
    /// β((β−1)λ+2)((β+1)λ+2)/(2(β−1)λ)
    Affine { beta: f64 },
    NegSin,
    Const { c: f64 },
    /// −(βγ/2)·λ(βλ+2γ)/(λ²−γ)
    ArctanClass { beta: f64, gamma: f64 },
}

impl Rhs {
    pub fn eval(&self, l: f64) -> f64 {
        match *self {
            Rhs::Exp => l.exp(),
            Rhs::Sinh => l.sinh(),
            Rhs::Quadratic => 2.0 * l * (l + 2.0),
            Rhs::Linear { c } => c * l,
            Rhs::Affine { beta } => {
                beta * ((beta - 1.0) * l + 2.0) * ((beta + 1.0) * l + 2.0) / (2.0 * (beta - 1.0) * l)
            }
            Rhs::NegSin => -l.sin(),
            Rhs::Const { c } => c,
            Rhs::ArctanClass { beta, gamma } => {
                -(beta * gamma / 2.0) * l * (beta * l + 2.0 * gamma) / (l * l - gamma)
            }
        }
    }

    fn text(&self, var: &str) -> String {
        match *self {
            Rhs::Exp => format!("e^{var}"),
            Rhs::Sinh => format!("sinh {var}"),
            Rhs::Quadratic => format!("2{var}({var}+2)"),
            Rhs::Linear { c } => format!("{c} {var}"),
            Rhs::Affine { beta } => format!(
                "{beta}(({beta}-1){var}+2)(({beta}+1){var}+2)/(2({beta}-1){var})"
            ),
            Rhs::NegSin => format!("−sin {var}"),
            Rhs::Const { c } => format!("{c}"),
            Rhs::ArctanClass { beta, gamma } => format!(
                "-({beta}*{gamma}/2) {var}({beta}{var}+2*{gamma})/({var}^2-{gamma})"
            ),
        }
    }
}

/// δ(T(λ)) = R(λ) with δ one of the four operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalPdeDescriptor {
    pub operator: Operator,
    pub transform: Transform,
    pub rhs: Rhs,
    /// Symbol used for the unknown when rendering ("λ" or "ν").
    pub var: &'static str,
}

impl NaturalPdeDescriptor {
    /// Operator form, e.g. "Δ̄*(e^(λ)) = 2".
    pub fn symbolic(&self) -> String {
        let arg = match self.transform {
            Transform::Identity => self.var.to_string(),
            t => format!("({})", t.text(self.var, false)),
        };
        format!("{}{arg} = {}", self.operator.symbol(), self.rhs.text(self.var))
    }

    /// Expanded form, e.g. "λ_uu − λ_vv = sinh λ".
    pub fn expanded(&self) -> String {
        let sign = if self.operator.v_sign() > 0.0 { "+" } else { "−" };
        let w = self.transform.text(self.var, false);
        let (wu, wv) = if self.operator.is_reciprocal() {
            (w.clone(), self.transform.text(self.var, true))
        } else {
            (w.clone(), w)
        };
        let wrap = |s: &str| if s.chars().count() == 1 { s.to_string() } else { format!("({s})") };
        format!("{}_uu {sign} {}_vv = {}", wrap(&wu), wrap(&wv), self.rhs.text(self.var))
    }

    /// Class-PDE defect δ(T(λ)) − R(λ) from λ and its derivatives at a point.
    pub fn defect_point(&self, l: f64, lu: f64, lv: f64, luu: f64, lvv: f64) -> f64 {
        let (w, w1, w2) = self.transform.jet(l);
        let wuu = w2 * lu * lu + w1 * luu;
        let wv = w1 * lv;
        let wvv = w2 * lv * lv + w1 * lvv;
        let tvv = if self.operator.is_reciprocal() {
            -wvv / (w * w) + 2.0 * wv * wv / (w * w * w)
        } else {
            wvv
        };
        wuu + self.operator.v_sign() * tvv - self.rhs.eval(l)
    }
}

/// One entry of the registry.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicClass {
    pub id: BasicClassId,
    pub params: ClassParams,
    pub substitution: Substitution,
    pub pde: NaturalPdeDescriptor,
    pub a_const: f64,
    pub b_const: f64,
    pub nu0: f64,
}

impl BasicClass {
    /// Canonical coefficients (α, β, γ, δ) of δK = αH + βH′ + γ.
    pub fn relation(&self) -> LinearRelation {
        let b = self.params.beta.unwrap_or(0.0);
        let g = self.params.gamma.unwrap_or(0.0);
        let r = |a, b, c, d| LinearRelation::new_unchecked(a, b, c, d);
        match self.id {
            BasicClassId::H0 => r(1.0, 0.0, 0.0, 0.0),
            BasicClassId::CmcHalf => r(1.0, 0.0, -0.5, 0.0),
            BasicClassId::HPrime1 => r(0.0, 1.0, -1.0, 0.0),
            BasicClassId::HBetaHPrimeGt1 | BasicClassId::HBetaHPrimeLt1 => r(1.0, -b, 0.0, 0.0),
            BasicClassId::HBetaHPrimePlus1Gt1 | BasicClassId::HBetaHPrimePlus1Lt1 => {
                r(1.0, -b, -1.0, 0.0)
            }
            BasicClassId::KMinus1 => r(0.0, 0.0, -1.0, 1.0),
            BasicClassId::K2HPrime => r(0.0, 2.0, 0.0, 1.0),
            BasicClassId::KBetaHPrimeGamma => r(0.0, b, g, 1.0),
        }
    }

    /// Range of λ corresponding to the pair domain.
    pub fn lambda_of_nu(&self, nu: f64) -> f64 {
        self.substitution.lambda_of_nu(nu)
    }

    pub fn nu_of_lambda(&self, l: f64) -> f64 {
        self.substitution.nu_of_lambda(l)
    }

    /// One catalog line: id, params, domain, substitution name, PDE.
    pub fn catalog_entry(&self, pair: &WeingartenPair) -> String {
        format!(
            "id={} number={} relation=\"{}\" params={} domain={} nu0={} a={:.12} b={:.12} convention=\"{}\" substitution=\"{}\" operator={} pde=\"{}\" expanded=\"{}\"",
            self.id.name(),
            self.id.number(),
            self.id.relation_text(),
            match (self.params.beta, self.params.gamma) {
                (Some(b), Some(g)) => format!("beta={b},gamma={g}"),
                (Some(b), None) => format!("beta={b}"),
                _ => "-".into(),
            },
            pair.domain,
            self.nu0,
            self.a_const,
            self.b_const,
            self.id.nu_role(),
            self.substitution.text(),
            self.pde.operator.symbol(),
            self.pde.symbolic(),
            self.pde.expanded(),
        )
    }
}

/// Default parameters used when listing the registry.
pub fn default_params(id: BasicClassId) -> ClassParams {
    match id {
        BasicClassId::HBetaHPrimeGt1 | BasicClassId::HBetaHPrimePlus1Gt1 => ClassParams::beta(2.0),
        BasicClassId::HBetaHPrimeLt1 | BasicClassId::HBetaHPrimePlus1Lt1 => ClassParams::beta(0.5),
        BasicClassId::KBetaHPrimeGamma => ClassParams::beta_gamma(1.0, -1.0),
        _ => ClassParams::none(),
    }
}

pub fn make_basic_class(id: BasicClassId, params: ClassParams) -> Result<(BasicClass, WeingartenPair)> {
    use BasicClassId::*;
    let need = |name: &str, v: Option<f64>| {
        v.filter(|x| x.is_finite())
            .ok_or_else(|| GeomError::param(format!("class {} requires parameter {name}", id.name())))
    };
    let params = ClassParams {
        beta: if id.needs_beta() { Some(need("beta", params.beta)?) } else { None },
        gamma: if id.needs_gamma() { Some(need("gamma", params.gamma)?) } else { None },
    };
    let b = params.beta.unwrap_or(f64::NAN);
    let g = params.gamma.unwrap_or(f64::NAN);
    let reject = |msg: &str| Err(GeomError::param(format!("class {}: {msg}", id.name())));
    match id {
        HBetaHPrimeGt1 | HBetaHPrimePlus1Gt1 if !(b * b > 1.0) => return reject("requires beta^2 > 1"),
        HBetaHPrimeLt1 | HBetaHPrimePlus1Lt1 if !(b * b < 1.0 && b != 0.0) => {
            return reject("requires 0 < beta^2 < 1");
        }
        KBetaHPrimeGamma if !(b != 0.0 && g < 0.0) => return reject("requires beta != 0 and gamma < 0"),
        _ => {}
    }
    let inf = f64::INFINITY;
    let ratio = ((b - 1.0) / (b + 1.0)).abs();
    let desc = |operator, transform, rhs, var| NaturalPdeDescriptor { operator, transform, rhs, var };
    let (domain, nu0, a2, b2, substitution, pde) = match id {
        H0 => (
            Interval { lo: 0.0, hi: inf },
            0.5,
            1.0,
            1.0,
            Substitution::Exp,
            desc(Operator::Wave, Transform::Identity, Rhs::Exp, "λ"),
        ),
        CmcHalf => (
            Interval { lo: -inf, hi: 0.5 },
            0.0,
            1.0,
            1.0,
            Substitution::HalfOneMinusExp,
            desc(Operator::Wave, Transform::Identity, Rhs::Sinh, "λ"),
        ),
        HPrime1 => (
            Interval::REAL,
            0.0,
            1.0,
            1.0,
            Substitution::Identity,
            desc(Operator::BarStar, Transform::Exp, Rhs::Quadratic, "ν"),
        ),
        HBetaHPrimeGt1 | HBetaHPrimeLt1 => (
            Interval { lo: 0.0, hi: inf },
            1.0,
            1.0,
            ratio,
            Substitution::Identity,
            desc(
                if id == HBetaHPrimeGt1 { Operator::BarStar } else { Operator::Star },
                Transform::Power { beta: b },
                Rhs::Linear { c: 2.0 * b * (b + 1.0) / ((b - 1.0) * (b - 1.0)) },
                "ν",
            ),
        ),
        HBetaHPrimePlus1Gt1 | HBetaHPrimePlus1Lt1 => (
            if b > 1.0 { Interval { lo: 1.0, hi: inf } } else { Interval { lo: -inf, hi: 1.0 } },
            (b + 1.0) / 2.0,
            1.0,
            ratio,
            Substitution::Affine { beta: b },
            desc(
                if id == HBetaHPrimePlus1Gt1 { Operator::BarStar } else { Operator::Star },
                Transform::Power { beta: b },
                Rhs::Affine { beta: b },
                "λ",
            ),
        ),
        KMinus1 => (
            Interval { lo: 0.0, hi: inf },
            1.0,
            2.0,
            2.0,
            Substitution::TanHalf,
            desc(Operator::Laplace, Transform::Identity, Rhs::NegSin, "λ"),
        ),
        K2HPrime => (
            Interval { lo: 1.0, hi: 2.0 },
            1.5,
            (-2.0f64).exp(),
            (2.0f64).exp() / 4.0,
            Substitution::Mobius,
            desc(Operator::BarStar, Transform::Exp, Rhs::Const { c: 2.0 }, "λ"),
        ),
        KBetaHPrimeGamma => (
            if b > 0.0 { Interval { lo: 0.0, hi: inf } } else { Interval { lo: -inf, hi: 0.0 } },
            b / 2.0,
            4.0 / (b * b - 4.0 * g),
            4.0 / (b * b),
            Substitution::Shift { beta: b },
            desc(
                Operator::BarStar,
                Transform::ExpBetaArctan { beta: b, gamma: g },
                Rhs::ArctanClass { beta: b, gamma: g },
                "λ",
            ),
        ),
    };
    let pair = WeingartenPair { kind: PairKind::Basic(id, params), domain, nu0 };
    pair.validate(64)?;
    let class = BasicClass {
        id,
        params,
        substitution,
        pde,
        a_const: a2.sqrt(),
        b_const: b2.sqrt(),
        nu0,
    };
    Ok((class, pair))
}

/// ν₁ = (Aν+B)/(Cν+D), ν₂ = ν on `domain`, with ν₀ at the domain midpoint.
pub fn linear_fractional_pair(fc: FractionalCoeffs, domain: Interval) -> Result<WeingartenPair> {
    let nu0 = match (domain.lo.is_finite(), domain.hi.is_finite()) {
        (true, true) => 0.5 * (domain.lo + domain.hi),
        (true, false) => domain.lo + 1.0,
        (false, true) => domain.hi - 1.0,
        (false, false) => 0.0,
    };
    linear_fractional_pair_at(fc, domain, nu0)
}

pub fn linear_fractional_pair_at(fc: FractionalCoeffs, domain: Interval, nu0: f64) -> Result<WeingartenPair> {
    fc.validate()?;
    let inside = |x: f64| domain.contains(x);
    if fc.c != 0.0 && inside(-fc.d / fc.c) {
        return Err(GeomError::param(format!("pole nu={} inside domain {domain}", -fc.d / fc.c)));
    }
    if fc.c == 0.0 && fc.d == 0.0 {
        return Err(GeomError::param("C and D both zero"));
    }
    // f − g = (−Cν² + (A−D)ν + B)/(Cν+D)
    for root in real_roots(-fc.c, fc.a - fc.d, fc.b) {
        if inside(root) {
            return Err(GeomError::param(format!("f - g vanishes at nu={root} inside domain {domain}")));
        }
    }
    let pair = WeingartenPair { kind: PairKind::LinearFractional(fc), domain, nu0 };
    pair.validate(64)?;
    Ok(pair)
}

/// Real roots of a x² + b x + c (degenerate cases included).
pub fn real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let s = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + s * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Text catalog of the registry (one line per class).
pub fn catalog() -> Vec<String> {
    BasicClassId::ALL
        .iter()
        .map(|&id| {
            let (c, p) = make_basic_class(id, default_params(id)).expect("default params are valid");
            c.catalog_entry(&p)
        })
        .collect()
}
