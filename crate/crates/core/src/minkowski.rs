//! Linear algebra of ℝ³₁ with the metric diag(1, 1, −1).

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{GeomError, Result};

/// Frame checks default to this absolute tolerance.
pub const FRAME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LorentzVec {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl LorentzVec {
    pub const ZERO: LorentzVec = LorentzVec::new(0.0, 0.0, 0.0);
    pub const E1: LorentzVec = LorentzVec::new(1.0, 0.0, 0.0);
    pub const E2: LorentzVec = LorentzVec::new(0.0, 1.0, 0.0);
    pub const E3: LorentzVec = LorentzVec::new(0.0, 0.0, 1.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        LorentzVec { x1, x2, x3 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        LorentzVec::new(a[0], a[1], a[2])
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Largest absolute component; used for Euclidean-size comparisons.
    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs()).max(self.x3.abs())
    }

    pub fn dot(self, other: LorentzVec) -> f64 {
        lorentz_dot(self, other)
    }

    pub fn cross(self, other: LorentzVec) -> LorentzVec {
        lorentz_cross(self, other)
    }
}

impl Add for LorentzVec {
    type Output = LorentzVec;
    fn add(self, o: LorentzVec) -> LorentzVec {
        LorentzVec::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for LorentzVec {
    fn add_assign(&mut self, o: LorentzVec) {
        *self = *self + o;
    }
}

impl Sub for LorentzVec {
    type Output = LorentzVec;
    fn sub(self, o: LorentzVec) -> LorentzVec {
        LorentzVec::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for LorentzVec {
    type Output = LorentzVec;
    fn neg(self) -> LorentzVec {
        LorentzVec::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<LorentzVec> for f64 {
    type Output = LorentzVec;
    fn mul(self, v: LorentzVec) -> LorentzVec {
        LorentzVec::new(self * v.x1, self * v.x2, self * v.x3)
    }
}

pub fn lorentz_dot(a: LorentzVec, b: LorentzVec) -> f64 {
    a.x1 * b.x1 + a.x2 * b.x2 - a.x3 * b.x3
}

/// Lorentz cross product: the unique c with ⟨c, w⟩ = det[a b w] for all w.
///
/// For an orthonormal pair X (time-like), Y (space-like) this returns the
/// unit normal l with [X Y l] positively oriented. Parallel inputs give zero.
pub fn lorentz_cross(a: LorentzVec, b: LorentzVec) -> LorentzVec {
    let e = LorentzVec::new(
        a.x2 * b.x3 - a.x3 * b.x2,
        a.x3 * b.x1 - a.x1 * b.x3,
        a.x1 * b.x2 - a.x2 * b.x1,
    );
    LorentzVec::new(e.x1, e.x2, -e.x3)
}

pub fn det3(a: LorentzVec, b: LorentzVec, c: LorentzVec) -> f64 {
    a.x1 * (b.x2 * c.x3 - b.x3 * c.x2) - a.x2 * (b.x1 * c.x3 - b.x3 * c.x1)
        + a.x3 * (b.x1 * c.x2 - b.x2 * c.x1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovingFrame {
    pub x: LorentzVec,
    pub y: LorentzVec,
    pub l: LorentzVec,
}

impl MovingFrame {
    /// X = e3, Y = e1, l = e2.
    pub const STANDARD: MovingFrame = MovingFrame {
        x: LorentzVec::E3,
        y: LorentzVec::E1,
        l: LorentzVec::E2,
    };

    pub fn new(x: LorentzVec, y: LorentzVec, l: LorentzVec) -> Self {
        MovingFrame { x, y, l }
    }

    pub fn orientation(&self) -> f64 {
        det3(self.x, self.y, self.l)
    }

    /// Signature-aware Gram–Schmidt: keeps the direction of X, projects Y,
    /// then completes l by the cross product.
    pub fn renormalized(&self) -> MovingFrame {
        let xn = -lorentz_dot(self.x, self.x);
        let x = (1.0 / xn.abs().sqrt()) * self.x;
        let y0 = self.y + lorentz_dot(self.y, x) * x;
        let y = (1.0 / lorentz_dot(y0, y0).abs().sqrt()) * y0;
        let l = lorentz_cross(x, y);
        MovingFrame { x, y, l }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.l.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameReport {
    pub xx: f64,
    pub yy: f64,
    pub ll: f64,
    pub xy: f64,
    pub xl: f64,
    pub yl: f64,
    pub orientation: f64,
}

impl FrameReport {
    pub fn max_deviation(&self) -> f64 {
        [self.xx, self.yy, self.ll, self.xy, self.xl, self.yl]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation() <= tol && self.orientation > 0.0
    }
}

pub fn check_frame(f: &MovingFrame) -> FrameReport {
    FrameReport {
        xx: (lorentz_dot(f.x, f.x) + 1.0).abs(),
        yy: (lorentz_dot(f.y, f.y) - 1.0).abs(),
        ll: (lorentz_dot(f.l, f.l) - 1.0).abs(),
        xy: lorentz_dot(f.x, f.y).abs(),
        xl: lorentz_dot(f.x, f.l).abs(),
        yl: lorentz_dot(f.y, f.l).abs(),
        orientation: f.orientation().signum(),
    }
}

pub type Mat3 = [[f64; 3]; 3];

const ETA: [f64; 3] = [1.0, 1.0, -1.0];

fn mat_vec(m: &Mat3, v: LorentzVec) -> LorentzVec {
    let a = v.to_array();
    let r = |i: usize| m[i][0] * a[0] + m[i][1] * a[1] + m[i][2] * a[2];
    LorentzVec::new(r(0), r(1), r(2))
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn mat_det(m: &Mat3) -> f64 {
    let col = |j: usize| LorentzVec::new(m[0][j], m[1][j], m[2][j]);
    det3(col(0), col(1), col(2))
}

/// Orientation-preserving isometry p ↦ L·p + t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Motion {
    l: Mat3,
    t: LorentzVec,
}

impl Motion {
    pub fn new(l: Mat3, t: LorentzVec, tol: f64) -> Result<Self> {
        let dev = metric_defect(&l);
        if !(dev <= tol) {
            return Err(GeomError::param(format!(
                "matrix does not preserve the metric (defect {dev:e})"
            )));
        }
        let d = mat_det(&l);
        if (d - 1.0).abs() > tol.max(1e-12) * 10.0 {
            return Err(GeomError::param(format!("determinant {d} is not +1")));
        }
        Ok(Motion { l, t })
    }

    pub fn identity() -> Self {
        Motion {
            l: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            t: LorentzVec::ZERO,
        }
    }

    pub fn translation(t: LorentzVec) -> Self {
        Motion { t, ..Motion::identity() }
    }

    /// Boost mixing e1 and e3: e1 ↦ (cosh r, 0, sinh r).
    pub fn boost_13(rapidity: f64) -> Self {
        let (c, s) = (rapidity.cosh(), rapidity.sinh());
        Motion {
            l: [[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]],
            t: LorentzVec::ZERO,
        }
    }

    pub fn boost_23(rapidity: f64) -> Self {
        let (c, s) = (rapidity.cosh(), rapidity.sinh());
        Motion {
            l: [[1.0, 0.0, 0.0], [0.0, c, s], [0.0, s, c]],
            t: LorentzVec::ZERO,
        }
    }

    /// Euclidean rotation in the space-like (e1, e2) plane.
    pub fn rotation_12(angle: f64) -> Self {
        let (c, s) = (angle.cos(), angle.sin());
        Motion {
            l: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
            t: LorentzVec::ZERO,
        }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Motion) -> Motion {
        Motion {
            l: mat_mul(&self.l, &other.l),
            t: mat_vec(&self.l, other.t) + self.t,
        }
    }

    pub fn with_translation(mut self, t: LorentzVec) -> Motion {
        self.t = t;
        self
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.l
    }

    pub fn translation_part(&self) -> LorentzVec {
        self.t
    }

    pub fn apply_linear(&self, v: LorentzVec) -> LorentzVec {
        mat_vec(&self.l, v)
    }
}

/// max |LᵀηL − η| entrywise.
pub fn metric_defect(l: &Mat3) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let s: f64 = (0..3).map(|k| l[k][i] * ETA[k] * l[k][j]).sum();
            let target = if i == j { ETA[i] } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    if worst.is_nan() { f64::INFINITY } else { worst }
}

pub fn apply_motion(m: &Motion, p: LorentzVec) -> LorentzVec {
    mat_vec(&m.l, p) + m.t
}

pub fn apply_motion_frame(m: &Motion, f: &MovingFrame) -> MovingFrame {
    MovingFrame {
        x: mat_vec(&m.l, f.x),
        y: mat_vec(&m.l, f.y),
        l: mat_vec(&m.l, f.l),
    }
}
