//! Natural PDE residuals and solvers.

mod elliptic;
mod hyperbolic;
mod ode;
mod residual;

pub use elliptic::{dirichlet_grid, optimal_omega, solve_elliptic, EllipticOptions};
pub use hyperbolic::{solve_hyperbolic, BoundaryRule, HyperbolicOptions};
pub use ode::{ode38_rhs, solve_ode_38, OdeSolution};
pub use residual::{
    class_pde_residual, natural_residual_point, residual_33, residual_36, residual_variant,
    NuJet, ResidualReport, Variant,
};

use crate::classes::{BasicClass, WeingartenPair};
use crate::error::{GeomError, Result};
use crate::grid::{Grid2, GridSpec};

/// Default blow-up cap on |λ|.
pub const LAMBDA_CAP: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Nu,
    Lambda,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Nu => "nu",
            Quantity::Lambda => "lambda",
        }
    }
}

/// Samples of ν (or λ) on a uniform grid with the constants 𝔞, 𝔟 and ν₀.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub values: Grid2<f64>,
    pub u0: f64,
    pub v0: f64,
    pub du: f64,
    pub dv: f64,
    pub nu0: f64,
    pub a_const: f64,
    pub b_const: f64,
    pub quantity: Quantity,
    /// Class or pair label carried through files.
    pub class_tag: String,
    /// Class parameters carried through files (NaN when unused).
    pub beta: f64,
    pub gamma: f64,
}

impl GridField {
    pub fn new(spec: GridSpec, values: Grid2<f64>, nu0: f64, a_const: f64, b_const: f64) -> Result<Self> {
        if values.rows() != spec.rows || values.cols() != spec.cols {
            return Err(GeomError::param("values do not match the grid spec"));
        }
        if a_const == 0.0 || b_const == 0.0 || !a_const.is_finite() || !b_const.is_finite() {
            return Err(GeomError::param("a_const and b_const must be nonzero"));
        }
        spec.validate()?;
        Ok(GridField {
            values,
            u0: spec.u0,
            v0: spec.v0,
            du: spec.du,
            dv: spec.dv,
            nu0,
            a_const,
            b_const,
            quantity: Quantity::Nu,
            class_tag: String::new(),
            beta: f64::NAN,
            gamma: f64::NAN,
        })
    }

    pub fn from_fn(
        spec: GridSpec,
        nu0: f64,
        a_const: f64,
        b_const: f64,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let values = Grid2::from_fn(spec.rows, spec.cols, |i, j| f(spec.u(i), spec.v(j)));
        GridField::new(spec, values, nu0, a_const, b_const)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            rows: self.values.rows(),
            cols: self.values.cols(),
            u0: self.u0,
            v0: self.v0,
            du: self.du,
            dv: self.dv,
        }
    }

    pub fn with_values(&self, values: Grid2<f64>) -> GridField {
        GridField { values, ..self.clone() }
    }

    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    /// Fails unless the field holds ν samples.
    pub fn require_nu(&self) -> Result<()> {
        if self.quantity != Quantity::Nu {
            return Err(GeomError::pre("field holds lambda samples; convert to nu first"));
        }
        Ok(())
    }

    /// Checks that every sample lies in the pair domain with the recorded sign of f − g.
    pub fn check_against(&self, pair: &WeingartenPair) -> Result<()> {
        self.require_nu()?;
        let spec = self.spec();
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let nu = *self.values.get(i, j);
                pair.check_sample(nu).map_err(|e| {
                    GeomError::pre(format!("node ({i},{j}) at (u,v)=({},{}): {e}", spec.u(i), spec.v(j)))
                })?;
            }
        }
        Ok(())
    }
}

impl BasicClass {
    /// Wraps solver output λ as a field carrying this class's constants.
    pub fn lambda_field(&self, spec: GridSpec, values: Grid2<f64>) -> Result<GridField> {
        let mut f = GridField::new(spec, values, self.nu0, self.a_const, self.b_const)?;
        f.quantity = Quantity::Lambda;
        f.class_tag = self.id.name().to_string();
        f.beta = self.params.beta.unwrap_or(f64::NAN);
        f.gamma = self.params.gamma.unwrap_or(f64::NAN);
        Ok(f)
    }

    /// λ ↦ ν through the class substitution (identity on ν fields).
    pub fn to_nu_field(&self, field: &GridField) -> GridField {
        if field.quantity == Quantity::Nu {
            return field.clone();
        }
        let mut out = field.with_values(field.values.map(|l| self.nu_of_lambda(*l)));
        out.quantity = Quantity::Nu;
        out
    }

    pub fn to_lambda_field(&self, field: &GridField) -> GridField {
        if field.quantity == Quantity::Lambda {
            return field.clone();
        }
        let mut out = field.with_values(field.values.map(|n| self.lambda_of_nu(*n)));
        out.quantity = Quantity::Lambda;
        out
    }
}

/// Per-solve diagnostics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_update: f64,
    /// Boundary columns were produced by extrapolation.
    pub boundary_extrapolated: bool,
    /// Energy-like functional per march row (Δ̄ equations only).
    pub energy: Vec<f64>,
}
