//! End-to-end helpers: solve a class PDE, convert to ν, reconstruct, verify.

use crate::classes::{make_basic_class, BasicClass, BasicClassId, ClassParams, WeingartenPair};
use crate::error::{GeomError, Result};
use crate::grid::{Grid2, GridSpec};
use crate::pde::{
    dirichlet_grid, solve_elliptic, solve_hyperbolic, EllipticOptions, GridField, HyperbolicOptions,
    SolveReport,
};
use crate::reconstruction::{integrate_frame, invariants_from_nu, verify_bonnet, IntegrationOptions, Seed, SurfacePatch, VerificationReport};

/// Initial or boundary data for a class solve.
#[derive(Debug, Clone)]
pub enum SolveData {
    /// Cauchy data λ(u₀, v), λ_u(u₀, v) for marching operators.
    Cauchy { lambda: Vec<f64>, lambda_u: Vec<f64> },
    /// Dirichlet data on the edges of `initial`; interior holds the guess.
    Dirichlet { initial: Grid2<f64> },
}

impl SolveData {
    /// λ ≡ λ₀ in the form the class's operator needs.
    pub fn constant(class: &BasicClass, spec: &GridSpec, lambda0: f64) -> SolveData {
        if class.pde.operator.is_hyperbolic() {
            SolveData::Cauchy { lambda: vec![lambda0; spec.cols], lambda_u: vec![0.0; spec.cols] }
        } else {
            SolveData::Dirichlet { initial: dirichlet_grid(spec, |_, _| lambda0, lambda0) }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub hyperbolic: HyperbolicOptions,
    pub elliptic: EllipticOptions,
}

/// Solves the class PDE and returns the λ field with the class constants.
pub fn solve_class(
    class: &BasicClass,
    spec: &GridSpec,
    data: &SolveData,
    opts: &SolveOptions,
) -> Result<(GridField, SolveReport)> {
    let (lambda, report) = match data {
        SolveData::Cauchy { lambda, lambda_u } => {
            solve_hyperbolic(&class.pde, lambda, lambda_u, spec, &opts.hyperbolic)?
        }
        SolveData::Dirichlet { initial } => solve_elliptic(&class.pde, initial, spec, &opts.elliptic)?,
    };
    Ok((class.lambda_field(*spec, lambda)?, report))
}

/// Field value of λ at the reference node for a class.
pub fn lambda0(class: &BasicClass) -> f64 {
    class.lambda_of_nu(class.nu0)
}

pub fn class_with_defaults(id: BasicClassId, params: Option<ClassParams>) -> Result<(BasicClass, WeingartenPair)> {
    make_basic_class(id, params.unwrap_or_else(|| crate::classes::default_params(id)))
}

/// Invariants from the ν field, then frame integration from the default seed.
pub fn reconstruct(pair: &WeingartenPair, nu_field: &GridField) -> Result<SurfacePatch> {
    reconstruct_with(pair, nu_field, &Seed::default(), &IntegrationOptions::default())
}

pub fn reconstruct_with(
    pair: &WeingartenPair,
    nu_field: &GridField,
    seed: &Seed,
    opts: &IntegrationOptions,
) -> Result<SurfacePatch> {
    let inv = invariants_from_nu(pair, nu_field)?;
    integrate_frame(&inv, seed, opts)
}

/// Solve → ν → patch → verification for one class.
pub struct Pipeline {
    pub class: BasicClass,
    pub pair: WeingartenPair,
    pub lambda: GridField,
    pub nu: GridField,
    pub patch: SurfacePatch,
    pub report: VerificationReport,
}

pub fn run_pipeline(
    id: BasicClassId,
    params: Option<ClassParams>,
    spec: &GridSpec,
    data: Option<SolveData>,
    opts: &SolveOptions,
    margin: usize,
) -> Result<Pipeline> {
    let (class, pair) = class_with_defaults(id, params)?;
    let data = data.unwrap_or_else(|| SolveData::constant(&class, spec, lambda0(&class)));
    let (lambda, _) = solve_class(&class, spec, &data, opts)?;
    let nu = class.to_nu_field(&lambda);
    let patch = reconstruct(&pair, &nu)?;
    let report = verify_bonnet(&patch, Some((&pair, &nu)), margin)?;
    if !report.max().is_finite() {
        return Err(GeomError::num("verification produced non-finite deviations"));
    }
    Ok(Pipeline { class, pair, lambda, nu, patch, report })
}
