//! Job configuration: TOML file sections overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use weingarten_core::classes::{BasicClassId, ClassParams};
use weingarten_core::grid::GridSpec;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub class: ClassSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub init: InitSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub seed: SeedSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub parallel: ParallelSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSection {
    pub name: Option<String>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub extent_u: Option<f64>,
    pub extent_v: Option<f64>,
    pub u0: Option<f64>,
    pub v0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub kind: Option<String>,
    pub amplitude: Option<f64>,
    pub width: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub omega: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    pub origin: Option<[f64; 3]>,
    pub rotation: Option<f64>,
    pub boost: Option<f64>,
    pub node: Option<[usize; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub tol: Option<f64>,
    pub margin: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParallelSection {
    pub offsets: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub dump: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Obj,
    Ply,
    Csv,
    Field,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(Format::Obj),
            "ply" => Ok(Format::Ply),
            "csv" => Ok(Format::Csv),
            "field" => Ok(Format::Field),
            _ => Err(CliError::Config(format!("unknown format '{s}' (obj, ply, csv, field)"))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Obj => "obj",
            Format::Ply => "ply",
            Format::Csv => "csv",
            Format::Field => "field",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitKind {
    /// λ ≡ λ₀, the image of the reference value ν₀.
    Constant,
    /// λ₀ plus a Gaussian bump across v (marching) or centred in the box (elliptic).
    Bump { amplitude: f64, width: f64 },
}

/// Fully resolved job settings.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub class: BasicClassId,
    pub params: ClassParams,
    pub grid: GridSpec,
    pub init: InitKind,
    pub omega: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub cap: f64,
    pub seed_origin: [f64; 3],
    pub seed_rotation: f64,
    pub seed_boost: f64,
    pub seed_node: (usize, usize),
    pub verify_tol: f64,
    pub margin: usize,
    pub offsets: Vec<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub dump: Option<PathBuf>,
}

pub const DEFAULT_CLASS: &str = "CMC_HALF";
pub const DEFAULT_ROWS: usize = 128;
pub const DEFAULT_EXTENT: f64 = 2.54;
pub const DEFAULT_AMPLITUDE: f64 = 0.3;
pub const DEFAULT_WIDTH: f64 = 0.5;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200_000;
pub const DEFAULT_CAP: f64 = weingarten_core::pde::LAMBDA_CAP;
pub const DEFAULT_VERIFY_TOL: f64 = 5e-3;
pub const DEFAULT_MARGIN: usize = 4;
pub const DEFAULT_OFFSETS: [f64; 3] = [0.1, -0.2, 0.35];

/// Flag values; `None` falls back to the config file, then to the defaults.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub class: Option<String>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub grid: Option<(usize, usize)>,
    pub extent: Option<(f64, f64)>,
    pub init: Option<String>,
    pub amplitude: Option<f64>,
    pub omega: Option<f64>,
    pub tol: Option<f64>,
    pub verify_tol: Option<f64>,
    pub margin: Option<usize>,
    pub offsets: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub dump: Option<PathBuf>,
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {x}")))
    }
}

impl JobConfig {
    pub fn resolve(file: &FileConfig, o: &Overrides) -> Result<JobConfig, CliError> {
        let name = o.class.clone().or_else(|| file.class.name.clone()).unwrap_or_else(|| DEFAULT_CLASS.into());
        let class = BasicClassId::parse(&name).map_err(|e| CliError::Config(e.to_string()))?;
        let beta = o.beta.or(file.class.beta);
        let gamma = o.gamma.or(file.class.gamma);
        let defaults = weingarten_core::classes::default_params(class);
        let params = ClassParams {
            beta: if class.needs_beta() { beta.or(defaults.beta) } else { None },
            gamma: if class.needs_gamma() { gamma.or(defaults.gamma) } else { None },
        };
        if beta.is_some() && !class.needs_beta() {
            return Err(CliError::Config(format!("class {} takes no beta", class.name())));
        }
        if gamma.is_some() && !class.needs_gamma() {
            return Err(CliError::Config(format!("class {} takes no gamma", class.name())));
        }

        let (rows, cols) = o.grid.unwrap_or((
            file.grid.rows.unwrap_or(DEFAULT_ROWS),
            file.grid.cols.or(file.grid.rows).unwrap_or(DEFAULT_ROWS),
        ));
        if rows < 3 || cols < 3 {
            return Err(CliError::Config(format!("grid {rows}x{cols}: both resolutions must be at least 3")));
        }
        let (lu, lv) = o.extent.unwrap_or((
            file.grid.extent_u.unwrap_or(DEFAULT_EXTENT),
            file.grid.extent_v.or(file.grid.extent_u).unwrap_or(DEFAULT_EXTENT),
        ));
        let (lu, lv) = (positive("extent", lu)?, positive("extent", lv)?);
        let grid = GridSpec::spanning(rows, cols, file.grid.u0.unwrap_or(0.0), file.grid.v0.unwrap_or(0.0), lu, lv)
            .map_err(|e| CliError::Config(e.to_string()))?;

        let kind = o.init.clone().or_else(|| file.init.kind.clone()).unwrap_or_else(|| "bump".into());
        let amplitude = o.amplitude.or(file.init.amplitude).unwrap_or(DEFAULT_AMPLITUDE);
        let width = positive("init.width", file.init.width.unwrap_or(DEFAULT_WIDTH))?;
        let init = match kind.as_str() {
            "constant" | "zero" => InitKind::Constant,
            "bump" => InitKind::Bump { amplitude, width },
            _ => return Err(CliError::Config(format!("unknown init kind '{kind}' (constant, bump)"))),
        };

        let omega = o.omega.or(file.solver.omega);
        if let Some(w) = omega {
            if !(1.0..2.0).contains(&w) {
                return Err(CliError::Config(format!("omega={w} outside [1, 2)")));
            }
        }
        let tol = positive("tol", o.tol.or(file.solver.tol).unwrap_or(DEFAULT_TOL))?;
        let cap = positive("solver.cap", file.solver.cap.unwrap_or(DEFAULT_CAP))?;
        let verify_tol = positive("verify tol", o.verify_tol.or(file.verify.tol).unwrap_or(DEFAULT_VERIFY_TOL))?;
        // The default margin shrinks on small grids; an explicit one must fit.
        let fit = (rows.min(cols) - 3) / 2;
        let margin = match o.margin.or(file.verify.margin) {
            Some(m) if m > fit => {
                return Err(CliError::Config(format!("margin {m} leaves no interior on a {rows}x{cols} grid")));
            }
            Some(m) => m,
            None => DEFAULT_MARGIN.min(fit),
        };

        let offsets = o.offsets.clone().or_else(|| file.parallel.offsets.clone()).unwrap_or(DEFAULT_OFFSETS.to_vec());
        if offsets.is_empty() || offsets.iter().any(|a| !a.is_finite()) {
            return Err(CliError::Config("offsets must be a non-empty list of finite numbers".into()));
        }

        let node = file.seed.node.unwrap_or([0, 0]);
        if node[0] >= rows || node[1] >= cols {
            return Err(CliError::Config(format!("seed node ({},{}) outside the grid", node[0], node[1])));
        }
        let format = o.format.as_deref().or(file.output.format.as_deref()).map(Format::parse).transpose()?;

        Ok(JobConfig {
            class,
            params,
            grid,
            init,
            omega,
            tol,
            max_iter: file.solver.max_iter.unwrap_or(DEFAULT_MAX_ITER),
            cap,
            seed_origin: file.seed.origin.unwrap_or([0.0; 3]),
            seed_rotation: file.seed.rotation.unwrap_or(0.0),
            seed_boost: file.seed.boost.unwrap_or(0.0),
            seed_node: (node[0], node[1]),
            verify_tol,
            margin,
            offsets,
            out: o.out.clone().or_else(|| file.output.out.clone()),
            format,
            dump: o.dump.clone().or_else(|| file.output.dump.clone()),
        })
    }
}

/// `NxM` or a single `N` for a square grid.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad resolution '{t}' in '{s}'"));
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => parse(s).map(|n| (n, n)),
    }
}

/// `LUxLV` or a single length for both directions.
pub fn parse_extent(s: &str) -> Result<(f64, f64), String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad extent '{t}' in '{s}'"));
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => parse(s).map(|l| (l, l)),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}' in '{s}'")))
        .collect()
}

pub fn parse_four(s: &str) -> Result<[f64; 4], String> {
    let v = parse_list(s)?;
    <[f64; 4]>::try_from(v).map_err(|v| format!("expected 4 comma-separated numbers, got {}", v.len()))
}
