use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use weingarten_core::classes::{catalog, default_params, make_basic_class, BasicClass, BasicClassId, ClassParams, WeingartenPair};
use weingarten_core::classification::{classify, coeffs_to_relation, FractionalCoeffs, LinearRelation};
use weingarten_core::invariants::{check_gauss, check_natural_criterion};
use weingarten_core::io::{
    read_field, write_field, write_field_csv, write_obj, write_patch_csv, write_patch_dump, write_ply,
    write_residual_csv, write_sweep_csv, SweepRow,
};
use weingarten_core::minkowski::{apply_motion_frame, LorentzVec, Motion, MovingFrame};
use weingarten_core::parallel::{offset_patch, verify_parallel_pde};
use weingarten_core::pde::{
    dirichlet_grid, optimal_omega, residual_33, BoundaryRule, EllipticOptions, GridField, HyperbolicOptions,
};
use weingarten_core::pipeline::{lambda0, reconstruct_with, solve_class, SolveData, SolveOptions};
use weingarten_core::reconstruction::{verify_bonnet, IntegrationOptions, Seed, SurfacePatch};
use weingarten_core::GeomError;

use crate::config::{Format, InitKind, JobConfig};
use crate::error::CliError;

/// Writes the buffered bytes to `path`, or to stdout without one.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn cmd_classes(long: bool) -> String {
    if long {
        return catalog().join("\n") + "\n";
    }
    let mut s = String::new();
    for id in BasicClassId::ALL {
        let (class, _) = make_basic_class(id, default_params(id)).expect("default params are valid");
        // Pad the operator by visible width; the bars are combining marks.
        let op = class.pde.operator.symbol();
        let width = op.chars().filter(|c| !('\u{300}'..='\u{36f}').contains(c)).count();
        writeln!(
            s,
            "({:>2}) {:<24} {:<42} {op}{} {}",
            id.number(),
            id.name(),
            id.relation_text(),
            " ".repeat(3usize.saturating_sub(width)),
            class.pde.expanded()
        )
        .unwrap();
    }
    s
}

fn job_class(cfg: &JobConfig) -> Result<(BasicClass, WeingartenPair), CliError> {
    Ok(make_basic_class(cfg.class, cfg.params)?)
}

fn initial_data(class: &BasicClass, cfg: &JobConfig) -> SolveData {
    let spec = &cfg.grid;
    let l0 = lambda0(class);
    let (uc, vc) = (spec.u(0) + 0.5 * spec.du * (spec.rows - 1) as f64, spec.v(0) + 0.5 * spec.dv * (spec.cols - 1) as f64);
    match cfg.init {
        InitKind::Constant => SolveData::constant(class, spec, l0),
        InitKind::Bump { amplitude, width } => {
            if class.pde.operator.is_hyperbolic() {
                let lambda = (0..spec.cols).map(|j| l0 + amplitude * (-((spec.v(j) - vc) / width).powi(2)).exp()).collect();
                SolveData::Cauchy { lambda, lambda_u: vec![0.0; spec.cols] }
            } else {
                let bump = |u: f64, v: f64| l0 + amplitude * (-((u - uc).powi(2) + (v - vc).powi(2)) / (width * width)).exp();
                SolveData::Dirichlet { initial: dirichlet_grid(spec, bump, l0) }
            }
        }
    }
}

fn solve_options(cfg: &JobConfig) -> SolveOptions {
    SolveOptions {
        hyperbolic: HyperbolicOptions { cap: cfg.cap, boundary: BoundaryRule::Extrapolate },
        elliptic: EllipticOptions {
            omega: cfg.omega.unwrap_or_else(|| optimal_omega(&cfg.grid)),
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            source: None,
        },
    }
}

/// λ field for the configured class and initial data.
fn solve_lambda(cfg: &JobConfig) -> Result<(BasicClass, WeingartenPair, GridField), CliError> {
    let (class, pair) = job_class(cfg)?;
    let data = initial_data(&class, cfg);
    let (lambda, report) = solve_class(&class, &cfg.grid, &data, &solve_options(cfg))?;
    eprintln!(
        "solved {} on {}x{}: {} {}, last update {:.3e}{}",
        class.id,
        cfg.grid.rows,
        cfg.grid.cols,
        report.iterations,
        if class.pde.operator.is_hyperbolic() { "steps" } else { "sweeps" },
        report.final_update,
        if report.boundary_extrapolated { ", edges extrapolated" } else { "" }
    );
    Ok((class, pair, lambda))
}

/// Class and ν field either read from `field` or solved from the config.
fn nu_source(cfg: &JobConfig, field: Option<&Path>) -> Result<(BasicClass, WeingartenPair, GridField), CliError> {
    let Some(path) = field else {
        let (class, pair, lambda) = solve_lambda(cfg)?;
        let nu = class.to_nu_field(&lambda);
        return Ok((class, pair, nu));
    };
    let file = std::fs::File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let input = read_field(std::io::BufReader::new(file))?;
    let id = BasicClassId::parse(&input.class_tag)
        .map_err(|_| CliError::Config(format!("{}: field has no basic class tag", path.display())))?;
    let opt = |x: f64| (!x.is_nan()).then_some(x);
    let (class, pair) = make_basic_class(id, ClassParams { beta: opt(input.beta), gamma: opt(input.gamma) })?;
    let nu = class.to_nu_field(&input);
    nu.check_against(&pair)?;
    Ok((class, pair, nu))
}

fn seed(cfg: &JobConfig) -> Seed {
    let m = Motion::rotation_12(cfg.seed_rotation).compose(&Motion::boost_13(cfg.seed_boost));
    let [x1, x2, x3] = cfg.seed_origin;
    Seed { z: LorentzVec::new(x1, x2, x3), frame: apply_motion_frame(&m, &MovingFrame::STANDARD), node: cfg.seed_node }
}

fn patch_of(cfg: &JobConfig, pair: &WeingartenPair, nu: &GridField) -> Result<SurfacePatch, CliError> {
    let patch = reconstruct_with(pair, nu, &seed(cfg), &IntegrationOptions::default())?;
    if patch.signs.violating > 0 {
        eprintln!("warning: {} nodes violate the time-like sign conditions", patch.signs.violating);
    }
    Ok(patch)
}

fn mesh_bytes(patch: &SurfacePatch, format: Format) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Obj => write_obj(&mut buf, patch)?,
        Format::Ply => write_ply(&mut buf, patch)?,
        Format::Csv => write_patch_csv(&mut buf, patch)?,
        Format::Field => return Err(CliError::Config("format 'field' does not apply to surfaces".into())),
    }
    Ok(buf)
}

pub fn cmd_solve(cfg: &JobConfig, as_nu: bool) -> Result<(), CliError> {
    let (class, _, lambda) = solve_lambda(cfg)?;
    let out = if as_nu { class.to_nu_field(&lambda) } else { lambda };
    let mut buf = Vec::new();
    match cfg.format.unwrap_or(Format::Field) {
        Format::Field => write_field(&mut buf, &out)?,
        Format::Csv => write_field_csv(&mut buf, &out)?,
        f => return Err(CliError::Config(format!("solve writes field or csv, not {}", f.extension()))),
    }
    emit(cfg.out.as_deref(), &buf)
}

pub fn cmd_reconstruct(cfg: &JobConfig, field: Option<&Path>) -> Result<(), CliError> {
    let (_, pair, nu) = nu_source(cfg, field)?;
    let patch = patch_of(cfg, &pair, &nu)?;
    let mesh = mesh_bytes(&patch, cfg.format.unwrap_or(Format::Obj))?;
    let dump_path = cfg.dump.clone().or_else(|| cfg.out.as_ref().map(|p| p.with_extension("patch")));
    let mut dump = Vec::new();
    if dump_path.is_some() {
        write_patch_dump(&mut dump, &patch)?;
    }
    eprintln!(
        "reconstructed {}x{} patch: frame deviation {:.3e}, {} renormalizations",
        patch.spec.rows,
        patch.spec.cols,
        patch.max_frame_deviation(),
        patch.renormalizations
    );
    emit(cfg.out.as_deref(), &mesh)?;
    if let Some(p) = dump_path {
        emit(Some(&p), &dump)?;
    }
    Ok(())
}

pub fn cmd_verify(cfg: &JobConfig, field: Option<&Path>) -> Result<(), CliError> {
    let (class, pair, nu) = nu_source(cfg, field)?;
    let patch = patch_of(cfg, &pair, &nu)?;
    let m = cfg.margin;
    let rep = verify_bonnet(&patch, Some((&pair, &nu)), m)?;
    let natural = residual_33(&pair, &nu)?;
    let gauss = check_gauss(&patch.fields, m)?;
    let f = &patch.fields;
    let crit = check_natural_criterion(&f.e, &f.g, &f.nu1, &f.nu2, m)?;
    let spec = nu.spec();

    let mut s = String::new();
    writeln!(s, "class             : {}", class.id).unwrap();
    writeln!(s, "grid              : {}x{} du={} dv={}", spec.rows, spec.cols, spec.du, spec.dv).unwrap();
    writeln!(s, "margin            : {m}").unwrap();
    for (name, v) in [
        ("nu1", rep.nu1),
        ("nu2", rep.nu2),
        ("gamma1", rep.gamma1),
        ("gamma2", rep.gamma2),
        ("F", rep.f_mixed),
        ("M", rep.m_mixed),
    ] {
        writeln!(s, "{name:<18}: {v:.6e}").unwrap();
    }
    writeln!(s, "max deviation     : {:.6e}", rep.max()).unwrap();
    writeln!(s, "frame deviation   : {:.6e}", patch.max_frame_deviation()).unwrap();
    writeln!(s, "natural residual  : {:.6e}", natural.max_abs).unwrap();
    writeln!(s, "gauss residual    : {:.6e}", gauss.max_abs).unwrap();
    writeln!(s, "natural criterion : {:.6e}", crit.relative_spread).unwrap();
    writeln!(s, "tolerance         : {:.6e}", cfg.verify_tol).unwrap();
    let pass = rep.passes(cfg.verify_tol);
    writeln!(s, "status            : {}", if pass { "PASS" } else { "FAIL" }).unwrap();

    if let Some(p) = &cfg.out {
        match cfg.format.unwrap_or(Format::Csv) {
            Format::Csv => {
                let mut buf = Vec::new();
                write_residual_csv(&mut buf, &[("natural", &natural), ("gauss", &gauss)])?;
                emit(Some(p), &buf)?;
            }
            f => return Err(CliError::Config(format!("verify writes csv, not {}", f.extension()))),
        }
    }
    emit(None, s.as_bytes())?;
    if !pass {
        return Err(GeomError::Verification(format!(
            "max deviation {:.3e} exceeds {:.3e}",
            rep.max(),
            cfg.verify_tol
        ))
        .into());
    }
    Ok(())
}

pub fn cmd_parallel(cfg: &JobConfig, field: Option<&Path>) -> Result<(), CliError> {
    let (_, pair, nu) = nu_source(cfg, field)?;
    let patch = patch_of(cfg, &pair, &nu)?;
    let format = cfg.format.unwrap_or(Format::Obj);
    let mut rows = Vec::new();
    let mut meshes: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    for (k, &a) in cfg.offsets.iter().enumerate() {
        let (off, po) = offset_patch(&patch, a)?;
        let rep = verify_parallel_pde(&pair, &nu, a)?;
        let f = &off.fields;
        let crit = check_natural_criterion(&f.e, &f.g, &f.nu1, &f.nu2, cfg.margin)?;
        eprintln!(
            "a={a}: eps={} residual {:.3e}, identity {:.3e}, natural spread {:.3e}",
            po.eps, rep.parallel.max_abs, rep.identity_rel, crit.relative_spread
        );
        rows.push(SweepRow { a, max_residual: rep.parallel.max_abs, natural_spread: crit.relative_spread });
        if let Some(dir) = &cfg.out {
            meshes.push((dir.join(format!("offset_{k}.{}", format.extension())), mesh_bytes(&off, format)?));
        }
    }
    let mut sweep = Vec::new();
    write_sweep_csv(&mut sweep, &rows)?;
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            for (p, bytes) in &meshes {
                emit(Some(p), bytes)?;
            }
            emit(Some(&dir.join("sweep.csv")), &sweep)
        }
        None => emit(None, &sweep),
    }
}

/// `relation` holds α, β, γ, δ of δK = αH + βH′ + γ; `coeffs` holds A, B, C, D of ν₁ = (Aν₂+B)/(Cν₂+D).
pub fn cmd_classify(relation: Option<[f64; 4]>, coeffs: Option<[f64; 4]>, out: Option<&Path>) -> Result<(), CliError> {
    let rel = match (relation, coeffs) {
        (Some([a, b, c, d]), None) => LinearRelation::new(a, b, c, d)?,
        (None, Some([a, b, c, d])) => coeffs_to_relation(&FractionalCoeffs::new(a, b, c, d))?,
        _ => return Err(CliError::Config("give exactly one of a relation or --coeffs".into())),
    };
    let text = classify(&rel)?.render()?;
    emit(out, text.as_bytes())
}
