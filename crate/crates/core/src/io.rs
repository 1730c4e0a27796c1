//! File formats: grid fields, meshes, patch dumps and CSV reports.

use std::io::{BufRead, Write};

use crate::error::{GeomError, Result};
use crate::grid::Grid2;
use crate::pde::{GridField, Quantity, ResidualReport};
use crate::reconstruction::SurfacePatch;

pub const FIELD_MAGIC: &str = "# weingarten-field v1";

fn io_err(e: std::io::Error) -> GeomError {
    GeomError::Format(format!("i/o: {e}"))
}

fn csv_err(e: csv::Error) -> GeomError {
    GeomError::Format(format!("csv: {e}"))
}

/// 17 significant digits; parses back to the same bits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header `key = value` lines, a `values` marker, then one text row per grid row.
pub fn write_field<W: Write>(mut w: W, field: &GridField) -> Result<()> {
    let tag = if field.class_tag.is_empty() { "-" } else { field.class_tag.as_str() };
    let mut out = String::new();
    out.push_str(FIELD_MAGIC);
    out.push('\n');
    let header: [(&str, String); 13] = [
        ("class", tag.to_string()),
        ("beta", num(field.beta)),
        ("gamma", num(field.gamma)),
        ("quantity", field.quantity.name().to_string()),
        ("rows", field.rows().to_string()),
        ("cols", field.cols().to_string()),
        ("u0", num(field.u0)),
        ("v0", num(field.v0)),
        ("du", num(field.du)),
        ("dv", num(field.dv)),
        ("nu0", num(field.nu0)),
        ("a_const", num(field.a_const)),
        ("b_const", num(field.b_const)),
    ];
    for (k, v) in header {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out.push_str("values\n");
    for i in 0..field.rows() {
        let row: Vec<String> = field.values.row(i).iter().map(|x| num(*x)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    w.write_all(out.as_bytes()).map_err(io_err)
}

pub fn field_to_string(field: &GridField) -> String {
    let mut buf = Vec::new();
    write_field(&mut buf, field).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn read_field<R: BufRead>(r: R) -> Result<GridField> {
    let mut lines = r.lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| GeomError::Format(format!("unexpected end of file, expected {what}")))?
            .map_err(io_err)
    };
    let magic = next("header")?;
    if magic.trim() != FIELD_MAGIC {
        return Err(GeomError::Format(format!("not a field file (first line '{magic}')")));
    }
    let mut keys = std::collections::BTreeMap::new();
    loop {
        let line = next("values marker")?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "values" {
            break;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| GeomError::Format(format!("malformed header line '{line}'")))?;
        keys.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| {
        keys.get(k).cloned().ok_or_else(|| GeomError::Format(format!("missing header key '{k}'")))
    };
    let real = |k: &str| -> Result<f64> {
        let s = get(k)?;
        s.parse::<f64>().map_err(|_| GeomError::Format(format!("key '{k}': bad number '{s}'")))
    };
    let int = |k: &str| -> Result<usize> {
        let s = get(k)?;
        s.parse::<usize>().map_err(|_| GeomError::Format(format!("key '{k}': bad integer '{s}'")))
    };
    let (rows, cols) = (int("rows")?, int("cols")?);
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let line = next("value row")?;
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(
                tok.parse::<f64>()
                    .map_err(|_| GeomError::Format(format!("row {i}: bad value '{tok}'")))?,
            );
        }
        if data.len() - before != cols {
            return Err(GeomError::Format(format!("row {i} has {} values, expected {cols}", data.len() - before)));
        }
    }
    let spec = crate::grid::GridSpec::new(rows, cols, real("u0")?, real("v0")?, real("du")?, real("dv")?)
        .map_err(|e| GeomError::Format(format!("grid header: {e}")))?;
    let values = Grid2::from_vec(rows, cols, data)?;
    let mut f = GridField::new(spec, values, real("nu0")?, real("a_const")?, real("b_const")?)
        .map_err(|e| GeomError::Format(format!("field header: {e}")))?;
    f.quantity = match get("quantity")?.as_str() {
        "nu" => Quantity::Nu,
        "lambda" => Quantity::Lambda,
        q => return Err(GeomError::Format(format!("unknown quantity '{q}'"))),
    };
    let tag = get("class")?;
    f.class_tag = if tag == "-" { String::new() } else { tag };
    f.beta = real("beta")?;
    f.gamma = real("gamma")?;
    Ok(f)
}

pub fn field_from_str(s: &str) -> Result<GridField> {
    read_field(s.as_bytes())
}

/// Triangles (1-based) splitting each grid quad.
fn triangles(rows: usize, cols: usize) -> Vec<[usize; 3]> {
    let id = |i: usize, j: usize| i * cols + j;
    let mut t = Vec::with_capacity(2 * (rows - 1) * (cols - 1));
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            t.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            t.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    t
}

/// Wavefront OBJ with (x1, x2, x3) as Euclidean vertex coordinates.
pub fn write_obj<W: Write>(mut w: W, patch: &SurfacePatch) -> Result<()> {
    let mut out = String::new();
    for p in patch.z.iter() {
        out.push_str(&format!("v {} {} {}\n", num(p.x1), num(p.x2), num(p.x3)));
    }
    for t in triangles(patch.spec.rows, patch.spec.cols) {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    w.write_all(out.as_bytes()).map_err(io_err)
}

pub fn write_ply<W: Write>(mut w: W, patch: &SurfacePatch) -> Result<()> {
    let (rows, cols) = (patch.spec.rows, patch.spec.cols);
    let tris = triangles(rows, cols);
    let mut out = format!(
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        rows * cols,
        tris.len()
    );
    for p in patch.z.iter() {
        out.push_str(&format!("{} {} {}\n", num(p.x1), num(p.x2), num(p.x3)));
    }
    for t in tris {
        out.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
    }
    w.write_all(out.as_bytes()).map_err(io_err)
}

pub const PATCH_CSV_HEADER: [&str; 13] =
    ["i", "j", "u", "v", "x1", "x2", "x3", "nu1", "nu2", "gamma1", "gamma2", "E", "G"];

/// One CSV record per node: index, parameters, position and invariants.
pub fn write_patch_csv<W: Write>(w: W, patch: &SurfacePatch) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(PATCH_CSV_HEADER).map_err(csv_err)?;
    let f = &patch.fields;
    for i in 0..patch.spec.rows {
        for j in 0..patch.spec.cols {
            let p = patch.z.get(i, j);
            let vals = [
                patch.spec.u(i),
                patch.spec.v(j),
                p.x1,
                p.x2,
                p.x3,
                *f.nu1.get(i, j),
                *f.nu2.get(i, j),
                *f.gamma1.get(i, j),
                *f.gamma2.get(i, j),
                *f.e.get(i, j),
                *f.g.get(i, j),
            ];
            let mut rec = vec![i.to_string(), j.to_string()];
            rec.extend(vals.iter().map(|x| num(*x)));
            wr.write_record(&rec).map_err(csv_err)?;
        }
    }
    wr.flush().map_err(io_err)
}

/// GridField as CSV: i, j, u, v, value.
pub fn write_field_csv<W: Write>(w: W, field: &GridField) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["i", "j", "u", "v", field.quantity.name()]).map_err(csv_err)?;
    let spec = field.spec();
    for i in 0..field.rows() {
        for j in 0..field.cols() {
            wr.write_record([
                i.to_string(),
                j.to_string(),
                num(spec.u(i)),
                num(spec.v(j)),
                num(*field.values.get(i, j)),
            ])
            .map_err(csv_err)?;
        }
    }
    wr.flush().map_err(io_err)
}

/// Named residual fields side by side, interior nodes only.
pub fn write_residual_csv<W: Write>(w: W, reports: &[(&str, &ResidualReport)]) -> Result<()> {
    let Some((_, first)) = reports.first() else {
        return Err(GeomError::pre("no residual reports to write"));
    };
    let mut wr = csv::Writer::from_writer(w);
    let mut head = vec!["i".to_string(), "j".to_string()];
    head.extend(reports.iter().map(|(n, _)| n.to_string()));
    wr.write_record(&head).map_err(csv_err)?;
    let m = first.margin;
    for i in m..first.field.rows().saturating_sub(m) {
        for j in m..first.field.cols().saturating_sub(m) {
            let mut rec = vec![i.to_string(), j.to_string()];
            rec.extend(reports.iter().map(|(_, r)| num(r.at(i, j))));
            wr.write_record(&rec).map_err(csv_err)?;
        }
    }
    wr.flush().map_err(io_err)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub a: f64,
    pub max_residual: f64,
    pub natural_spread: f64,
}

pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["a", "max_residual", "natural_spread"]).map_err(csv_err)?;
    for r in rows {
        wr.write_record([num(r.a), num(r.max_residual), num(r.natural_spread)]).map_err(csv_err)?;
    }
    wr.flush().map_err(io_err)
}

/// Text dump: header, then per node `i j u v z X Y l nu1 nu2 gamma1 gamma2 E G`.
pub fn write_patch_dump<W: Write>(mut w: W, patch: &SurfacePatch) -> Result<()> {
    let s = &patch.spec;
    let mut out = format!(
        "# weingarten-patch v1\nrows = {}\ncols = {}\nu0 = {}\nv0 = {}\ndu = {}\ndv = {}\n\
         renormalizations = {}\nmax_drift = {}\nsign_violations = {}\nnodes\n",
        s.rows,
        s.cols,
        num(s.u0),
        num(s.v0),
        num(s.du),
        num(s.dv),
        patch.renormalizations,
        num(patch.max_drift),
        patch.signs.violating
    );
    let f = &patch.fields;
    for i in 0..s.rows {
        for j in 0..s.cols {
            let fr = patch.frames.get(i, j);
            let mut vals: Vec<f64> = vec![s.u(i), s.v(j)];
            for v in [*patch.z.get(i, j), fr.x, fr.y, fr.l] {
                vals.extend(v.to_array());
            }
            vals.extend([
                *f.nu1.get(i, j),
                *f.nu2.get(i, j),
                *f.gamma1.get(i, j),
                *f.gamma2.get(i, j),
                *f.e.get(i, j),
                *f.g.get(i, j),
            ]);
            let txt: Vec<String> = vals.iter().map(|x| num(*x)).collect();
            out.push_str(&format!("{i} {j} {}\n", txt.join(" ")));
        }
    }
    w.write_all(out.as_bytes()).map_err(io_err)
}
