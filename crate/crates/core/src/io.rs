//! Snapshot, slice and convergence files, plus the `key = value` run file.
//!
//! Text files start with `#`-prefixed `key = value` header lines followed by
//! one comma-separated column header and the data rows. Floats in data rows
//! carry 17 significant digits, so a write/read cycle is exact.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{ConvergenceReport, Slice, SliceAxis, Snapshot, SNAPSHOT_COLUMNS};
use crate::error::{Result, SolverError};
use crate::field::ScalarField;
use crate::grid::{BoundaryKind, GridSpec};

pub const FORMAT_VERSION: u32 = 1;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(path: &Path, reason: impl Into<String>) -> SolverError {
    SolverError::Parse {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| SolverError::io(dir, e))?;
    }
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| SolverError::io(path, e))
}

fn finish(mut w: BufWriter<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| SolverError::io(path, e))
}

/// Header lines and data rows of a text file.
struct TextFile {
    header: BTreeMap<String, String>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl TextFile {
    fn get(&self, key: &str, path: &Path) -> Result<&str> {
        self.header
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| parse_err(path, format!("missing header key '{key}'")))
    }

    fn get_f64(&self, key: &str, path: &Path) -> Result<f64> {
        let s = self.get(key, path)?;
        s.parse()
            .map_err(|_| parse_err(path, format!("header '{key}': not a number: '{s}'")))
    }

    fn get_usize(&self, key: &str, path: &Path) -> Result<usize> {
        let s = self.get(key, path)?;
        s.parse()
            .map_err(|_| parse_err(path, format!("header '{key}': not a count: '{s}'")))
    }
}

fn parse_header_line(line: &str) -> Option<(String, String)> {
    let body = line.strip_prefix('#')?;
    let (k, v) = body.split_once('=')?;
    Some((k.trim().to_string(), v.trim().to_string()))
}

fn read_text(path: &Path, kind: &str) -> Result<TextFile> {
    let text = fs::read_to_string(path).map_err(|e| SolverError::io(path, e))?;
    let mut header = BTreeMap::new();
    let mut columns = None;
    let mut rows = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == format!("# trsw {kind}") => {}
        _ => return Err(parse_err(path, format!("not a trsw {kind} file"))),
    }
    for (n, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some((k, v)) = parse_header_line(line) {
                header.insert(k, v);
            }
            continue;
        }
        if columns.is_none() {
            columns = Some(line.split(',').map(|c| c.trim().to_string()).collect::<Vec<_>>());
            continue;
        }
        let width = columns.as_ref().map_or(0, Vec::len);
        let row = line
            .split(',')
            .map(|c| {
                let c = c.trim();
                if c.is_empty() {
                    Ok(f64::NAN)
                } else {
                    c.parse::<f64>()
                        .map_err(|_| parse_err(path, format!("line {}: bad number '{c}'", n + 1)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != width {
            return Err(parse_err(
                path,
                format!("line {}: {} values, expected {width}", n + 1, row.len()),
            ));
        }
        rows.push(row);
    }
    let columns = columns.ok_or_else(|| parse_err(path, "no column header"))?;
    let version = header
        .get("format_version")
        .ok_or_else(|| parse_err(path, "missing format_version"))?;
    if version != &FORMAT_VERSION.to_string() {
        return Err(parse_err(path, format!("unsupported format_version {version}")));
    }
    Ok(TextFile { header, columns, rows })
}

fn parse_boundary(s: &str, path: &Path) -> Result<BoundaryKind> {
    match s {
        "periodic" => Ok(BoundaryKind::Periodic),
        "extrapolate" => Ok(BoundaryKind::Extrapolate),
        other => Err(parse_err(path, format!("unknown boundary kind '{other}'"))),
    }
}

fn snapshot_header(snap: &Snapshot) -> String {
    let g = &snap.grid;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| s.push_str(&format!("# {k} = {v}\n"));
    kv("format_version", FORMAT_VERSION.to_string());
    kv("scheme", snap.scheme.clone());
    kv("eps", snap.eps.to_string());
    kv("nu", snap.nu.to_string());
    kv("beta_bar", snap.beta_bar.to_string());
    kv("t", snap.t.to_string());
    kv("nx", g.nx.to_string());
    kv("ny", g.ny.to_string());
    kv("x_min", g.x_min.to_string());
    kv("x_max", g.x_max.to_string());
    kv("y_min", g.y_min.to_string());
    kv("y_max", g.y_max.to_string());
    kv("bc_x", g.bc_x.name().to_string());
    kv("bc_y", g.bc_y.name().to_string());
    s
}

fn snapshot_rows(snap: &Snapshot) -> impl Iterator<Item = [f64; 10]> + '_ {
    let g = snap.grid;
    let fields = snap.fields();
    (0..g.ny).flat_map(move |k| {
        (0..g.nx).map(move |j| {
            let mut row = [0.0; 10];
            row[0] = g.x_center(j);
            row[1] = g.y_center(k);
            for (slot, f) in row[2..].iter_mut().zip(fields) {
                *slot = f.at(j, k);
            }
            row
        })
    })
}

/// Writes `snap` as a text snapshot: rows run over `x` fastest.
pub fn write_snapshot(snap: &Snapshot, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| SolverError::io(path, e);
    write!(w, "# trsw snapshot\n{}", snapshot_header(snap)).map_err(io)?;
    writeln!(w, "{}", SNAPSHOT_COLUMNS.join(",")).map_err(io)?;
    for row in snapshot_rows(snap) {
        let line: Vec<String> = row.iter().map(|&x| num(x)).collect();
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    finish(w, path)
}

fn snapshot_from_parts(file: &TextFile, data: &[Vec<f64>], path: &Path) -> Result<Snapshot> {
    let grid = GridSpec::new(
        file.get_usize("nx", path)?,
        file.get_usize("ny", path)?,
        (file.get_f64("x_min", path)?, file.get_f64("x_max", path)?),
        (file.get_f64("y_min", path)?, file.get_f64("y_max", path)?),
        parse_boundary(file.get("bc_x", path)?, path)?,
        parse_boundary(file.get("bc_y", path)?, path)?,
    )
    .map_err(|e| parse_err(path, e.to_string()))?;
    if data.is_empty() {
        return Err(parse_err(path, "snapshot has no data rows"));
    }
    if data.len() != grid.cell_count() {
        return Err(parse_err(
            path,
            format!("{} rows for a {}×{} grid", data.len(), grid.nx, grid.ny),
        ));
    }
    let field = |c: usize| ScalarField::from_cells(&grid, |j, k| data[k * grid.nx + j][c]);
    Ok(Snapshot {
        t: file.get_f64("t", path)?,
        grid,
        scheme: file.get("scheme", path)?.to_string(),
        eps: file.get_f64("eps", path)?,
        nu: file.get_f64("nu", path)?,
        beta_bar: file.get_f64("beta_bar", path)?,
        h: field(2),
        u: field(3),
        v: field(4),
        big_theta: field(5),
        phi: field(6),
        theta: field(7),
        q: field(8),
        omega: field(9),
    })
}

fn check_columns(found: &[String], path: &Path) -> Result<()> {
    if found.iter().map(String::as_str).ne(SNAPSHOT_COLUMNS) {
        return Err(parse_err(
            path,
            format!("columns {found:?}, expected {SNAPSHOT_COLUMNS:?}"),
        ));
    }
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    let path = path.as_ref();
    let file = read_text(path, "snapshot")?;
    check_columns(&file.columns, path)?;
    snapshot_from_parts(&file, &file.rows, path)
}

/// Sidecar header path of a binary snapshot: `name.bin` → `name.bin.hdr`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".hdr");
    PathBuf::from(s)
}

/// Writes `snap` as raw little-endian `f64` rows (same column order as the
/// text format) and the header to [`sidecar_path`].
pub fn write_snapshot_binary(snap: &Snapshot, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let hdr = sidecar_path(path);
    let mut h = create(&hdr)?;
    write!(
        h,
        "# trsw snapshot\n{}# encoding = f64-le\n# rows = {}\n{}\n",
        snapshot_header(snap),
        snap.grid.cell_count(),
        SNAPSHOT_COLUMNS.join(",")
    )
    .map_err(|e| SolverError::io(&hdr, e))?;
    finish(h, &hdr)?;

    let mut w = create(path)?;
    for row in snapshot_rows(snap) {
        for x in row {
            w.write_all(&x.to_le_bytes()).map_err(|e| SolverError::io(path, e))?;
        }
    }
    finish(w, path)
}

pub fn read_snapshot_binary(path: impl AsRef<Path>) -> Result<Snapshot> {
    let path = path.as_ref();
    let hdr = sidecar_path(path);
    let file = read_text(&hdr, "snapshot")?;
    check_columns(&file.columns, &hdr)?;
    if file.get("encoding", &hdr)? != "f64-le" {
        return Err(parse_err(&hdr, "unsupported encoding"));
    }
    let bytes = fs::read(path).map_err(|e| SolverError::io(path, e))?;
    let width = SNAPSHOT_COLUMNS.len();
    if bytes.len() % (8 * width) != 0 {
        return Err(parse_err(
            path,
            format!("{} bytes is not a whole number of rows", bytes.len()),
        ));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let data: Vec<Vec<f64>> = values.chunks_exact(width).map(<[f64]>::to_vec).collect();
    if data.len() != file.get_usize("rows", &hdr)? {
        return Err(parse_err(path, "row count disagrees with the sidecar header"));
    }
    snapshot_from_parts(&file, &data, path)
}

/// Writes a slice with the full `x, y, h, …, omega` column set; the fixed
/// coordinate is repeated on every row.
pub fn write_slice(slice: &Slice, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| SolverError::io(path, e);
    let axis = match slice.axis {
        SliceAxis::AlongX => "x",
        SliceAxis::AlongY => "y",
    };
    write!(
        w,
        "# trsw slice\n# format_version = {FORMAT_VERSION}\n# along = {axis}\n# at = {}\n# t = {}\n{}\n",
        slice.at,
        slice.t,
        SNAPSHOT_COLUMNS.join(",")
    )
    .map_err(io)?;
    for (i, &p) in slice.positions.iter().enumerate() {
        let (x, y) = match slice.axis {
            SliceAxis::AlongX => (p, slice.at),
            SliceAxis::AlongY => (slice.at, p),
        };
        let mut line = vec![num(x), num(y)];
        line.extend(slice.columns.iter().map(|(_, v)| num(v[i])));
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    finish(w, path)
}

pub fn read_slice(path: impl AsRef<Path>) -> Result<Slice> {
    let path = path.as_ref();
    let file = read_text(path, "slice")?;
    check_columns(&file.columns, path)?;
    let axis = match file.get("along", path)? {
        "x" => SliceAxis::AlongX,
        "y" => SliceAxis::AlongY,
        other => return Err(parse_err(path, format!("unknown slice axis '{other}'"))),
    };
    let pos_col = if axis == SliceAxis::AlongX { 0 } else { 1 };
    let columns = SNAPSHOT_COLUMNS[2..]
        .iter()
        .enumerate()
        .map(|(c, name)| (name.to_string(), file.rows.iter().map(|r| r[c + 2]).collect()))
        .collect();
    Ok(Slice {
        axis,
        at: file.get_f64("at", path)?,
        t: file.get_f64("t", path)?,
        positions: file.rows.iter().map(|r| r[pos_col]).collect(),
        columns,
    })
}

/// One row per mesh: `mesh, <field>_error, <field>_eoc, …`. The first row
/// has empty EOC cells.
pub fn write_convergence(report: &ConvergenceReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| SolverError::io(path, e);
    write!(
        w,
        "# trsw convergence\n# format_version = {FORMAT_VERSION}\n# scenario = {}\n# eps = {}\n# reference_mesh = {}\n",
        report.scenario, report.eps, report.reference_mesh
    )
    .map_err(io)?;
    let mut cols = vec!["mesh".to_string()];
    for (name, _) in &report.fields {
        cols.push(format!("{name}_error"));
        cols.push(format!("{name}_eoc"));
    }
    writeln!(w, "{}", cols.join(",")).map_err(io)?;
    let eocs: Vec<Vec<f64>> = report.fields.iter().map(|(_, e)| crate::diagnostics::eoc(e)).collect();
    for (i, mesh) in report.meshes.iter().enumerate() {
        let mut line = vec![mesh.to_string()];
        for (f, (_, errs)) in report.fields.iter().enumerate() {
            line.push(num(errs[i]));
            line.push(i.checked_sub(1).map_or(String::new(), |p| num(eocs[f][p])));
        }
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    finish(w, path)
}

pub fn read_convergence(path: impl AsRef<Path>) -> Result<ConvergenceReport> {
    let path = path.as_ref();
    let file = read_text(path, "convergence")?;
    if file.columns.first().map(String::as_str) != Some("mesh") || file.columns.len() % 2 != 1 {
        return Err(parse_err(path, "expected mesh followed by error/eoc column pairs"));
    }
    let fields = file.columns[1..]
        .chunks(2)
        .enumerate()
        .map(|(f, pair)| {
            let name = pair[0]
                .strip_suffix("_error")
                .ok_or_else(|| parse_err(path, format!("column '{}' is not an error column", pair[0])))?;
            Ok((name.to_string(), file.rows.iter().map(|r| r[1 + 2 * f]).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        scenario: file.get("scenario", path)?.to_string(),
        eps: file.get_f64("eps", path)?,
        meshes: file.rows.iter().map(|r| r[0] as usize).collect(),
        reference_mesh: file.get_usize("reference_mesh", path)?,
        fields,
    })
}

/// Settings read from a run file. Every key is optional; absent keys keep
/// the scenario defaults or command-line values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunFile {
    pub scenario: Option<String>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub eps: Option<f64>,
    pub nu: Option<f64>,
    pub beta_bar: Option<f64>,
    pub mu: Option<f64>,
    pub cfl: Option<f64>,
    pub scheme: Option<String>,
    pub tfinal: Option<f64>,
    pub snapshots: Option<Vec<f64>>,
    pub out_dir: Option<PathBuf>,
    pub elliptic_tol: Option<f64>,
    pub jacobian_sign: Option<String>,
    pub binary: Option<bool>,
}

/// Comma-separated list of floats; an empty string is an empty list.
pub fn parse_float_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("not a number: '{t}'")))
        .collect()
}

impl RunFile {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut rf = RunFile::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |reason: String| parse_err(path, format!("line {}: {reason}", n + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || {
                value
                    .parse::<f64>()
                    .map_err(|_| at(format!("{key}: not a number: '{value}'")))
            };
            let count = || {
                value
                    .parse::<usize>()
                    .map_err(|_| at(format!("{key}: not a count: '{value}'")))
            };
            match key {
                "scenario" => rf.scenario = Some(value.to_string()),
                "nx" => rf.nx = Some(count()?),
                "ny" => rf.ny = Some(count()?),
                "eps" => rf.eps = Some(float()?),
                "nu" => rf.nu = Some(float()?),
                "beta_bar" => rf.beta_bar = Some(float()?),
                "mu" => rf.mu = Some(float()?),
                "cfl" => rf.cfl = Some(float()?),
                "scheme" => rf.scheme = Some(value.to_string()),
                "tfinal" => rf.tfinal = Some(float()?),
                "snapshots" => rf.snapshots = Some(parse_float_list(value).map_err(at)?),
                "out_dir" => rf.out_dir = Some(PathBuf::from(value)),
                "elliptic_tol" => rf.elliptic_tol = Some(float()?),
                "jacobian_sign" => rf.jacobian_sign = Some(value.to_string()),
                "binary" => {
                    rf.binary = Some(match value {
                        "true" | "yes" | "1" => true,
                        "false" | "no" | "0" => false,
                        _ => return Err(at(format!("binary: expected true or false, got '{value}'"))),
                    })
                }
                other => return Err(at(format!("unknown key '{other}'"))),
            }
        }
        Ok(rf)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| SolverError::io(path, e))?;
        Self::parse(&text, path)
    }
}
