//! Text formats and atomic file output.
//!
//! Phase-space functions (`# psf v1`): rows `q,p,re,im`, q outer.
//! Operators (`# opm v1`): rows `i,j,re,im`.
//! Wavefunctions (`# wfn v1`): rows `q,re,im`.
//! The second header line holds `n=..,qmin=..,qmax=..,hbar=..` (plus `s=..`
//! for phase-space functions). Every number is written with 17 significant
//! digits.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, Representation, WavefunctionGrid};
use crate::symbol::OperatorMatrix;
use crate::transform::{format_complex, parse_complex, PhaseSpaceFunction, SParameter, SymbolKind};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(contents).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

fn grid_header(grid: &Grid) -> String {
    format!(
        "n={},qmin={},qmax={},hbar={}",
        grid.n(),
        num(grid.q_min()),
        num(grid.q_max()),
        num(grid.hbar())
    )
}

pub fn format_psf(a: &PhaseSpaceFunction) -> String {
    let grid = a.grid;
    let mut out = String::with_capacity(a.samples.len() * 96);
    out.push_str("# psf v1\n");
    let _ = writeln!(
        out,
        "# {},s={}",
        grid_header(&grid),
        format_complex(a.s.value())
    );
    let kind = match a.kind {
        SymbolKind::StateSymbol => "state-symbol",
        SymbolKind::OperatorSymbol => "operator-symbol",
    };
    let _ = writeln!(out, "# kind={kind}");
    let n = grid.n();
    for j in 0..n {
        let q = num(grid.q(j));
        for k in 0..n {
            let z = a.samples[j * n + k];
            let _ = writeln!(out, "{q},{},{},{}", num(grid.p(k)), num(z.re), num(z.im));
        }
    }
    out
}

pub fn format_opm(op: &OperatorMatrix) -> String {
    let n = op.n();
    let mut out = String::with_capacity(n * n * 64);
    out.push_str("# opm v1\n");
    let _ = writeln!(out, "# {}", grid_header(&op.grid));
    for i in 0..n {
        for j in 0..n {
            let z = op.entries[i * n + j];
            let _ = writeln!(out, "{i},{j},{},{}", num(z.re), num(z.im));
        }
    }
    out
}

pub fn format_wavefunction(psi: &WavefunctionGrid) -> String {
    let grid = psi.grid;
    let mut out = String::new();
    out.push_str("# wfn v1\n");
    let _ = writeln!(out, "# {}", grid_header(&grid));
    for (q, z) in grid.q_values().iter().zip(psi.position_samples()) {
        let _ = writeln!(out, "{},{},{}", num(*q), num(z.re), num(z.im));
    }
    out
}

struct Parsed {
    grid: Grid,
    s: Option<SParameter>,
    kind: Option<SymbolKind>,
    rows: Vec<Vec<f64>>,
}

fn parse_text(text: &str, magic: &str, columns: usize) -> Result<Parsed> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(magic) {
        return Err(Error::Parse(format!("missing `{magic}` header")));
    }
    let meta = lines
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .ok_or_else(|| Error::Parse("missing metadata line".into()))?;
    let mut n = None;
    let mut q_min = None;
    let mut q_max = None;
    let mut hbar = None;
    let mut s = None;
    for field in meta.trim().split(',') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("malformed metadata field `{field}`")))?;
        let real = || {
            value
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{key}: {e}")))
        };
        match key.trim() {
            "n" => {
                n = Some(
                    value
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("n: {e}")))?,
                )
            }
            "qmin" => q_min = Some(real()?),
            "qmax" => q_max = Some(real()?),
            "hbar" => hbar = Some(real()?),
            "s" => s = Some(SParameter::new(parse_complex(value)?)?),
            other => return Err(Error::Parse(format!("unknown metadata key `{other}`"))),
        }
    }
    let missing = |name: &str| Error::Parse(format!("metadata lacks `{name}`"));
    let grid = Grid::new(
        n.ok_or_else(|| missing("n"))?,
        q_min.ok_or_else(|| missing("qmin"))?,
        q_max.ok_or_else(|| missing("qmax"))?,
        hbar.ok_or_else(|| missing("hbar"))?,
    )?;
    let mut kind = None;
    let mut rows = Vec::new();
    for (number, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            match comment.trim() {
                "kind=state-symbol" => kind = Some(SymbolKind::StateSymbol),
                "kind=operator-symbol" => kind = Some(SymbolKind::OperatorSymbol),
                _ => {}
            }
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", number + 3)))?;
        if row.len() != columns {
            return Err(Error::Parse(format!(
                "line {}: expected {columns} columns, got {}",
                number + 3,
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(Parsed {
        grid,
        s,
        kind,
        rows,
    })
}

pub fn parse_psf(text: &str) -> Result<PhaseSpaceFunction> {
    let parsed = parse_text(text, "# psf v1", 4)?;
    let grid = parsed.grid;
    let n = grid.n();
    if parsed.rows.len() != n * n {
        return Err(Error::Parse(format!(
            "expected {} rows, got {}",
            n * n,
            parsed.rows.len()
        )));
    }
    let s = parsed
        .s
        .ok_or_else(|| Error::Parse("metadata lacks `s`".into()))?;
    let samples = parsed
        .rows
        .iter()
        .map(|r| Complex64::new(r[2], r[3]))
        .collect();
    PhaseSpaceFunction::new(
        grid,
        samples,
        s,
        parsed.kind.unwrap_or(SymbolKind::StateSymbol),
    )
}

pub fn parse_opm(text: &str) -> Result<OperatorMatrix> {
    let parsed = parse_text(text, "# opm v1", 4)?;
    let n = parsed.grid.n();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    let mut seen = vec![false; n * n];
    for r in &parsed.rows {
        let (i, j) = (r[0] as usize, r[1] as usize);
        if r[0] < 0.0
            || r[1] < 0.0
            || i >= n
            || j >= n
            || r[0].fract() != 0.0
            || r[1].fract() != 0.0
        {
            return Err(Error::Parse(format!(
                "bad matrix index ({}, {})",
                r[0], r[1]
            )));
        }
        entries[i * n + j] = Complex64::new(r[2], r[3]);
        seen[i * n + j] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Parse(
            "operator file does not list every entry".into(),
        ));
    }
    OperatorMatrix::new(parsed.grid, entries, false)
}

pub fn parse_wavefunction(text: &str) -> Result<WavefunctionGrid> {
    let parsed = parse_text(text, "# wfn v1", 3)?;
    let n = parsed.grid.n();
    if parsed.rows.len() != n {
        return Err(Error::Parse(format!(
            "expected {n} rows, got {}",
            parsed.rows.len()
        )));
    }
    let samples = parsed
        .rows
        .iter()
        .map(|r| Complex64::new(r[1], r[2]))
        .collect();
    WavefunctionGrid::new(parsed.grid, samples, Representation::Position)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

pub fn read_psf(path: &Path) -> Result<PhaseSpaceFunction> {
    parse_psf(&read_text(path)?)
}

pub fn read_opm(path: &Path) -> Result<OperatorMatrix> {
    parse_opm(&read_text(path)?)
}

pub fn read_wavefunction(path: &Path) -> Result<WavefunctionGrid> {
    parse_wavefunction(&read_text(path)?)
}

pub fn write_psf(path: &Path, a: &PhaseSpaceFunction) -> Result<()> {
    write_atomic(path, format_psf(a).as_bytes())
}

pub fn write_opm(path: &Path, op: &OperatorMatrix) -> Result<()> {
    write_atomic(path, format_opm(op).as_bytes())
}

pub fn write_wavefunction(path: &Path, psi: &WavefunctionGrid) -> Result<()> {
    write_atomic(path, format_wavefunction(psi).as_bytes())
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
