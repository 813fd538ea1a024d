//! Plain-text matrix files: a `rows`/`cols` header, a `data` marker, then one
//! row-major entry per line as a real and imaginary part. Values are written
//! with 17 significant digits so every emitted file re-parses to the exact
//! same bits. Lines starting with `#` are comments.

use num_complex::Complex64;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use wep_core::CMatrix;

/// Parsed on-disk representation; `data` is row-major `(re, im)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<(f64, f64)>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m[(i, j)];
                data.push((z.re, z.im));
            }
        }
        MatrixFile {
            rows: m.rows(),
            cols: m.cols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, String> {
        let entries: Vec<Complex64> = self
            .data
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect();
        CMatrix::new(self.rows, self.cols, entries).map_err(|e| e.to_string())
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "rows {}", self.rows);
        let _ = writeln!(out, "cols {}", self.cols);
        out.push_str("data\n");
        for &(re, im) in &self.data {
            let _ = writeln!(out, "{re:.16e} {im:.16e}");
        }
        out
    }

    /// Parses the text format; errors carry the source name, line number and
    /// the offending field.
    pub fn parse(name: &str, text: &str) -> Result<Self, String> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let rows = parse_header(name, lines.next(), "rows")?;
        let cols = parse_header(name, lines.next(), "cols")?;
        match lines.next() {
            Some((_, "data")) => {}
            Some((ln, other)) => {
                return Err(format!("{name}:{ln}: expected `data`, found `{other}`"))
            }
            None => return Err(format!("{name}: truncated before `data`")),
        }
        let want = rows * cols;
        let mut data = Vec::with_capacity(want);
        for (ln, line) in lines {
            if data.len() == want {
                return Err(format!(
                    "{name}:{ln}: trailing content after {want} entries"
                ));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(format!(
                    "{name}:{ln}: entry {} needs two fields (re im), found {}",
                    data.len(),
                    fields.len()
                ));
            }
            let re = parse_float(name, ln, fields[0], "re", data.len())?;
            let im = parse_float(name, ln, fields[1], "im", data.len())?;
            data.push((re, im));
        }
        if data.len() != want {
            return Err(format!(
                "{name}: expected {want} entries for {rows}x{cols}, found {}",
                data.len()
            ));
        }
        Ok(MatrixFile { rows, cols, data })
    }
}

fn parse_header(name: &str, line: Option<(usize, &str)>, key: &str) -> Result<usize, String> {
    let (ln, line) = line.ok_or_else(|| format!("{name}: truncated before `{key}`"))?;
    let mut it = line.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(k), Some(v), None) if k == key => v
            .parse()
            .map_err(|_| format!("{name}:{ln}: cannot parse `{v}` as the {key} count")),
        _ => Err(format!("{name}:{ln}: expected `{key} <n>`, found `{line}`")),
    }
}

fn parse_float(name: &str, ln: usize, tok: &str, field: &str, entry: usize) -> Result<f64, String> {
    let v: f64 = tok
        .parse()
        .map_err(|_| format!("{name}:{ln}: cannot parse `{tok}` as float ({field} of entry {entry})"))?;
    if !v.is_finite() {
        return Err(format!(
            "{name}:{ln}: non-finite value `{tok}` ({field} of entry {entry})"
        ));
    }
    Ok(v)
}

pub fn read_matrix(path: &Path) -> Result<CMatrix, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("{}: cannot read: {e}", path.display()))?;
    let mf = MatrixFile::parse(&path.display().to_string(), &text)?;
    mf.to_matrix()
        .map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> Result<(), String> {
    fs::write(path, MatrixFile::from_matrix(m).serialize())
        .map_err(|e| format!("{}: cannot write: {e}", path.display()))
}
