//! Plain-text file formats.
//!
//! A matrix block is a header line `binary m n` or `real m n` followed by
//! `m` rows of `n` whitespace-separated entries. A stacked matrix is a binary
//! block followed by a real block in the same file. Signals and sign vectors
//! hold one value per line. A code file starts with `q msg_len d delta`
//! followed by `msg_len` generator rows of `d` field elements.
//!
//! Blank lines and lines starting with `#` are ignored everywhere. Reals are
//! written in shortest round-trip form, so reading a written file reproduces
//! the exact values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use obcs_core::codes::QaryCode;
use obcs_core::construct::StackedMatrix;
use obcs_core::{BinaryMatrix, MeasurementMatrix, RealMatrix, Sign, SignVector, SparseSignal};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unexpected end of input: {0}")]
    Truncated(String),
    #[error(transparent)]
    Core(#[from] obcs_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub type Result<T> = std::result::Result<T, FormatError>;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFile {
    Binary(BinaryMatrix),
    Real(RealMatrix),
    Stacked(StackedMatrix),
}

impl MatrixFile {
    pub fn ncols(&self) -> usize {
        match self {
            MatrixFile::Binary(b) => b.ncols(),
            MatrixFile::Real(r) => r.ncols(),
            MatrixFile::Stacked(s) => s.top.ncols(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MatrixFile::Binary(_) => "binary",
            MatrixFile::Real(_) => "real",
            MatrixFile::Stacked(_) => "stacked",
        }
    }
}

/// Content lines with their 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Lines { inner: it.peekable() }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.inner.next().ok_or_else(|| FormatError::Truncated(what.to_string()))
    }

    fn is_done(&mut self) -> bool {
        self.inner.peek().is_none()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

fn parse_field<T: FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token.parse().map_err(|_| parse_err(line, format!("cannot parse {what} from {token:?}")))
}

fn parse_row<T: FromStr>(line: usize, text: &str, width: usize, what: &str) -> Result<Vec<T>> {
    let row = text.split_whitespace().map(|t| parse_field(line, t, what)).collect::<Result<Vec<T>>>()?;
    if row.len() != width {
        return Err(parse_err(line, format!("expected {width} entries, found {}", row.len())));
    }
    Ok(row)
}

fn parse_block(lines: &mut Lines<'_>) -> Result<MatrixFile> {
    let (ln, header) = lines.next_line("matrix header")?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let [kind, m, n] = parts[..] else {
        return Err(parse_err(ln, format!("expected `binary|real m n`, found {header:?}")));
    };
    let m: usize = parse_field(ln, m, "row count")?;
    let n: usize = parse_field(ln, n, "column count")?;
    match kind {
        "binary" => {
            let mut data = Vec::with_capacity(m * n);
            for _ in 0..m {
                let (ln, text) = lines.next_line("binary matrix row")?;
                let row: Vec<u8> = parse_row(ln, text, n, "0/1 entry")?;
                if let Some(v) = row.iter().find(|&&v| v > 1) {
                    return Err(parse_err(ln, format!("binary entry {v} is not 0 or 1")));
                }
                data.extend(row);
            }
            Ok(MatrixFile::Binary(BinaryMatrix::from_row_major(m, n, data)?))
        }
        "real" => {
            let mut data = Vec::with_capacity(m * n);
            for _ in 0..m {
                let (ln, text) = lines.next_line("real matrix row")?;
                data.extend(parse_row::<f64>(ln, text, n, "real entry")?);
            }
            Ok(MatrixFile::Real(RealMatrix::from_row_major(m, n, data)?))
        }
        other => Err(parse_err(ln, format!("unknown matrix kind {other:?}"))),
    }
}

/// One block, or a binary block followed by a real block.
pub fn parse_matrix(text: &str) -> Result<MatrixFile> {
    let mut lines = Lines::new(text);
    let first = parse_block(&mut lines)?;
    if lines.is_done() {
        return Ok(first);
    }
    let second = parse_block(&mut lines)?;
    let out = match (first, second) {
        (MatrixFile::Binary(top), MatrixFile::Real(bottom)) => MatrixFile::Stacked(StackedMatrix::new(top, bottom)?),
        _ => return Err(FormatError::Truncated("a second block must be real and follow a binary block".into())),
    };
    if let Some((ln, _)) = lines.inner.next() {
        return Err(parse_err(ln, "trailing content after stacked matrix"));
    }
    Ok(out)
}

fn write_binary(out: &mut String, b: &BinaryMatrix) {
    writeln!(out, "binary {} {}", b.nrows(), b.ncols()).unwrap();
    for i in 0..b.nrows() {
        let row: Vec<String> = b.row(i).iter().map(u8::to_string).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
}

fn write_real(out: &mut String, r: &RealMatrix) {
    writeln!(out, "real {} {}", r.nrows(), r.ncols()).unwrap();
    for i in 0..r.nrows() {
        let row: Vec<String> = r.row(i).iter().map(f64::to_string).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
}

pub fn format_matrix(m: &MatrixFile) -> String {
    let mut out = String::new();
    match m {
        MatrixFile::Binary(b) => write_binary(&mut out, b),
        MatrixFile::Real(r) => write_real(&mut out, r),
        MatrixFile::Stacked(s) => {
            write_binary(&mut out, &s.top);
            write_real(&mut out, &s.bottom);
        }
    }
    out
}

/// Signal with `k` set to its number of nonzeros.
pub fn parse_signal(text: &str) -> Result<SparseSignal> {
    let values = Lines::new(text)
        .inner
        .map(|(ln, t)| parse_field::<f64>(ln, t, "signal value"))
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseSignal::from_dense(values)?)
}

pub fn format_signal(x: &SparseSignal) -> String {
    x.values().iter().map(|v| format!("{v}\n")).collect()
}

pub fn parse_signs(text: &str) -> Result<SignVector> {
    Lines::new(text)
        .inner
        .map(|(ln, t)| {
            let v: i8 = parse_field(ln, t, "sign")?;
            Sign::from_i8(v).map_err(|_| parse_err(ln, format!("sign {v} is not -1, 0 or 1")))
        })
        .collect::<Result<Vec<_>>>()
        .map(SignVector)
}

pub fn format_signs(y: &SignVector) -> String {
    y.iter().map(|s| format!("{}\n", s.as_i8())).collect()
}

pub fn parse_code(text: &str) -> Result<QaryCode> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next_line("code header")?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let [q, msg_len, d, delta] = parts[..] else {
        return Err(parse_err(ln, format!("expected `q msg_len d delta`, found {header:?}")));
    };
    let q: usize = parse_field(ln, q, "q")?;
    let msg_len: usize = parse_field(ln, msg_len, "msg_len")?;
    let d: usize = parse_field(ln, d, "d")?;
    let delta: f64 = parse_field(ln, delta, "delta")?;
    let mut generator = Vec::with_capacity(msg_len * d);
    for _ in 0..msg_len {
        let (ln, text) = lines.next_line("generator row")?;
        generator.extend(parse_row::<u8>(ln, text, d, "field element")?);
    }
    Ok(QaryCode::new(q, msg_len, d, delta, generator)?)
}

pub fn format_code(code: &QaryCode) -> String {
    let mut out = format!("{} {} {} {}\n", code.q(), code.msg_len(), code.block_len(), code.delta());
    for i in 0..code.msg_len() {
        let row: Vec<String> = code.generator_row(i).iter().map(u8::to_string).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn read_matrix(path: &Path) -> Result<MatrixFile> {
    parse_matrix(&read_text(path)?)
}

pub fn read_signal(path: &Path) -> Result<SparseSignal> {
    parse_signal(&read_text(path)?)
}

pub fn read_signs(path: &Path) -> Result<SignVector> {
    parse_signs(&read_text(path)?)
}

pub fn read_code(path: &Path) -> Result<QaryCode> {
    parse_code(&read_text(path)?)
}
