//! Seeded lasso / basis-pursuit data and the `MGVI-INSTANCE v1` text format.
//!
//! ```text
//! MGVI-INSTANCE v1
//! kind: lasso            # lasso | bp | saddle
//! dims: 3 4              # m n, plus q for saddle
//! lambda: 1              # lasso only
//! theta1: l1 1           # saddle only: `l1 <weight>` or `zero`
//! theta2: zero           # saddle only
//! matrix A               # m rows of n numbers
//! ...
//! matrix B               # saddle only, m rows of q numbers
//! vector b               # m numbers on one line (`vector c` for saddle)
//! vector x_true          # optional, n numbers on one line
//! ```
//!
//! Numbers are written with 17 significant digits, so a write-then-read
//! round trip is bitwise exact. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use super::rng::NormalStream;
use crate::error::MgviError;
use crate::lasso::Lasso;
use crate::linalg::DenseMatrix;
use crate::prox::{L1Norm, ProxFunction, ZeroFunction};
use crate::saddle::SaddleProblem;

pub const HEADER: &str = "MGVI-INSTANCE v1";

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing section `{0}`")]
    Missing(String),
    #[error(transparent)]
    Invalid(#[from] MgviError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Seeded sparse-recovery data: `A` i.i.d. standard normal (row-major from
/// one [`NormalStream`]), a ±1 sparse `x_true`, and `b = A·x_true`.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub x_true: Vec<f64>,
}

/// `x_true` is `+1` at 1-based indices 3, 11, …, 75 and `−1` at 7, 15, …, 79,
/// dropping indices beyond `n`. That gives 20 nonzeros whenever `n ≥ 79`.
pub fn sparse_truth(n: usize) -> Result<Vec<f64>, MgviError> {
    if n < 3 {
        return Err(MgviError::InvalidParameter(format!("need n >= 3 for the sparse pattern, got {n}")));
    }
    let mut x = vec![0.0; n];
    for (first, value) in [(3, 1.0), (7, -1.0)] {
        for i in (first..=80).step_by(8).filter(|&i| i <= n) {
            x[i - 1] = value;
        }
    }
    Ok(x)
}

pub fn generate_lasso_instance(m: usize, n: usize, seed: u64) -> Result<GeneratedInstance, MgviError> {
    if m == 0 {
        return Err(MgviError::InvalidParameter("need m >= 1".into()));
    }
    let x_true = sparse_truth(n)?;
    let mut stream = NormalStream::new(seed);
    let data: Vec<f64> = (0..m * n).map(|_| stream.normal()).collect();
    let a = DenseMatrix::from_row_major(m, n, data)?;
    let mut b = vec![0.0; m];
    a.mul_vec_into(&x_true, &mut b);
    Ok(GeneratedInstance { a, b, x_true })
}

#[derive(Debug, Clone)]
pub enum InstanceKind {
    Lasso(Lasso),
    BasisPursuit(SaddleProblem),
    Saddle(SaddleProblem),
}

#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub kind: InstanceKind,
    pub x_true: Option<Vec<f64>>,
}

impl InstanceFile {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            InstanceKind::Lasso(_) => "lasso",
            InstanceKind::BasisPursuit(_) => "bp",
            InstanceKind::Saddle(_) => "saddle",
        }
    }
}

fn fmt_num(out: &mut String, v: f64) {
    let _ = write!(out, "{v:.16e}");
}

fn write_row(out: &mut String, row: &[f64]) {
    for (j, v) in row.iter().enumerate() {
        if j > 0 {
            out.push(' ');
        }
        fmt_num(out, *v);
    }
    out.push('\n');
}

fn write_matrix(out: &mut String, name: &str, m: &DenseMatrix) {
    let _ = writeln!(out, "matrix {name}");
    for i in 0..m.rows() {
        write_row(out, m.row(i));
    }
}

fn write_vector(out: &mut String, name: &str, v: &[f64]) {
    let _ = writeln!(out, "vector {name}");
    write_row(out, v);
}

fn theta_descriptor(theta: &dyn ProxFunction) -> Result<String, InstanceError> {
    theta.descriptor().ok_or_else(|| {
        InstanceError::Invalid(MgviError::InvalidParameter(format!("cannot serialize block function {theta:?}")))
    })
}

pub fn write_instance(inst: &InstanceFile) -> Result<String, InstanceError> {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "kind: {}", inst.kind_name());
    match &inst.kind {
        InstanceKind::Lasso(l) => {
            let _ = writeln!(out, "dims: {} {}", l.a().rows(), l.n());
            let mut s = String::from("lambda: ");
            fmt_num(&mut s, l.lambda());
            let _ = writeln!(out, "{s}");
            write_matrix(&mut out, "A", l.a());
            write_vector(&mut out, "b", l.b());
        }
        InstanceKind::BasisPursuit(sp) => {
            let _ = writeln!(out, "dims: {} {}", sp.m(), sp.n());
            write_matrix(&mut out, "A", sp.a());
            write_vector(&mut out, "b", sp.c());
        }
        InstanceKind::Saddle(sp) => {
            let _ = writeln!(out, "dims: {} {} {}", sp.m(), sp.n(), sp.q());
            let _ = writeln!(out, "theta1: {}", theta_descriptor(sp.theta1.as_ref())?);
            let _ = writeln!(out, "theta2: {}", theta_descriptor(sp.theta2.as_ref())?);
            write_matrix(&mut out, "A", sp.a());
            write_matrix(&mut out, "B", sp.b());
            write_vector(&mut out, "c", sp.c());
        }
    }
    if let Some(x) = &inst.x_true {
        write_vector(&mut out, "x_true", x);
    }
    Ok(out)
}

pub fn save_instance(inst: &InstanceFile, path: &Path) -> Result<(), InstanceError> {
    std::fs::write(path, write_instance(inst)?)?;
    Ok(())
}

pub fn load_custom_instance(path: &Path) -> Result<InstanceFile, InstanceError> {
    parse_instance(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Self { inner: it.peekable(), last_line: 0 }
    }

    fn next_or(&mut self, section: &str) -> Result<(usize, &'a str), InstanceError> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last_line = n;
                Ok((n, l))
            }
            None => Err(InstanceError::Missing(section.to_string())),
        }
    }

    fn peek(&mut self) -> Option<&'a str> {
        self.inner.peek().map(|(_, l)| *l)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Parse { line, msg: msg.into() }
}

fn parse_numbers(line_no: usize, line: &str, expected: usize) -> Result<Vec<f64>, InstanceError> {
    let nums: Vec<f64> = line
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| parse_err(line_no, format!("`{t}` is not a number"))))
        .collect::<Result<_, _>>()?;
    if nums.len() != expected {
        return Err(parse_err(line_no, format!("expected {expected} numbers, found {}", nums.len())));
    }
    Ok(nums)
}

fn key_value<'a>(lines: &mut Lines<'a>, key: &str) -> Result<(usize, &'a str), InstanceError> {
    let (n, l) = lines.next_or(key)?;
    match l.split_once(':') {
        Some((k, v)) if k.trim() == key => Ok((n, v.trim())),
        _ => Err(parse_err(n, format!("expected `{key}: ...`, found `{l}`"))),
    }
}

fn section_header(lines: &mut Lines<'_>, kind: &str, name: &str) -> Result<(), InstanceError> {
    let section = format!("{kind} {name}");
    let (n, l) = lines.next_or(&section)?;
    if l.split_whitespace().collect::<Vec<_>>() != [kind, name] {
        return Err(parse_err(n, format!("expected `{section}`, found `{l}`")));
    }
    Ok(())
}

fn read_matrix(lines: &mut Lines<'_>, name: &str, rows: usize, cols: usize) -> Result<DenseMatrix, InstanceError> {
    section_header(lines, "matrix", name)?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (n, l) = lines.next_or(&format!("matrix {name}"))?;
        data.extend(parse_numbers(n, l, cols)?);
    }
    Ok(DenseMatrix::from_row_major(rows, cols, data)?)
}

fn read_vector(lines: &mut Lines<'_>, name: &str, len: usize) -> Result<Vec<f64>, InstanceError> {
    section_header(lines, "vector", name)?;
    if len == 0 {
        return Ok(Vec::new());
    }
    let (n, l) = lines.next_or(&format!("vector {name}"))?;
    parse_numbers(n, l, len)
}

fn read_theta(line: usize, desc: &str) -> Result<Arc<dyn ProxFunction>, InstanceError> {
    let parts: Vec<&str> = desc.split_whitespace().collect();
    match parts.as_slice() {
        ["zero"] => Ok(Arc::new(ZeroFunction)),
        ["l1"] => Ok(Arc::new(L1Norm::new(1.0)?)),
        ["l1", w] => {
            let w: f64 = w.parse().map_err(|_| parse_err(line, format!("bad l1 weight `{w}`")))?;
            Ok(Arc::new(L1Norm::new(w)?))
        }
        _ => Err(parse_err(line, format!("unknown block function `{desc}`"))),
    }
}

fn parse_dims(line: usize, text: &str, count: usize) -> Result<Vec<usize>, InstanceError> {
    let dims: Vec<usize> = text
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(line, format!("bad dimension `{t}`"))))
        .collect::<Result<_, _>>()?;
    if dims.len() != count {
        return Err(parse_err(line, format!("expected {count} dimensions, found {}", dims.len())));
    }
    Ok(dims)
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, InstanceError> {
    let mut lines = Lines::new(text);
    let (n, header) = lines.next_or("header")?;
    if header != HEADER {
        return Err(parse_err(n, format!("expected `{HEADER}`")));
    }
    let (kn, kind) = key_value(&mut lines, "kind")?;
    let (dn, dims_text) = key_value(&mut lines, "dims")?;
    let (kind, n_cols) = match kind {
        "lasso" => {
            let d = parse_dims(dn, dims_text, 2)?;
            let (ln, lam) = key_value(&mut lines, "lambda")?;
            let lam: f64 = lam.parse().map_err(|_| parse_err(ln, format!("bad lambda `{lam}`")))?;
            let a = read_matrix(&mut lines, "A", d[0], d[1])?;
            let b = read_vector(&mut lines, "b", d[0])?;
            (InstanceKind::Lasso(Lasso::new(a, b, lam)?), d[1])
        }
        "bp" => {
            let d = parse_dims(dn, dims_text, 2)?;
            let a = read_matrix(&mut lines, "A", d[0], d[1])?;
            let b = read_vector(&mut lines, "b", d[0])?;
            (InstanceKind::BasisPursuit(SaddleProblem::one_block(Arc::new(L1Norm::new(1.0)?), a, b)?), d[1])
        }
        "saddle" => {
            let d = parse_dims(dn, dims_text, 3)?;
            let (t1n, t1) = key_value(&mut lines, "theta1")?;
            let theta1 = read_theta(t1n, t1)?;
            let (t2n, t2) = key_value(&mut lines, "theta2")?;
            let theta2 = read_theta(t2n, t2)?;
            let a = read_matrix(&mut lines, "A", d[0], d[1])?;
            let b = read_matrix(&mut lines, "B", d[0], d[2])?;
            let c = read_vector(&mut lines, "c", d[0])?;
            (InstanceKind::Saddle(SaddleProblem::new(theta1, theta2, a, b, c)?), d[1])
        }
        other => return Err(parse_err(kn, format!("unknown kind `{other}`"))),
    };
    let x_true = match lines.peek() {
        Some(_) => Some(read_vector(&mut lines, "x_true", n_cols)?),
        None => None,
    };
    if let Some(l) = lines.peek() {
        let line = lines.next_or("")?.0;
        return Err(parse_err(line, format!("unexpected trailing content `{l}`")));
    }
    Ok(InstanceFile { kind, x_true })
}
