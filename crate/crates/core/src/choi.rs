//! Choi matrices of two-qubit processes and the text interchange format.
//!
//! The 16x16 matrix acts on `H_in (x) H_out` with the input factor first, so
//! that `rho_out = Tr_in[chi (rho_in^T (x) 1)]`. Success probability is the
//! trace of the unnormalized output.
//!
//! File layout (line oriented, `#` comments and blank lines ignored):
//!
//! ```text
//! dim_in 4
//! dim_out 4
//! convention in_out
//! re,im re,im ... (16 entries per row, 16 rows)
//! ```
//!
//! `convention out_in` is accepted on load and reordered to `in_out`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::gates::{GateEvaluation, GateModel, ZERO_SUCCESS};
use crate::qmath::{hermitian_eigenvalues, product_state_vector, ComplexMatrix, DensityMatrix, ProductStateParams};

pub const DIM: usize = 4;
const CHOI_DIM: usize = DIM * DIM;

pub const CHOI_HERMITIAN_TOL: f64 = 1e-10;
pub const CHOI_PSD_TOL: f64 = 1e-8;
pub const CHOI_TRACE_TOL: f64 = 1e-8;
const OPERATOR_NORM_TOL: f64 = 1e-12;

/// Physicality conditions checked on every Choi matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiInvariant {
    Dimension,
    Hermiticity,
    Positivity,
    /// Success probability on the maximally mixed input must lie in `[0, 1]`.
    TraceBound,
}

impl ChoiInvariant {
    pub fn name(self) -> &'static str {
        match self {
            ChoiInvariant::Dimension => "dimension",
            ChoiInvariant::Hermiticity => "hermiticity",
            ChoiInvariant::Positivity => "positivity",
            ChoiInvariant::TraceBound => "trace_bound",
        }
    }
}

impl fmt::Display for ChoiInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChoiError {
    #[error("E_PARSE line {line} column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("E_VALIDATION invariant={invariant} magnitude={magnitude:e}")]
    Validation {
        invariant: ChoiInvariant,
        magnitude: f64,
    },

    #[error("E_IO {0}")]
    Io(String),
}

impl ChoiError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ChoiError::Parse { .. } => "E_PARSE",
            ChoiError::Validation { .. } => "E_VALIDATION",
            ChoiError::Io(_) => "E_IO",
        }
    }
}

fn violation(invariant: ChoiInvariant, magnitude: f64) -> Error {
    ChoiError::Validation {
        invariant,
        magnitude,
    }
    .into()
}

/// Validated 16x16 process matrix over `H_in (x) H_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != CHOI_DIM || matrix.cols() != CHOI_DIM {
            return Err(violation(
                ChoiInvariant::Dimension,
                (matrix.rows() * matrix.cols()) as f64,
            ));
        }
        let dev = matrix.hermitian_deviation();
        if !(dev <= CHOI_HERMITIAN_TOL) {
            return Err(violation(ChoiInvariant::Hermiticity, dev));
        }
        let symmetric = hermitian_part(&matrix);
        let min = hermitian_eigenvalues(&symmetric)?[0];
        if min < -CHOI_PSD_TOL {
            return Err(violation(ChoiInvariant::Positivity, min));
        }
        let p_mixed = matrix.trace().re / DIM as f64;
        if !(-CHOI_TRACE_TOL..=1.0 + CHOI_TRACE_TOL).contains(&p_mixed) {
            return Err(violation(ChoiInvariant::TraceBound, p_mixed));
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        choi_from_operator(&ComplexMatrix::identity(DIM)).expect("identity is a valid Kraus operator")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Unnormalized `Tr_in[chi (rho^T (x) 1)]`.
    pub fn apply_unnormalized(&self, rho_in: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho_in.rows() != DIM || rho_in.cols() != DIM {
            return Err(Error::Dimension {
                expected: "4x4 input state".into(),
                got: format!("{}x{}", rho_in.rows(), rho_in.cols()),
            });
        }
        let chi = &self.matrix;
        let mut out = ComplexMatrix::zeros(DIM, DIM);
        // out[o, o'] = sum_{i, j} chi[(i, o), (j, o')] rho[i, j]
        for i in 0..DIM {
            for j in 0..DIM {
                let r = rho_in[(i, j)];
                if r == C64::new(0.0, 0.0) {
                    continue;
                }
                for o in 0..DIM {
                    for o2 in 0..DIM {
                        out[(o, o2)] += chi[(i * DIM + o, j * DIM + o2)] * r;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    let adj = m.adjoint();
    m.mix(&adj, 0.5).expect("square matrix")
}

/// Rank-one Choi matrix of the Kraus operator `m`:
/// `chi = sum_{ij} |i><j| (x) m|i><j|m^dagger`.
pub fn choi_from_operator(m: &ComplexMatrix) -> Result<ChoiMatrix> {
    if m.rows() != DIM || m.cols() != DIM {
        return Err(Error::Dimension {
            expected: "4x4 operator".into(),
            got: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let gram = m.adjoint().matmul(m)?;
    let largest = *hermitian_eigenvalues(&hermitian_part(&gram))?
        .last()
        .expect("non-empty spectrum");
    let norm = largest.max(0.0).sqrt();
    if norm > 1.0 + OPERATOR_NORM_TOL {
        return Err(Error::OperatorNorm { norm });
    }
    let mut chi = ComplexMatrix::zeros(CHOI_DIM, CHOI_DIM);
    for i in 0..DIM {
        for o in 0..DIM {
            for j in 0..DIM {
                for o2 in 0..DIM {
                    chi[(i * DIM + o, j * DIM + o2)] = m[(o, i)] * m[(o2, j)].conj();
                }
            }
        }
    }
    ChoiMatrix::new(chi)
}

/// Heralded output of the process on `rho_in`; `output_density` is `None`
/// when the success probability is at most [`ZERO_SUCCESS`].
pub fn apply_choi(chi: &ChoiMatrix, rho_in: &DensityMatrix) -> Result<GateEvaluation> {
    let out = chi.apply_unnormalized(rho_in.matrix())?;
    normalize_output(out)
}

fn normalize_output(out: ComplexMatrix) -> Result<GateEvaluation> {
    let p = out.trace().re;
    if p <= ZERO_SUCCESS {
        return Ok(GateEvaluation::failed(p.max(0.0)));
    }
    let rho = hermitian_part(&out).scale(C64::new(1.0 / p, 0.0));
    Ok(GateEvaluation {
        output_density: Some(DensityMatrix::from_trusted(rho)),
        success_probability: p,
    })
}

/// Gate model backed by a process matrix.
#[derive(Debug, Clone)]
pub struct ChoiGate {
    chi: ChoiMatrix,
    label: String,
}

pub fn choi_gate_model(chi: ChoiMatrix) -> ChoiGate {
    ChoiGate {
        chi,
        label: "choi".into(),
    }
}

impl ChoiGate {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn choi(&self) -> &ChoiMatrix {
        &self.chi
    }
}

impl GateModel for ChoiGate {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn evaluate(&self, params: &ProductStateParams) -> Result<GateEvaluation> {
        let v = product_state_vector(params);
        let rho = ComplexMatrix::outer(&v, &v);
        self.chi
            .apply_unnormalized(&rho)
            .and_then(normalize_output)
            .map_err(|e| e.at(*params))
    }
}

/// Serializes with 17 significant digits so that parsing restores every bit.
pub fn write_choi<W: Write>(chi: &ChoiMatrix, mut w: W) -> std::io::Result<()> {
    writeln!(w, "dim_in {DIM}")?;
    writeln!(w, "dim_out {DIM}")?;
    writeln!(w, "convention in_out")?;
    let m = chi.matrix();
    for r in 0..CHOI_DIM {
        let row: Vec<String> = (0..CHOI_DIM)
            .map(|c| {
                let z = m[(r, c)];
                format!("{:.16e},{:.16e}", z.re, z.im)
            })
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn save_choi(chi: &ChoiMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_choi(chi, &mut buf).map_err(|e| ChoiError::Io(e.to_string()))?;
    fs::write(path.as_ref(), buf)
        .map_err(|e| ChoiError::Io(format!("{}: {e}", path.as_ref().display())).into())
}

pub fn load_choi(path: impl AsRef<Path>) -> Result<ChoiMatrix> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| ChoiError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_choi(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Convention {
    InOut,
    OutIn,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    ChoiError::Parse {
        line,
        column,
        message: message.into(),
    }
    .into()
}

fn parse_header(line_no: usize, line: &str, key: &str) -> Result<String> {
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => Ok(v.to_string()),
        _ => Err(parse_error(line_no, 1, format!("expected `{key} <value>`"))),
    }
}

fn parse_entry(line_no: usize, column: usize, token: &str) -> Result<C64> {
    let (re, im) = token
        .split_once(',')
        .ok_or_else(|| parse_error(line_no, column, format!("expected `re,im`, found `{token}`")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| parse_error(line_no, column, format!("invalid number `{s}`")))
    };
    Ok(C64::new(parse(re)?, parse(im)?))
}

pub fn parse_choi(text: &str) -> Result<ChoiMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut header = |key: &str| -> Result<(usize, String)> {
        let (n, l) = lines
            .next()
            .ok_or_else(|| parse_error(0, 0, format!("missing `{key}` header")))?;
        Ok((n, parse_header(n, l, key)?))
    };
    for key in ["dim_in", "dim_out"] {
        let (n, v) = header(key)?;
        if v != DIM.to_string() {
            return Err(parse_error(n, 2, format!("unsupported {key} {v}, expected {DIM}")));
        }
    }
    let (n, v) = header("convention")?;
    let convention = match v.as_str() {
        "in_out" => Convention::InOut,
        "out_in" => Convention::OutIn,
        other => return Err(parse_error(n, 2, format!("unknown convention `{other}`"))),
    };

    let mut data = Vec::with_capacity(CHOI_DIM * CHOI_DIM);
    let mut rows = 0;
    let mut last_line = n;
    for (n, l) in lines {
        last_line = n;
        if rows == CHOI_DIM {
            return Err(parse_error(n, 1, "unexpected data after 16 rows"));
        }
        let tokens: Vec<&str> = l.split_whitespace().collect();
        if tokens.len() != CHOI_DIM {
            return Err(parse_error(
                n,
                tokens.len().min(CHOI_DIM) + 1,
                format!("expected {CHOI_DIM} entries, found {}", tokens.len()),
            ));
        }
        for (c, t) in tokens.iter().enumerate() {
            data.push(parse_entry(n, c + 1, t)?);
        }
        rows += 1;
    }
    if rows != CHOI_DIM {
        return Err(parse_error(last_line + 1, 1, format!("expected {CHOI_DIM} rows, found {rows}")));
    }
    let mut m = ComplexMatrix::new(CHOI_DIM, CHOI_DIM, data)?;
    if convention == Convention::OutIn {
        m = swap_factors(&m);
    }
    ChoiMatrix::new(m)
}

/// Reorders `(a, b)` tensor indices to `(b, a)` on both sides.
fn swap_factors(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(CHOI_DIM, CHOI_DIM);
    for a in 0..DIM {
        for b in 0..DIM {
            for a2 in 0..DIM {
                for b2 in 0..DIM {
                    out[(b * DIM + a, b2 * DIM + a2)] = m[(a * DIM + b, a2 * DIM + b2)];
                }
            }
        }
    }
    out
}
