//! Dense complex linear algebra for two-qubit states and 16x16 process matrices.
//!
//! Basis ordering is `|00>, |01>, |10>, |11>` with the first qubit as the most
//! significant index, and matrices are stored row-major.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Entrywise tolerance for `M = M^dagger`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `tr(rho) = 1`.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut data = Vec::with_capacity(u.len() * v.len());
        for a in u {
            for b in v {
                data.push(a * b.conj());
            }
        }
        Self {
            rows: u.len(),
            cols: v.len(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: format!("{} rows on the right factor", self.cols),
                got: format!("{}", other.rows),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension {
                expected: format!("vector of length {}", self.cols),
                got: format!("{}", v.len()),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `w * self + (1 - w) * other`, used for mixtures.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension {
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * w + b * (1.0 - w))
                .collect(),
        })
    }

    /// Largest entrywise `|M_ij - M_ji^*|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Which tensor factor of a two-qubit operator to transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial transpose of a 4x4 operator viewed as 2 (x) 2.
pub fn partial_transpose(m: &ComplexMatrix, subsystem: Subsystem) -> Result<ComplexMatrix> {
    if m.rows != 4 || m.cols != 4 {
        return Err(Error::Dimension {
            expected: "4x4 two-qubit operator".into(),
            got: format!("{}x{}", m.rows, m.cols),
        });
    }
    let mut out = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    // out[(i j), (k l)]
                    let (src_r, src_c) = match subsystem {
                        Subsystem::A => ((k, j), (i, l)),
                        Subsystem::B => ((i, l), (k, j)),
                    };
                    out[(2 * i + j, 2 * k + l)] =
                        m[(2 * src_r.0 + src_r.1, 2 * src_c.0 + src_c.1)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as the
/// columns of the second matrix.
pub fn hermitian_eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let dev = m.hermitian_deviation();
    if !(dev <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = m.rows;
    let mut a = m.data.clone();
    let mut v = ComplexMatrix::identity(n).data;
    let threshold = JACOBI_OFF_DIAGONAL_TOL * m.frobenius_norm().max(1.0);

    let off_diagonal = |a: &[C64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_diagonal(&a);
        if off < threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let abs = apq.norm();
                if abs < f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / abs;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = diag(1, e^{-i alpha}) R restricted to the (p, q) plane.
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * jpp + akq * jqp;
                    a[k * n + q] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * jpp + vkq * jqp;
                    v[k * n + q] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[row * n + src];
        }
    }
    Ok((values, vectors))
}

/// Ascending real spectrum of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigh(m).map(|(values, _)| values)
}

/// `sum |lambda_i|` over the spectrum of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|x| x.abs()).sum())
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_positivity_tolerance(matrix, PSD_TOL)
    }

    /// Same checks as [`DensityMatrix::new`] with a custom lower bound
    /// `-psd_tol` on the spectrum (reconstructed data is noisier).
    pub fn with_positivity_tolerance(matrix: ComplexMatrix, psd_tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension {
                expected: "square matrix".into(),
                got: format!("{}x{}", matrix.rows, matrix.cols),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if !(deviation <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if !((trace.re - 1.0).abs() <= TRACE_TOL && trace.im.abs() <= TRACE_TOL) {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        let min = hermitian_eigenvalues(&matrix)?[0];
        if min < -psd_tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { matrix })
    }

    /// Skips the spectral check; callers guarantee positivity by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Convex mixture `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.mix(&other.matrix, w)?,
        })
    }

    pub fn partial_transpose(&self, subsystem: Subsystem) -> Result<ComplexMatrix> {
        partial_transpose(&self.matrix, subsystem)
    }
}

/// Angles of a pure product state
/// `(cos t1 |0> + e^{i p1} sin t1 |1>) (x) (cos t2 |0> + e^{i p2} sin t2 |1>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductStateParams {
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
}

impl ProductStateParams {
    pub fn new(theta1: f64, phi1: f64, theta2: f64, phi2: f64) -> Result<Self> {
        let p = Self {
            theta1,
            phi1,
            theta2,
            phi2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Real amplitudes only (`phi1 = phi2 = 0`).
    pub fn real(theta1: f64, theta2: f64) -> Self {
        Self {
            theta1,
            phi1: 0.0,
            theta2,
            phi2: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("theta1", self.theta1), ("theta2", self.theta2)] {
            if !(0.0..=FRAC_PI_2).contains(&value) {
                return Err(Error::ParameterRange {
                    name,
                    value,
                    range: "[0, pi/2]",
                });
            }
        }
        for (name, value) in [("phi1", self.phi1), ("phi2", self.phi2)] {
            if !(0.0..TAU).contains(&value) {
                return Err(Error::ParameterRange {
                    name,
                    value,
                    range: "[0, 2 pi)",
                });
            }
        }
        Ok(())
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.theta1, self.phi1, self.theta2, self.phi2]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            theta1: a[0],
            phi1: a[1],
            theta2: a[2],
            phi2: a[3],
        }
    }

    pub fn first_qubit(&self) -> [C64; 2] {
        qubit_amplitudes(self.theta1, self.phi1)
    }

    pub fn second_qubit(&self) -> [C64; 2] {
        qubit_amplitudes(self.theta2, self.phi2)
    }
}

/// `cos(theta) |0> + e^{i phi} sin(theta) |1>`.
pub fn qubit_amplitudes(theta: f64, phi: f64) -> [C64; 2] {
    [
        C64::new(theta.cos(), 0.0),
        C64::from_polar(theta.sin(), phi),
    ]
}

pub fn product_state_vector(p: &ProductStateParams) -> [C64; 4] {
    let a = p.first_qubit();
    let b = p.second_qubit();
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// Builds `v v^dagger / |v|^2` and reports the weight `|v|^2`.
///
/// With `allow_unnormalized = false` the vector must already have unit norm.
pub fn density_from_vector(v: &[C64], allow_unnormalized: bool) -> Result<(DensityMatrix, f64)> {
    let weight: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if weight <= 0.0 || !weight.is_finite() {
        return Err(Error::DegenerateState);
    }
    if !allow_unnormalized && (weight - 1.0).abs() > TRACE_TOL {
        return Err(Error::NotUnitTrace { trace: weight });
    }
    let norm = weight.sqrt();
    let unit: Vec<C64> = v.iter().map(|z| z / norm).collect();
    Ok((DensityMatrix::from_trusted(ComplexMatrix::outer(&unit, &unit)), weight))
}
