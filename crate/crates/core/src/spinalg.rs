//! Dense complex matrices of dimension 2 (one qubit) and 4 (two qubits).
//!
//! Everything here is `Copy` and allocation-free: the storage is a fixed
//! 16-entry array of which the leading `dim * dim` entries are used in
//! row-major order.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;

/// Cartesian 3-vector.
pub type Vec3 = [f64; 3];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default tolerance used when wrapping a matrix as a [`DensityMatrix`].
pub const DEFAULT_DENSITY_TOL: f64 = 1e-10;

const JACOBI_THRESHOLD: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; 16],
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries; `entries.len()` must be 4 or 16.
    pub fn from_entries(entries: &[C64]) -> Result<Self> {
        let dim = match entries.len() {
            4 => 2,
            16 => 4,
            n => return Err(invalid(format!("expected 4 or 16 entries, got {n}"))),
        };
        let mut m = Self::zeros(dim);
        m.data[..entries.len()].copy_from_slice(entries);
        Ok(m)
    }

    pub fn from_rows2(rows: [[C64; 2]; 2]) -> Self {
        let mut m = Self::zeros(2);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Result<Self> {
        let dim = match diag.len() {
            2 | 4 => diag.len(),
            n => return Err(invalid(format!("diagonal length must be 2 or 4, got {n}"))),
        };
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        Ok(m)
    }

    /// # Panics
    /// If `dim` is not 2 or 4.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "unsupported dimension {dim}");
        Self {
            dim,
            data: [ZERO; 16],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Matrix unit |i⟩⟨j|.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = ONE;
        m
    }

    /// Projector |ψ⟩⟨ψ| onto a (not necessarily normalised) ket.
    pub fn outer(ket: &[C64]) -> Result<Self> {
        let dim = ket.len();
        if dim != 2 && dim != 4 {
            return Err(invalid(format!("ket length must be 2 or 4, got {dim}")));
        }
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = ket[i] * ket[j].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)];
            }
        }
        m
    }

    /// Entry-wise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut m = *self;
        for z in m.data[..self.dim * self.dim].iter_mut() {
            *z = f(*z);
        }
        m
    }

    /// `self · m · self†`
    pub fn conjugate(&self, m: &Self) -> Self {
        *self * *m * self.adjoint()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.entries()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl Add for ComplexMatrix {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for ComplexMatrix {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        self
    }
}

impl Mul for ComplexMatrix {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in mul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})[", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows2([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows2([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_rows2([[ONE, ZERO], [ZERO, -ONE]])
}

/// σ·a for an arbitrary real 3-vector.
pub fn sigma_dot(a: &Vec3) -> ComplexMatrix {
    ComplexMatrix::from_rows2([
        [C64::new(a[2], 0.0), C64::new(a[0], -a[1])],
        [C64::new(a[0], a[1]), C64::new(-a[2], 0.0)],
    ])
}

/// SU(2) rotation `exp(-i angle/2 σ·axis)` in closed (Rodrigues) form.
pub fn pauli_rotation(axis: &Vec3, angle: f64) -> Result<ComplexMatrix> {
    let len = norm(axis);
    if !len.is_finite() || (len - 1.0).abs() > 1e-12 {
        return Err(invalid(format!(
            "rotation axis must be a unit vector (|axis| = {len})"
        )));
    }
    if !angle.is_finite() {
        return Err(invalid("rotation angle must be finite"));
    }
    Ok(rotation_unchecked(axis, angle))
}

pub(crate) fn rotation_unchecked(axis: &Vec3, angle: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * angle).sin_cos();
    let [nx, ny, nz] = *axis;
    ComplexMatrix::from_rows2([
        [C64::new(c, -s * nz), C64::new(-s * ny, -s * nx)],
        [C64::new(s * ny, -s * nx), C64::new(c, s * nz)],
    ])
}

/// Kronecker product of two 2×2 matrices.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != 2 || b.dim != 2 {
        return Err(invalid(format!(
            "tensor product needs two 2x2 factors, got {}x{} and {}x{}",
            a.dim, a.dim, b.dim, b.dim
        )));
    }
    Ok(kron2(a, b))
}

pub(crate) fn kron2(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(invalid(format!(
            "dimension mismatch: {} vs {}",
            a.dim, b.dim
        )));
    }
    Ok((*a - *b).frobenius_norm())
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|x| x)
    }

    /// `V f(Λ) V†`
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mut diag = ComplexMatrix::zeros(n);
        for (k, &v) in self.values.iter().enumerate() {
            diag[(k, k)] = C64::new(f(v), 0.0);
        }
        self.vectors.conjugate(&diag)
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }
}

/// Cyclic complex Jacobi diagonalisation of the Hermitian part of `m`.
///
/// Sweeps stop once the off-diagonal Frobenius norm falls below
/// `1e-14 · ‖m‖_F`. Eigenvalues are returned in descending order.
pub fn hermitian_eigen(m: &ComplexMatrix) -> HermitianEigen {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&a) <= JACOBI_THRESHOLD * scale {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let g = a[(p, q)];
                    let g_abs = g.norm();
                    if g_abs <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let phase = g / g_abs;
                    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g_abs);
                    let t = if theta.is_finite() {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    } else {
                        0.0
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let mut j = ComplexMatrix::identity(n);
                    j[(p, p)] = C64::new(c, 0.0);
                    j[(p, q)] = C64::new(s, 0.0);
                    j[(q, p)] = -phase.conj() * s;
                    j[(q, q)] = phase.conj() * c;
                    a = j.adjoint() * a * j;
                    // the rotated pair is diagonal by construction
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    v = v * j;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, k)];
        }
    }
    HermitianEigen { values, vectors }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    tol: f64,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_density(m, DEFAULT_DENSITY_TOL)
    }

    /// Pure state from a ket; the ket is normalised first.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        let n: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("ket must be non-zero and finite"));
        }
        let normed: Vec<C64> = ket.iter().map(|z| z / n).collect();
        Self::new(ComplexMatrix::outer(&normed)?)
    }

    /// Single-qubit state `(I + r·σ)/2` with `|r| ≤ 1`.
    pub fn from_bloch(r: &Vec3) -> Result<Self> {
        let m = (ComplexMatrix::identity(2) + sigma_dot(r)).scale_re(0.5);
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
            tol: DEFAULT_DENSITY_TOL,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Bloch vector of a single-qubit state.
    pub fn bloch(&self) -> Option<Vec3> {
        if self.dim() != 2 {
            return None;
        }
        let m = &self.matrix;
        Some([
            2.0 * m[(0, 1)].re,
            -2.0 * m[(0, 1)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ])
    }
}

impl Index<(usize, usize)> for DensityMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.matrix[idx]
    }
}

/// Checks hermiticity, unit trace and positivity (in that order).
///
/// The hermiticity residual is `‖m − m†‖_F`, the trace residual `|tr m − 1|`
/// and the positivity residual the smallest eigenvalue.
pub fn validate_density(m: ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    if tol.is_nan() || tol < 0.0 {
        return Err(invalid("tolerance must be non-negative"));
    }
    if !m.is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    let herm = (m - m.adjoint()).frobenius_norm();
    if herm > tol {
        return Err(Error::NotHermitian { residual: herm });
    }
    let tr = (m.trace() - ONE).norm();
    if tr > tol {
        return Err(Error::TraceMismatch { residual: tr });
    }
    let min_eig = hermitian_eigen(&m).min();
    if min_eig < -tol {
        return Err(Error::NotPositive {
            min_eigenvalue: min_eig,
        });
    }
    Ok(DensityMatrix { matrix: m, tol })
}
