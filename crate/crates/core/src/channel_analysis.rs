//! Choi-matrix diagnostics for single-qubit maps.
//!
//! Convention: `C = Σ_ij map(|i⟩⟨j|) ⊗ |i⟩⟨j|`, unnormalised (trace 2 for a
//! trace-preserving map). The output space is the first tensor factor, so
//! `C[(2a+i),(2b+j)] = map(|i⟩⟨j|)[a,b]` and a Kraus operator `K` contributes
//! the rank-one term `vec(K) vec(K)†` with `vec(K)[2a+i] = K[a,i]`.

use crate::error::{invalid, Error, Result};
use crate::spinalg::{hermitian_eigen, kron2, ComplexMatrix, C64};

/// Default relative eigenvalue cutoff for Kraus extraction.
pub const DEFAULT_KRAUS_CUTOFF: f64 = 1e-12;

const LINEARITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    label: String,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Builds the Choi matrix of `map` from its action on the four matrix units.
///
/// Linearity is checked by comparing the image of a fixed complex
/// combination of matrix units (with coefficients not summing to one, so
/// affine offsets are caught) against the combination of the images.
pub fn choi_of<F>(label: impl Into<String>, map: F) -> Result<ChoiMatrix>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let mut images = Vec::with_capacity(4);
    let mut c = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let unit = ComplexMatrix::unit(2, i, j);
            let image = map(&unit);
            if image.dim() != 2 {
                return Err(invalid("map must return 2x2 matrices"));
            }
            c = c + kron2(&image, &unit);
            images.push(image);
        }
    }

    let coeffs = [
        C64::new(0.7, 0.2),
        C64::new(-0.4, 1.1),
        C64::new(0.3, -0.9),
        C64::new(1.6, 0.5),
    ];
    let mut probe = ComplexMatrix::zeros(2);
    let mut expected = ComplexMatrix::zeros(2);
    for (k, (&a, image)) in coeffs.iter().zip(&images).enumerate() {
        probe = probe + ComplexMatrix::unit(2, k / 2, k % 2).scale(a);
        expected = expected + image.scale(a);
    }
    let scaled = map(&ComplexMatrix::unit(2, 0, 1).scale(C64::new(-2.5, 0.5)));
    let residual = (map(&probe) - expected)
        .frobenius_norm()
        .max((scaled - images[1].scale(C64::new(-2.5, 0.5))).frobenius_norm());
    let scale = images
        .iter()
        .map(|m| m.frobenius_norm())
        .fold(1.0, f64::max);
    if residual.is_nan() || residual > LINEARITY_TOL * scale {
        return Err(Error::InvalidMap { residual });
    }

    Ok(ChoiMatrix {
        matrix: c,
        label: label.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CptpReport {
    pub min_eigenvalue: f64,
    /// ‖Tr_out C − I‖_F
    pub tp_residual: f64,
    pub completely_positive: bool,
    pub trace_preserving: bool,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.completely_positive && self.trace_preserving
    }
}

/// Partial trace over the output (first) factor.
pub fn input_marginal(c: &ChoiMatrix) -> ComplexMatrix {
    let m = &c.matrix;
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = m[(i, j)] + m[(2 + i, 2 + j)];
        }
    }
    out
}

pub fn verify_cptp(c: &ChoiMatrix, tol: f64) -> CptpReport {
    let min_eigenvalue = hermitian_eigen(&c.matrix).min();
    let tp_residual = (input_marginal(c) - ComplexMatrix::identity(2)).frobenius_norm();
    CptpReport {
        min_eigenvalue,
        tp_residual,
        completely_positive: min_eigenvalue >= -tol,
        trace_preserving: tp_residual <= tol,
    }
}

/// Canonical (orthogonal) Kraus operators from the Choi eigendecomposition.
///
/// Eigenvalues below `-tol · λ_max` are a CP violation; those at or below
/// `tol · λ_max` are dropped.
pub fn kraus_from_choi(c: &ChoiMatrix, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let eig = hermitian_eigen(&c.matrix);
    let scale = eig.max().abs().max(f64::MIN_POSITIVE);
    if eig.min() < -tol * scale {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: eig.min(),
        });
    }
    let ops = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > tol * scale)
        .map(|(k, &l)| {
            let amp = l.sqrt();
            let mut op = ComplexMatrix::zeros(2);
            for a in 0..2 {
                for i in 0..2 {
                    op[(a, i)] = eig.vectors[(2 * a + i, k)] * amp;
                }
            }
            op
        })
        .collect();
    Ok(ops)
}

/// `Σ_k K_k m K_k†`
pub fn apply_kraus(ops: &[ComplexMatrix], m: &ComplexMatrix) -> ComplexMatrix {
    ops.iter()
        .fold(ComplexMatrix::zeros(m.dim()), |acc, k| acc + k.conjugate(m))
}

/// `‖Σ_k K_k† K_k − I‖_F`
pub fn completeness_residual(ops: &[ComplexMatrix]) -> f64 {
    let sum = ops
        .iter()
        .fold(ComplexMatrix::zeros(2), |acc, k| acc + k.adjoint() * *k);
    (sum - ComplexMatrix::identity(2)).frobenius_norm()
}

/// Frobenius distance between Choi matrices.
pub fn channel_distance(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<f64> {
    crate::spinalg::frobenius_distance(&a.matrix, &b.matrix)
}

/// Choi matrix of the identity channel, `|Φ⟩⟨Φ|` with `|Φ⟩ = |00⟩ + |11⟩`.
pub fn identity_choi() -> ChoiMatrix {
    let mut m = ComplexMatrix::zeros(4);
    for &i in &[0, 3] {
        for &j in &[0, 3] {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
    }
    ChoiMatrix {
        matrix: m,
        label: "identity".into(),
    }
}
