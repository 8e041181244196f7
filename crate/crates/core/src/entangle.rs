//! Two-qubit entanglement under a common bath.

use rayon::prelude::*;

use crate::channel_analytic::Scenario;
use crate::channel_oracle::{two_qubit_average, QuadratureSpec};
use crate::error::{invalid, Result};
use crate::spinalg::{hermitian_eigen, kron2, pauli_y, DensityMatrix, C64};

/// Wootters concurrence.
///
/// Uses the Hermitian form `R = √ρ ρ̃ √ρ`, whose eigenvalues are those of
/// `ρ ρ̃`; eigenvalues are clamped at zero before square roots.
pub fn concurrence(rho4: &DensityMatrix) -> Result<f64> {
    if rho4.dim() != 4 {
        return Err(invalid(format!(
            "expected a two-qubit state, got dim {}",
            rho4.dim()
        )));
    }
    let rho = rho4.matrix();
    let yy = kron2(&pauli_y(), &pauli_y());
    let tilde = yy * rho.conj() * yy;
    let sqrt_rho = hermitian_eigen(rho).apply_fn(|l| l.max(0.0).sqrt());
    let r = (sqrt_rho * tilde * sqrt_rho).hermitian_part();
    let lambda: Vec<f64> = hermitian_eigen(&r)
        .values
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    let c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
    Ok(c.clamp(0.0, 1.0))
}

/// `(|00⟩ + |11⟩)/√2`
pub fn bell_phi_plus() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    DensityMatrix::pure(&[C64::new(h, 0.0), z, z, C64::new(h, 0.0)])
        .expect("Bell state is a valid density matrix")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcurrenceSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// `exp(−4γt²)`
    pub reference_rest: Vec<f64>,
    /// `exp(−4γ′t²)`, exact only in the ultra-relativistic limit.
    pub reference_boosted: Vec<f64>,
}

pub fn concurrence_trajectory(
    s: &Scenario,
    times: &[f64],
    q: &QuadratureSpec,
) -> Result<ConcurrenceSeries> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid("times must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times must be sorted"));
    }
    let phi = bell_phi_plus();
    let values = times
        .par_iter()
        .map(|&t| two_qubit_average(&phi, s, t, q).and_then(|r| concurrence(&r)))
        .collect::<Result<Vec<f64>>>()?;
    let g = s.noise().gamma();
    let gp = s.gamma_prime();
    Ok(ConcurrenceSeries {
        times: times.to_vec(),
        values,
        reference_rest: times.iter().map(|t| (-4.0 * g * t * t).exp()).collect(),
        reference_boosted: times.iter().map(|t| (-4.0 * gp * t * t).exp()).collect(),
    })
}
