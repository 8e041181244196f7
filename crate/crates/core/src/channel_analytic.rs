//! Closed-form single-qubit channel of the boosted spin.
//!
//! Three algebraically different routes produce the same map:
//!
//! * element-wise population/coherence formulas ([`evolve_elementwise`]),
//! * a signed-weight operator sum ([`operator_sum_apply`]),
//! * dephasing in the dressed frame that aligns the boosted axis with ẑ
//!   ([`dressed_apply`]).
//!
//! Units: ħ = 1. The `*_map` variants act linearly on arbitrary 2×2
//! matrices and are what the Choi construction consumes.

use crate::error::{invalid, Result};
use crate::relkin::{effective_field, BoostParams, EffectiveField};
use crate::spinalg::{
    pauli_x, pauli_y, pauli_z, rotation_unchecked, validate_density, ComplexMatrix, DensityMatrix,
    C64, ONE,
};

/// Gaussian field noise: magnetic moment μ and field standard deviation ϑ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    mu: f64,
    vartheta: f64,
    gamma: f64,
}

impl NoiseSpec {
    pub fn new(mu: f64, vartheta: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(invalid(format!("mu must be finite and > 0, got {mu}")));
        }
        if !(vartheta.is_finite() && vartheta > 0.0) {
            return Err(invalid(format!(
                "vartheta must be finite and > 0, got {vartheta}"
            )));
        }
        Ok(Self {
            mu,
            vartheta,
            gamma: 2.0 * vartheta * vartheta * mu * mu,
        })
    }

    /// Noise with μ = 1 and the requested dephasing rate γ.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(invalid(format!(
                "gamma must be finite and > 0, got {gamma}"
            )));
        }
        Ok(Self {
            mu: 1.0,
            vartheta: (0.5 * gamma).sqrt(),
            gamma,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }

    /// γ = 2ϑ²μ²
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    boost: BoostParams,
    noise: NoiseSpec,
    field: EffectiveField,
}

impl Scenario {
    pub fn new(boost: BoostParams, noise: NoiseSpec) -> Self {
        Self {
            boost,
            noise,
            field: effective_field(&boost),
        }
    }

    pub fn boost(&self) -> &BoostParams {
        &self.boost
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn field(&self) -> &EffectiveField {
        &self.field
    }

    /// γ′ = κ²γ
    pub fn gamma_prime(&self) -> f64 {
        self.field.kappa * self.field.kappa * self.noise.gamma
    }

    /// Time at which the rest-frame abscissa γt² takes the given value.
    pub fn time_at(&self, gamma_t2: f64) -> f64 {
        (gamma_t2 / self.noise.gamma).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelCoeffs {
    pub gamma_prime: f64,
    /// exp(−γ′t²) = p0 − p1
    pub decay: f64,
    pub p0: f64,
    pub p1: f64,
    /// p1 (η + χ)
    pub epsilon: f64,
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

fn coeffs_unchecked(s: &Scenario, t: f64) -> ChannelCoeffs {
    let gamma_prime = s.gamma_prime();
    let x = gamma_prime * t * t;
    let decay = (-x).exp();
    let p1 = -0.5 * (-x).exp_m1();
    ChannelCoeffs {
        gamma_prime,
        decay,
        p0: 0.5 * (1.0 + decay),
        p1,
        epsilon: p1 * (s.field.eta + s.field.chi),
    }
}

pub fn channel_coeffs(s: &Scenario, t: f64) -> Result<ChannelCoeffs> {
    check_time(t)?;
    Ok(coeffs_unchecked(s, t))
}

/// `λ0 m + λ1 σz m σz` with `λ0 − λ1 = exp(−γt²)`.
pub fn rest_dephasing_map(m: &ComplexMatrix, gamma: f64, t: f64) -> ComplexMatrix {
    let decay = (-gamma * t * t).exp();
    let z = pauli_z();
    m.scale_re(0.5 * (1.0 + decay)) + (z * *m * z).scale_re(0.5 * (1.0 - decay))
}

pub fn rest_dephasing(rho: &DensityMatrix, gamma: f64, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(invalid(format!(
            "gamma must be finite and >= 0, got {gamma}"
        )));
    }
    validate_density(rest_dephasing_map(rho.matrix(), gamma, t), rho.tol())
}

/// Population and coherence updates, extended linearly to any 2×2 matrix.
///
/// The azimuth entering the χ and η terms is that of the boosted axis n̂,
/// see [`EffectiveField::axis_azimuth`].
pub fn elementwise_map(m: &ComplexMatrix, s: &Scenario, t: f64) -> ComplexMatrix {
    let f = &s.field;
    let k = coeffs_unchecked(s, t);
    let w = 2.0 * k.p1; // 1 − exp(−γ′t²)
    let ea = C64::from_polar(1.0, f.axis_azimuth);
    let (uu, ud, du, dd) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let pop = uu - dd;

    let delta_uu = (pop * f.eta - (ud * ea + du * ea.conj()) * f.chi) * 0.5;
    let delta_ud = (pop * ea.conj() * f.chi + (ud + du * ea.conj() * ea.conj()) * f.eta) * 0.5;
    let delta_du = (pop * ea * f.chi + (du + ud * ea * ea) * f.eta) * 0.5;

    ComplexMatrix::from_rows2([
        [uu - delta_uu * w, ud * k.decay + delta_ud * w],
        [du * k.decay + delta_du * w, dd + delta_uu * w],
    ])
}

pub fn evolve_elementwise(rho: &DensityMatrix, s: &Scenario, t: f64) -> Result<DensityMatrix> {
    check_single_qubit(rho)?;
    check_time(t)?;
    validate_density(elementwise_map(rho.matrix(), s, t), rho.tol())
}

/// `p0 m + (p1 − ε) σz m σz + p1(η − χ) σa m σa + p1 χ (σz + σa) m (σz + σa)`
/// with `σa = cos α σx + sin α σy` along the transverse boosted axis.
///
/// The weight `p1(η − χ)` is negative whenever χ > η (tilt below π/4);
/// the sum is still the exact channel.
pub fn operator_sum_map(m: &ComplexMatrix, s: &Scenario, t: f64) -> ComplexMatrix {
    let f = &s.field;
    let k = coeffs_unchecked(s, t);
    let (sa_, ca) = f.axis_azimuth.sin_cos();
    let z = pauli_z();
    let sa = pauli_x().scale_re(ca) + pauli_y().scale_re(sa_);
    let za = z + sa;

    m.scale_re(k.p0)
        + (z * *m * z).scale_re(k.p1 - k.epsilon)
        + (sa * *m * sa).scale_re(k.p1 * (f.eta - f.chi))
        + (za * *m * za).scale_re(k.p1 * f.chi)
}

pub fn operator_sum_apply(rho: &DensityMatrix, s: &Scenario, t: f64) -> Result<DensityMatrix> {
    check_single_qubit(rho)?;
    check_time(t)?;
    validate_density(operator_sum_map(rho.matrix(), s, t), rho.tol())
}

/// `V = exp[−i (tilt/2) σ·m̂]` with `m̂ ∝ n̂ × ẑ`; it rotates n̂ onto ẑ, so
/// `V (σ·n̂) V† = σz`.
pub fn dressing_transform(field: &EffectiveField) -> ComplexMatrix {
    let [nx, ny, _] = field.n;
    let perp = nx.hypot(ny);
    if field.tilt == 0.0 || perp == 0.0 {
        return ComplexMatrix::identity(2);
    }
    let axis = [ny / perp, -nx / perp, 0.0];
    rotation_unchecked(&axis, field.tilt)
}

/// Pure dephasing at rate γ′ in the dressed frame, mapped back by V†.
pub fn dressed_map(m: &ComplexMatrix, s: &Scenario, t: f64) -> ComplexMatrix {
    let v = dressing_transform(&s.field);
    let mut dressed = v * *m * v.adjoint();
    let decay = coeffs_unchecked(s, t).decay;
    dressed[(0, 1)] *= decay;
    dressed[(1, 0)] *= decay;
    v.adjoint() * dressed * v
}

pub fn dressed_apply(rho: &DensityMatrix, s: &Scenario, t: f64) -> Result<DensityMatrix> {
    check_single_qubit(rho)?;
    check_time(t)?;
    validate_density(dressed_map(rho.matrix(), s, t), rho.tol())
}

/// State reached from |+⟩ = (|↑⟩ + |↓⟩)/√2 with the velocity in the x–z
/// plane (φ = 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExampleTrajectory {
    pub rho_uu: f64,
    pub rho_ud: C64,
}

/// ρ↑↑(t) = [1 + χ̃ (1 − e^{−γ′t²})]/2 and ρ↑↓(t) = [(1 − η) e^{−γ′t²} + η]/2,
/// where χ̃ = n_z n_x is χ signed by the orientation of the boosted axis:
/// negative for θ < π/2, positive for θ > π/2.
pub fn example_trajectory(s: &Scenario, t: f64) -> Result<ExampleTrajectory> {
    check_time(t)?;
    if s.boost.phi() != 0.0 {
        return Err(invalid(format!(
            "example trajectory needs phi = 0, got {}",
            s.boost.phi()
        )));
    }
    let f = &s.field;
    let k = coeffs_unchecked(s, t);
    let w = 2.0 * k.p1;
    Ok(ExampleTrajectory {
        rho_uu: 0.5 * (1.0 + f.oriented_chi(0.0) * w),
        rho_ud: C64::new(0.5 * ((1.0 - f.eta) * k.decay + f.eta), 0.0),
    })
}

fn check_single_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 2 {
        return Err(invalid(format!(
            "expected a single-qubit state, got dim {}",
            rho.dim()
        )));
    }
    Ok(())
}

/// |+⟩⟨+|
pub fn plus_state() -> DensityMatrix {
    DensityMatrix::new(ComplexMatrix::from_rows2([[ONE * 0.5; 2]; 2]))
        .expect("|+><+| is a valid state")
}
