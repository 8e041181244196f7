//! Relativistic kinematics of the moving spin and the geometry of the noise
//! field it sees.
//!
//! Velocities are expressed through the rapidity `xi` (`cosh xi` is the
//! Lorentz factor) and the polar/azimuthal angles of the velocity with
//! respect to the lab-frame noise axis ẑ.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use crate::error::{invalid, Result};
use crate::spinalg::{cross, dot, Vec3};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoostParams {
    xi: f64,
    theta: f64,
    phi: f64,
}

impl BoostParams {
    /// `xi ≥ 0`, `theta ∈ [0, π]`, `phi ∈ [0, 2π)`.
    pub fn new(xi: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(xi.is_finite() && xi >= 0.0) {
            return Err(invalid(format!(
                "rapidity must be finite and >= 0, got {xi}"
            )));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(invalid(format!("theta must lie in [0, pi], got {theta}")));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(invalid(format!("phi must lie in [0, 2pi), got {phi}")));
        }
        Ok(Self { xi, theta, phi })
    }

    pub fn at_rest() -> Self {
        Self {
            xi: 0.0,
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// v/c
    pub fn beta(&self) -> f64 {
        self.xi.tanh()
    }

    pub fn lorentz_factor(&self) -> f64 {
        self.xi.cosh()
    }

    pub fn direction(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Velocity vector for a given speed of light.
    pub fn velocity(&self, c: f64) -> Vec3 {
        let v = self.beta() * c;
        self.direction().map(|x| x * v)
    }
}

/// Geometry of the boosted field `B' = B d` for a lab field `B ẑ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveField {
    /// B'/B.
    pub d: Vec3,
    /// |d|, the field amplification.
    pub kappa: f64,
    /// d/κ.
    pub n: Vec3,
    /// Angle between n̂ and ẑ.
    pub tilt: f64,
    /// η = 1 − n_z².
    pub eta: f64,
    /// χ = n_z·√(n_x² + n_y²), never negative.
    pub chi: f64,
    /// Azimuth of the transverse part of n̂. It points opposite to the
    /// velocity azimuth when θ < π/2 and along it when θ > π/2; for a
    /// field along ẑ it falls back to the velocity azimuth.
    pub axis_azimuth: f64,
}

impl EffectiveField {
    pub fn along_z() -> Self {
        Self {
            d: [0.0, 0.0, 1.0],
            kappa: 1.0,
            n: [0.0, 0.0, 1.0],
            tilt: 0.0,
            eta: 0.0,
            chi: 0.0,
            axis_azimuth: 0.0,
        }
    }

    /// χ carrying the orientation of the transverse axis relative to the
    /// velocity azimuth: `n_z (n_x cos φ + n_y sin φ)`.
    pub fn oriented_chi(&self, phi: f64) -> f64 {
        self.n[2] * (self.n[0] * phi.cos() + self.n[1] * phi.sin())
    }
}

/// ξ from β = v/c.
pub fn rapidity_from_beta(beta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(invalid(format!("beta must lie in [0, 1), got {beta}")));
    }
    Ok(beta.atanh())
}

/// Lorentz transformation of (E, B) into the frame moving with `boost`,
/// Gaussian units with c = 1 (E and B share units).
pub fn boost_em_field(e: &Vec3, b: &Vec3, boost: &BoostParams) -> Result<(Vec3, Vec3)> {
    if !e.iter().chain(b.iter()).all(|x| x.is_finite()) {
        return Err(invalid("field components must be finite"));
    }
    if boost.xi == 0.0 {
        return Ok((*e, *b));
    }
    let v = boost.direction();
    let gamma = boost.lorentz_factor();
    let beta = boost.beta();

    let e_par = v.map(|x| x * dot(e, &v));
    let b_par = v.map(|x| x * dot(b, &v));
    let v_cross_b = cross(&v, b);
    let v_cross_e = cross(&v, e);

    let mut e_out = [0.0; 3];
    let mut b_out = [0.0; 3];
    for k in 0..3 {
        let e_perp = e[k] - e_par[k];
        let b_perp = b[k] - b_par[k];
        e_out[k] = e_par[k] + gamma * (e_perp + beta * v_cross_b[k]);
        b_out[k] = b_par[k] + gamma * (b_perp - beta * v_cross_e[k]);
    }
    Ok((e_out, b_out))
}

pub fn effective_field(boost: &BoostParams) -> EffectiveField {
    let (xi, theta, phi) = (boost.xi, boost.theta, boost.phi);
    if xi == 0.0 || theta == 0.0 || theta == PI {
        return EffectiveField {
            axis_azimuth: phi,
            ..EffectiveField::along_z()
        };
    }
    let ch = xi.cosh();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();

    // d_perp = (1 − cosh ξ) cosθ sinθ (cos φ, sin φ)
    let perp = (1.0 - ch) * ct * st;
    let dz = ct * ct + ch * st * st;
    let d = [perp * cp, perp * sp, dz];

    let kappa = perp.hypot(dz);
    let n = d.map(|x| x / kappa);
    let n_perp = perp.abs() / kappa;
    let nz = dz / kappa;

    let axis_azimuth = if perp < 0.0 {
        (phi + PI).rem_euclid(TAU)
    } else {
        phi
    };

    EffectiveField {
        d,
        kappa,
        n,
        tilt: n_perp.atan2(nz),
        eta: n_perp * n_perp,
        chi: nz * n_perp,
        axis_azimuth,
    }
}

/// Closed-form η(ξ, θ).
pub fn eta_profile(xi: f64, theta: f64) -> f64 {
    let ch = xi.cosh();
    let c2 = (2.0 * theta).cos();
    (ch - 1.0).powi(2) * (1.0 - c2 * c2) / (2.0 * ((ch * ch + 1.0) - (ch * ch - 1.0) * c2))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaMax {
    pub eta_max: f64,
    /// Maximiser of η in (0, π/4]; π/4 by convention at ξ = 0.
    pub theta_opt: f64,
    /// χ evaluated at `theta_opt`.
    pub chi_at_opt: f64,
}

pub fn eta_max(xi: f64) -> EtaMax {
    if xi == 0.0 {
        return EtaMax {
            eta_max: 0.0,
            theta_opt: FRAC_PI_4,
            chi_at_opt: 0.0,
        };
    }
    let ch = xi.cosh();
    let ratio = (ch - 1.0) / (ch + 1.0);
    EtaMax {
        eta_max: ratio * ratio,
        theta_opt: 0.5 * ratio.acos(),
        chi_at_opt: 2.0 * ch.sqrt() * (ch - 1.0) / ((ch + 1.0) * (ch + 1.0)),
    }
}
