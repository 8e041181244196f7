//! Numerical ground truth: the exact unitary for each static field value,
//! averaged over the Gaussian field distribution.
//!
//! Two independent averaging routes are provided. Gauss–Hermite quadrature
//! is deterministic and converges spectrally for the Gaussian × trigonometric
//! integrand. Seeded Monte Carlo is the stochastic cross-check.
//!
//! Monte Carlo samples come from ChaCha8 streams: the sample budget is cut
//! into chunks of [`MC_CHUNK`] samples, chunk `k` draws from the stream
//! `(seed, k)`, and Gaussian deviates are produced by Box–Muller on
//! consecutive uniform pairs. Chunk sums are combined in chunk order, so
//! parallel and serial runs agree bit for bit.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel_analytic::Scenario;
use crate::error::{invalid, Error, Result};
use crate::spinalg::{
    kron2, rotation_unchecked, validate_density, ComplexMatrix, DensityMatrix, C64,
};

pub const DEFAULT_NODES: usize = 201;
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const MC_CHUNK: usize = 4096;

const QL_MAX_ITER: usize = 100;

/// Gauss–Hermite rule normalised to the standard normal distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    nodes: usize,
    abscissae: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureSpec {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(invalid(format!(
                "quadrature needs at least 2 nodes, got {nodes}"
            )));
        }
        let (abscissae, weights) = gauss_hermite_normal(nodes)?;
        Ok(Self {
            nodes,
            abscissae,
            weights,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Standard-normal abscissae, ascending.
    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    /// Weights summing to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// E[f(Z)] for Z ~ N(0, 1).
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.abscissae
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::new(DEFAULT_NODES).expect("default Gauss-Hermite rule")
    }
}

/// Golub–Welsch nodes for the weight e^{−x²}, refined by Newton steps on the
/// orthonormal Hermite recurrence, with Christoffel weights.
fn gauss_hermite_normal(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut diag = vec![0.0; n];
    let mut off: Vec<f64> = (1..n).map(|k| (0.5 * k as f64).sqrt()).collect();
    off.push(0.0);
    tridiagonal_eigenvalues(&mut diag, &mut off).map_err(|_| Error::NodeGeneration { nodes: n })?;
    diag.sort_by(f64::total_cmp);

    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for &x0 in &diag {
        let mut x = x0;
        for _ in 0..3 {
            let (pn, pn1, _) = orthonormal_hermite(n, x);
            let step = pn / ((2.0 * n as f64).sqrt() * pn1);
            if !step.is_finite() {
                break;
            }
            x -= step;
        }
        let (_, _, sum_sq) = orthonormal_hermite(n, x);
        xs.push(x);
        ws.push(1.0 / sum_sq);
    }

    // enforce the reflection symmetry of the rule
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (xs[j] - xs[i]);
        let w = 0.5 * (ws[i] + ws[j]);
        xs[i] = -x;
        xs[j] = x;
        ws[i] = w;
        ws[j] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
    }

    if !xs.iter().chain(&ws).all(|v| v.is_finite()) {
        return Err(Error::NodeGeneration { nodes: n });
    }
    let total: f64 = ws.iter().sum();
    let abscissae = xs.iter().map(|x| x * std::f64::consts::SQRT_2).collect();
    let weights = ws.iter().map(|w| w / total).collect();
    Ok((abscissae, weights))
}

/// Returns (p̃_n(x), p̃_{n−1}(x), Σ_{k<n} p̃_k(x)²) for the Hermite
/// polynomials orthonormal under e^{−x²}.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += cur * cur;
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev, sum_sq)
}

/// Implicit QL on a symmetric tridiagonal matrix; eigenvalues overwrite
/// `d`. `e[i]` couples rows i and i+1, `e[n-1]` is scratch.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> std::result::Result<(), ()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(());
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `exp(−iμtB σ·d)`: rotation by the signed angle 2κμtB about n̂.
pub fn unitary_at_field(b: f64, s: &Scenario, t: f64) -> ComplexMatrix {
    let f = s.field();
    let angle = 2.0 * f.kappa * s.noise().mu() * t * b;
    rotation_unchecked(&f.n, angle)
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Quadrature average of `U m U†` over the field distribution; linear in
/// `m`, for any 2×2 matrix.
pub fn quadrature_map(
    m: &ComplexMatrix,
    s: &Scenario,
    t: f64,
    q: &QuadratureSpec,
) -> ComplexMatrix {
    let sigma = s.noise().vartheta();
    q.abscissae
        .iter()
        .zip(&q.weights)
        .fold(ComplexMatrix::zeros(2), |acc, (&z, &w)| {
            let u = unitary_at_field(sigma * z, s, t);
            acc + u.conjugate(m).scale_re(w)
        })
}

pub fn average_quadrature(
    rho: &DensityMatrix,
    s: &Scenario,
    t: f64,
    q: &QuadratureSpec,
) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(invalid(format!(
            "expected a single-qubit state, got dim {}",
            rho.dim()
        )));
    }
    check_time(t)?;
    validate_density(quadrature_map(rho.matrix(), s, t, q), rho.tol())
}

/// Both spins see the same field and boost: `U₂ = U ⊗ U`.
pub fn two_qubit_average(
    rho4: &DensityMatrix,
    s: &Scenario,
    t: f64,
    q: &QuadratureSpec,
) -> Result<DensityMatrix> {
    if rho4.dim() != 4 {
        return Err(invalid(format!(
            "expected a two-qubit state, got dim {}",
            rho4.dim()
        )));
    }
    check_time(t)?;
    let sigma = s.noise().vartheta();
    let m = q
        .abscissae
        .iter()
        .zip(&q.weights)
        .fold(ComplexMatrix::zeros(4), |acc, (&z, &w)| {
            let u = unitary_at_field(sigma * z, s, t);
            acc + kron2(&u, &u).conjugate(rho4.matrix()).scale_re(w)
        });
    validate_density(m, rho4.tol())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McSpec {
    samples: usize,
    seed: u64,
}

impl McSpec {
    pub fn new(samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(invalid("Monte Carlo needs at least one sample"));
        }
        Ok(Self { samples, seed })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl Default for McSpec {
    fn default() -> Self {
        Self {
            samples: DEFAULT_MC_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub state: DensityMatrix,
    /// √(Σ_entries var / N): expected Frobenius error of the mean. Infinite
    /// for a single sample.
    pub stderr: f64,
}

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Two independent standard normals via Box–Muller.
pub fn box_muller(rng: &mut impl Rng) -> (f64, f64) {
    let u1 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    (r * c, r * s)
}

struct ChunkSums {
    sum: [C64; 4],
    sum_sq: [f64; 4],
}

pub fn average_montecarlo(
    rho: &DensityMatrix,
    s: &Scenario,
    t: f64,
    mc: &McSpec,
) -> Result<McEstimate> {
    if rho.dim() != 2 {
        return Err(invalid(format!(
            "expected a single-qubit state, got dim {}",
            rho.dim()
        )));
    }
    check_time(t)?;
    let sigma = s.noise().vartheta();
    let n = mc.samples;
    let chunks = n.div_ceil(MC_CHUNK);

    let partial: Vec<ChunkSums> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let count = MC_CHUNK.min(n - k * MC_CHUNK);
            let mut rng = chunk_rng(mc.seed, k as u64);
            let mut acc = ChunkSums {
                sum: [C64::new(0.0, 0.0); 4],
                sum_sq: [0.0; 4],
            };
            let mut push = |z: f64| {
                let x = unitary_at_field(sigma * z, s, t).conjugate(rho.matrix());
                for (i, v) in x.entries().iter().enumerate() {
                    acc.sum[i] += v;
                    acc.sum_sq[i] += v.norm_sqr();
                }
            };
            let mut left = count;
            while left > 0 {
                let (z0, z1) = box_muller(&mut rng);
                push(z0);
                if left > 1 {
                    push(z1);
                }
                left = left.saturating_sub(2);
            }
            acc
        })
        .collect();

    let mut sum = [C64::new(0.0, 0.0); 4];
    let mut sum_sq = [0.0; 4];
    for p in &partial {
        for i in 0..4 {
            sum[i] += p.sum[i];
            sum_sq[i] += p.sum_sq[i];
        }
    }
    let nf = n as f64;
    let mean: Vec<C64> = sum.iter().map(|v| v / nf).collect();
    let stderr = if n > 1 {
        let var: f64 = (0..4)
            .map(|i| ((sum_sq[i] - nf * mean[i].norm_sqr()) / (nf - 1.0)).max(0.0))
            .sum();
        (var / nf).sqrt()
    } else {
        f64::INFINITY
    };
    let state = validate_density(ComplexMatrix::from_entries(&mean)?, rho.tol())?;
    Ok(McEstimate { state, stderr })
}
