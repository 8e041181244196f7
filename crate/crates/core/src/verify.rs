//! Deterministic self-check suite behind `relspin verify`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel_analysis::{
    apply_kraus, channel_distance, choi_of, completeness_residual, kraus_from_choi, verify_cptp,
    DEFAULT_KRAUS_CUTOFF,
};
use crate::channel_analytic::{
    dressed_apply, elementwise_map, evolve_elementwise, example_trajectory, operator_sum_apply,
    NoiseSpec, Scenario,
};
use crate::channel_oracle::{average_montecarlo, average_quadrature, McSpec, QuadratureSpec};
use crate::entangle::concurrence_trajectory;
use crate::error::Result;
use crate::relkin::{effective_field, eta_max, BoostParams};
use crate::spinalg::{frobenius_distance, DensityMatrix};

/// One random test case: a single-qubit state, a scenario and a time.
#[derive(Clone, Copy, Debug)]
pub struct Draw {
    pub rho: DensityMatrix,
    pub scenario: Scenario,
    pub t: f64,
    /// Rest-frame abscissa γt².
    pub gamma_t2: f64,
}

/// `n` reproducible draws with ξ ∈ [0,3], θ ∈ [0,π], φ ∈ [0,2π),
/// γt² ∈ [0,5]; even draws are pure states, odd draws mixed.
pub fn random_draws(seed: u64, n: usize) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let cos_pol: f64 = rng.gen_range(-1.0..=1.0);
            let az: f64 = rng.gen_range(0.0..TAU);
            let sin_pol = (1.0 - cos_pol * cos_pol).sqrt();
            let radius = if k % 2 == 0 {
                1.0
            } else {
                rng.gen::<f64>().cbrt()
            };
            let r = [
                radius * sin_pol * az.cos(),
                radius * sin_pol * az.sin(),
                radius * cos_pol,
            ];
            let rho = DensityMatrix::from_bloch(&r).expect("|r| <= 1");
            let boost = BoostParams::new(
                rng.gen_range(0.0..=3.0),
                rng.gen_range(0.0..=PI),
                rng.gen_range(0.0..TAU),
            )
            .expect("in-domain draw");
            let noise = NoiseSpec::new(rng.gen_range(0.5..2.0), rng.gen_range(0.2..1.5))
                .expect("positive noise");
            let scenario = Scenario::new(boost, noise);
            let gamma_t2 = rng.gen_range(0.0..=5.0);
            Draw {
                rho,
                scenario,
                t: scenario.time_at(gamma_t2),
                gamma_t2,
            }
        })
        .collect()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }

    fn from_result(name: &'static str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub draws: usize,
    pub nodes: usize,
    pub mc_samples: usize,
    pub mc_scenarios: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: crate::channel_oracle::DEFAULT_SEED,
            draws: 100,
            nodes: crate::channel_oracle::DEFAULT_NODES,
            mc_samples: 100_000,
            mc_scenarios: 5,
        }
    }
}

fn check_anchors() -> Vec<Check> {
    let opt = eta_max(2.5);
    let f = effective_field(&BoostParams::new(2.5, opt.theta_opt, 0.0).expect("valid"));
    let k2 = f.kappa * f.kappa;
    let mut out = vec![
        Check::new(
            "kappa_anchor",
            (k2 - 6.13229).abs() <= 5e-5,
            format!("kappa^2 = {k2:.6}"),
        ),
        Check::new(
            "eta_max_anchor",
            (opt.eta_max - 0.51780).abs() <= 2e-4,
            format!("eta_max(2.5) = {:.6}", opt.eta_max),
        ),
    ];

    let grid: Vec<f64> = (0..=40).map(|k| 0.5 * k as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&x| eta_max(x).eta_max).collect();
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let last = *values.last().expect("non-empty");
    out.push(Check::new(
        "eta_max_monotone",
        increasing && last > 0.999,
        format!("strictly increasing = {increasing}, eta_max(20) = {last:.9}"),
    ));

    let sat = (|| -> Result<(bool, String)> {
        let noise = NoiseSpec::from_gamma(1.0)?;
        let boosted = Scenario::new(BoostParams::new(2.5, opt.theta_opt, 0.0)?, noise);
        let rest = Scenario::new(BoostParams::at_rest(), noise);
        let b = example_trajectory(&boosted, boosted.time_at(4.0))?
            .rho_ud
            .re;
        let r = example_trajectory(&rest, rest.time_at(4.0))?.rho_ud.re;
        let r_ref = 0.5 * (-4.0f64).exp();
        Ok((
            (b - 0.2589).abs() <= 5e-4 && (r - r_ref).abs() <= 1e-6,
            format!("rho_ud(gt2=4): boosted {b:.6}, rest {r:.6}"),
        ))
    })();
    out.push(Check::from_result("offdiag_saturation", sat));
    out
}

fn check_oracle(draws: &[Draw], nodes: usize) -> Result<Check> {
    let q = QuadratureSpec::new(nodes)?;
    let q2 = QuadratureSpec::new(2 * nodes)?;
    let errs = draws
        .par_iter()
        .map(|d| {
            let exact = evolve_elementwise(&d.rho, &d.scenario, d.t)?;
            let a = average_quadrature(&d.rho, &d.scenario, d.t, &q)?;
            let b = average_quadrature(&d.rho, &d.scenario, d.t, &q2)?;
            Ok((
                frobenius_distance(exact.matrix(), a.matrix())?,
                frobenius_distance(a.matrix(), b.matrix())?,
            ))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let max_err = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let max_dbl = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(Check::new(
        "oracle_equivalence",
        max_err < 1e-8 && max_dbl < 1e-10,
        format!(
            "max |analytic - quadrature| = {max_err:.3e}, max node-doubling change = {max_dbl:.3e}"
        ),
    ))
}

fn check_decompositions(draws: &[Draw]) -> Result<Check> {
    let mut max_os: f64 = 0.0;
    let mut max_dr: f64 = 0.0;
    let mut chi_gt_eta = 0;
    for d in draws {
        let exact = evolve_elementwise(&d.rho, &d.scenario, d.t)?;
        let os = operator_sum_apply(&d.rho, &d.scenario, d.t)?;
        let dr = dressed_apply(&d.rho, &d.scenario, d.t)?;
        max_os = max_os.max(frobenius_distance(exact.matrix(), os.matrix())?);
        max_dr = max_dr.max(frobenius_distance(exact.matrix(), dr.matrix())?);
        let f = d.scenario.field();
        if f.chi > f.eta {
            chi_gt_eta += 1;
        }
    }
    Ok(Check::new(
        "decomposition_equivalence",
        max_os < 1e-10 && max_dr < 1e-10 && chi_gt_eta > 0,
        format!(
            "operator-sum {max_os:.3e}, dressed {max_dr:.3e}, draws with chi > eta: {chi_gt_eta}"
        ),
    ))
}

/// Worst-case CPTP metrics over the (ξ, θ, γt²) grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridReport {
    pub points: usize,
    pub min_eigenvalue: f64,
    pub max_tp_residual: f64,
    pub max_completeness: f64,
    pub max_reassembly: f64,
}

pub fn cptp_grid(nxi: usize, ntheta: usize, nt: usize) -> Result<GridReport> {
    let noise = NoiseSpec::from_gamma(1.0)?;
    let mut pts = Vec::new();
    for &xi in &linspace(0.0, 3.0, nxi) {
        for &theta in &linspace(0.0, FRAC_PI_2, ntheta) {
            for &g in &linspace(0.0, 5.0, nt) {
                pts.push((xi, theta, g));
            }
        }
    }
    let rows = pts
        .par_iter()
        .map(|&(xi, theta, g)| {
            let s = Scenario::new(BoostParams::new(xi, theta, 0.0)?, noise);
            let t = s.time_at(g);
            let c = choi_of(format!("xi={xi} theta={theta} gt2={g}"), |m| {
                elementwise_map(m, &s, t)
            })?;
            let rep = verify_cptp(&c, 1e-10);
            let ops = kraus_from_choi(&c, DEFAULT_KRAUS_CUTOFF)?;
            let rebuilt = choi_of("kraus", |m| apply_kraus(&ops, m))?;
            Ok([
                rep.min_eigenvalue,
                rep.tp_residual,
                completeness_residual(&ops),
                channel_distance(&c, &rebuilt)?,
            ])
        })
        .collect::<Result<Vec<[f64; 4]>>>()?;
    Ok(GridReport {
        points: rows.len(),
        min_eigenvalue: rows.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min),
        max_tp_residual: rows.iter().map(|r| r[1]).fold(0.0, f64::max),
        max_completeness: rows.iter().map(|r| r[2]).fold(0.0, f64::max),
        max_reassembly: rows.iter().map(|r| r[3]).fold(0.0, f64::max),
    })
}

fn check_cptp() -> Result<Check> {
    let g = cptp_grid(10, 10, 5)?;
    Ok(Check::new(
        "cptp_grid",
        g.min_eigenvalue >= -1e-10
            && g.max_tp_residual < 1e-12
            && g.max_completeness < 1e-9
            && g.max_reassembly < 1e-9,
        format!(
            "{} points, min Choi eigenvalue {:.3e}, TP residual {:.3e}, Kraus completeness {:.3e}, reassembly {:.3e}",
            g.points, g.min_eigenvalue, g.max_tp_residual, g.max_completeness, g.max_reassembly
        ),
    ))
}

fn check_rest_frame(draws: &[Draw]) -> Result<Check> {
    let mut max_diag: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    for d in draws {
        let s = Scenario::new(BoostParams::at_rest(), *d.scenario.noise());
        let out = evolve_elementwise(&d.rho, &s, d.t)?;
        for i in 0..2 {
            max_diag = max_diag.max((out[(i, i)] - d.rho[(i, i)]).norm());
        }
        if d.rho[(0, 1)].norm() > 1e-3 {
            let ratio = out[(0, 1)] / d.rho[(0, 1)];
            max_ratio = max_ratio.max((ratio - (-d.gamma_t2).exp()).norm());
        }
    }
    Ok(Check::new(
        "rest_frame_reduction",
        max_diag <= 1e-14 && max_ratio <= 1e-12,
        format!("diagonal drift {max_diag:.3e}, off-diagonal ratio error {max_ratio:.3e}"),
    ))
}

fn check_concurrence(nodes: usize) -> Result<Vec<Check>> {
    let q = QuadratureSpec::new(nodes)?;
    let noise = NoiseSpec::from_gamma(1.0)?;
    let rest = Scenario::new(BoostParams::at_rest(), noise);
    let times: Vec<f64> = linspace(0.0, 3.0, 13)
        .iter()
        .map(|&g| rest.time_at(g))
        .collect();
    let series = concurrence_trajectory(&rest, &times, &q)?;
    let rest_err = series
        .values
        .iter()
        .zip(&series.reference_rest)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut out = vec![Check::new(
        "two_qubit_rest_decay",
        rest_err < 1e-8,
        format!("max |C - exp(-4 gamma t^2)| = {rest_err:.3e}"),
    )];

    // Sampled on the boosted axis γ′t² ∈ [0, 3], where the boosted
    // concurrence is non-negligible and the quadrature resolves it.
    let mut excess: f64 = f64::NEG_INFINITY;
    for xi in [3.0, 5.0, 8.0] {
        let s = Scenario::new(BoostParams::new(xi, eta_max(xi).theta_opt, 0.0)?, noise);
        let ts: Vec<f64> = linspace(0.0, 3.0, 13)
            .iter()
            .map(|g| (g / s.gamma_prime()).sqrt())
            .collect();
        let b = concurrence_trajectory(&s, &ts, &q)?;
        let r = concurrence_trajectory(&rest, &ts, &q)?;
        for (x, y) in b.values.iter().zip(&r.values) {
            excess = excess.max(x - y);
        }
    }
    out.push(Check::new(
        "two_qubit_boosted_dominance",
        excess <= 1e-10,
        format!("max (boosted - rest) concurrence = {excess:.3e}"),
    ));
    Ok(out)
}

fn check_montecarlo(cfg: &VerifyConfig) -> Result<Check> {
    let draws = random_draws(cfg.seed.wrapping_add(1), cfg.mc_scenarios);
    let q = QuadratureSpec::new(cfg.nodes)?;
    let mc = McSpec::new(cfg.mc_samples, cfg.seed)?;
    let mut worst: f64 = 0.0;
    for d in &draws {
        let est = average_montecarlo(&d.rho, &d.scenario, d.t, &mc)?;
        let reference = average_quadrature(&d.rho, &d.scenario, d.t, &q)?;
        let dist = frobenius_distance(est.state.matrix(), reference.matrix())?;
        worst = worst.max(dist / est.stderr.max(f64::MIN_POSITIVE));
    }
    Ok(Check::new(
        "montecarlo_consistency",
        worst <= 3.0,
        format!(
            "{} scenarios x {} samples, worst error = {worst:.3} stderr",
            draws.len(),
            cfg.mc_samples
        ),
    ))
}

/// Runs every check in a fixed order.
pub fn run_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let draws = random_draws(cfg.seed, cfg.draws);
    let mut out = check_anchors();
    out.push(
        check_oracle(&draws, cfg.nodes)
            .unwrap_or_else(|e| Check::new("oracle_equivalence", false, format!("error: {e}"))),
    );
    out.push(
        check_decompositions(&draws).unwrap_or_else(|e| {
            Check::new("decomposition_equivalence", false, format!("error: {e}"))
        }),
    );
    out.push(
        check_cptp().unwrap_or_else(|e| Check::new("cptp_grid", false, format!("error: {e}"))),
    );
    out.push(
        check_rest_frame(&draws)
            .unwrap_or_else(|e| Check::new("rest_frame_reduction", false, format!("error: {e}"))),
    );
    match check_concurrence(cfg.nodes) {
        Ok(c) => out.extend(c),
        Err(e) => out.push(Check::new("two_qubit", false, format!("error: {e}"))),
    }
    out.push(
        check_montecarlo(cfg)
            .unwrap_or_else(|e| Check::new("montecarlo_consistency", false, format!("error: {e}"))),
    );
    out
}

pub fn render_log(cfg: &VerifyConfig, checks: &[Check]) -> String {
    let mut s = format!(
        "# seed = {}, draws = {}, nodes = {}, mc_samples = {}\n",
        cfg.seed, cfg.draws, cfg.nodes, cfg.mc_samples
    );
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    s.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    s
}
