//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relspin::channel_analytic::{
    dressed_apply, evolve_elementwise, example_trajectory, operator_sum_apply, NoiseSpec, Scenario,
};
use relspin::channel_oracle::{average_montecarlo, average_quadrature, McSpec, QuadratureSpec};
use relspin::entangle::concurrence_trajectory;
use relspin::relkin::{effective_field, eta_max, BoostParams};
use relspin::spinalg::{frobenius_distance, DensityMatrix};
use relspin::verify::{cptp_grid, random_draws, Draw};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn draws() -> Vec<Draw> {
    random_draws(42, 100)
}

fn c1_kappa() -> Outcome {
    let theta = eta_max(2.5).theta_opt;
    let f = effective_field(&BoostParams::new(2.5, theta, 0.0).map_err(e)?);
    let k2 = f.kappa * f.kappa;
    Ok((
        (k2 - 6.13229).abs() <= 5e-5,
        format!("kappa^2 = {k2:.7} (target 6.13229 +- 5e-5)"),
    ))
}

fn c2_saturation() -> Outcome {
    let m = eta_max(2.5);
    let noise = NoiseSpec::from_gamma(1.0).map_err(e)?;
    let boosted = Scenario::new(BoostParams::new(2.5, m.theta_opt, 0.0).map_err(e)?, noise);
    let rest = Scenario::new(BoostParams::at_rest(), noise);
    let late = example_trajectory(&boosted, boosted.time_at(50.0))
        .map_err(e)?
        .rho_ud
        .re;
    let b4 = example_trajectory(&boosted, boosted.time_at(4.0))
        .map_err(e)?
        .rho_ud
        .re;
    let r4 = example_trajectory(&rest, rest.time_at(4.0))
        .map_err(e)?
        .rho_ud
        .re;
    let ok = (m.eta_max - 0.51780).abs() <= 2e-4
        && (late - 0.2589).abs() <= 2e-4
        && (r4 - 0.009158).abs() <= 1e-6
        && (b4 - 0.2589).abs() <= 5e-4;
    Ok((
        ok,
        format!(
            "eta_max(2.5) = {:.6}, saturation = {late:.6}, at gamma t^2 = 4: rest {r4:.7}, xi=2.5 {b4:.6}",
            m.eta_max
        ),
    ))
}

fn c3_limit() -> Outcome {
    let v: Vec<f64> = (0..=40).map(|k| eta_max(0.5 * k as f64).eta_max).collect();
    let inc = v.windows(2).all(|w| w[1] > w[0]);
    let last = v[40];
    Ok((
        inc && last > 0.999,
        format!("strictly increasing = {inc}, eta_max(20) = {last:.10}"),
    ))
}

fn c4_oracle() -> Outcome {
    let q = QuadratureSpec::new(201).map_err(e)?;
    let q2 = QuadratureSpec::new(402).map_err(e)?;
    let (mut err, mut dbl) = (0.0f64, 0.0f64);
    for d in draws() {
        let a = evolve_elementwise(&d.rho, &d.scenario, d.t).map_err(e)?;
        let b = average_quadrature(&d.rho, &d.scenario, d.t, &q).map_err(e)?;
        let c = average_quadrature(&d.rho, &d.scenario, d.t, &q2).map_err(e)?;
        err = err.max(frobenius_distance(a.matrix(), b.matrix()).map_err(e)?);
        dbl = dbl.max(frobenius_distance(b.matrix(), c.matrix()).map_err(e)?);
    }
    Ok((
        err < 1e-8 && dbl < 1e-10,
        format!(
            "max analytic vs 201-node = {err:.3e} (< 1e-8), node doubling = {dbl:.3e} (< 1e-10)"
        ),
    ))
}

fn c5_decompositions() -> Outcome {
    let (mut os, mut dr) = (0.0f64, 0.0f64);
    let mut chi_gt_eta = 0;
    for d in draws() {
        let a = evolve_elementwise(&d.rho, &d.scenario, d.t).map_err(e)?;
        let b = operator_sum_apply(&d.rho, &d.scenario, d.t).map_err(e)?;
        let c = dressed_apply(&d.rho, &d.scenario, d.t).map_err(e)?;
        os = os.max(frobenius_distance(a.matrix(), b.matrix()).map_err(e)?);
        dr = dr.max(frobenius_distance(a.matrix(), c.matrix()).map_err(e)?);
        let f = d.scenario.field();
        chi_gt_eta += usize::from(f.chi > f.eta);
    }
    Ok((
        os < 1e-10 && dr < 1e-10 && chi_gt_eta > 0,
        format!("operator-sum {os:.3e}, dressed {dr:.3e} (< 1e-10); {chi_gt_eta}/100 draws have chi > eta"),
    ))
}

fn c6_cptp() -> Outcome {
    let g = cptp_grid(10, 10, 5).map_err(e)?;
    Ok((
        g.points == 500
            && g.min_eigenvalue >= -1e-10
            && g.max_tp_residual < 1e-12
            && g.max_completeness < 1e-9
            && g.max_reassembly < 1e-9,
        format!(
            "{} points: min eig {:.3e}, TP {:.3e}, completeness {:.3e}, reassembly {:.3e}",
            g.points, g.min_eigenvalue, g.max_tp_residual, g.max_completeness, g.max_reassembly
        ),
    ))
}

fn c7_rest() -> Outcome {
    let q = QuadratureSpec::default();
    let (mut diag, mut ratio) = (0.0f64, 0.0f64);
    for d in draws() {
        let s = Scenario::new(BoostParams::at_rest(), *d.scenario.noise());
        let expected = (-s.noise().gamma() * d.t * d.t).exp();
        let a = evolve_elementwise(&d.rho, &s, d.t).map_err(e)?;
        let b = average_quadrature(&d.rho, &s, d.t, &q).map_err(e)?;
        for out in [a, b] {
            for i in 0..2 {
                diag = diag.max((out[(i, i)] - d.rho[(i, i)]).norm());
            }
            if d.rho[(0, 1)].norm() > 1e-3 {
                ratio = ratio.max((out[(0, 1)] / d.rho[(0, 1)] - expected).norm());
            }
        }
    }
    Ok((
        diag <= 1e-14 && ratio <= 1e-12,
        format!("analytic + quadrature: diagonal drift {diag:.3e} (<= 1e-14), ratio error {ratio:.3e} (<= 1e-12)"),
    ))
}

fn rest_times(rest: &Scenario, n: usize, max: f64) -> Vec<f64> {
    (0..n)
        .map(|k| rest.time_at(max * k as f64 / (n - 1) as f64))
        .collect()
}

fn c8_two_qubit_rest() -> Outcome {
    let noise = NoiseSpec::from_gamma(1.0).map_err(e)?;
    let rest = Scenario::new(BoostParams::at_rest(), noise);
    let s = concurrence_trajectory(
        &rest,
        &rest_times(&rest, 31, 3.0),
        &QuadratureSpec::default(),
    )
    .map_err(e)?;
    let err = s
        .values
        .iter()
        .zip(&s.reference_rest)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((
        err < 1e-8,
        format!("max |C - exp(-4 gamma t^2)| over gamma t^2 in [0,3] = {err:.3e}"),
    ))
}

/// Relative deviation from exp(−4γ′t²) at γ′t² = 1.
fn boosted_deviation(xi: f64, phi: f64, noise: NoiseSpec) -> Result<f64, String> {
    let s = Scenario::new(
        BoostParams::new(xi, eta_max(xi).theta_opt, phi).map_err(e)?,
        noise,
    );
    let t = (1.0 / s.gamma_prime()).sqrt();
    let c = concurrence_trajectory(&s, &[t], &QuadratureSpec::default()).map_err(e)?;
    let r = c.reference_boosted[0];
    Ok((c.values[0] - r).abs() / r)
}

// With the velocity in the x-z plane (φ = 0) the single-spin unitary is
// complex symmetric, so U⊗U acts on |Φ+⟩ as U²⊗I and the concurrence equals
// exp(−4γ′t²) exactly for every ξ and θ. The computed deviations are then
// square-root-amplified rounding (~1e-7 relative), so "decreasing" is checked
// non-strictly up to this floor and every deviation must lie below it.
const DEVIATION_FLOOR: f64 = 1e-6;

fn c9_two_qubit_boosted() -> Outcome {
    let noise = NoiseSpec::from_gamma(1.0).map_err(e)?;
    let xis = [3.0, 5.0, 8.0];
    let dev: Vec<f64> = xis
        .iter()
        .map(|&x| boosted_deviation(x, 0.0, noise))
        .collect::<Result<_, _>>()?;
    let monotone = dev.windows(2).all(|w| w[1] <= w[0] + DEVIATION_FLOOR)
        && dev.iter().all(|&d| d <= DEVIATION_FLOOR);
    let off_plane: Vec<f64> = xis
        .iter()
        .map(|&x| boosted_deviation(x, FRAC_PI_2, noise))
        .collect::<Result<_, _>>()?;

    // Times are sampled on the boosted axis γ′t² ∈ [0, 3]: beyond it the
    // boosted concurrence is below e^-12, and at ξ = 8 the rest-frame
    // window γt² ≤ 3 would reach γ′t² ≈ 4500, far past what a 201-node
    // rule resolves.
    let rest = Scenario::new(BoostParams::at_rest(), noise);
    let q = QuadratureSpec::default();
    let mut excess = f64::NEG_INFINITY;
    for &xi in &xis {
        let s = Scenario::new(
            BoostParams::new(xi, eta_max(xi).theta_opt, 0.0).map_err(e)?,
            noise,
        );
        let times: Vec<f64> = (0..31)
            .map(|k| (0.1 * k as f64 / s.gamma_prime()).sqrt())
            .collect();
        let b = concurrence_trajectory(&s, &times, &q).map_err(e)?;
        let r = concurrence_trajectory(&rest, &times, &q).map_err(e)?;
        for (x, y) in b.values.iter().zip(&r.values) {
            excess = excess.max(x - y);
        }
    }
    Ok((
        monotone && excess <= 1e-10,
        format!(
            "rel. deviation at xi=3,5,8 (phi=0): {:.2e}, {:.2e}, {:.2e}; (phi=pi/2, informational): {:.2e}, {:.2e}, {:.2e}; max boosted - rest = {excess:.2e}",
            dev[0], dev[1], dev[2], off_plane[0], off_plane[1], off_plane[2]
        ),
    ))
}

fn mc_scenarios() -> Result<Vec<(DensityMatrix, Scenario, f64)>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..20)
        .map(|_| {
            let r: [f64; 3] = [
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
            ];
            let rho = DensityMatrix::from_bloch(&r).map_err(e)?;
            let b = BoostParams::new(
                rng.gen_range(0.0..3.0),
                rng.gen_range(0.0..PI),
                rng.gen_range(0.0..TAU),
            )
            .map_err(e)?;
            let s = Scenario::new(
                b,
                NoiseSpec::from_gamma(rng.gen_range(0.5..2.0)).map_err(e)?,
            );
            let t = s.time_at(rng.gen_range(0.0..5.0));
            Ok((rho, s, t))
        })
        .collect()
}

fn c10_montecarlo() -> Outcome {
    let q = QuadratureSpec::default();
    let mc = McSpec::new(1_000_000, 42).map_err(e)?;
    let mut worst = 0.0f64;
    let mut identical = true;
    for (k, (rho, s, t)) in mc_scenarios()?.into_iter().enumerate() {
        let est = average_montecarlo(&rho, &s, t, &mc).map_err(e)?;
        let reference = average_quadrature(&rho, &s, t, &q).map_err(e)?;
        let d = frobenius_distance(est.state.matrix(), reference.matrix()).map_err(e)?;
        worst = worst.max(d / est.stderr);
        if k < 3 {
            let again = average_montecarlo(&rho, &s, t, &mc).map_err(e)?;
            let bits = |m: &DensityMatrix| -> Vec<u64> {
                m.matrix()
                    .entries()
                    .iter()
                    .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
                    .collect()
            };
            identical &= bits(&est.state) == bits(&again.state)
                && est.stderr.to_bits() == again.stderr.to_bits();
        }
    }
    Ok((
        worst <= 3.0 && identical,
        format!("20 scenarios x 1e6 samples: worst |MC - quadrature| = {worst:.3} stderr (<= 3); reruns bit-identical = {identical}"),
    ))
}

fn run_bin(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_relspin"))
        .args(args)
        .output()
        .map_err(e)?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn c11_cli_determinism() -> Outcome {
    let (c1, v1) = run_bin(&["verify", "--seed", "42"])?;
    let (c2, v2) = run_bin(&["verify", "--seed", "42"])?;
    let (_, o1) = run_bin(&["offdiag", "--xi", "2.5", "--gamma-t2-max", "4"])?;
    let (_, o2) = run_bin(&["offdiag", "--xi", "2.5", "--gamma-t2-max", "4"])?;
    let scan = [
        "scan-eta",
        "--xi-max",
        "3",
        "--xi-steps",
        "60",
        "--theta-steps",
        "90",
    ];
    let (_, s1) = run_bin(&scan)?;
    let (_, s2) = run_bin(&scan)?;
    let ok =
        c1 == 0 && c2 == 0 && v1 == v2 && o1 == o2 && s1 == s2 && !o1.is_empty() && !s1.is_empty();
    Ok((
        ok,
        format!(
            "verify exit codes {c1}/{c2}, logs identical = {}, offdiag identical = {}, scan-eta identical = {}",
            v1 == v2,
            o1 == o2,
            s1 == s2
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("rapidity / kappa anchor", c1_kappa),
        ("saturation anchor", c2_saturation),
        ("eta_max limit", c3_limit),
        ("oracle equivalence", c4_oracle),
        ("decomposition equivalence", c5_decompositions),
        ("CPTP grid", c6_cptp),
        ("rest-frame reduction", c7_rest),
        ("two-qubit rest decay", c8_two_qubit_rest),
        ("two-qubit boosted asymptotics", c9_two_qubit_boosted),
        ("Monte Carlo consistency", c10_montecarlo),
        ("CLI determinism", c11_cli_determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (ok, detail) = f().unwrap_or_else(|err| (false, format!("error: {err}")));
        failed += usize::from(!ok);
        println!(
            "{} [{:2}] {name}: {detail} ({:.2}s)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            t0.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
