//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification or I/O failure, 2 usage error.

use std::f64::consts::FRAC_PI_2;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel_analytic::{evolve_elementwise, example_trajectory, NoiseSpec, Scenario};
use crate::channel_oracle::{
    average_montecarlo, average_quadrature, McSpec, QuadratureSpec, DEFAULT_MC_SAMPLES,
    DEFAULT_NODES, DEFAULT_SEED,
};
use crate::entangle::concurrence_trajectory;
use crate::error::Error;
use crate::relkin::{eta_max, eta_profile, BoostParams};
use crate::spinalg::DensityMatrix;
use crate::table::{write_table, Format, Table, Value};
use crate::verify::{render_log, run_suite, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "relspin",
    version,
    about = "Decoherence of a boosted spin-1/2 in Gaussian magnetic noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Modulation factor eta on a (xi, theta) grid.
    #[command(args_override_self = true)]
    ScanEta(ScanEtaArgs),
    /// Maximum modulation factor, optimal angle and chi at the optimum versus xi.
    #[command(args_override_self = true)]
    EtaMax(EtaMaxArgs),
    /// Off-diagonal element of |+><+| versus gamma t^2, boosted and at rest.
    #[command(args_override_self = true)]
    Offdiag(TrajectoryArgs),
    /// Single-qubit trajectory with analytic and oracle columns.
    #[command(args_override_self = true)]
    Evolve(EvolveArgs),
    /// Two-qubit concurrence series with rest and boosted reference curves.
    #[command(args_override_self = true)]
    Concurrence(TrajectoryArgs),
    /// Run the self-check suite; exits 0 iff every check passes.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// `key = value` file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args, Debug)]
struct NoiseArgs {
    /// Dephasing rate gamma = 2 vartheta^2 mu^2 (default 1).
    #[arg(long)]
    gamma: Option<f64>,
    /// Magnetic moment.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Field standard deviation; alternative to --gamma.
    #[arg(long)]
    vartheta: Option<f64>,
}

#[derive(Args, Debug)]
struct BoostArgs {
    /// Rapidity.
    #[arg(long, default_value_t = 2.5)]
    xi: f64,
    /// Polar angle of the velocity in radians (default: the eta-maximising angle).
    #[arg(long)]
    theta: Option<f64>,
    /// Azimuth of the velocity in radians.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Upper end of the gamma t^2 axis.
    #[arg(long = "gamma-t2-max", default_value_t = 4.0)]
    gamma_t2_max: f64,
    /// Number of time points, endpoints included.
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Args, Debug)]
struct ScanEtaArgs {
    #[arg(long = "xi-max", default_value_t = 3.0)]
    xi_max: f64,
    #[arg(long = "xi-steps", default_value_t = 60)]
    xi_steps: usize,
    /// Points on theta in [0, pi/2].
    #[arg(long = "theta-steps", default_value_t = 90)]
    theta_steps: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct EtaMaxArgs {
    #[arg(long = "xi-max", default_value_t = 20.0)]
    xi_max: f64,
    #[arg(long = "xi-steps", default_value_t = 41)]
    xi_steps: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    #[command(flatten)]
    boost: BoostArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Gauss-Hermite nodes (concurrence only).
    #[arg(long, default_value_t = DEFAULT_NODES)]
    nodes: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleArg {
    Quadrature,
    Montecarlo,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[command(flatten)]
    boost: BoostArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Initial Bloch vector "x,y,z" with |r| <= 1.
    #[arg(long, default_value = "1,0,0", allow_hyphen_values = true)]
    bloch: String,
    #[arg(long, value_enum, default_value_t = OracleArg::Quadrature)]
    oracle: OracleArg,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    nodes: usize,
    #[arg(long = "mc-samples", default_value_t = DEFAULT_MC_SAMPLES)]
    mc_samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random draws for the equivalence checks.
    #[arg(long, default_value_t = 100)]
    draws: usize,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    nodes: usize,
    #[arg(long = "mc-samples", default_value_t = 100_000)]
    mc_samples: usize,
    /// Log file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Outcome of a failed run.
enum Failure {
    Usage(String),
    Runtime(String),
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(flag: &str, e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("invalid value for --{flag}: {e}"))
}

fn runtime(e: Error) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Parses `key = value` lines (`#` starts a comment) into flag tokens.
fn config_tokens(path: &Path) -> Outcome<Vec<OsString>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Failure::Usage(format!(
                "{}:{}: expected 'key = value'",
                path.display(),
                no + 1
            ))
        })?;
        let k = k.trim();
        if k == "config" || k.is_empty() || k.starts_with('-') {
            return Err(Failure::Usage(format!(
                "{}:{}: invalid key '{k}'",
                path.display(),
                no + 1
            )));
        }
        out.push(format!("--{k}").into());
        out.push(v.trim().into());
    }
    Ok(out)
}

/// Inserts config-file tokens right after the subcommand so that explicit
/// flags, which come later, override them.
fn expand_config(argv: Vec<OsString>) -> Outcome<Vec<OsString>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = argv.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let Some(sub) = argv
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 1)
    else {
        return Ok(argv);
    };
    let extra = config_tokens(&path)?;
    let mut out = argv[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[sub + 1..]);
    Ok(out)
}

fn noise_of(n: &NoiseArgs) -> Outcome<NoiseSpec> {
    match (n.gamma, n.vartheta) {
        (Some(_), Some(_)) => Err(Failure::Usage(
            "--gamma and --vartheta are mutually exclusive".into(),
        )),
        (_, Some(v)) => NoiseSpec::new(n.mu, v).map_err(|e| usage("vartheta", e)),
        (g, None) => {
            let g = g.unwrap_or(1.0);
            if !(g.is_finite() && g > 0.0) {
                return Err(usage("gamma", format!("must be finite and > 0, got {g}")));
            }
            if !(n.mu.is_finite() && n.mu > 0.0) {
                return Err(usage("mu", format!("must be finite and > 0, got {}", n.mu)));
            }
            if n.mu == 1.0 {
                NoiseSpec::from_gamma(g).map_err(|e| usage("gamma", e))
            } else {
                NoiseSpec::new(n.mu, (0.5 * g).sqrt() / n.mu).map_err(|e| usage("gamma", e))
            }
        }
    }
}

fn boost_of(b: &BoostArgs) -> Outcome<BoostParams> {
    if !(b.xi.is_finite() && b.xi >= 0.0) {
        return Err(usage(
            "xi",
            format!("must be finite and >= 0, got {}", b.xi),
        ));
    }
    let theta = b.theta.unwrap_or_else(|| eta_max(b.xi).theta_opt);
    BoostParams::new(b.xi, theta, b.phi).map_err(|e| {
        let flag = if b.theta.is_some() && !(0.0..=std::f64::consts::PI).contains(&theta) {
            "theta"
        } else {
            "phi"
        };
        usage(flag, e)
    })
}

fn grid_of(g: &GridArgs) -> Outcome<Vec<f64>> {
    if !(g.gamma_t2_max.is_finite() && g.gamma_t2_max >= 0.0) {
        return Err(usage(
            "gamma-t2-max",
            format!("must be finite and >= 0, got {}", g.gamma_t2_max),
        ));
    }
    if g.points < 2 {
        return Err(usage("points", "need at least 2"));
    }
    Ok(linspace(0.0, g.gamma_t2_max, g.points))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

fn emit(table: &Table, out: &OutputArgs) -> Outcome<()> {
    write_table(table, out.output.as_deref(), out.format.into()).map_err(runtime)
}

fn push(t: &mut Table, row: Vec<Value>) {
    t.push(row).expect("row width matches header");
}

fn scan_eta(a: &ScanEtaArgs) -> Outcome<()> {
    if !(a.xi_max.is_finite() && a.xi_max >= 0.0) {
        return Err(usage(
            "xi-max",
            format!("must be finite and >= 0, got {}", a.xi_max),
        ));
    }
    if a.xi_steps == 0 {
        return Err(usage("xi-steps", "must be >= 1"));
    }
    if a.theta_steps == 0 {
        return Err(usage("theta-steps", "must be >= 1"));
    }
    let mut t = Table::new(["xi", "theta", "eta"]);
    for &xi in &linspace(0.0, a.xi_max, a.xi_steps) {
        for &theta in &linspace(0.0, FRAC_PI_2, a.theta_steps) {
            push(
                &mut t,
                vec![xi.into(), theta.into(), eta_profile(xi, theta).into()],
            );
        }
    }
    emit(&t, &a.out)
}

fn eta_max_cmd(a: &EtaMaxArgs) -> Outcome<()> {
    if !(a.xi_max.is_finite() && a.xi_max >= 0.0) {
        return Err(usage(
            "xi-max",
            format!("must be finite and >= 0, got {}", a.xi_max),
        ));
    }
    if a.xi_steps == 0 {
        return Err(usage("xi-steps", "must be >= 1"));
    }
    let mut t = Table::new(["xi", "eta_max", "theta_opt", "chi_m"]);
    for &xi in &linspace(0.0, a.xi_max, a.xi_steps) {
        let m = eta_max(xi);
        push(
            &mut t,
            vec![
                xi.into(),
                m.eta_max.into(),
                m.theta_opt.into(),
                m.chi_at_opt.into(),
            ],
        );
    }
    emit(&t, &a.out)
}

fn offdiag(a: &TrajectoryArgs) -> Outcome<()> {
    let boost = boost_of(&a.boost)?;
    if boost.phi() != 0.0 {
        return Err(usage("phi", "offdiag needs phi = 0"));
    }
    let noise = noise_of(&a.noise)?;
    let grid = grid_of(&a.grid)?;
    let s = Scenario::new(boost, noise);
    let rest = Scenario::new(BoostParams::at_rest(), noise);
    let mut t = Table::new(["gamma_t2", "rho_ud", "rho_ud_rest", "rho_uu"]);
    for &g in &grid {
        let b = example_trajectory(&s, s.time_at(g)).map_err(runtime)?;
        let r = example_trajectory(&rest, rest.time_at(g)).map_err(runtime)?;
        push(
            &mut t,
            vec![
                g.into(),
                b.rho_ud.re.into(),
                r.rho_ud.re.into(),
                b.rho_uu.into(),
            ],
        );
    }
    emit(&t, &a.out)
}

fn parse_bloch(s: &str) -> Outcome<DensityMatrix> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| usage("bloch", e))?;
    let r: [f64; 3] = parts
        .try_into()
        .map_err(|_| usage("bloch", "expected three comma-separated numbers"))?;
    DensityMatrix::from_bloch(&r).map_err(|e| usage("bloch", e))
}

fn evolve(a: &EvolveArgs) -> Outcome<()> {
    let rho = parse_bloch(&a.bloch)?;
    let s = Scenario::new(boost_of(&a.boost)?, noise_of(&a.noise)?);
    let grid = grid_of(&a.grid)?;
    let q = QuadratureSpec::new(a.nodes).map_err(|e| usage("nodes", e))?;
    let mc = McSpec::new(a.mc_samples, a.seed).map_err(|e| usage("mc-samples", e))?;

    let mut t = Table::new([
        "gamma_t2",
        "rho_uu_analytic",
        "rho_uu_oracle",
        "re_rho_ud_analytic",
        "re_rho_ud_oracle",
        "im_rho_ud_analytic",
        "im_rho_ud_oracle",
    ]);
    if let OracleArg::Montecarlo = a.oracle {
        t.comment(format!("seed = {}, mc_samples = {}", a.seed, a.mc_samples));
    }
    let mut max_diff = [0.0f64; 3];
    for &g in &grid {
        let time = s.time_at(g);
        let exact = evolve_elementwise(&rho, &s, time).map_err(runtime)?;
        let oracle = match a.oracle {
            OracleArg::Quadrature => average_quadrature(&rho, &s, time, &q),
            OracleArg::Montecarlo => average_montecarlo(&rho, &s, time, &mc).map(|e| e.state),
        }
        .map_err(runtime)?;
        let pairs = [
            (exact[(0, 0)].re, oracle[(0, 0)].re),
            (exact[(0, 1)].re, oracle[(0, 1)].re),
            (exact[(0, 1)].im, oracle[(0, 1)].im),
        ];
        let mut row = vec![Value::Num(g)];
        for (k, (x, y)) in pairs.into_iter().enumerate() {
            max_diff[k] = max_diff[k].max((x - y).abs());
            row.push(x.into());
            row.push(y.into());
        }
        push(&mut t, row);
    }
    let mut summary = vec![Value::from("max_abs_diff")];
    for d in max_diff {
        summary.push(d.into());
        summary.push(d.into());
    }
    push(&mut t, summary);
    emit(&t, &a.out)
}

fn concurrence_cmd(a: &TrajectoryArgs) -> Outcome<()> {
    let s = Scenario::new(boost_of(&a.boost)?, noise_of(&a.noise)?);
    let grid = grid_of(&a.grid)?;
    let q = QuadratureSpec::new(a.nodes).map_err(|e| usage("nodes", e))?;
    let times: Vec<f64> = grid.iter().map(|&g| s.time_at(g)).collect();
    let series = concurrence_trajectory(&s, &times, &q).map_err(runtime)?;
    let mut t = Table::new([
        "gamma_t2",
        "concurrence",
        "reference_rest",
        "reference_boosted",
    ]);
    for (k, &g) in grid.iter().enumerate() {
        push(
            &mut t,
            vec![
                g.into(),
                series.values[k].into(),
                series.reference_rest[k].into(),
                series.reference_boosted[k].into(),
            ],
        );
    }
    emit(&t, &a.out)
}

fn verify_cmd(a: &VerifyArgs) -> Outcome<bool> {
    if a.draws == 0 {
        return Err(usage("draws", "must be >= 1"));
    }
    QuadratureSpec::new(a.nodes).map_err(|e| usage("nodes", e))?;
    if a.mc_samples < 2 {
        return Err(usage("mc-samples", "need at least 2"));
    }
    let cfg = VerifyConfig {
        seed: a.seed,
        draws: a.draws,
        nodes: a.nodes,
        mc_samples: a.mc_samples,
        ..VerifyConfig::default()
    };
    let checks = run_suite(&cfg);
    let log = render_log(&cfg, &checks);
    match &a.output {
        Some(p) => std::fs::write(p, &log).map_err(|source| {
            runtime(Error::Io {
                path: p.clone(),
                source,
            })
        })?,
        None => print!("{log}"),
    }
    Ok(checks.iter().all(|c| c.passed))
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let outcome = expand_config(argv).and_then(|argv| {
        let cli = Cli::try_parse_from(argv).map_err(|e| {
            if e.use_stderr() {
                Failure::Usage(e.render().to_string())
            } else {
                // --help / --version
                print!("{}", e.render());
                Failure::Usage(String::new())
            }
        });
        let cli = match cli {
            Ok(c) => c,
            Err(Failure::Usage(m)) if m.is_empty() => return Ok(true),
            Err(f) => return Err(f),
        };
        match &cli.command {
            Command::ScanEta(a) => scan_eta(a).map(|_| true),
            Command::EtaMax(a) => eta_max_cmd(a).map(|_| true),
            Command::Offdiag(a) => offdiag(a).map(|_| true),
            Command::Evolve(a) => evolve(a).map(|_| true),
            Command::Concurrence(a) => concurrence_cmd(a).map(|_| true),
            Command::Verify(a) => verify_cmd(a),
        }
    });
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(Failure::Usage(m)) => {
            eprintln!("{}", m.trim_end());
            EXIT_USAGE
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            EXIT_FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_tokens_are_inserted_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "# comment\nxi = 1.5\n\npoints=3 # trailing\n").unwrap();
        let argv: Vec<OsString> = [
            "relspin",
            "offdiag",
            "--config",
            p.to_str().unwrap(),
            "--xi",
            "2",
        ]
        .iter()
        .map(OsString::from)
        .collect();
        let out = expand_config(argv).ok().unwrap();
        let s: Vec<String> = out
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            &s[..6],
            ["relspin", "offdiag", "--xi", "1.5", "--points", "3"]
        );
        let cli = Cli::try_parse_from(out).unwrap();
        match cli.command {
            Command::Offdiag(a) => {
                assert_eq!(a.boost.xi, 2.0);
                assert_eq!(a.grid.points, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_config_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.conf");
        std::fs::write(&p, "xi 1.5\n").unwrap();
        let code = run(["relspin", "offdiag", "--config", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_USAGE);
        std::fs::write(&p, "bogus = 1\n").unwrap();
        assert_eq!(
            run(["relspin", "offdiag", "--config", p.to_str().unwrap()]),
            EXIT_USAGE
        );
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["relspin"]), EXIT_USAGE);
        assert_eq!(run(["relspin", "offdiag", "--nope"]), EXIT_USAGE);
        assert_eq!(run(["relspin", "offdiag", "--theta", "4"]), EXIT_USAGE);
        assert_eq!(run(["relspin", "offdiag", "--xi", "-1"]), EXIT_USAGE);
        assert_eq!(
            run(["relspin", "offdiag", "--gamma", "1", "--vartheta", "1"]),
            EXIT_USAGE
        );
        assert_eq!(run(["relspin", "evolve", "--bloch", "2,0,0"]), EXIT_USAGE);
    }

    #[test]
    fn noise_defaults() {
        let n = noise_of(&NoiseArgs {
            gamma: None,
            mu: 1.0,
            vartheta: None,
        })
        .ok()
        .unwrap();
        assert_eq!(n.gamma(), 1.0);
        let n = noise_of(&NoiseArgs {
            gamma: Some(2.0),
            mu: 2.0,
            vartheta: None,
        })
        .ok()
        .unwrap();
        assert!((n.gamma() - 2.0).abs() < 1e-15);
    }
}
