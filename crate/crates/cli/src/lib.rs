//! Command-line front end: argument parsing, command dispatch and report
//! formatting. [`run`] returns the report instead of printing it.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use horocomb_core::blockrep::{ModelAction, RepModel};
use horocomb_core::horocomb::{combine_models, make_representation, CombinationSpec, Weights};
use horocomb_core::hypgeo::{classify_isometry, Field, HermitianFormSpace};
use horocomb_core::invariants::{cartan_limit_estimate, model_arg, BSchedule};
use horocomb_core::kernelspace::{hermitian_eigenvalues, orbit_gram, signature_count};
use horocomb_core::su11::{bruhat_factor, phi_to_so12, psi_to_sl2, Bruhat, ExactElement, Su11};
use horocomb_core::verify::{
    group_layer_checks, round_trip_residual, run_suite, Check, GroupLayerConfig, Suite, SuiteConfig,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Environment variable multiplying every tolerance.
pub const TOLERANCE_ENV: &str = "HOROCOMB_TOLERANCE_SCALE";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] horocomb_core::Error),
}

#[derive(Debug, Parser)]
#[command(name = "horocomb", version, about = "Build and verify SU(1,1) kernel models")]
pub struct Cli {
    /// Multiplies every tolerance; overrides the environment variable.
    #[arg(long, global = true)]
    pub tolerance_scale: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type, displacement and Bruhat factorization of an SU(1,1) element.
    Classify(ElementArgs),
    /// Images under the maps to SL2(R) and SO(1,2), with homomorphism checks.
    Maps {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random pairs for the homomorphism residuals.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Model construction and verification.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
    /// Combination of two models with the same exponent.
    Combine {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(long)]
        u: f64,
    },
    /// Cartan arguments along a geometric schedule, with extrapolation.
    CartanLimit {
        #[command(flatten)]
        params: ModelParams,
        #[arg(long, default_value_t = 1.0)]
        b_start: f64,
        #[arg(long, default_value_t = 10.0)]
        b_ratio: f64,
        #[arg(long, default_value_t = 9)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Eigenvalues and signature of an orbit Gram matrix.
    GnsCheck {
        #[command(flatten)]
        params: ModelParams,
        #[arg(long, default_value_t = 8)]
        sample: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// Prints `{t, r, k1}` for the model.
    Build(ModelParams),
    /// Runs verification suites.
    Verify {
        #[command(flatten)]
        params: ModelParams,
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random `(λ, b, d)` triples for the block identities.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ModelParams {
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub r: f64,
}

/// An element given by `α, β` or by its `ξ`-basis entries `a, b, c, d`.
#[derive(Debug, Clone, Args)]
pub struct ElementArgs {
    /// `α` as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "beta")]
    pub alpha: Option<Complex64>,
    /// `β` as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "alpha")]
    pub beta: Option<Complex64>,
    /// `a,b,c,d` for `[[a, ib], [ic, d]]`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "alpha")]
    pub xi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Relations,
    Gram,
    Kernel,
    Limits,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Relations => Suite::Relations,
            SuiteArg::Gram => Suite::Gram,
            SuiteArg::Kernel => Suite::Kernel,
            SuiteArg::Limits => Suite::Limits,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [re, im] = parts.as_slice() else {
        return Err(format!("expected re,im, got {s:?}"));
    };
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok(Complex64::new(p(re)?, p(im)?))
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    /// 0 all checks pass, 1 a check failed, 2 usage or parameter error.
    pub code: i32,
}

impl Outcome {
    fn report(stdout: String, pass: bool) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: if pass { 0 } else { 1 },
        }
    }

    fn usage(msg: String) -> Self {
        Self {
            stdout: String::new(),
            stderr: msg,
            code: 2,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// `env_scale` is the value of [`TOLERANCE_ENV`], if set.
pub fn run<I, T>(args: I, env_scale: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::usage(text)
            } else {
                Outcome::report(text, true)
            };
        }
    };
    match execute(&cli, env_scale) {
        Ok(out) => out,
        Err(e) => Outcome::usage(format!("error: {e}\n")),
    }
}

fn tolerance_scale(cli: &Cli, env_scale: Option<&str>) -> Result<f64, CliError> {
    let scale = match (cli.tolerance_scale, env_scale) {
        (Some(s), _) => s,
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{TOLERANCE_ENV}={v:?} is not a number")))?,
        (None, None) => 1.0,
    };
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CliError::Usage(format!("tolerance scale must be positive, got {scale}")));
    }
    Ok(scale)
}

fn execute(cli: &Cli, env_scale: Option<&str>) -> Result<Outcome, CliError> {
    let scale = tolerance_scale(cli, env_scale)?;
    match &cli.command {
        Command::Classify(e) => classify(e),
        Command::Maps { element, seed, samples } => maps(element, *seed, *samples, scale),
        Command::Model {
            command: ModelCommand::Build(p),
        } => {
            let model = build_model(p)?;
            Ok(Outcome::report(to_json(&ModelJson::of(&model)), true))
        }
        Command::Model {
            command: ModelCommand::Verify {
                params,
                suite,
                seed,
                samples,
            },
        } => verify(params, *suite, *seed, *samples, scale),
        Command::Combine { t, r1, r2, u } => combine(*t, *r1, *r2, *u),
        Command::CartanLimit {
            params,
            b_start,
            b_ratio,
            steps,
            format,
        } => cartan(params, *b_start, *b_ratio, *steps, *format),
        Command::GnsCheck { params, sample, seed } => gns(params, *sample, *seed, scale),
    }
}

fn build_model(p: &ModelParams) -> Result<RepModel, CliError> {
    Ok(make_representation(p.t, p.r)?)
}

fn element(e: &ElementArgs) -> Result<Su11, CliError> {
    match (&e.alpha, &e.beta, &e.xi) {
        (Some(a), Some(b), None) => Ok(Su11::new(*a, *b)?),
        (None, None, Some(x)) => {
            let [a, b, c, d] = x.as_slice() else {
                return Err(CliError::Usage("--xi needs four entries".into()));
            };
            if (a * d + b * c - 1.0).abs() > 1e-12 * (a.abs() + b.abs() + c.abs() + d.abs()).max(1.0) {
                return Err(CliError::Usage(format!("ad + bc = {} must equal 1", a * d + b * c)));
            }
            Ok(Su11::from_xi_entries(*a, *b, *c, *d))
        }
        _ => Err(CliError::Usage("give either --alpha and --beta, or --xi".into())),
    }
}

#[derive(Serialize)]
struct C {
    re: f64,
    im: f64,
}

impl From<Complex64> for C {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct ModelJson {
    t: f64,
    r: f64,
    k1: C,
}

impl ModelJson {
    fn of(m: &RepModel) -> Self {
        Self {
            t: m.t(),
            r: model_arg(m),
            k1: m.k1().into(),
        }
    }
}

#[derive(Serialize)]
struct CheckJson<'a> {
    name: &'a str,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

fn checks_json(checks: &[Check]) -> Vec<CheckJson<'_>> {
    checks
        .iter()
        .map(|c| CheckJson {
            name: &c.name,
            residual: c.residual,
            tolerance: c.tolerance,
            pass: c.pass,
        })
        .collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

#[derive(Serialize)]
#[serde(tag = "form", rename_all = "lowercase")]
enum BruhatJson {
    P { lambda: f64, b: f64 },
    Psp { lambda: f64, b: f64, d: f64 },
}

fn classify(e: &ElementArgs) -> Result<Outcome, CliError> {
    #[derive(Serialize)]
    struct Report {
        alpha: C,
        beta: C,
        kind: String,
        displacement: f64,
        bruhat: BruhatJson,
    }
    let g = element(e)?;
    let line = HermitianFormSpace::standard(Field::Complex, 1);
    let cls = classify_isometry(&g.isometry(&line)?)?;
    let bruhat = match bruhat_factor(&g) {
        Bruhat::P(p) => BruhatJson::P {
            lambda: p.lambda,
            b: p.b,
        },
        Bruhat::Psp { lambda, b, d } => BruhatJson::Psp { lambda, b, d },
    };
    let report = Report {
        alpha: g.alpha().into(),
        beta: g.beta().into(),
        kind: cls.kind.to_string(),
        displacement: cls.displacement,
        bruhat,
    };
    Ok(Outcome::report(to_json(&report), true))
}

fn maps(e: &ElementArgs, seed: u64, samples: usize, scale: f64) -> Result<Outcome, CliError> {
    #[derive(Serialize)]
    struct Report<'a> {
        psi: Vec<Vec<f64>>,
        phi: Vec<Vec<f64>>,
        checks: Vec<CheckJson<'a>>,
    }
    let g = element(e)?;
    let psi = psi_to_sl2(&g);
    let phi = phi_to_so12(&g);
    let checks = group_layer_checks(&GroupLayerConfig {
        seed,
        tolerance_scale: scale,
        pairs: samples,
        ..GroupLayerConfig::default()
    })?;
    let pass = checks.iter().all(|c| c.pass);
    let report = Report {
        psi: (0..2).map(|i| (0..2).map(|j| psi[(i, j)]).collect()).collect(),
        phi: (0..3).map(|i| (0..3).map(|j| phi[(i, j)]).collect()).collect(),
        checks: checks_json(&checks),
    };
    Ok(Outcome::report(to_json(&report), pass))
}

fn verify(p: &ModelParams, suite: SuiteArg, seed: u64, samples: usize, scale: f64) -> Result<Outcome, CliError> {
    #[derive(Serialize)]
    struct Report<'a> {
        t: f64,
        r: f64,
        suite: &'a str,
        seed: u64,
        pass: bool,
        max_residual: f64,
        checks: Vec<CheckJson<'a>>,
    }
    let model = build_model(p)?;
    let cfg = SuiteConfig {
        seed,
        tolerance_scale: scale,
        block_samples: samples,
        ..SuiteConfig::default()
    };
    let checks = run_suite(&model, p.r, suite.into(), &cfg)?;
    let pass = checks.iter().all(|c| c.pass);
    let name = suite.to_possible_value().expect("named variant");
    let report = Report {
        t: p.t,
        r: p.r,
        suite: name.get_name(),
        seed,
        pass,
        max_residual: checks.iter().map(|c| c.residual).fold(0.0, f64::max),
        checks: checks_json(&checks),
    };
    Ok(Outcome::report(to_json(&report), pass))
}

fn combine(t: f64, r1: f64, r2: f64, u: f64) -> Result<Outcome, CliError> {
    #[derive(Serialize)]
    struct Report {
        first: ModelJson,
        second: ModelJson,
        u: f64,
        p: f64,
        q: f64,
        combined: ModelJson,
    }
    let first = build_model(&ModelParams { t, r: r1 })?;
    let second = build_model(&ModelParams { t, r: r2 })?;
    let spec = CombinationSpec::new(first, second, Weights::Interpolate(u))?;
    let (p, q) = spec.resolved_weights()?;
    let combined = combine_models(&spec)?;
    let report = Report {
        first: ModelJson::of(&first),
        second: ModelJson::of(&second),
        u,
        p,
        q,
        combined: ModelJson::of(&combined),
    };
    Ok(Outcome::report(to_json(&report), true))
}

fn cartan(p: &ModelParams, start: f64, ratio: f64, steps: usize, format: Format) -> Result<Outcome, CliError> {
    #[derive(Serialize)]
    struct Row {
        b: f64,
        cart: f64,
        extrapolated: Option<f64>,
    }
    #[derive(Serialize)]
    struct Report {
        expected: f64,
        limit: f64,
        rows: Vec<Row>,
    }
    let model = build_model(p)?;
    let schedule = BSchedule::new(start, ratio, steps)?;
    let est = cartan_limit_estimate(&model, &schedule, None)?;
    let rows: Vec<Row> = est
        .samples
        .iter()
        .map(|s| Row {
            b: s.b,
            cart: s.cart,
            extrapolated: s.extrapolated,
        })
        .collect();
    let out = match format {
        Format::Csv => {
            let mut s = String::from("b,cart,extrapolated\n");
            for r in &rows {
                let ext = r.extrapolated.map(|x| format!("{x:e}")).unwrap_or_default();
                writeln!(s, "{:e},{:e},{ext}", r.b, r.cart).expect("write to string");
            }
            s
        }
        Format::Json => to_json(&Report {
            expected: est.expected,
            limit: est.limit,
            rows,
        }),
    };
    Ok(Outcome::report(out, true))
}

fn gns(p: &ModelParams, sample: usize, seed: u64, scale: f64) -> Result<Outcome, CliError> {
    #[derive(Serialize)]
    struct Sig {
        positive: usize,
        zero: usize,
        negative: usize,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        t: f64,
        r: f64,
        sample: usize,
        seed: u64,
        eigenvalues: Vec<f64>,
        signature: Sig,
        verdict: &'a str,
        checks: Vec<CheckJson<'a>>,
    }
    if sample == 0 {
        return Err(CliError::Usage("--sample must be at least 1".into()));
    }
    let model = build_model(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elems = vec![ExactElement::identity()];
    elems.extend((1..sample).map(|_| ExactElement::random(&mut rng)));
    let gram = orbit_gram(&ModelAction { model }, &elems)?;
    let sig = signature_count(&gram);
    let mut eig = hermitian_eigenvalues(&gram);
    eig.reverse();
    let checks = vec![
        Check::new("gns/one positive eigenvalue", (sig.positive as f64 - 1.0).abs(), 0.0),
        Check::new("gns/round trip", round_trip_residual(&gram), 1e-7 * scale),
    ];
    let pass = checks.iter().all(|c| c.pass);
    let verdict = if sig.positive == 1 {
        "one positive eigenvalue"
    } else {
        "wrong signature"
    };
    let report = Report {
        t: p.t,
        r: p.r,
        sample,
        seed,
        eigenvalues: eig,
        signature: Sig {
            positive: sig.positive,
            zero: sig.zero,
            negative: sig.negative,
        },
        verdict,
        checks: checks_json(&checks),
    };
    Ok(Outcome::report(to_json(&report), pass))
}
