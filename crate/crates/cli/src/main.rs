use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quatek::bounds::{self, BoundParams, PeakIndex, TheoremId};
use quatek::harness::{self, EnsembleConfig, EnsembleKind, SweepTarget};
use quatek::io::{canonical_string, parse_polynomial, polynomial_to_value, to_canonical, zero_set_to_value};
use quatek::mconst::{m_overall, MStrategy};
use quatek::roots::{find_zeros, DEFAULT_TOL};
use quatek::{Error, Quaternion, SparseQPolynomial};

#[derive(Parser)]
#[command(name = "quatek", version, about = "Zero bounds and zero sets of quaternionic polynomials")]
struct Cli {
    /// Seed for sampled constants and ensembles.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Root-finder tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate hypotheses and compute inclusion radii.
    Bounds {
        #[command(flatten)]
        input: Input,
        /// A theorem id or `auto` for every applicable bound.
        #[arg(long, default_value = "auto")]
        theorem: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Compute the zero set.
    Roots {
        #[command(flatten)]
        input: Input,
    },
    /// Compute the gap constants M.
    MConst {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Method::ClosedForm)]
        method: Method,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Check the zeros of one polynomial against a bound.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        theorem: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Generate an ensemble and verify every instance, writing CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Input {
    /// Polynomial document: a path, inline JSON, or `-` for stdin.
    input: String,
}

#[derive(Args)]
struct ParamArgs {
    /// Half-angle between adjacent coefficients (t1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Reference argument (t1); recorded only.
    #[arg(long)]
    beta: Option<f64>,
    /// Cone half-aperture (q2).
    #[arg(long)]
    theta: Option<f64>,
    /// Cone axis as `w,x,y,z` (q2).
    #[arg(long, value_parser = parse_quaternion)]
    b: Option<Quaternion>,
    /// Peak index of the γ-components, or `auto` (t2).
    #[arg(long, default_value = "auto")]
    r: String,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON ensemble config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_degree: Option<u32>,
    #[arg(long)]
    support_size: Option<u32>,
    #[arg(long)]
    max_gap: Option<u32>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    scale: Option<f64>,
    /// Bound to check; defaults to the one the ensemble targets.
    /// `t1-literal` checks the uncorrected t1 radius.
    #[arg(long)]
    theorem: Option<String>,
    /// Write the generated polynomials, one JSON document per line.
    #[arg(long)]
    dump_instances: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    ClosedForm,
    Sampled,
}

fn parse_quaternion(s: &str) -> Result<Quaternion, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; 4] = parts.try_into().map_err(|_| "expected four comma-separated numbers".to_string())?;
    Ok(Quaternion::from(arr))
}

/// Output plus the exit code it warrants.
struct Outcome {
    body: String,
    code: u8,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, code: 0 }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Hypothesis(_) => 1,
        Error::Parse(_) | Error::Config(_) => 2,
        Error::Domain(_) | Error::Numerical(_) => 3,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Hypothesis(_) => "hypothesis",
        Error::Parse(_) => "parse",
        Error::Config(_) => "config",
        Error::Domain(_) => "domain",
        Error::Numerical(_) => "numerical",
    }
}

fn read_input(input: &str) -> Result<SparseQPolynomial, Error> {
    let text = if input == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("cannot read stdin: {e}")))?;
        s
    } else if input.trim_start().starts_with('{') {
        input.to_string()
    } else {
        fs::read_to_string(input).map_err(|e| Error::Parse(format!("cannot read `{input}`: {e}")))?
    };
    parse_polynomial(&text)
}

fn bound_params(args: &ParamArgs) -> Result<BoundParams, Error> {
    Ok(BoundParams {
        alpha: args.alpha,
        beta: args.beta,
        theta: args.theta,
        b: args.b,
        peak: args.r.parse::<PeakIndex>()?,
    })
}

fn run_bounds(input: &Input, theorem: &str, params: &ParamArgs) -> Result<Outcome, Error> {
    let p = read_input(&input.input)?;
    let params = bound_params(params)?;
    if theorem == "auto" {
        return Ok(Outcome::ok(to_canonical(&bounds::auto_select(&p, &params))?));
    }
    let report = bounds::compute(theorem.parse::<TheoremId>()?, &p, &params)?;
    let code = if report.hypothesis.satisfied { 0 } else { 1 };
    Ok(Outcome { body: to_canonical(&report)?, code })
}

fn run_roots(input: &Input, tol: f64) -> Result<Outcome, Error> {
    let p = read_input(&input.input)?;
    let zs = find_zeros(&p, tol)?;
    let code = if zs.is_complete() { 0 } else { 3 };
    Ok(Outcome { body: canonical_string(&zero_set_to_value(&zs)), code })
}

fn run_m_const(input: &Input, method: Method, samples: usize, seed: u64) -> Result<Outcome, Error> {
    let p = read_input(&input.input)?;
    let strategy = match method {
        Method::ClosedForm => MStrategy::ClosedForm,
        Method::Sampled => MStrategy::Sampled { samples, seed },
    };
    Ok(Outcome::ok(to_canonical(&m_overall(&p, strategy)?)?))
}

fn run_verify(input: &Input, theorem: &str, params: &ParamArgs, tol: f64) -> Result<Outcome, Error> {
    let p = read_input(&input.input)?;
    let report = bounds::compute(theorem.parse::<TheoremId>()?, &p, &bound_params(params)?)?;
    let row = harness::verify(&p, &report, tol)?;
    let code = if row.ok { 0 } else { 3 };
    Ok(Outcome { body: to_canonical(&row)?, code })
}

fn sweep_config(args: &SweepArgs, seed: Option<u64>) -> Result<EnsembleConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read `{}`: {e}", path.display())))?;
            EnsembleConfig::from_json(&text)?
        }
        None => {
            let kind = args
                .kind
                .as_deref()
                .ok_or_else(|| Error::Config("sweep needs --kind or --config".into()))?;
            EnsembleConfig::new(EnsembleKind::parse(kind, args.alpha)?, 10, 4, 100, 0)
        }
    };
    if let (Some(kind), Some(_)) = (&args.kind, &args.config) {
        cfg.kind = EnsembleKind::parse(kind, args.alpha)?;
    } else if let (EnsembleKind::MonotoneModulusAngle { alpha }, Some(a)) = (&mut cfg.kind, args.alpha) {
        *alpha = a;
    }
    if let Some(v) = args.max_degree {
        cfg.max_degree = v;
    }
    if let Some(v) = args.support_size {
        cfg.support_size = v;
    }
    if let Some(v) = args.max_gap {
        cfg.max_gap = v;
    }
    if let Some(v) = args.count {
        cfg.count = v;
    }
    if let Some(v) = args.scale {
        cfg.scale = v;
    }
    if let Some(v) = seed {
        cfg.seed = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_sweep(args: &SweepArgs, seed: Option<u64>, tol: f64) -> Result<(Outcome, Value), Error> {
    let cfg = sweep_config(args, seed)?;
    let target = match &args.theorem {
        Some(t) => t.parse::<SweepTarget>()?,
        None => SweepTarget::Bound(cfg.kind.theorem()),
    };
    let instances = harness::generate(&cfg)?;
    if let Some(path) = &args.dump_instances {
        let mut text = String::new();
        for p in &instances {
            text.push_str(&canonical_string(&polynomial_to_value(p)));
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| Error::Config(format!("cannot write `{}`: {e}", path.display())))?;
    }
    let (rows, summary) = harness::sweep_instances(&instances, target, &harness::params_for(cfg.kind), tol);
    let mut csv = Vec::new();
    harness::write_csv(&rows, &mut csv)?;
    let body = String::from_utf8(csv).expect("CSV output is UTF-8");
    let summary = serde_json::to_value(&summary).expect("summary serializes");
    Ok((Outcome::ok(body), json!({ "summary": summary })))
}

fn emit(out: Option<&PathBuf>, body: &str) -> Result<(), Error> {
    let mut text = body.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Error::Config(format!("cannot write `{}`: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Config(format!("cannot write stdout: {e}"))),
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let seed = cli.seed;
    let outcome = match &cli.command {
        Command::Bounds { input, theorem, params } => run_bounds(input, theorem, params)?,
        Command::Roots { input } => run_roots(input, cli.tol)?,
        Command::MConst { input, method, samples } => run_m_const(input, *method, *samples, seed.unwrap_or(0))?,
        Command::Verify { input, theorem, params } => run_verify(input, theorem, params, cli.tol)?,
        Command::Sweep(args) => {
            let (outcome, summary) = run_sweep(args, seed, cli.tol)?;
            eprintln!("{}", canonical_string(&summary));
            outcome
        }
    };
    emit(cli.out.as_ref(), &outcome.body)?;
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", canonical_string(&json!({ "error": { "kind": "usage", "message": first } })));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("{}", canonical_string(&json!({ "error": { "kind": error_kind(&e), "message": message } })));
            ExitCode::from(exit_code(&e))
        }
    }
}
