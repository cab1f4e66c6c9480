use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nctriple::cli::{
    exit_code, init_threads, render, run_all, suite_algebra, suite_cocycle, suite_commutator,
    suite_dimension, suite_trace, SuiteReport,
};
use nctriple::config::{parse_format, parse_method, ScenarioConfig};
use nctriple::error::{Error, Result};

#[derive(Parser)]
#[command(
    name = "nctriple",
    about = "Numerical checks for modular twisted crossed-product spectral triples",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonOpts {
    /// Scenario file with key=value lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Seed for randomized probes and perturbations.
    #[arg(long)]
    seed: Option<u64>,
    /// Model: affine, zr, dilation:N or untwisted.
    #[arg(long)]
    example: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// Trace exponents, comma separated.
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    /// Modular powers, comma separated.
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<f64>>,
    /// Group grid as lo:hi:count.
    #[arg(long)]
    grid: Option<String>,
    /// Trace evaluation: closed, quadrature or both.
    #[arg(long)]
    method: Option<String>,
    /// Perturbation size for the cocycle rejection check.
    #[arg(long)]
    perturb: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cocycle law residuals, coboundary round trip, perturbation rejection.
    CocycleCheck(CommonOpts),
    /// *-algebra law suite on the sampled convolution algebra.
    AlgebraTest(CommonOpts),
    /// Twisted commutator identities, norms and Hermiticity checks.
    Commutator(CommonOpts),
    /// Trace values: closed form, quadrature or series per model.
    Trace(CommonOpts),
    /// Spectral dimension estimates from the trace pole.
    Dimension(CommonOpts),
    /// Every suite over the standard model set.
    All(CommonOpts),
}

fn resolve(opts: &CommonOpts) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    if let Some(v) = &opts.format {
        cfg.format = parse_format(v)?;
    }
    if let Some(v) = opts.seed {
        cfg.seed = v;
    }
    if let Some(v) = &opts.example {
        cfg.example = v.clone();
    }
    if let Some(v) = opts.eta {
        cfg.eta = v;
    }
    if let Some(v) = opts.omega {
        if v == 0.0 {
            return Err(Error::Config("omega must be nonzero".into()));
        }
        cfg.omega = v;
    }
    if let Some(v) = &opts.s {
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("s list must be finite and nonempty".into()));
        }
        cfg.s_list = v.clone();
    }
    if let Some(v) = &opts.c {
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("c list must be finite and nonempty".into()));
        }
        cfg.c_list = v.clone();
    }
    if let Some(v) = &opts.grid {
        cfg.group = ScenarioConfig::parse_grid_spec(v)?;
    }
    if let Some(v) = &opts.method {
        cfg.method = parse_method(v)?;
    }
    if let Some(v) = opts.perturb {
        cfg.perturb = v;
    }
    Ok(cfg)
}

fn run(cmd: &Cmd) -> Result<(String, i32)> {
    let (opts, reports): (&CommonOpts, Vec<SuiteReport>) = match cmd {
        Cmd::CocycleCheck(o) => (o, vec![suite_cocycle(&resolve(o)?)?]),
        Cmd::AlgebraTest(o) => (o, vec![suite_algebra(&resolve(o)?)?]),
        Cmd::Commutator(o) => (o, vec![suite_commutator(&resolve(o)?)?]),
        Cmd::Trace(o) => (o, vec![suite_trace(&resolve(o)?)?]),
        Cmd::Dimension(o) => (o, vec![suite_dimension(&resolve(o)?)?]),
        Cmd::All(o) => (o, run_all(&resolve(o)?)?),
    };
    let cfg = resolve(opts)?;
    Ok((render(&reports, &cfg), exit_code(&reports)))
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(&cli.cmd) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config(_) | Error::Io(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
