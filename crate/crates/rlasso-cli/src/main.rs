//! Command-line interface for the rlasso toolkit: posterior fitting on CSV
//! data, synthetic benchmark scenarios, and repeated k-fold cross-validation.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
//! failure. Every failure prints a single diagnostic line on stderr. Output
//! documents contain no timestamps, so equal configurations and seeds produce
//! byte-identical results.

mod io;
mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{ArgAction, Args, Parser, Subcommand};
use nalgebra::DVector;

use rlasso::bench::{
    kfold_cv, run_scenario, BenchError, DesignStructure, Method, ScenarioId, ScenarioSpec,
};
use rlasso::dist::Rng;
use rlasso::freq::{fbp_select, S5Config};
use rlasso::hyper::{default_overlap_bound, run_mcem, select_lambda_apriori};
use rlasso::model::{
    quantile_type7, standardize_opts, summarize, MCMCConfig, PosteriorDraws, PriorSpec,
};
use rlasso::sampler::{effective_sample_size, run_chain, SamplerKind};

use report::*;

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration: {m}"),
            CliError::Data(m) => write!(f, "data: {m}"),
            CliError::Numeric(m) => write!(f, "numerical: {m}"),
        }
    }
}

fn bench_error(e: BenchError) -> CliError {
    match e {
        BenchError::InvalidSpec(_)
        | BenchError::InvalidParam(_)
        | BenchError::FoldTooSmall { .. } => CliError::Config(e.to_string()),
        BenchError::DimensionMismatch { .. } | BenchError::Model(_) => CliError::Data(e.to_string()),
        _ => CliError::Numeric(e.to_string()),
    }
}

// ---------------------------------------------------------------------------
// Arguments
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(name = "rlasso", version, about = "Reciprocal LASSO regression toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the Bayesian reciprocal LASSO to a CSV dataset.
    Fit(FitArgs),
    /// Run a synthetic benchmark scenario across replicated splits.
    Simulate(SimulateArgs),
    /// Repeated k-fold cross-validation of one method on a CSV dataset.
    Cv(CvArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    response: String,
    /// Gibbs augmentation: smdp or smtn.
    #[arg(long, default_value = "smtn")]
    sampler: String,
    /// Penalty scale handling: fixed:VALUE, mcem, hyperprior:A,B, or apriori.
    #[arg(long = "lambda-mode", default_value = "hyperprior:0.001,0.001")]
    lambda_mode: String,
    #[arg(long, default_value_t = 11_000)]
    iters: usize,
    #[arg(long, default_value_t = 1_000)]
    burnin: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Variable selection on the posterior: fbp or none.
    #[arg(long, default_value = "fbp")]
    select: String,
    /// Scale the response to unit sample standard deviation before fitting.
    #[arg(long = "scale-response", default_value_t = true, action = ArgAction::Set)]
    scale_response: bool,
    /// Credible interval level.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Output path for the JSON report (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario name I..XXIV, or 'custom' with the --n/--p/... flags below.
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Comma-separated methods: ols, bayesA, bayesB, bayesC, rlasso.
    #[arg(long, default_value = "bayesC,rlasso")]
    methods: String,
    #[arg(long, default_value = "smtn")]
    sampler: String,
    #[arg(long, default_value_t = 11_000)]
    iters: usize,
    #[arg(long, default_value_t = 1_000)]
    burnin: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes PREFIX.csv (per-replicate) and PREFIX.json.
    #[arg(long)]
    out: PathBuf,
    /// Custom scenario dimensions and parameters (only with --scenario custom).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    /// Design covariance structure: IS, CS, or AR.
    #[arg(long)]
    structure: Option<String>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Comma-separated true coefficients of length p.
    #[arg(long)]
    beta0: Option<String>,
    #[arg(long = "train-fraction")]
    train_fraction: Option<f64>,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    response: String,
    /// Method to cross-validate: ols, bayesA, bayesB, bayesC, or rlasso.
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, default_value = "smtn")]
    sampler: String,
    #[arg(long, default_value_t = 11_000)]
    iters: usize,
    #[arg(long, default_value_t = 1_000)]
    burnin: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the JSON report (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Shared parsing helpers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
enum LambdaModeArg {
    Fixed(f64),
    Mcem,
    Hyperprior(f64, f64),
    Apriori,
}

fn parse_lambda_mode(s: &str) -> Result<LambdaModeArg, CliError> {
    let bad = |m: String| CliError::Config(m);
    if let Some(rest) = s.strip_prefix("fixed:") {
        let v: f64 = rest
            .parse()
            .map_err(|_| bad(format!("fixed lambda '{rest}' is not a number")))?;
        if !(v > 0.0) {
            return Err(bad(format!("fixed lambda must be > 0, got {v}")));
        }
        return Ok(LambdaModeArg::Fixed(v));
    }
    if s == "mcem" {
        return Ok(LambdaModeArg::Mcem);
    }
    if s == "apriori" {
        return Ok(LambdaModeArg::Apriori);
    }
    if s == "hyperprior" {
        return Ok(LambdaModeArg::Hyperprior(0.001, 0.001));
    }
    if let Some(rest) = s.strip_prefix("hyperprior:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(bad(format!("hyperprior needs 'A,B', got '{rest}'")));
        }
        let a: f64 =
            parts[0].parse().map_err(|_| bad(format!("hyperprior shape '{}' is not a number", parts[0])))?;
        let b: f64 =
            parts[1].parse().map_err(|_| bad(format!("hyperprior rate '{}' is not a number", parts[1])))?;
        if !(a > 0.0 && b > 0.0) {
            return Err(bad(format!("hyperprior parameters must be > 0, got ({a}, {b})")));
        }
        return Ok(LambdaModeArg::Hyperprior(a, b));
    }
    Err(bad(format!(
        "unknown lambda mode '{s}' (expected fixed:VALUE, mcem, hyperprior:A,B, or apriori)"
    )))
}

fn parse_sampler(s: &str) -> Result<SamplerKind, CliError> {
    SamplerKind::from_str(s).map_err(CliError::Config)
}

fn parse_methods(s: &str) -> Result<Vec<Method>, CliError> {
    let methods: Result<Vec<Method>, String> =
        s.split(',').map(|m| m.trim().parse::<Method>()).collect();
    let methods = methods.map_err(CliError::Config)?;
    if methods.is_empty() {
        return Err(CliError::Config("at least one method is required".into()));
    }
    Ok(methods)
}

fn build_mcmc_config(sampler: &str, iters: usize, burnin: usize, seed: u64) -> Result<MCMCConfig, CliError> {
    let mut config = MCMCConfig::new(parse_sampler(sampler)?, seed);
    config.iterations = iters;
    config.burn_in = burnin;
    config.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(config)
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, contents)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numeric(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

/// MCEM defaults for the fit command: EM budget and inner chain length.
const FIT_MCEM_EM_ITERS: usize = 30;
const FIT_MCEM_INNER_ITERS: usize = 1_000;

fn cmd_fit(args: &FitArgs) -> Result<(), CliError> {
    // Validate the whole configuration before touching the data.
    let config = build_mcmc_config(&args.sampler, args.iters, args.burnin, args.seed)?;
    let lambda_mode = parse_lambda_mode(&args.lambda_mode)?;
    let select = match args.select.as_str() {
        "fbp" => true,
        "none" => false,
        other => {
            return Err(CliError::Config(format!(
                "unknown selection '{other}' (expected fbp or none)"
            )))
        }
    };
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(CliError::Config(format!("level must be in (0, 1), got {}", args.level)));
    }

    let (raw_y, raw_x, names) = io::read_csv_regression(&args.data, &args.response)?;
    let data = standardize_opts(&raw_y, &raw_x, args.scale_response)
        .map_err(|e| CliError::Data(e.to_string()))?;

    // Run the chain under the requested lambda handling.
    let (draws, lambda_report): (PosteriorDraws, LambdaReport) = match lambda_mode {
        LambdaModeArg::Fixed(lambda) => {
            let draws = run_chain(&data, &PriorSpec::ide_fixed(lambda), &config)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let report = LambdaReport {
                mode: "fixed".into(),
                value: Some(lambda),
                mean: None,
                median: None,
                overlap_bound: None,
                mcem_path: None,
                mcem_converged: None,
            };
            (draws, report)
        }
        LambdaModeArg::Hyperprior(a, b) => {
            let draws = run_chain(&data, &PriorSpec::ide_hyperprior(a, b), &config)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let mut l: Vec<f64> = draws.lambda_draws.iter().copied().collect();
            l.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mean = l.iter().sum::<f64>() / l.len() as f64;
            let report = LambdaReport {
                mode: "hyperprior".into(),
                value: None,
                mean: Some(mean),
                median: Some(quantile_type7(&l, 0.5)),
                overlap_bound: None,
                mcem_path: None,
                mcem_converged: None,
            };
            (draws, report)
        }
        LambdaModeArg::Apriori => {
            let bound = default_overlap_bound(data.p);
            let lambda = select_lambda_apriori(&data, bound)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let draws = run_chain(&data, &PriorSpec::ide_fixed(lambda), &config)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let report = LambdaReport {
                mode: "apriori".into(),
                value: Some(lambda),
                mean: None,
                median: None,
                overlap_bound: Some(bound),
                mcem_path: None,
                mcem_converged: None,
            };
            (draws, report)
        }
        LambdaModeArg::Mcem => {
            let (trace, draws) =
                run_mcem(&data, &config, 1.0, FIT_MCEM_EM_ITERS, FIT_MCEM_INNER_ITERS)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
            let report = LambdaReport {
                mode: "mcem".into(),
                value: trace.lambda_path.last().copied(),
                mean: None,
                median: None,
                overlap_bound: None,
                mcem_path: Some(trace.lambda_path.clone()),
                mcem_converged: Some(trace.converged),
            };
            (draws, report)
        }
    };

    let summary =
        summarize(&draws, args.level).map_err(|e| CliError::Numeric(e.to_string()))?;
    let (raw_coef, intercept_raw) = data.coefficients_raw(&summary.posterior_mean);

    let mut coefficients = Vec::with_capacity(data.p);
    for j in 0..data.p {
        let column: Vec<f64> = draws.beta_draws.column(j).iter().copied().collect();
        let ess = effective_sample_size(&column).ok();
        coefficients.push(CoefficientReport {
            name: names[j].clone(),
            mean: summary.posterior_mean[j],
            median: summary.posterior_median[j],
            ci_lower: summary.ci_lower[j],
            ci_upper: summary.ci_upper[j],
            mcse: summary.mcse[j],
            ess,
            raw_estimate: raw_coef[j],
        });
    }

    let mut s2: Vec<f64> = draws.sigma2_draws.iter().copied().collect();
    s2.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sigma2 = ScalarSummary {
        mean: s2.iter().sum::<f64>() / s2.len() as f64,
        median: quantile_type7(&s2, 0.5),
    };

    let selection = if select {
        let s5 = S5Config::for_data(&data, args.seed.wrapping_add(0x5e1ec7));
        let sel =
            fbp_select(&draws, &data, &s5).map_err(|e| CliError::Numeric(e.to_string()))?;
        Some(SelectionReport {
            support: sel.support.iter().map(|&j| names[j].clone()).collect(),
            support_indices: sel.support.clone(),
            // Aligned with `support`: the debiased coefficient of each
            // selected predictor (standardized scale).
            beta_refit: sel.support.iter().map(|&j| sel.beta_refit[j]).collect(),
            objective: sel.objective,
            lambda_used: sel.lambda_used,
        })
    } else {
        None
    };

    let report = FitReport {
        schema_version: SCHEMA_VERSION,
        command: "fit",
        data: DataEcho {
            path: args.data.display().to_string(),
            n: data.n,
            p: data.p,
            response: args.response.clone(),
            predictors: names,
        },
        config: ConfigEcho {
            sampler: config.sampler.to_string(),
            iterations: config.iterations,
            burn_in: config.burn_in,
            seed: config.seed,
            lambda_mode: args.lambda_mode.clone(),
            scale_response: args.scale_response,
            level: args.level,
        },
        lambda: lambda_report,
        sigma2,
        intercept_raw,
        coefficients,
        selection,
    };
    write_output(args.out.as_deref(), &to_json(&report)?)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn build_scenario(args: &SimulateArgs) -> Result<ScenarioSpec, CliError> {
    let custom_flags_present = args.n.is_some()
        || args.p.is_some()
        || args.structure.is_some()
        || args.rho.is_some()
        || args.sigma.is_some()
        || args.beta0.is_some()
        || args.train_fraction.is_some();
    if args.scenario.eq_ignore_ascii_case("custom") {
        let n = args.n.ok_or_else(|| CliError::Config("custom scenario needs --n".into()))?;
        let p = args.p.ok_or_else(|| CliError::Config("custom scenario needs --p".into()))?;
        let structure: DesignStructure = args
            .structure
            .as_deref()
            .ok_or_else(|| CliError::Config("custom scenario needs --structure".into()))?
            .parse()
            .map_err(CliError::Config)?;
        let rho = args.rho.ok_or_else(|| CliError::Config("custom scenario needs --rho".into()))?;
        let sigma =
            args.sigma.ok_or_else(|| CliError::Config("custom scenario needs --sigma".into()))?;
        let beta0_str =
            args.beta0.as_deref().ok_or_else(|| CliError::Config("custom scenario needs --beta0".into()))?;
        let beta0: Result<Vec<f64>, _> =
            beta0_str.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let beta0 = beta0
            .map_err(|_| CliError::Config(format!("cannot parse --beta0 '{beta0_str}' as numbers")))?;
        ScenarioSpec::custom(
            n,
            p,
            structure,
            rho,
            sigma,
            DVector::from_vec(beta0),
            args.train_fraction.unwrap_or(0.5),
        )
        .map_err(bench_error)
    } else {
        if custom_flags_present {
            return Err(CliError::Config(
                "--n/--p/--structure/--rho/--sigma/--beta0/--train-fraction are only valid with --scenario custom".into(),
            ));
        }
        let id: ScenarioId = args.scenario.parse().map_err(CliError::Config)?;
        ScenarioSpec::table1(id).map_err(bench_error)
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let config = build_mcmc_config(&args.sampler, args.iters, args.burnin, args.seed)?;
    let methods = parse_methods(&args.methods)?;
    if args.reps == 0 {
        return Err(CliError::Config("--reps must be >= 1".into()));
    }
    let spec = build_scenario(args)?;

    let results = run_scenario(&spec, args.reps, &methods, &config, args.seed).map_err(bench_error)?;

    // Per-replicate CSV records.
    let csv_path = args.out.with_extension("csv");
    let mut writer = csv::Writer::from_path(&csv_path)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", csv_path.display())))?;
    writer
        .write_record(["replicate", "method", "mse", "bar", "model_size"])
        .map_err(|e| CliError::Data(e.to_string()))?;
    for result in &results {
        for rec in &result.records {
            let bar = match rec.bar {
                Some(v) => format!("{v:.16e}"),
                None => "NA".to_string(),
            };
            writer
                .write_record([
                    rec.replicate.to_string(),
                    rec.method.to_string(),
                    format!("{:.16e}", rec.mse),
                    bar,
                    rec.model_size.to_string(),
                ])
                .map_err(|e| CliError::Data(e.to_string()))?;
        }
    }
    writer.flush().map_err(|e| CliError::Data(e.to_string()))?;

    let report = SimulateReport {
        schema_version: SCHEMA_VERSION,
        command: "simulate",
        scenario: ScenarioEcho {
            id: spec.id.to_string(),
            n: spec.n,
            p: spec.p,
            structure: spec.structure.to_string(),
            rho: spec.rho,
            sigma: spec.sigma,
            train_fraction: spec.train_fraction,
            beta0: spec.beta0.iter().copied().collect(),
        },
        replications: args.reps,
        seed: args.seed,
        sampler: config.sampler.to_string(),
        iterations: config.iterations,
        burn_in: config.burn_in,
        results: results
            .iter()
            .map(|r| MethodSummary {
                method: r.method.to_string(),
                median_mse: r.mse,
                median_bar: r.bar,
                median_model_size: r.model_size,
                failures: r.failures,
            })
            .collect(),
    };
    let json_path = args.out.with_extension("json");
    write_output(Some(&json_path), &to_json(&report)?)
}

// ---------------------------------------------------------------------------
// cv
// ---------------------------------------------------------------------------

fn cmd_cv(args: &CvArgs) -> Result<(), CliError> {
    let config = build_mcmc_config(&args.sampler, args.iters, args.burnin, args.seed)?;
    let method: Method = args.method.parse().map_err(CliError::Config)?;
    if args.folds < 2 {
        return Err(CliError::Config(format!("--folds must be >= 2, got {}", args.folds)));
    }
    if args.repeats == 0 {
        return Err(CliError::Config("--repeats must be >= 1".into()));
    }

    let (raw_y, raw_x, names) = io::read_csv_regression(&args.data, &args.response)?;
    let mut rng = Rng::from_seed(args.seed);
    let cv = kfold_cv(&raw_y, &raw_x, args.folds, args.repeats, method, &config, &mut rng)
        .map_err(bench_error)?;

    let report = CvReport {
        schema_version: SCHEMA_VERSION,
        command: "cv",
        data: DataEcho {
            path: args.data.display().to_string(),
            n: raw_y.len(),
            p: raw_x.ncols(),
            response: args.response.clone(),
            predictors: names,
        },
        method: method.to_string(),
        folds: args.folds,
        repeats: args.repeats,
        seed: args.seed,
        sampler: config.sampler.to_string(),
        iterations: config.iterations,
        burn_in: config.burn_in,
        mspe: cv.mspe,
        model_size: cv.model_size,
        fold_mses: cv.fold_mses,
    };
    write_output(args.out.as_deref(), &to_json(&report)?)
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Cv(args) => cmd_cv(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
