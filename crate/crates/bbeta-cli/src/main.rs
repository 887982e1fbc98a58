//! Command-line front end for the bimodal beta toolkit.
//!
//! Exit codes: 0 success, 1 malformed input, 2 invalid response data,
//! 3 fit did not converge (outputs are still written).

mod table;

use anyhow::{anyhow, bail, Context, Result};
use bbeta::diagnostics::{
    halfnormal_envelope_with, ks_statistic, pit_values, quantile_residuals,
};
use bbeta::dist::{BBetaParams, ShannonMethod};
use bbeta::regression::{fit, Coefficients, FitOptions, FitResult, RegressionModel};
use bbeta::rng;
use bbeta::simulation::{run_mc_study, McConfig};
use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde_json::json;
use std::path::{Path, PathBuf};

const EXIT_INPUT: i32 = 1;
const EXIT_VALIDATION: i32 = 2;
const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "bbeta",
    about = "Bimodal beta (BBeta) distribution: fitting, evaluation, sampling, diagnostics and Monte Carlo studies",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a BBeta regression to a CSV dataset
    Fit(FitArgs),
    /// Evaluate pdf/cdf/hazard curves and mode structure on a grid
    Dist(DistArgs),
    /// Draw samples from a BBeta distribution or regression design
    Simulate(SimulateArgs),
    /// Run a Monte Carlo bias/RMSE study from a JSON config
    Mc(McArgs),
    /// Residual diagnostics and simulated envelope for a fitted model
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with a header row
    #[arg(long)]
    input: PathBuf,
    /// Output JSON path; a residuals CSV lands next to it
    #[arg(long)]
    output: PathBuf,
    /// Response column name (values strictly inside (0, 1))
    #[arg(long)]
    response: String,
    /// Comma-separated covariate columns for log alpha (intercept implied)
    #[arg(long = "alpha-covars")]
    alpha_covars: Option<String>,
    /// Comma-separated covariate columns for log beta (intercept implied)
    #[arg(long = "beta-covars")]
    beta_covars: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "ci-level", default_value_t = 0.95)]
    ci_level: f64,
    /// Clamp boundary responses into [1e-6, 1-1e-6] instead of rejecting
    #[arg(long)]
    nudge: bool,
    #[arg(long = "max-iter", default_value_t = 500)]
    max_iter: usize,
    #[arg(long = "grad-tol", default_value_t = 1e-6)]
    grad_tol: f64,
}

#[derive(Args)]
struct DistArgs {
    /// Distribution parameters alpha,beta,rho,delta
    #[arg(long, value_name = "a,b,rho,delta", allow_hyphen_values = true)]
    params: String,
    /// Number of interior grid points
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Output CSV of (x, pdf, cdf, hazard); mode analysis JSON goes to stdout
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Distribution parameters alpha,beta,rho,delta (plain i.i.d. mode)
    #[arg(long, value_name = "a,b,rho,delta", conflicts_with_all = ["gamma", "zeta"],
          allow_hyphen_values = true)]
    params: Option<String>,
    /// Regression mode: comma-separated gamma coefficients (log alpha)
    #[arg(long, requires = "zeta", allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Regression mode: comma-separated zeta coefficients (log beta)
    #[arg(long, requires = "gamma", allow_hyphen_values = true)]
    zeta: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    /// Number of draws
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV (column x, plus covariates z1.. in regression mode)
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct McArgs {
    /// JSON study config: true_coef, sample_sizes, n_reps, seed, ...
    #[arg(long)]
    input: PathBuf,
    /// Output JSON report; estimates/residual CSVs land next to it
    #[arg(long)]
    output: PathBuf,
    /// Override the seed from the config file
    #[arg(long)]
    seed: Option<u64>,
    /// Override the replication count from the config file
    #[arg(long = "n-reps")]
    n_reps: Option<usize>,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Input CSV with the original responses and covariates
    #[arg(long)]
    input: PathBuf,
    /// Fit JSON produced by `bbeta fit` (reads its "estimates" block)
    #[arg(long)]
    coef: PathBuf,
    /// Output CSV with envelope bands per order statistic
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    response: String,
    #[arg(long = "alpha-covars")]
    alpha_covars: Option<String>,
    #[arg(long = "beta-covars")]
    beta_covars: Option<String>,
    /// Number of simulated datasets for the envelope
    #[arg(long = "n-sim", default_value_t = 100)]
    n_sim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Refit the model on each simulated dataset (slower, higher fidelity)
    #[arg(long)]
    refit: bool,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            classify_error(&err)
        }
    };
    std::process::exit(code);
}

fn classify_error(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<bbeta::Error>() {
        Some(bbeta::Error::InvalidResponse { .. }) => EXIT_VALIDATION,
        _ => EXIT_INPUT,
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Dist(args) => cmd_dist(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Mc(args) => cmd_mc(args),
        Command::Diagnose(args) => cmd_diagnose(args),
    }
}

fn parse_params(raw: &str) -> Result<BBetaParams> {
    let parts: Vec<f64> = raw
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("cannot parse '{raw}' as a,b,rho,delta"))?;
    if parts.len() != 4 {
        bail!("--params needs exactly four values, got {}", parts.len());
    }
    BBetaParams::new(parts[0], parts[1], parts[2], parts[3]).map_err(Into::into)
}

fn parse_coef_list(raw: &str, what: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(Into::into))
        .collect::<Result<Vec<f64>>>()
        .with_context(|| format!("cannot parse {what} coefficient list '{raw}'"))
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}{suffix}"))
}

fn cmd_fit(args: FitArgs) -> Result<i32> {
    let data = table::CsvTable::read(&args.input)?;
    let response_idx = data.column_index(&args.response)?;
    let responses = data.column(response_idx);

    let alpha_names = table::name_list(args.alpha_covars.as_deref());
    let beta_names = table::name_list(args.beta_covars.as_deref());
    let w_rows = data.design(&alpha_names)?;
    let z_rows = data.design(&beta_names)?;
    let model = RegressionModel::new(&w_rows, &z_rows)?;

    let options = FitOptions {
        max_iter: args.max_iter,
        grad_tol: args.grad_tol,
        ci_level: args.ci_level,
        nudge_boundary: args.nudge,
        ..FitOptions::default()
    };
    let result = fit(&responses, &model, &options)?;

    let (pits, _) = pit_values(&responses, &model, &result.estimates)?;
    let ks = ks_statistic(&pits)?;
    let report = quantile_residuals(&responses, &model, &result.estimates)?;

    let payload = fit_json(&args, &result, ks.statistic, ks.p_value, data.rows.len());
    write_text(&args.output, &format!("{payload:#}\n"))?;

    let shapes = model.shapes(&result.estimates)?;
    let mut residuals_csv = String::from("row,response,alpha,beta,pit,residual\n");
    for (i, ((&x, &(a, b)), (&pit, &resid))) in responses
        .iter()
        .zip(&shapes)
        .zip(pits.iter().zip(&report.residuals))
        .enumerate()
    {
        residuals_csv.push_str(&format!("{i},{x},{a},{b},{pit},{resid}\n"));
    }
    write_text(&sibling(&args.output, "_residuals.csv"), &residuals_csv)?;

    if result.converged {
        Ok(0)
    } else {
        eprintln!(
            "warning: fit stopped after {} iterations without meeting the gradient tolerance",
            result.iterations
        );
        Ok(EXIT_NONCONVERGENCE)
    }
}

fn fit_json(
    args: &FitArgs,
    result: &FitResult,
    ks_statistic: f64,
    ks_p_value: f64,
    n: usize,
) -> serde_json::Value {
    let estimates_vec: Vec<f64> = result
        .estimates
        .gamma
        .iter()
        .chain(&result.estimates.zeta)
        .copied()
        .chain([result.estimates.rho, result.estimates.delta])
        .collect();
    let parameters: Vec<serde_json::Value> = result
        .parameter_names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            json!({
                "parameter": name,
                "estimate": estimates_vec[i],
                "std_error": result.std_errors.as_ref().map(|se| se[i]),
                "ci_lower": result.ci_lower.as_ref().map(|c| c[i]),
                "ci_upper": result.ci_upper.as_ref().map(|c| c[i]),
            })
        })
        .collect();
    json!({
        "model": "bbeta_regression",
        "n": n,
        "converged": result.converged,
        "iterations": result.iterations,
        "loglik": result.loglik,
        "aic": result.aic,
        "bic": result.bic,
        "ks": {"statistic": ks_statistic, "p_value": ks_p_value},
        "ci_level": result.ci_level,
        "parameters": parameters,
        "estimates": result.estimates,
        "options": {
            "seed": args.seed,
            "ci_level": args.ci_level,
            "grad_tol": args.grad_tol,
            "max_iter": args.max_iter,
            "nudge": args.nudge,
            "response": args.response,
            "alpha_covariates": table::name_list(args.alpha_covars.as_deref()),
            "beta_covariates": table::name_list(args.beta_covars.as_deref()),
        },
    })
}

fn cmd_dist(args: DistArgs) -> Result<i32> {
    let params = parse_params(&args.params)?;
    if args.grid < 2 {
        bail!("--grid needs at least 2 points");
    }

    let mut csv = String::from("x,pdf,cdf,hazard\n");
    let n = args.grid as f64;
    for i in 0..args.grid {
        let x = (i as f64 + 1.0) / (n + 1.0);
        let pdf = params.pdf(x);
        let cdf = params.cdf(x);
        let hazard = params.hazard(x).unwrap_or(f64::INFINITY);
        csv.push_str(&format!("{x},{pdf},{cdf},{hazard}\n"));
    }
    write_text(&args.output, &csv)?;

    let analysis = params.mode_analysis();
    let conditions = params.check_bimodality_conditions();
    let stats = params.summary_stats();
    let weights = params.mixture_weights();
    let shannon = params.shannon_entropy(ShannonMethod::Quadrature).ok();
    let quadratic = params.quadratic_entropy().ok();
    let block = json!({
        "params": params,
        "mode_analysis": analysis,
        "bimodality_conditions": conditions,
        "summary_stats": stats,
        "mixture_weights": weights,
        "shannon_entropy": shannon,
        "quadratic_entropy": quadratic,
    });
    println!("{block:#}");
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    match (&args.params, &args.gamma) {
        (Some(raw), None) => {
            let params = parse_params(raw)?;
            let draws = params.sample(args.n, args.seed)?;
            let mut csv = String::from("x\n");
            for x in draws {
                csv.push_str(&format!("{x}\n"));
            }
            write_text(&args.output, &csv)?;
        }
        (None, Some(gamma_raw)) => {
            let gamma = parse_coef_list(gamma_raw, "gamma")?;
            let zeta = parse_coef_list(args.zeta.as_deref().expect("clap enforces"), "zeta")?;
            let coef = Coefficients::new(gamma, zeta, args.rho, args.delta)?;
            let n_covars = coef.gamma.len().max(coef.zeta.len()).saturating_sub(1);
            let mut stream = rng::derive_stream(args.seed, 0);

            let mut header = String::from("x");
            for j in 1..=n_covars {
                header.push_str(&format!(",z{j}"));
            }
            let mut csv = format!("{header}\n");
            for _ in 0..args.n {
                let covars: Vec<f64> = (0..n_covars).map(|_| stream.random::<f64>()).collect();
                let take = |len: usize| -> Vec<f64> {
                    let mut row = vec![1.0];
                    row.extend(covars.iter().take(len.saturating_sub(1)));
                    row
                };
                let eta1: f64 = take(coef.gamma.len())
                    .iter()
                    .zip(&coef.gamma)
                    .map(|(x, g)| x * g)
                    .sum();
                let eta2: f64 = take(coef.zeta.len())
                    .iter()
                    .zip(&coef.zeta)
                    .map(|(x, g)| x * g)
                    .sum();
                let params = BBetaParams::new(eta1.exp(), eta2.exp(), coef.rho, coef.delta)?;
                let x = params.sample_one(&mut stream)?;
                csv.push_str(&x.to_string());
                for z in &covars {
                    csv.push_str(&format!(",{z}"));
                }
                csv.push('\n');
            }
            write_text(&args.output, &csv)?;
        }
        _ => bail!("provide either --params or --gamma/--zeta"),
    }
    Ok(0)
}

fn cmd_mc(args: McArgs) -> Result<i32> {
    let raw = std::fs::read_to_string(&args.input)
        .with_context(|| format!("cannot read {}", args.input.display()))?;
    let mut config: McConfig =
        serde_json::from_str(&raw).context("config JSON does not match the expected schema")?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n_reps) = args.n_reps {
        config.n_reps = n_reps;
    }

    let report = run_mc_study(&config)?;
    write_text(&args.output, &report.to_json())?;
    write_text(&sibling(&args.output, "_estimates.csv"), &report.estimates_csv())?;
    write_text(&sibling(&args.output, "_residuals.csv"), &report.residuals_csv())?;
    Ok(0)
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<i32> {
    let data = table::CsvTable::read(&args.input)?;
    let responses = data.column(data.column_index(&args.response)?);
    let w_rows = data.design(&table::name_list(args.alpha_covars.as_deref()))?;
    let z_rows = data.design(&table::name_list(args.beta_covars.as_deref()))?;
    let model = RegressionModel::new(&w_rows, &z_rows)?;

    let fit_doc: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(&args.coef)
            .with_context(|| format!("cannot read {}", args.coef.display()))?,
    )
    .context("fit JSON is not valid JSON")?;
    let coef: Coefficients = serde_json::from_value(
        fit_doc
            .get("estimates")
            .cloned()
            .ok_or_else(|| anyhow!("fit JSON has no 'estimates' block"))?,
    )
    .context("'estimates' block does not match {gamma, zeta, rho, delta}")?;

    let report = quantile_residuals(&responses, &model, &coef)?;
    let (pits, _) = pit_values(&responses, &model, &coef)?;
    let ks = ks_statistic(&pits)?;

    // Envelope simulation needs a FitResult shell around the coefficients.
    let fit_result = pseudo_fit_result(&coef, &model);
    let bands =
        halfnormal_envelope_with(&responses, &model, &fit_result, args.n_sim, args.seed, args.refit)?;

    let mut csv = String::from("order,observed_abs_residual,lower,median,upper\n");
    for j in 0..bands.sorted_abs_residuals.len() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            j + 1,
            bands.sorted_abs_residuals[j],
            bands.lower[j],
            bands.median[j],
            bands.upper[j]
        ));
    }
    write_text(&args.output, &csv)?;

    let inside = bands
        .sorted_abs_residuals
        .iter()
        .zip(bands.lower.iter().zip(&bands.upper))
        .filter(|(obs, (lo, up))| **obs >= **lo && **obs <= **up)
        .count();
    let summary = json!({
        "residuals": {
            "mean": report.mean,
            "std_dev": report.std_dev,
            "skewness": report.skewness,
            "kurtosis": report.kurtosis,
            "clamped": report.clamped,
        },
        "ks": {"statistic": ks.statistic, "p_value": ks.p_value},
        "envelope": {
            "n_sim": bands.n_sim,
            "inside_bands": inside,
            "n": bands.sorted_abs_residuals.len(),
        },
    });
    println!("{summary:#}");
    Ok(0)
}

// Wraps externally supplied coefficients in the FitResult shape the envelope
// API expects; inference fields stay empty.
fn pseudo_fit_result(coef: &Coefficients, model: &RegressionModel) -> FitResult {
    let k = model.p() + model.q() + 2;
    FitResult {
        estimates: coef.clone(),
        loglik: f64::NAN,
        observed_info: vec![vec![f64::NAN; k]; k],
        std_errors: None,
        ci_lower: None,
        ci_upper: None,
        ci_level: 0.95,
        aic: f64::NAN,
        bic: f64::NAN,
        converged: true,
        iterations: 0,
        n_free_params: k,
        parameter_names: Coefficients::parameter_names(model.p(), model.q()),
        grad_tol: 1e-6,
        max_iter: 500,
    }
}
