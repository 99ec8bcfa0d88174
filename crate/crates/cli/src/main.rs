//! `weylmax` — simulate the maximal Brownian partition functional, sample
//! its GUE counterpart, and run the statistical verification campaigns.
//!
//! Exit codes: 0 on success with every statistical test passed, 1 when
//! any test fails (or on runtime errors), 2 on usage errors.

mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use weylmax::brownian::{paths_csv, simulate};
use weylmax::distributions::{beta_cdf, f_m_density, BetaSpec};
use weylmax::experiments::{
    empirical_dn_study, empirical_table_csv, gue_identity_reports, joint_csv,
    pathwise_reversal_check, refine_check, run_joint_campaign, run_theta_campaign,
    sample_gue_values, test_time_reversal, theta_marginal_battery, CampaignConfig,
};
use weylmax::gue::sample_lambda_max;
use weylmax::maximizer::maximize;
use weylmax::rng::{make_stream, SeedSpec};
use weylmax::stats::TestReport;
use weylmax::{fmt_f64, Error};

const EXIT_OK: i32 = 0;
const EXIT_TEST_FAILURE: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "weylmax",
    version,
    about = "Maximal Brownian partition functionals and their verification suite"
)]
struct Cli {
    /// Cap on parallel workers (0 = one per core). Output is identical
    /// for any value.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the maximum and its partition on one simulated grid,
    /// printed as JSON.
    Maximize(MaximizeArgs),
    /// Run the verification campaign for one m and write samples plus
    /// test reports.
    Verify(VerifyArgs),
    /// Sample largest eigenvalues of the m x m GUE (CSV, one per line).
    Gue(GueArgs),
    /// Restricted empirical maximum over sampled point sets: mean-gap
    /// table across point-set budgets.
    Empirical(EmpiricalArgs),
    /// Joint observables (maximizer, value, terminal values) per replica.
    Joint(JointArgs),
    /// Evaluate the joint maximizer density at one point.
    Density(DensityArgs),
    /// Evaluate the regularized incomplete beta I_x(a, b).
    BetaCdf(BetaCdfArgs),
    /// Dump one simulated grid as CSV (t, B1, ..., Bm).
    DumpPaths(DumpPathsArgs),
}

#[derive(Args)]
struct MaximizeArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    m: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include the simulated paths in the JSON output.
    #[arg(long)]
    dump: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    m: u32,
    #[arg(long = "n-grid", default_value_t = 4096)]
    n_grid: usize,
    #[arg(long, default_value_t = 2000)]
    replicas: usize,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (or set WEYLMAX_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rerun the marginal battery at twice the grid resolution and check
    /// that no KS statistic degrades.
    #[arg(long)]
    refine: bool,
    /// Replace the master seed with fresh entropy (recorded in the
    /// manifest so the run stays reproducible afterwards).
    #[arg(long = "fresh-seed")]
    fresh_seed: bool,
}

#[derive(Args)]
struct GueArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    m: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    count: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmpiricalArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    m: u32,
    #[arg(long = "n-grid", default_value_t = 4096)]
    n_grid: usize,
    /// Largest point-set budget; the table reports powers of ten up to it.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
    samples: u32,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u32).range(1..))]
    grids: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct JointArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    m: u32,
    #[arg(long = "n-grid", default_value_t = 4096)]
    n_grid: usize,
    #[arg(long, default_value_t = 1000)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    m: u32,
    /// Interior points theta_1 < ... < theta_{m-1}, comma separated.
    #[arg(long)]
    theta: String,
}

#[derive(Args)]
struct BetaCdfArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    x: f64,
}

#[derive(Args)]
struct DumpPathsArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    m: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    if cli.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
        {
            eprintln!("error: could not configure {} workers: {e}", cli.workers);
            std::process::exit(EXIT_TEST_FAILURE);
        }
    }

    let code = match run(cli) {
        Ok(code) => code,
        Err(CliFailure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliFailure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_TEST_FAILURE
        }
    };
    std::process::exit(code);
}

enum CliFailure {
    Usage(String),
    Runtime(String),
}

impl From<std::io::Error> for CliFailure {
    fn from(e: std::io::Error) -> Self {
        CliFailure::Runtime(format!("io: {e}"))
    }
}

// Domain validation errors are usage errors; everything else is runtime.
impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::InvalidParameter(_)
            | Error::InvalidTheta(_)
            | Error::DensityDomain(_)
            | Error::EmptyGrid { .. } => CliFailure::Usage(e.to_string()),
            other => CliFailure::Runtime(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliFailure> {
    let workers = cli.workers;
    match cli.command {
        Command::Maximize(args) => cmd_maximize(args),
        Command::Verify(args) => cmd_verify(args, workers),
        Command::Gue(args) => cmd_gue(args),
        Command::Empirical(args) => cmd_empirical(args, workers),
        Command::Joint(args) => cmd_joint(args, workers),
        Command::Density(args) => cmd_density(args),
        Command::BetaCdf(args) => cmd_beta_cdf(args),
        Command::DumpPaths(args) => cmd_dump_paths(args),
    }
}

fn cmd_maximize(args: MaximizeArgs) -> Result<i32, CliFailure> {
    let mut stream = make_stream(SeedSpec::new(args.seed, 0));
    let grid = simulate(args.m as usize, args.n as usize, &mut stream)?;
    let result = maximize(&grid);
    let mut doc = serde_json::json!({
        "m": args.m,
        "n": args.n,
        "seed": args.seed,
        "value": result.value,
        "theta": result.theta,
        "indices": result.indices,
        "gaps": result.gaps,
    });
    if args.dump {
        let paths: Vec<Vec<f64>> = (0..grid.m()).map(|i| grid.path(i).to_vec()).collect();
        doc["paths"] = serde_json::json!(paths);
    }
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    Ok(EXIT_OK)
}

fn effective_seed(seed: u64, fresh: bool) -> u64 {
    if !fresh {
        return seed;
    }
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    nanos ^ u64::from(std::process::id()).rotate_left(32)
}

fn print_reports(reports: &[TestReport]) {
    for r in reports {
        println!(
            "{}: {} (statistic {:.4e}, critical {:.4e}, p {:.4})",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.statistic,
            r.critical_value,
            r.p_value
        );
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!(
        "{} of {} tests passed",
        reports.len() - failed,
        reports.len()
    );
}

fn cmd_verify(args: VerifyArgs, workers: usize) -> Result<i32, CliFailure> {
    let master_seed = effective_seed(args.seed, args.fresh_seed);
    if args.fresh_seed {
        eprintln!("fresh seed: {master_seed}");
    }
    let config = CampaignConfig::new(
        args.m as usize,
        args.n_grid,
        args.replicas,
        args.alpha,
        master_seed,
    )?;
    config.validate_statistical()?;
    let out_dir = output::resolve_out_dir(args.out)?;
    let manifest = output::manifest(
        "verify",
        serde_json::json!({
            "config": config,
            "companion_seed": config.companion().master_seed,
            "refine": args.refine,
            "workers": workers,
        }),
    );
    output::write_json(&out_dir.join("manifest.json"), &manifest)?;

    // Campaign data lands on disk before any test runs, so a failing test
    // always leaves its raw samples behind.
    let set_a = run_theta_campaign(&config)?;
    output::write_text(&out_dir.join("thetas.csv"), &set_a.thetas_csv())?;
    output::write_text(&out_dir.join("gaps.csv"), &set_a.gaps_csv())?;
    output::write_text(&out_dir.join("d_values.csv"), &set_a.d_values_csv())?;

    let set_b = run_theta_campaign(&config.companion())?;
    let mut reports = theta_marginal_battery(&set_a, config.alpha)?;
    reports.extend(test_time_reversal(&set_a, &set_b, config.alpha)?);
    reports.extend(pathwise_reversal_check(&config, &set_a, 1000)?);
    let gue = sample_gue_values(config.m, config.n_replicas, master_seed);
    reports.extend(gue_identity_reports(
        config.m,
        set_a.d_values(),
        &gue,
        config.alpha,
    )?);
    if args.refine {
        reports.extend(refine_check(&config)?);
    }
    output::write_json(&out_dir.join("reports.json"), &serde_json::json!(reports))?;

    print_reports(&reports);
    if reports.iter().all(|r| r.passed) {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_TEST_FAILURE)
    }
}

fn cmd_gue(args: GueArgs) -> Result<i32, CliFailure> {
    let mut stream = make_stream(SeedSpec::new(args.seed, 0));
    let draws = sample_lambda_max(args.m as usize, args.count as usize, &mut stream);
    let mut csv = String::from("lambda_max\n");
    for v in draws {
        csv.push_str(&fmt_f64(v));
        csv.push('\n');
    }
    match args.out {
        Some(path) => output::write_text(&path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}

fn cmd_empirical(args: EmpiricalArgs, workers: usize) -> Result<i32, CliFailure> {
    let samples = args.samples as usize;
    let mut checkpoints = Vec::new();
    let mut c = 1usize;
    while c < samples {
        checkpoints.push(c);
        c *= 10;
    }
    checkpoints.push(samples);
    let out_dir = output::resolve_out_dir(args.out)?;
    let manifest = output::manifest(
        "empirical",
        serde_json::json!({
            "m": args.m,
            "n_grid": args.n_grid,
            "samples": samples,
            "grids": args.grids,
            "master_seed": args.seed,
            "checkpoints": checkpoints,
            "workers": workers,
        }),
    );
    output::write_json(&out_dir.join("manifest.json"), &manifest)?;
    let study = empirical_dn_study(
        args.m as usize,
        args.n_grid,
        args.grids as usize,
        &checkpoints,
        args.seed,
    )?;
    let csv = empirical_table_csv(&study.rows);
    output::write_text(&out_dir.join("empirical.csv"), &csv)?;
    print!("{csv}");
    Ok(EXIT_OK)
}

fn cmd_joint(args: JointArgs, workers: usize) -> Result<i32, CliFailure> {
    let config = CampaignConfig::new(args.m as usize, args.n_grid, args.replicas, 0.01, args.seed)?;
    let out_dir = output::resolve_out_dir(args.out)?;
    let manifest = output::manifest(
        "joint",
        serde_json::json!({
            "m": args.m,
            "n_grid": args.n_grid,
            "replicas": args.replicas,
            "master_seed": args.seed,
            "workers": workers,
        }),
    );
    output::write_json(&out_dir.join("manifest.json"), &manifest)?;
    let rows = run_joint_campaign(&config)?;
    output::write_text(&out_dir.join("joint.csv"), &joint_csv(config.m, &rows))?;
    Ok(EXIT_OK)
}

fn cmd_density(args: DensityArgs) -> Result<i32, CliFailure> {
    let theta: Vec<f64> = args
        .theta
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliFailure::Usage(format!("bad theta entry {s:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if theta.len() != args.m as usize - 1 {
        return Err(CliFailure::Usage(format!(
            "m = {} needs {} interior points, got {}",
            args.m,
            args.m - 1,
            theta.len()
        )));
    }
    let value = f_m_density(&theta)?;
    println!("{}", fmt_f64(value));
    Ok(EXIT_OK)
}

fn cmd_beta_cdf(args: BetaCdfArgs) -> Result<i32, CliFailure> {
    let spec = BetaSpec::new(args.a, args.b)?;
    if !(0.0..=1.0).contains(&args.x) {
        return Err(CliFailure::Usage(format!(
            "x = {} must lie in [0, 1]",
            args.x
        )));
    }
    println!("{}", fmt_f64(beta_cdf(spec, args.x)));
    Ok(EXIT_OK)
}

fn cmd_dump_paths(args: DumpPathsArgs) -> Result<i32, CliFailure> {
    let mut stream = make_stream(SeedSpec::new(args.seed, 0));
    let grid = simulate(args.m as usize, args.n as usize, &mut stream)?;
    let csv = paths_csv(&grid);
    match args.out {
        Some(path) => output::write_text(&path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}
