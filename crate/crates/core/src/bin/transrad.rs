//! Command-line front end: experiment runs, single-shot bound assembly,
//! empirical concentration validation, and the tiny exact-oracle probe.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;
use transrad::concentration::{
    empirical_tail, slack_constants, tail_bound, test_train_gap_statistic,
    train_mean_statistic, TailBoundQuery, TailKind,
};
use transrad::harness::{
    emit_csv, run_experiment, write_metadata, ExperimentConfig,
};
use transrad::rademacher::{
    exact_oracle, generic_ulr_bound, kernel_ulr_bound, sup_ball, sup_kernel, sup_vanilla,
    ComplexityEstimate, ComplexityMethod, EXACT_ORACLE_CAP,
};
use transrad::riskbounds::margin_risk_bound;
use transrad::sample::default_p;
use transrad::util::clip_unit;
use transrad::{Error, Result};

#[derive(Parser)]
#[command(
    name = "transrad",
    version,
    about = "Transductive graph learning with data-dependent complexity bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full experiment from a key = value configuration file:
    /// ingest the dataset, train the configured graph model, sweep the
    /// truncated spectrum, and emit the bound-comparison CSV plus a
    /// metadata sidecar.
    Run(RunArgs),
    /// Assemble the margin risk bound from explicit numbers, printing
    /// every constant and slack term.
    Bounds(BoundsArgs),
    /// Simulate partition statistics and compare their empirical tails
    /// against the analytic bounds (informational; prints one line per
    /// tail probe).
    ValidateConcentration(ValidateArgs),
    /// Brute-force the exact complexity of a small synthetic instance and
    /// compare it with the matching closed-form bound.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the configuration file (keys documented in the README).
    config: PathBuf,
    /// Master seed; fixes the train/test split and every Monte-Carlo draw.
    #[arg(long)]
    seed: u64,
    /// Output CSV path; the metadata sidecar lands next to it.
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    /// Number of labeled (training) points.
    #[arg(long)]
    m: usize,
    /// Number of unlabeled (test) points.
    #[arg(long)]
    u: usize,
    /// Margin parameter γ of the loss.
    #[arg(long)]
    gamma: f64,
    /// Confidence parameter δ.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Empirical margin error on the labeled points.
    #[arg(long, default_value_t = 0.0)]
    empirical: f64,
    /// Complexity value to plug in (e.g. a closed-form bound).
    #[arg(long, default_value_t = 0.0)]
    complexity: f64,
}

#[derive(Args)]
struct ValidateArgs {
    /// Number of labeled (training) points.
    #[arg(long)]
    m: usize,
    /// Number of unlabeled (test) points.
    #[arg(long)]
    u: usize,
    /// Number of sampled partitions per statistic.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Seed for the partition draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OracleArgs {
    /// Number of labeled (training) points (m + u ≤ 12).
    #[arg(long)]
    m: usize,
    /// Number of unlabeled (test) points (m + u ≤ 12).
    #[arg(long)]
    u: usize,
    /// Sign probability p ∈ [0, 1/2]; defaults to mu/(m+u)².
    #[arg(long)]
    p: Option<f64>,
    /// Seed for the synthetic instance.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hypothesis family of the synthetic instance.
    #[arg(long, value_enum, default_value_t = OracleFamily::Ball)]
    family: OracleFamily,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleFamily {
    /// Coefficients in a Euclidean ball of radius 1; U has uniform entries.
    Ball,
    /// Sign-valued coefficients on the labeled rows; same U as `ball`.
    Vanilla,
    /// Coefficients in the unit ball of a PSD kernel built as G·Gᵀ.
    Kernel,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Bounds(args) => cmd_bounds(&args),
        Command::ValidateConcentration(args) => cmd_validate(&args),
        Command::Oracle(args) => cmd_oracle(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let config = ExperimentConfig::from_file(&args.config)?;
    let result = run_experiment(&config, args.seed)?;
    emit_csv(&result.rows, &args.out)?;
    let meta_path = args.out.with_extension("meta.txt");
    write_metadata(&result, &config, &meta_path)?;
    println!(
        "wrote {} ({} truncation levels) and {}",
        args.out.display(),
        result.rows.len(),
        meta_path.display()
    );
    println!(
        "m = {}, u = {}, Q = {:.6}, p0 = {:.6}, seed = {}",
        result.m, result.u, result.q_const, result.p0, result.seed
    );
    println!(
        "empirical margin error {:.6}, complexity ({}) {:.6}",
        result.errors.empirical_margin,
        result.risk.complexity.method.name(),
        result.risk.complexity.value
    );
    println!(
        "risk bound total {:.6} (clipped {:.6}); test 0/1 error {:.6}",
        result.risk.total, result.risk.total_clipped, result.errors.test_01
    );
    println!("wall clock {:.2} s", result.wall_seconds);
    Ok(())
}

fn cmd_bounds(args: &BoundsArgs) -> Result<()> {
    let constants = slack_constants(args.m, args.u)?;
    let complexity = ComplexityEstimate {
        method: ComplexityMethod::Generic,
        value: args.complexity,
        mc_mean: None,
        mc_lower: None,
        n_samples: None,
        delta: None,
        p: default_p(args.m, args.u),
    };
    let report = margin_risk_bound(
        args.empirical,
        complexity,
        args.gamma,
        args.m,
        args.u,
        args.delta,
    )?;
    println!("m = {}, u = {}", args.m, args.u);
    println!("Q  = {}", constants.q_const);
    println!("S  = {}", constants.s_const);
    println!("c0 = {}", constants.c0);
    println!("p0 = {}", default_p(args.m, args.u));
    println!("empirical margin error   = {}", report.empirical_margin_error);
    println!("complexity / gamma       = {}", report.complexity.value / report.gamma);
    println!("sqrt-min slack           = {}", report.slack_sqrt_min);
    println!("confidence slack         = {}", report.slack_confidence);
    println!("total                    = {}", report.total);
    println!("total clipped to [0, 1]  = {}", report.total_clipped);
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<()> {
    let ValidateArgs { m, u, samples, seed } = *args;
    let total = m + u;
    if total == 0 {
        return Err(Error::InvalidParameter("m + u must be positive".into()));
    }
    // Random 0/1 marking with roughly half the mass set.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let marking: Vec<f64> = (0..total)
        .map(|_| if rng.random_range(0.0..1.0) < 0.5 { 1.0 } else { 0.0 })
        .collect();
    let epsilons: Vec<f64> = (1..=10).map(|i| i as f64 * 0.05).collect();

    println!(
        "marking with {} of {} entries set; {} partitions per statistic",
        marking.iter().filter(|&&x| x == 1.0).count(),
        total,
        samples
    );
    println!("statistic        epsilon  empirical    bound        ok");

    let gap = empirical_tail(
        test_train_gap_statistic(marking.clone()),
        m,
        u,
        &epsilons,
        samples,
        seed,
    )?;
    print_tail_rows(TailKind::TestTrainGap, m, u, &epsilons, &gap.tails)?;

    let train = empirical_tail(
        train_mean_statistic(marking),
        m,
        u,
        &epsilons,
        samples,
        seed.wrapping_add(1),
    )?;
    print_tail_rows(TailKind::TrainMean, m, u, &epsilons, &train.tails)?;
    print_tail_rows(TailKind::Serfling, m, u, &epsilons, &train.tails)?;
    Ok(())
}

fn print_tail_rows(
    kind: TailKind,
    m: usize,
    u: usize,
    epsilons: &[f64],
    empirical: &[f64],
) -> Result<()> {
    for (&eps, &tail) in epsilons.iter().zip(empirical) {
        let bound = clip_unit(tail_bound(&TailBoundQuery {
            kind,
            m,
            u,
            beta: None,
            epsilon: eps,
        })?);
        let ok = if tail <= bound { "yes" } else { "NO" };
        println!(
            "{:<16} {:<8.2} {:<12.6} {:<12.6} {}",
            kind.name(),
            eps,
            tail,
            bound,
            ok
        );
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let OracleArgs { m, u, seed, family, .. } = *args;
    let total = m + u;
    if total > EXACT_ORACLE_CAP {
        return Err(Error::TooLarge {
            size: total,
            cap: EXACT_ORACLE_CAP,
        });
    }
    if m == 0 || u == 0 {
        return Err(Error::InvalidPartition { m, total });
    }
    let p = args.p.unwrap_or_else(|| default_p(m, u));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (exact, closed_name, closed) = match family {
        OracleFamily::Ball => {
            let u_mat = Array2::from_shape_fn((total, total), |_| rng.random_range(-1.0..1.0));
            let mu1 = 1.0;
            let exact = exact_oracle(|sg| sup_ball(sg, u_mat.view(), mu1), m, u, p)?;
            let closed = generic_ulr_bound(u_mat.view(), mu1, m, u)?;
            (exact, "coefficient-norm bound", closed)
        }
        OracleFamily::Vanilla => {
            let u_mat = Array2::from_shape_fn((total, total), |_| rng.random_range(-1.0..1.0));
            // Sign-valued coefficients on m rows have norm exactly √m.
            let mu1 = (m as f64).sqrt();
            let exact = exact_oracle(|sg| sup_vanilla(sg, u_mat.view(), m), m, u, p)?;
            let closed = generic_ulr_bound(u_mat.view(), mu1, m, u)?;
            (exact, "coefficient-norm bound", closed)
        }
        OracleFamily::Kernel => {
            let g = Array2::from_shape_fn((total, total), |_| rng.random_range(-1.0..1.0));
            let u_mat = g.dot(&g.t());
            let mu2 = 1.0;
            let exact = exact_oracle(|sg| sup_kernel(sg, u_mat.view(), mu2), m, u, p)?;
            let closed = kernel_ulr_bound(u_mat.view(), mu2, m, u)?;
            (exact, "kernel-trace bound", closed)
        }
    };
    println!("m = {m}, u = {u}, p = {p}, seed = {seed}");
    println!("exact complexity      = {exact}");
    println!("{closed_name:<21} = {closed}");
    println!(
        "ratio closed / exact  = {}",
        if exact > 0.0 { closed / exact } else { f64::INFINITY }
    );
    Ok(())
}
