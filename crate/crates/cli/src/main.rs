use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use xbma::linear::NigPrior;
use xbma::logistic::McmcConfig;
use xbma::scan::{emit_outputs, load_dataset, scan, ScanConfig, ScanCounts};
use xbma::simulate::{run_study, SimConfig};
use xbma::TraitType;

/// Bayesian model averaging for X-chromosome association under unknown X-inactivation.
#[derive(Debug, Parser)]
#[command(name = "xbma", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze every SNP of a genotype file against one phenotype.
    Scan(ScanArgs),
    /// Run a simulation study described by a TOML key-value file.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TraitArg {
    Linear,
    Binary,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Phenotype TSV with header `iid sex y`.
    #[arg(long)]
    pheno: PathBuf,
    /// Genotype TSV with header `iid snp_1 ... snp_K`.
    #[arg(long)]
    geno: PathBuf,
    #[arg(long = "trait", value_enum)]
    trait_type: TraitArg,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    a0: f64,
    #[arg(long, default_value_t = 0.1)]
    b0: f64,
    #[arg(long, default_value_t = 1000)]
    mcmc_samples: usize,
    #[arg(long, default_value_t = 500)]
    burn_in: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 0.01)]
    min_maf: f64,
    /// Output prefix for `.scan.tsv`, `.qq.tsv` and `.log`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output prefix for `.summary.tsv` and `.replicates.tsv`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

/// An error the user can fix by changing inputs or flags.
#[derive(Debug)]
struct Invalid(String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn classify(e: xbma::Error) -> anyhow::Error {
    if e.is_validation() {
        Invalid(e.to_string()).into()
    } else {
        e.into()
    }
}

fn run_scan(args: ScanArgs) -> anyhow::Result<()> {
    let config = ScanConfig {
        pheno_path: args.pheno,
        geno_path: args.geno,
        out_prefix: args.out,
        trait_type: match args.trait_type {
            TraitArg::Linear => TraitType::Linear,
            TraitArg::Binary => TraitType::Binary,
        },
        alpha: args.alpha,
        prior: NigPrior {
            lambda: args.lambda,
            a0: args.a0,
            b0: args.b0,
            ..NigPrior::default()
        },
        mcmc: McmcConfig {
            samples: args.mcmc_samples,
            burn_in: args.burn_in,
        },
        seed: args.seed,
        threads: args.threads,
        min_maf: args.min_maf,
    };
    config.validate().map_err(classify)?;
    let data = load_dataset(&config.pheno_path, &config.geno_path).map_err(classify)?;
    info!("loaded {} individuals and {} SNPs", data.n_individuals(), data.n_snps());
    let rows = scan(&data, &config).map_err(classify)?;
    let counts = ScanCounts::from_rows(&rows);
    info!(
        "analyzed {}, filtered {}, failed {}",
        counts.analyzed,
        counts.filtered(),
        counts.failed
    );
    for path in emit_outputs(&rows, &config, data.n_individuals())? {
        info!("wrote {}", path.display());
    }
    Ok(())
}

fn write_with_suffix(prefix: &Path, suffix: &str, body: &str) -> anyhow::Result<()> {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(suffix);
    let path = PathBuf::from(name);
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Invalid(format!("{}: {e}", args.config.display())))?;
    let config: SimConfig =
        toml::from_str(&text).map_err(|e| Invalid(format!("{}: {e}", args.config.display())))?;
    config.validate().map_err(classify)?;
    if args.threads == 0 {
        return Err(Invalid("threads must be positive".into()).into());
    }
    let pool = rayon_pool(args.threads)?;
    let summary = pool.install(|| run_study(&config)).map_err(classify)?;
    info!(
        "{} replicates completed, {} failed",
        summary.completed(),
        summary.failures.len()
    );
    write_with_suffix(&args.out, ".summary.tsv", &summary.summary_tsv())?;
    write_with_suffix(&args.out, ".replicates.tsv", &summary.replicates_tsv())?;
    Ok(())
}

fn rayon_pool(threads: usize) -> anyhow::Result<xbma::ThreadPool> {
    xbma::thread_pool(threads).context("starting worker pool")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Scan(a) => run_scan(a),
        Command::Simulate(a) => run_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Invalid>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
