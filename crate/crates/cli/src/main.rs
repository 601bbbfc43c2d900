use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tailbridge::simulation::{default_k_grid, synthetic_portfolio, PortfolioConfig, StudyConfig};
use tailbridge::{BurrDist, EstimatorKind, TailDistribution};
use tailbridge_cli::claims::{write_portfolio, ClaimsFile};
use tailbridge_cli::commands::{self, from_core, EstimateOptions};
use tailbridge_cli::error::CliError;

const AFTER_HELP: &str = "\
Claims files are CSV with header `z,status[,beta][,ultimate][,cohort]`; status 1 marks a
closed claim, 0 an open one whose size z is a lower bound. beta is the expert tail index
for open claims. Exit codes: 0 success, 2 input error, 3 estimation error.

Open claims are treated as randomly right-censored. Claims that are incurred but not yet
reported, and any reporting threshold, are not corrected for; results on recent accident
years need to be read with that in mind.";

#[derive(Parser)]
#[command(name = "tailbridge", version, about = "Tail-index and extreme quantile estimation for censored claims with expert information", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Pareto,
    Burr,
    Frechet,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the tail index from the top k claims and print it as JSON.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// mle, perturbed, flipped, squared, bayes_gamma, bayes_mdi, uniform_prior, expert_am, expert_hm
        #[arg(long, default_value = "perturbed")]
        estimator: EstimatorKind,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Expert tail index applied to every open claim.
        #[arg(long)]
        beta: Option<f64>,
        /// Prior variance for bayes_gamma, moment-matched around --beta.
        #[arg(long, default_value_t = 0.04)]
        bg_sigma2: f64,
        #[arg(long, requires = "bg_rate")]
        bg_shape: Option<f64>,
        #[arg(long, requires = "bg_shape")]
        bg_rate: Option<f64>,
        /// Lower end of the uniform prior.
        #[arg(long, default_value_t = 0.0)]
        b1: f64,
        /// Upper end of the uniform prior (unbounded if omitted).
        #[arg(long)]
        b2: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hill plot data: k, xi_mle, xi_perturbed, p_hat[, xi_ultimates].
    Hillplot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        kmin: usize,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weissman quantile estimates at level 1-p: k, q_km[, q_ultimates], q_combined.
    Quantile {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.005)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        kmin: usize,
        #[arg(long)]
        kmax: Option<usize>,
        /// Expert tail index; defaults to the harmonic mean of the row betas of the open claims in the top k.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo bias/MSE study over k.
    Simulate {
        #[arg(long, value_enum)]
        dist: Family,
        /// Extreme value index for pareto and frechet.
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        lam: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        /// Censor with an independent Pareto of this index instead of a copy of the claim distribution.
        #[arg(long)]
        cens_xi: Option<f64>,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        nsim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.005)]
        p: f64,
        #[arg(long, default_value_t = 0.2)]
        expert_sd: f64,
        #[arg(long, default_value_t = 0.04)]
        bg_sigma2: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        kmin: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hill plots of all claims and of the cohorts up to a cutoff, written to PREFIX.full.csv and PREFIX.reduced.csv.
    SplitValidate {
        #[arg(long)]
        input: PathBuf,
        /// Keep claims whose cohort is at most this value.
        #[arg(long)]
        cutoff: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        kmin: usize,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Write a synthetic claims portfolio in the input format.
    Synth {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        n_per_cohort: usize,
        #[arg(long, default_value_t = 0.5)]
        xi: f64,
        /// Censoring fraction of each cohort, oldest first.
        #[arg(long, value_delimiter = ',', default_value = "0.3,0.9")]
        censoring: Vec<f64>,
        /// Size scale of each cohort, oldest first (default 1,4 for two cohorts, else 1 throughout).
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
        /// Expert extreme value index written as beta = 1/expert_xi (defaults to --xi).
        #[arg(long)]
        expert_xi: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        ultimate_sd: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(
            std::fs::File::create(p).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn distribution(
    family: Family,
    xi: Option<f64>,
    eta: Option<f64>,
    lam: Option<f64>,
    tau: Option<f64>,
) -> Result<TailDistribution, CliError> {
    let missing = |name: &str| CliError::input(format!("--{name} is required for this distribution"));
    match family {
        Family::Pareto => TailDistribution::pareto_xi(xi.ok_or_else(|| missing("xi"))?).map_err(from_core),
        Family::Frechet => TailDistribution::frechet_xi(xi.ok_or_else(|| missing("xi"))?).map_err(from_core),
        Family::Burr => {
            if xi.is_some() {
                return Err(CliError::input("burr takes --eta, --lam and --tau, not --xi"));
            }
            let d = BurrDist::new(
                eta.ok_or_else(|| missing("eta"))?,
                lam.ok_or_else(|| missing("lam"))?,
                tau.ok_or_else(|| missing("tau"))?,
            )
            .map_err(from_core)?;
            Ok(TailDistribution::Burr(d))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate { input, k, estimator, lambda, beta, bg_sigma2, bg_shape, bg_rate, b1, b2, out } => {
            let file = ClaimsFile::from_path(&input)?;
            let opts = EstimateOptions {
                k,
                estimator,
                lambda,
                beta,
                bg_sigma2,
                bg_shape,
                bg_rate,
                b1,
                b2: b2.unwrap_or(f64::INFINITY),
            };
            let est = commands::estimate(&file, &opts)?;
            let mut w = output(out.as_deref())?;
            serde_json::to_writer(&mut w, &est).map_err(CliError::io)?;
            writeln!(w).map_err(CliError::io)
        }
        Command::Hillplot { input, kmin, kmax, lambda, beta, out } => {
            let file = ClaimsFile::from_path(&input)?;
            let rows = commands::hillplot(&file, kmin, kmax, lambda, beta)?;
            commands::write_hillplot(&rows, file.has_ultimate, output(out.as_deref())?)
        }
        Command::Quantile { input, p, kmin, kmax, beta, out } => {
            let file = ClaimsFile::from_path(&input)?;
            let rows = commands::quantile(&file, p, kmin, kmax, beta)?;
            commands::write_quantiles(&rows, file.has_ultimate, output(out.as_deref())?)
        }
        Command::Simulate {
            dist,
            xi,
            eta,
            lam,
            tau,
            cens_xi,
            n,
            nsim,
            seed,
            p,
            expert_sd,
            bg_sigma2,
            lambda,
            kmin,
            kmax,
            format,
            out,
        } => {
            let dist_x = distribution(dist, xi, eta, lam, tau)?;
            let dist_l = match cens_xi {
                Some(x) => TailDistribution::pareto_xi(x).map_err(from_core)?,
                None => dist_x,
            };
            let mut config = StudyConfig::new(dist_x, dist_l).with_n(n);
            if kmin.is_some() || kmax.is_some() {
                let default = default_k_grid(n);
                let lo = kmin.unwrap_or_else(|| default.first().copied().unwrap_or(1));
                let hi = kmax.unwrap_or_else(|| default.last().copied().unwrap_or(1));
                config.k_grid = (lo..=hi).collect();
            }
            config.n_sim = nsim;
            config.seed = seed;
            config.p = p;
            config.expert_noise_sd = expert_sd;
            config.bg_sigma2 = bg_sigma2;
            config.lambda = lambda;
            let result = commands::simulate(&config)?;
            let mut w = output(out.as_deref())?;
            match format {
                Format::Csv => w.write_all(result.to_csv().as_bytes()).map_err(CliError::io),
                Format::Json => {
                    serde_json::to_writer_pretty(&mut w, &result).map_err(CliError::io)?;
                    writeln!(w).map_err(CliError::io)
                }
            }
        }
        Command::SplitValidate { input, cutoff, out, kmin, kmax, lambda, beta } => {
            let file = ClaimsFile::from_path(&input)?;
            let (full, reduced) = commands::split_validate(&file, cutoff, kmin, kmax, lambda, beta, &out)?;
            eprintln!("wrote {} and {}", full.display(), reduced.display());
            Ok(())
        }
        Command::Synth { out, n_per_cohort, xi, censoring, scales, expert_xi, ultimate_sd, seed } => {
            let cohort_scale = scales.unwrap_or_else(|| if censoring.len() == 2 { vec![1.0, 4.0] } else { Vec::new() });
            let config = PortfolioConfig {
                n_per_cohort,
                xi,
                cohort_censoring: censoring,
                cohort_scale,
                expert_xi: expert_xi.unwrap_or(xi),
                ultimate_noise_sd: ultimate_sd,
                seed,
            };
            let claims = synthetic_portfolio(&config).map_err(from_core)?;
            write_portfolio(&claims, output(out.as_deref())?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tailbridge: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
