//! The `trendlens` command-line front end.
//!
//! Flag values resolve in precedence order: explicit flag, then `--config`
//! file entry (plain `key = value` lines keyed by the long flag name), then
//! the built-in default. Exit codes: 0 success, 2 user/input error,
//! 3 internal numeric failure.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use trendlens_cli::commands::{graph, impact, mine, model, trends};
use trendlens_cli::Error;

#[derive(Parser)]
#[command(
    name = "trendlens",
    version,
    about = "News-trend forensics over tweet corpora: trends, itemset mining, graph analytics, price-impact regression, and fake/generated-news classification"
)]
struct Cli {
    /// Plain key = value file supplying defaults for long flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-field daily tweet counts with rolling mean and z-scores
    Trends {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        fields: PathBuf,
        /// Rolling-mean window in days [default: 7]
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keyword frequencies, frequent itemsets, association rules
    Mine {
        #[arg(long)]
        corpus: PathBuf,
        /// Restrict to tweets matching this thematic field
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        fields: Option<PathBuf>,
        /// Minimum itemset support [default: 0.02]
        #[arg(long)]
        min_support: Option<f64>,
        /// Minimum rule confidence [default: 0.5]
        #[arg(long)]
        min_confidence: Option<f64>,
        /// Largest itemset size [default: 5]
        #[arg(long)]
        max_size: Option<usize>,
        /// Also emit rules_filtered.csv for this keyword
        #[arg(long)]
        keyword: Option<String>,
        /// Group count for the grouped rule matrix [default: 5]
        #[arg(long)]
        groups: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Retweet-graph communities, centralities, and layout
    Graph {
        #[arg(long)]
        corpus: PathBuf,
        /// Random-walk length [default: 4]
        #[arg(long)]
        walktrap_steps: Option<usize>,
        /// PageRank damping [default: 0.85]
        #[arg(long)]
        damping: Option<f64>,
        /// Layout iterations [default: 200]
        #[arg(long)]
        iterations: Option<usize>,
        /// Conductance below this flags a community [default: 0.05]
        #[arg(long)]
        isolation_threshold: Option<f64>,
        /// Layout seed (required)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Student-t regression of prices on a tweet trend
    Impact {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        fields: PathBuf,
        /// Thematic field driving the regression
        #[arg(long)]
        field: String,
        #[arg(long)]
        prices: PathBuf,
        /// Rolling-mean window in days [default: 7]
        #[arg(long)]
        window: Option<usize>,
        /// MCMC chains [default: 4]
        #[arg(long)]
        chains: Option<usize>,
        /// Kept draws per chain [default: 2000]
        #[arg(long)]
        draws: Option<usize>,
        /// Discarded warmup iterations per chain [default: 1000]
        #[arg(long)]
        warmup: Option<usize>,
        /// Sampler seed (required)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the three-branch classifier on a labeled corpus
    Train {
        #[arg(long)]
        corpus: PathBuf,
        /// Keep only tweets with at least this many retweets [default: 5]
        #[arg(long)]
        min_retweets: Option<u64>,
        /// SVD components, capped at the TF-IDF shape [default: 32]
        #[arg(long)]
        svd_k: Option<usize>,
        /// Training epochs [default: 50]
        #[arg(long)]
        epochs: Option<usize>,
        /// Adam learning rate [default: 0.005]
        #[arg(long)]
        lr: Option<f64>,
        /// Minibatch size [default: 8]
        #[arg(long)]
        batch_size: Option<usize>,
        /// Init/shuffle seed (required)
        #[arg(long)]
        seed: Option<u64>,
        /// Checkpoint output path; factors land at <model>.factors
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a checkpoint: predictions for all tweets, metrics for labeled
    Classify {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Share report over the human/gpt2/rnn/other classes
    DetectGenerated {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

type ConfigMap = BTreeMap<String, String>;

fn load_config(path: Option<&PathBuf>) -> Result<ConfigMap, Error> {
    let mut map = ConfigMap::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let content = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read config {}: {e}", path.display())))?;
    for (idx, line) in content.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| {
            Error::input(format!("config line {}: expected 'key = value'", idx + 1))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// flag > config > default.
fn resolve<T: FromStr + Copy>(
    flag: Option<T>,
    config: &ConfigMap,
    key: &str,
    default: T,
) -> Result<T, Error>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    match config.get(key) {
        Some(raw) => raw
            .parse()
            .map_err(|e| Error::input(format!("config key '{key}': {e}"))),
        None => Ok(default),
    }
}

fn required_seed(flag: Option<u64>, config: &ConfigMap) -> Result<u64, Error> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match config.get("seed") {
        Some(raw) => raw
            .parse()
            .map_err(|e| Error::input(format!("config key 'seed': {e}"))),
        None => Err(Error::input(
            "--seed is required for this subcommand (flag or config)",
        )),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let config = load_config(cli.config.as_ref())?;
    match cli.command {
        Command::Trends {
            corpus,
            fields,
            window,
            out,
        } => trends::run(&trends::TrendsOpts {
            corpus,
            fields,
            window: resolve(window, &config, "window", 7)?,
            out,
        }),
        Command::Mine {
            corpus,
            field,
            fields,
            min_support,
            min_confidence,
            max_size,
            keyword,
            groups,
            out,
        } => mine::run(&mine::MineOpts {
            corpus,
            field,
            fields,
            min_support: resolve(min_support, &config, "min_support", 0.02)?,
            min_confidence: resolve(min_confidence, &config, "min_confidence", 0.5)?,
            max_size: resolve(max_size, &config, "max_size", 5)?,
            keyword,
            groups: resolve(groups, &config, "groups", 5)?,
            out,
        }),
        Command::Graph {
            corpus,
            walktrap_steps,
            damping,
            iterations,
            isolation_threshold,
            seed,
            out,
        } => graph::run(&graph::GraphOpts {
            corpus,
            walktrap_steps: resolve(walktrap_steps, &config, "walktrap_steps", 4)?,
            damping: resolve(damping, &config, "damping", 0.85)?,
            iterations: resolve(iterations, &config, "iterations", 200)?,
            isolation_threshold: resolve(
                isolation_threshold,
                &config,
                "isolation_threshold",
                0.05,
            )?,
            seed: required_seed(seed, &config)?,
            out,
        }),
        Command::Impact {
            corpus,
            fields,
            field,
            prices,
            window,
            chains,
            draws,
            warmup,
            seed,
            out,
        } => impact::run(&impact::ImpactOpts {
            corpus,
            fields,
            field,
            prices,
            window: resolve(window, &config, "window", 7)?,
            chains: resolve(chains, &config, "chains", 4)?,
            draws: resolve(draws, &config, "draws", 2000)?,
            warmup: resolve(warmup, &config, "warmup", 1000)?,
            seed: required_seed(seed, &config)?,
            out,
        }),
        Command::Train {
            corpus,
            min_retweets,
            svd_k,
            epochs,
            lr,
            batch_size,
            seed,
            model,
            out,
        } => model::run_train(&model::TrainOpts {
            corpus,
            min_retweets: resolve(min_retweets, &config, "min_retweets", 5)?,
            svd_k: resolve(svd_k, &config, "svd_k", 32)?,
            epochs: resolve(epochs, &config, "epochs", 50)?,
            learning_rate: resolve(lr, &config, "lr", 5e-3)?,
            batch_size: resolve(batch_size, &config, "batch_size", 8)?,
            seed: required_seed(seed, &config)?,
            model,
            out,
        }),
        Command::Classify { corpus, model, out } => {
            model::run_classify(&model::ClassifyOpts { corpus, model, out })
        }
        Command::DetectGenerated { corpus, model, out } => {
            model::run_detect(&model::ClassifyOpts { corpus, model, out })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
