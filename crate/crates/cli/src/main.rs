mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "regmean", version, about = "Regular (quasi-arithmetic) means: computation, asymptotics and Monte Carlo checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Master seed for every random stream
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Output file (directory for the reproduce commands); stdout if omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for Monte Carlo and grid work (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Regular mean of a data set
    Mean {
        #[arg(long)]
        generator: String,
        /// CSV file or inline list such as 1,2,4
        #[arg(long, allow_hyphen_values = true)]
        data: String,
    },
    /// Randomized check of the four axioms of regular means
    Axioms {
        #[arg(long)]
        generator: String,
        #[arg(long)]
        n: usize,
        /// Replacement block size; every n0 in 1..=n when omitted
        #[arg(long)]
        n0: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Edgeworth approximation of the standardized statistic on a grid
    Edgeworth {
        #[arg(long)]
        generator: String,
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        /// lo:hi:steps
        #[arg(long, default_value = "-4:4:81", allow_hyphen_values = true)]
        grid: String,
        /// Use κ² instead of γ² in the third correction term
        #[arg(long)]
        literal_kappa2: bool,
    },
    /// Monte Carlo study of one distribution and generator
    Simulate {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        generator: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        /// Also write the histogram of standardized statistics
        #[arg(long)]
        hist: Option<PathBuf>,
    },
    /// Measured distance between two regular means against the stability bound
    Stability {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        /// lo:hi, used for every coordinate
        #[arg(long = "box", default_value = "1:2", allow_hyphen_values = true)]
        interval: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// Random points of the box for n > 3
        #[arg(long, default_value_t = 100_000)]
        points: usize,
    },
    /// Terminal wealth, geometric average return and the Markowitz approximation
    Portfolio {
        /// CSV file or inline list of period returns
        #[arg(long, allow_hyphen_values = true)]
        returns: String,
        #[arg(long, default_value_t = 1.0)]
        w0: f64,
        /// Returns are given in percent
        #[arg(long)]
        percent: bool,
        /// Use the n − 1 divisor for the return variance
        #[arg(long)]
        unbiased_variance: bool,
    },
    /// Figure 1 data: four scenarios × identity, log and reciprocal generators
    #[command(name = "reproduce-figure1")]
    ReproduceFigure1 {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
    },
    /// Figure 2 data: LogNormal(2, 6.25) with identity and log generators
    #[command(name = "reproduce-figure2")]
    ReproduceFigure2 {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.global.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| commands::run(&cli)),
            Err(e) => Err(regmean::Error::Configuration(format!("cannot start {t} threads: {e}"))),
        },
        None => commands::run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
