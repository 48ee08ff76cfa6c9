mod commands;
mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

/// Exact counts, asymptotics, samplers and Monte Carlo experiments for
/// integer partitions.
#[derive(Debug, Parser)]
#[command(name = "partlab", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: all logical cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every random stream of the run.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Directory for cached count tables.
    #[arg(long, global = true, env = "PARTLAB_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Build count tables in memory only.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    Exact,
    Boltzmann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    /// `P(|S_j/j − 1| ≥ d)` against its Chernoff bound.
    Sum,
    /// `P(S'_j/S_j ≥ β)` against the ratio bound.
    Ratio,
    /// `P(S_k ≥ k log n)` and `P(S_1 ≤ n^{-1/2} k²)`.
    Overflow,
    /// Ties among `Λ_1..Λ_k`.
    Tie,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Number of partitions p(n).
    Count {
        #[arg(long)]
        n: u64,
    },
    /// Partitions of n with at most r parts of size at most s, or the exact
    /// joint tail at slanted heights h and w.
    CountRestricted {
        #[arg(long)]
        n: u64,
        #[arg(long, requires = "s", conflicts_with_all = ["h", "w"])]
        r: Option<u64>,
        #[arg(long, requires = "r")]
        s: Option<u64>,
        #[arg(long, requires = "w")]
        h: Option<f64>,
        #[arg(long, requires = "h")]
        w: Option<f64>,
        /// Extract the coefficient from the truncated product instead.
        #[arg(long, conflicts_with = "h")]
        product: bool,
    },
    /// Exact counts against their asymptotic forms, one row per (n, h, w).
    Asymptotic {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        h: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        w: Vec<f64>,
        /// Compare the exact joint tail with e^{-h-w} instead of the count.
        #[arg(long)]
        joint: bool,
    },
    /// Remainder of the log Euler product on a geometric grid of u.
    FreimanSweep {
        #[arg(long, default_value_t = 1e-3)]
        u_min: f64,
        #[arg(long, default_value_t = 0.2)]
        u_max: f64,
        #[arg(long, default_value_t = 20)]
        steps: u32,
        /// Im u / Re u, inside the wedge.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tilt: f64,
    },
    /// Modulus bound on the partition generating function over an (r, θ) grid.
    Lemma1Grid {
        #[arg(long, default_value_t = 0.5)]
        r_min: f64,
        #[arg(long, default_value_t = 0.999)]
        r_max: f64,
        #[arg(long, default_value_t = 20)]
        r_steps: u32,
        #[arg(long, default_value_t = 20)]
        theta_steps: u32,
    },
    /// exp(-constant · log n / log log n).
    Bound {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.11)]
        constant: f64,
        /// Also report the central binomial lower bound at this k.
        #[arg(long)]
        k: Option<u64>,
    },
    /// Uniform random partitions of n as JSON lines.
    Sample {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 10)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = Sampler::Exact)]
        method: Sampler,
    },
    /// Draws of the exponential-sums surrogate as JSON lines.
    SampleSurrogate {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        samples: u64,
    },
    /// Fraction of partitions of even n that are graphical.
    Wilf {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Exact fractions for every even n up to --n.
        #[arg(long)]
        series: bool,
    },
    /// Probability that two uniform partitions of n are dominance comparable.
    Macdonald {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Surrogate event probabilities P_k for each k.
    Pk {
        #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Constant of the reference decay curve.
        #[arg(long, default_value_t = 0.11)]
        a: f64,
    },
    /// Empirical surrogate tail frequencies against their analytic bounds.
    Chernoff {
        #[arg(long, value_enum, default_value_t = BoundKind::Sum)]
        kind: BoundKind,
        #[arg(long)]
        j: Option<u64>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Total variation between the largest parts and columns of a uniform
    /// partition and the surrogate.
    Tv {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Count { .. } => "count",
            Command::CountRestricted { .. } => "count-restricted",
            Command::Asymptotic { .. } => "asymptotic",
            Command::FreimanSweep { .. } => "freiman-sweep",
            Command::Lemma1Grid { .. } => "lemma1-grid",
            Command::Bound { .. } => "bound",
            Command::Sample { .. } => "sample",
            Command::SampleSurrogate { .. } => "sample-surrogate",
            Command::Wilf { .. } => "wilf",
            Command::Macdonald { .. } => "macdonald",
            Command::Pk { .. } => "pk",
            Command::Chernoff { .. } => "chernoff",
            Command::Tv { .. } => "tv",
        }
    }
}

/// Failure of a run, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or a violated precondition (exit 2).
    Invalid(String),
    /// Cache or output failure (exit 3).
    Io(String),
    /// The computation itself gave up (exit 1).
    Failed(String),
}

impl From<partlab_core::Error> for CliError {
    fn from(e: partlab_core::Error) -> Self {
        use partlab_core::Error as E;
        let msg = e.to_string();
        match e {
            E::Io(_) | E::CacheFormat(_) => CliError::Io(msg),
            E::SupportLeak { .. } | E::RetryCap { .. } => CliError::Failed(msg),
            _ => CliError::Invalid(msg),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let name = cli.command.name();
    let status = run(&cli);
    eprintln!(
        "# partlab {} {name} seed={} started={unix} wall_time={:.3}s",
        env!("CARGO_PKG_VERSION"),
        cli.global.seed,
        started.elapsed().as_secs_f64()
    );
    match status {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, msg) = match e {
                CliError::Invalid(m) => (2, m),
                CliError::Io(m) => (3, m),
                CliError::Failed(m) => (1, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Failed(e.to_string()))?;
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    commands::run(&cli.command, &cli.global, &mut out)?;
    out.flush()?;
    Ok(())
}
