use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fraclab::cli::{self, RunConfig, CACHE_ENV};
use fraclab::verify;
use fraclab::Error;

#[derive(Parser, Debug)]
#[command(name = "fraclab", version, about = "Fractional-part correlations and Moebius series")]
struct Args {
    /// Sieve limit; must cover the largest N any command asks for.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    limit: u64,

    /// Sieve cache file (MUV1 format).
    #[arg(long, global = true, env = CACHE_ENV)]
    cache: Option<PathBuf>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Significant digits in decimal columns.
    #[arg(long, global = true, default_value_t = 15)]
    digits: usize,

    /// Use the O(N^2) double loop for S(N) everywhere.
    #[arg(long, global = true)]
    no_fast_path: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sieve mu up to --limit and print Mertens / square-free counts at decades.
    Sieve,
    /// Exact E_X({nx}{mx}).
    Correlate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long = "x-range", default_value_t = 100)]
        x_range: u64,
        /// Use the closed-form law instead of breakpoint integration.
        #[arg(long)]
        closed_form: bool,
    },
    /// -pi * sum mu(n)/n {nx} at decade truncations.
    Lemma1 {
        #[arg(long = "n-max", default_value_t = 100_000)]
        n_max: u64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// One partial sum S(N) of the off-diagonal double series.
    Theorem1 {
        #[arg(long)]
        n: u64,
        /// Exact rational evaluation.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        naive: bool,
    },
    /// E_100({nx}{6x}) for n = 1..12.
    Figure1,
    /// S(N) for N = 1..n-max.
    Figure2 {
        #[arg(long = "n-max", default_value_t = 100)]
        n_max: u64,
    },
    /// Mertens ratios, tail integrals and the classical-bound fit.
    Tails {
        #[arg(long, value_delimiter = ',', default_values_t = [1_000u64, 10_000, 100_000, 1_000_000])]
        cutoffs: Vec<u64>,
        #[arg(long, default_value_t = fraclab::tails::DEFAULT_BOUND_C)]
        c: f64,
    },
    /// Run the acceptance suite.
    Verify,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Mismatch(_) => 1,
        _ => 2,
    }
}

fn open_output(config: &RunConfig) -> Result<Box<dyn Write>, Error> {
    Ok(match &config.output_path {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|source| {
            Error::Io {
                path: path.clone(),
                source,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(args: Args) -> Result<bool, Error> {
    let config = RunConfig {
        sieve_limit: args.limit,
        cache_path: args.cache,
        output_path: args.out,
        precision_digits: args.digits,
        jordan_fast_path: !args.no_fast_path,
    };
    match args.command {
        Command::Sieve => {
            let table = config.load_table()?;
            cli::cmd_sieve(&config, &table, open_output(&config)?)?;
        }
        Command::Correlate {
            n,
            m,
            x_range,
            closed_form,
        } => cli::cmd_correlate(&config, n, m, x_range, closed_form, open_output(&config)?)?,
        Command::Lemma1 { n_max, x } => {
            config.require(n_max)?;
            let table = config.load_table()?;
            cli::cmd_lemma1(&config, &table, n_max, x, open_output(&config)?)?;
        }
        Command::Theorem1 { n, exact, naive } => {
            config.require(n)?;
            let table = config.load_table()?;
            cli::cmd_theorem1(&config, &table, n, exact, naive, open_output(&config)?)?;
        }
        Command::Figure1 => cli::cmd_figure1(&config, open_output(&config)?)?,
        Command::Figure2 { n_max } => {
            config.require(n_max)?;
            let table = config.load_table()?;
            cli::cmd_figure2(&config, &table, n_max, open_output(&config)?)?;
        }
        Command::Tails { cutoffs, c } => {
            if let Some(&max) = cutoffs.iter().max() {
                config.require(max)?;
            }
            let table = config.load_table()?;
            cli::cmd_tails(&config, &table, &cutoffs, c, open_output(&config)?)?;
        }
        Command::Verify => {
            let ctx = verify::Context::new(&config)?;
            let mut out = open_output(&config)?;
            let mut all = true;
            for id in 1..=verify::criterion_count() as u32 {
                let r = verify::run_criterion(&ctx, id);
                all &= r.passed;
                writeln!(out, "{r}").map_err(|source| Error::Io {
                    path: PathBuf::from("<output>"),
                    source,
                })?;
                if !r.passed {
                    log::error!("criterion {} failed: {}", r.id, r.title);
                }
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fraclab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
