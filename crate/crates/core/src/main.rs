use clap::{Parser, Subcommand};
use milac_core::experiments::{
    channels_path, emit_csv, format_summary, parse_csv, records_to_csv, run_sweep_with_channels,
    selftest, summarize, write_channels, write_plots, ScenarioConfig,
};
use milac_core::MilacError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Default worker count when `--threads` is not given.
const THREADS_ENV: &str = "MILAC_THREADS";

#[derive(Parser)]
#[command(
    name = "milac",
    version,
    about = "MiLAC-aided vs digital beamforming sum-rate sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep described by a scenario file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; overrides `output` in the file. Stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write SVG charts of the mean curves.
        #[arg(long)]
        plots: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides `seed` in the file.
        #[arg(long)]
        seed: Option<u64>,
        /// Exit with status 2 if any solver run hit its iteration cap or failed.
        #[arg(long)]
        strict: bool,
    },
    /// Per-point means, standard errors and MiLAC/digital ratios of a sweep CSV.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run the numerical kernel checks.
    Selftest,
}

enum Failure {
    Validation(MilacError),
    NotConverged(usize),
}

impl From<MilacError> for Failure {
    fn from(e: MilacError) -> Self {
        Failure::Validation(e)
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, MilacError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| MilacError::Config(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn run(
    config: PathBuf,
    out: Option<PathBuf>,
    plots: bool,
    threads: Option<usize>,
    seed: Option<u64>,
    strict: bool,
) -> Result<(), Failure> {
    let mut cfg = ScenarioConfig::from_file(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if out.is_some() {
        cfg.output = out;
    }
    cfg.strict |= strict;
    cfg.validate()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(threads)? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| MilacError::Config(format!("thread pool: {e}")))?;
    let (records, channels) = pool.install(|| run_sweep_with_channels(&cfg))?;

    let summary = summarize(&records);
    match &cfg.output {
        Some(path) => {
            emit_csv(&records, path)?;
            if cfg.export_channels {
                write_channels(&channels, &channels_path(path))?;
            }
            print!("{}", format_summary(&summary));
        }
        None => {
            print!("{}", records_to_csv(&records)?);
            eprint!("{}", format_summary(&summary));
        }
    }
    if plots {
        let prefix = cfg
            .output
            .as_ref()
            .map_or_else(|| PathBuf::from("milac_sweep"), |p| p.with_extension(""));
        for path in write_plots(&summary, &prefix)? {
            eprintln!("wrote {}", path.display());
        }
    }

    let bad = records.iter().filter(|r| !r.converged()).count();
    if bad > 0 {
        eprintln!(
            "warning: {bad} of {} solver runs did not converge",
            records.len()
        );
        if cfg.strict {
            return Err(Failure::NotConverged(bad));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            plots,
            threads,
            seed,
            strict,
        } => run(config, out, plots, threads, seed, strict),
        Command::Summarize { input } => std::fs::File::open(&input)
            .map_err(|e| MilacError::Io(format!("{}: {e}", input.display())))
            .and_then(parse_csv)
            .map(|recs| print!("{}", format_summary(&summarize(&recs))))
            .map_err(Failure::from),
        Command::Selftest => {
            let checks = selftest();
            for c in &checks {
                println!(
                    "{} {:<45} worst {:.3e} (bound {:.0e}, {:.0} ms)",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.bound,
                    c.millis
                );
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Validation(MilacError::InvalidArgument(format!(
                    "{failed} selftest checks failed"
                ))))
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::NotConverged(n)) => {
            eprintln!("error: {n} runs did not converge (strict mode)");
            ExitCode::from(2)
        }
    }
}
