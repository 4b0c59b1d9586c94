use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use noise_recycling::harness::{emit_results, Experiment, ExperimentConfig, Snapshot};
use noise_recycling::rate_region::{region_table, write_csv};
use noise_recycling::{selftest, Error};

#[derive(Debug, Parser)]
#[command(name = "noise-recycling", version, about = "Noise recycling BLER experiments and rate regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a BLER experiment described by a TOML config.
    Bler {
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the trial count per Eb/N0 point.
        #[arg(long)]
        trials: Option<u64>,
        /// Output directory; defaults to the config's `output`, then `results`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Tabulate achievable rates over a grid.
    RateRegion {
        /// SNR grid in dB.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-10,-5,0,5,10,15,20")]
        snr_db: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0,0.2,0.4,0.6,0.8,0.9")]
        rho: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        m: Vec<u64>,
        /// CSV file to write; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

/// Failures before any work starts exit with 1, later ones with 2.
enum Failure {
    Config(Error),
    Runtime(Error),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Bler {
            config,
            seed,
            trials,
            out,
            threads,
        } => bler(config, seed, trials, out, threads),
        Command::RateRegion { snr_db, rho, m, out } => rate_region(&snr_db, &rho, &m, out),
        Command::Selftest => return selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn bler(
    path: PathBuf,
    seed: Option<u64>,
    trials: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
) -> Result<(), Failure> {
    let mut config = ExperimentConfig::load(&path).map_err(Failure::Config)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(t) = trials {
        config.trials = t;
    }
    let dir = out.or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("results"));
    let experiment = Experiment::new(config).map_err(|e| match e {
        Error::Io { .. } => Failure::Runtime(e),
        other => Failure::Config(other),
    })?;
    let report = experiment.run(threads).map_err(Failure::Runtime)?;
    let snapshot = Snapshot::new(experiment.config(), experiment.codes(), &report.summaries);
    let csv = emit_results(&report.points, &dir, Some(&snapshot)).map_err(Failure::Runtime)?;
    eprintln!("wrote {}", csv.display());
    Ok(())
}

fn rate_region(snr_db: &[f64], rho: &[f64], m: &[u64], out: Option<PathBuf>) -> Result<(), Failure> {
    let table = region_table(snr_db, rho, m).map_err(Failure::Config)?;
    let io_err = |path: PathBuf| move |source| Failure::Runtime(Error::Io { path, source });
    match out {
        Some(path) => {
            let file = std::fs::File::create(&path).map_err(io_err(path.clone()))?;
            write_csv(&table, io::BufWriter::new(file)).map_err(io_err(path))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_csv(&table, &mut lock)
                .and_then(|_| lock.flush())
                .map_err(io_err(PathBuf::from("<stdout>")))
        }
    }
}

fn selftest() -> ExitCode {
    let results = selftest::run_all();
    for r in &results {
        match &r.error {
            None => println!("ok    {}", r.name),
            Some(e) => println!("FAIL  {}: {e}", r.name),
        }
    }
    if results.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
