use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ltbt_core::synthesis::SpectroscopyConfig;
use ltbt_core::Price;
use ltbt_spectroscope::dump::{render, DumpFormat};
use ltbt_spectroscope::report::compare;
use ltbt_spectroscope::verify::verify;
use ltbt_spectroscope::{load_file, parse_price, Error};

/// Exit code when the processes are told apart in some direction.
const DISTINGUISHED: u8 = 10;
const MISMATCH: u8 = 1;
const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "spectroscope",
    version,
    about = "Compare processes across the linear-time--branching-time spectrum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Processes {
    /// File of process definitions, one `Name = term` per line.
    file: PathBuf,
    /// Left-hand process.
    lhs: String,
    /// Right-hand process.
    rhs: String,
}

#[derive(Args)]
struct Engine {
    /// Safety cap on formula prices, six components, each a number or `inf`.
    /// Defaults to twice the strategy-graph size on every dimension.
    #[arg(long, env = "SPECTRO_CAP", value_parser = price_arg)]
    cap: Option<Price>,
    /// Also report 3-nested simulation.
    #[arg(long)]
    with_s3: bool,
}

impl Engine {
    fn config(&self) -> SpectroscopyConfig {
        SpectroscopyConfig {
            cap: self.cap,
            with_s3: self.with_s3,
            ..SpectroscopyConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Cheapest distinguishing formulas and verdicts for both directions.
    /// Exits with 0 if the processes are bisimilar, 10 otherwise.
    Compare {
        #[command(flatten)]
        processes: Processes,
        #[command(flatten)]
        engine: Engine,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Print nothing; only the exit code tells the outcome.
        #[arg(long)]
        quiet: bool,
    },
    /// The reachable spectroscopy game with its winning regions.
    GameDump {
        #[command(flatten)]
        processes: Processes,
        #[command(flatten)]
        engine: Engine,
        #[arg(long, value_enum, default_value = "dot")]
        dump: DumpFormat,
        /// Add the formulas computed for each position.
        #[arg(long)]
        annotate: bool,
    },
    /// Compare the fronts against the brute-force oracle at a finite cap.
    /// Exits with 0 on a match, 1 on a mismatch.
    Verify {
        #[command(flatten)]
        processes: Processes,
        #[arg(long, default_value = "3,2,2,2,2,2", value_parser = price_arg)]
        cap: Price,
        #[arg(long)]
        quiet: bool,
    },
}

fn price_arg(s: &str) -> Result<Price, String> {
    parse_price(s).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Compare {
            processes,
            engine,
            format,
            quiet,
        } => {
            let loaded = load_file(&processes.file, &processes.lhs, &processes.rhs)?;
            let (_, report) = compare(&loaded, engine.config());
            if !quiet {
                match format {
                    Format::Text => print!("{}", report.to_text()),
                    Format::Json => println!("{}", report.to_json()),
                }
            }
            Ok(if report.bisimilar { 0 } else { DISTINGUISHED })
        }
        Command::GameDump {
            processes,
            engine,
            dump,
            annotate,
        } => {
            let loaded = load_file(&processes.file, &processes.lhs, &processes.rhs)?;
            let (s, _) = compare(&loaded, engine.config());
            print!("{}", render(dump, &loaded.lts, &s, annotate));
            Ok(0)
        }
        Command::Verify { processes, cap, quiet } => {
            let loaded = load_file(&processes.file, &processes.lhs, &processes.rhs)?;
            let v = verify(&loaded, cap, SpectroscopyConfig::default())?;
            if !quiet {
                print!("{}", v.to_text());
            }
            Ok(if v.matches() { 0 } else { MISMATCH })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
