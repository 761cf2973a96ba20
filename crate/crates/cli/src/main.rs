mod commands;
mod report;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use qdilate::frameorbit::SchemeKind;
use sha2::{Digest, Sha256};

use commands::Failure;
use report::{ms, ErrorInfo, RunReport, EXIT_PARSE};

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "qdilate", version, about = "Dilations of quantum channels and instruments, with residual checks")]
struct Cli {
    /// Tolerance applied to every verification residual.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampling and randomized oracles; always echoed in the report.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Minimal,
    Nonminimal,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal Stinespring dilation of a CP map (Kraus or Choi JSON; `-` reads stdin).
    DilateMap { input: PathBuf },
    /// Minimal dilation of an instrument.
    DilateInstrument { input: PathBuf },
    /// Teleportation scheme for a frame-orbit instrument.
    Teleport {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Nonminimal)]
        kind: Kind,
        /// Also build the other scheme and compare the two.
        #[arg(long)]
        cross: bool,
    },
    /// Built-in examples.
    Example {
        #[command(subcommand)]
        which: Example,
    },
    /// Sample outcomes of an instrument on a state.
    Sample {
        instrument: PathBuf,
        /// Density matrix, or a column vector for a pure state.
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Example {
    /// Ideal teleportation with the Weyl-Heisenberg frame.
    Teleport {
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Optimal universal N -> M cloning as a tele-channel.
    Clone {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
        #[arg(long = "M", default_value_t = 2)]
        m: usize,
    },
    /// Universal NOT on N qubit copies.
    Unot {
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
    },
}

fn read_input(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).map_err(|e| Failure::Parse(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|e| Failure::Parse(format!("reading {}: {e}", path.display())))
    }
}

fn load(path: &PathBuf, digest: &mut Sha256) -> Result<serde_json::Value, Failure> {
    let bytes = read_input(path)?;
    digest.update(&bytes);
    let text = String::from_utf8(bytes).map_err(|_| Failure::Parse(format!("{} is not UTF-8", path.display())))?;
    commands::parse_json(&text)
}

fn run(cli: &Cli, report: &mut RunReport) -> Result<(), Failure> {
    let mut digest = Sha256::new();
    match &cli.command {
        Command::DilateMap { input } => {
            let v = load(input, &mut digest)?;
            set_digest(report, &digest);
            commands::dilate_map(&v, report)?;
        }
        Command::DilateInstrument { input } => {
            let v = load(input, &mut digest)?;
            set_digest(report, &digest);
            commands::dilate_instrument(&v, report)?;
        }
        Command::Teleport { input, kind, cross } => {
            let v = load(input, &mut digest)?;
            set_digest(report, &digest);
            let kind = match kind {
                Kind::Minimal => SchemeKind::Minimal,
                Kind::Nonminimal => SchemeKind::Nonminimal,
            };
            commands::teleport(&v, kind, *cross, report)?;
        }
        Command::Example { which } => match which {
            Example::Teleport { d } => commands::example_teleport(*d, report)?,
            Example::Clone { d, n, m } => commands::example_clone(*d, *n, *m, report)?,
            Example::Unot { n } => commands::example_unot(*n, report)?,
        },
        Command::Sample { instrument, state, n } => {
            let iv = load(instrument, &mut digest)?;
            let sv = load(state, &mut digest)?;
            set_digest(report, &digest);
            commands::sample(&iv, &sv, *n, report)?;
        }
    }
    Ok(())
}

fn set_digest(report: &mut RunReport, digest: &Sha256) {
    report.input_digest = Some(hex::encode(digest.clone().finalize()));
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let start = Instant::now();
    let mut report = RunReport::new(args, cli.seed, cli.tol);
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        report.error = Some(ErrorInfo { kind: "parse", message: format!("--tol must be positive, got {}", cli.tol) });
    } else if let Err(f) = run(&cli, &mut report) {
        let (kind, message) = match f {
            Failure::Parse(m) => ("parse", m),
            Failure::Precondition(m) => ("precondition", m),
        };
        eprintln!("qdilate: {kind} error: {message}");
        report.error = Some(ErrorInfo { kind, message });
    }
    report.timings.total_ms = ms(start.elapsed());
    report.finish();

    let mut out = std::io::stdout().lock();
    let _ = match cli.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes")),
        Format::Text => write!(out, "{}", report.render_text()),
    };
    ExitCode::from(report.exit_code() as u8)
}
