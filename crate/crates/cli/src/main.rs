use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nc_core::cli::{dispatch, parse_failure, parse_input, Command, Outcome, VerifyKind, EXIT_USAGE};

/// Noether-Cremona transformations of hypersurfaces with diagonal group actions.
#[derive(Parser)]
#[command(name = "nc", version)]
struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Group order and the Hermite basis of the invariant lattice at the chart.
    Invariants { input: Option<PathBuf> },
    /// One transformation step with the given basis (Hermite basis if none).
    Transform {
        input: Option<PathBuf>,
        /// Pick the basis by beam search instead.
        #[arg(long)]
        search: bool,
    },
    /// The first step followed by every `step` line.
    Chain { input: Option<PathBuf> },
    /// Beam search for a basis of low output degree.
    SearchBasis { input: Option<PathBuf> },
    /// Finite-field and symbolic checks.
    Verify {
        #[command(subcommand)]
        kind: VerifyCmd,
    },
    /// Run one registered scenario, or all of them.
    Reproduce { scenario: Option<String> },
    /// Registered scenarios with one-line summaries.
    ListScenarios,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Singular points of the first polynomial over each prime.
    Smooth { input: Option<PathBuf> },
    /// Fiber-size histogram of the map over each prime.
    MapDegree { input: Option<PathBuf> },
    /// Whether the first polynomial vanishes on the image of the map.
    Identity { input: Option<PathBuf> },
}

fn read_input(path: Option<&PathBuf>) -> Result<String, String> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
            Ok(s)
        }
    }
}

fn emit(out: &Outcome, json: bool) -> ExitCode {
    if json {
        println!("{:#}", out.json);
    } else if out.status == EXIT_USAGE {
        eprint!("{}", out.text);
    } else {
        print!("{}", out.text);
    }
    ExitCode::from(out.status as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, input) = match cli.command {
        Cmd::Invariants { input } => (Command::Invariants, input),
        Cmd::Transform { input, search } => (Command::Transform { search }, input),
        Cmd::Chain { input } => (Command::Chain, input),
        Cmd::SearchBasis { input } => (Command::SearchBasis, input),
        Cmd::Verify { kind: VerifyCmd::Smooth { input } } => (Command::Verify(VerifyKind::Smooth), input),
        Cmd::Verify { kind: VerifyCmd::MapDegree { input } } => (Command::Verify(VerifyKind::MapDegree), input),
        Cmd::Verify { kind: VerifyCmd::Identity { input } } => (Command::Verify(VerifyKind::Identity), input),
        Cmd::Reproduce { scenario } => (Command::Reproduce(scenario), None),
        Cmd::ListScenarios => (Command::ListScenarios, None),
    };
    if !command.needs_spec() {
        return emit(&dispatch(&command, None), cli.json);
    }
    let text = match read_input(input.as_ref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match parse_input(&text) {
        Ok(spec) => emit(&dispatch(&command, Some(&spec)), cli.json),
        Err(e) => {
            let source = input.as_ref().map_or("<stdin>".to_string(), |p| p.display().to_string());
            emit(&parse_failure(&command, &source, &e), cli.json)
        }
    }
}
