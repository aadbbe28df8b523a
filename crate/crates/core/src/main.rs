use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use finstoch::cli::{execute, AnalysisRequest, Command, Format, EXIT_CODES_HELP};

#[derive(Parser)]
#[command(name = "finstoch", version, about = "Invariant σ-algebras and ergodic decompositions of finite systems")]
#[command(after_help = EXIT_CODES_HELP)]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// System file (for `invert`, a kernel file).
    #[arg(long, global = true)]
    system: Option<PathBuf>,

    /// Measure file: a probability array or a state kernel.
    #[arg(long, global = true)]
    measure: Option<PathBuf>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,

    /// Seed for the random companions drawn by check-axioms.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Invariant σ-algebra and its cocone.
    InvSigma,
    /// Quotient cocone, invariant atoms and the orbit-space isomorphism.
    Quotient,
    /// Is the measure ergodic?
    CheckErgodic,
    /// Ergodic decomposition of an invariant measure.
    Decompose,
    /// List the ergodic states (single function or bijections).
    EnumerateErgodic,
    /// Run the law suite against the loaded objects.
    CheckAxioms,
    /// Bayesian inverse of a kernel with respect to a measure.
    Invert,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutFormat {
    Json,
    Dot,
    Text,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(system_path) = args.system else {
        eprintln!("error: --system is required");
        return ExitCode::from(finstoch::cli::EXIT_USAGE as u8);
    };
    let command = match args.command {
        Cmd::InvSigma => Command::InvSigma,
        Cmd::Quotient => Command::Quotient,
        Cmd::CheckErgodic => Command::CheckErgodic,
        Cmd::Decompose => Command::Decompose,
        Cmd::EnumerateErgodic => Command::EnumerateErgodic,
        Cmd::CheckAxioms => Command::CheckAxioms,
        Cmd::Invert => Command::Invert,
    };
    let format = match args.format {
        OutFormat::Json => Format::Json,
        OutFormat::Dot => Format::Dot,
        OutFormat::Text => Format::Text,
    };
    let req = AnalysisRequest {
        command,
        system_path,
        measure_path: args.measure,
        output: args.output,
        format,
        seed: args.seed,
    };
    ExitCode::from(execute(&req) as u8)
}
