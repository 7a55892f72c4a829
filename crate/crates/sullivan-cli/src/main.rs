//! Command-line front end for the Sullivan-model engine.
//!
//! Exit codes keep mathematics and environment apart: 0 means every check
//! passed, 2 means a mathematical check failed, 1 means an environmental
//! fault (unreadable file, malformed input, bad flags). Set
//! `RAYON_NUM_THREADS` to bound the verification worker count.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use sullivan::pipeline::{self, CommandOutput, PipelineError, ReportFormat};

#[derive(Parser)]
#[command(
    name = "sullivan",
    about = "Bigraded Sullivan models, their self-equivalences, and group abelianization",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> ReportFormat {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Args)]
struct FormatArg {
    /// Report format printed to stdout.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Model operations.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Construct and certify a self-homotopy-equivalence of the
    /// circle-adjoined model.
    Selfeq {
        /// Model JSON produced by `model build`.
        model: PathBuf,
        /// Where to write the morphism JSON.
        #[arg(long, default_value = "phi.json")]
        out: PathBuf,
        /// Also write the inverse morphism to this path.
        #[arg(long, value_name = "PATH")]
        emit_inverse: Option<PathBuf>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Group-presentation operations.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Build the wedge model, certify the self-equivalence, and check the
    /// bundled group presentations in one run, writing all artifacts.
    Reproduce {
        /// Top degree of the computation window.
        #[arg(long, default_value_t = 12)]
        cap: u32,
        /// Directory for model.json, phi.json, psi.json, and report.json.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        format: FormatArg,
    },
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Build the bigraded model for a cohomology spec and verify it.
    Build {
        /// Built-in spec name ("wedge-s2-s3-s3") or a JSON spec file.
        #[arg(long, default_value = pipeline::WEDGE_SPEC_NAME)]
        spec: String,
        /// Top degree of the computation window.
        #[arg(long, default_value_t = 12)]
        cap: u32,
        /// Where to write the model JSON.
        #[arg(long, default_value = "model.json")]
        out: PathBuf,
        #[command(flatten)]
        format: FormatArg,
    },
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Parse a presentation file and report its abelianization.
    Abelianize {
        /// Presentation file (.grp format).
        file: PathBuf,
        /// Gate the result: "rank=R,torsion=a,b,c", either part optional.
        #[arg(long)]
        expect: Option<String>,
        #[command(flatten)]
        format: FormatArg,
    },
}

fn run(cli: Cli) -> Result<CommandOutput, PipelineError> {
    match cli.command {
        Command::Model(ModelCommand::Build {
            spec,
            cap,
            out,
            format,
        }) => pipeline::model_build(&spec, cap, &out, format.format.into()),
        Command::Selfeq {
            model,
            out,
            emit_inverse,
            format,
        } => pipeline::selfeq(&model, &out, emit_inverse.as_deref(), format.format.into()),
        Command::Group(GroupCommand::Abelianize {
            file,
            expect,
            format,
        }) => {
            let expectation = expect
                .as_deref()
                .map(pipeline::parse_expectation)
                .transpose()?;
            pipeline::group_abelianize(&file, expectation.as_ref(), format.format.into())
        }
        Command::Reproduce { cap, out, format } => {
            pipeline::reproduce(cap, &out, format.format.into())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            print!("{}", output.text);
            if output.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(1)
        }
    }
}
