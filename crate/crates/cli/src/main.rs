use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use radial_kahler::reproduce::DEFAULT_SEED;
use radial_kahler::scalar::DEFAULT_PRECISION_BITS;
use radial_kahler_cli::config::canonical_rational;
use radial_kahler_cli::{run, Command, Format, RunConfig, EXIT_FAILURE, EXIT_USAGE, PRECISION_ENV};

/// Obstructions, curvature invariants and TYZ coefficients of radial Kahler metrics.
#[derive(Parser)]
#[command(name = "radial-kahler", version)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Global {
    /// Working precision of big-float evaluation
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: u32,

    /// Require exact arithmetic; fail when a value needs big floats
    #[arg(long, global = true)]
    exact: bool,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Print the run configuration as JSON and exit
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Table,
}

/// Family descriptors: `epsilon:<eps>:<lambda>:<n>`, `flat[:<lambda>[:<n>]]`,
/// `simanca`, `eguchi-hanson`, `custom:<file.json>`.
#[derive(Subcommand)]
enum Cmd {
    /// Evaluate g_0, ..., g_hmax at one point
    GhEval {
        #[arg(long, allow_hyphen_values = true)]
        family: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        hmax: usize,
    },
    /// Search a grid for certified negative g_h
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        family: String,
        /// `a:b:steps`, giving steps + 1 points
        #[arg(long)]
        x_grid: String,
        #[arg(long)]
        hmax: usize,
    },
    /// TYZ coefficients a1, a2, a3 and every intermediate invariant
    LuCoeffs {
        #[arg(long, allow_hyphen_values = true)]
        family: String,
        /// Complex dimension; defaults to the natural one of the family
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        x: String,
        /// Jet order in x of the Laplacian terms (at least 4)
        #[arg(long)]
        jet_order: Option<usize>,
    },
    /// Leading principal minors of the diastasis coefficient matrix
    Resolvability {
        #[arg(long, allow_hyphen_values = true)]
        family: String,
        #[arg(long, conflicts_with = "x", required_unless_present = "x")]
        s: Option<String>,
        /// The point as x = s^2
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        lmax: usize,
        #[arg(long)]
        hmax: usize,
    },
    /// Coefficients of (a+b)e^(a+b) against (j+k)/(j!k!)
    EmbeddingCheck {
        #[arg(long, default_value_t = 10)]
        max_degree: usize,
    },
    /// Residual d/dx log det g and the Ricci tensor at sample points
    RicciFlatCheck {
        #[arg(long, allow_hyphen_values = true)]
        family: String,
        #[arg(long)]
        dim: Option<usize>,
        /// Comma-separated rationals or a grid `a:b:steps`
        #[arg(long)]
        x: String,
    },
    /// Regenerate every checkable number and compare with the expected values
    ReproducePaper {
        /// Run only these items (repeatable)
        #[arg(long = "item")]
        items: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Record wall-clock times, which makes the output differ between runs
        #[arg(long)]
        timings: bool,
    },
}

fn config(cli: Cli) -> RunConfig {
    let r = |t: String| canonical_rational(&t);
    let command = match cli.command {
        Cmd::GhEval { family, x, hmax } => Command::GhEval {
            family,
            x: r(x),
            hmax,
        },
        Cmd::Scan {
            family,
            x_grid,
            hmax,
        } => Command::Scan {
            family,
            x_grid,
            hmax,
        },
        Cmd::LuCoeffs {
            family,
            dim,
            x,
            jet_order,
        } => Command::LuCoeffs {
            family,
            dim,
            x: r(x),
            jet_order,
        },
        Cmd::Resolvability {
            family,
            s,
            x,
            lmax,
            hmax,
        } => Command::Resolvability {
            family,
            point: match (s, x) {
                (_, Some(x)) => format!("x={}", r(x)),
                (Some(s), None) => format!("s={}", r(s)),
                (None, None) => unreachable!("clap requires --s or --x"),
            },
            lmax,
            hmax,
        },
        Cmd::EmbeddingCheck { max_degree } => Command::EmbeddingCheck { max_degree },
        Cmd::RicciFlatCheck { family, dim, x } => Command::RicciFlatCheck { family, dim, x },
        Cmd::ReproducePaper {
            items,
            seed,
            timings,
        } => Command::ReproducePaper {
            items,
            seed,
            timings,
        },
    };
    RunConfig {
        command,
        precision_bits: cli.global.precision_bits,
        exact: cli.global.exact,
        format: match cli.global.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Table => Format::Table,
        },
        out: cli.global.out.map(|p| p.display().to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    let print_config = cli.global.print_config;
    let cfg = config(cli);
    if print_config {
        println!("{}", cfg.to_json());
        return ExitCode::SUCCESS;
    }
    match run(&cfg) {
        Ok(outcome) => {
            let written = match &cfg.out {
                Some(path) => std::fs::write(path, &outcome.text),
                None => {
                    print!("{}", outcome.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(EXIT_FAILURE as u8);
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
