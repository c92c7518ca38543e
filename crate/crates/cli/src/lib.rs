//! Library side of the `radial-kahler` command: configuration, dispatch and
//! report rendering. The binary only parses arguments and writes output.

pub mod config;
pub mod render;

use std::fmt;

use radial_kahler::curvature::{lu_coefficients, ricci_flat_check};
use radial_kahler::error::Error;
use radial_kahler::obstruction::{gh_eval, obstruction_scan};
use radial_kahler::reproduce::reproduce_paper;
use radial_kahler::resolvability::{minor_matrix, simanca_embedding_check};

pub use config::{Command, Format, Job, RunConfig};
use render::Report;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}

pub const EXIT_OK: i32 = 0;
/// A certified contradiction or a computation that failed.
pub const EXIT_FAILURE: i32 = 1;
/// Only undecided results.
pub const EXIT_INCONCLUSIVE: i32 = 2;
/// Invalid arguments or configuration.
pub const EXIT_USAGE: i32 = 64;

/// Environment variable read for the default of `--precision-bits`.
pub const PRECISION_ENV: &str = "RADIAL_KAHLER_PRECISION_BITS";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::Parse(_) | Error::Inadmissible { .. } => EXIT_USAGE,
            _ if e.is_precision_related() => EXIT_INCONCLUSIVE,
            _ => EXIT_FAILURE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Rendered output and the exit code it implies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

fn emit<R: Report>(report: &R, format: Format) -> Result<Outcome, CliError> {
    Ok(Outcome {
        text: render::render(report, format)?,
        exit_code: report.exit_code(),
    })
}

/// Validates `config` and runs it.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let job = config.validate()?;
    let precision = config.precision();
    let format = config.format;
    match job {
        Job::GhEval { fam, x, hmax } => emit(&gh_eval(&fam, &x, hmax, &precision)?, format),
        Job::Scan { fam, grid, hmax } => {
            emit(&obstruction_scan(&fam, &grid, hmax, &precision)?, format)
        }
        Job::LuCoeffs { fam, n, x } => emit(&lu_coefficients(&fam, n, &x, &precision)?, format),
        Job::Resolvability {
            fam,
            point,
            lmax,
            hmax,
        } => emit(&minor_matrix(&fam, &point, lmax, hmax, &precision)?, format),
        Job::EmbeddingCheck { max_degree } => emit(&simanca_embedding_check(max_degree)?, format),
        Job::RicciFlatCheck { fam, n, points } => {
            emit(&ricci_flat_check(&fam, n, &points, &precision)?, format)
        }
        Job::ReproducePaper { items, opts } => emit(&reproduce_paper(&items, &opts)?, format),
    }
}
