//! Run configuration: what the command line asked for, in a form that
//! round-trips through JSON, and its validation into typed jobs.

use serde::{Deserialize, Serialize};

use radial_kahler::backend::{ExactMode, Precision};
use radial_kahler::obstruction::parse_grid;
use radial_kahler::potential::PotentialFamily;
use radial_kahler::reproduce::{ReproOptions, DEFAULT_SEED, ITEM_IDS};
use radial_kahler::resolvability::AxisPoint;
use radial_kahler::scalar::{
    format_rational, parse_rational, Rational, DEFAULT_PRECISION_BITS, PRECISION_CAP_BITS,
};

use crate::CliError;

/// Largest complex dimension the curvature engine expands in.
pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    GhEval {
        family: String,
        x: String,
        hmax: usize,
    },
    Scan {
        family: String,
        x_grid: String,
        hmax: usize,
    },
    LuCoeffs {
        family: String,
        dim: Option<usize>,
        x: String,
        jet_order: Option<usize>,
    },
    Resolvability {
        family: String,
        /// `s=p/q` or `x=p/q`.
        point: String,
        lmax: usize,
        hmax: usize,
    },
    EmbeddingCheck {
        max_degree: usize,
    },
    RicciFlatCheck {
        family: String,
        dim: Option<usize>,
        /// Comma-separated rationals or a grid `a:b:steps`.
        x: String,
    },
    ReproducePaper {
        items: Vec<String>,
        seed: u64,
        timings: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub precision_bits: u32,
    pub exact: bool,
    pub format: Format,
    pub out: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            precision_bits: DEFAULT_PRECISION_BITS,
            exact: false,
            format: Format::Json,
            out: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))
    }

    pub fn precision(&self) -> Precision {
        Precision {
            bits: self.precision_bits,
            cap_bits: self.precision_bits.max(PRECISION_CAP_BITS),
            exact: if self.exact {
                ExactMode::Force
            } else {
                ExactMode::Auto
            },
        }
    }

    /// Parses every parameter and checks admissibility, so that no
    /// computation starts on an inconsistent configuration.
    pub fn validate(&self) -> Result<Job, CliError> {
        if !(16..=PRECISION_CAP_BITS).contains(&self.precision_bits) {
            return Err(CliError::usage(format!(
                "--precision-bits must lie in 16..={PRECISION_CAP_BITS}, got {}",
                self.precision_bits
            )));
        }
        let job = match &self.command {
            Command::GhEval { family, x, hmax } => {
                let fam = family_arg(family)?;
                let x = rational_arg("--x", x)?;
                admissible(&fam, &x)?;
                Job::GhEval {
                    fam,
                    x,
                    hmax: *hmax,
                }
            }
            Command::Scan {
                family,
                x_grid,
                hmax,
            } => {
                let fam = family_arg(family)?;
                let grid =
                    parse_grid(x_grid).map_err(|e| CliError::usage(format!("--x-grid: {e}")))?;
                for x in &grid {
                    admissible(&fam, x)?;
                }
                Job::Scan {
                    fam,
                    grid,
                    hmax: *hmax,
                }
            }
            Command::LuCoeffs {
                family,
                dim,
                x,
                jet_order,
            } => {
                let fam = family_arg(family)?;
                let n = dim_arg(&fam, *dim)?;
                let x = rational_arg("--x", x)?;
                admissible(&fam, &x)?;
                let needed = radial_kahler::curvature::LAPLACIAN_JET_ORDER;
                if let Some(k) = jet_order {
                    if *k < needed {
                        return Err(CliError::usage(format!(
                            "--jet-order {k} is too small: the Laplacian terms need {needed}"
                        )));
                    }
                }
                Job::LuCoeffs { fam, n, x }
            }
            Command::Resolvability {
                family,
                point,
                lmax,
                hmax,
            } => {
                let fam = family_arg(family)?;
                let point =
                    AxisPoint::parse(point).map_err(|e| CliError::usage(format!("point: {e}")))?;
                if point.x().cmp0().is_le() {
                    return Err(CliError::usage("the point must be nonzero"));
                }
                admissible(&fam, &point.x())?;
                Job::Resolvability {
                    fam,
                    point,
                    lmax: *lmax,
                    hmax: *hmax,
                }
            }
            Command::EmbeddingCheck { max_degree } => {
                if *max_degree == 0 {
                    return Err(CliError::usage("--max-degree must be at least 1"));
                }
                Job::EmbeddingCheck {
                    max_degree: *max_degree,
                }
            }
            Command::RicciFlatCheck { family, dim, x } => {
                let fam = family_arg(family)?;
                let n = dim_arg(&fam, *dim)?;
                let points = points_arg(x)?;
                for p in &points {
                    admissible(&fam, p)?;
                }
                Job::RicciFlatCheck { fam, n, points }
            }
            Command::ReproducePaper {
                items,
                seed,
                timings,
            } => {
                if let Some(bad) = items.iter().find(|i| !ITEM_IDS.contains(&i.as_str())) {
                    return Err(CliError::usage(format!(
                        "unknown item `{bad}`; known items: {}",
                        ITEM_IDS.join(", ")
                    )));
                }
                Job::ReproducePaper {
                    items: items.clone(),
                    opts: ReproOptions {
                        precision: self.precision(),
                        seed: *seed,
                        timings: *timings,
                    },
                }
            }
        };
        Ok(job)
    }
}

impl Default for Command {
    fn default() -> Self {
        Command::ReproducePaper {
            items: Vec::new(),
            seed: DEFAULT_SEED,
            timings: false,
        }
    }
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub enum Job {
    GhEval {
        fam: PotentialFamily,
        x: Rational,
        hmax: usize,
    },
    Scan {
        fam: PotentialFamily,
        grid: Vec<Rational>,
        hmax: usize,
    },
    LuCoeffs {
        fam: PotentialFamily,
        n: usize,
        x: Rational,
    },
    Resolvability {
        fam: PotentialFamily,
        point: AxisPoint,
        lmax: usize,
        hmax: usize,
    },
    EmbeddingCheck {
        max_degree: usize,
    },
    RicciFlatCheck {
        fam: PotentialFamily,
        n: usize,
        points: Vec<Rational>,
    },
    ReproducePaper {
        items: Vec<String>,
        opts: ReproOptions,
    },
}

/// Canonical `p/q` form of a rational argument.
pub fn canonical_rational(text: &str) -> String {
    parse_rational(text)
        .map(|q| format_rational(&q))
        .unwrap_or_else(|_| text.to_string())
}

fn family_arg(text: &str) -> Result<PotentialFamily, CliError> {
    PotentialFamily::from_descriptor(text).map_err(|e| CliError::usage(format!("--family: {e}")))
}

fn rational_arg(flag: &str, text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::usage(format!("{flag}: {e}")))
}

fn admissible(fam: &PotentialFamily, x: &Rational) -> Result<(), CliError> {
    fam.check_admissible(x)
        .map_err(|e| CliError::usage(e.to_string()))
}

fn dim_arg(fam: &PotentialFamily, dim: Option<usize>) -> Result<usize, CliError> {
    let n = dim.unwrap_or(fam.natural_dim() as usize);
    if !(1..=MAX_DIM).contains(&n) {
        return Err(CliError::usage(format!(
            "--dim must lie in 1..={MAX_DIM}, got {n}"
        )));
    }
    Ok(n)
}

fn points_arg(text: &str) -> Result<Vec<Rational>, CliError> {
    if text.contains(':') {
        return parse_grid(text).map_err(|e| CliError::usage(format!("--x: {e}")));
    }
    text.split(',').map(|t| rational_arg("--x", t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_json() {
        let mut c = RunConfig::new(Command::LuCoeffs {
            family: "simanca".into(),
            dim: Some(2),
            x: "1/1".into(),
            jet_order: None,
        });
        c.format = Format::Csv;
        c.out = Some("lu.csv".into());
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
        let d = RunConfig::new(Command::default());
        assert_eq!(RunConfig::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn rejects_points_outside_the_domain() {
        let c = RunConfig::new(Command::GhEval {
            family: "epsilon:-1:1:2".into(),
            x: "1".into(),
            hmax: 3,
        });
        let err = c.validate().unwrap_err();
        assert_eq!(err.code, crate::EXIT_USAGE);
        assert!(err.message.contains("x > 1"), "{}", err.message);
    }

    #[test]
    fn point_lists_and_grids() {
        assert_eq!(points_arg("1/2,2").unwrap().len(), 2);
        assert_eq!(points_arg("1:2:4").unwrap().len(), 5);
        assert!(points_arg("1/0").is_err());
    }
}
