//! Command line surface. Every subcommand reads JSON documents, emits a
//! report in text or structured form, and exits 0 on success / all-pass,
//! 1 on verification failure, 2 on input errors and 3 on internal
//! inconsistencies.

use clap::{Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::admissible::Coefficients;
use crate::error::{Error, Result};
use crate::io::{
    self, multiplier_set_from_sections, MonoidSection, MultipliersSection, NetworkDocument,
    QuotientEntry, ReportDocument, SpectraSection,
};
use crate::multiplier::{multipliers, MultiplierSet};
use crate::network::{
    circulant_network, completion, enumerate_balanced_partitions, fundamental_network, quotient,
    Completion, Network,
};
use crate::spectral::{circulant_multipliers, multiplicities, predicted_spectrum, verify_network};

/// Environment variable consulted when `--seed` is not given.
pub const SEED_ENV_VAR: &str = "NETMULT_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "netmult",
    version,
    about = "Network multipliers for homogeneous coupled-cell networks",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to a file instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Complete a network: add the arrows generated under composition and
    /// emit the monoid table
    Complete { net: PathBuf },
    /// Emit the fundamental network of a network's monoid
    Fundamental { net: PathBuf },
    /// Run the full reduction pipeline and emit the multiplier report
    Multipliers {
        net: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve the integer multiplicities of a constructible network
    Multiplicities {
        net: PathBuf,
        /// Multiplier report produced by `multipliers` or `circulant`
        #[arg(long)]
        multipliers: PathBuf,
    },
    /// Predict the spectrum of the admissible map for given coefficients
    Spectrum {
        net: PathBuf,
        /// Coefficient document (block per arrow label)
        #[arg(long)]
        coeffs: PathBuf,
        /// Multiplier report; computed from the network's completion if absent
        #[arg(long)]
        multipliers: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Oracle campaign: compare predicted spectra against the dense
    /// eigensolver on random coefficient draws
    Verify {
        net: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Comma-separated node phase-space dimensions
        #[arg(long = "block-dims", default_value = "1,2", value_parser = parse_dims)]
        block_dims: BlockDims,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Multiplier report; computed from the network's completion if absent
        #[arg(long)]
        multipliers: Option<PathBuf>,
    },
    /// Enumerate balanced partitions and their quotient networks
    Quotients {
        net: PathBuf,
        #[arg(long = "max-nodes", default_value_t = 12)]
        max_nodes: usize,
    },
    /// Emit the ring network on n nodes and its closed-form multipliers
    Circulant {
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

#[derive(Debug, Clone)]
struct BlockDims(Vec<usize>);

fn parse_dims(s: &str) -> std::result::Result<BlockDims, String> {
    let dims: std::result::Result<Vec<usize>, _> =
        s.split(',').map(|part| part.trim().parse::<usize>()).collect();
    match dims {
        Ok(d) if !d.is_empty() && d.iter().all(|&x| x >= 1) => Ok(BlockDims(d)),
        _ => Err(format!("`{s}` is not a comma-separated list of positive integers")),
    }
}

/// Runs the command line interface on the given arguments and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("netmult: {e}");
            e.exit_code()
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("{SEED_ENV_VAR} must be an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn read_network(path: &Path) -> Result<Network> {
    io::parse_network(&std::fs::read_to_string(path)?)
}

fn read_multiplier_report(path: &Path) -> Result<MultiplierSet> {
    let report = io::parse_report(&std::fs::read_to_string(path)?)?;
    let monoid = report
        .monoid
        .ok_or_else(|| Error::Parse("multiplier report lacks a monoid section".into()))?;
    let mult = report
        .multipliers
        .ok_or_else(|| Error::Parse("multiplier report lacks a multipliers section".into()))?;
    multiplier_set_from_sections(&monoid, &mult)
}

fn emit(cli: &Cli, report: &ReportDocument) -> Result<()> {
    let rendered = match cli.format {
        Format::Text => io::render_text(report),
        Format::Structured => io::serialize_report(report)?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Complete { net } => {
            let network = read_network(net)?;
            let Completion {
                network, monoid, ..
            } = completion(&network)?;
            let report = ReportDocument {
                network: Some(NetworkDocument::from_network(&network, true)),
                monoid: Some(MonoidSection::from_monoid(&monoid)),
                ..Default::default()
            };
            emit(cli, &report)?;
            Ok(0)
        }
        Command::Fundamental { net } => {
            let network = read_network(net)?;
            let Completion { monoid, .. } = completion(&network)?;
            let fundamental = fundamental_network(&monoid);
            match cli.format {
                Format::Structured => {
                    // a plain network document, directly reusable as input
                    let rendered = io::serialize_network(&fundamental, true)?;
                    match &cli.output {
                        Some(path) => std::fs::write(path, rendered)?,
                        None => print!("{rendered}"),
                    }
                }
                Format::Text => {
                    let report = ReportDocument {
                        network: Some(NetworkDocument::from_network(&fundamental, true)),
                        ..Default::default()
                    };
                    emit(cli, &report)?;
                }
            }
            Ok(0)
        }
        Command::Multipliers { net, seed } => {
            let seed = resolve_seed(*seed)?;
            let network = read_network(net)?;
            let Completion { monoid, .. } = completion(&network)?;
            let ms = multipliers(&monoid, seed)?;
            let report = ReportDocument {
                monoid: Some(MonoidSection::from_monoid(&monoid)),
                multipliers: Some(MultipliersSection::from_multiplier_set(&ms)),
                ..Default::default()
            };
            emit(cli, &report)?;
            Ok(0)
        }
        Command::Multiplicities {
            net,
            multipliers: mult_path,
        } => {
            let network = read_network(net)?;
            let ms = read_multiplier_report(mult_path)?;
            let mult = multiplicities(&network, &ms)?;
            let report = ReportDocument {
                multiplicities: Some(mult.as_slice().iter().map(|&m| m as u64).collect()),
                ..Default::default()
            };
            emit(cli, &report)?;
            Ok(0)
        }
        Command::Spectrum {
            net,
            coeffs,
            multipliers: mult_path,
            seed,
        } => {
            let network = read_network(net)?;
            let coefficients = io::parse_coefficients(&std::fs::read_to_string(coeffs)?)?;
            let (target, ms, aligned): (Network, MultiplierSet, Coefficients) = match mult_path {
                Some(path) => {
                    let ms = read_multiplier_report(path)?;
                    (network, ms, coefficients)
                }
                None => {
                    let seed = resolve_seed(*seed)?;
                    let comp = completion(&network)?;
                    let ms = multipliers(&comp.monoid, seed)?;
                    let aligned = coefficients.align_to_monoid(&comp.aliases, &comp.monoid)?;
                    (comp.network, ms, aligned)
                }
            };
            let mult = multiplicities(&target, &ms)?;
            let spectrum = predicted_spectrum(&target, &ms, &aligned)?;
            let report = ReportDocument {
                multiplicities: Some(mult.as_slice().iter().map(|&m| m as u64).collect()),
                spectra: Some(SpectraSection {
                    predicted: io::complex_to_pairs(&spectrum),
                    oracle: None,
                    max_distance: None,
                }),
                ..Default::default()
            };
            emit(cli, &report)?;
            Ok(0)
        }
        Command::Verify {
            net,
            trials,
            block_dims,
            seed,
            tol,
            multipliers: mult_path,
        } => {
            let seed = resolve_seed(*seed)?;
            let network = read_network(net)?;
            let (target, ms) = match mult_path {
                Some(path) => (network, read_multiplier_report(path)?),
                None => {
                    let comp = completion(&network)?;
                    (comp.network, multipliers(&comp.monoid, seed)?)
                }
            };
            let outcome = verify_network(&target, &ms, *trials, &block_dims.0, seed, *tol)?;
            let worst = outcome.worst_report();
            let report = ReportDocument {
                multiplicities: Some(
                    outcome
                        .multiplicities
                        .as_slice()
                        .iter()
                        .map(|&m| m as u64)
                        .collect(),
                ),
                spectra: worst.map(|r| SpectraSection {
                    predicted: io::complex_to_pairs(&r.predicted),
                    oracle: Some(io::complex_to_pairs(&r.oracle)),
                    max_distance: Some(r.max_match_distance),
                }),
                checks: Some(outcome.checks.iter().map(Into::into).collect()),
                ..Default::default()
            };
            emit(cli, &report)?;
            Ok(if outcome.all_pass() { 0 } else { 1 })
        }
        Command::Quotients { net, max_nodes } => {
            let network = read_network(net)?;
            let parts = enumerate_balanced_partitions(&network, *max_nodes)?;
            let mut entries = Vec::with_capacity(parts.len());
            for part in &parts {
                let (qnet, _) = quotient(&network, part)?;
                entries.push(QuotientEntry {
                    partition: io::partition_to_classes(part),
                    network: NetworkDocument::from_network(&qnet, false),
                });
            }
            let report = ReportDocument {
                quotients: Some(entries),
                ..Default::default()
            };
            emit(cli, &report)?;
            Ok(0)
        }
        Command::Circulant { n } => {
            let n = *n as usize;
            let network = circulant_network(n);
            let ms = circulant_multipliers(n)?;
            let report = ReportDocument {
                network: Some(NetworkDocument::from_network(&network, true)),
                monoid: Some(MonoidSection::from_monoid(ms.monoid())),
                multipliers: Some(MultipliersSection::from_multiplier_set(&ms)),
                ..Default::default()
            };
            emit(cli, &report)?;
            Ok(0)
        }
    }
}
