//! Command-line front end for `matdist-core`.
//!
//! Every subcommand reads JSON function documents and writes a single JSON
//! report wrapped in a [`ReportEnvelope`]. Reports are deterministic: equal
//! inputs, flags and seed give byte-identical output. Errors go to stderr as
//! `{"error": {...}}` and nothing is written to the output.

pub mod commands;
pub mod document;
pub mod error;

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use matdist_core::DEFAULT_BUDGET;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use commands::Mode;
pub use document::{parse, FunctionDocument, Loaded};
pub use error::{CliError, ErrorKind};

#[derive(Debug, Parser)]
#[command(
    name = "matdist",
    version,
    about = "Classify finite functions of several variables by their random matrices"
)]
pub struct Cli {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge duplicate rows and columns; report the pure factor and projections.
    Purify {
        /// Function document, or `-` for stdin.
        input: String,
    },
    /// Print the canonical form (complete isomorphism invariant).
    Canonical { input: String },
    /// Decide whether two functions are isomorphic.
    Iso {
        f: String,
        g: String,
        #[arg(long, value_enum, default_value_t = Mode::Canonical)]
        mode: Mode,
        /// Corner size in corners mode [default: largest side + 1].
        #[arg(long)]
        k: Option<usize>,
        /// Maximum number of enumerated atom tuples.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Exact distribution of the k × k corner (k × … × k for tensors).
    Matdist {
        input: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Sample an N × N realization (N × … × N for tensors).
    Sample {
        input: String,
        #[arg(long = "N", default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of sampled cells.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Sample, reconstruct from row and column prefixes, and compare with the source.
    Reconstruct {
        input: String,
        #[arg(long = "N", default_value_t = 2000)]
        n: usize,
        /// Prefix depth [default: smallest depth where class counts stabilize].
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Weight tolerance for the isomorphism verdict (`p/q` or decimal).
        #[arg(long, default_value = "1/20")]
        tol: String,
        /// Classes lighter than this skip the homogeneity check.
        #[arg(long, default_value = "1/100")]
        min_class_mass: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Weight-preserving symmetries of the pure factor.
    Congruence { input: String },
    /// Decide simplicity of the matrix law and run the corner diagnostic.
    Simplicity {
        input: String,
        /// Corner size for the diagnostic.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub sha256: String,
}

/// Wrapper around every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub result: serde_json::Value,
}

impl ReportEnvelope {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}

struct Input {
    doc: Loaded,
    digest: InputDigest,
}

fn read_input(path: &str) -> Result<Input, CliError> {
    let mut bytes = Vec::new();
    let read = if path == "-" {
        std::io::stdin().read_to_end(&mut bytes).map(|_| ())
    } else {
        std::fs::read(path).map(|b| bytes = b)
    };
    read.map_err(|e| CliError::from(e).in_input(path))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| CliError::new(ErrorKind::Parse, "input is not UTF-8").in_input(path))?;
    let doc = parse(text).map_err(|e| e.in_input(path))?;
    Ok(Input {
        doc,
        digest: InputDigest {
            sha256: hex::encode(Sha256::digest(&bytes)),
        },
    })
}

/// Runs one command and returns its envelope.
pub fn run(command: &Command) -> Result<ReportEnvelope, CliError> {
    let (name, inputs, outcome) = match command {
        Command::Purify { input } => {
            let i = read_input(input)?;
            let o = commands::purify(&i.doc)?;
            ("purify", vec![i], o)
        }
        Command::Canonical { input } => {
            let i = read_input(input)?;
            let o = commands::canonical(&i.doc)?;
            ("canonical", vec![i], o)
        }
        Command::Iso { f, g, mode, k, budget } => {
            let (a, b) = (read_input(f)?, read_input(g)?);
            let o = commands::iso(&a.doc, &b.doc, *mode, *k, *budget)?;
            ("iso", vec![a, b], o)
        }
        Command::Matdist { input, k, budget } => {
            let i = read_input(input)?;
            let o = commands::matdist(&i.doc, *k, *budget)?;
            ("matdist", vec![i], o)
        }
        Command::Sample { input, n, seed, budget } => {
            let i = read_input(input)?;
            let o = commands::sample(&i.doc, *n, *seed, *budget)?;
            ("sample", vec![i], o)
        }
        Command::Reconstruct {
            input,
            n,
            depth,
            seed,
            tol,
            min_class_mass,
            budget,
        } => {
            let args = commands::ReconstructArgs {
                n: *n,
                depth: *depth,
                seed: *seed,
                tol: commands::parse_parameter("tol", tol)?,
                min_class_mass: commands::parse_parameter("min-class-mass", min_class_mass)?,
                budget: *budget,
            };
            let i = read_input(input)?;
            let o = commands::reconstruct(&i.doc, &args)?;
            ("reconstruct", vec![i], o)
        }
        Command::Congruence { input } => {
            let i = read_input(input)?;
            let o = commands::congruence(&i.doc)?;
            ("congruence", vec![i], o)
        }
        Command::Simplicity { input, k, budget } => {
            let i = read_input(input)?;
            let o = commands::simplicity(&i.doc, *k, *budget)?;
            ("simplicity", vec![i], o)
        }
    };
    Ok(ReportEnvelope {
        command: name.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        inputs: inputs.into_iter().map(|i| i.digest).collect(),
        seed: outcome.seed,
        parameters: outcome.parameters,
        result: outcome.result,
    })
}
