//! Argument definitions.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "codebom",
    version,
    about = "Construct-level BOMs and code-centric vulnerability detection for Node.js applications"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan an application against a vulnerability knowledge base.
    ///
    /// Exit code 0: no vulnerable finding; 1: at least one vulnerable
    /// finding; 2: operational error.
    Scan {
        /// Application directory (contains package.json).
        #[arg(long)]
        app: PathBuf,
        /// Knowledge-base directory of signature JSON files.
        #[arg(long)]
        kb: PathBuf,
        /// Exclude test-scope dependencies before detection. Off by
        /// default: most vulnerable code hides in test dependencies.
        #[arg(long)]
        no_dev: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Extract the bill of materials of an application.
    Bom {
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Knowledge-base operations.
    #[command(subcommand)]
    Kb(KbCommand),
    /// Summary statistics over one or more BOM documents.
    Stats {
        /// BOM JSON files produced by `codebom bom`.
        #[arg(required = true)]
        boms: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
}

#[derive(Debug, Subcommand)]
pub enum KbCommand {
    /// Diff two source trees of one package into construct changes.
    Diff {
        /// Package name both trees belong to.
        #[arg(long)]
        package: String,
        /// Pre-fix source tree.
        #[arg(long)]
        before: PathBuf,
        /// Post-fix source tree.
        #[arg(long)]
        after: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build a signature from two source trees and store it in the KB.
    Add {
        #[arg(long = "vuln-id")]
        vuln_id: String,
        #[arg(long)]
        package: String,
        #[arg(long)]
        before: PathBuf,
        #[arg(long)]
        after: PathBuf,
        /// Knowledge-base directory (created if missing).
        #[arg(long)]
        kb: PathBuf,
        /// Free-text fix provenance (commit ids, advisory links).
        #[arg(long, default_value = "")]
        provenance: String,
    },
}
