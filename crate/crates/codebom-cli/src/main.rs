//! `codebom` — construct-level BOM extraction and code-centric
//! vulnerability detection for Node.js applications.

use clap::Parser;

mod cli;
mod commands;
mod report;

use cli::{Cli, Command, KbCommand};
use commands::ScanConfig;

fn main() {
    let args = Cli::parse();
    let code = match args.command {
        Command::Scan {
            app,
            kb,
            no_dev,
            format,
            output,
        } => commands::cmd_scan(&ScanConfig {
            app_dir: app,
            kb_dir: kb,
            include_dev: !no_dev,
            output_format: format,
            output_path: output,
        }),
        Command::Bom { app, output } => commands::cmd_bom(&app, output.as_deref()),
        Command::Kb(KbCommand::Diff {
            package,
            before,
            after,
            output,
        }) => commands::cmd_kb_diff(&package, &before, &after, output.as_deref()),
        Command::Kb(KbCommand::Add {
            vuln_id,
            package,
            before,
            after,
            kb,
            provenance,
        }) => commands::cmd_kb_add(&vuln_id, &package, &before, &after, &kb, &provenance),
        Command::Stats { boms, format } => commands::cmd_stats(&boms, format),
    };
    std::process::exit(code);
}
