//! Command implementations. Every command returns a process exit code:
//! 0 success, 2 operational error; `scan` additionally exits 1 when at
//! least one vulnerable finding exists.

use std::path::{Path, PathBuf};

use codebom::bom::{build_bom, BillOfMaterials};
use codebom::construct::Fqn;
use codebom::detect::{detect, tabulate_findings, FindingStatus};
use codebom::deps::Scope;
use codebom::extract::extract_package;
use codebom::kb::{build_signature, diff_constructs, kb_load, kb_save};
use codebom::stats::summarize;

use crate::cli::OutputFormat;
use crate::report::{changes_summary, summary_text, AppIdentity, ScanReport};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_VULNERABLE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Scan parameters; `include_dev` defaults to true because vulnerable
/// constructs are mostly found in test dependencies.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub app_dir: PathBuf,
    pub kb_dir: PathBuf,
    pub include_dev: bool,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

pub fn cmd_scan(config: &ScanConfig) -> i32 {
    if !config.app_dir.is_dir() {
        eprintln!("error: application directory {} does not exist", config.app_dir.display());
        return EXIT_ERROR;
    }
    if !config.kb_dir.is_dir() {
        eprintln!("error: knowledge-base directory {} does not exist", config.kb_dir.display());
        return EXIT_ERROR;
    }

    let mut bom = match build_bom(&config.app_dir) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let kb = match kb_load(&config.kb_dir) {
        Ok(kb) => kb,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    for w in &kb.warnings {
        eprintln!("warning: {w}");
    }

    if !config.include_dev {
        bom.dep_entries.retain(|e| e.scope == Scope::Runtime);
        let dep_count = bom.dep_entries.iter().map(|e| e.constructs.len()).sum();
        bom.stats.dep_count = dep_count;
        bom.stats.total = bom.stats.app_count + dep_count;
    }

    let findings = detect(&bom, &kb.signatures);
    let feature_table = tabulate_findings(&findings);
    let any_vulnerable = findings
        .iter()
        .any(|f| f.status == FindingStatus::Vulnerable);

    let report = ScanReport {
        app: AppIdentity {
            name: bom.app_name.clone(),
            version: bom.app_version.clone(),
        },
        stats: bom.stats,
        findings,
        feature_table,
        warnings: bom.warnings.clone(),
    };
    let rendered = match config.output_format {
        OutputFormat::Json => report.to_json_string(),
        OutputFormat::Text => report.to_text(&kb.signatures),
    };
    if write_output(config.output_path.as_deref(), &rendered) != EXIT_CLEAN {
        return EXIT_ERROR;
    }

    if any_vulnerable {
        EXIT_VULNERABLE
    } else {
        EXIT_CLEAN
    }
}

pub fn cmd_bom(app_dir: &Path, output: Option<&Path>) -> i32 {
    match build_bom(app_dir) {
        Ok(bom) => write_output(output, &bom.to_json_string()),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn cmd_kb_diff(package: &str, before: &Path, after: &Path, output: Option<&Path>) -> i32 {
    let root = match Fqn::root(package) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let changes = (|| {
        let before = extract_package(before, &root)?;
        let after = extract_package(after, &root)?;
        diff_constructs(&before.constructs, &after.constructs)
    })();
    match changes {
        Ok(changes) => {
            if changes.is_empty() {
                eprintln!("warning: no construct changes detected between the two trees");
            } else {
                eprintln!("{}", changes_summary(&changes.counts_by_type()));
            }
            let json = serde_json::to_string_pretty(&changes)
                .expect("changes serialization is infallible");
            write_output(output, &json)
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_kb_add(
    vuln_id: &str,
    package: &str,
    before: &Path,
    after: &Path,
    kb_dir: &Path,
    provenance: &str,
) -> i32 {
    match build_signature(vuln_id, package, before, after, provenance)
        .and_then(|sig| kb_save(&sig, kb_dir).map(|()| sig))
    {
        Ok(sig) => {
            eprintln!(
                "stored {} for package {} ({})",
                sig.vuln_id,
                sig.package_name,
                changes_summary(&sig.changes.counts_by_type())
            );
            EXIT_CLEAN
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn cmd_stats(bom_files: &[PathBuf], format: OutputFormat) -> i32 {
    let mut boms: Vec<BillOfMaterials> = Vec::with_capacity(bom_files.len());
    for path in bom_files {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: failed to read {}: {e}", path.display());
                return EXIT_ERROR;
            }
        };
        match BillOfMaterials::from_json_str(&text, path) {
            Ok(bom) => boms.push(bom),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_ERROR;
            }
        }
    }
    match summarize(&boms) {
        Ok(table) => {
            let rendered = match format {
                OutputFormat::Json => serde_json::to_string_pretty(&table)
                    .expect("summary serialization is infallible"),
                OutputFormat::Text => summary_text(&table),
            };
            println!("{rendered}");
            EXIT_CLEAN
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn write_output(path: Option<&Path>, rendered: &str) -> i32 {
    match path {
        Some(path) => {
            let mut text = rendered.to_owned();
            if !text.ends_with('\n') {
                text.push('\n');
            }
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: failed to write {}: {e}", path.display());
                return EXIT_ERROR;
            }
            EXIT_CLEAN
        }
        None => {
            println!("{rendered}");
            EXIT_CLEAN
        }
    }
}
