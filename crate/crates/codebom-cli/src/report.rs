//! Report rendering: one JSON document per scan, plus text tables shaped
//! like the change-profile and feature-frequency summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use codebom::bom::BomStats;
use codebom::construct::ConstructType;
use codebom::detect::{FeatureRow, Finding, FindingStatus};
use codebom::kb::VulnSignature;
use codebom::stats::{StatLine, SummaryTable};

/// The scan report document. Field order is the canonical JSON layout.
#[derive(Debug, Serialize)]
pub struct ScanReport {
    pub app: AppIdentity,
    pub stats: BomStats,
    pub findings: Vec<Finding>,
    pub feature_table: Vec<FeatureRow>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct AppIdentity {
    pub name: String,
    pub version: String,
}

impl ScanReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn to_text(&self, kb: &[VulnSignature]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scan of {} {}", self.app.name, self.app.version);
        let _ = writeln!(
            out,
            "constructs: app {}, deps {}, total {}",
            self.stats.app_count, self.stats.dep_count, self.stats.total
        );
        let count = |status: FindingStatus| {
            self.findings.iter().filter(|f| f.status == status).count()
        };
        let _ = writeln!(
            out,
            "findings: {} vulnerable, {} fixed, {} inconclusive",
            count(FindingStatus::Vulnerable),
            count(FindingStatus::Fixed),
            count(FindingStatus::Inconclusive)
        );

        for finding in &self.findings {
            let status = match finding.status {
                FindingStatus::Vulnerable => "VULNERABLE",
                FindingStatus::Fixed => "fixed",
                FindingStatus::Inconclusive => "inconclusive",
            };
            let _ = writeln!(
                out,
                "\n{} in {}@{} ({}) [{}, {}]: {}",
                finding.vuln_id,
                finding.dependency.name,
                finding.dependency.version,
                finding.dependency.path,
                scope_label(finding),
                depth_label(finding),
                status
            );
            for m in &finding.matches {
                let _ = writeln!(
                    out,
                    "  {:<10} {} {}",
                    format!("{:?}", m.evidence).to_lowercase(),
                    m.ctype,
                    m.construct
                );
            }
        }

        let matched: std::collections::BTreeSet<&str> =
            self.findings.iter().map(|f| f.vuln_id.as_str()).collect();
        let profiled: Vec<&VulnSignature> = kb
            .iter()
            .filter(|s| matched.contains(s.vuln_id.as_str()))
            .collect();
        if !profiled.is_empty() {
            let _ = writeln!(out, "\nsignature change profile:");
            let _ = writeln!(
                out,
                "  {:<20} {:<22} {:<22} removed",
                "vulnerability", "added", "modified"
            );
            for sig in profiled {
                let (a, m, r) = change_profile(sig);
                let _ = writeln!(out, "  {:<20} {:<22} {:<22} {}", sig.vuln_id, a, m, r);
            }
        }

        if !self.feature_table.is_empty() {
            let _ = writeln!(out, "\naffected dependencies by feature:");
            let _ = writeln!(
                out,
                "  {:<20} {:>7} {:>7} {:>7} {:>7}",
                "", "runtime", "", "test", ""
            );
            let _ = writeln!(
                out,
                "  {:<20} {:>7} {:>7} {:>7} {:>7}",
                "vulnerability", "direct", "trans.", "direct", "trans."
            );
            let mut totals = (0usize, 0usize, 0usize, 0usize);
            for row in &self.feature_table {
                let _ = writeln!(
                    out,
                    "  {:<20} {:>7} {:>7} {:>7} {:>7}",
                    row.vuln_id,
                    row.runtime_direct,
                    row.runtime_transitive,
                    row.test_direct,
                    row.test_transitive
                );
                totals.0 += row.runtime_direct;
                totals.1 += row.runtime_transitive;
                totals.2 += row.test_direct;
                totals.3 += row.test_transitive;
            }
            let _ = writeln!(
                out,
                "  {:<20} {:>7} {:>7} {:>7} {:>7}",
                "total", totals.0, totals.1, totals.2, totals.3
            );
        }

        if !self.warnings.is_empty() {
            let _ = writeln!(out, "\nwarnings:");
            for w in &self.warnings {
                let _ = writeln!(out, "  {w}");
            }
        }
        out
    }
}

fn scope_label(f: &Finding) -> &'static str {
    match f.dependency.scope {
        codebom::deps::Scope::Runtime => "runtime",
        codebom::deps::Scope::Test => "test",
    }
}

fn depth_label(f: &Finding) -> &'static str {
    match f.dependency.depth {
        codebom::deps::Depth::Direct => "direct",
        codebom::deps::Depth::Transitive => "transitive",
    }
}

/// Renders a signature's change counts as `FUNC:1, OBJT:4` style cells.
fn change_profile(sig: &VulnSignature) -> (String, String, String) {
    let counts = sig.changes.counts_by_type();
    let cell = |pick: fn(&(usize, usize, usize)) -> usize| {
        let parts: Vec<String> = counts
            .iter()
            .filter(|(_, c)| pick(c) > 0)
            .map(|(t, c)| format!("{}:{}", t, pick(c)))
            .collect();
        if parts.is_empty() {
            "-".to_owned()
        } else {
            parts.join(", ")
        }
    };
    (cell(|c| c.0), cell(|c| c.1), cell(|c| c.2))
}

/// Renders change counts grouped by type for `kb diff` summaries.
pub fn changes_summary(counts: &BTreeMap<ConstructType, (usize, usize, usize)>) -> String {
    let cell = |pick: fn(&(usize, usize, usize)) -> usize| {
        let parts: Vec<String> = counts
            .iter()
            .filter(|(_, c)| pick(c) > 0)
            .map(|(t, c)| format!("{}:{}", t, pick(c)))
            .collect();
        if parts.is_empty() {
            "-".to_owned()
        } else {
            parts.join(", ")
        }
    };
    format!(
        "added {} | modified {} | removed {}",
        cell(|c| c.0),
        cell(|c| c.1),
        cell(|c| c.2)
    )
}

/// Renders the Median/Min/Max/Q1/Q3/SD table.
pub fn summary_text(table: &SummaryTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<24} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "", "median", "min", "max", "q1", "q3", "sd"
    );
    let mut any_degenerate = false;
    let mut section = |title: &str, rows: &[StatLine], out: &mut String| {
        let _ = writeln!(out, "{title}");
        for row in rows {
            let sd = if row.sd_degenerate {
                any_degenerate = true;
                format!("{:.2}*", row.sd)
            } else {
                format!("{:.2}", row.sd)
            };
            let _ = writeln!(
                out,
                "  {:<22} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>10}",
                row.label, row.median, row.min, row.max, row.q1, row.q3, sd
            );
        }
    };
    section("constructs", &table.construct_rows, &mut out);
    section("dependencies", &table.dependency_rows, &mut out);
    if any_degenerate {
        let _ = writeln!(out, "* sample SD undefined for n = 1; reported as 0");
    }
    out
}
