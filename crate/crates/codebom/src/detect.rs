//! Code-centric vulnerability detection: matches a bill of materials
//! against the signature knowledge base.
//!
//! Matching strips the package root from both sides and compares
//! root-relative FQNs, so vulnerable code is found even when it has been
//! renamed, forked, or repackaged. The signature's package name is
//! reported for explanation only; it never gates a match.
//!
//! Evidence per matched construct:
//! - a removed-by-the-fix construct is present → `vulnerable`
//! - a modified construct matches the pre-fix digest → `vulnerable`
//! - a modified or added construct matches the post-fix digest → `fixed`
//! - the name matches but the digest matches neither side → `name_only`
//!   (a fork may have patched differently; surfaced without alarming)

use std::collections::BTreeMap;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bom::{BillOfMaterials, DepEntry};
use crate::construct::ConstructType;
use crate::deps::{Depth, Scope};
use crate::kb::VulnSignature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    Vulnerable,
    Fixed,
    NameOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingStatus {
    Vulnerable,
    Fixed,
    Inconclusive,
}

/// One construct-level match between a signature and a dependency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructMatch {
    /// Root-relative construct path from the signature.
    pub construct: String,
    #[serde(rename = "type")]
    pub ctype: ConstructType,
    /// The matched construct's full FQN in the scanned dependency.
    pub bom_fqn: String,
    pub evidence: Evidence,
}

/// The dependency instance a finding is reported against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyIdentity {
    pub name: String,
    pub version: String,
    pub path: String,
    pub scope: Scope,
    pub depth: Depth,
}

/// A detected vulnerability in one dependency instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub vuln_id: String,
    /// The package the signature was built from; reported for explanation,
    /// never used for matching.
    pub signature_package: String,
    pub dependency: DependencyIdentity,
    pub status: FindingStatus,
    pub matches: Vec<ConstructMatch>,
}

/// Matches every signature against every dependency entry. Findings are
/// emitted only for dependencies with at least one construct match and are
/// ordered by (vuln_id, install path).
pub fn detect(bom: &BillOfMaterials, kb: &[VulnSignature]) -> Vec<Finding> {
    let mut findings: Vec<Finding> = bom
        .dep_entries
        .par_iter()
        .flat_map(|entry| {
            let index = index_entry(entry);
            kb.iter()
                .filter_map(|sig| match_signature(sig, entry, &index))
                .collect::<Vec<Finding>>()
        })
        .collect();
    findings.sort_by(|a, b| {
        (&a.vuln_id, &a.dependency.path).cmp(&(&b.vuln_id, &b.dependency.path))
    });
    findings
}

type EntryIndex<'e> = HashMap<(String, ConstructType), &'e crate::construct::Construct>;

fn index_entry(entry: &DepEntry) -> EntryIndex<'_> {
    let mut index = HashMap::with_capacity(entry.constructs.len());
    for c in &entry.constructs {
        if c.ctype == ConstructType::Pack {
            continue;
        }
        index.entry((c.relative_fqn().render(), c.ctype)).or_insert(c);
    }
    index
}

fn match_signature(
    sig: &VulnSignature,
    entry: &DepEntry,
    index: &EntryIndex<'_>,
) -> Option<Finding> {
    let mut matches: Vec<ConstructMatch> = Vec::new();

    for removed in &sig.changes.removed {
        let key = (removed.fqn.relative().render(), removed.ctype);
        if let Some(found) = index.get(&key) {
            matches.push(ConstructMatch {
                construct: key.0,
                ctype: removed.ctype,
                bom_fqn: found.fqn.render(),
                evidence: Evidence::Vulnerable,
            });
        }
    }
    for modified in &sig.changes.modified {
        let key = (modified.fqn.relative().render(), modified.ctype);
        if let Some(found) = index.get(&key) {
            let evidence = if found.body_digest == modified.before_digest {
                Evidence::Vulnerable
            } else if found.body_digest == modified.after_digest {
                Evidence::Fixed
            } else {
                Evidence::NameOnly
            };
            matches.push(ConstructMatch {
                construct: key.0,
                ctype: modified.ctype,
                bom_fqn: found.fqn.render(),
                evidence,
            });
        }
    }
    for added in &sig.changes.added {
        let key = (added.fqn.relative().render(), added.ctype);
        if let Some(found) = index.get(&key) {
            let evidence = if found.body_digest == added.body_digest {
                Evidence::Fixed
            } else {
                Evidence::NameOnly
            };
            matches.push(ConstructMatch {
                construct: key.0,
                ctype: added.ctype,
                bom_fqn: found.fqn.render(),
                evidence,
            });
        }
    }

    if matches.is_empty() {
        return None;
    }
    let status = if matches.iter().any(|m| m.evidence == Evidence::Vulnerable) {
        FindingStatus::Vulnerable
    } else if matches.iter().all(|m| m.evidence == Evidence::Fixed) {
        FindingStatus::Fixed
    } else {
        FindingStatus::Inconclusive
    };
    Some(Finding {
        vuln_id: sig.vuln_id.clone(),
        signature_package: sig.package_name.clone(),
        dependency: DependencyIdentity {
            name: entry.name.clone(),
            version: entry.version.clone(),
            path: entry.path.clone(),
            scope: entry.scope,
            depth: entry.depth,
        },
        status,
        matches,
    })
}

/// Counts of affected dependency instances per vulnerability in each
/// scope × depth cell. Only vulnerable findings count as affected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub vuln_id: String,
    pub runtime_direct: usize,
    pub runtime_transitive: usize,
    pub test_direct: usize,
    pub test_transitive: usize,
}

/// Per-vulnerability frequency of affected dependencies over the
/// {runtime, test} × {direct, transitive} feature cells.
pub fn tabulate_findings(findings: &[Finding]) -> Vec<FeatureRow> {
    let mut rows: BTreeMap<String, FeatureRow> = BTreeMap::new();
    for finding in findings {
        if finding.status != FindingStatus::Vulnerable {
            continue;
        }
        let row = rows
            .entry(finding.vuln_id.clone())
            .or_insert_with(|| FeatureRow {
                vuln_id: finding.vuln_id.clone(),
                runtime_direct: 0,
                runtime_transitive: 0,
                test_direct: 0,
                test_transitive: 0,
            });
        match (finding.dependency.scope, finding.dependency.depth) {
            (Scope::Runtime, Depth::Direct) => row.runtime_direct += 1,
            (Scope::Runtime, Depth::Transitive) => row.runtime_transitive += 1,
            (Scope::Test, Depth::Direct) => row.test_direct += 1,
            (Scope::Test, Depth::Transitive) => row.test_transitive += 1,
        }
    }
    rows.into_values().collect()
}
