//! Bill-of-materials assembly.
//!
//! [`build_bom`] extracts the application's own constructs (everything
//! outside `node_modules`), resolves and classifies the dependency graph,
//! then visits dependencies depth-first (children name-sorted) extracting
//! each install path with the dependency's name as package root. A
//! dependency directory missing from disk degrades to a warning so one
//! broken install cannot sink the whole analysis.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{Construct, Fqn};
use crate::deps::{self, Depth, Manifest, Scope};
use crate::error::{Error, Result};
use crate::extract;

/// One dependency's construct inventory with its features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepEntry {
    pub name: String,
    pub version: String,
    pub path: String,
    pub scope: Scope,
    pub depth: Depth,
    pub constructs: Vec<Construct>,
}

/// Construct counts; `total = app_count + dep_count`. PACK constructs are
/// counted like any other construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BomStats {
    pub app_count: usize,
    pub dep_count: usize,
    pub total: usize,
}

/// The application's constructs plus per-dependency construct sets with
/// dependency features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BillOfMaterials {
    pub app_name: String,
    pub app_version: String,
    pub app_constructs: Vec<Construct>,
    pub dep_entries: Vec<DepEntry>,
    pub stats: BomStats,
    pub warnings: Vec<String>,
}

impl BillOfMaterials {
    /// Canonical JSON document; field order fixed by the struct layout.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("BOM serialization is infallible")
    }

    /// Loads a BOM document, re-anchoring FQNs whose package root contains
    /// dots (the contextless parse would have split them).
    pub fn from_json_str(text: &str, path: &Path) -> Result<BillOfMaterials> {
        let mut bom: BillOfMaterials =
            serde_json::from_str(text).map_err(|e| Error::json(path, text, &e))?;
        for c in &mut bom.app_constructs {
            reroot_construct(c, &bom.app_name)?;
        }
        for entry in &mut bom.dep_entries {
            let root = entry.name.clone();
            for c in &mut entry.constructs {
                reroot_construct(c, &root)?;
            }
        }
        for c in bom
            .app_constructs
            .iter()
            .chain(bom.dep_entries.iter().flat_map(|e| e.constructs.iter()))
        {
            c.validate()?;
        }
        Ok(bom)
    }
}

pub(crate) fn reroot_construct(c: &mut Construct, root: &str) -> Result<()> {
    c.fqn = c.fqn.reroot(root)?;
    if let Some(parent) = &c.parent_fqn {
        c.parent_fqn = Some(parent.reroot(root)?);
    }
    Ok(())
}

/// Builds the bill of materials for the application at `app_dir`.
pub fn build_bom(app_dir: &Path) -> Result<BillOfMaterials> {
    let manifest_path = app_dir.join("package.json");
    let manifest_text = std::fs::read_to_string(&manifest_path)
        .map_err(|_| Error::MissingManifest(manifest_path.clone()))?;
    let manifest: Manifest = deps::parse_manifest(&manifest_text, &manifest_path)?;

    let mut warnings: Vec<String> = Vec::new();

    // application constructs (extract_package skips node_modules)
    let app_root = Fqn::root(&manifest.name)?;
    let app_extraction = extract::extract_package(app_dir, &app_root)?;
    push_file_warnings(&mut warnings, "", &app_extraction.file_issues);

    // dependency graph
    let has_lockfile = app_dir.join("package-lock.json").is_file();
    let has_node_modules = app_dir.join("node_modules").is_dir();
    let graph = if has_lockfile || has_node_modules {
        let (mut graph, graph_warnings) = deps::resolve_graph(app_dir)?;
        warnings.extend(graph_warnings);
        warnings.extend(deps::classify(&mut graph, &manifest));
        Some(graph)
    } else {
        if !manifest.dependencies.is_empty() || !manifest.dev_dependencies.is_empty() {
            warnings.push(
                "manifest declares dependencies but neither package-lock.json nor \
                 node_modules exists; dependency analysis skipped"
                    .to_owned(),
            );
        }
        None
    };

    // depth-first dependency extraction, parallel per node; assembly
    // preserves the deterministic traversal order
    let mut dep_entries: Vec<DepEntry> = Vec::new();
    if let Some(graph) = &graph {
        let order = graph.depth_first_order();
        type Extracted = std::result::Result<(DepEntry, Vec<String>), String>;
        let extracted: Vec<Extracted> = order
            .par_iter()
            .map(|&idx| {
                let node = &graph.nodes[idx];
                let dir = app_dir.join(node.path.replace('/', std::path::MAIN_SEPARATOR_STR));
                if !dir.is_dir() {
                    return Err(format!(
                        "dependency {} ({}) is missing from disk; skipped",
                        node.name, node.path
                    ));
                }
                let root = Fqn::root(&node.name).map_err(|e| e.to_string())?;
                let extraction =
                    extract::extract_package(&dir, &root).map_err(|e| e.to_string())?;
                let mut entry_warnings = Vec::new();
                push_file_warnings(&mut entry_warnings, &node.path, &extraction.file_issues);
                Ok((
                    DepEntry {
                        name: node.name.clone(),
                        version: node.version.clone(),
                        path: node.path.clone(),
                        scope: node.scope.expect("graph is classified"),
                        depth: node.depth.expect("graph is classified"),
                        constructs: extraction.constructs,
                    },
                    entry_warnings,
                ))
            })
            .collect();
        for result in extracted {
            match result {
                Ok((entry, entry_warnings)) => {
                    dep_entries.push(entry);
                    warnings.extend(entry_warnings);
                }
                Err(w) => warnings.push(w),
            }
        }
    }

    let app_count = app_extraction.constructs.len();
    let dep_count = dep_entries.iter().map(|e| e.constructs.len()).sum();
    Ok(BillOfMaterials {
        app_name: manifest.name,
        app_version: manifest.version,
        app_constructs: app_extraction.constructs,
        dep_entries,
        stats: BomStats {
            app_count,
            dep_count,
            total: app_count + dep_count,
        },
        warnings,
    })
}

fn push_file_warnings(warnings: &mut Vec<String>, prefix: &str, issues: &[extract::FileIssues]) {
    for file in issues {
        for issue in &file.issues {
            let path = if prefix.is_empty() {
                file.relative_path.clone()
            } else {
                format!("{prefix}/{}", file.relative_path)
            };
            warnings.push(format!(
                "{path}:{}:{}: {}",
                issue.line, issue.col, issue.message
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;
    use std::path::Path;

    fn write(root: &Path, rel: &str, text: &str) {
        let path = root.join(rel);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, text).unwrap();
    }

    #[test]
    fn missing_manifest_is_fatal() {
        let tmp = tempfile::tempdir().unwrap();
        assert!(matches!(
            build_bom(tmp.path()),
            Err(Error::MissingManifest(_))
        ));
    }

    #[test]
    fn zero_dependency_app_has_empty_entries() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "package.json",
            r#"{"name":"bare","version":"0.1.0"}"#,
        );
        write(tmp.path(), "index.js", "function main() { return 0; }\n");
        let bom = build_bom(tmp.path()).unwrap();
        assert!(bom.dep_entries.is_empty());
        assert_eq!(bom.stats.dep_count, 0);
        // PACK bare + MODU bare.index + FUNC bare.main()
        assert_eq!(bom.stats.app_count, 3);
        assert_eq!(bom.stats.total, 3);
    }

    #[test]
    fn missing_dependency_directory_degrades_to_a_warning() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "package.json",
            r#"{"name":"app","version":"1.0.0","dependencies":{"ghost":"^1","real":"^1"}}"#,
        );
        write(
            tmp.path(),
            "package-lock.json",
            r#"{"lockfileVersion":3,"packages":{
                "": {"name":"app","version":"1.0.0","dependencies":{"ghost":"^1","real":"^1"}},
                "node_modules/ghost": {"version":"1.0.0"},
                "node_modules/real": {"version":"1.0.0"}
            }}"#,
        );
        write(
            tmp.path(),
            "node_modules/real/package.json",
            r#"{"name":"real","version":"1.0.0"}"#,
        );
        write(tmp.path(), "node_modules/real/index.js", "var t = { a: 1 };\n");
        // ghost is in the lockfile but not materialized on disk
        let bom = build_bom(tmp.path()).unwrap();
        assert_eq!(bom.dep_entries.len(), 1);
        assert_eq!(bom.dep_entries[0].name, "real");
        assert!(bom
            .warnings
            .iter()
            .any(|w| w.contains("ghost") && w.contains("missing")));
    }

    #[test]
    fn duplicate_install_paths_each_get_their_own_entry() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "package.json",
            r#"{"name":"app","version":"1.0.0","dependencies":{"a":"^1","ms":"^2"}}"#,
        );
        write(
            tmp.path(),
            "package-lock.json",
            r#"{"lockfileVersion":3,"packages":{
                "": {"name":"app","version":"1.0.0","dependencies":{"a":"^1","ms":"^2"}},
                "node_modules/a": {"version":"1.0.0","dependencies":{"ms":"^1"}},
                "node_modules/a/node_modules/ms": {"version":"1.0.0"},
                "node_modules/ms": {"version":"2.0.0"}
            }}"#,
        );
        write(
            tmp.path(),
            "node_modules/a/package.json",
            r#"{"name":"a","version":"1.0.0","dependencies":{"ms":"^1"}}"#,
        );
        write(tmp.path(), "node_modules/a/index.js", "function fa(x) { return x; }\n");
        write(
            tmp.path(),
            "node_modules/a/node_modules/ms/package.json",
            r#"{"name":"ms","version":"1.0.0"}"#,
        );
        write(
            tmp.path(),
            "node_modules/a/node_modules/ms/index.js",
            "function old(x) { return x; }\n",
        );
        write(
            tmp.path(),
            "node_modules/ms/package.json",
            r#"{"name":"ms","version":"2.0.0"}"#,
        );
        write(
            tmp.path(),
            "node_modules/ms/index.js",
            "function fresh(x) { return x * 2; }\n",
        );

        let bom = build_bom(tmp.path()).unwrap();
        let ms_entries: Vec<&DepEntry> =
            bom.dep_entries.iter().filter(|e| e.name == "ms").collect();
        assert_eq!(ms_entries.len(), 2);
        let paths: Vec<&str> = ms_entries.iter().map(|e| e.path.as_str()).collect();
        assert!(paths.contains(&"node_modules/ms"));
        assert!(paths.contains(&"node_modules/a/node_modules/ms"));
        // their code differs, and so do their construct digests
        assert_ne!(
            ms_entries[0].constructs.last().unwrap().body_digest,
            ms_entries[1].constructs.last().unwrap().body_digest
        );
    }

    #[test]
    fn summarize_of_identical_boms_has_zero_spread() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "package.json",
            r#"{"name":"bare","version":"0.1.0"}"#,
        );
        write(tmp.path(), "index.js", "function main() { return 0; }\n");
        let bom = build_bom(tmp.path()).unwrap();
        let table = crate::stats::summarize(&[bom.clone(), bom.clone(), bom]).unwrap();
        for row in table.construct_rows.iter().chain(&table.dependency_rows) {
            assert_eq!(row.sd, 0.0, "{}", row.label);
            assert!(!row.sd_degenerate);
            assert_eq!(row.median, row.min);
            assert_eq!(row.median, row.max);
        }
        assert_eq!(table.construct_rows[0].median, 3.0);
    }
}
