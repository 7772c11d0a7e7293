//! Vulnerability knowledge base: signatures built by diffing pre-fix and
//! post-fix source trees.
//!
//! A construct is *modified* when its normalized body digest differs
//! between the two trees, so formatting-only fix commits produce no
//! signature. A module is modified whenever its file digest changes, even
//! when no child construct did (top-level statement edits). PACK
//! constructs never participate in diffs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bom::reroot_construct;
use crate::construct::{Construct, ConstructType, Fqn};
use crate::error::{Error, Result};
use crate::extract;

/// A construct present in both trees whose body changed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifiedConstruct {
    pub fqn: Fqn,
    #[serde(rename = "type")]
    pub ctype: ConstructType,
    pub before_digest: String,
    pub after_digest: String,
}

/// The construct-level difference between two source trees. The three FQN
/// sets are pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ConstructChanges {
    /// Present only in the after tree, as extracted there.
    pub added: Vec<Construct>,
    pub modified: Vec<ModifiedConstruct>,
    /// Present only in the before tree, as extracted there.
    pub removed: Vec<Construct>,
}

impl ConstructChanges {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.modified.is_empty() && self.removed.is_empty()
    }

    /// (added, modified, removed) counts per construct type, for reports.
    pub fn counts_by_type(&self) -> BTreeMap<ConstructType, (usize, usize, usize)> {
        let mut counts: BTreeMap<ConstructType, (usize, usize, usize)> = BTreeMap::new();
        for c in &self.added {
            counts.entry(c.ctype).or_default().0 += 1;
        }
        for m in &self.modified {
            counts.entry(m.ctype).or_default().1 += 1;
        }
        for c in &self.removed {
            counts.entry(c.ctype).or_default().2 += 1;
        }
        counts
    }
}

/// Diffs two construct lists extracted from the same package name, keyed
/// by rendered FQN + construct type.
pub fn diff_constructs(before: &[Construct], after: &[Construct]) -> Result<ConstructChanges> {
    if let (Some(b), Some(a)) = (before.first(), after.first()) {
        let (b_root, a_root) = (b.fqn.root_segment(), a.fqn.root_segment());
        if b_root != a_root {
            return Err(Error::RootMismatch {
                left: b_root.to_owned(),
                right: a_root.to_owned(),
            });
        }
    }

    let key = |c: &Construct| (c.fqn.render(), c.ctype);
    let index = |list: &[Construct]| -> BTreeMap<(String, ConstructType), Construct> {
        list.iter()
            .filter(|c| c.ctype != ConstructType::Pack)
            .map(|c| (key(c), c.clone()))
            .collect()
    };
    let before_map = index(before);
    let after_map = index(after);

    let mut changes = ConstructChanges::default();
    for (k, b) in &before_map {
        match after_map.get(k) {
            None => changes.removed.push(b.clone()),
            Some(a) if a.body_digest != b.body_digest => {
                changes.modified.push(ModifiedConstruct {
                    fqn: b.fqn.clone(),
                    ctype: b.ctype,
                    before_digest: b.body_digest.clone(),
                    after_digest: a.body_digest.clone(),
                });
            }
            Some(_) => {}
        }
    }
    for (k, a) in &after_map {
        if !before_map.contains_key(k) {
            changes.added.push(a.clone());
        }
    }
    Ok(changes)
}

/// A vulnerability identifier bound to its construct changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VulnSignature {
    pub vuln_id: String,
    pub package_name: String,
    pub provenance: String,
    #[serde(flatten)]
    pub changes: ConstructChanges,
}

/// Extracts both trees rooted at `package_name`, diffs them, and wraps the
/// result. An empty diff is rejected: a metadata-only fix has no code
/// identity for a code-centric signature to carry.
pub fn build_signature(
    vuln_id: &str,
    package_name: &str,
    before_tree: &Path,
    after_tree: &Path,
    provenance: &str,
) -> Result<VulnSignature> {
    validate_vuln_id(vuln_id)?;
    let root = Fqn::root(package_name)?;
    let before = extract::extract_package(before_tree, &root)?;
    let after = extract::extract_package(after_tree, &root)?;
    let changes = diff_constructs(&before.constructs, &after.constructs)?;
    if changes.is_empty() {
        return Err(Error::NoCodeChange);
    }
    Ok(VulnSignature {
        vuln_id: vuln_id.to_owned(),
        package_name: package_name.to_owned(),
        provenance: provenance.to_owned(),
        changes,
    })
}

fn validate_vuln_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id != "."
        && id != ".."
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidVulnId(id.to_owned()))
    }
}

/// Writes `<vuln_id>.json` into `kb_dir`, overwriting an existing file for
/// the same id.
pub fn kb_save(sig: &VulnSignature, kb_dir: &Path) -> Result<()> {
    validate_vuln_id(&sig.vuln_id)?;
    std::fs::create_dir_all(kb_dir).map_err(|e| Error::io(kb_dir, e))?;
    let path = kb_dir.join(format!("{}.json", sig.vuln_id));
    let json = serde_json::to_string_pretty(sig).expect("signature serialization is infallible");
    std::fs::write(&path, json).map_err(|e| Error::io(path, e))
}

/// The signatures of a knowledge-base directory plus warnings for files
/// that were skipped.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    pub signatures: Vec<VulnSignature>,
    pub warnings: Vec<String>,
}

/// Loads every `*.json` signature in `kb_dir` (sorted by file name).
/// Malformed files are skipped with a warning; two files carrying the same
/// vuln_id are an error.
pub fn kb_load(kb_dir: &Path) -> Result<KnowledgeBase> {
    let entries = std::fs::read_dir(kb_dir).map_err(|e| Error::io(kb_dir, e))?;
    let mut files: Vec<std::path::PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().and_then(|e| e.to_str()) == Some("json"))
        .collect();
    files.sort();

    let mut kb = KnowledgeBase::default();
    let mut seen: BTreeMap<String, std::path::PathBuf> = BTreeMap::new();
    for path in files {
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                kb.warnings
                    .push(format!("skipping {}: {e}", path.display()));
                continue;
            }
        };
        let mut sig: VulnSignature = match serde_json::from_str(&text) {
            Ok(s) => s,
            Err(e) => {
                kb.warnings
                    .push(format!("skipping {}: {e}", path.display()));
                continue;
            }
        };
        if let Err(e) = reroot_signature(&mut sig) {
            kb.warnings
                .push(format!("skipping {}: {e}", path.display()));
            continue;
        }
        if let Some(first) = seen.get(&sig.vuln_id) {
            return Err(Error::DuplicateVulnId(format!(
                "{} (in {} and {})",
                sig.vuln_id,
                first.display(),
                path.display()
            )));
        }
        seen.insert(sig.vuln_id.clone(), path);
        kb.signatures.push(sig);
    }
    Ok(kb)
}

/// Re-anchors FQNs after deserialization (package roots may contain dots)
/// and validates the signature's structural invariants.
fn reroot_signature(sig: &mut VulnSignature) -> Result<()> {
    let root = sig.package_name.clone();
    for c in sig.changes.added.iter_mut().chain(sig.changes.removed.iter_mut()) {
        reroot_construct(c, &root)?;
        c.validate()?;
    }
    for m in &mut sig.changes.modified {
        m.fqn = m.fqn.reroot(&root)?;
        if m.before_digest == m.after_digest {
            return Err(Error::InvalidConstruct(format!(
                "modified entry {} has identical digests",
                m.fqn
            )));
        }
    }
    if sig.changes.is_empty() {
        return Err(Error::NoCodeChange);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{normalize_and_digest, Span};
    use std::fs;

    fn construct(root: &str, rel: &[&str], ctype: ConstructType, body: &str) -> Construct {
        let mut segments = vec![root.to_owned()];
        segments.extend(rel.iter().map(|s| s.to_string()));
        let fqn = Fqn::from_segments(segments).unwrap();
        let parent = (!rel.is_empty()).then(|| Fqn::root(root).unwrap());
        Construct::new(
            ctype,
            fqn,
            Span::new(1, 1, 2, 1),
            normalize_and_digest(body),
            parent,
        )
        .unwrap()
    }

    #[test]
    fn identical_lists_diff_to_nothing() {
        let list = vec![
            construct("p", &["m"], ConstructType::Modu, "function f(a) {}"),
            construct("p", &["m", "f(a)"], ConstructType::Func, "{ return 1; }"),
        ];
        let changes = diff_constructs(&list, &list).unwrap();
        assert!(changes.is_empty());
    }

    #[test]
    fn body_change_modifies_function_and_module() {
        let before = vec![
            construct("p", &["m"], ConstructType::Modu, "function f(a) { return 1; }"),
            construct("p", &["m", "f(a)"], ConstructType::Func, "{ return 1; }"),
        ];
        let after = vec![
            construct("p", &["m"], ConstructType::Modu, "function f(a) { return 2; }"),
            construct("p", &["m", "f(a)"], ConstructType::Func, "{ return 2; }"),
        ];
        let changes = diff_constructs(&before, &after).unwrap();
        assert!(changes.added.is_empty());
        assert!(changes.removed.is_empty());
        let modified: Vec<(String, ConstructType)> = changes
            .modified
            .iter()
            .map(|m| (m.fqn.render(), m.ctype))
            .collect();
        assert_eq!(
            modified,
            vec![
                ("p.m".to_owned(), ConstructType::Modu),
                ("p.m.f(a)".to_owned(), ConstructType::Func),
            ]
        );
        for m in &changes.modified {
            assert_ne!(m.before_digest, m.after_digest);
        }
    }

    #[test]
    fn packs_are_excluded_from_diffing() {
        let before = vec![construct("p", &[], ConstructType::Pack, "")];
        let mut after_pack = construct("p", &[], ConstructType::Pack, "");
        after_pack.body_digest = normalize_and_digest("different");
        let changes = diff_constructs(&before, &[after_pack]).unwrap();
        assert!(changes.is_empty());
    }

    #[test]
    fn root_mismatch_is_rejected() {
        let b = vec![construct("p", &["m"], ConstructType::Modu, "x")];
        let a = vec![construct("q", &["m"], ConstructType::Modu, "x")];
        assert!(matches!(
            diff_constructs(&b, &a),
            Err(Error::RootMismatch { .. })
        ));
    }

    #[test]
    fn diff_is_symmetric_under_direction_swap() {
        let before = vec![
            construct("p", &["m"], ConstructType::Modu, "a"),
            construct("p", &["m", "old()"], ConstructType::Func, "{1}"),
            construct("p", &["m", "same()"], ConstructType::Func, "{2}"),
        ];
        let after = vec![
            construct("p", &["m"], ConstructType::Modu, "b"),
            construct("p", &["m", "new()"], ConstructType::Func, "{3}"),
            construct("p", &["m", "same()"], ConstructType::Func, "{2}"),
        ];
        let fwd = diff_constructs(&before, &after).unwrap();
        let rev = diff_constructs(&after, &before).unwrap();
        let fqns = |cs: &[Construct]| {
            cs.iter().map(|c| c.fqn.render()).collect::<Vec<_>>()
        };
        assert_eq!(fqns(&fwd.added), fqns(&rev.removed));
        assert_eq!(fqns(&fwd.removed), fqns(&rev.added));
        assert_eq!(fwd.modified.len(), rev.modified.len());
        for (f, r) in fwd.modified.iter().zip(rev.modified.iter()) {
            assert_eq!(f.fqn, r.fqn);
            assert_eq!(f.before_digest, r.after_digest);
            assert_eq!(f.after_digest, r.before_digest);
        }
    }

    fn write_tree(root: &Path, files: &[(&str, &str)]) {
        for (rel, text) in files {
            let path = root.join(rel);
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(path, text).unwrap();
        }
    }

    #[test]
    fn single_file_fix_adding_one_function() {
        // expected values from a manual construct listing of the two trees:
        // the new function is added and its containing module is modified
        let tmp = tempfile::tempdir().unwrap();
        let before = tmp.path().join("before");
        let after = tmp.path().join("after");
        write_tree(&before, &[("index.js", "function a(x) { return x; }\n")]);
        write_tree(
            &after,
            &[(
                "index.js",
                "function a(x) { return x; }\nfunction guard(x) { return !!x; }\n",
            )],
        );
        let sig =
            build_signature("CVE-0000-0001", "pkg", &before, &after, "test fixture").unwrap();
        let counts = sig.changes.counts_by_type();
        assert_eq!(counts[&ConstructType::Func], (1, 0, 0));
        assert_eq!(counts[&ConstructType::Modu], (0, 1, 0));
        assert_eq!(counts.len(), 2);
    }

    #[test]
    fn identical_trees_reject_signature() {
        let tmp = tempfile::tempdir().unwrap();
        let before = tmp.path().join("before");
        let after = tmp.path().join("after");
        write_tree(&before, &[("index.js", "function a(x) { return x; }\n")]);
        write_tree(&after, &[("index.js", "function a(x) { return x; }\n")]);
        assert!(matches!(
            build_signature("CVE-0000-0002", "pkg", &before, &after, ""),
            Err(Error::NoCodeChange)
        ));
    }

    #[test]
    fn formatting_only_changes_are_no_code_change() {
        let tmp = tempfile::tempdir().unwrap();
        let before = tmp.path().join("before");
        let after = tmp.path().join("after");
        write_tree(&before, &[("index.js", "function a(x) { return x; }\n")]);
        write_tree(
            &after,
            &[("index.js", "// reformatted\nfunction a(x) {\n  return x;\n}\n")],
        );
        assert!(matches!(
            build_signature("CVE-0000-0003", "pkg", &before, &after, ""),
            Err(Error::NoCodeChange)
        ));
    }

    #[test]
    fn composability_on_disjoint_edits() {
        let tmp = tempfile::tempdir().unwrap();
        let base = tmp.path().join("base");
        let edit1 = tmp.path().join("edit1");
        let edit2 = tmp.path().join("edit2");
        let both = tmp.path().join("both");
        let a0 = "function a(x) { return 1; }\n";
        let b0 = "function b(x) { return 1; }\n";
        let a1 = "function a(x) { return 2; }\n";
        let b1 = "function b(x) { return 2; }\n";
        write_tree(&base, &[("a.js", a0), ("b.js", b0)]);
        write_tree(&edit1, &[("a.js", a1), ("b.js", b0)]);
        write_tree(&edit2, &[("a.js", a0), ("b.js", b1)]);
        write_tree(&both, &[("a.js", a1), ("b.js", b1)]);
        let root = Fqn::root("pkg").unwrap();
        let extract = |dir: &Path| extract::extract_package(dir, &root).unwrap().constructs;
        let d1 = diff_constructs(&extract(&base), &extract(&edit1)).unwrap();
        let d2 = diff_constructs(&extract(&base), &extract(&edit2)).unwrap();
        let d12 = diff_constructs(&extract(&base), &extract(&both)).unwrap();
        let keyset = |c: &ConstructChanges| {
            let mut v: Vec<String> = c
                .modified
                .iter()
                .map(|m| format!("M {} {}->{}", m.fqn, m.before_digest, m.after_digest))
                .chain(c.added.iter().map(|a| format!("A {}", a.fqn)))
                .chain(c.removed.iter().map(|r| format!("R {}", r.fqn)))
                .collect();
            v.sort();
            v
        };
        let mut union = keyset(&d1);
        union.extend(keyset(&d2));
        union.sort();
        assert_eq!(keyset(&d12), union);
    }

    #[test]
    fn kb_round_trips_and_rejects_duplicates() {
        let tmp = tempfile::tempdir().unwrap();
        let before = tmp.path().join("before");
        let after = tmp.path().join("after");
        write_tree(&before, &[("index.js", "function a(x) { return 1; }\n")]);
        write_tree(&after, &[("index.js", "function a(x) { return 2; }\n")]);
        let sig =
            build_signature("CVE-2020-1234", "pkg", &before, &after, "fix commit abc").unwrap();

        let kb_dir = tmp.path().join("kb");
        kb_save(&sig, &kb_dir).unwrap();
        let kb = kb_load(&kb_dir).unwrap();
        assert!(kb.warnings.is_empty());
        assert_eq!(kb.signatures, vec![sig.clone()]);

        // a second file carrying the same id
        fs::copy(
            kb_dir.join("CVE-2020-1234.json"),
            kb_dir.join("copy-of-sig.json"),
        )
        .unwrap();
        assert!(matches!(kb_load(&kb_dir), Err(Error::DuplicateVulnId(_))));
    }

    #[test]
    fn empty_kb_directory_loads_empty() {
        let tmp = tempfile::tempdir().unwrap();
        let kb = kb_load(tmp.path()).unwrap();
        assert!(kb.signatures.is_empty());
        assert!(kb.warnings.is_empty());
    }

    #[test]
    fn malformed_signature_files_are_skipped_with_warning() {
        let tmp = tempfile::tempdir().unwrap();
        fs::write(tmp.path().join("broken.json"), "{ not json").unwrap();
        let before = tmp.path().join("before");
        let after = tmp.path().join("after");
        write_tree(&before, &[("index.js", "function a(x) { return 1; }\n")]);
        write_tree(&after, &[("index.js", "function a(x) { return 2; }\n")]);
        let sig = build_signature("CVE-2020-9999", "pkg", &before, &after, "").unwrap();
        kb_save(&sig, tmp.path()).unwrap();

        let kb = kb_load(tmp.path()).unwrap();
        assert_eq!(kb.signatures.len(), 1);
        assert_eq!(kb.warnings.len(), 1);
        assert!(kb.warnings[0].contains("broken.json"));
    }

    #[test]
    fn bad_vuln_ids_are_rejected() {
        assert!(matches!(
            validate_vuln_id("../evil"),
            Err(Error::InvalidVulnId(_))
        ));
        assert!(matches!(validate_vuln_id(""), Err(Error::InvalidVulnId(_))));
        assert!(validate_vuln_id("CVE-2017-16137").is_ok());
        assert!(validate_vuln_id("GHSA-abc1-def2").is_ok());
    }
}
