//! Construct extraction from JavaScript sources.
//!
//! [`parse_module`] extracts the construct list of one file;
//! [`extract_package`] walks a package directory (skipping any nested
//! `node_modules`) and yields the package's full construct list in
//! deterministic order: PACK constructs for the root and every directory on
//! the path to an extracted file, then per-file constructs in lexicographic
//! path order.

mod lexer;
mod parser;

pub use lexer::ParseIssue;

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use rayon::prelude::*;
use walkdir::WalkDir;

use crate::construct::{empty_digest, normalize_and_digest, Construct, ConstructType, Fqn, Span};
use crate::error::Result;

/// One JavaScript file addressed relative to its package root.
#[derive(Debug, Clone)]
pub struct SourceModule {
    pub package_root: Fqn,
    /// Directory segments plus the file stem (`.js`/`.mjs`/`.cjs` stripped).
    pub relative_path: Vec<String>,
    pub source_text: String,
}

impl SourceModule {
    pub fn new(
        package_root: Fqn,
        relative_path: Vec<String>,
        source_text: impl Into<String>,
    ) -> SourceModule {
        SourceModule {
            package_root,
            relative_path,
            source_text: source_text.into(),
        }
    }

    /// The MODU FQN. Path pieces containing dots (`util.test`) split into
    /// further segments so every non-root segment stays dot-free and the
    /// rendered FQN parses back losslessly.
    pub fn module_fqn(&self) -> Fqn {
        let mut segments = self.package_root.segments().to_vec();
        for piece in &self.relative_path {
            for sub in piece.split('.').filter(|s| !s.is_empty()) {
                segments.push(sub.to_owned());
            }
        }
        Fqn::from_segments(segments).expect("path segments are non-empty and dot-free")
    }
}

/// Result of extracting one module file.
#[derive(Debug, Clone)]
pub struct ExtractionResult {
    /// Constructs in document order; the file's MODU construct is always
    /// first, even when `parse_errors` is non-empty.
    pub constructs: Vec<Construct>,
    pub parse_errors: Vec<ParseIssue>,
}

/// Extracts the construct list of one module. Never fails on malformed
/// input: unparseable regions are skipped and recorded in `parse_errors`.
pub fn parse_module(sm: &SourceModule) -> ExtractionResult {
    let module_fqn = sm.module_fqn();
    let modu = Construct::new(
        ConstructType::Modu,
        module_fqn.clone(),
        full_span(&sm.source_text),
        normalize_and_digest(&sm.source_text),
        Some(sm.package_root.clone()),
    )
    .expect("module construct is structurally valid");

    let mut p = parser::ModuleParser::new(&sm.source_text, module_fqn);
    p.run();

    let mut constructs = Vec::with_capacity(p.constructs.len() + 1);
    constructs.push(modu);
    constructs.extend(p.constructs);
    ExtractionResult {
        constructs,
        parse_errors: p.issues,
    }
}

/// Parse problems of one file within a package, addressed by the file's
/// package-relative path.
#[derive(Debug, Clone)]
pub struct FileIssues {
    pub relative_path: String,
    pub issues: Vec<ParseIssue>,
}

/// A package's full construct list plus any per-file parse problems.
#[derive(Debug, Clone)]
pub struct PackageExtraction {
    pub constructs: Vec<Construct>,
    pub file_issues: Vec<FileIssues>,
}

const JS_EXTENSIONS: [&str; 3] = ["js", "mjs", "cjs"];

/// Extracts every `*.js` / `*.mjs` / `*.cjs` file under `package_dir`,
/// skipping nested `node_modules` trees. Files of a package are parsed in
/// parallel and merged in lexicographic path order, so output is
/// deterministic. Unreadable files degrade to an empty module with the
/// error recorded against that file.
pub fn extract_package(package_dir: &Path, package_root: &Fqn) -> Result<PackageExtraction> {
    let mut files: Vec<String> = Vec::new();
    let walker = WalkDir::new(package_dir)
        .follow_links(false)
        .into_iter()
        .filter_entry(|e| e.file_name() != "node_modules");
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(_) => continue,
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if !JS_EXTENSIONS.contains(&ext) {
            continue;
        }
        let rel = path
            .strip_prefix(package_dir)
            .expect("walkdir yields paths under the root");
        let rel_str = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        files.push(rel_str);
    }
    files.sort();

    // PACK constructs: the root plus every directory on the path to a file.
    let mut dirs: BTreeSet<Vec<String>> = BTreeSet::new();
    dirs.insert(Vec::new());
    for rel in &files {
        let pieces: Vec<&str> = rel.split('/').collect();
        for depth in 1..pieces.len() {
            dirs.insert(pieces[..depth].iter().map(|s| s.to_string()).collect());
        }
    }

    let mut constructs: Vec<Construct> = Vec::new();
    let mut used: HashSet<String> = HashSet::new();
    for dir in &dirs {
        let fqn = dir_fqn(package_root, dir);
        let parent = if dir.is_empty() {
            None
        } else {
            Some(dir_fqn(package_root, &dir[..dir.len() - 1]))
        };
        let fqn = parser::disambiguate(fqn, Span::POINT, &mut used);
        constructs.push(
            Construct::new(ConstructType::Pack, fqn, Span::POINT, empty_digest(), parent)
                .expect("package construct is structurally valid"),
        );
    }

    let extracted: Vec<(String, ExtractionResult)> = files
        .par_iter()
        .map(|rel| {
            let path = package_dir.join(rel.replace('/', std::path::MAIN_SEPARATOR_STR));
            let (text, mut io_issues) = read_source(&path);
            let sm = SourceModule::new(package_root.clone(), split_module_path(rel), text);
            let mut result = parse_module(&sm);
            io_issues.append(&mut result.parse_errors);
            result.parse_errors = io_issues;
            (rel.clone(), result)
        })
        .collect();

    let mut file_issues = Vec::new();
    for (rel, mut result) in extracted {
        if !result.parse_errors.is_empty() {
            file_issues.push(FileIssues {
                relative_path: rel.clone(),
                issues: std::mem::take(&mut result.parse_errors),
            });
        }
        for mut c in result.constructs {
            // cross-file collisions (a directory and a file sharing a stem)
            let span = c.span;
            c.fqn = parser::disambiguate(c.fqn, span, &mut used);
            constructs.push(c);
        }
    }

    Ok(PackageExtraction {
        constructs,
        file_issues,
    })
}

fn read_source(path: &Path) -> (String, Vec<ParseIssue>) {
    match std::fs::read(path) {
        Ok(bytes) => match String::from_utf8(bytes) {
            Ok(s) => (s, Vec::new()),
            Err(e) => {
                let lossy = String::from_utf8_lossy(e.as_bytes()).into_owned();
                (
                    lossy,
                    vec![ParseIssue {
                        line: 1,
                        col: 1,
                        message: "invalid UTF-8; lossy conversion applied".into(),
                    }],
                )
            }
        },
        Err(e) => (
            String::new(),
            vec![ParseIssue {
                line: 1,
                col: 1,
                message: format!("unreadable file: {e}"),
            }],
        ),
    }
}

/// Splits a package-relative path into directory segments plus the stem.
fn split_module_path(rel: &str) -> Vec<String> {
    let mut segments: Vec<String> = rel.split('/').map(str::to_owned).collect();
    if let Some(file) = segments.last_mut() {
        for ext in JS_EXTENSIONS {
            if let Some(stem) = file.strip_suffix(&format!(".{ext}")) {
                *file = stem.to_owned();
                break;
            }
        }
    }
    segments
}

fn dir_fqn(package_root: &Fqn, dir: &[String]) -> Fqn {
    let mut segments = package_root.segments().to_vec();
    for piece in dir {
        for sub in piece.split('.').filter(|s| !s.is_empty()) {
            segments.push(sub.to_owned());
        }
    }
    Fqn::from_segments(segments).expect("directory segments are valid")
}

fn full_span(text: &str) -> Span {
    if text.is_empty() {
        return Span::POINT;
    }
    let mut line = 1u32;
    let mut col = 1u32;
    for c in text.chars() {
        if c == '\n' || c == '\u{2028}' || c == '\u{2029}' {
            line += 1;
            col = 1;
        } else if c == '\r' {
            // counted by the following \n when present
            continue;
        } else {
            col += 1;
        }
    }
    Span::new(1, 1, line, col)
}
