//! npm dependency graph resolution and classification.
//!
//! The graph comes from `package-lock.json` (lockfile v2/v3 `packages` map)
//! or, as a fallback, from walking the installed `node_modules` tree; both
//! paths produce the same shape. [`classify`] then assigns each node its
//! two features: scope (runtime vs test) and depth (direct vs transitive).
//!
//! Scope is reachability-based: a node is `runtime` iff some path from the
//! application root reaches it whose first edge is a root `dependencies`
//! entry; nodes reachable only through root `devDependencies` are `test`.
//! Depth is name-based: `direct` iff the name appears in the root manifest.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parsed `package.json` of the application root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub name: String,
    pub version: String,
    pub dependencies: BTreeMap<String, String>,
    pub dev_dependencies: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct RawManifest {
    name: Option<String>,
    version: Option<String>,
    #[serde(default)]
    dependencies: BTreeMap<String, String>,
    #[serde(default, rename = "devDependencies")]
    dev_dependencies: BTreeMap<String, String>,
}

/// Parses a `package.json` text. A name declared in both dependency maps
/// with different ranges is rejected as malformed.
pub fn parse_manifest(text: &str, path: &Path) -> Result<Manifest> {
    let raw: RawManifest =
        serde_json::from_str(text).map_err(|e| Error::json(path, text, &e))?;
    let name = raw.name.ok_or_else(|| Error::ManifestMissingName {
        path: path.to_path_buf(),
    })?;
    for (dep, range) in &raw.dependencies {
        if let Some(dev_range) = raw.dev_dependencies.get(dep) {
            if dev_range != range {
                return Err(Error::ConflictingDependency {
                    name: dep.clone(),
                    runtime_range: range.clone(),
                    dev_range: dev_range.clone(),
                });
            }
        }
    }
    Ok(Manifest {
        name,
        version: raw.version.unwrap_or_default(),
        dependencies: raw.dependencies,
        dev_dependencies: raw.dev_dependencies,
    })
}

/// Dependency scope feature: shipped to production or development-only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Runtime,
    Test,
}

/// Dependency depth feature: declared by the application itself or pulled
/// in by another dependency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Depth {
    Direct,
    Transitive,
}

/// One installed package instance. Identity is the install path: the same
/// (name, version) may be installed at several paths and each instance is
/// its own node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyNode {
    pub name: String,
    pub version: String,
    /// Install directory relative to the application root, `/`-separated
    /// (`node_modules/debug`, `node_modules/a/node_modules/b`).
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scope: Option<Scope>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub depth: Option<Depth>,
    /// The lockfile's own `dev` marker, kept only to cross-check the
    /// computed scope.
    #[serde(skip)]
    pub lockfile_dev: Option<bool>,
}

/// The resolved dependency graph. `nodes` holds every installed dependency
/// reachable from the root; `edges` are (parent, child) index pairs with
/// `None` as the application root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    pub root_name: String,
    pub root_version: String,
    pub nodes: Vec<DependencyNode>,
    pub edges: Vec<(Option<usize>, usize)>,
}

impl DependencyGraph {
    /// Indices of the root's children, sorted by (name, path).
    pub fn root_children(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter(|(from, _)| from.is_none())
            .map(|&(_, to)| to)
            .collect();
        out.sort_by(|&a, &b| {
            (&self.nodes[a].name, &self.nodes[a].path)
                .cmp(&(&self.nodes[b].name, &self.nodes[b].path))
        });
        out.dedup();
        out
    }

    /// Children of a node, sorted by (name, path).
    pub fn children_of(&self, idx: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter(|(from, _)| *from == Some(idx))
            .map(|&(_, to)| to)
            .collect();
        out.sort_by(|&a, &b| {
            (&self.nodes[a].name, &self.nodes[a].path)
                .cmp(&(&self.nodes[b].name, &self.nodes[b].path))
        });
        out.dedup();
        out
    }

    /// Depth-first pre-order over the dependency nodes, children sorted by
    /// name; the traversal order used everywhere downstream.
    pub fn depth_first_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = self.root_children().into_iter().rev().collect();
        while let Some(idx) = stack.pop() {
            if seen[idx] {
                continue;
            }
            seen[idx] = true;
            order.push(idx);
            for child in self.children_of(idx).into_iter().rev() {
                stack.push(child);
            }
        }
        order
    }

    /// The graph's canonical JSON: node list plus edge index pairs, root
    /// edges encoded with `from = -1`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "root": {"name": self.root_name, "version": self.root_version},
            "nodes": self.nodes,
            "edges": self
                .edges
                .iter()
                .map(|(from, to)| {
                    (from.map(|f| f as i64).unwrap_or(-1), *to as i64)
                })
                .collect::<Vec<(i64, i64)>>(),
        })
    }
}

// ---- lockfile ------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct RawLockfile {
    #[serde(rename = "lockfileVersion")]
    lockfile_version: Option<u64>,
    name: Option<String>,
    version: Option<String>,
    packages: Option<BTreeMap<String, RawLockEntry>>,
}

#[derive(Debug, Deserialize)]
struct RawLockEntry {
    name: Option<String>,
    version: Option<String>,
    #[serde(default)]
    dev: Option<bool>,
    #[serde(default)]
    link: Option<bool>,
    #[serde(default)]
    dependencies: BTreeMap<String, String>,
    #[serde(default, rename = "devDependencies")]
    dev_dependencies: BTreeMap<String, String>,
}

/// Builds the dependency graph from a lockfile with a v2/v3 `packages` map.
/// Declared dependencies resolve against install paths by npm's
/// nearest-ancestor rule; a declared dependency with no installed entry is
/// a hard error, and entries unreachable from the root are dropped.
pub fn parse_lockfile(text: &str, path: &Path) -> Result<DependencyGraph> {
    let raw: RawLockfile =
        serde_json::from_str(text).map_err(|e| Error::json(path, text, &e))?;
    let Some(packages) = raw.packages else {
        return Err(Error::UnsupportedLockfile {
            version: raw.lockfile_version,
        });
    };

    let mut installed: BTreeMap<String, &RawLockEntry> = BTreeMap::new();
    for (key, entry) in &packages {
        if key.is_empty() || entry.link == Some(true) {
            continue;
        }
        if key.starts_with("node_modules/") || key.contains("/node_modules/") {
            installed.insert(key.clone(), entry);
        }
    }

    let root_entry = packages.get("");
    let root_name = root_entry
        .and_then(|e| e.name.clone())
        .or(raw.name)
        .unwrap_or_default();
    let root_version = root_entry
        .and_then(|e| e.version.clone())
        .or(raw.version)
        .unwrap_or_default();

    let mut root_declared: BTreeSet<String> = BTreeSet::new();
    if let Some(root) = root_entry {
        root_declared.extend(root.dependencies.keys().cloned());
        root_declared.extend(root.dev_dependencies.keys().cloned());
    }

    let declared_of = |install_path: &str| -> Vec<String> {
        installed
            .get(install_path)
            .map(|e| e.dependencies.keys().cloned().collect())
            .unwrap_or_default()
    };
    let resolve = |from_path: &str, name: &str| -> Option<String> {
        for scope in scope_chain(from_path) {
            let candidate = if scope.is_empty() {
                format!("node_modules/{name}")
            } else {
                format!("{scope}/node_modules/{name}")
            };
            if installed.contains_key(&candidate) {
                return Some(candidate);
            }
        }
        None
    };

    // DFS from the root. Edges into the current DFS stack are dropped so
    // declared-dependency cycles cannot enter the graph.
    let mut reachable: BTreeSet<String> = BTreeSet::new();
    let mut edges_by_path: Vec<(Option<String>, String)> = Vec::new();
    let mut on_stack: HashSet<String> = HashSet::new();

    fn visit(
        current: &str,
        declared_of: &dyn Fn(&str) -> Vec<String>,
        resolve: &dyn Fn(&str, &str) -> Option<String>,
        reachable: &mut BTreeSet<String>,
        edges: &mut Vec<(Option<String>, String)>,
        on_stack: &mut HashSet<String>,
    ) -> Result<()> {
        on_stack.insert(current.to_owned());
        for dep_name in declared_of(current) {
            let target = resolve(current, &dep_name).ok_or_else(|| Error::DanglingDependency {
                name: dep_name.clone(),
                required_by: current.to_owned(),
            })?;
            if on_stack.contains(&target) {
                continue; // cycle broken at the first repeated node
            }
            edges.push((Some(current.to_owned()), target.clone()));
            if reachable.insert(target.clone()) {
                visit(&target, declared_of, resolve, reachable, edges, on_stack)?;
            }
        }
        on_stack.remove(current);
        Ok(())
    }

    for dep_name in &root_declared {
        let target = resolve("", dep_name).ok_or_else(|| Error::DanglingDependency {
            name: dep_name.clone(),
            required_by: root_name.clone(),
        })?;
        edges_by_path.push((None, target.clone()));
        if reachable.insert(target.clone()) {
            visit(
                &target,
                &declared_of,
                &resolve,
                &mut reachable,
                &mut edges_by_path,
                &mut on_stack,
            )?;
        }
    }

    let mut nodes = Vec::with_capacity(reachable.len());
    let mut index_of: HashMap<String, usize> = HashMap::new();
    for install_path in &reachable {
        let entry = installed[install_path];
        index_of.insert(install_path.clone(), nodes.len());
        nodes.push(DependencyNode {
            name: entry
                .name
                .clone()
                .unwrap_or_else(|| name_from_path(install_path)),
            version: entry.version.clone().unwrap_or_default(),
            path: install_path.clone(),
            scope: None,
            depth: None,
            lockfile_dev: entry.dev,
        });
    }

    let mut edges: Vec<(Option<usize>, usize)> = edges_by_path
        .into_iter()
        .map(|(from, to)| (from.map(|f| index_of[&f]), index_of[&to]))
        .collect();
    edges.sort();
    edges.dedup();

    Ok(DependencyGraph {
        root_name,
        root_version,
        nodes,
        edges,
    })
}

/// Ancestor scopes searched by nearest-ancestor resolution, nearest first:
/// the package's own directory, each enclosing package, then the root.
fn scope_chain(install_path: &str) -> Vec<String> {
    let mut chain = vec![install_path.to_owned()];
    let mut cur = install_path;
    while let Some(idx) = cur.rfind("/node_modules/") {
        cur = &cur[..idx];
        chain.push(cur.to_owned());
    }
    if !cur.is_empty() {
        chain.push(String::new());
    }
    chain
}

/// The package name encoded by an install path: the part after the last
/// `node_modules/`, keeping an `@scope/` prefix intact.
fn name_from_path(install_path: &str) -> String {
    match install_path.rfind("node_modules/") {
        Some(idx) => install_path[idx + "node_modules/".len()..].to_owned(),
        None => install_path.to_owned(),
    }
}

// ---- node_modules walker ---------------------------------------------------

/// Fallback when no usable lockfile exists: reconstructs the graph from the
/// installed `node_modules` tree. Directories without a parseable manifest
/// are skipped; a declared dependency that is not installed is skipped with
/// a warning (the walk reflects what is actually on disk).
pub fn walk_node_modules(app_dir: &Path) -> Result<(DependencyGraph, Vec<String>)> {
    let manifest_path = app_dir.join("package.json");
    let manifest_text = std::fs::read_to_string(&manifest_path)
        .map_err(|_| Error::MissingManifest(manifest_path.clone()))?;
    let root_manifest = parse_manifest(&manifest_text, &manifest_path)?;

    let nm = app_dir.join("node_modules");
    if !nm.is_dir() {
        return Err(Error::MissingNodeModules(app_dir.to_path_buf()));
    }

    let mut warnings: Vec<String> = Vec::new();
    let mut installed: BTreeMap<String, (String, BTreeMap<String, String>)> = BTreeMap::new();
    collect_installed(app_dir, "node_modules", &mut installed, &mut warnings);

    let declared_of = |install_path: &str| -> Vec<String> {
        installed
            .get(install_path)
            .map(|(_, deps)| deps.keys().cloned().collect())
            .unwrap_or_default()
    };
    let resolve = |from_path: &str, name: &str| -> Option<String> {
        for scope in scope_chain(from_path) {
            let candidate = if scope.is_empty() {
                format!("node_modules/{name}")
            } else {
                format!("{scope}/node_modules/{name}")
            };
            if installed.contains_key(&candidate) {
                return Some(candidate);
            }
        }
        None
    };

    let mut root_declared: BTreeSet<String> = BTreeSet::new();
    root_declared.extend(root_manifest.dependencies.keys().cloned());
    root_declared.extend(root_manifest.dev_dependencies.keys().cloned());

    let mut reachable: BTreeSet<String> = BTreeSet::new();
    let mut edges_by_path: Vec<(Option<String>, String)> = Vec::new();
    let mut on_stack: HashSet<String> = HashSet::new();

    #[allow(clippy::too_many_arguments)]
    fn walk(
        from: Option<String>,
        target: String,
        declared_of: &dyn Fn(&str) -> Vec<String>,
        resolve: &dyn Fn(&str, &str) -> Option<String>,
        reachable: &mut BTreeSet<String>,
        edges: &mut Vec<(Option<String>, String)>,
        on_stack: &mut HashSet<String>,
        warnings: &mut Vec<String>,
    ) {
        if on_stack.contains(&target) {
            return; // cycle broken
        }
        edges.push((from, target.clone()));
        if !reachable.insert(target.clone()) {
            return;
        }
        on_stack.insert(target.clone());
        for dep_name in declared_of(&target) {
            match resolve(&target, &dep_name) {
                Some(next) => walk(
                    Some(target.clone()),
                    next,
                    declared_of,
                    resolve,
                    reachable,
                    edges,
                    on_stack,
                    warnings,
                ),
                None => warnings.push(format!(
                    "dependency {dep_name:?} required by {target:?} is not installed; skipped"
                )),
            }
        }
        on_stack.remove(&target);
    }

    for dep_name in &root_declared {
        match resolve("", dep_name) {
            Some(target) => walk(
                None,
                target,
                &declared_of,
                &resolve,
                &mut reachable,
                &mut edges_by_path,
                &mut on_stack,
                &mut warnings,
            ),
            None => warnings.push(format!(
                "declared dependency {dep_name:?} is not installed; skipped"
            )),
        }
    }

    let mut nodes = Vec::with_capacity(reachable.len());
    let mut index_of: HashMap<String, usize> = HashMap::new();
    for install_path in &reachable {
        let (version, _) = &installed[install_path];
        index_of.insert(install_path.clone(), nodes.len());
        nodes.push(DependencyNode {
            name: name_from_path(install_path),
            version: version.clone(),
            path: install_path.clone(),
            scope: None,
            depth: None,
            lockfile_dev: None,
        });
    }
    let mut edges: Vec<(Option<usize>, usize)> = edges_by_path
        .into_iter()
        .map(|(from, to)| (from.map(|f| index_of[&f]), index_of[&to]))
        .collect();
    edges.sort();
    edges.dedup();

    Ok((
        DependencyGraph {
            root_name: root_manifest.name,
            root_version: root_manifest.version,
            nodes,
            edges,
        },
        warnings,
    ))
}

/// Collects (install_path → (version, declared deps)) for every package
/// directory under `prefix`, recursing into nested `node_modules`.
fn collect_installed(
    app_dir: &Path,
    prefix: &str,
    installed: &mut BTreeMap<String, (String, BTreeMap<String, String>)>,
    warnings: &mut Vec<String>,
) {
    let dir = app_dir.join(prefix.replace('/', std::path::MAIN_SEPARATOR_STR));
    let Ok(entries) = std::fs::read_dir(&dir) else {
        return;
    };
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().map(|t| t.is_dir()).unwrap_or(false))
        .filter_map(|e| e.file_name().into_string().ok())
        .collect();
    names.sort();
    for name in names {
        if name.starts_with('.') {
            continue;
        }
        if name.starts_with('@') {
            // scope folder: its children are the packages
            let scope_prefix = format!("{prefix}/{name}");
            let scope_dir =
                app_dir.join(scope_prefix.replace('/', std::path::MAIN_SEPARATOR_STR));
            let Ok(scoped) = std::fs::read_dir(&scope_dir) else {
                continue;
            };
            let mut scoped_names: Vec<String> = scoped
                .filter_map(|e| e.ok())
                .filter(|e| e.file_type().map(|t| t.is_dir()).unwrap_or(false))
                .filter_map(|e| e.file_name().into_string().ok())
                .collect();
            scoped_names.sort();
            for pkg in scoped_names {
                register_package(
                    app_dir,
                    &format!("{scope_prefix}/{pkg}"),
                    installed,
                    warnings,
                );
            }
        } else {
            register_package(app_dir, &format!("{prefix}/{name}"), installed, warnings);
        }
    }
}

fn register_package(
    app_dir: &Path,
    install_path: &str,
    installed: &mut BTreeMap<String, (String, BTreeMap<String, String>)>,
    warnings: &mut Vec<String>,
) {
    let pkg_dir = app_dir.join(install_path.replace('/', std::path::MAIN_SEPARATOR_STR));
    let manifest_path = pkg_dir.join("package.json");
    let Ok(text) = std::fs::read_to_string(&manifest_path) else {
        return; // not a package directory (e.g. .bin)
    };
    match parse_manifest(&text, &manifest_path) {
        Ok(m) => {
            installed.insert(install_path.to_owned(), (m.version, m.dependencies));
        }
        Err(e) => {
            warnings.push(format!("skipping {install_path}: {e}"));
            return;
        }
    }
    let nested = pkg_dir.join("node_modules");
    if nested.is_dir() {
        collect_installed(
            app_dir,
            &format!("{install_path}/node_modules"),
            installed,
            warnings,
        );
    }
}

// ---- classification ---------------------------------------------------------

/// Fills scope and depth for every node. Returns warnings where a
/// lockfile `dev` flag disagrees with the computed scope; the
/// reachability-based scope is the normative one.
pub fn classify(graph: &mut DependencyGraph, root_manifest: &Manifest) -> Vec<String> {
    let mut warnings = Vec::new();

    // depth: direct iff the name is declared by the root manifest
    let declared: HashSet<&str> = root_manifest
        .dependencies
        .keys()
        .chain(root_manifest.dev_dependencies.keys())
        .map(String::as_str)
        .collect();
    for node in &mut graph.nodes {
        node.depth = Some(if declared.contains(node.name.as_str()) {
            Depth::Direct
        } else {
            Depth::Transitive
        });
    }

    // scope: flood from the root's runtime children; everything else is test
    let mut runtime = vec![false; graph.nodes.len()];
    let mut queue: Vec<usize> = graph
        .root_children()
        .into_iter()
        .filter(|&idx| {
            root_manifest
                .dependencies
                .contains_key(graph.nodes[idx].name.as_str())
        })
        .collect();
    while let Some(idx) = queue.pop() {
        if runtime[idx] {
            continue;
        }
        runtime[idx] = true;
        queue.extend(graph.children_of(idx));
    }
    for (idx, node) in graph.nodes.iter_mut().enumerate() {
        node.scope = Some(if runtime[idx] {
            Scope::Runtime
        } else {
            Scope::Test
        });
        if let Some(dev_flag) = node.lockfile_dev {
            let computed_dev = !runtime[idx];
            if dev_flag != computed_dev {
                warnings.push(format!(
                    "lockfile marks {} ({}) dev={} but reachability says {}",
                    node.name,
                    node.path,
                    dev_flag,
                    if computed_dev { "test" } else { "runtime" },
                ));
            }
        }
    }
    warnings
}

/// Resolves via the lockfile when present and parseable, otherwise walks
/// the installed node_modules tree.
pub fn resolve_graph(app_dir: &Path) -> Result<(DependencyGraph, Vec<String>)> {
    let lock_path = app_dir.join("package-lock.json");
    if lock_path.is_file() {
        let text = std::fs::read_to_string(&lock_path)
            .map_err(|e| Error::io(lock_path.clone(), e))?;
        match parse_lockfile(&text, &lock_path) {
            Ok(graph) => return Ok((graph, Vec::new())),
            Err(Error::UnsupportedLockfile { version }) => {
                let (graph, mut warnings) = walk_node_modules(app_dir)?;
                warnings.insert(
                    0,
                    format!(
                        "package-lock.json (lockfileVersion {version:?}) is unsupported; \
                         walked node_modules instead"
                    ),
                );
                return Ok((graph, warnings));
            }
            Err(other) => return Err(other),
        }
    }
    walk_node_modules(app_dir)
}
