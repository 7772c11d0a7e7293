//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by extraction, dependency resolution, and the
/// knowledge base.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {path} at byte {offset}: {message}")]
    MalformedJson {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    #[error("manifest {path} is missing the \"name\" field")]
    ManifestMissingName { path: PathBuf },

    #[error(
        "dependency {name:?} declared in both dependencies and devDependencies \
         with different ranges ({runtime_range:?} vs {dev_range:?})"
    )]
    ConflictingDependency {
        name: String,
        runtime_range: String,
        dev_range: String,
    },

    #[error(
        "unsupported lockfile format (lockfileVersion {version:?}): no \"packages\" map; \
         fall back to walking the installed node_modules tree"
    )]
    UnsupportedLockfile { version: Option<u64> },

    #[error("dependency {name:?} required by {required_by:?} has no installed entry")]
    DanglingDependency { name: String, required_by: String },

    #[error("{0} has no node_modules directory; install dependencies first")]
    MissingNodeModules(PathBuf),

    #[error("missing package manifest {0}")]
    MissingManifest(PathBuf),

    #[error("construct lists are rooted at different packages: {left:?} vs {right:?}")]
    RootMismatch { left: String, right: String },

    #[error("no code change detected between the two trees")]
    NoCodeChange,

    #[error("duplicate vulnerability id {0:?} in knowledge base")]
    DuplicateVulnId(String),

    #[error("invalid vulnerability id {0:?}: must be a plain file-name-safe identifier")]
    InvalidVulnId(String),

    #[error("invalid FQN segment {0:?}: segments must be non-empty and contain no '.'")]
    InvalidSegment(String),

    #[error("an FQN must have at least one segment")]
    EmptyFqn,

    #[error("{0:?} does not start with root {1:?}")]
    RootPrefixMismatch(String, String),

    #[error("argument lists are not allowed for {0} constructs")]
    ArgsNotAllowed(crate::construct::ConstructType),

    #[error("invalid construct: {0}")]
    InvalidConstruct(String),

    #[error("summary requires at least one bill of materials")]
    EmptySummaryInput,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps an I/O error with the path it occurred on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Converts a serde_json error into [`Error::MalformedJson`], computing
    /// the byte offset of the failure from its line/column.
    pub fn json(path: impl Into<PathBuf>, text: &str, err: &serde_json::Error) -> Self {
        Error::MalformedJson {
            path: path.into(),
            offset: byte_offset(text, err.line(), err.column()),
            message: err.to_string(),
        }
    }
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (idx, l) in text.split('\n').enumerate() {
        if idx + 1 == line {
            return offset + column.saturating_sub(1).min(l.len());
        }
        offset += l.len() + 1;
    }
    text.len()
}
