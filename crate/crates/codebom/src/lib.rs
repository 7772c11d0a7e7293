//! Construct-level bill of materials and code-centric vulnerability
//! detection for Node.js applications.
//!
//! The pipeline has three legs:
//!
//! 1. **Extraction** — [`extract`] parses a defined ECMAScript subset and
//!    inventories every package as a list of [`construct::Construct`]s
//!    (packages, modules, functions, classes, methods, constructors,
//!    objects), each with a fully-qualified name and a normalized body
//!    digest.
//! 2. **Composition** — [`deps`] resolves the npm dependency graph from
//!    `package-lock.json` (or by walking `node_modules`) and classifies
//!    every dependency by scope (runtime/test) and depth
//!    (direct/transitive); [`bom`] assembles the application's bill of
//!    materials.
//! 3. **Detection** — [`kb`] builds vulnerability signatures by diffing
//!    pre-fix and post-fix source trees, and [`detect`] matches a BOM
//!    against the signature knowledge base by construct identity, so
//!    vulnerable code is flagged wherever it occurs, regardless of package
//!    name or version metadata.

pub mod bom;
pub mod construct;
pub mod deps;
pub mod detect;
mod error;
pub mod extract;
pub mod kb;
mod lexical;
pub mod normalize;
pub mod stats;

pub use error::{Error, Result};
