//! The program-construct model: construct taxonomy, fully-qualified names,
//! and normalized body digests.
//!
//! A construct is one structural program element — a package or directory,
//! a file, a function, a class, a method, a constructor, or an object — with
//! a dot-joined fully-qualified name rooted at its package. Constructs are
//! the unit of both the bill of materials and vulnerability signatures.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::normalize;

/// The seven construct types. Serialized as their four-letter codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ConstructType {
    /// Package or directory.
    Pack,
    /// A JavaScript file.
    Modu,
    /// Function, named with its argument list.
    Func,
    /// Class, named with its extended class.
    Clas,
    /// Class method, named with its argument list.
    Meth,
    /// Class constructor, named with its argument list.
    Cons,
    /// Object bound by a variable declaration.
    Objt,
}

impl ConstructType {
    pub const ALL: [ConstructType; 7] = [
        ConstructType::Pack,
        ConstructType::Modu,
        ConstructType::Func,
        ConstructType::Clas,
        ConstructType::Meth,
        ConstructType::Cons,
        ConstructType::Objt,
    ];

    pub fn code(self) -> &'static str {
        match self {
            ConstructType::Pack => "PACK",
            ConstructType::Modu => "MODU",
            ConstructType::Func => "FUNC",
            ConstructType::Clas => "CLAS",
            ConstructType::Meth => "METH",
            ConstructType::Cons => "CONS",
            ConstructType::Objt => "OBJT",
        }
    }

    /// True for the types whose FQN segment carries an argument list.
    pub fn has_args(self) -> bool {
        matches!(
            self,
            ConstructType::Func | ConstructType::Meth | ConstructType::Cons | ConstructType::Clas
        )
    }
}

impl fmt::Display for ConstructType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// A fully-qualified construct name: a non-empty list of segments rendered
/// joined by `.`.
///
/// Segment 0 is the package root and is opaque — it may contain `@` and `/`
/// for scoped packages (and, for published packages like `socket.io`, even
/// a dot). All later segments are guaranteed dot-free, so a rendered FQN
/// round-trips through [`Fqn::parse_with_root`] losslessly; the contextless
/// [`Fqn::parse`] is exact whenever the root itself has no dot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fqn(Vec<String>);

impl Fqn {
    /// A single-segment FQN for a package root. The name is opaque.
    pub fn root(name: impl Into<String>) -> Result<Fqn> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::EmptyFqn);
        }
        Ok(Fqn(vec![name]))
    }

    /// Builds from explicit segments. Segment 0 is opaque; later segments
    /// must be non-empty and dot-free.
    pub fn from_segments(segments: Vec<String>) -> Result<Fqn> {
        if segments.is_empty() {
            return Err(Error::EmptyFqn);
        }
        if segments[0].is_empty() {
            return Err(Error::InvalidSegment(segments[0].clone()));
        }
        for seg in &segments[1..] {
            if seg.is_empty() || seg.contains('.') {
                return Err(Error::InvalidSegment(seg.clone()));
            }
        }
        Ok(Fqn(segments))
    }

    /// Extends by one segment.
    pub fn child(&self, segment: impl Into<String>) -> Result<Fqn> {
        let segment = segment.into();
        if segment.is_empty() || segment.contains('.') {
            return Err(Error::InvalidSegment(segment));
        }
        let mut segments = self.0.clone();
        segments.push(segment);
        Ok(Fqn(segments))
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    pub fn root_segment(&self) -> &str {
        &self.0[0]
    }

    pub fn render(&self) -> String {
        self.0.join(".")
    }

    /// Splits a rendered FQN on `.`. Exact only when the root segment
    /// contains no dot; loaders that know the root should prefer
    /// [`Fqn::parse_with_root`].
    pub fn parse(rendered: &str) -> Result<Fqn> {
        let segments: Vec<String> = rendered.split('.').map(str::to_owned).collect();
        Fqn::from_segments(segments)
    }

    /// Splits a rendered FQN treating `root` as one opaque leading segment.
    pub fn parse_with_root(root: &str, rendered: &str) -> Result<Fqn> {
        if rendered == root {
            return Fqn::root(root);
        }
        let rest = rendered
            .strip_prefix(root)
            .and_then(|r| r.strip_prefix('.'))
            .ok_or_else(|| Error::RootPrefixMismatch(rendered.to_owned(), root.to_owned()))?;
        let mut segments = vec![root.to_owned()];
        segments.extend(rest.split('.').map(str::to_owned));
        Fqn::from_segments(segments)
    }

    /// Re-anchors an FQN parsed without context so that `root` becomes one
    /// opaque segment again (needed after deserializing names whose package
    /// root contains dots).
    pub fn reroot(&self, root: &str) -> Result<Fqn> {
        Fqn::parse_with_root(root, &self.render())
    }

    /// The FQN with the package root removed; empty for a root package.
    pub fn relative(&self) -> RelativeFqn {
        RelativeFqn(self.0[1..].to_vec())
    }

    /// True when `self`'s segments are a strict prefix of `other`'s.
    pub fn is_strict_prefix_of(&self, other: &Fqn) -> bool {
        self.0.len() < other.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for Fqn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for Fqn {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Fqn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Fqn, D::Error> {
        let s = String::deserialize(deserializer)?;
        Fqn::parse(&s).map_err(D::Error::custom)
    }
}

/// A package-root-relative FQN suffix; may be empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RelativeFqn(Vec<String>);

impl RelativeFqn {
    pub fn segments(&self) -> &[String] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn render(&self) -> String {
        self.0.join(".")
    }
}

impl fmt::Display for RelativeFqn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// 1-based source extent. `end_col` is one past the last character, so an
/// empty extent has equal start and end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(start_line: u32, start_col: u32, end_line: u32, end_col: u32) -> Span {
        Span {
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    pub const POINT: Span = Span {
        start_line: 1,
        start_col: 1,
        end_line: 1,
        end_col: 1,
    };

    pub fn is_well_ordered(&self) -> bool {
        (self.start_line, self.start_col) <= (self.end_line, self.end_col)
    }
}

impl Serialize for Span {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (self.start_line, self.start_col, self.end_line, self.end_col).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Span {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Span, D::Error> {
        let [a, b, c, d] = <[u32; 4]>::deserialize(deserializer)?;
        Ok(Span::new(a, b, c, d))
    }
}

/// One program construct. Field order matches the canonical JSON rendering:
/// `{"type":...,"fqn":...,"span":[...],"digest":...,"parent":...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construct {
    #[serde(rename = "type")]
    pub ctype: ConstructType,
    pub fqn: Fqn,
    pub span: Span,
    #[serde(rename = "digest")]
    pub body_digest: String,
    #[serde(rename = "parent", skip_serializing_if = "Option::is_none", default)]
    pub parent_fqn: Option<Fqn>,
}

impl Construct {
    pub fn new(
        ctype: ConstructType,
        fqn: Fqn,
        span: Span,
        body_digest: String,
        parent_fqn: Option<Fqn>,
    ) -> Result<Construct> {
        let c = Construct {
            ctype,
            fqn,
            span,
            body_digest,
            parent_fqn,
        };
        c.validate()?;
        Ok(c)
    }

    /// Checks the structural invariants: parent prefix, hierarchy legality,
    /// span ordering, and digest shape.
    pub fn validate(&self) -> Result<()> {
        if !self.span.is_well_ordered() {
            return Err(Error::InvalidConstruct(format!(
                "span of {} is not well-ordered",
                self.fqn
            )));
        }
        if self.body_digest.len() != 64
            || !self.body_digest.bytes().all(|b| b.is_ascii_hexdigit())
        {
            return Err(Error::InvalidConstruct(format!(
                "digest of {} is not 64 hex characters",
                self.fqn
            )));
        }
        match &self.parent_fqn {
            None => {
                if self.ctype != ConstructType::Pack {
                    return Err(Error::InvalidConstruct(format!(
                        "{} ({}) has no parent; only a root PACK may be parentless",
                        self.fqn, self.ctype
                    )));
                }
            }
            Some(parent) => {
                if !parent.is_strict_prefix_of(&self.fqn) {
                    return Err(Error::InvalidConstruct(format!(
                        "parent {} is not a strict prefix of {}",
                        parent, self.fqn
                    )));
                }
            }
        }
        Ok(())
    }

    /// The package-root-relative rendered FQN; the unit of code-centric
    /// matching.
    pub fn relative_fqn(&self) -> RelativeFqn {
        self.fqn.relative()
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("construct serialization is infallible")
    }
}

/// How a construct is named at its declaration site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructName {
    Named(String),
    /// Anonymous constructs are named by declaration position.
    Anonymous { line: u32, col: u32 },
}

impl ConstructName {
    fn render(&self) -> String {
        match self {
            ConstructName::Named(n) => n.clone(),
            ConstructName::Anonymous { line, col } => format!("<anon:L{line}:C{col}>"),
        }
    }
}

/// Builds the FQN for a construct declared under `parent`.
///
/// `FUNC`/`METH`/`CONS` segments render as `name(arg1,arg2)` with no spaces;
/// `CLAS` renders as `Name()` or `Name(Base)` when an extends clause exists
/// (`args` carries the single base name); `PACK`/`MODU`/`OBJT` render the
/// bare name. Anonymous constructs render `<anon:L<line>:C<col>>` in place
/// of the name.
pub fn build_fqn(
    parent: &Fqn,
    ctype: ConstructType,
    name: &ConstructName,
    args: &[String],
) -> Result<Fqn> {
    if !ctype.has_args() && !args.is_empty() {
        return Err(Error::ArgsNotAllowed(ctype));
    }
    let rendered_name = name.render();
    if rendered_name.contains('.') {
        return Err(Error::InvalidSegment(rendered_name));
    }
    for arg in args {
        if arg.contains('.') {
            return Err(Error::InvalidSegment(arg.clone()));
        }
    }
    let segment = if ctype.has_args() {
        format!("{}({})", rendered_name, args.join(","))
    } else {
        rendered_name
    };
    parent.child(segment)
}

/// SHA-256 of the normalized body text, as 64 hex characters. The digest of
/// a PACK construct is the digest of the empty string.
pub fn normalize_and_digest(body_source: &str) -> String {
    normalize::digest_hex(body_source)
}

/// Digest used for every PACK construct.
pub fn empty_digest() -> String {
    normalize::digest_hex("")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fqn(parts: &[&str]) -> Fqn {
        Fqn::from_segments(parts.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn construct_type_codes_round_trip() {
        for ct in ConstructType::ALL {
            let json = serde_json::to_string(&ct).unwrap();
            assert_eq!(json, format!("\"{}\"", ct.code()));
            let back: ConstructType = serde_json::from_str(&json).unwrap();
            assert_eq!(back, ct);
        }
    }

    #[test]
    fn build_fqn_function_with_args() {
        let parent = fqn(&["ProjectA", "utils", "util_b"]);
        let f = build_fqn(
            &parent,
            ConstructType::Func,
            &ConstructName::Named("buy".into()),
            &["item".into()],
        )
        .unwrap();
        assert_eq!(f.render(), "ProjectA.utils.util_b.buy(item)");
    }

    #[test]
    fn build_fqn_method_under_class() {
        let class = fqn(&["ProjectA", "utils", "util_b", "Car()"]);
        let m = build_fqn(
            &class,
            ConstructType::Meth,
            &ConstructName::Named("drive".into()),
            &["distance".into(), "direction".into()],
        )
        .unwrap();
        assert_eq!(
            m.render(),
            "ProjectA.utils.util_b.Car().drive(distance,direction)"
        );
    }

    #[test]
    fn build_fqn_object_bare_name() {
        let parent = fqn(&["ProjectA", "utils", "util_b"]);
        let o = build_fqn(
            &parent,
            ConstructType::Objt,
            &ConstructName::Named("item_list".into()),
            &[],
        )
        .unwrap();
        assert_eq!(o.render(), "ProjectA.utils.util_b.item_list");
    }

    #[test]
    fn build_fqn_anonymous_marker() {
        let parent = fqn(&["M"]);
        let f = build_fqn(
            &parent,
            ConstructType::Func,
            &ConstructName::Anonymous { line: 9, col: 5 },
            &["v".into()],
        )
        .unwrap();
        assert_eq!(f.render(), "M.<anon:L9:C5>(v)");
    }

    #[test]
    fn build_fqn_class_with_and_without_base() {
        let parent = fqn(&["P", "m"]);
        let plain = build_fqn(
            &parent,
            ConstructType::Clas,
            &ConstructName::Named("Car".into()),
            &[],
        )
        .unwrap();
        assert_eq!(plain.render(), "P.m.Car()");
        let derived = build_fqn(
            &parent,
            ConstructType::Clas,
            &ConstructName::Named("Car".into()),
            &["Vehicle".into()],
        )
        .unwrap();
        assert_eq!(derived.render(), "P.m.Car(Vehicle)");
    }

    #[test]
    fn build_fqn_rejects_dotted_names_and_stray_args() {
        let parent = fqn(&["P"]);
        assert!(build_fqn(
            &parent,
            ConstructType::Func,
            &ConstructName::Named("a.b".into()),
            &[],
        )
        .is_err());
        assert!(build_fqn(
            &parent,
            ConstructType::Objt,
            &ConstructName::Named("o".into()),
            &["x".into()],
        )
        .is_err());
    }

    #[test]
    fn relative_fqn_drops_the_package_root() {
        let f = fqn(&["debug", "src", "node", "exports", "formatters", "o(v)"]);
        assert_eq!(f.relative().render(), "src.node.exports.formatters.o(v)");
        assert_eq!(fqn(&["ProjectA"]).relative().render(), "");
        assert!(fqn(&["ProjectA"]).relative().is_empty());
        assert_eq!(
            fqn(&["ProjectA", "utils", "util_b"]).relative().render(),
            "utils.util_b"
        );
    }

    #[test]
    fn scoped_and_dotted_roots_stay_opaque() {
        let f = Fqn::root("@scope/name").unwrap().child("index").unwrap();
        assert_eq!(f.render(), "@scope/name.index");
        assert_eq!(
            Fqn::parse_with_root("@scope/name", "@scope/name.index")
                .unwrap()
                .segments(),
            f.segments()
        );
        let dotted = Fqn::parse_with_root("socket.io", "socket.io.lib.client").unwrap();
        assert_eq!(dotted.segments()[0], "socket.io");
        assert_eq!(dotted.segments().len(), 3);
        // a naive parse splits the dotted root; reroot repairs it
        let naive = Fqn::parse("socket.io.lib.client").unwrap();
        assert_eq!(naive.reroot("socket.io").unwrap(), dotted);
    }

    // oracle: digests computed with an independent SHA-256 over the
    // hand-normalized strings
    const DIGEST_RETURN_1: &str =
        "4c071c3330125cde9ce10b97f2627e3d5deea2bd316f9f4cd761a92b5e426d4d";
    const DIGEST_RETURN_2: &str =
        "3d88cd69aa33958d122d77eaaf3c3f8334d92761ead7b40fdea5f597d0b4bdd0";
    const DIGEST_EMPTY: &str =
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";

    #[test]
    fn digest_is_whitespace_and_comment_insensitive() {
        let a = normalize_and_digest("{ return 1; }");
        let b = normalize_and_digest("{\n  return 1;\n}");
        let c = normalize_and_digest("{ return 1; } // fix");
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, DIGEST_RETURN_1);
    }

    #[test]
    fn digest_distinguishes_different_bodies() {
        let one = normalize_and_digest("{ return 1; }");
        let two = normalize_and_digest("{ return 2; }");
        assert_eq!(one, DIGEST_RETURN_1);
        assert_eq!(two, DIGEST_RETURN_2);
        assert_ne!(one, two);
    }

    #[test]
    fn pack_digest_is_the_empty_digest() {
        assert_eq!(empty_digest(), DIGEST_EMPTY);
    }

    #[test]
    fn construct_canonical_json_field_order() {
        let c = Construct::new(
            ConstructType::Func,
            fqn(&["P", "m", "f(a)"]),
            Span::new(3, 1, 5, 2),
            normalize_and_digest("{ return 1; }"),
            Some(fqn(&["P", "m"])),
        )
        .unwrap();
        assert_eq!(
            c.to_canonical_json(),
            format!(
                "{{\"type\":\"FUNC\",\"fqn\":\"P.m.f(a)\",\"span\":[3,1,5,2],\"digest\":\"{DIGEST_RETURN_1}\",\"parent\":\"P.m\"}}"
            )
        );
        let back: Construct = serde_json::from_str(&c.to_canonical_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn root_pack_serializes_without_parent() {
        let c = Construct::new(
            ConstructType::Pack,
            fqn(&["P"]),
            Span::POINT,
            empty_digest(),
            None,
        )
        .unwrap();
        assert!(!c.to_canonical_json().contains("parent"));
    }

    #[test]
    fn construct_invariants_are_enforced() {
        // non-PACK without parent
        assert!(Construct::new(
            ConstructType::Func,
            fqn(&["P", "f()"]),
            Span::POINT,
            empty_digest(),
            None,
        )
        .is_err());
        // parent not a prefix
        assert!(Construct::new(
            ConstructType::Func,
            fqn(&["P", "f()"]),
            Span::POINT,
            empty_digest(),
            Some(fqn(&["Q"])),
        )
        .is_err());
        // ill-ordered span
        assert!(Construct::new(
            ConstructType::Func,
            fqn(&["P", "f()"]),
            Span::new(2, 1, 1, 1),
            empty_digest(),
            Some(fqn(&["P"])),
        )
        .is_err());
        // bad digest
        assert!(Construct::new(
            ConstructType::Func,
            fqn(&["P", "f()"]),
            Span::POINT,
            "zz".into(),
            Some(fqn(&["P"])),
        )
        .is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn segment() -> impl Strategy<Value = String> {
            "[A-Za-z_$][A-Za-z0-9_$]{0,8}"
        }

        proptest! {
            #[test]
            fn rendered_fqns_round_trip(segs in proptest::collection::vec(segment(), 1..6)) {
                let f = Fqn::from_segments(segs).unwrap();
                prop_assert_eq!(Fqn::parse(&f.render()).unwrap(), f);
            }

            #[test]
            fn digest_is_idempotent_under_normalization(src in ".{0,200}") {
                let normalized = crate::normalize::normalize_source(&src);
                prop_assert_eq!(
                    normalize_and_digest(&src),
                    normalize_and_digest(&normalized)
                );
            }

            #[test]
            fn relative_of_root_child_drops_one_segment(
                root in "[a-z][a-z0-9]{0,8}",
                name in "[a-z][a-z0-9]{0,8}",
            ) {
                let parent = Fqn::root(root).unwrap();
                let f = build_fqn(
                    &parent,
                    ConstructType::Objt,
                    &ConstructName::Named(name.clone()),
                    &[],
                ).unwrap();
                prop_assert_eq!(f.relative().render(), name);
            }
        }
    }
}
