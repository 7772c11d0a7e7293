//! Low-level JavaScript lexical helpers shared by the source normalizer
//! and the token lexer.

/// True for characters that may start an identifier.
pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

/// True for characters that may continue an identifier.
pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// ECMAScript line terminators.
pub(crate) fn is_line_terminator(c: char) -> bool {
    matches!(c, '\n' | '\r' | '\u{2028}' | '\u{2029}')
}

/// The last significant piece of input seen before a `/`, used to decide
/// whether the slash starts a regular expression literal or is a division
/// operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum PrevSignificant {
    /// Start of input.
    None,
    /// An identifier or keyword; the string is the word itself.
    Word(String),
    /// A string, template, number, or regex literal.
    Literal,
    /// A punctuator, identified by its last character.
    Punct(char),
}

/// Keywords after which a `/` starts a regex literal rather than a division.
const REGEX_PRECEDING_KEYWORDS: &[&str] = &[
    "return", "typeof", "instanceof", "in", "of", "new", "delete", "void", "throw", "case", "do",
    "else", "yield", "await",
];

/// Division is only possible after an expression; everywhere else a `/`
/// begins a regex literal. Closing `)`/`]` and value-like tokens end
/// expressions; `}` is treated as a block end (regex allowed), which is the
/// common case at statement level.
pub(crate) fn regex_can_follow(prev: &PrevSignificant) -> bool {
    match prev {
        PrevSignificant::None => true,
        PrevSignificant::Word(w) => REGEX_PRECEDING_KEYWORDS.contains(&w.as_str()),
        PrevSignificant::Literal => false,
        PrevSignificant::Punct(c) => !matches!(c, ')' | ']'),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regex_position_heuristic() {
        assert!(regex_can_follow(&PrevSignificant::None));
        assert!(regex_can_follow(&PrevSignificant::Word("return".into())));
        assert!(regex_can_follow(&PrevSignificant::Punct('(')));
        assert!(regex_can_follow(&PrevSignificant::Punct('=')));
        assert!(regex_can_follow(&PrevSignificant::Punct('{')));
        assert!(!regex_can_follow(&PrevSignificant::Word("count".into())));
        assert!(!regex_can_follow(&PrevSignificant::Literal));
        assert!(!regex_can_follow(&PrevSignificant::Punct(')')));
        assert!(!regex_can_follow(&PrevSignificant::Punct(']')));
    }
}
