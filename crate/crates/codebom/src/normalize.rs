//! Source normalization for body digests.
//!
//! Normalization strips `//` and `/* */` comments, collapses every run of
//! whitespace outside string-like literals to a single space, and trims the
//! ends. Comment detection follows JavaScript lexical rules: text inside
//! string, template, and regex literals is never treated as a comment and is
//! preserved verbatim, so a URL in a string does not change the digest
//! boundary. The function is total; unterminated literals and comments are
//! normalized up to end of input.

use sha2::{Digest, Sha256};

use crate::lexical::{is_ident_continue, is_line_terminator, regex_can_follow, PrevSignificant};

/// Normalizes a source slice per the digest rules.
pub fn normalize_source(source: &str) -> String {
    let chars: Vec<char> = source.chars().collect();
    let mut out = String::with_capacity(source.len());
    let mut pending_space = false;
    let mut prev = PrevSignificant::None;
    let mut i = 0;

    // Emits one buffered space (if any) and then the verbatim text.
    macro_rules! emit {
        ($text:expr) => {{
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push_str($text);
        }};
    }

    while i < chars.len() {
        let c = chars[i];

        if c.is_whitespace() {
            pending_space = true;
            i += 1;
            continue;
        }

        if c == '/' && i + 1 < chars.len() && chars[i + 1] == '/' {
            while i < chars.len() && !is_line_terminator(chars[i]) {
                i += 1;
            }
            pending_space = true;
            continue;
        }

        if c == '/' && i + 1 < chars.len() && chars[i + 1] == '*' {
            i += 2;
            while i < chars.len() {
                if chars[i] == '*' && i + 1 < chars.len() && chars[i + 1] == '/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            pending_space = true;
            continue;
        }

        if c == '"' || c == '\'' {
            let end = scan_string(&chars, i);
            let text: String = chars[i..end].iter().collect();
            emit!(&text);
            prev = PrevSignificant::Literal;
            i = end;
            continue;
        }

        if c == '`' {
            let end = scan_template(&chars, i);
            let text: String = chars[i..end].iter().collect();
            emit!(&text);
            prev = PrevSignificant::Literal;
            i = end;
            continue;
        }

        if c == '/' && regex_can_follow(&prev) {
            if let Some(end) = scan_regex(&chars, i) {
                let text: String = chars[i..end].iter().collect();
                emit!(&text);
                prev = PrevSignificant::Literal;
                i = end;
                continue;
            }
        }

        if crate::lexical::is_ident_start(c) || c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && is_ident_continue(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            emit!(&word);
            prev = if c.is_ascii_digit() {
                PrevSignificant::Literal
            } else {
                PrevSignificant::Word(word)
            };
            continue;
        }

        let mut buf = [0u8; 4];
        emit!(c.encode_utf8(&mut buf));
        prev = PrevSignificant::Punct(c);
        i += 1;
    }

    out
}

/// Scans a quoted string starting at `start`; returns the index one past
/// the closing quote. Backslash escapes are honored. Line terminators do
/// not stop the scan: a deliberately broken literal may swallow following
/// text, but normalization stays a textual fixpoint, which matters more
/// for a digest than faithfulness to invalid code.
fn scan_string(chars: &[char], start: usize) -> usize {
    let quote = chars[start];
    let mut i = start + 1;
    while i < chars.len() {
        match chars[i] {
            '\\' => i += 2,
            c if c == quote => return i + 1,
            _ => i += 1,
        }
    }
    chars.len()
}

/// Template scanning state: raw template text, or an interpolation with its
/// current inner brace depth.
enum TplState {
    Raw,
    Interp(usize),
}

/// Scans a template literal including `${}` interpolations (nested
/// templates included); returns the index one past the closing backtick.
fn scan_template(chars: &[char], start: usize) -> usize {
    let mut i = start + 1;
    let mut stack = vec![TplState::Raw];
    while i < chars.len() {
        let c = chars[i];
        if c == '\\' {
            i += 2;
            continue;
        }
        match stack.last_mut() {
            Some(TplState::Raw) => match c {
                '`' => {
                    stack.pop();
                    i += 1;
                    if stack.is_empty() {
                        return i;
                    }
                }
                '$' if i + 1 < chars.len() && chars[i + 1] == '{' => {
                    stack.push(TplState::Interp(0));
                    i += 2;
                }
                _ => i += 1,
            },
            Some(TplState::Interp(depth)) => match c {
                '{' => {
                    *depth += 1;
                    i += 1;
                }
                '}' => {
                    if *depth == 0 {
                        stack.pop();
                    } else {
                        *depth -= 1;
                    }
                    i += 1;
                }
                '`' => {
                    stack.push(TplState::Raw);
                    i += 1;
                }
                '\'' | '"' => {
                    i = scan_string(chars, i);
                }
                _ => i += 1,
            },
            None => return i,
        }
    }
    chars.len()
}

/// Scans a regex literal starting at `/`; returns one past the flags, or
/// None when no closing `/` exists before end of input (the slash is then
/// treated as punctuation). Line terminators do not stop the scan, for the
/// same fixpoint reason as [`scan_string`]; in valid code a regex-position
/// slash always closes on its own line.
fn scan_regex(chars: &[char], start: usize) -> Option<usize> {
    let mut i = start + 1;
    let mut in_class = false;
    while i < chars.len() {
        let c = chars[i];
        if c == '\\' {
            i += 2;
            continue;
        }
        match c {
            '[' => in_class = true,
            ']' => in_class = false,
            '/' if !in_class => {
                i += 1;
                while i < chars.len() && is_ident_continue(chars[i]) {
                    i += 1;
                }
                return Some(i);
            }
            _ => {}
        }
        i += 1;
    }
    None
}

/// SHA-256 of the normalized source, as 64 lowercase hex characters.
pub fn digest_hex(source: &str) -> String {
    let normalized = normalize_source(source);
    hex::encode(Sha256::digest(normalized.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapses_whitespace_runs() {
        assert_eq!(normalize_source("{\n  return 1;\n}"), "{ return 1; }");
        assert_eq!(normalize_source("  a \t b  "), "a b");
    }

    #[test]
    fn strips_line_and_block_comments() {
        assert_eq!(normalize_source("{ return 1; } // fix"), "{ return 1; }");
        assert_eq!(normalize_source("a /* gone */ b"), "a b");
        assert_eq!(normalize_source("a /* multi\nline */ b"), "a b");
    }

    #[test]
    fn preserves_string_contents() {
        assert_eq!(
            normalize_source("var u = \"https://example.com\";"),
            "var u = \"https://example.com\";"
        );
        assert_eq!(normalize_source("x('a  b')"), "x('a  b')");
        assert_eq!(normalize_source("t(`a ${1 + 2} /*x*/ b`)"), "t(`a ${1 + 2} /*x*/ b`)");
    }

    #[test]
    fn regex_literals_are_not_comments() {
        assert_eq!(normalize_source("s.replace(/\\s*\\n\\s*/g, ' ')"), "s.replace(/\\s*\\n\\s*/g, ' ')");
        assert_eq!(normalize_source("var r = /a[/*]b/; x()"), "var r = /a[/*]b/; x()");
        // division stays division
        assert_eq!(normalize_source("a / b // c"), "a / b");
    }

    #[test]
    fn unterminated_constructs_do_not_panic() {
        assert_eq!(normalize_source("/* never closed"), "");
        assert_eq!(normalize_source("'open"), "'open");
        assert_eq!(normalize_source("`open ${1"), "`open ${1");
    }
}
