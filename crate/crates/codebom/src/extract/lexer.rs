//! Token-level scanner for the extraction grammar.
//!
//! Produces a flat token stream with byte offsets (for exact body slicing)
//! and 1-based line/column positions (for spans and anonymous names).
//! Comments and whitespace are consumed, never emitted. String, template,
//! and regex literals are single tokens, so downstream brace matching only
//! ever sees structural punctuation.

use crate::lexical::{
    is_ident_continue, is_ident_start, is_line_terminator, regex_can_follow, PrevSignificant,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Template,
    Regex,
    Punct,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte range in the source.
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    /// One past the last character.
    pub end_col: u32,
}

impl Token {
    pub fn text<'s>(&self, src: &'s str) -> &'s str {
        &src[self.start..self.end]
    }
}

/// A recoverable lexical or syntactic problem.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ParseIssue {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

/// Multi-character punctuators, longest first for maximal munch.
const PUNCTUATORS: &[&str] = &[
    ">>>=", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "...", "=>", "++",
    "--", "**", "==", "!=", "<=", ">=", "&&", "||", "??", "?.", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "<<", ">>",
];

struct Cursor<'s> {
    src: &'s str,
    chars: Vec<(usize, char)>,
    idx: usize,
    line: u32,
    col: u32,
}

impl<'s> Cursor<'s> {
    fn new(src: &'s str) -> Cursor<'s> {
        Cursor {
            src,
            chars: src.char_indices().collect(),
            idx: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).map(|&(_, c)| c)
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.idx + offset).map(|&(_, c)| c)
    }

    fn byte_pos(&self) -> usize {
        self.chars
            .get(self.idx)
            .map(|&(b, _)| b)
            .unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<char> {
        let &(_, c) = self.chars.get(self.idx)?;
        self.idx += 1;
        if c == '\r' {
            // \r\n counts as one terminator, on the \n
            if self.peek() != Some('\n') {
                self.line += 1;
                self.col = 1;
            }
        } else if is_line_terminator(c) {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

/// Tokenizes `src`, collecting recoverable problems instead of failing.
pub fn tokenize(src: &str) -> (Vec<Token>, Vec<ParseIssue>) {
    let mut cur = Cursor::new(src);
    let mut tokens: Vec<Token> = Vec::new();
    let mut issues: Vec<ParseIssue> = Vec::new();
    let mut prev = PrevSignificant::None;

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }

        let start = cur.byte_pos();
        let (line, col) = (cur.line, cur.col);

        // comments
        if c == '/' && cur.peek_at(1) == Some('/') {
            while let Some(n) = cur.peek() {
                if is_line_terminator(n) {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if c == '/' && cur.peek_at(1) == Some('*') {
            cur.bump();
            cur.bump();
            let mut closed = false;
            while let Some(n) = cur.bump() {
                if n == '*' && cur.peek() == Some('/') {
                    cur.bump();
                    closed = true;
                    break;
                }
            }
            if !closed {
                issues.push(ParseIssue {
                    line,
                    col,
                    message: "unterminated block comment".into(),
                });
            }
            continue;
        }

        if c == '"' || c == '\'' {
            lex_string(&mut cur, &mut issues);
            push(&mut tokens, &cur, TokenKind::Str, start, line, col);
            prev = PrevSignificant::Literal;
            continue;
        }

        if c == '`' {
            lex_template(&mut cur, &mut issues);
            push(&mut tokens, &cur, TokenKind::Template, start, line, col);
            prev = PrevSignificant::Literal;
            continue;
        }

        // on failure lex_regex restores the cursor and the slash lexes as
        // punctuation below
        if c == '/' && regex_can_follow(&prev) && lex_regex(&mut cur) {
            push(&mut tokens, &cur, TokenKind::Regex, start, line, col);
            prev = PrevSignificant::Literal;
            continue;
        }

        if is_ident_start(c) {
            while cur.peek().is_some_and(is_ident_continue) {
                cur.bump();
            }
            push(&mut tokens, &cur, TokenKind::Ident, start, line, col);
            prev = PrevSignificant::Word(src[start..tokens.last().unwrap().end].to_owned());
            continue;
        }

        if c.is_ascii_digit() {
            lex_number(&mut cur);
            push(&mut tokens, &cur, TokenKind::Number, start, line, col);
            prev = PrevSignificant::Literal;
            continue;
        }

        // punctuation, longest match first
        let rest = &src[start..];
        let mut matched = 1;
        for p in PUNCTUATORS {
            if rest.starts_with(p) {
                matched = p.chars().count();
                break;
            }
        }
        let mut last = c;
        for _ in 0..matched {
            if let Some(ch) = cur.bump() {
                last = ch;
            }
        }
        push(&mut tokens, &cur, TokenKind::Punct, start, line, col);
        prev = PrevSignificant::Punct(last);
    }

    (tokens, issues)
}

fn push(tokens: &mut Vec<Token>, cur: &Cursor<'_>, kind: TokenKind, start: usize, line: u32, col: u32) {
    tokens.push(Token {
        kind,
        start,
        end: cur.byte_pos(),
        line,
        col,
        end_line: cur.line,
        end_col: cur.col,
    });
}

fn lex_string(cur: &mut Cursor<'_>, issues: &mut Vec<ParseIssue>) {
    let (line, col) = (cur.line, cur.col);
    let quote = cur.bump().expect("caller checked quote");
    while let Some(c) = cur.peek() {
        if c == '\\' {
            cur.bump();
            cur.bump();
            continue;
        }
        if is_line_terminator(c) {
            issues.push(ParseIssue {
                line,
                col,
                message: "unterminated string literal".into(),
            });
            return;
        }
        cur.bump();
        if c == quote {
            return;
        }
    }
    issues.push(ParseIssue {
        line,
        col,
        message: "unterminated string literal".into(),
    });
}

/// Template scanning state: raw template text, or an interpolation with its
/// current inner brace depth.
enum TplState {
    Raw,
    Interp(usize),
}

fn lex_template(cur: &mut Cursor<'_>, issues: &mut Vec<ParseIssue>) {
    let (line, col) = (cur.line, cur.col);
    cur.bump(); // opening backtick
    let mut stack = vec![TplState::Raw];
    while let Some(c) = cur.peek() {
        if c == '\\' {
            cur.bump();
            cur.bump();
            continue;
        }
        match stack.last_mut() {
            Some(TplState::Raw) => match c {
                '`' => {
                    cur.bump();
                    stack.pop();
                    if stack.is_empty() {
                        return;
                    }
                }
                '$' if cur.peek_at(1) == Some('{') => {
                    cur.bump();
                    cur.bump();
                    stack.push(TplState::Interp(0));
                }
                _ => {
                    cur.bump();
                }
            },
            Some(TplState::Interp(depth)) => match c {
                '{' => {
                    *depth += 1;
                    cur.bump();
                }
                '}' => {
                    if *depth == 0 {
                        stack.pop();
                    } else {
                        *depth -= 1;
                    }
                    cur.bump();
                }
                '`' => {
                    cur.bump();
                    stack.push(TplState::Raw);
                }
                '\'' | '"' => {
                    let mut scratch = Vec::new();
                    lex_string(cur, &mut scratch);
                }
                _ => {
                    cur.bump();
                }
            },
            None => break,
        }
    }
    issues.push(ParseIssue {
        line,
        col,
        message: "unterminated template literal".into(),
    });
}

/// Attempts a regex literal; on failure the cursor is restored and the
/// caller lexes a plain `/` punctuator.
fn lex_regex(cur: &mut Cursor<'_>) -> bool {
    let saved = (cur.idx, cur.line, cur.col);
    cur.bump(); // leading '/'
    let mut in_class = false;
    while let Some(c) = cur.peek() {
        if c == '\\' {
            cur.bump();
            cur.bump();
            continue;
        }
        if is_line_terminator(c) {
            break;
        }
        match c {
            '[' => in_class = true,
            ']' => in_class = false,
            '/' if !in_class => {
                cur.bump();
                while cur.peek().is_some_and(is_ident_continue) {
                    cur.bump();
                }
                return true;
            }
            _ => {}
        }
        cur.bump();
    }
    (cur.idx, cur.line, cur.col) = saved;
    false
}

fn lex_number(cur: &mut Cursor<'_>) {
    // consume leading digits plus radix/bigint/exponent letters
    while cur
        .peek()
        .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
    {
        let c = cur.peek().unwrap();
        cur.bump();
        // exponent sign
        if matches!(c, 'e' | 'E') && matches!(cur.peek(), Some('+') | Some('-')) {
            cur.bump();
        }
    }
    // fraction — only when followed by a digit, so member access on an
    // identifier-like position is untouched
    if cur.peek() == Some('.') && cur.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
        while cur
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            let c = cur.peek().unwrap();
            cur.bump();
            if matches!(c, 'e' | 'E') && matches!(cur.peek(), Some('+') | Some('-')) {
                cur.bump();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        let (toks, _) = tokenize(src);
        toks.iter().map(|t| t.text(src).to_owned()).collect()
    }

    #[test]
    fn tokenizes_statements_and_skips_comments() {
        assert_eq!(
            texts("var x = 1; // done"),
            vec!["var", "x", "=", "1", ";"]
        );
        assert_eq!(texts("a /* mid */ . b"), vec!["a", ".", "b"]);
    }

    #[test]
    fn strings_and_templates_are_single_tokens() {
        assert_eq!(
            texts("f(\"a // not comment\", `x ${y + 1} z`)"),
            vec!["f", "(", "\"a // not comment\"", ",", "`x ${y + 1} z`", ")"]
        );
    }

    #[test]
    fn regex_versus_division() {
        assert_eq!(
            texts("s.replace(/\\s*\\n\\s*/g, ' ')"),
            vec!["s", ".", "replace", "(", "/\\s*\\n\\s*/g", ",", "' '", ")"]
        );
        assert_eq!(texts("a / b / c"), vec!["a", "/", "b", "/", "c"]);
        assert_eq!(texts("return /ab/i"), vec!["return", "/ab/i"]);
    }

    #[test]
    fn multi_char_punctuators_munch_longest() {
        assert_eq!(texts("a === b"), vec!["a", "===", "b"]);
        assert_eq!(texts("(x) => x"), vec!["(", "x", ")", "=>", "x"]);
        assert_eq!(texts("...rest"), vec!["...", "rest"]);
    }

    #[test]
    fn positions_are_one_based_lines_and_cols() {
        let src = "var a = 1\nfunction f() {}\n";
        let (toks, _) = tokenize(src);
        let f = toks.iter().find(|t| t.text(src) == "function").unwrap();
        assert_eq!((f.line, f.col), (2, 1));
        let name = toks.iter().find(|t| t.text(src) == "f").unwrap();
        assert_eq!((name.line, name.col), (2, 10));
    }

    #[test]
    fn unterminated_literals_are_reported_not_fatal() {
        let (toks, issues) = tokenize("var s = 'open\nvar t = 2;");
        assert!(issues.iter().any(|i| i.message.contains("unterminated")));
        let idents = toks.iter().filter(|t| t.kind == TokenKind::Ident).count();
        assert!(idents >= 3);
    }

    #[test]
    fn numbers_do_not_swallow_member_dots() {
        assert_eq!(texts("x1.toString()"), vec!["x1", ".", "toString", "(", ")"]);
        assert_eq!(texts("1.5e-3 .5"), vec!["1.5e-3", ".", "5"]);
        assert_eq!(texts("0xff_00n"), vec!["0xff_00n"]);
    }
}
