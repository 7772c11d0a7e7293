//! Recursive-descent extraction over the token stream.
//!
//! The grammar is a fixed ES2015 subset: import/export statements (scanned,
//! no constructs), function declarations, class declarations with extends /
//! methods / constructor, var/let/const declarations whose initializer is an
//! object literal or a function/arrow expression, and top-level assignments
//! of function/arrow expressions to member paths (`exports.formatters.o =
//! function (v) {...}`). Anything else is skipped statement-by-statement, so
//! unsupported syntax degrades to a recorded issue instead of a failed file.
//! Functions nested inside function bodies are not extracted.

use std::collections::HashSet;

use crate::construct::{
    build_fqn, normalize_and_digest, Construct, ConstructName, ConstructType, Fqn, Span,
};
use crate::extract::lexer::{tokenize, ParseIssue, Token, TokenKind};

/// Keeps rendered FQNs unique: JavaScript permits redeclaration, so the
/// second and later constructs with an identical rendered FQN get a
/// `#L<line>` suffix (and, for duplicates on one line, `#L<line>C<col>`).
pub(crate) fn disambiguate(fqn: Fqn, span: Span, used: &mut HashSet<String>) -> Fqn {
    if used.insert(fqn.render()) {
        return fqn;
    }
    let mut segments = fqn.segments().to_vec();
    let base = segments.last().expect("FQNs are non-empty").clone();
    *segments.last_mut().unwrap() = format!("{base}#L{}", span.start_line);
    let lined = Fqn::from_segments(segments.clone()).expect("suffix keeps segments valid");
    if used.insert(lined.render()) {
        return lined;
    }
    *segments.last_mut().unwrap() =
        format!("{base}#L{}C{}", span.start_line, span.start_col);
    let full = Fqn::from_segments(segments).expect("suffix keeps segments valid");
    used.insert(full.render());
    full
}

pub(crate) struct ModuleParser<'s> {
    src: &'s str,
    toks: Vec<Token>,
    pos: usize,
    module_fqn: Fqn,
    used: HashSet<String>,
    pub(crate) constructs: Vec<Construct>,
    pub(crate) issues: Vec<ParseIssue>,
}

impl<'s> ModuleParser<'s> {
    pub(crate) fn new(src: &'s str, module_fqn: Fqn) -> ModuleParser<'s> {
        let (toks, issues) = tokenize(src);
        let mut used = HashSet::new();
        used.insert(module_fqn.render());
        ModuleParser {
            src,
            toks,
            pos: 0,
            module_fqn,
            used,
            constructs: Vec::new(),
            issues,
        }
    }

    pub(crate) fn run(&mut self) {
        while !self.at_end() {
            let before = self.pos;
            self.top_level_statement();
            if self.pos == before {
                self.pos += 1; // never stall
            }
        }
    }

    // ---- token helpers -------------------------------------------------

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn tok(&self, idx: usize) -> Option<&Token> {
        self.toks.get(idx)
    }

    fn text_at(&self, idx: usize) -> &str {
        self.tok(idx).map(|t| t.text(self.src)).unwrap_or("")
    }

    fn at_text(&self, s: &str) -> bool {
        self.text_at(self.pos) == s
    }

    fn at_ident(&self, s: &str) -> bool {
        self.tok(self.pos)
            .is_some_and(|t| t.kind == TokenKind::Ident && t.text(self.src) == s)
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn issue_here(&mut self, message: impl Into<String>) {
        let (line, col) = self
            .tok(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1));
        self.issues.push(ParseIssue {
            line,
            col,
            message: message.into(),
        });
    }

    /// Token index of the brace matching the `{` at `open`, counting only
    /// brace punctuators (string/template/regex are single tokens).
    fn matching_brace(&self, open: usize) -> Option<usize> {
        let mut depth = 0usize;
        for i in open..self.toks.len() {
            match self.text_at(i) {
                "{" => depth += 1,
                "}" => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i);
                    }
                }
                _ => {}
            }
        }
        None
    }

    /// Token index of the `)` / `]` matching the opener at `open`.
    fn matching_delim(&self, open: usize) -> Option<usize> {
        let (open_s, close_s) = match self.text_at(open) {
            "(" => ("(", ")"),
            "[" => ("[", "]"),
            _ => return None,
        };
        let mut depth = 0usize;
        for i in open..self.toks.len() {
            let t = self.text_at(i);
            if t == open_s {
                depth += 1;
            } else if t == close_s {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
        }
        None
    }

    fn span_of(&self, start_tok: usize, end_tok: usize) -> Span {
        let s = &self.toks[start_tok];
        let e = &self.toks[end_tok.min(self.toks.len() - 1)];
        Span::new(s.line, s.col, e.end_line, e.end_col)
    }

    fn slice(&self, start_tok: usize, end_tok: usize) -> &'s str {
        let s = self.toks[start_tok].start;
        let e = self.toks[end_tok.min(self.toks.len() - 1)].end;
        &self.src[s..e]
    }

    // ---- statement dispatch --------------------------------------------

    fn top_level_statement(&mut self) {
        if self.at_ident("import") {
            self.skip_statement();
            return;
        }
        if self.at_ident("export") {
            self.export_statement();
            return;
        }
        if self.at_ident("function") || (self.at_ident("async") && self.ident_ahead(1, "function"))
        {
            self.function_declaration(false);
            return;
        }
        if self.at_ident("class") {
            self.class_declaration(false);
            return;
        }
        if self.at_ident("var") || self.at_ident("let") || self.at_ident("const") {
            self.var_statement();
            return;
        }
        if self.at_text(";") {
            self.bump();
            return;
        }
        if self.tok(self.pos).is_some_and(|t| t.kind == TokenKind::Ident)
            && self.member_assignment()
        {
            return;
        }
        self.skip_statement();
    }

    fn ident_ahead(&self, offset: usize, s: &str) -> bool {
        self.tok(self.pos + offset)
            .is_some_and(|t| t.kind == TokenKind::Ident && t.text(self.src) == s)
    }

    fn export_statement(&mut self) {
        self.bump(); // export
        if self.at_ident("default") {
            self.bump();
            if self.at_ident("function")
                || (self.at_ident("async") && self.ident_ahead(1, "function"))
            {
                self.function_declaration(true);
                return;
            }
            if self.at_ident("class") {
                self.class_declaration(true);
                return;
            }
            self.skip_statement();
            return;
        }
        if self.at_ident("function") || (self.at_ident("async") && self.ident_ahead(1, "function"))
        {
            self.function_declaration(false);
            return;
        }
        if self.at_ident("class") {
            self.class_declaration(false);
            return;
        }
        if self.at_ident("var") || self.at_ident("let") || self.at_ident("const") {
            self.var_statement();
            return;
        }
        // export {..} [from '...'], export * from '...'
        self.skip_statement();
    }

    // ---- declarations ---------------------------------------------------

    /// `[async] function [*] name ( params ) { body }`
    fn function_declaration(&mut self, allow_anonymous: bool) {
        let start_tok = self.pos;
        if self.at_ident("async") {
            self.bump();
        }
        self.bump(); // function
        if self.at_text("*") {
            self.bump();
        }
        let name = if self.tok(self.pos).is_some_and(|t| t.kind == TokenKind::Ident) {
            let n = ConstructName::Named(self.text_at(self.pos).to_owned());
            self.bump();
            n
        } else if allow_anonymous {
            let t = &self.toks[start_tok];
            ConstructName::Anonymous {
                line: t.line,
                col: t.col,
            }
        } else {
            self.issue_here("expected function name");
            self.skip_statement();
            return;
        };
        let Some((params, body_open)) = self.params_then_body() else {
            self.skip_statement();
            return;
        };
        let Some(body_close) = self.matching_brace(body_open) else {
            self.issue_here("unterminated function body");
            self.pos = self.toks.len();
            return;
        };
        self.push_construct(
            ConstructType::Func,
            &self.module_fqn.clone(),
            name,
            params,
            self.span_of(start_tok, body_close),
            self.slice(body_open, body_close),
        );
        self.pos = body_close + 1;
    }

    /// Parses `( params )` and positions on the `{` of the body.
    fn params_then_body(&mut self) -> Option<(Vec<String>, usize)> {
        if !self.at_text("(") {
            self.issue_here("expected parameter list");
            return None;
        }
        let close = self.matching_delim(self.pos)?;
        let params = self.render_params(self.pos, close);
        self.pos = close + 1;
        if !self.at_text("{") {
            self.issue_here("expected function body");
            return None;
        }
        Some((params, self.pos))
    }

    /// Renders the parameter list between the parens at `open`..`close`.
    ///
    /// Identifiers render as themselves (defaults dropped); object and array
    /// patterns render as `{}` / `[]`; rest parameters render as their inner
    /// pattern. The renderings are FQN-segment-safe (never contain a dot).
    fn render_params(&self, open: usize, close: usize) -> Vec<String> {
        let mut params = Vec::new();
        let mut i = open + 1;
        let mut expecting = true;
        let mut depth = 0usize;
        while i < close {
            let t = self.text_at(i);
            if depth > 0 {
                match t {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => depth -= 1,
                    _ => {}
                }
                i += 1;
                continue;
            }
            match t {
                "," => expecting = true,
                "..." => {} // rest: render the inner pattern
                "{" => {
                    if expecting {
                        params.push("{}".to_owned());
                        expecting = false;
                    }
                    depth += 1;
                }
                "[" => {
                    if expecting {
                        params.push("[]".to_owned());
                        expecting = false;
                    }
                    depth += 1;
                }
                "(" => depth += 1,
                _ => {
                    if expecting && self.tok(i).is_some_and(|x| x.kind == TokenKind::Ident) {
                        params.push(t.to_owned());
                        expecting = false;
                    }
                }
            }
            i += 1;
        }
        params
    }

    /// `class Name [extends Base] { members }`
    fn class_declaration(&mut self, allow_anonymous: bool) {
        let start_tok = self.pos;
        self.bump(); // class
        let name = if self
            .tok(self.pos)
            .is_some_and(|t| t.kind == TokenKind::Ident)
            && !self.at_ident("extends")
        {
            let n = ConstructName::Named(self.text_at(self.pos).to_owned());
            self.bump();
            n
        } else if allow_anonymous {
            let t = &self.toks[start_tok];
            ConstructName::Anonymous {
                line: t.line,
                col: t.col,
            }
        } else {
            self.issue_here("expected class name");
            self.skip_statement();
            return;
        };
        let mut base: Option<String> = None;
        if self.at_ident("extends") {
            self.bump();
            // the last identifier of the heritage path names the base
            while self.tok(self.pos).is_some_and(|t| t.kind == TokenKind::Ident) {
                base = Some(self.text_at(self.pos).to_owned());
                self.bump();
                if self.at_text(".") {
                    self.bump();
                } else {
                    break;
                }
            }
            // mixin call or other expression: give up on a base name
            if self.at_text("(") {
                if let Some(close) = self.matching_delim(self.pos) {
                    self.pos = close + 1;
                    base = None;
                }
            }
        }
        if !self.at_text("{") {
            self.issue_here("expected class body");
            self.skip_statement();
            return;
        }
        let body_open = self.pos;
        let Some(body_close) = self.matching_brace(body_open) else {
            self.issue_here("unterminated class body");
            self.pos = self.toks.len();
            return;
        };
        let class_args: Vec<String> = base.into_iter().collect();
        let class_span = self.span_of(start_tok, body_close);
        let class_fqn = match build_fqn(&self.module_fqn, ConstructType::Clas, &name, &class_args)
        {
            Ok(f) => disambiguate(f, class_span, &mut self.used),
            Err(e) => {
                self.issue_here(e.to_string());
                self.pos = body_close + 1;
                return;
            }
        };
        self.constructs.push(
            Construct::new(
                ConstructType::Clas,
                class_fqn.clone(),
                class_span,
                normalize_and_digest(self.slice(body_open, body_close)),
                Some(self.module_fqn.clone()),
            )
            .expect("extractor-produced class construct is valid"),
        );
        self.pos = body_open + 1;
        self.class_members(&class_fqn, body_close);
        self.pos = body_close + 1;
    }

    fn class_members(&mut self, class_fqn: &Fqn, body_close: usize) {
        while self.pos < body_close {
            if self.at_text(";") || self.at_text(",") {
                self.bump();
                continue;
            }
            let member_start = self.pos;
            let mut is_static = false;
            // modifiers — only when not immediately called as a method name
            while self.pos < body_close {
                let t = self.text_at(self.pos);
                let next_is_call = self.text_at(self.pos + 1) == "(";
                match t {
                    "static" if !next_is_call => {
                        is_static = true;
                        self.bump();
                    }
                    "async" | "get" | "set" if !next_is_call => {
                        self.bump();
                    }
                    "*" => {
                        self.bump();
                    }
                    _ => break,
                }
            }
            if self.pos >= body_close {
                break;
            }
            // member name
            let name_tok = self.toks[self.pos].clone();
            let name = match name_tok.kind {
                TokenKind::Ident | TokenKind::Number => {
                    let n = ConstructName::Named(name_tok.text(self.src).to_owned());
                    self.bump();
                    n
                }
                TokenKind::Str => {
                    let raw = name_tok.text(self.src);
                    let inner: String = raw[1..raw.len().saturating_sub(1)]
                        .chars()
                        .map(|c| if c == '.' { '_' } else { c })
                        .collect();
                    self.bump();
                    ConstructName::Named(inner)
                }
                TokenKind::Punct if name_tok.text(self.src) == "[" => {
                    // computed name: position-based
                    let Some(close) = self.matching_delim(self.pos) else {
                        self.pos = body_close;
                        break;
                    };
                    self.pos = close + 1;
                    ConstructName::Anonymous {
                        line: name_tok.line,
                        col: name_tok.col,
                    }
                }
                _ => {
                    self.bump();
                    continue;
                }
            };
            if self.at_text("(") {
                let Some(paren_close) = self.matching_delim(self.pos) else {
                    self.pos = body_close;
                    break;
                };
                let params = self.render_params(self.pos, paren_close);
                self.pos = paren_close + 1;
                if !self.at_text("{") {
                    continue; // field like `x = () => ..` parsed oddly; skip
                }
                let Some(method_close) = self.matching_brace(self.pos) else {
                    self.pos = body_close;
                    break;
                };
                let ctype = match &name {
                    ConstructName::Named(n) if n == "constructor" && !is_static => {
                        ConstructType::Cons
                    }
                    _ => ConstructType::Meth,
                };
                self.push_construct(
                    ctype,
                    &class_fqn.clone(),
                    name,
                    params,
                    self.span_of(member_start, method_close),
                    self.slice(self.pos, method_close),
                );
                self.pos = method_close + 1;
            } else if self.at_text("=") {
                // class field: skip its initializer
                self.skip_until_member_boundary(body_close);
            }
        }
    }

    fn skip_until_member_boundary(&mut self, body_close: usize) {
        let mut depth = 0usize;
        while self.pos < body_close {
            match self.text_at(self.pos) {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                ";" if depth == 0 => {
                    self.bump();
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    /// `var|let|const declarator (, declarator)* ;`
    fn var_statement(&mut self) {
        self.bump(); // keyword
        loop {
            // destructuring declaration: no construct
            if self.at_text("{") || self.at_text("[") {
                if let Some(close) = self.matching_delim_or_brace(self.pos) {
                    self.pos = close + 1;
                } else {
                    self.pos = self.toks.len();
                    return;
                }
                if self.at_text("=") {
                    self.bump();
                    self.skip_initializer();
                }
            } else if self.tok(self.pos).is_some_and(|t| t.kind == TokenKind::Ident) {
                let name_tok_idx = self.pos;
                let name = self.text_at(self.pos).to_owned();
                self.bump();
                if self.at_text("=") {
                    self.bump();
                    self.declarator_initializer(name_tok_idx, &name);
                }
            } else {
                self.issue_here("expected declarator name");
                self.skip_statement();
                return;
            }
            if self.at_text(",") {
                self.bump();
                continue;
            }
            if self.at_text(";") {
                self.bump();
            }
            return;
        }
    }

    fn matching_delim_or_brace(&self, open: usize) -> Option<usize> {
        if self.text_at(open) == "{" {
            self.matching_brace(open)
        } else {
            self.matching_delim(open)
        }
    }

    /// Classifies one declarator initializer and emits FUNC / OBJT.
    fn declarator_initializer(&mut self, name_tok_idx: usize, name: &str) {
        if let Some((params, body_open, body_close, expr_end)) = self.function_like_expression() {
            let body_slice = self.slice(body_open, body_close);
            self.push_construct(
                ConstructType::Func,
                &self.module_fqn.clone(),
                ConstructName::Named(name.to_owned()),
                params,
                self.span_of(name_tok_idx, expr_end),
                body_slice,
            );
            self.pos = expr_end + 1;
            return;
        }
        if self.at_text("{") {
            if let Some(close) = self.matching_brace(self.pos) {
                if self.is_initializer_boundary(close + 1) {
                    let open = self.pos;
                    self.push_construct_no_args(
                        ConstructType::Objt,
                        ConstructName::Named(name.to_owned()),
                        self.span_of(name_tok_idx, close),
                        self.slice(open, close),
                    );
                    self.pos = close + 1;
                    return;
                }
            }
        }
        self.skip_initializer();
    }

    /// True when the token at `idx` can end a declarator initializer.
    fn is_initializer_boundary(&self, idx: usize) -> bool {
        match self.tok(idx) {
            None => true,
            Some(t) => {
                let text = t.text(self.src);
                text == "," || text == ";" || t.line > self.toks[idx - 1].end_line
            }
        }
    }

    /// Recognizes `function`/`async function`/arrow expressions at the
    /// cursor. Returns (params, body_open_tok, body_close_tok, last_tok);
    /// for expression-bodied arrows body_open..body_close covers the
    /// expression.
    fn function_like_expression(&mut self) -> Option<(Vec<String>, usize, usize, usize)> {
        let start = self.pos;
        // function expression
        if self.at_ident("function") || (self.at_ident("async") && self.ident_ahead(1, "function"))
        {
            if self.at_ident("async") {
                self.bump();
            }
            self.bump(); // function
            if self.at_text("*") {
                self.bump();
            }
            if self.tok(self.pos).is_some_and(|t| t.kind == TokenKind::Ident) {
                self.bump(); // inner name is ignored; the construct is named by the binding
            }
            let (params, body_open) = match self.params_then_body() {
                Some(v) => v,
                None => {
                    self.pos = start;
                    return None;
                }
            };
            let body_close = self.matching_brace(body_open)?;
            return Some((params, body_open, body_close, body_close));
        }
        // arrow function
        let mut i = self.pos;
        if self.text_at(i) == "async"
            && (self.text_at(i + 1) == "(" || self.tok(i + 1).is_some_and(|t| t.kind == TokenKind::Ident))
            && self.text_at(i + 1) != "function"
        {
            i += 1;
        }
        let (params, after_params) = if self.text_at(i) == "(" {
            let close = self.matching_delim(i)?;
            (self.render_params(i, close), close + 1)
        } else if self.tok(i).is_some_and(|t| t.kind == TokenKind::Ident) {
            (vec![self.text_at(i).to_owned()], i + 1)
        } else {
            return None;
        };
        if self.text_at(after_params) != "=>" {
            return None;
        }
        let arrow_body = after_params + 1;
        if self.text_at(arrow_body) == "{" {
            let body_close = self.matching_brace(arrow_body)?;
            self.pos = arrow_body;
            return Some((params, arrow_body, body_close, body_close));
        }
        // expression body: slice to the end of the expression
        let end = self.expression_end(arrow_body);
        self.pos = arrow_body;
        Some((params, arrow_body, end, end))
    }

    /// Last token index of an expression starting at `from`, stopping at a
    /// top-level `,` / `;` / closing delimiter / plausible ASI boundary.
    fn expression_end(&self, from: usize) -> usize {
        let mut depth = 0usize;
        let mut last = from;
        let mut i = from;
        while i < self.toks.len() {
            let t = self.text_at(i);
            match t {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    if depth == 0 {
                        return last;
                    }
                    depth -= 1;
                }
                "," | ";" if depth == 0 => return last,
                _ => {}
            }
            if depth == 0 && i > from && self.starts_new_statement(i) {
                return last;
            }
            last = i;
            i += 1;
        }
        last
    }

    /// A declaration keyword at column 1 on a fresh line; used for error
    /// recovery inside unbalanced groups.
    fn column_one_declaration(&self, idx: usize) -> bool {
        let Some(t) = self.tok(idx) else { return false };
        if t.kind != TokenKind::Ident || t.col != 1 || idx == 0 {
            return false;
        }
        if t.line <= self.toks[idx - 1].end_line {
            return false;
        }
        matches!(
            t.text(self.src),
            "var" | "let" | "const" | "function" | "class" | "import" | "export"
        )
    }

    /// Heuristic ASI boundary: a statement keyword on a fresh line.
    fn starts_new_statement(&self, idx: usize) -> bool {
        let Some(t) = self.tok(idx) else { return false };
        if t.kind != TokenKind::Ident || idx == 0 {
            return false;
        }
        if t.line <= self.toks[idx - 1].end_line {
            return false;
        }
        matches!(
            t.text(self.src),
            "var" | "let" | "const" | "function" | "class" | "import" | "export" | "return"
                | "if" | "for" | "while" | "do" | "switch" | "try" | "throw"
        )
    }

    /// Skips a declarator initializer up to `,` / `;` / statement boundary.
    fn skip_initializer(&mut self) {
        let end = self.expression_end(self.pos);
        self.pos = (end + 1).max(self.pos);
    }

    /// `path.to.member = <function-like>` at top level.
    fn member_assignment(&mut self) -> bool {
        let start = self.pos;
        let mut path: Vec<String> = vec![self.text_at(self.pos).to_owned()];
        let mut i = self.pos + 1;
        while self.text_at(i) == "." && self.tok(i + 1).is_some_and(|t| t.kind == TokenKind::Ident)
        {
            path.push(self.text_at(i + 1).to_owned());
            i += 2;
        }
        if self.text_at(i) != "=" {
            return false;
        }
        self.pos = i + 1;
        let Some((params, body_open, body_close, expr_end)) = self.function_like_expression()
        else {
            self.pos = start;
            return false;
        };
        // the segment chain appends every member-path component
        let mut parent = self.module_fqn.clone();
        for seg in &path[..path.len() - 1] {
            match parent.child(seg.clone()) {
                Ok(p) => parent = p,
                Err(e) => {
                    self.issue_here(e.to_string());
                    self.pos = expr_end + 1;
                    return true;
                }
            }
        }
        let body_slice = self.slice(body_open, body_close);
        let name = ConstructName::Named(path.last().expect("path non-empty").clone());
        let span = self.span_of(start, expr_end);
        self.push_construct_with_parent(
            ConstructType::Func,
            &parent,
            name,
            params,
            span,
            body_slice,
        );
        self.pos = expr_end + 1;
        if self.at_text(";") {
            self.bump();
        }
        true
    }

    // ---- construct emission ----------------------------------------------

    fn push_construct(
        &mut self,
        ctype: ConstructType,
        parent: &Fqn,
        name: ConstructName,
        params: Vec<String>,
        span: Span,
        body: &str,
    ) {
        self.push_construct_with_parent(ctype, parent, name, params, span, body);
    }

    fn push_construct_no_args(
        &mut self,
        ctype: ConstructType,
        name: ConstructName,
        span: Span,
        body: &str,
    ) {
        self.push_construct_with_parent(ctype, &self.module_fqn.clone(), name, Vec::new(), span, body);
    }

    fn push_construct_with_parent(
        &mut self,
        ctype: ConstructType,
        declared_parent: &Fqn,
        name: ConstructName,
        params: Vec<String>,
        span: Span,
        body: &str,
    ) {
        // the recorded parent is the enclosing construct (module or class),
        // even when the FQN chain holds intermediate member-path segments
        let hierarchy_parent = if matches!(ctype, ConstructType::Meth | ConstructType::Cons) {
            declared_parent.clone()
        } else {
            self.module_fqn.clone()
        };
        match build_fqn(declared_parent, ctype, &name, &params) {
            Ok(fqn) => {
                let fqn = disambiguate(fqn, span, &mut self.used);
                let digest = normalize_and_digest(body);
                match Construct::new(ctype, fqn, span, digest, Some(hierarchy_parent)) {
                    Ok(c) => self.constructs.push(c),
                    Err(e) => self.issues.push(ParseIssue {
                        line: span.start_line,
                        col: span.start_col,
                        message: e.to_string(),
                    }),
                }
            }
            Err(e) => self.issues.push(ParseIssue {
                line: span.start_line,
                col: span.start_col,
                message: e.to_string(),
            }),
        }
    }

    /// Consumes one unrecognized statement: through `;` at depth zero, past
    /// a `{...}` group returning to depth zero, or up to an ASI boundary.
    /// Inside an unbalanced group, a declaration keyword at column 1 also
    /// ends the skip, so one broken statement cannot swallow the rest of
    /// the file.
    fn skip_statement(&mut self) {
        let mut depth = 0usize;
        let mut consumed = false;
        while !self.at_end() {
            if consumed && depth == 0 && self.starts_new_statement(self.pos) {
                return;
            }
            if consumed && depth > 0 && self.column_one_declaration(self.pos) {
                self.issue_here("unbalanced statement; resuming at next declaration");
                return;
            }
            match self.text_at(self.pos) {
                "(" | "[" | "{" => {
                    depth += 1;
                    self.bump();
                    consumed = true;
                    continue;
                }
                ")" | "]" | "}" => {
                    if depth == 0 {
                        // stray closer at top level: drop it and stop
                        self.issue_here("unbalanced closing delimiter");
                        self.bump();
                        return;
                    }
                    depth -= 1;
                    let was_brace = self.text_at(self.pos) == "}";
                    self.bump();
                    consumed = true;
                    if depth == 0 && was_brace {
                        // statement-level block finished; swallow a trailing ';'
                        if self.at_text(";") {
                            self.bump();
                        }
                        return;
                    }
                    continue;
                }
                ";" if depth == 0 => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                    consumed = true;
                }
            }
        }
    }
}
