//! Textual syntax for expressions, types and databases.
//!
//! Expressions:
//!
//! ```text
//! e      ::= NAME | "D" | "(" e ")"
//!          | "union" "(" e "," e ")" | "minus" "(" e "," e ")" | "times" "(" e "," e ")"
//!          | "project" "[" int ("," int)* "]" "(" e ")"
//!          | "select" "[" int ("=" | "!=") int "]" "(" e ")"
//!          | "nest" "[" int ("," int)* "]" "(" e ")"
//!          | "unnest" "[" int "]" "(" e ")"
//!          | "powerset" "(" e ")"
//!          | "solve" "{" "(" binder ("," binder)* ")" "|" e ("=" | "!=") rhs "}"
//! binder ::= NAME ":" type
//! type   ::= "0" | "(" type ("," type)* ")"
//! rhs    ::= e | "empty"
//! ```
//!
//! `e = empty` stands for `e = minus(e,e)`; `e != empty` stands for
//! `project[1](times(D,e)) = D`. `!=` is only accepted with `empty`.
//!
//! Databases:
//!
//! ```text
//! doc      ::= "domain" "[" atom ("," atom)* "]" ("relations" "{" entry* "}")?
//! entry    ::= NAME ":" type "=" relation
//! relation ::= "[" (tuple ("," tuple)*)? "]"
//! tuple    ::= "[" item ("," item)* "]"
//! item     ::= atom | relation
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ast::{disequation_to_equation, empty_for, Binder, Expr, SelectOp};
use crate::model::{canonicalize, is_name, is_symbol, Atom, Database, ModelError, RawValue, Relation, RelationType, Value};
use crate::typecheck::Schema;

pub const KEYWORDS: &[&str] = &[
    "D", "union", "minus", "times", "project", "select", "nest", "unnest", "powerset", "solve", "empty",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(&'static str),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Word(word),
                line: l,
                column: col,
            });
            continue;
        }
        chars.next();
        column += 1;
        let punct = match c {
            '(' => "(",
            ')' => ")",
            '[' => "[",
            ']' => "]",
            '{' => "{",
            '}' => "}",
            ',' => ",",
            '|' => "|",
            ':' => ":",
            ';' => ";",
            '=' => "=",
            '!' if chars.peek() == Some(&'=') => {
                chars.next();
                column += 1;
                "!="
            }
            other => {
                return Err(ParseError {
                    line: l,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push(Token {
            tok: Tok::Punct(punct),
            line: l,
            column: col,
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

/// A parsed but untyped bracket tree from a database document.
enum Tree {
    Word(String, usize, usize),
    List(Vec<Tree>, usize, usize),
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            tokens: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        &self.tokens[(self.pos + offset).min(self.tokens.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, token: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: token.line,
            column: token.column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.peek(), message)
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::End => "end of input".to_string(),
        }
    }

    fn expect(&mut self, punct: &'static str) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Punct(punct) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{punct}`, found {}", Self::describe(&self.peek().tok))))
        }
    }

    fn eat(&mut self, punct: &'static str) -> bool {
        if self.peek().tok == Tok::Punct(punct) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w == word)
    }

    fn expect_word(&mut self, word: &str) -> Result<(), ParseError> {
        if self.is_word(word) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{word}`, found {}", Self::describe(&self.peek().tok))))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::End {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {} after the end", Self::describe(&self.peek().tok))))
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Word(w) if is_name(w) && !KEYWORDS.contains(&w.as_str()) => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            Tok::Word(w) if KEYWORDS.contains(&w.as_str()) => {
                Err(self.error(format!("`{w}` is a reserved keyword")))
            }
            other => Err(self.error(format!("expected a relation name, found {}", Self::describe(other)))),
        }
    }

    fn index(&mut self) -> Result<usize, ParseError> {
        let token = self.peek().clone();
        match &token.tok {
            Tok::Word(w) if w.bytes().all(|b| b.is_ascii_digit()) => {
                let i: usize = w
                    .parse()
                    .map_err(|_| self.error_at(&token, format!("column index `{w}` is too large")))?;
                if i == 0 {
                    return Err(self.error_at(&token, "column indices start at 1"));
                }
                self.bump();
                Ok(i)
            }
            other => Err(self.error(format!("expected a column index, found {}", Self::describe(other)))),
        }
    }

    fn index_list(&mut self) -> Result<Vec<usize>, ParseError> {
        self.expect("[")?;
        let mut out = vec![self.index()?];
        while self.eat(",") {
            out.push(self.index()?);
        }
        self.expect("]")?;
        Ok(out)
    }

    fn parenthesized(&mut self) -> Result<Expr, ParseError> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(")")?;
        Ok(e)
    }

    fn pair(&mut self) -> Result<(Expr, Expr), ParseError> {
        self.expect("(")?;
        let a = self.expr()?;
        self.expect(",")?;
        let b = self.expr()?;
        self.expect(")")?;
        Ok((a, b))
    }

    fn ty(&mut self) -> Result<RelationType, ParseError> {
        if self.is_word("0") {
            self.bump();
            return Ok(RelationType::atom());
        }
        if self.eat("(") {
            let mut comps = vec![self.ty()?];
            while self.eat(",") {
                comps.push(self.ty()?);
            }
            self.expect(")")?;
            return Ok(RelationType::tuple(comps).expect("non-empty"));
        }
        Err(self.error(format!("expected a type, found {}", Self::describe(&self.peek().tok))))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let token = self.peek().clone();
        let word = match &token.tok {
            Tok::Punct("(") => return self.parenthesized(),
            Tok::Word(w) => w.clone(),
            other => return Err(self.error(format!("expected an expression, found {}", Self::describe(other)))),
        };
        let e = match word.as_str() {
            "D" => {
                self.bump();
                Expr::Domain
            }
            "union" | "minus" | "times" => {
                self.bump();
                let (a, b) = self.pair()?;
                match word.as_str() {
                    "union" => Expr::union(a, b),
                    "minus" => Expr::minus(a, b),
                    _ => Expr::times(a, b),
                }
            }
            "project" | "nest" => {
                self.bump();
                let cols = self.index_list()?;
                let input = self.parenthesized()?;
                if word == "project" {
                    Expr::project(cols, input)
                } else {
                    Expr::nest(cols, input)
                }
            }
            "select" => {
                self.bump();
                self.expect("[")?;
                let left = self.index()?;
                let op = if self.eat("=") {
                    SelectOp::Eq
                } else if self.eat("!=") {
                    SelectOp::Neq
                } else {
                    return Err(self.error("expected `=` or `!=` in selection"));
                };
                let right = self.index()?;
                self.expect("]")?;
                let input = self.parenthesized()?;
                Expr::Select {
                    left,
                    op,
                    right,
                    input: Box::new(input),
                }
            }
            "unnest" => {
                self.bump();
                self.expect("[")?;
                let column = self.index()?;
                self.expect("]")?;
                Expr::unnest(column, self.parenthesized()?)
            }
            "powerset" => {
                self.bump();
                Expr::powerset(self.parenthesized()?)
            }
            "solve" => {
                self.bump();
                self.solve()?
            }
            "empty" => return Err(self.error("`empty` may only appear as the right-hand side of an equation")),
            _ if is_name(&word) => {
                if matches!(self.peek_at(1), Tok::Punct("(") | Tok::Punct("[") | Tok::Punct("{")) {
                    return Err(self.error(format!("unknown keyword `{word}`")));
                }
                self.bump();
                Expr::Name(word)
            }
            _ => return Err(self.error(format!("expected an expression, found `{word}`"))),
        };
        Ok(e)
    }

    fn solve(&mut self) -> Result<Expr, ParseError> {
        self.expect("{")?;
        self.expect("(")?;
        let mut vars = vec![self.binder()?];
        while self.eat(",") {
            vars.push(self.binder()?);
        }
        self.expect(")")?;
        self.expect("|")?;
        let lhs = self.expr()?;
        let negated = if self.eat("=") {
            false
        } else if self.eat("!=") {
            true
        } else {
            return Err(self.error(format!("expected `=` or `!=`, found {}", Self::describe(&self.peek().tok))));
        };
        let (lhs, rhs) = if self.is_word("empty") {
            self.bump();
            if negated {
                disequation_to_equation(&lhs)
            } else {
                let rhs = empty_for(&lhs);
                (lhs, rhs)
            }
        } else if negated {
            return Err(self.error("`!=` is only allowed with `empty` on the right-hand side"));
        } else {
            let rhs = self.expr()?;
            (lhs, rhs)
        };
        self.expect("}")?;
        Ok(Expr::solve(vars, lhs, rhs))
    }

    fn binder(&mut self) -> Result<Binder, ParseError> {
        let name = self.name()?;
        self.expect(":")?;
        let ty = self.ty()?;
        Ok(Binder { name, ty })
    }

    fn tree(&mut self) -> Result<Tree, ParseError> {
        let token = self.peek().clone();
        match &token.tok {
            Tok::Word(w) => {
                self.bump();
                Ok(Tree::Word(w.clone(), token.line, token.column))
            }
            Tok::Punct("[") => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat("]") {
                    items.push(self.tree()?);
                    while self.eat(",") {
                        items.push(self.tree()?);
                    }
                    self.expect("]")?;
                }
                Ok(Tree::List(items, token.line, token.column))
            }
            other => Err(self.error(format!("expected an atom or `[`, found {}", Self::describe(other)))),
        }
    }
}

fn tree_to_raw(tree: &Tree, ty: RelationType) -> Result<RawValue, ParseError> {
    let at = |line, column, message: String| ParseError { line, column, message };
    match (tree, ty.components()) {
        (Tree::Word(w, l, c), None) => {
            if is_symbol(w) {
                Ok(RawValue::Atom(w.clone()))
            } else {
                Err(at(*l, *c, format!("invalid atom `{w}`")))
            }
        }
        (Tree::List(rows, _, _), Some(comps)) => {
            let mut out = Vec::with_capacity(rows.len());
            for row in rows {
                match row {
                    Tree::List(items, l, c) => {
                        if items.len() != comps.len() {
                            return Err(at(
                                *l,
                                *c,
                                format!("tuple has {} components, type {ty} needs {}", items.len(), comps.len()),
                            ));
                        }
                        out.push(
                            items
                                .iter()
                                .zip(comps)
                                .map(|(item, t)| tree_to_raw(item, *t))
                                .collect::<Result<Vec<_>, _>>()?,
                        );
                    }
                    Tree::Word(w, l, c) => {
                        return Err(at(*l, *c, format!("expected a tuple `[...]`, found atom `{w}`")))
                    }
                }
            }
            Ok(RawValue::Set(out))
        }
        (Tree::Word(w, l, c), Some(_)) => Err(at(*l, *c, format!("expected a relation of type {ty}, found atom `{w}`"))),
        (Tree::List(_, l, c), None) => Err(at(*l, *c, "expected an atom, found a list".to_string())),
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

pub fn parse_type(text: &str) -> Result<RelationType, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    p.expect_end()?;
    Ok(t)
}

/// Parses `NAME : type` pairs separated by commas, e.g. `R:(0,0), S:(0)`.
pub fn parse_schema(text: &str) -> Result<Schema, ParseError> {
    let mut p = Parser::new(text)?;
    let mut schema = Schema::new();
    if p.peek().tok == Tok::End {
        return Ok(schema);
    }
    loop {
        let at = p.peek().clone();
        let name = p.name()?;
        p.expect(":")?;
        let ty = p.ty()?;
        schema.insert(name, ty).map_err(|e| p.error_at(&at, e.to_string()))?;
        if !p.eat(",") {
            break;
        }
    }
    p.expect_end()?;
    Ok(schema)
}

/// Parses a relation literal such as `[[a,b],[b,c]]` at the given type.
pub fn parse_relation(text: &str, ty: RelationType) -> Result<Relation, ParseError> {
    let mut p = Parser::new(text)?;
    let start = p.peek().clone();
    let tree = p.tree()?;
    p.expect_end()?;
    let raw = tree_to_raw(&tree, ty)?;
    match canonicalize(&raw, ty) {
        Ok(Value::Relation(r)) => Ok(r),
        Ok(Value::Atom(_)) => Err(p.error_at(&start, "expected a relation")),
        Err(e) => Err(p.error_at(&start, e.to_string())),
    }
}

pub fn parse_database(text: &str) -> Result<(Database, Schema), ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_word("domain")?;
    let domain_at = p.peek().clone();
    let domain_tree = p.tree()?;
    let atoms = match &domain_tree {
        Tree::List(items, _, _) => items
            .iter()
            .map(|item| match item {
                Tree::Word(w, l, c) => Atom::new(w).map_err(|e| ParseError {
                    line: *l,
                    column: *c,
                    message: e.to_string(),
                }),
                Tree::List(_, l, c) => Err(ParseError {
                    line: *l,
                    column: *c,
                    message: "domain entries must be atoms".into(),
                }),
            })
            .collect::<Result<Vec<Atom>, _>>()?,
        Tree::Word(..) => return Err(p.error_at(&domain_at, "expected `[` after `domain`")),
    };
    if atoms.is_empty() {
        return Err(p.error_at(&domain_at, ModelError::EmptyDomain.to_string()));
    }
    let mut schema = Schema::new();
    let mut relations = Vec::new();
    if p.is_word("relations") {
        p.bump();
        p.expect("{")?;
        while !p.eat("}") {
            let at = p.peek().clone();
            let name = p.name()?;
            p.expect(":")?;
            let ty = p.ty()?;
            p.expect("=")?;
            let value_at = p.peek().clone();
            let tree = p.tree()?;
            if ty.is_atom() {
                return Err(p.error_at(&at, ModelError::AtomTypedRelation(name).to_string()));
            }
            schema
                .insert(name.clone(), ty)
                .map_err(|e| p.error_at(&at, e.to_string()))?;
            let raw = tree_to_raw(&tree, ty)?;
            let rel = match canonicalize(&raw, ty) {
                Ok(Value::Relation(r)) => r,
                Ok(Value::Atom(_)) => unreachable!("relation type"),
                Err(e) => return Err(p.error_at(&value_at, e.to_string())),
            };
            relations.push((name, rel));
            p.eat(";");
        }
    }
    p.expect_end()?;
    let db = Database::new(atoms, relations).map_err(|e| p.error_at(&domain_at, e.to_string()))?;
    Ok((db, schema))
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

pub fn render_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_indices(out: &mut String, cols: &[usize]) {
    out.push('[');
    for (i, c) in cols.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{c}");
    }
    out.push(']');
}

fn write_expr(out: &mut String, e: &Expr) {
    let binary = |out: &mut String, kw: &str, a: &Expr, b: &Expr| {
        out.push_str(kw);
        out.push('(');
        write_expr(out, a);
        out.push(',');
        write_expr(out, b);
        out.push(')');
    };
    match e {
        Expr::Name(n) => out.push_str(n),
        Expr::Domain => out.push('D'),
        Expr::Union(a, b) => binary(out, "union", a, b),
        Expr::Difference(a, b) => binary(out, "minus", a, b),
        Expr::Product(a, b) => binary(out, "times", a, b),
        Expr::Project { columns, input } | Expr::Nest { columns, input } => {
            out.push_str(if matches!(e, Expr::Project { .. }) { "project" } else { "nest" });
            write_indices(out, columns);
            out.push('(');
            write_expr(out, input);
            out.push(')');
        }
        Expr::Select { left, op, right, input } => {
            let op = match op {
                SelectOp::Eq => "=",
                SelectOp::Neq => "!=",
            };
            let _ = write!(out, "select[{left}{op}{right}](");
            write_expr(out, input);
            out.push(')');
        }
        Expr::Unnest { column, input } => {
            let _ = write!(out, "unnest[{column}](");
            write_expr(out, input);
            out.push(')');
        }
        Expr::Powerset(input) => {
            out.push_str("powerset(");
            write_expr(out, input);
            out.push(')');
        }
        Expr::Solve { vars, lhs, rhs } => {
            out.push_str("solve{(");
            for (i, v) in vars.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}:{}", v.name, v.ty);
            }
            out.push_str(") | ");
            write_expr(out, lhs);
            out.push_str(" = ");
            write_expr(out, rhs);
            out.push('}');
        }
    }
}

/// Renders a relation as nested lists in canonical order, e.g. `[[a,b]]`.
pub fn render_relation(r: &Relation) -> String {
    let mut out = String::new();
    write_relation(&mut out, r);
    out
}

pub fn render_value(v: &Value) -> String {
    match v {
        Value::Atom(a) => a.to_string(),
        Value::Relation(r) => render_relation(r),
    }
}

fn write_relation(out: &mut String, r: &Relation) {
    out.push('[');
    for (i, t) in r.tuples().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, v) in t.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            match v {
                Value::Atom(a) => out.push_str(a.as_str()),
                Value::Relation(inner) => write_relation(out, inner),
            }
        }
        out.push(']');
    }
    out.push(']');
}

pub fn render_database(db: &Database) -> String {
    let mut out = String::from("domain [");
    for (i, a) in db.domain().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(a.as_str());
    }
    out.push_str("]\nrelations {\n");
    for (name, rel) in db.relations() {
        let _ = writeln!(out, "  {name} : {} = {}", rel.ty(), render_relation(rel));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powerset_equation_syntax() {
        let e = parse_expr("solve{(X:(0,0)) | union(X,R) = R}").unwrap();
        let expected = Expr::solve(
            vec![Binder::new("X", parse_type("(0,0)").unwrap())],
            Expr::union(Expr::name("X"), Expr::name("R")),
            Expr::name("R"),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn nested_operators() {
        let e = parse_expr("project[2,3](unnest[1](E))").unwrap();
        assert_eq!(e, Expr::project([2, 3], Expr::unnest(1, Expr::name("E"))));
        let e = parse_expr(" select [ 1 != 2 ] ( ( R ) ) ").unwrap();
        assert_eq!(e, Expr::select_neq(1, 2, Expr::name("R")));
    }

    #[test]
    fn disequation_sugar() {
        let e = parse_expr("solve{(T:(0,0)) | ETC != empty}").unwrap();
        let body = Expr::name("ETC");
        assert_eq!(
            e,
            Expr::solve(
                vec![Binder::new("T", parse_type("(0,0)").unwrap())],
                Expr::project([1], Expr::times(Expr::Domain, body)),
                Expr::Domain
            )
        );
        let e = parse_expr("solve{(X:(0)) | X = empty}").unwrap();
        assert_eq!(e.to_string(), "solve{(X:(0)) | X = minus(X,X)}");
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_expr("union(R,\n  S").unwrap_err();
        assert_eq!((err.line, err.column), (2, 4));
        let err = parse_expr("frobnicate(R)").unwrap_err();
        assert!(err.message.contains("unknown keyword `frobnicate`"), "{err}");
        let err = parse_expr("project[0](R)").unwrap_err();
        assert!(err.message.contains("start at 1"));
        let err = parse_expr("solve{(X:(0)) | X != R}").unwrap_err();
        assert!(err.message.contains("only allowed with `empty`"));
        assert!(parse_expr("union(R,S) extra").is_err());
        assert!(parse_expr("solve{(union:(0)) | X = X}").is_err());
        assert!(parse_expr("R @ S").is_err());
    }

    #[test]
    fn database_documents() {
        let (db, schema) = parse_database("domain [a,b] relations { R : (0,0) = [[a,b]] }").unwrap();
        assert_eq!(schema.get("R"), Some(parse_type("(0,0)").unwrap()));
        assert_eq!(render_relation(db.relation("R").unwrap()), "[[a,b]]");

        let (db, _) = parse_database("domain [a]\nrelations {\n  R : ((0)) = [[[[a]]]] # one nested tuple\n}").unwrap();
        let r = db.relation("R").unwrap();
        assert_eq!(format!("{r:?}"), "{({(a)})}");

        let err = parse_database("domain []").unwrap_err();
        assert!(err.message.contains("non-empty"), "{err}");
        assert!(parse_database("domain [a] relations { R : (0,0) = [[a]] }").is_err());
        assert!(parse_database("domain [a] relations { R : 0 = [] }").is_err());
        assert!(parse_database("domain [a] relations { R : (0) = [] R : (0) = [] }").is_err());
        assert!(parse_database("domain [a] relations { R : (0) = [[b]] }").is_err());
    }

    #[test]
    fn rendering_is_canonical() {
        let r = parse_relation("[[b],[a],[b]]", parse_type("(0)").unwrap()).unwrap();
        assert_eq!(render_relation(&r), "[[a],[b]]");
        assert_eq!(render_relation(&Relation::empty(parse_type("(0,0)").unwrap())), "[]");
        let t = parse_type("(0,((0)))").unwrap();
        let r = parse_relation("[[a,[[[]],[[[b],[a]]]]]]", t).unwrap();
        let text = render_relation(&r);
        assert_eq!(text, "[[a,[[[]],[[[a],[b]]]]]]");
        assert_eq!(parse_relation(&text, t).unwrap(), r);
    }

    #[test]
    fn schema_lists() {
        let s = parse_schema("R:(0,0), S:((0))").unwrap();
        assert_eq!(s.len(), 2);
        assert!(parse_schema("R:0").is_err());
        assert!(parse_schema("").unwrap().is_empty());
    }
}
