//! Site-file syntax: declarations holding `key = value` fields, where
//! values are atoms, lists, or mappings. The grammar is in
//! `docs/site-grammar.ebnf`.

use std::fmt;
use std::fmt::Write as _;

use descent_core::Atom;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: syntax error: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

/// A value with its source position. Equality ignores positions.
#[derive(Debug, Clone)]
pub struct Value {
    pub kind: ValueKind,
    pub pos: Pos,
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Value {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueKind {
    Atom(Atom),
    List(Vec<Value>),
    Map(Vec<(Value, Value)>),
}

impl Value {
    pub fn atom(a: Atom) -> Value {
        Value {
            kind: ValueKind::Atom(a),
            pos: Pos::default(),
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match &self.kind {
            ValueKind::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// A bare name, as used for references.
    pub fn as_name(&self) -> Option<&str> {
        match &self.kind {
            ValueKind::Atom(Atom::Name(n)) => Some(n),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match &self.kind {
            ValueKind::List(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&[(Value, Value)]> {
        match &self.kind {
            ValueKind::Map(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Field {
    pub key: String,
    pub value: Value,
    pub pos: Pos,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.value == other.value
    }
}

impl Eq for Field {}

#[derive(Debug, Clone)]
pub struct Decl {
    pub kind: String,
    pub name: String,
    pub fields: Vec<Field>,
    pub pos: Pos,
}

impl PartialEq for Decl {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.name == other.name && self.fields == other.fields
    }
}

impl Eq for Decl {}

impl Decl {
    pub fn field(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.key == key)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Quoted(String),
    Star,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Colon,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Quoted(q) => write!(f, "\"{q}\""),
            Tok::Star => f.write_str("`*`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Eq => f.write_str("`=`"),
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '-' | '.')
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Eq),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(t) = single {
            bump(&mut chars);
            out.push((t, pos));
        } else if c.is_whitespace() {
            bump(&mut chars);
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
        } else if c == '"' {
            bump(&mut chars);
            let mut s = String::new();
            loop {
                match bump(&mut chars) {
                    Some('"') => break,
                    Some('\\') => match bump(&mut chars) {
                        Some(e @ ('"' | '\\')) => s.push(e),
                        _ => {
                            return Err(SyntaxError {
                                pos,
                                message: "unsupported escape in quoted name".into(),
                            })
                        }
                    },
                    Some('\n') | None => {
                        return Err(SyntaxError {
                            pos,
                            message: "unterminated quoted name".into(),
                        })
                    }
                    Some(c) => s.push(c),
                }
            }
            out.push((Tok::Quoted(s), pos));
        } else if is_word_char(c) {
            let mut s = String::new();
            while chars.peek().is_some_and(|&c| is_word_char(c)) {
                s.push(bump(&mut chars).expect("peeked"));
            }
            out.push((Tok::Word(s), pos));
        } else {
            return Err(SyntaxError {
                pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn found(&self) -> String {
        self.peek()
            .map_or("end of file".to_string(), |t| t.to_string())
    }

    fn expect(&mut self, t: Tok) -> Result<(), SyntaxError> {
        if self.peek() == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected {t}, found {}", self.found()))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, Pos), SyntaxError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.at += 1;
                Ok((w, pos))
            }
            _ => self.err(format!("expected {what}, found {}", self.found())),
        }
    }

    fn document(&mut self) -> Result<Document, SyntaxError> {
        let mut decls = Vec::new();
        while self.peek().is_some() {
            decls.push(self.decl()?);
        }
        Ok(Document { decls })
    }

    fn decl(&mut self) -> Result<Decl, SyntaxError> {
        let (kind, pos) = self.word("a declaration kind")?;
        let (name, _) = self.word("a declaration name")?;
        self.expect(Tok::LBrace)?;
        let mut fields = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let (key, fpos) = self.word("a field name or `}`")?;
            self.expect(Tok::Eq)?;
            let value = self.value()?;
            if fields.iter().any(|f: &Field| f.key == key) {
                return Err(SyntaxError {
                    pos: fpos,
                    message: format!("duplicate field `{key}`"),
                });
            }
            fields.push(Field {
                key,
                value,
                pos: fpos,
            });
            self.eat(&Tok::Comma);
        }
        Ok(Decl {
            kind,
            name,
            fields,
            pos,
        })
    }

    fn value(&mut self) -> Result<Value, SyntaxError> {
        let pos = self.pos();
        let kind = match self.peek() {
            Some(Tok::LBracket) => {
                self.at += 1;
                let mut items = Vec::new();
                while !self.eat(&Tok::RBracket) {
                    items.push(self.value()?);
                    if !self.eat(&Tok::Comma) && self.peek() != Some(&Tok::RBracket) {
                        return self.err(format!("expected `,` or `]`, found {}", self.found()));
                    }
                }
                ValueKind::List(items)
            }
            Some(Tok::LBrace) => {
                self.at += 1;
                let mut entries = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    let k = self.atom_value()?;
                    self.expect(Tok::Colon)?;
                    let v = self.value()?;
                    entries.push((k, v));
                    if !self.eat(&Tok::Comma) && self.peek() != Some(&Tok::RBrace) {
                        return self.err(format!("expected `,` or `}}`, found {}", self.found()));
                    }
                }
                ValueKind::Map(entries)
            }
            _ => return self.atom_value(),
        };
        Ok(Value { kind, pos })
    }

    fn atom_value(&mut self) -> Result<Value, SyntaxError> {
        let pos = self.pos();
        Ok(Value {
            kind: ValueKind::Atom(self.atom()?),
            pos,
        })
    }

    fn atom(&mut self) -> Result<Atom, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Star) => {
                self.at += 1;
                Ok(Atom::Star)
            }
            Some(Tok::Word(w)) => {
                self.at += 1;
                Ok(match w.parse::<i64>() {
                    Ok(n) => Atom::Int(n),
                    Err(_) => Atom::name(&w),
                })
            }
            Some(Tok::Quoted(q)) => {
                self.at += 1;
                Ok(Atom::name(&q))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let a = self.atom()?;
                self.expect(Tok::Comma)?;
                let b = self.atom()?;
                self.expect(Tok::RParen)?;
                Ok(Atom::pair(a, b))
            }
            _ => self.err(format!("expected an atom, found {}", self.found())),
        }
    }
}

pub fn parse(src: &str) -> Result<Document, SyntaxError> {
    let toks = lex(src)?;
    let lines = src.lines().count().max(1);
    let end = Pos {
        line: lines,
        col: src.lines().last().map_or(1, |l| l.chars().count() + 1),
    };
    Parser { toks, at: 0, end }.document()
}

fn needs_quotes(n: &str) -> bool {
    n.is_empty() || !n.chars().all(is_word_char) || n.parse::<i64>().is_ok()
}

/// Prints an atom in the form [`parse`] reads back.
pub fn write_atom(f: &mut impl fmt::Write, a: &Atom) -> fmt::Result {
    match a {
        Atom::Star => f.write_char('*'),
        Atom::Int(n) => write!(f, "{n}"),
        Atom::Name(n) if needs_quotes(n) => {
            f.write_char('"')?;
            for c in n.chars() {
                if matches!(c, '"' | '\\') {
                    f.write_char('\\')?;
                }
                f.write_char(c)?;
            }
            f.write_char('"')
        }
        Atom::Name(n) => f.write_str(n),
        Atom::Pair(p) => {
            f.write_char('(')?;
            write_atom(f, &p.0)?;
            f.write_str(", ")?;
            write_atom(f, &p.1)?;
            f.write_char(')')
        }
        // coproduct tags have no surface syntax; print them as names
        Atom::Tag(..) => write_atom(f, &Atom::name(&a.to_string())),
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ValueKind::Atom(a) => write_atom(f, a),
            ValueKind::List(items) => {
                f.write_char('[')?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_char(']')
            }
            ValueKind::Map(entries) => {
                f.write_char('{')?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_char('}')
            }
        }
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.decls.iter().enumerate() {
            if i > 0 {
                f.write_char('\n')?;
            }
            writeln!(f, "{} {} {{", d.kind, d.name)?;
            for field in &d.fields {
                writeln!(f, "  {} = {}", field.key, field.value)?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}
