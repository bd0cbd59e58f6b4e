//! Tokenizer and recursive-descent parser for the specification format.

use std::collections::HashMap;

use super::{Pos, Rule, Signature, Sort, StreamSpec, SymbolDecl, SymbolKind, Term};
use crate::error::{Diagnostic, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Arrow,
    Eq,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Pos { line: li + 1, col: i + 1 };
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '-' && chars.get(i + 1) == Some(&'-') {
                break;
            }
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                '-' if chars.get(i + 1) == Some(&'>') => {
                    i += 1;
                    Tok::Arrow
                }
                c if is_ident_char(c) => {
                    let start = i;
                    while i + 1 < chars.len() && is_ident_char(chars[i + 1]) {
                        i += 1;
                    }
                    Tok::Ident(chars[start..=i].iter().collect())
                }
                c => {
                    return Err(Error::Parse(vec![Diagnostic::error(pos.line, pos.col,
                        format!("unexpected character `{c}`"),
                    )]))
                }
            };
            out.push((tok, pos));
            i += 1;
        }
    }
    Ok(out)
}

/// Untyped term as written; resolved against the signature afterwards.
enum Raw {
    App(String, Vec<Raw>, Pos),
    Cons(Box<Raw>, Box<Raw>, Pos),
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
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse(vec![Diagnostic::error(self.pos().line, self.pos().col, msg)]))
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        match self.peek() {
            Some(t) => self.fail(format!("expected {wanted}, found {}", t.describe())),
            None => self.fail(format!("expected {wanted}, found end of input")),
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

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.unexpected(&t.describe())
        }
    }

    fn ident(&mut self) -> Result<(String, Pos)> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                let p = self.pos();
                self.at += 1;
                Ok((s, p))
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn sort(&mut self) -> Result<Sort> {
        let (name, _) = self.ident()?;
        if name == "stream" && self.eat(&Tok::LParen) {
            let (elem, _) = self.ident()?;
            self.expect(Tok::RParen)?;
            Ok(Sort::Stream(elem))
        } else {
            Ok(Sort::Data(name))
        }
    }

    fn signature(&mut self) -> Result<Signature> {
        let mut sig = Signature::default();
        let (kw, _) = self.ident()?;
        if kw != "Signature" {
            self.at -= 1;
            return self.fail(format!("expected `Signature`, found `{kw}`"));
        }
        self.expect(Tok::LParen)?;
        while !self.eat(&Tok::RParen) {
            let mut names = vec![self.ident()?];
            while self.eat(&Tok::Comma) {
                names.push(self.ident()?);
            }
            self.expect(Tok::Colon)?;
            let mut sorts = vec![self.sort()?];
            while self.eat(&Tok::Arrow) {
                sorts.push(self.sort()?);
            }
            let result = sorts.pop().expect("at least one sort");
            // Stream symbols without stream arguments are (data-indexed) constants.
            let kind = match (&result, sorts.iter().any(Sort::is_stream)) {
                (Sort::Stream(_), false) => SymbolKind::StreamConstant,
                (Sort::Stream(_), true) => SymbolKind::StreamFunction,
                (Sort::Data(_), _) => SymbolKind::Data,
            };
            for (name, pos) in names {
                if kind == SymbolKind::Data && sorts.iter().any(Sort::is_stream) {
                    return Err(Error::Parse(vec![Diagnostic::error(pos.line, pos.col,
                        format!("data symbol `{name}` cannot take stream arguments"),
                    )]));
                }
                if let Some(prev) = sig.symbols.get(&name) {
                    return Err(Error::Parse(vec![Diagnostic::error(pos.line, pos.col,
                        format!(
                            "redeclaration of `{name}` (first declared at {}:{})",
                            prev.pos.line, prev.pos.col
                        ),
                    )]));
                }
                let decl = SymbolDecl { name: name.clone(), args: sorts.clone(), result: result.clone(), kind, pos };
                sig.symbols.insert(name, decl);
            }
            if !self.eat(&Tok::Comma) && self.peek() != Some(&Tok::RParen) {
                return self.unexpected("`,` or `)`");
            }
        }
        Ok(sig)
    }

    fn term(&mut self) -> Result<Raw> {
        let head = self.atom()?;
        if self.peek() == Some(&Tok::Colon) {
            let p = self.pos();
            self.at += 1;
            let tail = self.term()?;
            return Ok(Raw::Cons(Box::new(head), Box::new(tail), p));
        }
        Ok(head)
    }

    fn atom(&mut self) -> Result<Raw> {
        if self.eat(&Tok::LParen) {
            let t = self.term()?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        let (name, pos) = self.ident()?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            args.push(self.term()?);
            while self.eat(&Tok::Comma) {
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
        }
        Ok(Raw::App(name, args, pos))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Class {
    S,
    D,
}

impl Class {
    fn of(s: &Sort) -> Class {
        if s.is_stream() {
            Class::S
        } else {
            Class::D
        }
    }

    fn name(self) -> &'static str {
        match self {
            Class::S => "stream",
            Class::D => "data",
        }
    }
}

/// Resolves raw terms against the signature and checks sorts at the
/// stream/data level. Left-hand sides bind variables, right-hand sides use them.
struct Resolver<'a> {
    sig: &'a Signature,
    vars: HashMap<String, Class>,
    lhs: bool,
}

impl Resolver<'_> {
    fn err<T>(pos: Pos, msg: String) -> Result<T> {
        Err(Error::Parse(vec![Diagnostic::error(pos.line, pos.col, msg)]))
    }

    fn resolve(&mut self, raw: Raw, want: Class) -> Result<Term> {
        match raw {
            Raw::Cons(h, t, p) => {
                if want != Class::S {
                    return Self::err(p, "sort clash: stream cons `:` used at a data position".into());
                }
                let h = self.resolve(*h, Class::D)?;
                let t = self.resolve(*t, Class::S)?;
                Ok(Term::Cons(Box::new(h), Box::new(t), p))
            }
            Raw::App(name, args, p) => match self.sig.get(&name) {
                Some(decl) => {
                    if args.len() != decl.args.len() {
                        return Self::err(
                            p,
                            format!("`{name}` expects {} argument(s), found {}", decl.args.len(), args.len()),
                        );
                    }
                    let have = Class::of(&decl.result);
                    if have != want {
                        return Self::err(
                            p,
                            format!("sort clash: `{name}` is {} but a {} term is expected", have.name(), want.name()),
                        );
                    }
                    let sorts = decl.args.clone();
                    let args = args
                        .into_iter()
                        .zip(&sorts)
                        .map(|(a, s)| self.resolve(a, Class::of(s)))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Term::App(name, args, p))
                }
                None => {
                    if !args.is_empty() {
                        return Self::err(p, format!("undeclared symbol `{name}`"));
                    }
                    match self.vars.get(&name) {
                        Some(&c) if c != want => Self::err(
                            p,
                            format!("sort clash: variable `{name}` is {} but used as {}", c.name(), want.name()),
                        ),
                        Some(_) => Ok(Term::Var(name, p)),
                        None if self.lhs => {
                            self.vars.insert(name.clone(), want);
                            Ok(Term::Var(name, p))
                        }
                        None => Self::err(p, format!("unbound {} variable on rhs: `{name}`", want.name())),
                    }
                }
            },
        }
    }
}

fn rule(sig: &Signature, lhs: Raw, rhs: Raw) -> Result<(Rule, SymbolKind)> {
    let (root, pos) = match &lhs {
        Raw::App(name, _, p) => (name.clone(), *p),
        Raw::Cons(_, _, p) => {
            return Resolver::err(*p, "rule lhs must be rooted by a declared symbol, found `:`".into())
        }
    };
    let decl = match sig.get(&root) {
        Some(d) => d,
        None => return Resolver::err(pos, format!("variable on lhs root: `{root}`")),
    };
    let class = Class::of(&decl.result);
    let mut r = Resolver { sig, vars: HashMap::new(), lhs: true };
    let lhs = r.resolve(lhs, class)?;
    r.lhs = false;
    let rhs = r.resolve(rhs, class)?;
    Ok((Rule { lhs, rhs }, decl.kind))
}

/// Parses a specification and resolves it against its signature.
pub fn parse(src: &str) -> Result<StreamSpec> {
    let toks = lex(src)?;
    let lines = src.lines().count().max(1);
    let mut p = Parser { toks, at: 0, end: Pos { line: lines, col: 1 } };
    if p.peek().is_none() {
        return p.fail("no stream constant declared");
    }
    let signature = p.signature()?;
    if !signature.symbols.values().any(|d| d.result.is_stream()) {
        return Err(Error::Parse(vec![Diagnostic::error(1, 1,
            "no stream constant declared",
        )]));
    }
    let mut stream_rules = Vec::new();
    let mut data_rules = Vec::new();
    while p.peek().is_some() {
        let lhs = p.term()?;
        p.expect(Tok::Eq)?;
        let rhs = p.term()?;
        let (r, kind) = rule(&signature, lhs, rhs)?;
        match kind {
            SymbolKind::Data => data_rules.push(r),
            _ => stream_rules.push(r),
        }
    }
    Ok(StreamSpec { signature, stream_rules, data_rules })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PASCAL: &str = "Signature(
  P : stream(nat),
  0 : nat,
  f : stream(nat) -> stream(nat),
  a : nat -> nat -> nat,
  s : nat -> nat
)
P = 0:s(0):f(P)
f(s(x):y:sigma) = a(s(x),y):f(y:sigma)
f(0:sigma) = 0:s(0):f(sigma)

a(s(x),y) = s(a(x,y))
a(0,y) = y
";

    fn message(e: Error) -> String {
        e.diagnostics()[0].message.clone()
    }

    #[test]
    fn pascal_shape() {
        let spec = parse(PASCAL).unwrap();
        assert_eq!(spec.rules_for("P").count(), 1);
        assert_eq!(spec.rules_for("f").count(), 2);
        assert_eq!(spec.data_rules.len(), 2);
        assert_eq!(spec.stream_rules[1].to_string(), "f(s(x):y:sigma) = a(s(x),y):f(y:sigma)");
    }

    #[test]
    fn cons_is_right_associative() {
        let spec = parse(PASCAL).unwrap();
        let (heads, tail) = spec.stream_rules[0].rhs.uncons();
        assert_eq!(heads.len(), 2);
        assert_eq!(tail.root(), Some("f"));
    }

    #[test]
    fn comments_and_grouped_names() {
        let src = "-- header\nSignature(\n  Q, R : stream(c), -- two\n  a, b: c\n)\nQ = a:R\nR = b:Q\n";
        let spec = parse(src).unwrap();
        assert_eq!(spec.constants().count(), 2);
        assert_eq!(spec.signature.kind("b"), Some(SymbolKind::Data));
    }

    #[test]
    fn errors() {
        let unbound = parse("Signature(P : stream(n))\nP = x\n").unwrap_err();
        assert!(message(unbound).starts_with("unbound stream variable on rhs"));
        let empty = parse("-- nothing here\n-- at all\n").unwrap_err();
        assert_eq!(message(empty), "no stream constant declared");
        let redecl = parse("Signature(P : stream(n), P : n)\n").unwrap_err();
        assert!(message(redecl).starts_with("redeclaration"));
        let lhs_var = parse("Signature(P : stream(n))\nx = P\n").unwrap_err();
        assert!(message(lhs_var).starts_with("variable on lhs root"));
        let clash = parse("Signature(P : stream(n), a : n)\nP = a\n").unwrap_err();
        assert!(message(clash).starts_with("sort clash"));
        let lexical = parse("Signature(P : stream(n))\nP = P;\n").unwrap_err();
        assert_eq!(lexical.diagnostics()[0].line, 2);
        assert_eq!(lexical.diagnostics()[0].col, 6);
    }

    #[test]
    fn print_parse_roundtrip() {
        let spec = parse(PASCAL).unwrap();
        let again = parse(&spec.to_string()).unwrap();
        assert_eq!(spec, again);
    }
}
