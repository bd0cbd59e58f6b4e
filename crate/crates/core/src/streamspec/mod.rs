//! Stream specifications: a signature of stream constants, stream functions and
//! data symbols, plus rewrite rules for both layers.

mod classify;
mod parse;
mod validate;

use std::fmt;

use indexmap::IndexMap;

pub use classify::{classify, Classification, FlatRule, RuleShape, SymbolClass, Tail};
pub use parse::parse;
pub use validate::validate;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

/// A declared sort. Streams are parameterized by the sort of their elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Stream(String),
    Data(String),
}

impl Sort {
    pub fn is_stream(&self) -> bool {
        matches!(self, Sort::Stream(_))
    }

    /// The data sort itself, or the element sort of a stream.
    pub fn element(&self) -> &str {
        match self {
            Sort::Stream(s) | Sort::Data(s) => s,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Stream(s) => write!(f, "stream({s})"),
            Sort::Data(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    StreamConstant,
    StreamFunction,
    Data,
}

#[derive(Clone, Debug)]
pub struct SymbolDecl {
    pub name: String,
    pub args: Vec<Sort>,
    pub result: Sort,
    pub kind: SymbolKind,
    pub pos: Pos,
}

impl PartialEq for SymbolDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.args == other.args && self.result == other.result && self.kind == other.kind
    }
}

impl Eq for SymbolDecl {}

impl SymbolDecl {
    /// Indices (into `args`) of the stream arguments, in order.
    pub fn stream_positions(&self) -> Vec<usize> {
        (0..self.args.len()).filter(|&i| self.args[i].is_stream()).collect()
    }

    pub fn stream_arity(&self) -> usize {
        self.args.iter().filter(|s| s.is_stream()).count()
    }

    pub fn data_arity(&self) -> usize {
        self.args.len() - self.stream_arity()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub symbols: IndexMap<String, SymbolDecl>,
}

impl Signature {
    pub fn get(&self, name: &str) -> Option<&SymbolDecl> {
        self.symbols.get(name)
    }

    pub fn kind(&self, name: &str) -> Option<SymbolKind> {
        self.get(name).map(|d| d.kind)
    }

    pub fn of_kind(&self, kind: SymbolKind) -> impl Iterator<Item = &SymbolDecl> {
        self.symbols.values().filter(move |d| d.kind == kind)
    }
}

/// A two-sorted term. Positions are ignored by equality.
#[derive(Clone, Debug)]
pub enum Term {
    Var(String, Pos),
    App(String, Vec<Term>, Pos),
    Cons(Box<Term>, Box<Term>, Pos),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Var(a, _), Term::Var(b, _)) => a == b,
            (Term::App(f, xs, _), Term::App(g, ys, _)) => f == g && xs == ys,
            (Term::Cons(h1, t1, _), Term::Cons(h2, t2, _)) => h1 == h2 && t1 == t2,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Term {
    pub fn pos(&self) -> Pos {
        match self {
            Term::Var(_, p) | Term::App(_, _, p) | Term::Cons(_, _, p) => *p,
        }
    }

    /// Root symbol name, if the term is an application.
    pub fn root(&self) -> Option<&str> {
        match self {
            Term::App(f, _, _) => Some(f),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, xs, _) => xs,
            _ => &[],
        }
    }

    /// Splits `w1 : ... : wm : t` into the heads and the tail `t`.
    pub fn uncons(&self) -> (Vec<&Term>, &Term) {
        let mut heads = Vec::new();
        let mut t = self;
        while let Term::Cons(h, rest, _) = t {
            heads.push(&**h);
            t = rest;
        }
        (heads, t)
    }

    pub fn vars(&self, out: &mut Vec<(String, Pos)>) {
        match self {
            Term::Var(x, p) => out.push((x.clone(), *p)),
            Term::App(_, xs, _) => xs.iter().for_each(|x| x.vars(out)),
            Term::Cons(h, t, _) => {
                h.vars(out);
                t.vars(out);
            }
        }
    }

    pub fn symbols(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(..) => {}
            Term::App(f, xs, _) => {
                out.push(f.clone());
                xs.iter().for_each(|x| x.symbols(out));
            }
            Term::Cons(h, t, _) => {
                h.symbols(out);
                t.symbols(out);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x, _) => f.write_str(x),
            Term::App(g, xs, _) if xs.is_empty() => f.write_str(g),
            Term::App(g, xs, _) => {
                let args: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "{g}({})", args.join(","))
            }
            Term::Cons(h, t, _) => match **h {
                Term::Cons(..) => write!(f, "({h}):{t}"),
                _ => write!(f, "{h}:{t}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn root(&self) -> &str {
        self.lhs.root().expect("rule roots are checked by the parser")
    }

    pub fn pos(&self) -> Pos {
        self.lhs.pos()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamSpec {
    pub signature: Signature,
    pub stream_rules: Vec<Rule>,
    pub data_rules: Vec<Rule>,
}

impl StreamSpec {
    pub fn rules_for<'a>(&'a self, name: &'a str) -> impl Iterator<Item = (usize, &'a Rule)> + 'a {
        self.stream_rules.iter().enumerate().filter(move |(_, r)| r.root() == name)
    }

    pub fn constants(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.signature.of_kind(SymbolKind::StreamConstant)
    }

    pub fn functions(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.signature.of_kind(SymbolKind::StreamFunction)
    }

    /// Data symbols that are roots of some data rule.
    pub fn is_defined_data(&self, name: &str) -> bool {
        self.data_rules.iter().any(|r| r.root() == name)
    }

    /// Data constructors whose result sort is `sort`.
    pub fn constructors_of(&self, sort: &str) -> Vec<&SymbolDecl> {
        self.signature
            .of_kind(SymbolKind::Data)
            .filter(|d| d.result.element() == sort && !self.is_defined_data(&d.name))
            .collect()
    }

    /// Stream symbols reachable from `root` through rule right-hand sides (including `root`).
    pub fn reachable_symbols(&self, root: &str) -> Vec<String> {
        let mut seen = vec![root.to_string()];
        let mut i = 0;
        while i < seen.len() {
            let f = seen[i].clone();
            for (_, r) in self.rules_for(&f) {
                let mut syms = Vec::new();
                r.rhs.symbols(&mut syms);
                for s in syms {
                    if self.signature.kind(&s) != Some(SymbolKind::Data) && !seen.contains(&s) {
                        seen.push(s);
                    }
                }
            }
            i += 1;
        }
        seen
    }
}

impl fmt::Display for StreamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Signature(")?;
        let n = self.signature.symbols.len();
        for (i, d) in self.signature.symbols.values().enumerate() {
            let mut ty: Vec<String> = d.args.iter().map(|s| s.to_string()).collect();
            ty.push(d.result.to_string());
            let sep = if i + 1 < n { "," } else { "" };
            writeln!(f, "  {} : {}{sep}", d.name, ty.join(" -> "))?;
        }
        writeln!(f, ")")?;
        for r in &self.stream_rules {
            writeln!(f, "{r}")?;
        }
        if !self.data_rules.is_empty() {
            writeln!(f)?;
        }
        for r in &self.data_rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
