//! Well-formedness checks: pattern shape, left-linearity, overlap and
//! exhaustiveness.

use std::collections::HashSet;
use std::fmt;

use super::{Pos, Rule, Sort, StreamSpec, SymbolKind, Term};
use crate::error::Diagnostic;

fn error(pos: Pos, msg: String) -> Diagnostic {
    Diagnostic::error(pos.line, pos.col, msg)
}

fn is_constructor_pattern(spec: &StreamSpec, t: &Term) -> bool {
    match t {
        Term::Var(..) => true,
        Term::App(c, args, _) => {
            spec.signature.kind(c) == Some(SymbolKind::Data)
                && !spec.is_defined_data(c)
                && args.iter().all(|a| is_constructor_pattern(spec, a))
        }
        Term::Cons(..) => false,
    }
}

/// A stream argument pattern must be `u1 : ... : un : σ` with constructor heads.
fn is_stream_pattern(spec: &StreamSpec, t: &Term) -> bool {
    let (heads, tail) = t.uncons();
    matches!(tail, Term::Var(..)) && heads.iter().all(|h| is_constructor_pattern(spec, h))
}

fn check_shape(spec: &StreamSpec, r: &Rule, out: &mut Vec<Diagnostic>) {
    let decl = spec.signature.get(r.root()).expect("resolved");
    for (arg, sort) in r.lhs.args().iter().zip(&decl.args) {
        let ok = if sort.is_stream() { is_stream_pattern(spec, arg) } else { is_constructor_pattern(spec, arg) };
        if !ok {
            out.push(error(arg.pos(), format!("lhs argument `{arg}` of `{}` is not a constructor pattern", r.root())));
        }
    }
    let mut vars = Vec::new();
    r.lhs.vars(&mut vars);
    let mut seen = HashSet::new();
    for (v, p) in vars {
        if !seen.insert(v.clone()) {
            out.push(error(p, format!("rule is not left-linear: variable `{v}` occurs twice")));
        }
    }
}

/// Unification of two linear patterns with disjoint variables reduces to a
/// structural compatibility check.
fn unifiable(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Var(..), _) | (_, Term::Var(..)) => true,
        (Term::App(f, xs, _), Term::App(g, ys, _)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unifiable(x, y))
        }
        (Term::Cons(h1, t1, _), Term::Cons(h2, t2, _)) => unifiable(h1, h2) && unifiable(t1, t2),
        _ => false,
    }
}

#[derive(Clone, Debug)]
enum Pat {
    Wild,
    Hole(bool),
    Ctor(String, Vec<Pat>),
}

impl fmt::Display for Pat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pat::Wild | Pat::Hole(false) => f.write_str("_"),
            Pat::Hole(true) => f.write_str("σ"),
            Pat::Ctor(c, args) if c == ":" => write!(f, "{}:{}", args[0], args[1]),
            Pat::Ctor(c, args) if args.is_empty() => f.write_str(c),
            Pat::Ctor(c, args) => {
                let xs: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{c}({})", xs.join(","))
            }
        }
    }
}

fn to_pat(t: &Term) -> Pat {
    match t {
        Term::Var(..) => Pat::Wild,
        Term::App(c, args, _) => Pat::Ctor(c.clone(), args.iter().map(to_pat).collect()),
        Term::Cons(h, tl, _) => Pat::Ctor(":".into(), vec![to_pat(h), to_pat(tl)]),
    }
}

struct Matrix<'a> {
    spec: &'a StreamSpec,
}

impl Matrix<'_> {
    /// Constructors of a sort with their argument sorts; `None` when the sort
    /// has no known constructors (treated as an open domain).
    fn signature_of(&self, s: &Sort) -> Option<Vec<(String, Vec<Sort>)>> {
        match s {
            Sort::Stream(e) => Some(vec![(":".into(), vec![Sort::Data(e.clone()), Sort::Stream(e.clone())])]),
            Sort::Data(d) => {
                let cs = self.spec.constructors_of(d);
                if cs.is_empty() {
                    None
                } else {
                    Some(cs.iter().map(|c| (c.name.clone(), c.args.clone())).collect())
                }
            }
        }
    }

    /// A value vector not matched by any row, if one exists.
    fn missing(&self, rows: &[Vec<Pat>], sorts: &[Sort]) -> Option<Vec<Pat>> {
        let Some(first) = sorts.first() else {
            return rows.is_empty().then(Vec::new);
        };
        if rows.is_empty() {
            return Some(sorts.iter().map(|s| Pat::Hole(s.is_stream())).collect());
        }
        let rest = &sorts[1..];
        let heads: HashSet<&str> = rows
            .iter()
            .filter_map(|r| match &r[0] {
                Pat::Ctor(c, _) => Some(c.as_str()),
                _ => None,
            })
            .collect();
        let sig = self.signature_of(first);
        if let Some(cs) = &sig {
            if cs.iter().all(|(c, _)| heads.contains(c.as_str())) {
                for (c, arg_sorts) in cs {
                    let k = arg_sorts.len();
                    let spec: Vec<Vec<Pat>> = rows
                        .iter()
                        .filter_map(|r| match &r[0] {
                            Pat::Ctor(d, args) if d == c => Some(args.iter().chain(&r[1..]).cloned().collect()),
                            Pat::Ctor(..) => None,
                            _ => Some(std::iter::repeat_n(Pat::Wild, k).chain(r[1..].iter().cloned()).collect()),
                        })
                        .collect();
                    let sorts2: Vec<Sort> = arg_sorts.iter().chain(rest).cloned().collect();
                    if let Some(w) = self.missing(&spec, &sorts2) {
                        let (args, tail) = w.split_at(k);
                        let mut out = vec![Pat::Ctor(c.clone(), args.to_vec())];
                        out.extend_from_slice(tail);
                        return Some(out);
                    }
                }
                return None;
            }
        }
        let default: Vec<Vec<Pat>> =
            rows.iter().filter(|r| !matches!(r[0], Pat::Ctor(..))).map(|r| r[1..].to_vec()).collect();
        let w = self.missing(&default, rest)?;
        let head = match sig.and_then(|cs| cs.into_iter().find(|(c, _)| !heads.contains(c.as_str()))) {
            Some((c, args)) => Pat::Ctor(c, args.iter().map(|s| Pat::Hole(s.is_stream())).collect()),
            None => Pat::Hole(first.is_stream()),
        };
        let mut out = vec![head];
        out.extend(w);
        Some(out)
    }
}

fn witness(spec: &StreamSpec, name: &str) -> Option<String> {
    let decl = spec.signature.get(name)?;
    let rows: Vec<Vec<Pat>> = spec.rules_for(name).map(|(_, r)| r.lhs.args().iter().map(to_pat).collect()).collect();
    let w = Matrix { spec }.missing(&rows, &decl.args)?;
    let args: Vec<String> = w.iter().map(|p| p.to_string()).collect();
    Some(if args.is_empty() { name.to_string() } else { format!("{name}({})", args.join(",")) })
}

/// Checks a parsed specification. Errors block analysis, warnings and notes do not.
pub fn validate(spec: &StreamSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for r in spec.stream_rules.iter().chain(&spec.data_rules) {
        check_shape(spec, r, &mut out);
    }
    for rules in [&spec.stream_rules, &spec.data_rules] {
        for (i, a) in rules.iter().enumerate() {
            for b in &rules[i + 1..] {
                if a.root() == b.root() && unifiable(&a.lhs, &b.lhs) {
                    let (pa, pb) = (a.pos(), b.pos());
                    out.push(error(pb, format!("rule overlaps with the rule at {}:{}: `{}`", pa.line, pa.col, a.lhs)));
                }
            }
        }
    }
    for decl in spec.signature.symbols.values() {
        if decl.kind == SymbolKind::Data {
            continue;
        }
        let what = if decl.kind == SymbolKind::StreamConstant { "stream constant" } else { "stream function" };
        if spec.rules_for(&decl.name).next().is_none() {
            out.push(error(decl.pos, format!("{what} `{}` has no defining rule", decl.name)));
        } else if let Some(w) = witness(spec, &decl.name) {
            out.push(Diagnostic::warning(
                decl.pos.line,
                decl.pos.col,
                format!("non-exhaustive patterns for {what} `{}`: `{w}` is not matched", decl.name),
            ));
        }
    }
    if let Some(r) = spec.data_rules.first() {
        let p = r.pos();
        out.push(Diagnostic::note(p.line, p.col, "termination of the data layer is assumed, not proven"));
    }
    out.sort_by_key(|d| (d.line, d.col));
    out
}
