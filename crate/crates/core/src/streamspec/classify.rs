//! Rule shapes, symbol classes and weak guardedness.

use indexmap::IndexMap;

use super::{StreamSpec, SymbolKind, Term};

/// Where the unconsumed remainder of a flat rule goes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    /// The rule ends in the stream variable of argument `j`.
    Arg(usize),
    /// The rule ends in `g(d1:σ_π(1), ..., dk:σ_π(k), ...)`; `feed[j] = (π(j), |dj|)`.
    Call { g: String, feed: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatRule {
    /// Elements matched per stream argument.
    pub consumes: Vec<usize>,
    /// Elements produced before the tail.
    pub produces: usize,
    pub tail: Tail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleShape {
    Flat(FlatRule),
    Nesting { consumes: Vec<usize>, produces: usize },
}

impl RuleShape {
    pub fn is_flat(&self) -> bool {
        matches!(self, RuleShape::Flat(_))
    }

    /// Friendly nesting rules produce at least as much as they take from any argument.
    fn is_friendly(&self) -> bool {
        match self {
            RuleShape::Flat(_) => true,
            RuleShape::Nesting { consumes, produces } => consumes.iter().all(|c| c <= produces),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolClass {
    Pure,
    Flat,
    FriendlyNesting,
    Unfriendly,
}

impl SymbolClass {
    pub fn is_flat(self) -> bool {
        matches!(self, SymbolClass::Pure | SymbolClass::Flat)
    }

    pub fn describe(self) -> &'static str {
        match self {
            SymbolClass::Pure => "pure",
            SymbolClass::Flat => "flat",
            SymbolClass::FriendlyNesting => "friendly nesting",
            SymbolClass::Unfriendly => "not friendly nesting",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Classification {
    /// Shape of each stream function rule, keyed by its index in `stream_rules`.
    pub rules: IndexMap<usize, RuleShape>,
    /// Class of each stream function.
    pub symbols: IndexMap<String, SymbolClass>,
    /// Weak guardedness of each stream symbol (constants and functions).
    pub guarded: IndexMap<String, bool>,
}

impl Classification {
    pub fn class(&self, f: &str) -> Option<SymbolClass> {
        self.symbols.get(f).copied()
    }

    pub fn is_guarded(&self, f: &str) -> bool {
        self.guarded.get(f).copied().unwrap_or(true)
    }
}

fn stream_var(t: &Term) -> Option<&str> {
    match t {
        Term::Var(x, _) => Some(x),
        _ => None,
    }
}

fn shape(spec: &StreamSpec, lhs: &Term, rhs: &Term) -> RuleShape {
    let decl = spec.signature.get(lhs.root().expect("rooted")).expect("declared");
    let mut vars = Vec::new();
    let mut consumes = Vec::new();
    for i in decl.stream_positions() {
        let (heads, tail) = lhs.args()[i].uncons();
        consumes.push(heads.len());
        vars.push(stream_var(tail).unwrap_or_default().to_string());
    }
    let (heads, t) = rhs.uncons();
    let produces = heads.len();
    let index = |x: &str| vars.iter().position(|v| v == x);
    let tail = match t {
        Term::Var(x, _) => index(x).map(Tail::Arg),
        Term::App(g, args, _) if spec.signature.kind(g) == Some(SymbolKind::StreamFunction) => {
            let gdecl = spec.signature.get(g).expect("declared");
            gdecl
                .stream_positions()
                .into_iter()
                .map(|j| {
                    let (ds, rest) = args[j].uncons();
                    stream_var(rest).and_then(index).map(|k| (k, ds.len()))
                })
                .collect::<Option<Vec<_>>>()
                .map(|feed| Tail::Call { g: g.clone(), feed })
        }
        _ => None,
    };
    match tail {
        Some(tail) => RuleShape::Flat(FlatRule { consumes, produces, tail }),
        None => RuleShape::Nesting { consumes, produces },
    }
}

/// Symbols that can reach a cycle of the dependency relation
/// `root(lhs) -> root(rhs)` (for rhs rooted by a stream symbol).
fn unguarded(spec: &StreamSpec) -> Vec<String> {
    let names: Vec<&str> =
        spec.signature.symbols.values().filter(|d| d.kind != SymbolKind::Data).map(|d| d.name.as_str()).collect();
    let idx = |s: &str| names.iter().position(|n| *n == s);
    let mut succ = vec![Vec::new(); names.len()];
    for r in &spec.stream_rules {
        if let (Some(a), Some(b)) = (idx(r.root()), r.rhs.root().and_then(idx)) {
            if !succ[a].contains(&b) {
                succ[a].push(b);
            }
        }
    }
    // A node is normalising iff all successors are; iterate to the least fixed point.
    let mut sn = vec![false; names.len()];
    loop {
        let mut changed = false;
        for v in 0..names.len() {
            if !sn[v] && succ[v].iter().all(|&w| sn[w]) {
                sn[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..names.len()).filter(|&v| !sn[v]).map(|v| names[v].to_string()).collect()
}

/// Classifies every stream function rule and symbol.
pub fn classify(spec: &StreamSpec) -> Classification {
    let mut c = Classification::default();
    for (i, r) in spec.stream_rules.iter().enumerate() {
        if spec.signature.kind(r.root()) == Some(SymbolKind::StreamFunction) {
            c.rules.insert(i, shape(spec, &r.lhs, &r.rhs));
        }
    }
    for f in spec.functions() {
        let shapes: Vec<&RuleShape> = spec.rules_for(&f.name).map(|(i, _)| &c.rules[&i]).collect();
        let class = if shapes.iter().all(|s| s.is_flat()) {
            if shapes.windows(2).all(|w| w[0] == w[1]) {
                SymbolClass::Pure
            } else {
                SymbolClass::Flat
            }
        } else if shapes.iter().all(|s| s.is_friendly()) {
            SymbolClass::FriendlyNesting
        } else {
            SymbolClass::Unfriendly
        };
        c.symbols.insert(f.name.clone(), class);
    }
    // A symbol is no better than what it calls: pure only over pure callees,
    // flat only over flat ones.
    let rank = |k: SymbolClass| k as u8;
    loop {
        let mut changed = false;
        for r in &spec.stream_rules {
            let Some(mine) = c.class(r.root()) else { continue };
            let mut syms = Vec::new();
            r.rhs.symbols(&mut syms);
            let worst = syms.iter().filter_map(|s| c.class(s)).max_by_key(|k| rank(*k));
            if let Some(w) = worst.filter(|w| rank(*w) > rank(mine)) {
                c.symbols.insert(r.root().to_string(), w);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let bad = unguarded(spec);
    for d in spec.signature.symbols.values().filter(|d| d.kind != SymbolKind::Data) {
        c.guarded.insert(d.name.clone(), !bad.contains(&d.name));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streamspec::parse;

    #[test]
    fn pascal_f_is_flat() {
        let spec = parse(
            "Signature(P : stream(nat), 0 : nat, f : stream(nat) -> stream(nat), a : nat -> nat -> nat, s : nat -> nat)
P = 0:s(0):f(P)
f(s(x):y:sigma) = a(s(x),y):f(y:sigma)
f(0:sigma) = 0:s(0):f(sigma)
a(s(x),y) = s(a(x,y))
a(0,y) = y
",
        )
        .unwrap();
        let c = classify(&spec);
        assert_eq!(c.class("f"), Some(SymbolClass::Flat));
        assert!(c.is_guarded("f") && c.is_guarded("P"));
        let RuleShape::Flat(r) = &c.rules[&1] else { panic!() };
        assert_eq!(r.consumes, vec![2]);
        assert_eq!(r.produces, 1);
        assert_eq!(r.tail, Tail::Call { g: "f".into(), feed: vec![(0, 1)] });
    }

    #[test]
    fn nesting_and_unguarded() {
        let spec = parse(
            "Signature(B : stream(b), g : stream(b) -> stream(b), n : stream(b) -> stream(b), 0, 1 : b)
B = 0:g(B)
g(0:s) = 1:0:g(s)
g(1:s) = g(s)
n(x:s) = x:n(n(s))
",
        )
        .unwrap();
        let c = classify(&spec);
        assert_eq!(c.class("g"), Some(SymbolClass::Flat));
        assert!(!c.is_guarded("g"));
        assert!(c.is_guarded("B"));
        assert_eq!(c.class("n"), Some(SymbolClass::FriendlyNesting));
    }

    #[test]
    fn unfriendly_nesting() {
        let spec = parse(
            "Signature(C : stream(b), e : stream(b) -> stream(b), 0 : b)
C = 0:e(C)
e(x:y:s) = x:e(e(s))
",
        )
        .unwrap();
        assert_eq!(classify(&spec).class("e"), Some(SymbolClass::Unfriendly));
    }
}
