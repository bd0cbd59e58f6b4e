//! IO-term equation systems: the (infinite) system generated from a stream
//! specification, its finitization, and a bounded evaluator used as an oracle.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use indexmap::IndexMap;

use crate::conat::CoNat;
use crate::error::{Error, Result};
use crate::ioalg::Polarity;
use crate::streamspec::{Classification, RuleShape, StreamSpec, SymbolClass, Tail};

/// Unknowns of an equation system. Argument indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IoVar {
    Minus,
    Plus,
    Id,
    Star(String),
    StarRule(String, usize),
    Arg(String, usize, usize),
    ArgRule(String, usize, usize, usize),
}

impl IoVar {
    /// The `q` index of argument variables, 0 otherwise.
    pub fn q(&self) -> usize {
        match self {
            IoVar::Arg(_, _, q) | IoVar::ArgRule(_, _, q, _) => *q,
            _ => 0,
        }
    }

    fn family(&self) -> Option<(&str, usize)> {
        match self {
            IoVar::Arg(f, i, _) => Some((f, *i)),
            _ => None,
        }
    }
}

impl fmt::Display for IoVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoVar::Minus => f.write_str("X-"),
            IoVar::Plus => f.write_str("X+"),
            IoVar::Id => f.write_str("Xid"),
            IoVar::Star(g) => write!(f, "X_{{{g},*}}"),
            IoVar::StarRule(g, r) => write!(f, "X_{{{g},*,r{r}}}"),
            IoVar::Arg(g, i, q) => write!(f, "X_{{{g},{i},{q}}}"),
            IoVar::ArgRule(g, i, q, r) => write!(f, "X_{{{g},{i},{q},r{r}}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IoExpr {
    Empty,
    Var(IoVar),
    Minus(Box<IoExpr>),
    Plus(Box<IoExpr>),
    Inf(Box<IoExpr>, Box<IoExpr>),
}

impl IoExpr {
    pub fn var(v: IoVar) -> IoExpr {
        IoExpr::Var(v)
    }

    /// `w E` for a word `w`.
    pub fn word(w: &[Polarity], then: IoExpr) -> IoExpr {
        w.iter().rev().fold(then, |e, p| match p {
            Polarity::Minus => IoExpr::Minus(Box::new(e)),
            Polarity::Plus => IoExpr::Plus(Box::new(e)),
        })
    }

    pub fn inf(a: IoExpr, b: IoExpr) -> IoExpr {
        IoExpr::Inf(Box::new(a), Box::new(b))
    }

    /// Right-nested infimum; the empty infimum is `X+`.
    pub fn inf_all(mut es: Vec<IoExpr>) -> IoExpr {
        let Some(mut acc) = es.pop() else {
            return IoExpr::Var(IoVar::Plus);
        };
        while let Some(e) = es.pop() {
            acc = IoExpr::inf(e, acc);
        }
        acc
    }

    /// Variable occurrences, each with whether a `-` lies on the way to it.
    pub fn occurrences(&self) -> Vec<(&IoVar, bool)> {
        fn go<'a>(e: &'a IoExpr, minus: bool, out: &mut Vec<(&'a IoVar, bool)>) {
            match e {
                IoExpr::Empty => {}
                IoExpr::Var(v) => out.push((v, minus)),
                IoExpr::Minus(e) => go(e, true, out),
                IoExpr::Plus(e) => go(e, minus, out),
                IoExpr::Inf(a, b) => {
                    go(a, minus, out);
                    go(b, minus, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, false, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            IoExpr::Empty | IoExpr::Var(_) => 1,
            IoExpr::Minus(e) | IoExpr::Plus(e) => 1 + e.size(),
            IoExpr::Inf(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for IoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoExpr::Empty => f.write_str("eps"),
            IoExpr::Var(v) => write!(f, "{v}"),
            IoExpr::Minus(e) => write!(f, "-{e}"),
            IoExpr::Plus(e) => write!(f, "+{e}"),
            IoExpr::Inf(a, b) => write!(f, "({a} /\\ {b})"),
        }
    }
}

/// A finite equation system.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IoSpec {
    pub equations: IndexMap<IoVar, IoExpr>,
    pub roots: Vec<IoVar>,
    /// Variables whose equation was replaced by `X+` during finitization.
    pub rpc: Vec<IoVar>,
}

impl IoSpec {
    pub fn new(equations: impl IntoIterator<Item = (IoVar, IoExpr)>, roots: Vec<IoVar>) -> IoSpec {
        IoSpec { equations: equations.into_iter().collect(), roots, rpc: Vec::new() }
    }

    pub fn get(&self, v: &IoVar) -> Option<&IoExpr> {
        self.equations.get(v)
    }

    /// Weak guardedness: no cycle of unguarded variable references.
    pub fn is_weakly_guarded(&self) -> bool {
        let mut state: HashMap<&IoVar, u8> = HashMap::new();
        fn heads(e: &IoExpr, out: &mut Vec<IoVar>) {
            match e {
                IoExpr::Var(v) => out.push(v.clone()),
                IoExpr::Inf(a, b) => {
                    heads(a, out);
                    heads(b, out);
                }
                _ => {}
            }
        }
        fn visit<'a>(s: &'a IoSpec, v: &'a IoVar, state: &mut HashMap<&'a IoVar, u8>) -> bool {
            match state.get(v) {
                Some(1) => return false,
                Some(_) => return true,
                None => {}
            }
            state.insert(v, 1);
            let mut hs = Vec::new();
            if let Some(e) = s.equations.get(v) {
                heads(e, &mut hs);
            }
            for h in &hs {
                let Some((k, _)) = s.equations.get_key_value(h) else { continue };
                if !visit(s, k, state) {
                    return false;
                }
            }
            state.insert(v, 2);
            true
        }
        self.equations.keys().all(|v| visit(self, v, &mut state))
    }
}

impl fmt::Display for IoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, e) in &self.equations {
            writeln!(f, "{v} = {e}")?;
        }
        Ok(())
    }
}

fn base(v: &IoVar) -> Option<IoExpr> {
    use Polarity::*;
    match v {
        IoVar::Minus => Some(IoExpr::Empty),
        IoVar::Plus => Some(IoExpr::word(&[Plus], IoExpr::Var(IoVar::Plus))),
        IoVar::Id => Some(IoExpr::word(&[Minus, Plus], IoExpr::Var(IoVar::Id))),
        _ => None,
    }
}

fn repeat(p: Polarity, n: usize) -> Vec<Polarity> {
    vec![p; n]
}

/// Generates equations of the infinite system on demand.
pub struct Generator<'a> {
    spec: &'a StreamSpec,
    class: &'a Classification,
    inline: bool,
}

impl<'a> Generator<'a> {
    /// Equations for `X_{f,*}` and `X_{f,i,q}` are the infimum of the rule bodies, inlined.
    pub fn new(spec: &'a StreamSpec, class: &'a Classification) -> Self {
        Generator { spec, class, inline: true }
    }

    /// Like [`Generator::new`], but going through per-rule variables.
    pub fn with_rule_vars(spec: &'a StreamSpec, class: &'a Classification) -> Self {
        Generator { spec, class, inline: false }
    }

    fn rules(&self, f: &str) -> Result<Vec<(usize, &'a RuleShape)>> {
        match self.class.class(f) {
            Some(SymbolClass::Unfriendly) => {
                let (_, r) = self
                    .spec
                    .rules_for(f)
                    .find(|(i, _)| !self.class.rules[i].is_flat())
                    .expect("unfriendly symbols have a nesting rule");
                Err(Error::Translate(format!("`{f}` is not friendly nesting: {r}")))
            }
            Some(_) => Ok(self.spec.rules_for(f).map(|(i, _)| (i, &self.class.rules[&i])).collect()),
            None => Err(Error::Translate(format!("`{f}` is not a stream function"))),
        }
    }

    fn star_rule(&self, shape: &RuleShape) -> IoExpr {
        match shape {
            // The published tool bounds nesting rules by the identity here.
            RuleShape::Nesting { .. } => IoExpr::Var(IoVar::Id),
            RuleShape::Flat(r) => match &r.tail {
                Tail::Arg(_) => IoExpr::Var(IoVar::Plus),
                Tail::Call { g, .. } => {
                    IoExpr::word(&repeat(Polarity::Plus, r.produces), IoExpr::Var(IoVar::Star(g.clone())))
                }
            },
        }
    }

    fn arg_rule(&self, shape: &RuleShape, i: usize, q: usize) -> IoExpr {
        let RuleShape::Flat(r) = shape else {
            return IoExpr::Var(IoVar::Id);
        };
        let c = r.consumes[i - 1];
        let (p, q2) = (c.saturating_sub(q), q.saturating_sub(c));
        let mut w = repeat(Polarity::Minus, p);
        w.extend(repeat(Polarity::Plus, r.produces));
        let rest = match &r.tail {
            Tail::Arg(j) if *j == i - 1 => IoExpr::word(&repeat(Polarity::Plus, q2), IoExpr::Var(IoVar::Id)),
            Tail::Arg(_) => IoExpr::Var(IoVar::Plus),
            Tail::Call { g, feed } => IoExpr::inf_all(
                feed.iter()
                    .enumerate()
                    .filter(|(_, (k, _))| *k == i - 1)
                    .map(|(j, (_, d))| IoExpr::Var(IoVar::Arg(g.clone(), j + 1, q2 + d)))
                    .collect(),
            ),
        };
        IoExpr::word(&w, rest)
    }

    /// The right-hand side of `v`.
    pub fn equation(&self, v: &IoVar) -> Result<IoExpr> {
        if let Some(e) = base(v) {
            return Ok(e);
        }
        let f = match v {
            IoVar::Star(f) | IoVar::StarRule(f, _) | IoVar::Arg(f, ..) | IoVar::ArgRule(f, ..) => f,
            _ => unreachable!(),
        };
        let rules = self.rules(f)?;
        if !self.class.is_guarded(f) {
            return Ok(IoExpr::Var(IoVar::Minus));
        }
        let shape = |r: usize| {
            rules.iter().find(|(k, _)| *k == r).map(|(_, s)| *s).ok_or_else(|| {
                Error::Translate(format!("rule {r} does not define `{f}`"))
            })
        };
        Ok(match v {
            IoVar::Star(f) if self.inline => IoExpr::inf_all(rules.iter().map(|(_, s)| self.star_rule(s)).collect()),
            IoVar::Star(f) => {
                IoExpr::inf_all(rules.iter().map(|(r, _)| IoExpr::Var(IoVar::StarRule(f.clone(), *r))).collect())
            }
            IoVar::StarRule(_, r) => self.star_rule(shape(*r)?),
            IoVar::Arg(_, i, q) if self.inline => {
                IoExpr::inf_all(rules.iter().map(|(_, s)| self.arg_rule(s, *i, *q)).collect())
            }
            IoVar::Arg(f, i, q) => IoExpr::inf_all(
                rules.iter().map(|(r, _)| IoExpr::Var(IoVar::ArgRule(f.clone(), *i, *q, *r))).collect(),
            ),
            IoVar::ArgRule(_, i, q, r) => self.arg_rule(shape(*r)?, *i, *q),
            _ => unreachable!(),
        })
    }

    /// Stream arity of a function symbol.
    pub fn arity(&self, f: &str) -> usize {
        self.spec.signature.get(f).map(|d| d.stream_arity()).unwrap_or(0)
    }
}

/// Default bound on the number of variables materialized by [`finitize`].
pub const FINITIZE_CAP: usize = 100_000;

struct Graph {
    /// Out-edges that carry no `-` on the way.
    plus: HashMap<IoVar, Vec<IoVar>>,
    /// Reverse of `plus`.
    plus_rev: HashMap<IoVar, Vec<IoVar>>,
}

impl Graph {
    fn closure(map: &HashMap<IoVar, Vec<IoVar>>, from: &IoVar) -> Vec<IoVar> {
        let mut seen: HashSet<IoVar> = HashSet::from([from.clone()]);
        let mut order = vec![from.clone()];
        let mut i = 0;
        while i < order.len() {
            if let Some(ws) = map.get(&order[i]) {
                for w in ws {
                    if seen.insert(w.clone()) {
                        order.push(w.clone());
                    }
                }
            }
            i += 1;
        }
        order
    }

    fn remove_out(&mut self, v: &IoVar) {
        for w in self.plus.remove(v).unwrap_or_default() {
            if let Some(rs) = self.plus_rev.get_mut(&w) {
                rs.retain(|x| x != v);
            }
        }
    }

    /// Is there a '-'-free path from `a` to a variable of the same family with larger `q`?
    fn pseudo_cycle(&self, a: &IoVar) -> bool {
        let fam = a.family();
        Graph::closure(&self.plus, a).iter().any(|b| b.family() == fam && b.q() > a.q())
    }
}

fn reachable_from(eqs: &HashMap<IoVar, IoExpr>, roots: &[IoVar]) -> HashSet<IoVar> {
    let mut keep: HashSet<IoVar> = roots.iter().cloned().collect();
    let mut stack: Vec<IoVar> = roots.to_vec();
    while let Some(v) = stack.pop() {
        if let Some(e) = eqs.get(&v) {
            for (w, _) in e.occurrences() {
                if keep.insert(w.clone()) {
                    stack.push(w.clone());
                }
            }
        }
    }
    keep
}

/// Builds a finite system for `roots` by exploring the generator breadth-first
/// by `q` and cutting non-consuming pseudo-cycles.
pub fn finitize(gen: &Generator<'_>, roots: &[IoVar], cap: usize) -> Result<IoSpec> {
    let mut eqs: HashMap<IoVar, IoExpr> = HashMap::new();
    let mut order: Vec<IoVar> = Vec::new();
    let mut queue: BTreeSet<(usize, usize, IoVar)> = BTreeSet::new();
    let mut queued: HashSet<IoVar> = HashSet::new();
    let mut seq = 0;
    for r in roots {
        if queued.insert(r.clone()) {
            queue.insert((r.q(), seq, r.clone()));
            seq += 1;
        }
    }
    let mut g = Graph { plus: HashMap::new(), plus_rev: HashMap::new() };
    let mut rpc = Vec::new();
    // Variables the roots still reach; stale after a cut until recomputed.
    let mut reach: HashSet<IoVar> = roots.iter().cloned().collect();
    let mut stale = false;
    while let Some((_, _, u)) = queue.pop_first() {
        if stale {
            reach = reachable_from(&eqs, roots);
            stale = false;
        }
        if !reach.contains(&u) {
            queued.remove(&u);
            continue;
        }
        if eqs.len() >= cap {
            return Err(Error::Cap(format!("finitization cap exceeded ({cap} variables)")));
        }
        let e = gen.equation(&u)?;
        for (w, minus) in e.occurrences() {
            reach.insert(w.clone());
            if !minus {
                g.plus.entry(u.clone()).or_default().push(w.clone());
                g.plus_rev.entry(w.clone()).or_default().push(u.clone());
            }
            if queued.insert(w.clone()) {
                queue.insert((w.q(), seq, w.clone()));
                seq += 1;
            }
        }
        eqs.insert(u.clone(), e);
        order.push(u.clone());
        // Every new '-'-free path passes through `u`.
        let before = Graph::closure(&g.plus_rev, &u);
        let after = Graph::closure(&g.plus, &u);
        if stale {
            reach = reachable_from(&eqs, roots);
            stale = false;
        }
        let mut hits: Vec<IoVar> = before
            .into_iter()
            .filter(|a| reach.contains(a))
            .filter(|a| a.family().is_some() && after.iter().any(|b| b.family() == a.family() && b.q() > a.q()))
            .collect();
        hits.sort_by_key(|a| a.q());
        for a in hits {
            if stale {
                reach = reachable_from(&eqs, roots);
                stale = false;
            }
            if reach.contains(&a) && g.pseudo_cycle(&a) {
                g.remove_out(&a);
                eqs.insert(a.clone(), IoExpr::Var(IoVar::Plus));
                if queued.insert(IoVar::Plus) {
                    queue.insert((0, seq, IoVar::Plus));
                    seq += 1;
                }
                rpc.push(a);
                stale = true;
            }
        }
    }
    let keep = reachable_from(&eqs, roots);
    let equations = order.into_iter().filter(|v| keep.contains(v)).map(|v| {
        let e = eqs[&v].clone();
        (v, e)
    });
    Ok(IoSpec { equations: equations.collect(), roots: roots.to_vec(), rpc })
}

/// Bounded evaluation `min(⟦X⟧(n), cap)` by direct unfolding. Works on any
/// source of equations, including the infinite generator.
pub struct Evaluator<F> {
    lookup: F,
    eqs: HashMap<IoVar, IoExpr>,
    memo: HashMap<(IoVar, u64, u64), u64>,
    active: HashSet<(IoVar, u64, u64)>,
}

impl<F: FnMut(&IoVar) -> Result<IoExpr>> Evaluator<F> {
    pub fn new(lookup: F) -> Self {
        Evaluator { lookup, eqs: HashMap::new(), memo: HashMap::new(), active: HashSet::new() }
    }

    fn rhs(&mut self, v: &IoVar) -> Result<IoExpr> {
        if let Some(e) = self.eqs.get(v) {
            return Ok(e.clone());
        }
        let e = (self.lookup)(v)?;
        self.eqs.insert(v.clone(), e.clone());
        Ok(e)
    }

    fn expr(&mut self, e: &IoExpr, n: u64, cap: u64) -> Result<u64> {
        Ok(match e {
            _ if cap == 0 => 0,
            IoExpr::Empty => 0,
            IoExpr::Var(v) => self.var(v, n, cap)?,
            IoExpr::Plus(e) => 1 + self.expr(e, n, cap - 1)?,
            IoExpr::Minus(e) => {
                if n == 0 {
                    0
                } else {
                    self.expr(e, n - 1, cap)?
                }
            }
            IoExpr::Inf(a, b) => {
                let x = self.expr(a, n, cap)?;
                if x == 0 {
                    0
                } else {
                    x.min(self.expr(b, n, x)?)
                }
            }
        })
    }

    pub fn var(&mut self, v: &IoVar, n: u64, cap: u64) -> Result<u64> {
        let key = (v.clone(), n, cap);
        if let Some(&x) = self.memo.get(&key) {
            return Ok(x);
        }
        if !self.active.insert(key.clone()) {
            return Err(Error::Translate(format!("{v} is not weakly guarded")));
        }
        let e = self.rhs(v)?;
        let x = self.expr(&e, n, cap);
        self.active.remove(&key);
        let x = x?;
        self.memo.insert(key, x);
        Ok(x)
    }

    /// `⟦X⟧(n)` reported as `Top` when it reaches `cap`.
    pub fn value(&mut self, v: &IoVar, n: u64, cap: u64) -> Result<CoNat> {
        let x = self.var(v, n, cap)?;
        Ok(if x >= cap { CoNat::Top } else { CoNat::Fin(x) })
    }
}

/// Evaluator over a finite system.
pub fn evaluator(spec: &IoSpec) -> Evaluator<impl FnMut(&IoVar) -> Result<IoExpr> + '_> {
    Evaluator::new(move |v: &IoVar| {
        spec.get(v).cloned().or_else(|| base(v)).ok_or_else(|| Error::Translate(format!("no equation for {v}")))
    })
}

/// Evaluator over the infinite system of a generator.
pub fn lazy_evaluator<'g>(gen: &'g Generator<'_>) -> Evaluator<impl FnMut(&IoVar) -> Result<IoExpr> + 'g> {
    Evaluator::new(move |v: &IoVar| gen.equation(v))
}

/// Variables reachable from `root` in a finite system, breadth-first.
pub fn reachable(spec: &IoSpec, root: &IoVar) -> Vec<IoVar> {
    let mut seen = vec![root.clone()];
    let mut q = VecDeque::from([root.clone()]);
    while let Some(v) = q.pop_front() {
        if let Some(e) = spec.get(&v) {
            for (w, _) in e.occurrences() {
                if !seen.contains(w) {
                    seen.push(w.clone());
                    q.push_back(w.clone());
                }
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streamspec::{classify, parse};

    fn arg(f: &str, i: usize, q: usize) -> IoVar {
        IoVar::Arg(f.into(), i, q)
    }

    const NESTED: &str = "Signature(
  C : stream(d),
  f : stream(d) -> stream(d),
  b : stream(d) -> stream(d) -> stream(d) -> stream(d),
  0 : d
)
C = 0:f(C)
f(x:s) = x:b(s,s,s)
b(x:y:s,t,u) = x:b(y:t,y:u,y:s)
";

    #[test]
    fn nested_equations() {
        let spec = parse(NESTED).unwrap();
        let class = classify(&spec);
        let gen = Generator::new(&spec, &class);
        assert_eq!(gen.equation(&arg("b", 3, 5)).unwrap().to_string(), "+X_{b,2,6}");
        assert_eq!(gen.equation(&arg("b", 1, 0)).unwrap().to_string(), "--+X_{b,3,1}");
        assert_eq!(gen.equation(&arg("b", 1, 3)).unwrap().to_string(), "+X_{b,3,2}");
        assert_eq!(gen.equation(&arg("f", 1, 0)).unwrap().to_string(), "-+(X_{b,1,0} /\\ (X_{b,2,0} /\\ X_{b,3,0}))");
    }

    #[test]
    fn nested_finitization_terminates() {
        let spec = parse(NESTED).unwrap();
        let class = classify(&spec);
        let gen = Generator::new(&spec, &class);
        let roots = vec![arg("f", 1, 0), arg("b", 1, 0), arg("b", 2, 0), arg("b", 3, 0)];
        let sys = finitize(&gen, &roots, 1000).unwrap();
        assert_eq!(sys.rpc, vec![arg("b", 3, 0), arg("b", 3, 1)]);
        assert!(sys.is_weakly_guarded());
        let mut fin = evaluator(&sys);
        let mut inf = lazy_evaluator(&gen);
        for root in &roots {
            for n in 0..20 {
                assert_eq!(fin.var(root, n, 40).unwrap(), inf.var(root, n, 40).unwrap(), "{root} at {n}");
            }
        }
    }

    #[test]
    fn rule_variables_agree_with_inlined() {
        let spec = parse(NESTED).unwrap();
        let class = classify(&spec);
        let a = Generator::new(&spec, &class);
        let b = Generator::with_rule_vars(&spec, &class);
        let mut ea = lazy_evaluator(&a);
        let mut eb = lazy_evaluator(&b);
        for n in 0..12 {
            assert_eq!(ea.var(&arg("f", 1, 0), n, 30).unwrap(), eb.var(&arg("f", 1, 0), n, 30).unwrap());
        }
    }

    #[test]
    fn unguarded_symbol_is_empty() {
        let spec = parse("Signature(B : stream(b), g : stream(b) -> stream(b), 0, 1 : b)\nB = 0:g(B)\ng(0:s) = 1:0:g(s)\ng(1:s) = g(s)\n").unwrap();
        let class = classify(&spec);
        let gen = Generator::new(&spec, &class);
        assert_eq!(gen.equation(&arg("g", 1, 0)).unwrap(), IoExpr::Var(IoVar::Minus));
        assert_eq!(gen.equation(&IoVar::Star("g".into())).unwrap(), IoExpr::Var(IoVar::Minus));
    }

    #[test]
    fn guardedness_check() {
        let x = IoVar::Star("x".into());
        let y = IoVar::Star("y".into());
        let loopy = IoSpec::new([(x.clone(), IoExpr::Var(y.clone())), (y.clone(), IoExpr::Var(x.clone()))], vec![]);
        assert!(!loopy.is_weakly_guarded());
        let fine = IoSpec::new([(x.clone(), IoExpr::Plus(Box::new(IoExpr::Var(x.clone()))))], vec![]);
        assert!(fine.is_weakly_guarded());
    }
}
