//! Production terms and their collapse to numerals.
//!
//! A production term describes how many elements a recursively defined stream
//! is guaranteed to produce. `collapse` rewrites a closed term to `src(k)`;
//! `denot_production` evaluates the same quantity by Kleene iteration and serves
//! as a cross-check.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conat::{Approx, CoNat, Fin, Top};
use crate::error::{Error, Result};
use crate::ioalg::IoTerm;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProdTerm {
    Src(CoNat),
    Var(String),
    Peb(Box<ProdTerm>),
    Boxed(IoTerm, Box<ProdTerm>),
    Mu(String, Box<ProdTerm>),
    Meet(Box<ProdTerm>, Box<ProdTerm>),
}

use ProdTerm::*;

impl ProdTerm {
    pub fn src(k: impl Into<CoNat>) -> ProdTerm {
        Src(k.into())
    }

    pub fn var(x: &str) -> ProdTerm {
        Var(x.to_string())
    }

    pub fn peb(t: ProdTerm) -> ProdTerm {
        Peb(Box::new(t))
    }

    pub fn boxed(s: IoTerm, t: ProdTerm) -> ProdTerm {
        Boxed(s, Box::new(t))
    }

    pub fn mu(x: &str, t: ProdTerm) -> ProdTerm {
        Mu(x.to_string(), Box::new(t))
    }

    pub fn meet(a: ProdTerm, b: ProdTerm) -> ProdTerm {
        Meet(Box::new(a), Box::new(b))
    }

    /// Right-nested meet; the empty meet is `src(inf)`.
    pub fn meet_all(mut ts: Vec<ProdTerm>) -> ProdTerm {
        let Some(mut acc) = ts.pop() else {
            return Src(Top);
        };
        while let Some(t) = ts.pop() {
            acc = ProdTerm::meet(t, acc);
        }
        acc
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Src(_) => {}
            Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Peb(t) | Boxed(_, t) => t.collect_free(bound, out),
            Mu(x, t) => {
                bound.push(x.clone());
                t.collect_free(bound, out);
                bound.pop();
            }
            Meet(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
        }
    }

    fn is_free(&self, x: &str) -> bool {
        match self {
            Src(_) => false,
            Var(y) => x == y,
            Peb(t) | Boxed(_, t) => t.is_free(x),
            Mu(y, t) => y != x && t.is_free(x),
            Meet(a, b) => a.is_free(x) || b.is_free(x),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Src(_) | Var(_) => 1,
            Peb(t) | Boxed(_, t) | Mu(_, t) => 1 + t.size(),
            Meet(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Termination measure of the collapse system; strictly decreases with every step.
    pub fn weight(&self) -> u128 {
        match self {
            Src(_) | Var(_) => 1,
            Peb(t) => t.weight().saturating_mul(2).saturating_add(1),
            Boxed(_, t) | Mu(_, t) => t.weight().saturating_mul(2),
            Meet(a, b) => a.weight().saturating_add(b.weight()).saturating_add(1),
        }
    }

    fn children(&self) -> Vec<&ProdTerm> {
        match self {
            Src(_) | Var(_) => vec![],
            Peb(t) | Boxed(_, t) | Mu(_, t) => vec![t],
            Meet(a, b) => vec![a, b],
        }
    }

    fn child_mut(&mut self, i: usize) -> &mut ProdTerm {
        match (self, i) {
            (Peb(t) | Boxed(_, t) | Mu(_, t), 0) => t,
            (Meet(a, _), 0) => a,
            (Meet(_, b), 1) => b,
            _ => panic!("no child {i}"),
        }
    }
}

/// The nine collapse rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// `peb(N) -> box<+(-+)>(N)`
    PebToBox,
    /// `box<a>(box<b>(N)) -> box<a . b>(N)`
    BoxBox,
    /// `box<a>(N1 /\ N2) -> box<a>(N1) /\ box<a>(N2)`
    BoxMeet,
    /// `mu x.(N1 /\ N2) -> mu x.N1 /\ mu x.N2`
    MuMeet,
    /// `mu x.N -> N` when `x` is not free in `N`
    MuDrop,
    /// `mu x.box<a>(x) -> src(fix a)`
    MuBox,
    /// `src(k1) /\ src(k2) -> src(min(k1, k2))`
    MeetSrc,
    /// `box<a>(src(k)) -> src(a(k))`
    BoxSrc,
    /// `mu x.x -> src(0)`
    MuVar,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::PebToBox => "C1",
            Rule::BoxBox => "C2",
            Rule::BoxMeet => "C3",
            Rule::MuMeet => "C4",
            Rule::MuDrop => "C5",
            Rule::MuBox => "C6",
            Rule::MeetSrc => "C7",
            Rule::BoxSrc => "C8",
            Rule::MuVar => "C9",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// The first rule (in rule order) applying at the root of `t`, with its result.
fn step_root(t: &ProdTerm) -> Option<(Rule, ProdTerm)> {
    match t {
        Peb(n) => Some((Rule::PebToBox, Boxed(IoTerm::successor(), n.clone()))),
        Boxed(a, n) => match &**n {
            Boxed(b, m) => Some((Rule::BoxBox, Boxed(a.compose(b), m.clone()))),
            Meet(l, r) => Some((
                Rule::BoxMeet,
                ProdTerm::meet(Boxed(a.clone(), l.clone()), Boxed(a.clone(), r.clone())),
            )),
            Src(k) => Some((Rule::BoxSrc, Src(a.interpret(*k)))),
            _ => None,
        },
        Mu(x, n) => match &**n {
            Meet(l, r) => Some((
                Rule::MuMeet,
                ProdTerm::meet(Mu(x.clone(), l.clone()), Mu(x.clone(), r.clone())),
            )),
            Var(y) if y == x => Some((Rule::MuVar, Src(CoNat::ZERO))),
            Boxed(a, m) if matches!(&**m, Var(y) if y == x) => {
                Some((Rule::MuBox, Src(a.least_fixed_point())))
            }
            body if !body.is_free(x) => Some((Rule::MuDrop, body.clone())),
            _ => None,
        },
        Meet(a, b) => match (&**a, &**b) {
            (Src(k1), Src(k2)) => Some((Rule::MeetSrc, Src((*k1).min(*k2)))),
            _ => None,
        },
        Src(_) | Var(_) => None,
    }
}

/// Positions (child-index paths) of all redexes, in pre-order.
pub fn redex_positions(t: &ProdTerm) -> Vec<Vec<usize>> {
    fn go(t: &ProdTerm, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if step_root(t).is_some() {
            out.push(path.clone());
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Rewrites the redex at `path`; panics if there is none.
pub fn rewrite_at(t: &ProdTerm, path: &[usize]) -> (Rule, ProdTerm) {
    let mut out = t.clone();
    let mut node = &mut out;
    for &i in path {
        node = node.child_mut(i);
    }
    let (rule, replacement) = step_root(node).expect("no redex at the given position");
    *node = replacement;
    (rule, out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub term: ProdTerm,
}

fn ensure_closed(t: &ProdTerm) -> Result<()> {
    match t.free_vars().into_iter().next() {
        Some(x) => Err(Error::OpenTerm(x)),
        None => Ok(()),
    }
}

/// Collapses a closed term, choosing among the available redexes with `pick`
/// (which receives the number of candidates, listed in pre-order).
pub fn collapse_with(t: &ProdTerm, mut pick: impl FnMut(usize) -> usize) -> Result<(CoNat, Vec<Step>)> {
    ensure_closed(t)?;
    let mut cur = t.clone();
    let mut trace = Vec::new();
    loop {
        if let Src(k) = cur {
            return Ok((k, trace));
        }
        let redexes = redex_positions(&cur);
        assert!(!redexes.is_empty(), "closed normal form that is not a numeral: {cur}");
        let (rule, next) = rewrite_at(&cur, &redexes[pick(redexes.len())]);
        trace.push(Step { rule, term: next.clone() });
        cur = next;
    }
}

/// Leftmost-outermost derivation to a numeral.
pub fn collapse_trace(t: &ProdTerm) -> Result<Vec<Step>> {
    collapse_with(t, |_| 0).map(|(_, trace)| trace)
}

pub fn collapse(t: &ProdTerm) -> Result<CoNat> {
    collapse_with(t, |_| 0).map(|(k, _)| k)
}

/// Variable assignment for open terms; unlisted variables are 0.
pub type Assignment = HashMap<String, CoNat>;

/// Production by direct evaluation, computing each `mu` by Kleene iteration
/// from 0. Gives up after `iter_cap` rounds per binder with a lower bound.
pub fn denot_production(t: &ProdTerm, env: &Assignment, iter_cap: usize) -> Approx {
    let (v, exact) = denot(t, &mut env.clone(), iter_cap);
    match (v, exact) {
        (Top, _) => Approx::Exact(Top),
        (v, true) => Approx::Exact(v),
        (Fin(b), false) => Approx::AtLeast(b),
    }
}

fn denot(t: &ProdTerm, env: &mut Assignment, cap: usize) -> (CoNat, bool) {
    match t {
        Src(k) => (*k, true),
        Var(x) => (env.get(x).copied().unwrap_or(CoNat::ZERO), true),
        Peb(n) => {
            let (v, e) = denot(n, env, cap);
            (v.succ(), e)
        }
        Boxed(a, n) => {
            let (v, e) = denot(n, env, cap);
            (a.interpret(v), e)
        }
        Meet(l, r) => {
            let (a, ea) = denot(l, env, cap);
            let (b, eb) = denot(r, env, cap);
            let exact = (ea && eb) || (ea && a <= b) || (eb && b <= a);
            (a.min(b), exact)
        }
        Mu(x, n) => {
            let saved = env.get(x).copied();
            let mut v = CoNat::ZERO;
            let mut result = (v, false);
            for _ in 0..cap {
                env.insert(x.clone(), v);
                let (w, e) = denot(n, env, cap);
                if w == v {
                    result = (v, e);
                    break;
                }
                v = w;
                result = (v, false);
                if v == Top {
                    result = (Top, true);
                    break;
                }
            }
            match saved {
                Some(s) => env.insert(x.clone(), s),
                None => env.remove(x),
            };
            result
        }
    }
}

/// An `r`-ary gate: a cap together with one IO-term per stream argument.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub cap: CoNat,
    #[serde(with = "terms_as_strings")]
    pub args: Vec<IoTerm>,
}

mod terms_as_strings {
    use super::IoTerm;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &[IoTerm], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(ts.iter().map(|t| t.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<IoTerm>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl Gate {
    pub fn new(cap: CoNat, args: Vec<IoTerm>) -> Gate {
        Gate { cap, args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// `min(cap, args[i](supplies[i]))`.
    pub fn interpret(&self, supplies: &[CoNat]) -> CoNat {
        self.args
            .iter()
            .zip(supplies)
            .fold(self.cap, |acc, (a, &n)| acc.min(a.interpret(n)))
    }

    /// Plugs production terms into the gate's ports.
    pub fn apply(&self, children: Vec<ProdTerm>) -> Result<ProdTerm> {
        if children.len() != self.arity() {
            return Err(Error::Arity { expected: self.arity(), got: children.len() });
        }
        let mut parts = Vec::new();
        if self.cap != Top || children.is_empty() {
            parts.push(Src(self.cap));
        }
        parts.extend(self.args.iter().cloned().zip(children).map(|(a, c)| ProdTerm::boxed(a, c)));
        Ok(ProdTerm::meet_all(parts))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]({})", self.cap, args.join(", "))
    }
}

impl fmt::Display for ProdTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Src(k) => write!(f, "src({k})"),
            Var(x) => f.write_str(x),
            Peb(t) => write!(f, "peb({t})"),
            Boxed(a, t) => write!(f, "box<{a}>({t})"),
            Mu(x, t) => write!(f, "mu {x}. {t}"),
            Meet(a, b) => write!(f, "meet({a}, {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ioalg::io;

    fn pascal() -> ProdTerm {
        ProdTerm::mu("P", ProdTerm::peb(ProdTerm::peb(ProdTerm::boxed(io("-(-+)"), ProdTerm::var("P")))))
    }

    #[test]
    fn pascal_collapses_to_top() {
        assert_eq!(collapse(&pascal()).unwrap(), Top);
        assert_eq!(pascal().to_string(), "mu P. peb(peb(box<-(-+)>(P)))");
    }

    #[test]
    fn small_cases() {
        assert_eq!(collapse(&ProdTerm::mu("x", ProdTerm::var("x"))).unwrap(), Fin(0));
        assert!(collapse_trace(&ProdTerm::src(5)).unwrap().is_empty());
        let t = ProdTerm::meet(ProdTerm::src(2), Src(Top));
        let trace = collapse_trace(&t).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].rule, Rule::MeetSrc);
        assert_eq!(trace[0].term, ProdTerm::src(2));
        assert_eq!(collapse(&ProdTerm::boxed(io("(+-)"), ProdTerm::src(0))).unwrap(), Fin(1));
        assert!(matches!(collapse(&ProdTerm::var("y")), Err(Error::OpenTerm(_))));
    }

    #[test]
    fn weights() {
        assert_eq!(ProdTerm::src(3).weight(), 1);
        assert_eq!(ProdTerm::peb(ProdTerm::src(0)).weight(), 3);
        assert_eq!(ProdTerm::mu("x", ProdTerm::boxed(io("(-+)"), ProdTerm::var("x"))).weight(), 4);
    }

    #[test]
    fn gates() {
        let g = Gate::new(Top, vec![io("-(-+)")]);
        assert_eq!(
            g.apply(vec![ProdTerm::var("P")]).unwrap(),
            ProdTerm::boxed(io("-(-+)"), ProdTerm::var("P"))
        );
        assert_eq!(Gate::new(Fin(0), vec![]).apply(vec![]).unwrap(), ProdTerm::src(0));
        let g = Gate::new(Top, vec![io("(-+)"), io("(-+)")]);
        assert_eq!(
            g.apply(vec![ProdTerm::var("A"), ProdTerm::var("B")]).unwrap(),
            ProdTerm::meet(
                ProdTerm::boxed(io("(-+)"), ProdTerm::var("A")),
                ProdTerm::boxed(io("(-+)"), ProdTerm::var("B"))
            )
        );
        assert_eq!(g.to_string(), "[inf]((-+), (-+))");
        assert!(g.apply(vec![]).is_err());
    }

    #[test]
    fn kleene_oracle() {
        let env = Assignment::new();
        match denot_production(&pascal(), &env, 100) {
            Approx::AtLeast(n) => assert!(n >= 100),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            denot_production(&ProdTerm::boxed(io("(+-)"), ProdTerm::src(0)), &env, 10),
            Approx::Exact(Fin(1))
        );
    }
}
