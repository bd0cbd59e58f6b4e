//! Solving weakly guarded IO-term equation systems.
//!
//! The root equation is unfolded into a finite graph whose paths spell the
//! IO-sequences the system allows. Column `x` of the diagram records, for
//! every node, the fewest outputs any path can have produced on reaching it
//! after exactly `x` inputs. The lower bound of a column is the solution's
//! value at `x`. Columns are computed left to right until two of them are
//! shown to repeat up to a height shift, which yields the rational solution.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt;

use crate::conat::CoNat;
use crate::error::{Error, Result};
use crate::ioalg::{IoTerm, Polarity};
use crate::iospec::{IoExpr, IoSpec, IoVar};

/// Default bound on the number of diagram columns explored by [`solve`].
pub const MAX_COLUMNS: usize = 10_000;

/// Nodes are positions inside right-hand sides; edges carry `-`, `+` or nothing.
#[derive(Clone, Debug, Default)]
pub struct TraceGraph {
    /// `var@k` names the `k`-th subexpression (pre-order) of `var`'s equation.
    pub labels: Vec<String>,
    pub eps: Vec<Vec<usize>>,
    pub plus: Vec<Vec<usize>>,
    pub minus: Vec<Vec<usize>>,
    pub root: usize,
}

#[derive(Clone, Copy)]
enum Edge {
    Eps,
    Plus,
    Minus,
}

enum Slot {
    Node(usize),
    Var(IoVar),
}

fn base_rhs(v: &IoVar) -> Option<IoExpr> {
    let p = |e: IoExpr| IoExpr::Plus(Box::new(e));
    match v {
        IoVar::Minus => Some(IoExpr::Empty),
        IoVar::Plus => Some(p(IoExpr::Var(IoVar::Plus))),
        IoVar::Id => Some(IoExpr::Minus(Box::new(p(IoExpr::Var(IoVar::Id))))),
        _ => None,
    }
}

impl TraceGraph {
    pub fn build(spec: &IoSpec, root: &IoVar) -> Result<TraceGraph> {
        let mut g = TraceGraph::default();
        let mut entry: HashMap<IoVar, usize> = HashMap::new();
        let mut pending: Vec<(usize, Edge, IoVar)> = Vec::new();
        let mut todo = vec![root.clone()];
        while let Some(v) = todo.pop() {
            if entry.contains_key(&v) {
                continue;
            }
            let e = spec
                .get(&v)
                .cloned()
                .or_else(|| base_rhs(&v))
                .ok_or_else(|| Error::Translate(format!("no equation for {v}")))?;
            let mut k = 0;
            let id = match g.alloc(&v, &e, &mut k, &mut pending) {
                Slot::Node(id) => id,
                Slot::Var(w) => {
                    let id = g.node(format!("{v}@0"));
                    pending.push((id, Edge::Eps, w));
                    id
                }
            };
            entry.insert(v, id);
            for (_, _, w) in &pending {
                if !entry.contains_key(w) {
                    todo.push(w.clone());
                }
            }
        }
        for (from, kind, w) in pending {
            g.link(from, kind, entry[&w]);
        }
        g.root = entry[root];
        g.check_eps_acyclic()?;
        Ok(g)
    }

    fn node(&mut self, label: String) -> usize {
        self.labels.push(label);
        self.eps.push(Vec::new());
        self.plus.push(Vec::new());
        self.minus.push(Vec::new());
        self.labels.len() - 1
    }

    fn link(&mut self, from: usize, kind: Edge, to: usize) {
        match kind {
            Edge::Eps => self.eps[from].push(to),
            Edge::Plus => self.plus[from].push(to),
            Edge::Minus => self.minus[from].push(to),
        }
    }

    /// Variable occurrences are not nodes of their own: edges into them go
    /// straight to the root of the variable's equation.
    fn alloc(&mut self, v: &IoVar, e: &IoExpr, k: &mut usize, pending: &mut Vec<(usize, Edge, IoVar)>) -> Slot {
        if let IoExpr::Var(w) = e {
            return Slot::Var(w.clone());
        }
        let id = self.node(format!("{v}@{k}"));
        *k += 1;
        let mut edge = |g: &mut TraceGraph, kind: Edge, child: &IoExpr| match g.alloc(v, child, k, pending) {
            Slot::Node(c) => g.link(id, kind, c),
            Slot::Var(w) => pending.push((id, kind, w)),
        };
        match e {
            // The empty sequence behaves like an endless run of requirements.
            IoExpr::Empty => self.minus[id].push(id),
            IoExpr::Var(_) => unreachable!(),
            IoExpr::Minus(c) => edge(self, Edge::Minus, c),
            IoExpr::Plus(c) => edge(self, Edge::Plus, c),
            IoExpr::Inf(a, b) => {
                edge(self, Edge::Eps, a);
                edge(self, Edge::Eps, b);
            }
        }
        Slot::Node(id)
    }

    fn check_eps_acyclic(&self) -> Result<()> {
        let n = self.labels.len();
        let mut state = vec![0u8; n];
        for s in 0..n {
            if state[s] != 0 {
                continue;
            }
            let mut stack = vec![(s, 0usize)];
            state[s] = 1;
            while let Some(&mut (v, ref mut i)) = stack.last_mut() {
                if *i < self.eps[v].len() {
                    let w = self.eps[v][*i];
                    *i += 1;
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => {
                            return Err(Error::Translate(format!(
                                "system is not weakly guarded: unguarded cycle through {}",
                                self.labels[w]
                            )))
                        }
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Closes a set of entries under unlabeled and `+` edges, keeping the least height per node.
    fn close(&self, seed: BTreeMap<usize, u64>) -> Column {
        let mut best: BTreeMap<usize, u64> = BTreeMap::new();
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> = seed.into_iter().map(|(v, y)| Reverse((y, v))).collect();
        while let Some(Reverse((y, v))) = heap.pop() {
            if best.get(&v).is_some_and(|&b| b <= y) {
                continue;
            }
            best.insert(v, y);
            for &w in &self.eps[v] {
                heap.push(Reverse((y, w)));
            }
            for &w in &self.plus[v] {
                heap.push(Reverse((y + 1, w)));
            }
        }
        Column(best)
    }

    pub fn first_column(&self) -> Column {
        self.close(BTreeMap::from([(self.root, 0)]))
    }

    /// Consumes one input: follow `-` edges, then close.
    pub fn step(&self, c: &Column) -> Column {
        let mut seed: BTreeMap<usize, u64> = BTreeMap::new();
        for (&v, &y) in &c.0 {
            for &w in &self.minus[v] {
                let e = seed.entry(w).or_insert(y);
                *e = (*e).min(y);
            }
        }
        self.close(seed)
    }

    /// Least height among entries that can consume the next input.
    pub fn lower_bound(&self, c: &Column) -> CoNat {
        c.0.iter().filter(|(v, _)| !self.minus[**v].is_empty()).map(|(_, &y)| CoNat::Fin(y)).min().unwrap_or(CoNat::Top)
    }

    /// The lower bound at every `x < n`.
    pub fn lower_bounds(&self, n: usize) -> Vec<CoNat> {
        let mut out = Vec::with_capacity(n);
        let mut c = self.first_column();
        for _ in 0..n {
            out.push(self.lower_bound(&c));
            c = self.step(&c);
        }
        out
    }

    /// Reference variant that keeps every height up to `cap` instead of only the least.
    pub fn lower_bounds_unpruned(&self, n: usize, cap: u64) -> Vec<CoNat> {
        use std::collections::BTreeSet;
        let close = |seed: BTreeSet<(usize, u64)>| {
            let mut all = seed.clone();
            let mut stack: Vec<(usize, u64)> = seed.into_iter().collect();
            while let Some((v, y)) = stack.pop() {
                let next = self.eps[v].iter().map(|&w| (w, y)).chain(self.plus[v].iter().map(|&w| (w, y + 1)));
                for (w, z) in next {
                    if z <= cap && all.insert((w, z)) {
                        stack.push((w, z));
                    }
                }
            }
            all
        };
        let mut col = close(BTreeSet::from([(self.root, 0)]));
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let b = col.iter().filter(|(v, _)| !self.minus[*v].is_empty()).map(|&(_, y)| y).min();
            out.push(b.map_or(CoNat::Top, CoNat::Fin));
            col = close(col.iter().flat_map(|&(v, y)| self.minus[v].iter().map(move |&w| (w, y))).collect());
        }
        out
    }
}

/// Least heights per node after a fixed number of inputs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Column(pub BTreeMap<usize, u64>);

impl Column {
    pub fn height(&self) -> Option<u64> {
        self.0.values().copied().min()
    }

    fn support(&self) -> Vec<usize> {
        self.0.keys().copied().collect()
    }
}

/// Two columns `x1 < x2` such that every column from `x1` on repeats `x2 - x1`
/// columns later, raised by `shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Repetition {
    pub x1: usize,
    pub x2: usize,
    pub shift: u64,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub term: IoTerm,
    /// Lower bounds of the columns that were computed.
    pub bounds: Vec<CoNat>,
    /// `None` when the bounds end in ⊤.
    pub repetition: Option<Repetition>,
    pub columns: Vec<Column>,
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, (c, b)) in self.columns.iter().zip(&self.bounds).enumerate() {
            let cells: Vec<String> = c.0.iter().map(|(v, y)| format!("{v}:{y}")).collect();
            writeln!(f, "x={x} bound={b} [{}]", cells.join(" "))?;
        }
        match self.repetition {
            Some(r) => writeln!(f, "repetition x1={} x2={} shift={}", r.x1, r.x2, r.shift)?,
            None => writeln!(f, "no further inputs are consumed")?,
        }
        writeln!(f, "solution {}", self.term)
    }
}

/// The word for the step from `x` to `x + 1` inputs.
fn step_word(bounds: &[CoNat], x: usize, out: &mut Vec<Polarity>) {
    out.push(Polarity::Minus);
    let (a, b) = (bounds[x].finite().expect("finite"), bounds[x + 1].finite().expect("finite"));
    out.extend(std::iter::repeat_n(Polarity::Plus, (b - a) as usize));
}

fn leading(bounds: &[CoNat]) -> Vec<Polarity> {
    vec![Polarity::Plus; bounds[0].finite().expect("finite") as usize]
}

fn certify(g: &TraceGraph, cols: &[Column], bounds: &[CoNat], x1: usize, x2: usize) -> Option<u64> {
    let (a, b) = (&cols[x1].0, &cols[x2].0);
    let d = cols[x2].height()? - cols[x1].height()?;
    if a.iter().zip(b).any(|((_, &ya), (_, &yb))| yb < ya + d) {
        return None;
    }
    // Entries that realize the shift exactly must reproduce the window on their own.
    let tight: BTreeMap<usize, u64> =
        a.iter().zip(b).filter(|((_, &ya), (_, &yb))| yb == ya + d).map(|((&v, &ya), _)| (v, ya)).collect();
    let mut c = Column(tight.clone());
    for &want in &bounds[x1..x2] {
        if g.lower_bound(&c) != want {
            return None;
        }
        c = g.step(&c);
    }
    tight.iter().all(|(v, &ya)| c.0.get(v).is_some_and(|&y| y <= ya + d)).then_some(d)
}

/// Solves the system for `root`, giving the shortest IO-term of its solution.
pub fn solve(spec: &IoSpec, root: &IoVar, max_columns: usize) -> Result<IoTerm> {
    Ok(solve_traced(spec, root, max_columns)?.term)
}

pub fn solve_traced(spec: &IoSpec, root: &IoVar, max_columns: usize) -> Result<Solution> {
    let g = TraceGraph::build(spec, root)?;
    solve_graph(&g, max_columns)
}

pub fn solve_graph(g: &TraceGraph, max_columns: usize) -> Result<Solution> {
    let mut cols = vec![g.first_column()];
    let mut bounds = vec![g.lower_bound(&cols[0])];
    let mut by_support: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    loop {
        let x2 = cols.len() - 1;
        if bounds[x2].is_top() {
            let mut prefix = Vec::new();
            if x2 > 0 {
                prefix = leading(&bounds);
                for x in 0..x2 - 1 {
                    step_word(&bounds, x, &mut prefix);
                }
                prefix.push(Polarity::Minus);
            }
            let term = IoTerm::rational(prefix, vec![Polarity::Plus]);
            return Ok(Solution { term, bounds, repetition: None, columns: cols });
        }
        let seen = by_support.entry(cols[x2].support()).or_default();
        for &x1 in seen.iter().rev() {
            if let Some(shift) = certify(g, &cols, &bounds, x1, x2) {
                let mut prefix = leading(&bounds);
                for x in 0..x1 {
                    step_word(&bounds, x, &mut prefix);
                }
                let mut cycle = Vec::new();
                for x in x1..x2 {
                    step_word(&bounds, x, &mut cycle);
                }
                let term = IoTerm::rational(prefix, cycle);
                let repetition = Some(Repetition { x1, x2, shift });
                return Ok(Solution { term, bounds, repetition, columns: cols });
            }
        }
        seen.push(x2);
        if cols.len() >= max_columns {
            return Err(Error::Cap(format!("repetition search cap exceeded ({max_columns} columns)")));
        }
        let next = g.step(&cols[x2]);
        bounds.push(g.lower_bound(&next));
        cols.push(next);
    }
}
