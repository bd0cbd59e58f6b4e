//! Data-oblivious lower bounds by playing the rewrite game directly.
//!
//! An adversary may swap data elements before every step, so each rule whose
//! stream patterns have enough elements available can be forced to apply.
//! The adversary minimizes the number of produced elements. This module computes
//! that minimum on abstracted states (a symbol plus the number of elements
//! available on each argument) and is used to cross-check the gate translation.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::conat::{Approx, CoNat};
use crate::error::{Error, Result};
use crate::streamspec::{Classification, RuleShape, StreamSpec, SymbolKind, Tail, Term};

type State = (String, Vec<u64>);

/// Successors of a state: `Ok(total)` for a finished play, `Err((cost, next))` to continue.
fn moves(spec: &StreamSpec, class: &Classification, s: &State) -> Result<Vec<std::result::Result<u64, (u64, State)>>> {
    let (f, n) = s;
    let mut out = Vec::new();
    for (i, _) in spec.rules_for(f) {
        let RuleShape::Flat(r) = &class.rules[&i] else {
            return Err(Error::Translate(format!("`{f}` is not flat; the game is only played on flat rules")));
        };
        if n.iter().zip(&r.consumes).any(|(&have, &need)| have < need as u64) {
            out.push(Ok(0));
            continue;
        }
        let m = r.produces as u64;
        let left = |k: usize| n[k] - r.consumes[k] as u64;
        match &r.tail {
            Tail::Arg(j) => out.push(Ok(m + left(*j))),
            Tail::Call { g, feed } => {
                let next = feed.iter().map(|&(k, d)| d as u64 + left(k)).collect();
                out.push(Err((m, (g.clone(), next))));
            }
        }
    }
    Ok(out)
}

/// Least production of `f` applied to streams with `supplies` available
/// elements followed by a blocked tail. Gives up with a lower bound after
/// reaching `prod_cap` or settling `state_cap` states.
pub fn do_low_function(
    spec: &StreamSpec,
    class: &Classification,
    f: &str,
    supplies: &[u64],
    prod_cap: u64,
    state_cap: usize,
) -> Result<Approx> {
    if spec.signature.kind(f) != Some(SymbolKind::StreamFunction) {
        return Err(Error::Translate(format!("`{f}` is not a stream function")));
    }
    let start: State = (f.to_string(), supplies.to_vec());
    // Dijkstra over states; finished plays enter the queue as terminals.
    let mut heap: BinaryHeap<Reverse<(u64, Option<State>)>> = BinaryHeap::new();
    heap.push(Reverse((0, Some(start))));
    let mut settled: HashMap<State, u64> = HashMap::new();
    // Zero-cost edges between settled states, used to spot non-producing loops.
    let mut free: HashMap<State, Vec<State>> = HashMap::new();
    while let Some(Reverse((c, s))) = heap.pop() {
        if c >= prod_cap {
            return Ok(Approx::AtLeast(prod_cap));
        }
        let Some(s) = s else {
            return Ok(Approx::Exact(CoNat::Fin(c)));
        };
        if settled.contains_key(&s) {
            continue;
        }
        if settled.len() >= state_cap {
            return Ok(Approx::AtLeast(c));
        }
        settled.insert(s.clone(), c);
        for mv in moves(spec, class, &s)? {
            match mv {
                Ok(total) => heap.push(Reverse((c + total, None))),
                Err((0, t)) => {
                    if settled.get(&t) == Some(&c) && reaches(&free, &t, &s) {
                        // The adversary can loop forever without producing anything.
                        return Ok(Approx::Exact(CoNat::Fin(c)));
                    }
                    free.entry(s.clone()).or_default().push(t.clone());
                    heap.push(Reverse((c, Some(t))));
                }
                Err((m, t)) => heap.push(Reverse((c + m, Some(t)))),
            }
        }
    }
    Ok(Approx::AtLeast(prod_cap))
}

fn reaches(free: &HashMap<State, Vec<State>>, from: &State, to: &State) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if seen.insert(v) {
            stack.extend(free.get(v).into_iter().flatten());
        }
    }
    false
}

/// Production lower bound of a term given current bounds for the constants.
fn eval(
    spec: &StreamSpec,
    class: &Classification,
    t: &Term,
    approx: &HashMap<String, Approx>,
    prod_cap: u64,
    state_cap: usize,
) -> Result<Approx> {
    Ok(match t {
        Term::Var(x, _) => return Err(Error::Translate(format!("stream variable `{x}` in a constant definition"))),
        Term::Cons(_, tail, _) => match eval(spec, class, tail, approx, prod_cap, state_cap)? {
            Approx::Exact(v) => Approx::Exact(v.succ()),
            Approx::AtLeast(b) => Approx::AtLeast(b + 1),
        },
        Term::App(c, _, _) if spec.signature.kind(c) == Some(SymbolKind::StreamConstant) => {
            approx.get(c).copied().unwrap_or(Approx::AtLeast(0))
        }
        Term::App(f, args, _) => {
            let decl = spec.signature.get(f).expect("resolved");
            let mut exact = true;
            let mut supplies = Vec::new();
            for i in decl.stream_positions() {
                let a = eval(spec, class, &args[i], approx, prod_cap, state_cap)?;
                let v = match a {
                    Approx::Exact(CoNat::Fin(v)) => v,
                    Approx::Exact(CoNat::Top) => {
                        exact = false;
                        prod_cap
                    }
                    Approx::AtLeast(b) => {
                        exact = false;
                        b
                    }
                };
                supplies.push(v.min(prod_cap));
            }
            match do_low_function(spec, class, f, &supplies, prod_cap, state_cap)? {
                Approx::Exact(v) if exact => Approx::Exact(v),
                other => Approx::AtLeast(other.lower().finite().unwrap_or(prod_cap)),
            }
        }
    })
}

/// Least production of a stream constant, by iterating the constants'
/// equations from 0 until they stabilize.
pub fn do_low_constant(
    spec: &StreamSpec,
    class: &Classification,
    c: &str,
    prod_cap: u64,
    step_cap: usize,
) -> Result<Approx> {
    if spec.signature.kind(c) != Some(SymbolKind::StreamConstant) {
        return Err(Error::Translate(format!("`{c}` is not a stream constant")));
    }
    let consts: Vec<String> = spec.constants().map(|d| d.name.clone()).collect();
    let mut approx: HashMap<String, Approx> = consts.iter().map(|k| (k.clone(), Approx::Exact(CoNat::ZERO))).collect();
    let state_cap = step_cap.max(1);
    for _ in 0..step_cap {
        let mut next = HashMap::new();
        for k in &consts {
            let mut best: Option<Approx> = None;
            for (_, r) in spec.rules_for(k) {
                let v = eval(spec, class, &r.rhs, &approx, prod_cap, state_cap)?;
                best = Some(match best {
                    None => v,
                    Some(b) if v.lower() < b.lower() => v,
                    Some(b) => b,
                });
            }
            next.insert(k.clone(), best.unwrap_or(Approx::AtLeast(0)));
        }
        let lower = |m: &HashMap<String, Approx>| m[c].lower();
        if lower(&next) >= CoNat::Fin(prod_cap) {
            return Ok(Approx::AtLeast(prod_cap));
        }
        if next == approx {
            return Ok(next[c]);
        }
        approx = next;
    }
    Ok(Approx::AtLeast(approx[c].lower().finite().unwrap_or(prod_cap)))
}
