#![allow(dead_code)]

use std::path::PathBuf;

use prodcheck::iospec::{IoExpr, IoSpec, IoVar};
use prodcheck::{CoNat, IoTerm, Polarity, ProdTerm};
use rand::Rng;

pub fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

pub fn spec_source(name: &str) -> String {
    std::fs::read_to_string(spec_path(name)).unwrap()
}

pub const CORPUS: &[&str] = &[
    "pascal.spec",
    "morse_flat.spec",
    "morse_pure.spec",
    "morse_d0l.spec",
    "convolution.spec",
    "traces.spec",
    "nested.spec",
    "do_m.spec",
    "do_h.spec",
    "do_b.spec",
];

pub fn word<R: Rng>(rng: &mut R, min: usize, max: usize) -> Vec<Polarity> {
    let n = rng.gen_range(min..=max);
    (0..n).map(|_| if rng.gen_bool(0.5) { Polarity::Plus } else { Polarity::Minus }).collect()
}

/// A canonical IO-term with prefix and loop of length at most `max`.
pub fn io_term<R: Rng>(rng: &mut R, max: usize) -> IoTerm {
    let prefix = word(rng, 0, max);
    if rng.gen_ratio(1, 5) {
        IoTerm::finite(prefix)
    } else {
        IoTerm::rational(prefix, word(rng, 1, max))
    }
}

/// The same pair of words, left exactly as drawn.
pub fn raw_io_term<R: Rng>(rng: &mut R, max: usize) -> IoTerm {
    IoTerm::Rational { prefix: word(rng, 0, max), cycle: word(rng, 1, max) }
}

fn expr<R: Rng>(rng: &mut R, vars: &[IoVar], budget: usize) -> IoExpr {
    let leaf = budget <= 1 || rng.gen_ratio(1, 4);
    if leaf {
        return match rng.gen_range(0..8) {
            0 => IoExpr::Empty,
            1 => IoExpr::Var(IoVar::Plus),
            2 => IoExpr::Var(IoVar::Minus),
            3 => IoExpr::Var(IoVar::Id),
            _ => IoExpr::Var(vars[rng.gen_range(0..vars.len())].clone()),
        };
    }
    match rng.gen_range(0..if budget >= 3 { 5 } else { 4 }) {
        0 | 1 => IoExpr::Minus(Box::new(expr(rng, vars, budget - 1))),
        2 | 3 => IoExpr::Plus(Box::new(expr(rng, vars, budget - 1))),
        _ => {
            let left = rng.gen_range(1..budget - 1);
            IoExpr::inf(expr(rng, vars, left), expr(rng, vars, budget - 1 - left))
        }
    }
}

/// A random weakly guarded system of at most `max_eqs` equations, rhs size at most `max_size`.
pub fn guarded_system<R: Rng>(rng: &mut R, max_eqs: usize, max_size: usize) -> IoSpec {
    loop {
        let k = rng.gen_range(1..=max_eqs);
        let vars: Vec<IoVar> = (0..k).map(|i| IoVar::Star(format!("v{i}"))).collect();
        let eqs: Vec<(IoVar, IoExpr)> = vars
            .iter()
            .map(|v| {
                let e = loop {
                    let size = rng.gen_range(1..=max_size);
                    let e = expr(rng, &vars, size);
                    if e.size() <= max_size {
                        break e;
                    }
                };
                (v.clone(), e)
            })
            .collect();
        let spec = IoSpec::new(eqs, vec![vars[0].clone()]);
        if spec.is_weakly_guarded() {
            return spec;
        }
    }
}

/// A closed production term with at most `max` nodes.
pub fn prod_term<R: Rng>(rng: &mut R, max: usize) -> ProdTerm {
    fn go<R: Rng>(rng: &mut R, budget: usize, bound: &mut Vec<String>) -> ProdTerm {
        if budget <= 1 || rng.gen_ratio(1, 5) {
            if !bound.is_empty() && rng.gen_bool(0.6) {
                return ProdTerm::var(&bound[rng.gen_range(0..bound.len())]);
            }
            return if rng.gen_ratio(1, 4) { ProdTerm::src(CoNat::Top) } else { ProdTerm::src(rng.gen_range(0..4u64)) };
        }
        match rng.gen_range(0..4) {
            0 => ProdTerm::peb(go(rng, budget - 1, bound)),
            1 => ProdTerm::boxed(io_term(rng, 3), go(rng, budget - 1, bound)),
            2 => {
                let x = format!("x{}", bound.len());
                bound.push(x.clone());
                let body = go(rng, budget - 1, bound);
                bound.pop();
                ProdTerm::mu(&x, body)
            }
            _ => {
                let left = rng.gen_range(1..(budget - 1).max(2));
                let a = go(rng, left, bound);
                let b = go(rng, (budget - 1 - left).max(1), bound);
                ProdTerm::meet(a, b)
            }
        }
    }
    loop {
        let t = go(rng, max, &mut Vec::new());
        if t.size() <= max {
            return t;
        }
    }
}
