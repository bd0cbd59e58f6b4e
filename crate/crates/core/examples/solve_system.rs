//! Solving a small equation system with the trace-diagram search.
use prodcheck::iospec::{IoExpr, IoSpec, IoVar};
use prodcheck::solver::{solve_traced, MAX_COLUMNS};
use prodcheck::Polarity::{Minus, Plus};

fn main() {
    let x = IoVar::Star("x".into());
    let y = IoVar::Star("y".into());
    // x = -(y /\ +x), y = -++y
    let sys = IoSpec::new(
        [
            (x.clone(), IoExpr::word(&[Minus], IoExpr::inf(IoExpr::var(y.clone()), IoExpr::word(&[Plus], IoExpr::var(x.clone()))))),
            (y.clone(), IoExpr::word(&[Minus, Plus, Plus], IoExpr::var(y.clone()))),
        ],
        vec![x.clone()],
    );
    print!("{sys}");
    let sol = solve_traced(&sys, &x, MAX_COLUMNS).unwrap();
    println!("{x} = {}", sol.term);
    println!("lower bounds: {:?}", &sol.bounds[..sol.bounds.len().min(8)]);
}
