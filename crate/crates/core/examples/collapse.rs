//! Collapsing a production term step by step.
use prodcheck::prodcalc::collapse_trace;
use prodcheck::{io, ProdTerm};

fn main() {
    // The term for P = 0:s(0):f(P) with f's gate box -(-+).
    let p = ProdTerm::mu("P", ProdTerm::peb(ProdTerm::peb(ProdTerm::boxed(io("-(-+)"), ProdTerm::var("P")))));
    println!("   {p}");
    for step in collapse_trace(&p).unwrap() {
        println!("{} {}", step.rule.id(), step.term);
    }

    let stuck = ProdTerm::mu("x", ProdTerm::meet(ProdTerm::peb(ProdTerm::var("x")), ProdTerm::boxed(io("--+"), ProdTerm::var("x"))));
    let last = collapse_trace(&stuck).unwrap().pop().unwrap();
    println!("{stuck} collapses to {}", last.term);
}
