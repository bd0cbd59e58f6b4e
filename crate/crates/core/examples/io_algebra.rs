//! Rational IO-terms as functions from available input to guaranteed output.
use prodcheck::{io, Fin, IoTerm};

fn main() {
    let tail = io("-(-+)");
    let double = io("(-++)");
    println!("tail   = {tail}");
    println!("double = {double}");

    let both = double.compose(&tail);
    println!("double . tail = {both}");
    for n in 0..6 {
        println!("  n = {n}: {}", both.interpret(Fin(n)));
    }

    let zip_left = io("(-++)");
    let zip_right = io("(+-+)");
    println!("inf({zip_left}, {zip_right}) = {}", zip_left.infimum(&zip_right));

    // Least fixed point: how much a loop through the function can bootstrap.
    for s in ["(+-)", "+(-+)", "++-(--+)", "--+"] {
        println!("lfp {s} = {}", io(s).least_fixed_point());
    }
    println!("successor = {}", IoTerm::successor());
}
