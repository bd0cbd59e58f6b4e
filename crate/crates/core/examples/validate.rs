//! Well-formedness diagnostics.
use prodcheck::streamspec::{parse, validate};

fn main() {
    let spec = parse(
        "Signature(C : stream(b), f : stream(b) -> stream(b), 0, 1 : b)
C = 0:f(C)
f(0:s) = 1:f(s)
f(0:x:s) = x:s
",
    )
    .unwrap();
    for d in validate(&spec) {
        println!("{d}");
    }
    match parse("Signature(C : stream(b), 0 : b)\nC = 0:D\n") {
        Ok(_) => unreachable!(),
        Err(e) => e.diagnostics().iter().for_each(|d| println!("{d}")),
    }
}
