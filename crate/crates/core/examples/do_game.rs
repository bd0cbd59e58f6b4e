//! The data-oblivious game: an opponent picks the data, the rewriter the steps.
use prodcheck::dogame::{do_low_constant, do_low_function};
use prodcheck::streamspec::{classify, parse};

fn main() {
    let spec = parse(
        "Signature(M : stream(b), f : stream(b) -> stream(b), h : stream(b) -> stream(b), 0, 1 : b)
M = f(0:1:M)
f(0:x:s) = 0:1:f(s)
f(1:x:s) = x:f(s)
h(0:x:s) = x:x:h(0:s)
h(1:x:s) = x:h(0:s)
",
    )
    .unwrap();
    let class = classify(&spec);
    for n in 0..6 {
        let h = do_low_function(&spec, &class, "h", &[n], 32, 10_000).unwrap();
        let f = do_low_function(&spec, &class, "f", &[n], 32, 10_000).unwrap();
        println!("supply {n}: h gives {h}, f gives {f}");
    }
    // M really is productive, but not whatever the data.
    println!("M: {}", do_low_constant(&spec, &class, "M", 32, 10_000).unwrap());
}
