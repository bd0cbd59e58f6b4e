//! Cutting an infinite family of argument equations down to a finite system.
use prodcheck::iospec::{finitize, Generator, IoVar, FINITIZE_CAP};
use prodcheck::solver::{solve, MAX_COLUMNS};
use prodcheck::streamspec::{classify, parse};

fn main() {
    let spec = parse(
        "Signature(C : stream(d), f : stream(d) -> stream(d), b : stream(d) -> stream(d) -> stream(d) -> stream(d), 0 : d)
C = 0:f(C)
f(x:s) = x:b(s,s,s)
b(x:y:s,t,u) = x:b(y:t,y:u,y:s)
",
    )
    .unwrap();
    let class = classify(&spec);
    let gen = Generator::new(&spec, &class);
    let root = IoVar::Arg("f".into(), 1, 0);
    let sys = finitize(&gen, std::slice::from_ref(&root), FINITIZE_CAP).unwrap();
    print!("{sys}");
    let cut: Vec<String> = sys.rpc.iter().map(|v| v.to_string()).collect();
    println!("replaced by X+: {}", cut.join(", "));
    println!("{root} = {}", solve(&sys, &root, MAX_COLUMNS).unwrap());
}
