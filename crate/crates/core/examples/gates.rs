//! Gates of the stream functions in a specification.
use prodcheck::streamspec::{classify, parse};
use prodcheck::translate::{translate_symbols, Caps};

const SRC: &str = "Signature(
  f : stream(bit) -> stream(bit),
  g : stream(bit) -> stream(bit) -> stream(bit),
  0, 1 : bit
)
f(s) = g(s,s)
g(0:y:s,x:t) = 0:0:g(s,t)
g(1:s,x1:x2:x3:x4:t) = 0:0:0:0:0:g(s,t)
";

fn main() {
    let spec = parse(SRC).unwrap();
    let class = classify(&spec);
    for (f, t) in translate_symbols(&spec, &class, &Caps::default()).unwrap() {
        println!("{f} ({}): {}", t.class.describe(), t.gate);
    }
}
