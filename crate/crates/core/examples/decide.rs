//! Deciding productivity of every stream constant in a specification.
use prodcheck::decide_source;

const SRC: &str = "Signature(
  Q : stream(char),
  M : stream(bit),
  zip : stream(x) -> stream(x) -> stream(x),
  inv : stream(bit) -> stream(bit),
  tail : stream(x) -> stream(x),
  diff : stream(bit) -> stream(char),
  i : bit -> bit,
  X : bit -> bit -> char,
  0, 1 : bit,
  a, b, c : char
)
Q = diff(M)
M = 0:zip(inv(M),tail(M))
zip(x:s,t) = x:zip(t,s)
inv(x:s) = i(x):inv(s)
tail(x:s) = s
diff(x:y:s) = X(x,y):diff(y:s)
i(0) = 1
i(1) = 0
X(0,0) = b
X(0,1) = a
X(1,0) = c
X(1,1) = b
";

fn main() {
    for v in decide_source(SRC).unwrap() {
        println!("{}: {}", v.name, v.term);
        println!("  {}", v.sentence());
    }
}
