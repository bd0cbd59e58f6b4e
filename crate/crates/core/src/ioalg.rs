//! Rational IO-sequences and the increasing functions they denote.
//!
//! A sequence over `-` (consume one input) and `+` (emit one output) is read as
//! a function from available input to produced output. Rational sequences are
//! kept in a unique shortest form, so syntactic equality is semantic equality.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::conat::{CoNat, Fin, Top};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Minus,
    Plus,
}

use Polarity::{Minus, Plus};

impl Polarity {
    pub fn symbol(self) -> char {
        match self {
            Minus => '-',
            Plus => '+',
        }
    }
}

/// Canonical representation of a rational IO-sequence.
///
/// Values built through the public constructors are always normalized:
/// finite words carry no trailing `-`, cycles contain a `+`, are primitive, and
/// cannot be rolled into the prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IoTerm {
    Finite(Vec<Polarity>),
    Rational {
        prefix: Vec<Polarity>,
        cycle: Vec<Polarity>,
    },
}

fn count(w: &[Polarity], p: Polarity) -> u64 {
    w.iter().filter(|&&x| x == p).count() as u64
}

fn trim_minus(mut w: Vec<Polarity>) -> Vec<Polarity> {
    while w.last() == Some(&Minus) {
        w.pop();
    }
    w
}

fn primitive_root(w: &[Polarity]) -> Vec<Polarity> {
    let n = w.len();
    for p in 1..=n {
        if n.is_multiple_of(p) && (p..n).all(|i| w[i] == w[i - p]) {
            return w[..p].to_vec();
        }
    }
    w.to_vec()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Where the eventual periodic regime of a denoted function starts, how many
/// inputs one period spans, and how much output it adds.
#[derive(Clone, Copy, Debug)]
struct Shape {
    start: u64,
    period: u64,
    rise: u64,
    top_tail: bool,
}

impl IoTerm {
    pub fn finite(word: Vec<Polarity>) -> IoTerm {
        IoTerm::Finite(trim_minus(word))
    }

    /// `prefix · cycle^ω`, normalized. An empty cycle is read as the finite word.
    pub fn rational(prefix: Vec<Polarity>, cycle: Vec<Polarity>) -> IoTerm {
        if !cycle.contains(&Plus) {
            return IoTerm::finite(prefix);
        }
        let mut prefix = prefix;
        let mut cycle = primitive_root(&cycle);
        while let (Some(&a), Some(&b)) = (prefix.last(), cycle.last()) {
            if a != b {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        IoTerm::Rational { prefix, cycle }
    }

    pub fn empty() -> IoTerm {
        IoTerm::Finite(Vec::new())
    }

    /// `⟨ | + ⟩`: unbounded output without any input.
    pub fn all_plus() -> IoTerm {
        IoTerm::rational(vec![], vec![Plus])
    }

    /// `⟨ | -+ ⟩`: the identity function.
    pub fn identity() -> IoTerm {
        IoTerm::rational(vec![], vec![Minus, Plus])
    }

    /// `⟨ + | -+ ⟩`: the successor function.
    pub fn successor() -> IoTerm {
        IoTerm::rational(vec![Plus], vec![Minus, Plus])
    }

    /// Re-normalizes a possibly hand-built value.
    pub fn normalize(&self) -> IoTerm {
        match self {
            IoTerm::Finite(w) => IoTerm::finite(w.clone()),
            IoTerm::Rational { prefix, cycle } => IoTerm::rational(prefix.clone(), cycle.clone()),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.normalize() == *self
    }

    pub fn equal_denotation(&self, other: &IoTerm) -> bool {
        self.normalize() == other.normalize()
    }

    pub fn prefix(&self) -> &[Polarity] {
        match self {
            IoTerm::Finite(w) => w,
            IoTerm::Rational { prefix, .. } => prefix,
        }
    }

    pub fn cycle(&self) -> Option<&[Polarity]> {
        match self {
            IoTerm::Finite(_) => None,
            IoTerm::Rational { cycle, .. } => Some(cycle),
        }
    }

    /// Total number of symbols in the representation.
    pub fn size(&self) -> usize {
        self.prefix().len() + self.cycle().map_or(0, |c| c.len())
    }

    /// Whether the denoted sequence has infinitely many `+`.
    pub fn is_productive(&self) -> bool {
        matches!(self, IoTerm::Rational { .. })
    }

    fn symbol_at(&self, pos: usize) -> Option<Polarity> {
        match self {
            IoTerm::Finite(w) => w.get(pos).copied(),
            IoTerm::Rational { prefix, cycle } => Some(if pos < prefix.len() {
                prefix[pos]
            } else {
                cycle[pos - prefix.len()]
            }),
        }
    }

    fn advance(&self, pos: usize) -> usize {
        match self {
            IoTerm::Finite(_) => pos + 1,
            IoTerm::Rational { prefix, cycle } => {
                if pos + 1 == prefix.len() + cycle.len() {
                    prefix.len()
                } else {
                    pos + 1
                }
            }
        }
    }

    /// Output produced when `n` inputs are available.
    pub fn interpret(&self, n: CoNat) -> CoNat {
        let mut out = 0u64;
        let mut left = match n {
            Fin(k) => k,
            Top => {
                return match self {
                    IoTerm::Finite(w) => Fin(count(w, Plus)),
                    IoTerm::Rational { .. } => Top,
                }
            }
        };
        for &p in self.prefix() {
            match p {
                Plus => out += 1,
                Minus if left == 0 => return Fin(out),
                Minus => left -= 1,
            }
        }
        let Some(cycle) = self.cycle() else {
            return Fin(out);
        };
        let need = count(cycle, Minus);
        if need == 0 {
            return Top;
        }
        let laps = left / need;
        out = out.saturating_add(laps.saturating_mul(count(cycle, Plus)));
        left -= laps * need;
        for &p in cycle {
            match p {
                Plus => out = out.saturating_add(1),
                Minus if left == 0 => return Fin(out),
                Minus => left -= 1,
            }
        }
        unreachable!("a cycle with requirements always stops within one lap")
    }

    fn shape(&self) -> Shape {
        match self {
            IoTerm::Finite(w) => Shape {
                start: count(w, Minus),
                period: 1,
                rise: 0,
                top_tail: false,
            },
            IoTerm::Rational { prefix, cycle } => {
                let need = count(cycle, Minus);
                Shape {
                    start: count(prefix, Minus),
                    period: need.max(1),
                    rise: if need == 0 { 0 } else { count(cycle, Plus) },
                    top_tail: need == 0,
                }
            }
        }
    }

    /// Rebuilds a term from the values `h(0..=start+period)` of an increasing
    /// function known to satisfy `h(n + period) = h(n) + c` for `n >= start`.
    fn from_values(vals: &[CoNat], start: usize) -> IoTerm {
        let mut word = Vec::new();
        let mut cycle = Vec::new();
        let plus_run = |w: &mut Vec<Polarity>, k: u64| w.extend(std::iter::repeat_n(Plus, k as usize));
        match vals[0] {
            Top => return IoTerm::all_plus(),
            Fin(k) => plus_run(&mut word, k),
        }
        for n in 0..vals.len() - 1 {
            let target = if n < start { &mut word } else { &mut cycle };
            match (vals[n], vals[n + 1]) {
                (Fin(a), Fin(b)) => {
                    debug_assert!(a <= b, "values must be increasing");
                    target.push(Minus);
                    plus_run(target, b - a);
                }
                (Fin(_), Top) => {
                    word.append(&mut cycle);
                    word.push(Minus);
                    return IoTerm::rational(word, vec![Plus]);
                }
                (Top, _) => unreachable!("values stay at the top once there"),
            }
        }
        IoTerm::rational(word, cycle)
    }

    /// Composition `self ∘ other`: feed the output of `other` into `self`.
    pub fn compose(&self, other: &IoTerm) -> IoTerm {
        let mut out = Vec::new();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            if let Some(&at) = seen.get(&(i, j)) {
                let cycle = out.split_off(at);
                return IoTerm::rational(out, cycle);
            }
            seen.insert((i, j), out.len());
            match self.symbol_at(i) {
                None => return IoTerm::finite(out),
                Some(Plus) => {
                    out.push(Plus);
                    i = self.advance(i);
                }
                Some(Minus) => match other.symbol_at(j) {
                    None => return IoTerm::finite(out),
                    Some(Plus) => {
                        i = self.advance(i);
                        j = other.advance(j);
                    }
                    Some(Minus) => {
                        out.push(Minus);
                        j = other.advance(j);
                    }
                },
            }
        }
    }

    /// Drops the first `-` of the sequence, if any.
    pub fn remove_requirement(&self) -> IoTerm {
        match self {
            IoTerm::Finite(w) => {
                let mut w = w.clone();
                if let Some(k) = w.iter().position(|&p| p == Minus) {
                    w.remove(k);
                }
                IoTerm::finite(w)
            }
            IoTerm::Rational { prefix, cycle } => {
                if let Some(k) = prefix.iter().position(|&p| p == Minus) {
                    let mut p = prefix.clone();
                    p.remove(k);
                    return IoTerm::rational(p, cycle.clone());
                }
                match cycle.iter().position(|&p| p == Minus) {
                    None => self.clone(),
                    Some(k) => {
                        let mut p = prefix.clone();
                        p.extend_from_slice(&cycle[..k]);
                        p.extend_from_slice(&cycle[k + 1..]);
                        IoTerm::rational(p, cycle.clone())
                    }
                }
            }
        }
    }

    /// Pointwise minimum of the denoted functions.
    pub fn infimum(&self, other: &IoTerm) -> IoTerm {
        let (a, b) = (self.shape(), other.shape());
        let base = a.start.max(b.start);
        let (start, period) = match (a.top_tail, b.top_tail) {
            (true, true) => (base, 1),
            (true, false) => (base, b.period),
            (false, true) => (base, a.period),
            (false, false) => {
                let period = a.period / gcd(a.period, b.period) * b.period;
                let ra = a.rise * (period / a.period);
                let rb = b.rise * (period / b.period);
                if ra == rb {
                    (base, period)
                } else {
                    let (slow, fast) = if ra < rb { (self, other) } else { (other, self) };
                    let mut m = base;
                    while !(m..m + period).all(|n| slow.interpret(Fin(n)) <= fast.interpret(Fin(n))) {
                        m += 1;
                    }
                    (m, period)
                }
            }
        };
        let vals: Vec<CoNat> = (0..=start + period)
            .map(|n| self.interpret(Fin(n)).min(other.interpret(Fin(n))))
            .collect();
        IoTerm::from_values(&vals, start as usize)
    }

    /// Least fixed point of the denoted function.
    pub fn least_fixed_point(&self) -> CoNat {
        let s = self.shape();
        let mut n = 0u64;
        loop {
            if self.interpret(Fin(n)) <= Fin(n) {
                return Fin(n);
            }
            // Past one full period with f(n) - n never shrinking, no fixed point is finite.
            if n >= s.start + s.period && (s.top_tail || s.rise >= s.period) {
                return Top;
            }
            n += 1;
        }
    }
}

fn word_string(w: &[Polarity]) -> String {
    w.iter().map(|p| p.symbol()).collect()
}

impl fmt::Display for IoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoTerm::Finite(w) if w.is_empty() => f.write_str("eps"),
            IoTerm::Finite(w) => f.write_str(&word_string(w)),
            IoTerm::Rational { prefix, cycle } => {
                write!(f, "{}({})", word_string(prefix), word_string(cycle))
            }
        }
    }
}

impl FromStr for IoTerm {
    type Err = Error;

    /// Parses `-(-+)`, `++-`, `(+)` or `eps`. The result is normalized.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "eps" || s.is_empty() {
            return Ok(IoTerm::empty());
        }
        let bad = || Error::BadTerm(s.clone());
        let word = |w: &str| -> Result<Vec<Polarity>, Error> {
            w.chars()
                .map(|c| match c {
                    '-' => Ok(Minus),
                    '+' => Ok(Plus),
                    _ => Err(bad()),
                })
                .collect()
        };
        match s.find('(') {
            None => Ok(IoTerm::finite(word(&s)?)),
            Some(open) => {
                let rest = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
                let cycle = word(rest)?;
                if cycle.is_empty() {
                    return Err(bad());
                }
                Ok(IoTerm::rational(word(&s[..open])?, cycle))
            }
        }
    }
}

/// Shorthand used throughout tests and examples; panics on malformed input.
pub fn io(s: &str) -> IoTerm {
    s.parse().unwrap_or_else(|e| panic!("{e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(t: &IoTerm, upto: u64) -> Vec<CoNat> {
        (0..=upto).map(|n| t.interpret(Fin(n))).collect()
    }

    #[test]
    fn interpretation_of_staircase() {
        let t = IoTerm::rational(
            vec![Minus, Plus, Plus, Plus],
            vec![Minus, Plus, Minus, Plus, Plus],
        );
        let got: Vec<u64> = values(&t, 5).into_iter().map(|v| v.finite().unwrap()).collect();
        assert_eq!(got, vec![0, 3, 4, 6, 7, 9]);
        assert_eq!(io("(+-)").interpret(Fin(0)), Fin(1));
        assert_eq!(io("eps").interpret(Fin(9)), Fin(0));
        assert_eq!(io("-(-+)").interpret(Top), Top);
        assert_eq!(io("+-+--").interpret(Top), Fin(2));
    }

    #[test]
    fn normal_forms() {
        assert_eq!(io("(-+-+)"), io("(-+)"));
        assert_eq!(io("+-(+-)"), io("(+-)"));
        assert_eq!(io("++--"), io("++"));
        assert_eq!(io("(---)"), io("eps"));
        assert_eq!(io("-(-+)").to_string(), "-(-+)");
        assert_eq!(io("+(-+)").to_string(), "(+-)");
        assert_eq!(io("++(-+)").to_string(), "+(+-)");
    }

    #[test]
    fn composition_cases() {
        assert_eq!(io("+(-+)").compose(&io("+(-+)")), io("+(+-)"));
        assert_eq!(io("+(+-)").compose(&io("-(-+)")), io("++-(-+)"));
        for s in ["-(-+)", "++-", "(+)", "--(+--+)", "eps"] {
            assert_eq!(io("(-+)").compose(&io(s)), io(s));
        }
    }

    #[test]
    fn infimum_cases() {
        assert_eq!(io("(-++)").infimum(&io("(+-+)")), io("(-++)"));
        assert_eq!(io("(+)").infimum(&io("-+(-)")), io("-+"));
        assert_eq!(io("(++-)").infimum(&io("(+-)")), io("(+-)"));
    }

    #[test]
    fn requirement_removal() {
        assert_eq!(io("-(-+)").remove_requirement(), io("(-+)"));
        assert_eq!(io("(+)").remove_requirement(), io("(+)"));
        assert_eq!(io("+(-+)").remove_requirement(), io("++(-+)"));
    }

    #[test]
    fn fixed_points() {
        assert_eq!(io("++-(-+)").least_fixed_point(), Top);
        assert_eq!(io("(-+)").least_fixed_point(), Fin(0));
        assert_eq!(io("+(-+)").least_fixed_point(), Top);
        assert_eq!(io("+++").least_fixed_point(), Fin(3));
        assert_eq!(io("+(--+)").least_fixed_point(), Fin(1));
    }
}
