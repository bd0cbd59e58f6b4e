//! From stream specifications to gates and production terms, and the
//! resulting productivity verdicts.

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::conat::CoNat;
use crate::error::{Diagnostic, Error, Result, Severity};
use crate::ioalg::IoTerm;
use crate::iospec::{finitize, Generator, IoSpec, IoVar, FINITIZE_CAP};
use crate::prodcalc::{collapse_trace, Gate, ProdTerm, Step};
use crate::solver::{solve, MAX_COLUMNS};
use crate::streamspec::{classify, parse, validate, Classification, StreamSpec, SymbolClass, SymbolKind, Term};

/// Resource bounds for the analysis and the oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_columns: usize,
    pub finitize_cap: usize,
    pub oracle_prod_cap: u64,
    pub oracle_steps: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_columns: MAX_COLUMNS, finitize_cap: FINITIZE_CAP, oracle_prod_cap: 32, oracle_steps: 100_000 }
    }
}

/// The translation of one stream function.
#[derive(Clone, Debug)]
pub struct SymbolTranslation {
    pub class: SymbolClass,
    pub guarded: bool,
    /// Solution for `X_{f,*}`.
    pub star: IoTerm,
    pub gate: Gate,
    /// The finite system the solutions were read from.
    pub system: IoSpec,
}

pub type GateTable = IndexMap<String, SymbolTranslation>;

/// Translates one stream function into a gate.
pub fn translate_symbol(spec: &StreamSpec, class: &Classification, f: &str, caps: &Caps) -> Result<SymbolTranslation> {
    let gen = Generator::new(spec, class);
    let arity = gen.arity(f);
    let star = IoVar::Star(f.to_string());
    let mut roots = vec![star.clone()];
    roots.extend((1..=arity).map(|i| IoVar::Arg(f.to_string(), i, 0)));
    let system = finitize(&gen, &roots, caps.finitize_cap)?;
    let star_term = solve(&system, &star, caps.max_columns)?;
    let args = roots[1..].iter().map(|r| solve(&system, r, caps.max_columns)).collect::<Result<Vec<_>>>()?;
    Ok(SymbolTranslation {
        class: class.class(f).expect("stream function"),
        guarded: class.is_guarded(f),
        gate: Gate::new(star_term.interpret(CoNat::ZERO), args),
        star: star_term,
        system,
    })
}

/// Gates for every stream function of the specification.
pub fn translate_symbols(spec: &StreamSpec, class: &Classification, caps: &Caps) -> Result<GateTable> {
    spec.functions().map(|f| Ok((f.name.clone(), translate_symbol(spec, class, &f.name, caps)?))).collect()
}

fn translate_term(spec: &StreamSpec, gates: &GateTable, t: &Term, visited: &mut Vec<String>) -> Result<ProdTerm> {
    match t {
        Term::Var(x, p) => Err(Error::Translate(format!(
            "stream variable `{x}` in a constant definition at {}:{}",
            p.line, p.col
        ))),
        Term::Cons(_, tail, _) => Ok(ProdTerm::peb(translate_term(spec, gates, tail, visited)?)),
        Term::App(c, _, _) if spec.signature.kind(c) == Some(SymbolKind::StreamConstant) => {
            if visited.contains(c) {
                return Ok(ProdTerm::var(c));
            }
            visited.push(c.clone());
            let bodies = spec
                .rules_for(c)
                .map(|(_, r)| translate_term(spec, gates, &r.rhs, visited))
                .collect::<Result<Vec<_>>>();
            visited.pop();
            Ok(ProdTerm::mu(c, ProdTerm::meet_all(bodies?)))
        }
        Term::App(f, args, _) => {
            let decl = spec.signature.get(f).expect("resolved");
            let gate = &gates.get(f).ok_or_else(|| Error::Translate(format!("no gate for `{f}`")))?.gate;
            let children = decl
                .stream_positions()
                .into_iter()
                .map(|i| translate_term(spec, gates, &args[i], visited))
                .collect::<Result<Vec<_>>>()?;
            gate.apply(children)
        }
    }
}

/// The production term of a stream constant.
pub fn translate_constant(spec: &StreamSpec, gates: &GateTable, c: &str) -> Result<ProdTerm> {
    match spec.signature.kind(c) {
        Some(SymbolKind::StreamConstant) => {}
        _ => return Err(Error::Translate(format!("`{c}` is not a stream constant"))),
    }
    translate_term(spec, gates, &Term::App(c.to_string(), Vec::new(), Default::default()), &mut Vec::new())
}

/// What the stream functions a constant depends on allow us to conclude.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Context {
    AllPure,
    AllFlat,
    FriendlyNesting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    Productive,
    NotProductive,
    NotDoProductive,
    Unknown,
}

impl Answer {
    pub fn from_production(k: CoNat, ctx: Context) -> Answer {
        match (k.is_top(), ctx) {
            (true, _) => Answer::Productive,
            (false, Context::AllPure) => Answer::NotProductive,
            (false, Context::AllFlat) => Answer::NotDoProductive,
            (false, Context::FriendlyNesting) => Answer::Unknown,
        }
    }

    /// Process exit code contribution.
    pub fn exit_code(self) -> i32 {
        match self {
            Answer::Productive => 0,
            Answer::NotProductive | Answer::NotDoProductive => 1,
            Answer::Unknown => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub name: String,
    pub production: CoNat,
    pub context: Context,
    pub answer: Answer,
    pub term: ProdTerm,
    pub trace: Vec<Step>,
}

impl Verdict {
    pub fn sentence(&self) -> String {
        let n = &self.name;
        match self.answer {
            Answer::Productive => format!("The specification of {n} is productive."),
            Answer::Unknown => format!("Failed to prove productivity of {n}."),
            Answer::NotDoProductive => {
                format!("{n} is not data-obliviously productive (production = {}).", self.production)
            }
            Answer::NotProductive => format!("{n} is not productive (production = {}).", self.production),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sentence())
    }
}

/// Classifies the stream functions a constant depends on.
pub fn context_of(spec: &StreamSpec, class: &Classification, c: &str) -> Context {
    let classes: Vec<SymbolClass> = spec.reachable_symbols(c).iter().filter_map(|s| class.class(s)).collect();
    if classes.iter().all(|&k| k == SymbolClass::Pure) {
        Context::AllPure
    } else if classes.iter().all(|k| k.is_flat()) {
        Context::AllFlat
    } else {
        Context::FriendlyNesting
    }
}

/// Everything the pipeline computed for one specification.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub spec: StreamSpec,
    pub diagnostics: Vec<Diagnostic>,
    pub classification: Classification,
    pub gates: GateTable,
    pub verdicts: Vec<Verdict>,
}

/// Validates, classifies and translates `spec`, then decides every stream
/// constant (or only `root`).
pub fn analyze(spec: StreamSpec, caps: &Caps, root: Option<&str>) -> Result<Analysis> {
    let diagnostics = validate(&spec);
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        return Err(Error::Invalid(diagnostics));
    }
    let classification = classify(&spec);
    let gates = translate_symbols(&spec, &classification, caps)?;
    let names: Vec<String> = match root {
        Some(r) if spec.signature.kind(r) == Some(SymbolKind::StreamConstant) => vec![r.to_string()],
        Some(r) => return Err(Error::Translate(format!("`{r}` is not a stream constant"))),
        None => spec.constants().map(|d| d.name.clone()).collect(),
    };
    let mut verdicts = Vec::new();
    for name in names {
        let term = translate_constant(&spec, &gates, &name)?;
        let trace = collapse_trace(&term)?;
        let production = match trace.last().map(|s| &s.term) {
            Some(ProdTerm::Src(k)) => *k,
            None => match term {
                ProdTerm::Src(k) => k,
                _ => unreachable!("collapse ends in a numeral"),
            },
            Some(t) => unreachable!("collapse ended in {t}"),
        };
        let context = context_of(&spec, &classification, &name);
        let answer = Answer::from_production(production, context);
        verdicts.push(Verdict { name, production, context, answer, term, trace });
    }
    Ok(Analysis { spec, diagnostics, classification, gates, verdicts })
}

/// Verdicts for every stream constant, with default caps.
pub fn decide(spec: &StreamSpec) -> Result<Vec<Verdict>> {
    Ok(analyze(spec.clone(), &Caps::default(), None)?.verdicts)
}

pub fn decide_source(src: &str) -> Result<Vec<Verdict>> {
    decide(&parse(src)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ioalg::io;

    const PASCAL: &str = "Signature(P : stream(nat), 0 : nat, f : stream(nat) -> stream(nat), a : nat -> nat -> nat, s : nat -> nat)
P = 0:s(0):f(P)
f(s(x):y:sigma) = a(s(x),y):f(y:sigma)
f(0:sigma) = 0:s(0):f(sigma)
a(s(x),y) = s(a(x,y))
a(0,y) = y
";

    #[test]
    fn pascal_pipeline() {
        let a = analyze(parse(PASCAL).unwrap(), &Caps::default(), None).unwrap();
        let f = &a.gates["f"];
        assert_eq!(f.gate, Gate::new(CoNat::Top, vec![io("-(-+)")]));
        assert_eq!(f.star, io("(+)"));
        let p = &a.verdicts[0];
        assert_eq!(p.term.to_string(), "mu P. peb(peb(box<-(-+)>(P)))");
        assert_eq!(p.production, CoNat::Top);
        assert_eq!(p.context, Context::AllFlat);
        assert_eq!(p.sentence(), "The specification of P is productive.");
    }

    #[test]
    fn multiple_rules_meet() {
        let src = "Signature(C : stream(b), x : b -> stream(b), 0, 1 : b)\nC = 0:C\nx(0) = 0:x(1)\nx(1) = 1:1:C\n";
        let spec = parse(src).unwrap();
        let a = analyze(spec.clone(), &Caps::default(), None).unwrap();
        assert_eq!(a.verdicts.len(), 2);
        let t = translate_constant(&spec, &a.gates, "x").unwrap();
        assert_eq!(t.to_string(), "mu x. meet(peb(x), peb(peb(mu C. peb(C))))");
    }

    #[test]
    fn unknown_root() {
        let e = analyze(parse(PASCAL).unwrap(), &Caps::default(), Some("f")).unwrap_err();
        assert_eq!(e.exit_code(), 12);
    }
}
