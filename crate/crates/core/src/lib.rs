//! Productivity analysis for stream specifications.
//!
//! Stream functions are abstracted to *gates*: meets of rational IO-sequences
//! describing how much output each amount of input guarantees, whatever the
//! data. Stream constants become recursive production terms over those gates,
//! and a terminating rewrite system collapses each term to the number of
//! elements the constant is guaranteed to produce.
//!
//! ```
//! use prodcheck::{decide_source, Answer, Top};
//!
//! let src = "Signature(M : stream(bit), h : stream(bit) -> stream(bit), 0, 1 : bit)
//! M = 0:h(M)
//! h(0:s) = 0:1:h(s)
//! h(1:s) = 1:0:h(s)";
//! let verdicts = decide_source(src).unwrap();
//! assert_eq!(verdicts[0].production, Top);
//! assert_eq!(verdicts[0].answer, Answer::Productive);
//! ```

pub mod cli;
pub mod conat;
pub mod dogame;
pub mod error;
pub mod ioalg;
pub mod iospec;
pub mod prodcalc;
pub mod solver;
pub mod streamspec;
pub mod translate;

pub use conat::{Approx, CoNat, Fin, Top};
pub use error::{Diagnostic, Error, Result, Severity};
pub use ioalg::{io, IoTerm, Polarity};
pub use prodcalc::{Gate, ProdTerm};
pub use streamspec::StreamSpec;
pub use translate::{decide, decide_source, Answer, Verdict};
