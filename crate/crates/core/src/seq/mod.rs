//! The `.pseq` pulse-sequence format.
//!
//! One statement per line; `#` starts a comment. Units are fixed: angles in
//! degrees, times in seconds, frequencies in Hz.
//!
//! ```text
//! nu 400000000          # header assignments override the base parameters
//! delta_nu 492
//! j 5
//! pulse 90 135          # hard pulse: angle, phase
//! delay 0.000508 off    # free evolution; coupling off|weak|strong (default weak)
//! pulse 90 0
//! selective I           # jump-return selective 90° on spin I or S
//! gradient_period       # 1/δν of evolution (J off) then a gradient crush
//! zqdephase             # remove every coherence
//! relax 20              # T1/T2 relaxation
//! acquire 8192 0.0005   # at most one: points, dwell
//! ```

mod ast;
mod compile;
mod format;
mod parser;

pub use ast::{HeaderKey, SequenceAst, Span, Spanned, Statement};
pub use compile::{compile, merged_params, AcquisitionSpec, Compiled};
pub use format::{format, format_program, program_to_ast, statement_text};
pub use parser::{parse, parse_bytes, ParseError, ParseErrors};
