//! Text front end: a line-based problem language and command dispatch.

pub mod expr;
pub mod lexer;
pub mod run;
pub mod spec;

pub use expr::{parse_cyclotomic, parse_expr, parse_poly, parse_rational, ExprContext};
pub use lexer::ParseError;
pub use run::{dispatch, parse_failure, Command, Outcome, VerifyKind, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
pub use spec::{parse_input, render_spec, ProblemSpec, StepSpec};
