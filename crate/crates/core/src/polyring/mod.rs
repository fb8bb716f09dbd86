//! Exact sparse multivariate polynomials over the rationals on a fixed
//! global variable table.

pub mod io;
pub mod monomial;
pub mod order;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod table;

pub use monomial::Monomial;
pub use order::{MonomialOrder, OrderKind};
pub use parse::{parse, parse_in};
pub use poly::{lex, sum_polys, Poly, Term};
pub use rational::Q;
pub use table::{table, var, x, VarKind, VariableTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(String, String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by a non-constant polynomial")]
    NonConstantDivisor,
    #[error("missing value for symbol `{0}`")]
    MissingSymbol(String),
    #[error("bad polynomial data: {0}")]
    Format(String),
}
