//! A small expression language for scalar metric ingredients.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | constant | variable | function '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Variables are `t`, `x1`, `x2`; constants `pi`, `e`; functions `exp`,
//! `sin`, `cos`, `tanh`, `sqrt` (one argument) and `min`, `max` (two or
//! more). `^` binds tighter than unary minus and is right associative, so
//! `-2^2 = -4` and `2^3^2 = 512`. Whitespace is ignored.

mod ast;
mod eval;
mod parser;

pub use ast::{BinOp, Constant, Expr, ExprKind, Func, Span, Var};
pub use eval::{eval_expression, Bindings, EvalError};
pub use parser::{parse_expression, ParseError};
