use thiserror::Error;

use super::ast::{BinOp, Expr, ExprKind, Func, Span, Var};
use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no binding for variable `{0}`")]
    MissingBinding(&'static str),
    #[error("{message} in `{subexpression}` (bytes {}..{})", span.start, span.end)]
    Domain {
        span: Span,
        subexpression: String,
        message: String,
    },
}

/// Values of the variables `t`, `x1`, `x2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bindings {
    values: [Option<f64>; 3],
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, value: f64) -> Self {
        self.values[var as usize] = Some(value);
        self
    }

    /// Binds `t` and the coordinates of a point (all three variables).
    pub fn event(t: f64, x: Point) -> Self {
        Self {
            values: [Some(t), Some(x[0]), Some(x[1])],
        }
    }

    pub fn get(&self, var: Var) -> Option<f64> {
        self.values[var as usize]
    }
}

fn domain_error(e: &Expr, message: impl Into<String>) -> EvalError {
    EvalError::Domain {
        span: e.span,
        subexpression: e.to_string(),
        message: message.into(),
    }
}

/// IEEE double evaluation. Division by zero, roots of negative numbers and
/// any other non-finite intermediate are reported as errors.
pub fn eval_expression(e: &Expr, b: &Bindings) -> Result<f64, EvalError> {
    let v = match &e.kind {
        ExprKind::Number(v) => *v,
        ExprKind::Constant(c) => c.value(),
        ExprKind::Var(var) => b.get(*var).ok_or(EvalError::MissingBinding(var.name()))?,
        ExprKind::Neg(inner) => -eval_expression(inner, b)?,
        ExprKind::Binary(op, lhs, rhs) => {
            let x = eval_expression(lhs, b)?;
            let y = eval_expression(rhs, b)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(domain_error(e, "division by zero"));
                    }
                    x / y
                }
                BinOp::Pow => {
                    if x < 0.0 && y.fract() != 0.0 {
                        return Err(domain_error(e, "negative base with non-integer exponent"));
                    }
                    if x == 0.0 && y < 0.0 {
                        return Err(domain_error(e, "zero raised to a negative power"));
                    }
                    x.powf(y)
                }
            }
        }
        ExprKind::Call(func, args) => {
            let vals = args
                .iter()
                .map(|a| eval_expression(a, b))
                .collect::<Result<Vec<_>, _>>()?;
            match func {
                Func::Exp => vals[0].exp(),
                Func::Sin => vals[0].sin(),
                Func::Cos => vals[0].cos(),
                Func::Tanh => vals[0].tanh(),
                Func::Sqrt => {
                    if vals[0] < 0.0 {
                        return Err(domain_error(e, "square root of a negative number"));
                    }
                    vals[0].sqrt()
                }
                Func::Min => vals.iter().copied().fold(f64::INFINITY, f64::min),
                Func::Max => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain_error(e, format!("non-finite result {v}")))
    }
}
