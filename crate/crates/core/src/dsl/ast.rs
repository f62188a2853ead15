use std::fmt;

/// Byte range of a node in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    X1,
    X2,
}

impl Var {
    pub fn name(&self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X1 => "x1",
            Var::X2 => "x2",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "t" => Some(Var::T),
            "x1" => Some(Var::X1),
            "x2" => Some(Var::X2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(&self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(&self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Tanh,
    Sqrt,
    Min,
    Max,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn is_variadic(&self) -> bool {
        matches!(self, Func::Min | Func::Max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(f64),
    Constant(Constant),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Expression tree. Equality is structural and ignores source spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Self {
            kind,
            span: Span::default(),
        }
    }

    pub fn number(v: f64) -> Self {
        Self::new(ExprKind::Number(v))
    }

    pub fn var(v: Var) -> Self {
        Self::new(ExprKind::Var(v))
    }

    pub fn neg(e: Expr) -> Self {
        Self::new(ExprKind::Neg(Box::new(e)))
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Self {
        Self::new(ExprKind::Binary(op, Box::new(a), Box::new(b)))
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Self {
        Self::new(ExprKind::Call(f, args))
    }

    /// Sorted, deduplicated free variables.
    pub fn free_variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match &self.kind {
            ExprKind::Var(v) => out.push(*v),
            ExprKind::Neg(e) => e.collect_vars(out),
            ExprKind::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ExprKind::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            ExprKind::Number(_) | ExprKind::Constant(_) => {}
        }
    }
}

/// Fully parenthesized serialization; parsing it back yields an equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Number(v) => write!(f, "{v:?}"),
            ExprKind::Constant(c) => f.write_str(c.name()),
            ExprKind::Var(v) => f.write_str(v.name()),
            ExprKind::Neg(e) => write!(f, "(-{e})"),
            ExprKind::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            ExprKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
