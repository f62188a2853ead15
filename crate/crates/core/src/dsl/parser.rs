use thiserror::Error;

use super::ast::{BinOp, Constant, Expr, ExprKind, Func, Span, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("`{name}` at offset {offset} takes {expected} argument(s), got {got}")]
    Arity {
        offset: usize,
        name: String,
        expected: &'static str,
        got: usize,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            Tok::Num(v)
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(src[start..i].to_string())
        } else {
            i += 1;
            match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                _ => {
                    let ch = src[start..].chars().next().unwrap_or('?');
                    return Err(ParseError::Syntax {
                        offset: start,
                        message: format!("unexpected character `{ch}`"),
                    });
                }
            }
        };
        out.push(Token { tok, start, end: i });
    }
    out.push(Token {
        tok: Tok::End,
        start: src.len(),
        end: src.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let t = self.peek();
        let found = match &t.tok {
            Tok::End => "end of input".to_string(),
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        };
        ParseError::Syntax {
            offset: t.start,
            message: format!("expected {wanted}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.peek().tok {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = join(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.peek().tok {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = join(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Op('-') {
            let start = self.bump().start;
            let inner = self.unary()?;
            let end = inner.span.end;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span: Span { start, end },
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(join(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Number(v),
                    span: Span { start: t.start, end: t.end },
                })
            }
            Tok::LParen => {
                self.bump();
                let mut inner = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                let close = self.bump();
                inner.span = Span {
                    start: t.start,
                    end: close.end,
                };
                Ok(inner)
            }
            Tok::Ident(ref name) => {
                self.bump();
                if let Some(func) = Func::from_name(name) {
                    return self.call(func, t.start);
                }
                let span = Span { start: t.start, end: t.end };
                let kind = if let Some(v) = Var::from_name(name) {
                    ExprKind::Var(v)
                } else {
                    match name.as_str() {
                        "pi" => ExprKind::Constant(Constant::Pi),
                        "e" => ExprKind::Constant(Constant::E),
                        _ => {
                            return Err(ParseError::UnknownIdentifier {
                                offset: t.start,
                                name: name.clone(),
                            })
                        }
                    }
                };
                Ok(Expr { kind, span })
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn call(&mut self, func: Func, start: usize) -> Result<Expr, ParseError> {
        if self.peek().tok != Tok::LParen {
            return Err(self.unexpected(&format!("`(` after `{}`", func.name())));
        }
        self.bump();
        let mut args = vec![self.expr()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        if self.peek().tok != Tok::RParen {
            return Err(self.unexpected("`,` or `)`"));
        }
        let end = self.bump().end;
        let (ok, expected) = if func.is_variadic() {
            (args.len() >= 2, "at least 2")
        } else {
            (args.len() == 1, "1")
        };
        if !ok {
            return Err(ParseError::Arity {
                offset: start,
                name: func.name().to_string(),
                expected,
                got: args.len(),
            });
        }
        Ok(Expr {
            kind: ExprKind::Call(func, args),
            span: Span { start, end },
        })
    }
}

fn join(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = Span {
        start: lhs.span.start,
        end: rhs.span.end,
    };
    Expr {
        kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
        span,
    }
}

pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.unexpected("end of input"));
    }
    Ok(e)
}
