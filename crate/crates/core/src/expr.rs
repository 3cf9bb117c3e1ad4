//! Arithmetic expressions over `+ - * /`, unary minus, `abs`, `min`, `max`,
//! decimal literals and a fixed set of variables.
//!
//! Distance formulas are compiled against `["x", "y"]`, maps against
//! `["x"]`. Evaluation is generic over [`Scalar`] so the same tree runs in
//! exact rationals (hypothesis checks) and in doubles (orbits).

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::real::{from_f64, parse_real, to_decimal_string, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprErrorKind {
    #[error("unexpected character `{0}`")]
    Lexical(char),
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("division by a literal zero")]
    DivisionByZeroLiteral,
    #[error("unexpected {0}")]
    Unexpected(String),
    #[error("empty expression")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at {span}")]
pub struct ExprError {
    pub kind: ExprErrorKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero at {0}")]
    DivisionByZero(Span),
    #[error("expected {expected} variable value(s), got {got}")]
    Arity { expected: usize, got: usize },
    #[error("non-finite value at {0}")]
    NonFinite(Span),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn prec(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Min,
    Max,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        match name {
            "abs" => Some(Func::Abs),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            _ => None,
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Abs => 1,
            Func::Min | Func::Max => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(Real),
    /// Variable name and its position in the compile-time context.
    Var(String, usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Syntax tree node. Equality ignores source spans.
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

/// Number types an [`Expr`] can be evaluated in.
pub trait Scalar: Clone + PartialOrd {
    fn from_real(r: &Real) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `None` on a zero divisor.
    fn div(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
}

impl Scalar for f64 {
    fn from_real(r: &Real) -> Self {
        to_f64(r)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (*o != 0.0).then(|| self / o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for Real {
    fn from_real(r: &Real) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (!o.is_zero()).then(|| self / o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

impl Expr {
    pub fn eval<T: Scalar>(&self, vars: &[T]) -> Result<T, EvalError> {
        Ok(match &self.kind {
            ExprKind::Num(r) => T::from_real(r),
            ExprKind::Var(_, slot) => vars
                .get(*slot)
                .cloned()
                .ok_or(EvalError::Arity {
                    expected: slot + 1,
                    got: vars.len(),
                })?,
            ExprKind::Neg(e) => e.eval(vars)?.neg(),
            ExprKind::Bin(op, l, r) => {
                let a = l.eval(vars)?;
                let b = r.eval(vars)?;
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.div(&b).ok_or(EvalError::DivisionByZero(self.span))?,
                }
            }
            ExprKind::Call(func, args) => {
                let a = args[0].eval(vars)?;
                match func {
                    Func::Abs => a.abs(),
                    Func::Min | Func::Max => {
                        let b = args[1].eval(vars)?;
                        let take_b = if *func == Func::Min { b < a } else { b > a };
                        if take_b {
                            b
                        } else {
                            a
                        }
                    }
                }
            }
        })
    }

    /// Double-precision evaluation that also rejects overflow and NaN.
    pub fn eval_f64(&self, vars: &[f64]) -> Result<f64, EvalError> {
        let v = self.eval(vars)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite(self.span))
        }
    }

    /// Exact evaluation at finite double inputs.
    pub fn eval_exact_at(&self, vars: &[f64]) -> Result<Real, EvalError> {
        let exact: Vec<Real> = vars
            .iter()
            .map(|&v| from_f64(v).ok_or(EvalError::NonFinite(self.span)))
            .collect::<Result<_, _>>()?;
        self.eval(&exact)
    }

    /// Largest variable slot referenced plus one.
    pub fn arity(&self) -> usize {
        match &self.kind {
            ExprKind::Num(_) => 0,
            ExprKind::Var(_, slot) => slot + 1,
            ExprKind::Neg(e) => e.arity(),
            ExprKind::Bin(_, l, r) => l.arity().max(r.arity()),
            ExprKind::Call(_, args) => args.iter().map(Expr::arity).max().unwrap_or(0),
        }
    }

    fn prec(&self) -> u8 {
        match &self.kind {
            ExprKind::Bin(op, ..) => op.prec(),
            ExprKind::Neg(_) => 3,
            _ => 4,
        }
    }

    fn write_with(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let paren = self.prec() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match &self.kind {
            ExprKind::Num(r) => match to_decimal_string(r) {
                Some(s) => f.write_str(&s)?,
                None => write!(f, "({}/{})", r.numer(), r.denom())?,
            },
            ExprKind::Var(name, _) => f.write_str(name)?,
            ExprKind::Neg(e) => {
                f.write_str("-")?;
                e.write_with(f, 3)?;
            }
            ExprKind::Bin(op, l, r) => {
                l.write_with(f, op.prec())?;
                write!(f, " {} ", op.symbol())?;
                r.write_with(f, op.prec() + 1)?;
            }
            ExprKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.write_with(f, 0)?;
                }
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn describe(t: Option<&(Tok, Span)>) -> String {
    match t {
        None => "end of input".into(),
        Some((Tok::Num(s), _)) => format!("number `{s}`"),
        Some((Tok::Ident(s), _)) => format!("identifier `{s}`"),
        Some((Tok::Op(c), _)) => format!("operator `{c}`"),
        Some((Tok::LParen, _)) => "`(`".into(),
        Some((Tok::RParen, _)) => "`)`".into(),
        Some((Tok::Comma, _)) => "`,`".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, ExprError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = |t: Tok| (t, Span::new(pos, pos + c.len_utf8()));
        match c {
            '+' | '-' | '*' | '/' => out.push(single(Tok::Op(c))),
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            ',' => out.push(single(Tok::Comma)),
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len() && (chars[j].1.is_ascii_digit() || chars[j].1 == '.') {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |x| x.0);
                out.push((Tok::Num(text[pos..end].to_string()), Span::new(pos, end)));
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |x| x.0);
                out.push((Tok::Ident(text[pos..end].to_string()), Span::new(pos, end)));
                i = j;
                continue;
            }
            other => {
                return Err(ExprError {
                    kind: ExprErrorKind::Lexical(other),
                    span: Span::new(pos, pos + other.len_utf8()),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    context: &'a [&'a str],
    text_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&(Tok, Span)> {
        self.toks.get(self.pos)
    }

    fn eof_span(&self) -> Span {
        Span::new(self.text_len, self.text_len)
    }

    fn unexpected(&self) -> ExprError {
        let span = self.peek().map_or(self.eof_span(), |t| t.1);
        let kind = match self.peek() {
            Some((Tok::RParen, _)) => ExprErrorKind::Unbalanced,
            _ => ExprErrorKind::Unexpected(describe(self.peek())),
        };
        ExprError { kind, span }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some((Tok::Op(c @ ('+' | '-')), _)) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some((Tok::Op(c @ ('*' | '/')), _)) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            if op == BinOp::Div && is_literal_zero(&rhs) {
                return Err(ExprError {
                    kind: ExprErrorKind::DivisionByZeroLiteral,
                    span: rhs.span,
                });
            }
            let span = lhs.span.join(rhs.span);
            lhs = Expr {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if let Some((Tok::Op('-'), span)) = self.peek() {
            let start = *span;
            self.pos += 1;
            let inner = self.unary()?;
            let span = start.join(inner.span);
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let Some((tok, span)) = self.peek().cloned() else {
            return Err(self.unexpected());
        };
        match tok {
            Tok::Num(s) => {
                self.pos += 1;
                let value = parse_real(&s).map_err(|_| ExprError {
                    kind: ExprErrorKind::BadNumber(s.clone()),
                    span,
                })?;
                Ok(Expr {
                    kind: ExprKind::Num(value),
                    span,
                })
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some((Tok::RParen, close)) => {
                        let close = *close;
                        self.pos += 1;
                        Ok(Expr {
                            kind: inner.kind,
                            span: span.join(close),
                        })
                    }
                    None => Err(ExprError {
                        kind: ExprErrorKind::Unbalanced,
                        span,
                    }),
                    Some(_) => Err(self.unexpected()),
                }
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(func) = Func::lookup(&name) {
                    return self.call(func, &name, span);
                }
                match self.context.iter().position(|v| *v == name) {
                    Some(slot) => Ok(Expr {
                        kind: ExprKind::Var(name, slot),
                        span,
                    }),
                    None => Err(ExprError {
                        kind: ExprErrorKind::UnknownIdentifier(name),
                        span,
                    }),
                }
            }
            _ => Err(self.unexpected()),
        }
    }

    fn call(&mut self, func: Func, name: &str, name_span: Span) -> Result<Expr, ExprError> {
        let open = match self.peek() {
            Some((Tok::LParen, s)) => *s,
            _ => {
                return Err(ExprError {
                    kind: ExprErrorKind::Arity {
                        name: name.to_string(),
                        expected: func.arity(),
                        got: 0,
                    },
                    span: name_span,
                })
            }
        };
        self.pos += 1;
        let mut args = Vec::new();
        if !matches!(self.peek(), Some((Tok::RParen, _))) {
            loop {
                args.push(self.expr()?);
                match self.peek() {
                    Some((Tok::Comma, _)) => self.pos += 1,
                    _ => break,
                }
            }
        }
        let close = match self.peek() {
            Some((Tok::RParen, s)) => *s,
            None => {
                return Err(ExprError {
                    kind: ExprErrorKind::Unbalanced,
                    span: open,
                })
            }
            Some(_) => return Err(self.unexpected()),
        };
        self.pos += 1;
        let span = name_span.join(close);
        if args.len() != func.arity() {
            return Err(ExprError {
                kind: ExprErrorKind::Arity {
                    name: name.to_string(),
                    expected: func.arity(),
                    got: args.len(),
                },
                span,
            });
        }
        Ok(Expr {
            kind: ExprKind::Call(func, args),
            span,
        })
    }
}

fn is_literal_zero(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Num(r) => r.is_zero(),
        ExprKind::Neg(inner) => is_literal_zero(inner),
        _ => false,
    }
}

/// Parses `text` with the variables in `context` (slot order).
pub fn parse_expression(text: &str, context: &[&str]) -> Result<Expr, ExprError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ExprError {
            kind: ExprErrorKind::Empty,
            span: Span::new(0, text.len()),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        context,
        text_len: text.len(),
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.unexpected());
    }
    Ok(e)
}

pub const DISTANCE_VARS: [&str; 2] = ["x", "y"];
pub const MAP_VARS: [&str; 1] = ["x"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{int, ratio};
    use proptest::prelude::*;

    fn d(text: &str) -> Expr {
        parse_expression(text, &DISTANCE_VARS).unwrap()
    }

    #[test]
    fn quasi_metric_formula() {
        let e = d("abs(y-x)+(y-x)/2");
        assert_eq!(e.eval(&[0.0, 1.0]).unwrap(), 1.5);
        assert_eq!(e.eval(&[int(1), int(0)]).unwrap(), ratio(1, 2));
    }

    #[test]
    fn reflected_formula() {
        assert_eq!(d("1-abs(x-y)").eval(&[1.0, 0.0]).unwrap(), 0.0);
        let f = parse_expression("x/2+1", &MAP_VARS).unwrap();
        assert_eq!(f.eval(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(d("1-2-3").eval::<f64>(&[0.0, 0.0]).unwrap(), -4.0);
        assert_eq!(d("8/4/2").eval::<f64>(&[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(d("2+3*4").eval::<f64>(&[0.0, 0.0]).unwrap(), 14.0);
        assert_eq!(d("-2*3").eval::<f64>(&[0.0, 0.0]).unwrap(), -6.0);
        assert_eq!(d("--x").eval(&[5.0, 0.0]).unwrap(), 5.0);
        assert_eq!(d("min(x, y) + max(x, y)").eval(&[2.0, 7.0]).unwrap(), 9.0);
    }

    #[test]
    fn errors_carry_positions() {
        let err = |t: &str| parse_expression(t, &DISTANCE_VARS).unwrap_err();
        assert_eq!(err("x + z").kind, ExprErrorKind::UnknownIdentifier("z".into()));
        assert_eq!(err("x + z").span, Span::new(4, 5));
        assert_eq!(err("x $ y").kind, ExprErrorKind::Lexical('$'));
        assert_eq!(err("x $ y").span.start, 2);
        assert!(matches!(err("min(x)").kind, ExprErrorKind::Arity { expected: 2, got: 1, .. }));
        assert!(matches!(err("abs").kind, ExprErrorKind::Arity { .. }));
        assert_eq!(err("(x + y").kind, ExprErrorKind::Unbalanced);
        assert_eq!(err("(x + y").span.start, 0);
        assert_eq!(err("x + y)").kind, ExprErrorKind::Unbalanced);
        assert_eq!(err("x + y)").span.start, 5);
        assert_eq!(err("x / 0").kind, ExprErrorKind::DivisionByZeroLiteral);
        assert_eq!(err("x / -0.0").kind, ExprErrorKind::DivisionByZeroLiteral);
        assert_eq!(err("  ").kind, ExprErrorKind::Empty);
        assert!(matches!(err("1.2.3").kind, ExprErrorKind::BadNumber(_)));
        assert!(matches!(err("x y").kind, ExprErrorKind::Unexpected(_)));
        // map context has no y
        assert!(parse_expression("x + y", &MAP_VARS).is_err());
    }

    #[test]
    fn runtime_division_by_zero_is_an_error() {
        let e = d("x / (y - y)");
        assert!(matches!(e.eval(&[1.0, 2.0]), Err(EvalError::DivisionByZero(_))));
        assert!(matches!(e.eval(&[int(1), int(2)]), Err(EvalError::DivisionByZero(_))));
    }

    #[test]
    fn printer_output() {
        assert_eq!(d("abs(y-x)+(y-x)/2").to_string(), "abs(y - x) + (y - x) / 2");
        assert_eq!(d("x-(y-1)").to_string(), "x - (y - 1)");
        assert_eq!(d("-(x*y)").to_string(), "-(x * y)");
        assert_eq!(d("0.25*x").to_string(), "0.25 * x");
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000, 0u32..3).prop_map(|(n, places)| {
                let v = Real::new(n.into(), 10u32.pow(places).into());
                Expr { kind: ExprKind::Num(v), span: Span::default() }
            }),
            (0usize..2).prop_map(|slot| Expr {
                kind: ExprKind::Var(DISTANCE_VARS[slot].to_string(), slot),
                span: Span::default(),
            }),
        ];
        leaf.prop_recursive(4, 32, 2, |inner| {
            let node = |kind| Expr { kind, span: Span::default() };
            prop_oneof![
                inner.clone().prop_map(move |e| node(ExprKind::Neg(Box::new(e)))),
                (inner.clone(), inner.clone(), 0usize..3).prop_map(move |(a, b, k)| {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul][k];
                    node(ExprKind::Bin(op, Box::new(a), Box::new(b)))
                }),
                (inner.clone(), 1u32..50).prop_map(move |(a, k)| {
                    let lit = node(ExprKind::Num(Real::from_integer(k.into())));
                    node(ExprKind::Bin(BinOp::Div, Box::new(a), Box::new(lit)))
                }),
                inner.clone().prop_map(move |a| node(ExprKind::Call(Func::Abs, vec![a]))),
                (inner.clone(), inner.clone(), any::<bool>()).prop_map(move |(a, b, m)| {
                    node(ExprKind::Call(if m { Func::Min } else { Func::Max }, vec![a, b]))
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(e in arb_expr()) {
            let printed = e.to_string();
            let back = parse_expression(&printed, &DISTANCE_VARS).unwrap();
            prop_assert_eq!(back, e);
        }

        #[test]
        fn evaluation_is_total(e in arb_expr(), x in -100i64..100, y in -100i64..100) {
            prop_assert!(e.eval(&[int(x), int(y)]).is_ok());
            prop_assert!(e.eval(&[x as f64, y as f64]).is_ok());
        }
    }
}
