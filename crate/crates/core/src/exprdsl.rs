//! Expression language for metric components and one-forms.
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := "-" unary | power
//! power    := primary ("^" exponent)?
//! exponent := "-" exponent | power
//! primary  := number | ident | ident "(" expr ")" | "(" expr ")"
//! ident    := [A-Za-z_][A-Za-z0-9_]*
//! number   := digits ["." digits?] [("e"|"E") ["+"|"-"] digits] | "." digits ...
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-x^2`
//! is `-(x^2)` and `x^2^3` is `x^(2^3)`. Implicit multiplication is not
//! supported.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::jets::{repeated_square, Elementary, Jet, JetError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: &'static str,
        found: String,
    },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("invalid number literal `{text}` at byte {offset}")]
    BadNumber { text: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("symbol `{0}` is both a coordinate and a parameter")]
    Ambiguous(String),
    #[error("{source} while evaluating `{context}`")]
    Domain {
        #[source]
        source: JetError,
        context: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Callable functions; every entry maps to a jet elementary function.
pub const FUNCTIONS: [Elementary; 9] = [
    Elementary::Sin,
    Elementary::Cos,
    Elementary::Tan,
    Elementary::Exp,
    Elementary::Log,
    Elementary::Sqrt,
    Elementary::Sinh,
    Elementary::Cosh,
    Elementary::Tanh,
];

fn lookup_function(name: &str) -> Option<Elementary> {
    FUNCTIONS.iter().copied().find(|f| f.name() == name)
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Symbol(String),
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Elementary, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Number(v)
    }

    pub fn sym(name: impl Into<String>) -> Expr {
        Expr::Symbol(name.into())
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Number(v) if *v == 0.0)
    }

    /// True if no symbol in the tree is one of `coordinates`.
    pub fn independent_of(&self, coordinates: &dyn Fn(&str) -> bool) -> bool {
        match self {
            Expr::Number(_) => true,
            Expr::Symbol(s) => !coordinates(s),
            Expr::Neg(a) | Expr::Call(_, a) => a.independent_of(coordinates),
            Expr::Binary(_, a, b) => a.independent_of(coordinates) && b.independent_of(coordinates),
        }
    }
}

/// Canonical, fully parenthesized text form; parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Symbol(s) => write!(f, "{s}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn describe(tok: Option<&(usize, Token)>) -> String {
    match tok {
        None => "end of input".to_string(),
        Some((_, Token::Number(v))) => format!("number {v}"),
        Some((_, Token::Ident(s))) => format!("identifier `{s}`"),
        Some((_, Token::Op(c))) => format!("`{c}`"),
        Some((_, Token::LParen)) => "`(`".to_string(),
        Some((_, Token::RParen)) => "`)`".to_string(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((start, Token::Op(c as char)));
                i += 1;
            }
            b'(' => {
                out.push((start, Token::LParen));
                i += 1;
            }
            b')' => {
                out.push((start, Token::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
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
                let lit = &text[start..i];
                let value = lit.parse::<f64>().map_err(|_| ParseError::BadNumber {
                    text: lit.to_string(),
                    offset: start,
                })?;
                out.push((start, Token::Number(value)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: "an expression character",
                    found: format!("`{ch}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error(&self, expected: &'static str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected,
            found: describe(self.tokens.get(self.pos)),
        }
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Op('+')) => BinaryOp::Add,
                Some(Token::Op('-')) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Op('*')) => BinaryOp::Mul,
                Some(Token::Op('/')) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat_op('^') {
            let exponent = self.exponent()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op('-') {
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        self.power()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Token::Number(v)) => {
                self.pos += 1;
                Ok(Expr::Number(v))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Token::LParen) {
                    let func = lookup_function(&name)
                        .ok_or(ParseError::UnknownFunction { name, offset })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.close_paren()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    Ok(Expr::Symbol(name))
                }
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.close_paren()?;
                Ok(inner)
            }
            _ => Err(self.error("a number, identifier or `(`")),
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        if self.peek() == Some(&Token::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error("`)`"))
        }
    }
}

/// Parses an expression string.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let expr = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.error("an operator or end of input"));
    }
    Ok(expr)
}

/// Bindings for evaluation: coordinate jets and real parameters.
#[derive(Debug, Clone)]
pub struct EvalEnv {
    coordinates: BTreeMap<String, Jet>,
    parameters: BTreeMap<String, f64>,
    dim: usize,
    order: usize,
}

impl EvalEnv {
    /// Seeds one jet per coordinate name at `point`.
    pub fn at_point(
        names: &[String],
        point: &[f64],
        order: usize,
        parameters: &BTreeMap<String, f64>,
    ) -> Result<EvalEnv, EvalError> {
        assert_eq!(names.len(), point.len(), "point dimension mismatch");
        let mut coordinates = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if parameters.contains_key(name) {
                return Err(EvalError::Ambiguous(name.clone()));
            }
            let jet = Jet::seed(point, i, order).map_err(|source| EvalError::Domain {
                source,
                context: name.clone(),
            })?;
            coordinates.insert(name.clone(), jet);
        }
        Ok(EvalEnv {
            coordinates,
            parameters: parameters.clone(),
            dim: point.len(),
            order,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn is_coordinate(&self, name: &str) -> bool {
        self.coordinates.contains_key(name)
    }
}

/// Arithmetic backend shared by the plain-number and jet evaluators.
trait Backend {
    type Value: Clone;
    fn constant(&self, v: f64) -> Self::Value;
    fn symbol(&self, name: &str) -> Option<Self::Value>;
    fn is_coordinate(&self, name: &str) -> bool;
    fn parameter(&self, name: &str) -> Option<f64>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, JetError>;
    fn unary(&self, f: Elementary, a: &Self::Value) -> Result<Self::Value, JetError>;
    fn powf(&self, a: &Self::Value, c: f64) -> Result<Self::Value, JetError>;
    fn pow(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, JetError>;
}

struct JetBackend<'a>(&'a EvalEnv);

impl Backend for JetBackend<'_> {
    type Value = Jet;
    fn constant(&self, v: f64) -> Jet {
        Jet::constant(self.0.dim, self.0.order, v)
    }
    fn symbol(&self, name: &str) -> Option<Jet> {
        self.0
            .coordinates
            .get(name)
            .cloned()
            .or_else(|| self.parameter(name).map(|v| self.constant(v)))
    }
    fn is_coordinate(&self, name: &str) -> bool {
        self.0.is_coordinate(name)
    }
    fn parameter(&self, name: &str) -> Option<f64> {
        self.0.parameters.get(name).copied()
    }
    fn add(&self, a: &Jet, b: &Jet) -> Jet {
        a + b
    }
    fn sub(&self, a: &Jet, b: &Jet) -> Jet {
        a - b
    }
    fn mul(&self, a: &Jet, b: &Jet) -> Jet {
        a * b
    }
    fn div(&self, a: &Jet, b: &Jet) -> Result<Jet, JetError> {
        a.div(b)
    }
    fn unary(&self, f: Elementary, a: &Jet) -> Result<Jet, JetError> {
        a.apply(f)
    }
    fn powf(&self, a: &Jet, c: f64) -> Result<Jet, JetError> {
        a.powf(c)
    }
    fn pow(&self, a: &Jet, b: &Jet) -> Result<Jet, JetError> {
        a.pow(b)
    }
}

struct PlainBackend<'a> {
    coordinates: &'a BTreeMap<String, f64>,
    parameters: &'a BTreeMap<String, f64>,
}

impl Backend for PlainBackend<'_> {
    type Value = f64;
    fn constant(&self, v: f64) -> f64 {
        v
    }
    fn symbol(&self, name: &str) -> Option<f64> {
        self.coordinates
            .get(name)
            .or_else(|| self.parameters.get(name))
            .copied()
    }
    fn is_coordinate(&self, name: &str) -> bool {
        self.coordinates.contains_key(name)
    }
    fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn div(&self, a: &f64, b: &f64) -> Result<f64, JetError> {
        if *b == 0.0 {
            return Err(JetError::Singular {
                function: "div",
                value: *b,
            });
        }
        Ok(a / b)
    }
    fn unary(&self, f: Elementary, a: &f64) -> Result<f64, JetError> {
        f.apply_f64(*a)
    }
    fn powf(&self, a: &f64, c: f64) -> Result<f64, JetError> {
        if a.is_nan() || *a <= 0.0 {
            return Err(JetError::Singular {
                function: "pow",
                value: *a,
            });
        }
        Ok(a.powf(c))
    }
    fn pow(&self, a: &f64, b: &f64) -> Result<f64, JetError> {
        let log = Elementary::Log
            .apply_f64(*a)
            .map_err(|_| JetError::Singular {
                function: "pow",
                value: *a,
            })?;
        Elementary::Exp.apply_f64(b * log)
    }
}

/// Largest integer exponent evaluated by repeated multiplication.
const MAX_INTEGER_EXPONENT: f64 = 64.0;

fn evaluate<B: Backend>(expr: &Expr, backend: &B) -> Result<B::Value, EvalError> {
    let domain = |source: JetError| EvalError::Domain {
        source,
        context: expr.to_string(),
    };
    match expr {
        Expr::Number(v) => Ok(backend.constant(*v)),
        Expr::Symbol(s) => backend
            .symbol(s)
            .ok_or_else(|| EvalError::Unbound(s.clone())),
        Expr::Neg(a) => {
            let a = evaluate(a, backend)?;
            backend.unary(Elementary::Neg, &a).map_err(domain)
        }
        Expr::Call(f, a) => {
            let a = evaluate(a, backend)?;
            backend.unary(*f, &a).map_err(domain)
        }
        Expr::Binary(op, a, b) => {
            if *op == BinaryOp::Pow && b.independent_of(&|s| backend.is_coordinate(s)) {
                let base = evaluate(a, backend)?;
                let exponent = constant_value(b, backend)?;
                if exponent.fract() == 0.0 && exponent.abs() <= MAX_INTEGER_EXPONENT {
                    return integer_power(backend, &base, exponent as i32).map_err(domain);
                }
                return backend.powf(&base, exponent).map_err(domain);
            }
            let a = evaluate(a, backend)?;
            let b = evaluate(b, backend)?;
            match op {
                BinaryOp::Add => Ok(backend.add(&a, &b)),
                BinaryOp::Sub => Ok(backend.sub(&a, &b)),
                BinaryOp::Mul => Ok(backend.mul(&a, &b)),
                BinaryOp::Div => backend.div(&a, &b).map_err(domain),
                BinaryOp::Pow => backend.pow(&a, &b).map_err(domain),
            }
        }
    }
}

/// Evaluates a coordinate-free subtree to a plain number.
fn constant_value<B: Backend>(expr: &Expr, backend: &B) -> Result<f64, EvalError> {
    let empty = BTreeMap::new();
    let params: BTreeMap<String, f64> = collect_symbols(expr)
        .into_iter()
        .filter_map(|s| backend.parameter(&s).map(|v| (s, v)))
        .collect();
    evaluate(
        expr,
        &PlainBackend {
            coordinates: &empty,
            parameters: &params,
        },
    )
}

fn collect_symbols(expr: &Expr) -> Vec<String> {
    let mut out = Vec::new();
    fn walk(e: &Expr, out: &mut Vec<String>) {
        match e {
            Expr::Number(_) => {}
            Expr::Symbol(s) => out.push(s.clone()),
            Expr::Neg(a) | Expr::Call(_, a) => walk(a, out),
            Expr::Binary(_, a, b) => {
                walk(a, out);
                walk(b, out);
            }
        }
    }
    walk(expr, &mut out);
    out
}

fn integer_power<B: Backend>(backend: &B, base: &B::Value, k: i32) -> Result<B::Value, JetError> {
    let positive = repeated_square(
        base.clone(),
        k.unsigned_abs(),
        |a, b| backend.mul(a, b),
        || backend.constant(1.0),
    );
    if k < 0 {
        backend.div(&backend.constant(1.0), &positive)
    } else {
        Ok(positive)
    }
}

/// Jet of `expr` at the point encoded by `env`.
pub fn eval_jet(expr: &Expr, env: &EvalEnv) -> Result<Jet, EvalError> {
    evaluate(expr, &JetBackend(env))
}

/// Plain-number evaluation with the same semantics as [`eval_jet`].
pub fn eval_f64(
    expr: &Expr,
    coordinates: &BTreeMap<String, f64>,
    parameters: &BTreeMap<String, f64>,
) -> Result<f64, EvalError> {
    if let Some(name) = coordinates.keys().find(|k| parameters.contains_key(*k)) {
        return Err(EvalError::Ambiguous(name.clone()));
    }
    evaluate(
        expr,
        &PlainBackend {
            coordinates,
            parameters,
        },
    )
}
