//! Target-function expressions over `x, y, z, r, theta`.
//!
//! `r` and `theta` are polar coordinates of `(x, y)` taken about the vertex
//! centroid of the mesh, with `theta = atan2(y − cy, x − cx)` in `(−π, π]`.
//! The constant `pi` is predefined.

use std::fmt;

use prescribed_curvature::mesh::{Mesh, ScalarField, Support};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Z,
    R,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Sqrt,
    Min,
    Max,
}

impl Func {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "exp" => Self::Exp,
            "log" => Self::Log,
            "abs" => Self::Abs,
            "sqrt" => Self::Sqrt,
            "min" => Self::Min,
            "max" => Self::Max,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Exp => "exp",
            Self::Log => "log",
            Self::Abs => "abs",
            Self::Sqrt => "sqrt",
            Self::Min => "min",
            Self::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Self::Min | Self::Max => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalError {
    /// The offending subexpression, printed.
    pub at: String,
    pub message: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in `{}`", self.message, self.at)
    }
}

impl std::error::Error for EvalError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    while j < b.len() && b[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| ParseError { offset: start, message: format!("malformed number `{text}`") })?;
            if !v.is_finite() {
                return Err(ParseError { offset: start, message: format!("number `{text}` overflows") });
            }
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if b"+-*/^(),".contains(&c) {
            out.push((i, Tok::Op(c as char)));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(ParseError { offset: i, message: format!("unexpected character `{ch}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: self.offset(), message: message.into() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else if self.peek().is_none() {
            self.err(format!("expected `{op}`, found end of input"))
        } else {
            self.err(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            None => self.err("unexpected end of input"),
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected `{c}`")),
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(f) = Func::from_name(&name) {
                    self.expect('(')?;
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    if args.len() != f.arity() {
                        return Err(ParseError {
                            offset: at,
                            message: format!("`{name}` takes {} argument(s), got {}", f.arity(), args.len()),
                        });
                    }
                    return Ok(Expr::Call(f, args));
                }
                let var = match name.as_str() {
                    "x" => Var::X,
                    "y" => Var::Y,
                    "z" => Var::Z,
                    "r" => Var::R,
                    "theta" => Var::Theta,
                    "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
                    _ => return Err(ParseError { offset: at, message: format!("unknown identifier `{name}`") }),
                };
                Ok(Expr::Var(var))
            }
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, end: src.len() };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

impl fmt::Display for Expr {
    /// Fully parenthesized; parsing the output gives back the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(v) => f.write_str(match v {
                Var::X => "x",
                Var::Y => "y",
                Var::Z => "z",
                Var::R => "r",
                Var::Theta => "theta",
            }),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Coordinates seen by an expression.
#[derive(Clone, Copy, Debug, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Center for `r` and `theta`.
    pub cx: f64,
    pub cy: f64,
}

impl Expr {
    pub fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        let fail = |msg: String| Err(EvalError { at: self.to_string(), message: msg });
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => p.x,
            Expr::Var(Var::Y) => p.y,
            Expr::Var(Var::Z) => p.z,
            Expr::Var(Var::R) => (p.x - p.cx).hypot(p.y - p.cy),
            Expr::Var(Var::Theta) => (p.y - p.cy).atan2(p.x - p.cx),
            Expr::Neg(e) => -e.eval(p)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(p)?, b.eval(p)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return fail("division by zero".into()),
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(p)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log if a <= 0.0 => return fail(format!("log of non-positive value {a}")),
                    Func::Log => a.ln(),
                    Func::Abs => a.abs(),
                    Func::Sqrt if a < 0.0 => return fail(format!("sqrt of negative value {a}")),
                    Func::Sqrt => a.sqrt(),
                    Func::Min => a.min(args[1].eval(p)?),
                    Func::Max => a.max(args[1].eval(p)?),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            fail(format!("non-finite value {v}"))
        }
    }

    /// Samples the expression on the vertices of `support`, with `r` and
    /// `theta` taken about the vertex centroid.
    pub fn sample(&self, mesh: &Mesh, support: Support) -> Result<ScalarField, String> {
        let (cx, cy) = centroid(mesh);
        let mut values = Vec::new();
        for i in mesh.support_vertices(support) {
            let q = mesh.vertex(i);
            let p = Point { x: q[0], y: q[1], z: q[2], cx, cy };
            values.push(self.eval(&p).map_err(|e| format!("{e} at vertex {i}"))?);
        }
        ScalarField::new(mesh, support, values).map_err(|e| e.to_string())
    }
}

fn centroid(mesh: &Mesh) -> (f64, f64) {
    let n = mesh.num_vertices().max(1) as f64;
    let sx: f64 = mesh.vertices().iter().map(|p| p[0]).sum();
    let sy: f64 = mesh.vertices().iter().map(|p| p[1]).sum();
    (sx / n, sy / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn at(src: &str, x: f64, y: f64) -> f64 {
        parse_expr(src).unwrap().eval(&Point { x, y, ..Default::default() }).unwrap()
    }

    #[test]
    fn sine_minus_constant() {
        let (x, y) = (FRAC_PI_2.cos(), FRAC_PI_2.sin());
        assert!((at("sin(theta) - 0.1", x, y) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn power_binds_tighter_than_plus() {
        assert_eq!(at("x^2 + y", 2.0, 3.0), 7.0);
        assert_eq!(at("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(at("-x^2", 3.0, 0.0), -9.0);
        assert_eq!(at("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(at("  max( x ,y)*2-1", 1.0, 4.0), 7.0);
    }

    #[test]
    fn unfinished_call_reports_end_offset() {
        let e = parse_expr("sin(").unwrap_err();
        assert_eq!(e.offset, 4);
    }

    #[test]
    fn unknown_identifier_is_located() {
        let e = parse_expr("1 + foo").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.message.contains("foo"));
        assert_eq!(parse_expr("x $ 1").unwrap_err().offset, 2);
        assert_eq!(parse_expr("min(x)").unwrap_err().offset, 0);
        assert_eq!(parse_expr("(x").unwrap_err().offset, 2);
    }

    #[test]
    fn evaluation_errors_name_the_subexpression() {
        let e = parse_expr("1 + log(x)").unwrap().eval(&Point { x: -1.0, ..Default::default() }).unwrap_err();
        assert!(e.message.contains("log") && e.at == "log(x)");
        let e = parse_expr("1 / (x - 1)").unwrap().eval(&Point { x: 1.0, ..Default::default() }).unwrap_err();
        assert!(e.message.contains("division by zero"));
    }

    #[test]
    fn print_then_parse_is_stable() {
        for s in ["sin(theta) - 0.1", "-x^2^-y / 3e-7", "max(r, 1) * (z - pi)", "--x"] {
            let a = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&a.to_string()).unwrap(), a, "{s} -> {a}");
        }
    }

    fn arb_expr() -> impl proptest::strategy::Strategy<Value = Expr> {
        use proptest::prelude::*;
        let var = prop_oneof![Just(Var::X), Just(Var::Y), Just(Var::Z), Just(Var::R), Just(Var::Theta)];
        let leaf = prop_oneof![(0.0f64..1e6).prop_map(Expr::Num), var.prop_map(Expr::Var)];
        leaf.prop_recursive(5, 48, 2, |inner| {
            let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
            let unary = prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Exp), Just(Func::Log), Just(Func::Abs), Just(Func::Sqrt)];
            let binary = prop_oneof![Just(Func::Min), Just(Func::Max)];
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Bin(o, Box::new(a), Box::new(b))),
                (unary, inner.clone()).prop_map(|(f, a)| Expr::Call(f, vec![a])),
                (binary, inner.clone(), inner).prop_map(|(f, a, b)| Expr::Call(f, vec![a, b])),
            ]
        })
    }

    proptest::proptest! {
        #[test]
        fn printed_trees_parse_back(e in arb_expr()) {
            let printed = e.to_string();
            proptest::prop_assert_eq!(parse_expr(&printed).unwrap(), e);
        }
    }
}
