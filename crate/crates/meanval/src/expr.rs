//! A small expression language for scalar functions on R^m.
//!
//! Used by JSON experiment configs and the examples; library callers can
//! always pass native closures instead. The grammar, in EBNF (also reproduced
//! in the repository README):
//!
//! ```text
//! expr       = sum ;
//! comparison = sum , ( "<" | "<=" | ">" | ">=" ) , sum ;   (* indicator argument only *)
//! sum        = product , { ( "+" | "-" ) , product } ;
//! product    = unary , { ( "*" | "/" ) , unary } ;
//! unary      = "-" , unary | power ;
//! power      = atom , [ "^" , unary ] ;                    (* right associative *)
//! atom       = number | variable | call | "(" , expr , ")" ;
//! call       = ident , "(" , [ expr , { "," , expr } ] , ")" ;
//! variable   = "x" , digits ;                              (* x0, x1, ... *)
//! number     = digits , [ "." , digits ] , [ ( "e" | "E" ) , [ "+" | "-" ] , digits ] ;
//! ```
//!
//! Precedence, tightest first: `^` (right associative), unary `-`, `*` `/`,
//! `+` `-`, comparisons. Comparisons are only legal as the argument of
//! `indicator`. Built-in functions: `sin`, `cos`, `exp`, `log`, `abs`,
//! `atan`, `sqrt` (one argument), `min`, `max` (two arguments), `norm2`,
//! `normInf` (one or more arguments), `indicator` (one comparison).
//!
//! Evaluation follows IEEE-754 double semantics except that division by zero
//! and `log` of a non-positive argument are reported as [`EvalError`] rather
//! than silently producing infinities.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Atan,
    Sqrt,
    Min,
    Max,
    Norm2,
    NormInf,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Atan => "atan",
            Func::Sqrt => "sqrt",
            Func::Min => "min",
            Func::Max => "max",
            Func::Norm2 => "norm2",
            Func::NormInf => "normInf",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "abs" => Some(Func::Abs),
            "atan" => Some(Func::Atan),
            "sqrt" => Some(Func::Sqrt),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            "norm2" => Some(Func::Norm2),
            "normInf" => Some(Func::NormInf),
            _ => None,
        }
    }

    /// (min, max) permitted argument count; `usize::MAX` for unbounded.
    fn arity(self) -> (usize, usize) {
        match self {
            Func::Sin | Func::Cos | Func::Exp | Func::Log | Func::Abs | Func::Atan
            | Func::Sqrt => (1, 1),
            Func::Min | Func::Max => (2, 2),
            Func::Norm2 | Func::NormInf => (1, usize::MAX),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(f64),
    /// Variable `x{index}`.
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    Indicator(Box<Comparison>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    Arity,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{kind:?} at line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("log of non-positive value {0}")]
    LogNonPositive(f64),
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '0'..='9' | '.' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || d == '.' {
                        s.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                if let Some(&e) = chars.peek() {
                    if e == 'e' || e == 'E' {
                        let mut look = chars.clone();
                        look.next();
                        let sign = matches!(look.peek(), Some('+') | Some('-'));
                        if sign {
                            look.next();
                        }
                        if matches!(look.peek(), Some(d) if d.is_ascii_digit()) {
                            s.push(bump(&mut chars));
                            if sign {
                                s.push(bump(&mut chars));
                            }
                            while matches!(chars.peek(), Some(d) if d.is_ascii_digit()) {
                                s.push(bump(&mut chars));
                            }
                        }
                    }
                }
                let v: f64 = s.parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::Syntax,
                    line: tline,
                    col: tcol,
                    msg: format!("malformed number `{s}`"),
                })?;
                out.push(Spanned { tok: Tok::Num(v), line: tline, col: tcol });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(s), line: tline, col: tcol });
            }
            '<' | '>' => {
                bump(&mut chars);
                let eq = matches!(chars.peek(), Some('='));
                if eq {
                    bump(&mut chars);
                }
                let tok = match (c, eq) {
                    ('<', false) => Tok::Lt,
                    ('<', true) => Tok::Le,
                    ('>', false) => Tok::Gt,
                    _ => Tok::Ge,
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | ',' => {
                bump(&mut chars);
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => Tok::Comma,
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax,
                    line: tline,
                    col: tcol,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind, msg: impl Into<String>) -> ParseError {
        let s = self.peek();
        ParseError { kind, line: s.line, col: s.col, msg: msg.into() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Syntax, format!("expected {what}")))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.next();
            let rhs = self.product()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            self.next();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().tok.clone() {
            Tok::Num(v) => {
                self.next();
                Ok(Expr::Lit(v))
            }
            Tok::LParen => {
                self.next();
                let e = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.err(ParseErrorKind::UnknownIdentifier, "");
                self.next();
                if self.peek().tok == Tok::LParen {
                    self.call(&name)
                } else if let Some(idx) = parse_var(&name) {
                    if idx >= self.dim {
                        Err(ParseError {
                            kind: ParseErrorKind::UnknownIdentifier,
                            msg: format!(
                                "variable `{name}` exceeds the declared dimension {}",
                                self.dim
                            ),
                            ..at
                        })
                    } else {
                        Ok(Expr::Var(idx))
                    }
                } else {
                    Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier,
                        msg: format!("unknown identifier `{name}`"),
                        ..at
                    })
                }
            }
            _ => Err(self.err(ParseErrorKind::Syntax, "expected a number, variable, call or `(`")),
        }
    }

    fn call(&mut self, name: &str) -> Result<Expr, ParseError> {
        let at_name = ParseError {
            kind: ParseErrorKind::UnknownIdentifier,
            line: self.peek().line,
            col: self.peek().col,
            msg: String::new(),
        };
        self.expect(Tok::LParen, "`(`")?;
        if name == "indicator" {
            let cmp = self.comparison()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::Indicator(Box::new(cmp)));
        }
        let func = Func::from_name(name).ok_or_else(|| ParseError {
            msg: format!("unknown function `{name}`"),
            ..at_name.clone()
        })?;
        let mut args = Vec::new();
        if self.peek().tok != Tok::RParen {
            args.push(self.sum()?);
            while self.peek().tok == Tok::Comma {
                self.next();
                args.push(self.sum()?);
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        let (lo, hi) = func.arity();
        if args.len() < lo || args.len() > hi {
            let want = if lo == hi {
                format!("{lo}")
            } else if hi == usize::MAX {
                format!("at least {lo}")
            } else {
                format!("{lo}..={hi}")
            };
            return Err(ParseError {
                kind: ParseErrorKind::Arity,
                msg: format!("`{name}` takes {want} argument(s), got {}", args.len()),
                ..at_name
            });
        }
        Ok(Expr::Call(func, args))
    }

    fn comparison(&mut self) -> Result<Comparison, ParseError> {
        let lhs = self.sum()?;
        let op = match self.peek().tok {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => {
                return Err(self.err(
                    ParseErrorKind::Syntax,
                    "`indicator` expects a comparison like `indicator(x0 <= 1)`",
                ))
            }
        };
        self.next();
        let rhs = self.sum()?;
        Ok(Comparison { lhs, op, rhs })
    }
}

fn parse_var(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parse `src` as a scalar expression in the variables `x0..x{dim-1}`.
pub fn parse(src: &str, dim: usize) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, dim };
    let e = p.sum()?;
    match p.peek().tok {
        Tok::Eof => Ok(e),
        Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge => Err(p.err(
            ParseErrorKind::Syntax,
            "comparisons are only allowed inside indicator(...)",
        )),
        _ => Err(p.err(ParseErrorKind::Syntax, "trailing input after expression")),
    }
}

// ---------------------------------------------------------------------------
// Evaluation

impl Expr {
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        match self {
            Expr::Lit(v) => Ok(*v),
            Expr::Var(i) => Ok(x[*i]),
            Expr::Neg(e) => Ok(-e.eval(x)?),
            Expr::Bin(op, a, b) => {
                let a = a.eval(x)?;
                let b = b.eval(x)?;
                Ok(match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                })
            }
            Expr::Call(f, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(a.eval(x)?);
                }
                Ok(match f {
                    Func::Sin => vals[0].sin(),
                    Func::Cos => vals[0].cos(),
                    Func::Exp => vals[0].exp(),
                    Func::Log => {
                        if vals[0] <= 0.0 {
                            return Err(EvalError::LogNonPositive(vals[0]));
                        }
                        vals[0].ln()
                    }
                    Func::Abs => vals[0].abs(),
                    Func::Atan => vals[0].atan(),
                    Func::Sqrt => vals[0].sqrt(),
                    Func::Min => vals[0].min(vals[1]),
                    Func::Max => vals[0].max(vals[1]),
                    Func::Norm2 => vals.iter().map(|v| v * v).sum::<f64>().sqrt(),
                    Func::NormInf => vals.iter().fold(0.0f64, |m, v| m.max(v.abs())),
                })
            }
            Expr::Indicator(cmp) => {
                let a = cmp.lhs.eval(x)?;
                let b = cmp.rhs.eval(x)?;
                let hold = match cmp.op {
                    CmpOp::Lt => a < b,
                    CmpOp::Le => a <= b,
                    CmpOp::Gt => a > b,
                    CmpOp::Ge => a >= b,
                };
                Ok(if hold { 1.0 } else { 0.0 })
            }
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Lit(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) => e.max_var(),
            Expr::Bin(_, a, b) => opt_max(a.max_var(), b.max_var()),
            Expr::Call(_, args) => args.iter().filter_map(|a| a.max_var()).max(),
            Expr::Indicator(cmp) => opt_max(cmp.lhs.max_var(), cmp.rhs.max_var()),
        }
    }
}

fn opt_max(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (x, None) | (None, x) => x,
    }
}

// ---------------------------------------------------------------------------
// Pretty printing
//
// The printer is canonical: pretty-printing, parsing the result, and
// pretty-printing again reproduces the same string.

impl Expr {
    // Effective precedence of the printed form: comparisons 0, +/- 1, * and /
    // 2, unary minus 3, ^ 4, atoms 5. Negative literals print with a leading
    // minus, so they count as unary.
    fn prec(&self) -> u8 {
        match self {
            Expr::Lit(v) if v.is_sign_negative() => 3,
            Expr::Lit(_) | Expr::Var(_) | Expr::Call(..) | Expr::Indicator(_) => 5,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Bin(BinOp::Pow, ..) => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min {
            write!(f, "(")?;
        }
        match self {
            Expr::Lit(v) => write!(f, "{v}")?,
            Expr::Var(i) => write!(f, "x{i}")?,
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_prec(f, 3)?;
            }
            Expr::Bin(op, a, b) => {
                let (sym, lp, rp) = match op {
                    BinOp::Add => ("+", 1, 2),
                    BinOp::Sub => ("-", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    BinOp::Pow => ("^", 5, 3),
                };
                a.fmt_prec(f, lp)?;
                write!(f, "{sym}")?;
                b.fmt_prec(f, rp)?;
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    a.fmt_prec(f, 0)?;
                }
                write!(f, ")")?;
            }
            Expr::Indicator(cmp) => {
                let sym = match cmp.op {
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                };
                write!(f, "indicator(")?;
                cmp.lhs.fmt_prec(f, 1)?;
                write!(f, "{sym}")?;
                cmp.rhs.fmt_prec(f, 1)?;
                write!(f, ")")?;
            }
        }
        if p < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
