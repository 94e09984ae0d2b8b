//! Text formats for quaternions, operators and equations.
//!
//! Operator grammar (whitespace-insensitive, case-sensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := number | symbol | '(' expr ')' | '-' factor
//! symbol := L_i | L_j | L_k | R_i | R_j | R_k
//! ```
//!
//! Adjacent basis symbols multiply without a `*`, so `L_iR_j` reads as
//! `L_i*R_j`. Equations add the central symbol `D` (optionally `D^p`) as a
//! factor of top-level terms. The Unicode minus `−` is accepted wherever `-` is.

use crate::error::{Error, Result};
use crate::operator::RealLinearOperator;
use crate::quaternion::Quaternion;

/// Left or right basis multiplication by `e_unit`, `unit ∈ {1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisSymbol {
    Left(usize),
    Right(usize),
}

impl BasisSymbol {
    pub fn to_operator(self) -> RealLinearOperator {
        match self {
            BasisSymbol::Left(mu) => RealLinearOperator::left(mu),
            BasisSymbol::Right(nu) => RealLinearOperator::right(nu),
        }
    }
}

/// Parsed operator expression.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorExpr {
    Constant(f64),
    Symbol(BasisSymbol),
    /// `D^p`; only produced by [`parse_ode`].
    Derivative(u32),
    Sum(Box<OperatorExpr>, Box<OperatorExpr>),
    Difference(Box<OperatorExpr>, Box<OperatorExpr>),
    Product(Box<OperatorExpr>, Box<OperatorExpr>),
    Negation(Box<OperatorExpr>),
    Group(Box<OperatorExpr>),
}

impl OperatorExpr {
    /// Evaluates the tree. `D` lowers to the identity; callers that care
    /// about derivative powers use [`derivative_power`](Self::derivative_power).
    pub fn lower(&self) -> RealLinearOperator {
        match self {
            OperatorExpr::Constant(c) => RealLinearOperator::scalar(*c),
            OperatorExpr::Symbol(s) => s.to_operator(),
            OperatorExpr::Derivative(_) => RealLinearOperator::identity(),
            OperatorExpr::Sum(a, b) => a.lower() + b.lower(),
            OperatorExpr::Difference(a, b) => a.lower() - b.lower(),
            OperatorExpr::Product(a, b) => a.lower().compose(&b.lower()),
            OperatorExpr::Negation(a) => -a.lower(),
            OperatorExpr::Group(a) => a.lower(),
        }
    }

    /// Total power of `D` in a product term.
    fn derivative_power(&self) -> u32 {
        match self {
            OperatorExpr::Derivative(p) => *p,
            OperatorExpr::Product(a, b) => a.derivative_power() + b.derivative_power(),
            OperatorExpr::Negation(a) | OperatorExpr::Group(a) => a.derivative_power(),
            _ => 0,
        }
    }

    /// Splits a top-level sum into signed terms.
    fn signed_terms(&self, negate: bool, out: &mut Vec<(bool, OperatorExpr)>) {
        match self {
            OperatorExpr::Sum(a, b) => {
                a.signed_terms(negate, out);
                b.signed_terms(negate, out);
            }
            OperatorExpr::Difference(a, b) => {
                a.signed_terms(negate, out);
                b.signed_terms(!negate, out);
            }
            other => out.push((negate, other.clone())),
        }
    }
}

/// Monic equation `D^n + Σ_p c_p D^p` as written.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeExpr {
    pub order: usize,
    /// Written coefficient of `D^p` for `p < order`.
    pub written: Vec<RealLinearOperator>,
}

impl OdeExpr {
    /// Coefficients `a^(p)` of `D^n y = Σ a^(p) D^p y`, i.e. `−c_p`.
    pub fn coefficients(&self) -> Vec<RealLinearOperator> {
        self.written.iter().map(|c| -*c + RealLinearOperator::zero()).collect()
    }
}

/// Prints `D^n − a^(n−1)·D^(n−1) − … − a^(0)` in a form [`parse_ode`]
/// reads back. Zero coefficients are omitted.
pub fn format_ode(coefficients: &[RealLinearOperator]) -> String {
    let n = coefficients.len();
    let power = |p: usize| match p {
        1 => "D".to_string(),
        p => format!("D^{p}"),
    };
    let mut s = power(n);
    for p in (0..n).rev() {
        let a = &coefficients[p];
        if a.is_zero() {
            continue;
        }
        let text = a.to_string();
        if text.contains(' ') || text.starts_with('-') {
            s.push_str(&format!(" - ({text})"));
        } else {
            s.push_str(&format!(" - {text}"));
        }
        if p > 0 {
            s.push('*');
            s.push_str(&power(p));
        }
    }
    s
}

pub fn parse_operator(src: &str) -> Result<RealLinearOperator> {
    Ok(parse_operator_expr(src)?.lower())
}

pub fn parse_operator_expr(src: &str) -> Result<OperatorExpr> {
    let mut p = Parser::new(src, Mode::Operator)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a monic equation such as `D^2 - L_i*R_j*D - L_j*R_i`.
pub fn parse_ode(src: &str) -> Result<OdeExpr> {
    let mut p = Parser::new(src, Mode::Ode)?;
    let e = p.expr()?;
    p.finish()?;

    let mut terms = Vec::new();
    e.signed_terms(false, &mut terms);
    let order = terms.iter().map(|(_, t)| t.derivative_power()).max().unwrap_or(0) as usize;
    if order == 0 {
        return Err(Error::Syntax {
            offset: 0,
            message: "equation has no derivative term D^n".into(),
        });
    }
    let mut per_power = vec![RealLinearOperator::zero(); order + 1];
    for (neg, t) in &terms {
        let op = t.lower();
        per_power[t.derivative_power() as usize] += if *neg { -op } else { op };
    }
    if per_power[order] != RealLinearOperator::identity() {
        return Err(Error::InvalidProblem(format!(
            "equation is not monic: D^{order} has coefficient {}",
            per_power[order]
        )));
    }
    per_power.truncate(order);
    Ok(OdeExpr { order, written: per_power })
}

/// Parses forms like `1+2i-3j+4k`, `-k` or `0.5*i`.
pub fn parse_quaternion(src: &str) -> Result<Quaternion> {
    let mut p = Parser::new(src, Mode::Quaternion)?;
    let mut q = Quaternion::ZERO;
    let mut first = true;
    loop {
        let negate = match p.peek() {
            Tok::Plus => {
                p.bump();
                false
            }
            Tok::Minus => {
                p.bump();
                true
            }
            _ if first => false,
            Tok::End => break,
            _ => return Err(p.error("expected '+' or '-'")),
        };
        first = false;
        let term = p.quaternion_term()?;
        q += if negate { -term } else { term };
        if p.peek() == Tok::End {
            break;
        }
    }
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Operator,
    Ode,
    Quaternion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Number(f64),
    Basis(BasisSymbol),
    Unit(usize),
    D,
    Caret,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

fn unit_index(c: char) -> Option<usize> {
    match c {
        'i' => Some(1),
        'j' => Some(2),
        'k' => Some(3),
        _ => None,
    }
}

fn lex(src: &str, mode: Mode) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(t) = single {
            toks.push((t, off));
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    while j < chars.len() && chars[j].1.is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let end = chars.get(i).map_or(src.len(), |c| c.0);
            let text = &src[off..end];
            let value: f64 = text.parse().map_err(|_| Error::Syntax {
                offset: off,
                message: format!("malformed number `{text}`"),
            })?;
            if !value.is_finite() {
                return Err(Error::Syntax {
                    offset: off,
                    message: format!("number `{text}` is out of range"),
                });
            }
            toks.push((Tok::Number(value), off));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            if mode != Mode::Quaternion
                && matches!(c, 'L' | 'R')
                && i + 2 < chars.len()
                && chars[i + 1].1 == '_'
            {
                if let Some(u) = unit_index(chars[i + 2].1) {
                    let sym = if c == 'L' { BasisSymbol::Left(u) } else { BasisSymbol::Right(u) };
                    toks.push((Tok::Basis(sym), off));
                    i += 3;
                    continue;
                }
            }
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let end = chars.get(i).map_or(src.len(), |c| c.0);
            let word = &src[off..end];
            let tok = match (mode, word) {
                (Mode::Ode, "D") => Tok::D,
                (Mode::Quaternion, "i" | "j" | "k") => Tok::Unit(unit_index(c).unwrap()),
                _ => {
                    return Err(Error::UnknownSymbol { offset: chars[start].0, symbol: word.to_string() })
                }
            };
            toks.push((tok, off));
            continue;
        }
        return Err(Error::Syntax { offset: off, message: format!("unexpected character `{c}`") });
    }
    toks.push((Tok::End, src.len()));
    Ok(toks)
}

impl Parser {
    fn new(src: &str, mode: Mode) -> Result<Self> {
        Ok(Parser { toks: lex(src, mode)?, pos: 0, depth: 0 })
    }

    fn peek(&self) -> Tok {
        self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> Error {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            t => format!("{t:?}"),
        };
        Error::Syntax { offset: self.offset(), message: format!("{message}, found {found}") }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Tok::End => Ok(()),
            Tok::RParen => Err(self.error("unbalanced ')'")),
            _ => Err(self.error("expected '+', '-', '*' or end of input")),
        }
    }

    fn expr(&mut self) -> Result<OperatorExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = OperatorExpr::Sum(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = OperatorExpr::Difference(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<OperatorExpr> {
        let mut lhs = self.factor()?;
        loop {
            let implicit = matches!(self.toks[self.pos - 1].0, Tok::Basis(_))
                && matches!(self.peek(), Tok::Basis(_));
            if self.peek() == Tok::Star {
                self.bump();
            } else if !implicit {
                return Ok(lhs);
            }
            lhs = OperatorExpr::Product(Box::new(lhs), Box::new(self.factor()?));
        }
    }

    fn factor(&mut self) -> Result<OperatorExpr> {
        let off = self.offset();
        if !matches!(self.peek(), Tok::Number(_) | Tok::Basis(_) | Tok::Minus | Tok::LParen | Tok::D) {
            return Err(self.error("expected a number, symbol, '(' or '-'"));
        }
        match self.bump() {
            Tok::Number(v) => Ok(OperatorExpr::Constant(v)),
            Tok::Basis(s) => Ok(OperatorExpr::Symbol(s)),
            Tok::Minus => Ok(OperatorExpr::Negation(Box::new(self.factor()?))),
            Tok::LParen => {
                self.depth += 1;
                let inner = self.expr()?;
                self.depth -= 1;
                if self.peek() != Tok::RParen {
                    return Err(self.error("expected ')'"));
                }
                self.bump();
                Ok(OperatorExpr::Group(Box::new(inner)))
            }
            Tok::D if self.depth > 0 => Err(Error::Syntax {
                offset: off,
                message: "D may not appear inside a parenthesized operator factor".into(),
            }),
            Tok::D => {
                if self.peek() != Tok::Caret {
                    return Ok(OperatorExpr::Derivative(1));
                }
                self.bump();
                match self.peek() {
                    Tok::Number(v) if v.fract() == 0.0 && (0.0..=64.0).contains(&v) => {
                        self.bump();
                        Ok(OperatorExpr::Derivative(v as u32))
                    }
                    _ => Err(self.error("expected an integer power 0..=64 after '^'")),
                }
            }
            _ => unreachable!(),
        }
    }

    /// `number ['*'] [unit] | unit`
    fn quaternion_term(&mut self) -> Result<Quaternion> {
        match self.peek() {
            Tok::Number(v) => {
                self.bump();
                let starred = self.peek() == Tok::Star;
                if starred {
                    self.bump();
                }
                match self.peek() {
                    Tok::Unit(u) => {
                        self.bump();
                        Ok(Quaternion::basis(u) * v)
                    }
                    _ if starred => Err(self.error("expected i, j or k after '*'")),
                    _ => Ok(Quaternion::real(v)),
                }
            }
            Tok::Unit(u) => {
                self.bump();
                Ok(Quaternion::basis(u))
            }
            _ => Err(self.error("expected a number or one of i, j, k")),
        }
    }
}
