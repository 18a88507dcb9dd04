//! Text syntax for field elements.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ['-'] atom ('^' exponent)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//! Identifiers are the tower's variables, `w` for the generator of the base
//! finite field, and the extension generators (`A1`, `A2`, ...).

use super::{Element, FieldError, FiniteField, Poly, RatFun};

pub const DEFAULT_VARS: [&str; 4] = ["x", "y", "z", "t"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    Sym(String),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(u64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, FieldError> {
    let mut out = Vec::new();
    let b: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = b[start..i].iter().collect();
            let v = s.parse().map_err(|_| FieldError::Syntax { pos: start, msg: "integer too large".into() })?;
            out.push((start, Tok::Int(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(b[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(FieldError::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
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
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T, FieldError> {
        Err(FieldError::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, FieldError> {
        let mut lhs = self.term()?;
        while self.eat('+') || self.eat('-') {
            let rhs = self.term()?;
            lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, FieldError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, FieldError> {
        // negation is the identity in characteristic 2
        while self.eat('-') {}
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, FieldError> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let v = match self.peek() {
            Some(Tok::Int(v)) => *v,
            _ => return self.err("expected integer exponent"),
        };
        self.pos += 1;
        if paren && !self.eat(')') {
            return self.err("expected `)`");
        }
        let v = i64::try_from(v).map_err(|_| FieldError::ExponentOverflow)?;
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<Expr, FieldError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Expr::Int(v))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Sym(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            _ => self.err("expected a number, symbol or `(`"),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, FieldError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

fn coeff_str(f: FiniteField, c: u32) -> String {
    let s = f.format(c);
    if s.contains('+') {
        format!("({s})")
    } else {
        s
    }
}

/// Formats one monomial term with signed exponents.
fn term_str(f: FiniteField, exps: &[i64], c: u32, vars: &[&str]) -> String {
    let mut parts = Vec::new();
    if c != 1 || exps.iter().all(|&e| e == 0) {
        parts.push(coeff_str(f, c));
    }
    for (v, &e) in exps.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars[v].to_string()),
            _ => parts.push(format!("{}^{e}", vars[v])),
        }
    }
    parts.join("*")
}

pub fn format_poly(p: &Poly, vars: &[&str]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let f = p.field();
    p.terms()
        .iter()
        .map(|(m, c)| term_str(f, &m.0.map(|e| e as i64), *c, vars))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn format_ratfun(r: &RatFun, vars: &[&str]) -> String {
    let den = r.den();
    if den.is_one() {
        return format_poly(r.num(), vars);
    }
    let f = r.field();
    if let [(dm, 1)] = den.terms() {
        // monomial denominator: use negative exponents
        return r
            .num()
            .terms()
            .iter()
            .map(|(m, c)| {
                let mut e = [0i64; super::MAX_VARS];
                for i in 0..super::MAX_VARS {
                    e[i] = m.0[i] as i64 - dm.0[i] as i64;
                }
                term_str(f, &e, *c, vars)
            })
            .collect::<Vec<_>>()
            .join(" + ");
    }
    format!("({})/({})", format_poly(r.num(), vars), format_poly(den, vars))
}

fn has_top_level_plus(s: &str) -> bool {
    let mut depth = 0;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' if depth == 0 => return true,
            _ => {}
        }
    }
    false
}

pub fn format_element(e: &Element, vars: &[&str]) -> String {
    match e {
        Element::Base(r) => format_ratfun(r, vars),
        Element::Ext(n) => {
            let t = format_element(&n.t, vars);
            let gen = &n.step.name;
            let top = if n.t.is_one() {
                gen.clone()
            } else if has_top_level_plus(&t) {
                format!("({t})*{gen}")
            } else {
                format!("{t}*{gen}")
            };
            if n.s.is_zero() {
                top
            } else {
                format!("{} + {top}", format_element(&n.s, vars))
            }
        }
    }
}
