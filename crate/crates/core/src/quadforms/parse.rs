//! Text syntax for forms.
//!
//! ```text
//! form    := summand ('+' summand)*
//! summand := factor ('*' factor)*
//! factor  := 'Q[' e ',' e ']'          a[1,b]
//!          | 'Q[' e ';' e ';' e ']'    aX² + cXY + bY²  (order a; c; b)
//!          | '[' e ',' e ']'           aX² + XY + bY²
//!          | '<' e (',' e)* '>'        totally singular diagonal part
//!          | 'B<' e (',' e)* '>'       diagonal bilinear form
//!          | 'Pf<<' e,... ';' e ']]'   quadratic Pfister form
//!          | 'Pf<<' e,... '>>'         bilinear Pfister form
//!          | '(' form ')' | '0'
//!          | element                   scalar
//! ```
//! Element sub-expressions may not contain `+` at the top level of a
//! summand unless parenthesized: `(x+1)*[1,b]`.

use crate::fields::{Element, FieldTower};

use super::{BilinForm, FormError, QuadForm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedForm {
    Quad(QuadForm),
    Bilin(BilinForm),
}

enum Factor {
    Scalar(Element),
    Quad(QuadForm),
    Bilin(BilinForm),
}

struct Ctx<'a> {
    tower: &'a FieldTower,
    level: usize,
}

fn perr(pos: usize, msg: impl Into<String>) -> FormError {
    FormError::Parse { pos, msg: msg.into() }
}

/// Splits `s` at top-level occurrences of `sep`, returning (offset, piece).
fn split_top(s: &str, sep: char) -> Result<Vec<(usize, &str)>, FormError> {
    let mut depth: i32 = 0;
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '<' => depth += 1,
            ')' | ']' | '>' => {
                depth -= 1;
                if depth < 0 {
                    return Err(perr(i, format!("unbalanced `{c}`")));
                }
            }
            _ if c == sep && depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(perr(s.len(), "unbalanced brackets"));
    }
    out.push((start, &s[start..]));
    Ok(out)
}

impl Ctx<'_> {
    fn element(&self, off: usize, s: &str) -> Result<Element, FormError> {
        if s.trim().is_empty() {
            return Err(perr(off, "missing element"));
        }
        self.tower.parse_at(s, self.level).map_err(|e| match e {
            crate::fields::FieldError::Syntax { pos, msg } => perr(off + pos, msg),
            other => FormError::Field(other),
        })
    }

    fn elements(&self, off: usize, s: &str, sep: char) -> Result<Vec<Element>, FormError> {
        split_top(s, sep)?.into_iter().map(|(o, p)| self.element(off + o, p)).collect()
    }

    fn form(&self, off: usize, s: &str) -> Result<ParsedForm, FormError> {
        let mut acc: Option<ParsedForm> = None;
        for (o, piece) in split_top(s, '+')? {
            let next = self.summand(off + o, piece)?;
            acc = Some(match (acc, next) {
                (None, n) => n,
                (Some(ParsedForm::Quad(a)), ParsedForm::Quad(b)) => ParsedForm::Quad(a.orth_sum(&b)?),
                (Some(ParsedForm::Bilin(a)), ParsedForm::Bilin(b)) => ParsedForm::Bilin(a.orth_sum(&b)?),
                _ => return Err(perr(off + o, "cannot add a bilinear and a quadratic form")),
            });
        }
        acc.ok_or_else(|| perr(off, "empty form"))
    }

    fn summand(&self, off: usize, s: &str) -> Result<ParsedForm, FormError> {
        let factors = split_top(s, '*')?;
        // element factors are glued back together so that `x^-3*(y+1)` stays one scalar
        let mut scalar_text: Option<(usize, String)> = None;
        let mut items: Vec<Factor> = Vec::new();
        for (o, piece) in factors {
            let t = piece.trim();
            if is_form_factor(t) {
                if let Some((so, st)) = scalar_text.take() {
                    items.push(Factor::Scalar(self.element(so, &st)?));
                }
                let lead = piece.len() - piece.trim_start().len();
                items.push(self.factor(off + o + lead, t)?);
            } else {
                match &mut scalar_text {
                    Some((_, st)) => {
                        st.push('*');
                        st.push_str(piece);
                    }
                    None => scalar_text = Some((off + o, piece.to_string())),
                }
            }
        }
        if let Some((so, st)) = scalar_text.take() {
            items.push(Factor::Scalar(self.element(so, &st)?));
        }
        let mut scalar: Option<Element> = None;
        let mut bil: Option<BilinForm> = None;
        let mut quad: Option<QuadForm> = None;
        for it in items {
            match it {
                Factor::Scalar(e) => scalar = Some(scalar.map_or(e.clone(), |s| s.mul(&e))),
                Factor::Bilin(b) => bil = Some(match bil { None => b, Some(c) => c.tensor(&b)? }),
                Factor::Quad(q) => {
                    if quad.is_some() {
                        return Err(perr(off, "product of two quadratic forms is not defined"));
                    }
                    quad = Some(q)
                }
            }
        }
        match (quad, bil, scalar) {
            (Some(q), b, s) => {
                let mut q = q;
                if let Some(b) = b {
                    q = q.tensor(&b)?;
                }
                if let Some(s) = s {
                    q = q.scale(&s)?;
                }
                Ok(ParsedForm::Quad(q))
            }
            (None, Some(b), s) => {
                let b = match s {
                    Some(s) => BilinForm::new(b.entries.iter().map(|e| e.mul(&s)).collect(), b.level)?,
                    None => b,
                };
                Ok(ParsedForm::Bilin(b))
            }
            (None, None, Some(s)) if s.is_zero() => Ok(ParsedForm::Quad(QuadForm::zero(self.level))),
            _ => Err(perr(off, "expected a form")),
        }
    }

    fn factor(&self, off: usize, t: &str) -> Result<Factor, FormError> {
        let (tw, lv) = (self.tower, self.level);
        if let Some(inner) = t.strip_prefix("Q[").and_then(|r| r.strip_suffix(']')) {
            let parts = split_top(inner, ';')?;
            if parts.len() == 3 {
                let e: Vec<Element> =
                    parts.iter().map(|(o, p)| self.element(off + 2 + o, p)).collect::<Result<_, _>>()?;
                return Ok(Factor::Quad(QuadForm::triple(tw, e[0].clone(), e[1].clone(), e[2].clone(), lv)?));
            }
            let e = self.elements(off + 2, inner, ',')?;
            if e.len() != 2 {
                return Err(perr(off, "Q[a,b] takes two entries"));
            }
            if e[0].is_zero() && e[1].is_zero() {
                return Ok(Factor::Quad(QuadForm::hyperbolic(tw, 1, lv)));
            }
            return Ok(Factor::Quad(QuadForm::binary(e[0].clone(), e[1].clone(), lv)?));
        }
        if let Some(inner) = t.strip_prefix("Pf<<") {
            if let Some(body) = inner.strip_suffix("]]") {
                let parts = split_top(body, ';')?;
                let [(so, slots), (bo, b)] = parts.as_slice() else {
                    return Err(perr(off, "expected Pf<<a1,...;b]]"));
                };
                let slots = if slots.trim().is_empty() { Vec::new() } else { self.elements(off + 4 + so, slots, ',')? };
                let b = self.element(off + 4 + bo, b)?;
                return Ok(Factor::Quad(QuadForm::pfister(tw, &slots, b, lv)?));
            }
            if let Some(body) = inner.strip_suffix(">>") {
                let slots = self.elements(off + 4, body, ',')?;
                return Ok(Factor::Bilin(BilinForm::pfister(tw, &slots, lv)?));
            }
            return Err(perr(off, "unterminated Pfister form"));
        }
        if let Some(inner) = t.strip_prefix("B<").and_then(|r| r.strip_suffix('>')) {
            return Ok(Factor::Bilin(BilinForm::new(self.elements(off + 2, inner, ',')?, lv)?));
        }
        if let Some(inner) = t.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
            return Ok(Factor::Quad(QuadForm::new(Vec::new(), self.elements(off + 1, inner, ',')?, lv)?));
        }
        if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let e = self.elements(off + 1, inner, ',')?;
            if e.len() != 2 {
                return Err(perr(off, "[a,b] takes two entries"));
            }
            return Ok(Factor::Quad(QuadForm::bracket(tw, e[0].clone(), e[1].clone(), lv)?));
        }
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            return Ok(match self.form(off + 1, inner)? {
                ParsedForm::Quad(q) => Factor::Quad(q),
                ParsedForm::Bilin(b) => Factor::Bilin(b),
            });
        }
        Err(perr(off, format!("unrecognized form `{t}`")))
    }
}

/// A factor is a form (rather than a scalar) iff it contains a bracket of
/// form syntax; element expressions never use `[` or `<`.
fn is_form_factor(t: &str) -> bool {
    t.contains('[') || t.contains('<')
}

/// Parses a quadratic or bilinear form at tower level `level`.
pub fn parse_form(text: &str, tower: &FieldTower, level: usize) -> Result<ParsedForm, FormError> {
    Ctx { tower, level }.form(0, text)
}

/// Parses text that must denote a quadratic form.
pub fn parse_quad(text: &str, tower: &FieldTower, level: usize) -> Result<QuadForm, FormError> {
    match parse_form(text, tower, level)? {
        ParsedForm::Quad(q) => Ok(q),
        ParsedForm::Bilin(_) => Err(perr(0, "expected a quadratic form, found a bilinear form")),
    }
}

pub fn parse_bilin(text: &str, tower: &FieldTower, level: usize) -> Result<BilinForm, FormError> {
    match parse_form(text, tower, level)? {
        ParsedForm::Bilin(b) => Ok(b),
        ParsedForm::Quad(_) => Err(perr(0, "expected a bilinear form, found a quadratic form")),
    }
}
