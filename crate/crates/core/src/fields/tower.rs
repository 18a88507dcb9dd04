use std::sync::Arc;

use serde::Serialize;

use super::expr::{format_element, parse_expr, Expr};
use super::wp::{is_in_wp_image_with, WpOptions, WpVerdict};
use super::{Element, FieldError, FiniteField, QuadStep, StepKind, MAX_VARS};
use crate::tristate::Status;

/// Result of the admissibility test run when a step is adjoined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub step: String,
    pub status: Status,
    pub detail: String,
}

/// `k(x₁, …, xₙ)` followed by a chain of quadratic extensions.
#[derive(Clone, Debug)]
pub struct FieldTower {
    base: FiniteField,
    vars: Vec<String>,
    steps: Vec<Arc<QuadStep>>,
    admissibility: Vec<Admissibility>,
    wp_options: WpOptions,
}

impl FieldTower {
    pub fn new(base: FiniteField, vars: &[&str]) -> Result<FieldTower, FieldError> {
        if vars.len() > MAX_VARS {
            return Err(FieldError::Unsupported(format!("at most {MAX_VARS} variables")));
        }
        for (i, v) in vars.iter().enumerate() {
            let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || *v == "w" || vars[..i].contains(v) {
                return Err(FieldError::Unsupported(format!("invalid variable name `{v}`")));
            }
        }
        Ok(FieldTower {
            base,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            steps: Vec::new(),
            admissibility: Vec::new(),
            wp_options: WpOptions::default(),
        })
    }

    /// `GF(2^degree)(x, y)`.
    pub fn xy(degree: u32) -> Result<FieldTower, FieldError> {
        FieldTower::new(FiniteField::new(degree)?, &["x", "y"])
    }

    pub fn with_wp_options(mut self, opts: WpOptions) -> Self {
        self.wp_options = opts;
        self
    }

    pub fn base(&self) -> FiniteField {
        self.base
    }

    pub fn vars(&self) -> Vec<&str> {
        self.vars.iter().map(|s| s.as_str()).collect()
    }

    /// Number of extension steps; the top level index.
    pub fn height(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[Arc<QuadStep>] {
        &self.steps
    }

    pub fn admissibility(&self) -> &[Admissibility] {
        &self.admissibility
    }

    /// The step whose field is level `level` (`None` for level 0).
    pub fn top(&self, level: usize) -> Option<&Arc<QuadStep>> {
        level.checked_sub(1).and_then(|i| self.steps.get(i))
    }

    pub fn step(&self, index: usize) -> Result<&Arc<QuadStep>, FieldError> {
        self.top(index).ok_or(FieldError::LevelMismatch)
    }

    pub fn zero(&self) -> Element {
        Element::zero(self.base)
    }

    pub fn one(&self) -> Element {
        Element::one(self.base)
    }

    pub fn constant(&self, c: u32) -> Element {
        Element::constant(self.base, c)
    }

    pub fn var(&self, name: &str) -> Result<Element, FieldError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .map(|i| Element::var(self.base, i))
            .ok_or_else(|| FieldError::UndefinedSymbol(name.into()))
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn generator(&self, index: usize) -> Result<Element, FieldError> {
        Ok(Element::generator(self.step(index)?))
    }

    fn push_step(&mut self, kind: StepKind, a: Element) -> Result<Arc<QuadStep>, FieldError> {
        let level = self.height();
        if a.level() > level {
            return Err(FieldError::LevelMismatch);
        }
        let name = format!("A{}", level + 1);
        let top = self.top(level).cloned();
        let (status, detail) = match kind {
            StepKind::ArtinSchreier => match is_in_wp_image_with(&a, top.as_ref(), self.wp_options) {
                WpVerdict::Proven(f) => {
                    return Err(FieldError::Inadmissible(format!(
                        "{} = ℘({})",
                        self.format(&a),
                        self.format(&f)
                    )))
                }
                WpVerdict::Refuted(c) => (Status::Refuted, c.to_string()),
                WpVerdict::Unknown(m) => (Status::Unknown, m),
            },
            StepKind::Radical => match a.sqrt_in(top.as_ref()) {
                Ok(Some(r)) => {
                    return Err(FieldError::Inadmissible(format!("{} = ({})^2", self.format(&a), self.format(&r))))
                }
                Ok(None) => (Status::Refuted, "not a square".into()),
                Err(e) => (Status::Unknown, e.to_string()),
            },
        };
        let step = Arc::new(QuadStep { index: level + 1, kind, a, name: name.clone(), prev: top });
        self.steps.push(step.clone());
        self.admissibility.push(Admissibility { step: name, status, detail });
        Ok(step)
    }

    /// Adjoins a root of Y² + Y = a; fails if `a` is proven to be in ℘ of the top field.
    pub fn adjoin_artin_schreier(&mut self, a: Element) -> Result<Arc<QuadStep>, FieldError> {
        self.push_step(StepKind::ArtinSchreier, a)
    }

    /// Adjoins √a; fails if `a` is already a square.
    pub fn adjoin_radical(&mut self, a: Element) -> Result<Arc<QuadStep>, FieldError> {
        self.push_step(StepKind::Radical, a)
    }

    /// Evaluates an expression using symbols up to `level`.
    pub fn evaluate(&self, e: &Expr, level: usize) -> Result<Element, FieldError> {
        Ok(match e {
            Expr::Int(v) => self.constant((v % 2) as u32),
            Expr::Sym(s) => self.symbol(s, level)?,
            Expr::Add(a, b) => self.evaluate(a, level)?.add(&self.evaluate(b, level)?),
            Expr::Mul(a, b) => self.evaluate(a, level)?.mul(&self.evaluate(b, level)?),
            Expr::Div(a, b) => self.evaluate(a, level)?.div(&self.evaluate(b, level)?)?,
            Expr::Pow(a, k) => self.evaluate(a, level)?.pow(*k)?,
        })
    }

    fn symbol(&self, s: &str, level: usize) -> Result<Element, FieldError> {
        if s == "w" {
            return Ok(self.constant(self.base.generator()));
        }
        if let Some(i) = self.var_index(s) {
            return Ok(Element::var(self.base, i));
        }
        match self.steps.iter().take(level).find(|st| st.name == s) {
            Some(st) => Ok(Element::generator(st)),
            None => Err(FieldError::UndefinedSymbol(s.into())),
        }
    }

    /// Parses and evaluates an element at the top level.
    pub fn parse(&self, src: &str) -> Result<Element, FieldError> {
        self.parse_at(src, self.height())
    }

    pub fn parse_at(&self, src: &str, level: usize) -> Result<Element, FieldError> {
        self.evaluate(&parse_expr(src)?, level)
    }

    pub fn format(&self, e: &Element) -> String {
        format_element(e, &self.vars())
    }

    /// ℘-membership in the field of level `level`.
    pub fn is_in_wp(&self, e: &Element, level: usize) -> WpVerdict {
        is_in_wp_image_with(e, self.top(level), self.wp_options)
    }

    pub fn sqrt(&self, e: &Element, level: usize) -> Result<Option<Element>, FieldError> {
        e.sqrt_in(self.top(level))
    }

    /// Norm and trace from level `index` down to `index - 1`.
    pub fn norm_trace(&self, e: &Element, index: usize) -> Result<(Element, Element), FieldError> {
        e.norm_trace(self.step(index)?)
    }
}
