//! Three-valued verdicts for semi-decidable predicates.

use std::fmt;

use serde::Serialize;

/// Outcome of a semi-decision procedure. `Proven` and `Refuted` always carry
/// data that can be re-checked independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriState<P, R = String> {
    Proven(P),
    Refuted(R),
    Unknown(String),
}

/// Verdict label without payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proven,
    Refuted,
    Unknown,
    Assumed,
}

impl<P, R> TriState<P, R> {
    pub fn status(&self) -> Status {
        match self {
            TriState::Proven(_) => Status::Proven,
            TriState::Refuted(_) => Status::Refuted,
            TriState::Unknown(_) => Status::Unknown,
        }
    }

    pub fn is_proven(&self) -> bool {
        matches!(self, TriState::Proven(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, TriState::Refuted(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, TriState::Unknown(_))
    }

    pub fn proven(self) -> Option<P> {
        match self {
            TriState::Proven(p) => Some(p),
            _ => None,
        }
    }

    pub fn refuted(self) -> Option<R> {
        match self {
            TriState::Refuted(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_ref(&self) -> TriState<&P, &R> {
        match self {
            TriState::Proven(p) => TriState::Proven(p),
            TriState::Refuted(r) => TriState::Refuted(r),
            TriState::Unknown(s) => TriState::Unknown(s.clone()),
        }
    }

    pub fn map<Q>(self, f: impl FnOnce(P) -> Q) -> TriState<Q, R> {
        match self {
            TriState::Proven(p) => TriState::Proven(f(p)),
            TriState::Refuted(r) => TriState::Refuted(r),
            TriState::Unknown(s) => TriState::Unknown(s),
        }
    }

    pub fn map_refuted<S>(self, f: impl FnOnce(R) -> S) -> TriState<P, S> {
        match self {
            TriState::Proven(p) => TriState::Proven(p),
            TriState::Refuted(r) => TriState::Refuted(f(r)),
            TriState::Unknown(s) => TriState::Unknown(s),
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Proven => "proven",
            Status::Refuted => "refuted",
            Status::Unknown => "unknown",
            Status::Assumed => "assumed",
        })
    }
}
