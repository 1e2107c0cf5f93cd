use std::fmt;

use serde::{Deserialize, Serialize};

/// One checked inequality `lhs <= rhs` (or `lhs < rhs` when `strict`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
    pub holds: bool,
    /// `rhs - lhs`.
    pub slack: f64,
}

impl Inequality {
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::make(name.into(), lhs, rhs, false)
    }

    pub fn lt(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::make(name.into(), lhs, rhs, true)
    }

    fn make(name: String, lhs: f64, rhs: f64, strict: bool) -> Self {
        let holds = if strict { lhs < rhs } else { lhs <= rhs };
        Inequality { name, lhs, rhs, strict, holds, slack: rhs - lhs }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.strict { "<" } else { "<=" };
        let verdict = if self.holds { "ok" } else { "VIOLATED" };
        write!(f, "{}: {} {op} {} [{verdict}]", self.name, self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub title: String,
    pub inequalities: Vec<Inequality>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(title: impl Into<String>) -> Self {
        BoundReport { title: title.into(), ..Default::default() }
    }

    pub fn push(&mut self, ineq: Inequality) -> &mut Self {
        self.inequalities.push(ineq);
        self
    }

    pub fn passed(&self) -> bool {
        self.inequalities.iter().all(|i| i.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Inequality> {
        self.inequalities.iter().filter(|i| !i.holds)
    }

    pub fn get(&self, name: &str) -> Option<&Inequality> {
        self.inequalities.iter().find(|i| i.name == name)
    }
}
