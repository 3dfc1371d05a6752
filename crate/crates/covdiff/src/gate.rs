//! Coverage-ratchet gate: pass/fail criteria over category totals.
//!
//! The canonical ratchet is `UNC+UIC+LBC == 0` — no new, included, or
//! previously-covered code may be untested — optionally combined with
//! failing any run that executed pragma-excluded code.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::Category;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GateError {
    #[error("invalid gate criteria at offset {offset}: {reason}")]
    BadCriteria { offset: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparator {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "<=")]
    Le,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Eq => "==",
            Comparator::Le => "<=",
        })
    }
}

/// One clause: the sum over a category set compared against a bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub categories: Vec<Category>,
    pub comparator: Comparator,
    pub bound: u64,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.categories.iter().map(|c| c.name()).collect();
        write!(f, "{} {} {}", names.join("+"), self.comparator, self.bound)
    }
}

impl Constraint {
    pub fn holds(&self, actual: u64) -> bool {
        match self.comparator {
            Comparator::Eq => actual == self.bound,
            Comparator::Le => actual <= self.bound,
        }
    }
}

/// Declarative gate configuration: all clauses must hold, and optionally no
/// excluded code may have been executed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateCriteria {
    pub constraints: Vec<Constraint>,
    pub fail_on_excluded_hit: bool,
}

impl Default for GateCriteria {
    /// The canonical ratchet: `UNC+UIC+LBC == 0`, excluded hits fail.
    fn default() -> GateCriteria {
        GateCriteria {
            constraints: vec![Constraint {
                categories: vec![Category::Unc, Category::Uic, Category::Lbc],
                comparator: Comparator::Eq,
                bound: 0,
            }],
            fail_on_excluded_hit: true,
        }
    }
}

/// A coverpoint that was executed despite being excluded by a pragma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExcludedHit {
    pub path: String,
    pub line: u32,
    pub hit_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum Violation {
    #[serde(rename = "constraint")]
    Constraint {
        clause: String,
        actual: u64,
        bound: u64,
    },
    #[serde(rename = "excluded_hit")]
    ExcludedHit { path: String, line: u32, hit_count: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Constraint { clause, actual, .. } => {
                write!(f, "{clause} violated (actual {actual})")
            }
            Violation::ExcludedHit { path, line, hit_count } => {
                write!(f, "excluded code executed at {path}:{line} ({hit_count} hits)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateVerdict {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

/// Evaluates the criteria against category totals (summed over kinds) and
/// the excluded-hit list.
pub fn evaluate_gate(
    totals: &BTreeMap<Category, u64>,
    excluded_hits: &[ExcludedHit],
    criteria: &GateCriteria,
) -> GateVerdict {
    let mut violations = Vec::new();
    for constraint in &criteria.constraints {
        let actual: u64 = constraint
            .categories
            .iter()
            .map(|c| totals.get(c).copied().unwrap_or(0))
            .sum();
        if !constraint.holds(actual) {
            violations.push(Violation::Constraint {
                clause: constraint.to_string(),
                actual,
                bound: constraint.bound,
            });
        }
    }
    if criteria.fail_on_excluded_hit {
        for hit in excluded_hits {
            violations.push(Violation::ExcludedHit {
                path: hit.path.clone(),
                line: hit.line,
                hit_count: hit.hit_count,
            });
        }
    }
    GateVerdict { passed: violations.is_empty(), violations }
}

/// Parses the criteria grammar: comma-separated clauses
/// `CAT[+CAT...] (==|<=) INT`, category names case-insensitive. Whitespace
/// around tokens is ignored. `fail_on_excluded_hit` defaults to true.
pub fn parse_criteria(text: &str) -> Result<GateCriteria, GateError> {
    let mut constraints = Vec::new();
    let mut offset = 0usize;
    for clause in text.split(',') {
        let clause_offset = offset;
        offset += clause.len() + 1;
        if clause.trim().is_empty() {
            return Err(GateError::BadCriteria {
                offset: clause_offset,
                reason: "empty clause".to_string(),
            });
        }
        constraints.push(parse_clause(clause, clause_offset)?);
    }
    if constraints.is_empty() {
        return Err(GateError::BadCriteria { offset: 0, reason: "no clauses".to_string() });
    }
    Ok(GateCriteria { constraints, fail_on_excluded_hit: true })
}

fn parse_clause(clause: &str, clause_offset: usize) -> Result<Constraint, GateError> {
    let (cats_text, comparator, bound_text) = if let Some((l, r)) = clause.split_once("==") {
        (l, Comparator::Eq, r)
    } else if let Some((l, r)) = clause.split_once("<=") {
        (l, Comparator::Le, r)
    } else {
        return Err(GateError::BadCriteria {
            offset: clause_offset,
            reason: format!("clause {:?} has no '==' or '<=' comparator", clause.trim()),
        });
    };

    let mut categories = Vec::new();
    for name in cats_text.split('+') {
        let name = name.trim();
        let category = Category::parse(name).ok_or_else(|| GateError::BadCriteria {
            offset: clause_offset,
            reason: format!("unknown category {name:?}"),
        })?;
        categories.push(category);
    }
    let bound: u64 = bound_text.trim().parse().map_err(|_| GateError::BadCriteria {
        offset: clause_offset,
        reason: format!("bad bound {:?}", bound_text.trim()),
    })?;
    Ok(Constraint { categories, comparator, bound })
}
