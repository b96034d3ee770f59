use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::{EngineError, Func, Manager, VarId};

/// Clause list in DIMACS numbering (variable `VarId(i)` is literal `i + 1`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfDocument {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    pub projection: Option<BTreeSet<VarId>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed header, expected \"p cnf <vars> <clauses>\"")]
    MalformedHeader { line: usize },
    #[error("line {line}: literal {lit} outside 1..={n_vars}")]
    LiteralOutOfRange { line: usize, lit: i64, n_vars: usize },
    #[error("last clause is not terminated by 0")]
    MissingTerminator,
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("line {line}: unexpected token {token:?}")]
    BadToken { line: usize, token: String },
}

pub fn lit_var(lit: i32) -> VarId {
    VarId(lit.unsigned_abs() - 1)
}

pub fn var_lit(v: VarId, positive: bool) -> i32 {
    let l = v.0 as i32 + 1;
    if positive {
        l
    } else {
        -l
    }
}

impl CnfDocument {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            ..Self::default()
        }
    }

    /// Evaluates the clause set under `bits` (bit `i` is variable `i`).
    pub fn eval(&self, bits: &dyn Fn(VarId) -> bool) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| bits(lit_var(l)) == (l > 0)))
    }

    /// Conjunction of the clauses; needs `m.universe() >= n_vars`.
    pub fn to_func(&self, m: &mut Manager) -> Result<Func, EngineError> {
        let mut acc = m.top();
        for c in &self.clauses {
            let mut cl = m.bot();
            for &l in c {
                let lit = m.literal(lit_var(l), l > 0)?;
                cl = m.or(cl, lit);
            }
            acc = m.and(acc, cl);
            if acc == m.bot() {
                break;
            }
        }
        Ok(acc)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p cnf {} {}", self.n_vars, self.clauses.len()).unwrap();
        if let Some(p) = &self.projection {
            out.push_str("c p show");
            for v in p {
                write!(out, " {}", v.0 + 1).unwrap();
            }
            out.push_str(" 0\n");
        }
        for c in &self.clauses {
            for l in c {
                write!(out, "{l} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }
}

pub fn cnf_to_func(doc: &CnfDocument, m: &mut Manager) -> Result<Func, EngineError> {
    doc.to_func(m)
}

/// Parses DIMACS CNF. A `c p show ... 0` comment sets the projection.
pub fn parse_dimacs(text: &str) -> Result<CnfDocument, DimacsError> {
    let mut doc: Option<CnfDocument> = None;
    let mut projection: Option<BTreeSet<VarId>> = None;
    let mut current: Vec<i32> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed == "%" {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('c') {
            if let Some(show) = rest.trim_start().strip_prefix("p show") {
                let set = projection.get_or_insert_with(BTreeSet::new);
                for tok in show.split_whitespace() {
                    let n: i64 = tok.parse().map_err(|_| DimacsError::BadToken {
                        line,
                        token: tok.to_string(),
                    })?;
                    if n == 0 {
                        break;
                    }
                    set.insert(VarId((n.unsigned_abs() - 1) as u32));
                }
            }
            continue;
        }
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", n, m] => n.parse::<usize>().ok().zip(m.parse::<usize>().ok()),
                _ => None,
            };
            match (parsed, &doc) {
                (Some((n, _)), None) => doc = Some(CnfDocument::new(n)),
                _ => return Err(DimacsError::MalformedHeader { line }),
            }
            continue;
        }
        let d = doc.as_mut().ok_or(DimacsError::MalformedHeader { line })?;
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| DimacsError::BadToken {
                line,
                token: tok.to_string(),
            })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(DimacsError::EmptyClause { line });
                }
                d.clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > d.n_vars {
                    return Err(DimacsError::LiteralOutOfRange {
                        line,
                        lit,
                        n_vars: d.n_vars,
                    });
                }
                current.push(lit as i32);
            }
        }
    }
    let mut doc = doc.ok_or(DimacsError::MalformedHeader { line: 0 })?;
    if !current.is_empty() {
        return Err(DimacsError::MissingTerminator);
    }
    if let Some(p) = &projection {
        if let Some(v) = p.iter().find(|v| v.index() >= doc.n_vars) {
            return Err(DimacsError::LiteralOutOfRange {
                line: 0,
                lit: v.0 as i64 + 1,
                n_vars: doc.n_vars,
            });
        }
    }
    doc.projection = projection;
    Ok(doc)
}
