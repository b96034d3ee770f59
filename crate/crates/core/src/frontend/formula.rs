use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::engine::{EngineError, Func, Manager, VarId};

/// Propositional formula over [`VarId`]s.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Var(VarId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(v: VarId) -> Self {
        Formula::Var(v)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Formula, b: Formula) -> Self {
        Formula::Xor(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Variables occurring syntactically.
    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(v) => {
                out.insert(*v);
            }
            Formula::Not(a) => a.collect_vars(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Xor(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Replaces each variable `v` by `sub(v)` (or keeps it on `None`).
    pub fn substitute(&self, sub: &dyn Fn(VarId) -> Option<Formula>) -> Formula {
        let rec = |a: &Formula| Box::new(a.substitute(sub));
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Var(v) => sub(*v).unwrap_or(Formula::Var(*v)),
            Formula::Not(a) => Formula::Not(rec(a)),
            Formula::And(a, b) => Formula::And(rec(a), rec(b)),
            Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
            Formula::Xor(a, b) => Formula::Xor(rec(a), rec(b)),
            Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
            Formula::Iff(a, b) => Formula::Iff(rec(a), rec(b)),
        }
    }

    /// Syntactic restriction `φ[x/bit]`, no simplification.
    pub fn restrict(&self, x: VarId, bit: bool) -> Formula {
        self.substitute(&|v| (v == x).then_some(Formula::Const(bit)))
    }

    /// Syntactic derivative `φ[x/1] ⊕ φ[x/0]`.
    pub fn derivative(&self, x: VarId) -> Formula {
        Formula::xor(self.restrict(x, true), self.restrict(x, false))
    }

    pub fn eval(&self, bits: &dyn Fn(VarId) -> bool) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(v) => bits(*v),
            Formula::Not(a) => !a.eval(bits),
            Formula::And(a, b) => a.eval(bits) && b.eval(bits),
            Formula::Or(a, b) => a.eval(bits) || b.eval(bits),
            Formula::Xor(a, b) => a.eval(bits) != b.eval(bits),
            Formula::Implies(a, b) => !a.eval(bits) || b.eval(bits),
            Formula::Iff(a, b) => a.eval(bits) == b.eval(bits),
        }
    }

    pub fn to_func(&self, m: &mut Manager) -> Result<Func, EngineError> {
        Ok(match self {
            Formula::Const(b) => m.constant(*b),
            Formula::Var(v) => m.var(*v)?,
            Formula::Not(a) => {
                let a = a.to_func(m)?;
                m.not(a)
            }
            Formula::And(a, b) => {
                let (a, b) = (a.to_func(m)?, b.to_func(m)?);
                m.and(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = (a.to_func(m)?, b.to_func(m)?);
                m.or(a, b)
            }
            Formula::Xor(a, b) => {
                let (a, b) = (a.to_func(m)?, b.to_func(m)?);
                m.xor(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (a.to_func(m)?, b.to_func(m)?);
                m.implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = (a.to_func(m)?, b.to_func(m)?);
                m.iff(a, b)
            }
        })
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Xor(..) => 3,
            Formula::Or(..) => 4,
            Formula::And(..) => 5,
            Formula::Not(_) => 6,
            Formula::Const(_) | Formula::Var(_) => 7,
        }
    }

    /// Renders with minimal parentheses using the names in `names`.
    pub fn display<'a>(&'a self, names: &'a VarMap) -> impl fmt::Display + 'a {
        Printer { f: self, names }
    }
}

pub fn formula_to_func(phi: &Formula, m: &mut Manager) -> Result<Func, EngineError> {
    phi.to_func(m)
}

struct Printer<'a> {
    f: &'a Formula,
    names: &'a VarMap,
}

impl Printer<'_> {
    fn go(&self, f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |c: &Formula, parens: bool, out: &mut fmt::Formatter<'_>| -> fmt::Result {
            if parens {
                write!(out, "(")?;
                self.go(c, out)?;
                write!(out, ")")
            } else {
                self.go(c, out)
            }
        };
        let p = f.prec();
        let (a, b, op, right_assoc) = match f {
            Formula::Const(b) => return write!(out, "{}", u8::from(*b)),
            Formula::Var(v) => return write!(out, "{}", self.names.name(*v)),
            Formula::Not(a) => {
                write!(out, "~")?;
                return child(a, a.prec() < p, out);
            }
            Formula::And(a, b) => (a, b, " & ", false),
            Formula::Or(a, b) => (a, b, " | ", false),
            Formula::Xor(a, b) => (a, b, " ^ ", false),
            Formula::Implies(a, b) => (a, b, " -> ", true),
            Formula::Iff(a, b) => (a, b, " <-> ", false),
        };
        let (lp, rp) = if right_assoc {
            (a.prec() <= p, b.prec() < p)
        } else {
            (a.prec() < p, b.prec() <= p)
        };
        child(a, lp, out)?;
        write!(out, "{op}")?;
        child(b, rp, out)
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.go(self.f, out)
    }
}

/// Injective map between variable names and [`VarId`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarMap {
    names: Vec<String>,
    index: HashMap<String, VarId>,
}

impl VarMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// `x1..xn`, the naming used for DIMACS inputs.
    pub fn numbered(n: usize) -> Self {
        let mut m = Self::new();
        for i in 1..=n {
            m.intern(&format!("x{i}"));
        }
        m
    }

    pub fn from_names<I: IntoIterator<Item = S>, S: AsRef<str>>(names: I) -> Self {
        let mut m = Self::new();
        for n in names {
            m.intern(n.as_ref());
        }
        m
    }

    pub fn intern(&mut self, name: &str) -> VarId {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = VarId::from(self.names.len());
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        v
    }

    pub fn get(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    /// Name of `v`, or a synthetic `v<i>` for unnamed ids.
    pub fn name(&self, v: VarId) -> String {
        self.names
            .get(v.index())
            .cloned()
            .unwrap_or_else(|| format!("v{}", v.0))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("unexpected character {ch:?} at position {pos}")]
    Lex { pos: usize, ch: char },
    #[error("expected {expected} at position {pos}")]
    Syntax { pos: usize, expected: &'static str },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Const(bool),
    Not,
    And,
    Or,
    Xor,
    Implies,
    Iff,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let rest = &text[pos..];
        let (tok, len) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '~' | '!' => (Tok::Not, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '^' => (Tok::Xor, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '0' => (Tok::Const(false), 1),
            '1' => (Tok::Const(true), 1),
            '-' if rest.starts_with("->") => (Tok::Implies, 2),
            '<' if rest.starts_with("<->") => (Tok::Iff, 3),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |c| c.0);
                out.push((pos, Tok::Ident(text[pos..end].to_string())));
                i = j;
                continue;
            }
            _ => return Err(FormulaError::Lex { pos, ch: c }),
        };
        out.push((pos, tok));
        i += len;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    vars: &'a mut VarMap,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            lhs = Formula::iff(lhs, self.implies()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.xor()?;
        if self.eat(&Tok::Implies) {
            return Ok(Formula::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.or()?;
        while self.eat(&Tok::Xor) {
            lhs = Formula::xor(lhs, self.or()?);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.at += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    return Err(FormulaError::Syntax {
                        pos: self.pos(),
                        expected: "')'",
                    });
                }
                Ok(inner)
            }
            Some(Tok::Const(b)) => {
                self.at += 1;
                Ok(Formula::Const(b))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                Ok(Formula::Var(self.vars.intern(&name)))
            }
            _ => Err(FormulaError::Syntax {
                pos,
                expected: "variable, constant, '~' or '('",
            }),
        }
    }
}

/// Parses `text`, assigning fresh ids by first occurrence.
pub fn parse_formula(text: &str) -> Result<(Formula, VarMap), FormulaError> {
    let mut vars = VarMap::new();
    let f = parse_formula_with(text, &mut vars)?;
    Ok((f, vars))
}

/// Parses `text` against an existing variable map, extending it with any new names.
pub fn parse_formula_with(text: &str, vars: &mut VarMap) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        vars,
    };
    let f = p.iff()?;
    if p.at != p.toks.len() {
        return Err(FormulaError::Syntax {
            pos: p.pos(),
            expected: "end of input",
        });
    }
    Ok(f)
}
