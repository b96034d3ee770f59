//! Truth-table reference implementations, straight from the definitions.
//!
//! Nothing in here touches decision diagrams except the conversions to and
//! from [`Func`], so the fast paths can be checked against it.

pub mod axioms;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::engine::{EngineError, Func, Manager, Rational};
use crate::games::ContributionWeights;
use crate::measures::{ConstancyMeasure, ShareFunction, Value};
use crate::values::{CgmKind, GameValue, Measure, Variant};

pub use axioms::{
    check_ivf_axioms, check_optional, check_rank_pair, hex, Axiom, AxiomReport, Counterexample,
    modular_samples, FnValue, ModularSample, Mode, OracleMeasure, Property, Relation, ValueFunction, Verdict,
    EXHAUSTIVE_MAX_N,
};

/// Default bound on truth-table variables.
pub const DEFAULT_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("truth table over {n} variables exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("truth table length {0} is not a power of two")]
    BadLength(usize),
}

/// Explicit function `{0,1}^n → {0,1}`; bit `i` of an index is variable `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    n: usize,
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self, OracleError> {
        Self::with_cap(n, bits, DEFAULT_CAP)
    }

    pub fn with_cap(n: usize, bits: Vec<bool>, cap: usize) -> Result<Self, OracleError> {
        if n > cap {
            return Err(OracleError::CapExceeded { n, cap });
        }
        if bits.len() != 1 << n {
            return Err(OracleError::BadLength(bits.len()));
        }
        Ok(Self { n, bits })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        Self {
            n,
            bits: (0..1usize << n).map(f).collect(),
        }
    }

    /// The function whose truth table is the binary expansion of `index`.
    pub fn from_index(n: usize, index: u64) -> Self {
        Self::from_fn(n, |u| index >> u & 1 == 1)
    }

    pub fn var(n: usize, x: usize) -> Self {
        Self::from_fn(n, |u| u >> x & 1 == 1)
    }

    pub fn constant(n: usize, b: bool) -> Self {
        Self::from_fn(n, |_| b)
    }

    pub fn from_func(m: &Manager, f: Func) -> Self {
        Self {
            n: m.universe(),
            bits: m.truth_table(f, m.universe()),
        }
    }

    pub fn to_func(&self, m: &mut Manager) -> Result<Func, EngineError> {
        m.from_truth_table(&self.bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn eval(&self, u: usize) -> bool {
        self.bits[u]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn expectation(&self) -> Rational {
        Rational::new(self.count().into(), BigInt::from(1u64) << self.n)
    }

    pub fn depends_on(&self, x: usize) -> bool {
        (0..self.bits.len()).any(|u| self.bits[u] != self.bits[u ^ 1 << x])
    }

    pub fn dep(&self) -> BTreeSet<usize> {
        (0..self.n).filter(|&x| self.depends_on(x)).collect()
    }

    pub fn not(&self) -> Self {
        Self::from_fn(self.n, |u| !self.bits[u])
    }

    pub fn and(&self, o: &Self) -> Self {
        Self::from_fn(self.n, |u| self.bits[u] && o.bits[u])
    }

    pub fn or(&self, o: &Self) -> Self {
        Self::from_fn(self.n, |u| self.bits[u] || o.bits[u])
    }

    pub fn xor(&self, o: &Self) -> Self {
        Self::from_fn(self.n, |u| self.bits[u] != o.bits[u])
    }

    /// Pointwise `self ≥ o`.
    pub fn geq(&self, o: &Self) -> bool {
        self.bits.iter().zip(&o.bits).all(|(a, b)| *a || !*b)
    }

    /// `u ↦ f(u with x := b)`.
    pub fn restrict(&self, x: usize, b: bool) -> Self {
        Self::from_fn(self.n, |u| {
            self.bits[if b { u | 1 << x } else { u & !(1 << x) }]
        })
    }

    pub fn derivative(&self, x: usize) -> Self {
        self.restrict(x, true).xor(&self.restrict(x, false))
    }

    pub fn flip(&self, y: usize) -> Self {
        Self::from_fn(self.n, |u| self.bits[u ^ 1 << y])
    }

    /// `σf` with `(σf)(σu) = f(u)`, where `σ` sends variable `i` to `sigma[i]`.
    pub fn permute(&self, sigma: &[usize]) -> Self {
        let mut bits = vec![false; self.bits.len()];
        for (u, b) in self.bits.iter().enumerate() {
            let mut w = 0;
            for (i, s) in sigma.iter().enumerate() {
                if u >> i & 1 == 1 {
                    w |= 1 << s;
                }
            }
            bits[w] = *b;
        }
        Self { n: self.n, bits }
    }

    /// `f[x/s] = s·f|x=1 ∨ ¬s·f|x=0`.
    pub fn substitute(&self, x: usize, s: &Self) -> Self {
        let (f1, f0) = (self.restrict(x, true), self.restrict(x, false));
        Self::from_fn(self.n, |u| if s.bits[u] { f1.bits[u] } else { f0.bits[u] })
    }

    /// Same function over `n + extra` variables.
    pub fn extend(&self, extra: usize) -> Self {
        let mask = (1usize << self.n) - 1;
        Self::from_fn(self.n + extra, |u| self.bits[u & mask])
    }

    pub fn is_monotone_in(&self, x: usize) -> bool {
        self.restrict(x, true).geq(&self.restrict(x, false))
    }
}

/// Size of the smallest `S ⊆ X∖x` with `f(u) = f(flip_S u) ≠ f(flip_{S∪x} u)`,
/// `None` for `∞`.
pub fn tt_scs(f: &TruthTable, x: usize, u: usize) -> Option<usize> {
    critical(f, x, u, true)
}

/// Like [`tt_scs`] without the requirement `f(u) = f(flip_S u)`.
pub fn tt_mscs(f: &TruthTable, x: usize, u: usize) -> Option<usize> {
    critical(f, x, u, false)
}

fn critical(f: &TruthTable, x: usize, u: usize, keep_value: bool) -> Option<usize> {
    let others = ((1usize << f.n) - 1) & !(1 << x);
    let mut best: Option<usize> = None;
    let mut s = others;
    // all submasks of `others`, the empty set included
    loop {
        let size = s.count_ones() as usize;
        if best.is_none_or(|b| size < b) {
            let w = u ^ s;
            let ok = f.eval(w) != f.eval(w ^ 1 << x) && (!keep_value || f.eval(w) == f.eval(u));
            if ok {
                best = Some(size);
            }
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & others;
    }
    best
}

fn dyadic_avg(sum: Rational, n: usize) -> Rational {
    sum / Rational::from_integer(BigInt::from(1u64) << n)
}

pub fn tt_influence(f: &TruthTable, x: usize) -> Rational {
    let c = (0..1usize << f.n)
        .filter(|&u| f.eval(u) != f.eval(u ^ 1 << x))
        .count();
    dyadic_avg(Rational::from_integer(c.into()), f.n)
}

pub fn tt_blame(f: &TruthTable, x: usize, rho: &ShareFunction, variant: Variant) -> Rational {
    let mut sum = Rational::zero();
    for u in 0..1usize << f.n {
        let k = match variant {
            Variant::Chk => tt_scs(f, x, u),
            Variant::Modified => tt_mscs(f, x, u),
        };
        sum += rho.eval(k);
    }
    dyadic_avg(sum, f.n)
}

/// Assignments to the coalition `s` (as masks within `s`).
fn sub_assignments(s: usize) -> impl Iterator<Item = usize> {
    let mut cur = Some(s);
    std::iter::from_fn(move || {
        let c = cur?;
        cur = if c == 0 { None } else { Some((c - 1) & s) };
        Some(c)
    })
}

/// `ω_f` as a table over coalitions: some fixing of `S` forces `f` to one.
pub fn tt_dominating(f: &TruthTable) -> Vec<bool> {
    let full = (1usize << f.n) - 1;
    (0..=full)
        .map(|s| {
            sub_assignments(s).any(|a| sub_assignments(full & !s).all(|w| f.eval(a | w)))
        })
        .collect()
}

/// `ν_f`: every fixing of the complement can be answered by `S`.
pub fn tt_rectifying(f: &TruthTable) -> Vec<bool> {
    let full = (1usize << f.n) - 1;
    (0..=full)
        .map(|s| {
            sub_assignments(full & !s).all(|w| sub_assignments(s).any(|a| f.eval(a | w)))
        })
        .collect()
}

/// `H^κ_f(S) = E_{a ∈ {0,1}^S} κ(E[f_a])`.
pub fn tt_hkr(f: &TruthTable, kappa: &ConstancyMeasure) -> Vec<Value> {
    let full = (1usize << f.n) - 1;
    (0..=full)
        .map(|s| {
            let rest = full & !s;
            let free = rest.count_ones() as usize;
            // how many fixings of S leave exactly c models
            let mut hist = vec![0usize; (1 << free) + 1];
            for a in sub_assignments(s) {
                hist[sub_assignments(rest).filter(|&w| f.eval(a | w)).count()] += 1;
            }
            let mut acc = Value::zero();
            for (c, &k) in hist.iter().enumerate().filter(|(_, &k)| k > 0) {
                let e = dyadic_avg(Rational::from_integer(c.into()), free);
                let term = kappa.eval(&e).expect("expectation within [0, 1]");
                acc = acc.add(&term.scale(&Rational::from_integer(k.into())));
            }
            acc.scale(&dyadic_avg(Rational::from_integer(1.into()), s.count_ones() as usize))
        })
        .collect()
}

/// `Σ_{S ⊆ X∖x} c(|S|) (v(S ∪ x) − v(S))` over a game table of `2^n` values.
pub fn tt_contributions(v: &[Value], n: usize, x: usize, w: &ContributionWeights) -> Value {
    let bit = 1usize << x;
    let mut acc = Value::zero();
    for s in (0..1usize << n).filter(|s| s & bit == 0) {
        let d = v[s | bit].sub(&v[s]);
        acc = acc.add(&d.scale(&w.get(s.count_ones() as usize)));
    }
    acc
}

fn bool_game(t: Vec<bool>) -> Vec<Value> {
    t.into_iter()
        .map(|b| if b { Value::one() } else { Value::zero() })
        .collect()
}

/// Reference value of `measure` for variable `x` of `f`.
pub fn tt_measure(measure: &Measure, f: &TruthTable, x: usize) -> Value {
    match measure {
        Measure::Influence => tt_influence(f, x).into(),
        Measure::Blame { rho, variant } => tt_blame(f, x, rho, *variant).into(),
        Measure::Cgm { cgm, value } => {
            let game = match cgm {
                CgmKind::Dominating => bool_game(tt_dominating(f)),
                CgmKind::Rectifying => bool_game(tt_rectifying(f)),
                CgmKind::Hkr(k) => tt_hkr(f, k),
            };
            let n = f.n;
            let w = match value {
                GameValue::Banzhaf => ContributionWeights::banzhaf(n),
                GameValue::Shapley => ContributionWeights::shapley(n),
                GameValue::Z => ContributionWeights::singleton(n),
                GameValue::Custom(w) => w.clone(),
            };
            tt_contributions(&game, n, x, &w)
        }
    }
}
