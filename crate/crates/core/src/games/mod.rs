//! Cooperative games derived from Boolean functions and their values.

mod hkr;

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use crate::engine::{Func, Manager, Rational, VarId};
use crate::error::{Error, Result};
use crate::measures::Value;

pub use hkr::{banzhaf_hkr_quad, hkr_game, DEFAULT_N_LIMIT};

/// Weights `c(0..n-1)` of an expectation of contributions
/// `Σ_{S ⊆ X∖x} c(|S|) (v(S ∪ x) − v(S))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContributionWeights {
    c: Vec<Rational>,
}

impl ContributionWeights {
    /// Validates `Σ_k C(n−1,k)·c(k) = 1` and `c ≥ 0` with `n = c.len()`.
    pub fn new(c: Vec<Rational>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if c.iter().any(Signed::is_negative) {
            return Err(Error::InvalidWeights("negative weight".into()));
        }
        let n = c.len();
        let total: Rational = c
            .iter()
            .enumerate()
            .map(|(k, ck)| ck * Rational::from_integer(binomial(BigInt::from(n - 1), BigInt::from(k))))
            .sum();
        if !total.is_one() {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { c })
    }

    /// `c(k) = 1 / 2^(n−1)`.
    pub fn banzhaf(n: usize) -> Self {
        let w = Rational::new(BigInt::one(), BigInt::one() << (n.max(1) - 1));
        Self { c: vec![w; n.max(1)] }
    }

    /// `c(k) = 1 / (n · C(n−1, k))`.
    pub fn shapley(n: usize) -> Self {
        let n = n.max(1);
        let c = (0..n)
            .map(|k| {
                Rational::new(
                    BigInt::one(),
                    BigInt::from(n) * binomial(BigInt::from(n - 1), BigInt::from(k)),
                )
            })
            .collect();
        Self { c }
    }

    /// Only the empty coalition counts.
    pub fn singleton(n: usize) -> Self {
        let mut c = vec![Rational::zero(); n.max(1)];
        c[0] = Rational::one();
        Self { c }
    }

    pub fn universe(&self) -> usize {
        self.c.len()
    }

    pub fn get(&self, k: usize) -> Rational {
        self.c.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn weights(&self) -> &[Rational] {
        &self.c
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.c.len() != n.max(1) {
            return Err(Error::InvalidWeights(format!(
                "{} weights for a universe of {n} players",
                self.c.len()
            )));
        }
        Ok(())
    }
}

/// A game with values in `{0,1}`: `v(S) = carrier(𝟙_S)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimpleGame {
    pub carrier: Func,
}

impl SimpleGame {
    pub fn value(&self, m: &Manager, s: &BTreeSet<VarId>) -> bool {
        let bits: Vec<bool> = m.vars().map(|v| s.contains(&v)).collect();
        m.eval(self.carrier, &bits)
    }

    /// `E[v|x=1] − E[v|x=0]`.
    pub fn banzhaf(&self, m: &mut Manager, x: VarId) -> Rational {
        let (c0, c1) = m.cofactors(self.carrier, x);
        m.expectation(c1) - m.expectation(c0)
    }

    pub fn shapley(&self, m: &mut Manager, x: VarId) -> Rational {
        let w = ContributionWeights::shapley(m.universe());
        self.contributions(m, x, &w).expect("weights sized to the universe")
    }

    /// `v({x}) − v(∅)`.
    pub fn zvalue(&self, m: &mut Manager, x: VarId) -> Rational {
        let single: BTreeSet<VarId> = std::iter::once(x).collect();
        let a = i64::from(self.value(m, &single));
        let b = i64::from(self.value(m, &BTreeSet::new()));
        Rational::from_integer((a - b).into())
    }

    /// Weighted contributions, grouped by coalition size via weight profiles.
    pub fn contributions(
        &self,
        m: &mut Manager,
        x: VarId,
        w: &ContributionWeights,
    ) -> Result<Rational> {
        w.check(m.universe())?;
        let (c0, c1) = m.cofactors(self.carrier, x);
        let others: BTreeSet<VarId> = m.vars().filter(|&v| v != x).collect();
        let w1 = m.count_by_weight(c1, &others)?;
        let w0 = m.count_by_weight(c0, &others)?;
        let mut acc = Rational::zero();
        for (k, (a, b)) in w1.iter().zip(&w0).enumerate() {
            let diff = BigInt::from(a.clone()) - BigInt::from(b.clone());
            if !diff.is_zero() {
                acc += w.get(k) * Rational::from_integer(diff);
            }
        }
        Ok(acc)
    }
}

/// A game given by explicit values on the subsets of `players`. The game is
/// constant in universe variables outside `players`.
#[derive(Clone, Debug)]
pub struct TableGame {
    players: Vec<VarId>,
    universe: usize,
    values: Vec<Value>,
}

impl TableGame {
    /// `values[mask]` is `v(S)` where bit `i` of `mask` selects `players[i]`.
    pub fn new(universe: usize, players: Vec<VarId>, values: Vec<Value>) -> Self {
        assert_eq!(values.len(), 1 << players.len(), "one value per coalition");
        assert!(players.windows(2).all(|w| w[0] < w[1]), "players sorted");
        Self {
            players,
            universe,
            values,
        }
    }

    pub fn players(&self) -> &[VarId] {
        &self.players
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    fn mask_of(&self, s: &BTreeSet<VarId>) -> usize {
        self.players
            .iter()
            .enumerate()
            .filter(|(_, p)| s.contains(p))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn value(&self, s: &BTreeSet<VarId>) -> &Value {
        &self.values[self.mask_of(s)]
    }

    pub fn value_by_mask(&self, mask: usize) -> &Value {
        &self.values[mask]
    }

    pub fn contributions(&self, x: VarId, w: &ContributionWeights) -> Result<Value> {
        w.check(self.universe)?;
        let Some(pos) = self.players.iter().position(|&p| p == x) else {
            return Ok(Value::zero());
        };
        let m = self.players.len();
        let free = self.universe - m;
        // weight of a coalition T ⊆ players∖x, summed over its extensions by
        // non-players
        let eff: Vec<Rational> = (0..m)
            .map(|t| {
                (0..=free)
                    .map(|j| {
                        w.get(t + j)
                            * Rational::from_integer(binomial(BigInt::from(free), BigInt::from(j)))
                    })
                    .sum()
            })
            .collect();
        let bit = 1usize << pos;
        let mut acc = Value::zero();
        for mask in (0..1usize << m).filter(|s| s & bit == 0) {
            let d = self.values[mask | bit].sub(&self.values[mask]);
            acc = acc.add(&d.scale(&eff[mask.count_ones() as usize]));
        }
        Ok(acc)
    }

    pub fn banzhaf(&self, x: VarId) -> Value {
        self.contributions(x, &ContributionWeights::banzhaf(self.universe))
            .expect("weights sized to the universe")
    }

    pub fn shapley(&self, x: VarId) -> Value {
        self.contributions(x, &ContributionWeights::shapley(self.universe))
            .expect("weights sized to the universe")
    }

    pub fn zvalue(&self, x: VarId) -> Value {
        let single: BTreeSet<VarId> = std::iter::once(x).collect();
        self.value(&single).sub(self.value(&BTreeSet::new()))
    }
}

/// Either representation of a cooperative game.
#[derive(Clone, Debug)]
pub enum CoopGame {
    Simple(SimpleGame),
    Table(TableGame),
}

/// `ω_f(S) = 1` iff some assignment to `S` forces `f` to one.
pub fn dominating_game(m: &mut Manager, f: Func) -> SimpleGame {
    let mut memo = HashMap::new();
    SimpleGame {
        carrier: omega(m, f, &mut memo),
    }
}

fn omega(m: &mut Manager, f: Func, memo: &mut HashMap<Func, Func>) -> Func {
    let Some((z, f0, f1)) = m.split(f) else {
        return f;
    };
    if let Some(&r) = memo.get(&f) {
        return r;
    }
    let a = omega(m, f1, memo);
    let b = omega(m, f0, memo);
    let hi = m.or(a, b);
    let both = m.and(f1, f0);
    let lo = omega(m, both, memo);
    let zv = m.var(z).expect("variable of an existing node");
    let r = m.ite(zv, hi, lo);
    memo.insert(f, r);
    r
}

/// `ν_f(S) = 1` iff for every assignment to `X∖S`, `S` can answer with a
/// satisfying completion.
pub fn rectifying_game(m: &mut Manager, f: Func) -> SimpleGame {
    let mut memo = HashMap::new();
    SimpleGame {
        carrier: nu(m, f, &mut memo),
    }
}

fn nu(m: &mut Manager, f: Func, memo: &mut HashMap<Func, Func>) -> Func {
    let Some((z, f0, f1)) = m.split(f) else {
        return f;
    };
    if let Some(&r) = memo.get(&f) {
        return r;
    }
    let either = m.or(f1, f0);
    let hi = nu(m, either, memo);
    let a = nu(m, f1, memo);
    let b = nu(m, f0, memo);
    let lo = m.and(a, b);
    let zv = m.var(z).expect("variable of an existing node");
    let r = m.ite(zv, hi, lo);
    memo.insert(f, r);
    r
}

#[cfg(test)]
mod tests;
