use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;

use crate::engine::{dyadic, Func, Manager, Rational, VarId};

/// A literal: variable and polarity.
pub type Lit = (VarId, bool);

/// Family of cubes (conjunctions of literals), read as their disjunction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dnf {
    pub cubes: BTreeSet<BTreeSet<Lit>>,
}

impl Dnf {
    /// No cube contains both polarities of a variable.
    pub fn is_nontrivial(&self) -> bool {
        self.cubes.iter().all(|c| {
            c.iter()
                .all(|&(v, p)| !c.contains(&(v, !p)))
        })
    }

    /// Every pair of cubes disagrees on some literal other than `x`.
    pub fn is_orthogonal_in(&self, x: VarId) -> bool {
        let cubes: Vec<_> = self.cubes.iter().collect();
        for (i, c) in cubes.iter().enumerate() {
            for d in &cubes[i + 1..] {
                let clash = c
                    .iter()
                    .any(|&(v, p)| v != x && d.contains(&(v, !p)));
                if !clash {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_func(&self, m: &mut Manager) -> Func {
        let mut acc = m.bot();
        for c in &self.cubes {
            let cube = m.cube(c.iter().copied()).expect("literal within universe");
            acc = m.or(acc, cube);
        }
        acc
    }
}

/// Minterms of `f` over `dep(f)`.
pub fn canonical_dnf(m: &mut Manager, f: Func) -> Dnf {
    let dep: Vec<VarId> = m.dep(f).into_iter().collect();
    let mut cubes = BTreeSet::new();
    let mut cur = BTreeMap::new();
    minterms(m, f, &dep, 0, &mut cur, &mut cubes);
    Dnf { cubes }
}

fn minterms(
    m: &Manager,
    f: Func,
    dep: &[VarId],
    i: usize,
    cur: &mut BTreeMap<VarId, bool>,
    out: &mut BTreeSet<BTreeSet<Lit>>,
) {
    if m.is_const(f) == Some(false) {
        return;
    }
    if i == dep.len() {
        out.insert(cur.iter().map(|(v, b)| (*v, *b)).collect());
        return;
    }
    let x = dep[i];
    let (lo, hi) = match m.split(f) {
        Some((v, lo, hi)) if v == x => (lo, hi),
        _ => (f, f),
    };
    for (bit, child) in [(false, lo), (true, hi)] {
        cur.insert(x, bit);
        minterms(m, child, dep, i + 1, cur, out);
    }
    cur.remove(&x);
}

/// Merges every pair of cubes that differ only in the polarity of `x`.
pub fn x_orthogonalize(d: &Dnf, x: VarId) -> Dnf {
    let mut cubes = BTreeSet::new();
    for c in &d.cubes {
        let other_polarity = c.iter().find(|l| l.0 == x).map(|&(v, p)| {
            let mut o = c.clone();
            o.remove(&(v, p));
            o.insert((v, !p));
            o
        });
        match other_polarity {
            Some(o) if d.cubes.contains(&o) => {
                let mut merged = c.clone();
                merged.retain(|l| l.0 != x);
                cubes.insert(merged);
            }
            _ => {
                cubes.insert(c.clone());
            }
        }
    }
    Dnf { cubes }
}

/// Two-sided Jeroslow-Wang value: sum of `2^-|C|` over cubes mentioning `x`.
pub fn jw_value(d: &Dnf, x: VarId) -> Rational {
    let mut acc = Rational::from_integer(0.into());
    for c in d.cubes.iter().filter(|c| c.iter().any(|l| l.0 == x)) {
        acc += dyadic(&BigUint::one(), c.len());
    }
    acc
}
