//! Influence and blame on decision diagrams.

mod measure;

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::engine::{dyadic, Func, Manager, Rational, VarId};
use crate::error::{Error, Result};
use crate::frontend::{tseytin, Formula};
use crate::measures::ShareFunction;

pub use measure::{rank_all, CgmKind, EvalOptions, GameValue, ImportanceReport, Measure};

/// Which critical-set notion a blame computation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Original blame: `f(u) = f(flip_S u) ≠ f(flip_{S∪x} u)`.
    Chk,
    /// Modified blame: only `f(flip_S u) ≠ f(flip_{S∪x} u)`.
    Modified,
}

/// `γ_0, γ_1, ...` with `γ_k(u) = 1` iff the (modified) smallest critical set
/// of `x` at `u` has size at most `k`.
#[derive(Clone, Debug)]
pub struct GammaSequence {
    pub variant: Variant,
    pub target: VarId,
    pub levels: Vec<Func>,
    /// First `k` at which the recursion stabilised, if it did.
    pub fixpoint_level: Option<usize>,
}

impl GammaSequence {
    /// `γ_k`; levels past the end repeat the last one.
    pub fn level(&self, k: usize) -> Func {
        self.levels[k.min(self.levels.len() - 1)]
    }
}

/// `I_x(f) = E[D_x f]`.
pub fn influence(m: &mut Manager, f: Func, x: VarId) -> Rational {
    let d = m.derivative(f, x);
    m.expectation(d)
}

/// One step of `γ ↦ γ ∨ ⋁_y flip_y γ`.
fn grow(m: &mut Manager, g: Func, flips: &BTreeSet<VarId>) -> Func {
    let mut acc = g;
    for &y in flips {
        let fl = m.flip(g, y);
        acc = m.or(acc, fl);
    }
    acc
}

pub fn gamma_sequence(m: &mut Manager, f: Func, x: VarId, variant: Variant) -> GammaSequence {
    gamma_sequence_upto(m, f, x, variant, usize::MAX)
}

/// Like [`gamma_sequence`] but builds at most `γ_0..γ_max_k`.
pub fn gamma_sequence_upto(
    m: &mut Manager,
    f: Func,
    x: VarId,
    variant: Variant,
    max_k: usize,
) -> GammaSequence {
    // flips of variables outside dep(f) leave every level unchanged
    let mut flips = m.dep(f);
    flips.remove(&x);
    let limit = flips.len().min(max_k);
    let fx = m.flip(f, x);
    let mut levels = Vec::new();
    let mut fixpoint_level = None;
    match variant {
        Variant::Modified => {
            let mut g = m.xor(f, fx);
            levels.push(g);
            for k in 1..=limit {
                let next = grow(m, g, &flips);
                if next == g {
                    fixpoint_level = Some(k);
                    break;
                }
                levels.push(next);
                g = next;
            }
        }
        Variant::Chk => {
            let nf = m.not(f);
            let nfx = m.not(fx);
            let mut t1 = m.and(f, nfx);
            let mut t0 = m.and(nf, fx);
            let combine = |m: &mut Manager, t1: Func, t0: Func| {
                let a = m.and(f, t1);
                let b = m.and(nf, t0);
                m.or(a, b)
            };
            levels.push(combine(m, t1, t0));
            for k in 1..=limit {
                let n1 = grow(m, t1, &flips);
                let n0 = grow(m, t0, &flips);
                if n1 == t1 && n0 == t0 {
                    fixpoint_level = Some(k);
                    break;
                }
                t1 = n1;
                t0 = n0;
                levels.push(combine(m, t1, t0));
            }
        }
    }
    if fixpoint_level.is_none() && levels.len() == flips.len() + 1 {
        // every finite critical set has size at most |flips|
        fixpoint_level = Some(levels.len());
    }
    GammaSequence {
        variant,
        target: x,
        levels,
        fixpoint_level,
    }
}

/// `ρ(0)·e_0 + Σ_{k≥1} ρ(k)(e_k − e_{k−1})` for level expectations `e_k`.
pub fn telescope(expectations: &[Rational], rho: &ShareFunction) -> Rational {
    let mut acc = Rational::zero();
    let mut prev = Rational::zero();
    for (k, e) in expectations.iter().enumerate() {
        let delta = e - &prev;
        if !delta.is_zero() {
            acc += rho.eval(Some(k)) * delta;
        }
        prev = e.clone();
    }
    acc
}

/// `B^ρ_x(f)` for [`Variant::Chk`], `MB^ρ_x(f)` for [`Variant::Modified`].
pub fn blame(
    m: &mut Manager,
    f: Func,
    x: VarId,
    rho: &ShareFunction,
    variant: Variant,
) -> Rational {
    let max_k = if rho.is_step() { 0 } else { usize::MAX };
    let seq = gamma_sequence_upto(m, f, x, variant, max_k);
    let es: Vec<Rational> = seq.levels.iter().map(|&g| m.expectation(g)).collect();
    telescope(&es, rho)
}

/// Influence through the syntactic derivative and a projected count of its
/// Tseytin encoding, avoiding decision diagrams for the input formula itself.
pub fn influence_via_formula(phi: &Formula, n_vars: usize, x: VarId) -> Result<Rational> {
    if !phi.vars().contains(&x) {
        if x.index() >= n_vars {
            return Err(Error::UnknownVariable(x.to_string()));
        }
        return Ok(Rational::zero());
    }
    let n = n_vars.max(x.index() + 1);
    let d = phi.derivative(x);
    let mut doc = tseytin(&d, n);
    let proj: BTreeSet<VarId> = (0..n).map(VarId::from).filter(|&v| v != x).collect();
    doc.projection = Some(proj);
    let count = crate::pmc::count_projected_internal(&doc)?;
    Ok(dyadic(&count, n - 1))
}

#[cfg(test)]
mod tests;
