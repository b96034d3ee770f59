//! Projected model counting encodings of blame levels.
//!
//! Variable layout of an encoding, in DIMACS numbering:
//! originals `1..=n`, then one flip variable per non-target original that
//! occurs in the formula, then totalizer outputs, then Tseytin definitions.

mod counter;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;

use crate::engine::{dyadic, Func, Manager, Rational, VarId};
use crate::error::{Error, Result};
use crate::frontend::dimacs::{lit_var, var_lit};
use crate::frontend::{CnfDocument, Formula, TseytinEncoder};
use crate::measures::ShareFunction;
use crate::values::{telescope, Variant};

pub use counter::{parse_counter_output, CounterAdapter, CounterError, OutputDialect, COUNTER_ENV};

/// `χ_k` for one target and bound, with its bookkeeping.
#[derive(Clone, Debug)]
pub struct BlameEncoding {
    pub cnf: CnfDocument,
    pub k: usize,
    pub target: VarId,
    pub variant: Variant,
    /// `y ↦ v_y`
    pub flip_vars: BTreeMap<VarId, VarId>,
    pub totalizer_aux: Vec<VarId>,
}

/// Clauses over `vars` and fresh outputs, satisfiable by some assignment of
/// the outputs iff at most `k` of `vars` are true. Fresh variables start at
/// DIMACS index `first_free`.
pub fn totalizer_atmost(
    vars: &[VarId],
    k: usize,
    first_free: u32,
) -> Result<(Vec<Vec<i32>>, Vec<VarId>)> {
    if k > vars.len() {
        return Err(Error::LimitExceeded {
            what: "cardinality bound",
            size: k,
            limit: vars.len(),
        });
    }
    let mut clauses = Vec::new();
    let mut aux = Vec::new();
    if k == vars.len() {
        return Ok((clauses, aux));
    }
    let mut next = first_free;
    let leaves: Vec<Vec<i32>> = vars.iter().map(|&v| vec![var_lit(v, true)]).collect();
    let root = build_totalizer(&leaves, &mut next, &mut clauses, &mut aux);
    clauses.push(vec![-root[k]]);
    Ok((clauses, aux))
}

/// Returns unary outputs `o_1..o_m` (as literals) of the subtree over `leaves`.
fn build_totalizer(
    leaves: &[Vec<i32>],
    next: &mut u32,
    clauses: &mut Vec<Vec<i32>>,
    aux: &mut Vec<VarId>,
) -> Vec<i32> {
    if leaves.len() == 1 {
        return leaves[0].clone();
    }
    let mid = leaves.len() / 2;
    let a = build_totalizer(&leaves[..mid], next, clauses, aux);
    let b = build_totalizer(&leaves[mid..], next, clauses, aux);
    let out: Vec<i32> = (0..a.len() + b.len())
        .map(|_| {
            let v = *next as i32;
            *next += 1;
            aux.push(lit_var(v));
            v
        })
        .collect();
    // a_i ∧ b_j → o_{i+j}, with a_0 = b_0 = ⊤
    for i in 0..=a.len() {
        for j in 0..=b.len() {
            if i + j == 0 {
                continue;
            }
            let mut c = Vec::with_capacity(3);
            if i > 0 {
                c.push(-a[i - 1]);
            }
            if j > 0 {
                c.push(-b[j - 1]);
            }
            c.push(out[i + j - 1]);
            clauses.push(c);
        }
    }
    out
}

/// Builds `χ_k`: at most `k` flip variables set, and flipping the chosen set
/// makes `x` critical (keeping the value of `φ` for [`Variant::Chk`]).
pub fn encode_blame_level(
    phi: &Formula,
    n_vars: usize,
    x: VarId,
    k: usize,
    variant: Variant,
) -> Result<BlameEncoding> {
    let vars = phi.vars();
    if !vars.contains(&x) {
        return Err(Error::UnknownVariable(x.to_string()));
    }
    let n = n_vars.max(vars.iter().map(|v| v.index() + 1).max().unwrap_or(0));
    let mut flip_vars = BTreeMap::new();
    for (i, &y) in vars.iter().filter(|&&y| y != x).enumerate() {
        flip_vars.insert(y, VarId::from(n + i));
    }
    let flips: Vec<VarId> = flip_vars.values().copied().collect();
    let first_free = (n + flips.len() + 1) as u32;
    let (tot_clauses, totalizer_aux) = totalizer_atmost(&flips, k.min(flips.len()), first_free)?;

    let psi = phi.substitute(&|y| {
        flip_vars
            .get(&y)
            .map(|&v| Formula::xor(Formula::Var(y), Formula::Var(v)))
    });
    let psi_fx = psi.substitute(&|y| (y == x).then(|| Formula::not(Formula::Var(x))));
    let mut enc = TseytinEncoder::new(first_free + totalizer_aux.len() as u32);
    for c in tot_clauses {
        enc.add_clause(c);
    }
    match variant {
        Variant::Chk => {
            enc.assert(&Formula::iff(phi.clone(), psi));
            enc.assert(&Formula::xor(phi.clone(), psi_fx));
        }
        Variant::Modified => {
            enc.assert(&Formula::xor(psi, psi_fx));
        }
    }
    let n_total = enc.last_var() as usize;
    Ok(BlameEncoding {
        cnf: CnfDocument {
            n_vars: n_total,
            clauses: enc.into_clauses(),
            projection: Some(vars),
        },
        k,
        target: x,
        variant,
        flip_vars,
        totalizer_aux,
    })
}

/// Which projected model counter to run.
#[derive(Clone, Debug)]
pub enum Counter {
    /// Bucket elimination on decision diagrams.
    Internal,
    External(CounterAdapter),
}

/// Projected models of `doc`: assignments of the projection set that extend
/// to a model, by bucket elimination of the other variables.
pub fn count_projected_internal(doc: &CnfDocument) -> Result<BigUint> {
    let all: BTreeSet<VarId> = (0..doc.n_vars).map(VarId::from).collect();
    let proj = doc.projection.clone().unwrap_or_else(|| all.clone());
    let mut m = Manager::new(doc.n_vars);
    let f = project(&mut m, doc, &proj)?;
    Ok(m.sat_count_over(f, &proj)?)
}

/// Diagram levels for the variables of `doc`: first occurrence in the clause
/// list, then a few rounds of centre-of-gravity smoothing (FORCE).
fn force_order(doc: &CnfDocument) -> Vec<usize> {
    let n = doc.n_vars;
    let mut pos = vec![f64::MAX; n];
    let mut next = 0.0;
    for c in &doc.clauses {
        for &l in c {
            let v = lit_var(l).index();
            if pos[v] == f64::MAX {
                pos[v] = next;
                next += 1.0;
            }
        }
    }
    for p in pos.iter_mut().filter(|p| **p == f64::MAX) {
        *p = next;
        next += 1.0;
    }
    for _ in 0..20 {
        let mut sum = vec![0.0; n];
        let mut deg = vec![0usize; n];
        for c in &doc.clauses {
            let cog = c.iter().map(|&l| pos[lit_var(l).index()]).sum::<f64>() / c.len().max(1) as f64;
            for &l in c {
                sum[lit_var(l).index()] += cog;
                deg[lit_var(l).index()] += 1;
            }
        }
        for v in 0..n {
            if deg[v] > 0 {
                pos[v] = sum[v] / deg[v] as f64;
            }
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| pos[a].total_cmp(&pos[b]).then(a.cmp(&b)));
        for (rank, &v) in idx.iter().enumerate() {
            pos[v] = rank as f64;
        }
    }
    pos.into_iter().map(|p| p as usize).collect()
}

/// The function over the projection set whose models extend to models of `doc`.
pub fn project(m: &mut Manager, doc: &CnfDocument, proj: &BTreeSet<VarId>) -> Result<Func> {
    // work in permuted levels, rename back at the end
    let level = force_order(doc);
    let to_level = |v: VarId| VarId::from(level[v.index()]);
    let mut pool: Vec<Option<(Func, BTreeSet<VarId>)>> = Vec::with_capacity(doc.clauses.len());
    let mut occ: BTreeMap<VarId, BTreeSet<usize>> = BTreeMap::new();
    let add = |pool: &mut Vec<_>, occ: &mut BTreeMap<VarId, BTreeSet<usize>>, g, d: BTreeSet<VarId>| {
        for &v in &d {
            occ.entry(v).or_default().insert(pool.len());
        }
        pool.push(Some((g, d)));
    };
    for c in &doc.clauses {
        let mut cl = m.bot();
        for &l in c {
            let lit = m.literal(to_level(lit_var(l)), l > 0)?;
            cl = m.or(cl, lit);
        }
        let d = c.iter().map(|&l| to_level(lit_var(l))).collect();
        add(&mut pool, &mut occ, cl, d);
    }
    let mut todo: BTreeSet<VarId> = (0..doc.n_vars)
        .map(VarId::from)
        .filter(|v| !proj.contains(v))
        .map(to_level)
        .collect();
    while !todo.is_empty() {
        // smallest joint support first
        let v = *todo
            .iter()
            .min_by_key(|v| {
                let mut supp = BTreeSet::new();
                for &i in occ.get(v).into_iter().flatten() {
                    supp.extend(pool[i].as_ref().expect("live").1.iter().copied());
                }
                supp.len()
            })
            .expect("non-empty");
        todo.remove(&v);
        let ids = occ.remove(&v).unwrap_or_default();
        if ids.is_empty() {
            continue;
        }
        let mut conj = m.top();
        for &i in &ids {
            let (g, d) = pool[i].take().expect("live");
            for u in d.iter().filter(|&&u| u != v) {
                if let Some(o) = occ.get_mut(u) {
                    o.remove(&i);
                }
            }
            conj = m.and(conj, g);
        }
        let q: BTreeSet<VarId> = std::iter::once(v).collect();
        let e = m.exists(conj, &q);
        let d = m.dep(e);
        add(&mut pool, &mut occ, e, d);
    }
    let mut acc = m.top();
    for (g, _) in pool.into_iter().flatten() {
        acc = m.and(acc, g);
    }
    let mut back = vec![VarId::from(0); m.universe()];
    for (v, &l) in level.iter().enumerate() {
        back[l] = VarId::from(v);
    }
    for (i, b) in back.iter_mut().enumerate().skip(doc.n_vars) {
        *b = VarId::from(i);
    }
    Ok(m.rename(acc, &back)?)
}

pub fn count_projected(enc: &BlameEncoding, counter: &Counter) -> Result<BigUint> {
    match counter {
        Counter::Internal => count_projected_internal(&enc.cnf),
        Counter::External(a) => Ok(a.count(&enc.cnf)?),
    }
}

/// Blame through one projected count per level `k`, assembled into the
/// telescoped sum.
pub fn blame_via_pmc(
    phi: &Formula,
    n_vars: usize,
    x: VarId,
    rho: &ShareFunction,
    variant: Variant,
    counter: &Counter,
) -> Result<Rational> {
    let vars = phi.vars();
    if !vars.contains(&x) {
        if x.index() < n_vars {
            return Ok(Rational::from_integer(0.into()));
        }
        return Err(Error::UnknownVariable(x.to_string()));
    }
    let max_k = if rho.is_step() { 0 } else { vars.len() - 1 };
    let full = BigUint::one() << vars.len();
    let mut es = Vec::new();
    for k in 0..=max_k {
        let enc = encode_blame_level(phi, n_vars, x, k, variant)?;
        let c = count_projected(&enc, counter)?;
        let done = c == full;
        es.push(dyadic(&c, vars.len()));
        if done {
            break;
        }
    }
    Ok(telescope(&es, rho))
}

#[cfg(test)]
mod tests;
