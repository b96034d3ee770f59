use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{dyadic, EngineError, Func, Manager, NodeId, Rational, VarId};

impl Manager {
    /// Number of satisfying assignments over the whole universe.
    pub fn sat_count(&mut self, f: Func) -> BigUint {
        let root = self.owned(f);
        let c = self.count_rec(root);
        c << self.var_of(root) as usize
    }

    /// Count of assignments to variables at levels `var(n)..universe`.
    fn count_rec(&mut self, n: NodeId) -> BigUint {
        match n {
            NodeId::FALSE => return BigUint::zero(),
            NodeId::TRUE => return BigUint::one(),
            _ => {}
        }
        if let Some(c) = self.count_cache.get(&n) {
            return c.clone();
        }
        let node = self.node(n);
        let lo = self.count_rec(node.lo) << (self.var_of(node.lo) - node.var - 1) as usize;
        let hi = self.count_rec(node.hi) << (self.var_of(node.hi) - node.var - 1) as usize;
        let c = lo + hi;
        self.count_cache.insert(n, c.clone());
        c
    }

    /// `E[f]` under the uniform distribution on the universe.
    pub fn expectation(&mut self, f: Func) -> Rational {
        let c = self.sat_count(f);
        dyadic(&c, self.universe())
    }

    /// Satisfying assignments of `f` over `over` only. Requires `dep(f) ⊆ over`.
    pub fn sat_count_over(
        &mut self,
        f: Func,
        over: &BTreeSet<VarId>,
    ) -> Result<BigUint, EngineError> {
        self.check_cover(f, over)?;
        let c = self.sat_count(f);
        let outside = self.universe() - over.iter().filter(|v| v.0 < self.universe).count();
        Ok(c >> outside)
    }

    fn check_cover(&self, f: Func, over: &BTreeSet<VarId>) -> Result<(), EngineError> {
        for v in over {
            self.check_var(*v)?;
        }
        match self.dep(f).into_iter().find(|v| !over.contains(v)) {
            Some(v) => Err(EngineError::DepNotCovered(v)),
            None => Ok(()),
        }
    }

    /// Entry `k` counts satisfying assignments of `f` over `over` that set
    /// exactly `k` of those variables to one.
    pub fn count_by_weight(
        &mut self,
        f: Func,
        over: &BTreeSet<VarId>,
    ) -> Result<Vec<BigUint>, EngineError> {
        self.check_cover(f, over)?;
        let root = self.owned(f);
        let n = self.universe();
        // rank[l] = number of counted variables strictly below level l
        let mut rank = vec![0usize; n + 1];
        for l in 0..n {
            rank[l + 1] = rank[l] + usize::from(over.contains(&VarId(l as u32)));
        }
        let mut memo = HashMap::new();
        let p = self.weight_rec(root, &rank, &mut memo);
        let gap = rank[self.var_of(root) as usize];
        let mut out = widen(&p, gap);
        out.resize(over.len() + 1, BigUint::zero());
        Ok(out)
    }

    fn weight_rec(
        &self,
        n: NodeId,
        rank: &[usize],
        memo: &mut HashMap<NodeId, Vec<BigUint>>,
    ) -> Vec<BigUint> {
        match n {
            NodeId::FALSE => return vec![],
            NodeId::TRUE => return vec![BigUint::one()],
            _ => {}
        }
        if let Some(p) = memo.get(&n) {
            return p.clone();
        }
        let node = self.node(n);
        let v = node.var as usize;
        let gap_lo = rank[self.var_of(node.lo) as usize] - rank[v + 1];
        let gap_hi = rank[self.var_of(node.hi) as usize] - rank[v + 1];
        let lo = widen(&self.weight_rec(node.lo, rank, memo), gap_lo);
        let hi = widen(&self.weight_rec(node.hi, rank, memo), gap_hi);
        let mut p = vec![BigUint::zero(); lo.len().max(hi.len() + 1)];
        for (i, c) in lo.into_iter().enumerate() {
            p[i] += c;
        }
        for (i, c) in hi.into_iter().enumerate() {
            p[i + 1] += c;
        }
        memo.insert(n, p.clone());
        p
    }
}

/// Multiplies a weight profile by `(1 + t)^gap`.
fn widen(p: &[BigUint], gap: usize) -> Vec<BigUint> {
    let mut cur = p.to_vec();
    if cur.is_empty() {
        return cur;
    }
    for _ in 0..gap {
        let mut next = vec![BigUint::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c;
        }
        cur = next;
    }
    cur
}
