use std::collections::{BTreeSet, HashMap};

use super::{Assignment, EngineError, Func, Manager, NodeId, VarId};

impl Manager {
    /// Top variable and (low, high) children of `f`, or `None` for a constant.
    pub fn split(&self, f: Func) -> Option<(VarId, Func, Func)> {
        let n = self.owned(f);
        if n.is_terminal() {
            return None;
        }
        let node = self.node(n);
        Some((VarId(node.var), self.wrap(node.lo), self.wrap(node.hi)))
    }

    /// Restriction of `f` to the bindings in `a`.
    pub fn cofactor(&mut self, f: Func, a: &Assignment) -> Func {
        let root = self.owned(f);
        if a.is_empty() {
            return f;
        }
        let mut memo = HashMap::new();
        let r = self.cofactor_rec(root, a, &mut memo);
        self.wrap(r)
    }

    fn cofactor_rec(
        &mut self,
        n: NodeId,
        a: &Assignment,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> NodeId {
        if n.is_terminal() {
            return n;
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let node = self.node(n);
        let r = match a.get(VarId(node.var)) {
            Some(true) => self.cofactor_rec(node.hi, a, memo),
            Some(false) => self.cofactor_rec(node.lo, a, memo),
            None => {
                let lo = self.cofactor_rec(node.lo, a, memo);
                let hi = self.cofactor_rec(node.hi, a, memo);
                self.mk(node.var, lo, hi)
            }
        };
        memo.insert(n, r);
        r
    }

    /// `f|x=bit`.
    pub fn restrict(&mut self, f: Func, x: VarId, bit: bool) -> Func {
        let mut a = Assignment::new();
        a.bind(x, bit).expect("fresh assignment");
        self.cofactor(f, &a)
    }

    /// Both cofactors `(f|x=0, f|x=1)`.
    pub fn cofactors(&mut self, f: Func, x: VarId) -> (Func, Func) {
        (self.restrict(f, x, false), self.restrict(f, x, true))
    }

    /// Boolean derivative `f|x=1 xor f|x=0`.
    pub fn derivative(&mut self, f: Func, x: VarId) -> Func {
        let (f0, f1) = self.cofactors(f, x);
        self.xor(f1, f0)
    }

    /// Swaps the two cofactors of `y`.
    pub fn flip(&mut self, f: Func, y: VarId) -> Func {
        let set: BTreeSet<VarId> = std::iter::once(y).collect();
        self.flip_set(f, &set)
    }

    /// Flips the polarity of every variable in `ys` at once.
    pub fn flip_set(&mut self, f: Func, ys: &BTreeSet<VarId>) -> Func {
        let root = self.owned(f);
        let mut memo = HashMap::new();
        let r = self.flip_rec(root, ys, &mut memo);
        self.wrap(r)
    }

    fn flip_rec(
        &mut self,
        n: NodeId,
        ys: &BTreeSet<VarId>,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> NodeId {
        if n.is_terminal() {
            return n;
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let node = self.node(n);
        let lo = self.flip_rec(node.lo, ys, memo);
        let hi = self.flip_rec(node.hi, ys, memo);
        let r = if ys.contains(&VarId(node.var)) {
            self.mk(node.var, hi, lo)
        } else {
            self.mk(node.var, lo, hi)
        };
        memo.insert(n, r);
        r
    }

    /// Renames variables: the result `g` satisfies `g(σu) = f(u)`, i.e. every
    /// occurrence of `v` becomes `sigma[v]`.
    pub fn rename(&mut self, f: Func, sigma: &[VarId]) -> Result<Func, EngineError> {
        let root = self.own(f)?;
        let n = self.universe();
        if sigma.len() != n {
            return Err(EngineError::NotBijective);
        }
        let mut seen = vec![false; n];
        for v in sigma {
            if v.index() >= n || std::mem::replace(&mut seen[v.index()], true) {
                return Err(EngineError::NotBijective);
            }
        }
        let mut memo = HashMap::new();
        let r = self.rename_rec(root, sigma, &mut memo);
        Ok(r)
    }

    fn rename_rec(
        &mut self,
        n: NodeId,
        sigma: &[VarId],
        memo: &mut HashMap<NodeId, Func>,
    ) -> Func {
        if n.is_terminal() {
            return self.wrap(n);
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let node = self.node(n);
        let lo = self.rename_rec(node.lo, sigma, memo);
        let hi = self.rename_rec(node.hi, sigma, memo);
        let v = self
            .var(sigma[node.var as usize])
            .expect("bijection checked");
        let r = self.ite(v, hi, lo);
        memo.insert(n, r);
        r
    }

    /// `f[x/s] = s·f|x=1 ∨ ¬s·f|x=0`.
    pub fn substitute(&mut self, f: Func, x: VarId, s: Func) -> Func {
        let (f0, f1) = self.cofactors(f, x);
        self.ite(s, f1, f0)
    }

    /// Variables `f` essentially depends on.
    pub fn dep(&self, f: Func) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.owned(f)];
        while let Some(n) = stack.pop() {
            if n.is_terminal() || !seen.insert(n) {
                continue;
            }
            let node = self.node(n);
            out.insert(VarId(node.var));
            stack.push(node.lo);
            stack.push(node.hi);
        }
        out
    }

    pub fn depends_on(&self, f: Func, x: VarId) -> bool {
        self.dep(f).contains(&x)
    }

    pub fn is_monotone_in(&mut self, f: Func, x: VarId) -> bool {
        let (f0, f1) = self.cofactors(f, x);
        self.leq(f0, f1)
    }

    pub fn is_monotone(&mut self, f: Func) -> bool {
        let vars: Vec<VarId> = self.dep(f).into_iter().collect();
        vars.into_iter().all(|x| self.is_monotone_in(f, x))
    }

    /// `f^d(u) = ¬f(¬u)`.
    pub fn dual(&mut self, f: Func) -> Func {
        let all: BTreeSet<VarId> = self.vars().collect();
        let flipped = self.flip_set(f, &all);
        self.not(flipped)
    }

    /// Existential quantification over `vars`.
    pub fn exists(&mut self, f: Func, vars: &BTreeSet<VarId>) -> Func {
        let root = self.owned(f);
        let mut memo = HashMap::new();
        let r = self.exists_rec(root, vars, &mut memo);
        self.wrap(r)
    }

    fn exists_rec(
        &mut self,
        n: NodeId,
        vars: &BTreeSet<VarId>,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> NodeId {
        if n.is_terminal() {
            return n;
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let node = self.node(n);
        let lo = self.exists_rec(node.lo, vars, memo);
        let hi = self.exists_rec(node.hi, vars, memo);
        let r = if vars.contains(&VarId(node.var)) {
            self.apply_rec(super::BinOp::Or, lo, hi)
        } else {
            self.mk(node.var, lo, hi)
        };
        memo.insert(n, r);
        r
    }

    /// Universal quantification over `vars`.
    pub fn forall(&mut self, f: Func, vars: &BTreeSet<VarId>) -> Func {
        let nf = self.not(f);
        let e = self.exists(nf, vars);
        self.not(e)
    }

    /// Conjunction of literals.
    pub fn cube<I: IntoIterator<Item = (VarId, bool)>>(
        &mut self,
        lits: I,
    ) -> Result<Func, EngineError> {
        let mut acc = self.top();
        for (v, pos) in lits {
            let l = self.literal(v, pos)?;
            acc = self.and(acc, l);
        }
        Ok(acc)
    }

    /// Builds a function from a truth table whose index bit `i` is the value
    /// of variable `i`.
    pub fn from_truth_table(&mut self, table: &[bool]) -> Result<Func, EngineError> {
        let k = table.len().trailing_zeros() as usize;
        if !table.len().is_power_of_two() || k > self.universe() {
            return Err(EngineError::VarOutOfRange {
                var: k.saturating_sub(1) as u32,
                universe: self.universe,
            });
        }
        let r = self.table_rec(table, k, 0, 0);
        Ok(self.wrap(r))
    }

    fn table_rec(&mut self, table: &[bool], k: usize, level: usize, base: usize) -> NodeId {
        if level == k {
            return if table[base] { NodeId::TRUE } else { NodeId::FALSE };
        }
        let lo = self.table_rec(table, k, level + 1, base);
        let hi = self.table_rec(table, k, level + 1, base | 1 << level);
        self.mk(level as u32, lo, hi)
    }

    /// Truth table of `f` over its first `k` variables (`k ≤ 24`).
    pub fn truth_table(&self, f: Func, k: usize) -> Vec<bool> {
        assert!(k <= 24, "truth table too large");
        (0..1u64 << k).map(|bits| self.eval_bits(f, bits)).collect()
    }

    /// Copies `f` into `dst`, mapping each variable `v` to `map(v)`.
    pub fn transfer(
        &self,
        f: Func,
        dst: &mut Manager,
        map: &dyn Fn(VarId) -> VarId,
    ) -> Result<Func, EngineError> {
        let root = self.own(f)?;
        let mut memo: HashMap<NodeId, Func> = HashMap::new();
        self.transfer_rec(root, dst, map, &mut memo)
    }

    fn transfer_rec(
        &self,
        n: NodeId,
        dst: &mut Manager,
        map: &dyn Fn(VarId) -> VarId,
        memo: &mut HashMap<NodeId, Func>,
    ) -> Result<Func, EngineError> {
        if n.is_terminal() {
            return Ok(dst.constant(n == NodeId::TRUE));
        }
        if let Some(&r) = memo.get(&n) {
            return Ok(r);
        }
        let node = self.node(n);
        let lo = self.transfer_rec(node.lo, dst, map, memo)?;
        let hi = self.transfer_rec(node.hi, dst, map, memo)?;
        let v = dst.var(map(VarId(node.var)))?;
        let r = dst.ite(v, hi, lo);
        memo.insert(n, r);
        Ok(r)
    }

    /// Copies `f` into `dst` keeping variable ids.
    pub fn copy_to(&self, f: Func, dst: &mut Manager) -> Result<Func, EngineError> {
        self.transfer(f, dst, &|v| v)
    }
}
