use std::collections::BTreeSet;

use super::{Assignment, EngineError, Func, Manager, NodeId, VarId};

impl Manager {
    /// Lexicographically smallest assignment over `vars` (0 before 1, lowest
    /// variable most significant) under which `f` is true.
    pub fn first_model(&self, f: Func, vars: &BTreeSet<VarId>) -> Option<Assignment> {
        let mut n = self.owned(f);
        if n == NodeId::FALSE {
            return None;
        }
        let mut a = Assignment::new();
        while !n.is_terminal() {
            let node = self.node(n);
            let bit = node.lo == NodeId::FALSE;
            a.bind(VarId(node.var), bit).expect("path visits each var once");
            n = if bit { node.hi } else { node.lo };
        }
        for v in vars {
            if a.get(*v).is_none() {
                a.bind(*v, false).expect("unbound");
            }
        }
        Some(a)
    }

    /// `(f|g=1, f|g=0)` when `f` is modular in `g`, `None` otherwise.
    pub fn modular_cofactors(&mut self, f: Func, g: Func) -> Option<(Func, Func)> {
        if self.is_const(g).is_some() {
            return None;
        }
        let dg = self.dep(g);
        let ng = self.not(g);
        let u1 = self.first_model(g, &dg)?;
        let u0 = self.first_model(ng, &dg)?;
        let s = self.cofactor(f, &u1);
        let t = self.cofactor(f, &u0);
        if self.dep(s).iter().chain(self.dep(t).iter()).any(|v| dg.contains(v)) {
            return None;
        }
        let rebuilt = self.ite(g, s, t);
        (rebuilt == f).then_some((s, t))
    }

    /// Like [`Manager::modular_cofactors`] but also requires `s ≥ t`.
    pub fn monotone_modular_cofactors(&mut self, f: Func, g: Func) -> Option<(Func, Func)> {
        let (s, t) = self.modular_cofactors(f, g)?;
        self.leq(t, s).then_some((s, t))
    }

    /// `D_g f = f|g=1 xor f|g=0`.
    pub fn modular_derivative(&mut self, f: Func, g: Func) -> Result<Func, EngineError> {
        let (s, t) = self
            .modular_cofactors(f, g)
            .ok_or(EngineError::NotModular)?;
        Ok(self.xor(s, t))
    }
}
