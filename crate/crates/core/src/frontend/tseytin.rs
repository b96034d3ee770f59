use std::collections::BTreeSet;

use super::dimacs::{var_lit, CnfDocument};
use super::formula::Formula;
use crate::engine::VarId;

/// Incremental Tseytin encoder. Fresh variables are numbered from a caller
/// chosen offset so several encodings can share one variable space.
#[derive(Debug, Clone)]
pub struct TseytinEncoder {
    next_var: u32,
    clauses: Vec<Vec<i32>>,
}

impl TseytinEncoder {
    /// `first_free` is the first DIMACS variable (1-based) the encoder may allocate.
    pub fn new(first_free: u32) -> Self {
        Self {
            next_var: first_free,
            clauses: Vec::new(),
        }
    }

    pub fn fresh(&mut self) -> i32 {
        let v = self.next_var as i32;
        self.next_var += 1;
        v
    }

    /// Highest DIMACS variable allocated so far.
    pub fn last_var(&self) -> u32 {
        self.next_var - 1
    }

    pub fn add_clause(&mut self, c: Vec<i32>) {
        self.clauses.push(c);
    }

    pub fn into_clauses(self) -> Vec<Vec<i32>> {
        self.clauses
    }

    /// Literal equivalent to `phi` under the definitions emitted so far.
    pub fn encode(&mut self, phi: &Formula) -> i32 {
        match phi {
            Formula::Var(v) => var_lit(*v, true),
            Formula::Not(a) => -self.encode(a),
            Formula::Const(b) => {
                let t = self.fresh();
                self.add_clause(vec![if *b { t } else { -t }]);
                t
            }
            Formula::And(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let t = self.fresh();
                self.add_clause(vec![-t, a]);
                self.add_clause(vec![-t, b]);
                self.add_clause(vec![t, -a, -b]);
                t
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let t = self.fresh();
                self.add_clause(vec![t, -a]);
                self.add_clause(vec![t, -b]);
                self.add_clause(vec![-t, a, b]);
                t
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let t = self.fresh();
                self.add_clause(vec![t, a]);
                self.add_clause(vec![t, -b]);
                self.add_clause(vec![-t, -a, b]);
                t
            }
            Formula::Xor(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let t = self.fresh();
                self.xor_def(t, a, b);
                t
            }
            Formula::Iff(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let t = self.fresh();
                self.xor_def(-t, a, b);
                t
            }
        }
    }

    fn xor_def(&mut self, t: i32, a: i32, b: i32) {
        self.add_clause(vec![-t, a, b]);
        self.add_clause(vec![-t, -a, -b]);
        self.add_clause(vec![t, -a, b]);
        self.add_clause(vec![t, a, -b]);
    }

    /// Asserts `phi`.
    pub fn assert(&mut self, phi: &Formula) {
        let root = self.encode(phi);
        self.add_clause(vec![root]);
    }
}

/// Projection-faithful CNF of `phi` over original variables `0..n_orig`.
pub fn tseytin(phi: &Formula, n_orig: usize) -> CnfDocument {
    let n_orig = n_orig.max(phi.vars().iter().map(|v| v.index() + 1).max().unwrap_or(0));
    let mut enc = TseytinEncoder::new(n_orig as u32 + 1);
    enc.assert(phi);
    let n_vars = enc.last_var() as usize;
    CnfDocument {
        n_vars,
        clauses: enc.into_clauses(),
        projection: Some((0..n_orig).map(VarId::from).collect::<BTreeSet<_>>()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Manager;
    use crate::frontend::formula::parse_formula;
    use proptest::prelude::*;

    /// Number of extensions of each original assignment, by enumeration.
    fn extensions(doc: &CnfDocument, n_orig: usize) -> Vec<usize> {
        let aux = doc.n_vars - n_orig;
        (0..1u64 << n_orig)
            .map(|u| {
                (0..1u64 << aux)
                    .filter(|w| {
                        let bits = u | w << n_orig;
                        doc.eval(&|v| bits >> v.0 & 1 == 1)
                    })
                    .count()
            })
            .collect()
    }

    #[test]
    fn small_examples() {
        let (f, vars) = parse_formula("x & y").unwrap();
        let doc = tseytin(&f, vars.len());
        assert_eq!(doc.n_vars, 3);
        assert_eq!(extensions(&doc, 2).iter().sum::<usize>(), 1);

        let (f, vars) = parse_formula("x").unwrap();
        let doc = tseytin(&f, vars.len());
        assert_eq!(doc.n_vars, 1);
        assert_eq!(doc.clauses, vec![vec![1]]);

        let (f, vars) = parse_formula("x ^ y").unwrap();
        let doc = tseytin(&f, vars.len());
        assert_eq!(extensions(&doc, 2), vec![0, 1, 1, 0]);
    }

    proptest! {
        #[test]
        fn projection_faithful(f in crate::frontend::formula::tests::arb_formula(4)) {
            let doc = tseytin(&f, 4);
            prop_assume!(doc.n_vars <= 16);
            let ext = extensions(&doc, 4);
            for (u, e) in ext.iter().enumerate() {
                let want = usize::from(f.eval(&|v| u >> v.0 & 1 == 1));
                prop_assert_eq!(*e, want);
            }
            // round trip through the engine with aux variables quantified away
            let mut m = Manager::new(doc.n_vars);
            let g = doc.to_func(&mut m).unwrap();
            let aux: BTreeSet<VarId> = (4..doc.n_vars).map(VarId::from).collect();
            let proj = m.exists(g, &aux);
            let want = f.to_func(&mut m).unwrap();
            prop_assert_eq!(proj, want);
        }
    }
}
