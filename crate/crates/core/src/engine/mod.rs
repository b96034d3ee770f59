//! Reduced ordered binary decision diagrams over a fixed variable universe.
//!
//! A [`Manager`] owns every node; [`Func`] is a cheap copyable handle into it.
//! Nodes are hash-consed, so two semantically equal functions built in the
//! same manager always share the same handle. There are no complement edges,
//! negation goes through the (cached) apply machinery like every other
//! connective.

mod count;
mod modular;
mod ops;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

/// Arbitrary-precision model count.
pub type BigCount = BigUint;

/// Exact rational in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Position of a variable in the (fixed) order of a manager.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl From<usize> for VarId {
    fn from(i: usize) -> Self {
        VarId(i as u32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct NodeId(u32);

impl NodeId {
    pub(crate) const FALSE: NodeId = NodeId(0);
    pub(crate) const TRUE: NodeId = NodeId(1);

    fn is_terminal(self) -> bool {
        self.0 < 2
    }
}

/// Handle to a function stored in a [`Manager`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Func {
    node: NodeId,
    owner: u32,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    var: u32,
    lo: NodeId,
    hi: NodeId,
}

/// Binary connectives understood by [`Manager::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Xor,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("variable {var} is outside the universe of {universe} variables")]
    VarOutOfRange { var: u32, universe: u32 },
    #[error("operands belong to different managers")]
    ManagerMismatch,
    #[error("variable map is not a bijection on the universe")]
    NotBijective,
    #[error("function depends on {0} which is not in the counted set")]
    DepNotCovered(VarId),
    #[error("function is not modular in the given sub-function")]
    NotModular,
    #[error("assignment binds {0} twice")]
    DuplicateBinding(VarId),
    #[error("assignment is not total: {0} is unbound")]
    NotTotal(VarId),
}

/// Partial or total map from variables to bits.
///
/// Also doubles as the indicator of a subset `S`: variables in `S` map to
/// `true`, the others to `false`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    bindings: BTreeMap<VarId, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, bool)>>(
        pairs: I,
    ) -> Result<Self, EngineError> {
        let mut bindings = BTreeMap::new();
        for (v, b) in pairs {
            if bindings.insert(v, b).is_some() {
                return Err(EngineError::DuplicateBinding(v));
            }
        }
        Ok(Self { bindings })
    }

    /// Total assignment over `n` variables read from the low bits of `bits`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self {
            bindings: (0..n).map(|i| (VarId::from(i), bits >> i & 1 == 1)).collect(),
        }
    }

    /// Indicator assignment of `subset` over a universe of `n` variables.
    pub fn indicator(n: usize, subset: &BTreeSet<VarId>) -> Self {
        Self {
            bindings: (0..n)
                .map(|i| {
                    let v = VarId::from(i);
                    (v, subset.contains(&v))
                })
                .collect(),
        }
    }

    pub fn bind(&mut self, v: VarId, bit: bool) -> Result<(), EngineError> {
        if self.bindings.insert(v, bit).is_some() {
            return Err(EngineError::DuplicateBinding(v));
        }
        Ok(())
    }

    pub fn get(&self, v: VarId) -> Option<bool> {
        self.bindings.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, bool)> + '_ {
        self.bindings.iter().map(|(v, b)| (*v, *b))
    }

    /// True when every variable below `n` is bound.
    pub fn is_total(&self, n: usize) -> bool {
        (0..n).all(|i| self.bindings.contains_key(&VarId::from(i)))
    }
}

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(1);

/// Node store, unique table and operation caches for one variable universe.
pub struct Manager {
    id: u32,
    universe: u32,
    nodes: Vec<Node>,
    unique: HashMap<(u32, NodeId, NodeId), NodeId>,
    apply_cache: HashMap<(BinOp, NodeId, NodeId), NodeId>,
    not_cache: HashMap<NodeId, NodeId>,
    count_cache: HashMap<NodeId, BigUint>,
}

impl fmt::Debug for Manager {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Manager")
            .field("id", &self.id)
            .field("universe", &self.universe)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl Manager {
    /// Creates a manager over variables `0..universe`.
    pub fn new(universe: usize) -> Self {
        let universe = universe as u32;
        let terminal = Node {
            var: universe,
            lo: NodeId::FALSE,
            hi: NodeId::FALSE,
        };
        Self {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            universe,
            nodes: vec![terminal, terminal],
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            not_cache: HashMap::new(),
            count_cache: HashMap::new(),
        }
    }

    pub fn universe(&self) -> usize {
        self.universe as usize
    }

    /// Number of nodes allocated so far, terminals included.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.universe).map(VarId)
    }

    fn wrap(&self, node: NodeId) -> Func {
        Func {
            node,
            owner: self.id,
        }
    }

    pub(crate) fn own(&self, f: Func) -> Result<NodeId, EngineError> {
        if f.owner == self.id {
            Ok(f.node)
        } else {
            Err(EngineError::ManagerMismatch)
        }
    }

    fn owned(&self, f: Func) -> NodeId {
        self.own(f)
            .expect("function handle used with a manager that does not own it")
    }

    pub(crate) fn check_var(&self, v: VarId) -> Result<(), EngineError> {
        if v.0 < self.universe {
            Ok(())
        } else {
            Err(EngineError::VarOutOfRange {
                var: v.0,
                universe: self.universe,
            })
        }
    }

    #[inline]
    fn var_of(&self, n: NodeId) -> u32 {
        self.nodes[n.0 as usize].var
    }

    #[inline]
    fn node(&self, n: NodeId) -> Node {
        self.nodes[n.0 as usize]
    }

    /// Cofactors of `n` with respect to variable level `var`.
    #[inline]
    fn branches(&self, n: NodeId, var: u32) -> (NodeId, NodeId) {
        let node = self.node(n);
        if node.var == var {
            (node.lo, node.hi)
        } else {
            (n, n)
        }
    }

    pub(crate) fn mk(&mut self, var: u32, lo: NodeId, hi: NodeId) -> NodeId {
        if lo == hi {
            return lo;
        }
        debug_assert!(var < self.var_of(lo) && var < self.var_of(hi));
        if let Some(&id) = self.unique.get(&(var, lo, hi)) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node { var, lo, hi });
        self.unique.insert((var, lo, hi), id);
        id
    }

    pub fn constant(&self, bit: bool) -> Func {
        self.wrap(if bit { NodeId::TRUE } else { NodeId::FALSE })
    }

    pub fn top(&self) -> Func {
        self.constant(true)
    }

    pub fn bot(&self) -> Func {
        self.constant(false)
    }

    pub fn var(&mut self, v: VarId) -> Result<Func, EngineError> {
        self.check_var(v)?;
        let n = self.mk(v.0, NodeId::FALSE, NodeId::TRUE);
        Ok(self.wrap(n))
    }

    /// Positive (`true`) or negative literal of `v`.
    pub fn literal(&mut self, v: VarId, positive: bool) -> Result<Func, EngineError> {
        self.check_var(v)?;
        let n = if positive {
            self.mk(v.0, NodeId::FALSE, NodeId::TRUE)
        } else {
            self.mk(v.0, NodeId::TRUE, NodeId::FALSE)
        };
        Ok(self.wrap(n))
    }

    pub fn is_const(&self, f: Func) -> Option<bool> {
        match f.node {
            NodeId::TRUE => Some(true),
            NodeId::FALSE => Some(false),
            _ => None,
        }
    }

    /// Number of decision nodes reachable from `f`.
    pub fn size(&self, f: Func) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.owned(f)];
        while let Some(n) = stack.pop() {
            if n.is_terminal() || !seen.insert(n) {
                continue;
            }
            let node = self.node(n);
            stack.push(node.lo);
            stack.push(node.hi);
        }
        seen.len()
    }

    pub fn try_apply(&mut self, op: BinOp, f: Func, g: Func) -> Result<Func, EngineError> {
        let a = self.own(f)?;
        let b = self.own(g)?;
        let r = self.apply_rec(op, a, b);
        Ok(self.wrap(r))
    }

    /// Applies a binary connective.
    ///
    /// Panics if either operand belongs to another manager; use
    /// [`Manager::try_apply`] for a checked variant.
    pub fn apply(&mut self, op: BinOp, f: Func, g: Func) -> Func {
        self.try_apply(op, f, g)
            .expect("function handle used with a manager that does not own it")
    }

    pub fn and(&mut self, f: Func, g: Func) -> Func {
        self.apply(BinOp::And, f, g)
    }

    pub fn or(&mut self, f: Func, g: Func) -> Func {
        self.apply(BinOp::Or, f, g)
    }

    pub fn xor(&mut self, f: Func, g: Func) -> Func {
        self.apply(BinOp::Xor, f, g)
    }

    pub fn not(&mut self, f: Func) -> Func {
        let a = self.owned(f);
        let r = self.not_rec(a);
        self.wrap(r)
    }

    pub fn try_not(&mut self, f: Func) -> Result<Func, EngineError> {
        let a = self.own(f)?;
        let r = self.not_rec(a);
        Ok(self.wrap(r))
    }

    pub fn implies(&mut self, f: Func, g: Func) -> Func {
        let nf = self.not(f);
        self.or(nf, g)
    }

    pub fn iff(&mut self, f: Func, g: Func) -> Func {
        let x = self.xor(f, g);
        self.not(x)
    }

    /// `if c then t else e`.
    pub fn ite(&mut self, c: Func, t: Func, e: Func) -> Func {
        let ct = self.and(c, t);
        let nc = self.not(c);
        let ne = self.and(nc, e);
        self.or(ct, ne)
    }

    /// Pointwise `f <= g`.
    pub fn leq(&mut self, f: Func, g: Func) -> bool {
        let imp = self.implies(f, g);
        imp.node == NodeId::TRUE
    }

    pub fn and_all<I: IntoIterator<Item = Func>>(&mut self, fs: I) -> Func {
        let mut acc = self.top();
        for f in fs {
            acc = self.and(acc, f);
        }
        acc
    }

    pub fn or_all<I: IntoIterator<Item = Func>>(&mut self, fs: I) -> Func {
        let mut acc = self.bot();
        for f in fs {
            acc = self.or(acc, f);
        }
        acc
    }

    fn not_rec(&mut self, a: NodeId) -> NodeId {
        match a {
            NodeId::TRUE => return NodeId::FALSE,
            NodeId::FALSE => return NodeId::TRUE,
            _ => {}
        }
        if let Some(&r) = self.not_cache.get(&a) {
            return r;
        }
        let node = self.node(a);
        let lo = self.not_rec(node.lo);
        let hi = self.not_rec(node.hi);
        let r = self.mk(node.var, lo, hi);
        self.not_cache.insert(a, r);
        r
    }

    fn apply_rec(&mut self, op: BinOp, a: NodeId, b: NodeId) -> NodeId {
        use NodeId as N;
        match op {
            BinOp::And => {
                if a == N::FALSE || b == N::FALSE {
                    return N::FALSE;
                }
                if a == N::TRUE || a == b {
                    return b;
                }
                if b == N::TRUE {
                    return a;
                }
            }
            BinOp::Or => {
                if a == N::TRUE || b == N::TRUE {
                    return N::TRUE;
                }
                if a == N::FALSE || a == b {
                    return b;
                }
                if b == N::FALSE {
                    return a;
                }
            }
            BinOp::Xor => {
                if a == b {
                    return N::FALSE;
                }
                if a == N::FALSE {
                    return b;
                }
                if b == N::FALSE {
                    return a;
                }
                if a == N::TRUE {
                    return self.not_rec(b);
                }
                if b == N::TRUE {
                    return self.not_rec(a);
                }
            }
        }
        // all three connectives commute
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if let Some(&r) = self.apply_cache.get(&(op, a, b)) {
            return r;
        }
        let var = self.var_of(a).min(self.var_of(b));
        let (a0, a1) = self.branches(a, var);
        let (b0, b1) = self.branches(b, var);
        let lo = self.apply_rec(op, a0, b0);
        let hi = self.apply_rec(op, a1, b1);
        let r = self.mk(var, lo, hi);
        self.apply_cache.insert((op, a, b), r);
        r
    }

    /// Evaluates `f` under a total assignment given as a bit slice.
    pub fn eval(&self, f: Func, bits: &[bool]) -> bool {
        let mut n = self.owned(f);
        while !n.is_terminal() {
            let node = self.node(n);
            n = if bits[node.var as usize] { node.hi } else { node.lo };
        }
        n == NodeId::TRUE
    }

    /// Evaluates `f` on the assignment encoded in the low bits of `bits`.
    pub fn eval_bits(&self, f: Func, bits: u64) -> bool {
        let mut n = self.owned(f);
        while !n.is_terminal() {
            let node = self.node(n);
            n = if bits >> node.var & 1 == 1 { node.hi } else { node.lo };
        }
        n == NodeId::TRUE
    }

    /// Evaluates `f` under a total [`Assignment`].
    pub fn eval_assignment(&self, f: Func, a: &Assignment) -> Result<bool, EngineError> {
        let mut n = self.own(f)?;
        while !n.is_terminal() {
            let node = self.node(n);
            let v = VarId(node.var);
            let bit = a.get(v).ok_or(EngineError::NotTotal(v))?;
            n = if bit { node.hi } else { node.lo };
        }
        Ok(n == NodeId::TRUE)
    }
}

/// `count / 2^exp` as an exact rational.
pub fn dyadic(count: &BigUint, exp: usize) -> Rational {
    BigRational::new(
        BigInt::from(count.clone()),
        BigInt::from(BigUint::one() << exp),
    )
}

#[cfg(test)]
mod tests;
