//! Exhaustive and seeded-random checks of the IVF axioms and of the optional
//! properties, for any value function on truth tables.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{tt_measure, TruthTable};
use crate::engine::{Manager, Rational, VarId};
use crate::measures::Value;
use crate::values::{EvalOptions, Measure};

/// `(x, f) ↦ I_x(f)` on explicit tables.
pub trait ValueFunction {
    fn name(&self) -> String;
    fn value(&self, f: &TruthTable, x: usize) -> Value;
}

/// Fast path: decision diagrams.
impl ValueFunction for Measure {
    fn name(&self) -> String {
        self.to_string()
    }

    fn value(&self, f: &TruthTable, x: usize) -> Value {
        let mut m = Manager::new(f.n());
        let g = f.to_func(&mut m).expect("table sized to the manager");
        self.evaluate(&mut m, g, VarId::from(x), &EvalOptions::default())
            .expect("small tables stay within limits")
    }
}

/// Reference path: the truth-table definitions.
pub struct OracleMeasure(pub Measure);

impl ValueFunction for OracleMeasure {
    fn name(&self) -> String {
        format!("oracle:{}", self.0)
    }

    fn value(&self, f: &TruthTable, x: usize) -> Value {
        tt_measure(&self.0, f, x)
    }
}

/// Ad hoc value function from a closure.
pub struct FnValue<F>(pub String, pub F);

impl<F: Fn(&TruthTable, usize) -> Value> ValueFunction for FnValue<F> {
    fn name(&self) -> String {
        self.0.clone()
    }

    fn value(&self, f: &TruthTable, x: usize) -> Value {
        (self.1)(f, x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every function (n ≤ 4) and every generated modular instance.
    Exhaustive,
    /// `budget` sampled instances per check.
    Random { seed: u64, budget: usize },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exhaustive => write!(f, "exhaustive"),
            Mode::Random { seed, budget } => write!(f, "random(seed={seed}, budget={budget})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Bound,
    Dum,
    Dic,
    /// `I_x(f) = I_{σx}(σf)`
    TypePermute,
    /// `I_x(f) = I_x(flip_y f)`
    TypeFlip,
    ModEc,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Bound,
        Axiom::Dum,
        Axiom::Dic,
        Axiom::TypePermute,
        Axiom::TypeFlip,
        Axiom::ModEc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Bound => "bound",
            Axiom::Dum => "dum",
            Axiom::Dic => "dic",
            Axiom::TypePermute => "type-permute",
            Axiom::TypeFlip => "type-flip",
            Axiom::ModEc => "modec",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    RankPreserving,
    WeakRankPreserving,
    ChainRule,
    WeakChainRule,
    DerivativeDependent,
    CofactorAdditive,
    Unbiased,
    Winder,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::RankPreserving,
        Property::WeakRankPreserving,
        Property::ChainRule,
        Property::WeakChainRule,
        Property::DerivativeDependent,
        Property::CofactorAdditive,
        Property::Unbiased,
        Property::Winder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::RankPreserving => "rank-preserving",
            Property::WeakRankPreserving => "weak-rank-preserving",
            Property::ChainRule => "chain-rule",
            Property::WeakChainRule => "weak-chain-rule",
            Property::DerivativeDependent => "derivative-dependent",
            Property::CofactorAdditive => "cofactor-additive",
            Property::Unbiased => "unbiased",
            Property::Winder => "winder",
        }
    }
}

impl std::str::FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.replace('_', "-");
        Property::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| format!("unknown property {s:?}"))
    }
}

/// What has to hold between the values of the listed `(table, variable)` terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `0 ≤ a ≤ 1`
    InUnit,
    IsZero,
    IsOne,
    /// `a = b`
    Equal,
    /// `a ≥ b`
    AtLeast,
    /// `a ≥ b ⇒ c ≥ d`
    KeepsRank,
    /// `a = b · c`
    Product,
    /// `a = (b + c) / 2`
    Mean,
}

impl Relation {
    pub fn holds(self, v: &[Value]) -> bool {
        match self {
            Relation::InUnit => v[0].ge(&Value::zero()) && Value::one().ge(&v[0]),
            Relation::IsZero => v[0] == Value::zero(),
            Relation::IsOne => v[0] == Value::one(),
            Relation::Equal => v[0] == v[1],
            Relation::AtLeast => v[0].ge(&v[1]),
            Relation::KeepsRank => !v[0].ge(&v[1]) || v[2].ge(&v[3]),
            Relation::Product => v[0] == v[1].mul(&v[2]),
            Relation::Mean => v[0] == v[1].add(&v[2]).scale(&Rational::new(1.into(), 2.into())),
        }
    }

    fn describe(self, v: &[String]) -> String {
        match self {
            Relation::InUnit => format!("{} outside [0, 1]", v[0]),
            Relation::IsZero => format!("{} != 0", v[0]),
            Relation::IsOne => format!("{} != 1", v[0]),
            Relation::Equal => format!("{} != {}", v[0], v[1]),
            Relation::AtLeast => format!("{} < {}", v[0], v[1]),
            Relation::KeepsRank => format!("{} >= {} but {} < {}", v[0], v[1], v[2], v[3]),
            Relation::Product => format!("{} != {} * {}", v[0], v[1], v[2]),
            Relation::Mean => format!("{} != ({} + {}) / 2", v[0], v[1], v[2]),
        }
    }
}

/// A failing instance. `terms` are the evaluated `(table, variable)` pairs in
/// the order the relation reads them.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub f: TruthTable,
    pub g: Option<TruthTable>,
    pub h: Option<TruthTable>,
    pub x: usize,
    pub y: Option<usize>,
    pub sigma: Option<Vec<usize>>,
    pub relation: Relation,
    pub terms: Vec<(TruthTable, usize)>,
    pub values: Vec<Value>,
}

impl Counterexample {
    /// Re-evaluates the terms and confirms the relation still fails.
    pub fn replays(&self, vf: &dyn ValueFunction) -> bool {
        let v: Vec<Value> = self.terms.iter().map(|(t, x)| vf.value(t, *x)).collect();
        !self.relation.holds(&v)
    }

    pub fn summary(&self) -> String {
        let vals: Vec<String> = self.values.iter().map(|v| v.decimal()).collect();
        let mut s = format!("x=x{}", self.x);
        if let Some(y) = self.y {
            s += &format!(" y=x{y}");
        }
        if let Some(sigma) = &self.sigma {
            s += &format!(" sigma={sigma:?}");
        }
        s += &format!(" f={}", hex(&self.f));
        if let Some(g) = &self.g {
            s += &format!(" g={}", hex(g));
        }
        if let Some(h) = &self.h {
            s += &format!(" h={}", hex(h));
        }
        format!("{s}: {}", self.relation.describe(&vals))
    }
}

/// Truth table as hex, most significant assignment first.
pub fn hex(t: &TruthTable) -> String {
    let bits = t.bits();
    let digits = bits.len().div_ceil(4);
    let mut s = String::from("0x");
    for d in (0..digits).rev() {
        let mut nib = 0;
        for i in 0..4 {
            if bits.get(4 * d + i).copied().unwrap_or(false) {
                nib |= 1 << i;
            }
        }
        s.push(char::from_digit(nib, 16).unwrap());
    }
    s
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Holds { checked: usize },
    Violated(Box<Counterexample>),
    Skipped(String),
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated(_))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Violated(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds { checked } => write!(f, "holds ({checked} instances)"),
            Verdict::Violated(c) => write!(f, "VIOLATED {}", c.summary()),
            Verdict::Skipped(why) => write!(f, "skipped: {why}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub measure: String,
    pub n: usize,
    pub mode: Mode,
    pub verdicts: Vec<(String, Verdict)>,
}

impl AxiomReport {
    /// No violation and nothing skipped.
    pub fn all_hold(&self) -> bool {
        self.verdicts
            .iter()
            .all(|(_, v)| matches!(v, Verdict::Holds { .. }))
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "measure {} n={} mode={}", self.measure, self.n, self.mode)?;
        for (name, v) in &self.verdicts {
            writeln!(f, "  {name:<22} {v}")?;
        }
        Ok(())
    }
}

/// Largest `n` for exhaustive enumeration of all functions.
pub const EXHAUSTIVE_MAX_N: usize = 4;

/// Memoized evaluation plus the relation bookkeeping.
struct Ctx<'a> {
    vf: &'a dyn ValueFunction,
    cache: RefCell<HashMap<(TruthTable, usize), Value>>,
}

impl<'a> Ctx<'a> {
    fn new(vf: &'a dyn ValueFunction) -> Self {
        Self {
            vf,
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn val(&self, t: &TruthTable, x: usize) -> Value {
        if let Some(v) = self.cache.borrow().get(&(t.clone(), x)) {
            return v.clone();
        }
        let v = self.vf.value(t, x);
        self.cache.borrow_mut().insert((t.clone(), x), v.clone());
        v
    }
}

/// Accumulates checks of one axiom, stopping at the first failure.
struct Tally {
    checked: usize,
    failure: Option<Box<Counterexample>>,
}

/// Instance description handed to [`Tally::check`].
struct Case<'t> {
    f: &'t TruthTable,
    g: Option<&'t TruthTable>,
    h: Option<&'t TruthTable>,
    x: usize,
    y: Option<usize>,
    sigma: Option<&'t [usize]>,
}

impl<'t> Case<'t> {
    fn new(f: &'t TruthTable, x: usize) -> Self {
        Self {
            f,
            g: None,
            h: None,
            x,
            y: None,
            sigma: None,
        }
    }
}

impl Tally {
    fn new() -> Self {
        Self {
            checked: 0,
            failure: None,
        }
    }

    fn done(&self) -> bool {
        self.failure.is_some()
    }

    fn check(&mut self, ctx: &Ctx, case: Case, relation: Relation, terms: Vec<(TruthTable, usize)>) {
        if self.done() {
            return;
        }
        self.checked += 1;
        let values: Vec<Value> = terms.iter().map(|(t, x)| ctx.val(t, *x)).collect();
        if !relation.holds(&values) {
            self.failure = Some(Box::new(Counterexample {
                f: case.f.clone(),
                g: case.g.cloned(),
                h: case.h.cloned(),
                x: case.x,
                y: case.y,
                sigma: case.sigma.map(<[usize]>::to_vec),
                relation,
                terms,
                values,
            }));
        }
    }

    fn verdict(self) -> Verdict {
        match self.failure {
            Some(c) => Verdict::Violated(c),
            None => Verdict::Holds {
                checked: self.checked,
            },
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn random_table(rng: &mut ChaCha8Rng, n: usize) -> TruthTable {
    let bits = (0..1usize << n).map(|_| rng.gen()).collect();
    TruthTable::new(n, bits).expect("within the cap")
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    p
}

/// Functions under test: all of them, or `budget` random ones.
fn functions(n: usize, mode: Mode, salt: u64) -> Vec<TruthTable> {
    match mode {
        Mode::Exhaustive => (0..1u64 << (1 << n))
            .map(|i| TruthTable::from_index(n, i))
            .collect(),
        Mode::Random { seed, budget } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
            (0..budget).map(|_| random_table(&mut rng, n)).collect()
        }
    }
}

/// Non-constant functions over `b` variables, one per orbit under variable
/// permutations and polarity flips (the smallest index of each orbit).
fn canonical_blocks(b: usize) -> Vec<TruthTable> {
    let size = 1u64 << (1 << b);
    let perms = permutations(b);
    let mut seen = vec![false; size as usize];
    let mut reps = Vec::new();
    for idx in 0..size {
        if seen[idx as usize] {
            continue;
        }
        let t = TruthTable::from_index(b, idx);
        for p in &perms {
            let pt = t.permute(p);
            for mask in 0..1usize << b {
                let mut ft = pt.clone();
                for y in (0..b).filter(|y| mask >> y & 1 == 1) {
                    ft = ft.flip(y);
                }
                seen[table_index(&ft) as usize] = true;
            }
        }
        if idx != 0 && idx != size - 1 {
            reps.push(t);
        }
    }
    reps
}

fn table_index(t: &TruthTable) -> u64 {
    t.bits()
        .iter()
        .enumerate()
        .fold(0, |acc, (i, b)| if *b { acc | 1 << i } else { acc })
}

/// `g` over the low `b` variables, templates over the high `n − b`; returns
/// the substituted function `s·g ∨ ¬s·t` pointwise.
fn compose(n: usize, g: &TruthTable, s: &TruthTable, t: &TruthTable) -> TruthTable {
    let b = g.n();
    let low = (1usize << b) - 1;
    TruthTable::from_fn(n, |u| {
        if g.eval(u & low) {
            s.eval(u >> b)
        } else {
            t.eval(u >> b)
        }
    })
}

/// Generated modular instances: a block function `g` over the first `b`
/// variables and templates built from per-point levels over the rest.
struct ModularInstance {
    b: usize,
    g: TruthTable,
    /// per outer assignment, a level in `0..levels`
    code: Vec<usize>,
}

fn modular_instances(n: usize, levels: usize, mode: Mode, salt: u64) -> Vec<ModularInstance> {
    let mut out = Vec::new();
    match mode {
        Mode::Exhaustive => {
            // canonizing blocks of five or more variables is out of reach
            for b in 1..=n.min(4) {
                let a = n - b;
                let points = 1usize << a;
                let combos = levels.checked_pow(points as u32).unwrap_or(usize::MAX);
                if combos > 400_000 {
                    continue;
                }
                for g in canonical_blocks(b) {
                    for c in 0..combos {
                        let mut rest = c;
                        let code = (0..points)
                            .map(|_| {
                                let d = rest % levels;
                                rest /= levels;
                                d
                            })
                            .collect();
                        out.push(ModularInstance { b, g: g.clone(), code });
                    }
                }
            }
        }
        Mode::Random { seed, budget } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
            while out.len() < budget {
                let b = rng.gen_range(1..=n);
                let g = random_table(&mut rng, b);
                if g.dep().is_empty() {
                    continue;
                }
                let code = (0..1usize << (n - b))
                    .map(|_| rng.gen_range(0..levels))
                    .collect();
                out.push(ModularInstance { b, g, code });
            }
        }
    }
    out
}

impl ModularInstance {
    fn a(&self) -> usize {
        self.code.len().trailing_zeros() as usize
    }

    fn n(&self) -> usize {
        self.b + self.a()
    }

    /// `g` as a function over all `n` variables.
    fn g_full(&self) -> TruthTable {
        self.g.extend(self.a())
    }

    /// `k`-th of the nested templates: the set of points whose level exceeds `k`.
    fn template(&self, k: usize) -> TruthTable {
        TruthTable::from_fn(self.a(), |u| self.code[u] > k)
    }

    fn dep_g(&self) -> BTreeSet<usize> {
        self.g.dep()
    }
}

/// Checks Bound, Dum, Dic, both parts of Type and ModEC.
pub fn check_ivf_axioms(vf: &dyn ValueFunction, n: usize, mode: Mode) -> AxiomReport {
    let mut report = AxiomReport {
        measure: vf.name(),
        n,
        mode,
        verdicts: Vec::new(),
    };
    if n == 0 || (mode == Mode::Exhaustive && n > EXHAUSTIVE_MAX_N) {
        for a in Axiom::ALL {
            report.verdicts.push((
                a.name().into(),
                Verdict::Skipped(format!("exhaustive mode supports 1 ≤ n ≤ {EXHAUSTIVE_MAX_N}")),
            ));
        }
        return report;
    }
    let ctx = Ctx::new(vf);
    let fs = functions(n, mode, 0x11);
    let perms = match mode {
        Mode::Exhaustive => permutations(n),
        Mode::Random { .. } => Vec::new(),
    };
    let mut rng = match mode {
        Mode::Random { seed, .. } => ChaCha8Rng::seed_from_u64(seed ^ 0x22),
        Mode::Exhaustive => ChaCha8Rng::seed_from_u64(0),
    };

    let mut bound = Tally::new();
    let mut dum = Tally::new();
    let mut type_p = Tally::new();
    let mut type_f = Tally::new();
    for f in &fs {
        let dep = f.dep();
        let sampled;
        let sigmas: &[Vec<usize>] = if perms.is_empty() {
            sampled = vec![random_perm(&mut rng, n)];
            &sampled
        } else {
            &perms
        };
        for x in 0..n {
            bound.check(&ctx, Case::new(f, x), Relation::InUnit, vec![(f.clone(), x)]);
            if !dep.contains(&x) {
                dum.check(&ctx, Case::new(f, x), Relation::IsZero, vec![(f.clone(), x)]);
            }
            for sigma in sigmas {
                let sf = f.permute(sigma);
                let case = Case {
                    sigma: Some(sigma),
                    ..Case::new(f, x)
                };
                type_p.check(&ctx, case, Relation::Equal, vec![(f.clone(), x), (sf, sigma[x])]);
            }
            for y in 0..n {
                let case = Case {
                    y: Some(y),
                    ..Case::new(f, x)
                };
                type_f.check(&ctx, case, Relation::Equal, vec![(f.clone(), x), (f.flip(y), x)]);
            }
        }
    }

    let mut dic = Tally::new();
    for x in 0..n {
        let v = TruthTable::var(n, x);
        for t in [v.clone(), v.not()] {
            dic.check(&ctx, Case::new(&t, x), Relation::IsOne, vec![(t.clone(), x)]);
        }
    }

    // ModEC: f = s_f·g ∨ ¬s_f·t_f, h likewise, with s_f ≥ s_h ≥ t_h ≥ t_f
    let mut modec = Tally::new();
    for inst in modular_instances(n, 5, mode, 0x33) {
        if modec.done() {
            break;
        }
        let (sf, sh, th, tf) = (
            inst.template(0),
            inst.template(1),
            inst.template(2),
            inst.template(3),
        );
        let f = compose(n, &inst.g, &sf, &tf);
        let h = compose(n, &inst.g, &sh, &th);
        let g = inst.g_full();
        for x in inst.dep_g() {
            let case = Case {
                g: Some(&g),
                h: Some(&h),
                ..Case::new(&f, x)
            };
            modec.check(&ctx, case, Relation::AtLeast, vec![(f.clone(), x), (h.clone(), x)]);
        }
    }

    for (a, t) in [
        (Axiom::Bound, bound),
        (Axiom::Dum, dum),
        (Axiom::Dic, dic),
        (Axiom::TypePermute, type_p),
        (Axiom::TypeFlip, type_f),
        (Axiom::ModEc, modec),
    ] {
        report.verdicts.push((a.name().into(), t.verdict()));
    }
    report
}

/// Checks one optional property. Exhaustive mode enumerates all functions
/// for `n ≤ 4` and every modular split whose template space is small enough.
pub fn check_optional(
    vf: &dyn ValueFunction,
    property: Property,
    n: usize,
    mode: Mode,
) -> AxiomReport {
    let mut report = AxiomReport {
        measure: vf.name(),
        n,
        mode,
        verdicts: Vec::new(),
    };
    let modular = matches!(
        property,
        Property::RankPreserving
            | Property::WeakRankPreserving
            | Property::ChainRule
            | Property::WeakChainRule
    );
    let max_n = match property {
        Property::DerivativeDependent => 3,
        _ if modular => 6,
        _ => EXHAUSTIVE_MAX_N,
    };
    if n == 0 || (mode == Mode::Exhaustive && n > max_n) {
        report.verdicts.push((
            property.name().into(),
            Verdict::Skipped(format!("exhaustive mode supports 1 ≤ n ≤ {max_n} here")),
        ));
        return report;
    }
    let ctx = Ctx::new(vf);
    let tally = match property {
        Property::RankPreserving | Property::WeakRankPreserving => {
            rank_preserving(&ctx, n, mode, property == Property::WeakRankPreserving)
        }
        Property::ChainRule | Property::WeakChainRule => {
            chain_rule(&ctx, n, mode, property == Property::WeakChainRule)
        }
        Property::DerivativeDependent => derivative_dependent(&ctx, n, mode),
        Property::CofactorAdditive => {
            let mut t = Tally::new();
            for f in functions(n, mode, 0x44) {
                for x in 0..n {
                    for z in (0..n).filter(|&z| z != x) {
                        let case = Case {
                            y: Some(z),
                            ..Case::new(&f, x)
                        };
                        let terms = vec![
                            (f.clone(), x),
                            (f.restrict(z, false), x),
                            (f.restrict(z, true), x),
                        ];
                        t.check(&ctx, case, Relation::Mean, terms);
                    }
                }
            }
            t
        }
        Property::Unbiased => {
            let mut t = Tally::new();
            for f in functions(n, mode, 0x55) {
                for x in 0..n {
                    t.check(&ctx, Case::new(&f, x), Relation::Equal, vec![(f.clone(), x), (f.not(), x)]);
                }
            }
            t
        }
        Property::Winder => {
            let mut t = Tally::new();
            for f in functions(n, mode, 0x66) {
                for x in 0..n {
                    for y in (0..n).filter(|&y| y != x) {
                        if !f.is_monotone_in(x) || !f.is_monotone_in(y) {
                            continue;
                        }
                        let a = f.restrict(x, true).restrict(y, false);
                        let b = f.restrict(x, false).restrict(y, true);
                        if a.geq(&b) {
                            let case = Case {
                                y: Some(y),
                                ..Case::new(&f, x)
                            };
                            t.check(&ctx, case, Relation::AtLeast, vec![(f.clone(), x), (f.clone(), y)]);
                        }
                    }
                }
            }
            t
        }
    };
    report.verdicts.push((property.name().into(), tally.verdict()));
    report
}

/// Levels per template point: `s ≥ t` has three, unconstrained `s, t` four.
fn template_pair(inst: &ModularInstance, monotone: bool) -> (TruthTable, TruthTable) {
    if monotone {
        (inst.template(0), inst.template(1))
    } else {
        let a = inst.a();
        (
            TruthTable::from_fn(a, |u| inst.code[u] & 1 == 1),
            TruthTable::from_fn(a, |u| inst.code[u] & 2 == 2),
        )
    }
}

fn rank_preserving(ctx: &Ctx, n: usize, mode: Mode, weak: bool) -> Tally {
    let mut t = Tally::new();
    let levels = if weak { 3 } else { 4 };
    for inst in modular_instances(n, levels, mode, 0x77) {
        if t.done() {
            break;
        }
        let (s, tt) = template_pair(&inst, weak);
        let f = compose(n, &inst.g, &s, &tt);
        let g = inst.g_full();
        let dep: Vec<usize> = inst.dep_g().into_iter().collect();
        for &x in &dep {
            for &y in dep.iter().filter(|&&y| y != x) {
                let case = Case {
                    g: Some(&g),
                    y: Some(y),
                    ..Case::new(&f, x)
                };
                let terms = vec![(g.clone(), x), (g.clone(), y), (f.clone(), x), (f.clone(), y)];
                t.check(ctx, case, Relation::KeepsRank, terms);
            }
        }
    }
    t
}

/// `f[g/x_g]` where `x_g` is the first variable outside `dep(f)`, adding one
/// to the universe if there is none.
fn lift_template(inst: &ModularInstance, f: &TruthTable, s: &TruthTable, t: &TruthTable) -> (TruthTable, usize) {
    let n = inst.n();
    let dep = f.dep();
    let slot = (0..n).find(|v| !dep.contains(v)).unwrap_or(n);
    let width = if slot == n { n + 1 } else { n };
    let b = inst.b;
    let l = TruthTable::from_fn(width, |u| {
        let outer = (u & ((1 << n) - 1)) >> b;
        if u >> slot & 1 == 1 {
            s.eval(outer)
        } else {
            t.eval(outer)
        }
    });
    (l, slot)
}

/// `f = g·s ∨ ¬g·t` with `g` on a block of low variables and `s, t` on the rest.
#[derive(Clone, Debug)]
pub struct ModularSample {
    pub f: TruthTable,
    /// the block function over the whole universe of `f`
    pub g: TruthTable,
    /// `f[g/x_g]`, possibly one variable wider than `f`
    pub lifted: TruthTable,
    pub x_g: usize,
    pub block: BTreeSet<usize>,
}

/// `count` seeded samples over `n` variables in which `f` really depends on
/// `g`. With `monotone` the templates satisfy `s ≥ t`.
pub fn modular_samples(n: usize, count: usize, monotone: bool, seed: u64) -> Vec<ModularSample> {
    let levels = if monotone { 3 } else { 4 };
    let mut out = Vec::with_capacity(count);
    let mut round = 0u64;
    while out.len() < count {
        let mode = Mode::Random {
            seed: seed.wrapping_add(round),
            budget: count,
        };
        round += 1;
        for inst in modular_instances(n, levels, mode, 0x99) {
            let (s, t) = template_pair(&inst, monotone);
            if s == t || out.len() == count {
                continue;
            }
            let f = compose(n, &inst.g, &s, &t);
            let (lifted, x_g) = lift_template(&inst, &f, &s, &t);
            out.push(ModularSample {
                g: inst.g_full(),
                block: inst.dep_g(),
                f,
                lifted,
                x_g,
            });
        }
    }
    out
}

fn chain_rule(ctx: &Ctx, n: usize, mode: Mode, weak: bool) -> Tally {
    let mut t = Tally::new();
    let levels = if weak { 3 } else { 4 };
    for inst in modular_instances(n, levels, mode, 0x88) {
        if t.done() {
            break;
        }
        let (s, tt) = template_pair(&inst, weak);
        let f = compose(n, &inst.g, &s, &tt);
        let g = inst.g_full();
        let (l, slot) = lift_template(&inst, &f, &s, &tt);
        for x in inst.dep_g() {
            let case = Case {
                g: Some(&g),
                h: Some(&l),
                y: Some(slot),
                ..Case::new(&f, x)
            };
            let terms = vec![(f.clone(), x), (g.clone(), x), (l.clone(), slot)];
            t.check(ctx, case, Relation::Product, terms);
        }
    }
    t
}

fn derivative_dependent(ctx: &Ctx, n: usize, mode: Mode) -> Tally {
    let mut t = Tally::new();
    let check = |t: &mut Tally, f: &TruthTable, h: &TruthTable, x: usize| {
        let case = Case {
            h: Some(h),
            ..Case::new(f, x)
        };
        t.check(ctx, case, Relation::AtLeast, vec![(f.clone(), x), (h.clone(), x)]);
    };
    match mode {
        Mode::Exhaustive => {
            let fs = functions(n, mode, 0);
            let derivs: Vec<Vec<TruthTable>> = fs
                .iter()
                .map(|f| (0..n).map(|x| f.derivative(x)).collect())
                .collect();
            for (i, f) in fs.iter().enumerate() {
                for (j, h) in fs.iter().enumerate() {
                    for (x, (di, dj)) in derivs[i].iter().zip(&derivs[j]).enumerate() {
                        if t.done() {
                            return t;
                        }
                        if di.geq(dj) {
                            check(&mut t, f, h, x);
                        }
                    }
                }
            }
        }
        Mode::Random { seed, budget } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x99);
            for _ in 0..budget {
                let f = random_table(&mut rng, n);
                let x = rng.gen_range(0..n);
                // h keeps a random part of D_x f and an arbitrary x-free base
                let keep = random_table(&mut rng, n).restrict(x, false);
                let base = random_table(&mut rng, n).restrict(x, false);
                let d = f.derivative(x).and(&keep);
                let h = base.xor(&TruthTable::var(n, x).and(&d));
                check(&mut t, &f, &h, x);
            }
        }
    }
    t
}

/// Checks `I_x(g) ≥ I_y(g) ⇒ I_x(f) ≥ I_y(f)` on one given pair.
pub fn check_rank_pair(
    vf: &dyn ValueFunction,
    f: &TruthTable,
    g: &TruthTable,
    x: usize,
    y: usize,
) -> Option<Counterexample> {
    let ctx = Ctx::new(vf);
    let mut t = Tally::new();
    let case = Case {
        g: Some(g),
        y: Some(y),
        ..Case::new(f, x)
    };
    let terms = vec![(g.clone(), x), (g.clone(), y), (f.clone(), x), (f.clone(), y)];
    t.check(&ctx, case, Relation::KeepsRank, terms);
    t.failure.map(|c| *c)
}
