use std::collections::BTreeSet;

use num_bigint::BigUint;
use proptest::prelude::*;

use super::*;

fn v(i: u32) -> VarId {
    VarId(i)
}

fn set(vs: &[u32]) -> BTreeSet<VarId> {
    vs.iter().map(|&i| VarId(i)).collect()
}

fn models(m: &Manager, f: Func, n: usize) -> usize {
    (0..1u64 << n).filter(|&b| m.eval_bits(f, b)).count()
}

fn table_strategy(max_n: usize) -> impl Strategy<Value = (usize, Vec<bool>)> {
    (1..=max_n).prop_flat_map(|n| (Just(n), prop::collection::vec(any::<bool>(), 1 << n)))
}

#[test]
fn constants_and_vars() {
    let mut m = Manager::new(3);
    let t = m.top();
    assert_eq!(m.expectation(t), Rational::from_integer(1.into()));
    let b = m.bot();
    assert_eq!(m.expectation(b), Rational::from_integer(0.into()));
    let x = m.var(v(0)).unwrap();
    let x2 = m.var(v(0)).unwrap();
    assert_eq!(x, x2);
    assert_eq!(m.dep(x), set(&[0]));
    assert!(matches!(
        m.var(v(3)),
        Err(EngineError::VarOutOfRange { var: 3, universe: 3 })
    ));
}

#[test]
fn connectives() {
    let mut m = Manager::new(2);
    let x = m.var(v(0)).unwrap();
    let y = m.var(v(1)).unwrap();
    let xx = m.xor(x, x);
    assert_eq!(xx, m.bot());
    let nx = m.not(x);
    assert_eq!(m.not(nx), x);
    let o = m.or(x, y);
    assert_eq!(models(&m, o, 2), 3);
}

#[test]
fn cross_manager_rejected() {
    let mut a = Manager::new(2);
    let mut b = Manager::new(2);
    let x = a.var(v(0)).unwrap();
    let y = b.var(v(1)).unwrap();
    assert_eq!(
        a.try_apply(BinOp::And, x, y),
        Err(EngineError::ManagerMismatch)
    );
}

#[test]
fn cofactor_examples() {
    // f = y ∨ xz with x=0, y=1, z=2
    let mut m = Manager::new(3);
    let (x, y, z) = (m.var(v(0)).unwrap(), m.var(v(1)).unwrap(), m.var(v(2)).unwrap());
    let xz = m.and(x, z);
    let f = m.or(y, xz);
    let f1 = m.restrict(f, v(0), true);
    let yz = m.or(y, z);
    assert_eq!(f1, yz);
    assert_eq!(m.restrict(f, v(0), false), y);
    assert_eq!(m.cofactor(f, &Assignment::new()), f);
    assert_eq!(m.dep(f), set(&[0, 1, 2]));
}

#[test]
fn derivative_examples() {
    let mut m = Manager::new(3);
    let (x, y) = (m.var(v(0)).unwrap(), m.var(v(1)).unwrap());
    let o = m.or(x, y);
    let ny = m.not(y);
    assert_eq!(m.derivative(o, v(0)), ny);
    assert_eq!(m.derivative(y, v(0)), m.bot());
    let p = m.xor(x, y);
    assert_eq!(m.derivative(p, v(0)), m.top());
}

#[test]
fn flip_and_rename() {
    let mut m = Manager::new(2);
    let (x, y) = (m.var(v(0)).unwrap(), m.var(v(1)).unwrap());
    let o = m.or(x, y);
    let ny = m.not(y);
    let expect = m.or(x, ny);
    let fl = m.flip(o, v(1));
    assert_eq!(fl, expect);
    assert_eq!(m.flip(fl, v(1)), o);

    let nx = m.not(x);
    let xny = m.and(x, ny);
    let ynx = m.and(y, nx);
    assert_eq!(m.rename(xny, &[v(1), v(0)]).unwrap(), ynx);
    assert_eq!(m.rename(xny, &[v(0), v(0)]), Err(EngineError::NotBijective));
    assert_eq!(m.rename(xny, &[v(0)]), Err(EngineError::NotBijective));
}

#[test]
fn substitute_examples() {
    // f = y ∨ xz, s = x1x2 with x=0,y=1,z=2,x1=3,x2=4
    let mut m = Manager::new(5);
    let vs: Vec<Func> = (0..5).map(|i| m.var(v(i)).unwrap()).collect();
    let xz = m.and(vs[0], vs[2]);
    let f = m.or(vs[1], xz);
    let s = m.and(vs[3], vs[4]);
    let got = m.substitute(f, v(0), s);
    let sz = m.and(s, vs[2]);
    let want = m.or(vs[1], sz);
    assert_eq!(got, want);
    assert_eq!(m.substitute(f, v(0), vs[0]), f);

    let p = m.xor(vs[0], vs[1]);
    let t = m.top();
    let ny = m.not(vs[1]);
    assert_eq!(m.substitute(p, v(0), t), ny);
}

#[test]
fn monotone_and_dual() {
    let mut m = Manager::new(2);
    let (x, y) = (m.var(v(0)).unwrap(), m.var(v(1)).unwrap());
    let o = m.or(x, y);
    let p = m.xor(x, y);
    assert!(m.is_monotone_in(o, v(0)));
    assert!(!m.is_monotone_in(p, v(0)));
    let a = m.and(x, y);
    assert_eq!(m.dual(a), o);
}

#[test]
fn counting_examples() {
    let mut m = Manager::new(3);
    let (x, y, z) = (m.var(v(0)).unwrap(), m.var(v(1)).unwrap(), m.var(v(2)).unwrap());
    let a = m.and(x, y);
    assert_eq!(m.sat_count(a), BigUint::from(2u32));
    let xy = m.or(x, y);
    let f = m.or(xy, z);
    let f0 = m.restrict(f, v(0), false);
    assert_eq!(m.expectation(f0), Rational::new(3.into(), 4.into()));

    let big = |xs: &[u32]| xs.iter().map(|&c| BigUint::from(c)).collect::<Vec<_>>();
    assert_eq!(m.count_by_weight(a, &set(&[0, 1])).unwrap(), big(&[0, 0, 1]));
    let t = m.top();
    assert_eq!(m.count_by_weight(t, &set(&[0, 1])).unwrap(), big(&[1, 2, 1]));
    assert_eq!(
        m.count_by_weight(xy, &set(&[0, 1, 2])).unwrap(),
        big(&[0, 2, 3, 1])
    );
    assert_eq!(
        m.count_by_weight(f, &set(&[0, 1])),
        Err(EngineError::DepNotCovered(v(2)))
    );
}

#[test]
fn modular_examples() {
    // f = x1 ∨ z1z2x2 with x1=0, z1=1, z2=2, x2=3
    let mut m = Manager::new(4);
    let vs: Vec<Func> = (0..4).map(|i| m.var(v(i)).unwrap()).collect();
    let g = m.and(vs[1], vs[2]);
    let gx2 = m.and(g, vs[3]);
    let f = m.or(vs[0], gx2);
    let (s, t) = m.modular_cofactors(f, g).unwrap();
    let x1x2 = m.or(vs[0], vs[3]);
    assert_eq!((s, t), (x1x2, vs[0]));
    let nx1 = m.not(vs[0]);
    let d = m.and(nx1, vs[3]);
    assert_eq!(m.modular_derivative(f, g).unwrap(), d);
    // Lemma 1 with x = z1
    let dz1 = m.derivative(f, v(1));
    let dg = m.derivative(g, v(1));
    assert_eq!(dz1, m.and(dg, d));

    let top = m.top();
    assert_eq!(m.modular_cofactors(f, top), None);
    let p = m.xor(vs[0], vs[1]);
    let a = m.and(vs[0], vs[1]);
    assert_eq!(m.modular_cofactors(p, a), None);
    assert_eq!(m.modular_derivative(g, g), Ok(top));
}

#[test]
fn transfer_roundtrip() {
    let mut a = Manager::new(3);
    let x = a.var(v(0)).unwrap();
    let z = a.var(v(2)).unwrap();
    let f = a.xor(x, z);
    let mut b = Manager::new(4);
    let g = a.transfer(f, &mut b, &|u| VarId(u.0 + 1)).unwrap();
    assert_eq!(b.dep(g), set(&[1, 3]));
    assert_eq!(b.sat_count(g), BigUint::from(8u32));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn canonicity(a in table_strategy(8), b in prop::collection::vec(any::<bool>(), 256)) {
        let (n, ta) = a;
        let tb: Vec<bool> = b[..1 << n].to_vec();
        let mut m = Manager::new(n);
        let fa = m.from_truth_table(&ta).unwrap();
        let fb = m.from_truth_table(&tb).unwrap();
        prop_assert_eq!(ta == tb, fa == fb);
        // rebuild via connectives and check the handle is shared
        let nfa = m.not(fa);
        let again = m.not(nfa);
        prop_assert_eq!(again, fa);
    }

    #[test]
    fn shannon_and_derivative((n, t) in table_strategy(7)) {
        let mut m = Manager::new(n);
        let f = m.from_truth_table(&t).unwrap();
        for i in 0..n as u32 {
            let x = m.var(v(i)).unwrap();
            let (f0, f1) = m.cofactors(f, v(i));
            let nx = m.not(x);
            let hi = m.and(x, f1);
            let lo = m.and(nx, f0);
            prop_assert_eq!(m.or(hi, lo), f);
            let d = m.derivative(f, v(i));
            prop_assert!(!m.depends_on(d, v(i)));
            for bits in 0..1u64 << n {
                let want = t[bits as usize] != t[(bits ^ 1 << i) as usize];
                prop_assert_eq!(m.eval_bits(d, bits), want);
            }
        }
    }

    #[test]
    fn sat_count_matches_enumeration((n, t) in table_strategy(10)) {
        let mut m = Manager::new(n);
        let f = m.from_truth_table(&t).unwrap();
        let want = t.iter().filter(|b| **b).count();
        prop_assert_eq!(m.sat_count(f), BigUint::from(want));
        let all: BTreeSet<VarId> = m.vars().collect();
        let prof = m.count_by_weight(f, &all).unwrap();
        for (k, c) in prof.iter().enumerate() {
            let want = t.iter().enumerate()
                .filter(|(i, b)| **b && i.count_ones() as usize == k).count();
            prop_assert_eq!(c, &BigUint::from(want));
        }
    }

    #[test]
    fn dual_involution((n, t) in table_strategy(6)) {
        let mut m = Manager::new(n);
        let f = m.from_truth_table(&t).unwrap();
        let d = m.dual(f);
        prop_assert_eq!(m.dual(d), f);
        prop_assert_eq!(m.dep(d), m.dep(f));
    }

    #[test]
    fn rename_semantics((n, t) in table_strategy(5), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<VarId> = (0..n as u32).map(VarId).collect();
        perm.shuffle(&mut rng);
        let mut m = Manager::new(n);
        let f = m.from_truth_table(&t).unwrap();
        let g = m.rename(f, &perm).unwrap();
        for bits in 0..1u64 << n {
            let mut moved = 0u64;
            for i in 0..n {
                if bits >> i & 1 == 1 {
                    moved |= 1 << perm[i].0;
                }
            }
            prop_assert_eq!(m.eval_bits(g, moved), t[bits as usize]);
        }
    }
}
