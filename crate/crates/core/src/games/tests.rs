use super::*;
use crate::frontend::parse_formula;
use crate::measures::ConstancyMeasure;
use crate::oracle::{tt_dominating, tt_hkr, tt_rectifying, TruthTable};
use crate::values::influence;
use proptest::prelude::*;

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn v(i: usize) -> VarId {
    VarId::from(i)
}

fn set(xs: &[usize]) -> BTreeSet<VarId> {
    xs.iter().map(|&i| v(i)).collect()
}

fn build(text: &str, n: usize) -> (Manager, Func) {
    let (phi, _) = parse_formula(text).unwrap();
    let mut m = Manager::new(n);
    let f = phi.to_func(&mut m).unwrap();
    (m, f)
}

fn arb_table(max_n: usize) -> impl Strategy<Value = TruthTable> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), 1 << n)
            .prop_map(move |bits| TruthTable::new(n, bits).unwrap())
    })
}

#[test]
fn dominating_examples() {
    let (mut m, f) = build("x | (y ^ z)", 3);
    let w = dominating_game(&mut m, f);
    assert!(w.value(&m, &set(&[1, 2])));
    assert!(!w.value(&m, &set(&[1])));
    assert!(w.value(&m, &set(&[0])));
    let top = m.top();
    assert_eq!(dominating_game(&mut m, top).carrier, m.top());
}

#[test]
fn rectifying_examples() {
    let (mut m, f) = build("x ^ y", 2);
    let nu = rectifying_game(&mut m, f);
    assert!(nu.value(&m, &set(&[0])));
    assert!(!nu.value(&m, &set(&[])));
    let bot = m.bot();
    assert_eq!(rectifying_game(&mut m, bot).carrier, m.bot());
    let (mut m, f) = build("x & y | z", 3);
    let a = dominating_game(&mut m, f).carrier;
    let b = rectifying_game(&mut m, f).carrier;
    assert_eq!(a, b);
}

#[test]
fn banzhaf_of_dominating_rankings() {
    let (mut m, g) = build("x | (y ^ z)", 3);
    let w = dominating_game(&mut m, g);
    let got: Vec<Rational> = (0..3).map(|i| w.banzhaf(&mut m, v(i))).collect();
    assert_eq!(got, vec![q(3, 4), q(1, 4), q(1, 4)]);
    let ng = m.not(g);
    let w = dominating_game(&mut m, ng);
    let got: Vec<Rational> = (0..3).map(|i| w.banzhaf(&mut m, v(i))).collect();
    assert_eq!(got, vec![q(1, 4), q(1, 4), q(1, 4)]);
}

#[test]
fn dictator_game_values() {
    let mut m = Manager::new(2);
    let x = m.var(v(0)).unwrap();
    let g = SimpleGame { carrier: x };
    assert_eq!(g.banzhaf(&mut m, v(0)), q(1, 1));
    assert_eq!(g.shapley(&mut m, v(0)), q(1, 1));
    assert_eq!(g.zvalue(&mut m, v(0)), q(1, 1));
    assert_eq!(g.banzhaf(&mut m, v(1)), q(0, 1));
    assert_eq!(g.shapley(&mut m, v(1)), q(0, 1));
    assert_eq!(g.zvalue(&mut m, v(1)), q(0, 1));
}

#[test]
fn hkr_examples() {
    let (mut m, f) = build("x | y | z", 3);
    let h = hkr_game(&mut m, f, &ConstancyMeasure::Abs, DEFAULT_N_LIMIT).unwrap();
    assert_eq!(h.value(&set(&[0])), &Value::Exact(q(3, 4)));
    // empty coalition: κ(E[f]) = κ(7/8)
    assert_eq!(h.value(&set(&[])), &Value::Exact(q(3, 4)));
    let (mut m, p) = build("x ^ y", 2);
    for k in [ConstancyMeasure::Quad, ConstancyMeasure::Abs, ConstancyMeasure::Log] {
        let h = hkr_game(&mut m, p, &k, DEFAULT_N_LIMIT).unwrap();
        assert_eq!(h.value(&set(&[])), &Value::zero());
        assert_eq!(h.value(&set(&[0])), &Value::zero());
    }
}

#[test]
fn hkr_limit() {
    let (mut m, f) = build("a & b & c & d", 4);
    let err = hkr_game(&mut m, f, &ConstancyMeasure::Quad, 3).unwrap_err();
    assert!(matches!(err, Error::LimitExceeded { size: 4, limit: 3, .. }));
    assert!(banzhaf_hkr_quad(&mut m, f, v(0), 3).is_err());
}

#[test]
fn banzhaf_hkr_quad_examples() {
    let mut m = Manager::new(1);
    let x = m.var(v(0)).unwrap();
    assert_eq!(banzhaf_hkr_quad(&mut m, x, v(0), DEFAULT_N_LIMIT).unwrap(), q(1, 1));
    let (mut m, p) = build("x ^ y", 2);
    let fast = banzhaf_hkr_quad(&mut m, p, v(0), DEFAULT_N_LIMIT).unwrap();
    assert_eq!(fast, q(1, 2));
    let h = hkr_game(&mut m, p, &ConstancyMeasure::Quad, DEFAULT_N_LIMIT).unwrap();
    assert_eq!(h.banzhaf(v(0)), Value::Exact(fast));
}

#[test]
fn z_of_dominating() {
    // 1 iff f ≠ ⊤ and one x-cofactor is ⊤
    for idx in 0..1u64 << 8 {
        let t = TruthTable::from_index(3, idx);
        let mut m = Manager::new(3);
        let f = t.to_func(&mut m).unwrap();
        let w = dominating_game(&mut m, f);
        for x in 0..3 {
            let (f0, f1) = m.cofactors(f, v(x));
            let expect = f != m.top() && (f0 == m.top() || f1 == m.top());
            assert_eq!(w.zvalue(&mut m, v(x)), q(i64::from(expect), 1));
        }
    }
}

#[test]
fn shapley_weights_sum_to_one() {
    for n in 1..=20 {
        let w = ContributionWeights::shapley(n);
        assert!(ContributionWeights::new(w.weights().to_vec()).is_ok(), "n={n}");
        let b = ContributionWeights::banzhaf(n);
        assert!(ContributionWeights::new(b.weights().to_vec()).is_ok(), "n={n}");
    }
    assert!(ContributionWeights::new(vec![q(1, 2), q(1, 1)]).is_err());
    assert!(ContributionWeights::new(vec![q(3, 2), q(-1, 2)]).is_err());
    assert!(ContributionWeights::new(vec![]).is_err());
}

#[test]
fn dummy_players_change_nothing() {
    let (phi, _) = parse_formula("x | (y ^ z)").unwrap();
    let mut small = Manager::new(3);
    let mut large = Manager::new(6);
    let fs = phi.to_func(&mut small).unwrap();
    let fl = phi.to_func(&mut large).unwrap();
    let ws = dominating_game(&mut small, fs);
    let wl = dominating_game(&mut large, fl);
    let hs = hkr_game(&mut small, fs, &ConstancyMeasure::Quad, DEFAULT_N_LIMIT).unwrap();
    let hl = hkr_game(&mut large, fl, &ConstancyMeasure::Quad, DEFAULT_N_LIMIT).unwrap();
    for x in 0..3 {
        assert_eq!(ws.banzhaf(&mut small, v(x)), wl.banzhaf(&mut large, v(x)));
        assert_eq!(ws.shapley(&mut small, v(x)), wl.shapley(&mut large, v(x)));
        assert_eq!(hs.banzhaf(v(x)), hl.banzhaf(v(x)));
        assert_eq!(hs.shapley(v(x)), hl.shapley(v(x)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn games_match_oracle(t in arb_table(5)) {
        let n = t.n();
        let mut m = Manager::new(n);
        let f = t.to_func(&mut m).unwrap();
        let w = dominating_game(&mut m, f);
        let nu = rectifying_game(&mut m, f);
        let tw = tt_dominating(&t);
        let tn = tt_rectifying(&t);
        let h = hkr_game(&mut m, f, &ConstancyMeasure::Quad, DEFAULT_N_LIMIT).unwrap();
        let th = tt_hkr(&t, &ConstancyMeasure::Quad);
        for s in 0..1usize << n {
            let coal: BTreeSet<VarId> = (0..n).filter(|i| s >> i & 1 == 1).map(v).collect();
            prop_assert_eq!(w.value(&m, &coal), tw[s]);
            prop_assert_eq!(nu.value(&m, &coal), tn[s]);
            prop_assert_eq!(h.value(&coal), &th[s]);
        }
    }

    #[test]
    fn carriers_monotone_and_dual(t in arb_table(6)) {
        let n = t.n();
        let mut m = Manager::new(n);
        let g = t.to_func(&mut m).unwrap();
        let w = dominating_game(&mut m, g).carrier;
        let ng = m.not(g);
        let nu = rectifying_game(&mut m, ng).carrier;
        prop_assert!(m.is_monotone(w));
        prop_assert!(m.is_monotone(nu));
        // ω_g(S) = 1 − ν_¬g(X∖S)
        let nnu = m.not(nu);
        let all: BTreeSet<VarId> = m.vars().collect();
        let dual = m.flip_set(nnu, &all);
        prop_assert_eq!(w, dual);
    }

    #[test]
    fn composition_identities(t in arb_table(5)) {
        let n = t.n();
        let mut m = Manager::new(n);
        let g = t.to_func(&mut m).unwrap();
        let ng = m.not(g);
        let w = dominating_game(&mut m, g);
        let nu = rectifying_game(&mut m, ng);
        let h = hkr_game(&mut m, g, &ConstancyMeasure::Quad, DEFAULT_N_LIMIT).unwrap();
        for x in 0..n {
            prop_assert_eq!(w.banzhaf(&mut m, v(x)), nu.banzhaf(&mut m, v(x)));
            prop_assert_eq!(w.shapley(&mut m, v(x)), nu.shapley(&mut m, v(x)));
            let (f0, f1) = m.cofactors(g, v(x));
            let d = m.expectation(f1) - m.expectation(f0);
            prop_assert_eq!(h.zvalue(v(x)), Value::Exact(&d * &d));
            let fast = banzhaf_hkr_quad(&mut m, g, v(x), DEFAULT_N_LIMIT).unwrap();
            prop_assert_eq!(h.banzhaf(v(x)), Value::Exact(fast));
        }
        if m.is_monotone(g) {
            let nu_g = rectifying_game(&mut m, g);
            for x in 0..n {
                let i = influence(&mut m, g, v(x));
                prop_assert_eq!(w.banzhaf(&mut m, v(x)), i.clone());
                prop_assert_eq!(nu_g.banzhaf(&mut m, v(x)), i);
            }
        }
    }

    #[test]
    fn hkr_unbiased(t in arb_table(5)) {
        let mut m = Manager::new(t.n());
        let g = t.to_func(&mut m).unwrap();
        let ng = m.not(g);
        for k in [ConstancyMeasure::Quad, ConstancyMeasure::Abs] {
            let a = hkr_game(&mut m, g, &k, DEFAULT_N_LIMIT).unwrap();
            let b = hkr_game(&mut m, ng, &k, DEFAULT_N_LIMIT).unwrap();
            for s in 0..1usize << a.players().len() {
                prop_assert_eq!(a.value_by_mask(s), b.value_by_mask(s));
            }
        }
    }
}
