use super::*;
use crate::engine::VarId;
use crate::frontend::{parse_formula, parse_formula_with, VarMap};
use crate::measures::Value;
use crate::oracle::{tt_blame, tt_influence, tt_mscs, tt_scs, TruthTable};
use proptest::prelude::*;

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn v(i: usize) -> VarId {
    VarId::from(i)
}

/// Parses over names `x0..x3, z` in that order.
fn reference(text: &str) -> (Manager, Func) {
    let mut names = VarMap::from_names(["x0", "x1", "x2", "x3", "z"]);
    let phi = parse_formula_with(text, &mut names).unwrap();
    let mut m = Manager::new(5);
    let f = phi.to_func(&mut m).unwrap();
    (m, f)
}

fn round4(r: &Rational) -> String {
    format!("{:.4}", crate::measures::rational_to_f64(r))
}

fn func_of(m: &mut Manager, tt: &TruthTable) -> Func {
    tt.to_func(m).unwrap()
}

#[test]
fn influence_examples() {
    let (phi, _) = parse_formula("x | y").unwrap();
    let mut m = Manager::new(3);
    let f = phi.to_func(&mut m).unwrap();
    assert_eq!(influence(&mut m, f, v(0)), q(1, 2));
    assert_eq!(influence(&mut m, f, v(2)), q(0, 1));
    let x = m.var(v(0)).unwrap();
    assert_eq!(influence(&mut m, x, v(0)), q(1, 1));
}

#[test]
fn influence_via_formula_examples() {
    for (text, n) in [("x | ~x & y", 2), ("x", 1), ("x ^ y ^ z", 3)] {
        let (phi, _) = parse_formula(text).unwrap();
        let mut m = Manager::new(n);
        let f = phi.to_func(&mut m).unwrap();
        for x in 0..n {
            assert_eq!(
                influence_via_formula(&phi, n, v(x)).unwrap(),
                influence(&mut m, f, v(x)),
                "{text} {x}"
            );
        }
    }
    let (phi, _) = parse_formula("x ^ y ^ z").unwrap();
    assert_eq!(influence_via_formula(&phi, 3, v(0)).unwrap(), q(1, 1));
    assert!(influence_via_formula(&phi, 3, v(7)).is_err());
    assert_eq!(influence_via_formula(&phi, 4, v(3)).unwrap(), q(0, 1));
}

#[test]
fn gamma_examples() {
    let mut m = Manager::new(2);
    let x = m.var(v(0)).unwrap();
    let seq = gamma_sequence(&mut m, x, v(0), Variant::Modified);
    assert_eq!(seq.levels[0], m.top());
    assert_eq!(seq.fixpoint_level, Some(1));

    let y = m.var(v(1)).unwrap();
    let f = m.or(x, y);
    let seq = gamma_sequence(&mut m, f, v(0), Variant::Chk);
    assert_eq!(m.sat_count(seq.levels[0]), 2u32.into());
    let seq = gamma_sequence(&mut m, f, v(0), Variant::Modified);
    assert_eq!(seq.level(1), m.top());
    assert_eq!(seq.level(9), m.top());
}

#[test]
fn blame_examples() {
    let (phi, _) = parse_formula("x | y").unwrap();
    let mut m = Manager::new(3);
    let f = phi.to_func(&mut m).unwrap();
    assert_eq!(blame(&mut m, f, v(0), &ShareFunction::Exp, Variant::Chk), q(5, 8));
    assert_eq!(blame(&mut m, f, v(2), &ShareFunction::Exp, Variant::Chk), q(0, 1));

    // (x ⊕ y) ∨ z against x ∨ z: the inner parity has modified blame one
    let mut m = Manager::new(3);
    let (x, y, z) = (m.var(v(0)).unwrap(), m.var(v(1)).unwrap(), m.var(v(2)).unwrap());
    let xy = m.xor(x, y);
    let lhs = m.or(xy, z);
    let rhs = m.or(x, z);
    let a = blame(&mut m, lhs, v(0), &ShareFunction::Exp, Variant::Modified);
    let b = blame(&mut m, rhs, v(0), &ShareFunction::Exp, Variant::Modified);
    assert_eq!(a, b);
    let t = TruthTable::from_func(&m, lhs);
    assert_eq!(a, tt_blame(&t, 0, &ShareFunction::Exp, Variant::Modified));
}

#[test]
fn scs_table_formulas() {
    // over x, y, z with ρ symbolic through three custom tables
    let rhos = [
        ShareFunction::Exp,
        ShareFunction::Frac,
        ShareFunction::custom(vec![q(1, 1), q(1, 3), q(1, 7)]).unwrap(),
    ];
    for rho in &rhos {
        let (r1, r2) = (rho.eval(Some(1)), rho.eval(Some(2)));
        let cases = [
            ("(x ^ y) | z", (q(4, 1) + &r1 * q(2, 1) + &r2 * q(2, 1)) / q(8, 1)),
            ("x | y | z", (q(2, 1) + &r1 * q(2, 1) + r2.clone()) / q(8, 1)),
            ("x | y | 0 & z", (q(4, 1) + &r1 * q(2, 1)) / q(8, 1)),
            ("x ^ y | 0 & z", q(1, 1)),
        ];
        for (text, want) in cases {
            let (phi, _) = parse_formula(text).unwrap();
            let mut m = Manager::new(3);
            let f = phi.to_func(&mut m).unwrap();
            assert_eq!(blame(&mut m, f, v(0), rho, Variant::Chk), want, "{text}");
        }
    }
}

#[test]
fn reference_exp_tables() {
    let g = "~x1 & ~x0 & ~x2 | x1 & x0 & x2 | x3 & ~x0 & ~x2 | x3 & x0 & x2 | x3 & x1";
    let (mut m, gf) = reference(g);
    let want_g = [(0, "0.7188"), (1, "0.7266"), (2, "0.7188"), (3, "0.6250")];
    for (x, s) in want_g {
        assert_eq!(round4(&blame(&mut m, gf, v(x), &ShareFunction::Exp, Variant::Chk)), s);
    }
    let (mut m, ff) = reference(&format!("{g} | z"));
    let want_f = [(0, "0.5000"), (1, "0.4980"), (2, "0.5000"), (3, "0.4062"), (4, "0.6172")];
    for (x, s) in want_f {
        assert_eq!(round4(&blame(&mut m, ff, v(x), &ShareFunction::Exp, Variant::Chk)), s);
    }
}

#[test]
fn reference_frac_tables() {
    let g = "x1 & ~x0 & ~x2 | ~x1 & x0 | x3";
    let (mut m, gf) = reference(g);
    let want_g = [(0, "0.6302"), (1, "0.6302"), (2, "0.2969"), (3, "0.7188")];
    for (x, s) in want_g {
        assert_eq!(round4(&blame(&mut m, gf, v(x), &ShareFunction::Frac, Variant::Chk)), s);
    }
    let (mut m, ff) = reference(&format!("{g} | z"));
    let want_f = [(0, "0.4802"), (1, "0.4802"), (2, "0.2250"), (3, "0.4688"), (4, "0.4688")];
    for (x, s) in want_f {
        assert_eq!(round4(&blame(&mut m, ff, v(x), &ShareFunction::Frac, Variant::Chk)), s);
    }
}

#[test]
fn rank_all_orders_by_value_then_id() {
    let g = "~x1 & ~x0 & ~x2 | x1 & x0 & x2 | x3 & ~x0 & ~x2 | x3 & x0 & x2 | x3 & x1";
    let (mut m, gf) = reference(g);
    let r = rank_all(&mut m, gf, &Measure::blame(ShareFunction::Exp), &EvalOptions::default())
        .unwrap();
    let order: Vec<usize> = r.entries.iter().map(|(x, _)| x.index()).collect();
    // z is outside dep(g) and reported as zero
    assert_eq!(order, vec![4, 3, 0, 2, 1]);
    assert_eq!(r.get(v(4)), Some(&Value::zero()));

    let mut m = Manager::new(3);
    let (phi, _) = parse_formula("x & y & z | ~x & ~y & ~z").unwrap();
    let f = phi.to_func(&mut m).unwrap();
    let r = rank_all(&mut m, f, &Measure::Influence, &EvalOptions::default()).unwrap();
    assert!(r.entries.windows(2).all(|w| w[0].1 == w[1].1));

    let bot = m.bot();
    let r = rank_all(&mut m, bot, &Measure::blame(ShareFunction::Frac), &EvalOptions::default())
        .unwrap();
    assert!(r.entries.iter().all(|(_, val)| *val == Value::zero()));
}

#[test]
fn step_blame_is_influence_exhaustive() {
    for n in 1..=3 {
        for idx in 0..1u64 << (1 << n) {
            let t = TruthTable::from_index(n, idx);
            let mut m = Manager::new(n);
            let f = func_of(&mut m, &t);
            for x in 0..n {
                let i = influence(&mut m, f, v(x));
                assert_eq!(blame(&mut m, f, v(x), &ShareFunction::Step, Variant::Chk), i);
                assert_eq!(blame(&mut m, f, v(x), &ShareFunction::Step, Variant::Modified), i);
            }
        }
    }
}

#[test]
fn universe_invariance() {
    // values do not depend on how many unused variables the universe has
    let (phi, _) = parse_formula("x1 & ~x0 & ~x2 | ~x1 & x0 | x3").unwrap();
    let mut small = Manager::new(4);
    let mut large = Manager::new(9);
    let fs = phi.to_func(&mut small).unwrap();
    let fl = phi.to_func(&mut large).unwrap();
    for rho in [ShareFunction::Exp, ShareFunction::Frac] {
        for variant in [Variant::Chk, Variant::Modified] {
            for x in 0..4 {
                assert_eq!(
                    blame(&mut small, fs, v(x), &rho, variant),
                    blame(&mut large, fl, v(x), &rho, variant)
                );
            }
        }
    }
}

fn arb_table(max_n: usize) -> impl Strategy<Value = TruthTable> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), 1 << n)
            .prop_map(move |bits| TruthTable::new(n, bits).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn matches_oracle(t in arb_table(6), xi in 0usize..6) {
        let x = xi % t.n();
        let mut m = Manager::new(t.n());
        let f = func_of(&mut m, &t);
        prop_assert_eq!(influence(&mut m, f, v(x)), tt_influence(&t, x));
        for rho in [ShareFunction::Exp, ShareFunction::Frac, ShareFunction::Step] {
            for variant in [Variant::Chk, Variant::Modified] {
                prop_assert_eq!(
                    blame(&mut m, f, v(x), &rho, variant),
                    tt_blame(&t, x, &rho, variant)
                );
            }
        }
    }

    #[test]
    fn gamma_levels_are_critical_set_bounds(t in arb_table(5), xi in 0usize..5) {
        let x = xi % t.n();
        let mut m = Manager::new(t.n());
        let f = func_of(&mut m, &t);
        for variant in [Variant::Chk, Variant::Modified] {
            let seq = gamma_sequence(&mut m, f, v(x), variant);
            for w in seq.levels.windows(2) {
                prop_assert!(m.leq(w[0], w[1]));
            }
            for k in 0..t.n() {
                let g = seq.level(k);
                for u in 0..1usize << t.n() {
                    let c = match variant {
                        Variant::Chk => tt_scs(&t, x, u),
                        Variant::Modified => tt_mscs(&t, x, u),
                    };
                    prop_assert_eq!(m.eval_bits(g, u as u64), c.is_some_and(|c| c <= k));
                }
            }
        }
    }

    #[test]
    fn unbiased(t in arb_table(6), xi in 0usize..6) {
        let x = xi % t.n();
        let mut m = Manager::new(t.n());
        let f = func_of(&mut m, &t);
        let nf = m.not(f);
        for rho in [ShareFunction::Exp, ShareFunction::Frac] {
            for variant in [Variant::Chk, Variant::Modified] {
                prop_assert_eq!(
                    blame(&mut m, f, v(x), &rho, variant),
                    blame(&mut m, nf, v(x), &rho, variant)
                );
            }
        }
    }

    #[test]
    fn modified_blame_derivative_dependent(a in arb_table(4), b in arb_table(4), xi in 0usize..4) {
        prop_assume!(a.n() == b.n());
        let x = xi % a.n();
        // force D_x f ≥ D_x h by letting f copy the x-derivative of a∨b
        let h = a.clone();
        let f = a.restrict(x, false).xor(&TruthTable::var(a.n(), x).and(&a.derivative(x).or(&b.derivative(x))));
        prop_assert!(f.derivative(x).geq(&h.derivative(x)));
        let mut m = Manager::new(a.n());
        let (ff, hf) = (func_of(&mut m, &f), func_of(&mut m, &h));
        for rho in [ShareFunction::Exp, ShareFunction::Frac] {
            prop_assert!(
                blame(&mut m, ff, v(x), &rho, Variant::Modified)
                    >= blame(&mut m, hf, v(x), &rho, Variant::Modified)
            );
        }
    }
}
