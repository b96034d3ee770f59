use super::*;
use crate::frontend::formula::tests::arb_formula;
use crate::frontend::parse_formula;
use crate::oracle::{tt_mscs, tt_scs, TruthTable};
use crate::values::blame;
use proptest::prelude::*;

fn v(i: usize) -> VarId {
    VarId::from(i)
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

/// Projected count of a bare clause set, brute force over all assignments.
fn brute_projected(n_vars: usize, clauses: &[Vec<i32>], proj: &[VarId]) -> usize {
    let mut seen = BTreeSet::new();
    for u in 0..1u64 << n_vars {
        let sat = clauses.iter().all(|c| {
            c.iter()
                .any(|&l| (u >> lit_var(l).index() & 1 == 1) == (l > 0))
        });
        if sat {
            let key: Vec<bool> = proj.iter().map(|p| u >> p.index() & 1 == 1).collect();
            seen.insert(key);
        }
    }
    seen.len()
}

#[test]
fn totalizer_examples() {
    let ab = [v(0), v(1)];
    let (c, aux) = totalizer_atmost(&ab, 0, 3).unwrap();
    assert_eq!(brute_projected(2 + aux.len(), &c, &ab), 1);
    let abc = [v(0), v(1), v(2)];
    let (c, aux) = totalizer_atmost(&abc, 3, 4).unwrap();
    assert!(c.is_empty() && aux.is_empty());
    let (c, aux) = totalizer_atmost(&abc, 1, 4).unwrap();
    assert_eq!(brute_projected(3 + aux.len(), &c, &abc), 4);
    assert!(totalizer_atmost(&abc, 4, 4).is_err());
}

#[test]
fn totalizer_counts_match_binomials() {
    let vars: Vec<VarId> = (0..5).map(v).collect();
    for k in 0..=5 {
        let (c, aux) = totalizer_atmost(&vars, k, 6).unwrap();
        let want: usize = (0..=k).map(|j| num_integer::binomial(5, j)).sum();
        assert_eq!(brute_projected(5 + aux.len(), &c, &vars), want, "k={k}");
    }
}

#[test]
fn encoding_examples() {
    let (phi, _) = parse_formula("x | y").unwrap();
    let enc = encode_blame_level(&phi, 2, v(0), 0, Variant::Chk).unwrap();
    assert_eq!(count_projected_internal(&enc.cnf).unwrap(), 2u32.into());
    let enc = encode_blame_level(&phi, 2, v(0), 1, Variant::Modified).unwrap();
    assert_eq!(count_projected_internal(&enc.cnf).unwrap(), 4u32.into());
    assert_eq!(enc.flip_vars.len(), 1);

    let (phi, _) = parse_formula("y").unwrap();
    // the only variable y gets id 0
    assert!(encode_blame_level(&phi, 2, v(0), 0, Variant::Chk).is_ok());
    assert!(matches!(
        encode_blame_level(&phi, 2, v(1), 0, Variant::Chk),
        Err(Error::UnknownVariable(_))
    ));
}

#[test]
fn projection_excludes_auxiliaries() {
    let (phi, _) = parse_formula("a & (b | c) ^ d").unwrap();
    for k in 0..4 {
        let enc = encode_blame_level(&phi, 4, v(0), k, Variant::Chk).unwrap();
        let proj = enc.cnf.projection.as_ref().unwrap();
        assert_eq!(proj, &phi.vars());
        for fv in enc.flip_vars.values().chain(&enc.totalizer_aux) {
            assert!(!proj.contains(fv));
        }
        assert!(enc.cnf.to_dimacs().contains("c p show 1 2 3 4 0"));
    }
}

#[test]
fn internal_blame_example() {
    let (phi, _) = parse_formula("x | y").unwrap();
    let got = blame_via_pmc(&phi, 2, v(0), &ShareFunction::Exp, Variant::Chk, &Counter::Internal);
    assert_eq!(got.unwrap(), q(5, 8));
}

#[cfg(unix)]
#[test]
fn external_counter_failure_surfaces() {
    let (phi, _) = parse_formula("x | y").unwrap();
    let adapter = CounterAdapter::new("/nonexistent/counter", std::time::Duration::from_secs(1));
    let got = blame_via_pmc(
        &phi,
        2,
        v(0),
        &ShareFunction::Exp,
        Variant::Chk,
        &Counter::External(adapter),
    );
    assert!(matches!(got, Err(Error::Counter(CounterError::Launch { .. }))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pmc_matches_decision_diagrams(phi in arb_formula(5), xi in 0usize..5) {
        let vars: Vec<VarId> = phi.vars().into_iter().collect();
        prop_assume!(!vars.is_empty());
        let x = vars[xi % vars.len()];
        let mut m = Manager::new(5);
        let f = phi.to_func(&mut m).unwrap();
        for rho in [ShareFunction::Exp, ShareFunction::Frac] {
            for variant in [Variant::Chk, Variant::Modified] {
                let a = blame_via_pmc(&phi, 5, x, &rho, variant, &Counter::Internal).unwrap();
                prop_assert_eq!(a, blame(&mut m, f, x, &rho, variant));
            }
        }
    }

    #[test]
    fn chi_is_exact_pointwise(phi in arb_formula(4), xi in 0usize..4) {
        let vars: Vec<VarId> = phi.vars().into_iter().collect();
        prop_assume!(!vars.is_empty());
        let x = vars[xi % vars.len()];
        let n = 4;
        let mut m0 = Manager::new(n);
        let f = phi.to_func(&mut m0).unwrap();
        let t = TruthTable::from_func(&m0, f);
        for variant in [Variant::Chk, Variant::Modified] {
            let mut prev = BigUint::from(0u32);
            for k in 0..vars.len() {
                let enc = encode_blame_level(&phi, n, x, k, variant).unwrap();
                let proj = enc.cnf.projection.clone().unwrap();
                let mut m = Manager::new(enc.cnf.n_vars);
                let g = project(&mut m, &enc.cnf, &proj).unwrap();
                for u in 0..1usize << n {
                    // variables outside vars(φ) do not matter; fix them to 0
                    if (0..n).any(|i| u >> i & 1 == 1 && !proj.contains(&v(i))) {
                        continue;
                    }
                    let c = match variant {
                        Variant::Chk => tt_scs(&t, x.index(), u),
                        Variant::Modified => tt_mscs(&t, x.index(), u),
                    };
                    prop_assert_eq!(m.eval_bits(g, u as u64), c.is_some_and(|c| c <= k));
                }
                let count = m.sat_count_over(g, &proj).unwrap();
                prop_assert!(count >= prev);
                prev = count;
            }
        }
    }
}
