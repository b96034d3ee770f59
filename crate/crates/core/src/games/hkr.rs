use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::TableGame;
use crate::engine::{Func, Manager, Rational, VarId};
use crate::error::{Error, Result};
use crate::measures::{ConstancyMeasure, Value};

/// Default bound on `|dep(f)|` for the HKR constructions (3^14 partial assignments).
pub const DEFAULT_N_LIMIT: usize = 14;

/// Satisfying-completion counts for every partial assignment over `players`.
///
/// Index digits in base 3: 0 and 1 fix the player, 2 leaves it free.
fn ternary_counts(m: &Manager, f: Func, players: &[VarId]) -> Vec<u32> {
    let k = players.len();
    let mut bits = vec![false; m.universe()];
    let table: Vec<bool> = (0..1usize << k)
        .map(|mask| {
            for (i, p) in players.iter().enumerate() {
                bits[p.index()] = mask >> i & 1 == 1;
            }
            m.eval(f, &bits)
        })
        .collect();
    let total = 3usize.pow(k as u32);
    let mut counts = vec![0u32; total];
    for idx in 0..total {
        let mut rest = idx;
        let mut pow = 1;
        let mut mask = 0;
        let mut star = None;
        for i in 0..k {
            match rest % 3 {
                1 => mask |= 1 << i,
                2 if star.is_none() => star = Some(pow),
                _ => {}
            }
            rest /= 3;
            pow *= 3;
        }
        counts[idx] = match star {
            Some(p) => counts[idx - 2 * p] + counts[idx - p],
            None => u32::from(table[mask]),
        };
    }
    counts
}

/// Coalition mask (over players) and number of free players of a ternary index.
fn shape(mut idx: usize, k: usize) -> (usize, u32) {
    let mut mask = 0;
    let mut free = 0;
    for i in 0..k {
        if idx % 3 == 2 {
            free += 1;
        } else {
            mask |= 1 << i;
        }
        idx /= 3;
    }
    (mask, free)
}

fn check_limit(size: usize, limit: usize) -> Result<()> {
    if size > limit {
        return Err(Error::LimitExceeded {
            what: "function support",
            size,
            limit,
        });
    }
    Ok(())
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e as usize
}

/// `H^κ_f(S) = E_{a ∈ {0,1}^S} κ(E[f_a])`, tabulated over the players `dep(f)`.
pub fn hkr_game(
    m: &mut Manager,
    f: Func,
    kappa: &ConstancyMeasure,
    n_limit: usize,
) -> Result<TableGame> {
    let players: Vec<VarId> = m.dep(f).into_iter().collect();
    let k = players.len();
    check_limit(k, n_limit)?;
    let counts = ternary_counts(m, f, &players);
    let coalitions = 1usize << k;
    let values = match kappa {
        ConstancyMeasure::Quad | ConstancyMeasure::Abs => {
            let quad = matches!(kappa, ConstancyMeasure::Quad);
            // κ(c/2^s) is (2c − 2^s)^2 / 2^2s for quad and |2c − 2^s| / 2^s for abs
            let mut sums = vec![0u128; coalitions];
            for (idx, &c) in counts.iter().enumerate() {
                let (mask, s) = shape(idx, k);
                let d = (2 * i128::from(c) - (1i128 << s)).unsigned_abs();
                sums[mask] += if quad { d * d } else { d };
            }
            sums.into_iter()
                .enumerate()
                .map(|(mask, num)| {
                    let size = mask.count_ones();
                    let s = k as u32 - size;
                    let den = if quad { size + 2 * s } else { size + s };
                    Value::Exact(Rational::new(BigInt::from(BigUint::from(num)), pow2(den)))
                })
                .collect()
        }
        _ => {
            let mut sums = vec![0f64; coalitions];
            for (idx, &c) in counts.iter().enumerate() {
                let (mask, s) = shape(idx, k);
                sums[mask] += kappa.eval_dyadic(u64::from(c), s).to_f64();
            }
            sums.into_iter()
                .enumerate()
                .map(|(mask, v)| Value::Float(v / f64::from(1u32 << mask.count_ones())))
                .collect()
        }
    };
    Ok(TableGame::new(m.universe(), players, values))
}

/// `(Bz ∘ H^κquad)_x(f)` via `∂_x H_f(S) = E_a[E[(f|x=1 − f|x=0)_a]^2]`.
pub fn banzhaf_hkr_quad(m: &mut Manager, f: Func, x: VarId, n_limit: usize) -> Result<Rational> {
    let mut players: Vec<VarId> = m.dep(f).into_iter().collect();
    let Some(pos) = players.iter().position(|&p| p == x) else {
        return Ok(Rational::zero());
    };
    players.remove(pos);
    let k = players.len();
    check_limit(k + 1, n_limit)?;
    let (f0, f1) = m.cofactors(f, x);
    let nf0 = m.not(f0);
    let nf1 = m.not(f1);
    let up = m.and(f1, nf0);
    let down = m.and(nf1, f0);
    let cu = ternary_counts(m, up, &players);
    let cd = ternary_counts(m, down, &players);
    // term for a partial assignment with s free players: d^2 / 2^(2k + s)
    let mut num = 0u128;
    for (idx, (&a, &b)) in cu.iter().zip(&cd).enumerate() {
        let (_, s) = shape(idx, k);
        let d = (i128::from(a) - i128::from(b)).unsigned_abs();
        num += (d * d) << (k as u32 - s);
    }
    Ok(Rational::new(BigInt::from(BigUint::from(num)), pow2(3 * k as u32)))
}
