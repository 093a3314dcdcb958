//! Producing and counting resilient repeat-free strings, and choosing coset
//! offsets for a code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{binomial, hamming_ball_size};
use crate::channels::NoiseKind;
use crate::error::{Error, Result};
use crate::repeatfree::{
    is_rrf_del_exhaustive, is_rrf_del_sufficient, is_rrf_sub_exhaustive, saturating_u128,
    violating_pair_slice, WorkBudget,
};
use crate::strings::{check_q, RingString};

/// Strings per parallel work unit in exhaustive scans.
const CHUNK: u64 = 1 << 12;

pub fn default_max_rounds(n: usize, s: usize) -> u64 {
    100u64.saturating_mul(n as u64).saturating_mul(s as u64)
}

fn random_symbols(rng: &mut ChaCha8Rng, q: u32, out: &mut [u8]) {
    for v in out {
        *v = rng.random_range(0..q) as u8;
    }
}

/// Draws a uniform string and, while some pair of windows `(i, j)` fails the
/// window-distance test, redraws every symbol of both windows. Each redraw
/// counts as one round.
pub fn generate_rrf_sub(
    n: usize,
    s: usize,
    t: usize,
    q: u32,
    seed: u64,
    max_rounds: u64,
) -> Result<RingString> {
    check_q(q)?;
    if s == 0 || s > n {
        return Err(Error::arg(format!("window length {s} outside [1, {n}]")));
    }
    if max_rounds == 0 {
        return Err(Error::arg("max_rounds must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0u8; n];
    random_symbols(&mut rng, q, &mut x);
    let mut rounds = 0;
    while let Some((i, j)) = violating_pair_slice(&x, s, t) {
        if rounds == max_rounds {
            return Err(Error::Exhausted { rounds });
        }
        rounds += 1;
        random_symbols(&mut rng, q, &mut x[i..i + s]);
        random_symbols(&mut rng, q, &mut x[j..j + s]);
    }
    Ok(RingString::from_raw(q, x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Exhaustive,
    Sufficient,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exhaustive => "exhaustive",
            Method::Sufficient => "sufficient",
        }
    }
}

/// `n - log_q(count)`; infinite for an empty family.
pub fn redundancy(n: usize, q: u32, count: u64) -> f64 {
    if count == 0 {
        return f64::INFINITY;
    }
    n as f64 - (count as f64).ln() / f64::from(q).ln()
}

fn space_size(q: u32, n: usize) -> Option<u64> {
    u64::from(q).checked_pow(u32::try_from(n).ok()?)
}

/// Increments `digits` as a base-`q` odometer with the last digit fastest.
fn step(digits: &mut [u8], q: u32) {
    for d in digits.iter_mut().rev() {
        if u32::from(*d) + 1 < q {
            *d += 1;
            return;
        }
        *d = 0;
    }
}

/// Applies `f` to every string of `Σ^n` in lexicographic order, in parallel
/// chunks, and returns the per-chunk results in order.
fn scan_space<T, F>(q: u32, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&RingString) -> Option<T> + Sync,
{
    let total = space_size(q, n).ok_or_else(|| Error::arg("space too large to scan"))?;
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let first = RingString::from_index(q, n, start)?;
            let mut digits = first.into_symbols();
            let mut out = Vec::new();
            for _ in start..end {
                let x = RingString::from_raw(q, digits.clone());
                if let Some(v) = f(&x) {
                    out.push(v);
                }
                step(&mut digits, q);
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<T>>>>()
        .map(|v| v.into_iter().flatten().collect())
}

/// Number of strings in `Σ^n` accepted by the chosen predicate. Deletion noise
/// means exactly `t` deletions and needs `s <= n - t`.
pub fn enumerate_rrf(
    n: usize,
    s: usize,
    t: usize,
    q: u32,
    noise: NoiseKind,
    method: Method,
    budget: WorkBudget,
) -> Result<u64> {
    check_q(q)?;
    let limit = match noise {
        NoiseKind::Substitution => n,
        NoiseKind::Deletion => n.saturating_sub(t),
    };
    if s == 0 || s > limit {
        return Err(Error::arg(format!(
            "window length {s} outside [1, {limit}]"
        )));
    }
    let space = space_size(q, n).map_or(u128::MAX, u128::from);
    let windows = (limit - s + 1) as u128;
    let per_string = match (noise, method) {
        (_, Method::Sufficient) => (n * n) as u128,
        (NoiseKind::Substitution, Method::Exhaustive) => {
            saturating_u128(&hamming_ball_size(n, t.min(n), q)?).saturating_mul(windows)
        }
        (NoiseKind::Deletion, Method::Exhaustive) => {
            saturating_u128(&binomial(n, t)).saturating_mul(windows)
        }
    };
    budget.check(space.saturating_mul(per_string))?;
    let unlimited = WorkBudget(u64::MAX);
    let accepted = scan_space(q, n, |x| {
        let ok = match (noise, method) {
            (NoiseKind::Substitution, Method::Exhaustive) => {
                is_rrf_sub_exhaustive(x, s, t, unlimited)
            }
            (NoiseKind::Substitution, Method::Sufficient) => {
                Ok(violating_pair_slice(x.symbols(), s, t).is_none())
            }
            (NoiseKind::Deletion, Method::Exhaustive) => is_rrf_del_exhaustive(x, s, t, unlimited),
            (NoiseKind::Deletion, Method::Sufficient) => is_rrf_del_sufficient(x, s, t),
        };
        ok.expect("arguments validated").then_some(())
    })?;
    Ok(accepted.len() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetStrategy {
    /// Every offset in `Σ^n`, in lexicographic order.
    Exhaustive,
    /// `trials` uniform offsets drawn from `seed`.
    Random { seed: u64, trials: u64 },
}

/// How membership of a shifted codeword is certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Certifier {
    /// The window-distance test; polynomial and implies membership.
    #[default]
    Sufficient,
    /// The definition itself, by enumerating the substitution ball.
    Exhaustive,
}

impl Certifier {
    pub fn name(self) -> &'static str {
        match self {
            Certifier::Sufficient => "sufficient",
            Certifier::Exhaustive => "exhaustive",
        }
    }

    pub fn accepts(self, x: &RingString, s: usize, t: usize) -> Result<bool> {
        match self {
            Certifier::Sufficient => Ok(violating_pair_slice(x.symbols(), s, t).is_none()),
            Certifier::Exhaustive => is_rrf_sub_exhaustive(x, s, t, WorkBudget(u64::MAX)),
        }
    }

    fn cost(self, n: usize, s: usize, t: usize, q: u32) -> Result<u128> {
        Ok(match self {
            Certifier::Sufficient => (n * n) as u128,
            Certifier::Exhaustive => saturating_u128(&hamming_ball_size(n, t.min(n), q)?)
                .saturating_mul((n - s + 1) as u128),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetChoice {
    pub z: RingString,
    /// Indices into the inner code of the words `c` with `z + c` certified.
    pub kept: Vec<usize>,
}

fn certified(
    words: &[RingString],
    z: &RingString,
    s: usize,
    t: usize,
    certifier: Certifier,
) -> Vec<usize> {
    words
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            let shifted = z.add(c).expect("lengths checked");
            certifier.accepts(&shifted, s, t).expect("window checked")
        })
        .map(|(i, _)| i)
        .collect()
}

/// Picks the examined offset `z` maximizing the number of inner codewords
/// `c` for which `z + c` is certified; ties go to the lexicographically
/// smallest `z`.
pub fn find_coset(
    inner: &[RingString],
    s: usize,
    t: usize,
    strategy: CosetStrategy,
    certifier: Certifier,
    budget: WorkBudget,
) -> Result<CosetChoice> {
    let first = inner
        .first()
        .ok_or_else(|| Error::arg("empty inner code"))?;
    let (q, n) = (first.q(), first.len());
    if inner.iter().any(|c| c.q() != q || c.len() != n) {
        return Err(Error::arg("codewords differ in length or alphabet"));
    }
    if s == 0 || s > n {
        return Err(Error::arg(format!("window length {s} outside [1, {n}]")));
    }
    let per_offset = (inner.len() as u128).saturating_mul(certifier.cost(n, s, t, q)?);
    let better = |a: &CosetChoice, b: &CosetChoice| {
        a.kept.len() > b.kept.len() || (a.kept.len() == b.kept.len() && a.z < b.z)
    };
    let candidates: Vec<CosetChoice> = match strategy {
        CosetStrategy::Exhaustive => {
            let space = space_size(q, n).map_or(u128::MAX, u128::from);
            budget.check(space.saturating_mul(per_offset))?;
            scan_space(q, n, |z| {
                Some(CosetChoice {
                    kept: certified(inner, z, s, t, certifier),
                    z: z.clone(),
                })
            })?
        }
        CosetStrategy::Random { seed, trials } => {
            if trials == 0 {
                return Err(Error::arg("trials must be at least 1"));
            }
            budget.check(u128::from(trials).saturating_mul(per_offset))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let offsets: Vec<RingString> = (0..trials)
                .map(|_| {
                    let mut z = vec![0u8; n];
                    random_symbols(&mut rng, q, &mut z);
                    RingString::from_raw(q, z)
                })
                .collect();
            offsets
                .into_par_iter()
                .map(|z| CosetChoice {
                    kept: certified(inner, &z, s, t, certifier),
                    z,
                })
                .collect()
        }
    };
    Ok(candidates
        .into_iter()
        .reduce(|best, c| if better(&c, &best) { c } else { best })
        .expect("at least one offset examined"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repeatfree::is_rrf_sub_sufficient;
    use crate::strings::is_repeat_free;

    const B: WorkBudget = WorkBudget(u64::MAX);

    #[test]
    fn noiseless_generation_is_repeat_free() {
        for seed in 0..20 {
            let x = generate_rrf_sub(64, 12, 0, 2, seed, default_max_rounds(64, 12)).unwrap();
            assert!(is_repeat_free(&x, 12).unwrap());
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = generate_rrf_sub(128, 16, 1, 2, 7, 10_000).unwrap();
        let b = generate_rrf_sub(128, 16, 1, 2, 7, 10_000).unwrap();
        assert_eq!(a, b);
        assert!(is_rrf_sub_sufficient(&a, 16, 1).unwrap());
    }

    #[test]
    fn over_constrained_generation_exhausts() {
        assert_eq!(
            generate_rrf_sub(12, 4, 4, 2, 1, 50).unwrap_err(),
            Error::Exhausted { rounds: 50 }
        );
        assert!(generate_rrf_sub(12, 4, 1, 2, 1, 0).is_err());
        assert!(generate_rrf_sub(12, 13, 1, 2, 1, 5).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let anchor =
            enumerate_rrf(4, 2, 0, 2, NoiseKind::Substitution, Method::Exhaustive, B).unwrap();
        assert_eq!(anchor, 8);
        assert_eq!(redundancy(4, 2, anchor), 1.0);
        assert_eq!(
            enumerate_rrf(8, 3, 3, 2, NoiseKind::Substitution, Method::Sufficient, B).unwrap(),
            0
        );
        let mut prev = u64::MAX;
        for t in 0..3 {
            let ex =
                enumerate_rrf(8, 3, t, 2, NoiseKind::Substitution, Method::Exhaustive, B).unwrap();
            let suff =
                enumerate_rrf(8, 3, t, 2, NoiseKind::Substitution, Method::Sufficient, B).unwrap();
            assert!(suff <= ex && ex <= prev, "t={t}");
            prev = ex;
        }
    }

    #[test]
    fn enumeration_matches_direct_count() {
        for n in 3..9 {
            for s in 1..=n {
                let direct = (0..1u64 << n)
                    .filter(|&i| {
                        is_repeat_free(&RingString::from_index(2, n, i).unwrap(), s).unwrap()
                    })
                    .count() as u64;
                let counted =
                    enumerate_rrf(n, s, 0, 2, NoiseKind::Substitution, Method::Exhaustive, B)
                        .unwrap();
                assert_eq!(counted, direct, "n={n} s={s}");
            }
        }
        let del = enumerate_rrf(9, 4, 1, 2, NoiseKind::Deletion, Method::Exhaustive, B).unwrap();
        let del_suff =
            enumerate_rrf(9, 4, 1, 2, NoiseKind::Deletion, Method::Sufficient, B).unwrap();
        assert_eq!(del, 130);
        assert!(del_suff <= del);
    }

    #[test]
    fn enumeration_budget_and_arguments() {
        let err = enumerate_rrf(
            20,
            4,
            1,
            2,
            NoiseKind::Substitution,
            Method::Exhaustive,
            WorkBudget(1000),
        );
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
        assert!(enumerate_rrf(4, 4, 1, 2, NoiseKind::Deletion, Method::Exhaustive, B).is_err());
        assert!(enumerate_rrf(4, 0, 0, 2, NoiseKind::Substitution, Method::Exhaustive, B).is_err());
    }

    #[test]
    fn coset_of_zero_word() {
        let zero = vec![RingString::zeros(2, 10).unwrap()];
        for (s, certifier) in [(6, Certifier::Sufficient), (5, Certifier::Exhaustive)] {
            let choice = find_coset(&zero, s, 1, CosetStrategy::Exhaustive, certifier, B).unwrap();
            assert_eq!(choice.kept, vec![0]);
            assert!(certifier.accepts(&choice.z, s, 1).unwrap());
        }
        // No binary string of length 10 passes the window-distance test at s = 5.
        let none = find_coset(
            &zero,
            5,
            1,
            CosetStrategy::Exhaustive,
            Certifier::Sufficient,
            B,
        )
        .unwrap();
        assert!(none.kept.is_empty());
        assert_eq!(none.z, RingString::zeros(2, 10).unwrap());
    }

    #[test]
    fn coset_count_is_translation_invariant() {
        let words: Vec<RingString> = [3u64, 100, 517, 900]
            .iter()
            .map(|&i| RingString::from_index(2, 10, i).unwrap())
            .collect();
        let shift = RingString::from_index(2, 10, 333).unwrap();
        let shifted: Vec<RingString> = words.iter().map(|c| c.add(&shift).unwrap()).collect();
        for certifier in [Certifier::Sufficient, Certifier::Exhaustive] {
            for s in [5, 6] {
                let base =
                    find_coset(&words, s, 1, CosetStrategy::Exhaustive, certifier, B).unwrap();
                let moved =
                    find_coset(&shifted, s, 1, CosetStrategy::Exhaustive, certifier, B).unwrap();
                assert_eq!(base.kept.len(), moved.kept.len());
                let back = base.z.sub(&shift).unwrap();
                assert_eq!(certified(&shifted, &back, s, 1, certifier), base.kept);
            }
        }
    }

    #[test]
    fn random_offsets_reach_exhaustive_maximum() {
        let words: Vec<RingString> = [3u64, 100, 517, 900]
            .iter()
            .map(|&i| RingString::from_index(2, 10, i).unwrap())
            .collect();
        for (s, certifier) in [(5, Certifier::Exhaustive), (6, Certifier::Sufficient)] {
            let exhaustive =
                find_coset(&words, s, 1, CosetStrategy::Exhaustive, certifier, B).unwrap();
            let random = CosetStrategy::Random {
                seed: 11,
                trials: 10_000,
            };
            let sampled = find_coset(&words, s, 1, random, certifier, B).unwrap();
            assert_eq!(sampled.kept.len(), exhaustive.kept.len(), "s={s}");
            assert!(exhaustive.z <= sampled.z);
        }
    }

    #[test]
    fn coset_arguments() {
        assert!(find_coset(
            &[],
            2,
            0,
            CosetStrategy::Exhaustive,
            Certifier::Sufficient,
            B
        )
        .is_err());
        let mixed = vec![
            RingString::zeros(2, 4).unwrap(),
            RingString::zeros(2, 5).unwrap(),
        ];
        assert!(find_coset(
            &mixed,
            2,
            0,
            CosetStrategy::Exhaustive,
            Certifier::Sufficient,
            B
        )
        .is_err());
        let words = vec![RingString::zeros(2, 30).unwrap()];
        let err = find_coset(
            &words,
            5,
            1,
            CosetStrategy::Exhaustive,
            Certifier::Sufficient,
            WorkBudget(1 << 20),
        );
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
        let random = CosetStrategy::Random { seed: 1, trials: 0 };
        assert!(find_coset(&words, 5, 1, random, Certifier::Sufficient, B).is_err());
    }
}
