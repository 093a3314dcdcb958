//! Resilient repeat-free membership.
//!
//! Two kinds of predicate per noise model:
//!
//! * `*_exhaustive` enumerates every noisy version of `x` and checks that
//!   each stays s-repeat-free. This is the definition itself and serves as
//!   ground truth; its cost grows with the size of the error set, so it is
//!   guarded by a [`WorkBudget`].
//! * `*_sufficient` checks a polynomial-time condition on `x` alone which
//!   implies membership. Substitutions use a pairwise window-distance test,
//!   deletions a search over observable pairs of short-span index sets.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::bounds::{binomial, hamming_ball_size};
use crate::channels::{deletion_set, visit_substitutions, NoiseMode};
use crate::error::{Error, Result};
use crate::strings::{repeat_free_slice, RingString};

/// Upper limit on elementary checks an exhaustive routine may perform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkBudget(pub u64);

impl WorkBudget {
    pub const DEFAULT: WorkBudget = WorkBudget(1_000_000_000);

    pub fn check(self, required: u128) -> Result<()> {
        if required > u128::from(self.0) {
            Err(Error::BudgetExceeded {
                required,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for WorkBudget {
    fn default() -> Self {
        WorkBudget::DEFAULT
    }
}

pub(crate) fn saturating_u128(v: &BigUint) -> u128 {
    v.to_u128().unwrap_or(u128::MAX)
}

fn check_window(len: usize, s: usize) -> Result<()> {
    if s == 0 || s > len {
        return Err(Error::arg(format!("window length {s} outside [1, {len}]")));
    }
    Ok(())
}

/// Right-hand side of the window-distance test for windows `d` apart:
/// `t + max(0, min(t, s - d))`.
pub(crate) fn distance_threshold(s: usize, t: usize, d: usize) -> usize {
    t + t.min(s.saturating_sub(d))
}

/// First `i < limit` at which windows `i` and `i + d` are too close, scanning
/// one diagonal with a sliding mismatch count.
fn first_violation_on_diagonal(
    x: &[u8],
    s: usize,
    t: usize,
    d: usize,
    limit: usize,
) -> Option<usize> {
    let n = x.len();
    let last = n - s - d; // largest admissible i
    let stop = limit.min(last + 1);
    if stop == 0 {
        return None;
    }
    let threshold = distance_threshold(s, t, d);
    let mut dist = (0..s).filter(|&m| x[m] != x[m + d]).count();
    for i in 0..stop {
        if i > 0 {
            dist += usize::from(x[i + s - 1] != x[i + s - 1 + d]);
            dist -= usize::from(x[i - 1] != x[i - 1 + d]);
        }
        if dist <= threshold {
            return Some(i);
        }
    }
    None
}

/// Pairwise window-distance test: every pair of windows `i < j` must satisfy
/// `d_H(x_{i+[s]}, x_{j+[s]}) > t + max(0, min(t, s - j + i))`. Passing
/// implies [`is_rrf_sub_exhaustive`]; the converse does not hold.
pub fn is_rrf_sub_sufficient(x: &RingString, s: usize, t: usize) -> Result<bool> {
    check_window(x.len(), s)?;
    let symbols = x.symbols();
    let n = symbols.len();
    Ok((1..=n - s).all(|d| first_violation_on_diagonal(symbols, s, t, d, usize::MAX).is_none()))
}

/// The lexicographically smallest `(i, j)` failing the window-distance test,
/// or `None` when [`is_rrf_sub_sufficient`] holds.
pub fn violating_pair_sub(x: &RingString, s: usize, t: usize) -> Result<Option<(usize, usize)>> {
    check_window(x.len(), s)?;
    Ok(violating_pair_slice(x.symbols(), s, t))
}

pub(crate) fn violating_pair_slice(x: &[u8], s: usize, t: usize) -> Option<(usize, usize)> {
    let n = x.len();
    let mut best: Option<(usize, usize)> = None;
    for d in 1..=n - s {
        // a later diagonal only wins with a strictly smaller i
        let limit = best.map_or(usize::MAX, |(i, _)| i);
        if let Some(i) = first_violation_on_diagonal(x, s, t, d, limit) {
            best = Some((i, i + d));
            if i == 0 {
                break;
            }
        }
    }
    best
}

/// Membership by definition: every string within `t` substitutions of `x` is
/// s-repeat-free. Requests with `t > |x|` use the whole space.
pub fn is_rrf_sub_exhaustive(
    x: &RingString,
    s: usize,
    t: usize,
    budget: WorkBudget,
) -> Result<bool> {
    check_window(x.len(), s)?;
    let n = x.len();
    let t = t.min(n);
    let ball = hamming_ball_size(n, t, x.q())?;
    budget.check(saturating_u128(&ball).saturating_mul((n - s + 1) as u128))?;
    let mut clean = true;
    for tt in 0..=t {
        let flow = visit_substitutions(x.symbols(), x.q(), tt, &mut |y| {
            if repeat_free_slice(y, s) {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break(())
            }
        });
        if flow.is_break() {
            clean = false;
            break;
        }
    }
    Ok(clean)
}

fn check_deletion_window(len: usize, s: usize, t: usize) -> Result<()> {
    if t > len || s == 0 || s > len - t {
        return Err(Error::arg(format!(
            "need 1 <= s <= |x| - t, got s={s}, t={t}, |x|={len}"
        )));
    }
    Ok(())
}

/// Membership by definition: every result of exactly `t` deletions is
/// s-repeat-free.
pub fn is_rrf_del_exhaustive(
    x: &RingString,
    s: usize,
    t: usize,
    budget: WorkBudget,
) -> Result<bool> {
    check_deletion_window(x.len(), s, t)?;
    let n = x.len();
    let patterns = binomial(n, t);
    budget.check(saturating_u128(&patterns).saturating_mul((n - t - s + 1) as u128))?;
    let outputs = deletion_set(x, t, NoiseMode::Exactly)?;
    Ok(outputs.iter().all(|y| repeat_free_slice(y.symbols(), s)))
}

/// Searches for an observable pair `(I, J)` of size `s`, both spanning fewer
/// than `s + t` positions, with `x_I = x_J`.
struct ObservableSearch<'a> {
    x: &'a [u8],
    s: usize,
    reach: usize,
}

impl ObservableSearch<'_> {
    fn extend(&self, k: usize, prev_i: usize, prev_j: usize, end_i: usize, end_j: usize) -> bool {
        if k == self.s {
            return true;
        }
        let remaining = self.s - 1 - k;
        let max_i = end_i.saturating_sub(remaining);
        let max_j = end_j.saturating_sub(remaining);
        for a in prev_i + 1..=max_i {
            for b in (prev_j + 1).max(a + 1)..=max_j {
                if self.x[a] == self.x[b] && self.extend(k + 1, a, b, end_i, end_j) {
                    return true;
                }
            }
        }
        false
    }

    fn find(&self) -> bool {
        let n = self.x.len();
        for i in 0..n {
            let end_i = (i + self.reach).min(n - 1);
            if end_i - i + 1 < self.s {
                break;
            }
            for j in i + 1..n {
                let end_j = (j + self.reach).min(n - 1);
                if end_j - j + 1 < self.s {
                    break;
                }
                if self.x[i] == self.x[j] && self.extend(1, i, j, end_i, end_j) {
                    return true;
                }
            }
        }
        false
    }
}

/// Observable-pair test for deletions: no observable pair `(I, J)` with
/// `|I| = |J| = s` and both spans below `s + t` has `x_I = x_J`. Passing
/// implies [`is_rrf_del_exhaustive`].
pub fn is_rrf_del_sufficient(x: &RingString, s: usize, t: usize) -> Result<bool> {
    check_deletion_window(x.len(), s, t)?;
    let search = ObservableSearch {
        x: x.symbols(),
        s,
        reach: s + t - 1,
    };
    Ok(!search.find())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::{hamming_distance, is_repeat_free, window};

    fn rs(q: u32, text: &str) -> RingString {
        RingString::parse(q, text).unwrap()
    }

    fn all_strings(q: u32, n: usize) -> impl Iterator<Item = RingString> {
        (0..u64::from(q).pow(n as u32)).map(move |i| RingString::from_index(q, n, i).unwrap())
    }

    const B: WorkBudget = WorkBudget::DEFAULT;

    #[test]
    fn zero_noise_collapses_to_repeat_free() {
        for x in all_strings(2, 7) {
            for s in 1..=7 {
                let rf = is_repeat_free(&x, s).unwrap();
                assert_eq!(is_rrf_sub_exhaustive(&x, s, 0, B).unwrap(), rf);
                assert_eq!(is_rrf_sub_sufficient(&x, s, 0).unwrap(), rf);
                assert_eq!(is_rrf_del_exhaustive(&x, s, 0, B).unwrap(), rf);
                assert_eq!(is_rrf_del_sufficient(&x, s, 0).unwrap(), rf, "{x:?} s={s}");
            }
        }
    }

    #[test]
    fn constant_string_is_rejected() {
        let x = rs(2, "00000000");
        for s in 1..8 {
            for t in 0..3 {
                assert!(!is_rrf_sub_exhaustive(&x, s, t, B).unwrap());
                assert!(!is_rrf_sub_sufficient(&x, s, t).unwrap());
                if s < 8 - t {
                    assert!(!is_rrf_del_exhaustive(&x, s, t, B).unwrap());
                    assert!(!is_rrf_del_sufficient(&x, s, t).unwrap());
                }
            }
        }
    }

    #[test]
    fn first_accepted_string_agrees_with_oracle() {
        let mut found = 0;
        for s in 4..10 {
            if let Some(first) =
                all_strings(2, 10).find(|x| is_rrf_sub_sufficient(x, s, 1).unwrap())
            {
                assert!(
                    is_rrf_sub_exhaustive(&first, s, 1, B).unwrap(),
                    "s={s} {first}"
                );
                found += 1;
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn violating_pair_examples() {
        assert_eq!(
            violating_pair_sub(&rs(2, "00000000"), 3, 1).unwrap(),
            Some((0, 1))
        );
        for x in all_strings(2, 9) {
            let pair = violating_pair_sub(&x, 3, 1).unwrap();
            assert_eq!(pair.is_none(), is_rrf_sub_sufficient(&x, 3, 1).unwrap());
        }
    }

    /// Recomputes the window-distance test pair by pair, in lexicographic order.
    fn naive_violation(x: &RingString, s: usize, t: usize) -> Option<(usize, usize)> {
        let n = x.len();
        for i in 0..=n - s {
            for j in i + 1..=n - s {
                let d =
                    hamming_distance(&window(x, i, s).unwrap(), &window(x, j, s).unwrap()).unwrap();
                let overlap = (s as i64 - (j - i) as i64).min(t as i64).max(0) as usize;
                if d <= t + overlap {
                    return Some((i, j));
                }
            }
        }
        None
    }

    #[test]
    fn violating_pair_matches_naive_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..400 {
            let q = rng.random_range(2..=4u32);
            let n = rng.random_range(4..=40usize);
            let s = rng.random_range(1..=n);
            let t = rng.random_range(0..=3usize);
            let symbols = (0..n).map(|_| rng.random_range(0..q) as u8).collect();
            let x = RingString::new(q, symbols).unwrap();
            assert_eq!(
                violating_pair_sub(&x, s, t).unwrap(),
                naive_violation(&x, s, t),
                "{x:?} s={s} t={t}"
            );
        }
    }

    fn accepted_ranks(n: usize, pred: impl Fn(&RingString) -> bool) -> Vec<u64> {
        all_strings(2, n)
            .enumerate()
            .filter(|(_, x)| pred(x))
            .map(|(i, _)| i as u64)
            .collect()
    }

    #[test]
    fn exhaustive_truth_tables_match_golden_data() {
        // Lexicographic ranks in Σ^n of accepted strings, produced by an
        // independent brute-force script over the raw definitions.
        assert!(accepted_ranks(8, |x| is_rrf_sub_exhaustive(x, 3, 1, B).unwrap()).is_empty());
        assert!(accepted_ranks(9, |x| is_rrf_del_exhaustive(x, 3, 1, B).unwrap()).is_empty());
        assert_eq!(
            accepted_ranks(8, |x| is_rrf_sub_exhaustive(x, 4, 1, B).unwrap()),
            SUB_N8_S4_T1
        );
        assert_eq!(
            accepted_ranks(9, |x| is_rrf_del_exhaustive(x, 4, 1, B).unwrap()),
            DEL_N9_S4_T1
        );
    }

    const SUB_N8_S4_T1: &[u64] = &[
        24, 28, 56, 57, 78, 99, 113, 114, 141, 142, 156, 177, 198, 199, 227, 231,
    ];
    const DEL_N9_S4_T1: &[u64] = &[
        24, 25, 26, 27, 28, 29, 30, 40, 44, 46, 48, 52, 56, 57, 58, 60, 78, 79, 88, 89, 92, 93, 97,
        104, 105, 112, 113, 114, 116, 117, 120, 121, 139, 141, 142, 143, 154, 156, 157, 158, 163,
        176, 177, 178, 184, 185, 186, 195, 197, 199, 203, 207, 209, 211, 225, 226, 227, 228, 229,
        232, 233, 240, 241, 242, 243, 268, 269, 270, 271, 278, 279, 282, 283, 284, 285, 286, 300,
        302, 304, 308, 312, 314, 316, 325, 326, 327, 333, 334, 335, 348, 353, 354, 355, 357, 368,
        369, 370, 372, 390, 391, 394, 395, 397, 398, 399, 406, 407, 414, 418, 419, 422, 423, 432,
        433, 451, 453, 454, 455, 459, 463, 465, 467, 471, 481, 482, 483, 484, 485, 486, 487,
    ];

    #[test]
    fn monotone_in_t() {
        for x in all_strings(2, 8) {
            for s in 2..=5 {
                for t in 1..=3 {
                    if is_rrf_sub_exhaustive(&x, s, t, B).unwrap() {
                        assert!(is_rrf_sub_exhaustive(&x, s, t - 1, B).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let x = RingString::zeros(4, 40).unwrap();
        let err = is_rrf_sub_exhaustive(&x, 10, 6, WorkBudget(1_000)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(is_rrf_del_exhaustive(&x, 10, 6, WorkBudget(10)).is_err());
    }

    #[test]
    fn deletion_parameter_errors() {
        let x = rs(2, "010011");
        assert!(is_rrf_del_exhaustive(&x, 5, 2, B).is_err());
        assert!(is_rrf_del_sufficient(&x, 5, 2).is_err());
        assert!(is_rrf_sub_sufficient(&x, 0, 1).is_err());
        assert!(is_rrf_sub_sufficient(&x, 7, 1).is_err());
    }
}
