//! Substitution and deletion noise: exhaustive error sets and seeded sampling.

use std::collections::HashSet;
use std::ops::ControlFlow;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::strings::{z_profile, KmerMultiset, RingString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Substitution,
    Deletion,
}

/// Whether a spec means exactly `t` errors (`S^t`) or at most `t` (`B^t`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseMode {
    Exactly,
    UpTo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub t: usize,
    pub mode: NoiseMode,
}

impl NoiseSpec {
    /// At most `t` substitutions, the ball used by the substitution definitions.
    pub fn substitution(t: usize) -> Self {
        NoiseSpec {
            kind: NoiseKind::Substitution,
            t,
            mode: NoiseMode::UpTo,
        }
    }

    /// Exactly `t` deletions.
    pub fn deletion(t: usize) -> Self {
        NoiseSpec {
            kind: NoiseKind::Deletion,
            t,
            mode: NoiseMode::Exactly,
        }
    }

    pub fn with_mode(self, mode: NoiseMode) -> Self {
        NoiseSpec { mode, ..self }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if self.t > len {
            return Err(Error::arg(format!(
                "{} errors requested on a string of length {len}",
                self.t
            )));
        }
        Ok(())
    }
}

/// Advances `combo` to the next `k`-subset of `[n]` in lexicographic order.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
        return false;
    };
    combo[i] += 1;
    for j in i + 1..k {
        combo[j] = combo[j - 1] + 1;
    }
    true
}

/// Steps a mixed-radix counter, last digit fastest; false once it wraps.
fn advance_odometer(digits: &mut [usize], radix: usize) -> bool {
    for slot in (0..digits.len()).rev() {
        digits[slot] += 1;
        if digits[slot] < radix {
            return true;
        }
        digits[slot] = 0;
    }
    false
}

/// Visits every string at Hamming distance exactly `t` from `x`, ordered by
/// position tuple, then by replacement symbols. The buffer handed to `visit`
/// is only valid during the call.
pub(crate) fn visit_substitutions<F>(x: &[u8], q: u32, t: usize, visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[u8]) -> ControlFlow<()>,
{
    let n = x.len();
    if t > n {
        return ControlFlow::Continue(());
    }
    let mut buf = x.to_vec();
    if t == 0 {
        return visit(&buf);
    }
    let alternatives: Vec<Vec<u8>> = x
        .iter()
        .map(|&v| {
            (0..q)
                .filter(|&c| c != u32::from(v))
                .map(|c| c as u8)
                .collect()
        })
        .collect();
    let mut positions: Vec<usize> = (0..t).collect();
    let mut choice = vec![0usize; t];
    loop {
        choice.iter_mut().for_each(|c| *c = 0);
        loop {
            for (&p, &c) in positions.iter().zip(&choice) {
                buf[p] = alternatives[p][c];
            }
            visit(&buf)?;
            if !advance_odometer(&mut choice, q as usize - 1) {
                break;
            }
        }
        for &p in &positions {
            buf[p] = x[p];
        }
        if !next_combination(&mut positions, n) {
            return ControlFlow::Continue(());
        }
    }
}

/// `S^t(x)` or `B^t(x)` under substitutions. Outputs are distinct and ordered
/// by error count, then position tuple, then replacement symbols.
pub fn substitution_set(x: &RingString, t: usize, mode: NoiseMode) -> Result<Vec<RingString>> {
    NoiseSpec::substitution(t).validate(x.len())?;
    let counts: Vec<usize> = match mode {
        NoiseMode::Exactly => vec![t],
        NoiseMode::UpTo => (0..=t).collect(),
    };
    let mut out = Vec::new();
    for tt in counts {
        let _ = visit_substitutions(x.symbols(), x.q(), tt, &mut |y| {
            out.push(RingString::from_raw(x.q(), y.to_vec()));
            ControlFlow::Continue(())
        });
    }
    Ok(out)
}

fn delete_positions(x: &[u8], positions: &[usize]) -> Vec<u8> {
    let mut out = Vec::with_capacity(x.len() - positions.len());
    let mut skip = positions.iter().peekable();
    for (i, &v) in x.iter().enumerate() {
        if skip.peek() == Some(&&i) {
            skip.next();
        } else {
            out.push(v);
        }
    }
    out
}

/// Distinct results of deleting `t` positions (or at most `t` in
/// [`NoiseMode::UpTo`]), in order of first appearance over lexicographic
/// position tuples.
pub fn deletion_set(x: &RingString, t: usize, mode: NoiseMode) -> Result<Vec<RingString>> {
    NoiseSpec::deletion(t).validate(x.len())?;
    let counts: Vec<usize> = match mode {
        NoiseMode::Exactly => vec![t],
        NoiseMode::UpTo => (0..=t).collect(),
    };
    let n = x.len();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for tt in counts {
        let mut positions: Vec<usize> = (0..tt).collect();
        loop {
            let y = delete_positions(x.symbols(), &positions);
            if seen.insert(y.clone()) {
                out.push(RingString::from_raw(x.q(), y));
            }
            if !next_combination(&mut positions, n) {
                break;
            }
        }
    }
    Ok(out)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// Draws the number of errors for an up-to spec, weighting each count by the
/// number of error patterns it admits.
fn draw_error_count<R: Rng + ?Sized>(n: usize, q: u32, spec: &NoiseSpec, rng: &mut R) -> usize {
    if spec.mode == NoiseMode::Exactly || spec.t == 0 {
        return spec.t;
    }
    let log_weights: Vec<f64> = (0..=spec.t)
        .map(|tt| match spec.kind {
            NoiseKind::Substitution => ln_binomial(n, tt) + tt as f64 * f64::from(q - 1).ln(),
            NoiseKind::Deletion => ln_binomial(n, tt),
        })
        .collect();
    let peak = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let weights = log_weights.iter().map(|w| (w - peak).exp());
    WeightedIndex::new(weights)
        .expect("at least one positive weight")
        .sample(rng)
}

/// Applies random noise drawn from `rng`; see [`sample_noise`].
pub fn sample_noise_with<R: Rng + ?Sized>(
    x: &RingString,
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<RingString> {
    spec.validate(x.len())?;
    let n = x.len();
    let t = draw_error_count(n, x.q(), spec, rng);
    let mut positions = rand::seq::index::sample(rng, n, t).into_vec();
    positions.sort_unstable();
    let symbols = match spec.kind {
        NoiseKind::Substitution => {
            let q = x.q() as u16;
            let mut y = x.symbols().to_vec();
            for p in positions {
                let shift = rng.random_range(1..q);
                y[p] = ((u16::from(y[p]) + shift) % q) as u8;
            }
            y
        }
        NoiseKind::Deletion => delete_positions(x.symbols(), &positions),
    };
    Ok(RingString::from_raw(x.q(), symbols))
}

/// A seeded random draw from the error-pattern space of `spec`.
///
/// Substitutions pick distinct positions uniformly and give each a uniformly
/// random different symbol, so the output is uniform over `S^t(x)`. Deletions
/// remove a uniformly random set of positions; when several position sets
/// yield the same string, that string is correspondingly more likely, so the
/// output is *not* uniform over the deletion set. In up-to mode the error
/// count is weighted by the number of patterns of that size.
pub fn sample_noise(x: &RingString, spec: &NoiseSpec, seed: u64) -> Result<RingString> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_noise_with(x, spec, &mut rng)
}

/// The channel output `Z_s(y)`.
pub fn observe(y: &RingString, s: usize) -> Result<KmerMultiset> {
    z_profile(y, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::hamming_distance;

    fn rs(q: u32, text: &str) -> RingString {
        RingString::parse(q, text).unwrap()
    }

    fn texts(v: &[RingString]) -> Vec<String> {
        v.iter().map(|s| s.to_text()).collect()
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(
            substitution_set(&rs(2, "00"), 1, NoiseMode::Exactly)
                .unwrap()
                .len(),
            2
        );
        let x = rs(3, "0120");
        assert_eq!(
            substitution_set(&x, 0, NoiseMode::UpTo).unwrap(),
            vec![x.clone()]
        );
        assert!(matches!(
            substitution_set(&x, 5, NoiseMode::Exactly),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn substitution_order_is_positions_then_symbols() {
        let got = substitution_set(&rs(3, "00"), 1, NoiseMode::Exactly).unwrap();
        assert_eq!(texts(&got), ["10", "20", "01", "02"]);
        let got = substitution_set(&rs(3, "000"), 2, NoiseMode::Exactly).unwrap();
        assert_eq!(texts(&got)[..5], ["110", "120", "210", "220", "101"]);
    }

    #[test]
    fn deletion_examples() {
        let got = deletion_set(&rs(2, "01"), 1, NoiseMode::Exactly).unwrap();
        assert_eq!(texts(&got), ["1", "0"]);
        let got = deletion_set(&rs(2, "0101"), 1, NoiseMode::Exactly).unwrap();
        assert_eq!(texts(&got), ["101", "001", "011", "010"]);
        let got = deletion_set(&rs(2, "0000"), 1, NoiseMode::Exactly).unwrap();
        assert_eq!(texts(&got), ["000"]);
        let got = deletion_set(&rs(2, "011"), 1, NoiseMode::UpTo).unwrap();
        assert_eq!(texts(&got), ["011", "11", "01"]);
        assert!(deletion_set(&rs(2, "01"), 3, NoiseMode::Exactly).is_err());
    }

    #[test]
    fn sample_zero_errors_is_identity() {
        let x = rs(4, "0123321");
        assert_eq!(sample_noise(&x, &NoiseSpec::substitution(0), 9).unwrap(), x);
        assert_eq!(sample_noise(&x, &NoiseSpec::deletion(0), 9).unwrap(), x);
    }

    #[test]
    fn sampled_substitutions_hit_exact_distance() {
        let x = rs(3, "0120120120");
        let spec = NoiseSpec::substitution(3).with_mode(NoiseMode::Exactly);
        for seed in 0..500 {
            let y = sample_noise(&x, &spec, seed).unwrap();
            assert_eq!(hamming_distance(&x, &y).unwrap(), 3);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let x = rs(2, "0110100110010110");
        for spec in [NoiseSpec::substitution(4), NoiseSpec::deletion(3)] {
            let a = sample_noise(&x, &spec, 77).unwrap();
            let b = sample_noise(&x, &spec, 77).unwrap();
            assert_eq!(a, b);
        }
        assert!(sample_noise(&x, &NoiseSpec::deletion(17), 1).is_err());
    }

    #[test]
    fn deletion_draws_are_position_uniform() {
        // x = 0101 with one deletion: the four positions give four distinct
        // strings, so each should appear with probability 1/4.
        let x = rs(2, "0101");
        let outcomes = deletion_set(&x, 1, NoiseMode::Exactly).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let trials = 100_000usize;
        let mut counts = vec![0usize; outcomes.len()];
        for _ in 0..trials {
            let y = sample_noise_with(&x, &NoiseSpec::deletion(1), &mut rng).unwrap();
            counts[outcomes.iter().position(|o| *o == y).unwrap()] += 1;
        }
        let expected = trials as f64 / 4.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // upper 1% point of chi-square with 3 degrees of freedom
        assert!(chi2 < 11.345, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn observe_examples() {
        let y = rs(2, "0110");
        let whole = observe(&y, 4).unwrap();
        assert_eq!(whole.count(y.symbols()), 1);
        let z = observe(&y, 3).unwrap();
        assert_eq!(z.count(&[0, 1, 1]), 1);
        assert_eq!(z.count(&[1, 1, 0]), 1);
        assert_eq!(z.total(), 2);
    }
}
