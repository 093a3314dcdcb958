//! Closed-form and exact quantities: q-ary entropy, GV/EB rate bounds, the
//! overlap probability `π_k` with its upper and lower bounds, asymptotic
//! `π_k` bounds, the root `δ̃_q`, redundancy exponents and rate thresholds.
//!
//! `π_k(s, t, q)` is the probability that a uniform string of length `s + k`
//! is within `t` substitutions of a string whose windows `[s]` and `k + [s]`
//! coincide. Such a string is constant on each residue class of positions
//! modulo `k`, so the minimal number of substitutions is the sum over classes
//! of (class size minus the largest symbol multiplicity in the class). The
//! exact value is computed by counting assignments per class by that cost and
//! convolving across classes.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::channels::NoiseKind;
use crate::error::{Error, Result};
use crate::strings::{check_q, derive_params};

fn log_q(x: f64, q: u32) -> f64 {
    x.ln() / f64::from(q).ln()
}

/// The q-ary entropy `x log_q(q-1) - x log_q x - (1-x) log_q(1-x)`.
pub fn entropy_q(x: f64, q: u32) -> Result<f64> {
    check_q(q)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "entropy argument {x} outside [0, 1]"
        )));
    }
    let term = |p: f64| if p > 0.0 { -p * log_q(p, q) } else { 0.0 };
    let spread = if x > 0.0 {
        x * log_q(f64::from(q - 1), q)
    } else {
        0.0
    };
    Ok(spread + term(x) + term(1.0 - x))
}

/// Binary entropy.
pub fn entropy2(x: f64) -> Result<f64> {
    entropy_q(x, 2)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `Σ_{i ≤ t} C(len, i) (q-1)^i` for any `t` (terms beyond `len` vanish).
fn ball_sum(len: usize, t: usize, q: u32) -> BigUint {
    let base = BigUint::from(q - 1);
    (0..=t.min(len))
        .map(|i| binomial(len, i) * Pow::pow(&base, i))
        .sum()
}

/// Size of the q-ary Hamming ball of radius `t` in `Σ^s`.
pub fn hamming_ball_size(s: usize, t: usize, q: u32) -> Result<BigUint> {
    check_q(q)?;
    if t > s {
        return Err(Error::arg(format!("radius {t} exceeds length {s}")));
    }
    Ok(ball_sum(s, t, q))
}

fn relative_range(delta: f64, q: u32) -> Result<f64> {
    check_q(q)?;
    let theta = f64::from(q - 1) / f64::from(q);
    if !(0.0..=theta + 1e-12).contains(&delta) {
        return Err(Error::Domain(format!(
            "relative distance {delta} outside [0, {theta}]"
        )));
    }
    Ok(theta)
}

/// Gilbert-Varshamov lower bound `1 - H_q(δ)` on the best code rate.
pub fn gv_rate(delta: f64, q: u32) -> Result<f64> {
    let theta = relative_range(delta, q)?;
    Ok(1.0 - entropy_q(delta.min(theta), q)?)
}

/// Elias-Bassalygo upper bound `1 - H_q(θ(1 - sqrt(1 - δ/θ)))`, `θ = (q-1)/q`.
pub fn eb_rate(delta: f64, q: u32) -> Result<f64> {
    let theta = relative_range(delta, q)?;
    let radius = theta * (1.0 - (1.0 - delta.min(theta) / theta).max(0.0).sqrt());
    Ok(1.0 - entropy_q(radius.min(1.0), q)?)
}

fn check_pi_args(k: usize, s: usize, t: usize, q: u32) -> Result<()> {
    check_q(q)?;
    if k == 0 || k > s {
        return Err(Error::arg(format!("need 0 < k <= s, got k={k}, s={s}")));
    }
    if t > s {
        return Err(Error::arg(format!("need t <= s, got t={t}, s={s}")));
    }
    Ok(())
}

/// Minimal number of substitutions turning `x` into a string of period `k`,
/// i.e. one whose windows `[|x|-k]` and `k + [|x|-k]` coincide.
pub fn periodic_cost(x: &[u8], k: usize) -> usize {
    let mut counts = [0usize; 256];
    let mut cost = 0;
    for r in 0..k.min(x.len()) {
        let mut size = 0;
        let mut mode = 0;
        for &v in x[r..].iter().step_by(k) {
            counts[v as usize] += 1;
            mode = mode.max(counts[v as usize]);
            size += 1;
        }
        for &v in x[r..].iter().step_by(k) {
            counts[v as usize] = 0;
        }
        cost += size - mode;
    }
    cost
}

/// Number of strings in `Σ^c` in which no symbol occurs more than `cap` times.
fn count_capped(c: usize, cap: usize, q: u32) -> BigUint {
    // ways[l]: fillings of l labelled positions using the symbols so far
    let mut ways = vec![BigUint::zero(); c + 1];
    ways[0] = BigUint::one();
    let choose: Vec<Vec<BigUint>> = (0..=c)
        .map(|l| (0..=l).map(|i| binomial(l, i)).collect())
        .collect();
    for _ in 0..q {
        let mut next = vec![BigUint::zero(); c + 1];
        for (l, w) in ways.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for i in 0..=cap.min(c - l) {
                next[l + i] += w * &choose[l + i][i];
            }
        }
        ways = next;
    }
    ways.swap_remove(c)
}

/// `dist[j]`: number of strings in `Σ^c` whose cost (length minus the top
/// symbol multiplicity) equals `j`.
fn class_cost_distribution(c: usize, q: u32) -> Vec<BigUint> {
    let mut dist = vec![BigUint::zero(); c.max(1)];
    if c == 0 {
        dist[0] = BigUint::one();
        return dist;
    }
    let mut below = count_capped(c, 0, q);
    for top in 1..=c {
        let upto = count_capped(c, top, q);
        dist[c - top] = &upto - &below;
        below = upto;
    }
    dist
}

fn convolve_truncated(a: &[BigUint], b: &[BigUint], len: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact `π_k` for windows of length `s`, offset `k` and `t` substitutions.
pub fn pi_exact(k: usize, s: usize, t: usize, q: u32) -> Result<BigRational> {
    check_pi_args(k, s, t, q)?;
    let len = s + k;
    let per_class = len / k;
    let longer = len % k;
    let short_dist = class_cost_distribution(per_class, q);
    let long_dist = class_cost_distribution(per_class + 1, q);
    let mut total = vec![BigUint::one()];
    for class in 0..k {
        let dist = if class < longer {
            &long_dist
        } else {
            &short_dist
        };
        total = convolve_truncated(&total, dist, t + 1);
    }
    let favourable: BigUint = total.into_iter().sum();
    Ok(ratio(favourable, Pow::pow(BigUint::from(q), len)))
}

/// `max_{0<k<s} π_k`; needs `s >= 2`.
pub fn p_max_exact(s: usize, t: usize, q: u32) -> Result<BigRational> {
    if s < 2 {
        return Err(Error::arg("the maximum over 0 < k < s needs s >= 2"));
    }
    let mut best = pi_exact(1, s, t, q)?;
    for k in 2..s {
        let v = pi_exact(k, s, t, q)?;
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// Exact `π_k` together with its closed-form lower and upper bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct PiBoundReport {
    pub k: usize,
    pub s: usize,
    pub t: usize,
    pub q: u32,
    pub exact: BigRational,
    pub lower: BigRational,
    pub upper: BigRational,
}

impl PiBoundReport {
    pub fn holds(&self) -> bool {
        self.lower <= self.exact && self.exact <= self.upper
    }
}

/// Lower bound `q^{-s} Σ_{i≤t} C(s,i)(q-1)^i`.
pub fn pi_lower(k: usize, s: usize, t: usize, q: u32) -> Result<BigRational> {
    check_pi_args(k, s, t, q)?;
    Ok(ratio(ball_sum(s, t, q), Pow::pow(BigUint::from(q), s)))
}

/// Upper bound with `C(s+k, i)` for `2k <= s` and `C(2s-k, i)` otherwise.
pub fn pi_upper(k: usize, s: usize, t: usize, q: u32) -> Result<BigRational> {
    check_pi_args(k, s, t, q)?;
    let len = if 2 * k <= s { s + k } else { 2 * s - k };
    Ok(ratio(ball_sum(len, t, q), Pow::pow(BigUint::from(q), s)))
}

/// Builds the report and fails with [`Error::Invariant`] if the bounds do not
/// bracket the exact value.
pub fn pi_sandwich(k: usize, s: usize, t: usize, q: u32) -> Result<PiBoundReport> {
    let report = PiBoundReport {
        k,
        s,
        t,
        q,
        exact: pi_exact(k, s, t, q)?,
        lower: pi_lower(k, s, t, q)?,
        upper: pi_upper(k, s, t, q)?,
    };
    if !report.holds() {
        return Err(Error::Invariant(format!(
            "pi bounds violated at k={k}, s={s}, t={t}, q={q}"
        )));
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PiBoundVariant {
    /// Valid for any `δ`: exponent uses `H_q(δ + min(δ, 1 - k/s))`.
    Naive,
    /// Valid for `δ < δ̃_q`: exponent uses `(3/2) H_q(2δ/3)` for `k < s`.
    Improved,
}

/// Asymptotic upper bound on `π_k` with `s = floor(a log_q n)`.
pub fn pi_asymptotic_upper(
    n: usize,
    a: f64,
    delta: f64,
    q: u32,
    k: usize,
    variant: PiBoundVariant,
) -> Result<f64> {
    let params = derive_params(n, q, a, delta)?;
    let s = params.s;
    if k == 0 || k > s {
        return Err(Error::arg(format!("need 0 < k <= s = {s}, got k={k}")));
    }
    let scale = |exponent: f64| f64::from(q) * (n as f64).powf(-a * exponent);
    if k == s {
        return Ok(scale(1.0 - entropy_q(delta, q)?));
    }
    match variant {
        PiBoundVariant::Naive => {
            let arg = delta + delta.min(1.0 - k as f64 / s as f64);
            Ok(scale(1.0 - entropy_q(arg, q)?))
        }
        PiBoundVariant::Improved => {
            let limit = delta_tilde(q)?;
            if delta >= limit {
                return Err(Error::Domain(format!(
                    "improved bound needs delta < {limit:.6} for q={q}, got {delta}"
                )));
            }
            Ok(scale(1.0 - 1.5 * entropy_q(2.0 * delta / 3.0, q)?))
        }
    }
}

/// The root `δ̃_q` of `H_q(2δ/3) = 2/3` in `(0, (q-1)/q)`, by bisection.
pub fn delta_tilde(q: u32) -> Result<f64> {
    check_q(q)?;
    let f = |d: f64| entropy_q(2.0 * d / 3.0, q).map(|h| h - 2.0 / 3.0);
    let (mut lo, mut hi) = (0.0f64, f64::from(q - 1) / f64::from(q));
    for _ in 0..200 {
        if hi - lo <= 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Whether a substitution exponent is covered by a proven statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentValidity {
    /// Covered by the main theorem for its noise model.
    Proven,
    /// `(q-1)/2q <= δ < δ̃_q`: holds up to an additional `o(n)` term.
    Extended,
    /// `δ >= δ̃_q`: outside every proven regime.
    Unproven,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentBound {
    pub exponent: f64,
    pub validity: ExponentValidity,
}

/// Exponent `e` in the redundancy bound `O(n^e)` for resilient repeat-free strings.
pub fn redundancy_exponent(a: f64, delta: f64, q: u32, noise: NoiseKind) -> Result<ExponentBound> {
    check_q(q)?;
    if a.is_nan() || a <= 1.0 {
        return Err(Error::Domain(format!("need a > 1, got {a}")));
    }
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::Domain(format!("need delta >= 0, got {delta}")));
    }
    match noise {
        NoiseKind::Substitution => {
            let exponent = 2.0 - a * (1.0 - entropy_q(delta.min(1.0), q)?);
            let validity = if delta < f64::from(q - 1) / f64::from(2 * q) {
                ExponentValidity::Proven
            } else if delta < delta_tilde(q)? {
                ExponentValidity::Extended
            } else {
                ExponentValidity::Unproven
            };
            Ok(ExponentBound { exponent, validity })
        }
        NoiseKind::Deletion => Ok(ExponentBound {
            exponent: 2.0 - a + a * deletion_penalty(delta)? / f64::from(q).log2(),
            validity: ExponentValidity::Proven,
        }),
    }
}

/// `2(1+δ) H_2(δ/(1+δ))`.
fn deletion_penalty(delta: f64) -> Result<f64> {
    Ok(2.0 * (1.0 + delta) * entropy2(delta / (1.0 + delta))?)
}

/// Thresholds on `a`: above `rate_one` the rate tends to 1; at or above
/// `constant_redundancy` the redundancy is bounded. Infinite when vacuous.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateThresholds {
    pub rate_one: f64,
    pub constant_redundancy: f64,
}

pub fn rate_threshold(delta: f64, q: u32, noise: NoiseKind) -> Result<RateThresholds> {
    check_q(q)?;
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::Domain(format!("need delta >= 0, got {delta}")));
    }
    let denominator = match noise {
        NoiseKind::Substitution => {
            if delta > 1.0 {
                return Err(Error::Domain(format!("need delta <= 1, got {delta}")));
            }
            1.0 - entropy_q(delta, q)?
        }
        NoiseKind::Deletion => 1.0 - deletion_penalty(delta)? / f64::from(q).log2(),
    };
    let rate_one = if denominator > 0.0 {
        1.0 / denominator
    } else {
        f64::INFINITY
    };
    Ok(RateThresholds {
        rate_one,
        constant_redundancy: 2.0 * rate_one,
    })
}

/// Whether emptiness of the substitution family is certified for large `n`:
/// either `δ >= (q-1)/q`, or `a` is below the reciprocal of the EB bound
/// (which upper-bounds the best code rate). `false` means "not certified".
pub fn converse_empty(a: f64, delta: f64, q: u32) -> Result<bool> {
    check_q(q)?;
    if a.is_nan() || a <= 0.0 || !(0.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!(
            "need a > 0 and 0 <= delta <= 1, got a={a}, delta={delta}"
        )));
    }
    let theta = f64::from(q - 1) / f64::from(q);
    if delta >= theta {
        return Ok(true);
    }
    let eb = eb_rate(delta, q)?;
    Ok(eb <= 0.0 || a < 1.0 / eb)
}

/// The two local-lemma quantities `2 s n π_s` and `4 s² π'` (with
/// `π' = max_{0<k<s} π_k`), computed exactly and compared with `1/(2e)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalLemmaCheck {
    pub pi_s: BigRational,
    pub pi_prime: BigRational,
    pub far_term: f64,
    pub near_term: f64,
    pub satisfied: bool,
}

pub fn local_lemma_check(n: usize, s: usize, t: usize, q: u32) -> Result<LocalLemmaCheck> {
    use num_traits::ToPrimitive;
    let pi_s = pi_exact(s, s, t, q)?;
    let pi_prime = p_max_exact(s, t, q)?;
    let to_f64 = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
    let far_term = 2.0 * s as f64 * n as f64 * to_f64(&pi_s);
    let near_term = 4.0 * (s * s) as f64 * to_f64(&pi_prime);
    let limit = 1.0 / (2.0 * std::f64::consts::E);
    Ok(LocalLemmaCheck {
        satisfied: far_term < limit && near_term < limit,
        pi_s,
        pi_prime,
        far_term,
        near_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(num: u64, den: u64) -> BigRational {
        ratio(BigUint::from(num), BigUint::from(den))
    }

    #[test]
    fn entropy_examples() {
        for q in 2..10 {
            assert_eq!(entropy_q(0.0, q).unwrap(), 0.0);
            let peak = f64::from(q - 1) / f64::from(q);
            assert!((entropy_q(peak, q).unwrap() - 1.0).abs() < 1e-12);
        }
        let h = entropy_q(2.0 / 3.0 * 0.2609, 2).unwrap();
        assert!((h - 2.0 / 3.0).abs() < 1e-3, "{h}");
        assert!(entropy_q(1.2, 2).is_err());
        assert!(entropy_q(-0.1, 2).is_err());
    }

    #[test]
    fn entropy_is_concave_with_peak_at_theta() {
        for q in [2u32, 3, 5, 16] {
            let h = 1e-3;
            let mut x = h;
            while x + h <= 1.0 {
                let second = entropy_q(x + h, q).unwrap() - 2.0 * entropy_q(x, q).unwrap()
                    + entropy_q(x - h, q).unwrap();
                assert!(second < 0.0, "q={q} x={x}");
                x += 0.01;
            }
            let peak = f64::from(q - 1) / f64::from(q);
            let top = entropy_q(peak, q).unwrap();
            for i in 0..=100 {
                assert!(entropy_q(i as f64 / 100.0, q).unwrap() <= top + 1e-12);
            }
        }
    }

    #[test]
    fn ball_examples() {
        assert_eq!(hamming_ball_size(7, 0, 3).unwrap(), BigUint::one());
        assert_eq!(hamming_ball_size(5, 5, 3).unwrap(), BigUint::from(243u32));
        assert_eq!(hamming_ball_size(3, 1, 2).unwrap(), BigUint::from(4u32));
        assert!(hamming_ball_size(3, 4, 2).is_err());
    }

    #[test]
    fn rate_bound_examples() {
        for q in 2..8 {
            let theta = f64::from(q - 1) / f64::from(q);
            assert!((gv_rate(0.0, q).unwrap() - 1.0).abs() < 1e-12);
            assert!((eb_rate(0.0, q).unwrap() - 1.0).abs() < 1e-12);
            assert!(gv_rate(theta, q).unwrap().abs() < 1e-12);
            assert!(eb_rate(theta, q).unwrap().abs() < 1e-12);
            for i in 0..=200 {
                let d = theta * i as f64 / 200.0;
                assert!(gv_rate(d, q).unwrap() <= eb_rate(d, q).unwrap() + 1e-12);
            }
        }
        // 1 - H_2(0.11) = 0.500150...
        assert!((gv_rate(0.11, 2).unwrap() - 0.5001).abs() < 1e-3);
        assert!(gv_rate(0.6, 2).is_err());
    }

    #[test]
    fn pi_exact_examples() {
        for s in 1..6 {
            assert_eq!(pi_exact(s, s, 0, 3).unwrap(), r(1, 3u64.pow(s as u32)));
        }
        assert_eq!(pi_exact(1, 3, 0, 2).unwrap(), r(1, 8));
        assert_eq!(pi_exact(2, 2, 1, 2).unwrap(), r(3, 4));
        assert!(pi_exact(0, 3, 0, 2).is_err());
        assert!(pi_exact(4, 3, 0, 2).is_err());
        assert!(pi_exact(2, 3, 4, 2).is_err());
    }

    #[test]
    fn periodic_cost_examples() {
        assert_eq!(periodic_cost(&[0, 1, 0, 1, 1], 2), 1);
        assert_eq!(periodic_cost(&[0, 0, 0], 1), 0);
        assert_eq!(periodic_cost(&[0, 1, 2], 1), 2);
    }

    #[test]
    fn class_distribution_sums_to_space() {
        for q in 2..5u32 {
            for c in 1..7 {
                let dist = class_cost_distribution(c, q);
                let total: BigUint = dist.iter().sum();
                assert_eq!(total, Pow::pow(BigUint::from(q), c), "q={q} c={c}");
            }
        }
        // Σ^3 over q=2: 000/111 cost 0, the other six cost 1.
        assert_eq!(
            class_cost_distribution(3, 2),
            vec![BigUint::from(2u32), BigUint::from(6u32), BigUint::zero()]
        );
    }

    #[test]
    fn sandwich_examples() {
        let rep = pi_sandwich(1, 2, 1, 2).unwrap();
        assert_eq!(
            (rep.lower.clone(), rep.upper.clone(), rep.exact.clone()),
            (r(3, 4), r(1, 1), r(1, 1))
        );
        // Every string of Σ^6 within one substitution of period 2 is counted
        // by the upper bound's C(6,0) + C(6,1), so the upper side is tight.
        let rep = pi_sandwich(2, 4, 1, 2).unwrap();
        assert_eq!(
            (rep.lower.clone(), rep.exact.clone(), rep.upper.clone()),
            (r(5, 16), r(7, 16), r(7, 16))
        );
        for s in 1..6 {
            for t in 0..=s.min(2) {
                let rep = pi_sandwich(s, s, t, 2).unwrap();
                assert_eq!(rep.lower, rep.exact);
                assert_eq!(rep.upper, rep.exact);
            }
        }
    }

    #[test]
    fn asymptotic_examples() {
        let s = derive_params(1024, 2, 2.0, 0.25).unwrap().s;
        let naive = pi_asymptotic_upper(1024, 2.0, 0.25, 2, s, PiBoundVariant::Naive).unwrap();
        let improved =
            pi_asymptotic_upper(1024, 2.0, 0.25, 2, s, PiBoundVariant::Improved).unwrap();
        assert_eq!(naive, improved);
        assert!((naive - 0.146).abs() < 1e-3, "{naive}");
        // The improved bound is uniform in k, so it is compared with the
        // largest naive bound over 0 < k < s.
        let dt = delta_tilde(2).unwrap();
        let n = 1 << 12;
        for di in 1..10 {
            let delta = dt * di as f64 / 10.0;
            let s = derive_params(n, 2, 2.0, delta).unwrap().s;
            let worst_naive = (1..s)
                .filter_map(|k| {
                    pi_asymptotic_upper(n, 2.0, delta, 2, k, PiBoundVariant::Naive).ok()
                })
                .fold(0.0f64, f64::max);
            for k in 1..s {
                let improved =
                    pi_asymptotic_upper(n, 2.0, delta, 2, k, PiBoundVariant::Improved).unwrap();
                assert!(
                    improved <= worst_naive * (1.0 + 1e-12),
                    "delta={delta} k={k}"
                );
            }
        }
        assert!(matches!(
            pi_asymptotic_upper(1024, 2.0, 0.3, 2, 3, PiBoundVariant::Improved),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn delta_tilde_table() {
        let table = [
            (2, 0.2609),
            (3, 0.3723),
            (4, 0.4375),
            (5, 0.4817),
            (6, 0.5141),
        ];
        for (q, want) in table {
            let got = delta_tilde(q).unwrap();
            assert!((got - want).abs() <= 1e-4, "q={q}: {got}");
        }
        for q in 2..=64 {
            assert!(delta_tilde(q).unwrap() > f64::from(q - 1) / f64::from(2 * q));
        }
    }

    #[test]
    fn exponent_examples() {
        let e = redundancy_exponent(2.0, 0.0, 2, NoiseKind::Substitution).unwrap();
        assert!(e.exponent.abs() < 1e-12);
        assert_eq!(e.validity, ExponentValidity::Proven);
        for q in [2u32, 3, 4] {
            let delta = 0.1;
            let a = 1.0 / (1.0 - entropy_q(delta, q).unwrap());
            let e = redundancy_exponent(a, delta, q, NoiseKind::Substitution).unwrap();
            assert!((e.exponent - 1.0).abs() < 1e-12);
        }
        let e = redundancy_exponent(3.0, 0.0, 4, NoiseKind::Deletion).unwrap();
        assert!((e.exponent - (2.0 - 3.0)).abs() < 1e-12);
        let e = redundancy_exponent(3.0, 1e-9, 4, NoiseKind::Deletion).unwrap();
        assert!((e.exponent + 1.0).abs() < 1e-6);
        let e = redundancy_exponent(3.0, 0.255, 2, NoiseKind::Substitution).unwrap();
        assert_eq!(e.validity, ExponentValidity::Extended);
        let e = redundancy_exponent(3.0, 0.3, 2, NoiseKind::Substitution).unwrap();
        assert_eq!(e.validity, ExponentValidity::Unproven);
        assert!(redundancy_exponent(1.0, 0.1, 2, NoiseKind::Deletion).is_err());
    }

    #[test]
    fn threshold_examples() {
        for noise in [NoiseKind::Substitution, NoiseKind::Deletion] {
            let th = rate_threshold(0.0, 2, noise).unwrap();
            assert_eq!((th.rate_one, th.constant_redundancy), (1.0, 2.0));
        }
        let th = rate_threshold(0.25, 2, NoiseKind::Substitution).unwrap();
        assert!((th.rate_one - 5.30).abs() < 1e-2, "{}", th.rate_one);
        assert_eq!(th.constant_redundancy, 2.0 * th.rate_one);
        // 2(1.25) H_2(0.2) = 1.80... >= log_2 2
        let th = rate_threshold(0.25, 2, NoiseKind::Deletion).unwrap();
        assert!(th.rate_one.is_infinite());
        let th = rate_threshold(0.5, 2, NoiseKind::Substitution).unwrap();
        assert!(th.rate_one.is_infinite());
    }

    #[test]
    fn converse_examples() {
        for a in [0.5, 1.0, 3.0, 100.0] {
            assert!(converse_empty(a, 0.5, 2).unwrap());
            assert!(converse_empty(a, 2.0 / 3.0, 3).unwrap());
        }
        assert!(!converse_empty(2.0, 0.0, 2).unwrap());
        // 1 / EB(0.4) is about 6.69 for q = 2
        let inv = 1.0 / eb_rate(0.4, 2).unwrap();
        assert!((inv - 6.69).abs() < 0.01, "{inv}");
        assert!(converse_empty(1.5, 0.4, 2).unwrap());
        assert!(!converse_empty(7.0, 0.4, 2).unwrap());
    }

    #[test]
    fn local_lemma_quantities() {
        let check = local_lemma_check(1 << 10, 20, 0, 2).unwrap();
        assert_eq!(check.pi_s, r(1, 1 << 20));
        assert!((check.far_term - 2.0 * 20.0 * 1024.0 / f64::from(1u32 << 20)).abs() < 1e-12);
        assert!(check.satisfied);
        let check = local_lemma_check(1 << 10, 6, 3, 2).unwrap();
        assert!(!check.satisfied);
    }
}
