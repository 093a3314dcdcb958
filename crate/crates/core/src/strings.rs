//! Strings over the ring Z_q, index-set restriction, Hamming distance,
//! k-mer profiles and channel parameter derivation.
//!
//! Every other module builds on [`RingString`] and [`KmerMultiset`]. The
//! text format shared by the CLI lives here too: a `q=<int>` header, then one
//! string per line, written as base-36 digits when `q <= 36` and as
//! comma-separated decimals otherwise.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Pow;

use crate::error::{Error, Result};

/// Largest supported alphabet; a symbol always fits in one byte.
pub const MAX_Q: u32 = 256;

/// Alphabets up to this size are rendered one base-36 digit per symbol.
pub const MAX_DIGIT_Q: u32 = 36;

pub(crate) fn check_q(q: u32) -> Result<u32> {
    if (2..=MAX_Q).contains(&q) {
        Ok(q)
    } else {
        Err(Error::arg(format!(
            "alphabet size {q} outside [2, {MAX_Q}]"
        )))
    }
}

/// A finite string over Z_q.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingString {
    q: u32,
    symbols: Vec<u8>,
}

impl RingString {
    pub fn new(q: u32, symbols: Vec<u8>) -> Result<Self> {
        check_q(q)?;
        if let Some(pos) = symbols.iter().position(|&v| u32::from(v) >= q) {
            return Err(Error::arg(format!(
                "symbol {} at position {pos} is not in Z_{q}",
                symbols[pos]
            )));
        }
        Ok(RingString { q, symbols })
    }

    /// Caller guarantees every symbol is below `q` and `q` is valid.
    pub(crate) fn from_raw(q: u32, symbols: Vec<u8>) -> Self {
        debug_assert!(symbols.iter().all(|&v| u32::from(v) < q));
        RingString { q, symbols }
    }

    pub fn zeros(q: u32, n: usize) -> Result<Self> {
        check_q(q)?;
        Ok(RingString::from_raw(q, vec![0; n]))
    }

    /// The `index`-th string of Σ^n in lexicographic order.
    pub fn from_index(q: u32, n: usize, mut index: u64) -> Result<Self> {
        check_q(q)?;
        let mut symbols = vec![0u8; n];
        for slot in symbols.iter_mut().rev() {
            *slot = (index % u64::from(q)) as u8;
            index /= u64::from(q);
        }
        if index != 0 {
            return Err(Error::arg(format!("index out of range for q={q}, n={n}")));
        }
        Ok(RingString::from_raw(q, symbols))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.symbols
    }

    fn check_compatible(&self, other: &RingString) -> Result<()> {
        if self.q != other.q {
            return Err(Error::arg(format!(
                "alphabet mismatch: q={} vs q={}",
                self.q, other.q
            )));
        }
        if self.len() != other.len() {
            return Err(Error::arg(format!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    /// Componentwise sum in Z_q.
    pub fn add(&self, other: &RingString) -> Result<RingString> {
        self.check_compatible(other)?;
        let q = self.q as u16;
        let symbols = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .map(|(&a, &b)| ((u16::from(a) + u16::from(b)) % q) as u8)
            .collect();
        Ok(RingString::from_raw(self.q, symbols))
    }

    /// Componentwise difference in Z_q.
    pub fn sub(&self, other: &RingString) -> Result<RingString> {
        self.check_compatible(other)?;
        let q = self.q as u16;
        let symbols = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .map(|(&a, &b)| ((u16::from(a) + q - u16::from(b)) % q) as u8)
            .collect();
        Ok(RingString::from_raw(self.q, symbols))
    }

    /// Renders the symbols in the shared text format (no header).
    pub fn to_text(&self) -> String {
        render_symbols(self.q, &self.symbols)
    }

    /// Parses one line of the shared text format.
    pub fn parse(q: u32, text: &str) -> Result<Self> {
        check_q(q)?;
        let symbols = parse_symbols(q, text.trim())?;
        Ok(RingString::from_raw(q, symbols))
    }
}

impl fmt::Display for RingString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for RingString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingString(q={}, {})", self.q, self.to_text())
    }
}

pub(crate) fn render_symbols(q: u32, symbols: &[u8]) -> String {
    if q <= MAX_DIGIT_Q {
        symbols
            .iter()
            .map(|&v| char::from_digit(u32::from(v), 36).expect("symbol below 36"))
            .collect()
    } else {
        symbols
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub(crate) fn parse_symbols(q: u32, text: &str) -> Result<Vec<u8>> {
    let bad = |tok: &str| Error::arg(format!("invalid symbol {tok:?} for q={q}"));
    if q <= MAX_DIGIT_Q {
        text.chars()
            .map(|c| {
                c.to_digit(36)
                    .filter(|&v| v < q)
                    .map(|v| v as u8)
                    .ok_or_else(|| bad(&c.to_string()))
            })
            .collect()
    } else if text.is_empty() {
        Ok(Vec::new())
    } else {
        text.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .ok()
                    .filter(|&v| v < q)
                    .map(|v| v as u8)
                    .ok_or_else(|| bad(tok))
            })
            .collect()
    }
}

pub(crate) fn parse_header_fields(line: &str, lineno: usize) -> Result<BTreeMap<String, String>> {
    let mut fields = BTreeMap::new();
    for tok in line.split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(lineno, format!("expected key=value, got {tok:?}")))?;
        fields.insert(key.to_string(), value.to_string());
    }
    Ok(fields)
}

pub(crate) fn header_value<T: std::str::FromStr>(
    fields: &BTreeMap<String, String>,
    key: &str,
    lineno: usize,
) -> Result<T> {
    fields
        .get(key)
        .ok_or_else(|| Error::parse(lineno, format!("header is missing {key}=")))?
        .parse()
        .map_err(|_| Error::parse(lineno, format!("header field {key} is not a valid number")))
}

/// Parses a strings file: `q=<int>` header, then one string per line.
/// Blank lines are skipped.
pub fn parse_strings(text: &str) -> Result<(u32, Vec<RingString>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty input, expected a q=<int> header"))?;
    let fields = parse_header_fields(header, lineno)?;
    let q: u32 = header_value(&fields, "q", lineno)?;
    check_q(q).map_err(|e| Error::parse(lineno, e.to_string()))?;
    let strings = lines
        .map(|(lineno, line)| {
            RingString::parse(q, line).map_err(|e| Error::parse(lineno, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((q, strings))
}

/// Writes strings in the shared text format, header included.
pub fn format_strings<'a>(q: u32, strings: impl IntoIterator<Item = &'a RingString>) -> String {
    let mut out = format!("q={q}\n");
    for s in strings {
        out.push_str(&s.to_text());
        out.push('\n');
    }
    out
}

/// A strictly increasing list of indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("index set must be strictly increasing"));
        }
        Ok(IndexSet(indices))
    }

    /// The interval `start + [len]`.
    pub fn interval(start: usize, len: usize) -> Self {
        IndexSet((start..start + len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, k: usize) -> Option<usize> {
        self.0.get(k).copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Distance between the last and first index (0 for empty or singleton sets).
    pub fn span(&self) -> usize {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut all: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        all.sort_unstable();
        all.dedup();
        IndexSet(all)
    }
}

/// Index sets `(first, second)` of equal size with `first[k] < second[k]` for all `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ObservablePair {
    first: IndexSet,
    second: IndexSet,
}

impl ObservablePair {
    pub fn new(first: IndexSet, second: IndexSet) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::arg("observable pair needs equal-size index sets"));
        }
        if first.0.iter().zip(&second.0).any(|(a, b)| a >= b) {
            return Err(Error::arg(
                "observable pair needs first[k] < second[k] for all k",
            ));
        }
        Ok(ObservablePair { first, second })
    }

    /// The pair of windows `(i + [s], j + [s])`, `i < j`.
    pub fn windows(i: usize, j: usize, s: usize) -> Result<Self> {
        ObservablePair::new(IndexSet::interval(i, s), IndexSet::interval(j, s))
    }

    pub fn first(&self) -> &IndexSet {
        &self.first
    }

    pub fn second(&self) -> &IndexSet {
        &self.second
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    /// Both index sets together.
    pub fn support(&self) -> IndexSet {
        self.first.union(&self.second)
    }
}

pub(crate) fn mismatches(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn hamming_distance(x: &RingString, y: &RingString) -> Result<usize> {
    x.check_compatible(y)?;
    Ok(mismatches(&x.symbols, &y.symbols))
}

/// `x_I`: the symbols of `x` at the indices of `I`, in order. Indices at or
/// beyond `|x|` are dropped.
pub fn restrict(x: &RingString, indices: &IndexSet) -> RingString {
    let symbols = indices
        .0
        .iter()
        .take_while(|&&i| i < x.len())
        .map(|&i| x.symbols[i])
        .collect();
    RingString::from_raw(x.q, symbols)
}

/// The length-`s` substring of `x` at index `i`.
pub fn window(x: &RingString, i: usize, s: usize) -> Result<RingString> {
    match i.checked_add(s) {
        Some(end) if end <= x.len() => Ok(RingString::from_raw(x.q, x.symbols[i..end].to_vec())),
        _ => Err(Error::arg(format!(
            "window {i}+[{s}] exceeds string length {}",
            x.len()
        ))),
    }
}

/// `u_{I,J} = x_I - x_J` over Z_q.
pub fn diff(x: &RingString, pair: &ObservablePair) -> Result<RingString> {
    match pair.second.max().max(pair.first.max()) {
        Some(m) if m >= x.len() => {
            return Err(Error::arg(format!(
                "index {m} out of range for string of length {}",
                x.len()
            )))
        }
        _ => {}
    }
    restrict(x, &pair.first).sub(&restrict(x, &pair.second))
}

/// Derived channel parameters `s = floor(a log_q n)` and `t = floor(delta s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub n: usize,
    pub q: u32,
    pub a: f64,
    pub delta: f64,
    pub s: usize,
    pub t: usize,
}

/// Writes `a` as `p / r` with small `r` when the float product is exact.
fn as_small_fraction(a: f64) -> Option<(u64, u64)> {
    (1..=1000u64).find_map(|r| {
        let p = a * r as f64;
        (p.fract() == 0.0 && (1.0..=4096.0).contains(&p)).then_some((p as u64, r))
    })
}

/// `floor(a log_q n)`, corrected by exact integer comparison when `a` is a
/// small rational.
fn floor_scaled_log(n: usize, q: u32, a: f64) -> i64 {
    let estimate = (a * (n as f64).ln() / f64::from(q).ln()).floor() as i64;
    let Some((p, r)) = as_small_fraction(a) else {
        return estimate;
    };
    // q^(s r) <= n^p < q^((s + 1) r)
    let bits = p as f64 * (n as f64).log2();
    if bits > 1e6 {
        return estimate;
    }
    let target: BigUint = Pow::pow(BigUint::from(n), p);
    let q_big = BigUint::from(q);
    let q_pow = |s: i64| -> BigUint { Pow::pow(&q_big, (s.max(0) as u64) * r) };
    let mut s = estimate.max(0);
    while s > 0 && q_pow(s) > target {
        s -= 1;
    }
    while q_pow(s + 1) <= target {
        s += 1;
    }
    s
}

fn floor_product(delta: f64, s: usize) -> usize {
    let v = delta * s as f64;
    let nearest = v.round();
    if (v - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        v.floor() as usize
    }
}

pub fn derive_params(n: usize, q: u32, a: f64, delta: f64) -> Result<ChannelParams> {
    check_q(q)?;
    if n < 2 {
        return Err(Error::Parameter(format!("n={n} must be at least 2")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Parameter(format!("a={a} must be positive")));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Parameter(format!(
            "delta={delta} must be non-negative"
        )));
    }
    let s = floor_scaled_log(n, q, a);
    if s < 1 || s as usize > n {
        return Err(Error::Parameter(format!(
            "s = floor(a log_q n) = {s} is outside (0, {n}]"
        )));
    }
    let s = s as usize;
    Ok(ChannelParams {
        n,
        q,
        a,
        delta,
        s,
        t: floor_product(delta, s),
    })
}

/// A multiset of k-mers, iterated in lexicographic order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KmerMultiset {
    k: usize,
    q: u32,
    entries: BTreeMap<Vec<u8>, usize>,
}

impl KmerMultiset {
    pub fn new(q: u32, k: usize) -> Result<Self> {
        check_q(q)?;
        Ok(KmerMultiset {
            k,
            q,
            entries: BTreeMap::new(),
        })
    }

    /// Adds `count` copies of `mer`; a zero count is a no-op.
    pub fn insert(&mut self, mer: &RingString, count: usize) -> Result<()> {
        if mer.q != self.q || mer.len() != self.k {
            return Err(Error::arg(format!(
                "mer {mer:?} does not match k={} q={}",
                self.k, self.q
            )));
        }
        if count > 0 {
            *self.entries.entry(mer.symbols.clone()).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Number of distinct mers.
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn count(&self, mer: &[u8]) -> usize {
        self.entries.get(mer).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], usize)> {
        self.entries.iter().map(|(m, &c)| (m.as_slice(), c))
    }

    /// Serializes as `q=<int> k=<int>` followed by `<mer> <multiplicity>` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("q={} k={}\n", self.q, self.k);
        for (mer, count) in self.iter() {
            out.push_str(&render_symbols(self.q, mer));
            out.push(' ');
            out.push_str(&count.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (lineno, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty input, expected a q=<int> k=<int> header"))?;
        let fields = parse_header_fields(header, lineno)?;
        let q: u32 = header_value(&fields, "q", lineno)?;
        let k: usize = header_value(&fields, "k", lineno)?;
        let mut multiset =
            KmerMultiset::new(q, k).map_err(|e| Error::parse(lineno, e.to_string()))?;
        for (lineno, line) in lines {
            let (mer, count) = line
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| Error::parse(lineno, "expected <mer> <multiplicity>"))?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad multiplicity {count:?}")))?;
            if count == 0 {
                return Err(Error::parse(lineno, "multiplicities must be positive"));
            }
            let mer = RingString::parse(q, mer).map_err(|e| Error::parse(lineno, e.to_string()))?;
            multiset
                .insert(&mer, count)
                .map_err(|e| Error::parse(lineno, e.to_string()))?;
        }
        Ok(multiset)
    }
}

fn symbol_bits(q: u32) -> usize {
    (32 - (q - 1).leading_zeros()) as usize
}

/// Counts windows through fixed-width big-endian integer keys, whose order
/// matches the lexicographic order of the windows.
fn packed_profile(symbols: &[u8], k: usize, bits: usize) -> BTreeMap<Vec<u8>, usize> {
    let mask = if k * bits == 128 {
        u128::MAX
    } else {
        (1u128 << (k * bits)) - 1
    };
    let mut key = 0u128;
    let mut keys = Vec::with_capacity(symbols.len() + 1 - k);
    for (i, &v) in symbols.iter().enumerate() {
        key = ((key << bits) | u128::from(v)) & mask;
        if i + 1 >= k {
            keys.push(key);
        }
    }
    keys.sort_unstable();
    let symbol_mask = (1u128 << bits) - 1;
    keys.chunk_by(|a, b| a == b)
        .map(|group| {
            let mer = (0..k)
                .rev()
                .map(|m| ((group[0] >> (m * bits)) & symbol_mask) as u8)
                .collect();
            (mer, group.len())
        })
        .collect()
}

/// `Z_k(x)`, the multiset of all k-mers of `x`.
pub fn z_profile(x: &RingString, k: usize) -> Result<KmerMultiset> {
    if k == 0 || k > x.len() {
        return Err(Error::arg(format!(
            "mer length {k} outside [1, {}]",
            x.len()
        )));
    }
    let bits = symbol_bits(x.q);
    let entries = if k * bits <= 128 {
        packed_profile(&x.symbols, k, bits)
    } else {
        let mut windows: Vec<&[u8]> = x.symbols.windows(k).collect();
        windows.sort_unstable();
        windows
            .chunk_by(|a, b| a == b)
            .map(|group| (group[0].to_vec(), group.len()))
            .collect()
    };
    Ok(KmerMultiset { k, q: x.q, entries })
}

pub(crate) fn repeat_free_slice(symbols: &[u8], s: usize) -> bool {
    let count = symbols.len() + 1 - s;
    if count <= 32 {
        let windows: Vec<&[u8]> = symbols.windows(s).collect();
        return windows
            .iter()
            .enumerate()
            .all(|(i, w)| windows[i + 1..].iter().all(|v| v != w));
    }
    let mut seen = HashSet::with_capacity(count);
    symbols.windows(s).all(|w| seen.insert(w))
}

/// Whether all `|x| - s + 1` windows of length `s` are pairwise distinct.
pub fn is_repeat_free(x: &RingString, s: usize) -> Result<bool> {
    if s == 0 || s > x.len() {
        return Err(Error::arg(format!(
            "window length {s} outside [1, {}]",
            x.len()
        )));
    }
    Ok(repeat_free_slice(&x.symbols, s))
}
