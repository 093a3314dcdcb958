//! Coset codec for the substitution substring channel.
//!
//! A codeword `z + c` of a `t`-error-correcting inner code is kept only when
//! it is certified resilient repeat-free, so any `y` within `t` substitutions
//! of it is recovered exactly from `Z_{s+1}(y)` by [`assemble`]. Decoding then
//! returns the nearest kept word within the correction radius.

use crate::error::{Error, Result};
use crate::generator::{find_coset, Certifier, CosetStrategy};
use crate::reconstruct::assemble;
use crate::repeatfree::WorkBudget;
use crate::strings::{
    check_q, header_value, mismatches, parse_header_fields, parse_symbols, KmerMultiset, RingString,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerCode {
    n: usize,
    q: u32,
    codewords: Vec<RingString>,
    t_capability: usize,
}

impl InnerCode {
    /// Validates that the words are distinct, share `q` and length, and are
    /// pairwise at distance at least `2 t_capability + 1`.
    pub fn new(codewords: Vec<RingString>, t_capability: usize) -> Result<Self> {
        let first = codewords.first().ok_or_else(|| Error::arg("empty code"))?;
        let (q, n) = (first.q(), first.len());
        if codewords.iter().any(|c| c.q() != q || c.len() != n) {
            return Err(Error::arg("codewords differ in length or alphabet"));
        }
        let need = 2 * t_capability + 1;
        for (i, a) in codewords.iter().enumerate() {
            for b in &codewords[i + 1..] {
                let d = mismatches(a.symbols(), b.symbols());
                if d < need {
                    return Err(Error::arg(format!(
                        "codewords {a} and {b} are at distance {d} < {need}"
                    )));
                }
            }
        }
        Ok(InnerCode {
            n,
            q,
            codewords,
            t_capability,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn codewords(&self) -> &[RingString] {
        &self.codewords
    }

    pub fn t_capability(&self) -> usize {
        self.t_capability
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }
}

/// Greedy lexicode: scans `Σ^n` in lexicographic order and keeps each word at
/// distance at least `d_min` from all words kept so far.
pub fn build_inner_lexicode(
    n: usize,
    q: u32,
    d_min: usize,
    budget: WorkBudget,
) -> Result<InnerCode> {
    check_q(q)?;
    if d_min == 0 || d_min > n {
        return Err(Error::arg(format!("d_min {d_min} outside [1, {n}]")));
    }
    let space = u64::from(q)
        .checked_pow(u32::try_from(n).unwrap_or(u32::MAX))
        .ok_or(Error::BudgetExceeded {
            required: u128::MAX,
            budget: budget.0,
        })?;
    budget.check(u128::from(space))?;
    let mut kept: Vec<Vec<u8>> = Vec::new();
    let mut work = u128::from(space);
    let mut x = vec![0u8; n];
    for _ in 0..space {
        work += kept.len() as u128;
        budget.check(work)?;
        if kept.iter().all(|c| mismatches(c, &x) >= d_min) {
            kept.push(x.clone());
        }
        for d in x.iter_mut().rev() {
            if u32::from(*d) + 1 < q {
                *d += 1;
                break;
            }
            *d = 0;
        }
    }
    let words = kept
        .into_iter()
        .map(|w| RingString::from_raw(q, w))
        .collect();
    InnerCode::new(words, (d_min - 1) / 2)
}

/// The kept words of a coset code together with the channel parameters
/// needed to decode; this is what gets persisted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    pub q: u32,
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub words: Vec<RingString>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// `n - log_q(|kept|)`.
    pub fn redundancy(&self) -> f64 {
        crate::generator::redundancy(self.n, self.q, self.words.len() as u64)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("q={} n={} s={} t={}\n", self.q, self.n, self.s, self.t);
        for w in &self.words {
            out.push_str(&w.to_text());
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`Codebook::to_text`]. The words must be
    /// distinct, of length `n`, and pairwise at distance above `2t`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (lineno, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header"))?;
        let fields = parse_header_fields(header, lineno)?;
        let q: u32 = header_value(&fields, "q", lineno)?;
        let n: usize = header_value(&fields, "n", lineno)?;
        let s: usize = header_value(&fields, "s", lineno)?;
        let t: usize = header_value(&fields, "t", lineno)?;
        check_q(q).map_err(|e| Error::parse(lineno, e.to_string()))?;
        if s == 0 || s > n {
            return Err(Error::parse(lineno, format!("s={s} outside [1, {n}]")));
        }
        let mut words = Vec::new();
        for (lineno, line) in lines {
            let symbols =
                parse_symbols(q, line).map_err(|e| Error::parse(lineno, e.to_string()))?;
            if symbols.len() != n {
                return Err(Error::parse(
                    lineno,
                    format!("word length {} != {n}", symbols.len()),
                ));
            }
            words.push(RingString::from_raw(q, symbols));
        }
        if !words.is_empty() {
            InnerCode::new(words.clone(), t).map_err(|e| Error::parse(1, e.to_string()))?;
        }
        Ok(Codebook { q, n, s, t, words })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoisySubstringCode {
    pub inner: InnerCode,
    pub z: RingString,
    /// Inner codeword indices whose shifts are kept, in increasing order.
    pub kept: Vec<usize>,
    pub certifier: Certifier,
    codebook: Codebook,
}

impl NoisySubstringCode {
    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn s(&self) -> usize {
        self.codebook.s
    }
}

/// Chooses the coset offset with [`find_coset`] and keeps the certified
/// shifted codewords. The kept list may be empty.
pub fn build_code(
    inner: InnerCode,
    s: usize,
    strategy: CosetStrategy,
    certifier: Certifier,
    budget: WorkBudget,
) -> Result<NoisySubstringCode> {
    if s == 0 || s > inner.n {
        return Err(Error::arg(format!(
            "window length {s} outside [1, {}]",
            inner.n
        )));
    }
    let choice = find_coset(
        &inner.codewords,
        s,
        inner.t_capability,
        strategy,
        certifier,
        budget,
    )?;
    let words = choice
        .kept
        .iter()
        .map(|&i| choice.z.add(&inner.codewords[i]))
        .collect::<Result<Vec<_>>>()?;
    let codebook = Codebook {
        q: inner.q,
        n: inner.n,
        s,
        t: inner.t_capability,
        words,
    };
    Ok(NoisySubstringCode {
        z: choice.z,
        kept: choice.kept,
        certifier,
        codebook,
        inner,
    })
}

pub fn encode(code: &Codebook, msg: usize) -> Result<RingString> {
    code.words.get(msg).cloned().ok_or_else(|| {
        Error::arg(format!(
            "message {msg} out of range 0..{}",
            code.words.len()
        ))
    })
}

/// Assembles `z` and returns the index of the nearest kept word, provided it
/// lies within distance `t`; ties go to the smaller index.
pub fn decode(code: &Codebook, z: &KmerMultiset) -> Result<usize> {
    if z.k() != code.s + 1 {
        return Err(Error::arg(format!(
            "mer length {} does not match s + 1 = {}",
            z.k(),
            code.s + 1
        )));
    }
    let y = assemble(z).map_err(|e| Error::AssemblyFailed(Box::new(e)))?;
    let radius = code.t;
    if y.len() != code.n || y.q() != code.q {
        return Err(Error::NoCodewordInRange { radius });
    }
    code.words
        .iter()
        .enumerate()
        .map(|(i, w)| (mismatches(w.symbols(), y.symbols()), i))
        .min()
        .filter(|&(d, _)| d <= radius)
        .map(|(_, i)| i)
        .ok_or(Error::NoCodewordInRange { radius })
}
