//! Greedy forward assembly of a string from the multiset of its k-mers.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::strings::{render_symbols, KmerMultiset, RingString};

/// Rebuilds the string whose `k`-mer profile is `z`.
///
/// Succeeds, and returns the unique preimage, whenever `z` is the profile of
/// a `(k-1)`-repeat-free string. A repeated `(k-1)`-prefix, or more than one
/// start candidate, is reported as [`Error::Ambiguous`]; a profile that cannot
/// be chained end to end is [`Error::Inconsistent`]. On success the profile of
/// the output equals `z` exactly.
pub fn assemble(z: &KmerMultiset) -> Result<RingString> {
    let k = z.k();
    if k < 2 {
        return Err(Error::arg(format!(
            "mer length must be at least 2, got {k}"
        )));
    }
    let total = z.total();
    if total == 0 {
        return Err(Error::arg("empty multiset"));
    }
    let s = k - 1;

    let mut by_prefix: FxHashMap<&[u8], (&[u8], usize)> = FxHashMap::default();
    let mut suffixes: FxHashMap<&[u8], usize> = FxHashMap::default();
    by_prefix.reserve(z.distinct());
    suffixes.reserve(z.distinct());
    for (mer, count) in z.iter() {
        let prefix = &mer[..s];
        if count > 1 || by_prefix.insert(prefix, (mer, count)).is_some() {
            return Err(Error::Ambiguous(format!(
                "{s}-prefix {} starts more than one mer",
                render_symbols(z.q(), prefix)
            )));
        }
        *suffixes.entry(&mer[1..]).or_default() += count;
    }

    let mut starts = z.iter().filter(|(mer, _)| {
        let own = usize::from(mer[1..] == mer[..s]);
        suffixes.get(&mer[..s]).copied().unwrap_or(0) == own
    });
    let start = match (starts.next(), starts.next()) {
        (None, _) => return Err(Error::Inconsistent("no start mer".into())),
        (Some(_), Some(_)) => return Err(Error::Ambiguous("more than one start mer".into())),
        (Some((mer, _)), None) => mer,
    };

    let mut out = Vec::with_capacity(total + s);
    out.extend_from_slice(start);
    by_prefix.get_mut(&start[..s]).expect("start is indexed").1 -= 1;
    for _ in 1..total {
        let suffix = &out[out.len() - s..];
        let next = match by_prefix.get_mut(suffix) {
            Some((mer, left)) if *left > 0 => {
                *left -= 1;
                mer[s]
            }
            _ => {
                return Err(Error::Inconsistent(format!(
                    "chain stops after {} of {total} mers",
                    out.len() - s
                )))
            }
        };
        out.push(next);
    }
    Ok(RingString::from_raw(z.q(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::{is_repeat_free, z_profile};

    fn rs(q: u32, text: &str) -> RingString {
        RingString::parse(q, text).unwrap()
    }

    #[test]
    fn examples() {
        let x = rs(2, "0110");
        assert_eq!(assemble(&z_profile(&x, 3).unwrap()).unwrap(), x);
        for text in ["10", "2102", "000"] {
            let x = rs(3, text);
            let mut z = KmerMultiset::new(3, x.len()).unwrap();
            z.insert(&x, 1).unwrap();
            assert_eq!(assemble(&z).unwrap(), x);
        }
        let err = assemble(&z_profile(&rs(2, "0101"), 2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Ambiguous(_)), "{err}");
    }

    #[test]
    fn unchainable_profiles_fail() {
        let mut z = KmerMultiset::new(2, 2).unwrap();
        z.insert(&rs(2, "01"), 1).unwrap();
        z.insert(&rs(2, "10"), 1).unwrap();
        assert!(matches!(assemble(&z), Err(Error::Inconsistent(_))));

        let mut z = KmerMultiset::new(2, 3).unwrap();
        z.insert(&rs(2, "001"), 1).unwrap();
        z.insert(&rs(2, "110"), 1).unwrap();
        assert!(matches!(assemble(&z), Err(Error::Ambiguous(_))));

        let mut z = KmerMultiset::new(2, 3).unwrap();
        z.insert(&rs(2, "001"), 1).unwrap();
        z.insert(&rs(2, "100"), 1).unwrap();
        z.insert(&rs(2, "111"), 1).unwrap();
        assert!(assemble(&z).is_err());
    }

    #[test]
    fn argument_errors() {
        assert!(assemble(&KmerMultiset::new(2, 3).unwrap()).is_err());
        let mut z = KmerMultiset::new(2, 1).unwrap();
        z.insert(&rs(2, "1"), 1).unwrap();
        assert!(matches!(assemble(&z), Err(Error::Argument(_))));
    }

    #[test]
    fn exhaustive_small_round_trip() {
        for n in 2..=10 {
            for idx in 0..1u64 << n {
                let y = RingString::from_index(2, n, idx).unwrap();
                for s in 1..n {
                    let z = z_profile(&y, s + 1).unwrap();
                    match assemble(&z) {
                        Ok(out) => {
                            assert_eq!(z_profile(&out, s + 1).unwrap(), z);
                            if is_repeat_free(&y, s).unwrap() {
                                assert_eq!(out, y);
                            }
                        }
                        Err(e) => assert!(!is_repeat_free(&y, s).unwrap(), "{y} s={s}: {e}"),
                    }
                }
            }
        }
    }
}
