//! Permutations in one-line notation and the strong Bruhat order on S_n.
//!
//! Positions and values are 1-based throughout the public interface.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest rank representable; values are stored as bytes.
pub const MAX_RANK: usize = u8::MAX as usize;

/// A permutation `w(1) w(2) ... w(n)` of `[n]`.
///
/// The derived ordering is lexicographic on the one-line word, which is
/// what every "first counterexample" report in this crate uses.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<u8>,
}

/// A position pair `(a, b)` with `a < b`. Used both for inversions and for
/// transposition labels on Bruhat covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InversionPair {
    pub a: usize,
    pub b: usize,
}

impl InversionPair {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || a >= b {
            return Err(Error::InvalidTransposition { a, b, n: b });
        }
        Ok(Self { a, b })
    }

    /// `[a, b] ⊆ [c, d]`
    pub fn nested_in(&self, other: &InversionPair) -> bool {
        other.a <= self.a && self.b <= other.b
    }
}

impl fmt::Display for InversionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl Serialize for InversionPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (self.a, self.b).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for InversionPair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (a, b) = <(usize, usize)>::deserialize(deserializer)?;
        InversionPair::new(a, b).map_err(serde::de::Error::custom)
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidRank(0));
        }
        if n > MAX_RANK {
            return Err(Error::TooLarge(format!("rank {n} exceeds {MAX_RANK}")));
        }
        Ok(Self {
            word: (1..=n as u8).collect(),
        })
    }

    /// The longest element `n (n-1) ... 1`.
    pub fn longest(n: usize) -> Result<Self> {
        let mut w = Self::identity(n)?;
        w.word.reverse();
        Ok(w)
    }

    /// Builds a permutation from its one-line word, checking it is a bijection on `[n]`.
    pub fn from_word<I>(word: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let word: Vec<usize> = word.into_iter().collect();
        let n = word.len();
        if n == 0 {
            return Err(Error::InvalidRank(0));
        }
        if n > MAX_RANK {
            return Err(Error::TooLarge(format!("rank {n} exceeds {MAX_RANK}")));
        }
        let mut seen = vec![false; n + 1];
        for &v in &word {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{word:?} is not a bijection on [1,{n}]"
                )));
            }
            seen[v] = true;
        }
        Ok(Self {
            word: word.into_iter().map(|v| v as u8).collect(),
        })
    }

    /// Every permutation of `[n]`, in lexicographic order.
    pub fn all(n: usize) -> Result<Vec<Permutation>> {
        let id = Self::identity(n)?;
        Ok(id
            .word
            .iter()
            .copied()
            .permutations(n)
            .map(|word| Permutation { word })
            .collect())
    }

    /// The rank `n`, i.e. `w ∈ S_n`.
    pub fn rank(&self) -> usize {
        self.word.len()
    }

    /// `w(pos)` for a 1-based position.
    pub fn at(&self, pos: usize) -> usize {
        self.word[pos - 1] as usize
    }

    pub fn word(&self) -> Vec<usize> {
        self.word.iter().map(|&v| v as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.word
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
    }

    /// Coxeter length, counted directly as the number of inversions.
    pub fn length(&self) -> usize {
        let w = &self.word;
        let mut count = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// All pairs `(a, b)`, `a < b`, with `w(a) > w(b)`, in lexicographic order.
    pub fn inversions(&self) -> Vec<InversionPair> {
        let w = &self.word;
        let mut out = Vec::new();
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    out.push(InversionPair { a: i + 1, b: j + 1 });
                }
            }
        }
        out
    }

    pub fn has_inversion(&self, a: usize, b: usize) -> bool {
        a < b && b <= self.rank() && self.word[a - 1] > self.word[b - 1]
    }

    /// `w · t_ab`: swap the entries in positions `a` and `b`.
    pub fn apply_t(&self, a: usize, b: usize) -> Result<Permutation> {
        let n = self.rank();
        if a == 0 || a >= b || b > n {
            return Err(Error::InvalidTransposition { a, b, n });
        }
        let mut word = self.word.clone();
        word.swap(a - 1, b - 1);
        Ok(Permutation { word })
    }

    /// Whether `w · t_ab` covers `w`, i.e. raises the length by exactly one.
    ///
    /// That happens iff `w(a) < w(b)` and no position strictly between
    /// holds a value strictly between them.
    pub fn is_up_cover_step(&self, a: usize, b: usize) -> bool {
        let (lo, hi) = (self.word[a - 1], self.word[b - 1]);
        lo < hi && !self.word[a..b - 1].iter().any(|&v| lo < v && v < hi)
    }

    /// Whether `w · t_ab` is covered by `w`.
    pub fn is_down_cover_step(&self, a: usize, b: usize) -> bool {
        let (hi, lo) = (self.word[a - 1], self.word[b - 1]);
        lo < hi && !self.word[a..b - 1].iter().any(|&v| lo < v && v < hi)
    }

    fn swapped(&self, a: usize, b: usize) -> Permutation {
        let mut word = self.word.clone();
        word.swap(a - 1, b - 1);
        Permutation { word }
    }

    /// Elements covering `w`, with their transposition labels, in lexicographic label order.
    pub fn up_covers(&self) -> Vec<(Permutation, InversionPair)> {
        let n = self.rank();
        let mut out = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                if self.is_up_cover_step(a, b) {
                    out.push((self.swapped(a, b), InversionPair { a, b }));
                }
            }
        }
        out
    }

    /// Elements covered by `w`, with their transposition labels, in lexicographic label order.
    pub fn down_covers(&self) -> Vec<(Permutation, InversionPair)> {
        let n = self.rank();
        let mut out = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                if self.is_down_cover_step(a, b) {
                    out.push((self.swapped(a, b), InversionPair { a, b }));
                }
            }
        }
        out
    }

    /// Strong Bruhat comparison `self ≤ other`.
    ///
    /// Uses the rank-matrix form of the tableau criterion: for every prefix
    /// length `i` and threshold `j`, `self` has no more entries `≥ j` among its
    /// first `i` values than `other` does.
    pub fn bruhat_leq(&self, other: &Permutation) -> Result<bool> {
        let n = self.rank();
        if n != other.rank() {
            return Err(Error::RankMismatch {
                left: n,
                right: other.rank(),
            });
        }
        Ok(self.bruhat_leq_unchecked(other))
    }

    pub(crate) fn bruhat_leq_unchecked(&self, other: &Permutation) -> bool {
        let n = self.rank();
        // counts[j] = #{k <= i : value(k) >= j}
        let mut mine = vec![0usize; n + 2];
        let mut theirs = vec![0usize; n + 2];
        for i in 0..n {
            for j in 1..=self.word[i] as usize {
                mine[j] += 1;
            }
            for j in 1..=other.word[i] as usize {
                theirs[j] += 1;
            }
            if (1..=n).any(|j| mine[j] > theirs[j]) {
                return false;
            }
        }
        true
    }

    /// Whether some subsequence of `self` is order-isomorphic to `pattern`.
    pub fn contains_pattern(&self, pattern: &Permutation) -> Result<bool> {
        if pattern.rank() > self.rank() {
            return Err(Error::PatternTooLong {
                pattern: pattern.rank(),
                word: self.rank(),
            });
        }
        let mut chosen = Vec::with_capacity(pattern.rank());
        Ok(embed(&self.word, &pattern.word, 0, &mut chosen))
    }
}

/// Backtracking embedding: `chosen[k]` is the value of `word` matched to `pattern[k]`.
fn embed(word: &[u8], pattern: &[u8], start: usize, chosen: &mut Vec<u8>) -> bool {
    let k = chosen.len();
    if k == pattern.len() {
        return true;
    }
    if word.len() - start < pattern.len() - k {
        return false;
    }
    for pos in start..word.len() {
        let v = word[pos];
        let consistent = chosen
            .iter()
            .zip(pattern)
            .all(|(&c, &p)| (c < v) == (p < pattern[k]));
        if consistent {
            chosen.push(v);
            if embed(word, pattern, pos + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() <= 9 {
            for v in &self.word {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            write!(f, "[{}]", self.word.iter().join(","))
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts the compact form `4213` (ranks up to 9) and the comma form
    /// `[4,2,1,3]`, with or without brackets.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidPermutation(format!("cannot parse {s:?}"));
        let inner = match (s.strip_prefix('['), s.ends_with(']')) {
            (Some(rest), true) => Some(&rest[..rest.len() - 1]),
            (None, false) => None,
            _ => return Err(bad()),
        };
        let word: Vec<usize> = match inner {
            Some(body) => body
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?,
            None if s.contains(',') => s
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?,
            None => s
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?,
        };
        if word.is_empty() {
            return Err(bad());
        }
        Permutation::from_word(word)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, VecDeque};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn pairs(list: &[(usize, usize)]) -> Vec<InversionPair> {
        list.iter().map(|&(a, b)| InversionPair { a, b }).collect()
    }

    #[test]
    fn identity_basics() {
        assert_eq!(Permutation::identity(3).unwrap(), p("123"));
        assert_eq!(Permutation::identity(6).unwrap().length(), 0);
        assert!(Permutation::identity(4).unwrap().inversions().is_empty());
        assert_eq!(Permutation::identity(0), Err(Error::InvalidRank(0)));
    }

    #[test]
    fn inversions_of_fixture_permutations() {
        assert_eq!(
            p("4213").inversions(),
            pairs(&[(1, 2), (1, 3), (1, 4), (2, 3)])
        );
        assert_eq!(
            p("253641").inversions(),
            pairs(&[
                (1, 6),
                (2, 3),
                (2, 5),
                (2, 6),
                (3, 6),
                (4, 5),
                (4, 6),
                (5, 6)
            ])
        );
        assert!(p("123").inversions().is_empty());
    }

    #[test]
    fn transpositions() {
        assert_eq!(p("123").apply_t(1, 2).unwrap(), p("213"));
        assert_eq!(p("132").apply_t(1, 3).unwrap(), p("231"));
        assert!(p("123").apply_t(2, 2).is_err());
        assert!(p("123").apply_t(2, 4).is_err());
        assert!(p("123").apply_t(0, 1).is_err());
    }

    #[test]
    fn covers_in_s3() {
        let up: Vec<_> = p("123").up_covers();
        assert_eq!(
            up,
            vec![
                (p("213"), InversionPair { a: 1, b: 2 }),
                (p("132"), InversionPair { a: 2, b: 3 })
            ]
        );
        assert!(p("321").up_covers().is_empty());
        assert_eq!(
            p("321").down_covers(),
            vec![
                (p("231"), InversionPair { a: 1, b: 2 }),
                (p("312"), InversionPair { a: 2, b: 3 })
            ]
        );
    }

    #[test]
    fn bruhat_examples() {
        assert!(p("213").bruhat_leq(&p("321")).unwrap());
        assert!(!p("321").bruhat_leq(&p("213")).unwrap());
        assert!(p("4213").bruhat_leq(&p("4213")).unwrap());
        assert!(matches!(
            p("12").bruhat_leq(&p("123")),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn pattern_examples() {
        let pat = p("1324");
        assert!(!p("4213").contains_pattern(&pat).unwrap());
        assert!(p("1324").contains_pattern(&pat).unwrap());
        assert!(p("25314").contains_pattern(&p("1")).unwrap());
        assert!(p("21435").contains_pattern(&pat).unwrap());
        assert!(!p("12345").contains_pattern(&p("21")).unwrap());
        assert!(p("123").contains_pattern(&pat).is_err());
    }

    #[test]
    fn pattern_matches_brute_force_on_s5() {
        for pat in Permutation::all(3).unwrap() {
            for w in Permutation::all(5).unwrap() {
                let brute = w.word.iter().copied().combinations(3).any(|sub| {
                    (0..3).all(|i| (0..3).all(|j| (sub[i] < sub[j]) == (pat.word[i] < pat.word[j])))
                });
                assert_eq!(w.contains_pattern(&pat).unwrap(), brute, "{w} vs {pat}");
            }
        }
    }

    #[test]
    fn length_equals_inversion_count() {
        for n in 1..=5 {
            for w in Permutation::all(n).unwrap() {
                assert_eq!(w.length(), w.inversions().len());
            }
        }
    }

    #[test]
    fn covers_are_converse() {
        for w in Permutation::all(4).unwrap() {
            for (v, label) in w.up_covers() {
                assert_eq!(v.length(), w.length() + 1);
                assert!(v.down_covers().contains(&(w.clone(), label)));
            }
            for (v, label) in w.down_covers() {
                assert!(v.up_covers().contains(&(w.clone(), label)));
            }
        }
    }

    /// Reachability over the cover digraph is the definition of the order.
    #[test]
    fn bruhat_matches_cover_closure_on_s4() {
        let all = Permutation::all(4).unwrap();
        for u in &all {
            let mut reach = BTreeSet::from([u.clone()]);
            let mut queue = VecDeque::from([u.clone()]);
            while let Some(v) = queue.pop_front() {
                for (x, _) in v.up_covers() {
                    if reach.insert(x.clone()) {
                        queue.push_back(x);
                    }
                }
            }
            for w in &all {
                assert_eq!(u.bruhat_leq(w).unwrap(), reach.contains(w), "{u} <= {w}");
            }
        }
    }

    #[test]
    fn bruhat_on_covers_matches_length_test() {
        let all = Permutation::all(4).unwrap();
        for u in &all {
            for a in 1..=4 {
                for b in a + 1..=4 {
                    let v = u.apply_t(a, b).unwrap();
                    let covers = v.length() == u.length() + 1;
                    assert_eq!(u.is_up_cover_step(a, b), covers);
                    if covers {
                        assert!(u.bruhat_leq(&v).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(p("[4,2,1,3]"), p("4213"));
        assert_eq!(p("4,2,1,3"), p("4213"));
        assert_eq!(p("4213").to_string(), "4213");
        let big = Permutation::longest(10).unwrap();
        assert_eq!(big.to_string(), "[10,9,8,7,6,5,4,3,2,1]");
        assert_eq!(big.to_string().parse::<Permutation>().unwrap(), big);
        for bad in ["", "[]", "1223", "0", "124", "[1,2", "12a", "[1,,2]"] {
            assert!(bad.parse::<Permutation>().is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn json_is_the_display_string() {
        let w = p("4213");
        assert_eq!(serde_json::to_string(&w).unwrap(), "\"4213\"");
        let back: Permutation = serde_json::from_str("\"[4,2,1,3]\"").unwrap();
        assert_eq!(back, w);
    }

    proptest::proptest! {
        #[test]
        fn apply_t_is_an_involution(seed in 0usize..720, a in 1usize..=6, d in 1usize..6) {
            let all = Permutation::all(6).unwrap();
            let w = &all[seed];
            let b = a + d;
            proptest::prop_assume!(b <= 6);
            let once = w.apply_t(a, b).unwrap();
            proptest::prop_assert_eq!(&once.apply_t(a, b).unwrap(), w);
            proptest::prop_assert_eq!(once.length().abs_diff(w.length()) % 2, 1);
        }
    }
}
