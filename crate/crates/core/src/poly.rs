//! Sparse polynomials with exact rational coefficients, and the chain-weight
//! constructions built on them: segment forms, chain weights, global weights,
//! Postnikov-Stanley polynomials and dual Schubert polynomials.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bruhat::{enumerate_chains, interval_elements, SaturatedChain};
use crate::error::{Error, Result};
use crate::perm::{InversionPair, Permutation};

/// Exponents of `x_1, ..., x_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn zero(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    /// The unit vector `e_i` (1-based).
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut v = vec![0; nvars];
        v[i - 1] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.dim(), other.dim());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Graded reverse-lexicographic comparison.
    pub fn grevlex_cmp(&self, other: &ExponentVector) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0).rev() {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// A polynomial in `x_1, ..., x_nvars` with nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialJson", into = "PolynomialJson")]
pub struct SparsePolynomial {
    nvars: usize,
    terms: BTreeMap<ExponentVector, BigRational>,
}

impl SparsePolynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(ExponentVector::zero(nvars), BigRational::one())
    }

    pub fn monomial(exp: ExponentVector, coeff: BigRational) -> Self {
        let mut p = Self::zero(exp.dim());
        if !coeff.is_zero() {
            p.terms.insert(exp, coeff);
        }
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (exp, c) in terms {
            if exp.dim() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: exp.dim(),
                });
            }
            p.add_term(exp, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: ExponentVector, c: BigRational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &ExponentVector) -> BigRational {
        self.terms
            .get(exp)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigRational)> {
        self.terms.iter()
    }

    /// Terms in descending graded reverse-lexicographic order.
    pub fn terms_grevlex(&self) -> Vec<(&ExponentVector, &BigRational)> {
        let mut out: Vec<_> = self.terms.iter().collect();
        out.sort_by(|x, y| y.0.grevlex_cmp(x.0));
        out
    }

    pub fn support(&self) -> BTreeSet<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    /// Exponents whose coefficient is exactly 1.
    pub fn coeff_one_exponents(&self) -> BTreeSet<ExponentVector> {
        self.terms
            .iter()
            .filter(|(_, c)| c.is_one())
            .map(|(e, _)| e.clone())
            .collect()
    }

    /// The common degree of all terms, if there is one.
    pub fn homogeneous_degree(&self) -> Option<u64> {
        let mut degrees = self.terms.keys().map(ExponentVector::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn has_positive_coefficients(&self) -> bool {
        self.terms.values().all(Signed::is_positive)
    }

    pub fn scale(&self, c: &BigRational) -> SparsePolynomial {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    fn check_same_ring(&self, other: &SparsePolynomial) {
        assert_eq!(
            self.nvars, other.nvars,
            "polynomials over different numbers of variables"
        );
    }
}

impl Add for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn add(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        self.check_same_ring(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Mul for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn mul(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        self.check_same_ring(rhs);
        let mut acc: HashMap<ExponentVector, BigRational> = HashMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                *acc.entry(e1.add(e2)).or_insert_with(BigRational::zero) += c1 * c2;
            }
        }
        SparsePolynomial {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

impl fmt::Display for SparsePolynomial {
    /// Human-readable form such as `x1*x2 + 1/2*x2^2`, terms in descending grevlex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (exp, c)) in self.terms_grevlex().into_iter().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let c = c.abs();
            let vars: Vec<String> = exp
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| match e {
                    1 => format!("x{}", i + 1),
                    _ => format!("x{}^{}", i + 1, e),
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{c}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    num: String,
    den: String,
}

/// `{"nvars": k, "terms": [{"exp": [..], "num": "..", "den": ".."}, ...]}`
#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    nvars: usize,
    terms: Vec<TermJson>,
}

impl From<SparsePolynomial> for PolynomialJson {
    fn from(p: SparsePolynomial) -> Self {
        PolynomialJson {
            nvars: p.nvars,
            terms: p
                .terms_grevlex()
                .into_iter()
                .map(|(e, c)| TermJson {
                    exp: e.0.clone(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PolynomialJson> for SparsePolynomial {
    type Error = Error;

    fn try_from(j: PolynomialJson) -> Result<Self> {
        let mut p = SparsePolynomial::zero(j.nvars);
        for t in j.terms {
            let parse = |s: &str| {
                s.parse::<BigInt>()
                    .map_err(|_| Error::Malformed(format!("bad integer {s:?}")))
            };
            let (num, den) = (parse(&t.num)?, parse(&t.den)?);
            if den.is_zero() || num.is_zero() {
                return Err(Error::Malformed("zero numerator or denominator".into()));
            }
            let exp = ExponentVector(t.exp);
            if exp.dim() != j.nvars {
                return Err(Error::DimensionMismatch {
                    expected: j.nvars,
                    got: exp.dim(),
                });
            }
            if p.terms.contains_key(&exp) {
                return Err(Error::Malformed(format!("repeated exponent {exp}")));
            }
            p.terms.insert(exp, BigRational::new(num, den));
        }
        Ok(p)
    }
}

/// The interval `[a, b)` of variable indices, i.e. the form `x_a + ... + x_{b-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub a: usize,
    pub b: usize,
}

impl Segment {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || a >= b {
            return Err(Error::InvalidSegment { a, b, nvars: 0 });
        }
        Ok(Self { a, b })
    }

    /// The variable indices `a, a+1, ..., b-1`.
    pub fn variables(&self) -> std::ops::Range<usize> {
        self.a..self.b
    }
}

impl From<InversionPair> for Segment {
    fn from(p: InversionPair) -> Self {
        Segment { a: p.a, b: p.b }
    }
}

pub fn segment_poly(s: Segment, nvars: usize) -> Result<SparsePolynomial> {
    if s.a == 0 || s.a >= s.b || s.b > nvars + 1 {
        return Err(Error::InvalidSegment {
            a: s.a,
            b: s.b,
            nvars,
        });
    }
    Ok(SparsePolynomial {
        nvars,
        terms: s
            .variables()
            .map(|i| (ExponentVector::unit(nvars, i), BigRational::one()))
            .collect(),
    })
}

fn nvars_for(w: &Permutation) -> usize {
    w.rank() - 1
}

/// Product of segment forms over a list of labels in `S_n`.
fn product_of_segments(labels: &[InversionPair], nvars: usize) -> SparsePolynomial {
    labels.iter().fold(SparsePolynomial::one(nvars), |acc, &p| {
        let seg = segment_poly(p.into(), nvars).expect("labels of S_n fit in n-1 variables");
        &acc * &seg
    })
}

/// `m_C`, the product of the cover weights along the chain.
pub fn chain_weight(chain: &SaturatedChain) -> SparsePolynomial {
    product_of_segments(chain.labels(), chain.rank() - 1)
}

/// `GW(w)`, the product of segment forms over the inversions of `w`.
pub fn global_weight(w: &Permutation) -> SparsePolynomial {
    product_of_segments(&w.inversions(), nvars_for(w))
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn require_leq(u: &Permutation, w: &Permutation) -> Result<()> {
    if !u.bruhat_leq(w)? {
        return Err(Error::NotComparable {
            u: u.to_string(),
            w: w.to_string(),
        });
    }
    Ok(())
}

/// `D_u^w` by summing the weight of every saturated chain and dividing by
/// `(ℓ(w) - ℓ(u))!`. Exponential in the interval size; used as a reference.
pub fn postnikov_stanley_chainsum(u: &Permutation, w: &Permutation) -> Result<SparsePolynomial> {
    require_leq(u, w)?;
    let nvars = nvars_for(w);
    let mut sum = SparsePolynomial::zero(nvars);
    for chain in enumerate_chains(u, w)? {
        sum = &sum + &chain_weight(&chain);
    }
    let k = w.length() - u.length();
    Ok(sum.scale(&BigRational::new(BigInt::one(), factorial(k))))
}

/// `D_u^w` by dynamic programming over the interval:
/// `D_u^v = (1 / (ℓ(v) - ℓ(u))) Σ_{y ⋖ v, y ≥ u} D_u^y · m(y ⋖ v)`.
pub fn postnikov_stanley_dp(u: &Permutation, w: &Permutation) -> Result<SparsePolynomial> {
    require_leq(u, w)?;
    let elements = interval_elements(u, w)?;
    Ok(dp_table(u, &elements, nvars_for(w))
        .pop()
        .expect("interval contains w"))
}

/// `D_u^v` for every `v ≥ u` in one pass over the upper interval.
pub fn postnikov_stanley_upper(u: &Permutation) -> Result<BTreeMap<Permutation, SparsePolynomial>> {
    let top = Permutation::longest(u.rank())?;
    let elements = interval_elements(u, &top)?;
    let table = dp_table(u, &elements, nvars_for(u));
    Ok(elements.into_iter().zip(table).collect())
}

/// `elements` must be an interval starting at `u`, sorted by length.
fn dp_table(u: &Permutation, elements: &[Permutation], nvars: usize) -> Vec<SparsePolynomial> {
    let index: HashMap<&Permutation, usize> =
        elements.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let base = u.length();
    let mut segments: HashMap<InversionPair, SparsePolynomial> = HashMap::new();
    let mut table: Vec<SparsePolynomial> = Vec::with_capacity(elements.len());
    // elements are sorted by length, so every cocover is already filled in
    for v in elements {
        if v == u {
            table.push(SparsePolynomial::one(nvars));
            continue;
        }
        let mut sum = SparsePolynomial::zero(nvars);
        for (y, label) in v.down_covers() {
            let Some(&j) = index.get(&y) else { continue };
            let seg = segments
                .entry(label)
                .or_insert_with(|| segment_poly(label.into(), nvars).expect("label fits"));
            sum = &sum + &(&table[j] * seg);
        }
        let steps = BigInt::from(v.length() - base);
        table.push(sum.scale(&BigRational::new(BigInt::one(), steps)));
    }
    table
}

/// `D^w = D_id^w`.
pub fn dual_schubert(w: &Permutation) -> SparsePolynomial {
    let id = Permutation::identity(w.rank()).expect("rank of an existing permutation");
    postnikov_stanley_dp(&id, w).expect("id is below every permutation")
}
