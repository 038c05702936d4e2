//! Newton polytopes of the chain-weight polynomials, described as
//! generalized permutahedra, together with exact lattice-point, SNP,
//! M-convexity and vertex computations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_rational::BigRational;
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lp;
use crate::perm::Permutation;
use crate::poly::{global_weight, ExponentVector, Segment, SparsePolynomial};

pub type LatticePointSet = BTreeSet<ExponentVector>;

/// Generalized permutahedra are stored densely over all subsets, so the
/// ambient dimension is capped.
pub const MAX_GP_VARS: usize = 20;

/// `A + B = {a + b}` for lattice point sets of equal dimension.
pub fn minkowski_sum(a: &LatticePointSet, b: &LatticePointSet) -> LatticePointSet {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.add(y)))
        .collect()
}

/// The unit vectors `{e_a, ..., e_{b-1}}`.
pub fn segment_points(s: Segment, nvars: usize) -> LatticePointSet {
    s.variables()
        .map(|i| ExponentVector::unit(nvars, i))
        .collect()
}

/// `Σ_{(a,b) ∈ Inv(w)} {e_a, ..., e_{b-1}}`, by iterated set sums.
pub fn minkowski_support(w: &Permutation) -> LatticePointSet {
    let nvars = w.rank() - 1;
    w.inversions().into_iter().fold(
        LatticePointSet::from([ExponentVector::zero(nvars)]),
        |acc, p| minkowski_sum(&acc, &segment_points(p.into(), nvars)),
    )
}

/// Rank function of the rank-one matroid whose bases are the singletons
/// `{a}, ..., {b-1}`: 1 if `set` meets `[a, b)`, else 0.
pub fn segment_rank(s: Segment, set: &BTreeSet<usize>) -> usize {
    usize::from(s.variables().any(|i| set.contains(&i)))
}

/// `{t : Σ_{i∈I} t_i ≥ z_I for I ≠ [k], Σ_i t_i = z_[k]}` with `z_∅ = 0`.
///
/// Subsets of `[k]` are bitmasks, bit `i-1` standing for variable `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedPermutahedron {
    nvars: usize,
    z: Vec<i64>,
}

fn mask_of(vars: impl IntoIterator<Item = usize>) -> usize {
    vars.into_iter().fold(0, |m, i| m | (1 << (i - 1)))
}

fn members(mask: usize, nvars: usize) -> Vec<usize> {
    (1..=nvars).filter(|i| mask & (1 << (i - 1)) != 0).collect()
}

fn subset_name(mask: usize, nvars: usize) -> String {
    format!("{{{}}}", members(mask, nvars).iter().join(","))
}

impl GeneralizedPermutahedron {
    fn empty(nvars: usize) -> Result<Self> {
        if nvars > MAX_GP_VARS {
            return Err(Error::TooLarge(format!(
                "{nvars} variables, at most {MAX_GP_VARS} supported"
            )));
        }
        Ok(Self {
            nvars,
            z: vec![0; 1 << nvars],
        })
    }

    /// Builds from an explicit table indexed by subset bitmask.
    pub fn from_table(nvars: usize, z: Vec<i64>) -> Result<Self> {
        let gp = Self::empty(nvars)?;
        if z.len() != gp.z.len() {
            return Err(Error::DimensionMismatch {
                expected: gp.z.len(),
                got: z.len(),
            });
        }
        if z[0] != 0 {
            return Err(Error::Malformed("z of the empty set must be 0".into()));
        }
        Ok(Self { nvars, z })
    }

    /// `z_I = 1` if `I ⊇ [a, b)`, else 0: the polytope of one segment.
    pub fn from_segment(s: Segment, nvars: usize) -> Result<Self> {
        Self::from_segments(std::iter::once(s), nvars)
    }

    pub fn from_segments(segs: impl IntoIterator<Item = Segment>, nvars: usize) -> Result<Self> {
        let mut gp = Self::empty(nvars)?;
        for s in segs {
            if s.b > nvars + 1 {
                return Err(Error::InvalidSegment {
                    a: s.a,
                    b: s.b,
                    nvars,
                });
            }
            let need = mask_of(s.variables());
            for (mask, z) in gp.z.iter_mut().enumerate() {
                if mask & need == need {
                    *z += 1;
                }
            }
        }
        Ok(gp)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    fn full(&self) -> usize {
        (1 << self.nvars) - 1
    }

    /// `z_I` for the subset given as 1-based variable indices.
    pub fn z(&self, subset: &BTreeSet<usize>) -> i64 {
        self.z[mask_of(subset.iter().copied())]
    }

    pub fn z_by_mask(&self, mask: usize) -> i64 {
        self.z[mask]
    }

    /// The total `z_[k]`, i.e. the common coordinate sum.
    pub fn total(&self) -> i64 {
        self.z[self.full()]
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(Self {
            nvars: self.nvars,
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn contains(&self, t: &ExponentVector) -> Result<bool> {
        if t.dim() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: t.dim(),
            });
        }
        let full = self.full();
        let mut sums = vec![0i64; full + 1];
        for mask in 1..=full {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)] + t.0[low] as i64;
            let ok = if mask == full {
                sums[mask] == self.z[mask]
            } else {
                sums[mask] >= self.z[mask]
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(full != 0 || self.z[0] == 0)
    }

    /// All nonnegative integer points of the polytope. Only vectors with
    /// coordinate sum `z_[k]` are generated before filtering.
    pub fn integer_points(&self) -> LatticePointSet {
        let total = self.total();
        if total < 0 {
            return LatticePointSet::new();
        }
        compositions(total as u32, self.nvars)
            .into_iter()
            .filter(|t| self.contains(t).expect("dimension matches"))
            .collect()
    }

    /// The inequality system, one constraint per line.
    pub fn inequalities(&self) -> Vec<String> {
        let mut masks: Vec<usize> = (1..=self.full()).collect();
        masks.sort_by_key(|&m| (m.count_ones(), members(m, self.nvars)));
        masks
            .into_iter()
            .map(|mask| {
                let lhs: Vec<String> = (1..=self.nvars)
                    .filter(|i| mask & (1 << (i - 1)) != 0)
                    .map(|i| format!("x{i}"))
                    .collect();
                let op = if mask == self.full() { "=" } else { ">=" };
                format!("{} {op} {}", lhs.join(" + "), self.z[mask])
            })
            .collect()
    }
}

impl fmt::Display for GeneralizedPermutahedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.inequalities() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// `{"nvars": k, "z": {"{}": 0, "{1}": .., "{1,2}": .., ...}}`, subsets
/// ordered by size and then by their sorted members.
impl Serialize for GeneralizedPermutahedron {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct ZMap<'a>(&'a GeneralizedPermutahedron);
        impl Serialize for ZMap<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let gp = self.0;
                let mut masks: Vec<usize> = (0..gp.z.len()).collect();
                masks.sort_by_key(|&m| (m.count_ones(), members(m, gp.nvars)));
                let mut map = s.serialize_map(Some(masks.len()))?;
                for m in masks {
                    map.serialize_entry(&subset_name(m, gp.nvars), &gp.z[m])?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("nvars", &self.nvars)?;
        map.serialize_entry("z", &ZMap(self))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for GeneralizedPermutahedron {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            nvars: usize,
            z: BTreeMap<String, i64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let mut gp = Self::empty(raw.nvars).map_err(D::Error::custom)?;
        if raw.z.len() != gp.z.len() {
            return Err(D::Error::custom(format!(
                "expected {} subsets, got {}",
                gp.z.len(),
                raw.z.len()
            )));
        }
        for (name, value) in raw.z {
            let inner = name
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| D::Error::custom(format!("bad subset {name:?}")))?;
            let mut mask = 0usize;
            for part in inner.split(',').filter(|p| !p.is_empty()) {
                let i: usize = part
                    .trim()
                    .parse()
                    .map_err(|_| D::Error::custom(format!("bad subset {name:?}")))?;
                if i == 0 || i > raw.nvars {
                    return Err(D::Error::custom(format!("index out of range in {name:?}")));
                }
                mask |= 1 << (i - 1);
            }
            gp.z[mask] = value;
        }
        Self::from_table(gp.nvars, gp.z).map_err(D::Error::custom)
    }
}

/// `z_I = #{(a,b) ∈ Inv(w) : I ⊇ [a, b)}` over subsets of `[n-1]`.
pub fn gp_from_inversions(w: &Permutation) -> Result<GeneralizedPermutahedron> {
    GeneralizedPermutahedron::from_segments(
        w.inversions().into_iter().map(Segment::from),
        w.rank() - 1,
    )
}

pub fn gp_contains(gp: &GeneralizedPermutahedron, t: &ExponentVector) -> Result<bool> {
    gp.contains(t)
}

pub fn gp_integer_points(gp: &GeneralizedPermutahedron) -> LatticePointSet {
    gp.integer_points()
}

/// All vectors of `parts` nonnegative integers summing to `total`.
fn compositions(total: u32, parts: usize) -> Vec<ExponentVector> {
    fn go(left: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
        if cur.len() + 1 == parts {
            cur.push(left);
            out.push(ExponentVector(cur.clone()));
            cur.pop();
            return;
        }
        for x in (0..=left).rev() {
            cur.push(x);
            go(left - x, parts, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(ExponentVector(Vec::new()));
        }
        return out;
    }
    go(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

fn check_uniform(points: &LatticePointSet) -> Result<usize> {
    let dim = points
        .first()
        .ok_or_else(|| Error::Degenerate("empty point set".into()))?
        .dim();
    if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.dim(),
        });
    }
    Ok(dim)
}

fn bounding_box(points: &LatticePointSet, dim: usize) -> (Vec<u32>, Vec<u32>) {
    let mut lo = vec![u32::MAX; dim];
    let mut hi = vec![0; dim];
    for p in points {
        for (i, &x) in p.0.iter().enumerate() {
            lo[i] = lo[i].min(x);
            hi[i] = hi[i].max(x);
        }
    }
    (lo, hi)
}

/// Exact test of `t ∈ conv(points)` for points in a common dimension.
fn in_hull(points: &[&ExponentVector], t: &ExponentVector) -> bool {
    if points.is_empty() {
        return false;
    }
    let rat = |x: u32| BigRational::from_integer(x.into());
    let dim = t.dim();
    let mut rows: Vec<Vec<BigRational>> = (0..dim)
        .map(|r| {
            points
                .iter()
                .map(|p| rat(p.0[r]))
                .chain(std::iter::once(rat(t.0[r])))
                .collect()
        })
        .collect();
    rows.push(vec![rat(1); points.len() + 1]);
    lp::feasible(rows)
}

/// Decides `t ∈ conv(points)` by exact rational linear feasibility.
pub fn hull_contains(points: &LatticePointSet, t: &ExponentVector) -> Result<bool> {
    let dim = check_uniform(points)?;
    if t.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: t.dim(),
        });
    }
    if points.contains(t) {
        return Ok(true);
    }
    let (lo, hi) = bounding_box(points, dim);
    if t.0.iter().enumerate().any(|(i, &x)| x < lo[i] || x > hi[i]) {
        return Ok(false);
    }
    let cols: Vec<&ExponentVector> = points.iter().collect();
    Ok(in_hull(&cols, t))
}

/// Points of the set that are not convex combinations of the others.
pub fn hull_vertices(points: &LatticePointSet) -> Result<LatticePointSet> {
    check_uniform(points)?;
    // Dropping a non-vertex never changes the hull, so later tests can run
    // against the shrinking remainder.
    let mut remaining = points.clone();
    for v in points {
        remaining.remove(v);
        let midpoint = remaining.iter().any(|p| {
            let mirrored: Option<Vec<u32>> =
                v.0.iter()
                    .zip(&p.0)
                    .map(|(&x, &y)| (2 * x).checked_sub(y))
                    .collect();
            mirrored.is_some_and(|m| remaining.contains(&ExponentVector(m)))
        });
        let cols: Vec<&ExponentVector> = remaining.iter().collect();
        if !(midpoint || in_hull(&cols, v)) {
            remaining.insert(v.clone());
        }
    }
    Ok(remaining)
}

/// Saturated Newton polytope: every integer point of `conv(supp f)` is in `supp f`.
pub fn is_snp(f: &SparsePolynomial) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::Degenerate(
            "the zero polynomial has no Newton polytope".into(),
        ));
    }
    let support = f.support();
    let dim = f.nvars();
    let vertices = hull_vertices(&support)?;
    let cols: Vec<&ExponentVector> = vertices.iter().collect();
    let degree = f.homogeneous_degree();
    let (lo, hi) = bounding_box(&support, dim);

    let mut cur = lo.clone();
    loop {
        let t = ExponentVector(cur.clone());
        let on_plane = degree.is_none_or(|d| t.degree() == d);
        if on_plane && !support.contains(&t) && in_hull(&cols, &t) {
            return Ok(false);
        }
        // odometer over the bounding box
        let mut i = 0;
        loop {
            if i == dim {
                return Ok(true);
            }
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
            i += 1;
        }
    }
}

/// Outcome of the exchange-axiom check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MConvexity {
    MConvex,
    Empty,
    /// Points of different coordinate sums.
    Inhomogeneous,
    /// No valid `j` exists for this `α`, `β` and `i` with `α_i > β_i`.
    ExchangeFails {
        alpha: ExponentVector,
        beta: ExponentVector,
        i: usize,
    },
}

impl MConvexity {
    pub fn holds(&self) -> bool {
        matches!(self, MConvexity::MConvex)
    }
}

impl fmt::Display for MConvexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MConvexity::MConvex => write!(f, "M-convex"),
            MConvexity::Empty => write!(f, "not M-convex: empty set"),
            MConvexity::Inhomogeneous => write!(f, "not M-convex: points of different degree"),
            MConvexity::ExchangeFails { alpha, beta, i } => write!(
                f,
                "not M-convex: exchange fails for alpha={alpha}, beta={beta}, i={i}"
            ),
        }
    }
}

/// Checks the symmetric exchange axiom: for all `α, β ∈ J` and `i` with
/// `α_i > β_i` there is `j` with `α_j < β_j`, `α - e_i + e_j ∈ J` and
/// `β - e_j + e_i ∈ J`.
pub fn m_convexity(set: &LatticePointSet) -> MConvexity {
    let Some(first) = set.first() else {
        return MConvexity::Empty;
    };
    if set
        .iter()
        .any(|p| p.dim() != first.dim() || p.degree() != first.degree())
    {
        return MConvexity::Inhomogeneous;
    }
    let dim = first.dim();
    let shift = |p: &ExponentVector, minus: usize, plus: usize| {
        let mut v = p.0.clone();
        v[minus] -= 1;
        v[plus] += 1;
        ExponentVector(v)
    };
    for alpha in set {
        for beta in set {
            for i in 0..dim {
                if alpha.0[i] <= beta.0[i] {
                    continue;
                }
                let exchanged = (0..dim).any(|j| {
                    alpha.0[j] < beta.0[j]
                        && set.contains(&shift(alpha, i, j))
                        && set.contains(&shift(beta, j, i))
                });
                if !exchanged {
                    return MConvexity::ExchangeFails {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        i: i + 1,
                    };
                }
            }
        }
    }
    MConvexity::MConvex
}

pub fn is_m_convex(set: &LatticePointSet) -> bool {
    m_convexity(set).holds()
}

/// Exponents of `GW(w)` with coefficient 1; these are the Newton polytope's vertices.
pub fn newton_vertices_coeff1(w: &Permutation) -> LatticePointSet {
    global_weight(w).coeff_one_exponents()
}

/// Vertices of `conv(supp GW(w))` through the exact hull oracle.
pub fn newton_vertices_hull(w: &Permutation) -> LatticePointSet {
    hull_vertices(&global_weight(w).support()).expect("GW(w) is nonzero")
}

/// Segments of `Inv(w)`, for callers that build polytopes piecewise.
pub fn inversion_segments(w: &Permutation) -> Vec<Segment> {
    w.inversions().into_iter().map(Segment::from).collect()
}
