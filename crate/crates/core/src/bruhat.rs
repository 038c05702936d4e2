//! Bruhat intervals, saturated chains, greedy chains and generating multisets.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{InversionPair, Permutation};

/// A sequence of Bruhat covers `u_0 ⋖ u_1 ⋖ ... ⋖ u_ℓ` with the
/// transposition `(a_i, b_i)` realizing each step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ChainJson", into = "ChainJson")]
pub struct SaturatedChain {
    nodes: Vec<Permutation>,
    labels: Vec<InversionPair>,
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    nodes: Vec<Permutation>,
    labels: Vec<InversionPair>,
}

impl From<SaturatedChain> for ChainJson {
    fn from(c: SaturatedChain) -> Self {
        ChainJson {
            nodes: c.nodes,
            labels: c.labels,
        }
    }
}

impl TryFrom<ChainJson> for SaturatedChain {
    type Error = Error;

    fn try_from(j: ChainJson) -> Result<Self> {
        SaturatedChain::from_parts(j.nodes, j.labels)
    }
}

impl SaturatedChain {
    /// The length-zero chain at `w`.
    pub fn trivial(w: Permutation) -> Self {
        Self {
            nodes: vec![w],
            labels: Vec::new(),
        }
    }

    /// Builds a chain from its nodes, reading off the labels.
    pub fn from_nodes(nodes: Vec<Permutation>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidChain("no nodes".into()));
        }
        let mut labels = Vec::with_capacity(nodes.len() - 1);
        for step in nodes.windows(2) {
            let (x, y) = (&step[0], &step[1]);
            if x.rank() != y.rank() {
                return Err(Error::RankMismatch {
                    left: x.rank(),
                    right: y.rank(),
                });
            }
            let diff: Vec<usize> = (1..=x.rank()).filter(|&i| x.at(i) != y.at(i)).collect();
            let [a, b] = diff[..] else {
                return Err(Error::InvalidChain(format!(
                    "{x} -> {y} is not a transposition"
                )));
            };
            if !x.is_up_cover_step(a, b) {
                return Err(Error::InvalidChain(format!("{x} -> {y} is not a cover")));
            }
            labels.push(InversionPair { a, b });
        }
        Ok(Self { nodes, labels })
    }

    /// Builds a chain from nodes and labels, checking that they agree.
    pub fn from_parts(nodes: Vec<Permutation>, labels: Vec<InversionPair>) -> Result<Self> {
        let chain = Self::from_nodes(nodes)?;
        if chain.labels != labels {
            return Err(Error::InvalidChain(
                "labels do not match the transpositions between nodes".into(),
            ));
        }
        Ok(chain)
    }

    pub fn nodes(&self) -> &[Permutation] {
        &self.nodes
    }

    pub fn labels(&self) -> &[InversionPair] {
        &self.labels
    }

    pub fn start(&self) -> &Permutation {
        &self.nodes[0]
    }

    pub fn end(&self) -> &Permutation {
        self.nodes.last().unwrap()
    }

    /// Number of cover steps.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.nodes[0].rank()
    }

    fn spans(&self, u: &Permutation, w: &Permutation) -> Result<()> {
        if self.start() != u || self.end() != w {
            return Err(Error::InvalidChain(format!(
                "chain runs from {} to {}, expected {u} to {w}",
                self.start(),
                self.end()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SaturatedChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.nodes[0])?;
        for (node, label) in self.nodes[1..].iter().zip(&self.labels) {
            write!(f, " <{label} {node}")?;
        }
        Ok(())
    }
}

fn check_ranks(u: &Permutation, w: &Permutation) -> Result<()> {
    if u.rank() != w.rank() {
        return Err(Error::RankMismatch {
            left: u.rank(),
            right: w.rank(),
        });
    }
    Ok(())
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

/// All `v` with `u ≤ v ≤ w`, sorted by length and then lexicographically.
///
/// An incomparable pair gives an empty list; `[w, w]` gives `[w]`.
pub fn interval_elements(u: &Permutation, w: &Permutation) -> Result<Vec<Permutation>> {
    check_ranks(u, w)?;
    if !u.bruhat_leq_unchecked(w) {
        return Ok(Vec::new());
    }
    let mut seen = BTreeSet::from([u.clone()]);
    let mut queue = VecDeque::from([u.clone()]);
    while let Some(v) = queue.pop_front() {
        for (x, _) in v.up_covers() {
            if !seen.contains(&x) && x.bruhat_leq_unchecked(w) {
                seen.insert(x.clone());
                queue.push_back(x);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort_by_cached_key(|v| (v.length(), v.clone()));
    Ok(out)
}

/// Depth-first stream of every saturated chain from `u` to `w`.
///
/// Covers are expanded in lexicographic label order and only while they stay
/// below `w`; every such branch reaches `w` since intervals are graded.
pub struct Chains {
    target: Permutation,
    nodes: Vec<Permutation>,
    labels: Vec<InversionPair>,
    frames: Vec<(Vec<(Permutation, InversionPair)>, usize)>,
    fresh: bool,
}

impl Chains {
    fn candidates(&self, v: &Permutation) -> Vec<(Permutation, InversionPair)> {
        v.up_covers()
            .into_iter()
            .filter(|(x, _)| x.bruhat_leq_unchecked(&self.target))
            .collect()
    }

    fn pop_node(&mut self) {
        self.nodes.pop();
        self.labels.pop();
    }
}

impl Iterator for Chains {
    type Item = SaturatedChain;

    fn next(&mut self) -> Option<SaturatedChain> {
        loop {
            if self.fresh {
                self.fresh = false;
                let top = self.nodes.last()?;
                if *top == self.target {
                    let chain = SaturatedChain {
                        nodes: self.nodes.clone(),
                        labels: self.labels.clone(),
                    };
                    self.pop_node();
                    return Some(chain);
                }
                let cands = self.candidates(top);
                self.frames.push((cands, 0));
            }
            let (cands, idx) = self.frames.last_mut()?;
            if *idx < cands.len() {
                let (x, label) = cands[*idx].clone();
                *idx += 1;
                self.nodes.push(x);
                self.labels.push(label);
                self.fresh = true;
            } else {
                self.frames.pop();
                self.pop_node();
            }
        }
    }
}

/// Streams the saturated chains from `u` to `w`. Empty when `u ≰ w`.
pub fn enumerate_chains(u: &Permutation, w: &Permutation) -> Result<Chains> {
    check_ranks(u, w)?;
    let comparable = u.bruhat_leq_unchecked(w);
    Ok(Chains {
        target: w.clone(),
        nodes: if comparable {
            vec![u.clone()]
        } else {
            Vec::new()
        },
        labels: Vec::new(),
        frames: Vec::new(),
        fresh: comparable,
    })
}

/// Cocover labels of `x` that stay inside `[u, ·]`.
fn admissible_cocovers(x: &Permutation, u: &Permutation) -> Vec<(Permutation, InversionPair)> {
    x.down_covers()
        .into_iter()
        .filter(|(y, _)| u.bruhat_leq_unchecked(y))
        .collect()
}

/// `label` can be widened to `(a, b')`, `b' > b`, or `(a', b)`, `a' < a`.
fn widenable(label: &InversionPair, options: &[(Permutation, InversionPair)]) -> bool {
    options.iter().any(|(_, other)| {
        (other.a == label.a && other.b > label.b) || (other.b == label.b && other.a < label.a)
    })
}

/// Builds a greedy chain from the top down. At each node the step taken is
/// the lexicographically smallest label among those that cannot be widened.
pub fn greedy_chain(u: &Permutation, w: &Permutation) -> Result<SaturatedChain> {
    check_ranks(u, w)?;
    require_leq(u, w)?;
    let mut nodes = vec![w.clone()];
    let mut labels = Vec::new();
    let mut x = w.clone();
    while x != *u {
        let options = admissible_cocovers(&x, u);
        let (y, label) = options
            .iter()
            .filter(|(_, label)| !widenable(label, &options))
            .min_by_key(|(_, label)| *label)
            .cloned()
            .expect("the longest admissible label is never widenable");
        nodes.push(y.clone());
        labels.push(label);
        x = y;
    }
    nodes.reverse();
    labels.reverse();
    Ok(SaturatedChain { nodes, labels })
}

/// Checks the greedy condition at every step of a chain from `u` to `w`.
pub fn is_greedy(chain: &SaturatedChain, u: &Permutation, w: &Permutation) -> Result<bool> {
    check_ranks(u, w)?;
    chain.spans(u, w)?;
    Ok(chain
        .nodes
        .iter()
        .skip(1)
        .zip(&chain.labels)
        .all(|(x, label)| !widenable(label, &admissible_cocovers(x, u))))
}

/// The multiset of transposition labels of a chain, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GeneratingMultiset(Vec<InversionPair>);

impl GeneratingMultiset {
    pub fn new(mut pairs: Vec<InversionPair>) -> Self {
        pairs.sort();
        Self(pairs)
    }

    pub fn pairs(&self) -> &[InversionPair] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn generating_multiset(chain: &SaturatedChain) -> GeneratingMultiset {
    GeneratingMultiset::new(chain.labels.clone())
}

/// `G ⪯_ℓ H`: some perfect pairing sends each `(a,b) ∈ G` to a distinct
/// `(c,d) ∈ H` with `[a,b] ⊆ [c,d]`. Decided by augmenting-path matching.
pub fn multiset_dominates(g: &GeneratingMultiset, h: &GeneratingMultiset) -> Result<bool> {
    if g.len() != h.len() {
        return Err(Error::CardinalityMismatch(g.len(), h.len()));
    }
    let adj: Vec<Vec<usize>> =
        g.0.iter()
            .map(|p| (0..h.len()).filter(|&j| p.nested_in(&h.0[j])).collect())
            .collect();
    let mut owner: Vec<Option<usize>> = vec![None; h.len()];
    for i in 0..g.len() {
        let mut visited = vec![false; h.len()];
        if !augment(i, &adj, &mut owner, &mut visited) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn augment(
    i: usize,
    adj: &[Vec<usize>],
    owner: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &j in &adj[i] {
        if visited[j] {
            continue;
        }
        visited[j] = true;
        if owner[j].is_none_or(|k| augment(k, adj, owner, visited)) {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}
