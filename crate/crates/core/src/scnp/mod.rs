//! Single-chain Newton polytope checks and the exhaustive conjecture sweeps.
//!
//! `D_u^w` has SCNP when one saturated chain `C` of `[u, w]` already has
//! `supp(m_C) = supp(D_u^w)`; such a chain is called dominant.

mod harness;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bruhat::{interval_elements, SaturatedChain};
use crate::error::{Error, Result};
use crate::perm::{InversionPair, Permutation};
use crate::poly::ExponentVector;
use crate::polytope::LatticePointSet;

pub use harness::{
    verify, verify_paper_theorems, verify_ps_mconvex, verify_scnp_pattern, Checkpoint,
    ConjectureReport, Counterexample, Progress, VerifyMode, VerifyOptions,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScnpVerdict {
    pub holds: bool,
    /// A dominant chain, present exactly when `holds`.
    pub witness: Option<SaturatedChain>,
    /// Complete chains reached by the search before it stopped.
    pub chains_examined: u64,
}

/// Decides SCNP for `D_u^w`, returning the first dominant chain found.
pub fn is_scnp(u: &Permutation, w: &Permutation) -> Result<ScnpVerdict> {
    let elements = interval_elements(u, w)?;
    if elements.is_empty() {
        return Err(Error::NotComparable {
            u: u.to_string(),
            w: w.to_string(),
        });
    }
    IntervalSupports::from_elements(w, elements)?.search(u)
}

/// Exponent vectors packed into 8-bit lanes, so that vector addition is
/// integer addition. Coordinates never exceed `ℓ(w) < 256`.
type Packed = u64;

const LANE: u32 = 8;

/// Packing needs one lane per variable.
pub const MAX_SCNP_RANK: usize = 9;

#[cfg(test)]
fn pack(e: &ExponentVector) -> Packed {
    e.0.iter()
        .enumerate()
        .map(|(i, &x)| (x as Packed) << (LANE * i as u32))
        .sum()
}

fn unpack(p: Packed, nvars: usize) -> ExponentVector {
    ExponentVector(
        (0..nvars)
            .map(|i| ((p >> (LANE * i as u32)) & 0xff) as u32)
            .collect(),
    )
}

/// Sorted, deduplicated packed points.
type Points = Vec<Packed>;

fn sum(a: &[Packed], b: &[Packed]) -> Points {
    let mut out: Points = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x + y));
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn segment(label: InversionPair) -> Points {
    (label.a..label.b)
        .map(|i| 1 << (LANE * (i as u32 - 1)))
        .collect()
}

/// `supp(D_v^w)` for every `v` of an interval below a fixed `w`.
///
/// All coefficients of `D_v^w` are positive, so its support is the union,
/// over covers `v ⋖ y`, of `supp(m(v ⋖ y)) + supp(D_y^w)`.
pub struct IntervalSupports {
    top: Permutation,
    nvars: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    ups: Vec<Vec<(usize, InversionPair)>>,
    supports: Vec<Points>,
}

impl IntervalSupports {
    /// The table for `[id, w]`, which serves every `u ≤ w`.
    pub fn below(w: &Permutation) -> Result<Self> {
        let id = Permutation::identity(w.rank())?;
        Self::from_elements(w, interval_elements(&id, w)?)
    }

    /// `elements` must be a down-closed part of `[·, w]` sorted by length.
    fn from_elements(w: &Permutation, elements: Vec<Permutation>) -> Result<Self> {
        if w.rank() > MAX_SCNP_RANK {
            return Err(Error::TooLarge(format!(
                "SCNP search supports rank at most {MAX_SCNP_RANK}"
            )));
        }
        let index: HashMap<Permutation, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let ups: Vec<Vec<(usize, InversionPair)>> = elements
            .iter()
            .map(|v| {
                v.up_covers()
                    .into_iter()
                    .filter_map(|(x, label)| index.get(&x).map(|&j| (j, label)))
                    .collect()
            })
            .collect();
        let mut supports: Vec<Points> = vec![Vec::new(); elements.len()];
        for i in (0..elements.len()).rev() {
            if ups[i].is_empty() {
                supports[i] = vec![0];
                continue;
            }
            let mut acc: Points = Vec::new();
            for &(j, label) in &ups[i] {
                acc.extend(sum(&segment(label), &supports[j]));
            }
            acc.sort_unstable();
            acc.dedup();
            supports[i] = acc;
        }
        Ok(Self {
            top: w.clone(),
            nvars: w.rank() - 1,
            elements,
            index,
            ups,
            supports,
        })
    }

    pub fn top(&self) -> &Permutation {
        &self.top
    }

    /// Elements of the interval, sorted by length.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    /// `supp(D_v^w)`, or `None` when `v` is not in the interval.
    pub fn support(&self, v: &Permutation) -> Option<LatticePointSet> {
        let i = *self.index.get(v)?;
        Some(
            self.supports[i]
                .iter()
                .map(|&p| unpack(p, self.nvars))
                .collect(),
        )
    }

    /// SCNP search for `D_u^w`.
    ///
    /// Every chain weight's support lies inside `supp(D_u^w)`, so a chain is
    /// dominant as soon as its support has the target's size. A partial
    /// chain ending at `v` with support `S` is abandoned when
    /// `S + supp(D_v^w)` is already too small. Covers that grow the support
    /// most are tried first, and states are deduplicated on
    /// `(node, support so far)`.
    pub fn search(&self, u: &Permutation) -> Result<ScnpVerdict> {
        let Some(&start) = self.index.get(u) else {
            return Err(Error::NotComparable {
                u: u.to_string(),
                w: self.top.to_string(),
            });
        };
        let target = self.supports[start].len();
        let top = self.index[&self.top];
        let mut seen: HashSet<(usize, Points)> = HashSet::new();
        let mut chains_examined = 0u64;

        let expand = |node: usize, support: &Points| {
            let mut children: Vec<(usize, InversionPair, Points)> = self.ups[node]
                .iter()
                .map(|&(j, label)| (j, label, sum(support, &segment(label))))
                .filter(|(j, _, s)| sum(s, &self.supports[*j]).len() == target)
                .collect();
            children.sort_by(|x, y| y.2.len().cmp(&x.2.len()).then(x.1.cmp(&y.1)));
            children
        };

        struct Frame {
            node: usize,
            support: Points,
            children: Vec<(usize, InversionPair, Points)>,
            next: usize,
        }
        let origin: Points = vec![0];
        let mut stack = vec![Frame {
            node: start,
            children: expand(start, &origin),
            support: origin,
            next: 0,
        }];
        let mut labels: Vec<InversionPair> = Vec::new();

        while let Some(frame) = stack.last_mut() {
            if frame.node == top {
                chains_examined += 1;
                if frame.support.len() == target {
                    let nodes = stack
                        .iter()
                        .map(|f| self.elements[f.node].clone())
                        .collect();
                    let witness = SaturatedChain::from_parts(nodes, labels)?;
                    return Ok(ScnpVerdict {
                        holds: true,
                        witness: Some(witness),
                        chains_examined,
                    });
                }
                stack.pop();
                labels.pop();
                continue;
            }
            if frame.next == frame.children.len() {
                stack.pop();
                labels.pop();
                continue;
            }
            let (j, label, support) = frame.children[frame.next].clone();
            frame.next += 1;
            if !seen.insert((j, support.clone())) {
                continue;
            }
            labels.push(label);
            let children = if j == top {
                Vec::new()
            } else {
                expand(j, &support)
            };
            stack.push(Frame {
                node: j,
                support,
                children,
                next: 0,
            });
        }
        Ok(ScnpVerdict {
            holds: false,
            witness: None,
            chains_examined,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bruhat::{enumerate_chains, greedy_chain};
    use crate::poly::{chain_weight, dual_schubert, postnikov_stanley_dp, postnikov_stanley_upper};
    use crate::polytope::is_snp;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn comparable_pairs(n: usize) -> Vec<(Permutation, Permutation)> {
        let all = Permutation::all(n).unwrap();
        let mut out = Vec::new();
        for u in &all {
            for w in &all {
                if u.bruhat_leq(w).unwrap() {
                    out.push((u.clone(), w.clone()));
                }
            }
        }
        out
    }

    #[test]
    fn small_interval_witness() {
        let v = is_scnp(&p("213"), &p("321")).unwrap();
        assert!(v.holds);
        assert_eq!(v.witness.unwrap().to_string(), "213 <(1,3) 312 <(2,3) 321");
        assert_eq!(v.chains_examined, 1);
    }

    #[test]
    fn minimal_failure() {
        let (u, w) = (p("1324"), p("4231"));
        let v = is_scnp(&u, &w).unwrap();
        assert!(!v.holds);
        assert!(v.witness.is_none());
        let target = postnikov_stanley_dp(&u, &w).unwrap().support();
        assert!(enumerate_chains(&u, &w)
            .unwrap()
            .all(|c| chain_weight(&c).support() != target));
        assert!(is_snp(&postnikov_stanley_dp(&u, &w).unwrap()).unwrap());
    }

    // Rank-6 intervals where the pattern characterization breaks: one side
    // avoids its pattern yet no chain reaches the full support.
    #[test]
    fn rank_six_pattern_exceptions() {
        for (u, w, avoider) in [("236145", "563412", "u"), ("214365", "541632", "w")] {
            let (u, w) = (p(u), p(w));
            let v = is_scnp(&u, &w).unwrap();
            assert!(!v.holds, "{u} {w}");
            let target = postnikov_stanley_dp(&u, &w).unwrap().support();
            assert_eq!(target.len(), 81);
            let best = enumerate_chains(&u, &w)
                .unwrap()
                .map(|c| chain_weight(&c).support().len())
                .max()
                .unwrap();
            assert_eq!(best, 73);
            let u_avoids = !u.contains_pattern(&p("1324")).unwrap();
            let w_avoids = !w.contains_pattern(&p("4231")).unwrap();
            assert_eq!((u_avoids, w_avoids), (avoider == "u", avoider == "w"));
        }
    }

    #[test]
    fn rejects_incomparable() {
        assert!(matches!(
            is_scnp(&p("231"), &p("312")),
            Err(Error::NotComparable { .. })
        ));
        assert!(is_scnp(&p("21"), &p("213")).is_err());
    }

    #[test]
    fn trivial_interval() {
        let v = is_scnp(&p("2413"), &p("2413")).unwrap();
        assert!(v.holds);
        assert_eq!(v.witness.unwrap().len(), 0);
    }

    #[test]
    fn agrees_with_exhaustive_chain_scan_on_s4() {
        let mut failures = Vec::new();
        for (u, w) in comparable_pairs(4) {
            let target = postnikov_stanley_dp(&u, &w).unwrap().support();
            let oracle = enumerate_chains(&u, &w)
                .unwrap()
                .any(|c| chain_weight(&c).support() == target);
            let table = IntervalSupports::below(&w).unwrap();
            assert_eq!(table.support(&u).unwrap(), target, "{u} {w}");
            let v = table.search(&u).unwrap();
            assert_eq!(v.holds, oracle, "{u} {w}");
            assert_eq!(is_scnp(&u, &w).unwrap().holds, oracle, "{u} {w}");
            if let Some(c) = &v.witness {
                assert_eq!((c.start(), c.end()), (&u, &w));
                assert_eq!(chain_weight(c).support(), target);
            } else {
                failures.push(format!("{u} {w}"));
            }
        }
        assert_eq!(failures, vec!["1324 4231"]);
    }

    #[test]
    fn support_table_matches_rational_dp_on_s5() {
        let all = Permutation::all(5).unwrap();
        let tables: Vec<_> = all
            .iter()
            .map(|w| IntervalSupports::below(w).unwrap())
            .collect();
        for u in &all {
            for (w, d) in postnikov_stanley_upper(u).unwrap() {
                let t = &tables[all.iter().position(|x| *x == w).unwrap()];
                assert_eq!(t.support(u).unwrap(), d.support(), "{u} {w}");
            }
        }
        let t = IntervalSupports::below(&p("2413")).unwrap();
        assert!(t.support(&p("3124")).is_none());
        assert!(t.search(&p("3124")).is_err());
        assert_eq!(t.elements().len(), 8);
    }

    #[test]
    fn packing_round_trips() {
        let e = ExponentVector(vec![0, 36, 1, 255, 7]);
        assert_eq!(unpack(pack(&e), 5), e);
        assert_eq!(segment(InversionPair { a: 2, b: 4 }), vec![1 << 8, 1 << 16]);
    }

    #[test]
    fn scnp_implies_snp_on_s4() {
        for (u, w) in comparable_pairs(4) {
            if is_scnp(&u, &w).unwrap().holds {
                assert!(
                    is_snp(&postnikov_stanley_dp(&u, &w).unwrap()).unwrap(),
                    "{u} {w}"
                );
            }
        }
    }

    #[test]
    fn identity_intervals_on_s5() {
        let id = Permutation::identity(5).unwrap();
        for w in Permutation::all(5).unwrap() {
            let target = dual_schubert(&w).support();
            let v = is_scnp(&id, &w).unwrap();
            assert!(v.holds, "{w}");
            assert_eq!(chain_weight(&v.witness.unwrap()).support(), target, "{w}");
            let g = greedy_chain(&id, &w).unwrap();
            assert_eq!(chain_weight(&g).support(), target, "{w}");
        }
    }

    #[test]
    fn verdict_json_round_trip() {
        let v = is_scnp(&p("213"), &p("321")).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(
            s,
            r#"{"holds":true,"witness":{"nodes":["213","312","321"],"labels":[[1,3],[2,3]]},"chains_examined":1}"#
        );
        let back: ScnpVerdict = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
