//! Exhaustive sweeps over `S_n`, sharded by permutation, with a time budget
//! and JSON checkpoints for resuming long runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::IntervalSupports;
use crate::bruhat::{greedy_chain, is_greedy};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::poly::ExponentVector;
use crate::poly::{chain_weight, dual_schubert, global_weight, postnikov_stanley_upper};
use crate::polytope::{
    gp_from_inversions, gp_integer_points, hull_vertices, is_snp, m_convexity, minkowski_sum,
    minkowski_support, newton_vertices_coeff1, segment_points, LatticePointSet,
};
use crate::tiling::vertices_via_tilings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    /// Every `D_u^w` has an M-convex support.
    PsMconvex,
    /// Non-SCNP intervals occur exactly below 1324-containing `u` and above
    /// 4231-containing `w`.
    ScnpPattern,
    /// The proven statements about `D^w`, rechecked for every `w`.
    PaperTheorems,
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyMode::PsMconvex => "ps-mconvex",
            VerifyMode::ScnpPattern => "scnp-pattern",
            VerifyMode::PaperTheorems => "paper-theorems",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Counterexample {
    pub u: Option<Permutation>,
    pub w: Option<Permutation>,
    pub reason: String,
}

/// Everything needed to continue an interrupted sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub mode: VerifyMode,
    pub n: usize,
    /// Permutations of `S_n`, in lexicographic order, already processed.
    pub units_done: usize,
    pub checked_pairs: u64,
    pub counterexamples: Vec<Counterexample>,
    pub non_scnp_pairs: Vec<(Permutation, Permutation)>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub mode: VerifyMode,
    pub n: usize,
    pub checked_pairs: u64,
    pub counterexamples: Vec<Counterexample>,
    /// Intervals without SCNP (only collected in `scnp-pattern` mode).
    pub non_scnp_pairs: Vec<(Permutation, Permutation)>,
    pub elapsed_ms: u64,
    /// False when the budget ran out; `checkpoint` then resumes the sweep.
    pub complete: bool,
    pub checkpoint: Option<Checkpoint>,
}

impl ConjectureReport {
    /// Complete and without counterexamples.
    pub fn holds(&self) -> bool {
        self.complete && self.counterexamples.is_empty()
    }

    /// Plain-text table for terminals.
    pub fn summary(&self) -> String {
        let status = match (self.complete, self.counterexamples.is_empty()) {
            (false, _) => "INCOMPLETE",
            (true, true) => "VERIFIED",
            (true, false) => "COUNTEREXAMPLES FOUND",
        };
        let mut rows = vec![
            ("mode", self.mode.to_string()),
            ("n", self.n.to_string()),
            ("checked pairs", self.checked_pairs.to_string()),
            ("counterexamples", self.counterexamples.len().to_string()),
        ];
        if self.mode == VerifyMode::ScnpPattern {
            rows.push(("non-SCNP pairs", self.non_scnp_pairs.len().to_string()));
        }
        rows.push((
            "elapsed",
            format!("{:.3} s", self.elapsed_ms as f64 / 1000.0),
        ));
        rows.push(("status", status.to_string()));
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:<16} {v}\n"));
        }
        for (u, w) in self.non_scnp_pairs.iter().take(20) {
            out.push_str(&format!("  no SCNP: u={u} w={w}\n"));
        }
        if self.non_scnp_pairs.len() > 20 {
            out.push_str(&format!("  ... {} more\n", self.non_scnp_pairs.len() - 20));
        }
        for c in &self.counterexamples {
            let show =
                |p: &Option<Permutation>| p.as_ref().map_or("-".to_string(), |p| p.to_string());
            out.push_str(&format!(
                "  counterexample: u={} w={}: {}\n",
                show(&c.u),
                show(&c.w),
                c.reason
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub units_done: usize,
    pub units_total: usize,
    pub checked_pairs: u64,
    pub counterexamples: usize,
}

pub type ProgressFn = dyn Fn(&Progress) + Send + Sync;

#[derive(Default)]
pub struct VerifyOptions {
    /// Worker threads; the global rayon pool when unset.
    pub jobs: Option<usize>,
    /// Stop after the batch during which this much time has passed.
    pub budget: Option<Duration>,
    pub resume: Option<Checkpoint>,
    pub progress: Option<Box<ProgressFn>>,
}

#[derive(Default)]
struct UnitResult {
    checked_pairs: u64,
    counterexamples: Vec<Counterexample>,
    non_scnp_pairs: Vec<(Permutation, Permutation)>,
}

impl UnitResult {
    fn fail(&mut self, u: &Permutation, w: &Permutation, reason: impl Into<String>) {
        self.counterexamples.push(Counterexample {
            u: Some(u.clone()),
            w: Some(w.clone()),
            reason: reason.into(),
        });
    }
}

fn ps_mconvex_unit(u: &Permutation) -> Result<UnitResult> {
    let mut out = UnitResult::default();
    for (w, d) in postnikov_stanley_upper(u)? {
        out.checked_pairs += 1;
        let m = m_convexity(&d.support());
        if !m.holds() {
            out.fail(u, &w, format!("support is not M-convex: {m}"));
        }
    }
    Ok(out)
}

fn scnp_unit(w: &Permutation) -> Result<UnitResult> {
    let mut out = UnitResult::default();
    let table = IntervalSupports::below(w)?;
    let nvars = w.rank() - 1;
    for u in table.elements() {
        out.checked_pairs += 1;
        match table.search(u)?.witness {
            Some(c) => {
                let support = c.labels().iter().fold(
                    LatticePointSet::from([ExponentVector::zero(nvars)]),
                    |acc, &label| minkowski_sum(&acc, &segment_points(label.into(), nvars)),
                );
                if Some(support) != table.support(u) {
                    return Err(Error::Internal(format!(
                        "chain {c} reported dominant but is not"
                    )));
                }
            }
            None => out.non_scnp_pairs.push((u.clone(), w.clone())),
        }
    }
    Ok(out)
}

fn theorems_unit(w: &Permutation) -> Result<UnitResult> {
    let mut out = UnitResult::default();
    out.checked_pairs = 1;
    let id = Permutation::identity(w.rank())?;
    let d = dual_schubert(w);
    let support = d.support();
    let gw = global_weight(w);
    let greedy = greedy_chain(&id, w)?;
    let mut check = |ok: bool, reason: &str| {
        if !ok {
            out.fail(&id, w, reason);
        }
    };
    check(
        d.has_positive_coefficients(),
        "D^w has a nonpositive coefficient",
    );
    check(gw.support() == support, "supp D^w differs from supp GW(w)");
    check(
        is_greedy(&greedy, &id, w)?,
        "greedy_chain output is not greedy",
    );
    check(
        chain_weight(&greedy) == gw,
        "greedy chain weight differs from GW(w)",
    );
    check(
        IntervalSupports::below(w)?.search(&id)?.holds,
        "[id, w] lacks SCNP",
    );
    check(
        minkowski_support(w) == support,
        "supp D^w differs from the Minkowski sum of segments",
    );
    check(
        gp_integer_points(&gp_from_inversions(w)?) == support,
        "supp D^w differs from the integer points of the permutahedron",
    );
    check(m_convexity(&support).holds(), "supp D^w is not M-convex");
    check(is_snp(&d)?, "D^w does not have SNP");
    let coeff1 = newton_vertices_coeff1(w);
    check(
        vertices_via_tilings(w) == coeff1,
        "tiling vertices differ from coefficient-1 exponents",
    );
    check(
        hull_vertices(&gw.support())? == coeff1,
        "hull vertices differ from coefficient-1 exponents",
    );
    Ok(out)
}

fn run_unit(mode: VerifyMode, unit: &Permutation) -> Result<UnitResult> {
    match mode {
        VerifyMode::PsMconvex => ps_mconvex_unit(unit),
        VerifyMode::ScnpPattern => scnp_unit(unit),
        VerifyMode::PaperTheorems => theorems_unit(unit),
    }
}

/// Compares the observed non-SCNP intervals with the pattern statement.
fn pattern_mismatches(
    n: usize,
    non_scnp: &[(Permutation, Permutation)],
) -> Result<Vec<Counterexample>> {
    let mut below: BTreeMap<&Permutation, &Permutation> = BTreeMap::new();
    let mut above: BTreeMap<&Permutation, &Permutation> = BTreeMap::new();
    for (u, w) in non_scnp {
        below.entry(u).or_insert(w);
        above.entry(w).or_insert(u);
    }
    let contains = |x: &Permutation, pattern: &str| -> Result<bool> {
        if n < 4 {
            return Ok(false);
        }
        x.contains_pattern(&pattern.parse()?)
    };
    let mut out = Vec::new();
    for x in Permutation::all(n)? {
        match (contains(&x, "1324")?, below.get(&x)) {
            (true, None) => out.push(Counterexample {
                u: Some(x.clone()),
                w: None,
                reason: "u contains 1324 but every interval above it has SCNP".into(),
            }),
            (false, Some(&w)) => out.push(Counterexample {
                u: Some(x.clone()),
                w: Some(w.clone()),
                reason: "u avoids 1324 but the interval lacks SCNP".into(),
            }),
            _ => {}
        }
        match (contains(&x, "4231")?, above.get(&x)) {
            (true, None) => out.push(Counterexample {
                u: None,
                w: Some(x.clone()),
                reason: "w contains 4231 but every interval below it has SCNP".into(),
            }),
            (false, Some(&u)) => out.push(Counterexample {
                u: Some(u.clone()),
                w: Some(x.clone()),
                reason: "w avoids 4231 but the interval lacks SCNP".into(),
            }),
            _ => {}
        }
    }
    Ok(out)
}

/// Runs a sweep over `S_n`, one unit of work per permutation: `u` for
/// `ps-mconvex`, `w` for the other modes.
pub fn verify(mode: VerifyMode, n: usize, opts: VerifyOptions) -> Result<ConjectureReport> {
    if n < 2 {
        return Err(Error::InvalidRank(n));
    }
    let started = Instant::now();
    let units = Permutation::all(n)?;
    let mut state = match opts.resume {
        Some(c) if c.mode != mode || c.n != n => {
            return Err(Error::Malformed(format!(
                "checkpoint is for {} at n = {}, not {mode} at n = {n}",
                c.mode, c.n
            )));
        }
        Some(c) if c.units_done > units.len() => {
            return Err(Error::Malformed(format!(
                "checkpoint claims {} units of {}",
                c.units_done,
                units.len()
            )));
        }
        Some(c) => c,
        None => Checkpoint {
            mode,
            n,
            units_done: 0,
            checked_pairs: 0,
            counterexamples: Vec::new(),
            non_scnp_pairs: Vec::new(),
            elapsed_ms: 0,
        },
    };
    let previous_ms = state.elapsed_ms;
    let pool = match opts.jobs {
        Some(j) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Internal(e.to_string()))?,
        ),
        None => None,
    };
    let batch = 2 * pool
        .as_ref()
        .map_or_else(rayon::current_num_threads, |p| p.current_num_threads());

    while state.units_done < units.len() {
        if opts.budget.is_some_and(|b| started.elapsed() >= b) {
            break;
        }
        let end = (state.units_done + batch).min(units.len());
        let work = &units[state.units_done..end];
        let run = || {
            work.par_iter()
                .map(|u| run_unit(mode, u))
                .collect::<Vec<_>>()
        };
        let results = match &pool {
            Some(p) => p.install(run),
            None => run(),
        };
        for r in results {
            let r = r?;
            state.checked_pairs += r.checked_pairs;
            state.counterexamples.extend(r.counterexamples);
            state.non_scnp_pairs.extend(r.non_scnp_pairs);
        }
        state.units_done = end;
        if let Some(f) = &opts.progress {
            f(&Progress {
                units_done: state.units_done,
                units_total: units.len(),
                checked_pairs: state.checked_pairs,
                counterexamples: state.counterexamples.len(),
            });
        }
    }

    state.elapsed_ms = previous_ms + started.elapsed().as_millis() as u64;
    state.counterexamples.sort();
    state.non_scnp_pairs.sort();
    let complete = state.units_done == units.len();
    let mut counterexamples = state.counterexamples.clone();
    if complete && mode == VerifyMode::ScnpPattern {
        counterexamples.extend(pattern_mismatches(n, &state.non_scnp_pairs)?);
        counterexamples.sort();
    }
    Ok(ConjectureReport {
        mode,
        n,
        checked_pairs: state.checked_pairs,
        counterexamples: counterexamples
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        non_scnp_pairs: state.non_scnp_pairs.clone(),
        elapsed_ms: state.elapsed_ms,
        complete,
        checkpoint: (!complete).then_some(state),
    })
}

/// Checks that every `D_u^w` in `S_n` has an M-convex support.
pub fn verify_ps_mconvex(n: usize) -> Result<ConjectureReport> {
    verify(VerifyMode::PsMconvex, n, VerifyOptions::default())
}

/// Checks the 1324 / 4231 pattern characterization of non-SCNP intervals in `S_n`.
pub fn verify_scnp_pattern(n: usize) -> Result<ConjectureReport> {
    verify(VerifyMode::ScnpPattern, n, VerifyOptions::default())
}

/// Rechecks the proven statements about `D^w` for every `w ∈ S_n`.
pub fn verify_paper_theorems(n: usize) -> Result<ConjectureReport> {
    verify(VerifyMode::PaperTheorems, n, VerifyOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    /// Comparable pairs counted straight from the rank-matrix criterion.
    fn comparable_pair_count(n: usize) -> u64 {
        let all = Permutation::all(n).unwrap();
        all.iter()
            .flat_map(|u| all.iter().map(move |w| (u, w)))
            .filter(|(u, w)| u.bruhat_leq(w).unwrap())
            .count() as u64
    }

    fn strip_time(mut r: ConjectureReport) -> ConjectureReport {
        r.elapsed_ms = 0;
        if let Some(c) = r.checkpoint.as_mut() {
            c.elapsed_ms = 0;
        }
        r
    }

    #[test]
    fn mconvex_small_ranks() {
        for n in 2..=4 {
            let r = verify_ps_mconvex(n).unwrap();
            assert!(r.holds(), "{}", r.summary());
            assert_eq!(r.checked_pairs, comparable_pair_count(n));
            assert!(r.checkpoint.is_none());
        }
    }

    #[test]
    fn scnp_pattern_small_ranks() {
        let r = verify_scnp_pattern(3).unwrap();
        assert!(r.holds());
        assert!(r.non_scnp_pairs.is_empty());
        let r = verify_scnp_pattern(4).unwrap();
        assert!(r.holds(), "{}", r.summary());
        assert_eq!(r.non_scnp_pairs, vec![(p("1324"), p("4231"))]);
        assert_eq!(r.checked_pairs, comparable_pair_count(4));
    }

    #[test]
    fn theorems_small_ranks() {
        for n in 2..=4 {
            let r = verify_paper_theorems(n).unwrap();
            assert!(r.holds(), "{}", r.summary());
            assert_eq!(r.checked_pairs, (1..=n as u64).product::<u64>());
        }
    }

    #[test]
    fn mismatches_are_reported() {
        // pretend a 1324-avoiding interval failed and that 1324 never did
        let fake = vec![(p("1234"), p("2143"))];
        let m = pattern_mismatches(4, &fake).unwrap();
        let reasons: Vec<_> = m.iter().map(|c| c.reason.as_str()).collect();
        assert!(reasons.contains(&"u avoids 1324 but the interval lacks SCNP"));
        assert!(reasons.contains(&"w avoids 4231 but the interval lacks SCNP"));
        assert!(reasons.contains(&"u contains 1324 but every interval above it has SCNP"));
        assert!(reasons.contains(&"w contains 4231 but every interval below it has SCNP"));
        assert!(pattern_mismatches(4, &[(p("1324"), p("4231"))])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn parallel_runs_agree() {
        let run = |jobs| {
            strip_time(
                verify(
                    VerifyMode::ScnpPattern,
                    4,
                    VerifyOptions {
                        jobs: Some(jobs),
                        ..Default::default()
                    },
                )
                .unwrap(),
            )
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn budget_then_resume() {
        let calls = Arc::new(AtomicUsize::new(0));
        let counter = Arc::clone(&calls);
        let partial = verify(
            VerifyMode::ScnpPattern,
            4,
            VerifyOptions {
                jobs: Some(1),
                budget: Some(Duration::ZERO),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!partial.complete);
        assert!(!partial.holds());
        assert_eq!(partial.checked_pairs, 0);
        let checkpoint = partial.checkpoint.clone().unwrap();
        let json = serde_json::to_string(&checkpoint).unwrap();
        let back: Checkpoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, checkpoint);

        let resumed = verify(
            VerifyMode::ScnpPattern,
            4,
            VerifyOptions {
                jobs: Some(2),
                resume: Some(back),
                progress: Some(Box::new(move |_| {
                    counter.fetch_add(1, Ordering::Relaxed);
                })),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(calls.load(Ordering::Relaxed) > 0);
        assert_eq!(
            strip_time(resumed),
            strip_time(verify_scnp_pattern(4).unwrap())
        );
    }

    #[test]
    fn resume_validates_checkpoint() {
        let mut c = verify(
            VerifyMode::PsMconvex,
            3,
            VerifyOptions {
                budget: Some(Duration::ZERO),
                ..Default::default()
            },
        )
        .unwrap()
        .checkpoint
        .unwrap();
        let opts = |c: Checkpoint| VerifyOptions {
            resume: Some(c),
            ..Default::default()
        };
        assert!(verify(VerifyMode::ScnpPattern, 3, opts(c.clone())).is_err());
        assert!(verify(VerifyMode::PsMconvex, 4, opts(c.clone())).is_err());
        c.units_done = 99;
        assert!(verify(VerifyMode::PsMconvex, 3, opts(c)).is_err());
        assert!(verify_ps_mconvex(1).is_err());
    }

    #[test]
    fn report_json_and_summary() {
        let r = verify_scnp_pattern(4).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: ConjectureReport = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
        assert!(s.contains(r#""mode":"scnp-pattern""#));
        assert!(s.contains(r#""non_scnp_pairs":[["1324","4231"]]"#));
        let text = r.summary();
        assert!(text.contains("status           VERIFIED"));
        assert!(text.contains("no SCNP: u=1324 w=4231"));
    }
}
