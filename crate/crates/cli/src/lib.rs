//! Argument parsing and dispatch for the `dual-schubert` binary.
//!
//! Exit codes: 0 success, 1 counterexample found by `verify`, 2 usage or
//! invalid input, 3 internal error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use dual_schubert::bruhat::{enumerate_chains, greedy_chain, interval_elements, SaturatedChain};
use dual_schubert::poly::{
    chain_weight, dual_schubert, global_weight, postnikov_stanley_dp, ExponentVector,
    SparsePolynomial,
};
use dual_schubert::polytope::{
    gp_from_inversions, hull_vertices, is_snp, m_convexity, newton_vertices_coeff1, LatticePointSet,
};
use dual_schubert::scnp::{is_scnp, verify, Checkpoint, VerifyMode, VerifyOptions};
use dual_schubert::tiling::{
    build_diagram, render_diagram, render_tiling, tilings_report, vertices_via_tilings, RectTiling,
};
use dual_schubert::{Error, Permutation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "dual-schubert",
    version,
    about = "Dual Schubert and Postnikov-Stanley polynomials"
)]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The dual Schubert polynomial D^w.
    DualSchubert { w: Permutation },
    /// The Postnikov-Stanley polynomial D_u^w.
    Ps { u: Permutation, w: Permutation },
    /// Exponent vectors of D^w (or of D_u^w with --from).
    Support {
        w: Permutation,
        #[arg(long = "from", value_name = "U")]
        u: Option<Permutation>,
    },
    /// The global weight GW(w): product of segment forms over Inv(w).
    Gw { w: Permutation },
    /// The generalized permutahedron Newton(D^w).
    Newton { w: Permutation },
    /// Vertices of Newton(D^w).
    Vertices {
        w: Permutation,
        #[arg(long, value_enum, default_value_t = Method::Tilings)]
        method: Method,
    },
    /// Corner-anchored rectangle tilings of the staircase filled by Inv(w).
    Tilings {
        w: Permutation,
        #[arg(long)]
        render: bool,
    },
    /// A greedy saturated chain from u to w.
    Greedy { u: Permutation, w: Permutation },
    /// Saturated chains from u to w with their weights.
    Chains {
        u: Permutation,
        w: Permutation,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        render: bool,
    },
    /// Saturated Newton polytope check for D^w (or D_u^w with --from).
    CheckSnp {
        w: Permutation,
        #[arg(long = "from", value_name = "U")]
        u: Option<Permutation>,
    },
    /// M-convexity of the support of D^w (or D_u^w with --from).
    CheckMconvex {
        w: Permutation,
        #[arg(long = "from", value_name = "U")]
        u: Option<Permutation>,
    },
    /// Single-chain Newton polytope check for D_u^w.
    CheckScnp { u: Permutation, w: Permutation },
    /// Exhaustive sweep over S_n.
    Verify {
        /// Rank of the symmetric group to sweep.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Continue from a checkpoint file.
        #[arg(long, value_name = "FILE")]
        resume: Option<PathBuf>,
        /// Where to write the checkpoint if the budget runs out.
        #[arg(long, value_name = "FILE")]
        checkpoint: Option<PathBuf>,
        /// Stop after this many seconds and report a partial result.
        #[arg(long, value_name = "SECS")]
        budget_secs: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Tilings,
    Coeff1,
    Hull,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    PsMconvex,
    ScnpPattern,
    PaperTheorems,
}

impl From<Mode> for VerifyMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::PsMconvex => VerifyMode::PsMconvex,
            Mode::ScnpPattern => VerifyMode::ScnpPattern,
            Mode::PaperTheorems => VerifyMode::PaperTheorems,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportJson {
    pub nvars: usize,
    pub points: Vec<ExponentVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerticesJson {
    pub w: Permutation,
    pub method: String,
    pub vertices: Vec<ExponentVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub chain: SaturatedChain,
    pub weight: SparsePolynomial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainsJson {
    pub u: Permutation,
    pub w: Permutation,
    pub truncated: bool,
    pub chains: Vec<ChainEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckJson {
    pub u: Permutation,
    pub w: Permutation,
    pub holds: bool,
    pub detail: String,
}

/// Parses `args` (program name first), writes results to `out` and
/// diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| execute(&cli, out)));
    match result {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            classify(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| panic.downcast_ref::<&str>().copied())
                .unwrap_or("panic");
            let _ = writeln!(err, "internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}

fn classify(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(Error::Internal(_)) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn identity_of(w: &Permutation) -> anyhow::Result<Permutation> {
    Ok(Permutation::identity(w.rank())?)
}

fn ps_or_dual(
    u: &Option<Permutation>,
    w: &Permutation,
) -> anyhow::Result<(Permutation, SparsePolynomial)> {
    let u = match u {
        Some(u) => u.clone(),
        None => identity_of(w)?,
    };
    let d = postnikov_stanley_dp(&u, w)?;
    Ok((u, d))
}

fn points_of(d: &SparsePolynomial) -> Vec<ExponentVector> {
    d.terms_grevlex()
        .into_iter()
        .map(|(e, _)| e.clone())
        .collect()
}

fn vertices_by(method: Method, w: &Permutation) -> anyhow::Result<LatticePointSet> {
    Ok(match method {
        Method::Tilings => vertices_via_tilings(w),
        Method::Coeff1 => newton_vertices_coeff1(w),
        Method::Hull => hull_vertices(&global_weight(w).support())?,
        Method::All => {
            let sets = [Method::Tilings, Method::Coeff1, Method::Hull].map(|m| vertices_by(m, w));
            let [a, b, c] = sets;
            let (a, b, c) = (a?, b?, c?);
            if a != b || b != c {
                return Err(Error::Internal(format!("vertex methods disagree for {w}")).into());
            }
            a
        }
    })
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Tilings => "tilings",
        Method::Coeff1 => "coeff1",
        Method::Hull => "hull",
        Method::All => "all",
    }
}

fn describe_tiling(t: &RectTiling) -> String {
    t.rects()
        .iter()
        .map(|r| {
            format!(
                "k={}: rows {}-{} cols {}-{}",
                r.corner, r.top, r.bottom, r.left, r.right
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn render_interval(u: &Permutation, w: &Permutation) -> anyhow::Result<String> {
    let elements = interval_elements(u, w)?;
    let mut out = String::new();
    let (lo, hi) = (u.length(), w.length());
    for len in (lo..=hi).rev() {
        let level: Vec<String> = elements
            .iter()
            .filter(|v| v.length() == len)
            .map(|v| v.to_string())
            .collect();
        out.push_str(&format!("length {len:>2}: {}\n", level.join("  ")));
    }
    Ok(out)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    let json = cli.json;
    match &cli.command {
        Command::DualSchubert { w } => {
            let d = dual_schubert(w);
            if json {
                emit_json(out, &d)?;
            } else {
                writeln!(out, "{d}")?;
            }
        }
        Command::Ps { u, w } => {
            let d = postnikov_stanley_dp(u, w)?;
            if json {
                emit_json(out, &d)?;
            } else {
                writeln!(out, "{d}")?;
            }
        }
        Command::Gw { w } => {
            let g = global_weight(w);
            if json {
                emit_json(out, &g)?;
            } else {
                writeln!(out, "{g}")?;
            }
        }
        Command::Support { w, u } => {
            let (_, d) = ps_or_dual(u, w)?;
            let points = points_of(&d);
            if json {
                emit_json(
                    out,
                    &SupportJson {
                        nvars: d.nvars(),
                        points,
                    },
                )?;
            } else {
                for p in points {
                    writeln!(out, "{p}")?;
                }
            }
        }
        Command::Newton { w } => {
            let gp = gp_from_inversions(w)?;
            if json {
                emit_json(out, &gp)?;
            } else {
                write!(out, "{gp}")?;
            }
        }
        Command::Vertices { w, method } => {
            let vertices: Vec<_> = vertices_by(*method, w)?.into_iter().collect();
            if json {
                emit_json(
                    out,
                    &VerticesJson {
                        w: w.clone(),
                        method: method_name(*method).into(),
                        vertices,
                    },
                )?;
            } else {
                for v in vertices {
                    writeln!(out, "{v}")?;
                }
            }
        }
        Command::Tilings { w, render } => {
            let report = tilings_report(w)?;
            if json {
                emit_json(out, &report)?;
            } else {
                let d = build_diagram(w)?;
                writeln!(out, "{} tilings of {w}", report.tilings.len())?;
                if *render {
                    write!(out, "{}", render_diagram(&d))?;
                }
                for (i, entry) in report.tilings.iter().enumerate() {
                    let t = RectTiling::new(w.rank(), entry.rects.clone())?;
                    let vertex = ExponentVector(entry.vertex.clone());
                    writeln!(out, "tiling {}: {} -> {vertex}", i + 1, describe_tiling(&t))?;
                    if *render {
                        write!(out, "{}", render_tiling(&d, &t)?)?;
                    }
                }
            }
        }
        Command::Greedy { u, w } => {
            let c = greedy_chain(u, w)?;
            if json {
                emit_json(out, &c)?;
            } else {
                writeln!(out, "{c}")?;
            }
        }
        Command::Chains {
            u,
            w,
            limit,
            render,
        } => {
            if !u.bruhat_leq(w)? {
                return Err(Error::NotComparable {
                    u: u.to_string(),
                    w: w.to_string(),
                }
                .into());
            }
            let mut chains = enumerate_chains(u, w)?;
            let cap = limit.unwrap_or(usize::MAX);
            let taken: Vec<SaturatedChain> = chains.by_ref().take(cap).collect();
            let truncated = chains.next().is_some();
            let entries: Vec<ChainEntry> = taken
                .into_iter()
                .map(|chain| ChainEntry {
                    weight: chain_weight(&chain),
                    chain,
                })
                .collect();
            if json {
                emit_json(
                    out,
                    &ChainsJson {
                        u: u.clone(),
                        w: w.clone(),
                        truncated,
                        chains: entries,
                    },
                )?;
            } else {
                if *render {
                    write!(out, "{}", render_interval(u, w)?)?;
                }
                for e in &entries {
                    writeln!(out, "{}    weight {}", e.chain, e.weight)?;
                }
                if truncated {
                    writeln!(out, "(stopped after {} chains)", entries.len())?;
                }
            }
        }
        Command::CheckSnp { w, u } => {
            let (u, d) = ps_or_dual(u, w)?;
            let holds = is_snp(&d)?;
            let detail = if holds { "SNP" } else { "not SNP" };
            if json {
                emit_json(
                    out,
                    &CheckJson {
                        u,
                        w: w.clone(),
                        holds,
                        detail: detail.into(),
                    },
                )?;
            } else {
                writeln!(out, "{detail}")?;
            }
        }
        Command::CheckMconvex { w, u } => {
            let (u, d) = ps_or_dual(u, w)?;
            let m = m_convexity(&d.support());
            if json {
                emit_json(
                    out,
                    &CheckJson {
                        u,
                        w: w.clone(),
                        holds: m.holds(),
                        detail: m.to_string(),
                    },
                )?;
            } else {
                writeln!(out, "{m}")?;
            }
        }
        Command::CheckScnp { u, w } => {
            let v = is_scnp(u, w)?;
            if json {
                emit_json(out, &v)?;
            } else {
                writeln!(out, "{}", if v.holds { "SCNP" } else { "not SCNP" })?;
                if let Some(c) = &v.witness {
                    writeln!(out, "dominant chain: {c}")?;
                }
                writeln!(out, "chains examined: {}", v.chains_examined)?;
            }
        }
        Command::Verify {
            n,
            mode,
            jobs,
            resume,
            checkpoint,
            budget_secs,
        } => {
            let resume = match resume {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let c: Checkpoint = serde_json::from_str(&text)
                        .with_context(|| format!("parsing {}", path.display()))?;
                    Some(c)
                }
                None => None,
            };
            let opts = VerifyOptions {
                jobs: *jobs,
                budget: budget_secs.map(Duration::from_secs),
                resume,
                progress: Some(Box::new(|p| {
                    eprintln!(
                        "verify: {}/{} units, {} pairs, {} counterexamples",
                        p.units_done, p.units_total, p.checked_pairs, p.counterexamples
                    );
                })),
            };
            let report = verify((*mode).into(), *n, opts)?;
            if let (Some(path), Some(c)) = (checkpoint, &report.checkpoint) {
                let text = serde_json::to_string(c)?;
                std::fs::write(path, text)
                    .with_context(|| format!("writing {}", path.display()))?;
                eprintln!("verify: checkpoint written to {}", path.display());
            }
            if json {
                emit_json(out, &report)?;
            } else {
                write!(out, "{}", report.summary())?;
            }
            if !report.counterexamples.is_empty() {
                return Ok(EXIT_COUNTEREXAMPLE);
            }
            if !report.complete && checkpoint.is_none() {
                eprintln!("verify: budget exhausted; pass --checkpoint to save progress");
            }
        }
    }
    Ok(EXIT_OK)
}
