//! Staircase diagrams filled by inversions, and the corner-anchored
//! rectangle tilings that read off the vertices of `Newton(D^w)`.
//!
//! Row `i` of the staircase has `n - i` cells; the cell in column `j` is
//! labeled by the pair `(i, n - j + 1)`, so the row reads `(i,n), ..., (i,i+1)`
//! from left to right. Corner `k` is the last cell of row `k`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{InversionPair, Permutation};
use crate::poly::ExponentVector;
use crate::polytope::LatticePointSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircaseDiagram {
    n: usize,
    /// `fill[i-1][j-1]` for row `i`, column `j`.
    fill: Vec<Vec<u8>>,
}

impl StaircaseDiagram {
    /// All-zero diagram of rank `n`.
    pub fn empty(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidRank(n));
        }
        Ok(Self {
            n,
            fill: (1..n).map(|i| vec![0; n - i]).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.n - 1
    }

    pub fn row_len(&self, row: usize) -> usize {
        self.n - row
    }

    pub fn contains_cell(&self, row: usize, col: usize) -> bool {
        (1..self.n).contains(&row) && (1..=self.n - row).contains(&col)
    }

    pub fn label(&self, row: usize, col: usize) -> InversionPair {
        InversionPair {
            a: row,
            b: self.n - col + 1,
        }
    }

    pub fn fill(&self, row: usize, col: usize) -> u8 {
        self.fill[row - 1][col - 1]
    }

    pub fn fill_rows(&self) -> &[Vec<u8>] {
        &self.fill
    }

    pub fn ones(&self) -> usize {
        self.fill.iter().flatten().map(|&x| x as usize).sum()
    }

    /// `(row, col)` of corner `k`.
    pub fn corner(&self, k: usize) -> (usize, usize) {
        (k, self.n - k)
    }
}

/// Labels the staircase and writes 1 exactly in the cells whose pair is an inversion of `w`.
pub fn build_diagram(w: &Permutation) -> Result<StaircaseDiagram> {
    let mut d = StaircaseDiagram::empty(w.rank())?;
    for row in 1..d.n {
        for col in 1..=d.row_len(row) {
            let p = d.label(row, col);
            d.fill[row - 1][col - 1] = u8::from(w.has_inversion(p.a, p.b));
        }
    }
    Ok(d)
}

/// An inclusive block of cells whose bottom-right cell is corner `corner`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    pub corner: usize,
    pub top: usize,
    pub left: usize,
    pub bottom: usize,
    pub right: usize,
}

impl Rect {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.top..=self.bottom).contains(&row) && (self.left..=self.right).contains(&col)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.top..=self.bottom).flat_map(move |r| (self.left..=self.right).map(move |c| (r, c)))
    }
}

/// A partition of the staircase into `n - 1` rectangles, one anchored at
/// each corner; `rects[k-1]` is anchored at corner `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RectTiling {
    n: usize,
    rects: Vec<Rect>,
}

impl RectTiling {
    /// Validates a proposed tiling: rectangles inside the staircase, pairwise
    /// disjoint, covering every cell, one per corner.
    pub fn new(n: usize, mut rects: Vec<Rect>) -> Result<Self> {
        let shape = StaircaseDiagram::empty(n)?;
        rects.sort();
        let bad = |msg: String| Err(Error::Malformed(msg));
        if rects.len() != n - 1 {
            return bad(format!("{} rectangles for {} corners", rects.len(), n - 1));
        }
        let mut seen = vec![vec![false; n]; n];
        for (k, r) in rects.iter().enumerate() {
            if r.corner != k + 1 || (r.bottom, r.right) != shape.corner(k + 1) {
                return bad(format!(
                    "rectangle {r:?} is not anchored at corner {}",
                    k + 1
                ));
            }
            if r.top == 0 || r.left == 0 || r.top > r.bottom || r.left > r.right {
                return bad(format!("rectangle {r:?} is empty"));
            }
            for (row, col) in r.cells() {
                if std::mem::replace(&mut seen[row][col], true) {
                    return bad(format!("cell ({row},{col}) covered twice"));
                }
            }
        }
        let covered: usize = seen.iter().flatten().filter(|&&x| x).count();
        if covered != n * (n - 1) / 2 {
            return bad("rectangles do not cover the staircase".into());
        }
        Ok(Self { n, rects })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    /// Index (0-based) of the rectangle containing a cell.
    pub fn owner(&self, row: usize, col: usize) -> Option<usize> {
        self.rects.iter().position(|r| r.contains(row, col))
    }
}

/// Lazy depth-first enumeration of corner-anchored tilings.
///
/// The first uncovered cell in row-major order is always the top-left cell
/// of its rectangle, so each branch picks the corner that rectangle ends at.
pub struct Tilings {
    n: usize,
    covered: Vec<Vec<bool>>,
    placed: Vec<Rect>,
    frames: Vec<(Vec<Rect>, usize)>,
    fresh: bool,
}

impl Tilings {
    fn first_uncovered(&self) -> Option<(usize, usize)> {
        (1..self.n).find_map(|r| {
            (1..=self.n - r)
                .find(|&c| !self.covered[r][c])
                .map(|c| (r, c))
        })
    }

    fn candidates(&self, top: usize, left: usize) -> Vec<Rect> {
        (top..self.n)
            .filter(|&k| self.n - k >= left)
            .map(|k| Rect {
                corner: k,
                top,
                left,
                bottom: k,
                right: self.n - k,
            })
            .filter(|r| r.cells().all(|(row, col)| !self.covered[row][col]))
            .collect()
    }

    fn set(&mut self, r: Rect, value: bool) {
        for (row, col) in r.cells() {
            self.covered[row][col] = value;
        }
    }

    fn undo_last(&mut self) {
        if let Some(r) = self.placed.pop() {
            self.set(r, false);
        }
    }
}

impl Iterator for Tilings {
    type Item = RectTiling;

    fn next(&mut self) -> Option<RectTiling> {
        loop {
            if self.fresh {
                self.fresh = false;
                match self.first_uncovered() {
                    None => {
                        let mut rects = self.placed.clone();
                        rects.sort();
                        self.undo_last();
                        return Some(RectTiling { n: self.n, rects });
                    }
                    Some((r, c)) => {
                        let cands = self.candidates(r, c);
                        self.frames.push((cands, 0));
                    }
                }
            }
            let (cands, idx) = self.frames.last_mut()?;
            if *idx < cands.len() {
                let rect = cands[*idx];
                *idx += 1;
                self.set(rect, true);
                self.placed.push(rect);
                self.fresh = true;
            } else {
                self.frames.pop();
                self.undo_last();
            }
        }
    }
}

/// Streams every corner-anchored rectangle tiling of the rank-`n` staircase.
pub fn enumerate_tilings(n: usize) -> Result<Tilings> {
    if n < 2 {
        return Err(Error::InvalidRank(n));
    }
    Ok(Tilings {
        n,
        covered: vec![vec![false; n]; n],
        placed: Vec::new(),
        frames: Vec::new(),
        fresh: true,
    })
}

/// Coordinate `k` is the sum of the fill inside the rectangle anchored at corner `k`.
pub fn tiling_vertex(d: &StaircaseDiagram, t: &RectTiling) -> Result<ExponentVector> {
    if d.n != t.n {
        return Err(Error::RankMismatch {
            left: d.n,
            right: t.n,
        });
    }
    Ok(ExponentVector(
        t.rects
            .iter()
            .map(|r| r.cells().map(|(row, col)| d.fill(row, col) as u32).sum())
            .collect(),
    ))
}

/// Every tiling of `w`'s diagram with its corner sums, in enumeration order.
pub fn tilings_with_vertices(w: &Permutation) -> Result<Vec<(RectTiling, ExponentVector)>> {
    let d = build_diagram(w)?;
    enumerate_tilings(w.rank())?
        .map(|t| {
            let v = tiling_vertex(&d, &t)?;
            Ok((t, v))
        })
        .collect()
}

/// The deduplicated set of tiling vertices of `w`.
pub fn vertices_via_tilings(w: &Permutation) -> LatticePointSet {
    if w.rank() < 2 {
        return BTreeSet::from([ExponentVector::zero(0)]);
    }
    tilings_with_vertices(w)
        .expect("rank is at least 2")
        .into_iter()
        .map(|(_, v)| v)
        .collect()
}

const CELL: usize = 7;

fn centered(s: &str) -> String {
    format!("{s:^CELL$}")
}

/// ASCII grid of the staircase. Edges are drawn wherever `owner` differs on
/// the two sides.
fn render_grid<F, G>(d: &StaircaseDiagram, owner: F, second_line: G) -> String
where
    F: Fn(usize, usize) -> Option<usize>,
    G: Fn(usize, usize) -> String,
{
    let rows = d.rows();
    let cols = d.row_len(1);
    let own = |r: usize, c: usize| {
        if d.contains_cell(r, c) {
            owner(r, c)
        } else {
            None
        }
    };
    // horizontal edge above row y+1 at column x+1 (lattice line y, 0-based)
    let h = |y: usize, x: usize| own(y, x + 1) != own(y + 1, x + 1);
    // vertical edge left of column x+1 in row y+1
    let v = |y: usize, x: usize| own(y + 1, x) != own(y + 1, x + 1);
    let joint = |y: usize, x: usize| {
        if (x < cols && h(y, x)) || (x > 0 && h(y, x - 1)) {
            '+'
        } else if (y < rows && v(y, x)) || (y > 0 && v(y - 1, x)) {
            '|'
        } else {
            ' '
        }
    };

    let mut out = String::new();
    for y in 0..=rows {
        for x in 0..=cols {
            out.push(joint(y, x));
            if x < cols {
                let ch = if h(y, x) { '-' } else { ' ' };
                out.extend(std::iter::repeat_n(ch, CELL));
            }
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        if y == rows {
            break;
        }
        let r = y + 1;
        for line in 0..2 {
            for x in 0..=cols {
                out.push(if v(y, x) { '|' } else { ' ' });
                if x < cols {
                    let c = x + 1;
                    let text = match (d.contains_cell(r, c), line) {
                        (false, _) => String::new(),
                        (true, 0) => d.label(r, c).to_string(),
                        (true, _) => second_line(r, c),
                    };
                    out.push_str(&centered(&text));
                }
            }
            out.truncate(out.trim_end().len());
            out.push('\n');
        }
    }
    out
}

/// Labeled, filled staircase with every cell boxed.
pub fn render_diagram(d: &StaircaseDiagram) -> String {
    render_grid(d, |r, c| Some(r * d.n + c), |r, c| d.fill(r, c).to_string())
}

/// Staircase with only the rectangle borders of `t`; each anchor cell shows
/// `fill =sum`, and the corner sums are listed top to bottom underneath.
pub fn render_tiling(d: &StaircaseDiagram, t: &RectTiling) -> Result<String> {
    let vertex = tiling_vertex(d, t)?;
    let mut out = render_grid(
        d,
        |r, c| t.owner(r, c),
        |r, c| {
            let fill = d.fill(r, c);
            match t
                .rects
                .iter()
                .position(|rect| (rect.bottom, rect.right) == (r, c))
            {
                Some(k) => format!("{fill} ={}", vertex.0[k]),
                None => fill.to_string(),
            }
        },
    );
    out.push_str(&format!("corner sums: {vertex}\n"));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingEntry {
    pub rects: Vec<Rect>,
    pub vertex: Vec<u32>,
}

/// `{"w": "...", "tilings": [{"rects": [...], "vertex": [...]}, ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingsReport {
    pub w: Permutation,
    pub tilings: Vec<TilingEntry>,
}

pub fn tilings_report(w: &Permutation) -> Result<TilingsReport> {
    Ok(TilingsReport {
        w: w.clone(),
        tilings: tilings_with_vertices(w)?
            .into_iter()
            .map(|(t, v)| TilingEntry {
                rects: t.rects,
                vertex: v.0,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{gp_from_inversions, newton_vertices_coeff1, newton_vertices_hull};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn rect(corner: usize, top: usize, left: usize, n: usize) -> Rect {
        Rect {
            corner,
            top,
            left,
            bottom: corner,
            right: n - corner,
        }
    }

    /// Counts partitions of the staircase into exactly `n - 1` arbitrary
    /// rectangles, with no anchoring assumption.
    fn brute_force_count(n: usize) -> usize {
        fn go(n: usize, covered: &mut Vec<Vec<bool>>, pieces: usize) -> usize {
            if pieces > n - 1 {
                return 0;
            }
            let Some((r, c)) =
                (1..n).find_map(|r| (1..=n - r).find(|&c| !covered[r][c]).map(|c| (r, c)))
            else {
                return usize::from(pieces == n - 1);
            };
            let mut total = 0;
            for bottom in r..n {
                for right in c..=n - bottom {
                    let cells: Vec<_> = (r..=bottom)
                        .flat_map(|y| (c..=right).map(move |x| (y, x)))
                        .collect();
                    if cells.iter().any(|&(y, x)| x > n - y || covered[y][x]) {
                        continue;
                    }
                    cells.iter().for_each(|&(y, x)| covered[y][x] = true);
                    total += go(n, covered, pieces + 1);
                    cells.iter().for_each(|&(y, x)| covered[y][x] = false);
                }
            }
            total
        }
        go(n, &mut vec![vec![false; n + 1]; n + 1], 0)
    }

    // This fill is sometimes attributed to 254361; only 253641 has these
    // inversions, so that spelling is the fixture.
    #[test]
    fn diagram_of_253641() {
        let d = build_diagram(&p("253641")).unwrap();
        assert_eq!(
            d.fill_rows(),
            &[
                vec![1, 0, 0, 0, 0],
                vec![1, 1, 0, 1],
                vec![1, 0, 0],
                vec![1, 1],
                vec![1]
            ]
        );
        let ones: BTreeSet<_> = (1..6)
            .flat_map(|r| (1..=6 - r).map(move |c| (r, c)))
            .filter(|&(r, c)| d.fill(r, c) == 1)
            .map(|(r, c)| d.label(r, c))
            .collect();
        assert_eq!(ones, p("253641").inversions().into_iter().collect());
    }

    #[test]
    fn diagrams_basic() {
        let d = build_diagram(&p("4213")).unwrap();
        assert_eq!(d.fill_rows(), &[vec![1, 1, 1], vec![0, 1], vec![0]]);
        assert_eq!(d.label(1, 1), InversionPair { a: 1, b: 4 });
        assert_eq!(d.label(2, 2), InversionPair { a: 2, b: 3 });
        assert_eq!(build_diagram(&p("12345")).unwrap().ones(), 0);
        assert!(build_diagram(&p("1")).is_err());
        for w in Permutation::all(5).unwrap() {
            assert_eq!(build_diagram(&w).unwrap().ones(), w.length());
        }
    }

    #[test]
    fn tiling_counts() {
        let counts: Vec<usize> = (2..=7)
            .map(|n| enumerate_tilings(n).unwrap().count())
            .collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42, 132]);
        for n in 2..=6 {
            assert_eq!(enumerate_tilings(n).unwrap().count(), brute_force_count(n));
        }
        assert!(enumerate_tilings(1).is_err());
    }

    #[test]
    fn tilings_are_valid_partitions() {
        for n in 2..=7 {
            let all: Vec<_> = enumerate_tilings(n).unwrap().collect();
            let distinct: BTreeSet<_> = all.iter().map(|t| t.rects.clone()).collect();
            assert_eq!(distinct.len(), all.len());
            for t in &all {
                assert_eq!(RectTiling::new(n, t.rects.clone()).as_ref(), Ok(t));
            }
        }
    }

    #[test]
    fn tiling_validation_rejects_bad_input() {
        // overlapping
        let rs = vec![rect(1, 1, 1, 3), rect(2, 1, 1, 3)];
        assert!(RectTiling::new(3, rs).is_err());
        // missing a cell
        let rs = vec![rect(1, 1, 2, 3), rect(2, 2, 1, 3)];
        assert!(RectTiling::new(3, rs).is_err());
        let ok = vec![rect(1, 1, 1, 3), rect(2, 2, 1, 3)];
        assert!(RectTiling::new(3, ok).is_ok());
    }

    #[test]
    fn a_tiling_of_253641() {
        let n = 6;
        let t = RectTiling::new(
            n,
            vec![
                rect(1, 1, 3, n),
                rect(2, 2, 4, n),
                rect(3, 2, 3, n),
                rect(4, 1, 1, n),
                rect(5, 5, 1, n),
            ],
        )
        .unwrap();
        let d = build_diagram(&p("253641")).unwrap();
        assert_eq!(
            tiling_vertex(&d, &t).unwrap(),
            ExponentVector(vec![0, 1, 0, 6, 1])
        );
        assert!(enumerate_tilings(n).unwrap().any(|x| x == t));
    }

    #[test]
    fn all_tilings_of_4213() {
        let n = 4;
        let d = build_diagram(&p("4213")).unwrap();
        // the five tilings with their corner sums
        let drawn = [
            (
                vec![rect(1, 1, 1, n), rect(2, 2, 1, n), rect(3, 3, 1, n)],
                [3, 1, 0],
            ),
            (
                vec![rect(1, 1, 3, n), rect(2, 1, 1, n), rect(3, 3, 1, n)],
                [1, 3, 0],
            ),
            (
                vec![rect(1, 1, 1, n), rect(2, 2, 2, n), rect(3, 2, 1, n)],
                [3, 1, 0],
            ),
            (
                vec![rect(1, 1, 3, n), rect(2, 1, 2, n), rect(3, 1, 1, n)],
                [1, 2, 1],
            ),
            (
                vec![rect(1, 1, 2, n), rect(2, 2, 2, n), rect(3, 1, 1, n)],
                [2, 1, 1],
            ),
        ];
        let enumerated: Vec<_> = enumerate_tilings(n).unwrap().collect();
        assert_eq!(enumerated.len(), 5);
        for (rects, sums) in drawn {
            let t = RectTiling::new(n, rects).unwrap();
            assert!(enumerated.contains(&t));
            assert_eq!(tiling_vertex(&d, &t).unwrap().0, sums.to_vec());
        }
        let expected: LatticePointSet = [[3, 1, 0], [1, 3, 0], [1, 2, 1], [2, 1, 1]]
            .iter()
            .map(|v| ExponentVector(v.to_vec()))
            .collect();
        assert_eq!(vertices_via_tilings(&p("4213")), expected);
    }

    #[test]
    fn zero_fill_gives_zero_vertex() {
        let d = build_diagram(&p("12345")).unwrap();
        for t in enumerate_tilings(5).unwrap() {
            assert_eq!(tiling_vertex(&d, &t).unwrap(), ExponentVector::zero(4));
        }
        assert_eq!(
            vertices_via_tilings(&p("1234")),
            BTreeSet::from([ExponentVector::zero(3)])
        );
        let other = build_diagram(&p("1234")).unwrap();
        let t = enumerate_tilings(5).unwrap().next().unwrap();
        assert!(tiling_vertex(&other, &t).is_err());
    }

    #[test]
    fn tiling_vertices_agree_with_oracles_on_s5() {
        for w in Permutation::all(5).unwrap() {
            let gp = gp_from_inversions(&w).unwrap();
            for (_, v) in tilings_with_vertices(&w).unwrap() {
                assert_eq!(v.degree(), w.length() as u64);
                assert!(gp.contains(&v).unwrap());
            }
            let via = vertices_via_tilings(&w);
            assert_eq!(via, newton_vertices_coeff1(&w), "{w}");
            assert_eq!(via, newton_vertices_hull(&w), "{w}");
        }
    }

    #[test]
    fn renders() {
        let d = build_diagram(&p("4213")).unwrap();
        let expected = "\
+-------+-------+-------+
| (1,4) | (1,3) | (1,2) |
|   1   |   1   |   1   |
+-------+-------+-------+
| (2,4) | (2,3) |
|   0   |   1   |
+-------+-------+
| (3,4) |
|   0   |
+-------+
";
        assert_eq!(render_diagram(&d), expected);
        let t = RectTiling::new(
            4,
            vec![rect(1, 1, 3, 4), rect(2, 1, 2, 4), rect(3, 1, 1, 4)],
        )
        .unwrap();
        let expected = "\
+-------+-------+-------+
| (1,4) | (1,3) | (1,2) |
|   1   |   1   | 1 =1  |
|       |       +-------+
| (2,4) | (2,3) |
|   0   | 1 =2  |
|       +-------+
| (3,4) |
| 0 =1  |
+-------+
corner sums: (1,2,1)
";
        assert_eq!(render_tiling(&d, &t).unwrap(), expected);
        assert!(render_diagram(&d).is_ascii());
    }

    #[test]
    fn report_json() {
        let r = tilings_report(&p("213")).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"w":"213","tilings":[{"rects":[{"corner":1,"top":1,"left":1,"bottom":1,"right":2},{"corner":2,"top":2,"left":1,"bottom":2,"right":1}],"vertex":[1,0]},{"rects":[{"corner":1,"top":1,"left":2,"bottom":1,"right":2},{"corner":2,"top":1,"left":1,"bottom":2,"right":1}],"vertex":[1,0]}]}"#
        );
        let back: TilingsReport = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
