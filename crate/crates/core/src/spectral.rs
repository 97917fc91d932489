//! Bigraded spectral-sequence engine: pages, page-turning, windowed
//! degeneration certificates and edge data.
//!
//! Cohomological indexing is fixed globally: the page-`r` differential has
//! bidegree `(r, 1-r)`, so it raises the total degree `p + q` by one.
//! Differentials are supplied data (built in from a worked case, or given by
//! the caller); the engine validates and propagates them but never guesses.
//!
//! Pages are *windowed*: a page declares a column range `[p_min, 0]` and a
//! total-degree range and asserts that every nonzero entry of the represented
//! object within those columns and totals is declared. Entries with `p > 0`
//! vanish identically. Certificates produced by [`degeneration_check`] are
//! scoped to the declared window and report `Unknown` rather than over-claim
//! when a potential differential leaves it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::FieldTag;
use crate::graded::GradedSpace;
use crate::matrix::Matrix;

/// One entry of a page: a dimension with optional provenance labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spot {
    pub dim: usize,
    pub labels: Vec<String>,
}

impl Spot {
    pub fn new(dim: usize) -> Self {
        Spot {
            dim,
            labels: Vec::new(),
        }
    }

    pub fn labeled(dim: usize, labels: Vec<String>) -> Self {
        Spot { dim, labels }
    }
}

/// A single page of a spectral sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    field: FieldTag,
    r: u32,
    entries: BTreeMap<(i64, i64), Spot>,
    col_min: i64,
    total_window: (i64, i64),
}

impl Page {
    pub fn new(
        field: FieldTag,
        r: u32,
        col_min: i64,
        total_window: (i64, i64),
        entries: BTreeMap<(i64, i64), Spot>,
    ) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("page index starts at 1".into()));
        }
        if col_min > 0 {
            return Err(Error::InvalidParameter("column window must reach p <= 0".into()));
        }
        if total_window.0 > total_window.1 {
            return Err(Error::InvalidParameter("empty total-degree window".into()));
        }
        let mut clean = BTreeMap::new();
        for ((p, q), spot) in entries {
            if spot.dim == 0 {
                continue;
            }
            if p > 0 {
                return Err(Error::InvalidParameter(format!(
                    "entry at ({p},{q}) violates the p <= 0 support"
                )));
            }
            if p < col_min || p + q < total_window.0 || p + q > total_window.1 {
                return Err(Error::InvalidParameter(format!(
                    "entry at ({p},{q}) lies outside the declared windows"
                )));
            }
            if !spot.labels.is_empty() && spot.labels.len() != spot.dim {
                return Err(Error::InvalidParameter(format!(
                    "spot ({p},{q}): {} labels for dimension {}",
                    spot.labels.len(),
                    spot.dim
                )));
            }
            clean.insert((p, q), spot);
        }
        Ok(Page {
            field,
            r,
            entries: clean,
            col_min,
            total_window,
        })
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn col_min(&self) -> i64 {
        self.col_min
    }

    pub fn total_window(&self) -> (i64, i64) {
        self.total_window
    }

    pub fn dim_at(&self, p: i64, q: i64) -> usize {
        self.entries.get(&(p, q)).map_or(0, |s| s.dim)
    }

    pub fn spot(&self, p: i64, q: i64) -> Option<&Spot> {
        self.entries.get(&(p, q))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(i64, i64), &Spot)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total dimension per total degree `p + q`.
    pub fn total_ranks(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (&(p, q), spot) in &self.entries {
            *out.entry(p + q).or_insert(0) += spot.dim;
        }
        out
    }

    /// The `p = 0` column as a graded space (degree = q = total degree).
    pub fn column_zero(&self) -> GradedSpace {
        let mut out = GradedSpace::zero(self.field, crate::graded::Grading::Integer);
        for (&(p, q), spot) in &self.entries {
            if p == 0 {
                out.add_degree(q, spot.dim, spot.labels.clone()).unwrap();
            }
        }
        out
    }

    /// Canonical text form: header then `spot p q dim [labels...]` records in
    /// lexicographic (p, q) order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "page {}", self.r);
        let _ = writeln!(out, "field {}", self.field);
        let _ = writeln!(out, "columns {} 0", self.col_min);
        let _ = writeln!(out, "totals {} {}", self.total_window.0, self.total_window.1);
        for (&(p, q), spot) in &self.entries {
            let _ = write!(out, "spot {p} {q} {}", spot.dim);
            for l in &spot.labels {
                let _ = write!(out, " {l}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Page> {
        let mut r = None;
        let mut field = None;
        let mut col_min = None;
        let mut totals = None;
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            match toks[0] {
                "page" => {
                    r = Some(
                        toks.get(1)
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| err("expected `page <r>`"))?,
                    )
                }
                "field" => {
                    field = Some(match toks.get(1) {
                        Some(&"q") => FieldTag::rationals(),
                        Some(&"fp") => FieldTag::prime(
                            toks.get(2)
                                .and_then(|s| s.parse().ok())
                                .ok_or_else(|| err("expected `fp <prime>`"))?,
                        )?,
                        _ => return Err(err("expected field `q` or `fp <p>`")),
                    })
                }
                "columns" => {
                    col_min = Some(
                        toks.get(1)
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| err("expected `columns <p_min> 0`"))?,
                    )
                }
                "totals" => {
                    let lo = toks
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err("bad totals"))?;
                    let hi = toks
                        .get(2)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err("bad totals"))?;
                    totals = Some((lo, hi));
                }
                "spot" => {
                    if toks.len() < 4 {
                        return Err(err("expected `spot <p> <q> <dim> [labels...]`"));
                    }
                    let p: i64 = toks[1].parse().map_err(|_| err("bad p"))?;
                    let q: i64 = toks[2].parse().map_err(|_| err("bad q"))?;
                    let dim: usize = toks[3].parse().map_err(|_| err("bad dim"))?;
                    let labels = toks[4..].iter().map(|s| s.to_string()).collect();
                    entries.insert((p, q), Spot::labeled(dim, labels));
                }
                other => return Err(err(&format!("unknown record `{other}`"))),
            }
        }
        Page::new(
            field.ok_or_else(|| Error::Parse("missing field".into()))?,
            r.ok_or_else(|| Error::Parse("missing page index".into()))?,
            col_min.ok_or_else(|| Error::Parse("missing columns".into()))?,
            totals.ok_or_else(|| Error::Parse("missing totals".into()))?,
            entries,
        )
    }
}

/// The page-`r` differential: per-spot matrix blocks of bidegree `(r, 1-r)`.
/// The block keyed at `(p, q)` maps the spot `(p, q)` into `(p+r, q-r+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Differential {
    r: u32,
    blocks: BTreeMap<(i64, i64), Matrix>,
}

impl Differential {
    pub fn new(r: u32, blocks: BTreeMap<(i64, i64), Matrix>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("differential index starts at 1".into()));
        }
        Ok(Differential { r, blocks })
    }

    pub fn zero(r: u32) -> Self {
        Differential {
            r,
            blocks: BTreeMap::new(),
        }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(i64, i64), &Matrix)> {
        self.blocks.iter()
    }

    fn target(&self, p: i64, q: i64) -> (i64, i64) {
        (p + self.r as i64, q - self.r as i64 + 1)
    }

    /// Block leaving the spot, materializing zeros from the page's dims.
    pub fn block_on(&self, page: &Page, p: i64, q: i64) -> Matrix {
        match self.blocks.get(&(p, q)) {
            Some(m) => m.clone(),
            None => {
                let (tp, tq) = self.target(p, q);
                Matrix::zeros(page.field(), page.dim_at(tp, tq), page.dim_at(p, q))
            }
        }
    }

    /// Shape and square-zero validation against a page.
    pub fn validate_on(&self, page: &Page) -> Result<()> {
        if self.r != page.r() {
            return Err(Error::ShapeMismatch(format!(
                "differential d_{} applied to page E_{}",
                self.r,
                page.r()
            )));
        }
        for (&(p, q), m) in &self.blocks {
            let (tp, tq) = self.target(p, q);
            let (rows, cols) = (page.dim_at(tp, tq), page.dim_at(p, q));
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "block at ({p},{q}): got {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    rows,
                    cols
                )));
            }
            if m.field() != page.field() {
                return Err(Error::FieldMismatch(
                    m.field().to_string(),
                    page.field().to_string(),
                ));
            }
            // spotwise square-zero where both blocks are present
            if let Some(next) = self.blocks.get(&(tp, tq)) {
                if !next.mul(m)?.is_zero() {
                    return Err(Error::InvalidParameter(format!(
                        "differential does not square to zero at ({p},{q})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Kernel-mod-image at every spot: the next page.
pub fn turn_page(page: &Page, d: &Differential) -> Result<Page> {
    d.validate_on(page)?;
    let r = d.r as i64;
    let mut entries = BTreeMap::new();
    for (&(p, q), spot) in &page.entries {
        let rank_out = d.block_on(page, p, q).rank();
        let rank_in = d.block_on(page, p - r, q + r - 1).rank();
        let dim = spot.dim - rank_out - rank_in;
        if dim == 0 {
            continue;
        }
        let labels = if rank_out == 0 && rank_in == 0 {
            spot.labels.clone()
        } else {
            (0..dim).map(|i| format!("e{}.{p}.{q}.{i}", page.r + 1)).collect()
        };
        entries.insert((p, q), Spot::labeled(dim, labels));
    }
    Page::new(
        page.field(),
        page.r + 1,
        page.col_min,
        page.total_window,
        entries,
    )
}

/// Verdict of a windowed degeneration check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegenerationVerdict {
    /// Every potential differential between declared spots vanishes for
    /// support reasons, from the given page index on.
    DegenerateInWindow,
    /// A nonzero entry maps outside the declared total window, so the check
    /// cannot certify anything; never a false certificate.
    Unknown { p: i64, q: i64, r: u32 },
    /// Two nonzero spots are connected by a potential differential.
    Counterexample { p: i64, q: i64, r: u32 },
}

/// Decide whether all differentials `d_r`, `r >= from_r`, between declared
/// spots must vanish for support reasons. Only finitely many `r` matter
/// because differentials move `from_r..=-p` columns to the right.
pub fn degeneration_check(page: &Page, from_r: u32) -> Result<DegenerationVerdict> {
    if from_r == 0 {
        return Err(Error::InvalidParameter("from_r starts at 1".into()));
    }
    let mut unknown: Option<DegenerationVerdict> = None;
    for (&(p, q), _spot) in &page.entries {
        for r in from_r as i64..=(-p) {
            let (tp, tq) = (p + r, q - r + 1);
            // target total is p + q + 1 regardless of r
            if p + q + 1 > page.total_window.1 {
                unknown.get_or_insert(DegenerationVerdict::Unknown {
                    p,
                    q,
                    r: r as u32,
                });
                continue;
            }
            if page.dim_at(tp, tq) > 0 {
                return Ok(DegenerationVerdict::Counterexample {
                    p,
                    q,
                    r: r as u32,
                });
            }
        }
    }
    Ok(unknown.unwrap_or(DegenerationVerdict::DegenerateInWindow))
}

/// A starting page together with the differentials d_1, d_2, ..., d_R.
#[derive(Debug, Clone)]
pub struct SpectralSystem {
    initial: Page,
    differentials: Vec<Differential>,
}

impl SpectralSystem {
    pub fn new(initial: Page, differentials: Vec<Differential>) -> Result<Self> {
        for (i, d) in differentials.iter().enumerate() {
            let want = initial.r() + i as u32;
            if d.r() != want {
                return Err(Error::ShapeMismatch(format!(
                    "differential {i} has index {} but the page sequence expects {want}",
                    d.r()
                )));
            }
        }
        Ok(SpectralSystem {
            initial,
            differentials,
        })
    }

    pub fn initial(&self) -> &Page {
        &self.initial
    }

    pub fn differentials(&self) -> &[Differential] {
        &self.differentials
    }

    /// Canonical text form: the initial page, then blocks in lexicographic
    /// (r, p, q) order as `diff r p q rows cols entries...`.
    pub fn to_text(&self) -> String {
        let mut out = self.initial.to_text();
        for d in &self.differentials {
            for (&(p, q), m) in &d.blocks {
                let _ = write!(out, "diff {} {p} {q} {} {}", d.r(), m.rows(), m.cols());
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let _ = write!(out, " {}", m.get(i, j));
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Outcome of running a system to its last listed page.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_page: Page,
    /// Degeneration certificate for the final page, checked from the first
    /// unlisted differential on.
    pub certificate: DegenerationVerdict,
}

/// Apply all listed differentials and certify (or refuse to certify) that the
/// result is final within the window.
pub fn run_pages(ss: &SpectralSystem) -> Result<RunResult> {
    let mut page = ss.initial.clone();
    for d in &ss.differentials {
        page = turn_page(&page, d)?;
    }
    let certificate = degeneration_check(&page, page.r())?;
    Ok(RunResult {
        final_page: page,
        certificate,
    })
}

/// Edge data of a run: the surviving `p = 0` column and its per-degree ranks.
/// The per-degree rank is the rank of the image of the classical map from
/// ordinary cohomology in the model.
#[derive(Debug, Clone)]
pub struct EdgeData {
    pub column: GradedSpace,
    pub ranks: BTreeMap<i64, usize>,
}

pub fn edge_data(ss: &SpectralSystem) -> Result<EdgeData> {
    let run = run_pages(ss)?;
    let column = run.final_page.column_zero();
    let mut ranks = BTreeMap::new();
    for (&(p, q), spot) in &run.final_page.entries {
        if p == 0 {
            ranks.insert(q, spot.dim);
        }
    }
    Ok(EdgeData { column, ranks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldTag {
        FieldTag::rationals()
    }

    fn page_from(dims: &[((i64, i64), usize)], col_min: i64, totals: (i64, i64)) -> Page {
        let entries = dims
            .iter()
            .map(|&(pq, dim)| (pq, Spot::new(dim)))
            .collect();
        Page::new(q(), 1, col_min, totals, entries).unwrap()
    }

    #[test]
    fn page_rejects_positive_columns_and_out_of_window_entries() {
        assert!(Page::new(
            q(),
            1,
            -2,
            (-5, 5),
            [((1i64, 0i64), Spot::new(1))].into_iter().collect()
        )
        .is_err());
        assert!(Page::new(
            q(),
            1,
            -2,
            (-5, 5),
            [((-3i64, 0i64), Spot::new(1))].into_iter().collect()
        )
        .is_err());
    }

    #[test]
    fn zero_differential_keeps_the_page() {
        let pg = page_from(&[((0, -3), 1), ((-1, -3), 2)], -2, (-10, 0));
        let next = turn_page(&pg, &Differential::zero(1)).unwrap();
        assert_eq!(next.dim_at(0, -3), 1);
        assert_eq!(next.dim_at(-1, -3), 2);
        assert_eq!(next.r(), 2);
    }

    #[test]
    fn rank_one_pairing_cancels_both_spots() {
        let pg = page_from(&[((-1, -3), 1), ((0, -3), 1)], -2, (-10, 0));
        let mut blocks = BTreeMap::new();
        blocks.insert((-1i64, -3i64), Matrix::from_rows(q(), &[vec![1]]).unwrap());
        let d = Differential::new(1, blocks).unwrap();
        let next = turn_page(&pg, &d).unwrap();
        assert!(next.is_empty());
    }

    #[test]
    fn bidegree_and_square_are_validated() {
        let pg = page_from(&[((-2, 0), 1), ((-1, 0), 1), ((0, 0), 1)], -3, (-4, 2));
        // d(-2,0) -> (-1,0), d(-1,0) -> (0,0); composite must vanish
        let one = Matrix::from_rows(q(), &[vec![1]]).unwrap();
        let mut blocks = BTreeMap::new();
        blocks.insert((-2i64, 0i64), one.clone());
        blocks.insert((-1i64, 0i64), one.clone());
        let d = Differential::new(1, blocks).unwrap();
        assert!(matches!(
            turn_page(&pg, &d),
            Err(Error::InvalidParameter(_))
        ));
        // wrong page index
        let d2 = Differential::zero(3);
        assert!(matches!(turn_page(&pg, &d2), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn turn_page_matches_rank_arithmetic_on_a_two_column_strip() {
        // spots of dims 3 and 2; the block at (-1,0) is dim(0,0) x dim(-1,0)
        let pg = page_from(&[((-1, 0), 3), ((0, 0), 2)], -2, (-4, 2));
        let block = Matrix::from_rows(q(), &[vec![1, 0, 1], vec![0, 0, 0]]).unwrap();
        let rank = block.rank();
        let mut blocks = BTreeMap::new();
        blocks.insert((-1i64, 0i64), block);
        let d = Differential::new(1, blocks).unwrap();
        let next = turn_page(&pg, &d).unwrap();
        assert_eq!(next.dim_at(-1, 0), 3 - rank);
        assert_eq!(next.dim_at(0, 0), 2 - rank);
    }

    #[test]
    fn degeneration_check_on_an_empty_page() {
        let pg = Page::new(q(), 1, -2, (-5, 5), BTreeMap::new()).unwrap();
        assert_eq!(
            degeneration_check(&pg, 1).unwrap(),
            DegenerationVerdict::DegenerateInWindow
        );
    }

    #[test]
    fn degeneration_check_finds_constructed_collisions() {
        // totals -3 and -2 in columns -3 and -1: a potential d_2
        let pg = page_from(&[((-3, 0), 1), ((-1, -1), 1)], -4, (-4, 0));
        match degeneration_check(&pg, 1).unwrap() {
            DegenerationVerdict::Counterexample { p, q, r } => {
                assert_eq!((p, q, r), (-3, 0, 2));
            }
            v => panic!("expected a counterexample, got {v:?}"),
        }
    }

    #[test]
    fn degeneration_check_reports_unknown_at_the_window_edge() {
        // a nonzero spot whose would-be target total leaves the window
        let pg = page_from(&[((-1, 0), 1)], -2, (-4, -1));
        assert!(matches!(
            degeneration_check(&pg, 1).unwrap(),
            DegenerationVerdict::Unknown { .. }
        ));
    }

    #[test]
    fn run_pages_without_differentials_returns_the_start() {
        let pg = page_from(&[((0, -1), 2)], -2, (-4, 0));
        let ss = SpectralSystem::new(pg.clone(), Vec::new()).unwrap();
        let run = run_pages(&ss).unwrap();
        assert_eq!(run.final_page, pg);
    }

    #[test]
    fn edge_data_of_a_no_differential_system_is_the_full_column() {
        let pg = page_from(&[((0, -1), 2), ((-1, 3), 1)], -2, (-4, 3));
        let ss = SpectralSystem::new(pg, Vec::new()).unwrap();
        let edge = edge_data(&ss).unwrap();
        assert_eq!(edge.column.dim_at(-1), 2);
        assert_eq!(edge.ranks.get(&-1), Some(&2));
        assert_eq!(edge.column.dim_at(3), 0);
    }

    #[test]
    fn page_serialization_round_trips() {
        let pg = page_from(&[((0, -1), 2), ((-1, 3), 1), ((-2, 0), 3)], -3, (-4, 3));
        let text = pg.to_text();
        let back = Page::from_text(&text).unwrap();
        assert_eq!(back, pg);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn turn_page_never_increases_dimensions_and_preserves_euler_sums() {
        for rank_flag in 0..2i64 {
            let pg = page_from(
                &[((-2, 1), 2), ((-1, 1), 2), ((-1, 0), 2), ((0, 0), 2)],
                -3,
                (-6, 4),
            );
            let m = Matrix::from_rows(q(), &[vec![rank_flag, 0], vec![0, 0]]).unwrap();
            let mut blocks = BTreeMap::new();
            blocks.insert((-1i64, 0i64), m);
            let d = Differential::new(1, blocks).unwrap();
            let next = turn_page(&pg, &d).unwrap();
            for (&(p, q), spot) in pg.entries() {
                assert!(next.dim_at(p, q) <= spot.dim);
            }
            let chi = |pg: &Page| -> i64 {
                pg.total_ranks()
                    .iter()
                    .map(|(&t, &d)| if t.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) })
                    .sum()
            };
            assert_eq!(chi(&pg), chi(&next));
        }
    }
}
