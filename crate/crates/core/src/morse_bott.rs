//! First pages for boundaries with a free circle action, their equivariant
//! and u-adic variants, and the four builtin worked cases with their known
//! differentials.
//!
//! The even index weight `mu` is caller data (it encodes the loop of
//! linearizations of the circle action in the symplectic group); it is never
//! derived from geometry here. The builtin cases hard-code the standard
//! values 2n, 2-4g, 2n-2 and 2.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::FieldTag;
use crate::graded::{GradedSpace, Grading};
use crate::matrix::Matrix;
use crate::spectral::{Differential, Page, SpectralSystem, Spot};

/// Topological input for the circle-action first page: half-dimension, index
/// weight, and the cohomologies of the filling, the boundary and (for the
/// equivariant page) the quotient of the boundary by the circle action.
#[derive(Debug, Clone)]
pub struct BoundaryModel {
    n: u32,
    mu: i64,
    h_m: GradedSpace,
    h_boundary: GradedSpace,
    h_quotient: Option<GradedSpace>,
}

impl BoundaryModel {
    pub fn new(
        n: u32,
        mu: i64,
        h_m: GradedSpace,
        h_boundary: GradedSpace,
        h_quotient: Option<GradedSpace>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("half-dimension must be >= 1".into()));
        }
        if mu % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "index weight must be even, got {mu}"
            )));
        }
        for (name, space, hi) in [
            ("filling cohomology", &h_m, 2 * n as i64),
            ("boundary cohomology", &h_boundary, 2 * n as i64 - 1),
        ] {
            if space.grading() != Grading::Integer || !space.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finitely supported and integer graded"
                )));
            }
            if space.field() != h_m.field() {
                return Err(Error::FieldMismatch(
                    space.field().to_string(),
                    h_m.field().to_string(),
                ));
            }
            let in_range = space.explicit_degrees().all(|d| (0..=hi).contains(&d));
            if !in_range {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be supported in [0, {hi}]"
                )));
            }
        }
        if let Some(qt) = &h_quotient {
            if qt.field() != h_m.field() || qt.grading() != Grading::Integer || !qt.is_finite() {
                return Err(Error::InvalidParameter(
                    "quotient cohomology must be a finite integer-graded space over the same field"
                        .into(),
                ));
            }
        }
        Ok(BoundaryModel {
            n,
            mu,
            h_m,
            h_boundary,
            h_quotient,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mu(&self) -> i64 {
        self.mu
    }

    pub fn h_m(&self) -> &GradedSpace {
        &self.h_m
    }

    pub fn h_boundary(&self) -> &GradedSpace {
        &self.h_boundary
    }

    pub fn h_quotient(&self) -> Option<&GradedSpace> {
        self.h_quotient.as_ref()
    }

    pub fn field(&self) -> FieldTag {
        self.h_m.field()
    }
}

/// Cohomology ranks of the unit tangent bundle of the n-sphere, `n >= 2`.
/// Frozen table; the long-exact-sequence derivation lives in the test suite.
pub fn unit_tangent_bundle_ranks(n: u32, field: FieldTag) -> Result<GradedSpace> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "unit tangent bundle table starts at n = 2; the circle case is the 1-torus".into(),
        ));
    }
    let n = n as i64;
    let euler_vanishes = n % 2 == 1 || field.characteristic() == 2;
    let degrees: Vec<(i64, usize)> = if euler_vanishes {
        vec![(0, 1), (n - 1, 1), (n, 1), (2 * n - 1, 1)]
    } else {
        vec![(0, 1), (2 * n - 1, 1)]
    };
    GradedSpace::from_dims(field, Grading::Integer, &degrees)
}

fn window_check(window: (i64, i64)) -> Result<()> {
    if window.0 > window.1 {
        return Err(Error::InvalidParameter("empty degree window".into()));
    }
    Ok(())
}

/// The circle-action first page: column `p = 0` holds the filling cohomology
/// shifted by n, column `p < 0` holds the boundary cohomology in degree
/// `p + q + n - p*mu`. Entries vanish for `p > 0` by construction.
pub fn e1_circle(bm: &BoundaryModel, col_min: i64, window: (i64, i64)) -> Result<Page> {
    window_check(window)?;
    if col_min > 0 {
        return Err(Error::InvalidParameter("column cutoff must be <= 0".into()));
    }
    let n = bm.n as i64;
    let mut entries = BTreeMap::new();
    for p in col_min..=0 {
        for t in window.0..=window.1 {
            let q = t - p;
            let (dim, labels) = if p == 0 {
                let deg = t + n;
                let dim = bm.h_m.dim_at(deg);
                let labels = (0..dim).map(|i| format!("m.d{deg}.{i}")).collect();
                (dim, labels)
            } else {
                let deg = t + n - p * bm.mu;
                let dim = bm.h_boundary.dim_at(deg);
                let labels = (0..dim).map(|i| format!("x{}.d{deg}.{i}", -p)).collect();
                (dim, labels)
            };
            if dim > 0 {
                entries.insert((p, q), Spot::labeled(dim, labels));
            }
        }
    }
    Page::new(bm.field(), 1, col_min, window, entries)
}

/// The equivariant first page. Column `p = 0` holds the filling cohomology
/// with coefficients expanded by the degree-2 formal variable (one class in
/// degree d spawns classes in degrees d, d-2, d-4, ... down the window);
/// columns `p < 0` hold the quotient cohomology in degree `p+q+n-1-p*mu`.
pub fn e1_equivariant(bm: &BoundaryModel, col_min: i64, window: (i64, i64)) -> Result<Page> {
    window_check(window)?;
    let quotient = bm.h_quotient().ok_or_else(|| {
        Error::InvalidParameter("equivariant page needs the quotient cohomology".into())
    })?;
    if bm.field().characteristic() != 0 {
        return Err(Error::InvalidParameter(
            "equivariant page needs a characteristic-zero field".into(),
        ));
    }
    let n = bm.n as i64;
    let mut entries = BTreeMap::new();
    for p in col_min..=0 {
        for t in window.0..=window.1 {
            let q = t - p;
            if p == 0 {
                // tower expansion: dim in degree q+n over the expanded
                // coefficients is the sum of the plain dims in q+n+2j, j >= 0
                let base = t + n;
                let mut labels = Vec::new();
                let top = bm.h_m.support_max().unwrap_or(0);
                let mut j = 0i64;
                while base + 2 * j <= top {
                    let deg = base + 2 * j;
                    for i in 0..bm.h_m.dim_at(deg) {
                        labels.push(format!("h{deg}.u{j}.{i}"));
                    }
                    j += 1;
                }
                if !labels.is_empty() {
                    let dim = labels.len();
                    entries.insert((p, q), Spot::labeled(dim, labels));
                }
            } else {
                let deg = t + n - 1 - p * bm.mu;
                let dim = quotient.dim_at(deg);
                if dim > 0 {
                    let labels = (0..dim).map(|i| format!("y{}.d{deg}.{i}", -p)).collect();
                    entries.insert((p, q), Spot::labeled(dim, labels));
                }
            }
        }
    }
    Page::new(bm.field(), 1, col_min, window, entries)
}

/// The u-adic first page of an already-computed invariant: `E_1^{p,q}` is the
/// value in degree `q - p` for `p <= 0`. The first differential (the loop
/// rotation operator) is caller data, never guessed.
pub fn e1_u_adic(sh: &GradedSpace, col_min: i64, window: (i64, i64)) -> Result<Page> {
    window_check(window)?;
    if sh.grading() != Grading::Integer {
        return Err(Error::GradingMismatch("z".into(), sh.grading().to_string()));
    }
    let mut entries = BTreeMap::new();
    for p in col_min..=0 {
        for t in window.0..=window.1 {
            let q = t - p;
            let dim = sh.dim_at(q - p);
            if dim > 0 {
                let labels = (0..dim)
                    .map(|i| format!("s{}.d{}.{i}", -p, q - p))
                    .collect();
                entries.insert((p, q), Spot::labeled(dim, labels));
            }
        }
    }
    Page::new(sh.field(), 1, col_min, window, entries)
}

/// Smallest column cutoff whose columns can still meet the degree window.
/// Fails when the index weight vanishes (every column then repeats the same
/// totals and no finite cutoff is canonical).
pub fn suggest_col_min(bm: &BoundaryModel, window: (i64, i64)) -> Result<i64> {
    window_check(window)?;
    if bm.mu == 0 {
        return Err(Error::InvalidParameter(
            "column cutoff required when the index weight vanishes".into(),
        ));
    }
    let n = bm.n as i64;
    let lo_deg = bm.h_boundary.support_min().unwrap_or(0);
    let hi_deg = bm.h_boundary.support_max().unwrap_or(0);
    let mut p = -1i64;
    let mut last_contributing = 0i64;
    while p > -100_000 {
        // column p holds totals t = deg - n + p*mu for deg in the boundary support
        let t_lo = lo_deg - n + p * bm.mu;
        let t_hi = hi_deg - n + p * bm.mu;
        let intersects = t_lo <= window.1 && t_hi >= window.0;
        if intersects {
            last_contributing = p;
        } else {
            // once columns move monotonically past the window, stop
            let past = if bm.mu > 0 {
                t_hi < window.0
            } else {
                t_lo > window.1
            };
            if past {
                break;
            }
        }
        p -= 1;
    }
    Ok(last_contributing.min(-1))
}

// ---------------------------------------------------------------------------
// Builtin worked cases
// ---------------------------------------------------------------------------

/// The four builtin cases. Their names are stable CLI identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinCase {
    Ball(u32),
    Surface(u32),
    TStarSphere(u32),
    S2Equivariant,
}

impl fmt::Display for BuiltinCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinCase::Ball(n) => write!(f, "ball({n})"),
            BuiltinCase::Surface(g) => write!(f, "surface({g})"),
            BuiltinCase::TStarSphere(n) => write!(f, "tstar_sphere({n})"),
            BuiltinCase::S2Equivariant => write!(f, "s2_equivariant"),
        }
    }
}

impl FromStr for BuiltinCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "s2_equivariant" {
            return Ok(BuiltinCase::S2Equivariant);
        }
        let parse_arg = |name: &str| -> Option<u32> {
            s.strip_prefix(name)?
                .strip_prefix('(')?
                .strip_suffix(')')?
                .parse()
                .ok()
        };
        if let Some(n) = parse_arg("ball") {
            return Ok(BuiltinCase::Ball(n));
        }
        if let Some(g) = parse_arg("surface") {
            return Ok(BuiltinCase::Surface(g));
        }
        if let Some(n) = parse_arg("tstar_sphere") {
            return Ok(BuiltinCase::TStarSphere(n));
        }
        Err(Error::Parse(format!(
            "unknown case `{s}`; expected ball(N), surface(G), tstar_sphere(N) or s2_equivariant"
        )))
    }
}

/// Boundary model for a builtin case, over the rationals.
pub fn boundary_model(case: BuiltinCase) -> Result<BoundaryModel> {
    let q = FieldTag::rationals();
    match case {
        BuiltinCase::Ball(n) => {
            if n == 0 {
                return Err(Error::InvalidParameter("ball needs n >= 1".into()));
            }
            let h_m = GradedSpace::point(q);
            let h_boundary =
                GradedSpace::from_dims(q, Grading::Integer, &[(0, 1), (2 * n as i64 - 1, 1)])?;
            BoundaryModel::new(n, 2 * n as i64, h_m, h_boundary, None)
        }
        BuiltinCase::Surface(g) => {
            if g == 0 {
                return Err(Error::InvalidParameter("surface needs genus g >= 1".into()));
            }
            let h_m = GradedSpace::from_dims(q, Grading::Integer, &[(0, 1), (1, 2 * g as usize)])?;
            let h_boundary = GradedSpace::from_dims(q, Grading::Integer, &[(0, 1), (1, 1)])?;
            BoundaryModel::new(1, 2 - 4 * g as i64, h_m, h_boundary, None)
        }
        BuiltinCase::TStarSphere(n) => {
            if n < 2 {
                return Err(Error::InvalidParameter(
                    "tstar_sphere needs n >= 2; n = 1 is the 1-torus".into(),
                ));
            }
            let h_m = GradedSpace::from_dims(q, Grading::Integer, &[(0, 1), (n as i64, 1)])?;
            let h_boundary = unit_tangent_bundle_ranks(n, q)?;
            BoundaryModel::new(n, 2 * n as i64 - 2, h_m, h_boundary, None)
        }
        BuiltinCase::S2Equivariant => {
            let sphere = GradedSpace::from_dims(q, Grading::Integer, &[(0, 1), (2, 1)])?;
            BoundaryModel::new(2, 2, sphere.clone(), sphere.clone(), Some(sphere))
        }
    }
}

/// Default total-degree window for a builtin case.
pub fn default_window(case: BuiltinCase) -> (i64, i64) {
    match case {
        BuiltinCase::Ball(n) => (-(10 * n as i64) - 2, 0),
        BuiltinCase::Surface(g) => (-1, 8 * g as i64 - 2),
        BuiltinCase::TStarSphere(_) => (-70, 1),
        BuiltinCase::S2Equivariant => (-27, 1),
    }
}

/// Build the first page and the case's known differentials.
///
/// * ball(n): rank-1 first differentials pairing the head of each column with
///   the tail of the next one; they cancel everything.
/// * surface(g), tstar_sphere(n): no differentials.
/// * s2_equivariant: one rank-1 `d_r` from `(-r, -r-1)` into `(0, -2r)` for
///   every page, hitting the top-degree class of the coefficient tower.
pub fn builtin_case(
    case: BuiltinCase,
    col_min: Option<i64>,
    window: Option<(i64, i64)>,
) -> Result<SpectralSystem> {
    let bm = boundary_model(case)?;
    let mut window = window.unwrap_or_else(|| default_window(case));
    match case {
        BuiltinCase::Ball(n) => {
            // complete any generator pair cut by the lower window edge, so the
            // built first differential stays a global isomorphism
            let n = n as i64;
            let mut k = 0i64;
            loop {
                let low = -n - 2 * n * k;
                if low < window.0 {
                    break;
                }
                if low - 1 < window.0 {
                    window.0 = low - 1;
                    break;
                }
                k += 1;
            }
            let col_min = match col_min {
                Some(c) => c,
                None => suggest_col_min(&bm, window)?,
            };
            let page = e1_circle(&bm, col_min, window)?;
            let one = Matrix::from_rows(bm.field(), &[vec![1]])?;
            let mut blocks = BTreeMap::new();
            for k in 0..=(-col_min) {
                // source: column -(k+1), total -n-2nk-1; target: column -k
                let (sp, st) = (-(k + 1), -n - 2 * n * k - 1);
                let (tp, tt) = (-k, -n - 2 * n * k);
                let source = (sp, st - sp);
                let target = (tp, tt - tp);
                if page.dim_at(source.0, source.1) == 1 && page.dim_at(target.0, target.1) == 1 {
                    blocks.insert(source, one.clone());
                }
            }
            let d1 = Differential::new(1, blocks)?;
            SpectralSystem::new(page, vec![d1])
        }
        BuiltinCase::Surface(_) | BuiltinCase::TStarSphere(_) => {
            let col_min = match col_min {
                Some(c) => c,
                None => suggest_col_min(&bm, window)?,
            };
            let page = e1_circle(&bm, col_min, window)?;
            SpectralSystem::new(page, Vec::new())
        }
        BuiltinCase::S2Equivariant => {
            // an odd lower edge keeps every source/target pair complete
            if window.0 % 2 == 0 {
                window.0 -= 1;
            }
            let r_max = ((-window.0 - 1) / 2).max(0) as u32;
            let col_min = col_min.unwrap_or(-(r_max as i64) - 1);
            let page = e1_equivariant(&bm, col_min, window)?;
            let mut diffs = Vec::new();
            for r in 1..=r_max {
                let source = (-(r as i64), -(r as i64) - 1);
                let target_q = -2 * r as i64;
                let mut blocks = BTreeMap::new();
                if page.dim_at(source.0, source.1) == 1 {
                    let tdim = page.dim_at(0, target_q);
                    if tdim > 0 {
                        // hit the top-degree base class; the bottom tower class
                        // carries the surviving copy of the coefficient module
                        let mut m = Matrix::zeros(bm.field(), tdim, 1);
                        m.set(tdim - 1, 0, bm.field().one());
                        blocks.insert(source, m);
                    }
                }
                diffs.push(Differential::new(r, blocks)?);
            }
            SpectralSystem::new(page, diffs)
        }
    }
}

/// True when the surviving `p = 0` column is a single coefficient tower on
/// the inspected range: rank one in degree 0 and every even degree in
/// `[q_lo, 0)`, rank zero in odd degrees. This is the windowed stand-in for
/// "free of torsion over the degree-2 variable, of rank one".
pub fn column_is_single_tower(page: &Page, q_lo: i64) -> bool {
    (q_lo..=0).all(|q| {
        let want = if q.rem_euclid(2) == 0 { 1 } else { 0 };
        page.dim_at(0, q) == want
    })
}
