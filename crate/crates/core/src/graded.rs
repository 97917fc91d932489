//! Graded vector spaces over exact fields, homogeneous maps between them, and
//! the homological operations built on top: homology of a two-step complex,
//! degree shifts, sums, tensor products and limits of directed systems.
//!
//! A [`GradedSpace`] is a finite map `degree -> dimension` plus an optional
//! *tail rule*: a finite union of arithmetic progressions with constant
//! per-degree rank, which is how the infinitely supported answers of the
//! theory (loop-space homology, circle-column tails) are represented exactly.
//!
//! Basis labels carry provenance (orbit ids and the like) but never affect
//! equality, which is dimension-wise throughout.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldTag;
use crate::matrix::Matrix;

/// Grading group of a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    /// Integer grading.
    Integer,
    /// Z/2 grading; support is normalized to degrees {0, 1}.
    Mod2,
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grading::Integer => write!(f, "z"),
            Grading::Mod2 => write!(f, "z2"),
        }
    }
}

/// One arithmetic progression of a tail rule: degrees `first + k * step` for
/// all integers `k >= 0`, each carrying `dim` extra dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Progression {
    pub first: i64,
    pub step: i64,
    pub dim: usize,
}

impl Progression {
    pub fn contains(&self, degree: i64) -> bool {
        let delta = degree - self.first;
        delta % self.step == 0 && delta / self.step >= 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct DegreeEntry {
    dim: usize,
    /// Either empty or exactly `dim` distinct whitespace-free labels.
    labels: Vec<String>,
}

/// A graded vector space with finite explicit support plus an optional
/// arithmetic-progression tail.
#[derive(Debug, Clone)]
pub struct GradedSpace {
    field: FieldTag,
    grading: Grading,
    dims: BTreeMap<i64, DegreeEntry>,
    tail: Vec<Progression>,
}

fn validate_labels(dim: usize, labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Ok(());
    }
    if labels.len() != dim {
        return Err(Error::InvalidParameter(format!(
            "{} labels for dimension {dim}",
            labels.len()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for l in labels {
        if l.is_empty() || l.chars().any(char::is_whitespace) {
            return Err(Error::InvalidParameter(format!("bad label `{l}`")));
        }
        if !seen.insert(l) {
            return Err(Error::InvalidParameter(format!("duplicate label `{l}`")));
        }
    }
    Ok(())
}

impl GradedSpace {
    pub fn zero(field: FieldTag, grading: Grading) -> Self {
        GradedSpace {
            field,
            grading,
            dims: BTreeMap::new(),
            tail: Vec::new(),
        }
    }

    /// Finitely supported space from `(degree, dimension)` pairs.
    pub fn from_dims(field: FieldTag, grading: Grading, dims: &[(i64, usize)]) -> Result<Self> {
        let mut space = GradedSpace::zero(field, grading);
        for &(d, n) in dims {
            space.add_degree(d, n, Vec::new())?;
        }
        Ok(space)
    }

    /// The one-dimensional space in degree zero over the rationals.
    pub fn point(field: FieldTag) -> Self {
        GradedSpace::from_dims(field, Grading::Integer, &[(0, 1)]).unwrap()
    }

    /// Add dimensions (and optional labels) at a degree. Existing dimensions
    /// at the same degree are summed; labels are concatenated and
    /// disambiguated if they collide.
    pub fn add_degree(&mut self, degree: i64, dim: usize, labels: Vec<String>) -> Result<()> {
        if dim == 0 {
            return Ok(());
        }
        let degree = self.normalize_degree(degree)?;
        validate_labels(dim, &labels)?;
        match self.dims.get_mut(&degree) {
            None => {
                self.dims.insert(degree, DegreeEntry { dim, labels });
            }
            Some(entry) => {
                let had_labels = !entry.labels.is_empty();
                let adds_labels = !labels.is_empty();
                if had_labels || adds_labels {
                    let mut merged = if had_labels {
                        entry.labels.clone()
                    } else {
                        (0..entry.dim).map(|i| format!("b{degree}.{i}")).collect()
                    };
                    let incoming: Vec<String> = if adds_labels {
                        labels
                    } else {
                        (0..dim).map(|i| format!("b{degree}.{}", entry.dim + i)).collect()
                    };
                    for l in incoming {
                        let mut candidate = l;
                        while merged.contains(&candidate) {
                            candidate.push('\'');
                        }
                        merged.push(candidate);
                    }
                    entry.labels = merged;
                }
                entry.dim += dim;
            }
        }
        Ok(())
    }

    fn normalize_degree(&self, degree: i64) -> Result<i64> {
        match self.grading {
            Grading::Integer => Ok(degree),
            Grading::Mod2 => Ok(degree.rem_euclid(2)),
        }
    }

    /// Attach a tail progression. Rejected for Z/2-graded spaces.
    pub fn add_progression(&mut self, p: Progression) -> Result<()> {
        if self.grading == Grading::Mod2 {
            return Err(Error::InvalidParameter(
                "tail rules require an integer grading".into(),
            ));
        }
        if p.step == 0 {
            return Err(Error::InvalidParameter("progression step is zero".into()));
        }
        if p.dim == 0 {
            return Ok(());
        }
        self.tail.push(p);
        self.tail.sort_by_key(|p| (p.first, p.step, p.dim));
        Ok(())
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn dim_at(&self, degree: i64) -> usize {
        let degree = match self.grading {
            Grading::Integer => degree,
            Grading::Mod2 => degree.rem_euclid(2),
        };
        let explicit = self.dims.get(&degree).map_or(0, |e| e.dim);
        let tail: usize = self
            .tail
            .iter()
            .filter(|p| p.contains(degree))
            .map(|p| p.dim)
            .sum();
        explicit + tail
    }

    pub fn labels_at(&self, degree: i64) -> &[String] {
        self.dims.get(&degree).map_or(&[], |e| &e.labels)
    }

    /// Explicit degrees with nonzero dimension (tail rules not included).
    pub fn explicit_degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.dims.keys().copied()
    }

    pub fn progressions(&self) -> &[Progression] {
        &self.tail
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty() && self.tail.is_empty()
    }

    /// Total dimension; `None` when a tail rule makes it infinite.
    pub fn total_dim(&self) -> Option<usize> {
        if !self.tail.is_empty() {
            return None;
        }
        Some(self.dims.values().map(|e| e.dim).sum())
    }

    /// Largest supported degree, `None` if unbounded above.
    pub fn support_max(&self) -> Option<i64> {
        if self.tail.iter().any(|p| p.step > 0) {
            return None;
        }
        let explicit = self.dims.keys().next_back().copied();
        let tails = self.tail.iter().map(|p| p.first).max();
        match (explicit, tails) {
            (None, None) => Some(i64::MIN), // empty; callers check is_zero first
            (a, b) => Some(a.unwrap_or(i64::MIN).max(b.unwrap_or(i64::MIN))),
        }
    }

    /// Smallest supported degree, `None` if unbounded below.
    pub fn support_min(&self) -> Option<i64> {
        if self.tail.iter().any(|p| p.step < 0) {
            return None;
        }
        let explicit = self.dims.keys().next().copied();
        let tails = self.tail.iter().map(|p| p.first).min();
        match (explicit, tails) {
            (None, None) => Some(i64::MAX),
            (a, b) => Some(a.unwrap_or(i64::MAX).min(b.unwrap_or(i64::MAX))),
        }
    }

    /// Dimensions over a closed degree window, tails included.
    pub fn poincare_window(&self, lo: i64, hi: i64) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for d in lo..=hi {
            let n = self.dim_at(d);
            if n > 0 {
                out.insert(d, n);
            }
        }
        out
    }

    pub fn dims_equal_on(&self, other: &GradedSpace, lo: i64, hi: i64) -> bool {
        (lo..=hi).all(|d| self.dim_at(d) == other.dim_at(d))
    }

    /// Degreewise scaling: every dimension multiplied by `factor`. Labels are
    /// dropped (the result is a plain dimension pattern).
    pub fn scaled(&self, factor: usize) -> GradedSpace {
        let mut out = GradedSpace::zero(self.field, self.grading);
        if factor == 0 {
            return out;
        }
        for (&d, entry) in &self.dims {
            out.add_degree(d, entry.dim * factor, Vec::new()).unwrap();
        }
        for p in &self.tail {
            out.add_progression(Progression {
                dim: p.dim * factor,
                ..p.clone()
            })
            .unwrap();
        }
        out
    }

    fn normalized_tail(&self) -> Vec<Progression> {
        let mut grouped: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for p in &self.tail {
            *grouped.entry((p.first, p.step)).or_insert(0) += p.dim;
        }
        grouped
            .into_iter()
            .map(|((first, step), dim)| Progression { first, step, dim })
            .collect()
    }
}

/// Equality is dimension-wise: labels never matter. Tail rules are compared
/// after normalization (same-progression merging).
impl PartialEq for GradedSpace {
    fn eq(&self, other: &Self) -> bool {
        if self.field != other.field || self.grading != other.grading {
            return false;
        }
        let dims_a: BTreeMap<i64, usize> = self.dims.iter().map(|(&d, e)| (d, e.dim)).collect();
        let dims_b: BTreeMap<i64, usize> = other.dims.iter().map(|(&d, e)| (d, e.dim)).collect();
        dims_a == dims_b && self.normalized_tail() == other.normalized_tail()
    }
}

impl Eq for GradedSpace {}

// ---------------------------------------------------------------------------
// Text serialization
// ---------------------------------------------------------------------------

impl GradedSpace {
    /// Canonical structured-text form. `from_text(to_text(v)) == v` and
    /// `to_text` is byte-deterministic.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("field {}\n", self.field));
        out.push_str(&format!("grading {}\n", self.grading));
        for (d, entry) in &self.dims {
            out.push_str(&format!("deg {} {}", d, entry.dim));
            for l in &entry.labels {
                out.push(' ');
                out.push_str(l);
            }
            out.push('\n');
        }
        for p in &self.tail {
            out.push_str(&format!("tail {} {} {}\n", p.first, p.step, p.dim));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<GradedSpace> {
        let mut field: Option<FieldTag> = None;
        let mut grading: Option<Grading> = None;
        let mut space: Option<GradedSpace> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            match toks[0] {
                "field" => {
                    field = Some(match toks.get(1) {
                        Some(&"q") => FieldTag::rationals(),
                        Some(&"fp") => {
                            let p = toks
                                .get(2)
                                .and_then(|s| s.parse().ok())
                                .ok_or_else(|| err("expected `fp <prime>`"))?;
                            FieldTag::prime(p)?
                        }
                        _ => return Err(err("expected `q` or `fp <prime>`")),
                    });
                }
                "grading" => {
                    grading = Some(match toks.get(1) {
                        Some(&"z") => Grading::Integer,
                        Some(&"z2") => Grading::Mod2,
                        _ => return Err(err("expected `z` or `z2`")),
                    });
                }
                "deg" => {
                    let sp = space.get_or_insert_with(|| {
                        GradedSpace::zero(
                            field.unwrap_or(FieldTag::Rationals),
                            grading.unwrap_or(Grading::Integer),
                        )
                    });
                    if toks.len() < 3 {
                        return Err(err("expected `deg <degree> <dim> [labels...]`"));
                    }
                    let d: i64 = toks[1].parse().map_err(|_| err("bad degree"))?;
                    let n: usize = toks[2].parse().map_err(|_| err("bad dimension"))?;
                    if n == 0 {
                        return Err(err("explicit dimensions must be positive"));
                    }
                    let labels = toks[3..].iter().map(|s| s.to_string()).collect();
                    sp.add_degree(d, n, labels)?;
                }
                "tail" => {
                    let sp = space.get_or_insert_with(|| {
                        GradedSpace::zero(
                            field.unwrap_or(FieldTag::Rationals),
                            grading.unwrap_or(Grading::Integer),
                        )
                    });
                    if toks.len() != 4 {
                        return Err(err("expected `tail <first> <step> <dim>`"));
                    }
                    let first: i64 = toks[1].parse().map_err(|_| err("bad first"))?;
                    let step: i64 = toks[2].parse().map_err(|_| err("bad step"))?;
                    let dim: usize = toks[3].parse().map_err(|_| err("bad dim"))?;
                    sp.add_progression(Progression { first, step, dim })?;
                }
                other => return Err(err(&format!("unknown record `{other}`"))),
            }
        }
        let field = field.ok_or_else(|| Error::Parse("missing field header".into()))?;
        let grading = grading.ok_or_else(|| Error::Parse("missing grading header".into()))?;
        Ok(space.unwrap_or_else(|| GradedSpace::zero(field, grading)))
    }
}

// ---------------------------------------------------------------------------
// Graded maps
// ---------------------------------------------------------------------------

/// A homogeneous map of graded spaces: per-degree exact matrix blocks, all of
/// the same degree shift. The block at source degree `d` maps into target
/// degree `d + shift`; missing blocks are zero. Only finitely supported
/// source and target spaces are supported.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedMap {
    source: GradedSpace,
    target: GradedSpace,
    shift: i64,
    blocks: BTreeMap<i64, Matrix>,
}

impl GradedMap {
    pub fn new(
        source: GradedSpace,
        target: GradedSpace,
        shift: i64,
        blocks: BTreeMap<i64, Matrix>,
    ) -> Result<Self> {
        if source.field() != target.field() {
            return Err(Error::FieldMismatch(
                source.field().to_string(),
                target.field().to_string(),
            ));
        }
        if source.grading() != target.grading() {
            return Err(Error::GradingMismatch(
                source.grading().to_string(),
                target.grading().to_string(),
            ));
        }
        if !source.is_finite() || !target.is_finite() {
            return Err(Error::WindowRequired(
                "graded maps are only supported on finitely supported spaces".into(),
            ));
        }
        for (&d, m) in &blocks {
            if m.field() != source.field() {
                return Err(Error::FieldMismatch(
                    m.field().to_string(),
                    source.field().to_string(),
                ));
            }
            let (want_rows, want_cols) = (target.dim_at(d + shift), source.dim_at(d));
            if m.rows() != want_rows || m.cols() != want_cols {
                return Err(Error::ShapeMismatch(format!(
                    "block at degree {d}: got {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    want_rows,
                    want_cols
                )));
            }
        }
        Ok(GradedMap {
            source,
            target,
            shift,
            blocks,
        })
    }

    pub fn zero(source: GradedSpace, target: GradedSpace, shift: i64) -> Result<Self> {
        GradedMap::new(source, target, shift, BTreeMap::new())
    }

    pub fn identity(space: &GradedSpace) -> Result<Self> {
        let field = space.field();
        let mut blocks = BTreeMap::new();
        for d in space.explicit_degrees() {
            blocks.insert(d, Matrix::identity(field, space.dim_at(d)));
        }
        GradedMap::new(space.clone(), space.clone(), 0, blocks)
    }

    pub fn source(&self) -> &GradedSpace {
        &self.source
    }

    pub fn target(&self) -> &GradedSpace {
        &self.target
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Block at the given source degree, materializing zeros on demand.
    pub fn block(&self, d: i64) -> Matrix {
        self.blocks.get(&d).cloned().unwrap_or_else(|| {
            Matrix::zeros(
                self.source.field(),
                self.target.dim_at(d + self.shift),
                self.source.dim_at(d),
            )
        })
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }

    /// Composite `self . other` (apply `other` first). Shifts add.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap> {
        if self.source != other.target {
            return Err(Error::ShapeMismatch(
                "composition: inner target differs from outer source".into(),
            ));
        }
        let shift = self.shift + other.shift;
        let mut blocks = BTreeMap::new();
        for d in other.source.explicit_degrees() {
            let first = other.block(d);
            let second = self.block(d + other.shift);
            let prod = second.mul(&first)?;
            if !prod.is_zero() {
                blocks.insert(d, prod);
            }
        }
        GradedMap::new(other.source.clone(), self.target.clone(), shift, blocks)
    }

    /// Rank of the block landing at the given source degree.
    pub fn rank_at(&self, source_degree: i64) -> usize {
        self.block(source_degree).rank()
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Cohomology of the two-step complex `U -d_in-> V -d_out-> W` at `V`:
/// per degree, `dim ker(d_out) - rank(d_in)`. Fails unless the maps compose
/// to zero.
pub fn homology(d_in: &GradedMap, d_out: &GradedMap) -> Result<GradedSpace> {
    if d_in.target() != d_out.source() {
        return Err(Error::ShapeMismatch(
            "homology: target of d_in differs from source of d_out".into(),
        ));
    }
    let composite = d_out.compose(d_in)?;
    for d in composite.source().explicit_degrees() {
        if !composite.block(d).is_zero() {
            return Err(Error::NotAComplex { degree: d });
        }
    }
    let v = d_in.target();
    let mut out = GradedSpace::zero(v.field(), v.grading());
    for d in v.explicit_degrees() {
        let dim_v = v.dim_at(d);
        let rank_out = d_out.rank_at(d);
        let rank_in = d_in.rank_at(d - d_in.shift());
        let h = dim_v - rank_out - rank_in;
        let labels = (0..h).map(|i| format!("h{d}.{i}")).collect();
        out.add_degree(d, h, labels)?;
    }
    Ok(out)
}

/// Degree shift. "Shifted up by `s`" places a degree-0 class in degree `s`.
/// On Z/2-graded spaces an odd shift flips parity and an even shift is the
/// identity; this never fails.
pub fn shift(v: &GradedSpace, s: i64) -> GradedSpace {
    let mut out = GradedSpace::zero(v.field(), v.grading());
    for d in v.explicit_degrees() {
        out.add_degree(d + s, v.dim_at_explicit(d), v.labels_at(d).to_vec())
            .unwrap();
    }
    for p in v.progressions() {
        out.add_progression(Progression {
            first: p.first + s,
            step: p.step,
            dim: p.dim,
        })
        .unwrap();
    }
    out
}

impl GradedSpace {
    fn dim_at_explicit(&self, degree: i64) -> usize {
        self.dims.get(&degree).map_or(0, |e| e.dim)
    }
}

/// Degreewise direct sum. Poincare series add.
pub fn direct_sum(v: &GradedSpace, w: &GradedSpace) -> Result<GradedSpace> {
    if v.field() != w.field() {
        return Err(Error::FieldMismatch(
            v.field().to_string(),
            w.field().to_string(),
        ));
    }
    if v.grading() != w.grading() {
        return Err(Error::GradingMismatch(
            v.grading().to_string(),
            w.grading().to_string(),
        ));
    }
    let mut out = v.clone();
    for d in w.explicit_degrees() {
        out.add_degree(d, w.dim_at_explicit(d), w.labels_at(d).to_vec())?;
    }
    for p in w.progressions() {
        out.add_progression(p.clone())?;
    }
    Ok(out)
}

/// Degreewise convolution. Poincare series multiply. When both factors carry
/// tail rules the result is not finitely describable and a window is
/// required; see [`tensor_product_window`].
pub fn tensor_product(v: &GradedSpace, w: &GradedSpace) -> Result<GradedSpace> {
    tensor_preconditions(v, w)?;
    if !v.is_finite() && !w.is_finite() {
        return Err(Error::WindowRequired(
            "tensor product of two tailed spaces; use tensor_product_window".into(),
        ));
    }
    // make v the finite factor
    let (fin, other) = if v.is_finite() { (v, w) } else { (w, v) };
    let mut out = GradedSpace::zero(v.field(), Grading::Integer);
    for a in fin.explicit_degrees() {
        let da = fin.dim_at_explicit(a);
        for b in other.explicit_degrees() {
            out.add_degree(a + b, da * other.dim_at_explicit(b), Vec::new())?;
        }
        for p in other.progressions() {
            out.add_progression(Progression {
                first: p.first + a,
                step: p.step,
                dim: p.dim * da,
            })?;
        }
    }
    Ok(out)
}

/// Tensor product evaluated on a closed degree window. Works for any pair of
/// tail rules whose convolution is degreewise finite.
pub fn tensor_product_window(
    v: &GradedSpace,
    w: &GradedSpace,
    lo: i64,
    hi: i64,
) -> Result<GradedSpace> {
    tensor_preconditions(v, w)?;
    if v.is_zero() || w.is_zero() {
        return Ok(GradedSpace::zero(v.field(), Grading::Integer));
    }
    // per-degree sums must range over a finite index set
    let range = if let (Some(va), Some(wa)) = (v.support_max(), w.support_max()) {
        RangeKind::BoundedAbove(va, wa)
    } else if let (Some(vi), Some(wi)) = (v.support_min(), w.support_min()) {
        RangeKind::BoundedBelow(vi, wi)
    } else {
        return Err(Error::InvalidParameter(
            "tensor product has infinite rank in some degree".into(),
        ));
    };
    let mut out = GradedSpace::zero(v.field(), Grading::Integer);
    for d in lo..=hi {
        let (a_lo, a_hi) = match range {
            RangeKind::BoundedAbove(va, wa) => (d - wa, va),
            RangeKind::BoundedBelow(vi, wi) => (vi, d - wi),
        };
        let mut dim = 0usize;
        for a in a_lo..=a_hi {
            dim += v.dim_at(a) * w.dim_at(d - a);
        }
        out.add_degree(d, dim, Vec::new())?;
    }
    Ok(out)
}

enum RangeKind {
    BoundedAbove(i64, i64),
    BoundedBelow(i64, i64),
}

fn tensor_preconditions(v: &GradedSpace, w: &GradedSpace) -> Result<()> {
    if v.field() != w.field() {
        return Err(Error::FieldMismatch(
            v.field().to_string(),
            w.field().to_string(),
        ));
    }
    if v.grading() != Grading::Integer || w.grading() != Grading::Integer {
        return Err(Error::GradingMismatch(
            "tensor products need integer gradings".into(),
            format!("{} vs {}", v.grading(), w.grading()),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Directed systems and their limits
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A chain of graded spaces with degree-0 connecting maps. `Forward` systems
/// have maps stage k -> stage k+1; `Backward` systems have maps
/// stage k+1 -> stage k.
#[derive(Debug, Clone)]
pub struct DirectedSystem {
    stages: Vec<GradedSpace>,
    maps: Vec<GradedMap>,
    direction: Direction,
}

/// Result of a finite-depth direct limit: the limit itself plus, for each
/// stage, the rank of its image in the limit (per degree and in total).
#[derive(Debug, Clone)]
pub struct LimitData {
    pub limit: GradedSpace,
    pub image_ranks: Vec<BTreeMap<i64, usize>>,
    pub image_totals: Vec<usize>,
}

impl DirectedSystem {
    pub fn new(
        stages: Vec<GradedSpace>,
        maps: Vec<GradedMap>,
        direction: Direction,
    ) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidParameter("system needs at least one stage".into()));
        }
        if maps.len() + 1 != stages.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} stages need {} maps, got {}",
                stages.len(),
                stages.len() - 1,
                maps.len()
            )));
        }
        for (k, m) in maps.iter().enumerate() {
            if m.shift() != 0 {
                return Err(Error::ShapeMismatch(
                    "connecting maps must have degree shift 0".into(),
                ));
            }
            let (src, tgt) = match direction {
                Direction::Forward => (&stages[k], &stages[k + 1]),
                Direction::Backward => (&stages[k + 1], &stages[k]),
            };
            if m.source() != src || m.target() != tgt {
                return Err(Error::ShapeMismatch(format!(
                    "map {k} does not match adjacent stages"
                )));
            }
        }
        Ok(DirectedSystem {
            stages,
            maps,
            direction,
        })
    }

    pub fn stages(&self) -> &[GradedSpace] {
        &self.stages
    }

    pub fn maps(&self) -> &[GradedMap] {
        &self.maps
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a system has at least one stage by construction
    }

    /// Composite map from stage `k` to the final stage (forward systems).
    pub fn composite_to_last(&self, k: usize) -> Result<GradedMap> {
        let last = self.stages.len() - 1;
        let mut current = GradedMap::identity(&self.stages[k])?;
        for m in &self.maps[k..last] {
            current = m.compose(&current)?;
        }
        Ok(current)
    }

    /// Composite map from the final stage down to stage `k` (backward systems).
    pub fn composite_from_last(&self, k: usize) -> Result<GradedMap> {
        let last = self.stages.len() - 1;
        let mut current = GradedMap::identity(&self.stages[last])?;
        for idx in (k..last).rev() {
            current = self.maps[idx].compose(&current)?;
        }
        Ok(current)
    }

    /// Finite-depth direct limit.
    ///
    /// The categorical colimit of a finite chain is just its final stage; the
    /// interesting part is deciding which final-stage classes would survive if
    /// the listed maps are the visible prefix of an infinite system. The rule
    /// used here: if the final connecting map is injective (as a whole map)
    /// there is no evidence of dying and the limit is the final stage;
    /// otherwise classes are treated as dying the way the final map shows,
    /// and the limit is its image. Reported image ranks are the ranks of the
    /// stage-to-limit composites.
    pub fn direct_limit(&self) -> Result<LimitData> {
        if self.direction == Direction::Backward {
            return Err(Error::BackwardSystem);
        }
        let last = self.stages.len() - 1;
        let final_stage = &self.stages[last];
        let mut limit = GradedSpace::zero(final_stage.field(), final_stage.grading());

        let mut degrees: std::collections::BTreeSet<i64> = std::collections::BTreeSet::new();
        for s in &self.stages {
            degrees.extend(s.explicit_degrees());
        }

        let final_map_injective = last == 0 || {
            let f = &self.maps[last - 1];
            degrees
                .iter()
                .all(|&d| f.rank_at(d) == f.source().dim_at(d))
        };

        let mut lim_dims: BTreeMap<i64, usize> = BTreeMap::new();
        for &d in &degrees {
            let dim = if final_map_injective {
                final_stage.dim_at(d)
            } else {
                self.maps[last - 1].rank_at(d)
            };
            if dim > 0 {
                let labels = (0..dim).map(|i| format!("lim{d}.{i}")).collect();
                limit.add_degree(d, dim, labels)?;
            }
            lim_dims.insert(d, dim);
        }

        let mut image_ranks = Vec::new();
        let mut image_totals = Vec::new();
        for k in 0..=last {
            let mut per_degree = BTreeMap::new();
            let mut total = 0usize;
            if k == last {
                for (&d, &dim) in &lim_dims {
                    if dim > 0 {
                        per_degree.insert(d, dim);
                        total += dim;
                    }
                }
            } else {
                let comp = self.composite_to_last(k)?;
                for &d in &degrees {
                    let r = comp.rank_at(d).min(*lim_dims.get(&d).unwrap_or(&0));
                    if r > 0 {
                        per_degree.insert(d, r);
                        total += r;
                    }
                }
            }
            image_ranks.push(per_degree);
            image_totals.push(total);
        }

        Ok(LimitData {
            limit,
            image_ranks,
            image_totals,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldTag;

    fn q() -> FieldTag {
        FieldTag::rationals()
    }

    fn space(dims: &[(i64, usize)]) -> GradedSpace {
        GradedSpace::from_dims(q(), Grading::Integer, dims).unwrap()
    }

    #[test]
    fn homology_of_zero_maps_is_the_space() {
        let v = space(&[(0, 2), (1, 1)]);
        let d_in = GradedMap::zero(GradedSpace::zero(q(), Grading::Integer), v.clone(), 1).unwrap();
        let d_out =
            GradedMap::zero(v.clone(), GradedSpace::zero(q(), Grading::Integer), 1).unwrap();
        assert_eq!(homology(&d_in, &d_out).unwrap(), v);
    }

    #[test]
    fn homology_of_acyclic_pair_vanishes() {
        // K -(1)-> K in degrees (0, 1)
        let u = space(&[(0, 1)]);
        let v = space(&[(1, 1)]);
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::from_rows(q(), &[vec![1]]).unwrap());
        let d_in = GradedMap::new(u.clone(), v.clone(), 1, blocks).unwrap();
        let d_out = GradedMap::zero(v, GradedSpace::zero(q(), Grading::Integer), 1).unwrap();
        let h = homology(&d_in, &d_out).unwrap();
        assert!(h.is_zero());
        // and at the front of the complex: ker of the surjection is zero
        let d_in0 =
            GradedMap::zero(GradedSpace::zero(q(), Grading::Integer), u.clone(), 1).unwrap();
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::from_rows(q(), &[vec![1]]).unwrap());
        let d_out0 = GradedMap::new(u, space(&[(1, 1)]), 1, blocks).unwrap();
        assert!(homology(&d_in0, &d_out0).unwrap().is_zero());
    }

    #[test]
    fn homology_rejects_non_complexes() {
        let u = space(&[(0, 1)]);
        let v = space(&[(1, 1)]);
        let w = space(&[(2, 1)]);
        let one = |s: &GradedSpace, t: &GradedSpace, d: i64| {
            let mut blocks = BTreeMap::new();
            blocks.insert(d, Matrix::from_rows(q(), &[vec![1]]).unwrap());
            GradedMap::new(s.clone(), t.clone(), 1, blocks).unwrap()
        };
        let d_in = one(&u, &v, 0);
        let d_out = one(&v, &w, 1);
        assert_eq!(homology(&d_in, &d_out), Err(Error::NotAComplex { degree: 0 }));
    }

    #[test]
    fn shift_conventions() {
        let point = GradedSpace::point(q());
        let down = shift(&point, -3);
        assert_eq!(down.dim_at(-3), 1);
        assert_eq!(down.dim_at(0), 0);
        assert_eq!(shift(&point, 0), point);
        // H^*(S^1) shifted up by 4g-3 with g = 2: classes in degrees 5, 6
        let circle = space(&[(0, 1), (1, 1)]);
        let shifted = shift(&circle, 5);
        assert_eq!(shifted.dim_at(5), 1);
        assert_eq!(shifted.dim_at(6), 1);
        assert_eq!(shifted.total_dim(), Some(2));
    }

    #[test]
    fn shift_mod2_flips_parity_only_when_odd() {
        let v = GradedSpace::from_dims(q(), Grading::Mod2, &[(0, 2), (1, 1)]).unwrap();
        let flipped = shift(&v, 3);
        assert_eq!(flipped.dim_at(0), 1);
        assert_eq!(flipped.dim_at(1), 2);
        assert_eq!(shift(&v, 4), v);
    }

    #[test]
    fn direct_sum_adds_dimensions() {
        let v = space(&[(0, 1)]);
        let zero = GradedSpace::zero(q(), Grading::Integer);
        assert_eq!(direct_sum(&v, &zero).unwrap(), v);
        let two = direct_sum(&v, &v).unwrap();
        assert_eq!(two.dim_at(0), 2);
        let fp = GradedSpace::from_dims(FieldTag::prime(5).unwrap(), Grading::Integer, &[(0, 1)])
            .unwrap();
        assert!(direct_sum(&v, &fp).is_err());
    }

    #[test]
    fn tensor_unit_and_convolution() {
        let v = space(&[(-1, 1), (0, 1)]);
        let unit = GradedSpace::point(q());
        assert_eq!(tensor_product(&v, &unit).unwrap(), v);
        let sq = tensor_product(&v, &v).unwrap();
        assert_eq!(sq.dim_at(-2), 1);
        assert_eq!(sq.dim_at(-1), 2);
        assert_eq!(sq.dim_at(0), 1);
        assert!(!tensor_product(&v, &v).unwrap().is_zero());
    }

    #[test]
    fn tensor_of_two_tails_requires_window() {
        let mut v = space(&[(0, 1)]);
        v.add_progression(Progression {
            first: -2,
            step: -2,
            dim: 1,
        })
        .unwrap();
        let err = tensor_product(&v, &v);
        assert!(matches!(err, Err(Error::WindowRequired(_))));
        // same-direction tails convolve fine on a window
        let windowed = tensor_product_window(&v, &v, -6, 0).unwrap();
        // dims of (1 + t^-2 + t^-4 + ...)^2 at -6, ..., 0: 4, 0, 3, 0, 2, 0, 1
        assert_eq!(windowed.dim_at(0), 1);
        assert_eq!(windowed.dim_at(-2), 2);
        assert_eq!(windowed.dim_at(-4), 3);
        assert_eq!(windowed.dim_at(-6), 4);
        assert_eq!(windowed.dim_at(-3), 0);
    }

    #[test]
    fn poincare_series_add_and_multiply() {
        let v = space(&[(0, 2), (3, 1)]);
        let w = space(&[(-1, 1), (0, 1)]);
        let (lo, hi) = (-4, 8);
        let sum = direct_sum(&v, &w).unwrap();
        for d in lo..=hi {
            assert_eq!(sum.dim_at(d), v.dim_at(d) + w.dim_at(d));
        }
        let prod = tensor_product(&v, &w).unwrap();
        for d in lo..=hi {
            let conv: usize = (lo - 4..=hi + 4).map(|a| v.dim_at(a) * w.dim_at(d - a)).sum();
            assert_eq!(prod.dim_at(d), conv);
        }
    }

    #[test]
    fn direct_limit_of_identities_is_stage_independent() {
        let v = space(&[(0, 2), (5, 1)]);
        for n_stages in 1..5 {
            let stages = vec![v.clone(); n_stages];
            let maps = (0..n_stages - 1)
                .map(|_| GradedMap::identity(&v).unwrap())
                .collect();
            let sys = DirectedSystem::new(stages, maps, Direction::Forward).unwrap();
            let lim = sys.direct_limit().unwrap();
            assert_eq!(lim.limit, v);
            for t in &lim.image_totals {
                assert_eq!(*t, 3);
            }
        }
    }

    #[test]
    fn direct_limit_of_zero_maps_vanishes() {
        let v = space(&[(0, 1)]);
        let stages = vec![v.clone(); 3];
        let maps = vec![
            GradedMap::zero(v.clone(), v.clone(), 0).unwrap(),
            GradedMap::zero(v.clone(), v.clone(), 0).unwrap(),
        ];
        let sys = DirectedSystem::new(stages, maps, Direction::Forward).unwrap();
        let lim = sys.direct_limit().unwrap();
        assert!(lim.limit.is_zero());
        assert_eq!(lim.image_totals, vec![0, 0, 0]);
    }

    #[test]
    fn direct_limit_of_injective_chain_keeps_last_stage() {
        // Q -> Q^2 -> Q^3, strict inclusions
        let s1 = space(&[(0, 1)]);
        let s2 = space(&[(0, 2)]);
        let s3 = space(&[(0, 3)]);
        let mut b1 = BTreeMap::new();
        b1.insert(0, Matrix::from_rows(q(), &[vec![1], vec![0]]).unwrap());
        let mut b2 = BTreeMap::new();
        b2.insert(
            0,
            Matrix::from_rows(q(), &[vec![1, 0], vec![0, 1], vec![0, 0]]).unwrap(),
        );
        let m1 = GradedMap::new(s1.clone(), s2.clone(), 0, b1).unwrap();
        let m2 = GradedMap::new(s2.clone(), s3.clone(), 0, b2).unwrap();
        let sys = DirectedSystem::new(vec![s1, s2, s3.clone()], vec![m1, m2], Direction::Forward)
            .unwrap();
        let lim = sys.direct_limit().unwrap();
        assert_eq!(lim.limit, s3);
        assert_eq!(lim.image_totals, vec![1, 2, 3]);
    }

    #[test]
    fn backward_systems_are_refused_by_direct_limit() {
        let v = space(&[(0, 1)]);
        let sys = DirectedSystem::new(
            vec![v.clone(), v.clone()],
            vec![GradedMap::identity(&v).unwrap()],
            Direction::Backward,
        )
        .unwrap();
        assert_eq!(sys.direct_limit().unwrap_err(), Error::BackwardSystem);
    }

    #[test]
    fn serialization_round_trip() {
        let mut v = space(&[(-3, 1), (0, 2)]);
        v.add_degree(7, 2, vec!["x0".into(), "x1".into()]).unwrap();
        v.add_progression(Progression {
            first: 5,
            step: 2,
            dim: 1,
        })
        .unwrap();
        let text = v.to_text();
        let back = GradedSpace::from_text(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn values_are_send_and_sync() {
        fn check<T: Send + Sync>() {}
        check::<GradedSpace>();
        check::<GradedMap>();
        check::<DirectedSystem>();
    }
}
