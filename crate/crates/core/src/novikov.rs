//! Truncated Novikov-ring arithmetic with rational exponents, the disc-count
//! obstruction sums for Lagrangian tori, and an order-by-order solver for the
//! resulting deformation equation.
//!
//! Coefficients are exact rationals (the characteristic-zero field available
//! here); exponents are nonnegative rationals below a truncation order. The
//! solver commits to deformations whose exponents lie in the additive monoid
//! generated by the input areas — that is what makes order-by-order solving
//! finite — and its negative verdicts beyond the leading order are relative
//! to that class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

type Rat = BigRational;

fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// A truncated formal sum of rational powers of the area variable, exponents
/// in `[0, trunc)`, exact rational coefficients, zero coefficients pruned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovSeries {
    terms: BTreeMap<Rat, Rat>,
    trunc: Rat,
}

impl NovikovSeries {
    pub fn zero(trunc: Rat) -> Result<Self> {
        if !trunc.is_positive() {
            return Err(Error::InvalidParameter("truncation order must be positive".into()));
        }
        Ok(NovikovSeries {
            terms: BTreeMap::new(),
            trunc,
        })
    }

    pub fn one(trunc: Rat) -> Result<Self> {
        NovikovSeries::monomial(Rat::one(), Rat::zero(), trunc)
    }

    pub fn monomial(coeff: Rat, exponent: Rat, trunc: Rat) -> Result<Self> {
        let mut s = NovikovSeries::zero(trunc)?;
        s.add_term(exponent, coeff)?;
        Ok(s)
    }

    pub fn from_terms(terms: &[(Rat, Rat)], trunc: Rat) -> Result<Self> {
        let mut s = NovikovSeries::zero(trunc)?;
        for (e, c) in terms {
            s.add_term(e.clone(), c.clone())?;
        }
        Ok(s)
    }

    fn add_term(&mut self, exponent: Rat, coeff: Rat) -> Result<()> {
        if exponent.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "negative exponent {exponent}"
            )));
        }
        if exponent >= self.trunc {
            return Ok(()); // silently truncated
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry(exponent.clone()).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
        Ok(())
    }

    pub fn truncation(&self) -> &Rat {
        &self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponent: &Rat) -> Rat {
        self.terms.get(exponent).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<&Rat> {
        self.terms.keys().next()
    }

    /// Membership in the maximal ideal: every exponent strictly positive.
    pub fn is_positive_exponents(&self) -> bool {
        self.terms.keys().all(|e| e.is_positive())
    }

    /// Units are exactly the series with nonzero constant term.
    pub fn is_unit(&self) -> bool {
        !self.coefficient(&Rat::zero()).is_zero()
    }

    fn common_trunc(&self, other: &NovikovSeries) -> Rat {
        self.trunc.clone().min(other.trunc.clone())
    }

    pub fn add(&self, other: &NovikovSeries) -> NovikovSeries {
        let trunc = self.common_trunc(other);
        let mut out = NovikovSeries::zero(trunc).unwrap();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(e.clone(), c.clone()).unwrap();
        }
        out
    }

    pub fn sub(&self, other: &NovikovSeries) -> NovikovSeries {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, k: &Rat) -> NovikovSeries {
        let mut out = NovikovSeries::zero(self.trunc.clone()).unwrap();
        if k.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * k).unwrap();
        }
        out
    }

    pub fn mul(&self, other: &NovikovSeries) -> NovikovSeries {
        let trunc = self.common_trunc(other);
        let mut out = NovikovSeries::zero(trunc.clone()).unwrap();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if e >= trunc {
                    continue;
                }
                out.add_term(e, c1 * c2).unwrap();
            }
        }
        out
    }

    /// Formal exponential, defined for series in the maximal ideal: the sum
    /// of k-fold products over factorials is finite below the truncation.
    pub fn exp(&self) -> Result<NovikovSeries> {
        if !self.is_positive_exponents() {
            return Err(Error::InvalidParameter(
                "formal exponential needs strictly positive exponents".into(),
            ));
        }
        let mut out = NovikovSeries::one(self.trunc.clone())?;
        if self.is_zero() {
            return Ok(out);
        }
        let mut term = NovikovSeries::one(self.trunc.clone())?;
        let mut k = 1i64;
        loop {
            term = term.mul(self).scale(&rat_int(k).recip());
            if term.is_zero() {
                break;
            }
            out = out.add(&term);
            k += 1;
        }
        Ok(out)
    }

    /// Substitute `t -> t^lambda`, `lambda > 0`: exponents and the truncation
    /// order rescale.
    pub fn rescale_exponents(&self, lambda: &Rat) -> Result<NovikovSeries> {
        if !lambda.is_positive() {
            return Err(Error::InvalidParameter("rescaling must be positive".into()));
        }
        let mut out = NovikovSeries::zero(&self.trunc * lambda)?;
        for (e, c) in &self.terms {
            out.add_term(e * lambda, c.clone())?;
        }
        Ok(out)
    }
}

impl fmt::Display for NovikovSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let pieces: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let coeff = if c.denom().is_one() {
                    c.numer().to_string()
                } else {
                    format!("{}/{}", c.numer(), c.denom())
                };
                let exp = if e.denom().is_one() {
                    e.numer().to_string()
                } else {
                    format!("{}/{}", e.numer(), e.denom())
                };
                if e.is_zero() {
                    coeff
                } else {
                    format!("{coeff}*t^{exp}")
                }
            })
            .collect();
        write!(f, "{}", pieces.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// Disc data and deformations
// ---------------------------------------------------------------------------

/// One boundary class with its signed disc count and area exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscClass {
    pub class: (i64, i64),
    pub count: i64,
    pub area: Rat,
}

/// The full disc-count input for a torus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiscData {
    entries: Vec<DiscClass>,
}

impl DiscData {
    pub fn new(entries: Vec<DiscClass>) -> Result<Self> {
        for e in &entries {
            if !e.area.is_positive() {
                return Err(Error::InvalidParameter(format!(
                    "area must be positive, got {}",
                    e.area
                )));
            }
            if e.class == (0, 0) {
                return Err(Error::InvalidParameter("boundary classes must be nonzero".into()));
            }
        }
        Ok(DiscData { entries })
    }

    pub fn empty() -> Self {
        DiscData::default()
    }

    pub fn entries(&self) -> &[DiscClass] {
        &self.entries
    }

    /// Entries with a nonzero count.
    fn active(&self) -> impl Iterator<Item = &DiscClass> {
        self.entries.iter().filter(|e| e.count != 0)
    }

    pub fn rescale_areas(&self, lambda: &Rat) -> Result<DiscData> {
        if !lambda.is_positive() {
            return Err(Error::InvalidParameter("rescaling must be positive".into()));
        }
        DiscData::new(
            self.entries
                .iter()
                .map(|e| DiscClass {
                    class: e.class,
                    count: e.count,
                    area: &e.area * lambda,
                })
                .collect(),
        )
    }

    /// Lines `alpha1 alpha2 k area`, area as an exact rational (`p/q`).
    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            if toks.len() != 4 {
                return Err(err("expected `alpha1 alpha2 k area`"));
            }
            let a1: i64 = toks[0].parse().map_err(|_| err("bad alpha1"))?;
            let a2: i64 = toks[1].parse().map_err(|_| err("bad alpha2"))?;
            let k: i64 = toks[2].parse().map_err(|_| err("bad count"))?;
            let area =
                crate::reeb::parse_rational(toks[3]).ok_or_else(|| err("bad area"))?;
            entries.push(DiscClass {
                class: (a1, a2),
                count: k,
                area,
            });
        }
        DiscData::new(entries)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let area = if e.area.denom().is_one() {
                e.area.numer().to_string()
            } else {
                format!("{}/{}", e.area.numer(), e.area.denom())
            };
            out.push_str(&format!(
                "{} {} {} {}\n",
                e.class.0, e.class.1, e.count, area
            ));
        }
        out
    }
}

/// A degree-one deformation class: a pair of series in the maximal ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deformation {
    a: [NovikovSeries; 2],
}

impl Deformation {
    pub fn new(a: [NovikovSeries; 2]) -> Result<Self> {
        if !a[0].is_positive_exponents() || !a[1].is_positive_exponents() {
            return Err(Error::InvalidParameter(
                "deformations must have strictly positive exponents".into(),
            ));
        }
        Ok(Deformation { a })
    }

    pub fn zero(trunc: Rat) -> Result<Self> {
        let z = NovikovSeries::zero(trunc)?;
        Deformation::new([z.clone(), z])
    }

    pub fn components(&self) -> &[NovikovSeries; 2] {
        &self.a
    }

    pub fn is_zero(&self) -> bool {
        self.a[0].is_zero() && self.a[1].is_zero()
    }

    /// The pairing of an integer class with the deformation.
    pub fn pair(&self, class: (i64, i64)) -> NovikovSeries {
        self.a[0]
            .scale(&rat_int(class.0))
            .add(&self.a[1].scale(&rat_int(class.1)))
    }

    pub fn rescale_exponents(&self, lambda: &Rat) -> Result<Deformation> {
        Deformation::new([
            self.a[0].rescale_exponents(lambda)?,
            self.a[1].rescale_exponents(lambda)?,
        ])
    }
}

// ---------------------------------------------------------------------------
// Obstruction sums
// ---------------------------------------------------------------------------

/// Weight of one class: `t^area * exp(class . a)`, truncated.
pub fn holonomy_weight(
    class: (i64, i64),
    area: &Rat,
    a: &Deformation,
    trunc: &Rat,
) -> Result<NovikovSeries> {
    if !area.is_positive() {
        return Err(Error::InvalidParameter("area must be positive".into()));
    }
    let pairing = a.pair(class);
    let mut pairing_trunc = pairing;
    // weights are multiplied by t^area, so the exponential only matters below
    // trunc - area
    pairing_trunc
        .trunc
        .clone_from(&(trunc - area).max(Rat::zero()));
    if pairing_trunc.trunc.is_zero() {
        return NovikovSeries::zero(trunc.clone());
    }
    pairing_trunc.terms.retain(|e, _| e < &pairing_trunc.trunc);
    let expo = pairing_trunc.exp()?;
    let mut out = NovikovSeries::zero(trunc.clone())?;
    for (e, c) in expo.terms() {
        out.add_term(e + area, c.clone())?;
    }
    Ok(out)
}

/// The scalar obstruction sum: weighted disc counts.
pub fn m0(d: &DiscData, a: &Deformation, trunc: &Rat) -> Result<NovikovSeries> {
    let mut out = NovikovSeries::zero(trunc.clone())?;
    for e in d.active() {
        let w = holonomy_weight(e.class, &e.area, a, trunc)?;
        out = out.add(&w.scale(&rat_int(e.count)));
    }
    Ok(out)
}

/// The vector obstruction sum: weighted disc counts times their classes.
pub fn m1(d: &DiscData, a: &Deformation, trunc: &Rat) -> Result<[NovikovSeries; 2]> {
    let mut out = [
        NovikovSeries::zero(trunc.clone())?,
        NovikovSeries::zero(trunc.clone())?,
    ];
    for e in d.active() {
        let w = holonomy_weight(e.class, &e.area, a, trunc)?;
        out[0] = out[0].add(&w.scale(&rat_int(e.class.0)).scale(&rat_int(e.count)));
        out[1] = out[1].add(&w.scale(&rat_int(e.class.1)).scale(&rat_int(e.count)));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Order-by-order solving
// ---------------------------------------------------------------------------

/// Outcome of the deformation-equation search.
#[derive(Debug, Clone, PartialEq)]
pub enum McOutcome {
    /// A deformation killing the vector obstruction below the truncation,
    /// together with the scalar value it leaves behind.
    Solution { a: Deformation, c: NovikovSeries },
    /// The equation is inconsistent at the given order; at leading order this
    /// is unconditional, beyond it the verdict is relative to the committed
    /// exponent class.
    NoSolution { order: Rat },
    /// The search budget ran out with free parameters unexplored.
    Undetermined { reached: Rat },
}

/// Verdict on whether some deformation kills the vector obstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum EssentialVerdict {
    Essential { trunc: Rat },
    NotEssential { order: Rat },
    Undetermined { reached: Rat },
}

const DEFAULT_BUDGET: usize = 4096;
const MONOID_CAP: usize = 20_000;
const BRANCH_DEPTH: usize = 4;

pub fn solve_mc(d: &DiscData, trunc: &Rat) -> Result<McOutcome> {
    solve_mc_with(d, trunc, DEFAULT_BUDGET)
}

/// Search order by order over the exponent monoid generated by the areas.
/// At each new exponent the condition is affine-linear in the new pair of
/// coefficients, with the constant 2x2 matrix formed by the minimal-area
/// classes. A singular matrix triggers a bounded breadth search over its
/// kernel direction before the solver gives up.
pub fn solve_mc_with(d: &DiscData, trunc: &Rat, budget: usize) -> Result<McOutcome> {
    if !trunc.is_positive() {
        return Err(Error::InvalidParameter("truncation order must be positive".into()));
    }
    let active: Vec<&DiscClass> = d.active().collect();
    if active.is_empty() {
        let a = Deformation::zero(trunc.clone())?;
        let c = NovikovSeries::zero(trunc.clone())?;
        return Ok(McOutcome::Solution { a, c });
    }

    let a_min = active.iter().map(|e| e.area.clone()).min().unwrap();

    // leading order: no unknown can reach exponent a_min
    let mut v0 = (Rat::zero(), Rat::zero());
    for e in active.iter().filter(|e| e.area == a_min) {
        v0.0 += rat_int(e.count * e.class.0);
        v0.1 += rat_int(e.count * e.class.1);
    }
    if !v0.0.is_zero() || !v0.1.is_zero() {
        return Ok(McOutcome::NoSolution { order: a_min });
    }

    // constant linear system matrix: sum over minimal-area classes of
    // count * (class outer class)
    let mut m00 = Rat::zero();
    let mut m01 = Rat::zero();
    let mut m11 = Rat::zero();
    for e in active.iter().filter(|e| e.area == a_min) {
        let k = rat_int(e.count);
        m00 += &k * rat_int(e.class.0 * e.class.0);
        m01 += &k * rat_int(e.class.0 * e.class.1);
        m11 += &k * rat_int(e.class.1 * e.class.1);
    }
    let det = &m00 * &m11 - &m01 * &m01;

    // exponent monoid generated by the active areas, truncated
    let monoid = generate_monoid(
        &active.iter().map(|e| e.area.clone()).collect::<Vec<_>>(),
        trunc,
    );
    let Some(monoid) = monoid else {
        return Ok(McOutcome::Undetermined {
            reached: a_min.clone(),
        });
    };
    let targets: Vec<Rat> = monoid.iter().filter(|g| **g > a_min).cloned().collect();
    let unknown_exponents: BTreeSet<Rat> = monoid.clone();

    let mut nodes = 0usize;
    let outcome = search(
        d,
        trunc,
        &a_min,
        (&m00, &m01, &m11, &det),
        &targets,
        &unknown_exponents,
        Deformation::zero(trunc.clone())?,
        0,
        0,
        budget,
        &mut nodes,
    )?;
    Ok(outcome)
}

fn generate_monoid(areas: &[Rat], trunc: &Rat) -> Option<BTreeSet<Rat>> {
    let mut set: BTreeSet<Rat> = BTreeSet::new();
    let mut frontier: Vec<Rat> = vec![Rat::zero()];
    while let Some(x) = frontier.pop() {
        for a in areas {
            let y = &x + a;
            if &y < trunc && set.insert(y.clone()) {
                if set.len() > MONOID_CAP {
                    return None;
                }
                frontier.push(y);
            }
        }
    }
    Some(set)
}

#[allow(clippy::too_many_arguments)]
fn search(
    d: &DiscData,
    trunc: &Rat,
    a_min: &Rat,
    matrix: (&Rat, &Rat, &Rat, &Rat),
    targets: &[Rat],
    unknown_exponents: &BTreeSet<Rat>,
    partial: Deformation,
    step: usize,
    branches_used: usize,
    budget: usize,
    nodes: &mut usize,
) -> Result<McOutcome> {
    let (m00, m01, m11, det) = matrix;
    let mut partial = partial;
    let mut step = step;
    while step < targets.len() {
        *nodes += 1;
        if *nodes > budget {
            return Ok(McOutcome::Undetermined {
                reached: targets[step].clone(),
            });
        }
        let g = &targets[step];
        let current = m1(d, &partial, trunc)?;
        let v = (current[0].coefficient(g), current[1].coefficient(g));
        if v.0.is_zero() && v.1.is_zero() {
            step += 1;
            continue;
        }
        let e = g - a_min;
        if !e.is_positive() || !unknown_exponents.contains(&e) {
            // no unknown reaches this exponent within the committed class
            return Ok(if det.is_zero() {
                // earlier free kernel choices might have changed v: not provable
                McOutcome::Undetermined { reached: g.clone() }
            } else {
                // deterministic path: provably inconsistent in the class
                McOutcome::NoSolution { order: g.clone() }
            });
        }
        if !det.is_zero() {
            // unique update of the new coefficients: M x = -v
            let x0 = (m11 * &-&v.0 - m01 * &-&v.1) / det;
            let x1 = (m00 * &-&v.1 - m01 * &-&v.0) / det;
            partial = add_coefficients(&partial, &e, &x0, &x1, trunc)?;
            step += 1;
            continue;
        }
        // singular system: need a particular solution of M x = -v
        let Some((x0, x1)) = particular_solution(m00, m01, m11, &v) else {
            // inconsistent at this order; with a singular matrix earlier
            // kernel freedom could matter, so this is not a proof
            return Ok(McOutcome::Undetermined { reached: g.clone() });
        };
        // bounded breadth over the kernel direction
        let kernel = kernel_direction(m00, m01, m11);
        let mut candidates = vec![(x0.clone(), x1.clone())];
        if branches_used < BRANCH_DEPTH {
            if let Some((k0, k1)) = &kernel {
                candidates.push((&x0 + k0, &x1 + k1));
                candidates.push((&x0 - k0, &x1 - k1));
            }
        }
        let mut last = McOutcome::Undetermined { reached: g.clone() };
        for (c0, c1) in candidates {
            let next = add_coefficients(&partial, &e, &c0, &c1, trunc)?;
            let outcome = search(
                d,
                trunc,
                a_min,
                matrix,
                targets,
                unknown_exponents,
                next,
                step + 1,
                branches_used + 1,
                budget,
                nodes,
            )?;
            if let McOutcome::Solution { .. } = outcome {
                return Ok(outcome);
            }
            last = outcome;
        }
        return Ok(match last {
            McOutcome::NoSolution { order } => McOutcome::Undetermined { reached: order },
            other => other,
        });
    }
    // reached the truncation: round-trip check and report
    let check = m1(d, &partial, trunc)?;
    debug_assert!(check[0].is_zero() && check[1].is_zero());
    if !check[0].is_zero() || !check[1].is_zero() {
        return Err(Error::InvalidParameter(
            "solver invariant violated: residual obstruction after completion".into(),
        ));
    }
    let c = m0(d, &partial, trunc)?;
    Ok(McOutcome::Solution { a: partial, c })
}

fn add_coefficients(
    partial: &Deformation,
    e: &Rat,
    x0: &Rat,
    x1: &Rat,
    trunc: &Rat,
) -> Result<Deformation> {
    let bump = |s: &NovikovSeries, x: &Rat| -> Result<NovikovSeries> {
        let mut out = s.clone();
        out.trunc.clone_from(trunc);
        out.add_term(e.clone(), x.clone())?;
        Ok(out)
    };
    Deformation::new([
        bump(&partial.components()[0], x0)?,
        bump(&partial.components()[1], x1)?,
    ])
}

/// A particular solution of the symmetric 2x2 system `M x = -v`, if any.
fn particular_solution(m00: &Rat, m01: &Rat, m11: &Rat, v: &(Rat, Rat)) -> Option<(Rat, Rat)> {
    let b0 = -&v.0;
    let b1 = -&v.1;
    // rows (m00 m01 | b0), (m01 m11 | b1); the determinant is zero here
    if !m00.is_zero() {
        // second row is (m01/m00) times the first; consistency requires the
        // same relation between b1 and b0
        let factor = m01 / m00;
        if &factor * &b0 != b1 {
            return None;
        }
        return Some((b0 / m00, Rat::zero()));
    }
    if !m01.is_zero() {
        // m00 = 0 and det = 0 force m01 = 0; unreachable, kept for safety
        return None;
    }
    if !m11.is_zero() {
        if !b0.is_zero() {
            return None;
        }
        return Some((Rat::zero(), b1 / m11));
    }
    // zero matrix
    if b0.is_zero() && b1.is_zero() {
        Some((Rat::zero(), Rat::zero()))
    } else {
        None
    }
}

/// A nonzero kernel vector of the singular symmetric 2x2 matrix, if the
/// matrix is nonzero.
fn kernel_direction(m00: &Rat, m01: &Rat, m11: &Rat) -> Option<(Rat, Rat)> {
    if !m00.is_zero() || !m01.is_zero() {
        // (m01, -m00) is killed when det = 0
        Some((m01.clone(), -m00))
    } else if !m11.is_zero() {
        Some((Rat::one(), Rat::zero()))
    } else {
        None
    }
}

/// Essentiality uses the vector obstruction only; the scalar value is
/// reported separately by [`solve_mc`].
pub fn essential_verdict(d: &DiscData, trunc: &Rat) -> Result<EssentialVerdict> {
    essential_verdict_with(d, trunc, DEFAULT_BUDGET)
}

pub fn essential_verdict_with(
    d: &DiscData,
    trunc: &Rat,
    budget: usize,
) -> Result<EssentialVerdict> {
    Ok(match solve_mc_with(d, trunc, budget)? {
        McOutcome::Solution { .. } => EssentialVerdict::Essential {
            trunc: trunc.clone(),
        },
        McOutcome::NoSolution { order } => EssentialVerdict::NotEssential { order },
        McOutcome::Undetermined { reached } => EssentialVerdict::Undetermined { reached },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        rat_int(n)
    }

    fn rr(n: i64, d: i64) -> Rat {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn cancellation_data(area: Rat) -> DiscData {
        DiscData::new(vec![
            DiscClass {
                class: (1, 0),
                count: 1,
                area: area.clone(),
            },
            DiscClass {
                class: (-1, 0),
                count: 1,
                area,
            },
        ])
        .unwrap()
    }

    fn clifford_data(area: Rat) -> DiscData {
        DiscData::new(vec![
            DiscClass {
                class: (1, 0),
                count: 1,
                area: area.clone(),
            },
            DiscClass {
                class: (0, 1),
                count: 1,
                area,
            },
        ])
        .unwrap()
    }

    #[test]
    fn holonomy_weight_examples() {
        let n = r(4);
        // a = 0: the weight is the bare area power
        let zero = Deformation::zero(n.clone()).unwrap();
        let w = holonomy_weight((1, 0), &r(1), &zero, &n).unwrap();
        assert_eq!(w, NovikovSeries::monomial(r(1), r(1), n.clone()).unwrap());

        // a1 = t: t * exp(t) = t + t^2 + t^3/2 below order 4
        let a = Deformation::new([
            NovikovSeries::monomial(r(1), r(1), n.clone()).unwrap(),
            NovikovSeries::zero(n.clone()).unwrap(),
        ])
        .unwrap();
        let w = holonomy_weight((1, 0), &r(1), &a, &n).unwrap();
        let want =
            NovikovSeries::from_terms(&[(r(1), r(1)), (r(2), r(1)), (r(3), rr(1, 2))], n.clone())
                .unwrap();
        assert_eq!(w, want);

        // the inverse class flips signs in the exponential
        let w = holonomy_weight((-1, 0), &r(1), &a, &n).unwrap();
        let want =
            NovikovSeries::from_terms(&[(r(1), r(1)), (r(2), r(-1)), (r(3), rr(1, 2))], n).unwrap();
        assert_eq!(w, want);
    }

    #[test]
    fn m0_and_m1_examples() {
        let n = r(6);
        let zero = Deformation::zero(n.clone()).unwrap();

        assert!(m0(&DiscData::empty(), &zero, &n).unwrap().is_zero());
        let [u, v] = m1(&DiscData::empty(), &zero, &n).unwrap();
        assert!(u.is_zero() && v.is_zero());

        // symmetric pair at a = 0: scalar sum 2 t^A, vector sum cancels
        let d = cancellation_data(r(2));
        let s = m0(&d, &zero, &n).unwrap();
        assert_eq!(s, NovikovSeries::monomial(r(2), r(2), n.clone()).unwrap());
        let [u, v] = m1(&d, &zero, &n).unwrap();
        assert!(u.is_zero() && v.is_zero());

        // independent classes do not cancel
        let d = clifford_data(r(2));
        let [u, v] = m1(&d, &zero, &n).unwrap();
        assert_eq!(u, NovikovSeries::monomial(r(1), r(2), n.clone()).unwrap());
        assert_eq!(v, NovikovSeries::monomial(r(1), r(2), n).unwrap());
    }

    #[test]
    fn exp_inverse_identity() {
        let n = r(8);
        let a = NovikovSeries::from_terms(
            &[(r(1), r(3)), (rr(3, 2), rr(-1, 2)), (r(2), r(5))],
            n.clone(),
        )
        .unwrap();
        let e = a.exp().unwrap();
        let e_neg = a.scale(&r(-1)).exp().unwrap();
        assert_eq!(e.mul(&e_neg), NovikovSeries::one(n).unwrap());
    }

    #[test]
    fn solver_finds_the_symmetric_solution() {
        let n = r(20);
        let d = cancellation_data(r(1));
        match solve_mc(&d, &n).unwrap() {
            McOutcome::Solution { a, c } => {
                assert!(a.is_zero());
                assert_eq!(c, NovikovSeries::monomial(r(2), r(1), n.clone()).unwrap());
            }
            other => panic!("expected a solution, got {other:?}"),
        }
        assert_eq!(
            essential_verdict(&d, &n).unwrap(),
            EssentialVerdict::Essential { trunc: n }
        );
    }

    #[test]
    fn solver_rejects_independent_leading_classes() {
        let n = r(20);
        let d = clifford_data(r(1));
        match solve_mc(&d, &n).unwrap() {
            McOutcome::NoSolution { order } => assert_eq!(order, r(1)),
            other => panic!("expected no solution, got {other:?}"),
        }
        assert_eq!(
            essential_verdict(&d, &n).unwrap(),
            EssentialVerdict::NotEssential { order: r(1) }
        );
    }

    #[test]
    fn solver_accepts_empty_and_zero_count_data() {
        let n = r(10);
        for d in [
            DiscData::empty(),
            DiscData::new(vec![DiscClass {
                class: (2, 3),
                count: 0,
                area: r(1),
            }])
            .unwrap(),
        ] {
            match solve_mc(&d, &n).unwrap() {
                McOutcome::Solution { a, c } => {
                    assert!(a.is_zero());
                    assert!(c.is_zero());
                }
                other => panic!("expected the trivial solution, got {other:?}"),
            }
        }
    }

    #[test]
    fn solver_handles_a_nonsingular_forced_correction() {
        // two opposite pairs make the system matrix invertible; a third class
        // at a higher area forces a nonzero deformation
        let n = r(8);
        let d = DiscData::new(vec![
            DiscClass {
                class: (1, 0),
                count: 1,
                area: r(1),
            },
            DiscClass {
                class: (-1, 0),
                count: 1,
                area: r(1),
            },
            DiscClass {
                class: (0, 1),
                count: 1,
                area: r(1),
            },
            DiscClass {
                class: (0, -1),
                count: 1,
                area: r(1),
            },
            DiscClass {
                class: (1, 1),
                count: 3,
                area: r(2),
            },
        ])
        .unwrap();
        match solve_mc(&d, &n).unwrap() {
            McOutcome::Solution { a, c } => {
                assert!(!a.is_zero());
                let residual = m1(&d, &a, &n).unwrap();
                assert!(residual[0].is_zero() && residual[1].is_zero());
                let direct = m0(&d, &a, &n).unwrap();
                assert_eq!(direct, c);
            }
            other => panic!("expected a corrected solution, got {other:?}"),
        }
    }

    #[test]
    fn area_rescaling_transports_solutions() {
        let n = r(8);
        let d = DiscData::new(vec![
            DiscClass {
                class: (1, 0),
                count: 2,
                area: r(1),
            },
            DiscClass {
                class: (-1, 0),
                count: 2,
                area: r(1),
            },
            DiscClass {
                class: (1, 0),
                count: -1,
                area: r(2),
            },
            DiscClass {
                class: (-1, 0),
                count: -1,
                area: r(2),
            },
        ])
        .unwrap();
        let lambda = rr(3, 2);
        let scaled = d.rescale_areas(&lambda).unwrap();
        let (a1, a2) = match (
            solve_mc(&d, &n).unwrap(),
            solve_mc(&scaled, &(n.clone() * &lambda)).unwrap(),
        ) {
            (McOutcome::Solution { a: a1, .. }, McOutcome::Solution { a: a2, .. }) => (a1, a2),
            other => panic!("expected two solutions, got {other:?}"),
        };
        assert_eq!(a1.rescale_exponents(&lambda).unwrap(), a2);
    }

    #[test]
    fn linearity_in_counts() {
        let n = r(6);
        let a = Deformation::new([
            NovikovSeries::monomial(r(1), r(1), n.clone()).unwrap(),
            NovikovSeries::monomial(r(-2), rr(3, 2), n.clone()).unwrap(),
        ])
        .unwrap();
        let single = |count: i64| {
            DiscData::new(vec![DiscClass {
                class: (2, -1),
                count,
                area: rr(1, 2),
            }])
            .unwrap()
        };
        let m_1 = m0(&single(1), &a, &n).unwrap();
        let m_3 = m0(&single(3), &a, &n).unwrap();
        assert_eq!(m_3, m_1.scale(&r(3)));
        let v_1 = m1(&single(1), &a, &n).unwrap();
        let v_3 = m1(&single(3), &a, &n).unwrap();
        assert_eq!(v_3[0], v_1[0].scale(&r(3)));
        assert_eq!(v_3[1], v_1[1].scale(&r(3)));
    }

    #[test]
    fn disc_data_text_round_trip() {
        let d = DiscData::new(vec![
            DiscClass {
                class: (1, 0),
                count: 1,
                area: rr(3, 2),
            },
            DiscClass {
                class: (-1, 2),
                count: -4,
                area: r(2),
            },
        ])
        .unwrap();
        let text = d.to_text();
        assert_eq!(DiscData::from_text(&text).unwrap(), d);
        assert!(DiscData::from_text("1 0 1 0").is_err()); // zero area
        assert!(DiscData::from_text("0 0 1 1").is_err()); // zero class
    }

    #[test]
    fn series_invariants() {
        let n = r(5);
        let s = NovikovSeries::from_terms(&[(r(0), r(2)), (r(1), r(1))], n.clone()).unwrap();
        assert!(s.is_unit());
        assert!(!s.is_positive_exponents());
        let t = NovikovSeries::monomial(r(1), rr(1, 3), n.clone()).unwrap();
        assert!(t.is_positive_exponents());
        assert!(!t.is_unit());
        // exponents at or above the truncation are dropped
        let dropped = NovikovSeries::monomial(r(7), r(5), n.clone()).unwrap();
        assert!(dropped.is_zero());
        // negative exponents are rejected
        assert!(NovikovSeries::monomial(r(1), r(-1), n).is_err());
    }
}
