//! Orbit, action and index bookkeeping for radial Hamiltonians, orbit counts
//! for the torus pieces of crossing boundaries, growth-rate extraction from
//! count functions, and the slope-decay bound for continuation schedules.
//!
//! Profiles are exact rational samples interpreted piecewise linearly in the
//! slope; all orbit levels, actions and periods are then exact rationals.
//! The only floating point lives in [`growth_exponent`], which estimates a
//! limit superior from finitely many samples.

use std::cmp::Ordering;

use num::bigint::BigInt;
use num::{BigRational, BigUint, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::FieldTag;
use crate::graded::{DirectedSystem, Direction, GradedMap, GradedSpace, Grading};

type Rat = BigRational;

fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Slope of a radial Hamiltonian at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slope {
    Finite(Rat),
    Infinite,
}

/// Radial Hamiltonian profile: exact samples `(rho, h(rho), h'(rho))` with
/// `rho > 0` strictly increasing and `h'` nondecreasing. Between samples the
/// slope is interpolated linearly, so levels solved from it stay rational.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    samples: Vec<(Rat, Rat, Rat)>,
    slope_at_infinity: Slope,
}

impl RadialProfile {
    pub fn new(samples: Vec<(Rat, Rat, Rat)>, slope_at_infinity: Slope) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientSamples(
                "a radial profile needs at least two samples".into(),
            ));
        }
        for w in samples.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidParameter("rho samples must increase".into()));
            }
            if w[0].2 > w[1].2 {
                return Err(Error::InvalidParameter("slope must be nondecreasing".into()));
            }
        }
        if samples[0].0 <= Rat::zero() {
            return Err(Error::InvalidParameter("rho must be positive".into()));
        }
        if samples.iter().any(|s| s.2.is_negative()) {
            return Err(Error::InvalidParameter("slope must be nonnegative".into()));
        }
        Ok(RadialProfile {
            samples,
            slope_at_infinity,
        })
    }

    /// The profile `h(rho) = rho^2` sampled at the two endpoints; linear slope
    /// interpolation is exact for it.
    pub fn quadratic(rho_lo: Rat, rho_hi: Rat) -> Result<Self> {
        let sample = |rho: &Rat| (rho.clone(), rho * rho, rat_int(2) * rho);
        RadialProfile::new(vec![sample(&rho_lo), sample(&rho_hi)], Slope::Infinite)
    }

    pub fn slope_at_infinity(&self) -> &Slope {
        &self.slope_at_infinity
    }

    /// Solve `h'(rho) = slope` by monotone inversion with exact bracketing.
    fn invert_slope(&self, slope: &Rat) -> Result<Rat> {
        let first = &self.samples[0];
        let last = self.samples.last().unwrap();
        if slope < &first.2 || slope > &last.2 {
            return Err(Error::InsufficientSamples(format!(
                "slope {slope} outside the sampled range [{}, {}]",
                first.2, last.2
            )));
        }
        for w in self.samples.windows(2) {
            let (s0, s1) = (&w[0].2, &w[1].2);
            if slope < s0 || slope > s1 {
                continue;
            }
            if s0 == s1 {
                return Err(Error::DegenerateSlope(format!(
                    "slope {slope} lies on a flat segment and cannot be inverted"
                )));
            }
            let t = (slope - s0) / (s1 - s0);
            return Ok(&w[0].0 + t * (&w[1].0 - &w[0].0));
        }
        unreachable!("bracketed slope not found");
    }

    /// Value of `h` at a level inside the sampled range, by trapezoid
    /// integration of the piecewise-linear slope from the nearest sample to
    /// the left. Exact within the interpolation model.
    fn value_at(&self, rho: &Rat) -> Result<Rat> {
        if rho < &self.samples[0].0 || rho > &self.samples.last().unwrap().0 {
            return Err(Error::InsufficientSamples(format!(
                "level {rho} outside the sampled range"
            )));
        }
        for w in self.samples.windows(2) {
            if rho < &w[0].0 || rho > &w[1].0 {
                continue;
            }
            let t = (rho - &w[0].0) / (&w[1].0 - &w[0].0);
            let slope_here = &w[0].2 + &t * (&w[1].2 - &w[0].2);
            let h = &w[0].1 + (rho - &w[0].0) * (&w[0].2 + &slope_here) / rat_int(2);
            return Ok(h);
        }
        unreachable!("bracketed level not found");
    }
}

/// Periods of the closed orbits on the boundary.
#[derive(Debug, Clone)]
pub enum ReebSpectrum {
    /// Free circle action with the given primitive period; all multiples occur.
    Circle { primitive: Rat },
    /// Explicit positive periods with multiplicities, sorted on construction.
    Explicit(Vec<(Rat, usize)>),
}

impl ReebSpectrum {
    fn periods_up_to(&self, tau_max: &Rat, slope: &Slope) -> Result<Vec<Rat>> {
        let below_slope = |t: &Rat| match slope {
            Slope::Infinite => true,
            Slope::Finite(s) => t < s,
        };
        let mut out = Vec::new();
        match self {
            ReebSpectrum::Circle { primitive } => {
                if !primitive.is_positive() {
                    return Err(Error::InvalidParameter("primitive period must be positive".into()));
                }
                let mut t = primitive.clone();
                while &t <= tau_max {
                    if below_slope(&t) {
                        out.push(t.clone());
                    }
                    t += primitive;
                }
            }
            ReebSpectrum::Explicit(list) => {
                let mut sorted = list.clone();
                sorted.sort_by(|a, b| a.0.cmp(&b.0));
                for (t, mult) in sorted {
                    if !t.is_positive() {
                        return Err(Error::InvalidParameter("periods must be positive".into()));
                    }
                    if &t <= tau_max && below_slope(&t) {
                        out.extend(std::iter::repeat(t).take(mult));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One closed orbit of the radial Hamiltonian: its period, the level
/// `rho = e^r` where the slope attains the period, and the exact action
/// `h(rho) - rho h'(rho)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub period: Rat,
    pub rho: Rat,
    pub action: Rat,
}

/// All closed orbits of period up to `tau_max` (and below the slope at
/// infinity), solved by monotone inversion of the sampled slope.
pub fn orbit_spectrum(
    profile: &RadialProfile,
    spectrum: &ReebSpectrum,
    tau_max: &Rat,
) -> Result<Vec<Orbit>> {
    let mut orbits = Vec::new();
    for period in spectrum.periods_up_to(tau_max, &profile.slope_at_infinity)? {
        let rho = profile.invert_slope(&period)?;
        let h = profile.value_at(&rho)?;
        let action = &h - &rho * &period;
        orbits.push(Orbit {
            period,
            rho,
            action,
        });
    }
    Ok(orbits)
}

// ---------------------------------------------------------------------------
// Ball generator degrees and the truncated tower
// ---------------------------------------------------------------------------

/// First `count` generator degrees of the radial complex on the 2n-ball with
/// initial slope between the k-th and (k+1)-st multiples of the primitive
/// period: -n-2nk, -n-2nk-1, -n-2n(k+1), -n-2n(k+1)-1, ...
pub fn ball_cf_degrees(n: u32, k: u32, count: usize) -> Vec<i64> {
    let n = n as i64;
    let mut out = Vec::with_capacity(count);
    let mut j = k as i64;
    while out.len() < count {
        let head = -n - 2 * n * j;
        out.push(head);
        if out.len() < count {
            out.push(head - 1);
        }
        j += 1;
    }
    out
}

/// The truncated tower of the ball: one-dimensional stages with the single
/// generator in degree -n-2nk and vanishing connecting maps.
pub fn ball_truncated_tower(n: u32, k_max: u32) -> Result<DirectedSystem> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let q = FieldTag::rationals();
    let mut stages = Vec::new();
    for k in 0..=k_max {
        let deg = -(n as i64) - 2 * (n as i64) * k as i64;
        stages.push(GradedSpace::from_dims(q, Grading::Integer, &[(deg, 1)])?);
    }
    let mut maps = Vec::new();
    for k in 0..k_max as usize {
        maps.push(GradedMap::zero(stages[k].clone(), stages[k + 1].clone(), 0)?);
    }
    DirectedSystem::new(stages, maps, Direction::Forward)
}

/// Image-rank trace of a forward tower as a count function. Slopes are
/// normalized so that the primitive circle period is 2: stage k sits at
/// `tau = 2k + 1`.
pub fn tower_growth_trace(sys: &DirectedSystem) -> Result<CountFunction> {
    let lim = sys.direct_limit()?;
    let samples = lim
        .image_totals
        .iter()
        .enumerate()
        .map(|(k, &r)| (rat_int(2 * k as i64 + 1), BigUint::from(r)))
        .collect();
    CountFunction::from_samples(samples)
}

// ---------------------------------------------------------------------------
// Count functions
// ---------------------------------------------------------------------------

/// A monotone step function `tau -> count`, sampled at strictly increasing
/// rational thresholds. Counts are arbitrary-precision since super-polynomial
/// inputs are legal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountFunction {
    samples: Vec<(Rat, BigUint)>,
}

impl CountFunction {
    pub fn from_samples(samples: Vec<(Rat, BigUint)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientSamples("no samples".into()));
        }
        if !samples[0].0.is_positive() {
            return Err(Error::InvalidParameter(
                "count thresholds must be positive".into(),
            ));
        }
        for w in samples.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidParameter(
                    "count samples must have strictly increasing tau".into(),
                ));
            }
            if w[0].1 > w[1].1 {
                return Err(Error::InvalidParameter(
                    "counts must be nondecreasing in tau".into(),
                ));
            }
        }
        Ok(CountFunction { samples })
    }

    pub fn from_u64_samples(samples: &[(i64, u64)]) -> Result<Self> {
        CountFunction::from_samples(
            samples
                .iter()
                .map(|&(t, c)| (rat_int(t), BigUint::from(c)))
                .collect(),
        )
    }

    pub fn samples(&self) -> &[(Rat, BigUint)] {
        &self.samples
    }

    /// Step evaluation: the count at the largest sample `<= tau`, zero below
    /// the first sample.
    pub fn eval(&self, tau: &Rat) -> BigUint {
        let mut current = BigUint::zero();
        for (t, c) in &self.samples {
            if t > tau {
                break;
            }
            current = c.clone();
        }
        current
    }

    pub fn is_identically_zero(&self) -> bool {
        self.samples.iter().all(|(_, c)| c.is_zero())
    }

    /// Lines `tau count`, tau as an exact rational.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, c) in &self.samples {
            if t.denom().is_one() {
                out.push_str(&format!("{} {}\n", t.numer(), c));
            } else {
                out.push_str(&format!("{}/{} {}\n", t.numer(), t.denom(), c));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut toks = line.split_whitespace();
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            let tau = parse_rational(toks.next().ok_or_else(|| err("missing tau"))?)
                .ok_or_else(|| err("bad tau"))?;
            let count: BigUint = toks
                .next()
                .ok_or_else(|| err("missing count"))?
                .parse()
                .map_err(|_| err("bad count"))?;
            if toks.next().is_some() {
                return Err(err("expected `tau count`"));
            }
            samples.push((tau, count));
        }
        CountFunction::from_samples(samples)
    }
}

/// Parse `p`, `p/q` or a signed integer as an exact rational.
pub fn parse_rational(s: &str) -> Option<Rat> {
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.parse().ok()?;
        let d: BigInt = den.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

// ---------------------------------------------------------------------------
// Torus-piece orbit counting
// ---------------------------------------------------------------------------

/// Speed profile of the translation flow on an interval of tori: samples
/// `(s, xi1, xi2)` with `xi1` strictly decreasing and `xi2` strictly
/// increasing, both positive on the open interval.
#[derive(Debug, Clone)]
pub struct TorusPieceProfile {
    samples: Vec<(Rat, Rat, Rat)>,
}

impl TorusPieceProfile {
    pub fn new(samples: Vec<(Rat, Rat, Rat)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientSamples(
                "a torus profile needs at least two samples".into(),
            ));
        }
        for w in samples.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidParameter("s samples must increase".into()));
            }
            if w[1].1 >= w[0].1 {
                return Err(Error::InvalidParameter("xi1 must strictly decrease".into()));
            }
            if w[1].2 <= w[0].2 {
                return Err(Error::InvalidParameter("xi2 must strictly increase".into()));
            }
        }
        let interior_positive = samples
            .iter()
            .skip(1)
            .take(samples.len().saturating_sub(2))
            .all(|s| s.1.is_positive() && s.2.is_positive());
        let ends_ok = samples[0].1.is_positive()
            && !samples[0].2.is_negative()
            && samples.last().unwrap().2.is_positive()
            && !samples.last().unwrap().1.is_negative();
        if !interior_positive || !ends_ok {
            return Err(Error::InvalidParameter(
                "speeds must be positive on the open interval".into(),
            ));
        }
        Ok(TorusPieceProfile { samples })
    }

    /// The normalized linear profile `xi = (1 - sigma, sigma)`, on which the
    /// period of the direction `(p, q)` is exactly `p + q`.
    pub fn linear() -> Self {
        TorusPieceProfile::new(vec![
            (rat_int(-1), rat_int(1), rat_int(0)),
            (rat_int(1), rat_int(0), rat_int(1)),
        ])
        .unwrap()
    }

    pub fn samples(&self) -> &[(Rat, Rat, Rat)] {
        &self.samples
    }

    /// Lines `s xi1 xi2` with exact rationals.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            if toks.len() != 3 {
                return Err(err("expected `s xi1 xi2`"));
            }
            let s = parse_rational(toks[0]).ok_or_else(|| err("bad s"))?;
            let x1 = parse_rational(toks[1]).ok_or_else(|| err("bad xi1"))?;
            let x2 = parse_rational(toks[2]).ok_or_else(|| err("bad xi2"))?;
            samples.push((s, x1, x2));
        }
        TorusPieceProfile::new(samples)
    }
}

/// Largest integer strictly below a rational.
fn int_below(x: &Rat) -> BigInt {
    if x.denom().is_one() {
        x.numer() - 1
    } else {
        x.floor().numer().clone()
    }
}

/// Smallest integer strictly above a rational.
fn int_above(x: &Rat) -> BigInt {
    if x.denom().is_one() {
        x.numer() + 1
    } else {
        x.ceil().numer().clone()
    }
}

/// Smallest integer greater than or equal to a rational.
fn int_at_least(x: &Rat) -> BigInt {
    x.ceil().numer().clone()
}

/// Count the periodic tori of the translation flow with period `< tau`:
/// pairs of positive integers `(p, q)` whose direction `q/p` is attained at a
/// unique interior level, iterates included. On each linear segment the
/// period is a positive linear form in `(p, q)`, so the count is a lattice
/// count over segment-wise triangles, summed per first coordinate.
pub fn count_torus_orbits(profile: &TorusPieceProfile, tau: &Rat) -> Result<u64> {
    if !tau.is_positive() {
        return Err(Error::InvalidParameter("tau must be positive".into()));
    }
    let mut total: u64 = 0;
    for (idx, w) in profile.samples.windows(2).enumerate() {
        let (a1, a2) = (&w[0].1, &w[0].2);
        let (b1, b2) = (&w[1].1, &w[1].2);
        let d1 = b1 - a1; // < 0
        let d2 = b2 - a2; // > 0
        let neg_d1 = -&d1;
        let weight = a1 * b2 - a2 * b1; // > 0; period of (p, q) is (p*d2 + q*(-d1)) / weight
        debug_assert!(weight.is_positive());

        // p ranges over positive integers with p*d2 < tau*weight
        let p_cap = int_below(&(tau * &weight / &d2))
            .to_i64()
            .ok_or_else(|| Error::InvalidParameter("tau too large for enumeration".into()))?;
        for p in 1..=p_cap.max(0) {
            let p_rat = rat_int(p);
            // ratio lower bound q/p >= a2/a1; strict on the first segment,
            // where the closed interval end is excluded
            let lower_ratio = &p_rat * a2 / a1;
            let q_lo = if idx == 0 {
                int_above(&lower_ratio)
            } else {
                int_at_least(&lower_ratio)
            }
            .max(BigInt::one());
            // period bound: q < (tau*weight - p*d2) / (-d1)
            let mut q_hi = int_below(&((tau * &weight - &p_rat * &d2) / &neg_d1));
            // ratio upper bound q*b1 < p*b2, vacuous when b1 = 0
            if b1.is_positive() {
                let ratio_hi = int_below(&(&p_rat * b2 / b1));
                if ratio_hi < q_hi {
                    q_hi = ratio_hi;
                }
            }
            if q_hi >= q_lo {
                let span = (&q_hi - &q_lo + BigInt::one())
                    .to_u64()
                    .ok_or_else(|| Error::InvalidParameter("count overflow".into()))?;
                total = total
                    .checked_add(span)
                    .ok_or_else(|| Error::InvalidParameter("count overflow".into()))?;
            }
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Growth exponent
// ---------------------------------------------------------------------------

/// Polynomial growth degree of a count function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthRate {
    /// The count is identically zero.
    NegInfinity,
    /// Estimated polynomial degree.
    Finite(f64),
    /// Super-polynomial growth detected by the doubling test.
    Infinite,
}

impl GrowthRate {
    pub fn close_to(&self, other: &GrowthRate, tol: f64) -> bool {
        match (self, other) {
            (GrowthRate::NegInfinity, GrowthRate::NegInfinity) => true,
            (GrowthRate::Infinite, GrowthRate::Infinite) => true,
            (GrowthRate::Finite(a), GrowthRate::Finite(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }
}

/// Estimate the limit superior of `log count / log tau`.
///
/// The committed estimator: take the samples in the upper half of the
/// logarithmic tau range, form the upper concave envelope of their
/// `(log tau, log count)` points, and fit a least-squares line through the
/// envelope. Identically zero counts give minus infinity. Super-polynomial
/// growth is flagged when the local slopes keep growing: the last local
/// slope exceeding `max(4, 2 * median slope)` returns the infinite sentinel.
pub fn growth_exponent(cf: &CountFunction) -> Result<GrowthRate> {
    if cf.is_identically_zero() {
        return Ok(GrowthRate::NegInfinity);
    }
    let positive: Vec<(f64, f64)> = cf
        .samples
        .iter()
        .filter(|(t, c)| !c.is_zero() && t.is_positive())
        .map(|(t, c)| (rat_to_f64(t).ln(), biguint_ln(c)))
        .collect();
    if cf.samples.len() < 3 {
        return Err(Error::InsufficientSamples(
            "need at least three samples".into(),
        ));
    }
    let t_min = cf.samples.first().unwrap().0.clone();
    let t_max = cf.samples.last().unwrap().0.clone();
    if t_max / t_min < rat_int(100) {
        return Err(Error::InsufficientSamples(
            "samples must span at least two decades of tau".into(),
        ));
    }
    if positive.len() < 2 {
        return Ok(GrowthRate::Finite(0.0));
    }

    // doubling test on local slopes over the whole positive range: for a
    // polynomial count the slopes level off; for super-polynomial growth the
    // final slope dwarfs the median
    let slopes: Vec<f64> = positive
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    if !slopes.is_empty() {
        let mut sorted = slopes.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[sorted.len() / 2];
        let last = *slopes.last().unwrap();
        if last > f64::max(4.0, 2.0 * median) {
            return Ok(GrowthRate::Infinite);
        }
    }

    // restrict the fit to the upper half of the log range
    let x_min = positive.first().unwrap().0;
    let x_max = positive.last().unwrap().0;
    let half = (x_min + x_max) / 2.0;
    let mut upper: Vec<(f64, f64)> = positive.iter().copied().filter(|&(x, _)| x >= half).collect();
    if upper.len() < 2 {
        upper = positive.clone();
    }

    let hull = upper_envelope(&upper);
    Ok(GrowthRate::Finite(least_squares_slope(&hull)))
}

fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::MAX)
}

fn biguint_ln(x: &BigUint) -> f64 {
    // exact conversion fits f64 up to ~1e308; beyond that, use the bit length
    match x.to_f64() {
        Some(v) if v.is_finite() && v > 0.0 => v.ln(),
        _ => {
            let bits = x.bits();
            let top = (x >> bits.saturating_sub(53)) .to_f64().unwrap_or(1.0);
            top.ln() + (bits.saturating_sub(53)) as f64 * std::f64::consts::LN_2
        }
    }
}

/// Upper concave envelope of points sorted by x (monotone chain).
fn upper_envelope(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return 0.0;
    }
    (n * sxy - sx * sy) / denom
}

// ---------------------------------------------------------------------------
// Continuation-schedule bound
// ---------------------------------------------------------------------------

/// Length of the interval on which the decay condition is active: either an
/// exact rational or the logarithm of a rational (so that integer decay
/// constants give exactly rational bounds).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapLength {
    Exact(Rat),
    /// `LnOf(b)` stands for the length `ln b`, `b >= 1`.
    LnOf(Rat),
}

/// The minimal slope ratio `D = e^{length * C}`, kept symbolic: comparisons
/// against rationals are exact, via cleared exponents when the length is a
/// logarithm and via certified rational enclosures of the exponential
/// otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapBound {
    /// `D = e^x` with rational `x >= 0`.
    Exp { exponent: Rat },
    /// `D = base^(num/den)` with rational base `>= 1` and `num/den >= 0`.
    Power { base: Rat, num: BigInt, den: BigInt },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleGap {
    bound: GapBound,
}

/// The integrated decay condition: on an active interval of the given length
/// with decay constant `C`, the slopes at the two ends must satisfy
/// `tau_minus >= D * tau_plus` with `D = e^{length * C}`.
pub fn schedule_gap(c: Rat, length: GapLength) -> Result<ScheduleGap> {
    if c.is_negative() {
        return Err(Error::InvalidParameter("decay constant must be >= 0".into()));
    }
    let bound = match length {
        GapLength::Exact(l) => {
            if !l.is_positive() && !c.is_zero() {
                return Err(Error::InvalidParameter("interval length must be positive".into()));
            }
            GapBound::Exp { exponent: l * c }
        }
        GapLength::LnOf(b) => {
            if b < Rat::one() {
                return Err(Error::InvalidParameter(
                    "logarithmic length needs a base >= 1".into(),
                ));
            }
            if c.numer().to_u32().is_none() || c.denom().to_u32().is_none() {
                return Err(Error::InvalidParameter(
                    "decay constant too large for exact power comparisons".into(),
                ));
            }
            GapBound::Power {
                base: b,
                num: c.numer().clone(),
                den: c.denom().clone(),
            }
        }
    };
    Ok(ScheduleGap { bound })
}

impl ScheduleGap {
    pub fn bound(&self) -> &GapBound {
        &self.bound
    }

    /// Compare a positive rational against the bound `D`. Exact.
    pub fn compare_ratio(&self, ratio: &Rat) -> Ordering {
        match &self.bound {
            GapBound::Exp { exponent } => exp_compare(exponent, ratio).reverse(),
            GapBound::Power { base, num, den } => {
                // ratio ? base^(num/den)  <=>  ratio^den ? base^num
                let num_u = num.to_u32().unwrap_or(u32::MAX);
                let den_u = den.to_u32().unwrap_or(u32::MAX);
                let lhs = pow_rat(ratio, den_u);
                let rhs = pow_rat(base, num_u);
                lhs.cmp(&rhs)
            }
        }
    }

    /// Admissibility of a slope pair: `tau_minus >= D * tau_plus`.
    pub fn admissible(&self, tau_plus: &Rat, tau_minus: &Rat) -> Result<bool> {
        if !tau_plus.is_positive() || !tau_minus.is_positive() {
            return Err(Error::InvalidParameter("slopes must be positive".into()));
        }
        let ratio = tau_minus / tau_plus;
        Ok(self.compare_ratio(&ratio) != Ordering::Less)
    }

    /// Floating approximation for reports.
    pub fn bound_f64(&self) -> f64 {
        match &self.bound {
            GapBound::Exp { exponent } => rat_to_f64(exponent).exp(),
            GapBound::Power { base, num, den } => {
                let e = num.to_f64().unwrap_or(0.0) / den.to_f64().unwrap_or(1.0);
                rat_to_f64(base).powf(e)
            }
        }
    }
}

fn pow_rat(x: &Rat, e: u32) -> Rat {
    let mut out = Rat::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            out *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    out
}

/// Exact comparison of `e^x` against a rational `r`, by certified rational
/// enclosures of the exponential (argument scaling plus Taylor with a tail
/// bound). The exponential of a nonzero rational is irrational, so the
/// refinement terminates.
pub fn exp_compare(x: &Rat, r: &Rat) -> Ordering {
    if !r.is_positive() {
        return Ordering::Greater;
    }
    if x.is_zero() {
        return Rat::one().cmp(r);
    }
    let y = x.abs();
    // scale the argument into (0, 1/2]
    let mut halvings = 0u32;
    let mut z = y.clone();
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    while z > half {
        z /= rat_int(2);
        halvings += 1;
    }
    let mut terms = 16usize;
    loop {
        // Taylor with tail bound: for z <= 1/2 the tail after N terms is at
        // most twice the first omitted term
        let mut sum = Rat::one();
        let mut term = Rat::one();
        for k in 1..=terms {
            term = term * &z / rat_int(k as i64);
            sum += &term;
        }
        let tail = term * &z / rat_int(terms as i64 + 1) * rat_int(2);
        let mut lo = sum.clone();
        let mut hi = sum + tail;
        for _ in 0..halvings {
            lo = &lo * &lo;
            hi = &hi * &hi;
        }
        if x.is_negative() {
            (lo, hi) = (hi.recip(), lo.recip());
        }
        if r < &lo {
            return Ordering::Greater;
        }
        if r > &hi {
            return Ordering::Less;
        }
        terms *= 2;
        assert!(
            terms <= 1 << 14,
            "exponential comparison failed to separate; the compared value \
             matches e^x beyond plausible precision"
        );
    }
}

// ---------------------------------------------------------------------------
// Ladder verification
// ---------------------------------------------------------------------------

/// Outcome of a ladder check between two count functions.
#[derive(Debug, Clone, PartialEq)]
pub enum LadderVerdict {
    Pass {
        exponent_plus: GrowthRate,
        exponent_minus: GrowthRate,
    },
    /// The sandwich inequality failed at the witness threshold.
    Violation { tau: Rat, detail: String },
    /// The sandwich holds but the growth estimates disagree.
    ExponentMismatch {
        exponent_plus: GrowthRate,
        exponent_minus: GrowthRate,
    },
}

/// Check the sandwich `r_plus(tau) <= r_minus(D tau) <= r_plus(D^2 tau)` on
/// every `r_plus` sample in the range, then compare growth exponents within
/// the tolerance.
pub fn ladder_verify(
    r_plus: &CountFunction,
    r_minus: &CountFunction,
    d: &Rat,
    range: (&Rat, &Rat),
    tol: f64,
) -> Result<LadderVerdict> {
    if d <= &Rat::one() {
        return Err(Error::InvalidParameter("the ratio bound must exceed 1".into()));
    }
    for (tau, _) in r_plus
        .samples
        .iter()
        .filter(|(t, _)| t >= range.0 && t <= range.1)
    {
        let lhs = r_plus.eval(tau);
        let mid = r_minus.eval(&(tau * d));
        let rhs = r_plus.eval(&(tau * d * d));
        if lhs > mid {
            return Ok(LadderVerdict::Violation {
                tau: tau.clone(),
                detail: format!("r_plus({tau}) = {lhs} exceeds r_minus(D tau) = {mid}"),
            });
        }
        if mid > rhs {
            return Ok(LadderVerdict::Violation {
                tau: tau.clone(),
                detail: format!("r_minus(D tau) = {mid} exceeds r_plus(D^2 tau) = {rhs}"),
            });
        }
    }
    let exponent_plus = growth_exponent(r_plus)?;
    let exponent_minus = growth_exponent(r_minus)?;
    if exponent_plus.close_to(&exponent_minus, tol) {
        Ok(LadderVerdict::Pass {
            exponent_plus,
            exponent_minus,
        })
    } else {
        Ok(LadderVerdict::ExponentMismatch {
            exponent_plus,
            exponent_minus,
        })
    }
}

/// Lattice count in the sup norm: nonzero vectors of `Z^n` with norm at most
/// `bound`; closed form `(2 bound + 1)^n - 1`.
pub fn lattice_count(n: u32, bound: u64) -> BigUint {
    let side = BigUint::from(2 * bound + 1);
    let mut out = BigUint::one();
    for _ in 0..n {
        out *= &side;
    }
    out - BigUint::one()
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

    #[test]
    fn quadratic_profile_orbits_are_exact() {
        // h = rho^2, primitive period 1, tau_max 6: orbits at rho = m/2 with
        // action -m^2/4
        let profile = RadialProfile::quadratic(rr(1, 2), r(4)).unwrap();
        let spectrum = ReebSpectrum::Circle { primitive: r(1) };
        let orbits = orbit_spectrum(&profile, &spectrum, &r(6)).unwrap();
        assert_eq!(orbits.len(), 6);
        for (m, orbit) in orbits.iter().enumerate() {
            let m = m as i64 + 1;
            assert_eq!(orbit.period, r(m));
            assert_eq!(orbit.rho, rr(m, 2));
            assert_eq!(orbit.action, rr(-m * m, 4));
        }
        // strictly decreasing actions
        for w in orbits.windows(2) {
            assert!(w[1].action < w[0].action);
        }
        // all actions negative
        assert!(orbits.iter().all(|o| o.action.is_negative()));
    }

    #[test]
    fn slope_at_infinity_truncates_the_spectrum() {
        let profile = RadialProfile::new(
            vec![(r(1), r(0), r(0)), (r(2), r(1), r(2))],
            Slope::Finite(rr(1, 2)),
        )
        .unwrap();
        let spectrum = ReebSpectrum::Circle { primitive: r(1) };
        assert!(orbit_spectrum(&profile, &spectrum, &r(10)).unwrap().is_empty());
    }

    #[test]
    fn flat_segments_are_rejected_when_hit() {
        let profile = RadialProfile::new(
            vec![(r(1), r(0), r(1)), (r(2), r(1), r(1)), (r(3), r(3), r(3))],
            Slope::Infinite,
        )
        .unwrap();
        let spectrum = ReebSpectrum::Explicit(vec![(r(1), 1)]);
        assert!(matches!(
            orbit_spectrum(&profile, &spectrum, &r(5)),
            Err(Error::DegenerateSlope(_))
        ));
        // a period on the strictly increasing part still works
        let spectrum = ReebSpectrum::Explicit(vec![(r(2), 1)]);
        assert!(orbit_spectrum(&profile, &spectrum, &r(5)).is_ok());
    }

    #[test]
    fn ball_degrees_match_the_closed_form() {
        assert_eq!(ball_cf_degrees(3, 0, 4), vec![-3, -4, -9, -10]);
        assert_eq!(ball_cf_degrees(1, 0, 4), vec![-1, -2, -3, -4]);
        assert_eq!(ball_cf_degrees(2, 1, 2), vec![-6, -7]);
        // pairwise distinct, all <= -n
        let degs = ball_cf_degrees(4, 0, 12);
        let set: std::collections::BTreeSet<_> = degs.iter().collect();
        assert_eq!(set.len(), degs.len());
        assert!(degs.iter().all(|&d| d <= -4));
    }

    #[test]
    fn ball_tower_has_zero_limit_and_trace() {
        let sys = ball_truncated_tower(2, 3).unwrap();
        let stages: Vec<i64> = sys
            .stages()
            .iter()
            .map(|s| s.explicit_degrees().next().unwrap())
            .collect();
        assert_eq!(stages, vec![-2, -6, -10, -14]);
        let lim = sys.direct_limit().unwrap();
        assert!(lim.limit.is_zero());
        let trace = tower_growth_trace(&sys).unwrap();
        assert!(trace.is_identically_zero());
        assert_eq!(growth_exponent(&trace).unwrap(), GrowthRate::NegInfinity);
        // single stage: the limit is the stage
        let single = ball_truncated_tower(2, 0).unwrap();
        let lim = single.direct_limit().unwrap();
        assert_eq!(lim.limit, single.stages()[0]);
    }

    #[test]
    fn linear_profile_torus_count_matches_the_closed_form() {
        let profile = TorusPieceProfile::linear();
        for tau in [3i64, 5, 10, 37] {
            let got = count_torus_orbits(&profile, &r(tau)).unwrap();
            let want = ((tau - 1) * (tau - 2) / 2) as u64;
            assert_eq!(got, want, "tau = {tau}");
        }
        assert_eq!(count_torus_orbits(&profile, &r(2)).unwrap(), 0);
        assert_eq!(count_torus_orbits(&profile, &rr(3, 2)).unwrap(), 0);
    }

    #[test]
    fn torus_count_is_monotone_in_tau() {
        let profile = TorusPieceProfile::new(vec![
            (r(-2), r(3), r(0)),
            (r(0), r(2), r(1)),
            (r(2), r(0), r(2)),
        ])
        .unwrap();
        let mut last = 0;
        for tau in 1..=40i64 {
            let c = count_torus_orbits(&profile, &r(tau)).unwrap();
            assert!(c >= last, "tau = {tau}");
            last = c;
        }
    }

    #[test]
    fn growth_exponent_examples() {
        // floor(tau): exponent 1
        let samples: Vec<(i64, u64)> = (3..=13).map(|k| (1 << k, 1u64 << k)).collect();
        let linear = CountFunction::from_u64_samples(&samples).unwrap();
        assert!(growth_exponent(&linear)
            .unwrap()
            .close_to(&GrowthRate::Finite(1.0), 0.05));

        // constant: exponent 0
        let samples: Vec<(i64, u64)> = (0..=10).map(|k| (1 << k, 7u64)).collect();
        let constant = CountFunction::from_u64_samples(&samples).unwrap();
        assert!(growth_exponent(&constant)
            .unwrap()
            .close_to(&GrowthRate::Finite(0.0), 0.05));

        // lattice counts: exponent n
        for n in [2u32, 3] {
            let samples: Vec<(Rat, BigUint)> = (3..=13)
                .map(|k| (r(1 << k), lattice_count(n, 1 << k)))
                .collect();
            let cf = CountFunction::from_samples(samples).unwrap();
            assert!(
                growth_exponent(&cf)
                    .unwrap()
                    .close_to(&GrowthRate::Finite(n as f64), 0.05),
                "n = {n}"
            );
        }

        // exponential: infinite sentinel
        let samples: Vec<(Rat, BigUint)> = (0..=9)
            .map(|k| {
                let tau = 1i64 << k;
                (r(tau), BigUint::from(2u32).pow(tau as u32))
            })
            .collect();
        let expo = CountFunction::from_samples(samples).unwrap();
        assert_eq!(growth_exponent(&expo).unwrap(), GrowthRate::Infinite);
    }

    #[test]
    fn growth_exponent_preconditions() {
        let two = CountFunction::from_u64_samples(&[(1, 1), (2, 2)]).unwrap();
        assert!(matches!(
            growth_exponent(&two),
            Err(Error::InsufficientSamples(_))
        ));
        let narrow = CountFunction::from_u64_samples(&[(8, 1), (16, 2), (32, 4)]).unwrap();
        assert!(matches!(
            growth_exponent(&narrow),
            Err(Error::InsufficientSamples(_))
        ));
    }

    #[test]
    fn growth_exponent_is_scale_invariant() {
        let base: Vec<(i64, u64)> = (3..=13).map(|k| (1 << k, (1u64 << k).pow(2))).collect();
        let cf = CountFunction::from_u64_samples(&base).unwrap();
        let scaled = CountFunction::from_samples(
            cf.samples()
                .iter()
                .map(|(t, c)| (t.clone(), c * BigUint::from(5u32)))
                .collect(),
        )
        .unwrap();
        let stretched = CountFunction::from_samples(
            cf.samples()
                .iter()
                .map(|(t, c)| (t * r(3), c.clone()))
                .collect(),
        )
        .unwrap();
        let e0 = growth_exponent(&cf).unwrap();
        let e1 = growth_exponent(&scaled).unwrap();
        let e2 = growth_exponent(&stretched).unwrap();
        assert!(e0.close_to(&e1, 1e-9));
        assert!(e0.close_to(&e2, 1e-9));
    }

    #[test]
    fn schedule_gap_examples() {
        // C = 1, length = ln 2: the bound is exactly 2
        let gap = schedule_gap(r(1), GapLength::LnOf(r(2))).unwrap();
        assert!(gap.admissible(&r(3), &r(6)).unwrap());
        assert!(!gap.admissible(&r(3), &(r(6) - rr(1, 1000))).unwrap());
        assert_eq!(gap.compare_ratio(&r(2)), Ordering::Equal);

        // C = 0: the condition degenerates to tau_minus >= tau_plus
        let flat = schedule_gap(r(0), GapLength::Exact(r(5))).unwrap();
        assert!(flat.admissible(&r(4), &r(4)).unwrap());
        assert!(!flat.admissible(&r(4), &(r(4) - rr(1, 7))).unwrap());

        // an irrational bound: e^{1} sits between 2.718 and 2.719
        let e1 = schedule_gap(r(1), GapLength::Exact(r(1))).unwrap();
        assert!(e1.admissible(&r(1000), &r(2719)).unwrap());
        assert!(!e1.admissible(&r(1000), &r(2718)).unwrap());
    }

    #[test]
    fn exp_compare_brackets_the_constant() {
        assert_eq!(exp_compare(&r(0), &r(1)), Ordering::Equal);
        assert_eq!(exp_compare(&r(1), &rr(2718281828, 1000000000)), Ordering::Greater);
        assert_eq!(exp_compare(&r(1), &rr(2718281829, 1000000000)), Ordering::Less);
        assert_eq!(exp_compare(&r(-1), &rr(367879441, 1000000000)), Ordering::Greater);
        assert_eq!(exp_compare(&r(-1), &rr(367879442, 1000000000)), Ordering::Less);
    }

    #[test]
    fn ladder_examples() {
        // samples extend past the checked range by D^2 so the step
        // evaluations do not saturate
        let taus: Vec<i64> = (3..=15).map(|k| 1 << k).collect();
        let quad = |t: i64| (t * t) as u64;
        let r_plus =
            CountFunction::from_u64_samples(&taus.iter().map(|&t| (t, quad(t))).collect::<Vec<_>>())
                .unwrap();
        let r_minus = CountFunction::from_u64_samples(
            &taus.iter().map(|&t| (t, quad(t) / 2)).collect::<Vec<_>>(),
        )
        .unwrap();
        let verdict =
            ladder_verify(&r_plus, &r_minus, &r(2), (&r(8), &r(8192)), 0.05).unwrap();
        match verdict {
            LadderVerdict::Pass {
                exponent_plus,
                exponent_minus,
            } => {
                assert!(exponent_plus.close_to(&GrowthRate::Finite(2.0), 0.05));
                assert!(exponent_minus.close_to(&GrowthRate::Finite(2.0), 0.05));
            }
            v => panic!("expected a pass, got {v:?}"),
        }

        // equal constants pass with exponent zero
        let c1 = CountFunction::from_u64_samples(
            &taus.iter().map(|&t| (t, 3u64)).collect::<Vec<_>>(),
        )
        .unwrap();
        let verdict = ladder_verify(&c1, &c1, &r(10), (&r(8), &r(8192)), 0.05).unwrap();
        assert!(matches!(verdict, LadderVerdict::Pass { .. }));

        // collapsing lower function: violation at the first positive sample
        let zero = CountFunction::from_u64_samples(
            &taus.iter().map(|&t| (t, 0u64)).collect::<Vec<_>>(),
        )
        .unwrap();
        let lin = CountFunction::from_u64_samples(
            &taus.iter().map(|&t| (t, t as u64)).collect::<Vec<_>>(),
        )
        .unwrap();
        match ladder_verify(&lin, &zero, &r(2), (&r(8), &r(8192)), 0.05).unwrap() {
            LadderVerdict::Violation { tau, .. } => assert_eq!(tau, r(8)),
            v => panic!("expected a violation, got {v:?}"),
        }
    }

    #[test]
    fn count_function_text_round_trip() {
        let cf = CountFunction::from_samples(vec![
            (rr(1, 2), BigUint::zero()),
            (r(2), BigUint::from(5u32)),
            (r(100), BigUint::from(10u32).pow(30)),
        ])
        .unwrap();
        let text = cf.to_text();
        let back = CountFunction::from_text(&text).unwrap();
        assert_eq!(back, cf);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn torus_profile_validation_and_parsing() {
        assert!(TorusPieceProfile::new(vec![
            (r(-1), r(1), r(0)),
            (r(1), r(2), r(1)), // xi1 increased
        ])
        .is_err());
        let parsed = TorusPieceProfile::from_text("-1 1 0\n0 1/2 1/2\n1 0 1\n").unwrap();
        assert_eq!(parsed.samples().len(), 3);
        assert_eq!(
            count_torus_orbits(&parsed, &r(5)).unwrap(),
            count_torus_orbits(&TorusPieceProfile::linear(), &r(5)).unwrap()
        );
    }
}
