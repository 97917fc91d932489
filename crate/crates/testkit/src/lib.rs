//! Independent oracles for the test suites.
//!
//! Everything in here is written against plain data (`Vec<Vec<BigRational>>`,
//! `BTreeMap`, `f64`) and must stay free of any dependency on the engine crate,
//! so that a disagreement between an oracle and the engine means something.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// Brute-force rank by plain Gaussian elimination
// ---------------------------------------------------------------------------

/// Rank of a rational matrix, by forward elimination only. This is a second,
/// deliberately naive implementation: no pivot bookkeeping, no Jordan steps.
pub fn rank_rational(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..nrows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[rank][col];
            for c in col..ncols {
                let v = &m[r][c] - &factor * &m[rank][c];
                m[r][c] = v;
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Rank of an integer matrix mod p, with bare i128 arithmetic.
pub fn rank_mod_p(rows: &[Vec<i64>], p: u64) -> usize {
    let p = p as i128;
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| (x as i128).rem_euclid(p)).collect())
        .collect();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..nrows).find(|&r| m[r][col] % p != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = mod_inv(m[rank][col], p);
        for r in rank + 1..nrows {
            if m[r][col] % p == 0 {
                continue;
            }
            let factor = (m[r][col] * inv).rem_euclid(p);
            for c in col..ncols {
                m[r][c] = (m[r][c] - factor * m[rank][c]).rem_euclid(p);
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

fn mod_inv(a: i128, p: i128) -> i128 {
    let (mut r0, mut r1) = (a.rem_euclid(p), p);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p)
}

/// Cohomology dimensions of a three-term complex `U -d_in-> V -d_out-> W`
/// at `V`, from first principles: dim ker(d_out) - rank(d_in).
/// Matrices are given as (rows x cols) rational arrays; `d_in` has
/// dim V rows, `d_out` has dim V columns.
pub fn homology_dim_rational(d_in: &[Vec<Rat>], d_out: &[Vec<Rat>], dim_v: usize) -> usize {
    let rank_in = rank_rational(d_in);
    let rank_out = rank_rational(d_out);
    dim_v - rank_out - rank_in
}

// ---------------------------------------------------------------------------
// Gysin-sequence oracle for sphere bundles over spheres
// ---------------------------------------------------------------------------

/// Cohomology ranks of the unit tangent bundle of the n-sphere over a field of
/// the given characteristic, read off the long exact sequence of the sphere
/// bundle S^{n-1} -> UT(S^n) -> S^n with Euler number chi(S^n).
///
/// The sequence splits into pieces
///   0 -> coker(e: H^{k-n} -> H^k) -> H^k(UT) -> ker(e: H^{k-n+1} -> H^{k+1}) -> 0
/// where e is cup product with chi times the generator.
pub fn gysin_unit_bundle_ranks(n: u32, characteristic: u64) -> BTreeMap<i64, usize> {
    let n = n as i64;
    let base = |k: i64| -> usize {
        if k == 0 || k == n {
            1
        } else {
            0
        }
    };
    let chi: i64 = if n % 2 == 0 { 2 } else { 0 };
    let chi_is_zero = if characteristic == 0 {
        chi == 0
    } else {
        chi.rem_euclid(characteristic as i64) == 0
    };
    // e: H^{k}(S^n) -> H^{k+n}(S^n) can only be nonzero for k = 0
    let e_rank = |k: i64| -> usize {
        if k == 0 && !chi_is_zero {
            1
        } else {
            0
        }
    };
    let mut out = BTreeMap::new();
    for k in 0..=(2 * n) {
        let coker = base(k) - e_rank(k - n).min(base(k));
        let kernel = base(k - n + 1) - e_rank(k - n + 1);
        let d = coker + kernel;
        if d > 0 {
            out.insert(k, d);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Lattice enumeration
// ---------------------------------------------------------------------------

/// Number of nonzero integer vectors in Z^n with sup-norm at most `bound`,
/// counted one by one.
pub fn lattice_count_enumerated(n: u32, bound: u64) -> u128 {
    let side = 2 * bound + 1;
    let total = (0..n).fold(1u128, |acc, _| acc * side as u128);
    total - 1 // remove the origin
}

/// Same count by explicit recursion over coordinates, for cross-checking the
/// closed form on small inputs.
pub fn lattice_count_recursive(n: u32, bound: i64) -> u128 {
    fn go(n: u32, bound: i64, v: &mut Vec<i64>, acc: &mut u128) {
        if n == 0 {
            if v.iter().any(|&x| x != 0) {
                *acc += 1;
            }
            return;
        }
        for x in -bound..=bound {
            v.push(x);
            go(n - 1, bound, v, acc);
            v.pop();
        }
    }
    let mut acc = 0;
    go(n, bound, &mut Vec::new(), &mut acc);
    acc
}

// ---------------------------------------------------------------------------
// RK4 integration for the continuation-slope decay bound
// ---------------------------------------------------------------------------

/// Integrate d tau / ds = c * tau + c from tau(0) = tau_start over [0, length]
/// with classical RK4 and `steps` steps. This is the reversed-time form of the
/// decay condition, so the result is the slope required at the other end.
pub fn rk4_slope_growth(c: f64, length: f64, tau_start: f64, steps: usize) -> f64 {
    let h = length / steps as f64;
    let f = |tau: f64| c * tau + c;
    let mut tau = tau_start;
    for _ in 0..steps {
        let k1 = f(tau);
        let k2 = f(tau + 0.5 * h * k1);
        let k3 = f(tau + 0.5 * h * k2);
        let k4 = f(tau + h * k3);
        tau += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    tau
}

// ---------------------------------------------------------------------------
// Minimal truncated series with rational exponents, for the mu^k summation
// ---------------------------------------------------------------------------

/// Terms of a truncated series: exponent -> coefficient, all exponents below
/// the truncation order handled by the caller.
pub type SeriesMap = BTreeMap<Rat, Rat>;

pub fn series_add(a: &SeriesMap, b: &SeriesMap) -> SeriesMap {
    let mut out = a.clone();
    for (e, c) in b {
        let v = out.entry(e.clone()).or_insert_with(Rat::zero);
        *v += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn series_scale(a: &SeriesMap, k: &Rat) -> SeriesMap {
    if k.is_zero() {
        return SeriesMap::new();
    }
    a.iter().map(|(e, c)| (e.clone(), c * k)).collect()
}

pub fn series_mul(a: &SeriesMap, b: &SeriesMap, trunc: &Rat) -> SeriesMap {
    let mut out = SeriesMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea + eb;
            if &e >= trunc {
                continue;
            }
            let v = out.entry(e).or_insert_with(Rat::zero);
            *v += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// k-fold product a^k, truncated.
pub fn series_pow(a: &SeriesMap, k: u32, trunc: &Rat) -> SeriesMap {
    let mut out = SeriesMap::new();
    out.insert(Rat::zero(), Rat::one());
    for _ in 0..k {
        out = series_mul(&out, a, trunc);
    }
    out
}

/// The obstruction sum computed term by term from the k-fold products:
/// sum over k >= 0 and classes alpha of
///   count * t^area * (alpha . a)^k / k!,
/// where `pairings[i]` is the series alpha_i . a. Independent of any formal
/// exponential routine.
pub fn mu_sum_oracle(
    discs: &[(Rat /*area*/, Rat /*count*/)],
    pairings: &[SeriesMap],
    trunc: &Rat,
) -> SeriesMap {
    let mut total = SeriesMap::new();
    for (i, (area, count)) in discs.iter().enumerate() {
        if area >= trunc {
            continue;
        }
        let mut k_factorial = Rat::one();
        let mut k = 0u32;
        loop {
            if k > 0 {
                k_factorial *= int(k as i64);
            }
            // lowest exponent of (alpha.a)^k is k * min_exp; stop once it
            // cannot contribute below the truncation
            if k > 0 {
                let min_exp = pairings[i].keys().next().cloned();
                match min_exp {
                    None => break,
                    Some(me) => {
                        if area + &me * int(k as i64) >= *trunc {
                            break;
                        }
                    }
                }
            }
            let powed = series_pow(&pairings[i], k, trunc);
            let mut term = series_scale(&powed, &(count / &k_factorial));
            // shift by t^area
            term = term
                .into_iter()
                .filter_map(|(e, c)| {
                    let shifted = &e + area;
                    if &shifted < trunc {
                        Some((shifted, c))
                    } else {
                        None
                    }
                })
                .collect();
            total = series_add(&total, &term);
            if k > 64 {
                break; // safety stop; unreachable for positive-exponent input
            }
            k += 1;
        }
    }
    total
}

// ---------------------------------------------------------------------------
// Brute-force torus-piece orbit counting
// ---------------------------------------------------------------------------

/// Count pairs (p, q) of positive integers whose direction is attained inside
/// the open interval of a piecewise-linear speed profile and whose common
/// period is < tau. Enumerates every candidate pair individually.
///
/// `profile` holds (s, xi1, xi2) samples with xi1 strictly decreasing and xi2
/// strictly increasing.
pub fn torus_orbit_count_bruteforce(profile: &[(Rat, Rat, Rat)], tau: &Rat) -> u64 {
    assert!(profile.len() >= 2);
    let first = profile.first().unwrap();
    let last = profile.last().unwrap();
    // ratio q/p must lie strictly between the endpoint ratios xi2/xi1
    let lo_num = &first.2; // ratio lower bound = xi2(first)/xi1(first)
    let lo_den = &first.1;
    let hi_num = &last.2;
    let hi_den = &last.1;

    let max_xi1 = &first.1; // xi1 decreasing
    let max_xi2 = &last.2; // xi2 increasing
    let p_max = (tau * max_xi1).to_integer();
    let q_max = (tau * max_xi2).to_integer();
    let p_max = num::ToPrimitive::to_i64(&p_max).unwrap().max(0);
    let q_max = num::ToPrimitive::to_i64(&q_max).unwrap().max(0);

    let mut count = 0u64;
    for p in 1..=p_max {
        for q in 1..=q_max {
            let pr = int(p);
            let qr = int(q);
            // strict interior: lo_num/lo_den < q/p < hi_num/hi_den
            if &qr * lo_den <= &pr * lo_num {
                continue;
            }
            if &qr * hi_den >= &pr * hi_num {
                continue;
            }
            // find the segment where xi2/xi1 crosses q/p and solve linearly
            let mut period: Option<Rat> = None;
            for w in profile.windows(2) {
                let (s0, a1, a2) = (&w[0].0, &w[0].1, &w[0].2);
                let (s1, b1, b2) = (&w[1].0, &w[1].1, &w[1].2);
                // g(s) = xi2(s) * p - xi1(s) * q, linear on the segment
                let g0 = a2 * &pr - a1 * &qr;
                let g1 = b2 * &pr - b1 * &qr;
                if g0.is_positive() || g1.is_negative() {
                    continue;
                }
                let denom = &g1 - &g0;
                if denom.is_zero() {
                    continue;
                }
                let t = -&g0 / &denom; // in [0, 1]
                let xi1_star = a1 + (b1 - a1) * &t;
                let _ = (s0, s1);
                period = Some(&pr / &xi1_star);
                break;
            }
            if let Some(t_period) = period {
                if &t_period < tau {
                    count += 1;
                }
            }
        }
    }
    count
}
