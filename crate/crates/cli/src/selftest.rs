//! The `selftest` command: golden-file comparisons for the four builtin
//! spectral cases plus seeded, self-contained property suites. The report is
//! byte-deterministic for a fixed seed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use liouville_core::novikov::NovikovSeries;
use liouville_core::reeb::{
    count_torus_orbits, ladder_verify, schedule_gap, CountFunction, GapLength, LadderVerdict,
    TorusPieceProfile,
};
use liouville_core::{homology, FieldTag, GradedMap, GradedSpace, Grading, Matrix};
use num::bigint::BigInt;
use num::{BigRational, BigUint};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::{OutputFormat, Report, REPORT_VERSION};
use crate::run::{cmd_ss, CliResult, RunConfig};

const GOLDEN: &[(&str, &str)] = &[
    ("ball(3)", include_str!("../golden/ball3.json")),
    ("surface(2)", include_str!("../golden/surface2.json")),
    (
        "tstar_sphere(4)",
        include_str!("../golden/tstar_sphere4.json"),
    ),
    (
        "s2_equivariant",
        include_str!("../golden/s2_equivariant.json"),
    ),
];

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rr(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Run every check; the boolean reports overall success.
pub fn cmd_selftest(cfg: &RunConfig) -> CliResult<(Report, bool)> {
    let mut checks = Vec::new();

    for (case, want) in GOLDEN {
        let got = cmd_ss(case, &RunConfig::default())?.render(OutputFormat::Json);
        checks.push(Check {
            name: format!("golden {case}"),
            ok: got == *want,
            detail: if got == *want {
                "byte-identical".into()
            } else {
                format!("{} bytes computed vs {} in the golden file", got.len(), want.len())
            },
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    checks.push(euler_check(&mut rng));
    checks.push(exponential_check(&mut rng));
    checks.push(ladder_check(&mut rng));
    checks.push(torus_count_check());
    checks.push(schedule_check());
    checks.push(round_trip_check(&mut rng));
    checks.push(determinism_check()?);

    let all_ok = checks.iter().all(|c| c.ok);
    let json_checks: Vec<serde_json::Value> = checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "status": if c.ok { "ok" } else { "fail" },
                "detail": c.detail,
            })
        })
        .collect();
    let json = json!({
        "version": REPORT_VERSION,
        "command": "selftest",
        "seed": cfg.seed,
        "checks": json_checks,
        "passed": checks.iter().filter(|c| c.ok).count(),
        "failed": checks.iter().filter(|c| !c.ok).count(),
    });
    let mut text = String::new();
    for c in &checks {
        let _ = writeln!(
            text,
            "{} {} ({})",
            if c.ok { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let _ = writeln!(
        text,
        "selftest: {}/{} checks passed",
        checks.iter().filter(|c| c.ok).count(),
        checks.len()
    );
    Ok((Report { json, text }, all_ok))
}

/// Random shift-1 differential with square zero, built degree by degree.
fn random_complex(rng: &mut ChaCha8Rng) -> (GradedSpace, GradedMap) {
    let field = FieldTag::rationals();
    let n_degrees = rng.gen_range(2..=4usize);
    let dims: Vec<(i64, usize)> = (0..n_degrees)
        .filter_map(|d| {
            let dim = rng.gen_range(0..=3usize);
            (dim > 0).then_some((d as i64, dim))
        })
        .collect();
    let v = GradedSpace::from_dims(field, Grading::Integer, &dims).unwrap();
    let mut blocks: BTreeMap<i64, Matrix> = BTreeMap::new();
    for d in (0..n_degrees as i64).rev() {
        let rows = v.dim_at(d + 1);
        let cols = v.dim_at(d);
        if rows == 0 || cols == 0 {
            continue;
        }
        let next = blocks
            .get(&(d + 1))
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(field, v.dim_at(d + 2), rows));
        let kernel = next.kernel_basis();
        let mut block = Matrix::zeros(field, rows, cols);
        for j in 0..cols {
            for kv in &kernel {
                let c = rng.gen_range(-2i64..=2);
                if c == 0 {
                    continue;
                }
                let coeff = field.from_i64(c);
                for (i, entry) in kv.iter().enumerate() {
                    let add = field.mul(&coeff, entry);
                    let cur = block.get(i, j).clone();
                    block.set(i, j, field.add(&cur, &add));
                }
            }
        }
        if !block.is_zero() {
            blocks.insert(d, block);
        }
    }
    let map = GradedMap::new(v.clone(), v.clone(), 1, blocks).unwrap();
    (v, map)
}

fn euler_check(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..100 {
        let (v, d) = random_complex(rng);
        let h = match homology(&d, &d) {
            Ok(h) => h,
            Err(e) => {
                return Check {
                    name: "homology alternating sum".into(),
                    ok: false,
                    detail: format!("case {case}: {e}"),
                }
            }
        };
        let chi = |s: &GradedSpace| -> i64 {
            (-1..8i64)
                .map(|deg| {
                    let sign = if deg.rem_euclid(2) == 0 { 1 } else { -1 };
                    sign * s.dim_at(deg) as i64
                })
                .sum()
        };
        if chi(&v) != chi(&h) {
            return Check {
                name: "homology alternating sum".into(),
                ok: false,
                detail: format!("case {case}: {} vs {}", chi(&v), chi(&h)),
            };
        }
    }
    Check {
        name: "homology alternating sum".into(),
        ok: true,
        detail: "100 random complexes".into(),
    }
}

fn exponential_check(rng: &mut ChaCha8Rng) -> Check {
    let trunc = rat(5);
    for case in 0..100 {
        let n_terms = rng.gen_range(0..=3usize);
        let terms: Vec<(BigRational, BigRational)> = (0..n_terms)
            .map(|_| {
                (
                    rr(rng.gen_range(1i64..=6), rng.gen_range(1i64..=3)),
                    rr(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3)),
                )
            })
            .collect();
        let a = NovikovSeries::from_terms(&terms, trunc.clone()).unwrap();
        let product = match (a.exp(), a.scale(&rat(-1)).exp()) {
            (Ok(e), Ok(en)) => e.mul(&en),
            _ => {
                return Check {
                    name: "exponential inverse identity".into(),
                    ok: false,
                    detail: format!("case {case}: exponential failed"),
                }
            }
        };
        if product != NovikovSeries::one(trunc.clone()).unwrap() {
            return Check {
                name: "exponential inverse identity".into(),
                ok: false,
                detail: format!("case {case}"),
            };
        }
    }
    Check {
        name: "exponential inverse identity".into(),
        ok: true,
        detail: "100 random series".into(),
    }
}

fn ladder_check(rng: &mut ChaCha8Rng) -> Check {
    let taus: Vec<i64> = (3..=15).map(|k| 1i64 << k).collect();
    for case in 0..50 {
        let degree = rng.gen_range(0u32..=4);
        let scale = rng.gen_range(1u64..=5);
        let d = rat(if rng.gen_bool(0.5) { 2 } else { 10 });
        let count = |t: i64| -> BigUint {
            BigUint::from(scale) * BigUint::from(t as u64).pow(degree)
        };
        let r_plus = CountFunction::from_samples(
            taus.iter().map(|&t| (rat(t), count(t))).collect(),
        )
        .unwrap();
        // r_minus(tau) = r_plus(tau / D) satisfies the sandwich on the nose
        let r_minus = CountFunction::from_samples(
            taus.iter()
                .map(|&t| {
                    let arg = rat(t) / &d;
                    (rat(t), r_plus.eval(&arg))
                })
                .collect(),
        )
        .unwrap();
        let verdict = ladder_verify(&r_plus, &r_minus, &d, (&rat(8), &rat(2048)), 0.05);
        match verdict {
            Ok(LadderVerdict::Pass { .. }) => {}
            other => {
                return Check {
                    name: "ladder sandwich".into(),
                    ok: false,
                    detail: format!("case {case} (degree {degree}, D {d}): {other:?}"),
                }
            }
        }
    }
    Check {
        name: "ladder sandwich".into(),
        ok: true,
        detail: "50 sandwiched pairs".into(),
    }
}

fn torus_count_check() -> Check {
    let profile = TorusPieceProfile::linear();
    for tau in 2..=60i64 {
        let got = match count_torus_orbits(&profile, &rat(tau)) {
            Ok(c) => c,
            Err(e) => {
                return Check {
                    name: "torus count closed form".into(),
                    ok: false,
                    detail: e.to_string(),
                }
            }
        };
        let want = ((tau - 1) * (tau - 2) / 2) as u64;
        if got != want {
            return Check {
                name: "torus count closed form".into(),
                ok: false,
                detail: format!("tau {tau}: {got} vs {want}"),
            };
        }
    }
    Check {
        name: "torus count closed form".into(),
        ok: true,
        detail: "tau up to 60".into(),
    }
}

fn schedule_check() -> Check {
    for c in 1i64..=4 {
        for base in 2i64..=4 {
            let gap = match schedule_gap(rat(c), GapLength::LnOf(rat(base))) {
                Ok(g) => g,
                Err(e) => {
                    return Check {
                        name: "schedule bound exactness".into(),
                        ok: false,
                        detail: e.to_string(),
                    }
                }
            };
            let bound = rat(base.pow(c as u32));
            let at = gap.admissible(&rat(1), &bound).unwrap_or(false);
            let below = gap
                .admissible(&rat(1), &(&bound - rr(1, 1_000_000)))
                .unwrap_or(true);
            if !at || below {
                return Check {
                    name: "schedule bound exactness".into(),
                    ok: false,
                    detail: format!("c {c}, base {base}"),
                };
            }
        }
    }
    Check {
        name: "schedule bound exactness".into(),
        ok: true,
        detail: "integer decay constants against exact powers".into(),
    }
}

fn round_trip_check(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..50 {
        let mut v = GradedSpace::zero(FieldTag::rationals(), Grading::Integer);
        for _ in 0..rng.gen_range(0..4usize) {
            v.add_degree(rng.gen_range(-6i64..=6), rng.gen_range(1..=3usize), Vec::new())
                .unwrap();
        }
        if rng.gen_bool(0.4) {
            v.add_progression(liouville_core::Progression {
                first: rng.gen_range(7i64..=10),
                step: rng.gen_range(1i64..=3),
                dim: rng.gen_range(1..=2usize),
            })
            .unwrap();
        }
        let text = v.to_text();
        match GradedSpace::from_text(&text) {
            Ok(back) if back == v && back.to_text() == text => {}
            _ => {
                return Check {
                    name: "serialization round trip".into(),
                    ok: false,
                    detail: format!("case {case}"),
                }
            }
        }
    }
    Check {
        name: "serialization round trip".into(),
        ok: true,
        detail: "50 random spaces".into(),
    }
}

fn determinism_check() -> CliResult<Check> {
    let a = cmd_ss("ball(2)", &RunConfig::default())?.render(OutputFormat::Json);
    let b = cmd_ss("ball(2)", &RunConfig::default())?.render(OutputFormat::Json);
    Ok(Check {
        name: "report determinism".into(),
        ok: a == b,
        detail: "identical inputs render byte-identically".into(),
    })
}
