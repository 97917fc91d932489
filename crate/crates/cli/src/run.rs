//! Subcommand implementations. Everything here takes parsed inputs and file
//! *contents* (not paths), so the whole surface is drivable from tests.

use std::fmt::Write as _;

use liouville_core::morse_bott::{builtin_case, BuiltinCase};
use liouville_core::novikov::{self, DiscData, EssentialVerdict, McOutcome};
use liouville_core::reeb::{
    count_torus_orbits, growth_exponent, CountFunction, TorusPieceProfile,
};
use liouville_core::spectral::{edge_data, run_pages};
use liouville_core::surgery::{eval_sh_traced, EvalConfig};
use liouville_core::{Error as CoreError, FieldTag};
use num::bigint::BigInt;
use num::{BigRational, BigUint};
use serde_json::json;

use crate::parse::{parse_expr, ParseError};
use crate::report::{
    certificate_text, growth_text, json_certificate, json_count_samples, json_graded, json_growth,
    json_page, json_sh_value, rational_string, sh_value_text, Report, REPORT_VERSION,
};

/// Errors mapped to process exit codes: parse errors exit 2, computation
/// errors exit 3, a failed selftest exits 4.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Compute(String),
    SelftestFailed,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Compute(m) => write!(f, "computation error: {m}"),
            CliError::SelftestFailed => write!(f, "selftest failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse(m) => CliError::Parse(m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Shared run configuration from the global flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub field: FieldTag,
    pub trunc: BigRational,
    pub window: Option<(i64, i64)>,
    pub columns: Option<i64>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: FieldTag::rationals(),
            trunc: BigRational::from_integer(BigInt::from(20)),
            window: None,
            columns: None,
            seed: 0,
        }
    }
}

pub fn parse_field_flag(s: &str) -> CliResult<FieldTag> {
    if s == "q" {
        return Ok(FieldTag::rationals());
    }
    if let Some(p) = s.strip_prefix("fp:") {
        let p: u64 = p
            .parse()
            .map_err(|_| CliError::Parse(format!("bad prime in field flag `{s}`")))?;
        return Ok(FieldTag::prime(p)?);
    }
    Err(CliError::Parse(format!(
        "bad field flag `{s}`; expected `q` or `fp:<prime>`"
    )))
}

pub fn parse_window_flag(s: &str) -> CliResult<(i64, i64)> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| CliError::Parse(format!("bad window `{s}`; expected `<lo>..<hi>`")))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad window lower bound in `{s}`")))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad window upper bound in `{s}`")))?;
    if lo > hi {
        return Err(CliError::Parse(format!("empty window `{s}`")));
    }
    Ok((lo, hi))
}

fn parse_case(s: &str) -> CliResult<BuiltinCase> {
    s.parse::<BuiltinCase>().map_err(CliError::from)
}

/// `e1`: build the first page of a builtin case.
pub fn cmd_e1(case: &str, cfg: &RunConfig) -> CliResult<Report> {
    let case = parse_case(case)?;
    let ss = builtin_case(case, cfg.columns, cfg.window)?;
    let page = ss.initial();
    let json = json!({
        "version": REPORT_VERSION,
        "command": "e1",
        "case": case.to_string(),
        "field": page.field().to_string(),
        "page": json_page(page),
    });
    let mut text = format!("first page for {case}\n");
    let _ = writeln!(
        text,
        "columns [{}, 0], totals [{}, {}]",
        page.col_min(),
        page.total_window().0,
        page.total_window().1
    );
    for (&t, &d) in &page.total_ranks() {
        let _ = writeln!(text, "total {t:>5}  dim {d}");
    }
    Ok(Report { json, text })
}

/// `ss`: run the builtin differentials, certify degeneration, report edges.
pub fn cmd_ss(case: &str, cfg: &RunConfig) -> CliResult<Report> {
    let case = parse_case(case)?;
    let ss = builtin_case(case, cfg.columns, cfg.window)?;
    let run = run_pages(&ss)?;
    let edge = edge_data(&ss)?;
    let edge_ranks: Vec<serde_json::Value> =
        edge.ranks.iter().map(|(&q, &d)| json!([q, d])).collect();
    let json = json!({
        "version": REPORT_VERSION,
        "command": "ss",
        "case": case.to_string(),
        "field": run.final_page.field().to_string(),
        "final_page": json_page(&run.final_page),
        "certificate": json_certificate(&run.certificate),
        "edge": {
            "column": json_graded(&edge.column),
            "ranks": edge_ranks,
        },
    });
    let mut text = format!("spectral run for {case}\n");
    let _ = writeln!(text, "final page r = {}", run.final_page.r());
    for (&t, &d) in &run.final_page.total_ranks() {
        let _ = writeln!(text, "total {t:>5}  dim {d}");
    }
    if run.final_page.is_empty() {
        let _ = writeln!(text, "final page is zero");
    }
    let _ = writeln!(text, "degeneration: {}", certificate_text(&run.certificate));
    let edge_dims: Vec<String> = edge
        .ranks
        .iter()
        .map(|(&q, &d)| format!("{q}:{d}"))
        .collect();
    let _ = writeln!(text, "edge column ranks {{{}}}", edge_dims.join(", "));
    Ok(Report { json, text })
}

/// Input source for the `growth` command.
pub enum GrowthSource {
    /// Contents of a `tau count` file.
    Counts(String),
    /// Contents of an `s xi1 xi2` profile file, sampled geometrically.
    TorusProfile {
        content: String,
        tau_min: i64,
        tau_max: i64,
    },
}

/// `growth`: estimate the polynomial growth degree of a count function.
pub fn cmd_growth(source: GrowthSource, _cfg: &RunConfig) -> CliResult<Report> {
    let (cf, source_name) = match source {
        GrowthSource::Counts(content) => (CountFunction::from_text(&content)?, "counts"),
        GrowthSource::TorusProfile {
            content,
            tau_min,
            tau_max,
        } => {
            if tau_min < 1 || tau_max <= tau_min {
                return Err(CliError::Parse(format!(
                    "bad sampling range [{tau_min}, {tau_max}]"
                )));
            }
            let profile = TorusPieceProfile::from_text(&content)?;
            let mut samples = Vec::new();
            let mut tau = tau_min;
            loop {
                let count = count_torus_orbits(
                    &profile,
                    &BigRational::from_integer(BigInt::from(tau)),
                )?;
                samples.push((
                    BigRational::from_integer(BigInt::from(tau)),
                    BigUint::from(count),
                ));
                if tau >= tau_max {
                    break;
                }
                tau = (tau * 2).min(tau_max);
            }
            (CountFunction::from_samples(samples)?, "torus-profile")
        }
    };
    let rate = growth_exponent(&cf)?;
    let json = json!({
        "version": REPORT_VERSION,
        "command": "growth",
        "source": source_name,
        "samples": json_count_samples(&cf),
        "exponent": json_growth(&rate),
    });
    let mut text = String::new();
    let _ = writeln!(text, "samples: {}", cf.samples().len());
    let _ = writeln!(text, "growth exponent: {}", growth_text(&rate));
    Ok(Report { json, text })
}

/// `mc`: solve the deformation equation for disc-count data.
pub fn cmd_mc(data_content: &str, cfg: &RunConfig) -> CliResult<Report> {
    if cfg.field.characteristic() != 0 {
        return Err(CliError::Compute(
            "the deformation solver needs characteristic zero".into(),
        ));
    }
    let data = DiscData::from_text(data_content)?;
    let outcome = novikov::solve_mc(&data, &cfg.trunc)?;
    let verdict = novikov::essential_verdict(&data, &cfg.trunc)?;
    let (outcome_json, outcome_text) = match &outcome {
        McOutcome::Solution { a, c } => (
            json!({
                "status": "solution",
                "a": [a.components()[0].to_string(), a.components()[1].to_string()],
                "c": c.to_string(),
            }),
            format!(
                "solution: a = ({}, {}), c = {}",
                a.components()[0],
                a.components()[1],
                c
            ),
        ),
        McOutcome::NoSolution { order } => (
            json!({"status": "no-solution", "order": rational_string(order)}),
            format!("no solution: inconsistent at order {order}"),
        ),
        McOutcome::Undetermined { reached } => (
            json!({"status": "undetermined", "reached": rational_string(reached)}),
            format!("undetermined: search stopped at order {reached}"),
        ),
    };
    let verdict_json = match &verdict {
        EssentialVerdict::Essential { trunc } => {
            json!({"verdict": "essential", "trunc": rational_string(trunc)})
        }
        EssentialVerdict::NotEssential { order } => {
            json!({"verdict": "not-essential", "order": rational_string(order)})
        }
        EssentialVerdict::Undetermined { reached } => {
            json!({"verdict": "undetermined", "reached": rational_string(reached)})
        }
    };
    let json = json!({
        "version": REPORT_VERSION,
        "command": "mc",
        "trunc": rational_string(&cfg.trunc),
        "outcome": outcome_json,
        "essential": verdict_json,
    });
    let mut text = String::new();
    let _ = writeln!(text, "truncation order: {}", rational_string(&cfg.trunc));
    let _ = writeln!(text, "{outcome_text}");
    let verdict_text = match &verdict {
        EssentialVerdict::Essential { trunc } => format!("essential (up to order {trunc})"),
        EssentialVerdict::NotEssential { order } => {
            format!("not essential (obstructed at order {order})")
        }
        EssentialVerdict::Undetermined { reached } => {
            format!("undetermined (reached order {reached})")
        }
    };
    let _ = writeln!(text, "essentiality: {verdict_text}");
    Ok(Report { json, text })
}

/// `eval`: evaluate a model expression.
pub fn cmd_eval(expr_str: &str, cfg: &RunConfig) -> CliResult<Report> {
    let expr = parse_expr(expr_str)?;
    let eval_cfg = EvalConfig {
        field: cfg.field,
        window: cfg.window,
    };
    let evaluation = eval_sh_traced(&expr, &eval_cfg)?;
    let json = json!({
        "version": REPORT_VERSION,
        "command": "eval",
        "expr": expr.to_string(),
        "field": cfg.field.to_string(),
        "value": json_sh_value(&evaluation.value),
        "notes": evaluation.notes,
    });
    let mut text = format!("{}\n", sh_value_text(&evaluation.value));
    for note in &evaluation.notes {
        let _ = writeln!(text, "note: {note}");
    }
    Ok(Report { json, text })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_reports_the_vanishing_ball() {
        let report = cmd_eval("ball(5)", &RunConfig::default()).unwrap();
        assert!(report.text.starts_with("SH = 0"));
        assert_eq!(report.json["value"]["kind"], "zero");
    }

    #[test]
    fn field_and_window_flags_parse() {
        assert_eq!(parse_field_flag("q").unwrap(), FieldTag::rationals());
        assert_eq!(
            parse_field_flag("fp:7").unwrap(),
            FieldTag::prime(7).unwrap()
        );
        assert!(parse_field_flag("fp:8").is_err());
        assert!(parse_field_flag("r").is_err());
        assert_eq!(parse_window_flag("-32..0").unwrap(), (-32, 0));
        assert_eq!(parse_window_flag("-70..1").unwrap(), (-70, 1));
        assert!(parse_window_flag("3..-3").is_err());
        assert!(parse_window_flag("17").is_err());
    }

    #[test]
    fn ss_reports_the_ball_collapse() {
        let report = cmd_ss("ball(3)", &RunConfig::default()).unwrap();
        assert!(report.text.contains("final page is zero"));
        assert_eq!(report.json["certificate"]["verdict"], "degenerate-in-window");
    }

    #[test]
    fn mc_reports_both_worked_verdicts() {
        let cfg = RunConfig::default();
        let essential = cmd_mc("1 0 1 1\n-1 0 1 1\n", &cfg).unwrap();
        assert_eq!(essential.json["essential"]["verdict"], "essential");
        assert_eq!(essential.json["outcome"]["c"], "2*t^1");
        let obstructed = cmd_mc("1 0 1 1\n0 1 1 1\n", &cfg).unwrap();
        assert_eq!(obstructed.json["essential"]["verdict"], "not-essential");
    }

    #[test]
    fn growth_from_counts_content() {
        let content: String = (3..=13)
            .map(|k| format!("{} {}\n", 1i64 << k, 1i64 << k))
            .collect();
        let report = cmd_growth(GrowthSource::Counts(content), &RunConfig::default()).unwrap();
        assert_eq!(report.json["exponent"], "1.0000");
    }
}
