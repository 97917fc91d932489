//! Report rendering: every command produces one structured JSON document
//! (version-tagged, deterministically ordered) plus a human text form.

use liouville_core::reeb::{CountFunction, GrowthRate};
use liouville_core::spectral::DegenerationVerdict;
use liouville_core::{GradedSpace, Page, SHValue};
use num::BigRational;
use serde_json::{json, Value};

pub const REPORT_VERSION: u64 = 1;

/// A finished report: structured and text forms of the same result.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub text: String,
}

impl Report {
    pub fn render(&self, output: OutputFormat) -> String {
        match output {
            // serde_json maps are ordered, so this is byte-deterministic
            OutputFormat::Json => format!("{:#}\n", self.json),
            OutputFormat::Text => {
                let mut t = self.text.clone();
                if !t.ends_with('\n') {
                    t.push('\n');
                }
                t
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

pub fn rational_string(x: &BigRational) -> String {
    if x.denom() == &num::BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn json_graded(v: &GradedSpace) -> Value {
    let dims: Vec<Value> = {
        let mut out = Vec::new();
        for d in v.explicit_degrees() {
            out.push(json!([d, v.dim_at(d) - tail_dim(v, d)]));
        }
        out
    };
    let tails: Vec<Value> = v
        .progressions()
        .iter()
        .map(|p| json!([p.first, p.step, p.dim]))
        .collect();
    json!({
        "field": v.field().to_string(),
        "grading": v.grading().to_string(),
        "dims": dims,
        "tails": tails,
    })
}

fn tail_dim(v: &GradedSpace, degree: i64) -> usize {
    v.progressions()
        .iter()
        .filter(|p| p.contains(degree))
        .map(|p| p.dim)
        .sum()
}

pub fn json_page(page: &Page) -> Value {
    let spots: Vec<Value> = page
        .entries()
        .map(|(&(p, q), spot)| {
            json!({
                "p": p,
                "q": q,
                "dim": spot.dim,
                "labels": spot.labels,
            })
        })
        .collect();
    let totals: Vec<Value> = page
        .total_ranks()
        .iter()
        .map(|(&t, &d)| json!([t, d]))
        .collect();
    json!({
        "r": page.r(),
        "columns": [page.col_min(), 0],
        "totals_window": [page.total_window().0, page.total_window().1],
        "spots": spots,
        "totals": totals,
    })
}

pub fn json_certificate(v: &DegenerationVerdict) -> Value {
    match v {
        DegenerationVerdict::DegenerateInWindow => json!({"verdict": "degenerate-in-window"}),
        DegenerationVerdict::Unknown { p, q, r } => {
            json!({"verdict": "unknown", "p": p, "q": q, "r": r})
        }
        DegenerationVerdict::Counterexample { p, q, r } => {
            json!({"verdict": "counterexample", "p": p, "q": q, "r": r})
        }
    }
}

pub fn certificate_text(v: &DegenerationVerdict) -> String {
    match v {
        DegenerationVerdict::DegenerateInWindow => "degenerate-in-window".into(),
        DegenerationVerdict::Unknown { p, q, r } => {
            format!("unknown (window edge at ({p},{q}), d_{r})")
        }
        DegenerationVerdict::Counterexample { p, q, r } => {
            format!("counterexample at ({p},{q}) for d_{r}")
        }
    }
}

pub fn json_growth(rate: &GrowthRate) -> Value {
    match rate {
        GrowthRate::NegInfinity => json!("-inf"),
        GrowthRate::Finite(x) => json!(format!("{x:.4}")),
        GrowthRate::Infinite => json!("inf"),
    }
}

pub fn growth_text(rate: &GrowthRate) -> String {
    match rate {
        GrowthRate::NegInfinity => "-inf".into(),
        GrowthRate::Finite(x) => format!("{x:.2}"),
        GrowthRate::Infinite => "inf".into(),
    }
}

pub fn json_count_samples(cf: &CountFunction) -> Value {
    Value::Array(
        cf.samples()
            .iter()
            .map(|(t, c)| json!([rational_string(t), c.to_string()]))
            .collect(),
    )
}

pub fn json_sh_value(v: &SHValue) -> Value {
    match v {
        SHValue::Zero => json!({"kind": "zero"}),
        SHValue::Graded(g) => json!({"kind": "graded", "space": json_graded(g)}),
        SHValue::NonzeroFlag { reason } => json!({"kind": "nonzero", "reason": reason}),
        SHValue::SymbolicCount {
            infinite_degrees,
            count,
        } => json!({
            "kind": "symbolic-count",
            "infinite_degrees": infinite_degrees,
            "count_samples": json_count_samples(count),
        }),
    }
}

pub fn sh_value_text(v: &SHValue) -> String {
    match v {
        SHValue::Zero => "SH = 0".into(),
        SHValue::Graded(g) => {
            let mut dims: Vec<String> = Vec::new();
            for d in g.explicit_degrees() {
                dims.push(format!("{d}:{}", g.dim_at(d) - tail_dim(g, d)));
            }
            let mut line = format!("SH nonzero; dims {{{}}}", dims.join(", "));
            if !g.progressions().is_empty() {
                let tails: Vec<String> = g
                    .progressions()
                    .iter()
                    .map(|p| format!("start {} step {} rank {}", p.first, p.step, p.dim))
                    .collect();
                line.push_str(&format!("; tails [{}]", tails.join("; ")));
            }
            line
        }
        SHValue::NonzeroFlag { reason } => format!("SH != 0 ({reason})"),
        SHValue::SymbolicCount {
            infinite_degrees, ..
        } => format!(
            "SH has countably infinite rank in degrees {infinite_degrees:?}"
        ),
    }
}
