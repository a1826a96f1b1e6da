//! Machine- and human-readable renderings of results.
//!
//! JSON is canonical: object keys sorted, interval endpoints as exact decimal strings, so
//! parsing and re-serializing an emitted document reproduces it byte for byte.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::bootstrap::{BoundRow, IterationTrace};
use crate::chain::{StepReport, Verdict};
use crate::constants::NamedConstant;
use crate::exact::{DyadicInterval, Rational};
use crate::falsify::{CampaignReport, GapSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

/// Overall status of a run, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Failed,
    Undecided,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Failed => 1,
            Status::Undecided => 2,
        }
    }

    /// Failures dominate undecided results.
    pub fn combine(self, other: Status) -> Status {
        match (self, other) {
            (Status::Failed, _) | (_, Status::Failed) => Status::Failed,
            (Status::Undecided, _) | (_, Status::Undecided) => Status::Undecided,
            _ => Status::Pass,
        }
    }
}

/// A titled table with a JSON body.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
    pub status: Status,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => canonical_json(&self.json),
            Format::Csv => csv(&self.columns, &self.rows),
            Format::Md => markdown(&self.title, &self.columns, &self.rows),
        }
    }
}

/// Several reports rendered together.
pub fn render_all(reports: &[Report], format: Format) -> String {
    match format {
        Format::Json => {
            let mut m = Map::new();
            for r in reports {
                m.insert(r.title.clone(), r.json.clone());
            }
            canonical_json(&Value::Object(m))
        }
        _ => reports.iter().map(|r| r.render(format)).collect::<Vec<_>>().join("\n"),
    }
}

pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv(columns: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let line = |cells: &[String]| cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
    out.push_str(&line(columns));
    out.push_str("\r\n");
    for r in rows {
        out.push_str(&line(r));
        out.push_str("\r\n");
    }
    out
}

pub fn markdown(title: &str, columns: &[String], rows: &[Vec<String>]) -> String {
    let cell = |s: &String| s.replace('|', "\\|").replace('\n', " ");
    let mut out = format!("## {}\n\n", title);
    let _ = writeln!(out, "| {} |", columns.iter().map(cell).collect::<Vec<_>>().join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(columns.len()));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.iter().map(cell).collect::<Vec<_>>().join(" | "));
    }
    out
}

/// `{lo, hi, mid}` with exact endpoints and a 9-digit midpoint.
pub fn interval_json(iv: &DyadicInterval) -> Value {
    json!({
        "lo": iv.lo().to_decimal_string(),
        "hi": iv.hi().to_decimal_string(),
        "mid": mid9(iv),
    })
}

pub fn mid9(iv: &DyadicInterval) -> String {
    format!("{:.9}", iv.mid_f64())
}

fn rational_string(q: &Rational) -> String {
    q.to_string()
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn constants_report(cs: &[NamedConstant]) -> Report {
    let mut rows = Vec::new();
    let mut items = Vec::new();
    let mut status = Status::Pass;
    for c in cs {
        let dev = c.deviation();
        let agrees = c.agrees();
        let encloses = c.encloses_closed_form();
        if !agrees || !encloses {
            status = Status::Failed;
        }
        let dev_s = dev.as_ref().map(|d| format!("{:.3e}", rational_to_f64(d))).unwrap_or_default();
        rows.push(vec![
            c.key.to_string(),
            c.closed_form.to_string(),
            c.enclosure.as_ref().map(|e| e.lo().to_decimal_string()).unwrap_or_default(),
            c.enclosure.as_ref().map(|e| e.hi().to_decimal_string()).unwrap_or_default(),
            c.enclosure.as_ref().map(mid9).unwrap_or_default(),
            c.paper_decimal.unwrap_or("").to_string(),
            dev_s.clone(),
            agrees.to_string(),
            c.anchor.to_string(),
        ]);
        items.push(json!({
            "key": c.key,
            "closed_form": c.closed_form.to_string(),
            "enclosure": c.enclosure.as_ref().map(interval_json),
            "decimal": c.paper_decimal,
            "deviation": if dev.is_some() { Value::String(dev_s) } else { Value::Null },
            "tolerance": rational_string(&c.tolerance),
            "agrees": agrees,
            "encloses_closed_form": encloses,
            "anchor": c.anchor,
        }));
    }
    Report {
        title: "constants".into(),
        columns: cols(&["key", "closed_form", "lo", "hi", "mid", "decimal", "deviation", "agrees", "anchor"]),
        rows,
        json: Value::Array(items),
        status,
    }
}

fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn verify_report(reports: &[StepReport]) -> Report {
    let mut status = Status::Pass;
    for r in reports {
        status = status.combine(match r.verdict {
            Verdict::Verified => Status::Pass,
            Verdict::Undecided => Status::Undecided,
            Verdict::Failed | Verdict::Skipped => Status::Failed,
        });
    }
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.step.clone(),
                r.anchor.clone(),
                serde_json::to_value(r.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                r.residual.clone().unwrap_or_default(),
                r.detail.join("; "),
            ]
        })
        .collect();
    Report {
        title: "verify".into(),
        columns: cols(&["step", "anchor", "kind", "verdict", "residual", "detail"]),
        rows,
        json: serde_json::to_value(reports).expect("reports serialize"),
        status,
    }
}

pub fn trace_report(tr: &IterationTrace) -> Report {
    let rows = tr
        .entries
        .iter()
        .enumerate()
        .map(|(k, e)| vec![(k + 1).to_string(), e.lo().to_decimal_string(), e.hi().to_decimal_string(), mid9(e)])
        .collect();
    let json = json!({
        "t_star": interval_json(&tr.t_star),
        "tail": serde_json::to_value(tr.tail).expect("tail serializes"),
        "entries": tr.entries.iter().map(interval_json).collect::<Vec<_>>(),
    });
    Report { title: "bootstrap".into(), columns: cols(&["k", "lo", "hi", "mid"]), rows, json, status: Status::Pass }
}

pub fn split_report(n: u32, split: &DyadicInterval) -> Report {
    Report {
        title: "solve-split".into(),
        columns: cols(&["n", "lo", "hi", "mid"]),
        rows: vec![vec![n.to_string(), split.lo().to_decimal_string(), split.hi().to_decimal_string(), mid9(split)]],
        json: json!({ "n": n, "split": interval_json(split) }),
        status: Status::Pass,
    }
}

pub fn bound_report(rows_in: &[BoundRow]) -> Report {
    let label = |v: Value| v.as_str().map(String::from).unwrap_or_default();
    let rows = rows_in
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                mid9(&r.bound_316),
                r.bound_refined.as_ref().map(mid9).unwrap_or_default(),
                mid9(&r.bound_final),
                label(serde_json::to_value(r.branch).expect("branch serializes")),
                mid9(&r.upper_branch),
                mid9(&r.split),
                r.eq316_strictly_above.to_string(),
            ]
        })
        .collect();
    let json = Value::Array(
        rows_in
            .iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "bound_316": interval_json(&r.bound_316),
                    "bound_refined": r.bound_refined.as_ref().map(interval_json),
                    "bound_final": interval_json(&r.bound_final),
                    "branch": serde_json::to_value(r.branch).expect("branch serializes"),
                    "upper_branch": interval_json(&r.upper_branch),
                    "split": interval_json(&r.split),
                    "eq316_strictly_above": r.eq316_strictly_above,
                })
            })
            .collect(),
    );
    Report {
        title: "bound".into(),
        columns: cols(&["n", "bound_316", "bound_refined", "bound_final", "branch", "upper_branch", "split", "eq316_above"]),
        rows,
        json,
        status: Status::Pass,
    }
}

pub fn falsify_report(r: &CampaignReport) -> Report {
    let status = if r.hard_violations() == 0 { Status::Pass } else { Status::Failed };
    let rows = r
        .verdicts
        .iter()
        .map(|v| {
            vec![
                v.claim.to_string(),
                serde_json::to_value(v.class).ok().and_then(|x| x.as_str().map(String::from)).unwrap_or_default(),
                v.samples.to_string(),
                v.violation_count.to_string(),
                format!("{:.3e}", v.min_slack),
                format!("{:.3e}", v.max_slack),
            ]
        })
        .collect();
    Report {
        title: "falsify".into(),
        columns: cols(&["claim", "class", "samples", "violations", "min_slack", "max_slack"]),
        rows,
        json: serde_json::to_value(r).expect("campaign serializes"),
        status,
    }
}

pub fn gap_report(g: &GapSummary) -> Report {
    let f = |x: f64| format!("{:.6e}", x);
    Report {
        title: "gap".into(),
        columns: cols(&["n", "samples", "min", "q05", "median", "q95", "max", "negative_fraction"]),
        rows: vec![vec![
            g.n.to_string(),
            g.samples.to_string(),
            f(g.min),
            f(g.q05),
            f(g.median),
            f(g.q95),
            f(g.max),
            format!("{:.4}", g.negative_fraction),
        ]],
        json: serde_json::to_value(g).expect("summary serializes"),
        status: Status::Pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, DEFAULT_PRECISION};

    #[test]
    fn csv_quotes_per_rfc() {
        let out = csv(&cols(&["a", "b"]), &[vec!["x,y".into(), "say \"hi\"".into()]]);
        assert_eq!(out, "a,b\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n");
    }

    #[test]
    fn markdown_escapes_pipes() {
        let out = markdown("t", &cols(&["a"]), &[vec!["x|y".into()]]);
        assert!(out.contains("| x\\|y |"));
    }

    #[test]
    fn interval_endpoints_are_exact() {
        let iv = DyadicInterval::from_rational(&rat(1, 4), DEFAULT_PRECISION);
        assert_eq!(interval_json(&iv), json!({"lo": "0.25", "hi": "0.25", "mid": "0.250000000"}));
    }

    #[test]
    fn json_round_trips() {
        let iv = DyadicInterval::from_rational(&rat(1, 3), 64);
        let doc = canonical_json(&json!({"z": 1, "a": interval_json(&iv), "m": [0.1, 1e-300]}));
        let again = canonical_json(&serde_json::from_str::<Value>(&doc).unwrap());
        assert_eq!(doc, again);
        assert!(doc.find("\"a\"").unwrap() < doc.find("\"z\"").unwrap());
    }

    #[test]
    fn status_combination() {
        assert_eq!(Status::Pass.combine(Status::Undecided), Status::Undecided);
        assert_eq!(Status::Undecided.combine(Status::Failed), Status::Failed);
        assert_eq!(Status::Failed.exit_code(), 1);
    }
}
