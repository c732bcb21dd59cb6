//! Rendering of evaluation, agreement, statistics and significance results
//! as aligned text tables, CSV or JSON lines.
//!
//! Text output rounds for display (half to even on the exact binary value,
//! which is what `{:.N}` formatting does); CSV and JSON lines carry full
//! precision. Undefined values print as `--` in text and as empty cells or
//! `null` elsewhere.

use crate::agreement::{AgreementReport, UndecidedSegment};
use crate::error::{Error, Result};
use crate::metrics::{mann_whitney_u, EvalReport, SignificanceResult};
use crate::model::Activity;
use crate::stats::StatsTable;
use crate::tagger::{ExperimentReport, Strategy};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    JsonLines,
}

impl ReportFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportFormat::Text => "text",
            ReportFormat::Csv => "csv",
            ReportFormat::JsonLines => "json-lines",
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [ReportFormat::Text, ReportFormat::Csv, ReportFormat::JsonLines]
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown report format {s:?}")))
    }
}

/// Activity column order of the published tables.
pub const TABLE_ORDER: [Activity; 4] = [Activity::EG, Activity::EE, Activity::HG, Activity::DC];

/// Overlap pair column order of the statistics table.
pub const OVERLAP_ORDER: [(Activity, Activity); 6] = [
    (Activity::EG, Activity::EE),
    (Activity::HG, Activity::DC),
    (Activity::DC, Activity::EE),
    (Activity::EG, Activity::HG),
    (Activity::HG, Activity::EE),
    (Activity::EG, Activity::DC),
];

/// Merged-pair column order of the agreement table.
pub const MERGED_ORDER: [(Activity, Activity); 6] = [
    (Activity::HG, Activity::DC),
    (Activity::EE, Activity::DC),
    (Activity::HG, Activity::EE),
    (Activity::EG, Activity::EE),
    (Activity::EG, Activity::HG),
    (Activity::EG, Activity::DC),
];

pub fn fixed(x: f64, digits: usize) -> String {
    format!("{x:.digits$}")
}

fn fixed_opt(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "--".to_string(), |v| fixed(v, digits))
}

fn full(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Left-aligned columns separated by two spaces, no trailing blanks.
fn render(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0; cols];
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            widths[i] = widths[i].max(c.chars().count());
        }
    }
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (i, c) in r.iter().enumerate() {
            line.push_str(c);
            if i + 1 < r.len() {
                line.extend(std::iter::repeat_n(' ', widths[i] - c.chars().count() + 2));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn json_line(value: &impl Serialize, extra: &[(&str, Value)]) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    if let Value::Object(map) = &mut v {
        for (k, x) in extra.iter().rev() {
            map.insert(k.to_string(), x.clone());
        }
    }
    Ok(serde_json::to_string(&v)? + "\n")
}

// ---------------------------------------------------------------------------
// evaluation

/// Number of columns of the evaluation table.
pub const EVAL_COLUMNS: usize = 10;

/// Value of evaluation column `col`: HL, four M_S, M_A, four M_O.
pub fn eval_column(r: &EvalReport, col: usize) -> Option<f64> {
    match col {
        0 => Some(r.hl),
        1..=4 => Some(r.m_s[&TABLE_ORDER[col - 1]]),
        5 => Some(r.m_a),
        6..=9 => r.m_o[&TABLE_ORDER[col - 6]],
        _ => panic!("no evaluation column {col}"),
    }
}

/// Only HL is a loss.
pub fn higher_is_better(col: usize) -> bool {
    col != 0
}

/// One named row of an evaluation table. `marks[c]` appends that many `+`
/// to column `c` in text output.
#[derive(Debug, Clone)]
pub struct EvalRow<'a> {
    pub name: String,
    pub report: &'a EvalReport,
    pub marks: Option<[usize; EVAL_COLUMNS]>,
}

impl<'a> EvalRow<'a> {
    pub fn new(name: impl Into<String>, report: &'a EvalReport) -> Self {
        EvalRow {
            name: name.into(),
            report,
            marks: None,
        }
    }
}

const EVAL_CSV_HEADER: &str =
    "name,hl,m_s_eg,m_s_ee,m_s_hg,m_s_dc,m_a,m_o_eg,m_o_ee,m_o_hg,m_o_dc,tokens,overlap_tokens";

fn eval_header() -> Vec<Vec<String>> {
    let mut groups = vec!["", "HL", "M_S", "", "", "", "M_A", "M_O", "", "", ""];
    let mut sub = vec!["", "all"];
    sub.extend(TABLE_ORDER.map(Activity::as_str));
    sub.push("all");
    sub.extend(TABLE_ORDER.map(Activity::as_str));
    groups.truncate(sub.len());
    [groups, sub]
        .into_iter()
        .map(|r| r.into_iter().map(String::from).collect())
        .collect()
}

fn eval_cells(r: &EvalReport, marks: Option<&[usize; EVAL_COLUMNS]>) -> Vec<String> {
    (0..EVAL_COLUMNS)
        .map(|c| {
            let mut s = fixed_opt(eval_column(r, c), 2);
            if let Some(m) = marks {
                s.push_str(&"+".repeat(m[c]));
            }
            s
        })
        .collect()
}

fn eval_csv_values(r: &EvalReport) -> String {
    let mut cells: Vec<String> = (0..EVAL_COLUMNS).map(|c| full(eval_column(r, c))).collect();
    cells.push(r.tokens.to_string());
    cells.push(r.overlap_tokens.to_string());
    cells.join(",")
}

pub fn emit_eval(rows: &[EvalRow], format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Text => {
            let mut t = eval_header();
            for r in rows {
                let mut line = vec![r.name.clone()];
                line.extend(eval_cells(r.report, r.marks.as_ref()));
                t.push(line);
            }
            render(&t)
        }
        ReportFormat::Csv => {
            let mut out = format!("{EVAL_CSV_HEADER}\n");
            for r in rows {
                out.push_str(&format!("{},{}\n", csv_field(&r.name), eval_csv_values(r.report)));
            }
            out
        }
        ReportFormat::JsonLines => {
            let mut out = String::new();
            for r in rows {
                out.push_str(&json_line(r.report, &[("name", json!(r.name))])?);
            }
            out
        }
    })
}

/// For each experiment and evaluation column, how many of the other
/// experiments it significantly outperforms on the per-run test scores.
///
/// The majority baseline neither receives nor gives marks. Each test uses
/// Bonferroni correction over the number of other compared experiments.
pub fn outperform_marks(experiments: &[ExperimentReport], alpha: f64) -> Result<Vec<[usize; EVAL_COLUMNS]>> {
    let compared: Vec<usize> = (0..experiments.len())
        .filter(|&i| experiments[i].strategy != Strategy::Maj)
        .collect();
    let comparisons = compared.len().saturating_sub(1).max(1);
    let mut marks = vec![[0usize; EVAL_COLUMNS]; experiments.len()];
    for &i in &compared {
        for &j in &compared {
            if i == j {
                continue;
            }
            for (c, mark) in marks[i].iter_mut().enumerate() {
                let a: Option<Vec<f64>> = experiments[i].runs.iter().map(|r| eval_column(&r.test, c)).collect();
                let b: Option<Vec<f64>> = experiments[j].runs.iter().map(|r| eval_column(&r.test, c)).collect();
                let (Some(a), Some(b)) = (a, b) else { continue };
                let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
                let ahead = if higher_is_better(c) {
                    mean(&a) > mean(&b)
                } else {
                    mean(&a) < mean(&b)
                };
                if ahead && mann_whitney_u(&a, &b, alpha, comparisons)?.significant {
                    *mark += 1;
                }
            }
        }
    }
    Ok(marks)
}

/// Mean table of several experiments with significance marks (text), or
/// every run plus the mean (CSV, JSON lines).
pub fn emit_experiments(experiments: &[ExperimentReport], alpha: f64, format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Text => {
            let marks = outperform_marks(experiments, alpha)?;
            let rows: Vec<EvalRow> = experiments
                .iter()
                .zip(&marks)
                .map(|(e, m)| EvalRow {
                    name: e.strategy.to_string(),
                    report: &e.mean,
                    marks: Some(*m),
                })
                .collect();
            let mut out = emit_eval(&rows, format)?;
            out.push('\n');
            for e in experiments {
                let epochs: Vec<String> = e.runs.iter().map(|r| r.epoch.to_string()).collect();
                out.push_str(&format!(
                    "{}: {} runs, selected epochs [{}], repairs {}\n",
                    e.strategy,
                    e.runs.len(),
                    epochs.join(", "),
                    e.runs.iter().map(|r| r.repairs).sum::<usize>()
                ));
            }
            out
        }
        ReportFormat::Csv => {
            let mut out = format!("strategy,run,seed,epoch,{}\n", &EVAL_CSV_HEADER["name,".len()..]);
            for e in experiments {
                for (i, r) in e.runs.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{i},{},{},{}\n",
                        e.strategy,
                        r.seed,
                        r.epoch,
                        eval_csv_values(&r.test)
                    ));
                }
                out.push_str(&format!("{},mean,,,{}\n", e.strategy, eval_csv_values(&e.mean)));
            }
            out
        }
        ReportFormat::JsonLines => {
            let mut out = String::new();
            for e in experiments {
                for (i, r) in e.runs.iter().enumerate() {
                    out.push_str(&json_line(
                        &r.test,
                        &[
                            ("strategy", json!(e.strategy)),
                            ("run", json!(i)),
                            ("seed", json!(r.seed)),
                            ("epoch", json!(r.epoch)),
                        ],
                    )?);
                }
                out.push_str(&json_line(
                    &e.mean,
                    &[("strategy", json!(e.strategy)), ("run", json!("mean"))],
                )?);
            }
            out
        }
    })
}

// ---------------------------------------------------------------------------
// agreement

fn pair_label(p: &Option<crate::agreement::PairScore>) -> String {
    p.as_ref()
        .map_or_else(String::new, |p| format!("{}|{}", p.first, p.second))
}

pub fn emit_agreement(rows: &[(String, &AgreementReport)], format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Text => {
            let mut main = vec![{
                let mut h = vec![String::new(), "α_U".to_string()];
                h.extend(Activity::ALL.iter().map(|a| format!("α_U-{a}")));
                h.extend(["α_U-segment", "↑ α_U-pair", "↓ α_U-pair"].map(String::from));
                h
            }];
            let mut merged = vec![{
                let mut h = vec![String::new()];
                h.extend(MERGED_ORDER.iter().map(|(a, b)| format!("α_U-{a}&{b}")));
                h
            }];
            let mut pairs = String::new();
            for (name, r) in rows {
                let mut line = vec![name.clone(), fixed_opt(r.alpha_overall, 2)];
                line.extend(Activity::ALL.iter().map(|a| fixed_opt(r.alpha_per_category[a], 2)));
                line.push(fixed_opt(r.alpha_segment, 2));
                line.push(fixed_opt(r.pairwise.max.as_ref().and_then(|p| p.alpha), 2));
                line.push(fixed_opt(r.pairwise.min.as_ref().and_then(|p| p.alpha), 2));
                main.push(line);
                let mut line = vec![name.clone()];
                line.extend(MERGED_ORDER.iter().map(|&(a, b)| fixed_opt(r.merged(a, b), 2)));
                merged.push(line);
                pairs.push_str(&format!(
                    "{name}: {} annotators, {} tokens, ↑ pair {}, ↓ pair {}\n",
                    r.annotators,
                    r.continuum,
                    pair_label(&r.pairwise.max),
                    pair_label(&r.pairwise.min)
                ));
            }
            format!("{}\n{}\n{}", render(&main), render(&merged), pairs)
        }
        ReportFormat::Csv => {
            let mut header = vec!["name".to_string(), "alpha_u".to_string()];
            header.extend(
                Activity::ALL
                    .iter()
                    .map(|a| format!("alpha_u_{}", a.as_str().to_lowercase())),
            );
            header.extend(
                [
                    "alpha_u_segment",
                    "pair_max",
                    "pair_max_annotators",
                    "pair_min",
                    "pair_min_annotators",
                ]
                .map(String::from),
            );
            header.extend(
                MERGED_ORDER
                    .iter()
                    .map(|(a, b)| format!("alpha_u_{}_{}", a.as_str().to_lowercase(), b.as_str().to_lowercase())),
            );
            header.extend(["annotators", "continuum"].map(String::from));
            let mut out = header.join(",") + "\n";
            for (name, r) in rows {
                let mut cells = vec![csv_field(name), full(r.alpha_overall)];
                cells.extend(Activity::ALL.iter().map(|a| full(r.alpha_per_category[a])));
                cells.push(full(r.alpha_segment));
                cells.push(full(r.pairwise.max.as_ref().and_then(|p| p.alpha)));
                cells.push(csv_field(&pair_label(&r.pairwise.max)));
                cells.push(full(r.pairwise.min.as_ref().and_then(|p| p.alpha)));
                cells.push(csv_field(&pair_label(&r.pairwise.min)));
                cells.extend(MERGED_ORDER.iter().map(|&(a, b)| full(r.merged(a, b))));
                cells.push(r.annotators.to_string());
                cells.push(r.continuum.to_string());
                out.push_str(&(cells.join(",") + "\n"));
            }
            out
        }
        ReportFormat::JsonLines => {
            let mut out = String::new();
            for (name, r) in rows {
                out.push_str(&json_line(*r, &[("name", json!(name))])?);
            }
            out
        }
    })
}

// ---------------------------------------------------------------------------
// corpus statistics

pub fn emit_stats(rows: &[(String, &StatsTable)], format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Text => {
            let mut header = vec![String::new(), String::new()];
            header.extend(TABLE_ORDER.map(|a| a.to_string()));
            header.extend(OVERLAP_ORDER.iter().map(|(a, b)| format!("{a}/{b}")));
            let mut t = vec![header];
            for (name, s) in rows {
                let overlaps: Vec<_> = OVERLAP_ORDER.iter().map(|&(a, b)| s.overlap(a, b)).collect();
                let mut count = vec![name.clone(), "#".to_string()];
                count.extend(TABLE_ORDER.iter().map(|&a| s.activity(a).count.to_string()));
                count.extend(overlaps.iter().map(|o| o.map_or(0, |o| o.count).to_string()));
                let mut avg = vec![String::new(), "av. #".to_string()];
                avg.extend(TABLE_ORDER.iter().map(|&a| fixed(s.activity(a).avg_count, 2)));
                avg.extend(std::iter::repeat_n("--".to_string(), OVERLAP_ORDER.len()));
                let mut len = vec![String::new(), "av. len.".to_string()];
                len.extend(TABLE_ORDER.iter().map(|&a| fixed_opt(s.activity(a).avg_len, 1)));
                len.extend(overlaps.iter().map(|o| fixed_opt(o.and_then(|o| o.avg_len), 1)));
                t.extend([count, avg, len]);
            }
            render(&t)
        }
        ReportFormat::Csv => {
            let mut out = String::from("name,kind,key,count,avg_count,avg_len,total_len\n");
            for (name, s) in rows {
                let name = csv_field(name);
                for &a in &TABLE_ORDER {
                    let x = s.activity(a);
                    out.push_str(&format!(
                        "{name},activity,{a},{},{},{},{}\n",
                        x.count,
                        x.avg_count,
                        full(x.avg_len),
                        x.total_len
                    ));
                }
                for &(a, b) in &OVERLAP_ORDER {
                    let (count, avg_len, total) = s
                        .overlap(a, b)
                        .map_or((0, None, 0), |o| (o.count, o.avg_len, o.total_len));
                    out.push_str(&format!("{name},overlap,{a}/{b},{count},,{},{total}\n", full(avg_len)));
                }
            }
            out
        }
        ReportFormat::JsonLines => {
            let mut out = String::new();
            for (name, s) in rows {
                out.push_str(&json_line(*s, &[("name", json!(name))])?);
            }
            out
        }
    })
}

// ---------------------------------------------------------------------------
// significance and adjudication

pub fn emit_significance(r: &SignificanceResult, format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Text => render(&[
            vec!["U".into(), r.u.to_string()],
            vec![
                "p".into(),
                format!(
                    "{} ({})",
                    r.p_value,
                    if r.exact { "exact" } else { "normal approximation" }
                ),
            ],
            vec!["corrected alpha".into(), r.corrected_alpha.to_string()],
            vec!["significant".into(), if r.significant { "yes" } else { "no" }.into()],
        ]),
        ReportFormat::Csv => format!(
            "u,p_value,corrected_alpha,significant,exact\n{},{},{},{},{}\n",
            r.u, r.p_value, r.corrected_alpha, r.significant, r.exact
        ),
        ReportFormat::JsonLines => json_line(r, &[])?,
    })
}

/// One JSON object per undecided segment.
pub fn undecided_json_lines(segments: &[UndecidedSegment]) -> Result<String> {
    let mut out = String::new();
    for s in segments {
        out.push_str(&(serde_json::to_string(s)? + "\n"));
    }
    Ok(out)
}
