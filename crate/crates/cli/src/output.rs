//! Serializers for each subcommand. JSON shapes match `schemas/*.schema.json`.

use levy_lie::chen_strichartz::{bracket_text, bracketed_form, format_bracketed_text, LogFlowmap};
use levy_lie::levy_sim::PathStatistics;
use levy_lie::prelie_trees::{magnus_by_log_exp, symmetry_factor, trees_of_size, DecoratedTree, Forest};
use levy_lie::verify::Report;
use levy_lie::word_algebra::LetterString;
use levy_lie::Rational;
use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// `{"num": "...", "den": "..."}` so no precision is lost.
pub fn rational(c: &Rational) -> Value {
    json!({ "num": c.numer().to_string(), "den": c.denom().to_string() })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_string<R: Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn expand_json(lf: &LogFlowmap, d: u32, l: u32) -> String {
    let terms: Vec<Value> = lf
        .nonzero_terms()
        .map(|(w, p)| {
            json!({
                "word": w.to_string(),
                "grade": w.grade(),
                "lie": format_bracketed_text(p),
                "brackets": bracketed_form(p).iter().map(|(u, c)| json!({
                    "coefficient": rational(c),
                    "bracket": bracket_text(u),
                })).collect::<Vec<_>>(),
                "words": p.iter().map(|(u, c)| json!({
                    "coefficient": rational(c),
                    "word": u.to_string(),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "expand",
        "basis": lf.basis.to_string(),
        "d": d,
        "l": l,
        "max_grade": lf.max_grade,
        "terms": terms,
    }))
}

pub fn expand_csv(lf: &LogFlowmap) -> String {
    let rows = lf.nonzero_terms().flat_map(|(w, p)| {
        bracketed_form(p)
            .iter()
            .map(|(u, c)| (w.to_string(), w.grade(), c.numer().to_string(), c.denom().to_string(), bracket_text(u)))
            .collect::<Vec<_>>()
    });
    csv_string(&["word", "grade", "num", "den", "bracket"], rows)
}

pub struct MagnusRow {
    pub degree: usize,
    pub tree: DecoratedTree,
    pub coefficient: Rational,
    pub symmetry: Rational,
}

impl MagnusRow {
    fn notation(&self) -> String {
        self.tree.notation(|_| "i".to_string())
    }

    /// `|c_τ|σ(τ)`, the reference ω column.
    fn omega(&self) -> Rational {
        self.coefficient.abs() * &self.symmetry
    }
}

pub fn magnus_rows(max_degree: usize) -> levy_lie::Result<Vec<MagnusRow>> {
    let series = magnus_by_log_exp(0, max_degree)?;
    Ok((1..=max_degree)
        .flat_map(|n| trees_of_size(n, 0))
        .map(|t| MagnusRow {
            degree: t.size(),
            coefficient: series.coeff(&Forest::single(t.clone())),
            symmetry: Rational::from_integer(symmetry_factor(&t)),
            tree: t,
        })
        .collect())
}

pub fn magnus_text(rows: &[MagnusRow]) -> String {
    let width = rows.iter().map(|r| r.notation().len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<6} {:<width$} {:>8} {:>6} {:>8}\n", "degree", "tree", "c", "sigma", "|c|sigma");
    for r in rows {
        out.push_str(&format!(
            "{:<6} {:<width$} {:>8} {:>6} {:>8}\n",
            r.degree,
            r.notation(),
            r.coefficient.to_string(),
            r.symmetry.to_string(),
            r.omega().to_string()
        ));
    }
    out
}

fn latex_rational(c: &Rational) -> String {
    let sign = if c.is_negative() { "-" } else { "" };
    let m = c.abs();
    if m.is_integer() {
        format!("{sign}{}", m.numer())
    } else {
        format!("{sign}\\frac{{{}}}{{{}}}", m.numer(), m.denom())
    }
}

pub fn magnus_latex(rows: &[MagnusRow]) -> String {
    let mut out = String::from("\\begin{tabular}{rlrrr}\n$n$ & $\\tau$ & $c_\\tau$ & $\\sigma(\\tau)$ & $|c_\\tau|\\sigma(\\tau)$ \\\\\n\\hline\n");
    for r in rows {
        out.push_str(&format!(
            "{} & \\Forest{{{}}} & ${}$ & ${}$ & ${}$ \\\\\n",
            r.degree,
            r.notation(),
            latex_rational(&r.coefficient),
            r.symmetry,
            latex_rational(&r.omega())
        ));
    }
    out.push_str("\\end{tabular}\n");
    out
}

pub fn magnus_json(rows: &[MagnusRow], max_degree: usize) -> String {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "degree": r.degree,
                "tree": r.notation(),
                "coefficient": rational(&r.coefficient),
                "symmetry": r.symmetry.to_string(),
                "omega_magnitude": rational(&r.omega()),
            })
        })
        .collect();
    pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "magnus",
        "max_degree": max_degree,
        "rows": rows,
    }))
}

pub fn magnus_csv(rows: &[MagnusRow]) -> String {
    csv_string(
        &["degree", "tree", "c_num", "c_den", "sigma", "omega_num", "omega_den"],
        rows.iter().map(|r| {
            let o = r.omega();
            (
                r.degree,
                r.notation(),
                r.coefficient.numer().to_string(),
                r.coefficient.denom().to_string(),
                r.symmetry.to_string(),
                o.numer().to_string(),
                o.denom().to_string(),
            )
        }),
    )
}

/// Seconds are omitted so that reports are byte-identical across runs.
pub fn verify_json(report: &Report) -> String {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| json!({ "suite": c.suite, "name": c.name, "status": c.status, "detail": c.detail }))
        .collect();
    pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "verify",
        "passed": report.passed(),
        "checks": checks,
    }))
}

pub fn verify_csv(report: &Report) -> String {
    csv_string(
        &["suite", "name", "status", "detail"],
        report
            .checks
            .iter()
            .map(|c| (c.suite.clone(), c.name.clone(), c.status.to_string(), c.detail.clone())),
    )
}

pub fn simulate_text(stats: &[PathStatistics]) -> String {
    let mut out = format!("{:>8} {:>5} {:>14} {:>14}\n", "time", "grade", "mean_abs", "rms");
    for s in stats {
        for g in &s.per_grade {
            out.push_str(&format!("{:>8} {:>5} {:>14.6e} {:>14.6e}\n", s.time, g.grade, g.mean_abs_error, g.rms_error));
        }
    }
    out
}

pub fn simulate_json(stats: &[PathStatistics], observable: &str, seed: u64) -> String {
    pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "simulate",
        "observable": observable,
        "seed": seed,
        "statistics": stats,
    }))
}

pub fn simulate_csv(stats: &[PathStatistics]) -> String {
    csv_string(
        &["time", "grade", "samples", "mean_abs_error", "rms_error"],
        stats
            .iter()
            .flat_map(|s| s.per_grade.iter().map(move |g| (s.time, g.grade, s.samples, g.mean_abs_error, g.rms_error))),
    )
}
