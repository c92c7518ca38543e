//! JSON, CSV and plain-table output.
//!
//! JSON keeps the canonical text of every number. CSV is for plotting and
//! carries decimals only, so exact values lose digits there. The table format
//! shows the same rows as CSV with the canonical text.

use serde::Serialize;
use serde_json::Value;

use radial_kahler::curvature::{LuReport, ReportValue, RicciFlatReport};
use radial_kahler::obstruction::{ObstructionReport, ScanReport};
use radial_kahler::reproduce::{PaperReproductionReport, Source};
use radial_kahler::resolvability::{EmbeddingCheck, ResolvabilityCertificate};
use radial_kahler::scalar::parse_rational;

use crate::{CliError, Format, EXIT_FAILURE, EXIT_INCONCLUSIVE, EXIT_OK};

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub trait Report: Serialize {
    fn table(&self) -> Table;

    /// 2 when any sign or status stayed undecided, 0 otherwise.
    fn exit_code(&self) -> i32 {
        let v = serde_json::to_value(self).expect("reports serialize");
        if undecided(&v) {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_OK
        }
    }
}

fn undecided(v: &Value) -> bool {
    match v {
        Value::Object(map) => map.iter().any(|(k, v)| {
            let flagged = matches!(k.as_str(), "sign" | "status" | "kind")
                && matches!(v.as_str(), Some("undetermined" | "inconclusive"));
            flagged || undecided(v)
        }),
        Value::Array(items) => items.iter().any(undecided),
        _ => false,
    }
}

pub fn render<R: Report>(report: &R, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let t = report.table();
            let mut w = csv::Writer::from_writer(Vec::new());
            let fail = |e: csv::Error| CliError {
                code: EXIT_FAILURE,
                message: format!("csv output: {e}"),
            };
            w.write_record(&t.headers).map_err(fail)?;
            for row in &t.rows {
                w.write_record(row.iter().map(|c| decimal(c)))
                    .map_err(fail)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError {
                code: EXIT_FAILURE,
                message: format!("csv output: {e}"),
            })?;
            Ok(String::from_utf8(bytes).expect("csv is utf-8"))
        }
        Format::Table => Ok(plain(&report.table())),
    }
}

fn plain(t: &Table) -> String {
    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.len()).collect();
    for row in &t.rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(t.headers.clone());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out += &line(rule.iter().map(String::as_str).collect());
    for row in &t.rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

fn float_text(v: f64) -> String {
    if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Decimal form of a canonical number text; other cells pass through.
///
/// Handles `p/q`, big floats `digits@bits`, and root-field elements
/// `c0 + c1*(r)^(1/d) + ...`.
pub fn decimal(cell: &str) -> String {
    if let Some((digits, bits)) = cell.rsplit_once('@') {
        if bits.chars().all(|c| c.is_ascii_digit()) {
            return if digits.starts_with("0 +/-") {
                "0".into()
            } else {
                digits.to_string()
            };
        }
    }
    if let Ok(q) = parse_rational(cell) {
        return float_text(q.to_f64());
    }
    root_field_value(cell)
        .map(float_text)
        .unwrap_or_else(|| cell.to_string())
}

fn root_field_value(cell: &str) -> Option<f64> {
    if !cell.contains(")^(") {
        return None;
    }
    let mut total = 0.0;
    for term in cell.split(" + ") {
        match term.split_once("*(") {
            None => total += parse_rational(term).ok()?.to_f64(),
            Some((c, rest)) => {
                let (radicand, exp) = rest.split_once(")^(")?;
                let exp = parse_rational(exp.strip_suffix(')')?).ok()?.to_f64();
                let r = parse_rational(radicand).ok()?.to_f64();
                total += parse_rational(c).ok()?.to_f64() * r.powf(exp);
            }
        }
    }
    Some(total)
}

fn opt_bits(b: Option<u32>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

impl Report for Vec<ObstructionReport> {
    fn table(&self) -> Table {
        Table {
            headers: vec![
                "family",
                "x",
                "h",
                "value",
                "sign",
                "backend",
                "precision_bits",
            ],
            rows: self
                .iter()
                .map(|r| {
                    vec![
                        r.family.clone(),
                        r.x.clone(),
                        r.h.to_string(),
                        r.value.clone(),
                        r.sign.as_str().to_string(),
                        r.backend.clone(),
                        opt_bits(r.precision_bits),
                    ]
                })
                .collect(),
        }
    }
}

impl Report for ScanReport {
    fn table(&self) -> Table {
        let row = |kind: &str, r: &ObstructionReport| {
            vec![
                kind.to_string(),
                r.x.clone(),
                r.h.to_string(),
                r.value.clone(),
                r.sign.as_str().to_string(),
                r.backend.clone(),
            ]
        };
        Table {
            headers: vec!["kind", "x", "h", "value", "sign", "backend"],
            rows: self
                .hits
                .iter()
                .map(|r| row("hit", r))
                .chain(self.undetermined.iter().map(|r| row("undetermined", r)))
                .collect(),
        }
    }
}

impl Report for LuReport {
    fn table(&self) -> Table {
        let entries: [(&str, &ReportValue); 18] = [
            ("a1", &self.a1),
            ("a2", &self.a2),
            ("a3", &self.a3),
            ("rho", &self.rho),
            ("R2", &self.r2),
            ("Ric2", &self.ric2),
            ("DRho2", &self.drho2),
            ("DRic2", &self.dric2),
            ("DR2", &self.dr2),
            ("sigma3Ric", &self.sigma3),
            ("RRicRic", &self.r_ric_ric),
            ("RicRR", &self.ric_r_r),
            ("divdivRRic", &self.divdiv_r_ric),
            ("divdivRhoRic", &self.divdiv_rho_ric),
            ("lapRho", &self.lap_rho),
            ("laplapRho", &self.laplap_rho),
            ("lapCombination", &self.lap_combination),
            ("lapR2", &self.lap_r2),
        ];
        Table {
            headers: vec!["name", "value", "status"],
            rows: entries
                .iter()
                .map(|(name, v)| vec![name.to_string(), v.value.clone(), status_text(v)])
                .collect(),
        }
    }
}

fn status_text(v: &ReportValue) -> String {
    serde_json::to_value(v.status)
        .ok()
        .and_then(|s| s.as_str().map(str::to_string))
        .unwrap_or_default()
}

impl Report for ResolvabilityCertificate {
    fn table(&self) -> Table {
        let mut rows = Vec::new();
        for (l, row) in self.minors.iter().enumerate() {
            for (h, m) in row.iter().enumerate() {
                rows.push(vec![
                    l.to_string(),
                    h.to_string(),
                    m.value.clone(),
                    m.sign.as_str().to_string(),
                ]);
            }
        }
        Table {
            headers: vec!["l", "h", "value", "sign"],
            rows,
        }
    }
}

impl Report for EmbeddingCheck {
    fn table(&self) -> Table {
        Table {
            headers: vec!["max_degree", "checked", "mismatches", "passed"],
            rows: vec![vec![
                self.max_degree.to_string(),
                self.checked.to_string(),
                self.mismatches.len().to_string(),
                self.passed.to_string(),
            ]],
        }
    }

    fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_FAILURE
        }
    }
}

impl Report for RicciFlatReport {
    fn table(&self) -> Table {
        let mut rows = Vec::new();
        for p in &self.points {
            rows.push(vec![
                p.x.clone(),
                "residual".into(),
                p.residual.value.clone(),
                status_text(&p.residual),
            ]);
            for (i, row) in p.ricci.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    rows.push(vec![
                        p.x.clone(),
                        format!("Ric[{i}][{j}]"),
                        v.value.clone(),
                        status_text(v),
                    ]);
                }
            }
        }
        Table {
            headers: vec!["x", "quantity", "value", "status"],
            rows,
        }
    }
}

impl Report for PaperReproductionReport {
    fn table(&self) -> Table {
        let source = |s: Source| match s {
            Source::Published => "published",
            Source::Derived => "derived",
            Source::Identity => "identity",
        };
        Table {
            headers: vec![
                "id",
                "status",
                "source",
                "expected",
                "computed",
                "runtime_ms",
            ],
            rows: self
                .items
                .iter()
                .map(|i| {
                    vec![
                        i.id.clone(),
                        serde_json::to_value(i.status)
                            .ok()
                            .and_then(|s| s.as_str().map(str::to_string))
                            .unwrap_or_default(),
                        source(i.expected.source).to_string(),
                        i.expected.value.clone(),
                        i.computed.clone(),
                        i.runtime_ms.map(|m| m.to_string()).unwrap_or_default(),
                    ]
                })
                .collect(),
        }
    }

    fn exit_code(&self) -> i32 {
        PaperReproductionReport::exit_code(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_of_canonical_texts() {
        assert_eq!(decimal("3/4"), "0.75");
        assert_eq!(decimal("-2.8097e0@256"), "-2.8097e0");
        assert_eq!(decimal("0 +/- 1.000e-70@256"), "0");
        assert_eq!(
            decimal("1/2 + 1/1*(2/1)^(1/2)"),
            format!("{}", 0.5 + 2f64.sqrt())
        );
        assert_eq!(decimal("simanca"), "simanca");
    }

    #[test]
    fn undecided_values_are_found_anywhere() {
        let v: Value =
            serde_json::json!({"a": [{"sign": "positive"}, {"x": {"status": "undetermined"}}]});
        assert!(undecided(&v));
        assert!(!undecided(&serde_json::json!({"sign": "negative"})));
    }
}
