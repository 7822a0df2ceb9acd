//! Report model and its table, CSV and JSON renderings.

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub type Row = IndexMap<String, Value>;

/// Rounds to 15 significant digits; the shortest representation of the
/// result then prints with at most 15 digits and parses back to itself.
pub fn quantize(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Non-finite values become `null`.
pub fn num(x: f64) -> Value {
    Value::from(quantize(x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Value,
    pub reference: Value,
    pub deviation: Value,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, reference: f64, deviation: f64, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            value: num(value),
            reference: num(reference),
            deviation: num(deviation),
            pass: pass && deviation.is_finite(),
        }
    }

    /// `|value - reference| <= tol`.
    pub fn within(name: &str, value: f64, reference: f64, tol: f64) -> Self {
        let dev = (value - reference).abs();
        Self::new(name, value, reference, dev, dev <= tol)
    }

    pub fn deviation_f64(&self) -> f64 {
        self.deviation.as_f64().unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub params: IndexMap<String, Value>,
    pub results: Vec<Row>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn emit(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s.into_bytes()
            }
            Format::Csv => self.to_csv(),
            Format::Table => self.to_table().into_bytes(),
        }
    }

    fn columns(&self) -> Vec<&str> {
        let mut cols: Vec<&str> = Vec::new();
        for row in &self.results {
            for k in row.keys() {
                if !cols.contains(&k.as_str()) {
                    cols.push(k);
                }
            }
        }
        cols
    }

    /// One line per result row; checks are not part of the CSV.
    fn to_csv(&self) -> Vec<u8> {
        let cols = self.columns();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&cols).expect("in-memory write");
        for row in &self.results {
            w.write_record(cols.iter().map(|c| row.get(*c).map(cell).unwrap_or_default()))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    fn to_table(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.params {
            let shown = if v.is_null() { "-".to_string() } else { cell(v) };
            let _ = writeln!(out, "{k:>12}  {shown}");
        }
        out.push('\n');
        let cols = self.columns();
        if self.results.len() == 1 {
            let w = cols.iter().map(|c| c.len()).max().unwrap_or(0);
            for c in &cols {
                let _ = writeln!(out, "{c:>w$}  {}", cell(&self.results[0][*c]));
            }
        } else {
            let cells: Vec<Vec<String>> = self
                .results
                .iter()
                .map(|r| cols.iter().map(|c| r.get(*c).map(cell).unwrap_or_default()).collect())
                .collect();
            let widths: Vec<usize> = cols
                .iter()
                .enumerate()
                .map(|(j, c)| cells.iter().map(|r| r[j].len()).max().unwrap_or(0).max(c.len()))
                .collect();
            let line = |vals: Vec<&str>| {
                vals.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect::<Vec<_>>().join("  ")
            };
            let _ = writeln!(out, "{}", line(cols.clone()));
            for r in &cells {
                let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
            }
        }
        out.push('\n');
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:<w$}  value {}  reference {}  deviation {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                cell(&c.value),
                cell(&c.reference),
                cell(&c.deviation),
            );
        }
        out
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "nan".to_string(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut params = IndexMap::new();
        params.insert("command".into(), Value::from("energy"));
        params.insert("n".into(), Value::from(3));
        let mut row = Row::new();
        row.insert("a".into(), num(-0.1));
        row.insert("e_hh".into(), num(-1.0 / 12.0));
        row.insert("bad".into(), num(f64::NAN));
        Report {
            params,
            results: vec![row.clone(), row],
            checks: vec![Check::within("energy.ehh_closed", -1.0 / 12.0, -0.0833333333333333, 1e-8)],
        }
    }

    #[test]
    fn quantize_keeps_fifteen_digits() {
        assert_eq!(quantize(1.0 / 3.0), 0.333333333333333);
        assert_eq!(quantize(2.0f64.sqrt()).to_string(), "1.4142135623731");
        let q = quantize(-1.0 / 12.0);
        assert_eq!(quantize(q), q);
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let text = r.emit(Format::Json);
        let back: Report = serde_json::from_slice(&text).unwrap();
        assert_eq!(back, r);
        let keys: Vec<String> = serde_json::from_slice::<IndexMap<String, Value>>(&text)
            .unwrap()
            .keys()
            .cloned()
            .collect();
        assert_eq!(keys, ["params", "results", "checks"]);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let text = String::from_utf8(sample().emit(Format::Csv)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "a,e_hh,bad");
        assert!(!text.contains('\r'));
    }
}
