//! Structured pass/fail reports with deterministic CSV/JSON emission.
//! Numbers are written with 17 significant digits so emitted files are
//! byte-stable and round-trip exactly through the JSON parser.

use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report JSON: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
    pub fn parse(s: &str) -> Option<Status> {
        match s {
            "pass" => Some(Status::Pass),
            "fail" => Some(Status::Fail),
            "info" => Some(Status::Info),
            _ => None,
        }
    }
}

/// One check: id, source anchor (or "plumbing"), status, named measured values,
/// tolerance, and an optional wall-clock runtime (emitted only on request; see
/// `EmitOptions::timings`).
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub values: Vec<(String, f64)>,
    pub tolerance: f64,
    pub runtime_ms: f64,
}

impl Record {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, status: Status) -> Self {
        Record {
            id: id.into(),
            anchor: anchor.into(),
            status,
            values: Vec::new(),
            tolerance: f64::NAN,
            runtime_ms: 0.0,
        }
    }
    pub fn value(mut self, name: impl Into<String>, v: f64) -> Self {
        self.values.push((name.into(), v));
        self
    }
    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub config: String,
    pub records: Vec<Record>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EmitOptions {
    /// Include per-record runtimes. Off by default: wall-clock times are not
    /// deterministic and default reports must be byte-identical across runs.
    pub timings: bool,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, config: impl Into<String>) -> Self {
        VerificationReport { suite: suite.into(), config: config.into(), records: Vec::new() }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| r.status == Status::Fail).count()
    }

    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.status == Status::Pass).count()
    }

    /// Clears runtimes (for equality tests against parsed output).
    pub fn without_timings(mut self) -> Self {
        for r in &mut self.records {
            r.runtime_ms = 0.0;
        }
        self
    }

    /// RFC-4180-style CSV: header row, '.' decimal separator, quoted fields
    /// where needed. Every value column is flattened as name=value pairs.
    pub fn to_csv(&self, opts: EmitOptions) -> String {
        let mut out = String::new();
        if opts.timings {
            out.push_str("id,anchor,status,tolerance,runtime_ms,values\r\n");
        } else {
            out.push_str("id,anchor,status,tolerance,values\r\n");
        }
        for r in &self.records {
            let mut vals = String::new();
            for (i, (name, v)) in r.values.iter().enumerate() {
                if i > 0 {
                    vals.push(';');
                }
                let _ = write!(vals, "{}={}", name, fmt_f64(*v));
            }
            let row_start = format!(
                "{},{},{},{}",
                csv_escape(&r.id),
                csv_escape(&r.anchor),
                r.status.as_str(),
                fmt_f64(r.tolerance)
            );
            if opts.timings {
                let _ = write!(
                    out,
                    "{},{},{}\r\n",
                    row_start,
                    fmt_f64(r.runtime_ms),
                    csv_escape(&vals)
                );
            } else {
                let _ = write!(out, "{},{}\r\n", row_start, csv_escape(&vals));
            }
        }
        out
    }

    /// Deterministic JSON: fixed field order, 17-significant-digit numbers.
    pub fn to_json(&self, opts: EmitOptions) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        let _ = write!(out, "  \"suite\": {},\n", json_string(&self.suite));
        let _ = write!(out, "  \"config\": {},\n", json_string(&self.config));
        out.push_str("  \"records\": [\n");
        for (i, r) in self.records.iter().enumerate() {
            out.push_str("    {");
            let _ = write!(out, "\"id\": {}, ", json_string(&r.id));
            let _ = write!(out, "\"anchor\": {}, ", json_string(&r.anchor));
            let _ = write!(out, "\"status\": {}, ", json_string(r.status.as_str()));
            let _ = write!(out, "\"tolerance\": {}, ", json_number(r.tolerance));
            if opts.timings {
                let _ = write!(out, "\"runtime_ms\": {}, ", json_number(r.runtime_ms));
            }
            out.push_str("\"values\": {");
            for (j, (name, v)) in r.values.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: {}", json_string(name), json_number(*v));
            }
            out.push_str("}}");
            if i + 1 < self.records.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("  ],\n");
        let _ = write!(
            out,
            "  \"summary\": {{\"pass\": {}, \"fail\": {}, \"info\": {}}}\n",
            self.passed(),
            self.failed(),
            self.records.len() - self.passed() - self.failed()
        );
        out.push_str("}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))?;
        let suite = v["suite"].as_str().ok_or_else(|| ReportError::Parse("suite".into()))?;
        let config = v["config"].as_str().ok_or_else(|| ReportError::Parse("config".into()))?;
        let mut report = VerificationReport::new(suite, config);
        let records =
            v["records"].as_array().ok_or_else(|| ReportError::Parse("records".into()))?;
        for r in records {
            let mut rec = Record::new(
                r["id"].as_str().ok_or_else(|| ReportError::Parse("id".into()))?,
                r["anchor"].as_str().ok_or_else(|| ReportError::Parse("anchor".into()))?,
                Status::parse(r["status"].as_str().unwrap_or(""))
                    .ok_or_else(|| ReportError::Parse("status".into()))?,
            );
            rec.tolerance = json_to_f64(&r["tolerance"]);
            if let Some(ms) = r.get("runtime_ms") {
                rec.runtime_ms = json_to_f64(ms);
            }
            if let Some(obj) = r["values"].as_object() {
                for (name, val) in obj {
                    rec.values.push((name.clone(), json_to_f64(val)));
                }
            }
            report.push(rec);
        }
        Ok(report)
    }
}

fn json_to_f64(v: &serde_json::Value) -> f64 {
    if let Some(x) = v.as_f64() {
        x
    } else if v.as_str() == Some("nan") {
        f64::NAN
    } else if v.as_str() == Some("inf") {
        f64::INFINITY
    } else if v.as_str() == Some("-inf") {
        f64::NEG_INFINITY
    } else {
        f64::NAN
    }
}

/// 17 significant digits: round-trips any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{:.16e}", v)
    }
}

fn json_number(v: f64) -> String {
    if v.is_finite() {
        fmt_f64(v)
    } else {
        format!("\"{}\"", fmt_f64(v))
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VerificationReport {
        let mut rep = VerificationReport::new("spectrum", "n=4 k=16");
        rep.push(
            Record::new("ell_scan_n4_k16", "section 5, case 3", Status::Pass)
                .value("min_ell", -2.87e9)
                .value("max_m", 14.0)
                .tolerance(0.0),
        );
        rep.push(
            Record::new("mu", "plumbing", Status::Info)
                .value("mu", 6.0 / 255.0)
                .tolerance(f64::NAN),
        );
        rep
    }

    #[test]
    fn json_round_trip() {
        let rep = sample();
        let parsed = VerificationReport::from_json(&rep.to_json(EmitOptions::default())).unwrap();
        // NaN tolerance compares unequal; compare piecewise
        assert_eq!(parsed.suite, rep.suite);
        assert_eq!(parsed.records.len(), rep.records.len());
        for (a, b) in parsed.records.iter().zip(&rep.records) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.status, b.status);
            for ((n1, v1), (n2, v2)) in a.values.iter().zip(&b.values) {
                assert_eq!(n1, n2);
                assert_eq!(v1.to_bits(), v2.to_bits(), "{n1}");
            }
        }
    }

    #[test]
    fn emission_is_deterministic() {
        let a = sample().to_json(EmitOptions::default());
        let b = sample().to_json(EmitOptions::default());
        assert_eq!(a, b);
        let c = sample().to_csv(EmitOptions::default());
        let d = sample().to_csv(EmitOptions::default());
        assert_eq!(c, d);
        assert!(c.starts_with("id,anchor,status,tolerance,values\r\n"));
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [std::f64::consts::PI, 6.0 / 99.0, 1e-300, -2.87e9] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
    }
}
