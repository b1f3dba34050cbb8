use std::fmt::Write;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

/// A failing component: 1-based indices and the offending expression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub component: Vec<usize>,
    pub expression: String,
    /// The expression evaluated at a seeded sample point, when it has a value there.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub verdict: Verdict,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Documented discrepancies that do not affect the verdict.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall time; shown in text output only so JSON stays reproducible.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl CheckResult {
    pub fn pass(id: &str, detail: impl Into<String>) -> Self {
        CheckResult {
            id: id.to_string(),
            verdict: Verdict::Pass,
            detail: detail.into(),
            witness: None,
            notes: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn fail(id: &str, detail: impl Into<String>, witness: Witness) -> Self {
        CheckResult {
            verdict: Verdict::Fail,
            witness: Some(witness),
            ..CheckResult::pass(id, detail)
        }
    }

    pub fn skip(id: &str, reason: impl Into<String>) -> Self {
        CheckResult {
            verdict: Verdict::Skip,
            ..CheckResult::pass(id, reason)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub engine: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl Report {
    pub fn new(seed: u64, checks: Vec<CheckResult>) -> Self {
        let count = |v| checks.iter().filter(|c| c.verdict == v).count();
        let summary = Summary {
            pass: count(Verdict::Pass),
            fail: count(Verdict::Fail),
            skip: count(Verdict::Skip),
        };
        Report {
            engine: format!("pencil-core {}", env!("CARGO_PKG_VERSION")),
            seed,
            checks,
            summary,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.all_pass())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(crate::Error::Document(format!("unknown format `{other}`"))),
        }
    }
}

fn label(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Skip => "SKIP",
    }
}

/// JSON goes through `serde_json::Value`, whose maps keep keys sorted.
pub fn emit_report(r: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let v = serde_json::to_value(r).expect("report serializes");
            let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        Format::Text => {
            let mut s = String::new();
            for c in &r.checks {
                let _ = writeln!(s, "{} {} ({} ms): {}", label(c.verdict), c.id, c.elapsed_ms, c.detail);
                if let Some(w) = &c.witness {
                    let idx: Vec<String> = w.component.iter().map(usize::to_string).collect();
                    let _ = writeln!(s, "    witness [{}]: {}", idx.join(","), w.expression);
                    if let Some(sample) = &w.sample {
                        let _ = writeln!(s, "    sample: {sample}");
                    }
                }
                for n in &c.notes {
                    let _ = writeln!(s, "    note: {n}");
                }
            }
            let _ = writeln!(
                s,
                "{} passed, {} failed, {} skipped ({}, seed {})",
                r.summary.pass, r.summary.fail, r.summary.skip, r.engine, r.seed
            );
            s.into_bytes()
        }
    }
}
