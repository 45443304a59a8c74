use std::fmt::Write as _;
use std::time::Instant;

use fsdlab::spectra::{CVector, HermitianMatrix, UnitVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisViolated,
    Undetermined,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::HypothesisViolated => "hypothesis-violated",
            Self::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    /// The statement the check exercises.
    pub anchor: String,
    pub status: Status,
    /// Worst normalized margin; negative beyond tolerance means failure.
    pub margin: Option<f64>,
    pub tolerance: f64,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: u64,
    pub config_hash: String,
    pub version: String,
    pub suites: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub hypothesis_violated: usize,
    pub undetermined: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub metadata: Metadata,
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    /// Sorts records by check id; duplicate ids are a bug in a suite.
    pub fn new(metadata: Metadata, mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        for w in records.windows(2) {
            assert_ne!(w[0].check_id, w[1].check_id, "duplicate check id");
        }
        let mut summary = Summary::default();
        for r in &records {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::HypothesisViolated => summary.hypothesis_violated += 1,
                Status::Undetermined => summary.undetermined += 1,
            }
        }
        Self { metadata, summary, records }
    }

    pub fn failed(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn get(&self, check_id: &str) -> Option<&CheckRecord> {
        self.records
            .binary_search_by(|r| r.check_id.as_str().cmp(check_id))
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Copy with every timing field zeroed, for replay comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.records.iter_mut().for_each(|c| c.wall_time_ms = 0.0);
        r
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let m = &self.metadata;
        let _ = writeln!(out, "fsdlab {}  seed {}  config {}", m.version, m.seed, &m.config_hash[..12]);
        for r in &self.records {
            let margin = r.margin.map_or("-".to_string(), |v| format!("{v:+.3e}"));
            let _ = writeln!(out, "{:<20} {:<52} margin {:>11}  trials {}", r.status.as_str(), r.check_id, margin, r.trials);
            if let Some(note) = &r.note {
                let _ = writeln!(out, "    note: {note}");
            }
            if r.status == Status::Fail {
                if let Some(w) = &r.witness {
                    let _ = writeln!(out, "    witness: {w}");
                }
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} pass, {} fail, {} hypothesis-violated, {} undetermined",
            s.pass, s.fail, s.hypothesis_violated, s.undetermined
        );
        out
    }
}

pub fn complex_json(v: impl Iterator<Item = fsdlab::spectra::C64>) -> Value {
    Value::Array(v.map(|z| json!([z.re, z.im])).collect())
}

pub fn vector_json(v: &CVector) -> Value {
    complex_json(v.iter().copied())
}

pub fn unit_json(x: &UnitVector) -> Value {
    vector_json(x.as_vector())
}

/// Rows of `[re, im]` pairs.
pub fn matrix_json(a: &HermitianMatrix) -> Value {
    let m = a.as_matrix();
    Value::Array((0..m.nrows()).map(|i| complex_json(m.row(i).iter().copied())).collect())
}

/// Accumulates the worst margin of one check over many trials.
pub struct Check {
    id: String,
    anchor: String,
    tol: f64,
    worst: f64,
    trials: usize,
    witness: Option<Value>,
    note: Option<String>,
    status: Option<Status>,
    start: Instant,
}

impl Check {
    pub fn new(suite: &str, name: &str, anchor: &str, tol: f64) -> Self {
        Self {
            id: format!("{suite}/{name}"),
            anchor: anchor.to_string(),
            tol,
            worst: f64::INFINITY,
            trials: 0,
            witness: None,
            note: None,
            status: None,
            start: Instant::now(),
        }
    }

    /// Records one margin; the witness is built only when it becomes the worst.
    pub fn observe(&mut self, margin: f64, witness: impl FnOnce() -> Value) {
        self.trials += 1;
        if margin.is_nan() || margin < self.worst {
            if !self.worst.is_nan() {
                self.worst = margin;
                self.witness = Some(witness());
            }
        }
    }

    /// Records an evaluation error as a failed trial.
    pub fn error(&mut self, err: impl std::fmt::Display, witness: impl FnOnce() -> Value) {
        self.trials += 1;
        if !self.worst.is_nan() {
            self.worst = f64::NAN;
            self.witness = Some(witness());
            self.note = Some(format!("error: {err}"));
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    pub fn witness(&mut self, w: Value) {
        self.witness = Some(w);
    }

    /// Overrides the margin-derived status.
    pub fn status(&mut self, s: Status) {
        self.status = Some(s);
    }

    pub fn finish(self) -> CheckRecord {
        let status = self.status.unwrap_or(if self.worst >= -self.tol { Status::Pass } else { Status::Fail });
        let keep = matches!(status, Status::Fail | Status::HypothesisViolated | Status::Undetermined);
        CheckRecord {
            check_id: self.id,
            anchor: self.anchor,
            status,
            margin: if self.worst.is_finite() { Some(self.worst) } else { None },
            tolerance: self.tol,
            trials: self.trials,
            witness: if keep { self.witness } else { None },
            note: self.note,
            wall_time_ms: self.start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

/// `(b - a) / max(1, |a|, |b|)`: nonnegative iff `a <= b`.
pub fn rel_leq(a: f64, b: f64) -> f64 {
    (b - a) / a.abs().max(b.abs()).max(1.0)
}

/// `-|a - b| / max(1, |a|, |b|)`.
pub fn rel_eq(a: f64, b: f64) -> f64 {
    -(a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
