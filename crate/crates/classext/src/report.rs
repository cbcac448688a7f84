//! Verifier reports with canonical JSON serialization: sorted keys, decimal
//! strings for all integers, and lexicographically ordered witnesses, so
//! identical invocations emit byte-identical output.

use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The instance is intentionally not reproduced at desk scale.
    OutOfScope,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub theorem: String,
    pub instance: String,
    pub status: Status,
    pub witnesses: Vec<String>,
}

impl Report {
    pub fn new(theorem: impl Into<String>, instance: impl Into<String>) -> Report {
        Report {
            theorem: theorem.into(),
            instance: instance.into(),
            status: Status::Pass,
            witnesses: Vec::new(),
        }
    }

    pub fn out_of_scope(
        theorem: impl Into<String>,
        instance: impl Into<String>,
        reason: impl Into<String>,
    ) -> Report {
        Report {
            theorem: theorem.into(),
            instance: instance.into(),
            status: Status::OutOfScope,
            witnesses: vec![format!("out of scope: {}", reason.into())],
        }
    }

    pub fn witness(&mut self, w: impl Into<String>) {
        self.witnesses.push(w.into());
    }

    pub fn fail(&mut self, w: impl Into<String>) {
        self.status = Status::Fail;
        self.witnesses.push(format!("VIOLATION: {}", w.into()));
    }

    /// Canonical JSON value; `serde_json`'s map is a BTreeMap, so keys come
    /// out sorted.
    pub fn to_json(&self) -> Value {
        let mut ws = self.witnesses.clone();
        ws.sort();
        json!({
            "theorem": self.theorem,
            "instance": self.instance,
            "status": match self.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::OutOfScope => "out-of-scope",
            },
            "witnesses": ws,
        })
    }

    pub fn pass(&self) -> bool {
        !matches!(self.status, Status::Fail)
    }

    pub fn to_string_canonical(&self) -> String {
        self.to_json().to_string()
    }
}

/// Merge several reports into one suite verdict; out-of-scope rows do not
/// count as failures.
pub fn all_pass(reports: &[Report]) -> bool {
    reports.iter().all(|r| r.pass())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_json_sorts_keys_and_witnesses() {
        let mut r = Report::new("thm", "inst");
        r.witness("zeta");
        r.witness("alpha");
        let s = r.to_string_canonical();
        assert_eq!(
            s,
            r#"{"instance":"inst","status":"pass","theorem":"thm","witnesses":["alpha","zeta"]}"#
        );
    }

    #[test]
    fn failure_marks_status() {
        let mut r = Report::new("thm", "inst");
        r.fail("broken");
        assert!(!r.pass());
        assert!(r.to_string_canonical().contains("\"fail\""));
    }

    #[test]
    fn out_of_scope_rows_do_not_fail_suites() {
        let r = Report::out_of_scope("thm", "inst", "needs an infinite direct sum");
        assert!(r.pass());
        assert!(r.to_string_canonical().contains("out-of-scope"));
    }
}
