use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    /// Free-form text printed before the checks in human mode.
    #[serde(skip)]
    pub text: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            verdict: Verdict::Pass,
            checks: Vec::new(),
            text: String::new(),
            data: Value::Null,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, verdict: Verdict, detail: impl Into<String>) {
        // fail dominates inconclusive, which dominates pass
        self.verdict = self.verdict.max(verdict);
        self.checks.push(Check {
            name: name.into(),
            verdict,
            detail: detail.into(),
        });
    }

    pub fn pass_if(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        let v = if ok { Verdict::Pass } else { Verdict::Fail };
        self.check(name, v, detail);
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            return serde_json::to_string_pretty(self).expect("report serializes") + "\n";
        }
        let mut out = self.text.clone();
        for c in &self.checks {
            if c.detail.is_empty() {
                writeln!(out, "{} {}", c.verdict.tag(), c.name).unwrap();
            } else {
                writeln!(out, "{} {}: {}", c.verdict.tag(), c.name, c.detail).unwrap();
            }
        }
        if !self.checks.is_empty() {
            writeln!(out, "verdict: {}", self.verdict.tag().to_lowercase()).unwrap();
        }
        out
    }
}
