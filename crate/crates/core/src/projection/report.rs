use serde::{Deserialize, Serialize};

/// Counterexamples kept per record; the failure count is always exact.
pub const COUNTEREXAMPLE_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub inputs: String,
    pub expected: String,
    pub got: String,
}

/// One sub-check on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub instance: String,
    pub suite: String,
    pub check: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    pub coverage: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<Counterexample>,
}

impl CheckRecord {
    pub fn new(instance: &str, suite: &str, check: &str, coverage: &str) -> CheckRecord {
        CheckRecord {
            instance: instance.into(),
            suite: suite.into(),
            check: check.into(),
            passed: true,
            cases: 0,
            failures: 0,
            coverage: coverage.into(),
            note: None,
            counterexamples: Vec::new(),
        }
    }

    /// Records one case; the counterexample is only built on failure.
    pub fn case(&mut self, ok: bool, cx: impl FnOnce() -> Counterexample) {
        self.cases += 1;
        if !ok {
            self.fail(cx());
        }
    }

    pub fn fail(&mut self, cx: Counterexample) {
        self.passed = false;
        self.failures += 1;
        if self.counterexamples.len() < COUNTEREXAMPLE_CAP {
            self.counterexamples.push(cx);
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> CheckRecord {
        self.note = Some(note.into());
        self
    }
}

impl Counterexample {
    pub fn new(
        inputs: impl Into<String>,
        expected: impl Into<String>,
        got: impl Into<String>,
    ) -> Counterexample {
        Counterexample {
            inputs: inputs.into(),
            expected: expected.into(),
            got: got.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            records: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> u64 {
        self.records.iter().map(|r| r.failures).sum()
    }

    pub fn cases(&self) -> u64 {
        self.records.iter().map(|r| r.cases).sum()
    }

    pub fn record(&self, check: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check == check)
    }

    pub fn extend(&mut self, other: SuiteReport) {
        self.records.extend(other.records);
    }
}
