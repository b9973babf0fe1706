//! Verification reports: one item per checked statement.

use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The computation is verified but disagrees with a printed statement.
    Discrepancy,
    Skipped,
}

impl Status {
    pub fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Discrepancy => "DISCREPANCY",
            Status::Skipped => "SKIPPED",
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportItem {
    pub id: String,
    pub status: Status,
    /// First line is the headline.
    pub details: String,
    pub paper_ref: String,
    pub elapsed_ms: u64,
}

impl ReportItem {
    pub fn new(id: impl Into<String>, paper_ref: impl Into<String>, status: Status, details: impl Into<String>) -> Self {
        ReportItem {
            id: id.into(),
            status,
            details: details.into(),
            paper_ref: paper_ref.into(),
            elapsed_ms: 0,
        }
    }

    pub fn headline(&self) -> &str {
        self.details.lines().next().unwrap_or("")
    }

    pub fn human_line(&self) -> String {
        format!("[{}] {} {}", self.status.tag(), self.id, self.headline())
    }
}

/// Runs `f` and stamps the item with its wall-clock duration.
pub fn timed(
    id: impl Into<String>,
    paper_ref: impl Into<String>,
    f: impl FnOnce() -> (Status, String),
) -> ReportItem {
    let start = Instant::now();
    let (status, details) = f();
    let mut item = ReportItem::new(id, paper_ref, status, details);
    item.elapsed_ms = start.elapsed().as_millis() as u64;
    item
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub discrepancy: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub items: Vec<ReportItem>,
    pub summary: Summary,
    pub artifact_version: String,
}

impl Default for VerificationReport {
    fn default() -> Self {
        Self::new(Vec::new())
    }
}

impl VerificationReport {
    pub fn new(items: Vec<ReportItem>) -> Self {
        let mut report = VerificationReport {
            items: Vec::new(),
            summary: Summary::default(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        };
        report.extend(items);
        report
    }

    pub fn push(&mut self, item: ReportItem) {
        match item.status {
            Status::Pass => self.summary.pass += 1,
            Status::Fail => self.summary.fail += 1,
            Status::Discrepancy => self.summary.discrepancy += 1,
            Status::Skipped => self.summary.skipped += 1,
        }
        self.items.push(item);
    }

    pub fn extend(&mut self, items: impl IntoIterator<Item = ReportItem>) {
        for item in items {
            self.push(item);
        }
    }

    pub fn append(&mut self, other: VerificationReport) {
        self.extend(other.items);
    }

    pub fn is_success(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn get(&self, id: &str) -> Option<&ReportItem> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn human(&self) -> String {
        let mut out: Vec<String> = self.items.iter().map(ReportItem::human_line).collect();
        out.push(format!(
            "{} pass, {} fail, {} discrepancy, {} skipped",
            self.summary.pass, self.summary.fail, self.summary.discrepancy, self.summary.skipped
        ));
        out.join("\n")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with every `elapsed_ms` zeroed, for reproducibility comparisons.
    pub fn to_canonical_json(&self) -> String {
        let mut copy = self.clone();
        for item in &mut copy.items {
            item.elapsed_ms = 0;
        }
        copy.to_json()
    }
}

/// Zeroes `elapsed_ms` in a serialized report.
pub fn canonicalize_json(json: &str) -> serde_json::Result<String> {
    let report: VerificationReport = serde_json::from_str(json)?;
    Ok(report.to_canonical_json())
}

/// Accumulates failed expectations for one report item.
#[derive(Debug, Default)]
pub struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn expect(&mut self, cond: bool, what: impl FnOnce() -> String) -> bool {
        if !cond {
            self.failures.push(what());
        }
        cond
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn fail(&mut self, what: impl Into<String>) {
        self.failures.push(what.into());
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    /// `Pass` with the notes, or `Fail` listing every failure first.
    pub fn finish(self, headline: impl Into<String>) -> (Status, String) {
        self.finish_with(Status::Pass, headline)
    }

    /// Like [`Checks::finish`] but reports `on_success` when nothing failed.
    pub fn finish_with(self, on_success: Status, headline: impl Into<String>) -> (Status, String) {
        let mut lines = vec![headline.into()];
        let status = if self.failures.is_empty() {
            on_success
        } else {
            lines.extend(self.failures.iter().map(|f| format!("FAILED: {f}")));
            Status::Fail
        };
        lines.extend(self.notes);
        (status, lines.join("\n"))
    }
}
