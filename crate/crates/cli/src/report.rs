//! Pass/fail reports with expected and computed values.

use serde_json::{json, Value};

/// One named check: expected and computed values in printed form, plus an
/// optional note (used to flag oracle conflicts).
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub computed: String,
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: &str, expected: impl Into<String>, computed: impl Into<String>) -> Self {
        let expected = expected.into();
        let computed = computed.into();
        Check { name: name.to_string(), passed: expected == computed, expected, computed, note: None }
    }

    pub fn with_status(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// An ordered list of checks; the overall status is pass iff every check
/// passes.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render_plain(&self) -> String {
        let mut out = String::new();
        let total = self.checks.len();
        for (i, check) in self.checks.iter().enumerate() {
            let status = if check.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{:2}. {} {}\n", i + 1, status, check.name));
            out.push_str(&format!("    expected: {}\n", check.expected));
            out.push_str(&format!("    computed: {}\n", check.computed));
            if let Some(note) = &check.note {
                out.push_str(&format!("    note: {note}\n"));
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let overall = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("overall: {overall} ({passed}/{total} checks)\n"));
        out
    }

    pub fn render_json(&self) -> Value {
        json!({
            "status": if self.passed() { "pass" } else { "fail" },
            "checks": self.checks.iter().map(|c| {
                let mut entry = json!({
                    "name": c.name,
                    "status": if c.passed { "pass" } else { "fail" },
                    "expected": c.expected,
                    "computed": c.computed,
                });
                if let Some(note) = &c.note {
                    entry["note"] = json!(note);
                }
                entry
            }).collect::<Vec<_>>(),
        })
    }
}
