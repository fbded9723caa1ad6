use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub name: String,
    pub status: StageStatus,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

/// Record of one run: resolved configuration, checks, stages and output
/// digests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub out_dir: String,
    pub config: BTreeMap<String, String>,
    pub wall_time_s: f64,
    pub checks: Vec<Check>,
    pub stages: Vec<StageRecord>,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.stages.iter().all(|s| s.status != StageStatus::Failed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tool = {} {}", self.tool, self.version);
        let _ = writeln!(s, "experiment = {}", self.experiment);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out_dir = {}", self.out_dir);
        let _ = writeln!(s, "wall_time_s = {:.3}", self.wall_time_s);
        let _ = writeln!(s, "status = {}", if self.passed() { "pass" } else { "fail" });
        s.push_str("\n[config]\n");
        for (k, v) in &self.config {
            let _ = writeln!(s, "{k} = {v}");
        }
        if !self.stages.is_empty() {
            s.push_str("\n[stages]\n");
            for st in &self.stages {
                let status = match st.status {
                    StageStatus::Passed => "passed",
                    StageStatus::Failed => "FAILED",
                    StageStatus::Skipped => "skipped",
                };
                let _ = writeln!(s, "{} = {status}  # {}", st.name, st.reason);
            }
        }
        s.push_str("\n[checks]\n");
        for c in &self.checks {
            let _ = writeln!(s, "{} = {}  # {}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
        }
        s.push_str("\n[outputs]\n");
        for o in &self.outputs {
            let _ = writeln!(s, "{} = sha256:{}", o.file, o.sha256);
        }
        s
    }

    pub fn digest_of(&self, file: &str) -> Option<&str> {
        self.outputs.iter().find(|o| o.file == file).map(|o| o.sha256.as_str())
    }
}
