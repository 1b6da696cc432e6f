//! Check records shared by every verifier and the command line.

use std::time::Instant;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl CheckRecord {
    pub fn pass(name: impl Into<String>, coverage: impl Into<String>) -> CheckRecord {
        CheckRecord { name: name.into(), status: Status::Pass, witness: None, coverage: Some(coverage.into()), wall_ms: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> CheckRecord {
        CheckRecord { name: name.into(), status: Status::Fail, witness: Some(witness.into()), coverage: None, wall_ms: None }
    }

    pub fn skipped(name: impl Into<String>, why: impl Into<String>) -> CheckRecord {
        CheckRecord { name: name.into(), status: Status::Skipped, witness: None, coverage: Some(why.into()), wall_ms: None }
    }

    pub fn from_result(name: impl Into<String>, coverage: impl Into<String>, r: Result<(), String>) -> CheckRecord {
        match r {
            Ok(()) => CheckRecord::pass(name, coverage),
            Err(w) => {
                let mut rec = CheckRecord::fail(name, w);
                rec.coverage = Some(coverage.into());
                rec
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Run `f` and stamp its records with the elapsed time when `timed`.
pub fn timed<F: FnOnce() -> Vec<CheckRecord>>(timed: bool, f: F) -> Vec<CheckRecord> {
    let start = Instant::now();
    let mut recs = f();
    if timed {
        let ms = start.elapsed().as_millis() as u64;
        for r in recs.iter_mut() {
            r.wall_ms = Some(ms);
        }
    }
    recs
}

pub fn all_passed(recs: &[CheckRecord]) -> bool {
    recs.iter().all(|r| r.status != Status::Fail)
}

/// First failing record, for assertion messages.
pub fn first_failure(recs: &[CheckRecord]) -> Option<&CheckRecord> {
    recs.iter().find(|r| r.status == Status::Fail)
}

/// How much of a quantified identity a verifier enumerates.
#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Enumerate all basis triples up to this dimension.
    pub triple_limit: usize,
    /// Enumerate all basis pairs up to this dimension.
    pub pair_limit: usize,
    /// Random basis triples sampled in addition to the generator argument.
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { triple_limit: 128, pair_limit: 128, samples: 10_000, seed: 0x5eed }
    }
}
