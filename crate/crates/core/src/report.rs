//! Verification reports and sampling specifications.

use std::fmt;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

/// One check. `anchor` names the identity being checked, or `plumbing`.
#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub check_id: String,
    pub anchor: String,
    pub status: Status,
    pub witness: Option<String>,
    pub sample_spec: String,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub entries: Vec<Entry>,
}

/// Outcome of a single check body: `Err` carries the witness.
pub type CheckResult = Result<(), String>;

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs `body`, timing it, and records the outcome.
    pub fn check<F>(&mut self, check_id: &str, anchor: &str, sample_spec: impl Into<String>, body: F)
    where
        F: FnOnce() -> CheckResult,
    {
        let start = Instant::now();
        let res = body();
        let duration_ms = start.elapsed().as_millis() as u64;
        let (status, witness) = match res {
            Ok(()) => (Status::Pass, None),
            Err(w) => (Status::Fail, Some(w)),
        };
        self.entries.push(Entry {
            check_id: check_id.to_string(),
            anchor: anchor.to_string(),
            status,
            witness,
            sample_spec: sample_spec.into(),
            duration_ms,
        });
    }

    pub fn skip(&mut self, check_id: &str, anchor: &str, reason: &str) {
        self.entries.push(Entry {
            check_id: check_id.to_string(),
            anchor: anchor.to_string(),
            status: Status::Skipped,
            witness: Some(reason.to_string()),
            sample_spec: String::new(),
            duration_ms: 0,
        });
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }

    /// Prefixes every check id, e.g. to distinguish twisted from untwisted runs.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for e in &mut self.entries {
            e.check_id = format!("{prefix}.{}", e.check_id);
        }
        self
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    pub fn failures(&self) -> Vec<&Entry> {
        self.entries.iter().filter(|e| e.status == Status::Fail).collect()
    }

    pub fn get(&self, check_id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.check_id == check_id)
    }

    pub fn passed(&self, check_id: &str) -> bool {
        self.get(check_id).map(|e| e.status == Status::Pass).unwrap_or(false)
    }

    pub fn failed(&self, check_id: &str) -> bool {
        self.get(check_id).map(|e| e.status == Status::Fail).unwrap_or(false)
    }

    /// Entries sorted by check id, which is the order used for output.
    pub fn sorted(mut self) -> Self {
        self.entries.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("{:<7} {:<48} [{}] {}", e.status.to_string(), e.check_id, e.anchor, e.sample_spec));
            if let Some(w) = &e.witness {
                out.push_str(&format!("\n        witness: {w}"));
            }
            out.push('\n');
        }
        let fails = self.failures().len();
        out.push_str(&format!("{} checks, {} failed\n", self.entries.len(), fails));
        out
    }
}

/// Which part of a label family is exercised, and how.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleSpec {
    /// Lattice box `|m_i| <= radius` for free coordinates.
    pub radius: i64,
    /// Number of random samples when a sweep is too large to be exhaustive.
    pub samples: usize,
    pub seed: u64,
    /// Sweeps with at most this many items are run exhaustively.
    pub exhaustive_cap: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { radius: 4, samples: 100, seed: 42, exhaustive_cap: 50_000 }
    }
}

impl SampleSpec {
    pub fn new(radius: i64, samples: usize, seed: u64) -> Self {
        SampleSpec { radius, samples, seed, ..Default::default() }
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }

    pub fn describe(&self, exhaustive: bool, count: usize) -> String {
        if exhaustive {
            format!("box={} exhaustive n={count}", self.radius)
        } else {
            format!("box={} sampled n={count} seed={}", self.radius, self.seed)
        }
    }

    /// All k-tuples from `items` if that is within the cap, else `samples` random ones.
    pub fn tuples<T: Clone>(&self, items: &[T], k: usize, stream: u64) -> (Vec<Vec<T>>, bool) {
        let total = (items.len() as f64).powi(k as i32);
        if total <= self.exhaustive_cap as f64 {
            let mut out: Vec<Vec<T>> = vec![Vec::new()];
            for _ in 0..k {
                let mut next = Vec::with_capacity(out.len() * items.len());
                for t in &out {
                    for it in items {
                        let mut t2 = t.clone();
                        t2.push(it.clone());
                        next.push(t2);
                    }
                }
                out = next;
            }
            (out, true)
        } else {
            let mut rng = self.rng(stream);
            let out = (0..self.samples)
                .map(|_| (0..k).map(|_| items[rng.gen_range(0..items.len())].clone()).collect())
                .collect();
            (out, false)
        }
    }

    /// `samples` random picks from `items` (all of them if there are fewer).
    pub fn pick<T: Clone>(&self, items: &[T], stream: u64) -> Vec<T> {
        if items.len() <= self.samples {
            return items.to_vec();
        }
        let mut rng = self.rng(stream);
        items.choose_multiple(&mut rng, self.samples).cloned().collect()
    }
}

impl fmt::Display for SampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "box={} samples={} seed={}", self.radius, self.samples, self.seed)
    }
}

/// Runs `f` over every item and reports the first failure.
pub fn for_all<T, F>(items: &[T], mut f: F) -> CheckResult
where
    F: FnMut(&T) -> CheckResult,
{
    for it in items {
        f(it)?;
    }
    Ok(())
}
