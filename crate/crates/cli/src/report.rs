//! Machine-readable verification reports: one JSON object per line, each
//! independently parseable and reproducible from its seed and parameter
//! hash. Wall times are shown in the human summary only, so a fixed seed
//! yields byte-identical report files.

use std::io::Write;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    IllConditioned,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub suite: String,
    pub inputs_digest: String,
    pub rng_seed: u64,
    pub params_hash: String,
    pub measured: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip, default)]
    pub wall_time: Duration,
}

impl CheckRecord {
    /// Standard record: pass iff measured <= tolerance.
    pub fn measured(
        suite: &str,
        check_id: String,
        digest: String,
        seed: u64,
        params_hash: String,
        measured: f64,
        tolerance: f64,
    ) -> CheckRecord {
        CheckRecord {
            check_id,
            suite: suite.to_string(),
            inputs_digest: digest,
            rng_seed: seed,
            params_hash,
            measured,
            tolerance,
            verdict: if measured <= tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            detail: None,
            wall_time: Duration::ZERO,
        }
    }

    pub fn with_detail(mut self, detail: String) -> CheckRecord {
        self.detail = Some(detail);
        self
    }

    pub fn ill_conditioned(mut self) -> CheckRecord {
        self.verdict = Verdict::IllConditioned;
        self
    }
}

/// A suite's worth of records plus bookkeeping for the human summary.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn extend(&mut self, mut records: Vec<CheckRecord>) {
        self.records.append(&mut records);
    }

    /// Deterministic order regardless of the parallel schedule.
    pub fn finalize(&mut self) {
        self.records.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    }

    pub fn failures(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.verdict == Verdict::Fail)
            .count()
    }

    pub fn ill_conditioned(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.verdict == Verdict::IllConditioned)
            .count()
    }

    /// Append the records as JSON lines.
    pub fn write_jsonl(&self, path: &std::path::Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)
                    .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
            }
        }
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::Io(format!("opening {}: {e}", path.display())))?;
        for record in &self.records {
            let line = serde_json::to_string(record)
                .map_err(|e| CliError::Io(format!("serializing record: {e}")))?;
            writeln!(file, "{line}").map_err(|e| CliError::Io(format!("writing report: {e}")))?;
        }
        Ok(())
    }

    /// Human summary: per-suite counts, failures spelled out, wall time.
    pub fn print_summary(&self, elapsed: Duration) {
        let mut suites: Vec<&str> = self.records.iter().map(|r| r.suite.as_str()).collect();
        suites.dedup();
        suites.sort_unstable();
        suites.dedup();
        for suite in suites {
            let in_suite: Vec<&CheckRecord> =
                self.records.iter().filter(|r| r.suite == suite).collect();
            let fails = in_suite
                .iter()
                .filter(|r| r.verdict == Verdict::Fail)
                .count();
            let ill = in_suite
                .iter()
                .filter(|r| r.verdict == Verdict::IllConditioned)
                .count();
            println!(
                "suite {suite}: {} checks, {} failed, {} ill-conditioned",
                in_suite.len(),
                fails,
                ill
            );
            for r in in_suite.iter().filter(|r| r.verdict == Verdict::Fail) {
                println!(
                    "  FAIL {}: measured {:.3e} > tolerance {:.3e}{}",
                    r.check_id,
                    r.measured,
                    r.tolerance,
                    r.detail
                        .as_deref()
                        .map(|d| format!(" ({d})"))
                        .unwrap_or_default()
                );
            }
        }
        println!(
            "total: {} checks, {} failed, {} ill-conditioned in {:.2}s",
            self.records.len(),
            self.failures(),
            self.ill_conditioned(),
            elapsed.as_secs_f64()
        );
    }
}

/// FNV-1a digest of a list of floats, for the `inputs_digest` field.
pub fn digest_inputs(values: &[f64]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_serialize_without_wall_time() {
        let mut r = CheckRecord::measured(
            "algebra",
            "algebra/qybe/000".into(),
            "abc".into(),
            7,
            "hash".into(),
            1e-13,
            1e-12,
        );
        r.wall_time = Duration::from_millis(5);
        let line = serde_json::to_string(&r).unwrap();
        assert!(!line.contains("wall_time"));
        assert!(line.contains("\"verdict\":\"pass\""));
        let back: CheckRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back.verdict, Verdict::Pass);
        assert_eq!(back.wall_time, Duration::ZERO);
    }

    #[test]
    fn report_sorts_by_check_id() {
        let mut rep = VerificationReport::default();
        for id in ["b/2", "a/1", "b/1"] {
            rep.extend(vec![CheckRecord::measured(
                "s",
                id.into(),
                String::new(),
                0,
                String::new(),
                0.0,
                1.0,
            )]);
        }
        rep.finalize();
        let ids: Vec<&str> = rep.records.iter().map(|r| r.check_id.as_str()).collect();
        assert_eq!(ids, ["a/1", "b/1", "b/2"]);
    }
}
