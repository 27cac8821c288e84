//! Solver run reports shared by every solver and the benchmark harness.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::graph::Assignment;

/// Outcome of one solver invocation. The JSON form carries exactly
/// `{solver, params, seed, cut, alpha?, time_ms, stage_times}`; the returned
/// assignment stays in memory for verification and greedy post-processing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverReport {
    pub solver: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub cut: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub time_ms: f64,
    pub stage_times: BTreeMap<String, f64>,
    #[serde(skip)]
    pub assignment: Assignment,
}

/// Wall-clock stage accounting on the monotonic process clock.
#[derive(Debug)]
pub struct StageTimer {
    started: Instant,
    stages: BTreeMap<String, f64>,
}

impl StageTimer {
    pub fn start() -> Self {
        StageTimer {
            started: Instant::now(),
            stages: BTreeMap::new(),
        }
    }

    /// Run a stage and record its duration in milliseconds.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let out = f();
        self.stages
            .insert(name.to_string(), t0.elapsed().as_secs_f64() * 1e3);
        out
    }

    pub fn total_ms(&self) -> f64 {
        self.started.elapsed().as_secs_f64() * 1e3
    }

    pub fn into_stages(self) -> BTreeMap<String, f64> {
        self.stages
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_shape() {
        let mut timer = StageTimer::start();
        let x = timer.stage("build", || 21 * 2);
        assert_eq!(x, 42);
        let report = SolverReport {
            solver: "sa".into(),
            params: serde_json::json!({"sweeps": 100}),
            seed: 3,
            cut: 44,
            alpha: None,
            time_ms: timer.total_ms(),
            stage_times: timer.into_stages(),
            assignment: Assignment(vec![1, -1]),
        };
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains("\"solver\":\"sa\""));
        assert!(text.contains("\"cut\":44"));
        assert!(
            !text.contains("alpha"),
            "absent alpha stays out of the JSON"
        );
        assert!(!text.contains("assignment"), "assignment is not serialized");
        let back: SolverReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.cut, 44);
        assert!(back.assignment.is_empty());
    }
}
