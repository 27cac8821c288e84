//! Run-time accounting: idealized circuit durations, the fitted cloud-service
//! model, light-cone batching onto an M-qubit machine, fitted classical cost
//! models, and the time-to-match benchmark metric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ProblemInstance;
use crate::lightcone::{correlated_pairs, subproblem};
use crate::seeds;

/// Fitted per-sweep-per-variable cost of the annealer implementation, in
/// seconds.
pub const SA_SECONDS_PER_SWEEP_VARIABLE: f64 = 1.79e-8;
/// Fitted per-entry-per-shot cost of correlation-matrix assembly, seconds.
pub const CORRELATION_SECONDS_PER_ENTRY_SHOT: f64 = 3.859e-10;
/// Fitted per-pass-per-variable cost of the rank-2 heuristic, in seconds
/// (release build on this crate's reference machine; a planning constant in
/// the same spirit as the annealer fit). One pass covers the angular descent,
/// 32 hyperplane roundings, and the 1-flip polish.
pub const BM_SECONDS_PER_PASS_VARIABLE: f64 = 3.0e-6;

/// Coefficients of the fitted cloud-service run-time model, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcsCoeffs {
    pub c0: f64,
    pub c_n: f64,
    pub c_nex: f64,
    pub c_np: f64,
    pub c_n_nex: f64,
    pub c_np_nex: f64,
}

impl QcsCoeffs {
    /// The fitted values measured on the 84-qubit chip's cloud service.
    pub fn fitted() -> Self {
        QcsCoeffs {
            c0: 2.77e-2,
            c_n: 1.07e-3,
            c_nex: 2.04e-4,
            c_np: 3.83e-4,
            c_n_nex: 8.37e-7,
            c_np_nex: 4.46e-7,
        }
    }
}

/// Gate/measurement durations plus machine size and shot count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuntimeParams {
    /// One-qubit (Rx pulse) duration, seconds.
    pub t_1q: f64,
    /// Two-qubit (ISWAP) duration, seconds.
    pub t_2q: f64,
    /// Measurement plus active reset, seconds.
    pub t_meas_reset: f64,
    /// Qubits available on the machine.
    pub machine_qubits: usize,
    /// Shots per subcircuit.
    pub n_ex: u64,
    pub qcs: QcsCoeffs,
}

impl RuntimeParams {
    /// Current-hardware gate times: 40 ns / 122 ns / 6 us.
    pub fn current_hardware(machine_qubits: usize, n_ex: u64) -> Self {
        RuntimeParams {
            t_1q: 40e-9,
            t_2q: 122e-9,
            t_meas_reset: 6e-6,
            machine_qubits,
            n_ex,
            qcs: QcsCoeffs::fitted(),
        }
    }

    /// Best-in-literature gate times: 20 ns / 50 ns / 6 us.
    pub fn target_hardware(machine_qubits: usize, n_ex: u64) -> Self {
        RuntimeParams {
            t_1q: 20e-9,
            t_2q: 50e-9,
            ..Self::current_hardware(machine_qubits, n_ex)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t_1q <= 0.0 || self.t_2q <= 0.0 || self.t_meas_reset <= 0.0 {
            return Err(Error::invalid(
                "gate and measurement durations must be positive",
            ));
        }
        if self.machine_qubits < 7 {
            return Err(Error::invalid("machine must have at least 7 qubits"));
        }
        Ok(())
    }
}

/// Idealized duration of `n_ex` executions of an `n_qubits`-wide depth-`p`
/// circuit on a linear chain with the worst-case swap network:
/// `n_ex * [t_init + p (t_mx + n t_ps) + t_meas_reset]` where
/// `t_init = t_1q`, `t_mx = 2 t_1q`, and `t_ps = 4 t_1q + 3 t_2q`.
pub fn circuit_duration(
    n_qubits: usize,
    p: usize,
    n_ex: u64,
    params: &RuntimeParams,
) -> Result<f64> {
    params.validate()?;
    if n_qubits == 0 || p == 0 || n_ex == 0 {
        return Err(Error::invalid(
            "qubit count, depth, and shots must all be positive",
        ));
    }
    let t_init = params.t_1q;
    let t_mx = 2.0 * params.t_1q;
    let t_ps = 4.0 * params.t_1q + 3.0 * params.t_2q;
    Ok(n_ex as f64 * (t_init + p as f64 * (t_mx + n_qubits as f64 * t_ps) + params.t_meas_reset))
}

/// Fitted end-to-end cloud-service duration for one job.
pub fn qcs_duration(n: usize, p: usize, n_ex: u64, coeffs: &QcsCoeffs) -> f64 {
    let (n, p, nex) = (n as f64, p as f64, n_ex as f64);
    coeffs.c0
        + coeffs.c_n * n
        + coeffs.c_nex * nex
        + coeffs.c_np * n * p
        + coeffs.c_n_nex * n * nex
        + coeffs.c_np_nex * n * p * nex
}

/// Quantum run-time of one instance's light-cone workload, two ways:
/// the average form `mean_duration * ceil(count * mean_size / M)` and a
/// first-fit-decreasing packing where each batch runs as slow as its widest
/// member.
pub fn quantum_runtime(
    inst: &ProblemInstance,
    p: usize,
    params: &RuntimeParams,
) -> Result<(f64, f64)> {
    let sizes = task_sizes(inst, p)?;
    runtime_from_sizes(&sizes, sizes.len() as f64, p, params)
}

/// Ensemble version: the ceiling form uses expectations over all tasks of
/// all instances with the mean per-instance task count; the packed form is
/// the mean of the per-instance packings.
pub fn quantum_runtime_ensemble(
    instances: &[ProblemInstance],
    p: usize,
    params: &RuntimeParams,
) -> Result<(f64, f64)> {
    if instances.is_empty() {
        return Err(Error::invalid("need at least one instance"));
    }
    let mut sizes = Vec::new();
    let mut packed_sum = 0.0;
    for inst in instances {
        let inst_sizes = task_sizes(inst, p)?;
        let (_, packed) = runtime_from_sizes(&inst_sizes, inst_sizes.len() as f64, p, params)?;
        packed_sum += packed;
        sizes.extend(inst_sizes);
    }
    let mean_count = sizes.len() as f64 / instances.len() as f64;
    let (formula, _) = runtime_from_sizes(&sizes, mean_count, p, params)?;
    Ok((formula, packed_sum / instances.len() as f64))
}

fn task_sizes(inst: &ProblemInstance, p: usize) -> Result<Vec<usize>> {
    correlated_pairs(inst, p)
        .into_iter()
        .map(|(i, j)| subproblem(inst, i, j, p).map(|t| t.size))
        .collect()
}

fn runtime_from_sizes(
    sizes: &[usize],
    count: f64,
    p: usize,
    params: &RuntimeParams,
) -> Result<(f64, f64)> {
    params.validate()?;
    if sizes.is_empty() {
        return Err(Error::invalid("no correlated pairs to schedule"));
    }
    let m = params.machine_qubits;
    if let Some(&too_big) = sizes.iter().find(|&&s| s > m) {
        return Err(Error::capacity(format!(
            "task of {too_big} qubits exceeds machine size {m}"
        )));
    }
    let mean_size = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
    let mut mean_duration = 0.0;
    for &s in sizes {
        mean_duration += circuit_duration(s, p, params.n_ex, params)?;
    }
    mean_duration /= sizes.len() as f64;
    let rounds = (count * mean_size / m as f64).ceil().max(1.0);
    let formula = mean_duration * rounds;

    // First-fit decreasing: descending sizes, so each batch's first member
    // sets its duration.
    let mut desc = sizes.to_vec();
    desc.sort_unstable_by(|a, b| b.cmp(a));
    let mut loads: Vec<usize> = Vec::new();
    let mut widest: Vec<usize> = Vec::new();
    for &s in &desc {
        match loads.iter().position(|&l| l + s <= m) {
            Some(b) => loads[b] += s,
            None => {
                loads.push(s);
                widest.push(s);
            }
        }
    }
    let mut packed = 0.0;
    for &w in &widest {
        packed += circuit_duration(w, p, params.n_ex, params)?;
    }
    Ok((formula, packed))
}

/// Deterministic cost models for planning; measured wall clock is always
/// recorded separately by the solvers themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalCost {
    /// Annealing with `sweeps` sweeps on `n` variables.
    Sa { n: usize, sweeps: usize },
    /// Correlation-matrix assembly from `entries` nonzero pairs and `shots`
    /// bitstrings.
    CorrelationBuild { entries: u64, shots: u64 },
    /// The rank-2 heuristic under a wall-clock budget: the control is the
    /// run-time.
    Bm { budget_s: f64 },
    /// The rank-2 heuristic under a deterministic pass budget.
    BmPasses { n: usize, passes: u32 },
}

pub fn classical_runtime_estimate(cost: ClassicalCost) -> f64 {
    match cost {
        ClassicalCost::Sa { n, sweeps } => SA_SECONDS_PER_SWEEP_VARIABLE * n as f64 * sweeps as f64,
        ClassicalCost::CorrelationBuild { entries, shots } => {
            CORRELATION_SECONDS_PER_ENTRY_SHOT * entries as f64 * shots as f64
        }
        ClassicalCost::Bm { budget_s } => budget_s,
        ClassicalCost::BmPasses { n, passes } => {
            BM_SECONDS_PER_PASS_VARIABLE * n as f64 * passes as f64
        }
    }
}

/// Time-to-match at one control setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeToMatch {
    /// `mean_t / matched fraction`; infinite when nothing matched.
    pub t_star_s: f64,
    pub mean_t_s: f64,
    pub runs: usize,
    pub matched: usize,
    /// Set when no run matched: the true value can only be bounded below.
    pub is_lower_bound: bool,
}

/// Combine per-run `(wall seconds, matched)` outcomes at a single control
/// setting.
pub fn time_to_match(runs: &[(f64, bool)]) -> Result<TimeToMatch> {
    if runs.is_empty() {
        return Err(Error::invalid("need at least one run"));
    }
    let mean_t = runs.iter().map(|r| r.0).sum::<f64>() / runs.len() as f64;
    let matched = runs.iter().filter(|r| r.1).count();
    let p = matched as f64 / runs.len() as f64;
    Ok(TimeToMatch {
        t_star_s: if matched == 0 {
            f64::INFINITY
        } else {
            mean_t / p
        },
        mean_t_s: mean_t,
        runs: runs.len(),
        matched,
        is_lower_bound: matched == 0,
    })
}

/// Evaluate `time_to_match` on every grid point and return the minimizer.
/// `run` maps `(control, derived seed)` to one `(wall seconds, matched)`
/// outcome; seeds derive deterministically from `(seed, point, repetition)`.
pub fn t_star_opt<F>(
    control_grid: &[f64],
    runs_per_point: usize,
    seed: u64,
    mut run: F,
) -> Result<(f64, TimeToMatch, Vec<TimeToMatch>)>
where
    F: FnMut(f64, u64) -> Result<(f64, bool)>,
{
    if control_grid.is_empty() || runs_per_point == 0 {
        return Err(Error::invalid(
            "grid and repetition count must be non-empty",
        ));
    }
    let mut curve = Vec::with_capacity(control_grid.len());
    for (pi, &control) in control_grid.iter().enumerate() {
        let mut outcomes = Vec::with_capacity(runs_per_point);
        for r in 0..runs_per_point {
            outcomes.push(run(control, seeds::derive2(seed, pi as u64, r as u64))?);
        }
        curve.push(time_to_match(&outcomes)?);
    }
    let best = curve
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.t_star_s.total_cmp(&b.t_star_s))
        .map(|(i, _)| i)
        .unwrap();
    Ok((control_grid[best], curve[best], curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_regular;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circuit_duration_hand_value() {
        let params = RuntimeParams::current_hardware(100, 1);
        let t = circuit_duration(7, 1, 1, &params).unwrap();
        assert_abs_diff_eq!(t, 9802e-9, epsilon = 1e-15);
        // Linearity in the shot count.
        let t2 = circuit_duration(7, 1, 2, &params).unwrap();
        assert_abs_diff_eq!(t2, 2.0 * t, epsilon = 1e-18);
        assert!(circuit_duration(7, 0, 1, &params).is_err());
    }

    #[test]
    fn qcs_duration_hand_value() {
        let c = QcsCoeffs::fitted();
        assert_abs_diff_eq!(qcs_duration(10, 1, 1000, &c), 0.25906, epsilon = 1e-5);
        let zero = QcsCoeffs {
            c0: 0.0,
            c_n: 0.0,
            c_nex: 0.0,
            c_np: 0.0,
            c_n_nex: 0.0,
            c_np_nex: 0.0,
        };
        assert_eq!(qcs_duration(10, 1, 1000, &zero), 0.0);
        // n_ex = 0 leaves only the shot-independent terms.
        assert_abs_diff_eq!(
            qcs_duration(10, 2, 0, &c),
            c.c0 + c.c_n * 10.0 + c.c_np * 20.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn homogeneous_packing_degenerates_to_the_ceiling_form() {
        let params = RuntimeParams::current_hardware(100, 10);
        let sizes = vec![7usize; 140];
        let (formula, packed) = runtime_from_sizes(&sizes, 140.0, 1, &params).unwrap();
        let dur = circuit_duration(7, 1, 10, &params).unwrap();
        // ceil(140 * 7 / 100) = 10 rounds.
        assert_abs_diff_eq!(formula, dur * 10.0, epsilon = 1e-12);
        // FFD packs 14 per machine: 10 batches.
        assert_abs_diff_eq!(packed, dur * 10.0, epsilon = 1e-12);
        assert!(packed <= formula * (1.0 + 1.0 / 10.0) + 1e-12);
        // Everything fits at once on a big machine.
        let big = RuntimeParams::current_hardware(1000, 10);
        let (_, packed) = runtime_from_sizes(&vec![7; 100], 100.0, 1, &big).unwrap();
        assert_abs_diff_eq!(
            packed,
            circuit_duration(7, 1, 10, &big).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn oversized_task_is_a_capacity_error() {
        let mut params = RuntimeParams::current_hardware(7, 10);
        params.machine_qubits = 7;
        let inst = generate_regular(32, 1).unwrap();
        // p = 2 tasks reach up to 19 qubits.
        assert!(matches!(
            quantum_runtime(&inst, 2, &params),
            Err(Error::Capacity(_))
        ));
        let ok = RuntimeParams::current_hardware(100, 10);
        let (formula, packed) = quantum_runtime(&inst, 1, &ok).unwrap();
        assert!(formula > 0.0 && packed > 0.0);
    }

    #[test]
    fn classical_cost_models() {
        let sa = classical_runtime_estimate(ClassicalCost::Sa {
            n: 1024,
            sweeps: 100,
        });
        assert_abs_diff_eq!(sa, 1.79e-8 * 1024.0 * 100.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sa, 1.83296e-3, epsilon = 1e-7);
        let cb = classical_runtime_estimate(ClassicalCost::CorrelationBuild {
            entries: 10_000,
            shots: 10_000,
        });
        assert_abs_diff_eq!(cb, 38.59e-3, epsilon = 1e-6);
        assert_eq!(
            classical_runtime_estimate(ClassicalCost::Sa { n: 64, sweeps: 0 }),
            0.0
        );
    }

    #[test]
    fn time_to_match_examples() {
        let t = time_to_match(&[(1e-3, true), (1e-3, false)]).unwrap();
        assert_abs_diff_eq!(t.t_star_s, 2e-3, epsilon = 1e-12);
        let all = time_to_match(&[(2e-3, true), (4e-3, true)]).unwrap();
        assert_abs_diff_eq!(all.t_star_s, 3e-3, epsilon = 1e-12);
        assert!(!all.is_lower_bound);
        let none = time_to_match(&[(1e-3, false)]).unwrap();
        assert!(none.t_star_s.is_infinite());
        assert!(none.is_lower_bound);
        assert!(time_to_match(&[]).is_err());
        // More matches at fixed mean time never increase t*.
        let worse = time_to_match(&[(1e-3, true), (1e-3, false), (1e-3, false)]).unwrap();
        let better = time_to_match(&[(1e-3, true), (1e-3, true), (1e-3, false)]).unwrap();
        assert!(better.t_star_s <= worse.t_star_s);
    }

    #[test]
    fn t_star_opt_picks_the_u_minimum() {
        // Synthetic solver: matching probability rises with control while
        // cost rises linearly, giving a U-shaped ratio.
        let grid = [1.0, 2.0, 4.0, 8.0, 16.0];
        let (best_control, best, curve) = t_star_opt(&grid, 64, 9, |control, seed| {
            let p = 1.0 - (-control / 3.0).exp();
            let matched = (seeds::splitmix64(seed) as f64 / u64::MAX as f64) < p;
            Ok((control * 1e-3, matched))
        })
        .unwrap();
        assert_eq!(curve.len(), 5);
        assert!(best.t_star_s.is_finite());
        assert!(
            best_control > 1.0 && best_control < 16.0,
            "minimum is interior"
        );
        // Degenerate grid returns its only point.
        let (c, _, _) = t_star_opt(&[3.0], 4, 1, |control, _| Ok((control, true))).unwrap();
        assert_eq!(c, 3.0);
    }
}
