//! Multi-instance helpers: correlation matrices built against a shared
//! isomorphism database (one statevector run per class across the whole
//! ensemble), best-known-optimum estimation, and small statistics utilities
//! used by the benchmark harness.

use std::collections::HashMap;

use crate::classical::{bm_solve, sa_solve, BmBudget, Schedule};
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{brute_force_maxcut, ProblemInstance, BRUTE_FORCE_CAP};
use crate::lightcone::{correlated_pairs, subproblem, IsoClass, IsoDatabase};
use crate::qrr::{class_correlation, Backend, CorrelationMatrix};
use crate::seeds;

/// Correlation matrices for a whole ensemble, the merged class database, and
/// the per-class correlation values that filled them.
#[derive(Debug)]
pub struct SharedBuild {
    pub matrices: Vec<CorrelationMatrix>,
    pub classes: Vec<IsoClass>,
    pub values: Vec<f64>,
}

/// Deduplicate every correlated pair of every instance into one merged
/// anchored-isomorphism database.
pub fn collect_classes(
    instances: &[ProblemInstance],
    p: usize,
    parallel: bool,
) -> Result<Vec<IsoClass>> {
    let partial: Vec<Result<IsoDatabase>> = exec::map_indexed(parallel, instances, |_, inst| {
        let mut db = IsoDatabase::new();
        for (i, j) in correlated_pairs(inst, p) {
            db.insert(subproblem(inst, i, j, p)?);
        }
        Ok(db)
    });
    let mut db = IsoDatabase::new();
    for part in partial {
        db.merge(part?);
    }
    Ok(db.into_classes())
}

/// Build every instance's correlation matrix with one evaluation per
/// anchored-isomorphism class across the ensemble. Instance ids must be
/// unique.
pub fn build_matrices_shared(
    instances: &[ProblemInstance],
    p: usize,
    backend: &Backend,
    parallel: bool,
) -> Result<SharedBuild> {
    let classes = collect_classes(instances, p, parallel)?;
    let values: Vec<f64> = exec::map_indexed(parallel, &classes, |idx, class| {
        class_correlation(class, p, backend, idx)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let index_of: HashMap<&str, usize> = instances
        .iter()
        .enumerate()
        .map(|(k, inst)| (inst.id.as_str(), k))
        .collect();
    if index_of.len() != instances.len() {
        return Err(Error::invalid(
            "instance ids must be unique for a shared build",
        ));
    }
    let mut entries: Vec<Vec<(u32, u32, f64)>> = vec![Vec::new(); instances.len()];
    for (class, &value) in classes.iter().zip(&values) {
        for member in &class.members {
            let Some(&k) = index_of.get(member.origin.0.as_str()) else {
                return Err(Error::invalid(format!(
                    "unknown origin instance {}",
                    member.origin.0
                )));
            };
            entries[k].push((member.origin.1, member.origin.2, -value));
        }
    }
    let matrices = instances
        .iter()
        .zip(entries)
        .map(|(inst, e)| CorrelationMatrix::new(inst.n(), e))
        .collect::<Result<_>>()?;
    Ok(SharedBuild {
        matrices,
        classes,
        values,
    })
}

/// How a best-known cut was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimumKind {
    Exact,
    Heuristic,
}

/// Best-known optimum of one instance.
#[derive(Debug, Clone)]
pub struct OptimumEstimate {
    pub best_cut: u64,
    pub kind: OptimumKind,
    /// The best value recurred across independent restarts (distribution
    /// peak at the extreme), supporting optimality.
    pub peaked: bool,
    pub hits_at_best: usize,
    pub runs: usize,
}

/// Exact optimum by enumeration below the cap, otherwise the best over
/// `restarts` rank-2 descents plus `restarts` annealing runs.
pub fn estimate_optimum(
    inst: &ProblemInstance,
    restarts: usize,
    bm_budget: BmBudget,
    sa_sweeps: usize,
    seed: u64,
    parallel: bool,
) -> Result<OptimumEstimate> {
    if inst.n() <= BRUTE_FORCE_CAP {
        let (best_cut, _) = brute_force_maxcut(inst)?;
        return Ok(OptimumEstimate {
            best_cut,
            kind: OptimumKind::Exact,
            peaked: true,
            hits_at_best: 1,
            runs: 1,
        });
    }
    if restarts == 0 {
        return Err(Error::invalid(format!(
            "no exact oracle above {BRUTE_FORCE_CAP} vertices and zero restarts requested"
        )));
    }
    let schedule = Schedule::default_geometric(inst.n(), sa_sweeps)?;
    let cuts: Vec<Result<u64>> = exec::map_range(parallel, 2 * restarts, |r| {
        let run_seed = seeds::derive2(seed, 0xbe57, r as u64);
        if r < restarts {
            bm_solve(inst, bm_budget, run_seed).map(|rep| rep.cut)
        } else {
            sa_solve(inst, &schedule, run_seed).map(|rep| rep.cut)
        }
    });
    let cuts: Vec<u64> = cuts.into_iter().collect::<Result<_>>()?;
    let best_cut = *cuts.iter().max().unwrap();
    let hits = cuts.iter().filter(|&&c| c == best_cut).count();
    Ok(OptimumEstimate {
        best_cut,
        kind: OptimumKind::Heuristic,
        peaked: hits >= 2.max(cuts.len() / 20),
        hits_at_best: hits,
        runs: cuts.len(),
    })
}

/// Sample mean and standard deviation (n - 1 normalization).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Standard error of the mean.
pub fn sem(values: &[f64]) -> f64 {
    let (_, sd) = mean_std(values);
    sd / (values.len() as f64).sqrt()
}

/// Least-squares slope of `y` against `x`.
pub fn linreg_slope(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}
