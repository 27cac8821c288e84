//! Solver registry: name plus parameters resolved into a runnable spec.

use qrr_core::classical::{
    bm_solve, greedy_construct, pt_solve, sa_solve, BmBudget, Schedule, ScheduleKind,
};
use qrr_core::error::{Error, Result};
use qrr_core::graph::ProblemInstance;
use qrr_core::qrr::{
    build_correlation_matrix, classical_rr_solve, gw_solve, qrr_solve, qrr_star_solve, Backend,
    CorrelationMatrix,
};
use qrr_core::report::{SolverReport, StageTimer};

#[derive(Debug, Clone)]
pub enum SolverSpec {
    /// Expected cut of the bare layered circuit (no rounding); reports the
    /// floor of the expectation as its cut.
    Qaoa {
        p: usize,
        backend: Backend,
    },
    Qrr {
        p: usize,
        backend: Backend,
    },
    QrrStar {
        p: usize,
        backend: Backend,
        f: f64,
    },
    Rr,
    Gw {
        iters: usize,
        step: f64,
    },
    Qgw {
        p: usize,
        backend: Backend,
        iters: usize,
        step: f64,
    },
    Sa {
        sweeps: usize,
        kind: ScheduleKind,
    },
    Pt {
        sweeps: usize,
        replicas: usize,
    },
    Greedy,
    Bm {
        budget: BmBudget,
    },
}

pub fn parse_backend(name: &str, n_ex: usize, seed: u64) -> Result<Backend> {
    match name {
        "exact" => Ok(Backend::Exact),
        "analytic" | "analytic_p1" => Ok(Backend::AnalyticP1),
        "sampled" => Ok(Backend::Sampled {
            n_ex,
            seed,
            noise: None,
        }),
        other => Err(Error::invalid(format!("unknown backend '{other}'"))),
    }
}

impl SolverSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn parse(
        name: &str,
        p: usize,
        backend: &str,
        n_ex: usize,
        f: f64,
        sweeps: usize,
        schedule: &str,
        replicas: usize,
        bm_budget: BmBudget,
        gw_iters: usize,
        gw_step: f64,
    ) -> Result<SolverSpec> {
        let kind = match schedule {
            "geometric" => ScheduleKind::Geometric,
            "linear" => ScheduleKind::Linear,
            other => return Err(Error::invalid(format!("unknown schedule '{other}'"))),
        };
        Ok(match name {
            "qaoa" => SolverSpec::Qaoa {
                p,
                backend: parse_backend(backend, n_ex, 0)?,
            },
            "qrr" => SolverSpec::Qrr {
                p,
                backend: parse_backend(backend, n_ex, 0)?,
            },
            "qrr_star" => SolverSpec::QrrStar {
                p,
                backend: parse_backend(backend, n_ex, 0)?,
                f,
            },
            "rr" => SolverSpec::Rr,
            "gw" => SolverSpec::Gw {
                iters: gw_iters,
                step: gw_step,
            },
            "qgw" => SolverSpec::Qgw {
                p,
                backend: parse_backend(backend, n_ex, 0)?,
                iters: gw_iters,
                step: gw_step,
            },
            "sa" => SolverSpec::Sa { sweeps, kind },
            "pt" => SolverSpec::Pt { sweeps, replicas },
            "greedy" => SolverSpec::Greedy,
            "bm" => SolverSpec::Bm { budget: bm_budget },
            other => Err(Error::invalid(format!("unknown solver '{other}'")))?,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolverSpec::Qaoa { .. } => "qaoa",
            SolverSpec::Qrr { .. } => "qrr",
            SolverSpec::QrrStar { .. } => "qrr_star",
            SolverSpec::Rr => "rr",
            SolverSpec::Gw { .. } => "gw",
            SolverSpec::Qgw { .. } => "qgw",
            SolverSpec::Sa { .. } => "sa",
            SolverSpec::Pt { .. } => "pt",
            SolverSpec::Greedy => "greedy",
            SolverSpec::Bm { .. } => "bm",
        }
    }

    /// Re-seed the sampled backend so distinct runs draw distinct shots.
    fn backend_for_run(backend: &Backend, seed: u64) -> Backend {
        match backend {
            Backend::Sampled { n_ex, noise, .. } => Backend::Sampled {
                n_ex: *n_ex,
                seed,
                noise: noise.clone(),
            },
            other => other.clone(),
        }
    }

    pub fn run(&self, inst: &ProblemInstance, seed: u64) -> Result<SolverReport> {
        match self {
            SolverSpec::Qaoa { p, backend } => {
                qaoa_expectation_report(inst, *p, &Self::backend_for_run(backend, seed), seed)
            }
            SolverSpec::Qrr { p, backend } => {
                qrr_solve(inst, *p, &Self::backend_for_run(backend, seed), seed)
            }
            SolverSpec::QrrStar { p, backend, f } => {
                qrr_star_solve(inst, *p, &Self::backend_for_run(backend, seed), *f, seed)
            }
            SolverSpec::Rr => classical_rr_solve(inst),
            SolverSpec::Gw { iters, step } => gw_solve(
                &CorrelationMatrix::from_adjacency(inst),
                inst,
                *iters,
                *step,
            ),
            SolverSpec::Qgw {
                p,
                backend,
                iters,
                step,
            } => {
                let matrix =
                    build_correlation_matrix(inst, *p, &Self::backend_for_run(backend, seed))?;
                let mut report = gw_solve(&matrix, inst, *iters, *step)?;
                report.solver = "qgw".into();
                Ok(report)
            }
            SolverSpec::Sa { sweeps, kind } => {
                let (hot, cold) = qrr_core::classical::default_temperatures(inst.n());
                let schedule = Schedule::new(*kind, *sweeps, hot, cold)?;
                sa_solve(inst, &schedule, seed)
            }
            SolverSpec::Pt { sweeps, replicas } => pt_solve(inst, *sweeps, *replicas, seed),
            SolverSpec::Greedy => greedy_construct(inst, seed),
            SolverSpec::Bm { budget } => bm_solve(inst, *budget, seed),
        }
    }
}

/// The bare circuit's expected cut. No bitstrings are rounded, so the
/// "assignment" is empty and `cut` floors the expectation; the exact value
/// rides in `params.expected_cut`.
fn qaoa_expectation_report(
    inst: &ProblemInstance,
    p: usize,
    backend: &Backend,
    seed: u64,
) -> Result<SolverReport> {
    let mut timer = StageTimer::start();
    let matrix = timer.stage("build", || build_correlation_matrix(inst, p, backend))?;
    let expected = qrr_core::qrr::expected_cut_from_matrix(inst, &matrix);
    Ok(SolverReport {
        solver: "qaoa".into(),
        params: serde_json::json!({"p": p, "backend": backend.label(), "expected_cut": expected}),
        seed,
        cut: expected.floor().max(0.0) as u64,
        alpha: None,
        time_ms: timer.total_ms(),
        stage_times: timer.into_stages(),
        assignment: Default::default(),
    })
}
