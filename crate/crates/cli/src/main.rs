//! `qrr` -- benchmark CLI around the max-cut solver lab.
//!
//! Subcommands: `generate`, `estimate-optimum`, `solve`, `benchmark`,
//! `runtime-model`, `emulate-class`. Exit codes: 0 success, 2 usage,
//! 3 data, 4 numerical.

mod campaign;
mod commands;
mod config;
mod registry;

use clap::{Parser, Subcommand};
use qrr_core::Error;

#[derive(Parser)]
#[command(
    name = "qrr",
    version,
    about = "Max-cut solver benchmark harness for random 3-regular graphs"
)]
struct Cli {
    /// Master seed; every stream of randomness derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run everything single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random 3-regular instances as edge lists plus a JSON manifest.
    Generate {
        /// Comma-separated vertex counts, e.g. 32,64,128.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Instances per size.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Output directory.
        #[arg(long)]
        out: std::path::PathBuf,
    },
    /// Estimate best-known optima for every manifest instance.
    EstimateOptimum {
        #[arg(long)]
        manifest: std::path::PathBuf,
        /// Restarts per heuristic family (above the exact-enumeration cap).
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        /// Wall-clock budget per rank-2 restart, in milliseconds.
        #[arg(long, default_value_t = 100, conflicts_with = "bm_passes")]
        bm_budget_ms: u64,
        /// Deterministic pass budget per rank-2 restart (overrides the
        /// wall-clock budget).
        #[arg(long)]
        bm_passes: Option<u32>,
        /// Sweeps per annealing restart.
        #[arg(long, default_value_t = 1000)]
        sa_sweeps: usize,
        /// Output CSV path.
        #[arg(long)]
        out: std::path::PathBuf,
    },
    /// Run one solver over a manifest; one JSON report line per
    /// (instance, seed).
    Solve {
        #[arg(long)]
        manifest: std::path::PathBuf,
        /// Solver name: qaoa, qrr, qrr_star, rr, gw, qgw, sa, pt, greedy, bm.
        #[arg(long)]
        solver: String,
        /// Circuit depth for the quantum solvers.
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Correlation backend: exact, analytic, sampled.
        #[arg(long, default_value = "exact")]
        backend: String,
        /// Shots for the sampled backend.
        #[arg(long, default_value_t = 10_000)]
        n_ex: usize,
        /// Greedy visit budget in units of n.
        #[arg(long, default_value_t = 10.0)]
        f: f64,
        /// Annealing sweeps.
        #[arg(long, default_value_t = 200)]
        sweeps: usize,
        /// Annealing schedule: geometric or linear.
        #[arg(long, default_value = "geometric")]
        schedule: String,
        /// Tempering replicas.
        #[arg(long, default_value_t = 10)]
        replicas: usize,
        /// Rank-2 wall-clock budget in milliseconds.
        #[arg(long, default_value_t = 100, conflicts_with = "bm_passes")]
        bm_budget_ms: u64,
        /// Rank-2 deterministic pass budget.
        #[arg(long)]
        bm_passes: Option<u32>,
        /// Correcting-vector subgradient iterations.
        #[arg(long, default_value_t = 200)]
        gw_iters: usize,
        /// Correcting-vector base step size.
        #[arg(long, default_value_t = 1.0)]
        gw_step: f64,
        /// Runs per instance; run r uses seed `--seed + r`.
        #[arg(long, default_value_t = 1)]
        runs: u64,
        /// Optional best-known CSV (from estimate-optimum) to fill alpha.
        #[arg(long)]
        best_known: Option<std::path::PathBuf>,
        /// Output JSONL path.
        #[arg(long)]
        out: std::path::PathBuf,
    },
    /// Run a benchmark campaign from a config file; every config key has a
    /// CLI override flag of the same name.
    Benchmark {
        /// Campaign config (TOML sections); defaults used when omitted.
        #[arg(long)]
        config: Option<std::path::PathBuf>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long)]
        instances_per_size: Option<usize>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// model (reproducible planning costs) or wall (measured).
        #[arg(long)]
        timing: Option<String>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        backend: Option<String>,
        #[arg(long)]
        n_ex: Option<usize>,
        #[arg(long)]
        f: Option<f64>,
        #[arg(long)]
        oracle_restarts: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        sa_sweeps_grid: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        bm_passes_grid: Option<Vec<u32>>,
        #[arg(long)]
        runs_per_point: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        alpha_solvers: Option<Vec<String>>,
        #[arg(long)]
        machine_qubits: Option<usize>,
        #[arg(long)]
        runtime_n_ex: Option<u64>,
        /// Gate-time scenario: current or target.
        #[arg(long)]
        gates: Option<String>,
        /// External result CSV (instance_id,solver,control,cut,t_ms,capped).
        #[arg(long)]
        external_results: Option<std::path::PathBuf>,
        #[arg(long)]
        external_cap_seconds: Option<f64>,
    },
    /// Print the run-time model for one problem size.
    RuntimeModel {
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 100)]
        machine_qubits: usize,
        #[arg(long, default_value_t = 5000)]
        n_ex: u64,
        /// Instances averaged for the light-cone workload.
        #[arg(long, default_value_t = 100)]
        ensemble: usize,
        /// Gate-time scenario: current or target.
        #[arg(long, default_value = "current")]
        gates: String,
    },
    /// Deduplicate subcircuit classes over an ensemble and emulate each once
    /// (exact and sampled).
    EmulateClass {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 10_000)]
        n_ex: usize,
        #[arg(long)]
        out: std::path::PathBuf,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Domain(_) | Error::Capacity(_) => 2,
        Error::Io(_) | Error::Format(_) => 3,
        Error::Numerical(_) => 4,
    }
}

fn main() {
    let cli = Cli::parse();
    let parallel = !cli.sequential;
    let seed = cli.seed;
    let result = match cli.command {
        Command::Generate { sizes, count, out } => commands::generate(&sizes, count, seed, &out),
        Command::EstimateOptimum {
            manifest,
            restarts,
            bm_budget_ms,
            bm_passes,
            sa_sweeps,
            out,
        } => commands::estimate_optimum(
            &manifest,
            restarts,
            bm_passes.map_or(
                qrr_core::classical::BmBudget::Millis(bm_budget_ms),
                qrr_core::classical::BmBudget::Passes,
            ),
            sa_sweeps,
            seed,
            parallel,
            &out,
        ),
        Command::Solve {
            manifest,
            solver,
            p,
            backend,
            n_ex,
            f,
            sweeps,
            schedule,
            replicas,
            bm_budget_ms,
            bm_passes,
            gw_iters,
            gw_step,
            runs,
            best_known,
            out,
        } => registry::SolverSpec::parse(
            &solver,
            p,
            &backend,
            n_ex,
            f,
            sweeps,
            &schedule,
            replicas,
            bm_passes.map_or(
                qrr_core::classical::BmBudget::Millis(bm_budget_ms),
                qrr_core::classical::BmBudget::Passes,
            ),
            gw_iters,
            gw_step,
        )
        .and_then(|spec| {
            commands::solve(
                &manifest,
                &spec,
                runs,
                seed,
                parallel,
                best_known.as_deref(),
                &out,
            )
        }),
        Command::Benchmark {
            config,
            sizes,
            instances_per_size,
            out,
            timing,
            p,
            backend,
            n_ex,
            f,
            oracle_restarts,
            sa_sweeps_grid,
            bm_passes_grid,
            runs_per_point,
            alpha_solvers,
            machine_qubits,
            runtime_n_ex,
            gates,
            external_results,
            external_cap_seconds,
        } => {
            let overrides = config::Overrides {
                sizes,
                instances_per_size,
                out,
                timing,
                p,
                backend,
                n_ex,
                f,
                oracle_restarts,
                sa_sweeps_grid,
                bm_passes_grid,
                runs_per_point,
                alpha_solvers,
                machine_qubits,
                runtime_n_ex,
                gates,
                external_results,
                external_cap_seconds,
                seed: Some(seed),
            };
            config::load(config.as_deref(), overrides).and_then(|cfg| campaign::run(&cfg, parallel))
        }
        Command::RuntimeModel {
            n,
            p,
            machine_qubits,
            n_ex,
            ensemble,
            gates,
        } => commands::runtime_model(n, p, machine_qubits, n_ex, ensemble, &gates, seed),
        Command::EmulateClass {
            sizes,
            count,
            p,
            n_ex,
            out,
        } => commands::emulate_class(&sizes, count, p, n_ex, seed, parallel, &out),
    };
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
