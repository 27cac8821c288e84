//! The self-contained subcommands: generate, estimate-optimum, solve,
//! runtime-model, emulate-class.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use qrr_core::classical::BmBudget;
use qrr_core::ensemble::{build_matrices_shared, estimate_optimum as core_estimate, OptimumKind};
use qrr_core::error::{Error, Result};
use qrr_core::exec;
use qrr_core::graph::{
    cut_value, generate_regular, load_instance, write_edge_list, ManifestEntry, ProblemInstance,
};
use qrr_core::lightcone::write_class_cache;
use qrr_core::qrr::{class_correlation, Backend};
use qrr_core::runtime::{
    circuit_duration, classical_runtime_estimate, qcs_duration, quantum_runtime_ensemble,
    ClassicalCost, QcsCoeffs, RuntimeParams,
};
use qrr_core::seeds;

use crate::registry::SolverSpec;

pub fn generate(sizes: &[usize], count: usize, seed: u64, out: &Path) -> Result<()> {
    if count == 0 {
        return Err(Error::invalid("count must be >= 1"));
    }
    let inst_dir = out.join("instances");
    fs::create_dir_all(&inst_dir)?;
    let mut manifest = Vec::new();
    for &n in sizes {
        for k in 0..count {
            let inst_seed = seeds::derive2(seed, n as u64, k as u64);
            let inst = generate_regular(n, inst_seed)?;
            let rel = format!("instances/{}.edges", inst.id);
            let file = fs::File::create(out.join(&rel))?;
            write_edge_list(&inst, std::io::BufWriter::new(file))?;
            manifest.push(ManifestEntry {
                id: inst.id.clone(),
                n,
                seed: inst_seed,
                path: rel,
            });
        }
    }
    let file = fs::File::create(out.join("manifest.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &manifest)
        .map_err(|e| Error::format(e.to_string()))?;
    println!("wrote {} instances under {}", manifest.len(), out.display());
    Ok(())
}

pub fn load_manifest(path: &Path) -> Result<Vec<(ManifestEntry, ProblemInstance)>> {
    let text = fs::read_to_string(path)?;
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(&text).map_err(|e| Error::format(format!("manifest: {e}")))?;
    let base = path.parent().unwrap_or(Path::new("."));
    entries
        .into_iter()
        .map(|e| {
            let inst = load_instance(&base.join(&e.path), e.seed, e.id.clone())?;
            if inst.n() != e.n {
                return Err(Error::format(format!(
                    "manifest says n = {} for {}, file has {}",
                    e.n,
                    e.id,
                    inst.n()
                )));
            }
            Ok((e, inst))
        })
        .collect()
}

pub fn estimate_optimum(
    manifest: &Path,
    restarts: usize,
    bm_budget: BmBudget,
    sa_sweeps: usize,
    seed: u64,
    parallel: bool,
    out: &Path,
) -> Result<()> {
    let instances = load_manifest(manifest)?;
    let rows: Vec<Result<String>> =
        exec::map_indexed(parallel, &instances, |idx, (entry, inst)| {
            let est = core_estimate(
                inst,
                restarts,
                bm_budget,
                sa_sweeps,
                seeds::derive(seed, idx as u64),
                false,
            )?;
            let method = match est.kind {
                OptimumKind::Exact => "exact",
                OptimumKind::Heuristic => "best-known",
            };
            Ok(format!(
                "{},{},{},{},{},{},{}",
                entry.id, entry.n, est.best_cut, method, est.peaked, est.hits_at_best, est.runs
            ))
        });
    let mut file = std::io::BufWriter::new(fs::File::create(out)?);
    writeln!(
        file,
        "instance_id,n,best_cut,method,peaked,hits_at_best,runs"
    )?;
    for row in rows {
        writeln!(file, "{}", row?)?;
    }
    println!("wrote best-known table to {}", out.display());
    Ok(())
}

/// Best-known cuts keyed by instance id: `(cut, exact?)`.
pub fn load_best_known(path: &Path) -> Result<HashMap<String, (u64, bool)>> {
    let text = fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 4 {
            return Err(Error::format(format!(
                "best-known row {i} has {} columns",
                cols.len()
            )));
        }
        let cut: u64 = cols[2]
            .parse()
            .map_err(|_| Error::format(format!("bad best_cut in row {i}")))?;
        map.insert(cols[0].to_string(), (cut, cols[3] == "exact"));
    }
    Ok(map)
}

pub fn solve(
    manifest: &Path,
    spec: &SolverSpec,
    runs: u64,
    seed: u64,
    parallel: bool,
    best_known: Option<&Path>,
    out: &Path,
) -> Result<()> {
    if runs == 0 {
        return Err(Error::invalid("runs must be >= 1"));
    }
    let instances = load_manifest(manifest)?;
    let best = best_known.map(load_best_known).transpose()?;
    let work: Vec<(usize, u64)> = (0..instances.len())
        .flat_map(|i| (0..runs).map(move |r| (i, seed + r)))
        .collect();
    let lines: Vec<Result<String>> = exec::map_indexed(parallel, &work, |_, &(idx, run_seed)| {
        let (entry, inst) = &instances[idx];
        let mut report = spec.run(inst, run_seed)?;
        // Re-verify the reported cut against the returned assignment before
        // anything is written.
        if !report.assignment.is_empty() {
            let check = cut_value(inst, &report.assignment)?;
            if check != report.cut {
                return Err(Error::numerical(format!(
                    "cut verification failed for {} (reported {}, recomputed {check})",
                    entry.id, report.cut
                )));
            }
        }
        if let Some(map) = &best {
            if let Some(&(best_cut, _)) = map.get(&entry.id) {
                report.alpha = Some(report.cut as f64 / best_cut as f64);
            }
        }
        if let serde_json::Value::Object(obj) = &mut report.params {
            obj.insert(
                "instance".into(),
                serde_json::Value::String(entry.id.clone()),
            );
        }
        serde_json::to_string(&report).map_err(|e| Error::format(e.to_string()))
    });
    let mut file = std::io::BufWriter::new(fs::File::create(out)?);
    for line in lines {
        writeln!(file, "{}", line?)?;
    }
    println!(
        "wrote {} {} reports to {}",
        instances.len() as u64 * runs,
        spec.name(),
        out.display()
    );
    Ok(())
}

pub fn runtime_model(
    n: usize,
    p: usize,
    machine_qubits: usize,
    n_ex: u64,
    ensemble: usize,
    gates: &str,
    seed: u64,
) -> Result<()> {
    let params = match gates {
        "current" => RuntimeParams::current_hardware(machine_qubits, n_ex),
        "target" => RuntimeParams::target_hardware(machine_qubits, n_ex),
        other => {
            return Err(Error::invalid(format!(
                "gates must be current or target, got '{other}'"
            )))
        }
    };
    let instances: Vec<ProblemInstance> = (0..ensemble.max(1))
        .map(|k| generate_regular(n, seeds::derive2(seed, n as u64, k as u64)))
        .collect::<Result<_>>()?;
    let (formula, packed) = quantum_runtime_ensemble(&instances, p, &params)?;
    let pairs: f64 = instances
        .iter()
        .map(|i| qrr_core::lightcone::correlated_pairs(i, p).len() as f64)
        .sum::<f64>()
        / instances.len() as f64;
    let corr = classical_runtime_estimate(ClassicalCost::CorrelationBuild {
        entries: pairs.round() as u64,
        shots: n_ex,
    });
    println!("metric,value");
    println!(
        "reference_circuit_duration_7q_p1_1shot_ns,{:.3}",
        circuit_duration(7, 1, 1, &params)? * 1e9
    );
    println!(
        "qcs_duration_n10_p1_nex1000_s,{:.6}",
        qcs_duration(10, 1, 1000, &QcsCoeffs::fitted())
    );
    println!("mean_correlated_pairs,{pairs:.3}");
    println!("t_q_formula_ms,{:.4}", formula * 1e3);
    println!("t_q_packed_ms,{:.4}", packed * 1e3);
    println!("correlation_build_model_ms,{:.4}", corr * 1e3);
    println!(
        "sa_sweep_model_ms_per_sweep,{:.6}",
        classical_runtime_estimate(ClassicalCost::Sa { n, sweeps: 1 }) * 1e3
    );
    Ok(())
}

pub fn emulate_class(
    sizes: &[usize],
    count: usize,
    p: usize,
    n_ex: usize,
    seed: u64,
    parallel: bool,
    out: &Path,
) -> Result<()> {
    fs::create_dir_all(out)?;
    let mut instances = Vec::new();
    for &n in sizes {
        for k in 0..count {
            instances.push(generate_regular(
                n,
                seeds::derive2(seed, n as u64, k as u64),
            )?);
        }
    }
    let shared = build_matrices_shared(&instances, p, &Backend::Exact, parallel)?;
    let sampled: Vec<Result<f64>> = exec::map_indexed(parallel, &shared.classes, |idx, class| {
        class_correlation(
            class,
            p,
            &Backend::Sampled {
                n_ex,
                seed: seeds::derive(seed, 0xc1a5),
                noise: None,
            },
            idx,
        )
    });
    let cache = fs::File::create(out.join("classes.jsonl"))?;
    write_class_cache(&shared.classes, std::io::BufWriter::new(cache))?;
    let mut csv = std::io::BufWriter::new(fs::File::create(out.join("correlations.csv"))?);
    writeln!(
        csv,
        "class_hash,anchor_a,anchor_b,value_exact,value_sampled,n_ex,seed"
    )?;
    for ((class, &exact), sampled) in shared.classes.iter().zip(&shared.values).zip(sampled) {
        writeln!(
            csv,
            "{},{},{},{:.12},{:.12},{},{}",
            class.key,
            class.canonical.anchor_a,
            class.canonical.anchor_b,
            exact,
            sampled?,
            n_ex,
            seed
        )?;
    }
    println!(
        "emulated {} classes from {} instances into {}",
        shared.classes.len(),
        instances.len(),
        out.display()
    );
    Ok(())
}
