//! Correlation matrices, eigenvector sign rounding, the guided greedy
//! enhancement, and the relax-and-round solver family (QRR, QRR*, classical
//! RR, eigenvalue Goemans-Williamson).
//!
//! The correlation matrix holds `Z_ij = -<Z_i Z_j>` for exactly the pairs
//! whose light cones intersect; its diagonal is identically zero. Rounding
//! takes `k = 8` eigenvectors split between the two spectrum ends -- the
//! ground-state limit lives at the smallest algebraic eigenvalue while the
//! single-layer matrix tracks the adjacency spectrum, so covering both ends
//! subsumes either reading at negligible cost.

use rand::Rng;
use serde_json::json;

use crate::eigen::{dense_from_entries, extremal_eigenpairs, RelaxedVector};
use crate::emulator::{
    self, fixed_angles, pair_marginal, pair_response_rows, qaoa_state, sample_bitstrings,
    zz_of_marginal, ConfusionModel,
};
use crate::error::{Error, Result};
use crate::graph::{cut_value, Assignment, ProblemInstance};
use crate::lightcone::{instance_classes, IsoClass};
use crate::report::{SolverReport, StageTimer};
use crate::seeds;

/// Eigenvectors rounded per solve: half from each spectrum end.
pub const K_EXTREMAL: usize = 8;
/// Default greedy visit budget in units of n.
pub const DEFAULT_GREEDY_FACTOR: f64 = 10.0;
/// Scores below this magnitude are clamped before inverting into visit
/// weights.
pub const SCORE_FLOOR: f64 = 1e-12;

/// Sparse symmetric matrix of signed two-body expectations, zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    n: usize,
    /// Sorted strict upper triangle `(i, j, value)`, `i < j`.
    entries: Vec<(u32, u32, f64)>,
}

impl CorrelationMatrix {
    pub fn new(n: usize, mut entries: Vec<(u32, u32, f64)>) -> Result<Self> {
        for e in &mut entries {
            if e.0 > e.1 {
                *e = (e.1, e.0, e.2);
            }
            if e.0 == e.1 {
                return Err(Error::invalid(
                    "correlation matrix diagonal is implicitly zero",
                ));
            }
            if e.1 as usize >= n {
                return Err(Error::invalid(format!(
                    "entry ({}, {}) out of range",
                    e.0, e.1
                )));
            }
            if e.2.abs() > 1.0 + 1e-9 {
                return Err(Error::invalid(format!("|entry| {} exceeds 1", e.2)));
            }
        }
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        Ok(CorrelationMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    pub fn get(&self, i: u32, j: u32) -> f64 {
        if i == j {
            return 0.0;
        }
        let key = (i.min(j), i.max(j));
        match self.entries.binary_search_by_key(&key, |&(a, b, _)| (a, b)) {
            Ok(idx) => self.entries[idx].2,
            Err(_) => 0.0,
        }
    }

    /// Entrywise rescale by the circuit fidelity.
    pub fn apply_depolarizing(&self, fidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::invalid(format!(
                "fidelity {fidelity} outside [0, 1]"
            )));
        }
        let entries = self
            .entries
            .iter()
            .map(|&(i, j, v)| (i, j, v * fidelity))
            .collect();
        Ok(CorrelationMatrix { n: self.n, entries })
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        dense_from_entries(self.n, &self.entries)
    }

    /// Infinite-depth limit: off-diagonal of `I - z (x) z`. Rounding its
    /// bottom eigenvector recovers `z` exactly.
    pub fn p_infinity(z: &Assignment) -> Self {
        let n = z.len();
        let s = z.spins();
        let mut entries = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                entries.push((i, j, -(s[i as usize] * s[j as usize]) as f64));
            }
        }
        CorrelationMatrix { n, entries }
    }

    /// Adjacency matrix of the instance in the same sparse container (unit
    /// entries); the classical relax-and-round input.
    pub fn from_adjacency(inst: &ProblemInstance) -> Self {
        let entries = inst.edges().iter().map(|&(u, v)| (u, v, 1.0)).collect();
        CorrelationMatrix {
            n: inst.n(),
            entries,
        }
    }
}

/// Optional readout-noise layer for the sampled backend.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// Per-qubit confusion row applied to every subcircuit qubit.
    pub readout: [[f64; 2]; 2],
    /// Unfold each anchored pair marginal before estimating.
    pub mitigate: bool,
    pub ibu_iters: usize,
}

/// How correlation entries are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    /// Statevector expectations on each canonical subcircuit.
    Exact,
    /// Closed-form single-layer correlations; requires `p = 1`.
    AnalyticP1,
    /// Statevector runs followed by seeded bitstring sampling.
    Sampled {
        n_ex: usize,
        seed: u64,
        noise: Option<NoiseSpec>,
    },
}

impl Backend {
    pub fn label(&self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::AnalyticP1 => "analytic_p1",
            Backend::Sampled { .. } => "sampled",
        }
    }
}

/// Evaluate one class's anchored correlation with the requested backend.
pub fn class_correlation(
    class: &IsoClass,
    p: usize,
    backend: &Backend,
    class_idx: usize,
) -> Result<f64> {
    let task = &class.canonical;
    let (a, b) = (task.anchor_a as usize, task.anchor_b as usize);
    match backend {
        Backend::AnalyticP1 => {
            if p != 1 {
                return Err(Error::invalid("analytic backend requires p = 1"));
            }
            let angles = fixed_angles(1)?;
            let edges32: Vec<(u32, u32)> = task
                .sub_edges
                .iter()
                .map(|&(u, v)| (u as u32, v as u32))
                .collect();
            Ok(emulator::zz_analytic_p1(
                task.size,
                &edges32,
                a as u32,
                b as u32,
                angles.gammas[0],
                angles.betas[0],
            ))
        }
        Backend::Exact => {
            let angles = fixed_angles(p)?;
            let state = qaoa_state(&task.sub_edges, task.size, &angles)?;
            Ok(emulator::zz_expectation_exact(&state, a, b))
        }
        Backend::Sampled { n_ex, seed, noise } => {
            let angles = fixed_angles(p)?;
            let state = qaoa_state(&task.sub_edges, task.size, &angles)?;
            let samples =
                sample_bitstrings(&state, *n_ex, seeds::derive2(*seed, class_idx as u64, 0))?;
            match noise {
                None => emulator::estimate_zz(&samples, a, b),
                Some(spec) => {
                    let model = ConfusionModel::uniform(task.size, spec.readout)?;
                    let noisy = emulator::apply_readout_noise(
                        &samples,
                        &model,
                        seeds::derive2(*seed, class_idx as u64, 1),
                    )?;
                    if spec.mitigate {
                        let observed = pair_marginal(&noisy, a, b)?;
                        let response = pair_response_rows(&model, a, b);
                        let mitigated = emulator::ibu_mitigate(
                            &observed,
                            &response,
                            spec.ibu_iters.max(1),
                            None,
                        )?;
                        let arr: [f64; 4] =
                            [mitigated[0], mitigated[1], mitigated[2], mitigated[3]];
                        Ok(zz_of_marginal(&arr))
                    } else {
                        emulator::estimate_zz(&noisy, a, b)
                    }
                }
            }
        }
    }
}

/// Assemble the correlation matrix of one instance. Isomorphic subcircuits
/// are evaluated once; every member pair reads the class value.
pub fn build_correlation_matrix(
    inst: &ProblemInstance,
    p: usize,
    backend: &Backend,
) -> Result<CorrelationMatrix> {
    if let Backend::AnalyticP1 = backend {
        if p != 1 {
            return Err(Error::invalid("analytic backend requires p = 1"));
        }
        // The closed form reads local degree counts straight off the host
        // graph; no subcircuit extraction needed.
        let angles = fixed_angles(1)?;
        let (g, bta) = (angles.gammas[0], angles.betas[0]);
        let mut entries = Vec::new();
        for (i, j) in crate::lightcone::correlated_pairs(inst, 1) {
            let adjacent = inst.has_edge(i, j);
            let common = inst.common_neighbors(i, j);
            let zz = emulator::zz_p1_from_counts(
                adjacent,
                3 - adjacent as usize,
                3 - adjacent as usize,
                common,
                g,
                bta,
            );
            entries.push((i, j, -zz));
        }
        return CorrelationMatrix::new(inst.n(), entries);
    }
    let classes = instance_classes(inst, p)?;
    let mut entries = Vec::new();
    for (idx, class) in classes.iter().enumerate() {
        let value = class_correlation(class, p, backend, idx)?;
        for member in &class.members {
            let (i, j) = (member.origin.1, member.origin.2);
            entries.push((i, j, -value));
        }
    }
    CorrelationMatrix::new(inst.n(), entries)
}

/// Round every vector entrywise by sign (zeros to +1) and keep the best cut;
/// ties keep the earliest vector. The winning assignment is canonicalized to
/// a +1 first spin (a global flip leaves the cut unchanged) so reruns and
/// rescaled matrices reproduce identical output.
pub fn sign_round(
    inst: &ProblemInstance,
    vectors: &[RelaxedVector],
) -> Result<(Assignment, RelaxedVector)> {
    if vectors.is_empty() {
        return Err(Error::invalid("sign_round needs at least one vector"));
    }
    let mut best: Option<(u64, Assignment, usize)> = None;
    for (idx, v) in vectors.iter().enumerate() {
        if v.coords.len() != inst.n() {
            return Err(Error::invalid("vector length does not match instance"));
        }
        let z = Assignment(
            v.coords
                .iter()
                .map(|&x| if x >= 0.0 { 1 } else { -1 })
                .collect(),
        );
        let cut = cut_value(inst, &z)?;
        if best.as_ref().is_none_or(|(c, _, _)| cut > *c) {
            best = Some((cut, z, idx));
        }
    }
    let (_, mut z, idx) = best.unwrap();
    z.canonicalize();
    Ok((z, vectors[idx].clone()))
}

/// Guided opportunistic sign flips: visit variables with probability
/// proportional to the inverse magnitude of their relaxed coordinate and
/// keep a flip only when the cut strictly improves.
pub fn greedy_enhance(
    inst: &ProblemInstance,
    z: &Assignment,
    scores: &[f64],
    f: f64,
    seed: u64,
) -> Result<Assignment> {
    let n = inst.n();
    if scores.len() != n || z.len() != n {
        return Err(Error::invalid("scores/assignment length mismatch"));
    }
    if f <= 0.0 {
        return Err(Error::invalid("visit factor must be positive"));
    }
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &s in scores {
        acc += 1.0 / s.abs().max(SCORE_FLOOR);
        cumulative.push(acc);
    }
    let total = acc;
    let mut spins = z.spins().to_vec();
    let visits = (f * n as f64).ceil() as usize;
    let mut rng = seeds::rng(seed);
    for _ in 0..visits {
        let u: f64 = rng.gen::<f64>() * total;
        let i = cumulative.partition_point(|&c| c <= u).min(n - 1);
        let mut delta = 0i32;
        for &j in &inst.neighbors(i as u32) {
            if spins[i] == spins[j as usize] {
                delta += 1;
            } else {
                delta -= 1;
            }
        }
        if delta > 0 {
            spins[i] = -spins[i];
        }
    }
    Ok(Assignment(spins))
}

fn relax_round(
    inst: &ProblemInstance,
    matrix: &CorrelationMatrix,
    timer: &mut StageTimer,
) -> Result<(Assignment, RelaxedVector)> {
    let k = K_EXTREMAL.min(inst.n());
    let vectors = timer.stage("eigen", || {
        extremal_eigenpairs(matrix.n(), matrix.entries(), k)
    })?;
    timer.stage("round", || sign_round(inst, &vectors))
}

/// Relax-and-round on a prebuilt correlation matrix; greedy enhancement when
/// `greedy` carries `(f, seed)`. Used directly by the infinite-depth test
/// hook and the noise studies.
pub fn solve_with_matrix(
    inst: &ProblemInstance,
    matrix: &CorrelationMatrix,
    greedy: Option<(f64, u64)>,
    solver: &str,
    params: serde_json::Value,
    seed: u64,
) -> Result<SolverReport> {
    let mut timer = StageTimer::start();
    let (rounded, winner) = relax_round(inst, matrix, &mut timer)?;
    let assignment = match greedy {
        Some((f, gseed)) => timer.stage("greedy", || {
            greedy_enhance(inst, &rounded, &winner.coords, f, gseed)
        })?,
        None => rounded,
    };
    let cut = cut_value(inst, &assignment)?;
    Ok(SolverReport {
        solver: solver.to_string(),
        params,
        seed,
        cut,
        alpha: None,
        time_ms: timer.total_ms(),
        stage_times: timer.into_stages(),
        assignment,
    })
}

/// Quantum relax-and-round without the greedy step.
pub fn qrr_solve(
    inst: &ProblemInstance,
    p: usize,
    backend: &Backend,
    seed: u64,
) -> Result<SolverReport> {
    let mut timer = StageTimer::start();
    let matrix = timer.stage("build", || build_correlation_matrix(inst, p, backend))?;
    let (assignment, _) = relax_round(inst, &matrix, &mut timer)?;
    let cut = cut_value(inst, &assignment)?;
    Ok(SolverReport {
        solver: "qrr".to_string(),
        params: json!({"p": p, "backend": backend.label(), "k": K_EXTREMAL}),
        seed,
        cut,
        alpha: None,
        time_ms: timer.total_ms(),
        stage_times: timer.into_stages(),
        assignment,
    })
}

/// Greedy-enhanced quantum relax-and-round: build, round, then guided flips
/// weighted by the winning eigenvector's entry magnitudes.
pub fn qrr_star_solve(
    inst: &ProblemInstance,
    p: usize,
    backend: &Backend,
    f: f64,
    seed: u64,
) -> Result<SolverReport> {
    let mut timer = StageTimer::start();
    let matrix = timer.stage("build", || build_correlation_matrix(inst, p, backend))?;
    let (rounded, winner) = relax_round(inst, &matrix, &mut timer)?;
    let assignment = timer.stage("greedy", || {
        greedy_enhance(inst, &rounded, &winner.coords, f, seeds::derive(seed, 0x9d))
    })?;
    let cut = cut_value(inst, &assignment)?;
    Ok(SolverReport {
        solver: "qrr_star".to_string(),
        params: json!({"p": p, "backend": backend.label(), "f": f, "k": K_EXTREMAL}),
        seed,
        cut,
        alpha: None,
        time_ms: timer.total_ms(),
        stage_times: timer.into_stages(),
        assignment,
    })
}

/// Classical relax-and-round on the adjacency matrix.
pub fn classical_rr_solve(inst: &ProblemInstance) -> Result<SolverReport> {
    let matrix = CorrelationMatrix::from_adjacency(inst);
    solve_with_matrix(inst, &matrix, None, "rr", json!({"k": K_EXTREMAL}), 0)
}

/// Projected subgradient descent on the correcting vector `u`:
/// `u <- u - eta (v o v - 1/n)` with `v` the current top eigenvector of
/// `-M + diag(u)`, re-projected onto the trace-zero hyperplane. The returned
/// bound is `n (3 + lambda_max) / 4`, the eigenvalue upper bound on the
/// maximum cut for degree-3 hosts.
pub(crate) fn gw_correcting_vector(
    n: usize,
    matrix: &CorrelationMatrix,
    iters: usize,
    step: f64,
    degree: f64,
) -> Result<(Vec<f64>, f64)> {
    let base: Vec<(u32, u32, f64)> = matrix
        .entries()
        .iter()
        .map(|&(i, j, v)| (i, j, -v))
        .collect();
    let mut u = vec![0.0; n];
    let mut best_u = u.clone();
    let mut best_bound = f64::INFINITY;
    for it in 0..=iters {
        let mut entries = base.clone();
        for (i, &ui) in u.iter().enumerate() {
            entries.push((i as u32, i as u32, ui));
        }
        let ends = extremal_eigenpairs(n, &entries, 2)?;
        let top = ends
            .iter()
            .max_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue))
            .unwrap();
        let bound = n as f64 * (degree + top.eigenvalue) / 4.0;
        if bound < best_bound {
            best_bound = bound;
            best_u = u.clone();
        }
        if it == iters {
            break;
        }
        let eta = step / ((it + 1) as f64).sqrt();
        let v = &top.coords;
        let mean = 1.0 / n as f64;
        for (ui, vi) in u.iter_mut().zip(v) {
            *ui -= eta * (vi * vi - mean);
        }
        let shift = u.iter().sum::<f64>() / n as f64;
        for ui in &mut u {
            *ui -= shift;
        }
    }
    Ok((best_u, best_bound))
}

/// Eigenvalue Goemans-Williamson with a correcting vector, on either the
/// adjacency matrix (classical) or a correlation matrix (quantum flavor).
pub fn gw_solve(
    matrix: &CorrelationMatrix,
    inst: &ProblemInstance,
    iters: usize,
    step: f64,
) -> Result<SolverReport> {
    let n = inst.n();
    if matrix.n() != n {
        return Err(Error::invalid("matrix dimension does not match instance"));
    }
    let mut timer = StageTimer::start();
    let (u, bound) = timer.stage("subgradient", || {
        gw_correcting_vector(n, matrix, iters, step, 3.0)
    })?;
    let mut entries: Vec<(u32, u32, f64)> = matrix
        .entries()
        .iter()
        .map(|&(i, j, v)| (i, j, -v))
        .collect();
    for (i, &ui) in u.iter().enumerate() {
        entries.push((i as u32, i as u32, ui));
    }
    let k = K_EXTREMAL.min(n);
    let vectors = timer.stage("eigen", || extremal_eigenpairs(n, &entries, k))?;
    let (assignment, _) = timer.stage("round", || sign_round(inst, &vectors))?;
    let cut = cut_value(inst, &assignment)?;
    Ok(SolverReport {
        solver: "gw".to_string(),
        params: json!({"iters": iters, "step": step, "bound": bound, "k": K_EXTREMAL}),
        seed: 0,
        cut,
        alpha: None,
        time_ms: timer.total_ms(),
        stage_times: timer.into_stages(),
        assignment,
    })
}

/// Spectral norm of the commutator between the instance adjacency matrix and
/// a correlation matrix.
pub fn adjacency_commutator_norm(inst: &ProblemInstance, matrix: &CorrelationMatrix) -> f64 {
    let w = CorrelationMatrix::from_adjacency(inst).to_dense();
    crate::eigen::commutator_norm(&w, &matrix.to_dense())
}

/// Expected cut of the underlying sampled circuit, read off the correlation
/// matrix: `sum over edges of (1 + Z_uv) / 2` since `Z_uv = -<Z_u Z_v>`.
pub fn expected_cut_from_matrix(inst: &ProblemInstance, matrix: &CorrelationMatrix) -> f64 {
    inst.edges()
        .iter()
        .map(|&(u, v)| 0.5 * (1.0 + matrix.get(u, v)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{brute_force_maxcut, generate_regular, k4};
    use approx::assert_abs_diff_eq;

    #[test]
    fn p_infinity_hook_recovers_optimum() {
        for n in [10usize, 14, 18] {
            let inst = generate_regular(n, n as u64).unwrap();
            let (best, zopt) = brute_force_maxcut(&inst).unwrap();
            let matrix = CorrelationMatrix::p_infinity(&zopt);
            let report =
                solve_with_matrix(&inst, &matrix, None, "qrr", json!({"p": "inf"}), 0).unwrap();
            assert_eq!(report.cut, best);
            assert_eq!(report.assignment, zopt);
        }
    }

    #[test]
    fn light_cone_build_matches_full_graph_statevector() {
        // The exact backend evaluates each pair on its subcircuit; the same
        // expectation from a statevector of the whole graph must agree to
        // numerical precision at every depth.
        for p in [1usize, 2] {
            let inst = generate_regular(16, 21).unwrap();
            let matrix = build_correlation_matrix(&inst, p, &Backend::Exact).unwrap();
            let edges16: Vec<(u16, u16)> = inst
                .edges()
                .iter()
                .map(|&(u, v)| (u as u16, v as u16))
                .collect();
            let angles = fixed_angles(p).unwrap();
            let state = qaoa_state(&edges16, 16, &angles).unwrap();
            for &(i, j, v) in matrix.entries() {
                let full = emulator::zz_expectation_exact(&state, i as usize, j as usize);
                assert_abs_diff_eq!(-v, full, epsilon = 1e-11);
            }
            // Pairs outside the light-cone support really are zero.
            for i in 0..16u32 {
                for j in (i + 1)..16 {
                    if matrix.get(i, j) == 0.0 {
                        let full = emulator::zz_expectation_exact(&state, i as usize, j as usize);
                        assert_abs_diff_eq!(full, 0.0, epsilon = 1e-11);
                    }
                }
            }
        }
    }

    #[test]
    fn analytic_and_exact_backends_agree() {
        for seed in [1u64, 2] {
            let inst = generate_regular(32, seed).unwrap();
            let exact = build_correlation_matrix(&inst, 1, &Backend::Exact).unwrap();
            let analytic = build_correlation_matrix(&inst, 1, &Backend::AnalyticP1).unwrap();
            assert_eq!(exact.entries().len(), analytic.entries().len());
            for (a, b) in exact.entries().iter().zip(analytic.entries()) {
                assert_eq!((a.0, a.1), (b.0, b.1));
                assert_abs_diff_eq!(a.2, b.2, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn sampled_backend_tracks_exact_within_shot_noise() {
        let inst = generate_regular(32, 5).unwrap();
        let exact = build_correlation_matrix(&inst, 1, &Backend::Exact).unwrap();
        let sampled = build_correlation_matrix(
            &inst,
            1,
            &Backend::Sampled {
                n_ex: 10_000,
                seed: 11,
                noise: None,
            },
        )
        .unwrap();
        let mut max_err = 0.0f64;
        for (a, b) in exact.entries().iter().zip(sampled.entries()) {
            max_err = max_err.max((a.2 - b.2).abs());
        }
        assert!(max_err < 0.03, "max entry deviation {max_err}");
    }

    #[test]
    fn sign_round_examples() {
        let inst = k4();
        let (_, zopt) = brute_force_maxcut(&inst).unwrap();
        // Positive rescaling leaves the rounded assignment unchanged.
        let scaled = RelaxedVector {
            coords: zopt.spins().iter().map(|&s| 0.3 * s as f64).collect(),
            eigenvalue: 0.0,
        };
        let (z, _) = sign_round(&inst, &[scaled]).unwrap();
        assert_eq!(cut_value(&inst, &z).unwrap(), 4);
        // All-positive vector rounds to the empty cut.
        let flat = RelaxedVector {
            coords: vec![0.5; 4],
            eigenvalue: 0.0,
        };
        let (z, _) = sign_round(&inst, &[flat]).unwrap();
        assert_eq!(cut_value(&inst, &z).unwrap(), 0);
        assert!(sign_round(&inst, &[]).is_err());
    }

    #[test]
    fn classical_rr_solves_k4() {
        let report = classical_rr_solve(&k4()).unwrap();
        assert_eq!(report.cut, 4);
    }

    #[test]
    fn greedy_is_monotone_and_fixes_single_flip() {
        let inst = generate_regular(16, 3).unwrap();
        let (best, zopt) = brute_force_maxcut(&inst).unwrap();
        // Already optimal: nothing strictly improves.
        let scores = vec![1.0; 16];
        let out = greedy_enhance(&inst, &zopt, &scores, 10.0, 1).unwrap();
        assert_eq!(cut_value(&inst, &out).unwrap(), best);
        // One wrong spin with a near-zero score gets visited and corrected.
        let mut broken = zopt.clone();
        broken.0[5] = -broken.0[5];
        let mut scores = vec![1.0; 16];
        scores[5] = 1e-9;
        let out = greedy_enhance(&inst, &broken, &scores, 10.0, 2).unwrap();
        assert_eq!(cut_value(&inst, &out).unwrap(), best);
    }

    #[test]
    fn greedy_never_decreases_cut() {
        use rand::Rng;
        let inst = generate_regular(24, 9).unwrap();
        let mut rng = seeds::rng(4);
        for trial in 0..20 {
            let z = Assignment(
                (0..24)
                    .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
                    .collect(),
            );
            let scores: Vec<f64> = (0..24).map(|_| rng.gen::<f64>() - 0.5).collect();
            let before = cut_value(&inst, &z).unwrap();
            let out = greedy_enhance(&inst, &z, &scores, 3.0, trial).unwrap();
            assert!(cut_value(&inst, &out).unwrap() >= before);
        }
    }

    #[test]
    fn depolarizing_leaves_qrr_output_unchanged() {
        let inst = generate_regular(32, 8).unwrap();
        let matrix = build_correlation_matrix(&inst, 1, &Backend::Exact).unwrap();
        let base = solve_with_matrix(&inst, &matrix, None, "qrr", json!({}), 0).unwrap();
        for fidelity in [0.1, 0.5, 0.9] {
            let scaled = matrix.apply_depolarizing(fidelity).unwrap();
            let out = solve_with_matrix(&inst, &scaled, None, "qrr", json!({}), 0).unwrap();
            assert_eq!(out.assignment, base.assignment, "fidelity {fidelity}");
        }
        assert!(matrix.apply_depolarizing(1.2).is_err());
    }

    #[test]
    fn gw_with_zero_iterations_matches_classical_rr() {
        let inst = generate_regular(32, 6).unwrap();
        let rr = classical_rr_solve(&inst).unwrap();
        let gw = gw_solve(&CorrelationMatrix::from_adjacency(&inst), &inst, 0, 1.0).unwrap();
        assert_eq!(gw.cut, rr.cut);
    }

    #[test]
    fn gw_bound_dominates_max_cut_on_small_instances() {
        for seed in 0..5 {
            let inst = generate_regular(12, seed).unwrap();
            let (best, _) = brute_force_maxcut(&inst).unwrap();
            let m = CorrelationMatrix::from_adjacency(&inst);
            let (_, bound) = gw_correcting_vector(12, &m, 40, 1.0, 3.0).unwrap();
            assert!(bound + 1e-9 >= best as f64, "bound {bound} < best {best}");
        }
    }

    #[test]
    fn qrr_matches_classical_rr_often_at_p1() {
        let mut equal = 0;
        for seed in 0..12 {
            let inst = generate_regular(32, 100 + seed).unwrap();
            let q = qrr_solve(&inst, 1, &Backend::AnalyticP1, 0).unwrap();
            let c = classical_rr_solve(&inst).unwrap();
            if q.cut == c.cut {
                equal += 1;
            }
        }
        assert!(equal >= 10, "only {equal}/12 instances agreed");
    }

    #[test]
    fn depth_three_exceeds_statevector_cap() {
        // Depth-3 light cones reach up to 43 qubits; the exact backend must
        // surface the capacity ceiling instead of allocating.
        let inst = generate_regular(64, 2).unwrap();
        assert!(matches!(
            build_correlation_matrix(&inst, 3, &Backend::Exact),
            Err(crate::error::Error::Capacity(_))
        ));
    }

    #[test]
    fn correlation_matrix_validation() {
        assert!(CorrelationMatrix::new(4, vec![(0, 0, 0.5)]).is_err());
        assert!(CorrelationMatrix::new(4, vec![(0, 5, 0.5)]).is_err());
        assert!(CorrelationMatrix::new(4, vec![(0, 1, 1.5)]).is_err());
        let m = CorrelationMatrix::new(4, vec![(1, 0, 0.25)]).unwrap();
        assert_eq!(m.get(0, 1), 0.25);
        assert_eq!(m.get(1, 0), 0.25);
        assert_eq!(m.get(2, 3), 0.0);
        assert_eq!(m.get(1, 1), 0.0);
    }
}
