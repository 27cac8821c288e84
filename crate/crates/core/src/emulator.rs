//! Exact statevector QAOA emulation, bitstring sampling, the closed-form
//! single-layer correlation, noise channels, and readout mitigation.
//!
//! Conventions, fixed throughout the crate:
//!
//! * Basis index bit `q` (value `1 << q`) is qubit `q`; bit 0 means spin +1.
//! * The phase separator applies `exp(+i (gamma/2) Z_u Z_v)` per unit-weight
//!   edge and the mixer applies `exp(-i beta X)` per qubit. This is the sign
//!   convention under which the closed-form single-layer correlation below
//!   reproduces the statevector exactly; the opposite sign flips the sign of
//!   every odd-order term.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;

/// Hard cap on statevector width (memory ceiling for desk machines).
pub const STATEVECTOR_QUBIT_CAP: usize = 24;

/// Layer angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaAngles {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaAngles {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::invalid(
                "angle sequences must be non-empty and equal length",
            ));
        }
        Ok(QaoaAngles { gammas, betas })
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }
}

/// Tabulated fixed angles for unit-weight 3-regular graphs, `p` in 1..=3.
pub fn fixed_angles(p: usize) -> Result<QaoaAngles> {
    let (gammas, betas) = match p {
        1 => (vec![0.615533629], vec![0.3926720292447629]),
        2 => (
            vec![0.4877097328, 0.8979876956],
            vec![0.5550603400685824, 0.29250781484335187],
        ),
        3 => (
            vec![0.422084082, 0.798412754, 0.9370887966],
            vec![0.608757260014991, 0.45927530900125874, 0.23539562255067184],
        ),
        _ => return Err(Error::invalid(format!("no tabulated angles for p = {p}"))),
    };
    QaoaAngles::new(gammas, betas)
}

/// State of an `m`-qubit register.
#[derive(Debug, Clone)]
pub struct StateVector {
    m: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition (the Hadamard layer applied to |0...0>).
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 || m > STATEVECTOR_QUBIT_CAP {
            return Err(Error::capacity(format!(
                "qubit count {m} outside 1..={STATEVECTOR_QUBIT_CAP}"
            )));
        }
        let dim = 1usize << m;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(StateVector {
            m,
            amps: vec![a; dim],
        })
    }

    /// Computational basis state |word>.
    pub fn basis(m: usize, word: u32) -> Result<Self> {
        if m == 0 || m > STATEVECTOR_QUBIT_CAP {
            return Err(Error::capacity(format!(
                "qubit count {m} outside 1..={STATEVECTOR_QUBIT_CAP}"
            )));
        }
        let dim = 1usize << m;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[word as usize & (dim - 1)] = Complex64::new(1.0, 0.0);
        Ok(StateVector { m, amps })
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

#[inline]
fn spin(word: usize, q: usize) -> i32 {
    1 - 2 * ((word >> q) & 1) as i32
}

/// Run the layered circuit on `m` qubits: Hadamard wall, then per layer the
/// edge phases followed by the mixer. Output is normalized.
pub fn qaoa_state(task_edges: &[(u16, u16)], m: usize, angles: &QaoaAngles) -> Result<StateVector> {
    let mut state = StateVector::uniform(m)?;
    for &(u, v) in task_edges {
        if u as usize >= m || v as usize >= m {
            return Err(Error::invalid(format!(
                "edge ({u}, {v}) references qubit >= {m}"
            )));
        }
    }
    let dim = 1usize << m;
    // Ising sum over edges per basis state, shared by all layers.
    let mut sums = vec![0i32; dim];
    for (word, s) in sums.iter_mut().enumerate() {
        let mut acc = 0i32;
        for &(u, v) in task_edges {
            acc += spin(word, u as usize) * spin(word, v as usize);
        }
        *s = acc;
    }
    let e = task_edges.len() as i32;
    for layer in 0..angles.p() {
        let gamma = angles.gammas[layer];
        let beta = angles.betas[layer];
        // Phase separator: exp(+i (gamma/2) * sum).
        let table: Vec<Complex64> = (-e..=e)
            .map(|s| Complex64::from_polar(1.0, 0.5 * gamma * s as f64))
            .collect();
        for (word, amp) in state.amps.iter_mut().enumerate() {
            *amp *= table[(sums[word] + e) as usize];
        }
        // Mixer: exp(-i beta X) on every qubit, visiting each amplitude pair
        // once per qubit via stride-blocked iteration.
        let (c, s) = (beta.cos(), beta.sin());
        let ms = Complex64::new(0.0, -s);
        for q in 0..m {
            let stride = 1usize << q;
            let mut base = 0;
            while base < dim {
                for word in base..base + stride {
                    let lo = state.amps[word];
                    let hi = state.amps[word + stride];
                    state.amps[word] = c * lo + ms * hi;
                    state.amps[word + stride] = ms * lo + c * hi;
                }
                base += stride << 1;
            }
        }
    }
    let norm = state.norm_sqr().sqrt();
    debug_assert!((norm - 1.0).abs() < 1e-10);
    for a in &mut state.amps {
        *a /= norm;
    }
    Ok(state)
}

/// Exact two-body expectation over the computational basis.
pub fn zz_expectation_exact(state: &StateVector, a: usize, b: usize) -> f64 {
    debug_assert!(a != b && a < state.m && b < state.m);
    state
        .amps
        .iter()
        .enumerate()
        .map(|(word, amp)| amp.norm_sqr() * (spin(word, a) * spin(word, b)) as f64)
        .sum()
}

/// Expected cut value: sum over edges of `(1 - <Z_u Z_v>) / 2`.
pub fn cost_expectation(task_edges: &[(u16, u16)], state: &StateVector) -> f64 {
    task_edges
        .iter()
        .map(|&(u, v)| 0.5 * (1.0 - zz_expectation_exact(state, u as usize, v as usize)))
        .sum()
}

/// Measured bitstrings from an `m`-qubit register; bit `q` of each word is
/// qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSamples {
    pub m: usize,
    pub words: Vec<u32>,
}

/// Draw `n_ex` i.i.d. samples from `|psi|^2` by inverse CDF; deterministic
/// given the seed regardless of thread schedule.
pub fn sample_bitstrings(state: &StateVector, n_ex: usize, seed: u64) -> Result<BitSamples> {
    if n_ex == 0 {
        return Err(Error::invalid("shot count must be >= 1"));
    }
    let mut cdf = Vec::with_capacity(state.amps.len());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = seeds::rng(seed);
    let words = (0..n_ex)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * total;
            cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u32
        })
        .collect();
    Ok(BitSamples { m: state.m, words })
}

/// Sample-mean estimator of `<Z_a Z_b>`.
pub fn estimate_zz(samples: &BitSamples, a: usize, b: usize) -> Result<f64> {
    if samples.words.is_empty() {
        return Err(Error::invalid("empty sample set"));
    }
    let sum: i64 = samples
        .words
        .iter()
        .map(|&w| (spin(w as usize, a) * spin(w as usize, b)) as i64)
        .sum();
    Ok(sum as f64 / samples.words.len() as f64)
}

/// Empirical distribution of the `(a, b)` pair marginal; outcome index is
/// `2*bit_a + bit_b`.
pub fn pair_marginal(samples: &BitSamples, a: usize, b: usize) -> Result<[f64; 4]> {
    if samples.words.is_empty() {
        return Err(Error::invalid("empty sample set"));
    }
    let mut counts = [0u64; 4];
    for &w in &samples.words {
        let ba = (w >> a) & 1;
        let bb = (w >> b) & 1;
        counts[(2 * ba + bb) as usize] += 1;
    }
    let n = samples.words.len() as f64;
    Ok([0, 1, 2, 3].map(|i| counts[i] as f64 / n))
}

/// `<Z_a Z_b>` of a 4-outcome pair marginal.
pub fn zz_of_marginal(marginal: &[f64; 4]) -> f64 {
    marginal[0] - marginal[1] - marginal[2] + marginal[3]
}

// ---------------------------------------------------------------------------
// Closed-form single-layer correlations
// ---------------------------------------------------------------------------

/// `<Z_i Z_j>` after one layer at angles `(gamma, beta)` on an arbitrary
/// unit-weight graph, via the product formula. Exact; returns 0 whenever the
/// radius-1 neighborhoods of `i` and `j` are disjoint.
pub fn zz_analytic_p1(
    n: usize,
    edges: &[(u32, u32)],
    i: u32,
    j: u32,
    gamma: f64,
    beta: f64,
) -> f64 {
    debug_assert!(i != j);
    let mut adjacent = false;
    let mut deg_i = 0usize;
    let mut deg_j = 0usize;
    let mut neigh_i = Vec::new();
    let mut neigh_j = Vec::new();
    for &(u, v) in edges {
        debug_assert!((u as usize) < n && (v as usize) < n);
        if (u, v) == (i.min(j), i.max(j)) || (v, u) == (i.min(j), i.max(j)) {
            adjacent = true;
            continue;
        }
        for (a, b) in [(u, v), (v, u)] {
            if a == i && b != j {
                deg_i += 1;
                neigh_i.push(b);
            }
            if a == j && b != i {
                deg_j += 1;
                neigh_j.push(b);
            }
        }
    }
    let common = neigh_i.iter().filter(|k| neigh_j.contains(k)).count();
    zz_p1_from_counts(adjacent, deg_i, deg_j, common, gamma, beta)
}

/// Count form of the product formula: `deg_i`/`deg_j` exclude the partner
/// vertex, `common` is the number of shared neighbors.
pub fn zz_p1_from_counts(
    adjacent: bool,
    deg_i: usize,
    deg_j: usize,
    common: usize,
    gamma: f64,
    beta: f64,
) -> f64 {
    let (s2b, c2b) = ((2.0 * beta).sin(), (2.0 * beta).cos());
    let cg = gamma.cos();
    let exclusive = (deg_i - common) + (deg_j - common);
    let t1 = if adjacent {
        -s2b * c2b * gamma.sin() * (cg.powi(deg_i as i32) + cg.powi(deg_j as i32))
    } else {
        0.0
    };
    let t2 = -(s2b * s2b / 2.0)
        * ((2.0 * gamma).cos().powi(common as i32) * cg.powi(exclusive as i32)
            - cg.powi(exclusive as i32));
    t1 + t2
}

/// Degree-3 closed form, parametrized by adjacency and the shared-neighbor
/// count `0..=3`. Equals [`zz_p1_from_counts`] whenever both endpoints have
/// degree exactly 3 in the host graph.
pub fn zz_analytic_p1_regular(adjacent: bool, common: usize, gamma: f64, beta: f64) -> f64 {
    debug_assert!(common <= 3);
    let w = adjacent as u32 as f64;
    let nc = common as f64;
    let s2b = (2.0 * beta).sin();
    let (sg, cg) = (gamma.sin(), gamma.cos());
    let first = -(4.0 * beta).sin() * w * sg * cg * cg;
    let delta3 = if common == 3 { 1.0 } else { 0.0 };
    let bracket =
        nc * sg.powi(2) * cg.powi(4) + delta3 * sg.powi(6) + w * nc * sg.powi(4) * cg.powi(2);
    first + s2b * s2b * bracket
}

// ---------------------------------------------------------------------------
// Noise channels and mitigation
// ---------------------------------------------------------------------------

/// Depolarizing channel on an expectation value: rescale by the fidelity.
pub fn apply_depolarizing(value: f64, fidelity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::invalid(format!(
            "fidelity {fidelity} outside [0, 1]"
        )));
    }
    Ok(value * fidelity)
}

/// Per-qubit readout confusion: `rows[q][t][o]` is the probability of
/// observing bit `o` given true bit `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionModel {
    rows: Vec<[[f64; 2]; 2]>,
}

impl ConfusionModel {
    pub fn per_qubit(rows: Vec<[[f64; 2]; 2]>) -> Result<Self> {
        for (q, r) in rows.iter().enumerate() {
            for (t, row) in r.iter().enumerate() {
                let sum = row[0] + row[1];
                if (sum - 1.0).abs() > 1e-9 || row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return Err(Error::invalid(format!(
                        "qubit {q} confusion row {t} is not a distribution"
                    )));
                }
            }
        }
        Ok(ConfusionModel { rows })
    }

    /// The same 2x2 confusion on every qubit.
    pub fn uniform(m: usize, row: [[f64; 2]; 2]) -> Result<Self> {
        Self::per_qubit(vec![row; m])
    }

    pub fn identity(m: usize) -> Self {
        ConfusionModel {
            rows: vec![[[1.0, 0.0], [0.0, 1.0]]; m],
        }
    }

    pub fn qubits(&self) -> usize {
        self.rows.len()
    }

    pub fn qubit(&self, q: usize) -> [[f64; 2]; 2] {
        self.rows[q]
    }

    /// Response matrix of the `(a, b)` pair marginal: `r[obs][true]` with the
    /// outcome index convention of [`pair_marginal`].
    pub fn pair_response(&self, a: usize, b: usize) -> [[f64; 4]; 4] {
        let ra = self.rows[a];
        let rb = self.rows[b];
        let mut r = [[0.0; 4]; 4];
        for ta in 0..2 {
            for tb in 0..2 {
                for oa in 0..2 {
                    for ob in 0..2 {
                        r[2 * oa + ob][2 * ta + tb] = ra[ta][oa] * rb[tb][ob];
                    }
                }
            }
        }
        r
    }
}

/// Flip each measured bit independently per its confusion row.
pub fn apply_readout_noise(
    samples: &BitSamples,
    model: &ConfusionModel,
    seed: u64,
) -> Result<BitSamples> {
    if model.qubits() < samples.m {
        return Err(Error::invalid(format!(
            "confusion model covers {} qubits, samples have {}",
            model.qubits(),
            samples.m
        )));
    }
    let mut rng = seeds::rng(seed);
    let words = samples
        .words
        .iter()
        .map(|&w| {
            let mut out = 0u32;
            for q in 0..samples.m {
                let t = ((w >> q) & 1) as usize;
                let flip_p = model.rows[q][t][1 - t];
                let o = if rng.gen::<f64>() < flip_p { 1 - t } else { t };
                out |= (o as u32) << q;
            }
            out
        })
        .collect();
    Ok(BitSamples {
        m: samples.m,
        words,
    })
}

/// Iterative Bayesian unfolding of an observed distribution through a
/// response matrix `r[obs][true]`. Uniform prior unless one is supplied.
pub fn ibu_mitigate(
    observed: &[f64],
    response: &[Vec<f64>],
    iters: usize,
    prior: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let k = observed.len();
    if k == 0 || response.len() != k || response.iter().any(|row| row.len() != k) {
        return Err(Error::invalid(
            "response matrix shape must match the observed distribution",
        ));
    }
    let sum: f64 = observed.iter().sum();
    if (sum - 1.0).abs() > 1e-6 || observed.iter().any(|&p| p < -1e-12) {
        return Err(Error::invalid(
            "observed marginal must be a probability distribution",
        ));
    }
    if iters == 0 {
        return Err(Error::invalid("iteration count must be >= 1"));
    }
    let mut t: Vec<f64> = match prior {
        Some(p) => {
            if p.len() != k {
                return Err(Error::invalid("prior length mismatch"));
            }
            p.to_vec()
        }
        None => vec![1.0 / k as f64; k],
    };
    let mut next = vec![0.0; k];
    for _ in 0..iters {
        let predicted: Vec<f64> = (0..k)
            .map(|j| (0..k).map(|l| response[j][l] * t[l]).sum())
            .collect();
        for i in 0..k {
            let mut acc = 0.0;
            for j in 0..k {
                if predicted[j] > 0.0 {
                    acc += response[j][i] * observed[j] / predicted[j];
                }
            }
            next[i] = t[i] * acc;
        }
        std::mem::swap(&mut t, &mut next);
    }
    let z: f64 = t.iter().sum();
    if z > 0.0 {
        for x in &mut t {
            *x /= z;
        }
    }
    Ok(t)
}

/// Convenience: response of a 4-outcome pair marginal as `Vec<Vec<f64>>`.
pub fn pair_response_rows(model: &ConfusionModel, a: usize, b: usize) -> Vec<Vec<f64>> {
    model
        .pair_response(a, b)
        .iter()
        .map(|r| r.to_vec())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const K4_EDGES: [(u16, u16); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

    #[test]
    fn trivial_angles_leave_uniform_state() {
        let angles = QaoaAngles::new(vec![0.0], vec![0.0]).unwrap();
        let s = qaoa_state(&K4_EDGES, 4, &angles).unwrap();
        for a in s.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
        // One qubit, no edges, beta = 0: mixer and phase act trivially.
        let angles = QaoaAngles::new(vec![0.8], vec![0.0]).unwrap();
        let s = qaoa_state(&[], 1, &angles).unwrap();
        for a in s.amplitudes() {
            assert_abs_diff_eq!(a.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn isolated_edge_hits_minus_one() {
        use std::f64::consts::PI;
        let angles = QaoaAngles::new(vec![PI / 2.0], vec![PI / 8.0]).unwrap();
        let s = qaoa_state(&[(0, 1)], 2, &angles).unwrap();
        assert_abs_diff_eq!(zz_expectation_exact(&s, 0, 1), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            zz_analytic_p1(2, &[(0, 1)], 0, 1, PI / 2.0, PI / 8.0),
            -1.0,
            epsilon = 1e-12
        );
        // General closed form for the isolated edge: -sin(4 beta) sin(gamma).
        for &(g, b) in &[(0.7, 0.3), (1.2, -0.4), (0.2, 1.0)] {
            let s = qaoa_state(&[(0, 1)], 2, &QaoaAngles::new(vec![g], vec![b]).unwrap()).unwrap();
            assert_abs_diff_eq!(
                zz_expectation_exact(&s, 0, 1),
                -(4.0 * b).sin() * g.sin(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn uniform_and_basis_expectations() {
        let s = StateVector::uniform(3).unwrap();
        assert_abs_diff_eq!(zz_expectation_exact(&s, 0, 2), 0.0, epsilon = 1e-12);
        let s = StateVector::basis(2, 0b00).unwrap();
        assert_abs_diff_eq!(zz_expectation_exact(&s, 0, 1), 1.0, epsilon = 1e-12);
        let s = StateVector::basis(2, 0b01).unwrap();
        assert_abs_diff_eq!(zz_expectation_exact(&s, 0, 1), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn k4_analytic_matches_statevector_at_fixed_angles() {
        let angles = fixed_angles(1).unwrap();
        let s = qaoa_state(&K4_EDGES, 4, &angles).unwrap();
        let edges32: Vec<(u32, u32)> = K4_EDGES
            .iter()
            .map(|&(u, v)| (u as u32, v as u32))
            .collect();
        for i in 0..4u32 {
            for j in (i + 1)..4 {
                let sv = zz_expectation_exact(&s, i as usize, j as usize);
                let an = zz_analytic_p1(4, &edges32, i, j, angles.gammas[0], angles.betas[0]);
                assert_abs_diff_eq!(sv, an, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn regular_form_matches_counts_on_degree_3_hosts() {
        // All structures reachable in 3-regular graphs.
        for &(adjacent, common) in &[
            (true, 0usize),
            (false, 1),
            (true, 1),
            (false, 2),
            (true, 2),
            (false, 3),
        ] {
            for gi in 0..5 {
                for bi in 0..5 {
                    let g = 0.2 + 0.35 * gi as f64;
                    let b = -0.6 + 0.3 * bi as f64;
                    let di = 3 - adjacent as usize;
                    let full = zz_p1_from_counts(adjacent, di, di, common, g, b);
                    let reg = zz_analytic_p1_regular(adjacent, common, g, b);
                    assert_abs_diff_eq!(full, reg, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn beta_zero_kills_all_correlations() {
        for common in 0..=3 {
            assert_eq!(zz_analytic_p1_regular(common < 3, common, 0.9, 0.0), 0.0);
        }
        assert_eq!(zz_analytic_p1(2, &[(0, 1)], 0, 1, 1.3, 0.0), 0.0);
    }

    #[test]
    fn cost_expectation_on_k4() {
        let s = StateVector::uniform(4).unwrap();
        assert_abs_diff_eq!(cost_expectation(&K4_EDGES, &s), 3.0, epsilon = 1e-12);
        // Optimal 2-2 split |0011>: cut 4.
        let s = StateVector::basis(4, 0b0011).unwrap();
        assert_abs_diff_eq!(cost_expectation(&K4_EDGES, &s), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn ring_of_four_reaches_three_quarters_of_optimum() {
        let ring: [(u16, u16); 4] = [(0, 1), (1, 2), (2, 3), (0, 3)];
        let mut best = 0.0f64;
        for gi in 0..=180 {
            for bi in 0..=90 {
                let g = std::f64::consts::PI * gi as f64 / 180.0;
                let b = std::f64::consts::FRAC_PI_2 * bi as f64 / 90.0;
                let s = qaoa_state(&ring, 4, &QaoaAngles::new(vec![g], vec![b]).unwrap()).unwrap();
                best = best.max(cost_expectation(&ring, &s));
            }
        }
        // alpha = (2p+1)/(2p+2) = 3/4 of the optimal cut 4.
        assert_abs_diff_eq!(best, 3.0, epsilon = 2e-3);
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let s = StateVector::basis(3, 0b101).unwrap();
        let samples = sample_bitstrings(&s, 100, 7).unwrap();
        assert!(samples.words.iter().all(|&w| w == 0b101));

        let s = StateVector::uniform(1).unwrap();
        let a = sample_bitstrings(&s, 100_000, 42).unwrap();
        let b = sample_bitstrings(&s, 100_000, 42).unwrap();
        assert_eq!(a, b);
        let p1 = a.words.iter().filter(|&&w| w == 1).count() as f64 / 1e5;
        assert!((p1 - 0.5).abs() < 0.01, "p(1) = {p1}");
    }

    #[test]
    fn estimator_examples() {
        let all_zero = BitSamples {
            m: 2,
            words: vec![0b00, 0b00],
        };
        assert_eq!(estimate_zz(&all_zero, 0, 1).unwrap(), 1.0);
        let aligned = BitSamples {
            m: 2,
            words: vec![0b00, 0b11],
        };
        assert_eq!(estimate_zz(&aligned, 0, 1).unwrap(), 1.0);
        let mixed = BitSamples {
            m: 2,
            words: vec![0b00, 0b01],
        };
        assert_eq!(estimate_zz(&mixed, 0, 1).unwrap(), 0.0);
        let empty = BitSamples {
            m: 2,
            words: vec![],
        };
        assert!(estimate_zz(&empty, 0, 1).is_err());
    }

    #[test]
    fn depolarizing_scalar() {
        assert_eq!(apply_depolarizing(0.7, 1.0).unwrap(), 0.7);
        assert_eq!(apply_depolarizing(0.7, 0.0).unwrap(), 0.0);
        assert!(apply_depolarizing(0.7, 1.5).is_err());
    }

    #[test]
    fn readout_noise_identity_and_full_flip() {
        let s = StateVector::basis(3, 0b010).unwrap();
        let samples = sample_bitstrings(&s, 50, 1).unwrap();
        let id = apply_readout_noise(&samples, &ConfusionModel::identity(3), 9).unwrap();
        assert_eq!(id, samples);
        let flip = ConfusionModel::uniform(3, [[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let flipped = apply_readout_noise(&samples, &flip, 9).unwrap();
        assert!(flipped.words.iter().all(|&w| w == 0b101));
    }

    #[test]
    fn asymmetric_readout_biases_z_toward_plus() {
        // p(obs 0 | true 1) = 0.1 biases <Z> upward by 2 * 0.1 * p(1).
        let s = StateVector::uniform(1).unwrap();
        let samples = sample_bitstrings(&s, 200_000, 3).unwrap();
        let model = ConfusionModel::uniform(1, [[1.0, 0.0], [0.1, 0.9]]).unwrap();
        let noisy = apply_readout_noise(&samples, &model, 5).unwrap();
        let z = |bs: &BitSamples| {
            bs.words
                .iter()
                .map(|&w| 1.0 - 2.0 * (w & 1) as f64)
                .sum::<f64>()
                / bs.words.len() as f64
        };
        let bias = z(&noisy) - z(&samples);
        assert!((bias - 0.1).abs() < 0.01, "bias = {bias}");
    }

    #[test]
    fn ibu_identity_and_synthetic_inversion() {
        let id: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let observed = [0.4, 0.3, 0.2, 0.1];
        let out = ibu_mitigate(&observed, &id, 1, None).unwrap();
        for (o, e) in out.iter().zip(observed.iter()) {
            assert_abs_diff_eq!(o, e, epsilon = 1e-12);
        }

        // Forward-apply a product confusion and invert.
        let model = ConfusionModel::uniform(2, [[0.93, 0.07], [0.12, 0.88]]).unwrap();
        let r = pair_response_rows(&model, 0, 1);
        let truth = [0.55, 0.05, 0.1, 0.3];
        let mut forward = [0.0; 4];
        for (j, f) in forward.iter_mut().enumerate() {
            *f = (0..4).map(|i| r[j][i] * truth[i]).sum();
        }
        let recovered = ibu_mitigate(&forward, &r, 50, None).unwrap();
        let tv: f64 = recovered
            .iter()
            .zip(truth.iter())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 1e-3, "total variation {tv}");

        // Uniform observed with symmetric confusion stays uniform.
        let sym = ConfusionModel::uniform(2, [[0.9, 0.1], [0.1, 0.9]]).unwrap();
        let r = pair_response_rows(&sym, 0, 1);
        let out = ibu_mitigate(&[0.25; 4], &r, 25, None).unwrap();
        for o in out {
            assert_abs_diff_eq!(o, 0.25, epsilon = 1e-9);
        }
    }

    #[test]
    fn fixed_angle_table() {
        let a = fixed_angles(1).unwrap();
        assert_eq!(a.gammas, vec![0.615533629]);
        assert_eq!(a.betas, vec![0.3926720292447629]);
        let a = fixed_angles(2).unwrap();
        assert_eq!(a.gammas, vec![0.4877097328, 0.8979876956]);
        assert_eq!(a.betas, vec![0.5550603400685824, 0.29250781484335187]);
        let a = fixed_angles(3).unwrap();
        assert_eq!(a.gammas[2], 0.9370887966);
        assert_eq!(a.betas[2], 0.23539562255067184);
        assert!(fixed_angles(4).is_err());
        assert!(fixed_angles(0).is_err());
    }

    #[test]
    fn statevector_cap_enforced() {
        assert!(StateVector::uniform(25).is_err());
        assert!(StateVector::uniform(24).is_ok() || cfg!(miri));
    }
}
