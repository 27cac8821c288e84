//! Classical reference heuristics: simulated annealing, parallel tempering,
//! constructive greedy, and a rank-2 angular relaxation with local search.
//!
//! All of them minimize the Ising objective (equivalently maximize the cut)
//! with O(1) incremental energy updates per spin flip, and are deterministic
//! given `(instance, parameters, seed)` -- except for wall-clock budgets,
//! which of course depend on the machine.

use rand::Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{cut_value, ising_value, Assignment, ProblemInstance};
use crate::report::{SolverReport, StageTimer};
use crate::seeds;

/// Temperature interpolation shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Linear,
    Geometric,
}

/// Annealing schedule in the energy units of the Ising objective.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub sweeps: usize,
    pub t_hot: f64,
    pub t_cold: f64,
}

impl Schedule {
    pub fn new(kind: ScheduleKind, sweeps: usize, t_hot: f64, t_cold: f64) -> Result<Self> {
        if sweeps == 0 {
            return Err(Error::invalid("sweep count must be >= 1"));
        }
        if !(t_hot > t_cold && t_cold > 0.0) {
            return Err(Error::invalid(format!(
                "temperatures must satisfy t_hot > t_cold > 0, got {t_hot} and {t_cold}"
            )));
        }
        Ok(Schedule {
            kind,
            sweeps,
            t_hot,
            t_cold,
        })
    }

    /// Geometric schedule with the instance-size default temperatures.
    pub fn default_geometric(n: usize, sweeps: usize) -> Result<Self> {
        let (hot, cold) = default_temperatures(n);
        Schedule::new(ScheduleKind::Geometric, sweeps, hot, cold)
    }

    /// Temperature of sweep `l` in `1..=sweeps`, interpolating inverse
    /// temperatures linearly or log-linearly.
    pub fn temperature(&self, l: usize) -> f64 {
        let k = self.sweeps as f64;
        let l = l as f64;
        let bh = 1.0 / self.t_hot;
        let bc = 1.0 / self.t_cold;
        let beta = match self.kind {
            ScheduleKind::Linear => bh + l * (bc - bh) / k,
            ScheduleKind::Geometric => (bh.ln() + l * (bc.ln() - bh.ln()) / k).exp(),
        };
        1.0 / beta
    }
}

/// Size-aware defaults: the hot end accepts the largest possible uphill move
/// (six energy units on unit-weight degree-3 graphs) half of the time; the
/// cold end caps the chance of exciting any of the n spins by the smallest
/// step (two units) at 1%.
pub fn default_temperatures(n: usize) -> (f64, f64) {
    (6.0 / std::f64::consts::LN_2, 2.0 / ((100 * n) as f64).ln())
}

/// Metropolis acceptance probability for an energy change `delta` at
/// temperature `t` (minimization; `delta <= 0` always accepts).
pub fn metropolis_accept(delta: f64, t: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else {
        (-delta / t).exp().min(1.0)
    }
}

/// Replica-exchange acceptance for configurations with energies `e_cold`
/// (at `t_cold`) and `e_hot` (at `t_hot`).
pub fn exchange_accept(e_cold: f64, e_hot: f64, t_cold: f64, t_hot: f64) -> f64 {
    let arg = (e_cold - e_hot) * (1.0 / t_cold - 1.0 / t_hot);
    arg.exp().min(1.0)
}

fn random_assignment(n: usize, rng: &mut impl Rng) -> Vec<i8> {
    (0..n)
        .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
        .collect()
}

/// Ising energy change from flipping spin `i`.
#[inline]
fn flip_delta(inst: &ProblemInstance, spins: &[i8], i: usize) -> i64 {
    let mut neighbor_sum = 0i64;
    for &j in &inst.neighbors(i as u32) {
        neighbor_sum += spins[j as usize] as i64;
    }
    -2 * spins[i] as i64 * neighbor_sum
}

struct BestTracker {
    energy: i64,
    spins: Vec<i8>,
}

impl BestTracker {
    fn new(energy: i64, spins: &[i8]) -> Self {
        BestTracker {
            energy,
            spins: spins.to_vec(),
        }
    }

    fn observe(&mut self, energy: i64, spins: &[i8]) {
        if energy < self.energy {
            self.energy = energy;
            self.spins.copy_from_slice(spins);
        }
    }
}

/// Simulated annealing: `sweeps` passes of n uniformly random single-spin
/// Metropolis proposals, temperature updated per sweep; returns the
/// best-seen assignment.
pub fn sa_solve(inst: &ProblemInstance, schedule: &Schedule, seed: u64) -> Result<SolverReport> {
    let timer = StageTimer::start();
    let n = inst.n();
    let mut rng = seeds::rng(seed);
    let mut spins = random_assignment(n, &mut rng);
    let mut energy = ising_value(inst, &Assignment(spins.clone()))?;
    let mut best = BestTracker::new(energy, &spins);
    let mut proposals: u64 = 0;
    for l in 1..=schedule.sweeps {
        let t = schedule.temperature(l);
        for _ in 0..n {
            let i = rng.gen_range(0..n);
            let delta = flip_delta(inst, &spins, i);
            if delta <= 0 || rng.gen::<f64>() < (-(delta as f64) / t).exp() {
                spins[i] = -spins[i];
                energy += delta;
            }
            proposals += 1;
            // Drift guard; energies are integers so this is a pure
            // consistency assertion.
            if proposals.is_multiple_of(1_000_000) {
                debug_assert_eq!(energy, ising_value(inst, &Assignment(spins.clone()))?);
            }
        }
        best.observe(energy, &spins);
    }
    let assignment = Assignment(best.spins);
    let cut = cut_value(inst, &assignment)?;
    Ok(SolverReport {
        solver: "sa".to_string(),
        params: json!({
            "sweeps": schedule.sweeps,
            "schedule": match schedule.kind { ScheduleKind::Linear => "linear", ScheduleKind::Geometric => "geometric" },
            "t_hot": schedule.t_hot,
            "t_cold": schedule.t_cold,
        }),
        seed,
        cut,
        alpha: None,
        time_ms: timer.total_ms(),
        stage_times: timer.into_stages(),
        assignment,
    })
}

/// Parallel tempering with `replicas` geometric temperatures from hot to
/// cold, one sweep per replica between exchange passes, exchanges attempted
/// from the hot end down.
pub fn pt_solve(
    inst: &ProblemInstance,
    sweeps: usize,
    replicas: usize,
    seed: u64,
) -> Result<SolverReport> {
    if replicas == 0 {
        return Err(Error::invalid("at least one replica required"));
    }
    if sweeps == 0 {
        return Err(Error::invalid("sweep count must be >= 1"));
    }
    let timer = StageTimer::start();
    let n = inst.n();
    let (t_hot, t_cold) = default_temperatures(n);
    // Temperatures sorted cold to hot; geometric spacing.
    let temps: Vec<f64> = if replicas == 1 {
        vec![t_hot]
    } else {
        (0..replicas)
            .map(|r| t_cold * (t_hot / t_cold).powf(r as f64 / (replicas - 1) as f64))
            .collect()
    };
    let mut rng = seeds::rng(seed);
    let mut states: Vec<Vec<i8>> = (0..replicas)
        .map(|_| random_assignment(n, &mut rng))
        .collect();
    let mut energies: Vec<i64> = states
        .iter()
        .map(|s| ising_value(inst, &Assignment(s.clone())))
        .collect::<Result<_>>()?;
    let mut best = BestTracker::new(*energies.iter().min().unwrap(), &states[0]);
    for (s, &e) in states.iter().zip(&energies) {
        best.observe(e, s);
    }
    for _ in 0..sweeps {
        for (r, t) in temps.iter().enumerate() {
            for _ in 0..n {
                let i = rng.gen_range(0..n);
                let delta = flip_delta(inst, &states[r], i);
                if delta <= 0 || rng.gen::<f64>() < (-(delta as f64) / t).exp() {
                    states[r][i] = -states[r][i];
                    energies[r] += delta;
                }
            }
            best.observe(energies[r], &states[r]);
        }
        // Exchange pass from the hottest pair down.
        for r in (0..replicas.saturating_sub(1)).rev() {
            let p = exchange_accept(
                energies[r] as f64,
                energies[r + 1] as f64,
                temps[r],
                temps[r + 1],
            );
            if p >= 1.0 || rng.gen::<f64>() < p {
                states.swap(r, r + 1);
                energies.swap(r, r + 1);
            }
        }
    }
    let assignment = Assignment(best.spins);
    let cut = cut_value(inst, &assignment)?;
    Ok(SolverReport {
        solver: "pt".to_string(),
        params: json!({"sweeps": sweeps, "replicas": replicas, "t_hot": t_hot, "t_cold": t_cold}),
        seed,
        cut,
        alpha: None,
        time_ms: timer.total_ms(),
        stage_times: timer.into_stages(),
        assignment,
    })
}

/// Randomized constructive greedy: visit unset variables in random order,
/// fixing each to the sign that minimizes the objective given its already-set
/// neighbors; ties break uniformly at random.
pub fn greedy_construct(inst: &ProblemInstance, seed: u64) -> Result<SolverReport> {
    let timer = StageTimer::start();
    let n = inst.n();
    let mut rng = seeds::rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    // Fisher-Yates keeps the visit order uniform over permutations.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut spins = vec![0i8; n];
    for &i in &order {
        let mut set_sum = 0i32;
        for &j in &inst.neighbors(i as u32) {
            set_sum += spins[j as usize] as i32;
        }
        spins[i] = match set_sum.cmp(&0) {
            std::cmp::Ordering::Greater => -1,
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Equal => {
                if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
        };
    }
    let assignment = Assignment(spins);
    let cut = cut_value(inst, &assignment)?;
    Ok(SolverReport {
        solver: "greedy".to_string(),
        params: json!({}),
        seed,
        cut,
        alpha: None,
        time_ms: timer.total_ms(),
        stage_times: timer.into_stages(),
        assignment,
    })
}

/// Spend budget for the rank-2 heuristic: wall-clock milliseconds (machine
/// dependent) or a deterministic perturb-and-descend pass count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BmBudget {
    Millis(u64),
    Passes(u32),
}

/// Rank-2 angular relaxation: coordinate descent on circle angles minimizing
/// the sum of `cos(theta_i - theta_j)` over edges, rounded by the best of 32
/// random hyperplane cuts, polished to a 1-flip local optimum, then perturbed
/// and repeated until the budget runs out. At least one full pass always
/// completes.
pub fn bm_solve(inst: &ProblemInstance, budget: BmBudget, seed: u64) -> Result<SolverReport> {
    let timer = StageTimer::start();
    let n = inst.n();
    let mut rng = seeds::rng(seed);
    let tau = 2.0 * std::f64::consts::PI;
    let mut theta: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * tau).collect();
    let mut best: Option<(u64, Vec<i8>)> = None;
    let mut passes_done: u32 = 0;
    let deadline = match budget {
        BmBudget::Millis(ms) => {
            Some(std::time::Instant::now() + std::time::Duration::from_millis(ms))
        }
        BmBudget::Passes(p) => {
            if p == 0 {
                return Err(Error::invalid("pass budget must be >= 1"));
            }
            None
        }
    };
    loop {
        // Coordinate descent: each angle has a closed-form 1D minimizer
        // opposite the resultant of its neighbors.
        for _ in 0..60 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let mut re = 0.0;
                let mut im = 0.0;
                for &j in &inst.neighbors(i as u32) {
                    re += theta[j as usize].cos();
                    im += theta[j as usize].sin();
                }
                if re == 0.0 && im == 0.0 {
                    continue;
                }
                let target = (-im).atan2(-re);
                let diff = (target - theta[i] + std::f64::consts::PI).rem_euclid(tau)
                    - std::f64::consts::PI;
                moved = moved.max(diff.abs());
                theta[i] = target.rem_euclid(tau);
            }
            if moved < 1e-4 {
                break;
            }
        }
        // Best of 32 hyperplane roundings.
        let mut pass_best: Option<(u64, Vec<i8>)> = None;
        for _ in 0..32 {
            let psi = rng.gen::<f64>() * tau;
            let spins: Vec<i8> = theta
                .iter()
                .map(|&t| if (t - psi).cos() >= 0.0 { 1 } else { -1 })
                .collect();
            let cut = cut_value(inst, &Assignment(spins.clone()))?;
            if pass_best.as_ref().is_none_or(|(c, _)| cut > *c) {
                pass_best = Some((cut, spins));
            }
        }
        let (_, mut spins) = pass_best.unwrap();
        // 1-flip local search to a local optimum.
        loop {
            let mut improved = false;
            for i in 0..n {
                if flip_delta(inst, &spins, i) < 0 {
                    spins[i] = -spins[i];
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        let cut = cut_value(inst, &Assignment(spins.clone()))?;
        if best.as_ref().is_none_or(|(c, _)| cut > *c) {
            best = Some((cut, spins));
        }
        passes_done += 1;
        let exhausted = match budget {
            BmBudget::Millis(_) => deadline.is_none_or(|d| std::time::Instant::now() >= d),
            BmBudget::Passes(p) => passes_done >= p,
        };
        if exhausted {
            break;
        }
        // Perturb all angles; roughly a third of the coordinate minimizers
        // change basin at this magnitude.
        for t in &mut theta {
            *t = (*t + (rng.gen::<f64>() - 0.5) * 0.6).rem_euclid(tau);
        }
    }
    let (cut, spins) = best.unwrap();
    let assignment = Assignment(spins);
    Ok(SolverReport {
        solver: "bm".to_string(),
        params: match budget {
            BmBudget::Millis(ms) => json!({"budget_ms": ms, "passes": passes_done}),
            BmBudget::Passes(p) => json!({"budget_passes": p}),
        },
        seed,
        cut,
        alpha: None,
        time_ms: timer.total_ms(),
        stage_times: timer.into_stages(),
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{brute_force_maxcut, generate_regular, k33, k4};
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_temperature_values() {
        let (hot, cold) = default_temperatures(100);
        assert_abs_diff_eq!(hot, 8.656170245333781, epsilon = 1e-9);
        assert_abs_diff_eq!(cold, 2.0 / 10_000f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(cold, 0.21714724095162588, epsilon = 1e-9);
        // The largest uphill move is accepted exactly half the time at t_hot.
        assert_abs_diff_eq!(metropolis_accept(6.0, hot), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn acceptance_functions_are_exact() {
        assert_eq!(metropolis_accept(-3.0, 1.0), 1.0);
        assert_eq!(metropolis_accept(0.0, 1.0), 1.0);
        assert_abs_diff_eq!(
            metropolis_accept(2.0, 0.5),
            (-4.0f64).exp(),
            epsilon = 1e-15
        );
        assert_eq!(exchange_accept(5.0, 5.0, 0.3, 1.0), 1.0);
        assert_abs_diff_eq!(
            exchange_accept(2.0, 4.0, 0.5, 1.0),
            (-2.0f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn schedule_endpoints_and_shapes() {
        let s = Schedule::new(ScheduleKind::Linear, 10, 8.0, 0.5).unwrap();
        assert_abs_diff_eq!(s.temperature(10), 0.5, epsilon = 1e-12);
        let g = Schedule::new(ScheduleKind::Geometric, 10, 8.0, 0.5).unwrap();
        assert_abs_diff_eq!(g.temperature(10), 0.5, epsilon = 1e-12);
        for l in 1..=10 {
            assert!(g.temperature(l) <= g.temperature(l - 1) + 1e-12);
        }
        assert!(Schedule::new(ScheduleKind::Linear, 0, 8.0, 0.5).is_err());
        assert!(Schedule::new(ScheduleKind::Linear, 10, 0.5, 8.0).is_err());
    }

    #[test]
    fn sa_freezes_to_optimum_on_k4() {
        let inst = k4();
        let schedule =
            Schedule::new(ScheduleKind::Geometric, 200, 6.0 / 2f64.ln(), 1e-9 + 0.01).unwrap();
        let mut hits = 0;
        for seed in 0..50 {
            if sa_solve(&inst, &schedule, seed).unwrap().cut == 4 {
                hits += 1;
            }
        }
        assert!(hits >= 49, "only {hits}/50 reached the optimum");
    }

    #[test]
    fn sa_reports_are_deterministic_and_verified() {
        let inst = generate_regular(32, 3).unwrap();
        let schedule = Schedule::default_geometric(32, 50).unwrap();
        let a = sa_solve(&inst, &schedule, 7).unwrap();
        let b = sa_solve(&inst, &schedule, 7).unwrap();
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.cut, cut_value(&inst, &a.assignment).unwrap());
    }

    #[test]
    fn pt_single_replica_degenerates_and_finds_k33_optimum() {
        let inst = k33();
        let single = pt_solve(&inst, 100, 1, 5).unwrap();
        assert!(single.cut <= 9);
        let mut hits = 0;
        for seed in 0..20 {
            if pt_solve(&inst, 100, 4, seed).unwrap().cut == 9 {
                hits += 1;
            }
        }
        assert!(hits >= 19, "{hits}/20");
    }

    #[test]
    fn pt_best_seen_is_monotone_in_sweeps() {
        let inst = generate_regular(24, 4).unwrap();
        let mut last = 0;
        for sweeps in [10, 40, 160] {
            let cut = pt_solve(&inst, sweeps, 6, 11).unwrap().cut;
            assert!(cut >= last);
            last = cut;
        }
    }

    #[test]
    fn greedy_construct_k4_reaches_three() {
        for seed in 0..40 {
            let report = greedy_construct(&k4(), seed).unwrap();
            assert!(report.cut >= 3, "greedy fell below 3 on K4");
        }
    }

    #[test]
    fn bm_solves_k33_in_one_pass() {
        let report = bm_solve(&k33(), BmBudget::Passes(1), 3).unwrap();
        assert_eq!(report.cut, 9);
    }

    #[test]
    fn bm_output_is_one_flip_optimal_and_deterministic() {
        let inst = generate_regular(24, 8).unwrap();
        let a = bm_solve(&inst, BmBudget::Passes(3), 9).unwrap();
        let b = bm_solve(&inst, BmBudget::Passes(3), 9).unwrap();
        assert_eq!(a.assignment, b.assignment);
        let spins = a.assignment.spins();
        for i in 0..24 {
            assert!(flip_delta(&inst, spins, i) >= 0, "flip {i} would improve");
        }
    }

    #[test]
    fn bm_finds_optimum_on_brute_forced_instances() {
        let mut hits = 0;
        for seed in 0..20 {
            let inst = generate_regular(16, 200 + seed).unwrap();
            let (best, _) = brute_force_maxcut(&inst).unwrap();
            if bm_solve(&inst, BmBudget::Passes(6), seed).unwrap().cut == best {
                hits += 1;
            }
        }
        assert!(hits >= 19, "{hits}/20");
    }
}
