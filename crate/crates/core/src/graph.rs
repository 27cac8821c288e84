//! Unit-weight random 3-regular max-cut instances.
//!
//! Instances are generated with the configuration (pairing) model, rejecting
//! self-loops and multi-edges and restarting on failure, which samples the
//! 3-regular ensemble asymptotically uniformly. Vertices are 0-indexed
//! everywhere, including file formats. Disconnected graphs are kept: light
//! cones and solvers handle components naturally.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;

/// Vertex-count cap for exhaustive max-cut enumeration.
pub const BRUTE_FORCE_CAP: usize = 26;

/// A unit-weight 3-regular graph plus identity metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    n: usize,
    /// Sorted edge list, each pair `(u, v)` with `u < v`.
    edges: Vec<(u32, u32)>,
    /// Per-vertex neighbor triples.
    adj: Vec<[u32; 3]>,
    pub seed: u64,
    pub id: String,
}

/// One spin per vertex, each `+1` or `-1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(pub Vec<i8>);

impl Assignment {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    /// Flip every spin in place; the cut value is invariant under this.
    pub fn global_flip(&mut self) {
        for s in &mut self.0 {
            *s = -*s;
        }
    }

    /// Canonical representative of the `{z, -z}` pair: first spin `+1`.
    pub fn canonicalize(&mut self) {
        if self.0.first().copied() == Some(-1) {
            self.global_flip();
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl ProblemInstance {
    /// Validate and build an instance from an edge list.
    pub fn new(
        n: usize,
        mut edges: Vec<(u32, u32)>,
        seed: u64,
        id: impl Into<String>,
    ) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "vertex count must be even and >= 4, got {n}"
            )));
        }
        for e in &mut edges {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        let expected = 3 * n / 2;
        if edges.len() != expected {
            return Err(Error::invalid(format!(
                "3-regular graph on {n} vertices needs {expected} edges, got {}",
                edges.len()
            )));
        }
        let mut deg = vec![0u8; n];
        let mut adj = vec![[u32::MAX; 3]; n];
        let mut prev: Option<(u32, u32)> = None;
        for &(u, v) in &edges {
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            if prev == Some((u, v)) {
                return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
            }
            prev = Some((u, v));
            for &x in &[u, v] {
                let x = x as usize;
                if x >= n {
                    return Err(Error::invalid(format!(
                        "vertex {x} out of range for n = {n}"
                    )));
                }
                if deg[x] == 3 {
                    return Err(Error::invalid(format!("vertex {x} has degree > 3")));
                }
            }
            adj[u as usize][deg[u as usize] as usize] = v;
            adj[v as usize][deg[v as usize] as usize] = u;
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        if let Some(bad) = deg.iter().position(|&d| d != 3) {
            return Err(Error::invalid(format!(
                "vertex {bad} has degree {} != 3",
                deg[bad]
            )));
        }
        Ok(ProblemInstance {
            n,
            edges,
            adj,
            seed,
            id: id.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// The three neighbors of `v`.
    pub fn neighbors(&self, v: u32) -> [u32; 3] {
        self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].contains(&v)
    }

    /// Number of common neighbors of `i` and `j`.
    pub fn common_neighbors(&self, i: u32, j: u32) -> usize {
        self.adj[i as usize]
            .iter()
            .filter(|k| self.adj[j as usize].contains(k))
            .count()
    }
}

/// Draw a random 3-regular instance with the configuration model.
///
/// Identical `(n, seed)` always yield the identical edge set.
pub fn generate_regular(n: usize, seed: u64) -> Result<ProblemInstance> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "vertex count must be even and >= 4, got {n}"
        )));
    }
    let mut rng = seeds::rng(seeds::derive(seed, n as u64));
    let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| [v, v, v]).collect();
    let m = stubs.len() / 2;
    'restart: loop {
        stubs.shuffle(&mut rng);
        let mut seen = BTreeSet::new();
        for i in 0..m {
            let (mut u, mut v) = (stubs[2 * i], stubs[2 * i + 1]);
            if u == v {
                continue 'restart;
            }
            if u > v {
                std::mem::swap(&mut u, &mut v);
            }
            if !seen.insert((u, v)) {
                continue 'restart;
            }
        }
        let edges: Vec<(u32, u32)> = seen.into_iter().collect();
        let id = format!("r3-n{n}-s{seed}");
        return ProblemInstance::new(n, edges, seed, id);
    }
}

fn check_len(inst: &ProblemInstance, z: &Assignment) -> Result<()> {
    if z.len() != inst.n {
        return Err(Error::invalid(format!(
            "assignment length {} != vertex count {}",
            z.len(),
            inst.n
        )));
    }
    Ok(())
}

/// Number of edges cut by `z`.
pub fn cut_value(inst: &ProblemInstance, z: &Assignment) -> Result<u64> {
    check_len(inst, z)?;
    Ok(cut_value_edges(inst.edges(), z.spins()))
}

/// Ising objective: sum of `z_i * z_j` over edges. Lower is better;
/// `4*cut + 2*ising = 3n` holds for every assignment.
pub fn ising_value(inst: &ProblemInstance, z: &Assignment) -> Result<i64> {
    check_len(inst, z)?;
    Ok(ising_value_edges(inst.edges(), z.spins()))
}

/// Achieved cut divided by the best cut.
pub fn approximation_ratio(inst: &ProblemInstance, z: &Assignment, best_cut: u64) -> Result<f64> {
    let cut = cut_value(inst, z)?;
    if best_cut == 0 {
        return Err(Error::invalid("best_cut must be positive"));
    }
    Ok(cut as f64 / best_cut as f64)
}

/// Edge-list cut count, usable on arbitrary graphs (subcircuits, test rings).
pub fn cut_value_edges(edges: &[(u32, u32)], spins: &[i8]) -> u64 {
    edges
        .iter()
        .filter(|&&(u, v)| spins[u as usize] != spins[v as usize])
        .count() as u64
}

pub fn ising_value_edges(edges: &[(u32, u32)], spins: &[i8]) -> i64 {
    edges
        .iter()
        .map(|&(u, v)| (spins[u as usize] * spins[v as usize]) as i64)
        .sum()
}

/// Exhaustive max-cut over all sign classes of an arbitrary edge list.
///
/// Ties break toward the lexicographically smallest assignment (`+1` before
/// `-1`) with the first spin fixed to `+1`.
pub fn max_cut_exhaustive(n: usize, edges: &[(u32, u32)]) -> Result<(u64, Assignment)> {
    if n == 0 || n > BRUTE_FORCE_CAP {
        return Err(Error::capacity(format!(
            "exhaustive search supports 1..={BRUTE_FORCE_CAP} vertices, got {n}"
        )));
    }
    // Gray-code walk over the 2^(n-1) sign classes with spin 0 pinned to +1;
    // each step flips one spin and updates the cut through its incident edges.
    let mut incident: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (idx, &(u, v)) in edges.iter().enumerate() {
        incident[u as usize].push(idx as u32);
        incident[v as usize].push(idx as u32);
    }
    let mut spins: Vec<i8> = vec![1; n];
    let mut cut: u64 = 0;
    let mut best_cut = 0u64;
    let mut best = spins.clone();
    let total: u64 = 1 << (n - 1);
    for code in 1..=total {
        if code == total {
            break;
        }
        // Bit that flips between gray(code-1) and gray(code); spin index is
        // offset by one because spin 0 stays pinned.
        let bit = code.trailing_zeros() as usize + 1;
        let v = bit;
        spins[v] = -spins[v];
        for &e in &incident[v] {
            let (a, b) = edges[e as usize];
            if spins[a as usize] != spins[b as usize] {
                cut += 1;
            } else {
                cut -= 1;
            }
        }
        if cut > best_cut || (cut == best_cut && lex_less(&spins, &best)) {
            best_cut = cut;
            best = spins.clone();
        }
    }
    Ok((best_cut, Assignment(best)))
}

/// Exact maximum cut of a 3-regular instance (enumeration, `n <= 26`).
pub fn brute_force_maxcut(inst: &ProblemInstance) -> Result<(u64, Assignment)> {
    max_cut_exhaustive(inst.n, inst.edges())
}

fn lex_less(a: &[i8], b: &[i8]) -> bool {
    // +1 sorts before -1.
    for (&x, &y) in a.iter().zip(b) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// Exact counts of simple cycles of each length `3..=max_len`.
///
/// Enumerates paths anchored at their minimal vertex; cheap on degree-3
/// graphs for the short lengths used here (`max_len <= 8` stays instant).
pub fn cycle_census(inst: &ProblemInstance, max_len: usize) -> Vec<(usize, u64)> {
    let max_len = max_len.max(3);
    let mut counts = vec![0u64; max_len + 1];
    let n = inst.n;
    let mut on_path = vec![false; n];
    for start in 0..n as u32 {
        on_path[start as usize] = true;
        dfs_cycles(inst, start, start, 1, max_len, &mut on_path, &mut counts);
        on_path[start as usize] = false;
    }
    // Each cycle is found twice (two directions).
    (3..=max_len).map(|l| (l, counts[l] / 2)).collect()
}

fn dfs_cycles(
    inst: &ProblemInstance,
    start: u32,
    v: u32,
    len: usize,
    max_len: usize,
    on_path: &mut [bool],
    counts: &mut [u64],
) {
    for &w in &inst.neighbors(v) {
        if w == start && len >= 3 {
            counts[len] += 1;
            continue;
        }
        // Anchoring at the minimal vertex makes each cycle counted once per
        // direction.
        if w <= start || on_path[w as usize] || len == max_len {
            continue;
        }
        on_path[w as usize] = true;
        dfs_cycles(inst, start, w, len + 1, max_len, on_path, counts);
        on_path[w as usize] = false;
    }
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Manifest row describing one instance file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub n: usize,
    pub seed: u64,
    pub path: String,
}

/// Write the edge-list text format: `n m` header then `u v` lines, `u < v`.
pub fn write_edge_list<W: Write>(inst: &ProblemInstance, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", inst.n, inst.edges.len())?;
    for &(u, v) in &inst.edges {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: std::io::Read>(
    r: R,
    seed: u64,
    id: impl Into<String>,
) -> Result<ProblemInstance> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format("empty edge-list file"))??;
    let mut it = header.split_whitespace();
    let n: usize = parse_tok(it.next(), "vertex count")?;
    let m: usize = parse_tok(it.next(), "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let u: u32 = parse_tok(it.next(), "edge endpoint")?;
        let v: u32 = parse_tok(it.next(), "edge endpoint")?;
        if u >= v {
            return Err(Error::format(format!("edge {u} {v} violates u < v")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::format(format!(
            "header says {m} edges, found {}",
            edges.len()
        )));
    }
    ProblemInstance::new(n, edges, seed, id)
}

pub fn load_instance(path: &Path, seed: u64, id: impl Into<String>) -> Result<ProblemInstance> {
    let file = std::fs::File::open(path)?;
    read_edge_list(file, seed, id)
}

fn parse_tok<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::format(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::format(format!("unparsable {what}")))
}

/// The complete graph on four vertices: the unique 3-regular graph at n = 4.
pub fn k4() -> ProblemInstance {
    ProblemInstance::new(
        4,
        vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        0,
        "k4",
    )
    .unwrap()
}

/// The complete bipartite graph K_{3,3}: 3-regular, n = 6, all 9 edges cut by
/// the bipartition.
pub fn k33() -> ProblemInstance {
    let edges = vec![
        (0, 3),
        (0, 4),
        (0, 5),
        (1, 3),
        (1, 4),
        (1, 5),
        (2, 3),
        (2, 4),
        (2, 5),
    ];
    ProblemInstance::new(6, edges, 0, "k33").unwrap()
}
