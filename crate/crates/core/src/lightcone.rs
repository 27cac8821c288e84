//! Light-cone subcircuits and anchored-isomorphism deduplication.
//!
//! A depth-`p` QAOA circuit correlates two qubits only when their radius-`p`
//! neighborhoods intersect. Each correlated pair `(i, j)` induces a subgraph
//! on the union of the two light cones -- at most `1 + 6(2^p - 1)` vertices on
//! 3-regular graphs -- and one statevector run on that subgraph yields the
//! exact correlation. Tasks that are isomorphic *as anchored graphs* (a map
//! sending the pair onto the pair) share a single run, so the number of
//! distinct circuits stays O(1) per instance at fixed `p`.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ProblemInstance;
use crate::seeds::splitmix64;

/// Worst-case vertex count of a single light cone on a 3-regular graph.
pub fn light_cone_bound(p: usize) -> usize {
    1 + 3 * ((1usize << p) - 1)
}

/// Worst-case vertex count of a two-cone subcircuit on a 3-regular graph.
pub fn subcircuit_bound(p: usize) -> usize {
    1 + 6 * ((1usize << p) - 1)
}

/// An induced subgraph from two intersecting light cones, with the original
/// pair tracked as anchors in subgraph coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcircuitTask {
    /// Induced edges in subgraph coordinates, sorted, `u < v`.
    pub sub_edges: Vec<(u16, u16)>,
    /// Qubit count of the subcircuit.
    pub size: usize,
    pub anchor_a: u16,
    pub anchor_b: u16,
    /// `(instance id, i, j)` the task was extracted for.
    pub origin: (String, u32, u32),
    /// Original vertex -> subgraph vertex, sorted by original index.
    pub relabel: Vec<(u32, u16)>,
}

impl SubcircuitTask {
    /// Neighbor lists in subgraph coordinates.
    pub fn adjacency(&self) -> Vec<Vec<u16>> {
        let mut adj = vec![Vec::new(); self.size];
        for &(u, v) in &self.sub_edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }
}

/// All vertices within graph distance `p` of `v`.
pub fn light_cone(inst: &ProblemInstance, v: u32, p: usize) -> Vec<u32> {
    let mut seen: std::collections::HashSet<u32> = std::collections::HashSet::new();
    seen.insert(v);
    let mut frontier = vec![v];
    for _ in 0..p {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in &inst.neighbors(u) {
                if seen.insert(w) {
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<u32> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Unordered pairs `(i, j)`, `i < j`, whose `p`-light cones intersect:
/// exactly the pairs at graph distance `<= 2p`.
pub fn correlated_pairs(inst: &ProblemInstance, p: usize) -> Vec<(u32, u32)> {
    let n = inst.n();
    let mut pairs = Vec::new();
    let mut dist = vec![usize::MAX; n];
    let mut frontier = Vec::new();
    for i in 0..n as u32 {
        // BFS to depth 2p from i.
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[i as usize] = 0;
        frontier.clear();
        frontier.push(i);
        for d in 1..=2 * p {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in &inst.neighbors(u) {
                    if dist[w as usize] == usize::MAX {
                        dist[w as usize] = d;
                        if w > i {
                            pairs.push((i, w));
                        }
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Extract the anchored subcircuit task for a correlated pair.
pub fn subproblem(inst: &ProblemInstance, i: u32, j: u32, p: usize) -> Result<SubcircuitTask> {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    let cone_i = light_cone(inst, i, p);
    let cone_j = light_cone(inst, j, p);
    let mut verts: Vec<u32> = cone_i.iter().chain(cone_j.iter()).copied().collect();
    verts.sort_unstable();
    verts.dedup();
    if verts.len() == cone_i.len() + cone_j.len() {
        return Err(Error::domain(format!(
            "light cones of {i} and {j} do not intersect at p = {p}"
        )));
    }
    let relabel: Vec<(u32, u16)> = verts
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, k as u16))
        .collect();
    let index_of = |v: u32| -> u16 { relabel[verts.binary_search(&v).unwrap()].1 };
    let mut sub_edges = Vec::new();
    for &(u, v) in inst.edges() {
        if verts.binary_search(&u).is_ok() && verts.binary_search(&v).is_ok() {
            sub_edges.push((index_of(u), index_of(v)));
        }
    }
    sub_edges.sort_unstable();
    Ok(SubcircuitTask {
        size: verts.len(),
        anchor_a: index_of(i),
        anchor_b: index_of(j),
        origin: (inst.id.clone(), i, j),
        sub_edges,
        relabel,
    })
}

// ---------------------------------------------------------------------------
// Anchored Weisfeiler-Lehman hashing
// ---------------------------------------------------------------------------

/// WL refinement rounds. Subcircuit diameters stay below 4p <= 12, for which
/// three rounds separate everything we have encountered; tune if deeper
/// circuits ever need it.
pub const WL_ROUNDS: usize = 3;

fn combine(a: u64, b: u64) -> u64 {
    splitmix64(a ^ b.rotate_left(23).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Per-vertex anchored WL colors after `WL_ROUNDS` refinements.
fn wl_colors(task: &SubcircuitTask) -> Vec<u64> {
    let adj = task.adjacency();
    let mut colors: Vec<u64> = (0..task.size)
        .map(|v| {
            let anchored = v == task.anchor_a as usize || v == task.anchor_b as usize;
            splitmix64((adj[v].len() as u64) << 1 | anchored as u64)
        })
        .collect();
    let mut next = colors.clone();
    for _ in 0..WL_ROUNDS {
        for v in 0..task.size {
            let mut neigh: Vec<u64> = adj[v].iter().map(|&w| colors[w as usize]).collect();
            neigh.sort_unstable();
            let mut h = splitmix64(colors[v]);
            for c in neigh {
                h = combine(h, c);
            }
            next[v] = h;
        }
        std::mem::swap(&mut colors, &mut next);
    }
    colors
}

/// Digest invariant under anchored isomorphism. Equal digests are necessary
/// but not sufficient for isomorphism; collisions get a counter suffix in the
/// database key.
pub fn wl_hash(task: &SubcircuitTask) -> u64 {
    let mut colors = wl_colors(task);
    colors.sort_unstable();
    let mut h = combine(task.size as u64, task.sub_edges.len() as u64);
    for c in colors {
        h = combine(h, c);
    }
    h
}

// ---------------------------------------------------------------------------
// Anchored isomorphism
// ---------------------------------------------------------------------------

/// Find a bijection of `a` onto `b` that preserves adjacency and sends
/// anchors onto anchors (in either order). Returns the vertex map
/// `a -> b` when one exists.
pub fn are_isomorphic(a: &SubcircuitTask, b: &SubcircuitTask) -> Option<Vec<u16>> {
    if a.size != b.size || a.sub_edges.len() != b.sub_edges.len() {
        return None;
    }
    let ca = wl_colors(a);
    let cb = wl_colors(b);
    let mut sa = ca.clone();
    let mut sb = cb.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    let adj_a = a.adjacency();
    let adj_b = b.adjacency();
    for (ba, bb) in [(b.anchor_a, b.anchor_b), (b.anchor_b, b.anchor_a)] {
        let mut map = vec![u16::MAX; a.size];
        let mut used = vec![false; b.size];
        map[a.anchor_a as usize] = ba;
        used[ba as usize] = true;
        if map[a.anchor_b as usize] == u16::MAX {
            map[a.anchor_b as usize] = bb;
            if used[bb as usize] {
                continue;
            }
            used[bb as usize] = true;
        } else if map[a.anchor_b as usize] != bb {
            continue;
        }
        if ca[a.anchor_a as usize] != cb[ba as usize] || ca[a.anchor_b as usize] != cb[bb as usize]
        {
            continue;
        }
        // Assign remaining vertices most-constrained-first: BFS order from
        // the anchors keeps candidates adjacent to already-mapped vertices.
        let order = assignment_order(a, &adj_a);
        if extend(&order, 0, &adj_a, &adj_b, &ca, &cb, &mut map, &mut used) {
            debug_assert!(verify_mapping(a, b, &map));
            return Some(map);
        }
    }
    None
}

fn assignment_order(a: &SubcircuitTask, adj: &[Vec<u16>]) -> Vec<u16> {
    let mut order = Vec::with_capacity(a.size);
    let mut seen = vec![false; a.size];
    let mut queue = std::collections::VecDeque::new();
    for s in [a.anchor_a, a.anchor_b] {
        if !seen[s as usize] {
            seen[s as usize] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        if v != a.anchor_a && v != a.anchor_b {
            order.push(v);
        }
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    // Disconnected leftovers (possible only in pathological inputs).
    for v in 0..a.size as u16 {
        if !seen[v as usize] {
            order.push(v);
        }
    }
    order
}

#[allow(clippy::too_many_arguments)]
fn extend(
    order: &[u16],
    k: usize,
    adj_a: &[Vec<u16>],
    adj_b: &[Vec<u16>],
    ca: &[u64],
    cb: &[u64],
    map: &mut [u16],
    used: &mut [bool],
) -> bool {
    if k == order.len() {
        return true;
    }
    let v = order[k] as usize;
    for cand in 0..map.len() as u16 {
        if used[cand as usize] || cb[cand as usize] != ca[v] {
            continue;
        }
        if adj_a[v].len() != adj_b[cand as usize].len() {
            continue;
        }
        // Adjacency with every already-mapped vertex must match exactly.
        let consistent = adj_a[v].iter().all(|&w| {
            let mw = map[w as usize];
            mw == u16::MAX || adj_b[cand as usize].contains(&mw)
        }) && adj_b[cand as usize].iter().all(|&w| {
            // Reverse direction: mapped neighbors of the candidate must come
            // from neighbors of v.
            match map.iter().position(|&m| m == w) {
                Some(src) => adj_a[v].contains(&(src as u16)),
                None => true,
            }
        });
        if !consistent {
            continue;
        }
        map[v] = cand;
        used[cand as usize] = true;
        if extend(order, k + 1, adj_a, adj_b, ca, cb, map, used) {
            return true;
        }
        map[v] = u16::MAX;
        used[cand as usize] = false;
    }
    false
}

/// Certify a stored mapping: bijection, anchors onto anchors, adjacency
/// preserved in both directions.
pub fn verify_mapping(a: &SubcircuitTask, b: &SubcircuitTask, map: &[u16]) -> bool {
    if a.size != b.size || map.len() != a.size {
        return false;
    }
    let mut used = vec![false; b.size];
    for &m in map {
        if m == u16::MAX || used[m as usize] {
            return false;
        }
        used[m as usize] = true;
    }
    let (ma, mb) = (map[a.anchor_a as usize], map[a.anchor_b as usize]);
    let anchors_ok =
        (ma == b.anchor_a && mb == b.anchor_b) || (ma == b.anchor_b && mb == b.anchor_a);
    if !anchors_ok {
        return false;
    }
    use std::collections::BTreeSet;
    let eb: BTreeSet<(u16, u16)> = b.sub_edges.iter().copied().collect();
    a.sub_edges.len() == eb.len()
        && a.sub_edges.iter().all(|&(u, v)| {
            let (mut x, mut y) = (map[u as usize], map[v as usize]);
            if x > y {
                std::mem::swap(&mut x, &mut y);
            }
            eb.contains(&(x, y))
        })
}

// ---------------------------------------------------------------------------
// Deduplication database
// ---------------------------------------------------------------------------

/// One member of an isomorphism class: where it came from and how its
/// vertices map into the canonical task's coordinates.
#[derive(Debug, Clone)]
pub struct Member {
    pub origin: (String, u32, u32),
    /// Member-task vertex -> canonical-task vertex.
    pub map: Vec<u16>,
}

/// An anchored-isomorphism equivalence class of subcircuit tasks.
#[derive(Debug, Clone)]
pub struct IsoClass {
    pub canonical: SubcircuitTask,
    /// WL digest plus collision counter, e.g. `a1b2c3..#0`.
    pub key: String,
    pub hash: u64,
    pub members: Vec<Member>,
}

/// Isomorphism database: tasks keyed by anchored WL hash, collisions resolved
/// by counter-suffixed keys and confirmed by a full isomorphism check.
#[derive(Debug, Default)]
pub struct IsoDatabase {
    classes: Vec<IsoClass>,
    index: HashMap<(u64, u32), usize>,
}

impl IsoDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a task, either joining an existing class or founding one.
    /// Returns the class index.
    pub fn insert(&mut self, task: SubcircuitTask) -> usize {
        let h = wl_hash(&task);
        let mut counter = 0u32;
        loop {
            match self.index.get(&(h, counter)) {
                Some(&idx) => {
                    if let Some(map) = are_isomorphic(&task, &self.classes[idx].canonical) {
                        self.classes[idx].members.push(Member {
                            origin: task.origin,
                            map,
                        });
                        return idx;
                    }
                    counter += 1;
                }
                None => {
                    let idx = self.classes.len();
                    self.index.insert((h, counter), idx);
                    let identity: Vec<u16> = (0..task.size as u16).collect();
                    let member = Member {
                        origin: task.origin.clone(),
                        map: identity,
                    };
                    self.classes.push(IsoClass {
                        key: format!("{h:016x}#{counter}"),
                        hash: h,
                        canonical: task,
                        members: vec![member],
                    });
                    return idx;
                }
            }
        }
    }

    /// Fold another database into this one (single-writer merge for
    /// per-thread partial databases).
    pub fn merge(&mut self, other: IsoDatabase) {
        for class in other.classes {
            let canonical = class.canonical.clone();
            let idx = self.insert(canonical);
            // The canonical task entered with an identity member; splice the
            // real member list through its map into our canonical coords.
            let via = self.classes[idx].members.pop().unwrap();
            for m in class.members {
                let map: Vec<u16> = m.map.iter().map(|&x| via.map[x as usize]).collect();
                self.classes[idx].members.push(Member {
                    origin: m.origin,
                    map,
                });
            }
        }
    }

    pub fn classes(&self) -> &[IsoClass] {
        &self.classes
    }

    pub fn into_classes(self) -> Vec<IsoClass> {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Partition tasks into anchored-isomorphism classes.
pub fn dedup_tasks(tasks: Vec<SubcircuitTask>) -> Vec<IsoClass> {
    let mut db = IsoDatabase::new();
    for t in tasks {
        db.insert(t);
    }
    db.into_classes()
}

/// Extract and dedup every correlated pair of one instance.
pub fn instance_classes(inst: &ProblemInstance, p: usize) -> Result<Vec<IsoClass>> {
    let mut db = IsoDatabase::new();
    for (i, j) in correlated_pairs(inst, p) {
        db.insert(subproblem(inst, i, j, p)?);
    }
    Ok(db.into_classes())
}

// ---------------------------------------------------------------------------
// Cache file format: JSON lines, one class per line
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct CacheRow {
    hash: String,
    sub_edges: Vec<(u16, u16)>,
    anchors: (u16, u16),
    member_count: usize,
}

pub fn write_class_cache<W: Write>(classes: &[IsoClass], mut w: W) -> Result<()> {
    for c in classes {
        let row = CacheRow {
            hash: c.key.clone(),
            sub_edges: c.canonical.sub_edges.clone(),
            anchors: (c.canonical.anchor_a, c.canonical.anchor_b),
            member_count: c.members.len(),
        };
        let line = serde_json::to_string(&row).map_err(|e| Error::format(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Read back canonical tasks from a cache file (members are not persisted).
pub fn read_class_cache<R: std::io::Read>(r: R) -> Result<Vec<(String, SubcircuitTask, usize)>> {
    let mut out = Vec::new();
    for line in BufReader::new(r).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: CacheRow =
            serde_json::from_str(&line).map_err(|e| Error::format(e.to_string()))?;
        let size = row
            .sub_edges
            .iter()
            .flat_map(|&(u, v)| [u, v])
            .chain([row.anchors.0, row.anchors.1])
            .max()
            .map(|m| m as usize + 1)
            .unwrap_or(0);
        out.push((
            row.hash,
            SubcircuitTask {
                sub_edges: row.sub_edges,
                size,
                anchor_a: row.anchors.0,
                anchor_b: row.anchors.1,
                origin: (String::new(), 0, 0),
                relabel: Vec::new(),
            },
            row.member_count,
        ));
    }
    Ok(out)
}
