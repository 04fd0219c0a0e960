//! Exact maximum intersecting families.
//!
//! Intersecting families are the independent sets of the disjointness graph
//! (members adjacent iff vertex-disjoint), so the maximum is found as a
//! maximum clique of the intersection graph. The search is a bitset
//! branch-and-bound whose bound is a greedy colouring of the candidate set;
//! each colour class is a set of pairwise disjoint members, and an
//! intersecting family takes at most one member from each class.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use log::debug;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::Bitset;
use crate::count::{family_size, star_size};
use crate::error::{Error, Result};
use crate::matching::{enumerate_family, Family, MatchingGraph, Signature, Subgraph, Vertex};

/// Default ceiling on disjointness-graph vertices.
pub const DEFAULT_GRAPH_CAP: usize = 8192;

pub struct DisjointnessGraph {
    masks: Vec<u64>,
    adj: Vec<Bitset>,
}

impl DisjointnessGraph {
    /// Builds the graph over arbitrary vertex-set masks, kept in the given order.
    pub fn from_masks(masks: Vec<u64>, cap: usize) -> Result<DisjointnessGraph> {
        if masks.len() > cap {
            return Err(Error::CapExceeded {
                what: "disjointness graph",
                needed: masks.len() as u128,
                cap: cap as u128,
            });
        }
        let len = masks.len();
        let mut adj = vec![Bitset::new(len); len];
        for i in 0..len {
            for j in i + 1..len {
                if masks[i] & masks[j] == 0 {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        Ok(DisjointnessGraph { masks, adj })
    }

    /// Graph over `H^(p,s)(n)` in canonical enumeration order.
    pub fn for_family(n: usize, sig: Signature, cap: usize) -> Result<DisjointnessGraph> {
        let size: u128 = family_size(n, sig)?;
        if size > cap as u128 {
            return Err(Error::CapExceeded {
                what: "disjointness graph",
                needed: size,
                cap: cap as u128,
            });
        }
        let masks = enumerate_family(n, sig)?.map(|f| u64::from(f.mask())).collect();
        DisjointnessGraph::from_masks(masks, cap)
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn disjoint(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Bitset::count).sum::<usize>() / 2
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| a != b && !self.disjoint(a, b)))
    }

    /// Indices of members containing every bit of `mask`.
    pub fn members_containing(&self, mask: u64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.masks[i] & mask == mask).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Worker threads for the root split; 1 runs the plain sequential search,
    /// 0 uses the global rayon pool.
    pub threads: usize,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            threads: 1,
            node_limit: None,
            time_limit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisResult {
    pub size: usize,
    /// Sorted member indices.
    pub witness: Vec<usize>,
    /// False when a node or time limit cut the search short; `size` is then
    /// only a lower bound.
    pub exact: bool,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisEnumeration {
    /// Sorted list of sorted index sets.
    pub sets: Vec<Vec<usize>>,
    pub complete: bool,
    pub nodes: u64,
}

#[derive(Clone, Copy)]
enum Mode {
    /// Prune unless a strictly larger set can still be reached.
    Improve,
    /// Collect every independent set of exactly the target size.
    Collect { target: usize, cap: usize },
}

struct Shared {
    best: AtomicUsize,
    found: AtomicUsize,
    nodes: AtomicU64,
    stop: AtomicBool,
    truncated: AtomicBool,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
}

impl Shared {
    fn new(best: usize, opts: &SolverOptions) -> Shared {
        Shared {
            best: AtomicUsize::new(best),
            found: AtomicUsize::new(0),
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
            truncated: AtomicBool::new(false),
            node_limit: opts.node_limit,
            deadline: opts.time_limit.map(|d| Instant::now() + d),
        }
    }

    fn halt(&self) {
        self.truncated.store(true, Ordering::Relaxed);
        self.stop.store(true, Ordering::Relaxed);
    }
}

const NODE_BATCH: u64 = 1024;

struct Worker<'a> {
    graph: &'a DisjointnessGraph,
    shared: &'a Shared,
    mode: Mode,
    current: Vec<usize>,
    witness: Vec<usize>,
    found: Vec<Vec<usize>>,
    pending_nodes: u64,
}

impl<'a> Worker<'a> {
    fn new(graph: &'a DisjointnessGraph, shared: &'a Shared, mode: Mode) -> Worker<'a> {
        Worker {
            graph,
            shared,
            mode,
            current: Vec::new(),
            witness: Vec::new(),
            found: Vec::new(),
            pending_nodes: 0,
        }
    }

    fn stopped(&self) -> bool {
        self.shared.stop.load(Ordering::Relaxed)
    }

    fn tick(&mut self) {
        self.pending_nodes += 1;
        if self.pending_nodes == NODE_BATCH {
            self.flush_nodes();
            let total = self.shared.nodes.load(Ordering::Relaxed);
            if self.shared.node_limit.is_some_and(|lim| total >= lim)
                || self.shared.deadline.is_some_and(|d| Instant::now() >= d)
            {
                self.shared.halt();
            }
        }
    }

    fn flush_nodes(&mut self) {
        self.shared.nodes.fetch_add(self.pending_nodes, Ordering::Relaxed);
        self.pending_nodes = 0;
    }

    /// Smallest colour a branch vertex needs to be worth expanding.
    fn threshold(&self) -> usize {
        let depth = self.current.len();
        match self.mode {
            Mode::Improve => (self.shared.best.load(Ordering::Relaxed) + 1).saturating_sub(depth),
            Mode::Collect { target, .. } => target.saturating_sub(depth),
        }
    }

    /// Greedy sequential colouring; returns the vertices whose colour reaches
    /// `kmin`, in nondecreasing colour order.
    fn color_sort(&self, p: &Bitset, kmin: usize) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = p.clone();
        let mut order = Vec::new();
        let mut colors = Vec::new();
        let mut k = 0;
        while !uncolored.is_empty() {
            k += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                uncolored.remove(v);
                q.remove(v);
                q.intersect_with(&self.graph.adj[v]);
                if k >= kmin {
                    order.push(v);
                    colors.push(k);
                }
            }
        }
        (order, colors)
    }

    fn record(&mut self) {
        let size = self.current.len();
        match self.mode {
            Mode::Improve => {
                if self.shared.best.fetch_max(size, Ordering::Relaxed) < size {
                    self.witness = self.current.clone();
                }
            }
            Mode::Collect { target, cap } => {
                if size >= target {
                    let mut set = self.current.clone();
                    set.sort_unstable();
                    self.found.push(set);
                    if self.shared.found.fetch_add(1, Ordering::Relaxed) + 1 >= cap {
                        self.shared.halt();
                    }
                }
            }
        }
    }

    /// Explores `v` with candidate set `p` (which still contains `v`).
    fn branch(&mut self, p: &Bitset, v: usize) {
        self.current.push(v);
        let mut next = p.clone();
        next.difference_with(&self.graph.adj[v]);
        next.remove(v);
        if next.is_empty() {
            self.record();
        } else {
            self.expand(next);
        }
        self.current.pop();
    }

    fn expand(&mut self, mut p: Bitset) {
        self.tick();
        if self.stopped() {
            return;
        }
        let (order, colors) = self.color_sort(&p, self.threshold());
        for idx in (0..order.len()).rev() {
            if self.stopped() || colors[idx] < self.threshold() {
                return;
            }
            let v = order[idx];
            self.branch(&p, v);
            p.remove(v);
        }
    }
}

fn run_search<'a>(
    graph: &'a DisjointnessGraph,
    shared: &'a Shared,
    mode: Mode,
    opts: &SolverOptions,
) -> Vec<Worker<'a>> {
    let root = Bitset::full(graph.len());
    if graph.is_empty() {
        return Vec::new();
    }
    if opts.threads == 1 {
        let mut worker = Worker::new(graph, shared, mode);
        worker.expand(root);
        worker.flush_nodes();
        return vec![worker];
    }
    // Root split: branch `idx` sees exactly the candidates the sequential
    // loop would, so every branch is an independent task.
    let probe = Worker::new(graph, shared, mode);
    let (order, colors) = probe.color_sort(&root, probe.threshold());
    shared.nodes.fetch_add(1, Ordering::Relaxed);
    let tasks: Vec<usize> = (0..order.len()).rev().collect();
    let job = |&idx: &usize| {
        let mut worker = Worker::new(graph, shared, mode);
        if !worker.stopped() && colors[idx] >= worker.threshold() {
            let mut p = root.clone();
            for &later in &order[idx + 1..] {
                p.remove(later);
            }
            worker.branch(&p, order[idx]);
        }
        worker.flush_nodes();
        worker
    };
    if opts.threads == 0 {
        tasks.par_iter().map(job).collect()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build() {
            Ok(pool) => pool.install(|| tasks.par_iter().map(job).collect()),
            Err(_) => tasks.par_iter().map(job).collect(),
        }
    }
}

/// Partition into pairwise-disjoint classes by iterated greedy: each pass
/// re-runs first-fit over the previous classes taken as blocks, which can
/// only keep or lower the class count. Classes come back largest first.
fn disjoint_cover(graph: &DisjointnessGraph) -> Vec<Vec<usize>> {
    let first_fit = |order: &mut dyn Iterator<Item = usize>| {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut unions: Vec<u64> = Vec::new();
        for v in order {
            let m = graph.masks[v];
            match unions.iter().position(|&u| u & m == 0) {
                Some(c) => {
                    classes[c].push(v);
                    unions[c] |= m;
                }
                None => {
                    classes.push(vec![v]);
                    unions.push(m);
                }
            }
        }
        classes
    };
    let mut classes = first_fit(&mut (0..graph.len()));
    let passes = if graph.len() <= 2048 { 400 } else { 40 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for pass in 0..passes {
        match pass % 3 {
            0 => classes.reverse(),
            1 => classes.sort_by_key(|c| std::cmp::Reverse(c.len())),
            _ => classes.shuffle(&mut rng),
        }
        let next = first_fit(&mut classes.iter().flatten().copied());
        debug_assert!(next.len() <= classes.len());
        classes = next;
    }
    classes.sort_by_key(|c| std::cmp::Reverse(c.len()));
    classes
}

/// The graph renumbered so that a good disjoint cover is contiguous, which
/// the in-search greedy colouring then tends to reproduce. Returns the
/// renumbered graph and `old[new]`.
fn cover_ordered(graph: &DisjointnessGraph) -> (DisjointnessGraph, Vec<usize>) {
    let old: Vec<usize> = disjoint_cover(graph).into_iter().flatten().collect();
    let masks = old.iter().map(|&i| graph.masks[i]).collect();
    let mut new_of = vec![0; old.len()];
    for (new, &o) in old.iter().enumerate() {
        new_of[o] = new;
    }
    let adj = old
        .iter()
        .map(|&o| {
            let mut row = Bitset::new(old.len());
            for j in graph.adj[o].iter() {
                row.insert(new_of[j]);
            }
            row
        })
        .collect();
    (DisjointnessGraph { masks, adj }, old)
}

/// Maximum independent set. `seed` must be independent; it becomes the
/// starting incumbent and is returned if nothing larger exists.
pub fn maximum_independent_set(graph: &DisjointnessGraph, seed: &[usize], opts: &SolverOptions) -> MisResult {
    debug_assert!(graph.is_independent(seed));
    let (ordered, old) = cover_ordered(graph);
    let shared = Shared::new(seed.len(), opts);
    let workers = run_search(&ordered, &shared, Mode::Improve, opts);
    let size = shared.best.load(Ordering::Relaxed);
    let mut witness = workers
        .into_iter()
        .map(|w| {
            let mut set: Vec<usize> = w.witness.iter().map(|&i| old[i]).collect();
            set.sort_unstable();
            set
        })
        .filter(|w| w.len() == size && size > seed.len())
        .min()
        .unwrap_or_else(|| seed.to_vec());
    witness.sort_unstable();
    MisResult {
        size,
        witness,
        exact: !shared.truncated.load(Ordering::Relaxed),
        nodes: shared.nodes.load(Ordering::Relaxed),
    }
}

/// Every independent set of size `target` (which must be the maximum), up
/// to `cap` of them.
pub fn maximum_independent_sets(
    graph: &DisjointnessGraph,
    target: usize,
    cap: usize,
    opts: &SolverOptions,
) -> MisEnumeration {
    if cap == 0 {
        return MisEnumeration {
            sets: Vec::new(),
            complete: false,
            nodes: 0,
        };
    }
    if graph.is_empty() {
        // the empty family is the one maximum subfamily
        return MisEnumeration {
            sets: vec![Vec::new()],
            complete: true,
            nodes: 0,
        };
    }
    let (ordered, old) = cover_ordered(graph);
    let shared = Shared::new(0, opts);
    let workers = run_search(&ordered, &shared, Mode::Collect { target, cap }, opts);
    let mut sets: Vec<Vec<usize>> = workers
        .into_iter()
        .flat_map(|w| w.found)
        .map(|set| {
            let mut set: Vec<usize> = set.iter().map(|&i| old[i]).collect();
            set.sort_unstable();
            set
        })
        .collect();
    sets.sort_unstable();
    let complete = !shared.truncated.load(Ordering::Relaxed);
    if !complete {
        sets.truncate(cap);
    }
    MisEnumeration {
        sets,
        complete,
        nodes: shared.nodes.load(Ordering::Relaxed),
    }
}

/// Relation of a family to the stars of the ambient family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "centers")]
pub enum StarStatus<V> {
    /// Equal to the full star at this point (lowest one if several).
    Star(V),
    /// Every member contains these points, but the family is a proper subset
    /// of each of their stars.
    SubStar(Vec<V>),
    /// No common point, or the family is empty.
    None,
}

impl<V> StarStatus<V> {
    pub fn is_star(&self) -> bool {
        matches!(self, StarStatus::Star(_))
    }
}

/// Star test over raw masks: `family` against the ambient member list.
pub fn star_status_masks(family: &[u64], ambient: &[u64]) -> StarStatus<u32> {
    if family.is_empty() {
        return StarStatus::None;
    }
    let common = family.iter().fold(u64::MAX, |acc, m| acc & m);
    if common == 0 {
        return StarStatus::None;
    }
    let mut centers = Vec::new();
    let mut rest = common;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        let star = ambient.iter().filter(|&&m| m & (1 << bit) != 0).count();
        if star == family.len() {
            return StarStatus::Star(bit);
        }
        centers.push(bit);
    }
    StarStatus::SubStar(centers)
}

/// Star test for a family of `H^(p,s)(n)` members (signature taken from the
/// members themselves).
pub fn is_star(family: &Family) -> Result<StarStatus<Vertex>> {
    let Some(sig) = family.uniform_signature() else {
        return Ok(StarStatus::None);
    };
    let ambient: Vec<u64> = enumerate_family(family.n(), sig)?
        .map(|f| u64::from(f.mask()))
        .collect();
    let masks: Vec<u64> = family.iter().map(|f| u64::from(f.mask())).collect();
    Ok(match star_status_masks(&masks, &ambient) {
        StarStatus::Star(slot) => StarStatus::Star(Vertex::from_slot(slot as usize)),
        StarStatus::SubStar(slots) => {
            StarStatus::SubStar(slots.into_iter().map(|s| Vertex::from_slot(s as usize)).collect())
        }
        StarStatus::None => StarStatus::None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strong {
    True,
    False,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct VerdictOptions {
    /// Cap on enumerated maximum families; `None` means ten per ground-set point.
    pub cap: Option<usize>,
    /// Witness families kept in the verdict.
    pub witness_limit: usize,
    pub solver: SolverOptions,
    pub graph_cap: usize,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions {
            cap: None,
            witness_limit: 4,
            solver: SolverOptions::default(),
            graph_cap: DEFAULT_GRAPH_CAP,
        }
    }
}

/// Outcome of an exact EKR check, with families as sorted mask lists.
#[derive(Clone, Debug, Serialize)]
pub struct EkrVerdict {
    pub family_size: usize,
    pub max_size: usize,
    /// Largest star size over all points of the ground set.
    pub star_size: usize,
    /// Lowest point whose star attains `star_size`.
    pub star_center: u32,
    pub exact: bool,
    pub ekr: bool,
    pub strongly_ekr: Strong,
    pub maximum_families_found: usize,
    pub enumeration_complete: bool,
    #[serde(skip)]
    pub witnesses: Vec<Vec<u64>>,
    #[serde(skip)]
    pub non_star_witness: Option<Vec<u64>>,
    pub nodes: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// EKR verdict over an arbitrary ground set: `masks` are the members,
/// `points` the number of ground-set points (bits).
pub fn ekr_verdict_masks(masks: Vec<u64>, points: usize, opts: &VerdictOptions) -> Result<EkrVerdict> {
    let start = Instant::now();
    let graph = DisjointnessGraph::from_masks(masks, opts.graph_cap)?;
    let (star_center, star) = (0..points as u32)
        .map(|x| (x, graph.members_containing(1 << x)))
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .unwrap_or((0, Vec::new()));
    let star_size = star.len();

    let mis = maximum_independent_set(&graph, &star, &opts.solver);
    debug!(
        "max intersecting {} (star {}) over {} members, {} nodes",
        mis.size,
        star_size,
        graph.len(),
        mis.nodes
    );
    let mut nodes = mis.nodes;
    let (strongly_ekr, found, complete, witnesses, non_star) = if mis.exact {
        let cap = opts.cap.unwrap_or(10 * points);
        let all = maximum_independent_sets(&graph, mis.size, cap, &opts.solver);
        nodes += all.nodes;
        let as_masks = |set: &Vec<usize>| -> Vec<u64> {
            let mut m: Vec<u64> = set.iter().map(|&i| graph.masks()[i]).collect();
            m.sort_unstable();
            m
        };
        let non_star = all
            .sets
            .iter()
            .find(|set| !star_status_masks(&as_masks(set), graph.masks()).is_star())
            .map(as_masks);
        let strong = match (&non_star, all.complete) {
            (Some(_), _) => Strong::False,
            (None, true) => Strong::True,
            (None, false) => Strong::Unknown,
        };
        let witnesses = all.sets.iter().take(opts.witness_limit).map(as_masks).collect();
        (strong, all.sets.len(), all.complete, witnesses, non_star)
    } else {
        let mut w: Vec<u64> = mis.witness.iter().map(|&i| graph.masks()[i]).collect();
        w.sort_unstable();
        (Strong::Unknown, 0, false, vec![w], None)
    };

    Ok(EkrVerdict {
        family_size: graph.len(),
        max_size: mis.size,
        star_size,
        star_center,
        exact: mis.exact,
        ekr: mis.exact && mis.size <= star_size,
        strongly_ekr,
        maximum_families_found: found,
        enumeration_complete: complete,
        witnesses,
        non_star_witness: non_star,
        nodes,
        elapsed: start.elapsed(),
    })
}

/// Verdict for `H^(p,s)(n)`.
#[derive(Clone, Debug, Serialize)]
pub struct MatchingVerdict {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    #[serde(flatten)]
    pub verdict: EkrVerdict,
}

impl MatchingVerdict {
    pub fn signature(&self) -> Signature {
        Signature::new(self.p, self.s)
    }

    pub fn witness_families(&self) -> Vec<Family> {
        self.verdict.witnesses.iter().map(|w| self.to_family(w)).collect()
    }

    pub fn non_star_family(&self) -> Option<Family> {
        self.verdict.non_star_witness.as_ref().map(|w| self.to_family(w))
    }

    fn to_family(&self, masks: &[u64]) -> Family {
        let members = masks
            .iter()
            .map(|&m| Subgraph::from_mask(self.n, m as u32).expect("member of M_n"))
            .collect();
        Family::new(self.n, members).expect("members share n")
    }
}

pub fn ekr_verdict(n: usize, sig: Signature, opts: &VerdictOptions) -> Result<MatchingVerdict> {
    let graph = MatchingGraph::new(n)?;
    let size: u128 = family_size(n, sig)?;
    if size > opts.graph_cap as u128 {
        return Err(Error::CapExceeded {
            what: "disjointness graph",
            needed: size,
            cap: opts.graph_cap as u128,
        });
    }
    let masks = enumerate_family(n, sig)?.map(|f| u64::from(f.mask())).collect();
    let verdict = ekr_verdict_masks(masks, graph.vertex_count(), opts)?;
    debug_assert_eq!(verdict.star_size as u128, star_size::<u128>(n, sig)?);
    Ok(MatchingVerdict {
        n,
        p: sig.p,
        s: sig.s,
        verdict,
    })
}

/// Maximum intersecting family size and one witness.
pub fn max_intersecting(n: usize, sig: Signature, opts: &SolverOptions) -> Result<(MisResult, Family)> {
    let graph = DisjointnessGraph::for_family(n, sig, DEFAULT_GRAPH_CAP)?;
    let seed = graph.members_containing(1);
    let mis = maximum_independent_set(&graph, &seed, opts);
    let members = mis
        .witness
        .iter()
        .map(|&i| Subgraph::from_mask(n, graph.masks()[i] as u32))
        .collect::<Result<Vec<_>>>()?;
    Ok((mis, Family::new(n, members)?))
}

/// Every maximum intersecting family (up to `cap`) and whether the list is
/// exhaustive.
pub fn all_maximum_families(n: usize, sig: Signature, cap: usize, opts: &SolverOptions) -> Result<(Vec<Family>, bool)> {
    let (mis, _) = max_intersecting(n, sig, opts)?;
    let graph = DisjointnessGraph::for_family(n, sig, DEFAULT_GRAPH_CAP)?;
    let all = maximum_independent_sets(&graph, mis.size, cap, opts);
    let families = all
        .sets
        .iter()
        .map(|set| {
            let members = set
                .iter()
                .map(|&i| Subgraph::from_mask(n, graph.masks()[i] as u32))
                .collect::<Result<Vec<_>>>()?;
            Family::new(n, members)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((families, all.complete && mis.exact))
}

/// Verdicts for many instances; rows run concurrently and come back in input
/// order. Failing rows keep their error in place.
pub fn sweep(
    instances: &[(usize, Signature)],
    opts: &VerdictOptions,
    row_threads: usize,
) -> Vec<Result<MatchingVerdict>> {
    let row = |&(n, sig): &(usize, Signature)| ekr_verdict(n, sig, opts);
    if row_threads == 1 {
        return instances.iter().map(row).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(row_threads).build() {
        Ok(pool) => pool.install(|| instances.par_iter().map(row).collect()),
        Err(_) => instances.iter().map(row).collect(),
    }
}
