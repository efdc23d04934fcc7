//! Iterative pairwise graph-cut layout optimization.
//!
//! Each iteration picks the least-visited connected server pair `(i, j)`,
//! builds an auxiliary flow network over the vertices currently on `i` or
//! `j`, and reassigns them according to its minimum s-t cut. A candidate is
//! kept only if it strictly lowers the total cost; the search stops after `R`
//! consecutive rejections.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{decompose, total_cost, total_or_inf, CostDecomposition};
use crate::error::OptimizeError;
use crate::flow::{min_st_cut, CutResult, FlowNetwork};
use crate::model::{GraphLayout, Instance, ServerId, VertexId};

/// How the starting layout is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum InitStrategy {
    /// Uniform seeded assignment.
    Random(u64),
    /// Every vertex on the server with the cheapest upload cost.
    UploadFirst,
    /// A caller-provided layout, validated first.
    WarmStart(GraphLayout),
}

/// How ties between equally-visited pairs are broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    LowestIndex,
    SeededRandom(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Consecutive non-improving attempts tolerated before stopping (`R`).
    pub rounds: usize,
    pub init: InitStrategy,
    pub tie_break: TieBreak,
    /// Hard cap on iterations, independent of `rounds`.
    pub max_iterations: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            rounds: 3,
            init: InitStrategy::Random(0),
            tie_break: TieBreak::LowestIndex,
            max_iterations: None,
        }
    }
}

impl OptimizerConfig {
    /// `|D|(|D|-1)/2`, the number of server pairs (at least 1).
    pub fn exhaustive_rounds(n_servers: usize) -> usize {
        (n_servers * n_servers.saturating_sub(1) / 2).max(1)
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn with_init(mut self, init: InitStrategy) -> Self {
        self.init = init;
        self
    }
}

/// Visit counts for every connected unordered server pair.
#[derive(Debug, Clone)]
pub struct VisitCounter {
    counts: BTreeMap<(ServerId, ServerId), u64>,
    rng: Option<ChaCha8Rng>,
}

impl VisitCounter {
    pub fn new(instance: &Instance, tie_break: TieBreak) -> Self {
        let counts = instance.network.connected_pairs().into_iter().map(|p| (p, 0)).collect();
        Self::with_counts(counts, tie_break)
    }

    pub fn with_counts(counts: BTreeMap<(ServerId, ServerId), u64>, tie_break: TieBreak) -> Self {
        let rng = match tie_break {
            TieBreak::LowestIndex => None,
            TieBreak::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        VisitCounter { counts, rng }
    }

    pub fn count(&self, i: ServerId, j: ServerId) -> Option<u64> {
        self.counts.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn counts(&self) -> &BTreeMap<(ServerId, ServerId), u64> {
        &self.counts
    }

    /// Picks a least-visited pair and increments its count.
    pub fn select_pair(&mut self) -> Result<(ServerId, ServerId), OptimizeError> {
        self.select_where(|_, _| true).ok_or(OptimizeError::NoConnectedPairs)
    }

    /// Like [`select_pair`](Self::select_pair) but only among pairs accepted
    /// by `eligible`.
    pub fn select_where(&mut self, eligible: impl Fn(ServerId, ServerId) -> bool) -> Option<(ServerId, ServerId)> {
        let min = self
            .counts
            .iter()
            .filter(|((i, j), _)| eligible(*i, *j))
            .map(|(_, &c)| c)
            .min()?;
        let mut best = self
            .counts
            .iter()
            .filter(|((i, j), &c)| c == min && eligible(*i, *j))
            .map(|(&p, _)| p);
        let pair = match self.rng.as_mut() {
            None => best.next()?,
            Some(rng) => *best.collect::<Vec<_>>().choose(rng)?,
        };
        *self.counts.get_mut(&pair).expect("pair present") += 1;
        Some(pair)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub pair: (ServerId, ServerId),
    pub candidate_cost: f64,
    pub accepted: bool,
    pub best_cost: f64,
    pub r: usize,
}

/// Per-iteration trace of one optimizer run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationLog {
    pub initial_cost: f64,
    pub records: Vec<IterationRecord>,
}

impl IterationLog {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn accepted(&self) -> impl Iterator<Item = &IterationRecord> {
        self.records.iter().filter(|r| r.accepted)
    }

    /// Length of the trailing run of rejected iterations.
    pub fn trailing_rejections(&self) -> usize {
        self.records.iter().rev().take_while(|r| !r.accepted).count()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "iteration,pair_i,pair_j,candidate_cost,accepted,best_cost,r")?;
        for rec in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                rec.iteration, rec.pair.0, rec.pair.1, rec.candidate_cost, rec.accepted, rec.best_cost, rec.r
            )?;
        }
        Ok(())
    }
}

/// Flow network for one server pair plus the bookkeeping needed to read a
/// cut back as a layout.
///
/// Node 0 is server `i` (source), node 1 is server `j` (sink), node `2 + k`
/// is `vertices[k]`. The capacity of `i -> v` is the cost of placing `v` on
/// `i`; when that arc is cut (`v` on the sink side) `v` goes to `i`.
#[derive(Debug, Clone)]
pub struct AuxiliaryGraph {
    pub pair: (ServerId, ServerId),
    pub network: FlowNetwork,
    pub vertices: Vec<VertexId>,
    /// Placement cost of each vertex on `i` / `j`; `None` = infeasible.
    cost_i: Vec<Option<f64>>,
    cost_j: Vec<Option<f64>>,
    /// Vertex-vertex links as indices into `vertices`.
    internal: Vec<(usize, usize)>,
    link_weight: f64,
}

impl AuxiliaryGraph {
    pub fn placement_cost(&self, k: usize, server: ServerId) -> Option<f64> {
        if server == self.pair.0 {
            self.cost_i[k]
        } else {
            self.cost_j[k]
        }
    }

    /// Pairwise energy of a labeling of `vertices`; `+inf` if infeasible.
    fn energy(&self, labels: &[ServerId]) -> f64 {
        let mut e = 0.0;
        for (k, &s) in labels.iter().enumerate() {
            match self.placement_cost(k, s) {
                Some(c) => e += c,
                None => return f64::INFINITY,
            }
        }
        for &(a, b) in &self.internal {
            if labels[a] != labels[b] {
                e += self.link_weight;
            }
        }
        e
    }

    /// Labels read off a cut: sink side goes to `i`, source side to `j`.
    pub fn labels(&self, cut: &CutResult) -> Vec<ServerId> {
        let (i, j) = self.pair;
        (0..self.vertices.len())
            .map(|k| if cut.source_side[k + 2] { j } else { i })
            .collect()
    }
}

/// Builds the auxiliary network for servers `i` and `j` with every live
/// vertex free to move.
pub fn build_auxiliary_graph(
    i: ServerId,
    j: ServerId,
    layout: &GraphLayout,
    instance: &Instance,
    decomposition: &CostDecomposition,
) -> Result<AuxiliaryGraph, OptimizeError> {
    let free: Vec<VertexId> = instance.graph.vertices().collect();
    let mask = vec![true; instance.graph.slot_count()];
    build_restricted(i, j, layout, instance, decomposition, &free, &mask)
}

fn build_restricted(
    i: ServerId,
    j: ServerId,
    layout: &GraphLayout,
    instance: &Instance,
    decomposition: &CostDecomposition,
    free: &[VertexId],
    free_mask: &[bool],
) -> Result<AuxiliaryGraph, OptimizeError> {
    if !instance.network.connected(i, j) {
        return Err(OptimizeError::PairNotConnected(i, j));
    }
    let graph = &instance.graph;
    let vertices: Vec<VertexId> = free
        .iter()
        .copied()
        .filter(|&v| {
            let s = layout.at(v);
            s == i || s == j
        })
        .collect();
    let mut index = BTreeMap::new();
    for (k, &v) in vertices.iter().enumerate() {
        index.insert(v, k);
    }
    let in_aux = |u: VertexId| free_mask[u] && index.contains_key(&u);

    let link_weight = decomposition.pairwise(i, j).expect("connected pair");
    let mut cost_i = Vec::with_capacity(vertices.len());
    let mut cost_j = Vec::with_capacity(vertices.len());
    let mut internal = Vec::new();
    for (k, &v) in vertices.iter().enumerate() {
        let mut ci = Some(decomposition.unary(v, i));
        let mut cj = Some(decomposition.unary(v, j));
        for &u in graph.neighbors(v) {
            if in_aux(u) {
                if u > v {
                    internal.push((k, index[&u]));
                }
                continue;
            }
            // side-effect: traffic towards a neighbor that stays put
            let su = layout.at(u);
            ci = ci.zip(decomposition.pairwise(i, su)).map(|(a, b)| a + b);
            cj = cj.zip(decomposition.pairwise(j, su)).map(|(a, b)| a + b);
        }
        cost_i.push(ci);
        cost_j.push(cj);
    }

    let finite_sum: f64 = cost_i.iter().chain(&cost_j).flatten().sum::<f64>() + link_weight * internal.len() as f64;
    let forced = 1.0 + 2.0 * finite_sum;
    let mut network = FlowNetwork::new(vertices.len() + 2, 0, 1);
    for k in 0..vertices.len() {
        network.add_arc(0, k + 2, cost_i[k].unwrap_or(forced));
        network.add_arc(k + 2, 1, cost_j[k].unwrap_or(forced));
    }
    for &(a, b) in &internal {
        network.add_undirected(a + 2, b + 2, link_weight);
    }
    Ok(AuxiliaryGraph {
        pair: (i, j),
        network,
        vertices,
        cost_i,
        cost_j,
        internal,
        link_weight,
    })
}

/// Applies the cut to `prev_layout`; vertices outside the auxiliary graph
/// keep their server.
pub fn cut_to_layout(cut: &CutResult, aux: &AuxiliaryGraph, prev_layout: &GraphLayout) -> GraphLayout {
    let mut layout = prev_layout.clone();
    for (&v, s) in aux.vertices.iter().zip(aux.labels(cut)) {
        layout.set(v, s);
    }
    layout
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (k, x) in values.enumerate() {
        if x < best.1 {
            best = (k, x);
        }
    }
    best.0
}

/// Server with the lowest upload cost for `v`, lowest index on ties.
pub(crate) fn upload_first_server(instance: &Instance, v: VertexId) -> ServerId {
    argmin(instance.upload_row(v).iter().copied())
}

pub fn init_layout(instance: &Instance, strategy: &InitStrategy) -> Result<GraphLayout, OptimizeError> {
    let n = instance.n_servers();
    let mut layout = GraphLayout::new(vec![None; instance.graph.slot_count()]);
    match strategy {
        InitStrategy::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for v in instance.graph.vertices() {
                layout.set(v, rng.random_range(0..n));
            }
        }
        InitStrategy::UploadFirst => {
            for v in instance.graph.vertices() {
                layout.set(v, upload_first_server(instance, v));
            }
        }
        InitStrategy::WarmStart(warm) => {
            warm.validate(instance).map_err(OptimizeError::InvalidWarmStart)?;
            layout = warm.restricted_to(&instance.graph);
        }
    }
    Ok(layout)
}

/// Runs the optimizer from the strategy in `config`.
pub fn optimize(instance: &Instance, config: &OptimizerConfig) -> Result<(GraphLayout, IterationLog), OptimizeError> {
    let start = init_layout(instance, &config.init)?;
    let decomposition = decompose(instance);
    let free: Vec<VertexId> = instance.graph.vertices().collect();
    optimize_from(instance, &decomposition, start, &free, config)
}

/// Core loop. Only vertices in `free` may move; all other live vertices
/// keep their server in `start` and act as fixed context.
pub(crate) fn optimize_from(
    instance: &Instance,
    decomposition: &CostDecomposition,
    start: GraphLayout,
    free: &[VertexId],
    config: &OptimizerConfig,
) -> Result<(GraphLayout, IterationLog), OptimizeError> {
    if config.rounds == 0 {
        return Err(OptimizeError::InvalidRounds);
    }
    start.validate(instance)?;
    let n = instance.n_servers();
    let mut layout = start;
    let mut cost = total_or_inf(&layout, instance);
    let mut log = IterationLog {
        initial_cost: cost,
        records: Vec::new(),
    };
    if n <= 1 || free.is_empty() {
        return finish(layout, cost, log, instance);
    }

    let mut visits = VisitCounter::new(instance, config.tie_break);
    if visits.counts().is_empty() {
        return Err(OptimizeError::NoConnectedPairs);
    }
    let mut free_mask = vec![false; instance.graph.slot_count()];
    let mut free_on = vec![0usize; n];
    for &v in free {
        free_mask[v] = true;
        free_on[layout.at(v)] += 1;
    }

    let mut r = 0;
    while r < config.rounds {
        if config.max_iterations.is_some_and(|cap| log.records.len() >= cap) {
            break;
        }
        let Some((i, j)) = visits.select_where(|i, j| free_on[i] + free_on[j] > 0) else {
            break;
        };
        let aux = build_restricted(i, j, &layout, instance, decomposition, free, &free_mask)?;
        let cut = min_st_cut(&aux.network);
        let old: Vec<ServerId> = aux.vertices.iter().map(|&v| layout.at(v)).collect();
        let new = aux.labels(&cut);

        let mut accepted = false;
        let candidate_cost = if old == new {
            cost
        } else {
            let delta = aux.energy(&new) - aux.energy(&old);
            if cost.is_finite() && delta >= 0.0 {
                cost + delta
            } else {
                let candidate = cut_to_layout(&cut, &aux, &layout);
                let c = total_or_inf(&candidate, instance);
                if c < cost {
                    accepted = true;
                    for (&v, (&a, &b)) in aux.vertices.iter().zip(old.iter().zip(&new)) {
                        if a != b {
                            free_on[a] -= 1;
                            free_on[b] += 1;
                        }
                        debug_assert_eq!(candidate.at(v), b);
                    }
                    layout = candidate;
                    cost = c;
                }
                c
            }
        };
        r = if accepted { 0 } else { r + 1 };
        log.records.push(IterationRecord {
            iteration: log.records.len() + 1,
            pair: (i, j),
            candidate_cost,
            accepted,
            best_cost: cost,
            r,
        });
    }
    finish(layout, cost, log, instance)
}

fn finish(
    layout: GraphLayout,
    cost: f64,
    log: IterationLog,
    instance: &Instance,
) -> Result<(GraphLayout, IterationLog), OptimizeError> {
    if !cost.is_finite() {
        total_cost(&layout, instance)?;
    }
    Ok((layout, log))
}
