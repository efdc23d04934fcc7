//! Evolving graphs: topology events, incremental re-optimization, drift
//! estimation and the adaptive choice between incremental and global updates.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cost::{decompose, total_cost, total_or_inf, vertex_compute_cost, CostBreakdown};
use crate::error::{ModelError, OptimizeError, TimelineError};
use crate::model::{DataGraph, GraphLayout, Instance, ServerId, VertexId, VertexInfo};
use crate::optimize::{optimize_from, upload_first_server, OptimizerConfig};

/// One topological change between consecutive slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvolutionEvent {
    VertexInsert {
        /// Must be the next unused vertex id.
        vertex: VertexId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coords: Option<[f64; 2]>,
        upload_cost: Vec<f64>,
        #[serde(default)]
        links: Vec<VertexId>,
    },
    VertexDelete {
        vertex: VertexId,
    },
    LinkInsert {
        u: VertexId,
        v: VertexId,
    },
    LinkDelete {
        u: VertexId,
        v: VertexId,
    },
}

impl EvolutionEvent {
    pub fn is_deletion(&self) -> bool {
        matches!(self, EvolutionEvent::VertexDelete { .. } | EvolutionEvent::LinkDelete { .. })
    }
}

/// Ordered events turning the graph of slot `slot - 1` into that of `slot`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SlotTrace {
    pub slot: usize,
    pub events: Vec<EvolutionEvent>,
}

fn apply_one(graph: &mut DataGraph, event: &EvolutionEvent) -> Result<(), ModelError> {
    match event {
        EvolutionEvent::VertexInsert {
            vertex, coords, links, ..
        } => {
            let expected = graph.slot_count();
            if *vertex != expected {
                return Err(ModelError::NonDenseVertexId {
                    got: *vertex,
                    expected,
                });
            }
            graph.insert_vertex(VertexInfo {
                name: vertex.to_string(),
                coords: *coords,
            });
            for &u in links {
                graph.insert_link(*vertex, u)?;
            }
            Ok(())
        }
        EvolutionEvent::VertexDelete { vertex } => graph.remove_vertex(*vertex),
        EvolutionEvent::LinkInsert { u, v } => graph.insert_link(*u, *v),
        EvolutionEvent::LinkDelete { u, v } => graph.remove_link(*u, *v),
    }
}

/// Applies `events` in order to a copy of `graph`.
pub fn apply_events(graph: &DataGraph, events: &[EvolutionEvent]) -> Result<DataGraph, ModelError> {
    let mut g = graph.clone();
    for e in events {
        apply_one(&mut g, e)?;
    }
    Ok(g)
}

/// Applies `events` to the instance's graph, appending upload-cost rows for
/// inserted vertices.
pub fn evolve_instance(instance: &Instance, events: &[EvolutionEvent]) -> Result<Instance, ModelError> {
    let graph = apply_events(&instance.graph, events)?;
    let mut upload = instance.upload_matrix();
    for e in events {
        if let EvolutionEvent::VertexInsert { upload_cost, .. } = e {
            upload.push(upload_cost.clone());
        }
    }
    instance.with_graph(graph, upload)
}

/// Vertices that are new in `new_graph`, or gained a link to a vertex that
/// `prev_layout` places on a different server. Ascending order.
pub fn filter_affected(prev_graph: &DataGraph, new_graph: &DataGraph, prev_layout: &GraphLayout) -> Vec<VertexId> {
    let mut affected = vec![false; new_graph.slot_count()];
    for v in new_graph.vertices() {
        if !prev_graph.is_active(v) {
            affected[v] = true;
        }
    }
    for (u, v) in new_graph.links() {
        if prev_graph.has_link(u, v) {
            continue;
        }
        if let (true, true) = (prev_graph.is_active(u), prev_graph.is_active(v)) {
            if prev_layout.server(u) != prev_layout.server(v) {
                affected[u] = true;
                affected[v] = true;
            }
        }
    }
    (0..affected.len()).filter(|&v| affected[v]).collect()
}

/// Surviving vertices keep their server; new vertices go to their cheapest
/// upload server.
pub fn extend_layout(prev_layout: &GraphLayout, instance: &Instance) -> GraphLayout {
    let mut layout = GraphLayout::new(vec![None; instance.graph.slot_count()]);
    for v in instance.graph.vertices() {
        let s = prev_layout
            .server(v)
            .unwrap_or_else(|| upload_first_server(instance, v));
        layout.set(v, s);
    }
    layout
}

/// Re-optimizes only the affected vertices, holding every other vertex at its
/// previous server.
pub fn incremental_update(
    instance: &Instance,
    prev_graph: &DataGraph,
    prev_layout: &GraphLayout,
    config: &OptimizerConfig,
) -> Result<GraphLayout, OptimizeError> {
    let free = filter_affected(prev_graph, &instance.graph, prev_layout);
    let start = extend_layout(prev_layout, instance);
    if free.is_empty() {
        return Ok(start);
    }
    let decomposition = decompose(instance);
    let (layout, _) = optimize_from(instance, &decomposition, start, &free, config)?;
    Ok(layout)
}

fn placement_cost(instance: &Instance, v: VertexId, i: ServerId) -> f64 {
    instance.upload(v, i) + vertex_compute_cost(v, i, instance) + instance.network.server(i).rho
}

/// Upper-bound estimate of the drift between incremental and global
/// re-optimization for the step `prev_graph -> instance.graph`.
///
/// Unchanged vertices keep the cost they had under `prev_layout`, deletions
/// are ignored, inserted links pay traffic between their endpoints' servers
/// and each inserted vertex is charged on its most expensive server.
pub fn estimate_drift_bound(
    prev_graph: &DataGraph,
    prev_layout: &GraphLayout,
    prev_cost: f64,
    instance: &Instance,
) -> f64 {
    let graph = &instance.graph;
    let n = instance.n_servers();
    let mut placed = prev_layout.clone();
    let mut value = prev_cost;
    for v in graph.vertices().filter(|&v| !prev_graph.is_active(v)) {
        let mut worst = (0, f64::NEG_INFINITY);
        for i in 0..n {
            let c = placement_cost(instance, v, i);
            if c > worst.1 {
                worst = (i, c);
            }
        }
        placed.set(v, worst.0);
        value += worst.1;
    }
    for (u, v) in graph.links() {
        if prev_graph.has_link(u, v) {
            continue;
        }
        let (i, j) = (placed.at(u), placed.at(v));
        if i != j {
            match instance.network.traffic(i, j) {
                Some(t) => value += 2.0 * t,
                None => return f64::INFINITY,
            }
        }
    }
    (value - prev_cost).max(0.0)
}

/// Which optimizer the adaptive scheduler picks for a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Incremental,
    Global,
}

/// Running state of the adaptive scheduler.
#[derive(Debug, Clone)]
pub struct TimelineState {
    pub t: usize,
    pub instance: Instance,
    pub layout: GraphLayout,
    pub cost: f64,
    pub drift_accumulator: f64,
    pub theta: f64,
    pub history: Vec<SlotRecord>,
}

impl TimelineState {
    pub fn new(instance: Instance, layout: GraphLayout, theta: f64) -> Self {
        let cost = total_or_inf(&layout, &instance);
        TimelineState {
            t: 0,
            instance,
            layout,
            cost,
            drift_accumulator: 0.0,
            theta,
            history: Vec::new(),
        }
    }

    /// Adds the drift estimate for the step to `next` and picks incremental
    /// while the accumulated drift stays within `theta`.
    pub fn schedule(&mut self, next: &Instance) -> (Decision, f64) {
        let estimate = estimate_drift_bound(&self.instance.graph, &self.layout, self.cost, next);
        (self.decide(estimate), estimate)
    }

    pub fn decide(&mut self, estimate: f64) -> Decision {
        self.drift_accumulator += estimate;
        if self.drift_accumulator <= self.theta {
            Decision::Incremental
        } else {
            Decision::Global
        }
    }

    /// Global re-optimization re-baselines the drift.
    pub fn reset_drift(&mut self) {
        self.drift_accumulator = 0.0;
    }
}

/// Update policy applied at every slot of a timeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    /// Keep every surviving vertex in place; new vertices go to their
    /// cheapest upload server.
    NoAdjustment,
    /// Move each affected vertex to its cheapest server, ignoring traffic.
    GreedyOnline,
    /// Incremental re-optimization every slot.
    IncrementalOnly,
    /// Incremental until the accumulated drift estimate exceeds `theta`.
    Adaptive { theta: f64 },
    /// Global re-optimization every slot.
    GlobalOnly,
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::NoAdjustment => "no-adjustment",
            Policy::GreedyOnline => "greedy-online",
            Policy::IncrementalOnly => "incremental",
            Policy::Adaptive { .. } => "adaptive",
            Policy::GlobalOnly => "global",
        }
    }
}

/// What a policy did in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotAction {
    Initial,
    None,
    Greedy,
    Incremental,
    Global,
}

impl SlotAction {
    pub fn as_str(&self) -> &'static str {
        match self {
            SlotAction::Initial => "initial",
            SlotAction::None => "none",
            SlotAction::Greedy => "greedy",
            SlotAction::Incremental => "incremental",
            SlotAction::Global => "global",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub slot: usize,
    pub policy: String,
    pub decision: SlotAction,
    pub cost: CostBreakdown,
    pub est_drift: f64,
    /// Incremental cost minus global cost, when both were computed.
    pub realized_drift: Option<f64>,
    pub incremental_cost: Option<f64>,
    /// Time spent on the incremental merge inside a global slot.
    pub incremental_ms: Option<f64>,
    pub migrations: usize,
    pub wall_ms: f64,
    pub affected: usize,
}

fn migrations(prev: &GraphLayout, next: &GraphLayout, prev_graph: &DataGraph, graph: &DataGraph) -> usize {
    graph
        .vertices()
        .filter(|&v| prev_graph.is_active(v) && prev.server(v) != next.server(v))
        .count()
}

/// Replays `trace` from `initial_layout` under `policy`. The first record is
/// the baseline at slot 0.
pub fn run_timeline(
    instance0: &Instance,
    initial_layout: &GraphLayout,
    trace: &[SlotTrace],
    policy: Policy,
    config: &OptimizerConfig,
) -> Result<Vec<SlotRecord>, TimelineError> {
    let opt_err = |slot| move |source| TimelineError::Optimize { slot, source };
    initial_layout
        .validate(instance0)
        .map_err(|source| TimelineError::Optimize {
            slot: 0,
            source: OptimizeError::InvalidWarmStart(source),
        })?;
    let theta = match policy {
        Policy::Adaptive { theta } => theta,
        _ => f64::INFINITY,
    };
    let mut state = TimelineState::new(instance0.clone(), initial_layout.clone(), theta);
    let base = total_cost(initial_layout, instance0).map_err(|e| opt_err(0)(e.into()))?;
    state.history.push(SlotRecord {
        slot: 0,
        policy: policy.name().to_string(),
        decision: SlotAction::Initial,
        cost: base,
        est_drift: 0.0,
        realized_drift: None,
        incremental_cost: None,
        incremental_ms: None,
        migrations: 0,
        wall_ms: 0.0,
        affected: 0,
    });

    for (k, slot) in trace.iter().enumerate() {
        let t = k + 1;
        let next = evolve_instance(&state.instance, &slot.events).map_err(|source| TimelineError::Trace { slot: t, source })?;
        let prev_graph = &state.instance.graph.clone();
        let started = Instant::now();
        let affected = filter_affected(prev_graph, &next.graph, &state.layout).len();

        let (estimate, decision) = match policy {
            Policy::Adaptive { .. } => {
                let (d, est) = state.schedule(&next);
                (est, Some(d))
            }
            _ => (estimate_drift_bound(prev_graph, &state.layout, state.cost, &next), None),
        };

        let mut realized = None;
        let mut incremental_cost = None;
        let mut incremental_ms = None;
        let (layout, action) = match (policy, decision) {
            (Policy::NoAdjustment, _) => (extend_layout(&state.layout, &next), SlotAction::None),
            (Policy::GreedyOnline, _) => {
                let mut layout = extend_layout(&state.layout, &next);
                for v in filter_affected(prev_graph, &next.graph, &state.layout) {
                    let costs: Vec<f64> = (0..next.n_servers()).map(|i| placement_cost(&next, v, i)).collect();
                    layout.set(v, argmin(&costs));
                }
                (layout, SlotAction::Greedy)
            }
            (Policy::IncrementalOnly, _) | (Policy::Adaptive { .. }, Some(Decision::Incremental)) => {
                let layout = incremental_update(&next, prev_graph, &state.layout, config).map_err(opt_err(t))?;
                (layout, SlotAction::Incremental)
            }
            (Policy::GlobalOnly, _) | (Policy::Adaptive { .. }, _) => {
                let merged = incremental_update(&next, prev_graph, &state.layout, config).map_err(opt_err(t))?;
                incremental_ms = Some(started.elapsed().as_secs_f64() * 1e3);
                let merged_cost = total_or_inf(&merged, &next);
                let decomposition = decompose(&next);
                let all: Vec<VertexId> = next.graph.vertices().collect();
                let (layout, _) = optimize_from(&next, &decomposition, merged, &all, config).map_err(opt_err(t))?;
                let global_cost = total_or_inf(&layout, &next);
                realized = Some(merged_cost - global_cost);
                incremental_cost = Some(merged_cost);
                state.reset_drift();
                (layout, SlotAction::Global)
            }
        };
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;

        let cost = total_cost(&layout, &next).map_err(|e| opt_err(t)(e.into()))?;
        let record = SlotRecord {
            slot: t,
            policy: policy.name().to_string(),
            decision: action,
            cost,
            est_drift: estimate,
            realized_drift: realized,
            incremental_cost,
            incremental_ms,
            migrations: migrations(&state.layout, &layout, prev_graph, &next.graph),
            wall_ms,
            affected,
        };
        state.t = t;
        state.instance = next;
        state.layout = layout;
        state.cost = cost.total;
        state.history.push(record);
    }
    Ok(state.history)
}

fn argmin(costs: &[f64]) -> ServerId {
    let mut best = (0, f64::INFINITY);
    for (i, &c) in costs.iter().enumerate() {
        if c < best.1 {
            best = (i, c);
        }
    }
    best.0
}

/// Writes timeline records as CSV.
pub fn write_timeline_csv<W: std::io::Write>(records: &[SlotRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "slot,policy,decision,c_u,c_p,c_t,c_m,total,est_drift,migrations,wall_ms")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{:.3}",
            r.slot,
            r.policy,
            r.decision.as_str(),
            r.cost.c_u,
            r.cost.c_p,
            r.cost.c_t,
            r.cost.c_m,
            r.cost.total,
            r.est_drift,
            r.migrations,
            r.wall_ms
        )?;
    }
    Ok(())
}
