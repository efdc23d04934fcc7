//! Maximum flow / minimum s-t cut on small real-capacity networks.
//!
//! Dinic's algorithm: BFS level graph, then blocking flow by DFS with
//! per-node arc cursors. Residual capacities below a scale-relative epsilon
//! are treated as saturated.

use std::collections::VecDeque;
use std::fmt::Write as _;

/// One arc as supplied by the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub capacity: f64,
}

#[derive(Debug, Clone)]
struct ResidualEdge {
    to: usize,
    residual: f64,
    rev: usize,
}

/// A directed network with designated source and sink.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    node_count: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc>,
    /// `(tail, index into graph[tail])` for each entry of `arcs`.
    handles: Vec<(usize, usize)>,
    graph: Vec<Vec<ResidualEdge>>,
}

impl FlowNetwork {
    pub fn new(node_count: usize, source: usize, sink: usize) -> Self {
        assert!(source < node_count && sink < node_count, "terminal out of range");
        assert_ne!(source, sink, "source and sink must differ");
        FlowNetwork {
            node_count,
            source,
            sink,
            arcs: Vec::new(),
            handles: Vec::new(),
            graph: vec![Vec::new(); node_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Adds `tail -> head` and returns its arc index.
    pub fn add_arc(&mut self, tail: usize, head: usize, capacity: f64) -> usize {
        assert!(capacity.is_finite() && capacity >= 0.0, "capacity must be finite and >= 0");
        let a = self.graph[tail].len();
        let b = self.graph[head].len() + usize::from(tail == head);
        self.graph[tail].push(ResidualEdge {
            to: head,
            residual: capacity,
            rev: b,
        });
        self.graph[head].push(ResidualEdge {
            to: tail,
            residual: 0.0,
            rev: a,
        });
        self.arcs.push(Arc { tail, head, capacity });
        self.handles.push((tail, a));
        self.arcs.len() - 1
    }

    /// Adds an undirected link as two opposite arcs of equal capacity that
    /// share one residual pair. Returns the indices of `u -> v` and `v -> u`.
    pub fn add_undirected(&mut self, u: usize, v: usize, capacity: f64) -> (usize, usize) {
        assert!(capacity.is_finite() && capacity >= 0.0, "capacity must be finite and >= 0");
        assert_ne!(u, v, "undirected self-loop");
        let a = self.graph[u].len();
        let b = self.graph[v].len();
        self.graph[u].push(ResidualEdge {
            to: v,
            residual: capacity,
            rev: b,
        });
        self.graph[v].push(ResidualEdge {
            to: u,
            residual: capacity,
            rev: a,
        });
        self.arcs.push(Arc { tail: u, head: v, capacity });
        self.handles.push((u, a));
        self.arcs.push(Arc { tail: v, head: u, capacity });
        self.handles.push((v, b));
        (self.arcs.len() - 2, self.arcs.len() - 1)
    }

    /// DIMACS max-flow text (1-based node ids).
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p max {} {}", self.node_count, self.arcs.len());
        let _ = writeln!(out, "n {} s", self.source + 1);
        let _ = writeln!(out, "n {} t", self.sink + 1);
        for a in &self.arcs {
            let _ = writeln!(out, "a {} {} {}", a.tail + 1, a.head + 1, a.capacity);
        }
        out
    }
}

/// Maximum flow value and the canonical minimum cut.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    pub flow_value: f64,
    /// `source_side[n]` is true iff node `n` is reachable from the source in
    /// the final residual network.
    pub source_side: Vec<bool>,
    /// Indices of arcs leaving the source side.
    pub cut_arcs: Vec<usize>,
}

impl CutResult {
    pub fn cut_capacity(&self, network: &FlowNetwork) -> f64 {
        self.cut_arcs.iter().map(|&a| network.arcs[a].capacity).sum()
    }
}

struct Dinic<'a> {
    g: &'a mut [Vec<ResidualEdge>],
    level: Vec<u32>,
    cursor: Vec<usize>,
    eps: f64,
}

impl Dinic<'_> {
    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(u32::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for e in self.g[u].iter() {
                if e.residual > self.eps && self.level[e.to] == u32::MAX {
                    self.level[e.to] = self.level[u] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        self.level[t] != u32::MAX
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64) -> f64 {
        if u == t {
            return pushed;
        }
        while self.cursor[u] < self.g[u].len() {
            let k = self.cursor[u];
            let ResidualEdge { to, residual, rev } = self.g[u][k];
            if residual > self.eps && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, t, pushed.min(residual));
                if got > 0.0 {
                    self.g[u][k].residual -= got;
                    self.g[to][rev].residual += got;
                    return got;
                }
            }
            self.cursor[u] += 1;
        }
        0.0
    }
}

/// Solves max flow and returns the minimum cut whose source side is the set
/// reachable from the source in the residual network.
pub fn min_st_cut(network: &FlowNetwork) -> CutResult {
    let n = network.node_count;
    let (s, t) = (network.source, network.sink);
    let mut graph = network.graph.clone();
    let max_cap = network.arcs.iter().fold(0.0_f64, |m, a| m.max(a.capacity));
    let eps = 1e-12 * max_cap.max(1.0);

    let mut flow = 0.0;
    {
        let mut d = Dinic {
            g: &mut graph,
            level: vec![u32::MAX; n],
            cursor: vec![0; n],
            eps,
        };
        while d.bfs(s, t) {
            d.cursor.fill(0);
            loop {
                let f = d.dfs(s, t, f64::INFINITY);
                if f <= 0.0 {
                    break;
                }
                flow += f;
            }
        }
    }

    let mut source_side = vec![false; n];
    source_side[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for e in &graph[u] {
            if e.residual > eps && !source_side[e.to] {
                source_side[e.to] = true;
                queue.push_back(e.to);
            }
        }
    }
    let cut_arcs = network
        .arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| source_side[a.tail] && !source_side[a.head])
        .map(|(k, _)| k)
        .collect();
    CutResult {
        flow_value: flow,
        source_side,
        cut_arcs,
    }
}
