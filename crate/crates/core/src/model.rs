//! Edge network, data graph, GNN layer spec and graph layouts.
//!
//! Vertex and server ids are dense 0-based indices. A data graph keeps one
//! slot per vertex id ever created; deleted vertices leave an empty slot so
//! that ids stay stable while the graph evolves.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

pub type VertexId = usize;
pub type ServerId = usize;

/// Hardware class of an edge server, from weakest (`A`) to most powerful (`C`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MachineClass {
    A,
    B,
    C,
}

impl MachineClass {
    pub const ALL: [MachineClass; 3] = [MachineClass::A, MachineClass::B, MachineClass::C];
}

/// An edge server and its unit cost parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeServer {
    pub id: ServerId,
    #[serde(default)]
    pub name: String,
    pub coords: [f64; 2],
    pub machine_class: MachineClass,
    /// Cost per element when summing neighbor vectors.
    pub alpha: f64,
    /// Cost per element of the weight multiplication.
    pub beta: f64,
    /// Cost per element of the activation.
    pub gamma: f64,
    /// Maintenance cost per resident vertex.
    pub rho: f64,
    /// One-shot maintenance cost, charged whether or not the server is used.
    pub epsilon: f64,
}

impl EdgeServer {
    fn costs_valid(&self) -> bool {
        [self.alpha, self.beta, self.gamma, self.rho, self.epsilon]
            .iter()
            .all(|c| c.is_finite() && *c >= 0.0)
    }
}

/// Servers plus the symmetric unit traffic cost matrix.
///
/// `None` marks an unreachable pair (no connection). The diagonal is always
/// `Some(0.0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeNetwork {
    servers: Vec<EdgeServer>,
    traffic: Vec<Option<f64>>,
}

impl EdgeNetwork {
    pub fn new(servers: Vec<EdgeServer>, traffic: Vec<Vec<Option<f64>>>) -> Result<Self, ModelError> {
        let n = servers.len();
        for (position, s) in servers.iter().enumerate() {
            if s.id != position {
                return Err(ModelError::NonDenseServerId { position, id: s.id });
            }
            if !s.costs_valid() {
                return Err(ModelError::InvalidServerCost(s.id));
            }
        }
        if traffic.len() != n || traffic.iter().any(|row| row.len() != n) {
            return Err(ModelError::InvalidTraffic(n, n, "matrix is not |D| x |D|"));
        }
        let mut flat = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let t = if i == j {
                    match traffic[i][i] {
                        None => Some(0.0),
                        Some(v) if v == 0.0 => Some(0.0),
                        Some(_) => return Err(ModelError::InvalidTraffic(i, i, "diagonal must be 0")),
                    }
                } else {
                    traffic[i][j]
                };
                if let Some(v) = t {
                    if !v.is_finite() || v < 0.0 {
                        return Err(ModelError::InvalidTraffic(i, j, "must be finite and >= 0"));
                    }
                }
                if traffic[i][j] != traffic[j][i] && i != j {
                    return Err(ModelError::InvalidTraffic(i, j, "not symmetric"));
                }
                flat.push(t);
            }
        }
        Ok(EdgeNetwork { servers, traffic: flat })
    }

    /// Builds a network from an explicit connectivity matrix. A pair is
    /// connected iff `connectivity[i][j]`, and then it must carry a finite
    /// traffic cost.
    pub fn with_connectivity(
        servers: Vec<EdgeServer>,
        connectivity: &[Vec<bool>],
        traffic: Vec<Vec<Option<f64>>>,
    ) -> Result<Self, ModelError> {
        let n = servers.len();
        if connectivity.len() != n || connectivity.iter().any(|r| r.len() != n) {
            return Err(ModelError::InvalidTraffic(n, n, "connectivity is not |D| x |D|"));
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if connectivity[i][j] != connectivity[j][i] {
                    return Err(ModelError::InvalidTraffic(i, j, "connectivity not symmetric"));
                }
                let has = traffic.get(i).and_then(|r| r.get(j)).copied().flatten().is_some();
                if connectivity[i][j] != has {
                    return Err(ModelError::InvalidTraffic(
                        i,
                        j,
                        "traffic must be finite exactly where servers are connected",
                    ));
                }
            }
        }
        Self::new(servers, traffic)
    }

    pub fn len(&self) -> usize {
        self.servers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.servers.is_empty()
    }

    pub fn servers(&self) -> &[EdgeServer] {
        &self.servers
    }

    pub fn server(&self, i: ServerId) -> &EdgeServer {
        &self.servers[i]
    }

    /// Unit traffic cost between two servers, `None` when unreachable.
    #[inline]
    pub fn traffic(&self, i: ServerId, j: ServerId) -> Option<f64> {
        self.traffic[i * self.servers.len() + j]
    }

    /// `w_ij`: distinct servers with a valid connection.
    #[inline]
    pub fn connected(&self, i: ServerId, j: ServerId) -> bool {
        i != j && self.traffic(i, j).is_some()
    }

    /// All connected unordered pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn connected_pairs(&self) -> Vec<(ServerId, ServerId)> {
        let n = self.len();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.connected(i, j) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    pub fn connectivity_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.connected(i, j)).collect()).collect()
    }

    pub fn traffic_matrix(&self) -> Vec<Vec<Option<f64>>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.traffic(i, j)).collect()).collect()
    }
}

/// Per-vertex metadata. Coordinates are only used by scenario synthesis.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VertexInfo {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<[f64; 2]>,
}

impl VertexInfo {
    pub fn named(name: impl Into<String>) -> Self {
        VertexInfo {
            name: name.into(),
            coords: None,
        }
    }
}

/// Undirected data graph without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct DataGraph {
    vertices: Vec<Option<VertexInfo>>,
    adjacency: Vec<Vec<VertexId>>,
    link_count: usize,
}

impl DataGraph {
    /// Builds a graph from vertex slots (`None` = deleted) and an undirected
    /// link list in which every link appears once.
    pub fn new(vertices: Vec<Option<VertexInfo>>, links: &[(VertexId, VertexId)]) -> Result<Self, ModelError> {
        let mut g = DataGraph {
            adjacency: vec![Vec::new(); vertices.len()],
            vertices,
            link_count: 0,
        };
        for &(u, v) in links {
            g.insert_link(u, v)?;
        }
        Ok(g)
    }

    /// Graph on `n` anonymous vertices named by their index.
    pub fn with_vertex_count(n: usize, links: &[(VertexId, VertexId)]) -> Result<Self, ModelError> {
        let vertices = (0..n).map(|v| Some(VertexInfo::named(v.to_string()))).collect();
        Self::new(vertices, links)
    }

    /// Builds a graph from a square 0/1 adjacency matrix, rejecting asymmetry
    /// and self-loops.
    pub fn from_adjacency_matrix(matrix: &[Vec<bool>]) -> Result<Self, ModelError> {
        let n = matrix.len();
        let mut links = Vec::new();
        for (u, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::AsymmetricAdjacency(u, row.len()));
            }
            if row[u] {
                return Err(ModelError::SelfLoop(u));
            }
            for v in u + 1..n {
                if row[v] != matrix[v][u] {
                    return Err(ModelError::AsymmetricAdjacency(u, v));
                }
                if row[v] {
                    links.push((u, v));
                }
            }
        }
        Self::with_vertex_count(n, &links)
    }

    /// Number of id slots, including deleted vertices.
    pub fn slot_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of live vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.is_some()).count()
    }

    #[inline]
    pub fn is_active(&self, v: VertexId) -> bool {
        matches!(self.vertices.get(v), Some(Some(_)))
    }

    /// Live vertex ids in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter_map(|(v, info)| info.as_ref().map(|_| v))
    }

    pub fn info(&self, v: VertexId) -> Option<&VertexInfo> {
        self.vertices.get(v).and_then(|i| i.as_ref())
    }

    pub fn slots(&self) -> &[Option<VertexInfo>] {
        &self.vertices
    }

    /// Sorted neighbor list of `v` (empty for deleted or unknown ids).
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        self.adjacency.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_link(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn link_count(&self) -> usize {
        self.link_count
    }

    /// Every link once, as `(u, v)` with `u < v`, in ascending order.
    pub fn links(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub(crate) fn insert_vertex(&mut self, info: VertexInfo) -> VertexId {
        self.vertices.push(Some(info));
        self.adjacency.push(Vec::new());
        self.vertices.len() - 1
    }

    pub(crate) fn insert_link(&mut self, u: VertexId, v: VertexId) -> Result<(), ModelError> {
        if u == v {
            return Err(ModelError::SelfLoop(u));
        }
        for w in [u, v] {
            if !self.is_active(w) {
                return Err(ModelError::UnknownVertex(w));
            }
        }
        let pos_u = match self.adjacency[u].binary_search(&v) {
            Ok(_) => return Err(ModelError::DuplicateLink(u.min(v), u.max(v))),
            Err(p) => p,
        };
        self.adjacency[u].insert(pos_u, v);
        let pos_v = self.adjacency[v].binary_search(&u).unwrap_err();
        self.adjacency[v].insert(pos_v, u);
        self.link_count += 1;
        Ok(())
    }

    pub(crate) fn remove_link(&mut self, u: VertexId, v: VertexId) -> Result<(), ModelError> {
        for w in [u, v] {
            if !self.is_active(w) {
                return Err(ModelError::UnknownVertex(w));
            }
        }
        match self.adjacency[u].binary_search(&v) {
            Ok(p) => {
                self.adjacency[u].remove(p);
            }
            Err(_) => return Err(ModelError::MissingLink(u.min(v), u.max(v))),
        }
        let p = self.adjacency[v].binary_search(&u).expect("adjacency symmetric");
        self.adjacency[v].remove(p);
        self.link_count -= 1;
        Ok(())
    }

    pub(crate) fn remove_vertex(&mut self, v: VertexId) -> Result<(), ModelError> {
        if !self.is_active(v) {
            return Err(ModelError::UnknownVertex(v));
        }
        let ns = std::mem::take(&mut self.adjacency[v]);
        for u in &ns {
            let p = self.adjacency[*u].binary_search(&v).expect("adjacency symmetric");
            self.adjacency[*u].remove(p);
        }
        self.link_count -= ns.len();
        self.vertices[v] = None;
        Ok(())
    }
}

/// Layer sizes `s_0, ..., s_K` of the served GNN.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GnnModelSpec {
    layer_dims: Vec<usize>,
}

impl GnnModelSpec {
    pub fn new(layer_dims: Vec<usize>) -> Result<Self, ModelError> {
        if layer_dims.len() < 2 || layer_dims.contains(&0) {
            return Err(ModelError::InvalidLayerDims);
        }
        Ok(GnnModelSpec { layer_dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.layer_dims
    }

    /// `(s_{k-1}, s_k)` for each layer `k = 1..=K`.
    pub fn layers(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.layer_dims.windows(2).map(|w| (w[0], w[1]))
    }
}

impl TryFrom<Vec<usize>> for GnnModelSpec {
    type Error = ModelError;

    fn try_from(dims: Vec<usize>) -> Result<Self, Self::Error> {
        GnnModelSpec::new(dims)
    }
}

impl From<GnnModelSpec> for Vec<usize> {
    fn from(spec: GnnModelSpec) -> Self {
        spec.layer_dims
    }
}

/// Everything an optimizer needs: network, graph, model and upload costs.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub network: EdgeNetwork,
    pub graph: DataGraph,
    pub model: GnnModelSpec,
    upload_cost: Vec<f64>,
}

impl Instance {
    /// `upload_cost` has one row per vertex slot and one column per server.
    pub fn new(
        network: EdgeNetwork,
        graph: DataGraph,
        model: GnnModelSpec,
        upload_cost: Vec<Vec<f64>>,
    ) -> Result<Self, ModelError> {
        let n = network.len();
        let rows = upload_cost.len();
        if rows != graph.slot_count() || upload_cost.iter().any(|r| r.len() != n) {
            return Err(ModelError::UploadShape {
                rows,
                cols: upload_cost.iter().map(Vec::len).find(|&c| c != n).unwrap_or(n),
                expected_rows: graph.slot_count(),
                expected_cols: n,
            });
        }
        for (v, row) in upload_cost.iter().enumerate() {
            for (i, &c) in row.iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    return Err(ModelError::InvalidUploadCost(v, i));
                }
            }
        }
        Ok(Instance {
            network,
            graph,
            model,
            upload_cost: upload_cost.into_iter().flatten().collect(),
        })
    }

    pub fn n_servers(&self) -> usize {
        self.network.len()
    }

    /// `μ_vi`.
    #[inline]
    pub fn upload(&self, v: VertexId, i: ServerId) -> f64 {
        self.upload_cost[v * self.network.len() + i]
    }

    pub fn upload_row(&self, v: VertexId) -> &[f64] {
        let n = self.network.len();
        &self.upload_cost[v * n..(v + 1) * n]
    }

    pub fn upload_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.graph.slot_count()).map(|v| self.upload_row(v).to_vec()).collect()
    }

    /// Same network and model over a different graph.
    pub fn with_graph(&self, graph: DataGraph, upload_cost: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        Instance::new(self.network.clone(), graph, self.model.clone(), upload_cost)
    }
}

/// A link whose endpoints sit on different servers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CrossLink {
    pub link: (VertexId, VertexId),
    pub servers: (ServerId, ServerId),
}

/// Assignment of every vertex to exactly one edge server.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GraphLayout {
    assignment: Vec<Option<ServerId>>,
}

impl GraphLayout {
    pub fn new(assignment: Vec<Option<ServerId>>) -> Self {
        GraphLayout { assignment }
    }

    /// Dense layout where vertex `v` goes to `servers[v]`.
    pub fn from_servers(servers: Vec<ServerId>) -> Self {
        GraphLayout {
            assignment: servers.into_iter().map(Some).collect(),
        }
    }

    /// Every live vertex of `graph` placed on `server`.
    pub fn uniform(graph: &DataGraph, server: ServerId) -> Self {
        let mut assignment = vec![None; graph.slot_count()];
        for v in graph.vertices() {
            assignment[v] = Some(server);
        }
        GraphLayout { assignment }
    }

    #[inline]
    pub fn server(&self, v: VertexId) -> Option<ServerId> {
        self.assignment.get(v).copied().flatten()
    }

    /// Server of `v`; panics if unassigned. Use on validated layouts only.
    #[inline]
    pub(crate) fn at(&self, v: VertexId) -> ServerId {
        self.assignment[v].expect("layout must assign every live vertex")
    }

    pub fn set(&mut self, v: VertexId, server: ServerId) {
        if v >= self.assignment.len() {
            self.assignment.resize(v + 1, None);
        }
        self.assignment[v] = Some(server);
    }

    pub fn unset(&mut self, v: VertexId) {
        if let Some(slot) = self.assignment.get_mut(v) {
            *slot = None;
        }
    }

    pub fn assignments(&self) -> &[Option<ServerId>] {
        &self.assignment
    }

    /// Assigned `(vertex, server)` pairs in ascending vertex order.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, ServerId)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.map(|s| (v, s)))
    }

    /// Keeps only the assignments of vertices live in `graph`.
    pub fn restricted_to(&self, graph: &DataGraph) -> GraphLayout {
        let mut assignment = vec![None; graph.slot_count()];
        for v in graph.vertices() {
            assignment[v] = self.server(v);
        }
        GraphLayout { assignment }
    }

    /// Checks totality over the live vertices and that every target exists.
    pub fn validate(&self, instance: &Instance) -> Result<(), ModelError> {
        let n = instance.n_servers();
        for (_, s) in self.iter() {
            if s >= n {
                return Err(ModelError::UnknownServer(s));
            }
        }
        for v in instance.graph.vertices() {
            if self.server(v).is_none() {
                return Err(ModelError::MissingVertex(v));
            }
        }
        Ok(())
    }

    /// Live vertices placed on `server`, ascending.
    pub fn resident_vertices(&self, instance: &Instance, server: ServerId) -> Result<Vec<VertexId>, ModelError> {
        if server >= instance.n_servers() {
            return Err(ModelError::UnknownServer(server));
        }
        Ok(instance
            .graph
            .vertices()
            .filter(|&v| self.server(v) == Some(server))
            .collect())
    }

    /// Links whose endpoints reside on distinct servers, with `servers`
    /// ordered as `(server(u), server(v))` for `u < v`.
    pub fn cross_links(&self, graph: &DataGraph) -> Vec<CrossLink> {
        graph
            .links()
            .filter_map(|(u, v)| {
                let (su, sv) = (self.server(u)?, self.server(v)?);
                (su != sv).then_some(CrossLink {
                    link: (u, v),
                    servers: (su, sv),
                })
            })
            .collect()
    }
}
