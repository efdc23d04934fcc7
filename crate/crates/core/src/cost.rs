//! The four cost factors, the total objective, and its split into constant,
//! unary and pairwise terms.
//!
//! Traffic follows the literal double sum over ordered vertex pairs, so every
//! undirected cross link is charged `2 * tau_ij`. All sums run over vertices
//! ascending, then servers ascending.

use serde::{Deserialize, Serialize};

use crate::error::CostError;
use crate::model::{GraphLayout, Instance, ServerId, VertexId};

/// The four cost factors of one layout and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub c_u: f64,
    pub c_p: f64,
    pub c_t: f64,
    pub c_m: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(c_u: f64, c_p: f64, c_t: f64, c_m: f64) -> Self {
        CostBreakdown {
            c_u,
            c_p,
            c_t,
            c_m,
            total: c_u + c_p + c_t + c_m,
        }
    }
}

/// `μ_{v,π(v)}` summed over live vertices.
pub fn data_collection_cost(layout: &GraphLayout, instance: &Instance) -> f64 {
    instance
        .graph
        .vertices()
        .map(|v| instance.upload(v, layout.at(v)))
        .sum()
}

/// Cost of running every GNN layer for vertex `v` on server `i`.
pub fn vertex_compute_cost(v: VertexId, i: ServerId, instance: &Instance) -> f64 {
    let s = instance.network.server(i);
    let deg = instance.graph.degree(v) as f64;
    instance
        .model
        .layers()
        .map(|(prev, next)| {
            let (prev, next) = (prev as f64, next as f64);
            s.alpha * deg * prev + s.beta * prev * next + s.gamma * next
        })
        .sum()
}

pub fn compute_cost(layout: &GraphLayout, instance: &Instance) -> f64 {
    instance
        .graph
        .vertices()
        .map(|v| vertex_compute_cost(v, layout.at(v), instance))
        .sum()
}

/// Cross-edge traffic, summed over ordered pairs `(v, u)` of adjacent vertices.
pub fn traffic_cost(layout: &GraphLayout, instance: &Instance) -> Result<f64, CostError> {
    let net = &instance.network;
    let mut total = 0.0;
    for v in instance.graph.vertices() {
        let i = layout.at(v);
        for &u in instance.graph.neighbors(v) {
            let j = layout.at(u);
            if i != j {
                total += net.traffic(i, j).ok_or(CostError::UnreachablePair(i.min(j), i.max(j)))?;
            }
        }
    }
    Ok(total)
}

/// Per-vertex `ρ_i` for resident vertices plus `ε_i` for every server.
pub fn maintenance_cost(layout: &GraphLayout, instance: &Instance) -> f64 {
    let n = instance.n_servers();
    let mut resident = vec![0usize; n];
    for v in instance.graph.vertices() {
        resident[layout.at(v)] += 1;
    }
    instance
        .network
        .servers()
        .iter()
        .zip(&resident)
        .map(|(s, &count)| s.rho * count as f64 + s.epsilon)
        .sum()
}

pub fn total_cost(layout: &GraphLayout, instance: &Instance) -> Result<CostBreakdown, CostError> {
    let c_t = traffic_cost(layout, instance)?;
    Ok(CostBreakdown::new(
        data_collection_cost(layout, instance),
        compute_cost(layout, instance),
        c_t,
        maintenance_cost(layout, instance),
    ))
}

/// Total cost, or `+inf` when the layout pays traffic over an unreachable pair.
pub(crate) fn total_or_inf(layout: &GraphLayout, instance: &Instance) -> f64 {
    total_cost(layout, instance).map_or(f64::INFINITY, |b| b.total)
}

/// Constant, unary and pairwise terms of the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct CostDecomposition {
    /// `Σ_i ε_i`.
    pub c0: f64,
    n_servers: usize,
    unary: Vec<f64>,
    pairwise: Vec<Option<f64>>,
}

impl CostDecomposition {
    /// `μ_vi + C_P(v,i) + ρ_i`. Rows of deleted vertex slots are zero.
    #[inline]
    pub fn unary(&self, v: VertexId, i: ServerId) -> f64 {
        self.unary[v * self.n_servers + i]
    }

    pub fn unary_row(&self, v: VertexId) -> &[f64] {
        &self.unary[v * self.n_servers..(v + 1) * self.n_servers]
    }

    /// Charge for one undirected link whose endpoints sit on `i` and `j`:
    /// `2 τ_ij`, zero when `i == j`, `None` when unreachable.
    #[inline]
    pub fn pairwise(&self, i: ServerId, j: ServerId) -> Option<f64> {
        self.pairwise[i * self.n_servers + j]
    }

    /// `c0 + Σ unary + Σ pairwise` for `layout`.
    pub fn evaluate(&self, layout: &GraphLayout, instance: &Instance) -> Result<f64, CostError> {
        let mut unary = 0.0;
        for v in instance.graph.vertices() {
            unary += self.unary(v, layout.at(v));
        }
        let mut pairwise = 0.0;
        for (u, v) in instance.graph.links() {
            let (i, j) = (layout.at(u), layout.at(v));
            pairwise += self
                .pairwise(i, j)
                .ok_or(CostError::UnreachablePair(i.min(j), i.max(j)))?;
        }
        Ok(self.c0 + unary + pairwise)
    }
}

pub fn decompose(instance: &Instance) -> CostDecomposition {
    let n = instance.n_servers();
    let net = &instance.network;
    let c0 = net.servers().iter().map(|s| s.epsilon).sum();
    let mut unary = vec![0.0; instance.graph.slot_count() * n];
    for v in instance.graph.vertices() {
        for i in 0..n {
            unary[v * n + i] = instance.upload(v, i) + vertex_compute_cost(v, i, instance) + net.server(i).rho;
        }
    }
    let mut pairwise = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            pairwise.push(if i == j { Some(0.0) } else { net.traffic(i, j).map(|t| 2.0 * t) });
        }
    }
    CostDecomposition {
        c0,
        n_servers: n,
        unary,
        pairwise,
    }
}

/// Cost of `layout` restricted to the subgraph induced by `subset`: unary
/// terms of the members, traffic of links with both endpoints in `subset`,
/// and the constant maintenance term.
pub fn subset_cost(subset: &[VertexId], layout: &GraphLayout, instance: &Instance) -> Result<f64, CostError> {
    let mut member = vec![false; instance.graph.slot_count()];
    for &v in subset {
        member[v] = true;
    }
    let net = &instance.network;
    let mut total: f64 = net.servers().iter().map(|s| s.epsilon).sum();
    for &v in subset {
        let i = layout.at(v);
        total += instance.upload(v, i) + vertex_compute_cost(v, i, instance) + net.server(i).rho;
        for &u in instance.graph.neighbors(v) {
            if member[u] {
                let j = layout.at(u);
                if i != j {
                    total += net.traffic(i, j).ok_or(CostError::UnreachablePair(i.min(j), i.max(j)))?;
                }
            }
        }
    }
    Ok(total)
}

/// Change in induced-subgraph cost from adding `v` to `subset`, with the
/// placements of `subset` held fixed.
pub fn marginal_cost(
    subset: &[VertexId],
    v: VertexId,
    layout: &GraphLayout,
    instance: &Instance,
) -> Result<f64, CostError> {
    debug_assert!(!subset.contains(&v));
    let mut with_v = subset.to_vec();
    with_v.push(v);
    Ok(subset_cost(&with_v, layout, instance)? - subset_cost(subset, layout, instance)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{instance, mesh, server};
    use crate::model::{DataGraph, EdgeNetwork};

    fn with_upload(inst: Instance, upload: Vec<Vec<f64>>) -> Instance {
        Instance::new(inst.network, inst.graph, inst.model, upload).unwrap()
    }

    fn with_servers(inst: &Instance, f: impl Fn(&mut crate::model::EdgeServer)) -> Instance {
        let mut servers = inst.network.servers().to_vec();
        servers.iter_mut().for_each(f);
        let net = EdgeNetwork::new(servers, inst.network.traffic_matrix()).unwrap();
        Instance::new(net, inst.graph.clone(), inst.model.clone(), inst.upload_matrix()).unwrap()
    }

    #[test]
    fn data_collection_examples() {
        let g = DataGraph::with_vertex_count(2, &[]).unwrap();
        let base = instance(mesh(2, 1.0), g, vec![1, 1]);
        let l = GraphLayout::from_servers(vec![0, 1]);
        assert_eq!(data_collection_cost(&l, &base), 0.0);
        let inst = with_upload(base, vec![vec![1.0, 5.0], vec![2.0, 3.0]]);
        assert_eq!(data_collection_cost(&l, &inst), 4.0);
        assert_eq!(data_collection_cost(&GraphLayout::from_servers(vec![1, 0]), &inst), 7.0);
    }

    #[test]
    fn vertex_compute_examples() {
        let g = DataGraph::with_vertex_count(4, &[(0, 1), (0, 2), (3, 1), (3, 2), (3, 0)]).unwrap();
        let zero = instance(mesh(1, 0.0), DataGraph::with_vertex_count(1, &[]).unwrap(), vec![3, 3]);
        assert_eq!(vertex_compute_cost(0, 0, &zero), 0.0);

        let ones = with_servers(&instance(mesh(1, 0.0), g.clone(), vec![52, 16, 2]), |s| {
            s.alpha = 1.0;
            s.beta = 1.0;
            s.gamma = 1.0;
        });
        // vertex 1 has neighbors {0, 3}
        assert_eq!(vertex_compute_cost(1, 0, &ones), 1018.0);

        let alpha2 = with_servers(&instance(mesh(1, 0.0), g, vec![4, 4]), |s| s.alpha = 2.0);
        // vertex 0 has neighbors {1, 2, 3}
        assert_eq!(vertex_compute_cost(0, 0, &alpha2), 24.0);
    }

    fn heterogeneous() -> Instance {
        let g = DataGraph::with_vertex_count(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
        let base = instance(mesh(2, 1.5), g, vec![5, 3, 2]);
        let mut servers = base.network.servers().to_vec();
        servers[0].alpha = 0.5;
        servers[0].beta = 0.25;
        servers[0].gamma = 1.0;
        servers[1].alpha = 0.125;
        servers[1].beta = 0.75;
        servers[1].gamma = 2.0;
        let net = EdgeNetwork::new(servers, base.network.traffic_matrix()).unwrap();
        let upload = base.upload_matrix();
        Instance::new(net, base.graph, base.model, upload).unwrap()
    }

    #[test]
    fn compute_cost_examples() {
        let empty = instance(mesh(2, 1.0), DataGraph::with_vertex_count(0, &[]).unwrap(), vec![2, 2]);
        assert_eq!(compute_cost(&GraphLayout::default(), &empty), 0.0);

        let homo = with_servers(&heterogeneous(), |s| {
            s.alpha = 0.3;
            s.beta = 0.2;
            s.gamma = 0.1;
        });
        let a = compute_cost(&GraphLayout::from_servers(vec![0, 0, 0, 0]), &homo);
        let b = compute_cost(&GraphLayout::from_servers(vec![1, 0, 1, 1]), &homo);
        assert!((a - b).abs() <= 1e-12 * a);

        // hand sum: deg = [3, 2, 3, 2]; layer sums for dims [5,3,2]:
        // Σ s_{k-1} = 8, Σ s_{k-1}s_k = 21, Σ s_k = 5
        let inst = heterogeneous();
        let layout = GraphLayout::from_servers(vec![0, 1, 1, 0]);
        let server0 = |deg: f64| 0.5 * deg * 8.0 + 0.25 * 21.0 + 1.0 * 5.0;
        let server1 = |deg: f64| 0.125 * deg * 8.0 + 0.75 * 21.0 + 2.0 * 5.0;
        let expected = server0(3.0) + server1(2.0) + server1(3.0) + server0(2.0);
        assert!((compute_cost(&layout, &inst) - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn traffic_examples() {
        let pair = DataGraph::with_vertex_count(2, &[(0, 1)]).unwrap();
        let inst = instance(mesh(2, 5.0), pair, vec![1, 1]);
        assert_eq!(traffic_cost(&GraphLayout::from_servers(vec![0, 0]), &inst), Ok(0.0));
        assert_eq!(traffic_cost(&GraphLayout::from_servers(vec![0, 1]), &inst), Ok(10.0));

        let two = DataGraph::with_vertex_count(4, &[(0, 1), (2, 3)]).unwrap();
        let inst = instance(mesh(2, 3.0), two, vec![1, 1]);
        assert_eq!(traffic_cost(&GraphLayout::from_servers(vec![0, 1, 1, 0]), &inst), Ok(12.0));
    }

    #[test]
    fn traffic_over_unreachable_pair_is_an_error() {
        let servers = (0..2).map(server).collect();
        let net = EdgeNetwork::new(servers, vec![vec![Some(0.0), None], vec![None, Some(0.0)]]).unwrap();
        let inst = instance(net, DataGraph::with_vertex_count(2, &[(0, 1)]).unwrap(), vec![1, 1]);
        assert_eq!(
            total_cost(&GraphLayout::from_servers(vec![1, 0]), &inst),
            Err(CostError::UnreachablePair(0, 1))
        );
        assert!(total_cost(&GraphLayout::from_servers(vec![1, 1]), &inst).is_ok());
    }

    #[test]
    fn maintenance_examples() {
        let inst = instance(mesh(2, 1.0), DataGraph::with_vertex_count(3, &[]).unwrap(), vec![1, 1]);
        assert_eq!(maintenance_cost(&GraphLayout::from_servers(vec![0, 1, 1]), &inst), 0.0);

        let empty = instance(mesh(2, 1.0), DataGraph::with_vertex_count(0, &[]).unwrap(), vec![1, 1]);
        let eps = [7.0, 11.0];
        let empty = with_servers(&empty, |s| s.epsilon = eps[s.id]);
        assert_eq!(maintenance_cost(&GraphLayout::default(), &empty), 18.0);

        let rho = [1.0, 4.0];
        let inst = with_servers(&inst, |s| s.rho = rho[s.id]);
        assert_eq!(maintenance_cost(&GraphLayout::from_servers(vec![0, 1, 1]), &inst), 9.0);
    }

    #[test]
    fn total_is_sum_of_components() {
        let zero = instance(mesh(2, 0.0), DataGraph::with_vertex_count(3, &[(0, 1)]).unwrap(), vec![2, 2]);
        let b = total_cost(&GraphLayout::from_servers(vec![0, 1, 0]), &zero).unwrap();
        assert_eq!(b, CostBreakdown::default());

        let inst = heterogeneous();
        let l = GraphLayout::from_servers(vec![1, 0, 1, 0]);
        let b = total_cost(&l, &inst).unwrap();
        assert_eq!(b.c_u, data_collection_cost(&l, &inst));
        assert_eq!(b.c_p, compute_cost(&l, &inst));
        assert_eq!(b.c_t, traffic_cost(&l, &inst).unwrap());
        assert_eq!(b.c_m, maintenance_cost(&l, &inst));
        assert_eq!(b.total, b.c_u + b.c_p + b.c_t + b.c_m);
    }

    #[test]
    fn decomposition_terms() {
        let g = DataGraph::with_vertex_count(1, &[]).unwrap();
        let inst = instance(mesh(2, 1.0), g, vec![1, 1]);
        let eps = [3.0, 4.0];
        let inst = with_servers(&inst, |s| {
            s.epsilon = eps[s.id];
            s.rho = 1.0;
            s.beta = 10.0;
        });
        let inst = with_upload(inst, vec![vec![2.0, 0.0]]);
        let d = decompose(&inst);
        assert_eq!(d.c0, 7.0);
        assert_eq!(vertex_compute_cost(0, 0, &inst), 10.0);
        assert_eq!(d.unary(0, 0), 13.0);
        assert_eq!(d.pairwise(0, 1), Some(2.0));
        assert_eq!(d.pairwise(1, 1), Some(0.0));
    }

    fn isolated_plus(n_links: &[(usize, usize)], n: usize) -> Instance {
        let g = DataGraph::with_vertex_count(n, n_links).unwrap();
        instance(mesh(2, 5.0), g, vec![1, 1])
    }

    #[test]
    fn marginal_cost_examples() {
        let zero = instance(mesh(2, 0.0), DataGraph::with_vertex_count(2, &[]).unwrap(), vec![1, 1]);
        let l = GraphLayout::from_servers(vec![0, 1]);
        assert_eq!(marginal_cost(&[0], 1, &l, &zero), Ok(0.0));

        // v isolated: μ = 2, ρ = 1, C_P = 3 (β = 3 with dims [1,1])
        let inst = isolated_plus(&[], 2);
        let inst = with_servers(&inst, |s| {
            s.rho = 1.0;
            s.beta = 3.0;
        });
        let inst = with_upload(inst, vec![vec![0.0, 0.0], vec![2.0, 2.0]]);
        assert_eq!(marginal_cost(&[0], 1, &l, &inst), Ok(6.0));

        // one neighbor inside the subset on the other server, τ = 5
        let linked = with_upload(
            with_servers(&isolated_plus(&[(0, 1)], 2), |s| {
                s.rho = 1.0;
                s.beta = 3.0;
            }),
            vec![vec![0.0, 0.0], vec![2.0, 2.0]],
        );
        assert_eq!(marginal_cost(&[0], 1, &l, &linked), Ok(16.0));
    }

    #[test]
    fn empty_subset_cost_is_constant_term() {
        let inst = with_servers(&heterogeneous(), |s| s.epsilon = 2.5);
        let l = GraphLayout::from_servers(vec![0, 0, 0, 0]);
        assert_eq!(subset_cost(&[], &l, &inst), Ok(5.0));
        let all: Vec<_> = inst.graph.vertices().collect();
        let full = subset_cost(&all, &l, &inst).unwrap();
        assert!((full - total_cost(&l, &inst).unwrap().total).abs() < 1e-9 * full);
    }
}
