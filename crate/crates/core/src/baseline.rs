//! Exhaustive oracle and the random / greedy reference layouts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{decompose, total_cost, CostBreakdown, CostDecomposition};
use crate::error::OracleError;
use crate::model::{GraphLayout, Instance, ServerId, VertexId};

pub const DEFAULT_MAX_STATES: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub optimal_layout: GraphLayout,
    pub optimal_cost: CostBreakdown,
    pub states_examined: u64,
}

/// Enumerates every assignment in reflected mixed-radix Gray order, so each
/// step moves a single vertex and the cost is updated from its links only.
/// Near-ties are re-evaluated from scratch and resolved towards the
/// lexicographically smallest assignment.
pub fn brute_force_optimal(instance: &Instance, max_states: u64) -> Result<OracleResult, OracleError> {
    let n = instance.n_servers();
    let vertices: Vec<VertexId> = instance.graph.vertices().collect();
    let states = (n as f64).powi(vertices.len() as i32);
    if states > max_states as f64 {
        return Err(OracleError::TooLarge { states, max_states });
    }
    if n == 0 {
        return Err(OracleError::Infeasible);
    }
    let d = decompose(instance);
    let graph = &instance.graph;

    let mut layout = GraphLayout::new(vec![None; graph.slot_count()]);
    for &v in &vertices {
        layout.set(v, 0);
    }
    let mut pos = vec![0usize; graph.slot_count()];
    let mut current = d.evaluate(&layout, instance).expect("single-server layout is feasible");
    let mut unreachable = 0usize;

    let mut best: Option<(f64, Vec<ServerId>)> = None;
    let mut digits = vec![0usize; vertices.len()];
    let mut dir = vec![true; vertices.len()];
    let mut examined = 0u64;

    loop {
        examined += 1;
        if unreachable == 0 {
            consider(&mut best, &mut current, &digits, &vertices, &d, instance);
        }
        // next Gray step: lowest digit that can still move in its direction
        let mut k = 0;
        while k < digits.len() {
            let can = if dir[k] { digits[k] + 1 < n } else { digits[k] > 0 };
            if can {
                break;
            }
            dir[k] = !dir[k];
            k += 1;
        }
        if k == digits.len() {
            break;
        }
        let v = vertices[k];
        let from = digits[k];
        let to = if dir[k] { from + 1 } else { from - 1 };
        digits[k] = to;
        let mut delta = d.unary(v, to) - d.unary(v, from);
        for &u in graph.neighbors(v) {
            let su = pos[u];
            match d.pairwise(from, su) {
                Some(w) => delta -= w,
                None => unreachable -= 1,
            }
            match d.pairwise(to, su) {
                Some(w) => delta += w,
                None => unreachable += 1,
            }
        }
        pos[v] = to;
        current += delta;
    }

    let (_, digits) = best.ok_or(OracleError::Infeasible)?;
    let mut optimal_layout = GraphLayout::new(vec![None; graph.slot_count()]);
    for (&v, &s) in vertices.iter().zip(&digits) {
        optimal_layout.set(v, s);
    }
    let optimal_cost = total_cost(&optimal_layout, instance).map_err(|_| OracleError::Infeasible)?;
    Ok(OracleResult {
        optimal_layout,
        optimal_cost,
        states_examined: examined,
    })
}

fn exact(digits: &[ServerId], vertices: &[VertexId], d: &CostDecomposition, instance: &Instance) -> f64 {
    let mut layout = GraphLayout::new(vec![None; instance.graph.slot_count()]);
    for (&v, &s) in vertices.iter().zip(digits) {
        layout.set(v, s);
    }
    d.evaluate(&layout, instance).unwrap_or(f64::INFINITY)
}

fn consider(
    best: &mut Option<(f64, Vec<ServerId>)>,
    current: &mut f64,
    digits: &[ServerId],
    vertices: &[VertexId],
    d: &CostDecomposition,
    instance: &Instance,
) {
    let Some((best_cost, best_digits)) = best.as_mut() else {
        *current = exact(digits, vertices, d, instance);
        *best = Some((*current, digits.to_vec()));
        return;
    };
    let tol = 1e-9 * best_cost.abs() + 1e-12;
    if *current > *best_cost + tol {
        return;
    }
    // resync the running sum before comparing
    *current = exact(digits, vertices, d, instance);
    let replace = if *current < *best_cost - 1e-12 * best_cost.abs().max(1.0) {
        true
    } else if (*current - *best_cost).abs() <= 1e-12 * best_cost.abs().max(1.0) {
        digits < best_digits.as_slice()
    } else {
        false
    };
    if replace {
        *best_cost = *current;
        best_digits.copy_from_slice(digits);
    }
}

/// Each vertex on a uniformly random server.
pub fn random_layout(instance: &Instance, seed: u64) -> GraphLayout {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = instance.n_servers();
    let mut layout = GraphLayout::new(vec![None; instance.graph.slot_count()]);
    for v in instance.graph.vertices() {
        layout.set(v, rng.random_range(0..n));
    }
    layout
}

/// Server minimizing `μ_vi + C_P(v,i) + ρ_i` for `v`, lowest index on ties.
pub fn greedy_server(decomposition: &CostDecomposition, v: VertexId) -> ServerId {
    let mut best = (0, f64::INFINITY);
    for (i, &c) in decomposition.unary_row(v).iter().enumerate() {
        if c < best.1 {
            best = (i, c);
        }
    }
    best.0
}

/// Places each vertex independently on its cheapest server, ignoring traffic.
pub fn greedy_layout(instance: &Instance) -> GraphLayout {
    let d = decompose(instance);
    let mut layout = GraphLayout::new(vec![None; instance.graph.slot_count()]);
    for v in instance.graph.vertices() {
        layout.set(v, greedy_server(&d, v));
    }
    layout
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{instance, mesh};
    use crate::model::DataGraph;

    fn with_upload(n_servers: usize, tau: f64, links: &[(usize, usize)], upload: Vec<Vec<f64>>) -> Instance {
        let g = DataGraph::with_vertex_count(upload.len(), links).unwrap();
        let base = instance(mesh(n_servers, tau), g, vec![1, 1]);
        Instance::new(base.network, base.graph, base.model, upload).unwrap()
    }

    #[test]
    fn oracle_single_vertex_argmin() {
        let inst = with_upload(2, 1.0, &[], vec![vec![3.0, 5.0]]);
        let res = brute_force_optimal(&inst, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(res.optimal_layout.server(0), Some(0));
        assert_eq!(res.optimal_cost.total, 3.0);
        assert_eq!(res.states_examined, 2);
    }

    #[test]
    fn oracle_keeps_linked_vertices_together_under_heavy_traffic() {
        let inst = with_upload(2, 1e6, &[(0, 1)], vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        let res = brute_force_optimal(&inst, DEFAULT_MAX_STATES).unwrap();
        let l = &res.optimal_layout;
        assert_eq!(l.server(0), l.server(1));
        // tie between {0,0} and {1,1}: lexicographically smallest wins
        assert_eq!(l.server(0), Some(0));
    }

    #[test]
    fn oracle_guard() {
        let inst = with_upload(3, 1.0, &[], vec![vec![0.0; 3]; 20]);
        assert!(matches!(brute_force_optimal(&inst, 1000), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn random_layout_single_server_and_reproducible() {
        let one = with_upload(1, 0.0, &[], vec![vec![1.0]; 5]);
        assert_eq!(random_layout(&one, 1), GraphLayout::from_servers(vec![0; 5]));
        let four = with_upload(4, 1.0, &[], vec![vec![1.0; 4]; 50]);
        assert_eq!(random_layout(&four, 77), random_layout(&four, 77));
    }

    #[test]
    fn greedy_picks_upload_argmin() {
        let inst = with_upload(2, 1.0, &[], vec![vec![1.0, 5.0]]);
        assert_eq!(greedy_layout(&inst).server(0), Some(0));
    }

    #[test]
    fn greedy_is_optimal_without_traffic() {
        let upload = vec![vec![4.0, 1.0, 3.0], vec![2.0, 2.5, 0.5], vec![1.0, 1.0, 9.0], vec![7.0, 6.0, 5.0]];
        let inst = with_upload(3, 0.0, &[(0, 1), (1, 2), (2, 3)], upload);
        let oracle = brute_force_optimal(&inst, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(greedy_layout(&inst), oracle.optimal_layout);
    }
}
