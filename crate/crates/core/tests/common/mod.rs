#![allow(dead_code)]

use edgelayout::model::{DataGraph, EdgeNetwork, EdgeServer, GnnModelSpec, Instance, MachineClass};
use edgelayout::GraphLayout;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct SmallParams {
    pub n_servers: usize,
    pub n_vertices: usize,
    /// Probability that some traffic cost is exactly zero.
    pub zero_tau_prob: f64,
    /// Probability that one server pair is left unconnected.
    pub cut_pair_prob: f64,
}

pub fn random_links(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut links = Vec::new();
    if rng.random_bool(0.5) {
        let p = rng.random_range(0.1..0.6);
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    links.push((u, v));
                }
            }
        }
    } else {
        let m = rng.random_range(1..=2usize);
        let mut deg = vec![0usize; n];
        for v in 1..n {
            let mut chosen = Vec::new();
            while chosen.len() < m.min(v) {
                let total: usize = deg[..v].iter().map(|d| d + 1).sum();
                let mut x = rng.random_range(0..total);
                let mut u = 0;
                while x >= deg[u] + 1 {
                    x -= deg[u] + 1;
                    u += 1;
                }
                if !chosen.contains(&u) {
                    chosen.push(u);
                }
            }
            for u in chosen {
                links.push((u, v));
                deg[u] += 1;
                deg[v] += 1;
            }
        }
    }
    links
}

/// Small instance with uniformly drawn parameters.
pub fn random_instance(rng: &mut ChaCha8Rng, p: SmallParams) -> Instance {
    let d = p.n_servers;
    let servers: Vec<EdgeServer> = (0..d)
        .map(|id| EdgeServer {
            id,
            name: String::new(),
            coords: [rng.random(), rng.random()],
            machine_class: MachineClass::ALL[id % 3],
            alpha: rng.random_range(0.0..0.05),
            beta: rng.random_range(0.0..0.05),
            gamma: rng.random_range(0.0..0.05),
            rho: rng.random_range(0.0..2.0),
            epsilon: rng.random_range(0.0..5.0),
        })
        .collect();
    let mut traffic = vec![vec![Some(0.0); d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let t = if rng.random_bool(p.zero_tau_prob) {
                0.0
            } else {
                rng.random_range(0.1..5.0)
            };
            traffic[i][j] = Some(t);
            traffic[j][i] = Some(t);
        }
    }
    if d >= 3 && rng.random_bool(p.cut_pair_prob) {
        let i = rng.random_range(0..d);
        let j = (i + rng.random_range(1..d)) % d;
        traffic[i][j] = None;
        traffic[j][i] = None;
    }
    let network = EdgeNetwork::new(servers, traffic).unwrap();
    let graph = DataGraph::with_vertex_count(p.n_vertices, &random_links(rng, p.n_vertices)).unwrap();
    let layers = rng.random_range(1..=3usize);
    let dims: Vec<usize> = (0..=layers).map(|_| rng.random_range(1..=8usize)).collect();
    let upload = (0..p.n_vertices)
        .map(|_| (0..d).map(|_| rng.random_range(0.0..10.0)).collect())
        .collect();
    Instance::new(network, graph, GnnModelSpec::new(dims).unwrap(), upload).unwrap()
}

pub fn random_layout(rng: &mut ChaCha8Rng, instance: &Instance) -> GraphLayout {
    let mut layout = GraphLayout::default();
    for v in instance.graph.vertices() {
        layout.set(v, rng.random_range(0..instance.n_servers()));
    }
    layout
}

/// Max over min finite traffic cost between distinct connected servers.
pub fn lambda(instance: &Instance) -> Option<f64> {
    let n = instance.n_servers();
    let taus: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter_map(|(i, j)| instance.network.traffic(i, j))
        .collect();
    let min = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let max = taus.iter().copied().fold(0.0, f64::max);
    (min > 0.0 && min.is_finite()).then(|| max / min)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) + 1e-12
}

pub fn report(n: u32, pass: bool, detail: impl std::fmt::Display) {
    println!("criterion {n}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
}
