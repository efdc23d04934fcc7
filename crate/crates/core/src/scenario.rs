//! Synthetic instances, churn traces and edge-list ingestion.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dynamic::{EvolutionEvent, SlotTrace};
use crate::error::ScenarioError;
use crate::model::{
    DataGraph, EdgeNetwork, EdgeServer, GnnModelSpec, Instance, MachineClass, VertexId, VertexInfo,
};

const LLOYD_MAX_ROUNDS: usize = 100;
const LLOYD_TOL: f64 = 1e-6;

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Lloyd's k-means with k-means++ seeding. Empty clusters are reseeded at the
/// point farthest from its centroid.
pub fn kmeans_pivots(points: &[[f64; 2]], k: usize, seed: u64) -> Result<Vec<[f64; 2]>, ScenarioError> {
    if points.is_empty() || k == 0 || k > points.len() {
        return Err(ScenarioError::EmptyInput);
    }
    if k == points.len() {
        return Ok(points.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![points[rng.random_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|&p| dist2(p, centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut x = rng.random::<f64>() * total;
            let mut idx = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if x < w {
                    idx = i;
                    break;
                }
                x -= w;
            }
            idx
        } else {
            rng.random_range(0..points.len())
        };
        centers.push(points[next]);
        for (d, &p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, points[next]));
        }
    }

    let mut assign = vec![0usize; points.len()];
    for _ in 0..LLOYD_MAX_ROUNDS {
        for (a, &p) in assign.iter_mut().zip(points) {
            let mut best = (0, f64::INFINITY);
            for (c, &ctr) in centers.iter().enumerate() {
                let d = dist2(p, ctr);
                if d < best.1 {
                    best = (c, d);
                }
            }
            *a = best.0;
        }
        let mut sums = vec![[0.0f64; 2]; k];
        let mut counts = vec![0usize; k];
        for (&a, &p) in assign.iter().zip(points) {
            sums[a][0] += p[0];
            sums[a][1] += p[1];
            counts[a] += 1;
        }
        let mut shift = 0.0f64;
        for c in 0..k {
            let next = if counts[c] > 0 {
                [sums[c][0] / counts[c] as f64, sums[c][1] / counts[c] as f64]
            } else {
                let far = (0..points.len())
                    .max_by(|&x, &y| {
                        dist2(points[x], centers[assign[x]]).total_cmp(&dist2(points[y], centers[assign[y]]))
                    })
                    .expect("non-empty");
                points[far]
            };
            shift = shift.max(dist(next, centers[c]));
            centers[c] = next;
        }
        if shift < LLOYD_TOL {
            break;
        }
    }
    Ok(centers)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkModel {
    ErdosRenyi { p: f64 },
    PreferentialAttachment { m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Connectivity {
    FullMesh,
    KNearest { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MachineClassParams {
    pub a: ClassParams,
    pub b: ClassParams,
    pub c: ClassParams,
}

impl MachineClassParams {
    pub fn get(&self, class: MachineClass) -> ClassParams {
        match class {
            MachineClass::A => self.a,
            MachineClass::B => self.b,
            MachineClass::C => self.c,
        }
    }
}

impl Default for MachineClassParams {
    fn default() -> Self {
        MachineClassParams {
            a: ClassParams {
                alpha: 0.004,
                beta: 0.002,
                gamma: 0.002,
            },
            b: ClassParams {
                alpha: 0.0024,
                beta: 0.0012,
                gamma: 0.0012,
            },
            c: ClassParams {
                alpha: 0.0012,
                beta: 0.0006,
                gamma: 0.0006,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaintenanceGaussians {
    pub rho: Gaussian,
    pub epsilon: Gaussian,
}

impl Default for MaintenanceGaussians {
    fn default() -> Self {
        MaintenanceGaussians {
            rho: Gaussian { mean: 1.0, std: 0.2 },
            epsilon: Gaussian { mean: 50.0, std: 10.0 },
        }
    }
}

fn default_layer_dims() -> GnnModelSpec {
    GnnModelSpec::new(vec![64, 32, 16]).expect("valid dims")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisConfig {
    pub n_vertices: usize,
    pub n_servers: usize,
    #[serde(default = "SynthesisConfig::default_link_model")]
    pub link_model: LinkModel,
    #[serde(default = "default_layer_dims")]
    pub layer_dims: GnnModelSpec,
    #[serde(default = "SynthesisConfig::default_upload_factor")]
    pub distance_factor_upload: f64,
    #[serde(default = "SynthesisConfig::default_traffic_factor")]
    pub distance_factor_traffic: f64,
    #[serde(default)]
    pub machine_class_params: MachineClassParams,
    #[serde(default)]
    pub maintenance_gaussian: MaintenanceGaussians,
    #[serde(default = "SynthesisConfig::default_connectivity")]
    pub connectivity: Connectivity,
    #[serde(default)]
    pub seed: u64,
}

impl SynthesisConfig {
    fn default_link_model() -> LinkModel {
        LinkModel::PreferentialAttachment { m: 2 }
    }
    fn default_upload_factor() -> f64 {
        20.0
    }
    fn default_traffic_factor() -> f64 {
        10.0
    }
    fn default_connectivity() -> Connectivity {
        Connectivity::FullMesh
    }

    pub fn new(n_vertices: usize, n_servers: usize, seed: u64) -> Self {
        SynthesisConfig {
            n_vertices,
            n_servers,
            link_model: Self::default_link_model(),
            layer_dims: default_layer_dims(),
            distance_factor_upload: Self::default_upload_factor(),
            distance_factor_traffic: Self::default_traffic_factor(),
            machine_class_params: MachineClassParams::default(),
            maintenance_gaussian: MaintenanceGaussians::default(),
            connectivity: Self::default_connectivity(),
            seed,
        }
    }

    /// Checks every field, reporting the first violation with its path.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let nonneg = |path: &str, x: f64| {
            if x.is_finite() && x >= 0.0 {
                Ok(())
            } else {
                Err(ScenarioError::config(path, format!("must be a finite value >= 0, got {x}")))
            }
        };
        if self.n_vertices == 0 {
            return Err(ScenarioError::config("n_vertices", "must be positive"));
        }
        if self.n_servers == 0 {
            return Err(ScenarioError::config("n_servers", "must be positive"));
        }
        if self.n_servers > self.n_vertices {
            return Err(ScenarioError::config("n_servers", "must not exceed n_vertices"));
        }
        match self.link_model {
            LinkModel::ErdosRenyi { p } if !(0.0..=1.0).contains(&p) => {
                return Err(ScenarioError::config("link_model.p", format!("must be in [0, 1], got {p}")));
            }
            LinkModel::PreferentialAttachment { m } if m == 0 => {
                return Err(ScenarioError::config("link_model.m", "must be positive"));
            }
            _ => {}
        }
        nonneg("distance_factor_upload", self.distance_factor_upload)?;
        nonneg("distance_factor_traffic", self.distance_factor_traffic)?;
        for (name, p) in [
            ("a", self.machine_class_params.a),
            ("b", self.machine_class_params.b),
            ("c", self.machine_class_params.c),
        ] {
            nonneg(&format!("machine_class_params.{name}.alpha"), p.alpha)?;
            nonneg(&format!("machine_class_params.{name}.beta"), p.beta)?;
            nonneg(&format!("machine_class_params.{name}.gamma"), p.gamma)?;
        }
        let g = &self.maintenance_gaussian;
        for (name, d) in [("rho", g.rho), ("epsilon", g.epsilon)] {
            if !d.mean.is_finite() {
                return Err(ScenarioError::config(format!("maintenance_gaussian.{name}.mean"), "must be finite"));
            }
            nonneg(&format!("maintenance_gaussian.{name}.std"), d.std)?;
        }
        if let Connectivity::KNearest { k } = self.connectivity {
            if k == 0 || k >= self.n_servers {
                return Err(ScenarioError::config(
                    "connectivity.k",
                    format!("must satisfy 1 <= k < n_servers, got {k}"),
                ));
            }
        }
        Ok(())
    }
}

/// Splits `n` servers evenly across classes, giving remainders to A, then B.
pub fn class_counts(n: usize) -> [usize; 3] {
    let base = n / 3;
    let rem = n % 3;
    [base + usize::from(rem >= 1), base + usize::from(rem >= 2), base]
}

fn uniform_point(rng: &mut ChaCha8Rng) -> [f64; 2] {
    [rng.random::<f64>(), rng.random::<f64>()]
}

fn gaussian_clamped(g: Gaussian, rng: &mut ChaCha8Rng) -> f64 {
    if g.std == 0.0 {
        return g.mean.max(0.0);
    }
    Normal::new(g.mean, g.std).expect("validated std").sample(rng).max(0.0)
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(VertexId, VertexId)> {
    let mut links = Vec::new();
    if p <= 0.0 || n < 2 {
        return links;
    }
    if p >= 1.0 {
        for u in 0..n {
            for v in u + 1..n {
                links.push((u, v));
            }
        }
        return links;
    }
    // geometric skipping over the upper triangle
    let log_q = (1.0 - p).ln();
    let (mut u, mut v) = (0usize, 0usize);
    loop {
        let r: f64 = 1.0 - rng.random::<f64>();
        let skip = (r.ln() / log_q).floor() as usize;
        v += skip + 1;
        while u < n && v >= n {
            v = v - n + u + 2;
            u += 1;
        }
        if u + 1 >= n {
            break;
        }
        links.push((u, v));
    }
    links
}

fn preferential_attachment(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(VertexId, VertexId)> {
    let mut links = Vec::new();
    let core = (m + 1).min(n);
    for u in 0..core {
        for v in u + 1..core {
            links.push((u, v));
        }
    }
    // each endpoint occurrence is one ticket, so selection is degree-proportional
    let mut tickets: Vec<VertexId> = links.iter().flat_map(|&(u, v)| [u, v]).collect();
    for v in core..n {
        let mut chosen = HashSet::with_capacity(m);
        while chosen.len() < m.min(v) {
            let u = if tickets.is_empty() {
                rng.random_range(0..v)
            } else {
                tickets[rng.random_range(0..tickets.len())]
            };
            chosen.insert(u);
        }
        let mut chosen: Vec<_> = chosen.into_iter().collect();
        chosen.sort_unstable();
        for u in chosen {
            links.push((u, v));
            tickets.push(u);
            tickets.push(v);
        }
    }
    links
}

/// Builds a seeded synthetic instance from `config`.
pub fn synthesize_instance(config: &SynthesisConfig) -> Result<Instance, ScenarioError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n_vertices;
    let points: Vec<[f64; 2]> = (0..n).map(|_| uniform_point(&mut rng)).collect();
    let pivots = kmeans_pivots(&points, config.n_servers, rng.random())?;

    let counts = class_counts(config.n_servers);
    let classes = MachineClass::ALL
        .iter()
        .zip(counts)
        .flat_map(|(&c, k)| std::iter::repeat_n(c, k));
    let servers: Vec<EdgeServer> = pivots
        .iter()
        .zip(classes)
        .enumerate()
        .map(|(id, (&coords, class))| {
            let p = config.machine_class_params.get(class);
            EdgeServer {
                id,
                name: format!("s{id}"),
                coords,
                machine_class: class,
                alpha: p.alpha,
                beta: p.beta,
                gamma: p.gamma,
                rho: gaussian_clamped(config.maintenance_gaussian.rho, &mut rng),
                epsilon: gaussian_clamped(config.maintenance_gaussian.epsilon, &mut rng),
            }
        })
        .collect();

    let d = servers.len();
    let mut connected = vec![vec![false; d]; d];
    for (i, row) in connected.iter_mut().enumerate() {
        row[i] = true;
    }
    match config.connectivity {
        Connectivity::FullMesh => connected.iter_mut().for_each(|r| r.fill(true)),
        Connectivity::KNearest { k } => {
            for i in 0..d {
                let mut others: Vec<usize> = (0..d).filter(|&j| j != i).collect();
                others.sort_by(|&a, &b| dist(pivots[i], pivots[a]).total_cmp(&dist(pivots[i], pivots[b])).then(a.cmp(&b)));
                for &j in &others[..k] {
                    connected[i][j] = true;
                    connected[j][i] = true;
                }
            }
        }
    }
    let traffic: Vec<Vec<Option<f64>>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        Some(0.0)
                    } else if connected[i][j] {
                        Some(config.distance_factor_traffic * dist(pivots[i], pivots[j]))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let network = EdgeNetwork::new(servers, traffic)?;

    let links = match config.link_model {
        LinkModel::ErdosRenyi { p } => erdos_renyi(n, p, &mut rng),
        LinkModel::PreferentialAttachment { m } => preferential_attachment(n, m, &mut rng),
    };
    let vertices = points
        .iter()
        .enumerate()
        .map(|(v, &c)| {
            Some(VertexInfo {
                name: v.to_string(),
                coords: Some(c),
            })
        })
        .collect();
    let graph = DataGraph::new(vertices, &links)?;
    let upload = points
        .iter()
        .map(|&p| upload_row(p, &network, config.distance_factor_upload))
        .collect();
    Ok(Instance::new(network, graph, config.layer_dims.clone(), upload)?)
}

fn upload_row(p: [f64; 2], network: &EdgeNetwork, factor: f64) -> Vec<f64> {
    network.servers().iter().map(|s| factor * dist(p, s.coords)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChurnConfig {
    pub link_change_pct: f64,
    #[serde(default)]
    pub vertex_change_pct: f64,
    pub n_slots: usize,
    #[serde(default)]
    pub seed: u64,
    /// Factor for the upload costs of inserted vertices.
    #[serde(default = "SynthesisConfig::default_upload_factor")]
    pub distance_factor_upload: f64,
    /// Links attached to each inserted vertex.
    #[serde(default = "ChurnConfig::default_links_per_vertex")]
    pub links_per_new_vertex: usize,
}

impl ChurnConfig {
    fn default_links_per_vertex() -> usize {
        2
    }

    pub fn new(link_change_pct: f64, n_slots: usize, seed: u64) -> Self {
        ChurnConfig {
            link_change_pct,
            vertex_change_pct: 0.0,
            n_slots,
            seed,
            distance_factor_upload: SynthesisConfig::default_upload_factor(),
            links_per_new_vertex: Self::default_links_per_vertex(),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        for (path, x) in [
            ("link_change_pct", self.link_change_pct),
            ("vertex_change_pct", self.vertex_change_pct),
        ] {
            if !(0.0..=1.0).contains(&x) {
                return Err(ScenarioError::config(path, format!("must be in [0, 1], got {x}")));
            }
        }
        if self.n_slots == 0 {
            return Err(ScenarioError::config("n_slots", "must be at least 1"));
        }
        if !(self.distance_factor_upload.is_finite() && self.distance_factor_upload >= 0.0) {
            return Err(ScenarioError::config("distance_factor_upload", "must be a finite value >= 0"));
        }
        Ok(())
    }
}

const PAIR_RETRIES: usize = 64;

fn draw_count(mean: f64, rng: &mut ChaCha8Rng) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let x = Normal::new(mean, mean / 2.0).expect("positive std").sample(rng);
    x.round().max(0.0) as usize
}

fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

/// Generates `churn.n_slots` slots of seeded topology changes starting from
/// the instance's graph. Within a slot, events come in the order vertex
/// inserts, link inserts, link deletes, vertex deletes.
pub fn generate_trace(instance: &Instance, churn: &ChurnConfig) -> Result<Vec<SlotTrace>, ScenarioError> {
    churn.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(churn.seed);
    let mut graph = instance.graph.clone();
    let mut active: Vec<VertexId> = graph.vertices().collect();
    let mut links: Vec<(VertexId, VertexId)> = graph.links().collect();
    let mut link_pos: BTreeMap<(VertexId, VertexId), usize> =
        links.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut trace = Vec::with_capacity(churn.n_slots);

    let remove_link = |links: &mut Vec<(VertexId, VertexId)>, pos: &mut BTreeMap<_, usize>, l| {
        if let Some(i) = pos.remove(&l) {
            links.swap_remove(i);
            if i < links.len() {
                pos.insert(links[i], i);
            }
        }
    };

    for slot in 1..=churn.n_slots {
        let n_link = draw_count(churn.link_change_pct * links.len() as f64, &mut rng);
        let n_vertex = draw_count(churn.vertex_change_pct * active.len() as f64, &mut rng);
        let mut touched_pairs = HashSet::new();
        let mut touched = HashSet::new();
        let mut link_ins = Vec::new();
        let mut link_del = Vec::new();

        for _ in 0..n_link {
            if rng.random_bool(0.5) {
                if active.len() < 2 {
                    continue;
                }
                for _ in 0..PAIR_RETRIES {
                    let u = *active.choose(&mut rng).expect("non-empty");
                    let v = *active.choose(&mut rng).expect("non-empty");
                    let k = key(u, v);
                    if u != v && !link_pos.contains_key(&k) && touched_pairs.insert(k) {
                        link_ins.push(k);
                        touched.extend([u, v]);
                        break;
                    }
                }
            } else {
                for _ in 0..PAIR_RETRIES {
                    let Some(&k) = links.choose(&mut rng) else {
                        break;
                    };
                    if touched_pairs.insert(k) {
                        link_del.push(k);
                        touched.extend([k.0, k.1]);
                        break;
                    }
                }
            }
        }

        let mut vertex_ins = Vec::new();
        let mut vertex_del = Vec::new();
        let mut next_id = graph.slot_count();
        for _ in 0..n_vertex {
            if rng.random_bool(0.5) {
                let coords = uniform_point(&mut rng);
                let mut nbrs = HashSet::new();
                let want = churn.links_per_new_vertex.min(active.len());
                let mut tries = 0;
                while nbrs.len() < want && tries < PAIR_RETRIES * want {
                    nbrs.insert(*active.choose(&mut rng).expect("non-empty"));
                    tries += 1;
                }
                let mut nbrs: Vec<_> = nbrs.into_iter().collect();
                nbrs.sort_unstable();
                touched.extend(nbrs.iter().copied());
                vertex_ins.push(EvolutionEvent::VertexInsert {
                    vertex: next_id,
                    coords: Some(coords),
                    upload_cost: upload_row(coords, &instance.network, churn.distance_factor_upload),
                    links: nbrs,
                });
                next_id += 1;
            } else {
                for _ in 0..PAIR_RETRIES {
                    let Some(&v) = active.choose(&mut rng) else {
                        break;
                    };
                    if touched.insert(v) {
                        vertex_del.push(v);
                        break;
                    }
                }
            }
        }

        let mut events = vertex_ins;
        events.extend(link_ins.iter().map(|&(u, v)| EvolutionEvent::LinkInsert { u, v }));
        events.extend(link_del.iter().map(|&(u, v)| EvolutionEvent::LinkDelete { u, v }));
        events.extend(vertex_del.iter().map(|&vertex| EvolutionEvent::VertexDelete { vertex }));

        graph = crate::dynamic::apply_events(&graph, &events).expect("generated events are consistent");
        for e in &events {
            match *e {
                EvolutionEvent::VertexInsert { vertex, links: ref nbrs, .. } => {
                    active.push(vertex);
                    for &u in nbrs {
                        let k = key(u, vertex);
                        link_pos.insert(k, links.len());
                        links.push(k);
                    }
                }
                EvolutionEvent::LinkInsert { u, v } => {
                    link_pos.insert((u, v), links.len());
                    links.push((u, v));
                }
                EvolutionEvent::LinkDelete { u, v } => remove_link(&mut links, &mut link_pos, (u, v)),
                EvolutionEvent::VertexDelete { vertex } => {
                    let incident: Vec<_> = links.iter().copied().filter(|&(a, b)| a == vertex || b == vertex).collect();
                    for l in incident {
                        remove_link(&mut links, &mut link_pos, l);
                    }
                    active.retain(|&x| x != vertex);
                }
            }
        }
        trace.push(SlotTrace { slot, events });
    }
    Ok(trace)
}

fn parse_id(tok: &str, line: usize) -> Result<String, ScenarioError> {
    if tok.is_empty() {
        return Err(ScenarioError::Parse {
            line,
            message: "empty vertex id".into(),
        });
    }
    Ok(tok.to_string())
}

/// Reads a whitespace-separated edge list (`u v` per line, `#` comments) and
/// an optional `id,x,y` coordinates CSV. Vertex names are kept as written
/// and numbered in order of first appearance.
pub fn load_graph<R: BufRead, C: BufRead>(edges: R, coords: Option<C>) -> Result<DataGraph, ScenarioError> {
    let mut index: BTreeMap<String, VertexId> = BTreeMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut id_of = |name: String| {
        *index.entry(name.clone()).or_insert_with(|| {
            names.push(name);
            names.len() - 1
        })
    };
    let mut links = std::collections::BTreeSet::new();
    for (i, line) in edges.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(ScenarioError::Parse {
                line: line_no,
                message: format!("expected two vertex ids, found {}", toks.len()),
            });
        }
        let (a, b) = (parse_id(toks[0], line_no)?, parse_id(toks[1], line_no)?);
        if a == b {
            return Err(ScenarioError::SelfLoop { line: line_no, vertex: a });
        }
        let (u, v) = (id_of(a), id_of(b));
        links.insert(key(u, v));
    }
    let mut xy: Vec<Option<[f64; 2]>> = vec![None; names.len()];
    if let Some(c) = coords {
        for (i, line) in c.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = body.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(ScenarioError::Parse {
                    line: line_no,
                    message: "expected id,x,y".into(),
                });
            }
            let parsed = (f[1].parse::<f64>(), f[2].parse::<f64>());
            let (x, y) = match parsed {
                (Ok(x), Ok(y)) => (x, y),
                _ if line_no == 1 => continue, // header
                _ => {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        message: format!("invalid coordinates `{},{}`", f[1], f[2]),
                    })
                }
            };
            if let Some(&v) = index.get(f[0]) {
                xy[v] = Some([x, y]);
            }
        }
    }
    let vertices = names
        .into_iter()
        .zip(xy)
        .map(|(name, coords)| Some(VertexInfo { name, coords }))
        .collect();
    let links: Vec<_> = links.into_iter().collect();
    Ok(DataGraph::new(vertices, &links)?)
}
