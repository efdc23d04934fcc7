//! Max-flow / min-cut checked against exhaustive bipartition enumeration.

mod common;

use common::rng;
use edgelayout::flow::{min_st_cut, FlowNetwork};
use rand::Rng;

fn cut_value(net: &FlowNetwork, side: &[bool]) -> f64 {
    net.arcs()
        .iter()
        .filter(|a| side[a.tail] && !side[a.head])
        .map(|a| a.capacity)
        .sum()
}

fn brute_min_cut(net: &FlowNetwork) -> f64 {
    let n = net.node_count();
    let (s, t) = (net.source(), net.sink());
    let others: Vec<usize> = (0..n).filter(|&x| x != s && x != t).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << others.len()) {
        let mut side = vec![false; n];
        side[s] = true;
        for (b, &x) in others.iter().enumerate() {
            side[x] = mask >> b & 1 == 1;
        }
        best = best.min(cut_value(net, &side));
    }
    best
}

fn random_network(r: &mut rand_chacha::ChaCha8Rng) -> FlowNetwork {
    let n = r.random_range(2..=9);
    let s = r.random_range(0..n);
    let t = (s + r.random_range(1..n)) % n;
    let mut net = FlowNetwork::new(n, s, t);
    let density = r.random_range(0.1..0.8);
    for u in 0..n {
        for v in 0..n {
            if u == v || !r.random_bool(density) {
                continue;
            }
            let cap = if r.random_bool(0.1) {
                0.0
            } else if r.random_bool(0.3) {
                r.random_range(0..10) as f64
            } else {
                r.random_range(0.0..10.0)
            };
            if u < v && r.random_bool(0.3) {
                net.add_undirected(u, v, cap);
            } else {
                net.add_arc(u, v, cap);
            }
        }
    }
    net
}

#[test]
fn five_hundred_random_networks_match_enumeration() {
    let mut r = rng(500);
    for case in 0..500 {
        let net = random_network(&mut r);
        let cut = min_st_cut(&net);
        let brute = brute_min_cut(&net);
        let tol = 1e-9 * brute.max(1.0);
        assert!((cut.flow_value - brute).abs() <= tol, "case {case}: flow {} vs {brute}", cut.flow_value);
        assert!(cut.source_side[net.source()] && !cut.source_side[net.sink()], "case {case}");
        assert!((cut_value(&net, &cut.source_side) - brute).abs() <= tol, "case {case}: side is not a min cut");
        assert!((cut.cut_capacity(&net) - brute).abs() <= tol, "case {case}");
    }
}

#[test]
fn source_side_is_minimal() {
    // two min cuts of equal value: {s} and {s, a}; reachability picks {s}
    let mut net = FlowNetwork::new(3, 0, 2);
    net.add_arc(0, 1, 1.0);
    net.add_arc(1, 2, 1.0);
    let cut = min_st_cut(&net);
    assert_eq!(cut.source_side, vec![true, false, false]);
}
