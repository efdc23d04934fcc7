//! Sample statistics of generated churn traces.

use edgelayout::dynamic::EvolutionEvent;
use edgelayout::scenario::{generate_trace, synthesize_instance, ChurnConfig, LinkModel, SynthesisConfig};

#[test]
fn one_percent_churn_on_4677_links() {
    let n = 3912;
    let mut cfg = SynthesisConfig::new(n, 10, 12);
    cfg.link_model = LinkModel::ErdosRenyi {
        p: 2.0 * 4677.0 / (n as f64 * (n - 1) as f64),
    };
    let inst = synthesize_instance(&cfg).unwrap();
    let links = inst.graph.link_count() as f64;
    let trace = generate_trace(&inst, &ChurnConfig::new(0.01, 200, 13)).unwrap();
    let counts: Vec<f64> = trace
        .iter()
        .map(|s| {
            s.events
                .iter()
                .filter(|e| matches!(e, EvolutionEvent::LinkInsert { .. } | EvolutionEvent::LinkDelete { .. }))
                .count() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let std = (counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64).sqrt();
    let target = 0.01 * links;
    // standard error of the mean is about 23 / sqrt(200) = 1.6
    assert!((mean - target).abs() < 5.0, "mean {mean} vs {target}");
    assert!((std - target / 2.0).abs() < 6.0, "std {std} vs {}", target / 2.0);
}
