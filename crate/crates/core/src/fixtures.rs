//! Synthetic model generators: deterministic graph fixtures with plausible
//! per-layer latencies and tensor sizes for sweeps and simulations.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DnnGraph, LayerId, LayerKind, LayerProfile};

fn kind_for(i: usize, n: usize) -> LayerKind {
    if i == 0 {
        LayerKind::Input
    } else if i + 1 == n {
        LayerKind::Softmax
    } else {
        match i % 3 {
            0 => LayerKind::Pooling,
            1 => LayerKind::Convolution,
            _ => LayerKind::Activation,
        }
    }
}

fn synth_layer(
    i: usize,
    n: usize,
    inputs: Vec<LayerId>,
    rng: &mut ChaCha8Rng,
) -> LayerProfile {
    let edge = rng.gen_range(0.005..0.05);
    let cloud = edge * rng.gen_range(0.1..0.5);
    let output_bytes = if i == 0 {
        153_600 // ~150 KB input image
    } else {
        rng.gen_range(10_000..400_000)
    };
    let mut base_latency = BTreeMap::new();
    base_latency.insert("edge".to_string(), edge);
    base_latency.insert("cloud".to_string(), cloud);
    LayerProfile {
        id: LayerId(i),
        name: format!("layer{}", i + 1),
        kind: kind_for(i, n),
        inputs,
        output_bytes,
        base_latency,
    }
}

fn build(name: &str, n: usize, edges: &[(usize, usize)], seed: u64) -> DnnGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = (0..n)
        .map(|i| {
            let inputs = edges
                .iter()
                .filter(|(_, to)| *to == i)
                .map(|(from, _)| LayerId(*from))
                .collect();
            synth_layer(i, n, inputs, &mut rng)
        })
        .collect();
    DnnGraph::new(name.to_string(), layers).expect("fixture graphs are valid")
}

/// A sequential chain of `n` layers.
pub fn chain(n: usize, seed: u64) -> DnnGraph {
    chain_named(&format!("chain{n}"), n, seed)
}

/// A sequential chain with an explicit model name.
pub fn chain_named(name: &str, n: usize, seed: u64) -> DnnGraph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    build(name, n, &edges, seed)
}

/// 0 -> {1, 2} -> 3.
pub fn diamond() -> DnnGraph {
    build("diamond", 4, &[(0, 1), (0, 2), (1, 3), (2, 3)], 11)
}

/// An 11-layer non-sequential graph: layer 1 fans out into two parallel
/// branches that rejoin at layer 9, followed by layers 10 and 11
/// (1-based naming). Layers 2-9 form one indivisible block.
pub fn fig2() -> DnnGraph {
    let edges = [
        (0, 1),
        (1, 2),
        (2, 3),
        (0, 4),
        (4, 5),
        (5, 6),
        (6, 7),
        (3, 8),
        (7, 8),
        (8, 9),
        (9, 10),
    ];
    build("fig2", 11, &edges, 13)
}

/// Two-layer chain with explicit latencies and crossing size; handy for
/// hand-checkable cost arithmetic.
pub fn two_layer(edge_latency_s: f64, cloud_latency_s: f64, crossing_bytes: u64) -> DnnGraph {
    let mk = |i: usize, e: f64, c: f64, bytes: u64, inputs: Vec<LayerId>| LayerProfile {
        id: LayerId(i),
        name: format!("layer{}", i + 1),
        kind: if i == 0 {
            LayerKind::Input
        } else {
            LayerKind::Softmax
        },
        inputs,
        output_bytes: bytes,
        base_latency: BTreeMap::from([("edge".to_string(), e), ("cloud".to_string(), c)]),
    };
    DnnGraph::new(
        "two-layer".to_string(),
        vec![
            mk(0, edge_latency_s, edge_latency_s * 0.5, crossing_bytes, vec![]),
            mk(1, cloud_latency_s * 2.0, cloud_latency_s, 1_000, vec![LayerId(0)]),
        ],
    )
    .unwrap()
}

/// Chain fixture sized like one of the sequential Table-style models.
pub fn table1_like(model: &str, seed: u64) -> Result<DnnGraph> {
    let n = match model.to_ascii_lowercase().as_str() {
        "vgg16" => 23,
        "vgg19" => 26,
        "mobilenet" => 93,
        "alexnet" => 25,
        "lenet" => 11,
        other => {
            return Err(Error::Validation(format!(
                "unknown sequential model shape `{other}` \
                 (expected vgg16|vgg19|mobilenet|alexnet|lenet)"
            )))
        }
    };
    Ok(chain_named(&model.to_ascii_lowercase(), n, seed))
}

/// Random valid DAG with 2..=max_nodes layers: single source, single sink,
/// acyclic, weakly connected. Deterministic for a fixed seed.
pub fn random_dag(max_nodes: usize, seed: u64) -> DnnGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_nodes.max(2));
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 1..n {
        edges.push((rng.gen_range(0..i), i));
        // occasional extra fan-in
        while i >= 2 && rng.gen_bool(0.3) {
            let from = rng.gen_range(0..i);
            if !edges.contains(&(from, i)) {
                edges.push((from, i));
            }
        }
    }
    // Route every dangling sink into the last layer.
    for i in 0..n - 1 {
        if !edges.iter().any(|(from, _)| *from == i) {
            edges.push((i, n - 1));
        }
    }
    build(&format!("rand{n}-{seed}"), n, &edges, seed ^ 0x9e37_79b9)
}
