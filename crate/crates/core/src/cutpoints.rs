//! Valid partition point enumeration: a topo-order prefix is a valid cut
//! iff exactly one layer in the prefix still feeds a layer outside it, so
//! a single tensor crosses the edge/cloud boundary. Parallel paths
//! collapse into indivisible blocks as a consequence.

use std::collections::BTreeSet;

use crate::graph::{DnnGraph, LayerId};

/// A valid partition position: layers at topo positions <= the position of
/// `after_layer` run on the edge, the rest on the cloud. Exactly one
/// tensor, produced by `crossing_tensor`, crosses the boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutPoint {
    pub after_layer: LayerId,
    pub crossing_tensor: LayerId,
    pub edge_set: Vec<LayerId>,
    pub cloud_set: Vec<LayerId>,
}

impl CutPoint {
    /// Output size in bytes of the tensor crossing the cut.
    pub fn crossing_bytes(&self, graph: &DnnGraph) -> u64 {
        graph.layer(self.crossing_tensor).output_bytes
    }
}

/// A maximal run of topo positions with no valid cut strictly inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub members: Vec<LayerId>,
}

/// All valid cut points of `graph`, ordered by topo prefix length.
/// The all-edge cut (cloud side empty) is excluded; a sequential N-layer
/// graph therefore has exactly N-1 cut points.
pub fn enumerate_cutpoints(graph: &DnnGraph) -> Vec<CutPoint> {
    let topo = graph.topo_order();
    let n = graph.len();
    let mut cuts = Vec::new();
    if n < 2 {
        return cuts;
    }

    // remaining[l] = consumers of l not yet absorbed into the prefix.
    let mut remaining: Vec<usize> = (0..n)
        .map(|i| graph.consumers(LayerId(i)).len())
        .collect();
    let mut crossing: BTreeSet<LayerId> = BTreeSet::new();

    for (i, &id) in topo.order.iter().enumerate() {
        for inp in &graph.layer(id).inputs {
            remaining[inp.0] -= 1;
            if remaining[inp.0] == 0 {
                crossing.remove(inp);
            }
        }
        if remaining[id.0] > 0 {
            crossing.insert(id);
        }
        if i + 1 == n {
            break; // cloud side may not be empty
        }
        if crossing.len() == 1 {
            let producer = *crossing.iter().next().unwrap();
            cuts.push(CutPoint {
                after_layer: id,
                crossing_tensor: producer,
                edge_set: topo.order[..=i].to_vec(),
                cloud_set: topo.order[i + 1..].to_vec(),
            });
        }
    }
    cuts
}

/// Like [`enumerate_cutpoints`], optionally prepending the all-cloud cut
/// (nothing on the edge; the raw input tensor crosses). Off by default to
/// match the N-1 count for sequential models.
pub fn enumerate_cutpoints_opts(graph: &DnnGraph, allow_all_cloud: bool) -> Vec<CutPoint> {
    let mut cuts = enumerate_cutpoints(graph);
    if allow_all_cloud && graph.len() >= 1 {
        let topo = graph.topo_order();
        let input = topo.order[0];
        cuts.insert(
            0,
            CutPoint {
                after_layer: input,
                crossing_tensor: input,
                edge_set: Vec::new(),
                cloud_set: topo.order.clone(),
            },
        );
    }
    cuts
}

/// Maximal runs of topo positions between consecutive cut points and the
/// graph boundaries; their concatenation covers all layers in topo order.
pub fn blocks(graph: &DnnGraph) -> Vec<Block> {
    let topo = graph.topo_order();
    let pos = topo.positions();
    let cuts = enumerate_cutpoints(graph);
    let mut boundaries: Vec<usize> = cuts.iter().map(|c| pos[c.after_layer.0] + 1).collect();
    boundaries.push(graph.len());

    let mut out = Vec::new();
    let mut start = 0;
    for b in boundaries {
        if b > start {
            out.push(Block {
                members: topo.order[start..b].to_vec(),
            });
            start = b;
        }
    }
    out
}
