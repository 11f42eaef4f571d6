//! DNN graph representation: a validated DAG of layers with per-device
//! base latencies and output tensor sizes.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense layer index, 0..N-1 within a graph.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct LayerId(pub usize);

impl std::fmt::Display for LayerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerKind {
    FullyConnected,
    Convolution,
    Pooling,
    Activation,
    Softmax,
    Input,
    #[serde(other)]
    Other,
}

/// One layer of the network with its measured unstressed compute time
/// per device profile and the size of its output tensor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerProfile {
    pub id: LayerId,
    pub name: String,
    pub kind: LayerKind,
    pub inputs: Vec<LayerId>,
    pub output_bytes: u64,
    /// Unstressed per-layer compute time in seconds, per device profile.
    pub base_latency: BTreeMap<String, f64>,
}

/// Deterministic topological order over a graph's layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopoOrder {
    pub order: Vec<LayerId>,
}

impl TopoOrder {
    /// position[id] = index of the layer in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0usize; self.order.len()];
        for (i, id) in self.order.iter().enumerate() {
            pos[id.0] = i;
        }
        pos
    }
}

/// A validated DNN graph. Immutable after construction; all operations
/// over it are pure.
#[derive(Debug, Clone)]
pub struct DnnGraph {
    name: String,
    layers: Vec<LayerProfile>,
    device_profiles: BTreeSet<String>,
    consumers: Vec<Vec<LayerId>>,
}

#[derive(Debug, Deserialize)]
struct RawLayer {
    id: i64,
    name: Option<String>,
    kind: Option<LayerKind>,
    #[serde(default)]
    inputs: Vec<i64>,
    output_bytes: i64,
    base_latency: BTreeMap<String, f64>,
    #[serde(flatten)]
    extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Deserialize)]
struct RawModel {
    name: String,
    layers: Vec<RawLayer>,
    #[serde(flatten)]
    extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Serialize)]
struct OutLayer<'a> {
    id: LayerId,
    name: &'a str,
    kind: LayerKind,
    inputs: &'a [LayerId],
    output_bytes: u64,
    base_latency: &'a BTreeMap<String, f64>,
}

#[derive(Debug, Serialize)]
struct OutModel<'a> {
    name: &'a str,
    layers: Vec<OutLayer<'a>>,
}

impl DnnGraph {
    /// Build and validate a graph from already-normalized layers.
    /// Layer ids must be dense 0..N-1 matching their position.
    pub fn new(name: String, layers: Vec<LayerProfile>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Validation("model has no layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.id.0 != i {
                return Err(Error::Validation(format!(
                    "layer `{}` has id {} but position {}",
                    l.name, l.id, i
                )));
            }
            for v in l.base_latency.values() {
                if !v.is_finite() || *v < 0.0 {
                    return Err(Error::Validation(format!(
                        "layer `{}` has negative or non-finite base latency",
                        l.name
                    )));
                }
            }
            for inp in &l.inputs {
                if inp.0 >= layers.len() {
                    return Err(Error::Validation(format!(
                        "layer `{}` references unknown input layer {}",
                        l.name, inp
                    )));
                }
                if *inp == l.id {
                    return Err(Error::Validation(format!(
                        "layer `{}` lists itself as an input",
                        l.name
                    )));
                }
            }
        }

        // Device profiles must be consistent across all layers.
        let device_profiles: BTreeSet<String> = layers[0].base_latency.keys().cloned().collect();
        if device_profiles.is_empty() {
            return Err(Error::Validation(format!(
                "layer `{}` has no device profile latencies",
                layers[0].name
            )));
        }
        for l in &layers {
            let keys: BTreeSet<&String> = l.base_latency.keys().collect();
            for p in &device_profiles {
                if !keys.contains(p) {
                    return Err(Error::Validation(format!(
                        "layer `{}` is missing device profile `{}`",
                        l.name, p
                    )));
                }
            }
            if keys.len() != device_profiles.len() {
                return Err(Error::Validation(format!(
                    "layer `{}` declares device profiles absent from other layers",
                    l.name
                )));
            }
        }

        let mut consumers: Vec<Vec<LayerId>> = vec![Vec::new(); layers.len()];
        for l in &layers {
            for inp in &l.inputs {
                consumers[inp.0].push(l.id);
            }
        }
        for c in consumers.iter_mut() {
            c.sort();
            c.dedup();
        }

        let g = DnnGraph {
            name,
            layers,
            device_profiles,
            consumers,
        };
        g.validate_shape()?;
        Ok(g)
    }

    fn validate_shape(&self) -> Result<()> {
        // Cycle check first: a back edge also destroys the sink count and
        // would otherwise be reported as a missing output layer.
        let order = self.try_topo()?;
        debug_assert_eq!(order.order.len(), self.layers.len());

        let sources: Vec<&LayerProfile> =
            self.layers.iter().filter(|l| l.inputs.is_empty()).collect();
        if sources.len() != 1 {
            let names: Vec<&str> = sources.iter().map(|l| l.name.as_str()).collect();
            return Err(Error::Validation(format!(
                "expected exactly one input layer, found {} ({:?})",
                sources.len(),
                names
            )));
        }
        let sinks: Vec<&LayerProfile> = self
            .layers
            .iter()
            .filter(|l| self.consumers[l.id.0].is_empty())
            .collect();
        if sinks.len() != 1 {
            let names: Vec<&str> = sinks.iter().map(|l| l.name.as_str()).collect();
            return Err(Error::Validation(format!(
                "expected exactly one output layer, found {} ({:?})",
                sinks.len(),
                names
            )));
        }

        // Weak connectivity.
        let n = self.layers.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in self.layers[u]
                .inputs
                .iter()
                .chain(self.consumers[u].iter())
            {
                if !seen[v.0] {
                    seen[v.0] = true;
                    stack.push(v.0);
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Validation(format!(
                "graph is not connected: layer `{}` is unreachable",
                self.layers[i].name
            )));
        }
        Ok(())
    }

    fn try_topo(&self) -> Result<TopoOrder> {
        let n = self.layers.len();
        let mut indeg: Vec<usize> = self.layers.iter().map(|l| l.inputs.len()).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
        for (i, d) in indeg.iter().enumerate() {
            if *d == 0 {
                ready.push(Reverse(i));
            }
        }
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(u)) = ready.pop() {
            order.push(LayerId(u));
            for v in &self.consumers[u] {
                indeg[v.0] -= 1;
                if indeg[v.0] == 0 {
                    ready.push(Reverse(v.0));
                }
            }
        }
        if order.len() != n {
            let stuck = indeg
                .iter()
                .enumerate()
                .find(|(_, d)| **d > 0)
                .map(|(i, _)| self.layers[i].name.clone())
                .unwrap_or_default();
            return Err(Error::Validation(format!(
                "graph contains a cycle through layer `{}`",
                stuck
            )));
        }
        Ok(TopoOrder { order })
    }

    /// Deterministic topological order: among ready layers, smallest id first.
    /// For a sequential chain this is the identity permutation.
    pub fn topo_order(&self) -> TopoOrder {
        // Validity is guaranteed at construction.
        self.try_topo().expect("validated graph is acyclic")
    }

    /// True iff every layer has at most one input and at most one consumer.
    pub fn is_sequential(&self) -> bool {
        self.layers.iter().all(|l| l.inputs.len() <= 1)
            && self.consumers.iter().all(|c| c.len() <= 1)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layers(&self) -> &[LayerProfile] {
        &self.layers
    }

    pub fn layer(&self, id: LayerId) -> &LayerProfile {
        &self.layers[id.0]
    }

    pub fn consumers(&self, id: LayerId) -> &[LayerId] {
        &self.consumers[id.0]
    }

    pub fn device_profiles(&self) -> &BTreeSet<String> {
        &self.device_profiles
    }

    pub fn has_profile(&self, profile: &str) -> bool {
        self.device_profiles.contains(profile)
    }

    /// Parse and validate a model document. Ids are normalized to 0..N-1
    /// in declaration order; unknown fields are ignored with a warning.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawModel =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        for k in raw.extra.keys() {
            log::warn!("ignoring unknown model field `{}`", k);
        }
        if raw.layers.is_empty() {
            return Err(Error::Validation("model has no layers".into()));
        }

        // Map declared ids to dense indices in declaration order.
        let mut id_map: BTreeMap<i64, usize> = BTreeMap::new();
        for (i, l) in raw.layers.iter().enumerate() {
            if id_map.insert(l.id, i).is_some() {
                return Err(Error::Validation(format!("duplicate layer id {}", l.id)));
            }
        }

        let mut layers = Vec::with_capacity(raw.layers.len());
        for (i, l) in raw.layers.iter().enumerate() {
            let name = l.name.clone().unwrap_or_else(|| format!("layer{}", l.id));
            for k in l.extra.keys() {
                // A `flops` field is permitted in the schema but unused here.
                log::warn!("layer `{}`: ignoring unknown field `{}`", name, k);
            }
            if l.output_bytes < 0 {
                return Err(Error::Validation(format!(
                    "layer `{}` has negative output_bytes",
                    name
                )));
            }
            let mut inputs = Vec::with_capacity(l.inputs.len());
            for inp in &l.inputs {
                let idx = id_map.get(inp).ok_or_else(|| {
                    Error::Validation(format!(
                        "layer `{}` references unknown input layer {}",
                        name, inp
                    ))
                })?;
                inputs.push(LayerId(*idx));
            }
            layers.push(LayerProfile {
                id: LayerId(i),
                name,
                kind: l.kind.unwrap_or(LayerKind::Other),
                inputs,
                output_bytes: l.output_bytes as u64,
                base_latency: l.base_latency.clone(),
            });
        }
        DnnGraph::new(raw.name, layers)
    }

    pub fn from_json_reader<R: std::io::Read>(mut r: R) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        Self::from_json_str(&text)
    }

    /// Serialize to the model document schema. Round-trips through
    /// `from_json_str` on valid graphs.
    pub fn to_json_string(&self) -> String {
        let out = OutModel {
            name: &self.name,
            layers: self
                .layers
                .iter()
                .map(|l| OutLayer {
                    id: l.id,
                    name: &l.name,
                    kind: l.kind,
                    inputs: &l.inputs,
                    output_bytes: l.output_bytes,
                    base_latency: &l.base_latency,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&out).expect("graph serialization cannot fail")
    }
}
