//! JSON file formats for instances, layouts and evolution traces.
//!
//! An instance file has the sections `servers`, `connectivity`, `traffic`
//! (`null` for unreachable pairs), `vertices` (`null` for deleted slots),
//! `links` (each undirected link once), `layer_dims` and `upload_cost` (one
//! row per vertex slot). A layout file maps vertex ids to server ids.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamic::SlotTrace;
use crate::error::{FormatError, ModelError};
use crate::model::{DataGraph, EdgeNetwork, EdgeServer, GnnModelSpec, GraphLayout, Instance, ServerId, VertexId, VertexInfo};

/// How a synthesized instance was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    /// Hex SHA-256 of the canonical config JSON.
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub servers: Vec<EdgeServer>,
    pub connectivity: Vec<Vec<bool>>,
    pub traffic: Vec<Vec<Option<f64>>>,
    pub vertices: Vec<Option<VertexInfo>>,
    pub links: Vec<(VertexId, VertexId)>,
    pub layer_dims: Vec<usize>,
    pub upload_cost: Vec<Vec<f64>>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance, provenance: Option<Provenance>) -> Self {
        InstanceFile {
            provenance,
            servers: instance.network.servers().to_vec(),
            connectivity: instance.network.connectivity_matrix(),
            traffic: instance.network.traffic_matrix(),
            vertices: instance.graph.slots().to_vec(),
            links: instance.graph.links().collect(),
            layer_dims: instance.model.dims().to_vec(),
            upload_cost: instance.upload_matrix(),
        }
    }

    pub fn into_instance(self) -> Result<Instance, FormatError> {
        let network = EdgeNetwork::with_connectivity(self.servers, &self.connectivity, self.traffic)?;
        let graph = DataGraph::new(self.vertices, &self.links)?;
        let model = GnnModelSpec::new(self.layer_dims)?;
        Ok(Instance::new(network, graph, model, self.upload_cost)?)
    }
}

pub fn instance_to_json(instance: &Instance, provenance: Option<Provenance>) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(instance, provenance)).expect("instance serializes")
}

pub fn instance_from_json(text: &str) -> Result<(Instance, Option<Provenance>), FormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let provenance = file.provenance.clone();
    Ok((file.into_instance()?, provenance))
}

pub fn layout_to_json(layout: &GraphLayout) -> String {
    let map: BTreeMap<VertexId, ServerId> = layout.iter().collect();
    serde_json::to_string_pretty(&map).expect("layout serializes")
}

pub fn layout_from_json(text: &str) -> Result<GraphLayout, FormatError> {
    let map: BTreeMap<VertexId, ServerId> = serde_json::from_str(text)?;
    let mut layout = GraphLayout::default();
    for (v, s) in map {
        layout.set(v, s);
    }
    Ok(layout)
}

/// Reads a layout and checks it against `instance`.
pub fn layout_for(text: &str, instance: &Instance) -> Result<GraphLayout, FormatError> {
    let layout = layout_from_json(text)?;
    if let Some((v, _)) = layout.iter().find(|&(v, _)| !instance.graph.is_active(v)) {
        return Err(ModelError::UnknownVertex(v).into());
    }
    let layout = layout.restricted_to(&instance.graph);
    layout.validate(instance)?;
    Ok(layout)
}

pub fn trace_to_json(trace: &[SlotTrace]) -> String {
    serde_json::to_string_pretty(trace).expect("trace serializes")
}

pub fn trace_from_json(text: &str) -> Result<Vec<SlotTrace>, FormatError> {
    Ok(serde_json::from_str(text)?)
}
