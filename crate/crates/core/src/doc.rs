//! The JSON document format.
//!
//! A document carries the dual graph, the PL section, optional explicit
//! geometry and options. Rationals are strings (`"3"`, `"-5/7"`, `"inf"`)
//! so nothing is lost to floats. Geometry coordinate keys name the incident
//! point: `"e3"` for an edge end, `"e3:0"`/`"e3:1"` for the two ends of a
//! loop, `"m1"` for a marking, `"x0"` for an auxiliary point. Face indices
//! are 1-based in documents and on the command line.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ComponentGeometry, Coord, ExplicitCurve, PointRef};
use crate::graph::{DualGraph, Edge, EdgeId, GraphError, MarkingId, Vertex, VertexId};
use crate::linalg::parse_rat;
use crate::monoid::MonoidElement;
use crate::pl::PLFunction;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MarkingDoc {
    pub id: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VertexDoc {
    pub id: u32,
    pub genus: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub markings: Vec<MarkingDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeDoc {
    pub id: u32,
    pub ends: [u32; 2],
    pub delta: Vec<u64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct PlDoc {
    #[serde(default)]
    pub vertex_values: BTreeMap<String, Vec<u64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub marking_slopes: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeometryVertexDoc {
    #[serde(default = "default_model")]
    pub model: String,
    pub coords: BTreeMap<String, String>,
}

fn default_model() -> String {
    "P1".to_string()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeometryEdgeDoc {
    pub alpha: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeometryDoc {
    #[serde(default)]
    pub vertices: BTreeMap<String, GeometryVertexDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub edges: BTreeMap<String, GeometryEdgeDoc>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct OptionsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

/// The raw document as serialized.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CurveDocument {
    pub format_version: u32,
    pub monoid_rank: usize,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub pl: PlDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsDoc>,
}

#[derive(Debug, Error)]
pub enum DocError {
    #[error("syntax error: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("integrity error at {path}: {message}")]
    Integrity { path: String, message: String },
}

impl DocError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        DocError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    fn integrity(path: impl Into<String>, message: impl Into<String>) -> Self {
        DocError::Integrity {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// The validated in-memory model.
#[derive(Clone, Debug)]
pub struct CurveModel {
    pub graph: DualGraph,
    pub pl: PLFunction,
    pub geometry: Option<ExplicitCurve>,
    pub truncation: usize,
    pub mode: crate::acyclic::AcyclicityMode,
}

/// Parse and fully validate a document.
pub fn parse(bytes: &[u8]) -> Result<(CurveDocument, CurveModel), DocError> {
    let doc: CurveDocument = serde_json::from_slice(bytes)?;
    let model = validate(&doc)?;
    Ok((doc, model))
}

/// Canonical serialization (sorted keys via BTreeMap, two-space indent).
pub fn serialize(doc: &CurveDocument) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("document serializes");
    out.push('\n');
    out
}

pub fn validate(doc: &CurveDocument) -> Result<CurveModel, DocError> {
    if doc.format_version != FORMAT_VERSION {
        return Err(DocError::schema(
            "format_version",
            format!("unsupported version {}", doc.format_version),
        ));
    }
    let r = doc.monoid_rank;

    let vertices: Vec<Vertex> = doc
        .vertices
        .iter()
        .map(|v| Vertex {
            id: VertexId(v.id),
            genus: v.genus,
            markings: v.markings.iter().map(|m| MarkingId(m.id)).collect(),
        })
        .collect();
    let mut edges = Vec::new();
    for (i, e) in doc.edges.iter().enumerate() {
        if e.delta.len() != r {
            return Err(DocError::schema(
                format!("edges[{i}].delta"),
                format!(
                    "edge {} has delta of length {}, monoid_rank is {r}",
                    e.id,
                    e.delta.len()
                ),
            ));
        }
        edges.push(Edge {
            id: EdgeId(e.id),
            ends: (VertexId(e.ends[0]), VertexId(e.ends[1])),
            delta: MonoidElement::from_u64s(&e.delta),
        });
    }
    let graph = DualGraph::new(r, vertices, edges).map_err(|err| match err {
        GraphError::DuplicateId(id) => {
            DocError::integrity("vertices/edges", format!("duplicate id {id}"))
        }
        GraphError::UnknownVertex(e, v) => {
            DocError::integrity("edges", format!("edge {e} references unknown vertex {v}"))
        }
        other => DocError::integrity("graph", other.to_string()),
    })?;

    // PL function: all vertices must carry values (length r); absent map
    // entries are rejected rather than defaulted
    let mut vertex_values = BTreeMap::new();
    for v in graph.vertices() {
        let key = v.id.0.to_string();
        let coords = doc.pl.vertex_values.get(&key).ok_or_else(|| {
            DocError::schema(
                format!("pl.vertex_values.{key}"),
                "missing value for vertex",
            )
        })?;
        if coords.len() != r {
            return Err(DocError::schema(
                format!("pl.vertex_values.{key}"),
                format!("value has length {}, monoid_rank is {r}", coords.len()),
            ));
        }
        vertex_values.insert(
            v.id,
            MonoidElement::from_coords(coords.iter().map(|&c| BigUint::from(c)).collect()),
        );
    }
    for key in doc.pl.vertex_values.keys() {
        let known = key
            .parse::<u32>()
            .ok()
            .is_some_and(|id| graph.vertex(VertexId(id)).is_ok());
        if !known {
            return Err(DocError::integrity(
                format!("pl.vertex_values.{key}"),
                "value for unknown vertex",
            ));
        }
    }
    let mut marking_slopes = BTreeMap::new();
    let all_markings: BTreeMap<String, MarkingId> = graph
        .vertices()
        .flat_map(|v| v.markings.iter().map(|m| (m.0.to_string(), *m)))
        .collect();
    for (key, slope) in &doc.pl.marking_slopes {
        let id = all_markings.get(key).ok_or_else(|| {
            DocError::integrity(
                format!("pl.marking_slopes.{key}"),
                "slope for unknown marking",
            )
        })?;
        marking_slopes.insert(*id, *slope);
    }
    for id in all_markings.values() {
        marking_slopes.entry(*id).or_insert(0);
    }
    let pl = PLFunction {
        vertex_values,
        marking_slopes,
    };
    crate::pl::validate_pl(&graph, &pl)
        .map_err(|e| DocError::integrity("pl", e.to_string()))?;

    let geometry = match &doc.geometry {
        None => None,
        Some(geo) => Some(validate_geometry(geo, &graph)?),
    };

    let truncation = doc
        .options
        .as_ref()
        .and_then(|o| o.truncation)
        .unwrap_or(crate::contraction::DEFAULT_POLE_BOUND);
    let mode = match doc.options.as_ref().and_then(|o| o.mode.as_deref()) {
        None | Some("guaranteed") => crate::acyclic::AcyclicityMode::Guaranteed,
        Some("generic") => crate::acyclic::AcyclicityMode::Generic,
        Some(other) => {
            return Err(DocError::schema(
                "options.mode",
                format!("unknown mode {other:?}"),
            ))
        }
    };

    Ok(CurveModel {
        graph,
        pl,
        geometry,
        truncation,
        mode,
    })
}

fn parse_point_key(key: &str) -> Option<PointRef> {
    if let Some(rest) = key.strip_prefix('e') {
        if let Some((id, end)) = rest.split_once(':') {
            return Some(PointRef::EdgeEnd(
                EdgeId(id.parse().ok()?),
                end.parse().ok()?,
            ));
        }
        return Some(PointRef::EdgeEnd(EdgeId(rest.parse().ok()?), 0));
    }
    if let Some(rest) = key.strip_prefix('m') {
        return Some(PointRef::Marking(MarkingId(rest.parse().ok()?)));
    }
    if let Some(rest) = key.strip_prefix('x') {
        return Some(PointRef::Aux(rest.parse().ok()?));
    }
    None
}

fn parse_coord(s: &str) -> Option<Coord> {
    if s == "inf" {
        return Some(Coord::Infinity);
    }
    parse_rat(s).map(Coord::Finite)
}

fn validate_geometry(geo: &GeometryDoc, graph: &DualGraph) -> Result<ExplicitCurve, DocError> {
    let mut curve = ExplicitCurve::default();
    for (vkey, vgeo) in &geo.vertices {
        let path = format!("geometry.vertices.{vkey}");
        let vid: u32 = vkey
            .parse()
            .map_err(|_| DocError::schema(&path, "vertex key must be an integer id"))?;
        let vid = VertexId(vid);
        graph
            .vertex(vid)
            .map_err(|_| DocError::integrity(&path, "geometry for unknown vertex"))?;
        if vgeo.model != "P1" {
            return Err(DocError::schema(
                format!("{path}.model"),
                format!("unsupported model {:?}", vgeo.model),
            ));
        }
        let mut comp = ComponentGeometry::default();
        for (pkey, raw) in &vgeo.coords {
            let ppath = format!("{path}.coords.{pkey}");
            let p = parse_point_key(pkey)
                .ok_or_else(|| DocError::schema(&ppath, "bad point key"))?;
            match p {
                PointRef::EdgeEnd(e, end) => {
                    let edge = graph
                        .edge(e)
                        .map_err(|_| DocError::integrity(&ppath, "unknown edge"))?;
                    if !edge.touches(vid) {
                        return Err(DocError::integrity(&ppath, "edge not incident"));
                    }
                    if edge.is_loop() && end > 1 {
                        return Err(DocError::schema(&ppath, "loop end must be 0 or 1"));
                    }
                    if !edge.is_loop() && end != 0 {
                        return Err(DocError::schema(&ppath, "only loops have end labels"));
                    }
                }
                PointRef::Marking(m) => {
                    let vertex = graph.vertex(vid).expect("checked");
                    if !vertex.markings.contains(&m) {
                        return Err(DocError::integrity(&ppath, "marking not on this vertex"));
                    }
                }
                PointRef::Aux(_) => {}
            }
            let coord = parse_coord(raw)
                .ok_or_else(|| DocError::schema(&ppath, format!("bad coordinate {raw:?}")))?;
            comp.coords.insert(p, coord);
        }
        curve.components.insert(vid, comp);
    }
    for (ekey, egeo) in &geo.edges {
        let path = format!("geometry.edges.{ekey}");
        let eid: u32 = ekey
            .parse()
            .map_err(|_| DocError::schema(&path, "edge key must be an integer id"))?;
        let eid = EdgeId(eid);
        graph
            .edge(eid)
            .map_err(|_| DocError::integrity(&path, "geometry for unknown edge"))?;
        let alpha = parse_rat(&egeo.alpha)
            .ok_or_else(|| DocError::schema(format!("{path}.alpha"), "bad rational"))?;
        curve.alphas.insert(eid, alpha);
    }
    curve
        .validate(graph)
        .map_err(|e| DocError::integrity("geometry", e.to_string()))?;
    Ok(curve)
}

/// Rebuild a document from model pieces; used by generators and tests.
pub fn document_from_model(
    graph: &DualGraph,
    pl: &PLFunction,
    geometry: Option<&ExplicitCurve>,
) -> CurveDocument {
    use num_traits::ToPrimitive;
    let vertices = graph
        .vertices()
        .map(|v| VertexDoc {
            id: v.id.0,
            genus: v.genus,
            markings: v.markings.iter().map(|m| MarkingDoc { id: m.0 }).collect(),
        })
        .collect();
    let edges = graph
        .edges()
        .map(|e| EdgeDoc {
            id: e.id.0,
            ends: [e.ends.0 .0, e.ends.1 .0],
            delta: e
                .delta
                .coords()
                .iter()
                .map(|c| c.to_u64().expect("desk-scale delta"))
                .collect(),
        })
        .collect();
    let pl_doc = PlDoc {
        vertex_values: pl
            .vertex_values
            .iter()
            .map(|(v, val)| {
                (
                    v.0.to_string(),
                    val.coords()
                        .iter()
                        .map(|c| c.to_u64().expect("desk-scale value"))
                        .collect(),
                )
            })
            .collect(),
        marking_slopes: pl
            .marking_slopes
            .iter()
            .filter(|(_, &s)| s != 0)
            .map(|(m, &s)| (m.0.to_string(), s))
            .collect(),
    };
    let geometry = geometry.map(|curve| GeometryDoc {
        vertices: curve
            .components
            .iter()
            .map(|(v, comp)| {
                (
                    v.0.to_string(),
                    GeometryVertexDoc {
                        model: "P1".to_string(),
                        coords: comp
                            .coords
                            .iter()
                            .map(|(p, c)| (p.to_string(), c.to_string()))
                            .collect(),
                    },
                )
            })
            .collect(),
        edges: curve
            .alphas
            .iter()
            .map(|(e, a)| {
                (
                    e.0.to_string(),
                    GeometryEdgeDoc {
                        alpha: crate::linalg::format_rat(a),
                    },
                )
            })
            .collect(),
    });
    CurveDocument {
        format_version: FORMAT_VERSION,
        monoid_rank: graph.rank(),
        vertices,
        edges,
        pl: pl_doc,
        geometry,
        options: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> String {
        serde_json::json!({
            "format_version": 1,
            "monoid_rank": 0,
            "vertices": [{"id": 0, "genus": 0}],
            "edges": [],
            "pl": {"vertex_values": {"0": []}}
        })
        .to_string()
    }

    #[test]
    fn minimal_document_parses() {
        let (_, model) = parse(minimal().as_bytes()).unwrap();
        assert_eq!(model.graph.num_vertices(), 1);
        assert_eq!(model.graph.rank(), 0);
    }

    #[test]
    fn wrong_delta_length_names_the_edge() {
        let text = serde_json::json!({
            "format_version": 1,
            "monoid_rank": 2,
            "vertices": [{"id": 0, "genus": 0}, {"id": 1, "genus": 0}],
            "edges": [{"id": 7, "ends": [0, 1], "delta": [1]}],
            "pl": {"vertex_values": {"0": [0, 0], "1": [0, 0]}}
        })
        .to_string();
        let err = parse(text.as_bytes()).unwrap_err();
        match err {
            DocError::Schema { path, message } => {
                assert_eq!(path, "edges[0].delta");
                assert!(message.contains("edge 7"));
            }
            other => panic!("expected schema error, got {other}"),
        }
    }

    #[test]
    fn duplicate_vertex_id_is_integrity_error() {
        let text = serde_json::json!({
            "format_version": 1,
            "monoid_rank": 0,
            "vertices": [{"id": 0, "genus": 0}, {"id": 0, "genus": 1}],
            "edges": [],
            "pl": {"vertex_values": {"0": []}}
        })
        .to_string();
        assert!(matches!(
            parse(text.as_bytes()),
            Err(DocError::Integrity { .. })
        ));
    }

    #[test]
    fn unknown_vertex_value_key_rejected() {
        let text = serde_json::json!({
            "format_version": 1,
            "monoid_rank": 0,
            "vertices": [{"id": 0, "genus": 0}],
            "edges": [],
            "pl": {"vertex_values": {"0": [], "7": []}}
        })
        .to_string();
        match parse(text.as_bytes()) {
            Err(DocError::Integrity { path, .. }) => {
                assert_eq!(path, "pl.vertex_values.7");
            }
            other => panic!("expected integrity error, got {other:?}"),
        }
    }

    #[test]
    fn serialize_round_trip_is_stable() {
        let (doc, model) = parse(minimal().as_bytes()).unwrap();
        let text = serialize(&doc);
        let (doc2, _) = parse(text.as_bytes()).unwrap();
        assert_eq!(doc, doc2);
        assert_eq!(serialize(&doc2), text);
        let rebuilt = document_from_model(&model.graph, &model.pl, None);
        assert_eq!(serialize(&rebuilt), text);
    }

    #[test]
    fn syntax_error_is_distinct() {
        assert!(matches!(parse(b"{not json"), Err(DocError::Syntax(_))));
    }
}
