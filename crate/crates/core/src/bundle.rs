//! Multidegrees of associated line bundles and mesa restriction shapes.
//!
//! The line bundle of a PL section restricts to each component with degree
//! the sum of the outgoing slopes at its special points: the half-edge slope
//! `n_h` at a marking, `(f_w − f_v)/δ_e` at a node toward `w`. The two ends
//! of a loop carry opposite slopes and contribute net zero.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::graph::{DualGraph, EdgeId, MarkingId, VertexId};
use crate::pl::{edge_slope, Mesa, PLFunction, PlError};

/// A point incident to a vertex: an edge end or a marking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum IncidencePoint {
    /// Edge end; the index distinguishes the two ends of a loop.
    Edge(EdgeId, u8),
    Marking(MarkingId),
}

/// Per-component degrees of the line bundle of a PL section.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Multidegree {
    pub per_vertex: BTreeMap<VertexId, BigInt>,
    pub total: BigInt,
}

impl Multidegree {
    pub fn neg(&self) -> Multidegree {
        Multidegree {
            per_vertex: self
                .per_vertex
                .iter()
                .map(|(v, d)| (*v, -d.clone()))
                .collect(),
            total: -self.total.clone(),
        }
    }

    pub fn degree(&self, v: VertexId) -> BigInt {
        self.per_vertex.get(&v).cloned().unwrap_or_default()
    }
}

/// Outgoing slope of `pl` at a point incident to `v`. For a loop the two
/// ends carry a witness `m` and its negative; the net contribution is zero
/// and the chosen witness is 0.
pub fn outgoing_slope(
    g: &DualGraph,
    pl: &PLFunction,
    v: VertexId,
    p: IncidencePoint,
) -> Result<BigInt, PlError> {
    match p {
        IncidencePoint::Marking(m) => Ok(BigInt::from(pl.slope(m))),
        IncidencePoint::Edge(e, _end) => edge_slope(g, pl, v, e),
    }
}

/// Degree of `𝒪(σ)` on every component: the sum of outgoing slopes over the
/// incident edges and markings.
pub fn multidegree(g: &DualGraph, pl: &PLFunction) -> Result<Multidegree, PlError> {
    crate::pl::validate_pl(g, pl)?;
    let mut per_vertex = BTreeMap::new();
    for v in g.vertices() {
        let mut deg = BigInt::zero();
        for e in g.edges() {
            if e.is_loop() {
                continue; // ends cancel
            }
            if e.touches(v.id) {
                deg += edge_slope(g, pl, v.id, e.id)?;
            }
        }
        for m in &v.markings {
            deg += BigInt::from(pl.slope(*m));
        }
        per_vertex.insert(v.id, deg);
    }
    let total = per_vertex.values().sum();
    Ok(Multidegree { per_vertex, total })
}

/// The divisor shape of `𝒪(−λ̄)` restricted to one component of the mesa
/// support: +1 at points leading away from the top (including boundary
/// edges), −1 at the point heading toward the top, nothing inside the top.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictionShape {
    pub component: VertexId,
    pub divisor: Vec<(IncidencePoint, i64)>,
}

impl RestrictionShape {
    pub fn degree(&self) -> i64 {
        self.divisor.iter().map(|(_, m)| m).sum()
    }
}

impl Serialize for IncidencePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            IncidencePoint::Edge(e, 0) => s.serialize_str(&e.to_string()),
            IncidencePoint::Edge(e, i) => s.serialize_str(&format!("{e}:{i}")),
            IncidencePoint::Marking(m) => s.serialize_str(&m.to_string()),
        }
    }
}

/// Divisor shapes of `𝒪(−λ̄)` on the support components, consistent with
/// `multidegree` by construction (asserted).
pub fn mesa_restriction_shapes(
    g: &DualGraph,
    mesa: &Mesa,
) -> Result<Vec<RestrictionShape>, PlError> {
    let md = multidegree(g, &mesa.pl)?.neg();
    let mut shapes = Vec::new();
    for &v in &mesa.support {
        let mut divisor = Vec::new();
        for e in g.edges() {
            if e.is_loop() || !e.touches(v) {
                continue;
            }
            let slope = -edge_slope(g, &mesa.pl, v, e.id)?; // slope of −λ̄
            if !slope.is_zero() {
                let m = i64::try_from(slope).expect("mesa slopes are ±1");
                divisor.push((IncidencePoint::Edge(e.id, 0), m));
            }
        }
        let shape = RestrictionShape {
            component: v,
            divisor,
        };
        debug_assert_eq!(BigInt::from(shape.degree()), md.degree(v));
        shapes.push(shape);
    }
    Ok(shapes)
}
