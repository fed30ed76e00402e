//! Piecewise linear functions and mesas.
//!
//! A PL function assigns a monoid value `f_v` to every vertex and a
//! natural-number slope `n_h` to every marking, subject to `f_v − f_w` being
//! an integer multiple of `δ_e` across every edge.
//!
//! A mesa is the plateau-shaped section `λ̄_E`: value `ρ_E` on a top `F`,
//! decreasing with slope one along the tree paths of `E` away from `F`, zero
//! outside `E`, with every path from the top to the boundary of `E` having
//! the same total length `ρ_E`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DualGraph, EdgeId, GraphError, MarkingId, VertexId};
use crate::monoid::{MonoidElement, MonoidError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLFunction {
    pub vertex_values: BTreeMap<VertexId, MonoidElement>,
    pub marking_slopes: BTreeMap<MarkingId, u64>,
}

impl PLFunction {
    pub fn zero(g: &DualGraph) -> Self {
        PLFunction {
            vertex_values: g
                .vertices()
                .map(|v| (v.id, MonoidElement::zero(g.rank())))
                .collect(),
            marking_slopes: g
                .vertices()
                .flat_map(|v| v.markings.iter().map(|&m| (m, 0)))
                .collect(),
        }
    }

    pub fn value(&self, v: VertexId) -> Option<&MonoidElement> {
        self.vertex_values.get(&v)
    }

    pub fn slope(&self, m: MarkingId) -> u64 {
        self.marking_slopes.get(&m).copied().unwrap_or(0)
    }
}

/// A single edge failing the PL condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlViolation {
    pub edge: EdgeId,
    pub reason: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlError {
    #[error("vertex {0} has no PL value")]
    MissingValue(VertexId),
    #[error("PL condition fails on {} edge(s): {}", .0.len(), describe(.0))]
    Violations(Vec<PlViolation>),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

fn describe(v: &[PlViolation]) -> String {
    v.iter()
        .map(|x| format!("{}: {}", x.edge, x.reason))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Check the multiple condition on every edge, including the degenerate
/// `δ_e = 0 ⇒ f_v = f_w`.
pub fn validate_pl(g: &DualGraph, pl: &PLFunction) -> Result<(), PlError> {
    for v in g.vertices() {
        if !pl.vertex_values.contains_key(&v.id) {
            return Err(PlError::MissingValue(v.id));
        }
    }
    let mut violations = Vec::new();
    for e in g.edges() {
        let fv = &pl.vertex_values[&e.ends.0];
        let fw = &pl.vertex_values[&e.ends.1];
        let d = fv.diff(fw)?;
        if d.integer_multiple_of(&e.delta)?.is_none() {
            let reason = if e.delta.is_zero() {
                format!("delta is 0 but values differ: {} vs {}", fv, fw)
            } else {
                format!("{} - {} is not an integer multiple of {}", fw, fv, e.delta)
            };
            violations.push(PlViolation { edge: e.id, reason });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(PlError::Violations(violations))
    }
}

/// A validated mesa: support `E`, top `F`, radius `ρ`, and the section
/// `λ̄_E` as a PL function on the whole graph (zero outside `E`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mesa {
    pub support: BTreeSet<VertexId>,
    pub top: BTreeSet<VertexId>,
    pub radius: MonoidElement,
    pub pl: PLFunction,
}

impl Mesa {
    /// `λ_E(v)`: distance from the top, i.e. `ρ − λ̄(v)`; `None` outside the
    /// support.
    pub fn distance(&self, v: VertexId) -> Option<MonoidElement> {
        if !self.support.contains(&v) {
            return None;
        }
        let val = self.pl.value(v)?;
        self.radius.checked_sub(val).ok()?
    }

    /// Edges from the support to its complement, ascending by id. Their
    /// count is the branch number `m` of the contracted singularity.
    pub fn boundary_edges(&self, g: &DualGraph) -> Vec<EdgeId> {
        g.boundary_edges(&self.support).map(|e| e.id).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MesaError {
    #[error("top is not a subset of the support")]
    TopNotInSupport,
    #[error("support or top does not induce a connected subgraph")]
    NotConnected,
    #[error("top and support have different genus ({top} vs {support})")]
    GenusMismatch { top: u64, support: u64 },
    #[error("support quotient by top is not a tree")]
    NotATree,
    #[error("support is the whole graph; the radius is undefined")]
    NoOutside,
    #[error("support is empty")]
    EmptySupport,
    #[error("boundary paths have unequal lengths: {0} via edge {1} vs {2} via edge {3}")]
    UnequalBoundaryLengths(MonoidElement, EdgeId, MonoidElement, EdgeId),
    #[error("vertex {0} is a dead end: no path from the top through it leaves the support")]
    DeadEnd(VertexId),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// Build `λ̄_E` from a support and top.
///
/// Checks, in order: `F ⊆ E` connected with equal genus (so the quotient is a
/// tree); every path from `F` to a component adjacent to `E` has one common
/// length `ρ_E`; every component of `E − F` lies on such a path.
pub fn mesa_from(
    g: &DualGraph,
    support: &BTreeSet<VertexId>,
    top: &BTreeSet<VertexId>,
) -> Result<Mesa, MesaError> {
    if support.is_empty() {
        return Err(MesaError::EmptySupport);
    }
    if !top.is_subset(support) {
        return Err(MesaError::TopNotInSupport);
    }
    if top.is_empty() || !g.is_connected(support) || !g.is_connected(top) {
        return Err(MesaError::NotConnected);
    }
    let genus_support = g.genus(support)?;
    let genus_top = g.genus(top)?;
    if genus_support != genus_top {
        return Err(MesaError::GenusMismatch {
            top: genus_top,
            support: genus_support,
        });
    }
    if support.len() == g.num_vertices() {
        return Err(MesaError::NoOutside);
    }

    // distances from the top along the unique tree paths
    let mut distance: BTreeMap<VertexId, MonoidElement> = BTreeMap::new();
    for &v in support {
        let path = g.unique_path_from_top(support, top, v).map_err(|e| match e {
            GraphError::NotATree => MesaError::NotATree,
            other => MesaError::Graph(other),
        })?;
        distance.insert(v, g.path_length(&path)?);
    }

    // condition (i): all boundary paths have the same total length
    let mut radius: Option<(MonoidElement, EdgeId)> = None;
    for e in g.boundary_edges(support) {
        let inside = if support.contains(&e.ends.0) {
            e.ends.0
        } else {
            e.ends.1
        };
        let total = distance[&inside].add(&e.delta)?;
        match &radius {
            None => radius = Some((total, e.id)),
            Some((r, first)) => {
                if *r != total {
                    return Err(MesaError::UnequalBoundaryLengths(
                        r.clone(),
                        *first,
                        total,
                        e.id,
                    ));
                }
            }
        }
    }
    let (radius, _) = radius.expect("support is proper and the graph connected");

    // condition (ii): every vertex of E − F lies on a path from the top to a
    // boundary edge. In the tree, a vertex fails exactly when no vertex at or
    // below it carries a boundary edge.
    let boundary_vertices: BTreeSet<VertexId> = g
        .boundary_edges(support)
        .flat_map(|e| [e.ends.0, e.ends.1])
        .filter(|v| support.contains(v))
        .collect();
    let mut on_exit_path: BTreeSet<VertexId> = top.clone();
    for &b in &boundary_vertices {
        let path = g.unique_path_from_top(support, top, b).expect("tree checked");
        on_exit_path.extend(path.vertices);
    }
    if let Some(&dead) = support.difference(&on_exit_path).next() {
        return Err(MesaError::DeadEnd(dead));
    }

    // assemble λ̄_E = ρ − λ_E on E, zero outside, all slopes zero
    let mut vertex_values = BTreeMap::new();
    for v in g.vertices() {
        let value = match distance.get(&v.id) {
            Some(d) => radius
                .checked_sub(d)?
                .expect("distance to the top is at most the radius"),
            None => MonoidElement::zero(g.rank()),
        };
        vertex_values.insert(v.id, value);
    }
    let marking_slopes = g
        .vertices()
        .flat_map(|v| v.markings.iter().map(|&m| (m, 0)))
        .collect();
    let pl = PLFunction {
        vertex_values,
        marking_slopes,
    };
    debug_assert!(validate_pl(g, &pl).is_ok());
    Ok(Mesa {
        support: support.clone(),
        top: top.clone(),
        radius,
        pl,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error("marking {0} has nonzero slope; a sum of mesas has slope 0 everywhere")]
    NonzeroSlope(MarkingId),
    #[error("component {{{0}}} has no unique maximal value; not a mesa")]
    NoUniqueMax(String),
    #[error("component {{{0}}} is not a mesa: {1}")]
    NotAMesa(String, MesaError),
    #[error(
        "component {{{0}}} does not have mesa shape: value at {1} is {2}, mesa shape requires {3}"
    )]
    ShapeMismatch(String, VertexId, MonoidElement, MonoidElement),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

fn set_label(s: &BTreeSet<VertexId>) -> String {
    s.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// A candidate `(support, top, radius)` triple of a PL function.
pub type MesaTriple = (BTreeSet<VertexId>, BTreeSet<VertexId>, MonoidElement);

/// The candidate triples of a PL function: supports are the connected
/// components of the nonzero locus, tops the vertices attaining the unique
/// maximal value of each component.
pub fn support_top_radius(
    g: &DualGraph,
    pl: &PLFunction,
) -> Result<Vec<MesaTriple>, DecomposeError> {
    validate_pl(g, pl)?;
    let nonzero: BTreeSet<VertexId> = g
        .vertices()
        .filter(|v| !pl.vertex_values[&v.id].is_zero())
        .map(|v| v.id)
        .collect();
    let mut out = Vec::new();
    for comp in g.components_of(&nonzero) {
        // maximal values under the coordinatewise partial order
        let mut maximal: Vec<MonoidElement> = Vec::new();
        for v in &comp {
            let val = &pl.vertex_values[v];
            let strictly_below = comp.iter().any(|w| {
                let other = &pl.vertex_values[w];
                other != val && val.leq(other).unwrap_or(false)
            });
            if !strictly_below && !maximal.contains(val) {
                maximal.push(val.clone());
            }
        }
        if maximal.len() != 1 {
            return Err(DecomposeError::NoUniqueMax(set_label(&comp)));
        }
        let rho = maximal.pop().unwrap();
        let top: BTreeSet<VertexId> = comp
            .iter()
            .filter(|v| pl.vertex_values[v] == rho)
            .copied()
            .collect();
        out.push((comp, top, rho));
    }
    Ok(out)
}

/// A decomposition of a PL section into mesas with disjoint supports,
/// together with the acyclicity verdict of the combinatorial engine for
/// each mesa.
#[derive(Clone, Debug)]
pub struct MesaDecomposition {
    pub mesas: Vec<Mesa>,
    pub verdicts: Vec<crate::acyclic::AcyclicityVerdict>,
}

impl MesaDecomposition {
    pub fn len(&self) -> usize {
        self.mesas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mesas.is_empty()
    }
}

/// Decompose a PL section as a sum of mesas with disjoint supports, or
/// report per-component diagnostics. Marking slopes must vanish everywhere.
pub fn decompose(g: &DualGraph, pl: &PLFunction) -> Result<MesaDecomposition, DecomposeError> {
    for (&m, &slope) in &pl.marking_slopes {
        if slope != 0 {
            return Err(DecomposeError::NonzeroSlope(m));
        }
    }
    let triples = support_top_radius(g, pl)?;
    let mut mesas = Vec::new();
    for (support, top, _rho) in triples {
        let mesa = mesa_from(g, &support, &top)
            .map_err(|e| DecomposeError::NotAMesa(set_label(&support), e))?;
        for &v in &support {
            if mesa.pl.vertex_values[&v] != pl.vertex_values[&v] {
                return Err(DecomposeError::ShapeMismatch(
                    set_label(&support),
                    v,
                    pl.vertex_values[&v].clone(),
                    mesa.pl.vertex_values[&v].clone(),
                ));
            }
        }
        mesas.push(mesa);
    }
    let verdicts = mesas
        .iter()
        .map(|m| {
            crate::acyclic::generic_acyclicity(g, m, crate::acyclic::AcyclicityMode::Guaranteed)
        })
        .collect();
    Ok(MesaDecomposition { mesas, verdicts })
}

/// Whether the mesa's top is exactly the core of its support.
pub fn is_small(g: &DualGraph, mesa: &Mesa) -> Result<bool, GraphError> {
    let core = g.core(&mesa.support)?;
    Ok(core == mesa.top)
}

/// Sum of PL functions (pointwise values, added slopes).
pub fn pl_sum(g: &DualGraph, parts: &[&PLFunction]) -> Result<PLFunction, MonoidError> {
    let mut vertex_values: BTreeMap<VertexId, MonoidElement> = g
        .vertices()
        .map(|v| (v.id, MonoidElement::zero(g.rank())))
        .collect();
    let mut marking_slopes: BTreeMap<MarkingId, u64> = BTreeMap::new();
    for part in parts {
        for (v, val) in &part.vertex_values {
            let cur = vertex_values.get_mut(v).expect("same graph");
            *cur = cur.add(val)?;
        }
        for (m, s) in &part.marking_slopes {
            *marking_slopes.entry(*m).or_insert(0) += s;
        }
    }
    Ok(PLFunction {
        vertex_values,
        marking_slopes,
    })
}

/// Slope of `pl` at the end of a non-loop edge seen from `v`:
/// `(f_other − f_v)/δ_e`. Loops net to zero; the chosen witness is 0.
pub(crate) fn edge_slope(
    g: &DualGraph,
    pl: &PLFunction,
    v: VertexId,
    edge: EdgeId,
) -> Result<BigInt, PlError> {
    let e = g.edge(edge)?;
    if e.is_loop() {
        return Ok(BigInt::from(0));
    }
    let w = e.other_end(v);
    let d = pl.vertex_values[&v].diff(&pl.vertex_values[&w])?;
    d.integer_multiple_of(&e.delta)?.ok_or_else(|| {
        PlError::Violations(vec![PlViolation {
            edge,
            reason: "difference is not a multiple of delta".into(),
        }])
    })
}

/// True when the mesa's PL function has slope exactly 1 across every
/// boundary edge of the support, seen from inside toward outside (λ̄ drops
/// by δ_e). Holds by construction; exposed as a check.
pub fn boundary_slope_is_one(g: &DualGraph, mesa: &Mesa) -> Result<bool, PlError> {
    for eid in mesa.boundary_edges(g) {
        let e = g.edge(eid)?;
        let inside = if mesa.support.contains(&e.ends.0) {
            e.ends.0
        } else {
            e.ends.1
        };
        let s = edge_slope(g, &mesa.pl, inside, eid)?;
        if !(-s).is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}
