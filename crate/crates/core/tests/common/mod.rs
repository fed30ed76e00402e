#![allow(dead_code)]

//! Shared generators for the integration suites: random graphs, mesas with
//! prescribed genus, and gauge-consistent explicit realizations.

use std::collections::BTreeSet;

use mesa_core::geometry::{ComponentGeometry, Coord, ExplicitCurve, PointRef};
use mesa_core::graph::{DualGraph, Edge, EdgeId, MarkingId, Vertex, VertexId};
use mesa_core::linalg::{rat_int, Rat};
use mesa_core::monoid::MonoidElement;
use mesa_core::pl::{mesa_from, Mesa};
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreKind {
    /// One rational vertex with a loop edge.
    Loop,
    /// Two rational vertices joined by two edges.
    TwoGon,
    /// A cycle of three rational vertices.
    Triangle,
    /// A single vertex of genus one (no rational realization).
    EllipticVertex,
}

pub struct MesaSpec {
    pub rank: usize,
    /// Graph genus of the support; 0 builds a tree support.
    pub genus: u64,
    pub core: CoreKind,
    pub tails: usize,
    /// Extra boundary edges attached to random support vertices, beyond the
    /// one required at each tail leaf.
    pub extra_boundary: usize,
}

pub struct MesaInstance {
    pub graph: DualGraph,
    pub mesa: Mesa,
    /// Gauge-consistent realization of the support (absent for elliptic
    /// cores).
    pub curve: Option<ExplicitCurve>,
}

struct Builder {
    next_vertex: u32,
    next_edge: u32,
    vertices: Vec<Vertex>,
    edges: Vec<(EdgeId, VertexId, VertexId)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            next_vertex: 0,
            next_edge: 0,
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn vertex(&mut self, genus: u32) -> VertexId {
        let id = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.vertices.push(Vertex {
            id,
            genus,
            markings: vec![],
        });
        id
    }

    fn edge(&mut self, a: VertexId, b: VertexId) -> EdgeId {
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.edges.push((id, a, b));
        id
    }
}

fn nonzero_delta<R: Rng>(rng: &mut R, rank: usize) -> MonoidElement {
    loop {
        let coords: Vec<u64> = (0..rank).map(|_| rng.gen_range(0..3)).collect();
        let m = MonoidElement::from_u64s(&coords);
        if !m.is_zero() {
            return m;
        }
    }
}

fn nonzero_rat<R: Rng>(rng: &mut R) -> Rat {
    loop {
        let n = rng.gen_range(-6i64..=6);
        if n != 0 {
            return rat_int(n);
        }
    }
}

/// Build a random mesa with an explicit gauge-consistent realization of the
/// support. The support is a "spine" carrying the genus (a chain of cycles,
/// or a single vertex) with rational tail trees hung on it; every tail leaf
/// leads to the boundary so there are no dead ends, and boundary deltas are
/// solved for so every path from the top has the same length.
pub fn random_mesa<R: Rng>(rng: &mut R, spec: &MesaSpec) -> MesaInstance {
    let mut b = Builder::new();
    let mut spine: Vec<VertexId> = Vec::new();
    let mut cycle_edges: Vec<EdgeId> = Vec::new();

    let cycles = if spec.genus == 0 { 0 } else { spec.genus };
    if cycles == 0 {
        spine.push(b.vertex(0));
    }
    let mut prev_anchor: Option<VertexId> = None;
    let mut cycle_members: Vec<Vec<VertexId>> = Vec::new();
    for _ in 0..cycles {
        let members: Vec<VertexId> = match spec.core {
            CoreKind::Loop => {
                let v = b.vertex(0);
                cycle_edges.push(b.edge(v, v));
                vec![v]
            }
            CoreKind::TwoGon => {
                let v1 = b.vertex(0);
                let v2 = b.vertex(0);
                cycle_edges.push(b.edge(v1, v2));
                cycle_edges.push(b.edge(v1, v2));
                vec![v1, v2]
            }
            CoreKind::Triangle => {
                let v1 = b.vertex(0);
                let v2 = b.vertex(0);
                let v3 = b.vertex(0);
                cycle_edges.push(b.edge(v1, v2));
                cycle_edges.push(b.edge(v2, v3));
                cycle_edges.push(b.edge(v3, v1));
                vec![v1, v2, v3]
            }
            CoreKind::EllipticVertex => {
                vec![b.vertex(1)]
            }
        };
        if let Some(prev) = prev_anchor {
            let here = members[rng.gen_range(0..members.len())];
            cycle_edges.push(b.edge(prev, here));
        }
        prev_anchor = Some(members[rng.gen_range(0..members.len())]);
        cycle_members.push(members.clone());
        spine.extend(members);
    }

    let top: BTreeSet<VertexId> = spine.iter().copied().collect();

    // rational tails hung on random support vertices
    let mut support: Vec<VertexId> = spine.clone();
    let mut tree_edges: Vec<EdgeId> = Vec::new();
    let mut tail_children: Vec<usize> = vec![0; support.len()]; // per support index
    let first_tail = support.len();
    for _ in 0..spec.tails {
        let parent_idx = rng.gen_range(0..support.len());
        let v = b.vertex(0);
        tree_edges.push(b.edge(support[parent_idx], v));
        tail_children[parent_idx] += 1;
        support.push(v);
        tail_children.push(0);
    }

    // boundary edges: one at every tail leaf, plus extras
    let mut boundary: Vec<(EdgeId, VertexId)> = Vec::new();
    for (idx, &v) in support.iter().enumerate() {
        if idx >= first_tail && tail_children[idx] == 0 {
            let outside = b.vertex(0);
            boundary.push((b.edge(v, outside), v));
        }
    }
    let extras = spec.extra_boundary.max(usize::from(boundary.is_empty()));
    for _ in 0..extras {
        let v = support[rng.gen_range(0..support.len())];
        let outside = b.vertex(0);
        boundary.push((b.edge(v, outside), v));
    }

    // with several cycles, acyclicity of the mesa needs positive degree
    // spread along the spine; two attachments per cycle make the inductive
    // peeling argument unconditional, so top up deficient cycles
    if cycle_members.len() > 1 {
        for members in &cycle_members {
            let mut attached = boundary.iter().filter(|(_, v)| members.contains(v)).count();
            for &eid in &tree_edges {
                let (_, parent, _) = b.edges.iter().find(|(e, _, _)| *e == eid).copied().unwrap();
                if members.contains(&parent) {
                    attached += 1;
                }
            }
            while attached < 2 {
                let v = members[rng.gen_range(0..members.len())];
                let outside = b.vertex(0);
                boundary.push((b.edge(v, outside), v));
                attached += 1;
            }
        }
    }

    // deltas: anything nonzero on spine and tree edges; boundary edges are
    // solved for after computing tree distances
    let mut deltas: Vec<(EdgeId, MonoidElement)> = Vec::new();
    for &eid in &cycle_edges {
        deltas.push((eid, nonzero_delta(rng, spec.rank)));
    }
    // tree distances from the top
    let mut dist: Vec<MonoidElement> = vec![MonoidElement::zero(spec.rank); support.len()];
    for (i, &eid) in tree_edges.iter().enumerate() {
        let d = nonzero_delta(rng, spec.rank);
        // tree edges are appended in order, parent of support[first_tail+i]
        let (_, parent, child) = b.edges.iter().find(|(e, _, _)| *e == eid).copied().unwrap();
        let parent_idx = support.iter().position(|&v| v == parent).unwrap();
        let child_idx = support.iter().position(|&v| v == child).unwrap();
        debug_assert_eq!(child_idx, first_tail + i);
        dist[child_idx] = dist[parent_idx].add(&d).unwrap();
        deltas.push((eid, d));
    }
    let ones = MonoidElement::from_u64s(&vec![1; spec.rank]);
    let mut radius = ones.clone();
    for &(_, v) in &boundary {
        let idx = support.iter().position(|&x| x == v).unwrap();
        // coordinatewise max via join: radius = max(radius, dist + 1)
        let candidate = dist[idx].add(&ones).unwrap();
        radius = join(&radius, &candidate);
    }
    for &(eid, v) in &boundary {
        let idx = support.iter().position(|&x| x == v).unwrap();
        let d = radius.checked_sub(&dist[idx]).unwrap().unwrap();
        deltas.push((eid, d));
    }

    let edges: Vec<Edge> = b
        .edges
        .iter()
        .map(|&(id, a, bb)| Edge {
            id,
            ends: (a, bb),
            delta: deltas
                .iter()
                .find(|(e, _)| *e == id)
                .map(|(_, d)| d.clone())
                .unwrap(),
        })
        .collect();
    let graph = DualGraph::new(spec.rank, b.vertices.clone(), edges).unwrap();
    let support_set: BTreeSet<VertexId> = support.iter().copied().collect();
    let mesa = mesa_from(&graph, &support_set, &top).unwrap();

    let curve = if spec.core == CoreKind::EllipticVertex {
        None
    } else {
        Some(realize_support(rng, &graph, &support_set))
    };
    MesaInstance { graph, mesa, curve }
}

fn join(a: &MonoidElement, b: &MonoidElement) -> MonoidElement {
    let coords: Vec<u64> = a
        .coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| {
            use num_traits::ToPrimitive;
            x.to_u64().unwrap().max(y.to_u64().unwrap())
        })
        .collect();
    MonoidElement::from_u64s(&coords)
}

/// A gauge-consistent realization: internal gluing units are ratios of per
/// component gauges (so every cycle has trivial holonomy, as on an honest
/// fiber), boundary units are arbitrary nonzero rationals.
pub fn realize_support<R: Rng>(
    rng: &mut R,
    graph: &DualGraph,
    support: &BTreeSet<VertexId>,
) -> ExplicitCurve {
    let mut curve = ExplicitCurve::default();
    let mut gauges: std::collections::BTreeMap<VertexId, Rat> = Default::default();
    for &v in support {
        gauges.insert(v, nonzero_rat(rng));
        let mut comp = ComponentGeometry::default();
        let mut used: BTreeSet<i64> = BTreeSet::new();
        let fresh = |rng: &mut R, used: &mut BTreeSet<i64>| loop {
            let x = rng.gen_range(-50i64..=50);
            if used.insert(x) {
                return Coord::Finite(rat_int(x));
            }
        };
        for e in graph.edges() {
            if !e.touches(v) {
                continue;
            }
            if e.is_loop() {
                if e.ends.0 == v {
                    let c0 = fresh(rng, &mut used);
                    let c1 = fresh(rng, &mut used);
                    comp.coords.insert(PointRef::EdgeEnd(e.id, 0), c0);
                    comp.coords.insert(PointRef::EdgeEnd(e.id, 1), c1);
                }
            } else {
                let c = fresh(rng, &mut used);
                comp.coords.insert(PointRef::EdgeEnd(e.id, 0), c);
            }
        }
        curve.components.insert(v, comp);
    }
    for e in graph.edges() {
        let in0 = support.contains(&e.ends.0);
        let in1 = support.contains(&e.ends.1);
        if in0 && in1 {
            // matching is σ_first = α σ_second with first the smaller id;
            // α = gauge(first)/gauge(second) makes (gauge_v) a section
            let (first, second) = if e.ends.0 <= e.ends.1 {
                (e.ends.0, e.ends.1)
            } else {
                (e.ends.1, e.ends.0)
            };
            let alpha = &gauges[&first] / &gauges[&second];
            curve.alphas.insert(e.id, alpha);
        } else if in0 || in1 {
            curve.alphas.insert(e.id, nonzero_rat(rng));
        }
    }
    curve
}

/// A small random connected multigraph with genera and deltas, for graph
/// level properties (no mesa structure).
pub fn random_graph<R: Rng>(rng: &mut R, rank: usize) -> DualGraph {
    let n = rng.gen_range(2..7);
    let mut b = Builder::new();
    let vertices: Vec<VertexId> = (0..n).map(|_| b.vertex(rng.gen_range(0..3))).collect();
    // spanning tree, then extra edges (possibly loops/multi-edges)
    for i in 1..n {
        let j = rng.gen_range(0..i);
        b.edge(vertices[j], vertices[i]);
    }
    for _ in 0..rng.gen_range(0..4) {
        let a = vertices[rng.gen_range(0..n)];
        let c = vertices[rng.gen_range(0..n)];
        b.edge(a, c);
    }
    let edges = b
        .edges
        .iter()
        .map(|&(id, a, c)| Edge {
            id,
            ends: (a, c),
            delta: MonoidElement::from_u64s(
                &(0..rank).map(|_| rng.gen_range(0..3)).collect::<Vec<_>>(),
            ),
        })
        .collect();
    DualGraph::new(rank, b.vertices.clone(), edges).unwrap()
}

/// Random id permutation of a graph, for isomorphism-invariance tests.
pub fn shuffle_ids<R: Rng>(
    rng: &mut R,
    g: &DualGraph,
) -> (
    DualGraph,
    std::collections::BTreeMap<VertexId, VertexId>,
    std::collections::BTreeMap<EdgeId, EdgeId>,
) {
    use rand::seq::SliceRandom;
    let vids: Vec<VertexId> = g.vertices().map(|v| v.id).collect();
    let mut new_v: Vec<u32> = (0..vids.len() as u32).map(|i| i + 100).collect();
    new_v.shuffle(rng);
    let vmap: std::collections::BTreeMap<VertexId, VertexId> = vids
        .iter()
        .zip(&new_v)
        .map(|(&old, &new)| (old, VertexId(new)))
        .collect();
    let eids: Vec<EdgeId> = g.edges().map(|e| e.id).collect();
    let mut new_e: Vec<u32> = (0..eids.len() as u32).map(|i| i + 100).collect();
    new_e.shuffle(rng);
    let emap: std::collections::BTreeMap<EdgeId, EdgeId> = eids
        .iter()
        .zip(&new_e)
        .map(|(&old, &new)| (old, EdgeId(new)))
        .collect();
    let mids: Vec<MarkingId> = g.vertices().flat_map(|v| v.markings.clone()).collect();
    let mmap: std::collections::BTreeMap<MarkingId, MarkingId> =
        mids.iter().map(|&m| (m, m)).collect();
    (g.relabel(&vmap, &emap, &mmap).unwrap(), vmap, emap)
}
