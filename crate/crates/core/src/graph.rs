//! Dual graphs of nodal curve fibers.
//!
//! Vertices are irreducible components (with genus and marked half-edges),
//! edges are nodes and carry a smoothing parameter in `ℕ^r`. Loops are
//! allowed; paths never traverse them since path vertices are distinct.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monoid::{MonoidElement, MonoidError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MarkingId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}
impl fmt::Display for MarkingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("edge {0} references unknown vertex {1}")]
    UnknownVertex(EdgeId, VertexId),
    #[error("unknown vertex {0}")]
    NoSuchVertex(VertexId),
    #[error("unknown edge {0}")]
    NoSuchEdge(EdgeId),
    #[error("graph is not connected")]
    NotConnected,
    #[error("vertex subset does not induce a connected subgraph")]
    SubsetNotConnected,
    #[error("core is undefined: the subcurve has genus 0")]
    GenusZeroCore,
    #[error("the quotient of the support by the top is not a tree")]
    NotATree,
    #[error("vertex {0} is not in the subcurve")]
    VertexOutsideSubset(VertexId),
    #[error("edge delta has rank {0}, expected {1}")]
    DeltaRankMismatch(usize, usize),
    #[error("monoid error: {0}")]
    Monoid(#[from] MonoidError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub genus: u32,
    pub markings: Vec<MarkingId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    /// Unordered pair of endpoints; kept in the order given by the document,
    /// which fixes the labels of the two ends of a loop.
    pub ends: (VertexId, VertexId),
    pub delta: MonoidElement,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }

    pub fn other_end(&self, v: VertexId) -> VertexId {
        if self.ends.0 == v {
            self.ends.1
        } else {
            self.ends.0
        }
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.ends.0 == v || self.ends.1 == v
    }
}

/// The combinatorial type of a fiber: connected, loops and multi-edges allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualGraph {
    rank: usize,
    vertices: BTreeMap<VertexId, Vertex>,
    edges: BTreeMap<EdgeId, Edge>,
}

/// A path `v₀e₁v₁…e_kv_k` with pairwise distinct vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn empty(start: VertexId) -> Self {
        Path {
            vertices: vec![start],
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl DualGraph {
    pub fn new(
        rank: usize,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        let mut vmap = BTreeMap::new();
        let mut markings = BTreeSet::new();
        for v in vertices {
            for m in &v.markings {
                if !markings.insert(*m) {
                    return Err(GraphError::DuplicateId(m.to_string()));
                }
            }
            if vmap.insert(v.id, v.clone()).is_some() {
                return Err(GraphError::DuplicateId(v.id.to_string()));
            }
        }
        let mut emap = BTreeMap::new();
        for e in edges {
            for end in [e.ends.0, e.ends.1] {
                if !vmap.contains_key(&end) {
                    return Err(GraphError::UnknownVertex(e.id, end));
                }
            }
            if e.delta.rank() != rank {
                return Err(GraphError::DeltaRankMismatch(e.delta.rank(), rank));
            }
            if emap.insert(e.id, e.clone()).is_some() {
                return Err(GraphError::DuplicateId(e.id.to_string()));
            }
        }
        let g = DualGraph {
            rank,
            vertices: vmap,
            edges: emap,
        };
        if !g.is_connected(&g.vertex_ids()) {
            return Err(GraphError::NotConnected);
        }
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn vertex_ids(&self) -> BTreeSet<VertexId> {
        self.vertices.keys().copied().collect()
    }

    pub fn vertex(&self, id: VertexId) -> Result<&Vertex, GraphError> {
        self.vertices.get(&id).ok_or(GraphError::NoSuchVertex(id))
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge, GraphError> {
        self.edges.get(&id).ok_or(GraphError::NoSuchEdge(id))
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges with both endpoints in `w` (loops at a vertex of `w` included).
    pub fn edges_within<'a>(&'a self, w: &'a BTreeSet<VertexId>) -> impl Iterator<Item = &'a Edge> {
        self.edges
            .values()
            .filter(move |e| w.contains(&e.ends.0) && w.contains(&e.ends.1))
    }

    /// Edges with exactly one endpoint in `w`.
    pub fn boundary_edges<'a>(
        &'a self,
        w: &'a BTreeSet<VertexId>,
    ) -> impl Iterator<Item = &'a Edge> {
        self.edges
            .values()
            .filter(move |e| w.contains(&e.ends.0) != w.contains(&e.ends.1))
    }

    pub fn is_connected(&self, w: &BTreeSet<VertexId>) -> bool {
        let Some(&start) = w.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for e in self.edges.values() {
                if !e.touches(v) {
                    continue;
                }
                let u = e.other_end(v);
                if w.contains(&u) && w.contains(&e.ends.0) && w.contains(&e.ends.1)
                    && seen.insert(u)
                {
                    queue.push_back(u);
                }
            }
        }
        seen.len() == w.len()
    }

    /// First Betti number of the induced subgraph (which may be disconnected).
    pub fn b1(&self, w: &BTreeSet<VertexId>) -> usize {
        let edges = self.edges_within(w).count();
        let comps = self.component_count(w);
        edges + comps - w.len()
    }

    fn component_count(&self, w: &BTreeSet<VertexId>) -> usize {
        let mut remaining: BTreeSet<VertexId> = w.clone();
        let mut count = 0;
        while let Some(&start) = remaining.iter().next() {
            count += 1;
            let mut queue = VecDeque::from([start]);
            remaining.remove(&start);
            while let Some(v) = queue.pop_front() {
                for e in self.edges_within(w) {
                    if e.touches(v) {
                        let u = e.other_end(v);
                        if remaining.remove(&u) {
                            queue.push_back(u);
                        }
                    }
                }
            }
        }
        count
    }

    /// Connected components of the induced subgraph on `w`.
    pub fn components_of(&self, w: &BTreeSet<VertexId>) -> Vec<BTreeSet<VertexId>> {
        let mut remaining: BTreeSet<VertexId> = w.clone();
        let mut out = Vec::new();
        while let Some(&start) = remaining.iter().next() {
            let mut comp = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            remaining.remove(&start);
            while let Some(v) = queue.pop_front() {
                for e in self.edges_within(w) {
                    if e.touches(v) {
                        let u = e.other_end(v);
                        if remaining.remove(&u) {
                            comp.insert(u);
                            queue.push_back(u);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Arithmetic genus of the connected subcurve induced by `w`:
    /// `b₁` of the induced subgraph plus the vertex genera.
    pub fn genus(&self, w: &BTreeSet<VertexId>) -> Result<u64, GraphError> {
        for v in w {
            self.vertex(*v)?;
        }
        if !self.is_connected(w) {
            return Err(GraphError::SubsetNotConnected);
        }
        let b1 = self.b1(w) as u64;
        let genera: u64 = w.iter().map(|v| self.vertices[v].genus as u64).sum();
        Ok(b1 + genera)
    }

    pub fn total_genus(&self) -> u64 {
        let all = self.vertex_ids();
        self.genus(&all).expect("graph is connected by construction")
    }

    /// The minimal connected subcurve of `e` with the same arithmetic genus,
    /// computed by pruning genus-0 vertices of degree ≤ 1 (in ascending id
    /// order; the result is order-independent).
    pub fn core(&self, e: &BTreeSet<VertexId>) -> Result<BTreeSet<VertexId>, GraphError> {
        let g = self.genus(e)?;
        if g == 0 {
            return Err(GraphError::GenusZeroCore);
        }
        let mut current = e.clone();
        loop {
            let mut pruned = None;
            for &v in &current {
                if self.vertices[&v].genus != 0 {
                    continue;
                }
                let degree: usize = self
                    .edges_within(&current)
                    .map(|e| usize::from(e.ends.0 == v) + usize::from(e.ends.1 == v))
                    .sum();
                if degree <= 1 {
                    pruned = Some(v);
                    break;
                }
            }
            match pruned {
                Some(v) => {
                    current.remove(&v);
                }
                None => break,
            }
        }
        debug_assert_eq!(self.genus(&current)?, g);
        Ok(current)
    }

    /// The unique path `v₁e₁…v` in the subgraph on `e` with `v₁ ∈ f` and all
    /// later vertices outside `f`. Requires `f ⊆ e`, both connected, equal
    /// genus (so the quotient of the two subgraphs is a tree). For `v ∈ f`
    /// the path is empty.
    pub fn unique_path_from_top(
        &self,
        e: &BTreeSet<VertexId>,
        f: &BTreeSet<VertexId>,
        v: VertexId,
    ) -> Result<Path, GraphError> {
        let trees = self.top_tree(e, f)?;
        if !e.contains(&v) {
            return Err(GraphError::VertexOutsideSubset(v));
        }
        if f.contains(&v) {
            return Ok(Path::empty(v));
        }
        // walk parent pointers back to the top
        let mut vertices = vec![v];
        let mut edges = Vec::new();
        let mut cur = v;
        while let Some(&(parent, eid)) = trees.parent.get(&cur) {
            vertices.push(parent);
            edges.push(eid);
            cur = parent;
        }
        vertices.reverse();
        edges.reverse();
        Ok(Path { vertices, edges })
    }

    /// Parent structure of the tree obtained by contracting the subgraph on
    /// `f` inside the subgraph on `e`. Errors unless it really is a tree.
    pub(crate) fn top_tree(
        &self,
        e: &BTreeSet<VertexId>,
        f: &BTreeSet<VertexId>,
    ) -> Result<TopTree, GraphError> {
        if !f.is_subset(e) {
            return Err(GraphError::SubsetNotConnected);
        }
        if !self.is_connected(e) || !self.is_connected(f) {
            return Err(GraphError::SubsetNotConnected);
        }
        // tree iff the edge count outside f matches the outside vertex count
        let edges_outside: Vec<&Edge> = self
            .edges_within(e)
            .filter(|ed| !(f.contains(&ed.ends.0) && f.contains(&ed.ends.1)))
            .collect();
        if edges_outside.len() != e.len() - f.len() {
            return Err(GraphError::NotATree);
        }
        let mut parent: BTreeMap<VertexId, (VertexId, EdgeId)> = BTreeMap::new();
        let mut frontier: VecDeque<VertexId> = f.iter().copied().collect();
        let mut reached: BTreeSet<VertexId> = f.clone();
        while let Some(v) = frontier.pop_front() {
            for ed in &edges_outside {
                if !ed.touches(v) {
                    continue;
                }
                if ed.is_loop() {
                    return Err(GraphError::NotATree);
                }
                // skip the edge v was discovered through
                if parent.get(&v).map(|&(_, pe)| pe) == Some(ed.id) {
                    continue;
                }
                let u = ed.other_end(v);
                if f.contains(&u) || reached.contains(&u) {
                    // a second connection closes a cycle
                    return Err(GraphError::NotATree);
                }
                reached.insert(u);
                parent.insert(u, (v, ed.id));
                frontier.push_back(u);
            }
        }
        if reached.len() != e.len() {
            return Err(GraphError::NotATree);
        }
        Ok(TopTree { parent })
    }

    /// Sum of the smoothing parameters along a path.
    pub fn path_length(&self, p: &Path) -> Result<MonoidElement, GraphError> {
        let mut total = MonoidElement::zero(self.rank);
        for eid in &p.edges {
            total = total.add(&self.edge(*eid)?.delta)?;
        }
        Ok(total)
    }

    /// Contract the edges in `z`: endpoints merge, the merged vertex genus is
    /// the sum of the merged genera plus the first Betti number of the
    /// contracted sub-multigraph (so a contracted loop adds one). Surviving
    /// edges keep their ids; a surviving edge whose endpoints merge becomes a
    /// loop. Returns the new graph and the vertex surjection.
    pub fn contract_edges(
        &self,
        z: &BTreeSet<EdgeId>,
    ) -> Result<(DualGraph, BTreeMap<VertexId, VertexId>), GraphError> {
        for eid in z {
            self.edge(*eid)?;
        }
        // union-find over vertices through contracted edges
        let mut rep: BTreeMap<VertexId, VertexId> =
            self.vertices.keys().map(|&v| (v, v)).collect();
        fn find(rep: &mut BTreeMap<VertexId, VertexId>, v: VertexId) -> VertexId {
            let mut r = v;
            while rep[&r] != r {
                r = rep[&r];
            }
            let mut cur = v;
            while rep[&cur] != r {
                let next = rep[&cur];
                rep.insert(cur, r);
                cur = next;
            }
            r
        }
        for eid in z {
            let e = &self.edges[eid];
            let (a, b) = (find(&mut rep, e.ends.0), find(&mut rep, e.ends.1));
            // the smaller id represents the merged vertex
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            rep.insert(hi, lo);
        }
        let vmap: BTreeMap<VertexId, VertexId> = self
            .vertices
            .keys()
            .map(|&v| (v, find(&mut rep, v)))
            .collect();

        // genus of each merged cluster: vertex genera + b1 of contracted part
        let mut clusters: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for (&v, &r) in &vmap {
            clusters.entry(r).or_default().push(v);
        }
        let mut new_vertices = Vec::new();
        for (&r, members) in &clusters {
            let genus_sum: u64 = members.iter().map(|v| self.vertices[v].genus as u64).sum();
            let contracted_edges = z
                .iter()
                .filter(|eid| {
                    let e = &self.edges[eid];
                    vmap[&e.ends.0] == r
                })
                .count() as u64;
            // per-cluster b1: contracted edges − (members − 1), the cluster
            // being connected through the contracted edges by construction
            let b1 = contracted_edges + 1 - members.len() as u64;
            let mut markings: Vec<MarkingId> = members
                .iter()
                .flat_map(|v| self.vertices[v].markings.iter().copied())
                .collect();
            markings.sort();
            new_vertices.push(Vertex {
                id: r,
                genus: (genus_sum + b1) as u32,
                markings,
            });
        }
        let new_edges: Vec<Edge> = self
            .edges
            .values()
            .filter(|e| !z.contains(&e.id))
            .map(|e| Edge {
                id: e.id,
                ends: (vmap[&e.ends.0], vmap[&e.ends.1]),
                delta: e.delta.clone(),
            })
            .collect();
        let g = DualGraph::new(self.rank, new_vertices, new_edges)?;
        Ok((g, vmap))
    }

    /// DOT rendering: vertex label = genus, edge label = delta vector.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph dual {\n");
        for v in self.vertices.values() {
            out.push_str(&format!(
                "  {} [label=\"{} g={}\"];\n",
                v.id, v.id, v.genus
            ));
            for m in &v.markings {
                out.push_str(&format!("  {m} [shape=point];\n  {} -- {m};\n", v.id));
            }
        }
        for e in self.edges.values() {
            out.push_str(&format!(
                "  {} -- {} [label=\"{} {}\"];\n",
                e.ends.0, e.ends.1, e.id, e.delta
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Relabel vertices, edges and markings; used to test isomorphism
    /// invariance.
    pub fn relabel(
        &self,
        vmap: &BTreeMap<VertexId, VertexId>,
        emap: &BTreeMap<EdgeId, EdgeId>,
        mmap: &BTreeMap<MarkingId, MarkingId>,
    ) -> Result<DualGraph, GraphError> {
        let vertices = self
            .vertices
            .values()
            .map(|v| Vertex {
                id: vmap[&v.id],
                genus: v.genus,
                markings: v.markings.iter().map(|m| mmap[m]).collect(),
            })
            .collect();
        let edges = self
            .edges
            .values()
            .map(|e| Edge {
                id: emap[&e.id],
                ends: (vmap[&e.ends.0], vmap[&e.ends.1]),
                delta: e.delta.clone(),
            })
            .collect();
        DualGraph::new(self.rank, vertices, edges)
    }
}

pub(crate) struct TopTree {
    /// For each vertex outside the top: (parent vertex, edge to the parent).
    pub parent: BTreeMap<VertexId, (VertexId, EdgeId)>,
}
