//! Exact section spaces and cohomology of line bundles on explicit curves.
//!
//! Everything is phrased through the normalization sequence: a global
//! section is a tuple of sections on the components matching (up to the
//! gluing unit) at every node, so `H⁰` is the kernel of the matching system
//! and `H¹` is read off the Euler characteristic
//! `χ = Σ_v (deg D_v + 1) − #nodes`. Both are exact over `ℚ`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::geometry::{
    bundle_layout, matching_matrix, Divisor, ExplicitCurve, GeometryError, LineBundleData,
    PointRef,
};
use crate::graph::{DualGraph, EdgeId, GraphError, VertexId};
use crate::linalg::{QMat, Rat};
use crate::pl::Mesa;

#[derive(Debug, Error)]
pub enum CechError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("geometry realizes {realized} components, the mesa support has {expected}")]
    SupportMismatch { realized: usize, expected: usize },
    #[error("boundary edge {0} carries no gluing unit and no default")]
    MissingBoundaryUnit(EdgeId),
    #[error("evaluation kernel has dimension {0}, expected 1")]
    KernelNotALine(usize),
    #[error("boundary value space has codimension {got}, the support has genus {genus}")]
    CodimGenusMismatch { got: usize, genus: u64 },
}

/// A basis of global sections, rows = sections, columns = the concatenated
/// per-component `L(D)` coefficients (in RREF, so canonical).
#[derive(Clone, Debug)]
pub struct SectionSpace {
    pub basis: QMat,
    pub component_order: Vec<VertexId>,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
}

/// Global sections of a line bundle on an explicit curve: the kernel of the
/// node-matching linear system inside `⊕_v L(D_v)`.
pub fn global_sections(
    g: &DualGraph,
    curve: &ExplicitCurve,
    bundle: &LineBundleData,
) -> Result<SectionSpace, CechError> {
    let layout = bundle_layout(curve, bundle)?;
    let (mat, _) = matching_matrix(g, curve, bundle, &layout)?;
    let basis = if mat.rows() == 0 {
        QMat::identity(layout.total_dim)
    } else {
        mat.kernel_basis()
    };
    Ok(SectionSpace {
        basis,
        component_order: layout.order,
    })
}

/// Exact `(h⁰, h¹)`. `h⁰` is the matching-kernel dimension; `h¹ = h⁰ − χ`
/// with `χ = Σ_v (deg D_v + 1) − #nodes`, which by the normalization
/// sequence equals `dim coker(matching) + Σ_v h¹(component)`.
pub fn cech_h(
    g: &DualGraph,
    curve: &ExplicitCurve,
    bundle: &LineBundleData,
) -> Result<(usize, usize), CechError> {
    let layout = bundle_layout(curve, bundle)?;
    let (mat, edges) = matching_matrix(g, curve, bundle, &layout)?;
    let h0 = layout.total_dim - if mat.rows() == 0 { 0 } else { mat.rank() };
    let mut chi: i64 = 0;
    for &v in &layout.order {
        let deg: i64 = num_traits::ToPrimitive::to_i64(&bundle.divisor(v).degree())
            .expect("component degree fits i64");
        chi += deg + 1;
    }
    chi -= edges.len() as i64;
    let h1 = h0 as i64 - chi;
    debug_assert!(h1 >= 0, "negative h1 is an arithmetic bug");
    Ok((h0, h1 as usize))
}

/// Canonical coordinates on `H¹(𝒪) ≅ ℚ^{nodes} / im(matching)`: reduce the
/// image to RREF, then read the non-pivot coordinates after elimination.
struct H1Presentation {
    /// RREF basis of the image subspace.
    image: QMat,
    /// Pivot column of each image row.
    pivots: Vec<usize>,
    /// Non-pivot (free) coordinates: the canonical basis of the quotient.
    free: Vec<usize>,
    nodes: usize,
}

impl H1Presentation {
    fn new(image_rows: QMat, nodes: usize) -> Self {
        let (image, pivots) = image_rows.rref();
        let rank = pivots.len();
        let mut image_trunc = image;
        image_trunc.truncate_rows(rank);
        let free: Vec<usize> = (0..nodes).filter(|c| !pivots.contains(c)).collect();
        H1Presentation {
            image: image_trunc,
            pivots,
            free,
            nodes,
        }
    }

    fn dim(&self) -> usize {
        self.free.len()
    }

    /// Class of a cocycle vector in the canonical quotient coordinates.
    fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.nodes);
        let mut w = v.to_vec();
        for (row, &p) in self.pivots.iter().enumerate() {
            if !w[p].is_zero() {
                let factor = w[p].clone();
                for j in 0..self.nodes {
                    let delta = &factor * &self.image[(row, j)];
                    w[j] = &w[j] - &delta;
                }
            }
        }
        self.free.iter().map(|&c| w[c].clone()).collect()
    }
}

/// The connecting map `⊕_i k(p_i) → H¹(𝒪)` of the sequence
/// `0 → 𝒪 → 𝒪(Σ p_i) → ⊕ k(p_i) → 0`, as a `dim H¹ × n` matrix in the
/// canonical `H¹` coordinates.
///
/// The lift of a polar-part tuple is computed by one joint interpolation
/// solve per component, so the columns agree with the one-point maps only
/// because connecting homomorphisms are additive, not by construction.
pub fn connecting_values(
    g: &DualGraph,
    curve: &ExplicitCurve,
    points: &[(VertexId, PointRef)],
) -> Result<QMat, CechError> {
    let trivial = LineBundleData::trivial(curve);
    let layout = bundle_layout(curve, &trivial)?;
    let (mat, edges) = matching_matrix(g, curve, &trivial, &layout)?;
    // H¹(𝒪) = ℚ^{edges} / im(matching map); the image is the column space
    let image = mat.image_basis();
    let h1 = H1Presentation::new(image, edges.len());

    // bundle 𝒪(Σ p_i) and its layout
    let mut twisted = trivial.clone();
    for &(v, p) in points {
        let div = twisted.divisors.entry(v).or_default();
        let one = div.mult(&p) + 1;
        div.multiplicities.insert(p, one);
    }
    let tlayout = bundle_layout(curve, &twisted)?;
    let (tmat, tedges) = matching_matrix(g, curve, &twisted, &tlayout)?;
    debug_assert_eq!(tedges, edges);

    let mut columns: Vec<Vec<Rat>> = Vec::with_capacity(points.len());
    for i in 0..points.len() {
        // polar data: pole coefficient 1 at p_i, 0 at the others
        let mut target: BTreeMap<VertexId, Vec<(PointRef, Rat)>> = BTreeMap::new();
        for (j, &(v, p)) in points.iter().enumerate() {
            target
                .entry(v)
                .or_default()
                .push((p, if i == j { Rat::one() } else { Rat::zero() }));
        }
        // lift: per component, solve for a section of L(D_v + Σ p|_v) with
        // the prescribed polar parts
        let mut coeffs = vec![Rat::zero(); tlayout.total_dim];
        for (&v, wants) in &target {
            let basis = &tlayout.bases[&v];
            let comp = &curve.components[&v];
            let rows: Vec<Vec<Rat>> = wants
                .iter()
                .map(|(p, _)| {
                    let q = comp.coord(p).expect("declared point");
                    basis.ev_row(q)
                })
                .collect();
            let rhs: Vec<Rat> = wants.iter().map(|(_, a)| a.clone()).collect();
            let local = QMat::from_rows(rows)
                .solve(&rhs)
                .expect("interpolation with poles at the p_i is solvable");
            let off = tlayout.offsets[&v];
            for (j, c) in local.into_iter().enumerate() {
                coeffs[off + j] = c;
            }
        }
        // matching defect of the lift, as a cocycle over the nodes
        let cocycle = tmat.mul_vec(&coeffs);
        columns.push(h1.reduce(&cocycle));
    }

    let mut out = QMat::zeros(h1.dim(), points.len());
    for (j, col) in columns.iter().enumerate() {
        for (i, val) in col.iter().enumerate() {
            out[(i, j)] = val.clone();
        }
    }
    Ok(out)
}

/// The boundary-value space of a mesa on an explicit realization of its
/// support, together with the data the contraction module needs.
#[derive(Clone, Debug)]
pub struct BoundaryValues {
    /// RREF basis of `V ⊆ ℚ^m`, coordinates ordered by ascending boundary
    /// edge id.
    pub subspace: VSubspace,
    /// Boundary edges in coordinate order.
    pub boundary: Vec<EdgeId>,
    /// Sections of `𝒪_E(−λ̄)` on the realization.
    pub sections: SectionSpace,
    /// Dimension of the kernel of the evaluation map (always 1).
    pub kernel_dim: usize,
}

/// A linear subspace of `ℚ^m` in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VSubspace {
    pub basis: QMat,
    pub ambient: usize,
}

impl VSubspace {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.basis.row_space_contains(v)
    }

    /// RREF basis of the annihilator `{c : c·v = 0 ∀v ∈ V}`; for codimension
    /// one this is the single defining functional up to scale.
    pub fn functionals(&self) -> QMat {
        if self.dim() == 0 {
            return QMat::identity(self.ambient);
        }
        self.basis.kernel_basis()
    }
}

/// The line bundle `𝒪_E(−λ̄)` of a mesa restricted to its support, as
/// divisor data on a realization of the support: multiplicity at each edge
/// end equals the outgoing slope of `−λ̄`, i.e. +1 at boundary-facing points
/// and away-facing tree points, −1 at top-facing tree points, 0 inside the
/// top.
pub fn mesa_bundle_on_support(
    g: &DualGraph,
    mesa: &Mesa,
    _curve: &ExplicitCurve,
) -> Result<LineBundleData, CechError> {
    let mut divisors: BTreeMap<VertexId, Divisor> = BTreeMap::new();
    for &v in &mesa.support {
        divisors.insert(v, Divisor::default());
    }
    for e in g.edges() {
        let in0 = mesa.support.contains(&e.ends.0);
        let in1 = mesa.support.contains(&e.ends.1);
        if !in0 && !in1 {
            continue;
        }
        if e.is_loop() {
            // slopes on the two ends of a loop cancel; mesas are constant
            // around loops (loops live in the top), so both ends carry 0
            continue;
        }
        if in0 && in1 {
            let s0 = crate::pl::edge_slope(g, &mesa.pl, e.ends.0, e.id)
                .map_err(|_| GraphError::NoSuchEdge(e.id))?;
            // slope of −λ̄ at the end on ends.0 is +s0 with s0 computed for λ̄
            // then negated
            let m0 = -s0;
            let m1 = -m0.clone();
            divisors
                .get_mut(&e.ends.0)
                .unwrap()
                .multiplicities
                .insert(PointRef::EdgeEnd(e.id, 0), m0);
            divisors
                .get_mut(&e.ends.1)
                .unwrap()
                .multiplicities
                .insert(PointRef::EdgeEnd(e.id, 0), m1);
        } else {
            let inside = if in0 { e.ends.0 } else { e.ends.1 };
            divisors
                .get_mut(&inside)
                .unwrap()
                .multiplicities
                .insert(PointRef::EdgeEnd(e.id, 0), 1.into());
        }
    }
    for d in divisors.values_mut() {
        d.multiplicities.retain(|_, m| !m.is_zero());
    }
    Ok(LineBundleData {
        divisors,
        matchings: BTreeMap::new(),
    })
}

/// Compute `V`: the attainable tuples of boundary values of sections of
/// `𝒪_E(−λ̄)`, read in the outside-branch trivializations.
///
/// The value at boundary edge `e` with inside end `q` is `ev_q(σ)/α_e`: the
/// gluing unit converts the pole coefficient on the support side into the
/// derivative seen on the branch side. Asserts the codimension equals the
/// genus of the support and that the evaluation kernel is a line.
pub fn boundary_value_space(
    g: &DualGraph,
    mesa: &Mesa,
    curve: &ExplicitCurve,
) -> Result<BoundaryValues, CechError> {
    curve.validate(g)?;
    if curve.components.len() != mesa.support.len()
        || !mesa.support.iter().all(|v| curve.is_realized(*v))
    {
        return Err(CechError::SupportMismatch {
            realized: curve.components.len(),
            expected: mesa.support.len(),
        });
    }
    let bundle = mesa_bundle_on_support(g, mesa, curve)?;
    let layout = bundle_layout(curve, &bundle)?;
    let (mat, _) = matching_matrix(g, curve, &bundle, &layout)?;
    let sections = if mat.rows() == 0 {
        QMat::identity(layout.total_dim)
    } else {
        mat.kernel_basis()
    };

    let boundary: Vec<EdgeId> = mesa.boundary_edges(g);
    // evaluation matrix: one column per boundary edge, one row per section
    let mut values = QMat::zeros(sections.rows(), boundary.len());
    for (j, &eid) in boundary.iter().enumerate() {
        let e = g.edge(eid)?;
        let inside = if mesa.support.contains(&e.ends.0) {
            e.ends.0
        } else {
            e.ends.1
        };
        let (_, q) = curve.end_coord(g, eid, inside, 0)?;
        let alpha = curve.alpha(eid);
        if alpha.is_zero() {
            return Err(CechError::MissingBoundaryUnit(eid));
        }
        let inv = alpha.recip();
        let row = layout.ev_row(inside, &q);
        for i in 0..sections.rows() {
            let s: Rat = sections
                .row(i)
                .iter()
                .zip(&row)
                .map(|(a, b)| a * b)
                .sum();
            values[(i, j)] = s * &inv;
        }
    }

    // V = row space of the value matrix, in RREF
    let v_basis = if values.rows() == 0 {
        QMat::zeros(0, boundary.len())
    } else {
        let (r, pivots) = values.rref();
        let mut r = r;
        r.truncate_rows(pivots.len());
        r
    };
    let subspace = VSubspace {
        basis: v_basis,
        ambient: boundary.len(),
    };

    let genus = g.genus(&mesa.support)?;
    if subspace.codim() as u64 != genus {
        return Err(CechError::CodimGenusMismatch {
            got: subspace.codim(),
            genus,
        });
    }
    // the solutions over a fixed boundary tuple form a single line
    let kernel_dim = sections.rows() - values.rank();
    if kernel_dim != 1 {
        return Err(CechError::KernelNotALine(kernel_dim));
    }

    Ok(BoundaryValues {
        subspace,
        boundary,
        sections: SectionSpace {
            basis: sections,
            component_order: layout.order,
        },
        kernel_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ComponentGeometry, Coord};
    use crate::graph::{Edge, Vertex};
    use crate::linalg::rat_int;
    use crate::monoid::MonoidElement;
    use std::collections::BTreeSet;

    fn v(id: u32, genus: u32) -> Vertex {
        Vertex {
            id: VertexId(id),
            genus,
            markings: vec![],
        }
    }

    fn e(id: u32, a: u32, b: u32, delta: &[u64]) -> Edge {
        Edge {
            id: EdgeId(id),
            ends: (VertexId(a), VertexId(b)),
            delta: MonoidElement::from_u64s(delta),
        }
    }

    fn fin(n: i64) -> Coord {
        Coord::Finite(rat_int(n))
    }

    /// Two lines glued at two nodes (a 2-gon) with trivial units, extra
    /// outside vertices so graphs stay valid when only part is realized.
    fn two_gon_curve() -> (DualGraph, ExplicitCurve) {
        let g = DualGraph::new(
            1,
            vec![v(0, 0), v(1, 0)],
            vec![e(0, 0, 1, &[1]), e(1, 0, 1, &[1])],
        )
        .unwrap();
        let mut curve = ExplicitCurve::default();
        let mut c0 = ComponentGeometry::default();
        c0.coords.insert(PointRef::EdgeEnd(EdgeId(0), 0), fin(0));
        c0.coords.insert(PointRef::EdgeEnd(EdgeId(1), 0), Coord::Infinity);
        let mut c1 = ComponentGeometry::default();
        c1.coords.insert(PointRef::EdgeEnd(EdgeId(0), 0), fin(0));
        c1.coords.insert(PointRef::EdgeEnd(EdgeId(1), 0), Coord::Infinity);
        curve.components.insert(VertexId(0), c0);
        curve.components.insert(VertexId(1), c1);
        (g, curve)
    }

    #[test]
    fn structure_sheaf_on_two_gon() {
        let (g, curve) = two_gon_curve();
        let bundle = LineBundleData::trivial(&curve);
        let sections = global_sections(&g, &curve, &bundle).unwrap();
        assert_eq!(sections.dim(), 1);
        let (h0, h1) = cech_h(&g, &curve, &bundle).unwrap();
        assert_eq!((h0, h1), (1, 1));
    }

    #[test]
    fn structure_sheaf_on_line() {
        let g = DualGraph::new(0, vec![v(0, 0)], vec![]).unwrap();
        let mut curve = ExplicitCurve::default();
        curve
            .components
            .insert(VertexId(0), ComponentGeometry::default());
        let bundle = LineBundleData::trivial(&curve);
        assert_eq!(cech_h(&g, &curve, &bundle).unwrap(), (1, 0));
    }

    /// Degree (1,1) bundle on the 2-gon: h⁰ = 2, h¹ = 0.
    #[test]
    fn positive_degree_on_two_gon() {
        let (g, mut curve) = two_gon_curve();
        curve
            .components
            .get_mut(&VertexId(0))
            .unwrap()
            .coords
            .insert(PointRef::Aux(0), fin(1));
        curve
            .components
            .get_mut(&VertexId(1))
            .unwrap()
            .coords
            .insert(PointRef::Aux(1), fin(2));
        let mut bundle = LineBundleData::trivial(&curve);
        bundle
            .divisors
            .insert(VertexId(0), Divisor::of(&[(PointRef::Aux(0), 1)]));
        bundle
            .divisors
            .insert(VertexId(1), Divisor::of(&[(PointRef::Aux(1), 1)]));
        assert_eq!(cech_h(&g, &curve, &bundle).unwrap(), (2, 0));
    }

    #[test]
    fn loop_realization() {
        // nodal cubic: one component, loop with ends at 0 and ∞, unit 1
        let g = DualGraph::new(
            1,
            vec![v(0, 0), v(1, 0)],
            vec![e(0, 0, 0, &[1]), e(1, 0, 1, &[1])],
        )
        .unwrap();
        let mut curve = ExplicitCurve::default();
        let mut c0 = ComponentGeometry::default();
        c0.coords.insert(PointRef::EdgeEnd(EdgeId(0), 0), fin(0));
        c0.coords.insert(PointRef::EdgeEnd(EdgeId(0), 1), Coord::Infinity);
        curve.components.insert(VertexId(0), c0);
        let bundle = LineBundleData::trivial(&curve);
        // only the loop is realized: h⁰ = 1 (constants), h¹ = 1 (genus 1)
        assert_eq!(cech_h(&g, &curve, &bundle).unwrap(), (1, 1));
    }

    #[test]
    fn connecting_map_on_two_gon() {
        let (g, mut curve) = two_gon_curve();
        curve
            .components
            .get_mut(&VertexId(0))
            .unwrap()
            .coords
            .insert(PointRef::Aux(0), fin(1));
        curve
            .components
            .get_mut(&VertexId(1))
            .unwrap()
            .coords
            .insert(PointRef::Aux(1), fin(3));
        let p0 = (VertexId(0), PointRef::Aux(0));
        let p1 = (VertexId(1), PointRef::Aux(1));
        let one_point = connecting_values(&g, &curve, &[p0]).unwrap();
        assert_eq!(one_point.rows(), 1);
        assert!(!one_point[(0, 0)].is_zero());
        let two_point = connecting_values(&g, &curve, &[p0, p1]).unwrap();
        assert!(!two_point[(0, 0)].is_zero());
        assert!(!two_point[(0, 1)].is_zero());
        // columnwise agreement with the single-point maps
        let other = connecting_values(&g, &curve, &[p1]).unwrap();
        assert_eq!(two_point[(0, 0)], one_point[(0, 0)]);
        assert_eq!(two_point[(0, 1)], other[(0, 0)]);
    }

    #[test]
    fn genus_zero_connecting_map_is_zero() {
        let g = DualGraph::new(1, vec![v(0, 0), v(1, 0)], vec![e(0, 0, 1, &[1])]).unwrap();
        let mut curve = ExplicitCurve::default();
        let mut c0 = ComponentGeometry::default();
        c0.coords.insert(PointRef::EdgeEnd(EdgeId(0), 0), fin(0));
        c0.coords.insert(PointRef::Aux(0), fin(1));
        let mut c1 = ComponentGeometry::default();
        c1.coords.insert(PointRef::EdgeEnd(EdgeId(0), 0), fin(5));
        curve.components.insert(VertexId(0), c0);
        curve.components.insert(VertexId(1), c1);
        let m = connecting_values(&g, &curve, &[(VertexId(0), PointRef::Aux(0))]).unwrap();
        assert_eq!(m.rows(), 0);
    }

    /// A marking coordinate works as a divisor point: 𝒪(m₀) on a line.
    #[test]
    fn marking_point_divisor() {
        use crate::graph::{MarkingId, Vertex};
        let g = DualGraph::new(
            0,
            vec![Vertex {
                id: VertexId(0),
                genus: 0,
                markings: vec![MarkingId(0)],
            }],
            vec![],
        )
        .unwrap();
        let mut curve = ExplicitCurve::default();
        let mut c0 = ComponentGeometry::default();
        c0.coords.insert(PointRef::Marking(MarkingId(0)), fin(3));
        curve.components.insert(VertexId(0), c0);
        let mut bundle = LineBundleData::trivial(&curve);
        bundle.divisors.insert(
            VertexId(0),
            Divisor::of(&[(PointRef::Marking(MarkingId(0)), 1)]),
        );
        assert_eq!(cech_h(&g, &curve, &bundle).unwrap(), (2, 0));
    }

    #[test]
    fn non_rational_component_rejected() {
        let g = DualGraph::new(1, vec![v(0, 1), v(1, 0)], vec![e(0, 0, 1, &[2])]).unwrap();
        let support: BTreeSet<VertexId> = [VertexId(0)].into();
        let mesa = crate::pl::mesa_from(&g, &support, &support).unwrap();
        let mut curve = ExplicitCurve::default();
        let mut c0 = ComponentGeometry::default();
        c0.coords.insert(PointRef::EdgeEnd(EdgeId(0), 0), fin(0));
        curve.components.insert(VertexId(0), c0);
        let err = boundary_value_space(&g, &mesa, &curve).unwrap_err();
        assert!(matches!(
            err,
            CechError::Geometry(crate::geometry::GeometryError::NonRationalComponent(..))
        ));
    }

    /// Tacnode-shaped mesa: 2-gon support with two boundary branches; with
    /// symmetric coordinates the defining functional of V is (1, −1), and
    /// scaling the first boundary unit by a moves it to (a, −1) up to scale.
    #[test]
    fn tacnode_boundary_values() {
        let g = DualGraph::new(
            1,
            vec![v(0, 0), v(1, 0), v(2, 0), v(3, 0)],
            vec![
                e(0, 0, 1, &[1]),
                e(1, 0, 1, &[1]),
                e(2, 0, 2, &[1]),
                e(3, 1, 3, &[1]),
            ],
        )
        .unwrap();
        let support: BTreeSet<VertexId> = [VertexId(0), VertexId(1)].into();
        let mesa = crate::pl::mesa_from(&g, &support, &support).unwrap();

        let mut curve = ExplicitCurve::default();
        let mut c0 = ComponentGeometry::default();
        c0.coords.insert(PointRef::EdgeEnd(EdgeId(0), 0), fin(0));
        c0.coords.insert(PointRef::EdgeEnd(EdgeId(1), 0), Coord::Infinity);
        c0.coords.insert(PointRef::EdgeEnd(EdgeId(2), 0), fin(1));
        let mut c1 = ComponentGeometry::default();
        c1.coords.insert(PointRef::EdgeEnd(EdgeId(0), 0), fin(0));
        c1.coords.insert(PointRef::EdgeEnd(EdgeId(1), 0), Coord::Infinity);
        c1.coords.insert(PointRef::EdgeEnd(EdgeId(3), 0), fin(1));
        curve.components.insert(VertexId(0), c0);
        curve.components.insert(VertexId(1), c1);

        let bv = boundary_value_space(&g, &mesa, &curve).unwrap();
        assert_eq!(bv.subspace.codim(), 1);
        assert_eq!(bv.kernel_dim, 1);
        let f = bv.subspace.functionals();
        assert_eq!(f.rows(), 1);
        let norm = crate::linalg::normalize_functional(f.row(0));
        assert_eq!(norm, vec![rat_int(1), rat_int(-1)]);

        // α on boundary edge 2 scaled by 3: functional becomes (3, −1)
        let mut scaled = curve.clone();
        scaled.alphas.insert(EdgeId(2), rat_int(3));
        let bv3 = boundary_value_space(&g, &mesa, &scaled).unwrap();
        let f3 = bv3.subspace.functionals();
        let norm3 = crate::linalg::normalize_functional(f3.row(0));
        assert_eq!(norm3, vec![rat_int(1), Rat::new((-1).into(), 3.into())]);
    }
}
