//! Explicit rational realizations of (sub)curves.
//!
//! Each realized component is a projective line over `ℚ` with pinned
//! coordinates for its special points: edge ends (node branches), markings
//! and optional auxiliary points. Each realized edge carries a gluing unit
//! `α ∈ ℚ∖{0}` identifying the two branch trivializations.
//!
//! Line bundles on a realization are given per component by a divisor on the
//! declared points; spaces of sections `L(D)` and the pinned evaluation
//! trivializations `ev_p` live here.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{DualGraph, EdgeId, MarkingId, VertexId};
use crate::linalg::{format_rat, QMat, Rat};

/// A point of `ℙ¹(ℚ)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Coord {
    Finite(Rat),
    Infinity,
}

impl Coord {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Coord::Finite(r) => Some(r),
            Coord::Infinity => None,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Finite(r) => write!(f, "{}", format_rat(r)),
            Coord::Infinity => write!(f, "inf"),
        }
    }
}

/// A declared special point on a realized component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointRef {
    /// End of an edge. The index distinguishes the two ends of a loop, in
    /// the order the edge lists its endpoints; 0 for non-loop edges.
    EdgeEnd(EdgeId, u8),
    Marking(MarkingId),
    /// Extra declared point, e.g. the pole point used by the truncated local
    /// ring model.
    Aux(u32),
}

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointRef::EdgeEnd(e, 0) => write!(f, "{e}"),
            PointRef::EdgeEnd(e, i) => write!(f, "{e}:{i}"),
            PointRef::Marking(m) => write!(f, "{m}"),
            PointRef::Aux(n) => write!(f, "x{n}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("component {0} declares point {1} twice or with a repeated coordinate")]
    RepeatedCoordinate(VertexId, String),
    #[error("edge {0} has gluing unit 0")]
    ZeroAlpha(EdgeId),
    #[error("component {0} is not realized")]
    MissingComponent(VertexId),
    #[error("component {0} has no coordinate for point {1}")]
    MissingCoordinate(VertexId, String),
    #[error("edge {0} is realized but endpoint {1} is not")]
    DanglingEdge(EdgeId, VertexId),
    #[error("component {0} has genus {1}; exact computations need rational components")]
    NonRationalComponent(VertexId, u32),
    #[error("divisor degree {0} on component {1} is out of range")]
    DegreeOutOfRange(String, VertexId),
}

/// Geometry of one rational component: coordinates of its declared points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComponentGeometry {
    pub coords: BTreeMap<PointRef, Coord>,
}

impl ComponentGeometry {
    pub fn coord(&self, p: &PointRef) -> Option<&Coord> {
        self.coords.get(p)
    }
}

/// A rational-coordinate realization of a set of components of the curve.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplicitCurve {
    pub components: BTreeMap<VertexId, ComponentGeometry>,
    pub alphas: BTreeMap<EdgeId, Rat>,
}

impl ExplicitCurve {
    pub fn is_realized(&self, v: VertexId) -> bool {
        self.components.contains_key(&v)
    }

    pub fn alpha(&self, e: EdgeId) -> Rat {
        self.alphas.get(&e).cloned().unwrap_or_else(Rat::one)
    }

    /// Edges of `g` whose both ends are realized; these contribute matching
    /// conditions to section spaces.
    pub fn realized_edges<'a>(&'a self, g: &'a DualGraph) -> impl Iterator<Item = EdgeId> + 'a {
        g.edges()
            .filter(|e| self.is_realized(e.ends.0) && self.is_realized(e.ends.1))
            .map(|e| e.id)
    }

    /// Check coordinates are present and pairwise distinct per component,
    /// units nonzero, realized components rational, and realized edges fully
    /// supported: ends carry coordinates on their components.
    pub fn validate(&self, g: &DualGraph) -> Result<(), GeometryError> {
        for (&vid, comp) in &self.components {
            let vertex = g
                .vertex(vid)
                .map_err(|_| GeometryError::MissingComponent(vid))?;
            if vertex.genus != 0 {
                return Err(GeometryError::NonRationalComponent(vid, vertex.genus));
            }
            let mut seen: Vec<&Coord> = Vec::new();
            for (p, c) in &comp.coords {
                if seen.contains(&c) {
                    return Err(GeometryError::RepeatedCoordinate(vid, p.to_string()));
                }
                seen.push(c);
            }
        }
        for (&eid, alpha) in &self.alphas {
            if alpha.is_zero() {
                return Err(GeometryError::ZeroAlpha(eid));
            }
        }
        for eid in self.realized_edges(g).collect::<Vec<_>>() {
            let e = g.edge(eid).expect("realized edge exists");
            let ends = if e.is_loop() {
                vec![(e.ends.0, PointRef::EdgeEnd(eid, 0)), (e.ends.0, PointRef::EdgeEnd(eid, 1))]
            } else {
                vec![(e.ends.0, PointRef::EdgeEnd(eid, 0)), (e.ends.1, PointRef::EdgeEnd(eid, 0))]
            };
            for (v, p) in ends {
                let comp = &self.components[&v];
                if comp.coord(&p).is_none() {
                    return Err(GeometryError::MissingCoordinate(v, p.to_string()));
                }
            }
        }
        Ok(())
    }

    /// The coordinate of the end of `e` lying on component `v`.
    pub fn end_coord(
        &self,
        g: &DualGraph,
        e: EdgeId,
        v: VertexId,
        end: u8,
    ) -> Result<(PointRef, Coord), GeometryError> {
        let comp = self
            .components
            .get(&v)
            .ok_or(GeometryError::MissingComponent(v))?;
        let edge = g.edge(e).map_err(|_| GeometryError::DanglingEdge(e, v))?;
        let p = if edge.is_loop() {
            PointRef::EdgeEnd(e, end)
        } else {
            PointRef::EdgeEnd(e, 0)
        };
        match comp.coord(&p) {
            Some(c) => Ok((p, c.clone())),
            None => Err(GeometryError::MissingCoordinate(v, p.to_string())),
        }
    }
}

/// A divisor on one component, supported on declared points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Divisor {
    pub multiplicities: BTreeMap<PointRef, BigInt>,
}

impl Divisor {
    pub fn of(points: &[(PointRef, i64)]) -> Self {
        let mut multiplicities = BTreeMap::new();
        for (p, m) in points {
            if *m != 0 {
                *multiplicities.entry(*p).or_insert_with(BigInt::zero) += BigInt::from(*m);
            }
        }
        multiplicities.retain(|_, m| !m.is_zero());
        Divisor { multiplicities }
    }

    pub fn mult(&self, p: &PointRef) -> BigInt {
        self.multiplicities.get(p).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> BigInt {
        self.multiplicities.values().sum()
    }
}

/// Line bundle data on an explicit curve: a divisor per realized component
/// and an optional override of the per-edge matching scalar (default: the
/// curve's gluing unit).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LineBundleData {
    pub divisors: BTreeMap<VertexId, Divisor>,
    pub matchings: BTreeMap<EdgeId, Rat>,
}

impl LineBundleData {
    pub fn trivial(curve: &ExplicitCurve) -> Self {
        LineBundleData {
            divisors: curve
                .components
                .keys()
                .map(|&v| (v, Divisor::default()))
                .collect(),
            matchings: BTreeMap::new(),
        }
    }

    pub fn divisor(&self, v: VertexId) -> Divisor {
        self.divisors.get(&v).cloned().unwrap_or_default()
    }

    pub fn matching(&self, curve: &ExplicitCurve, e: EdgeId) -> Rat {
        self.matchings
            .get(&e)
            .cloned()
            .unwrap_or_else(|| curve.alpha(e))
    }
}

/// The space `L(D) = {f : div(f) + D ≥ 0}` on a component, with the pinned
/// basis `x^j / m(x)` where `m(x) = ∏_{p finite} (x − p)^{n_p}` and
/// `0 ≤ j ≤ deg D`.
#[derive(Clone, Debug)]
pub struct SectionBasis {
    /// Finite support of `D`: (coordinate, multiplicity).
    finite: Vec<(Rat, BigInt)>,
    /// Total degree of `D`; dimension is `deg + 1` when nonnegative.
    degree: i64,
}

/// Basis of `L(D)` for a divisor on a rational component; dimension
/// `max(0, deg D + 1)`.
pub fn riemann_section_space(
    comp: &ComponentGeometry,
    vid: VertexId,
    divisor: &Divisor,
) -> Result<SectionBasis, GeometryError> {
    let mut finite = Vec::new();
    for (p, mult) in &divisor.multiplicities {
        let coord = comp
            .coord(p)
            .ok_or_else(|| GeometryError::MissingCoordinate(vid, p.to_string()))?;
        if let Coord::Finite(x) = coord {
            finite.push((x.clone(), mult.clone()));
        }
    }
    let degree = divisor
        .degree()
        .to_i64()
        .ok_or_else(|| GeometryError::DegreeOutOfRange(divisor.degree().to_string(), vid))?;
    if degree.unsigned_abs() > 1_000_000 {
        return Err(GeometryError::DegreeOutOfRange(degree.to_string(), vid));
    }
    Ok(SectionBasis { finite, degree })
}

impl SectionBasis {
    pub fn dim(&self) -> usize {
        if self.degree < 0 {
            0
        } else {
            self.degree as usize + 1
        }
    }

    /// Value of the `j`-th basis vector under `ev_q`, where `q` carries
    /// multiplicity `n = mult_D(q)`: multiply by `(x − q)^n` (by `u^n` in
    /// the `u = 1/x` chart at infinity) and evaluate.
    pub fn ev_basis(&self, q: &Coord, j: usize) -> Rat {
        assert!(j < self.dim());
        match q {
            Coord::Infinity => {
                // u^{n_inf} · x^j/m(x) = u^{deg − j} / ∏(1 − p·u)^{n_p} at u = 0
                if (j as i64) == self.degree {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            }
            Coord::Finite(x) => {
                // (x−q)^{n_q} · q^j / m(x) = q^j / ∏_{p≠q} (q − p)^{n_p}
                let mut denom = Rat::one();
                for (p, n) in &self.finite {
                    if p == x {
                        continue;
                    }
                    denom *= rat_pow(&(x - p), n);
                }
                rat_pow_usize(x, j) / denom
            }
        }
    }

    /// Evaluate a section given by basis coefficients at a declared point.
    pub fn ev(&self, coeffs: &[Rat], q: &Coord) -> Rat {
        assert_eq!(coeffs.len(), self.dim());
        let mut total = Rat::zero();
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                total += c * self.ev_basis(q, j);
            }
        }
        total
    }

    /// Evaluation functional `ev_q` as a row vector over the basis.
    pub fn ev_row(&self, q: &Coord) -> Vec<Rat> {
        (0..self.dim()).map(|j| self.ev_basis(q, j)).collect()
    }
}

fn rat_pow(base: &Rat, exp: &BigInt) -> Rat {
    let e = exp.to_i64().expect("small exponent");
    if e >= 0 {
        rat_pow_usize(base, e as usize)
    } else {
        rat_pow_usize(base, (-e) as usize).recip()
    }
}

fn rat_pow_usize(base: &Rat, exp: usize) -> Rat {
    let mut out = Rat::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

/// Convenience: evaluate a section of `L(D)` at a declared point.
pub fn evaluate_section(
    comp: &ComponentGeometry,
    vid: VertexId,
    divisor: &Divisor,
    coeffs: &[Rat],
    point: &PointRef,
) -> Result<Rat, GeometryError> {
    let basis = riemann_section_space(comp, vid, divisor)?;
    let q = comp
        .coord(point)
        .ok_or_else(|| GeometryError::MissingCoordinate(vid, point.to_string()))?;
    Ok(basis.ev(coeffs, q))
}

/// The per-component basis layout of `⊕_v L(D_v)`: offsets into the
/// concatenated coefficient vector.
pub struct BundleLayout {
    pub order: Vec<VertexId>,
    pub bases: BTreeMap<VertexId, SectionBasis>,
    pub offsets: BTreeMap<VertexId, usize>,
    pub total_dim: usize,
}

pub fn bundle_layout(
    curve: &ExplicitCurve,
    bundle: &LineBundleData,
) -> Result<BundleLayout, GeometryError> {
    let mut order = Vec::new();
    let mut bases = BTreeMap::new();
    let mut offsets = BTreeMap::new();
    let mut total = 0usize;
    for (&vid, comp) in &curve.components {
        let basis = riemann_section_space(comp, vid, &bundle.divisor(vid))?;
        order.push(vid);
        offsets.insert(vid, total);
        total += basis.dim();
        bases.insert(vid, basis);
    }
    Ok(BundleLayout {
        order,
        bases,
        offsets,
        total_dim: total,
    })
}

impl BundleLayout {
    /// Row of the evaluation functional at a declared point of `v`, padded
    /// to the full coefficient vector.
    pub fn ev_row(&self, v: VertexId, q: &Coord) -> Vec<Rat> {
        let mut row = vec![Rat::zero(); self.total_dim];
        let basis = &self.bases[&v];
        let off = self.offsets[&v];
        for (j, val) in basis.ev_row(q).into_iter().enumerate() {
            row[off + j] = val;
        }
        row
    }

    pub fn component_coeffs<'a>(&self, v: VertexId, coeffs: &'a [Rat]) -> &'a [Rat] {
        let off = self.offsets[&v];
        &coeffs[off..off + self.bases[&v].dim()]
    }
}

/// Matching matrix of the node conditions: one row per realized edge,
/// `σ_first(p) − s_e·σ_second(p) = 0`, where `first` is the endpoint with the
/// smaller component id (the listed order for loops) and `s_e` the matching
/// scalar of the bundle.
pub fn matching_matrix(
    g: &DualGraph,
    curve: &ExplicitCurve,
    bundle: &LineBundleData,
    layout: &BundleLayout,
) -> Result<(QMat, Vec<EdgeId>), GeometryError> {
    let edges: Vec<EdgeId> = curve.realized_edges(g).collect();
    let mut rows = Vec::with_capacity(edges.len());
    for &eid in &edges {
        let e = g.edge(eid).expect("realized edge");
        let (first, second, p_first, p_second) = if e.is_loop() {
            (e.ends.0, e.ends.0, PointRef::EdgeEnd(eid, 0), PointRef::EdgeEnd(eid, 1))
        } else {
            let (a, b) = if e.ends.0 <= e.ends.1 {
                (e.ends.0, e.ends.1)
            } else {
                (e.ends.1, e.ends.0)
            };
            (a, b, PointRef::EdgeEnd(eid, 0), PointRef::EdgeEnd(eid, 0))
        };
        let ca = curve.components[&first]
            .coord(&p_first)
            .ok_or_else(|| GeometryError::MissingCoordinate(first, p_first.to_string()))?
            .clone();
        let cb = curve.components[&second]
            .coord(&p_second)
            .ok_or_else(|| GeometryError::MissingCoordinate(second, p_second.to_string()))?
            .clone();
        let scalar = bundle.matching(curve, eid);
        let row_a = layout.ev_row(first, &ca);
        let row_b = layout.ev_row(second, &cb);
        let row: Vec<Rat> = row_a
            .into_iter()
            .zip(row_b)
            .map(|(a, b)| a - &scalar * b)
            .collect();
        rows.push(row);
    }
    let mat = if rows.is_empty() {
        QMat::zeros(0, layout.total_dim)
    } else {
        QMat::from_rows(rows)
    };
    Ok((mat, edges))
}
