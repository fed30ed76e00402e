//! Combinatorial computations with logarithmic nodal curves.
//!
//! A fiber of a log curve is modeled as a dual graph whose edges carry
//! lengths in a free monoid `ℕ^r` (the smoothing parameters). Sections of
//! the characteristic sheaf correspond to piecewise linear functions on the
//! graph; plateau-shaped sections ("mesas") single out subcurves that can be
//! contracted to singular points. This crate computes, exactly over `ℚ`:
//!
//! * mesa decomposition and validation of PL sections ([`pl`]),
//! * multidegrees of associated line bundles ([`bundle`]),
//! * global sections and Čech cohomology of line bundles on explicit
//!   rational realizations of the subcurves ([`cech`]), including the
//!   boundary-value space `V` that controls the contracted singularity,
//! * singularity descriptors (genus, branches, δ-invariant, Gorenstein
//!   status) and an explicit presentation of the local ring at the
//!   contracted point ([`contraction`]),
//! * face specializations of the base monoid and fiberwise validation of
//!   mesa families ([`family`]).
//!
//! The [`doc`] and [`report`] modules provide the JSON document format and
//! the command layer used by the `mesa` binary.

pub mod acyclic;
pub mod bundle;
pub mod cech;
pub mod contraction;
pub mod doc;
pub mod family;
pub mod geometry;
pub mod graph;
pub mod linalg;
pub mod monoid;
pub mod pl;
pub mod report;

pub use bundle::{multidegree, outgoing_slope, Multidegree, RestrictionShape};
pub use cech::{
    boundary_value_space, cech_h, connecting_values, global_sections, BoundaryValues,
    SectionSpace, VSubspace,
};
pub use contraction::{
    classify_gorenstein, contract_fiber, genus_of_singularity, BbarElement, BbarRing,
    RingPresentation, SingularityDescriptor,
};
pub use doc::CurveDocument;
pub use family::{global_radius, is_simple, specialize, validate_mesa_family, LogFamily, Stratum};
pub use geometry::{Coord, ExplicitCurve, LineBundleData, PointRef};
pub use graph::{DualGraph, Edge, EdgeId, MarkingId, Path, Vertex, VertexId};
pub use monoid::{Face, GroupElement, MonoidElement};
pub use pl::{decompose, is_small, mesa_from, support_top_radius, validate_pl, Mesa,
    MesaDecomposition, PLFunction};
pub use acyclic::{generic_acyclicity, AcyclicityMode, AcyclicityVerdict};
