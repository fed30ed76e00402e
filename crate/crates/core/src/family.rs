//! Combinatorial families over the faces of the base monoid.
//!
//! A face sends some generators of `ℕ^r` to units; the corresponding fiber
//! contracts every edge whose smoothing parameter is supported inside the
//! face and pushes all values through the quotient. Enumerating all `2^r`
//! faces enumerates the characteristic stalk types of the base, which is
//! exactly what the fiberwise mesa condition depends on.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::acyclic::AcyclicityVerdict;
use crate::graph::{DualGraph, EdgeId, GraphError, VertexId};
use crate::monoid::{Face, MonoidElement, MonoidError};
use crate::pl::{decompose, validate_pl, DecomposeError, MesaDecomposition, PLFunction, PlError};

/// Default bound on the base rank for full strata enumeration (`2^r` faces).
pub const DEFAULT_RANK_BOUND: usize = 12;

#[derive(Clone, Debug)]
pub struct LogFamily {
    pub graph: DualGraph,
    pub pl: PLFunction,
}

impl LogFamily {
    pub fn new(graph: DualGraph, pl: PLFunction) -> Result<Self, PlError> {
        validate_pl(&graph, &pl)?;
        Ok(LogFamily { graph, pl })
    }

    pub fn rank(&self) -> usize {
        self.graph.rank()
    }
}

/// One face specialization of the family.
#[derive(Clone, Debug)]
pub struct Stratum {
    pub face: Face,
    pub graph: DualGraph,
    pub pl: PLFunction,
    pub decomposition: Result<MesaDecomposition, DecomposeError>,
    /// Map from the original vertices onto the stratum's vertices.
    pub vertex_map: BTreeMap<VertexId, VertexId>,
}

impl Stratum {
    /// Radii of the stratum's mesas, in decomposition order.
    pub fn radii(&self) -> Vec<MonoidElement> {
        match &self.decomposition {
            Ok(d) => d.mesas.iter().map(|m| m.radius.clone()).collect(),
            Err(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error("merged vertices received different values after the quotient: {0} vs {1}")]
    MergedValueMismatch(MonoidElement, MonoidElement),
    #[error("rank {0} exceeds the enumeration bound {1}")]
    RankBound(usize, usize),
    #[error("the family is not fiberwise a sum of mesas (stratum {0:?}): {1}")]
    NotMesaFamily(Face, String),
    #[error("radius is not coherent at face {0:?}: expected {1}, stratum has {2}")]
    RadiusIncoherent(Face, MonoidElement, MonoidElement),
    #[error("family is not simple (stratum {0:?} has {1} mesas)")]
    NotSimple(Face, usize),
}

/// Specialize to a face: contract the edges whose delta dies in the
/// quotient, push PL values through, re-decompose.
pub fn specialize(fam: &LogFamily, face: &Face) -> Result<Stratum, FamilyError> {
    face.check(fam.rank())?;
    let dead: BTreeSet<EdgeId> = fam
        .graph
        .edges()
        .filter(|e| {
            e.delta
                .face_quotient(face)
                .expect("face checked")
                .is_zero()
        })
        .map(|e| e.id)
        .collect();
    let (contracted, vertex_map) = fam.graph.contract_edges(&dead)?;

    // rebuild the graph with quotient deltas
    let new_rank = face.quotient_rank(fam.rank());
    let vertices = contracted.vertices().cloned().collect::<Vec<_>>();
    let edges = contracted
        .edges()
        .map(|e| {
            Ok(crate::graph::Edge {
                id: e.id,
                ends: e.ends,
                delta: e.delta.face_quotient(face)?,
            })
        })
        .collect::<Result<Vec<_>, MonoidError>>()?;
    let graph = DualGraph::new(new_rank, vertices, edges)?;

    // push values through the quotient; merged vertices must agree
    let mut vertex_values: BTreeMap<VertexId, MonoidElement> = BTreeMap::new();
    for (orig, target) in &vertex_map {
        let q = fam.pl.vertex_values[orig].face_quotient(face)?;
        match vertex_values.get(target) {
            Some(existing) if existing != &q => {
                return Err(FamilyError::MergedValueMismatch(existing.clone(), q));
            }
            _ => {
                vertex_values.insert(*target, q);
            }
        }
    }
    let pl = PLFunction {
        vertex_values,
        marking_slopes: fam.pl.marking_slopes.clone(),
    };
    validate_pl(&graph, &pl)?;
    let decomposition = decompose(&graph, &pl);
    Ok(Stratum {
        face: face.clone(),
        graph,
        pl,
        decomposition,
        vertex_map,
    })
}

/// Per-stratum verdicts over all faces.
#[derive(Clone, Debug, serde::Serialize)]
pub struct StratumVerdict {
    pub face: Vec<usize>,
    pub mesas: usize,
    pub radii: Vec<String>,
    pub shape_ok: bool,
    pub acyclicity: Vec<AcyclicityVerdict>,
    pub diagnostics: Option<String>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct FamilyReport {
    pub strata: Vec<StratumVerdict>,
    /// Pass iff every stratum decomposes into acyclic mesas. Indeterminate
    /// acyclicity verdicts degrade the overall verdict to `Indeterminate`.
    pub overall: AcyclicityVerdict,
}

/// Validate the mesa-curve condition on every stratum.
pub fn validate_mesa_family(
    fam: &LogFamily,
    rank_bound: usize,
) -> Result<FamilyReport, FamilyError> {
    if fam.rank() > rank_bound {
        return Err(FamilyError::RankBound(fam.rank(), rank_bound));
    }
    let mut strata = Vec::new();
    let mut overall = AcyclicityVerdict::Yes;
    for face in Face::enumerate(fam.rank()) {
        let stratum = specialize(fam, &face)?;
        let verdict = match &stratum.decomposition {
            Ok(d) => {
                let acyclicity = d.verdicts.clone();
                for v in &acyclicity {
                    overall = match (overall, *v) {
                        (_, AcyclicityVerdict::No) | (AcyclicityVerdict::No, _) => {
                            AcyclicityVerdict::No
                        }
                        (AcyclicityVerdict::Indeterminate, _)
                        | (_, AcyclicityVerdict::Indeterminate) => {
                            AcyclicityVerdict::Indeterminate
                        }
                        _ => AcyclicityVerdict::Yes,
                    };
                }
                StratumVerdict {
                    face: face.killed.iter().map(|i| i + 1).collect(),
                    mesas: d.len(),
                    radii: stratum.radii().iter().map(ToString::to_string).collect(),
                    shape_ok: true,
                    acyclicity,
                    diagnostics: None,
                }
            }
            Err(e) => {
                overall = AcyclicityVerdict::No;
                StratumVerdict {
                    face: face.killed.iter().map(|i| i + 1).collect(),
                    mesas: 0,
                    radii: Vec::new(),
                    shape_ok: false,
                    acyclicity: Vec::new(),
                    diagnostics: Some(e.to_string()),
                }
            }
        };
        strata.push(verdict);
    }
    Ok(FamilyReport { strata, overall })
}

/// A family is simple when no stratum has more than one mesa.
pub fn is_simple(fam: &LogFamily, rank_bound: usize) -> Result<bool, FamilyError> {
    if fam.rank() > rank_bound {
        return Err(FamilyError::RankBound(fam.rank(), rank_bound));
    }
    for face in Face::enumerate(fam.rank()) {
        let stratum = specialize(fam, &face)?;
        match &stratum.decomposition {
            Ok(d) => {
                if d.len() > 1 {
                    return Ok(false);
                }
            }
            Err(e) => {
                return Err(FamilyError::NotMesaFamily(face, e.to_string()));
            }
        }
    }
    Ok(true)
}

/// For a simple family: the generic radius restricts to every stratum's
/// radius through the face quotient, with the empty mesa matching radius 0.
/// Returns the per-face radii (in face enumeration order).
pub fn global_radius(
    fam: &LogFamily,
    rank_bound: usize,
) -> Result<Vec<(Face, MonoidElement)>, FamilyError> {
    if fam.rank() > rank_bound {
        return Err(FamilyError::RankBound(fam.rank(), rank_bound));
    }
    for face in Face::enumerate(fam.rank()) {
        let stratum = specialize(fam, &face)?;
        if let Ok(d) = &stratum.decomposition {
            if d.len() > 1 {
                return Err(FamilyError::NotSimple(face, d.len()));
            }
        }
    }
    let generic = specialize(fam, &Face::empty())?;
    let generic_radius = match &generic.decomposition {
        Ok(d) if d.len() == 1 => d.mesas[0].radius.clone(),
        _ => MonoidElement::zero(fam.rank()),
    };
    let mut out = Vec::new();
    for face in Face::enumerate(fam.rank()) {
        let stratum = specialize(fam, &face)?;
        let expected = generic_radius.face_quotient(&face)?;
        let actual = match &stratum.decomposition {
            Ok(d) if d.len() == 1 => d.mesas[0].radius.clone(),
            Ok(_) => MonoidElement::zero(face.quotient_rank(fam.rank())),
            Err(e) => return Err(FamilyError::NotMesaFamily(face, e.to_string())),
        };
        if expected != actual {
            return Err(FamilyError::RadiusIncoherent(face, expected, actual));
        }
        out.push((face, actual));
    }
    Ok(out)
}
