//! Contracted fibers and their singularities.
//!
//! Collapsing the support of each mesa to a point produces a curve whose new
//! singular points have genus `g = genus(E)`, branch count `m = #boundary
//! edges` and δ-invariant `δ = g + m − 1`. With explicit geometry the local
//! ring at the point is pinned down exactly: functions on the branches with
//! equal values at the attachment points and first-order jet in the boundary
//! value space `V`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cech::{boundary_value_space, CechError, VSubspace};
use crate::geometry::ExplicitCurve;
use crate::graph::{DualGraph, EdgeId, GraphError, VertexId};
use crate::linalg::{format_rat, Rat};
use crate::pl::{Mesa, MesaDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum GorensteinStatus {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for GorensteinStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GorensteinStatus::Yes => write!(f, "yes"),
            GorensteinStatus::No => write!(f, "no"),
            GorensteinStatus::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ContractionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cech(#[from] CechError),
    #[error("genus preservation breached: {before} before, {after} after contraction")]
    GenusBreach { before: u64, after: u64 },
    #[error("geometry required for this computation")]
    GeometryAbsent,
    #[error("δ = {0}, m = {1} give negative genus")]
    NegativeGenus(u64, u64),
    #[error("product exceeds the pole bound {0}")]
    Truncation(usize),
    #[error("element does not satisfy the jet condition")]
    JetConditionViolated,
    #[error("Gorenstein classification needs genus 1, got {0}")]
    NotGenusOne(u64),
}

/// One branch of a contracted singularity: a boundary edge, the component
/// it leads to and the local parameter name used in presentations.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Branch {
    pub edge: EdgeId,
    pub outside: VertexId,
    pub param: String,
}

/// Singularity data of one contracted mesa.
#[derive(Clone, Debug)]
pub struct SingularityDescriptor {
    pub genus: u64,
    pub branches: usize,
    pub delta_invariant: u64,
    pub branch_data: Vec<Branch>,
    /// Boundary value space, when geometry was supplied.
    pub v_space: Option<VSubspace>,
    /// Entries of the defining functional when `codim V = 1`.
    pub constants: Option<Vec<Rat>>,
    pub elliptic_gorenstein: GorensteinStatus,
}

/// `g(p) = δ(p) − m(p) + 1`.
pub fn genus_of_singularity(delta: u64, m: u64) -> Result<u64, ContractionError> {
    if m == 0 || delta + 1 < m {
        return Err(ContractionError::NegativeGenus(delta, m));
    }
    Ok(delta + 1 - m)
}

/// Elliptic Gorenstein test for a genus-one boundary value space: `V` has
/// codimension one and its defining functional has no zero coordinate.
pub fn classify_gorenstein(genus: u64, v: &VSubspace) -> Result<bool, ContractionError> {
    if genus != 1 {
        return Err(ContractionError::NotGenusOne(genus));
    }
    if v.codim() != 1 {
        return Ok(false);
    }
    let f = v.functionals();
    debug_assert_eq!(f.rows(), 1);
    Ok(f.row(0).iter().all(|c| !c.is_zero()))
}

fn branches_of(g: &DualGraph, mesa: &Mesa) -> Vec<Branch> {
    mesa.boundary_edges(g)
        .into_iter()
        .enumerate()
        .map(|(i, eid)| {
            let e = g.edge(eid).expect("boundary edge");
            let outside = if mesa.support.contains(&e.ends.0) {
                e.ends.1
            } else {
                e.ends.0
            };
            Branch {
                edge: eid,
                outside,
                param: format!("x{}", i + 1),
            }
        })
        .collect()
}

fn describe_descriptor(
    g: &DualGraph,
    mesa: &Mesa,
    geometry: Option<&ExplicitCurve>,
) -> Result<SingularityDescriptor, ContractionError> {
    let genus = g.genus(&mesa.support)?;
    let branch_data = branches_of(g, mesa);
    let m = branch_data.len();
    let delta_invariant = genus + m as u64 - 1;
    let (v_space, constants) = match geometry {
        Some(curve) => {
            let bv = boundary_value_space(g, mesa, curve)?;
            let functionals = bv.subspace.functionals();
            let constants = if bv.subspace.codim() == 1 {
                Some(functionals.row(0).to_vec())
            } else {
                None
            };
            (Some(bv.subspace), constants)
        }
        None => (None, None),
    };
    let elliptic_gorenstein = if genus == 1 {
        match &v_space {
            Some(v) => {
                if classify_gorenstein(1, v)? {
                    GorensteinStatus::Yes
                } else {
                    GorensteinStatus::No
                }
            }
            None => GorensteinStatus::Unknown,
        }
    } else {
        GorensteinStatus::No
    };
    Ok(SingularityDescriptor {
        genus,
        branches: m,
        delta_invariant,
        branch_data,
        v_space,
        constants,
        elliptic_gorenstein,
    })
}

/// Contract every mesa support to a singular vertex. Returns the contracted
/// graph, one descriptor per mesa (in decomposition order; the singular
/// vertex of mesa `i` is `vertex_map[min support id]`), and the vertex
/// surjection. Arithmetic genus is preserved and checked.
pub type ContractedFiber = (
    DualGraph,
    Vec<SingularityDescriptor>,
    BTreeMap<VertexId, VertexId>,
);

pub fn contract_fiber(
    g: &DualGraph,
    decomposition: &MesaDecomposition,
    geometries: &BTreeMap<usize, ExplicitCurve>,
) -> Result<ContractedFiber, ContractionError> {
    let mut internal: BTreeSet<EdgeId> = BTreeSet::new();
    for mesa in &decomposition.mesas {
        internal.extend(g.edges_within(&mesa.support).map(|e| e.id));
    }
    let before = g.total_genus();
    let (contracted, vmap) = g.contract_edges(&internal)?;
    let after = contracted.total_genus();
    if before != after {
        return Err(ContractionError::GenusBreach { before, after });
    }
    let mut descriptors = Vec::new();
    for (i, mesa) in decomposition.mesas.iter().enumerate() {
        descriptors.push(describe_descriptor(g, mesa, geometries.get(&i))?);
    }
    // the contracted graph's arithmetic genus splits as b₁ + ordinary vertex
    // genera + singularity genera; the singular vertices carry their genus
    Ok((contracted, descriptors, vmap))
}

/// The local ring at the contracted point, presented on first-order jets:
/// functions on the branches with matching values and jet vector in `V`.
#[derive(Clone, Debug)]
pub struct RingPresentation {
    pub branches: Vec<Branch>,
    pub v_space: VSubspace,
    pub genus: u64,
    pub classification: String,
}

/// Build the presentation from the mesa and its explicit geometry.
pub fn ring_presentation(
    g: &DualGraph,
    mesa: &Mesa,
    curve: &ExplicitCurve,
) -> Result<RingPresentation, ContractionError> {
    let bv = boundary_value_space(g, mesa, curve)?;
    let genus = g.genus(&mesa.support)?;
    let branches = branches_of(g, mesa);
    let classification = classify(genus, &bv.subspace);
    Ok(RingPresentation {
        branches,
        v_space: bv.subspace,
        genus,
        classification,
    })
}

fn classify(genus: u64, v: &VSubspace) -> String {
    let m = v.ambient;
    if genus == 0 {
        return match m {
            1 => "smooth point".into(),
            2 => "node".into(),
            _ => format!("rational {m}-fold point"),
        };
    }
    if v.dim() == 0 && genus == m as u64 {
        return if m == 1 {
            "cusp".into()
        } else {
            format!("{m} cusps glued transversally")
        };
    }
    if genus == 1 && v.codim() == 1 {
        let f = v.functionals();
        let nonzero: Vec<usize> = (0..m).filter(|&i| !f[(0, i)].is_zero()).collect();
        let k = nonzero.len();
        let l = m - k;
        let inner = match k {
            1 => "cusp".to_string(),
            2 => "tacnode".to_string(),
            _ => format!("elliptic {k}-fold point"),
        };
        if l == 0 {
            return inner;
        }
        let outer = match l {
            1 => "smooth rational curve".to_string(),
            _ => format!("rational {l}-fold point"),
        };
        return format!("{inner} glued transversally to a {outer}");
    }
    format!("genus-{genus} singularity with {m} branches")
}

/// Scale a functional to coprime integer entries, first nonzero positive.
fn integer_normalize(row: &[Rat]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for r in row {
        lcm = lcm.lcm(r.denom());
    }
    let mut ints: Vec<BigInt> = row.iter().map(|r| r.numer() * &lcm / r.denom()).collect();
    let mut gcd = BigInt::zero();
    for i in &ints {
        gcd = gcd.gcd(i);
    }
    if !gcd.is_zero() && !gcd.is_one() {
        for i in &mut ints {
            *i /= &gcd;
        }
    }
    if let Some(first) = ints.iter().find(|i| !i.is_zero()) {
        if first.is_negative() {
            for i in &mut ints {
                *i = -i.clone();
            }
        }
    }
    ints
}

fn jet_term(coeff: &BigInt, branch: usize) -> String {
    let var = format!("f'(p{})", branch + 1);
    if coeff.is_one() {
        var
    } else {
        format!("{coeff}*{var}")
    }
}

impl fmt::Display for RingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.branches.len();
        writeln!(f, "local ring at the contracted point ({m} branch(es)):")?;
        for (i, b) in self.branches.iter().enumerate() {
            writeln!(
                f,
                "  branch p{}: local parameter {} on {} via edge {}",
                i + 1,
                b.param,
                b.outside,
                b.edge
            )?;
        }
        if m > 1 {
            let vals: Vec<String> = (1..=m).map(|i| format!("f(p{i})")).collect();
            writeln!(f, "  values:  {}", vals.join(" = "))?;
        }
        let functionals = self.v_space.functionals();
        if functionals.rows() == 0 {
            writeln!(f, "  jets:    unconstrained")?;
        }
        for r in 0..functionals.rows() {
            let ints = integer_normalize(functionals.row(r));
            let pos: Vec<String> = ints
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_positive())
                .map(|(i, c)| jet_term(c, i))
                .collect();
            let neg: Vec<String> = ints
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_negative())
                .map(|(i, c)| jet_term(&-c.clone(), i))
                .collect();
            let eq = match (pos.is_empty(), neg.is_empty()) {
                (false, false) => format!("{} = {}", pos.join(" + "), neg.join(" + ")),
                (false, true) => format!("{} = 0", pos.join(" + ")),
                (true, false) => format!("{} = 0", neg.join(" + ")),
                (true, true) => continue,
            };
            writeln!(f, "  jets:    {eq}")?;
        }
        write!(f, "  type:    {}", self.classification)
    }
}

/// The truncated model of the local ring: per branch a polynomial in the
/// local parameter with zero constant term and degree at most the pole
/// bound, plus a constant, subject to the first-order jet condition.
#[derive(Clone, Debug)]
pub struct BbarRing {
    pub v_space: VSubspace,
    pub bound: usize,
}

pub const DEFAULT_POLE_BOUND: usize = 6;

/// `(f, c)` with `f` the branch polynomials (coefficients of `t, t², …`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbarElement {
    pub branch_polys: Vec<Vec<Rat>>,
    pub constant: Rat,
}

impl BbarRing {
    pub fn new(v_space: VSubspace, bound: usize) -> Self {
        BbarRing { v_space, bound }
    }

    pub fn branches(&self) -> usize {
        self.v_space.ambient
    }

    pub fn one(&self) -> BbarElement {
        BbarElement {
            branch_polys: vec![Vec::new(); self.branches()],
            constant: Rat::one(),
        }
    }

    pub fn element(
        &self,
        mut branch_polys: Vec<Vec<Rat>>,
        constant: Rat,
    ) -> Result<BbarElement, ContractionError> {
        assert_eq!(branch_polys.len(), self.branches());
        for p in &mut branch_polys {
            while p.last().is_some_and(Zero::is_zero) {
                p.pop();
            }
            if p.len() > self.bound {
                return Err(ContractionError::Truncation(self.bound));
            }
        }
        let jets: Vec<Rat> = branch_polys
            .iter()
            .map(|p| p.first().cloned().unwrap_or_else(Rat::zero))
            .collect();
        if !self.v_space.contains(&jets) {
            return Err(ContractionError::JetConditionViolated);
        }
        Ok(BbarElement {
            branch_polys,
            constant,
        })
    }

    /// `(f, c)·(f′, c′) = (ff′ + cf′ + c′f, cc′)`; the product term `ff′`
    /// vanishes to second order, so the jet condition is preserved
    /// automatically. Errors when a pole exceeds the bound.
    pub fn multiply(
        &self,
        a: &BbarElement,
        b: &BbarElement,
    ) -> Result<BbarElement, ContractionError> {
        let mut branch_polys = Vec::with_capacity(self.branches());
        for (p, q) in a.branch_polys.iter().zip(&b.branch_polys) {
            let deg = if p.is_empty() || q.is_empty() {
                p.len().max(q.len())
            } else {
                p.len() + q.len()
            };
            if deg > self.bound {
                return Err(ContractionError::Truncation(self.bound));
            }
            // coefficients are of t^1.. so the product of t^i and t^j sits
            // at t^{i+j}: offset arithmetic below accounts for the shift
            let mut out = vec![Rat::zero(); deg];
            for (i, pi) in p.iter().enumerate() {
                for (j, qj) in q.iter().enumerate() {
                    let k = i + j + 1; // (i+1)+(j+1)-1 in the shifted vector
                    out[k] += pi * qj;
                }
            }
            for (i, pi) in p.iter().enumerate() {
                out[i] += &b.constant * pi;
            }
            for (j, qj) in q.iter().enumerate() {
                out[j] += &a.constant * qj;
            }
            while out.last().is_some_and(Zero::is_zero) {
                out.pop();
            }
            branch_polys.push(out);
        }
        Ok(BbarElement {
            branch_polys,
            constant: &a.constant * &b.constant,
        })
    }

    pub fn add(&self, a: &BbarElement, b: &BbarElement) -> BbarElement {
        let branch_polys = a
            .branch_polys
            .iter()
            .zip(&b.branch_polys)
            .map(|(p, q)| {
                let mut out = vec![Rat::zero(); p.len().max(q.len())];
                for (i, x) in p.iter().enumerate() {
                    out[i] += x;
                }
                for (i, x) in q.iter().enumerate() {
                    out[i] += x;
                }
                while out.last().is_some_and(Zero::is_zero) {
                    out.pop();
                }
                out
            })
            .collect();
        BbarElement {
            branch_polys,
            constant: &a.constant + &b.constant,
        }
    }
}

/// Convenience free function matching the operation vocabulary.
pub fn bbar_multiply(
    ring: &BbarRing,
    a: &BbarElement,
    b: &BbarElement,
) -> Result<BbarElement, ContractionError> {
    ring.multiply(a, b)
}

impl fmt::Display for BbarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![format_rat(&self.constant)];
        for (i, p) in self.branch_polys.iter().enumerate() {
            for (j, c) in p.iter().enumerate() {
                if !c.is_zero() {
                    parts.push(format!("{}*x{}^{}", format_rat(c), i + 1, j + 1));
                }
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}
