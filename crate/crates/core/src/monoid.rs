//! The base monoid `P = ℕ^r`, its groupification `ℤ^r`, and face quotients.
//!
//! Smoothing parameters of nodes, values of piecewise linear functions and
//! mesa radii all live in `P`. Only free monoids are supported: every chart
//! appearing in scope is free, and general fs monoids would buy nothing but
//! saturation bookkeeping. A face is a set of generators sent to units; the
//! quotient projects onto the surviving coordinates.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("face index {0} out of range for rank {1}")]
    FaceIndexOutOfRange(usize, usize),
}

/// An element of `ℕ^r`, exact and of fixed rank.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonoidElement {
    coords: Vec<BigUint>,
}

/// An element of the groupification `ℤ^r`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    coords: Vec<BigInt>,
}

/// A face of `ℕ^r`: the set of generator indices (0-based) sent to units.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub killed: BTreeSet<usize>,
}

impl MonoidElement {
    pub fn zero(rank: usize) -> Self {
        MonoidElement {
            coords: vec![BigUint::zero(); rank],
        }
    }

    pub fn from_coords(coords: Vec<BigUint>) -> Self {
        MonoidElement { coords }
    }

    pub fn from_u64s(coords: &[u64]) -> Self {
        MonoidElement {
            coords: coords.iter().map(|&c| BigUint::from(c)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigUint] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Indices of the nonzero coordinates.
    pub fn support(&self) -> BTreeSet<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn add(&self, other: &MonoidElement) -> Result<MonoidElement, MonoidError> {
        check_rank(self.rank(), other.rank())?;
        Ok(MonoidElement {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// The partial order with `ℕ^r` as positive cone: `a ≤ b` iff `b − a ≥ 0`
    /// coordinatewise.
    pub fn leq(&self, other: &MonoidElement) -> Result<bool, MonoidError> {
        check_rank(self.rank(), other.rank())?;
        Ok(self.coords.iter().zip(&other.coords).all(|(a, b)| a <= b))
    }

    pub fn to_group(&self) -> GroupElement {
        GroupElement {
            coords: self.coords.iter().map(|c| BigInt::from(c.clone())).collect(),
        }
    }

    /// `other − self` in the groupification.
    pub fn diff(&self, other: &MonoidElement) -> Result<GroupElement, MonoidError> {
        check_rank(self.rank(), other.rank())?;
        Ok(GroupElement {
            coords: other
                .coords
                .iter()
                .zip(&self.coords)
                .map(|(b, a)| BigInt::from(b.clone()) - BigInt::from(a.clone()))
                .collect(),
        })
    }

    /// Subtraction inside the monoid; `None` when the result would leave `ℕ^r`.
    pub fn checked_sub(&self, other: &MonoidElement) -> Result<Option<MonoidElement>, MonoidError> {
        check_rank(self.rank(), other.rank())?;
        if !other.leq(self)? {
            return Ok(None);
        }
        Ok(Some(MonoidElement {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }))
    }

    pub fn scale(&self, n: u64) -> MonoidElement {
        MonoidElement {
            coords: self.coords.iter().map(|c| c * BigUint::from(n)).collect(),
        }
    }

    /// Projection onto the coordinates outside the face, in ascending order.
    /// The result is zero exactly when `supp(x) ⊆ S`, i.e. `x` maps to a unit.
    pub fn face_quotient(&self, face: &Face) -> Result<MonoidElement, MonoidError> {
        face.check(self.rank())?;
        Ok(MonoidElement {
            coords: self
                .coords
                .iter()
                .enumerate()
                .filter(|(i, _)| !face.killed.contains(i))
                .map(|(_, c)| c.clone())
                .collect(),
        })
    }
}

impl GroupElement {
    pub fn zero(rank: usize) -> Self {
        GroupElement {
            coords: vec![BigInt::zero(); rank],
        }
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        GroupElement {
            coords: coords.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The unique `m ∈ ℤ` with `self = m·delta`, when it exists.
    ///
    /// `delta = 0` forces `self = 0` (returning `m = 0`): a node that never
    /// smooths pins the PL values on its two branches to each other.
    pub fn integer_multiple_of(&self, delta: &MonoidElement) -> Result<Option<BigInt>, MonoidError> {
        check_rank(self.rank(), delta.rank())?;
        if delta.is_zero() {
            return Ok(if self.is_zero() {
                Some(BigInt::zero())
            } else {
                None
            });
        }
        // candidate from the first nonzero coordinate of delta
        let pivot = delta.coords.iter().position(|c| !c.is_zero()).unwrap();
        let d = BigInt::from(delta.coords[pivot].clone());
        let n = &self.coords[pivot];
        if (n % &d) != BigInt::zero() {
            return Ok(None);
        }
        let m = n / &d;
        let ok = self
            .coords
            .iter()
            .zip(&delta.coords)
            .all(|(a, b)| *a == &m * BigInt::from(b.clone()));
        Ok(if ok { Some(m) } else { None })
    }
}

impl Face {
    pub fn empty() -> Self {
        Face {
            killed: BTreeSet::new(),
        }
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Face {
            killed: indices.into_iter().collect(),
        }
    }

    pub fn check(&self, rank: usize) -> Result<(), MonoidError> {
        match self.killed.iter().find(|&&i| i >= rank) {
            Some(&i) => Err(MonoidError::FaceIndexOutOfRange(i, rank)),
            None => Ok(()),
        }
    }

    /// Rank of the quotient monoid.
    pub fn quotient_rank(&self, rank: usize) -> usize {
        rank - self.killed.len()
    }

    /// All `2^r` faces, by ascending killed-set size then lexicographically.
    pub fn enumerate(rank: usize) -> Vec<Face> {
        let mut faces: Vec<Face> = (0u64..(1u64 << rank))
            .map(|mask| Face {
                killed: (0..rank).filter(|i| mask >> i & 1 == 1).collect(),
            })
            .collect();
        faces.sort_by_key(|f| (f.killed.len(), f.killed.iter().copied().collect::<Vec<_>>()));
        faces
    }

    /// Union of two faces where `other` is expressed in the quotient
    /// coordinates left after killing `self`.
    pub fn compose(&self, rank: usize, other: &Face) -> Result<Face, MonoidError> {
        self.check(rank)?;
        let survivors: Vec<usize> = (0..rank).filter(|i| !self.killed.contains(i)).collect();
        other.check(survivors.len())?;
        let mut killed = self.killed.clone();
        for &j in &other.killed {
            killed.insert(survivors[j]);
        }
        Ok(Face { killed })
    }
}

fn check_rank(a: usize, b: usize) -> Result<(), MonoidError> {
    if a == b {
        Ok(())
    } else {
        Err(MonoidError::RankMismatch(a, b))
    }
}

impl fmt::Debug for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", items.join(","))
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", items.join(","))
    }
}
