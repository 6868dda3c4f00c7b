//! Δ-complexes: semi-simplicial cell structures with face maps, their
//! validation, boundary matrices, Euler characteristic, orientations, and
//! fundamental cycles.
//!
//! A complex of dimension `n` stores one cell count per dimension and, for
//! every `k`-cell with `k ≥ 1`, the `(k+1)`-tuple of its `(k−1)`-dimensional
//! faces `(∂_0, …, ∂_k)`. Self-gluings are allowed; this is what makes the
//! one-vertex surface complexes possible.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::Ring;
use crate::matrix::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("dimension must be at least 1")]
    DimensionZero,
    #[error("cell counts cover dimensions 0..={expected}, got {got} entries")]
    CountsMismatch { expected: usize, got: usize },
    #[error("face table for dimension {dim} has {got} rows, expected {expected}")]
    FaceTableMismatch { dim: usize, expected: usize, got: usize },
    #[error("cell {cell} of dimension {dim} has {got} faces, expected {expected}")]
    FaceArityMismatch { dim: usize, cell: usize, expected: usize, got: usize },
    #[error("face index out of range: ∂_{slot} of {dim}-cell {cell}")]
    FaceIndexOutOfRange { dim: usize, cell: usize, slot: usize },
    #[error("degree {k} is outside 1..={n}")]
    DegreeOutOfRange { k: usize, n: usize },
    #[error("complex is not a closed pseudo-manifold: {0}")]
    NotPseudoManifold(String),
    #[error("top-cell adjacency graph is disconnected")]
    Disconnected,
    #[error("orientation vector has {got} signs for {expected} top cells")]
    OrientationLength { expected: usize, got: usize },
    #[error("signed top-cell chain is not a cycle")]
    NotACycle,
}

/// A semi-simplicial cell structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaComplex {
    dimension: usize,
    cell_counts: Vec<usize>,
    // faces[k][cell][slot], meaningful for k in 1..=dimension
    faces: Vec<Vec<Vec<usize>>>,
}

impl DeltaComplex {
    /// Builds a complex from cell counts and face tables keyed by dimension.
    /// Shape problems are hard errors; face-index validity and the
    /// semi-simplicial identities are left to [`DeltaComplex::validate`].
    pub fn new(
        dimension: usize,
        cell_counts: Vec<usize>,
        face_tables: BTreeMap<usize, Vec<Vec<usize>>>,
    ) -> Result<Self, ComplexError> {
        if dimension == 0 {
            return Err(ComplexError::DimensionZero);
        }
        if cell_counts.len() != dimension + 1 {
            return Err(ComplexError::CountsMismatch {
                expected: dimension,
                got: cell_counts.len(),
            });
        }
        let mut faces = vec![Vec::new(); dimension + 1];
        for k in 1..=dimension {
            let table = face_tables.get(&k).cloned().unwrap_or_default();
            if table.len() != cell_counts[k] {
                return Err(ComplexError::FaceTableMismatch {
                    dim: k,
                    expected: cell_counts[k],
                    got: table.len(),
                });
            }
            for (cell, tuple) in table.iter().enumerate() {
                if tuple.len() != k + 1 {
                    return Err(ComplexError::FaceArityMismatch {
                        dim: k,
                        cell,
                        expected: k + 1,
                        got: tuple.len(),
                    });
                }
            }
            faces[k] = table;
        }
        Ok(DeltaComplex { dimension, cell_counts, faces })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cell_count(&self, k: usize) -> usize {
        self.cell_counts.get(k).copied().unwrap_or(0)
    }

    pub fn cell_counts(&self) -> &[usize] {
        &self.cell_counts
    }

    pub fn top_cells(&self) -> usize {
        self.cell_counts[self.dimension]
    }

    /// The `slot`-th face `∂_slot` of the given `k`-cell.
    pub fn face(&self, k: usize, cell: usize, slot: usize) -> usize {
        self.faces[k][cell][slot]
    }

    pub fn face_tuple(&self, k: usize, cell: usize) -> &[usize] {
        &self.faces[k][cell]
    }

    fn face_indices_in_range(&self) -> Result<(), ComplexError> {
        for k in 1..=self.dimension {
            for (cell, tuple) in self.faces[k].iter().enumerate() {
                for (slot, &f) in tuple.iter().enumerate() {
                    if f >= self.cell_counts[k - 1] {
                        return Err(ComplexError::FaceIndexOutOfRange { dim: k, cell, slot });
                    }
                }
            }
        }
        Ok(())
    }

    /// Diagnostics for the four structural checks: face-index ranges, the
    /// semi-simplicial identities, top-cell adjacency connectivity, and the
    /// closed-pseudo-manifold condition.
    pub fn validate(&self) -> Diagnostics {
        let mut diag = Diagnostics::default();

        if let Err(e) = self.face_indices_in_range() {
            diag.messages.push(e.to_string());
            diag.messages.push("remaining checks skipped".to_string());
            return diag;
        }
        diag.index_ranges = true;

        // ∂_i ∘ ∂_j = ∂_{j−1} ∘ ∂_i for i < j, checked cellwise.
        let mut identities_ok = true;
        for k in 2..=self.dimension {
            for cell in 0..self.cell_counts[k] {
                for j in 1..=k {
                    for i in 0..j {
                        let lhs = self.face(k - 1, self.face(k, cell, j), i);
                        let rhs = self.face(k - 1, self.face(k, cell, i), j - 1);
                        if lhs != rhs {
                            identities_ok = false;
                            diag.messages.push(format!(
                                "∂_{i}∂_{j} ≠ ∂_{}∂_{i} on {k}-cell {cell}",
                                j - 1
                            ));
                        }
                    }
                }
            }
        }
        diag.semi_simplicial = identities_ok;

        diag.connected = self.top_adjacency_connected();
        if !diag.connected {
            diag.messages.push("top-cell adjacency graph is disconnected".to_string());
        }

        match self.facet_incidences() {
            Ok(_) => diag.closed_pseudo_manifold = true,
            Err(e) => diag.messages.push(e.to_string()),
        }
        diag
    }

    fn top_adjacency_connected(&self) -> bool {
        let n = self.dimension;
        let tops = self.cell_counts[n];
        if tops == 0 {
            return false;
        }
        // group top cells by shared facets
        let mut by_facet: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for cell in 0..tops {
            for &f in self.face_tuple(n, cell) {
                by_facet.entry(f).or_default().push(cell);
            }
        }
        let mut seen = vec![false; tops];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for &f in self.face_tuple(n, c) {
                for &other in &by_facet[&f] {
                    if !seen[other] {
                        seen[other] = true;
                        stack.push(other);
                    }
                }
            }
        }
        seen.into_iter().all(|v| v)
    }

    /// For every `(n−1)`-cell, its two incidences `(top cell, slot)` among
    /// top-cell face slots; errors unless every multiplicity is exactly 2.
    fn facet_incidences(&self) -> Result<Vec<[(usize, usize); 2]>, ComplexError> {
        let n = self.dimension;
        let mut incidence: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.cell_counts[n - 1]];
        for cell in 0..self.cell_counts[n] {
            for (slot, &f) in self.face_tuple(n, cell).iter().enumerate() {
                incidence[f].push((cell, slot));
            }
        }
        let mut out = Vec::with_capacity(incidence.len());
        for (f, inc) in incidence.iter().enumerate() {
            if inc.len() != 2 {
                return Err(ComplexError::NotPseudoManifold(format!(
                    "facet {f} occurs in {} top-cell slots",
                    inc.len()
                )));
            }
            out.push([inc[0], inc[1]]);
        }
        Ok(out)
    }

    /// The boundary matrix `∂_k` as an integer matrix with one row per
    /// `(k−1)`-cell and one column per `k`-cell; entry `(f, c)` is
    /// `Σ_{i : ∂_i c = f} (−1)^i`.
    pub fn boundary_matrix(&self, k: usize) -> Result<IntMatrix, ComplexError> {
        if k == 0 || k > self.dimension {
            return Err(ComplexError::DegreeOutOfRange { k, n: self.dimension });
        }
        self.face_indices_in_range()?;
        let mut m = IntMatrix::zero(self.cell_counts[k - 1], self.cell_counts[k]);
        for cell in 0..self.cell_counts[k] {
            for (slot, &f) in self.face_tuple(k, cell).iter().enumerate() {
                let sign = if slot % 2 == 0 { 1 } else { -1 };
                let v = &m[(f, cell)] + BigInt::from(sign);
                m[(f, cell)] = v;
            }
        }
        Ok(m)
    }

    /// Alternating sum of cell counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.cell_counts
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Signs making the signed sum of top cells an integer cycle, found by
    /// propagation across facet adjacencies starting from cell 0 with +1,
    /// then confirmed by one boundary-matrix evaluation.
    pub fn orientation(&self) -> Result<OrientationOutcome, ComplexError> {
        let n = self.dimension;
        let incidences = self.facet_incidences()?;
        let tops = self.cell_counts[n];
        if tops == 0 || !self.top_adjacency_connected() {
            return Err(ComplexError::Disconnected);
        }

        let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); tops];
        let mut self_incidences = Vec::new();
        for [(c1, s1), (c2, s2)] in &incidences {
            if c1 == c2 {
                self_incidences.push((s1 % 2, s2 % 2));
                continue;
            }
            // (−1)^{s1}·sign(c1) + (−1)^{s2}·sign(c2) = 0
            let rel: i8 = if (s1 + s2) % 2 == 0 { -1 } else { 1 };
            adj[*c1].push((*c2, rel));
            adj[*c2].push((*c1, rel));
        }
        // a facet repeated inside one top cell forces opposite parities
        if self_incidences.iter().any(|&(a, b)| a == b) {
            return Ok(OrientationOutcome::NonOrientable);
        }

        let mut signs: Vec<i8> = vec![0; tops];
        signs[0] = 1;
        let mut stack = vec![0usize];
        while let Some(c) = stack.pop() {
            for &(other, rel) in &adj[c] {
                if signs[other] == 0 {
                    signs[other] = rel * signs[c];
                    stack.push(other);
                }
            }
        }
        if signs.contains(&0) {
            return Err(ComplexError::Disconnected);
        }

        let boundary = self.boundary_matrix(n)?;
        let chain: Vec<BigInt> = signs.iter().map(|&s| BigInt::from(s)).collect();
        let image = boundary.mul_vec(&chain).expect("chain length equals top cells");
        if image.iter().all(|v| *v == BigInt::from(0)) {
            Ok(OrientationOutcome::Oriented(OrientationVector { signs }))
        } else {
            Ok(OrientationOutcome::NonOrientable)
        }
    }

    /// Checks that an externally supplied sign vector really is a cycle.
    pub fn check_orientation(&self, o: &OrientationVector) -> Result<(), ComplexError> {
        let tops = self.top_cells();
        if o.signs.len() != tops {
            return Err(ComplexError::OrientationLength { expected: tops, got: o.signs.len() });
        }
        let boundary = self.boundary_matrix(self.dimension)?;
        let chain: Vec<BigInt> = o.signs.iter().map(|&s| BigInt::from(s)).collect();
        let image = boundary.mul_vec(&chain).expect("length checked above");
        if image.iter().all(|v| *v == BigInt::from(0)) {
            Ok(())
        } else {
            Err(ComplexError::NotACycle)
        }
    }

    /// The image of the signed top-cell cycle under `Z -> R`, one
    /// coefficient per top cell.
    pub fn fundamental_cycle<R: Ring>(
        &self,
        ring: &R,
        o: &OrientationVector,
    ) -> Result<Vec<R::Elem>, ComplexError> {
        self.check_orientation(o)?;
        Ok(o.signs.iter().map(|&s| ring.from_i64(s as i64)).collect())
    }
}

/// One sign per top-dimensional cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationVector {
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrientationOutcome {
    Oriented(OrientationVector),
    NonOrientable,
}

impl OrientationOutcome {
    pub fn oriented(self) -> Option<OrientationVector> {
        match self {
            OrientationOutcome::Oriented(o) => Some(o),
            OrientationOutcome::NonOrientable => None,
        }
    }
}

/// Pass/fail report of [`DeltaComplex::validate`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub index_ranges: bool,
    pub semi_simplicial: bool,
    pub connected: bool,
    pub closed_pseudo_manifold: bool,
    pub messages: Vec<String>,
}

impl Diagnostics {
    pub fn pass(&self) -> bool {
        self.index_ranges && self.semi_simplicial && self.connected && self.closed_pseudo_manifold
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    dimension: usize,
    cells: Vec<usize>,
    faces: BTreeMap<String, Vec<Vec<usize>>>,
}

impl Serialize for DeltaComplex {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let faces = (1..=self.dimension)
            .filter(|&k| !self.faces[k].is_empty())
            .map(|k| (k.to_string(), self.faces[k].clone()))
            .collect();
        ComplexRepr { dimension: self.dimension, cells: self.cell_counts.clone(), faces }
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DeltaComplex {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = ComplexRepr::deserialize(de)?;
        let mut tables = BTreeMap::new();
        for (key, table) in repr.faces {
            let k: usize = key
                .parse()
                .map_err(|_| de::Error::custom(format!("bad face-table key `{key}`")))?;
            tables.insert(k, table);
        }
        DeltaComplex::new(repr.dimension, repr.cells, tables).map_err(de::Error::custom)
    }
}
