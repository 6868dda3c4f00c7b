//! Model complexes of singular chains: the combinatorial type of a chain
//! (which face slots coincide), its integer cycle matrix, isomorphism-free
//! enumeration of all types, and field-feasibility tests. The smallest
//! simplex count admitting a totally nonzero cycle vector is a universal
//! lower bound for the weightless simplicial volume of every closed
//! oriented manifold of that dimension.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::complex::DeltaComplex;
use crate::echelon::{kernel_basis, solve_affine, SolutionQuery};
use crate::field::{Field, Ring};
use crate::matrix::{IntMatrix, MatrixError};

/// Set-partition enumeration is capped at this many face slots; the number
/// of partitions of a 12-set is around 4.2 million, which is still desk
/// scale, and the next Bell number is not.
pub const ENUMERATION_GUARD: usize = 12;

/// Kernel enumeration in feasibility tests is exhaustive only while the
/// number of coefficient tuples stays below this.
const KERNEL_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("model enumeration guard exceeded: {m} simplices of dimension {n} need {slots} > {guard} slots")]
    GuardExceeded { n: usize, m: usize, slots: usize, guard: usize },
    #[error("dimension must be at least 1")]
    DimensionZero,
    #[error("simplex count must be at least 1")]
    EmptyModel,
    #[error("chain support is empty")]
    EmptySupport,
    #[error("support cell {0} is not a top cell")]
    SupportOutOfRange(usize),
    #[error("coefficient count {coeffs} does not match support size {support}")]
    CoefficientMismatch { support: usize, coeffs: usize },
    #[error("slot ({0}, {1}) appears in no class or more than one class")]
    BadPartition(usize, usize),
    #[error("degree row length {got} does not match {expected} simplices")]
    DegreeRowMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A partition of the face slots `{0..m}×{0..n}` of `m` abstract
/// `n`-simplices, stored as a restricted-growth string over slots ordered
/// by `(simplex, face index)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelComplex {
    n: usize,
    m: usize,
    classes: Vec<usize>,
}

impl ModelComplex {
    pub fn from_classes(n: usize, m: usize, classes: Vec<usize>) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::DimensionZero);
        }
        if m == 0 {
            return Err(ModelError::EmptyModel);
        }
        assert_eq!(classes.len(), m * (n + 1), "one class id per face slot");
        Ok(ModelComplex { n, m, classes: canonical_rgs_relabel(&classes) })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn simplex_count(&self) -> usize {
        self.m
    }

    pub fn slot(&self, s: usize, i: usize) -> usize {
        s * (self.n + 1) + i
    }

    pub fn class_of(&self, s: usize, i: usize) -> usize {
        self.classes[self.slot(s, i)]
    }

    pub fn class_count(&self) -> usize {
        self.classes.iter().copied().max().map_or(0, |c| c + 1)
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    /// Classes as sorted slot lists `[s, i]`, the wire format.
    pub fn class_lists(&self) -> Vec<Vec<[usize; 2]>> {
        let mut lists = vec![Vec::new(); self.class_count()];
        for s in 0..self.m {
            for i in 0..=self.n {
                lists[self.class_of(s, i)].push([s, i]);
            }
        }
        lists
    }

    /// The lexicographically minimal class string over all relabelings of
    /// the simplices.
    pub fn canonical_key(&self) -> Vec<usize> {
        let mut best = self.classes.clone();
        for perm in (0..self.m).permutations(self.m) {
            let candidate = permuted_rgs(self.n, self.m, &self.classes, &perm);
            if candidate < best {
                best = candidate;
            }
        }
        best
    }
}

/// Relabels class ids in first-occurrence order, producing a restricted
/// growth string.
fn canonical_rgs_relabel(classes: &[usize]) -> Vec<usize> {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(classes.len());
    for &c in classes {
        let next = map.len();
        out.push(*map.entry(c).or_insert(next));
    }
    out
}

/// The class string of the model obtained by relabeling simplex `s` to
/// position `perm.position(s)`, i.e. reading slots in order
/// `(perm[0], ·), (perm[1], ·), …`.
fn permuted_rgs(n: usize, m: usize, classes: &[usize], perm: &[usize]) -> Vec<usize> {
    let mut map = vec![usize::MAX; classes.len()];
    let mut next = 0;
    let mut out = Vec::with_capacity(classes.len());
    for s in 0..m {
        for i in 0..=n {
            let orig = classes[perm[s] * (n + 1) + i];
            if map[orig] == usize::MAX {
                map[orig] = next;
                next += 1;
            }
            out.push(map[orig]);
        }
    }
    out
}

impl Serialize for ModelComplex {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            m: usize,
            classes: Vec<Vec<[usize; 2]>>,
        }
        Repr { n: self.n, m: self.m, classes: self.class_lists() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ModelComplex {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            m: usize,
            classes: Vec<Vec<[usize; 2]>>,
        }
        let repr = Repr::deserialize(de)?;
        if repr.n == 0 || repr.m == 0 {
            return Err(de::Error::custom("model needs n ≥ 1 and m ≥ 1"));
        }
        let slots = repr.m * (repr.n + 1);
        let mut classes = vec![usize::MAX; slots];
        for (id, list) in repr.classes.iter().enumerate() {
            for &[s, i] in list {
                if s >= repr.m || i > repr.n {
                    return Err(de::Error::custom(format!("slot ({s}, {i}) out of range")));
                }
                let idx = s * (repr.n + 1) + i;
                if classes[idx] != usize::MAX {
                    return Err(de::Error::custom(format!("slot ({s}, {i}) listed twice")));
                }
                classes[idx] = id;
            }
        }
        if let Some(idx) = classes.iter().position(|&c| c == usize::MAX) {
            let (s, i) = (idx / (repr.n + 1), idx % (repr.n + 1));
            return Err(de::Error::custom(format!("slot ({s}, {i}) missing from classes")));
        }
        ModelComplex::from_classes(repr.n, repr.m, classes).map_err(de::Error::custom)
    }
}

/// The model of the chain supported on the given top cells of `x`: slots
/// `(s, i)` and `(t, j)` share a class exactly when the stored faces
/// `∂_i s` and `∂_j t` are the same `(n−1)`-cell.
pub fn model_of_chain(x: &DeltaComplex, support: &[usize]) -> Result<ModelComplex, ModelError> {
    if support.is_empty() {
        return Err(ModelError::EmptySupport);
    }
    let n = x.dimension();
    let mut cells = support.to_vec();
    cells.sort_unstable();
    cells.dedup();
    for &c in &cells {
        if c >= x.top_cells() {
            return Err(ModelError::SupportOutOfRange(c));
        }
    }
    let classes: Vec<usize> =
        cells.iter().flat_map(|&c| x.face_tuple(n, c).iter().copied()).collect();
    ModelComplex::from_classes(n, cells.len(), classes)
}

/// The integer cycle matrix: one row per face slot, one column per
/// simplex; entry at `((s, i), t)` is `Σ_{j : (s,i) ∼ (t,j)} (−1)^j`.
pub fn cycle_matrix(z: &ModelComplex) -> IntMatrix {
    let (n, m) = (z.dimension(), z.simplex_count());
    IntMatrix::from_fn(m * (n + 1), m, |slot, t| {
        let class = z.classes()[slot];
        let mut sum = 0i64;
        for j in 0..=n {
            if z.class_of(t, j) == class {
                sum += if j % 2 == 0 { 1 } else { -1 };
            }
        }
        BigInt::from(sum)
    })
}

/// Whether the chain with the given coefficients on `support` is a cycle,
/// decided through the cycle matrix of its model. The empty chain is a
/// cycle. Coefficients follow the sorted, deduplicated support order.
pub fn cycle_check_via_matrix<F: Ring>(
    f: &F,
    x: &DeltaComplex,
    support: &[usize],
    coeffs: &[F::Elem],
) -> Result<bool, ModelError> {
    if support.is_empty() && coeffs.is_empty() {
        return Ok(true);
    }
    let z = model_of_chain(x, support)?;
    if coeffs.len() != z.simplex_count() {
        return Err(ModelError::CoefficientMismatch {
            support: z.simplex_count(),
            coeffs: coeffs.len(),
        });
    }
    let a = cycle_matrix(&z).map(|e| f.from_int(e));
    for r in 0..a.rows() {
        if !f.is_zero(&f.dot(a.row(r), coeffs)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Iterator over restricted growth strings of a fixed length.
struct RgsIter {
    next: Option<Vec<usize>>,
    maxes: Vec<usize>,
}

impl RgsIter {
    fn new(len: usize) -> Self {
        RgsIter { next: Some(vec![0; len]), maxes: vec![0; len] }
    }
}

impl Iterator for RgsIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let len = current.len();
        let mut succ = current.clone();
        let mut pos = None;
        for i in (1..len).rev() {
            if succ[i] <= self.maxes[i - 1] {
                pos = Some(i);
                break;
            }
        }
        if let Some(i) = pos {
            succ[i] += 1;
            self.maxes[i] = self.maxes[i - 1].max(succ[i]);
            succ[i + 1..].fill(0);
            let prefix_max = self.maxes[i];
            self.maxes[i + 1..].fill(prefix_max);
            self.next = Some(succ);
        } else {
            self.next = None;
        }
        Some(current)
    }
}

/// Canonical representatives of all isomorphism classes of models with `m`
/// simplices of dimension `n`, one per class. Two models are isomorphic
/// when a relabeling of simplices carries one adjacency relation to the
/// other; face indices are never permuted.
pub fn enumerate_models(
    n: usize,
    m: usize,
) -> Result<impl Iterator<Item = ModelComplex>, ModelError> {
    if n == 0 {
        return Err(ModelError::DimensionZero);
    }
    if m == 0 {
        return Err(ModelError::EmptyModel);
    }
    let slots = m * (n + 1);
    if slots > ENUMERATION_GUARD {
        return Err(ModelError::GuardExceeded { n, m, slots, guard: ENUMERATION_GUARD });
    }
    let perms: Vec<Vec<usize>> =
        (0..m).permutations(m).filter(|p| !p.iter().enumerate().all(|(i, &v)| i == v)).collect();
    let iter = RgsIter::new(slots).filter_map(move |rgs| {
        if is_canonical(n, m, &rgs, &perms) {
            Some(ModelComplex { n, m, classes: rgs })
        } else {
            None
        }
    });
    Ok(iter)
}

/// A restricted growth string is canonical when no simplex relabeling
/// produces a lexicographically smaller one. Comparison is incremental and
/// aborts as soon as the permuted string is known to be larger.
fn is_canonical(n: usize, m: usize, rgs: &[usize], perms: &[Vec<usize>]) -> bool {
    let slots = rgs.len();
    let mut map = vec![usize::MAX; slots + 1];
    'perm: for perm in perms {
        for v in map.iter_mut() {
            *v = usize::MAX;
        }
        let mut next = 0;
        let mut idx = 0;
        for s in 0..m {
            for i in 0..=n {
                let orig = rgs[perm[s] * (n + 1) + i];
                if map[orig] == usize::MAX {
                    map[orig] = next;
                    next += 1;
                }
                let val = map[orig];
                if val > rgs[idx] {
                    continue 'perm;
                }
                if val < rgs[idx] {
                    return false;
                }
                idx += 1;
            }
        }
    }
    true
}

/// A totally nonzero kernel vector of the cycle matrix over `f`, if any.
///
/// Small coefficient spaces are enumerated exhaustively; otherwise the
/// kernel is first checked against the coordinate hyperplanes (containment
/// in one rules a witness out) and a witness is then assembled greedily.
/// The greedy step needs more field elements than coordinates, which holds
/// whenever enumeration was skipped.
pub fn totally_nonzero_cycle_witness<F: Field>(
    f: &F,
    z: &ModelComplex,
) -> Option<Vec<F::Elem>> {
    let a = cycle_matrix(z).map(|e| f.from_int(e));
    let basis = kernel_basis(f, &a);
    if basis.is_empty() {
        return None;
    }
    let m = z.simplex_count();
    let dim = basis.len();

    if let Some(elems) = f.elements() {
        let tuples = (elems.len() as u128).checked_pow(dim as u32);
        if tuples.is_some_and(|t| t <= KERNEL_ENUMERATION_CAP) {
            let mut coeffs = vec![0usize; dim];
            loop {
                let v: Vec<F::Elem> = (0..m)
                    .map(|c| {
                        let mut acc = f.zero();
                        for (ci, b) in coeffs.iter().zip(&basis) {
                            acc = f.add(&acc, &f.mul(&elems[*ci], &b[c]));
                        }
                        acc
                    })
                    .collect();
                if v.iter().all(|e| !f.is_zero(e)) {
                    return Some(v);
                }
                // odometer
                let mut i = 0;
                loop {
                    if i == dim {
                        return None;
                    }
                    coeffs[i] += 1;
                    if coeffs[i] < elems.len() {
                        break;
                    }
                    coeffs[i] = 0;
                    i += 1;
                }
            }
        }
    }

    // hyperplane test
    for c in 0..m {
        if basis.iter().all(|b| f.is_zero(&b[c])) {
            return None;
        }
    }
    // greedy witness: fix one zero coordinate per round without breaking
    // the coordinates already made nonzero
    let mut v = basis[0].clone();
    loop {
        let Some(c) = (0..m).find(|&c| f.is_zero(&v[c])) else {
            return Some(v);
        };
        let b = basis.iter().find(|b| !f.is_zero(&b[c])).expect("hyperplane test passed");
        let nonzero: Vec<usize> = (0..m).filter(|&i| !f.is_zero(&v[i])).collect();
        let mut fixed = None;
        for t in 1..=(m as i64 + 1) {
            let te = f.from_i64(t);
            let cand: Vec<F::Elem> =
                (0..m).map(|i| f.add(&v[i], &f.mul(&te, &b[i]))).collect();
            if !f.is_zero(&cand[c]) && nonzero.iter().all(|&i| !f.is_zero(&cand[i])) {
                fixed = Some(cand);
                break;
            }
        }
        v = fixed.expect("fewer forbidden scalars than candidates");
    }
}

pub fn has_totally_nonzero_cycle<F: Field>(f: &F, z: &ModelComplex) -> bool {
    totally_nonzero_cycle_witness(f, z).is_some()
}

/// Result of the minimal-feasible-count search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleSearch<E> {
    /// Some model with `m` simplices admits a totally nonzero cycle.
    Found { m: usize, model: ModelComplex, witness: Vec<E> },
    /// Every model with at most this many simplices is infeasible.
    GreaterThan(usize),
}

impl<E> CycleSearch<E> {
    /// The lower bound this search outcome certifies.
    pub fn lower_bound(&self) -> usize {
        match self {
            CycleSearch::Found { m, .. } => *m,
            CycleSearch::GreaterThan(m) => m + 1,
        }
    }
}

/// The least simplex count for which some `n`-dimensional model admits a
/// totally nonzero cycle vector over `f`, searched up to `m_max`.
pub fn algebraic_min_cycle_size<F: Field>(
    f: &F,
    n: usize,
    m_max: usize,
) -> Result<CycleSearch<F::Elem>, ModelError> {
    for m in 1..=m_max {
        for z in enumerate_models(n, m)? {
            if let Some(witness) = totally_nonzero_cycle_witness(f, &z) {
                return Ok(CycleSearch::Found { m, model: z, witness });
            }
        }
    }
    Ok(CycleSearch::GreaterThan(m_max))
}

/// Cycle constraints stacked with one degree row; feasibility of
/// `(cycle rows = 0, degree row = 1)` over a field is what promotes a
/// kernel vector to a fundamental cycle.
#[derive(Debug, Clone)]
pub struct AugmentedSystem {
    base: IntMatrix,
    degree_row: Vec<BigInt>,
}

impl AugmentedSystem {
    pub fn new(base: IntMatrix, degree_row: Vec<BigInt>) -> Result<Self, ModelError> {
        if degree_row.len() != base.cols() {
            return Err(ModelError::DegreeRowMismatch {
                expected: base.cols(),
                got: degree_row.len(),
            });
        }
        Ok(AugmentedSystem { base, degree_row })
    }

    pub fn for_model(z: &ModelComplex, degree_row: Vec<BigInt>) -> Result<Self, ModelError> {
        AugmentedSystem::new(cycle_matrix(z), degree_row)
    }

    pub fn base(&self) -> &IntMatrix {
        &self.base
    }

    pub fn degree_row(&self) -> &[BigInt] {
        &self.degree_row
    }

    /// Cycle rows with the degree row appended at the bottom.
    pub fn stacked(&self) -> IntMatrix {
        let row = IntMatrix::from_rows(vec![self.degree_row.clone()]).expect("single row");
        self.base.vstack(&row).expect("degree row length was validated")
    }

    /// The affine target `(0, …, 0, 1)`.
    pub fn target(&self) -> Vec<BigInt> {
        let mut t = vec![BigInt::from(0); self.base.rows() + 1];
        *t.last_mut().expect("nonempty") = BigInt::from(1);
        t
    }
}

/// Solvability of the stacked system over `f`.
pub fn fundamental_feasible<F: Field>(f: &F, sys: &AugmentedSystem) -> bool {
    let query = SolutionQuery::new(sys.stacked(), Some(sys.target()))
        .expect("stacked target has matching length");
    solve_affine(f, &query).is_some()
}
