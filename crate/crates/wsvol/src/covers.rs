//! Finite coverings of Δ-complexes from edge-monodromy permutations,
//! one-vertex surface complexes and their cyclic covering towers, and
//! stabilisation reports for stable weightless simplicial volumes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bounds::{compile_report, BoundsError};
use crate::complex::{ComplexError, DeltaComplex};
use crate::field::FieldSpec;
use crate::matrix::rat_to_value;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("genus must be at least 1 (use the two-triangle sphere fixture for genus 0)")]
    GenusZero,
    #[error("a tower needs at least one covering degree")]
    EmptyTower,
    #[error("sheet count must be at least 1")]
    NoSheets,
    #[error("cover spec does not validate: {0}")]
    InvalidSpec(String),
    #[error("cover is disconnected")]
    Disconnected,
    #[error("built cover fails validation: {0}")]
    InvalidCover(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// A `d`-sheeted covering described by one sheet permutation per 1-cell of
/// the base complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSpec {
    sheets: usize,
    monodromy: Vec<Vec<usize>>,
}

impl CoverSpec {
    pub fn new(sheets: usize, monodromy: Vec<Vec<usize>>) -> Result<Self, CoverError> {
        if sheets == 0 {
            return Err(CoverError::NoSheets);
        }
        Ok(CoverSpec { sheets, monodromy })
    }

    /// The trivial (identity) spec over a given number of edges.
    pub fn identity(sheets: usize, edges: usize) -> Result<Self, CoverError> {
        CoverSpec::new(sheets, vec![(0..sheets).collect(); edges])
    }

    pub fn sheets(&self) -> usize {
        self.sheets
    }

    pub fn permutation(&self, edge: usize) -> &[usize] {
        &self.monodromy[edge]
    }
}

impl Serialize for CoverSpec {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            sheets: usize,
            monodromy: BTreeMap<String, &'a Vec<usize>>,
        }
        let monodromy =
            self.monodromy.iter().enumerate().map(|(e, p)| (e.to_string(), p)).collect();
        Repr { sheets: self.sheets, monodromy }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CoverSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            sheets: usize,
            monodromy: BTreeMap<String, Vec<usize>>,
        }
        let repr = Repr::deserialize(de)?;
        let mut monodromy = vec![Vec::new(); repr.monodromy.len()];
        for (key, perm) in repr.monodromy {
            let e: usize = key
                .parse()
                .map_err(|_| de::Error::custom(format!("bad edge key `{key}`")))?;
            if e >= monodromy.len() {
                return Err(de::Error::custom(format!(
                    "edge keys must cover 0..{}, got {e}",
                    monodromy.len()
                )));
            }
            monodromy[e] = perm;
        }
        CoverSpec::new(repr.sheets, monodromy).map_err(de::Error::custom)
    }
}

/// Pass/fail report for a cover spec against a base complex.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CoverDiagnostics {
    pub permutations: bool,
    pub relations: bool,
    pub messages: Vec<String>,
}

impl CoverDiagnostics {
    pub fn pass(&self) -> bool {
        self.permutations && self.relations
    }
}

fn is_permutation(p: &[usize], d: usize) -> bool {
    if p.len() != d {
        return false;
    }
    let mut seen = vec![false; d];
    for &v in p {
        if v >= d || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Checks permutation shape and, for every 2-cell with faces
/// `(e_12, e_02, e_01)`, the covering relation
/// `perm(e_12) ∘ perm(e_01) = perm(e_02)` (apply `e_01` first).
pub fn validate_cover_spec(x: &DeltaComplex, spec: &CoverSpec) -> CoverDiagnostics {
    let mut diag = CoverDiagnostics::default();
    let d = spec.sheets;

    if spec.monodromy.len() != x.cell_count(1) {
        diag.messages.push(format!(
            "{} permutations for {} edges",
            spec.monodromy.len(),
            x.cell_count(1)
        ));
        return diag;
    }
    for (e, p) in spec.monodromy.iter().enumerate() {
        if !is_permutation(p, d) {
            diag.messages.push(format!("entry for edge {e} is not a permutation of 0..{d}"));
            return diag;
        }
    }
    diag.permutations = true;

    diag.relations = true;
    if x.dimension() >= 2 {
        for cell in 0..x.cell_count(2) {
            let e12 = x.face(2, cell, 0);
            let e02 = x.face(2, cell, 1);
            let e01 = x.face(2, cell, 2);
            let ok = (0..d).all(|s| {
                spec.monodromy[e12][spec.monodromy[e01][s]] == spec.monodromy[e02][s]
            });
            if !ok {
                diag.relations = false;
                diag.messages.push(format!("2-cell {cell} violates the composition relation"));
            }
        }
    }
    diag
}

/// A built covering complex plus its projection to the base: the `k`-cell
/// `c·d + s` of the cover lies over the `k`-cell `c` in sheet `s`.
#[derive(Debug, Clone)]
pub struct Cover {
    pub complex: DeltaComplex,
    pub sheets: usize,
    pub projection: Vec<Vec<usize>>,
}

/// The edge from vertex 0 to vertex 1 of a `k`-cell, by iterated faces.
fn edge_01(x: &DeltaComplex, k: usize, cell: usize) -> usize {
    let mut cur = cell;
    for dim in (2..=k).rev() {
        cur = x.face(dim, cur, dim);
    }
    cur
}

/// Builds the covering complex: faces `∂_i` for `i ≥ 1` stay in their
/// sheet, while `∂_0` twists the sheet by the monodromy of the cell's
/// `(v_0, v_1)`-edge. The output is re-validated structurally (index
/// ranges, identities, pseudo-manifold); it may be disconnected.
pub fn build_cover(x: &DeltaComplex, spec: &CoverSpec) -> Result<Cover, CoverError> {
    let diag = validate_cover_spec(x, spec);
    if !diag.pass() {
        return Err(CoverError::InvalidSpec(diag.messages.join("; ")));
    }
    let d = spec.sheets;
    let n = x.dimension();
    let counts: Vec<usize> = x.cell_counts().iter().map(|&c| c * d).collect();

    let mut tables = BTreeMap::new();
    for k in 1..=n {
        let mut table = Vec::with_capacity(x.cell_count(k) * d);
        for cell in 0..x.cell_count(k) {
            let twist = spec.permutation(edge_01(x, k, cell));
            for (s, &twisted) in twist.iter().enumerate() {
                let mut tuple = Vec::with_capacity(k + 1);
                tuple.push(x.face(k, cell, 0) * d + twisted);
                for i in 1..=k {
                    tuple.push(x.face(k, cell, i) * d + s);
                }
                table.push(tuple);
            }
        }
        tables.insert(k, table);
    }
    let complex = DeltaComplex::new(n, counts, tables)?;

    let v = complex.validate();
    if !(v.index_ranges && v.semi_simplicial && v.closed_pseudo_manifold) {
        return Err(CoverError::InvalidCover(v.messages.join("; ")));
    }

    let projection =
        (0..=n).map(|k| (0..complex.cell_count(k)).map(|c| c / d).collect()).collect();
    Ok(Cover { complex, sheets: d, projection })
}

/// Index of the edge between polygon corners `P_0` and `P_i` in the fan
/// triangulation of the `4g`-gon (generators first, then diagonals).
fn fan_edge(g: usize, i: usize) -> usize {
    if i == 1 {
        0
    } else if i == 4 * g - 1 {
        2 * g - 1
    } else {
        2 * g + i - 2
    }
}

/// The generator edge carried by polygon side `i` under the surface word
/// `a_1 b_1 a_1⁻¹ b_1⁻¹ …`, and whether the side traverses it forwards.
fn side_letter(i: usize) -> (usize, bool) {
    let block = i / 4;
    match i % 4 {
        0 => (2 * block, true),
        1 => (2 * block + 1, true),
        2 => (2 * block, false),
        _ => (2 * block + 1, false),
    }
}

/// The minimal one-vertex complex of the closed oriented genus-`g`
/// surface: the fan triangulation of the `4g`-gon with boundary word
/// `a_1 b_1 a_1⁻¹ b_1⁻¹ …`, giving `6g−3` edges and `4g−2` triangles.
pub fn surface_complex(g: usize) -> Result<DeltaComplex, CoverError> {
    if g == 0 {
        return Err(CoverError::GenusZero);
    }
    let edges = 6 * g - 3;
    let triangles = 4 * g - 2;

    let mut table2 = Vec::with_capacity(triangles);
    for t in 0..triangles {
        let i = t + 1;
        let (letter, forward) = side_letter(i);
        let tuple = if forward {
            vec![letter, fan_edge(g, i + 1), fan_edge(g, i)]
        } else {
            vec![letter, fan_edge(g, i), fan_edge(g, i + 1)]
        };
        table2.push(tuple);
    }

    let mut tables = BTreeMap::new();
    tables.insert(1, vec![vec![0, 0]; edges]);
    tables.insert(2, table2);
    Ok(DeltaComplex::new(2, vec![1, edges, triangles], tables)?)
}

fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&s| f[s]).collect()
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (s, &v) in p.iter().enumerate() {
        inv[v] = s;
    }
    inv
}

/// Cyclic covering specs of the genus-`g` surface for `d = 1..=d_max`:
/// the `a_1` handle edge is sent to the `d`-cycle `s ↦ s+1`, every other
/// generator to the identity, and the fan diagonals to the unique
/// permutations satisfying the triangle relations.
pub fn cyclic_surface_covers(g: usize, d_max: usize) -> Result<Vec<CoverSpec>, CoverError> {
    if g == 0 {
        return Err(CoverError::GenusZero);
    }
    let mut specs = Vec::with_capacity(d_max);
    for d in 1..=d_max {
        let identity: Vec<usize> = (0..d).collect();
        let cycle: Vec<usize> = (0..d).map(|s| (s + 1) % d).collect();

        let mut monodromy = vec![identity.clone(); 6 * g - 3];
        monodromy[0] = cycle;
        // propagate through the fan: each triangle determines its third edge
        for t in 0..4 * g - 3 {
            let i = t + 1;
            let (letter, forward) = side_letter(i);
            let prev = monodromy[fan_edge(g, i)].clone();
            let letter_perm =
                if forward { monodromy[letter].clone() } else { invert(&monodromy[letter]) };
            monodromy[fan_edge(g, i + 1)] = compose(&letter_perm, &prev);
        }
        specs.push(CoverSpec::new(d, monodromy)?);
    }
    Ok(specs)
}

/// One tower row: exact bounds of the covering surface and their ratios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerRow {
    pub sheets: usize,
    pub genus: usize,
    pub euler: i64,
    pub lower: u64,
    pub upper: u64,
    pub lower_per_sheet: BigRational,
    pub upper_per_sheet: BigRational,
    pub inf_upper_per_sheet: BigRational,
}

/// Stabilisation data along one explicit tower of cyclic covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerReport {
    pub genus: usize,
    pub field: FieldSpec,
    /// Which tower was used; the value of the limit may depend on it.
    pub tower: String,
    pub rows: Vec<TowerRow>,
}

impl Serialize for TowerRow {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            sheets: usize,
            genus: usize,
            euler: i64,
            lower: u64,
            upper: u64,
            lower_per_sheet: serde_json::Value,
            upper_per_sheet: serde_json::Value,
            inf_upper_per_sheet: serde_json::Value,
        }
        Repr {
            sheets: self.sheets,
            genus: self.genus,
            euler: self.euler,
            lower: self.lower,
            upper: self.upper,
            lower_per_sheet: rat_to_value(&self.lower_per_sheet),
            upper_per_sheet: rat_to_value(&self.upper_per_sheet),
            inf_upper_per_sheet: rat_to_value(&self.inf_upper_per_sheet),
        }
        .serialize(ser)
    }
}

impl Serialize for TowerReport {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            genus: usize,
            field: &'a FieldSpec,
            tower: &'a str,
            rows: &'a [TowerRow],
        }
        Repr { genus: self.genus, field: &self.field, tower: &self.tower, rows: &self.rows }
            .serialize(ser)
    }
}

/// Builds the cyclic tower over the genus-`g` surface and reports, per
/// sheet count, the bounds of the minimal one-vertex complex of the
/// covering genus together with the exact per-sheet ratios. Bounds come
/// from that minimal complex, not from the lifted triangulation (whose
/// per-sheet upper ratio would stay constant).
pub fn stabilize(g: usize, d_max: usize, spec: &FieldSpec) -> Result<TowerReport, CoverError> {
    if g == 0 {
        return Err(CoverError::GenusZero);
    }
    if d_max == 0 {
        return Err(CoverError::EmptyTower);
    }
    let base = surface_complex(g)?;
    let base_euler = base.euler_characteristic();
    let mut rows: Vec<TowerRow> = Vec::with_capacity(d_max);
    let mut inf: Option<BigRational> = None;

    for (d, cover_spec) in cyclic_surface_covers(g, d_max)?.iter().enumerate() {
        let d = d + 1;
        let cover = build_cover(&base, cover_spec)?;
        if !cover.complex.validate().connected {
            return Err(CoverError::Disconnected);
        }
        let euler = cover.complex.euler_characteristic();
        if euler != base_euler * d as i64 {
            return Err(CoverError::InvalidCover(format!(
                "χ = {euler} is not {d}·{base_euler}"
            )));
        }
        let cover_genus = (1 - euler / 2) as usize;
        let minimal = surface_complex(cover_genus)?;
        let report = compile_report(&minimal, std::slice::from_ref(spec), &[])?
            .pop()
            .expect("one field in, one report out");

        let ratio = |v: u64| BigRational::new(BigInt::from(v), BigInt::from(d as u64));
        let upper_per_sheet = ratio(report.upper.value);
        let inf_upper = match &inf {
            Some(prev) if prev <= &upper_per_sheet => prev.clone(),
            _ => upper_per_sheet.clone(),
        };
        inf = Some(inf_upper.clone());
        rows.push(TowerRow {
            sheets: d,
            genus: cover_genus,
            euler,
            lower: report.lower.value,
            upper: report.upper.value,
            lower_per_sheet: ratio(report.lower.value),
            upper_per_sheet,
            inf_upper_per_sheet: inf_upper,
        });
    }
    Ok(TowerReport {
        genus: g,
        field: spec.clone(),
        tower: format!("cyclic covers unwinding the a_1 handle, d = 1..={d_max}"),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::homology::{fundamental_class_check, homology_profile};

    #[test]
    fn surface_complexes_are_closed_oriented() {
        for g in 1..=3 {
            let x = surface_complex(g).unwrap();
            let diag = x.validate();
            assert!(diag.pass(), "genus {g}: {:?}", diag.messages);
            let o = x.orientation().unwrap().oriented().expect("orientable");
            assert!(fundamental_class_check(&x, &o).unwrap(), "genus {g}");
        }
        assert!(matches!(surface_complex(0), Err(CoverError::GenusZero)));
    }

    #[test]
    fn genus_one_is_the_standard_torus() {
        let x = surface_complex(1).unwrap();
        assert_eq!(x.cell_counts(), &[1, 3, 2]);
        assert_eq!(x.face_tuple(2, 0), &[1, 2, 0]);
        assert_eq!(x.face_tuple(2, 1), &[0, 2, 1]);
    }

    #[test]
    fn identity_spec_gives_disjoint_copies() {
        let torus = fixtures::torus();
        let spec = CoverSpec::identity(2, 3).unwrap();
        assert!(validate_cover_spec(&torus, &spec).pass());
        let cover = build_cover(&torus, &spec).unwrap();
        assert_eq!(cover.complex.euler_characteristic(), 0);
        assert_eq!(cover.complex.cell_counts(), &[2, 6, 4]);
        assert!(!cover.complex.validate().connected);
    }

    #[test]
    fn torus_triple_cover_is_a_torus() {
        let torus = fixtures::torus();
        // a ↦ 3-cycle, b ↦ id forces c ↦ 3-cycle through both triangles
        let sigma = vec![1, 2, 0];
        let id = vec![0, 1, 2];
        let spec = CoverSpec::new(3, vec![sigma.clone(), id, sigma]).unwrap();
        assert!(validate_cover_spec(&torus, &spec).pass());
        let cover = build_cover(&torus, &spec).unwrap();
        assert!(cover.complex.validate().pass());
        assert_eq!(cover.complex.euler_characteristic(), 0);
        let profile = homology_profile(&cover.complex, &FieldSpec::Rationals).unwrap();
        assert_eq!(profile.betti, vec![1, 2, 1]);
    }

    #[test]
    fn circle_cover_unrolls_the_loop() {
        let circle = fixtures::loop_complex();
        let spec = CoverSpec::new(3, vec![vec![1, 2, 0]]).unwrap();
        assert!(validate_cover_spec(&circle, &spec).pass());
        let cover = build_cover(&circle, &spec).unwrap();
        assert_eq!(cover.complex.cell_counts(), &[3, 3]);
        assert!(cover.complex.validate().pass());
        assert_eq!(cover.complex.euler_characteristic(), 0);
        let profile = homology_profile(&cover.complex, &FieldSpec::Rationals).unwrap();
        assert_eq!(profile.betti, vec![1, 1]);
    }

    #[test]
    fn inconsistent_spec_fails_validation() {
        let torus = fixtures::torus();
        let swap = vec![1, 0];
        let id = vec![0, 1];
        let spec = CoverSpec::new(2, vec![swap, id.clone(), id]).unwrap();
        let diag = validate_cover_spec(&torus, &spec);
        assert!(diag.permutations);
        assert!(!diag.relations);
        assert!(build_cover(&torus, &spec).is_err());
    }

    #[test]
    fn genus_two_double_cover_has_genus_three() {
        let base = surface_complex(2).unwrap();
        let specs = cyclic_surface_covers(2, 2).unwrap();
        let cover = build_cover(&base, &specs[1]).unwrap();
        assert_eq!(cover.complex.euler_characteristic(), -4);
        assert!(cover.complex.validate().pass());
    }

    #[test]
    fn genus_two_quintuple_cover_has_genus_six() {
        let base = surface_complex(2).unwrap();
        let specs = cyclic_surface_covers(2, 5).unwrap();
        let cover = build_cover(&base, &specs[4]).unwrap();
        // g' = d(g−1)+1 = 6, so χ = −10
        assert_eq!(cover.complex.euler_characteristic(), -10);
        assert!(cover.complex.validate().connected);
    }

    #[test]
    fn cyclic_specs_validate_and_connect() {
        for g in 1..=2 {
            let base = surface_complex(g).unwrap();
            for (i, spec) in cyclic_surface_covers(g, 4).unwrap().iter().enumerate() {
                let diag = validate_cover_spec(&base, spec);
                assert!(diag.pass(), "g={g} d={}: {:?}", i + 1, diag.messages);
                let cover = build_cover(&base, spec).unwrap();
                assert!(cover.complex.validate().connected, "g={g} d={}", i + 1);
                assert_eq!(
                    cover.complex.euler_characteristic(),
                    base.euler_characteristic() * (i as i64 + 1)
                );
            }
        }
    }

    #[test]
    fn projection_commutes_with_faces() {
        let base = surface_complex(2).unwrap();
        let spec = &cyclic_surface_covers(2, 3).unwrap()[2];
        let cover = build_cover(&base, spec).unwrap();
        let d = cover.sheets;
        for k in 1..=2 {
            for cell in 0..cover.complex.cell_count(k) {
                for slot in 0..=k {
                    let down_then_face = base.face(k, cover.projection[k][cell], slot);
                    let face_then_down = cover.complex.face(k, cell, slot) / d;
                    assert_eq!(down_then_face, face_then_down);
                }
            }
        }
    }

    #[test]
    fn stabilize_genus_two_ratios() {
        let report = stabilize(2, 4, &FieldSpec::prime(2).unwrap()).unwrap();
        assert_eq!(report.rows.len(), 4);
        let first = &report.rows[0];
        assert_eq!((first.lower, first.upper), (4, 6));
        let r4 = &report.rows[3];
        assert_eq!(r4.genus, 5);
        assert_eq!(r4.lower_per_sheet, BigRational::new(10.into(), 4.into()));
        assert_eq!(r4.upper_per_sheet, BigRational::new(18.into(), 4.into()));
        // upper/d strictly decreases for g ≥ 2
        for w in report.rows.windows(2) {
            assert!(w[1].upper_per_sheet < w[0].upper_per_sheet);
            assert_eq!(w[1].inf_upper_per_sheet, w[1].upper_per_sheet);
        }
    }

    #[test]
    fn stabilize_rejects_empty_tower() {
        assert!(matches!(
            stabilize(2, 0, &FieldSpec::Rationals),
            Err(CoverError::EmptyTower)
        ));
        assert!(matches!(stabilize(0, 3, &FieldSpec::Rationals), Err(CoverError::GenusZero)));
    }

    #[test]
    fn cover_spec_json_round_trip() {
        let spec = &cyclic_surface_covers(1, 3).unwrap()[2];
        let s = serde_json::to_string(spec).unwrap();
        let back: CoverSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(*spec, back);
    }
}
