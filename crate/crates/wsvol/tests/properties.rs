//! Cross-module property tests: exactness of solutions, rank agreement
//! between elimination and Smith normal form, relabeling invariance,
//! isomorphism invariance of model feasibility, and tower consistency.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use proptest::prelude::*;

use wsvol::complex::DeltaComplex;
use wsvol::covers::{build_cover, cyclic_surface_covers, stabilize, surface_complex};
use wsvol::echelon::{rank, solve_affine, SolutionQuery};
use wsvol::field::{Field, FieldSpec, PrimeField, Rationals, Ring};
use wsvol::homology::betti_over;
use wsvol::matrix::IntMatrix;
use wsvol::fixtures;
use wsvol::model::{cycle_matrix, has_totally_nonzero_cycle, ModelComplex};
use wsvol::snf::smith_normal_form;

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(-9i64..=9, rows * cols).prop_map(move |data| {
            IntMatrix::from_vec(rows, cols, data.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

fn check_substitution<F: Field>(f: &F, q: &SolutionQuery) {
    if let Some(x) = solve_affine(f, q) {
        let a = q.matrix().map(|e| f.from_int(e));
        let b: Vec<F::Elem> = match q.target() {
            Some(t) => t.iter().map(|e| f.from_int(e)).collect(),
            None => vec![f.zero(); a.rows()],
        };
        for (r, expected) in b.iter().enumerate() {
            assert_eq!(&f.dot(a.row(r), &x), expected, "row {r} does not reproduce the target");
        }
    }
}

proptest! {
    #[test]
    fn solutions_substitute_exactly(a in small_matrix(), t in proptest::collection::vec(-9i64..=9, 4)) {
        let rows = a.rows();
        let target: Vec<BigInt> = t.iter().take(rows).map(|&v| BigInt::from(v)).collect();
        let q = SolutionQuery::new(a, Some(target)).unwrap();
        check_substitution(&PrimeField::new(2).unwrap(), &q);
        check_substitution(&PrimeField::new(5).unwrap(), &q);
        check_substitution(&Rationals, &q);
    }

    #[test]
    fn rational_rank_equals_snf_rank(a in small_matrix()) {
        let snf = smith_normal_form(&a);
        let f = Rationals;
        prop_assert_eq!(rank(&f, &a.map(|e| f.from_int(e))), snf.rank);
    }

    #[test]
    fn snf_round_trip_random(a in small_matrix()) {
        let snf = smith_normal_form(&a);
        let sat = snf.s.mul(&a).unwrap().mul(&snf.t).unwrap();
        prop_assert_eq!(sat, snf.diagonal());
        prop_assert!(snf.s.is_unimodular());
        prop_assert!(snf.t.is_unimodular());
    }
}

/// Relabels cells within each dimension by the given permutations
/// (new index = perm[old index]).
fn relabel(x: &DeltaComplex, perms: &[Vec<usize>]) -> DeltaComplex {
    let n = x.dimension();
    let mut tables = BTreeMap::new();
    for k in 1..=n {
        let mut table = vec![Vec::new(); x.cell_count(k)];
        for cell in 0..x.cell_count(k) {
            let tuple = x.face_tuple(k, cell).iter().map(|&f| perms[k - 1][f]).collect();
            table[perms[k][cell]] = tuple;
        }
        tables.insert(k, table);
    }
    DeltaComplex::new(n, x.cell_counts().to_vec(), tables).unwrap()
}

fn permutation(len: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..len).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn relabeling_preserves_structure(
        p0 in permutation(1),
        p1 in permutation(9),
        p2 in permutation(6),
    ) {
        let x = fixtures::genus_surface(2);
        let y = relabel(&x, &[p0, p1, p2]);
        prop_assert!(y.validate().pass());
        prop_assert_eq!(y.euler_characteristic(), x.euler_characteristic());
        let f2 = PrimeField::new(2).unwrap();
        let q = Rationals;
        for k in 0..=2 {
            prop_assert_eq!(betti_over(&f2, &y, k).unwrap(), betti_over(&f2, &x, k).unwrap());
            prop_assert_eq!(betti_over(&q, &y, k).unwrap(), betti_over(&q, &x, k).unwrap());
        }
    }

    #[test]
    fn model_feasibility_is_isomorphism_invariant(
        classes in proptest::collection::vec(0usize..6, 6),
        perm in permutation(3),
    ) {
        // m = 3 simplices of dimension 1: 6 slots
        let z = ModelComplex::from_classes(1, 3, classes).unwrap();
        let relabeled: Vec<usize> = {
            let mut out = vec![0; 6];
            for s in 0..3 {
                for i in 0..=1 {
                    out[perm[s] * 2 + i] = z.classes()[s * 2 + i];
                }
            }
            out
        };
        let w = ModelComplex::from_classes(1, 3, relabeled).unwrap();
        prop_assert_eq!(z.canonical_key(), w.canonical_key());
        let f2 = PrimeField::new(2).unwrap();
        let q = Rationals;
        prop_assert_eq!(has_totally_nonzero_cycle(&f2, &z), has_totally_nonzero_cycle(&f2, &w));
        prop_assert_eq!(has_totally_nonzero_cycle(&q, &z), has_totally_nonzero_cycle(&q, &w));
    }
}

#[test]
fn universal_coefficient_consistency_on_fixtures() {
    // Betti numbers over F_p agree with Q in degree k for every p outside
    // the torsion primes of degrees k−1 and k.
    for x in fixtures::all() {
        let profile = wsvol::homology::homology_profile(&x, &FieldSpec::Integers).unwrap();
        let q = Rationals;
        for k in 0..=x.dimension() {
            let mut torsion_primes: BTreeSet<u64> = BTreeSet::new();
            for degree in [k.wrapping_sub(1), k] {
                if let Some(ds) = profile.torsion.get(&degree) {
                    for d in ds {
                        for p in [2u64, 3, 5, 7] {
                            if (d % BigInt::from(p)) == BigInt::from(0) {
                                torsion_primes.insert(p);
                            }
                        }
                    }
                }
            }
            let over_q = betti_over(&q, &x, k).unwrap();
            for p in [2u64, 3, 5, 7] {
                if torsion_primes.contains(&p) {
                    continue;
                }
                let f = PrimeField::new(p).unwrap();
                assert_eq!(betti_over(&f, &x, k).unwrap(), over_q, "k = {k}, p = {p}");
            }
        }
    }
}

#[test]
fn certified_values_agree_across_fields_outside_torsion() {
    for x in fixtures::oriented() {
        let profile = wsvol::homology::homology_profile(&x, &FieldSpec::Integers).unwrap();
        let q_report =
            &wsvol::bounds::compile_report(&x, &[FieldSpec::Rationals], &[]).unwrap()[0];
        for p in [2u64, 3, 5, 7] {
            let torsion_hit = profile
                .torsion
                .values()
                .flatten()
                .any(|d| (d % BigInt::from(p)) == BigInt::from(0));
            if torsion_hit {
                continue;
            }
            let report =
                &wsvol::bounds::compile_report(&x, &[FieldSpec::prime(p).unwrap()], &[])
                    .unwrap()[0];
            if let (Some(fp_exact), Some(q_exact)) = (report.exact, q_report.exact) {
                assert_eq!(fp_exact, q_exact, "p = {p}");
            }
        }
    }
}

#[test]
fn values_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<DeltaComplex>();
    assert_send_sync::<IntMatrix>();
    assert_send_sync::<ModelComplex>();
    assert_send_sync::<wsvol::bounds::BoundReport>();
    assert_send_sync::<wsvol::covers::CoverSpec>();
    assert_send_sync::<wsvol::snf::SmithDecomposition>();
    assert_send_sync::<PrimeField>();
}

#[test]
fn integer_witness_implies_rational_feasibility() {
    // a totally nonzero integer kernel vector is in particular rational
    let torus = fixtures::torus();
    let z = wsvol::model::model_of_chain(&torus, &[0, 1]).unwrap();
    let a = cycle_matrix(&z);
    let int_witness = vec![BigInt::from(1), BigInt::from(-1)];
    let image = a.mul_vec(&int_witness).unwrap();
    assert!(image.iter().all(|v| *v == BigInt::from(0)));
    assert!(has_totally_nonzero_cycle(&Rationals, &z));
}

#[test]
fn betti_gradient_below_tower_upper() {
    // b_1(cover; F_2) ≤ upper bound of the cover, row by row
    let base = surface_complex(2).unwrap();
    let f2 = PrimeField::new(2).unwrap();
    let report = stabilize(2, 4, &FieldSpec::prime(2).unwrap()).unwrap();
    for (spec, row) in cyclic_surface_covers(2, 4).unwrap().iter().zip(&report.rows) {
        let cover = build_cover(&base, spec).unwrap();
        let b1 = betti_over(&f2, &cover.complex, 1).unwrap();
        assert!(
            (b1 as u64) <= row.upper,
            "b_1 = {b1} exceeds upper {} at d = {}",
            row.upper,
            row.sheets
        );
    }
}

#[test]
fn lifted_cycle_ratio_is_non_increasing() {
    // full lifts alone give upper = d · (base upper), a constant ratio; the
    // reported per-sheet upper must never exceed it
    let report = stabilize(2, 6, &FieldSpec::prime(3).unwrap()).unwrap();
    let base_upper = report.rows[0].upper;
    let lifted = num_rational::BigRational::from(BigInt::from(base_upper));
    for row in &report.rows {
        assert!(row.upper_per_sheet <= lifted);
    }
    for w in report.rows.windows(2) {
        assert!(w[1].inf_upper_per_sheet <= w[0].inf_upper_per_sheet);
    }
}
