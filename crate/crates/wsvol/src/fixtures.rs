//! Shipped example complexes: the one-vertex torus, the two-triangle
//! sphere, the boundary of a tetrahedron, one-vertex surfaces of higher
//! genus, and a Klein bottle as the non-orientable negative test.
//!
//! The same complexes are checked into `fixtures/` as JSON for the CLI;
//! `fixtures_match_disk` in the integration tests keeps the two in sync.

use std::collections::BTreeMap;

use crate::complex::DeltaComplex;
use crate::covers;

fn build(dim: usize, counts: Vec<usize>, tables: Vec<(usize, Vec<Vec<usize>>)>) -> DeltaComplex {
    let map: BTreeMap<usize, Vec<Vec<usize>>> = tables.into_iter().collect();
    DeltaComplex::new(dim, counts, map).expect("fixture is well-shaped")
}

/// One vertex, one edge with both endpoints at it.
pub fn loop_complex() -> DeltaComplex {
    build(1, vec![1, 1], vec![(1, vec![vec![0, 0]])])
}

/// The one-vertex torus: edges a, b, c and triangles U = (b, c, a),
/// L = (a, c, b).
pub fn torus() -> DeltaComplex {
    covers::surface_complex(1).expect("genus 1 is valid")
}

/// Two triangles glued along all three edges of a common triangle; a
/// 2-sphere with 3 vertices, 3 edges, 2 faces.
pub fn two_triangle_sphere() -> DeltaComplex {
    build(
        2,
        vec![3, 3, 2],
        vec![
            // e0 = [v0,v1], e1 = [v0,v2], e2 = [v1,v2]
            (1, vec![vec![1, 0], vec![2, 0], vec![2, 1]]),
            (2, vec![vec![2, 1, 0], vec![2, 1, 0]]),
        ],
    )
}

/// The boundary of the 3-simplex: 4 vertices, 6 edges, 4 triangles.
pub fn tetrahedron_boundary() -> DeltaComplex {
    // edges in lexicographic order: 01, 02, 03, 12, 13, 23
    build(
        2,
        vec![4, 6, 4],
        vec![
            (
                1,
                vec![
                    vec![1, 0],
                    vec![2, 0],
                    vec![3, 0],
                    vec![2, 1],
                    vec![3, 1],
                    vec![3, 2],
                ],
            ),
            (
                2,
                // triangles 012, 013, 023, 123 with faces (∂_0, ∂_1, ∂_2)
                vec![vec![3, 1, 0], vec![4, 2, 0], vec![5, 2, 1], vec![5, 4, 3]],
            ),
        ],
    )
}

/// A one-vertex Klein bottle: same cells as the torus but with the lower
/// triangle glued as (c, a, b), which flips one identification.
pub fn klein_bottle() -> DeltaComplex {
    build(
        2,
        vec![1, 3, 2],
        vec![
            (1, vec![vec![0, 0], vec![0, 0], vec![0, 0]]),
            (2, vec![vec![1, 2, 0], vec![2, 0, 1]]),
        ],
    )
}

/// The minimal one-vertex complex of the closed oriented surface of genus
/// `g ≥ 1`: `6g−3` edges and `4g−2` triangles.
pub fn genus_surface(g: usize) -> DeltaComplex {
    covers::surface_complex(g).expect("positive genus is valid")
}

/// Every shipped closed-surface fixture, for property sweeps.
pub fn all() -> Vec<DeltaComplex> {
    vec![
        torus(),
        two_triangle_sphere(),
        tetrahedron_boundary(),
        klein_bottle(),
        genus_surface(2),
        genus_surface(3),
    ]
}

/// The closed oriented fixtures (Klein bottle excluded).
pub fn oriented() -> Vec<DeltaComplex> {
    vec![
        torus(),
        two_triangle_sphere(),
        tetrahedron_boundary(),
        genus_surface(2),
        genus_surface(3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_validates() {
        for x in all() {
            let d = x.validate();
            assert!(d.pass(), "{:?}", d.messages);
        }
        assert!(loop_complex().validate().pass());
    }

    #[test]
    fn sphere_counts() {
        let s = two_triangle_sphere();
        assert_eq!(s.cell_counts(), &[3, 3, 2]);
        assert_eq!(s.euler_characteristic(), 2);
    }

    #[test]
    fn genus_counts() {
        for g in 1..=4 {
            let x = genus_surface(g);
            assert_eq!(x.cell_counts(), &[1, 6 * g - 3, 4 * g - 2]);
            assert_eq!(x.euler_characteristic(), 2 - 2 * g as i64);
        }
    }
}
