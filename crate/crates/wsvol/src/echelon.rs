//! Gaussian elimination over an arbitrary field: reduced row echelon form,
//! affine solving, and kernel bases. All arithmetic is exact.

use num_bigint::BigInt;
use thiserror::Error;

use crate::field::Field;
use crate::matrix::{IntMatrix, Matrix, MatrixError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("target length {target} does not match {rows} rows")]
    TargetMismatch { rows: usize, target: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Outcome of row reduction: the reduced matrix, its rank, and the pivot
/// columns in increasing order.
#[derive(Debug, Clone)]
pub struct Echelon<E> {
    pub matrix: Matrix<E>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form of `a` over the field `f`.
///
/// Pivots are scaled to 1 and cleared above and below; the row space is
/// preserved, so this is in particular a row echelon form of `a`.
pub fn row_echelon<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Echelon<F::Elem> {
    let mut m = a.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();

    // Forward pass: clear below each pivot without normalizing the pivot,
    // rescaling touched rows to keep entry growth in check.
    for col in 0..cols {
        let rank = pivots.len();
        if rank == rows {
            break;
        }
        let Some(pr) = (rank..rows).find(|&r| !f.is_zero(&m[(r, col)])) else {
            continue;
        };
        m.swap_rows(rank, pr);
        for r in rank + 1..rows {
            if f.is_zero(&m[(r, col)]) {
                continue;
            }
            let factor = f.div(&m[(r, col)], &m[(rank, col)]).expect("pivot is nonzero");
            for c in col..cols {
                let sub = f.mul(&factor, &m[(rank, c)]);
                m[(r, c)] = f.sub(&m[(r, c)], &sub);
            }
            f.normalize_row(m.row_mut(r));
        }
        pivots.push(col);
    }

    // Backward pass: unit pivots, then clear above.
    for (r, &col) in pivots.iter().enumerate().rev() {
        let inv = f.inv(&m[(r, col)]).expect("pivot is nonzero");
        for c in col..cols {
            m[(r, c)] = f.mul(&m[(r, c)], &inv);
        }
        for up in 0..r {
            if f.is_zero(&m[(up, col)]) {
                continue;
            }
            let factor = m[(up, col)].clone();
            for c in col..cols {
                let sub = f.mul(&factor, &m[(r, c)]);
                m[(up, c)] = f.sub(&m[(up, c)], &sub);
            }
        }
    }

    let rank = pivots.len();
    Echelon { matrix: m, rank, pivots }
}

pub fn rank<F: Field>(f: &F, a: &Matrix<F::Elem>) -> usize {
    row_echelon(f, a).rank
}

/// An integer linear system `A·x = b`, interpreted over any coefficient
/// system through the canonical ring map. A missing target means the
/// homogeneous system.
#[derive(Debug, Clone)]
pub struct SolutionQuery {
    matrix: IntMatrix,
    target: Option<Vec<BigInt>>,
}

impl SolutionQuery {
    pub fn new(matrix: IntMatrix, target: Option<Vec<BigInt>>) -> Result<Self, SolveError> {
        if let Some(t) = &target {
            if t.len() != matrix.rows() {
                return Err(SolveError::TargetMismatch { rows: matrix.rows(), target: t.len() });
            }
        }
        Ok(SolutionQuery { matrix, target })
    }

    pub fn homogeneous(matrix: IntMatrix) -> Self {
        SolutionQuery { matrix, target: None }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn target(&self) -> Option<&[BigInt]> {
        self.target.as_deref()
    }
}

/// One exact solution of the system over `f`, or `None` when the system is
/// infeasible. Free coordinates are set to zero.
pub fn solve_affine<F: Field>(f: &F, query: &SolutionQuery) -> Option<Vec<F::Elem>> {
    let a = query.matrix.map(|e| f.from_int(e));
    let cols = a.cols();
    let b: Vec<F::Elem> = match query.target() {
        Some(t) => t.iter().map(|e| f.from_int(e)).collect(),
        None => return Some(vec![f.zero(); cols]),
    };
    let augmented = a.with_column(&b).expect("target length was validated");
    let ech = row_echelon(f, &augmented);
    if ech.pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![f.zero(); cols];
    for (r, &c) in ech.pivots.iter().enumerate() {
        x[c] = ech.matrix[(r, cols)].clone();
    }
    Some(x)
}

/// A basis of the solution space of `A·x = 0` over `f`; the basis has
/// exactly `cols − rank` vectors, one per free column.
pub fn kernel_basis<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let ech = row_echelon(f, a);
    let cols = a.cols();
    let mut basis = Vec::with_capacity(cols - ech.rank);
    for free in 0..cols {
        if ech.pivots.contains(&free) {
            continue;
        }
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (r, &c) in ech.pivots.iter().enumerate() {
            v[c] = f.neg(&ech.matrix[(r, free)]);
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::field::{PrimeField, Rationals, Ring};

    fn int_m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    #[test]
    fn echelon_identity_over_f2() {
        let f = PrimeField::new(2).unwrap();
        let a = int_m(&[&[1, 0], &[0, 1]]).map(|e| f.from_int(e));
        let ech = row_echelon(&f, &a);
        assert_eq!(ech.rank, 2);
        assert_eq!(ech.pivots, vec![0, 1]);
    }

    #[test]
    fn echelon_equal_rows_over_f2() {
        let f = PrimeField::new(2).unwrap();
        let a = int_m(&[&[1, 1], &[1, 1]]).map(|e| f.from_int(e));
        assert_eq!(row_echelon(&f, &a).rank, 1);
    }

    #[test]
    fn echelon_rank_one_over_q() {
        // 2×2 determinant oracle: det [[2,1],[4,2]] = 0, one nonzero row, so rank 1.
        let a = int_m(&[&[2, 1], &[4, 2]]);
        assert_eq!(a.determinant().unwrap(), 0.into());
        let f = Rationals;
        let ech = row_echelon(&f, &a.map(|e| f.from_int(e)));
        assert_eq!(ech.rank, 1);
        assert_eq!(ech.pivots, vec![0]);
    }

    #[test]
    fn echelon_row_space_membership() {
        // Every original row must be a combination of echelon rows: over a
        // field this means solving E^T·x = row is feasible.
        let f = Rationals;
        let a = int_m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let aq = a.map(|e| f.from_int(e));
        let ech = row_echelon(&f, &aq);
        assert_eq!(ech.rank, 2);
        let et = ech.matrix.transpose();
        for r in 0..3 {
            let target: Vec<BigRational> = aq.row(r).to_vec();
            // solve E^T x = row over Q by augmenting manually
            let aug = et.with_column(&target).unwrap();
            let e2 = row_echelon(&f, &aug);
            assert_ne!(e2.pivots.last(), Some(&et.cols()));
        }
    }

    #[test]
    fn solve_examples() {
        // 2x = 1 over F_3 has the solution 2; brute force agrees.
        let f3 = PrimeField::new(3).unwrap();
        let q = SolutionQuery::new(int_m(&[&[2]]), Some(vec![1.into()])).unwrap();
        let x = solve_affine(&f3, &q).unwrap();
        assert_eq!(x, vec![f3.elem(2)]);
        let brute: Vec<u64> = (0..3).filter(|&v| (2 * v) % 3 == 1).collect();
        assert_eq!(brute, vec![2]);

        // 2x = 1 over F_2 is infeasible.
        let f2 = PrimeField::new(2).unwrap();
        assert!(solve_affine(&f2, &q).is_none());

        // 0x = 0 over Q has the trivial solution.
        let q0 = SolutionQuery::new(int_m(&[&[0]]), Some(vec![0.into()])).unwrap();
        let x = solve_affine(&Rationals, &q0).unwrap();
        assert_eq!(x, vec![Rationals.zero()]);
    }

    #[test]
    fn solve_validates_target_length() {
        let err = SolutionQuery::new(int_m(&[&[1, 2]]), Some(vec![1.into(), 2.into()]));
        assert!(matches!(err, Err(SolveError::TargetMismatch { rows: 1, target: 2 })));
    }

    #[test]
    fn solution_substitutes_exactly() {
        let f = PrimeField::new(5).unwrap();
        let m = int_m(&[&[1, 2, 3], &[0, 4, 1]]);
        let q = SolutionQuery::new(m.clone(), Some(vec![3.into(), 2.into()])).unwrap();
        let x = solve_affine(&f, &q).unwrap();
        let mf = m.map(|e| f.from_int(e));
        for r in 0..2 {
            let got = f.dot(mf.row(r), &x);
            assert_eq!(got, f.from_int(&q.target().unwrap()[r]));
        }
    }

    #[test]
    fn kernel_examples() {
        let f5 = PrimeField::new(5).unwrap();
        let id = int_m(&[&[1, 0], &[0, 1]]).map(|e| f5.from_int(e));
        assert!(kernel_basis(&f5, &id).is_empty());

        let z = IntMatrix::zero(2, 3).map(|e| Rationals.from_int(e));
        assert_eq!(kernel_basis(&Rationals, &z).len(), 3);

        // Kernel of [1 −1 1] over F_2 is the plane x0+x1+x2 = 0; brute force
        // over F_2³ must produce exactly the span of the returned basis.
        let f2 = PrimeField::new(2).unwrap();
        let a = int_m(&[&[1, -1, 1]]).map(|e| f2.from_int(e));
        let basis = kernel_basis(&f2, &a);
        assert_eq!(basis.len(), 2);
        let mut span = std::collections::BTreeSet::new();
        for c0 in 0..2u64 {
            for c1 in 0..2u64 {
                let v: Vec<u64> = (0..3)
                    .map(|i| (c0 * basis[0][i].0 + c1 * basis[1][i].0) % 2)
                    .collect();
                span.insert(v);
            }
        }
        let brute: std::collections::BTreeSet<Vec<u64>> = (0..8u64)
            .map(|bits| vec![bits & 1, (bits >> 1) & 1, (bits >> 2) & 1])
            .filter(|v| (v[0] + v[1] + v[2]) % 2 == 0)
            .collect();
        assert_eq!(span, brute);
    }

    #[test]
    fn kernel_vectors_satisfy_system() {
        let f = PrimeField::new(7).unwrap();
        let a = int_m(&[&[1, 2, 3, 4], &[5, 6, 0, 1]]);
        let af = a.map(|e| f.from_int(e));
        let basis = kernel_basis(&f, &af);
        assert_eq!(basis.len(), 4 - rank(&f, &af));
        for v in &basis {
            for r in 0..af.rows() {
                assert!(f.is_zero(&f.dot(af.row(r), v)));
            }
        }
    }
}
