//! Smith normal form of integer matrices with unimodular transforms,
//! integer kernel bases, elementary-divisor primes, and mod-p reduction.
//!
//! Everything runs in arbitrary-precision integer arithmetic; intermediate
//! entries are allowed to outgrow machine words.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::field::{FieldError, Fp, PrimeField, Ring};
use crate::matrix::IntMatrix;

/// `S · A · T = diag(a_1, …, a_r, 0, …)` with `S`, `T` unimodular and
/// `a_1 | a_2 | … | a_r`, all positive.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub s: IntMatrix,
    pub t: IntMatrix,
    pub divisors: Vec<BigInt>,
    pub rank: usize,
}

impl SmithDecomposition {
    /// The diagonal matrix `S·A·T` in the shape of the original `A`.
    pub fn diagonal(&self) -> IntMatrix {
        let (rows, cols) = (self.s.rows(), self.t.rows());
        IntMatrix::from_fn(rows, cols, |r, c| {
            if r == c && r < self.rank {
                self.divisors[r].clone()
            } else {
                BigInt::zero()
            }
        })
    }
}

/// Position of the entry with smallest nonzero absolute value in the block
/// `[from.., from..]`, ties broken in row-major order.
fn select_pivot(m: &IntMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for r in from..m.rows() {
        for c in from..m.cols() {
            if m[(r, c)].is_zero() {
                continue;
            }
            match best {
                Some((br, bc)) if m[(br, bc)].abs() <= m[(r, c)].abs() => {}
                _ => best = Some((r, c)),
            }
        }
    }
    best
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut s = IntMatrix::identity(rows);
    let mut t = IntMatrix::identity(cols);

    // row op: row r2 -= q * row r1 (on d and s)
    let row_sub = |d: &mut IntMatrix, s: &mut IntMatrix, r2: usize, q: &BigInt, r1: usize| {
        for c in 0..d.cols() {
            let v = &d[(r2, c)] - q * &d[(r1, c)];
            d[(r2, c)] = v;
        }
        for c in 0..s.cols() {
            let v = &s[(r2, c)] - q * &s[(r1, c)];
            s[(r2, c)] = v;
        }
    };
    let col_sub = |d: &mut IntMatrix, t: &mut IntMatrix, c2: usize, q: &BigInt, c1: usize| {
        for r in 0..d.rows() {
            let v = &d[(r, c2)] - q * &d[(r, c1)];
            d[(r, c2)] = v;
        }
        for r in 0..t.rows() {
            let v = &t[(r, c2)] - q * &t[(r, c1)];
            t[(r, c2)] = v;
        }
    };
    let row_add = |d: &mut IntMatrix, s: &mut IntMatrix, r2: usize, r1: usize| {
        for c in 0..d.cols() {
            let v = &d[(r2, c)] + &d[(r1, c)];
            d[(r2, c)] = v;
        }
        for c in 0..s.cols() {
            let v = &s[(r2, c)] + &s[(r1, c)];
            s[(r2, c)] = v;
        }
    };

    let mut i = 0;
    'outer: while i < rows.min(cols) {
        let Some((pr, pc)) = select_pivot(&d, i) else {
            break;
        };
        d.swap_rows(i, pr);
        s.swap_rows(i, pr);
        d.swap_cols(i, pc);
        t.swap_cols(i, pc);

        loop {
            // Clear the pivot column and row by Euclidean steps. Nonzero
            // remainders shrink the minimum, so re-selecting terminates.
            for r in i + 1..rows {
                if !d[(r, i)].is_zero() {
                    let q = &d[(r, i)] / &d[(i, i)];
                    row_sub(&mut d, &mut s, r, &q, i);
                }
            }
            for c in i + 1..cols {
                if !d[(i, c)].is_zero() {
                    let q = &d[(i, c)] / &d[(i, i)];
                    col_sub(&mut d, &mut t, c, &q, i);
                }
            }
            let col_clear = (i + 1..rows).all(|r| d[(r, i)].is_zero());
            let row_clear = (i + 1..cols).all(|c| d[(i, c)].is_zero());
            if col_clear && row_clear {
                // Divisibility repair: fold the first offending row into the
                // pivot row and keep eliminating.
                let pivot = d[(i, i)].clone();
                let offender = (i + 1..rows).find(|&r| {
                    (i + 1..cols).any(|c| !(&d[(r, c)] % &pivot).is_zero())
                });
                match offender {
                    Some(r) => {
                        row_add(&mut d, &mut s, i, r);
                        continue;
                    }
                    None => {
                        i += 1;
                        continue 'outer;
                    }
                }
            }
            let (pr, pc) = select_pivot(&d, i).expect("block is nonzero here");
            d.swap_rows(i, pr);
            s.swap_rows(i, pr);
            d.swap_cols(i, pc);
            t.swap_cols(i, pc);
        }
    }

    // Canonical signs: divisors are positive.
    let rank = i;
    for j in 0..rank {
        if d[(j, j)].is_negative() {
            for c in 0..cols {
                let v = -&d[(j, c)];
                d[(j, c)] = v;
            }
            for c in 0..rows {
                let v = -&s[(j, c)];
                s[(j, c)] = v;
            }
        }
    }
    let divisors: Vec<BigInt> = (0..rank).map(|j| d[(j, j)].clone()).collect();
    SmithDecomposition { s, t, divisors, rank }
}

/// Free generators of the integer solution lattice of `A·x = 0`: the last
/// `cols − rank` columns of `T`.
pub fn integer_kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    (snf.rank..a.cols()).map(|c| snf.t.column(c)).collect()
}

/// The primes dividing at least one elementary divisor of `A`.
pub fn elementary_divisor_primes(a: &IntMatrix) -> BTreeSet<BigInt> {
    let snf = smith_normal_form(a);
    let mut primes = BTreeSet::new();
    for d in &snf.divisors {
        for p in prime_factors(&d.abs()) {
            primes.insert(p);
        }
    }
    primes
}

/// Trial-division factorization; desk-scale divisors only.
fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.clone();
    let mut out = Vec::new();
    if n <= BigInt::one() {
        return out;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

/// Coordinatewise reduction `Z^m -> F_p^m` onto residues in `{0, …, p−1}`.
pub fn reduce_mod_p(v: &[BigInt], p: u64) -> Result<Vec<Fp>, FieldError> {
    let f = PrimeField::new(p)?;
    Ok(v.iter().map(|e| f.from_int(e)).collect())
}
