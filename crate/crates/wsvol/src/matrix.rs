//! Dense matrices over an arbitrary exact scalar type.
//!
//! Storage is row-major. Integer and rational matrices serialize as
//! `{"rows": k, "cols": m, "entries": [[…], …]}` where an entry is a JSON
//! integer when it fits, and a decimal or `"num/den"` string otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("entry count {got} does not match {rows}×{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },
    #[error("rows have unequal lengths")]
    RaggedRows,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square")]
    NotSquare,
    #[error("cannot parse matrix entry `{0}`")]
    ParseEntry(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Integer matrices with arbitrary-precision entries.
pub type IntMatrix = Matrix<BigInt>;
/// Rational matrices with exact entries.
pub type RatMatrix = Matrix<BigRational>;

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::ShapeMismatch { rows, cols, got: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::RaggedRows);
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Matrix<T>) -> Result<Matrix<T>, MatrixError> {
        if self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "cannot stack {}-column matrix onto {}-column matrix",
                other.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Append one column on the right.
    pub fn with_column(&self, col: &[T]) -> Result<Matrix<T>, MatrixError> {
        if col.len() != self.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "column of length {} against {} rows",
                col.len(),
                self.rows
            )));
        }
        Ok(Matrix::from_fn(self.rows, self.cols + 1, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                col[r].clone()
            }
        }))
    }
}

impl<T: Clone + Zero + One + PartialEq> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &Matrix<T>) -> Result<Matrix<T>, MatrixError>
    where
        T: std::ops::Add<Output = T>,
        for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
    {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}×{} · {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + &self[(r, k)] * &other[(k, c)];
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>, MatrixError>
    where
        T: std::ops::Add<Output = T>,
        for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
    {
        if v.len() != self.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for c in 0..self.cols {
                    acc = acc + &self[(r, c)] * &v[c];
                }
                acc
            })
            .collect())
    }
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect(),
        )
        .expect("literal rows are rectangular")
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&r| !m[(r, k)].is_zero()) {
                    Some(r) => {
                        m.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
                m[(i, k)] = BigInt::zero();
            }
            prev = m[(k, k)].clone();
        }
        Ok(&m[(n - 1, n - 1)] * sign)
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// JSON form of one exact scalar: a number when it fits in `i64`,
/// otherwise a string (`"123…"` or `"num/den"`).
pub fn int_to_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

pub fn rat_to_value(q: &BigRational) -> Value {
    if q.denom().is_one() {
        int_to_value(q.numer())
    } else {
        Value::from(format!("{}/{}", q.numer(), q.denom()))
    }
}

pub fn int_from_value(v: &Value) -> Result<BigInt, MatrixError> {
    let err = || MatrixError::ParseEntry(v.to_string());
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(err())
            }
        }
        Value::String(s) => s.parse().map_err(|_| err()),
        _ => Err(err()),
    }
}

pub fn rat_from_value(v: &Value) -> Result<BigRational, MatrixError> {
    if let Value::String(s) = v {
        if let Some((num, den)) = s.split_once('/') {
            let err = || MatrixError::ParseEntry(v.to_string());
            let num: BigInt = num.trim().parse().map_err(|_| err())?;
            let den: BigInt = den.trim().parse().map_err(|_| err())?;
            if den.is_zero() {
                return Err(err());
            }
            return Ok(BigRational::new(num, den));
        }
    }
    int_from_value(v).map(BigRational::from)
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Value>>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.rows_iter().map(|r| r.iter().map(int_to_value).collect()).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(de)?;
        matrix_from_repr(repr, int_from_value).map_err(de::Error::custom)
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.rows_iter().map(|r| r.iter().map(rat_to_value).collect()).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(de)?;
        matrix_from_repr(repr, rat_from_value).map_err(de::Error::custom)
    }
}

fn matrix_from_repr<T>(
    repr: MatrixRepr,
    parse: impl Fn(&Value) -> Result<T, MatrixError>,
) -> Result<Matrix<T>, MatrixError> {
    let mut data = Vec::with_capacity(repr.rows * repr.cols);
    for row in &repr.entries {
        if row.len() != repr.cols {
            return Err(MatrixError::RaggedRows);
        }
        for v in row {
            data.push(parse(v)?);
        }
    }
    Matrix::from_vec(repr.rows, repr.cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checks() {
        assert!(Matrix::from_vec(2, 2, vec![1, 2, 3]).is_err());
        let m = IntMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(m[(1, 0)], BigInt::from(3));
        assert_eq!(m.column(1), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn multiplication_and_identity() {
        let a = IntMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let id = IntMatrix::identity(2);
        assert_eq!(a.mul(&id).unwrap(), a);
        let v = a.mul_vec(&[BigInt::from(1), BigInt::from(-1)]).unwrap();
        assert_eq!(v, vec![BigInt::from(-1), BigInt::from(-1)]);
    }

    #[test]
    fn determinant_bareiss() {
        let a = IntMatrix::from_i64_rows(&[&[2, 4], &[6, 8]]);
        assert_eq!(a.determinant().unwrap(), BigInt::from(-8));
        let singular = IntMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(singular.determinant().unwrap(), BigInt::from(0));
        let id = IntMatrix::identity(3);
        assert!(id.is_unimodular());
        let a3 = IntMatrix::from_i64_rows(&[&[3, 1, 4], &[1, 5, 9], &[2, 6, 5]]);
        // cofactor expansion by hand: 3(25−54) − 1(5−18) + 4(6−10) = −90
        assert_eq!(a3.determinant().unwrap(), BigInt::from(-90));
    }

    #[test]
    fn json_round_trip() {
        let a = IntMatrix::from_i64_rows(&[&[2, -4], &[0, 9]]);
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains("\"rows\":2"));
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);

        let q = RatMatrix::from_rows(vec![vec![
            BigRational::new(1.into(), 2.into()),
            BigRational::from(BigInt::from(3)),
        ]])
        .unwrap();
        let s = serde_json::to_string(&q).unwrap();
        assert!(s.contains("\"1/2\""));
        let back: RatMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(q, back);
    }

    #[test]
    fn huge_entries_become_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let m = Matrix::from_vec(1, 1, vec![big.clone()]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"123456789012345678901234567890\""));
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back[(0, 0)], big);
    }
}
