//! Coefficient systems and their exact arithmetic.
//!
//! Every computation in this crate happens over one of four coefficient
//! systems: a prime field `F_p`, a quadratic extension `F_{p²}`, the
//! rationals `Q`, or the integers `Z`. The first three are fields; `Z` is
//! only a ring. A [`FieldSpec`] selects the system at runtime, and the
//! [`Ring`]/[`Field`] traits give generic algorithms a uniform handle on
//! the arithmetic (the modulus of `F_p` is a runtime value, so the
//! structure object carries it rather than the elements).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest admissible prime modulus. Residues and products must stay inside
/// `u64`/`u128` arithmetic, and primality is checked by trial division.
pub const MAX_PRIME: u64 = (1 << 32) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported range (p < 2^32)")]
    ModulusTooLarge(u64),
    #[error("x^2 + {c1}x + {c0} has a root in F_{p} and is not irreducible")]
    Reducible { p: u64, c0: u64, c1: u64 },
    #[error("operation requires a field, but the coefficient system is Z")]
    NotAField,
    #[error("cannot parse coefficient system `{0}`")]
    Parse(String),
}

/// Trial division primality test for moduli up to [`MAX_PRIME`].
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Runtime selector for a coefficient system.
///
/// Serialized as `"fp:<p>"`, `"fp2:<p>:<c0>,<c1>"` (the monic modulus
/// `x² + c1·x + c0`), `"q"`, or `"z"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldSpec {
    Prime(u64),
    PrimeSquare { p: u64, c0: u64, c1: u64 },
    Rationals,
    Integers,
}

impl FieldSpec {
    /// Prime field selector; `p` is verified prime by trial division.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        PrimeField::new(p)?;
        Ok(FieldSpec::Prime(p))
    }

    /// Quadratic extension selector; the modulus `x² + c1·x + c0` is
    /// verified to have no root in `F_p` by exhaustive evaluation.
    pub fn prime_square(p: u64, c0: u64, c1: u64) -> Result<Self, FieldError> {
        let f = QuadraticField::new(p, c0, c1)?;
        Ok(FieldSpec::PrimeSquare { p: f.p, c0: f.c0, c1: f.c1 })
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, FieldSpec::Integers)
    }

    /// 0 for `Q` and `Z`, `p` for `F_p` and `F_{p²}`.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Prime(p) | FieldSpec::PrimeSquare { p, .. } => *p,
            FieldSpec::Rationals | FieldSpec::Integers => 0,
        }
    }

    /// Whether the integer `d` maps to a unit of this coefficient system.
    pub fn is_unit(&self, d: i64) -> bool {
        match self {
            FieldSpec::Prime(p) | FieldSpec::PrimeSquare { p, .. } => {
                d != 0 && !d.unsigned_abs().is_multiple_of(*p)
            }
            FieldSpec::Rationals => d != 0,
            FieldSpec::Integers => d == 1 || d == -1,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "fp:{p}"),
            FieldSpec::PrimeSquare { p, c0, c1 } => write!(f, "fp2:{p}:{c0},{c1}"),
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::Integers => write!(f, "z"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::Parse(s.to_string());
        match s {
            "q" => return Ok(FieldSpec::Rationals),
            "z" => return Ok(FieldSpec::Integers),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("fp2:") {
            let (p, cs) = rest.split_once(':').ok_or_else(bad)?;
            let (c0, c1) = cs.split_once(',').ok_or_else(bad)?;
            let p = p.parse().map_err(|_| bad())?;
            let c0 = c0.parse().map_err(|_| bad())?;
            let c1 = c1.parse().map_err(|_| bad())?;
            return FieldSpec::prime_square(p, c0, c1);
        }
        if let Some(p) = s.strip_prefix("fp:") {
            let p = p.parse().map_err(|_| bad())?;
            return FieldSpec::prime(p);
        }
        Err(bad())
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A commutative ring with unit, presented as a structure object so that
/// runtime moduli have a place to live.
#[allow(clippy::wrong_self_convention)] // from_int is the map Z -> R of the ring object
pub trait Ring {
    type Elem: Clone + PartialEq + fmt::Debug + fmt::Display;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Image of an integer under the canonical map `Z -> R`.
    fn from_int(&self, n: &BigInt) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_int(&BigInt::from(n))
    }

    fn dot(&self, u: &[Self::Elem], v: &[Self::Elem]) -> Self::Elem {
        debug_assert_eq!(u.len(), v.len());
        let mut acc = self.zero();
        for (a, b) in u.iter().zip(v) {
            acc = self.add(&acc, &self.mul(a, b));
        }
        acc
    }
}

pub trait Field: Ring {
    /// Multiplicative inverse; `None` exactly on zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// All field elements, when there are few enough to enumerate.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    /// Rescaling hook applied to freshly eliminated rows; rationals use it
    /// to clear denominators, everything else leaves rows alone.
    fn normalize_row(&self, _row: &mut [Self::Elem]) {}
}

/// The ring of integers with arbitrary-precision elements.
#[derive(Debug, Clone, Copy, Default)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_int(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
}

/// The field of rational numbers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn from_int(&self, n: &BigInt) -> BigRational {
        BigRational::from(n.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

impl Field for Rationals {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    /// Scale the row by `lcm(denominators) / gcd(numerators)`, which keeps
    /// entries integral and coprime without touching the sign pattern.
    fn normalize_row(&self, row: &mut [BigRational]) {
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for e in row.iter() {
            if !e.is_zero() {
                den = den.lcm(e.denom());
                num = num.gcd(e.numer());
            }
        }
        if num.is_zero() || (num.is_one() && den.is_one()) {
            return;
        }
        let scale = BigRational::new(den, num);
        for e in row.iter_mut() {
            *e *= &scale;
        }
    }
}

/// An element of `F_p`, stored as the residue in `{0, …, p−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp(pub u64);

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The prime field `F_p` for a machine-word prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p > MAX_PRIME {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, v: u64) -> Fp {
        Fp(v % self.p)
    }

    fn mul_raw(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn pow_raw(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            exp >>= 1;
        }
        acc
    }
}

impl Ring for PrimeField {
    type Elem = Fp;

    fn zero(&self) -> Fp {
        Fp(0)
    }
    fn one(&self) -> Fp {
        Fp(1 % self.p)
    }
    fn add(&self, a: &Fp, b: &Fp) -> Fp {
        Fp((a.0 + b.0) % self.p)
    }
    fn neg(&self, a: &Fp) -> Fp {
        Fp((self.p - a.0) % self.p)
    }
    fn mul(&self, a: &Fp, b: &Fp) -> Fp {
        Fp(self.mul_raw(a.0, b.0))
    }
    fn from_int(&self, n: &BigInt) -> Fp {
        let p = BigInt::from(self.p);
        Fp(n.mod_floor(&p).to_u64().expect("residue fits u64"))
    }
    fn is_zero(&self, a: &Fp) -> bool {
        a.0 == 0
    }
}

impl Field for PrimeField {
    fn inv(&self, a: &Fp) -> Option<Fp> {
        if a.0 == 0 {
            None
        } else {
            Some(Fp(self.pow_raw(a.0, self.p - 2)))
        }
    }

    fn elements(&self) -> Option<Vec<Fp>> {
        if self.p <= 1_000_000 {
            Some((0..self.p).map(Fp).collect())
        } else {
            None
        }
    }
}

/// An element `a + b·x` of `F_{p²} = F_p[x] / (x² + c1·x + c0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp2 {
    pub a: u64,
    pub b: u64,
}

impl fmt::Display for Fp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}x", self.a, self.b)
        }
    }
}

/// The quadratic extension of `F_p` by a fixed irreducible monic quadratic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticField {
    base: PrimeField,
    p: u64,
    c0: u64,
    c1: u64,
}

impl QuadraticField {
    pub fn new(p: u64, c0: u64, c1: u64) -> Result<Self, FieldError> {
        let base = PrimeField::new(p)?;
        let c0 = c0 % p;
        let c1 = c1 % p;
        for t in 0..p {
            let v = (base.mul_raw(t, t) + base.mul_raw(c1, t) + c0) % p;
            if v == 0 {
                return Err(FieldError::Reducible { p, c0, c1 });
            }
        }
        Ok(QuadraticField { base, p, c0, c1 })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, a: u64, b: u64) -> Fp2 {
        Fp2 { a: a % self.p, b: b % self.p }
    }
}

impl Ring for QuadraticField {
    type Elem = Fp2;

    fn zero(&self) -> Fp2 {
        Fp2 { a: 0, b: 0 }
    }
    fn one(&self) -> Fp2 {
        Fp2 { a: 1 % self.p, b: 0 }
    }
    fn add(&self, x: &Fp2, y: &Fp2) -> Fp2 {
        Fp2 { a: (x.a + y.a) % self.p, b: (x.b + y.b) % self.p }
    }
    fn neg(&self, x: &Fp2) -> Fp2 {
        Fp2 { a: (self.p - x.a) % self.p, b: (self.p - x.b) % self.p }
    }
    fn mul(&self, x: &Fp2, y: &Fp2) -> Fp2 {
        // (a + bx)(c + dx) with x² = −c1·x − c0.
        let f = &self.base;
        let ac = f.mul_raw(x.a, y.a);
        let bd = f.mul_raw(x.b, y.b);
        let cross = (f.mul_raw(x.a, y.b) + f.mul_raw(x.b, y.a)) % self.p;
        let a = (ac + self.p - f.mul_raw(self.c0, bd) % self.p) % self.p;
        let b = (cross + self.p - f.mul_raw(self.c1, bd) % self.p) % self.p;
        Fp2 { a, b }
    }
    fn from_int(&self, n: &BigInt) -> Fp2 {
        Fp2 { a: self.base.from_int(n).0, b: 0 }
    }
    fn is_zero(&self, x: &Fp2) -> bool {
        x.a == 0 && x.b == 0
    }
}

impl Field for QuadraticField {
    fn inv(&self, x: &Fp2) -> Option<Fp2> {
        if self.is_zero(x) {
            return None;
        }
        // Solve (a + bx)(c + dx) = 1; the 2×2 system has determinant
        // a² − c1·ab + c0·b², nonzero by irreducibility.
        let f = &self.base;
        let det = (f.mul_raw(x.a, x.a) + f.mul_raw(self.c0, f.mul_raw(x.b, x.b)) + self.p
            - f.mul_raw(self.c1, f.mul_raw(x.a, x.b)) % self.p)
            % self.p;
        let det_inv = f.inv(&Fp(det))?.0;
        let c = f.mul_raw((x.a + self.p - f.mul_raw(self.c1, x.b) % self.p) % self.p, det_inv);
        let d = f.mul_raw((self.p - x.b) % self.p, det_inv);
        Some(Fp2 { a: c, b: d })
    }

    fn elements(&self) -> Option<Vec<Fp2>> {
        if self.p * self.p <= 1_000_000 {
            let mut out = Vec::with_capacity((self.p * self.p) as usize);
            for a in 0..self.p {
                for b in 0..self.p {
                    out.push(Fp2 { a, b });
                }
            }
            Some(out)
        } else {
            None
        }
    }
}

/// Runs `$body` with `$f` bound to the field selected by a [`FieldSpec`].
///
/// Evaluates to `Result<_, FieldError>`; the integer spec is rejected. The
/// body must produce the same output type for every field.
#[macro_export]
macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {{
        let spec: &$crate::field::FieldSpec = $spec;
        match spec {
            $crate::field::FieldSpec::Prime(p) => {
                $crate::field::PrimeField::new(*p).map(|fld| {
                    let $f = &fld;
                    $body
                })
            }
            $crate::field::FieldSpec::PrimeSquare { p, c0, c1 } => {
                $crate::field::QuadraticField::new(*p, *c0, *c1).map(|fld| {
                    let $f = &fld;
                    $body
                })
            }
            $crate::field::FieldSpec::Rationals => {
                let $f = &$crate::field::Rationals;
                Ok($body)
            }
            $crate::field::FieldSpec::Integers => Err($crate::field::FieldError::NotAField),
        }
    }};
}
