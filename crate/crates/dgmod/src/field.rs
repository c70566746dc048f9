//! Ground fields: the rationals and prime fields F_p, with exact arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// The ground field k. Every matrix and complex carries one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u64),
}

/// An element of the ground field. The `Fp` variant stores a residue in `[0, p)`;
/// the modulus lives in the ambient [`Field`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp(u64),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("scalar does not belong to field {0:?}")]
    WrongField(Field),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn rationals() -> Field {
        Field::Rationals
    }

    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(BigRational::zero()),
            Field::Prime(_) => Scalar::Fp(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(BigRational::one()),
            Field::Prime(_) => Scalar::Fp(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(BigRational::from(BigInt::from(n))),
            Field::Prime(p) => {
                let m = n.rem_euclid(*p as i64) as u64;
                Scalar::Fp(m)
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            (Field::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp((x + y) % p),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Rationals, Scalar::Q(x)) => Scalar::Q(-x),
            (Field::Prime(p), Scalar::Fp(x)) => Scalar::Fp((p - x) % p),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            (Field::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => {
                Scalar::Fp(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        match (self, a) {
            (Field::Rationals, Scalar::Q(x)) => Some(Scalar::Q(x.recip())),
            (Field::Prime(p), Scalar::Fp(x)) => {
                // Fermat: x^(p-2) mod p
                let mut base = *x as u128;
                let modulus = *p as u128;
                let mut exp = p - 2;
                let mut acc: u128 = 1;
                while exp > 0 {
                    if exp & 1 == 1 {
                        acc = acc * base % modulus;
                    }
                    base = base * base % modulus;
                    exp >>= 1;
                }
                Some(Scalar::Fp(acc as u64))
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Q(x) => x.is_zero(),
            Scalar::Fp(x) => *x == 0,
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Q(x) => x.is_one(),
            Scalar::Fp(x) => *x == 1,
        }
    }

    /// Canonical string form: lowest-terms `num/den` over Q, residue in `[0,p)` over F_p.
    pub fn render(&self, a: &Scalar) -> String {
        match a {
            Scalar::Q(x) => {
                if x.denom().is_one() {
                    format!("{}", x.numer())
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            }
            Scalar::Fp(x) => format!("{x}"),
        }
    }

    pub fn parse(&self, s: &str) -> Result<Scalar, FieldError> {
        match self {
            Field::Rationals => {
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let n: BigInt = num.parse().map_err(|_| FieldError::WrongField(*self))?;
                let d: BigInt = den.parse().map_err(|_| FieldError::WrongField(*self))?;
                if d.is_zero() {
                    return Err(FieldError::WrongField(*self));
                }
                Ok(Scalar::Q(BigRational::new(n, d)))
            }
            Field::Prime(p) => {
                let n: i64 = s.parse().map_err(|_| FieldError::WrongField(*self))?;
                Ok(Scalar::Fp(n.rem_euclid(*p as i64) as u64))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl Field {
    /// Parses the CLI/document field tag: `Q` or `Fp:<p>`.
    pub fn from_tag(tag: &str) -> Result<Field, FieldError> {
        if tag == "Q" {
            return Ok(Field::Rationals);
        }
        if let Some(p) = tag.strip_prefix("Fp:") {
            let p: u64 = p.parse().map_err(|_| FieldError::NotPrime(0))?;
            return Field::prime(p);
        }
        Err(FieldError::NotPrime(0))
    }
}

impl Scalar {
    pub fn abs_q(&self) -> Option<BigRational> {
        match self {
            Scalar::Q(x) => Some(x.abs()),
            Scalar::Fp(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(Field::prime(4), Err(FieldError::NotPrime(4)));
        assert_eq!(Field::prime(1), Err(FieldError::NotPrime(1)));
        assert!(Field::prime(2).is_ok());
        assert!(Field::prime(97).is_ok());
    }

    #[test]
    fn fp_inverses() {
        let f = Field::prime(7).unwrap();
        for x in 1..7 {
            let a = Scalar::Fp(x);
            let inv = f.inv(&a).unwrap();
            assert!(f.is_one(&f.mul(&a, &inv)));
        }
        assert_eq!(f.inv(&Scalar::Fp(0)), None);
    }

    #[test]
    fn rational_roundtrip() {
        let f = Field::Rationals;
        let a = f.parse("-3/6").unwrap();
        assert_eq!(f.render(&a), "-1/2");
        let b = f.parse("4").unwrap();
        assert_eq!(f.render(&f.mul(&a, &b)), "-2");
    }

    #[test]
    fn field_tag_roundtrip() {
        assert_eq!(Field::from_tag("Q").unwrap(), Field::Rationals);
        assert_eq!(Field::from_tag("Fp:5").unwrap(), Field::Prime(5));
        assert!(Field::from_tag("Fp:6").is_err());
    }
}
