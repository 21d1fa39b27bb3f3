//! Exact scalars in the field tower `Q ⊂ Q(i) ⊂ Q(i, √3)`.
//!
//! A scalar is stored as `a + b·i + c·√3 + d·i√3` with rational coordinates.
//! Every scalar also carries the tower level it was declared in; arithmetic
//! takes the wider of the two operand levels, so a value can be promoted but
//! never silently narrowed. Equality, ordering and hashing look at the value
//! only.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A level of the scalar tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tower {
    /// The rationals.
    #[serde(rename = "q")]
    Q,
    /// Gaussian rationals `Q(i)`.
    #[serde(rename = "qi")]
    Qi,
    /// `Q(i, √3)`, needed for the normalized volume element.
    #[serde(rename = "qi-sqrt3")]
    QiSqrt3,
}

impl Tower {
    pub fn name(self) -> &'static str {
        match self {
            Tower::Q => "q",
            Tower::Qi => "qi",
            Tower::QiSqrt3 => "qi-sqrt3",
        }
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Tower {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" => Ok(Tower::Q),
            "qi" => Ok(Tower::Qi),
            "qi-sqrt3" => Ok(Tower::QiSqrt3),
            other => Err(Error::Parse(format!("unknown scalar tower `{other}`"))),
        }
    }
}

/// Exact element of `Q(i, √3)`.
#[derive(Clone)]
pub struct Scalar {
    /// Coordinates on the basis `1, i, √3, i√3`.
    parts: [BigRational; 4],
    tower: Tower,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { parts: [rat(0), rat(0), rat(0), rat(0)], tower: Tower::Q }
    }

    pub fn one() -> Self {
        Scalar::from_i64(1)
    }

    pub fn from_i64(n: i64) -> Self {
        Scalar { parts: [rat(n), rat(0), rat(0), rat(0)], tower: Tower::Q }
    }

    /// The rational `num/den`. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let q = BigRational::new(BigInt::from(num), BigInt::from(den));
        Scalar::from_rational(q)
    }

    pub fn from_rational(q: BigRational) -> Self {
        Scalar { parts: [q, rat(0), rat(0), rat(0)], tower: Tower::Q }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar { parts: [rat(0), rat(1), rat(0), rat(0)], tower: Tower::Qi }
    }

    pub fn sqrt3() -> Self {
        Scalar { parts: [rat(0), rat(0), rat(1), rat(0)], tower: Tower::QiSqrt3 }
    }

    /// Builds `a + b·i + c·√3 + d·i√3`; the declared tower is the smallest
    /// level containing the value.
    pub fn from_parts(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        let mut s = Scalar { parts: [a, b, c, d], tower: Tower::Q };
        s.tower = s.minimal_tower();
        s
    }

    pub fn parts(&self) -> &[BigRational; 4] {
        &self.parts
    }

    /// Declared tower level.
    pub fn tower(&self) -> Tower {
        self.tower
    }

    /// Smallest tower level that contains this value.
    pub fn minimal_tower(&self) -> Tower {
        if !self.parts[2].is_zero() || !self.parts[3].is_zero() {
            Tower::QiSqrt3
        } else if !self.parts[1].is_zero() {
            Tower::Qi
        } else {
            Tower::Q
        }
    }

    /// Widens the declared level. Requests to narrow are ignored.
    pub fn promote(mut self, tower: Tower) -> Self {
        self.tower = self.tower.max(tower);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.parts[0].is_one() && self.parts[1..].iter().all(Zero::is_zero)
    }

    /// `Some(q)` when the value is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.parts[1..].iter().all(Zero::is_zero) {
            Some(&self.parts[0])
        } else {
            None
        }
    }

    /// Small integer view, used for lattice coordinates and reports.
    pub fn as_i64(&self) -> Option<i64> {
        let q = self.as_rational()?;
        if !q.is_integer() {
            return None;
        }
        i64::try_from(q.to_integer()).ok()
    }

    /// Conjugation `√3 ↦ −√3`.
    fn conj_sqrt3(&self) -> Self {
        let [a, b, c, d] = &self.parts;
        Scalar { parts: [a.clone(), b.clone(), -c.clone(), -d.clone()], tower: self.tower }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // x·σ(x) with σ: √3 ↦ −√3 lies in Q(i); invert that, then multiply back.
        let bar = self.conj_sqrt3();
        let y = self * &bar;
        let [p, q, _, _] = &y.parts;
        let norm = p * p + q * q;
        let y_inv = Scalar {
            parts: [p / &norm, -(q / &norm), rat(0), rat(0)],
            tower: y.tower,
        };
        Ok(&bar * &y_inv)
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Scalar::one().promote(self.tower);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_i64(n)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.parts.hash(state);
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on coordinates; a canonical order, not a field order.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts.cmp(&other.parts)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (l, r) in self.parts.iter_mut().zip(&rhs.parts) {
            if !r.is_zero() {
                *l += r;
            }
        }
        self.tower = self.tower.max(rhs.tower);
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (l, r) in self.parts.iter_mut().zip(&rhs.parts) {
            if !r.is_zero() {
                *l -= r;
            }
        }
        self.tower = self.tower.max(rhs.tower);
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= &rhs;
        self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let [a, b, c, d] = &self.parts;
        Scalar { parts: [-a.clone(), -b.clone(), -c.clone(), -d.clone()], tower: self.tower }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

// Basis products: i·i = −1, √3·√3 = 3, (i√3)² = −3, i·√3 = i√3,
// i·i√3 = −√3, √3·i√3 = 3i.
const MUL_TABLE: [[(usize, i64); 4]; 4] = [
    [(0, 1), (1, 1), (2, 1), (3, 1)],
    [(1, 1), (0, -1), (3, 1), (2, -1)],
    [(2, 1), (3, 1), (0, 3), (1, 3)],
    [(3, 1), (2, -1), (1, 3), (0, -3)],
];

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = [rat(0), rat(0), rat(0), rat(0)];
        for (i, l) in self.parts.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            for (j, r) in rhs.parts.iter().enumerate() {
                if r.is_zero() {
                    continue;
                }
                let (k, f) = MUL_TABLE[i][j];
                let prod = l * r;
                if f == 1 {
                    out[k] += prod;
                } else {
                    out[k] += prod * BigInt::from(f);
                }
            }
        }
        Scalar { parts: out, tower: self.tower.max(rhs.tower) }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, q: &BigRational) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

/// Canonical text: `3/2`, `-i`, `(1/2+1/6i√3)`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const UNITS: [&str; 4] = ["", "i", "√3", "i√3"];
        let nonzero: Vec<usize> = (0..4).filter(|&k| !self.parts[k].is_zero()).collect();
        if nonzero.is_empty() {
            return f.write_str("0");
        }
        let wrap = nonzero.len() > 1;
        if wrap {
            f.write_str("(")?;
        }
        for (n, &k) in nonzero.iter().enumerate() {
            let q = &self.parts[k];
            if q.is_negative() {
                f.write_str("-")?;
            } else if n > 0 {
                f.write_str("+")?;
            }
            let a = q.abs();
            if k == 0 || !a.is_one() {
                write_rational(f, &a)?;
            }
            f.write_str(UNITS[k])?;
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_generators_square_exactly() {
        assert_eq!(&Scalar::sqrt3() * &Scalar::sqrt3(), Scalar::from_i64(3));
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_i64(-1));
        let isq = &Scalar::i() * &Scalar::sqrt3();
        assert_eq!(&isq * &isq, Scalar::from_i64(-3));
    }

    #[test]
    fn inverse_of_mixed_element() {
        let x = Scalar::from_parts(rat(1), rat(2), BigRational::new(1.into(), 3.into()), rat(-1));
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        assert!(Scalar::zero().inv().is_err());
    }

    #[test]
    fn tower_only_widens() {
        let q = Scalar::from_i64(2);
        assert_eq!(q.tower(), Tower::Q);
        let w = &q * &Scalar::sqrt3();
        assert_eq!(w.tower(), Tower::QiSqrt3);
        // (√3)² = 3 is rational but keeps its declared level.
        let back = &Scalar::sqrt3() * &Scalar::sqrt3();
        assert_eq!(back.tower(), Tower::QiSqrt3);
        assert_eq!(back.minimal_tower(), Tower::Q);
        assert_eq!(back.clone().promote(Tower::Q).tower(), Tower::QiSqrt3);
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(Scalar::ratio(-3, 6).to_string(), "-1/2");
        assert_eq!((-Scalar::i()).to_string(), "-i");
        let x = &Scalar::ratio(1, 2) + &(&Scalar::ratio(1, 6) * &(&Scalar::i() * &Scalar::sqrt3()));
        assert_eq!(x.to_string(), "(1/2+1/6i√3)");
        assert_eq!(Scalar::zero().to_string(), "0");
    }

    #[test]
    fn parses_tower_names() {
        assert_eq!("qi-sqrt3".parse::<Tower>().unwrap(), Tower::QiSqrt3);
        assert!("r".parse::<Tower>().is_err());
    }
}
