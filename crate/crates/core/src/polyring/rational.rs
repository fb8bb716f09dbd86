//! Exact rationals with an inline `i64` fast path.
//!
//! Values that fit are stored as a reduced `i64` fraction; anything larger
//! spills to a boxed `BigRational`. The representation is canonical, so the
//! derived `Eq`/`Hash` are value equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Q {
    /// numerator, denominator; `den > 0`, `gcd(num, den) = 1`, `num != i64::MIN`
    Small(i64, i64),
    Big(Box<BigRational>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalParseError {
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u128(a.unsigned_abs() as u128, b.unsigned_abs() as u128) as i64
}

fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Q {
    pub const ZERO: Q = Q::Small(0, 1);
    pub const ONE: Q = Q::Small(1, 1);

    pub fn zero() -> Q {
        Q::ZERO
    }

    pub fn one() -> Q {
        Q::ONE
    }

    pub fn from_i64(v: i64) -> Q {
        if v == i64::MIN {
            Q::Big(Box::new(BigRational::from_integer(BigInt::from(v))))
        } else {
            Q::Small(v, 1)
        }
    }

    /// `num / den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Q {
        assert!(den != 0, "zero denominator");
        Q::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Q {
        debug_assert!(den != 0);
        let (mut n, mut d) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        if fits(n) && fits(d) {
            Q::Small(n as i64, d as i64)
        } else {
            Q::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))
        }
    }

    /// Canonicalizes a big rational, demoting it to the inline form when it fits.
    pub fn from_big(r: BigRational) -> Q {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Q::Small(n, d);
            }
        }
        Q::Big(Box::new(r))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Q::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Q::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Q::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small(_, d) => *d == 1,
            Q::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Q::Small(n, _) => n.signum() as i32,
            Q::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Q {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Q::Small(n, _) => BigInt::from(*n),
            Q::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Q::Small(_, d) => BigInt::from(*d),
            Q::Big(b) => b.denom().clone(),
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Q {
        match self {
            Q::Small(0, _) => panic!("inverse of zero"),
            Q::Small(n, d) => {
                if *n < 0 {
                    Q::Small(-d, -n)
                } else {
                    Q::Small(*d, *n)
                }
            }
            Q::Big(b) => Q::from_big(b.recip()),
        }
    }

    pub fn pow(&self, e: u32) -> Q {
        let mut acc = Q::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Number of bits in numerator plus denominator; a cheap height measure.
    pub fn bits(&self) -> u64 {
        match self {
            Q::Small(n, d) => (64 - n.unsigned_abs().leading_zeros() + 64 - d.leading_zeros()) as u64,
            Q::Big(b) => b.numer().bits() + b.denom().bits(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Q::Small(n, d) => *n as f64 / *d as f64,
            Q::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn add_ref(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::Small(a, 1), Q::Small(b, 1)) => match a.checked_add(*b) {
                Some(s) if s != i64::MIN => Q::Small(s, 1),
                _ => Q::from_i128(*a as i128 + *b as i128, 1),
            },
            (Q::Small(a, b), Q::Small(c, d)) => {
                if b == d {
                    Q::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                    Q::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Q::from_big(self.to_big() + o.to_big()),
        }
    }

    fn mul_ref(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::Small(0, _), _) | (_, Q::Small(0, _)) => Q::ZERO,
            (Q::Small(a, 1), Q::Small(b, 1)) => match a.checked_mul(*b) {
                Some(p) if p != i64::MIN => Q::Small(p, 1),
                _ => Q::from_i128(*a as i128 * *b as i128, 1),
            },
            (Q::Small(a, b), Q::Small(c, d)) => {
                let g1 = gcd_i64(*a, *d);
                let g2 = gcd_i64(*c, *b);
                let n = (*a / g1) as i128 * (*c / g2) as i128;
                let m = (*b / g2) as i128 * (*d / g1) as i128;
                if fits(n) && fits(m) {
                    Q::Small(n as i64, m as i64)
                } else {
                    Q::from_i128(n, m)
                }
            }
            _ => Q::from_big(self.to_big() * o.to_big()),
        }
    }
}

impl Default for Q {
    fn default() -> Self {
        Q::ZERO
    }
}

impl From<i64> for Q {
    fn from(v: i64) -> Self {
        Q::from_i64(v)
    }
}

impl From<i32> for Q {
    fn from(v: i32) -> Self {
        Q::Small(v as i64, 1)
    }
}

impl From<BigInt> for Q {
    fn from(v: BigInt) -> Self {
        Q::from_big(BigRational::from_integer(v))
    }
}

impl From<BigRational> for Q {
    fn from(v: BigRational) -> Self {
        Q::from_big(v)
    }
}

impl Add for &Q {
    type Output = Q;
    fn add(self, o: &Q) -> Q {
        self.add_ref(o)
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        self.add_ref(&o)
    }
}

impl Sub for &Q {
    type Output = Q;
    fn sub(self, o: &Q) -> Q {
        self.add_ref(&-o)
    }
}

impl Sub for Q {
    type Output = Q;
    fn sub(self, o: Q) -> Q {
        self.add_ref(&-&o)
    }
}

impl Mul for &Q {
    type Output = Q;
    fn mul(self, o: &Q) -> Q {
        self.mul_ref(o)
    }
}

impl Mul for Q {
    type Output = Q;
    fn mul(self, o: Q) -> Q {
        self.mul_ref(&o)
    }
}

impl Div for &Q {
    type Output = Q;
    fn div(self, o: &Q) -> Q {
        self.mul_ref(&o.inv())
    }
}

impl Div for Q {
    type Output = Q;
    fn div(self, o: Q) -> Q {
        self.mul_ref(&o.inv())
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Small(n, d) => Q::Small(-n, *d),
            Q::Big(b) => Q::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        -&self
    }
}

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, o: &Q) {
        *self = self.add_ref(o);
    }
}

impl SubAssign<&Q> for Q {
    fn sub_assign(&mut self, o: &Q) {
        *self = self.add_ref(&-o);
    }
}

impl MulAssign<&Q> for Q {
    fn mul_assign(&mut self, o: &Q) {
        *self = self.mul_ref(o);
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Q::Small(a, b), Q::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(n, 1) => write!(f, "{n}"),
            Q::Small(n, d) => write!(f, "{n}/{d}"),
            Q::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Q {
    type Err = RationalParseError;

    /// Accepts `n` or `n/d` with optional leading sign on either part.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (ns, ds) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (t, None),
        };
        let n: BigInt = ns.parse().map_err(|_| RationalParseError::Malformed(s.to_string()))?;
        let d: BigInt = match ds {
            Some(ds) => ds.parse().map_err(|_| RationalParseError::Malformed(s.to_string()))?,
            None => BigInt::one(),
        };
        if d.is_zero() {
            return Err(RationalParseError::ZeroDenominator(s.to_string()));
        }
        Ok(Q::from_big(BigRational::new(n, d)))
    }
}

impl serde::Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Q {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Least common multiple of denominators, as a big integer.
pub fn lcm_denominators<'a>(vals: impl IntoIterator<Item = &'a Q>) -> BigInt {
    let mut l = BigInt::one();
    for v in vals {
        l = l.lcm(&v.denom());
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_small_and_big() {
        assert_eq!(Q::new(2, 4), Q::new(-1, -2));
        let big = Q::from_i64(i64::MAX);
        let s = &big + &Q::one();
        assert!(matches!(s, Q::Big(_)));
        let back = &s - &Q::one();
        assert_eq!(back, big);
        assert!(matches!(back, Q::Small(..)));
    }

    #[test]
    fn min_value_is_never_inline() {
        let m = Q::from_i64(i64::MIN);
        assert!(matches!(m, Q::Big(_)));
        assert_eq!(-&(-&m), m);
        let p = &Q::from_i64(i64::MIN + 1) - &Q::one();
        assert_eq!(p, m);
    }

    #[test]
    fn overflow_products() {
        let a = Q::new(i64::MAX, 3);
        let b = Q::new(5, i64::MAX - 1);
        let p = &a * &b;
        let expect = Q::from_big(a.to_big() * b.to_big());
        assert_eq!(p, expect);
        assert_eq!(&p / &b, a);
    }

    #[test]
    fn parse_and_print() {
        for s in ["0", "-3", "7/9", "-12/5", "123456789012345678901234567891/7"] {
            let q: Q = s.parse().unwrap();
            assert_eq!(q.to_string(), s);
        }
        assert_eq!("4/-6".parse::<Q>().unwrap(), Q::new(-2, 3));
        assert!(matches!("1/0".parse::<Q>(), Err(RationalParseError::ZeroDenominator(_))));
        assert!("x".parse::<Q>().is_err());
    }

    #[test]
    fn ordering_and_pow() {
        assert!(Q::new(1, 3) < Q::new(1, 2));
        assert_eq!(Q::new(-2, 3).pow(3), Q::new(-8, 27));
        assert_eq!(Q::new(5, 7).pow(0), Q::one());
    }
}
