//! Packed exponent vectors.
//!
//! Exponents are stored one byte per table symbol, big-endian within seven
//! `u64` words, so symbol 0 is the top byte of word 0. Every exponent is kept
//! below 128; the spare high bit makes divisibility a borrow-free subtraction.
//! With this layout the derived `Ord` is lexicographic order in table order.

use std::fmt;

use super::table::{table, MAX_VARS, N_MAIN};

pub const WORDS: usize = MAX_VARS / 8;
const HIGH: u64 = 0x8080_8080_8080_8080;
const MAX_EXP: u32 = 127;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    w: [u64; WORDS],
}

#[inline]
fn slot(i: usize) -> (usize, u32) {
    (i / 8, ((7 - i % 8) * 8) as u32)
}

#[inline]
fn byte_sum(w: u64) -> u32 {
    let pairs = (w & 0x00FF_00FF_00FF_00FF) + ((w >> 8) & 0x00FF_00FF_00FF_00FF);
    (pairs.wrapping_mul(0x0001_0001_0001_0001) >> 48) as u32
}

impl Monomial {
    pub const ONE: Monomial = Monomial { w: [0; WORDS] };

    pub fn one() -> Self {
        Self::ONE
    }

    pub fn var(i: usize) -> Self {
        let mut m = Self::ONE;
        m.set(i, 1);
        m
    }

    pub fn from_exponents(exps: &[(usize, u32)]) -> Self {
        let mut m = Self::ONE;
        for &(i, e) in exps {
            m.set(i, m.exp(i) + e);
        }
        m
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        let (k, s) = slot(i);
        ((self.w[k] >> s) & 0xFF) as u32
    }

    #[inline]
    pub fn set(&mut self, i: usize, e: u32) {
        assert!(e <= MAX_EXP, "exponent {e} exceeds the packed limit {MAX_EXP}");
        let (k, s) = slot(i);
        self.w[k] = (self.w[k] & !(0xFF << s)) | ((e as u64) << s);
    }

    pub fn words(&self) -> &[u64; WORDS] {
        &self.w
    }

    pub fn is_one(&self) -> bool {
        self.w.iter().all(|&x| x == 0)
    }

    /// Product; panics if an exponent would reach 128.
    #[inline]
    pub fn mul(&self, o: &Monomial) -> Monomial {
        let w: [u64; WORDS] = std::array::from_fn(|k| self.w[k] + o.w[k]);
        let over = w.iter().fold(0, |acc, x| acc | x);
        assert!(over & HIGH == 0, "monomial exponent overflow");
        Monomial { w }
    }

    /// True iff `self` divides `o`.
    #[inline]
    pub fn divides(&self, o: &Monomial) -> bool {
        (0..WORDS).all(|k| ((o.w[k] | HIGH) - self.w[k]) & HIGH == HIGH)
    }

    /// Quotient `o / self`; caller guarantees divisibility.
    #[inline]
    pub fn div_by(&self, divisor: &Monomial) -> Monomial {
        debug_assert!(divisor.divides(self));
        Monomial { w: std::array::from_fn(|k| self.w[k] - divisor.w[k]) }
    }

    pub fn lcm(&self, o: &Monomial) -> Monomial {
        let mut m = Monomial::ONE;
        for i in 0..MAX_VARS {
            let e = self.exp(i).max(o.exp(i));
            if e > 0 {
                m.set(i, e);
            }
        }
        m
    }

    pub fn gcd_is_one(&self, o: &Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exp(i) == 0 || o.exp(i) == 0)
    }

    pub fn gcd(&self, o: &Monomial) -> Monomial {
        let mut m = Monomial::ONE;
        for i in 0..MAX_VARS {
            let e = self.exp(i).min(o.exp(i));
            if e > 0 {
                m.set(i, e);
            }
        }
        m
    }

    pub fn degree(&self) -> u32 {
        self.w.iter().map(|&w| byte_sum(w)).sum()
    }

    /// Total degree in the main variables `X11..X44`.
    pub fn main_degree(&self) -> u32 {
        byte_sum(self.w[0]) + byte_sum(self.w[1])
    }

    /// Degree restricted to a range of symbols.
    pub fn degree_in(&self, vars: std::ops::Range<usize>) -> u32 {
        vars.map(|i| self.exp(i)).sum()
    }

    /// The main-variable part (words 0 and 1).
    pub fn main_part(&self) -> Monomial {
        let mut m = Monomial::ONE;
        m.w[0] = self.w[0];
        m.w[1] = self.w[1];
        m
    }

    /// Everything except the main variables.
    pub fn coeff_part(&self) -> Monomial {
        let mut m = *self;
        m.w[0] = 0;
        m.w[1] = 0;
        m
    }

    pub fn main_key(&self) -> u128 {
        ((self.w[0] as u128) << 64) | self.w[1] as u128
    }

    pub fn has_main(&self) -> bool {
        self.w[0] != 0 || self.w[1] != 0
    }

    pub fn has_non_main(&self) -> bool {
        self.w[2..].iter().any(|&x| x != 0)
    }

    /// Nonzero `(symbol, exponent)` pairs in table order.
    pub fn support(&self) -> Vec<(usize, u32)> {
        let mut v = Vec::new();
        for (k, &w) in self.w.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for b in 0..8 {
                let e = ((w >> ((7 - b) * 8)) & 0xFF) as u32;
                if e > 0 {
                    v.push((k * 8 + b, e));
                }
            }
        }
        v
    }

    /// Bit mask of symbols with nonzero exponent.
    pub fn var_mask(&self) -> u64 {
        let mut mask = 0u64;
        for (i, _) in self.support() {
            mask |= 1 << i;
        }
        mask
    }

    pub fn is_main_only(&self) -> bool {
        !self.has_non_main()
    }

    pub fn n_main() -> usize {
        N_MAIN
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let t = table();
        let mut first = true;
        for (i, e) in self.support() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", t.name(i))?;
            } else {
                write!(f, "{}^{}", t.name(i), e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::table::var;

    #[test]
    fn pack_roundtrip() {
        let mut m = Monomial::one();
        for i in 0..MAX_VARS {
            m.set(i, (i % 7) as u32);
        }
        for i in 0..MAX_VARS {
            assert_eq!(m.exp(i), (i % 7) as u32);
        }
    }

    #[test]
    fn divisibility() {
        let a = Monomial::from_exponents(&[(0, 2), (20, 1)]);
        let b = Monomial::from_exponents(&[(0, 3), (20, 1), (40, 5)]);
        assert!(a.divides(&b));
        assert!(!b.divides(&a));
        assert!(Monomial::one().divides(&a));
        let q = b.div_by(&a);
        assert_eq!(q.mul(&a), b);
        let c = Monomial::from_exponents(&[(0, 127)]);
        assert!(!c.divides(&b));
        assert!(b.divides(&b));
    }

    #[test]
    fn degrees_and_parts() {
        let m = Monomial::from_exponents(&[(var("X11"), 2), (var("X44"), 1), (var("c11"), 3)]);
        assert_eq!(m.degree(), 6);
        assert_eq!(m.main_degree(), 3);
        assert_eq!(m.main_part().mul(&m.coeff_part()), m);
        assert_eq!(m.to_string(), "X11^2*X44*c11^3");
        let big = Monomial::from_exponents(&[(0, 120), (1, 120), (2, 120), (3, 120), (4, 120), (5, 120), (6, 120), (7, 120)]);
        assert_eq!(big.degree(), 960);
    }

    #[test]
    fn lex_is_word_order() {
        let x11 = Monomial::var(var("X11"));
        let x12sq = Monomial::from_exponents(&[(var("X12"), 2)]);
        let c = Monomial::var(var("c11"));
        assert!(x11 > x12sq);
        assert!(x12sq > c);
        assert!(c > Monomial::one());
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_panics() {
        let a = Monomial::from_exponents(&[(3, 100)]);
        let _ = a.mul(&a);
    }
}
