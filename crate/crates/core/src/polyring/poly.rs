use std::cmp::{Ordering, Reverse};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::monomial::Monomial;
use super::order::MonomialOrder;
use super::rational::Q;
use super::table::{table, VarKind};
use super::PolyError;

pub type Term = (Monomial, Q);

/// Products with more term pairs than this are split across threads.
const PAR_MUL_WORK: usize = 1 << 16;

/// Canonical sparse polynomial: terms strictly descending in `order`, no zero
/// coefficients, no repeated monomials.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    order: Arc<MonomialOrder>,
    terms: Vec<Term>,
}

/// The shared default (lex) order.
pub fn lex() -> Arc<MonomialOrder> {
    static LEX: OnceLock<Arc<MonomialOrder>> = OnceLock::new();
    LEX.get_or_init(|| Arc::new(MonomialOrder::lex())).clone()
}

fn sort_desc(order: &MonomialOrder, terms: &mut [Term]) {
    if order.is_fast_lex() {
        terms.sort_unstable_by_key(|t| Reverse(t.0));
    } else {
        terms.sort_by_cached_key(|t| Reverse(order.sort_key(&t.0)));
    }
}

fn par_sort_desc(order: &MonomialOrder, terms: &mut [Term]) {
    if order.is_fast_lex() {
        terms.par_sort_unstable_by(|a, b| b.0.cmp(&a.0));
    } else {
        terms.par_sort_by_cached_key(|t| Reverse(order.sort_key(&t.0)));
    }
}

/// Collapses a sorted list with possible repeats into canonical form.
fn combine_sorted(terms: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for (m, c) in terms {
        match out.last_mut() {
            Some((lm, lc)) if *lm == m => *lc += &c,
            _ => {
                if let Some((_, lc)) = out.last() {
                    if lc.is_zero() {
                        out.pop();
                    }
                }
                out.push((m, c));
            }
        }
    }
    if let Some((_, lc)) = out.last() {
        if lc.is_zero() {
            out.pop();
        }
    }
    out
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { order: lex(), terms: Vec::new() }
    }

    pub fn zero_in(order: &Arc<MonomialOrder>) -> Poly {
        Poly { order: order.clone(), terms: Vec::new() }
    }

    pub fn constant(c: Q) -> Poly {
        Self::constant_in(&lex(), c)
    }

    pub fn constant_in(order: &Arc<MonomialOrder>, c: Q) -> Poly {
        let terms = if c.is_zero() { Vec::new() } else { vec![(Monomial::one(), c)] };
        Poly { order: order.clone(), terms }
    }

    pub fn one() -> Poly {
        Self::constant(Q::one())
    }

    pub fn var(i: usize) -> Poly {
        Poly { order: lex(), terms: vec![(Monomial::var(i), Q::one())] }
    }

    /// `X_ij` for 1-based indices.
    pub fn x(i: usize, j: usize) -> Poly {
        Self::var(super::table::x(i, j))
    }

    /// Variable by name; panics on an unknown symbol (for literals).
    pub fn sym(name: &str) -> Poly {
        Self::var(super::table::var(name))
    }

    pub fn monomial(m: Monomial, c: Q) -> Poly {
        Self::from_terms(&lex(), vec![(m, c)])
    }

    /// Builds a canonical polynomial from arbitrary terms.
    pub fn from_terms(order: &Arc<MonomialOrder>, mut terms: Vec<Term>) -> Poly {
        terms.retain(|t| !t.1.is_zero());
        sort_desc(order, &mut terms);
        Poly { order: order.clone(), terms: combine_sorted(terms) }
    }

    /// Builds from terms already sorted, distinct and nonzero. Checked in debug builds.
    pub fn from_sorted_unchecked(order: &Arc<MonomialOrder>, terms: Vec<Term>) -> Poly {
        let p = Poly { order: order.clone(), terms };
        debug_assert!(p.is_canonical());
        p
    }

    fn from_map(order: &Arc<MonomialOrder>, map: FxHashMap<Monomial, Q>) -> Poly {
        let mut terms: Vec<Term> = map.into_iter().filter(|t| !t.1.is_zero()).collect();
        if terms.len() > 1 << 14 {
            par_sort_desc(order, &mut terms);
        } else {
            sort_desc(order, &mut terms);
        }
        Poly { order: order.clone(), terms }
    }

    pub fn order(&self) -> &Arc<MonomialOrder> {
        &self.order
    }

    pub fn same_order(&self, o: &Poly) -> bool {
        Arc::ptr_eq(&self.order, &o.order) || *self.order == *o.order
    }

    /// The same polynomial re-sorted under another order.
    pub fn with_order(&self, order: &Arc<MonomialOrder>) -> Poly {
        if *order == self.order {
            return Poly { order: order.clone(), terms: self.terms.clone() };
        }
        let mut terms = self.terms.clone();
        sort_desc(order, &mut terms);
        Poly { order: order.clone(), terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn lm(&self) -> Option<Monomial> {
        self.terms.first().map(|t| t.0)
    }

    pub fn lc(&self) -> Option<&Q> {
        self.terms.first().map(|t| &t.1)
    }

    /// Checks the canonical-form invariant.
    pub fn is_canonical(&self) -> bool {
        self.terms.iter().all(|t| !t.1.is_zero())
            && self.terms.windows(2).all(|w| self.order.cmp(&w[0].0, &w[1].0) == Ordering::Greater)
    }

    /// Re-canonicalizes (identity on canonical input).
    pub fn canonicalize(&self) -> Poly {
        Self::from_terms(&self.order, self.terms.clone())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn main_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.main_degree()).max().unwrap_or(0)
    }

    /// True iff every term has main-variable degree exactly `d`.
    pub fn is_main_homogeneous(&self, d: u32) -> bool {
        self.terms.iter().all(|t| t.0.main_degree() == d)
    }

    /// Symbols that occur, in table order.
    pub fn vars(&self) -> Vec<usize> {
        let mut mask = 0u64;
        for (m, _) in &self.terms {
            mask |= m.var_mask();
        }
        (0..64).filter(|i| mask >> i & 1 == 1).collect()
    }

    pub fn uses_kind(&self, kind: VarKind) -> bool {
        self.vars().into_iter().any(|i| table().kind(i) == kind)
    }

    pub fn check_same_order(&self, o: &Poly) -> Result<(), PolyError> {
        if self.same_order(o) {
            Ok(())
        } else {
            Err(PolyError::OrderMismatch(self.order.name(), o.order.name()))
        }
    }

    pub fn checked_add(&self, o: &Poly) -> Result<Poly, PolyError> {
        self.check_same_order(o)?;
        Ok(self.add_scaled(o, &Q::one()))
    }

    pub fn checked_sub(&self, o: &Poly) -> Result<Poly, PolyError> {
        self.check_same_order(o)?;
        Ok(self.add_scaled(o, &-Q::one()))
    }

    pub fn checked_mul(&self, o: &Poly) -> Result<Poly, PolyError> {
        self.check_same_order(o)?;
        Ok(self.mul_impl(o))
    }

    /// `self + s * o`, orders assumed equal.
    pub fn add_scaled(&self, o: &Poly, s: &Q) -> Poly {
        if s.is_zero() || o.is_zero() {
            return self.clone();
        }
        let ord = &self.order;
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &o.terms);
        while i < a.len() && j < b.len() {
            match ord.cmp(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0, &b[j].1 * s));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &(&b[j].1 * s);
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|t| (t.0, &t.1 * s)));
        Poly { order: ord.clone(), terms: out }
    }

    pub fn scale(&self, s: &Q) -> Poly {
        if s.is_zero() {
            return Poly::zero_in(&self.order);
        }
        Poly { order: self.order.clone(), terms: self.terms.iter().map(|t| (t.0, &t.1 * s)).collect() }
    }

    /// `s * m * self`; monomial orders are multiplicative so the sort survives.
    pub fn mul_term(&self, m: &Monomial, s: &Q) -> Poly {
        if s.is_zero() {
            return Poly::zero_in(&self.order);
        }
        Poly { order: self.order.clone(), terms: self.terms.iter().map(|t| (t.0.mul(m), &t.1 * s)).collect() }
    }

    fn mul_impl(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero_in(&self.order);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return o.mul_term(m, c).with_order_ref(&self.order);
        }
        if o.terms.len() == 1 {
            let (m, c) = &o.terms[0];
            return self.mul_term(m, c);
        }
        let (a, b) = if self.len() >= o.len() { (self, o) } else { (o, self) };
        let work = a.len() * b.len();
        if work < PAR_MUL_WORK {
            let mut map: FxHashMap<Monomial, Q> = FxHashMap::default();
            map.reserve(work.min(1 << 16));
            for (ma, ca) in &a.terms {
                for (mb, cb) in &b.terms {
                    *map.entry(ma.mul(mb)).or_default() += &(ca * cb);
                }
            }
            return Poly::from_map(&self.order, map);
        }
        let chunk = (a.len() / (4 * rayon::current_num_threads().max(1))).max(1);
        let parts: Vec<Vec<Term>> = a
            .terms
            .par_chunks(chunk)
            .map(|ch| {
                let mut map: FxHashMap<Monomial, Q> = FxHashMap::default();
                for (ma, ca) in ch {
                    for (mb, cb) in &b.terms {
                        *map.entry(ma.mul(mb)).or_default() += &(ca * cb);
                    }
                }
                map.into_iter().filter(|t| !t.1.is_zero()).collect()
            })
            .collect();
        let mut all: Vec<Term> = parts.into_iter().flatten().collect();
        par_sort_desc(&self.order, &mut all);
        Poly { order: self.order.clone(), terms: combine_sorted(all) }
    }

    fn with_order_ref(self, order: &Arc<MonomialOrder>) -> Poly {
        Poly { order: order.clone(), terms: self.terms }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant_in(&self.order, Q::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        acc
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.lc() {
            None => self.clone(),
            Some(c) if c.is_one() => self.clone(),
            Some(c) => self.scale(&c.inv()),
        }
    }

    /// Simultaneous substitution of symbols by polynomials.
    pub fn substitute(&self, assignment: &HashMap<usize, Poly>) -> Poly {
        if assignment.is_empty() {
            return self.clone();
        }
        let mut cache: HashMap<(usize, u32), Poly> = HashMap::new();
        let mut acc: FxHashMap<Monomial, Q> = FxHashMap::default();
        for (m, c) in &self.terms {
            let mut rest = Monomial::one();
            let mut factor = Poly::constant_in(&self.order, c.clone());
            for (i, e) in m.support() {
                match assignment.get(&i) {
                    Some(v) => {
                        let pw = cache.entry((i, e)).or_insert_with(|| v.with_order(&self.order).pow(e)).clone();
                        factor = factor.mul_impl(&pw);
                    }
                    None => {
                        let mut single = Monomial::one();
                        single.set(i, e);
                        rest = rest.mul(&single);
                    }
                }
            }
            for (fm, fc) in factor.terms {
                *acc.entry(fm.mul(&rest)).or_default() += &fc;
            }
        }
        Poly::from_map(&self.order, acc)
    }

    /// Substitutes rational values for some symbols, leaving the rest symbolic.
    pub fn partial_eval(&self, values: &HashMap<usize, Q>) -> Poly {
        if values.is_empty() {
            return self.clone();
        }
        let mut pw: HashMap<(usize, u32), Q> = HashMap::new();
        let mut acc: FxHashMap<Monomial, Q> = FxHashMap::default();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = *m;
            for (i, e) in m.support() {
                if let Some(v) = values.get(&i) {
                    let p = pw.entry((i, e)).or_insert_with(|| v.pow(e));
                    coef = &coef * p;
                    rest.set(i, 0);
                    if coef.is_zero() {
                        break;
                    }
                }
            }
            if !coef.is_zero() {
                *acc.entry(rest).or_default() += &coef;
            }
        }
        Poly::from_map(&self.order, acc)
    }

    /// Exact value under a full assignment.
    pub fn evaluate(&self, values: &HashMap<usize, Q>) -> Result<Q, PolyError> {
        let mut pw: HashMap<(usize, u32), Q> = HashMap::new();
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, e) in m.support() {
                let x = values.get(&i).ok_or_else(|| PolyError::MissingSymbol(table().name(i).to_string()))?;
                let p = pw.entry((i, e)).or_insert_with(|| x.pow(e));
                v = &v * p;
            }
            total += &v;
        }
        Ok(total)
    }

    /// Evaluation by symbol name, for convenience at API boundaries.
    pub fn evaluate_named(&self, values: &[(&str, Q)]) -> Result<Q, PolyError> {
        let mut map = HashMap::new();
        for (n, v) in values {
            let i = table().lookup(n).ok_or_else(|| PolyError::UnknownSymbol(n.to_string()))?;
            map.insert(i, v.clone());
        }
        self.evaluate(&map)
    }

    /// Content-free integer form: scaled so coefficients are coprime integers
    /// with positive leading coefficient. Returns the scale used.
    pub fn primitive_part(&self) -> (Q, Poly) {
        use num_integer::Integer;
        use num_traits::{One, Signed, Zero};
        if self.is_zero() {
            return (Q::one(), self.clone());
        }
        let l = super::rational::lcm_denominators(self.terms.iter().map(|t| &t.1));
        let mut g = num_bigint::BigInt::zero();
        for (_, c) in &self.terms {
            let n = c.numer() * (&l / c.denom());
            g = g.gcd(&n);
        }
        if g.is_zero() {
            g = num_bigint::BigInt::one();
        }
        let mut s = Q::from_big(num_rational::BigRational::new(l, g.abs()));
        if self.terms[0].1.signum() < 0 {
            s = -s;
        }
        (s.clone(), self.scale(&s))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.signum() < 0;
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.order.name(), self)
    }
}

fn expect_same(a: &Poly, b: &Poly) {
    if let Err(e) = a.check_same_order(b) {
        panic!("{e}");
    }
}

impl Add for &Poly {
    type Output = Poly;
    /// Panics on an order mismatch; use `checked_add` to handle it.
    fn add(self, o: &Poly) -> Poly {
        expect_same(self, o);
        self.add_scaled(o, &Q::one())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        expect_same(self, o);
        self.add_scaled(o, &-Q::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        expect_same(self, o);
        self.mul_impl(o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl From<Q> for Poly {
    fn from(c: Q) -> Self {
        Poly::constant(c)
    }
}

impl From<i64> for Poly {
    fn from(c: i64) -> Self {
        Poly::constant(Q::from(c))
    }
}

/// Sum of many polynomials through one accumulator.
pub fn sum_polys<'a>(order: &Arc<MonomialOrder>, items: impl IntoIterator<Item = &'a Poly>) -> Poly {
    let mut acc: FxHashMap<Monomial, Q> = FxHashMap::default();
    for p in items {
        for (m, c) in &p.terms {
            *acc.entry(*m).or_default() += c;
        }
    }
    Poly::from_map(order, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse::parse;
    use crate::polyring::table::var;

    #[test]
    fn canonical_construction() {
        let x = Monomial::var(var("X11"));
        let p = Poly::from_terms(&lex(), vec![(x, Q::from(2)), (Monomial::one(), Q::from(1)), (x, Q::from(-2))]);
        assert_eq!(p.to_string(), "1");
        assert!(p.is_canonical());
    }

    #[test]
    fn arithmetic_examples() {
        let f2 = parse("-X31*X13 - X41*X23 + X11*X33 + X21*X43 - 1").unwrap();
        let g = &f2 + &Poly::one();
        assert_eq!(g.len(), 4);
        assert!(g.constant_value().is_none() && g.is_main_homogeneous(2));
        let p = &Poly::sym("X11") * &Poly::sym("X33");
        assert_eq!(p.len(), 1);
        assert_eq!((&Poly::sym("X11") - &Poly::one()).pow(0), Poly::one());
    }

    #[test]
    fn substitution_examples() {
        let p = &Poly::sym("X11") * &Poly::sym("X12");
        let mut a = HashMap::new();
        a.insert(var("X11"), Poly::sym("X12"));
        assert_eq!(p.substitute(&a).to_string(), "X12^2");
        assert_eq!(p.substitute(&HashMap::new()), p);
    }

    #[test]
    fn evaluation_examples() {
        let f2 = parse("-X31*X13 - X41*X23 + X11*X33 + X21*X43 - 1").unwrap();
        let mut id = HashMap::new();
        for i in 1..=4 {
            for j in 1..=4 {
                id.insert(crate::polyring::table::x(i, j), Q::from(if i == j { 1 } else { 0 }));
            }
        }
        assert_eq!(f2.evaluate(&id).unwrap(), Q::zero());
        let zero: HashMap<usize, Q> = id.keys().map(|&k| (k, Q::zero())).collect();
        assert_eq!(f2.evaluate(&zero).unwrap(), Q::from(-1));
        assert!(matches!(f2.evaluate(&HashMap::new()), Err(PolyError::MissingSymbol(_))));
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let a = Poly::sym("X11");
        let b = a.with_order(&Arc::new(MonomialOrder::degrevlex()));
        assert!(matches!(a.checked_add(&b), Err(PolyError::OrderMismatch(..))));
    }

    #[test]
    fn parallel_product_matches_serial() {
        let a = parse("(X11 + 2*X12 - X13 + c11 + 1/3*e22 + X44)^7").unwrap();
        let b = parse("(X21 - X22 + d11 - 3)^7").unwrap();
        assert!(a.len() * b.len() > PAR_MUL_WORK);
        let mut map: FxHashMap<Monomial, Q> = FxHashMap::default();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                *map.entry(ma.mul(mb)).or_default() += &(ca * cb);
            }
        }
        assert_eq!(&a * &b, Poly::from_map(&lex(), map));
    }

    #[test]
    fn primitive_part_is_integral() {
        let p = parse("-2/3*X11 + 4/9*c11").unwrap();
        let (s, q) = p.primitive_part();
        assert_eq!(q.to_string(), "3*X11 - 2*c11");
        assert_eq!(p.scale(&s), q);
    }
}
