//! Best-effort splitting of parameter polynomials into factors.

use std::collections::HashSet;

use crate::groebner::exact_quotient;
use crate::polyring::{Monomial, Poly, Q};

/// Polynomials with more terms than this skip the pairwise binomial search.
const PAIR_SEARCH_LIMIT: usize = 64;

/// Splits off the rational content, the common monomial (one factor per
/// variable power), exact square roots and binomial divisors found among
/// pairs of terms. The product of the result is always exactly `p`.
pub fn factor_heuristic(p: &Poly) -> Vec<Poly> {
    if p.len() <= 1 {
        return vec![p.clone()];
    }
    let order = p.order().clone();
    let mut out: Vec<Poly> = Vec::new();
    let (scale, prim) = p.primitive_part();
    // p = prim / scale
    let mut constant = scale.inv();
    let g = prim.terms().iter().skip(1).fold(prim.terms()[0].0, |acc, t| acc.gcd(&t.0));
    for (v, e) in g.support() {
        out.push(Poly::monomial(Monomial::var(v), Q::one()).with_order(&order).pow(e));
    }
    let rest = divide_monomial(&prim, &g);
    let mut found = Vec::new();
    split(rest, &mut found);
    for f in found {
        if let Some(c) = f.constant_value() {
            constant = &constant * &c;
            continue;
        }
        let (f, sign) = normalize_sign(f);
        constant = &constant * &sign;
        out.push(f);
    }
    if !constant.is_one() {
        out.insert(0, Poly::constant_in(&order, constant));
    }
    let product = out.iter().fold(Poly::constant_in(&order, Q::one()), |acc, f| &acc * f);
    if product == *p {
        out
    } else {
        vec![p.clone()]
    }
}

fn divide_monomial(p: &Poly, g: &Monomial) -> Poly {
    Poly::from_sorted_unchecked(p.order(), p.terms().iter().map(|(m, c)| (m.div_by(g), c.clone())).collect())
}

fn normalize_sign(f: Poly) -> (Poly, Q) {
    if f.lc().is_some_and(|c| c.signum() < 0) {
        (-&f, Q::from_i64(-1))
    } else {
        (f, Q::one())
    }
}

fn split(f: Poly, out: &mut Vec<Poly>) {
    if f.len() <= 1 {
        out.push(f);
        return;
    }
    if f.lc().is_some_and(|c| c.signum() < 0) {
        out.push(Poly::constant_in(f.order(), Q::from_i64(-1)));
        split(-&f, out);
        return;
    }
    if let Some(r) = sqrt(&f) {
        let mut half = Vec::new();
        split(r, &mut half);
        out.extend(half.iter().cloned());
        out.extend(half);
        return;
    }
    if f.len() <= PAIR_SEARCH_LIMIT {
        let mut tried = HashSet::new();
        let t = f.terms();
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                let g = t[i].0.gcd(&t[j].0);
                let cand = Poly::from_terms(f.order(), vec![(t[i].0.div_by(&g), t[i].1.clone()), (t[j].0.div_by(&g), t[j].1.clone())]);
                let cand = cand.primitive_part().1;
                if cand.len() < 2 || cand.len() == f.len() || !tried.insert(cand.to_string()) {
                    continue;
                }
                if let Some(q) = exact_quotient(&f, &cand) {
                    split(cand, out);
                    split(q, out);
                    return;
                }
            }
        }
    }
    out.push(f);
}

/// Exact square root for a positive leading coefficient, computed term by term from the leading term.
fn sqrt(f: &Poly) -> Option<Poly> {
    let (lm, lc) = f.leading_term()?.clone();
    if f.len() < 3 {
        return None;
    }
    if lc.signum() < 0 {
        return None;
    }
    let target = f.clone();
    let c = rational_sqrt(&lc)?;
    let mut root_m = Monomial::one();
    for (v, e) in lm.support() {
        if e % 2 == 1 {
            return None;
        }
        root_m.set(v, e / 2);
    }
    let order = f.order().clone();
    let mut q = Poly::monomial(root_m, c).with_order(&order);
    let two_lt = (root_m, &q.terms()[0].1 * &Q::from_i64(2));
    for _ in 0..f.len() + 1 {
        let r = &target - &(&q * &q);
        if r.is_zero() {
            return Some(q);
        }
        let (rm, rc) = r.leading_term().unwrap().clone();
        if !two_lt.0.divides(&rm) {
            return None;
        }
        let m = rm.div_by(&two_lt.0);
        if order.cmp(&m, &root_m) != std::cmp::Ordering::Less {
            return None;
        }
        q = &q + &Poly::monomial(m, &rc / &two_lt.1).with_order(&order);
    }
    None
}

fn rational_sqrt(q: &Q) -> Option<Q> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    let r = Q::from_big(num_rational::BigRational::new(n, d));
    (&r * &r == *q).then_some(r)
}
