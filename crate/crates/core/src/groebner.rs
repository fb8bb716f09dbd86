//! Buchberger bases, normal forms, ideal membership and Rabinowitsch
//! refutation of parameter systems.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::polyring::io::PolyJson;
use crate::polyring::order::SortKey;
use crate::polyring::{var, Monomial, MonomialOrder, OrderKind, Poly, PolyError, Q, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroebnerError {
    #[error("no generators given")]
    Empty,
    #[error("main variable `{0}` in a parameter system")]
    MainVariable(String),
    #[error("symbol `t` is reserved for saturation")]
    ReservedSymbol,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Reduced, monic Groebner basis under a fixed order.
#[derive(Clone)]
pub struct GroebnerBasis {
    order: Arc<MonomialOrder>,
    elements: Vec<Poly>,
    source_generators: Vec<Poly>,
    lms: Vec<Monomial>,
    main_only: bool,
    memo: Arc<RwLock<FxHashMap<Monomial, Arc<Poly>>>>,
}

impl PartialEq for GroebnerBasis {
    fn eq(&self, o: &Self) -> bool {
        self.order == o.order && self.elements == o.elements && self.source_generators == o.source_generators
    }
}

impl std::fmt::Debug for GroebnerBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroebnerBasis").field("order", &self.order.name()).field("elements", &self.elements).finish()
    }
}

/// Counters emitted by every reduction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTelemetry {
    pub input_terms: usize,
    pub remainder_terms: usize,
    pub input_main_degree: u32,
    pub remainder_main_degree: u32,
    pub distinct_main_monomials: usize,
    pub reduction_steps: usize,
}

#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub remainder: Poly,
    pub quotients: Vec<Poly>,
    pub telemetry: ReductionTelemetry,
}

impl GroebnerBasis {
    fn from_parts(order: Arc<MonomialOrder>, elements: Vec<Poly>, source_generators: Vec<Poly>) -> Self {
        let lms = elements.iter().map(|g| g.lm().expect("nonzero element")).collect();
        let main_only = elements.iter().all(|g| g.terms().iter().all(|t| t.0.is_main_only()));
        GroebnerBasis { order, elements, source_generators, lms, main_only, memo: Arc::default() }
    }

    pub fn order(&self) -> &Arc<MonomialOrder> {
        &self.order
    }

    pub fn elements(&self) -> &[Poly] {
        &self.elements
    }

    pub fn source_generators(&self) -> &[Poly] {
        &self.source_generators
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True iff the basis is `{1}`.
    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].constant_value().is_some_and(|c| !c.is_zero())
    }

    /// True when no element involves a parameter; parameters then act as scalars.
    pub fn is_main_only(&self) -> bool {
        self.main_only
    }

    /// Checks the reduced-basis invariants: monic, and no term of any element
    /// divisible by another element's leading monomial.
    pub fn is_reduced(&self) -> bool {
        for (i, g) in self.elements.iter().enumerate() {
            if !g.lc().is_some_and(|c| c.is_one()) {
                return false;
            }
            for (j, lm) in self.lms.iter().enumerate() {
                if i != j && g.terms().iter().any(|t| lm.divides(&t.0)) {
                    return false;
                }
            }
        }
        true
    }

    /// Every S-polynomial reduces to zero.
    pub fn is_groebner(&self) -> bool {
        let n = self.elements.len();
        for i in 0..n {
            for j in i + 1..n {
                let s = spoly(&self.elements[i], &self.elements[j]);
                if !divide(&s, &self.elements, &self.lms, false).0.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> GroebnerJson {
        GroebnerJson {
            order: self.order.name(),
            ranking: self.order.ranking_names(),
            generators: self.source_generators.iter().map(PolyJson::from_poly).collect(),
            elements: self.elements.iter().map(PolyJson::from_poly).collect(),
        }
    }

    /// Rebuilds a persisted basis and re-verifies that it is reduced and Groebner.
    pub fn from_json(j: &GroebnerJson) -> Result<Self, GroebnerError> {
        let order = Arc::new(MonomialOrder::from_name(&j.order, j.ranking.as_deref()).map_err(PolyError::Format)?);
        let conv = |v: &[PolyJson]| -> Result<Vec<Poly>, GroebnerError> {
            v.iter().map(|p| Ok(p.to_poly()?.with_order(&order))).collect()
        };
        let elements = conv(&j.elements)?;
        let gens = conv(&j.generators)?;
        if elements.iter().any(|e| e.is_zero()) {
            return Err(PolyError::Format("zero basis element".into()).into());
        }
        let gb = GroebnerBasis::from_parts(order, elements, gens);
        if !gb.is_reduced() || !gb.is_groebner() {
            return Err(PolyError::Format("stored elements are not a reduced Groebner basis".into()).into());
        }
        Ok(gb)
    }
}

/// Persistence envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroebnerJson {
    pub order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<String>>,
    pub generators: Vec<PolyJson>,
    pub elements: Vec<PolyJson>,
}

fn spoly(f: &Poly, g: &Poly) -> Poly {
    let (lf, lg) = (f.lm().unwrap(), g.lm().unwrap());
    let l = lf.lcm(&lg);
    let a = f.mul_term(&l.div_by(&lf), &f.lc().unwrap().inv());
    let b = g.mul_term(&l.div_by(&lg), &g.lc().unwrap().inv());
    &a - &b
}

/// Division of `p` by `basis` with full tail reduction.
///
/// When no basis element involves a non-main symbol, terms sharing a main
/// monomial are reduced together with their parameter polynomial as the
/// coefficient. Otherwise every monomial is its own group. Both give the same
/// remainder as term-by-term division.
fn divide(p: &Poly, basis: &[Poly], lms: &[Monomial], want_quotients: bool) -> (Poly, Vec<Poly>, usize) {
    let order = p.order().clone();
    let grouped = basis.iter().all(|g| g.terms().iter().all(|t| t.0.is_main_only()));
    let split = |m: &Monomial| if grouped { (m.main_part(), m.coeff_part()) } else { (*m, Monomial::one()) };

    let mut work: BTreeMap<SortKey, (Monomial, Vec<(Monomial, Q)>)> = BTreeMap::new();
    for (m, c) in p.terms() {
        let (k, r) = split(m);
        work.entry(order.sort_key(&k)).or_insert_with(|| (k, Vec::new())).1.push((r, c.clone()));
    }
    let mut rem: Vec<(Monomial, Q)> = Vec::new();
    let mut quot: Vec<Vec<(Monomial, Q)>> = vec![Vec::new(); if want_quotients { basis.len() } else { 0 }];
    let mut steps = 0usize;

    while let Some((_, (key, raw))) = work.pop_last() {
        let coef = Poly::from_terms(&order, raw);
        if coef.is_zero() {
            continue;
        }
        match lms.iter().position(|lm| lm.divides(&key)) {
            None => {
                for (r, c) in coef.terms() {
                    rem.push((key.mul(r), c.clone()));
                }
            }
            Some(i) => {
                steps += 1;
                let g = &basis[i];
                let u = key.div_by(&lms[i]);
                let inv = g.lc().unwrap().inv();
                if want_quotients {
                    for (r, c) in coef.terms() {
                        quot[i].push((u.mul(r), c * &inv));
                    }
                }
                for (gm, gc) in &g.terms()[1..] {
                    let target = gm.mul(&u);
                    let (k, r0) = split(&target);
                    let s = -(gc * &inv);
                    let entry = work.entry(order.sort_key(&k)).or_insert_with(|| (k, Vec::new()));
                    for (r, c) in coef.terms() {
                        entry.1.push((r.mul(&r0), c * &s));
                    }
                }
            }
        }
    }
    // Groups are popped in descending order and a block order ranks the key
    // first, so `rem` is already sorted; canonicalize defensively anyway.
    let remainder = Poly::from_terms(&order, rem);
    let quotients = quot.into_iter().map(|q| Poly::from_terms(&order, q)).collect();
    (remainder, quotients, steps)
}

fn telemetry(p: &Poly, r: &Poly, distinct: usize, steps: usize) -> ReductionTelemetry {
    ReductionTelemetry {
        input_terms: p.len(),
        remainder_terms: r.len(),
        input_main_degree: p.main_degree(),
        remainder_main_degree: r.main_degree(),
        distinct_main_monomials: distinct,
        reduction_steps: steps,
    }
}

fn distinct_main(p: &Poly) -> usize {
    p.terms().iter().map(|t| t.0.main_key()).collect::<HashSet<_>>().len()
}

/// Full reduction with quotients: `p = sum q_i g_i + remainder`.
pub fn normal_form(p: &Poly, gb: &GroebnerBasis) -> Result<ReductionResult, GroebnerError> {
    let p = conform(p, gb)?;
    let (remainder, quotients, steps) = divide(&p, &gb.elements, &gb.lms, true);
    let t = telemetry(&p, &remainder, distinct_main(&p), steps);
    Ok(ReductionResult { remainder, quotients, telemetry: t })
}

fn conform(p: &Poly, gb: &GroebnerBasis) -> Result<Poly, GroebnerError> {
    if p.same_order(&Poly::zero_in(&gb.order)) {
        Ok(p.clone())
    } else {
        Err(PolyError::OrderMismatch(p.order().name(), gb.order.name()).into())
    }
}

/// Normal form of a single main monomial, memoised on the basis.
pub fn monomial_normal_form(m: &Monomial, gb: &GroebnerBasis) -> Arc<Poly> {
    if let Some(hit) = gb.memo.read().unwrap().get(m) {
        return hit.clone();
    }
    let p = Poly::from_sorted_unchecked(&gb.order, vec![(*m, Q::one())]);
    let r = Arc::new(divide(&p, &gb.elements, &gb.lms, false).0);
    gb.memo.write().unwrap().insert(*m, r.clone());
    r
}

/// Remainder only, via `NF(sum c_m X^m) = sum c_m NF(X^m)` over distinct main
/// monomials. Requires a parameter-free basis; otherwise falls back to
/// `normal_form`.
pub fn reduce(p: &Poly, gb: &GroebnerBasis) -> Result<(Poly, ReductionTelemetry), GroebnerError> {
    let p = conform(p, gb)?;
    if !gb.main_only {
        let (r, _, steps) = divide(&p, &gb.elements, &gb.lms, false);
        let t = telemetry(&p, &r, distinct_main(&p), steps);
        return Ok((r, t));
    }
    let mut groups: FxHashMap<Monomial, Vec<(Monomial, Q)>> = FxHashMap::default();
    for (m, c) in p.terms() {
        groups.entry(m.main_part()).or_default().push((m.coeff_part(), c.clone()));
    }
    let mut keys: Vec<Monomial> = groups.keys().copied().collect();
    keys.sort_unstable();
    let nfs: Vec<Arc<Poly>> = keys.par_iter().map(|k| monomial_normal_form(k, gb)).collect();
    let steps = nfs.iter().filter(|n| n.len() != 1 || n.terms()[0].0 != Monomial::one()).count();
    let items: Vec<(&Monomial, &Arc<Poly>)> = keys.iter().zip(nfs.iter()).collect();
    let chunk = (items.len() / (4 * rayon::current_num_threads().max(1))).max(1);
    let parts: Vec<Vec<(Monomial, Q)>> = items
        .par_chunks(chunk)
        .map(|ch| {
            let mut acc: FxHashMap<Monomial, Q> = FxHashMap::default();
            for (k, nf) in ch {
                for (rm, rc) in &groups[*k] {
                    for (nm, nc) in nf.terms() {
                        *acc.entry(nm.mul(rm)).or_default() += &(rc * nc);
                    }
                }
            }
            acc.into_iter().filter(|t| !t.1.is_zero()).collect()
        })
        .collect();
    let r = Poly::from_terms(&gb.order, parts.into_iter().flatten().collect());
    let t = telemetry(&p, &r, keys.len(), steps);
    Ok((r, t))
}

/// `p / f` when `f` divides `p` exactly.
pub fn exact_quotient(p: &Poly, f: &Poly) -> Option<Poly> {
    if f.is_zero() {
        return None;
    }
    let f = f.with_order(p.order());
    let lm = [f.lm().unwrap()];
    let (r, q, _) = divide(p, std::slice::from_ref(&f), &lm, true);
    r.is_zero().then(|| q.into_iter().next().unwrap())
}

pub fn ideal_member(p: &Poly, gb: &GroebnerBasis) -> Result<bool, GroebnerError> {
    Ok(reduce(p, gb)?.0.is_zero())
}

/// Reduced Groebner basis by Buchberger's algorithm with the product and
/// chain criteria and the normal selection strategy.
pub fn buchberger(generators: &[Poly], order: &Arc<MonomialOrder>) -> Result<GroebnerBasis, GroebnerError> {
    if generators.is_empty() {
        return Err(GroebnerError::Empty);
    }
    let sources: Vec<Poly> = generators.iter().map(|g| g.with_order(order)).collect();
    let mut basis: Vec<Poly> = Vec::new();
    let mut lms: Vec<Monomial> = Vec::new();
    let unit = |order: &Arc<MonomialOrder>, sources: Vec<Poly>| {
        GroebnerBasis::from_parts(order.clone(), vec![Poly::constant_in(order, Q::one())], sources)
    };
    // pending pairs keyed by (lcm order, newer index, older index)
    let mut pending: BTreeSet<(SortKey, usize, usize)> = BTreeSet::new();
    let mut done: HashSet<(usize, usize)> = HashSet::new();

    let add = |h: Poly, basis: &mut Vec<Poly>, lms: &mut Vec<Monomial>, pending: &mut BTreeSet<(SortKey, usize, usize)>| {
        let k = basis.len();
        let lm = h.lm().unwrap();
        for (i, li) in lms.iter().enumerate() {
            pending.insert((order.sort_key(&li.lcm(&lm)), k, i));
        }
        basis.push(h);
        lms.push(lm);
    };

    for g in &sources {
        let (r, _, _) = divide(g, &basis, &lms, false);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(unit(order, sources));
        }
        add(r.monic(), &mut basis, &mut lms, &mut pending);
    }

    while let Some(pair) = pending.pop_first() {
        let (_, j, i) = pair;
        done.insert((i, j));
        let (li, lj) = (lms[i], lms[j]);
        if li.gcd_is_one(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let chain = (0..basis.len()).any(|k| {
            k != i && k != j && lms[k].divides(&l) && {
                let a = (i.min(k), i.max(k));
                let b = (j.min(k), j.max(k));
                done.contains(&a) && done.contains(&b)
            }
        });
        if chain {
            continue;
        }
        let s = spoly(&basis[i], &basis[j]);
        let (r, _, _) = divide(&s, &basis, &lms, false);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(unit(order, sources));
        }
        add(r.monic(), &mut basis, &mut lms, &mut pending);
    }

    // minimalize
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..basis.len() {
        let redundant = (0..basis.len()).any(|j| j != i && lms[j].divides(&lms[i]) && (lms[j] != lms[i] || j < i));
        if !redundant {
            keep.push(i);
        }
    }
    let minimal: Vec<Poly> = keep.iter().map(|&i| basis[i].clone()).collect();
    // interreduce
    let mut reduced = Vec::with_capacity(minimal.len());
    for (i, g) in minimal.iter().enumerate() {
        let others: Vec<Poly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, h)| h.clone()).collect();
        let olms: Vec<Monomial> = others.iter().map(|h| h.lm().unwrap()).collect();
        let (r, _, _) = divide(g, &others, &olms, false);
        reduced.push(r.monic());
    }
    reduced.sort_by(|a, b| order.cmp(&b.lm().unwrap(), &a.lm().unwrap()));
    Ok(GroebnerBasis::from_parts(order.clone(), reduced, sources))
}

/// Outcome of a refutation attempt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefuteOutcome {
    /// true: the system `eqs = 0, neqs != 0` has no solution.
    pub refuted: bool,
    /// Reduced basis of the saturated system, printed.
    pub basis: Vec<String>,
    pub basis_digest: String,
}

/// Order used for parameter systems: graded reverse lex on the non-main block.
pub fn parameter_order() -> Arc<MonomialOrder> {
    Arc::new(MonomialOrder::lex().with_tail(OrderKind::DegRevLex))
}

/// Decides `1 in <eqs, t * prod(neqs) - 1>`. `true` proves inconsistency;
/// `false` is reported as inconclusive.
pub fn refute(eqs: &[Poly], neqs: &[Poly]) -> Result<RefuteOutcome, GroebnerError> {
    let t = var("t");
    let tab = crate::polyring::table();
    for p in eqs.iter().chain(neqs) {
        for i in p.vars() {
            if tab.kind(i) == VarKind::Main {
                return Err(GroebnerError::MainVariable(tab.name(i).to_string()));
            }
            if i == t {
                return Err(GroebnerError::ReservedSymbol);
            }
        }
    }
    let order = parameter_order();
    let mut gens: Vec<Poly> = eqs.iter().map(|e| e.with_order(&order)).filter(|e| !e.is_zero()).collect();
    let mut prod = Poly::constant_in(&order, Q::one());
    for n in neqs {
        prod = &prod * &n.with_order(&order);
    }
    let sat = &(&prod * &Poly::var(t).with_order(&order)) - &Poly::constant_in(&order, Q::one());
    gens.push(sat);
    let gb = buchberger(&gens, &order)?;
    let basis: Vec<String> = gb.elements().iter().map(|g| g.to_string()).collect();
    let basis_digest = crate::digest::sha256_hex(basis.join("\n").as_bytes());
    Ok(RefuteOutcome { refuted: gb.is_unit(), basis, basis_digest })
}
