//! Coefficient extraction by X-monomial and checks against quoted coefficients.

use std::collections::{BTreeMap, HashMap};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{tool_version, CertError, CertKind, Certificate, Outcome};
use crate::groebner::{reduce, GroebnerBasis};
use crate::polyring::{parse, table, Monomial, Poly, PolyError, Q};
use crate::relations::{build_relation, Profile, RelationId};

/// A polynomial grouped by its X-monomials, with parameter coefficients.
/// Entries are sorted by monomial, descending in the source order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMap {
    entries: Vec<(Monomial, Poly)>,
    source_order: std::sync::Arc<crate::polyring::MonomialOrder>,
}

impl CoeffMap {
    pub fn entries(&self) -> &[(Monomial, Poly)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The coefficient of `m`, zero when absent.
    pub fn get(&self, m: &Monomial) -> Poly {
        match self.entries.binary_search_by(|(k, _)| self.source_order.cmp(m, k)) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => Poly::zero_in(&self.source_order),
        }
    }

    /// `sum m * coef(m)`.
    pub fn reassemble(&self) -> Poly {
        let mut terms = Vec::new();
        for (m, c) in &self.entries {
            for (cm, cc) in c.terms() {
                terms.push((cm.mul(m), cc.clone()));
            }
        }
        Poly::from_terms(&self.source_order, terms)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries.iter().map(|(m, c)| json!({ "monomial": m.to_string(), "coefficient": c.to_string() })).collect(),
        )
    }
}

pub fn coefficient_rules(p: &Poly) -> CoeffMap {
    let order = p.order().clone();
    let mut groups: FxHashMap<Monomial, Vec<(Monomial, Q)>> = FxHashMap::default();
    for (m, c) in p.terms() {
        groups.entry(m.main_part()).or_default().push((m.coeff_part(), c.clone()));
    }
    let mut entries: Vec<(Monomial, Poly)> = groups.into_iter().map(|(k, ts)| (k, Poly::from_terms(&order, ts))).collect();
    entries.sort_by(|a, b| order.cmp(&b.0, &a.0));
    CoeffMap { entries, source_order: order }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exact,
    #[default]
    UpToSign,
}

/// One quoted coefficient. `units` lists parameter symbols whose monomials may
/// scale the two sides; `assume` substitutes symbols before comparing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub monomial: String,
    pub coefficient: String,
    #[serde(default)]
    pub mode: CheckMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub units: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub assume: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimsFile {
    pub relation: RelationId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<String>,
    pub claims: Vec<Claim>,
}

/// Result of one comparison. `normalization` records every sign, unit or
/// assumption needed to make the two sides agree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffCheck {
    pub monomial: String,
    pub claimed: String,
    pub actual: String,
    pub pass: bool,
    pub normalization: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

pub fn parse_main_monomial(s: &str) -> Result<Monomial, PolyError> {
    let p = parse(s)?;
    match p.terms() {
        [(m, c)] if c.is_one() && m.is_main_only() => Ok(*m),
        _ => Err(PolyError::Format(format!("`{s}` is not a monomial in the X variables"))),
    }
}

fn substitution(assume: &BTreeMap<String, String>) -> Result<HashMap<usize, Poly>, PolyError> {
    let mut out = HashMap::new();
    for (k, v) in assume {
        let i = table().lookup(k).ok_or_else(|| PolyError::UnknownSymbol(k.clone()))?;
        out.insert(i, parse(v)?);
    }
    Ok(out)
}

pub fn check_coeff_identity(
    map: &CoeffMap,
    monomial: &Monomial,
    claimed: &Poly,
    mode: CheckMode,
    units: &[String],
    assume: &BTreeMap<String, String>,
) -> Result<CoeffCheck, CertError> {
    let sub = substitution(assume)?;
    let raw = map.get(monomial);
    let actual = raw.substitute(&sub);
    let claimed = claimed.with_order(actual.order()).substitute(&sub);
    let mut normalization: Vec<String> = assume.iter().map(|(k, v)| format!("assume {k} = {v}")).collect();
    let mut unit_ids = Vec::new();
    for u in units {
        unit_ids.push(table().lookup(u).ok_or_else(|| PolyError::UnknownSymbol(u.clone()))?);
    }
    let pass = if actual == claimed {
        true
    } else if actual.is_zero() || claimed.is_zero() {
        false
    } else {
        match scaling(&actual, &claimed, &unit_ids) {
            Some((sign, u, v)) if mode == CheckMode::UpToSign || sign > 0 => {
                if sign < 0 {
                    normalization.push("sign -1".to_string());
                }
                if !u.is_one() || !v.is_one() {
                    normalization.push(format!("unit {v}/{u}"));
                }
                true
            }
            _ => false,
        }
    };
    let residual = (!pass).then(|| (&actual - &claimed).to_string());
    Ok(CoeffCheck { monomial: monomial.to_string(), claimed: claimed.to_string(), actual: raw.to_string(), pass, normalization, residual })
}

/// Finds `actual * u = sign * claimed * v` with `u`, `v` monomials in the
/// unit symbols (`u` and `v` coprime).
fn scaling(actual: &Poly, claimed: &Poly, units: &[usize]) -> Option<(i32, Monomial, Monomial)> {
    let (ma, ca) = actual.leading_term()?;
    let (mc, cc) = claimed.leading_term()?;
    let sign = if *ca == *cc {
        1
    } else if *ca == -cc {
        -1
    } else {
        return None;
    };
    let g = ma.gcd(mc);
    let u = mc.div_by(&g);
    let v = ma.div_by(&g);
    let only_units = |m: &Monomial| m.support().iter().all(|(i, _)| units.contains(i));
    if !only_units(&u) || !only_units(&v) {
        return None;
    }
    let lhs = actual.mul_term(&u, &Q::one());
    let rhs = claimed.mul_term(&v, &Q::from_i64(sign as i64));
    (lhs == rhs).then_some((sign, u, v))
}

/// Checks every claim of `file` against the normal form of its relation.
pub fn check_claims(file: &ClaimsFile, gb: &GroebnerBasis, seed: u64) -> Result<Certificate, CertError> {
    let profile = Profile::default_for(file.relation).with_overrides(&file.overrides)?;
    let rel = build_relation(file.relation, &profile)?;
    let (nf, _) = reduce(&rel, gb)?;
    let map = coefficient_rules(&nf);
    let mut results = Vec::new();
    let mut assumptions = Vec::new();
    for c in &file.claims {
        let m = parse_main_monomial(&c.monomial)?;
        let claimed = parse(&c.coefficient)?;
        let r = check_coeff_identity(&map, &m, &claimed, c.mode, &c.units, &c.assume)?;
        for n in &r.normalization {
            assumptions.push(format!("{}: {n}", r.monomial));
        }
        results.push(r);
    }
    let outcome = if results.iter().all(|r| r.pass) { Outcome::Pass } else { Outcome::Fail };
    Ok(Certificate {
        kind: CertKind::CoeffIdentity,
        relation: Some(file.relation),
        profile: Some(profile),
        case: None,
        seed,
        trials: results.len() as u64,
        outcome,
        assumptions,
        evidence: json!({ "checks": results }),
        tool_version: tool_version(),
    })
}

/// Bundled coefficient claims, by relation.
pub fn builtin_claims(relation: RelationId) -> Option<ClaimsFile> {
    let text = match relation {
        RelationId::RexcmLin => include_str!("claims/rexcm_lin.json"),
        RelationId::Rexcme2 => include_str!("claims/rexcme2.json"),
        RelationId::Qe2excm => include_str!("claims/qe2excm.json"),
        RelationId::Qe2e2 => include_str!("claims/qe2e2.json"),
        RelationId::Rsupsing => include_str!("claims/rsupsing.json"),
        RelationId::Ra => include_str!("claims/ra.json"),
        RelationId::Detgtilde => include_str!("claims/detgtilde.json"),
        _ => return None,
    };
    Some(serde_json::from_str(text).expect("bundled claims parse"))
}
