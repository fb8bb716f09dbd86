//! Non-membership in the symplectic ideal via a rational parameter witness.

use std::collections::{BTreeMap, HashMap};

use serde_json::json;

use super::cases::{draw_params, Sampler};
use super::{tool_version, CertError, CertKind, Certificate, Outcome};
use crate::groebner::{reduce, GroebnerBasis};
use crate::polyring::{table, Poly, PolyError, Q};
use crate::relations::{build_relation, rsf_factors, substitute_family, Family, Profile, RelationId};

/// Fresh witnesses tried before a nonzero normal form is called inconclusive.
const WITNESS_ATTEMPTS: u64 = 16;

fn to_indices(values: &HashMap<String, Q>) -> Result<HashMap<usize, Q>, PolyError> {
    values
        .iter()
        .map(|(k, v)| table().lookup(k).map(|i| (i, v.clone())).ok_or_else(|| PolyError::UnknownSymbol(k.clone())))
        .collect()
}

/// The normal forms that must all stay nonzero: RSF is certified per factor.
fn targets(relation: RelationId, profile: &Profile, gb: &GroebnerBasis) -> Result<Vec<(String, Poly)>, CertError> {
    let polys: Vec<(String, Poly)> = if relation == RelationId::Rsf {
        let [f12, f24] = rsf_factors(profile)?;
        vec![("F12".into(), f12), ("F24".into(), f24)]
    } else {
        vec![(relation.name().to_string(), build_relation(relation, profile)?)]
    };
    polys.into_iter().map(|(l, p)| Ok((l, reduce(&p, gb)?.0))).collect()
}

fn assumptions_for(relation: RelationId) -> Vec<String> {
    if relation == RelationId::Rsf {
        vec!["I(Sp4) is prime, so a product lies in it only if a factor does".into()]
    } else {
        Vec::new()
    }
}

/// Outcome for one set of normal forms under one witness; records the first
/// surviving coefficient of each.
fn judge(nfs: &[(String, Poly)], witness: &HashMap<String, Q>) -> Result<(bool, Vec<serde_json::Value>), CertError> {
    let idx = to_indices(witness)?;
    let mut all = true;
    let mut ev = Vec::new();
    for (label, nf) in nfs {
        let sub = nf.partial_eval(&idx);
        if sub.uses_kind(crate::polyring::VarKind::Param) {
            return Err(CertError::Poly(PolyError::MissingSymbol(format!("witness leaves parameters in {label}"))));
        }
        let first = sub.leading_term().map(|(m, c)| json!({ "monomial": m.to_string(), "coefficient": c.to_string() }));
        all &= !sub.is_zero();
        ev.push(json!({ "target": label, "nf_terms": nf.len(), "remainder_terms": sub.len(), "nonzero_coefficient": first }));
    }
    Ok((all, ev))
}

fn witness_json(w: &HashMap<String, Q>) -> BTreeMap<String, String> {
    w.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
}

fn certificate(relation: Option<RelationId>, profile: Option<Profile>, seed: u64, trials: u64, outcome: Outcome, evidence: serde_json::Value) -> Certificate {
    Certificate {
        kind: CertKind::Nontriviality,
        relation,
        profile,
        case: None,
        seed,
        trials,
        outcome,
        assumptions: relation.map(assumptions_for).unwrap_or_default(),
        evidence,
        tool_version: tool_version(),
    }
}

/// Certifies that the normal forms of `polys` stay nonzero at a random
/// admissible parameter point drawn from `seed`.
pub fn nontriviality_of(polys: &[(String, Poly)], gb: &GroebnerBasis, seed: u64) -> Result<(Outcome, u64, serde_json::Value), CertError> {
    let nfs: Vec<(String, Poly)> = polys.iter().map(|(l, p)| Ok((l.clone(), reduce(p, gb)?.0))).collect::<Result<_, CertError>>()?;
    if nfs.iter().any(|(_, nf)| nf.is_zero()) {
        let members: Vec<&str> = nfs.iter().filter(|(_, nf)| nf.is_zero()).map(|(l, _)| l.as_str()).collect();
        return Ok((Outcome::Fail, 0, json!({ "members": members })));
    }
    let mut s = Sampler::new(seed);
    for attempt in 1..=WITNESS_ATTEMPTS {
        let w = draw_params(&mut s)?;
        let (ok, ev) = judge(&nfs, &w)?;
        if ok {
            return Ok((Outcome::Pass, attempt, json!({ "witness": witness_json(&w), "targets": ev })));
        }
    }
    Ok((Outcome::Inconclusive, WITNESS_ATTEMPTS, json!({ "reason": "every drawn witness annihilated the normal form" })))
}

pub fn nontriviality_certify(relation: RelationId, profile: &Profile, gb: &GroebnerBasis, seed: u64) -> Result<Certificate, CertError> {
    let polys = if relation == RelationId::Rsf {
        let [f12, f24] = rsf_factors(profile)?;
        vec![("F12".to_string(), f12), ("F24".to_string(), f24)]
    } else {
        vec![(relation.name().to_string(), build_relation(relation, profile)?)]
    };
    let (outcome, trials, evidence) = nontriviality_of(&polys, gb, seed)?;
    Ok(certificate(Some(relation), Some(*profile), seed, trials, outcome, evidence))
}

/// As `nontriviality_certify` with a caller-supplied witness, which must fix
/// every parameter occurring in the normal form.
pub fn nontriviality_with_witness(relation: RelationId, profile: &Profile, gb: &GroebnerBasis, witness: &HashMap<String, Q>) -> Result<Certificate, CertError> {
    let nfs = targets(relation, profile, gb)?;
    let (ok, ev) = judge(&nfs, witness)?;
    let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
    let evidence = json!({ "witness": witness_json(witness), "targets": ev });
    Ok(certificate(Some(relation), Some(*profile), 0, 1, outcome, evidence))
}

/// The relation with Y replaced by a family member, denominators cleared.
pub fn family_substitute(relation: RelationId, profile: &Profile, family: Family) -> Result<Poly, CertError> {
    Ok(substitute_family(&build_relation(relation, profile)?, family).0)
}

/// A family substitution compared with a quoted expression.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FamilyCheck {
    pub family: Family,
    pub computed: String,
    pub quoted: String,
    pub denominator_power: u32,
    pub matched: bool,
    /// Index transpositions of parameter blocks applied to the quoted side.
    pub relabeling: Vec<String>,
}

const BLOCK_PREFIXES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

fn transpose_block(p: &Poly, prefix: &str) -> Poly {
    let mut asg = HashMap::new();
    for (i, j) in [(1, 2), (2, 1)] {
        if let Some(v) = table().lookup(&format!("{prefix}{i}{j}")) {
            asg.insert(v, Poly::sym(&format!("{prefix}{j}{i}")));
        }
    }
    p.substitute(&asg)
}

/// Substitutes `family` into `poly` and compares with `quoted`, first
/// literally, then after transposing the indices of one parameter block.
pub fn family_check(poly: &Poly, family: Family, quoted: &Poly) -> FamilyCheck {
    let (computed, k) = substitute_family(poly, family);
    let quoted_o = quoted.with_order(computed.order());
    let mut relabeling = Vec::new();
    let mut matched = computed == quoted_o;
    if !matched {
        if let Some(pre) = BLOCK_PREFIXES.iter().find(|pre| transpose_block(&quoted_o, pre) == computed) {
            matched = true;
            relabeling.push(format!("{pre}12 <-> {pre}21"));
        }
    }
    FamilyCheck { family, computed: computed.to_string(), quoted: quoted.to_string(), denominator_power: k, matched, relabeling }
}
