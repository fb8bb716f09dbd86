//! Replay of case analyses: every leaf of a split tree must be refuted.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::coeffs::{coefficient_rules, parse_main_monomial, CoeffMap};
use super::{tool_version, CertError, CertKind, Certificate, Outcome};
use crate::groebner::{reduce, refute, GroebnerBasis};
use crate::polyring::{parse, Poly};
use crate::relations::{build_relation, Profile, RelationId};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    /// X-monomials whose coefficients are set to zero.
    #[serde(default)]
    pub monomials: Vec<String>,
    #[serde(default)]
    pub eqs: Vec<String>,
    #[serde(default)]
    pub neqs: Vec<String>,
}

/// A split on `atom = 0` versus `atom != 0`, or a leaf. Any node may add
/// constraints that hold in its whole subtree.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Node {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero: Option<Box<Node>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonzero: Option<Box<Node>>,
    /// More X-monomials whose coefficients vanish.
    #[serde(default, rename = "use", skip_serializing_if = "Vec::is_empty")]
    pub use_monomials: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eqs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub neqs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationScript {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<RelationId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<String>,
    #[serde(default)]
    pub hypotheses: Hypotheses,
    #[serde(default)]
    pub tree: Node,
}

impl DerivationScript {
    pub fn from_json(s: &str) -> Result<Self, CertError> {
        serde_json::from_str(s).map_err(|e| CertError::Malformed(e.to_string()))
    }

    pub fn profile(&self) -> Result<Option<Profile>, CertError> {
        Ok(match self.relation {
            Some(r) => Some(Profile::default_for(r).with_overrides(&self.profile)?),
            None => None,
        })
    }
}

struct Leaf {
    path: String,
    eqs: Vec<Poly>,
    neqs: Vec<Poly>,
}

fn coeffs_of(names: &[String], map: Option<&CoeffMap>) -> Result<Vec<Poly>, CertError> {
    if names.is_empty() {
        return Ok(Vec::new());
    }
    let map = map.ok_or_else(|| CertError::Malformed("monomial hypotheses need a relation".into()))?;
    names.iter().map(|m| Ok(map.get(&parse_main_monomial(m)?))).collect()
}

fn parse_all(v: &[String]) -> Result<Vec<Poly>, CertError> {
    v.iter().map(|s| Ok(parse(s)?)).collect()
}

fn collect(node: &Node, path: String, eqs: Vec<Poly>, neqs: Vec<Poly>, map: Option<&CoeffMap>, out: &mut Vec<Leaf>) -> Result<(), CertError> {
    let mut eqs = eqs;
    let mut neqs = neqs;
    eqs.extend(coeffs_of(&node.use_monomials, map)?);
    eqs.extend(parse_all(&node.eqs)?);
    neqs.extend(parse_all(&node.neqs)?);
    match (&node.split, &node.zero, &node.nonzero) {
        (None, None, None) => {
            out.push(Leaf { path: if path.is_empty() { "root".into() } else { path }, eqs, neqs });
            Ok(())
        }
        (Some(atom), Some(z), Some(nz)) => {
            let a = parse(atom)?;
            let sep = if path.is_empty() { "" } else { " / " };
            let mut ze = eqs.clone();
            ze.push(a.clone());
            collect(z, format!("{path}{sep}{atom} = 0"), ze, neqs.clone(), map, out)?;
            let mut nn = neqs;
            nn.push(a);
            collect(nz, format!("{path}{sep}{atom} != 0"), eqs, nn, map, out)
        }
        _ => Err(CertError::Malformed(format!("node at `{path}` must have split, zero and nonzero together"))),
    }
}

/// Refutes every leaf; passes iff all leaves are contradictory.
pub fn derivation_check(script: &DerivationScript, map: Option<&CoeffMap>) -> Result<Certificate, CertError> {
    let h = &script.hypotheses;
    let mut eqs = coeffs_of(&h.monomials, map)?;
    eqs.extend(parse_all(&h.eqs)?);
    let neqs = parse_all(&h.neqs)?;
    let mut leaves = Vec::new();
    collect(&script.tree, String::new(), eqs, neqs, map, &mut leaves)?;
    let results: Vec<(String, crate::groebner::RefuteOutcome)> =
        leaves.par_iter().map(|l| Ok((l.path.clone(), refute(&l.eqs, &l.neqs)?))).collect::<Result<_, CertError>>()?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.1.refuted).map(|r| r.0.as_str()).collect();
    let outcome = if failed.is_empty() { Outcome::Pass } else { Outcome::Fail };
    let leaves_json: Vec<serde_json::Value> = results
        .iter()
        .map(|(p, r)| {
            if r.refuted {
                json!({ "path": p, "refuted": true, "basis_digest": r.basis_digest })
            } else {
                json!({ "path": p, "refuted": false, "basis_digest": r.basis_digest, "basis": r.basis })
            }
        })
        .collect();
    Ok(Certificate {
        kind: CertKind::Refutation,
        relation: script.relation,
        profile: script.profile()?,
        case: None,
        seed: 0,
        trials: results.len() as u64,
        outcome,
        assumptions: Vec::new(),
        evidence: json!({ "leaves": leaves_json, "failed": failed }),
        tool_version: tool_version(),
    })
}

/// Builds the coefficient map of the script's relation and checks it.
pub fn derivation_check_with_gb(script: &DerivationScript, gb: &GroebnerBasis) -> Result<Certificate, CertError> {
    let map = match (script.relation, script.profile()?) {
        (Some(r), Some(p)) => Some(coefficient_rules(&reduce(&build_relation(r, &p)?, gb)?.0)),
        _ => None,
    };
    derivation_check(script, map.as_ref())
}

/// Bundled case-analysis scripts, by relation.
pub fn builtin_script(relation: RelationId) -> Option<DerivationScript> {
    let text = match relation {
        RelationId::RexcmLin => include_str!("scripts/rexcm_lin.json"),
        RelationId::Ra => include_str!("scripts/ra.json"),
        RelationId::Rexcme2 => include_str!("scripts/rexcme2.json"),
        RelationId::Rsupsing => include_str!("scripts/rsupsing.json"),
        _ => return None,
    };
    Some(DerivationScript::from_json(text).expect("bundled script parses"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_only_script() {
        let s = DerivationScript::from_json(r#"{"hypotheses":{"eqs":["x"],"neqs":["x"]}}"#).unwrap();
        let c = derivation_check(&s, None).unwrap();
        assert!(c.passed());
        assert_eq!(c.trials, 1);
    }

    #[test]
    fn split_tree_paths() {
        let s = DerivationScript::from_json(
            r#"{"hypotheses":{"eqs":["x^2 - x*y","y^2"],"neqs":["x"]},
                "tree":{"split":"y","zero":{},"nonzero":{}}}"#,
        )
        .unwrap();
        let c = derivation_check(&s, None).unwrap();
        assert!(c.passed(), "{}", c.to_json());
        assert_eq!(c.trials, 2);
    }

    #[test]
    fn surviving_leaf_is_reported() {
        let s = DerivationScript::from_json(r#"{"hypotheses":{"eqs":["x*y"]},"tree":{"split":"x","zero":{},"nonzero":{}}}"#).unwrap();
        let c = derivation_check(&s, None).unwrap();
        assert_eq!(c.outcome, Outcome::Fail);
        assert_eq!(c.evidence["failed"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn half_split_is_malformed() {
        let s = DerivationScript::from_json(r#"{"tree":{"split":"x","zero":{}}}"#).unwrap();
        assert!(matches!(derivation_check(&s, None), Err(CertError::Malformed(_))));
    }

    #[test]
    fn monomials_need_a_map() {
        let s = DerivationScript::from_json(r#"{"hypotheses":{"monomials":["X13"]}}"#).unwrap();
        assert!(matches!(derivation_check(&s, None), Err(CertError::Malformed(_))));
    }
}
