//! Machine-checked certificates for the relation claims: quoted coefficients,
//! exact vanishing on structured instances, non-membership witnesses and
//! replayed case analyses.

pub mod cases;
pub mod coeffs;
pub mod derivation;
pub mod factor;
pub mod nontrivial;
pub mod vanishing;

use serde::{Deserialize, Serialize};

use crate::groebner::GroebnerError;
use crate::polyring::PolyError;
use crate::relations::{Profile, RelationError, RelationId};
use crate::symmat::MatrixError;

pub use cases::{case_registry, CaseId, CaseRecipe, Instance};
pub use coeffs::{builtin_claims, check_claims, check_coeff_identity, coefficient_rules, parse_main_monomial, CheckMode, Claim, ClaimsFile, CoeffCheck, CoeffMap};
pub use derivation::{builtin_script, derivation_check, derivation_check_with_gb, DerivationScript};
pub use factor::factor_heuristic;
pub use nontrivial::{family_check, family_substitute, nontriviality_certify, nontriviality_with_witness, FamilyCheck};
pub use vanishing::{trial_value, vanishing_certify};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertError {
    #[error("case {0} is not compatible with relation {1}")]
    Incompatible(CaseId, RelationId),
    #[error("{0}")]
    ModeExcluded(String),
    #[error("sampling exceeded {0} rejections in one trial")]
    TooManyRejections(usize),
    #[error("malformed derivation script: {0}")]
    Malformed(String),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    CoeffIdentity,
    Vanishing,
    Nontriviality,
    Refutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

/// A self-contained, seed-stamped verification record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<RelationId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<CaseId>,
    pub seed: u64,
    pub trials: u64,
    pub outcome: Outcome,
    #[serde(default)]
    pub assumptions: Vec<String>,
    pub evidence: serde_json::Value,
    pub tool_version: String,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    /// Canonical pretty JSON; identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

pub fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Sub-seed for trial `i`, independent of scheduling order.
pub fn trial_seed(seed: u64, i: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(i.wrapping_add(1)))
}
