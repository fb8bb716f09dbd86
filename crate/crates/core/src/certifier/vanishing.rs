//! Exact vanishing of a relation on structured instances.

use rayon::prelude::*;
use serde_json::json;

use super::cases::{case_registry, CaseId, Context, Sampler};
use super::{tool_version, trial_seed, CertError, CertKind, Certificate, Outcome};
use crate::polyring::Q;
use crate::relations::{evaluate_relation, Mode, Profile, RelationId};

struct Trial {
    value: Q,
    rejections: usize,
    instance: Option<serde_json::Value>,
}

/// Value of `relation` on trial `i` of `case`, without compatibility or mode checks.
pub fn trial_value(case: CaseId, relation: RelationId, profile: &Profile, seed: u64, i: u64) -> Result<Q, CertError> {
    Ok(run_trial(case, relation, profile, seed, i)?.value)
}

fn run_trial(case: CaseId, relation: RelationId, profile: &Profile, seed: u64, i: u64) -> Result<Trial, CertError> {
    let mut s = Sampler::new(trial_seed(seed, i));
    let ctx = Context::draw(profile, &mut s)?;
    let inst = case_registry().get(case).sample(&ctx, &mut s)?;
    let value = evaluate_relation(relation, profile, &inst.y, &inst.params)?;
    Ok(Trial { value, rejections: s.rejections(), instance: (i == 0).then(|| inst.to_json()) })
}

/// Evaluates `relation` on `trials` independent instances of `case` and
/// passes iff every value is exactly zero.
pub fn vanishing_certify(case: CaseId, relation: RelationId, profile: &Profile, seed: u64, trials: u64) -> Result<Certificate, CertError> {
    if !case_registry().compatible(case, relation) {
        return Err(CertError::Incompatible(case, relation));
    }
    match relation {
        RelationId::Rsupsing if profile.rsupsing_mode == Mode::Verbatim => {
            return Err(CertError::ModeExcluded("RSUPSING vanishing needs rsupsing_mode=corrected".into()))
        }
        RelationId::Qe2e2 if profile.qe2e2_mode == Mode::Verbatim => {
            return Err(CertError::ModeExcluded("QE2E2 vanishing needs qe2e2_mode=corrected".into()))
        }
        _ => {}
    }
    let results: Vec<Trial> = (0..trials).into_par_iter().map(|i| run_trial(case, relation, profile, seed, i)).collect::<Result<_, _>>()?;
    let nonzero: Vec<serde_json::Value> = results
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.value.is_zero())
        .map(|(i, t)| json!({ "trial": i, "value": t.value.to_string() }))
        .collect();
    let rejections: usize = results.iter().map(|t| t.rejections).sum();
    let outcome = if nonzero.is_empty() && trials > 0 {
        Outcome::Pass
    } else if trials == 0 {
        Outcome::Inconclusive
    } else {
        Outcome::Fail
    };
    let first = results.first().and_then(|t| t.instance.clone());
    Ok(Certificate {
        kind: CertKind::Vanishing,
        relation: Some(relation),
        profile: Some(*profile),
        case: Some(case),
        seed,
        trials,
        outcome,
        assumptions: vec![case_registry().get(case).describe().to_string()],
        evidence: json!({
            "zero_trials": trials as usize - nonzero.len(),
            "nonzero": nonzero,
            "rejections": rejections,
            "first_instance": first,
        }),
        tool_version: tool_version(),
    })
}
