use std::sync::OnceLock;

use sympcert_core::certifier::*;
use sympcert_core::groebner::{buchberger, reduce, GroebnerBasis};
use sympcert_core::polyring::lex;
use sympcert_core::relations::*;

fn gb() -> &'static GroebnerBasis {
    static GB: OnceLock<GroebnerBasis> = OnceLock::new();
    GB.get_or_init(|| buchberger(&sp4_generators(), &lex()).unwrap())
}

fn corrected(rel: RelationId) -> Profile {
    Profile::default_for(rel).with_overrides(&["rsupsing_mode=corrected", "qe2e2_mode=corrected"]).unwrap()
}

const PAIRS: [(CaseId, RelationId); 10] = [
    (CaseId::NonisogDiag, RelationId::Rsf),
    (CaseId::NonisogAntidiag, RelationId::Rsf),
    (CaseId::OrdExcmCenterExcm, RelationId::RexcmLin),
    (CaseId::OrdExcmCenterE2, RelationId::Rexcme2),
    (CaseId::OrdE2CenterE2, RelationId::Qe2e2),
    (CaseId::OrdE2CenterExcm, RelationId::Qe2excm),
    (CaseId::Supersingular, RelationId::Rsupsing),
    (CaseId::Arch, RelationId::Ra),
    (CaseId::BadCm, RelationId::Rexcmbad),
    (CaseId::BadIsog, RelationId::Detgtilde),
];

#[test]
fn every_compatible_pair_vanishes() {
    for (case, rel) in PAIRS {
        let c = vanishing_certify(case, rel, &corrected(rel), 1, 25).unwrap();
        assert!(c.passed(), "{case} {rel}: {}", c.evidence["nonzero"]);
        assert_eq!(c.evidence["zero_trials"], 25);
    }
}

#[test]
fn compatibility_is_one_to_one() {
    for case in CaseId::ALL {
        for rel in RelationId::ALL {
            let expected = PAIRS.contains(&(case, rel));
            assert_eq!(case_registry().compatible(case, rel), expected, "{case} {rel}");
        }
    }
}

#[test]
fn verbatim_relations_do_not_vanish_on_their_cases() {
    let p = Profile::default_for(RelationId::Rsupsing);
    assert!((0..5).any(|i| !trial_value(CaseId::Supersingular, RelationId::Rsupsing, &p, 1, i).unwrap().is_zero()));
    let p = Profile::default_for(RelationId::Qe2e2);
    assert!((0..5).any(|i| !trial_value(CaseId::OrdE2CenterE2, RelationId::Qe2e2, &p, 1, i).unwrap().is_zero()));
}

#[test]
fn cross_pairs_do_not_vanish() {
    for (case, rel) in [
        (CaseId::OrdExcmCenterE2, RelationId::RexcmLin),
        (CaseId::OrdExcmCenterExcm, RelationId::Rexcme2),
        (CaseId::OrdE2CenterE2, RelationId::Qe2excm),
        (CaseId::OrdE2CenterExcm, RelationId::Qe2e2),
    ] {
        let p = corrected(rel);
        assert!((0..10).any(|i| !trial_value(case, rel, &p, 1, i).unwrap().is_zero()), "{case} {rel}");
    }
}

#[test]
fn bundled_claims_hold() {
    for rel in RelationId::ALL {
        let Some(file) = builtin_claims(rel) else { continue };
        let c = check_claims(&file, gb(), 0).unwrap();
        assert!(c.passed(), "{rel}: {}", c.to_json());
    }
}

#[test]
fn claim_normalizations_are_recorded() {
    let c = check_claims(&builtin_claims(RelationId::Qe2excm).unwrap(), gb(), 0).unwrap();
    for check in c.evidence["checks"].as_array().unwrap() {
        let n: Vec<&str> = check["normalization"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        assert!(n.contains(&"unit c0/1"), "{n:?}");
    }
    let c = check_claims(&builtin_claims(RelationId::Qe2e2).unwrap(), gb(), 0).unwrap();
    let second = &c.evidence["checks"][1]["normalization"];
    assert_eq!(second, &serde_json::json!(["assume e22 = 0", "sign -1", "unit c0/1"]));
}

#[test]
fn bundled_scripts_refute_every_leaf() {
    for rel in [RelationId::RexcmLin, RelationId::Ra, RelationId::Rexcme2, RelationId::Rsupsing] {
        let script = builtin_script(rel).unwrap();
        let c = derivation_check_with_gb(&script, gb()).unwrap();
        assert!(c.passed(), "{rel}: {}", c.evidence["failed"]);
    }
}

#[test]
fn bundled_script_leaf_counts() {
    let leaves = |r| derivation_check_with_gb(&builtin_script(r).unwrap(), gb()).unwrap().trials;
    assert_eq!(leaves(RelationId::RexcmLin), 1);
    assert_eq!(leaves(RelationId::Ra), 3);
    assert_eq!(leaves(RelationId::Rexcme2), 3);
    assert_eq!(leaves(RelationId::Rsupsing), 4);
}

#[test]
fn coefficient_map_reassembles_normal_form() {
    for rel in [RelationId::RexcmLin, RelationId::Ra, RelationId::Qe2excm, RelationId::Rexcme2] {
        let nf = reduce(&build_relation(rel, &Profile::default_for(rel)).unwrap(), gb()).unwrap().0;
        assert_eq!(coefficient_rules(&nf).reassemble(), nf, "{rel}");
    }
}

#[test]
fn nontriviality_passes_for_every_relation() {
    for rel in RelationId::ALL {
        let c = nontriviality_certify(rel, &Profile::default_for(rel), gb(), 1).unwrap();
        assert!(c.passed(), "{rel}: {}", c.to_json());
    }
}

#[test]
fn rsf_family_matches_quoted_expression_after_relabeling() {
    let [_, f24] = rsf_factors(&Profile::default_for(RelationId::Rsf)).unwrap();
    let quoted = sympcert_core::polyring::parse("e12*c22*n^2 + e11*c21").unwrap();
    let c = family_check(&f24, Family::Sn, &quoted);
    assert!(c.matched, "{}", c.computed);
    let computed = sympcert_core::polyring::parse(&c.computed).unwrap();
    assert_eq!(computed, sympcert_core::polyring::parse("e12*c22*n^2 + e11*c12").unwrap());
    assert_eq!(c.relabeling, vec!["c12 <-> c21"]);
}

#[test]
fn rexcmbad_family_product_formula() {
    let rel = build_relation(RelationId::Rexcmbad, &Profile::default_for(RelationId::Rexcmbad)).unwrap();
    let quoted = sympcert_core::polyring::parse(
        "(d21*(p*a11 + q*a21) + d22*(r*a11 + n*a21)) * (e21*(n*c11 - r*c21) + e22*(p*c21 - q*c11))",
    )
    .unwrap();
    let c = family_check(&rel, Family::Spqrn, &quoted);
    assert!(c.matched, "{}", c.computed);
    assert!(c.relabeling.is_empty());
}

/// Evaluates the expanded symbolic relation at a sampled instance, bypassing
/// the rational pipeline that `vanishing_certify` uses.
#[test]
fn expanded_relations_vanish_on_sampled_instances() {
    use std::collections::HashMap;
    use sympcert_core::certifier::cases::{Context, Sampler};
    use sympcert_core::polyring::{var, x};
    for (case, rel) in PAIRS {
        let profile = corrected(rel);
        let poly = build_relation(rel, &profile).unwrap();
        for i in 0..3 {
            let mut s = Sampler::new(trial_seed(7, i));
            let ctx = Context::draw(&profile, &mut s).unwrap();
            let inst = case_registry().get(case).sample(&ctx, &mut s).unwrap();
            let mut pt: HashMap<usize, _> = inst.params.iter().map(|(k, v)| (var(k), v.clone())).collect();
            for r in 0..4 {
                for c in 0..4 {
                    pt.insert(x(r + 1, c + 1), inst.y.get(r, c).clone());
                }
            }
            let val = poly.partial_eval(&pt);
            assert!(val.is_zero(), "{case} {rel}: {val}");
        }
    }
}

#[test]
fn rexcme2_rejects_generic_phi0() {
    let p = corrected(RelationId::Rexcme2).with_overrides(&["phi0=generic"]).unwrap();
    assert!(build_relation(RelationId::Rexcme2, &p).is_err());
    assert!(vanishing_certify(CaseId::OrdExcmCenterE2, RelationId::Rexcme2, &p, 1, 1).is_err());
}
