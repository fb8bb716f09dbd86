//! Subcommand bodies. Each builds its artifact in memory so `reproduce` can
//! regenerate and compare without touching the recorded files.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use serde_json::json;
use sympcert_core::certifier::{
    builtin_claims, builtin_script, check_claims, coefficient_rules, derivation_check_with_gb, nontriviality_certify,
    nontriviality_with_witness, vanishing_certify, Certificate, ClaimsFile, DerivationScript, Outcome,
};
use sympcert_core::digest::sha256_hex;
use sympcert_core::groebner::{buchberger, reduce, GroebnerBasis, GroebnerJson};
use sympcert_core::periodlab::{check_curve, CurveSpec, PeriodCheck};
use sympcert_core::polyring::io::PolyJson;
use sympcert_core::polyring::{parse, MonomialOrder, Q};
use sympcert_core::relations::{build_relation, sp4_generators, Mode, Profile, RelationId};

use crate::manifest::{json_close, Comparison, RunManifest, NUMERIC_TOL};
use crate::{
    Artifact, CertifyCommand, CheckArg, CheckCommand, CliError, Cli, Command, ModeArg, RelationsCommand, EXIT_FAIL, EXIT_PASS,
};

fn pretty(v: &impl serde::Serialize) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("artifact serializes");
    s.push('\n');
    s.into_bytes()
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn sp4_basis() -> Result<GroebnerBasis, CliError> {
    Ok(buchberger(&sp4_generators(), &Arc::new(MonomialOrder::lex()))?)
}

fn load_gb(path: Option<&Path>) -> Result<GroebnerBasis, CliError> {
    match path {
        Some(p) => Ok(GroebnerBasis::from_json(&read_json::<GroebnerJson>(p)?)?),
        None => sp4_basis(),
    }
}

fn profile_for(relation: RelationId, overrides: &[String]) -> Result<Profile, CliError> {
    Ok(Profile::default_for(relation).with_overrides(overrides)?)
}

fn certificate_artifact(cert: Certificate, label: String) -> Artifact {
    let summary = format!("{label}: {}\n", outcome_word(cert.outcome));
    Artifact { bytes: cert.to_json().into_bytes(), outcome: Some(cert.outcome), comparison: Comparison::Exact, seed: Some(cert.seed), summary }
}

fn outcome_word(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Fail => "fail",
        Outcome::Inconclusive => "inconclusive",
    }
}

fn exact(bytes: Vec<u8>, summary: String) -> Artifact {
    Artifact { bytes, outcome: None, comparison: Comparison::Exact, seed: None, summary }
}

fn witness_from(path: &Path) -> Result<HashMap<String, Q>, CliError> {
    let raw: HashMap<String, serde_json::Value> = read_json(path)?;
    raw.into_iter()
        .map(|(k, v)| {
            let q = match &v {
                serde_json::Value::String(s) => s.parse::<Q>().map_err(|e| CliError::Usage(format!("witness value for {k}: {e}")))?,
                serde_json::Value::Number(n) => n.as_i64().map(Q::from_i64).ok_or_else(|| CliError::Usage(format!("witness value for {k} is not an integer or string")))?,
                _ => return Err(CliError::Usage(format!("witness value for {k} must be a string or integer"))),
            };
            Ok((k, q))
        })
        .collect()
}

pub fn execute(command: &Command) -> Result<Artifact, CliError> {
    match command {
        Command::Groebner(a) => {
            let order = Arc::new(MonomialOrder::from_name(&a.order, None).map_err(CliError::Usage)?);
            let gb = buchberger(&sp4_generators(), &order)?;
            let summary = format!("basis of {} elements under {}\n", gb.len(), order.name());
            Ok(exact(pretty(&gb.to_json()), summary))
        }
        Command::Reduce(a) => {
            let gb = load_gb(a.gb.as_deref())?;
            let (source, poly, profile) = match (a.relation, &a.poly) {
                (Some(r), _) => {
                    let p = profile_for(r, &a.profile.overrides)?;
                    (r.name().to_string(), build_relation(r, &p)?, Some(p))
                }
                (None, Some(text)) => ("expression".to_string(), parse(text)?, None),
                (None, None) => return Err(CliError::Usage("give --relation or --poly".into())),
            };
            let (nf, telemetry) = reduce(&poly, &gb)?;
            let summary = format!("{source}: {} terms -> {} terms\n", telemetry.input_terms, telemetry.remainder_terms);
            let out = json!({
                "source": source,
                "profile": profile,
                "normal_form": PolyJson::from_poly(&nf),
                "digest": sha256_hex(nf.to_string().as_bytes()),
                "telemetry": telemetry,
            });
            Ok(exact(pretty(&out), summary))
        }
        Command::Relations(RelationsCommand::Build(a)) => {
            let p = profile_for(a.relation, &a.profile.overrides)?;
            let poly = build_relation(a.relation, &p)?;
            let summary = format!("{}: {} terms, X-degree {}\n", a.relation, poly.len(), poly.main_degree());
            let out = json!({
                "relation": a.relation,
                "profile": p,
                "terms": poly.len(),
                "main_degree": poly.main_degree(),
                "poly": PolyJson::from_poly(&poly),
            });
            Ok(exact(pretty(&out), summary))
        }
        Command::Coeffs(a) => {
            let gb = load_gb(a.gb.as_deref())?;
            let p = profile_for(a.relation, &a.profile.overrides)?;
            let (nf, _) = reduce(&build_relation(a.relation, &p)?, &gb)?;
            let map = coefficient_rules(&nf);
            let summary = format!("{}: {} X-monomials\n", a.relation, map.len());
            let out = json!({ "relation": a.relation, "profile": p, "coefficients": map.to_json() });
            Ok(exact(pretty(&out), summary))
        }
        Command::Certify(CertifyCommand::Vanishing(a)) => {
            let mut p = profile_for(a.relation, &[])?;
            p.rsupsing_mode = Mode::Corrected;
            p.qe2e2_mode = Mode::Corrected;
            p = p.with_overrides(&a.profile.overrides)?;
            if let Some(m) = a.mode {
                let m = match m {
                    ModeArg::Verbatim => Mode::Verbatim,
                    ModeArg::Corrected => Mode::Corrected,
                };
                p.rsupsing_mode = m;
                p.qe2e2_mode = m;
            }
            let cert = vanishing_certify(a.case, a.relation, &p, a.seed, a.trials)?;
            let zero = cert.evidence["zero_trials"].as_u64().unwrap_or(0);
            let label = format!("vanishing {} on {} ({zero}/{} zero)", a.relation, a.case, a.trials);
            Ok(certificate_artifact(cert, label))
        }
        Command::Certify(CertifyCommand::Nontrivial(a)) => {
            let gb = load_gb(a.gb.as_deref())?;
            let p = profile_for(a.relation, &a.profile.overrides)?;
            let cert = match &a.witness {
                Some(w) => nontriviality_with_witness(a.relation, &p, &gb, &witness_from(w)?)?,
                None => nontriviality_certify(a.relation, &p, &gb, a.seed)?,
            };
            Ok(certificate_artifact(cert, format!("non-triviality of {}", a.relation)))
        }
        Command::Check(CheckCommand::Coeffs(a)) => {
            let file: ClaimsFile = match (&a.claims, a.relation) {
                (Some(path), _) => read_json(path)?,
                (None, Some(r)) => builtin_claims(r).ok_or_else(|| CliError::Usage(format!("no bundled claims for {r}")))?,
                (None, None) => return Err(CliError::Usage("give --claims or --relation".into())),
            };
            let gb = load_gb(a.gb.as_deref())?;
            let cert = check_claims(&file, &gb, 0)?;
            Ok(certificate_artifact(cert, format!("coefficient claims for {}", file.relation)))
        }
        Command::Check(CheckCommand::Derivation(a)) => {
            let script = match (&a.script, a.relation) {
                (Some(path), _) => DerivationScript::from_json(&read_text(path)?)?,
                (None, Some(r)) => builtin_script(r).ok_or_else(|| CliError::Usage(format!("no bundled script for {r}")))?,
                (None, None) => return Err(CliError::Usage("give --script or --relation".into())),
            };
            let gb = load_gb(a.gb.as_deref())?;
            let cert = derivation_check_with_gb(&script, &gb)?;
            let label = match script.relation {
                Some(r) => format!("derivation for {r} ({} leaves)", cert.trials),
                None => format!("derivation ({} leaves)", cert.trials),
            };
            Ok(certificate_artifact(cert, label))
        }
        Command::Periods(a) => {
            let curve = CurveSpec::new(a.g2.clone(), a.g3.clone())?;
            let checks: Vec<PeriodCheck> = if a.check.is_empty() {
                vec![PeriodCheck::Legendre, PeriodCheck::Split, PeriodCheck::Isogeny]
            } else {
                a.check
                    .iter()
                    .map(|c| match c {
                        CheckArg::Legendre => PeriodCheck::Legendre,
                        CheckArg::Split => PeriodCheck::Split,
                        CheckArg::Isogeny => PeriodCheck::Isogeny,
                    })
                    .collect()
            };
            let (basis, lines) = check_curve(&curve, &checks)?;
            let ok = lines.iter().all(|l| l.passed());
            let mut table = format!("g2 = {}, g3 = {}\ntau = {}\n", curve.g2, curve.g3, basis.tau());
            table.push_str(&format!("{:<22} {:>12} {:>10}  result\n", "check", "residual", "tolerance"));
            for l in &lines {
                table.push_str(&format!("{:<22} {:>12.3e} {:>10.0e}  {}\n", l.name, l.residual, l.tolerance, if l.passed() { "pass" } else { "fail" }));
            }
            let out = json!({
                "g2": curve.g2.to_string(),
                "g3": curve.g3.to_string(),
                "raw": basis,
                "scaled": basis.to_scaled(),
                "checks": lines,
                "passed": ok,
            });
            Ok(Artifact {
                bytes: pretty(&out),
                outcome: Some(if ok { Outcome::Pass } else { Outcome::Fail }),
                comparison: Comparison::Numeric,
                seed: None,
                summary: table,
            })
        }
        Command::Reproduce(_) => Err(CliError::Usage("reproduce cannot be replayed".into())),
    }
}

/// Re-runs the manifest's command in memory and compares against the recorded outputs.
pub fn reproduce(path: &Path) -> Result<i32, CliError> {
    use clap::Parser;
    let m = RunManifest::load(path)?;
    let mut argv = vec!["sympcert".to_string()];
    argv.extend(m.command_line.iter().cloned());
    let mut cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Usage(format!("manifest command line: {e}")))?;
    cli.command.rebase(&m.cwd);
    if matches!(cli.command, Command::Reproduce(_)) {
        return Err(CliError::Usage("manifest records a reproduce run".into()));
    }
    let mut mismatch = Vec::new();
    for input in &m.inputs {
        let p = m.cwd.join(&input.path);
        let bytes = std::fs::read(&p).map_err(|e| CliError::io(&p, e))?;
        if sha256_hex(&bytes) != input.sha256 {
            mismatch.push(format!("input {} changed since the run", p.display()));
        }
    }
    let fresh = execute(&cli.command)?;
    for output in &m.outputs {
        let p = m.cwd.join(&output.path);
        let recorded = std::fs::read(&p).map_err(|e| CliError::io(&p, e))?;
        let same = match m.comparison {
            Comparison::Exact => recorded == fresh.bytes && sha256_hex(&recorded) == output.sha256,
            Comparison::Numeric => {
                let parse = |b: &[u8]| serde_json::from_slice::<serde_json::Value>(b).ok();
                match (parse(&recorded), parse(&fresh.bytes)) {
                    (Some(x), Some(y)) => json_close(&x, &y, NUMERIC_TOL),
                    _ => false,
                }
            }
        };
        if !same {
            mismatch.push(format!("output {} differs from the regenerated artifact", p.display()));
        }
    }
    if mismatch.is_empty() {
        eprintln!("reproduced {} output(s)", m.outputs.len());
        Ok(EXIT_PASS)
    } else {
        for line in &mismatch {
            eprintln!("{line}");
        }
        Ok(EXIT_FAIL)
    }
}
