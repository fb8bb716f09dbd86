//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use sympcert_core::certifier::*;
use sympcert_core::groebner::{buchberger, normal_form, reduce, refute, GroebnerBasis};
use sympcert_core::periodlab::{check_curve, CurveSpec, PeriodCheck};
use sympcert_core::polyring::{parse, MonomialOrder, Poly};
use sympcert_core::relations::*;

const GENERATOR_LISTING: [&str; 6] = [
    "-X31 X12-X41 X22+X11 X32+X21 X42",
    "-X31 X13-X41 X23+X11 X33+X21 X43-1",
    "-X31 X14-X41 X24+X11 X34+X21 X44",
    "-X32 X13-X42 X23+X12 X33+X22 X43",
    "-X32 X14-X42 X24+X12 X34+X22 X44-1",
    "-X33 X14-X43 X24+X13 X34+X23 X44",
];

const BUCHBERGER_LIMIT: Duration = Duration::from_secs(10);
const DETGTILDE_LIMIT: Duration = Duration::from_secs(600);
const VANISHING_LIMIT: Duration = Duration::from_secs(120);
const REFUTE_SMALL_LIMIT: Duration = Duration::from_secs(1);
const REFUTE_RA_LIMIT: Duration = Duration::from_secs(60);
const TAU_TOL: f64 = 1e-10;
const LEGENDRE_TOL: f64 = 1e-9;
const SCALED_DET_TOL: f64 = 1e-9;
const SPLIT_TOL: f64 = 1e-12;
const ISOGENY_TOL: f64 = 1e-10;

/// Expected (X-degree, term count) of each relation under its default profile.
const GOLDEN: [(RelationId, u32, usize); 9] = [
    (RelationId::Rsf, 2, 32),
    (RelationId::RexcmLin, 1, 4),
    (RelationId::Rexcme2, 2, 24),
    (RelationId::Qe2excm, 2, 220),
    (RelationId::Qe2e2, 4, 15120),
    (RelationId::Rsupsing, 4, 7712),
    (RelationId::Ra, 2, 52),
    (RelationId::Rexcmbad, 2, 72),
    (RelationId::Detgtilde, 4, 93971),
];

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

/// Monomials whose quoted coefficients must be among the bundled claims.
const REQUIRED_CLAIMS: [(RelationId, &[&str]); 5] = [
    (RelationId::Rexcme2, &["X13*X44"]),
    (RelationId::Qe2e2, &["X12*X13*X41*X44", "X12*X13*X42*X44", "X14^2*X42^2"]),
    (RelationId::Rsupsing, &["X12*X14*X31*X42", "X12*X31"]),
    (RelationId::Ra, &["X21*X34", "X21*X44"]),
    (RelationId::Detgtilde, &["X13^2*X31^2"]),
];

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Verdict {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_1(gb_out: &mut Option<GroebnerBasis>) -> Verdict {
    let listed: Vec<Poly> = GENERATOR_LISTING.iter().map(|s| parse(&s.replace(' ', "*")).unwrap()).collect();
    let gens = sp4_generators();
    if gens != listed {
        return Err("generators differ from the listing".into());
    }
    let start = Instant::now();
    let gb = buchberger(&gens, &Arc::new(MonomialOrder::lex())).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let gens_zero = gens.iter().all(|f| normal_form(f, &gb).unwrap().remainder.is_zero());
    let det_zero = normal_form(&det_minus_one(), &gb).unwrap().remainder.is_zero();
    let msg = format!("{} basis elements in {:.2?} (limit {:?}); NF(f_i) = 0: {gens_zero}; NF(det - 1) = 0: {det_zero}", gb.len(), t, BUCHBERGER_LIMIT);
    *gb_out = Some(gb);
    ensure(t < BUCHBERGER_LIMIT && gens_zero && det_zero, msg)
}

fn criterion_2(gb: &GroebnerBasis) -> Verdict {
    let mut bad = Vec::new();
    let mut detgtilde = None;
    for (id, deg, terms) in GOLDEN {
        let p = build_relation(id, &Profile::default_for(id)).map_err(|e| e.to_string())?;
        if p.main_degree() != deg || p.len() != terms {
            bad.push(format!("{id}: degree {} terms {}", p.main_degree(), p.len()));
        }
        if id == RelationId::Detgtilde {
            detgtilde = Some(p);
        }
    }
    let start = Instant::now();
    let (r, tel) = reduce(&detgtilde.unwrap(), gb).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let msg = format!(
        "9 relations, degrees and term counts {}; DETGTILDE reduced to {} terms over {} monomials in {:.2?} (limit {:?})",
        if bad.is_empty() { "match".to_string() } else { format!("differ: {}", bad.join("; ")) },
        r.len(),
        tel.distinct_main_monomials,
        t,
        DETGTILDE_LIMIT
    );
    ensure(bad.is_empty() && t < DETGTILDE_LIMIT, msg)
}

fn criterion_3(gb: &GroebnerBasis) -> Verdict {
    let mut total = 0;
    let mut normalized = 0;
    let mut failed = Vec::new();
    for rel in RelationId::ALL {
        let Some(file) = builtin_claims(rel) else { continue };
        let c = check_claims(&file, gb, 0).map_err(|e| e.to_string())?;
        for check in c.evidence["checks"].as_array().unwrap() {
            total += 1;
            if check["normalization"].as_array().is_some_and(|n| !n.is_empty()) {
                normalized += 1;
            }
        }
        if !c.passed() {
            failed.push(rel.to_string());
        }
    }
    for (rel, monos) in REQUIRED_CLAIMS {
        let file = builtin_claims(rel).ok_or(format!("{rel}: no bundled claims"))?;
        for m in monos {
            let want = parse(m).unwrap();
            if !file.claims.iter().any(|c| parse(&c.monomial).unwrap() == want) {
                failed.push(format!("{rel}: {m} missing"));
            }
        }
    }
    ensure(failed.is_empty(), format!("{total} claims checked, {normalized} with recorded normalization; failures: {failed:?}"))
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut failed = Vec::new();
    for (case, rel) in PAIRS {
        let profile = Profile::default_for(rel).with_overrides(&["rsupsing_mode=corrected", "qe2e2_mode=corrected"]).unwrap();
        let c = vanishing_certify(case, rel, &profile, 1, 100).map_err(|e| e.to_string())?;
        if !c.passed() || c.evidence["zero_trials"] != 100 {
            failed.push(format!("{case}/{rel}"));
        }
    }
    let t = start.elapsed();
    ensure(
        failed.is_empty() && t < VANISHING_LIMIT,
        format!("{} pairs x 100 trials at seed 1 in {:.2?} (limit {:?}); failures: {failed:?}", PAIRS.len(), t, VANISHING_LIMIT),
    )
}

fn criterion_5(gb: &GroebnerBasis) -> Verdict {
    let mut failed = Vec::new();
    for rel in RelationId::ALL {
        let c = nontriviality_certify(rel, &Profile::default_for(rel), gb, 1).map_err(|e| e.to_string())?;
        if !c.passed() {
            failed.push(format!("nontrivial {rel}"));
        }
    }
    let mut leaves = 0;
    for rel in [RelationId::Ra, RelationId::RexcmLin, RelationId::Rexcme2, RelationId::Rsupsing] {
        let c = derivation_check_with_gb(&builtin_script(rel).unwrap(), gb).map_err(|e| e.to_string())?;
        leaves += c.trials;
        if !c.passed() {
            failed.push(format!("derivation {rel}"));
        }
    }
    let [_, f24] = rsf_factors(&Profile::default_for(RelationId::Rsf)).map_err(|e| e.to_string())?;
    let rsf = family_check(&f24, Family::Sn, &parse("e12*c22*n^2 + e11*c21").unwrap());
    if !rsf.matched {
        failed.push("RSF family".into());
    }
    let bad = build_relation(RelationId::Rexcmbad, &Profile::default_for(RelationId::Rexcmbad)).unwrap();
    let quoted = parse("(d21*(p*a11 + q*a21) + d22*(r*a11 + n*a21)) * (e21*(n*c11 - r*c21) + e22*(p*c21 - q*c11))").unwrap();
    let bad = family_check(&bad, Family::Spqrn, &quoted);
    if !bad.matched {
        failed.push("REXCMBAD family".into());
    }
    ensure(
        failed.is_empty(),
        format!(
            "9 relations outside the ideal; 4 scripts, {leaves} leaves refuted; RSF/S_n = {} (relabeling {:?}); REXCMBAD/S(p,q,r,n) matched: {}; failures: {failed:?}",
            rsf.computed, rsf.relabeling, bad.matched
        ),
    )
}

fn criterion_6(gb: &GroebnerBasis) -> Verdict {
    let p = |s: &str| parse(s).unwrap();
    let start = Instant::now();
    let a = refute(&[p("x")], &[p("x")]).map_err(|e| e.to_string())?.refuted;
    let b = refute(&[p("x*y")], &[p("x"), p("y")]).map_err(|e| e.to_string())?.refuted;
    let small = start.elapsed();
    let ra = build_relation(RelationId::Ra, &Profile::default_for(RelationId::Ra)).unwrap();
    let map = coefficient_rules(&reduce(&ra, gb).unwrap().0);
    let eqs: Vec<Poly> = map.entries().iter().map(|(_, c)| c.clone()).collect();
    let neqs = [p("c11*c22 - c12*c21"), p("d11*d22 - d12*d21"), p("e11*e22 - e12*e21")];
    let start = Instant::now();
    let full = refute(&eqs, &neqs).map_err(|e| e.to_string())?.refuted;
    let t = start.elapsed();
    ensure(
        a && b && small < REFUTE_SMALL_LIMIT && full && t < REFUTE_RA_LIMIT,
        format!(
            "small systems refuted: {} in {:.2?} (limit {:?}); RA system of {} coefficients refuted: {full} in {:.2?} (limit {:?})",
            a && b,
            small,
            REFUTE_SMALL_LIMIT,
            eqs.len(),
            t,
            REFUTE_RA_LIMIT
        ),
    )
}

fn criterion_7() -> Verdict {
    let checks = [PeriodCheck::Legendre, PeriodCheck::Split, PeriodCheck::Isogeny];
    let (basis, lines) = check_curve(&CurveSpec::lemniscatic(), &checks).map_err(|e| e.to_string())?;
    let tau_err = (basis.tau() - num_complex::Complex64::i()).norm();
    let scaled = basis.to_scaled();
    let det_err = (scaled.det() - 1.0 / num_complex::Complex64::new(0.0, 2.0 * std::f64::consts::PI)).norm();
    let residual = |name: &str| lines.iter().filter(|l| l.name.starts_with(name)).map(|l| l.residual).fold(f64::NEG_INFINITY, f64::max);
    let (leg, split, iso) = (residual("legendre"), residual("split"), residual("isogeny"));
    ensure(
        tau_err < TAU_TOL && leg < LEGENDRE_TOL && det_err < SCALED_DET_TOL && split < SPLIT_TOL && iso < ISOGENY_TOL,
        format!("|tau - i| = {tau_err:.1e}; legendre {leg:.1e}; |det - 1/(2 pi i)| = {det_err:.1e}; split {split:.1e}; isogeny {iso:.1e}"),
    )
}

fn criterion_8() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 8] = [
        &["groebner", "--out", "gb.json"],
        &["reduce", "--relation", "QE2EXCM", "--gb", "gb.json", "--out", "qe2excm.nf.json"],
        &["relations", "build", "--relation", "RSUPSING", "--out", "rsupsing.json"],
        &["coeffs", "--relation", "RA", "--gb", "gb.json", "--out", "ra.coeffs.json"],
        &["certify", "vanishing", "--case", "BAD_ISOG", "--relation", "DETGTILDE", "--out", "van.json"],
        &["certify", "nontrivial", "--relation", "REXCMBAD", "--gb", "gb.json", "--out", "nontriv.json"],
        &["check", "coeffs", "--relation", "QE2E2", "--gb", "gb.json", "--out", "claims.json"],
        &["check", "derivation", "--relation", "RSUPSING", "--gb", "gb.json", "--out", "deriv.json"],
    ];
    let exe = env!("CARGO_BIN_EXE_sympcert");
    let run = |cwd: &Path, args: &[&str]| Command::new(exe).current_dir(cwd).args(args).output().map(|o| o.status.code());
    let mut failed = Vec::new();
    for args in runs {
        if run(dir.path(), args).map_err(|e| e.to_string())? != Some(0) {
            failed.push(format!("run {}", args[..2].join(" ")));
            continue;
        }
        let out = args[args.iter().position(|a| *a == "--out").unwrap() + 1];
        let manifest = format!("{out}.manifest.json");
        if run(dir.path(), &["reproduce", &manifest]).map_err(|e| e.to_string())? != Some(0) {
            failed.push(format!("reproduce {out}"));
        }
    }
    ensure(failed.is_empty(), format!("{} exact artifacts regenerated byte-identical from their manifests; failures: {failed:?}", runs.len()))
}

fn main() {
    let mut gb = None;
    let mut results: Vec<(u32, Verdict)> = vec![(1, criterion_1(&mut gb))];
    let gb = gb.unwrap_or_else(|| buchberger(&sp4_generators(), &Arc::new(MonomialOrder::lex())).unwrap());
    results.push((2, criterion_2(&gb)));
    results.push((3, criterion_3(&gb)));
    results.push((4, criterion_4()));
    results.push((5, criterion_5(&gb)));
    results.push((6, criterion_6(&gb)));
    results.push((7, criterion_7()));
    results.push((8, criterion_8()));
    let mut all = true;
    for (n, r) in &results {
        match r {
            Ok(msg) => println!("criterion {n}: PASS  {msg}"),
            Err(msg) => {
                all = false;
                println!("criterion {n}: FAIL  {msg}");
            }
        }
    }
    if !all {
        std::process::exit(1);
    }
}
