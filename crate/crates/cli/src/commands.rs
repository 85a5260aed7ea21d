//! One function per subcommand. Each returns a [`RunReport`]; errors are
//! usage errors.

use anyhow::{anyhow, bail, Context, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

use nullcert::certify::{
    applies_to_composite, arrangements, certificate_applies, check_search_preconditions, describe_integer, search_certificate,
    verify_certificate, CertFamily, Certificate, FactorMode, SearchConfig, SearchOutcome, SeqMode,
};
use nullcert::poly::json::{Coefficient, JsonCoeff};
use nullcert::sequencing::{
    brute_force_sequence, exhaustive_type_check, format_elements, is_t_weak_sequencing, subset_type, OracleMode,
    Subset, SweepConfig, TypeVector,
};
use nullcert::weakseq::{
    assemble_weak_sequencing, tail_types, verify_tail_certificate, weak_certificate_search, TailSource,
    TailStore, WeakOutcome,
};
use nullcert::{Error, GroupDescriptor, GroupElement, SemidirectGroup};

use crate::report::{RunReport, Verdict};
use crate::tables::{derived_table, join, read_json, tail_certificates, write_json};

/// Builds a concrete group from a family name or a descriptor file.
pub fn parse_group(name: &str, p: Option<u64>, r: Option<u64>, e: Option<usize>) -> Result<SemidirectGroup> {
    if name.ends_with(".json") {
        let (v, _) = read_json(Path::new(name))?;
        let d: GroupDescriptor = serde_json::from_value(v).context("group descriptor")?;
        return Ok(d.build()?);
    }
    let p = p.ok_or_else(|| anyhow!("--p is required for group {name}"))?;
    let d = match name.to_ascii_lowercase().as_str() {
        "d2p" | "dihedral" => GroupDescriptor::Dihedral { p },
        "g3p" => GroupDescriptor::G3p { p, r },
        "direct" | "prod" => GroupDescriptor::Direct { p, e: e.unwrap_or(2) },
        other => bail!("unknown group {other:?}"),
    };
    Ok(d.build()?)
}

/// A certificate family; `custom` needs a descriptor file.
pub fn parse_family(name: &str, e: Option<usize>) -> Result<CertFamily> {
    if name.ends_with(".json") {
        return Ok(CertFamily::from_group(&parse_group(name, None, None, None)?));
    }
    Ok(CertFamily::parse(name, e)?)
}

/// `5`, `2..10` (inclusive) or `6,7,9`.
pub fn parse_range(text: &str) -> Result<Vec<usize>> {
    let bad = || anyhow!("cannot read {text:?} as a number, a range a..b or a list");
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn outcome_json(o: &SearchOutcome) -> (Verdict, Value) {
    match o {
        SearchOutcome::Found(c) => (
            Verdict::Verified,
            json!({
                "certificate": c.to_json(),
                "factorization": factorization(&c.coefficient),
                "linear": c.mode == SeqMode::Linear,
            }),
        ),
        SearchOutcome::Exhausted { arrangements } => (
            Verdict::Mismatch,
            json!({"exhausted": true, "arrangements": arrangements}),
        ),
        SearchOutcome::BudgetExceeded { arrangements, reason } => (
            Verdict::Incomplete,
            json!({"arrangements": arrangements, "reason": reason}),
        ),
    }
}

fn factorization(c: &Coefficient) -> String {
    match c {
        Coefficient::Integer(n) => describe_integer(n),
        other => other.to_string(),
    }
}

pub fn certify(
    command: &[String],
    family: &CertFamily,
    lambda: &TypeVector,
    mode: SeqMode,
    factor_mode: FactorMode,
    cfg: &SearchConfig,
    out: Option<&Path>,
) -> Result<RunReport> {
    let mut report = RunReport::new(command, format!("family {family}"));
    let outcome = search_certificate(family, lambda, mode, factor_mode, cfg)?;
    let (verdict, detail) = outcome_json(&outcome);
    if let (Some(path), SearchOutcome::Found(c)) = (out, &outcome) {
        let bytes = write_json(path, &c.to_json())?;
        report.digest(path.display().to_string(), &bytes);
    }
    report.push(format!("({})", join(&lambda.0)), verdict, detail);
    Ok(report)
}

/// Checks certificate files. A structurally invalid or vanishing certificate
/// gets a replacement found by search when `replace` is set.
pub fn verify(command: &[String], paths: &[PathBuf], replace: bool, cfg: &SearchConfig) -> Result<RunReport> {
    let mut report = RunReport::new(command, "certificate files");
    for path in paths {
        let (v, bytes) = read_json(path)?;
        report.digest(path.display().to_string(), &bytes);
        let id = path.display().to_string();
        if v.get("t").is_some() || v.get("rows").is_some() {
            for c in tail_certificates(&v)? {
                let (ok, recomputed) = verify_tail_certificate(&c)?;
                report.push(
                    format!("{id} ({}) t={} abar={}", join(&c.lambda.0), c.t, c.abar),
                    if ok { Verdict::Verified } else { Verdict::Mismatch },
                    json!({"recomputed": recomputed.to_json(), "factorization": factorization(&recomputed)}),
                );
            }
            continue;
        }
        let cert = Certificate::from_json(&v)?;
        let r = verify_certificate(&cert)?;
        let mut detail = json!({
            "valid": r.valid,
            "structurally_invalid": r.structurally_invalid,
            "factor_count": r.factor_count,
            "recomputed": r.recomputed.to_json(),
            "factorization": factorization(&r.recomputed),
            "bad_primes": r.bad_primes.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "notes": r.notes,
        });
        if !r.valid && replace && (r.structurally_invalid || r.recomputed.is_zero()) {
            let outcome = match check_search_preconditions(&cert.family, &cert.lambda) {
                Ok(()) => {
                    // the file's own arrangement first
                    let mut cfg = cfg.clone();
                    if cfg.arrangements.is_none() {
                        let mut order = vec![cert.a.clone()];
                        order.extend(arrangements(&cert.lambda).into_iter().filter(|a| *a != cert.a));
                        cfg.arrangements = Some(order);
                    }
                    Some(search_certificate(&cert.family, &cert.lambda, cert.mode, cert.factor_mode, &cfg)?)
                }
                Err(_) => None,
            };
            if let Some(o) = outcome {
                detail["replacement"] = outcome_json(&o).1;
            }
        }
        report.push(id, if r.valid { Verdict::Verified } else { Verdict::Mismatch }, detail);
    }
    Ok(report)
}

/// Sizes 4 and 5 carry no claim for `e = 3` and are skipped.
fn excluded_size(family: &CertFamily, k: usize) -> bool {
    family.e() == 3 && matches!(family, CertFamily::G3p | CertFamily::Direct { .. }) && (k == 4 || k == 5)
}

#[allow(clippy::too_many_arguments)]
pub fn sweep(
    command: &[String],
    family: &CertFamily,
    ks: &[usize],
    mode: SeqMode,
    factor_mode: FactorMode,
    cfg: &SearchConfig,
    out: Option<&Path>,
    table: Option<&str>,
) -> Result<RunReport> {
    let mut report = RunReport::new(command, format!("family {family}, mode {}", mode.as_str()));
    let e = family.e();
    let mut jobs = Vec::new();
    for &k in ks {
        for lambda in TypeVector::all(e, k) {
            jobs.push((k, lambda));
        }
    }
    let results: Vec<(String, Verdict, Value, Option<Certificate>)> = jobs
        .par_iter()
        .map(|(k, lambda)| {
            let id = format!("({})", join(&lambda.0));
            if excluded_size(family, *k) {
                return (id, Verdict::Skipped, json!({"reason": format!("k = {k} is excluded for |H| = 3")}), None);
            }
            if let Err(err) = check_search_preconditions(family, lambda) {
                let mut d = json!({"reason": err.to_string()});
                if mode == SeqMode::Linear && lambda.get(0) == *k {
                    d["linear"] = json!("not guaranteed: s_k is the sum of the elements and can be the identity");
                }
                return (id, Verdict::Skipped, d, None);
            }
            match search_certificate(family, lambda, mode, factor_mode, cfg) {
                Ok(o) => {
                    let (v, d) = outcome_json(&o);
                    (id, v, d, o.certificate().cloned())
                }
                Err(Error::BudgetExceeded(r)) => (id, Verdict::Incomplete, json!({"reason": r}), None),
                Err(err) => (id, Verdict::Error, json!({"reason": err.to_string()}), None),
            }
        })
        .collect();
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for (id, verdict, detail, cert) in results {
        match (&cert, verdict) {
            (Some(c), _) => rows.push(c.to_json()),
            (None, Verdict::Skipped) => {}
            (None, _) => missing.push(json!({"lambda": parse_id(&id), "reason": detail.get("reason").cloned().unwrap_or(json!("not found"))})),
        }
        report.push(id, verdict, detail);
    }
    if let Some(path) = out {
        let name = table
            .map(str::to_string)
            .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
            .unwrap_or_default();
        let mut extra = Map::new();
        extra.insert("mode".into(), json!(mode.as_str()));
        extra.insert("factor_mode".into(), json!(factor_mode.as_str()));
        extra.insert("k".into(), json!(ks));
        let v = derived_table(&name, family, "sequencing", extra, rows, missing);
        let bytes = write_json(path, &v)?;
        report.digest(path.display().to_string(), &bytes);
    }
    Ok(report)
}

fn parse_id(id: &str) -> Vec<usize> {
    id.trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .filter_map(|x| x.trim().parse().ok())
        .collect()
}

/// What the oracle is asked about.
#[derive(Debug, Clone)]
pub enum OracleTarget {
    Subset(Subset),
    /// Every subset of each listed type.
    Types(Vec<TypeVector>),
    /// `count` random subsets of size `k`.
    Sample { k: usize, count: usize, seed: u64 },
}

/// Random `k`-subsets of `G \ {id}`, reproducible from `seed`.
pub fn sample_subsets(g: &SemidirectGroup, k: usize, count: usize, seed: u64) -> Result<Vec<Subset>> {
    let mut pool: Vec<GroupElement> = g.elements().into_iter().filter(|&u| u != g.identity()).collect();
    if k > pool.len() {
        bail!("k = {k} exceeds |G| - 1 = {}", pool.len());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            pool.shuffle(&mut rng);
            Ok(Subset::new(g, pool[..k].to_vec())?)
        })
        .collect()
}

fn oracle_mode(mode: &str, t: Option<usize>) -> Result<OracleMode> {
    Ok(match (mode, t) {
        (_, Some(t)) => OracleMode::TWeak(t),
        ("linear", None) => OracleMode::Linear,
        ("any" | "sequencing", None) => OracleMode::Any,
        (other, None) => bail!("unknown oracle mode {other:?}"),
    })
}

/// Linear failures are expected when every element lies in the normal
/// subgroup and the elements sum to zero.
fn explained_linear_failure(g: &SemidirectGroup, s: &Subset) -> bool {
    let id = g.h().identity();
    s.elements().iter().all(|u| u.a == id) && s.elements().iter().map(|u| u.x).sum::<u64>() % g.p() == 0
}

fn certified_by(certs: &[(String, Certificate)], g: &SemidirectGroup, lambda: &TypeVector) -> Vec<String> {
    certs
        .iter()
        .filter(|(_, c)| &c.lambda == lambda && certificate_applies(c, g))
        .map(|(n, _)| n.clone())
        .collect()
}

pub fn load_certificates(paths: &[PathBuf], report: &mut RunReport) -> Result<Vec<(String, Certificate)>> {
    let mut out = Vec::new();
    for path in paths {
        let (v, bytes) = read_json(path)?;
        report.digest(path.display().to_string(), &bytes);
        let name = path.display().to_string();
        match v.get("rows").and_then(Value::as_array) {
            Some(rows) => {
                for r in rows {
                    out.push((name.clone(), Certificate::from_json(r)?));
                }
            }
            None => out.push((name, Certificate::from_json(&v)?)),
        }
    }
    Ok(out)
}

pub fn oracle(
    command: &[String],
    g: &SemidirectGroup,
    target: OracleTarget,
    mode: &str,
    t: Option<usize>,
    sweep: &SweepConfig,
    cert_paths: &[PathBuf],
) -> Result<RunReport> {
    let omode = oracle_mode(mode, t)?;
    let mut report = RunReport::new(command, format!("group {}", descriptor_text(g)));
    let certs = load_certificates(cert_paths, &mut report)?;
    let single = |report: &mut RunReport, s: &Subset| -> Result<()> {
        let found = brute_force_sequence(g, s, omode, sweep.cap.max(s.len()))?;
        let lambda = subset_type(g, s);
        let explained = found.is_none() && omode == OracleMode::Linear && explained_linear_failure(g, s);
        let verdict = match (&found, explained) {
            (Some(_), _) => Verdict::Verified,
            (None, true) => Verdict::Skipped,
            (None, false) => Verdict::Mismatch,
        };
        report.push(
            format_elements(&s.sorted()),
            verdict,
            json!({
                "lambda": lambda.0,
                "ordering": found.as_ref().map(|o| format_elements(o)),
                "explained": explained,
                "certified_by": certified_by(&certs, g, &lambda),
            }),
        );
        Ok(())
    };
    match target {
        OracleTarget::Subset(s) => single(&mut report, &s)?,
        OracleTarget::Sample { k, count, seed } => {
            for s in sample_subsets(g, k, count, seed)? {
                single(&mut report, &s)?;
            }
        }
        OracleTarget::Types(types) => {
            let results: Vec<_> = types
                .par_iter()
                .map(|lambda| (lambda, exhaustive_type_check(g, lambda, omode, sweep)))
                .collect();
            for (lambda, r) in results {
                let id = format!("({})", join(&lambda.0));
                match r {
                    Ok(tr) => {
                        let unexplained = if omode == OracleMode::Linear && lambda.get(g.h().identity()) == lambda.k() {
                            // only zero-sum subsets of the normal subgroup may fail
                            tr.failures
                                .iter()
                                .filter(|f| {
                                    Subset::parse(g, f).map(|s| !explained_linear_failure(g, &s)).unwrap_or(true)
                                })
                                .count()
                        } else {
                            tr.unsequenceable
                        };
                        let verdict = if unexplained == 0 { Verdict::Verified } else { Verdict::Mismatch };
                        let mut d = serde_json::to_value(&tr)?;
                        d["certified_by"] = json!(certified_by(&certs, g, lambda));
                        report.push(id, verdict, d);
                    }
                    Err(Error::BudgetExceeded(r)) => report.push(id, Verdict::Incomplete, json!({"reason": r})),
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    Ok(report)
}

fn descriptor_text(g: &SemidirectGroup) -> String {
    serde_json::to_string(&g.descriptor()).unwrap_or_default()
}

#[allow(clippy::too_many_arguments)]
pub fn weak_certify(
    command: &[String],
    family: &CertFamily,
    ts: &[usize],
    tail_lambda: Option<&TypeVector>,
    abar: Option<usize>,
    factor_mode: FactorMode,
    cfg: &SearchConfig,
    out: Option<&Path>,
    table: Option<&str>,
) -> Result<RunReport> {
    let mut report = RunReport::new(command, format!("family {family}, weak tails"));
    let e = family.e();
    let mut jobs = Vec::new();
    for &t in ts {
        let abars: Vec<usize> = match abar {
            Some(a) => vec![a],
            None => (0..e).collect(),
        };
        for a in abars {
            match tail_lambda {
                Some(l) => jobs.push((t, a, l.clone())),
                None => jobs.extend(tail_types(e, t, a).into_iter().map(|l| (t, a, l))),
            }
        }
    }
    let results: Vec<_> = jobs
        .par_iter()
        .map(|(t, a, l)| weak_certificate_search(family, l, *a, *t, factor_mode, cfg))
        .collect();
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for ((t, a, l), r) in jobs.iter().zip(results) {
        let id = format!("({}) t={t} abar={a}", join(&l.0));
        let miss = |reason: &str| json!({"lambda": l.0, "t": t, "abar": a, "reason": reason});
        match r {
            Ok(Some(c)) => {
                rows.push(c.to_json());
                report.push(
                    id,
                    Verdict::Verified,
                    json!({"certificate": c.to_json(), "factorization": factorization(&c.coefficient)}),
                );
            }
            Ok(None) => {
                let m = miss("no arrangement has a nonzero coefficient");
                missing.push(m.clone());
                report.push(id, Verdict::Mismatch, m);
            }
            Err(Error::BudgetExceeded(reason)) => {
                let m = miss(&reason);
                missing.push(m.clone());
                report.push(id, Verdict::Incomplete, m);
            }
            Err(err) => return Err(err.into()),
        }
    }
    if let Some(path) = out {
        let bytes = if tail_lambda.is_some() && ts.len() == 1 && rows.len() == 1 {
            write_json(path, &rows[0])?
        } else {
            let name = table
                .map(str::to_string)
                .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
                .unwrap_or_default();
            let mut extra = Map::new();
            extra.insert("factor_mode".into(), json!(factor_mode.as_str()));
            extra.insert("t".into(), json!(ts));
            write_json(path, &derived_table(&name, family, "weak", extra, rows, missing))?
        };
        report.digest(path.display().to_string(), &bytes);
    }
    Ok(report)
}

/// Assembles a t-weak sequencing for each subset; below the size threshold
/// the brute-force oracle is used instead.
pub fn weak_run(command: &[String], g: &SemidirectGroup, t: usize, subsets: &[Subset], store: &TailStore) -> Result<RunReport> {
    let mut report = RunReport::new(command, format!("group {}, t = {t}", descriptor_text(g)));
    let e = g.h().order();
    for s in subsets {
        let id = format_elements(&s.sorted());
        let k = s.len();
        if k <= (2 * t).saturating_sub(3) * e || t >= k {
            let found = brute_force_sequence(g, s, OracleMode::TWeak(t.min(k)), k)?;
            let verdict = if found.is_some() { Verdict::Verified } else { Verdict::Mismatch };
            report.push(
                id,
                verdict,
                json!({"source": "oracle", "ordering": found.as_ref().map(|o| format_elements(o))}),
            );
            continue;
        }
        match assemble_weak_sequencing(g, s, t, store)? {
            WeakOutcome::Found(w) => {
                let ok = is_t_weak_sequencing(g, &w.ordering, t)?;
                let source = match &w.source {
                    TailSource::Certified { tail } => json!({"certified_tail": tail}),
                    TailSource::Uncertified => json!("backtracking"),
                };
                report.push(
                    id,
                    if ok { Verdict::Verified } else { Verdict::Mismatch },
                    json!({
                        "ordering": format_elements(&w.ordering),
                        "h": w.plan.h,
                        "abar": w.plan.abar,
                        "tail_type": w.plan.tail_type(e).0,
                        "source": source,
                    }),
                );
            }
            WeakOutcome::SoundnessAlarm { plan, tail } => report.push(
                id,
                Verdict::Error,
                json!({"alarm": "certified tail could not be completed", "tail": tail, "prefix": format_elements(&plan.prefix)}),
            ),
            WeakOutcome::NotFound { plan } => report.push(
                id,
                Verdict::Mismatch,
                json!({"prefix": format_elements(&plan.prefix), "tail_type": plan.tail_type(e).0}),
            ),
        }
    }
    Ok(report)
}

/// Reports whether results for primes carry over to `Z_m ⋊ H`.
pub fn transfer_check(command: &[String], m: u64, k: Option<usize>, cert_paths: &[PathBuf]) -> Result<RunReport> {
    let mut report = RunReport::new(command, format!("m = {m}"));
    let certs = load_certificates(cert_paths, &mut report)?;
    if let Some(k) = k {
        let ok = applies_to_composite(m, k as u64)?;
        report.push(
            format!("k={k}"),
            if ok { Verdict::Verified } else { Verdict::Mismatch },
            json!({"m": m, "k": k, "all_prime_factors_exceed_k_factorial": ok}),
        );
    }
    for (name, c) in &certs {
        let ok = applies_to_composite(m, c.k as u64)?;
        report.push(
            format!("{name} ({})", join(&c.lambda.0)),
            if ok { Verdict::Verified } else { Verdict::Mismatch },
            json!({"m": m, "k": c.k, "all_prime_factors_exceed_k_factorial": ok}),
        );
    }
    if k.is_none() && certs.is_empty() {
        bail!("transfer-check needs --k or --cert");
    }
    Ok(report)
}
