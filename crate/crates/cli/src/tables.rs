//! Table data files: loading, writing, and row-by-row reproduction.
//!
//! A printed table carries the rows as they appear in print: the arrangement,
//! the listed monomials and their factorized coefficients. A derived table
//! carries full certificates produced by search.

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

use nullcert::certify::{
    build_pa, check_forms_all_modes, describe_integer, first_block_len, parse_factorization, verify_certificate,
    CertFamily, Certificate, FactorMode, ModeCheck, SeqMode,
};
use nullcert::poly::json::{Coefficient, JsonCoeff};
use nullcert::poly::Monomial;
use nullcert::weakseq::{build_r_poly, r_blocks, verify_tail_certificate, TailCertificate, TailStore};

use crate::report::{canonical, RunReport, Verdict};

/// Tables known to `reproduce`; the last three are regenerated by search.
pub const TABLES: [&str; 6] = ["tab12_2", "tab6_Prod", "tab6_D", "tab10_3", "tab6_Prod1", "tab6_G"];

/// `NULLCERT_DATA_DIR`, else `./data`, else the data directory of the source tree.
pub fn data_dir() -> PathBuf {
    if let Some(d) = std::env::var_os("NULLCERT_DATA_DIR") {
        return PathBuf::from(d);
    }
    let local = PathBuf::from("data");
    if local.is_dir() {
        return local;
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn read_json(path: &Path) -> Result<(Value, Vec<u8>)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let v = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    Ok((v, bytes))
}

/// Writes canonical JSON and returns the bytes written.
pub fn write_json(path: &Path, v: &Value) -> Result<Vec<u8>> {
    let text = canonical(v);
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    Ok(text.into_bytes())
}

pub fn table_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.json"))
}

pub fn table_family(v: &Value) -> Result<CertFamily> {
    let name = v.get("family").and_then(Value::as_str).ok_or_else(|| anyhow!("table without family"))?;
    let e = v.get("e").and_then(Value::as_u64).map(|e| e as usize);
    Ok(CertFamily::parse(name, e)?)
}

fn usize_list(v: &Value, key: &str) -> Result<Vec<usize>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("row without {key}"))?
        .iter()
        .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| anyhow!("bad entry in {key}")))
        .collect()
}

/// A derived table: certificates plus the types search could not settle.
pub fn derived_table(id: &str, family: &CertFamily, kind: &str, extra: Map<String, Value>, rows: Vec<Value>, missing: Vec<Value>) -> Value {
    let mut m = extra;
    m.insert("table".into(), json!(id));
    m.insert("provenance".into(), json!("derived"));
    m.insert("family".into(), json!(family.name()));
    if let CertFamily::Direct { e } = family {
        m.insert("e".into(), json!(e));
    }
    m.insert("kind".into(), json!(kind));
    m.insert("rows".into(), Value::Array(rows));
    m.insert("missing".into(), Value::Array(missing));
    Value::Object(m)
}

/// Tail certificates from a derived weak table or a single certificate file.
pub fn tail_certificates(v: &Value) -> Result<Vec<TailCertificate>> {
    match v.get("rows").and_then(Value::as_array) {
        Some(rows) => rows.iter().map(|r| Ok(TailCertificate::from_json(r)?)).collect(),
        None => Ok(vec![TailCertificate::from_json(v)?]),
    }
}

/// Derived weak tables in `dir`; these double as tail-certificate stores.
pub fn tail_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let Ok(entries) = std::fs::read_dir(dir) else {
        return Ok(out);
    };
    for entry in entries {
        let path = entry?.path();
        if path.extension().is_some_and(|x| x == "json") {
            let (v, _) = read_json(&path)?;
            let derived = v.get("provenance").and_then(Value::as_str) == Some("derived");
            if derived && v.get("kind").and_then(Value::as_str) == Some("weak") {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Loads tail certificates for `family` (and `t`, if given). Every
/// certificate is recomputed; one that fails is an error.
pub fn load_tail_store(
    paths: &[PathBuf],
    family: Option<&CertFamily>,
    t: Option<usize>,
    report: &mut RunReport,
) -> Result<TailStore> {
    let mut store = TailStore::new();
    for path in paths {
        let (v, bytes) = read_json(path)?;
        let mut used = false;
        for c in tail_certificates(&v)? {
            if t.is_some_and(|t| t != c.t) || family.is_some_and(|f| *f != c.family) {
                continue;
            }
            let (ok, _) = verify_tail_certificate(&c)?;
            if !ok {
                bail!("tail certificate {} (t = {}, ā = {}) in {} does not verify", c.lambda, c.t, c.abar, path.display());
            }
            store.insert(c);
            used = true;
        }
        if used {
            report.digest(path.display().to_string(), &bytes);
        }
    }
    Ok(store)
}

fn coefficient_text(c: &Coefficient) -> String {
    match c {
        Coefficient::Integer(n) => describe_integer(n),
        other => other.to_string(),
    }
}

fn mode_json(checks: &[ModeCheck]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| {
                json!({
                    "factor_mode": c.factor_mode.as_str(),
                    "factors": c.factors,
                    "coefficient": c.coefficient.as_ref().map(JsonCoeff::to_json),
                    "factorization": c.coefficient.as_ref().map(coefficient_text),
                    "matches": c.matches,
                })
            })
            .collect(),
    )
}

/// Factor modes in which every listed monomial matched.
fn common_modes(per_monomial: &[Vec<ModeCheck>]) -> Vec<FactorMode> {
    [FactorMode::Raw, FactorMode::Deduped, FactorMode::Reduced]
        .into_iter()
        .filter(|fm| {
            per_monomial
                .iter()
                .all(|checks| checks.iter().any(|c| c.factor_mode == *fm && c.matches))
        })
        .collect()
}

struct PrintedRow {
    lambda: Vec<usize>,
    a: Vec<usize>,
    abar: Option<usize>,
    deg: Option<u64>,
    monomials: Vec<(Monomial, String, Coefficient)>,
}

fn parse_printed_row(row: &Value) -> Result<PrintedRow> {
    let monomials = row.get("monomials").and_then(Value::as_array).ok_or_else(|| anyhow!("row without monomials"))?;
    let coefficients = row
        .get("coefficients")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("row without coefficients"))?;
    if monomials.len() != coefficients.len() {
        bail!("row lists {} monomials but {} coefficients", monomials.len(), coefficients.len());
    }
    let mut out = Vec::new();
    for (m, c) in monomials.iter().zip(coefficients) {
        let exps: Vec<u32> = m
            .as_array()
            .ok_or_else(|| anyhow!("bad monomial"))?
            .iter()
            .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(|| anyhow!("bad exponent")))
            .collect::<Result<_>>()?;
        let text = c.as_str().ok_or_else(|| anyhow!("coefficient must be a string"))?.to_string();
        let value = Coefficient::Integer(parse_factorization(&text)?);
        out.push((Monomial(exps), text, value));
    }
    Ok(PrintedRow {
        lambda: usize_list(row, "lambda")?,
        a: usize_list(row, "a")?,
        abar: row.get("abar").and_then(Value::as_u64).map(|x| x as usize),
        deg: row.get("deg").and_then(Value::as_u64),
        monomials: out,
    })
}

/// Rechecks every monomial of a printed row in all factor modes.
fn check_printed_row(
    family: &CertFamily,
    kind: &str,
    mode: SeqMode,
    t: usize,
    a: &[usize],
    abar: Option<usize>,
    monomials: &[(Monomial, String, Coefficient)],
) -> Result<Vec<Vec<ModeCheck>>> {
    let (raw, blocks) = if kind == "weak" {
        let abar = abar.ok_or_else(|| anyhow!("weak row without abar"))?;
        (build_r_poly(family, a, abar, t)?, r_blocks(family, a, abar, t))
    } else {
        let raw = build_pa(family, a, mode)?;
        let n = raw.len();
        (raw, (first_block_len(a), n))
    };
    monomials
        .iter()
        .map(|(m, _, c)| Ok(check_forms_all_modes(raw.clone(), blocks, m, c)?))
        .collect()
}

fn reproduce_printed(table: &Value, report: &mut RunReport) -> Result<()> {
    let family = table_family(table)?;
    let kind = table.get("kind").and_then(Value::as_str).unwrap_or("sequencing");
    let mode = SeqMode::parse(table.get("mode").and_then(Value::as_str).unwrap_or("linear"))?;
    let t = table.get("t").and_then(Value::as_u64).unwrap_or(0) as usize;
    let rows = table.get("rows").and_then(Value::as_array).ok_or_else(|| anyhow!("table without rows"))?;
    for row in rows {
        let r = parse_printed_row(row)?;
        let checks = check_printed_row(&family, kind, mode, t, &r.a, r.abar, &r.monomials)?;
        let modes = common_modes(&checks);
        let monomial_json: Vec<Value> = r
            .monomials
            .iter()
            .zip(&checks)
            .map(|((m, text, value), c)| {
                json!({
                    "target": m.0,
                    "degree": m.degree(),
                    "printed": text,
                    "printed_value": value.to_json(),
                    "modes": mode_json(c),
                })
            })
            .collect();
        let mut detail = json!({
            "lambda": r.lambda,
            "a": r.a,
            "printed_deg": r.deg,
            "monomials": monomial_json,
            "matched_modes": modes.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
        });
        if let Some(abar) = r.abar {
            detail["abar"] = json!(abar);
        }
        let verdict = if modes.is_empty() {
            // a misprinted ā is the one erratum a weak row can carry while
            // the arrangement and monomials stay right
            if let (Some(abar), "weak") = (r.abar, kind) {
                for alt in (0..family.e()).filter(|&x| x != abar) {
                    let alt_checks = check_printed_row(&family, kind, mode, t, &r.a, Some(alt), &r.monomials)?;
                    let alt_modes = common_modes(&alt_checks);
                    if !alt_modes.is_empty() {
                        detail["alternate"] = json!({
                            "abar": alt,
                            "matched_modes": alt_modes.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
                            "modes": alt_checks.iter().map(|c| mode_json(c)).collect::<Vec<_>>(),
                        });
                        break;
                    }
                }
            }
            Verdict::Mismatch
        } else {
            Verdict::Verified
        };
        let id = match r.abar {
            Some(abar) => format!("({}) abar={abar}", join(&r.lambda)),
            None => format!("({})", join(&r.lambda)),
        };
        report.push(id, verdict, detail);
    }
    Ok(())
}

fn reproduce_derived(table: &Value, report: &mut RunReport) -> Result<()> {
    let kind = table.get("kind").and_then(Value::as_str).unwrap_or("sequencing");
    let rows = table.get("rows").and_then(Value::as_array).ok_or_else(|| anyhow!("table without rows"))?;
    for row in rows {
        if kind == "weak" {
            let c = TailCertificate::from_json(row)?;
            let (ok, recomputed) = verify_tail_certificate(&c)?;
            report.push(
                format!("({}) t={} abar={}", join(&c.lambda.0), c.t, c.abar),
                if ok { Verdict::Verified } else { Verdict::Mismatch },
                json!({
                    "certificate": row,
                    "recomputed": recomputed.to_json(),
                    "factorization": coefficient_text(&recomputed),
                }),
            );
        } else {
            let c = Certificate::from_json(row)?;
            let v = verify_certificate(&c)?;
            report.push(
                format!("({})", join(&c.lambda.0)),
                if v.valid { Verdict::Verified } else { Verdict::Mismatch },
                json!({
                    "certificate": row,
                    "recomputed": v.recomputed.to_json(),
                    "factorization": coefficient_text(&v.recomputed),
                    "notes": v.notes,
                }),
            );
        }
    }
    for m in table.get("missing").and_then(Value::as_array).into_iter().flatten() {
        let lambda = usize_list(m, "lambda").unwrap_or_default();
        let mut id = format!("({})", join(&lambda));
        if let Some(abar) = m.get("abar").and_then(Value::as_u64) {
            id.push_str(&format!(" abar={abar}"));
        }
        if let Some(t) = m.get("t").and_then(Value::as_u64) {
            id.push_str(&format!(" t={t}"));
        }
        report.push(id, Verdict::Skipped, m.clone());
    }
    Ok(())
}

/// Verifies every row of a table file.
pub fn reproduce(command: &[String], dir: &Path, id: &str) -> Result<RunReport> {
    let path = table_path(dir, id);
    let (table, bytes) = read_json(&path).with_context(|| format!("table {id} not found in {}", dir.display()))?;
    let family = table_family(&table)?;
    let mut report = RunReport::new(command, format!("table {id}, family {family}"));
    report.digest(format!("{id}.json"), &bytes);
    match table.get("provenance").and_then(Value::as_str) {
        Some("printed") => reproduce_printed(&table, &mut report)?,
        Some("derived") => reproduce_derived(&table, &mut report)?,
        other => bail!("table {id} has unknown provenance {other:?}"),
    }
    Ok(report)
}

pub fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
