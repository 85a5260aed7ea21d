//! Acceptance criteria 1-9, one pass/fail line each.
//!
//! Run with `cargo test --release -p nullcert-cli --test acceptance -- --nocapture`
//! to see the lines as they finish.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use nullcert::certify::{
    bad_primes, bounding_monomial, build_pa, certificate_applies, check_search_preconditions, find_certified_ordering,
    search_certificate, verify_certificate, CertFamily, FactorMode, FormList, SearchConfig, SearchOutcome, SeqMode,
};
use nullcert::poly::json::Coefficient;
use nullcert::poly::{
    expand_truncated, product_naive, CoefficientRing, Eisenstein, EisensteinIntegers, Integers, LinearForm, Monomial,
    QuadratureOptions,
};
use nullcert::sequencing::{
    brute_force_sequence, exhaustive_type_check, is_linear_sequencing, is_sequencing, is_t_weak_sequencing,
    subset_type, subsets_of_type, OracleMode, Subset, SweepConfig, TypeVector,
};
use nullcert::weakseq::{assemble_weak_sequencing, build_qa, build_r_poly, TailSource, WeakOutcome};
use nullcert::{FamilyTag, FiniteGroupTable, GroupElement, SemidirectGroup};
use nullcert_cli::report::{RunReport, Verdict};
use nullcert_cli::tables;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(t0: Instant, limit: Duration) -> Outcome {
    let el = t0.elapsed();
    if el <= limit {
        Ok(String::new())
    } else {
        Err(format!("took {el:.2?}, limit {limit:?}"))
    }
}

fn quad() -> QuadratureOptions {
    QuadratureOptions::default()
}

/// Rows of an integer form list, each normalised to a positive leading entry.
fn rows_up_to_sign(f: &FormList) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<i64>> = f
        .integer_rows()
        .unwrap()
        .into_iter()
        .map(|r| {
            let neg = r.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0);
            if neg {
                r.iter().map(|c| -c).collect()
            } else {
                r
            }
        })
        .collect();
    rows.sort();
    rows
}

fn c1() -> Outcome {
    let t0 = Instant::now();
    let a = [1, 1, 0, 2, 1];
    let f = build_pa(&CertFamily::G3p, &a, SeqMode::Sequencing).map_err(|e| e.to_string())?;
    ensure!(f.len() == 6, "{} factors", f.len());
    let c = f.coefficient(&Monomial(vec![2, 2, 0, 0, 2]), &quad()).map_err(|e| e.to_string())?;
    ensure!(c == Coefficient::Eisenstein(Eisenstein::new(0, -1)), "coefficient {c}");
    let bad = bad_primes(&[c.clone()]).map_err(|e| e.to_string())?;
    ensure!(bad.is_empty(), "bad primes {bad:?}");
    within(t0, Duration::from_secs(1))?;
    Ok(format!("coefficient {c}, norm 1, no bad primes, {:.2?}", t0.elapsed()))
}

fn c2() -> Outcome {
    let t0 = Instant::now();
    let f = build_r_poly(&CertFamily::Dihedral, &[1, 0, 1, 0, 1, 0], 0, 4).map_err(|e| e.to_string())?;
    ensure!(f.len() == 12, "{} factors", f.len());
    let printed = [
        [1, -1, -1, 0, 0, 0],
        [-1, 0, 1, 0, 0, 0],
        [-1, 0, 0, 0, 1, 0],
        [0, -1, 0, 1, 0, 0],
        [0, -1, 0, 0, 0, 1],
        [0, 0, -1, 0, 1, 0],
        [0, 0, 0, -1, 0, 1],
        [1, -1, -1, 0, 0, 0],
        [1, -1, -1, 1, 0, 0],
        [0, 1, 1, -1, -1, 0],
        [0, 0, 1, -1, -1, 0],
        [0, 0, 1, -1, -1, 1],
    ];
    let want = rows_up_to_sign(&FormList::Integer(
        printed
            .iter()
            .map(|r| LinearForm::new(&Integers, r.iter().map(|&c| c.into()).collect()).unwrap())
            .collect(),
    ));
    ensure!(rows_up_to_sign(&f) == want, "factors differ from the printed list");
    let c = f.coefficient(&Monomial(vec![2; 6]), &quad()).map_err(|e| e.to_string())?;
    ensure!(c.to_string() == "-12", "coefficient {c}");
    within(t0, Duration::from_secs(1))?;
    Ok(format!("12 factors as printed, coefficient -12, {:.2?}", t0.elapsed()))
}

fn c3() -> Outcome {
    let t0 = Instant::now();
    let a = [0, 1, 0, 0, 1];
    let f = build_pa(&CertFamily::Dihedral, &a, SeqMode::Linear).map_err(|e| e.to_string())?;
    let printed: [[i64; 5]; 7] = [
        [-1, 0, 1, 0, 0],
        [-1, 0, 0, 1, 0],
        [0, -1, 0, 0, 1],
        [0, 0, -1, 1, 0],
        [1, 1, -1, -1, -1],
        [0, 1, -1, -1, -1],
        [0, 0, 1, 1, 0],
    ];
    let mut got = f.integer_rows().unwrap();
    let mut want: Vec<Vec<i64>> = printed.iter().map(|r| r.to_vec()).collect();
    got.sort();
    want.sort();
    ensure!(got == want, "factors {got:?}");
    let m = Monomial(vec![2, 1, 2, 1, 2]);
    let cap = bounding_monomial(&TypeVector(vec![3, 2]), &a).map_err(|e| e.to_string())?;
    ensure!(m.degree() == 8 && !m.divides(&cap), "printed monomial should be invalid");
    let z = f.coefficient(&m, &quad()).map_err(|e| e.to_string())?;
    ensure!(z.is_zero(), "recomputed {z}");
    let mut order = vec![a.to_vec()];
    order.extend(nullcert::certify::arrangements(&TypeVector(vec![3, 2])).into_iter().filter(|x| x[..] != a));
    let cfg = SearchConfig {
        arrangements: Some(order),
        ..SearchConfig::default()
    };
    let out = search_certificate(&CertFamily::Dihedral, &TypeVector(vec![3, 2]), SeqMode::Linear, FactorMode::Raw, &cfg)
        .map_err(|e| e.to_string())?;
    let Some(c) = out.certificate() else {
        return Err(format!("search: {out:?}"));
    };
    ensure!(c.degree == 7, "certificate degree {}", c.degree);
    ensure!(verify_certificate(c).map_err(|e| e.to_string())?.valid, "certificate does not verify");
    within(t0, Duration::from_secs(1))?;
    Ok(format!(
        "7 factors, printed monomial degree 8 with coefficient 0, search target {:?} coefficient {}, {:.2?}",
        c.target.0,
        c.coefficient,
        t0.elapsed()
    ))
}

fn reproduce(id: &str) -> Result<RunReport, String> {
    tables::reproduce(&["acceptance".into()], &tables::data_dir(), id).map_err(|e| e.to_string())
}

fn c4() -> Outcome {
    let t0 = Instant::now();
    let mut rows = 0;
    let mut exact = 0;
    let mut notes = Vec::new();
    for id in ["tab6_Prod", "tab6_D"] {
        let r = reproduce(id)?;
        for item in &r.items {
            rows += 1;
            if item.verdict == Verdict::Verified {
                exact += 1;
                continue;
            }
            // a mismatch must carry every factor mode, and the alternate ā when tried
            let modes = item.detail["monomials"][0]["modes"].as_array().map_or(0, Vec::len);
            ensure!(modes == 3, "{id} {}: mismatch without per-mode detail", item.id);
            let alt = item.detail.get("alternate").map(|a| a["matched_modes"].clone()).unwrap_or(Value::Null);
            notes.push(format!("{id} {} (alternate ā matches in {alt})", item.id));
        }
    }
    let per_row = t0.elapsed() / rows.max(1) as u32;
    ensure!(exact >= 18, "{exact}/{rows} rows exact");
    ensure!(per_row <= Duration::from_secs(300), "{per_row:?} per row");
    Ok(format!("{exact}/{rows} rows exact; mismatches: {}; {:.2?} per row", notes.join(", "), per_row))
}

fn c5() -> Outcome {
    let t0 = Instant::now();
    let r = reproduce("tab12_2")?;
    for want in ["(11,1)", "(8,4)"] {
        let item = r.items.iter().find(|i| i.id == want).ok_or(format!("row {want} missing"))?;
        let modes: Vec<&str> = item.detail["matched_modes"]
            .as_array()
            .map(|v| v.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default();
        ensure!(
            modes.contains(&"raw") || modes.contains(&"deduped"),
            "{want} matches only in {modes:?}"
        );
    }
    let printed_ok = r.count(Verdict::Verified);
    let mut found = 0;
    let mut missing = Vec::new();
    for lam in TypeVector::all(2, 12) {
        if lam.get(0) == 12 || lam.get(1) == 12 {
            continue;
        }
        let out = search_certificate(&CertFamily::Dihedral, &lam, SeqMode::Linear, FactorMode::Reduced, &SearchConfig::default())
            .map_err(|e| e.to_string())?;
        match out {
            SearchOutcome::Found(c) if verify_certificate(&c).map_err(|e| e.to_string())?.valid => found += 1,
            other => missing.push(format!("{lam}: {other:?}")),
        }
    }
    ensure!(missing.is_empty(), "no certificate for {}", missing.join("; "));
    within(t0, Duration::from_secs(7200))?;
    Ok(format!(
        "rows (11,1) and (8,4) verify ({printed_ok}/{} printed rows), {found}/11 types certified, {:.1?}",
        r.items.len(),
        t0.elapsed()
    ))
}

fn c6() -> Outcome {
    let t0 = Instant::now();
    let g = SemidirectGroup::dihedral(7).unwrap();
    let mut subsets = 0;
    let mut certified = 0;
    for k in 3..=5 {
        for lam in TypeVector::all(2, k) {
            let rep = exhaustive_type_check(&g, &lam, OracleMode::Any, &SweepConfig::default()).map_err(|e| e.to_string())?;
            ensure!(rep.unsequenceable == 0, "{lam}: {:?}", rep.failures);
            subsets += rep.subsets;
            if check_search_preconditions(&CertFamily::Dihedral, &lam).is_err() {
                continue;
            }
            for mode in [SeqMode::Linear, SeqMode::Sequencing] {
                let cfg = SearchConfig {
                    avoid_primes: vec![7],
                    ..SearchConfig::default()
                };
                let out = search_certificate(&CertFamily::Dihedral, &lam, mode, FactorMode::Reduced, &cfg).map_err(|e| e.to_string())?;
                let Some(cert) = out.certificate() else {
                    return Err(format!("{lam} {mode:?}: {out:?}"));
                };
                ensure!(certificate_applies(cert, &g), "{lam} {mode:?}: certificate does not apply to D_14");
                for elems in subsets_of_type(&g, &lam) {
                    let s = Subset::new(&g, elems).unwrap();
                    let o = find_certified_ordering(&g, &s, &cert.a, mode)
                        .map_err(|e| e.to_string())?
                        .ok_or(format!("{lam} {mode:?} {:?}: no nonzero assignment", s.sorted()))?;
                    let ok = match mode {
                        SeqMode::Linear => is_linear_sequencing(&g, &o).unwrap(),
                        SeqMode::Sequencing => is_sequencing(&g, &o).unwrap(),
                    };
                    ensure!(ok, "{lam} {mode:?}: ordering fails the predicate");
                    certified += 1;
                }
            }
        }
    }
    within(t0, Duration::from_secs(600))?;
    Ok(format!("{subsets} subsets sequenceable, {certified} certificate assignments checked, {:.2?}", t0.elapsed()))
}

fn nonidentity(g: &SemidirectGroup) -> Vec<GroupElement> {
    g.elements().into_iter().filter(|&u| u != g.identity()).collect()
}

fn c7() -> Outcome {
    let t0 = Instant::now();
    let g = SemidirectGroup::dihedral(13).unwrap();
    let mut pool = nonidentity(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut total = 0;
    for k in 6..=12 {
        let mut done = 0;
        while done < 500 {
            pool.shuffle(&mut rng);
            let s = Subset::new(&g, pool[..k].to_vec()).unwrap();
            if subset_type(&g, &s).get(0) == k {
                continue;
            }
            let o = brute_force_sequence(&g, &s, OracleMode::Linear, 12)
                .map_err(|e| e.to_string())?
                .ok_or(format!("k={k} {:?}: no linear sequencing", s.sorted()))?;
            ensure!(is_linear_sequencing(&g, &o).unwrap(), "oracle ordering fails the predicate");
            done += 1;
        }
        total += done;
    }
    Ok(format!("{total} subsets, all linearly sequenceable, {:.2?}", t0.elapsed()))
}

fn c8() -> Outcome {
    let t0 = Instant::now();
    let files = tables::tail_files(&tables::data_dir()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut certified = 0;
    let mut uncertified = 0;
    for g in [SemidirectGroup::dihedral(13).unwrap(), SemidirectGroup::direct(13, 2).unwrap()] {
        let family = CertFamily::from_group(&g);
        let mut pool = nonidentity(&g);
        for t in 2..=6 {
            let mut scratch = RunReport::new(&[], "tails");
            let store = tables::load_tail_store(&files, Some(&family), Some(t), &mut scratch).map_err(|e| e.to_string())?;
            ensure!(!store.is_empty(), "no stored tails for {} t={t}", family.name());
            let lo = (2 * t - 3) * 2 + 1;
            for _ in 0..100 {
                let k = rng.gen_range(lo..=pool.len());
                pool.shuffle(&mut rng);
                let s = Subset::new(&g, pool[..k].to_vec()).unwrap();
                match assemble_weak_sequencing(&g, &s, t, &store).map_err(|e| e.to_string())? {
                    WeakOutcome::Found(w) => {
                        ensure!(is_t_weak_sequencing(&g, &w.ordering, t).unwrap(), "ordering fails the predicate");
                        match w.source {
                            TailSource::Certified { .. } => certified += 1,
                            TailSource::Uncertified => uncertified += 1,
                        }
                    }
                    WeakOutcome::SoundnessAlarm { tail, .. } => {
                        return Err(format!("soundness alarm: {} t={t} tail {tail:?}", family.name()))
                    }
                    WeakOutcome::NotFound { .. } => return Err(format!("{} t={t}: no ordering", family.name())),
                }
            }
        }
    }
    within(t0, Duration::from_secs(900))?;
    Ok(format!(
        "1000 subsets assembled ({certified} along a certified tail, {uncertified} without), no alarm, {:.2?}",
        t0.elapsed()
    ))
}

fn homogeneous(f: &FormList) -> bool {
    let d = f.len() as u32;
    match f {
        FormList::Integer(forms) => {
            let n = forms.first().map_or(0, |x| x.nvars());
            product_naive(&Integers, n, forms).unwrap().is_homogeneous_of_degree(d)
        }
        FormList::Eisenstein(forms) => {
            let n = forms.first().map_or(0, |x| x.nvars());
            product_naive(&EisensteinIntegers, n, forms).unwrap().is_homogeneous_of_degree(d)
        }
        FormList::Modular(..) => false,
    }
}

fn c9() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let groups = [
        SemidirectGroup::dihedral(7).unwrap(),
        SemidirectGroup::dihedral(13).unwrap(),
        SemidirectGroup::g3p(7, 2).unwrap(),
        SemidirectGroup::g3p(13, 3).unwrap(),
        SemidirectGroup::direct(5, 3).unwrap(),
        SemidirectGroup::new(5, FiniteGroupTable::cyclic(4), vec![1, 2, 4, 3], FamilyTag::Custom).unwrap(),
    ];
    for g in &groups {
        let els = g.elements();
        for _ in 0..200 {
            let [u, v, w] = [0; 3].map(|_| els[rng.gen_range(0..els.len())]);
            ensure!(g.multiply(g.multiply(u, v), w) == g.multiply(u, g.multiply(v, w)), "associativity");
            ensure!(g.multiply(g.identity(), u) == u && g.multiply(u, g.identity()) == u, "identity");
            ensure!(g.multiply(u, g.inverse(u)) == g.identity(), "inverse");
        }
        let h = g.h();
        for a in 0..h.order() {
            for b in 0..h.order() {
                ensure!(g.phi().get(h.mul(a, b)) == g.phi().get(a) * g.phi().get(b) % g.p(), "multiplier map");
            }
        }
    }
    let mut instances = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=8);
        let forms: Vec<_> = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-3i64..=3)).collect::<Vec<_>>())
            .filter(|r| r.iter().any(|&c| c != 0))
            .map(|r| LinearForm::new(&Integers, r.into_iter().map(Into::into).collect()).unwrap())
            .collect();
        let cap = Monomial((0..n).map(|_| rng.gen_range(0..=4)).collect());
        let naive = product_naive(&Integers, n, &forms).unwrap();
        let trunc = expand_truncated(&Integers, &forms, &cap).unwrap();
        for (mon, c) in naive.terms() {
            if mon.divides(&cap) {
                ensure!(trunc.coefficient(&Integers, &mon) == c, "truncated expansion differs at {:?}", mon.0);
            }
        }
        ensure!(trunc.terms().iter().all(|(mon, _)| mon.divides(&cap)), "term outside the cap");
        instances += 1;
    }
    for _ in 0..200 {
        let e = rng.gen_range(2..=3);
        let len = rng.gen_range(2..=6);
        let a: Vec<usize> = (0..len).map(|_| rng.gen_range(0..e)).collect();
        let fam = if e == 2 { CertFamily::Dihedral } else { CertFamily::G3p };
        let t = rng.gen_range(1..=3);
        ensure!(homogeneous(&build_pa(&fam, &a, SeqMode::Linear).unwrap()), "p_a not homogeneous");
        if t < a.len() {
            ensure!(homogeneous(&build_qa(&fam, &a, t).unwrap()), "q_a not homogeneous");
        }
        if a.len() >= 2 * (t - 1) {
            ensure!(homogeneous(&build_r_poly(&fam, &a, rng.gen_range(0..e), t).unwrap()), "r not homogeneous");
        }
    }
    let ring = EisensteinIntegers;
    let r = Eisenstein::r();
    ensure!(ring.mul(&ring.mul(&r, &r), &r) == ring.one(), "r^3 != 1");
    for _ in 0..500 {
        let x = Eisenstein::new(rng.gen_range(-1000i64..1000), rng.gen_range(-1000i64..1000));
        let y = Eisenstein::new(rng.gen_range(-1000i64..1000), rng.gen_range(-1000i64..1000));
        ensure!(ring.mul(&x, &y).norm() == x.norm() * y.norm(), "norm not multiplicative");
    }
    Ok(format!("group axioms, multiplier maps, {instances} expansion instances, homogeneity, Eisenstein identities, {:.2?}", t0.elapsed()))
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 9] = [(1, c1), (2, c2), (3, c3), (4, c4), (5, c5), (6, c6), (7, c7), (8, c8), (9, c9)];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        let t0 = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match res {
            Ok(msg) => println!("criterion {n}: PASS ({msg})"),
            Err(msg) => {
                println!("criterion {n}: FAIL ({msg}) after {:.2?}", t0.elapsed());
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
