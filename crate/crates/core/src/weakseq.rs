//! t-weak sequencing: the windowed polynomial `q_a`, the greedy prefix, the
//! tail polynomial `r_{a'',ā,ℓ}` and end-to-end assembly for concrete groups.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

use crate::certify::{
    arrangements, bad_primes, first_block_len, coefficient_vanishes_in, difference_block, find_target, realize, CertFamily,
    FactorMode, FormList, SearchConfig, SymbolicForm,
};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroupTable, GroupElement, SemidirectGroup};
use crate::poly::json::{int_from_json, int_to_json, Coefficient, JsonCoeff};
use crate::poly::{Monomial, QuadratureOptions};
use crate::sequencing::{is_t_weak_sequencing, partial_sums, quotient_partial_sums, Subset, TypeVector};

/// Factors of `q_a`: the difference block of `p_a` plus the
/// second-block pairs with `j - i ≤ t`.
pub fn qa_symbolic(h: &FiniteGroupTable, a: &[usize], t: usize) -> Vec<SymbolicForm> {
    let k = a.len();
    let b = quotient_partial_sums(h, a);
    let mut out = difference_block(h, a);
    for i in 0..=k {
        for j in i + 2..=(i + t).min(k) {
            if b[i] == b[j] {
                out.push(SymbolicForm::run(h, h.identity(), i, &a[i..j - 1]));
            }
        }
    }
    out
}

pub fn build_qa(family: &CertFamily, a: &[usize], t: usize) -> Result<FormList> {
    if t < 1 || t >= a.len() {
        return Err(Error::OutOfRange(format!("t = {t} must satisfy 1 <= t < k = {}", a.len())));
    }
    let h = family.h();
    check_arrangement(&h, a)?;
    realize(family, a.len(), &qa_symbolic(&h, a, t))
}

fn check_arrangement(h: &FiniteGroupTable, a: &[usize]) -> Result<()> {
    if let Some(&bad) = a.iter().find(|&&x| x >= h.order()) {
        return Err(Error::InvalidArrangement(format!("{bad} is not an element of H")));
    }
    Ok(())
}

/// The boundary pairs `(i, j)` with `ā^{i+1}·a''_1⋯a''_j = id`,
/// `0 ≤ i ≤ t-1`, `1 ≤ j ≤ t-i-1`.
pub fn boundary_pairs(h: &FiniteGroupTable, tail: &[usize], abar: usize, t: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..t {
        let start = h.power(abar, i + 1);
        let mut cur = start;
        for j in 1..t.saturating_sub(i) {
            if j > tail.len() {
                break;
            }
            cur = h.mul(cur, tail[j - 1]);
            if cur == h.identity() {
                out.push((i, j));
            }
        }
    }
    out
}

/// Factors of `r_{a'',ā,ℓ}`: `q_{a''}` followed by one boundary form
/// per boundary pair.
pub fn r_symbolic(h: &FiniteGroupTable, tail: &[usize], abar: usize, t: usize) -> Vec<SymbolicForm> {
    let mut out = if t >= 1 { qa_symbolic(h, tail, t) } else { Vec::new() };
    for (i, j) in boundary_pairs(h, tail, abar, t) {
        out.push(SymbolicForm::run(h, h.power(abar, i + 1), 0, &tail[..j - 1]));
    }
    out
}

pub fn build_r_poly(family: &CertFamily, tail: &[usize], abar: usize, t: usize) -> Result<FormList> {
    let h = family.h();
    check_arrangement(&h, tail)?;
    if abar >= h.order() {
        return Err(Error::InvalidArrangement(format!("ā = {abar} is not an element of H")));
    }
    if t < 1 || tail.len() < 2 * (t - 1) || tail.is_empty() {
        return Err(Error::OutOfRange(format!(
            "tail length {} must be at least 2(t-1) = {}",
            tail.len(),
            2 * t.saturating_sub(1)
        )));
    }
    realize(family, tail.len(), &r_symbolic(&h, tail, abar, t))
}

/// [`build_r_poly`] followed by the factor-mode normalization.
pub fn build_r_in(family: &CertFamily, tail: &[usize], abar: usize, t: usize, fm: FactorMode) -> Result<FormList> {
    let raw = build_r_poly(family, tail, abar, t)?;
    Ok(raw.in_mode(fm, r_blocks(family, tail, abar, t)))
}

/// `(first block, end of q_{a''})` within the factors of `r`.
pub fn r_blocks(family: &CertFamily, tail: &[usize], _abar: usize, t: usize) -> (usize, usize) {
    let h = family.h();
    (first_block_len(tail), qa_symbolic(&h, tail, t).len())
}

/// Tail bounding monomial: exponent of `z_i` is `λ''_{a''_i} - 1`.
pub fn tail_bounding_monomial(lambda: &TypeVector, tail: &[usize]) -> Result<Monomial> {
    crate::certify::bounding_monomial(lambda, tail)
}

/// Output of [`greedy_prefix`].
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixPlan {
    pub t: usize,
    pub h: usize,
    pub ell: usize,
    pub abar: usize,
    /// The `2(t-1)` reserved elements with coset `ā`.
    pub reserved: Vec<GroupElement>,
    pub prefix: Vec<GroupElement>,
    /// Elements left for the tail, in canonical order.
    pub rest: Vec<GroupElement>,
}

impl PrefixPlan {
    pub fn tail_type(&self, e: usize) -> TypeVector {
        TypeVector::of_arrangement(&self.rest.iter().map(|u| u.a).collect::<Vec<_>>(), e)
    }
}

/// The most frequent coset of `S` (smallest index on ties).
pub fn abundant_coset(g: &SemidirectGroup, s: &Subset) -> usize {
    let e = g.h().order();
    let mut counts = vec![0usize; e];
    for u in s.elements() {
        counts[u.a] += 1;
    }
    (0..e).max_by_key(|&a| (counts[a], std::cmp::Reverse(a))).unwrap_or(0)
}

/// Builds the prefix of the constructive proof: positions `1..=h-t+1` drawn
/// from `S''`, the last `t-1` from the reserved set `S'`, each step taking the
/// first candidate in canonical order that keeps the window condition. `S'`
/// is the first `2(t-1)` elements of the most frequent coset.
pub fn greedy_prefix(g: &SemidirectGroup, s: &Subset, t: usize, h: usize) -> Result<PrefixPlan> {
    check_prefix_sizes(s.len(), t, h)?;
    let abar = abundant_coset(g, s);
    let reserved: Vec<GroupElement> = s.sorted().into_iter().filter(|u| u.a == abar).take(2 * (t - 1)).collect();
    greedy_prefix_with(g, s, t, h, abar, reserved)
}

fn check_prefix_sizes(k: usize, t: usize, h: usize) -> Result<()> {
    if t < 1 {
        return Err(Error::OutOfRange("t must be at least 1".into()));
    }
    if k < h + 2 * (t - 1) || h < t - 1 || h == 0 {
        return Err(Error::Precondition(format!(
            "need k - h >= 2(t-1) and h >= max(t-1, 1); got k = {k}, h = {h}, t = {t}"
        )));
    }
    Ok(())
}

/// [`greedy_prefix`] with an explicit reserved set `S'` inside coset `ā`.
pub fn greedy_prefix_with(
    g: &SemidirectGroup,
    s: &Subset,
    t: usize,
    h: usize,
    abar: usize,
    reserved: Vec<GroupElement>,
) -> Result<PrefixPlan> {
    let k = s.len();
    check_prefix_sizes(k, t, h)?;
    if reserved.len() < 2 * (t - 1) {
        return Err(Error::Precondition(format!(
            "only {} elements lie in the most frequent coset, need 2(t-1) = {}",
            reserved.len(),
            2 * (t - 1)
        )));
    }
    if reserved.iter().any(|u| u.a != abar || !s.elements().contains(u)) {
        return Err(Error::Precondition(format!("reserved elements must be elements of S in coset {abar}")));
    }
    let sorted = s.sorted();
    let mut pool_main: Vec<GroupElement> = sorted.iter().copied().filter(|u| !reserved.contains(u)).collect();
    let mut pool_res = reserved.clone();
    pool_res.sort();
    let mut prefix = Vec::with_capacity(h);
    let mut sums = vec![g.identity()];
    for m in 0..h {
        let from_reserved = m + t > h;
        let pool = if from_reserved { &mut pool_res } else { &mut pool_main };
        let last = *sums.last().unwrap();
        let lo = (m + 1).saturating_sub(t);
        let pick = pool.iter().position(|&u| {
            let next = g.multiply(last, u);
            !sums[lo..].contains(&next)
        });
        let Some(idx) = pick else {
            return Err(Error::Precondition(format!("no admissible element at prefix position {}", m + 1)));
        };
        let u = pool.remove(idx);
        sums.push(g.multiply(last, u));
        prefix.push(u);
    }
    let mut rest: Vec<GroupElement> = pool_main.into_iter().chain(pool_res).collect();
    rest.sort();
    Ok(PrefixPlan {
        t,
        h,
        ell: k - h,
        abar,
        reserved,
        prefix,
        rest,
    })
}

/// Next `r`-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let r = idx.len();
    for i in (0..r).rev() {
        if idx[i] < n - r + i {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// A family-level certificate for the tail polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCertificate {
    pub family: CertFamily,
    pub t: usize,
    pub abar: usize,
    pub lambda: TypeVector,
    pub tail: Vec<usize>,
    pub factor_mode: FactorMode,
    pub target: Monomial,
    pub coefficient: Coefficient,
    pub bad_primes: Vec<BigInt>,
    pub degree: usize,
}

impl TailCertificate {
    pub fn ell(&self) -> usize {
        self.tail.len()
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        self.family.json_fields(&mut m);
        m.insert("k".into(), json!(self.ell()));
        m.insert("ell".into(), json!(self.ell()));
        m.insert("t".into(), json!(self.t));
        m.insert("abar".into(), json!(self.abar));
        m.insert("lambda".into(), json!(self.lambda.0));
        m.insert("a".into(), json!(self.tail));
        m.insert("mode".into(), json!("weak"));
        m.insert("factor_mode".into(), json!(self.factor_mode.as_str()));
        m.insert("target".into(), json!(self.target.0));
        m.insert("coefficient".into(), self.coefficient.to_json());
        m.insert("bad_primes".into(), Value::Array(self.bad_primes.iter().map(int_to_json).collect()));
        m.insert("degree".into(), json!(self.degree));
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |s: String| Error::MalformedCertificate(s);
        let num = |key: &str| -> Result<usize> {
            v.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| bad(format!("missing {key}")))
        };
        let list = |key: &str| -> Result<Vec<usize>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(format!("missing {key}")))?
                .iter()
                .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("bad entry in {key}"))))
                .collect()
        };
        let family = CertFamily::from_json_fields(v)?;
        let tail = list("a")?;
        let lambda = TypeVector(list("lambda")?);
        let target = Monomial(list("target")?.into_iter().map(|x| x as u32).collect());
        let coefficient = Coefficient::from_json(v.get("coefficient").ok_or_else(|| bad("missing coefficient".into()))?)
            .map_err(|e| bad(e.to_string()))?;
        let bad_primes = v
            .get("bad_primes")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing bad_primes".into()))?
            .iter()
            .map(|x| int_from_json(x).map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let factor_mode = FactorMode::parse(v.get("factor_mode").and_then(Value::as_str).unwrap_or("raw"))
            .map_err(|e| bad(e.to_string()))?;
        let c = TailCertificate {
            family,
            t: num("t")?,
            abar: num("abar")?,
            lambda,
            tail,
            factor_mode,
            target,
            coefficient,
            bad_primes,
            degree: num("degree")?,
        };
        if num("ell")? != c.tail.len() || c.target.nvars() != c.tail.len() {
            return Err(bad("inconsistent tail length".into()));
        }
        Ok(c)
    }

    /// Whether the certificate guarantees a tail completion in `g`.
    pub fn applies(&self, g: &SemidirectGroup) -> bool {
        if !self.family.contains(g) {
            return false;
        }
        let max_exp = self.target.exps().iter().copied().max().unwrap_or(0) as u64;
        g.p() > max_exp && !coefficient_vanishes_in(&self.coefficient, g)
    }
}

/// Rebuilds `r_{a'',ā,ℓ}` and recomputes the coefficient of the target.
pub fn verify_tail_certificate(cert: &TailCertificate) -> Result<(bool, Coefficient)> {
    let forms = build_r_in(&cert.family, &cert.tail, cert.abar, cert.t, cert.factor_mode)?;
    let cap = tail_bounding_monomial(&cert.lambda, &cert.tail).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    if cert.target.degree() as usize != forms.len() || !cert.target.divides(&cap) {
        return Ok((false, Coefficient::Integer(BigInt::from(0))));
    }
    let c = forms.coefficient(&cert.target, &QuadratureOptions::default())?;
    let ok = !c.is_zero() && c == cert.coefficient && forms.len() == cert.degree;
    Ok((ok, c))
}

/// Tail types `λ''` with `Σλ'' = 2(t-1)` leaving at least `t-1` elements in
/// coset `ā`; these are the types [`assemble_weak_sequencing`] can meet.
pub fn tail_types(e: usize, t: usize, abar: usize) -> Vec<TypeVector> {
    let ell = (2 * t.saturating_sub(1)).max(1);
    TypeVector::all(e, ell)
        .into_iter()
        .filter(|l| l.get(abar) + 1 >= t)
        .collect()
}

/// Searches tail arrangements of `λ''` for a nonzero coefficient.
pub fn weak_certificate_search(
    family: &CertFamily,
    lambda: &TypeVector,
    abar: usize,
    t: usize,
    factor_mode: FactorMode,
    cfg: &SearchConfig,
) -> Result<Option<TailCertificate>> {
    let e = family.e();
    if lambda.len() != e {
        return Err(Error::DimensionMismatch {
            expected: e,
            got: lambda.len(),
        });
    }
    if abar >= e {
        return Err(Error::OutOfRange(format!("ā = {abar} outside H")));
    }
    let ell = lambda.k();
    if t < 1 || ell < 2 * (t - 1) || ell == 0 {
        return Err(Error::Precondition(format!("tail length {ell} must be at least 2(t-1)")));
    }
    if lambda.get(abar) < t - 1 {
        return Err(Error::Precondition(format!(
            "ā = {abar} must occur at least t-1 = {} times in the tail type {lambda}",
            t - 1
        )));
    }
    let candidates = match &cfg.arrangements {
        Some(list) => list.clone(),
        None => arrangements(lambda),
    };
    let mut cut = None;
    for (n, tail) in candidates.into_iter().enumerate() {
        if n >= cfg.max_arrangements {
            return Err(Error::BudgetExceeded(format!("arrangement limit {} reached", cfg.max_arrangements)));
        }
        let cap = tail_bounding_monomial(lambda, &tail)?;
        let forms = build_r_in(family, &tail, abar, t, factor_mode)?;
        match find_target(&forms, &cap, cfg) {
            Ok(Some((target, coefficient))) => {
                let bad = bad_primes(std::slice::from_ref(&coefficient))?;
                return Ok(Some(TailCertificate {
                    family: family.clone(),
                    t,
                    abar,
                    lambda: lambda.clone(),
                    degree: forms.len(),
                    tail,
                    factor_mode,
                    target,
                    coefficient,
                    bad_primes: bad,
                }));
            }
            Ok(None) => {}
            Err(Error::BudgetExceeded(r)) => cut = Some(r),
            Err(e) => return Err(e),
        }
    }
    match cut {
        Some(r) => Err(Error::BudgetExceeded(r)),
        None => Ok(None),
    }
}

/// Tail certificates keyed by `(t, ā, λ'')`.
#[derive(Debug, Clone, Default)]
pub struct TailStore {
    certs: BTreeMap<(usize, usize, Vec<usize>), Vec<TailCertificate>>,
}

impl TailStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, c: TailCertificate) {
        self.certs.entry((c.t, c.abar, c.lambda.0.clone())).or_default().push(c);
    }

    pub fn get(&self, t: usize, abar: usize, lambda: &TypeVector) -> &[TailCertificate] {
        self.certs
            .get(&(t, abar, lambda.0.clone()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.certs.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &TailCertificate> {
        self.certs.values().flatten()
    }
}

/// How the tail of an assembled ordering was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailSource {
    /// Completed along the arrangement of an applicable certificate.
    Certified { tail: Vec<usize> },
    /// No applicable certificate; plain backtracking over the tail.
    Uncertified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakAssembly {
    pub ordering: Vec<GroupElement>,
    pub plan: PrefixPlan,
    pub source: TailSource,
}

/// Outcome of [`assemble_weak_sequencing`].
#[derive(Debug, Clone, PartialEq)]
pub enum WeakOutcome {
    Found(WeakAssembly),
    /// An applicable certificate's arrangement could not be completed. This
    /// contradicts the certificate.
    SoundnessAlarm { plan: PrefixPlan, tail: Vec<usize> },
    /// No certificate applied and plain backtracking found nothing.
    NotFound { plan: PrefixPlan },
}

/// Reserved sets tried by [`assemble_weak_sequencing`] before giving up.
pub const RESERVED_CHOICES: usize = 256;

/// Prefix by [`greedy_prefix`] with `ℓ = 2(t-1)`, then a tail completed along
/// a certified arrangement. Reserved sets `S'` are tried in lexicographic
/// order (the canonical one first); the first whose tail type has an
/// applicable certificate wins, otherwise the first tail completed by plain
/// backtracking.
pub fn assemble_weak_sequencing(g: &SemidirectGroup, s: &Subset, t: usize, store: &TailStore) -> Result<WeakOutcome> {
    let e = g.h().order();
    let k = s.len();
    if t < 1 || k <= (2 * t).saturating_sub(3) * e {
        return Err(Error::Precondition(format!(
            "need k > (2t-3)|H| = {}, got k = {k}",
            (2 * t).saturating_sub(3) * e
        )));
    }
    let ell = (2 * (t - 1)).max(1);
    if k < ell + (t - 1).max(1) {
        return Err(Error::Precondition(format!("k = {k} too small for a prefix of length t-1")));
    }
    let abar = abundant_coset(g, s);
    let pool: Vec<GroupElement> = s.sorted().into_iter().filter(|u| u.a == abar).collect();
    let r = 2 * (t - 1);
    if pool.len() < r {
        // greedy_prefix reports the precondition
        greedy_prefix(g, s, t, k - ell)?;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut first_plan: Option<PrefixPlan> = None;
    let mut fallback: Option<WeakAssembly> = None;
    let mut tried = 0;
    loop {
        tried += 1;
        let reserved: Vec<GroupElement> = idx.iter().map(|&i| pool[i]).collect();
        match greedy_prefix_with(g, s, t, k - ell, abar, reserved) {
            Ok(plan) => {
                let lambda = plan.tail_type(e);
                let prefix_sums = partial_sums(g, &plan.prefix);
                if let Some(cert) = store.get(t, plan.abar, &lambda).iter().find(|c| c.applies(g)) {
                    return match complete_tail(g, &prefix_sums, &plan.rest, Some(&cert.tail), t) {
                        Some(tail) => {
                            let mut ordering = plan.prefix.clone();
                            ordering.extend(tail);
                            check_weak(g, &ordering, t)?;
                            Ok(WeakOutcome::Found(WeakAssembly {
                                ordering,
                                plan,
                                source: TailSource::Certified { tail: cert.tail.clone() },
                            }))
                        }
                        None => Ok(WeakOutcome::SoundnessAlarm {
                            tail: cert.tail.clone(),
                            plan,
                        }),
                    };
                }
                if fallback.is_none() {
                    if let Some(tail) = complete_tail(g, &prefix_sums, &plan.rest, None, t) {
                        let mut ordering = plan.prefix.clone();
                        ordering.extend(tail);
                        check_weak(g, &ordering, t)?;
                        fallback = Some(WeakAssembly {
                            ordering,
                            plan: plan.clone(),
                            source: TailSource::Uncertified,
                        });
                    }
                }
                first_plan.get_or_insert(plan);
            }
            Err(Error::Precondition(_)) => {}
            Err(err) => return Err(err),
        }
        if tried >= RESERVED_CHOICES || !next_combination(&mut idx, pool.len()) {
            break;
        }
    }
    match (fallback, first_plan) {
        (Some(w), _) => Ok(WeakOutcome::Found(w)),
        (None, Some(plan)) => Ok(WeakOutcome::NotFound { plan }),
        (None, None) => greedy_prefix(g, s, t, k - ell).map(|plan| WeakOutcome::NotFound { plan }),
    }
}

fn check_weak(g: &SemidirectGroup, ordering: &[GroupElement], t: usize) -> Result<()> {
    let t_eff = t.min(ordering.len());
    if is_t_weak_sequencing(g, ordering, t_eff)? {
        Ok(())
    } else {
        Err(Error::Precondition("assembled ordering fails the t-weak predicate".into()))
    }
}

/// Backtracking over the remaining elements, optionally along a fixed coset
/// pattern, keeping every window of length `t` free of repeated sums.
pub fn complete_tail(
    g: &SemidirectGroup,
    prefix_sums: &[GroupElement],
    rest: &[GroupElement],
    pattern: Option<&[usize]>,
    t: usize,
) -> Option<Vec<GroupElement>> {
    if let Some(p) = pattern {
        if p.len() != rest.len() {
            return None;
        }
    }
    let mut sums = prefix_sums.to_vec();
    let mut used = vec![false; rest.len()];
    let mut out = Vec::with_capacity(rest.len());
    if tail_rec(g, rest, pattern, t, &mut used, &mut sums, &mut out) {
        Some(out)
    } else {
        None
    }
}

fn tail_rec(
    g: &SemidirectGroup,
    rest: &[GroupElement],
    pattern: Option<&[usize]>,
    t: usize,
    used: &mut [bool],
    sums: &mut Vec<GroupElement>,
    out: &mut Vec<GroupElement>,
) -> bool {
    let pos = out.len();
    if pos == rest.len() {
        return true;
    }
    let last = *sums.last().unwrap();
    let lo = sums.len().saturating_sub(t);
    for idx in 0..rest.len() {
        if used[idx] || pattern.is_some_and(|p| p[pos] != rest[idx].a) {
            continue;
        }
        let next = g.multiply(last, rest[idx]);
        if sums[lo..].contains(&next) {
            continue;
        }
        used[idx] = true;
        sums.push(next);
        out.push(rest[idx]);
        if tail_rec(g, rest, pattern, t, used, sums, out) {
            return true;
        }
        out.pop();
        sums.pop();
        used[idx] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequencing::Subset;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn example_r_poly() {
        let f = build_r_poly(&CertFamily::Dihedral, &[1, 0, 1, 0, 1, 0], 0, 4).unwrap();
        assert_eq!(f.len(), 12);
        let q = build_qa(&CertFamily::Dihedral, &[1, 0, 1, 0, 1, 0], 4).unwrap();
        assert_eq!(q.len(), 11);
        let c = f.coefficient(&Monomial(vec![2; 6]), &QuadratureOptions::default()).unwrap();
        assert_eq!(c, Coefficient::Integer(BigInt::from(-12)));
    }

    #[test]
    fn t_one_keeps_first_block() {
        let h = FiniteGroupTable::cyclic(2);
        let a = [0, 1, 0, 1];
        assert_eq!(qa_symbolic(&h, &a, 1), difference_block(&h, &a));
        assert!(boundary_pairs(&h, &a, 0, 1).is_empty());
    }

    #[test]
    fn prefix_properties() {
        let g = SemidirectGroup::dihedral(13).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut all: Vec<GroupElement> = g.elements().into_iter().filter(|&u| u != g.identity()).collect();
        for _ in 0..50 {
            all.shuffle(&mut rng);
            let s = Subset::new(&g, all[..14].to_vec()).unwrap();
            let t = 4;
            let abar = abundant_coset(&g, &s);
            let count = s.elements().iter().filter(|u| u.a == abar).count();
            if count < 6 {
                continue;
            }
            let plan = greedy_prefix(&g, &s, t, 8).unwrap();
            assert!(is_t_weak_sequencing(&g, &plan.prefix, t).unwrap());
            assert!(plan.prefix[8 - (t - 1)..].iter().all(|u| u.a == abar));
            assert!(plan.rest.iter().filter(|u| u.a == abar).count() >= t - 1);
        }
    }

    #[test]
    fn prefix_precondition() {
        let g = SemidirectGroup::dihedral(13).unwrap();
        let s = Subset::parse(&g, "1.0 2.0 3.0 4.0 5.0 1.1 2.1 3.1 4.1 5.1").unwrap();
        assert!(greedy_prefix(&g, &s, 4, 4).is_err());
    }
}
