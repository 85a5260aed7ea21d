//! Orderings of subsets, partial sums, the sequencing predicates, subset
//! types and quotient sequencings, plus the brute-force ordering oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::groups::{FiniteGroupTable, GroupElement, SemidirectGroup};

/// Default cap on subset size for the exhaustive ordering oracle.
pub const DEFAULT_ORACLE_CAP: usize = 12;

/// A set of distinct non-identity elements of a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subset {
    elements: Vec<GroupElement>,
}

impl Subset {
    pub fn new(g: &SemidirectGroup, elements: Vec<GroupElement>) -> Result<Self> {
        validate_set(g, &elements)?;
        Ok(Subset { elements })
    }

    /// Parses the text form `x.a,x.a,...`, e.g. `3.1,2.0,5.1`.
    pub fn parse(g: &SemidirectGroup, text: &str) -> Result<Self> {
        let elements = parse_elements(text)?;
        Subset::new(g, elements)
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The elements in canonical (sorted) order.
    pub fn sorted(&self) -> Vec<GroupElement> {
        let mut v = self.elements.clone();
        v.sort();
        v
    }
}

pub fn parse_elements(text: &str) -> Result<Vec<GroupElement>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|tok| {
            let (x, a) = tok
                .split_once('.')
                .ok_or_else(|| Error::Parse(format!("expected x.a, got {tok:?}")))?;
            let x = x.parse().map_err(|_| Error::Parse(format!("bad residue in {tok:?}")))?;
            let a = a.parse().map_err(|_| Error::Parse(format!("bad coset index in {tok:?}")))?;
            Ok(GroupElement::new(x, a))
        })
        .collect()
}

pub fn format_elements(elements: &[GroupElement]) -> String {
    elements.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

fn validate_set(g: &SemidirectGroup, elements: &[GroupElement]) -> Result<()> {
    let mut seen = HashSet::with_capacity(elements.len());
    for &u in elements {
        g.check(u)?;
        if u == g.identity() {
            return Err(Error::InvalidSubset("the identity cannot be sequenced".into()));
        }
        if !seen.insert(u) {
            return Err(Error::InvalidSubset(format!("{u} occurs twice")));
        }
    }
    Ok(())
}

/// `s_0 = id`, `s_j = s_{j-1}·x_j`.
pub fn partial_sums(g: &SemidirectGroup, ordering: &[GroupElement]) -> Vec<GroupElement> {
    let mut out = Vec::with_capacity(ordering.len() + 1);
    let mut s = g.identity();
    out.push(s);
    for &x in ordering {
        s = g.multiply(s, x);
        out.push(s);
    }
    out
}

pub fn is_linear_sequencing(g: &SemidirectGroup, ordering: &[GroupElement]) -> Result<bool> {
    validate_set(g, ordering)?;
    let sums = partial_sums(g, ordering);
    Ok(all_distinct(&sums))
}

pub fn is_cyclic_sequencing(g: &SemidirectGroup, ordering: &[GroupElement]) -> Result<bool> {
    validate_set(g, ordering)?;
    let sums = partial_sums(g, ordering);
    let k = ordering.len();
    Ok(sums[k] == g.identity() && all_distinct(&sums[..k]))
}

pub fn is_sequencing(g: &SemidirectGroup, ordering: &[GroupElement]) -> Result<bool> {
    Ok(is_linear_sequencing(g, ordering)? || is_cyclic_sequencing(g, ordering)?)
}

/// `s_i ≠ s_j` whenever `0 < j - i ≤ t`; requires `1 ≤ t ≤ k`.
pub fn is_t_weak_sequencing(g: &SemidirectGroup, ordering: &[GroupElement], t: usize) -> Result<bool> {
    validate_set(g, ordering)?;
    let k = ordering.len();
    if t < 1 || t > k {
        return Err(Error::OutOfRange(format!("t = {t} must lie in 1..={k}")));
    }
    let sums = partial_sums(g, ordering);
    Ok(window_distinct(&sums, t))
}

fn all_distinct(v: &[GroupElement]) -> bool {
    let mut seen = HashSet::with_capacity(v.len());
    v.iter().all(|s| seen.insert(*s))
}

fn window_distinct(sums: &[GroupElement], t: usize) -> bool {
    (0..sums.len()).all(|j| (j.saturating_sub(t)..j).all(|i| sums[i] != sums[j]))
}

/// `λ_i` = number of elements whose second coordinate is `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeVector(pub Vec<usize>);

impl TypeVector {
    pub fn k(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, a: usize) -> usize {
        self.0[a]
    }

    /// Type of an arrangement over `H` with `e` elements.
    pub fn of_arrangement(a: &[usize], e: usize) -> Self {
        let mut v = vec![0; e];
        for &x in a {
            v[x] += 1;
        }
        TypeVector(v)
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad type entry {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(TypeVector)
    }

    /// All type vectors of length `e` summing to `k`, in lexicographically
    /// decreasing order (so `(k, 0, ..)` comes first).
    pub fn all(e: usize, k: usize) -> Vec<TypeVector> {
        fn rec(e: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<TypeVector>) {
            if cur.len() + 1 == e {
                cur.push(k);
                out.push(TypeVector(cur.clone()));
                cur.pop();
                return;
            }
            for v in (0..=k).rev() {
                cur.push(v);
                rec(e, k - v, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if e >= 1 {
            rec(e, k, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl std::fmt::Display for TypeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn subset_type(g: &SemidirectGroup, s: &Subset) -> TypeVector {
    TypeVector::of_arrangement(
        &s.elements().iter().map(|u| u.a).collect::<Vec<_>>(),
        g.h().order(),
    )
}

/// An arrangement `a` over `H` together with its partial products `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientSequencing {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl QuotientSequencing {
    pub fn new(h: &FiniteGroupTable, a: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = a.iter().find(|&&x| x >= h.order()) {
            return Err(Error::InvalidArrangement(format!(
                "{bad} is not an element of a group of order {}",
                h.order()
            )));
        }
        let b = quotient_partial_sums(h, &a);
        Ok(QuotientSequencing { a, b })
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }
}

/// `b_0 = id`, `b_j = b_{j-1}·a_j` in `H`.
pub fn quotient_partial_sums(h: &FiniteGroupTable, a: &[usize]) -> Vec<usize> {
    let mut b = Vec::with_capacity(a.len() + 1);
    let mut cur = h.identity();
    b.push(cur);
    for &x in a {
        cur = h.mul(cur, x);
        b.push(cur);
    }
    b
}

/// Every element of `H` occurs at most `r` times among `b_0, …, b_k`.
pub fn is_quotient_sequencing(h: &FiniteGroupTable, a: &[usize], r: usize) -> bool {
    if a.iter().any(|&x| x >= h.order()) {
        return false;
    }
    let mut counts = vec![0usize; h.order()];
    for b in quotient_partial_sums(h, a) {
        counts[b] += 1;
    }
    counts.iter().all(|&c| c <= r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    /// All `k + 1` partial sums distinct.
    Linear,
    /// Linear or cyclic.
    Any,
    /// Partial sums distinct within every window of width `t`.
    TWeak(usize),
}

/// Exhaustive backtracking search for an ordering of `s` satisfying `mode`.
///
/// Elements are tried in canonical sorted order, so the answer is
/// deterministic. `Ok(None)` means no such ordering exists.
pub fn brute_force_sequence(
    g: &SemidirectGroup,
    s: &Subset,
    mode: OracleMode,
    cap: usize,
) -> Result<Option<Vec<GroupElement>>> {
    let k = s.len();
    if k > cap {
        return Err(Error::BudgetExceeded(format!("subset of size {k} exceeds oracle cap {cap}")));
    }
    if let OracleMode::TWeak(t) = mode {
        if t < 1 || t > k.max(1) {
            return Err(Error::OutOfRange(format!("t = {t} must lie in 1..={k}")));
        }
    }
    let elems = s.sorted();
    let mut used = vec![false; k];
    let mut sums = vec![g.identity()];
    let mut order = Vec::with_capacity(k);
    if backtrack(g, &elems, mode, &mut used, &mut sums, &mut order) {
        Ok(Some(order))
    } else {
        Ok(None)
    }
}

fn backtrack(
    g: &SemidirectGroup,
    elems: &[GroupElement],
    mode: OracleMode,
    used: &mut [bool],
    sums: &mut Vec<GroupElement>,
    order: &mut Vec<GroupElement>,
) -> bool {
    let k = elems.len();
    let j = order.len();
    if j == k {
        return true;
    }
    let last = *sums.last().unwrap();
    for idx in 0..k {
        if used[idx] {
            continue;
        }
        let next = g.multiply(last, elems[idx]);
        let ok = match mode {
            OracleMode::Linear => !sums.contains(&next),
            OracleMode::Any => {
                if j + 1 == k {
                    !sums[1..].contains(&next)
                } else {
                    !sums.contains(&next)
                }
            }
            OracleMode::TWeak(t) => {
                let from = (j + 1).saturating_sub(t);
                !sums[from..].contains(&next)
            }
        };
        if !ok {
            continue;
        }
        used[idx] = true;
        sums.push(next);
        order.push(elems[idx]);
        if backtrack(g, elems, mode, used, sums, order) {
            return true;
        }
        order.pop();
        sums.pop();
        used[idx] = false;
    }
    false
}

/// Per-subset verdict of the oracle sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Linear,
    CyclicOnly,
    TWeak,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetVerdict {
    pub subset: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ordering: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeReport {
    pub lambda: TypeVector,
    pub mode: OracleMode,
    /// Number of subsets examined (orbit representatives under reduction).
    pub subsets: usize,
    pub linear: usize,
    pub cyclic_only: usize,
    pub t_weak: usize,
    pub unsequenceable: usize,
    pub reduced: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub verdicts: Vec<SubsetVerdict>,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub budget: u64,
    pub cap: usize,
    /// Only examine one representative per orbit of the automorphisms
    /// `x·a ↦ u·(x + (1 - φ(a))·c)`.
    pub reduce: bool,
    pub verbose: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            budget: 2_000_000,
            cap: DEFAULT_ORACLE_CAP,
            reduce: false,
            verbose: false,
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of subsets of `G \ {id}` having type `λ`.
pub fn count_subsets_of_type(g: &SemidirectGroup, lambda: &TypeVector) -> u64 {
    let id = g.h().identity();
    (0..g.h().order())
        .map(|a| {
            let avail = if a == id { g.p() - 1 } else { g.p() };
            binomial(avail, lambda.get(a) as u64)
        })
        .fold(1u64, |acc, c| acc.saturating_mul(c))
}

/// All subsets of `G \ {id}` with type `λ`, coset by coset.
pub fn subsets_of_type(g: &SemidirectGroup, lambda: &TypeVector) -> Vec<Vec<GroupElement>> {
    let id = g.h().identity();
    let mut per_coset: Vec<Vec<Vec<GroupElement>>> = Vec::new();
    for a in 0..g.h().order() {
        let start = if a == id { 1 } else { 0 };
        let pool: Vec<GroupElement> = (start..g.p()).map(|x| GroupElement::new(x, a)).collect();
        per_coset.push(combinations(&pool, lambda.get(a)));
    }
    let mut out = vec![Vec::new()];
    for choices in per_coset {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for prefix in &out {
            for c in &choices {
                let mut v = prefix.clone();
                v.extend_from_slice(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub fn combinations<T: Clone>(pool: &[T], r: usize) -> Vec<Vec<T>> {
    fn rec<T: Clone>(pool: &[T], r: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < r - cur.len() {
                break;
            }
            cur.push(pool[i].clone());
            rec(pool, r, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(pool, r, 0, &mut Vec::new(), &mut out);
    out
}

/// Canonical representative under `x·a ↦ u·(x + (1 - φ(a))·c)`, `u ∈ Z_p^*`,
/// `c ∈ Z_p`. Each such map is an automorphism of `G` (scaling commutes with
/// every `φ(a)`, and the shift is conjugation by `c·id`), so it maps
/// (t-weak, linear, cyclic) sequencings to sequencings of the same kind.
fn is_orbit_minimum(g: &SemidirectGroup, sorted: &[GroupElement]) -> bool {
    let p = g.p();
    let mut img = Vec::with_capacity(sorted.len());
    for c in 0..p {
        for u in 1..p {
            img.clear();
            for e in sorted {
                let shift = (1 + p - g.phi().get(e.a)) % p * c % p;
                let x = (e.x + shift) % p * u % p;
                img.push(GroupElement::new(x, e.a));
            }
            img.sort();
            if img.as_slice() < sorted {
                return false;
            }
        }
    }
    true
}

/// Runs the ordering oracle over every subset of type `λ`.
pub fn exhaustive_type_check(
    g: &SemidirectGroup,
    lambda: &TypeVector,
    mode: OracleMode,
    cfg: &SweepConfig,
) -> Result<TypeReport> {
    if lambda.len() != g.h().order() {
        return Err(Error::DimensionMismatch {
            expected: g.h().order(),
            got: lambda.len(),
        });
    }
    let total = count_subsets_of_type(g, lambda);
    if total > cfg.budget {
        return Err(Error::BudgetExceeded(format!(
            "{total} subsets of type {lambda} exceed the budget of {}",
            cfg.budget
        )));
    }
    let mut subsets = subsets_of_type(g, lambda);
    if cfg.reduce {
        subsets.retain(|s| {
            let mut v = s.clone();
            v.sort();
            is_orbit_minimum(g, &v)
        });
    }
    let results: Vec<Result<SubsetVerdict>> = subsets
        .par_iter()
        .map(|elems| classify(g, elems, mode, cfg.cap))
        .collect();
    let mut report = TypeReport {
        lambda: lambda.clone(),
        mode,
        subsets: 0,
        linear: 0,
        cyclic_only: 0,
        t_weak: 0,
        unsequenceable: 0,
        reduced: cfg.reduce,
        failures: Vec::new(),
        verdicts: Vec::new(),
    };
    for r in results {
        let v = r?;
        report.subsets += 1;
        match v.verdict {
            Verdict::Linear => report.linear += 1,
            Verdict::CyclicOnly => report.cyclic_only += 1,
            Verdict::TWeak => report.t_weak += 1,
            Verdict::None => {
                report.unsequenceable += 1;
                report.failures.push(v.subset.clone());
            }
        }
        if cfg.verbose {
            report.verdicts.push(v);
        }
    }
    Ok(report)
}

fn classify(g: &SemidirectGroup, elems: &[GroupElement], mode: OracleMode, cap: usize) -> Result<SubsetVerdict> {
    let s = Subset::new(g, elems.to_vec())?;
    let name = format_elements(&s.sorted());
    let (verdict, ordering) = match mode {
        OracleMode::TWeak(t) => match brute_force_sequence(g, &s, OracleMode::TWeak(t), cap)? {
            Some(o) => (Verdict::TWeak, Some(o)),
            None => (Verdict::None, None),
        },
        OracleMode::Linear | OracleMode::Any => match brute_force_sequence(g, &s, OracleMode::Linear, cap)? {
            Some(o) => (Verdict::Linear, Some(o)),
            None if mode == OracleMode::Any => match brute_force_sequence(g, &s, OracleMode::Any, cap)? {
                Some(o) => (Verdict::CyclicOnly, Some(o)),
                None => (Verdict::None, None),
            },
            None => (Verdict::None, None),
        },
    };
    Ok(SubsetVerdict {
        subset: name,
        verdict,
        ordering: ordering.map(|o| format_elements(&o)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(x: u64, a: usize) -> GroupElement {
        GroupElement::new(x, a)
    }

    #[test]
    fn partial_sums_examples() {
        let g = SemidirectGroup::dihedral(7).unwrap();
        assert_eq!(partial_sums(&g, &[e(1, 0), e(2, 0)]), vec![e(0, 0), e(1, 0), e(3, 0)]);
        let z2 = FiniteGroupTable::cyclic(2);
        assert_eq!(quotient_partial_sums(&z2, &[0, 1, 0, 0, 1]), vec![0, 0, 1, 1, 1, 0]);
        let z3 = FiniteGroupTable::cyclic(3);
        assert_eq!(quotient_partial_sums(&z3, &[1, 1, 0, 2, 1]), vec![0, 1, 2, 2, 1, 2]);
    }

    #[test]
    fn predicates() {
        let g = SemidirectGroup::dihedral(5).unwrap();
        assert!(is_linear_sequencing(&g, &[e(1, 0), e(2, 0)]).unwrap());
        assert!(!is_linear_sequencing(&g, &[e(2, 0), e(3, 0)]).unwrap());
        assert!(is_cyclic_sequencing(&g, &[e(2, 0), e(3, 0)]).unwrap());
        assert!(!is_t_weak_sequencing(&g, &[e(2, 0), e(3, 0), e(1, 0)], 2).unwrap());
        let g7 = SemidirectGroup::dihedral(7).unwrap();
        assert!(is_linear_sequencing(&g7, &[e(3, 1), e(3, 1)]).is_err());
        assert!(is_t_weak_sequencing(&g, &[e(1, 0)], 2).is_err());
        assert!(is_t_weak_sequencing(&g, &[e(1, 0)], 0).is_err());
    }

    #[test]
    fn weak_predicate_extremes() {
        let g = SemidirectGroup::dihedral(5).unwrap();
        let lin = [e(1, 0), e(2, 0)];
        assert!(is_t_weak_sequencing(&g, &lin, 2).unwrap());
        let cyc = [e(2, 0), e(3, 0)];
        assert!(is_t_weak_sequencing(&g, &cyc, 1).unwrap());
        assert!(!is_t_weak_sequencing(&g, &cyc, 2).unwrap());
    }

    #[test]
    fn types() {
        let g = SemidirectGroup::dihedral(7).unwrap();
        let s = Subset::parse(&g, "1.0,2.0,3.0,1.1,4.1").unwrap();
        assert_eq!(subset_type(&g, &s), TypeVector(vec![3, 2]));
        let g = SemidirectGroup::g3p(7, 2).unwrap();
        let s = Subset::parse(&g, "1.1,2.1,3.0,1.2,4.1").unwrap();
        assert_eq!(subset_type(&g, &s), TypeVector(vec![1, 3, 1]));
        let s = Subset::parse(&g, "1.0,2.0").unwrap();
        assert_eq!(subset_type(&g, &s), TypeVector(vec![2, 0, 0]));
    }

    #[test]
    fn quotient_sequencing_predicate() {
        let z2 = FiniteGroupTable::cyclic(2);
        assert!(is_quotient_sequencing(&z2, &[0, 1, 0, 0, 1], 5));
        assert!(!is_quotient_sequencing(&z2, &[0, 0, 0], 2));
        let z3 = FiniteGroupTable::cyclic(3);
        assert!(is_quotient_sequencing(&z3, &[1, 1, 0, 2, 1], 3));
    }

    #[test]
    fn parse_and_reject() {
        let g = SemidirectGroup::dihedral(7).unwrap();
        let s = Subset::parse(&g, "3.1, 2.0,5.1").unwrap();
        assert_eq!(s.elements(), &[e(3, 1), e(2, 0), e(5, 1)]);
        assert!(Subset::parse(&g, "0.0,1.0").is_err());
        assert!(Subset::parse(&g, "8.0").is_err());
        assert!(Subset::parse(&g, "1.0,1.0").is_err());
        assert!(Subset::parse(&g, "1-0").is_err());
    }

    #[test]
    fn brute_force_examples() {
        let g = SemidirectGroup::dihedral(5).unwrap();
        let s = Subset::parse(&g, "2.0,3.0").unwrap();
        assert_eq!(brute_force_sequence(&g, &s, OracleMode::Linear, 12).unwrap(), None);
        let o = brute_force_sequence(&g, &s, OracleMode::Any, 12).unwrap().unwrap();
        assert!(is_cyclic_sequencing(&g, &o).unwrap());
        let big = Subset::new(&g, g.elements().into_iter().skip(1).collect()).unwrap();
        assert!(brute_force_sequence(&g, &big, OracleMode::Any, 5).is_err());
    }

    #[test]
    fn type_sweeps() {
        let g = SemidirectGroup::dihedral(7).unwrap();
        let cfg = SweepConfig::default();
        let r = exhaustive_type_check(&g, &TypeVector(vec![3, 2]), OracleMode::Any, &cfg).unwrap();
        assert_eq!(r.subsets as u64, count_subsets_of_type(&g, &TypeVector(vec![3, 2])));
        assert_eq!(r.unsequenceable, 0);
        let r = exhaustive_type_check(&g, &TypeVector(vec![0, 5]), OracleMode::Any, &cfg).unwrap();
        assert_eq!(r.unsequenceable, 0);
        let g5 = SemidirectGroup::dihedral(5).unwrap();
        let r = exhaustive_type_check(&g5, &TypeVector(vec![2, 0]), OracleMode::Any, &cfg).unwrap();
        // {1,4} and {2,3} sum to zero
        assert_eq!(r.cyclic_only, 2);
        assert_eq!(r.unsequenceable, 0);
    }

    #[test]
    fn reduced_sweep_agrees() {
        let g = SemidirectGroup::dihedral(7).unwrap();
        let lam = TypeVector(vec![2, 2]);
        let full = exhaustive_type_check(&g, &lam, OracleMode::Linear, &SweepConfig::default()).unwrap();
        let cfg = SweepConfig { reduce: true, ..SweepConfig::default() };
        let red = exhaustive_type_check(&g, &lam, OracleMode::Linear, &cfg).unwrap();
        assert!(red.subsets < full.subsets);
        assert_eq!(full.unsequenceable == 0, red.unsequenceable == 0);
    }

    #[test]
    fn budget_is_enforced() {
        let g = SemidirectGroup::dihedral(13).unwrap();
        let cfg = SweepConfig { budget: 10, ..SweepConfig::default() };
        assert!(matches!(
            exhaustive_type_check(&g, &TypeVector(vec![3, 3]), OracleMode::Any, &cfg),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn all_types_enumerated() {
        let v = TypeVector::all(3, 4);
        assert_eq!(v.len(), 15);
        assert_eq!(v[0], TypeVector(vec![4, 0, 0]));
        assert!(v.iter().all(|t| t.k() == 4));
    }

    fn arb_ordering() -> impl Strategy<Value = (u64, Vec<GroupElement>)> {
        (prop::sample::select(vec![5u64, 7, 11, 13]), 1usize..7).prop_flat_map(|(p, k)| {
            let els: Vec<GroupElement> = (0..2).flat_map(|a| (0..p).map(move |x| GroupElement::new(x, a))).skip(1).collect();
            (Just(p), prop::sample::subsequence(els, k).prop_shuffle())
        })
    }

    proptest! {
        #[test]
        fn repeated_sum_iff_identity_segment((p, ord) in arb_ordering()) {
            let g = SemidirectGroup::dihedral(p).unwrap();
            let sums = partial_sums(&g, &ord);
            for i in 0..sums.len() {
                for j in i + 1..sums.len() {
                    let seg = ord[i..j].iter().fold(g.identity(), |acc, &x| g.multiply(acc, x));
                    prop_assert_eq!(sums[i] == sums[j], seg == g.identity());
                }
            }
        }

        #[test]
        fn projection_commutes_with_partial_sums((p, ord) in arb_ordering()) {
            let g = SemidirectGroup::dihedral(p).unwrap();
            let a: Vec<usize> = ord.iter().map(|u| u.a).collect();
            let b = quotient_partial_sums(g.h(), &a);
            let sums: Vec<usize> = partial_sums(&g, &ord).iter().map(|s| s.a).collect();
            prop_assert_eq!(sums, b);
        }

        #[test]
        fn linear_implies_every_weak((p, ord) in arb_ordering()) {
            let g = SemidirectGroup::dihedral(p).unwrap();
            if is_linear_sequencing(&g, &ord).unwrap() {
                for t in 1..=ord.len() {
                    prop_assert!(is_t_weak_sequencing(&g, &ord, t).unwrap());
                }
            }
        }

        #[test]
        fn any_fails_only_if_linear_and_cyclic_fail((p, ord) in arb_ordering()) {
            let g = SemidirectGroup::dihedral(p).unwrap();
            let s = Subset::new(&g, ord).unwrap();
            let any = brute_force_sequence(&g, &s, OracleMode::Any, 12).unwrap();
            if let Some(o) = &any {
                prop_assert!(is_sequencing(&g, o).unwrap());
            } else {
                prop_assert!(brute_force_sequence(&g, &s, OracleMode::Linear, 12).unwrap().is_none());
            }
        }
    }
}
