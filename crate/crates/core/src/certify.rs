//! The sequencing polynomial `p_a`, certificate search and verification, and
//! prime-exception analysis.
//!
//! A certificate is family-level: its factors are built from symbolic
//! multipliers (`±1` for dihedral and direct products, powers of `r` for
//! `G_3p`), so one coefficient covers every admissible prime at once.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};
use std::fmt;

use crate::arith::{bigint_mod, factorial, factorize, mul_mod};
use crate::error::{Error, Result};
use crate::groups::{FamilyTag, FiniteGroupTable, GroupDescriptor, GroupElement, SemidirectGroup};
use crate::poly::json::{int_from_json, int_to_json, Coefficient, JsonCoeff};
use crate::poly::{
    dedupe_proportional, expand_truncated, CoefficientRing, Eisenstein, EisensteinIntegers, Integers, IntegersMod,
    LinearForm, Monomial, QuadratureOptions, QuadratureRing,
};
use crate::sequencing::{QuotientSequencing, Subset, TypeVector};

/// The group family a certificate is stated for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertFamily {
    Dihedral,
    G3p,
    Direct { e: usize },
    /// A single concrete group; coefficients live in `Z_p`.
    Custom(SemidirectGroup),
}

impl CertFamily {
    pub fn from_group(g: &SemidirectGroup) -> Self {
        match g.family() {
            FamilyTag::Dihedral if g.p() > 2 => CertFamily::Dihedral,
            FamilyTag::G3p => CertFamily::G3p,
            FamilyTag::Direct => CertFamily::Direct { e: g.h().order() },
            _ => CertFamily::Custom(g.clone()),
        }
    }

    /// Parses `dihedral`, `g3p`, `direct` (with `e`), also accepting the
    /// aliases `d2p`, `prod`.
    pub fn parse(name: &str, e: Option<usize>) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "dihedral" | "d2p" => Ok(CertFamily::Dihedral),
            "g3p" => Ok(CertFamily::G3p),
            "direct" | "prod" => Ok(CertFamily::Direct { e: e.unwrap_or(2) }),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CertFamily::Dihedral => "dihedral",
            CertFamily::G3p => "g3p",
            CertFamily::Direct { .. } => "direct",
            CertFamily::Custom(_) => "custom",
        }
    }

    pub fn h(&self) -> FiniteGroupTable {
        match self {
            CertFamily::Dihedral => FiniteGroupTable::cyclic(2),
            CertFamily::G3p => FiniteGroupTable::cyclic(3),
            CertFamily::Direct { e } => FiniteGroupTable::cyclic(*e),
            CertFamily::Custom(g) => g.h().clone(),
        }
    }

    pub fn e(&self) -> usize {
        self.h().order()
    }

    /// Whether a concrete group belongs to this family.
    pub fn contains(&self, g: &SemidirectGroup) -> bool {
        match self {
            CertFamily::Dihedral => g.family() == FamilyTag::Dihedral && g.p() > 2,
            CertFamily::G3p => g.family() == FamilyTag::G3p,
            CertFamily::Direct { e } => g.family() == FamilyTag::Direct && g.h().order() == *e,
            CertFamily::Custom(h) => h == g,
        }
    }

    pub(crate) fn json_fields(&self, m: &mut Map<String, Value>) {
        m.insert("family".into(), json!(self.name()));
        match self {
            CertFamily::Direct { e } => {
                m.insert("e".into(), json!(e));
            }
            CertFamily::Custom(g) => {
                m.insert("group".into(), serde_json::to_value(g.descriptor()).expect("descriptor"));
            }
            _ => {}
        }
    }

    pub(crate) fn from_json_fields(v: &Value) -> Result<Self> {
        let name = v
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::MalformedCertificate("missing family".into()))?;
        if name == "custom" {
            let d: GroupDescriptor = serde_json::from_value(
                v.get("group")
                    .cloned()
                    .ok_or_else(|| Error::MalformedCertificate("custom family needs a group".into()))?,
            )
            .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
            return Ok(CertFamily::Custom(d.build()?));
        }
        let e = v.get("e").and_then(Value::as_u64).map(|e| e as usize);
        CertFamily::parse(name, e).map_err(|e| Error::MalformedCertificate(e.to_string()))
    }
}

impl fmt::Display for CertFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertFamily::Direct { e } => write!(f, "direct(e={e})"),
            CertFamily::Custom(g) => write!(f, "custom(p={})", g.p()),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeqMode {
    /// The pair `(0, k)` is left out, allowing `s_0 = s_k`.
    Sequencing,
    /// The pair `(0, k)` is kept: all partial sums distinct.
    Linear,
}

impl SeqMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sequencing" | "seq" => Ok(SeqMode::Sequencing),
            "linear" => Ok(SeqMode::Linear),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SeqMode::Sequencing => "sequencing",
            SeqMode::Linear => "linear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorMode {
    Raw,
    /// Mutually proportional factors kept once.
    Deduped,
    /// Second-block factors proportional to a first-block difference dropped;
    /// their vanishing already forces two equal elements.
    Reduced,
}

impl FactorMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(FactorMode::Raw),
            "deduped" | "dedup" => Ok(FactorMode::Deduped),
            "reduced" => Ok(FactorMode::Reduced),
            _ => Err(Error::Parse(format!("unknown factor mode {s:?}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FactorMode::Raw => "raw",
            FactorMode::Deduped => "deduped",
            FactorMode::Reduced => "reduced",
        }
    }
}

/// A linear form whose coefficients are `±φ(h)` for elements `h ∈ H`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicForm {
    /// `(variable, h, sign)`, the term `sign·φ(h)·x_variable`.
    pub terms: Vec<(usize, usize, i8)>,
}

impl SymbolicForm {
    pub fn difference(j: usize, i: usize, id: usize) -> Self {
        SymbolicForm {
            terms: vec![(j, id, 1), (i, id, -1)],
        }
    }

    /// `φ(c) x_first + φ(c·w_1) x_{first+1} + …` over the given word.
    pub fn run(h: &FiniteGroupTable, start: usize, first: usize, word: &[usize]) -> Self {
        let mut terms = Vec::with_capacity(word.len() + 1);
        let mut cur = start;
        terms.push((first, cur, 1));
        for (m, &w) in word.iter().enumerate() {
            cur = h.mul(cur, w);
            terms.push((first + m + 1, cur, 1));
        }
        SymbolicForm { terms }
    }
}

/// Factors of `p_a` in symbolic form, variables 0-based.
pub fn pa_symbolic(h: &FiniteGroupTable, a: &[usize], mode: SeqMode) -> Vec<SymbolicForm> {
    let k = a.len();
    let mut out = difference_block(h, a);
    let q = QuotientSequencing::new(h, a.to_vec()).expect("arrangement checked by caller");
    let b = q.b();
    for i in 0..=k {
        for j in i + 2..=k {
            if b[i] != b[j] || (i == 0 && j == k && mode == SeqMode::Sequencing) {
                continue;
            }
            out.push(SymbolicForm::run(h, h.identity(), i, &a[i..j - 1]));
        }
    }
    out
}

/// The factors `(x_j - x_i)` for `i < j` with `a_i = a_j`.
pub fn difference_block(h: &FiniteGroupTable, a: &[usize]) -> Vec<SymbolicForm> {
    let mut out = Vec::new();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] == a[j] {
                out.push(SymbolicForm::difference(j, i, h.identity()));
            }
        }
    }
    out
}

/// Realized factor lists over the family's coefficient ring.
#[derive(Debug, Clone, PartialEq)]
pub enum FormList {
    Integer(Vec<LinearForm<BigInt>>),
    Eisenstein(Vec<LinearForm<Eisenstein>>),
    Modular(IntegersMod, Vec<LinearForm<u64>>),
}

fn realize_with<R: CoefficientRing>(
    ring: &R,
    nvars: usize,
    sym: &[SymbolicForm],
    phi: impl Fn(usize) -> R::Elem,
) -> Result<Vec<LinearForm<R::Elem>>> {
    sym.iter()
        .map(|f| {
            let terms: Vec<(usize, R::Elem)> = f
                .terms
                .iter()
                .map(|&(v, hh, s)| {
                    let c = phi(hh);
                    (v, if s < 0 { ring.neg(&c) } else { c })
                })
                .collect();
            LinearForm::from_terms(ring, nvars, &terms)
        })
        .collect()
}

/// Substitutes the family's multipliers into symbolic forms.
pub fn realize(family: &CertFamily, nvars: usize, sym: &[SymbolicForm]) -> Result<FormList> {
    Ok(match family {
        CertFamily::Dihedral => FormList::Integer(realize_with(&Integers, nvars, sym, |hh| {
            BigInt::from(if hh == 0 { 1 } else { -1 })
        })?),
        CertFamily::Direct { .. } => FormList::Integer(realize_with(&Integers, nvars, sym, |_| BigInt::one())?),
        CertFamily::G3p => FormList::Eisenstein(realize_with(&EisensteinIntegers, nvars, sym, |hh| match hh {
            0 => Eisenstein::new(1, 0),
            1 => Eisenstein::new(0, 1),
            _ => Eisenstein::new(-1, -1),
        })?),
        CertFamily::Custom(g) => {
            let ring = IntegersMod::new(g.p());
            FormList::Modular(ring, realize_with(&ring, nvars, sym, |hh| g.phi().get(hh))?)
        }
    })
}

impl FormList {
    pub fn len(&self) -> usize {
        match self {
            FormList::Integer(v) => v.len(),
            FormList::Eisenstein(v) => v.len(),
            FormList::Modular(_, v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Keeps the first form of every proportionality class.
    pub fn deduped(&self) -> FormList {
        match self {
            FormList::Integer(v) => FormList::Integer(dedupe_proportional(&Integers, v).representatives),
            FormList::Eisenstein(v) => FormList::Eisenstein(dedupe_proportional(&EisensteinIntegers, v).representatives),
            FormList::Modular(r, v) => FormList::Modular(*r, dedupe_proportional(r, v).representatives),
        }
    }

    /// Drops the forms with index in `first_block..end` that are proportional
    /// to one of the first `first_block` forms.
    pub fn reduced(&self, first_block: usize, end: usize) -> FormList {
        fn keep<R: CoefficientRing>(r: &R, v: &[LinearForm<R::Elem>], n: usize, end: usize) -> Vec<LinearForm<R::Elem>> {
            let classes = dedupe_proportional(r, v).class_of;
            v.iter()
                .enumerate()
                .filter(|&(i, _)| i < n || i >= end || classes[i] >= n)
                .map(|(_, f)| f.clone())
                .collect()
        }
        match self {
            FormList::Integer(v) => FormList::Integer(keep(&Integers, v, first_block, end)),
            FormList::Eisenstein(v) => FormList::Eisenstein(keep(&EisensteinIntegers, v, first_block, end)),
            FormList::Modular(r, v) => FormList::Modular(*r, keep(r, v, first_block, end)),
        }
    }

    /// `blocks` gives the number of leading difference factors and the end of
    /// the second block; forms after it (tail boundary forms) are never
    /// reduced.
    pub fn in_mode(self, mode: FactorMode, blocks: (usize, usize)) -> FormList {
        match mode {
            FactorMode::Raw => self,
            FactorMode::Deduped => self.deduped(),
            FactorMode::Reduced => self.reduced(blocks.0, blocks.1),
        }
    }

    /// Exact coefficient of `target` in the product.
    pub fn coefficient(&self, target: &Monomial, opts: &QuadratureOptions) -> Result<Coefficient> {
        Ok(match self {
            FormList::Integer(v) => Coefficient::Integer(Integers.coefficient_quadrature(v, target, opts)?.0),
            FormList::Eisenstein(v) => Coefficient::Eisenstein(EisensteinIntegers.coefficient_quadrature(v, target, opts)?.0),
            FormList::Modular(r, v) => Coefficient::Integer(BigInt::from(r.coefficient_quadrature(v, target, opts)?.0)),
        })
    }

    /// Every nonzero term of the product dividing `cap`, sorted.
    pub fn expand(&self, cap: &Monomial) -> Result<Vec<(Monomial, Coefficient)>> {
        Ok(match self {
            FormList::Integer(v) => expand_truncated(&Integers, v, cap)?
                .terms()
                .into_iter()
                .map(|(m, c)| (m, Coefficient::Integer(c)))
                .collect(),
            FormList::Eisenstein(v) => expand_truncated(&EisensteinIntegers, v, cap)?
                .terms()
                .into_iter()
                .map(|(m, c)| (m, Coefficient::Eisenstein(c)))
                .collect(),
            FormList::Modular(r, v) => expand_truncated(r, v, cap)?
                .terms()
                .into_iter()
                .map(|(m, c)| (m, Coefficient::Integer(BigInt::from(c))))
                .collect(),
        })
    }

    /// Variable supports of the factors.
    pub fn supports(&self) -> Vec<Vec<usize>> {
        fn sup<R: CoefficientRing>(r: &R, v: &[LinearForm<R::Elem>]) -> Vec<Vec<usize>> {
            v.iter().map(|f| f.terms(r).map(|(i, _)| i).collect()).collect()
        }
        match self {
            FormList::Integer(v) => sup(&Integers, v),
            FormList::Eisenstein(v) => sup(&EisensteinIntegers, v),
            FormList::Modular(r, v) => sup(r, v),
        }
    }

    /// Factors rendered like `(x1 + r x2 - x3)`.
    pub fn display(&self, var: &str) -> Vec<String> {
        match self {
            FormList::Integer(v) => v
                .iter()
                .map(|f| f.display_with(var, |c| (!c.is_zero()).then(|| c.to_string())))
                .collect(),
            FormList::Eisenstein(v) => v
                .iter()
                .map(|f| f.display_with(var, |c| (!c.is_zero()).then(|| eisenstein_short(c))))
                .collect(),
            FormList::Modular(_, v) => v
                .iter()
                .map(|f| f.display_with(var, |c| (*c != 0).then(|| c.to_string())))
                .collect(),
        }
    }

    /// Integer coefficient vectors, when the ring is `Z`.
    pub fn integer_rows(&self) -> Option<Vec<Vec<i64>>> {
        match self {
            FormList::Integer(v) => v
                .iter()
                .map(|f| f.coeffs().iter().map(|c| c.to_i64()).collect::<Option<Vec<_>>>())
                .collect(),
            _ => None,
        }
    }
}

fn eisenstein_short(c: &Eisenstein) -> String {
    // 1, -1, r, -r, r^2 = -1 - r, -r^2 = 1 + r
    let pairs = [
        ((1, 0), "1"),
        ((-1, 0), "-1"),
        ((0, 1), "r"),
        ((0, -1), "-r"),
        ((-1, -1), "r^2"),
        ((1, 1), "-r^2"),
    ];
    for ((u, v), s) in pairs {
        if c.u == BigInt::from(u) && c.v == BigInt::from(v) {
            return s.into();
        }
    }
    format!("({c})")
}

/// Builds `p_a` for the family.
pub fn build_pa(family: &CertFamily, a: &[usize], mode: SeqMode) -> Result<FormList> {
    let h = family.h();
    QuotientSequencing::new(&h, a.to_vec())?;
    realize(family, a.len(), &pa_symbolic(&h, a, mode))
}

/// Number of pairs `i < j` with `a_i = a_j`.
pub fn first_block_len(a: &[usize]) -> usize {
    (0..a.len()).map(|i| a[i + 1..].iter().filter(|&&x| x == a[i]).count()).sum()
}

/// [`build_pa`] followed by the factor-mode normalization.
pub fn build_pa_in(family: &CertFamily, a: &[usize], mode: SeqMode, factor_mode: FactorMode) -> Result<FormList> {
    let raw = build_pa(family, a, mode)?;
    let n = raw.len();
    Ok(raw.in_mode(factor_mode, (first_block_len(a), n)))
}

/// Exponent of `x_i` is `λ_{a_i} - 1`.
pub fn bounding_monomial(lambda: &TypeVector, a: &[usize]) -> Result<Monomial> {
    if a.iter().any(|&x| x >= lambda.len()) || TypeVector::of_arrangement(a, lambda.len()) != *lambda {
        return Err(Error::InvalidArrangement(format!(
            "arrangement {a:?} does not have type {lambda}"
        )));
    }
    Ok(Monomial(a.iter().map(|&x| lambda.get(x) as u32 - 1).collect()))
}

/// Knobs for certificate search.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Arrangements examined before giving up.
    pub max_arrangements: usize,
    /// Candidate target monomials tried per arrangement (quadrature path).
    pub max_candidates: usize,
    /// Node budget for each coefficient extraction.
    pub node_budget: Option<u64>,
    /// Full truncated expansion is used when the cap has at most this many
    /// divisors; otherwise candidates are tried one at a time.
    pub expansion_limit: u64,
    /// Targets whose coefficient vanishes modulo one of these primes are
    /// skipped (for concrete-group soundness checks).
    pub avoid_primes: Vec<u64>,
    /// Split quadrature across the rayon pool.
    pub parallel: bool,
    /// Restrict the search to these arrangements, in order.
    pub arrangements: Option<Vec<Vec<usize>>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_arrangements: 100_000,
            max_candidates: 2_000,
            node_budget: Some(2_000_000_000),
            expansion_limit: 200_000,
            avoid_primes: Vec::new(),
            parallel: false,
            arrangements: None,
        }
    }
}

impl SearchConfig {
    fn quad(&self) -> QuadratureOptions {
        QuadratureOptions {
            node_budget: self.node_budget,
            parallel: self.parallel,
        }
    }
}

/// A family-level witness that every subset of type `λ` is sequenceable.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub family: CertFamily,
    pub k: usize,
    pub lambda: TypeVector,
    pub a: Vec<usize>,
    pub mode: SeqMode,
    pub factor_mode: FactorMode,
    pub target: Monomial,
    pub coefficient: Coefficient,
    pub bad_primes: Vec<BigInt>,
    pub degree: usize,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        self.family.json_fields(&mut m);
        m.insert("k".into(), json!(self.k));
        m.insert("lambda".into(), json!(self.lambda.0));
        m.insert("a".into(), json!(self.a));
        m.insert("mode".into(), json!(self.mode.as_str()));
        m.insert("factor_mode".into(), json!(self.factor_mode.as_str()));
        m.insert("target".into(), json!(self.target.0));
        m.insert("coefficient".into(), self.coefficient.to_json());
        m.insert("bad_primes".into(), Value::Array(self.bad_primes.iter().map(int_to_json).collect()));
        m.insert("degree".into(), json!(self.degree));
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |s: &str| Error::MalformedCertificate(s.into());
        let family = CertFamily::from_json_fields(v)?;
        let usize_list = |key: &str| -> Result<Vec<usize>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(&format!("missing {key}")))?
                .iter()
                .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad(&format!("bad entry in {key}"))))
                .collect()
        };
        let str_field = |key: &str| -> Result<&str> {
            v.get(key).and_then(Value::as_str).ok_or_else(|| bad(&format!("missing {key}")))
        };
        let a = usize_list("a")?;
        let lambda = TypeVector(usize_list("lambda")?);
        let target = Monomial(usize_list("target")?.into_iter().map(|x| x as u32).collect());
        let coefficient = Coefficient::from_json(v.get("coefficient").ok_or_else(|| bad("missing coefficient"))?)
            .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
        let bad_primes = match v.get("bad_primes") {
            Some(Value::Array(xs)) => xs
                .iter()
                .map(|x| int_from_json(x).map_err(|e| Error::MalformedCertificate(e.to_string())))
                .collect::<Result<Vec<_>>>()?,
            _ => return Err(bad("missing bad_primes")),
        };
        let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| bad("missing k"))? as usize;
        let degree = v.get("degree").and_then(Value::as_u64).ok_or_else(|| bad("missing degree"))? as usize;
        let mode = SeqMode::parse(str_field("mode")?).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
        let factor_mode =
            FactorMode::parse(str_field("factor_mode")?).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
        if a.len() != k || target.nvars() != k || lambda.len() != family.e() {
            return Err(bad("inconsistent lengths"));
        }
        Ok(Certificate {
            family,
            k,
            lambda,
            a,
            mode,
            factor_mode,
            target,
            coefficient,
            bad_primes,
            degree,
        })
    }
}

/// Outcome of [`search_certificate`].
#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(Certificate),
    /// Every arrangement was examined without success.
    Exhausted { arrangements: usize },
    /// Limits were hit before the search space was covered.
    BudgetExceeded { arrangements: usize, reason: String },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

/// Types that certificate search refuses because other results cover them.
pub fn check_search_preconditions(family: &CertFamily, lambda: &TypeVector) -> Result<()> {
    let k = lambda.k();
    if lambda.len() != family.e() {
        return Err(Error::DimensionMismatch {
            expected: family.e(),
            got: lambda.len(),
        });
    }
    if k == 0 {
        return Err(Error::Precondition("empty type".into()));
    }
    match family {
        CertFamily::Dihedral if lambda.0 == [k, 0] || lambda.0 == [0, k] => Err(Error::Precondition(format!(
            "dihedral type {lambda} is covered by results on cyclic groups and by the (0,k) lemma"
        ))),
        CertFamily::G3p if lambda.0 == [k, 0, 0] => Err(Error::Precondition(format!(
            "G_3p type {lambda} lies in the cyclic subgroup"
        ))),
        CertFamily::Custom(g) if g.p() <= 3 => Err(Error::Precondition("certification needs p > 3".into())),
        _ => Ok(()),
    }
}

/// Distinct permutations of the multiset with multiplicities `λ`, in
/// lexicographic order.
pub fn arrangements(lambda: &TypeVector) -> Vec<Vec<usize>> {
    fn rec(counts: &mut [usize], cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..counts.len() {
            if counts[v] > 0 {
                counts[v] -= 1;
                cur.push(v);
                rec(counts, cur, k, out);
                cur.pop();
                counts[v] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let mut counts = lambda.0.clone();
    rec(&mut counts, &mut Vec::new(), lambda.k(), &mut out);
    out
}

/// Searches arrangements of `λ` for a certificate.
pub fn search_certificate(
    family: &CertFamily,
    lambda: &TypeVector,
    mode: SeqMode,
    factor_mode: FactorMode,
    cfg: &SearchConfig,
) -> Result<SearchOutcome> {
    check_search_preconditions(family, lambda)?;
    let candidates = match &cfg.arrangements {
        Some(list) => list.clone(),
        None => arrangements(lambda),
    };
    let mut tried = 0;
    let mut cut: Option<String> = None;
    for a in candidates {
        if tried >= cfg.max_arrangements {
            return Ok(SearchOutcome::BudgetExceeded {
                arrangements: tried,
                reason: format!("arrangement limit {} reached", cfg.max_arrangements),
            });
        }
        tried += 1;
        match certify_arrangement(family, lambda, &a, mode, factor_mode, cfg) {
            Ok(Some(c)) => return Ok(SearchOutcome::Found(c)),
            Ok(None) => {}
            Err(Error::BudgetExceeded(r)) => cut = Some(r),
            Err(e) => return Err(e),
        }
    }
    Ok(match cut {
        Some(reason) => SearchOutcome::BudgetExceeded {
            arrangements: tried,
            reason,
        },
        None => SearchOutcome::Exhausted { arrangements: tried },
    })
}

/// Tries to certify one arrangement: the lexicographically smallest target
/// dividing the bounding monomial with nonzero coefficient.
pub fn certify_arrangement(
    family: &CertFamily,
    lambda: &TypeVector,
    a: &[usize],
    mode: SeqMode,
    factor_mode: FactorMode,
    cfg: &SearchConfig,
) -> Result<Option<Certificate>> {
    let cap = bounding_monomial(lambda, a)?;
    let forms = build_pa_in(family, a, mode, factor_mode)?;
    let Some((target, coefficient)) = find_target(&forms, &cap, cfg)? else {
        return Ok(None);
    };
    let bad_primes = bad_primes(std::slice::from_ref(&coefficient))?;
    Ok(Some(Certificate {
        family: family.clone(),
        k: a.len(),
        lambda: lambda.clone(),
        a: a.to_vec(),
        mode,
        factor_mode,
        degree: forms.len(),
        target,
        coefficient,
        bad_primes,
    }))
}

fn acceptable(c: &Coefficient, avoid: &[u64]) -> bool {
    if c.is_zero() {
        return false;
    }
    let n = c.norm_or_value();
    avoid.iter().all(|&p| bigint_mod(&n, p) != 0)
}

/// The lexicographically smallest monomial of degree `#forms` dividing `cap`
/// whose coefficient is nonzero (and not divisible by an avoided prime).
pub fn find_target(forms: &FormList, cap: &Monomial, cfg: &SearchConfig) -> Result<Option<(Monomial, Coefficient)>> {
    let d = forms.len() as u32;
    if d > cap.degree() {
        return Ok(None);
    }
    let divisors: u64 = cap.exps().iter().fold(1u64, |acc, &e| acc.saturating_mul(e as u64 + 1));
    if divisors <= cfg.expansion_limit && cap.nvars() <= crate::poly::sparse::MAX_VARS {
        let terms = forms.expand(cap)?;
        return Ok(terms.into_iter().find(|(_, c)| acceptable(c, &cfg.avoid_primes)));
    }
    let supports = forms.supports();
    let mut found = None;
    let mut tried = 0usize;
    let mut err = None;
    for_each_divisor(cap, d, &mut |t: &Monomial| {
        if !hall_feasible(&supports, t) {
            return true;
        }
        if tried >= cfg.max_candidates {
            err = Some(Error::BudgetExceeded(format!("{} candidate monomials tried", cfg.max_candidates)));
            return false;
        }
        tried += 1;
        match forms.coefficient(t, &cfg.quad()) {
            Ok(c) if acceptable(&c, &cfg.avoid_primes) => {
                found = Some((t.clone(), c));
                false
            }
            Ok(_) => true,
            Err(e) => {
                err = Some(e);
                false
            }
        }
    });
    match (found, err) {
        (Some(f), _) => Ok(Some(f)),
        (None, Some(e)) => Err(e),
        (None, None) => Ok(None),
    }
}

/// Visits the degree-`d` divisors of `cap` in lexicographic order until the
/// callback returns `false`.
pub fn for_each_divisor(cap: &Monomial, d: u32, f: &mut dyn FnMut(&Monomial) -> bool) {
    let n = cap.nvars();
    let mut suffix = vec![0u32; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + cap.exps()[i];
    }
    fn rec(i: usize, left: u32, cap: &[u32], suffix: &[u32], cur: &mut Vec<u32>, f: &mut dyn FnMut(&Monomial) -> bool) -> bool {
        if i == cap.len() {
            return left != 0 || f(&Monomial(cur.clone()));
        }
        let lo = left.saturating_sub(suffix[i + 1]);
        let hi = cap[i].min(left);
        for e in lo..=hi {
            cur[i] = e;
            if !rec(i + 1, left - e, cap, suffix, cur, f) {
                return false;
            }
        }
        cur[i] = 0;
        true
    }
    let mut cur = vec![0u32; n];
    rec(0, d, cap.exps(), &suffix, &mut cur, f);
}

/// Whether the factors can be distributed over the variables, one variable
/// from each factor's support, hitting exactly the exponents of `t`. A
/// monomial failing this cannot occur in the product.
pub fn hall_feasible(supports: &[Vec<usize>], t: &Monomial) -> bool {
    let n = t.nvars();
    let cap: Vec<u32> = t.exps().to_vec();
    if supports.len() as u32 != t.degree() {
        return false;
    }
    let mut load = vec![0u32; n];
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); n];
    for f in 0..supports.len() {
        let mut seen = vec![false; n];
        if !augment(f, supports, &cap, &mut load, &mut assigned, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(
    f: usize,
    supports: &[Vec<usize>],
    cap: &[u32],
    load: &mut [u32],
    assigned: &mut [Vec<usize>],
    seen: &mut [bool],
) -> bool {
    for &v in &supports[f] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if load[v] < cap[v] {
            load[v] += 1;
            assigned[v].push(f);
            return true;
        }
        for idx in 0..assigned[v].len() {
            let g = assigned[v][idx];
            if augment(g, supports, cap, load, assigned, seen) {
                assigned[v][idx] = f;
                return true;
            }
        }
    }
    false
}

/// Result of re-checking a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub valid: bool,
    /// Target degree differs from the factor count, or the target does not
    /// divide the bounding monomial.
    pub structurally_invalid: bool,
    pub recomputed: Coefficient,
    pub bad_primes: Vec<BigInt>,
    pub factor_count: usize,
    pub notes: Vec<String>,
}

/// Rebuilds `p_a` in the certificate's factor mode and recomputes everything.
pub fn verify_certificate(cert: &Certificate) -> Result<VerifyReport> {
    let h = cert.family.h();
    let mut notes = Vec::new();
    if cert.a.len() != cert.k || cert.target.nvars() != cert.k {
        return Err(Error::MalformedCertificate("length of a or target differs from k".into()));
    }
    QuotientSequencing::new(&h, cert.a.clone()).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    let cap = bounding_monomial(&cert.lambda, &cert.a).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    let forms = build_pa_in(&cert.family, &cert.a, cert.mode, cert.factor_mode)?;
    let mut structurally_invalid = false;
    if cert.target.degree() as usize != forms.len() {
        structurally_invalid = true;
        notes.push(format!(
            "target degree {} differs from the {} factors",
            cert.target.degree(),
            forms.len()
        ));
    }
    if !cert.target.divides(&cap) {
        structurally_invalid = true;
        notes.push(format!("target {} does not divide the bounding monomial {}", cert.target, cap));
    }
    if cert.degree != forms.len() {
        notes.push(format!("stated degree {} but {} factors", cert.degree, forms.len()));
    }
    let recomputed = forms.coefficient(&cert.target, &QuadratureOptions::default())?;
    let bad = if recomputed.is_zero() { Vec::new() } else { bad_primes(std::slice::from_ref(&recomputed))? };
    if recomputed != cert.coefficient {
        notes.push(format!("stated coefficient {} but recomputed {}", cert.coefficient, recomputed));
    }
    if bad != cert.bad_primes {
        notes.push("bad primes differ".into());
    }
    let valid = !structurally_invalid
        && !recomputed.is_zero()
        && recomputed == cert.coefficient
        && bad == cert.bad_primes
        && cert.degree == forms.len();
    Ok(VerifyReport {
        valid,
        structurally_invalid,
        recomputed,
        bad_primes: bad,
        factor_count: forms.len(),
        notes,
    })
}

/// Coefficient of a printed monomial in one factor mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCheck {
    pub factor_mode: FactorMode,
    pub factors: usize,
    /// `None` when the monomial degree differs from the factor count.
    pub coefficient: Option<Coefficient>,
    pub matches: bool,
}

/// Recomputes `target`'s coefficient in `p_a` in every factor mode, comparing
/// with an expected value.
pub fn check_printed(
    family: &CertFamily,
    a: &[usize],
    mode: SeqMode,
    target: &Monomial,
    expected: &Coefficient,
) -> Result<Vec<ModeCheck>> {
    let raw = build_pa(family, a, mode)?;
    let n = raw.len();
    check_forms_all_modes(raw, (first_block_len(a), n), target, expected)
}

pub fn check_forms_all_modes(
    raw: FormList,
    blocks: (usize, usize),
    target: &Monomial,
    expected: &Coefficient,
) -> Result<Vec<ModeCheck>> {
    let mut out = Vec::new();
    for fm in [FactorMode::Raw, FactorMode::Deduped, FactorMode::Reduced] {
        let forms = raw.clone().in_mode(fm, blocks);
        let coefficient = if target.degree() as usize == forms.len() {
            Some(forms.coefficient(target, &QuadratureOptions::default())?)
        } else {
            None
        };
        let matches = coefficient.as_ref() == Some(expected);
        out.push(ModeCheck {
            factor_mode: fm,
            factors: forms.len(),
            coefficient,
            matches,
        });
    }
    Ok(out)
}

/// Primes at which every listed coefficient vanishes. Integer coefficients
/// vanish mod `p` when `p` divides them; `a·r + b` can vanish mod `p` only
/// when `p ≡ 1 (mod 6)` divides `b² - ab + a²`.
pub fn bad_primes(coefficients: &[Coefficient]) -> Result<Vec<BigInt>> {
    if coefficients.is_empty() {
        return Err(Error::Precondition("no coefficients".into()));
    }
    if coefficients.iter().all(|c| c.is_zero()) {
        return Err(Error::Precondition("all coefficients are zero".into()));
    }
    let mut g = BigInt::zero();
    let mut eisenstein = false;
    for c in coefficients {
        if matches!(c, Coefficient::Eisenstein(_)) {
            eisenstein = true;
        }
        g = g.gcd(&c.norm_or_value());
    }
    let primes: Vec<BigInt> = factorize(&g)
        .into_iter()
        .map(|(p, _)| BigInt::from(p))
        .filter(|p| !eisenstein || (p % 6u32) == BigInt::one())
        .collect();
    Ok(primes)
}

/// Whether every prime factor of `m` exceeds `k!`.
pub fn applies_to_composite(m: u64, k: u64) -> Result<bool> {
    if m < 2 || k < 1 {
        return Err(Error::OutOfRange("need m >= 2 and k >= 1".into()));
    }
    let f = factorial(k);
    Ok(factorize(&BigInt::from(m)).into_iter().all(|(p, _)| p > f))
}

/// Whether a certificate yields the sequencing claim in the concrete group.
pub fn certificate_applies(cert: &Certificate, g: &SemidirectGroup) -> bool {
    if !cert.family.contains(g) || g.p() <= 3 {
        return false;
    }
    let max_exp = cert.target.exps().iter().copied().max().unwrap_or(0) as u64;
    if g.p() <= max_exp {
        return false;
    }
    !coefficient_vanishes_in(&cert.coefficient, g)
}

/// Whether the family-level coefficient is zero in `Z_p` under the group's
/// multipliers.
pub fn coefficient_vanishes_in(c: &Coefficient, g: &SemidirectGroup) -> bool {
    let p = g.p();
    match c {
        Coefficient::Integer(n) => bigint_mod(n, p) == 0,
        Coefficient::Eisenstein(e) => {
            let r = g.phi().get(1 % g.h().order());
            let u = bigint_mod(&e.u, p);
            let v = bigint_mod(&e.v, p);
            (u + mul_mod(v, r, p)) % p == 0
        }
    }
}

/// `p_a` evaluated at concrete values in `Z_p`.
pub fn evaluate_symbolic_mod_p(g: &SemidirectGroup, sym: &[SymbolicForm], xs: &[u64]) -> u64 {
    let p = g.p();
    sym.iter().fold(1u64, |acc, f| {
        let val = f.terms.iter().fold(0u64, |s, &(v, hh, sign)| {
            let c = mul_mod(g.phi().get(hh), xs[v] % p, p);
            if sign < 0 {
                (s + p - c) % p
            } else {
                (s + c) % p
            }
        });
        mul_mod(acc, val, p)
    })
}

/// Looks for values `c_i ∈ C_i = {c : c·a_i ∈ S}` making `p_a` nonzero; the
/// matching ordering is returned after checking it with the sequencing
/// predicate of `mode`.
pub fn find_certified_ordering(
    g: &SemidirectGroup,
    s: &Subset,
    a: &[usize],
    mode: SeqMode,
) -> Result<Option<Vec<GroupElement>>> {
    let k = s.len();
    if a.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: a.len() });
    }
    let e = g.h().order();
    if TypeVector::of_arrangement(a, e) != TypeVector::of_arrangement(&s.elements().iter().map(|u| u.a).collect::<Vec<_>>(), e) {
        return Err(Error::InvalidArrangement("arrangement type differs from the subset type".into()));
    }
    let sym = pa_symbolic(g.h(), a, mode);
    let elems = s.sorted();
    let mut used = vec![false; k];
    let mut sums = vec![g.identity()];
    let mut order = Vec::with_capacity(k);
    if !assign(g, &elems, a, mode, &mut used, &mut sums, &mut order) {
        return Ok(None);
    }
    let xs: Vec<u64> = order.iter().map(|u| u.x).collect();
    if evaluate_symbolic_mod_p(g, &sym, &xs) == 0 {
        return Err(Error::Precondition("ordering found but p_a vanishes there".into()));
    }
    let ok = match mode {
        SeqMode::Linear => crate::sequencing::is_linear_sequencing(g, &order)?,
        SeqMode::Sequencing => crate::sequencing::is_sequencing(g, &order)?,
    };
    if !ok {
        return Err(Error::Precondition("p_a is nonzero but the ordering fails the predicate".into()));
    }
    Ok(Some(order))
}

fn assign(
    g: &SemidirectGroup,
    elems: &[GroupElement],
    a: &[usize],
    mode: SeqMode,
    used: &mut [bool],
    sums: &mut Vec<GroupElement>,
    order: &mut Vec<GroupElement>,
) -> bool {
    let k = a.len();
    let j = order.len();
    if j == k {
        return true;
    }
    let last = *sums.last().unwrap();
    for idx in 0..elems.len() {
        if used[idx] || elems[idx].a != a[j] {
            continue;
        }
        let next = g.multiply(last, elems[idx]);
        let clash = if j + 1 == k && mode == SeqMode::Sequencing {
            sums[1..].contains(&next)
        } else {
            sums.contains(&next)
        };
        if clash {
            continue;
        }
        used[idx] = true;
        sums.push(next);
        order.push(elems[idx]);
        if assign(g, elems, a, mode, used, sums, order) {
            return true;
        }
        order.pop();
        sums.pop();
        used[idx] = false;
    }
    false
}

/// Parses a printed factorization such as `- 2^5 · 3` or `2 \cdot 3 \cdot 7^2`.
pub fn parse_factorization(text: &str) -> Result<BigInt> {
    let cleaned = text.replace("\\cdot", "·").replace('*', "·").replace('$', "");
    let cleaned = cleaned.trim();
    let (neg, body) = match cleaned.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, cleaned),
    };
    let mut acc = BigInt::one();
    for part in body.split('·') {
        let part = part.trim().trim_matches(|c| c == '{' || c == '}');
        if part.is_empty() {
            return Err(Error::Parse(format!("empty factor in {text:?}")));
        }
        let (base, exp) = match part.split_once('^') {
            Some((b, e)) => (b.trim(), e.trim().trim_matches(|c| c == '{' || c == '}')),
            None => (part, "1"),
        };
        let b: BigUint = base.parse().map_err(|_| Error::Parse(format!("bad factor {part:?}")))?;
        let e: u32 = exp.parse().map_err(|_| Error::Parse(format!("bad exponent {part:?}")))?;
        acc *= BigInt::from(b).pow(e);
    }
    Ok(if neg { -acc } else { acc })
}

/// Printed factorization of `n`, `0` for zero.
pub fn describe_integer(n: &BigInt) -> String {
    if n.is_zero() {
        "0".into()
    } else {
        crate::arith::format_factorization(n)
    }
}
