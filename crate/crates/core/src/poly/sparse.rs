use rustc_hash::FxHashMap;

use super::form::{check_dims, LinearForm, Monomial};
use super::ring::CoefficientRing;
use crate::error::{Error, Result};

/// Exponent vectors are packed 8 bits per variable into a `u128`.
pub const MAX_VARS: usize = 16;
pub const MAX_EXPONENT: u32 = 255;

type Key = u128;

#[inline]
fn exp_of(key: Key, v: usize) -> u32 {
    ((key >> (8 * v)) & 0xff) as u32
}

#[inline]
fn unit(v: usize) -> Key {
    1u128 << (8 * v)
}

fn pack(m: &Monomial) -> Result<Key> {
    if m.nvars() > MAX_VARS {
        return Err(Error::OutOfRange(format!("at most {MAX_VARS} variables are supported")));
    }
    let mut key = 0u128;
    for (v, &e) in m.exps().iter().enumerate() {
        if e > MAX_EXPONENT {
            return Err(Error::OutOfRange(format!("exponent {e} exceeds {MAX_EXPONENT}")));
        }
        key |= (e as u128) << (8 * v);
    }
    Ok(key)
}

fn unpack(key: Key, nvars: usize) -> Monomial {
    Monomial((0..nvars).map(|v| exp_of(key, v)).collect())
}

/// A polynomial as a map from monomials to nonzero coefficients.
#[derive(Debug, Clone)]
pub struct SparsePoly<T> {
    nvars: usize,
    terms: FxHashMap<Key, T>,
}

impl<T: Clone + PartialEq> SparsePoly<T> {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: FxHashMap::default(),
        }
    }

    pub fn constant<R: CoefficientRing<Elem = T>>(ring: &R, nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        if !ring.is_zero(&c) {
            p.terms.insert(0, c);
        }
        p
    }

    pub fn from_form<R: CoefficientRing<Elem = T>>(ring: &R, f: &LinearForm<T>) -> Self {
        let mut p = Self::zero(f.nvars());
        for (v, c) in f.terms(ring) {
            p.terms.insert(unit(v), c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Adds `c·m` to the polynomial.
    pub fn insert<R: CoefficientRing<Elem = T>>(&mut self, ring: &R, m: &Monomial, c: T) -> Result<()> {
        if m.nvars() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: m.nvars(),
            });
        }
        let k = pack(m)?;
        accumulate(ring, &mut self.terms, k, c);
        if self.terms.get(&k).is_some_and(|c| ring.is_zero(c)) {
            self.terms.remove(&k);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `m`, `None` when it is zero.
    pub fn get(&self, m: &Monomial) -> Option<&T> {
        pack(m).ok().and_then(|k| self.terms.get(&k))
    }

    pub fn coefficient<R: CoefficientRing<Elem = T>>(&self, ring: &R, m: &Monomial) -> T {
        self.get(m).cloned().unwrap_or_else(|| ring.zero())
    }

    /// Terms sorted by exponent vector.
    pub fn terms(&self) -> Vec<(Monomial, T)> {
        let mut v: Vec<(Monomial, T)> = self
            .terms
            .iter()
            .map(|(&k, c)| (unpack(k, self.nvars), c.clone()))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&k| unpack(k, self.nvars).degree()).max()
    }

    pub fn is_homogeneous_of_degree(&self, d: u32) -> bool {
        self.terms.keys().all(|&k| unpack(k, self.nvars).degree() == d)
    }

    /// Plain product, no truncation.
    pub fn mul<R: CoefficientRing<Elem = T>>(&self, ring: &R, other: &Self) -> Self {
        let mut out: FxHashMap<Key, T> = FxHashMap::default();
        for (&ka, ca) in &self.terms {
            for (&kb, cb) in &other.terms {
                let c = ring.mul(ca, cb);
                accumulate(ring, &mut out, ka + kb, c);
            }
        }
        out.retain(|_, c| !ring.is_zero(c));
        SparsePoly {
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn equals<R: CoefficientRing<Elem = T>>(&self, ring: &R, other: &Self) -> bool {
        self.nvars == other.nvars
            && self.terms.len() == other.terms.len()
            && self.terms.iter().all(|(k, c)| other.terms.get(k).is_some_and(|d| d == c) && !ring.is_zero(c))
    }
}

fn accumulate<R: CoefficientRing>(ring: &R, map: &mut FxHashMap<Key, R::Elem>, key: Key, c: R::Elem) {
    match map.get_mut(&key) {
        Some(slot) => *slot = ring.add(slot, &c),
        None => {
            map.insert(key, c);
        }
    }
}

/// Sequential multiplication of the forms with no pruning; the reference the
/// truncated expansion is checked against.
pub fn product_naive<R: CoefficientRing>(ring: &R, nvars: usize, forms: &[LinearForm<R::Elem>]) -> Result<SparsePoly<R::Elem>> {
    check_dims(forms, nvars)?;
    if nvars > MAX_VARS {
        return Err(Error::OutOfRange(format!("at most {MAX_VARS} variables are supported")));
    }
    let mut acc = SparsePoly::constant(ring, nvars, ring.one());
    for f in forms {
        acc = acc.mul(ring, &SparsePoly::from_form(ring, f));
    }
    Ok(acc)
}

/// Truncated product of two polynomials: terms not dividing `cap` are dropped.
pub fn truncated_mul<R: CoefficientRing>(
    ring: &R,
    a: &SparsePoly<R::Elem>,
    b: &SparsePoly<R::Elem>,
    cap: &Monomial,
) -> Result<SparsePoly<R::Elem>> {
    let capk = pack(cap)?;
    let nvars = a.nvars;
    let mut out: FxHashMap<Key, R::Elem> = FxHashMap::default();
    for (&ka, ca) in &a.terms {
        for (&kb, cb) in &b.terms {
            let k = ka + kb;
            if (0..nvars).all(|v| exp_of(k, v) <= exp_of(capk, v)) {
                accumulate(ring, &mut out, k, ring.mul(ca, cb));
            }
        }
    }
    out.retain(|_, c| !ring.is_zero(c));
    Ok(SparsePoly { nvars, terms: out })
}

/// Bookkeeping about the forms not yet multiplied in.
struct Remaining {
    count: u32,
    masks: Vec<u32>,
    singles: Vec<u32>,
}

/// The product of `forms` with every monomial that does not divide `cap`
/// removed.
///
/// Forms are processed in ascending order of support size. A partial
/// monomial is dropped as soon as it cannot divide `cap` after the remaining
/// forms are multiplied in: each remaining form raises the degree by one in
/// some variable of its support, so the total slack below `cap` must cover
/// the remaining count, every remaining support must meet a variable with
/// slack, and single-variable forms need slack in their own variable. None of
/// these tests can discard a monomial that contributes to the final result.
pub fn expand_truncated<R: CoefficientRing>(
    ring: &R,
    forms: &[LinearForm<R::Elem>],
    cap: &Monomial,
) -> Result<SparsePoly<R::Elem>> {
    let nvars = cap.nvars();
    check_dims(forms, nvars)?;
    let capk = pack(cap)?;
    let caps: Vec<u32> = cap.exps().to_vec();

    let mut order: Vec<usize> = (0..forms.len()).collect();
    order.sort_by_key(|&i| forms[i].support_size(ring));
    let sparse: Vec<Vec<(usize, R::Elem)>> = order
        .iter()
        .map(|&i| forms[i].terms(ring).map(|(v, c)| (v, c.clone())).collect())
        .collect();

    // suffix summaries
    let n = sparse.len();
    let mut suffix: Vec<Remaining> = Vec::with_capacity(n + 1);
    for start in 0..=n {
        let mut masks: Vec<u32> = Vec::new();
        let mut singles = vec![0u32; nvars];
        for terms in &sparse[start..] {
            let m = terms.iter().fold(0u32, |acc, (v, _)| acc | (1 << v));
            if terms.len() == 1 {
                singles[terms[0].0] += 1;
            }
            if !masks.contains(&m) {
                masks.push(m);
            }
        }
        suffix.push(Remaining {
            count: (n - start) as u32,
            masks,
            singles,
        });
    }

    let feasible = |key: Key, rem: &Remaining| -> bool {
        let mut total = 0u32;
        let mut slack_mask = 0u32;
        for (v, &c) in caps.iter().enumerate() {
            let s = c - exp_of(key, v);
            if s > 0 {
                slack_mask |= 1 << v;
            }
            if rem.singles[v] > s {
                return false;
            }
            total += s;
        }
        total >= rem.count && rem.masks.iter().all(|m| m & slack_mask != 0)
    };

    let mut frontier: FxHashMap<Key, R::Elem> = FxHashMap::default();
    if feasible(0, &suffix[0]) {
        frontier.insert(0, ring.one());
    }
    for (step, terms) in sparse.iter().enumerate() {
        let rem = &suffix[step + 1];
        let mut next: FxHashMap<Key, R::Elem> = FxHashMap::default();
        for (&key, c) in &frontier {
            for (v, coef) in terms {
                if exp_of(key, *v) + 1 > exp_of(capk, *v) {
                    continue;
                }
                let nk = key + unit(*v);
                if !feasible(nk, rem) {
                    continue;
                }
                accumulate(ring, &mut next, nk, ring.mul(c, coef));
            }
        }
        next.retain(|_, c| !ring.is_zero(c));
        frontier = next;
    }
    Ok(SparsePoly { nvars, terms: frontier })
}

/// Coefficient of `target` by truncated expansion with `cap = target`.
pub fn coefficient_by_expansion<R: CoefficientRing>(
    ring: &R,
    forms: &[LinearForm<R::Elem>],
    target: &Monomial,
) -> Result<R::Elem> {
    check_dims(forms, target.nvars())?;
    if target.degree() as usize != forms.len() {
        return Ok(ring.zero());
    }
    let p = expand_truncated(ring, forms, target)?;
    Ok(p.coefficient(ring, target))
}
