//! Finite semidirect products `Z_p ⋊_φ H`.
//!
//! `H` is carried as an explicit Cayley table and `φ` as one unit multiplier
//! of `Z_p` per element of `H`, so that
//! `(x1, a1)·(x2, a2) = (x1 + φ(a1)·x2, a1·a2)`.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::arith::{is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};

/// A finite group given by its multiplication table on indices `0..e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    order: usize,
    cayley: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    names: Option<Vec<String>>,
}

impl FiniteGroupTable {
    pub fn new(cayley: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self> {
        let e = cayley.len();
        if e == 0 {
            return Err(Error::InvalidGroup("empty Cayley table".into()));
        }
        if cayley.iter().any(|row| row.len() != e) {
            return Err(Error::InvalidGroup("Cayley table is not square".into()));
        }
        if let Some(n) = &names {
            if n.len() != e {
                return Err(Error::InvalidGroup("wrong number of element names".into()));
            }
        }
        // Latin square
        for i in 0..e {
            let mut row_seen = vec![false; e];
            let mut col_seen = vec![false; e];
            for j in 0..e {
                let r = cayley[i][j];
                let c = cayley[j][i];
                if r >= e || c >= e || row_seen[r] || col_seen[c] {
                    return Err(Error::InvalidGroup("Cayley table is not a Latin square".into()));
                }
                row_seen[r] = true;
                col_seen[c] = true;
            }
        }
        let identity = (0..e)
            .find(|&i| (0..e).all(|j| cayley[i][j] == j && cayley[j][i] == j))
            .ok_or_else(|| Error::InvalidGroup("no two-sided identity".into()))?;
        for a in 0..e {
            for b in 0..e {
                for c in 0..e {
                    if cayley[cayley[a][b]][c] != cayley[a][cayley[b][c]] {
                        return Err(Error::InvalidGroup("multiplication is not associative".into()));
                    }
                }
            }
        }
        let mut inverses = vec![0; e];
        for (a, inv) in inverses.iter_mut().enumerate() {
            *inv = (0..e)
                .find(|&b| cayley[a][b] == identity && cayley[b][a] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
        }
        Ok(FiniteGroupTable {
            order: e,
            cayley: cayley.into_iter().flatten().collect(),
            identity,
            inverses,
            names,
        })
    }

    /// The cyclic group `Z_e` written additively on `0..e`.
    pub fn cyclic(e: usize) -> Self {
        assert!(e >= 1);
        let table = (0..e).map(|i| (0..e).map(|j| (i + j) % e).collect()).collect();
        FiniteGroupTable::new(table, None).expect("cyclic table is a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// Product of a word in `H`, left to right; the identity for an empty word.
    pub fn product<I: IntoIterator<Item = usize>>(&self, word: I) -> usize {
        word.into_iter().fold(self.identity, |acc, a| self.mul(acc, a))
    }

    pub fn power(&self, a: usize, n: usize) -> usize {
        (0..n).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn name(&self, a: usize) -> String {
        match &self.names {
            Some(n) => n[a].clone(),
            None => a.to_string(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.cayley.chunks(self.order).map(|c| c.to_vec()).collect()
    }
}

/// The homomorphism `φ: H → Aut(Z_p)` as one unit multiplier per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplierMap {
    multipliers: Vec<u64>,
}

impl MultiplierMap {
    /// Validates that `multipliers` is a homomorphism from `h` into `Z_p^*`.
    pub fn new(p: u64, h: &FiniteGroupTable, multipliers: Vec<u64>) -> Result<Self> {
        if multipliers.len() != h.order() {
            return Err(Error::InvalidGroup(format!(
                "expected {} multipliers, got {}",
                h.order(),
                multipliers.len()
            )));
        }
        if multipliers.iter().any(|&m| m == 0 || m >= p) {
            return Err(Error::InvalidGroup("multipliers must be units mod p".into()));
        }
        if multipliers[h.identity()] != 1 {
            return Err(Error::InvalidGroup("identity must act trivially".into()));
        }
        for a in 0..h.order() {
            for b in 0..h.order() {
                if multipliers[h.mul(a, b)] != mul_mod(multipliers[a], multipliers[b], p) {
                    return Err(Error::InvalidGroup(format!(
                        "multipliers are not a homomorphism at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(MultiplierMap { multipliers })
    }

    #[inline]
    pub fn get(&self, a: usize) -> u64 {
        self.multipliers[a]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.multipliers
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    Dihedral,
    G3p,
    Direct,
    Custom,
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyTag::Dihedral => "dihedral",
            FamilyTag::G3p => "g3p",
            FamilyTag::Direct => "direct",
            FamilyTag::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// An element `x·a` with `x ∈ Z_p` and `a` an index into `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub x: u64,
    pub a: usize,
}

impl GroupElement {
    pub fn new(x: u64, a: usize) -> Self {
        GroupElement { x, a }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.x, self.a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemidirectGroup {
    p: u64,
    h: FiniteGroupTable,
    phi: MultiplierMap,
    family: FamilyTag,
}

impl SemidirectGroup {
    pub fn new(p: u64, h: FiniteGroupTable, multipliers: Vec<u64>, family: FamilyTag) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let phi = MultiplierMap::new(p, &h, multipliers)?;
        Ok(SemidirectGroup { p, h, phi, family })
    }

    /// `D_2p = Z_p ⋊ Z_2` with `φ(1) = -1`.
    pub fn dihedral(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            // -1 = 1 mod 2: D_4 is Z_2 × Z_2
            return Self::new(2, FiniteGroupTable::cyclic(2), vec![1, 1], FamilyTag::Dihedral);
        }
        Self::new(p, FiniteGroupTable::cyclic(2), vec![1, p - 1], FamilyTag::Dihedral)
    }

    /// The non-abelian group of order `3p`, with `φ(i) = r^i`.
    pub fn g3p(p: u64, r: u64) -> Result<Self> {
        let roots = find_cube_roots(p)?;
        if !roots.contains(&r) {
            return Err(Error::InvalidGroup(format!(
                "{r} is not a nontrivial cube root of unity mod {p}"
            )));
        }
        Self::new(
            p,
            FiniteGroupTable::cyclic(3),
            vec![1, r, mul_mod(r, r, p)],
            FamilyTag::G3p,
        )
    }

    /// `G_3p` with the smallest nontrivial cube root of unity.
    pub fn g3p_default(p: u64) -> Result<Self> {
        let roots = find_cube_roots(p)?;
        let r = *roots
            .first()
            .ok_or_else(|| Error::InvalidGroup(format!("no nontrivial cube root of unity mod {p}")))?;
        Self::g3p(p, r)
    }

    /// `Z_p × Z_e`.
    pub fn direct(p: u64, e: usize) -> Result<Self> {
        if e < 1 {
            return Err(Error::InvalidGroup("e must be at least 1".into()));
        }
        Self::new(p, FiniteGroupTable::cyclic(e), vec![1; e], FamilyTag::Direct)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn h(&self) -> &FiniteGroupTable {
        &self.h
    }

    pub fn phi(&self) -> &MultiplierMap {
        &self.phi
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn order(&self) -> u64 {
        self.p * self.h.order() as u64
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(0, self.h.identity())
    }

    pub fn is_valid(&self, u: GroupElement) -> bool {
        u.x < self.p && u.a < self.h.order()
    }

    pub fn check(&self, u: GroupElement) -> Result<GroupElement> {
        if self.is_valid(u) {
            Ok(u)
        } else {
            Err(Error::InvalidElement(format!("{u} is not in a group with p={} and |H|={}", self.p, self.h.order())))
        }
    }

    #[inline]
    pub fn multiply(&self, u: GroupElement, v: GroupElement) -> GroupElement {
        let x = (u.x + mul_mod(self.phi.get(u.a), v.x, self.p)) % self.p;
        GroupElement::new(x, self.h.mul(u.a, v.a))
    }

    pub fn inverse(&self, u: GroupElement) -> GroupElement {
        // (x, a)^{-1} = (-φ(a^{-1})·x, a^{-1})
        let ainv = self.h.inverse(u.a);
        let y = mul_mod(self.phi.get(ainv), u.x, self.p);
        GroupElement::new((self.p - y) % self.p, ainv)
    }

    /// All elements, in canonical order.
    pub fn elements(&self) -> Vec<GroupElement> {
        let mut v: Vec<GroupElement> = (0..self.h.order())
            .flat_map(|a| (0..self.p).map(move |x| GroupElement::new(x, a)))
            .collect();
        v.sort();
        v
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        match self.family {
            FamilyTag::Dihedral => GroupDescriptor::Dihedral { p: self.p },
            FamilyTag::G3p => GroupDescriptor::G3p {
                p: self.p,
                r: Some(self.phi.get(1)),
            },
            FamilyTag::Direct => GroupDescriptor::Direct {
                p: self.p,
                e: self.h.order(),
            },
            FamilyTag::Custom => GroupDescriptor::Custom {
                p: self.p,
                cayley: self.h.rows(),
                multipliers: self.phi.as_slice().to_vec(),
            },
        }
    }
}

/// Every `r ∈ [2, p-1]` with `r^3 ≡ 1 (mod p)`.
pub fn find_cube_roots(p: u64) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p % 3 != 1 {
        return Ok(Vec::new());
    }
    // the two roots are g^{(p-1)/3} and its square for any non-cube g
    let w = (2..p)
        .map(|g| pow_mod(g, (p - 1) / 3, p))
        .find(|&w| w != 1)
        .expect("a non-cube exists when 3 | p-1");
    let mut roots = vec![w, mul_mod(w, w, p)];
    roots.sort_unstable();
    Ok(roots)
}

/// JSON description of a concrete group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GroupDescriptor {
    Dihedral {
        p: u64,
    },
    G3p {
        p: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<u64>,
    },
    Direct {
        p: u64,
        e: usize,
    },
    Custom {
        p: u64,
        cayley: Vec<Vec<usize>>,
        multipliers: Vec<u64>,
    },
}

impl GroupDescriptor {
    pub fn build(&self) -> Result<SemidirectGroup> {
        match self {
            GroupDescriptor::Dihedral { p } => SemidirectGroup::dihedral(*p),
            GroupDescriptor::G3p { p, r: Some(r) } => SemidirectGroup::g3p(*p, *r),
            GroupDescriptor::G3p { p, r: None } => SemidirectGroup::g3p_default(*p),
            GroupDescriptor::Direct { p, e } => SemidirectGroup::direct(*p, *e),
            GroupDescriptor::Custom {
                p,
                cayley,
                multipliers,
            } => SemidirectGroup::new(
                *p,
                FiniteGroupTable::new(cayley.clone(), None)?,
                multipliers.clone(),
                FamilyTag::Custom,
            ),
        }
    }
}
