use serde::{Deserialize, Serialize};
use std::fmt;

use super::ring::CoefficientRing;
use crate::error::{Error, Result};

/// An exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    /// Renders with the given variable letter, 1-based: `x1^2*x3`.
    pub fn display_with(&self, var: &str) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("{var}{}", i + 1) } else { format!("{var}{}^{e}", i + 1) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

/// A homogeneous linear form `Σ c_i x_i` stored densely over `nvars` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm<T> {
    coeffs: Vec<T>,
}

impl<T: Clone> LinearForm<T> {
    pub fn new<R: CoefficientRing<Elem = T>>(ring: &R, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.iter().all(|c| ring.is_zero(c)) {
            return Err(Error::Precondition("a linear form needs a nonzero coefficient".into()));
        }
        Ok(LinearForm { coeffs })
    }

    /// Builds a form from `(variable, coefficient)` pairs; repeated variables add up.
    pub fn from_terms<R: CoefficientRing<Elem = T>>(ring: &R, nvars: usize, terms: &[(usize, T)]) -> Result<Self> {
        let mut coeffs = vec![ring.zero(); nvars];
        for (v, c) in terms {
            if *v >= nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: v + 1 });
            }
            coeffs[*v] = ring.add(&coeffs[*v], c);
        }
        Self::new(ring, coeffs)
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, v: usize) -> &T {
        &self.coeffs[v]
    }

    /// Nonzero `(variable, coefficient)` pairs.
    pub fn terms<'a, R: CoefficientRing<Elem = T>>(&'a self, ring: &'a R) -> impl Iterator<Item = (usize, &'a T)> + 'a {
        self.coeffs.iter().enumerate().filter(move |(_, c)| !ring.is_zero(c))
    }

    pub fn support_size<R: CoefficientRing<Elem = T>>(&self, ring: &R) -> usize {
        self.terms(ring).count()
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> LinearForm<U> {
        LinearForm {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Renders as `(x1 + r x2 - x3)` given a per-coefficient printer returning
    /// `None` for zero.
    pub fn display_with(&self, var: &str, fmt_coeff: impl Fn(&T) -> Option<String>) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            let Some(s) = fmt_coeff(c) else { continue };
            let (neg, body) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            let term = if body == "1" { format!("{var}{}", i + 1) } else { format!("{body}{var}{}", i + 1) };
            if out.is_empty() {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        format!("({out})")
    }
}

pub(crate) fn check_dims<T: Clone>(forms: &[LinearForm<T>], nvars: usize) -> Result<()> {
    for f in forms {
        if f.nvars() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: f.nvars(),
            });
        }
    }
    Ok(())
}

/// Result of grouping forms into classes of mutually proportional forms.
#[derive(Debug, Clone, PartialEq)]
pub struct DedupeReport<T> {
    /// One representative per class: the first member in input order.
    pub representatives: Vec<LinearForm<T>>,
    /// Size of each class, aligned with `representatives`.
    pub multiplicities: Vec<usize>,
    /// Class index of every input form.
    pub class_of: Vec<usize>,
}

/// Groups forms that are scalar multiples of one another. Proportionality is
/// tested by cross-multiplication, which is exact over any integral domain.
pub fn dedupe_proportional<R: CoefficientRing>(ring: &R, forms: &[LinearForm<R::Elem>]) -> DedupeReport<R::Elem> {
    let mut reps: Vec<LinearForm<R::Elem>> = Vec::new();
    let mut mult = Vec::new();
    let mut class_of = Vec::with_capacity(forms.len());
    for f in forms {
        let found = reps.iter().position(|g| proportional(ring, f, g));
        match found {
            Some(i) => {
                mult[i] += 1;
                class_of.push(i);
            }
            None => {
                class_of.push(reps.len());
                reps.push(f.clone());
                mult.push(1);
            }
        }
    }
    DedupeReport {
        representatives: reps,
        multiplicities: mult,
        class_of,
    }
}

fn proportional<R: CoefficientRing>(ring: &R, f: &LinearForm<R::Elem>, g: &LinearForm<R::Elem>) -> bool {
    if f.nvars() != g.nvars() {
        return false;
    }
    let n = f.nvars();
    if (0..n).any(|i| ring.is_zero(f.coeff(i)) != ring.is_zero(g.coeff(i))) {
        return false;
    }
    let Some(pivot) = (0..n).find(|&i| !ring.is_zero(f.coeff(i))) else {
        return true;
    };
    // f = (f_p / g_p) g  iff  f_i g_p = g_i f_p for all i
    (0..n).all(|i| ring.mul(f.coeff(i), g.coeff(pivot)) == ring.mul(g.coeff(i), f.coeff(pivot)))
}
