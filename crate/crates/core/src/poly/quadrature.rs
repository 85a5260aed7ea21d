//! Single-coefficient extraction by Combinatorial Nullstellensatz quadrature.
//!
//! For a product `P = ∏ L_f` of linear forms with `deg P = Σ e_i`, the
//! coefficient of `∏ x_i^{e_i}` equals
//! `Σ_{c ∈ A_1 × … × A_n} P(c) / ∏_i ∏_{s ∈ A_i, s ≠ c_i} (c_i - s)`
//! for any sets `A_i` of `e_i + 1` distinct points. The sum is walked
//! depth-first; each factor is evaluated exactly as soon as all of its
//! variables are fixed and a zero value prunes the whole subtree. The
//! remaining terms are accumulated modulo word-sized primes and lifted by CRT.

use num_bigint::BigInt;
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};

use super::form::{check_dims, LinearForm, Monomial};
use super::ring::{CoefficientRing, Eisenstein, EisensteinIntegers, Integers, IntegersMod};
use crate::arith::{channel_primes, crt_symmetric, cube_root_of_unity, inv_mod, mul_mod, Montgomery};
use crate::error::{Error, Result};

/// Limits for one extraction.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuadratureOptions {
    /// Maximum number of search-tree nodes, `None` for unlimited.
    pub node_budget: Option<u64>,
    /// Split the top level of the tree across the rayon pool.
    pub parallel: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuadratureStats {
    pub nodes: u64,
    pub leaves: u64,
    pub channels: usize,
}

/// Rings whose coefficients can be extracted by quadrature.
pub trait QuadratureRing: CoefficientRing {
    fn coefficient_quadrature(
        &self,
        forms: &[LinearForm<Self::Elem>],
        target: &Monomial,
        opts: &QuadratureOptions,
    ) -> Result<(Self::Elem, QuadratureStats)>;
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ZeroTest {
    Exact,
    Mod(i128),
}

struct Channel {
    m: Montgomery,
    /// Image of `r` in Montgomery form.
    omega: u64,
    /// Montgomery weights per variable per point.
    weights: Vec<Vec<u64>>,
}

struct Plan {
    nvars: usize,
    order: Vec<usize>,
    points: Vec<Vec<i64>>,
    /// Factors whose last variable is fixed at each depth.
    completes: Vec<Vec<usize>>,
    forms: Vec<Vec<(usize, i64, i64)>>,
    zero: ZeroTest,
}

impl Plan {
    fn new(forms: Vec<Vec<(usize, i64, i64)>>, target: &Monomial, zero: ZeroTest) -> Self {
        let nvars = target.nvars();
        // centred grids make sums like x_i + x_j vanish more often
        let points: Vec<Vec<i64>> = target
            .exps()
            .iter()
            .map(|&e| {
                let e = e as i64;
                (-(e / 2)..=e - e / 2).collect()
            })
            .collect();

        // greedy order: next variable is the one completing most factors
        let mut placed = vec![false; nvars];
        let mut order = Vec::with_capacity(nvars);
        let mut done = vec![false; forms.len()];
        let mut completes = Vec::with_capacity(nvars);
        for _ in 0..nvars {
            let mut best: Option<(usize, usize, u32)> = None;
            for v in 0..nvars {
                if placed[v] {
                    continue;
                }
                let gain = forms
                    .iter()
                    .enumerate()
                    .filter(|(f, terms)| {
                        !done[*f] && terms.iter().all(|(w, _, _)| *w == v || placed[*w])
                    })
                    .count();
                let e = target.exps()[v];
                let better = match best {
                    None => true,
                    Some((_, g, be)) => gain > g || (gain == g && e < be),
                };
                if better {
                    best = Some((v, gain, e));
                }
            }
            let v = best.unwrap().0;
            placed[v] = true;
            order.push(v);
            let mut here = Vec::new();
            for (f, terms) in forms.iter().enumerate() {
                if !done[f] && terms.iter().all(|(w, _, _)| placed[*w]) {
                    done[f] = true;
                    here.push(f);
                }
            }
            completes.push(here);
        }
        Plan {
            nvars,
            order,
            points,
            completes,
            forms,
            zero,
        }
    }

    fn channel(&self, q: u64, omega: u64) -> Channel {
        let m = Montgomery::new(q);
        let weights = self
            .points
            .iter()
            .map(|pts| {
                pts.iter()
                    .map(|&c| {
                        let mut den = 1u64;
                        for &s in pts {
                            if s != c {
                                den = mul_mod(den, (c - s).rem_euclid(q as i64) as u64, q);
                            }
                        }
                        m.to_mont(inv_mod(den, q))
                    })
                    .collect()
            })
            .collect();
        Channel {
            m,
            omega: m.to_mont(omega),
            weights,
        }
    }

    #[inline]
    fn eval(&self, f: usize, assign: &[i64]) -> Option<(i128, i128)> {
        let mut u = 0i128;
        let mut v = 0i128;
        for &(w, cu, cv) in &self.forms[f] {
            let c = assign[w] as i128;
            u += cu as i128 * c;
            v += cv as i128 * c;
        }
        let zero = match self.zero {
            ZeroTest::Exact => u == 0 && v == 0,
            ZeroTest::Mod(p) => u.rem_euclid(p) == 0,
        };
        if zero {
            None
        } else {
            Some((u, v))
        }
    }

    fn run(&self, channels: &[Channel], opts: &QuadratureOptions) -> Result<(Vec<u64>, QuadratureStats)> {
        let nch = channels.len();
        let nodes = AtomicU64::new(0);
        let budget = opts.node_budget.unwrap_or(u64::MAX);
        let start = |first: Option<usize>| -> Result<(Vec<u64>, u64)> {
            let mut w = Walker {
                plan: self,
                channels,
                assign: vec![0; self.nvars],
                acc: vec![0; (self.nvars + 1) * nch],
                out: vec![0; nch],
                leaves: 0,
                local_nodes: 0,
                nodes: &nodes,
                budget,
            };
            for (ch, c) in channels.iter().enumerate() {
                w.acc[ch] = c.m.one();
            }
            match first {
                None => w.dfs(0)?,
                Some(pi) => w.step(0, pi)?,
            }
            nodes.fetch_add(w.local_nodes, Ordering::Relaxed);
            Ok((w.out, w.leaves))
        };
        let parts: Vec<(Vec<u64>, u64)> = if opts.parallel && self.nvars > 0 {
            let npts = self.points[self.order[0]].len();
            (0..npts)
                .into_par_iter()
                .map(|pi| start(Some(pi)))
                .collect::<Result<Vec<_>>>()?
        } else {
            vec![start(None)?]
        };
        let total = nodes.load(Ordering::Relaxed);
        if total > budget {
            return Err(Error::BudgetExceeded(format!("quadrature exceeded {budget} nodes")));
        }
        let mut out = vec![0u64; nch];
        let mut leaves = 0;
        for (part, l) in parts {
            leaves += l;
            for (ch, c) in channels.iter().enumerate() {
                out[ch] = c.m.add(out[ch], part[ch]);
            }
        }
        let out = channels.iter().zip(out).map(|(c, x)| c.m.from_mont(x)).collect();
        Ok((
            out,
            QuadratureStats {
                nodes: total,
                leaves,
                channels: nch,
            },
        ))
    }
}

struct Walker<'a> {
    plan: &'a Plan,
    channels: &'a [Channel],
    assign: Vec<i64>,
    acc: Vec<u64>,
    out: Vec<u64>,
    leaves: u64,
    local_nodes: u64,
    nodes: &'a AtomicU64,
    budget: u64,
}

impl Walker<'_> {
    fn dfs(&mut self, depth: usize) -> Result<()> {
        let nch = self.channels.len();
        if depth == self.plan.nvars {
            self.leaves += 1;
            for ch in 0..nch {
                let m = &self.channels[ch].m;
                self.out[ch] = m.add(self.out[ch], self.acc[depth * nch + ch]);
            }
            return Ok(());
        }
        let v = self.plan.order[depth];
        for pi in 0..self.plan.points[v].len() {
            self.step(depth, pi)?;
        }
        Ok(())
    }

    fn step(&mut self, depth: usize, pi: usize) -> Result<()> {
        let nch = self.channels.len();
        self.local_nodes += 1;
        if self.local_nodes & 0xffff == 0 {
            let total = self.nodes.fetch_add(self.local_nodes, Ordering::Relaxed) + self.local_nodes;
            self.local_nodes = 0;
            if total > self.budget {
                return Err(Error::BudgetExceeded(format!("quadrature exceeded {} nodes", self.budget)));
            }
        }
        let plan = self.plan;
        let v = plan.order[depth];
        self.assign[v] = plan.points[v][pi];
        let (lo, hi) = self.acc.split_at_mut((depth + 1) * nch);
        let cur = &lo[depth * nch..];
        let next = &mut hi[..nch];
        for ch in 0..nch {
            let c = &self.channels[ch];
            next[ch] = c.m.mul(cur[ch], c.weights[v][pi]);
        }
        for &f in &plan.completes[depth] {
            let Some((u, w)) = plan.eval(f, &self.assign) else {
                return Ok(());
            };
            for ch in 0..nch {
                let c = &self.channels[ch];
                let q = c.m.q as i128;
                let mut val = c.m.to_mont(u.rem_euclid(q) as u64);
                if w != 0 {
                    val = c.m.add(val, c.m.mul(c.m.to_mont(w.rem_euclid(q) as u64), c.omega));
                }
                next[ch] = c.m.mul(next[ch], val);
            }
        }
        self.dfs(depth + 1)
    }
}

fn small_forms<R: CoefficientRing>(ring: &R, forms: &[LinearForm<R::Elem>]) -> Option<Vec<Vec<(usize, i64, i64)>>> {
    forms
        .iter()
        .map(|f| {
            f.terms(ring)
                .map(|(v, c)| ring.to_small(c).map(|(u, w)| (v, u, w)))
                .collect::<Option<Vec<_>>>()
        })
        .collect()
}

/// Bits needed to hold `∏ ||L_f||_1`, times `2^{#forms}` over `Z[r]`.
fn bound_bits(forms: &[Vec<(usize, i64, i64)>], eisenstein: bool) -> u64 {
    let mut bits = 0f64;
    for f in forms {
        let n: f64 = f.iter().map(|&(_, u, v)| (u.unsigned_abs() + v.unsigned_abs()) as f64).sum();
        bits += n.log2();
        if eisenstein {
            bits += 1.0;
        }
    }
    bits.ceil() as u64 + 2
}

fn primes_for(bits: u64) -> Vec<u64> {
    channel_primes((bits / 61 + 1) as usize)
}

fn precheck<T: Clone>(forms: &[LinearForm<T>], target: &Monomial) -> Result<bool> {
    check_dims(forms, target.nvars())?;
    if target.nvars() > 64 {
        return Err(Error::OutOfRange("too many variables".into()));
    }
    Ok(target.degree() as usize == forms.len())
}

impl QuadratureRing for Integers {
    fn coefficient_quadrature(
        &self,
        forms: &[LinearForm<BigInt>],
        target: &Monomial,
        opts: &QuadratureOptions,
    ) -> Result<(BigInt, QuadratureStats)> {
        if !precheck(forms, target)? {
            return Ok((BigInt::from(0), QuadratureStats::default()));
        }
        let small = small_forms(self, forms).ok_or_else(|| Error::OutOfRange("form coefficient exceeds i64".into()))?;
        let qs = primes_for(bound_bits(&small, false));
        let plan = Plan::new(small, target, ZeroTest::Exact);
        let channels: Vec<Channel> = qs.iter().map(|&q| plan.channel(q, 0)).collect();
        let (res, stats) = plan.run(&channels, opts)?;
        let pairs: Vec<(u64, u64)> = qs.iter().copied().zip(res).collect();
        Ok((crt_symmetric(&pairs), stats))
    }
}

impl QuadratureRing for EisensteinIntegers {
    fn coefficient_quadrature(
        &self,
        forms: &[LinearForm<Eisenstein>],
        target: &Monomial,
        opts: &QuadratureOptions,
    ) -> Result<(Eisenstein, QuadratureStats)> {
        if !precheck(forms, target)? {
            return Ok((Eisenstein::default(), QuadratureStats::default()));
        }
        let small = small_forms(self, forms).ok_or_else(|| Error::OutOfRange("form coefficient exceeds i64".into()))?;
        let qs = primes_for(bound_bits(&small, true));
        let plan = Plan::new(small, target, ZeroTest::Exact);
        // two embeddings r ↦ ω, r ↦ ω² per prime
        let mut channels = Vec::new();
        let mut omegas = Vec::new();
        for &q in &qs {
            let w = cube_root_of_unity(q);
            let w2 = mul_mod(w, w, q);
            channels.push(plan.channel(q, w));
            channels.push(plan.channel(q, w2));
            omegas.push((w, w2));
        }
        let (res, stats) = plan.run(&channels, opts)?;
        let mut us = Vec::new();
        let mut vs = Vec::new();
        for (i, &q) in qs.iter().enumerate() {
            let (w, w2) = omegas[i];
            let (a, b) = (res[2 * i], res[2 * i + 1]);
            // a = u + vω, b = u + vω²
            let v = mul_mod((a + q - b) % q, inv_mod((w + q - w2) % q, q), q);
            let u = (a + q - mul_mod(v, w, q)) % q;
            us.push((q, u));
            vs.push((q, v));
        }
        Ok((
            Eisenstein {
                u: crt_symmetric(&us),
                v: crt_symmetric(&vs),
            },
            stats,
        ))
    }
}

impl QuadratureRing for IntegersMod {
    fn coefficient_quadrature(
        &self,
        forms: &[LinearForm<u64>],
        target: &Monomial,
        opts: &QuadratureOptions,
    ) -> Result<(u64, QuadratureStats)> {
        if !precheck(forms, target)? {
            return Ok((0, QuadratureStats::default()));
        }
        if self.p == 2 || target.exps().iter().any(|&e| e as u64 >= self.p) {
            // not enough distinct points in F_p
            let c = super::sparse::coefficient_by_expansion(self, forms, target)?;
            return Ok((c, QuadratureStats::default()));
        }
        let small = small_forms(self, forms).ok_or_else(|| Error::OutOfRange("residue exceeds i64".into()))?;
        let plan = Plan::new(small, target, ZeroTest::Mod(self.p as i128));
        let channels = vec![plan.channel(self.p, 0)];
        let (res, stats) = plan.run(&channels, opts)?;
        Ok((res[0], stats))
    }
}

/// Coefficient of `target` in `∏ forms`.
pub fn coefficient_of<R: QuadratureRing>(ring: &R, forms: &[LinearForm<R::Elem>], target: &Monomial) -> Result<R::Elem> {
    Ok(ring.coefficient_quadrature(forms, target, &QuadratureOptions::default())?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::sparse::coefficient_by_expansion;
    use proptest::prelude::*;

    fn iform(c: &[i64]) -> LinearForm<BigInt> {
        LinearForm::new(&Integers, c.iter().map(|&x| BigInt::from(x)).collect()).unwrap()
    }

    #[test]
    fn vandermonde() {
        // ∏_{i<j} (x_j - x_i) over 4 variables, coefficient of x2 x3^2 x4^3 is 1
        let mut forms = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let mut c = vec![0; 4];
                c[j] = 1;
                c[i] = -1;
                forms.push(iform(&c));
            }
        }
        let t = Monomial(vec![0, 1, 2, 3]);
        assert_eq!(coefficient_of(&Integers, &forms, &t).unwrap(), BigInt::from(1));
        let t = Monomial(vec![1, 1, 2, 2]);
        assert_eq!(coefficient_of(&Integers, &forms, &t).unwrap(), BigInt::from(0));
    }

    #[test]
    fn large_coefficient_is_lifted() {
        // (x1 + 3 x2)^40 at x1^20 x2^20 = C(40,20) 3^20
        let forms = vec![iform(&[1, 3]); 40];
        let got = coefficient_of(&Integers, &forms, &Monomial(vec![20, 20])).unwrap();
        let binom: BigInt = (21..=40u32).map(BigInt::from).product::<BigInt>() / (1..=20u32).map(BigInt::from).product::<BigInt>();
        assert_eq!(got, binom * BigInt::from(3).pow(20));
    }

    #[test]
    fn eisenstein_small() {
        let ring = EisensteinIntegers;
        // (x1 + r x2)(x1 - x2): coefficient of x1 x2 is r - 1
        let f1 = LinearForm::new(&ring, vec![Eisenstein::new(1, 0), Eisenstein::new(0, 1)]).unwrap();
        let f2 = LinearForm::new(&ring, vec![Eisenstein::new(1, 0), Eisenstein::new(-1, 0)]).unwrap();
        let c = coefficient_of(&ring, &[f1, f2], &Monomial(vec![1, 1])).unwrap();
        assert_eq!(c, Eisenstein::new(-1, 1));
    }

    #[test]
    fn budget_is_enforced() {
        let forms = vec![iform(&[1, 1, 1, 1]); 40];
        let opts = QuadratureOptions {
            node_budget: Some(1000),
            parallel: false,
        };
        let r = Integers.coefficient_quadrature(&forms, &Monomial(vec![10, 10, 10, 10]), &opts);
        assert!(matches!(r, Err(Error::BudgetExceeded(_))));
    }

    fn arb_case() -> impl Strategy<Value = (usize, Vec<Vec<(i64, i64)>>, Vec<u32>, u64)> {
        (1usize..=5, 1usize..=7).prop_flat_map(|(nv, nf)| {
            (
                Just(nv),
                prop::collection::vec(prop::collection::vec((-2i64..=2, -2i64..=2), nv), nf),
                prop::collection::vec(0u32..=3, nv),
                any::<u64>(),
            )
        })
    }

    proptest! {
        #[test]
        fn matches_expansion((nv, raw, exps, seed) in arb_case()) {
            let eis = EisensteinIntegers;
            let eforms: Vec<LinearForm<Eisenstein>> = raw.iter()
                .filter(|c| c.iter().any(|&(u, v)| u != 0 || v != 0))
                .map(|c| LinearForm::new(&eis, c.iter().map(|&(u, v)| Eisenstein::new(u, v)).collect()).unwrap())
                .collect();
            // force a target of matching degree
            let mut t = exps.clone();
            let mut d: i64 = eforms.len() as i64 - t.iter().sum::<u32>() as i64;
            let mut i = (seed as usize) % nv;
            while d != 0 {
                if d > 0 { t[i] += 1; d -= 1; } else if t[i] > 0 { t[i] -= 1; d += 1; }
                i = (i + 1) % nv;
            }
            let target = Monomial(t);
            let q = eis.coefficient_quadrature(&eforms, &target, &QuadratureOptions { node_budget: None, parallel: seed % 2 == 0 }).unwrap().0;
            let e = coefficient_by_expansion(&eis, &eforms, &target).unwrap();
            prop_assert_eq!(q, e);

            let iforms: Vec<LinearForm<BigInt>> = raw.iter()
                .filter(|c| c.iter().any(|&(u, _)| u != 0))
                .map(|c| iform(&c.iter().map(|&(u, _)| u).collect::<Vec<_>>()))
                .collect();
            if iforms.len() == eforms.len() {
                let q = coefficient_of(&Integers, &iforms, &target).unwrap();
                let e = coefficient_by_expansion(&Integers, &iforms, &target).unwrap();
                prop_assert_eq!(&q, &e);
                let zp = IntegersMod::new(7);
                let mforms: Vec<LinearForm<u64>> = iforms.iter().map(|f| f.map(|c| crate::arith::bigint_mod(c, 7))).collect();
                if mforms.iter().all(|f| f.coeffs().iter().any(|&c| c != 0)) {
                    let m = coefficient_of(&zp, &mforms, &target).unwrap();
                    prop_assert_eq!(m, crate::arith::bigint_mod(&e, 7));
                }
            }
        }
    }
}
