//! Sparse integer-coefficient polynomials and Buchberger's algorithm, shared by
//! the Weyl-algebra and the commutative front ends.
//!
//! Polynomials are kept primitive (content-free) and their terms sorted from
//! largest to smallest in the ring order. Leading-term reductions are fraction
//! free: `f <- a f - b s g` followed by content removal.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::orders::MonomialOrder;
use crate::weyl::{leibniz, Monomial};
use crate::Q;

/// Default number of reduction steps allowed per Gröbner basis computation.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Term {
    pub(crate) m: Monomial,
    pub(crate) c: BigInt,
}

pub(crate) type Poly = Vec<Term>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    Commutative,
    /// Weyl algebra in `n` variables, exponents laid out as `(alpha, beta)`.
    Weyl(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Ring {
    pub(crate) kind: Kind,
    pub(crate) order: MonomialOrder,
}

/// Counts leading-term reduction steps.
#[derive(Debug, Clone)]
pub(crate) struct Budget {
    pub(crate) used: u64,
    pub(crate) limit: u64,
}

impl Budget {
    pub(crate) fn new(limit: u64) -> Self {
        Budget { used: 0, limit }
    }

    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::BudgetExceeded(self.limit));
        }
        Ok(())
    }
}

impl Ring {
    pub(crate) fn commutative(order: MonomialOrder) -> Self {
        Ring { kind: Kind::Commutative, order }
    }

    pub(crate) fn weyl(n: usize, order: MonomialOrder) -> Self {
        Ring { kind: Kind::Weyl(n), order }
    }

    pub(crate) fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.order.cmp(a, b)
    }

    /// A nonzero constant, possibly times a power of `h`.
    fn is_unit_poly(&self, p: &[Term]) -> bool {
        match self.order.h_index {
            None => p.first().is_some_and(|t| t.m.is_one()),
            Some(k) => p.len() == 1 && p[0].m[..k].iter().all(|&e| e == 0),
        }
    }

    /// The same Weyl algebra with a homogenizing variable `h`, `[d, x] = h^2`.
    pub(crate) fn homogenized(&self) -> Ring {
        Ring { kind: self.kind, order: self.order.homogenized() }
    }

    /// `h^(d - deg t) t` summed over the terms, `d` the top total degree.
    pub(crate) fn homogenize(&self, p: &[Term]) -> Poly {
        let d = p.iter().map(|t| t.m.degree()).max().unwrap_or(0);
        let hom = self.homogenized();
        let raw = p
            .iter()
            .map(|t| {
                let mut m = t.m.padded(1);
                m.set(m.len() - 1, (d - t.m.degree()) as u16);
                (m, t.c.clone())
            })
            .collect();
        hom.collect(raw)
    }

    /// Sets `h = 1` in an element of the homogenized ring. Terms of a
    /// homogeneous element stay distinct and keep their order.
    pub(crate) fn dehomogenize(&self, p: &[Term]) -> Poly {
        let k = self.order.nvars();
        let raw = p.iter().map(|t| (t.m.truncated(k), t.c.clone())).collect();
        let mut out = self.collect(raw);
        make_primitive(&mut out);
        out
    }

    /// Sorts descending and merges equal monomials.
    pub(crate) fn collect(&self, mut terms: Vec<(Monomial, BigInt)>) -> Poly {
        terms.sort_by(|a, b| self.cmp(&b.0, &a.0));
        let mut out: Poly = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(t) if t.m == m => t.c += c,
                _ => {
                    if let Some(t) = out.last() {
                        if t.c.is_zero() {
                            out.pop();
                        }
                    }
                    out.push(Term { m, c })
                }
            }
        }
        if let Some(t) = out.last() {
            if t.c.is_zero() {
                out.pop();
            }
        }
        out
    }

    /// Primitive integer polynomial `k * terms` together with the factor `k`.
    pub(crate) fn from_rational<'a, I>(&self, terms: I) -> (Poly, Q)
    where
        I: IntoIterator<Item = (&'a Monomial, &'a Q)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let mut den = BigInt::one();
        for (_, c) in &terms {
            den = den.lcm(c.denom());
        }
        let raw = terms
            .iter()
            .map(|(m, c)| ((*m).clone(), c.numer() * (&den / c.denom())))
            .collect();
        let mut p = self.collect(raw);
        let before = p.first().map(|t| t.c.clone());
        make_primitive(&mut p);
        let k = match (before, p.first()) {
            (Some(b), Some(a)) => Q::new(a.c.clone() * &den, b),
            _ => Q::one(),
        };
        (p, k)
    }

    /// `m * p` (left multiplication in the Weyl case).
    fn mul_mono(&self, m: &Monomial, p: &[Term]) -> Poly {
        match self.kind {
            Kind::Commutative => p.iter().map(|t| Term { m: m.mul(&t.m), c: t.c.clone() }).collect(),
            Kind::Weyl(n) => {
                let has_d = m[n..].iter().any(|&e| e > 0);
                if !has_d {
                    return p.iter().map(|t| Term { m: m.mul(&t.m), c: t.c.clone() }).collect();
                }
                let mut raw = Vec::with_capacity(p.len() * 2);
                for t in p {
                    for (mm, mult) in leibniz(n, m, &t.m) {
                        raw.push((mm, mult * &t.c));
                    }
                }
                self.collect(raw)
            }
        }
    }

    /// `a f - b g` for sorted `f`, `g`.
    fn lin(&self, a: &BigInt, f: &[Term], b: &BigInt, g: &[Term]) -> Poly {
        let mut out = Vec::with_capacity(f.len() + g.len());
        let (mut i, mut j) = (0, 0);
        while i < f.len() || j < g.len() {
            let o = if i == f.len() {
                Ordering::Less
            } else if j == g.len() {
                Ordering::Greater
            } else {
                self.cmp(&f[i].m, &g[j].m)
            };
            match o {
                Ordering::Greater => {
                    out.push(Term { m: f[i].m.clone(), c: a * &f[i].c });
                    i += 1;
                }
                Ordering::Less => {
                    out.push(Term { m: g[j].m.clone(), c: -(b * &g[j].c) });
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a * &f[i].c - b * &g[j].c;
                    if !c.is_zero() {
                        out.push(Term { m: f[i].m.clone(), c });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

pub(crate) fn content(p: &[Term]) -> BigInt {
    let mut g = BigInt::zero();
    for t in p {
        g = g.gcd(&t.c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Divides by the content and makes the leading coefficient positive.
pub(crate) fn make_primitive(p: &mut Poly) {
    let Some(first) = p.first() else { return };
    let mut g = content(p);
    if first.c.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for t in p.iter_mut() {
            t.c = &t.c / &g;
        }
    }
}

pub(crate) fn to_rational(p: &[Term]) -> BTreeMap<Monomial, Q> {
    p.iter().map(|t| (t.m.clone(), Q::from_integer(t.c.clone()))).collect()
}

/// Result of a division: `scale * (f - sum q_i g_i) = rem`.
pub(crate) struct Division {
    pub(crate) rem: Poly,
    pub(crate) scale: Q,
}

/// Divides `f` by `basis`; with `full` every term of the remainder is
/// irreducible, otherwise only the leading term.
pub(crate) fn reduce(
    ring: &Ring,
    f: Poly,
    basis: &[&Poly],
    full: bool,
    budget: &mut Budget,
) -> Result<Division> {
    let mut f = f;
    let mut done: Poly = Vec::new();
    let mut scale = Q::one();
    let mut since_content = 0usize;
    while let Some(lead) = f.first() {
        let div = basis.iter().find(|g| g[0].m.divides(&lead.m));
        let Some(g) = div else {
            if !full {
                break;
            }
            let t = f.remove(0);
            done.push(t);
            continue;
        };
        budget.tick()?;
        let s = g[0].m.quotient_of(&lead.m);
        let gcd = lead.c.gcd(&g[0].c);
        let mut a = &g[0].c / &gcd;
        let mut b = &lead.c / &gcd;
        if a.is_negative() {
            a = -a;
            b = -b;
        }
        let sg = ring.mul_mono(&s, g);
        f = ring.lin(&a, &f[1..], &b, &sg[1..]);
        if !a.is_one() {
            for t in done.iter_mut() {
                t.c *= &a;
            }
            scale *= Q::from_integer(a);
        }
        since_content += 1;
        if since_content >= 1 {
            since_content = 0;
            let c = content(&f).gcd(&content(&done));
            if !c.is_zero() && !c.is_one() {
                for t in f.iter_mut().chain(done.iter_mut()) {
                    t.c = &t.c / &c;
                }
                scale /= Q::from_integer(c);
            }
        }
    }
    done.extend(f);
    Ok(Division { rem: done, scale })
}

#[derive(Debug, Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

struct State<'r> {
    ring: &'r Ring,
    polys: Vec<Poly>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
}

impl State<'_> {
    fn lm(&self, i: usize) -> &Monomial {
        &self.polys[i][0].m
    }

    fn active_basis(&self) -> Vec<&Poly> {
        self.polys.iter().zip(&self.active).filter(|(_, &a)| a).map(|(p, _)| p).collect()
    }

    /// Gebauer-Moeller installation of a new element.
    fn update(&mut self, k: usize) {
        let hk = self.lm(k).clone();
        let commutative = self.ring.kind == Kind::Commutative;
        let cands: Vec<(usize, Monomial, bool)> = (0..k)
            .filter(|&i| self.active[i])
            .map(|i| {
                let li = self.lm(i);
                (i, li.lcm(&hk), li.is_coprime(&hk))
            })
            .collect();
        let mut keep = vec![true; cands.len()];
        for a in 0..cands.len() {
            for b in 0..cands.len() {
                if a != b && cands[b].1 != cands[a].1 && cands[b].1.divides(&cands[a].1) {
                    keep[a] = false;
                    break;
                }
            }
        }
        let mut by_lcm: BTreeMap<&Monomial, Vec<usize>> = BTreeMap::new();
        for (a, c) in cands.iter().enumerate() {
            if keep[a] {
                by_lcm.entry(&c.1).or_default().push(a);
            }
        }
        let mut fresh = Vec::new();
        for (_, class) in by_lcm {
            if commutative && class.iter().any(|&a| cands[a].2) {
                continue;
            }
            let a = class[0];
            fresh.push(Pair { i: cands[a].0, j: k, lcm: cands[a].1.clone() });
        }
        let polys = &self.polys;
        self.pairs.retain(|p| {
            if !hk.divides(&p.lcm) {
                return true;
            }
            let li = polys[p.i][0].m.lcm(&hk);
            let lj = polys[p.j][0].m.lcm(&hk);
            li == p.lcm || lj == p.lcm
        });
        self.pairs.extend(fresh);
        for i in 0..k {
            if self.active[i] && hk.divides(&self.polys[i][0].m) {
                self.active[i] = false;
            }
        }
    }

    fn pop_pair(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let ring = self.ring;
        let best = (0..self.pairs.len())
            .min_by(|&a, &b| {
                let (la, lb) = (&self.pairs[a].lcm, &self.pairs[b].lcm);
                la.degree().cmp(&lb.degree()).then_with(|| ring.cmp(la, lb))
            })
            .unwrap();
        Some(self.pairs.swap_remove(best))
    }

    fn s_poly(&self, p: &Pair) -> Poly {
        let (f, g) = (&self.polys[p.i], &self.polys[p.j]);
        let sf = f[0].m.quotient_of(&p.lcm);
        let sg = g[0].m.quotient_of(&p.lcm);
        let gcd = f[0].c.gcd(&g[0].c);
        let a = &g[0].c / &gcd;
        let b = &f[0].c / &gcd;
        let mf = self.ring.mul_mono(&sf, f);
        let mg = self.ring.mul_mono(&sg, g);
        self.ring.lin(&a, &mf[1..], &b, &mg[1..])
    }

    fn insert(&mut self, mut h: Poly) -> bool {
        make_primitive(&mut h);
        let unit = self.ring.is_unit_poly(&h);
        self.polys.push(h);
        self.active.push(true);
        let k = self.polys.len() - 1;
        if unit {
            for i in 0..k {
                self.active[i] = false;
            }
            self.pairs.clear();
            return true;
        }
        self.update(k);
        false
    }
}

/// Reduced Groebner basis of the left ideal (or ideal) generated by `gens`.
///
/// Elements are primitive with positive leading coefficient, sorted by
/// ascending leading monomial.
pub(crate) fn groebner(ring: &Ring, gens: Vec<Poly>, budget: &mut Budget) -> Result<Vec<Poly>> {
    let mut st = State { ring, polys: Vec::new(), active: Vec::new(), pairs: Vec::new() };
    for g in gens {
        if g.is_empty() {
            continue;
        }
        let basis = st.active_basis();
        let h = reduce(ring, g, &basis, false, budget)?.rem;
        if !h.is_empty() && st.insert(h) {
            return Ok(vec![unit_poly(ring)]);
        }
    }
    while let Some(pair) = st.pop_pair() {
        let s = st.s_poly(&pair);
        if s.is_empty() {
            continue;
        }
        let basis = st.active_basis();
        let h = reduce(ring, s, &basis, false, budget)?.rem;
        if !h.is_empty() && st.insert(h) {
            return Ok(vec![unit_poly(ring)]);
        }
    }
    let mut basis: Vec<Poly> = st.polys.into_iter().zip(st.active).filter(|(_, a)| *a).map(|(p, _)| p).collect();
    interreduce(ring, &mut basis, budget)?;
    Ok(basis)
}

fn unit_poly(ring: &Ring) -> Poly {
    vec![Term { m: Monomial::one(ring.order.nvars()), c: BigInt::one() }]
}

/// Minimalises and tail-reduces a Groebner basis in place.
pub(crate) fn interreduce(ring: &Ring, basis: &mut Vec<Poly>, budget: &mut Budget) -> Result<()> {
    basis.sort_by(|a, b| ring.cmp(&a[0].m, &b[0].m));
    let mut minimal: Vec<Poly> = Vec::new();
    for p in basis.drain(..) {
        if !minimal.iter().any(|q| q[0].m.divides(&p[0].m)) {
            minimal.push(p);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<&Poly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
        let mut r = reduce(ring, minimal[i].clone(), &others, true, budget)?.rem;
        make_primitive(&mut r);
        out.push(r);
    }
    *basis = out;
    Ok(())
}

/// True when every S-pair of `basis` reduces to zero.
///
/// Pairs go in ascending order of their lcm; a pair `(i, j)` is skipped when
/// some `k` has a leading monomial dividing `lcm(i, j)` and both `(i, k)` and
/// `(j, k)` already passed (Buchberger's chain criterion).
pub(crate) fn is_groebner(ring: &Ring, basis: &[Poly], budget: &mut Budget) -> Result<bool> {
    let refs: Vec<&Poly> = basis.iter().collect();
    let len = basis.len();
    let mut pairs: Vec<Pair> = Vec::new();
    for i in 0..len {
        for j in i + 1..len {
            let (f, g) = (&basis[i][0].m, &basis[j][0].m);
            if ring.kind == Kind::Commutative && f.is_coprime(g) {
                continue;
            }
            pairs.push(Pair { i, j, lcm: f.lcm(g) });
        }
    }
    pairs.sort_by(|a, b| a.lcm.degree().cmp(&b.lcm.degree()).then_with(|| ring.cmp(&a.lcm, &b.lcm)));
    let mut passed = vec![vec![false; len]; len];
    for pair in pairs {
        let (i, j) = (pair.i, pair.j);
        let chained = (0..len).any(|k| {
            k != i && k != j && passed[i][k] && passed[j][k] && basis[k][0].m.divides(&pair.lcm)
        });
        if !chained {
            let st = State { ring, polys: vec![basis[i].clone(), basis[j].clone()], active: vec![], pairs: vec![] };
            let s = st.s_poly(&Pair { i: 0, j: 1, lcm: pair.lcm });
            if !reduce(ring, s, &refs, false, budget)?.rem.is_empty() {
                return Ok(false);
            }
        }
        passed[i][j] = true;
        passed[j][i] = true;
    }
    Ok(true)
}
