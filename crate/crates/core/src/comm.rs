//! Commutative ideals: Gröbner bases, ideal and radical membership,
//! weight-homogeneity of an ideal and of its radical, standard pairs.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::engine::{self, Budget, Poly, Ring, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::orders::{MonomialOrder, TermOrder};
use crate::weyl::{symbol, Monomial, WeylPoly};
use crate::Q;

pub use crate::weyl::CommPoly;

/// An ideal of a commutative polynomial ring given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommIdeal {
    nvars: usize,
    generators: Vec<CommPoly>,
}

impl CommIdeal {
    /// Zero generators are dropped.
    pub fn new(nvars: usize, generators: Vec<CommPoly>) -> Result<Self> {
        for g in &generators {
            if g.nvars() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: g.nvars() });
            }
        }
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(CommIdeal { nvars, generators })
    }

    /// Phase-space ideal from operator syntax, reading `Dx<k>` as `xi_k`.
    pub fn parse_symbols(srcs: &[&str], n: usize) -> Result<Self> {
        let gens = srcs.iter().map(|s| WeylPoly::parse(s, n).map(|p| symbol(&p))).collect::<Result<_>>()?;
        CommIdeal::new(2 * n, gens)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[CommPoly] {
        &self.generators
    }

    /// The ideal with `extra` appended to its generators.
    pub fn with(&self, extra: impl IntoIterator<Item = CommPoly>) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.extend(extra);
        CommIdeal::new(self.nvars, gens)
    }

    pub fn groebner(&self) -> Result<CommBasis> {
        comm_buchberger(self, &TermOrder::grevlex(self.nvars))
    }

    pub fn contains(&self, f: &CommPoly) -> Result<bool> {
        self.groebner()?.contains(f)
    }

    /// Mutual containment of generators.
    pub fn equals(&self, other: &CommIdeal) -> Result<bool> {
        let (a, b) = (self.groebner()?, other.groebner()?);
        Ok(other.generators.iter().all(|g| a.contains(g).unwrap_or(false))
            && self.generators.iter().all(|g| b.contains(g).unwrap_or(false)))
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.groebner()?.is_unit())
    }
}

impl fmt::Display for CommIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

/// Reduced Gröbner basis of a commutative ideal.
#[derive(Debug, Clone)]
pub struct CommBasis {
    pub elements: Vec<CommPoly>,
    pub order: TermOrder,
    ring: Ring,
    polys: Vec<Poly>,
}

impl CommBasis {
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0][0].m.is_one()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys.iter().map(|p| p[0].m.clone()).collect()
    }

    pub fn normal_form(&self, f: &CommPoly) -> Result<CommPoly> {
        let nv = self.order.nvars();
        if f.nvars() != nv {
            return Err(Error::DimensionMismatch { expected: nv, found: f.nvars() });
        }
        if f.is_zero() {
            return Ok(f.clone());
        }
        let (p, k) = self.ring.from_rational(f.terms());
        let basis: Vec<&Poly> = self.polys.iter().collect();
        let d = engine::reduce(&self.ring, p, &basis, true, &mut Budget::new(DEFAULT_BUDGET))?;
        let factor = (k * d.scale).recip();
        CommPoly::from_terms(nv, d.rem.into_iter().map(|t| (t.m, Q::from_integer(t.c) * &factor)))
    }

    pub fn contains(&self, f: &CommPoly) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Every S-pair reduces to zero.
    pub fn is_certified(&self) -> Result<bool> {
        engine::is_groebner(&self.ring, &self.polys, &mut Budget::new(DEFAULT_BUDGET))
    }
}

pub fn comm_buchberger(j: &CommIdeal, order: &TermOrder) -> Result<CommBasis> {
    comm_buchberger_counted(j, order, &mut Budget::new(DEFAULT_BUDGET))
}

pub(crate) fn comm_buchberger_counted(j: &CommIdeal, order: &TermOrder, budget: &mut Budget) -> Result<CommBasis> {
    if order.nvars() != j.nvars {
        return Err(Error::DimensionMismatch { expected: j.nvars, found: order.nvars() });
    }
    let ring = Ring::commutative(MonomialOrder::term(order.clone()));
    let gens = j.generators.iter().map(|g| ring.from_rational(g.terms()).0).collect();
    let polys = engine::groebner(&ring, gens, budget)?;
    let elements = polys
        .iter()
        .map(|p| CommPoly::from_terms(j.nvars, engine::to_rational(p)).expect("well formed").normalized())
        .collect();
    Ok(CommBasis { elements, order: order.clone(), ring, polys })
}

pub fn ideal_membership(f: &CommPoly, j: &CommIdeal) -> Result<bool> {
    j.contains(f)
}

/// `f` lies in the radical of `J`, decided by `1 in J + <1 - t f>`.
pub fn radical_membership(f: &CommPoly, j: &CommIdeal) -> Result<bool> {
    radical_membership_counted(f, j, None, &mut Budget::new(DEFAULT_BUDGET))
}

pub(crate) fn radical_membership_counted(
    f: &CommPoly,
    j: &CommIdeal,
    basis: Option<&CommBasis>,
    budget: &mut Budget,
) -> Result<bool> {
    if f.nvars() != j.nvars {
        return Err(Error::DimensionMismatch { expected: j.nvars, found: f.nvars() });
    }
    if f.is_zero() {
        return Ok(true);
    }
    if let Some(b) = basis {
        if b.contains(f)? {
            return Ok(true);
        }
    }
    let nv = j.nvars;
    let ring = Ring::commutative(MonomialOrder::term(TermOrder::grevlex(nv)).extended(1));
    let t = Monomial::var(nv + 1, nv, 1);
    let mut aux = CommPoly::one(nv + 1);
    for (m, c) in f.terms() {
        aux = &aux - &CommPoly::term(m.padded(1).mul(&t), c.clone());
    }
    let mut gens: Vec<Poly> = j.generators.iter().map(|g| ring.from_rational(g.pad(1).terms()).0).collect();
    gens.push(ring.from_rational(aux.terms()).0);
    let gb = engine::groebner(&ring, gens, budget)?;
    Ok(gb.len() == 1 && gb[0][0].m.is_one())
}

/// Every `w`-homogeneous component of every reduced Gröbner basis element lies in `J`.
pub fn is_w_homogeneous(j: &CommIdeal, w: &[i64]) -> Result<bool> {
    is_w_homogeneous_counted(j, w, &mut Budget::new(DEFAULT_BUDGET))
}

pub(crate) fn is_w_homogeneous_counted(j: &CommIdeal, w: &[i64], budget: &mut Budget) -> Result<bool> {
    check_weight(j, w)?;
    let gb = comm_buchberger_counted(j, &TermOrder::grevlex(j.nvars), budget)?;
    for g in &gb.elements {
        let parts = g.homogeneous_components(w);
        if parts.len() <= 1 {
            continue;
        }
        for part in parts.values() {
            if !gb.contains(part)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The radical of `J` is `w`-homogeneous.
///
/// The zero set of `J` is stable under the torus `z -> lambda^w z` exactly when
/// it is stable under the single element `lambda = 2`, which has infinite
/// order; that is checked generator by generator with `lambda^(+-w)`.
pub fn is_radical_w_homogeneous(j: &CommIdeal, w: &[i64]) -> Result<bool> {
    is_radical_w_homogeneous_counted(j, w, &mut Budget::new(DEFAULT_BUDGET))
}

pub(crate) fn is_radical_w_homogeneous_counted(j: &CommIdeal, w: &[i64], budget: &mut Budget) -> Result<bool> {
    check_weight(j, w)?;
    let gb = comm_buchberger_counted(j, &TermOrder::grevlex(j.nvars), budget)?;
    if gb.is_unit() {
        return Ok(true);
    }
    let two = Q::from_integer(BigInt::from(2));
    let pow2 = |e: i64| if e >= 0 { num_traits::pow(two.clone(), e as usize) } else { num_traits::pow(two.recip(), (-e) as usize) };
    let up: Vec<Q> = w.iter().map(|&e| pow2(e)).collect();
    let down: Vec<Q> = w.iter().map(|&e| pow2(-e)).collect();
    for g in &j.generators {
        if g.is_homogeneous(w) {
            continue;
        }
        for factors in [&up, &down] {
            let moved = g.scale_variables(factors);
            if !radical_membership_counted(&moved, j, Some(&gb), budget)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_weight(j: &CommIdeal, w: &[i64]) -> Result<()> {
    if w.len() != j.nvars {
        return Err(Error::DimensionMismatch { expected: j.nvars, found: w.len() });
    }
    Ok(())
}

/// `(z^exponent, face)`: the standard monomials `z^exponent * z_face^k`.
/// Face indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StandardPair {
    pub exponent: Vec<u16>,
    pub face: Vec<usize>,
}

impl StandardPair {
    /// `z^exponent * z_face^k` avoids every generator.
    fn admissible(&self, gens: &[Monomial]) -> bool {
        gens.iter().all(|g| {
            !g.iter().enumerate().all(|(i, &e)| self.face.contains(&i) || e <= self.exponent[i])
        })
    }

    /// The monomial set of `self` is contained in that of `other`.
    fn inside(&self, other: &StandardPair) -> bool {
        self.face.iter().all(|i| other.face.contains(i))
            && self.exponent.iter().zip(&other.exponent).enumerate().all(|(i, (&a, &b))| {
                b <= a && (a == b || other.face.contains(&i))
            })
    }
}

impl fmt::Display for StandardPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let face: Vec<String> = self.face.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "({:?}, {{{}}})", self.exponent, face.join(","))
    }
}

/// Standard pairs of a monomial ideal.
pub fn standard_pairs(m: &CommIdeal) -> Result<Vec<StandardPair>> {
    let nv = m.nvars;
    let mut gens = Vec::new();
    for g in &m.generators {
        if !g.is_monomial() {
            return Err(Error::NotMonomial);
        }
        gens.push(g.terms().next().unwrap().0.clone());
    }
    // exponents of a standard pair stay below the largest generator exponent
    let bound: Vec<u16> = (0..nv).map(|i| gens.iter().map(|g| g[i]).max().unwrap_or(0)).collect();
    let mut admissible: Vec<StandardPair> = Vec::new();
    for mask in 0u32..(1 << nv) {
        let face: Vec<usize> = (0..nv).filter(|i| mask >> i & 1 == 1).collect();
        let free: Vec<usize> = (0..nv).filter(|i| mask >> i & 1 == 0).collect();
        if free.iter().any(|&i| bound[i] == 0) {
            continue;
        }
        let mut exp = vec![0u16; nv];
        loop {
            let pair = StandardPair { exponent: exp.clone(), face: face.clone() };
            if pair.admissible(&gens) {
                admissible.push(pair);
            }
            let mut k = 0;
            while k < free.len() {
                let i = free[k];
                exp[i] += 1;
                if exp[i] < bound[i] {
                    break;
                }
                exp[i] = 0;
                k += 1;
            }
            if k == free.len() {
                break;
            }
        }
    }
    let mut out: BTreeSet<StandardPair> = BTreeSet::new();
    for p in &admissible {
        if !admissible.iter().any(|q| q != p && p.inside(q)) {
            out.insert(p.clone());
        }
    }
    let mut v: Vec<StandardPair> = out.into_iter().collect();
    v.sort_by(|a, b| b.face.len().cmp(&a.face.len()).then_with(|| a.face.cmp(&b.face)).then_with(|| a.exponent.cmp(&b.exponent)));
    Ok(v)
}

/// `z^e` for an exponent vector.
pub fn monomial(e: &[u16]) -> CommPoly {
    CommPoly::term(Monomial::from_slice(e), Q::one())
}

/// True when `f^k in J` for some `k <= max_k`.
pub fn power_membership(f: &CommPoly, j: &CommIdeal, max_k: u32) -> Result<bool> {
    let gb = j.groebner()?;
    let mut p = f.clone();
    for _ in 0..max_k {
        if gb.contains(&p)? {
            return Ok(true);
        }
        p = &p * f;
    }
    Ok(false)
}
