//! Normally ordered differential operators `sum c x^alpha d^beta` with exact
//! rational coefficients, and commutative polynomials in `(x, xi)`.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::orders::TermOrder;
use crate::Q;

pub use parse::parse_operator;

/// An exponent vector. For operators the layout is `(alpha, beta)`, for
/// polynomials on phase space it is `(x, xi)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(SmallVec<[u16; 12]>);

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial(SmallVec::from_elem(0, len))
    }

    pub fn from_slice(e: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(e))
    }

    /// Single variable `var` raised to `exp`.
    pub fn var(len: usize, var: usize, exp: u16) -> Self {
        let mut m = Self::one(len);
        m.0[var] = exp;
        m
    }

    /// `x^alpha d^beta`.
    pub fn weyl(alpha: &[u16], beta: &[u16]) -> Self {
        Monomial(alpha.iter().chain(beta).copied().collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a == 0 || b == 0)
    }

    pub fn set(&mut self, var: usize, exp: u16) {
        self.0[var] = exp;
    }

    /// Appends `extra` zero exponents.
    pub(crate) fn padded(&self, extra: usize) -> Monomial {
        let mut m = self.0.clone();
        m.extend(std::iter::repeat_n(0, extra));
        Monomial(m)
    }

    pub(crate) fn truncated(&self, len: usize) -> Monomial {
        Monomial(SmallVec::from_slice(&self.0[..len]))
    }
}

impl Deref for Monomial {
    type Target = [u16];

    fn deref(&self) -> &[u16] {
        &self.0
    }
}

/// Product `x^a d^b * x^c d^e` in normal order, with integer multiplicities.
///
/// `d_i^b x_i^c = sum_k C(b,k) c!/(c-k)! x_i^{c-k} d_i^{b-k}`, independently per index.
/// Monomials with a trailing `h` exponent are multiplied in the homogenized
/// algebra, where each contraction contributes `h^2`.
pub(crate) fn leibniz(n: usize, left: &Monomial, right: &Monomial) -> Vec<(Monomial, BigInt)> {
    // per variable: list of (k, multiplicity)
    let mut per_var: Vec<Vec<(u16, BigInt)>> = Vec::with_capacity(n);
    for i in 0..n {
        let b = left[n + i];
        let c = right[i];
        let kmax = b.min(c);
        let mut opts = Vec::with_capacity(kmax as usize + 1);
        let mut mult = BigInt::one();
        for k in 0..=kmax {
            if k > 0 {
                // C(b,k) c!/(c-k)! from the k-1 value
                mult = mult * BigInt::from(b - k + 1) * BigInt::from(c - k + 1) / BigInt::from(k);
            }
            opts.push((k, mult.clone()));
        }
        per_var.push(opts);
    }
    let base = left.mul(right);
    let mut out = vec![(base, BigInt::one())];
    for (i, opts) in per_var.iter().enumerate() {
        if opts.len() == 1 {
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for (m, c) in &out {
            for (k, mult) in opts {
                let mut m2 = m.clone();
                m2.0[i] -= k;
                m2.0[n + i] -= k;
                if m2.0.len() > 2 * n {
                    m2.0[2 * n] += 2 * k;
                }
                next.push((m2, c * mult));
            }
        }
        out = next;
    }
    out
}

fn add_to_map(terms: &mut BTreeMap<Monomial, Q>, m: Monomial, c: Q) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn falling(c: u16, k: u16) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, j| acc * BigInt::from(c - j))
}

/// A normally ordered element of the Weyl algebra `A_n` over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylPoly {
    n: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl WeylPoly {
    pub fn zero(n: usize) -> Self {
        WeylPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Q) -> Self {
        Self::term(n, Monomial::one(2 * n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Q::one())
    }

    pub fn term(n: usize, m: Monomial, c: Q) -> Self {
        assert_eq!(m.len(), 2 * n, "monomial length must be 2n");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        WeylPoly { n, terms }
    }

    /// `x_i` (1-based).
    pub fn x(n: usize, i: usize) -> Self {
        Self::term(n, Monomial::var(2 * n, i - 1, 1), Q::one())
    }

    /// `d_i` (1-based).
    pub fn d(n: usize, i: usize) -> Self {
        Self::term(n, Monomial::var(2 * n, n + i - 1, 1), Q::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(n: usize, terms: I) -> Result<Self> {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            if m.len() != 2 * n {
                return Err(Error::DimensionMismatch { expected: 2 * n, found: m.len() });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn parse(text: &str, n: usize) -> Result<Self> {
        parse_operator(text, n)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        add_to_map(&mut self.terms, m, c);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        WeylPoly { n: self.n, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// True when no derivative occurs.
    pub fn is_x_only(&self) -> bool {
        self.terms.keys().all(|m| m[self.n..].iter().all(|&e| e == 0))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Leading term with respect to `order` on exponent vectors.
    pub fn leading_term_by<F>(&self, cmp: F) -> Option<(&Monomial, &Q)>
    where
        F: Fn(&Monomial, &Monomial) -> Ordering,
    {
        self.terms.iter().max_by(|a, b| cmp(a.0, b.0))
    }

    /// Integer, content-free multiple with positive leading coefficient
    /// under the default graded reverse lexicographic order.
    pub fn normalized(&self) -> Self {
        let tie = TermOrder::weyl_default(self.n);
        self.normalized_by(|a, b| tie.cmp(a, b))
    }

    pub fn normalized_by<F>(&self, cmp: F) -> Self
    where
        F: Fn(&Monomial, &Monomial) -> Ordering,
    {
        let Some((_, lc)) = self.leading_term_by(cmp) else {
            return self.clone();
        };
        let factor = primitive_factor(self.terms.values(), lc.is_negative());
        self.scale(&factor)
    }

    /// Terms sorted from largest to smallest under the default tiebreak.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Q)> {
        let tie = TermOrder::weyl_default(self.n);
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| tie.cmp(b.0, a.0));
        v
    }

    /// Applies the operator to a polynomial in `x` (derivations act by `d/dx_i`).
    pub fn apply(&self, f: &CommPoly) -> Result<CommPoly> {
        apply(self, f)
    }
}

/// Rational factor turning `coeffs` into coprime integers; sign flips when `negate`.
pub(crate) fn primitive_factor<'a, I: Iterator<Item = &'a Q>>(coeffs: I, negate: bool) -> Q {
    let mut den_lcm = BigInt::one();
    let mut num_gcd = BigInt::zero();
    for c in coeffs {
        den_lcm = den_lcm.lcm(c.denom());
        num_gcd = num_gcd.gcd(c.numer());
    }
    if num_gcd.is_zero() {
        return Q::one();
    }
    let f = Q::new(den_lcm, num_gcd);
    if negate {
        -f
    } else {
        f
    }
}

/// Normally ordered product `p * q`.
pub fn weyl_mul(p: &WeylPoly, q: &WeylPoly) -> Result<WeylPoly> {
    if p.n != q.n {
        return Err(Error::DimensionMismatch { expected: p.n, found: q.n });
    }
    let n = p.n;
    let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
    for (m1, c1) in &p.terms {
        for (m2, c2) in &q.terms {
            let c = c1 * c2;
            for (m, mult) in leibniz(n, m1, m2) {
                *acc.entry(m).or_insert_with(Q::zero) += &c * Q::from_integer(mult);
            }
        }
    }
    acc.retain(|_, c| !c.is_zero());
    Ok(WeylPoly { n, terms: acc })
}

/// `[p, q] = pq - qp`.
pub fn commutator(p: &WeylPoly, q: &WeylPoly) -> Result<WeylPoly> {
    Ok(&weyl_mul(p, q)? - &weyl_mul(q, p)?)
}

/// `p . f` for a polynomial `f` in `x` only.
pub fn apply(p: &WeylPoly, f: &CommPoly) -> Result<CommPoly> {
    let n = p.n;
    if f.nvars != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, found: f.nvars });
    }
    if !f.is_x_only() {
        return Err(Error::NotXOnly);
    }
    let mut out = CommPoly::zero(2 * n);
    for (m, c) in &p.terms {
        for (g, cf) in &f.terms {
            let mut mult = BigInt::one();
            let mut e = Monomial::one(2 * n);
            let mut vanishes = false;
            for i in 0..n {
                let (b, gi) = (m[n + i], g[i]);
                if b > gi {
                    vanishes = true;
                    break;
                }
                mult *= falling(gi, b);
                e.0[i] = gi - b + m[i];
            }
            if !vanishes {
                out.add_term(e, c * cf * Q::from_integer(mult));
            }
        }
    }
    Ok(out)
}

impl Add for &WeylPoly {
    type Output = WeylPoly;

    fn add(self, rhs: &WeylPoly) -> WeylPoly {
        assert_eq!(self.n, rhs.n, "operators live in different Weyl algebras");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &WeylPoly {
    type Output = WeylPoly;

    fn sub(self, rhs: &WeylPoly) -> WeylPoly {
        self + &(-rhs)
    }
}

impl Neg for &WeylPoly {
    type Output = WeylPoly;

    fn neg(self) -> WeylPoly {
        WeylPoly { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &WeylPoly {
    type Output = WeylPoly;

    /// Panics when the operands have different `n`; see [`weyl_mul`].
    fn mul(self, rhs: &WeylPoly) -> WeylPoly {
        weyl_mul(self, rhs).expect("operators live in different Weyl algebras")
    }
}

fn write_coeff_term(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    c: &Q,
    factors: &[String],
) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if neg {
        write!(f, "-")?;
    } else if !first {
        write!(f, "+")?;
    }
    if factors.is_empty() {
        return write!(f, "{a}");
    }
    if !a.is_one() {
        write!(f, "{a}*")?;
    }
    write!(f, "{}", factors.join("*"))
}

fn factor(name: &str, e: u16) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

impl fmt::Display for WeylPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let n = self.n;
        for (idx, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let mut factors = Vec::new();
            for i in 0..n {
                if m[i] > 0 {
                    factors.push(factor(&format!("x{}", i + 1), m[i]));
                }
            }
            for i in 0..n {
                if m[n + i] > 0 {
                    factors.push(factor(&format!("Dx{}", i + 1), m[n + i]));
                }
            }
            write_coeff_term(f, idx == 0, c, &factors)?;
        }
        Ok(())
    }
}

/// A polynomial in commuting variables. With an even variable count `2n`
/// the variables are read as `(x1..xn, xi1..xin)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl CommPoly {
    pub fn zero(nvars: usize) -> Self {
        CommPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        let nvars = m.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        CommPoly { nvars, terms }
    }

    /// Variable with 0-based index `i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i, 1), Q::one())
    }

    /// `x_i` on phase space of dimension `2n` (1-based).
    pub fn x(n: usize, i: usize) -> Self {
        Self::var(2 * n, i - 1)
    }

    /// `xi_i` on phase space of dimension `2n` (1-based).
    pub fn xi(n: usize, i: usize) -> Self {
        Self::var(2 * n, n + i - 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(nvars: usize, terms: I) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: m.len() });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        add_to_map(&mut self.terms, m, c);
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// On phase space: no `xi` variable occurs.
    pub fn is_x_only(&self) -> bool {
        let n = self.nvars / 2;
        self.terms.keys().all(|m| m[n..].iter().all(|&e| e == 0))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        CommPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Total degree, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Splits into components that are homogeneous for the integer weight `w`.
    pub fn homogeneous_components(&self, w: &[i64]) -> BTreeMap<i64, CommPoly> {
        let mut out: BTreeMap<i64, CommPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = crate::orders::dot(w, m);
            out.entry(d).or_insert_with(|| CommPoly::zero(self.nvars)).add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn is_homogeneous(&self, w: &[i64]) -> bool {
        self.homogeneous_components(w).len() <= 1
    }

    /// Substitutes `z_i -> factors[i] * z_i`.
    pub fn scale_variables(&self, factors: &[Q]) -> Self {
        let mut out = CommPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut c = c.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    c *= &factors[i];
                }
            }
            out.add_term(m.clone(), c);
        }
        out
    }

    /// Content-free integer multiple with positive leading coefficient under grevlex.
    pub fn normalized(&self) -> Self {
        let tie = TermOrder::grevlex(self.nvars);
        let Some((_, lc)) = self.terms.iter().max_by(|a, b| tie.cmp(a.0, b.0)) else {
            return self.clone();
        };
        let factor = primitive_factor(self.terms.values(), lc.is_negative());
        self.scale(&factor)
    }

    pub(crate) fn pad(&self, extra: usize) -> Self {
        CommPoly {
            nvars: self.nvars + extra,
            terms: self.terms.iter().map(|(m, c)| (m.padded(extra), c.clone())).collect(),
        }
    }

    /// Display with explicit variable names.
    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        struct W<'a>(&'a CommPoly, &'a [String]);
        impl fmt::Display for W<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let tie = TermOrder::grevlex(self.0.nvars);
                let mut v: Vec<_> = self.0.terms.iter().collect();
                v.sort_by(|a, b| tie.cmp(b.0, a.0));
                for (idx, (m, c)) in v.into_iter().enumerate() {
                    let factors: Vec<String> = m
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| factor(&self.1[i], e))
                        .collect();
                    write_coeff_term(f, idx == 0, c, &factors)?;
                }
                Ok(())
            }
        }
        W(self, names).to_string()
    }

    /// Default variable names: `x1..xn, xi1..xin` for `2n` variables, else `z1..`.
    pub fn default_names(nvars: usize) -> Vec<String> {
        if nvars.is_multiple_of(2) {
            let n = nvars / 2;
            (1..=n).map(|i| format!("x{i}")).chain((1..=n).map(|i| format!("xi{i}"))).collect()
        } else {
            (1..=nvars).map(|i| format!("z{i}")).collect()
        }
    }
}

impl Add for &CommPoly {
    type Output = CommPoly;

    fn add(self, rhs: &CommPoly) -> CommPoly {
        assert_eq!(self.nvars, rhs.nvars, "polynomials live in different rings");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &CommPoly {
    type Output = CommPoly;

    fn sub(self, rhs: &CommPoly) -> CommPoly {
        self + &(-rhs)
    }
}

impl Neg for &CommPoly {
    type Output = CommPoly;

    fn neg(self) -> CommPoly {
        CommPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &CommPoly {
    type Output = CommPoly;

    fn mul(self, rhs: &CommPoly) -> CommPoly {
        assert_eq!(self.nvars, rhs.nvars, "polynomials live in different rings");
        let mut out = CommPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&Self::default_names(self.nvars)))
    }
}

/// The commutative image of an operator: `x_i -> x_i`, `d_i -> xi_i`.
pub fn symbol(p: &WeylPoly) -> CommPoly {
    CommPoly { nvars: 2 * p.n, terms: p.terms.clone() }
}

/// Reads a phase-space polynomial back as a normally ordered operator.
pub fn from_symbol(f: &CommPoly) -> Result<WeylPoly> {
    if !f.nvars.is_multiple_of(2) {
        return Err(Error::InvalidInput("odd number of variables".into()));
    }
    Ok(WeylPoly { n: f.nvars / 2, terms: f.terms.clone() })
}
