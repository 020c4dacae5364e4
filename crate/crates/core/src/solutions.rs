//! Solutions of GKZ systems of monomial curves `A = (1, a2, ..., an)`:
//! polynomial solutions, formal and convergent series with exact rational
//! exponents, the associated one-variable hypergeometric equation, and the
//! reducibility verdict.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::comm::{monomial, standard_pairs, CommIdeal, StandardPair};
use crate::error::{Error, Result};
use crate::gkz::GkzSystem;
use crate::groebner::buchberger;
use crate::orders::{CompositeOrder, TermOrder, WeightVector};
use crate::weyl::{weyl_mul, CommPoly, Monomial, WeylPoly};
use crate::{qi, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// `sum_m [beta]_{sum a_k m_k} / prod m_k! * prod (x_k / x_1^{a_k})^{m_k} * x_1^beta`
    /// over `m` in `N^{n-1}`; `|m|` is the truncation degree.
    Formal,
    /// `sum_m c_m prod (x_1^{a_k} / x_k)^{m_k} * x^v` with
    /// `c_m = prod_{u_i < 0} [v_i]_{-u_i} / prod_{u_i > 0} (v_i+1)...(v_i+u_i)`,
    /// `u` the exponent shift of `m`. On `N^{n-1}` this is
    /// `prod_k [v_k]_{m_k} / ((v_1+1)...(v_1+sum a_k m_k))`; for `n >= 3` the
    /// support also reaches `m_k < 0` for `1 < k < n`, which the solution
    /// needs. The truncation degree is the weight of `u` for `w = (1, ..., 1, 0)`.
    Convergent,
}

/// A truncated series solution with its starting exponent kept symbolic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesSolution {
    pub a: Vec<u32>,
    #[serde(serialize_with = "crate::ser::q_vec")]
    pub exponent: Vec<Q>,
    /// Lattice coordinates `(m_2, ..., m_n)` with nonzero coefficients.
    #[serde(serialize_with = "ser_terms")]
    pub terms: BTreeMap<Vec<i64>, Q>,
    /// Every lattice point of degree at most `order` was considered.
    pub order: u32,
    pub kind: SeriesKind,
}

fn ser_terms<S: serde::Serializer>(t: &BTreeMap<Vec<i64>, Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(t.len()))?;
    for (m, c) in t {
        seq.serialize_element(&(m, c.to_string()))?;
    }
    seq.end()
}

/// `u (u-1) ... (u-k+1)`.
fn falling(u: &Q, k: u32) -> Q {
    let mut out = Q::one();
    let mut f = u.clone();
    for _ in 0..k {
        out *= &f;
        f -= Q::one();
    }
    out
}

fn factorial(k: u32) -> Q {
    (1..=k).fold(Q::one(), |acc, i| acc * qi(i64::from(i)))
}

/// All `m` in `N^len` with `|m| <= order`.
fn lattice_points(len: usize, order: u32) -> Vec<Vec<i64>> {
    fn rec(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, i64::from(order), &mut vec![0; len], &mut out);
    out
}

impl SeriesSolution {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `x`-exponent shift of the lattice point `m`.
    fn shift(&self, m: &[i64]) -> Vec<i64> {
        let mut u = vec![0i64; self.n()];
        for (k, &mk) in m.iter().enumerate() {
            let ak = i64::from(self.a[k + 1]);
            match self.kind {
                SeriesKind::Formal => {
                    u[0] -= ak * mk;
                    u[k + 1] += mk;
                }
                SeriesKind::Convergent => {
                    u[0] += ak * mk;
                    u[k + 1] -= mk;
                }
            }
        }
        u
    }

    /// Exponent vector of `x` carried by the term at `m`.
    pub fn exponent_of(&self, m: &[i64]) -> Vec<Q> {
        self.exponent.iter().zip(self.shift(m)).map(|(v, u)| v + qi(u)).collect()
    }

    fn degree_weights(&self) -> Vec<i64> {
        let n = self.n();
        match self.kind {
            // |m| on the lattice coset
            SeriesKind::Formal => std::iter::once(-1).chain(self.a[1..].iter().map(|&a| 1 - i64::from(a))).collect(),
            SeriesKind::Convergent => (0..n).map(|i| i64::from(i + 1 < n)).collect(),
        }
    }

    /// Truncation degree of an exponent vector relative to the start.
    pub fn lattice_degree(&self, e: &[Q]) -> Q {
        let c = self.degree_weights();
        e.iter().zip(&self.exponent).zip(&c).map(|((a, b), &ci)| (a - b) * qi(ci)).sum()
    }

    /// Largest drop in truncation degree caused by a term of `p`.
    pub fn degree_drop(&self, p: &WeylPoly) -> i64 {
        let n = self.n();
        let c = self.degree_weights();
        p.terms()
            .map(|(m, _)| (0..n).map(|i| c[i] * (i64::from(m[n + i]) - i64::from(m[i]))).sum::<i64>())
            .max()
            .unwrap_or(0)
            .max(0)
    }

    /// `P` applied to the truncated series, as a map from exponents to coefficients.
    pub fn residual(&self, p: &WeylPoly) -> Result<BTreeMap<Vec<Q>, Q>> {
        if p.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: p.n() });
        }
        let n = self.n();
        let mut out: BTreeMap<Vec<Q>, Q> = BTreeMap::new();
        for (m, c) in &self.terms {
            let u = self.exponent_of(m);
            for (mono, pc) in p.terms() {
                let mut coef = c * pc;
                let mut e = u.clone();
                for i in 0..n {
                    let b = u32::from(mono[n + i]);
                    coef *= falling(&u[i], b);
                    e[i] += qi(i64::from(mono[i]) - i64::from(b));
                }
                if coef.is_zero() {
                    continue;
                }
                *out.entry(e).or_insert_with(Q::zero) += coef;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// For every generator `P`, the residual of `P` on the truncation only has
    /// terms that the omitted tail can reach: degree above `order` minus the
    /// largest degree drop of `P`.
    pub fn annihilated_to_order(&self, gens: &[WeylPoly]) -> Result<bool> {
        for g in gens {
            let bound = qi(i64::from(self.order) - self.degree_drop(g));
            for e in self.residual(g)?.keys() {
                if self.lattice_degree(e) <= bound {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The polynomial when all exponents are nonnegative integers.
    pub fn to_polynomial(&self) -> Option<CommPoly> {
        let n = self.n();
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = self.exponent_of(m);
            let mut mono = Monomial::one(2 * n);
            for (i, x) in e.iter().enumerate() {
                if !x.is_integer() || x.is_negative() {
                    return None;
                }
                mono.set(i, u16::try_from(x.to_integer()).ok()?);
            }
            terms.push((mono, c.clone()));
        }
        CommPoly::from_terms(2 * n, terms).ok()
    }

    /// Coefficients at `m = (0, ..., 0, k)`, `k = 0, 1, ...` within the
    /// truncation: the series `x^{-v} f` restricted to
    /// `y_2 = ... = y_{n-1} = 0` with `y_n = x_1^{a_n} / x_n = z`.
    pub fn last_direction(&self) -> Vec<Q> {
        let len = self.n() - 1;
        let mut out = Vec::new();
        for k in 0.. {
            let mut m = vec![0; len];
            if len > 0 {
                m[len - 1] = k;
            }
            if self.lattice_degree(&self.exponent_of(&m)) > qi(i64::from(self.order)) || (len == 0 && k > 0) {
                break;
            }
            out.push(self.terms.get(&m).cloned().unwrap_or_else(Q::zero));
        }
        out
    }
}

fn fmt_power(f: &mut fmt::Formatter<'_>, i: usize, e: &Q) -> fmt::Result {
    if e.is_zero() {
        return Ok(());
    }
    if e.is_one() {
        write!(f, "x{}", i + 1)
    } else if e.is_integer() && e.is_positive() {
        write!(f, "x{}^{}", i + 1, e)
    } else {
        write!(f, "x{}^({})", i + 1, e)
    }
}

impl fmt::Display for SeriesSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let e = self.exponent_of(m);
            let mut c = c.clone();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                    c = -c;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
                c = -c;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let constant = e.iter().all(|x| x.is_zero());
            let mut need_star = false;
            if !c.is_one() || constant {
                write!(f, "{c}")?;
                need_star = true;
            }
            for (i, x) in e.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if need_star {
                    write!(f, "*")?;
                }
                fmt_power(f, i, x)?;
                need_star = true;
            }
        }
        if !self.terms.is_empty() {
            write!(f, " + O(order {})", self.order + 1)?;
        }
        Ok(())
    }
}

/// The formal series with `in_w = x_1^beta` for `w = (0, 1, ..., 1)`,
/// truncated at `|m| <= order`.
pub fn formal_series(sys: &GkzSystem, order: u32) -> SeriesSolution {
    let a = sys.a().to_vec();
    let beta = sys.beta().clone();
    let n = a.len();
    let mut exponent = vec![Q::zero(); n];
    exponent[0] = beta.clone();
    let mut terms = BTreeMap::new();
    for m in lattice_points(n - 1, order) {
        let s: i64 = m.iter().zip(&a[1..]).map(|(mk, &ak)| mk * i64::from(ak)).sum();
        let den = m.iter().fold(Q::one(), |acc, &mk| acc * factorial(mk as u32));
        let s = s as u32;
        let c = falling(&beta, s) / den;
        if !c.is_zero() {
            terms.insert(m, c);
        }
    }
    SeriesSolution { a, exponent, terms, order, kind: SeriesKind::Formal }
}

/// The polynomial solution, present exactly when `beta` is a natural number.
/// The result is checked against every generator before it is returned.
pub fn polynomial_solution(sys: &GkzSystem) -> Result<Option<CommPoly>> {
    let beta = sys.beta();
    if !beta.is_integer() || beta.is_negative() {
        return Ok(None);
    }
    let b = u32::try_from(beta.to_integer()).map_err(|_| Error::InvalidInput(format!("beta = {beta} is too large")))?;
    // sum a_k m_k <= beta bounds |m| by beta
    let series = formal_series(sys, b);
    let poly = series.to_polynomial().ok_or_else(|| Error::InvalidInput("series is not a polynomial".into()))?;
    for g in sys.ideal().generators() {
        if !g.apply(&poly)?.is_zero() {
            return Err(Error::InvalidInput(format!("{g} does not annihilate {poly}")));
        }
    }
    Ok(Some(poly))
}

/// Standard pairs of the initial monomial ideal of `I_A` for `w = (1, ..., 1, 0)`
/// refined by graded reverse lexicographic order, in the variables `d_1..d_n`.
pub fn toric_standard_pairs(sys: &GkzSystem) -> Result<Vec<StandardPair>> {
    let n = sys.n();
    let mut v = vec![1i64; n];
    v[n - 1] = 0;
    let w = WeightVector::new(vec![0; n], v)?;
    let order = CompositeOrder::new(w, None, TermOrder::weyl_default(n))?;
    let gb = buchberger(&sys.toric_ideal(), &order)?;
    let gens: Vec<CommPoly> = gb.leading_monomials().iter().map(|m| monomial(&m[n..])).collect();
    if gens.is_empty() {
        return Ok(vec![StandardPair { exponent: vec![0; n], face: (0..n).collect() }]);
    }
    standard_pairs(&CommIdeal::new(n, gens)?)
}

/// `beta` is not an integer, or exceeds `sum a_i (a_n - 1)`.
fn convergent_hypothesis(sys: &GkzSystem) -> bool {
    let beta = sys.beta();
    let an = i64::from(*sys.a().last().unwrap());
    let bound: i64 = sys.a().iter().map(|&ai| i64::from(ai) * (an - 1)).sum();
    !beta.is_integer() || beta > &qi(bound)
}

/// One truncated series per top-dimensional standard pair `(d^b, {n})`.
pub fn convergent_series_basis(sys: &GkzSystem, order: u32) -> Result<Vec<SeriesSolution>> {
    if sys.n() < 2 {
        return Err(Error::InvalidInput("the series basis needs n >= 2".into()));
    }
    if !convergent_hypothesis(sys) {
        return Err(Error::Hypothesis(format!(
            "beta = {} must be a non-integer or larger than sum a_i (a_n - 1)",
            sys.beta()
        )));
    }
    let a = sys.a().to_vec();
    let n = a.len();
    let an = qi(i64::from(a[n - 1]));
    let mut out = Vec::new();
    for pair in toric_standard_pairs(sys)? {
        if pair.face != [n - 1] {
            continue;
        }
        let b: Vec<i64> = pair.exponent[..n - 1].iter().map(|&e| i64::from(e)).collect();
        let mut exponent: Vec<Q> = b.iter().map(|&e| qi(e)).collect();
        let ab: Q = exponent.iter().zip(&a).map(|(bi, ai)| bi * qi(i64::from(*ai))).sum();
        exponent.push((sys.beta() - ab) / &an);
        let mut series = SeriesSolution { a: a.clone(), exponent, terms: BTreeMap::new(), order, kind: SeriesKind::Convergent };
        for m in convergent_support(&a, &b, order) {
            let u = series.shift(&m);
            let mut c = Q::one();
            for (vi, &ui) in series.exponent.iter().zip(&u) {
                if ui < 0 {
                    c *= falling(vi, (-ui) as u32);
                } else {
                    for j in 1..=ui {
                        let f = vi + qi(j);
                        if f.is_zero() {
                            return Err(Error::Hypothesis(format!("denominator vanishes at m = {m:?}")));
                        }
                        c /= f;
                    }
                }
                if c.is_zero() {
                    break;
                }
            }
            if !c.is_zero() {
                series.terms.insert(m, c);
            }
        }
        out.push(series);
    }
    Ok(out)
}

/// Lattice points whose shift `u` keeps `x_1, ..., x_{n-1}` at nonnegative
/// integer exponents and has `w`-degree `u_1 + ... + u_{n-1} <= order`.
fn convergent_support(a: &[u32], b: &[i64], order: u32) -> Vec<Vec<i64>> {
    let n = a.len();
    let an = i64::from(a[n - 1]);
    let order = i64::from(order);
    let sum_b: i64 = b.iter().sum();
    // u_1 >= -b_1 and u_k = -m_k >= -b_k, so each m_k >= -(order + sum b)
    let low = -(order + sum_b);
    let mut out = Vec::new();
    let mut mid = vec![0i64; n.saturating_sub(2)];
    fn rec(k: usize, low: i64, b: &[i64], mid: &mut Vec<i64>, visit: &mut dyn FnMut(&[i64])) {
        if k == mid.len() {
            visit(mid);
            return;
        }
        for mk in low..=b[k + 1] {
            mid[k] = mk;
            rec(k + 1, low, b, mid, visit);
        }
    }
    let mut visit = |mid: &[i64]| {
        let partial: i64 = mid.iter().zip(&a[1..n - 1]).map(|(m, &ak)| m * i64::from(ak)).sum();
        let minus_sum: i64 = -mid.iter().sum::<i64>();
        // u_1 = partial + a_n m_n ranges over [-b_1, order - minus_sum]
        let lo = (-b[0] - partial).div_euclid(an) + i64::from((-b[0] - partial).rem_euclid(an) != 0);
        let hi = (order - minus_sum - partial).div_euclid(an);
        for mn in lo..=hi {
            let mut m = mid.to_vec();
            m.push(mn);
            out.push(m);
        }
    };
    rec(0, low, b, &mut mid, &mut visit);
    out
}

/// An operator in one variable `x`, `d = d/dx`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinaryOperator {
    pub operator: WeylPoly,
}

impl OrdinaryOperator {
    /// Applies the operator to `sum c_k x^(s + k)` given as coefficients `c_k`,
    /// returning the coefficients of the result in the same shape (degrees
    /// that fall below `s` are dropped; they vanish for the operators here).
    pub fn apply_series(&self, start: &Q, coeffs: &[Q]) -> Vec<Q> {
        let mut out: BTreeMap<i64, Q> = BTreeMap::new();
        for (k, c) in coeffs.iter().enumerate() {
            let u = start + qi(k as i64);
            for (m, pc) in self.operator.terms() {
                let (alpha, beta) = (m[0], m[1]);
                let coef = c * pc * falling(&u, u32::from(beta));
                if coef.is_zero() {
                    continue;
                }
                let shift = k as i64 + i64::from(alpha) - i64::from(beta);
                *out.entry(shift).or_insert_with(Q::zero) += coef;
            }
        }
        let top = out.keys().max().copied().unwrap_or(0).max(coeffs.len() as i64 - 1);
        (0..=top).map(|k| out.get(&k).cloned().unwrap_or_else(Q::zero)).collect()
    }
}

impl fmt::Display for OrdinaryOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.operator)
    }
}

/// `theta (theta - 1/a_n) ... (theta - (a_n - 1)/a_n) - x (theta + v_n)`,
/// `theta = x d`, in normal order.
pub fn generalized_hg_ode(an: u32, vn: &Q) -> Result<OrdinaryOperator> {
    if an == 0 {
        return Err(Error::InvalidInput("a_n must be positive".into()));
    }
    let theta = WeylPoly::term(1, Monomial::from_slice(&[1, 1]), Q::one());
    let mut prod = WeylPoly::one(1);
    for j in 0..an {
        let shift = WeylPoly::constant(1, Q::new(i64::from(j).into(), i64::from(an).into()));
        prod = weyl_mul(&prod, &(&theta - &shift))?;
    }
    let tail = weyl_mul(&WeylPoly::x(1, 1), &(&theta + &WeylPoly::constant(1, vn.clone())))?;
    Ok(OrdinaryOperator { operator: &prod - &tail })
}

/// Coefficients `[v]_m / (a m)!` of `x^{-v} f` along the last lattice
/// direction of a convergent series with `v_1 = 0`.
pub fn one_variable_series(an: u32, vn: &Q, order: u32) -> Vec<Q> {
    (0..=order).map(|m| falling(vn, m) / factorial(an * m)).collect()
}

/// Why a system is or is not reducible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReducibilityWitness {
    /// `beta` in `N`: a polynomial solution spans a proper subspace.
    PolynomialSolution { polynomial: String },
    /// `beta` a negative integer: `d_1 : M(beta) -> M(beta + 1)` is an
    /// isomorphism down to `M(-1)`, and the solution map `f -> d_1 f` from
    /// `M(0)` to `M(-1)` kills the constant solution `1`.
    DerivativeKernel { steps: u64 },
    /// `beta` not an integer: the system is irreducible; the one-variable
    /// restriction of the series basis satisfies the recorded equation.
    NonIntegerParameter { ode: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reducibility {
    pub reducible: bool,
    pub witness: ReducibilityWitness,
}

/// Reducible over rational-function coefficients exactly when `beta` is an integer.
pub fn is_reducible(sys: &GkzSystem) -> Result<Reducibility> {
    let beta = sys.beta();
    if beta.is_integer() {
        if !beta.is_negative() {
            let p = polynomial_solution(sys)?.expect("natural beta has a polynomial solution");
            let names = CommPoly::default_names(sys.n());
            return Ok(Reducibility {
                reducible: true,
                witness: ReducibilityWitness::PolynomialSolution { polynomial: p.fmt_with(&names) },
            });
        }
        // the constant solves the beta = 0 system and is killed by d_1
        let zero = GkzSystem::new(sys.a().to_vec(), Q::zero())?;
        let one = polynomial_solution(&zero)?.expect("beta = 0 has the solution 1");
        debug_assert!(WeylPoly::d(sys.n(), 1).apply(&one)?.is_zero());
        let steps = u64::try_from((-beta - Q::one()).to_integer()).unwrap_or(u64::MAX);
        return Ok(Reducibility { reducible: true, witness: ReducibilityWitness::DerivativeKernel { steps } });
    }
    let an = *sys.a().last().unwrap();
    let vn = beta / qi(i64::from(an));
    let ode = generalized_hg_ode(an, &vn)?;
    Ok(Reducibility { reducible: false, witness: ReducibilityWitness::NonIntegerParameter { ode: ode.to_string() } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;
    use proptest::prelude::*;

    fn sys(a: &[u32], beta: Q) -> GkzSystem {
        GkzSystem::new(a.to_vec(), beta).unwrap()
    }

    fn poly(s: &str, n: usize) -> CommPoly {
        // operators in x only double as polynomials
        let w = WeylPoly::parse(s, n).unwrap();
        CommPoly::from_terms(2 * n, w.terms().map(|(m, c)| (m.clone(), c.clone()))).unwrap()
    }

    #[test]
    fn polynomial_solutions() {
        assert_eq!(polynomial_solution(&sys(&[1, 3], qi(3))).unwrap(), Some(poly("x1^3+6*x2", 2)));
        assert_eq!(polynomial_solution(&sys(&[1, 3], qi(0))).unwrap(), Some(CommPoly::one(4)));
        assert_eq!(polynomial_solution(&sys(&[1, 3], q(1, 2))).unwrap(), None);
        assert_eq!(polynomial_solution(&sys(&[1, 3], qi(-2))).unwrap(), None);
    }

    #[test]
    fn polynomial_solution_exists_exactly_for_naturals() {
        let betas: Vec<Q> = (-3..=5).map(qi).chain([q(1, 2), q(7, 3)]).collect();
        for a in [&[1u32, 2][..], &[1, 3], &[1, 3, 7]] {
            for beta in &betas {
                let s = sys(a, beta.clone());
                let p = polynomial_solution(&s).unwrap();
                let natural = beta.is_integer() && !beta.is_negative();
                assert_eq!(p.is_some(), natural, "A = {a:?}, beta = {beta}");
                if let Some(p) = p {
                    for g in s.ideal().generators() {
                        assert!(g.apply(&p).unwrap().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn formal_series_examples() {
        let f = formal_series(&sys(&[1, 3], qi(3)), 1);
        assert_eq!(f.to_polynomial(), Some(poly("x1^3+6*x2", 2)));
        let f = formal_series(&sys(&[1, 2], q(1, 2)), 2);
        assert_eq!(f.terms[&vec![1]], q(-1, 4));
        // [1/2]_4 / 2! = (1/2)(-1/2)(-3/2)(-5/2)/2
        assert_eq!(f.terms[&vec![2]], q(-15, 32));
        let f = formal_series(&sys(&[1, 3, 7], q(7, 3)), 0);
        assert_eq!(f.terms.len(), 1);
        assert_eq!(f.to_string(), "x1^(7/3) + O(order 1)");
    }

    #[test]
    fn formal_series_are_annihilated_to_order() {
        for (a, beta) in [(&[1u32, 2][..], q(1, 2)), (&[1, 3], q(-5, 3)), (&[1, 3, 7], q(7, 3)), (&[1, 2, 5], qi(-4))] {
            let s = sys(a, beta);
            let f = formal_series(&s, 5);
            assert!(f.annihilated_to_order(s.ideal().generators()).unwrap(), "{f}");
        }
    }

    #[test]
    fn a_wrong_coefficient_is_detected() {
        let s = sys(&[1, 3], q(1, 2));
        let mut f = formal_series(&s, 4);
        *f.terms.get_mut(&vec![2]).unwrap() += Q::one();
        assert!(!f.annihilated_to_order(s.ideal().generators()).unwrap());
        let mut g = convergent_series_basis(&s, 4).unwrap().remove(0);
        *g.terms.get_mut(&vec![1]).unwrap() *= qi(2);
        assert!(!g.annihilated_to_order(s.ideal().generators()).unwrap());
    }

    #[test]
    fn standard_pairs_of_the_toric_initial_ideal() {
        let pairs = toric_standard_pairs(&sys(&[1, 3], q(1, 2))).unwrap();
        let top: Vec<_> = pairs.iter().filter(|p| p.face == [1]).map(|p| p.exponent.clone()).collect();
        assert_eq!(top.len(), 3);
        for b in 0..3 {
            assert!(top.contains(&vec![b, 0]));
        }
        let pairs = toric_standard_pairs(&sys(&[1, 3, 7], q(1, 2))).unwrap();
        assert_eq!(pairs.iter().filter(|p| p.face == [2]).count(), 7);
    }

    #[test]
    fn convergent_basis_for_1_3() {
        let s = sys(&[1, 3], q(1, 2));
        let basis = convergent_series_basis(&s, 6).unwrap();
        assert_eq!(basis.len(), 3);
        let mut starts: Vec<Vec<Q>> = basis.iter().map(|b| b.exponent.clone()).collect();
        starts.sort();
        for (b1, v) in starts.iter().enumerate() {
            let b1 = b1 as i64;
            assert_eq!(v, &vec![qi(b1), (q(1, 2) - qi(b1)) / qi(3)]);
        }
        for b in &basis {
            assert!(b.annihilated_to_order(s.ideal().generators()).unwrap(), "{b}");
        }
    }

    #[test]
    fn rank_equals_last_exponent() {
        for a in [&[1u32, 2][..], &[1, 3], &[1, 2, 5], &[1, 3, 7], &[1, 2, 3, 5]] {
            let s = sys(a, q(1, 3));
            let basis = convergent_series_basis(&s, 4).unwrap();
            assert_eq!(basis.len() as u32, *a.last().unwrap(), "A = {a:?}");
            for b in &basis {
                assert!(b.annihilated_to_order(s.ideal().generators()).unwrap(), "A = {a:?}: {b}");
            }
        }
    }

    #[test]
    fn convergent_coefficients_on_the_positive_orthant() {
        let s = sys(&[1, 3, 7], q(1, 2));
        for f in convergent_series_basis(&s, 12).unwrap() {
            let v = &f.exponent;
            for (m, c) in &f.terms {
                if m.iter().any(|&k| k < 0) {
                    continue;
                }
                let mut num = Q::one();
                for (k, &mk) in m.iter().enumerate() {
                    num *= falling(&v[k + 1], mk as u32);
                }
                let total: i64 = m.iter().zip([3i64, 7]).map(|(mk, ak)| mk * ak).sum();
                let den = (1..=total).fold(Q::one(), |acc, j| acc * (&v[0] + qi(j)));
                assert_eq!(c, &(num / den));
            }
        }
    }

    #[test]
    fn three_variable_series_need_negative_lattice_points() {
        let s = sys(&[1, 2, 5], q(1, 3));
        let basis = convergent_series_basis(&s, 6).unwrap();
        assert!(basis.iter().any(|f| f.terms.keys().any(|m| m[0] < 0)));
        for f in &basis {
            assert!(f.annihilated_to_order(s.ideal().generators()).unwrap());
            let mut orthant = f.clone();
            orthant.terms.retain(|m, _| m.iter().all(|&k| k >= 0));
            if orthant.terms.len() < f.terms.len() {
                assert!(!orthant.annihilated_to_order(s.ideal().generators()).unwrap());
            }
        }
    }

    #[test]
    fn hypothesis_is_enforced() {
        assert!(matches!(convergent_series_basis(&sys(&[1, 3], qi(2)), 3), Err(Error::Hypothesis(_))));
        // 1*2 + 3*2 = 8 < 9
        assert_eq!(convergent_series_basis(&sys(&[1, 3], qi(9)), 3).unwrap().len(), 3);
    }

    #[test]
    fn one_variable_shadow() {
        let s = sys(&[1, 2], q(1, 2));
        // w-degree of m = (k) is 2k
        let basis = convergent_series_basis(&s, 8).unwrap();
        let b0 = basis.iter().find(|b| b.exponent[0].is_zero()).unwrap();
        let vn = b0.exponent[1].clone();
        assert_eq!(vn, q(1, 4));
        assert_eq!(b0.last_direction(), one_variable_series(2, &vn, 4));
        // no alternating sign: the m = 1 coefficient is v_n / 2! > 0
        assert_eq!(b0.last_direction()[1], q(1, 8));
    }

    #[test]
    fn ode_expansions() {
        let ode = generalized_hg_ode(1, &Q::zero()).unwrap();
        assert_eq!(ode.operator, WeylPoly::parse("x1*Dx1-x1^2*Dx1", 1).unwrap());
        let ode = generalized_hg_ode(3, &q(1, 6)).unwrap();
        let theta = WeylPoly::parse("x1*Dx1", 1).unwrap();
        let mut expected = WeylPoly::one(1);
        for j in 0..3 {
            expected = &expected * &(&theta - &WeylPoly::constant(1, q(j, 3)));
        }
        expected = &expected - &(&WeylPoly::x(1, 1) * &(&theta + &WeylPoly::constant(1, q(1, 6))));
        assert_eq!(ode.operator, expected);
        assert!(generalized_hg_ode(0, &Q::zero()).is_err());
    }

    /// `sum [v]^m / (a m)! (a^a x)^m` with the rising factorial `[v]^m`.
    fn rising_series(an: u32, vn: &Q, order: u32) -> Vec<Q> {
        let scale = qi(i64::from(an)).pow(an as i32);
        (0..=order)
            .map(|m| {
                let mut r = Q::one();
                for j in 0..m {
                    r *= vn + qi(i64::from(j));
                }
                r * scale.pow(m as i32) / factorial(an * m)
            })
            .collect()
    }

    #[test]
    fn ode_annihilates_the_rising_series() {
        for (an, vn) in [(2u32, q(1, 4)), (3, q(1, 6)), (3, q(-2, 9)), (5, q(7, 5))] {
            let ode = generalized_hg_ode(an, &vn).unwrap();
            let out = ode.apply_series(&Q::zero(), &rising_series(an, &vn, 6));
            // only the x^7 tail survives
            assert!(out[..=6].iter().all(|c| c.is_zero()), "{out:?}");
            assert!(!out[7].is_zero());
        }
    }

    #[test]
    fn ode_does_not_annihilate_the_alternating_falling_series() {
        let (an, vn) = (3u32, q(1, 6));
        let scale = qi(3).pow(3);
        let alternating: Vec<Q> = one_variable_series(an, &vn, 6)
            .into_iter()
            .enumerate()
            .map(|(m, c)| c * (-scale.clone()).pow(m as i32))
            .collect();
        let out = generalized_hg_ode(an, &vn).unwrap().apply_series(&Q::zero(), &alternating);
        assert!(out[..=6].iter().any(|c| !c.is_zero()));
        // the restricted series matches the equation with the signs of x and v_n flipped
        let flipped = generalized_hg_ode(an, &-vn.clone()).unwrap();
        let out = flipped.apply_series(&Q::zero(), &alternating);
        assert!(out[..=6].iter().all(|c| c.is_zero()), "{out:?}");
    }

    #[test]
    fn reducibility() {
        let r = is_reducible(&sys(&[1, 3, 7], qi(-30))).unwrap();
        assert!(r.reducible);
        assert_eq!(r.witness, ReducibilityWitness::DerivativeKernel { steps: 29 });
        let r = is_reducible(&sys(&[1, 3], q(1, 2))).unwrap();
        assert!(!r.reducible);
        let r = is_reducible(&sys(&[1, 3], qi(0))).unwrap();
        assert_eq!(r.witness, ReducibilityWitness::PolynomialSolution { polynomial: "1".into() });
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn reducible_iff_integer(num in -12i64..12, den in 1i64..4, a2 in 2u32..5) {
            let beta = q(num, den);
            let s = sys(&[1, a2], beta.clone());
            let r = is_reducible(&s).unwrap();
            prop_assert_eq!(r.reducible, beta.is_integer());
            if beta.is_integer() && !beta.is_negative() {
                prop_assert!(polynomial_solution(&s).unwrap().is_some());
            }
        }

        #[test]
        fn series_annihilated(num in -12i64..12, a2 in 2u32..4, a3 in 4u32..7) {
            let beta = q(2 * num + 1, 2);
            let s = sys(&[1, a2, a3], beta);
            let f = formal_series(&s, 3);
            prop_assert!(f.annihilated_to_order(s.ideal().generators()).unwrap());
            for b in convergent_series_basis(&s, 3).unwrap() {
                prop_assert!(b.annihilated_to_order(s.ideal().generators()).unwrap());
            }
        }
    }
}
