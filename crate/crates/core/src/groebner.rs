//! Gröbner bases of left ideals in the Weyl algebra and initial ideals.

use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;

use crate::comm::CommIdeal;
use crate::engine::{self, Budget, Poly, Ring};
use crate::error::{Error, Result};
use crate::orders::{dot, CompositeOrder, MonomialOrder, WeightVector};
use crate::weyl::{CommPoly, Monomial, WeylPoly};
use crate::Q;

pub use crate::engine::DEFAULT_BUDGET;

/// A left ideal of `A_n` given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylIdeal {
    n: usize,
    generators: Vec<WeylPoly>,
}

impl WeylIdeal {
    /// Zero generators are dropped.
    pub fn new(n: usize, generators: Vec<WeylPoly>) -> Result<Self> {
        for g in &generators {
            if g.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.n() });
            }
        }
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(WeylIdeal { n, generators })
    }

    /// One operator per line; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut gens = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let p = WeylPoly::parse(body, n).map_err(|e| match e {
                Error::Syntax { pos, msg } => Error::Syntax { pos, msg: format!("line {}: {msg}", lineno + 1) },
                other => other,
            })?;
            gens.push(p);
        }
        WeylIdeal::new(n, gens)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[WeylPoly] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

impl fmt::Display for WeylIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.generators {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// A Gröbner basis with the order it was computed for.
///
/// Orders whose weights have negative entries are not well-orders. For those
/// the basis is computed in the homogenized algebra (`[d_i, x_i] = h^2`) and
/// then `h = 1` is substituted, so the elements are only reduced in the
/// homogenized sense and `reduced` is false. Membership questions for such
/// orders go through a term-order basis of the same ideal.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub elements: Vec<WeylPoly>,
    pub order: CompositeOrder,
    pub reduced: bool,
    polys: Vec<Poly>,
    /// The basis in the homogenized algebra this one was dehomogenized from.
    homogeneous: Option<Vec<Poly>>,
    companion: OnceLock<Vec<Poly>>,
}

pub(crate) fn weyl_ring(order: &CompositeOrder) -> Ring {
    Ring::weyl(order.n(), order.monomial_order())
}

fn export(n: usize, p: &Poly) -> WeylPoly {
    let w = WeylPoly::from_terms(n, engine::to_rational(p)).expect("engine output is well formed");
    w.normalized()
}

fn check_n(order: &CompositeOrder, n: usize) -> Result<()> {
    if order.n() != n {
        return Err(Error::DimensionMismatch { expected: order.n(), found: n });
    }
    Ok(())
}

impl GroebnerBasis {
    /// Wraps a list already known to be a Gröbner basis for `order`.
    pub(crate) fn from_polys(n: usize, order: CompositeOrder, polys: Vec<Poly>, reduced: bool) -> Self {
        let elements = polys.iter().map(|p| export(n, p)).collect();
        GroebnerBasis { elements, order, reduced, polys, homogeneous: None, companion: OnceLock::new() }
    }

    /// Homogenized counterparts of the elements: the basis they came from
    /// when there is one, otherwise each element homogenized.
    fn homogeneous_polys(&self) -> (Ring, Vec<Poly>) {
        let ring = weyl_ring(&self.order);
        let polys = match &self.homogeneous {
            Some(h) => h.clone(),
            None => self.polys.iter().map(|p| ring.homogenize(p)).collect(),
        };
        (ring.homogenized(), polys)
    }

    fn well_ordered(&self) -> bool {
        self.order.monomial_order().is_well_order()
    }

    /// Reduced basis of the same ideal for the plain tiebreak order.
    fn membership_basis(&self) -> Result<(Ring, &[Poly])> {
        if self.well_ordered() {
            return Ok((weyl_ring(&self.order), &self.polys));
        }
        let ring = Ring::weyl(self.n(), MonomialOrder::term(self.order.tiebreak.clone()));
        if self.companion.get().is_none() {
            let gens = self.polys.iter().map(|p| ring.collect(p.iter().map(|t| (t.m.clone(), t.c.clone())).collect())).collect();
            let basis = engine::groebner(&ring, gens, &mut Budget::new(DEFAULT_BUDGET))?;
            let _ = self.companion.set(basis);
        }
        Ok((ring, self.companion.get().expect("just set")))
    }

    /// Wraps arbitrary operators, e.g. to test whether they already form a
    /// Gröbner basis with [`GroebnerBasis::is_certified`].
    pub fn from_elements(order: &CompositeOrder, elements: &[WeylPoly]) -> Result<Self> {
        let n = order.n();
        let ring = weyl_ring(order);
        let mut polys = Vec::new();
        for e in elements {
            if e.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: e.n() });
            }
            if !e.is_zero() {
                polys.push(ring.from_rational(e.terms()).0);
            }
        }
        Ok(GroebnerBasis::from_polys(n, order.clone(), polys, false))
    }

    pub fn n(&self) -> usize {
        self.order.n()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True when the ideal is all of `A_n`.
    pub fn is_unit(&self) -> bool {
        if self.polys.iter().any(|p| p.len() == 1 && p[0].m.is_one()) {
            return true;
        }
        if self.well_ordered() {
            return false;
        }
        match self.membership_basis() {
            Ok((_, b)) => b.len() == 1 && b[0][0].m.is_one(),
            Err(_) => false,
        }
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys.iter().map(|p| p[0].m.clone()).collect()
    }

    pub fn normal_form(&self, p: &WeylPoly) -> Result<WeylPoly> {
        normal_form_with_budget(p, self, DEFAULT_BUDGET)
    }

    pub fn contains(&self, p: &WeylPoly) -> Result<bool> {
        if p.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: p.n() });
        }
        if p.is_zero() {
            return Ok(true);
        }
        let (ring, basis) = self.membership_basis()?;
        let f = ring.from_rational(p.terms()).0;
        let refs: Vec<&Poly> = basis.iter().collect();
        Ok(engine::reduce(&ring, f, &refs, true, &mut Budget::new(DEFAULT_BUDGET))?.rem.is_empty())
    }

    /// Top-weight forms of the elements for the primary weight of the order.
    pub fn initial_forms(&self) -> Vec<CommPoly> {
        self.elements.iter().map(|g| initial_form(g, &self.order.w)).collect()
    }

    /// Every S-pair reduces to zero. For orders that are not well-orders the
    /// test runs in the homogenized algebra on the basis the elements were
    /// dehomogenized from (or on the homogenized elements, for wrapped lists).
    pub fn is_certified(&self) -> Result<bool> {
        let mut budget = Budget::new(DEFAULT_BUDGET);
        if self.well_ordered() {
            return engine::is_groebner(&weyl_ring(&self.order), &self.polys, &mut budget);
        }
        let (hom, polys) = self.homogeneous_polys();
        engine::is_groebner(&hom, &polys, &mut budget)
    }

    /// Every generator of `ideal` reduces to zero.
    pub fn generates(&self, ideal: &WeylIdeal) -> Result<bool> {
        for g in ideal.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for GroebnerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.elements {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

pub fn buchberger(ideal: &WeylIdeal, order: &CompositeOrder) -> Result<GroebnerBasis> {
    buchberger_with_budget(ideal, order, DEFAULT_BUDGET)
}

/// Reduced Gröbner basis; fails with [`Error::BudgetExceeded`] after
/// `budget` reduction steps.
pub fn buchberger_with_budget(ideal: &WeylIdeal, order: &CompositeOrder, budget: u64) -> Result<GroebnerBasis> {
    let mut b = Budget::new(budget);
    buchberger_counted(ideal, order, &mut b)
}

pub(crate) fn buchberger_counted(ideal: &WeylIdeal, order: &CompositeOrder, budget: &mut Budget) -> Result<GroebnerBasis> {
    check_n(order, ideal.n())?;
    let ring = weyl_ring(order);
    let gens: Vec<Poly> = ideal.generators().iter().map(|g| ring.from_rational(g.terms()).0).collect();
    if ring.order.is_well_order() {
        let polys = engine::groebner(&ring, gens, budget)?;
        return Ok(GroebnerBasis::from_polys(ideal.n(), order.clone(), polys, true));
    }
    let hom = ring.homogenized();
    let gens = gens.iter().map(|g| ring.homogenize(g)).collect();
    let homogeneous = engine::groebner(&hom, gens, budget)?;
    let mut polys: Vec<Poly> = homogeneous.iter().map(|p| ring.dehomogenize(p)).collect();
    // leading monomials that only differed in their power of h
    polys.sort_by(|a, b| ring.cmp(&a[0].m, &b[0].m));
    let mut minimal: Vec<Poly> = Vec::with_capacity(polys.len());
    for p in polys {
        if !minimal.iter().any(|q| q[0].m.divides(&p[0].m)) {
            minimal.push(p);
        }
    }
    let mut g = GroebnerBasis::from_polys(ideal.n(), order.clone(), minimal, false);
    g.homogeneous = Some(homogeneous);
    Ok(g)
}

pub fn normal_form(p: &WeylPoly, g: &GroebnerBasis) -> Result<WeylPoly> {
    g.normal_form(p)
}

/// For orders that are not well-orders the division runs on homogenized
/// operators, so it is the remainder after `h = 1` of a remainder with no
/// term divisible by a homogenized leading monomial.
pub fn normal_form_with_budget(p: &WeylPoly, g: &GroebnerBasis, budget: u64) -> Result<WeylPoly> {
    if p.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: p.n() });
    }
    if p.is_zero() {
        return Ok(p.clone());
    }
    let ring = weyl_ring(&g.order);
    let (f, k) = ring.from_rational(p.terms());
    let mut budget = Budget::new(budget);
    let d = if ring.order.is_well_order() {
        let basis: Vec<&Poly> = g.polys.iter().collect();
        engine::reduce(&ring, f, &basis, true, &mut budget)?
    } else {
        let (hom, hb) = g.homogeneous_polys();
        let refs: Vec<&Poly> = hb.iter().collect();
        let mut d = engine::reduce(&hom, ring.homogenize(&f), &refs, true, &mut budget)?;
        d.rem = ring.collect(d.rem.into_iter().map(|t| (t.m.truncated(2 * p.n()), t.c)).collect());
        d
    };
    let factor = (k * d.scale).recip();
    WeylPoly::from_terms(
        p.n(),
        d.rem.into_iter().map(|t| (t.m, Q::from_integer(t.c) * &factor)),
    )
}

/// Terms of maximal `w`-weight, read in the commutative ring `(x, xi)`.
pub fn initial_form(p: &WeylPoly, w: &WeightVector) -> CommPoly {
    let flat = w.to_flat();
    let Some(top) = p.terms().map(|(m, _)| dot(&flat, m)).max() else {
        return CommPoly::zero(2 * p.n());
    };
    CommPoly::from_terms(
        2 * p.n(),
        p.terms().filter(|(m, _)| dot(&flat, m) == top).map(|(m, c)| (m.clone(), c.clone())),
    )
    .expect("same layout")
}

/// `in_W(I)` computed from a Gröbner basis for `W` refined by the default tiebreak.
pub fn initial_ideal(ideal: &WeylIdeal, w: &WeightVector) -> Result<CommIdeal> {
    initial_ideal_for(ideal, &CompositeOrder::weighted(w.clone()))
}

/// `in_W(I)` for the primary weight `W` of `order`.
pub fn initial_ideal_for(ideal: &WeylIdeal, order: &CompositeOrder) -> Result<CommIdeal> {
    if !order.w.is_strictly_admissible() {
        return Err(Error::InadmissibleWeight(format!("{} has some u_i + v_i <= 0", order.w)));
    }
    let g = buchberger(ideal, order)?;
    CommIdeal::new(2 * ideal.n(), g.initial_forms())
}

/// Mutual membership: both bases generate the same left ideal.
pub fn same_ideal(a: &GroebnerBasis, b: &GroebnerBasis) -> Result<bool> {
    for p in &b.elements {
        if !a.contains(p)? {
            return Ok(false);
        }
    }
    for p in &a.elements {
        if !b.contains(p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Equality of two operator lists up to nonzero scalars on each element.
pub fn equal_up_to_scalar(a: &[WeylPoly], b: &[WeylPoly]) -> bool {
    let norm = |v: &[WeylPoly]| {
        let mut out: Vec<String> = v.iter().map(|p| p.normalized().to_string()).collect();
        out.sort();
        out
    };
    a.len() == b.len() && norm(a) == norm(b)
}

/// Scalar used when comparing a computed operator to a printed one.
pub fn proportionality(a: &WeylPoly, b: &WeylPoly) -> Option<Q> {
    let (m, ca) = a.terms().next()?;
    let cb = b.coeff(m);
    if cb.is_zero() {
        return None;
    }
    let k = ca / &cb;
    (a == &b.scale(&k)).then_some(k)
}
