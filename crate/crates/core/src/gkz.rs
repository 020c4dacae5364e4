//! GKZ systems `H_A(beta)` of monomial curves `A = (1, a2, ..., an)`.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::comm::{comm_buchberger, radical_membership, CommIdeal, CommPoly};
use crate::error::{Error, Result};
use crate::groebner::{initial_ideal, WeylIdeal};
use crate::orders::{TermOrder, WeightVector};
use crate::weyl::{Monomial, WeylPoly};
use crate::{qi, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GkzSystem {
    a: Vec<u32>,
    #[serde(serialize_with = "crate::ser::q")]
    beta: Q,
}

impl GkzSystem {
    /// `a` must start with 1 and increase strictly.
    pub fn new(a: Vec<u32>, beta: Q) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidGkz("A is empty".into()));
        }
        if a[0] != 1 {
            return Err(Error::InvalidGkz(format!("A must start with 1, got {}", a[0])));
        }
        if a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGkz(format!("A must be strictly increasing: {a:?}")));
        }
        if *a.last().unwrap() > u16::MAX as u32 {
            return Err(Error::InvalidGkz("entries of A are too large".into()));
        }
        Ok(GkzSystem { a, beta })
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn beta(&self) -> &Q {
        &self.beta
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `d_j - d_1^{a_j}`, `j = 2..n`.
    pub fn toric_ideal(&self) -> WeylIdeal {
        let n = self.n();
        let gens = (2..=n).map(|j| &WeylPoly::d(n, j) - &d_pow(n, 1, self.a[j - 1])).collect();
        WeylIdeal::new(n, gens).expect("same n")
    }

    /// The pairwise binomials `d_i^{a_j} - d_j^{a_i}` together with the
    /// reduced graded reverse lexicographic basis of the toric ideal.
    pub fn toric_binomials(&self) -> Vec<WeylPoly> {
        let n = self.n();
        let mut out: Vec<WeylPoly> = Vec::new();
        let mut push = |p: WeylPoly| {
            let p = p.normalized();
            if !p.is_zero() && !out.contains(&p) {
                out.push(p);
            }
        };
        for i in 1..=n {
            for j in i + 1..=n {
                push(&d_pow(n, i, self.a[j - 1]) - &d_pow(n, j, self.a[i - 1]));
            }
        }
        let gens: Vec<CommPoly> = self.toric_ideal().generators().iter().map(to_d_ring).collect();
        if !gens.is_empty() {
            let j = CommIdeal::new(n, gens).expect("same ring");
            let gb = comm_buchberger(&j, &TermOrder::grevlex(n)).expect("toric bases are small");
            for g in &gb.elements {
                push(from_d_ring(n, g));
            }
        }
        out
    }

    /// `sum a_i x_i d_i - beta`.
    pub fn euler_operator(&self) -> WeylPoly {
        let n = self.n();
        let mut terms = Vec::new();
        for (i, &ai) in self.a.iter().enumerate() {
            let mut alpha = vec![0u16; n];
            alpha[i] = 1;
            terms.push((Monomial::weyl(&alpha, &alpha), qi(ai as i64)));
        }
        terms.push((Monomial::one(2 * n), -self.beta.clone()));
        WeylPoly::from_terms(n, terms).expect("layout")
    }

    /// Euler operator followed by the toric generators.
    pub fn ideal(&self) -> WeylIdeal {
        let n = self.n();
        let mut gens = vec![self.euler_operator()];
        gens.extend(self.toric_ideal().generators().iter().cloned());
        WeylIdeal::new(n, gens).expect("same n")
    }

    /// Deletes `a_i` (1-based, `i != 1`); `beta` is kept.
    pub fn restrict(&self, i: usize) -> Result<GkzSystem> {
        if i == 1 {
            return Err(Error::InvalidGkz("cannot restrict to x1 = 0".into()));
        }
        if i == 0 || i > self.n() {
            return Err(Error::InvalidGkz(format!("index {i} outside 2..={}", self.n())));
        }
        let mut a = self.a.clone();
        a.remove(i - 1);
        GkzSystem::new(a, self.beta.clone())
    }

    /// `{a_{n-1}/(a_{n-1} - a_n)}` for `n >= 3`, `{1/(1 - a_2)}` for `n = 2`,
    /// empty for `n = 1`.
    pub fn closed_form_slopes(&self) -> Vec<Q> {
        let n = self.n();
        match n {
            1 => Vec::new(),
            2 => vec![Q::new(1.into(), (1 - self.a[1] as i64).into())],
            _ => {
                let (a, b) = (self.a[n - 2] as i64, self.a[n - 1] as i64);
                vec![Q::new(a.into(), (a - b).into())]
            }
        }
    }

    /// The radical of `in_F(H_A(beta))` equals `<xi_1, ..., xi_{n-1}, x_n xi_n>`.
    pub fn characteristic_variety_check(&self) -> Result<bool> {
        let n = self.n();
        let j = initial_ideal(&self.ideal(), &WeightVector::f(n))?;
        let mut target = Vec::new();
        for i in 1..n {
            target.push(CommPoly::xi(n, i));
        }
        target.push(&CommPoly::x(n, n) * &CommPoly::xi(n, n));
        // the target is generated by variables and a squarefree monomial, hence radical
        let t = CommIdeal::new(2 * n, target.clone())?;
        let tb = t.groebner()?;
        for g in j.generators() {
            if !tb.contains(g)? {
                return Ok(false);
            }
        }
        for g in &target {
            if !radical_membership(g, &j)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Recognises `I` as `H_A(beta)`: one Euler operator plus `d`-binomials
    /// generating the toric ideal of `A`.
    pub fn detect(ideal: &WeylIdeal) -> Option<GkzSystem> {
        let n = ideal.n();
        let mut found: Option<GkzSystem> = None;
        let mut binomials = Vec::new();
        for g in ideal.generators() {
            if let Some(sys) = read_euler(g) {
                if found.is_some() {
                    return None;
                }
                found = Some(sys);
            } else {
                binomials.push(g);
            }
        }
        let sys = found?;
        let zero = vec![0u16; n];
        for b in &binomials {
            if b.len() != 2 || b.terms().any(|(m, _)| m[..n] != zero[..]) {
                return None;
            }
            let mut coeffs = b.terms().map(|(_, c)| c.clone());
            let (c1, c2) = (coeffs.next()?, coeffs.next()?);
            if &c1 + &c2 != Q::zero() {
                return None;
            }
            let degs: Vec<u64> = b
                .terms()
                .map(|(m, _)| (0..n).map(|i| sys.a[i] as u64 * m[n + i] as u64).sum())
                .collect();
            if degs[0] != degs[1] {
                return None;
            }
        }
        if n == 1 {
            return binomials.is_empty().then_some(sys);
        }
        let gens: Vec<CommPoly> = binomials.iter().map(|b| to_d_ring(b)).collect();
        let j = CommIdeal::new(n, gens).ok()?;
        let gb = comm_buchberger(&j, &TermOrder::grevlex(n)).ok()?;
        for g in sys.toric_ideal().generators() {
            if !gb.contains(&to_d_ring(g)).ok()? {
                return None;
            }
        }
        Some(sys)
    }
}

impl fmt::Display for GkzSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        write!(f, "H_({})({})", a.join(","), self.beta)
    }
}

fn d_pow(n: usize, i: usize, e: u32) -> WeylPoly {
    let mut beta = vec![0u16; n];
    beta[i - 1] = e as u16;
    WeylPoly::term(n, Monomial::weyl(&vec![0; n], &beta), Q::one())
}

/// A `d`-only operator as a polynomial in `n` commuting variables.
fn to_d_ring(p: &WeylPoly) -> CommPoly {
    let n = p.n();
    CommPoly::from_terms(n, p.terms().map(|(m, c)| (Monomial::from_slice(&m[n..]), c.clone()))).expect("layout")
}

fn from_d_ring(n: usize, f: &CommPoly) -> WeylPoly {
    WeylPoly::from_terms(n, f.terms().map(|(m, c)| (Monomial::weyl(&vec![0; n], m), c.clone()))).expect("layout")
}

/// `c (sum a_i x_i d_i - beta)` with `a_1 = 1` read back as a system.
fn read_euler(p: &WeylPoly) -> Option<GkzSystem> {
    let n = p.n();
    let mut a = vec![Q::zero(); n];
    let mut constant = Q::zero();
    for (m, c) in p.terms() {
        if m.is_one() {
            constant = c.clone();
            continue;
        }
        let i = (0..n).find(|&i| m[i] == 1 && m[n + i] == 1)?;
        if m.degree() != 2 {
            return None;
        }
        a[i] = c.clone();
    }
    if a[0].is_zero() {
        return None;
    }
    let scale = a[0].clone();
    let mut ints = Vec::with_capacity(n);
    for ai in &a {
        let r = ai / &scale;
        if !r.is_integer() || r <= Q::zero() {
            return None;
        }
        ints.push(u32::try_from(r.to_integer()).ok()?);
    }
    GkzSystem::new(ints, -(constant / scale)).ok()
}

pub fn toric_ideal(sys: &GkzSystem) -> WeylIdeal {
    sys.toric_ideal()
}

pub fn euler_operator(sys: &GkzSystem) -> WeylPoly {
    sys.euler_operator()
}

pub fn gkz_ideal(sys: &GkzSystem) -> WeylIdeal {
    sys.ideal()
}

pub fn restrict(sys: &GkzSystem, i: usize) -> Result<GkzSystem> {
    sys.restrict(i)
}

pub fn closed_form_slopes(sys: &GkzSystem) -> Vec<Q> {
    sys.closed_form_slopes()
}

pub fn characteristic_variety_check(sys: &GkzSystem) -> Result<bool> {
    sys.characteristic_variety_check()
}
