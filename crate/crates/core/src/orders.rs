//! Weight vectors, `pF + qV` filtrations and the composite orders `<_{W,W'}`.
//!
//! Exponent vectors are laid out as `(x1..xn, d1..dn)`; a weight vector
//! `(u, v)` assigns `u . alpha + v . beta` to `x^alpha d^beta`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weyl::Monomial;

/// An admissible weight `(u, v)` on the Weyl algebra: `u_i + v_i >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightVector {
    u: Vec<i64>,
    v: Vec<i64>,
}

impl WeightVector {
    pub fn new(u: Vec<i64>, v: Vec<i64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
        }
        if let Some(i) = (0..u.len()).find(|&i| u[i] + v[i] < 0) {
            return Err(Error::InadmissibleWeight(format!(
                "u{0} + v{0} = {1} < 0",
                i + 1,
                u[i] + v[i]
            )));
        }
        Ok(WeightVector { u, v })
    }

    /// Splits a flat `(u1..un, v1..vn)` list.
    pub fn from_flat(w: &[i64]) -> Result<Self> {
        if !w.len().is_multiple_of(2) || w.is_empty() {
            return Err(Error::InvalidInput(format!(
                "weight needs 2n entries, got {}",
                w.len()
            )));
        }
        let n = w.len() / 2;
        Self::new(w[..n].to_vec(), w[n..].to_vec())
    }

    /// The order filtration `F = (0,..,0,1,..,1)`.
    pub fn f(n: usize) -> Self {
        WeightVector { u: vec![0; n], v: vec![1; n] }
    }

    /// The Malgrange-Kashiwara filtration along `x_{i0} = 0` (`i0` is 1-based).
    pub fn v_filtration(n: usize, i0: usize) -> Self {
        let mut u = vec![0; n];
        let mut v = vec![0; n];
        u[i0 - 1] = -1;
        v[i0 - 1] = 1;
        WeightVector { u, v }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[i64] {
        &self.u
    }

    pub fn v(&self) -> &[i64] {
        &self.v
    }

    /// `(u, v)` as one flat vector of length `2n`.
    pub fn to_flat(&self) -> Vec<i64> {
        self.u.iter().chain(self.v.iter()).copied().collect()
    }

    /// True when every `u_i + v_i > 0`, so that `gr^W` is commutative.
    pub fn is_strictly_admissible(&self) -> bool {
        self.u.iter().zip(&self.v).all(|(a, b)| a + b > 0)
    }

    pub fn weight_of(&self, m: &Monomial) -> Result<i64> {
        if m.len() != 2 * self.n() {
            return Err(Error::DimensionMismatch { expected: 2 * self.n(), found: m.len() });
        }
        Ok(dot(&self.to_flat(), m))
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_flat().iter().map(|w| w.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for WeightVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let w = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidInput(format!("bad weight entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_flat(&w)
    }
}

pub(crate) fn dot(w: &[i64], m: &Monomial) -> i64 {
    w.iter().zip(m.iter()).map(|(a, &e)| a * i64::from(e)).sum()
}

/// The filtration `L = pF + qV` along `x_{i0} = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LFiltration {
    pub p: u64,
    pub q: u64,
    /// 1-based distinguished index.
    pub i0: usize,
}

impl LFiltration {
    pub fn new(p: u64, q: u64, i0: usize) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::InadmissibleWeight("p and q are both zero".into()));
        }
        if i0 == 0 {
            return Err(Error::InvalidInput("distinguished index is 1-based".into()));
        }
        Ok(LFiltration { p, q, i0 })
    }

    pub fn weight(&self, n: usize) -> WeightVector {
        let (p, q) = (self.p as i64, self.q as i64);
        let mut u = vec![0; n];
        let mut v = vec![p; n];
        u[self.i0 - 1] = -q;
        v[self.i0 - 1] = p + q;
        WeightVector { u, v }
    }

    /// `p |beta| + q (beta_{i0} - alpha_{i0})`.
    pub fn order_of(&self, m: &Monomial, n: usize) -> i64 {
        let beta: i64 = (0..n).map(|i| i64::from(m[n + i])).sum();
        let k = self.i0 - 1;
        self.p as i64 * beta + self.q as i64 * (i64::from(m[n + k]) - i64::from(m[k]))
    }
}

/// Term orders used to break ties after the weights.
///
/// `rank` lists variable indices from most to least significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermOrder {
    Grevlex { rank: Vec<usize> },
    Lex { rank: Vec<usize> },
}

impl TermOrder {
    /// Graded reverse lexicographic with `d1 > ... > dn > x1 > ... > xn`.
    pub fn weyl_default(n: usize) -> Self {
        TermOrder::Grevlex { rank: (n..2 * n).chain(0..n).collect() }
    }

    /// Graded reverse lexicographic with variable 0 most significant.
    pub fn grevlex(nvars: usize) -> Self {
        TermOrder::Grevlex { rank: (0..nvars).collect() }
    }

    pub fn grevlex_ranked(rank: Vec<usize>) -> Result<Self> {
        check_rank(&rank)?;
        Ok(TermOrder::Grevlex { rank })
    }

    pub fn lex_ranked(rank: Vec<usize>) -> Result<Self> {
        check_rank(&rank)?;
        Ok(TermOrder::Lex { rank })
    }

    pub fn nvars(&self) -> usize {
        match self {
            TermOrder::Grevlex { rank } | TermOrder::Lex { rank } => rank.len(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TermOrder::Grevlex { .. } => "grevlex",
            TermOrder::Lex { .. } => "lex",
        }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.cmp_exps(a, b)
    }

    pub(crate) fn cmp_exps(&self, a: &[u16], b: &[u16]) -> Ordering {
        match self {
            TermOrder::Grevlex { rank } => {
                let da: u32 = a.iter().map(|&e| u32::from(e)).sum();
                let db: u32 = b.iter().map(|&e| u32::from(e)).sum();
                da.cmp(&db).then_with(|| {
                    for &var in rank.iter().rev() {
                        if a[var] != b[var] {
                            return b[var].cmp(&a[var]);
                        }
                    }
                    Ordering::Equal
                })
            }
            TermOrder::Lex { rank } => {
                for &var in rank {
                    if a[var] != b[var] {
                        return a[var].cmp(&b[var]);
                    }
                }
                Ordering::Equal
            }
        }
    }
}

fn check_rank(rank: &[usize]) -> Result<()> {
    let mut seen = vec![false; rank.len()];
    for &r in rank {
        if r >= rank.len() || seen[r] {
            return Err(Error::InvalidInput(format!("{rank:?} is not a permutation")));
        }
        seen[r] = true;
    }
    Ok(())
}

/// `<_{W,W'}`: compare by `W`, then by `W'`, then by the tiebreak.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeOrder {
    pub w: WeightVector,
    pub w2: Option<WeightVector>,
    pub tiebreak: TermOrder,
}

impl CompositeOrder {
    pub fn new(w: WeightVector, w2: Option<WeightVector>, tiebreak: TermOrder) -> Result<Self> {
        let n = w.n();
        if let Some(w2) = &w2 {
            if w2.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: w2.n() });
            }
        }
        if tiebreak.nvars() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, found: tiebreak.nvars() });
        }
        Ok(CompositeOrder { w, w2, tiebreak })
    }

    /// `<_{W}` refined by the default tiebreak.
    pub fn weighted(w: WeightVector) -> Self {
        let n = w.n();
        CompositeOrder { w, w2: None, tiebreak: TermOrder::weyl_default(n) }
    }

    /// `<_{L,V}` for `L = pF + qV` along `x_{i0} = 0`.
    pub fn l_v(l: &LFiltration, n: usize) -> Self {
        CompositeOrder {
            w: l.weight(n),
            w2: Some(WeightVector::v_filtration(n, l.i0)),
            tiebreak: TermOrder::weyl_default(n),
        }
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Result<Ordering> {
        for m in [a, b] {
            if m.len() != 2 * self.n() {
                return Err(Error::DimensionMismatch { expected: 2 * self.n(), found: m.len() });
            }
        }
        Ok(self.monomial_order().cmp(a, b))
    }

    pub(crate) fn monomial_order(&self) -> MonomialOrder {
        let mut weights = vec![self.w.to_flat()];
        if let Some(w2) = &self.w2 {
            weights.push(w2.to_flat());
        }
        MonomialOrder { weights, tie: self.tiebreak.clone(), h_index: None }
    }
}

/// Flattened order used by the engines: a list of weight rows, then a term order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct MonomialOrder {
    pub(crate) weights: Vec<Vec<i64>>,
    pub(crate) tie: TermOrder,
    /// Set for the homogenized Weyl algebra: the index of `h`, which carries
    /// no weight and is only looked at after everything else.
    pub(crate) h_index: Option<usize>,
}

impl MonomialOrder {
    pub(crate) fn term(tie: TermOrder) -> Self {
        MonomialOrder { weights: Vec::new(), tie, h_index: None }
    }

    pub(crate) fn nvars(&self) -> usize {
        self.tie.nvars() + usize::from(self.h_index.is_some())
    }

    pub(crate) fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        for w in &self.weights {
            match dot(w, a).cmp(&dot(w, b)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        match self.h_index {
            None => self.tie.cmp(a, b),
            Some(k) => self.tie.cmp_exps(&a[..k], &b[..k]).then_with(|| a[k].cmp(&b[k])),
        }
    }

    /// Same order on a ring with `extra` trailing variables, which are made
    /// the most significant variables of the tiebreak and get weight 0.
    pub(crate) fn extended(&self, extra: usize) -> Self {
        let nv = self.nvars();
        let weights = self
            .weights
            .iter()
            .map(|w| w.iter().copied().chain(std::iter::repeat_n(0, extra)).collect())
            .collect();
        let tie = match &self.tie {
            TermOrder::Grevlex { rank } => TermOrder::Grevlex {
                rank: (nv..nv + extra).chain(rank.iter().copied()).collect(),
            },
            TermOrder::Lex { rank } => TermOrder::Lex {
                rank: (nv..nv + extra).chain(rank.iter().copied()).collect(),
            },
        };
        MonomialOrder { weights, tie, h_index: None }
    }

    /// Weights and tiebreak are nonnegative-graded, so there are no infinite
    /// descending chains.
    pub(crate) fn is_well_order(&self) -> bool {
        self.h_index.is_none() && self.weights.iter().all(|w| w.iter().all(|&e| e >= 0))
    }

    /// The order on `x^a d^b h^c` that ignores `c` except as a final tiebreak.
    /// On homogeneous elements it agrees with `self` after setting `h = 1`.
    pub(crate) fn homogenized(&self) -> Self {
        MonomialOrder { weights: self.weights.clone(), tie: self.tie.clone(), h_index: Some(self.tie.nvars()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(e: &[u16]) -> Monomial {
        Monomial::from_slice(e)
    }

    #[test]
    fn weight_examples() {
        let w: WeightVector = "0,-2,1,3".parse().unwrap();
        // x2 d2
        assert_eq!(w.weight_of(&mono(&[0, 1, 0, 1])).unwrap(), 1);
        assert_eq!(WeightVector::f(2).weight_of(&mono(&[1, 0, 1, 0])).unwrap(), 1);
        assert_eq!(WeightVector::v_filtration(2, 2).weight_of(&mono(&[0, 1, 0, 1])).unwrap(), 0);
        assert!(w.weight_of(&mono(&[0, 1])).is_err());
    }

    #[test]
    fn l_filtration_matches_flat_weight() {
        let l = LFiltration::new(1, 2, 2).unwrap();
        assert_eq!(l.weight(2).to_flat(), vec![0, -2, 1, 3]);
        let m = mono(&[3, 2, 1, 4]);
        assert_eq!(l.order_of(&m, 2), l.weight(2).weight_of(&m).unwrap());
        assert!(LFiltration::new(0, 0, 1).is_err());
        // u_i + v_i = p for every i
        let w = LFiltration::new(3, 5, 1).unwrap().weight(3);
        assert!(w.u().iter().zip(w.v()).all(|(a, b)| a + b == 3));
    }

    #[test]
    fn inadmissible_weight_rejected() {
        assert!(WeightVector::new(vec![-2, 0], vec![1, 0]).is_err());
        assert!("1,2,3".parse::<WeightVector>().is_err());
    }

    #[test]
    fn compare_examples() {
        let fv = CompositeOrder::new(
            WeightVector::f(2),
            Some(WeightVector::v_filtration(2, 2)),
            TermOrder::weyl_default(2),
        )
        .unwrap();
        // d1^3 > d2 by F-weight
        assert_eq!(fv.compare(&mono(&[0, 0, 3, 0]), &mono(&[0, 0, 0, 1])).unwrap(), Ordering::Greater);

        let l = CompositeOrder::weighted("0,-2,1,3".parse().unwrap());
        // x2 d1^2 (weight 0) < d1^2 (weight 2)
        assert_eq!(l.compare(&mono(&[0, 1, 2, 0]), &mono(&[0, 0, 2, 0])).unwrap(), Ordering::Less);
        // x2 d1^2 d2 (weight 3) > d1^2
        assert_eq!(l.compare(&mono(&[0, 1, 2, 1]), &mono(&[0, 0, 2, 0])).unwrap(), Ordering::Greater);

        // equal weights: the tiebreak decides, x1 d2 > x2 d1
        let zero = CompositeOrder::weighted(WeightVector::new(vec![0, 0], vec![0, 0]).unwrap());
        assert_eq!(zero.compare(&mono(&[1, 0, 0, 1]), &mono(&[0, 1, 1, 0])).unwrap(), Ordering::Greater);
        // and x1 d1 > x2 d2, the convention behind the printed bases
        assert_eq!(zero.compare(&mono(&[1, 0, 1, 0]), &mono(&[0, 1, 0, 1])).unwrap(), Ordering::Greater);
    }

    #[test]
    fn rank_must_be_permutation() {
        assert!(TermOrder::grevlex_ranked(vec![0, 0, 1]).is_err());
        assert!(TermOrder::lex_ranked(vec![2, 0, 1]).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn exps(len: usize) -> impl Strategy<Value = Vec<u16>> {
            proptest::collection::vec(0u16..4, len)
        }

        proptest! {
            #[test]
            fn composite_order_is_total_and_refines_weight(
                a in exps(4), b in exps(4), s in exps(4),
                p in 1u64..4, q in 0u64..4,
            ) {
                let l = LFiltration::new(p, q, 2).unwrap();
                let o = CompositeOrder::l_v(&l, 2);
                let (ma, mb, ms) = (mono(&a), mono(&b), mono(&s));
                let ab = o.compare(&ma, &mb).unwrap();
                prop_assert_eq!(ab, o.compare(&mb, &ma).unwrap().reverse());
                if ab == Ordering::Equal {
                    prop_assert_eq!(&a, &b);
                }
                let (wa, wb) = (o.w.weight_of(&ma).unwrap(), o.w.weight_of(&mb).unwrap());
                if wa < wb {
                    prop_assert_eq!(ab, Ordering::Less);
                }
                // multiplicative on exponent vectors
                let sa = ma.mul(&ms);
                let sb = mb.mul(&ms);
                prop_assert_eq!(o.compare(&sa, &sb).unwrap(), ab);
            }
        }
    }
}
