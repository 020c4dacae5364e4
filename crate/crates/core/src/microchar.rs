//! Ranges of `pF + qV` weights for which a hyperplane `x_i = 0` is
//! non-micro-characteristic, and slope computation after reducing variables
//! through such hyperplanes.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::comm::{radical_membership_counted, CommIdeal, CommPoly};
use crate::engine::Budget;
use crate::error::{Error, Result};
use crate::gkz::GkzSystem;
use crate::groebner::{buchberger_counted, WeylIdeal};
use crate::newton::next_candidate;
use crate::orders::{CompositeOrder, WeightVector};
use crate::slopes::{acg_slopes_with, basis_at, Options, SlopeReport};
use crate::weyl::{Monomial, WeylPoly};
use crate::Q;

/// Largest doubling exponent tried when looking for a stable perturbation.
const MAX_EPS_STEPS: u32 = 12;

/// One membership test at one weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipCheck {
    /// Flat weight `(u, v)` whose initial ideal was used.
    pub weight: Vec<i64>,
    /// `eps = 1/2^k` when this is a perturbed weight.
    pub eps_exponent: Option<u32>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonMcRange {
    /// Hyperplane `x_i = 0`, 1-based.
    pub i: usize,
    /// Start of the range, `None` for minus infinity.
    #[serde(serialize_with = "crate::ser::opt_q")]
    pub r0: Option<Q>,
    /// End of the range, `None` for minus infinity (empty range).
    #[serde(serialize_with = "crate::ser::opt_q")]
    pub r1: Option<Q>,
    pub checks: Vec<MembershipCheck>,
}

impl NonMcRange {
    /// The range covers every `r < 0`.
    pub fn is_everywhere(&self) -> bool {
        self.r0.is_none() && self.r1.as_ref().is_some_and(|r| r.is_zero())
    }
}

/// `xi_i` lies in the radical of `J + <x_i, xi_j (j != i)>`.
pub(crate) fn non_mc_test(j: &CommIdeal, n: usize, i: usize, budget: &mut Budget) -> Result<bool> {
    let mut extra = vec![CommPoly::x(n, i), CommPoly::xi(n, n)];
    for k in 1..n {
        if k != i {
            extra.push(CommPoly::xi(n, k));
        }
    }
    let aug = j.with(extra)?;
    radical_membership_counted(&CommPoly::xi(n, i), &aug, None, budget)
}

fn weight_of(n: usize, p: &BigInt, q: &BigInt) -> Result<WeightVector> {
    let p = i64::try_from(p).map_err(|_| Error::InvalidInput("weight overflow".into()))?;
    let q = i64::try_from(q).map_err(|_| Error::InvalidInput("weight overflow".into()))?;
    let mut u = vec![0; n];
    let mut v = vec![p; n];
    u[n - 1] = -q;
    v[n - 1] = p + q;
    WeightVector::new(u, v)
}

fn initial_at(ideal: &WeylIdeal, w: &WeightVector, budget: &mut Budget) -> Result<CommIdeal> {
    let n = ideal.n();
    let order = CompositeOrder::new(w.clone(), Some(WeightVector::v_filtration(n, n)), crate::orders::TermOrder::weyl_default(n))?;
    let g = buchberger_counted(ideal, &order, budget)?;
    CommIdeal::new(2 * n, g.initial_forms())
}

/// The test at `pF + (q + eps)V`, halving `eps = 1/2^k` until two consecutive
/// initial ideals agree.
pub fn eps_perturbation_check(h: &WeylIdeal, p: u64, q: u64, i: usize) -> Result<MembershipCheck> {
    eps_check_counted(h, p, q, i, &Options::default())
}

fn eps_check_counted(h: &WeylIdeal, p: u64, q: u64, i: usize, opts: &Options) -> Result<MembershipCheck> {
    let n = h.n();
    check(h, i)?;
    if p == 0 {
        return Err(Error::InadmissibleWeight("p must be positive".into()));
    }
    let at = |k: u32| -> Result<(WeightVector, CommIdeal)> {
        let scale = BigInt::from(1u64) << k;
        let w = weight_of(n, &(&scale * p), &(&scale * q + 1))?;
        let j = initial_at(h, &w, &mut Budget::new(opts.budget))?;
        Ok((w, j))
    };
    let (mut w, mut j) = at(1)?;
    for k in 2..=MAX_EPS_STEPS {
        let (w2, j2) = at(k)?;
        if j.equals(&j2)? {
            let holds = non_mc_test(&j, n, i, &mut Budget::new(opts.budget))?;
            return Ok(MembershipCheck { weight: w.to_flat(), eps_exponent: Some(k - 1), holds });
        }
        w = w2;
        j = j2;
    }
    // never stabilised: report a failed check
    Ok(MembershipCheck { weight: w.to_flat(), eps_exponent: None, holds: false })
}

fn check(h: &WeylIdeal, i: usize) -> Result<()> {
    let n = h.n();
    if i == 0 || i >= n {
        return Err(Error::InvalidInput(format!("hyperplane index {i} outside 1..{n}")));
    }
    Ok(())
}

/// Walks candidate weights from `r0` (`None` = minus infinity) and returns
/// the first one where the membership test fails, or 0.
pub fn range_of_nonmc(h: &WeylIdeal, i: usize, r0: Option<&Q>) -> Result<NonMcRange> {
    range_of_nonmc_with(h, i, r0, &Options::default())
}

pub fn range_of_nonmc_with(h: &WeylIdeal, i: usize, r0: Option<&Q>, opts: &Options) -> Result<NonMcRange> {
    check(h, i)?;
    if let Some(r) = r0 {
        if !r.is_negative() {
            return Err(Error::InvalidInput(format!("r0 = {r} must be negative")));
        }
    }
    let n = h.n();
    let mut out = NonMcRange { i, r0: r0.cloned(), r1: None, checks: Vec::new() };
    let mut slope: Option<Q> = r0.cloned();
    loop {
        let (p, q) = match &slope {
            None => (1u64, 0u64),
            Some(s) => {
                let m = s.abs();
                (
                    u64::try_from(m.numer()).map_err(|_| Error::InvalidInput("overflow".into()))?,
                    u64::try_from(m.denom()).map_err(|_| Error::InvalidInput("overflow".into()))?,
                )
            }
        };
        let g = basis_at(h, p, q, n, &mut Budget::new(opts.budget))?;
        let j = CommIdeal::new(2 * n, g.initial_forms())?;
        let holds = non_mc_test(&j, n, i, &mut Budget::new(opts.budget))?;
        out.checks.push(MembershipCheck { weight: g.order.w.to_flat(), eps_exponent: None, holds });
        if !holds {
            out.r1 = slope.clone();
            return Ok(out);
        }
        let perturbed = eps_check_counted(h, p, q, i, opts)?;
        let ok = perturbed.holds;
        out.checks.push(perturbed);
        if !ok {
            out.r1 = slope.clone();
            return Ok(out);
        }
        let next = next_candidate(&g.elements, slope.as_ref(), n)?;
        if next.is_zero() {
            out.r1 = Some(Q::zero());
            return Ok(out);
        }
        slope = Some(next);
    }
}

/// One attempted variable reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    /// The system before the step.
    pub system: GkzSystem,
    /// Hyperplane `x_i = 0` tried, 1-based.
    pub i: usize,
    /// Generators used for the range computation.
    pub subset: Vec<String>,
    pub range: NonMcRange,
    pub reduced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreprocessTrace {
    pub gkz_detected: bool,
    pub steps: Vec<ReductionStep>,
    /// The system handed to the slope loop, when reductions were possible.
    pub final_system: Option<GkzSystem>,
    pub note: String,
}

fn d_pow(n: usize, i: usize, e: u32) -> WeylPoly {
    WeylPoly::term(n, Monomial::var(2 * n, n + i - 1, e as u16), Q::from_integer(1.into()))
}

/// `d_i^{a_j} - d_j^{a_i}` for `i < j <= n - 1`.
fn subset_for(sys: &GkzSystem, i: usize) -> Vec<WeylPoly> {
    let n = sys.n();
    let a = sys.a();
    (i + 1..n).map(|j| &d_pow(n, i, a[j - 1]) - &d_pow(n, j, a[i - 1])).collect()
}

/// Reduces variables `x_2, ..., x_{n-2}` of a GKZ system whenever the range
/// check certifies every weight, then runs the slope loop on what remains.
/// Other ideals go straight to the slope loop.
pub fn slopes_with_preprocessing(ideal: &WeylIdeal, i0: usize) -> Result<SlopeReport> {
    slopes_with_preprocessing_with(ideal, i0, &Options::default())
}

pub fn slopes_with_preprocessing_with(ideal: &WeylIdeal, i0: usize, opts: &Options) -> Result<SlopeReport> {
    let detected = if i0 == ideal.n() { GkzSystem::detect(ideal) } else { None };
    let Some(mut sys) = detected else {
        let mut r = acg_slopes_with(ideal, i0, opts)?;
        r.preprocessing = Some(PreprocessTrace {
            gkz_detected: false,
            steps: Vec::new(),
            final_system: None,
            note: "no GKZ structure along the last variable; plain slope loop".into(),
        });
        return Ok(r);
    };
    let mut steps = Vec::new();
    'outer: loop {
        let n = sys.n();
        if n < 4 {
            break;
        }
        for i in 2..=n - 2 {
            let subset = subset_for(&sys, i);
            let h = WeylIdeal::new(n, subset.clone())?;
            let range = range_of_nonmc_with(&h, i, None, opts)?;
            let reduced = range.is_everywhere() && range.checks.iter().all(|c| c.holds);
            steps.push(ReductionStep {
                system: sys.clone(),
                i,
                subset: subset.iter().map(|p| p.to_string()).collect(),
                range,
                reduced,
            });
            if reduced {
                sys = sys.restrict(i)?;
                continue 'outer;
            }
        }
        break;
    }
    let any = steps.iter().any(|s| s.reduced);
    let target = if any { sys.ideal() } else { ideal.clone() };
    let mut r = acg_slopes_with(&target, target.n(), opts)?;
    r.along = i0;
    r.preprocessing = Some(PreprocessTrace {
        gkz_detected: true,
        final_system: any.then(|| sys.clone()),
        note: if any {
            format!("reduced to {sys}; slopes of the reduced system along its last variable")
        } else {
            "no variable could be reduced; plain slope loop".into()
        },
        steps,
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, qi};

    fn ideal(src: &str, n: usize) -> WeylIdeal {
        WeylIdeal::parse(src, n).unwrap()
    }

    #[test]
    fn never_micro_characteristic_in_three_variables() {
        let r = range_of_nonmc(&ideal("Dx1^2-Dx2", 3), 1, None).unwrap();
        assert!(r.is_everywhere(), "{r:?}");
        assert!(r.checks.iter().all(|c| c.holds));
    }

    #[test]
    fn two_variables_stop_at_minus_one() {
        // with n = 2, d2 is the distinguished derivative and wins for r > -1
        let r = range_of_nonmc(&ideal("Dx1^2-Dx2", 2), 1, None).unwrap();
        assert_eq!(r.r1, Some(q(-1, 1)));
    }

    #[test]
    fn perturbation_of_a_single_generator() {
        let c = eps_perturbation_check(&ideal("Dx1^2-Dx2", 3), 1, 1, 1).unwrap();
        assert!(c.holds);
        assert_eq!(c.eps_exponent, Some(1));
    }

    #[test]
    fn invalid_arguments() {
        let h = ideal("Dx1^2-Dx2", 3);
        assert!(range_of_nonmc(&h, 3, None).is_err());
        assert!(range_of_nonmc(&h, 0, None).is_err());
        assert!(range_of_nonmc(&h, 1, Some(&qi(0))).is_err());
    }

    #[test]
    fn prop_pattern_returns_zero() {
        let sys = GkzSystem::new(vec![1, 3, 7, 11], qi(-5)).unwrap();
        let h = WeylIdeal::new(4, subset_for(&sys, 2)).unwrap();
        let r = range_of_nonmc(&h, 2, None).unwrap();
        assert!(r.is_everywhere());
    }

    #[test]
    fn non_gkz_input_falls_back() {
        let r = slopes_with_preprocessing(&ideal("x1^2*Dx1+1", 1), 1).unwrap();
        assert_eq!(r.geometric_slopes, vec![q(-1, 1)]);
        assert!(!r.preprocessing.unwrap().gkz_detected);
    }
}
