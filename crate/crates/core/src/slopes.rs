//! Algebraic and geometric slopes along `x_{i0} = 0` by walking the
//! `pF + qV` weights suggested by Newton polygons.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::comm::{is_radical_w_homogeneous_counted, is_w_homogeneous_counted, CommIdeal};
use crate::engine::{Budget, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::groebner::{buchberger_counted, GroebnerBasis, WeylIdeal};
use crate::microchar::PreprocessTrace;
use crate::newton::next_candidate;
use crate::orders::{CompositeOrder, LFiltration, TermOrder, WeightVector};
use crate::Q;

/// Knobs shared by the slope computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Options {
    /// Reduction steps allowed per Gröbner basis computation.
    pub budget: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { budget: DEFAULT_BUDGET }
    }
}

/// One pass of the loop at weight `L = pF + qV`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub p: u64,
    pub q: u64,
    /// `L` as a flat vector `(u, v)`.
    pub weight: Vec<i64>,
    pub basis_size: usize,
    /// The slope `-p/q` whose weight this is; absent for the starting `F`.
    #[serde(serialize_with = "crate::ser::opt_q")]
    pub slope: Option<Q>,
    /// `in_L(I)` fails to be `F`-homogeneous (equivalently `V`-homogeneous).
    pub algebraic: Option<bool>,
    /// The radical of `in_L(I)` fails to be `F`-homogeneous.
    pub geometric: Option<bool>,
    /// Next candidate read off the Newton polygons of the basis.
    #[serde(serialize_with = "crate::ser::opt_q")]
    pub next: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlopeReport {
    /// Distinguished variable index, 1-based.
    #[serde(serialize_with = "ser_along")]
    pub along: usize,
    pub n: usize,
    #[serde(serialize_with = "crate::ser::q_vec")]
    pub algebraic_slopes: Vec<Q>,
    #[serde(serialize_with = "crate::ser::q_vec")]
    pub geometric_slopes: Vec<Q>,
    pub regular: bool,
    pub complete: bool,
    pub tiebreak: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub trace: Vec<TraceEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preprocessing: Option<PreprocessTrace>,
}

fn ser_along<S: serde::Serializer>(i: &usize, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("x{i}"))
}

impl SlopeReport {
    /// `|r| = p/q` for each geometric slope `r`.
    pub fn magnitudes(&self) -> Vec<Q> {
        self.geometric_slopes.iter().map(|r| r.abs()).collect()
    }
}

impl fmt::Display for SlopeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Q]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        writeln!(f, "along x{}", self.along)?;
        writeln!(f, "algebraic slopes: {{{}}}", list(&self.algebraic_slopes))?;
        writeln!(f, "geometric slopes: {{{}}}", list(&self.geometric_slopes))?;
        if !self.complete {
            writeln!(f, "incomplete: {}", self.failure.as_deref().unwrap_or("unknown"))?;
        }
        Ok(())
    }
}

fn f_weight(n: usize) -> Vec<i64> {
    WeightVector::f(n).to_flat()
}

/// `<_{L,V}` Gröbner basis of `I` for `L = pF + qV`.
pub(crate) fn basis_at(ideal: &WeylIdeal, p: u64, q: u64, i0: usize, budget: &mut Budget) -> Result<GroebnerBasis> {
    let l = LFiltration::new(p, q, i0)?;
    buchberger_counted(ideal, &CompositeOrder::l_v(&l, ideal.n()), budget)
}

/// `in_{pF+qV}(I)` in the phase-space ring `(x, xi)`.
pub fn sigma_l(ideal: &WeylIdeal, p: u64, q: u64, i0: usize) -> Result<CommIdeal> {
    if p == 0 {
        return Err(Error::InadmissibleWeight("p must be positive".into()));
    }
    check_index(ideal, i0)?;
    let g = basis_at(ideal, p, q, i0, &mut Budget::new(DEFAULT_BUDGET))?;
    CommIdeal::new(2 * ideal.n(), g.initial_forms())
}

fn check_index(ideal: &WeylIdeal, i0: usize) -> Result<()> {
    if i0 == 0 || i0 > ideal.n() {
        return Err(Error::InvalidInput(format!("variable index {i0} outside 1..={}", ideal.n())));
    }
    Ok(())
}

pub fn acg_slopes(ideal: &WeylIdeal, i0: usize) -> Result<SlopeReport> {
    acg_slopes_with(ideal, i0, &Options::default())
}

/// Runs the loop; a budget overrun yields a report with `complete = false`.
pub fn acg_slopes_with(ideal: &WeylIdeal, i0: usize, opts: &Options) -> Result<SlopeReport> {
    check_index(ideal, i0)?;
    if ideal.is_empty() {
        return Err(Error::InvalidInput("the zero ideal has no slopes to compute".into()));
    }
    let n = ideal.n();
    let fw = f_weight(n);
    let mut report = SlopeReport {
        along: i0,
        n,
        algebraic_slopes: Vec::new(),
        geometric_slopes: Vec::new(),
        regular: true,
        complete: true,
        tiebreak: TermOrder::weyl_default(n).name().to_string(),
        failure: None,
        trace: Vec::new(),
        preprocessing: None,
    };
    let (mut p, mut q) = (1u64, 0u64);
    let mut prev: Option<Q> = None;
    let outcome: Result<()> = (|| loop {
        let g = basis_at(ideal, p, q, i0, &mut Budget::new(opts.budget))?;
        let mut entry = TraceEntry {
            p,
            q,
            weight: LFiltration::new(p, q, i0)?.weight(n).to_flat(),
            basis_size: g.len(),
            slope: prev.clone(),
            algebraic: None,
            geometric: None,
            next: None,
        };
        if let Some(slope) = &prev {
            let j = CommIdeal::new(2 * n, g.initial_forms())?;
            let mut budget = Budget::new(opts.budget);
            let algebraic = !is_w_homogeneous_counted(&j, &fw, &mut budget)?;
            // a graded ideal has a graded radical
            let geometric = algebraic && !is_radical_w_homogeneous_counted(&j, &fw, &mut budget)?;
            entry.algebraic = Some(algebraic);
            entry.geometric = Some(geometric);
            if algebraic {
                report.algebraic_slopes.push(slope.clone());
            }
            if geometric {
                report.geometric_slopes.push(slope.clone());
            }
        }
        let next = next_candidate(&g.elements, prev.as_ref(), i0)?;
        entry.next = Some(next.clone());
        report.trace.push(entry);
        if next.is_zero() {
            return Ok(());
        }
        let mag = next.abs();
        p = u64::try_from(mag.numer()).map_err(|_| Error::InvalidInput("slope numerator overflow".into()))?;
        q = u64::try_from(mag.denom()).map_err(|_| Error::InvalidInput("slope denominator overflow".into()))?;
        prev = Some(next);
    })();
    match outcome {
        Ok(()) => {}
        Err(Error::BudgetExceeded(k)) => {
            report.complete = false;
            report.failure = Some(Error::BudgetExceeded(k).to_string());
        }
        Err(e) => return Err(e),
    }
    report.regular = report.geometric_slopes.is_empty();
    Ok(report)
}
