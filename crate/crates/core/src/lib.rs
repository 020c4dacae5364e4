//! Slopes of left ideals in the Weyl algebra along a coordinate hyperplane.
//!
//! The crate is organised bottom-up:
//!
//! * [`weyl`]: normally ordered operators with exact rational coefficients,
//!   the operator grammar, and the action of operators on polynomials.
//! * [`orders`]: weight vectors, `pF + qV` filtrations and composite orders.
//! * [`groebner`]: Buchberger's algorithm in the Weyl algebra and initial ideals.
//! * [`comm`]: commutative ideals, radical membership and homogeneity tests.
//! * [`newton`]: Newton polygons with respect to a coordinate hyperplane.
//! * [`slopes`]: the slope-detection loop over `pF + qV` weights.
//! * [`microchar`]: non-micro-characteristic ranges and variable reduction.
//! * [`gkz`]: GKZ systems of monomial curves `A = (1, a2, ..., an)`.
//! * [`solutions`]: polynomial and series solutions, reducibility.

mod engine;
mod ser;
pub mod error;

pub mod comm;
pub mod gkz;
pub mod groebner;
pub mod microchar;
pub mod newton;
pub mod orders;
pub mod slopes;
pub mod solutions;
pub mod weyl;

pub use error::{Error, Result};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Exact rational numbers used for every coefficient.
pub type Q = BigRational;

/// Shorthand for the rational `num/den`.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integral rational.
pub fn qi(num: i64) -> Q {
    Q::from_integer(BigInt::from(num))
}

/// Parses `p` or `p/q` (optional sign) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {text:?}"));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Q::new(num, den))
}

pub use comm::{CommIdeal, CommPoly, StandardPair};
pub use gkz::GkzSystem;
pub use groebner::{GroebnerBasis, WeylIdeal};
pub use newton::NewtonPolygon;
pub use orders::{CompositeOrder, LFiltration, TermOrder, WeightVector};
pub use slopes::SlopeReport;
pub use weyl::{Monomial, WeylPoly};
