//! Newton polygons of operators with respect to a coordinate hyperplane
//! `x_{i0} = 0` and the candidate slopes they produce.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weyl::{Monomial, WeylPoly};
use crate::Q;

/// Staircase boundary of `conv(points) + (-N)^2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    /// Boundary vertices `(f, v)`, `f` strictly increasing, `v` strictly decreasing.
    pub vertices: Vec<(i64, i64)>,
    /// The generating points `(|beta|, beta_i0 - alpha_i0)`, sorted and deduplicated.
    pub points: Vec<(i64, i64)>,
}

/// `(|beta|, beta_i0 - alpha_i0)` for `x^alpha d^beta`; `i0` is 1-based.
pub fn point_of(m: &Monomial, n: usize, i0: usize) -> (i64, i64) {
    let f: i64 = m[n..].iter().map(|&e| e as i64).sum();
    let v = m[n + i0 - 1] as i64 - m[i0 - 1] as i64;
    (f, v)
}

pub fn newton_polygon(p: &WeylPoly, i0: usize) -> Result<NewtonPolygon> {
    if p.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let n = p.n();
    if i0 == 0 || i0 > n {
        return Err(Error::InvalidInput(format!("variable index {i0} outside 1..={n}")));
    }
    let mut points: Vec<(i64, i64)> = p.terms().map(|(m, _)| point_of(m, n, i0)).collect();
    points.sort();
    points.dedup();
    Ok(NewtonPolygon::from_points(points))
}

impl NewtonPolygon {
    /// Hull of a nonempty point set.
    pub fn from_points(mut points: Vec<(i64, i64)>) -> Self {
        points.sort();
        points.dedup();
        let start = *points.iter().max_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0))).expect("nonempty");
        let mut vertices = vec![start];
        let mut cur = start;
        loop {
            // steepest ascent to the right: maximise dv/df, ties to the farthest point
            let mut best: Option<(i64, i64)> = None;
            for &pt in points.iter().filter(|pt| pt.0 > cur.0) {
                best = Some(match best {
                    None => pt,
                    Some(b) => {
                        let lhs = (pt.1 - cur.1) * (b.0 - cur.0);
                        let rhs = (b.1 - cur.1) * (pt.0 - cur.0);
                        match lhs.cmp(&rhs) {
                            Ordering::Greater => pt,
                            Ordering::Equal if pt.0 > b.0 => pt,
                            _ => b,
                        }
                    }
                });
            }
            match best {
                Some(b) => {
                    vertices.push(b);
                    cur = b;
                }
                None => break,
            }
        }
        NewtonPolygon { vertices, points }
    }

    /// Finite edges, left to right.
    pub fn edges(&self) -> Vec<((i64, i64), (i64, i64))> {
        self.vertices.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// `dv/df` of the finite edges with `df > 0`, `dv < 0`, left to right.
    pub fn slopes(&self) -> Vec<Q> {
        self.edges()
            .into_iter()
            .filter(|(a, b)| b.0 > a.0 && b.1 < a.1)
            .map(|(a, b)| Q::new((b.1 - a.1).into(), (b.0 - a.0).into()))
            .collect()
    }

    /// The point lies in `conv(points) + (-N)^2`.
    pub fn contains(&self, pt: (i64, i64)) -> bool {
        let last = *self.vertices.last().unwrap();
        if pt.0 > last.0 {
            return false;
        }
        let first = self.vertices[0];
        if pt.0 <= first.0 {
            return pt.1 <= first.1;
        }
        for (a, b) in self.edges() {
            if pt.0 <= b.0 {
                // below the segment a-b
                return (pt.1 - a.1) * (b.0 - a.0) <= (b.1 - a.1) * (pt.0 - a.0);
            }
        }
        false
    }

    /// A small standalone SVG drawing of the points and the boundary.
    pub fn to_svg(&self) -> String {
        let scale = 40i64;
        let pad = 40i64;
        let fmin = self.points.iter().map(|p| p.0).min().unwrap().min(0) - 1;
        let fmax = self.points.iter().map(|p| p.0).max().unwrap() + 1;
        let vmin = self.points.iter().map(|p| p.1).min().unwrap().min(0) - 1;
        let vmax = self.points.iter().map(|p| p.1).max().unwrap().max(0) + 1;
        let width = (fmax - fmin) * scale + 2 * pad;
        let height = (vmax - vmin) * scale + 2 * pad;
        let tx = |f: i64| pad + (f - fmin) * scale;
        let ty = |v: i64| pad + (vmax - v) * scale;
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">"#);
        let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray"/>"#, tx(fmin), ty(0), tx(fmax), ty(0));
        let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray"/>"#, tx(0), ty(vmin), tx(0), ty(vmax));
        let first = self.vertices[0];
        let last = *self.vertices.last().unwrap();
        let mut path = format!("{},{}", tx(fmin), ty(first.1));
        for v in &self.vertices {
            let _ = write!(path, " {},{}", tx(v.0), ty(v.1));
        }
        let _ = write!(path, " {},{}", tx(last.0), ty(vmin));
        let _ = writeln!(s, r#"<polyline points="{path}" fill="none" stroke="black" stroke-width="2"/>"#);
        for p in &self.points {
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="4" fill="black"/>"#, tx(p.0), ty(p.1));
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Smallest edge slope above `prev` over all polygons, or 0 if there is none.
/// `prev = None` stands for minus infinity.
pub fn next_candidate(g: &[WeylPoly], prev: Option<&Q>, i0: usize) -> Result<Q> {
    let mut best = Q::zero();
    for p in g {
        for r in newton_polygon(p, i0)?.slopes() {
            if prev.is_none_or(|pr| &r > pr) && r < best {
                best = r;
            }
        }
    }
    Ok(best)
}
