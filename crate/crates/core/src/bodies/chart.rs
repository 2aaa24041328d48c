//! The `(a, b, c)` frame of the hyperplane `w + x + y + z = 0` and the case
//! decomposition of `U₃`.
//!
//! Ambient and frame coordinates are related by
//!
//! ```text
//! a = (w − x)/√2      w = (c + a√2)/2
//! b = (y − z)/√2      x = (c − a√2)/2
//! c = w + x = −y − z  y = (−c + b√2)/2
//!                     z = (−c − b√2)/2
//! ```
//!
//! A unit direction is classified by the signs of its ambient coordinates:
//! three positive (case I), two positive (case II, split into IIa/IIb by
//! comparing `w² + x²` against `y² + z²`), or one positive (case III).

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{contact_point_m, pos_neg_norms};
use crate::error::{Error, Result};

/// Coordinates in the orthonormal frame `e₁, e₂, e₃` of `{w+x+y+z = 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbcPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl AbcPoint {
    /// A unit point; the norm must be 1 within `1e-12`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let norm = (a * a + b * b + c * c).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self { a, b, c })
    }

    /// The point of the upper hemisphere above `(a, b)`.
    pub fn from_ab(a: f64, b: f64) -> Result<Self> {
        let r2 = a * a + b * b;
        if r2.is_nan() || r2 > 1.0 + 4.0 * f64::EPSILON {
            return Err(Error::OutsideChart { a, b });
        }
        Ok(Self { a, b, c: (1.0 - r2).max(0.0).sqrt() })
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self { a: v.x, b: v.y, c: v.z }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.a, self.b, self.c)
    }

    pub fn antipode(self) -> Self {
        Self { a: -self.a, b: -self.b, c: -self.c }
    }

    /// Ambient coordinates `(w, x, y, z)`.
    pub fn to_ambient(self) -> [f64; 4] {
        to_ambient(&self.to_vector())
    }
}

/// Frame coordinates to ambient `(w, x, y, z)`.
#[inline]
pub fn to_ambient(v: &Vector3<f64>) -> [f64; 4] {
    let (a, b, c) = (v.x * SQRT_2, v.y * SQRT_2, v.z);
    [(c + a) / 2.0, (c - a) / 2.0, (b - c) / 2.0, (-c - b) / 2.0]
}

/// Orthogonal projection of an ambient vector to frame coordinates.
#[inline]
pub fn from_ambient(t: &[f64; 4]) -> Vector3<f64> {
    Vector3::new(
        (t[0] - t[1]) * FRAC_1_SQRT_2,
        (t[2] - t[3]) * FRAC_1_SQRT_2,
        (t[0] + t[1] - t[2] - t[3]) / 2.0,
    )
}

/// The four case regions of the `U₃` support function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseRegion {
    I,
    IIa,
    IIb,
    III,
}

impl CaseRegion {
    pub const ALL: [CaseRegion; 4] = [CaseRegion::I, CaseRegion::IIa, CaseRegion::IIb, CaseRegion::III];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseRegion::I => "I",
            CaseRegion::IIa => "IIa",
            CaseRegion::IIb => "IIb",
            CaseRegion::III => "III",
        }
    }

    /// Integer code used by the PLY export.
    pub fn code(self) -> i32 {
        match self {
            CaseRegion::I => 0,
            CaseRegion::IIa => 1,
            CaseRegion::IIb => 2,
            CaseRegion::III => 3,
        }
    }

    pub fn from_code(code: i32) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.code() == code)
    }
}

impl fmt::Display for CaseRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseRegion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown case region `{s}`")))
    }
}

/// Ambient coordinates sorted in decreasing order, with their indices.
#[inline]
pub(crate) fn sorted_desc(t: &[f64; 4]) -> ([f64; 4], [usize; 4]) {
    let mut idx = [0usize, 1, 2, 3];
    idx.sort_by(|&i, &j| t[j].total_cmp(&t[i]).then(i.cmp(&j)));
    ([t[idx[0]], t[idx[1]], t[idx[2]], t[idx[3]]], idx)
}

#[inline]
fn classify_sorted(s: &[f64; 4]) -> CaseRegion {
    // Ties resolve with priority I > IIa > IIb > III.
    if s[2] >= 0.0 {
        CaseRegion::I
    } else if s[1] >= 0.0 {
        if s[0] * s[0] + s[1] * s[1] >= s[2] * s[2] + s[3] * s[3] {
            CaseRegion::IIa
        } else {
            CaseRegion::IIb
        }
    } else {
        CaseRegion::III
    }
}

/// Case of an ambient direction of the hyperplane.
pub fn classify_ambient(t: &[f64; 4]) -> CaseRegion {
    classify_sorted(&sorted_desc(t).0)
}

/// Case of a unit point anywhere on the sphere.
pub fn classify_case(p: &AbcPoint) -> CaseRegion {
    classify_ambient(&p.to_ambient())
}

/// Case of the upper-hemisphere point above `(a, b)`.
pub fn classify_ab(a: f64, b: f64) -> Result<CaseRegion> {
    Ok(classify_case(&AbcPoint::from_ab(a, b)?))
}

/// `U₃` support value from the case formulas of the `M₄` support
/// function after sorting the ambient coordinates.
pub fn support_u3_ab(p: &AbcPoint) -> Result<f64> {
    AbcPoint::new(p.a, p.b, p.c)?;
    Ok(support_u3_vec(&p.to_vector()))
}

#[inline]
pub(crate) fn support_u3_vec(theta: &Vector3<f64>) -> f64 {
    let (s, _) = sorted_desc(&to_ambient(theta));
    match classify_sorted(&s) {
        CaseRegion::I => 2.0 + SQRT_2 * s[3],
        CaseRegion::IIa => (2.0 * (s[0] * s[0] + s[1] * s[1])).sqrt(),
        CaseRegion::IIb => 2.0 - (2.0 * (s[2] * s[2] + s[3] * s[3])).sqrt(),
        CaseRegion::III => SQRT_2 * s[0],
    }
}

/// The `(a, b)` form of each case formula, valid on the representative
/// region of that case in the upper hemisphere (for example case I as
/// `b√2 ≥ c ≥ |a|√2`, case III as `a√2 ≥ c ≥ |b|√2`).
pub fn u3_chart_formula(case: CaseRegion, a: f64, b: f64, c: f64) -> f64 {
    1.0 + match case {
        CaseRegion::I => 1.0 - c * FRAC_1_SQRT_2 - b,
        CaseRegion::IIa => (1.0 + a * a - b * b).sqrt() - 1.0,
        CaseRegion::IIb => 1.0 - (1.0 - a * a + b * b).sqrt(),
        CaseRegion::III => c * FRAC_1_SQRT_2 + a - 1.0,
    }
}

/// Contact point of `U₃` in direction `theta`: the projection of the
/// `M₄` contact point.
pub(crate) fn u3_boundary_point(theta: &Vector3<f64>) -> Vector3<f64> {
    let x = contact_point_m(&to_ambient(theta));
    from_ambient(&[x[0], x[1], x[2], x[3]])
}

/// Rough distance from `theta` to the nearest case boundary of `U₃`.
pub(crate) fn u3_margin(theta: &Vector3<f64>) -> f64 {
    let t = to_ambient(theta);
    let (p, m) = pos_neg_norms(&t);
    t.iter().fold((p * p - m * m).abs(), |acc, v| acc.min(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn frame_round_trip() {
        let v = Vector3::new(0.3, -0.4, 0.5);
        let t = to_ambient(&v);
        assert_abs_diff_eq!(t.iter().sum::<f64>(), 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!((from_ambient(&t) - v).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_ab(0.0, 0.8).unwrap(), CaseRegion::I);
        assert_eq!(classify_ab(0.8, 0.0).unwrap(), CaseRegion::III);
        assert_eq!(classify_ab(0.5, 0.1).unwrap(), CaseRegion::IIa);
        assert_eq!(classify_ab(0.1, 0.5).unwrap(), CaseRegion::IIb);
        assert!(matches!(classify_ab(0.8, 0.8), Err(Error::OutsideChart { .. })));
    }

    #[test]
    fn ties_follow_priority() {
        // a = b: the IIa/IIb boundary.
        let p = AbcPoint::from_ab(0.3, 0.3).unwrap();
        assert_eq!(classify_case(&p), CaseRegion::IIa);
        // b√2 = c with |a| small: I/IIb boundary.
        let b = 1.0 / 3f64.sqrt();
        let p = AbcPoint::from_ab(0.0, b).unwrap();
        assert_eq!(classify_case(&AbcPoint { c: b * SQRT_2, ..p }), CaseRegion::I);
    }

    #[test]
    fn u3_examples() {
        let p = AbcPoint::new(0.0, 0.8, 0.6).unwrap();
        let h = support_u3_ab(&p).unwrap();
        assert_abs_diff_eq!(h, 2.0 - 0.6 / SQRT_2 - 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(h, 0.775_735_931_288_071_5, epsilon = 1e-15);

        let a: f64 = 0.3;
        let p = AbcPoint::from_ab(a, a).unwrap();
        assert_abs_diff_eq!(support_u3_ab(&p).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u3_chart_formula(CaseRegion::IIa, a, a, p.c), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u3_chart_formula(CaseRegion::IIb, a, a, p.c), 1.0, epsilon = 1e-15);

        // (1, 0, 0) has ambient coordinates (1/√2, −1/√2, 0, 0) and touches
        // every case; the tie rule picks I, and all formulas give 1 there.
        let p = AbcPoint::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(classify_case(&p), CaseRegion::I);
        assert_abs_diff_eq!(u3_chart_formula(CaseRegion::III, 1.0, 0.0, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(support_u3_ab(&p).unwrap(), 1.0, epsilon = 1e-15);

        assert!(support_u3_ab(&AbcPoint { a: 1.0, b: 1.0, c: 0.0 }).is_err());
    }

    #[test]
    fn case_one_boundary_point_lies_on_vertex_sphere() {
        let theta = Vector3::new(0.0, 0.8, 0.6);
        let x = u3_boundary_point(&theta);
        let center = Vector3::new(0.0, -1.0, -FRAC_1_SQRT_2);
        assert_abs_diff_eq!((x - center).norm(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x.dot(&theta), support_u3_vec(&theta), epsilon = 1e-14);
    }

    #[test]
    fn case_three_directions_share_a_vertex() {
        let v = Vector3::new(1.0, 0.0, FRAC_1_SQRT_2);
        for (a, b) in [(0.8, 0.1), (0.9, -0.2), (0.75, 0.0)] {
            let p = AbcPoint::from_ab(a, b).unwrap();
            assert_eq!(classify_case(&p), CaseRegion::III);
            assert_abs_diff_eq!((u3_boundary_point(&p.to_vector()) - v).norm(), 0.0, epsilon = 1e-12);
        }
    }
}
