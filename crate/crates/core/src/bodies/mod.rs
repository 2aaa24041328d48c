//! Support functions and membership tests.
//!
//! Every body in this crate has constant width 2. Directions are unit
//! vectors; the support function `h(θ) = sup { x·θ : x ∈ K }` is evaluated
//! in closed form for each body.
//!
//! * `M_n = { v − w : v, w ≥ 0, |v|² + (|w| + √2)² ≤ 4 }` lives in `ℝⁿ`.
//! * `U_n` is the orthogonal projection of `M_{n+1}` onto the hyperplane
//!   orthogonal to `(1, …, 1)`; it is described in an orthonormal frame of
//!   that hyperplane (see [`simplex_basis`]).
//! * The Meissner bodies and their Minkowski average are three-dimensional
//!   and described in the `(a, b, c)` frame of [`chart`].

pub mod chart;
pub mod meissner;

use std::f64::consts::SQRT_2;
use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chart::{
    classify_ab, classify_ambient, classify_case, support_u3_ab, u3_chart_formula, AbcPoint, CaseRegion,
};
pub use meissner::{
    support_meissner_a, support_meissner_average, support_meissner_b, Meissner, MeissnerPiece,
};

/// Tolerance on `|θ| − 1` accepted when a [`Direction`] is constructed.
pub const UNIT_TOL: f64 = 1e-14;

/// Tolerance used for identities between support values.
pub const IDENTITY_TOL: f64 = 1e-12;

/// A unit vector in `ℝⁿ`, `n ≥ 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wraps `coords`, which must already have unit norm.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidDimension {
                dim: coords.len(),
                reason: "directions need at least two coordinates",
            });
        }
        let norm = norm(&coords);
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self(coords))
    }

    /// Scales `coords` to unit length.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        let norm = norm(&coords);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotUnit { norm });
        }
        coords.iter_mut().for_each(|x| *x /= norm);
        Self::new(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The antipodal direction `−θ`.
    pub fn antipode(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Direction {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// The decomposition `x = plus − minus` with disjointly supported
/// non-negative parts.
#[derive(Clone, Debug, PartialEq)]
pub struct PosNegSplit {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl PosNegSplit {
    pub fn plus_norm(&self) -> f64 {
        norm(&self.plus)
    }

    pub fn minus_norm(&self) -> f64 {
        norm(&self.minus)
    }
}

pub fn split_pos_neg(x: &[f64]) -> PosNegSplit {
    PosNegSplit {
        plus: x.iter().map(|&v| v.max(0.0)).collect(),
        minus: x.iter().map(|&v| (-v).max(0.0)).collect(),
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `(|x₊|, |x₋|)` without allocating the split.
#[inline]
pub(crate) fn pos_neg_norms(x: &[f64]) -> (f64, f64) {
    let (mut p, mut m) = (0.0, 0.0);
    for &v in x {
        if v > 0.0 {
            p += v * v;
        } else {
            m += v * v;
        }
    }
    (p.sqrt(), m.sqrt())
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Support function of `M_n` at the unit direction `theta`.
///
/// `√2·|θ₊|` when `|θ₊| ≥ |θ₋|`, otherwise `2 − √2·|θ₋|`. The two branches
/// agree on `|θ₊| = |θ₋| = 1/√2`, where the first one is used.
pub fn support_m(n: usize, theta: &Direction) -> Result<f64> {
    check_dim(n, theta.dim())?;
    Ok(support_m_unit(theta.coords()))
}

/// [`support_m`] on a raw slice that is assumed to have unit norm.
#[inline]
pub fn support_m_unit(theta: &[f64]) -> f64 {
    let (p, m) = pos_neg_norms(theta);
    if p >= m {
        SQRT_2 * p
    } else {
        2.0 - SQRT_2 * m
    }
}

/// Degree-one homogeneous extension `|x|·h(x/|x|)` of the `M_n` support.
pub fn support_m_homogeneous(x: &[f64]) -> f64 {
    let (p, m) = pos_neg_norms(x);
    if p >= m {
        SQRT_2 * p
    } else {
        2.0 * (p * p + m * m).sqrt() - SQRT_2 * m
    }
}

/// Gradient of [`support_m_homogeneous`] at a unit `theta`: the contact
/// point of `M_n` in direction `theta`.
pub fn contact_point_m(theta: &[f64]) -> Vec<f64> {
    let (p, m) = pos_neg_norms(theta);
    if p >= m {
        theta.iter().map(|&t| if t > 0.0 { SQRT_2 * t / p } else { 0.0 }).collect()
    } else {
        theta.iter().map(|&t| 2.0 * t + if t < 0.0 { -SQRT_2 * t / m } else { 0.0 }).collect()
    }
}

/// Value of the defining constraint `|x₊|² + (|x₋| + √2)²` of `M_n`.
#[inline]
pub fn membership_value(x: &[f64]) -> f64 {
    let (mut p2, mut m2) = (0.0, 0.0);
    for &v in x {
        if v > 0.0 {
            p2 += v * v;
        } else {
            m2 += v * v;
        }
    }
    // (m + √2)² expanded so that m = 0 contributes exactly 2.
    p2 + m2 + 2.0 * SQRT_2 * m2.sqrt() + 2.0
}

/// Upper bound accepted for [`membership_value`]; four ulps of slack absorb
/// the rounding of inputs such as `(√2, 0, …)` that sit on the boundary.
pub const MEMBERSHIP_BOUND: f64 = 4.0 * (1.0 + 4.0 * f64::EPSILON);

/// Whether `x ∈ M_n`.
///
/// Any representation `x = v − w` with `v, w ≥ 0` has the form
/// `v = x₊ + s`, `w = x₋ + s` with `s ≥ 0`, and the constraint is
/// nondecreasing in every `s_i`, so testing `s = 0` suffices.
pub fn membership_m(n: usize, x: &[f64]) -> Result<bool> {
    check_dim(n, x.len())?;
    Ok(membership_value(x) <= MEMBERSHIP_BOUND)
}

/// Orthonormal basis of the hyperplane `{x ∈ ℝⁿ⁺¹ : Σ xᵢ = 0}`.
///
/// For `n = 3` this is `e₁ = (1,−1,0,0)/√2`, `e₂ = (0,0,1,−1)/√2`,
/// `e₃ = (1,1,−1,−1)/2`, the frame of the `(a, b, c)` coordinates used
/// throughout the three-dimensional code. Other `n` use the Helmert basis.
pub fn simplex_basis(n: usize) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::InvalidDimension { dim: n, reason: "simplex frames need n >= 2" });
    }
    if n == 3 {
        let h = 0.5;
        let r = 1.0 / SQRT_2;
        return Ok(vec![vec![r, -r, 0.0, 0.0], vec![0.0, 0.0, r, -r], vec![h, h, -h, -h]]);
    }
    Ok((1..=n)
        .map(|k| {
            let s = 1.0 / ((k * (k + 1)) as f64).sqrt();
            let mut v = vec![0.0; n + 1];
            v[..k].iter_mut().for_each(|x| *x = s);
            v[k] = -(k as f64) * s;
            v
        })
        .collect())
}

/// An orthonormal frame of `(1,…,1)^⊥ ⊂ ℝⁿ⁺¹` with coordinate maps.
#[derive(Clone, Debug)]
pub struct SimplexFrame {
    n: usize,
    basis: Vec<Vec<f64>>,
}

impl SimplexFrame {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { n, basis: simplex_basis(n)? })
    }

    /// Dimension of the hyperplane.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Hyperplane coordinates to ambient `ℝⁿ⁺¹` coordinates.
    pub fn to_ambient(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n + 1];
        self.to_ambient_into(y, &mut x);
        x
    }

    pub fn to_ambient_into(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (yi, e) in y.iter().zip(&self.basis) {
            for (o, ei) in out.iter_mut().zip(e) {
                *o += yi * ei;
            }
        }
    }

    /// Orthogonal projection of an ambient vector, in hyperplane coordinates.
    pub fn to_hyperplane(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|e| e.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Support function of `U_n` at the unit vector `y` given in the
/// coordinates of [`simplex_basis`]`(n)`.
pub fn support_u(n: usize, y: &[f64]) -> Result<f64> {
    check_dim(n, y.len())?;
    let norm = norm(y);
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm });
    }
    let frame = SimplexFrame::new(n)?;
    Ok(support_m_unit(&frame.to_ambient(y)))
}

/// Which body a [`BodySpec`] names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyKind {
    M,
    U,
    MeissnerA,
    MeissnerB,
    MeissnerAverage,
    Ball,
    /// `U₃` with its support raised by 0.1 on the half-space `a > 0`.
    /// Neither of constant width nor convex; a negative control.
    CorruptedDemo,
}

impl fmt::Display for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BodyKind::M => "M",
            BodyKind::U => "U",
            BodyKind::MeissnerA => "meissner-a",
            BodyKind::MeissnerB => "meissner-b",
            BodyKind::MeissnerAverage => "meissner-average",
            BodyKind::Ball => "ball",
            BodyKind::CorruptedDemo => "corrupted-demo",
        })
    }
}

/// A body together with the dimension of the space it lives in.
///
/// For `U` the dimension is `n`; the body is realized inside `ℝⁿ⁺¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BodySpec {
    pub kind: BodyKind,
    pub ambient_dim: usize,
}

impl fmt::Display for BodySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BodyKind::M | BodyKind::U | BodyKind::Ball => {
                write!(f, "{}_{}", self.kind, self.ambient_dim)
            }
            _ => write!(f, "{}", self.kind),
        }
    }
}

impl BodySpec {
    pub fn new(kind: BodyKind, ambient_dim: usize) -> Result<Self> {
        let ok = match kind {
            BodyKind::M | BodyKind::U | BodyKind::Ball => ambient_dim >= 2,
            _ => ambient_dim == 3,
        };
        if !ok {
            return Err(Error::InvalidDimension {
                dim: ambient_dim,
                reason: "M, U and ball need dim >= 2; Meissner bodies and the demo need dim 3",
            });
        }
        Ok(Self { kind, ambient_dim })
    }

    pub fn m(n: usize) -> Result<Self> {
        Self::new(BodyKind::M, n)
    }

    pub fn u(n: usize) -> Result<Self> {
        Self::new(BodyKind::U, n)
    }

    pub fn ball(n: usize) -> Result<Self> {
        Self::new(BodyKind::Ball, n)
    }

    pub fn u3() -> Self {
        Self { kind: BodyKind::U, ambient_dim: 3 }
    }

    pub fn meissner_a() -> Self {
        Self { kind: BodyKind::MeissnerA, ambient_dim: 3 }
    }

    pub fn meissner_b() -> Self {
        Self { kind: BodyKind::MeissnerB, ambient_dim: 3 }
    }

    pub fn meissner_average() -> Self {
        Self { kind: BodyKind::MeissnerAverage, ambient_dim: 3 }
    }

    pub fn corrupted_demo() -> Self {
        Self { kind: BodyKind::CorruptedDemo, ambient_dim: 3 }
    }

    /// Whether the body is the three-dimensional `U₃`.
    pub fn is_u3(&self) -> bool {
        self.kind == BodyKind::U && self.ambient_dim == 3
    }

    /// Builds an evaluator with any frames precomputed.
    pub fn body(&self) -> Body {
        Body::new(*self)
    }
}

/// A [`BodySpec`] ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Body {
    spec: BodySpec,
    frame: Option<SimplexFrame>,
}

impl Body {
    pub fn new(spec: BodySpec) -> Self {
        let frame = match spec.kind {
            BodyKind::U => SimplexFrame::new(spec.ambient_dim).ok(),
            _ => None,
        };
        Self { spec, frame }
    }

    pub fn spec(&self) -> BodySpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.ambient_dim
    }

    pub fn frame(&self) -> Option<&SimplexFrame> {
        self.frame.as_ref()
    }

    /// Support value at a unit direction of length [`Body::dim`].
    pub fn support(&self, theta: &[f64]) -> Result<f64> {
        check_dim(self.dim(), theta.len())?;
        Ok(match self.spec.kind {
            BodyKind::M => support_m_unit(theta),
            BodyKind::U => match &self.frame {
                Some(frame) => support_m_unit(&frame.to_ambient(theta)),
                None => unreachable!("U bodies always carry a frame"),
            },
            BodyKind::Ball => 1.0,
            _ => self.support3(&Vector3::new(theta[0], theta[1], theta[2])),
        })
    }

    /// Support value of a three-dimensional body at a unit `theta` in
    /// `(a, b, c)` coordinates.
    pub fn support3(&self, theta: &Vector3<f64>) -> f64 {
        match self.spec.kind {
            BodyKind::U => chart::support_u3_vec(theta),
            BodyKind::MeissnerA => Meissner::a().support(theta),
            BodyKind::MeissnerB => Meissner::b().support(theta),
            BodyKind::MeissnerAverage => meissner::support_average(theta),
            BodyKind::Ball => 1.0,
            BodyKind::CorruptedDemo => chart::support_u3_vec(theta) + if theta.x > 0.0 { 0.1 } else { 0.0 },
            BodyKind::M => support_m_unit(&[theta.x, theta.y, theta.z]),
        }
    }

    /// Analytic contact point of a three-dimensional body in the unit
    /// direction `theta`, the gradient of the homogeneous extension of the
    /// support function.
    pub fn contact3(&self, theta: &Vector3<f64>) -> Result<Vector3<f64>> {
        Ok(match self.spec.kind {
            BodyKind::U if self.dim() == 3 => chart::u3_boundary_point(theta),
            BodyKind::MeissnerA => Meissner::a().boundary_point(theta),
            BodyKind::MeissnerB => Meissner::b().boundary_point(theta),
            BodyKind::MeissnerAverage => meissner::boundary_point_average(theta),
            BodyKind::Ball => *theta,
            BodyKind::M if self.dim() == 3 => {
                Vector3::from_column_slice(&contact_point_m(&[theta.x, theta.y, theta.z]))
            }
            _ => return Err(Error::UnsupportedBody(self.spec.to_string())),
        })
    }

    /// Rough distance from `theta` to the nearest place where the
    /// contact point jumps or bends; infinite for the ball.
    pub fn piece_margin3(&self, theta: &Vector3<f64>) -> f64 {
        match self.spec.kind {
            BodyKind::U | BodyKind::CorruptedDemo => chart::u3_margin(theta),
            BodyKind::MeissnerA => Meissner::a().margin(theta),
            BodyKind::MeissnerB => Meissner::b().margin(theta),
            BodyKind::MeissnerAverage => Meissner::a().margin(theta).min(Meissner::b().margin(theta)),
            BodyKind::Ball => f64::INFINITY,
            BodyKind::M => {
                let t = [theta.x, theta.y, theta.z];
                let (p, m) = pos_neg_norms(&t);
                t.iter().fold((p * p - m * m).abs(), |acc, v| acc.min(v.abs()))
            }
        }
    }

    /// `|x|·h(x/|x|)`, zero at the origin.
    pub fn support_homogeneous(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let r = norm(x);
        if r == 0.0 {
            return Ok(0.0);
        }
        let unit: Vec<f64> = x.iter().map(|v| v / r).collect();
        Ok(r * self.support(&unit)?)
    }
}
