//! Volumes of width-2 bodies in `ℝ³` from their support functions.
//!
//! For a body of constant width 2 with support function `h`,
//!
//! ```text
//! Vol = 4π/3 − ∫_{S²} [ ½|∇h|² − (h − 1)² ] dμ,
//! ```
//!
//! where `∇h` is the spherical gradient. The dedicated pipelines below
//! split the sphere into symmetric copies of a few chart regions in the
//! `(a, b)` coordinates, each carrying the area form `da db / c` with
//! `c = √(1 − a² − b²)`. [`ag_volume_generic`] instead integrates the
//! functional directly over the sphere for any support function.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::bodies::BodySpec;
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_1d, integrate_2d, Abscissa, Endpoints, IntegrationRegion2D, QuadOptions, QuadratureResult,
};

/// Volume of the unit ball in `ℝ³`.
pub const BALL_VOLUME: f64 = 4.0 * PI / 3.0;

/// Default relative tolerance of one-dimensional integrals.
pub const REL_TOL_1D: f64 = 1e-12;
/// Default relative tolerance of two-dimensional integrals.
pub const REL_TOL_2D: f64 = 1e-11;
/// Default relative tolerance of the generic sphere integral.
pub const REL_TOL_GENERIC: f64 = 1e-9;
/// Step of the finite-difference spherical gradient.
pub const FD_STEP: f64 = 1e-5;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub body: BodySpec,
    pub volume: f64,
    pub ratio_to_ball: f64,
    pub method: String,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl VolumeReport {
    fn new(body: BodySpec, volume: f64, method: &str, error_estimate: f64, evaluations: usize) -> Self {
        Self {
            body,
            volume,
            ratio_to_ball: volume / BALL_VOLUME,
            method: method.to_string(),
            error_estimate,
            evaluations,
        }
    }
}

fn chart_c(a: f64, b: f64) -> Result<f64> {
    let s = a * a + b * b;
    if s.is_nan() || s > 1.0 + 4.0 * f64::EPSILON {
        return Err(Error::OutsideChart { a, b });
    }
    Ok((1.0 - s).max(0.0).sqrt())
}

fn case_iii(a: f64, c: f64) -> f64 {
    let t = a + c * FRAC_1_SQRT_2;
    0.75 - 0.5 * t * t - (t - 1.0) * (t - 1.0)
}

fn case_iia(a: f64, b: f64) -> f64 {
    let q = 1.0 + a * a - b * b;
    let d = a * a - b * b;
    0.5 * ((a * a + b * b) / q - d * d / q) - (q.sqrt() - 1.0).powi(2)
}

/// `½|∇h|² − (h − 1)²` for the case-III formula `h = a + c/√2`.
///
/// Points on the unit circle (`c = 0`) are accepted.
pub fn integrand_case_iii(a: f64, b: f64) -> Result<f64> {
    Ok(case_iii(a, chart_c(a, b)?))
}

/// `½|∇h|² − (h − 1)²` for the case-IIa formula `h = √(1 + a² − b²)`.
pub fn integrand_case_iia(a: f64, b: f64) -> Result<f64> {
    chart_c(a, b)?;
    Ok(case_iia(a, b))
}

/// Closed form of the case-III integral `I₁`.
pub fn i1_closed() -> f64 {
    (PI * 6f64.sqrt() - 3.0 * SQRT_2) / 12.0 - (SQRT_2 / 5.0).atan()
}

fn i1_lo(b: f64) -> f64 {
    ((1.0 - b * b) / 3.0).sqrt()
}

fn i1_hi(b: f64) -> f64 {
    (1.0 - 3.0 * b * b).max(0.0).sqrt()
}

/// `I₁`: the case-III integrand over `0 ≤ b ≤ 1/2`,
/// `√((1 − b²)/3) ≤ a ≤ √(1 − 3b²)` with the area form.
///
/// At `b = 0` the upper limit reaches the unit circle, where the area form
/// blows up; the inner integral runs tanh-sinh with `c²` rebuilt from the
/// offset `d = a_hi − a` as `2b² + d(2a_hi − d)`.
pub fn i1_quad_with(opts: &QuadOptions) -> Result<QuadratureResult> {
    let region = IntegrationRegion2D::new(0.0, 0.5, i1_lo, i1_hi).inner_singular(Endpoints::HI);
    let f = |p: Abscissa, b: f64| {
        let hi = i1_hi(b);
        let d = p.from_hi;
        let c = (2.0 * b * b + d * (2.0 * hi - d)).sqrt();
        case_iii(hi - d, c) / c
    };
    integrate_2d(f, &region, opts)
}

pub fn i1_quad() -> Result<QuadratureResult> {
    i1_quad_with(&QuadOptions::with_rel_tol(REL_TOL_2D))
}

fn lower_wedge() -> IntegrationRegion2D<'static> {
    IntegrationRegion2D::new(0.0, 0.5, |b| b, i1_lo)
}

/// `I₂`: the case-II integrand over `0 ≤ b ≤ 1/2`, `b ≤ a ≤ √((1 − b²)/3)`.
pub fn i2_quad_with(opts: &QuadOptions) -> Result<QuadratureResult> {
    let f = |p: Abscissa, b: f64| {
        let a = p.x;
        let q = 1.0 + a * a - b * b;
        let c = (1.0 - a * a - b * b).sqrt();
        (a * a / q - 1.5 * (a * a - b * b) - 2.0 + 2.0 * q.sqrt()) / c
    };
    integrate_2d(f, &lower_wedge(), opts)
}

pub fn i2_quad() -> Result<QuadratureResult> {
    i2_quad_with(&QuadOptions::with_rel_tol(REL_TOL_2D))
}

/// `J = ∬ √(1 + a² − b²)/c` over the region of `I₂`.
pub fn j_quad_with(opts: &QuadOptions) -> Result<QuadratureResult> {
    let f = |p: Abscissa, b: f64| {
        let a = p.x;
        ((1.0 + a * a - b * b) / (1.0 - a * a - b * b)).sqrt()
    };
    integrate_2d(f, &lower_wedge(), opts)
}

pub fn j_quad() -> Result<QuadratureResult> {
    j_quad_with(&QuadOptions::with_rel_tol(REL_TOL_2D))
}

/// `I₂` from `J`: `7√2/12 − 1 − arctan √2 + π/4 + 2J`.
pub fn i2_rearranged() -> Result<QuadratureResult> {
    let j = j_quad()?;
    Ok(QuadratureResult {
        value: 7.0 * SQRT_2 / 12.0 - 1.0 - SQRT_2.atan() + FRAC_PI_4 + 2.0 * j.value,
        abs_error_estimate: 2.0 * j.abs_error_estimate,
        evaluations: j.evaluations,
    })
}

/// `K = ∫₀^{1/√3} √((1 + a²)/(1 − a²)) · arctan(a/(√(1 + a²) + 1)) da`.
pub fn k_quad() -> Result<QuadratureResult> {
    let f = |a: f64| {
        let s = (1.0 + a * a).sqrt();
        (s / (1.0 - a * a).sqrt()) * (a / (s + 1.0)).atan()
    };
    integrate_1d(f, 0.0, 1.0 / 3f64.sqrt(), REL_TOL_1D)
}

/// `J` through the one-dimensional rewrite `arctan(1/√8)/4 + K`.
pub fn j_one_dimensional() -> Result<QuadratureResult> {
    let k = k_quad()?;
    Ok(QuadratureResult { value: (1.0 / 8f64.sqrt()).atan() / 4.0 + k.value, ..k })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum U3Method {
    /// `4π/3 − 16 I₁ − 48 I₂` with both integrals by quadrature.
    Cases,
    /// The closed expression in `K` alone.
    Theorem,
    /// The sphere integral with finite-difference gradients.
    Generic,
}

/// Volume of `U₃`.
pub fn volume_u3(method: U3Method) -> Result<VolumeReport> {
    let body = BodySpec::u3();
    match method {
        U3Method::Cases => {
            let i1 = i1_quad()?;
            let i2 = i2_quad()?;
            Ok(VolumeReport::new(
                body,
                BALL_VOLUME - 16.0 * i1.value - 48.0 * i2.value,
                "cases",
                16.0 * i1.abs_error_estimate + 48.0 * i2.abs_error_estimate,
                i1.evaluations + i2.evaluations,
            ))
        }
        U3Method::Theorem => {
            let k = k_quad()?;
            let volume = BALL_VOLUME * (4.0 - 6f64.sqrt())
                + 24.0 * (2.0 - SQRT_2 - (1.0 / 8f64.sqrt()).atan())
                - 96.0 * k.value;
            Ok(VolumeReport::new(body, volume, "theorem", 96.0 * k.abs_error_estimate, k.evaluations))
        }
        U3Method::Generic => volume_generic(body, REL_TOL_GENERIC),
    }
}

/// Volume of either Meissner body from its closed form
/// `8π(2/3 − (√3/4)·arccos(1/3))`.
pub fn volume_meissner_closed() -> VolumeReport {
    let volume = 8.0 * PI * (2.0 / 3.0 - SQRT_3 / 4.0 * (1.0f64 / 3.0).acos());
    VolumeReport::new(BodySpec::meissner_a(), volume, "closed", 0.0, 0)
}

/// `I₃` over `0 ≤ a ≤ 1/2`, `1/2 ≤ b ≤ √((1 − a²)/3)`.
pub fn i3_quad_with(opts: &QuadOptions) -> Result<QuadratureResult> {
    // Outer variable a, inner b.
    let region = IntegrationRegion2D::new(0.0, 0.5, |_| 0.5, i1_lo);
    let f = |p: Abscissa, a: f64| {
        let b = p.x;
        let c = (1.0 - a * a - b * b).sqrt();
        let r = (1.0 - a * a).sqrt();
        let u = b - 2.0 + SQRT_3 * r;
        let v = SQRT_3 * a * a / r - b;
        0.125 * ((1.0 + 2.0 * a * a) / (1.0 - a * a) - 2.0 * u * u - v * v) / c
    };
    integrate_2d(f, &region, opts)
}

pub fn i3_quad() -> Result<QuadratureResult> {
    i3_quad_with(&QuadOptions::with_rel_tol(REL_TOL_2D))
}

/// The `I₄` integrand, without the area form.
pub fn integrand_i4(a: f64, b: f64) -> f64 {
    let ra = (1.0 - a * a).sqrt();
    let rb = (1.0 - b * b).sqrt();
    let u = rb - ra;
    let v = a * a / ra - b * b / rb;
    0.125 * (3.0 * a * a / (1.0 - a * a) + 3.0 * b * b / (1.0 - b * b) - 6.0 * u * u - 3.0 * v * v)
}

/// `I₄` over `0 ≤ a ≤ 1/2`, `a ≤ b ≤ 1/2`.
pub fn i4_quad_with(opts: &QuadOptions) -> Result<QuadratureResult> {
    let region = IntegrationRegion2D::new(0.0, 0.5, |a| a, |_| 0.5);
    let f = |p: Abscissa, a: f64| {
        let b = p.x;
        integrand_i4(a, b) / (1.0 - a * a - b * b).sqrt()
    };
    integrate_2d(f, &region, opts)
}

pub fn i4_quad() -> Result<QuadratureResult> {
    i4_quad_with(&QuadOptions::with_rel_tol(REL_TOL_2D))
}

/// Volume of `(A + B)/2` as `4π/3 − 16 I₁ − 48 (I₃ + I₄)`.
pub fn volume_meissner_average() -> Result<VolumeReport> {
    let i1 = i1_quad()?;
    let i3 = i3_quad()?;
    let i4 = i4_quad()?;
    Ok(VolumeReport::new(
        BodySpec::meissner_average(),
        BALL_VOLUME - 16.0 * i1.value - 48.0 * (i3.value + i4.value),
        "pieces",
        16.0 * i1.abs_error_estimate + 48.0 * (i3.abs_error_estimate + i4.abs_error_estimate),
        i1.evaluations + i3.evaluations + i4.evaluations,
    ))
}

/// Orthonormal tangent vectors at a unit `theta`.
pub fn tangent_frame(theta: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if theta.x.abs() < 0.6 {
        Vector3::x()
    } else if theta.y.abs() < 0.6 {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let e1 = (helper - theta * theta.dot(&helper)).normalize();
    let e2 = theta.cross(&e1);
    (e1, e2)
}

/// Spherical gradient of `h` at `theta` by central differences along two
/// great circles.
pub fn fd_spherical_gradient<H>(h: &H, theta: &Vector3<f64>, step: f64) -> Vector3<f64>
where
    H: Fn(&Vector3<f64>) -> f64 + ?Sized,
{
    let (e1, e2) = tangent_frame(theta);
    let (s, c) = step.sin_cos();
    let d = |e: &Vector3<f64>| (h(&(theta * c + e * s)) - h(&(theta * c - e * s))) / (2.0 * step);
    e1 * d(&e1) + e2 * d(&e2)
}

/// `½|∇h|² − (h − 1)²` at `theta` with a finite-difference gradient.
pub fn functional_integrand<H>(h: &H, theta: &Vector3<f64>, step: f64) -> f64
where
    H: Fn(&Vector3<f64>) -> f64 + ?Sized,
{
    let g = fd_spherical_gradient(h, theta, step);
    let v = h(theta) - 1.0;
    0.5 * g.norm_squared() - v * v
}

/// The volume functional for an arbitrary width-2 support function `h`
/// with spherical gradient `grad`.
///
/// The upper hemisphere is swept in the coordinates
/// `θ = (cos β sin φ, sin β, cos β cos φ)` with area form `cos β dβ dφ`;
/// the lower hemisphere contributes the same amount because
/// `h(−θ) = 2 − h(θ)` leaves the integrand unchanged.
///
/// ```
/// use constwidth::bodies::BodySpec;
/// use constwidth::volume::{ag_volume_generic, BALL_VOLUME};
/// use nalgebra::Vector3;
///
/// let ball = ag_volume_generic(BodySpec::ball(3).unwrap(), |_| 1.0, |_| Vector3::zeros(), 1e-9).unwrap();
/// assert_eq!(ball.volume, BALL_VOLUME);
/// ```
pub fn ag_volume_generic<H, G>(body: BodySpec, h: H, grad: G, rel_tol: f64) -> Result<VolumeReport>
where
    H: Fn(&Vector3<f64>) -> f64 + Sync,
    G: Fn(&Vector3<f64>) -> Vector3<f64> + Sync,
{
    let region = IntegrationRegion2D::new(-FRAC_PI_2, FRAC_PI_2, |_| -FRAC_PI_2, |_| FRAC_PI_2);
    let f = |p: Abscissa, beta: f64| {
        let (sb, cb) = beta.sin_cos();
        let (sp, cp) = p.x.sin_cos();
        let theta = Vector3::new(cb * sp, sb, cb * cp);
        let v = h(&theta) - 1.0;
        (0.5 * grad(&theta).norm_squared() - v * v) * cb
    };
    let opts = QuadOptions {
        rel_tol,
        // The integral is compared against a volume of size ~4.
        abs_tol: rel_tol * 1e-2,
        ..QuadOptions::default()
    };
    let r = integrate_2d(f, &region, &opts)?;
    Ok(VolumeReport::new(
        body,
        BALL_VOLUME - 2.0 * r.value,
        "generic",
        2.0 * r.abs_error_estimate,
        r.evaluations,
    ))
}

/// [`ag_volume_generic`] for a three-dimensional body, with the gradient
/// taken by central differences of step [`FD_STEP`].
pub fn volume_generic(spec: BodySpec, rel_tol: f64) -> Result<VolumeReport> {
    if spec.ambient_dim != 3 {
        return Err(Error::UnsupportedBody(spec.to_string()));
    }
    let body = spec.body();
    let h = |t: &Vector3<f64>| body.support3(t);
    ag_volume_generic(spec, h, |t| fd_spherical_gradient(&h, t, FD_STEP), rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn case_iii_integrand_examples() {
        // a + c/√2 = 1 at a = 1/3, b = 0: c = 2√2/3.
        assert_abs_diff_eq!(integrand_case_iii(1.0 / 3.0, 0.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(integrand_case_iii(1.0, 0.0).unwrap(), 0.25, epsilon = 1e-15);
        assert!(integrand_case_iii(0.9, 0.9).is_err());
    }

    #[test]
    fn case_iia_integrand_examples() {
        for a in [0.1, 0.3, 0.6] {
            assert_abs_diff_eq!(integrand_case_iia(a, a).unwrap(), a * a, epsilon = 1e-15);
        }
        assert_eq!(integrand_case_iia(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn i4_integrand_on_the_diagonal() {
        for a in [0.0, 0.2, 0.45] {
            let want = 0.125 * 6.0 * a * a / (1.0 - a * a);
            assert_abs_diff_eq!(integrand_i4(a, a), want, epsilon = 1e-15);
        }
    }

    #[test]
    fn region_limits_meet_at_one_half() {
        assert_abs_diff_eq!(i1_lo(0.5), 0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(i1_hi(0.5), 0.5, epsilon = 1e-16);
    }

    #[test]
    fn meissner_closed_ratio() {
        let r = volume_meissner_closed();
        assert_abs_diff_eq!(r.ratio_to_ball, 0.801_873_62, epsilon = 1e-8);
        assert_abs_diff_eq!(r.ratio_to_ball * BALL_VOLUME, r.volume, epsilon = 1e-14);
    }

    #[test]
    fn tangent_frame_is_orthonormal() {
        for t in [Vector3::x(), Vector3::new(0.3, -0.4, 0.866_025_403_784_438_6)] {
            let t = t.normalize();
            let (e1, e2) = tangent_frame(&t);
            assert_abs_diff_eq!(e1.dot(&t), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(e2.dot(&t), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(e1.dot(&e2), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(e2.norm(), 1.0, epsilon = 1e-15);
        }
    }
}
