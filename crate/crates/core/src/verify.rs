//! Numerical property suites: constant width, symmetry, convexity,
//! principal curvatures and the projection sandwich.
//!
//! Every check draws its samples from seeded streams in fixed batches and
//! reduces with `max`, so a report is a pure function of its arguments.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector3};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::chart::{from_ambient, to_ambient};
use crate::bodies::{
    classify_case, meissner::vertices, AbcPoint, Body, BodyKind, BodySpec, CaseRegion, Meissner,
    SimplexFrame, IDENTITY_TOL,
};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_volume_m, estimate_volume_u, McEstimate};
use crate::sampling::{rng, unit_vector, unit_vector_into};
use crate::volume::{tangent_frame, volume_u3, U3Method};

/// Tolerance of the subadditivity check.
pub const CONVEXITY_TOL: f64 = 1e-10;
/// Tolerance on principal curvatures.
pub const CURVATURE_TOL: f64 = 1e-3;
/// Finite-difference step of the curvature check.
pub const CURVATURE_STEP: f64 = 1e-4;
/// Distance from a piece boundary that the curvature check keeps out of.
pub const CURVATURE_EXCLUSION: f64 = 10.0 * CURVATURE_STEP;
/// Tolerance on distances of case-I contact points to their sphere centers.
pub const SPHERE_TOL: f64 = 1e-10;
/// Random permutations used when the full group is too large.
pub const RANDOM_PERMUTATIONS: usize = 50;

const CHUNK: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub body: String,
    pub samples: usize,
    /// Samples drawn but not evaluated (too close to a piece boundary).
    pub skipped: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Extra measured quantities, keyed by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub statistics: BTreeMap<String, f64>,
}

impl PropertyReport {
    fn new(property: &str, body: &BodySpec, samples: usize, max_violation: f64, tolerance: f64) -> Self {
        Self {
            property: property.to_string(),
            body: body.to_string(),
            samples,
            skipped: 0,
            max_violation,
            tolerance,
            passed: max_violation <= tolerance,
            statistics: BTreeMap::new(),
        }
    }

    fn with_stat(mut self, key: &str, value: f64) -> Self {
        self.statistics.insert(key.to_string(), value);
        self
    }
}

/// `max` of `f` over `samples` calls, each call given the stream of its
/// chunk. NaN counts as an infinite violation.
fn max_over<F>(samples: usize, seed: u64, f: F) -> Result<f64>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<f64> + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let maxima = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng(seed, c as u64);
            let mut worst: f64 = 0.0;
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let v = f(&mut r)?;
                worst = if v.is_nan() { f64::INFINITY } else { worst.max(v) };
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(maxima.into_iter().fold(0.0, f64::max))
}

/// `max |h(θ) + h(−θ) − 2|` over random unit directions.
///
/// ```
/// use constwidth::bodies::BodySpec;
/// use constwidth::verify::check_constant_width;
///
/// let report = check_constant_width(&BodySpec::u3(), 10_000, 1).unwrap();
/// assert!(report.passed);
/// ```
pub fn check_constant_width(spec: &BodySpec, samples: usize, seed: u64) -> Result<PropertyReport> {
    let body = spec.body();
    let n = body.dim();
    let worst = max_over(samples, seed, |r| {
        let t = unit_vector(r, n);
        let minus: Vec<f64> = t.iter().map(|v| -v).collect();
        Ok((body.support(&t)? + body.support(&minus)? - 2.0).abs())
    })?;
    Ok(PropertyReport::new("constant-width", spec, samples, worst, IDENTITY_TOL))
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..m).collect(), &mut out);
    out
}

fn is_odd(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

fn permute(p: &[usize], x: &[f64]) -> Vec<f64> {
    p.iter().map(|&i| x[i]).collect()
}

/// Ambient coordinate permutations checked for a body, and the map from
/// body coordinates to the permuted ones.
fn symmetry_group(spec: &BodySpec, seed: u64) -> Result<Vec<Vec<usize>>> {
    let m = match spec.kind {
        BodyKind::U => spec.ambient_dim + 1,
        BodyKind::M | BodyKind::Ball => spec.ambient_dim,
        _ => 4,
    };
    Ok(match spec.kind {
        // Only the stabilizer of vertex z maps a Meissner body to itself.
        BodyKind::MeissnerA | BodyKind::MeissnerB => permutations(3)
            .into_iter()
            .map(|mut p| {
                p.push(3);
                p
            })
            .collect(),
        _ if m <= 4 => permutations(m),
        _ => {
            let mut r = rng(seed, u64::MAX);
            let mut out = vec![(0..m).collect::<Vec<_>>()];
            while out.len() < RANDOM_PERMUTATIONS {
                let mut p: Vec<usize> = (0..m).collect();
                p.shuffle(&mut r);
                out.push(p);
            }
            out
        }
    })
}

fn act(spec: &BodySpec, frame: Option<&SimplexFrame>, p: &[usize], t: &[f64]) -> Vec<f64> {
    match (spec.kind, frame) {
        (BodyKind::U, Some(frame)) => frame.to_hyperplane(&permute(p, &frame.to_ambient(t))),
        (BodyKind::M | BodyKind::Ball, _) => permute(p, t),
        _ => {
            let amb = to_ambient(&Vector3::new(t[0], t[1], t[2]));
            let q = from_ambient(&[amb[p[0]], amb[p[1]], amb[p[2]], amb[p[3]]]);
            vec![q.x, q.y, q.z]
        }
    }
}

/// `max |h(Pθ) − h(θ)|` over random directions and the simplex
/// permutations `P` preserving the body.
///
/// `U_n` and `M_n` with at most four coordinates, the Meissner average
/// and the corrupted demo are checked against all 24 permutations; larger
/// `U_n` and `M_n` against [`RANDOM_PERMUTATIONS`] random ones; Meissner
/// bodies against the six permutations fixing the vertex where their
/// rounded edges meet or around which they lie.
pub fn check_symmetry(spec: &BodySpec, samples: usize, seed: u64) -> Result<PropertyReport> {
    let body = spec.body();
    let group = symmetry_group(spec, seed)?;
    let n = body.dim();
    let worst = max_over(samples, seed, |r| {
        let t = unit_vector(r, n);
        let h = body.support(&t)?;
        let mut worst: f64 = 0.0;
        for p in &group {
            worst = worst.max((body.support(&act(spec, body.frame(), p, &t))? - h).abs());
        }
        Ok(worst)
    })?;
    Ok(PropertyReport::new("symmetry", spec, samples, worst, IDENTITY_TOL)
        .with_stat("permutations", group.len() as f64))
}

/// `max |h_A(Pθ) − h_B(θ)|` over random directions and the twelve odd
/// permutations `P` of the ambient coordinates. Passes only if some
/// reflection of the tetrahedron carried one Meissner body onto the other.
pub fn check_meissner_swap(samples: usize, seed: u64) -> Result<PropertyReport> {
    let (a, b) = (Meissner::a(), Meissner::b());
    let odd: Vec<Vec<usize>> = permutations(4).into_iter().filter(|p| is_odd(p)).collect();
    let spec = BodySpec::meissner_a();
    let worst = max_over(samples, seed, |r| {
        let t = unit_vector(r, 3);
        let theta = Vector3::new(t[0], t[1], t[2]);
        let hb = b.support(&theta);
        let amb = to_ambient(&theta);
        let mut worst: f64 = 0.0;
        for p in &odd {
            let q = from_ambient(&[amb[p[0]], amb[p[1]], amb[p[2]], amb[p[3]]]);
            worst = worst.max((a.support(&q) - hb).abs());
        }
        Ok(worst)
    })?;
    let mut report = PropertyReport::new("meissner-swap", &spec, samples, worst, IDENTITY_TOL)
        .with_stat("permutations", odd.len() as f64);
    report.body = "meissner-a vs meissner-b".into();
    Ok(report)
}

/// `max(0, h̃(x + y) − h̃(x) − h̃(y))` over random pairs, half of them
/// nearly parallel with log-uniform separation down to `1e-6`.
pub fn check_convexity(spec: &BodySpec, samples: usize, seed: u64) -> Result<PropertyReport> {
    let body = spec.body();
    let n = body.dim();
    let worst = max_over(samples, seed, |r| {
        let u = unit_vector(r, n);
        let v = if r.random::<bool>() {
            unit_vector(r, n)
        } else {
            let w = unit_vector(r, n);
            let eps = 10f64.powf(-6.0 * r.random::<f64>());
            let v: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a + eps * b).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        };
        let (s, t) = (0.1 + 1.9 * r.random::<f64>(), 0.1 + 1.9 * r.random::<f64>());
        let x: Vec<f64> = u.iter().map(|a| s * a).collect();
        let y: Vec<f64> = v.iter().map(|a| t * a).collect();
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let gap =
            body.support_homogeneous(&sum)? - body.support_homogeneous(&x)? - body.support_homogeneous(&y)?;
        Ok(gap.max(0.0))
    })?;
    Ok(PropertyReport::new("convexity", spec, samples, worst, CONVEXITY_TOL))
}

/// Which boundary directions the curvature check samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureRegion {
    /// Directions of one case region (`I` or `IIb` for `U₃`).
    Case(CaseRegion),
    /// Every smooth piece of a Meissner body, or the whole ball.
    Smooth,
}

impl std::str::FromStr for CurvatureRegion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("smooth") {
            Ok(CurvatureRegion::Smooth)
        } else {
            s.parse().map(CurvatureRegion::Case)
        }
    }
}

/// Principal radii of curvature `r₁ ≤ r₂` at the contact point of
/// `theta`: eigenvalues of the derivative of the contact map on the
/// tangent plane, by central differences with one Richardson step.
pub fn principal_radii(body: &Body, theta: &Vector3<f64>, step: f64) -> Result<(f64, f64)> {
    let (e1, e2) = tangent_frame(theta);
    let diff = |e: &Vector3<f64>, s: f64| -> Result<Vector3<f64>> {
        let (sn, cs) = s.sin_cos();
        let plus = body.contact3(&(theta * cs + e * sn))?;
        let minus = body.contact3(&(theta * cs - e * sn))?;
        Ok((plus - minus) / (2.0 * s))
    };
    let richardson = |e: &Vector3<f64>| -> Result<Vector3<f64>> {
        Ok((diff(e, step / 2.0)? * 4.0 - diff(e, step)?) / 3.0)
    };
    let (d1, d2) = (richardson(&e1)?, richardson(&e2)?);
    let m = Matrix2::new(d1.dot(&e1), d2.dot(&e1), d1.dot(&e2), d2.dot(&e2));
    let sym = (m + m.transpose()) / 2.0;
    let eig = sym.symmetric_eigenvalues();
    Ok((eig[0].min(eig[1]), eig[0].max(eig[1])))
}

fn region_accepts(spec: &BodySpec, region: CurvatureRegion, theta: &Vector3<f64>) -> Result<bool> {
    let case = || classify_case(&AbcPoint::from_vector(theta));
    Ok(match (spec.kind, region) {
        (BodyKind::Ball, _) => true,
        (BodyKind::U, CurvatureRegion::Case(c)) if spec.ambient_dim == 3 => case() == c,
        (BodyKind::MeissnerA, CurvatureRegion::Smooth) => Meissner::a().piece(theta).is_smooth(),
        (BodyKind::MeissnerB, CurvatureRegion::Smooth) => Meissner::b().piece(theta).is_smooth(),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "curvature region {region:?} is not a smooth piece family of {spec}"
            )))
        }
    })
}

/// Principal curvatures on a smooth piece family.
///
/// For `U₃` case `I` and the spherical faces of the Meissner bodies both
/// curvatures must equal `1/2`; elsewhere on the smooth pieces the
/// smaller one must. For the unit ball both must equal `1`. Samples within
/// [`CURVATURE_EXCLUSION`] of a piece boundary are skipped and counted.
pub fn check_curvature(
    spec: &BodySpec,
    region: CurvatureRegion,
    samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    if let CurvatureRegion::Case(c) = region {
        if spec.is_u3() && !matches!(c, CaseRegion::I | CaseRegion::IIb) {
            return Err(Error::InvalidArgument(format!(
                "case {c} of U_3 is not a two-dimensional smooth piece"
            )));
        }
    }
    let body = spec.body();
    let max_attempts = 1000 * samples.max(1);
    let mut r = rng(seed, 0);
    let mut directions = Vec::with_capacity(samples);
    let mut skipped = 0;
    let mut attempts = 0;
    let mut t = [0.0; 3];
    while directions.len() < samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::InvalidArgument(format!(
                "region {region:?} of {spec} is too small to sample"
            )));
        }
        unit_vector_into(&mut r, &mut t);
        let theta = Vector3::from(t);
        if !region_accepts(spec, region, &theta)? {
            continue;
        }
        if body.piece_margin3(&theta) < CURVATURE_EXCLUSION {
            skipped += 1;
            continue;
        }
        directions.push(theta);
    }
    let both_equal = |theta: &Vector3<f64>| -> bool {
        match spec.kind {
            BodyKind::Ball => true,
            BodyKind::U => region == CurvatureRegion::Case(CaseRegion::I),
            BodyKind::MeissnerA => {
                matches!(Meissner::a().piece(theta), crate::bodies::MeissnerPiece::Face(_))
            }
            BodyKind::MeissnerB => {
                matches!(Meissner::b().piece(theta), crate::bodies::MeissnerPiece::Face(_))
            }
            _ => false,
        }
    };
    let target = if spec.kind == BodyKind::Ball { 1.0 } else { 0.5 };
    let results = directions
        .par_iter()
        .map(|theta| {
            let (r1, r2) = principal_radii(&body, theta, CURVATURE_STEP)?;
            let (k_min, k_max) = (1.0 / r2, 1.0 / r1);
            let mut v = (k_min - target).abs();
            if both_equal(theta) {
                v = v.max((k_max - target).abs());
            }
            Ok((v, k_min))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let worst = results.iter().fold(0.0f64, |m, &(v, _)| if v.is_nan() { f64::INFINITY } else { m.max(v) });
    let mean = results.iter().map(|&(_, k)| k).sum::<f64>() / results.len().max(1) as f64;
    let mut report = PropertyReport::new("curvature", spec, samples, worst, CURVATURE_TOL)
        .with_stat("mean_min_curvature", mean)
        .with_stat("expected_min_curvature", target);
    report.skipped = skipped;
    Ok(report)
}

/// Distance of `U₃` contact points in case `I` from the sphere of radius
/// 2 about the vertex of the most negative ambient coordinate.
pub fn check_case_i_spheres(samples: usize, seed: u64) -> Result<PropertyReport> {
    let spec = BodySpec::u3();
    let body = spec.body();
    let v = vertices();
    let mut r = rng(seed, 0);
    let mut t = [0.0; 3];
    let mut directions = Vec::with_capacity(samples);
    while directions.len() < samples {
        unit_vector_into(&mut r, &mut t);
        let theta = Vector3::from(t);
        if classify_case(&AbcPoint::from_vector(&theta)) == CaseRegion::I {
            directions.push(theta);
        }
    }
    let mut worst: f64 = 0.0;
    for theta in &directions {
        let amb = to_ambient(theta);
        let k = (0..4).min_by(|&i, &j| amb[i].total_cmp(&amb[j])).expect("four coordinates");
        let x = body.contact3(theta)?;
        worst = worst.max(((x - v[k]).norm() - 2.0).abs());
    }
    Ok(PropertyReport::new("case-i-spheres", &spec, samples, worst, SPHERE_TOL))
}

/// The sandwich `½·Vol(M_{n+1}) ≤ Vol(U_n) ≤ ((n+1)/2)·Vol(M_{n+1})`
/// with Monte Carlo values widened to 3σ.
///
/// `Vol(U₂)` is the Reuleaux triangle area `2(π − √3)` and `Vol(U₃)`
/// comes from quadrature; other `U_n` and all `M_{n+1}` are estimated.
pub fn check_projection_inequality(n: usize, mc_samples: usize, seed: u64) -> Result<PropertyReport> {
    let m_est: McEstimate = estimate_volume_m(n + 1, mc_samples, seed)?;
    let (u_lo, u_hi, u_val) = match n {
        2 => {
            let a = 2.0 * (PI - 3f64.sqrt());
            (a, a, a)
        }
        3 => {
            let v = volume_u3(U3Method::Cases)?.volume;
            (v, v, v)
        }
        _ => {
            let e = estimate_volume_u(n, mc_samples, seed.wrapping_add(1))?;
            let (lo, hi) = e.bounds(3.0);
            (lo, hi, e.volume)
        }
    };
    let (m_lo, m_hi) = m_est.bounds(3.0);
    let factor = (n as f64 + 1.0) / 2.0;
    let violation = (0.5 * m_lo - u_hi).max(u_lo - factor * m_hi).max(0.0);
    let spec = BodySpec::u(n)?;
    Ok(PropertyReport::new("projection-sandwich", &spec, mc_samples, violation, 0.0)
        .with_stat("volume_u", u_val)
        .with_stat("volume_m", m_est.volume)
        .with_stat("volume_m_std_error", m_est.std_error)
        .with_stat("upper_factor", factor))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_helpers() {
        let all = permutations(4);
        assert_eq!(all.len(), 24);
        assert_eq!(all.iter().filter(|p| is_odd(p)).count(), 12);
        assert!(!is_odd(&[0, 1, 2, 3]));
        assert!(is_odd(&[1, 0, 2, 3]));
    }

    #[test]
    fn ball_passes_trivially() {
        let ball = BodySpec::ball(3).unwrap();
        assert_eq!(check_constant_width(&ball, 1000, 0).unwrap().max_violation, 0.0);
        assert!(check_convexity(&ball, 1000, 0).unwrap().passed);
    }

    #[test]
    fn identity_permutation_changes_nothing() {
        let spec = BodySpec::u(3).unwrap();
        let body = spec.body();
        let t = [0.48, -0.6, 0.64];
        let moved = act(&spec, body.frame(), &[0, 1, 2, 3], &t);
        for (a, b) in moved.iter().zip(&t) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn reports_depend_only_on_their_arguments() {
        let a = check_convexity(&BodySpec::u3(), 3000, 5).unwrap();
        let b = check_convexity(&BodySpec::u3(), 3000, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corrupted_body_fails() {
        let bad = BodySpec::corrupted_demo();
        assert!(!check_constant_width(&bad, 2000, 1).unwrap().passed);
        assert!(!check_convexity(&bad, 20_000, 1).unwrap().passed);
        assert!(!check_symmetry(&bad, 2000, 1).unwrap().passed);
    }

    #[test]
    fn unsupported_curvature_regions() {
        assert!(check_curvature(&BodySpec::u3(), CurvatureRegion::Case(CaseRegion::IIa), 10, 0).is_err());
        assert!(check_curvature(&BodySpec::meissner_average(), CurvatureRegion::Smooth, 10, 0).is_err());
    }
}
