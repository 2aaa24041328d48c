//! Monte Carlo volumes of `M_n` and `U_n` in dimensions where quadrature
//! is out of reach.
//!
//! Points are drawn uniformly from the ball of radius `√2`, which contains
//! every body here since `max h = √2`. Work is split into fixed batches,
//! each with its own random stream, and hit counts are summed, so the
//! result depends only on `(n, n_samples, seed)`.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{membership_value, BodySpec, SimplexFrame, MEMBERSHIP_BOUND};
use crate::error::{Error, Result};
use crate::sampling::{ball_point_into, rng};
use crate::unit_ball_volume;

/// Radius of the sampling ball.
pub const SAMPLING_RADIUS: f64 = SQRT_2;
/// Samples per random stream.
pub const BATCH: usize = 1 << 16;
/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 1000;
/// Largest dimension accepted by [`ratio_trend`].
pub const MAX_TREND_DIM: usize = 20;
/// Absolute tolerance of the line search in `t`.
pub const T_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub body: BodySpec,
    pub n_samples: usize,
    pub hits: usize,
    pub volume: f64,
    pub std_error: f64,
    pub ratio_to_ball: f64,
    /// `(volume / ball volume)^(1/n)`: the radius of the ball of equal
    /// volume.
    pub ratio_root: f64,
    /// Standard error of `ratio_root` by the delta method.
    pub ratio_root_std_error: f64,
    pub seed: u64,
}

impl McEstimate {
    fn new(body: BodySpec, n: usize, n_samples: usize, hits: usize, seed: u64) -> Self {
        let region = unit_ball_volume(n) * SAMPLING_RADIUS.powi(n as i32);
        let p = hits as f64 / n_samples as f64;
        let volume = p * region;
        let std_error = region * (p * (1.0 - p) / n_samples as f64).sqrt();
        let ratio_to_ball = volume / unit_ball_volume(n);
        let ratio_root = ratio_to_ball.powf(1.0 / n as f64);
        let ratio_root_std_error =
            if volume > 0.0 { ratio_root * std_error / (n as f64 * volume) } else { f64::INFINITY };
        Self {
            body,
            n_samples,
            hits,
            volume,
            std_error,
            ratio_to_ball,
            ratio_root,
            ratio_root_std_error,
            seed,
        }
    }

    /// `volume ± k·std_error`.
    pub fn bounds(&self, k: f64) -> (f64, f64) {
        (self.volume - k * self.std_error, self.volume + k * self.std_error)
    }
}

/// Counts sample points of the radius-`√2` ball in dimension `n` that
/// satisfy `member`.
pub fn count_hits<F>(n: usize, n_samples: usize, seed: u64, member: F) -> Result<usize>
where
    F: Fn(&[f64]) -> Result<bool> + Sync,
{
    let batches = n_samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut r = rng(seed, b as u64);
            let count = BATCH.min(n_samples - b * BATCH);
            let mut x = vec![0.0; n];
            let mut hits = 0;
            for _ in 0..count {
                ball_point_into(&mut r, SAMPLING_RADIUS, &mut x);
                if member(&x)? {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<usize>>>()
        .map(|v| v.into_iter().sum())
}

fn check_args(n: usize, n_samples: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension { dim: n, reason: "Monte Carlo estimates need n >= 2" });
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples are needed, got {n_samples}"
        )));
    }
    Ok(())
}

/// Volume of `M_n`.
pub fn estimate_volume_m(n: usize, n_samples: usize, seed: u64) -> Result<McEstimate> {
    check_args(n, n_samples)?;
    let hits = count_hits(n, n_samples, seed, |x| Ok(membership_value(x) <= MEMBERSHIP_BOUND))?;
    Ok(McEstimate::new(BodySpec::m(n)?, n, n_samples, hits, seed))
}

/// Volume of the unit ball, estimated exactly like the bodies; a
/// calibration control.
pub fn estimate_volume_ball(n: usize, n_samples: usize, seed: u64) -> Result<McEstimate> {
    check_args(n, n_samples)?;
    let hits = count_hits(n, n_samples, seed, |x| Ok(x.iter().map(|v| v * v).sum::<f64>() <= 1.0))?;
    Ok(McEstimate::new(BodySpec::ball(n)?, n, n_samples, hits, seed))
}

/// Membership of `y` (hyperplane coordinates) in `U_n`: whether the line
/// `B·y + t·(1, …, 1)/√(n+1)` meets `M_{n+1}`.
///
/// The constraint `g(t) = |x₊|² + (|x₋| + √2)²` is convex in `t`, so a
/// golden-section search over `[−2, 2]` finds its minimum; if the minimum
/// sits at the bracket edge the search is repeated once on `[−4, 4]`.
pub fn membership_u(frame: &SimplexFrame, y: &[f64]) -> Result<bool> {
    let m = frame.dim() + 1;
    let mut x0 = vec![0.0; m];
    frame.to_ambient_into(y, &mut x0);
    let step = 1.0 / (m as f64).sqrt();
    let mut buf = vec![0.0; m];
    let mut g = |t: f64| {
        for (b, x) in buf.iter_mut().zip(&x0) {
            *b = x + t * step;
        }
        membership_value(&buf)
    };
    if g(0.0) <= MEMBERSHIP_BOUND {
        return Ok(true);
    }
    for half in [2.0, 4.0] {
        let (t, value) = golden_section(&mut g, -half, half, T_TOL, MEMBERSHIP_BOUND);
        if value <= MEMBERSHIP_BOUND {
            return Ok(true);
        }
        if half - t.abs() > 10.0 * T_TOL {
            return Ok(false);
        }
    }
    Err(Error::MinimizerAtBoundary { t: 4.0 })
}

/// Minimizes a convex `g` on `[lo, hi]` to within `tol` in the argument.
/// Stops early once a value at or below `stop` is seen.
pub fn golden_section<G: FnMut(f64) -> f64>(g: &mut G, lo: f64, hi: f64, tol: f64, stop: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > tol {
        if gc.min(gd) <= stop {
            break;
        }
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let (ga, gb) = (g(a), g(b));
    [(a, ga), (c, gc), (d, gd), (b, gb)]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("four candidates")
}

/// Volume of `U_n`.
pub fn estimate_volume_u(n: usize, n_samples: usize, seed: u64) -> Result<McEstimate> {
    check_args(n, n_samples)?;
    let frame = SimplexFrame::new(n)?;
    let hits = count_hits(n, n_samples, seed, |y| membership_u(&frame, y))?;
    Ok(McEstimate::new(BodySpec::u(n)?, n, n_samples, hits, seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub n: usize,
    pub volume: f64,
    pub std_error: f64,
    pub ratio_root: f64,
    pub ratio_root_lo: f64,
    pub ratio_root_hi: f64,
    pub hits: usize,
}

/// `ratio_root` of `M_n` for `n_lo ≤ n ≤ n_hi` with 3σ bounds. Row `n`
/// uses seed `seed + n`.
pub fn ratio_trend(n_lo: usize, n_hi: usize, samples_per_n: usize, seed: u64) -> Result<Vec<TrendRow>> {
    if !(2 <= n_lo && n_lo <= n_hi && n_hi <= MAX_TREND_DIM) {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= lo <= hi <= {MAX_TREND_DIM}, got lo = {n_lo}, hi = {n_hi}"
        )));
    }
    (n_lo..=n_hi)
        .map(|n| {
            let e = estimate_volume_m(n, samples_per_n, seed.wrapping_add(n as u64))?;
            Ok(TrendRow {
                n,
                volume: e.volume,
                std_error: e.std_error,
                ratio_root: e.ratio_root,
                ratio_root_lo: e.ratio_root - 3.0 * e.ratio_root_std_error,
                ratio_root_hi: e.ratio_root + 3.0 * e.ratio_root_std_error,
                hits: e.hits,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_in_every_u_n() {
        for n in 2..7 {
            let frame = SimplexFrame::new(n).unwrap();
            assert!(membership_u(&frame, &vec![0.0; n]).unwrap());
        }
    }

    #[test]
    fn golden_section_finds_a_parabola_minimum() {
        let mut g = |t: f64| (t - 0.3) * (t - 0.3);
        let (t, v) = golden_section(&mut g, -2.0, 2.0, 1e-10, f64::NEG_INFINITY);
        assert!((t - 0.3).abs() < 1e-10);
        assert!(v < 1e-20);
    }

    #[test]
    fn estimates_are_deterministic() {
        let a = estimate_volume_m(4, 200_000, 9).unwrap();
        let b = estimate_volume_m(4, 200_000, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.hits, estimate_volume_m(4, 200_000, 10).unwrap().hits);
    }

    #[test]
    fn argument_checks() {
        assert!(estimate_volume_m(1, 10_000, 0).is_err());
        assert!(estimate_volume_m(3, 10, 0).is_err());
        assert!(ratio_trend(3, 2, 1000, 0).is_err());
        assert!(ratio_trend(2, 21, 1000, 0).is_err());
    }

    #[test]
    fn trend_has_one_row_per_dimension() {
        let rows = ratio_trend(2, 6, 20_000, 1).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![2, 3, 4, 5, 6]);
        assert!(rows.iter().all(|r| r.std_error.is_finite() && r.ratio_root_lo < r.ratio_root_hi));
    }
}
