//! One- and two-dimensional quadrature with error estimates.
//!
//! Smooth integrands go through globally adaptive 21-point Gauss–Kronrod.
//! When the caller flags an endpoint as singular the whole interval is
//! handled by tanh-sinh instead. Integrands see an [`Abscissa`], which
//! carries the distances to both endpoints computed without cancellation;
//! an integrand like `1/√(hi − x)` should use `from_hi` rather than
//! `hi - x`, since `x` itself rounds to `hi` long before the double
//! exponential clustering is exhausted.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on integrand evaluations per integral.
pub const DEFAULT_BUDGET: usize = 10_000_000;

const EPS: f64 = f64::EPSILON;
const TS_MAX_LEVEL: u32 = 12;
const TS_T_MAX: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// A quadrature node with its offsets from the interval ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    /// `x − lo`, accurate even when `x` rounds to `lo`.
    pub from_lo: f64,
    /// `hi − x`, accurate even when `x` rounds to `hi`.
    pub from_hi: f64,
}

/// Which interval ends carry an integrable singularity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Endpoints {
    pub lo: bool,
    pub hi: bool,
}

impl Endpoints {
    pub const NONE: Self = Self { lo: false, hi: false };
    pub const LO: Self = Self { lo: true, hi: false };
    pub const HI: Self = Self { lo: false, hi: true };
    pub const BOTH: Self = Self { lo: true, hi: true };

    fn any(self) -> bool {
        self.lo || self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    /// Absolute error accepted regardless of `rel_tol`.
    pub abs_tol: f64,
    pub budget: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 0.0, budget: DEFAULT_BUDGET }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    fn target(&self, value: f64, l1: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol).max(50.0 * EPS * l1)
    }
}

/// Integrates a smooth `f` over `[lo, hi]` by adaptive Gauss–Kronrod.
///
/// ```
/// use constwidth::quadrature::integrate_1d;
///
/// let r = integrate_1d(|x| x.exp(), 0.0, 1.0, 1e-12).unwrap();
/// assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-14);
/// ```
pub fn integrate_1d<F>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_1d_with(|p: Abscissa| f(p.x), lo, hi, Endpoints::NONE, &QuadOptions::with_rel_tol(rel_tol))
}

/// Integrates `f` over `[lo, hi]`, switching to tanh-sinh when either end
/// is flagged singular.
///
/// ```
/// use constwidth::quadrature::{integrate_1d_with, Endpoints, QuadOptions};
/// use std::f64::consts::FRAC_PI_2;
///
/// // 1/√(1 − x²) written with the exact offset from the upper end.
/// let r = integrate_1d_with(
///     |p| 1.0 / (p.from_hi * (1.0 + p.x)).sqrt(),
///     0.0,
///     1.0,
///     Endpoints::HI,
///     &QuadOptions::default(),
/// )
/// .unwrap();
/// assert!((r.value - FRAC_PI_2).abs() < 1e-12);
/// ```
pub fn integrate_1d_with<F>(
    f: F,
    lo: f64,
    hi: f64,
    ends: Endpoints,
    opts: &QuadOptions,
) -> Result<QuadratureResult>
where
    F: Fn(Abscissa) -> f64 + Sync,
{
    let g = |p: Abscissa| Ok((f(p), 1));
    integrate_counted(&g, lo, hi, ends, opts, false)
}

/// A region `b_lo ≤ b ≤ b_hi`, `a_lo(b) ≤ a ≤ a_hi(b)` integrated in `a`
/// first.
pub struct IntegrationRegion2D<'a> {
    pub b_lo: f64,
    pub b_hi: f64,
    pub a_lo: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    pub a_hi: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    /// Singular ends of the inner `a` interval.
    pub inner: Endpoints,
    /// Singular ends of the outer `b` interval.
    pub outer: Endpoints,
}

impl<'a> IntegrationRegion2D<'a> {
    pub fn new(
        b_lo: f64,
        b_hi: f64,
        a_lo: impl Fn(f64) -> f64 + Sync + 'a,
        a_hi: impl Fn(f64) -> f64 + Sync + 'a,
    ) -> Self {
        Self {
            b_lo,
            b_hi,
            a_lo: Box::new(a_lo),
            a_hi: Box::new(a_hi),
            inner: Endpoints::NONE,
            outer: Endpoints::NONE,
        }
    }

    pub fn inner_singular(mut self, ends: Endpoints) -> Self {
        self.inner = ends;
        self
    }

    pub fn outer_singular(mut self, ends: Endpoints) -> Self {
        self.outer = ends;
        self
    }
}

/// Iterated integral of `f(a, b)` over `region`; the inner abscissa
/// carries offsets from `a_lo(b)` and `a_hi(b)`.
///
/// Outer nodes are evaluated in parallel and summed in a fixed order, so
/// the result does not depend on the number of threads.
///
/// ```
/// use constwidth::quadrature::{integrate_2d, IntegrationRegion2D, QuadOptions};
///
/// let triangle = IntegrationRegion2D::new(0.0, 1.0, |_| 0.0, |b| b);
/// let r = integrate_2d(|_, _| 1.0, &triangle, &QuadOptions::default()).unwrap();
/// assert!((r.value - 0.5).abs() < 1e-15);
/// ```
pub fn integrate_2d<F>(f: F, region: &IntegrationRegion2D<'_>, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(Abscissa, f64) -> f64 + Sync,
{
    // Inner integrals run a little tighter so their errors do not swamp
    // the outer estimate.
    let inner_opts =
        QuadOptions { rel_tol: opts.rel_tol * 0.1, abs_tol: opts.abs_tol * 0.1, budget: opts.budget };
    let outer = |pb: Abscissa| -> Result<(f64, usize)> {
        let b = pb.x;
        let lo = (region.a_lo)(b);
        let hi = (region.a_hi)(b);
        if hi <= lo {
            return Ok((0.0, 0));
        }
        let g = |pa: Abscissa| Ok((f(pa, b), 1));
        let r = integrate_counted(&g, lo, hi, region.inner, &inner_opts, false)?;
        Ok((r.value, r.evaluations))
    };
    integrate_counted(&outer, region.b_lo, region.b_hi, region.outer, opts, true)
}

type Counted<'a> = dyn Fn(Abscissa) -> Result<(f64, usize)> + Sync + 'a;

fn integrate_counted(
    f: &Counted<'_>,
    lo: f64,
    hi: f64,
    ends: Endpoints,
    opts: &QuadOptions,
    parallel: bool,
) -> Result<QuadratureResult> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "integration interval [{lo}, {hi}] is not a finite ordered pair"
        )));
    }
    if lo == hi {
        return Ok(QuadratureResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0 });
    }
    if ends.any() {
        tanh_sinh(f, lo, hi, opts, parallel)
    } else {
        gauss_kronrod(f, lo, hi, opts, parallel)
    }
}

fn eval_batch(f: &Counted<'_>, nodes: &[Abscissa], parallel: bool) -> Result<(Vec<f64>, usize)> {
    let results: Vec<Result<(f64, usize)>> = if parallel {
        nodes.par_iter().map(|&p| f(p)).collect()
    } else {
        nodes.iter().map(|&p| f(p)).collect()
    };
    let mut values = Vec::with_capacity(nodes.len());
    let mut count = 0;
    for r in results {
        let (v, c) = r?;
        values.push(v);
        count += c.max(1);
    }
    Ok((values, count))
}

// 21-point Kronrod nodes and weights with the embedded 10-point Gauss
// weights (odd Kronrod nodes are the Gauss nodes).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_034_110_793,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    l1: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first, ties by position for determinism.
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

fn kronrod_segment(
    f: &Counted<'_>,
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
    parallel: bool,
) -> Result<(Segment, usize)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let off_lo = a - lo;
    let off_hi = hi - b;
    let mut nodes = Vec::with_capacity(21);
    for &xk in &XGK[..10] {
        let d = half * xk;
        nodes.push(Abscissa {
            x: center - d,
            from_lo: off_lo + half * (1.0 - xk),
            from_hi: off_hi + half * (1.0 + xk),
        });
        nodes.push(Abscissa {
            x: center + d,
            from_lo: off_lo + half * (1.0 + xk),
            from_hi: off_hi + half * (1.0 - xk),
        });
    }
    nodes.push(Abscissa { x: center, from_lo: off_lo + half, from_hi: off_hi + half });
    let (v, count) = eval_batch(f, &nodes, parallel)?;
    let fc = v[20];
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = WGK[10] * fc.abs();
    for j in 0..10 {
        let (f1, f2) = (v[2 * j], v[2 * j + 1]);
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((v[2 * j] - mean).abs() + (v[2 * j + 1] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * EPS) {
        error = error.max(50.0 * EPS * resabs);
    }
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::InvalidArgument(format!("integrand is not finite on [{a}, {b}]")));
    }
    Ok((Segment { a, b, value, error, l1: resabs }, count))
}

fn gauss_kronrod(
    f: &Counted<'_>,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
    parallel: bool,
) -> Result<QuadratureResult> {
    let (first, mut evaluations) = kronrod_segment(f, lo, hi, lo, hi, parallel)?;
    let mut heap = BinaryHeap::new();
    let (mut value, mut error, mut l1) = (first.value, first.error, first.l1);
    heap.push(first);
    loop {
        if error <= opts.target(value, l1) {
            break;
        }
        if evaluations > opts.budget {
            return Err(Error::BudgetExceeded { budget: opts.budget, best: value });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            return Err(Error::NoConvergence { best: value, abs_error: error, evaluations });
        }
        let (left, c1) = kronrod_segment(f, lo, hi, worst.a, mid, parallel)?;
        let (right, c2) = kronrod_segment(f, lo, hi, mid, worst.b, parallel)?;
        evaluations += c1 + c2;
        heap.push(worst);
        heap.pop();
        heap.push(left);
        heap.push(right);
        // Resum rather than update incrementally so the totals do not
        // drift.
        let mut segs: Vec<&Segment> = heap.iter().collect();
        segs.sort_by(|x, y| x.a.total_cmp(&y.a));
        value = segs.iter().map(|s| s.value).sum();
        error = segs.iter().map(|s| s.error).sum();
        l1 = segs.iter().map(|s| s.l1).sum();
    }
    Ok(QuadratureResult { value, abs_error_estimate: error, evaluations })
}

/// Node of the tanh-sinh rule at parameter `t` on `[lo, hi]`, with the
/// weight factor `dx/dt`.
fn ts_node(lo: f64, hi: f64, t: f64) -> (Abscissa, f64) {
    let half = 0.5 * (hi - lo);
    let u = std::f64::consts::FRAC_PI_2 * t.sinh();
    let e = (-2.0 * u.abs()).exp();
    // 1 − tanh|u| and 1 + tanh|u| without cancellation.
    let small = 2.0 * e / (1.0 + e);
    let large = 2.0 / (1.0 + e);
    let (to_lo, to_hi) = if u >= 0.0 { (large, small) } else { (small, large) };
    let from_lo = half * to_lo;
    let from_hi = half * to_hi;
    let x = if u >= 0.0 { hi - from_hi } else { lo + from_lo };
    let sech = 2.0 * e.sqrt() / (1.0 + e);
    let w = half * std::f64::consts::FRAC_PI_2 * t.cosh() * sech * sech;
    (Abscissa { x, from_lo, from_hi }, w)
}

fn tanh_sinh(
    f: &Counted<'_>,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
    parallel: bool,
) -> Result<QuadratureResult> {
    let mut evaluations = 0;
    let mut sum = 0.0;
    let mut sum_abs = 0.0;
    let mut prev = f64::NAN;
    let mut estimate = f64::NAN;
    let mut error = f64::INFINITY;
    for level in 0..=TS_MAX_LEVEL {
        let h = 0.5f64.powi(level as i32);
        let (start, step) = if level == 0 { (0usize, 1usize) } else { (1, 2) };
        let count = (TS_T_MAX / h).floor() as usize;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut k = start;
        while k <= count {
            let t = k as f64 * h;
            for s in if k == 0 { &[1.0][..] } else { &[1.0, -1.0][..] } {
                let (p, w) = ts_node(lo, hi, s * t);
                if p.from_lo > 0.0 && p.from_hi > 0.0 && w > 0.0 {
                    nodes.push(p);
                    weights.push(w);
                }
            }
            k += step;
        }
        let (values, c) = eval_batch(f, &nodes, parallel)?;
        evaluations += c;
        for (v, w) in values.iter().zip(&weights) {
            let term = v * w;
            if !term.is_finite() {
                return Err(Error::InvalidArgument("integrand is not finite at a tanh-sinh node".into()));
            }
            sum += term;
            sum_abs += term.abs();
        }
        estimate = sum * h;
        if level >= 3 {
            error = (estimate - prev).abs();
            if error <= opts.target(estimate, sum_abs * h) {
                return Ok(QuadratureResult { value: estimate, abs_error_estimate: error, evaluations });
            }
        }
        if evaluations > opts.budget {
            return Err(Error::BudgetExceeded { budget: opts.budget, best: estimate });
        }
        prev = estimate;
    }
    Err(Error::NoConvergence { best: estimate, abs_error: error, evaluations })
}
