//! Seeded random directions and ball samples.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, stream)`, so work
//! split into batches draws the same numbers whatever the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Generator for batch `stream` of the run seeded with `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fills `out` with a uniformly distributed unit vector.
pub fn unit_vector_into<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut r2 = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            r2 += *v * *v;
        }
        if r2 > 1e-300 {
            let r = r2.sqrt();
            out.iter_mut().for_each(|v| *v /= r);
            return;
        }
    }
}

/// A uniformly distributed unit vector of dimension `n`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    unit_vector_into(rng, &mut v);
    v
}

/// Fills `out` with a point uniform in the ball of the given radius.
pub fn ball_point_into<R: Rng + ?Sized>(rng: &mut R, radius: f64, out: &mut [f64]) {
    unit_vector_into(rng, out);
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / out.len() as f64);
    out.iter_mut().for_each(|v| *v *= r);
}

/// `count` unit directions drawn from one stream.
pub fn directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng(seed, 0);
    (0..count).map(|_| unit_vector(&mut rng, n)).collect()
}
