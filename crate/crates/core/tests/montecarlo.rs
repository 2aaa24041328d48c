use std::f64::consts::PI;

use constwidth::bodies::{membership_value, SimplexFrame, MEMBERSHIP_BOUND};
use constwidth::montecarlo::{
    estimate_volume_ball, estimate_volume_u, membership_u, ratio_trend, SAMPLING_RADIUS,
};
use constwidth::sampling::{ball_point_into, rng};
use constwidth::unit_ball_volume;
use constwidth::volume::{volume_u3, U3Method};

/// `min_t g(t)` on a grid of step `1e-3` over `[−4, 4]`.
fn grid_minimum(frame: &SimplexFrame, y: &[f64]) -> f64 {
    let x0 = frame.to_ambient(y);
    let step = 1.0 / (x0.len() as f64).sqrt();
    (0..=8000)
        .map(|k| {
            let t = -4.0 + k as f64 * 1e-3;
            let x: Vec<f64> = x0.iter().map(|v| v + t * step).collect();
            membership_value(&x)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn line_search_agrees_with_a_grid_scan() {
    let frame = SimplexFrame::new(3).unwrap();
    let mut r = rng(41, 0);
    let mut y = vec![0.0; 3];
    let (mut agree, mut near) = (0, 0);
    for _ in 0..10_000 {
        ball_point_into(&mut r, SAMPLING_RADIUS, &mut y);
        let grid = grid_minimum(&frame, &y);
        let search = membership_u(&frame, &y).unwrap();
        if (grid - MEMBERSHIP_BOUND).abs() < 1e-4 {
            near += 1;
            continue;
        }
        assert_eq!(search, grid <= MEMBERSHIP_BOUND, "{y:?}: grid minimum {grid}");
        agree += 1;
    }
    assert!(near < 50, "{near} points too close to call");
    assert!(agree > 9900);
}

#[test]
fn ball_control_is_recovered() {
    for n in 2..=8 {
        // 4σ here; the 3σ coverage rate is an acceptance criterion.
        for seed in 0..5 {
            let e = estimate_volume_ball(n, 200_000, seed).unwrap();
            let (lo, hi) = e.bounds(4.0);
            assert!(lo <= unit_ball_volume(n) && unit_ball_volume(n) <= hi, "n = {n}, seed {seed}");
        }
    }
}

#[test]
fn u2_estimate_matches_the_reuleaux_area() {
    let e = estimate_volume_u(2, 1_000_000, 7).unwrap();
    let exact = 2.0 * (PI - 3f64.sqrt());
    assert!((e.volume - exact).abs() < 3.0 * e.std_error, "{} vs {exact}", e.volume);
}

#[test]
fn u3_estimate_matches_quadrature() {
    let e = estimate_volume_u(3, 1_000_000, 8).unwrap();
    let exact = volume_u3(U3Method::Cases).unwrap().volume;
    assert!((e.volume - exact).abs() < 3.0 * e.std_error, "{} vs {exact}", e.volume);
}

#[test]
fn trend_starts_below_one_and_decreases() {
    let rows = ratio_trend(2, 8, 400_000, 3).unwrap();
    assert!(rows[0].ratio_root_hi > rows[0].ratio_root && rows[0].ratio_root < 1.0);
    assert!(rows.windows(2).take(3).all(|w| w[1].ratio_root < w[0].ratio_root));
    assert!(rows.iter().all(|r| r.ratio_root_lo > 0.8 && r.ratio_root_hi < 1.0));
}
