use std::f64::consts::PI;

use constwidth::bodies::{
    classify_case, contact_point_m, membership_value, support_m_unit, support_u, support_u3_ab, AbcPoint,
    BodySpec, MEMBERSHIP_BOUND,
};
use constwidth::sampling::{ball_point_into, rng, unit_vector};
use constwidth::verify::check_symmetry;
use nalgebra::Vector3;
use proptest::prelude::*;

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Directions covering the sphere: an angle grid in the plane, a Fibonacci
/// lattice in space.
fn covering_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => unreachable!(),
    }
}

#[test]
fn membership_and_support_describe_the_same_body() {
    for n in [2, 3] {
        let dirs = covering_directions(n, if n == 2 { 4000 } else { 20_000 });
        let h: Vec<f64> = dirs.iter().map(|t| support_m_unit(t)).collect();
        let mut r = rng(11, n as u64);
        let mut x = vec![0.0; n];
        let (mut inside, mut outside) = (0, 0);
        for _ in 0..3000 {
            ball_point_into(&mut r, 2f64.sqrt(), &mut x);
            let v = membership_value(&x);
            let gap = dirs.iter().zip(&h).map(|(t, h)| dot(&x, t) - h).fold(f64::NEG_INFINITY, f64::max);
            if v <= MEMBERSHIP_BOUND {
                inside += 1;
                assert!(gap <= 1e-12, "member {x:?} is separated by {gap}");
            } else if v > 4.2 {
                outside += 1;
                assert!(gap > 0.0, "non-member {x:?} is not separated");
            }
        }
        assert!(inside > 300 && outside > 300, "{inside} {outside}");
    }
}

#[test]
fn contact_points_attain_the_support() {
    let mut r = rng(12, 0);
    for n in 2..8 {
        for _ in 0..500 {
            let t = unit_vector(&mut r, n);
            let x = contact_point_m(&t);
            assert!(membership_value(&x) <= 4.0 * (1.0 + 1e-12));
            assert!((dot(&x, &t) - support_m_unit(&t)).abs() < 1e-13);
        }
    }
}

#[test]
fn u3_chart_support_agrees_with_the_projection_of_m4() {
    let mut r = rng(13, 0);
    for _ in 0..20_000 {
        let t = unit_vector(&mut r, 3);
        let p = AbcPoint::new(t[0], t[1], t[2]).unwrap();
        let chart = support_u3_ab(&p).unwrap();
        let projected = support_u(3, &t).unwrap();
        assert!((chart - projected).abs() < 1e-14, "{t:?}: {chart} vs {projected}");
    }
}

/// Tangent-line polygon of a planar support function: vertices are the
/// intersections of consecutive support lines. Returns area and perimeter.
fn tangent_polygon(h: impl Fn(&[f64]) -> f64, count: usize) -> (f64, f64) {
    let dirs = covering_directions(2, count);
    let hs: Vec<f64> = dirs.iter().map(|d| h(d)).collect();
    let pts: Vec<[f64; 2]> = (0..count)
        .map(|k| {
            let (u, v) = (&dirs[k], &dirs[(k + 1) % count]);
            let (hu, hv) = (hs[k], hs[(k + 1) % count]);
            let det = u[0] * v[1] - u[1] * v[0];
            [(hu * v[1] - hv * u[1]) / det, (u[0] * hv - v[0] * hu) / det]
        })
        .collect();
    let mut area = 0.0;
    let mut perimeter = 0.0;
    for k in 0..count {
        let (p, q) = (pts[k], pts[(k + 1) % count]);
        area += p[0] * q[1] - q[0] * p[1];
        perimeter += ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
    }
    (area / 2.0, perimeter)
}

#[test]
fn u2_is_the_reuleaux_triangle() {
    let (area, perimeter) = tangent_polygon(|t| support_u(2, t).unwrap(), 200_000);
    assert!((area - 2.0 * (PI - 3f64.sqrt())).abs() < 1e-6, "{area}");
    // Barbier: every body of width w has perimeter πw.
    assert!((perimeter - 2.0 * PI).abs() < 1e-6);
}

#[test]
fn m2_lies_between_the_reuleaux_triangle_and_the_disk() {
    let (area, perimeter) = tangent_polygon(support_m_unit, 200_000);
    assert!((perimeter - 2.0 * PI).abs() < 1e-6);
    assert!(2.0 * (PI - 3f64.sqrt()) < area && area < PI);
    let mc = constwidth::montecarlo::estimate_volume_m(2, 1_000_000, 5).unwrap();
    assert!((mc.volume - area).abs() < 3.0 * mc.std_error, "{} vs {area}", mc.volume);
}

#[test]
fn u3_support_is_continuous_across_case_boundaries() {
    let mut r = rng(14, 0);
    let mut crossings = 0;
    for _ in 0..2000 {
        let p = Vector3::from_column_slice(&unit_vector(&mut r, 3));
        let q = Vector3::from_column_slice(&unit_vector(&mut r, 3));
        let case = |v: &Vector3<f64>| classify_case(&AbcPoint::from_vector(&v.normalize()));
        if case(&p) == case(&q) || (p + q).norm() < 0.1 {
            continue;
        }
        let (mut lo, mut hi) = (p, q);
        while (hi - lo).norm() > 1e-13 {
            let mid = (lo + hi) / 2.0;
            if case(&mid) == case(&p) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = |v: &Vector3<f64>| support_u3_ab(&AbcPoint::from_vector(&v.normalize())).unwrap();
        assert!((h(&lo) - h(&hi)).abs() < 1e-11, "jump at {lo:?}");
        crossings += 1;
    }
    assert!(crossings > 1000);
}

#[test]
fn higher_u_n_keep_the_simplex_symmetry() {
    for n in [4, 5, 6] {
        let report = check_symmetry(&BodySpec::u(n).unwrap(), 5_000, 3).unwrap();
        assert!(report.passed, "{report:?}");
    }
}

proptest! {
    #[test]
    fn m_n_support_lies_between_zero_and_two(v in prop::collection::vec(-1.0f64..1.0, 2..12)) {
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(r > 1e-3);
        let t: Vec<f64> = v.iter().map(|x| x / r).collect();
        let h = support_m_unit(&t);
        prop_assert!((0.0..=2.0f64.sqrt() + 1e-15).contains(&h));
        let anti: Vec<f64> = t.iter().map(|x| -x).collect();
        prop_assert!((h + support_m_unit(&anti) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn support_is_positively_homogeneous(v in prop::collection::vec(-1.0f64..1.0, 3), s in 0.01f64..100.0) {
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(r > 1e-3);
        let body = BodySpec::u3().body();
        let x: Vec<f64> = v.iter().map(|x| x * s).collect();
        let a = body.support_homogeneous(&x).unwrap();
        let b = s * body.support_homogeneous(&v).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0));
    }
}
