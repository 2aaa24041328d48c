//! Acceptance run: one PASS/FAIL line per criterion on stdout.
//!
//! Runs without the test harness so the lines show up under a plain
//! `cargo test`. The process fails if a criterion fails that is not in
//! [`KNOWN_FAILURES`], or if a listed one unexpectedly passes.
//!
//! Criterion 6 is listed. Its first half (every coordinate permutation
//! preserves `U₃`) holds, but its second half does not: no odd permutation
//! of the tetrahedron's vertices carries the support function of one
//! Meissner body onto the other. Each body rounds three edges of a triangle
//! or of a vertex star, and an odd permutation preserves that incidence
//! type, so it sends the edge set of A to another edge set of type A. The
//! line is still printed with the measured violation.

use std::time::{Duration, Instant};

use constwidth::mesh::{generate_mesh, mesh_volume};
use constwidth::montecarlo::estimate_volume_ball;
use constwidth::verify::{
    check_case_i_spheres, check_constant_width, check_curvature, check_meissner_swap,
    check_projection_inequality, check_symmetry, CurvatureRegion, PropertyReport,
};
use constwidth::volume::{
    i1_closed, i1_quad, i2_quad, i2_rearranged, j_one_dimensional, j_quad, volume_generic,
    volume_meissner_average, volume_meissner_closed, volume_u3, U3Method, REL_TOL_GENERIC,
};
use constwidth::{BodySpec, CaseRegion, Result};

const KNOWN_FAILURES: &[u32] = &[6];

#[allow(clippy::excessive_precision)]
const U3_RATIO: f64 = 0.802_970_255_149_910_11;
const MEISSNER_RATIO: f64 = 0.801_873_62;
const AVERAGE_RATIO: f64 = 0.803_806_345_386;
const SUITE_SAMPLES: usize = 100_000;
const SEED: u64 = 20_240_601;

type Check = fn() -> Result<Verdict>;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { passed, detail })
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("one-thread pool").install(f)
}

fn worst(reports: &[PropertyReport]) -> (bool, f64, String) {
    let passed = reports.iter().all(|r| r.passed);
    let w = reports
        .iter()
        .max_by(|a, b| (a.max_violation / a.tolerance).total_cmp(&(b.max_violation / b.tolerance)))
        .expect("at least one report");
    (passed, w.max_violation, format!("{} {}", w.property, w.body))
}

fn c1() -> Result<Verdict> {
    let start = Instant::now();
    let report = single_threaded(|| volume_u3(U3Method::Cases))?;
    let elapsed = start.elapsed();
    let err = (report.ratio_to_ball - U3_RATIO).abs();
    verdict(
        err <= 1e-11 && elapsed <= Duration::from_secs(60),
        format!("U3 ratio {:.17} (|diff| {err:.1e}), {elapsed:.2?} on one thread", report.ratio_to_ball),
    )
}

fn c2() -> Result<Verdict> {
    let cases = volume_u3(U3Method::Cases)?.ratio_to_ball;
    let theorem = volume_u3(U3Method::Theorem)?.ratio_to_ball;
    let err = (cases - theorem).abs();
    verdict(err <= 1e-10, format!("closed expression {theorem:.17}, |diff| {err:.1e}"))
}

fn c3() -> Result<Verdict> {
    let d1 = (i1_closed() - i1_quad()?.value).abs();
    let d2 = (i2_quad()?.value - i2_rearranged()?.value).abs();
    let d3 = (j_quad()?.value - j_one_dimensional()?.value).abs();
    verdict(
        d1.max(d2).max(d3) <= 1e-10,
        format!("I1 {d1:.1e}, I2 rearranged {d2:.1e}, one-dimensional rewrite {d3:.1e}"),
    )
}

fn c4() -> Result<Verdict> {
    let meissner = volume_meissner_closed();
    let average = volume_meissner_average()?;
    let u3 = volume_u3(U3Method::Cases)?;
    let dm = (meissner.ratio_to_ball - MEISSNER_RATIO).abs();
    let da = (average.ratio_to_ball - AVERAGE_RATIO).abs();
    let u_excess = u3.volume / meissner.volume - 1.0;
    let avg_excess = average.volume / meissner.volume - 1.0;
    verdict(
        dm <= 1e-8 && da <= 1e-9 && u_excess < 0.00137 && avg_excess > 0.002,
        format!(
            "Meissner {:.12}, average {:.12}, U3/Meissner - 1 = {u_excess:.6}, average/Meissner - 1 = {avg_excess:.6}",
            meissner.ratio_to_ball, average.ratio_to_ball
        ),
    )
}

fn c5() -> Result<Verdict> {
    let mut specs = Vec::new();
    for n in 2..=10 {
        specs.push(BodySpec::m(n)?);
    }
    for n in 2..=8 {
        specs.push(BodySpec::u(n)?);
    }
    specs.extend([BodySpec::meissner_a(), BodySpec::meissner_b(), BodySpec::meissner_average()]);
    let reports =
        specs.iter().map(|s| check_constant_width(s, SUITE_SAMPLES, SEED)).collect::<Result<Vec<_>>>()?;
    let (passed, max, at) = worst(&reports);
    verdict(passed, format!("{} bodies, max violation {max:.1e} ({at})", reports.len()))
}

fn c6() -> Result<Verdict> {
    let sym = check_symmetry(&BodySpec::u3(), SUITE_SAMPLES, SEED)?;
    let swap = check_meissner_swap(SUITE_SAMPLES, SEED)?;
    verdict(
        sym.passed && swap.passed,
        format!(
            "U3 under 24 permutations {:.1e} ({}); odd permutations h_A -> h_B {:.1e} ({})",
            sym.max_violation,
            if sym.passed { "holds" } else { "fails" },
            swap.max_violation,
            if swap.passed { "holds" } else { "fails" },
        ),
    )
}

fn c7() -> Result<Verdict> {
    let samples = 20_000;
    let mut reports = vec![
        check_curvature(&BodySpec::u3(), CurvatureRegion::Case(CaseRegion::I), samples, SEED)?,
        check_curvature(&BodySpec::u3(), CurvatureRegion::Case(CaseRegion::IIb), samples, SEED)?,
        check_curvature(&BodySpec::meissner_a(), CurvatureRegion::Smooth, samples, SEED)?,
        check_curvature(&BodySpec::meissner_b(), CurvatureRegion::Smooth, samples, SEED)?,
    ];
    let spheres = check_case_i_spheres(SUITE_SAMPLES, SEED)?;
    let (curv_ok, max, at) = worst(&reports);
    let detail = format!(
        "min curvature off 0.5 by at most {max:.1e} ({at}); case-I sphere distances {:.1e}",
        spheres.max_violation
    );
    reports.push(spheres);
    verdict(curv_ok && reports.iter().all(|r| r.passed), detail)
}

fn c8() -> Result<Verdict> {
    let start = Instant::now();
    let r = check_projection_inequality(3, 10_000_000, SEED)?;
    let elapsed = start.elapsed();
    verdict(
        r.passed && elapsed <= Duration::from_secs(120),
        format!(
            "Vol(U3) {:.6}, Vol(M4) {:.4} +- {:.4}, {elapsed:.2?}",
            r.statistics["volume_u"], r.statistics["volume_m"], r.statistics["volume_m_std_error"]
        ),
    )
}

fn c9() -> Result<Verdict> {
    let u_generic = volume_generic(BodySpec::u3(), REL_TOL_GENERIC)?.ratio_to_ball;
    let u_cases = volume_u3(U3Method::Cases)?;
    let a_generic = volume_generic(BodySpec::meissner_average(), REL_TOL_GENERIC)?.ratio_to_ball;
    let a_pieces = volume_meissner_average()?.ratio_to_ball;
    let mesh = generate_mesh(&BodySpec::u3(), 7)?;
    let mesh_rel = mesh_volume(&mesh)? / u_cases.volume - 1.0;
    let du = (u_generic - u_cases.ratio_to_ball).abs();
    let da = (a_generic - a_pieces).abs();
    verdict(
        du <= 1e-5 && da <= 1e-5 && mesh_rel.abs() <= 1e-3,
        format!(
            "generic vs dedicated: U3 {du:.1e}, average {da:.1e}; mesh at 7 subdivisions {mesh_rel:+.1e}"
        ),
    )
}

fn c10() -> Result<Verdict> {
    let mut runs = 0;
    let mut covered = 0;
    let mut worst_n = (0, usize::MAX);
    for n in 2..=10 {
        let exact = constwidth::unit_ball_volume(n);
        let mut hits = 0;
        for seed in 0..100 {
            let e = estimate_volume_ball(n, 100_000, seed)?;
            let (lo, hi) = e.bounds(3.0);
            if lo <= exact && exact <= hi {
                hits += 1;
            }
        }
        runs += 100;
        covered += hits;
        if hits < worst_n.1 {
            worst_n = (n, hits);
        }
    }
    let rate = covered as f64 / runs as f64;
    verdict(
        rate >= 0.99,
        format!(
            "{covered}/{runs} runs within 3 sigma ({:.1}%), fewest {}/100 at n = {}",
            100.0 * rate,
            worst_n.1,
            worst_n.0
        ),
    )
}

fn main() {
    let criteria: [(u32, Check); 10] =
        [(1, c1), (2, c2), (3, c3), (4, c4), (5, c5), (6, c6), (7, c7), (8, c8), (9, c9), (10, c10)];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = Vec::new();
    for (k, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &k.to_string()) {
            continue;
        }
        let start = Instant::now();
        let (passed, detail) = match check() {
            Ok(v) => (v.passed, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let known = KNOWN_FAILURES.contains(&k);
        let note = match (passed, known) {
            (false, true) => " [known failure]",
            (true, true) => " [listed as a known failure but passed]",
            _ => "",
        };
        println!(
            "criterion {k:>2}: {} {detail} [{:.1?}]{note}",
            if passed { "PASS" } else { "FAIL" },
            start.elapsed()
        );
        if passed == known {
            unexpected.push(k);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
