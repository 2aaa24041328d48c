mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use constwidth::mesh::{
    check_watertight, export_mesh, generate_mesh, mesh_volume, patch_census, MeshFormat, PatchCensus,
};
use constwidth::montecarlo::{estimate_volume_ball, estimate_volume_m, estimate_volume_u, ratio_trend};
use constwidth::verify::{
    check_case_i_spheres, check_constant_width, check_convexity, check_curvature, check_meissner_swap,
    check_projection_inequality, check_symmetry, CurvatureRegion, PropertyReport,
};
use constwidth::volume::{
    volume_generic, volume_meissner_average, volume_meissner_closed, volume_u3, U3Method, VolumeReport,
    REL_TOL_GENERIC,
};
use constwidth::{unit_ball_volume, BodySpec, CaseRegion, Error};

use output::{float, timestamp_unix, to_json, Envelope, ErrorObject, TOOL, VERSION};

/// Bodies of constant width 2: volumes, property checks, Monte Carlo
/// estimates and meshes.
#[derive(Parser, Serialize)]
#[command(name = "constwidth", version)]
struct Cli {
    /// Worker threads; 0 or unset uses all available cores.
    #[arg(long, global = true, env = "CONSTWIDTH_THREADS")]
    threads: Option<usize>,

    /// Write the JSON or CSV output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Volume of a three-dimensional body by quadrature.
    Volume {
        #[arg(long, value_enum)]
        body: VolumeBody,
        /// Defaults to `cases` for u3, `closed` for meissner, `pieces` for
        /// meissner-avg.
        #[arg(long, value_enum)]
        method: Option<VolumeMethod>,
        /// Relative tolerance of the generic method.
        #[arg(long, default_value_t = REL_TOL_GENERIC)]
        rel_tol: f64,
    },
    /// Numerical property suite; exits 1 if any report fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, value_enum, default_value = "u3")]
        body: BodyArg,
        /// Dimension for m, u and ball; for the sandwich suite, the `n` of
        /// `U_n`.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Curvature region: I, IIb or smooth. Defaults to both smooth
        /// cases of u3, or `smooth` for the other bodies.
        #[arg(long)]
        region: Option<String>,
        /// Sample count; accepts `1e5`. The default depends on the suite.
        #[arg(long, value_parser = parse_count)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo volume estimate.
    Mc {
        #[arg(long, value_enum)]
        body: McBody,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_parser = parse_count, default_value = "1000000")]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CSV table of `(Vol(M_n)/Vol(B^n))^(1/n)` with 3σ bounds.
    Trend {
        #[arg(long, default_value_t = 2)]
        lo: usize,
        #[arg(long, default_value_t = 14)]
        hi: usize,
        /// Samples per dimension.
        #[arg(long, value_parser = parse_count, default_value = "1000000")]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Boundary mesh of a three-dimensional body.
    Mesh {
        #[arg(long, value_enum)]
        body: MeshBody,
        #[arg(long, default_value_t = 6)]
        subdiv: u32,
        #[arg(long, value_enum, default_value = "obj")]
        format: FormatArg,
        /// Mesh file; without it only the summary is produced.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VolumeBody {
    U3,
    #[value(alias = "meissner-a")]
    Meissner,
    MeissnerB,
    MeissnerAvg,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VolumeMethod {
    Cases,
    Theorem,
    Generic,
    Closed,
    Pieces,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Suite {
    Width,
    Symmetry,
    Convexity,
    Curvature,
    Sandwich,
    /// Odd permutations against the other Meissner body.
    Swap,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BodyArg {
    M,
    U,
    U3,
    MeissnerA,
    MeissnerB,
    MeissnerAvg,
    Ball,
    CorruptedDemo,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum McBody {
    M,
    U,
    Ball,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MeshBody {
    U3,
    MeissnerA,
    MeissnerB,
    MeissnerAvg,
    Ball,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FormatArg {
    Obj,
    Ply,
}

/// Integer counts, also written as `1e7` or `2.5e6`.
fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= 9.007_199_254_740_992e15 => Ok(x as usize),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

impl BodyArg {
    fn spec(self, dim: usize) -> constwidth::Result<BodySpec> {
        Ok(match self {
            BodyArg::M => BodySpec::m(dim)?,
            BodyArg::U => BodySpec::u(dim)?,
            BodyArg::Ball => BodySpec::ball(dim)?,
            BodyArg::U3 => BodySpec::u3(),
            BodyArg::MeissnerA => BodySpec::meissner_a(),
            BodyArg::MeissnerB => BodySpec::meissner_b(),
            BodyArg::MeissnerAvg => BodySpec::meissner_average(),
            BodyArg::CorruptedDemo => BodySpec::corrupted_demo(),
        })
    }
}

impl MeshBody {
    fn spec(self) -> BodySpec {
        match self {
            MeshBody::U3 => BodySpec::u3(),
            MeshBody::MeissnerA => BodySpec::meissner_a(),
            MeshBody::MeissnerB => BodySpec::meissner_b(),
            MeshBody::MeissnerAvg => BodySpec::meissner_average(),
            MeshBody::Ball => BodySpec::ball(3).expect("3 is a valid dimension"),
        }
    }
}

/// What a command produced: a JSON payload or a finished CSV document,
/// and whether every property held.
enum Outcome {
    Json(serde_json::Value, bool),
    Csv(String),
}

#[derive(Serialize)]
struct MeshSummary {
    body: BodySpec,
    subdivisions: u32,
    vertices: usize,
    triangles: usize,
    mesh_volume: f64,
    ratio_to_ball: f64,
    /// Only for `U_3`, whose triangles carry case labels.
    #[serde(skip_serializing_if = "Option::is_none")]
    census: Option<PatchCensus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<FormatArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<PathBuf>,
}

fn usage(message: impl Into<String>) -> Error {
    Error::InvalidArgument(message.into())
}

fn json<T: Serialize>(value: &T, passed: bool) -> Outcome {
    Outcome::Json(serde_json::to_value(value).expect("reports serialize"), passed)
}

fn run_volume(
    body: VolumeBody,
    method: Option<VolumeMethod>,
    rel_tol: f64,
) -> constwidth::Result<VolumeReport> {
    use VolumeMethod::*;
    match (body, method) {
        (VolumeBody::U3, None | Some(Cases)) => volume_u3(U3Method::Cases),
        (VolumeBody::U3, Some(Theorem)) => volume_u3(U3Method::Theorem),
        (VolumeBody::U3, Some(Generic)) => volume_generic(BodySpec::u3(), rel_tol),
        (VolumeBody::Meissner | VolumeBody::MeissnerB, None | Some(Closed)) => {
            let mut report = volume_meissner_closed();
            if let VolumeBody::MeissnerB = body {
                report.body = BodySpec::meissner_b();
            }
            Ok(report)
        }
        (VolumeBody::Meissner, Some(Generic)) => volume_generic(BodySpec::meissner_a(), rel_tol),
        (VolumeBody::MeissnerB, Some(Generic)) => volume_generic(BodySpec::meissner_b(), rel_tol),
        (VolumeBody::MeissnerAvg, None | Some(Pieces)) => volume_meissner_average(),
        (VolumeBody::MeissnerAvg, Some(Generic)) => volume_generic(BodySpec::meissner_average(), rel_tol),
        (_, Some(m)) => Err(usage(format!(
            "method `{}` is not available for this body",
            m.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
        ))),
    }
}

fn run_verify(
    suite: Suite,
    body: BodyArg,
    dim: usize,
    region: Option<&str>,
    samples: Option<usize>,
    seed: u64,
) -> constwidth::Result<Vec<PropertyReport>> {
    let default_samples = match suite {
        Suite::Curvature => 20_000,
        Suite::Sandwich => 10_000_000,
        _ => 100_000,
    };
    let samples = samples.unwrap_or(default_samples);
    match suite {
        Suite::Sandwich => {
            if !matches!(body, BodyArg::U | BodyArg::U3) {
                return Err(usage("the sandwich suite compares U_n with M_(n+1); use --body u --dim n"));
            }
            let n = if let BodyArg::U3 = body { 3 } else { dim };
            return Ok(vec![check_projection_inequality(n, samples, seed)?]);
        }
        Suite::Swap => return Ok(vec![check_meissner_swap(samples, seed)?]),
        _ => {}
    }
    let spec = body.spec(dim)?;
    match suite {
        Suite::Width => Ok(vec![check_constant_width(&spec, samples, seed)?]),
        Suite::Symmetry => Ok(vec![check_symmetry(&spec, samples, seed)?]),
        Suite::Convexity => Ok(vec![check_convexity(&spec, samples, seed)?]),
        Suite::Curvature => {
            let regions: Vec<CurvatureRegion> = match region {
                Some(r) => vec![r.parse()?],
                None if spec.is_u3() => {
                    vec![CurvatureRegion::Case(CaseRegion::I), CurvatureRegion::Case(CaseRegion::IIb)]
                }
                None => vec![CurvatureRegion::Smooth],
            };
            let mut reports = regions
                .into_iter()
                .map(|r| check_curvature(&spec, r, samples, seed))
                .collect::<constwidth::Result<Vec<_>>>()?;
            let wants_case_i = region.is_none() || region.is_some_and(|r| r == "I");
            if spec.is_u3() && wants_case_i {
                reports.push(check_case_i_spheres(samples, seed)?);
            }
            Ok(reports)
        }
        Suite::Sandwich | Suite::Swap => unreachable!("handled above"),
    }
}

fn run_mesh(
    body: MeshBody,
    subdiv: u32,
    format: FormatArg,
    out: Option<&PathBuf>,
) -> constwidth::Result<MeshSummary> {
    let spec = body.spec();
    let mesh = generate_mesh(&spec, subdiv)?;
    check_watertight(&mesh)?;
    let volume = mesh_volume(&mesh)?;
    if let Some(path) = out {
        let f = match format {
            FormatArg::Obj => MeshFormat::Obj,
            FormatArg::Ply => MeshFormat::Ply,
        };
        export_mesh(&mesh, f, path)?;
    }
    Ok(MeshSummary {
        body: spec,
        subdivisions: subdiv,
        vertices: mesh.vertices.len(),
        triangles: mesh.triangles.len(),
        mesh_volume: volume,
        ratio_to_ball: volume / unit_ball_volume(3),
        census: spec.is_u3().then(|| patch_census(&mesh)),
        format: out.map(|_| format),
        path: out.cloned(),
    })
}

fn trend_csv(cli: &Cli, lo: usize, hi: usize, samples: usize, seed: u64) -> constwidth::Result<String> {
    let rows = ratio_trend(lo, hi, samples, seed)?;
    let config = serde_json::to_string(cli).expect("config serializes");
    let mut s = format!("# {TOOL} {VERSION}\n# config: {config}\n# timestamp_unix: {}\n", timestamp_unix());
    s.push_str("n,volume,std_error,ratio_root,ratio_root_lo,ratio_root_hi,hits\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            float(r.volume),
            float(r.std_error),
            float(r.ratio_root),
            float(r.ratio_root_lo),
            float(r.ratio_root_hi),
            r.hits
        ));
    }
    Ok(s)
}

fn run(cli: &Cli) -> constwidth::Result<Outcome> {
    match &cli.command {
        Command::Volume { body, method, rel_tol } => Ok(json(&run_volume(*body, *method, *rel_tol)?, true)),
        Command::Verify { suite, body, dim, region, samples, seed } => {
            let reports = run_verify(*suite, *body, *dim, region.as_deref(), *samples, *seed)?;
            let passed = reports.iter().all(|r| r.passed);
            Ok(json(&reports, passed))
        }
        Command::Mc { body, dim, samples, seed } => {
            let est = match body {
                McBody::M => estimate_volume_m(*dim, *samples, *seed)?,
                McBody::U => estimate_volume_u(*dim, *samples, *seed)?,
                McBody::Ball => estimate_volume_ball(*dim, *samples, *seed)?,
            };
            Ok(json(&est, true))
        }
        Command::Trend { lo, hi, samples, seed } => {
            Ok(Outcome::Csv(trend_csv(cli, *lo, *hi, *samples, *seed)?))
        }
        Command::Mesh { body, subdiv, format, out } => {
            Ok(json(&run_mesh(*body, *subdiv, *format, out.as_ref())?, true))
        }
    }
}

/// Exit code and error kind for a library error.
fn classify(err: &Error) -> (u8, &'static str) {
    match err {
        Error::NoConvergence { .. }
        | Error::BudgetExceeded { .. }
        | Error::MinimizerAtBoundary { .. }
        | Error::OnPieceBoundary { .. } => (3, "numerical"),
        Error::DimensionMismatch { .. }
        | Error::InvalidDimension { .. }
        | Error::NotUnit { .. }
        | Error::OutsideChart { .. }
        | Error::UnsupportedBody(_)
        | Error::InvalidArgument(_) => (2, "usage"),
        Error::NotWatertight(_) => (1, "assertion"),
        Error::Parse { .. } | Error::Io(_) => (1, "io"),
    }
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn envelope<T: Serialize>(cli: &Cli, result: Option<T>, error: Option<ErrorObject>) -> String {
    to_json(&Envelope {
        tool: TOOL,
        version: VERSION,
        timestamp_unix: timestamp_unix(),
        config: cli,
        result,
        error,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let (text, code) = match run(&cli) {
        Ok(Outcome::Json(value, passed)) => (envelope(&cli, Some(value), None), if passed { 0 } else { 1 }),
        Ok(Outcome::Csv(csv)) => (csv, 0),
        Err(err) => {
            let (code, kind) = classify(&err);
            eprintln!("error: {err}");
            let object = ErrorObject { kind, message: err.to_string() };
            (envelope::<()>(&cli, None, Some(object)), code)
        }
    };
    if let Err(e) = emit(&cli, &text) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
