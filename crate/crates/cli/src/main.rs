//! Command-line front end: tabulation, verification, volumes, meshes and
//! surface samples.
//!
//! Exit status: 0 on success, 1 when a verification gate fails or a
//! computation breaks down, 2 for usage errors.

mod config;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use archimedean::array::{equizonal_enclosed_volume, SphericalArray};
use archimedean::mesh::{graph_slice_mesh, profile_csv, profile_curve, revolve_mesh};
use archimedean::numfmt::{format_17, to_json_string};
use archimedean::scaling::ScalingFunction;
use archimedean::special::QuadratureSpec;
use archimedean::verify::{
    app_integral_check, app_residual_check, app_statistical_test_with, random_regions, sample_surface, ExpectedMeasure,
    StatisticalConfig,
};
use archimedean::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use config::{merge, required};

/// JSON schema version of every report.
const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "archimedean", version, about = "Archimedean spherical arrays")]
struct Cli {
    /// Worker threads (outputs do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON file of flag values; flags on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CSV of M_k by quadrature and in closed form.
    MkTable(MkTableArgs),
    /// Profile curve (x, f_k(x)) as CSV.
    Scaling(ScalingArgs),
    /// Check the projection property; exits 1 if a gate fails.
    Verify(VerifyArgs),
    /// Total (and optionally enclosed) volume against closed forms.
    Volume(VolumeArgs),
    /// OBJ mesh of a three-dimensional realization or slice.
    Mesh(MeshArgs),
    /// CSV of uniformly sampled surface points.
    Sample(SampleArgs),
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct MkTableArgs {
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ScalingArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum VerifyMode {
    Residual,
    Integral,
    Statistical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Measure {
    Base,
    Surface,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct VerifyArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<VerifyMode>,
    /// Random regions (integral and statistical modes).
    #[arg(long)]
    regions: Option<usize>,
    /// Points (residual mode) or surface samples (statistical mode).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Gate tolerance (residual: absolute, integral: relative).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Measure predicting the hit fractions in statistical mode.
    #[arg(long, value_enum)]
    expected: Option<Measure>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct VolumeArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    /// Also compute the enclosed n-volume.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    enclosed: bool,
    /// Monte Carlo samples for the enclosed-volume cross-check.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct MeshArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    res: Option<usize>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct SampleArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Gate,
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Parse(_) | Error::Unsupported(_) | Error::OutsideBase(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Gate) => ExitCode::from(1),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let file = match &cli.config {
        Some(path) => Some(config::load(path).map_err(Failure::Usage)?),
        None => None,
    };
    let threads = match (cli.threads, &file) {
        (Some(t), _) => Some(t),
        (None, Some(f)) => config::threads(f).map_err(Failure::Usage)?,
        (None, None) => None,
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let file = file.as_ref();
    match cli.command {
        Command::MkTable(a) => mk_table(merge(a, file).map_err(Failure::Usage)?),
        Command::Scaling(a) => scaling(merge(a, file).map_err(Failure::Usage)?),
        Command::Verify(a) => verify(merge(a, file).map_err(Failure::Usage)?),
        Command::Volume(a) => volume(merge(a, file).map_err(Failure::Usage)?),
        Command::Mesh(a) => mesh(merge(a, file).map_err(Failure::Usage)?),
        Command::Sample(a) => sample(merge(a, file).map_err(Failure::Usage)?),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn emit_json<T: Serialize>(command: &str, body: T) -> Outcome {
    let text = to_json_string(&Envelope { schema: SCHEMA, command, body })?;
    emit(None, &text)
}

fn array(n: Option<usize>, k: Option<usize>, r: Option<f64>) -> std::result::Result<SphericalArray, Failure> {
    let n = required(n, "n")?;
    let k = required(k, "k")?;
    Ok(SphericalArray::archimedean(n, k, r.unwrap_or(1.0))?)
}

fn mk_table(a: MkTableArgs) -> Outcome {
    let (lo, hi) = (a.k_min.unwrap_or(2), a.k_max.unwrap_or(12));
    if lo < 2 || hi < lo {
        return Err(Failure::Usage(format!("need 2 ≤ k-min ≤ k-max, got {lo} and {hi}")));
    }
    let spec = QuadratureSpec::default();
    let mut text = String::from("k,m_k_quadrature,m_k_closed_form,abs_diff\n");
    for k in lo..=hi {
        let s = ScalingFunction::new(k, &spec)?;
        let (q, c) = (s.m_k(), s.m_k_closed_form());
        text.push_str(&format!("{k},{},{},{}\n", format_17(q), format_17(c), format_17((q - c).abs())));
    }
    emit(a.out.as_deref(), &text)
}

fn scaling(a: ScalingArgs) -> Outcome {
    let k = required(a.k, "k")?;
    let s = ScalingFunction::new(k, &QuadratureSpec::default())?;
    let points = profile_curve(&s, a.samples.unwrap_or(257))?;
    emit(a.out.as_deref(), &profile_csv(&points))
}

#[derive(Serialize)]
struct VerifyOutput<T: Serialize> {
    mode: VerifyMode,
    n: usize,
    k: usize,
    r: f64,
    passed: bool,
    report: T,
}

fn verify(a: VerifyArgs) -> Outcome {
    let h = array(a.n, a.k, a.r)?;
    let mode = required(a.mode, "mode")?;
    let seed = a.seed.unwrap_or(0);
    let spec = QuadratureSpec::default();
    let regions = || random_regions(h.base(), a.regions.unwrap_or(20), seed);
    let (n, k, r) = (h.n(), h.k(), h.r_scale());
    let passed = match mode {
        VerifyMode::Residual => {
            let report = app_residual_check(&h, a.samples.unwrap_or(10_000), a.tolerance.unwrap_or(1e-8))?;
            let passed = report.passed;
            emit_json("verify", VerifyOutput { mode, n, k, r, passed, report })?;
            passed
        }
        VerifyMode::Integral => {
            let report = app_integral_check(&h, &regions()?, a.tolerance.unwrap_or(1e-6), &spec)?;
            let passed = report.passed;
            emit_json("verify", VerifyOutput { mode, n, k, r, passed, report })?;
            passed
        }
        VerifyMode::Statistical => {
            if a.tolerance.is_some() {
                return Err(Failure::Usage("--tolerance does not apply to statistical mode".into()));
            }
            let mut config = StatisticalConfig::new(a.samples.unwrap_or(1_000_000), seed);
            if a.expected == Some(Measure::Surface) {
                config.expected = ExpectedMeasure::Surface;
            }
            let report = app_statistical_test_with(&h, &regions()?, &config)?;
            let passed = report.passed;
            emit_json("verify", VerifyOutput { mode, n, k, r, passed, report })?;
            passed
        }
    };
    if passed {
        Ok(())
    } else {
        Err(Failure::Gate)
    }
}

#[derive(Serialize)]
struct VolumeOutput {
    n: usize,
    k: usize,
    r: f64,
    numeric: f64,
    quadrature_error: f64,
    closed_form: f64,
    factorized: f64,
    relative_difference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    enclosed: Option<EnclosedOutput>,
}

#[derive(Serialize)]
struct EnclosedOutput {
    numeric: f64,
    quadrature_error: f64,
    monte_carlo: f64,
    monte_carlo_std_error: f64,
    monte_carlo_samples: usize,
    closed_form: Option<f64>,
    relative_difference: Option<f64>,
}

fn volume(a: VolumeArgs) -> Outcome {
    let h = array(a.n, a.k, a.r)?;
    let spec = QuadratureSpec::default();
    let t = h.total_volume(&spec)?;
    let closed = t.closed_form.expect("canonical array");
    let enclosed = if a.enclosed {
        let e = h.enclosed_volume(a.samples.unwrap_or(1_000_000), a.seed.unwrap_or(0), &spec)?;
        let closed_form = if h.k() == h.n() - 1 { Some(equizonal_enclosed_volume(h.n(), h.r_scale())?) } else { None };
        Some(EnclosedOutput {
            numeric: e.value,
            quadrature_error: e.error,
            monte_carlo: e.mc_value,
            monte_carlo_std_error: e.mc_std_error,
            monte_carlo_samples: e.mc_samples,
            closed_form,
            relative_difference: closed_form.map(|c| ((e.value - c) / c).abs()),
        })
    } else {
        None
    };
    emit_json(
        "volume",
        VolumeOutput {
            n: h.n(),
            k: h.k(),
            r: h.r_scale(),
            numeric: t.numeric.value,
            quadrature_error: t.numeric.error,
            closed_form: closed,
            factorized: t.factorized.expect("canonical array"),
            relative_difference: ((t.numeric.value - closed) / closed).abs(),
            enclosed,
        },
    )
}

#[derive(Serialize)]
struct MeshOutput<'a> {
    n: usize,
    k: usize,
    r: f64,
    res: usize,
    out: Option<&'a Path>,
    vertices: usize,
    triangles: usize,
    area: f64,
    watertight: bool,
    euler_characteristic: i64,
}

fn mesh(a: MeshArgs) -> Outcome {
    let h = array(a.n, a.k, a.r)?;
    let res = a.res.unwrap_or(64);
    let m = if h.n() == 3 {
        revolve_mesh(&h, res, res)?
    } else if h.n() - h.k() == 2 {
        graph_slice_mesh(&h, res)?
    } else {
        return Err(Failure::Usage("mesh needs n = 3 or n - k = 2".into()));
    };
    let Some(out) = a.out.as_deref() else {
        return emit(None, &m.to_obj_string());
    };
    m.write_obj(io::BufWriter::new(fs::File::create(out)?))?;
    emit_json(
        "mesh",
        MeshOutput {
            n: h.n(),
            k: h.k(),
            r: h.r_scale(),
            res,
            out: Some(out),
            vertices: m.vertices.len(),
            triangles: m.triangles.len(),
            area: m.area(),
            watertight: m.is_watertight(),
            euler_characteristic: m.euler_characteristic(),
        },
    )
}

fn sample(a: SampleArgs) -> Outcome {
    let h = array(a.n, a.k, a.r)?;
    let s = sample_surface(&h, a.count.unwrap_or(1000), a.seed.unwrap_or(0))?;
    let header: Vec<String> = (1..=h.n()).map(|i| format!("x{i}")).collect();
    let mut text = header.join(",");
    text.push('\n');
    for p in s.points() {
        let row: Vec<String> = p.iter().map(|v| format_17(*v)).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    emit(a.out.as_deref(), &text)
}
