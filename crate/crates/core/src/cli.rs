//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 diagram is not
//! cohomogeneity one, 3 solver failure, 4 verdict differs from `--expect`
//! (or a `verify` check failed), 5 malformed input file.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagrams::{catalog_entries, DiagramId};
use crate::eigen::{basic_spectrum, Eigenvalue, MAX_MODES};
use crate::error::Error;
use crate::geometry::{mean_curvature, orbit_profile, Connection, MetricSpec, Side};
use crate::lab::{
    compare_with_tolerance, default_scales, inequality_audit, transport_audit, verify_diagram, warp_break,
    COMPARE_TOL_FLOOR,
};

pub const SCHEMA: u32 = 1;
const DEFAULT_VERIFY_TOL: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(name = "bsl", version, about = "Basic Laplace spectra across star diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the catalogued diagrams.
    Catalog(Output),
    /// Extrapolated basic spectrum of one side.
    Spectrum(SpectrumArgs),
    /// Compare the basic spectra of M and M'.
    Compare(CompareArgs),
    /// Vertical warping runs over a list of scales.
    Warp(WarpArgs),
    /// Check the two actions of a diagram and transport of invariant functions.
    Verify(VerifyArgs),
    /// Orbit-volume profile with mean curvature.
    Profile(ProfileArgs),
    /// Plot series from a report or profile.
    Plotdata(PlotArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct MetricArgs {
    #[arg(long)]
    diagram: String,
    /// Connection for trivial-s2.
    #[arg(long, value_enum, default_value = "standard")]
    connection: ConnectionArg,
    #[arg(long, default_value_t = 512)]
    grid: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long, default_value = "M")]
    side: String,
    #[arg(long, default_value_t = 5)]
    modes: usize,
    /// Report the zero eigenvalue of the constants as well.
    #[arg(long)]
    include_zero: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct CompareArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long, default_value_t = 5)]
    modes: usize,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum)]
    expect: Option<Expect>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct WarpArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long, default_value_t = 3)]
    modes: usize,
    /// Comma-separated warp scales; defaults to 2^-4 … 2^4.
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    expect: Option<Expect>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    diagram: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ProfileArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long, default_value = "M")]
    side: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct PlotArgs {
    /// A JSON report or profile written by this tool, or a `t,w,h` CSV.
    input: PathBuf,
    /// Also write a standalone SVG line chart here.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Expect {
    Isospectral,
    Distinct,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum ConnectionArg {
    Standard,
    Flat,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NotCohomogeneityOne(_) => 2,
            Error::ConvergenceFailure(_) | Error::NonpositiveWeight { .. } | Error::ZeroVector => 3,
            Error::Malformed(_) | Error::Json(_) => 5,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the tool with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn configure_threads() {
    if let Some(n) = std::env::var("BSL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Catalog(o) => cmd_catalog(&o, stdout),
        Command::Spectrum(a) => cmd_spectrum(&a, stdout),
        Command::Compare(a) => cmd_compare(&a, stdout),
        Command::Warp(a) => cmd_warp(&a, stdout),
        Command::Verify(a) => cmd_verify(&a, stdout),
        Command::Profile(a) => cmd_profile(&a, stdout),
        Command::Plotdata(a) => cmd_plotdata(&a, stdout),
    }
}

fn parse_diagram(s: &str) -> CliResult<DiagramId> {
    Ok(s.parse::<DiagramId>()?)
}

fn check_grid(n: usize) -> CliResult<()> {
    if n < 64 || !n.is_power_of_two() {
        return Err(invalid(format!("--grid must be a power of two ≥ 64 (got {n})")));
    }
    Ok(())
}

fn check_modes(k: usize, n: usize) -> CliResult<()> {
    if k == 0 || k > MAX_MODES || k >= n {
        return Err(invalid(format!("--modes must be in 1..={MAX_MODES} (got {k})")));
    }
    Ok(())
}

fn metric(a: &MetricArgs) -> CliResult<MetricSpec> {
    check_grid(a.grid)?;
    let id = parse_diagram(&a.diagram)?;
    let m = MetricSpec::default_for(id)?;
    Ok(match a.connection {
        ConnectionArg::Standard => m,
        ConnectionArg::Flat if id == DiagramId::TrivialS2 => m.with_connection(Connection::Flat),
        ConnectionArg::Flat => return Err(invalid("--connection flat applies to trivial-s2 only")),
    })
}

fn envelope(command: &str, config: &impl Serialize, seed: u64, tolerances: Value, result: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "tool": "bsl",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "seed": seed,
        "tolerances": tolerances,
        "result": result,
    })
}

fn to_value(v: &impl Serialize) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| invalid(e.to_string()))
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()).map_err(|e| invalid(e.to_string())),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e: std::io::Error| invalid(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn cmd_catalog(o: &Output, stdout: &mut dyn Write) -> CliResult<i32> {
    let entries = catalog_entries();
    let text = match o.format.unwrap_or(Format::Text) {
        Format::Json => pretty(&envelope("catalog", o, 0, json!({}), to_value(&entries)?)),
        Format::Csv => {
            let mut s = String::from("id,group,total_space,M,M',cohomogeneity_one,spectra\n");
            for e in &entries {
                let _ = writeln!(
                    s,
                    "{},{:?},{},{},{},{},{}",
                    e.id,
                    e.group,
                    e.total_space,
                    e.quotient_m,
                    e.quotient_m_prime,
                    e.cohomogeneity_one,
                    if e.cohomogeneity_one { "supported" } else { "unsupported" }
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for e in &entries {
                let flag = if e.cohomogeneity_one { "cohomogeneity one" } else { "spectra unsupported" };
                let _ = writeln!(s, "{:<11} {:<6} {} -> {} / {}  [{flag}]", e.id.as_str(), format!("{:?}", e.group), e.total_space, e.quotient_m, e.quotient_m_prime);
                let _ = writeln!(s, "            {}", e.description);
            }
            s
        }
    };
    emit(o.out.as_deref(), &text, stdout)?;
    Ok(0)
}

fn cmd_spectrum(a: &SpectrumArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let m = metric(&a.metric)?;
    check_modes(a.modes, a.metric.grid)?;
    let side = Side::parse(&a.side)?;
    let s = basic_spectrum(&m, side, a.metric.grid, a.modes)?;
    let mut values = s.values.clone();
    if a.include_zero {
        values.insert(0, Eigenvalue { lambda: 0.0, mult: 1, err: 0.0 });
    }
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut result = to_value(&s)?;
            result["values"] = to_value(&values)?;
            let tol = json!({
                "bisection_relative": crate::eigen::BISECTION_TOL,
                "multiplicity_gap": "max(1e-8, 1e-6*lambda)",
            });
            pretty(&envelope("spectrum", a, a.seed, tol, result))
        }
        Format::Csv => {
            let mut out = String::from("index,lambda,mult,err\n");
            for (i, v) in values.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{}", i + usize::from(!a.include_zero), v.lambda, v.mult, v.err);
            }
            out
        }
        Format::Text => {
            let mut out = format!("{} side {} (n = {}, {})\n", m.diagram, side.as_str(), s.n, 2 * s.n);
            for v in &values {
                let _ = writeln!(out, "{:>18.10}  ±{:.1e}  x{}", v.lambda, v.err, v.mult);
            }
            out
        }
    };
    emit(a.output.out.as_deref(), &text, stdout)?;
    Ok(0)
}

fn expect_code(expect: Option<Expect>, isospectral: bool) -> i32 {
    match expect {
        Some(Expect::Isospectral) if !isospectral => 4,
        Some(Expect::Distinct) if isospectral => 4,
        _ => 0,
    }
}

fn cmd_compare(a: &CompareArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let m = metric(&a.metric)?;
    check_modes(a.modes, a.metric.grid)?;
    let r = compare_with_tolerance(m.diagram, &m, a.modes, a.metric.grid, a.tolerance)?;
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let tol = json!({
                "isospectral": r.tolerance,
                "default_rule": format!("max({COMPARE_TOL_FLOOR:e}, 3*combined relative error)"),
                "multiplicity_gap": "max(1e-8, 1e-6*lambda)",
            });
            pretty(&envelope("compare", a, a.seed, tol, to_value(&r)?))
        }
        Format::Csv => r.to_csv(),
        Format::Text => {
            let mut out = String::new();
            for p in &r.pairs {
                let _ = writeln!(out, "{:>3} {:>18.10} {:>18.10} {:.2e}", p.index, p.lambda_m, p.lambda_m_prime, p.relgap);
            }
            let _ = writeln!(out, "max relative gap {:.3e} (tolerance {:.3e}): isospectral = {}", r.max_relative_gap, r.tolerance, r.isospectral);
            out
        }
    };
    emit(a.output.out.as_deref(), &text, stdout)?;
    Ok(expect_code(a.expect, r.isospectral))
}

fn cmd_warp(a: &WarpArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let m = metric(&a.metric)?;
    check_modes(a.modes, a.metric.grid)?;
    let mut scales = a.scales.clone().unwrap_or_else(default_scales);
    if scales.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(invalid("--scales must be finite and non-negative"));
    }
    // the unwarped control always runs first
    if !scales.contains(&0.0) {
        scales.insert(0, 0.0);
    }
    let reports = warp_break(m.diagram, &m, &scales, a.modes, a.metric.grid)?;
    let audits: Vec<_> = reports.iter().map(inequality_audit).collect();
    let broke = reports.iter().any(|r| r.broke_isospectrality);
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let result = json!({
                "diagram": m.diagram,
                "fingerprint": m.fingerprint(),
                "reports": reports,
                "audits": audits,
                "any_broke_isospectrality": broke,
            });
            let tol = json!({ "break_factor": crate::lab::BREAK_FACTOR });
            pretty(&envelope("warp", a, a.seed, tol, result))
        }
        Format::Csv => {
            let mut out = String::from("scale,lambda1_unwarped,lambda1_warped,err_unwarped,err_warped,lhs,rhs,broke\n");
            for r in &reports {
                let rhs = r.rhs.map(|v| v.to_string()).unwrap_or_else(|| "undefined".into());
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.scale, r.lambda1_unwarped, r.lambda1_warped, r.err_unwarped, r.err_warped, r.lhs, rhs, r.broke_isospectrality
                );
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in &reports {
                let _ = writeln!(out, "c = {:<8} λ₁ {:.10} -> {:.10}  broke = {}", r.scale, r.lambda1_unwarped, r.lambda1_warped, r.broke_isospectrality);
            }
            out
        }
    };
    emit(a.output.out.as_deref(), &text, stdout)?;
    Ok(expect_code(a.expect, !broke))
}

fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let id = parse_diagram(&a.diagram)?;
    if a.samples == 0 {
        return Err(invalid("--samples must be positive"));
    }
    let tol = a.tolerance.unwrap_or(DEFAULT_VERIFY_TOL);
    let actions = verify_diagram(id, a.samples, a.seed);
    let transport = transport_audit(id, a.samples, a.seed)?;
    let checks = [
        actions.commute_residual,
        actions.membership_bullet,
        actions.membership_star,
        actions.projection_bullet,
        actions.projection_star,
        transport.additive,
        transport.multiplicative,
        transport.involution,
        transport.unit,
    ];
    let verified = actions.bullet_free && checks.iter().all(|c| *c <= tol);
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let result = json!({ "actions": actions, "transport": transport, "verified": verified });
            pretty(&envelope("verify", a, a.seed, json!({ "residual": tol }), result))
        }
        Format::Csv => {
            let mut out = String::from("check,value\n");
            let rows = [
                ("commute", actions.commute_residual),
                ("membership_bullet", actions.membership_bullet),
                ("membership_star", actions.membership_star),
                ("projection_bullet", actions.projection_bullet),
                ("projection_star", actions.projection_star),
                ("freeness_violations", actions.freeness_violations as f64),
                ("transport_additive", transport.additive),
                ("transport_multiplicative", transport.multiplicative),
                ("transport_involution", transport.involution),
            ];
            for (k, v) in rows {
                let _ = writeln!(out, "{k},{v}");
            }
            out
        }
        Format::Text => format!(
            "{id}: commute {:.2e}, membership {:.2e}/{:.2e}, bullet-free {} ({} points), transport {:.2e}: verified = {verified}\n",
            actions.commute_residual,
            actions.membership_bullet,
            actions.membership_star,
            actions.bullet_free,
            actions.freeness_points,
            transport.involution.max(transport.multiplicative),
        ),
    };
    emit(a.output.out.as_deref(), &text, stdout)?;
    Ok(if verified { 0 } else { 4 })
}

fn cmd_profile(a: &ProfileArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let m = metric(&a.metric)?;
    let side = Side::parse(&a.side)?;
    let p = orbit_profile(&m, side, a.metric.grid)?;
    let mut result = to_value(&p)?;
    result["h"] = to_value(&mean_curvature(&p))?;
    let doc = envelope("profile", a, 0, json!({}), result);
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Json => emit(a.output.out.as_deref(), &pretty(&doc), stdout)?,
        Format::Csv | Format::Text => {
            emit(a.output.out.as_deref(), &p.to_csv(), stdout)?;
            if let Some(out) = &a.output.out {
                // metadata sidecar next to the CSV
                let mut meta = doc;
                for key in ["t", "w", "w_face", "h"] {
                    meta["result"].as_object_mut().expect("object").remove(key);
                }
                write_atomic(&sidecar(out), pretty(&meta).as_bytes())?;
            }
        }
    }
    Ok(0)
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// A named series of `(x, y)` points.
struct Series {
    csv: String,
    x_label: String,
    y_label: String,
    points: Vec<(f64, f64)>,
}

fn malformed(msg: impl Into<String>) -> Failure {
    Failure { code: 5, message: format!("malformed input: {}", msg.into()) }
}

fn series_from_json(v: &Value) -> CliResult<Series> {
    let command = v["command"].as_str().ok_or_else(|| malformed("missing `command`"))?;
    let result = &v["result"];
    let nums = |key: &str, from: &Value| -> CliResult<Vec<f64>> {
        from[key]
            .as_array()
            .ok_or_else(|| malformed(format!("missing `{key}`")))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| malformed(format!("non-numeric `{key}`"))))
            .collect()
    };
    match command {
        "profile" => {
            let (t, w, h) = (nums("t", result)?, nums("w", result)?, nums("h", result)?);
            if t.len() != w.len() || t.len() != h.len() {
                return Err(malformed("profile columns differ in length"));
            }
            let mut csv = String::from("t,w,h\n");
            for i in 0..t.len() {
                let _ = writeln!(csv, "{},{},{}", t[i], w[i], h[i]);
            }
            Ok(Series { csv, x_label: "t".into(), y_label: "w".into(), points: t.into_iter().zip(w).collect() })
        }
        "compare" => {
            let pairs = result["pairs"].as_array().ok_or_else(|| malformed("missing `pairs`"))?;
            let mut csv = String::from("index,lambda_M,lambda_Mprime,relgap\n");
            let mut points = Vec::new();
            for p in pairs {
                let get = |k: &str| p[k].as_f64().ok_or_else(|| malformed(format!("missing `{k}`")));
                let (i, a, b, g) = (get("index")?, get("lambda_m")?, get("lambda_m_prime")?, get("relgap")?);
                let _ = writeln!(csv, "{i},{a},{b},{g}");
                points.push((a, b));
            }
            Ok(Series { csv, x_label: "lambda(M)".into(), y_label: "lambda(M')".into(), points })
        }
        "spectrum" => {
            let values = result["values"].as_array().ok_or_else(|| malformed("missing `values`"))?;
            let mut csv = String::from("index,lambda\n");
            let mut points = Vec::new();
            for (i, v) in values.iter().enumerate() {
                let l = v["lambda"].as_f64().ok_or_else(|| malformed("missing `lambda`"))?;
                let _ = writeln!(csv, "{},{l}", i + 1);
                points.push(((i + 1) as f64, l));
            }
            Ok(Series { csv, x_label: "index".into(), y_label: "lambda".into(), points })
        }
        "warp" => {
            let reports = result["reports"].as_array().ok_or_else(|| malformed("missing `reports`"))?;
            let mut csv = String::from("scale,lambda1_warped\n");
            let mut points = Vec::new();
            for r in reports {
                let c = r["scale"].as_f64().ok_or_else(|| malformed("missing `scale`"))?;
                let l = r["lambda1_warped"].as_f64().ok_or_else(|| malformed("missing `lambda1_warped`"))?;
                let _ = writeln!(csv, "{c},{l}");
                points.push((c, l));
            }
            Ok(Series { csv, x_label: "scale".into(), y_label: "lambda1".into(), points })
        }
        other => Err(malformed(format!("no plot series for `{other}` output"))),
    }
}

fn series_from_csv(text: &str) -> CliResult<Series> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| malformed("empty file"))?;
    if header.trim() != "t,w,h" {
        return Err(malformed(format!("unexpected CSV header `{header}`")));
    }
    let mut points = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| malformed(format!("line {}", i + 2)))?;
        if cols.len() != 3 {
            return Err(malformed(format!("line {} has {} columns", i + 2, cols.len())));
        }
        points.push((cols[0], cols[1]));
    }
    Ok(Series { csv: text.to_string(), x_label: "t".into(), y_label: "w".into(), points })
}

fn cmd_plotdata(a: &PlotArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| malformed(format!("{}: {e}", a.input.display())))?;
    let series = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
        if v["schema"].as_u64() != Some(SCHEMA as u64) {
            return Err(malformed("unsupported schema"));
        }
        series_from_json(&v)?
    } else {
        series_from_csv(&text)?
    };
    if series.points.is_empty() {
        return Err(malformed("no data points"));
    }
    emit(a.out.as_deref(), &series.csv, stdout)?;
    if let Some(path) = &a.svg {
        write_atomic(path, svg_chart(&series).as_bytes())?;
    }
    Ok(0)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;").replace('\'', "&apos;")
}

fn svg_chart(s: &Series) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let xs = s.points.iter().map(|p| p.0);
    let ys = s.points.iter().map(|p| p.1);
    let (x0, x1) = (xs.clone().fold(f64::MAX, f64::min), xs.fold(f64::MIN, f64::max));
    let (y0, y1) = (ys.clone().fold(f64::MAX, f64::min), ys.fold(f64::MIN, f64::max));
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let px = |x: f64| pad + (x - x0) / span(x0, x1) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y - y0) / span(y0, y1) * (h - 2.0 * pad);
    let mut path = String::new();
    for (x, y) in &s.points {
        let _ = write!(path, "{:.2},{:.2} ", px(*x), py(*y));
    }
    format!(
        concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            "  <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "  <line x1=\"{pad}\" y1=\"{yb}\" x2=\"{xr}\" y2=\"{yb}\" stroke=\"black\"/>\n",
            "  <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{yb}\" stroke=\"black\"/>\n",
            "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"{path}\"/>\n",
            "  <text x=\"{xm}\" y=\"{xl}\" text-anchor=\"middle\" font-size=\"12\">{xlab}</text>\n",
            "  <text x=\"12\" y=\"{ym}\" font-size=\"12\" transform=\"rotate(-90 12 {ym})\" text-anchor=\"middle\">{ylab}</text>\n",
            "  <text x=\"{pad}\" y=\"{xl}\" font-size=\"10\">{x0:.4}</text>\n",
            "  <text x=\"{xr}\" y=\"{xl}\" font-size=\"10\" text-anchor=\"end\">{x1:.4}</text>\n",
            "  <text x=\"{lt}\" y=\"{yb}\" font-size=\"10\" text-anchor=\"end\">{y0:.4}</text>\n",
            "  <text x=\"{lt}\" y=\"{pad}\" font-size=\"10\" text-anchor=\"end\">{y1:.4}</text>\n",
            "</svg>\n"
        ),
        w = w,
        h = h,
        pad = pad,
        yb = h - pad,
        xr = w - pad,
        xm = w / 2.0,
        xl = h - pad / 2.0,
        ym = h / 2.0,
        lt = pad - 4.0,
        path = path.trim_end(),
        xlab = escape(&s.x_label),
        ylab = escape(&s.y_label),
        x0 = x0,
        x1 = x1,
        y0 = y0,
        y1 = y1,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["bsl"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn catalog_lists_three_entries() {
        let (code, out, _) = run_capture(&["catalog"]);
        assert_eq!(code, 0);
        for id in ["trivial-s2", "hopf", "gm"] {
            assert!(out.contains(id));
        }
        assert!(out.contains("spectra unsupported"));
        let (_, json, _) = run_capture(&["catalog", "--format", "json"]);
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["result"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn config_errors_exit_one() {
        assert_eq!(run_capture(&["spectrum", "--diagram", "hopf", "--grid", "100"]).0, 1);
        assert_eq!(run_capture(&["spectrum", "--diagram", "hopf", "--modes", "65"]).0, 1);
        assert_eq!(run_capture(&["spectrum", "--diagram", "nope"]).0, 1);
        assert_eq!(run_capture(&["bogus"]).0, 1);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn gm_spectrum_exits_two() {
        let (code, _, err) = run_capture(&["spectrum", "--diagram", "gm"]);
        assert_eq!(code, 2);
        assert!(err.contains("not cohomogeneity one"));
    }

    #[test]
    fn svg_escapes_labels() {
        let s = Series { csv: String::new(), x_label: "a<b".into(), y_label: "λ & μ".into(), points: vec![(0.0, 1.0), (1.0, 2.0)] };
        let svg = svg_chart(&s);
        assert!(svg.contains("a&lt;b") && svg.contains("λ &amp; μ"));
    }
}
