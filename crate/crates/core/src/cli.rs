//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::elliptical::{sample_x_with, SampleOptions};
use crate::error::Error;
use crate::matalg::{eig_hermitian, HermitianMatrix};
use crate::quadform::{
    PartialRow, PearsonSign, QuadFormFile, QuadFormModel, SeriesPath, SplittingConvention,
};
use crate::special::{jack_c, AlgebraKind, Partition, SeriesControl, SeriesResult};
use crate::verify::{
    builtin_suite, discrepancies, parse_suite, render_table, run_suite, RunOptions, SuiteReport,
    BUILTIN_SUITES,
};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ellipquad",
    version,
    about = "Density and characteristic-function series for W = X* A X with X matrix-variate elliptical"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Algebra dimension: 1, 2, 4 or 8; must agree with input files.
    #[arg(long, global = true, value_parser = parse_beta)]
    pub beta: Option<AlgebraKind>,
    #[arg(long, global = true, default_value_t = 40)]
    pub max_degree: usize,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub rel_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub abs_tol: f64,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::RankR)]
    pub convention: ConventionArg,
    /// Pearson VII derivatives with the printed (unsigned) coefficients.
    #[arg(long, global = true)]
    pub paper_printed_signs: bool,
    /// Write the machine-readable result here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    RankR,
    FullM,
    FullN,
}

impl From<ConventionArg> for SplittingConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::RankR => SplittingConvention::RankR,
            ConventionArg::FullM => SplittingConvention::FullM,
            ConventionArg::FullN => SplittingConvention::FullN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Fast,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    X,
    W,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate C_kappa at a spectrum or at the eigenvalues of a Hermitian matrix.
    Jack {
        #[arg(long, value_parser = parse_partition)]
        kappa: Partition,
        /// Comma-separated eigenvalues.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            conflicts_with = "matrix"
        )]
        eigs: Option<Vec<f64>>,
        /// JSON file holding a Hermitian matrix.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Density of W at one or more PD matrices.
    Density {
        /// Model JSON: {family, a, theta, sigma}.
        #[arg(long)]
        model: PathBuf,
        /// JSON file holding a matrix or a list of matrices.
        #[arg(long)]
        w: PathBuf,
        #[arg(long, value_enum, default_value_t = PathArg::Fast)]
        path: PathArg,
        /// Print the per-degree partial sums instead of the result.
        #[arg(long)]
        table: bool,
    },
    /// Characteristic function of W at one or more Hermitian matrices.
    Cf {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        s: PathBuf,
        #[arg(long, value_enum, default_value_t = PathArg::Fast)]
        path: PathArg,
        #[arg(long)]
        table: bool,
    },
    /// Draw X (or W = X* A X) as JSON lines.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Emit::X)]
        emit: Emit,
        #[arg(long)]
        antithetic: bool,
    },
    /// Run a verification suite (built-in name or JSON config file).
    Check {
        #[arg(long, default_value = "default")]
        suite: String,
        /// Record wall time per check (reports are then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Print the table of printed-versus-derived discrepancies.
    Report {
        /// Attach verdicts from a saved suite report.
        #[arg(long, conflicts_with = "run_suite")]
        suite_report: Option<PathBuf>,
        /// Run this suite first and attach its verdicts.
        #[arg(long)]
        run_suite: Option<String>,
    },
}

fn parse_beta(s: &str) -> Result<AlgebraKind, String> {
    let b: u32 = s.parse().map_err(|_| format!("'{s}' is not an integer"))?;
    AlgebraKind::new(b).map_err(|e| e.to_string())
}

fn parse_partition(s: &str) -> Result<Partition, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Usage problems exit 1; numerical and domain problems exit 3.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e)
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e}");
            EXIT_NUMERICAL
        }
    }
}

fn dispatch(cli: &Cli) -> Run<i32> {
    let g = &cli.global;
    let ctrl =
        SeriesControl::new(g.max_degree, g.rel_tol, g.abs_tol).map_err(|e| usage(e.to_string()))?;
    match &cli.command {
        Command::Jack {
            kappa,
            eigs,
            matrix,
        } => cmd_jack(g, kappa, eigs.as_deref(), matrix.as_deref()),
        Command::Density {
            model,
            w,
            path,
            table,
        } => cmd_series(g, &ctrl, Kind::Density, model, w, *path, *table),
        Command::Cf {
            model,
            s,
            path,
            table,
        } => cmd_series(g, &ctrl, Kind::Cf, model, s, *path, *table),
        Command::Sample {
            model,
            count,
            emit,
            antithetic,
        } => cmd_sample(g, model, *count, *emit, *antithetic),
        Command::Check { suite, timings } => cmd_check(g, &ctrl, suite, *timings),
        Command::Report {
            suite_report,
            run_suite,
        } => cmd_report(g, &ctrl, suite_report.as_deref(), run_suite.as_deref()),
    }
}

/// Shortest round-trip rendering shared by JSON and CSV.
fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| "null".into())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut l = fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",");
    l.push('\n');
    l
}

fn to_json<T: Serialize>(v: &T) -> Run<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

/// Writes the artifact to --out (default JSON), to stdout when only --format is given,
/// and prints `human` otherwise.
fn emit(
    g: &GlobalOpts,
    human: &str,
    json: impl FnOnce() -> Run<String>,
    csv: impl FnOnce() -> Run<String>,
) -> Run<()> {
    let machine = |f: Format| match f {
        Format::Json => json(),
        Format::Csv => csv(),
    };
    match (&g.out, g.format) {
        (Some(path), f) => {
            let body = machine(f.unwrap_or(Format::Json))?;
            fs::write(path, body)
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            print!("{human}");
        }
        (None, Some(f)) => print!("{}", machine(f)?),
        (None, None) => print!("{human}"),
    }
    Ok(())
}

fn read(path: &Path) -> Run<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn check_beta(g: &GlobalOpts, found: AlgebraKind, what: &str) -> Run<()> {
    match g.beta {
        Some(b) if b != found => Err(usage(format!(
            "--beta {b} disagrees with {what} (beta = {found})"
        ))),
        _ => Ok(()),
    }
}

fn read_matrices(path: &Path) -> Run<Vec<HermitianMatrix>> {
    let text = read(path)?;
    let bad = |e: serde_json::Error| usage(format!("{}: {e}", path.display()));
    let v: Value = serde_json::from_str(&text).map_err(bad)?;
    if v.is_array() {
        serde_json::from_value(v).map_err(bad)
    } else {
        Ok(vec![serde_json::from_value(v).map_err(bad)?])
    }
}

fn read_model(g: &GlobalOpts, path: &Path) -> Run<QuadFormModel> {
    let text = read(path)?;
    let file: QuadFormFile =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    check_beta(g, file.a.beta(), "the model file")?;
    let sign = if g.paper_printed_signs {
        PearsonSign::Unsigned
    } else {
        PearsonSign::Analytic
    };
    Ok(QuadFormModel::from_file(file, g.convention.into())?.with_sign(sign))
}

#[derive(Serialize)]
struct JackOut<'a> {
    kappa: &'a Partition,
    beta: u32,
    eigenvalues: &'a [f64],
    value: f64,
}

fn cmd_jack(
    g: &GlobalOpts,
    kappa: &Partition,
    eigs: Option<&[f64]>,
    matrix: Option<&Path>,
) -> Run<i32> {
    let (beta, eigs) = match (eigs, matrix) {
        (Some(e), None) => (g.beta.unwrap_or(AlgebraKind::REAL), e.to_vec()),
        (None, Some(p)) => {
            let mut ms = read_matrices(p)?;
            if ms.len() != 1 {
                return Err(usage("--matrix must hold a single matrix"));
            }
            let m = ms.remove(0);
            check_beta(g, m.beta(), "the matrix file")?;
            (m.beta(), eig_hermitian(&m)?)
        }
        _ => return Err(usage("give either --eigs or --matrix")),
    };
    if let Some(bad) = eigs.iter().find(|x| !x.is_finite()) {
        return Err(usage(format!("eigenvalue {bad} is not finite")));
    }
    let value = jack_c(kappa, &eigs, beta);
    let out = JackOut {
        kappa,
        beta: beta.beta(),
        eigenvalues: &eigs,
        value,
    };
    emit(
        g,
        &format!("{}\n", num(value)),
        || to_json(&out),
        || {
            let mut s = csv_line(&["kappa".into(), "beta".into(), "value".into()]);
            s += &csv_line(&[kappa.to_string(), beta.to_string(), num(value)]);
            Ok(s)
        },
    )?;
    Ok(0)
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Density,
    Cf,
}

#[derive(Serialize)]
struct OtherValue {
    convention: SplittingConvention,
    value: Value,
    converged: bool,
}

#[derive(Serialize)]
struct SeriesOut {
    point: usize,
    convention: SplittingConvention,
    sign: PearsonSign,
    value: Value,
    degree_used: usize,
    tail_estimate: f64,
    converged: bool,
    /// Values under the other conventions, where they differ.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    other_conventions: Vec<OtherValue>,
}

fn eval(
    model: &QuadFormModel,
    kind: Kind,
    x: &HermitianMatrix,
    ctrl: &SeriesControl,
    path: SeriesPath,
) -> crate::Result<SeriesResult<Complex64>> {
    match kind {
        Kind::Density => {
            let r = crate::quadform::density_w_with(x, model, ctrl, path)?;
            Ok(SeriesResult {
                value: Complex64::new(r.value, 0.0),
                degree_used: r.degree_used,
                tail_estimate: r.tail_estimate,
                converged: r.converged,
                term_log: None,
            })
        }
        Kind::Cf => crate::quadform::cf_w_with(x, model, ctrl, path),
    }
}

fn value_json(kind: Kind, v: Complex64) -> Value {
    match kind {
        Kind::Density => serde_json::json!(v.re),
        Kind::Cf => serde_json::json!([v.re, v.im]),
    }
}

fn value_text(kind: Kind, v: Complex64) -> String {
    match kind {
        Kind::Density => num(v.re),
        Kind::Cf => format!(
            "{}{}{}i",
            num(v.re),
            if v.im < 0.0 { "-" } else { "+" },
            num(v.im.abs())
        ),
    }
}

fn cmd_series(
    g: &GlobalOpts,
    ctrl: &SeriesControl,
    kind: Kind,
    model_path: &Path,
    points_path: &Path,
    path: PathArg,
    table: bool,
) -> Run<i32> {
    let model = read_model(g, model_path)?;
    let points = read_matrices(points_path)?;
    let path = match path {
        PathArg::Fast => SeriesPath::Fast,
        PathArg::Generic => SeriesPath::Generic,
    };
    if table {
        return series_table(g, ctrl, kind, &model, &points);
    }
    let mut outs = Vec::with_capacity(points.len());
    for (i, x) in points.iter().enumerate() {
        let r = eval(&model, kind, x, ctrl, path)?;
        let mut others = Vec::new();
        for c in SplittingConvention::ALL {
            if c == model.convention() {
                continue;
            }
            if let Ok(o) = eval(&model.clone().with_convention(c), kind, x, ctrl, path) {
                if (o.value - r.value).norm() > 1e-12 * r.value.norm().max(1e-300) {
                    others.push((c, o));
                }
            }
        }
        outs.push((i, r, others));
    }
    let mut human = String::new();
    for (i, r, others) in &outs {
        let _ = writeln!(
            human,
            "[{i}] {} = {}  (degree {}, tail {}, {}converged)",
            model.convention().label(),
            value_text(kind, r.value),
            r.degree_used,
            num(r.tail_estimate),
            if r.converged { "" } else { "not " }
        );
        for (c, o) in others {
            let _ = writeln!(human, "    {} = {}", c.label(), value_text(kind, o.value));
        }
    }
    let records: Vec<SeriesOut> = outs
        .iter()
        .map(|(i, r, others)| SeriesOut {
            point: *i,
            convention: model.convention(),
            sign: model.spectra().sign,
            value: value_json(kind, r.value),
            degree_used: r.degree_used,
            tail_estimate: r.tail_estimate,
            converged: r.converged,
            other_conventions: others
                .iter()
                .map(|(c, o)| OtherValue {
                    convention: *c,
                    value: value_json(kind, o.value),
                    converged: o.converged,
                })
                .collect(),
        })
        .collect();
    emit(
        g,
        &human,
        || to_json(&records),
        || {
            let mut s = csv_line(
                &[
                    "point",
                    "convention",
                    "value_re",
                    "value_im",
                    "degree_used",
                    "tail_estimate",
                    "converged",
                ]
                .map(String::from),
            );
            for (i, r, others) in &outs {
                let mut row = |c: SplittingConvention, v: &SeriesResult<Complex64>| {
                    s += &csv_line(&[
                        i.to_string(),
                        c.label().into(),
                        num(v.value.re),
                        num(v.value.im),
                        v.degree_used.to_string(),
                        num(v.tail_estimate),
                        v.converged.to_string(),
                    ]);
                };
                row(model.convention(), r);
                for (c, o) in others {
                    row(*c, o);
                }
            }
            Ok(s)
        },
    )?;
    Ok(0)
}

fn series_table(
    g: &GlobalOpts,
    ctrl: &SeriesControl,
    kind: Kind,
    model: &QuadFormModel,
    points: &[HermitianMatrix],
) -> Run<i32> {
    let mut tables: Vec<(usize, Vec<PartialRow>)> = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let p = match kind {
            Kind::Density => crate::quadform::EvalPoint::Density(x.clone()),
            Kind::Cf => crate::quadform::EvalPoint::Cf(x.clone()),
        };
        tables.push((i, crate::quadform::series_partial_table(model, ctrl, &p)?));
    }
    let header = [
        "point",
        "degree",
        "layer_re",
        "layer_im",
        "layer_norm",
        "partial_re",
        "partial_im",
    ]
    .map(String::from);
    let rows = |sep: &str| {
        let mut s = String::new();
        for (i, t) in &tables {
            for r in t {
                let f = [
                    i.to_string(),
                    r.degree.to_string(),
                    num(r.layer_re),
                    num(r.layer_im),
                    num(r.layer_norm),
                    num(r.partial_re),
                    num(r.partial_im),
                ];
                s += &f.join(sep);
                s.push('\n');
            }
        }
        s
    };
    let human = format!("{}\n{}", header.join("  "), rows("  "));
    #[derive(Serialize)]
    struct TableOut<'a> {
        point: usize,
        rows: &'a [PartialRow],
    }
    let json: Vec<TableOut> = tables
        .iter()
        .map(|(i, r)| TableOut { point: *i, rows: r })
        .collect();
    emit(
        g,
        &human,
        || to_json(&json),
        || Ok(csv_line(&header) + &rows(",")),
    )?;
    Ok(0)
}

fn cmd_sample(
    g: &GlobalOpts,
    model_path: &Path,
    count: usize,
    what: Emit,
    antithetic: bool,
) -> Run<i32> {
    let model = read_model(g, model_path)?;
    let em = model.elliptical_model()?;
    let seed = g.seed.unwrap_or(0);
    let xs = sample_x_with(&em, count, seed, SampleOptions { antithetic })?;
    let a = model.a().as_matrix();
    let mut draws = Vec::with_capacity(count);
    for x in xs {
        draws.push(match what {
            Emit::X => x,
            Emit::W => {
                let w = x.conj_transpose().matmul(&a.matmul(&x)?)?;
                HermitianMatrix::new(w)?.into_matrix()
            }
        });
    }
    let format = g.format.unwrap_or(Format::Json);
    let body = match format {
        Format::Json => {
            let mut s = String::new();
            for d in &draws {
                s += &serde_json::to_string(d).map_err(Error::from)?;
                s.push('\n');
            }
            s
        }
        Format::Csv => {
            let mut s = String::new();
            if let Some(d) = draws.first() {
                let mut h = vec!["draw".to_string()];
                h.extend((0..d.data().len()).map(|k| format!("c{k}")));
                s += &csv_line(&h);
            }
            for (i, d) in draws.iter().enumerate() {
                let mut f = vec![i.to_string()];
                f.extend(d.data().iter().map(|x| num(*x)));
                s += &csv_line(&f);
            }
            s
        }
    };
    match &g.out {
        Some(p) => {
            fs::write(p, body).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(body.as_bytes()).map_err(Error::from)?;
        }
    }
    Ok(0)
}

fn load_suite(name: &str) -> Run<Vec<crate::verify::SuiteEntry>> {
    if BUILTIN_SUITES.contains(&name) {
        return Ok(builtin_suite(name)?);
    }
    let p = Path::new(name);
    if !p.exists() {
        return Err(usage(format!(
            "'{name}' is neither a built-in suite ({}) nor a file",
            BUILTIN_SUITES.join(", ")
        )));
    }
    parse_suite(&read(p)?).map_err(|e| usage(format!("{name}: {e}")))
}

fn suite_csv(rep: &SuiteReport) -> String {
    let mut s = csv_line(
        &[
            "check",
            "index",
            "point",
            "estimate_re",
            "estimate_im",
            "standard_error",
            "radius",
            "candidate",
            "value_re",
            "value_im",
            "within_radius",
            "verdict",
        ]
        .map(String::from),
    );
    for (i, c) in rep.checks.iter().enumerate() {
        for p in &c.points {
            for cand in &p.candidates {
                s += &csv_line(&[
                    c.check.clone(),
                    i.to_string(),
                    p.label.clone(),
                    num(p.estimate[0]),
                    num(p.estimate[1]),
                    num(p.standard_error),
                    num(p.radius),
                    cand.label.clone(),
                    num(cand.value[0]),
                    num(cand.value[1]),
                    cand.within_radius.to_string(),
                    c.verdict.to_string(),
                ]);
            }
        }
    }
    s
}

fn run_named_suite(
    g: &GlobalOpts,
    ctrl: &SeriesControl,
    name: &str,
    timings: bool,
) -> Run<SuiteReport> {
    let entries = load_suite(name)?;
    Ok(run_suite(
        &entries,
        ctrl,
        RunOptions {
            seed_override: g.seed,
            timings,
        },
    ))
}

fn cmd_check(g: &GlobalOpts, ctrl: &SeriesControl, suite: &str, timings: bool) -> Run<i32> {
    let rep = run_named_suite(g, ctrl, suite, timings)?;
    let mut human = String::new();
    for (i, c) in rep.checks.iter().enumerate() {
        let _ = writeln!(human, "{i:>3}  {:<18} {}", c.check, c.verdict);
    }
    let s = &rep.summary;
    let _ = writeln!(
        human,
        "{} checks: {} matched, {} inconclusive, {} failed",
        s.total, s.matches, s.inconclusive, s.fail
    );
    let json = || to_json(&rep);
    match (&g.out, g.format) {
        (None, None) => print!("{}", json()?),
        _ => emit(g, &human, json, || Ok(suite_csv(&rep)))?,
    }
    Ok(if rep.has_failures() {
        EXIT_CHECK_FAILED
    } else {
        0
    })
}

fn cmd_report(
    g: &GlobalOpts,
    ctrl: &SeriesControl,
    saved: Option<&Path>,
    run: Option<&str>,
) -> Run<i32> {
    let suite = match (saved, run) {
        (Some(p), _) => Some(
            serde_json::from_str::<SuiteReport>(&read(p)?)
                .map_err(|e| usage(format!("{}: {e}", p.display())))?,
        ),
        (None, Some(name)) => Some(run_named_suite(g, ctrl, name, false)?),
        (None, None) => None,
    };
    let items = discrepancies(suite.as_ref());
    let human = render_table(&items);
    emit(
        g,
        &human,
        || to_json(&items),
        || {
            let mut s = csv_line(
                &[
                    "id",
                    "topic",
                    "printed",
                    "derived",
                    "resolution",
                    "evidence",
                ]
                .map(String::from),
            );
            for d in &items {
                s += &csv_line(&[
                    d.id.into(),
                    d.topic.into(),
                    d.printed.clone(),
                    d.derived.clone(),
                    d.resolution.clone(),
                    d.evidence.join(" | "),
                ]);
            }
            Ok(s)
        },
    )?;
    Ok(0)
}
