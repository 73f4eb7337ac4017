use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use vosa_core::algebra_data::{build_ideal_module, build_ns, build_trunc_poly, conformal_normalization_check};
use vosa_core::graded_module::{ModuleKind, Monomial};
use vosa_core::invariant_form::{brute_force_radical, character, ell_scan, gram, radical_basis};
use vosa_core::scalar::{format_scalar, parse_scalar, parse_scalar_list};
use vosa_core::vertex::{all_zero, IdentityCheck, VertexAlgebra};
use vosa_core::{jacobi_scan, verify_datum, AlgebraDatum, GradedModule, HalfInt, ModuleConfig, Scalar};

#[derive(Parser)]
#[command(name = "vosa", version, about = "Exact computations in vertex operator superalgebras built from an algebra datum")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for per-degree work (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Vacuum,
    Verma,
}

#[derive(Args)]
struct DatumArg {
    /// Path to the datum JSON file.
    #[arg(long)]
    datum: PathBuf,
}

#[derive(Args)]
struct ModuleArgs {
    #[command(flatten)]
    datum: DatumArg,

    /// Level ℓ, a rational string.
    #[arg(long, default_value = "1")]
    ell: String,

    /// Comma-separated λ(e_i) values; Verma modules only.
    #[arg(long)]
    lambda: Option<String>,

    #[arg(long, value_enum, default_value_t = Kind::Vacuum)]
    kind: Kind,

    /// Truncation degree, e.g. "4" or "9/2".
    #[arg(long, default_value = "4")]
    max_degree: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check the compatibility conditions of a datum.
    Verify(DatumArg),
    /// Scan the super Jacobi identity over a window of modes.
    Jacobi {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, default_value_t = 4)]
        window: i64,
    },
    /// Print graded dimensions of a module.
    Build(ModuleArgs),
    /// Print the Gram matrix at one degree.
    Gram {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        degree: String,
    },
    /// Print a basis of the radical at one degree.
    Radical {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        degree: String,
        /// Use the lowering-operator kernel instead of the Gram matrix.
        #[arg(long)]
        brute_force: bool,
    },
    /// Print dimensions of the module, the radical and the simple quotient.
    Character(ModuleArgs),
    /// Gram rank at one degree for several levels.
    Scan {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        degree: String,
        /// Comma-separated levels.
        #[arg(long)]
        ells: String,
    },
    /// Write a datum JSON file from a builder.
    Builders {
        #[command(subcommand)]
        which: Builder,
    },
    /// Check structure identities, Virasoro brackets and formula grids.
    Identities {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, default_value_t = 3)]
        window: i64,
        /// Highest degree of the states the identities are applied to.
        #[arg(long, default_value = "2")]
        state_degree: String,
        /// Highest degree of the fields in the commutator and skew grids.
        #[arg(long, default_value = "2")]
        field_degree: String,
    },
}

#[derive(Subcommand)]
enum Builder {
    /// The rank-one datum carrying the Neveu–Schwarz algebra.
    Ns,
    /// Truncated polynomial algebra with its ideal module.
    TruncPoly {
        #[arg(long)]
        n: usize,
        /// Comma-separated values f(1), f(x), …, f(xⁿ).
        #[arg(long)]
        f: String,
    },
    /// Replace U by A acting on itself.
    Ideal(DatumArg),
}

/// A finished report: the JSON value, a flat table for csv/text, and whether
/// every check came out clean.
struct Report {
    value: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    ok: bool,
}

impl Report {
    fn new(value: Value, header: &[&str], rows: Vec<Vec<String>>, ok: bool) -> Self {
        Report { value, header: header.iter().map(|s| s.to_string()).collect(), rows, ok }
    }

    fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.value)? + "\n"),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Text => {
                let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
                for r in &self.rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |cells: &[String]| {
                    let padded: Vec<String> =
                        cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                let mut s = line(&self.header);
                for r in &self.rows {
                    s += &line(r);
                }
                Ok(s)
            }
        }
    }
}

struct InputError(anyhow::Error);

fn input<T, E: Into<anyhow::Error>>(r: Result<T, E>) -> Result<T, InputError> {
    r.map_err(|e| InputError(e.into()))
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    use vosa_core::Error as E;
    match e.downcast_ref::<E>() {
        Some(E::Parse(_)) => "PARSE",
        Some(E::DimensionMismatch(_)) => "DIMENSION_MISMATCH",
        Some(E::InvalidIdentity(_)) => "INVALID_IDENTITY",
        Some(E::DegeneratePivot(_)) => "DEGENERATE_PIVOT",
        Some(E::NoIdentity) => "NO_IDENTITY",
        Some(E::DatumMismatch(_)) => "DATUM_MISMATCH",
        Some(E::NonHomogeneous) => "NON_HOMOGENEOUS",
        Some(E::DegreeOutOfRange { .. }) => "DEGREE_OUT_OF_RANGE",
        Some(E::DegreeMismatch(..)) => "DEGREE_MISMATCH",
        Some(E::TruncationUncertain { .. }) => "TRUNCATION_UNCERTAIN",
        Some(E::Unsupported(_)) => "UNSUPPORTED",
        Some(E::InvalidConfig(_)) => "INVALID_CONFIG",
        None if e.downcast_ref::<std::io::Error>().is_some() => "IO",
        None if e.downcast_ref::<serde_json::Error>().is_some() => "PARSE",
        None => "INPUT",
    }
}

fn report_error(kind: &str, message: &str) {
    let v = json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{v}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            report_error("USAGE", e.to_string().trim_end());
            return ExitCode::from(2);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        report_error("INPUT", &e.to_string());
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(ok) => ExitCode::from(if ok { 0 } else { 1 }),
        Err(InputError(e)) => {
            report_error(error_kind(&e), &format!("{e:#}"));
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, InputError> {
    let report = input(dispatch(&cli.command))?;
    let text = input(report.render(cli.format))?;
    match &cli.out {
        Some(p) => input(fs::write(p, text).with_context(|| format!("writing {}", p.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            input(out.write_all(text.as_bytes()))?;
        }
    }
    Ok(report.ok)
}

fn dispatch(cmd: &Command) -> anyhow::Result<Report> {
    match cmd {
        Command::Verify(d) => verify(&load(&d.datum)?),
        Command::Jacobi { datum, window } => jacobi(&load(&datum.datum)?, *window),
        Command::Build(m) => build(&module(m)?),
        Command::Gram { module: m, degree } => gram_report(&module(m)?, parse_degree(degree)?),
        Command::Radical { module: m, degree, brute_force } => {
            radical(&module(m)?, parse_degree(degree)?, *brute_force)
        }
        Command::Character(m) => character_report(&module(m)?),
        Command::Scan { module: m, degree, ells } => scan(m, parse_degree(degree)?, ells),
        Command::Builders { which } => builders(which),
        Command::Identities { module: m, window, state_degree, field_degree } => {
            identities(m, *window, parse_degree(state_degree)?, parse_degree(field_degree)?)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<AlgebraDatum> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(AlgebraDatum::from_json(&text)?)
}

fn parse_degree(s: &str) -> anyhow::Result<HalfInt> {
    s.parse::<HalfInt>().map_err(|_| anyhow!(vosa_core::Error::Parse(format!("bad degree {s:?}"))))
}

fn config(m: &ModuleArgs) -> anyhow::Result<ModuleConfig> {
    let datum = load(&m.datum.datum)?;
    let ell = parse_scalar(&m.ell)?;
    let max = parse_degree(&m.max_degree)?;
    let kind = match m.kind {
        Kind::Vacuum => ModuleKind::VacuumV,
        Kind::Verma => ModuleKind::VermaM,
    };
    let lambda = match &m.lambda {
        Some(s) => parse_scalar_list(s)?,
        None => vec![Scalar::default(); datum.dim_a],
    };
    Ok(ModuleConfig::new(datum, ell, lambda, kind, max)?)
}

fn module(m: &ModuleArgs) -> anyhow::Result<GradedModule> {
    Ok(GradedModule::new(config(m)?))
}

fn word(w: &Monomial) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn verify(d: &AlgebraDatum) -> anyhow::Result<Report> {
    let report = verify_datum(d)?;
    let normalized = conformal_normalization_check(d).ok();
    let rows = report
        .violations
        .iter()
        .map(|v| {
            vec![
                serde_json::to_value(v.condition).unwrap().as_str().unwrap_or_default().to_string(),
                v.witness.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "),
                v.lhs.iter().map(format_scalar).collect::<Vec<_>>().join(" "),
                v.rhs.iter().map(format_scalar).collect::<Vec<_>>().join(" "),
            ]
        })
        .collect();
    let value = json!({
        "passes": report.passes(),
        "conditions": report.conditions(),
        "violations": report.violations,
        "rank_form_a": report.rank_form_a,
        "rank_form_u": report.rank_form_u,
        "conformal_normalization": normalized,
    });
    Ok(Report::new(value, &["condition", "witness", "lhs", "rhs"], rows, report.passes()))
}

fn jacobi(d: &AlgebraDatum, window: i64) -> anyhow::Result<Report> {
    let witnesses = jacobi_scan(d, window)?;
    let rows = witnesses
        .iter()
        .map(|w| {
            let mut r: Vec<String> = w.symbols.iter().map(|s| s.to_string()).collect();
            r.push(w.residual.to_string());
            r
        })
        .collect();
    let ok = witnesses.is_empty();
    let value = json!({ "window": window, "count": witnesses.len(), "witnesses": witnesses });
    Ok(Report::new(value, &["x", "y", "z", "residual"], rows, ok))
}

fn build(m: &GradedModule) -> anyhow::Result<Report> {
    let mut rows = Vec::new();
    let mut dims = Vec::new();
    for d in m.max_degree().steps_from_zero() {
        let n = m.graded_dimension(d)?;
        rows.push(vec![d.to_string(), n.to_string()]);
        dims.push(json!({ "degree": d, "dim": n }));
    }
    let cfg = m.config();
    let value = json!({
        "kind": match cfg.kind { ModuleKind::VacuumV => "vacuum", ModuleKind::VermaM => "verma" },
        "ell": format_scalar(&cfg.ell),
        "lambda": cfg.lambda.iter().map(format_scalar).collect::<Vec<_>>(),
        "max_degree": cfg.max_degree,
        "lowest_weight": cfg.lowest_weight().map(|h| format_scalar(&h)),
        "dimensions": dims,
    });
    Ok(Report::new(value, &["degree", "dim"], rows, true))
}

fn gram_report(m: &GradedModule, d: HalfInt) -> anyhow::Result<Report> {
    let g = gram(m, d)?;
    let mut header = vec!["word".to_string()];
    header.extend((0..g.basis.len()).map(|j| format!("c{j}")));
    let rows = g
        .basis
        .iter()
        .zip(&g.entries)
        .map(|(w, r)| {
            let mut row = vec![word(w)];
            row.extend(r.iter().map(format_scalar));
            row
        })
        .collect();
    let value = serde_json::to_value(&g)?;
    Ok(Report { value, header, rows, ok: true })
}

fn radical(m: &GradedModule, d: HalfInt, brute: bool) -> anyhow::Result<Report> {
    let r = if brute { brute_force_radical(m, d)? } else { radical_basis(m, d)? };
    let rows = r.vectors.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]).collect();
    let value = json!({
        "degree": d,
        "method": if brute { "brute_force" } else { "gram" },
        "dim": m.graded_dimension(d)?,
        "dim_radical": r.dim(),
        "vectors": r.vectors,
    });
    Ok(Report::new(value, &["index", "vector"], rows, true))
}

fn character_report(m: &GradedModule) -> anyhow::Result<Report> {
    let table = character(m, m.max_degree())?;
    let rows = table
        .iter()
        .map(|e| vec![e.degree.to_string(), e.dim.to_string(), e.dim_radical.to_string(), e.dim_simple.to_string()])
        .collect();
    let entries: Vec<Value> = table
        .iter()
        .map(|e| {
            json!({
                "degree": e.degree,
                "dim_big": e.dim,
                "dim_radical": e.dim_radical,
                "dim_simple": e.dim_simple,
            })
        })
        .collect();
    let value = json!({ "character": entries });
    Ok(Report::new(value, &["degree", "dim_big", "dim_radical", "dim_simple"], rows, true))
}

fn scan(m: &ModuleArgs, d: HalfInt, ells: &str) -> anyhow::Result<Report> {
    let cfg = config(m)?;
    let dim = GradedModule::new(cfg.clone()).graded_dimension(d)?;
    let ells = parse_scalar_list(ells)?;
    let ranks = ell_scan(&cfg, d, &ells)?;
    let rows = ranks
        .iter()
        .map(|(l, r)| vec![format_scalar(l), r.to_string(), (dim - r).to_string()])
        .collect();
    let entries: Vec<Value> = ranks
        .iter()
        .map(|(l, r)| json!({ "ell": format_scalar(l), "rank": r, "dim_radical": dim - r }))
        .collect();
    let value = json!({ "degree": d, "dim": dim, "scan": entries });
    Ok(Report::new(value, &["ell", "rank", "dim_radical"], rows, true))
}

fn builders(b: &Builder) -> anyhow::Result<Report> {
    let d = match b {
        Builder::Ns => build_ns(),
        Builder::TruncPoly { n, f } => build_trunc_poly(*n, &parse_scalar_list(f)?)?,
        Builder::Ideal(a) => build_ideal_module(&load(&a.datum)?),
    };
    let value: Value = serde_json::from_str(&d.to_json())?;
    Ok(Report::new(value, &["dim_a", "dim_u"], vec![vec![d.dim_a.to_string(), d.dim_u.to_string()]], true))
}

fn identities(m: &ModuleArgs, window: i64, state_degree: HalfInt, field_degree: HalfInt) -> anyhow::Result<Report> {
    let va = VertexAlgebra::new(config(m)?)?;
    let structure = va.verify_structure_identities(window, state_degree);
    let virasoro = match va.verify_virasoro(window) {
        Ok(r) => Some(r),
        Err(vosa_core::Error::NoIdentity) => None,
        Err(e) => return Err(e.into()),
    };
    let grids = va.verify_formula_grids(window, field_degree, state_degree)?;
    let empty = Vec::new();
    let vir_checks = virasoro.as_ref().map(|r| &r.checks).unwrap_or(&empty);
    let ok = all_zero(&structure) && all_zero(vir_checks) && all_zero(&grids);

    let mut rows = Vec::new();
    for (group, checks) in [("structure", &structure), ("virasoro", vir_checks), ("grids", &grids)] {
        for id in ids(checks) {
            let of_id: Vec<&IdentityCheck> = checks.iter().filter(|c| c.identity_id == id).collect();
            let bad = of_id.iter().filter(|c| !c.residual_norm_is_zero).count();
            rows.push(vec![group.to_string(), id, of_id.len().to_string(), bad.to_string()]);
        }
    }
    let failing = |checks: &[IdentityCheck]| -> Vec<IdentityCheck> {
        checks.iter().filter(|c| !c.residual_norm_is_zero).cloned().collect()
    };
    let failed = [failing(&structure), failing(vir_checks), failing(&grids)].concat();
    let value = json!({
        "passes": ok,
        "window": window,
        "state_degree": state_degree,
        "field_degree": field_degree,
        "summary": rows.iter().map(|r| json!({
            "group": r[0], "identity_id": r[1], "checked": r[2].parse::<usize>().unwrap(),
            "failures": r[3].parse::<usize>().unwrap(),
        })).collect::<Vec<_>>(),
        "failures": failed,
        "virasoro": virasoro.as_ref().map(|r| json!({
            "central_charge": format_scalar(&r.central_charge),
            "conformal_normalization": r.conformal_normalization,
        })),
    });
    Ok(Report::new(value, &["group", "identity_id", "checked", "failures"], rows, ok))
}

fn ids(checks: &[IdentityCheck]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in checks {
        if !out.iter().any(|s| s == &c.identity_id) {
            out.push(c.identity_id.clone());
        }
    }
    out
}
