//! hardyv — command-line front end for the inequality verifier.
//!
//! Subcommands: list, verify, equality, probe, scan, constants, lorentz,
//! equiv. Reports are emitted as JSON (an array of report objects with a
//! stable key order) or CSV (header plus one row per report); output is
//! byte-identical across runs for a fixed seed and configuration.
//!
//! Exit codes: 0 all checks pass, 1 at least one check fails, 2 invalid
//! parameters or regime, 3 numerical failure (divergence/non-convergence).

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardy_core::catalog::{self, CaseId, EquivKind, ScanAxis, VerifyOpts};
use hardy_core::error::Error as CoreError;
use hardy_core::funcspace::{parse_func, sampled_from_csv, FuncExpr};
use hardy_core::hardyops::LogVariant;
use hardy_core::lorentz::{self, CompareKind, LorentzParams};
use hardy_core::params::Exponents;
use hardy_core::report::VerificationReport;
use hardy_core::special::{sharp_constant, ConstValue, ConstantId};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "hardyv", version, about = "numerical verification of sharp weighted Hardy-type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the catalog ids with their display labels
    List(CommonArgs),
    /// Evaluate both sides of a case and check the inequality direction
    Verify(CaseArgs),
    /// Check the registered extremal family at a family point
    Equality(EqualityArgs),
    /// Probe sharpness of the constant by ratio maximization
    Probe(CaseArgs),
    /// Verify over a one-parameter grid (exactly one comma-separated flag)
    Scan(CaseArgs),
    /// Evaluate a sharp constant by id
    Constants(ConstantsArgs),
    /// Lorentz quasi-norm comparisons on step functions
    Lorentz(LorentzArgs),
    /// Check the substitution equivalence identities
    Equiv(EquivArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LogWeight {
    Corrected,
    AsPrinted,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Verification margin tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Relative quadrature tolerance override
    #[arg(long)]
    quad_rtol: Option<f64>,
    /// Absolute quadrature tolerance override
    #[arg(long)]
    quad_atol: Option<f64>,
    /// Logarithmic-weight reading for the two-constant cases
    #[arg(long, value_enum)]
    log_weight: Option<LogWeight>,
    /// Seed echoed into reports (reserved for randomized corpora)
    #[arg(long)]
    seed: Option<u64>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file mirroring these flags; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CaseArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    a: Option<String>,
    /// Interval endpoint; `inf` for an unbounded interval, 0 for dual cases
    #[arg(long)]
    ell: Option<String>,
    /// Function literal (pow:, ind:, logpow:, sum:, sampled:, win:, step:)
    #[arg(long)]
    f: Option<String>,
}

#[derive(Args, Clone)]
struct EqualityArgs {
    #[command(flatten)]
    case_args: CaseArgs,
    /// Family point c selecting the extremal function
    #[arg(long)]
    c: f64,
}

#[derive(Args, Clone)]
struct ConstantsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Constant id (hardy_classic, dual_pi, bliss_star, ...)
    #[arg(long)]
    id: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
}

#[derive(Args, Clone)]
struct LorentzArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which comparison: eq43, eq44 or eq45
    #[arg(long)]
    which: String,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value = "inf")]
    ell: String,
    /// Step-function literal step:[m:v;...] or a step-like function literal
    #[arg(long)]
    f: String,
}

#[derive(Args, Clone)]
struct EquivArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which identity: obs21, thm23fg or dual53
    #[arg(long)]
    which: String,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value = "inf")]
    ell: String,
    #[arg(long)]
    f: String,
}

/// Config-file form of the run options; every field optional.
#[derive(Deserialize, Default, Clone)]
struct FileConfig {
    case: Option<String>,
    p: Option<f64>,
    q: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    a: Option<f64>,
    ell: Option<String>,
    f: Option<String>,
    tol: Option<f64>,
    log_weight: Option<String>,
    seed: Option<u64>,
    format: Option<String>,
    out: Option<String>,
}

#[derive(Serialize)]
struct ReportOut {
    #[serde(flatten)]
    report: VerificationReport,
    tool_version: &'static str,
    seed: u64,
}

struct Emit {
    format: Format,
    out: Option<PathBuf>,
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CoreError::Divergence(_) | CoreError::Numerical { .. } => 3u8,
                _ => 2u8,
            })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CoreError> {
    match cli.command {
        Command::List(common) => {
            let emit = setup(&common)?.1;
            let mut lines = String::new();
            for c in CaseId::ALL {
                lines.push_str(&format!("{}\t{}\t{}\n", c.name(), c.label(), c.description()));
            }
            write_output(&emit.out, lines.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let (opts, emit) = setup(&args.common)?;
            let rc = resolve_case(&args)?;
            let f_spec = rc.f_spec.clone().ok_or_else(|| missing("f"))?;
            let reports = if f_spec.starts_with("step:") {
                run_lorentz_case(rc.case, &rc.ex, rc.ell, &f_spec, &opts)?
            } else {
                let f = load_func(&f_spec, rc.ell)?;
                let dom = rc.case.domain(rc.ell)?;
                catalog::verify(rc.case, &f, &rc.ex, &dom, &opts)?
            };
            emit_reports(&emit, &reports)?;
            Ok(exit_for(&reports))
        }
        Command::Equality(args) => {
            let (opts, emit) = setup(&args.case_args.common)?;
            let rc = resolve_case(&args.case_args)?;
            let dom = rc.case.domain(rc.ell)?;
            let report = catalog::equality_check(rc.case, &rc.ex, &dom, args.c, &opts)?;
            let reports = vec![report];
            emit_reports(&emit, &reports)?;
            Ok(exit_for(&reports))
        }
        Command::Probe(args) => {
            let (opts, emit) = setup(&args.common)?;
            let rc = resolve_case(&args)?;
            let dom = rc.case.domain(rc.ell)?;
            let outcome = catalog::sharpness_probe(rc.case, &rc.ex, &dom, &opts)?;
            emit_probe(&emit, rc.case, &outcome)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan(args) => {
            let (opts, emit) = setup(&args.common)?;
            let case = CaseId::parse(args.case.as_deref().ok_or_else(|| missing("case"))?)?;
            let f_template = args.f.clone().ok_or_else(|| missing("f"))?;
            let (axis, values, base, ell) = scan_axis(&args)?;
            let reports = catalog::scan(case, &base, ell, &f_template, axis, &values, &opts)?;
            emit_reports(&emit, &reports)?;
            Ok(exit_for(&reports))
        }
        Command::Constants(args) => {
            let (_, emit) = setup(&args.common)?;
            let id = ConstantId::parse(&args.id)?;
            let ex = Exponents {
                p: args.p.ok_or_else(|| missing("p"))?,
                q: args.q,
                alpha: args.alpha,
                beta: args.beta,
                a: args.a,
            };
            let value = sharp_constant(id, &ex)?;
            match emit.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct ConstOut {
                        id: &'static str,
                        value: f64,
                        second: Option<f64>,
                        tool_version: &'static str,
                    }
                    let (v, second) = match value {
                        ConstValue::Scalar(v) => (v, None),
                        ConstValue::Pair(a, b) => (a, Some(b)),
                    };
                    let body = serde_json::to_string_pretty(&ConstOut {
                        id: id.name(),
                        value: v,
                        second,
                        tool_version: TOOL_VERSION,
                    })
                    .map_err(|e| CoreError::Parse(e.to_string()))?;
                    write_output(&emit.out, format!("{body}\n").as_bytes())?;
                }
                Format::Csv => {
                    let line = match value {
                        ConstValue::Scalar(v) => format!("id,value\n{},{}\n", id.name(), v),
                        ConstValue::Pair(a, b) => format!("id,value,second\n{},{},{}\n", id.name(), a, b),
                    };
                    write_output(&emit.out, line.as_bytes())?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Lorentz(args) => {
            let (opts, emit) = setup(&args.common)?;
            let which = match args.which.as_str() {
                "eq43" => CompareKind::Eq43,
                "eq44" => CompareKind::Eq44,
                "eq45" => CompareKind::Eq45,
                other => return Err(CoreError::Parameter(format!("unknown comparison '{other}' (eq43, eq44, eq45)"))),
            };
            let ell = parse_ell(&args.ell)?;
            let step = load_step(&args.f, ell)?;
            let params = LorentzParams::new(args.p, args.q, ell)?;
            let reports = lorentz::compare(&step, &params, which, opts.tol)?;
            emit_reports(&emit, &reports)?;
            Ok(exit_for(&reports))
        }
        Command::Equiv(args) => {
            let (opts, emit) = setup(&args.common)?;
            let which = EquivKind::parse(&args.which)?;
            let ell = parse_ell(&args.ell)?;
            let f = load_func(&args.f, ell)?;
            let mut ex = Exponents::p(args.p);
            ex.alpha = args.alpha;
            let reports = catalog::equivalence_check(which, &f, &ex, ell, &opts)?;
            emit_reports(&emit, &reports)?;
            Ok(exit_for(&reports))
        }
    }
}

fn missing(flag: &str) -> CoreError {
    CoreError::Parameter(format!("--{flag} is required"))
}

struct ResolvedCase {
    case: CaseId,
    ex: Exponents,
    ell: f64,
    f_spec: Option<String>,
}

fn setup(common: &CommonArgs) -> Result<(VerifyOpts, Emit), CoreError> {
    let cfg = match &common.config {
        Some(path) => {
            let body = std::fs::read_to_string(path)
                .map_err(|e| CoreError::Parse(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str::<FileConfig>(&body)
                .map_err(|e| CoreError::Parse(format!("bad config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    hardy_core::quad::set_default_tolerances(common.quad_rtol, common.quad_atol);
    let log_variant = match common.log_weight {
        Some(LogWeight::Corrected) => LogVariant::Corrected,
        Some(LogWeight::AsPrinted) => LogVariant::AsPrinted,
        None => match cfg.log_weight.as_deref() {
            Some("corrected") | None => LogVariant::Corrected,
            Some("as-printed") => LogVariant::AsPrinted,
            Some(other) => {
                return Err(CoreError::Parse(format!("bad log_weight '{other}' (corrected | as-printed)")))
            }
        },
    };
    let opts = VerifyOpts { tol: common.tol.or(cfg.tol).unwrap_or(1e-5), log_variant };
    let format = match common.format {
        Some(f) => f,
        None => match cfg.format.as_deref() {
            Some("csv") => Format::Csv,
            Some("json") | None => Format::Json,
            Some(other) => return Err(CoreError::Parse(format!("bad format '{other}' (json | csv)"))),
        },
    };
    let out = common.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from));
    let seed = common.seed.or(cfg.seed).unwrap_or(0);
    Ok((opts, Emit { format, out, seed }))
}

fn file_cfg(common: &CommonArgs) -> Result<FileConfig, CoreError> {
    match &common.config {
        Some(path) => {
            let body = std::fs::read_to_string(path)
                .map_err(|e| CoreError::Parse(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str::<FileConfig>(&body)
                .map_err(|e| CoreError::Parse(format!("bad config {}: {e}", path.display())))
        }
        None => Ok(FileConfig::default()),
    }
}

fn parse_num(flag: &str, s: &str) -> Result<f64, CoreError> {
    match s {
        "inf" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| CoreError::Parse(format!("--{flag}: bad number '{t}'"))),
    }
}

fn parse_ell(s: &str) -> Result<f64, CoreError> {
    parse_num("ell", s)
}

fn resolve_case(args: &CaseArgs) -> Result<ResolvedCase, CoreError> {
    let cfg = file_cfg(&args.common)?;
    let case = CaseId::parse(
        args.case
            .as_deref()
            .or(cfg.case.as_deref())
            .ok_or_else(|| missing("case"))?,
    )?;
    let single = |flag: &str, v: &Option<String>, fallback: Option<f64>| -> Result<Option<f64>, CoreError> {
        match v {
            Some(s) => {
                if s.contains(',') {
                    Err(CoreError::Parameter(format!("--{flag}: comma lists are only valid under `scan`")))
                } else {
                    Ok(Some(parse_num(flag, s)?))
                }
            }
            None => Ok(fallback),
        }
    };
    let p = single("p", &args.p, cfg.p)?.ok_or_else(|| missing("p"))?;
    let ex = Exponents {
        p,
        q: single("q", &args.q, cfg.q)?,
        alpha: single("alpha", &args.alpha, cfg.alpha)?,
        beta: single("beta", &args.beta, cfg.beta)?,
        a: single("a", &args.a, cfg.a)?,
    };
    let ell = match (&args.ell, &cfg.ell) {
        (Some(s), _) => parse_ell(s)?,
        (None, Some(s)) => parse_ell(s)?,
        (None, None) => f64::INFINITY,
    };
    let f_spec = args.f.clone().or(cfg.f);
    Ok(ResolvedCase { case, ex, ell, f_spec })
}

fn scan_axis(args: &CaseArgs) -> Result<(ScanAxis, Vec<f64>, Exponents, f64), CoreError> {
    let cfg = file_cfg(&args.common)?;
    let mut axis: Option<(ScanAxis, Vec<f64>)> = None;
    let mut record = |ax: ScanAxis, s: &Option<String>| -> Result<Option<f64>, CoreError> {
        match s {
            Some(v) if v.contains(',') => {
                if axis.is_some() {
                    return Err(CoreError::Parameter("scan accepts exactly one comma-separated axis".into()));
                }
                let values: Result<Vec<f64>, CoreError> =
                    v.split(',').map(|t| parse_num("scan axis", t.trim())).collect();
                axis = Some((ax, values?));
                Ok(None)
            }
            Some(v) => Ok(Some(parse_num("flag", v)?)),
            None => Ok(None),
        }
    };
    let p = record(ScanAxis::P, &args.p)?.or(cfg.p);
    let q = record(ScanAxis::Q, &args.q)?.or(cfg.q);
    let alpha = record(ScanAxis::Alpha, &args.alpha)?.or(cfg.alpha);
    let beta = record(ScanAxis::Beta, &args.beta)?.or(cfg.beta);
    let a = record(ScanAxis::A, &args.a)?.or(cfg.a);
    let ell_opt = record(ScanAxis::Ell, &args.ell)?;
    let (axis, values) = axis.ok_or_else(|| {
        CoreError::Parameter("scan requires one comma-separated flag among --p --q --alpha --beta --a --ell".into())
    })?;
    let base = Exponents { p: p.unwrap_or(f64::NAN), q, alpha, beta, a };
    if axis != ScanAxis::P && base.p.is_nan() {
        return Err(missing("p"));
    }
    let ell = ell_opt
        .or_else(|| cfg.ell.as_deref().and_then(|s| parse_ell(s).ok()))
        .unwrap_or(f64::INFINITY);
    Ok((axis, values, base, ell))
}

fn load_func(spec: &str, ell: f64) -> Result<FuncExpr, CoreError> {
    if let Some(rest) = spec.strip_prefix("sampled:@") {
        let body = std::fs::read_to_string(rest)
            .map_err(|e| CoreError::Parse(format!("cannot read sampled file '{rest}': {e}")))?;
        return sampled_from_csv(&body);
    }
    parse_func(spec, ell)
}

fn load_step(spec: &str, _ell: f64) -> Result<lorentz::StepFunction, CoreError> {
    if spec.starts_with("step:") {
        lorentz::parse_step(spec)
    } else {
        let f = load_func(spec, _ell)?;
        lorentz::StepFunction::from_func(&f)
    }
}

fn run_lorentz_case(
    case: CaseId,
    ex: &Exponents,
    ell: f64,
    step_spec: &str,
    opts: &VerifyOpts,
) -> Result<Vec<VerificationReport>, CoreError> {
    let which = match case {
        CaseId::Lz1 => CompareKind::Eq43,
        CaseId::Lz2 => CompareKind::Eq44,
        CaseId::Lz3 => CompareKind::Eq45,
        other => {
            return Err(CoreError::Parameter(format!(
                "step-function literals are only accepted by the LZ cases, not {}",
                other.name()
            )))
        }
    };
    let step = lorentz::parse_step(step_spec)?;
    let q = ex.require_q()?;
    let params = LorentzParams::new(ex.p, q, ell)?;
    lorentz::compare(&step, &params, which, opts.tol)
}

fn exit_for(reports: &[VerificationReport]) -> ExitCode {
    if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn emit_reports(emit: &Emit, reports: &[VerificationReport]) -> Result<(), CoreError> {
    if reports.is_empty() {
        return Err(CoreError::Parameter("no reports produced".into()));
    }
    let bytes = match emit.format {
        Format::Json => {
            let out: Vec<ReportOut> = reports
                .iter()
                .map(|r| ReportOut { report: r.clone(), tool_version: TOOL_VERSION, seed: emit.seed })
                .collect();
            let mut s = serde_json::to_string_pretty(&out).map_err(|e| CoreError::Parse(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut s = String::from(
                "case_id,p,q,alpha,beta,a,ell,function,direction,lhs,rhs,constant,ratio,margin,pass,tol,quad_error,tool_version,seed\n",
            );
            for r in reports {
                let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.case_id,
                    r.params.p,
                    opt(r.params.q),
                    opt(r.params.alpha),
                    opt(r.params.beta),
                    opt(r.params.a),
                    r.params.ell,
                    csv_quote(&r.params.function),
                    r.direction.as_str(),
                    r.lhs,
                    r.rhs,
                    r.constant,
                    r.ratio,
                    r.margin,
                    r.pass,
                    r.tol,
                    r.quad_error,
                    TOOL_VERSION,
                    emit.seed,
                ));
            }
            s.into_bytes()
        }
    };
    write_output(&emit.out, &bytes)
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emit_probe(emit: &Emit, case: CaseId, outcome: &catalog::ProbeOutcome) -> Result<(), CoreError> {
    let bytes = match emit.format {
        Format::Json => {
            #[derive(Serialize)]
            struct ProbeOut<'a> {
                case_id: &'a str,
                sup_ratio: f64,
                argmax: f64,
                trace: &'a [(f64, f64)],
                tool_version: &'static str,
                seed: u64,
            }
            let mut s = serde_json::to_string_pretty(&ProbeOut {
                case_id: case.name(),
                sup_ratio: outcome.sup_ratio,
                argmax: outcome.argmax,
                trace: &outcome.trace,
                tool_version: TOOL_VERSION,
                seed: emit.seed,
            })
            .map_err(|e| CoreError::Parse(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut s = String::from("case_id,kind,param,ratio\n");
            for (param, ratio) in &outcome.trace {
                s.push_str(&format!("{},trace,{},{}\n", case.name(), param, ratio));
            }
            s.push_str(&format!("{},sup,{},{}\n", case.name(), outcome.argmax, outcome.sup_ratio));
            s.into_bytes()
        }
    };
    write_output(&emit.out, &bytes)
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), CoreError> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CoreError::Numerical { what: format!("cannot write {}: {e}", path.display()), best: f64::NAN, err: f64::NAN }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CoreError::Numerical { what: format!("cannot write stdout: {e}"), best: f64::NAN, err: f64::NAN }),
    }
}
