//! `polydirich` command-line front end.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polydirich::harness::{full_suite, run_check, CheckContext, CheckReport, SuiteConfig, SuiteReport, Verdict};
use polydirich::integral::integral_norm_exact;
use polydirich::io::{parse_degree, parse_param, parse_point, parse_weight, read_series_csv, write_series_csv};
use polydirich::multiplier::{finite_section, operator_norm};
use polydirich::space::{eval_functional_norm, kernel_series};
use polydirich::{norm, Error, FamilyId, NamedFamily, TruncatedSeries, WeightVector, C64};
use serde_json::json;

#[derive(Parser)]
#[command(name = "polydirich", version, about = "Numerics for Dirichlet-type spaces on the unit bidisc")]
struct Cli {
    /// Worker threads for parallel kernels.
    #[arg(long, global = true, env = "POLYDIRICH_THREADS")]
    threads: Option<usize>,
    /// Output format; scalar results print a bare value and reports print
    /// JSON when omitted.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Omit wall-clock fields so identical runs give identical output.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn weight(s: &str) -> Result<WeightVector, String> {
    parse_weight(s).map_err(|e| e.to_string())
}

fn degree(s: &str) -> Result<(usize, usize), String> {
    parse_degree(s).map_err(|e| e.to_string())
}

fn point(s: &str) -> Result<(C64, C64), String> {
    parse_point(s).map_err(|e| e.to_string())
}

fn param(s: &str) -> Result<(String, String), String> {
    parse_param(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Weighted coefficient norm of a CSV series.
    Norm {
        series: PathBuf,
        #[arg(long, value_parser = weight, allow_hyphen_values = true)]
        alpha: WeightVector,
        /// Use the integral form (needs nonpositive weights).
        #[arg(long)]
        integral: bool,
    },
    /// Evaluate a CSV series at a point of the bidisc.
    Eval {
        series: PathBuf,
        #[arg(long, value_parser = point, allow_hyphen_values = true)]
        at: (C64, C64),
    },
    /// Truncated reproducing kernel as a CSV grid.
    Kernel {
        #[arg(long, value_parser = weight, allow_hyphen_values = true)]
        alpha: WeightVector,
        #[arg(long, value_parser = point, allow_hyphen_values = true)]
        at: (C64, C64),
        #[arg(long, value_parser = degree)]
        deg: (usize, usize),
    },
    /// Norm of the point evaluation functional.
    Functional {
        #[arg(long, value_parser = weight, allow_hyphen_values = true)]
        alpha: WeightVector,
        #[arg(long, value_parser = point, allow_hyphen_values = true)]
        at: (C64, C64),
        #[arg(long, value_parser = degree)]
        deg: (usize, usize),
    },
    /// Norm of the finite section of `f ↦ h f` from D_alpha to D_beta.
    Opnorm {
        multiplier: PathBuf,
        #[arg(long, value_parser = weight, allow_hyphen_values = true)]
        alpha: WeightVector,
        #[arg(long, value_parser = weight, allow_hyphen_values = true)]
        beta: WeightVector,
        #[arg(long, value_parser = degree)]
        deg: (usize, usize),
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
    },
    /// Coefficient grid of a named family.
    Generate {
        #[arg(long)]
        family: String,
        #[arg(long, value_parser = weight, allow_hyphen_values = true)]
        alpha: Option<WeightVector>,
        #[arg(long, value_parser = degree)]
        deg: (usize, usize),
        /// Extra scalar parameters, e.g. `q1=0.3`.
        #[arg(long, value_parser = param)]
        param: Vec<(String, String)>,
    },
    /// Run one check of the catalog.
    Check {
        check_id: String,
        #[arg(long, value_parser = param, allow_hyphen_values = true)]
        param: Vec<(String, String)>,
    },
    /// Run the whole catalog.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Check,
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotConverged { .. } => Failure::Numeric(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_series(path: &Path) -> Result<TruncatedSeries, Failure> {
    let file = File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    read_series_csv(io::BufReader::new(file)).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn complex_json(c: C64) -> serde_json::Value {
    json!({ "re": c.re, "im": c.im })
}

/// Prints a scalar result: an object in JSON mode, the bare value otherwise.
fn scalar(out: &mut dyn Write, format: Option<Format>, fields: serde_json::Value, bare: String) -> io::Result<()> {
    match format {
        Some(Format::Json) => writeln!(out, "{}", serde_json::to_string_pretty(&fields).expect("serializable")),
        _ => writeln!(out, "{bare}"),
    }
}

fn report_rows(out: &mut dyn Write, r: &CheckReport) -> io::Result<()> {
    let verdict = serde_json::to_value(r.verdict).expect("serializable");
    writeln!(out, "{},verdict,,{}", r.check_id, verdict.as_str().unwrap_or_default())?;
    for (k, v) in &r.metrics {
        writeln!(out, "{},metric,{k},{v:?}", r.check_id)?;
    }
    for (k, v) in &r.tolerances {
        writeln!(out, "{},tolerance,{k},{v:?}", r.check_id)?;
    }
    for (k, v) in &r.trends {
        writeln!(out, "{},trend,{k},{}", r.check_id, v.classification.name())?;
    }
    Ok(())
}

fn write_report(out: &mut dyn Write, format: Format, r: &CheckReport) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(r).expect("serializable")),
        Format::Csv => {
            writeln!(out, "check_id,kind,name,value")?;
            report_rows(out, r)
        }
    }
}

fn write_suite(out: &mut dyn Write, format: Format, r: &SuiteReport) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(r).expect("serializable")),
        Format::Csv => {
            writeln!(out, "check_id,kind,name,value")?;
            for c in &r.checks {
                report_rows(out, c)?;
            }
            for e in &r.errors {
                writeln!(out, "{},error,,\"{}\"", e.check_id, e.error.replace('"', "'"))?;
            }
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let mut out: Box<dyn Write> = match &cli.output {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let format = cli.format;
    let mut failed = false;
    match cli.command {
        Command::Norm { series, alpha, integral } => {
            let f = read_series(&series)?;
            let v = if integral { integral_norm_exact(&f, &alpha)? } else { norm(&f, &alpha) };
            let kind = if integral { "integral" } else { "coefficient" };
            scalar(&mut out, format, json!({ "norm": v, "alpha": [alpha.alpha1, alpha.alpha2], "kind": kind }), format!("{v:?}"))?;
        }
        Command::Eval { series, at } => {
            let f = read_series(&series)?;
            let v = f.evaluate(at.0, at.1)?;
            scalar(
                &mut out,
                format,
                json!({ "value": complex_json(v), "z": complex_json(at.0), "w": complex_json(at.1) }),
                format!("{:?},{:?}", v.re, v.im),
            )?;
        }
        Command::Kernel { alpha, at, deg } => {
            let k = kernel_series(&alpha, at.0, at.1, deg)?;
            write_series_csv(&k, &mut out)?;
        }
        Command::Functional { alpha, at, deg } => {
            let r = eval_functional_norm(&alpha, at.0, at.1, deg)?;
            scalar(
                &mut out,
                format,
                json!({ "value": r.value, "tail_bound": r.tail_bound, "truncation": [r.truncation.0, r.truncation.1] }),
                format!("{:?},{:?}", r.value, r.tail_bound),
            )?;
        }
        Command::Opnorm { multiplier, alpha, beta, deg, tol, max_iter } => {
            let h = read_series(&multiplier)?;
            let op = finite_section(&h, &alpha, &beta, deg);
            let e = operator_norm(&op, tol, max_iter)?;
            scalar(
                &mut out,
                format,
                json!({ "norm": e.value, "iterations": e.iterations, "residual": e.residual, "dense": op.is_dense() }),
                format!("{:?}", e.value),
            )?;
        }
        Command::Generate { family, alpha, deg, param } => {
            let id: FamilyId = family.parse()?;
            let extra: BTreeMap<String, f64> = param
                .into_iter()
                .map(|(k, v)| {
                    v.trim()
                        .parse::<f64>()
                        .map(|x| (k.clone(), x))
                        .map_err(|_| Failure::Usage(format!("parameter `{k}`: invalid number `{v}`")))
                })
                .collect::<Result<_, _>>()?;
            let f = NamedFamily::from_params(id, alpha, &extra)?;
            write_series_csv(&f.generate(deg.0, deg.1), &mut out)?;
        }
        Command::Check { check_id, param } => {
            let mut params = BTreeMap::new();
            for (k, v) in param {
                if params.insert(k.clone(), v).is_some() {
                    return Err(Failure::Usage(format!("parameter `{k}` given twice")));
                }
            }
            let mut r = run_check(&check_id, &params, &CheckContext::default())?;
            if cli.no_timestamp {
                r.runtime_ms = None;
            }
            write_report(&mut out, format.unwrap_or(Format::Json), &r)?;
            failed = r.verdict != Verdict::Pass;
        }
        Command::Suite { config } => {
            let mut cfg = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
                    SuiteConfig::from_toml_str(&text)?
                }
                None => SuiteConfig::default(),
            };
            cfg.no_timestamp |= cli.no_timestamp;
            let r = full_suite(&cfg)?;
            write_suite(&mut out, format.unwrap_or(Format::Json), &r)?;
            failed = !r.summary.success();
        }
    }
    out.flush()?;
    if failed {
        Err(Failure::Check)
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Numeric(msg)) => {
            eprintln!("polydirich: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("polydirich: {msg}");
            ExitCode::from(2)
        }
    }
}
