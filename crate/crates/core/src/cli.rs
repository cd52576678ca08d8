//! The `unifex` command line.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::besselexp::Method;
use crate::error::Error;
use crate::errormodel::{fit_rate, sweep, RegionSpec, Settings, SweepRecord, DEFAULT_RATE_NS};
use crate::norlund::{norlund_coeffs_with_scan, pole_analysis_with_scan, DEFAULT_POLE_SCAN};
use crate::refseries::{hyp_eval, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable overriding the oracle tolerance.
pub const TOL_ENV: &str = "UNIFEX_TOL";

const CONVENTION: &str = "# bessel-type methods (bessel, bessel-elem) evaluate p-1Fp(a;b;-z^2/4) at the given z; \
kummer-type methods (kummer, kummer-elem) evaluate pFp(a;b;-z); method series evaluates qFp(a;b;z) at the literal z";

#[derive(Debug, Parser)]
#[command(
    name = "unifex",
    version,
    about = "Uniformly convergent expansions of generalized hypergeometric functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one expansion (or the direct series) at one point.
    Eval(EvalArgs),
    /// Print Nørlund's coefficients g_0 .. g_{n-1} and the pole data.
    Coeffs(CoeffsArgs),
    /// Evaluate an expansion and the series oracle over a grid.
    Sweep(SweepArgs),
    /// Fit the decay rate of the sup-error over a grid.
    Rates(RatesArgs),
    /// Write the CSV data behind the five reference figures.
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Series,
    Bessel,
    BesselElem,
    Kummer,
    KummerElem,
}

impl MethodArg {
    fn expansion(self) -> Option<Method> {
        match self {
            MethodArg::Series => None,
            MethodArg::Bessel => Some(Method::BesselKernel),
            MethodArg::BesselElem => Some(Method::TrigElementary),
            MethodArg::Kummer => Some(Method::KummerKernel),
            MethodArg::KummerElem => Some(Method::ExpElementary),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegionArg {
    Strip,
    Halfplane,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Upper parameters, comma separated; complex values as RE+IMj.
    #[arg(long = "a", value_parser = parse_vector, allow_hyphen_values = true, default_value = "")]
    a: ComplexVec,
    /// Lower parameters, comma separated; complex values as RE+IMj.
    #[arg(long = "b", value_parser = parse_vector, allow_hyphen_values = true)]
    b: ComplexVec,
}

#[derive(Debug, Clone, PartialEq)]
struct ComplexVec(Vec<Complex64>);

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[command(flatten)]
    params: ParamArgs,
    /// Evaluation point RE[,IM].
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    z: Complex64,
    /// Number of terms N (ignored by the series method).
    #[arg(long, default_value_t = 10)]
    terms: usize,
    /// Inner truncation order m of the elementary methods.
    #[arg(long)]
    m_override: Option<usize>,
}

#[derive(Debug, Args)]
struct CoeffsArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of coefficients.
    #[arg(long)]
    n: usize,
    /// Pole scan depth.
    #[arg(long, default_value_t = DEFAULT_POLE_SCAN)]
    pole_scan: usize,
}

#[derive(Debug, Args)]
struct RegionArgs {
    #[arg(long, value_enum, default_value = "strip")]
    region: RegionArg,
    /// Strip half-width, or the half-plane edge Re z >= lambda.
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, allow_hyphen_values = true)]
    re_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    re_max: f64,
    /// Imaginary range of a half-plane grid (defaults to 0).
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    im_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    im_max: f64,
    /// Grid size NRExNIM.
    #[arg(long, value_parser = parse_grid, default_value = "41x9")]
    grid: (usize, usize),
}

impl RegionArgs {
    fn spec(&self) -> Result<RegionSpec, Error> {
        match self.region {
            RegionArg::Strip => {
                RegionSpec::strip(self.lambda, (self.re_min, self.re_max), self.grid)
            }
            RegionArg::Halfplane => RegionSpec::half_plane(
                self.lambda,
                (self.re_min, self.re_max),
                (self.im_min, self.im_max),
                self.grid,
            ),
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    region: RegionArgs,
    /// Term counts, comma separated.
    #[arg(long, value_parser = parse_usize_list)]
    terms: UsizeList,
    #[arg(long)]
    m_override: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
struct UsizeList(Vec<usize>);

#[derive(Debug, Args)]
struct RatesArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    region: RegionArgs,
    /// Term counts for the fit, comma separated.
    #[arg(long, value_parser = parse_usize_list)]
    n_list: Option<UsizeList>,
    #[arg(long)]
    m_override: Option<usize>,
}

#[derive(Debug, Args)]
struct FiguresArgs {
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// Parses `RE`, `IMj`, `RE+IMj` or `RE-IMj`.
pub fn parse_complex(token: &str) -> Result<Complex64, String> {
    let t = token.trim();
    let bad = || format!("cannot read {t:?} as a number (expected RE, IMj or RE+IMj)");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['j', 'J']) else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // split at the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (body[..i].parse::<f64>().map_err(|_| bad())?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_vector(s: &str) -> Result<ComplexVec, String> {
    if s.trim().is_empty() {
        return Ok(ComplexVec(Vec::new()));
    }
    s.split(',')
        .map(parse_complex)
        .collect::<Result<Vec<_>, _>>()
        .map(ComplexVec)
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|_| format!("cannot read {p:?} as a real number"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected RE or RE,IM, got {s:?}")),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (x, y) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    let n = |p: &str| {
        p.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad grid count {p:?}"))
    };
    Ok((n(x)?, n(y)?))
}

fn parse_usize_list(s: &str) -> Result<UsizeList, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad count {p:?}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(UsizeList)
}

/// `%.17g`: 17 significant digits, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    if (-5..17).contains(&exp) {
        let s = if exp >= 0 {
            let split = (exp + 1) as usize;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        let s = s.trim_end_matches('0').trim_end_matches('.');
        format!("{sign}{s}")
    } else {
        let m = format!("{}.{}", &digits[..1], &digits[1..]);
        let m = m.trim_end_matches('0').trim_end_matches('.');
        format!(
            "{sign}{m}e{}{:02}",
            if exp < 0 { "-" } else { "+" },
            exp.abs()
        )
    }
}

/// A complex value as `RE`, or `RE+IMj` when the imaginary part is nonzero.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_num(z.re)
    } else if z.im < 0.0 || z.im.is_nan() {
        format!("{}{}j", fmt_num(z.re), fmt_num(z.im))
    } else {
        format!("{}+{}j", fmt_num(z.re), fmt_num(z.im))
    }
}

fn fmt_vector(v: &[Complex64]) -> String {
    v.iter()
        .map(|&x| fmt_complex(x))
        .collect::<Vec<_>>()
        .join(",")
}

/// The oracle tolerance, from [`TOL_ENV`] when set.
pub fn oracle_tolerance() -> Result<f64, Error> {
    match std::env::var(TOL_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t < 1.0 => Ok(t),
            _ => Err(Error::InvalidParameters(format!(
                "{TOL_ENV}={s:?} is not a tolerance in (0, 1)"
            ))),
        },
        Err(_) => Ok(DEFAULT_TOL),
    }
}

#[derive(Debug)]
enum Failure {
    Numerics(Error),
    Io(io::Error),
    Csv(csv::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numerics(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Csv(e)
    }
}

type CmdResult = Result<(), Failure>;

/// Runs the command line `argv` (program name first) and returns the exit
/// code. Output goes to `out`, diagnostics to stderr.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(args, out),
        Command::Coeffs(args) => cmd_coeffs(args, out),
        Command::Sweep(args) => cmd_sweep(args, out),
        Command::Rates(args) => cmd_rates(args, out),
        Command::Figures(args) => cmd_figures(args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Numerics(e)) => {
            eprintln!("unifex: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_PRECONDITION
            }
        }
        Err(Failure::Io(e)) => {
            eprintln!("unifex: {e}");
            EXIT_PRECONDITION
        }
        Err(Failure::Csv(e)) => {
            eprintln!("unifex: {e}");
            EXIT_PRECONDITION
        }
    }
}

fn settings(m_override: Option<usize>) -> Result<Settings, Error> {
    Ok(Settings {
        oracle_tol: oracle_tolerance()?,
        m_override,
        ..Settings::default()
    })
}

fn param_comment(a: &[Complex64], b: &[Complex64]) -> String {
    format!("# a = ({}), b = ({})", fmt_vector(a), fmt_vector(b))
}

fn cmd_eval(args: EvalArgs, out: &mut dyn Write) -> CmdResult {
    let (a, b) = (&args.params.a.0, &args.params.b.0);
    let z = args.z;
    let row: Vec<String> = match args.method.expansion() {
        None => {
            let v = hyp_eval(a, b, z, oracle_tolerance()?)?;
            let cells = [
                "series",
                &fmt_num(z.re),
                &fmt_num(z.im),
                "",
                "",
                &fmt_num(v.re),
                &fmt_num(v.im),
                "",
                "",
            ];
            cells.iter().map(|c| c.to_string()).collect()
        }
        Some(method) => {
            let r =
                crate::errormodel::Plan::new(method, a, b, args.terms, args.m_override)?.eval(z)?;
            vec![
                method.name().to_string(),
                fmt_num(z.re),
                fmt_num(z.im),
                r.n_terms.to_string(),
                r.m.map(|m| m.to_string()).unwrap_or_default(),
                fmt_num(r.value.re),
                fmt_num(r.value.im),
                fmt_num(r.bound_estimate),
                r.fallback_terms.to_string(),
            ]
        }
    };
    writeln!(out, "{CONVENTION}")?;
    writeln!(out, "{}", param_comment(a, b))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "z_re",
        "z_im",
        "n_terms",
        "m",
        "val_re",
        "val_im",
        "bound_estimate",
        "fallback_terms",
    ])?;
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

fn cmd_coeffs(args: CoeffsArgs, out: &mut dyn Write) -> CmdResult {
    let (a, b) = (&args.params.a.0, &args.params.b.0);
    let table = norlund_coeffs_with_scan(a, b, args.n.max(1), args.pole_scan)?;
    let coeffs = table.coeffs()?;
    writeln!(out, "{}", param_comment(a, b))?;
    writeln!(out, "# psi = {}", fmt_complex(table.psi))?;
    if !a.is_empty() {
        let report = pole_analysis_with_scan(a, b, args.pole_scan)?;
        writeln!(
            out,
            "# pole_a = {}, pole_r = {}",
            fmt_num(report.decay()),
            report.multiplicity
        )?;
        let poles: Vec<String> = report
            .poles
            .iter()
            .map(|p| format!("{}:{}", fmt_complex(p.location), p.multiplicity))
            .collect();
        writeln!(out, "# poles (location:multiplicity) = {}", poles.join(" "))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "g_n"])?;
    for (n, g) in coeffs.iter().enumerate().take(args.n) {
        w.write_record([n.to_string(), fmt_complex(*g)])?;
    }
    w.flush()?;
    Ok(())
}

fn expansion_method(m: MethodArg) -> Result<Method, Error> {
    m.expansion().ok_or_else(|| {
        Error::Unsupported("sweep and rates need an expansion method, not series".into())
    })
}

const RECORD_HEADER: [&str; 10] = [
    "z_re",
    "z_im",
    "method",
    "n_terms",
    "val_re",
    "val_im",
    "ref_re",
    "ref_im",
    "abs_err",
    "weighted_err",
];

fn record_fields(r: &SweepRecord) -> [String; 10] {
    [
        fmt_num(r.z.re),
        fmt_num(r.z.im),
        r.method.name().to_string(),
        r.n_terms.to_string(),
        fmt_num(r.value.re),
        fmt_num(r.value.im),
        fmt_num(r.reference.re),
        fmt_num(r.reference.im),
        fmt_num(r.abs_err),
        fmt_num(r.weighted_err),
    ]
}

fn write_records(
    out: &mut dyn Write,
    comments: &[String],
    panel: Option<&str>,
    records: &[SweepRecord],
    header: bool,
) -> CmdResult {
    for c in comments {
        writeln!(out, "{c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    if header {
        let mut h: Vec<&str> = Vec::new();
        if panel.is_some() {
            h.push("panel");
        }
        h.extend(RECORD_HEADER);
        w.write_record(&h)?;
    }
    for r in records {
        let fields = record_fields(r);
        match panel {
            Some(p) => w.write_record(std::iter::once(p.to_string()).chain(fields))?,
            None => w.write_record(fields)?,
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs, out: &mut dyn Write) -> CmdResult {
    let (a, b) = (&args.params.a.0, &args.params.b.0);
    let method = expansion_method(args.method)?;
    let region = args.region.spec()?;
    let records = sweep(
        method,
        a,
        b,
        &region,
        &args.terms.0,
        &settings(args.m_override)?,
    )?;
    let comments = [CONVENTION.to_string(), param_comment(a, b)];
    match args.out {
        Some(path) => {
            let mut f = io::BufWriter::new(File::create(&path)?);
            write_records(&mut f, &comments, None, &records, true)?;
            f.flush()?;
        }
        None => write_records(out, &comments, None, &records, true)?,
    }
    Ok(())
}

fn cmd_rates(args: RatesArgs, out: &mut dyn Write) -> CmdResult {
    let (a, b) = (&args.params.a.0, &args.params.b.0);
    let method = expansion_method(args.method)?;
    let region = args.region.spec()?;
    let ns = args
        .n_list
        .map(|l| l.0)
        .unwrap_or_else(|| DEFAULT_RATE_NS.to_vec());
    let settings = settings(args.m_override)?;
    let fit = fit_rate(method, a, b, &region, &ns, &settings)?;
    writeln!(out, "{CONVENTION}")?;
    writeln!(out, "{}", param_comment(a, b))?;
    writeln!(
        out,
        "# fit: slope = {}, intercept = {}, r_squared = {}, expected_slope = {}",
        fmt_num(fit.slope),
        fmt_num(fit.intercept),
        fmt_num(fit.r_squared),
        fmt_num(fit.expected_slope)
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n_terms", "sup_err"])?;
    for (n, e) in fit.n_values.iter().zip(&fit.sup_errors) {
        w.write_record([n.to_string(), fmt_num(*e)])?;
    }
    w.flush()?;
    Ok(())
}

/// One panel of a figure: a real interval and the term counts drawn on it.
struct Panel {
    name: &'static str,
    range: (f64, f64),
    terms: &'static [usize],
}

struct Figure {
    file: &'static str,
    title: &'static str,
    method: Method,
    a: &'static [f64],
    b: &'static [f64],
    panels: [Panel; 2],
}

const FIGURE_POINTS: usize = 101;

const FIGURES: [Figure; 5] = [
    Figure {
        file: "fig1.csv",
        title: "1F2(3; 7/2, 5; -z^2/4) against its two-term elementary approximation",
        method: Method::TrigElementary,
        a: &[3.0],
        b: &[3.5, 5.0],
        panels: [
            Panel {
                name: "left",
                range: (0.0, 10.0),
                terms: &[2],
            },
            Panel {
                name: "right",
                range: (10.0, 50.0),
                terms: &[2],
            },
        ],
    },
    Figure {
        file: "fig2.csv",
        title: "1F2(3; 7/2, 5; -z^2/4), 0F1-kernel expansion",
        method: Method::BesselKernel,
        a: &[3.0],
        b: &[3.5, 5.0],
        panels: [
            Panel {
                name: "left",
                range: (0.0, 10.0),
                terms: &[1, 3, 5],
            },
            Panel {
                name: "right",
                range: (10.0, 50.0),
                terms: &[1, 10, 20],
            },
        ],
    },
    Figure {
        file: "fig3.csv",
        title: "1F2(3; 7/2, 5; -z^2/4), trigonometric elementary expansion",
        method: Method::TrigElementary,
        a: &[3.0],
        b: &[3.5, 5.0],
        panels: [
            Panel {
                name: "left",
                range: (0.0, 10.0),
                terms: &[1, 3, 5],
            },
            Panel {
                name: "right",
                range: (10.0, 50.0),
                terms: &[1, 10, 20],
            },
        ],
    },
    Figure {
        file: "fig4.csv",
        title: "2F2(1, 3/2; 2, 3; -z), Kummer-kernel expansion",
        method: Method::KummerKernel,
        a: &[1.0, 1.5],
        b: &[2.0, 3.0],
        panels: [
            Panel {
                name: "left",
                range: (0.0, 50.0),
                terms: &[10, 20, 30],
            },
            Panel {
                name: "right",
                range: (0.0, 50.0),
                terms: &[50, 100, 200],
            },
        ],
    },
    Figure {
        file: "fig5.csv",
        title: "2F2(1, 3/2; 2, 3; -z), exponential elementary expansion",
        method: Method::ExpElementary,
        a: &[1.0, 1.5],
        b: &[2.0, 3.0],
        panels: [
            Panel {
                name: "left",
                range: (0.0, 10.0),
                terms: &[20, 40, 80],
            },
            Panel {
                name: "right",
                range: (10.0, 50.0),
                terms: &[20, 40, 80],
            },
        ],
    },
];

/// Writes `fig1.csv` .. `fig5.csv` into `dir`.
pub fn write_figures(dir: &Path, settings: &Settings) -> Result<(), String> {
    write_figures_inner(dir, settings).map_err(|e| match e {
        Failure::Numerics(e) => e.to_string(),
        Failure::Io(e) => e.to_string(),
        Failure::Csv(e) => e.to_string(),
    })
}

fn write_figures_inner(dir: &Path, settings: &Settings) -> CmdResult {
    std::fs::create_dir_all(dir)?;
    for fig in &FIGURES {
        let a: Vec<Complex64> = fig.a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let b: Vec<Complex64> = fig.b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut f = io::BufWriter::new(File::create(dir.join(fig.file))?);
        let comments = [
            format!("# {}", fig.title),
            CONVENTION.to_string(),
            param_comment(&a, &b),
        ];
        for (i, panel) in fig.panels.iter().enumerate() {
            let region = RegionSpec::real_segment(panel.range, FIGURE_POINTS)?;
            let records = sweep(fig.method, &a, &b, &region, panel.terms, settings)?;
            let comments: &[String] = if i == 0 { &comments } else { &[] };
            write_records(&mut f, comments, Some(panel.name), &records, i == 0)?;
        }
        f.flush()?;
    }
    Ok(())
}

fn cmd_figures(args: FiguresArgs) -> CmdResult {
    let settings = settings(None)?;
    write_figures_inner(&args.out_dir, &settings)
}
