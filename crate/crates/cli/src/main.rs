//! `threegap` — command-line front end for the gap-statistics library.
//!
//! Subcommands:
//!
//! * `gaps` — inspect the three-gap structure of `{n·α}` for one `α`.
//! * `figure1` — empirical vs. limiting gap law `g₁` over a `λ` grid (CSV
//!   plus a JSON summary with the max deviation and its error envelope).
//! * `figure2` — the joint limit law `g₂` over a `(λ₁, λ₂)` grid with
//!   region tags.
//! * `empirical` — finite-`Q` window averages `g_k^{β,η}(λ; Q)`.
//! * `closedform` — the limit law `g₁(λ)` over a grid.
//! * `g2` — the joint limit law at chosen points.
//! * `convergence` — empirical-vs-limit error against increasing `Q`, with
//!   a fitted log-log slope (exit code 3 if convergence fails).
//! * `lemma2` — Farey-pair equidistribution discrepancies against `Q`.
//! * `montecarlo` — seeded Monte Carlo estimate with standard error.
//!
//! Exit codes: `0` success, `1` usage error, `2` domain or I/O error
//! (degenerate `α`, insufficient precision, unwritable path), `3` tolerance
//! or validation failure.
//!
//! Output is CSV by default (`--format json` for JSON). Every file starts
//! with a `#`-prefixed metadata block echoing the effective configuration —
//! including the `λ` values after quantization to the `10⁻⁶` grid used by
//! the exact arc sums — so identical invocations produce byte-identical
//! files. Floats are printed with 12 significant digits.

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use threegap::{
    classify_region, empirical_g1_curve, empirical_gk, g1, g2, gap_triple, gap_word_list,
    lemma2_discrepancy, monte_carlo_gk, quadrature_gk, sigma_permutation, AlphaValue, Error,
    LambdaVector, TestFunction,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "threegap",
    version,
    about = "Gap statistics of {n*alpha}: exact finite-Q averages, limit laws, and validation studies"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TestFnArg {
    /// f = 1 on the parameter triangle
    One,
    /// f(x, y) = x
    X,
    /// f(x, y) = x*y
    Xy,
    /// f(x, y) = 1/(x*y) on the shaved triangle (requires --delta)
    Invxy,
}

#[derive(Subcommand)]
enum Cmd {
    /// Farey neighbors, gap lengths/counts, sigma, and gap words for one alpha
    Gaps {
        /// alpha as a decimal string ("1.41421356237309504880") or exact rational "p/q"
        #[arg(long)]
        alpha: String,
        /// number of points Q
        #[arg(long)]
        q: u64,
        /// write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical vs. limiting g1 over a lambda grid, with a JSON summary
    Figure1 {
        #[arg(long, default_value_t = 1000)]
        q: u64,
        /// window start, as a rational "a/b" (or decimal)
        #[arg(long, default_value = "1/3")]
        beta: String,
        /// window length, as a rational "a/b" (or decimal)
        #[arg(long, default_value = "1/10")]
        eta: String,
        /// lambda grid: comma-separated values and/or min:max:step ranges
        #[arg(long, default_value = "0:5:0.01")]
        lambda: String,
        /// output path (the summary goes to "<out>.summary.json")
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// The joint limit law g2 over a (lambda1, lambda2) grid with region tags
    Figure2 {
        /// per-dimension grids, comma-separated (value or min:max:step each)
        #[arg(long, default_value = "0:3:0.05,0:3:0.05")]
        lambda: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Finite-Q window averages g_k^{beta,eta}(lambda; Q)
    Empirical {
        #[arg(long, default_value = "0")]
        beta: String,
        #[arg(long, default_value = "1")]
        eta: String,
        #[arg(long)]
        q: u64,
        /// k = 1: a single grid; k > 1: exactly k comma-separated components
        /// (values or ranges), evaluated on their cartesian product
        #[arg(long)]
        lambda: String,
        /// number of consecutive gaps (default 1)
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// The limit law g1 over a lambda grid
    Closedform {
        #[arg(long, default_value = "0:5:0.01")]
        lambda: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// The joint limit law g2 at chosen (lambda1, lambda2) points
    G2 {
        /// two comma-separated components (value or min:max:step each)
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Empirical-vs-limit error against increasing Q, with fitted slope
    Convergence {
        /// one lambda vector: k comma-separated values
        #[arg(long, default_value = "0.5")]
        lambda: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "1/3")]
        beta: String,
        #[arg(long, default_value = "1/10")]
        eta: String,
        /// increasing list of orders
        #[arg(long, default_value = "250,1000,4000")]
        q_list: String,
        /// echoed into the output header (the arc sums are deterministic)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Farey-sum discrepancy |S_Q(f) - (6/pi^2) integral| against Q
    Lemma2 {
        #[arg(long, value_enum, default_value = "one")]
        test_fn: TestFnArg,
        /// shave parameter for --test-fn invxy (0 < delta < 1/2)
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value = "0")]
        beta: String,
        #[arg(long, default_value = "1")]
        eta: String,
        #[arg(long, default_value = "100,400,1600")]
        q_list: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Seeded Monte Carlo estimate of g_k^{beta,eta}(lambda; Q)
    Montecarlo {
        #[arg(long, default_value = "0")]
        beta: String,
        #[arg(long, default_value = "1")]
        eta: String,
        #[arg(long)]
        q: u64,
        /// one lambda vector: k comma-separated values
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
}

// ---------------------------------------------------------------------------
// Error plumbing (exit codes 1/2/3)
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct CliError {
    code: i32,
    msg: String,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError {
        code: 1,
        msg: msg.into(),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ToleranceNotMet { .. } => 3,
            _ => 2,
        };
        CliError {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 2,
            msg: e.to_string(),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's default usage exit code is 2; this tool reserves 2 for
            // domain errors, so remap usage to 1 (help/version stay 0).
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli.cmd) {
        eprintln!("error: {}", e.msg);
        std::process::exit(e.code);
    }
}

// ---------------------------------------------------------------------------
// Number formatting and parsing
// ---------------------------------------------------------------------------

/// Formats like C's `%.12g`: 12 significant digits, fixed or scientific
/// notation by magnitude, trailing zeros stripped.
fn fmt_g(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let (_, exp) = sci
        .split_once('e')
        .expect("always present for finite floats");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if !(-4..12).contains(&exp) {
        let (mant, _) = sci.split_once('e').unwrap();
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{exp:+03}")
    } else {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

/// Parses "a/b", an integer, or a short decimal as an exact rational.
fn parse_rational(s: &str) -> Result<Rational64, CliError> {
    let s = s.trim();
    let bad = || {
        usage(format!(
            "cannot parse '{s}' as a rational (use a/b, an integer, or a decimal)"
        ))
    };
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(usage(format!("zero denominator in '{s}'")));
        }
        Ok(Rational64::new(n, d))
    } else if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let frac: i64 = frac.parse().map_err(|_| bad())?;
        let num = (int as i128) * (den as i128)
            + if negative {
                -(frac as i128)
            } else {
                frac as i128
            };
        let num = i64::try_from(num).map_err(|_| bad())?;
        Ok(Rational64::new(num, den))
    } else {
        let n: i64 = s.parse().map_err(|_| bad())?;
        Ok(Rational64::from_integer(n))
    }
}

/// Quantizes a threshold to the 10^-6 grid used by the exact arc sums.
fn quantize_lambda(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Expands one grid component: a plain value or "min:max:step".
fn parse_grid_component(s: &str) -> Result<Vec<f64>, CliError> {
    let s = s.trim();
    let parse_f = |t: &str| -> Result<f64, CliError> {
        let v: f64 = t
            .trim()
            .parse()
            .map_err(|_| usage(format!("cannot parse '{t}' as a number")))?;
        if !v.is_finite() || v < 0.0 {
            return Err(usage(format!(
                "lambda values must be finite and >= 0, got '{t}'"
            )));
        }
        Ok(v)
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!(
                "range '{s}' must have the form min:max:step"
            )));
        }
        let (min, max, step) = (parse_f(parts[0])?, parse_f(parts[1])?, parse_f(parts[2])?);
        if step <= 0.0 || max < min {
            return Err(usage(format!("range '{s}' needs step > 0 and max >= min")));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(usage(format!(
                "range '{s}' expands to {count} points (limit 10^6)"
            )));
        }
        Ok((0..count)
            .map(|i| quantize_lambda(min + i as f64 * step))
            .collect())
    } else {
        Ok(vec![quantize_lambda(parse_f(s)?)])
    }
}

/// Parses `--lambda` into grid points of dimension `k` (quantized): for
/// `k = 1` all comma-separated components merge into one grid; for `k > 1`
/// there must be exactly `k` components, combined as a cartesian product in
/// row-major order (first component slowest).
fn parse_lambda_grid(spec: &str, k: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let components: Vec<Vec<f64>> = spec
        .split(',')
        .map(parse_grid_component)
        .collect::<Result<_, _>>()?;
    let dims: Vec<Vec<f64>> = if k == 1 {
        vec![components.into_iter().flatten().collect()]
    } else {
        if components.len() != k {
            return Err(usage(format!(
                "--lambda needs exactly {k} comma-separated components for k = {k}, got {}",
                components.len()
            )));
        }
        components
    };
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for dim in &dims {
        if dim.is_empty() {
            return Err(usage("empty lambda grid"));
        }
        let mut next = Vec::with_capacity(points.len() * dim.len());
        for p in &points {
            for &v in dim {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        points = next;
        if points.len() > 1_000_000 {
            return Err(usage("lambda grid exceeds 10^6 points"));
        }
    }
    Ok(points)
}

/// Parses `--lambda` as a single k-vector (no ranges).
fn parse_lambda_vector(spec: &str, k: Option<usize>) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|t| {
            let grid = parse_grid_component(t)?;
            if grid.len() != 1 {
                return Err(usage(format!(
                    "'{t}': ranges are not allowed here; give k plain values"
                )));
            }
            Ok(grid[0])
        })
        .collect::<Result<_, _>>()?;
    if let Some(k) = k {
        if values.len() != k {
            return Err(usage(format!(
                "--lambda has {} values but --k = {k}",
                values.len()
            )));
        }
    }
    Ok(values)
}

fn parse_q_list(spec: &str) -> Result<Vec<u64>, CliError> {
    let qs: Vec<u64> = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("cannot parse '{t}' as an order Q")))
        })
        .collect::<Result<_, _>>()?;
    if qs.is_empty() || !qs.windows(2).all(|w| w[0] < w[1]) {
        return Err(usage(
            "--q-list must be a strictly increasing list of orders",
        ));
    }
    Ok(qs)
}

fn parse_alpha(s: &str) -> Result<AlphaValue, CliError> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n
            .trim()
            .parse()
            .map_err(|_| usage(format!("cannot parse '{s}' as a rational")))?;
        let d: i64 = d
            .trim()
            .parse()
            .map_err(|_| usage(format!("cannot parse '{s}' as a rational")))?;
        Ok(AlphaValue::from_rational(n, d)?)
    } else {
        Ok(AlphaValue::from_decimal_str(s)?)
    }
}

fn fmt_rational(r: Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn join_lambdas(vals: &[f64]) -> String {
    vals.iter().map(|&v| fmt_g(v)).collect::<Vec<_>>().join(",")
}

// ---------------------------------------------------------------------------
// Output assembly
// ---------------------------------------------------------------------------

#[derive(Clone)]
enum Cell {
    Num(f64),
    Int(u64),
    Str(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_g(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Str(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Str(s) => json!(s),
        }
    }
}

/// A metadata block plus a fixed-schema table, serializable as CSV or JSON.
struct Table {
    meta: Vec<(&'static str, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(subcommand: &str, columns: Vec<&'static str>) -> Self {
        Table {
            meta: vec![
                ("tool", format!("threegap {VERSION}")),
                ("subcommand", subcommand.to_string()),
            ],
            columns,
            rows: Vec::new(),
        }
    }

    fn meta(&mut self, key: &'static str, value: impl Into<String>) -> &mut Self {
        self.meta.push((key, value.into()));
        self
    }

    fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    fn render(&self, format: OutFormat) -> String {
        match format {
            OutFormat::Csv => {
                let mut s = String::new();
                for (k, v) in &self.meta {
                    let _ = writeln!(s, "# {k} = {v}");
                }
                let _ = writeln!(s, "{}", self.columns.join(","));
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    let _ = writeln!(s, "{}", cells.join(","));
                }
                s
            }
            OutFormat::Json => {
                let meta: serde_json::Map<String, serde_json::Value> = self
                    .meta
                    .iter()
                    .map(|(k, v)| (k.to_string(), json!(v)))
                    .collect();
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| json!(row.iter().map(Cell::json).collect::<Vec<_>>()))
                    .collect();
                let doc = json!({ "metadata": meta, "columns": self.columns, "rows": rows });
                let mut s = serde_json::to_string_pretty(&doc).expect("json serialization");
                s.push('\n');
                s
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// Least-squares slope of `ln(err)` against `ln(Q)`.
fn loglog_slope(points: &[(u64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, e)| e > 0.0)
        .map(|&(q, e)| ((q as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Gaps { alpha, q, out } => cmd_gaps(&alpha, q, &out),
        Cmd::Figure1 {
            q,
            beta,
            eta,
            lambda,
            out,
            format,
        } => cmd_figure1(q, &beta, &eta, &lambda, &out, format),
        Cmd::Figure2 {
            lambda,
            out,
            format,
        } => cmd_g2_grid("figure2", &lambda, &out, format),
        Cmd::Empirical {
            beta,
            eta,
            q,
            lambda,
            k,
            out,
            format,
        } => cmd_empirical(&beta, &eta, q, &lambda, k, &out, format),
        Cmd::Closedform {
            lambda,
            out,
            format,
        } => cmd_closedform(&lambda, &out, format),
        Cmd::G2 {
            lambda,
            out,
            format,
        } => cmd_g2_grid("g2", &lambda, &out, format),
        Cmd::Convergence {
            lambda,
            k,
            beta,
            eta,
            q_list,
            seed,
            out,
            format,
        } => cmd_convergence(&lambda, k, &beta, &eta, &q_list, seed, &out, format),
        Cmd::Lemma2 {
            test_fn,
            delta,
            beta,
            eta,
            q_list,
            out,
            format,
        } => cmd_lemma2(test_fn, delta, &beta, &eta, &q_list, &out, format),
        Cmd::Montecarlo {
            beta,
            eta,
            q,
            lambda,
            k,
            samples,
            seed,
            out,
            format,
        } => cmd_montecarlo(&beta, &eta, q, &lambda, k, samples, seed, &out, format),
    }
}

fn cmd_gaps(alpha_str: &str, q: u64, out: &Option<PathBuf>) -> Result<(), CliError> {
    let alpha = parse_alpha(alpha_str)?;
    let triple = gap_triple(&alpha, q)?;
    let sigma = sigma_permutation(&alpha, q)?;
    let pair = triple.pair();

    let mut s = String::new();
    let _ = writeln!(s, "# tool = threegap {VERSION}");
    let _ = writeln!(s, "# subcommand = gaps");
    let _ = writeln!(s, "# alpha = {alpha_str}");
    let _ = writeln!(s, "# q = {q}");
    let _ = writeln!(
        s,
        "neighbors: {}/{} < alpha mod 1 < {}/{}",
        pair.a1(),
        pair.q1(),
        pair.a2(),
        pair.q2()
    );
    let _ = writeln!(
        s,
        "gap A: length {}, count {}",
        fmt_g(triple.length_a_f64()),
        triple.count_a()
    );
    let _ = writeln!(
        s,
        "gap B: length {}, count {}",
        fmt_g(triple.length_b_f64()),
        triple.count_b()
    );
    let _ = writeln!(
        s,
        "gap C: length {}, count {}",
        fmt_g(triple.length_c_f64()),
        triple.count_c()
    );
    let sigma_str: Vec<String> = sigma.values().iter().map(|v| v.to_string()).collect();
    let _ = writeln!(s, "sigma: {}", sigma_str.join(" "));
    for k in 1..=3usize.min(q as usize) {
        let words = gap_word_list(&alpha, q, k)?;
        let list: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        let _ = writeln!(s, "G_{k}: {}", list.join(","));
    }
    emit(out, &s)
}

fn cmd_figure1(
    q: u64,
    beta: &str,
    eta: &str,
    lambda: &str,
    out: &Path,
    format: OutFormat,
) -> Result<(), CliError> {
    let beta_r = parse_rational(beta)?;
    let eta_r = parse_rational(eta)?;
    let grid: Vec<f64> = parse_lambda_grid(lambda, 1)?
        .into_iter()
        .map(|p| p[0])
        .collect();
    let empirical = empirical_g1_curve(beta_r, eta_r, q, &grid)?;

    let mut table = Table::new(
        "figure1",
        vec!["lambda", "empirical", "closed_form", "abs_diff"],
    );
    table
        .meta("q", q.to_string())
        .meta("beta", fmt_rational(beta_r))
        .meta("eta", fmt_rational(eta_r))
        .meta("lambda_grid", lambda.to_string())
        .meta("lambda_quantization", "1e-6");
    let mut max_diff = 0.0f64;
    for (&lam, &emp) in grid.iter().zip(&empirical) {
        let closed = g1(lam);
        let diff = (emp - closed).abs();
        max_diff = max_diff.max(diff);
        table.row(vec![
            Cell::Num(lam),
            Cell::Num(emp),
            Cell::Num(closed),
            Cell::Num(diff),
        ]);
    }
    emit(&Some(out.to_path_buf()), &table.render(format))?;

    // The deviation envelope (1 + λ_max) · Q^(-0.4) / η: the convergence
    // rate is Q^(ε-1/2), so exponent -0.4 is a conservative finite-Q check.
    let lambda_max = grid.iter().cloned().fold(0.0f64, f64::max);
    let eta_f = *eta_r.numer() as f64 / *eta_r.denom() as f64;
    let envelope = (1.0 + lambda_max) * (q as f64).powf(-0.4) / eta_f;
    let summary = json!({
        "tool": format!("threegap {VERSION}"),
        "subcommand": "figure1",
        "q": q,
        "beta": fmt_rational(beta_r),
        "eta": fmt_rational(eta_r),
        "lambda_grid": lambda,
        "rows": grid.len(),
        "max_abs_diff": max_diff,
        "envelope_exponent": -0.4,
        "envelope": envelope,
        "within_envelope": max_diff <= envelope,
    });
    let mut summary_path = out.as_os_str().to_owned();
    summary_path.push(".summary.json");
    let mut text = serde_json::to_string_pretty(&summary).expect("json serialization");
    text.push('\n');
    std::fs::write(PathBuf::from(summary_path), text)?;
    Ok(())
}

fn cmd_g2_grid(
    name: &'static str,
    lambda: &str,
    out: &Option<PathBuf>,
    format: OutFormat,
) -> Result<(), CliError> {
    let points = parse_lambda_grid(lambda, 2)?;
    let mut table = Table::new(name, vec!["lambda1", "lambda2", "g2", "region"]);
    table
        .meta("lambda_grid", lambda.to_string())
        .meta("lambda_quantization", "1e-6");
    for p in &points {
        let (l1, l2) = (p[0], p[1]);
        let value = g2(l1, l2);
        let region = classify_region(l1, l2)?;
        table.row(vec![
            Cell::Num(l1),
            Cell::Num(l2),
            Cell::Num(value),
            Cell::Str(region.to_string()),
        ]);
    }
    emit(out, &table.render(format))
}

fn cmd_empirical(
    beta: &str,
    eta: &str,
    q: u64,
    lambda: &str,
    k: Option<usize>,
    out: &Option<PathBuf>,
    format: OutFormat,
) -> Result<(), CliError> {
    let beta_r = parse_rational(beta)?;
    let eta_r = parse_rational(eta)?;
    let k = k.unwrap_or(1);
    if k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let points = parse_lambda_grid(lambda, k)?;

    let mut columns: Vec<&'static str> = Vec::new();
    const LAMBDA_COLS: [&str; 8] = [
        "lambda1", "lambda2", "lambda3", "lambda4", "lambda5", "lambda6", "lambda7", "lambda8",
    ];
    if k == 1 {
        columns.push("lambda");
    } else {
        if k > LAMBDA_COLS.len() {
            return Err(usage(format!("--k at most {}", LAMBDA_COLS.len())));
        }
        columns.extend(&LAMBDA_COLS[..k]);
    }
    columns.push("value");

    let mut table = Table::new("empirical", columns);
    table
        .meta("q", q.to_string())
        .meta("beta", fmt_rational(beta_r))
        .meta("eta", fmt_rational(eta_r))
        .meta("k", k.to_string())
        .meta("lambda_grid", lambda.to_string())
        .meta("lambda_quantization", "1e-6");

    if k == 1 {
        let grid: Vec<f64> = points.iter().map(|p| p[0]).collect();
        let values = empirical_g1_curve(beta_r, eta_r, q, &grid)?;
        for (&lam, &v) in grid.iter().zip(&values) {
            table.row(vec![Cell::Num(lam), Cell::Num(v)]);
        }
    } else {
        for p in &points {
            let lv = LambdaVector::new(p.clone())?;
            let v = empirical_gk(beta_r, eta_r, q, &lv)?;
            let mut row: Vec<Cell> = p.iter().map(|&x| Cell::Num(x)).collect();
            row.push(Cell::Num(v));
            table.row(row);
        }
    }
    emit(out, &table.render(format))
}

fn cmd_closedform(lambda: &str, out: &Option<PathBuf>, format: OutFormat) -> Result<(), CliError> {
    let grid: Vec<f64> = parse_lambda_grid(lambda, 1)?
        .into_iter()
        .map(|p| p[0])
        .collect();
    let mut table = Table::new("closedform", vec!["lambda", "g1"]);
    table
        .meta("lambda_grid", lambda.to_string())
        .meta("lambda_quantization", "1e-6");
    for &lam in &grid {
        table.row(vec![Cell::Num(lam), Cell::Num(g1(lam))]);
    }
    emit(out, &table.render(format))
}

#[allow(clippy::too_many_arguments)]
fn cmd_convergence(
    lambda: &str,
    k: Option<usize>,
    beta: &str,
    eta: &str,
    q_list: &str,
    seed: u64,
    out: &Option<PathBuf>,
    format: OutFormat,
) -> Result<(), CliError> {
    let beta_r = parse_rational(beta)?;
    let eta_r = parse_rational(eta)?;
    let lams = parse_lambda_vector(lambda, k)?;
    let qs = parse_q_list(q_list)?;
    let lv = LambdaVector::new(lams.clone())?;

    // Reference value: closed form where available, quadrature above k = 2.
    let reference = match lams.len() {
        1 => g1(lams[0]),
        2 => g2(lams[0], lams[1]),
        _ => quadrature_gk(&lv)?.value,
    };

    let mut table = Table::new(
        "convergence",
        vec!["q", "empirical", "reference", "abs_error"],
    );
    table
        .meta("lambda", join_lambdas(&lams))
        .meta("k", lams.len().to_string())
        .meta("beta", fmt_rational(beta_r))
        .meta("eta", fmt_rational(eta_r))
        .meta("seed", seed.to_string())
        .meta("lambda_quantization", "1e-6");

    let mut errors: Vec<(u64, f64)> = Vec::new();
    for &q in &qs {
        let emp = empirical_gk(beta_r, eta_r, q, &lv)?;
        let err = (emp - reference).abs();
        errors.push((q, err));
        table.row(vec![
            Cell::Int(q),
            Cell::Num(emp),
            Cell::Num(reference),
            Cell::Num(err),
        ]);
    }

    let slope = loglog_slope(&errors);
    // Validation: errors must vanish identically (a collapse case such as
    // λ = 0) or decrease strictly with a fitted slope at worst -0.4.
    let all_zero = errors.iter().all(|&(_, e)| e <= 1e-14);
    let decreasing = errors.windows(2).all(|w| w[1].1 < w[0].1);
    let pass = all_zero || (decreasing && slope <= -0.4);
    table.meta("fitted_slope", fmt_g(slope));
    table.meta("validation", if pass { "pass" } else { "fail" });
    emit(out, &table.render(format))?;

    if !pass {
        return Err(CliError {
            code: 3,
            msg: format!(
                "convergence validation failed: errors {} with fitted slope {}",
                if decreasing {
                    "decrease"
                } else {
                    "do not decrease strictly"
                },
                fmt_g(slope)
            ),
        });
    }
    Ok(())
}

fn cmd_lemma2(
    test_fn: TestFnArg,
    delta: f64,
    beta: &str,
    eta: &str,
    q_list: &str,
    out: &Option<PathBuf>,
    format: OutFormat,
) -> Result<(), CliError> {
    let beta_r = parse_rational(beta)?;
    let eta_r = parse_rational(eta)?;
    let qs = parse_q_list(q_list)?;
    let tf = match test_fn {
        TestFnArg::One => TestFunction::One,
        TestFnArg::X => TestFunction::X,
        TestFnArg::Xy => TestFunction::Xy,
        TestFnArg::Invxy => TestFunction::InvXy { delta },
    };

    let mut table = Table::new("lemma2", vec!["q", "discrepancy"]);
    table
        .meta("test_fn", tf.to_string())
        .meta("beta", fmt_rational(beta_r))
        .meta("eta", fmt_rational(eta_r));
    let mut errors: Vec<(u64, f64)> = Vec::new();
    for &q in &qs {
        let d = lemma2_discrepancy(tf, beta_r, eta_r, q)?;
        errors.push((q, d));
        table.row(vec![Cell::Int(q), Cell::Num(d)]);
    }
    table.meta("fitted_slope", fmt_g(loglog_slope(&errors)));
    emit(out, &table.render(format))
}

#[allow(clippy::too_many_arguments)]
fn cmd_montecarlo(
    beta: &str,
    eta: &str,
    q: u64,
    lambda: &str,
    k: Option<usize>,
    samples: u64,
    seed: u64,
    out: &Option<PathBuf>,
    format: OutFormat,
) -> Result<(), CliError> {
    let beta_r = parse_rational(beta)?;
    let eta_r = parse_rational(eta)?;
    let lams = parse_lambda_vector(lambda, k)?;
    let lv = LambdaVector::new(lams.clone())?;
    let mc = monte_carlo_gk(beta_r, eta_r, q, &lv, samples, seed)?;

    let mut table = Table::new(
        "montecarlo",
        vec!["estimate", "std_error", "samples", "seed"],
    );
    table
        .meta("q", q.to_string())
        .meta("beta", fmt_rational(beta_r))
        .meta("eta", fmt_rational(eta_r))
        .meta("k", lams.len().to_string())
        .meta("lambda", join_lambdas(&lams))
        .meta("lambda_quantization", "1e-6");
    table.row(vec![
        Cell::Num(mc.estimate),
        Cell::Num(mc.std_error),
        Cell::Int(mc.samples),
        Cell::Int(mc.seed),
    ]);
    emit(out, &table.render(format))
}

// ---------------------------------------------------------------------------
