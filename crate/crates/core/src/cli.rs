//! Command-line front end (`hfock`).
//!
//! Exit codes: 0 success, 1 verification failure or numerical breakdown,
//! 2 usage, parse or parameter error, 3 I/O error.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::FockError;
use crate::hlpoly::{self, Parity};
use crate::matrix::ComplexMatrix;
use crate::numeric::{self, format_complex, parse_complex};
use crate::state::{self, StateParams};
use crate::unitary::{self, BosonicParams};
use crate::verify::{self, Tolerances, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hfock", version, about = "Fock-basis matrices of Gaussian unitaries and noisy Gaussian states")]
pub struct Cli {
    /// Output format; polynomial values print as plain text when omitted.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a polynomial family.
    Poly(PolyArgs),
    /// Matrix of U = S(z) D(α) R(φ).
    Unitary(UnitaryArgs),
    /// Density matrix of U ρ_th U†.
    State(StateArgs),
    /// Photon-number distribution and cumulative partial trace.
    Photons(PhotonArgs),
    /// Compare every closed form with its independent reference.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// H_n(x, y)
    Hkdf,
    /// H_n(x, y) / n!
    HkdfScaled,
    /// H_{m,n}(x, y; z, u | τ)
    Hkdf2,
    /// incomplete Hermite polynomial of the chosen parity
    Incomplete,
    /// Mehler kernel, closed form and series
    Mehler,
    /// generalized Laguerre L_n^{(k)}(x)
    Laguerre,
    /// truncated generating function Σ_{n ≤ N} tⁿ/n! H_n(x, y)
    Genfunc,
    /// ∂_x^m ∂_y^n exp(a x² + b x y + c y²)
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
}

fn complex_arg(raw: &str) -> Result<Complex64, String> {
    parse_complex(raw).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(short = 'm', default_value_t = 0)]
    pub m: usize,
    #[arg(short = 'n', default_value_t = 0)]
    pub n: usize,
    /// Laguerre order (may be negative, down to -n).
    #[arg(short = 'k', default_value_t = 0, allow_negative_numbers = true)]
    pub k: i64,
    #[arg(short = 'x', value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub x: Complex64,
    #[arg(short = 'y', value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub y: Complex64,
    #[arg(short = 'z', value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub z: Complex64,
    #[arg(short = 'u', value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub u: Complex64,
    #[arg(short = 'v', value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub v: Complex64,
    #[arg(short = 't', value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub t: Complex64,
    #[arg(long, value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub tau: Complex64,
    #[arg(long, value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub a: Complex64,
    #[arg(long, value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub b: Complex64,
    #[arg(long, value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub c: Complex64,
    #[arg(long, value_enum, default_value = "even")]
    pub parity: ParityArg,
    /// Number of series terms (genfunc, mehler).
    #[arg(long, default_value_t = 80)]
    pub terms: usize,
    /// Mehler only: closed form against the series on a random grid.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Largest |4 y t² v| sampled by --check.
    #[arg(long, default_value_t = 0.8)]
    pub bound: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct GaussianArgs {
    /// Displacement α, e.g. 1+0.3i.
    #[arg(long, value_parser = complex_arg, default_value = "0", allow_hyphen_values = true)]
    pub alpha: Complex64,
    /// Squeeze magnitude r ≥ 0.
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Squeeze phase θ.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
}

#[derive(Debug, Args)]
pub struct UnitaryArgs {
    #[command(flatten)]
    pub gaussian: GaussianArgs,
    /// Rotation angle φ.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub gaussian: GaussianArgs,
    /// Mean thermal photon number N̄ ≥ 0.
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
}

#[derive(Debug, Args)]
pub struct PhotonArgs {
    #[command(flatten)]
    pub gaussian: GaussianArgs,
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    /// Largest photon number reported.
    #[arg(long, default_value_t = 50)]
    pub m_max: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub gaussian: GaussianArgs,
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 15)]
    pub dim: usize,
    /// Last thermal index of the series path.
    #[arg(long)]
    pub jmax: Option<usize>,
    /// One tolerance for every path pair, replacing the defaults.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numeric(String),
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Numeric(_) | CliError::VerifyFailed(_) => EXIT_VERIFY_FAILED,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::VerifyFailed(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<FockError> for CliError {
    fn from(err: FockError) -> Self {
        match err {
            FockError::NonConvergent { .. } | FockError::NormOverflow(_) | FockError::Singular(_) => {
                CliError::Numeric(err.to_string())
            }
            _ => CliError::Usage(err.to_string()),
        }
    }
}

/// Parameters echoed into JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub alpha: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi: Option<f64>,
    pub r: f64,
    pub theta: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nbar: Option<f64>,
}

/// JSON layout of `unitary` and `state` output. `entries` is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub params: ParamsJson,
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_eigenvalue: Option<f64>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> crate::error::Result<ComplexMatrix> {
        let data = self.entries.iter().map(|e| Complex64::new(e[0], e[1])).collect();
        ComplexMatrix::from_row_major(self.dim, self.dim, data)
    }
}

/// JSON layout of `photons` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonsJson {
    pub params: ParamsJson,
    pub m_max: usize,
    pub probabilities: Vec<f64>,
    pub partial_trace: f64,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code. Diagnostics go to standard error.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    if let Err(err) = numeric::max_index_from_env() {
        eprintln!("usage error: {err}");
        return EXIT_USAGE;
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("{err}");
            err.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (text, verdict) = match &cli.command {
        Command::Poly(args) => (cmd_poly(args, cli.format)?, Ok(())),
        Command::Unitary(args) => (cmd_unitary(args, cli.format.unwrap_or(Format::Json))?, Ok(())),
        Command::State(args) => (cmd_state(args, cli.format.unwrap_or(Format::Json))?, Ok(())),
        Command::Photons(args) => (cmd_photons(args, cli.format.unwrap_or(Format::Json))?, Ok(())),
        Command::Verify(args) => cmd_verify(args)?,
    };
    emit(&text, cli.output.as_ref())?;
    verdict
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

fn format_value(value: Complex64, format: Option<Format>) -> String {
    match format {
        None => format!("{}\n", format_complex(value)),
        Some(Format::Json) => to_json(&serde_json::json!({ "value": [value.re, value.im] })),
        Some(Format::Csv) => format!("re,im\n{},{}\n", value.re, value.im),
    }
}

pub fn cmd_poly(args: &PolyArgs, format: Option<Format>) -> Result<String, CliError> {
    let value = match args.family {
        Family::Hkdf => hlpoly::hkdf(args.n, args.x, args.y)?,
        Family::HkdfScaled => hlpoly::hkdf_scaled(args.n, args.x, args.y)?,
        Family::Hkdf2 => hlpoly::hkdf2(args.m, args.n, args.x, args.y, args.z, args.u, args.tau)?,
        Family::Incomplete => {
            let parity = match args.parity {
                ParityArg::Even => Parity::Even,
                ParityArg::Odd => Parity::Odd,
            };
            hlpoly::incomplete_hermite(parity, args.m, args.n, args.x, args.y, args.tau)?
        }
        Family::Laguerre => hlpoly::laguerre_generalized(args.n, args.k, args.x)?,
        Family::Genfunc => hlpoly::gen_func_truncated(args.x, args.y, args.t, args.terms.saturating_sub(1))?.value,
        Family::Mixed => hlpoly::mixed_deriv_quadexp(args.m, args.n, args.a, args.b, args.c, args.x, args.y)?,
        Family::Mehler if args.check => {
            if args.terms == 0 || args.points == 0 {
                return Err(CliError::Usage("--terms and --points must be positive".into()));
            }
            let check = verify::mehler_grid_check(args.points, args.terms, args.bound, args.seed)?;
            return Ok(match format {
                Some(Format::Json) => to_json(&check),
                Some(Format::Csv) => {
                    let mut text = String::from("point,deviation,ratio\n");
                    for (i, d) in check.deviations.iter().enumerate() {
                        text.push_str(&format!("{i},{},{}\n", d[0], d[1]));
                    }
                    text
                }
                None => format!(
                    "points {}  terms {}  max relative error {}  at |4yt²v| = {}\n",
                    check.points,
                    check.terms,
                    numeric::format_real(check.max_deviation),
                    numeric::format_real(check.worst_ratio)
                ),
            });
        }
        Family::Mehler => {
            let closed = hlpoly::mehler_closed(args.x, args.y, args.z, args.v, args.t)?;
            let series = hlpoly::mehler_series(args.x, args.y, args.z, args.v, args.t, args.terms.saturating_sub(1))?;
            return Ok(match format {
                None => format!("closed {}\nseries {}\n", format_complex(closed), format_complex(series.value)),
                Some(Format::Json) => to_json(&serde_json::json!({
                    "closed": [closed.re, closed.im],
                    "series": [series.value.re, series.value.im],
                    "terms": series.terms,
                })),
                Some(Format::Csv) => format!(
                    "form,re,im\nclosed,{},{}\nseries,{},{}\n",
                    closed.re, closed.im, series.value.re, series.value.im
                ),
            });
        }
    };
    Ok(format_value(value, format))
}

fn params_json(g: &GaussianArgs, phi: Option<f64>, nbar: Option<f64>) -> ParamsJson {
    ParamsJson { alpha: [g.alpha.re, g.alpha.im], phi, r: g.r, theta: g.theta, nbar }
}

fn state_params(g: &GaussianArgs, nbar: f64) -> Result<StateParams, CliError> {
    Ok(StateParams::new(g.alpha, g.r, g.theta, nbar)?)
}

/// Row-major CSV with header `m,re_0,im_0,...`.
pub fn matrix_csv(matrix: &ComplexMatrix) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["m".to_string()];
    for n in 0..matrix.cols() {
        header.push(format!("re_{n}"));
        header.push(format!("im_{n}"));
    }
    writer.write_record(&header).expect("in-memory write");
    for m in 0..matrix.rows() {
        let mut record = vec![m.to_string()];
        for v in matrix.row(m) {
            record.push(v.re.to_string());
            record.push(v.im.to_string());
        }
        writer.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Inverse of [`matrix_csv`].
pub fn parse_matrix_csv(text: &str) -> Result<ComplexMatrix, CliError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut data = Vec::new();
    let mut rows = 0;
    let mut cols = 0;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Usage(e.to_string()))?;
        let values: Vec<f64> = record
            .iter()
            .skip(1)
            .map(|f| f.parse::<f64>().map_err(|e| CliError::Usage(format!("{f:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        if !values.len().is_multiple_of(2) {
            return Err(CliError::Usage("odd number of value columns".into()));
        }
        cols = values.len() / 2;
        data.extend(values.chunks(2).map(|p| Complex64::new(p[0], p[1])));
        rows += 1;
    }
    Ok(ComplexMatrix::from_row_major(rows, cols, data)?)
}

fn matrix_json(params: ParamsJson, matrix: &ComplexMatrix, with_state_fields: bool) -> Result<MatrixJson, CliError> {
    let (trace, min_eigenvalue) = if with_state_fields {
        let t = matrix.trace();
        (Some([t.re, t.im]), Some(matrix.min_hermitian_eigenvalue()?))
    } else {
        (None, None)
    };
    Ok(MatrixJson {
        params,
        dim: matrix.rows(),
        entries: matrix.as_slice().iter().map(|v| [v.re, v.im]).collect(),
        trace,
        min_eigenvalue,
    })
}

pub fn cmd_unitary(args: &UnitaryArgs, format: Format) -> Result<String, CliError> {
    let g = &args.gaussian;
    let params = BosonicParams::new(g.alpha, args.phi, g.r, g.theta)?;
    let matrix = unitary::unitary_matrix(&params, args.dim)?;
    Ok(match format {
        Format::Csv => matrix_csv(&matrix),
        Format::Json => to_json(&matrix_json(params_json(g, Some(args.phi), None), &matrix, false)?),
    })
}

pub fn cmd_state(args: &StateArgs, format: Format) -> Result<String, CliError> {
    let params = state_params(&args.gaussian, args.nbar)?;
    let matrix = state::rho_matrix(&params, args.dim)?;
    Ok(match format {
        Format::Csv => matrix_csv(&matrix),
        Format::Json => to_json(&matrix_json(params_json(&args.gaussian, None, Some(args.nbar)), &matrix, true)?),
    })
}

pub fn cmd_photons(args: &PhotonArgs, format: Format) -> Result<String, CliError> {
    let params = state_params(&args.gaussian, args.nbar)?;
    let dist = state::photon_distribution(&params, args.m_max)?;
    let probabilities = dist.clipped();
    Ok(match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(["m", "probability", "partial_trace"]).expect("in-memory write");
            let mut cumulative = 0.0;
            for (m, p) in probabilities.iter().enumerate() {
                cumulative += p;
                writer.write_record([m.to_string(), p.to_string(), cumulative.to_string()]).expect("in-memory write");
            }
            String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ASCII output")
        }
        Format::Json => to_json(&PhotonsJson {
            params: params_json(&args.gaussian, None, Some(args.nbar)),
            m_max: args.m_max,
            partial_trace: probabilities.iter().sum(),
            probabilities,
        }),
    })
}

/// Runs the comparison and returns the JSON report together with the verdict.
pub fn cmd_verify(args: &VerifyArgs) -> Result<(String, Result<(), CliError>), CliError> {
    let params = state_params(&args.gaussian, args.nbar)?;
    let tolerances = match args.tol {
        Some(tol) if !(tol.is_finite() && tol >= 0.0) => {
            return Err(CliError::Usage(format!("tolerance must be finite and >= 0, got {tol}")))
        }
        Some(tol) => Tolerances::uniform(tol),
        None => Tolerances::default(),
    };
    let config = VerifyConfig { dim: args.dim, jmax: args.jmax, tolerances };
    let report = verify::run(&params, args.phi, &config)?;
    let verdict = if report.all_passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.pairs.iter().filter(|p| !p.passed).map(|p| p.name.as_str()).collect();
        Err(CliError::VerifyFailed(failed.join(", ")))
    };
    Ok((to_json(&report), verdict))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("hfock").chain(args.iter().copied())).unwrap()
    }

    fn poly_text(args: &[&str]) -> String {
        let cli = parse(args);
        match &cli.command {
            Command::Poly(p) => cmd_poly(p, cli.format).unwrap(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn poly_examples() {
        assert_eq!(poly_text(&["poly", "--family", "hkdf", "-n", "2", "-x", "1", "-y", "1"]), "3\n");
        let text =
            poly_text(&["poly", "--family", "hkdf2", "-m", "1", "-n", "1", "--tau", "0.4", "-x", "2", "-z", "-1.5+i"]);
        assert_eq!(text, "-2.6+2i\n");
        assert_eq!(poly_text(&["poly", "--family", "laguerre", "-n", "2", "-k", "-1", "-x", "1"]), "-0.5\n");
    }

    #[test]
    fn bad_literals_are_usage_errors() {
        assert!(Cli::try_parse_from(["hfock", "poly", "--family", "hkdf", "-x", "1 + 2i"]).is_err());
        assert!(Cli::try_parse_from(["hfock", "state", "--alpha", "one"]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 / 3.0, -(j as f64) * 1e-17));
        let back = parse_matrix_csv(&matrix_csv(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(CliError::from(FockError::Domain("x".into())).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::from(FockError::NormOverflow(1.0)).exit_code(), EXIT_VERIFY_FAILED);
        assert_eq!(CliError::Io("x".into()).exit_code(), EXIT_IO);
    }
}
