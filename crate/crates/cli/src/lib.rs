//! Command-line front end for `tongue-lab`.
//!
//! [`run_with`] is the whole program; `main` only wires it to the process's
//! streams. Exit codes: 0 on success, 2 for usage errors, 3 when a numerical
//! routine fails (bracketing, degenerate witness, and so on).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use tongue_lab::asymptotics::{fit_contact, slopes, width_fit_rows};
use tongue_lab::circle_map::{FamilyKind, FamilySpec, ParamPoint};
use tongue_lab::fmt::g17;
use tongue_lab::guided::{degree_check, DEFAULT_DEGREE_TOL};
use tongue_lab::raster::{render, RasterConfig, RasterMode};
use tongue_lab::rotation::{semiconjugacy_profile, staircase, trans_enclosure, DEFAULT_ITERATIONS};
use tongue_lab::series::{guide_series, parabolic_data, width_coefficient, GuideKind, DEFAULT_ORDER};
use tongue_lab::tongue::{Side, TongueSample, TongueSolver};
use tongue_lab::{Error, Fraction};

mod config;

use config::FileConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "TONGUE_LAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.name(),
            CliError::Usage(_) => "Usage",
            CliError::Io(_) => "Io",
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "tongue-lab", version, about = "Rotation numbers and Arnol'd tongues of circle-map families")]
pub struct Cli {
    /// JSON file with default values for any long flag (snake_case keys).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker threads; 0 means one per core. Defaults to 1, except for `render`.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    /// Print records as JSON instead of key=value lines or CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// standard, blaschke, angle or fourier.
    #[arg(long, value_parser = config::parse_kind)]
    family: Option<FamilyKind>,
    /// Fourier term `K,RE,IM` (repeatable); implies `--family fourier`.
    #[arg(long = "fourier-term", value_name = "K,RE,IM", value_parser = config::parse_term, allow_hyphen_values = true)]
    fourier_terms: Vec<[f64; 3]>,
    /// Number of terms kept for the angle family.
    #[arg(long)]
    angle_terms: Option<usize>,
}

#[derive(Debug, Args)]
struct FractionArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: Option<i64>,
    #[arg(long)]
    q: Option<i64>,
}

#[derive(Debug, Args)]
struct GuideArgs {
    /// standard or blaschke.
    #[arg(long, value_parser = parse_guide)]
    guide: Option<GuideKind>,
    #[command(flatten)]
    frac: FractionArgs,
    /// Truncation order of the series.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certified enclosure of the translation number of F_{t,a}.
    Trans {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        /// Orbit length.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Devil's staircase t ↦ Trans(F_{t,a}) as CSV `t,trans`.
    Staircase {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Left and right boundaries of one tongue at one amplitude.
    Boundary {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        frac: FractionArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        /// Also print the parabolic witness at both boundaries.
        #[arg(long)]
        witness: bool,
    },
    /// Tongue boundaries over a list of amplitudes, as CSV `a,t_left,t_right,width`.
    Trace {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        frac: FractionArgs,
        /// Comma-separated amplitudes; alternative to --a-min/--a-max/--count.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a_values: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a_max: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// First-order opening slopes of a tongue.
    Slopes {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        frac: FractionArgs,
    },
    /// Power-law fit of tongue widths read from a `trace` CSV.
    WidthFit {
        /// CSV with columns a,t_left,t_right,width.
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        /// Print the log-log table `a,width,log_a,log_width` instead of the fit.
        #[arg(long)]
        csv: bool,
    },
    /// Coefficients of a guide map (or its iterate) as CSV `k,re,im`.
    Series {
        #[command(flatten)]
        guide: GuideArgs,
        /// Print the coefficients of this iterate instead.
        #[arg(long)]
        iterate: Option<u32>,
    },
    /// Parabolic multiplicity and leading coefficient of f^q − id for a guide.
    Parabolic {
        #[command(flatten)]
        guide: GuideArgs,
    },
    /// Fourier spectrum of the order-n coefficient in a, as CSV `k,|c_k|`.
    DegreeCheck {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Parameter-plane raster as binary PGM.
    Render {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        t_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t_max: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a_max: Option<f64>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        /// Orbit length per pixel in gray mode.
        #[arg(long)]
        n: Option<u64>,
        /// `gray` (translation number) or `mask` (listed tongues).
        #[arg(long)]
        mode: Option<String>,
        /// Tongue `p/q` to mask (repeatable).
        #[arg(long = "tongue")]
        tongues: Vec<String>,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Poincaré averages Φ_N on [0, 1] as CSV `x,phi`.
    Profile {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        /// Number of averaged iterates.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        grid: Option<usize>,
    },
}

fn parse_guide(s: &str) -> Result<GuideKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "standard" => Ok(GuideKind::Standard),
        "blaschke" => Ok(GuideKind::Blaschke),
        _ => Err(format!("unknown guide `{s}` (expected standard or blaschke)")),
    }
}

fn need<T>(flag: Option<T>, file: Option<T>, name: &str) -> CliResult<T> {
    flag.or(file).ok_or_else(|| CliError::Usage(format!("missing --{name}")))
}

fn fraction(args: &FractionArgs, file: &FileConfig) -> CliResult<Fraction> {
    let p = need(args.p, file.p, "p")?;
    let q = need(args.q, file.q, "q")?;
    Ok(Fraction::new(p, q)?)
}

fn family(args: &FamilyArgs, file: &FileConfig) -> CliResult<FamilySpec> {
    config::family(file, args.family, &args.fourier_terms, args.angle_terms)
}

fn guide(args: &GuideArgs, file: &FileConfig) -> CliResult<(GuideKind, Fraction, usize)> {
    let kind = match (args.guide, file.guide.as_deref()) {
        (Some(k), _) => k,
        (None, Some(s)) => parse_guide(s).map_err(CliError::Usage)?,
        (None, None) => GuideKind::Standard,
    };
    let order = args.frac.q.or(file.q).map(|q| (2 * q.max(1) as usize + 2).max(DEFAULT_ORDER)).unwrap_or(DEFAULT_ORDER);
    let order = args.order.or(file.order).unwrap_or(order);
    Ok((kind, fraction(&args.frac, file)?, order))
}

fn complex(re: f64, im: f64) -> String {
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", g17(re), sign, g17(im.abs()))
}

/// Output sink shared by all subcommands. Buffered so that commands can run
/// inside a worker pool; flushed to the real streams afterwards.
#[derive(Default)]
struct Out {
    out: Vec<u8>,
    err: Vec<u8>,
    json: bool,
}

impl Out {
    fn record<S: Serialize>(&mut self, fields: &[(&str, String)], value: &S) -> CliResult {
        if self.json {
            self.json_value(value)
        } else {
            for (k, v) in fields {
                writeln!(self.out, "{k}={v}")?;
            }
            Ok(())
        }
    }

    fn json_value<S: Serialize>(&mut self, value: &S) -> CliResult {
        serde_json::to_writer_pretty(&mut self.out, value).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(self.out)?;
        Ok(())
    }

    fn csv<R: AsRef<[String]>>(&mut self, header: &[&str], rows: &[R]) -> CliResult {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut self.out);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r.as_ref())?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct TraceRow {
    a: f64,
    t_left: f64,
    t_right: f64,
    width: f64,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Errors go to `err` as `error: <Name>: <message>`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut sink = Out { json: cli.json, ..Out::default() };
    let result = execute(&cli, &mut sink);
    let _ = out.write_all(&sink.out).and_then(|_| out.flush());
    let _ = err.write_all(&sink.err);
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, sink: &mut Out) -> CliResult {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let default_threads = if matches!(cli.command, Command::Render { .. }) { 0 } else { 1 };
    let threads = cli.threads.or(file.threads).unwrap_or(default_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;
    pool.install(|| dispatch(&cli.command, &file, sink))
}

fn dispatch(cmd: &Command, file: &FileConfig, sink: &mut Out) -> CliResult {
    match cmd {
        Command::Trans { fam, t, a, n } => {
            let fam = family(fam, file)?;
            let p = ParamPoint::new(need(*t, file.t, "t")?, need(*a, file.a, "a")?);
            let e = trans_enclosure(&fam, p, n.or(file.n).unwrap_or(DEFAULT_ITERATIONS))?;
            sink.record(
                &[
                    ("lo", g17(e.lo)),
                    ("hi", g17(e.hi)),
                    ("width", g17(e.width())),
                    ("estimate", g17(e.midpoint())),
                    ("iterations", e.iterations.to_string()),
                ],
                &e,
            )
        }
        Command::Staircase { fam, a, t_min, t_max, steps, n } => {
            let fam = family(fam, file)?;
            let a = need(*a, file.a, "a")?;
            let t0 = t_min.or(file.t_min).unwrap_or(0.0);
            let t1 = t_max.or(file.t_max).unwrap_or(1.0);
            let steps = steps.or(file.steps).unwrap_or(200);
            let rows = staircase(&fam, a, t0, t1, steps, n.or(file.n).unwrap_or(10_000))?;
            if sink.json {
                return sink.json_value(&rows);
            }
            let rows: Vec<[String; 2]> = rows.iter().map(|&(t, v)| [g17(t), g17(v)]).collect();
            sink.csv(&["t", "trans"], &rows)
        }
        Command::Boundary { fam, frac, a, witness } => {
            let fam = family(fam, file)?;
            let frac = fraction(frac, file)?;
            let solver = TongueSolver::default();
            let s = solver.boundary_at(&fam, frac, need(*a, file.a, "a")?)?;
            let mut fields = vec![
                ("p", s.p.to_string()),
                ("q", s.q.to_string()),
                ("a", g17(s.a)),
                ("t_left", g17(s.t_left)),
                ("t_right", g17(s.t_right)),
                ("width", g17(s.width)),
                ("x_left", g17(s.x_left)),
                ("x_right", g17(s.x_right)),
            ];
            if !*witness {
                return sink.record(&fields, &s);
            }
            let left = solver.boundary_witness(&fam, &s, Side::Left)?;
            let right = solver.boundary_witness(&fam, &s, Side::Right)?;
            fields.extend([
                ("left_x0", g17(left.x0)),
                ("left_g0", g17(left.g0)),
                ("left_g1", g17(left.g1)),
                ("left_g2", g17(left.g2)),
                ("right_x0", g17(right.x0)),
                ("right_g0", g17(right.g0)),
                ("right_g1", g17(right.g1)),
                ("right_g2", g17(right.g2)),
            ]);
            sink.record(&fields, &serde_json::json!({ "sample": s, "left": left, "right": right }))
        }
        Command::Trace { fam, frac, a_values, a_min, a_max, count } => {
            let fam = family(fam, file)?;
            let frac = fraction(frac, file)?;
            let mut values = if !a_values.is_empty() {
                a_values.clone()
            } else if let Some(v) = file.a_values.clone().filter(|_| a_min.is_none() && a_max.is_none()) {
                v
            } else {
                let lo = need(*a_min, file.a_min, "a-min")?;
                let hi = need(*a_max, file.a_max, "a-max")?;
                let count = need(*count, file.count, "count")?;
                if count < 2 || lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
                    return Err(CliError::Usage("trace needs a-min < a-max and count ≥ 2".into()));
                }
                (0..count).map(|i| lo + i as f64 * (hi - lo) / (count - 1) as f64).collect()
            };
            values.sort_by(f64::total_cmp);
            let samples = TongueSolver::default().trace_boundary(&fam, frac, &values)?;
            if sink.json {
                return sink.json_value(&samples);
            }
            let rows: Vec<[String; 4]> =
                samples.iter().map(|s| [g17(s.a), g17(s.t_left), g17(s.t_right), g17(s.width)]).collect();
            sink.csv(&["a", "t_left", "t_right", "width"], &rows)
        }
        Command::Slopes { fam, frac } => {
            let fam = family(fam, file)?;
            let r = slopes(&fam, fraction(frac, file)?)?;
            let mut fields = vec![
                ("p", r.p.to_string()),
                ("q", r.q.to_string()),
                ("M_A", g17(r.max_avg)),
                ("m_A", g17(r.min_avg)),
                ("mean_phi", g17(r.mean_phi)),
                ("slope_minus", g17(r.slope_minus)),
                ("slope_plus", g17(r.slope_plus)),
                ("angle_geometric", g17(r.angle_geometric)),
            ];
            if let Some(v) = r.angle_paper {
                fields.push(("angle_paper", g17(v)));
            }
            sink.record(&fields, &r)
        }
        Command::WidthFit { input, csv } => {
            let samples = read_trace(input)?;
            if *csv {
                let rows = width_fit_rows(&samples);
                if sink.json {
                    return sink.json_value(&rows);
                }
                let rows: Vec<[String; 4]> =
                    rows.iter().map(|r| [g17(r.a), g17(r.width), g17(r.log_a), g17(r.log_width)]).collect();
                return sink.csv(&["a", "width", "log_a", "log_width"], &rows);
            }
            let fit = fit_contact(&samples)?;
            sink.record(
                &[
                    ("exponent", g17(fit.exponent)),
                    ("coefficient", g17(fit.coefficient)),
                    ("residual", g17(fit.residual)),
                    ("samples_used", fit.samples_used.to_string()),
                ],
                &fit,
            )
        }
        Command::Series { guide: g, iterate } => {
            let (kind, frac, order) = guide(g, file)?;
            let mut f = guide_series(kind, frac, order);
            if let Some(n) = iterate {
                f = f.iterate(*n)?;
            }
            if sink.json {
                return sink.json_value(&f.coeffs());
            }
            let rows: Vec<[String; 3]> =
                f.coeffs().iter().enumerate().map(|(k, c)| [k.to_string(), g17(c.re), g17(c.im)]).collect();
            sink.csv(&["k", "re", "im"], &rows)
        }
        Command::Parabolic { guide: g } => {
            let (kind, frac, order) = guide(g, file)?;
            let pd = parabolic_data(&guide_series(kind, frac, order), frac.q())?;
            let mut fields = vec![
                ("p", pd.p.to_string()),
                ("q", pd.q.to_string()),
                ("multiplier", complex(pd.multiplier.re, pd.multiplier.im)),
                ("nu", pd.nu.to_string()),
                ("leading_index", pd.leading_index.to_string()),
                ("C", complex(pd.c.re, pd.c.im)),
                ("abs_C", g17(pd.c.norm())),
            ];
            if let Ok(w) = width_coefficient(&pd) {
                fields.push(("width_coefficient", g17(w)));
            }
            sink.record(&fields, &pd)
        }
        Command::DegreeCheck { fam, t, n, tol } => {
            let fam = family(fam, file)?;
            let t = t.or(file.t).unwrap_or(0.0);
            let n = need(*n, file.n.map(|v| v as usize), "n")?;
            let report = degree_check(&fam, t, n, tol.or(file.tol).unwrap_or(DEFAULT_DEGREE_TOL))?;
            if sink.json {
                return sink.json_value(&report);
            }
            let rows: Vec<[String; 2]> = report.coeffs.iter().map(|(k, c)| [k.to_string(), g17(c.norm())]).collect();
            sink.csv(&["k", "|c_k|"], &rows)?;
            let (k, m) = report.worst_violation;
            writeln!(
                sink.err,
                "degree_bound_satisfied={} worst_k={k} worst_magnitude={}",
                report.degree_bound_satisfied,
                g17(m)
            )?;
            Ok(())
        }
        Command::Render { fam, t_min, t_max, a_min, a_max, width, height, n, mode, tongues, output } => {
            let family = family(fam, file)?;
            let mode_name = mode.clone().or(file.mode.clone()).unwrap_or_else(|| "gray".into());
            let mode = match mode_name.as_str() {
                "gray" => RasterMode::TransGray,
                "mask" => {
                    let list: Vec<String> =
                        if tongues.is_empty() { file.tongues.clone().unwrap_or_default() } else { tongues.clone() };
                    if list.is_empty() {
                        return Err(CliError::Usage("mask mode needs at least one --tongue p/q".into()));
                    }
                    let fracs: Result<Vec<Fraction>, Error> = list.iter().map(|s| s.parse()).collect();
                    RasterMode::TongueMask(fracs?)
                }
                other => return Err(CliError::Usage(format!("unknown mode `{other}` (expected gray or mask)"))),
            };
            let (lo, hi) = family.a_range();
            let cfg = RasterConfig {
                t_range: (t_min.or(file.t_min).unwrap_or(0.0), t_max.or(file.t_max).unwrap_or(1.0)),
                a_range: (a_min.or(file.a_min).unwrap_or(0.0), a_max.or(file.a_max).unwrap_or(0.9 * hi.min(-lo))),
                width_px: width.or(file.width).unwrap_or(800),
                height_px: height.or(file.height).unwrap_or(400),
                iterations: n.or(file.n).unwrap_or(10_000),
                mode,
                family,
            };
            let raster = render(&cfg)?;
            match output {
                Some(path) => {
                    let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    let mut w = BufWriter::new(f);
                    raster.write_pgm(&mut w)?;
                    w.flush()?;
                }
                None => raster.write_pgm(&mut sink.out)?,
            }
            Ok(())
        }
        Command::Profile { fam, t, a, n, grid } => {
            let fam = family(fam, file)?;
            let p = ParamPoint::new(need(*t, file.t, "t")?, need(*a, file.a, "a")?);
            let n = n.or(file.n).unwrap_or(1000) as usize;
            let rows = semiconjugacy_profile(&fam, p, n, grid.or(file.grid).unwrap_or(256))?;
            if sink.json {
                return sink.json_value(&rows);
            }
            let rows: Vec<[String; 2]> = rows.iter().map(|&(x, v)| [g17(x), g17(v)]).collect();
            sink.csv(&["x", "phi"], &rows)
        }
    }
}

/// Reads a `trace` CSV back into samples. Only `a` and `width` matter to the
/// fit; `p/q` are not recorded in the file.
fn read_trace(path: &PathBuf) -> CliResult<Vec<TongueSample>> {
    let f = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut rdr = csv::Reader::from_reader(f);
    let mut samples = Vec::new();
    for row in rdr.deserialize() {
        let r: TraceRow = row?;
        samples.push(TongueSample {
            p: 0,
            q: 1,
            a: r.a,
            t_left: r.t_left,
            t_right: r.t_right,
            x_left: f64::NAN,
            x_right: f64::NAN,
            width: r.width,
        });
    }
    Ok(samples)
}
