//! `varper` command-line front end.
//!
//! Every subcommand writes either CSV or `key=value` lines. Exit status is `0` on
//! success, `1` for invalid input or domain errors and `2` when a numerical method
//! fails to converge or a verification threshold is exceeded.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use varper::numfmt::sig17;
use varper::period::{check_periodicity_wave, CONSISTENCY_TOL, PERIODICITY_TOL};
use varper::series::{read_spectrum_from, write_spectrum_to};
use varper::signalio::{read_from, write_to};
use varper::{
    backward_period_general, check_derivative_bound, check_period_consistency, count_cycles,
    expand, forward_period_general, generate, gram_matrix, Error, GramMatrix, Method,
    PhaseFunction, SampledSignal, Segment, Wave, DEFAULT_HARMONICS, DEFAULT_INVERSION_TOL,
};

/// Largest closed-form/quadrature disagreement tolerated by `gram --method both`.
pub const GRAM_DISCREPANCY_LIMIT: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(
    name = "varper",
    version,
    about = "Periodic functions with a variable period"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Forward (or backward) variable period at a point.
    Period(PeriodArgs),
    /// Scan a range and report identity residuals and the minimum of T'.
    Verify(VerifyArgs),
    /// Gram matrix of the warped trigonometric system over one period.
    Gram(GramArgs),
    /// Warped Fourier coefficients of a sampled signal over one period.
    Expand(ExpandArgs),
    /// Evaluate a spectrum on a grid.
    Synth(SynthArgs),
    /// Sample sin(m·g(x)) or cos(m·g(x)) on a uniform grid.
    Gen(GenArgs),
    /// Count cycles in a sampled signal.
    Cycles(CyclesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Quadrature,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Sine,
    Cosine,
}

#[derive(Debug, Args)]
struct PhaseArg {
    /// Phase function: id, pow:ALPHA or powsin:ALPHA:AMP:FREQ (ALPHA may be p/q).
    #[arg(long, value_parser = parse_phase)]
    phase: PhaseFunction,
}

#[derive(Debug, Args)]
struct PeriodArgs {
    #[command(flatten)]
    phase: PhaseArg,
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    /// Backward period T⁻(x) instead of T(x).
    #[arg(long)]
    backward: bool,
    #[arg(long, default_value_t = DEFAULT_INVERSION_TOL, value_parser = parse_positive)]
    tol: f64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    phase: PhaseArg,
    /// Scan range as LO:HI.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    range: (f64, f64),
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
}

#[derive(Debug, Args)]
struct GramArgs {
    #[command(flatten)]
    phase: PhaseArg,
    #[arg(long, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = DEFAULT_HARMONICS, value_parser = clap::value_parser!(u32).range(1..))]
    harmonics: u32,
    #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
    method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_INVERSION_TOL, value_parser = parse_positive)]
    tol: f64,
    /// Write the matrix here; the summary then goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExpandArgs {
    #[command(flatten)]
    phase: PhaseArg,
    #[arg(long, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = DEFAULT_HARMONICS)]
    harmonics: u32,
    /// Signal CSV with header `x,y`; linearly interpolated between samples.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, visible_alias = "out")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    phase: PhaseArg,
    #[arg(long, allow_negative_numbers = true)]
    x0: f64,
    /// Spectrum CSV with header `m,a,b`.
    #[arg(long)]
    input: PathBuf,
    /// Evaluation range LO:HI; defaults to the period segment at x0.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    range: Option<(f64, f64)>,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    phase: PhaseArg,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    range: (f64, f64),
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    harmonic: u32,
    #[arg(long, value_enum, default_value_t = KindArg::Sine)]
    kind: KindArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CyclesArgs {
    #[arg(long)]
    input: PathBuf,
    /// Known phase; makes the total exact instead of estimated from the samples.
    #[arg(long, value_parser = parse_phase)]
    phase: Option<PhaseFunction>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    harmonic: u32,
}

fn parse_phase(s: &str) -> Result<PhaseFunction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("invalid number `{t}` in range `{s}`"))
    };
    let (lo, hi) = (num(lo)?, num(hi)?);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(format!("range `{s}` is empty"))
    }
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_numerical() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            message: format!("io: {e}"),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Period(a) => period(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Gram(a) => gram(a, out, err),
        Command::Expand(a) => expand_cmd(a, out),
        Command::Synth(a) => synth(a, out, err),
        Command::Gen(a) => gen(a, out),
        Command::Cycles(a) => cycles(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn kv(out: &mut dyn Write, key: &str, value: f64) -> io::Result<()> {
    writeln!(out, "{key}={}", sig17(value))
}

fn period(a: PeriodArgs, out: &mut dyn Write) -> CmdResult {
    let phase = &a.phase.phase;
    let r = if a.backward {
        backward_period_general(phase, a.x, a.tol)?
    } else {
        forward_period_general(phase, a.x, a.tol)?
    };
    writeln!(out, "phase={phase}")?;
    kv(out, "x", r.x)?;
    writeln!(out, "direction={}", if a.backward { "backward" } else { "forward" })?;
    kv(out, "period", r.value)?;
    kv(out, "partner", r.partner())?;
    kv(out, "residual", r.residual)?;
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let phase = &a.phase.phase;
    let (lo, hi) = a.range;
    let n = a.n as usize;
    let step = (hi - lo) / (n - 1) as f64;
    let (mut periodicity, mut forward, mut backward) = (0.0f64, 0.0f64, None::<f64>);
    let mut backward_points = 0usize;
    for i in 0..n {
        let x = if i == n - 1 { hi } else { lo + step * i as f64 };
        for wave in [Wave::Sine, Wave::Cosine] {
            periodicity = periodicity.max(check_periodicity_wave(phase, x, wave)?);
        }
        let c = check_period_consistency(phase, x)?;
        forward = forward.max(c.forward);
        if let Some(b) = c.backward {
            backward = Some(backward.unwrap_or(0.0).max(b));
            backward_points += 1;
        }
    }
    let min_slope = check_derivative_bound(phase, lo, hi, n)?;
    let pass = periodicity < PERIODICITY_TOL
        && forward < CONSISTENCY_TOL
        && backward.is_none_or(|b| b < CONSISTENCY_TOL)
        && min_slope > -1.0;

    writeln!(out, "phase={phase}")?;
    writeln!(out, "points={n}")?;
    kv(out, "max_periodicity_residual", periodicity)?;
    kv(out, "max_consistency_forward", forward)?;
    match backward {
        Some(b) => kv(out, "max_consistency_backward", b)?,
        None => writeln!(out, "max_consistency_backward=undefined")?,
    }
    writeln!(out, "backward_defined_points={backward_points}")?;
    kv(out, "min_period_derivative", min_slope)?;
    writeln!(out, "status={}", if pass { "pass" } else { "fail" })?;
    if pass {
        Ok(())
    } else {
        Err(Failure {
            code: 2,
            message: "verification thresholds exceeded".into(),
        })
    }
}

fn write_matrix(g: &GramMatrix, w: &mut dyn Write) -> io::Result<()> {
    writeln!(w, "basis,{}", g.labels().join(","))?;
    for (label, row) in g.labels().iter().zip(g.rows()) {
        let cells: Vec<String> = row.iter().map(|v| sig17(*v)).collect();
        writeln!(w, "{label},{}", cells.join(","))?;
    }
    Ok(())
}

fn open_out(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })
}

fn gram(a: GramArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let phase = &a.phase.phase;
    let seg = Segment::one_period(phase, a.x0, a.tol)?;
    let closed = match a.method {
        MethodArg::Closed | MethodArg::Both => {
            Some(gram_matrix(phase, a.harmonics, &seg, Method::ClosedForm)?)
        }
        MethodArg::Quadrature => None,
    };
    let quad = match a.method {
        MethodArg::Quadrature | MethodArg::Both => {
            Some(gram_matrix(phase, a.harmonics, &seg, Method::Quadrature)?)
        }
        MethodArg::Closed => None,
    };
    let shown = closed.as_ref().or(quad.as_ref()).expect("one method always runs");

    // the matrix owns stdout unless --out redirects it
    let summary: &mut dyn Write = match &a.out {
        Some(path) => {
            let mut f = open_out(path)?;
            write_matrix(shown, &mut f)?;
            f.flush()?;
            out
        }
        None => {
            write_matrix(shown, out)?;
            err
        }
    };
    kv(summary, "segment_start", seg.start())?;
    kv(summary, "segment_length", seg.length())?;
    if let Some(g) = &closed {
        kv(summary, "max_offdiag_closed", g.max_off_diagonal())?;
    }
    if let Some(g) = &quad {
        kv(summary, "max_offdiag_quadrature", g.max_off_diagonal())?;
    }
    if let (Some(c), Some(q)) = (&closed, &quad) {
        let d = c.max_abs_diff(q);
        kv(summary, "max_discrepancy", d)?;
        if d > GRAM_DISCREPANCY_LIMIT {
            return Err(Failure {
                code: 2,
                message: format!(
                    "closed form and quadrature differ by {} (limit {})",
                    sig17(d),
                    sig17(GRAM_DISCREPANCY_LIMIT)
                ),
            });
        }
    }
    Ok(())
}

fn load_signal(path: &Path) -> Result<SampledSignal, Failure> {
    let file = File::open(path).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })?;
    read_from(io::BufReader::new(file)).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })
}

fn expand_cmd(a: ExpandArgs, out: &mut dyn Write) -> CmdResult {
    let phase = &a.phase.phase;
    let sig = load_signal(&a.input)?;
    let seg = Segment::one_period(phase, a.x0, DEFAULT_INVERSION_TOL)?;
    let (lo, hi) = sig.span().ok_or_else(|| Failure {
        code: 1,
        message: format!("{}: signal is empty", a.input.display()),
    })?;
    if seg.start() < lo || seg.end() > hi {
        return Err(Failure {
            code: 1,
            message: format!(
                "segment [{}, {}] is not covered by the samples [{}, {}]",
                sig17(seg.start()),
                sig17(seg.end()),
                sig17(lo),
                sig17(hi)
            ),
        });
    }
    let spectrum = expand(
        |x| sig.interpolate(x).unwrap_or(f64::NAN),
        phase,
        a.x0,
        a.harmonics,
    )?;
    match &a.output {
        Some(path) => {
            let mut f = open_out(path)?;
            write_spectrum_to(&spectrum, &mut f)?;
            f.flush()?;
        }
        None => write_spectrum_to(&spectrum, out)?,
    }
    Ok(())
}

fn synth(a: SynthArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let phase = &a.phase.phase;
    let file = File::open(&a.input).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", a.input.display()),
    })?;
    let spectrum = read_spectrum_from(io::BufReader::new(file), phase, a.x0).map_err(|e| {
        Failure {
            code: 1,
            message: format!("{}: {e}", a.input.display()),
        }
    })?;
    let seg = spectrum.segment()?;
    let (lo, hi) = a.range.unwrap_or((seg.start(), seg.end()));
    let n = a.n as usize;
    let step = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect();
    let ys = xs
        .iter()
        .map(|&x| spectrum.synthesize(x))
        .collect::<Result<Vec<f64>, Error>>()?;
    let outside = xs.iter().filter(|&&x| !seg.contains(x)).count();
    let sig = SampledSignal::new(xs, ys)?;
    match &a.out {
        Some(path) => {
            let mut f = open_out(path)?;
            write_to(&sig, &mut f)?;
            f.flush()?;
        }
        None => write_to(&sig, &mut *out)?,
    }
    if outside > 0 {
        writeln!(
            err,
            "warning: {outside} of {n} points lie outside the segment [{}, {}] and are extrapolated",
            sig17(seg.start()),
            sig17(seg.end())
        )?;
    }
    Ok(())
}

fn gen(a: GenArgs, out: &mut dyn Write) -> CmdResult {
    let wave = match a.kind {
        KindArg::Sine => Wave::Sine,
        KindArg::Cosine => Wave::Cosine,
    };
    let (lo, hi) = a.range;
    let sig = generate(&a.phase.phase, a.harmonic, wave, lo, hi, a.n as usize)?;
    match &a.out {
        Some(path) => {
            let mut f = open_out(path)?;
            write_to(&sig, &mut f)?;
            f.flush()?;
        }
        None => write_to(&sig, &mut *out)?,
    }
    Ok(())
}

fn cycles(a: CyclesArgs, out: &mut dyn Write) -> CmdResult {
    let sig = load_signal(&a.input)?;
    let c = count_cycles(&sig, a.phase.as_ref().map(|p| (p, a.harmonic)))?;
    writeln!(out, "samples={}", sig.len())?;
    writeln!(out, "complete={}", c.complete)?;
    kv(out, "fractional", c.fractional)?;
    kv(out, "total", c.total())?;
    writeln!(
        out,
        "source={}",
        if a.phase.is_some() { "phase" } else { "samples" }
    )?;
    Ok(())
}
