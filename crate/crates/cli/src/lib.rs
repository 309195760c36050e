//! `pto`: spectra, eigenfunction tables, pseudo-norm checks, ladder checks
//! and coherent-state norm maps as CSV or JSON.

pub mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use pto_core::coherent::{classify_sweep, cs_normalization, find_norm_zero, signed_norm_series, CoherentStateSpec};
use pto_core::ladder::{ladder_residuals, phase_alignment};
use pto_core::oscillator::{energy, sigma};
use pto_core::quadrature::{integrate_line, DEFAULT_TOL};
use pto_core::{Complex64, Eigenstate, EigenstateSpec, Error, PtoParams, QuadratureConfig, QuasiParity, UniformGrid};

use table::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Integer neighbourhoods skipped by `classify`.
const CLASSIFY_MARGIN: f64 = 1e-3;
const CS_TAIL_TOL: f64 = 1e-13;

#[derive(Debug, Parser)]
#[command(name = "pto", version, about = "PT-symmetric oscillator tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Imaginary shift of the integration line
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub c: f64,
    /// Restrict to one quasi-parity (+1 or -1)
    #[arg(long, value_parser = parse_parity, allow_hyphen_values = true)]
    pub q: Option<QuasiParity>,
    /// Absolute quadrature tolerance
    #[arg(long, env = "PTO_DEFAULT_TOL", default_value_t = DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (stdout if omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Common {
    fn parities(&self) -> Vec<QuasiParity> {
        match self.q {
            Some(q) => vec![q],
            None => QuasiParity::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energies 4n + 2 - 2qα
    Spectrum {
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Normalized eigenfunctions sampled on [-x_max, x_max]
    Eigfn {
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long, default_value_t = 6.0, value_parser = positive)]
        x_max: f64,
        #[arg(long, default_value_t = 0.05, value_parser = positive)]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Pseudo-norms by quadrature next to the predicted signs
    Norms {
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Ladder relations and phase alignment per level
    LadderCheck {
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 12.0, value_parser = positive)]
        x_max: f64,
        #[arg(long, default_value_t = 0.01, value_parser = positive)]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Coherent-state pseudo-norm series and normalization over |z|
    CsNorm {
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[arg(long, default_value_t = 2.5, value_parser = positive)]
        z_max: f64,
        #[arg(long, default_value_t = 0.05, value_parser = positive)]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Zero of the coherent-state pseudo-norm
    CsZero {
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Normalizability over an α sweep
    Classify {
        #[arg(long, default_value_t = 3.0, value_parser = positive)]
        alpha_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Spectrum { common, .. }
            | Command::Eigfn { common, .. }
            | Command::Norms { common, .. }
            | Command::LadderCheck { common, .. }
            | Command::CsNorm { common, .. }
            | Command::CsZero { common, .. }
            | Command::Classify { common, .. } => common,
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {s}"))
    }
}

fn parse_parity(s: &str) -> Result<QuasiParity, String> {
    match s {
        "+1" | "1" | "+" | "plus" => Ok(QuasiParity::Plus),
        "-1" | "-" | "minus" => Ok(QuasiParity::Minus),
        _ => Err(format!("expected +1 or -1, got {s}")),
    }
}

fn parity_cell(q: QuasiParity) -> Cell {
    Cell::Parity(q.sign())
}

fn spectrum(alpha: f64, n_max: usize, common: &Common) -> pto_core::Result<Table> {
    let params = PtoParams::new(alpha, common.c)?;
    let mut t = Table::new(&["q", "n", "energy"]);
    for n in 0..=n_max {
        for q in common.parities() {
            let e = energy(&EigenstateSpec::new(params, q, n));
            t.push(vec![parity_cell(q), n.into(), e.into()]);
        }
    }
    Ok(t)
}

fn eigfn(alpha: f64, n_max: usize, x_max: f64, step: f64, common: &Common) -> pto_core::Result<Table> {
    let params = PtoParams::new(alpha, common.c)?;
    let grid = UniformGrid::symmetric(x_max, step)?;
    let mut t = Table::new(&["q", "n", "x", "re", "im"]);
    for n in 0..=n_max {
        for q in common.parities() {
            let state = Eigenstate::new(&EigenstateSpec::new(params, q, n))?;
            for x in grid.points() {
                let u = state.value(x);
                t.push(vec![parity_cell(q), n.into(), x.into(), u.re.into(), u.im.into()]);
            }
        }
    }
    Ok(t)
}

fn norms(alpha: f64, n_max: usize, common: &Common) -> pto_core::Result<Table> {
    let params = PtoParams::new(alpha, common.c)?;
    let cfg = QuadratureConfig::for_shift(common.c, common.tol)?;
    let mut t = Table::new(&[
        "q",
        "n",
        "sigma",
        "norm_re",
        "norm_im",
        "abs_error",
        "error_estimate",
        "roundoff_limited",
    ]);
    for n in 0..=n_max {
        for q in common.parities() {
            let state = Eigenstate::new(&EigenstateSpec::new(params, q, n))?;
            let r = integrate_line(|x| state.value(-x).conj() * state.value(x), &cfg)?;
            let s = sigma(&params, q, n);
            t.push(vec![
                parity_cell(q),
                n.into(),
                Cell::Int(s.into()),
                r.value.re.into(),
                r.value.im.into(),
                (r.value - s as f64).norm().into(),
                r.error_estimate.into(),
                r.roundoff_limited.into(),
            ]);
        }
    }
    Ok(t)
}

fn ladder_check(alpha: f64, n_max: usize, x_max: f64, step: f64, common: &Common) -> pto_core::Result<Table> {
    // validates alpha and c
    PtoParams::new(alpha, common.c)?;
    let grid = UniformGrid::symmetric(x_max, step)?;
    let cfg = QuadratureConfig::for_shift(common.c, common.tol)?;
    let mut t = Table::new(&[
        "q",
        "n",
        "raising_residual",
        "lowering_residual",
        "phase_re",
        "phase_im",
        "coefficient_sq",
    ]);
    for n in 0..=n_max {
        for q in common.parities() {
            let r = ladder_residuals(q, alpha, common.c, n, grid)?;
            // level 0 is the closed-form ground state itself
            let (phase, coeff) = if n == 0 {
                (Complex64::new(1.0, 0.0), 0.0)
            } else {
                let p = phase_alignment(q, alpha, common.c, n, grid, &cfg)?;
                (p.ratio, p.coefficient_sq)
            };
            t.push(vec![
                parity_cell(q),
                n.into(),
                r.raising.into(),
                r.lowering.into(),
                phase.re.into(),
                phase.im.into(),
                coeff.into(),
            ]);
        }
    }
    Ok(t)
}

fn cs_norm(alpha: f64, z_max: f64, step: f64, common: &Common) -> pto_core::Result<Table> {
    let params = PtoParams::new(alpha, common.c)?;
    let steps = (z_max / step + 1e-9).floor() as usize;
    let mut t = Table::new(&[
        "q",
        "z_abs",
        "s",
        "series",
        "normalizable",
        "norm_magnitude",
        "norm_sign",
    ]);
    for q in common.parities() {
        for k in 0..=steps {
            let r = k as f64 * step;
            let spec = CoherentStateSpec::new(Complex64::new(r, 0.0), params, q, CS_TAIL_TOL)?;
            let series = signed_norm_series(&params, q, r * r);
            let (ok, mag, sign) = match cs_normalization(&spec) {
                Ok(n) => (true, Cell::Float(n.magnitude), Cell::Int(n.sign.into())),
                Err(Error::NotNormalizableAt { .. }) => (false, Cell::Missing, Cell::Int(0)),
                Err(e) => return Err(e),
            };
            t.push(vec![
                parity_cell(q),
                r.into(),
                (r * r).into(),
                series.into(),
                ok.into(),
                mag,
                sign,
            ]);
        }
    }
    Ok(t)
}

fn cs_zero(alpha: f64, common: &Common) -> pto_core::Result<Table> {
    let params = PtoParams::new(alpha, common.c)?;
    let mut t = Table::new(&["q", "branch_n", "zero_exists", "z_abs", "min_value", "min_location_s"]);
    for q in common.parities() {
        let r = find_norm_zero(&params, q);
        t.push(vec![
            parity_cell(q),
            r.branch_n.into(),
            r.zero_exists.into(),
            r.z_abs.into(),
            r.min_value.into(),
            r.min_location_s.into(),
        ]);
    }
    Ok(t)
}

fn classify(alpha_max: f64, points: usize) -> pto_core::Result<Table> {
    let mut t = Table::new(&[
        "alpha",
        "branch_n",
        "plus_zero_exists",
        "plus_z_abs",
        "plus_min_value",
        "minus_zero_exists",
        "computed_normalizable",
        "claimed_normalizable",
        "discrepancy",
    ]);
    for c in classify_sweep(alpha_max, points, CLASSIFY_MARGIN)? {
        t.push(vec![
            c.alpha.into(),
            c.branch_n.into(),
            c.plus.zero_exists.into(),
            c.plus.z_abs.into(),
            c.plus.min_value.into(),
            c.minus.zero_exists.into(),
            c.computed_normalizable.into(),
            c.claimed_normalizable.into(),
            c.discrepancy.into(),
        ]);
    }
    Ok(t)
}

pub fn build_table(cmd: &Command) -> pto_core::Result<Table> {
    match cmd {
        Command::Spectrum { alpha, n_max, common } => spectrum(*alpha, *n_max, common),
        Command::Eigfn {
            alpha,
            n_max,
            x_max,
            step,
            common,
        } => eigfn(*alpha, *n_max, *x_max, *step, common),
        Command::Norms { alpha, n_max, common } => norms(*alpha, *n_max, common),
        Command::LadderCheck {
            alpha,
            n_max,
            x_max,
            step,
            common,
        } => ladder_check(*alpha, *n_max, *x_max, *step, common),
        Command::CsNorm {
            alpha,
            z_max,
            step,
            common,
        } => cs_norm(*alpha, *z_max, *step, common),
        Command::CsZero { alpha, common } => cs_zero(*alpha, common),
        Command::Classify { alpha_max, points, .. } => classify(*alpha_max, *points),
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

fn write_table(table: &Table, common: &Common, stdout: &mut dyn Write) -> std::io::Result<()> {
    let mut sink: Box<dyn Write + '_> = match &common.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(stdout),
    };
    match common.format {
        Format::Csv => table.write_csv(&mut sink).map_err(std::io::Error::other)?,
        Format::Json => table.write_json(&mut sink)?,
    }
    sink.flush()
}

/// Parses `argv` (program name first), writes the table and returns the
/// process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                if e.kind() == clap::error::ErrorKind::InvalidSubcommand {
                    let _ = write!(stderr, "\n{}", Cli::command().render_help());
                }
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{text}");
            return EXIT_OK;
        }
    };
    let table = match build_table(&cli.command) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code_for(&e);
        }
    };
    match write_table(&table, cli.command.common(), stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: writing output: {e}");
            EXIT_IO
        }
    }
}
