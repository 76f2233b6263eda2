//! Batch command-line front end. [`run`] takes an argument vector and
//! returns the exit code with the captured stdout and stderr, so the binary
//! is a thin wrapper and the tests can drive every subcommand in-process.

mod emit;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use adelic_zeta::cohomology::{rr_residual, serre_residual, Residual};
use adelic_zeta::io::{load_grid, load_lattice, parse_complex, resolve_field};
use adelic_zeta::moduli::{moduli_volume, slice_volume, ModuliChart, QuadratureSpec};
use adelic_zeta::stability::{hn_filtration_with, is_semistable_with, StabilityOptions};
use adelic_zeta::zeta::{ZetaEvaluator, ZetaPoint, ZetaSpec};
use adelic_zeta::{Error, MetrizedLattice, NumberFieldData};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

pub use emit::Emit;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        Self { code: 0, stdout, stderr: String::new() }
    }

    fn error(e: &Error) -> Self {
        let body = json!({ "error": e.code(), "message": e.to_string() });
        Self { code: 1, stdout: String::new(), stderr: format!("{body}\n") }
    }
}

#[derive(Parser, Debug)]
#[command(name = "adelic-zeta", version, about = "Theta series, arithmetic cohomology, stability and non-abelian zeta functions")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Emit::Json)]
    emit: Emit,
    /// Quadrature spec JSON file for moduli and zeta commands.
    #[arg(long, global = true)]
    quad: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number field data.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Riemann-Roch and Serre duality residuals.
    #[command(subcommand)]
    Cohom(CohomCmd),
    /// Slope stability.
    #[command(subcommand)]
    Stab(StabCmd),
    /// Moduli of semistable lattices.
    #[command(subcommand)]
    Moduli(ModuliCmd),
    /// Non-abelian zeta functions.
    #[command(subcommand)]
    Zeta(ZetaCmd),
}

#[derive(Subcommand, Debug)]
enum FieldCmd {
    /// Load a field file and verify its invariants.
    Check { file: PathBuf },
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long)]
    lattice: PathBuf,
    /// Theta tolerance.
    #[arg(long, default_value_t = 1e-15)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum CohomCmd {
    Rr(LatticeArgs),
    Serre(LatticeArgs),
}

#[derive(Args, Debug)]
struct StabArgs {
    #[arg(long)]
    lattice: PathBuf,
    /// Return best-effort answers beyond the certified rank.
    #[arg(long)]
    allow_uncertified: bool,
}

#[derive(Subcommand, Debug)]
enum StabCmd {
    Test(StabArgs),
    Hn(StabArgs),
}

#[derive(Subcommand, Debug)]
enum ModuliCmd {
    Volume {
        /// Field file, or `Q`.
        #[arg(long)]
        field: String,
        #[arg(long)]
        rank: usize,
    },
}

#[derive(Args, Debug)]
struct ZetaArgs {
    /// Field file, or `Q`.
    #[arg(long)]
    field: String,
    #[arg(long)]
    rank: usize,
    #[arg(long = "A", default_value_t = 1.0)]
    a: f64,
    /// Target accuracy of each value.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MethodArg {
    Direct,
    Continued,
    Both,
}

#[derive(Subcommand, Debug)]
enum ZetaCmd {
    Eval {
        #[command(flatten)]
        spec: ZetaArgs,
        /// Evaluation point as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Continued)]
        method: MethodArg,
    },
    Fescan {
        #[command(flatten)]
        spec: ZetaArgs,
        /// JSON file holding `[[re, im], ...]`.
        #[arg(long)]
        grid: PathBuf,
    },
    Residues {
        #[command(flatten)]
        spec: ZetaArgs,
    },
}

/// Parse `argv` (including the program name) and execute the command.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandResult { code: 2, stdout: String::new(), stderr: text }
            } else {
                CommandResult::ok(text)
            };
        }
    };
    match execute(&cli) {
        Ok(out) => CommandResult::ok(out),
        Err(e) => CommandResult::error(&e),
    }
}

fn execute(cli: &Cli) -> adelic_zeta::Result<String> {
    let out = cli.emit;
    match &cli.command {
        Command::Field(FieldCmd::Check { file }) => {
            let f = adelic_zeta::load_field(file)?;
            Ok(emit::record(out, &field_summary(&f)))
        }
        Command::Cohom(cmd) => {
            let (args, which): (&LatticeArgs, fn(&MetrizedLattice, f64) -> adelic_zeta::Result<Residual>) = match cmd {
                CohomCmd::Rr(a) => (a, rr_residual),
                CohomCmd::Serre(a) => (a, serre_residual),
            };
            let r = which(&load_lattice(&args.lattice)?, args.tol)?;
            let mut v = serde_json::to_value(r).expect("residual serializes");
            v["within_bound"] = json!(r.within_bound());
            Ok(emit::record(out, &v))
        }
        Command::Stab(StabCmd::Test(a)) => {
            let opts = StabilityOptions { allow_uncertified: a.allow_uncertified };
            let rep = is_semistable_with(&load_lattice(&a.lattice)?, opts)?;
            Ok(emit::record(out, &serde_json::to_value(rep).expect("report serializes")))
        }
        Command::Stab(StabCmd::Hn(a)) => {
            let opts = StabilityOptions { allow_uncertified: a.allow_uncertified };
            let h = hn_filtration_with(&load_lattice(&a.lattice)?, opts)?;
            let polygon: Vec<[f64; 2]> = h.polygon().iter().map(|&(r, d)| [r as f64, d]).collect();
            let quotients = h.quotient_slopes();
            let v = json!({ "steps": h.steps, "polygon": polygon, "quotient_slopes": quotients, "concave": h.is_concave() });
            Ok(emit::hn(out, &v))
        }
        Command::Moduli(ModuliCmd::Volume { field, rank }) => {
            let f = Arc::new(field_arg(field)?);
            let quad = quadrature(cli.quad.as_deref())?;
            let volume = moduli_volume(&f, *rank)?;
            let chart = ModuliChart::new(f, *rank)?;
            let quadrature = slice_volume(&chart, &quad, 1.0)?;
            let v = json!({
                "rank": rank,
                "volume": volume,
                "quadrature": quadrature,
                "parametrization": chart.parametrization(),
                "measure": chart.measure(),
            });
            Ok(emit::record(out, &v))
        }
        Command::Zeta(cmd) => zeta(cli, cmd),
    }
}

fn zeta(cli: &Cli, cmd: &ZetaCmd) -> adelic_zeta::Result<String> {
    let args = match cmd {
        ZetaCmd::Eval { spec, .. } | ZetaCmd::Fescan { spec, .. } | ZetaCmd::Residues { spec } => spec,
    };
    let mut spec = ZetaSpec::new(Arc::new(field_arg(&args.field)?), args.rank, args.a)?
        .with_quad(quadrature(cli.quad.as_deref())?)?;
    spec.tol = args.tol;
    if !(spec.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", spec.tol)));
    }
    match cmd {
        ZetaCmd::Eval { s, method, .. } => {
            let s = parse_complex(s)?;
            let ev = ZetaEvaluator::new(spec)?;
            let points: Vec<ZetaPoint> = match method {
                MethodArg::Direct => vec![ev.direct(s)?],
                MethodArg::Continued => vec![ev.continued(s)?],
                MethodArg::Both => vec![ev.direct(s)?, ev.continued(s)?],
            };
            Ok(emit::points(cli.emit, &points))
        }
        ZetaCmd::Fescan { grid, .. } => {
            let grid: Vec<Complex64> = load_grid(grid)?;
            let scan = ZetaEvaluator::new(spec)?.fe_scan(&grid)?;
            Ok(emit::fescan(cli.emit, &scan))
        }
        ZetaCmd::Residues { .. } => {
            let r = ZetaEvaluator::new(spec)?.residues()?;
            Ok(emit::record(cli.emit, &serde_json::to_value(r).expect("residues serialize")))
        }
    }
}

fn field_arg(reference: &str) -> adelic_zeta::Result<NumberFieldData> {
    resolve_field(reference, Path::new("."))
}

fn quadrature(path: Option<&Path>) -> adelic_zeta::Result<QuadratureSpec> {
    let Some(path) = path else { return Ok(QuadratureSpec::default()) };
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    QuadratureSpec::from_json(&text)
}

fn field_summary(f: &NumberFieldData) -> Value {
    json!({
        "degree": f.degree,
        "r1": f.r1,
        "r2": f.r2,
        "discriminant": f.discriminant,
        "unit_rank": f.unit_rank(),
        "roots_of_unity": f.roots_of_unity,
        "class_number": f.class_number().ok(),
        "regulator": f.regulator_value().ok(),
        "valid": true,
    })
}
