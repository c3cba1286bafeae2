mod output;
mod svg;

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use loopnt::demo3::{self, Demo3Error, Poly3};
use loopnt::exact::{parse_quad, ExactError, DEFAULT_FACTOR_BOUND};
use loopnt::frontend::{parse, FrontendError};
use loopnt::ntcore::{analyze_with, AnalysisOptions, LoopAnalysis, NtError};
use loopnt::oracle::{fuzz_compare, simulate, simulate_traced, OracleError};
use loopnt::{FuzzConfig, LoopSpec, QuadNum, Rational};

#[derive(Parser)]
#[command(
    name = "loopnt",
    version,
    about = "Exact non-termination sets of linear while loops"
)]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[arg(long, value_enum, global = true, default_value = "auto")]
    color: Color,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Color {
    Auto,
    Never,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the non-termination set of a two-variable loop.
    Analyze { file: PathBuf },
    /// Decide whether a point lies in the non-termination set.
    Member {
        file: PathBuf,
        /// Comma-separated exact scalars, e.g. "1, 1/4+1/4*sqrt(17)".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Run the loop from a point for a bounded number of iterations.
    Simulate {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
        /// Also print the trace length and the final state.
        #[arg(long)]
        trace: bool,
    },
    /// Differential check of the analysis against simulation on random loops.
    Fuzz(FuzzArgs),
    /// Evidence for the three-variable loop with update diag(2, 3, 5).
    P3(P3Args),
    /// Draw the non-termination set as SVG.
    Render {
        file: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(i64).range(1..))]
    coeff_bound: i64,
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u64).range(1..))]
    points: u64,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct P3Check {
    /// Check the guard along the boundary sequence for k = 1..K.
    #[arg(long, value_name = "K", value_parser = clap::value_parser!(u32).range(1..))]
    check_boundary: Option<u32>,
    /// Tail bound after which the polynomial never vanishes on the sequence.
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    poly: Option<String>,
    /// Sample the inner cone and check invariance and survival.
    #[arg(long, value_name = "M", value_parser = clap::value_parser!(u64).range(1..))]
    tau_samples: Option<u64>,
}

#[derive(Args)]
struct P3Args {
    #[command(flatten)]
    check: P3Check,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Failure {
        Failure {
            code,
            msg: msg.into(),
        }
    }
}

impl From<FrontendError> for Failure {
    fn from(e: FrontendError) -> Failure {
        match e {
            FrontendError::UnsupportedDimension(n) if n >= 3 => Failure::new(
                2,
                format!(
                    "{e}; with three or more variables the set can fail to be \
                     semi-algebraic, see `loopnt p3` for the diag(2,3,5) example"
                ),
            ),
            FrontendError::UnsupportedDimension(_) | FrontendError::UnsupportedGuard(_) => {
                Failure::new(2, e.to_string())
            }
            _ => Failure::new(1, e.to_string()),
        }
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Failure {
        let code = match e {
            ExactError::IncompatibleRadicands(..) => 4,
            ExactError::RadicandTooLarge(..) => 2,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<NtError> for Failure {
    fn from(e: NtError) -> Failure {
        match e {
            NtError::Frontend(e) => e.into(),
            NtError::Exact(e) => e.into(),
            _ => Failure::new(3, e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Failure {
        match e {
            OracleError::Exact(e) => e.into(),
            _ => Failure::new(1, e.to_string()),
        }
    }
}

impl From<Demo3Error> for Failure {
    fn from(e: Demo3Error) -> Failure {
        Failure::new(1, e.to_string())
    }
}

pub struct Ctx {
    pub json: bool,
    pub color: bool,
}

impl Ctx {
    pub fn paint(&self, text: &str, ok: bool) -> String {
        if self.color {
            let code = if ok { 32 } else { 31 };
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let ctx = Ctx {
        json: cli.format == Format::Json,
        color: cli.color == Color::Auto && std::io::stdout().is_terminal(),
    };
    match run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(ctx: &Ctx, cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Analyze { file } => {
            let analysis = load_and_analyze(&file)?;
            print!("{}", output::analysis(ctx, &analysis));
        }
        Command::Member { file, point } => {
            let analysis = load_and_analyze(&file)?;
            let p = parse_point(&point)?;
            if p.len() != 2 {
                return Err(Failure::new(
                    1,
                    format!("expected 2 coordinates, got {}", p.len()),
                ));
            }
            let p = loopnt::Vec2::new(p[0].clone(), p[1].clone());
            let m = analysis.nt.explain_member(&p)?;
            print!("{}", output::membership(ctx, &p, &m));
        }
        Command::Simulate {
            file,
            point,
            max_steps,
            trace,
        } => {
            let spec = load(&file)?;
            let p = parse_point(&point)?;
            let rational: Option<Vec<Rational>> =
                p.iter().map(|x| x.as_rational().cloned()).collect();
            let (result, states) = if trace {
                let (r, t) = simulate_traced(&spec, &p, max_steps)?;
                let last = t.last().cloned();
                (r, Some((t.len(), last)))
            } else if let Some(r) = rational {
                (simulate(&spec, &r, max_steps)?, None)
            } else {
                (simulate(&spec, &p, max_steps)?, None)
            };
            print!("{}", output::simulation(ctx, &result, states.as_ref()));
        }
        Command::Fuzz(a) => {
            let cfg = FuzzConfig {
                trials: a.trials,
                coeff_bound: a.coeff_bound,
                points_per_loop: a.points as usize,
                max_steps: a.max_steps,
                seed: a.seed,
            };
            let report = fuzz_compare(&cfg)?;
            print!("{}", output::fuzz(ctx, &cfg, &report));
            if !report.passed() {
                return Err(Failure::new(
                    5,
                    format!("{} violations", report.violations.len()),
                ));
            }
        }
        Command::P3(a) => run_p3(ctx, a)?,
        Command::Render { file, svg } => {
            let analysis = load_and_analyze(&file)?;
            let spec = load(&file)?;
            let doc = svg::render(&spec, &analysis);
            std::fs::write(&svg, doc)
                .map_err(|e| Failure::new(6, format!("cannot write {}: {e}", svg.display())))?;
            if ctx.json {
                println!(
                    "{}",
                    serde_json::json!({ "svg": svg.display().to_string() })
                );
            } else {
                println!("wrote {}", svg.display());
            }
        }
    }
    Ok(())
}

fn run_p3(ctx: &Ctx, a: P3Args) -> Result<(), Failure> {
    if let Some(k) = a.check.check_boundary {
        let guard = demo3::check_boundary_guard(k)?;
        let sim = demo3::simulate_boundary_points(20, a.steps)?;
        print!("{}", output::p3_boundary(ctx, &guard, &sim));
        if !guard.holds() || !sim.failures.is_empty() {
            return Err(Failure::new(3, "boundary check failed"));
        }
    } else if let Some(text) = a.check.poly {
        let f = Poly3::parse(&text)?;
        let info = demo3::nonvanishing_bound_info(&f)?;
        let zeros = demo3::audit_nonvanishing(&f, info.n, info.n + 200);
        print!("{}", output::p3_poly(ctx, &f, &info, &zeros));
        if !zeros.is_empty() {
            return Err(Failure::new(3, "polynomial vanishes past its bound"));
        }
    } else if let Some(m) = a.check.tau_samples {
        let audit = demo3::audit_tau(m, a.steps, a.seed)?;
        print!("{}", output::p3_tau(ctx, &audit, a.steps));
        if !audit.not_invariant.is_empty() || !audit.terminated.is_empty() {
            return Err(Failure::new(3, "tau audit failed"));
        }
    }
    Ok(())
}

fn load(path: &Path) -> Result<LoopSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(6, format!("cannot read {}: {e}", path.display())))?;
    Ok(parse(&text)?)
}

fn factor_bound() -> Result<u64, Failure> {
    match std::env::var("LOOPNT_FACTOR_BOUND") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&b| b >= 2)
            .ok_or_else(|| Failure::new(1, format!("LOOPNT_FACTOR_BOUND: invalid value `{v}`"))),
        Err(_) => Ok(DEFAULT_FACTOR_BOUND),
    }
}

fn load_and_analyze(path: &Path) -> Result<LoopAnalysis, Failure> {
    let spec = load(path)?;
    let opts = AnalysisOptions {
        factor_bound: factor_bound()?,
    };
    Ok(analyze_with(&spec, &opts)?)
}

fn parse_point(text: &str) -> Result<Vec<QuadNum>, Failure> {
    let coords = text
        .split(',')
        .map(parse_quad)
        .collect::<Result<Vec<_>, _>>()?;
    let mut radicand: Option<&loopnt::exact::BigInt> = None;
    for x in coords.iter().filter(|x| !x.is_rational()) {
        match &radicand {
            Some(d) if *d != x.radicand() => {
                return Err(
                    ExactError::IncompatibleRadicands(x.radicand().clone(), (*d).clone()).into(),
                )
            }
            _ => radicand = Some(x.radicand()),
        }
    }
    Ok(coords)
}
