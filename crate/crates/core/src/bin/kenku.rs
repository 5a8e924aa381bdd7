use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kenku::curve::CurvePoint;
use kenku::cusps::CuspError;
use kenku::field::{EnumerationBudget, FieldError};
use kenku::models::{rational_torsion, reduce_point, resolve_model, ModelError, ModularCurveModel};
use kenku::obstruction::{Analysis, ObstructionError, Verdict};
use kenku::report::{CuspReport, ObstructionReport, TorsionReport};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "kenku", version, about = "Finite-field checks of torsion obstructions on modular curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Points of the reduced model with j-invariants and traces.
    Enumerate(RunArgs),
    /// Group structures of the twists of every candidate j.
    Twists(RunArgs),
    /// Cusp counts, Δ-orbits and quadratic cusp images.
    Cusps(RunArgs),
    /// Frobenius trace of each candidate and its classification.
    Trace(RunArgs),
    /// Rational torsion of the model and its reduction.
    Torsion(RunArgs),
    /// Involution images and the coloured involution graph.
    Graph(RunArgs),
    /// Runs the elimination and exits 0 on PASS, 1 on FAIL.
    Verify(RunArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Markdown,
    Csv,
    Dot,
    Json,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Builtin model id or path to a model config file.
    #[arg(long, default_value = "x0_32")]
    model: String,
    /// Reduction prime; defaults to the model's first configured prime.
    #[arg(long)]
    p: Option<u32>,
    /// Extension degree of the finite field.
    #[arg(long, default_value_t = 3)]
    ext: usize,
    /// Target torsion order; defaults to the model's.
    #[arg(long)]
    target: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
    /// Branch hypothesis, or `both` for every branch.
    #[arg(long, default_value = "both")]
    branch: String,
    /// Compare the output with this file and fail on any difference.
    #[arg(long)]
    expect: Option<PathBuf>,
    /// Maximum field size to enumerate.
    #[arg(long, env = EnumerationBudget::ENV_VAR)]
    budget: Option<u64>,
}

enum CliError {
    Usage(String),
    Internal(String),
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Config(_)
            | ModelError::InvalidModel { .. }
            | ModelError::UnknownModel(_)
            | ModelError::UnknownInvolution(_)
            | ModelError::UnknownBranch(_)
            | ModelError::BadPrime { .. }
            | ModelError::Expr(_)
            | ModelError::Field(
                FieldError::NotPrime(_)
                | FieldError::BadModulus(_)
                | FieldError::Reducible { .. }
                | FieldError::NoDefaultModulus { .. }
                | FieldError::EnumerationTooLarge { .. }
                | FieldError::Parse(_),
            ) => CliError::Usage(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<ObstructionError> for CliError {
    fn from(e: ObstructionError) -> Self {
        match e {
            ObstructionError::Model(m) => m.into(),
            ObstructionError::Curve(kenku::curve::CurveError::Field(f)) => ModelError::Field(f).into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<CuspError> for CliError {
    fn from(e: CuspError) -> Self {
        match e {
            CuspError::UnsupportedLevel(_) | CuspError::InvalidDelta { .. } => CliError::Usage(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

struct Output {
    text: String,
    failed: bool,
}

impl RunArgs {
    fn budget(&self) -> EnumerationBudget {
        self.budget.map_or_else(EnumerationBudget::from_env, EnumerationBudget)
    }

    fn model(&self) -> Result<ModularCurveModel, CliError> {
        Ok(resolve_model(&self.model)?)
    }

    fn prime(&self, model: &ModularCurveModel) -> Result<u32, CliError> {
        self.p
            .or_else(|| model.reductions.first().map(|r| r.prime))
            .ok_or_else(|| CliError::Usage(format!("model {} has no default prime; pass --p", model.id)))
    }

    fn branches(&self, model: &ModularCurveModel) -> Result<Vec<String>, CliError> {
        match self.branch.as_str() {
            "both" | "all" => Ok(model.branches()),
            b => {
                model.check_branch(b)?;
                Ok(vec![b.to_string()])
            }
        }
    }

    fn report(&self, model: &ModularCurveModel) -> Result<ObstructionReport, CliError> {
        let p = self.prime(model)?;
        let reduced = model.reduce(p, self.ext)?;
        let target = self.target.unwrap_or(model.target_order);
        if target == 0 {
            return Err(CliError::Usage("--target must be positive".into()));
        }
        let analysis = Analysis::build(reduced, target, self.budget())?;
        Ok(ObstructionReport::from_analysis(&analysis, &self.branches(model)?)?)
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn unsupported(format: Format, command: &str) -> CliError {
    let name = format.to_possible_value().expect("no skipped variants").get_name().to_string();
    CliError::Usage(format!("{command} does not support --format {name}"))
}

fn run(command: &Command) -> Result<Output, CliError> {
    let ok = |text: String| Ok(Output { text, failed: false });
    match command {
        Command::Enumerate(a) => {
            let r = a.report(&a.model()?)?;
            match a.format {
                Format::Markdown => ok(r.points_markdown()),
                Format::Csv => ok(r.points_csv()),
                Format::Json => ok(json(&r)),
                f => Err(unsupported(f, "enumerate")),
            }
        }
        Command::Twists(a) => {
            let r = a.report(&a.model()?)?;
            match a.format {
                Format::Markdown => ok(r.twists_markdown()),
                Format::Csv => ok(r.twists_csv()),
                Format::Json => ok(json(&r.twists)),
                f => Err(unsupported(f, "twists")),
            }
        }
        Command::Trace(a) => {
            let r = a.report(&a.model()?)?;
            match a.format {
                Format::Markdown => ok(r.trace_markdown()),
                Format::Csv => ok(r.vertices_csv()),
                Format::Json => ok(json(&r)),
                f => Err(unsupported(f, "trace")),
            }
        }
        Command::Graph(a) => {
            let r = a.report(&a.model()?)?;
            match a.format {
                Format::Markdown => ok(r.graph_markdown()),
                Format::Csv => ok(r.graph_csv()),
                Format::Dot => ok(r.graph_dot()),
                Format::Json => ok(json(&r)),
            }
        }
        Command::Verify(a) => {
            let r = a.report(&a.model()?)?;
            let text = match a.format {
                Format::Markdown => r.verify_markdown(),
                Format::Csv => r.vertices_csv(),
                Format::Dot => r.graph_dot(),
                Format::Json => json(&r),
            };
            Ok(Output { text, failed: r.verdict == Verdict::Fail })
        }
        Command::Cusps(a) => {
            let r = CuspReport::new(&a.model()?)?;
            let failed = r.quadratic_images.iter().any(|q| !q.agree);
            let text = match a.format {
                Format::Markdown => r.markdown(),
                Format::Csv => r.csv(),
                Format::Json => json(&r),
                f => return Err(unsupported(f, "cusps")),
            };
            Ok(Output { text, failed })
        }
        Command::Torsion(a) => {
            let model = a.model()?;
            let table = rational_torsion(&model.equation).map_err(CliError::from)?;
            let mut r = TorsionReport::new(&model.id, &table);
            if let Some(p) = a.p {
                let reduced = model.reduce(p, 1)?;
                let mut images = Vec::new();
                for (rec, point) in r.points.iter_mut().zip(&table.points) {
                    let image = reduce_point(point, &reduced.spec);
                    let order = match &image {
                        CurvePoint::Infinity => 1,
                        _ => reduced.curve.point_order(&image).map_err(|e| CliError::Internal(e.to_string()))?,
                    };
                    rec.reduction = Some(image.to_string());
                    rec.reduced_order = Some(order);
                    images.push(image);
                }
                let distinct = images.iter().enumerate().all(|(i, x)| !images[..i].contains(x));
                r.prime = Some(p);
                r.injective = Some(distinct && r.points.iter().all(|x| x.reduced_order == Some(x.order)));
            }
            let failed = r.injective == Some(false);
            let text = match a.format {
                Format::Markdown => r.markdown(),
                Format::Csv => r.csv(),
                Format::Json => json(&r),
                f => return Err(unsupported(f, "torsion")),
            };
            Ok(Output { text, failed })
        }
    }
}

fn args(command: &Command) -> &RunArgs {
    match command {
        Command::Enumerate(a)
        | Command::Twists(a)
        | Command::Cusps(a)
        | Command::Trace(a)
        | Command::Torsion(a)
        | Command::Graph(a)
        | Command::Verify(a) => a,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match run(&cli.command) {
        Ok(o) => o,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal error: {m}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    print!("{}", output.text);
    if let Some(path) = &args(&cli.command).expect {
        let expected = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        };
        if let Some((line, want, got)) = first_difference(&expected, &output.text) {
            eprintln!("golden mismatch against {} at line {line}", path.display());
            eprintln!("  expected: {want}");
            eprintln!("  actual:   {got}");
            return ExitCode::from(EXIT_FAIL);
        }
        eprintln!("golden match: {}", path.display());
    }
    if output.failed {
        ExitCode::from(EXIT_FAIL)
    } else {
        ExitCode::SUCCESS
    }
}

/// First differing line, 1-based, ignoring trailing whitespace.
fn first_difference<'a>(expected: &'a str, actual: &'a str) -> Option<(usize, &'a str, &'a str)> {
    let want: Vec<&str> = expected.trim_end().lines().map(str::trim_end).collect();
    let got: Vec<&str> = actual.trim_end().lines().map(str::trim_end).collect();
    (0..want.len().max(got.len()))
        .find(|&i| want.get(i) != got.get(i))
        .map(|i| (i + 1, want.get(i).copied().unwrap_or("<end>"), got.get(i).copied().unwrap_or("<end>")))
}
