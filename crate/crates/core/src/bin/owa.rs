use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use owa::bench::{run_bench, to_csv, BenchConfig};
use owa::cuts::{BoundMethod, CutFamily};
use owa::formulation::FormulationVariant;
use owa::instances::{generate_grid, load, write_instance, GridSpec, ProblemKind};
use owa::oracle::brute_force_optimum;
use owa::owa::{parse_rational, to_f64, Rational};
use owa::solve::{build_model, render_report, solve, SolveConfig};
use owa::OwaError;
use owa_milp::{write_lp, write_mps, SolveOptions};

/// Ordered weighted average optimization: instances, formulations, solver.
#[derive(Parser, Debug)]
#[command(name = "owa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a grid instance file.
    Generate(GenerateArgs),
    /// Solve an instance with one formulation variant.
    Solve(SolveArgs),
    /// Enumerate the domain and print every point's OWA value.
    Oracle(OracleArgs),
    /// Run the experiment matrix and print CSV.
    Bench(BenchArgs),
    /// Write the model as MPS or LP.
    Export(ExportArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// sp (shortest path) or pm (perfect matching).
    #[arg(long, default_value = "sp")]
    problem: String,
    #[arg(long, default_value_t = 3)]
    side: usize,
    #[arg(long, default_value_t = 3)]
    p: usize,
    #[arg(long, default_value = "0.6")]
    alpha: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Instance file or built-in name (example1, example2, example3).
    #[arg(long)]
    instance: String,
    #[arg(long, default_value = "Fz")]
    variant: String,
    /// Comma-separated cut tags, `default` for every compatible family
    /// except cotazy, or `none`.
    #[arg(long, default_value = "none")]
    cuts: String,
    /// Big-M override; must exceed every outcome value.
    #[arg(long)]
    big_m: Option<String>,
    /// How cut bounds are computed.
    #[arg(long, value_enum, default_value_t = Bounds::Lp)]
    bounds: Bounds,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Bounds {
    Lp,
    Enum,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ReportFormat {
    Text,
    Csv,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<usize>,
    /// Include wall time in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    instance: String,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated problems: sp, pm.
    #[arg(long, default_value = "sp")]
    problem: String,
    #[arg(long, default_value = "3")]
    sides: String,
    #[arg(long, default_value = "3")]
    p: String,
    #[arg(long, default_value = "0.4,0.6,0.8")]
    alpha: String,
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[arg(long, default_value_t = 1)]
    base_seed: u64,
    /// Comma-separated variant names or `all`.
    #[arg(long, default_value = "Fz")]
    variant: String,
    #[arg(long, default_value = "none")]
    cuts: String,
    #[arg(long, default_value_t = owa::bench::DEFAULT_TIME_LIMIT)]
    time_limit: f64,
    #[arg(long)]
    node_limit: Option<usize>,
    /// Parallel workers; 1 runs serially.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ExportFormat {
    Mps,
    Lp,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum, default_value_t = ExportFormat::Mps)]
    format: ExportFormat,
    #[arg(long)]
    out: Option<String>,
}

fn list<T>(s: &str, f: impl Fn(&str) -> Result<T, OwaError>) -> Result<Vec<T>, OwaError> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(f).collect()
}

fn parse_usize(s: &str) -> Result<usize, OwaError> {
    s.parse().map_err(|_| OwaError::InvalidArgument(format!("not a count: {s:?}")))
}

fn parse_cuts(s: &str, variant: FormulationVariant) -> Result<Vec<CutFamily>, OwaError> {
    match s {
        "none" | "" => Ok(Vec::new()),
        "default" => Ok(CutFamily::default_set(variant)),
        _ => list(s, CutFamily::parse),
    }
}

fn model_config(m: &ModelArgs) -> Result<(FormulationVariant, Vec<CutFamily>, SolveConfig), OwaError> {
    let variant = FormulationVariant::parse(&m.variant)?;
    let cuts = parse_cuts(&m.cuts, variant)?;
    let big_m = m.big_m.as_deref().map(parse_rational).transpose()?;
    let bounds = match m.bounds {
        Bounds::Lp => BoundMethod::LpRelaxation,
        Bounds::Enum => BoundMethod::Enumeration,
    };
    Ok((variant, cuts, SolveConfig { big_m, bounds: Some(bounds), options: SolveOptions::default() }))
}

fn emit(text: &str, out: Option<&str>) -> Result<(), OwaError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), OwaError> {
    match cli.command {
        Command::Generate(a) => {
            let spec = GridSpec::new(ProblemKind::parse(&a.problem)?, a.side, a.p, parse_rational(&a.alpha)?, a.seed)?;
            emit(&write_instance(&generate_grid(&spec)?), a.out.as_deref())
        }
        Command::Solve(a) => {
            let file = load(&a.model.instance)?;
            let (variant, cuts, mut config) = model_config(&a.model)?;
            config.options.time_limit = a.time_limit;
            config.options.node_limit = a.node_limit;
            let out = solve(&file.instance, variant, &cuts, &config)?;
            let text = match a.format {
                ReportFormat::Text => format!("instance {}\n{}", file.name, render_report(&out, a.timing)),
                ReportFormat::Csv => {
                    let r = &out.report;
                    let opt = out.value.map_or("-".into(), |v: Rational| v.to_string());
                    let f = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.6}"));
                    let mut s = String::from("instance,variant,status,optimum,nodes,root_lp,gap_lr");
                    if a.timing {
                        s.push_str(",t");
                    }
                    s.push_str(&format!(
                        "\n{},{},{},{},{},{},{}",
                        file.name,
                        variant,
                        r.status.as_str(),
                        opt,
                        r.node_count,
                        f(r.root_lp_value),
                        f(r.gap_lr)
                    ));
                    if a.timing {
                        s.push_str(&format!(",{:.3}", r.wall_seconds));
                    }
                    s + "\n"
                }
            };
            emit(&text, None)
        }
        Command::Oracle(a) => {
            let file = load(&a.instance)?;
            let o = brute_force_optimum(&file.instance)?;
            emit(&format!("instance {}\n# x | y | sorted y | sigma | value\n{}", file.name, o.render()), None)
        }
        Command::Bench(a) => {
            let variants = if a.variant.eq_ignore_ascii_case("all") {
                FormulationVariant::catalog()
            } else {
                list(&a.variant, FormulationVariant::parse)?
            };
            let cuts = match a.cuts.as_str() {
                "none" | "" => Vec::new(),
                "default" => CutFamily::all().into_iter().filter(|c| *c != CutFamily::Cotazy).collect(),
                s => list(s, CutFamily::parse)?,
            };
            let cfg = BenchConfig {
                problems: list(&a.problem, ProblemKind::parse)?,
                sides: list(&a.sides, parse_usize)?,
                ps: list(&a.p, parse_usize)?,
                alphas: list(&a.alpha, parse_rational)?,
                seeds: a.seeds,
                base_seed: a.base_seed,
                variants,
                cuts,
                time_limit: a.time_limit,
                node_limit: a.node_limit,
                threads: a.threads,
            };
            let rows = run_bench(&cfg, &|msg| eprintln!("warning: {msg}"))?;
            emit(&to_csv(&rows), a.out.as_deref())
        }
        Command::Export(a) => {
            let file = load(&a.model.instance)?;
            let (variant, cuts, config) = model_config(&a.model)?;
            let built = build_model(&file.instance, variant, &cuts, &config)?;
            let text = match a.format {
                ExportFormat::Mps => write_mps(&built.model),
                ExportFormat::Lp => write_lp(&built.model),
            };
            if a.out.is_none() {
                eprintln!("big-M {} ({})", built.big_m, to_f64(&built.big_m));
            }
            emit(&text, a.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
