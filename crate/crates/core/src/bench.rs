//! Experiment matrix over grid instances and the summary CSV.
//!
//! One CSV row per (problem, |V|, p, alpha, variant), averaged over seeds:
//!
//! * `t`: mean solve time in seconds, runs that stop at the time limit
//!   counted at the limit;
//! * `solved`: seeds solved to optimality;
//! * `worst`: the slowest time when every seed is solved, otherwise the
//!   largest remaining gap as a percentage;
//! * `nodes`: mean branch-and-bound node count;
//! * `gap_lr`: mean root gap `100 (best - root LP) / best`.

use std::fmt::Write as _;

use owa_milp::{SolveOptions, SolveStatus};
use rayon::prelude::*;

use crate::cuts::CutFamily;
use crate::error::{OwaError, Result};
use crate::formulation::FormulationVariant;
use crate::instances::{generate_grid, GridSpec, ProblemKind};
use crate::owa::{to_f64, Rational};
use crate::solve::{solve, SolveConfig};

pub const CSV_HEADER: &str = "problem,V,p,alpha,variant,t,solved,worst,nodes,gap_lr";
pub const DEFAULT_TIME_LIMIT: f64 = 600.0;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub problems: Vec<ProblemKind>,
    pub sides: Vec<usize>,
    pub ps: Vec<usize>,
    pub alphas: Vec<Rational>,
    pub seeds: usize,
    pub base_seed: u64,
    pub variants: Vec<FormulationVariant>,
    pub cuts: Vec<CutFamily>,
    pub time_limit: f64,
    pub node_limit: Option<usize>,
    /// Worker threads; `None` lets rayon decide, `Some(1)` runs serially.
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            problems: vec![ProblemKind::ShortestPath],
            sides: vec![3],
            ps: vec![3],
            alphas: vec![Rational::new(2, 5), Rational::new(3, 5), Rational::new(4, 5)],
            seeds: 5,
            base_seed: 1,
            variants: vec![FormulationVariant::parse("Fz").expect("catalog name")],
            cuts: Vec::new(),
            time_limit: DEFAULT_TIME_LIMIT,
            node_limit: None,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub status: SolveStatus,
    pub seconds: f64,
    pub nodes: usize,
    pub gap_lr: Option<f64>,
    /// Relative gap in percent at stop.
    pub gap: Option<f64>,
    pub error: Option<String>,
}

impl BenchRun {
    pub fn solved(&self) -> bool {
        self.error.is_none() && matches!(self.status, SolveStatus::Optimal | SolveStatus::Infeasible)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub problem: ProblemKind,
    pub vertices: usize,
    pub p: usize,
    pub alpha: Rational,
    pub variant: String,
    pub mean_time: f64,
    pub solved: usize,
    pub runs: usize,
    pub worst: Worst,
    pub mean_nodes: f64,
    pub mean_gap_lr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Worst {
    Seconds(f64),
    GapPercent(f64),
    /// No gap is known for some unsolved run, e.g. no incumbent.
    Unknown,
}

/// Row statistics over the runs of one cell. Unsolved runs count at
/// `time_limit` in the mean.
pub fn aggregate(
    problem: ProblemKind,
    vertices: usize,
    p: usize,
    alpha: Rational,
    variant: &str,
    runs: &[BenchRun],
    time_limit: f64,
) -> BenchRow {
    let n = runs.len().max(1) as f64;
    let solved = runs.iter().filter(|r| r.solved()).count();
    let mean_time = runs.iter().map(|r| if r.solved() { r.seconds } else { time_limit }).sum::<f64>() / n;
    let worst = if solved == runs.len() {
        Worst::Seconds(runs.iter().map(|r| r.seconds).fold(0.0, f64::max))
    } else {
        let gaps: Option<Vec<f64>> = runs.iter().filter(|r| !r.solved()).map(|r| r.gap).collect();
        match gaps {
            Some(g) => Worst::GapPercent(g.into_iter().fold(0.0, f64::max)),
            None => Worst::Unknown,
        }
    };
    let mean_nodes = runs.iter().map(|r| r.nodes as f64).sum::<f64>() / n;
    let lrs: Vec<f64> = runs.iter().filter_map(|r| r.gap_lr).collect();
    let mean_gap_lr = (!lrs.is_empty()).then(|| lrs.iter().sum::<f64>() / lrs.len() as f64);
    BenchRow {
        problem,
        vertices,
        p,
        alpha,
        variant: variant.to_string(),
        mean_time,
        solved,
        runs: runs.len(),
        worst,
        mean_nodes,
        mean_gap_lr,
    }
}

pub fn format_row(row: &BenchRow) -> String {
    let worst = match row.worst {
        Worst::Seconds(s) => format!("{s:.2}"),
        Worst::GapPercent(g) => format!("{g:.2}%"),
        Worst::Unknown => "-".into(),
    };
    let gap_lr = row.mean_gap_lr.map_or("-".into(), |g| format!("{g:.2}"));
    format!(
        "{},{},{},{},{},{:.2},{},{},{:.1},{}",
        row.problem,
        row.vertices,
        row.p,
        to_f64(&row.alpha),
        row.variant,
        row.mean_time,
        row.solved,
        worst,
        row.mean_nodes,
        gap_lr
    )
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CSV_HEADER}");
    for r in rows {
        let _ = writeln!(s, "{}", format_row(r));
    }
    s
}

#[derive(Debug, Clone)]
struct Cell {
    problem: ProblemKind,
    side: usize,
    p: usize,
    alpha: Rational,
    variant: FormulationVariant,
}

fn run_one(spec: &GridSpec, variant: FormulationVariant, cfg: &BenchConfig) -> BenchRun {
    let config = SolveConfig {
        options: SolveOptions { time_limit: Some(cfg.time_limit), node_limit: cfg.node_limit, ..Default::default() },
        ..Default::default()
    };
    let cuts: Vec<CutFamily> = cfg.cuts.iter().copied().filter(|c| c.compatible_with(variant)).collect();
    let result = generate_grid(spec).and_then(|f| solve(&f.instance, variant, &cuts, &config));
    match result {
        Ok(out) => BenchRun {
            status: out.report.status,
            seconds: out.report.wall_seconds,
            nodes: out.report.node_count,
            gap_lr: out.report.gap_lr,
            gap: out.report.gap,
            error: None,
        },
        Err(e) => BenchRun {
            status: SolveStatus::TimeLimit,
            seconds: cfg.time_limit,
            nodes: 0,
            gap_lr: None,
            gap: None,
            error: Some(e.to_string()),
        },
    }
}

/// Runs the whole matrix. Rows come back in the order problems, sides, p,
/// alpha, variant regardless of scheduling. Errors in individual runs are
/// reported through `on_error` and counted as unsolved.
pub fn run_bench(cfg: &BenchConfig, on_error: &(dyn Fn(&str) + Sync)) -> Result<Vec<BenchRow>> {
    if cfg.seeds == 0 {
        return Err(OwaError::InvalidArgument("need at least one seed".into()));
    }
    let mut cells = Vec::new();
    for &problem in &cfg.problems {
        for &side in &cfg.sides {
            for &p in &cfg.ps {
                for &alpha in &cfg.alphas {
                    GridSpec::new(problem, side, p, alpha, 0)?;
                    for &variant in &cfg.variants {
                        variant.validate()?;
                        cells.push(Cell { problem, side, p, alpha, variant });
                    }
                }
            }
        }
    }
    let jobs: Vec<(usize, GridSpec)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, cell)| {
            (0..cfg.seeds as u64).map(move |k| {
                (
                    c,
                    GridSpec {
                        kind: cell.problem,
                        side: cell.side,
                        p: cell.p,
                        alpha: cell.alpha,
                        seed: cfg.base_seed + k,
                    },
                )
            })
        })
        .collect();
    let exec = || -> Vec<BenchRun> { jobs.par_iter().map(|(c, spec)| run_one(spec, cells[*c].variant, cfg)).collect() };
    let runs = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| OwaError::InvalidArgument(e.to_string()))?
            .install(exec),
        None => exec(),
    };
    let mut rows = Vec::with_capacity(cells.len());
    for (c, cell) in cells.iter().enumerate() {
        let mine: Vec<BenchRun> =
            jobs.iter().zip(&runs).filter(|((k, _), _)| *k == c).map(|(_, r)| r.clone()).collect();
        for ((_, spec), r) in jobs.iter().zip(&runs).filter(|((k, _), _)| *k == c) {
            if let Some(e) = &r.error {
                on_error(&format!("{} {}: {e}", spec.name(), cell.variant));
            }
        }
        let vertices = match cell.problem {
            ProblemKind::PerfectMatching if cell.side % 2 == 1 => cell.side * cell.side - 1,
            _ => cell.side * cell.side,
        };
        rows.push(aggregate(cell.problem, vertices, cell.p, cell.alpha, &cell.variant.name(), &mine, cfg.time_limit));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(status: SolveStatus, seconds: f64, gap: Option<f64>) -> BenchRun {
        BenchRun { status, seconds, nodes: 10, gap_lr: Some(50.0), gap, error: None }
    }

    #[test]
    fn unsolved_runs_count_at_the_limit() {
        let runs = [run(SolveStatus::Optimal, 1.0, Some(0.0)), run(SolveStatus::TimeLimit, 9.5, Some(12.5))];
        let row = aggregate(ProblemKind::ShortestPath, 9, 3, Rational::new(2, 5), "Fz", &runs, 10.0);
        assert_eq!(row.mean_time, 5.5);
        assert_eq!(row.solved, 1);
        assert_eq!(row.worst, Worst::GapPercent(12.5));
    }

    #[test]
    fn all_solved_reports_slowest_time() {
        let runs = [run(SolveStatus::Optimal, 1.0, None), run(SolveStatus::Optimal, 3.0, None)];
        let row = aggregate(ProblemKind::PerfectMatching, 8, 2, Rational::new(4, 5), "Fs", &runs, 10.0);
        assert_eq!(format_row(&row), "pm,8,2,0.8,Fs,2.00,2,3.00,10.0,50.00");
    }
}
