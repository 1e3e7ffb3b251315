//! Exhaustive ground truth. Everything here is exact: the domain is
//! enumerated and each point is evaluated in rationals.

use std::fmt::Write as _;

use owa_milp::{SolveOptions, SolveStatus};

use crate::cuts::CutFamily;
use crate::error::Result;
use crate::formulation::{canonical_lift, BuiltModel, FormulationVariant, OwaInstance};
use crate::owa::{owa_of_outcome, sort_outcomes, to_f64, OutcomeVector, Permutation, Rational};
use crate::solve::{build_model, relative_error, solve_built, SolveConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub x: Vec<u8>,
    pub y: OutcomeVector,
    pub sorted: OutcomeVector,
    pub sigma: Permutation,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Lexicographically smallest minimizer.
    pub x_star: Vec<u8>,
    pub value: Rational,
    pub rows: Vec<OracleRow>,
}

impl OracleResult {
    pub fn optimal_rows(&self) -> impl Iterator<Item = &OracleRow> {
        self.rows.iter().filter(move |r| r.value == self.value)
    }

    /// One line per feasible point: `x | y | sorted y | sigma | value`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let join = |v: &[Rational]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
        for r in &self.rows {
            let x: Vec<String> = r.x.iter().map(|b| b.to_string()).collect();
            let mark = if r.x == self.x_star { " *" } else { "" };
            let _ = writeln!(
                s,
                "{} | {} | {} | {} | {}{}",
                x.join(""),
                join(&r.y.y),
                join(&r.sorted.y),
                r.sigma,
                r.value,
                mark
            );
        }
        let _ = writeln!(s, "optimum {}", self.value);
        s
    }
}

pub fn brute_force_optimum(inst: &OwaInstance) -> Result<OracleResult> {
    let mut points = inst.domain.enumerate()?;
    points.sort();
    let mut rows = Vec::with_capacity(points.len());
    for x in points {
        let y = inst.costs.outcome(&x)?;
        let (sorted, sigma) = sort_outcomes(&y);
        let value = owa_of_outcome(&y, &inst.weights)?;
        rows.push(OracleRow { x, y, sorted, sigma, value });
    }
    let best = rows
        .iter()
        .min_by(|a, b| a.value.cmp(&b.value).then_with(|| a.x.cmp(&b.x)))
        .ok_or(crate::error::OwaError::InvalidArgument("empty domain".into()))?;
    Ok(OracleResult { x_star: best.x.clone(), value: best.value, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub oracle_value: Rational,
    pub solver_objective: Option<f64>,
    /// Direct OWA value of the solver's `x`.
    pub solver_value: Option<Rational>,
    pub status: SolveStatus,
    pub reason: Option<String>,
}

pub const VERDICT_TOL: f64 = 1e-6;

pub fn verify_formulation(
    inst: &OwaInstance,
    variant: FormulationVariant,
    cuts: &[CutFamily],
    config: &SolveConfig,
) -> Result<Verdict> {
    let built = build_model(inst, variant, cuts, config)?;
    verify_model(inst, &built, &config.options)
}

/// Like [`verify_formulation`] for a model that may have been altered after
/// building.
pub fn verify_model(inst: &OwaInstance, built: &BuiltModel, options: &SolveOptions) -> Result<Verdict> {
    let oracle = brute_force_optimum(inst)?;
    let outcome = solve_built(inst, built, &[], options);
    let fail = |reason: String, status, obj, val| Verdict {
        pass: false,
        oracle_value: oracle.value,
        solver_objective: obj,
        solver_value: val,
        status,
        reason: Some(reason),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => return Ok(fail(e.to_string(), SolveStatus::Infeasible, None, None)),
    };
    let r = &outcome.report;
    let (obj, val) = (r.objective, outcome.value);
    if r.status != SolveStatus::Optimal {
        return Ok(fail(format!("status {}", r.status.as_str()), r.status, obj, val));
    }
    let (Some(o), Some(v)) = (obj, val) else {
        return Ok(fail("no incumbent".into(), r.status, obj, val));
    };
    if relative_error(o, &oracle.value) > VERDICT_TOL {
        return Ok(fail(format!("objective {o} vs oracle {}", oracle.value), r.status, obj, val));
    }
    if v != oracle.value {
        return Ok(fail(format!("incumbent evaluates to {v}, oracle {}", oracle.value), r.status, obj, val));
    }
    Ok(Verdict {
        pass: true,
        oracle_value: oracle.value,
        solver_objective: obj,
        solver_value: val,
        status: r.status,
        reason: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport {
    pub lifts: usize,
    /// Lifts at which at least one selected row holds with equality.
    pub tight: usize,
    /// `(row, lifts where that row is tight)`.
    pub per_row: Vec<(usize, usize)>,
}

impl TightnessReport {
    pub fn fraction(&self) -> f64 {
        if self.lifts == 0 {
            0.0
        } else {
            self.tight as f64 / self.lifts as f64
        }
    }

    pub fn never_tight(&self) -> Vec<usize> {
        self.per_row.iter().filter(|(_, n)| *n == 0).map(|(r, _)| *r).collect()
    }
}

pub const TIGHT_TOL: f64 = 1e-7;

/// Evaluates the rows picked by `select` at the canonical lift of every
/// point of the domain. `select` sees the point and may pick rows that
/// depend on it.
pub fn tightness_scan<F>(inst: &OwaInstance, built: &BuiltModel, select: F) -> Result<TightnessReport>
where
    F: Fn(&BuiltModel, &[u8]) -> Vec<usize>,
{
    let points = inst.domain.enumerate()?;
    let mut per_row: Vec<(usize, usize)> = Vec::new();
    let mut tight = 0;
    for x in &points {
        let lift = canonical_lift(built, inst, x)?;
        let mut any = false;
        for r in select(built, x) {
            let row = &built.model.rows[r];
            let slack = (row.activity(&lift) - row.rhs).abs();
            let hit = slack <= TIGHT_TOL * (1.0 + row.rhs.abs());
            any |= hit;
            match per_row.iter_mut().find(|(k, _)| *k == r) {
                Some(e) => e.1 += hit as usize,
                None => per_row.push((r, hit as usize)),
            }
        }
        tight += any as usize;
    }
    per_row.sort();
    Ok(TightnessReport { lifts: points.len(), tight, per_row })
}

/// All rows carrying `tag`, for use as a [`tightness_scan`] selector.
pub fn rows_tagged(tag: &str) -> impl Fn(&BuiltModel, &[u8]) -> Vec<usize> + '_ {
    move |b, _| b.rows_with_tag(tag).collect()
}

/// Agreement of an oracle table with the closed-form evaluation, row by row.
pub fn table_consistent(inst: &OwaInstance, oracle: &OracleResult) -> Result<bool> {
    for r in &oracle.rows {
        if inst.evaluate(&r.x)? != r.value {
            return Ok(false);
        }
        let w: Rational = inst.weights.omega.iter().zip(&r.sorted.y).map(|(a, b)| a * b).sum();
        if w != r.value {
            return Ok(false);
        }
    }
    Ok(to_f64(&oracle.value).is_finite())
}
