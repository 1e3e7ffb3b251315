//! Build, cut, solve, and read the answer back in exact arithmetic.

use std::fmt::Write as _;

use owa_milp::{branch_and_bound, solve_lp, LpStatus, SolveOptions, SolveReport, SolveStatus};

use crate::cuts::{build_with_cuts, compute_bounds, BoundMethod, CutFamily};
use crate::error::{OwaError, Result};
use crate::formulation::{BuiltModel, FormulationVariant, OwaInstance};
use crate::owa::{to_f64, Rational};

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub big_m: Option<Rational>,
    /// How bounds for the cuts are obtained; `None` uses the LP relaxation
    /// when any requested cut needs them.
    pub bounds: Option<BoundMethod>,
    pub options: SolveOptions,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { big_m: None, bounds: None, options: SolveOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub variant: FormulationVariant,
    pub cuts: Vec<CutFamily>,
    pub report: SolveReport,
    pub x: Option<Vec<u8>>,
    /// OWA value of `x` recomputed from the instance, not the model.
    pub value: Option<Rational>,
    pub sorted_theta: Option<Vec<f64>>,
    /// Vertex sequence for shortest-path domains.
    pub path: Option<Vec<usize>>,
    pub big_m: Rational,
}

pub fn build_model(
    inst: &OwaInstance,
    variant: FormulationVariant,
    cuts: &[CutFamily],
    config: &SolveConfig,
) -> Result<BuiltModel> {
    let table = match config.bounds {
        Some(method) if !cuts.is_empty() => Some(compute_bounds(inst, method)?),
        _ => None,
    };
    build_with_cuts(variant, inst, config.big_m, cuts, table.as_ref())
}

pub fn solve(
    inst: &OwaInstance,
    variant: FormulationVariant,
    cuts: &[CutFamily],
    config: &SolveConfig,
) -> Result<SolveOutcome> {
    let built = build_model(inst, variant, cuts, config)?;
    solve_built(inst, &built, cuts, &config.options)
}

pub fn solve_built(
    inst: &OwaInstance,
    built: &BuiltModel,
    cuts: &[CutFamily],
    options: &SolveOptions,
) -> Result<SolveOutcome> {
    let report = branch_and_bound(&built.model, options);
    let (mut x, mut value, mut sorted_theta, mut path) = (None, None, None, None);
    if let Some(values) = &report.values {
        let point = built.extract_x(values);
        if !inst.domain.contains(&point) {
            return Err(OwaError::NotInDomain);
        }
        value = Some(inst.evaluate(&point)?);
        sorted_theta = Some(built.sorted_theta(values));
        let aux: Vec<f64> = built.aux.iter().map(|&c| values[c]).collect();
        path = inst.domain.flow_path(&aux);
        x = Some(point);
    }
    Ok(SolveOutcome {
        variant: built.variant,
        cuts: cuts.to_vec(),
        report,
        x,
        value,
        sorted_theta,
        path,
        big_m: built.big_m,
    })
}

/// Optimal value of the LP relaxation of `built`.
pub fn root_relaxation(built: &BuiltModel) -> Result<f64> {
    let sol = solve_lp(&built.model);
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        other => Err(OwaError::LpFailure(format!("{other:?}"))),
    }
}

fn fmt_f64(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn fmt_list<T: ToString>(v: &[T]) -> String {
    v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

/// A plain-text report. Wall time is the only nondeterministic field and is
/// printed only when `timing` is set.
pub fn render_report(out: &SolveOutcome, timing: bool) -> String {
    let r = &out.report;
    let mut s = String::new();
    let _ = writeln!(s, "variant {}", out.variant);
    if !out.cuts.is_empty() {
        let _ = writeln!(s, "cuts {}", fmt_list(&out.cuts));
    }
    let _ = writeln!(s, "big_m {}", out.big_m);
    let _ = writeln!(s, "status {}", r.status.as_str());
    if let Some(v) = &out.value {
        let _ = writeln!(s, "optimum {v}");
    }
    if let Some(o) = r.objective {
        let _ = writeln!(s, "objective {}", fmt_f64(o));
    }
    if r.status != SolveStatus::Optimal {
        let _ = writeln!(s, "best_bound {}", fmt_f64(r.best_bound));
    }
    if let Some(x) = &out.x {
        let _ = writeln!(s, "x {}", fmt_list(x));
    }
    if let Some(t) = &out.sorted_theta {
        let t: Vec<String> = t.iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(s, "theta {}", t.join(" "));
    }
    if let Some(p) = &out.path {
        let _ = writeln!(s, "path {}", fmt_list(p));
    }
    let _ = writeln!(s, "nodes {}", r.node_count);
    if let Some(v) = r.root_lp_value {
        let _ = writeln!(s, "root_lp {}", fmt_f64(v));
    }
    match r.gap_lr {
        Some(g) => {
            let _ = writeln!(s, "gap_lr {:.2}", g);
        }
        None => {
            let _ = writeln!(s, "gap_lr -");
        }
    }
    if let Some(g) = r.gap {
        let _ = writeln!(s, "gap {:.2}", g);
    }
    if timing {
        let _ = writeln!(s, "time {:.3}", r.wall_seconds);
    }
    s
}

/// Relative difference used when comparing solver and oracle values.
pub fn relative_error(a: f64, b: &Rational) -> f64 {
    let b = to_f64(b);
    (a - b).abs() / b.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::explicit_cardinality_domain;
    use crate::owa::{rat, CostMatrix, WeightVector};

    fn example1() -> OwaInstance {
        OwaInstance::new(
            explicit_cardinality_domain(3, 2).unwrap(),
            CostMatrix::from_integers(&[vec![1, 4, 1], vec![1, 1, 3], vec![5, 1, 2]]).unwrap(),
            WeightVector::from_integers(&[1, 2, 4]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn every_variant_finds_23() {
        let inst = example1();
        for v in FormulationVariant::catalog() {
            let out = solve(&inst, v, &[], &SolveConfig::default()).unwrap();
            assert_eq!(out.value, Some(rat(23)), "{v}");
            assert_eq!(out.x.as_deref(), Some(&[1u8, 0, 1][..]), "{v}");
        }
    }

    #[test]
    fn report_is_stable_without_timing() {
        let inst = example1();
        let v = FormulationVariant::parse("Fz").unwrap();
        let a = render_report(&solve(&inst, v, &[], &SolveConfig::default()).unwrap(), false);
        let b = render_report(&solve(&inst, v, &[], &SolveConfig::default()).unwrap(), false);
        assert_eq!(a, b);
        assert!(a.contains("optimum 23\n"));
        assert!(!a.contains("time"));
    }
}
