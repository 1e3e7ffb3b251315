//! Valid inequalities, the bound tables they draw on, and variable fixing
//! by elimination tests.

use std::fmt;

use itertools::Itertools;
use owa_milp::{solve_lp_with_bounds, LpStatus, Model, Sense, Tolerances};

use crate::error::{OwaError, Result};
use crate::formulation::{
    add_expr_row, build_unchecked_sign, BuiltModel, Family, Flavor, FormulationVariant, LinExpr, OwaInstance,
};
use crate::owa::{sort_outcomes, to_f64, Rational};

/// Which subsets `I` the subset inequalities are generated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubsetMode {
    Singletons,
    Pairs,
    Complements,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutFamily {
    /// `C^i x >= l_i`.
    CotaiInfLo,
    /// `C^i x <= u_i`.
    CotaiInfUp,
    /// `theta_j >= j-th largest l`.
    CotaiInfOrdLo,
    /// `theta_j <= j-th largest u`.
    CotaiInfOrdUp,
    /// `min_j l_ij <= C^i x <= max_j u_ij`.
    CotaiUij,
    /// `min_i l_ij <= theta_j <= max_i u_ij`.
    CotajUij,
    CotaiUijMaxLo,
    CotaiUijMaxUp,
    CotajUijMaxLo,
    CotajUijMaxUp,
    /// `theta_j <= C^i x + M (1 - z_ij)`; enables signed weights.
    Cotazy,
    ValidOrdering,
    ValidSubsets(SubsetMode),
    Owa2Eq,
    Cotayydis1,
    Cotayydis2,
    Yyrel1,
    Yyrel2,
    Yyrel3,
}

impl CutFamily {
    pub fn all() -> Vec<CutFamily> {
        use CutFamily::*;
        vec![
            CotaiInfLo,
            CotaiInfUp,
            CotaiInfOrdLo,
            CotaiInfOrdUp,
            CotaiUij,
            CotajUij,
            CotaiUijMaxLo,
            CotaiUijMaxUp,
            CotajUijMaxLo,
            CotajUijMaxUp,
            Cotazy,
            ValidOrdering,
            ValidSubsets(SubsetMode::Singletons),
            ValidSubsets(SubsetMode::Pairs),
            ValidSubsets(SubsetMode::Complements),
            ValidSubsets(SubsetMode::Full),
            Owa2Eq,
            Cotayydis1,
            Cotayydis2,
            Yyrel1,
            Yyrel2,
            Yyrel3,
        ]
    }

    /// Families applicable to `variant`, excluding `Cotazy`, which changes
    /// what the model admits rather than only tightening it.
    pub fn default_set(variant: FormulationVariant) -> Vec<CutFamily> {
        Self::all().into_iter().filter(|c| *c != CutFamily::Cotazy && c.compatible_with(variant)).collect()
    }

    pub fn requires_y(&self) -> bool {
        use CutFamily::*;
        matches!(self, Owa2Eq | Cotayydis1 | Cotayydis2 | Yyrel1 | Yyrel2 | Yyrel3)
    }

    pub fn compatible_with(&self, variant: FormulationVariant) -> bool {
        !self.requires_y() || variant.has_y()
    }

    pub fn tag(&self) -> &'static str {
        use CutFamily::*;
        match self {
            CotaiInfLo => "cotai_inf_lo",
            CotaiInfUp => "cotai_inf_up",
            CotaiInfOrdLo => "cotai_inf_ord_lo",
            CotaiInfOrdUp => "cotai_inf_ord_up",
            CotaiUij => "cotai_uij",
            CotajUij => "cotaj_uij",
            CotaiUijMaxLo => "cotai_uij_max_lo",
            CotaiUijMaxUp => "cotai_uij_max_up",
            CotajUijMaxLo => "cotaj_uij_max_lo",
            CotajUijMaxUp => "cotaj_uij_max_up",
            Cotazy => "cotazy",
            ValidOrdering => "validordering",
            ValidSubsets(SubsetMode::Singletons) => "validsubsets_singletons",
            ValidSubsets(SubsetMode::Pairs) => "validsubsets_pairs",
            ValidSubsets(SubsetMode::Complements) => "validsubsets_complements",
            ValidSubsets(SubsetMode::Full) => "validsubsets_full",
            Owa2Eq => "owa2eq",
            Cotayydis1 => "cotayydis1",
            Cotayydis2 => "cotayydis2",
            Yyrel1 => "yyrel1",
            Yyrel2 => "yyrel2",
            Yyrel3 => "yyrel3",
        }
    }

    pub fn parse(tag: &str) -> Result<CutFamily> {
        let tag = tag.trim();
        if tag == "validsubsets" {
            return Ok(CutFamily::ValidSubsets(SubsetMode::Full));
        }
        Self::all()
            .into_iter()
            .find(|c| c.tag().eq_ignore_ascii_case(tag))
            .ok_or_else(|| OwaError::InvalidArgument(format!("unknown cut family {tag:?}")))
    }
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundMethod {
    Enumeration,
    LpRelaxation,
}

/// Bounds on outcome values, overall and conditional on positions.
///
/// `lower_at[i][j]`/`upper_at[i][j]` bound `C^i x` over solutions where
/// objective `i` can sit at position `j`; `owa_at[i][j]` and
/// `owa_not_at[i][j]` bound the OWA value over solutions with and without
/// `i` at `j`. `None` marks an empty set.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    pub p: usize,
    pub l: Vec<f64>,
    pub u: Vec<f64>,
    /// `l_pi[j]` is the `(j+1)`-th largest `l_i`; the value at position `j`
    /// is at least this.
    pub l_pi: Vec<f64>,
    /// `u_pi[j]` is the `(j+1)`-th largest `u_i`.
    pub u_pi: Vec<f64>,
    pub lower_at: Vec<Vec<Option<f64>>>,
    pub upper_at: Vec<Vec<Option<f64>>>,
    pub owa_at: Vec<Vec<Option<f64>>>,
    pub owa_not_at: Vec<Vec<Option<f64>>>,
    pub method: BoundMethod,
}

fn descending(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn fold_min(slot: &mut Option<f64>, v: f64) {
    *slot = Some(slot.map_or(v, |c| c.min(v)));
}

fn fold_max(slot: &mut Option<f64>, v: f64) {
    *slot = Some(slot.map_or(v, |c| c.max(v)));
}

impl BoundTable {
    fn empty(p: usize, method: BoundMethod) -> Self {
        let grid = vec![vec![None; p]; p];
        Self {
            p,
            l: vec![0.0; p],
            u: vec![0.0; p],
            l_pi: vec![0.0; p],
            u_pi: vec![0.0; p],
            lower_at: grid.clone(),
            upper_at: grid.clone(),
            owa_at: grid.clone(),
            owa_not_at: grid,
            method,
        }
    }

    fn finish(mut self) -> Self {
        self.l_pi = descending(&self.l);
        self.u_pi = descending(&self.u);
        self
    }
}

pub fn compute_bounds(inst: &OwaInstance, method: BoundMethod) -> Result<BoundTable> {
    match method {
        BoundMethod::Enumeration => bounds_by_enumeration(inst),
        BoundMethod::LpRelaxation => bounds_by_lp(inst),
    }
}

fn bounds_by_enumeration(inst: &OwaInstance) -> Result<BoundTable> {
    let p = inst.p();
    let mut t = BoundTable::empty(p, BoundMethod::Enumeration);
    let points = inst.domain.enumerate()?;
    let mut lo: Vec<Option<f64>> = vec![None; p];
    let mut hi: Vec<Option<f64>> = vec![None; p];
    for x in &points {
        let y = inst.costs.outcome(x)?;
        let owa = to_f64(&inst.evaluate(x)?);
        for i in 0..p {
            let v = y.y[i];
            fold_min(&mut lo[i], to_f64(&v));
            fold_max(&mut hi[i], to_f64(&v));
            // Positions i can take under some sorting permutation.
            let first = y.y.iter().filter(|&&w| w > v).count();
            let last = y.y.iter().filter(|&&w| w >= v).count() - 1;
            for j in 0..p {
                if (first..=last).contains(&j) {
                    fold_min(&mut t.lower_at[i][j], to_f64(&v));
                    fold_max(&mut t.upper_at[i][j], to_f64(&v));
                    fold_min(&mut t.owa_at[i][j], owa);
                }
                if !(first == last && last == j) {
                    fold_min(&mut t.owa_not_at[i][j], owa);
                }
            }
        }
    }
    t.l = lo.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    t.u = hi.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    Ok(t.finish())
}

fn lp_value(model: &Model, lower: &[f64], upper: &[f64]) -> Result<Option<f64>> {
    let sol = solve_lp_with_bounds(model, lower, upper, &Tolerances::default());
    match sol.status {
        LpStatus::Optimal => Ok(Some(sol.objective)),
        LpStatus::Infeasible => Ok(None),
        other => Err(OwaError::LpFailure(format!("{other:?}"))),
    }
}

fn with_objective(model: &Model, terms: &[(usize, f64)]) -> Model {
    let mut m = model.clone();
    m.objective = vec![0.0; m.num_vars()];
    m.objective_offset = 0.0;
    for &(j, a) in terms {
        m.objective[j] += a;
    }
    m
}

fn bounds_by_lp(inst: &OwaInstance) -> Result<BoundTable> {
    let p = inst.p();
    let mut t = BoundTable::empty(p, BoundMethod::LpRelaxation);
    let variant = FormulationVariant::new(Family::Z, Flavor::Base);
    let cuts: &[CutFamily] = if inst.weights.has_negative() { &[CutFamily::Cotazy] } else { &[] };
    let built = build_with_cuts(variant, inst, None, cuts, None)?;
    let lower = built.model.lower_bounds();
    let upper = built.model.upper_bounds();
    let z = built.z.clone().expect("z block");
    let min_models: Vec<Model> = (0..p).map(|i| with_objective(&built.model, &built.cost_expr(i).terms)).collect();
    let max_models: Vec<Model> = (0..p)
        .map(|i| {
            let neg: Vec<_> = built.cost_expr(i).terms.iter().map(|&(j, a)| (j, -a)).collect();
            with_objective(&built.model, &neg)
        })
        .collect();

    for i in 0..p {
        t.l[i] = lp_value(&min_models[i], &lower, &upper)?.unwrap_or(0.0);
        t.u[i] = lp_value(&max_models[i], &lower, &upper)?.map(|v| -v).unwrap_or(0.0);
        for j in 0..p {
            let col = z[i][j].expect("unreduced block");
            let (mut lo1, mut hi1, mut lo0, mut hi0) = (lower.clone(), upper.clone(), lower.clone(), upper.clone());
            lo1[col] = 1.0;
            hi1[col] = 1.0;
            lo0[col] = 0.0;
            hi0[col] = 0.0;
            t.lower_at[i][j] = lp_value(&min_models[i], &lo1, &hi1)?;
            t.upper_at[i][j] = lp_value(&max_models[i], &lo1, &hi1)?.map(|v| -v);
            t.owa_at[i][j] = lp_value(&built.model, &lo1, &hi1)?;
            t.owa_not_at[i][j] = lp_value(&built.model, &lo0, &hi0)?;
        }
    }
    Ok(t.finish())
}

/// Builds `variant` and appends `cuts`. Signed weights are accepted here when
/// `cuts` contains [`CutFamily::Cotazy`] and the variant keeps the full
/// permutation constraints.
pub fn build_with_cuts(
    variant: FormulationVariant,
    inst: &OwaInstance,
    big_m: Option<Rational>,
    cuts: &[CutFamily],
    bounds: Option<&BoundTable>,
) -> Result<BuiltModel> {
    if inst.weights.has_negative()
        && !(inst.weights.signed_allowed && cuts.contains(&CutFamily::Cotazy) && variant.keeps_full_permutation())
    {
        return Err(OwaError::SignedWeights);
    }
    let mut built = build_unchecked_sign(variant, inst, big_m)?;
    let owned;
    let bounds = match bounds {
        Some(b) => Some(b),
        None if cuts.iter().any(needs_bounds) => {
            owned = compute_bounds(inst, BoundMethod::LpRelaxation)?;
            Some(&owned)
        }
        None => None,
    };
    for &cut in cuts {
        built = apply_cut_opt(&built, cut, bounds)?;
    }
    Ok(built)
}

fn needs_bounds(c: &CutFamily) -> bool {
    use CutFamily::*;
    !matches!(c, Cotazy | ValidOrdering | ValidSubsets(_) | Owa2Eq)
}

pub fn apply_cut(model: &BuiltModel, family: CutFamily, bounds: &BoundTable) -> Result<BuiltModel> {
    apply_cut_opt(model, family, Some(bounds))
}

fn apply_cut_opt(model: &BuiltModel, family: CutFamily, bounds: Option<&BoundTable>) -> Result<BuiltModel> {
    if !family.compatible_with(model.variant) {
        return Err(OwaError::IncompatibleCut { family: family.tag().into(), variant: model.variant.name() });
    }
    let bounds = match bounds {
        Some(b) => b,
        None if !needs_bounds(&family) => &BoundTable::empty(model.p, BoundMethod::Enumeration),
        None => return Err(OwaError::InvalidArgument(format!("{family} needs a bound table"))),
    };
    if bounds.p != model.p {
        return Err(OwaError::DimensionMismatch { expected: model.p, found: bounds.p });
    }
    let mut b = model.clone();
    let p = b.p;
    let tag = family.tag();
    let m = b.big_m_f64();
    let row = |b: &mut BuiltModel, e: LinExpr, sense: Sense, rhs: f64| {
        add_expr_row(&mut b.model, e, sense, rhs, tag);
    };
    let bt = bounds;
    use CutFamily::*;
    match family {
        CotaiInfLo => (0..p).for_each(|i| row(&mut b, model.cost_expr(i), Sense::Ge, bt.l[i])),
        CotaiInfUp => (0..p).for_each(|i| row(&mut b, model.cost_expr(i), Sense::Le, bt.u[i])),
        CotaiInfOrdLo => (0..p).for_each(|j| row(&mut b, model.theta_expr(j), Sense::Ge, bt.l_pi[j])),
        CotaiInfOrdUp => (0..p).for_each(|j| row(&mut b, model.theta_expr(j), Sense::Le, bt.u_pi[j])),
        CotaiUij => {
            for i in 0..p {
                if let Some(lo) = bt.lower_at[i].iter().flatten().cloned().reduce(f64::min) {
                    row(&mut b, model.cost_expr(i), Sense::Ge, lo);
                }
                if let Some(hi) = bt.upper_at[i].iter().flatten().cloned().reduce(f64::max) {
                    row(&mut b, model.cost_expr(i), Sense::Le, hi);
                }
            }
        }
        CotajUij => {
            for j in 0..p {
                if let Some(lo) = (0..p).filter_map(|i| bt.lower_at[i][j]).reduce(f64::min) {
                    row(&mut b, model.theta_expr(j), Sense::Ge, lo);
                }
                if let Some(hi) = (0..p).filter_map(|i| bt.upper_at[i][j]).reduce(f64::max) {
                    row(&mut b, model.theta_expr(j), Sense::Le, hi);
                }
            }
        }
        CotaiUijMaxLo | CotaiUijMaxUp => {
            for i in 0..p {
                let mut e = model.cost_expr(i);
                for j in 0..p {
                    let coef = if family == CotaiUijMaxLo { bt.l[i].max(bt.l_pi[j]) } else { bt.u[i].min(bt.u_pi[j]) };
                    e.add(&model.z_expr(i, j), -coef);
                }
                let sense = if family == CotaiUijMaxLo { Sense::Ge } else { Sense::Le };
                row(&mut b, e, sense, 0.0);
            }
        }
        CotajUijMaxLo | CotajUijMaxUp => {
            for j in 0..p {
                let mut e = model.theta_expr(j);
                for i in 0..p {
                    let coef = if family == CotajUijMaxLo { bt.l[i].max(bt.l_pi[j]) } else { bt.u[i].min(bt.u_pi[j]) };
                    e.add(&model.z_expr(i, j), -coef);
                }
                let sense = if family == CotajUijMaxLo { Sense::Ge } else { Sense::Le };
                row(&mut b, e, sense, 0.0);
            }
        }
        Cotazy => {
            for i in 0..p {
                for j in 0..p {
                    let mut e = model.theta_expr(j);
                    e.add(&model.cost_expr(i), -1.0);
                    e.add(&model.z_expr(i, j), m);
                    row(&mut b, e, Sense::Le, m);
                }
            }
        }
        ValidOrdering => {
            for j in 0..p.saturating_sub(1) {
                let e = model.theta_expr(j).plus(&model.theta_expr(j + 1), -1.0);
                row(&mut b, e, Sense::Ge, 0.0);
            }
        }
        ValidSubsets(mode) => {
            let subsets: Vec<Vec<usize>> = match mode {
                SubsetMode::Singletons => (0..p).map(|i| vec![i]).collect(),
                SubsetMode::Pairs => (0..p).combinations(2).collect(),
                SubsetMode::Complements if p >= 2 => {
                    (0..p).map(|skip| (0..p).filter(|&i| i != skip).collect()).collect()
                }
                SubsetMode::Complements => Vec::new(),
                SubsetMode::Full => vec![(0..p).collect()],
            };
            for set in subsets {
                let mut e = LinExpr::default();
                for &i in &set {
                    e.add(&model.cost_expr(i), 1.0);
                }
                for j in 0..set.len() {
                    e.add(&model.theta_expr(j), -1.0);
                }
                row(&mut b, e, Sense::Le, 0.0);
            }
        }
        Owa2Eq => {
            for i in 0..p {
                let mut e =
                    LinExpr { terms: (0..p).map(|k| (model.y_col(i, k).unwrap(), 1.0)).collect(), constant: 0.0 };
                e.add(&model.cost_expr(i), -1.0);
                row(&mut b, e, Sense::Eq, 0.0);
            }
        }
        Cotayydis1 => {
            for i in 0..p {
                for j in 0..p {
                    let c = bt.u[i].min(bt.u_pi[j]);
                    let mut e = LinExpr::var(model.y_col(i, j).unwrap());
                    e.add(&model.theta_expr(j), -1.0);
                    for k in j..p {
                        e.add(&model.z_expr(i, k), c);
                    }
                    row(&mut b, e, Sense::Le, c);
                }
            }
        }
        Cotayydis2 => {
            for i in 0..p {
                for j in 0..p {
                    let mut e = model.cost_expr(i);
                    e.add(&LinExpr::var(model.y_col(i, j).unwrap()), -1.0);
                    e.add(&model.z_expr(i, j), bt.u[i]);
                    row(&mut b, e, Sense::Le, bt.u[i]);
                }
            }
        }
        Yyrel1 | Yyrel2 | Yyrel3 => {
            for (i, i2) in (0..p).cartesian_product(0..p).filter(|(a, c)| a != c) {
                for j in 0..p.saturating_sub(1) {
                    let mut e = LinExpr::default();
                    let mut rhs = 0.0;
                    match family {
                        Yyrel1 => {
                            for k in j + 1..p {
                                e.add(&LinExpr::var(model.y_col(i, k).unwrap()), 1.0);
                            }
                            e.add(&LinExpr::var(model.y_col(i2, j).unwrap()), -1.0);
                            e.add(&model.z_expr(i2, j), bt.u[i]);
                            e.add(&model.z_expr(i, j), bt.u[i]);
                            rhs = bt.u[i];
                        }
                        _ => {
                            // Both slack terms bound the value of objective i at
                            // position j+1; see the module tests for why the
                            // second one cannot refer to objective i2.
                            let c = if family == Yyrel2 {
                                bt.upper_at[i][j + 1].unwrap_or(0.0).max(0.0)
                            } else {
                                bt.u[i].min(bt.u_pi[j + 1])
                            };
                            e.add(&LinExpr::var(model.y_col(i, j + 1).unwrap()), 1.0);
                            e.add(&LinExpr::var(model.y_col(i2, j).unwrap()), -1.0);
                            e.add(&model.z_expr(i, j + 1), c);
                            e.add(&model.z_expr(i2, j), c);
                            rhs += 2.0 * c;
                        }
                    }
                    row(&mut b, e, Sense::Le, rhs);
                }
            }
        }
    }
    b.cut_tags.push(tag.to_string());
    Ok(b)
}

/// Fixes `z_ij` to `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fixing {
    pub i: usize,
    pub j: usize,
    pub value: u8,
}

/// Fixings implied by the position-conditional OWA bounds and an incumbent
/// value `U`: `L_ij > U` fixes `z_ij = 0`, `L0_ij > U` fixes `z_ij = 1`.
/// An empty conditional set counts as an infinite bound. No incumbent, no
/// fixings.
pub fn elimination_tests(model: &BuiltModel, bounds: &BoundTable, incumbent: Option<Rational>) -> Vec<Fixing> {
    let Some(u) = incumbent.map(|v| to_f64(&v)) else {
        return Vec::new();
    };
    let tol = 1e-6 * (1.0 + u.abs());
    let exceeds = |v: Option<f64>| v.map_or(true, |l| l > u + tol);
    let mut out = Vec::new();
    for i in 0..model.p.min(bounds.p) {
        for j in 0..model.p.min(bounds.p) {
            if exceeds(bounds.owa_at[i][j]) {
                out.push(Fixing { i, j, value: 0 });
            } else if exceeds(bounds.owa_not_at[i][j]) {
                out.push(Fixing { i, j, value: 1 });
            }
        }
    }
    out
}

/// Applies fixings as column bounds where `z_ij` is a column, and as tagged
/// equality rows otherwise.
pub fn apply_fixings(model: &BuiltModel, fixings: &[Fixing]) -> BuiltModel {
    let mut b = model.clone();
    for f in fixings {
        let col = b.z.as_ref().and_then(|z| z[f.i][f.j]);
        match col {
            Some(c) => {
                b.model.variables[c].lower = f.value as f64;
                b.model.variables[c].upper = f.value as f64;
            }
            None => {
                let e = b.z_expr(f.i, f.j);
                add_expr_row(&mut b.model, e, Sense::Eq, f.value as f64, "elim_fix");
            }
        }
    }
    b
}

/// The canonical permutation of an optimal `x`, for checking that fixings
/// keep it available.
pub fn canonical_positions(inst: &OwaInstance, x: &[u8]) -> Result<Vec<usize>> {
    let (_, perm) = sort_outcomes(&inst.costs.outcome(x)?);
    Ok(perm.pi().to_vec())
}
