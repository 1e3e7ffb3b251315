//! MILP formulations of the OWA problem.
//!
//! Every variant is built over the same column layout: design variables,
//! domain auxiliaries, the permutation block (`z` or `s`), `theta`, then `y`
//! for the two-index families. Rows carry the name of the constraint family
//! they belong to as their tag.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};
use owa_milp::{solve_lp, LpStatus, Model, Sense, VarKind};

use crate::domain::DomainSpec;
use crate::error::{OwaError, Result};
use crate::owa::{
    evaluate_owa, rat, s_of_permutation, sort_outcomes, to_f64, z_of_permutation, CostMatrix, Rational, WeightVector,
};

/// Variable family: which permutation encoding, and whether `y` variables exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Z,
    ZY,
    S,
    GS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Base0,
    Base,
    R1,
    R2,
    R3,
    GsPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulationVariant {
    pub family: Family,
    pub flavor: Flavor,
    /// Drop `z_i1` (or `s_i1`) and describe the permutation on the remaining
    /// columns only.
    pub reduced_first_column: bool,
}

const CATALOG: [(Family, Flavor, &str); 16] = [
    (Family::Z, Flavor::Base0, "Fz0"),
    (Family::Z, Flavor::Base, "Fz"),
    (Family::Z, Flavor::R1, "FzR1"),
    (Family::Z, Flavor::R2, "FzR2"),
    (Family::Z, Flavor::R3, "FzR3"),
    (Family::ZY, Flavor::Base0, "Fzy0"),
    (Family::ZY, Flavor::Base, "Fzy"),
    (Family::ZY, Flavor::R1, "FzyR1"),
    (Family::ZY, Flavor::R2, "FzyR2"),
    (Family::ZY, Flavor::R3, "FzyR3"),
    (Family::S, Flavor::Base, "Fs"),
    (Family::S, Flavor::R1, "FsR1"),
    (Family::S, Flavor::R2, "FsR2"),
    (Family::S, Flavor::R3, "FsR3"),
    (Family::GS, Flavor::Base, "Fgs"),
    (Family::GS, Flavor::GsPrime, "Fgs'"),
];

impl FormulationVariant {
    pub const fn new(family: Family, flavor: Flavor) -> Self {
        Self { family, flavor, reduced_first_column: false }
    }

    pub const fn reduced(self) -> Self {
        Self { reduced_first_column: true, ..self }
    }

    /// The sixteen cataloged variants, unreduced.
    pub fn catalog() -> Vec<FormulationVariant> {
        CATALOG.iter().map(|&(family, flavor, _)| Self::new(family, flavor)).collect()
    }

    pub fn base_name(&self) -> &'static str {
        CATALOG
            .iter()
            .find(|&&(f, v, _)| f == self.family && v == self.flavor)
            .map(|&(_, _, name)| name)
            .unwrap_or("invalid")
    }

    pub fn name(&self) -> String {
        if self.reduced_first_column {
            format!("{}-reduced", self.base_name())
        } else {
            self.base_name().to_string()
        }
    }

    /// Parses a catalog name such as `Fz`, `FzyR2` or `Fgs'`, case-insensitively,
    /// with an optional `-reduced` suffix. `FgsPrime` is accepted for `Fgs'`.
    pub fn parse(name: &str) -> Result<Self> {
        let trimmed = name.trim();
        let (base, reduced) = match trimmed.strip_suffix("-reduced") {
            Some(b) => (b, true),
            None => (trimmed, false),
        };
        let base = if base.eq_ignore_ascii_case("FgsPrime") { "Fgs'" } else { base };
        let &(family, flavor, _) = CATALOG
            .iter()
            .find(|(_, _, n)| n.eq_ignore_ascii_case(base))
            .ok_or_else(|| OwaError::UnknownVariant(name.to_string()))?;
        let v = Self { family, flavor, reduced_first_column: reduced };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        if !CATALOG.iter().any(|&(f, v, _)| f == self.family && v == self.flavor) {
            return Err(OwaError::UnknownVariant(format!("{:?}/{:?}", self.family, self.flavor)));
        }
        if self.reduced_first_column {
            let ok = match self.family {
                Family::S => true,
                Family::Z | Family::ZY => matches!(self.flavor, Flavor::Base0 | Flavor::Base | Flavor::R1),
                Family::GS => false,
            };
            if !ok {
                return Err(OwaError::UnknownVariant(format!(
                    "{} has no reduced form: without row sums the dropped column is undefined",
                    self.base_name()
                )));
            }
        }
        Ok(())
    }

    pub fn has_y(&self) -> bool {
        matches!(self.family, Family::ZY | Family::GS)
    }

    /// Whether the rows force the permutation block to encode a permutation.
    /// Signed weights are only accepted for these variants.
    pub fn keeps_full_permutation(&self) -> bool {
        match self.family {
            Family::GS => true,
            _ => matches!(self.flavor, Flavor::Base0 | Flavor::Base | Flavor::R1),
        }
    }

    /// Tags of the formulation rows (not domain rows) this variant emits.
    pub fn constraint_tags(&self) -> Vec<&'static str> {
        use Flavor::*;
        match (self.family, self.flavor) {
            (Family::Z, Base0) => vec!["owab", "owac", "owad0", "owae"],
            (Family::Z, Base) => vec!["owab", "owac", "owad", "owae"],
            (Family::Z, R1) => vec!["owab", "owac", "owad"],
            (Family::Z, R2) => vec!["owab", "owad"],
            (Family::Z, R3) => vec!["owab_le", "owad_prime"],
            (Family::ZY, Base0) => vec!["owa2b", "owa2c", "owa2d0", "owa2e", "theta_link"],
            (Family::ZY, Base) => vec!["owa2b", "owa2c", "owa2d", "owa2e", "theta_link"],
            (Family::ZY, R1) => vec!["owa2b", "owa2c", "owa2d", "theta_link"],
            (Family::ZY, R2) => vec!["owa2b", "owa2d", "theta_link"],
            (Family::ZY, R3) => vec!["owa2b_le", "owa2d_prime", "theta_link"],
            (Family::S, Base) => vec!["owa3b", "owa3c", "owa3d", "owa3e"],
            (Family::S, R1) => vec!["owa3b", "owa3c", "owa3d"],
            (Family::S, R2) => vec!["owa3b", "owa3d"],
            (Family::S, R3) => vec!["owa3b_le", "owa3d"],
            (Family::GS, Base) => vec!["owa2b", "owa2c", "owa2e", "owa2g", "owa2h", "theta_link"],
            (Family::GS, GsPrime) => vec!["owa2b", "owa2c", "owa2d0", "owa2e", "owa2g", "theta_link"],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for FormulationVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Tags that may appear on rows of a built model.
pub const KNOWN_TAGS: &[&str] = &[
    "owab",
    "owab_le",
    "owac",
    "owad0",
    "owad",
    "owad_prime",
    "owae",
    "owa2b",
    "owa2b_le",
    "owa2c",
    "owa2d0",
    "owa2d",
    "owa2d_prime",
    "owa2e",
    "owa2g",
    "owa2h",
    "theta_link",
    "owa3b",
    "owa3b_le",
    "owa3c",
    "owa3d",
    "owa3e",
    "card",
    "SPPb",
    "SPPc",
    "SPPd",
    "SPPe",
    "PM1",
    "hull_link",
    "hull_convex",
    "elim_fix",
];

/// One OWA problem: a domain, a cost matrix and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct OwaInstance {
    pub domain: DomainSpec,
    pub costs: CostMatrix,
    pub weights: WeightVector,
}

impl OwaInstance {
    pub fn new(domain: DomainSpec, costs: CostMatrix, weights: WeightVector) -> Result<Self> {
        if costs.n() != domain.n_design {
            return Err(OwaError::DimensionMismatch { expected: domain.n_design, found: costs.n() });
        }
        if weights.len() != costs.p() {
            return Err(OwaError::DimensionMismatch { expected: costs.p(), found: weights.len() });
        }
        Ok(Self { domain, costs, weights })
    }

    pub fn p(&self) -> usize {
        self.costs.p()
    }

    pub fn n(&self) -> usize {
        self.costs.n()
    }

    pub fn evaluate(&self, x: &[u8]) -> Result<Rational> {
        evaluate_owa(x, &self.costs, &self.weights)
    }
}

/// An affine expression over model columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn var(col: usize) -> Self {
        Self { terms: vec![(col, 1.0)], constant: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn add(&mut self, other: &LinExpr, k: f64) -> &mut Self {
        self.terms.extend(other.terms.iter().map(|&(j, a)| (j, a * k)));
        self.constant += other.constant * k;
        self
    }

    pub fn plus(mut self, other: &LinExpr, k: f64) -> Self {
        self.add(other, k);
        self
    }

    pub fn value(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(j, a)| a * values[j]).sum::<f64>()
    }
}

/// Adds `expr (sense) rhs`, moving the expression's constant to the right.
pub fn add_expr_row(model: &mut Model, expr: LinExpr, sense: Sense, rhs: f64, tag: &str) -> usize {
    model.add_row(expr.terms, sense, rhs - expr.constant, tag)
}

/// A built formulation with its column maps.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltModel {
    pub model: Model,
    pub variant: FormulationVariant,
    pub big_m: Rational,
    pub p: usize,
    pub x: Vec<usize>,
    pub aux: Vec<usize>,
    pub theta: Vec<usize>,
    /// `z[i][j]`; `None` for columns removed by the reduced encoding.
    pub z: Option<Vec<Vec<Option<usize>>>>,
    pub s: Option<Vec<Vec<Option<usize>>>>,
    pub y: Option<Vec<Vec<usize>>>,
    pub costs: Vec<Vec<f64>>,
    /// Tags of the cut families added after the build.
    pub cut_tags: Vec<String>,
}

impl BuiltModel {
    pub fn big_m_f64(&self) -> f64 {
        to_f64(&self.big_m)
    }

    /// `C^i x`.
    pub fn cost_expr(&self, i: usize) -> LinExpr {
        LinExpr {
            terms: self.x.iter().zip(&self.costs[i]).filter(|(_, &c)| c != 0.0).map(|(&col, &c)| (col, c)).collect(),
            constant: 0.0,
        }
    }

    /// `theta_j`, or `sum_i y_ij` for the two-index families.
    pub fn theta_expr(&self, j: usize) -> LinExpr {
        match &self.y {
            Some(y) => LinExpr { terms: (0..self.p).map(|i| (y[i][j], 1.0)).collect(), constant: 0.0 },
            None => LinExpr::var(self.theta[j]),
        }
    }

    /// `z_ij` in terms of the model's columns.
    pub fn z_expr(&self, i: usize, j: usize) -> LinExpr {
        if let Some(z) = &self.z {
            return match z[i][j] {
                Some(col) => LinExpr::var(col),
                None => {
                    let mut e = LinExpr::constant(1.0);
                    for col in z[i].iter().flatten() {
                        e.terms.push((*col, -1.0));
                    }
                    e
                }
            };
        }
        if j + 1 < self.p {
            self.s_expr(i, j + 1).plus(&self.s_expr(i, j), -1.0)
        } else {
            LinExpr::constant(1.0).plus(&self.s_expr(i, j), -1.0)
        }
    }

    /// `s_ij` in terms of the model's columns.
    pub fn s_expr(&self, i: usize, j: usize) -> LinExpr {
        if let Some(s) = &self.s {
            return match s[i][j] {
                Some(col) => LinExpr::var(col),
                None => LinExpr::constant(0.0),
            };
        }
        let mut e = LinExpr::constant(1.0);
        for k in j..self.p {
            e.add(&self.z_expr(i, k), -1.0);
        }
        e
    }

    pub fn y_col(&self, i: usize, j: usize) -> Option<usize> {
        self.y.as_ref().map(|y| y[i][j])
    }

    pub fn extract_x(&self, values: &[f64]) -> Vec<u8> {
        self.x.iter().map(|&c| u8::from(values[c] > 0.5)).collect()
    }

    pub fn theta_values(&self, values: &[f64]) -> Vec<f64> {
        (0..self.p).map(|j| self.theta_expr(j).value(values)).collect()
    }

    /// Theta in non-increasing order, for reports of variants that do not
    /// enforce the ordering themselves.
    pub fn sorted_theta(&self, values: &[f64]) -> Vec<f64> {
        let mut t = self.theta_values(values);
        t.sort_by(|a, b| b.total_cmp(a));
        t
    }

    pub fn rows_with_tag<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.model.rows.iter().enumerate().filter(move |(_, r)| r.tag == tag).map(|(k, _)| k)
    }
}

fn ceil_f64(v: f64) -> i128 {
    (v - 1e-9).ceil() as i128
}

/// LP maximum of `C^i x` over the domain relaxation, per objective.
/// `None` when the relaxation is infeasible.
pub fn lp_cost_maxima(dom: &DomainSpec, c: &CostMatrix) -> Result<Option<Vec<f64>>> {
    let mut model = Model::new("bounds");
    let cols = dom.add_to_model(&mut model);
    let mut out = Vec::with_capacity(c.p());
    for i in 0..c.p() {
        for (k, &col) in cols.x.iter().enumerate() {
            model.set_objective(col, -to_f64(&c.row(i)[k]));
        }
        let sol = solve_lp(&model);
        match sol.status {
            LpStatus::Optimal => out.push(-sol.objective),
            LpStatus::Infeasible => return Ok(None),
            other => return Err(OwaError::LpFailure(format!("{other:?}"))),
        }
    }
    Ok(Some(out))
}

fn positive_row_sum_bound(c: &CostMatrix) -> Rational {
    (0..c.p())
        .map(|i| c.row(i).iter().filter(|v| **v > Rational::zero()).sum::<Rational>())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Upper bound on every `C^i x` over `Q` used to validate big-M values.
pub fn outcome_bound(dom: &DomainSpec, c: &CostMatrix) -> Result<Rational> {
    Ok(match lp_cost_maxima(dom, c)? {
        Some(u) => rat(ceil_f64(u.iter().cloned().fold(0.0, f64::max)).max(0)),
        None => positive_row_sum_bound(c),
    })
}

/// `1 + max_i U_i`, with `U_i` the LP maximum of `C^i x` over the domain
/// (rounded up to an integer), or the largest positive row sum when the
/// relaxation is infeasible.
pub fn big_m_default(dom: &DomainSpec, c: &CostMatrix) -> Result<Rational> {
    Ok(outcome_bound(dom, c)? + rat(1))
}

/// Builds `variant` for `inst`. Rejects signed weights; see
/// [`crate::cuts::build_with_cuts`] for the signed extension.
pub fn build(variant: FormulationVariant, inst: &OwaInstance, big_m: Option<Rational>) -> Result<BuiltModel> {
    if inst.weights.has_negative() {
        return Err(OwaError::SignedWeights);
    }
    build_unchecked_sign(variant, inst, big_m)
}

pub(crate) fn build_unchecked_sign(
    variant: FormulationVariant,
    inst: &OwaInstance,
    big_m: Option<Rational>,
) -> Result<BuiltModel> {
    variant.validate()?;
    let bound = outcome_bound(&inst.domain, &inst.costs)?;
    let m = match big_m {
        Some(m) if m <= bound => return Err(OwaError::BigMTooSmall { m: m.to_string(), bound: bound.to_string() }),
        Some(m) => m,
        None => bound + rat(1),
    };
    let p = inst.p();
    let mf = to_f64(&m);
    let cap = mf * p as f64;
    let reduced = variant.reduced_first_column;

    let mut model = Model::new(format!("owa_{}", variant.name().replace('\'', "p")));
    let cols = inst.domain.add_to_model(&mut model);

    let (mut z, mut s) = (None, None);
    let block: Vec<Vec<Option<usize>>> = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| {
                    if reduced && j == 0 {
                        None
                    } else {
                        let letter = if variant.family == Family::S { "s" } else { "z" };
                        Some(model.add_var(format!("{letter}_{}_{}", i + 1, j + 1), VarKind::Binary, 0.0, 1.0))
                    }
                })
                .collect()
        })
        .collect();
    if variant.family == Family::S {
        s = Some(block);
    } else {
        z = Some(block);
    }
    let theta: Vec<usize> =
        (0..p).map(|j| model.add_var(format!("theta_{}", j + 1), VarKind::Continuous, 0.0, cap)).collect();
    let y = variant.has_y().then(|| {
        (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| model.add_var(format!("y_{}_{}", i + 1, j + 1), VarKind::Continuous, 0.0, cap))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    });

    let mut built = BuiltModel {
        model,
        variant,
        big_m: m,
        p,
        x: cols.x,
        aux: cols.aux,
        theta,
        z,
        s,
        y,
        costs: (0..p).map(|i| inst.costs.row_f64(i)).collect(),
        cut_tags: Vec::new(),
    };

    for (j, w) in inst.weights.as_f64().iter().enumerate() {
        for (col, a) in built.theta_expr(j).terms {
            built.model.objective[col] += w * a;
        }
    }
    if inst.costs.is_integral() {
        built.model.objective_step = Some(to_f64(&inst.weights.integer_step()));
    }

    match variant.family {
        Family::Z | Family::ZY | Family::GS => add_z_rows(&mut built, mf),
        Family::S => add_s_rows(&mut built, mf),
    }
    Ok(built)
}

fn tag_for(family: Family, z_tag: &'static str) -> &'static str {
    if family == Family::Z {
        return z_tag;
    }
    match z_tag {
        "owab" => "owa2b",
        "owab_le" => "owa2b_le",
        "owac" => "owa2c",
        "owad0" => "owa2d0",
        "owad" => "owa2d",
        "owad_prime" => "owa2d_prime",
        "owae" => "owa2e",
        other => other,
    }
}

fn add_z_rows(b: &mut BuiltModel, m: f64) {
    let p = b.p;
    let v = b.variant;
    let tags = v.constraint_tags();
    let has = |t: &'static str| tags.contains(&tag_for(v.family, t)) || tags.contains(&t);
    let reduced = v.reduced_first_column;
    let z = b.z.clone().expect("z block");

    if b.y.is_some() {
        for j in 0..p {
            let mut e = LinExpr::var(b.theta[j]);
            e.add(&b.theta_expr(j), -1.0);
            add_expr_row(&mut b.model, e, Sense::Eq, 0.0, "theta_link");
        }
    }
    if has("owab") || has("owab_le") {
        let (sense, tag) = if has("owab") { (Sense::Eq, "owab") } else { (Sense::Le, "owab_le") };
        for j in 0..p {
            if reduced && j == 0 {
                continue;
            }
            let terms = (0..p).map(|i| (z[i][j].expect("kept column"), 1.0)).collect();
            b.model.add_row(terms, sense, 1.0, tag_for(v.family, tag));
        }
    }
    if has("owac") {
        for row in &z {
            let terms: Vec<_> = row.iter().flatten().map(|&c| (c, 1.0)).collect();
            let sense = if reduced { Sense::Le } else { Sense::Eq };
            b.model.add_row(terms, sense, 1.0, tag_for(v.family, "owac"));
        }
    }
    let linking = ["owad0", "owad", "owad_prime"].into_iter().find(|t| has(t));
    if let Some(kind) = linking {
        for i in 0..p {
            for j in 0..p {
                let mut e = b.cost_expr(i);
                e.add(&b.theta_expr(j), -1.0);
                let mut rhs = 0.0;
                if !(reduced && j == 0) {
                    match kind {
                        "owad0" => {
                            e.add(&b.z_expr(i, j), m);
                            rhs = m;
                        }
                        "owad" => {
                            for k in j..p {
                                e.add(&b.z_expr(i, k), m);
                            }
                            rhs = m;
                        }
                        _ => {
                            for k in 0..j {
                                e.add(&b.z_expr(i, k), -m);
                            }
                        }
                    }
                }
                add_expr_row(&mut b.model, e, Sense::Le, rhs, tag_for(v.family, kind));
            }
        }
    }
    if has("owae") {
        add_ordering_rows(b, tag_for(v.family, "owae"));
    }
    if has("owa2g") {
        let y = b.y.clone().expect("y block");
        for i in 0..p {
            for j in 0..p {
                let e = LinExpr::var(y[i][j]).plus(&b.z_expr(i, j), -m);
                add_expr_row(&mut b.model, e, Sense::Le, 0.0, "owa2g");
            }
        }
    }
    if has("owa2h") {
        let y = b.y.clone().expect("y block");
        for i in 0..p {
            let mut e = LinExpr { terms: (0..p).map(|j| (y[i][j], 1.0)).collect(), constant: 0.0 };
            e.add(&b.cost_expr(i), -1.0);
            add_expr_row(&mut b.model, e, Sense::Eq, 0.0, "owa2h");
        }
    }
}

fn add_ordering_rows(b: &mut BuiltModel, tag: &str) {
    for j in 0..b.p.saturating_sub(1) {
        let e = b.theta_expr(j).plus(&b.theta_expr(j + 1), -1.0);
        add_expr_row(&mut b.model, e, Sense::Ge, 0.0, tag);
    }
}

fn add_s_rows(b: &mut BuiltModel, m: f64) {
    let p = b.p;
    let tags = b.variant.constraint_tags();
    let reduced = b.variant.reduced_first_column;
    let s = b.s.clone().expect("s block");
    let has = |t: &str| tags.contains(&t);

    if has("owa3b") || has("owa3b_le") {
        let (sense, tag) = if has("owa3b") { (Sense::Eq, "owa3b") } else { (Sense::Le, "owa3b_le") };
        for j in 0..p {
            if reduced && j == 0 {
                continue;
            }
            let terms = (0..p).map(|i| (s[i][j].expect("kept column"), 1.0)).collect();
            b.model.add_row(terms, sense, j as f64, tag);
        }
    }
    if has("owa3c") {
        for i in 0..p {
            for j in 0..p.saturating_sub(1) {
                if reduced && j == 0 {
                    continue;
                }
                let e = b.s_expr(i, j + 1).plus(&b.s_expr(i, j), -1.0);
                add_expr_row(&mut b.model, e, Sense::Ge, 0.0, "owa3c");
            }
        }
    }
    for i in 0..p {
        for j in 0..p {
            let mut e = b.cost_expr(i);
            e.add(&b.theta_expr(j), -1.0);
            e.add(&b.s_expr(i, j), -m);
            add_expr_row(&mut b.model, e, Sense::Le, 0.0, "owa3d");
        }
    }
    if has("owa3e") {
        add_ordering_rows(b, "owa3e");
    }
}

/// The assignment induced by sorting `x`'s outcomes: `theta` holds the
/// sorted values, `z` (or `s`) the canonical sorting permutation and
/// `y_ij = C^i x` on the occupied positions.
pub fn canonical_lift(built: &BuiltModel, inst: &OwaInstance, x: &[u8]) -> Result<Vec<f64>> {
    if x.len() != inst.n() {
        return Err(OwaError::DimensionMismatch { expected: inst.n(), found: x.len() });
    }
    let aux = inst.domain.aux_completion(x).ok_or(OwaError::NotInDomain)?;
    let outcome = inst.costs.outcome(x)?;
    let (sorted, perm) = sort_outcomes(&outcome);
    let mut v = built.model.lower_bounds();
    for (k, &col) in built.x.iter().enumerate() {
        v[col] = x[k] as f64;
    }
    for (k, &col) in built.aux.iter().enumerate() {
        v[col] = aux[k];
    }
    for (j, &col) in built.theta.iter().enumerate() {
        v[col] = to_f64(&sorted.y[j]);
    }
    let zm = z_of_permutation(&perm);
    let sm = s_of_permutation(&perm);
    let p = built.p;
    for i in 0..p {
        for j in 0..p {
            if let Some(Some(col)) = built.z.as_ref().map(|z| z[i][j]) {
                v[col] = zm.z[i][j] as f64;
            }
            if let Some(Some(col)) = built.s.as_ref().map(|s| s[i][j]) {
                v[col] = sm.s[i][j] as f64;
            }
            if let Some(col) = built.y_col(i, j) {
                v[col] = if zm.z[i][j] == 1 { to_f64(&outcome.y[i]) } else { 0.0 };
            }
        }
    }
    Ok(v)
}

/// Per-family satisfaction report for a full assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub by_tag: BTreeMap<String, bool>,
    pub bounds_ok: bool,
    pub integral: bool,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        self.bounds_ok && self.integral && self.by_tag.values().all(|&ok| ok)
    }

    pub fn violated_tags(&self) -> Vec<&str> {
        self.by_tag.iter().filter(|(_, &ok)| !ok).map(|(t, _)| t.as_str()).collect()
    }
}

pub const MEMBERSHIP_TOL: f64 = 1e-7;

pub fn domain_membership(built: &BuiltModel, point: &[f64]) -> Result<Membership> {
    let model = &built.model;
    if point.len() != model.num_vars() {
        return Err(OwaError::DimensionMismatch { expected: model.num_vars(), found: point.len() });
    }
    let tol = MEMBERSHIP_TOL;
    let mut by_tag: BTreeMap<String, bool> = BTreeMap::new();
    for row in &model.rows {
        let ok = row.is_satisfied(point, tol * (1.0 + row.rhs.abs()));
        by_tag.entry(row.tag.clone()).and_modify(|v| *v &= ok).or_insert(ok);
    }
    let bounds_ok = model.variables.iter().zip(point).all(|(v, &x)| x >= v.lower - tol && x <= v.upper + tol);
    let integral =
        model.variables.iter().zip(point).all(|(v, &x)| v.kind == VarKind::Continuous || (x - x.round()).abs() <= tol);
    Ok(Membership { by_tag, bounds_ok, integral })
}

/// A point inside the domain of `inside` but outside that of `outside`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub inside: FormulationVariant,
    pub outside: FormulationVariant,
    pub point: Vec<f64>,
}

/// Points certifying the strict chain `base < R1 < R2 < R3` for the Z or S
/// family, derived from the canonical lift of `x`. All four variants share
/// one column layout, so each point can be tested against every model.
///
/// The `R1 < R2` witness moves the top objective into the second position as
/// well, leaving the second objective unplaced; for `S` this needs `p >= 3`.
pub fn nesting_witnesses(inst: &OwaInstance, family: Family, x: &[u8]) -> Result<Vec<Witness>> {
    let flavors = [Flavor::Base, Flavor::R1, Flavor::R2, Flavor::R3];
    if !matches!(family, Family::Z | Family::S) {
        return Err(OwaError::InvalidArgument("nesting witnesses exist for the Z and S families".into()));
    }
    let p = inst.p();
    if p < 2 {
        return Err(OwaError::InvalidArgument("nesting witnesses need p >= 2".into()));
    }
    let models: Vec<BuiltModel> =
        flavors.iter().map(|&f| build(FormulationVariant::new(family, f), inst, None)).collect::<Result<_>>()?;
    let lift = canonical_lift(&models[0], inst, x)?;
    let m = models[0].big_m_f64();
    let values: Vec<f64> = (0..p).map(|i| models[0].cost_expr(i).value(&lift)).collect();
    let theta = &models[0].theta;
    let mut out = Vec::new();

    // Base < R1: break the ordering by lifting the last position.
    let mut w1 = lift.clone();
    w1[theta[p - 1]] = w1[theta[0]] + 1.0;
    out.push(Witness { inside: models[1].variant, outside: models[0].variant, point: w1 });

    let (sorted, perm) = sort_outcomes(&inst.costs.outcome(x)?);
    let sigma = perm.sigma();
    let max_value = to_f64(&sorted.y[0]);
    match family {
        Family::Z => {
            let z = models[0].z.clone().expect("z block");
            let mut w2 = lift.clone();
            w2[z[sigma[0]][1].unwrap()] = 1.0;
            w2[z[sigma[1]][1].unwrap()] = 0.0;
            for j in 0..p {
                let tight = (0..p)
                    .map(|i| {
                        let r: f64 = (j..p).map(|k| w2[z[i][k].unwrap()]).sum();
                        values[i] + m * (r - 1.0)
                    })
                    .fold(0.0, f64::max);
                w2[theta[j]] = tight;
            }
            out.push(Witness { inside: models[2].variant, outside: models[1].variant, point: w2 });

            let mut w3 = lift.clone();
            for col in z.iter().flatten().flatten() {
                w3[*col] = 0.0;
            }
            for &col in theta {
                w3[col] = max_value;
            }
            out.push(Witness { inside: models[3].variant, outside: models[2].variant, point: w3 });
        }
        _ => {
            let s = models[0].s.clone().expect("s block");
            if p >= 3 {
                let mut w2 = lift.clone();
                w2[s[sigma[0]][1].unwrap()] = 0.0;
                w2[s[sigma[1]][1].unwrap()] = 1.0;
                w2[s[sigma[1]][2].unwrap()] = 0.0;
                w2[s[sigma[2]][2].unwrap()] = 1.0;
                for j in 0..p {
                    let tight = (0..p).filter(|&i| w2[s[i][j].unwrap()] < 0.5).map(|i| values[i]).fold(0.0, f64::max);
                    w2[theta[j]] = tight;
                }
                out.push(Witness { inside: models[2].variant, outside: models[1].variant, point: w2 });
            }
            let mut w3 = lift.clone();
            for col in s.iter().flatten().flatten() {
                w3[*col] = 0.0;
            }
            for &col in theta {
                w3[col] = max_value;
            }
            out.push(Witness { inside: models[3].variant, outside: models[2].variant, point: w3 });
        }
    }
    Ok(out)
}

/// Converts an `f64` objective to the nearest multiple of `1/denominator`.
pub fn snap_to_rational(v: f64, denominator: i128) -> Option<Rational> {
    let scaled = (v * denominator as f64).round();
    scaled.to_i128().map(|n| Rational::new(n, denominator))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::explicit_cardinality_domain;
    use crate::owa::WeightVector;

    fn example1() -> OwaInstance {
        OwaInstance::new(
            explicit_cardinality_domain(3, 2).unwrap(),
            CostMatrix::from_integers(&[vec![1, 4, 1], vec![1, 1, 3], vec![5, 1, 2]]).unwrap(),
            WeightVector::from_integers(&[1, 2, 4]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn catalog_names_round_trip() {
        let cat = FormulationVariant::catalog();
        assert_eq!(cat.len(), 16);
        for v in &cat {
            assert_eq!(FormulationVariant::parse(&v.name()).unwrap(), *v);
        }
        assert_eq!(FormulationVariant::parse("fzy").unwrap(), FormulationVariant::new(Family::ZY, Flavor::Base));
        assert_eq!(FormulationVariant::parse("FgsPrime").unwrap().flavor, Flavor::GsPrime);
        assert!(FormulationVariant::parse("Fz-reduced").unwrap().reduced_first_column);
        assert!(FormulationVariant::parse("FzR2-reduced").is_err());
        assert!(FormulationVariant::parse("Fq").is_err());
        assert!(FormulationVariant::new(Family::S, Flavor::Base0).validate().is_err());
    }

    #[test]
    fn big_m_examples() {
        let inst = example1();
        assert_eq!(big_m_default(&inst.domain, &inst.costs).unwrap(), rat(8));
        let zero = CostMatrix::from_integers(&[vec![0, 0, 0]]).unwrap();
        assert_eq!(big_m_default(&inst.domain, &zero).unwrap(), rat(1));
        assert!(matches!(
            build(FormulationVariant::new(Family::Z, Flavor::Base), &inst, Some(rat(7))),
            Err(OwaError::BigMTooSmall { .. })
        ));
    }

    #[test]
    fn lifts_of_example_one() {
        let inst = example1();
        let b = build(FormulationVariant::new(Family::Z, Flavor::Base), &inst, None).unwrap();
        let v = canonical_lift(&b, &inst, &[1, 0, 1]).unwrap();
        assert_eq!(b.theta_values(&v), vec![7.0, 4.0, 2.0]);
        let z = b.z.as_ref().unwrap();
        assert_eq!(v[z[2][0].unwrap()], 1.0);
        let v = canonical_lift(&b, &inst, &[1, 1, 0]).unwrap();
        assert_eq!(b.theta_values(&v), vec![6.0, 5.0, 2.0]);
        assert_eq!(canonical_lift(&b, &inst, &[1, 1, 1]), Err(OwaError::NotInDomain));
    }

    #[test]
    fn single_objective_lift() {
        let inst = OwaInstance::new(
            explicit_cardinality_domain(2, 1).unwrap(),
            CostMatrix::from_integers(&[vec![3, 5]]).unwrap(),
            WeightVector::from_integers(&[1]).unwrap(),
        )
        .unwrap();
        let b = build(FormulationVariant::new(Family::Z, Flavor::Base), &inst, None).unwrap();
        let v = canonical_lift(&b, &inst, &[0, 1]).unwrap();
        assert_eq!(b.theta_values(&v), vec![5.0]);
        assert_eq!(v[b.z.as_ref().unwrap()[0][0].unwrap()], 1.0);
    }

    #[test]
    fn expressions_agree_between_encodings() {
        let inst = example1();
        for variant in FormulationVariant::catalog() {
            let b = build(variant, &inst, None).unwrap();
            let v = canonical_lift(&b, &inst, &[0, 1, 1]).unwrap();
            // x = (0,1,1): y = (5,4,3), identity permutation.
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(b.z_expr(i, j).value(&v), f64::from(u8::from(i == j)), "{variant} z {i} {j}");
                    assert_eq!(b.s_expr(i, j).value(&v), f64::from(u8::from(i < j)), "{variant} s {i} {j}");
                }
            }
        }
    }

    #[test]
    fn signed_weights_need_the_extension() {
        let mut inst = example1();
        inst.weights = WeightVector::signed(vec![rat(1), rat(-1), rat(2)]);
        assert_eq!(
            build(FormulationVariant::new(Family::Z, Flavor::Base), &inst, None).unwrap_err(),
            OwaError::SignedWeights
        );
    }
}
