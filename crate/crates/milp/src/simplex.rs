//! Dense two-phase primal simplex over bounded columns.
//!
//! Each row gets a slack (`+s` for `<=`/`=`, `-s` for `>=`, with `s` fixed
//! to zero on equalities). Rows whose slack cannot start feasible get an
//! artificial column, which phase 1 drives to zero. Nonbasic columns sit at
//! one of their bounds; an entering column may flip bounds without a pivot.

use crate::model::{Model, Sense};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Primal feasibility slack on rows and bounds.
    pub feas: f64,
    /// Reduced-cost threshold for optimality.
    pub opt: f64,
    /// Smallest tableau entry accepted as a pivot.
    pub pivot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { feas: 1e-7, opt: 1e-7, pivot: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural column values; meaningful when `status` is `Optimal`.
    pub values: Vec<f64>,
    /// Includes the model's objective offset.
    pub objective: f64,
    pub iterations: usize,
}

/// Solves the continuous relaxation of `model` under its own bounds.
pub fn solve_lp(model: &Model) -> LpSolution {
    solve_lp_with_bounds(model, &model.lower_bounds(), &model.upper_bounds(), &Tolerances::default())
}

/// Solves the continuous relaxation with the given column bounds replacing
/// the model's.
pub fn solve_lp_with_bounds(model: &Model, lower: &[f64], upper: &[f64], tol: &Tolerances) -> LpSolution {
    let n = model.num_vars();
    assert_eq!(lower.len(), n);
    assert_eq!(upper.len(), n);
    if lower.iter().zip(upper).any(|(l, u)| l > &(u + tol.feas)) {
        return LpSolution { status: LpStatus::Infeasible, values: vec![0.0; n], objective: f64::NAN, iterations: 0 };
    }
    let mut t = Tableau::new(model, lower, upper, tol);
    let status = t.run();
    let values = t.x[..n].to_vec();
    let objective = model.objective_value(&values);
    LpSolution { status, values, objective, iterations: t.iterations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pos {
    Basic,
    Lower,
    Upper,
}

struct Tableau {
    m: usize,
    ncols: usize,
    first_art: usize,
    /// Row-major `m x ncols` matrix `B^-1 [A | S | R]`.
    t: Vec<f64>,
    /// `B^-1 b`.
    beta: Vec<f64>,
    basis: Vec<usize>,
    pos: Vec<Pos>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    tol: Tolerances,
    iterations: usize,
    max_iterations: usize,
    model_cost: Vec<f64>,
}

impl Tableau {
    fn new(model: &Model, lower: &[f64], upper: &[f64], tol: &Tolerances) -> Self {
        let n = model.num_vars();
        let m = model.num_rows();

        let mut lo: Vec<f64> = lower.to_vec();
        let mut hi: Vec<f64> = upper.iter().zip(lower).map(|(&u, &l)| u.max(l)).collect();
        let mut x: Vec<f64> = lo.clone();
        for r in &model.rows {
            lo.push(0.0);
            hi.push(if r.sense == Sense::Eq { 0.0 } else { f64::INFINITY });
            x.push(0.0);
        }

        // Decide per row whether the slack can start basic.
        let mut art_rows = Vec::new();
        let mut row_sign = vec![1.0; m];
        let mut basis = vec![0; m];
        for (i, r) in model.rows.iter().enumerate() {
            let resid = r.rhs - r.activity(&x[..n]);
            let sgn = if r.sense == Sense::Ge { -1.0 } else { 1.0 };
            let s = resid * sgn;
            let ok = match r.sense {
                Sense::Eq => resid.abs() <= tol.feas,
                _ => s >= -tol.feas,
            };
            if ok {
                basis[i] = n + i;
                row_sign[i] = sgn;
                x[n + i] = s.max(0.0);
            } else {
                let a = if resid >= 0.0 { 1.0 } else { -1.0 };
                row_sign[i] = a;
                art_rows.push(i);
            }
        }
        let first_art = n + m;
        let ncols = first_art + art_rows.len();
        let mut t = vec![0.0; m * ncols];
        let mut beta = vec![0.0; m];
        for (i, r) in model.rows.iter().enumerate() {
            let row = &mut t[i * ncols..(i + 1) * ncols];
            let sgn = row_sign[i];
            for &(j, a) in &r.coeffs {
                row[j] = a / sgn;
            }
            let slack_coef = if r.sense == Sense::Ge { -1.0 } else { 1.0 };
            row[n + i] = slack_coef / sgn;
            beta[i] = r.rhs / sgn;
        }
        for (k, &i) in art_rows.iter().enumerate() {
            let c = first_art + k;
            // Artificial coefficient equals row_sign, so the normalized entry is 1.
            t[i * ncols + c] = 1.0;
            basis[i] = c;
            lo.push(0.0);
            hi.push(f64::INFINITY);
            x.push(0.0);
        }
        let mut pos = vec![Pos::Lower; ncols];
        for &b in &basis {
            pos[b] = Pos::Basic;
        }
        let mut model_cost = model.objective.clone();
        model_cost.resize(ncols, 0.0);

        let mut tab = Self {
            m,
            ncols,
            first_art,
            t,
            beta,
            basis,
            pos,
            lo,
            hi,
            x,
            cost: vec![0.0; ncols],
            d: vec![0.0; ncols],
            tol: *tol,
            iterations: 0,
            max_iterations: 20_000 + 50 * (m + ncols),
            model_cost,
        };
        tab.recompute_basic_values();
        tab
    }

    fn run(&mut self) -> LpStatus {
        if self.ncols > self.first_art {
            let mut c = vec![0.0; self.ncols];
            for v in c.iter_mut().skip(self.first_art) {
                *v = 1.0;
            }
            self.cost = c;
            match self.iterate() {
                LpStatus::Optimal => {}
                LpStatus::Unbounded => unreachable!("phase 1 is bounded below"),
                other => return other,
            }
            self.recompute_basic_values();
            let infeas: f64 = (self.first_art..self.ncols).map(|j| self.x[j]).sum();
            let scale = 1.0 + self.beta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            if infeas > self.tol.feas * scale {
                return LpStatus::Infeasible;
            }
            for j in self.first_art..self.ncols {
                self.hi[j] = 0.0;
                if self.pos[j] != Pos::Basic {
                    self.pos[j] = Pos::Lower;
                    self.x[j] = 0.0;
                }
            }
            self.drive_out_artificials();
        }
        self.cost = self.model_cost.clone();
        let status = self.iterate();
        if status == LpStatus::Optimal {
            self.recompute_basic_values();
        }
        status
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.ncols..(i + 1) * self.ncols]
    }

    fn recompute_basic_values(&mut self) {
        for i in 0..self.m {
            let row = self.row(i);
            let mut v = self.beta[i];
            for j in 0..self.ncols {
                if self.pos[j] != Pos::Basic && self.x[j] != 0.0 {
                    v -= row[j] * self.x[j];
                }
            }
            let b = self.basis[i];
            self.x[b] = v;
        }
    }

    fn recompute_reduced_costs(&mut self) {
        let mut d = self.cost.clone();
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = self.row(i);
                for j in 0..self.ncols {
                    d[j] -= cb * row[j];
                }
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        self.d = d;
    }

    /// Chooses an entering column and its direction (+1 up, -1 down).
    fn price(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_val = 0.0;
        for j in 0..self.ncols {
            if self.hi[j] <= self.lo[j] {
                continue;
            }
            let dj = self.d[j];
            let dir = match self.pos[j] {
                Pos::Basic => continue,
                Pos::Lower if dj < -self.tol.opt => 1.0,
                Pos::Upper if dj > self.tol.opt => -1.0,
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if dj.abs() > best_val {
                best_val = dj.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    fn iterate(&mut self) -> LpStatus {
        self.recompute_reduced_costs();
        let mut degenerate_run = 0usize;
        let mut since_refresh = 0usize;
        loop {
            if self.iterations >= self.max_iterations {
                return LpStatus::IterationLimit;
            }
            let bland = degenerate_run > 50;
            let Some((q, dir)) = self.price(bland) else {
                // Confirm with freshly computed reduced costs before stopping.
                if since_refresh > 0 {
                    self.recompute_basic_values();
                    self.recompute_reduced_costs();
                    since_refresh = 0;
                    if self.price(bland).is_some() {
                        continue;
                    }
                }
                return LpStatus::Optimal;
            };
            self.iterations += 1;
            since_refresh += 1;

            let (leave, step) = self.ratio_test(q, dir, bland);
            let flip = self.hi[q] - self.lo[q];
            if leave.is_none() && !flip.is_finite() {
                return LpStatus::Unbounded;
            }
            let take_flip = match leave {
                None => true,
                Some(_) => flip <= step,
            };
            let t = if take_flip { flip } else { step };
            if t <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            // Move basic values along the edge.
            if t != 0.0 {
                for i in 0..self.m {
                    let a = self.t[i * self.ncols + q];
                    if a != 0.0 {
                        let b = self.basis[i];
                        self.x[b] -= dir * t * a;
                    }
                }
            }
            if take_flip {
                if dir > 0.0 {
                    self.pos[q] = Pos::Upper;
                    self.x[q] = self.hi[q];
                } else {
                    self.pos[q] = Pos::Lower;
                    self.x[q] = self.lo[q];
                }
            } else {
                let r = leave.unwrap();
                let a = dir * self.t[r * self.ncols + q];
                let out = self.basis[r];
                let new_xq = self.x[q] + dir * t;
                if a > 0.0 {
                    self.pos[out] = Pos::Lower;
                    self.x[out] = self.lo[out];
                } else {
                    self.pos[out] = Pos::Upper;
                    self.x[out] = self.hi[out];
                }
                self.pivot(r, q);
                self.x[q] = new_xq;
            }
            if since_refresh >= 100 {
                self.recompute_basic_values();
                self.recompute_reduced_costs();
                since_refresh = 0;
            }
        }
    }

    /// Harris two-pass ratio test. Returns the leaving row (if any bound
    /// blocks) and the step length.
    fn ratio_test(&self, q: usize, dir: f64, bland: bool) -> (Option<usize>, f64) {
        let ptol = self.tol.pivot;
        let ftol = self.tol.feas;
        let mut relaxed = f64::INFINITY;
        for i in 0..self.m {
            let a = dir * self.t[i * self.ncols + q];
            let b = self.basis[i];
            if a > ptol {
                relaxed = relaxed.min((self.x[b] - self.lo[b] + ftol) / a);
            } else if a < -ptol && self.hi[b].is_finite() {
                relaxed = relaxed.min((self.hi[b] - self.x[b] + ftol) / -a);
            }
        }
        if !relaxed.is_finite() {
            return (None, f64::INFINITY);
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for i in 0..self.m {
            let a = dir * self.t[i * self.ncols + q];
            let b = self.basis[i];
            let ratio = if a > ptol {
                (self.x[b] - self.lo[b]) / a
            } else if a < -ptol && self.hi[b].is_finite() {
                (self.hi[b] - self.x[b]) / -a
            } else {
                continue;
            };
            if ratio > relaxed {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, _, ba)) => {
                    if bland {
                        self.basis[i] < self.basis[bi]
                    } else {
                        a.abs() > ba
                    }
                }
            };
            if better {
                best = Some((i, ratio.max(0.0), a.abs()));
            }
        }
        match best {
            Some((r, ratio, _)) => (Some(r), ratio),
            None => (None, f64::INFINITY),
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.ncols;
        let p = self.t[r * nc + q];
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[q] = 1.0;
        }
        self.beta[r] /= p;
        let (before, rest) = self.t.split_at_mut(r * nc);
        let (prow, after) = rest.split_at_mut(nc);
        let br = self.beta[r];
        for (i, row) in before.chunks_exact_mut(nc).chain(after.chunks_exact_mut(nc)).enumerate() {
            let i = if i < r { i } else { i + 1 };
            let f = row[q];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[q] = 0.0;
                self.beta[i] -= f * br;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (v, &pv) in self.d.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
        }
        self.d[q] = 0.0;
        let out = self.basis[r];
        self.basis[r] = q;
        self.pos[q] = Pos::Basic;
        debug_assert_ne!(self.pos[out], Pos::Basic);
    }

    /// Pivots zero-valued basic artificials out where a structural or slack
    /// column can replace them; rows where none can are redundant.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            let b = self.basis[r];
            if b < self.first_art {
                continue;
            }
            let row = self.row(r);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.first_art {
                if self.pos[j] == Pos::Basic {
                    continue;
                }
                let a = row[j].abs();
                if a > 1e-7 && best.map_or(true, |(_, ba)| a > ba) {
                    best = Some((j, a));
                }
            }
            if let Some((q, _)) = best {
                let xq = self.x[q];
                self.pos[b] = Pos::Lower;
                self.x[b] = 0.0;
                self.pivot(r, q);
                self.x[q] = xq;
            }
        }
        self.recompute_basic_values();
    }
}
