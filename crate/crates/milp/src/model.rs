use std::fmt;

/// Column type. Binary columns are branched on; continuous ones are not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }

    /// Whether `lhs (sense) rhs` holds with absolute slack `tol`.
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Sense::Le => lhs <= rhs + tol,
            Sense::Eq => (lhs - rhs).abs() <= tol,
            Sense::Ge => lhs >= rhs - tol,
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// A linear row `sum coeffs (sense) rhs`. The tag names the constraint
/// family the row belongs to; it survives export as part of the row name.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub tag: String,
}

impl Row {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * values[j]).sum()
    }

    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        self.sense.holds(self.activity(values), self.rhs, tol)
    }
}

/// A minimization model over bounded columns.
///
/// Every column must have a finite lower bound; upper bounds may be
/// `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub name: String,
    pub variables: Vec<Variable>,
    pub rows: Vec<Row>,
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    /// When every integer-feasible objective value is a multiple of this
    /// step, node bounds are rounded up to the next multiple before pruning.
    pub objective_step: Option<f64>,
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            variables: Vec::new(),
            rows: Vec::new(),
            objective: Vec::new(),
            objective_offset: 0.0,
            objective_step: None,
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> usize {
        assert!(lower.is_finite(), "column lower bounds must be finite");
        assert!(lower <= upper, "empty column domain");
        self.variables.push(Variable { name: name.into(), kind, lower, upper });
        self.objective.push(0.0);
        self.variables.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    /// Appends a row, merging duplicate column entries and dropping zeros.
    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64, tag: impl Into<String>) -> usize {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        let mut sorted = coeffs;
        sorted.sort_by_key(|&(j, _)| j);
        for (j, a) in sorted {
            assert!(j < self.variables.len(), "row references unknown column {j}");
            match merged.last_mut() {
                Some((k, acc)) if *k == j => *acc += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.rows.push(Row { coeffs: merged, sense, rhs, tag: tag.into() });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn binary_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.variables.iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(j, _)| j)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_offset + self.objective.iter().zip(values).map(|(c, x)| c * x).sum::<f64>()
    }

    pub fn lower_bounds(&self) -> Vec<f64> {
        self.variables.iter().map(|v| v.lower).collect()
    }

    pub fn upper_bounds(&self) -> Vec<f64> {
        self.variables.iter().map(|v| v.upper).collect()
    }

    /// Indices of rows violated by `values` beyond `tol`.
    pub fn violated_rows(&self, values: &[f64], tol: f64) -> Vec<usize> {
        self.rows.iter().enumerate().filter(|(_, r)| !r.is_satisfied(values, tol)).map(|(i, _)| i).collect()
    }

    /// Full feasibility check: rows, bounds and integrality.
    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.num_vars()
            && self.variables.iter().zip(values).all(|(v, &x)| {
                x >= v.lower - tol
                    && x <= v.upper + tol
                    && (v.kind == VarKind::Continuous || (x - x.round()).abs() <= tol)
            })
            && self.violated_rows(values, tol).is_empty()
    }
}
