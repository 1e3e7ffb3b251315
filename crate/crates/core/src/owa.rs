//! The OWA operator, its ordered-median and vector-assignment reductions,
//! and the two permutation encodings used by the formulations.
//!
//! Objectives and positions are 0-based throughout the API; `pi[i]` is the
//! position of objective `i` and `sigma[j]` the objective at position `j`.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{OwaError, Result};

/// Exact arithmetic for the oracle and validation paths.
pub type Rational = Ratio<i128>;

pub fn rat(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// Parses `3`, `-2/5` or `0.4` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || OwaError::InvalidArgument(format!("not a rational number: {s:?}"));
    if s.contains('/') {
        return Rational::from_str(s).map_err(|_| bad());
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: i128 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().map_err(|_| bad())?,
        };
        let scale = 10i128.pow(frac.len() as u32);
        let frac_part: i128 = frac.parse().map_err(|_| bad())?;
        let magnitude = Rational::new(int_part * scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    s.parse::<i128>().map(rat).map_err(|_| bad())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `p x n` matrix of non-negative rational costs; row `i` is `C^i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CostMatrix {
    p: usize,
    n: usize,
    entries: Vec<Vec<Rational>>,
}

impl CostMatrix {
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self> {
        let p = entries.len();
        if p == 0 {
            return Err(OwaError::InvalidArgument("cost matrix needs at least one row".into()));
        }
        let n = entries[0].len();
        if n == 0 {
            return Err(OwaError::InvalidArgument("cost matrix needs at least one column".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(OwaError::DimensionMismatch { expected: n, found: row.len() });
            }
            if let Some((j, v)) = row.iter().enumerate().find(|(_, v)| v.is_negative()) {
                return Err(OwaError::NegativeCost { row: i, col: j, value: v.to_string() });
            }
        }
        Ok(Self { p, n, entries })
    }

    pub fn from_integers(entries: &[Vec<i64>]) -> Result<Self> {
        Self::new(entries.iter().map(|r| r.iter().map(|&v| rat(v as i128)).collect()).collect())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn row_f64(&self, i: usize) -> Vec<f64> {
        self.entries[i].iter().map(to_f64).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().flatten().all(|v| v.is_integer())
    }

    /// `y = Cx`.
    pub fn outcome(&self, x: &[u8]) -> Result<OutcomeVector> {
        if x.len() != self.n {
            return Err(OwaError::DimensionMismatch { expected: self.n, found: x.len() });
        }
        let y = self
            .entries
            .iter()
            .map(|row| row.iter().zip(x).filter(|(_, &xi)| xi != 0).map(|(c, _)| *c).sum())
            .collect();
        Ok(OutcomeVector { y })
    }
}

/// OWA weights attached to sorted positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightVector {
    pub omega: Vec<Rational>,
    pub signed_allowed: bool,
}

impl WeightVector {
    pub fn new(omega: Vec<Rational>) -> Result<Self> {
        if let Some((j, w)) = omega.iter().enumerate().find(|(_, w)| w.is_negative()) {
            return Err(OwaError::NegativeWeight { position: j, value: w.to_string() });
        }
        Ok(Self { omega, signed_allowed: false })
    }

    /// Weights of either sign. Formulations accept these only together with
    /// the cotazy inequalities.
    pub fn signed(omega: Vec<Rational>) -> Self {
        Self { omega, signed_allowed: true }
    }

    pub fn from_integers(omega: &[i64]) -> Result<Self> {
        Self::new(omega.iter().map(|&w| rat(w as i128)).collect())
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn has_negative(&self) -> bool {
        self.omega.iter().any(|w| w.is_negative())
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.omega.iter().map(to_f64).collect()
    }

    /// Largest `s` such that every weighted sum of integers is a multiple of `s`.
    pub fn integer_step(&self) -> Rational {
        let lcm = self.omega.iter().fold(1i128, |acc, w| acc.lcm(w.denom()));
        Rational::new(1, lcm)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeVector {
    pub y: Vec<Rational>,
}

impl OutcomeVector {
    pub fn new(y: Vec<Rational>) -> Self {
        Self { y }
    }

    pub fn from_integers(y: &[i64]) -> Self {
        Self { y: y.iter().map(|&v| rat(v as i128)).collect() }
    }
}

/// A bijection between objectives and sorted positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    pi: Vec<usize>,
    sigma: Vec<usize>,
}

impl Permutation {
    pub fn from_pi(pi: Vec<usize>) -> Result<Self> {
        let sigma = invert(&pi)?;
        Ok(Self { pi, sigma })
    }

    pub fn from_sigma(sigma: Vec<usize>) -> Result<Self> {
        let pi = invert(&sigma)?;
        Ok(Self { pi, sigma })
    }

    /// Builds from 1-based position numbers, as permutations are usually written.
    pub fn from_pi_one_based(pi: &[usize]) -> Result<Self> {
        if pi.contains(&0) {
            return Err(OwaError::InvalidPermutation("0 in a 1-based permutation".into()));
        }
        Self::from_pi(pi.iter().map(|v| v - 1).collect())
    }

    pub fn identity(p: usize) -> Self {
        Self { pi: (0..p).collect(), sigma: (0..p).collect() }
    }

    /// All `p!` permutations, ordered lexicographically by `pi`.
    pub fn all(p: usize) -> Vec<Permutation> {
        (0..p).permutations(p).map(|pi| Self::from_pi(pi).expect("itertools yields bijections")).collect()
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.sigma.iter().map(|s| s + 1).join(","))
    }
}

fn invert(v: &[usize]) -> Result<Vec<usize>> {
    let mut inv = vec![usize::MAX; v.len()];
    for (i, &t) in v.iter().enumerate() {
        if t >= v.len() || inv[t] != usize::MAX {
            return Err(OwaError::InvalidPermutation(format!("{v:?} is not a bijection on 0..{}", v.len())));
        }
        inv[t] = i;
    }
    Ok(inv)
}

/// Sorts outcomes non-increasingly. Ties keep ascending objective order.
pub fn sort_outcomes(y: &OutcomeVector) -> (OutcomeVector, Permutation) {
    let mut sigma: Vec<usize> = (0..y.y.len()).collect();
    sigma.sort_by(|&a, &b| y.y[b].cmp(&y.y[a]).then(a.cmp(&b)));
    let sorted = sigma.iter().map(|&i| y.y[i]).collect();
    (OutcomeVector { y: sorted }, Permutation::from_sigma(sigma).expect("sort yields a bijection"))
}

/// `omega . sorted(y)`.
pub fn owa_of_outcome(y: &OutcomeVector, omega: &WeightVector) -> Result<Rational> {
    if y.y.len() != omega.len() {
        return Err(OwaError::DimensionMismatch { expected: omega.len(), found: y.y.len() });
    }
    let (sorted, _) = sort_outcomes(y);
    Ok(sorted.y.iter().zip(&omega.omega).map(|(v, w)| v * w).sum())
}

pub fn evaluate_owa(x: &[u8], c: &CostMatrix, omega: &WeightVector) -> Result<Rational> {
    owa_of_outcome(&c.outcome(x)?, omega)
}

/// Ordered median as an OWA: `C = Diag(d)`.
pub fn om_as_owa(d: &[Rational]) -> Result<CostMatrix> {
    let n = d.len();
    CostMatrix::new((0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { Rational::zero() }).collect()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct VaomMatrix {
    pub costs: CostMatrix,
    /// Non-fatal remarks about the input, e.g. fraction rows not summing to 1.
    pub warnings: Vec<String>,
}

/// Position of `x^i_{k,l}` in the flattened vector-assignment layout:
/// customer blocks, each split by facility, each split by level.
pub fn vaom_index(p: usize, q: usize, customer: usize, facility: usize, level: usize) -> usize {
    customer * p * q + facility * q + level
}

/// Vector assignment ordered median as an OWA. Row `i` carries
/// `a_i * gamma_il * d_ik` inside customer `i`'s block and zeros elsewhere.
pub fn vaom_as_owa(d: &[Vec<Rational>], gamma: &[Vec<Rational>], a: &[Rational]) -> Result<VaomMatrix> {
    let p = d.len();
    if p == 0 {
        return Err(OwaError::InvalidArgument("no customers".into()));
    }
    if let Some(row) = d.iter().find(|r| r.len() != p) {
        return Err(OwaError::DimensionMismatch { expected: p, found: row.len() });
    }
    if gamma.len() != p {
        return Err(OwaError::DimensionMismatch { expected: p, found: gamma.len() });
    }
    if a.len() != p {
        return Err(OwaError::DimensionMismatch { expected: p, found: a.len() });
    }
    let q = gamma[0].len();
    if q == 0 || q > p {
        return Err(OwaError::InvalidArgument(format!("need 1 <= q <= p, got q={q}, p={p}")));
    }
    if let Some(row) = gamma.iter().find(|r| r.len() != q) {
        return Err(OwaError::DimensionMismatch { expected: q, found: row.len() });
    }
    let mut warnings = Vec::new();
    for (i, row) in gamma.iter().enumerate() {
        let total: Rational = row.iter().sum();
        if total != Rational::one() {
            warnings.push(format!("fractions of customer {} sum to {total}, not 1", i + 1));
        }
    }
    let n = p * p * q;
    let mut entries = vec![vec![Rational::zero(); n]; p];
    for i in 0..p {
        for k in 0..p {
            for l in 0..q {
                entries[i][vaom_index(p, q, i, k, l)] = a[i] * gamma[i][l] * d[i][k];
            }
        }
    }
    Ok(VaomMatrix { costs: CostMatrix::new(entries)?, warnings })
}

/// `z[i][j] = 1` iff objective `i` occupies position `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PositionMatrixZ {
    pub z: Vec<Vec<u8>>,
}

/// `s[i][j] = 1` iff objective `i` is placed before position `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelativePositionMatrixS {
    pub s: Vec<Vec<u8>>,
}

fn check_square(m: &[Vec<u8>]) -> Result<usize> {
    let p = m.len();
    for row in m {
        if row.len() != p {
            return Err(OwaError::DimensionMismatch { expected: p, found: row.len() });
        }
        if row.iter().any(|&v| v > 1) {
            return Err(OwaError::InvalidMatrix("entries must be 0 or 1".into()));
        }
    }
    Ok(p)
}

impl PositionMatrixZ {
    pub fn new(z: Vec<Vec<u8>>) -> Result<Self> {
        let p = check_square(&z)?;
        for j in 0..p {
            if (0..p).map(|i| z[i][j] as usize).sum::<usize>() != 1 {
                return Err(OwaError::InvalidMatrix(format!("column {} does not sum to 1", j + 1)));
            }
        }
        for (i, row) in z.iter().enumerate() {
            if row.iter().map(|&v| v as usize).sum::<usize>() != 1 {
                return Err(OwaError::InvalidMatrix(format!("row {} does not sum to 1", i + 1)));
            }
        }
        Ok(Self { z })
    }
}

impl RelativePositionMatrixS {
    pub fn new(s: Vec<Vec<u8>>) -> Result<Self> {
        let p = check_square(&s)?;
        for j in 0..p {
            if (0..p).map(|i| s[i][j] as usize).sum::<usize>() != j {
                return Err(OwaError::InvalidMatrix(format!("column {} does not sum to {}", j + 1, j)));
            }
        }
        for (i, row) in s.iter().enumerate() {
            if p > 0 && row[0] != 0 {
                return Err(OwaError::InvalidMatrix(format!("row {} starts with 1", i + 1)));
            }
            if row.windows(2).any(|w| w[1] < w[0]) {
                return Err(OwaError::InvalidMatrix(format!("row {} decreases", i + 1)));
            }
        }
        Ok(Self { s })
    }
}

pub fn z_of_permutation(perm: &Permutation) -> PositionMatrixZ {
    let p = perm.len();
    let z = (0..p).map(|i| (0..p).map(|j| u8::from(perm.pi[i] == j)).collect()).collect();
    PositionMatrixZ { z }
}

pub fn s_of_permutation(perm: &Permutation) -> RelativePositionMatrixS {
    let p = perm.len();
    let s = (0..p).map(|i| (0..p).map(|j| u8::from(perm.pi[i] < j)).collect()).collect();
    RelativePositionMatrixS { s }
}

pub fn permutation_of_z(z: &PositionMatrixZ) -> Permutation {
    let pi = z.z.iter().map(|row| row.iter().position(|&v| v == 1).expect("validated row")).collect();
    Permutation::from_pi(pi).expect("validated matrix")
}

pub fn permutation_of_s(s: &RelativePositionMatrixS) -> Permutation {
    // The number of zeros in row i is one more than its position.
    let pi = s.s.iter().map(|row| row.iter().filter(|&&v| v == 0).count() - 1).collect();
    Permutation::from_pi(pi).expect("validated matrix")
}

/// `s_ij = 1 - sum_{k >= j} z_ik`.
pub fn s_from_z(z: &PositionMatrixZ) -> Result<RelativePositionMatrixS> {
    let z = PositionMatrixZ::new(z.z.clone())?;
    let s = z.z.iter().map(|row| (0..row.len()).map(|j| 1 - row[j..].iter().sum::<u8>()).collect()).collect();
    RelativePositionMatrixS::new(s)
}

/// `z_ij = s_{i,j+1} - s_ij` for `j < p` and `z_ip = 1 - s_ip`.
pub fn z_from_s(s: &RelativePositionMatrixS) -> Result<PositionMatrixZ> {
    let s = RelativePositionMatrixS::new(s.s.clone())?;
    let z =
        s.s.iter()
            .map(|row| {
                let p = row.len();
                (0..p).map(|j| if j + 1 < p { row[j + 1] - row[j] } else { 1 - row[j] }).collect()
            })
            .collect();
    PositionMatrixZ::new(z)
}

/// Hurwicz weights `(alpha, 0, ..., 0, 1 - alpha)`.
pub fn hurwicz_weights(alpha: Rational, p: usize) -> Result<WeightVector> {
    if p < 2 {
        return Err(OwaError::InvalidArgument(format!("Hurwicz weights need p >= 2, got {p}")));
    }
    if alpha.is_negative() || alpha > Rational::one() {
        return Err(OwaError::InvalidArgument(format!("alpha {alpha} outside [0, 1]")));
    }
    let mut omega = vec![Rational::zero(); p];
    omega[0] = alpha;
    omega[p - 1] = Rational::one() - alpha;
    WeightVector::new(omega)
}
