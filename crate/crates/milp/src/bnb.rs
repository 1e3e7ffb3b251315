//! Best-bound branch-and-bound over binary columns.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::model::Model;
use crate::simplex::{solve_lp_with_bounds, LpStatus, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub time_limit: Option<f64>,
    pub node_limit: Option<usize>,
    pub tolerances: Tolerances,
    /// A binary value within this distance of 0 or 1 counts as integral.
    pub integrality: f64,
    /// Nodes whose bound is within this absolute distance of the incumbent
    /// are pruned.
    pub abs_gap: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { time_limit: None, node_limit: None, tolerances: Tolerances::default(), integrality: 1e-6, abs_gap: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    TimeLimit,
    NodeLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::TimeLimit => "time-limit",
            SolveStatus::NodeLimit => "node-limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: Option<Vec<f64>>,
    /// Proven lower bound on the optimum.
    pub best_bound: f64,
    /// Number of LP relaxations solved, root included.
    pub node_count: usize,
    pub root_lp_value: Option<f64>,
    /// `100 (incumbent - root) / incumbent`; `None` without a positive incumbent.
    pub gap_lr: Option<f64>,
    /// Remaining relative gap in percent at termination.
    pub gap: Option<f64>,
    pub wall_seconds: f64,
}

/// What happened at one node. Bound vectors are the node's column box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOutcome {
    Infeasible,
    /// Pruned because the LP bound cannot beat the incumbent.
    Pruned,
    Incumbent,
    Branched {
        column: usize,
    },
}

#[derive(Debug)]
pub struct NodeEvent<'a> {
    pub node: usize,
    pub depth: usize,
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    pub lp_bound: Option<f64>,
    pub incumbent: Option<f64>,
    /// Smallest bound over open nodes (including this one) before it was resolved.
    pub global_bound: f64,
    pub outcome: NodeOutcome,
}

struct Node {
    bound: f64,
    depth: usize,
    seq: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap pops the maximum: smallest bound, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(self.depth.cmp(&other.depth)).then(other.seq.cmp(&self.seq))
    }
}

pub fn branch_and_bound(model: &Model, opts: &SolveOptions) -> SolveReport {
    branch_and_bound_observed(model, opts, |_| {})
}

/// Branch-and-bound with a callback invoked once per solved node.
pub fn branch_and_bound_observed<F>(model: &Model, opts: &SolveOptions, mut observe: F) -> SolveReport
where
    F: FnMut(&NodeEvent<'_>),
{
    let start = Instant::now();
    let binaries: Vec<usize> = model.binary_columns().collect();
    let step = model.objective_step.filter(|s| *s > 0.0);
    let round_bound = |b: f64| match step {
        Some(s) => (b / s - 1e-6).ceil() * s,
        None => b,
    };

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        depth: 0,
        seq: 0,
        lower: model.lower_bounds(),
        upper: model.upper_bounds(),
    });
    let mut seq = 1usize;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut root_lp_value = None;
    let mut node_count = 0usize;
    let mut limit_status = None;
    let mut unbounded = false;

    let prunable = |bound: f64, inc: &Option<(f64, Vec<f64>)>| match inc {
        Some((v, _)) => bound >= v - opts.abs_gap,
        None => false,
    };

    while let Some(node) = heap.pop() {
        if prunable(node.bound, &incumbent) {
            // Best-bound order: everything left is at least as bad.
            heap.clear();
            break;
        }
        if let Some(limit) = opts.node_limit {
            if node_count >= limit {
                heap.push(node);
                limit_status = Some(SolveStatus::NodeLimit);
                break;
            }
        }
        if let Some(limit) = opts.time_limit {
            if start.elapsed().as_secs_f64() >= limit {
                heap.push(node);
                limit_status = Some(SolveStatus::TimeLimit);
                break;
            }
        }
        let global_bound = node.bound;
        node_count += 1;
        let lp = solve_lp_with_bounds(model, &node.lower, &node.upper, &opts.tolerances);
        let event = |lp_bound, outcome, inc: &Option<(f64, Vec<f64>)>| NodeEvent {
            node: node_count,
            depth: node.depth,
            lower: &node.lower,
            upper: &node.upper,
            lp_bound,
            incumbent: inc.as_ref().map(|(v, _)| *v),
            global_bound,
            outcome,
        };
        match lp.status {
            LpStatus::Optimal => {}
            LpStatus::Unbounded => {
                unbounded = true;
                break;
            }
            // An LP that stalls is treated as unresolved: the node is
            // dropped and the final status cannot claim optimality.
            LpStatus::IterationLimit => {
                limit_status.get_or_insert(SolveStatus::NodeLimit);
                observe(&event(None, NodeOutcome::Infeasible, &incumbent));
                continue;
            }
            LpStatus::Infeasible => {
                observe(&event(None, NodeOutcome::Infeasible, &incumbent));
                continue;
            }
        }
        if node.depth == 0 {
            root_lp_value = Some(lp.objective);
        }
        let bound = round_bound(lp.objective).max(node.bound);
        if prunable(bound, &incumbent) {
            observe(&event(Some(bound), NodeOutcome::Pruned, &incumbent));
            continue;
        }

        let mut branch: Option<(usize, f64)> = None;
        for &j in &binaries {
            let v = lp.values[j];
            let frac = (v - v.floor()).min(v.ceil() - v);
            if frac > opts.integrality && branch.map_or(true, |(_, f)| frac > f + 1e-12) {
                branch = Some((j, frac));
            }
        }

        match branch {
            None => {
                let (value, values) = polish(model, &lp.values, &binaries, &node, opts);
                if incumbent.as_ref().map_or(true, |(v, _)| value < *v) {
                    incumbent = Some((value, values));
                }
                observe(&event(Some(bound), NodeOutcome::Incumbent, &incumbent));
            }
            Some((j, _)) => {
                observe(&event(Some(bound), NodeOutcome::Branched { column: j }, &incumbent));
                let v = lp.values[j];
                let mut down_upper = node.upper.clone();
                down_upper[j] = v.floor();
                let mut up_lower = node.lower.clone();
                up_lower[j] = v.ceil();
                heap.push(Node { bound, depth: node.depth + 1, seq, lower: node.lower.clone(), upper: down_upper });
                heap.push(Node { bound, depth: node.depth + 1, seq: seq + 1, lower: up_lower, upper: node.upper });
                seq += 2;
            }
        }
    }

    let wall_seconds = start.elapsed().as_secs_f64();
    let open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let status = if unbounded {
        SolveStatus::Unbounded
    } else if let Some(s) = limit_status {
        s
    } else if incumbent.is_some() {
        SolveStatus::Optimal
    } else {
        SolveStatus::Infeasible
    };
    let objective = incumbent.as_ref().map(|(v, _)| *v);
    let best_bound = match (status, objective) {
        (SolveStatus::Optimal, Some(v)) => v,
        (SolveStatus::Infeasible, _) => f64::INFINITY,
        (SolveStatus::Unbounded, _) => f64::NEG_INFINITY,
        (_, Some(v)) => open_bound.min(v),
        (_, None) => open_bound,
    };
    let gap_lr = match (objective, root_lp_value) {
        (Some(v), Some(r)) if v > 1e-12 => Some(100.0 * (v - r) / v),
        _ => None,
    };
    let gap = objective.map(|v| {
        if (v - best_bound).abs() <= opts.abs_gap {
            0.0
        } else if v.abs() > 1e-12 {
            100.0 * (v - best_bound) / v.abs()
        } else {
            f64::INFINITY
        }
    });
    SolveReport {
        status,
        objective,
        values: incumbent.map(|(_, x)| x),
        best_bound,
        node_count,
        root_lp_value,
        gap_lr,
        gap,
        wall_seconds,
    }
}

/// Rounds the binaries of an integral LP point and re-solves for the
/// continuous columns, so the stored incumbent has exact 0/1 entries.
fn polish(model: &Model, lp_values: &[f64], binaries: &[usize], node: &Node, opts: &SolveOptions) -> (f64, Vec<f64>) {
    let mut lower = node.lower.clone();
    let mut upper = node.upper.clone();
    for &j in binaries {
        let r = lp_values[j].round();
        lower[j] = r;
        upper[j] = r;
    }
    let lp = solve_lp_with_bounds(model, &lower, &upper, &opts.tolerances);
    if lp.status == LpStatus::Optimal {
        let mut values = lp.values;
        for &j in binaries {
            values[j] = lower[j];
        }
        (model.objective_value(&values), values)
    } else {
        (model.objective_value(lp_values), lp_values.to_vec())
    }
}
