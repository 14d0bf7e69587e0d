//! Best-bound branch-and-bound with descent bounds at every node.
//!
//! * the node with the largest (weakest) upper bound is always processed next;
//! * branching fixes the free variable with the smallest original index;
//! * each child starts its descent from the parent's optimized shift with the
//!   branched coordinate dropped, which stays convexifying because principal
//!   submatrices of a PSD matrix are PSD;
//! * no presolve and no primal heuristics: incumbents come from leaves or from
//!   an injected primal value.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::descent::{descend, DescentParams};
use crate::error::{Error, Result};
use crate::lmi::{LmiSystem, PlanePoint};
use crate::model::{delta_strict, fix_variable, trivial_shift, Assignment, QcrShift, QuboProblem};
use crate::linalg::{max_eig, LanczosOptions};

/// Upper cap applied to reported relative gaps.
pub const GAP_CAP: f64 = 1e6;

/// `100 * (ub - lb) / max(|lb|, 1e-10)`, capped at [`GAP_CAP`].
pub fn relative_gap(ub: f64, lb: f64) -> f64 {
    let g = 100.0 * (ub - lb) / lb.abs().max(1e-10);
    if g.is_nan() {
        GAP_CAP
    } else {
        g.min(GAP_CAP)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnbConfig {
    pub node_params: DescentParams,
    pub root_params: DescentParams,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    /// Open-node count treated as memory exhaustion.
    pub max_open_nodes: usize,
    /// Known primal value used as the initial incumbent.
    pub injected_primal: Option<f64>,
    /// Prune with `bound < floor(incumbent) + 1`; `None` enables it exactly
    /// when all coefficients make the objective integer on binaries.
    pub integer_pruning: Option<bool>,
    /// Project the parent's shift into children; when off every node starts cold.
    pub warmstart: bool,
    pub seed: u64,
    /// Emit a progress record every this many nodes (0 disables).
    pub progress_every: u64,
}

impl Default for BnbConfig {
    fn default() -> Self {
        Self {
            node_params: DescentParams::node(),
            root_params: DescentParams::root(),
            time_limit: Some(Duration::from_secs(3600)),
            node_limit: None,
            max_open_nodes: 10_000_000,
            injected_primal: None,
            integer_pruning: None,
            warmstart: true,
            seed: 0,
            progress_every: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BnbStatus {
    Optimal,
    TimeLimit,
    NodeLimit,
    MemoryAbort,
}

#[derive(Debug, Clone)]
pub struct BnbResult {
    pub status: BnbStatus,
    pub incumbent_value: Option<f64>,
    /// `None` when the injected primal value was never improved on.
    pub incumbent_x: Option<Assignment>,
    pub global_bound: f64,
    pub rel_gap_percent: f64,
    pub nodes: u64,
    pub descent_iterations: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Progress {
    pub nodes: u64,
    pub open: usize,
    pub incumbent: Option<f64>,
    pub bound: f64,
    pub gap: f64,
    pub elapsed_s: f64,
}

/// How a child's start point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarmstartPath {
    Projected,
    Bumped,
    Coldstart,
}

#[derive(Debug, Clone)]
pub struct BnbNode {
    /// Original variable indices fixed so far, with their values.
    pub fixed: Vec<(usize, u8)>,
    /// Original indices of the free variables, ascending.
    pub free: Vec<usize>,
    pub sub: QuboProblem,
    /// Shift certifying `bound`, in this node's dimension.
    pub shift: QcrShift,
    pub bound: f64,
    pub depth: usize,
}

/// Fixes the free variable at local position `k` to `b` and builds the child's
/// start point from the parent's shift.
///
/// The projected shift is tried first, then the same shift bumped by
/// `delta_strict(lambda_max(Q'))`, then a trivial coldstart; the node never fails.
pub fn warmstart_child(
    parent: &BnbNode,
    k: usize,
    b: u8,
    seed: u64,
) -> Result<(QuboProblem, PlanePoint, WarmstartPath)> {
    let sub = fix_variable(&parent.sub, k, b)?;
    let sys = LmiSystem::new(sub.clone()).with_seed(seed);
    let u = parent.shift.as_vector().clone().remove_row(k);
    if let Ok(point) = sys.initial_feasible_point(&QcrShift::new(u.clone())) {
        return Ok((sub, point, WarmstartPath::Projected));
    }
    let opts = LanczosOptions { seed, ..LanczosOptions::default() };
    let lambda = max_eig(sub.q(), &opts)?.value;
    let bumped = u.add_scalar(delta_strict(lambda));
    if let Ok(point) = sys.initial_feasible_point(&QcrShift::new(bumped)) {
        return Ok((sub, point, WarmstartPath::Bumped));
    }
    let point = sys.initial_feasible_point(&trivial_shift(&sub, seed)?)?;
    Ok((sub, point, WarmstartPath::Coldstart))
}

fn coldstart(sub: &QuboProblem, seed: u64) -> Result<PlanePoint> {
    LmiSystem::new(sub.clone()).initial_feasible_point(&trivial_shift(sub, seed)?)
}

struct Bounded {
    bound: f64,
    shift: QcrShift,
    iterations: u64,
}

/// Descends from `start`; on failure falls back to the start point's own bound,
/// and finally to `cap` with the start shift.
fn bound_node(sub: &QuboProblem, start: PlanePoint, params: &DescentParams, seed: u64, cap: f64) -> Bounded {
    let sys = LmiSystem::new(sub.clone()).with_seed(seed);
    match descend(&sys, start.clone(), params) {
        Ok(res) => Bounded {
            bound: (sub.offset() + res.bound).min(cap),
            shift: QcrShift::new(res.u_hat),
            iterations: res.outer_iters as u64,
        },
        Err(_) => {
            let fallback = sys.cache(start.clone()).and_then(|c| c.bound()).map(|b| b + sub.offset());
            Bounded {
                bound: fallback.map_or(cap, |b| b.min(cap)),
                shift: QcrShift::new(start.u),
                iterations: 0,
            }
        }
    }
}

struct HeapEntry {
    node: BnbNode,
    seq: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // max-heap: larger bound, then deeper, then earlier insertion
    fn cmp(&self, other: &Self) -> Ordering {
        self.node
            .bound
            .total_cmp(&other.node.bound)
            .then(self.node.depth.cmp(&other.node.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

struct Incumbent {
    value: Option<f64>,
    x: Option<Assignment>,
    integral: bool,
}

impl Incumbent {
    fn prunes(&self, bound: f64) -> bool {
        let Some(v) = self.value else { return false };
        if self.integral {
            bound < v.floor() + 1.0 - 1e-6 * (1.0 + v.abs())
        } else {
            bound <= v + 1e-9 * (1.0 + v.abs())
        }
    }

    fn offer(&mut self, value: f64, x: Assignment) {
        if self.value.is_none_or(|v| value > v) {
            self.value = Some(value);
            self.x = Some(x);
        }
    }
}

pub fn solve(p: &QuboProblem, cfg: &BnbConfig) -> Result<BnbResult> {
    solve_with_progress(p, cfg, |_| {})
}

/// [`solve`] with a callback receiving periodic progress records.
pub fn solve_with_progress(
    p: &QuboProblem,
    cfg: &BnbConfig,
    mut on_progress: impl FnMut(&Progress),
) -> Result<BnbResult> {
    cfg.node_params.validate()?;
    cfg.root_params.validate()?;
    let started = Instant::now();
    let n = p.n();
    let mut incumbent = Incumbent {
        value: cfg.injected_primal,
        x: None,
        integral: cfg.integer_pruning.unwrap_or_else(|| has_integral_objective(p)),
    };

    let root_start = coldstart(p, cfg.seed)?;
    let root = bound_node(p, root_start, &cfg.root_params, cfg.seed, f64::INFINITY);
    let mut descent_iterations = root.iterations;
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(HeapEntry {
        node: BnbNode {
            fixed: Vec::new(),
            free: (0..n).collect(),
            sub: p.clone(),
            shift: root.shift,
            bound: root.bound,
            depth: 0,
        },
        seq,
    });

    let mut nodes = 0u64;
    let mut status = BnbStatus::Optimal;
    let global = |heap: &BinaryHeap<HeapEntry>, inc: &Incumbent| {
        let open = heap.peek().map_or(f64::NEG_INFINITY, |e| e.node.bound);
        match inc.value {
            Some(v) => open.max(v),
            None => open,
        }
    };
    let report = |nodes: u64, heap: &BinaryHeap<HeapEntry>, inc: &Incumbent| {
        let bound = global(heap, inc);
        Progress {
            nodes,
            open: heap.len(),
            incumbent: inc.value,
            bound,
            gap: inc.value.map_or(GAP_CAP, |v| relative_gap(bound, v)),
            elapsed_s: started.elapsed().as_secs_f64(),
        }
    };

    while let Some(top) = heap.peek() {
        if incumbent.prunes(top.node.bound) {
            // every remaining node is dominated
            heap.clear();
            break;
        }
        if cfg.time_limit.is_some_and(|t| started.elapsed() >= t) {
            status = BnbStatus::TimeLimit;
            break;
        }
        if cfg.node_limit.is_some_and(|l| nodes >= l) {
            status = BnbStatus::NodeLimit;
            break;
        }
        if heap.len() > cfg.max_open_nodes {
            status = BnbStatus::MemoryAbort;
            break;
        }
        let node = heap.pop().expect("peeked").node;
        nodes += 1;
        let var = node.free[0];

        if node.sub.n() == 1 {
            for b in [0u8, 1] {
                let value = node.sub.offset() + (node.sub.q()[(0, 0)] + node.sub.c()[0]) * b as f64;
                let mut x = vec![0u8; n];
                for &(i, v) in node.fixed.iter().chain(std::iter::once(&(var, b))) {
                    x[i] = v;
                }
                incumbent.offer(value, Assignment::new(x)?);
            }
        } else {
            for b in [0u8, 1] {
                let child_seed = cfg.seed;
                let (sub, start) = if cfg.warmstart {
                    let (sub, start, _) = warmstart_child(&node, 0, b, child_seed)?;
                    (sub, start)
                } else {
                    let sub = fix_variable(&node.sub, 0, b)?;
                    let start = coldstart(&sub, child_seed)?;
                    (sub, start)
                };
                let bounded = bound_node(&sub, start, &cfg.node_params, child_seed, node.bound);
                descent_iterations += bounded.iterations;
                if incumbent.prunes(bounded.bound) {
                    continue;
                }
                let mut fixed = node.fixed.clone();
                fixed.push((var, b));
                seq += 1;
                heap.push(HeapEntry {
                    node: BnbNode {
                        fixed,
                        free: node.free[1..].to_vec(),
                        sub,
                        shift: bounded.shift,
                        bound: bounded.bound,
                        depth: node.depth + 1,
                    },
                    seq,
                });
            }
        }

        if cfg.progress_every > 0 && nodes % cfg.progress_every == 0 {
            on_progress(&report(nodes, &heap, &incumbent));
        }
    }

    let final_progress = report(nodes, &heap, &incumbent);
    if cfg.progress_every > 0 {
        on_progress(&final_progress);
    }
    let global_bound = final_progress.bound;
    let rel_gap_percent = if status == BnbStatus::Optimal { 0.0 } else { final_progress.gap };
    Ok(BnbResult {
        status,
        incumbent_value: incumbent.value,
        incumbent_x: incumbent.x,
        global_bound,
        rel_gap_percent,
        nodes,
        descent_iterations,
        wall_time: started.elapsed(),
    })
}

/// Whether the objective takes integer values on every binary point:
/// `c_i + Q_ii`, `2 Q_ij` and the offset are all integers.
pub fn has_integral_objective(p: &QuboProblem) -> bool {
    let n = p.n();
    let int = |v: f64| v.fract() == 0.0;
    int(p.offset())
        && (0..n).all(|i| {
            int(p.c()[i] + p.q()[(i, i)]) && (i + 1..n).all(|j| int(2.0 * p.q()[(i, j)]))
        })
}

impl BnbNode {
    /// Root node over the whole problem with the given shift and bound.
    pub fn root(p: &QuboProblem, shift: QcrShift, bound: f64) -> Result<Self> {
        if shift.len() != p.n() {
            return Err(Error::DimensionMismatch { expected: p.n(), found: shift.len() });
        }
        Ok(Self { fixed: Vec::new(), free: (0..p.n()).collect(), sub: p.clone(), shift, bound, depth: 0 })
    }
}
