//! Prune-and-search engine shared by the k-step and anchored solvers.
//!
//! Instances carry extra structure the public API never exposes: points can
//! be glued into units that no boundary may cut, a unit can be locked to a
//! fixed segment index, and the first or last segment can be pinned to a
//! height. Pruning a big bucket produces exactly such a glued, locked unit.

mod exact;
mod rounds;
mod two_step;
pub(crate) mod units;

use std::collections::HashMap;

pub(crate) use rounds::Outcome;
pub(crate) use two_step::doubly_cost;

use crate::geom::{CostModel, WeightedPoint};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Pt<T> {
    pub x: T,
    pub y: T,
    /// Linear-model weight (already transformed for the squared model).
    pub w: T,
    pub id: usize,
    /// Glue group, 0 for none.
    pub group: u32,
    /// Locked segment (1-based), 0 for free.
    pub seg: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct Problem<T> {
    pub pts: Vec<Pt<T>>,
    pub k: usize,
    pub left_pin: Option<T>,
    pub right_pin: Option<T>,
}

/// One prune round on a big block, at any recursion depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneRecord {
    pub depth: usize,
    pub k: usize,
    pub n: usize,
    pub j: usize,
    pub bucket: usize,
    pub removed: usize,
}

impl PruneRecord {
    pub fn required(&self) -> usize {
        self.bucket / 6
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EngineStats {
    pub prune_rounds: Vec<PruneRecord>,
    pub one_center_rounds: usize,
    /// Rounds that removed fewer points than the guaranteed fraction.
    pub violations: usize,
    /// Times pruning stalled and bisection on the decision test took over.
    pub fallbacks: usize,
    pub max_depth: usize,
}

pub(crate) fn base_size(k: usize) -> usize {
    32usize.max(4 * k)
}

pub(crate) struct Engine<T> {
    next_group: u32,
    depth: usize,
    pub stats: EngineStats,
    tol: T,
}

/// Converts public points, gluing runs of equal abscissa (no boundary can split them).
pub(crate) fn lift<T: Scalar>(points: &[WeightedPoint<T>], model: CostModel) -> (Vec<Pt<T>>, u32) {
    let mut first: HashMap<u64, usize> = HashMap::new();
    let mut shared: HashMap<u64, u32> = HashMap::new();
    let mut next = 1u32;
    let key = |x: T| {
        let v = x.to_f64().unwrap_or(0.0);
        if v == 0.0 {
            0u64
        } else {
            v.to_bits()
        }
    };
    for (i, p) in points.iter().enumerate() {
        let kx = key(p.x);
        if first.insert(kx, i).is_some() && !shared.contains_key(&kx) {
            shared.insert(kx, next);
            next += 1;
        }
    }
    let pts = points
        .iter()
        .map(|p| Pt {
            x: p.x,
            y: p.y,
            w: model.effective_weight(p.w),
            id: p.id,
            group: shared.get(&key(p.x)).copied().unwrap_or(0),
            seg: 0,
        })
        .collect();
    (pts, next)
}

/// Mirror image: x negated, segment indices and pins swapped end for end.
pub(crate) fn reflect<T: Scalar>(prob: Problem<T>) -> Problem<T> {
    let k = prob.k as u32;
    let pts = prob
        .pts
        .into_iter()
        .map(|p| Pt {
            x: -p.x,
            seg: if p.seg == 0 { 0 } else { k + 1 - p.seg },
            ..p
        })
        .collect();
    Problem {
        pts,
        k: prob.k,
        left_pin: prob.right_pin,
        right_pin: prob.left_pin,
    }
}

impl<T: Scalar> Engine<T> {
    pub fn new(next_group: u32) -> Self {
        Engine {
            next_group: next_group.max(1),
            depth: 0,
            stats: EngineStats::default(),
            tol: T::solver_tol(),
        }
    }

    /// Group id handed out most recently.
    pub(crate) fn last_group(&self) -> u32 {
        self.next_group - 1
    }

    pub(crate) fn fresh_group(&mut self) -> u32 {
        let g = self.next_group;
        self.next_group += 1;
        g
    }

    /// Optimal cost (linear units) of a constrained instance; infinite when
    /// the constraints admit no solution.
    pub fn solve(&mut self, prob: Problem<T>) -> T {
        self.depth += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.depth);
        let r = self.dispatch(prob);
        self.depth -= 1;
        r
    }

    fn dispatch(&mut self, prob: Problem<T>) -> T {
        let pinned = prob.left_pin.is_some() || prob.right_pin.is_some();
        if prob.pts.is_empty() {
            return if pinned { T::infinity() } else { T::zero() };
        }
        if prob.pts.iter().any(|p| p.seg as usize > prob.k) {
            return T::infinity();
        }
        match (prob.k, prob.left_pin, prob.right_pin) {
            (1, _, _) => self.solve_one(&prob),
            (2, Some(a), Some(b)) => {
                let units = units::Units::build(&prob.pts);
                doubly_cost(&units, a, b, true)
            }
            (2, Some(_), None) => self.left_anchored(prob),
            (2, None, Some(_)) => self.left_anchored(reflect(prob)),
            _ => self.rounds(prob),
        }
    }
}
