//! Optimal k-step fitting: decision test, big buckets, pruning and the main loop.

use std::time::{Duration, Instant};

use crate::engine::units::{pt_cmp, Dir, Greedy, Units};
use crate::engine::{lift, Engine, EngineStats, Problem, PruneRecord};
use crate::error::FitError;
use crate::geom::{
    key_cmp, set_cost, validate_points, CostModel, PartitionScheme, Segment, StepFunction,
    WeightedPoint,
};
use crate::oracle::LockedGroup;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityWitness<T> {
    pub feasible: bool,
    pub steps: Option<StepFunction<T>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Outer prune rounds on the full instance.
    pub rounds: usize,
    pub pruned_per_round: Vec<usize>,
    pub big_indices: Vec<usize>,
    pub wall_time: Duration,
    /// Every prune round at every recursion depth.
    pub prune_records: Vec<PruneRecord>,
    pub one_center_rounds: usize,
    /// Rounds that removed fewer points than guaranteed.
    pub violations: usize,
    /// Times the engine's answer had to be recomputed by bisection.
    pub fallbacks: usize,
    pub max_depth: usize,
}

impl Diagnostics {
    fn from_stats(stats: EngineStats, wall_time: Duration) -> Self {
        let top: Vec<&PruneRecord> = stats.prune_rounds.iter().filter(|r| r.depth == 1).collect();
        Diagnostics {
            rounds: top.len(),
            pruned_per_round: top.iter().map(|r| r.removed).collect(),
            big_indices: top.iter().map(|r| r.j).collect(),
            wall_time,
            one_center_rounds: stats.one_center_rounds,
            violations: stats.violations,
            fallbacks: stats.fallbacks,
            max_depth: stats.max_depth,
            prune_records: stats.prune_rounds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport<T> {
    pub cost: T,
    pub fit: StepFunction<T>,
    /// Prefix counts (in (x, y, id) order) at which each step ends.
    pub boundaries: Vec<usize>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PruneOutcome<T> {
    /// Points that survive, with the big bucket glued into one unit that must
    /// stay whole inside segment `locked.segment`.
    Reduced {
        points: Vec<WeightedPoint<T>>,
        locked: LockedGroup,
        removed: usize,
    },
    /// The optimum turned up while pruning.
    Solved { cost: T },
}

/// Sizes differ by at most one, larger buckets first.
pub fn equal_size_partition<T: Scalar>(p: &[WeightedPoint<T>], k: usize) -> PartitionScheme {
    let n = p.len();
    let k = k.clamp(1, n.max(1));
    let (q, r) = (n / k, n % k);
    let mut acc = 0;
    let boundaries = (0..k - 1)
        .map(|h| {
            acc += q + usize::from(h < r);
            acc
        })
        .collect();
    PartitionScheme { n, boundaries }
}

/// Turns greedy steps into a step function. `entries[s]` is the last unit of
/// step `s` and its height; the last segment always reaches the largest abscissa.
pub(crate) fn build_fit<T: Scalar>(
    units: &Units<T>,
    entries: &[(Option<usize>, Option<T>)],
) -> (StepFunction<T>, Vec<usize>) {
    let pts = units.pts;
    let all = units.all();
    let xmin = pts[units.list[units.extreme(&all, Dir::Fwd).unwrap()].head].x;
    let xmax = pts[units.list[units.extreme(&all, Dir::Bwd).unwrap()].tail].x;
    let k = entries.len();
    let mut rights = Vec::with_capacity(k);
    let mut counts = Vec::with_capacity(k);
    let (mut x, mut count) = (xmin, 0usize);
    for &(last, _) in entries {
        if let Some(u) = last {
            let tail = &pts[units.list[u].tail];
            count = pts
                .iter()
                .filter(|p| pt_cmp(p, tail) != std::cmp::Ordering::Greater)
                .count();
            let next = all
                .iter()
                .copied()
                .filter(|&v| units.before(u, v, Dir::Fwd))
                .reduce(|a, b| if units.before(b, a, Dir::Fwd) { b } else { a });
            x = match next {
                Some(v) => (tail.x + pts[units.list[v].head].x) * T::half(),
                None => xmax,
            };
        }
        rights.push(x);
        counts.push(count);
    }
    rights[k - 1] = xmax;
    counts[k - 1] = pts.len();
    let mut ys: Vec<Option<T>> = entries
        .iter()
        .map(|e| if e.0.is_some() { e.1 } else { None })
        .collect();
    if let Some(last) = (0..k).rev().find(|&s| entries[s].0.is_some()) {
        for s in last + 1..k {
            ys[s] = ys[last];
        }
    }
    for s in 1..k {
        if ys[s].is_none() {
            ys[s] = ys[s - 1];
        }
    }
    let first = ys.iter().flatten().next().copied().unwrap_or_else(T::zero);
    let mut left = xmin;
    let segments = (0..k)
        .map(|s| {
            let seg = Segment {
                x_left: left,
                x_right: rights[s],
                y: ys[s].unwrap_or(first),
            };
            left = rights[s];
            seg
        })
        .collect();
    (
        StepFunction::new(segments).expect("greedy boundaries are ordered"),
        counts,
    )
}

pub(crate) fn entries_from<T: Scalar>(g: &Greedy<T>) -> Vec<(Option<usize>, Option<T>)> {
    g.steps
        .iter()
        .map(|s| (s.last, Some((s.lo + s.hi) * T::half())))
        .collect()
}

/// Decision test: a k-step function of cost at most `d` exists, up to a
/// relative slack of [`Scalar::solver_tol`]. The witness puts every step at
/// the midpoint of its admissible interval.
pub fn feasibility_test<T: Scalar>(
    p: &[WeightedPoint<T>],
    d: T,
    k: usize,
    model: CostModel,
) -> FeasibilityWitness<T> {
    if p.is_empty() || k == 0 || d < T::zero() {
        return FeasibilityWitness {
            feasible: p.is_empty(),
            steps: None,
        };
    }
    let (pts, _) = lift(p, model);
    let units = Units::build(&pts);
    // a relative slack keeps the answer at exactly the optimum from hinging
    // on how the optimum itself was rounded
    let lam = model.to_linear(d) * (T::one() + T::solver_tol());
    match units.sweep(k, lam, None, None) {
        Some(g) => FeasibilityWitness {
            feasible: true,
            steps: Some(build_fit(&units, &entries_from(&g)).0),
        },
        None => FeasibilityWitness {
            feasible: false,
            steps: None,
        },
    }
}

/// Bucket index (0-based) of every point under `scheme`, by rank in (x, y, id) order.
fn buckets_of<T: Scalar>(
    p: &[WeightedPoint<T>],
    scheme: &PartitionScheme,
) -> Result<Vec<usize>, FitError> {
    if scheme.n != p.len() {
        return Err(FitError::InvalidPartition(format!(
            "scheme covers {} points, instance has {}",
            scheme.n,
            p.len()
        )));
    }
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| key_cmp(&p[a], &p[b]));
    let mut out = vec![0; p.len()];
    for h in 0..scheme.k() {
        for r in scheme.bucket(h) {
            out[order[r]] = h;
        }
    }
    Ok(out)
}

fn check_scheme<T: Scalar>(
    p: &[WeightedPoint<T>],
    scheme: &PartitionScheme,
    k: usize,
) -> Result<(), FitError> {
    validate_points(p)?;
    if k == 0 {
        return Err(FitError::InvalidK);
    }
    if scheme.k() != k || scheme.sizes().contains(&0) {
        return Err(FitError::InvalidPartition(format!(
            "need {k} nonempty buckets"
        )));
    }
    Ok(())
}

/// Index (1-based) of a bucket that a single segment of some optimal solution spans.
pub fn find_big_partition<T: Scalar>(
    p: &[WeightedPoint<T>],
    scheme: &PartitionScheme,
    k: usize,
    model: CostModel,
) -> Result<usize, FitError> {
    check_scheme(p, scheme, k)?;
    if k == 1 {
        return Ok(1);
    }
    let buckets = buckets_of(p, scheme)?;
    let (pts, next) = lift(p, model);
    let mut engine = Engine::new(next);
    let prob = Problem {
        pts,
        k,
        left_pin: None,
        right_pin: None,
    };
    Ok(engine.pick_big(&prob, &buckets).0)
}

/// One prune round on bucket `j` (1-based). The result keeps the optimal cost
/// only together with its lock: the surviving bucket must stay whole inside segment `j`.
pub fn prune_big<T: Scalar>(
    p: &[WeightedPoint<T>],
    scheme: &PartitionScheme,
    j: usize,
    k: usize,
    model: CostModel,
) -> Result<PruneOutcome<T>, FitError> {
    check_scheme(p, scheme, k)?;
    if j == 0 || j > k {
        return Err(FitError::InvalidPartition(format!(
            "bucket {j} out of range"
        )));
    }
    let buckets = buckets_of(p, scheme)?;
    let (pts, next) = lift(p, model);
    let mut engine = Engine::new(next);
    let mut prob = Problem {
        pts,
        k,
        left_pin: None,
        right_pin: None,
    };
    let (block, size) = engine.block_for(&prob, &buckets, j);
    let before = prob.pts.len();
    match engine.prune_block(&mut prob, block, j, size) {
        crate::engine::Outcome::Solved(c) => Ok(PruneOutcome::Solved {
            cost: model.from_linear(c),
        }),
        crate::engine::Outcome::Removed(_) => {
            let group = engine.last_group();
            let by_id: std::collections::HashMap<usize, &WeightedPoint<T>> =
                p.iter().map(|q| (q.id, q)).collect();
            let points: Vec<WeightedPoint<T>> = prob.pts.iter().map(|q| *by_id[&q.id]).collect();
            let ids = prob
                .pts
                .iter()
                .filter(|q| q.group == group)
                .map(|q| q.id)
                .collect();
            Ok(PruneOutcome::Reduced {
                removed: before - points.len(),
                points,
                locked: LockedGroup { ids, segment: j },
            })
        }
    }
}

/// Solves in linear time for fixed k, certifies the cost with two decision
/// tests and recovers the step heights at that cost.
pub fn k_step<T: Scalar>(
    p: &[WeightedPoint<T>],
    k: usize,
    model: CostModel,
) -> Result<FitReport<T>, FitError> {
    validate_points(p)?;
    if k == 0 {
        return Err(FitError::InvalidK);
    }
    let start = Instant::now();
    let k = k.min(p.len());
    let (fit, boundaries, stats) = solve_certified(p, k, None, None, model);
    let cost = set_cost(p, &fit, model)?;
    let diagnostics = Diagnostics::from_stats(stats, start.elapsed());
    Ok(FitReport {
        cost,
        fit,
        boundaries,
        diagnostics,
    })
}

/// Runs the engine, checks its answer against the decision test and falls
/// back to bisection if the check fails. Points must already be validated.
pub(crate) fn solve_certified<T: Scalar>(
    p: &[WeightedPoint<T>],
    k: usize,
    left_pin: Option<T>,
    right_pin: Option<T>,
    model: CostModel,
) -> (StepFunction<T>, Vec<usize>, EngineStats) {
    let (pts, next) = lift(p, model);
    let mut engine = Engine::new(next);
    let prob = Problem {
        pts: pts.clone(),
        k,
        left_pin,
        right_pin,
    };
    let mut d = engine.solve(prob.clone());
    let units = Units::build(&pts);
    let slack = T::solver_tol() * T::lit(16.0);
    let certified = d.is_finite()
        && units.feasible(k, d * (T::one() + slack), left_pin, right_pin)
        && (d == T::zero() || !units.feasible(k, d * (T::one() - slack), left_pin, right_pin));
    if !certified {
        d = engine.bisect(&prob);
    }
    let (fit, boundaries) = witness(&units, k, d, left_pin, right_pin);
    (fit, boundaries, engine.stats)
}

/// Greedy fit at the smallest slack above `d` that the sweep accepts.
fn witness<T: Scalar>(
    units: &Units<T>,
    k: usize,
    d: T,
    left_pin: Option<T>,
    right_pin: Option<T>,
) -> (StepFunction<T>, Vec<usize>) {
    let mut slack = T::zero();
    let mut step = T::epsilon();
    loop {
        let lam = d * (T::one() + slack) + slack;
        if let Some(g) = units.sweep(k, lam, left_pin, right_pin) {
            let mut entries = entries_from(&g);
            if let (Some(a), Some(first)) = (left_pin, entries.first_mut()) {
                first.1 = Some(a);
            }
            if let Some(b) = right_pin {
                let last = units.extreme(&g.rest, Dir::Bwd);
                entries.truncate(k - 1);
                entries.push((last, Some(b)));
            }
            return build_fit(units, &entries);
        }
        slack = step;
        step = step * T::lit(4.0);
    }
}
