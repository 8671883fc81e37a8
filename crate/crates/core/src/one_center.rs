//! Weighted 1-center on a line by prune and search.

use crate::geom::{linear_bisectors, CostModel, WeightedPoint};
use crate::scalar::{approx_eq, fmax, Scalar};

/// Below this many points the optimum is read off the pairwise costs directly.
pub const BASE_CASE: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct BisectorPair<T> {
    pub p: WeightedPoint<T>,
    pub q: WeightedPoint<T>,
    pub lower: T,
    pub upper: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairClassification<T> {
    pub u: T,
    pub l: T,
    pub pairs: Vec<BisectorPair<T>>,
}

impl<T: Scalar> PairClassification<T> {
    /// Pairs whose upper bisector is at or above `U`.
    pub fn upper_at_or_above_u(&self) -> impl Iterator<Item = &BisectorPair<T>> {
        self.pairs.iter().filter(move |b| b.upper >= self.u)
    }

    pub fn upper_at_or_below_u(&self) -> impl Iterator<Item = &BisectorPair<T>> {
        self.pairs.iter().filter(move |b| b.upper <= self.u)
    }

    pub fn lower_at_or_below_l(&self) -> impl Iterator<Item = &BisectorPair<T>> {
        self.pairs.iter().filter(move |b| b.lower <= self.l)
    }

    pub fn lower_at_or_above_l(&self) -> impl Iterator<Item = &BisectorPair<T>> {
        self.pairs.iter().filter(move |b| b.lower >= self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideReport<T> {
    pub side: Side,
    /// Largest cost among points strictly above / below the probe height.
    pub above: T,
    pub below: T,
}

impl<T: Scalar> SideReport<T> {
    pub fn cost(&self) -> T {
        fmax(self.above, self.below)
    }
}

/// Per-round record of a prune-and-search run: points present and points removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundStat {
    pub size: usize,
    pub removed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneCenterRun<T> {
    pub y: T,
    pub cost: T,
    pub rounds: Vec<RoundStat>,
}

/// Ranks used for the pivots: `U` is the `ceil(m/3)`-th smallest upper
/// bisector, `L` the `ceil(m/3)`-th largest lower bisector.
fn kth_smallest<T: Scalar>(v: &mut [T], k: usize) -> T {
    *v.select_nth_unstable_by(k, |a, b| {
        a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
    })
    .1
}

pub(crate) fn pivots<T: Scalar>(uppers: &mut [T], lowers: &mut [T]) -> (T, T) {
    let m = uppers.len();
    let r = m.div_ceil(3);
    (kth_smallest(uppers, r - 1), kth_smallest(lowers, m - r))
}

/// Pairs consecutive elements of `p` (a trailing odd point stays unpaired).
pub fn classify_pairs<T: Scalar>(
    p: &[WeightedPoint<T>],
    model: CostModel,
) -> Option<PairClassification<T>> {
    if p.len() < 2 {
        return None;
    }
    let pairs: Vec<BisectorPair<T>> = p
        .chunks_exact(2)
        .map(|c| {
            let (lower, upper) = linear_bisectors(
                c[0].y,
                model.effective_weight(c[0].w),
                c[1].y,
                model.effective_weight(c[1].w),
            );
            BisectorPair {
                p: c[0],
                q: c[1],
                lower,
                upper,
            }
        })
        .collect();
    let mut ups: Vec<T> = pairs.iter().map(|b| b.upper).collect();
    let mut lows: Vec<T> = pairs.iter().map(|b| b.lower).collect();
    let (u, l) = pivots(&mut ups, &mut lows);
    Some(PairClassification { u, l, pairs })
}

fn side_from<T: Scalar>(above: T, below: T, tol: T) -> Side {
    if approx_eq(above, below, tol) {
        Side::Both
    } else if above > below {
        Side::Above
    } else {
        Side::Below
    }
}

/// Which side of `y` the optimal height lies on, judged by where the costliest points sit.
pub fn side_of_critical<T: Scalar>(
    p: &[WeightedPoint<T>],
    y: T,
    model: CostModel,
) -> SideReport<T> {
    let (mut above, mut below) = (T::zero(), T::zero());
    for q in p {
        let c = model.from_linear(model.effective_weight(q.w) * (q.y - y).abs());
        if q.y > y {
            above = fmax(above, c);
        } else if q.y < y {
            below = fmax(below, c);
        }
    }
    SideReport {
        side: side_from(above, below, T::solver_tol()),
        above,
        below,
    }
}

/// Which member of a pair is never costlier on an interval free of crossings.
#[derive(Clone, Copy)]
pub(crate) enum Region<T> {
    /// Above every crossing of the pair.
    High,
    /// Below every crossing of the pair.
    Low,
    /// Between the crossings; decided by comparing costs at this height.
    At(T),
}

/// True when the first point of the pair is the dominated one.
pub(crate) fn first_dominated<T: Scalar>(yp: T, wp: T, yq: T, wq: T, region: Region<T>) -> bool {
    match region {
        Region::High => wp < wq || (wp == wq && yp >= yq),
        Region::Low => wp < wq || (wp == wq && yp <= yq),
        Region::At(y) => wp * (yp - y).abs() <= wq * (yq - y).abs(),
    }
}

/// Drops the dominated member of every pair the side reports make safe to
/// drop. The reports must not be `Both`.
pub fn prune_one_sixth<T: Scalar>(
    p: &[WeightedPoint<T>],
    cls: &PairClassification<T>,
    side_u: SideReport<T>,
    side_l: SideReport<T>,
    model: CostModel,
) -> Vec<WeightedPoint<T>> {
    assert!(
        side_u.side != Side::Both && side_l.side != Side::Both,
        "prune with an optimal probe"
    );
    let (u, l) = (cls.u, cls.l);
    let mut drop = std::collections::HashSet::new();
    for b in &cls.pairs {
        let region = if side_u.side == Side::Above {
            (b.upper <= u).then_some(Region::High)
        } else if side_l.side == Side::Below {
            (b.lower >= l).then_some(Region::Low)
        } else {
            (b.upper >= u && b.lower <= l).then_some(Region::At((u + l) * T::half()))
        };
        if let Some(r) = region {
            let (wp, wq) = (model.effective_weight(b.p.w), model.effective_weight(b.q.w));
            drop.insert(if first_dominated(b.p.y, wp, b.q.y, wq, r) {
                b.p.id
            } else {
                b.q.id
            });
        }
    }
    let out: Vec<WeightedPoint<T>> = p
        .iter()
        .filter(|q| !drop.contains(&q.id))
        .copied()
        .collect();
    assert!(
        p.len() - out.len() >= p.len() / 6,
        "pruned {} of {} points",
        p.len() - out.len(),
        p.len()
    );
    out
}

pub fn weighted_one_center<T: Scalar>(p: &[WeightedPoint<T>], model: CostModel) -> (T, T) {
    let run = weighted_one_center_with_stats(p, model);
    (run.y, run.cost)
}

pub fn weighted_one_center_with_stats<T: Scalar>(
    p: &[WeightedPoint<T>],
    model: CostModel,
) -> OneCenterRun<T> {
    assert!(!p.is_empty(), "one-center of an empty set");
    let mut yw: Vec<(T, T)> = p
        .iter()
        .map(|q| (q.y, model.effective_weight(q.w)))
        .collect();
    let mut rounds = Vec::new();
    let (y, cost) = one_center_linear(&mut yw, Some(&mut rounds));
    OneCenterRun {
        y,
        cost: model.from_linear(cost),
        rounds,
    }
}

/// Exact answer from the costliest pair: `w_p w_q |y_p - y_q| / (w_p + w_q)` at the inner bisector.
pub(crate) fn one_center_direct<T: Scalar>(yw: &[(T, T)]) -> (T, T) {
    let mut best = (yw[0].0, T::zero());
    for i in 0..yw.len() {
        let (yi, wi) = yw[i];
        for &(yj, wj) in &yw[i + 1..] {
            let c = wi * wj * (yi - yj).abs() / (wi + wj);
            if c > best.1 {
                best = ((wi * yi + wj * yj) / (wi + wj), c);
            }
        }
    }
    best
}

/// Linear-cost 1-center over `(y, w)` pairs; consumes the working set.
pub(crate) fn one_center_linear<T: Scalar>(
    yw: &mut Vec<(T, T)>,
    mut stats: Option<&mut Vec<RoundStat>>,
) -> (T, T) {
    let tol = T::solver_tol();
    let probe = |yw: &[(T, T)], y: T| {
        let (mut above, mut below) = (T::zero(), T::zero());
        for &(q, w) in yw {
            if q > y {
                above = fmax(above, w * (q - y));
            } else if q < y {
                below = fmax(below, w * (y - q));
            }
        }
        (side_from(above, below, tol), fmax(above, below))
    };
    let mut ups = Vec::new();
    let mut lows = Vec::new();
    while yw.len() > BASE_CASE {
        let m = yw.len();
        ups.clear();
        lows.clear();
        for c in yw.chunks_exact(2) {
            let (lo, hi) = linear_bisectors(c[0].0, c[0].1, c[1].0, c[1].1);
            lows.push(lo);
            ups.push(hi);
        }
        let (u, l) = pivots(&mut ups, &mut lows);
        let (su, cu) = probe(yw, u);
        if su == Side::Both {
            return (u, cu);
        }
        let (sl, cl) = probe(yw, l);
        if sl == Side::Both {
            return (l, cl);
        }
        let mid = (u + l) * T::half();
        let mut keep = Vec::with_capacity(m);
        for c in yw.chunks(2) {
            if c.len() == 1 {
                keep.push(c[0]);
                continue;
            }
            let (lo, hi) = linear_bisectors(c[0].0, c[0].1, c[1].0, c[1].1);
            let region = if su == Side::Above {
                (hi <= u).then_some(Region::High)
            } else if sl == Side::Below {
                (lo >= l).then_some(Region::Low)
            } else {
                (hi >= u && lo <= l).then_some(Region::At(mid))
            };
            match region {
                Some(r) if first_dominated(c[0].0, c[0].1, c[1].0, c[1].1, r) => keep.push(c[1]),
                Some(_) => keep.push(c[0]),
                None => keep.extend_from_slice(c),
            }
        }
        let removed = m - keep.len();
        debug_assert!(removed >= m / 6);
        if let Some(s) = stats.as_deref_mut() {
            s.push(RoundStat { size: m, removed });
        }
        *yw = keep;
    }
    one_center_direct(yw)
}
