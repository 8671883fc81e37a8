//! Atomic units (glued groups or single points) and the greedy step sweep.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::Pt;
use crate::scalar::{fmax, fmin, Scalar};

/// Order by abscissa alone: points sharing one are always glued into a single
/// unit, so distinct units never tie.
pub(crate) fn pt_cmp<T: Scalar>(a: &Pt<T>, b: &Pt<T>) -> Ordering {
    if a.x < b.x {
        Ordering::Less
    } else if a.x > b.x {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Unit<T> {
    /// Abscissa of the first member; units never share one.
    pub key: T,
    /// Smallest and largest member in key order.
    pub head: usize,
    pub tail: usize,
    /// Segment the unit is locked to, 0 when free.
    pub seg: u32,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dir {
    Fwd,
    Bwd,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Step<T> {
    /// Last unit (in sweep order) the step covers.
    pub last: Option<usize>,
    pub lo: T,
    pub hi: T,
}

#[derive(Debug, Clone)]
pub(crate) struct Greedy<T> {
    pub rest: Vec<usize>,
    pub steps: Vec<Step<T>>,
}

pub(crate) struct Units<'a, T> {
    pub pts: &'a [Pt<T>],
    pub list: Vec<Unit<T>>,
    pub members: Vec<usize>,
}

impl<'a, T: Scalar> Units<'a, T> {
    pub fn build(pts: &'a [Pt<T>]) -> Self {
        let n = pts.len();
        let mut unit_of = vec![0usize; n];
        let mut count: Vec<usize> = Vec::new();
        let mut by_group: HashMap<u32, usize> = HashMap::new();
        for (i, p) in pts.iter().enumerate() {
            let u = if p.group == 0 {
                count.push(0);
                count.len() - 1
            } else {
                *by_group.entry(p.group).or_insert_with(|| {
                    count.push(0);
                    count.len() - 1
                })
            };
            count[u] += 1;
            unit_of[i] = u;
        }
        let mut list: Vec<Unit<T>> = Vec::with_capacity(count.len());
        let mut off = 0;
        for &c in &count {
            list.push(Unit {
                key: T::zero(),
                head: usize::MAX,
                tail: usize::MAX,
                seg: 0,
                start: off,
                end: off,
            });
            off += c;
        }
        let mut members = vec![0usize; n];
        for (i, &u) in unit_of.iter().enumerate() {
            let e = &mut list[u];
            members[e.end] = i;
            e.end += 1;
            if e.head == usize::MAX || pt_cmp(&pts[i], &pts[e.head]) == Ordering::Less {
                e.head = i;
            }
            if e.tail == usize::MAX || pt_cmp(&pts[i], &pts[e.tail]) == Ordering::Greater {
                e.tail = i;
            }
            e.seg = pts[i].seg;
        }
        for e in &mut list {
            e.key = pts[e.head].x;
        }
        Units { pts, list, members }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn all(&self) -> Vec<usize> {
        (0..self.list.len()).collect()
    }

    pub fn cmp(&self, a: usize, b: usize) -> Ordering {
        let (x, y) = (self.list[a].key, self.list[b].key);
        if x < y {
            Ordering::Less
        } else if x > y {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }

    /// `a` strictly precedes `b` in sweep order.
    pub fn before(&self, a: usize, b: usize, dir: Dir) -> bool {
        match dir {
            Dir::Fwd => self.list[a].key < self.list[b].key,
            Dir::Bwd => self.list[a].key > self.list[b].key,
        }
    }

    pub fn members(&self, u: usize) -> &[usize] {
        &self.members[self.list[u].start..self.list[u].end]
    }

    /// Heights within `lam` of every member.
    pub fn interval(&self, u: usize, lam: T) -> (T, T) {
        let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
        for &m in self.members(u) {
            let p = &self.pts[m];
            let r = lam / p.w;
            lo = fmax(lo, p.y - r);
            hi = fmin(hi, p.y + r);
        }
        (lo, hi)
    }

    pub fn intersect(&self, us: &[usize], lam: T, init: (T, T)) -> (T, T) {
        us.iter().fold(init, |(lo, hi), &u| {
            let (a, b) = self.interval(u, lam);
            (fmax(lo, a), fmin(hi, b))
        })
    }

    /// Unit that comes first (or last) in sweep order among `us`.
    pub fn extreme(&self, us: &[usize], dir: Dir) -> Option<usize> {
        us.iter()
            .copied()
            .reduce(|a, b| if self.before(b, a, dir) { b } else { a })
    }

    /// Longest run from the front of `cand` (in sweep order) whose intervals
    /// meet `init`: found by halving around medians, linear in `cand`.
    fn longest(&self, mut work: Vec<usize>, dir: Dir, lam: T, init: (T, T)) -> Step<T> {
        let (mut lo, mut hi) = init;
        let mut last = None;
        let mut order = |a: &usize, b: &usize| match dir {
            Dir::Fwd => self.cmp(*a, *b),
            Dir::Bwd => self.cmp(*b, *a),
        };
        while !work.is_empty() {
            if work.len() <= 8 {
                work.sort_by(&mut order);
                for &u in &work {
                    let (a, b) = self.interval(u, lam);
                    let (l2, h2) = (fmax(lo, a), fmin(hi, b));
                    if l2 > h2 {
                        break;
                    }
                    lo = l2;
                    hi = h2;
                    last = Some(u);
                }
                break;
            }
            let mid = (work.len() - 1) / 2;
            work.select_nth_unstable_by(mid, &mut order);
            let (l2, h2) = self.intersect(&work[..=mid], lam, (lo, hi));
            if l2 <= h2 {
                lo = l2;
                hi = h2;
                last = Some(work[mid]);
                work.drain(..=mid);
            } else {
                work.truncate(mid + 1);
            }
        }
        Step { last, lo, hi }
    }

    /// Greedy maximal steps over `rest`, numbered from `first_seg` (upwards for
    /// `Fwd`, downwards for `Bwd`). Locked units bound every step. A pinned
    /// first step starts from `[pin, pin]` and must cover something;
    /// `reserve_last` keeps the final unit uncovered. `None` when a locked unit
    /// is left behind its segment.
    #[allow(clippy::too_many_arguments)]
    pub fn greedy(
        &self,
        mut rest: Vec<usize>,
        dir: Dir,
        first_seg: usize,
        steps: usize,
        lam: T,
        pin: Option<T>,
        reserve_last: bool,
    ) -> Option<Greedy<T>> {
        let mut out = Vec::with_capacity(steps);
        for s in 0..steps {
            let sigma = match dir {
                Dir::Fwd => first_seg + s,
                Dir::Bwd => first_seg - s,
            } as u32;
            let blocked = |u: usize| {
                let sg = self.list[u].seg;
                sg != 0
                    && if dir == Dir::Fwd {
                        sg > sigma
                    } else {
                        sg < sigma
                    }
            };
            let mut cap: Option<usize> = None;
            for &u in &rest {
                if blocked(u) && cap.is_none_or(|c| self.before(u, c, dir)) {
                    cap = Some(u);
                }
            }
            let reserved = if reserve_last {
                self.extreme(&rest, if dir == Dir::Fwd { Dir::Bwd } else { Dir::Fwd })
            } else {
                None
            };
            let cand: Vec<usize> = rest
                .iter()
                .copied()
                .filter(|&u| cap.is_none_or(|c| self.before(u, c, dir)) && Some(u) != reserved)
                .collect();
            let init = match (s, pin) {
                (0, Some(a)) => (a, a),
                _ => (T::neg_infinity(), T::infinity()),
            };
            let step = self.longest(cand, dir, lam, init);
            if s == 0 && pin.is_some() && step.last.is_none() {
                return None;
            }
            if let Some(l) = step.last {
                rest.retain(|&u| self.before(l, u, dir));
            }
            let stranded = rest.iter().any(|&u| {
                let sg = self.list[u].seg;
                sg != 0
                    && if dir == Dir::Fwd {
                        sg <= sigma
                    } else {
                        sg >= sigma
                    }
            });
            if stranded {
                return None;
            }
            out.push(step);
        }
        Some(Greedy { rest, steps: out })
    }

    /// Whether a `k`-step function with cost at most `lam` exists under the pins and locks.
    pub fn feasible(&self, k: usize, lam: T, left_pin: Option<T>, right_pin: Option<T>) -> bool {
        self.sweep(k, lam, left_pin, right_pin).is_some()
    }

    /// Greedy witness for [`Units::feasible`]: the steps before the final one and
    /// the units left for the final step.
    pub fn sweep(
        &self,
        k: usize,
        lam: T,
        left_pin: Option<T>,
        right_pin: Option<T>,
    ) -> Option<Greedy<T>> {
        let all = self.all();
        let Some(b) = right_pin else {
            let g = self.greedy(all, Dir::Fwd, 1, k, lam, left_pin, false)?;
            return g.rest.is_empty().then_some(g);
        };
        let last = self.extreme(&all, Dir::Bwd)?;
        // latest unit that cannot sit in the pinned last segment
        let mut thr: Option<usize> = None;
        for &u in &all {
            let (lo, hi) = self.interval(u, lam);
            let sg = self.list[u].seg;
            let bad = !(lo <= b && b <= hi) || (sg != 0 && (sg as usize) < k);
            if bad && thr.is_none_or(|t| self.before(t, u, Dir::Fwd)) {
                thr = Some(u);
            }
        }
        if thr == Some(last) {
            return None;
        }
        if k == 1 {
            return (thr.is_none() && left_pin.is_none_or(|a| a == b)).then_some(Greedy {
                rest: all,
                steps: Vec::new(),
            });
        }
        let g = self.greedy(all, Dir::Fwd, 1, k - 1, lam, left_pin, true)?;
        let ok = thr.is_none_or(|t| g.rest.iter().all(|&u| self.before(t, u, Dir::Fwd)));
        ok.then_some(g)
    }
}
