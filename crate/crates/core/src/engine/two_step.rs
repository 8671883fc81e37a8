//! Two-step solvers with pinned heights.

use super::rounds::Outcome;
use super::units::{Dir, Units};
use super::{base_size, Engine, Problem};
use crate::one_center::one_center_linear;
use crate::scalar::{approx_eq, fmax, fmin, Scalar};

fn unit_cost<T: Scalar>(units: &Units<T>, u: usize, h: T) -> T {
    units.members(u).iter().fold(T::zero(), |m, &i| {
        let p = &units.pts[i];
        fmax(m, p.w * (p.y - h).abs())
    })
}

/// Best split between a left segment at `a` and a right one at `b`. The left
/// cost grows and the right cost shrinks as the split moves right, so halving
/// the candidate set around its median unit finds the lowest crossing in
/// linear time. Locked units force their side; `nonempty` forces the extreme
/// units onto their own sides.
pub(crate) fn doubly_cost<T: Scalar>(units: &Units<T>, a: T, b: T, nonempty: bool) -> T {
    let all = units.all();
    if all.is_empty() {
        return if nonempty { T::infinity() } else { T::zero() };
    }
    let ca: Vec<T> = all.iter().map(|&u| unit_cost(units, u, a)).collect();
    let cb: Vec<T> = all.iter().map(|&u| unit_cost(units, u, b)).collect();
    let mut left_end: Option<usize> = None;
    let mut right_start: Option<usize> = None;
    for &u in &all {
        match units.list[u].seg {
            1 if left_end.is_none_or(|l| units.before(l, u, Dir::Fwd)) => left_end = Some(u),
            2 if right_start.is_none_or(|r| units.before(u, r, Dir::Fwd)) => right_start = Some(u),
            s if s > 2 => return T::infinity(),
            _ => {}
        }
    }
    if nonempty {
        let first = units.extreme(&all, Dir::Fwd).unwrap();
        let last = units.extreme(&all, Dir::Bwd).unwrap();
        if first == last || units.list[first].seg == 2 || units.list[last].seg == 1 {
            return T::infinity();
        }
        if left_end.is_none() {
            left_end = Some(first);
        }
        if right_start.is_none() {
            right_start = Some(last);
        }
    }
    if let (Some(l), Some(r)) = (left_end, right_start) {
        if !units.before(l, r, Dir::Fwd) {
            return T::infinity();
        }
    }
    let (mut g, mut h) = (T::zero(), T::zero());
    let mut window = Vec::new();
    for &u in &all {
        if left_end.is_some_and(|l| !units.before(l, u, Dir::Fwd)) {
            g = fmax(g, ca[u]);
        } else if right_start.is_some_and(|r| !units.before(u, r, Dir::Fwd)) {
            h = fmax(h, cb[u]);
        } else {
            window.push(u);
        }
    }
    let mut best = T::infinity();
    while !window.is_empty() {
        let mid = (window.len() - 1) / 2;
        window.select_nth_unstable_by(mid, |x, y| units.cmp(*x, *y));
        let m = window[mid];
        let gm = window[..=mid].iter().fold(g, |acc, &u| fmax(acc, ca[u]));
        let hm = window[mid + 1..].iter().fold(h, |acc, &u| fmax(acc, cb[u]));
        if gm >= hm {
            best = fmin(best, gm);
            h = fmax(hm, cb[m]);
            window.truncate(mid);
        } else {
            best = fmin(best, hm);
            g = gm;
            window.drain(..=mid);
        }
    }
    fmin(best, fmax(g, h))
}

impl<T: Scalar> Engine<T> {
    fn one_center_of(&mut self, units: &Units<T>, us: &[usize]) -> T {
        let mut yw: Vec<(T, T)> = us
            .iter()
            .flat_map(|&u| {
                units
                    .members(u)
                    .iter()
                    .map(|&i| (units.pts[i].y, units.pts[i].w))
            })
            .collect();
        if yw.is_empty() {
            return T::zero();
        }
        let mut rounds = Vec::new();
        let (_, c) = one_center_linear(&mut yw, Some(&mut rounds));
        self.stats.one_center_rounds += rounds.len();
        self.stats.violations += rounds.iter().filter(|r| r.removed < r.size / 6).count();
        c
    }

    /// Two steps, the first pinned at the left pin. Halve the free units:
    /// if the left half costs less at the pin than the rest costs on its own,
    /// the left half belongs to the first step and collapses to its critical
    /// point; if more, the right half joins the second step and that block is
    /// pruned like any big bucket.
    pub(crate) fn left_anchored(&mut self, mut prob: Problem<T>) -> T {
        let a = prob.left_pin.expect("left pin");
        debug_assert!(prob.k == 2 && prob.right_pin.is_none());
        loop {
            if prob.pts.len() <= base_size(2) {
                return self.base_dp(&prob);
            }
            let units = Units::build(&prob.pts);
            let all = units.all();
            let first = units.extreme(&all, Dir::Fwd).unwrap();
            if units.list[first].seg == 2 {
                return T::infinity();
            }
            let left_end = all
                .iter()
                .copied()
                .filter(|&u| units.list[u].seg == 1)
                .reduce(|x, y| if units.before(x, y, Dir::Fwd) { y } else { x })
                .unwrap_or(first);
            let right_start = all
                .iter()
                .copied()
                .filter(|&u| units.list[u].seg == 2)
                .reduce(|x, y| if units.before(x, y, Dir::Fwd) { x } else { y });
            if right_start.is_some_and(|r| units.before(r, left_end, Dir::Fwd)) {
                return T::infinity();
            }
            let mut known = Vec::new();
            let mut free = Vec::new();
            let mut tail = Vec::new();
            for &u in &all {
                if !units.before(left_end, u, Dir::Fwd) {
                    known.push(u);
                } else if right_start.is_none_or(|r| units.before(u, r, Dir::Fwd)) {
                    free.push(u);
                } else {
                    tail.push(u);
                }
            }
            let g0 = known
                .iter()
                .fold(T::zero(), |m, &u| fmax(m, unit_cost(&units, u, a)));
            if free.len() <= 1 {
                let keep_left = fmax(
                    fmax(
                        g0,
                        free.iter()
                            .fold(T::zero(), |m, &u| fmax(m, unit_cost(&units, u, a))),
                    ),
                    self.one_center_of(&units, &tail),
                );
                let mut right = tail.clone();
                right.extend(&free);
                let go_right = fmax(g0, self.one_center_of(&units, &right));
                return fmin(keep_left, go_right);
            }
            let h = free.len().div_ceil(2);
            free.select_nth_unstable_by(h - 1, |x, y| units.cmp(*x, *y));
            let (f1, f2) = free.split_at(h);
            let d1 = f1.iter().fold(g0, |m, &u| fmax(m, unit_cost(&units, u, a)));
            let mut rest: Vec<usize> = f2.to_vec();
            rest.extend(&tail);
            let d2 = self.one_center_of(&units, &rest);
            if approx_eq(d1, d2, self.tol) {
                return fmax(d1, d2);
            }
            if d1 < d2 {
                // everything up to the end of f1 sits in the first step
                let mut crit = None;
                let mut worst = T::neg_infinity();
                for &u in known.iter().chain(f1) {
                    for &i in units.members(u) {
                        let p = &prob.pts[i];
                        let c = p.w * (p.y - a).abs();
                        if c > worst
                            || (c == worst && crit.is_some_and(|j: usize| p.id < prob.pts[j].id))
                        {
                            worst = c;
                            crit = Some(i);
                        }
                    }
                }
                let mut gone = vec![false; prob.pts.len()];
                for &u in known.iter().chain(f1) {
                    for &i in units.members(u) {
                        gone[i] = Some(i) != crit;
                    }
                }
                let crit = crit.unwrap();
                drop(units);
                let g = self.fresh_group();
                prob.pts[crit].group = g;
                prob.pts[crit].seg = 1;
                let mut i = 0;
                prob.pts.retain(|_| {
                    i += 1;
                    !gone[i - 1]
                });
                continue;
            }
            let block: Vec<usize> = rest
                .iter()
                .flat_map(|&u| units.members(u).iter().copied())
                .collect();
            let bucket: usize = f2.iter().map(|&u| units.members(u).len()).sum();
            drop(units);
            match self.prune_block(&mut prob, block, 2, bucket) {
                Outcome::Solved(c) => return c,
                Outcome::Removed(r) if r > 0 => {}
                Outcome::Removed(_) => return self.bisect(&prob),
            }
        }
    }
}
