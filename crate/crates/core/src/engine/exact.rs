//! Direct solvers for small or degenerate instances.

use super::units::{pt_cmp, Units};
use super::{Engine, Problem, Pt};
use crate::one_center::one_center_linear;
use crate::scalar::{fmax, fmin, Scalar};

impl<T: Scalar> Engine<T> {
    /// Every point in one segment.
    pub(crate) fn solve_one(&mut self, prob: &Problem<T>) -> T {
        let pin = match (prob.left_pin, prob.right_pin) {
            (Some(a), Some(b)) if a != b => return T::infinity(),
            (Some(a), _) | (None, Some(a)) => Some(a),
            (None, None) => None,
        };
        match pin {
            Some(a) => prob
                .pts
                .iter()
                .fold(T::zero(), |m, p| fmax(m, p.w * (p.y - a).abs())),
            None => {
                let mut yw: Vec<(T, T)> = prob.pts.iter().map(|p| (p.y, p.w)).collect();
                let mut rounds = Vec::new();
                let (_, c) = one_center_linear(&mut yw, Some(&mut rounds));
                for r in rounds {
                    self.stats.one_center_rounds += 1;
                    if r.removed < r.size / 6 {
                        self.stats.violations += 1;
                    }
                }
                c
            }
        }
    }

    /// Dynamic program over break positions; cubic in a handful of points.
    pub(crate) fn base_dp(&mut self, prob: &Problem<T>) -> T {
        let mut s: Vec<Pt<T>> = prob.pts.clone();
        s.sort_by(pt_cmp);
        let (n, k) = (s.len(), prob.k);
        let pair = |a: &Pt<T>, b: &Pt<T>| a.w * b.w * (a.y - b.y).abs() / (a.w + b.w);
        let mut c = vec![vec![T::zero(); n + 1]; n + 1];
        for len in 2..=n {
            for t in 0..=n - len {
                let i = t + len;
                c[t][i] = fmax(fmax(c[t][i - 1], c[t + 1][i]), pair(&s[t], &s[i - 1]));
            }
        }
        let mut lo = vec![0usize; k + 1];
        let mut hi = vec![n; k + 1];
        hi[0] = 0;
        lo[k] = n;
        for (i, p) in s.iter().enumerate() {
            let sg = p.seg as usize;
            if sg == 0 {
                continue;
            }
            if sg > k {
                return T::infinity();
            }
            for h in hi.iter_mut().take(sg) {
                *h = (*h).min(i);
            }
            for l in lo.iter_mut().skip(sg) {
                *l = (*l).max(i + 1);
            }
        }
        let cut_ok =
            |b: usize| b == 0 || b == n || s[b - 1].group == 0 || s[b - 1].group != s[b].group;
        let pinned = |a: T, t: usize, i: usize| {
            s[t..i]
                .iter()
                .fold(T::zero(), |m, p| fmax(m, p.w * (p.y - a).abs()))
        };
        let inf = T::infinity();
        let seg_cost = |j: usize, t: usize, i: usize| -> T {
            let l = if j == 1 { prob.left_pin } else { None };
            let r = if j == k { prob.right_pin } else { None };
            match (l, r) {
                (None, None) => c[t][i],
                _ if t == i => inf,
                (Some(a), Some(b)) => {
                    if a == b {
                        pinned(a, t, i)
                    } else {
                        inf
                    }
                }
                (Some(a), None) | (None, Some(a)) => pinned(a, t, i),
            }
        };
        let mut best = vec![inf; n + 1];
        best[0] = T::zero();
        for j in 1..=k {
            let mut next = vec![inf; n + 1];
            for i in lo[j]..=hi[j] {
                if !cut_ok(i) {
                    continue;
                }
                for t in lo[j - 1]..=hi[j - 1].min(i) {
                    if best[t] < inf {
                        next[i] = fmin(next[i], fmax(best[t], seg_cost(j, t, i)));
                    }
                }
            }
            best = next;
        }
        best[n]
    }

    /// Bisection on the decision test; used only when pruning stalls.
    pub(crate) fn bisect(&mut self, prob: &Problem<T>) -> T {
        self.stats.fallbacks += 1;
        let units = Units::build(&prob.pts);
        let mut ylo = T::infinity();
        let mut yhi = T::neg_infinity();
        let mut wmax = T::zero();
        for p in &prob.pts {
            ylo = fmin(ylo, p.y);
            yhi = fmax(yhi, p.y);
            wmax = fmax(wmax, p.w);
        }
        for a in [prob.left_pin, prob.right_pin].into_iter().flatten() {
            ylo = fmin(ylo, a);
            yhi = fmax(yhi, a);
        }
        let mut hi = wmax * (yhi - ylo) + T::one();
        if !units.feasible(prob.k, hi, prob.left_pin, prob.right_pin) {
            return T::infinity();
        }
        if units.feasible(prob.k, T::zero(), prob.left_pin, prob.right_pin) {
            return T::zero();
        }
        let mut lo = T::zero();
        for _ in 0..200 {
            let mid = (lo + hi) * T::half();
            if mid <= lo || mid >= hi {
                break;
            }
            if units.feasible(prob.k, mid, prob.left_pin, prob.right_pin) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}
