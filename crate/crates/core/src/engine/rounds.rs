//! Big-bucket identification and pruning.

use std::collections::HashMap;

use super::units::{pt_cmp, Dir, Units};
use super::{base_size, Engine, Problem, PruneRecord, Pt};
use crate::geom::linear_bisectors;
use crate::one_center::{first_dominated, pivots, Region};
use crate::scalar::{fmax, fmin, Scalar};

pub(crate) enum Outcome<T> {
    /// The optimum was found while pruning.
    Solved(T),
    Removed(usize),
}

/// Bucket (0-based) of every point under the equal-size partition.
pub(crate) fn partition<T: Scalar>(pts: &[Pt<T>], k: usize) -> Vec<usize> {
    let n = pts.len();
    let (q, r) = (n / k, n % k);
    // ties in x break by position so that runs of equal x cannot empty a bucket
    let before = |a: usize, b: usize| pt_cmp(&pts[a], &pts[b]).then(a.cmp(&b));
    let mut idx: Vec<usize> = (0..n).collect();
    let mut cuts = Vec::with_capacity(k.saturating_sub(1));
    let mut lo = 0;
    let mut rank = 0;
    for h in 0..k - 1 {
        rank += q + usize::from(h < r);
        if rank >= n {
            break;
        }
        idx[lo..].select_nth_unstable_by(rank - lo, |&a, &b| before(a, b));
        cuts.push(idx[rank]);
        lo = rank;
    }
    (0..n)
        .map(|i| {
            cuts.iter()
                .filter(|&&c| before(c, i) != std::cmp::Ordering::Greater)
                .count()
        })
        .collect()
}

/// Key extents of glue groups and of locked segments.
struct Extents {
    group: HashMap<u32, (usize, usize)>,
    seg_lo: Vec<Option<usize>>,
    seg_hi: Vec<Option<usize>>,
}

fn widen<T: Scalar>(pts: &[Pt<T>], slot: &mut Option<usize>, i: usize, take_max: bool) {
    let better = match *slot {
        None => true,
        Some(c) => (pt_cmp(&pts[i], &pts[c]) == std::cmp::Ordering::Greater) == take_max,
    };
    if better {
        *slot = Some(i);
    }
}

fn extents<T: Scalar>(pts: &[Pt<T>], k: usize) -> Extents {
    let mut group: HashMap<u32, (usize, usize)> = HashMap::new();
    let mut seg_lo = vec![None; k + 1];
    let mut seg_hi = vec![None; k + 1];
    for (i, p) in pts.iter().enumerate() {
        if p.group != 0 {
            let e = group.entry(p.group).or_insert((i, i));
            if pt_cmp(p, &pts[e.0]) == std::cmp::Ordering::Less {
                e.0 = i;
            }
            if pt_cmp(p, &pts[e.1]) == std::cmp::Ordering::Greater {
                e.1 = i;
            }
        }
        let s = p.seg as usize;
        if s != 0 && s <= k {
            widen(pts, &mut seg_lo[s], i, false);
            widen(pts, &mut seg_hi[s], i, true);
        }
    }
    Extents {
        group,
        seg_lo,
        seg_hi,
    }
}

/// Renumbers a locked segment for a sub-instance that starts at segment
/// `shift + 1`; a lock on an earlier segment becomes unsatisfiable.
fn shifted<T: Scalar>(p: &Pt<T>, shift: u32) -> Pt<T> {
    let seg = match p.seg {
        0 => 0,
        s if s > shift => s - shift,
        _ => u32::MAX,
    };
    Pt { seg, ..*p }
}

fn le_key<T: Scalar>(a: &Pt<T>, b: &Pt<T>) -> bool {
    pt_cmp(a, b) != std::cmp::Ordering::Greater
}

impl<T: Scalar> Engine<T> {
    pub(crate) fn rounds(&mut self, mut prob: Problem<T>) -> T {
        loop {
            if prob.pts.len() <= base_size(prob.k) {
                return self.base_dp(&prob);
            }
            let bucket_of = partition(&prob.pts, prob.k);
            let (j, block, size) = self.pick_big(&prob, &bucket_of);
            match self.prune_block(&mut prob, block, j, size) {
                Outcome::Solved(c) => return c,
                Outcome::Removed(r) if r > 0 => {}
                Outcome::Removed(_) => return self.bisect(&prob),
            }
        }
    }

    /// Bucket extents (group-widened) as point indices of first and last member.
    fn bucket_ends(
        prob: &Problem<T>,
        ext: &Extents,
        bucket_of: &[usize],
    ) -> (Vec<(usize, usize)>, Vec<usize>) {
        let k = prob.k;
        let mut head: Vec<Option<usize>> = vec![None; k];
        let mut tail: Vec<Option<usize>> = vec![None; k];
        let mut size = vec![0usize; k];
        for (i, &b) in bucket_of.iter().enumerate() {
            widen(&prob.pts, &mut head[b], i, false);
            widen(&prob.pts, &mut tail[b], i, true);
            size[b] += 1;
        }
        let grown = |i: usize, end: bool| match ext.group.get(&prob.pts[i].group) {
            Some(&(lo, hi)) if prob.pts[i].group != 0 => {
                if end {
                    hi
                } else {
                    lo
                }
            }
            _ => i,
        };
        let ends = (0..k)
            .map(|b| {
                (
                    grown(head[b].unwrap(), false),
                    grown(tail[b].unwrap(), true),
                )
            })
            .collect();
        (ends, size)
    }

    /// Points of bucket `j` (1-based) widened to whole glue groups, and the bucket's size.
    pub(crate) fn block_for(
        &self,
        prob: &Problem<T>,
        bucket_of: &[usize],
        j: usize,
    ) -> (Vec<usize>, usize) {
        let ext = extents(&prob.pts, prob.k);
        let (ends, size) = Self::bucket_ends(prob, &ext, bucket_of);
        let (lo, hi) = (prob.pts[ends[j - 1].0], prob.pts[ends[j - 1].1]);
        let block = (0..prob.pts.len())
            .filter(|&i| le_key(&lo, &prob.pts[i]) && le_key(&prob.pts[i], &hi))
            .collect();
        (block, size[j - 1])
    }

    /// Big bucket index with its block and size.
    pub(crate) fn pick_big(
        &mut self,
        prob: &Problem<T>,
        bucket_of: &[usize],
    ) -> (usize, Vec<usize>, usize) {
        let ext = extents(&prob.pts, prob.k);
        let (ends, _) = Self::bucket_ends(prob, &ext, bucket_of);
        let j = self.find_big(prob, &ext, &ends);
        let (block, size) = self.block_for(prob, bucket_of, j);
        (j, block, size)
    }

    /// Index (1-based) of a bucket that one segment of some optimal solution spans.
    fn find_big(&mut self, prob: &Problem<T>, ext: &Extents, ends: &[(usize, usize)]) -> usize {
        let k = prob.k;
        let units = Units::build(&prob.pts);
        let tol = self.tol;
        // "d <= optimum" exactly when nothing cheaper than d is feasible
        let at_most_opt = |d: T| {
            d == T::zero()
                || !units.feasible(k, d * (T::one() - tol), prob.left_pin, prob.right_pin)
        };
        let prefix = |j: usize| {
            let mut end = ends[j - 1].1;
            for s in 1..=j {
                if let Some(h) = ext.seg_hi[s] {
                    if pt_cmp(&prob.pts[h], &prob.pts[end]) == std::cmp::Ordering::Greater {
                        end = h;
                    }
                }
            }
            let e = prob.pts[end];
            Problem {
                pts: prob.pts.iter().filter(|p| le_key(p, &e)).copied().collect(),
                k: j,
                left_pin: prob.left_pin,
                right_pin: None,
            }
        };
        let d1 = self.solve(prefix(1));
        if at_most_opt(d1) {
            return 1;
        }
        let mut start = ends[k - 1].0;
        if let Some(l) = ext.seg_lo[k] {
            if pt_cmp(&prob.pts[l], &prob.pts[start]) == std::cmp::Ordering::Less {
                start = l;
            }
        }
        let s = prob.pts[start];
        let suffix = Problem {
            pts: prob
                .pts
                .iter()
                .filter(|p| le_key(&s, p))
                .map(|p| shifted(p, k as u32 - 1))
                .collect(),
            k: 1,
            left_pin: None,
            right_pin: prob.right_pin,
        };
        let dk = self.solve(suffix);
        if at_most_opt(dk) {
            return k;
        }
        for j in 2..k {
            let dj = self.solve(prefix(j));
            if at_most_opt(dj) {
                return j;
            }
        }
        k
    }

    /// Optimal cost with the block's segment (index `j`) held at `y0`.
    fn phi(&mut self, prob: &Problem<T>, j: usize, head: &Pt<T>, tail: &Pt<T>, y0: T) -> T {
        let k = prob.k;
        let left = Problem {
            pts: prob
                .pts
                .iter()
                .filter(|p| le_key(p, tail))
                .copied()
                .collect(),
            k: j,
            left_pin: prob.left_pin,
            right_pin: Some(y0),
        };
        let shift = j as u32 - 1;
        let right = Problem {
            pts: prob
                .pts
                .iter()
                .filter(|p| le_key(head, p))
                .map(|p| shifted(p, shift))
                .collect(),
            k: k - j + 1,
            left_pin: Some(y0),
            right_pin: prob.right_pin,
        };
        let a = self.solve(left);
        if a == T::infinity() {
            return a;
        }
        fmax(a, self.solve(right))
    }

    /// Heights the block's segment can take in some solution of cost at most `lam`.
    fn span(
        &self,
        prob: &Problem<T>,
        units: &Units<T>,
        bu: usize,
        j: usize,
        lam: T,
    ) -> Option<(T, T)> {
        let k = prob.k;
        let (mut before, mut after) = (Vec::new(), Vec::new());
        for u in units.all() {
            if units.before(u, bu, Dir::Fwd) {
                before.push(u);
            } else if units.before(bu, u, Dir::Fwd) {
                after.push(u);
            }
        }
        let g1 = units.greedy(before, Dir::Fwd, 1, j - 1, lam, prob.left_pin, false)?;
        let g2 = units.greedy(after, Dir::Bwd, k, k - j, lam, prob.right_pin, false)?;
        let rest: Vec<usize> = g1.rest.into_iter().chain(g2.rest).collect();
        if rest
            .iter()
            .any(|&u| units.list[u].seg != 0 && units.list[u].seg as usize != j)
        {
            return None;
        }
        let (lo, hi) = units.intersect(&rest, lam, units.interval(bu, lam));
        (lo <= hi).then_some((lo, hi))
    }

    /// Glues `block` into one unit locked to segment `j`, then discards the
    /// dominated member of every pair whose cost curves cannot cross near the
    /// block's optimal heights.
    pub(crate) fn prune_block(
        &mut self,
        prob: &mut Problem<T>,
        block: Vec<usize>,
        j: usize,
        bucket: usize,
    ) -> Outcome<T> {
        let k = prob.k;
        let n = prob.pts.len();
        if block.is_empty()
            || block
                .iter()
                .any(|&i| prob.pts[i].seg != 0 && prob.pts[i].seg as usize != j)
        {
            return Outcome::Removed(0);
        }
        let g = self.fresh_group();
        for &i in &block {
            prob.pts[i].group = g;
            prob.pts[i].seg = j as u32;
        }
        let mut gone = vec![false; n];
        let pin = match j {
            1 if prob.left_pin.is_some() => prob.left_pin,
            _ if j == k => prob.right_pin,
            _ => None,
        };
        let mut first_pass;
        if let Some(a) = pin {
            // a pinned segment only ever sees its costliest point
            let mut crit = block[0];
            for &i in &block {
                let (p, c) = (&prob.pts[i], &prob.pts[crit]);
                let (cp, cc) = (p.w * (p.y - a).abs(), c.w * (c.y - a).abs());
                if cp > cc || (cp == cc && p.id < c.id) {
                    crit = i;
                }
            }
            for &i in &block {
                gone[i] = i != crit;
            }
            first_pass = block.len() - 1;
        } else {
            if block.len() < 2 {
                return Outcome::Removed(0);
            }
            let (mut ups, mut lows) = (Vec::new(), Vec::new());
            for c in block.chunks_exact(2) {
                let (p, q) = (&prob.pts[c[0]], &prob.pts[c[1]]);
                let (lo, hi) = linear_bisectors(p.y, p.w, q.y, q.w);
                lows.push(lo);
                ups.push(hi);
            }
            let (u, l) = pivots(&mut ups, &mut lows);
            let mut head = block[0];
            let mut tail = block[0];
            for &i in &block {
                if pt_cmp(&prob.pts[i], &prob.pts[head]) == std::cmp::Ordering::Less {
                    head = i;
                }
                if pt_cmp(&prob.pts[i], &prob.pts[tail]) == std::cmp::Ordering::Greater {
                    tail = i;
                }
            }
            let (hp, tp) = (prob.pts[head], prob.pts[tail]);
            let phi_u = self.phi(prob, j, &hp, &tp, u);
            let phi_l = self.phi(prob, j, &hp, &tp, l);
            if phi_u == T::zero() || phi_l == T::zero() {
                return Outcome::Solved(T::zero());
            }
            if !(phi_u.is_finite() && phi_l.is_finite()) {
                return Outcome::Removed(0);
            }
            let shrink = T::one() - self.tol;
            let units = Units::build(&prob.pts);
            let bu = (0..units.len())
                .find(|&x| prob.pts[units.list[x].head].group == g)
                .unwrap();
            let Some(ju) = self.span(prob, &units, bu, j, phi_u * shrink) else {
                return Outcome::Solved(phi_u);
            };
            let Some(jl) = self.span(prob, &units, bu, j, phi_l * shrink) else {
                return Outcome::Solved(phi_l);
            };
            let (lo, hi) = (fmax(ju.0, jl.0), fmin(ju.1, jl.1));
            if lo > hi {
                return Outcome::Removed(0);
            }
            let delta = self.tol.sqrt() * (T::one() + lo.abs() + hi.abs() + (hi - lo));
            let (k1, k2) = if ju.0 > u {
                (fmax(u, lo - delta), hi + delta)
            } else if jl.1 < l {
                (lo - delta, fmin(l, hi + delta))
            } else if ju.1 < u && jl.0 > l {
                (fmax(l, lo - delta), fmin(u, hi + delta))
            } else {
                return Outcome::Removed(0);
            };
            let mid = (k1 + k2) * T::half();
            let mut alive = block.clone();
            first_pass = 0usize;
            for pass in 0..8 {
                let mut removed = 0;
                let mut next = Vec::with_capacity(alive.len());
                for c in alive.chunks(2) {
                    if c.len() == 1 {
                        next.push(c[0]);
                        continue;
                    }
                    let (p, q) = (&prob.pts[c[0]], &prob.pts[c[1]]);
                    let region = if p.y == q.y {
                        Some(Region::High)
                    } else {
                        let (bl, bh) = linear_bisectors(p.y, p.w, q.y, q.w);
                        let inside = |b: T| k1 < b && b < k2;
                        if inside(bl) || inside(bh) {
                            None
                        } else if bh <= k1 {
                            Some(Region::High)
                        } else if bl >= k2 {
                            Some(Region::Low)
                        } else {
                            Some(Region::At(mid))
                        }
                    };
                    match region {
                        Some(r) => {
                            let (d, keep) = if first_dominated(p.y, p.w, q.y, q.w, r) {
                                (c[0], c[1])
                            } else {
                                (c[1], c[0])
                            };
                            gone[d] = true;
                            next.push(keep);
                            removed += 1;
                        }
                        None => next.extend_from_slice(c),
                    }
                }
                if pass == 0 {
                    first_pass = removed;
                }
                alive = next;
                if removed == 0 || removed * 8 < alive.len() + removed {
                    break;
                }
            }
        }
        let total = gone.iter().filter(|&&x| x).count();
        if first_pass < bucket / 6 {
            self.stats.violations += 1;
        }
        self.stats.prune_rounds.push(PruneRecord {
            depth: self.depth,
            k,
            n,
            j,
            bucket,
            removed: total,
        });
        let mut i = 0;
        prob.pts.retain(|_| {
            i += 1;
            !gone[i - 1]
        });
        Outcome::Removed(total)
    }
}
