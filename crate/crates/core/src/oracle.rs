//! Brute-force reference solvers. Quadratic-or-worse, meant for test-sized inputs.

use crate::anchored::AnchorSpec;
use crate::geom::{key_cmp, step_function_from_bounds, CostModel, StepFunction, WeightedPoint};
use crate::scalar::{fmax, Scalar};

/// Locks the points with the given ids into segment `segment` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct LockedGroup {
    pub ids: Vec<usize>,
    pub segment: usize,
}

/// Side conditions for [`oracle_k_step_constrained`]. A pinned extreme segment
/// must hold at least one point and sits at the pinned height.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleConstraints<T> {
    pub left_pin: Option<T>,
    pub right_pin: Option<T>,
    pub locked: Vec<LockedGroup>,
}

fn pair_cost<T: Scalar>(yp: T, wp: T, yq: T, wq: T) -> T {
    wp * wq * (yp - yq).abs() / (wp + wq)
}

/// Weighted 1-center: the optimum is set by the pair with the largest
/// `w_p w_q |y_p - y_q| / (w_p + w_q)`, at that pair's inner bisector.
pub fn oracle_one_center<T: Scalar>(p: &[WeightedPoint<T>], model: CostModel) -> (T, T) {
    assert!(!p.is_empty(), "one-center of an empty set");
    let w: Vec<T> = p.iter().map(|q| model.effective_weight(q.w)).collect();
    let mut best = (p[0].y, T::zero());
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let c = pair_cost(p[i].y, w[i], p[j].y, w[j]);
            if c > best.1 {
                best = ((w[i] * p[i].y + w[j] * p[j].y) / (w[i] + w[j]), c);
            }
        }
    }
    (best.0, model.from_linear(best.1))
}

pub fn oracle_k_step<T: Scalar>(
    p: &[WeightedPoint<T>],
    k: usize,
    model: CostModel,
) -> (StepFunction<T>, T) {
    oracle_k_step_constrained(p, k, model, &OracleConstraints::default())
        .expect("unconstrained instance is feasible")
}

/// DP over break positions honouring pins and locked groups; `None` when no
/// k-step function satisfies the constraints.
pub fn oracle_k_step_constrained<T: Scalar>(
    p: &[WeightedPoint<T>],
    k: usize,
    model: CostModel,
    cons: &OracleConstraints<T>,
) -> Option<(StepFunction<T>, T)> {
    assert!(!p.is_empty() && k >= 1);
    let mut s: Vec<WeightedPoint<T>> = p.to_vec();
    s.sort_by(key_cmp);
    let n = s.len();
    let w: Vec<T> = s.iter().map(|q| model.effective_weight(q.w)).collect();

    // c[t][i]: optimal 1-step cost of the run t..i.
    let mut c = vec![vec![T::zero(); n + 1]; n + 1];
    for len in 2..=n {
        for t in 0..=n - len {
            let i = t + len;
            c[t][i] = fmax(
                fmax(c[t][i - 1], c[t + 1][i]),
                pair_cost(s[t].y, w[t], s[i - 1].y, w[i - 1]),
            );
        }
    }
    let pin_cost = |a: T, r: std::ops::Range<usize>| {
        r.fold(T::zero(), |m, i| fmax(m, w[i] * (s[i].y - a).abs()))
    };

    // allowed range for boundary b_j (points before it), j = 0..=k
    let mut lo = vec![0usize; k + 1];
    let mut hi = vec![n; k + 1];
    lo[k] = n;
    hi[0] = 0;
    for g in &cons.locked {
        let pos: Vec<usize> = g
            .ids
            .iter()
            .filter_map(|id| s.iter().position(|q| q.id == *id))
            .collect();
        if pos.is_empty() {
            continue;
        }
        if g.segment == 0 || g.segment > k {
            return None;
        }
        let (first, last) = (*pos.iter().min().unwrap(), *pos.iter().max().unwrap());
        for j in 0..g.segment {
            hi[j] = hi[j].min(first);
        }
        for j in g.segment..=k {
            lo[j] = lo[j].max(last + 1);
        }
    }
    let splittable = |b: usize| b == 0 || b == n || s[b - 1].x != s[b].x;

    let inf = T::infinity();
    let seg_cost = |j: usize, t: usize, i: usize| -> T {
        let left = j == 1 && cons.left_pin.is_some();
        let right = j == k && cons.right_pin.is_some();
        if (left || right) && t == i {
            return inf;
        }
        match (left, right) {
            (true, true) => {
                let (a, b) = (cons.left_pin.unwrap(), cons.right_pin.unwrap());
                if a == b {
                    pin_cost(a, t..i)
                } else {
                    inf
                }
            }
            (true, false) => pin_cost(cons.left_pin.unwrap(), t..i),
            (false, true) => pin_cost(cons.right_pin.unwrap(), t..i),
            (false, false) => c[t][i],
        }
    };

    let mut best = vec![vec![inf; n + 1]; k + 1];
    let mut arg = vec![vec![0usize; n + 1]; k + 1];
    best[0][0] = T::zero();
    for j in 1..=k {
        for i in lo[j]..=hi[j] {
            if !splittable(i) {
                continue;
            }
            for t in lo[j - 1]..=hi[j - 1].min(i) {
                if best[j - 1][t] == inf {
                    continue;
                }
                let v = fmax(best[j - 1][t], seg_cost(j, t, i));
                if v < best[j][i] {
                    best[j][i] = v;
                    arg[j][i] = t;
                }
            }
        }
    }
    if best[k][n] == inf {
        return None;
    }
    let mut bounds = vec![n; k + 1];
    for j in (1..=k).rev() {
        bounds[j - 1] = arg[j][bounds[j]];
    }
    let heights: Vec<Option<T>> = (1..=k)
        .map(|j| {
            let r = bounds[j - 1]..bounds[j];
            if j == 1 && cons.left_pin.is_some() {
                cons.left_pin
            } else if j == k && cons.right_pin.is_some() {
                cons.right_pin
            } else if r.is_empty() {
                None
            } else {
                Some(oracle_one_center(&s[r], model).0)
            }
        })
        .collect();
    let xs: Vec<T> = s.iter().map(|q| q.x).collect();
    Some((
        step_function_from_bounds(&xs, &bounds, &heights),
        model.from_linear(best[k][n]),
    ))
}

/// Sorted greedy: extend each step while the admissible height intervals still intersect.
pub fn oracle_feasibility<T: Scalar>(
    p: &[WeightedPoint<T>],
    d: T,
    k: usize,
    model: CostModel,
) -> bool {
    let mut s: Vec<WeightedPoint<T>> = p.to_vec();
    s.sort_by(key_cmp);
    let lam = model.to_linear(d);
    let mut steps = 0;
    let mut i = 0;
    while i < s.len() {
        steps += 1;
        let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
        let mut j = i;
        while j < s.len() {
            // never split points sharing an abscissa
            let mut e = j + 1;
            while e < s.len() && s[e].x == s[j].x {
                e += 1;
            }
            let (mut l2, mut h2) = (lo, hi);
            for q in &s[j..e] {
                let r = lam / model.effective_weight(q.w);
                l2 = l2.max(q.y - r);
                h2 = h2.min(q.y + r);
            }
            if l2 > h2 {
                break;
            }
            lo = l2;
            hi = h2;
            j = e;
        }
        if j == i {
            return false;
        }
        i = j;
    }
    steps <= k.max(1)
}

/// Reference for the anchored solvers. `Both` requires `j = 2` and allows
/// either side to be empty; single-sided anchors keep the pinned extreme segment nonempty.
pub fn oracle_anchored<T: Scalar>(
    p: &[WeightedPoint<T>],
    anchor: AnchorSpec<T>,
    j: usize,
    model: CostModel,
) -> (StepFunction<T>, T) {
    match anchor {
        AnchorSpec::Left(a) => {
            let cons = OracleConstraints {
                left_pin: Some(a),
                ..Default::default()
            };
            oracle_k_step_constrained(p, j, model, &cons)
                .expect("left-anchored instance is feasible")
        }
        AnchorSpec::Right(b) => {
            let cons = OracleConstraints {
                right_pin: Some(b),
                ..Default::default()
            };
            oracle_k_step_constrained(p, j, model, &cons)
                .expect("right-anchored instance is feasible")
        }
        AnchorSpec::Both(a, b) => {
            assert_eq!(j, 2, "doubly anchored reference only covers two steps");
            let mut s: Vec<WeightedPoint<T>> = p.to_vec();
            s.sort_by(key_cmp);
            let n = s.len();
            let cost = |q: &WeightedPoint<T>, y: T| {
                model.from_linear(model.effective_weight(q.w) * (q.y - y).abs())
            };
            let mut best = (0usize, T::infinity());
            for split in 0..=n {
                if split > 0 && split < n && s[split - 1].x == s[split].x {
                    continue;
                }
                let c = s[..split]
                    .iter()
                    .chain(&s[split..])
                    .enumerate()
                    .fold(T::zero(), |m, (i, q)| {
                        fmax(m, cost(q, if i < split { a } else { b }))
                    });
                if c < best.1 {
                    best = (split, c);
                }
            }
            let xs: Vec<T> = s.iter().map(|q| q.x).collect();
            (
                step_function_from_bounds(&xs, &[0, best.0, n], &[Some(a), Some(b)]),
                best.1,
            )
        }
    }
}
