use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::FitError;
use crate::scalar::{fmax, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint<T> {
    pub x: T,
    pub y: T,
    pub w: T,
    pub id: usize,
}

impl<T: Scalar> WeightedPoint<T> {
    pub fn new(x: T, y: T, w: T, id: usize) -> Self {
        WeightedPoint { x, y, w, id }
    }
}

/// Total order on points: abscissa, then ordinate, then id.
pub fn key_cmp<T: Scalar>(a: &WeightedPoint<T>, b: &WeightedPoint<T>) -> Ordering {
    a.x.partial_cmp(&b.x)
        .unwrap_or(Ordering::Equal)
        .then(a.y.partial_cmp(&b.y).unwrap_or(Ordering::Equal))
        .then(a.id.cmp(&b.id))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CostModel {
    #[default]
    Linear,
    Squared,
}

impl CostModel {
    /// Weight under which the linear cost orders fits exactly like this model does.
    pub fn effective_weight<T: Scalar>(self, w: T) -> T {
        match self {
            CostModel::Linear => w,
            CostModel::Squared => w.sqrt(),
        }
    }

    /// Maps a linear cost computed with effective weights back to this model's units.
    pub fn from_linear<T: Scalar>(self, d: T) -> T {
        match self {
            CostModel::Linear => d,
            CostModel::Squared => d * d,
        }
    }

    /// Inverse of [`CostModel::from_linear`].
    pub fn to_linear<T: Scalar>(self, d: T) -> T {
        match self {
            CostModel::Linear => d,
            CostModel::Squared => d.max(T::zero()).sqrt(),
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostModel::Linear => "linear",
            CostModel::Squared => "squared",
        })
    }
}

impl FromStr for CostModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(CostModel::Linear),
            "squared" => Ok(CostModel::Squared),
            other => Err(format!("unknown cost model `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub x_left: T,
    pub x_right: T,
    pub y: T,
}

/// Contiguous sequence of horizontal segments. Every segment but the last is
/// half-open on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<T> {
    segments: Vec<Segment<T>>,
}

impl<T: Scalar> StepFunction<T> {
    pub fn new(segments: Vec<Segment<T>>) -> Result<Self, FitError> {
        if segments.is_empty() {
            return Err(FitError::InvalidStepFunction("no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.x_left.is_finite() && s.x_right.is_finite() && s.y.is_finite()) {
                return Err(FitError::InvalidStepFunction(format!(
                    "segment {i} is not finite"
                )));
            }
            if s.x_left > s.x_right {
                return Err(FitError::InvalidStepFunction(format!(
                    "segment {i} has x_left > x_right"
                )));
            }
        }
        for (i, pair) in segments.windows(2).enumerate() {
            if pair[0].x_right != pair[1].x_left {
                return Err(FitError::InvalidStepFunction(format!(
                    "segments {i} and {} are not contiguous",
                    i + 1
                )));
            }
        }
        Ok(StepFunction { segments })
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn k(&self) -> usize {
        self.segments.len()
    }

    pub fn domain(&self) -> (T, T) {
        (
            self.segments[0].x_left,
            self.segments[self.segments.len() - 1].x_right,
        )
    }

    /// Index of the segment whose interval contains `x`.
    pub fn segment_index(&self, x: T) -> Option<usize> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = self.segments.partition_point(|s| s.x_right <= x);
        Some(i.min(self.segments.len() - 1))
    }

    pub fn eval(&self, x: T) -> Result<T, FitError> {
        self.segment_index(x)
            .map(|i| self.segments[i].y)
            .ok_or_else(|| FitError::OutOfDomain(x.to_f64().unwrap_or(f64::NAN)))
    }
}

/// Break positions as prefix counts over the (x, y, id) order: bucket `h`
/// holds ranks `boundaries[h-1]..boundaries[h]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionScheme {
    pub n: usize,
    pub boundaries: Vec<usize>,
}

impl PartitionScheme {
    pub fn new(n: usize, boundaries: Vec<usize>) -> Result<Self, FitError> {
        let mut prev = 0;
        for &b in &boundaries {
            if b < prev || b > n {
                return Err(FitError::InvalidPartition(format!(
                    "boundary {b} out of order"
                )));
            }
            prev = b;
        }
        Ok(PartitionScheme { n, boundaries })
    }

    pub fn k(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// Rank range of bucket `h` (0-based).
    pub fn bucket(&self, h: usize) -> std::ops::Range<usize> {
        let start = if h == 0 { 0 } else { self.boundaries[h - 1] };
        let end = if h < self.boundaries.len() {
            self.boundaries[h]
        } else {
            self.n
        };
        start..end
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.k()).map(|h| self.bucket(h).len()).collect()
    }
}

pub fn point_cost<T: Scalar>(p: &WeightedPoint<T>, y: T, model: CostModel) -> T {
    let d = (p.y - y).abs();
    match model {
        CostModel::Linear => p.w * d,
        CostModel::Squared => p.w * d * d,
    }
}

/// Maximum cost over `q` against the segment containing each abscissa; 0 for an empty set.
pub fn set_cost<T: Scalar>(
    q: &[WeightedPoint<T>],
    f: &StepFunction<T>,
    model: CostModel,
) -> Result<T, FitError> {
    let mut best = T::zero();
    for p in q {
        best = fmax(best, point_cost(p, f.eval(p.x)?, model));
    }
    Ok(best)
}

pub fn critical_points<T: Scalar>(
    q: &[WeightedPoint<T>],
    f: &StepFunction<T>,
    model: CostModel,
    tol: T,
) -> Result<Vec<WeightedPoint<T>>, FitError> {
    let d = set_cost(q, f, model)?;
    let floor = d - tol * (T::one() + d);
    let mut out = Vec::new();
    for p in q {
        if point_cost(p, f.eval(p.x)?, model) >= floor {
            out.push(*p);
        }
    }
    Ok(out)
}

/// Heights where the cost curves of `p` and `q` cross, as `(lower, upper)`.
/// Equal weights give a single crossing reported twice; equal ordinates give `y`.
pub fn bisectors<T: Scalar>(
    p: &WeightedPoint<T>,
    q: &WeightedPoint<T>,
    model: CostModel,
) -> (T, T) {
    let wp = model.effective_weight(p.w);
    let wq = model.effective_weight(q.w);
    linear_bisectors(p.y, wp, q.y, wq)
}

pub(crate) fn linear_bisectors<T: Scalar>(yp: T, wp: T, yq: T, wq: T) -> (T, T) {
    if yp == yq {
        return (yp, yp);
    }
    let inner = (wp * yp + wq * yq) / (wp + wq);
    if wp == wq {
        return (inner, inner);
    }
    let outer = (wp * yp - wq * yq) / (wp - wq);
    if inner <= outer {
        (inner, outer)
    } else {
        (outer, inner)
    }
}

/// Checks finiteness, positive weights and unique ids.
pub fn validate_points<T: Scalar>(points: &[WeightedPoint<T>]) -> Result<(), FitError> {
    if points.is_empty() {
        return Err(FitError::Empty);
    }
    for (i, p) in points.iter().enumerate() {
        if !(p.x.is_finite() && p.y.is_finite() && p.w.is_finite()) {
            return Err(FitError::InvalidPoint {
                index: i,
                reason: "non-finite coordinate or weight".into(),
            });
        }
        if p.w <= T::zero() {
            return Err(FitError::InvalidPoint {
                index: i,
                reason: format!("weight {} is not positive", p.w),
            });
        }
    }
    let mut ids: Vec<usize> = points.iter().map(|p| p.id).collect();
    ids.sort_unstable();
    for w in ids.windows(2) {
        if w[0] == w[1] {
            return Err(FitError::DuplicateId(w[0]));
        }
    }
    Ok(())
}

/// Builds a step function over x-sorted abscissae from prefix-count boundaries
/// (`bounds[0] = 0`, `bounds[k] = n`). Empty segments take the height of the
/// nearest nonempty segment to their left unless given one; trailing empty
/// segments always copy the last nonempty one.
pub(crate) fn step_function_from_bounds<T: Scalar>(
    xs: &[T],
    bounds: &[usize],
    heights: &[Option<T>],
) -> StepFunction<T> {
    let n = xs.len();
    let at = |b: usize| -> T {
        if b == 0 {
            xs[0]
        } else if b >= n {
            xs[n - 1]
        } else {
            (xs[b - 1] + xs[b]) * T::half()
        }
    };
    let k = bounds.len() - 1;
    let mut ys: Vec<Option<T>> = heights.to_vec();
    for s in 1..k {
        if ys[s].is_none() {
            ys[s] = ys[s - 1];
        }
    }
    // the last segment is closed, so trailing empty segments still own the last abscissa
    if let Some(last) = (0..k).rev().find(|&s| bounds[s] < bounds[s + 1]) {
        for s in last + 1..k {
            ys[s] = ys[last];
        }
    }
    let first = ys.iter().flatten().next().copied().unwrap_or_else(T::zero);
    let segments = (0..k)
        .map(|s| Segment {
            x_left: at(bounds[s]),
            x_right: at(bounds[s + 1]),
            y: ys[s].unwrap_or(first),
        })
        .collect();
    StepFunction::new(segments).expect("boundaries are ordered")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64, w: f64, id: usize) -> WeightedPoint<f64> {
        WeightedPoint::new(x, y, w, id)
    }

    #[test]
    fn bisector_examples() {
        assert_eq!(
            bisectors(&pt(0., 0., 1., 0), &pt(1., 10., 1., 1), CostModel::Linear),
            (5.0, 5.0)
        );
        let (lo, hi) = bisectors(&pt(0., 0., 1., 0), &pt(1., 10., 3., 1), CostModel::Linear);
        assert!((lo - 7.5).abs() < 1e-12 && (hi - 15.0).abs() < 1e-12);
        // sqrt weights (2, 1): 2|y| = |10 - y| at y = 10/3 and y = -10
        let (lo, hi) = bisectors(&pt(0., 0., 4., 0), &pt(1., 10., 1., 1), CostModel::Squared);
        assert!((lo + 10.0).abs() < 1e-12 && (hi - 10.0 / 3.0).abs() < 1e-12);
        for y in [lo, hi] {
            assert!((4.0 * y * y - (10.0 - y) * (10.0 - y)).abs() < 1e-9);
        }
    }

    #[test]
    fn step_function_lookup() {
        let f = StepFunction::new(vec![
            Segment {
                x_left: 0.0,
                x_right: 1.0,
                y: 1.0,
            },
            Segment {
                x_left: 1.0,
                x_right: 1.0,
                y: 5.0,
            },
            Segment {
                x_left: 1.0,
                x_right: 3.0,
                y: 2.0,
            },
        ])
        .unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 1.0);
        assert_eq!(f.eval(1.0).unwrap(), 2.0);
        assert_eq!(f.eval(3.0).unwrap(), 2.0);
        assert!(f.eval(3.5).is_err());
        assert!(StepFunction::new(vec![
            Segment {
                x_left: 0.0,
                x_right: 1.0,
                y: 1.0
            },
            Segment {
                x_left: 2.0,
                x_right: 3.0,
                y: 1.0
            },
        ])
        .is_err());
    }

    #[test]
    fn costs() {
        let p = pt(0., 3., 2., 0);
        assert_eq!(point_cost(&p, 1.0, CostModel::Linear), 4.0);
        assert_eq!(point_cost(&p, 1.0, CostModel::Squared), 8.0);
        let f = StepFunction::new(vec![Segment {
            x_left: 0.0,
            x_right: 2.0,
            y: 1.0,
        }])
        .unwrap();
        let q = [pt(0., 3., 2., 0), pt(2., 0., 1., 1)];
        assert_eq!(set_cost(&q, &f, CostModel::Linear).unwrap(), 4.0);
        assert_eq!(set_cost(&[], &f, CostModel::Linear).unwrap(), 0.0);
        let crit = critical_points(&q, &f, CostModel::Linear, 1e-9).unwrap();
        assert_eq!(crit.len(), 1);
        assert_eq!(crit[0].id, 0);
    }

    #[test]
    fn validation() {
        assert_eq!(validate_points::<f64>(&[]), Err(FitError::Empty));
        assert!(validate_points(&[pt(0., 0., 0., 0)]).is_err());
        assert!(validate_points(&[pt(0., f64::NAN, 1., 0)]).is_err());
        assert_eq!(
            validate_points(&[pt(0., 0., 1., 3), pt(1., 0., 1., 3)]),
            Err(FitError::DuplicateId(3))
        );
    }
}
