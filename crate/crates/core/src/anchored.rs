//! Step fitting with the first and/or last step pinned to a given height.

use crate::engine::units::Units;
use crate::engine::{doubly_cost, lift};
use crate::error::FitError;
use crate::geom::{point_cost, set_cost, validate_points, CostModel, StepFunction, WeightedPoint};
use crate::kstep::solve_certified;
use crate::scalar::{fmax, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorSpec<T> {
    Left(T),
    Right(T),
    Both(T, T),
}

/// Split between a left step at `a` and a right step at `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSolution<T> {
    /// Number of points on the left side.
    pub boundary: usize,
    /// Split abscissa: points with `x < x_bar` are on the left. Infinite when
    /// one side is empty.
    pub x_bar: T,
    pub cost: T,
    pub left_cost: T,
    pub right_cost: T,
}

/// `(g, h)` at the split `x`: the cost of the points left of `x` against `a`
/// and of the rest against `b`.
pub fn eval_g_h<T: Scalar>(p: &[WeightedPoint<T>], x: T, a: T, b: T, model: CostModel) -> (T, T) {
    p.iter().fold((T::zero(), T::zero()), |(g, h), q| {
        if q.x < x {
            (fmax(g, point_cost(q, a, model)), h)
        } else {
            (g, fmax(h, point_cost(q, b, model)))
        }
    })
}

fn check_anchor<T: Scalar>(v: T) -> Result<(), FitError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(FitError::InvalidAnchor(v.to_f64().unwrap_or(f64::NAN)))
    }
}

/// Optimal two-step split with fixed heights. Either side may be empty. Among
/// optimal splits, `maximal_left` picks the one with the most points on the
/// left, otherwise the one with the fewest. Points sharing an x stay together.
pub fn doubly_anchored_two_step<T: Scalar>(
    p: &[WeightedPoint<T>],
    a: T,
    b: T,
    model: CostModel,
    maximal_left: bool,
) -> Result<SplitSolution<T>, FitError> {
    validate_points(p)?;
    check_anchor(a)?;
    check_anchor(b)?;
    let (pts, _) = lift(p, model);
    let d = model.from_linear(doubly_cost(&Units::build(&pts), a, b, false));
    let tol = T::solver_tol() * T::lit(16.0);
    let thr = d + tol * (T::one() + d);
    // the split sits just before the first point too costly at `a`, or just
    // after the last point too costly at `b`
    let cut = if maximal_left {
        p.iter()
            .filter(|q| point_cost(q, a, model) > thr)
            .map(|q| q.x)
            .reduce(T::min)
    } else {
        let xr = p
            .iter()
            .filter(|q| point_cost(q, b, model) > thr)
            .map(|q| q.x)
            .reduce(T::max);
        match xr {
            // nothing has to go left
            None => p.iter().map(|q| q.x).reduce(T::min),
            Some(xr) => p.iter().map(|q| q.x).filter(|&x| x > xr).reduce(T::min),
        }
    };
    let (boundary, x_bar) = match cut {
        None => (p.len(), T::infinity()),
        Some(c) => {
            let below = p.iter().map(|q| q.x).filter(|&x| x < c).reduce(T::max);
            match below {
                None => (0, T::neg_infinity()),
                Some(lo) => (p.iter().filter(|q| q.x < c).count(), (lo + c) * T::half()),
            }
        }
    };
    let (left_cost, right_cost) = eval_g_h(p, cut.unwrap_or(T::infinity()), a, b, model);
    Ok(SplitSolution {
        boundary,
        x_bar,
        cost: fmax(left_cost, right_cost),
        left_cost,
        right_cost,
    })
}

/// Optimal two-step function whose first step is at height `a`.
pub fn left_anchored_two_step<T: Scalar>(
    p: &[WeightedPoint<T>],
    a: T,
    model: CostModel,
) -> Result<(StepFunction<T>, T), FitError> {
    anchored_j_step(p, AnchorSpec::Left(a), 2, model)
}

/// Optimal two-step function whose last step is at height `b`.
pub fn right_anchored_two_step<T: Scalar>(
    p: &[WeightedPoint<T>],
    b: T,
    model: CostModel,
) -> Result<(StepFunction<T>, T), FitError> {
    anchored_j_step(p, AnchorSpec::Right(b), 2, model)
}

/// Optimal `j`-step function with pinned end heights. A pinned step always
/// covers at least one point.
pub fn anchored_j_step<T: Scalar>(
    p: &[WeightedPoint<T>],
    anchor: AnchorSpec<T>,
    j: usize,
    model: CostModel,
) -> Result<(StepFunction<T>, T), FitError> {
    validate_points(p)?;
    if j == 0 {
        return Err(FitError::InvalidK);
    }
    let (left, right) = match anchor {
        AnchorSpec::Left(a) => (Some(a), None),
        AnchorSpec::Right(b) => (None, Some(b)),
        AnchorSpec::Both(a, b) => (Some(a), Some(b)),
    };
    for v in left.iter().chain(right.iter()) {
        check_anchor(*v)?;
    }
    if let (Some(a), Some(b)) = (left, right) {
        let distinct = p.iter().any(|q| q.x != p[0].x);
        if (j == 1 && a != b) || (j > 1 && !distinct) {
            return Err(FitError::InvalidAnchor(b.to_f64().unwrap_or(f64::NAN)));
        }
    }
    let (fit, _, _) = solve_certified(p, j, left, right, model);
    let cost = set_cost(p, &fit, model)?;
    Ok((fit, cost))
}
