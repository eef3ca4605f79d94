//! Scalar root finding, unimodal maximization, grids, and 2-D frontiers.
//!
//! These are the small deterministic search primitives the region code is
//! built on: bisection to a fixed bracket width, golden-section maximization
//! with a coarse pre-scan, and Pareto/convex lower frontiers of point clouds.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A value together with a flag recording whether it was clamped to a
/// boundary of its admissible range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped<T> {
    /// The (possibly clamped) value.
    pub value: T,
    /// True if the raw value fell outside the admissible range.
    pub clamped: bool,
}

impl<T> Clamped<T> {
    /// Wraps a value that needed no clamping.
    pub fn exact(value: T) -> Self {
        Clamped { value, clamped: false }
    }

    /// Wraps a value that was clamped to a boundary.
    pub fn at_boundary(value: T) -> Self {
        Clamped { value, clamped: true }
    }
}

/// Maximum bisection iterations; enough to exhaust an f64 mantissa.
const MAX_BISECT_ITER: usize = 200;

/// Finds a root of `f` on `[lo, hi]` by bisection.
///
/// Stops when the bracket is narrower than `tol` and returns the midpoint.
/// Requires a sign change over the initial bracket; endpoints that are
/// exactly zero are returned immediately.
pub fn scalar_root<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> Result<T> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "bisection bracket [{lo}, {hi}] is not ordered"
        )));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::NoSignChange { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    for _ in 0..MAX_BISECT_ITER {
        if b - a <= tol {
            break;
        }
        let m = (a + b) * T::half();
        let fm = f(m);
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((a + b) * T::half())
}

/// Maximizes `f` on `[lo, hi]` by golden-section search.
///
/// Assumes `f` is unimodal on the bracket (monotone counts: the search then
/// converges to an endpoint). Returns the best `(argument, value)` probed,
/// including the endpoints.
pub fn golden_max<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let mut a = lo;
    let mut b = hi;
    let mut best = (a, f(a));
    let fb_end = f(b);
    if fb_end > best.1 {
        best = (b, fb_end);
    }
    if !(b > a) {
        return best;
    }
    let mut x1 = b - (b - a) * inv_phi;
    let mut x2 = a + (b - a) * inv_phi;
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..MAX_BISECT_ITER {
        if b - a <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * inv_phi;
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * inv_phi;
            f2 = f(x2);
        }
    }
    if f1 > best.1 {
        best = (x1, f1);
    }
    if f2 > best.1 {
        best = (x2, f2);
    }
    best
}

/// Number of pre-scan samples used by [`scalar_max`].
const PRESCAN_POINTS: usize = 64;

/// Maximizes a unimodal `f` on `[lo, hi]`.
///
/// A 64-point uniform pre-scan locates the best sample and rejects grossly
/// non-unimodal objectives (two separated interior peaks with a clear dip
/// between them) with [`Error::NotUnimodal`]. Golden-section search then
/// refines inside the bracketing pair of samples down to width `tol`.
pub fn scalar_max<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> Result<(T, T)> {
    if !(lo <= hi) {
        return Err(Error::InvalidArgument(format!(
            "maximization bracket [{lo}, {hi}] is not ordered"
        )));
    }
    let xs = linspace(lo, hi, PRESCAN_POINTS);
    let vs: Vec<T> = xs.iter().map(|&x| f(x)).collect();

    let scale = vs
        .iter()
        .fold(T::one(), |acc, v| if v.abs() > acc { v.abs() } else { acc });
    let dip_tol = T::lit(1e-9) * scale;
    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..PRESCAN_POINTS - 1 {
        if vs[i] > vs[i - 1] && vs[i] > vs[i + 1] {
            peaks.push(i);
        }
    }
    for w in peaks.windows(2) {
        let (p, q) = (w[0], w[1]);
        let valley = vs[p + 1..q].iter().fold(vs[p], |m, &v| if v < m { v } else { m });
        let lower_peak = if vs[p] < vs[q] { vs[p] } else { vs[q] };
        if valley < lower_peak - dip_tol {
            return Err(Error::NotUnimodal);
        }
    }

    let mut i_best = 0;
    for (i, v) in vs.iter().enumerate() {
        if *v > vs[i_best] {
            i_best = i;
        }
    }
    let a = xs[i_best.saturating_sub(1)];
    let b = xs[(i_best + 1).min(PRESCAN_POINTS - 1)];
    let refined = golden_max(&f, a, b, tol);
    Ok(if vs[i_best] > refined.1 { (xs[i_best], vs[i_best]) } else { refined })
}

/// Evaluates `f` over `grid`, then golden-refines around the `top_k` best
/// samples (bracket = previous to next grid neighbor). Returns the overall
/// best `(argument, value)`.
///
/// This is the workhorse for piecewise-smooth margins whose single ridge is
/// too narrow for one golden pass over the full range.
pub fn grid_refine_max<T: Real>(
    f: impl Fn(T) -> T,
    grid: &[T],
    top_k: usize,
    tol: T,
) -> Result<(T, T)> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("grid_refine_max needs a nonempty grid".into()));
    }
    let vs: Vec<T> = grid.iter().map(|&x| f(x)).collect();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| vs[j].partial_cmp(&vs[i]).unwrap_or(std::cmp::Ordering::Equal));

    let mut best = (grid[order[0]], vs[order[0]]);
    for &i in order.iter().take(top_k.max(1)) {
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(grid.len() - 1)];
        let (x, v) = golden_max(&f, a, b, tol);
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n <= 1 {
        return vec![lo];
    }
    let step = (hi - lo) / T::lit((n - 1) as f64);
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * T::lit(i as f64) })
        .collect()
}

/// `n` geometrically spaced points from `lo` to `hi` inclusive (both > 0).
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(|x| x.exp()).collect()
}

/// Points of the segment from `a` to `b`, sampled at `n` mixture weights.
pub fn mixtures<T: Real>(a: (T, T), b: (T, T), n: usize) -> Vec<(T, T)> {
    linspace(T::zero(), T::one(), n)
        .into_iter()
        .map(|w| {
            let u = T::one() - w;
            (u * a.0 + w * b.0, u * a.1 + w * b.1)
        })
        .collect()
}

/// Relative tolerance used to drop collinear points during convexification.
const COLLINEAR_TOL: f64 = 1e-12;

/// Lower-left frontier of a 2-D point cloud.
///
/// With `convexify == false`, returns the Pareto-minimal staircase (sorted by
/// the first coordinate, strictly decreasing in the second). With
/// `convexify == true`, returns the lower-left convex hull of that staircase,
/// dropping collinear interior points at relative tolerance 1e-12.
pub fn lower_frontier_2d<T: Real>(points: &[(T, T)], convexify: bool) -> Result<Vec<(T, T)>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("lower_frontier_2d needs at least one point".into()));
    }
    let mut pts: Vec<(T, T)> = points.to_vec();
    pts.sort_by(|p, q| {
        p.0.partial_cmp(&q.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(p.1.partial_cmp(&q.1).unwrap_or(std::cmp::Ordering::Equal))
    });

    let mut stair: Vec<(T, T)> = Vec::new();
    for p in pts {
        if let Some(last) = stair.last() {
            if p.0 == last.0 || p.1 >= last.1 {
                continue;
            }
        }
        stair.push(p);
    }

    if !convexify {
        return Ok(stair);
    }

    let mut hull: Vec<(T, T)> = Vec::new();
    for p in stair {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            let scale = ((a.0 - o.0).abs() + (p.0 - o.0).abs())
                * ((a.1 - o.1).abs() + (p.1 - o.1).abs())
                + T::one();
            if cross <= T::lit(COLLINEAR_TOL) * scale {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(hull)
}
