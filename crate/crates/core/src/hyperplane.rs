//! Tangent-line (supporting hyperplane) outer approximation of `log(1 + x)`.
//!
//! Tangents to a concave function lie above it, so the lower envelope
//! `min_l (a_l x + b_l)` majorizes `log(1 + x)`. Between two neighbouring
//! tangent points the gap peaks where the two tangents cross, and that peak
//! depends only on the ratio `(1 + x) / (1 + x_prev)`. Fixing the peak at
//! `epsilon` therefore fixes the ratio, and the tangent points form a
//! geometric sequence in `1 + x`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;

const ROOT_RESIDUAL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;
/// Guard against absurdly small epsilon over wide intervals.
const MAX_PLANES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hyperplane {
    pub z: f64,
    pub a: f64,
    pub b: f64,
}

impl Hyperplane {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * x + self.b
    }
}

/// Tangent to `log(1 + x)` at `z`.
pub fn tangent_at(z: f64) -> Result<Hyperplane> {
    if !(z > -1.0) || !z.is_finite() {
        return Err(Error::InvalidInput(format!("tangent point {z} must exceed -1")));
    }
    let a = 1.0 / (1.0 + z);
    Ok(Hyperplane { z, a, b: z.ln_1p() - a * z })
}

/// Gap `beta - 1` for a relative step `alpha = (x - x_prev) / (1 + x_prev)`,
/// where `beta = ((1 + alpha) / alpha) log(1 + alpha)`.
fn beta_excess(alpha: f64) -> f64 {
    ((1.0 + alpha) * alpha.ln_1p() - alpha) / alpha
}

/// `t - log(1 + t)`, i.e. `beta - log(beta) - 1` at `beta = 1 + t`.
fn excess_error(t: f64) -> f64 {
    t - t.ln_1p()
}

/// Worst gap between `log(1 + x)` and the envelope of the tangents at
/// `x_prev` and `x`; attained where the two tangents intersect.
pub fn pair_error(x_prev: f64, x: f64) -> Result<f64> {
    if !(x_prev > -1.0) {
        return Err(Error::InvalidInput(format!("x_prev {x_prev} must exceed -1")));
    }
    if !(x > x_prev) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("x {x} must exceed x_prev {x_prev}")));
    }
    Ok(excess_error(beta_excess((x - x_prev) / (1.0 + x_prev))).max(0.0))
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `t = beta* - 1` for `beta - log(beta) - 1 = epsilon`, kept in excess form
/// because `beta*` sits very close to one for small epsilon.
fn solve_beta_excess(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let f = |t: f64| excess_error(t) - epsilon;
    let lo = 1e-15;
    let mut hi = 2.0 * epsilon.sqrt() + 2.0 * epsilon;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Solver(format!("cannot bracket beta for epsilon {epsilon}")));
        }
    }
    let t = if f(lo) >= 0.0 { lo } else { bisect(f, lo, hi) };
    let residual = f(t).abs();
    if residual > ROOT_RESIDUAL {
        return Err(Error::Solver(format!("beta residual {residual:e} for epsilon {epsilon}")));
    }
    Ok(t)
}

/// Root `beta* > 1` of `beta - log(beta) - 1 = epsilon`.
pub fn solve_beta(epsilon: f64) -> Result<f64> {
    Ok(1.0 + solve_beta_excess(epsilon)?)
}

fn solve_alpha_excess(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput("beta must exceed 1".into()));
    }
    let f = |a: f64| beta_excess(a) - t;
    // beta_excess(a) ~ a/2 near zero and grows without bound.
    let mut hi = 4.0 * t;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Solver(format!("cannot bracket alpha for beta {}", 1.0 + t)));
        }
    }
    let alpha = bisect(f, 0.0, hi);
    let residual = f(alpha).abs();
    if residual > ROOT_RESIDUAL {
        return Err(Error::Solver(format!("alpha residual {residual:e} for beta {}", 1.0 + t)));
    }
    Ok(alpha)
}

/// Root `alpha* > 0` of `((1 + alpha) / alpha) log(1 + alpha) = beta`.
pub fn solve_alpha(beta: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return Err(Error::InvalidInput("beta must exceed 1".into()));
    }
    solve_alpha_excess(beta - 1.0)
}

/// Relative step `alpha*` whose pair error equals `epsilon`.
pub fn step_ratio(epsilon: f64) -> Result<f64> {
    solve_alpha_excess(solve_beta_excess(epsilon)?)
}

/// Next tangent point: `(1 + alpha*) x_i + alpha*`.
pub fn next_point(x_i: f64, epsilon: f64) -> Result<f64> {
    if !(x_i > -1.0) || !x_i.is_finite() {
        return Err(Error::InvalidInput(format!("x_i {x_i} must exceed -1")));
    }
    let alpha = step_ratio(epsilon)?;
    Ok((1.0 + alpha) * x_i + alpha)
}

/// An ordered family of tangents to `log(1 + x)` with a certified error bound
/// on `[x_min, x_max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperplaneSet {
    pub epsilon: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub points: Vec<f64>,
    pub planes: Vec<Hyperplane>,
}

fn check_interval(x_min: f64, x_max: f64) -> Result<()> {
    if !(x_min > -1.0) {
        return Err(Error::InvalidInput("x_min must exceed -1".into()));
    }
    if !(x_min <= 0.0 && x_max >= 0.0) || !x_max.is_finite() {
        return Err(Error::InvalidInput(format!("interval [{x_min}, {x_max}] must contain 0")));
    }
    if x_min == x_max {
        return Err(Error::DegenerateInterval { x_min, x_max });
    }
    Ok(())
}

impl HyperplaneSet {
    /// Greedy epsilon-optimal partition: start at `x_min` and step by the
    /// largest ratio with error `epsilon` until a point reaches `x_max`. The
    /// final point may overshoot `x_max`.
    pub fn generate(x_min: f64, x_max: f64, epsilon: f64) -> Result<Self> {
        check_interval(x_min, x_max)?;
        let alpha = step_ratio(epsilon)?;
        let mut points = vec![x_min];
        let mut x = x_min;
        while x < x_max {
            x = (1.0 + alpha) * x + alpha;
            points.push(x);
            if points.len() > MAX_PLANES {
                return Err(Error::InvalidInput(format!(
                    "epsilon {epsilon} needs more than {MAX_PLANES} hyperplanes"
                )));
            }
        }
        Self::assemble(x_min, x_max, epsilon, points)
    }

    /// The geometric partition with exactly `count` tangent points running
    /// from `x_min` to `x_max`. Its error is the smallest epsilon for which
    /// [`HyperplaneSet::generate`] stops after `count` points.
    pub fn with_count(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        check_interval(x_min, x_max)?;
        if count < 2 {
            return Err(Error::InvalidInput("at least two hyperplanes are needed to span an interval".into()));
        }
        let log_ratio = (x_max - x_min) / (1.0 + x_min);
        let step = (log_ratio.ln_1p() / (count - 1) as f64).exp();
        let mut points: Vec<f64> = (0..count)
            .map(|i| (1.0 + x_min) * step.powi(i as i32) - 1.0)
            .collect();
        points[0] = x_min;
        points[count - 1] = x_max;
        let epsilon = excess_error(beta_excess(step - 1.0));
        Self::assemble(x_min, x_max, epsilon, points)
    }

    /// Tangents at caller-chosen points. The error bound is computed from the
    /// gaps, including any uncovered stretch at either end of the domain.
    pub fn from_points(x_min: f64, x_max: f64, points: Vec<f64>) -> Result<Self> {
        check_interval(x_min, x_max)?;
        if points.is_empty() {
            return Err(Error::InvalidInput("no tangent points".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("tangent points must be strictly increasing".into()));
        }
        let mut eps: f64 = 0.0;
        for w in points.windows(2) {
            eps = eps.max(pair_error(w[0], w[1])?);
        }
        let first = tangent_at(points[0])?;
        let last = tangent_at(*points.last().unwrap())?;
        if points[0] > x_min {
            eps = eps.max(first.eval(x_min) - x_min.ln_1p());
        }
        if *points.last().unwrap() < x_max {
            eps = eps.max(last.eval(x_max) - x_max.ln_1p());
        }
        Self::assemble(x_min, x_max, eps, points)
    }

    fn assemble(x_min: f64, x_max: f64, epsilon: f64, points: Vec<f64>) -> Result<Self> {
        let planes = points.iter().map(|&z| tangent_at(z)).collect::<Result<Vec<_>>>()?;
        Ok(HyperplaneSet { epsilon, x_min, x_max, points, planes })
    }

    /// Number of hyperplanes `M`.
    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn envelope(&self, x: f64) -> f64 {
        self.planes.iter().map(|h| h.eval(x)).fold(f64::INFINITY, f64::min)
    }

    /// `(min, max)` of `envelope(x) - log(1 + x)` over `n` evenly spaced grid
    /// points spanning the domain.
    pub fn gap_on_grid(&self, n: usize, exec: Execution) -> (f64, f64) {
        let n = n.max(2);
        let h = (self.x_max - self.x_min) / (n - 1) as f64;
        let gaps = exec.map_range(n, |i| {
            let x = if i == n - 1 { self.x_max } else { self.x_min + h * i as f64 };
            self.envelope(x) - x.ln_1p()
        });
        gaps.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| (lo.min(g), hi.max(g)))
    }

    /// `(1 + z_{i+1}) / (1 + z_i)` for consecutive tangent points.
    pub fn ratios(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| (1.0 + w[1]) / (1.0 + w[0])).collect()
    }
}
