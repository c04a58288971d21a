//! Dense two-phase tableau simplex.
//!
//! The problem is first rewritten over nonnegative columns `y` (shifted,
//! mirrored or split variables), rows are sign-normalized so every
//! right-hand side is nonnegative, and `<=` rows start with their slack in
//! the basis. Only `>=` and `=` rows receive an artificial column.

use crate::exec::Execution;
use crate::lp::problem::{LpProblem, LpSolution, LpStatus};
use crate::error::Result;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-12;
/// Below this many tableau entries a pivot stays on the calling thread.
const PARALLEL_MIN_ENTRIES: usize = 60_000;
/// Consecutive degenerate pivots before Dantzig pricing hands over to Bland.
const DEGENERATE_STREAK: usize = 25;

/// Entering-column rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pricing {
    /// Lowest-index improving column. Never cycles.
    Bland,
    /// Most negative reduced cost; falls back to Bland during long runs of
    /// degenerate pivots so it still cannot cycle.
    Dantzig,
}

/// Solver seam: anything that can solve an [`LpProblem`] under the same
/// contract as the built-in simplex.
pub trait LpSolver: Sync {
    fn solve(&self, problem: &LpProblem) -> Result<LpSolution>;
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexSolver {
    /// Defaults to `50 * (variables + rows)` when `None`.
    pub max_iterations: Option<usize>,
    pub pricing: Pricing,
    pub execution: Execution,
}

impl Default for SimplexSolver {
    fn default() -> Self {
        SimplexSolver {
            max_iterations: None,
            pricing: Pricing::Bland,
            execution: Execution::default(),
        }
    }
}

impl SimplexSolver {
    pub fn dantzig() -> Self {
        SimplexSolver {
            pricing: Pricing::Dantzig,
            ..Default::default()
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

impl LpSolver for SimplexSolver {
    fn solve(&self, problem: &LpProblem) -> Result<LpSolution> {
        problem.validate()?;
        let cap = self
            .max_iterations
            .unwrap_or(50 * (problem.num_vars() + problem.num_rows()).max(1));
        let std = StandardForm::build(problem);
        let mut tab = Tableau::phase_one(&std, self.execution);
        let mut iterations = 0;

        match tab.optimize(self.pricing, cap, &mut iterations) {
            Outcome::Optimal => {}
            // The phase-one objective is bounded above by zero.
            Outcome::Unbounded => unreachable!("phase one cannot be unbounded"),
            Outcome::IterationLimit => return Ok(failed(LpStatus::IterationLimit, problem, iterations)),
        }
        let scale = 1.0 + std.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if tab.objective_value() < -1e-9 * scale {
            return Ok(failed(LpStatus::Infeasible, problem, iterations));
        }
        tab.drive_out_artificials(std.num_real);
        let mut tab = tab.phase_two(&std);
        let status = match tab.optimize(self.pricing, cap, &mut iterations) {
            Outcome::Optimal => LpStatus::Optimal,
            Outcome::Unbounded => LpStatus::Unbounded,
            Outcome::IterationLimit => LpStatus::IterationLimit,
        };
        if status != LpStatus::Optimal {
            return Ok(failed(status, problem, iterations));
        }
        let y = tab.primal(std.num_y);
        let x = std.recover(&y);
        Ok(LpSolution {
            status,
            objective_value: problem.objective_at(&x),
            x,
            iterations,
        })
    }
}

fn failed(status: LpStatus, problem: &LpProblem, iterations: usize) -> LpSolution {
    LpSolution {
        status,
        x: vec![f64::NAN; problem.num_vars()],
        objective_value: match status {
            LpStatus::Unbounded => f64::INFINITY,
            LpStatus::Infeasible => f64::NEG_INFINITY,
            _ => f64::NAN,
        },
        iterations,
    }
}

/// Solves with the default simplex configuration.
pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    SimplexSolver::default().solve(problem)
}

/// Phase one only: is the feasible set nonempty?
pub fn check_feasibility(problem: &LpProblem) -> Result<bool> {
    let zero = problem.clone().with_objective(vec![0.0; problem.num_vars()]);
    let sol = SimplexSolver::default().solve(&zero)?;
    Ok(sol.status != LpStatus::Infeasible)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RowKind {
    Le,
    Ge,
    Eq,
}

/// `x_j = offset_j + sum(sign * y_col)`.
#[derive(Debug, Clone)]
struct VarMap {
    offset: f64,
    cols: Vec<(usize, f64)>,
}

struct StandardForm {
    num_y: usize,
    /// Columns that are not artificial: `y` plus slacks.
    num_real: usize,
    rows: Vec<Vec<f64>>,
    kinds: Vec<RowKind>,
    rhs: Vec<f64>,
    cost_y: Vec<f64>,
    vars: Vec<VarMap>,
}

impl StandardForm {
    fn build(p: &LpProblem) -> Self {
        let mut vars = Vec::with_capacity(p.num_vars());
        let mut num_y = 0;
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();
        for j in 0..p.num_vars() {
            let (lo, hi) = (p.lower[j], p.upper[j]);
            let map = if lo.is_finite() {
                if hi.is_finite() {
                    bound_rows.push((num_y, hi - lo));
                }
                VarMap { offset: lo, cols: vec![(num_y, 1.0)] }
            } else if hi.is_finite() {
                VarMap { offset: hi, cols: vec![(num_y, -1.0)] }
            } else {
                let m = VarMap { offset: 0.0, cols: vec![(num_y, 1.0), (num_y + 1, -1.0)] };
                num_y += 1;
                m
            };
            num_y += 1;
            vars.push(map);
        }

        let mut cost_y = vec![0.0; num_y];
        for (c, v) in p.objective.iter().zip(&vars) {
            for &(col, s) in &v.cols {
                cost_y[col] += c * s;
            }
        }

        let transform = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
            let mut out = vec![0.0; num_y];
            let mut b = rhs;
            for (a, v) in row.iter().zip(&vars) {
                if *a == 0.0 {
                    continue;
                }
                b -= a * v.offset;
                for &(col, s) in &v.cols {
                    out[col] += a * s;
                }
            }
            (out, b)
        };

        let mut rows = Vec::new();
        let mut kinds = Vec::new();
        let mut rhs = Vec::new();
        let mut push = |row: Vec<f64>, b: f64, kind: RowKind| {
            if b < 0.0 {
                rows.push(row.into_iter().map(|v| -v).collect());
                rhs.push(-b);
                kinds.push(match kind {
                    RowKind::Le => RowKind::Ge,
                    RowKind::Ge => RowKind::Le,
                    RowKind::Eq => RowKind::Eq,
                });
            } else {
                rows.push(row);
                rhs.push(b);
                kinds.push(kind);
            }
        };
        for (row, &b) in p.a_eq.iter().zip(&p.b_eq) {
            let (r, b) = transform(row, b);
            push(r, b, RowKind::Eq);
        }
        for (row, &b) in p.a_ub.iter().zip(&p.b_ub) {
            let (r, b) = transform(row, b);
            push(r, b, RowKind::Le);
        }
        for (col, width) in bound_rows {
            let mut r = vec![0.0; num_y];
            r[col] = 1.0;
            push(r, width, RowKind::Le);
        }

        let num_slack = kinds.iter().filter(|k| **k != RowKind::Eq).count();
        StandardForm {
            num_y,
            num_real: num_y + num_slack,
            rows,
            kinds,
            rhs,
            cost_y,
            vars,
        }
    }

    fn recover(&self, y: &[f64]) -> Vec<f64> {
        self.vars
            .iter()
            .map(|v| v.offset + v.cols.iter().map(|&(c, s)| s * y[c]).sum::<f64>())
            .collect()
    }
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Tableau {
    /// Row-major, `(rows + 1) x width`; the last row holds reduced costs
    /// `z_j - c_j` and, in its last cell, the current objective value.
    data: Vec<f64>,
    rows: usize,
    width: usize,
    basis: Vec<usize>,
    /// Columns at or beyond this index may never enter.
    enter_limit: usize,
    execution: Execution,
}

impl Tableau {
    fn phase_one(std: &StandardForm, execution: Execution) -> Self {
        let rows = std.rows.len();
        let num_art = std.kinds.iter().filter(|k| **k != RowKind::Le).count();
        let cols = std.num_real + num_art;
        let width = cols + 1;
        let mut data = vec![0.0; (rows + 1) * width];
        let mut basis = vec![0; rows];
        let mut slack = std.num_y;
        let mut art = std.num_real;
        for i in 0..rows {
            let row = &mut data[i * width..(i + 1) * width];
            row[..std.num_y].copy_from_slice(&std.rows[i]);
            row[cols] = std.rhs[i];
            match std.kinds[i] {
                RowKind::Le => {
                    row[slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                RowKind::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                RowKind::Eq => {
                    row[art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        // maximize -sum(artificials): reduced costs d_j = -sum_{artificial rows} a_ij for
        // non-artificial columns, zero for the artificials themselves.
        let obj = rows * width;
        for i in 0..rows {
            if basis[i] >= std.num_real {
                for j in 0..std.num_real {
                    data[obj + j] -= data[i * width + j];
                }
                data[obj + cols] -= data[i * width + cols];
            }
        }
        Tableau {
            data,
            rows,
            width,
            basis,
            enter_limit: std.num_real,
            execution,
        }
    }

    fn phase_two(&self, std: &StandardForm) -> Tableau {
        let cols = std.num_real;
        let width = cols + 1;
        let rows = self.rows;
        let mut data = vec![0.0; (rows + 1) * width];
        for i in 0..rows {
            let src = &self.data[i * self.width..(i + 1) * self.width];
            let dst = &mut data[i * width..(i + 1) * width];
            dst[..cols].copy_from_slice(&src[..cols]);
            dst[cols] = src[self.width - 1];
        }
        let cost = |j: usize| if j < std.num_y { std.cost_y[j] } else { 0.0 };
        let obj = rows * width;
        for j in 0..cols {
            data[obj + j] = -cost(j);
        }
        for i in 0..rows {
            let cb = cost(self.basis[i]);
            if cb != 0.0 {
                for j in 0..width {
                    data[obj + j] += cb * data[i * width + j];
                }
            }
        }
        Tableau {
            data,
            rows,
            width,
            basis: self.basis.clone(),
            enter_limit: cols,
            execution: self.execution,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn objective_value(&self) -> f64 {
        self.at(self.rows, self.width - 1)
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut y = vec![0.0; n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                y[b] = self.at(i, self.width - 1).max(0.0);
            }
        }
        y
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let obj = &self.data[self.rows * self.width..self.rows * self.width + self.enter_limit];
        if bland {
            obj.iter().position(|&d| d < -COST_TOL)
        } else {
            let mut best = None;
            let mut best_d = -COST_TOL;
            for (j, &d) in obj.iter().enumerate() {
                if d < best_d {
                    best_d = d;
                    best = Some(j);
                }
            }
            best
        }
    }

    /// Minimum-ratio row; ties go to the lowest basic variable index.
    fn leaving(&self, e: usize) -> Option<(usize, f64)> {
        let rhs = self.width - 1;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, e);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.at(i, rhs).max(0.0) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - RATIO_TIE || (ratio <= br + RATIO_TIE && self.basis[i] < self.basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let width = self.width;
        let inv = 1.0 / self.at(r, e);
        {
            let row = &mut self.data[r * width..(r + 1) * width];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[e] = 1.0;
        }
        let prow: Vec<f64> = self.data[r * width..(r + 1) * width].to_vec();
        let nz: Vec<usize> = (0..width).filter(|&j| prow[j] != 0.0).collect();
        let exec = if self.data.len() >= PARALLEL_MIN_ENTRIES {
            self.execution
        } else {
            Execution::Sequential
        };
        exec.for_each_row(&mut self.data, width, |i, row| {
            if i == r {
                return;
            }
            let f = row[e];
            if f == 0.0 {
                return;
            }
            for &j in &nz {
                row[j] -= f * prow[j];
            }
            row[e] = 0.0;
        });
        self.basis[r] = e;
    }

    fn optimize(&mut self, pricing: Pricing, cap: usize, iterations: &mut usize) -> Outcome {
        let mut degenerate_run = 0;
        loop {
            let bland = pricing == Pricing::Bland || degenerate_run >= DEGENERATE_STREAK;
            let Some(e) = self.entering(bland) else {
                return Outcome::Optimal;
            };
            let Some((r, ratio)) = self.leaving(e) else {
                return Outcome::Unbounded;
            };
            if *iterations >= cap {
                return Outcome::IterationLimit;
            }
            self.pivot(r, e);
            *iterations += 1;
            if ratio <= RATIO_TIE {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
        }
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are linearly redundant and get dropped.
    fn drive_out_artificials(&mut self, num_real: usize) {
        let mut i = 0;
        while i < self.rows {
            if self.basis[i] < num_real {
                i += 1;
                continue;
            }
            let mut best = None;
            let mut best_abs = PIVOT_TOL;
            for j in 0..num_real {
                let a = self.at(i, j).abs();
                if a > best_abs {
                    best_abs = a;
                    best = Some(j);
                }
            }
            match best {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => self.remove_row(i),
            }
        }
    }

    fn remove_row(&mut self, i: usize) {
        let w = self.width;
        self.data.drain(i * w..(i + 1) * w);
        self.basis.remove(i);
        self.rows -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp2() -> LpProblem {
        LpProblem::new(2).with_objective(vec![1.0, 1.0])
    }

    #[test]
    fn textbook_box() {
        let mut p = lp2();
        p.add_ub(vec![1.0, 1.0], 1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        let p = LpProblem::new(1).with_objective(vec![1.0]);
        assert_eq!(solve(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_bounds_row() {
        let mut p = LpProblem::new(1).with_objective(vec![1.0]);
        p.add_ub(vec![1.0], -1.0);
        assert_eq!(solve(&p).unwrap().status, LpStatus::Infeasible);
        assert!(!check_feasibility(&p).unwrap());
    }

    #[test]
    fn equality_ge_and_free_variables() {
        // max x - y  s.t. x + y = 2, x >= 0.5, y free, x <= 3
        let mut p = LpProblem::new(2).with_objective(vec![1.0, -1.0]);
        p.add_eq(vec![1.0, 1.0], 2.0);
        p.set_bounds(0, 0.5, 3.0);
        p.set_free(1);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 3.0).abs() < 1e-12 && (s.x[1] + 1.0).abs() < 1e-12);
        assert!((s.objective_value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn upper_only_bound() {
        // x <= -2 as a bound, x >= -5 as a row
        let mut p = LpProblem::new(1).with_objective(vec![-1.0]);
        p.set_bounds(0, f64::NEG_INFINITY, -2.0);
        p.add_lb(vec![1.0], -5.0);
        let s = solve(&p).unwrap();
        assert!((s.x[0] + 5.0).abs() < 1e-12);
        let s = solve(&p.clone().with_objective(vec![1.0])).unwrap();
        assert!((s.x[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut p = LpProblem::new(2).with_objective(vec![1.0, 2.0]);
        p.add_eq(vec![1.0, 1.0], 1.0);
        p.add_eq(vec![2.0, 2.0], 2.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn iteration_cap_reports_status() {
        let mut p = lp2();
        p.add_ub(vec![1.0, 2.0], 4.0);
        p.add_ub(vec![3.0, 1.0], 6.0);
        let s = SimplexSolver { max_iterations: Some(0), ..Default::default() }
            .solve(&p)
            .unwrap();
        assert_eq!(s.status, LpStatus::IterationLimit);
    }

    #[test]
    fn pricing_rules_agree() {
        let mut p = LpProblem::new(3).with_objective(vec![3.0, 2.0, 4.0]);
        p.add_ub(vec![1.0, 1.0, 2.0], 4.0);
        p.add_ub(vec![2.0, 0.0, 3.0], 5.0);
        p.add_ub(vec![2.0, 1.0, 3.0], 7.0);
        let a = SimplexSolver::dantzig().solve(&p).unwrap();
        let b = SimplexSolver::default().solve(&p).unwrap();
        assert!((a.objective_value - b.objective_value).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_dimensions() {
        let mut p = lp2();
        p.add_ub(vec![1.0], 1.0);
        assert!(solve(&p).is_err());
    }
}
