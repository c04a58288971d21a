use serde::Serialize;

use crate::error::{Error, Result};

/// A dense linear program in "maximize" form:
///
/// ```text
/// maximize    c'x
/// subject to  A_eq x  = b_eq
///             A_ub x <= b_ub
///             lower <= x <= upper
/// ```
///
/// Infinite bounds are expressed with `f64::INFINITY` / `f64::NEG_INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub names: Option<Vec<String>>,
}

impl LpProblem {
    /// `num_vars` variables, zero objective, all variables `>= 0`.
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            objective: vec![0.0; num_vars],
            a_eq: Vec::new(),
            b_eq: Vec::new(),
            a_ub: Vec::new(),
            b_ub: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            names: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.a_eq.len() + self.a_ub.len()
    }

    pub fn with_objective(mut self, c: Vec<f64>) -> Self {
        self.objective = c;
        self
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.a_eq.push(row);
        self.b_eq.push(rhs);
    }

    pub fn add_ub(&mut self, row: Vec<f64>, rhs: f64) {
        self.a_ub.push(row);
        self.b_ub.push(rhs);
    }

    /// Adds `row · x >= rhs` as `-row · x <= -rhs`.
    pub fn add_lb(&mut self, row: Vec<f64>, rhs: f64) {
        self.add_ub(row.into_iter().map(|v| -v).collect(), -rhs);
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_free(&mut self, var: usize) {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY);
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.num_vars();
        if self.lower.len() != q || self.upper.len() != q {
            return Err(Error::Dimension(format!(
                "{} variables but {} lower / {} upper bounds",
                q,
                self.lower.len(),
                self.upper.len()
            )));
        }
        if let Some(names) = &self.names {
            if names.len() != q {
                return Err(Error::Dimension(format!("{} names for {} variables", names.len(), q)));
            }
        }
        if self.a_eq.len() != self.b_eq.len() || self.a_ub.len() != self.b_ub.len() {
            return Err(Error::Dimension("row count differs from rhs length".into()));
        }
        for (kind, rows) in [("equality", &self.a_eq), ("inequality", &self.a_ub)] {
            for (i, row) in rows.iter().enumerate() {
                if row.len() != q {
                    return Err(Error::Dimension(format!(
                        "{kind} row {i} has {} coefficients, expected {q}",
                        row.len()
                    )));
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput(format!("{kind} row {i} has a non-finite coefficient")));
                }
            }
        }
        if self
            .objective
            .iter()
            .chain(&self.b_eq)
            .chain(&self.b_ub)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidInput("non-finite objective or right-hand side".into()));
        }
        for j in 0..q {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::InvalidInput(format!("variable {j} has bounds [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation of any constraint or bound at `x` (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, b) in self.a_eq.iter().zip(&self.b_eq) {
            worst = worst.max((dot(row, x) - b).abs());
        }
        for (row, b) in self.a_ub.iter().zip(&self.b_ub) {
            worst = worst.max(dot(row, x) - b);
        }
        for ((&xi, &lo), &hi) in x.iter().zip(&self.lower).zip(&self.upper) {
            worst = worst.max(lo - xi).max(xi - hi);
        }
        worst
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; meaningful only when `status == Optimal`.
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}
