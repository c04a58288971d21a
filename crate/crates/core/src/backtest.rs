//! Constant-mix account simulation with proportional costs, and the
//! performance metrics reported for a run.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::scenarios::{check_costs, fee_adjust};
use crate::weights::Weights;

/// Account values `V(0..=N)` and realized per-period returns.
///
/// A ruined run stops at the first non-positive value, which is kept as the
/// last entry of `v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub v: Vec<f64>,
    pub period_returns: Vec<f64>,
    pub ruined: bool,
}

impl Trajectory {
    /// Builds a trajectory from account values alone.
    pub fn from_values(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || !(v[0] > 0.0) {
            return Err(Error::InvalidInput("initial account value must be positive".into()));
        }
        let mut period_returns = Vec::with_capacity(v.len() - 1);
        let mut ruined = false;
        for (k, w) in v.windows(2).enumerate() {
            if ruined {
                return Err(Error::InvalidInput(format!("account value continues after ruin at period {k}")));
            }
            period_returns.push((w[1] - w[0]) / w[0]);
            ruined = w[1] <= 0.0;
        }
        Ok(Trajectory { v, period_returns, ruined })
    }

    pub fn periods(&self) -> usize {
        self.period_returns.len()
    }

    pub fn initial(&self) -> f64 {
        self.v[0]
    }

    pub fn terminal(&self) -> f64 {
        *self.v.last().expect("trajectory has an initial value")
    }

    /// `k,V,Rp` rows; the final row has an empty return.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,V,Rp\n");
        for (k, v) in self.v.iter().enumerate() {
            let r = self
                .period_returns
                .get(k)
                .map(|r| crate::output::format_number(*r))
                .unwrap_or_default();
            out.push_str(&format!("{k},{},{r}\n", crate::output::format_number(*v)));
        }
        out
    }
}

/// Simulates `V(k+1) = V(k) (1 + K'x~(k))` where `x~` is the cost-adjusted
/// return of each period.
pub fn run(path: &[Vec<f64>], weights: &Weights, costs: &[f64], v0: f64) -> Result<Trajectory> {
    if !(v0 > 0.0) || !v0.is_finite() {
        return Err(Error::InvalidInput(format!("initial wealth {v0} must be positive")));
    }
    let n = weights.len();
    check_costs(costs, n)?;
    let mut v = Vec::with_capacity(path.len() + 1);
    let mut period_returns = Vec::with_capacity(path.len());
    v.push(v0);
    let mut value = v0;
    for (k, x) in path.iter().enumerate() {
        if x.len() != n {
            return Err(Error::Dimension(format!("period {k} has {} returns for {n} weights", x.len())));
        }
        let r = weights.portfolio_return(&fee_adjust(x, costs, &weights.k));
        value *= 1.0 + r;
        v.push(value);
        period_returns.push(r);
        if value <= 0.0 {
            return Ok(Trajectory { v, period_returns, ruined: true });
        }
    }
    Ok(Trajectory { v, period_returns, ruined: false })
}

/// Largest peak-to-trough loss as a fraction of the peak. Ruined runs
/// report 1.
pub fn max_drawdown(traj: &Trajectory) -> f64 {
    if traj.ruined {
        return 1.0;
    }
    let mut peak = f64::NEG_INFINITY;
    let mut worst: f64 = 0.0;
    for &v in &traj.v {
        peak = peak.max(v);
        worst = worst.max((peak - v) / peak);
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    pub avg_excess_return: f64,
    pub std_excess: f64,
    /// `sqrt(N) * mean / std`; `None` when the excess returns have no spread.
    #[serde(rename = "sharpe_N")]
    pub sharpe_n: Option<f64>,
    pub cumulative_return: f64,
    /// `None` for ruined runs.
    pub log_growth: Option<f64>,
    pub max_drawdown: f64,
    pub terminal_value: f64,
    pub periods: usize,
    pub ruined: bool,
}

pub fn report(traj: &Trajectory, risk_free: f64) -> Result<BacktestReport> {
    let n = traj.periods();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 periods to report, got {n}")));
    }
    let excess: Vec<f64> = traj.period_returns.iter().map(|r| r - risk_free).collect();
    let mean = excess.iter().sum::<f64>() / n as f64;
    let var = excess.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    let sharpe_n = if std > 1e-12 * mean.abs().max(1.0) {
        Some((n as f64).sqrt() * mean / std)
    } else {
        None
    };
    let cumulative_return = (traj.terminal() - traj.initial()) / traj.initial();
    let log_growth = (!traj.ruined).then(|| (traj.terminal() / traj.initial()).ln());
    Ok(BacktestReport {
        avg_excess_return: mean,
        std_excess: std,
        sharpe_n,
        cumulative_return,
        log_growth,
        max_drawdown: max_drawdown(traj),
        terminal_value: traj.terminal(),
        periods: n,
        ruined: traj.ruined,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrawdownSurrogate {
    /// Sample mean over paths of `log D_K`.
    pub mean: f64,
    pub per_path: Vec<f64>,
    /// Largest `|log D_K - log(1 - max_drawdown)|` over the paths.
    pub identity_residual: f64,
}

/// Smallest partial log-growth sum over all windows of one path, with the
/// empty window counted as zero.
fn min_window_log_sum(path: &[Vec<f64>], weights: &Weights) -> Result<f64> {
    let mut sum = 0.0;
    let mut peak: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for (k, x) in path.iter().enumerate() {
        let r = weights.portfolio_return(x);
        if !(1.0 + r > 0.0) {
            return Err(Error::NonSurvival { scenario: k, wealth_factor: 1.0 + r });
        }
        sum += r.ln_1p();
        peak = peak.max(sum);
        worst = worst.min(sum - peak);
    }
    Ok(worst)
}

/// Expected log of `1 - max_drawdown` over sample return paths, computed from
/// windowed log-growth sums and cross-checked against the simulated drawdown
/// of each path.
pub fn drawdown_surrogate(weights: &Weights, paths: &[Vec<Vec<f64>>]) -> Result<DrawdownSurrogate> {
    drawdown_surrogate_with(weights, paths, Execution::default())
}

pub fn drawdown_surrogate_with(weights: &Weights, paths: &[Vec<Vec<f64>>], exec: Execution) -> Result<DrawdownSurrogate> {
    if paths.is_empty() {
        return Err(Error::InvalidInput("no paths".into()));
    }
    let zero_costs = vec![0.0; weights.len()];
    let per_path = exec.map(paths, |path| -> Result<(f64, f64)> {
        let value = min_window_log_sum(path, weights)?;
        let traj = run(path, weights, &zero_costs, 1.0)?;
        let direct = (1.0 - max_drawdown(&traj)).ln();
        Ok((value, (value - direct).abs()))
    });
    let mut values = Vec::with_capacity(paths.len());
    let mut identity_residual: f64 = 0.0;
    for item in per_path {
        let (value, residual) = item?;
        values.push(value);
        identity_residual = identity_residual.max(residual);
    }
    Ok(DrawdownSurrogate {
        mean: values.iter().sum::<f64>() / values.len() as f64,
        per_path: values,
        identity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_step_with_costs() {
        let t = run(&[vec![0.10]], &Weights::new(vec![0.5]), &[0.01], 1.0).unwrap();
        assert!((t.v[1] - 1.045).abs() < 1e-15);
        let t = run(&[vec![-0.10]], &Weights::new(vec![-0.5]), &[0.01], 1.0).unwrap();
        assert!((t.v[1] - 1.045).abs() < 1e-15);
    }

    #[test]
    fn flat_weights_keep_value() {
        let path = vec![vec![0.3, -0.2]; 4];
        let t = run(&path, &Weights::zeros(2), &[0.001, 0.002], 2.5).unwrap();
        assert!(t.v.iter().all(|&v| v == 2.5));
        let r = report(&t, 0.0).unwrap();
        assert_eq!((r.cumulative_return, r.max_drawdown), (0.0, 0.0));
    }

    #[test]
    fn ruin_truncates() {
        let path = vec![vec![-0.6], vec![0.5]];
        let t = run(&path, &Weights::new(vec![2.0]), &[0.0], 1.0).unwrap();
        assert!(t.ruined);
        assert_eq!(t.v.len(), 2);
        assert!((t.v[1] + 0.2).abs() < 1e-15);
        assert_eq!(max_drawdown(&t), 1.0);
    }

    #[test]
    fn drawdown_examples() {
        let dd = |v: Vec<f64>| max_drawdown(&Trajectory::from_values(v).unwrap());
        assert_eq!(dd(vec![1.0, 1.1, 1.3]), 0.0);
        assert!((dd(vec![1.0, 0.8, 0.9]) - 0.2).abs() < 1e-15);
        assert!((dd(vec![1.0, 1.2, 0.9, 1.5]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn report_examples() {
        let r = report(&Trajectory::from_values(vec![1.0, 1.1, 1.21]).unwrap(), 0.0).unwrap();
        assert!((r.cumulative_return - 0.21).abs() < 1e-14);
        assert!((r.log_growth.unwrap() - 1.21f64.ln()).abs() < 1e-14);
        assert_eq!(r.max_drawdown, 0.0);
        assert_eq!(r.sharpe_n, None);

        let r = report(&Trajectory::from_values(vec![1.0, 1.1, 0.99]).unwrap(), 0.0).unwrap();
        assert!(r.avg_excess_return.abs() < 1e-15);
        assert!(r.sharpe_n.unwrap().abs() < 1e-12);
        assert!((r.std_excess - 0.02f64.sqrt()).abs() < 1e-15);
        assert!(report(&Trajectory::from_values(vec![1.0, 1.1]).unwrap(), 0.0).is_err());
    }

    #[test]
    fn reordering_changes_drawdown_only() {
        let w = Weights::new(vec![1.0]);
        let a = run(&[vec![-0.1], vec![0.2], vec![-0.1]], &w, &[0.0], 1.0).unwrap();
        let b = run(&[vec![-0.1], vec![-0.1], vec![0.2]], &w, &[0.0], 1.0).unwrap();
        let (ra, rb) = (report(&a, 0.0).unwrap(), report(&b, 0.0).unwrap());
        assert!((ra.cumulative_return - rb.cumulative_return).abs() < 1e-14);
        assert!((ra.log_growth.unwrap() - rb.log_growth.unwrap()).abs() < 1e-14);
        assert!((ra.max_drawdown - 0.1).abs() < 1e-14);
        assert!((rb.max_drawdown - 0.19).abs() < 1e-14);
    }

    #[test]
    fn surrogate_examples() {
        let path = vec![vec![0.1], vec![-0.3]];
        let s = drawdown_surrogate(&Weights::zeros(1), &[path]).unwrap();
        assert_eq!(s.mean, 0.0);
        let path = vec![vec![-0.2], vec![0.125]];
        let s = drawdown_surrogate(&Weights::new(vec![1.0]), &[path]).unwrap();
        assert!((s.mean - 0.8f64.ln()).abs() < 1e-15);
        assert!(s.identity_residual < 1e-15);
        let err = drawdown_surrogate(&Weights::new(vec![2.0]), &[vec![vec![-0.6]]]).unwrap_err();
        assert!(matches!(err, Error::NonSurvival { scenario: 0, .. }));
    }

    #[test]
    fn report_is_scale_invariant() {
        let v = vec![1.0, 1.05, 0.98, 1.1, 1.07];
        let a = report(&Trajectory::from_values(v.clone()).unwrap(), 0.001).unwrap();
        let b = report(&Trajectory::from_values(v.iter().map(|x| x * 37.0).collect()).unwrap(), 0.001).unwrap();
        assert!((a.sharpe_n.unwrap() - b.sharpe_n.unwrap()).abs() < 1e-12);
        assert!((a.max_drawdown - b.max_drawdown).abs() < 1e-15);
        assert!((a.cumulative_return - b.cumulative_return).abs() < 1e-14);
    }

    #[test]
    fn csv_layout() {
        let t = Trajectory::from_values(vec![1.0, 1.1, 0.99]).unwrap();
        assert_eq!(t.to_csv(), "k,V,Rp\n0,1,0.1\n1,1.1,-0.1\n2,0.99,\n");
    }
}
