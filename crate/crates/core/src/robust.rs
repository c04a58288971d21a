//! Worst-case expected log-growth, its dual, and the hyperplane-approximated
//! robust portfolio LP.
//!
//! Trading constraints are always modeled on the long/short split
//! `K = K_L + K_S`, `K_L >= 0 >= K_S`. Gross exposure `sum |K_i| <= L` is
//! written as `sum (K_L - K_S) <= L`. That bound is conservative when an
//! asset is held long and short at once, and exact otherwise; holding both
//! legs only burns leverage budget, so optimal solutions do not.

use serde::Serialize;
use serde_json::{json, Value};

use crate::ambiguity::AmbiguitySet;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hyperplane::HyperplaneSet;
use crate::lp::{LpProblem, LpSolution, LpSolver, LpStatus, SimplexSolver};
use crate::scenarios::ScenarioSet;
use crate::weights::Weights;

/// Padding applied to both ends of the attainable portfolio-return range
/// before the tangent family is generated.
pub const DOMAIN_PADDING: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradingConstraints {
    leverage: f64,
    k_min: Vec<f64>,
    k_max: Vec<f64>,
}

impl TradingConstraints {
    pub fn new(leverage: f64, k_min: Vec<f64>, k_max: Vec<f64>) -> Result<Self> {
        if !(leverage >= 1.0) || !leverage.is_finite() {
            return Err(Error::InvalidInput(format!("leverage {leverage} must be >= 1")));
        }
        if k_min.len() != k_max.len() {
            return Err(Error::Dimension(format!("{} lower vs {} upper weight bounds", k_min.len(), k_max.len())));
        }
        if let Some(i) = (0..k_min.len()).find(|&i| !(k_min[i] <= k_max[i])) {
            return Err(Error::InvalidInput(format!(
                "k_min {} exceeds k_max {} for asset {i}",
                k_min[i], k_max[i]
            )));
        }
        Ok(TradingConstraints { leverage, k_min, k_max })
    }

    pub fn long_only(n: usize, k_max: f64, leverage: f64) -> Result<Self> {
        TradingConstraints::new(leverage, vec![0.0; n], vec![k_max; n])
    }

    pub fn n(&self) -> usize {
        self.k_min.len()
    }

    pub fn leverage(&self) -> f64 {
        self.leverage
    }

    pub fn k_min(&self) -> &[f64] {
        &self.k_min
    }

    pub fn k_max(&self) -> &[f64] {
        &self.k_max
    }

    fn check_dims(&self, scenarios: &ScenarioSet) -> Result<()> {
        if self.n() != scenarios.n() {
            return Err(Error::Dimension(format!(
                "constraints for {} assets, scenarios have {}",
                self.n(),
                scenarios.n()
            )));
        }
        Ok(())
    }

    /// Largest violation of the holding, leverage and survival constraints by
    /// `weights` (0 when all hold). Unsplit weights use `K_L = max(K, 0)`,
    /// `K_S = min(K, 0)`.
    pub fn max_violation(&self, scenarios: &ScenarioSet, weights: &Weights) -> Result<f64> {
        self.check_dims(scenarios)?;
        weights.check_len(self.n())?;
        let (long, short) = match (&weights.k_long, &weights.k_short) {
            (Some(l), Some(s)) => (l.clone(), s.clone()),
            _ => (
                weights.k.iter().map(|k| k.max(0.0)).collect(),
                weights.k.iter().map(|k| k.min(0.0)).collect(),
            ),
        };
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            worst = worst
                .max(self.k_min[i] - weights.k[i])
                .max(weights.k[i] - self.k_max[i])
                .max(-long[i])
                .max(short[i]);
        }
        let gross: f64 = long.iter().zip(&short).map(|(l, s)| l - s).sum();
        worst = worst.max(gross - self.leverage);
        let (lc, sc) = survival_coefficients(scenarios);
        let survival: f64 = long.iter().zip(&lc).map(|(k, c)| k * c).sum::<f64>()
            + short.iter().zip(&sc).map(|(k, c)| k * c).sum::<f64>();
        Ok(worst.max(survival - 1.0))
    }
}

/// Coefficients of `K_L` and `K_S` in the survival row
/// `sum K_L |min(x_min, 0)| - sum K_S max(0, x_max) <= 1`.
fn survival_coefficients(scenarios: &ScenarioSet) -> (Vec<f64>, Vec<f64>) {
    let long = scenarios.per_asset_min().iter().map(|x| x.min(0.0).abs()).collect();
    let short = scenarios.per_asset_max().iter().map(|x| -x.max(0.0)).collect();
    (long, short)
}

/// Adds the split-weight bounds and all trading rows to `lp`, with `K_L` at
/// columns `0..n` and `K_S` at `n..2n`.
fn add_trading_constraints(lp: &mut LpProblem, scenarios: &ScenarioSet, cons: &TradingConstraints) {
    let n = cons.n();
    let q = lp.num_vars();
    for i in 0..n {
        lp.set_bounds(i, 0.0, f64::INFINITY);
        lp.set_bounds(n + i, f64::NEG_INFINITY, 0.0);
    }
    for i in 0..n {
        let mut row = vec![0.0; q];
        row[i] = 1.0;
        row[n + i] = 1.0;
        if cons.k_max[i].is_finite() {
            lp.add_ub(row.clone(), cons.k_max[i]);
        }
        if cons.k_min[i].is_finite() {
            lp.add_lb(row, cons.k_min[i]);
        }
    }
    let mut gross = vec![0.0; q];
    for i in 0..n {
        gross[i] = 1.0;
        gross[n + i] = -1.0;
    }
    lp.add_ub(gross, cons.leverage);

    let (lc, sc) = survival_coefficients(scenarios);
    let mut survival = vec![0.0; q];
    survival[..n].copy_from_slice(&lc);
    survival[n..2 * n].copy_from_slice(&sc);
    lp.add_ub(survival, 1.0);
}

fn require_optimal(sol: LpSolution, what: &str) -> Result<LpSolution> {
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        LpStatus::Infeasible => Err(Error::Infeasible(what.to_string())),
        LpStatus::Unbounded => Err(Error::Unbounded(what.to_string())),
        LpStatus::IterationLimit => Err(Error::Solver(format!("{what}: iteration limit after {} pivots", sol.iterations))),
    }
}

/// `q_j(K) = log(1 + K'x^j)` for every scenario.
pub fn log_growth_vector(scenarios: &ScenarioSet, weights: &Weights) -> Result<Vec<f64>> {
    weights.check_len(scenarios.n())?;
    scenarios
        .returns()
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let r = weights.portfolio_return(x);
            if !(1.0 + r > 0.0) {
                return Err(Error::NonSurvival { scenario: j, wealth_factor: 1.0 + r });
            }
            Ok(r.ln_1p())
        })
        .collect()
}

/// Expected log-growth `sum_j p_j log(1 + K'x^j)`.
pub fn elg(scenarios: &ScenarioSet, p: &[f64], weights: &Weights) -> Result<f64> {
    if p.len() != scenarios.m() {
        return Err(Error::Dimension(format!("{} probabilities for {} scenarios", p.len(), scenarios.m())));
    }
    let q = log_growth_vector(scenarios, weights)?;
    Ok(p.iter().zip(&q).map(|(p, q)| p * q).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCase {
    pub value: f64,
    pub p_star: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualWorstCase {
    pub value: f64,
    pub v: Vec<f64>,
    pub lambda: Vec<f64>,
    pub w: f64,
}

fn check_ambiguity(scenarios: &ScenarioSet, ambiguity: &AmbiguitySet) -> Result<()> {
    if ambiguity.m() != scenarios.m() {
        return Err(Error::Dimension(format!(
            "ambiguity set over {} scenarios, scenario set has {}",
            ambiguity.m(),
            scenarios.m()
        )));
    }
    Ok(())
}

/// Worst-case ELG: `min_p p'q(K)` over the ambiguity set.
pub fn worst_case_elg(scenarios: &ScenarioSet, ambiguity: &AmbiguitySet, weights: &Weights) -> Result<WorstCase> {
    worst_case_elg_with(&SimplexSolver::default(), scenarios, ambiguity, weights)
}

pub fn worst_case_elg_with(
    solver: &dyn LpSolver,
    scenarios: &ScenarioSet,
    ambiguity: &AmbiguitySet,
    weights: &Weights,
) -> Result<WorstCase> {
    check_ambiguity(scenarios, ambiguity)?;
    let q = log_growth_vector(scenarios, weights)?;
    let lp = ambiguity.membership_lp(q.iter().map(|v| -v).collect());
    let sol = require_optimal(solver.solve(&lp)?, "worst-case distribution")?;
    Ok(WorstCase { value: -sol.objective_value, p_star: sol.x })
}

/// Lagrangian dual of the worst-case ELG:
/// `max W - v'd0 - lambda'd1` s.t. `W <= (q + A0'v + A1'lambda)_j`, `lambda >= 0`.
pub fn worst_case_dual(scenarios: &ScenarioSet, ambiguity: &AmbiguitySet, weights: &Weights) -> Result<DualWorstCase> {
    worst_case_dual_with(&SimplexSolver::default(), scenarios, ambiguity, weights)
}

pub fn worst_case_dual_with(
    solver: &dyn LpSolver,
    scenarios: &ScenarioSet,
    ambiguity: &AmbiguitySet,
    weights: &Weights,
) -> Result<DualWorstCase> {
    check_ambiguity(scenarios, ambiguity)?;
    let q = log_growth_vector(scenarios, weights)?;
    let (m0, m1) = (ambiguity.a0().len(), ambiguity.a1().len());
    let w_col = m0 + m1;
    let mut lp = LpProblem::new(w_col + 1);
    for k in 0..m0 {
        lp.set_free(k);
        lp.objective[k] = -ambiguity.d0()[k];
    }
    for k in 0..m1 {
        lp.objective[m0 + k] = -ambiguity.d1()[k];
    }
    lp.set_free(w_col);
    lp.objective[w_col] = 1.0;
    for (j, qj) in q.iter().enumerate() {
        let mut row = vec![0.0; w_col + 1];
        for k in 0..m0 {
            row[k] = -ambiguity.a0()[k][j];
        }
        for k in 0..m1 {
            row[m0 + k] = -ambiguity.a1()[k][j];
        }
        row[w_col] = 1.0;
        lp.add_ub(row, *qj);
    }
    let sol = require_optimal(solver.solve(&lp)?, "worst-case dual")?;
    Ok(DualWorstCase {
        value: sol.objective_value,
        v: sol.x[..m0].to_vec(),
        lambda: sol.x[m0..w_col].to_vec(),
        w: sol.x[w_col],
    })
}

/// Smallest and largest `K'x^j` over all scenarios and all admissible `K`.
pub fn portfolio_return_range(scenarios: &ScenarioSet, cons: &TradingConstraints) -> Result<(f64, f64)> {
    portfolio_return_range_with(&SimplexSolver::default(), scenarios, cons, Execution::default())
}

/// One LP per scenario and direction; the `2m` solves are independent.
pub fn portfolio_return_range_with(
    solver: &dyn LpSolver,
    scenarios: &ScenarioSet,
    cons: &TradingConstraints,
    exec: Execution,
) -> Result<(f64, f64)> {
    cons.check_dims(scenarios)?;
    let n = cons.n();
    let mut base = LpProblem::new(2 * n);
    add_trading_constraints(&mut base, scenarios, cons);
    let m = scenarios.m();
    let extremes = exec.map_range(2 * m, |job| -> Result<f64> {
        let x = scenarios.scenario(job / 2);
        let sign = if job % 2 == 0 { -1.0 } else { 1.0 };
        let mut objective = vec![0.0; 2 * n];
        for i in 0..n {
            objective[i] = sign * x[i];
            objective[n + i] = sign * x[i];
        }
        let lp = base.clone().with_objective(objective);
        let sol = solver.solve(&lp)?;
        if sol.status == LpStatus::Infeasible {
            return Err(Error::Infeasible("trading constraints admit no weights".into()));
        }
        let sol = require_optimal(sol, "portfolio return range")?;
        Ok(sign * sol.objective_value)
    });
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (job, v) in extremes.into_iter().enumerate() {
        let v = v?;
        if job % 2 == 0 {
            lo = lo.min(v);
        } else {
            hi = hi.max(v);
        }
    }
    if lo <= -1.0 {
        return Err(Error::InvalidInput(format!(
            "admissible weights reach portfolio return {lo} <= -1 despite the survival constraint"
        )));
    }
    Ok((lo, hi))
}

/// Tangent-family domain: the attainable return range, widened to contain
/// zero and padded by [`DOMAIN_PADDING`].
pub fn hyperplane_domain(range: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = range;
    if hi - lo <= 1e-12 {
        return Err(Error::DegenerateInterval { x_min: lo, x_max: hi });
    }
    let lo = lo.min(0.0);
    let padded = lo - DOMAIN_PADDING;
    let lo = if padded > -1.0 { padded } else { lo };
    Ok((lo, hi.max(0.0) + DOMAIN_PADDING))
}

/// How the `log(1 + x)` terms are replaced by tangents.
#[derive(Debug, Clone, PartialEq)]
pub enum Approximation {
    /// Epsilon-optimal family over the attainable return range.
    Epsilon(f64),
    /// Geometric family with exactly this many tangents spanning the range.
    Count(usize),
    /// Caller-supplied tangents.
    Explicit(HyperplaneSet),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustSolution {
    pub weights: Weights,
    /// Optimum of the approximating LP, `W - v'd0 - lambda'd1`.
    pub lp_value: f64,
    /// Exact ELG of the robust weights under the scenarios' nominal distribution.
    pub nominal_elg: f64,
    /// Exact worst-case ELG of the robust weights.
    pub worst_case_elg: f64,
    pub worst_case_p: Vec<f64>,
    pub v: Vec<f64>,
    pub lambda: Vec<f64>,
    pub w: f64,
    pub z: Vec<f64>,
    pub hyperplanes: HyperplaneSet,
    pub status: LpStatus,
    pub iterations: usize,
}

impl RobustSolution {
    pub fn to_json(&self) -> Value {
        json!({
            "weights": {
                "k": self.weights.k,
                "k_long": self.weights.k_long,
                "k_short": self.weights.k_short,
            },
            "lp_value": self.lp_value,
            "nominal_elg": self.nominal_elg,
            "worst_case_elg": self.worst_case_elg,
            "worst_case_p": self.worst_case_p,
            "multipliers": { "v": self.v, "lambda": self.lambda },
            "aux": { "W": self.w, "Z": self.z },
            "M": self.hyperplanes.len(),
            "epsilon": self.hyperplanes.epsilon,
            "x_min": self.hyperplanes.x_min,
            "x_max": self.hyperplanes.x_max,
            "status": self.status,
            "iterations": self.iterations,
        })
    }
}

/// Builds the robust LP for a given tangent family.
///
/// Columns: `K_L (n) | K_S (n) | v (m0) | lambda (m1) | W | Z (m)`.
pub fn build_robust_lp(
    scenarios: &ScenarioSet,
    ambiguity: &AmbiguitySet,
    cons: &TradingConstraints,
    planes: &HyperplaneSet,
) -> Result<LpProblem> {
    check_ambiguity(scenarios, ambiguity)?;
    cons.check_dims(scenarios)?;
    let (n, m) = (scenarios.n(), scenarios.m());
    let (m0, m1) = (ambiguity.a0().len(), ambiguity.a1().len());
    let v0 = 2 * n;
    let l0 = v0 + m0;
    let w_col = l0 + m1;
    let z0 = w_col + 1;
    let q = z0 + m;

    let mut lp = LpProblem::new(q);
    add_trading_constraints(&mut lp, scenarios, cons);
    for k in 0..m0 {
        lp.set_free(v0 + k);
        lp.objective[v0 + k] = -ambiguity.d0()[k];
    }
    for k in 0..m1 {
        lp.objective[l0 + k] = -ambiguity.d1()[k];
    }
    lp.set_free(w_col);
    lp.objective[w_col] = 1.0;
    for j in 0..m {
        lp.set_free(z0 + j);
    }

    for (j, x) in scenarios.returns().iter().enumerate() {
        for h in &planes.planes {
            let mut row = vec![0.0; q];
            row[z0 + j] = 1.0;
            for i in 0..n {
                row[i] = -h.a * x[i];
                row[n + i] = -h.a * x[i];
            }
            lp.add_ub(row, h.b);
        }
        let mut row = vec![0.0; q];
        row[w_col] = 1.0;
        row[z0 + j] = -1.0;
        for k in 0..m0 {
            row[v0 + k] = -ambiguity.a0()[k][j];
        }
        for k in 0..m1 {
            row[l0 + k] = -ambiguity.a1()[k][j];
        }
        lp.add_ub(row, 0.0);
    }

    let mut names = Vec::with_capacity(q);
    names.extend((0..n).map(|i| format!("KL{i}")));
    names.extend((0..n).map(|i| format!("KS{i}")));
    names.extend((0..m0).map(|k| format!("v{k}")));
    names.extend((0..m1).map(|k| format!("lambda{k}")));
    names.push("W".to_string());
    names.extend((0..m).map(|j| format!("Z{j}")));
    lp.names = Some(names);
    Ok(lp)
}

/// Tangent family for `approx`, placed over the attainable return range
/// unless given explicitly.
pub fn resolve_hyperplanes(
    solver: &dyn LpSolver,
    scenarios: &ScenarioSet,
    cons: &TradingConstraints,
    approx: &Approximation,
) -> Result<HyperplaneSet> {
    if let Approximation::Explicit(set) = approx {
        return Ok(set.clone());
    }
    let range = portfolio_return_range_with(solver, scenarios, cons, Execution::default())?;
    let (lo, hi) = hyperplane_domain(range)?;
    match approx {
        Approximation::Epsilon(eps) => HyperplaneSet::generate(lo, hi, *eps),
        Approximation::Count(count) => HyperplaneSet::with_count(lo, hi, *count),
        Approximation::Explicit(_) => unreachable!(),
    }
}

pub fn solve_robust(
    scenarios: &ScenarioSet,
    ambiguity: &AmbiguitySet,
    cons: &TradingConstraints,
    approx: &Approximation,
) -> Result<RobustSolution> {
    solve_robust_with(&SimplexSolver::default(), scenarios, ambiguity, cons, approx)
}

pub fn solve_robust_with(
    solver: &dyn LpSolver,
    scenarios: &ScenarioSet,
    ambiguity: &AmbiguitySet,
    cons: &TradingConstraints,
    approx: &Approximation,
) -> Result<RobustSolution> {
    check_ambiguity(scenarios, ambiguity)?;
    cons.check_dims(scenarios)?;
    let planes = resolve_hyperplanes(solver, scenarios, cons, approx)?;
    let lp = build_robust_lp(scenarios, ambiguity, cons, &planes)?;
    let sol = require_optimal(solver.solve(&lp)?, "robust portfolio LP")?;

    let (n, m) = (scenarios.n(), scenarios.m());
    let (m0, m1) = (ambiguity.a0().len(), ambiguity.a1().len());
    let x = &sol.x;
    let (long, short) = snap_to_bounds(&x[..n], &x[n..2 * n], cons);
    let weights = Weights::from_split(long, short)?;
    let w_col = 2 * n + m0 + m1;

    let nominal_elg = elg(scenarios, scenarios.nominal(), &weights)?;
    let wc = worst_case_elg_with(solver, scenarios, ambiguity, &weights)?;
    Ok(RobustSolution {
        weights,
        lp_value: sol.objective_value,
        nominal_elg,
        worst_case_elg: wc.value,
        worst_case_p: wc.p_star,
        v: x[2 * n..2 * n + m0].to_vec(),
        lambda: x[2 * n + m0..w_col].to_vec(),
        w: x[w_col],
        z: x[w_col + 1..w_col + 1 + m].to_vec(),
        hyperplanes: planes,
        status: sol.status,
        iterations: sol.iterations,
    })
}

const SNAP_TOLERANCE: f64 = 1e-12;

/// Removes pivoting round-off from the split: legs within tolerance of zero
/// become zero, and net weights within tolerance of a holding bound land on it.
fn snap_to_bounds(long: &[f64], short: &[f64], cons: &TradingConstraints) -> (Vec<f64>, Vec<f64>) {
    let snap = |v: f64| if v.abs() <= SNAP_TOLERANCE { 0.0 } else { v };
    let mut long: Vec<f64> = long.iter().map(|&v| snap(v.max(0.0))).collect();
    let mut short: Vec<f64> = short.iter().map(|&v| snap(v.min(0.0))).collect();
    for i in 0..long.len() {
        let net = long[i] + short[i];
        for bound in [cons.k_min[i], cons.k_max[i]] {
            if bound.is_finite() && net != bound && (net - bound).abs() <= SNAP_TOLERANCE * bound.abs().max(1.0) {
                if short[i] == 0.0 && bound >= 0.0 {
                    long[i] = bound;
                } else if long[i] == 0.0 && bound <= 0.0 {
                    short[i] = bound;
                }
            }
        }
    }
    (long, short)
}

/// Solves the same portfolio problem under several ambiguity sets.
pub fn solve_robust_batch(
    scenarios: &ScenarioSet,
    ambiguities: &[AmbiguitySet],
    cons: &TradingConstraints,
    approx: &Approximation,
    exec: Execution,
) -> Vec<Result<RobustSolution>> {
    let solver = SimplexSolver::default().with_execution(Execution::Sequential);
    exec.map(ambiguities, |amb| solve_robust_with(&solver, scenarios, amb, cons, approx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::{box_to_polyhedron, BoxSpec};

    fn toy() -> ScenarioSet {
        ScenarioSet::new(vec![vec![0.1, -0.1], vec![-0.25, 0.3]], Some(vec![0.7, 0.3])).unwrap()
    }

    fn toy_box(gamma: f64) -> AmbiguitySet {
        box_to_polyhedron(&BoxSpec::relative(vec![0.7, 0.3], gamma).unwrap()).unwrap()
    }

    fn toy_cons() -> TradingConstraints {
        TradingConstraints::long_only(2, 0.5, 1.0).unwrap()
    }

    #[test]
    fn elg_values() {
        let s = toy();
        let g = elg(&s, s.nominal(), &Weights::new(vec![0.3698, 0.5])).unwrap();
        assert!((g - 0.00761).abs() < 5e-5, "{g}");
        let g = elg(&s, s.nominal(), &Weights::new(vec![0.5, 0.4375])).unwrap();
        assert!((g - 0.00623).abs() < 5e-5, "{g}");
        assert_eq!(elg(&s, s.nominal(), &Weights::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn log_growth_entries() {
        let s = toy();
        let q = log_growth_vector(&s, &Weights::new(vec![0.5, 0.5])).unwrap();
        assert!(q[0].abs() < 1e-15);
        assert!((q[1] - 1.025f64.ln()).abs() < 1e-15);
        let g = elg(&s, s.nominal(), &Weights::new(vec![0.5, 0.5])).unwrap();
        assert!((g - 0.3 * 1.025f64.ln()).abs() < 1e-15);
        let one = ScenarioSet::new(vec![vec![0.2]], None).unwrap();
        assert_eq!(log_growth_vector(&one, &Weights::new(vec![0.5])).unwrap(), vec![0.1f64.ln_1p()]);
        let err = log_growth_vector(&s, &Weights::new(vec![4.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::NonSurvival { scenario: 1, .. }), "{err}");
    }

    #[test]
    fn worst_case_on_toy_boxes() {
        let s = toy();
        let k = Weights::new(vec![0.5, 0.5]);
        let wc = worst_case_elg(&s, &toy_box(0.1), &k).unwrap();
        assert!((wc.value - 0.27 * 1.025f64.ln()).abs() < 1e-12, "{}", wc.value);
        assert!((wc.p_star[0] - 0.73).abs() < 1e-9);
        let dual = worst_case_dual(&s, &toy_box(0.1), &k).unwrap();
        assert!((dual.value - wc.value).abs() < 1e-10);
        assert!(dual.lambda.iter().all(|&l| l >= 0.0));

        let wc0 = worst_case_elg(&s, &toy_box(0.0), &k).unwrap();
        let nominal = elg(&s, s.nominal(), &k).unwrap();
        assert!((wc0.value - nominal).abs() < 1e-12);
        assert!((worst_case_dual(&s, &toy_box(0.0), &k).unwrap().value - nominal).abs() < 1e-10);

        let flat = Weights::new(vec![0.5, 0.4375]);
        let wc = worst_case_elg(&s, &toy_box(0.2), &flat).unwrap();
        assert!((wc.value - 1.00625f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn return_range_vertices() {
        let (lo, hi) = portfolio_return_range(&toy(), &toy_cons()).unwrap();
        assert!((lo + 0.125).abs() < 1e-12 && (hi - 0.15).abs() < 1e-12, "{lo} {hi}");
        let single = ScenarioSet::new(vec![vec![-0.1], vec![0.2]], None).unwrap();
        let (lo, hi) =
            portfolio_return_range(&single, &TradingConstraints::long_only(1, 1.0, 1.0).unwrap()).unwrap();
        assert!((lo + 0.1).abs() < 1e-12 && (hi - 0.2).abs() < 1e-12);
        let flat = ScenarioSet::new(vec![vec![0.0, 0.0]], None).unwrap();
        let range = portfolio_return_range(&flat, &toy_cons()).unwrap();
        assert_eq!(range, (0.0, 0.0));
        assert!(matches!(hyperplane_domain(range), Err(Error::DegenerateInterval { .. })));
    }

    #[test]
    fn constraint_validation() {
        assert!(TradingConstraints::new(0.5, vec![0.0], vec![1.0]).is_err());
        assert!(TradingConstraints::new(1.0, vec![0.5], vec![0.1]).is_err());
        assert!(TradingConstraints::new(1.0, vec![0.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn table_row_gamma_010() {
        let sol = solve_robust(&toy(), &toy_box(0.1), &toy_cons(), &Approximation::Count(3)).unwrap();
        assert_eq!(sol.weights.k, vec![0.5, 0.5]);
        assert!((sol.nominal_elg - 0.00740).abs() < 5e-4);
        assert!(sol.worst_case_elg <= sol.lp_value + 1e-9);
        assert!(sol.lp_value <= sol.worst_case_elg + sol.hyperplanes.epsilon + 1e-6);
    }

    /// Brute-force nominal optimum over the long-only toy polytope.
    fn grid_nominal_optimum() -> f64 {
        let s = toy();
        let steps = 1000;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let k = Weights::new(vec![0.5 * i as f64 / steps as f64, 0.5 * j as f64 / steps as f64]);
                best = best.max(elg(&s, s.nominal(), &k).unwrap());
            }
        }
        best
    }

    #[test]
    fn nominal_case_approaches_grid_optimum() {
        let oracle = grid_nominal_optimum();
        assert!((oracle - 0.00761).abs() < 5e-5, "{oracle}");
        for eps in [1e-3, 1e-4, 1e-5] {
            let sol = solve_robust(&toy(), &toy_box(0.0), &toy_cons(), &Approximation::Epsilon(eps)).unwrap();
            assert!((sol.lp_value - oracle).abs() <= eps + 1e-6, "{eps}: {}", sol.lp_value);
            assert!(sol.nominal_elg >= oracle - eps - 1e-6);
            assert!((sol.nominal_elg - sol.worst_case_elg).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_constraints_are_reported() {
        // Lower holding bounds beyond the leverage cap.
        let cons = TradingConstraints::new(1.0, vec![0.6, 0.6], vec![1.0, 1.0]).unwrap();
        let err = solve_robust(&toy(), &toy_box(0.1), &cons, &Approximation::Count(3)).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err}");
    }

    #[test]
    fn batch_matches_individual_solves() {
        let sets: Vec<_> = [0.0, 0.1, 0.2].iter().map(|&g| toy_box(g)).collect();
        let batch = solve_robust_batch(&toy(), &sets, &toy_cons(), &Approximation::Count(3), Execution::Parallel);
        for (set, got) in sets.iter().zip(batch) {
            let single = solve_robust(&toy(), set, &toy_cons(), &Approximation::Count(3)).unwrap();
            assert_eq!(got.unwrap().weights, single.weights);
        }
    }

    #[test]
    fn feasibility_of_output_weights() {
        let cons = TradingConstraints::new(1.5, vec![-0.5, -0.5], vec![1.0, 1.0]).unwrap();
        let sol = solve_robust(&toy(), &toy_box(0.1), &cons, &Approximation::Epsilon(1e-3)).unwrap();
        assert!(cons.max_violation(&toy(), &sol.weights).unwrap() <= 1e-8);
        for x in toy().returns() {
            assert!(1.0 + sol.weights.portfolio_return(x) > 0.0);
        }
    }
}
