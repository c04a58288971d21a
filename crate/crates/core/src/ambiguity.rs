//! Polyhedral ambiguity sets `{p in S_m : A0 p = d0, A1 p <= d1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, dot, LpProblem};
use crate::scenarios::normalize_probability;

/// Largest scenario count accepted by [`AmbiguitySet::vertex_enumerate`].
pub const MAX_ENUMERATION_SCENARIOS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbiguitySet {
    m: usize,
    a0: Vec<Vec<f64>>,
    d0: Vec<f64>,
    a1: Vec<Vec<f64>>,
    d1: Vec<f64>,
}

/// Per-scenario box radii around the nominal distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum BoxRadii {
    /// `|p_j - nominal_j| <= rho_j`.
    Absolute(Vec<f64>),
    /// `|p_j - nominal_j| <= gamma * nominal_j`, `gamma in [0, 1)`.
    Relative(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxSpec {
    nominal: Vec<f64>,
    radii: BoxRadii,
}

impl BoxSpec {
    pub fn new(nominal: Vec<f64>, radii: BoxRadii) -> Result<Self> {
        let m = nominal.len();
        if m == 0 {
            return Err(Error::InvalidInput("empty nominal distribution".into()));
        }
        let nominal = normalize_probability(nominal, m, 1e-9)?;
        match &radii {
            BoxRadii::Absolute(rho) => {
                if rho.len() != m {
                    return Err(Error::Dimension(format!("{} radii for {m} scenarios", rho.len())));
                }
                if rho.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
                    return Err(Error::InvalidInput("box radii must be finite and >= 0".into()));
                }
            }
            BoxRadii::Relative(g) => {
                if !(*g >= 0.0 && *g < 1.0) {
                    return Err(Error::InvalidInput(format!("gamma {g} outside [0, 1)")));
                }
            }
        }
        Ok(BoxSpec { nominal, radii })
    }

    pub fn relative(nominal: Vec<f64>, gamma: f64) -> Result<Self> {
        BoxSpec::new(nominal, BoxRadii::Relative(gamma))
    }

    pub fn nominal(&self) -> &[f64] {
        &self.nominal
    }

    pub fn radii(&self) -> Vec<f64> {
        match &self.radii {
            BoxRadii::Absolute(r) => r.clone(),
            BoxRadii::Relative(g) => self.nominal.iter().map(|p| g * p).collect(),
        }
    }
}

/// `A1 = [I; -I]`, `d1 = [nominal + rho; rho - nominal]`.
pub fn box_to_polyhedron(spec: &BoxSpec) -> Result<AmbiguitySet> {
    let m = spec.nominal.len();
    let rho = spec.radii();
    let mut a1 = Vec::with_capacity(2 * m);
    let mut d1 = Vec::with_capacity(2 * m);
    for j in 0..m {
        let mut row = vec![0.0; m];
        row[j] = 1.0;
        a1.push(row);
        d1.push(spec.nominal[j] + rho[j]);
    }
    for j in 0..m {
        let mut row = vec![0.0; m];
        row[j] = -1.0;
        a1.push(row);
        d1.push(rho[j] - spec.nominal[j]);
    }
    AmbiguitySet::new(m, Vec::new(), Vec::new(), a1, d1)
}

impl AmbiguitySet {
    /// Validates dimensions and checks the set is nonempty with a phase-one LP.
    pub fn new(m: usize, a0: Vec<Vec<f64>>, d0: Vec<f64>, a1: Vec<Vec<f64>>, d1: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("ambiguity set over zero scenarios".into()));
        }
        if a0.len() != d0.len() || a1.len() != d1.len() {
            return Err(Error::Dimension("constraint rows and right-hand sides differ in length".into()));
        }
        if let Some(row) = a0.iter().chain(&a1).find(|r| r.len() != m) {
            return Err(Error::Dimension(format!("constraint row has {} columns, expected {m}", row.len())));
        }
        let set = AmbiguitySet { m, a0, d0, a1, d1 };
        if !lp::check_feasibility(&set.membership_lp(vec![0.0; m]))? {
            return Err(Error::EmptyAmbiguitySet);
        }
        Ok(set)
    }

    /// The whole simplex: no constraints beyond `p in S_m`.
    pub fn simplex(m: usize) -> Result<Self> {
        AmbiguitySet::new(m, Vec::new(), Vec::new(), Vec::new(), Vec::new())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn a0(&self) -> &[Vec<f64>] {
        &self.a0
    }

    pub fn d0(&self) -> &[f64] {
        &self.d0
    }

    pub fn a1(&self) -> &[Vec<f64>] {
        &self.a1
    }

    pub fn d1(&self) -> &[f64] {
        &self.d1
    }

    /// LP over `p` with the given objective and all membership constraints.
    pub(crate) fn membership_lp(&self, objective: Vec<f64>) -> LpProblem {
        let mut lp = LpProblem::new(self.m).with_objective(objective);
        lp.add_eq(vec![1.0; self.m], 1.0);
        for (row, d) in self.a0.iter().zip(&self.d0) {
            lp.add_eq(row.clone(), *d);
        }
        for (row, d) in self.a1.iter().zip(&self.d1) {
            lp.add_ub(row.clone(), *d);
        }
        lp
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> Result<bool> {
        if p.len() != self.m {
            return Err(Error::Dimension(format!("point has {} entries, expected {}", p.len(), self.m)));
        }
        if p.iter().any(|&v| v < -tol) || (p.iter().sum::<f64>() - 1.0).abs() > tol {
            return Ok(false);
        }
        let eq_ok = self.a0.iter().zip(&self.d0).all(|(r, d)| (dot(r, p) - d).abs() <= tol);
        let ub_ok = self.a1.iter().zip(&self.d1).all(|(r, d)| dot(r, p) <= d + tol);
        Ok(eq_ok && ub_ok)
    }

    /// All vertices of the feasible polytope, by brute force over active sets.
    ///
    /// Every vertex is the unique solution of the equality rows plus some
    /// choice of tight inequalities (`p_j >= 0` or rows of `A1`). Intended as
    /// an oracle for small `m`.
    pub fn vertex_enumerate(&self) -> Result<Vec<Vec<f64>>> {
        let m = self.m;
        if m > MAX_ENUMERATION_SCENARIOS {
            return Err(Error::InvalidInput(format!(
                "vertex enumeration limited to m <= {MAX_ENUMERATION_SCENARIOS}, got {m}"
            )));
        }
        let mut eq_rows = vec![vec![1.0; m]];
        let mut eq_rhs = vec![1.0];
        eq_rows.extend(self.a0.iter().cloned());
        eq_rhs.extend(self.d0.iter().copied());

        let mut ineq_rows: Vec<Vec<f64>> = (0..m)
            .map(|j| {
                let mut r = vec![0.0; m];
                r[j] = -1.0;
                r
            })
            .collect();
        let mut ineq_rhs = vec![0.0; m];
        ineq_rows.extend(self.a1.iter().cloned());
        ineq_rhs.extend(self.d1.iter().copied());

        let rank = matrix_rank(&eq_rows);
        let need = m.saturating_sub(rank);
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        for subset in Combinations::new(ineq_rows.len(), need) {
            let mut rows = eq_rows.clone();
            let mut rhs = eq_rhs.clone();
            for &k in &subset {
                rows.push(ineq_rows[k].clone());
                rhs.push(ineq_rhs[k]);
            }
            let Some(p) = solve_consistent(&rows, &rhs) else { continue };
            if !self.contains(&p, 1e-9)? {
                continue;
            }
            if !vertices
                .iter()
                .any(|v| v.iter().zip(&p).all(|(a, b)| (a - b).abs() <= 1e-9))
            {
                vertices.push(p);
            }
        }
        if vertices.is_empty() {
            return Err(Error::EmptyAmbiguitySet);
        }
        Ok(vertices)
    }
}

/// Wire format for ambiguity sets.
///
/// `{"type":"box","nominal":[...],"gamma":0.1}` or with `"radii":[...]`;
/// `{"type":"polyhedron","A0":[[...]],"d0":[...],"A1":[[...]],"d1":[...]}`.
/// A box without `nominal` uses the scenario set's nominal distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum AmbiguitySpec {
    Box {
        #[serde(default)]
        nominal: Option<Vec<f64>>,
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(default)]
        radii: Option<Vec<f64>>,
    },
    Polyhedron {
        #[serde(rename = "A0", default)]
        a0: Vec<Vec<f64>>,
        #[serde(default)]
        d0: Vec<f64>,
        #[serde(rename = "A1", default)]
        a1: Vec<Vec<f64>>,
        #[serde(default)]
        d1: Vec<f64>,
    },
}

impl AmbiguitySpec {
    pub fn build(&self, m: usize, default_nominal: &[f64]) -> Result<AmbiguitySet> {
        match self {
            AmbiguitySpec::Box { nominal, gamma, radii } => {
                let nominal = nominal.clone().unwrap_or_else(|| default_nominal.to_vec());
                if nominal.len() != m {
                    return Err(Error::Dimension(format!("box nominal has {} entries for {m} scenarios", nominal.len())));
                }
                let radii = match (gamma, radii) {
                    (Some(g), None) => BoxRadii::Relative(*g),
                    (None, Some(r)) => BoxRadii::Absolute(r.clone()),
                    _ => return Err(Error::Config("box needs exactly one of \"gamma\" or \"radii\"".into())),
                };
                box_to_polyhedron(&BoxSpec::new(nominal, radii)?)
            }
            AmbiguitySpec::Polyhedron { a0, d0, a1, d1 } => {
                AmbiguitySet::new(m, a0.clone(), d0.clone(), a1.clone(), d1.clone())
            }
        }
    }
}

fn matrix_rank(rows: &[Vec<f64>]) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            break;
        };
        if a[p][c].abs() < 1e-12 {
            continue;
        }
        a.swap(rank, p);
        for i in 0..a.len() {
            if i != rank {
                let f = a[i][c] / a[rank][c];
                for k in c..cols {
                    a[i][k] -= f * a[rank][k];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves a possibly overdetermined system, returning `None` unless it has
/// full column rank and is consistent.
fn solve_consistent(rows: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rows.first()?.len();
    let mut a: Vec<Vec<f64>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(*b);
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        for i in 0..a.len() {
            if i != c {
                let f = a[i][c] / a[c][c];
                if f != 0.0 {
                    for k in c..=n {
                        a[i][k] -= f * a[c][k];
                    }
                }
            }
        }
    }
    if a[n..].iter().any(|r| r[n].abs() > 1e-9) {
        return None;
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// Lexicographic k-subsets of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
