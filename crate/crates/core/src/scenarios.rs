//! Price ingestion, per-period returns and the finite scenario set.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::Weights;

/// Prices in wide layout: one row per date, one column per ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    pub dates: Vec<String>,
    pub tickers: Vec<String>,
    pub prices: Vec<Vec<f64>>,
}

/// Wide CSV layout: `date,T1,...,Tn` header, then `YYYY-MM-DD,p1,...,pn` rows.
#[derive(Debug, Clone, Copy)]
pub struct WideCsv {
    pub delimiter: u8,
}

impl Default for WideCsv {
    fn default() -> Self {
        WideCsv { delimiter: b',' }
    }
}

impl PriceTable {
    pub fn new(dates: Vec<String>, tickers: Vec<String>, prices: Vec<Vec<f64>>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(Error::Dimension(format!("{} dates for {} price rows", dates.len(), prices.len())));
        }
        if prices.len() < 2 {
            return Err(Error::InvalidInput("need at least two price rows".into()));
        }
        for (r, row) in prices.iter().enumerate() {
            if row.len() != tickers.len() {
                return Err(Error::Csv {
                    row: r + 1,
                    message: format!("{} prices for {} tickers", row.len(), tickers.len()),
                });
            }
            for (c, &p) in row.iter().enumerate() {
                if !(p > 0.0) || !p.is_finite() {
                    return Err(Error::NonPositivePrice { row: r + 1, ticker: tickers[c].clone() });
                }
            }
        }
        Ok(PriceTable { dates, tickers, prices })
    }

    pub fn num_assets(&self) -> usize {
        self.tickers.len()
    }

    pub fn num_rows(&self) -> usize {
        self.prices.len()
    }

    /// Rows `start..end` (end exclusive) as a new table.
    pub fn slice(&self, start: usize, end: usize) -> Result<PriceTable> {
        if start >= end || end > self.num_rows() {
            return Err(Error::InvalidInput(format!(
                "row range {start}..{end} outside 0..{}",
                self.num_rows()
            )));
        }
        PriceTable::new(
            self.dates[start..end].to_vec(),
            self.tickers.clone(),
            self.prices[start..end].to_vec(),
        )
    }
}

/// Reads a wide price CSV. Rows come back sorted by date label.
pub fn load_prices(path: &Path, format: WideCsv) -> Result<PriceTable> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_prices(&text, format)
}

/// Parses wide price CSV text; row numbers in errors are 1-based data rows.
pub fn parse_prices(text: &str, format: WideCsv) -> Result<PriceTable> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Csv { row: 0, message: e.to_string() })?
        .clone();
    if header.len() < 2 {
        return Err(Error::Csv { row: 0, message: "header needs a date column and at least one ticker".into() });
    }
    let tickers: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Csv { row, message: e.to_string() })?;
        if record.len() != header.len() {
            return Err(Error::Csv {
                row,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let date = record[0].to_string();
        let mut prices = Vec::with_capacity(tickers.len());
        for (c, field) in record.iter().enumerate().skip(1) {
            if field.is_empty() {
                return Err(Error::Csv { row, message: format!("missing price for ticker {}", tickers[c - 1]) });
            }
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                value: field.to_string(),
            })?;
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositivePrice { row, ticker: tickers[c - 1].clone() });
            }
            prices.push(value);
        }
        rows.push((date, prices));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let (dates, prices) = rows.into_iter().unzip();
    PriceTable::new(dates, tickers, prices)
}

/// `m` joint-return outcomes for `n` assets with a nominal distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSet {
    returns: Vec<Vec<f64>>,
    nominal: Vec<f64>,
    per_asset_min: Vec<f64>,
    per_asset_max: Vec<f64>,
}

/// Inline scenario description accepted by the CLI config.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ScenarioSpec {
    pub returns: Vec<Vec<f64>>,
    #[serde(default)]
    pub nominal: Option<Vec<f64>>,
}

impl ScenarioSet {
    /// Builds a scenario set; `nominal` defaults to uniform.
    pub fn new(returns: Vec<Vec<f64>>, nominal: Option<Vec<f64>>) -> Result<Self> {
        let m = returns.len();
        if m == 0 {
            return Err(Error::InvalidInput("at least one scenario is required".into()));
        }
        let n = returns[0].len();
        if n == 0 {
            return Err(Error::InvalidInput("at least one asset is required".into()));
        }
        for (j, row) in returns.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!("scenario {j} has {} returns, expected {n}", row.len())));
            }
            if let Some((i, &x)) = row.iter().enumerate().find(|(_, &x)| !(x > -1.0) || !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "return {x} at scenario {j}, asset {i} must exceed -1"
                )));
            }
        }
        let nominal = match nominal {
            None => vec![1.0 / m as f64; m],
            Some(p) => normalize_probability(p, m, 1e-9)?,
        };
        let per_asset_min = (0..n)
            .map(|i| returns.iter().map(|r| r[i]).fold(f64::INFINITY, f64::min))
            .collect();
        let per_asset_max = (0..n)
            .map(|i| returns.iter().map(|r| r[i]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        Ok(ScenarioSet { returns, nominal, per_asset_min, per_asset_max })
    }

    pub fn from_spec(spec: &ScenarioSpec) -> Result<Self> {
        ScenarioSet::new(spec.returns.clone(), spec.nominal.clone())
    }

    /// Number of assets `n`.
    pub fn n(&self) -> usize {
        self.returns[0].len()
    }

    /// Number of scenarios `m`.
    pub fn m(&self) -> usize {
        self.returns.len()
    }

    pub fn returns(&self) -> &[Vec<f64>] {
        &self.returns
    }

    pub fn scenario(&self, j: usize) -> &[f64] {
        &self.returns[j]
    }

    pub fn nominal(&self) -> &[f64] {
        &self.nominal
    }

    pub fn per_asset_min(&self) -> &[f64] {
        &self.per_asset_min
    }

    pub fn per_asset_max(&self) -> &[f64] {
        &self.per_asset_max
    }

    pub fn with_nominal(&self, nominal: Vec<f64>) -> Result<Self> {
        ScenarioSet::new(self.returns.clone(), Some(nominal))
    }
}

/// Checks `p` lies on the simplex within `tol` and rescales it to sum to one.
pub(crate) fn normalize_probability(p: Vec<f64>, m: usize, tol: f64) -> Result<Vec<f64>> {
    if p.len() != m {
        return Err(Error::Dimension(format!("probability vector has {} entries, expected {m}", p.len())));
    }
    if p.iter().any(|&v| !v.is_finite() || v < -tol) {
        return Err(Error::NotProbability(format!("{p:?} has a negative entry")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::NotProbability(format!("{p:?} sums to {sum}")));
    }
    Ok(p.into_iter().map(|v| v.max(0.0) / sum).collect())
}

/// Per-period simple returns; one scenario per period, uniform nominal.
pub fn compute_returns(prices: &PriceTable) -> Result<ScenarioSet> {
    if prices.num_rows() < 2 {
        return Err(Error::InvalidInput("need at least two price rows".into()));
    }
    let returns = prices
        .prices
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(s0, s1)| (s1 - s0) / s0).collect())
        .collect();
    ScenarioSet::new(returns, None)
}

/// Returns shifted by the proportional cost: `x - c` for long (or flat)
/// positions, `x + c` for short ones.
pub fn fee_adjusted_returns(scenarios: &ScenarioSet, costs: &[f64], weights: &Weights) -> Result<Vec<Vec<f64>>> {
    check_costs(costs, scenarios.n())?;
    weights.check_len(scenarios.n())?;
    Ok(scenarios
        .returns()
        .iter()
        .map(|row| fee_adjust(row, costs, &weights.k))
        .collect())
}

pub(crate) fn fee_adjust(x: &[f64], costs: &[f64], k: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(costs)
        .zip(k)
        .map(|((x, c), k)| if *k >= 0.0 { x - c } else { x + c })
        .collect()
}

pub(crate) fn check_costs(costs: &[f64], n: usize) -> Result<()> {
    if costs.len() != n {
        return Err(Error::Dimension(format!("{} costs for {n} assets", costs.len())));
    }
    if let Some(c) = costs.iter().find(|c| !(**c >= 0.0 && **c < 1.0)) {
        return Err(Error::InvalidInput(format!("cost {c} outside [0, 1)")));
    }
    Ok(())
}
