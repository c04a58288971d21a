//! Run configuration shared by the CLI subcommands.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::ambiguity::{AmbiguitySet, AmbiguitySpec};
use crate::error::{Error, Result};
use crate::robust::{Approximation, TradingConstraints};
use crate::scenarios::{compute_returns, load_prices, PriceTable, ScenarioSet, ScenarioSpec, WideCsv};
use crate::weights::Weights;

/// A number applied to every asset, or one value per asset.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PerAsset {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl PerAsset {
    pub fn broadcast(&self, n: usize, field: &str) -> Result<Vec<f64>> {
        match self {
            PerAsset::Scalar(v) => Ok(vec![*v; n]),
            PerAsset::Vector(v) if v.len() == n => Ok(v.clone()),
            PerAsset::Vector(v) => Err(Error::Config(format!("{field} has {} entries for {n} assets", v.len()))),
        }
    }
}

fn default_epsilon() -> f64 {
    0.01
}

fn default_leverage() -> f64 {
    1.0
}

fn default_costs() -> PerAsset {
    PerAsset::Scalar(0.0001)
}

fn default_risk_free_total() -> f64 {
    0.01
}

fn default_initial_wealth() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Wide price CSV, resolved against the config file's directory.
    #[serde(default)]
    pub prices_path: Option<PathBuf>,
    /// Inline scenarios, used when no price file is given.
    #[serde(default)]
    pub scenarios: Option<ScenarioSpec>,
    pub ambiguity: AmbiguitySpec,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Fixed number of tangents; overrides `epsilon`.
    #[serde(default)]
    pub hyperplanes: Option<usize>,
    #[serde(default = "default_leverage")]
    pub leverage: f64,
    #[serde(default)]
    pub k_min: Option<PerAsset>,
    #[serde(default)]
    pub k_max: Option<PerAsset>,
    #[serde(default = "default_costs")]
    pub costs: PerAsset,
    #[serde(default = "default_risk_free_total")]
    pub risk_free_total: f64,
    /// Per-period rate; overrides `risk_free_total / N`.
    #[serde(default)]
    pub risk_free: Option<f64>,
    #[serde(default = "default_initial_wealth")]
    pub initial_wealth: f64,
    /// Number of return periods in the in-sample segment.
    #[serde(default)]
    pub split: Option<usize>,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
}

fn default_delimiter() -> char {
    ','
}

/// Return paths for the backtest: the whole history, or its two segments.
#[derive(Debug, Clone)]
pub enum BacktestData {
    Full(Vec<Vec<f64>>),
    Split { in_sample: Vec<Vec<f64>>, out_of_sample: Vec<Vec<f64>> },
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let mut config: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(p) = &config.prices_path {
            if p.is_relative() {
                let base = path.parent().unwrap_or_else(|| Path::new(""));
                config.prices_path = Some(base.join(p));
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        match (&self.prices_path, &self.scenarios) {
            (Some(_), Some(_)) => return Err(Error::Config("give either prices_path or scenarios, not both".into())),
            (None, None) => return Err(Error::Config("one of prices_path or scenarios is required".into())),
            _ => {}
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.hyperplanes == Some(0) {
            return Err(Error::Config("hyperplanes must be at least 1".into()));
        }
        if !(self.initial_wealth > 0.0) {
            return Err(Error::Config("initial_wealth must be positive".into()));
        }
        if !self.delimiter.is_ascii() {
            return Err(Error::Config(format!("delimiter {:?} is not ASCII", self.delimiter)));
        }
        Ok(())
    }

    fn price_table(&self) -> Result<Option<PriceTable>> {
        match &self.prices_path {
            Some(p) => Ok(Some(load_prices(p, WideCsv { delimiter: self.delimiter as u8 })?)),
            None => Ok(None),
        }
    }

    fn check_split(&self, periods: usize) -> Result<()> {
        if let Some(s) = self.split {
            if s == 0 || s >= periods {
                return Err(Error::Config(format!("split {s} must lie strictly inside 1..{periods}")));
            }
        }
        Ok(())
    }

    /// Scenarios used by the optimizer: the in-sample returns when split.
    pub fn scenarios(&self) -> Result<ScenarioSet> {
        let all = match self.price_table()? {
            Some(prices) => compute_returns(&prices)?,
            None => ScenarioSet::from_spec(self.scenarios.as_ref().expect("validated"))?,
        };
        match self.split {
            None => Ok(all),
            Some(s) => {
                self.check_split(all.m())?;
                ScenarioSet::new(all.returns()[..s].to_vec(), None)
            }
        }
    }

    pub fn backtest_data(&self) -> Result<BacktestData> {
        let returns = match self.price_table()? {
            Some(prices) => compute_returns(&prices)?.returns().to_vec(),
            None => self.scenarios.as_ref().expect("validated").returns.clone(),
        };
        match self.split {
            None => Ok(BacktestData::Full(returns)),
            Some(s) => {
                self.check_split(returns.len())?;
                let out_of_sample = returns[s..].to_vec();
                let mut in_sample = returns;
                in_sample.truncate(s);
                Ok(BacktestData::Split { in_sample, out_of_sample })
            }
        }
    }

    pub fn ambiguity(&self, scenarios: &ScenarioSet) -> Result<AmbiguitySet> {
        self.ambiguity.build(scenarios.m(), scenarios.nominal())
    }

    pub fn constraints(&self, n: usize) -> Result<TradingConstraints> {
        let k_min = match &self.k_min {
            Some(v) => v.broadcast(n, "k_min")?,
            None => vec![0.0; n],
        };
        let k_max = match &self.k_max {
            Some(v) => v.broadcast(n, "k_max")?,
            None => vec![self.leverage / n as f64; n],
        };
        TradingConstraints::new(self.leverage, k_min, k_max)
    }

    pub fn approximation(&self) -> Approximation {
        match self.hyperplanes {
            Some(count) => Approximation::Count(count),
            None => Approximation::Epsilon(self.epsilon),
        }
    }

    pub fn costs(&self, n: usize) -> Result<Vec<f64>> {
        self.costs.broadcast(n, "costs")
    }

    pub fn risk_free(&self, periods: usize) -> f64 {
        self.risk_free.unwrap_or(self.risk_free_total / periods as f64)
    }
}

/// Reads `{"k":[...]}` or an optimizer output with a `weights` object.
pub fn load_weights(path: &Path) -> Result<Weights> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_weights(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn parse_weights(text: &str) -> Result<Weights> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let inner = match value.get("weights") {
        Some(w) if value.get("k").is_none() => w.clone(),
        _ => value,
    };
    let w: Weights = serde_json::from_value(inner).map_err(|e| Error::Config(e.to_string()))?;
    match (w.k_long.clone(), w.k_short.clone()) {
        (Some(l), Some(s)) => {
            let split = Weights::from_split(l, s)?;
            if split.k.iter().zip(&w.k).any(|(a, b)| (a - b).abs() > 1e-9) {
                return Err(Error::Config("k differs from k_long + k_short".into()));
            }
            Ok(Weights { k: w.k, ..split })
        }
        (None, None) => Ok(w),
        _ => Err(Error::Config("k_long and k_short must be given together".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"{
        "scenarios": {"returns": [[0.1, -0.1], [-0.25, 0.3]], "nominal": [0.7, 0.3]},
        "ambiguity": {"type": "box", "gamma": 0.1},
        "k_max": 0.5
    }"#;

    #[test]
    fn defaults() {
        let c = RunConfig::from_json(TOY).unwrap();
        assert_eq!(c.epsilon, 0.01);
        assert_eq!(c.leverage, 1.0);
        assert_eq!(c.costs(2).unwrap(), vec![0.0001; 2]);
        assert_eq!(c.risk_free(4), 0.0025);
        let cons = c.constraints(2).unwrap();
        assert_eq!(cons.k_min(), &[0.0, 0.0]);
        assert_eq!(cons.k_max(), &[0.5, 0.5]);
        let s = c.scenarios().unwrap();
        assert_eq!(s.nominal(), &[0.7, 0.3]);
        assert!(c.ambiguity(&s).unwrap().contains(&[0.73, 0.27], 1e-12).unwrap());
    }

    #[test]
    fn default_k_max_is_leverage_over_n() {
        let c = RunConfig::from_json(
            r#"{"scenarios": {"returns": [[0.1, 0.0, 0.2, -0.1]]}, "ambiguity": {"type": "box", "gamma": 0}, "leverage": 2}"#,
        )
        .unwrap();
        assert_eq!(c.constraints(4).unwrap().k_max(), &[0.5; 4]);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_json(r#"{"ambiguity": {"type": "box", "gamma": 0}}"#).is_err());
        assert!(RunConfig::from_json(&TOY.replace("\"k_max\"", "\"kmax\"")).is_err());
        let c = RunConfig::from_json(&TOY.replace("\"k_max\": 0.5", "\"k_max\": [0.5]")).unwrap();
        assert!(c.constraints(2).is_err());
        let c = RunConfig::from_json(&TOY.replace("\"k_max\": 0.5", "\"k_min\": 0.6, \"k_max\": 0.5")).unwrap();
        assert!(c.constraints(2).is_err());
    }

    #[test]
    fn weights_formats() {
        assert_eq!(parse_weights(r#"{"k":[0.5, 0.5]}"#).unwrap().k, vec![0.5, 0.5]);
        let w = parse_weights(r#"{"lp_value": 1, "weights": {"k":[0.2, -0.1], "k_long":[0.2, 0], "k_short":[0, -0.1]}}"#)
            .unwrap();
        assert!((w.gross_exposure() - 0.3).abs() < 1e-15);
        assert!(parse_weights(r#"{"k":[0.5], "k_long":[0.5]}"#).is_err());
        assert!(parse_weights(r#"{"w":[0.5]}"#).is_err());
    }

    #[test]
    fn split_segments() {
        let c = RunConfig::from_json(
            r#"{"scenarios": {"returns": [[0.1], [0.2], [-0.1], [0.05]]}, "ambiguity": {"type": "box", "gamma": 0}, "split": 3}"#,
        )
        .unwrap();
        assert_eq!(c.scenarios().unwrap().m(), 3);
        match c.backtest_data().unwrap() {
            BacktestData::Split { in_sample, out_of_sample } => {
                assert_eq!(in_sample.len(), 3);
                assert_eq!(out_of_sample, vec![vec![0.05]]);
            }
            BacktestData::Full(_) => panic!("expected split"),
        }
    }
}
