use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constant-mix portfolio weights `K`, as fractions of current wealth.
///
/// When the weights come out of the optimizer they also carry the long /
/// short decomposition `K = K_L + K_S` with `K_L >= 0` and `K_S <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub k: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_long: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_short: Option<Vec<f64>>,
}

impl Weights {
    pub fn new(k: Vec<f64>) -> Self {
        Weights { k, k_long: None, k_short: None }
    }

    pub fn zeros(n: usize) -> Self {
        Weights::new(vec![0.0; n])
    }

    pub fn from_split(k_long: Vec<f64>, k_short: Vec<f64>) -> Result<Self> {
        if k_long.len() != k_short.len() {
            return Err(Error::Dimension(format!(
                "long part has {} entries, short part {}",
                k_long.len(),
                k_short.len()
            )));
        }
        if k_long.iter().any(|&v| v < 0.0) || k_short.iter().any(|&v| v > 0.0) {
            return Err(Error::InvalidInput("long part must be >= 0 and short part <= 0".into()));
        }
        let k = k_long.iter().zip(&k_short).map(|(l, s)| l + s).collect();
        Ok(Weights { k, k_long: Some(k_long), k_short: Some(k_short) })
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// Portfolio return `K'x` for one return vector.
    pub fn portfolio_return(&self, x: &[f64]) -> f64 {
        self.k.iter().zip(x).map(|(k, x)| k * x).sum()
    }

    /// Gross exposure as the leverage constraint measures it: `sum(K_L - K_S)`
    /// when the split is known, otherwise `sum |K_i|`.
    pub fn gross_exposure(&self) -> f64 {
        match (&self.k_long, &self.k_short) {
            (Some(l), Some(s)) => l.iter().zip(s).map(|(l, s)| l - s).sum(),
            _ => self.k.iter().map(|k| k.abs()).sum(),
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.k.len() != n {
            return Err(Error::Dimension(format!("{} weights for {} assets", self.k.len(), n)));
        }
        Ok(())
    }
}
