use super::{CoverageEstimate, SinrBatch};
use crate::error::{Error, Result};

/// Exceedance probabilities `P(SINR ≥ beta)` of a batch.
pub fn empirical_coverage(batch: &SinrBatch, beta_grid: &[f64]) -> Result<Vec<CoverageEstimate>> {
    let ccdf = EmpiricalCcdf::new(&batch.sinr_values)?;
    if beta_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument("beta grid must be sorted ascending".into()));
    }
    Ok(beta_grid.iter().map(|&b| ccdf.estimate(b)).collect())
}

/// Sorted SINR sample supporting exact exceedance counts at any threshold.
#[derive(Debug, Clone)]
pub struct EmpiricalCcdf {
    sorted: Vec<f64>,
}

impl EmpiricalCcdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty SINR batch".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("SINR batch contains NaN".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn exceedances(&self, beta: f64) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&v| v < beta)
    }

    pub fn coverage(&self, beta: f64) -> f64 {
        self.exceedances(beta) as f64 / self.sorted.len() as f64
    }

    pub fn estimate(&self, beta: f64) -> CoverageEstimate {
        CoverageEstimate::from_counts(beta, self.exceedances(beta), self.sorted.len())
    }
}
