//! Chi-square tests used to check sampler uniformity.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{precondition, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
}

fn upper_tail(statistic: f64, dof: usize) -> Result<ChiSquareResult> {
    if dof == 0 {
        return Err(precondition("chi-square test needs at least two cells"));
    }
    let dist = ChiSquared::new(dof as f64).map_err(|e| precondition(e.to_string()))?;
    Ok(ChiSquareResult {
        statistic,
        dof: dof as f64,
        p_value: dist.sf(statistic),
    })
}

/// Goodness of fit of observed counts against the uniform law on the cells.
pub fn chi_square_uniform(observed: &[u64]) -> Result<ChiSquareResult> {
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(precondition("chi-square test needs observations"));
    }
    let expected = total as f64 / observed.len() as f64;
    let stat = observed
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    upper_tail(stat, observed.len().saturating_sub(1))
}

/// Two-sample homogeneity test on paired cell counts with possibly
/// different totals. Cells empty in both samples are dropped.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareResult> {
    if a.len() != b.len() {
        return Err(precondition("two-sample chi-square needs equal cell counts"));
    }
    let (ta, tb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if ta == 0.0 || tb == 0.0 {
        return Err(precondition("two-sample chi-square needs observations in both samples"));
    }
    let (ka, kb) = ((tb / ta).sqrt(), (ta / tb).sqrt());
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        cells += 1;
        stat += (ka * x as f64 - kb * y as f64).powi(2) / (x + y) as f64;
    }
    upper_tail(stat, cells.saturating_sub(1))
}
