use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("need at least two cells, got {0}")]
    TooFewCells(usize),
    #[error("expected count per cell is {0}, below 5")]
    Underpowered(f64),
}

/// Pearson chi-square p-value of `counts` against the uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> Result<f64, StatsError> {
    let k = counts.len();
    if k < 2 {
        return Err(StatsError::TooFewCells(k));
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / k as f64;
    if expected < 5.0 {
        return Err(StatsError::Underpowered(expected));
    }
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((k - 1) as f64).expect("k >= 2");
    Ok(dist.sf(stat))
}

/// Least-squares slope of `ln y` against `ln x`. NaN when fewer than two distinct `x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.is_empty() || sxx < 1e-12 {
        return f64::NAN;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}
