use crate::error::{CflError, Result};

/// Nearest-rank percentile: the `⌈q/100·n⌉`-th smallest value (the minimum at `q = 0`).
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(CflError::domain("percentile of an empty sample"));
    }
    if !(0.0..=100.0).contains(&q) {
        return Err(CflError::domain(format!("percentile q={q} outside [0, 100]")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q / 100.0) * v.len() as f64).ceil() as usize;
    Ok(v[rank.clamp(1, v.len()) - 1])
}

pub fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(CflError::domain("mean of an empty sample"));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Empirical CDF points `(value, fraction ≤ value)` in ascending order.
pub fn cdf_points(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.into_iter()
        .enumerate()
        .map(|(k, x)| (x, (k + 1) as f64 / n))
        .collect()
}
