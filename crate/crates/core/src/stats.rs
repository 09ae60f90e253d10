//! Sample statistics for batch summaries.

/// Mean and 95% half-width under the normal approximation,
/// `1.96 * s / sqrt(n)` with the sample standard deviation `s`.
/// A single sample has zero half-width; no samples gives `None`.
pub fn confidence_interval_95(samples: &[f64]) -> Option<(f64, f64)> {
    let n = samples.len();
    if n == 0 {
        return None;
    }
    let mean = mean(samples)?;
    let half = match sample_variance(samples) {
        Some(var) => 1.96 * var.sqrt() / (n as f64).sqrt(),
        None => 0.0,
    };
    Some((mean, half))
}

pub fn mean(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    Some(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// Unbiased sample variance; needs at least two samples.
pub fn sample_variance(samples: &[f64]) -> Option<f64> {
    let n = samples.len();
    if n < 2 {
        return None;
    }
    let m = mean(samples)?;
    Some(samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64)
}
