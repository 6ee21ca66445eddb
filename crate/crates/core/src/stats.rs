//! Moment summaries, empirical CDFs, and distribution distances.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
}

/// First four standardized moments of a sample plus its largest magnitude.
///
/// `std` is the population standard deviation (divide by `n`). `skewness`
/// and `kurtosis` are the third and fourth standardized moments; both are
/// defined as 0 when `std` is 0, and `kurtosis` is otherwise at least 1.
/// `linf` is `max |v|` over the raw values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsSummary {
    pub mean: f64,
    pub std: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub linf: f64,
    pub n: usize,
}

/// Summarizes a sample. The accumulation runs over an internally sorted
/// copy, so any two permutations of the same values produce bitwise
/// identical summaries.
pub fn summarize(values: &[f64]) -> Result<StatsSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;

    let mean = sorted.iter().sum::<f64>() / n;
    let var = sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();

    let (skewness, kurtosis) = if std == 0.0 {
        (0.0, 0.0)
    } else {
        let mut m3 = 0.0;
        let mut m4 = 0.0;
        for v in &sorted {
            let z = (v - mean) / std;
            let z3 = z * z * z;
            m3 += z3;
            m4 += z3 * z;
        }
        (m3 / n, m4 / n)
    };

    let linf = f64::max(sorted[0].abs(), sorted[sorted.len() - 1].abs());
    Ok(StatsSummary {
        mean,
        std,
        skewness,
        kurtosis,
        linf,
        n: values.len(),
    })
}

/// Largest magnitude of the standardized values, `max |(v - mean) / std|`.
/// Returns 0 for a degenerate sample (`std == 0`).
pub fn standardized_linf(values: &[f64]) -> Result<f64, StatsError> {
    let s = summarize(values)?;
    if s.std == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for v in values {
        worst = worst.max(((v - s.mean) / s.std).abs());
    }
    Ok(worst)
}

/// Empirical CDF of `values` evaluated at `t`: the fraction of values `<= t`.
pub fn ecdf_eval(values: &[f64], t: f64) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let count = values.iter().filter(|v| **v <= t).count();
    Ok(count as f64 / values.len() as f64)
}

/// Exact two-sample Kolmogorov-Smirnov distance: the largest gap between the
/// two empirical CDFs, evaluated at every sample point of either input.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    // Adding 0.0 collapses -0.0 onto +0.0 so that total_cmp ordering agrees
    // with the numeric `<=` the CDF is defined by.
    let mut sa: Vec<f64> = a.iter().map(|v| v + 0.0).collect();
    let mut sb: Vec<f64> = b.iter().map(|v| v + 0.0).collect();
    sa.sort_unstable_by(f64::total_cmp);
    sb.sort_unstable_by(f64::total_cmp);

    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup = 0.0f64;
    while i < sa.len() || j < sb.len() {
        let t = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => {
                if x.total_cmp(&y).is_le() {
                    x
                } else {
                    y
                }
            }
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!("loop requires one side non-exhausted"),
        };
        while i < sa.len() && sa[i].total_cmp(&t).is_le() {
            i += 1;
        }
        while j < sb.len() && sb[j].total_cmp(&t).is_le() {
            j += 1;
        }
        let gap = (i as f64 / na - j as f64 / nb).abs();
        if gap > sup {
            sup = gap;
        }
    }
    Ok(sup)
}

/// Percentage of values that share their exact bit pattern with at least one
/// other value in the sample. Equality is bitwise (`f64::to_bits`), so
/// `-0.0` and `0.0` do not match.
pub fn equivalent_percent(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut counts: HashMap<u64, usize> = HashMap::with_capacity(values.len());
    for v in values {
        *counts.entry(v.to_bits()).or_insert(0) += 1;
    }
    let tied: usize = counts.values().filter(|c| **c >= 2).sum();
    Ok(tied as f64 * 100.0 / values.len() as f64)
}
