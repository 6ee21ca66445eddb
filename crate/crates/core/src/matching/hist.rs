//! Classical histogram matching: quantile lookup against the style's
//! empirical CDF. Equal content values map to equal outputs, so ties are
//! merged rather than distinguished; the sort-matching methods exist to fix
//! exactly that.

use super::{check_non_empty, MatchContext, MatchError, MatchMethod, MatchOutput};

/// Maps each content value to the style quantile at its empirical CDF rank:
/// `x_i` becomes the `ceil(F_x(x_i) * m)`-th smallest of the `m` style
/// values. Runs of equal content values share one output value. No backward
/// contract; this is a value-level diagnostic baseline.
pub fn hist_match(x: &[f64], y: &[f64]) -> Result<MatchOutput, MatchError> {
    check_non_empty(x, y)?;
    let n = x.len();
    let m = y.len();

    let mut xp: Vec<(f64, usize)> = x.iter().copied().zip(0..).collect();
    xp.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut ys = y.to_vec();
    ys.sort_unstable_by(f64::total_cmp);

    let mut values = vec![0.0f64; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && xp[end].0.total_cmp(&xp[start].0).is_eq() {
            end += 1;
        }
        // count_le = end: elements <= this value. Quantile index: smallest
        // j with j/m >= count_le/n, i.e. ceil(count_le * m / n), 1-based.
        let j = (end as u128 * m as u128).div_ceil(n as u128) as usize;
        let mapped = ys[j - 1];
        for p in &xp[start..end] {
            values[p.1] = mapped;
        }
        start = end;
    }

    Ok(MatchOutput {
        values,
        permutation: None,
        lambda_used: None,
        backward: None,
    })
}

fn quantize(v: &[f64], bins: usize) -> Vec<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &t in v {
        lo = lo.min(t);
        hi = hi.max(t);
    }
    if hi <= lo {
        return v.to_vec();
    }
    let width = (hi - lo) / bins as f64;
    v.iter()
        .map(|&t| {
            let k = (((t - lo) / width) as usize).min(bins - 1);
            lo + (k as f64 + 0.5) * width
        })
        .collect()
}

/// Sorted unique values with per-value counts, mirroring the steps an array
/// library takes: argsort, gather into a sorted copy, boundary flags, then
/// compress. `inverse`, when requested, receives the unique-rank of every
/// original position via a scatter through the argsort permutation.
fn unique_counts(
    v: &[f64],
    mut inverse: Option<&mut [usize]>,
) -> (Vec<f64>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..v.len()).collect();
    perm.sort_unstable_by(|&a, &b| v[a].total_cmp(&v[b]));
    let sorted: Vec<f64> = perm.iter().map(|&i| v[i]).collect();

    let mut flags = vec![false; v.len()];
    flags[0] = true;
    for i in 1..v.len() {
        flags[i] = sorted[i].total_cmp(&sorted[i - 1]).is_ne();
    }

    let mut uniq = Vec::new();
    let mut counts = Vec::new();
    let mut rank = 0usize;
    for i in 0..v.len() {
        if flags[i] {
            uniq.push(sorted[i]);
            counts.push(0usize);
            rank = uniq.len() - 1;
        }
        counts[rank] += 1;
        if let Some(inv) = inverse.as_deref_mut() {
            inv[perm[i]] = rank;
        }
    }
    (uniq, counts)
}

/// Binned histogram matching, the approximate path an image-processing
/// library takes: quantize both sides onto `bins` equal-width bin centers,
/// build unique-value CDFs, map content quantiles onto style values by
/// linear interpolation, and gather through the inverse index.
///
/// Unlike [`hist_match`], outputs are interpolated bin centers rather than
/// exact style values; this exists as a benchmark baseline and for parity
/// checks against binned pipelines.
pub fn hist_match_binned(x: &[f64], y: &[f64], bins: usize) -> Result<Vec<f64>, MatchError> {
    check_non_empty(x, y)?;
    if bins < 2 {
        return Err(MatchError::InvalidBins(bins));
    }

    let qx = quantize(x, bins);
    let qy = quantize(y, bins);

    let mut inverse = vec![0usize; qx.len()];
    let (_ux, cx) = unique_counts(&qx, Some(&mut inverse));
    let (uy, cy) = unique_counts(&qy, None);

    let n = qx.len() as f64;
    let m = qy.len() as f64;
    let mut acc = 0usize;
    let src_q: Vec<f64> = cx
        .iter()
        .map(|c| {
            acc += c;
            acc as f64 / n
        })
        .collect();
    acc = 0;
    let tmpl_q: Vec<f64> = cy
        .iter()
        .map(|c| {
            acc += c;
            acc as f64 / m
        })
        .collect();

    // Linear interpolation of (tmpl_q, uy) at each src quantile, clamped to
    // the endpoints.
    let mapped: Vec<f64> = src_q
        .iter()
        .map(|&q| {
            if q <= tmpl_q[0] {
                uy[0]
            } else if q >= tmpl_q[tmpl_q.len() - 1] {
                uy[uy.len() - 1]
            } else {
                let hi = tmpl_q.partition_point(|&t| t < q);
                let lo = hi - 1;
                let span = tmpl_q[hi] - tmpl_q[lo];
                let frac = if span > 0.0 { (q - tmpl_q[lo]) / span } else { 0.0 };
                uy[lo] + (uy[hi] - uy[lo]) * frac
            }
        })
        .collect();

    Ok(inverse.into_iter().map(|r| mapped[r]).collect())
}

pub(crate) struct HistMethod;

pub(crate) static HM_METHOD: HistMethod = HistMethod;

impl MatchMethod for HistMethod {
    fn name(&self) -> &'static str {
        "hm"
    }

    fn supports_gradient(&self) -> bool {
        false
    }

    fn apply(
        &self,
        x: &[f64],
        y: &[f64],
        _ctx: &mut MatchContext<'_>,
    ) -> Result<MatchOutput, MatchError> {
        hist_match(x, y)
    }
}
