//! Distances between stylized and target features, and multi-style
//! interpolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{efdm_with_order, sort_permutation, MatchError, TieBreak};

/// How a vector difference is reduced to one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossReduction {
    /// Euclidean norm of the difference.
    #[default]
    Norm,
    /// Mean of the squared differences, as common deep-learning losses use.
    MeanSquared,
}

fn reduce(sum_sq: f64, n: usize, reduction: LossReduction) -> f64 {
    match reduction {
        LossReduction::Norm => sum_sq.sqrt(),
        LossReduction::MeanSquared => sum_sq / n as f64,
    }
}

/// Euclidean distance between a stylized feature vector and its target.
pub fn content_loss(f_stylized: &[f64], s_target: &[f64]) -> Result<f64, MatchError> {
    content_loss_with(f_stylized, s_target, LossReduction::Norm)
}

/// [`content_loss`] with a selectable reduction.
pub fn content_loss_with(
    f_stylized: &[f64],
    s_target: &[f64],
    reduction: LossReduction,
) -> Result<f64, MatchError> {
    if f_stylized.len() != s_target.len() {
        return Err(MatchError::LengthMismatch {
            x: f_stylized.len(),
            y: s_target.len(),
        });
    }
    if f_stylized.is_empty() {
        return Err(MatchError::EmptyInput);
    }
    let sum_sq = f_stylized
        .iter()
        .zip(s_target)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>();
    Ok(reduce(sum_sq, f_stylized.len(), reduction))
}

/// Sum over layers of the distance between each stylized-layer vector and
/// its sort-matched target: layer i contributes
/// `|| phi_i - efdm(phi_i, psi_i) ||`.
///
/// The tie-break rule only permutes target values among equal `phi` entries,
/// which leaves each squared distance unchanged; it is accepted so callers
/// can mirror their matching configuration. The random rule draws from a
/// fixed internal seed.
pub fn style_loss<V: AsRef<[f64]>>(
    stylized_layers: &[V],
    style_layers: &[V],
    tie_break: TieBreak,
) -> Result<f64, MatchError> {
    style_loss_with(stylized_layers, style_layers, tie_break, LossReduction::Norm)
}

/// [`style_loss`] with a selectable per-layer reduction.
pub fn style_loss_with<V: AsRef<[f64]>>(
    stylized_layers: &[V],
    style_layers: &[V],
    tie_break: TieBreak,
    reduction: LossReduction,
) -> Result<f64, MatchError> {
    if stylized_layers.len() != style_layers.len() {
        return Err(MatchError::LayerCount {
            left: stylized_layers.len(),
            right: style_layers.len(),
        });
    }
    if stylized_layers.is_empty() {
        return Err(MatchError::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut total = 0.0;
    for (phi, psi) in stylized_layers.iter().zip(style_layers) {
        let phi = phi.as_ref();
        let psi = psi.as_ref();
        if phi.len() != psi.len() {
            return Err(MatchError::LengthMismatch {
                x: phi.len(),
                y: psi.len(),
            });
        }
        let order = sort_permutation(phi, tie_break, None, &mut rng)?;
        let target = efdm_with_order(phi, psi, &order)?;
        total += content_loss_with(phi, &target, reduction)?;
    }
    Ok(total)
}

/// Weighted objective `content + omega * style`.
pub fn combined_loss(content: f64, style: f64, omega: f64) -> Result<f64, MatchError> {
    if !omega.is_finite() || omega < 0.0 {
        return Err(MatchError::InvalidOmega(omega));
    }
    Ok(content + omega * style)
}

/// Blends several styles onto one content vector: the weighted sum of each
/// style's sort-matched values, all sharing the content ordering computed
/// once under the default tie-break.
pub fn style_interpolate<V: AsRef<[f64]>>(
    x: &[f64],
    styles: &[V],
    weights: &[f64],
) -> Result<Vec<f64>, MatchError> {
    if x.is_empty() || styles.is_empty() {
        return Err(MatchError::EmptyInput);
    }
    if styles.len() != weights.len() {
        return Err(MatchError::WeightCount {
            styles: styles.len(),
            weights: weights.len(),
        });
    }
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(MatchError::NegativeWeight(w));
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(MatchError::WeightSum(sum));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let order = sort_permutation(x, TieBreak::Quicksort, None, &mut rng)?;
    let mut acc = vec![0.0f64; x.len()];
    for (style, &w) in styles.iter().zip(weights) {
        let matched = efdm_with_order(x, style.as_ref(), &order)?;
        for (a, m) in acc.iter_mut().zip(matched) {
            *a += w * m;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * (1.0 + b.abs())
    }

    #[test]
    fn content_loss_is_euclidean() {
        assert_eq!(content_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(content_loss(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 5.0);
        assert!(close(
            content_loss(&[1.0, 1.0, 1.0], &[0.0, 0.0, 0.0]).unwrap(),
            3.0f64.sqrt()
        ));
    }

    #[test]
    fn content_loss_mean_squared_reduction() {
        let got = content_loss_with(&[3.0, 4.0], &[0.0, 0.0], LossReduction::MeanSquared).unwrap();
        assert_eq!(got, 12.5);
    }

    #[test]
    fn content_loss_validates_lengths() {
        assert_eq!(
            content_loss(&[1.0], &[1.0, 2.0]).unwrap_err(),
            MatchError::LengthMismatch { x: 1, y: 2 }
        );
        assert_eq!(content_loss(&[], &[]).unwrap_err(), MatchError::EmptyInput);
    }

    #[test]
    fn style_loss_zero_when_already_matched() {
        // phi is already the sort-match of itself against psi: equal values,
        // same ranks.
        let phi = vec![vec![1.0, 4.0]];
        let psi = vec![vec![4.0, 1.0]];
        assert_eq!(style_loss(&phi, &psi, TieBreak::Quicksort).unwrap(), 0.0);
    }

    #[test]
    fn style_loss_single_layer_distance() {
        let phi = vec![vec![1.0, 2.0]];
        let psi = vec![vec![1.0, 4.0]];
        assert_eq!(style_loss(&phi, &psi, TieBreak::Quicksort).unwrap(), 2.0);
    }

    #[test]
    fn style_loss_sums_over_layers() {
        let phi = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        let psi = vec![vec![1.0, 4.0], vec![1.0, 4.0]];
        assert_eq!(style_loss(&phi, &psi, TieBreak::Quicksort).unwrap(), 4.0);
    }

    #[test]
    fn style_loss_validates_shapes() {
        let one = vec![vec![1.0]];
        let two = vec![vec![1.0], vec![2.0]];
        assert_eq!(
            style_loss(&one, &two, TieBreak::Quicksort).unwrap_err(),
            MatchError::LayerCount { left: 1, right: 2 }
        );
        let short = vec![vec![1.0, 2.0]];
        let long = vec![vec![1.0, 2.0, 3.0]];
        assert_eq!(
            style_loss(&short, &long, TieBreak::Quicksort).unwrap_err(),
            MatchError::LengthMismatch { x: 2, y: 3 }
        );
    }

    #[test]
    fn combined_loss_weights_style_term() {
        assert_eq!(combined_loss(1.0, 2.0, 10.0).unwrap(), 21.0);
        assert_eq!(combined_loss(3.5, 100.0, 0.0).unwrap(), 3.5);
        assert_eq!(combined_loss(0.0, 0.0, 10.0).unwrap(), 0.0);
        assert_eq!(
            combined_loss(1.0, 1.0, -2.0).unwrap_err(),
            MatchError::InvalidOmega(-2.0)
        );
    }

    #[test]
    fn interpolate_single_style_is_plain_matching() {
        let x = [0.0, 2.0];
        let styles = vec![vec![10.0, 14.0]];
        let got = style_interpolate(&x, &styles, &[1.0]).unwrap();
        assert_eq!(got, vec![10.0, 14.0]);
    }

    #[test]
    fn interpolate_identical_styles_collapses() {
        let x = [0.0, 2.0];
        let styles = vec![vec![10.0, 14.0], vec![10.0, 14.0]];
        let got = style_interpolate(&x, &styles, &[0.5, 0.5]).unwrap();
        assert_eq!(got, vec![10.0, 14.0]);
    }

    #[test]
    fn interpolate_blends_two_styles() {
        let x = [0.0, 2.0];
        let styles = vec![vec![10.0, 14.0], vec![20.0, 28.0]];
        let got = style_interpolate(&x, &styles, &[0.5, 0.5]).unwrap();
        assert_eq!(got, vec![15.0, 21.0]);
    }

    #[test]
    fn interpolate_validates_weights() {
        let x = [0.0, 2.0];
        let styles = vec![vec![10.0, 14.0], vec![20.0, 28.0]];
        assert_eq!(
            style_interpolate(&x, &styles, &[0.5]).unwrap_err(),
            MatchError::WeightCount {
                styles: 2,
                weights: 1
            }
        );
        assert_eq!(
            style_interpolate(&x, &styles, &[0.7, 0.7]).unwrap_err(),
            MatchError::WeightSum(1.4)
        );
        assert_eq!(
            style_interpolate(&x, &styles, &[1.5, -0.5]).unwrap_err(),
            MatchError::NegativeWeight(-0.5)
        );
        let bad_len = vec![vec![1.0, 2.0, 3.0]];
        assert_eq!(
            style_interpolate(&x, &bad_len, &[1.0]).unwrap_err(),
            MatchError::LengthMismatch { x: 2, y: 3 }
        );
    }
}
