//! Mixing-weight sampling.

use rand::Rng;
use rand_distr::{Beta, Distribution};

use super::MatchError;

/// One draw from Beta(alpha, alpha). Symmetric around 0.5; small alpha
/// concentrates mass near 0 and 1, so most draws barely mix or almost fully
/// swap the two distributions.
pub fn sample_lambda(alpha: f64, rng: &mut dyn Rng) -> Result<f64, MatchError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(MatchError::InvalidAlpha(alpha));
    }
    let beta = Beta::new(alpha, alpha).map_err(|_| MatchError::InvalidAlpha(alpha))?;
    Ok(beta.sample(rng))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn draws_stay_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let l = sample_lambda(0.1, &mut rng).unwrap();
            assert!((0.0..=1.0).contains(&l));
        }
    }

    #[test]
    fn fixed_seed_reproduces_sequence() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..16)
                .map(|_| sample_lambda(0.1, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }

    #[test]
    fn small_alpha_is_bimodal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| sample_lambda(0.1, &mut rng).unwrap())
            .collect();
        let extreme = draws
            .iter()
            .filter(|l| **l < 0.1 || **l > 0.9)
            .count() as f64
            / draws.len() as f64;
        assert!(extreme >= 0.6, "only {extreme} of draws were extreme");
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            sample_lambda(0.0, &mut rng).unwrap_err(),
            MatchError::InvalidAlpha(0.0)
        );
        assert_eq!(
            sample_lambda(-1.0, &mut rng).unwrap_err(),
            MatchError::InvalidAlpha(-1.0)
        );
        assert!(sample_lambda(f64::NAN, &mut rng).is_err());
    }
}
