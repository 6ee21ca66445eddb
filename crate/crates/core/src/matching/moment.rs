//! Moment matching: shift and rescale the content values so their mean and
//! standard deviation follow the style values.

use super::{
    check_non_empty, BackwardContext, MatchContext, MatchError, MatchMethod, MatchOutput,
};

/// Which moments to transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMode {
    /// Shift only: `o = x - mean(x) + mean(y)`.
    Mean,
    /// Rescale about the content mean: `o = (x - mean(x)) * s + mean(x)`.
    Std,
    /// Full transfer: `o = (x - mean(x)) * s + mean(y)`.
    Both,
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Matches the mean and/or standard deviation of `x` to those of `y`.
///
/// The scale factor is `sqrt(var(y) + epsilon) / sqrt(var(x) + epsilon)`;
/// `epsilon` keeps near-constant channels finite and may be 0 for exact
/// arithmetic on non-degenerate inputs. Statistics are detached in the
/// backward contract: the upstream gradient passes to `x`, zeros to `y`.
pub fn moment_match(
    x: &[f64],
    y: &[f64],
    mode: MomentMode,
    epsilon: f64,
) -> Result<MatchOutput, MatchError> {
    check_non_empty(x, y)?;
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(MatchError::InvalidEpsilon(epsilon));
    }

    let (mean_x, var_x) = mean_var(x);
    let (mean_y, var_y) = mean_var(y);

    let values = match mode {
        MomentMode::Mean => x.iter().map(|v| v - mean_x + mean_y).collect(),
        MomentMode::Std | MomentMode::Both => {
            let scale = (var_y + epsilon).sqrt() / (var_x + epsilon).sqrt();
            let offset = if matches!(mode, MomentMode::Std) {
                mean_x
            } else {
                mean_y
            };
            x.iter().map(|v| (v - mean_x) * scale + offset).collect()
        }
    };

    Ok(MatchOutput {
        values,
        permutation: None,
        lambda_used: None,
        backward: Some(BackwardContext::new(x.len(), y.len())),
    })
}

pub(crate) struct MomentMethod {
    mode: MomentMode,
    key: &'static str,
}

pub(crate) static MEAN_METHOD: MomentMethod = MomentMethod {
    mode: MomentMode::Mean,
    key: "mean",
};
pub(crate) static STD_METHOD: MomentMethod = MomentMethod {
    mode: MomentMode::Std,
    key: "std",
};
pub(crate) static BOTH_METHOD: MomentMethod = MomentMethod {
    mode: MomentMode::Both,
    key: "adain",
};

impl MatchMethod for MomentMethod {
    fn name(&self) -> &'static str {
        self.key
    }

    fn apply(
        &self,
        x: &[f64],
        y: &[f64],
        ctx: &mut MatchContext<'_>,
    ) -> Result<MatchOutput, MatchError> {
        moment_match(x, y, self.mode, ctx.epsilon)
    }
}
