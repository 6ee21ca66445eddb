//! Sort matching: place the i-th smallest style value at the position of
//! the i-th smallest content value. The output's value multiset equals the
//! style's exactly, so every distribution statistic transfers exactly.

use rand::Rng;

use super::{
    check_equal_len, check_non_empty, BackwardContext, MatchContext, MatchError, MatchMethod,
    MatchOutput, SortPermutation, TieBreak,
};

fn check_order(order: &[usize], n: usize) -> Result<(), MatchError> {
    if order.len() != n {
        return Err(MatchError::InvalidOrder(n));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(MatchError::InvalidOrder(n));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Matches the distribution of `y` onto the rank positions of `x`.
///
/// Output position `tau[i]` receives `y[kappa[i]]`, where `tau` and `kappa`
/// are the ascending orders of `x` and `y`. The backward contract treats the
/// placed style values and the subtracted content copy as constants: the
/// upstream gradient flows to `x` unchanged, `y` receives zeros.
pub fn efdm(
    x: &[f64],
    y: &[f64],
    tie_break: TieBreak,
    rng: &mut dyn Rng,
) -> Result<MatchOutput, MatchError> {
    let mut ctx = MatchContext::new(rng).with_tie_break(tie_break);
    efdm_in(x, y, &mut ctx)
}

/// [`efdm`] with an explicit [`MatchContext`] (layout, tie-break, RNG).
pub fn efdm_in(
    x: &[f64],
    y: &[f64],
    ctx: &mut MatchContext<'_>,
) -> Result<MatchOutput, MatchError> {
    check_non_empty(x, y)?;
    check_equal_len(x, y)?;
    let strategy = ctx.tie_break.strategy();
    let tau = strategy.order(x, ctx.layout, ctx.rng)?;
    let kappa = strategy.order(y, ctx.layout, ctx.rng)?;

    let mut values = vec![0.0f64; x.len()];
    for i in 0..x.len() {
        values[tau[i]] = y[kappa[i]];
    }

    Ok(MatchOutput {
        values,
        permutation: Some(SortPermutation {
            tau,
            kappa,
            tie_break: ctx.tie_break,
        }),
        lambda_used: None,
        backward: Some(BackwardContext::new(x.len(), y.len())),
    })
}

/// Convex mix between the content values and the sort-matched style values:
/// position `tau[i]` receives `x[tau[i]] + (1-lambda) * (y[kappa[i]] -
/// x[tau[i]])`, with the subtraction term detached in the backward contract.
///
/// `lambda = 1` returns `x` bitwise; `lambda = 0` returns the [`efdm`]
/// values bitwise (both endpoints short-circuit so no floating-point
/// round trip can perturb the identities).
pub fn efdmix(
    x: &[f64],
    y: &[f64],
    lambda: f64,
    tie_break: TieBreak,
    rng: &mut dyn Rng,
) -> Result<MatchOutput, MatchError> {
    let mut ctx = MatchContext::new(rng)
        .with_tie_break(tie_break)
        .with_lambda(lambda);
    efdmix_in(x, y, &mut ctx)
}

/// [`efdmix`] with an explicit [`MatchContext`]; the mixing weight is read
/// from `ctx.lambda`.
pub fn efdmix_in(
    x: &[f64],
    y: &[f64],
    ctx: &mut MatchContext<'_>,
) -> Result<MatchOutput, MatchError> {
    let lambda = ctx.lambda;
    if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
        return Err(MatchError::LambdaOutOfRange(lambda));
    }
    check_non_empty(x, y)?;
    check_equal_len(x, y)?;
    let strategy = ctx.tie_break.strategy();
    // Both orders are always computed, whatever lambda is, so RNG-consuming
    // strategies draw identically at the endpoints and in between.
    let tau = strategy.order(x, ctx.layout, ctx.rng)?;
    let kappa = strategy.order(y, ctx.layout, ctx.rng)?;

    let n = x.len();
    let values = if lambda == 1.0 {
        x.to_vec()
    } else {
        let mut values = vec![0.0f64; n];
        if lambda == 0.0 {
            for i in 0..n {
                values[tau[i]] = y[kappa[i]];
            }
        } else {
            let keep = 1.0 - lambda;
            for i in 0..n {
                let xi = x[tau[i]];
                values[tau[i]] = xi + keep * y[kappa[i]] - keep * xi;
            }
        }
        values
    };

    Ok(MatchOutput {
        values,
        permutation: Some(SortPermutation {
            tau,
            kappa,
            tie_break: ctx.tie_break,
        }),
        lambda_used: Some(lambda),
        backward: Some(BackwardContext::new(n, n)),
    })
}

/// Sort matching against a precomputed ascending order of `x`. Used when one
/// content ordering is shared across several style vectors; `y` is sorted by
/// value internally.
pub fn efdm_with_order(x: &[f64], y: &[f64], order: &[usize]) -> Result<Vec<f64>, MatchError> {
    check_non_empty(x, y)?;
    check_equal_len(x, y)?;
    check_order(order, x.len())?;
    let mut ys = y.to_vec();
    ys.sort_unstable_by(f64::total_cmp);
    let mut values = vec![0.0f64; x.len()];
    for (i, &t) in order.iter().enumerate() {
        values[t] = ys[i];
    }
    Ok(values)
}

/// [`efdmix`] against a precomputed ascending order of `x`, with the same
/// endpoint short-circuits.
pub fn efdmix_with_order(
    x: &[f64],
    y: &[f64],
    order: &[usize],
    lambda: f64,
) -> Result<Vec<f64>, MatchError> {
    if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
        return Err(MatchError::LambdaOutOfRange(lambda));
    }
    check_non_empty(x, y)?;
    check_equal_len(x, y)?;
    check_order(order, x.len())?;
    if lambda == 1.0 {
        return Ok(x.to_vec());
    }
    let mut ys = y.to_vec();
    ys.sort_unstable_by(f64::total_cmp);
    let mut values = vec![0.0f64; x.len()];
    if lambda == 0.0 {
        for (i, &t) in order.iter().enumerate() {
            values[t] = ys[i];
        }
    } else {
        let keep = 1.0 - lambda;
        for (i, &t) in order.iter().enumerate() {
            let xi = x[t];
            values[t] = xi + keep * ys[i] - keep * xi;
        }
    }
    Ok(values)
}

pub(crate) struct EfdmMethod;
pub(crate) struct EfdmixMethod;

pub(crate) static EFDM_METHOD: EfdmMethod = EfdmMethod;
pub(crate) static EFDMIX_METHOD: EfdmixMethod = EfdmixMethod;

impl MatchMethod for EfdmMethod {
    fn name(&self) -> &'static str {
        "efdm"
    }

    fn equal_length_required(&self) -> bool {
        true
    }

    fn apply(
        &self,
        x: &[f64],
        y: &[f64],
        ctx: &mut MatchContext<'_>,
    ) -> Result<MatchOutput, MatchError> {
        efdm_in(x, y, ctx)
    }
}

impl MatchMethod for EfdmixMethod {
    fn name(&self) -> &'static str {
        "efdmix"
    }

    fn equal_length_required(&self) -> bool {
        true
    }

    fn apply(
        &self,
        x: &[f64],
        y: &[f64],
        ctx: &mut MatchContext<'_>,
    ) -> Result<MatchOutput, MatchError> {
        efdmix_in(x, y, ctx)
    }
}
