//! Distribution-matching transforms over 1-D sample vectors.
//!
//! Every transform takes a content vector `x` and one or more style vectors
//! `y` and returns values aligned with `x`'s positions. The matching methods
//! and the tie-break rules used while sorting are both trait objects,
//! registered by name so configuration strings select them at runtime.

mod hist;
mod lambda;
mod loss;
mod moment;
mod sort_match;
mod tie_break;

pub use hist::{hist_match, hist_match_binned};
pub use lambda::sample_lambda;
pub use loss::{
    combined_loss, content_loss, content_loss_with, style_interpolate, style_loss,
    style_loss_with, LossReduction,
};
pub use moment::{moment_match, MomentMode};
pub use sort_match::{efdm, efdm_in, efdm_with_order, efdmix, efdmix_in, efdmix_with_order};
pub use tie_break::{sort_permutation, SpatialLayout, TieBreakStrategy};

use rand::Rng;
use thiserror::Error;

/// Default Beta-distribution parameter for sampled mixing weights.
pub const DEFAULT_ALPHA: f64 = 0.1;
/// Default variance stabilizer for the moment methods.
pub const DEFAULT_EPSILON: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("empty input")]
    EmptyInput,
    #[error(
        "length mismatch: content has {x} values, style has {y}; resample the style side \
         (tensorops::resample_sorted interpolates or drops values) so the lengths agree"
    )]
    LengthMismatch { x: usize, y: usize },
    #[error("lambda {0} is outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("alpha {0} must be positive and finite")]
    InvalidAlpha(f64),
    #[error("epsilon {0} is out of range")]
    InvalidEpsilon(f64),
    #[error("omega {0} must be non-negative and finite")]
    InvalidOmega(f64),
    #[error("weights sum to {0}, expected 1 within 1e-9")]
    WeightSum(f64),
    #[error("weight {0} is negative")]
    NegativeWeight(f64),
    #[error("{styles} styles but {weights} weights")]
    WeightCount { styles: usize, weights: usize },
    #[error("layer count mismatch: {left} vs {right}")]
    LayerCount { left: usize, right: usize },
    #[error("neighbor tie-break needs a spatial layout")]
    MissingLayout,
    #[error("layout {height}x{width} does not cover {len} values")]
    LayoutMismatch {
        height: usize,
        width: usize,
        len: usize,
    },
    #[error("order is not a permutation of 0..{0}")]
    InvalidOrder(usize),
    #[error("resample count must be at least 1")]
    EmptyResample,
    #[error("bin count {0} must be at least 2")]
    InvalidBins(usize),
    #[error("unknown method '{0}'")]
    UnknownMethod(String),
    #[error("unknown tie-break '{0}'")]
    UnknownTieBreak(String),
    #[error("gradient has {got} values, output has {expected}")]
    GradientLength { expected: usize, got: usize },
}

/// Rule for ordering runs of equal values during sorting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TieBreak {
    /// Whatever an unstable comparison sort yields; fastest, order arbitrary.
    #[default]
    Quicksort,
    /// Original index order (stable sort).
    Preserve,
    /// Uniformly random order among ties, driven by the caller's RNG.
    Random,
    /// Ascending 3x3 local-mean secondary key, then index; needs a layout.
    Neighbor,
}

impl TieBreak {
    pub const ALL: [TieBreak; 4] = [
        TieBreak::Quicksort,
        TieBreak::Preserve,
        TieBreak::Random,
        TieBreak::Neighbor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TieBreak::Quicksort => "quicksort",
            TieBreak::Preserve => "preserve",
            TieBreak::Random => "random",
            TieBreak::Neighbor => "neighbor",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, MatchError> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == name)
            .ok_or_else(|| MatchError::UnknownTieBreak(name.to_string()))
    }

    pub fn strategy(self) -> &'static dyn TieBreakStrategy {
        match self {
            TieBreak::Quicksort => &tie_break::QUICKSORT,
            TieBreak::Preserve => &tie_break::PRESERVE,
            TieBreak::Random => &tie_break::RANDOM,
            TieBreak::Neighbor => &tie_break::NEIGHBOR,
        }
    }
}

/// Matching method selector. Each variant maps to a registered
/// [`MatchMethod`] strategy; `name` is the registry key and CLI spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MomentMean,
    MomentStd,
    MomentBoth,
    HistMatch,
    Efdm,
    Efdmix,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::MomentMean,
        Method::MomentStd,
        Method::MomentBoth,
        Method::HistMatch,
        Method::Efdm,
        Method::Efdmix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::MomentMean => "mean",
            Method::MomentStd => "std",
            Method::MomentBoth => "adain",
            Method::HistMatch => "hm",
            Method::Efdm => "efdm",
            Method::Efdmix => "efdmix",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, MatchError> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| MatchError::UnknownMethod(name.to_string()))
    }

    pub fn strategy(self) -> &'static dyn MatchMethod {
        match self {
            Method::MomentMean => &moment::MEAN_METHOD,
            Method::MomentStd => &moment::STD_METHOD,
            Method::MomentBoth => &moment::BOTH_METHOD,
            Method::HistMatch => &hist::HM_METHOD,
            Method::Efdm => &sort_match::EFDM_METHOD,
            Method::Efdmix => &sort_match::EFDMIX_METHOD,
        }
    }
}

/// Mixing weight policy for the efdmix method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSpec {
    /// Use this weight for every instance.
    Fixed(f64),
    /// Draw one weight per instance from Beta(alpha, alpha).
    Sampled,
}

/// Full runtime selection of a matching transform.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchConfig {
    pub method: Method,
    pub tie_break: TieBreak,
    pub lambda: LambdaSpec,
    pub alpha: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            method: Method::Efdm,
            tie_break: TieBreak::Quicksort,
            lambda: LambdaSpec::Sampled,
            alpha: DEFAULT_ALPHA,
            epsilon: DEFAULT_EPSILON,
            seed: 0,
        }
    }
}

impl MatchConfig {
    /// Checks the numeric fields. A fixed lambda must lie in [0, 1], alpha
    /// must be positive, and epsilon strictly positive (configured pipelines
    /// must keep degenerate channels finite; only the free-standing
    /// [`moment_match`] accepts epsilon 0 for exact-arithmetic use).
    pub fn validate(&self) -> Result<(), MatchError> {
        if let LambdaSpec::Fixed(l) = self.lambda {
            if !l.is_finite() || !(0.0..=1.0).contains(&l) {
                return Err(MatchError::LambdaOutOfRange(l));
            }
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(MatchError::InvalidAlpha(self.alpha));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(MatchError::InvalidEpsilon(self.epsilon));
        }
        Ok(())
    }
}

/// Ascending orderings of the two matched vectors. `tau[i]` is the index of
/// the i-th smallest content value and `kappa[i]` the index of the i-th
/// smallest style value, with equal values arranged by `tie_break`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortPermutation {
    pub tau: Vec<usize>,
    pub kappa: Vec<usize>,
    pub tie_break: TieBreak,
}

/// Reverse-mode contract of a matched output. The matched style values and
/// every detached statistic are constants of the computation, so the
/// upstream gradient passes to the content input unchanged and the style
/// input receives zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackwardContext {
    x_len: usize,
    y_len: usize,
}

impl BackwardContext {
    pub(crate) fn new(x_len: usize, y_len: usize) -> Self {
        Self { x_len, y_len }
    }

    /// Maps an upstream gradient over the output to `(grad_x, grad_y)`.
    pub fn apply(&self, upstream: &[f64]) -> Result<(Vec<f64>, Vec<f64>), MatchError> {
        if upstream.len() != self.x_len {
            return Err(MatchError::GradientLength {
                expected: self.x_len,
                got: upstream.len(),
            });
        }
        Ok((upstream.to_vec(), vec![0.0; self.y_len]))
    }
}

/// Result of one matching transform.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchOutput {
    /// Matched values, aligned with the content input's positions.
    pub values: Vec<f64>,
    /// Sort orders used; present for the sort-matching methods only.
    pub permutation: Option<SortPermutation>,
    /// Mixing weight actually applied; present for efdmix only.
    pub lambda_used: Option<f64>,
    /// Reverse-mode contract; absent for histogram matching.
    pub backward: Option<BackwardContext>,
}

/// Per-call inputs shared by every [`MatchMethod`]: the tie-break rule, an
/// optional spatial layout for the neighbor rule, the mixing weight for
/// efdmix, the variance stabilizer for the moment methods, and the RNG.
pub struct MatchContext<'a> {
    pub tie_break: TieBreak,
    pub layout: Option<SpatialLayout>,
    pub lambda: f64,
    pub epsilon: f64,
    pub rng: &'a mut dyn Rng,
}

impl<'a> MatchContext<'a> {
    pub fn new(rng: &'a mut dyn Rng) -> Self {
        Self {
            tie_break: TieBreak::default(),
            layout: None,
            lambda: 0.0,
            epsilon: DEFAULT_EPSILON,
            rng,
        }
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn with_layout(mut self, layout: SpatialLayout) -> Self {
        self.layout = Some(layout);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// A matching transform selectable at runtime.
pub trait MatchMethod: Send + Sync {
    /// Registry key; also the CLI spelling.
    fn name(&self) -> &'static str;
    /// Whether the method requires `|x| == |y|`.
    fn equal_length_required(&self) -> bool {
        false
    }
    /// Whether outputs carry a backward context.
    fn supports_gradient(&self) -> bool {
        true
    }
    fn apply(
        &self,
        x: &[f64],
        y: &[f64],
        ctx: &mut MatchContext<'_>,
    ) -> Result<MatchOutput, MatchError>;
}

static METHODS: [&dyn MatchMethod; 6] = [
    &moment::MEAN_METHOD,
    &moment::STD_METHOD,
    &moment::BOTH_METHOD,
    &hist::HM_METHOD,
    &sort_match::EFDM_METHOD,
    &sort_match::EFDMIX_METHOD,
];

/// All registered matching methods.
pub fn method_registry() -> &'static [&'static dyn MatchMethod] {
    &METHODS
}

/// Registry keys of all matching methods, in registration order.
pub fn method_names() -> Vec<&'static str> {
    METHODS.iter().map(|m| m.name()).collect()
}

/// Looks up a matching method by its registry key.
pub fn method_by_name(name: &str) -> Result<&'static dyn MatchMethod, MatchError> {
    METHODS
        .iter()
        .copied()
        .find(|m| m.name() == name)
        .ok_or_else(|| MatchError::UnknownMethod(name.to_string()))
}

static TIE_BREAKS: [&dyn TieBreakStrategy; 4] = [
    &tie_break::QUICKSORT,
    &tie_break::PRESERVE,
    &tie_break::RANDOM,
    &tie_break::NEIGHBOR,
];

/// All registered tie-break strategies.
pub fn tie_break_registry() -> &'static [&'static dyn TieBreakStrategy] {
    &TIE_BREAKS
}

/// Registry keys of all tie-break strategies, in registration order.
pub fn tie_break_names() -> Vec<&'static str> {
    TIE_BREAKS.iter().map(|t| t.name()).collect()
}

/// Looks up a tie-break strategy by its registry key.
pub fn tie_break_by_name(name: &str) -> Result<&'static dyn TieBreakStrategy, MatchError> {
    TIE_BREAKS
        .iter()
        .copied()
        .find(|t| t.name() == name)
        .ok_or_else(|| MatchError::UnknownTieBreak(name.to_string()))
}

pub(crate) fn check_non_empty(x: &[f64], y: &[f64]) -> Result<(), MatchError> {
    if x.is_empty() || y.is_empty() {
        return Err(MatchError::EmptyInput);
    }
    Ok(())
}

pub(crate) fn check_equal_len(x: &[f64], y: &[f64]) -> Result<(), MatchError> {
    if x.len() != y.len() {
        return Err(MatchError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    Ok(())
}
