//! Channel-wise distribution matching for feature tensors and sample vectors.
//!
//! The crate provides three families of matching operators, all applied to a
//! content vector `x` and a style vector `y`:
//!
//! * sort matching ([`matching::efdm`], [`matching::efdmix`]): reorders the
//!   style values onto the rank positions of the content values, transferring
//!   the empirical distribution exactly;
//! * moment matching ([`matching::moment_match`]): shifts and rescales the
//!   content values so their mean and standard deviation match the style;
//! * histogram matching ([`matching::hist_match`]): classical quantile lookup
//!   against the style's empirical CDF.
//!
//! [`tensorops`] lifts these operators channel-by-channel over rank-4
//! `B x C x H x W` tensors and handles `.npy` interchange; [`stats`] provides
//! the moment summaries and distribution distances used to verify results.
//!
//! Matching methods and tie-break strategies are trait objects registered by
//! name (see [`matching::method_registry`] and
//! [`matching::tie_break_registry`]), so callers can select them at runtime
//! from configuration strings.

pub mod matching;
pub mod stats;
pub mod tensorops;

pub use matching::{
    LambdaSpec, MatchConfig, MatchError, MatchOutput, Method, SortPermutation, TieBreak,
};
pub use stats::{StatsError, StatsSummary};
pub use tensorops::{Dtype, FeatureTensor, Shape, TensorError};
