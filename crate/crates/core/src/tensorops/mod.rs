//! Rank-4 feature tensors and batched channel-wise matching.

mod npy;

pub use npy::{read_tensor, read_tensor_from, write_tensor, write_tensor_to, NpyError};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::matching::{
    sample_lambda, BackwardContext, LambdaSpec, MatchConfig, MatchContext, MatchError, Method,
    SortPermutation, SpatialLayout,
};

/// Element type a tensor was stored with. Data is held as f64 in memory;
/// `F32` tensors are widened losslessly on read and narrowed on write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    pub fn descr(self) -> &'static str {
        match self {
            Dtype::F32 => "<f4",
            Dtype::F64 => "<f8",
        }
    }

    pub fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }
}

impl std::fmt::Display for Dtype {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Dtype::F32 => "f32",
            Dtype::F64 => "f64",
        })
    }
}

/// Batch x channels x height x width, row-major with width fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub batch: usize,
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl Shape {
    pub fn new(batch: usize, channels: usize, height: usize, width: usize) -> Self {
        Self {
            batch,
            channels,
            height,
            width,
        }
    }

    /// Samples per (batch, channel) row.
    pub fn plane(&self) -> usize {
        self.height * self.width
    }

    pub fn len(&self) -> usize {
        self.batch * self.channels * self.plane()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn layout(&self) -> SpatialLayout {
        SpatialLayout::new(self.height, self.width)
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}x{}x{}x{}",
            self.batch, self.channels, self.height, self.width
        )
    }
}

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("invalid shape {0}: every axis must be at least 1")]
    InvalidShape(Shape),
    #[error("data length {got} does not match shape {shape} ({expected} values)")]
    DataLength {
        shape: Shape,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),
    #[error("{axis} axis mismatch: content is {left}, style is {right}")]
    AxisMismatch {
        axis: &'static str,
        left: usize,
        right: usize,
    },
    #[error("dtype mismatch: content is {left}, style is {right}")]
    DtypeMismatch { left: Dtype, right: Dtype },
    #[error(transparent)]
    Match(#[from] MatchError),
}

/// A dense rank-4 tensor of finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    data: Vec<f64>,
    shape: Shape,
    dtype: Dtype,
}

impl FeatureTensor {
    /// Validates that every axis is at least 1, the data length matches the
    /// shape, and every value is finite.
    pub fn new(data: Vec<f64>, shape: Shape, dtype: Dtype) -> Result<Self, TensorError> {
        if shape.batch == 0 || shape.channels == 0 || shape.height == 0 || shape.width == 0 {
            return Err(TensorError::InvalidShape(shape));
        }
        if data.len() != shape.len() {
            return Err(TensorError::DataLength {
                shape,
                expected: shape.len(),
                got: data.len(),
            });
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(TensorError::NonFinite(bad));
        }
        Ok(Self { data, shape, dtype })
    }

    /// Constructor for data whose invariants are already established
    /// (outputs of matching transforms over validated inputs).
    pub(crate) fn from_validated(data: Vec<f64>, shape: Shape, dtype: Dtype) -> Self {
        debug_assert_eq!(data.len(), shape.len());
        Self { data, shape, dtype }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn dtype(&self) -> Dtype {
        self.dtype
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// The flattened H*W samples of one (batch, channel) row.
    pub fn row(&self, batch: usize, channel: usize) -> &[f64] {
        let plane = self.shape.plane();
        let start = (batch * self.shape.channels + channel) * plane;
        &self.data[start..start + plane]
    }
}

/// Matching record for one (batch, channel) row of a channel-wise run.
#[derive(Debug, Clone, PartialEq)]
pub struct RowRecord {
    pub batch: usize,
    pub channel: usize,
    pub lambda_used: Option<f64>,
    pub permutation: Option<SortPermutation>,
    pub backward: Option<BackwardContext>,
}

/// Result of [`apply_channelwise`]: the matched tensor plus per-row records.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelwiseOutput {
    pub tensor: FeatureTensor,
    pub rows: Vec<RowRecord>,
}

/// Applies the configured matching method independently to every
/// (batch, channel) row of `x` against the same row of `y`.
///
/// For the efdmix method with `LambdaSpec::Sampled`, one mixing weight is
/// drawn per batch instance and shared across that instance's channels.
/// Row work runs in parallel; per-row RNG streams are seeded serially up
/// front, so parallel and serial execution produce identical results.
///
/// The sort-matching methods require equal height and width unless
/// `resample` is set, in which case style rows of a different plane size are
/// first passed through [`resample_sorted`]. The moment and histogram
/// methods accept differing plane sizes as-is.
pub fn apply_channelwise(
    x: &FeatureTensor,
    y: &FeatureTensor,
    cfg: &MatchConfig,
    rng: &mut dyn Rng,
    resample: bool,
) -> Result<ChannelwiseOutput, TensorError> {
    cfg.validate()?;
    if x.dtype != y.dtype {
        return Err(TensorError::DtypeMismatch {
            left: x.dtype,
            right: y.dtype,
        });
    }
    let (sx, sy) = (x.shape, y.shape);
    if sx.batch != sy.batch {
        return Err(TensorError::AxisMismatch {
            axis: "batch",
            left: sx.batch,
            right: sy.batch,
        });
    }
    if sx.channels != sy.channels {
        return Err(TensorError::AxisMismatch {
            axis: "channel",
            left: sx.channels,
            right: sy.channels,
        });
    }
    let method = cfg.method.strategy();
    if method.equal_length_required() && !resample {
        if sx.height != sy.height {
            return Err(TensorError::AxisMismatch {
                axis: "height",
                left: sx.height,
                right: sy.height,
            });
        }
        if sx.width != sy.width {
            return Err(TensorError::AxisMismatch {
                axis: "width",
                left: sx.width,
                right: sy.width,
            });
        }
    }

    let batch = sx.batch;
    let channels = sx.channels;
    let lambdas: Vec<f64> = if cfg.method == Method::Efdmix {
        match cfg.lambda {
            LambdaSpec::Fixed(l) => vec![l; batch],
            LambdaSpec::Sampled => (0..batch)
                .map(|_| sample_lambda(cfg.alpha, rng))
                .collect::<Result<_, _>>()
                .map_err(TensorError::Match)?,
        }
    } else {
        vec![0.0; batch]
    };
    let seeds: Vec<u64> = (0..batch * channels).map(|_| rng.next_u64()).collect();

    let needs_resample =
        method.equal_length_required() && resample && sx.plane() != sy.plane();
    let mut out = vec![0.0f64; x.data.len()];
    let rows: Vec<RowRecord> = out
        .par_chunks_mut(sx.plane())
        .enumerate()
        .map(|(row, chunk)| -> Result<RowRecord, TensorError> {
            let b = row / channels;
            let c = row % channels;
            let x_row = x.row(b, c);
            let mut row_rng = ChaCha8Rng::seed_from_u64(seeds[row]);
            let mut ctx = MatchContext::new(&mut row_rng)
                .with_tie_break(cfg.tie_break)
                .with_layout(sx.layout())
                .with_lambda(lambdas[b])
                .with_epsilon(cfg.epsilon);
            let output = if needs_resample {
                let y_row = resample_sorted(y.row(b, c), x_row.len())?;
                method.apply(x_row, &y_row, &mut ctx)?
            } else {
                method.apply(x_row, y.row(b, c), &mut ctx)?
            };
            chunk.copy_from_slice(&output.values);
            Ok(RowRecord {
                batch: b,
                channel: c,
                lambda_used: output.lambda_used,
                permutation: output.permutation,
                backward: output.backward,
            })
        })
        .collect::<Result<_, _>>()?;

    Ok(ChannelwiseOutput {
        tensor: FeatureTensor::from_validated(out, sx, x.dtype),
        rows,
    })
}

/// Resamples a vector to length `n` by linear interpolation of its sorted
/// values at the fractional indices `j * (m-1) / (n-1)`. The output is
/// sorted and keeps the original minimum and maximum; `n == 1` yields the
/// median.
pub fn resample_sorted(y: &[f64], n: usize) -> Result<Vec<f64>, MatchError> {
    if y.is_empty() {
        return Err(MatchError::EmptyInput);
    }
    if n == 0 {
        return Err(MatchError::EmptyResample);
    }
    let mut s = y.to_vec();
    s.sort_unstable_by(f64::total_cmp);
    let m = s.len();
    if n == 1 {
        let mid = (m - 1) / 2;
        let median = if m % 2 == 1 {
            s[mid]
        } else {
            (s[mid] + s[mid + 1]) / 2.0
        };
        return Ok(vec![median]);
    }
    let den = (n - 1) as u128;
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let num = j as u128 * (m as u128 - 1);
        let i0 = (num / den) as usize;
        let rem = num % den;
        if rem == 0 {
            out.push(s[i0]);
        } else {
            let frac = rem as f64 / den as f64;
            out.push(s[i0] + (s[i0 + 1] - s[i0]) * frac);
        }
    }
    Ok(out)
}

/// Pairs every instance with another instance of the same batch: returns a
/// tensor whose instance `b` is `x`'s instance `perm(b)` for a uniformly
/// random permutation of the batch.
pub fn shuffle_pair(x: &FeatureTensor, rng: &mut dyn Rng) -> FeatureTensor {
    let batch = x.shape.batch;
    let mut perm: Vec<usize> = (0..batch).collect();
    perm.shuffle(rng);
    let block = x.shape.channels * x.shape.plane();
    let mut data = Vec::with_capacity(x.data.len());
    for &src in &perm {
        data.extend_from_slice(&x.data[src * block..(src + 1) * block]);
    }
    FeatureTensor::from_validated(data, x.shape, x.dtype)
}
