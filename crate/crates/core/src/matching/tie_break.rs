//! Sorting orders that differ only in how runs of equal values are arranged.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{MatchError, TieBreak};

/// Row-major height x width interpretation of a flat sample vector, used by
/// the neighbor tie-break to form 3x3 local means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpatialLayout {
    pub height: usize,
    pub width: usize,
}

impl SpatialLayout {
    pub fn new(height: usize, width: usize) -> Self {
        Self { height, width }
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Produces the ascending order of a sample. Implementations agree on the
/// value order and differ only within runs of equal values.
pub trait TieBreakStrategy: Send + Sync {
    /// Registry key; also the CLI spelling.
    fn name(&self) -> &'static str;

    /// Returns indices arranging `values` ascending.
    fn order(
        &self,
        values: &[f64],
        layout: Option<SpatialLayout>,
        rng: &mut dyn Rng,
    ) -> Result<Vec<usize>, MatchError>;
}

/// Ascending order of `values` under the given tie-break rule.
///
/// `layout` is required by [`TieBreak::Neighbor`] and ignored by the other
/// rules; `rng` is consumed only by [`TieBreak::Random`].
pub fn sort_permutation(
    values: &[f64],
    tie_break: TieBreak,
    layout: Option<SpatialLayout>,
    rng: &mut dyn Rng,
) -> Result<Vec<usize>, MatchError> {
    if values.is_empty() {
        return Err(MatchError::EmptyInput);
    }
    tie_break.strategy().order(values, layout, rng)
}

pub(crate) struct QuicksortTie;
pub(crate) struct PreserveTie;
pub(crate) struct RandomTie;
pub(crate) struct NeighborTie;

pub(crate) static QUICKSORT: QuicksortTie = QuicksortTie;
pub(crate) static PRESERVE: PreserveTie = PreserveTie;
pub(crate) static RANDOM: RandomTie = RandomTie;
pub(crate) static NEIGHBOR: NeighborTie = NeighborTie;

impl TieBreakStrategy for QuicksortTie {
    fn name(&self) -> &'static str {
        "quicksort"
    }

    fn order(
        &self,
        values: &[f64],
        _layout: Option<SpatialLayout>,
        _rng: &mut dyn Rng,
    ) -> Result<Vec<usize>, MatchError> {
        let mut pairs: Vec<(f64, usize)> = values.iter().copied().zip(0..).collect();
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        Ok(pairs.into_iter().map(|(_, i)| i).collect())
    }
}

/// Stable order via the index as the final comparison key; equivalent to a
/// stable sort but without its buffer allocation.
fn preserve_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

impl TieBreakStrategy for PreserveTie {
    fn name(&self) -> &'static str {
        "preserve"
    }

    fn order(
        &self,
        values: &[f64],
        _layout: Option<SpatialLayout>,
        _rng: &mut dyn Rng,
    ) -> Result<Vec<usize>, MatchError> {
        Ok(preserve_order(values))
    }
}

impl TieBreakStrategy for RandomTie {
    fn name(&self) -> &'static str {
        "random"
    }

    fn order(
        &self,
        values: &[f64],
        _layout: Option<SpatialLayout>,
        rng: &mut dyn Rng,
    ) -> Result<Vec<usize>, MatchError> {
        let mut idx = preserve_order(values);
        let mut start = 0;
        while start < idx.len() {
            let mut end = start + 1;
            while end < idx.len() && values[idx[end]].total_cmp(&values[idx[start]]).is_eq() {
                end += 1;
            }
            if end - start > 1 {
                idx[start..end].shuffle(rng);
            }
            start = end;
        }
        Ok(idx)
    }
}

impl TieBreakStrategy for NeighborTie {
    fn name(&self) -> &'static str {
        "neighbor"
    }

    fn order(
        &self,
        values: &[f64],
        layout: Option<SpatialLayout>,
        _rng: &mut dyn Rng,
    ) -> Result<Vec<usize>, MatchError> {
        let layout = layout.ok_or(MatchError::MissingLayout)?;
        if layout.len() != values.len() {
            return Err(MatchError::LayoutMismatch {
                height: layout.height,
                width: layout.width,
                len: values.len(),
            });
        }
        let h = layout.height as isize;
        let w = layout.width as isize;
        let mut keys = vec![0.0f64; values.len()];
        for r in 0..h {
            for c in 0..w {
                let mut sum = 0.0;
                for dr in -1..=1 {
                    for dc in -1..=1 {
                        let rr = (r + dr).clamp(0, h - 1);
                        let cc = (c + dc).clamp(0, w - 1);
                        sum += values[(rr * w + cc) as usize];
                    }
                }
                keys[(r * w + c) as usize] = sum / 9.0;
            }
        }
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_unstable_by(|&a, &b| {
            values[a]
                .total_cmp(&values[b])
                .then(keys[a].total_cmp(&keys[b]))
                .then(a.cmp(&b))
        });
        Ok(idx)
    }
}
