//! Sample-stream preparation: filtering, unit-interval mapping, and the
//! reshape between a flat stream and the row-major M×N grid.

use crate::real::{from_f64, Real};
use crate::wav::AudioSignal;

/// How a signed signal is mapped into the `[0, 1]` grid domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrepMode {
    /// Keep only samples `>= 0`. Matches the reference pipeline; the
    /// discarded negatives make the original audio unrecoverable.
    PositiveOnly,
    /// Map every sample by `x -> (x + 1) / 2`, which is invertible and
    /// preserves length.
    OffsetFull,
}

impl PrepMode {
    /// Stable token used in manifests and on the command line.
    pub fn token(self) -> &'static str {
        match self {
            PrepMode::PositiveOnly => "positive",
            PrepMode::OffsetFull => "offset",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "positive" => Some(PrepMode::PositiveOnly),
            "offset" => Some(PrepMode::OffsetFull),
            _ => None,
        }
    }
}

/// Shape errors raised by [`reshape_to_grid`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrepError {
    #[error("{len} values do not fit a {rows}x{cols} grid (pad={pad})")]
    ShapeMismatch {
        len: usize,
        rows: usize,
        cols: usize,
        pad: bool,
    },
}

/// Row-major real-valued grid in `[0, 1]`.
///
/// The first `meaningful_count` values are data; anything after is padding
/// introduced to fill the rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
    meaningful_count: usize,
}

impl<T: Real> SampleGrid<T> {
    /// Build a grid from raw parts, enforcing the shape invariants.
    pub fn new(
        rows: usize,
        cols: usize,
        values: Vec<T>,
        meaningful_count: usize,
    ) -> Result<Self, PrepError> {
        let cells = rows.checked_mul(cols).filter(|_| rows > 0 && cols > 0);
        match cells {
            Some(cells) if values.len() == cells && meaningful_count <= cells => Ok(SampleGrid {
                rows,
                cols,
                values,
                meaningful_count,
            }),
            _ => Err(PrepError::ShapeMismatch {
                len: values.len(),
                rows,
                cols,
                pad: false,
            }),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn meaningful_count(&self) -> usize {
        self.meaningful_count
    }

    pub fn value(&self, row: usize, col: usize) -> T {
        self.values[row * self.cols + col]
    }
}

/// Subsequence of samples with value `>= 0`, order preserved.
pub fn filter_positive<T: Real>(signal: &AudioSignal<T>) -> Vec<T> {
    signal
        .samples
        .iter()
        .copied()
        .filter(|v| *v >= T::zero())
        .collect()
}

/// Map a signal into the `[0, 1]` grid domain according to `mode`.
pub fn apply_mode<T: Real>(signal: &AudioSignal<T>, mode: PrepMode) -> Vec<T> {
    match mode {
        PrepMode::PositiveOnly => filter_positive(signal),
        PrepMode::OffsetFull => {
            let half = from_f64::<T>(0.5);
            signal
                .samples
                .iter()
                .map(|&x| (x + T::one()) * half)
                .collect()
        }
    }
}

/// Undo [`apply_mode`] on decoded values.
///
/// `OffsetFull` inverts the affine map; `PositiveOnly` is not invertible, so
/// decoded values pass through unchanged.
pub fn invert_mode<T: Real>(values: &[T], mode: PrepMode) -> Vec<T> {
    match mode {
        PrepMode::PositiveOnly => values.to_vec(),
        PrepMode::OffsetFull => {
            let two = from_f64::<T>(2.0);
            values.iter().map(|&y| y * two - T::one()).collect()
        }
    }
}

/// Place a flat value stream into a row-major `rows`×`cols` grid.
///
/// With `pad = false` the stream must fill the grid exactly; with `pad = true`
/// it may be shorter and trailing cells are set to `0.0`. `meaningful_count`
/// records the original stream length either way.
pub fn reshape_to_grid<T: Real>(
    values: &[T],
    rows: usize,
    cols: usize,
    pad: bool,
) -> Result<SampleGrid<T>, PrepError> {
    let mismatch = || PrepError::ShapeMismatch {
        len: values.len(),
        rows,
        cols,
        pad,
    };
    if rows == 0 || cols == 0 {
        return Err(mismatch());
    }
    let cells = rows.checked_mul(cols).ok_or_else(mismatch)?;
    let fits = if pad {
        values.len() <= cells
    } else {
        values.len() == cells
    };
    if !fits {
        return Err(mismatch());
    }

    let mut grid = Vec::with_capacity(cells);
    grid.extend_from_slice(values);
    grid.resize(cells, T::zero());
    Ok(SampleGrid {
        rows,
        cols,
        values: grid,
        meaningful_count: values.len(),
    })
}

/// The first `meaningful_count` values in row-major order; padding dropped.
pub fn flatten_grid<T: Real>(grid: &SampleGrid<T>) -> Vec<T> {
    grid.values[..grid.meaningful_count].to_vec()
}

/// Grid shape for `n` values with a fixed column count: `cols = cols_hint`,
/// `rows = max(1, ceil(n / cols))`. Reshaping with `pad = true` always fits.
pub fn default_shape(n: usize, cols_hint: usize) -> (usize, usize) {
    assert!(cols_hint >= 1, "cols_hint must be positive");
    let rows = n.div_ceil(cols_hint).max(1);
    (rows, cols_hint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn signal(samples: Vec<f64>) -> AudioSignal<f64> {
        AudioSignal::mono(samples, 44100)
    }

    #[test]
    fn filter_keeps_zero_and_positive() {
        assert_eq!(
            filter_positive(&signal(vec![-0.5, 0.0, 0.25])),
            vec![0.0, 0.25]
        );
        assert!(filter_positive(&signal(vec![-0.9, -0.1])).is_empty());
    }

    #[test]
    fn filter_matches_brute_force_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<f64> = (0..10_000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let expected: Vec<f64> = samples.iter().copied().filter(|v| *v >= 0.0).collect();
        assert_eq!(filter_positive(&signal(samples)), expected);
    }

    #[test]
    fn offset_mode_is_the_affine_map() {
        assert_eq!(
            apply_mode(&signal(vec![-1.0, 0.0, 0.5]), PrepMode::OffsetFull),
            vec![0.0, 0.5, 0.75]
        );
        assert_eq!(
            apply_mode(&signal(vec![-1.0, 0.0, 0.5]), PrepMode::PositiveOnly),
            vec![0.0, 0.5]
        );
    }

    #[test]
    fn reshape_is_row_major() {
        let grid = reshape_to_grid(&[1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0], 2, 3, false).unwrap();
        assert_eq!(grid.value(0, 0), 1.0);
        assert_eq!(grid.value(0, 2), 3.0);
        assert_eq!(grid.value(1, 0), 4.0);
        assert_eq!(grid.value(1, 2), 6.0);
        assert_eq!(grid.meaningful_count(), 6);
    }

    #[test]
    fn reshape_pads_with_zero() {
        let grid = reshape_to_grid(&[0.1f64, 0.2, 0.3, 0.4, 0.5], 2, 3, true).unwrap();
        assert_eq!(grid.value(1, 2), 0.0);
        assert_eq!(grid.meaningful_count(), 5);
        assert_eq!(flatten_grid(&grid), vec![0.1, 0.2, 0.3, 0.4, 0.5]);
    }

    #[test]
    fn reshape_rejects_overflowing_input() {
        let err = reshape_to_grid(&[0.0f64; 7], 2, 3, true).unwrap_err();
        assert!(matches!(err, PrepError::ShapeMismatch { len: 7, .. }));
        assert!(reshape_to_grid(&[0.0f64; 5], 2, 3, false).is_err());
        assert!(reshape_to_grid(&[0.0f64; 4], 0, 3, true).is_err());
    }

    #[test]
    fn reshape_handles_the_two_million_sample_shape() {
        let values: Vec<f64> = (0..2_000_000).map(|i| (i % 1000) as f64 / 1000.0).collect();
        let grid = reshape_to_grid(&values, 1000, 2000, false).unwrap();
        assert_eq!(grid.rows(), 1000);
        assert_eq!(grid.cols(), 2000);
        assert_eq!(grid.meaningful_count(), 2_000_000);
        // Row i starts at the stream offset i * 2000.
        assert_eq!(grid.value(1, 0), values[2000]);
        assert_eq!(grid.value(999, 1999), values[1_999_999]);
    }

    #[test]
    fn default_shape_examples() {
        assert_eq!(default_shape(2_000_000, 2000), (1000, 2000));
        assert_eq!(default_shape(0, 2000), (1, 2000));
        assert_eq!(default_shape(2001, 2000), (2, 2000));
    }

    #[test]
    fn flatten_drops_padding_exactly() {
        let grid = reshape_to_grid(&[9.0f64], 2, 2, true).unwrap();
        assert_eq!(flatten_grid(&grid), vec![9.0]);
    }

    proptest! {
        #[test]
        fn reshape_then_flatten_is_identity(
            values in proptest::collection::vec(0.0f64..=1.0, 0..200),
            rows in 1usize..20,
            cols in 1usize..20,
        ) {
            prop_assume!(values.len() <= rows * cols);
            let grid = reshape_to_grid(&values, rows, cols, true).unwrap();
            prop_assert_eq!(flatten_grid(&grid), values);
        }

        #[test]
        fn filter_output_is_an_ordered_subsequence(
            samples in proptest::collection::vec(-1.0f64..1.0, 0..200),
        ) {
            let out = filter_positive(&signal(samples.clone()));
            prop_assert!(out.iter().all(|v| *v >= 0.0));
            // Subsequence check: each output value consumes input left to right.
            let mut it = samples.iter();
            for v in &out {
                prop_assert!(it.any(|s| s == v));
            }
        }

        #[test]
        fn offset_mode_round_trips(
            samples in proptest::collection::vec(-1.0f64..1.0, 0..200),
        ) {
            let sig = signal(samples.clone());
            let mapped = apply_mode(&sig, PrepMode::OffsetFull);
            prop_assert!(mapped.iter().all(|v| (0.0..1.0).contains(v)));
            let back = invert_mode(&mapped, PrepMode::OffsetFull);
            for (a, b) in samples.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-15);
            }
        }

        #[test]
        fn grid_values_stay_in_unit_interval(
            samples in proptest::collection::vec(-1.0f64..1.0, 1..300),
            cols in 1usize..50,
        ) {
            let sig = signal(samples);
            for mode in [PrepMode::PositiveOnly, PrepMode::OffsetFull] {
                let prepared = apply_mode(&sig, mode);
                let (rows, cols) = default_shape(prepared.len(), cols);
                let grid = reshape_to_grid(&prepared, rows, cols, true).unwrap();
                prop_assert!(grid.values().iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }
}
