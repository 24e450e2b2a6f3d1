//! Band-wise sliding-maximum peak search.
//!
//! A time band is one frequency row traversed over frames; a frequency band is
//! one frame traversed over bins. Within a band every contiguous window of
//! length `d` nominates the index of its maximum (smallest index on ties) and
//! the nominations are de-duplicated. The union over bands is the peak mask
//! for one axis; [`Condition::Both`] keeps only points nominated on both axes.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::spectrogram::Spectrogram;

/// Which bands the search runs over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Condition {
    Time = 0,
    Frequency = 1,
    #[default]
    Both = 2,
}

impl From<Condition> for u8 {
    fn from(c: Condition) -> u8 {
        c as u8
    }
}

impl TryFrom<u8> for Condition {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Condition::Time),
            1 => Ok(Condition::Frequency),
            2 => Ok(Condition::Both),
            other => Err(Error::InvalidParams(format!("condition must be 0, 1 or 2, got {other}"))),
        }
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "0" | "time" => Ok(Condition::Time),
            "1" | "frequency" | "freq" => Ok(Condition::Frequency),
            "2" | "both" => Ok(Condition::Both),
            other => Err(Error::InvalidParams(format!("unknown condition '{other}'"))),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

/// A single search direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Time,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakSearchConfig {
    pub fraction: f64,
    pub condition: Condition,
}

impl Default for PeakSearchConfig {
    fn default() -> Self {
        PeakSearchConfig {
            fraction: 1.0 / 3.0,
            condition: Condition::Both,
        }
    }
}

impl PeakSearchConfig {
    pub fn new(fraction: f64, condition: Condition) -> Result<Self> {
        let c = PeakSearchConfig {
            fraction,
            condition,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "fraction must lie in (0, 1], got {}",
                self.fraction
            )));
        }
        Ok(())
    }

    /// Window length for an axis of `axis_len` elements:
    /// `max(2, round(fraction * axis_len))`, clamped to the axis length.
    pub fn window_len(&self, axis_len: usize) -> usize {
        let d = (self.fraction * axis_len as f64).round() as usize;
        d.max(2).min(axis_len)
    }
}

/// Binary identification matrix with the spectrogram's shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeakMask {
    bits: Grid<u8>,
}

impl PeakMask {
    pub fn empty(rows: usize, cols: usize) -> Self {
        PeakMask {
            bits: Grid::filled(rows, cols, 0),
        }
    }

    /// Wraps a 0/1 grid. Any other value is rejected.
    pub fn from_grid(bits: Grid<u8>) -> Result<Self> {
        if bits.as_slice().iter().any(|&b| b > 1) {
            return Err(Error::InvalidParams("mask entries must be 0 or 1".into()));
        }
        Ok(PeakMask { bits })
    }

    pub fn bits(&self) -> &Grid<u8> {
        &self.bits
    }

    pub fn shape(&self) -> (usize, usize) {
        self.bits.shape()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits.get(row, col) == 1
    }

    pub fn set(&mut self, row: usize, col: usize) {
        self.bits.set(row, col, 1);
    }

    pub fn count(&self) -> usize {
        self.bits.as_slice().iter().map(|&b| usize::from(b)).sum()
    }

    /// Set positions as `(row, col)`, ordered by column then row.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let (rows, cols) = self.shape();
        let mut out = Vec::with_capacity(self.count());
        for c in 0..cols {
            for r in 0..rows {
                if self.get(r, c) {
                    out.push((r, c));
                }
            }
        }
        out
    }

    /// Element-wise AND. Shapes must match.
    pub fn and(&self, other: &PeakMask) -> Result<PeakMask> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let data = self
            .bits
            .as_slice()
            .iter()
            .zip(other.bits.as_slice())
            .map(|(a, b)| a & b)
            .collect();
        let (rows, cols) = self.shape();
        Ok(PeakMask {
            bits: Grid::from_vec(rows, cols, data).expect("same shape"),
        })
    }

    pub fn crop(&self, rows: usize, cols: usize) -> PeakMask {
        PeakMask {
            bits: self.bits.crop(rows, cols),
        }
    }
}

/// Feeds the argmax of every window of `window_len` consecutive elements of a
/// band to `emit`, de-duplicated. `value(i)` reads the band's `i`-th element.
///
/// Uses a monotone deque of candidate indices whose values are non-increasing;
/// equal values keep the earlier index so ties resolve to the smallest index.
fn for_each_window_argmax(
    len: usize,
    window_len: usize,
    value: impl Fn(usize) -> f64,
    mut emit: impl FnMut(usize),
) {
    let mut deque: VecDeque<usize> = VecDeque::with_capacity(window_len);
    let mut last = None;
    for i in 0..len {
        let v = value(i);
        while deque.back().is_some_and(|&b| value(b) < v) {
            deque.pop_back();
        }
        deque.push_back(i);
        if i + 1 >= window_len {
            let start = i + 1 - window_len;
            while deque.front().is_some_and(|&f| f < start) {
                deque.pop_front();
            }
            let best = *deque.front().expect("window is non-empty");
            // window argmaxes are non-decreasing, so consecutive de-duplication suffices
            if last != Some(best) {
                emit(best);
                last = Some(best);
            }
        }
    }
}

/// Indices of the per-window maxima of `band`, sorted and de-duplicated.
pub fn sliding_band_max(band: &[f64], window_len: usize) -> Result<Vec<usize>> {
    if band.is_empty() {
        return Err(Error::EmptyBand);
    }
    if window_len == 0 {
        return Err(Error::InvalidParams("window length must be positive".into()));
    }
    if window_len > band.len() {
        return Err(Error::WindowTooLong {
            window_len,
            band_len: band.len(),
        });
    }
    let mut out = Vec::new();
    for_each_window_argmax(band.len(), window_len, |i| band[i], |i| out.push(i));
    Ok(out)
}

fn check_grid(values: &Grid<f64>, config: &PeakSearchConfig) -> Result<()> {
    config.validate()?;
    if values.is_empty() {
        return Err(Error::EmptyBand);
    }
    Ok(())
}

/// Peak mask from sliding maxima along a single axis of a bare matrix.
pub fn peak_mask_axis_grid(values: &Grid<f64>, config: &PeakSearchConfig, axis: Axis) -> Result<PeakMask> {
    check_grid(values, config)?;
    let (rows, cols) = values.shape();
    let mut mask = PeakMask::empty(rows, cols);
    match axis {
        Axis::Time => {
            let d = config.window_len(cols);
            for r in 0..rows {
                let row = values.row(r);
                for_each_window_argmax(cols, d, |c| row[c], |c| mask.set(r, c));
            }
        }
        Axis::Frequency => {
            let d = config.window_len(rows);
            for c in 0..cols {
                for_each_window_argmax(rows, d, |r| values.get(r, c), |r| mask.set(r, c));
            }
        }
    }
    Ok(mask)
}

/// Peak mask of a bare matrix under the configured condition.
pub fn peak_mask_grid(values: &Grid<f64>, config: &PeakSearchConfig) -> Result<PeakMask> {
    match config.condition {
        Condition::Time => peak_mask_axis_grid(values, config, Axis::Time),
        Condition::Frequency => peak_mask_axis_grid(values, config, Axis::Frequency),
        Condition::Both => {
            let t = peak_mask_axis_grid(values, config, Axis::Time)?;
            let f = peak_mask_axis_grid(values, config, Axis::Frequency)?;
            t.and(&f)
        }
    }
}

pub fn peak_mask_axis(spec: &Spectrogram, config: &PeakSearchConfig, axis: Axis) -> Result<PeakMask> {
    peak_mask_axis_grid(spec.values(), config, axis)
}

pub fn peak_mask(spec: &Spectrogram, config: &PeakSearchConfig) -> Result<PeakMask> {
    peak_mask_grid(spec.values(), config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: &[&[f64]]) -> Grid<f64> {
        Grid::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn constant_band_ties_to_window_start() {
        // each window nominates its own first element
        assert_eq!(sliding_band_max(&[5.0, 5.0, 5.0], 2).unwrap(), vec![0, 1]);
        assert_eq!(sliding_band_max(&[5.0, 5.0, 5.0], 3).unwrap(), vec![0]);
    }

    #[test]
    fn plateau_keeps_earliest_while_in_window() {
        assert_eq!(sliding_band_max(&[1.0, 4.0, 4.0, 4.0, 0.0], 3).unwrap(), vec![1, 2]);
    }

    #[test]
    fn small_band() {
        assert_eq!(sliding_band_max(&[1.0, 3.0, 2.0, 5.0, 4.0], 2).unwrap(), vec![1, 3]);
    }

    #[test]
    fn full_window_is_global_argmax() {
        let band = [0.3, -1.0, 7.5, 7.5, 2.0];
        assert_eq!(sliding_band_max(&band, band.len()).unwrap(), vec![2]);
    }

    #[test]
    fn window_one_selects_everything() {
        assert_eq!(sliding_band_max(&[3.0, 1.0, 2.0], 1).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn band_errors() {
        assert!(matches!(sliding_band_max(&[], 1), Err(Error::EmptyBand)));
        assert!(matches!(
            sliding_band_max(&[1.0], 2),
            Err(Error::WindowTooLong { window_len: 2, band_len: 1 })
        ));
        assert!(sliding_band_max(&[1.0], 0).is_err());
    }

    #[test]
    fn window_len_derivation() {
        let c = PeakSearchConfig::new(1.0 / 3.0, Condition::Both).unwrap();
        assert_eq!(c.window_len(30), 10);
        assert_eq!(c.window_len(3), 2);
        assert_eq!(c.window_len(1), 1);
        let c = PeakSearchConfig::new(0.15, Condition::Both).unwrap();
        assert_eq!(c.window_len(30), 5); // 4.5 rounds away from zero
        assert_eq!(c.window_len(5), 2);
        let c = PeakSearchConfig::new(1.0, Condition::Both).unwrap();
        assert_eq!(c.window_len(513), 513);
    }

    #[test]
    fn fraction_bounds() {
        assert!(PeakSearchConfig::new(0.0, Condition::Both).is_err());
        assert!(PeakSearchConfig::new(1.0001, Condition::Both).is_err());
        assert!(PeakSearchConfig::new(f64::NAN, Condition::Both).is_err());
        assert!(PeakSearchConfig::new(1.0, Condition::Time).is_ok());
    }

    #[test]
    fn constant_matrix_time_axis() {
        let g = Grid::filled(4, 7, -3.0);
        let c = PeakSearchConfig::new(0.5, Condition::Time).unwrap();
        let m = peak_mask_grid(&g, &c).unwrap();
        // d = 4 over 7 frames: windows start at 0..=3 and each nominates its start
        assert_eq!(m.count(), 4 * 4);
        for r in 0..4 {
            for col in 0..7 {
                assert_eq!(m.get(r, col), col <= 3);
            }
        }
    }

    #[test]
    fn single_row_time_axis() {
        let g = grid(&[&[1.0, 3.0, 2.0, 5.0, 4.0]]);
        let c = PeakSearchConfig::new(0.4, Condition::Time).unwrap();
        let m = peak_mask_axis_grid(&g, &c, Axis::Time).unwrap();
        assert_eq!(m.bits().as_slice(), &[0, 1, 0, 1, 0]);
    }

    #[test]
    fn impulse_survives_every_condition() {
        let mut g = Grid::filled(9, 11, 0.0);
        g.set(4, 7, 1.0);
        for cond in [Condition::Time, Condition::Frequency, Condition::Both] {
            for fraction in [0.1, 0.5, 1.0] {
                let m = peak_mask_grid(&g, &PeakSearchConfig::new(fraction, cond).unwrap()).unwrap();
                assert!(m.get(4, 7), "{cond:?} {fraction}");
            }
        }
    }

    #[test]
    fn one_by_one_matrix() {
        let g = grid(&[&[-7.0]]);
        let m = peak_mask_grid(&g, &PeakSearchConfig::default()).unwrap();
        assert_eq!(m.count(), 1);
    }

    #[test]
    fn condition_codes() {
        assert_eq!(Condition::try_from(2).unwrap(), Condition::Both);
        assert!(Condition::try_from(3).is_err());
        assert_eq!("1".parse::<Condition>().unwrap(), Condition::Frequency);
        assert_eq!(serde_json::to_string(&Condition::Time).unwrap(), "0");
    }

    #[test]
    fn mask_rejects_non_binary() {
        assert!(PeakMask::from_grid(Grid::filled(1, 1, 2)).is_err());
    }

    #[test]
    fn positions_are_column_major() {
        let mut m = PeakMask::empty(3, 3);
        m.set(2, 0);
        m.set(0, 1);
        m.set(1, 0);
        assert_eq!(m.positions(), vec![(1, 0), (2, 0), (0, 1)]);
    }
}
