#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectromap::{Condition, Grid, PeakMask};

/// Brute-force identification matrix: every window of every band is scanned
/// directly, first strict maximum wins.
pub fn oracle_mask(values: &Grid<f64>, fraction: f64, condition: Condition) -> PeakMask {
    let (rows, cols) = values.shape();
    let window = |len: usize| -> usize {
        let d = (fraction * len as f64).round() as usize;
        d.max(2).min(len)
    };
    let mut time = vec![vec![0u8; cols]; rows];
    let dt = window(cols);
    for (r, row) in time.iter_mut().enumerate() {
        for k in 0..=cols - dt {
            let mut best = k;
            for c in k..k + dt {
                if values.get(r, c) > values.get(r, best) {
                    best = c;
                }
            }
            row[best] = 1;
        }
    }
    let mut freq = vec![vec![0u8; cols]; rows];
    let df = window(rows);
    for c in 0..cols {
        for k in 0..=rows - df {
            let mut best = k;
            for r in k..k + df {
                if values.get(r, c) > values.get(best, c) {
                    best = r;
                }
            }
            freq[best][c] = 1;
        }
    }
    let pick = |r: usize, c: usize| match condition {
        Condition::Time => time[r][c],
        Condition::Frequency => freq[r][c],
        Condition::Both => time[r][c] & freq[r][c],
    };
    let rows_vec: Vec<Vec<u8>> = (0..rows).map(|r| (0..cols).map(|c| pick(r, c)).collect()).collect();
    PeakMask::from_grid(Grid::from_rows(&rows_vec).unwrap()).unwrap()
}

/// Uniform matrix in [-100, 0) with coarse quantization so ties occur.
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Grid<f64> {
    let quantize = rng.gen_bool(0.5);
    let data = (0..rows * cols)
        .map(|_| {
            let v: f64 = rng.gen_range(-100.0..0.0);
            if quantize {
                v.round()
            } else {
                v
            }
        })
        .collect();
    Grid::from_vec(rows, cols, data).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mask(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> PeakMask {
    let data = (0..rows * cols).map(|_| u8::from(rng.gen_bool(density))).collect();
    PeakMask::from_grid(Grid::from_vec(rows, cols, data).unwrap()).unwrap()
}

/// Naive O(N^2) DFT power of one frame.
pub fn dft_power(frame: &[f64]) -> Vec<f64> {
    let n = frame.len();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &x) in frame.iter().enumerate() {
                let a = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                re += x * a.cos();
                im += x * a.sin();
            }
            re * re + im * im
        })
        .collect()
}

pub fn sine(freq: f64, sample_rate: u32, len: usize, amplitude: f64) -> Vec<f64> {
    (0..len)
        .map(|i| amplitude * (2.0 * std::f64::consts::PI * freq * i as f64 / f64::from(sample_rate)).sin())
        .collect()
}
