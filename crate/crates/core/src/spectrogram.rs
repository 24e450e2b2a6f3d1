use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::signal::Signal;

/// Power floor applied before the dB conversion.
pub const POWER_FLOOR: f64 = 1e-12;

/// `10 * log10(POWER_FLOOR)`.
pub const DB_FLOOR: f64 = -120.0;

/// Analysis window applied to each frame. All windows are periodic (DFT-even).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    Hamming,
    Hann,
    Blackman,
    Rectangular,
}

impl WindowKind {
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        let n = len as f64;
        (0..len)
            .map(|i| {
                let x = 2.0 * PI * i as f64 / n;
                match self {
                    WindowKind::Hamming => 0.54 - 0.46 * x.cos(),
                    WindowKind::Hann => 0.5 - 0.5 * x.cos(),
                    WindowKind::Blackman => 0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos(),
                    WindowKind::Rectangular => 1.0,
                }
            })
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Hamming => "hamming",
            WindowKind::Hann => "hann",
            WindowKind::Blackman => "blackman",
            WindowKind::Rectangular => "rectangular",
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hamming" => Ok(WindowKind::Hamming),
            "hann" | "hanning" => Ok(WindowKind::Hann),
            "blackman" => Ok(WindowKind::Blackman),
            "rectangular" | "boxcar" | "rect" => Ok(WindowKind::Rectangular),
            other => Err(Error::InvalidParams(format!("unknown window '{other}'"))),
        }
    }
}

/// STFT framing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectrogramParams {
    pub window: WindowKind,
    pub nfft: usize,
    pub noverlap: usize,
}

impl Default for SpectrogramParams {
    fn default() -> Self {
        SpectrogramParams {
            window: WindowKind::Hamming,
            nfft: 1024,
            noverlap: 0,
        }
    }
}

impl SpectrogramParams {
    pub fn new(window: WindowKind, nfft: usize, noverlap: usize) -> Result<Self> {
        let p = SpectrogramParams {
            window,
            nfft,
            noverlap,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nfft == 0 {
            return Err(Error::InvalidParams("nfft must be positive".into()));
        }
        if self.noverlap >= self.nfft {
            return Err(Error::InvalidParams(format!(
                "noverlap {} must be smaller than nfft {}",
                self.noverlap, self.nfft
            )));
        }
        Ok(())
    }

    pub fn hop(&self) -> usize {
        self.nfft - self.noverlap
    }

    pub fn n_freq_bins(&self) -> usize {
        self.nfft / 2 + 1
    }

    /// Number of complete frames in a signal of `len` samples.
    pub fn n_frames(&self, len: usize) -> usize {
        if len < self.nfft {
            0
        } else {
            (len - self.noverlap) / self.hop()
        }
    }

    pub fn bin_frequency(&self, bin: usize, sample_rate: u32) -> f64 {
        bin as f64 * f64::from(sample_rate) / self.nfft as f64
    }

    /// Center time of frame `frame`, in seconds.
    pub fn frame_time(&self, frame: usize, sample_rate: u32) -> f64 {
        (frame as f64 * self.hop() as f64 + self.nfft as f64 / 2.0) / f64::from(sample_rate)
    }
}

/// dB power spectrogram. Rows are frequency bins (ascending), columns are frames.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    values: Grid<f64>,
    freqs: Vec<f64>,
    times: Vec<f64>,
}

impl Spectrogram {
    /// Assembles a spectrogram from precomputed parts.
    pub fn from_parts(values: Grid<f64>, freqs: Vec<f64>, times: Vec<f64>) -> Result<Self> {
        if values.rows() != freqs.len() || values.cols() != times.len() {
            return Err(Error::ShapeMismatch(format!(
                "values are {:?} but axes are {} x {}",
                values.shape(),
                freqs.len(),
                times.len()
            )));
        }
        if values.is_empty() {
            return Err(Error::InvalidParams("spectrogram is empty".into()));
        }
        if values.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("spectrogram contains non-finite values".into()));
        }
        Ok(Spectrogram {
            values,
            freqs,
            times,
        })
    }

    /// Wraps a bare matrix, using row and column indices as axis coordinates.
    pub fn from_matrix(values: Grid<f64>) -> Result<Self> {
        let freqs = (0..values.rows()).map(|i| i as f64).collect();
        let times = (0..values.cols()).map(|i| i as f64).collect();
        Spectrogram::from_parts(values, freqs, times)
    }

    pub fn values(&self) -> &Grid<f64> {
        &self.values
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    pub fn n_freq_bins(&self) -> usize {
        self.values.rows()
    }

    pub fn n_frames(&self) -> usize {
        self.values.cols()
    }

    /// Writes the matrix as CSV: a header row of frame times, then one row per
    /// frequency bin led by its frequency.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let mut line = String::from("frequency_hz");
        for t in &self.times {
            line.push(',');
            line.push_str(&t.to_string());
        }
        writeln!(w, "{line}")?;
        for (j, f) in self.freqs.iter().enumerate() {
            line.clear();
            line.push_str(&f.to_string());
            for v in self.values.row(j) {
                line.push(',');
                line.push_str(&v.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Short-time Fourier transform of `signal` as a one-sided power spectrogram in dB.
///
/// Frames advance by `nfft - noverlap` samples; trailing samples that do not fill
/// a frame are dropped. Each value is `10 * log10(max(|X|^2, 1e-12))`.
pub fn compute_spectrogram(signal: &Signal, params: &SpectrogramParams) -> Result<Spectrogram> {
    params.validate()?;
    let samples = signal.samples();
    if samples.len() < params.nfft {
        return Err(Error::SignalTooShort {
            len: samples.len(),
            nfft: params.nfft,
        });
    }
    let nfft = params.nfft;
    let hop = params.hop();
    let n_bins = params.n_freq_bins();
    let n_frames = params.n_frames(samples.len());
    let window = params.window.coefficients(nfft);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(nfft);

    let mut values = Grid::filled(n_bins, n_frames, DB_FLOOR);
    let mut buf = vec![Complex::new(0.0, 0.0); nfft];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for frame in 0..n_frames {
        let start = frame * hop;
        for ((slot, &x), &w) in buf.iter_mut().zip(&samples[start..start + nfft]).zip(&window) {
            *slot = Complex::new(x * w, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (bin, c) in buf.iter().take(n_bins).enumerate() {
            values.set(bin, frame, 10.0 * c.norm_sqr().max(POWER_FLOOR).log10());
        }
    }

    let sr = signal.sample_rate();
    let freqs = (0..n_bins).map(|j| params.bin_frequency(j, sr)).collect();
    let times = (0..n_frames).map(|k| params.frame_time(k, sr)).collect();
    Ok(Spectrogram {
        values,
        freqs,
        times,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silent_signal_sits_on_the_floor() {
        let s = Signal::new(vec![0.0; 2048], 8000).unwrap();
        let spec = compute_spectrogram(&s, &SpectrogramParams::new(WindowKind::Hann, 256, 128).unwrap())
            .unwrap();
        assert!(spec.values().as_slice().iter().all(|&v| v == DB_FLOOR));
        assert_eq!(10.0 * POWER_FLOOR.log10(), DB_FLOOR);
    }

    #[test]
    fn frame_count_and_times() {
        let fs = 1000;
        let s = Signal::new(vec![0.1; 1000], fs).unwrap();
        let spec = compute_spectrogram(&s, &SpectrogramParams::new(WindowKind::Hamming, 512, 64).unwrap())
            .unwrap();
        assert_eq!(spec.shape(), (257, 2));
        assert_eq!(spec.times(), &[256.0 / 1000.0, 704.0 / 1000.0]);
        assert_eq!(spec.freqs()[0], 0.0);
        assert_eq!(*spec.freqs().last().unwrap(), 500.0);
    }

    #[test]
    fn invalid_params() {
        assert!(SpectrogramParams::new(WindowKind::Hamming, 0, 0).is_err());
        assert!(SpectrogramParams::new(WindowKind::Hamming, 256, 256).is_err());
        let s = Signal::new(vec![0.0; 100], 8000).unwrap();
        assert!(matches!(
            compute_spectrogram(&s, &SpectrogramParams::default()),
            Err(Error::SignalTooShort { len: 100, nfft: 1024 })
        ));
    }

    #[test]
    fn window_names_parse() {
        for w in [
            WindowKind::Hamming,
            WindowKind::Hann,
            WindowKind::Blackman,
            WindowKind::Rectangular,
        ] {
            assert_eq!(w.name().parse::<WindowKind>().unwrap(), w);
        }
        assert!("kaiser".parse::<WindowKind>().is_err());
    }

    #[test]
    fn hamming_is_periodic() {
        let w = WindowKind::Hamming.coefficients(4);
        let expected = [0.08, 0.54, 1.0, 0.54];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn from_parts_checks_shape_and_finiteness() {
        let g = Grid::filled(2, 3, 0.0);
        assert!(Spectrogram::from_parts(g.clone(), vec![0.0, 1.0], vec![0.0; 2]).is_err());
        let mut bad = g.clone();
        bad.set(0, 0, f64::NAN);
        assert!(Spectrogram::from_matrix(bad).is_err());
        assert!(Spectrogram::from_matrix(g).is_ok());
    }

    #[test]
    fn csv_layout() {
        let g = Grid::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.5]]).unwrap();
        let spec = Spectrogram::from_parts(g, vec![0.0, 10.0], vec![0.5, 1.5]).unwrap();
        let mut out = Vec::new();
        spec.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "frequency_hz,0.5,1.5\n0,1,2\n10,3,4.5\n"
        );
    }
}
