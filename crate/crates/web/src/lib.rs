//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The page synthesizes (or loads) a clip, then lets the user explore three
//! things interactively: the dB spectrogram under different STFT settings, the
//! peak constellation for a given fraction and condition, and the count map of
//! a synthetic class.

use spectromap::synth::synth_clip;
use spectromap::{
    aggregate_class, compute_spectrogram, peak_mask, Condition, Grid, PeakMask, PeakSearchConfig, Signal, Spectrogram,
    SpectrogramParams, WindowKind,
};
use wasm_bindgen::prelude::*;

mod colormap;

pub use colormap::{heatmap_rgba, viridis};

fn js_err(e: spectromap::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn condition(code: u8) -> Result<Condition, JsError> {
    Condition::try_from(code).map_err(js_err)
}

fn window(name: &str) -> Result<WindowKind, JsError> {
    name.parse().map_err(js_err)
}

/// Holds one clip plus the last spectrogram and peak mask computed from it.
#[wasm_bindgen]
pub struct Explorer {
    signal: Signal,
    spectrogram: Option<Spectrogram>,
    mask: Option<PeakMask>,
}

#[wasm_bindgen]
impl Explorer {
    /// A seeded synthetic clip.
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u64, duration_s: f64, sample_rate: u32) -> Result<Explorer, JsError> {
        let signal = Signal::new(synth_clip(seed, duration_s, sample_rate), sample_rate).map_err(js_err)?;
        Ok(Explorer::from_signal(signal))
    }

    /// A clip decoded from WAV bytes.
    pub fn from_wav(bytes: &[u8]) -> Result<Explorer, JsError> {
        Ok(Explorer::from_signal(Signal::from_wav_bytes(bytes).map_err(js_err)?))
    }

    pub fn sample_rate(&self) -> u32 {
        self.signal.sample_rate()
    }

    pub fn duration_s(&self) -> f64 {
        self.signal.duration_s()
    }

    /// Recomputes the spectrogram. Invalidates the peak mask.
    pub fn compute(&mut self, nfft: usize, noverlap: usize, window_name: &str) -> Result<(), JsError> {
        let params = SpectrogramParams::new(window(window_name)?, nfft, noverlap).map_err(js_err)?;
        self.spectrogram = Some(compute_spectrogram(&self.signal, &params).map_err(js_err)?);
        self.mask = None;
        Ok(())
    }

    pub fn n_freq_bins(&self) -> usize {
        self.spectrogram.as_ref().map_or(0, Spectrogram::n_freq_bins)
    }

    pub fn n_frames(&self) -> usize {
        self.spectrogram.as_ref().map_or(0, Spectrogram::n_frames)
    }

    /// Top frequency and last frame time, for axis labels.
    pub fn extent(&self) -> Vec<f64> {
        self.spectrogram.as_ref().map_or_else(Vec::new, |s| {
            vec![
                *s.times().last().unwrap_or(&0.0),
                *s.freqs().last().unwrap_or(&0.0),
            ]
        })
    }

    /// Spectrogram as RGBA pixels (`n_frames` wide, `n_freq_bins` tall, low
    /// frequencies at the bottom), with dB clipped to `[max - range_db, max]`.
    pub fn spectrogram_rgba(&self, range_db: f64) -> Result<Vec<u8>, JsError> {
        let spec = self.require_spectrogram()?;
        let values = spec.values();
        let top = values.as_slice().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let floor = top - range_db.max(1.0);
        Ok(heatmap_rgba(&values.map(|v| (v.max(floor) - floor) / (top - floor))))
    }

    /// Runs the peak search and returns the peak count.
    pub fn search(&mut self, fraction: f64, condition_code: u8) -> Result<usize, JsError> {
        let config = PeakSearchConfig::new(fraction, condition(condition_code)?).map_err(js_err)?;
        let mask = peak_mask(self.require_spectrogram()?, &config).map_err(js_err)?;
        let n = mask.count();
        self.mask = Some(mask);
        Ok(n)
    }

    /// Peak positions as flattened `(frame, bin)` pairs.
    pub fn peak_positions(&self) -> Vec<u32> {
        self.mask.as_ref().map_or_else(Vec::new, |m| {
            m.positions()
                .into_iter()
                .flat_map(|(r, c)| [c as u32, r as u32])
                .collect()
        })
    }
}

impl Explorer {
    fn from_signal(signal: Signal) -> Self {
        Explorer {
            signal,
            spectrogram: None,
            mask: None,
        }
    }

    fn require_spectrogram(&self) -> Result<&Spectrogram, JsError> {
        self.spectrogram
            .as_ref()
            .ok_or_else(|| JsError::new("call compute() first"))
    }
}

/// Count matrix of `members` seeded clips sharing one geometry.
pub fn class_counts(
    members: u32,
    seed: u64,
    duration_s: f64,
    sample_rate: u32,
    params: &SpectrogramParams,
    config: &PeakSearchConfig,
) -> spectromap::Result<Grid<u32>> {
    let masks = (0..u64::from(members))
        .map(|i| {
            let signal = Signal::new(synth_clip(seed.wrapping_add(i), duration_s, sample_rate), sample_rate)?;
            peak_mask(&compute_spectrogram(&signal, params)?, config)
        })
        .collect::<spectromap::Result<Vec<_>>>()?;
    Ok(aggregate_class(&masks, "synthetic")?.counts)
}

/// Class count map rendered as RGBA, preceded by `[width, height, max_count]`
/// encoded as little-endian u32s.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn class_map_rgba(
    members: u32,
    seed: u64,
    duration_s: f64,
    sample_rate: u32,
    nfft: usize,
    noverlap: usize,
    fraction: f64,
    condition_code: u8,
) -> Result<Vec<u8>, JsError> {
    let params = SpectrogramParams::new(WindowKind::Hamming, nfft, noverlap).map_err(js_err)?;
    let config = PeakSearchConfig::new(fraction, condition(condition_code)?).map_err(js_err)?;
    let counts = class_counts(members, seed, duration_s, sample_rate, &params, &config).map_err(js_err)?;
    let max = counts.as_slice().iter().copied().max().unwrap_or(0);
    let scale = f64::from(max.max(1));
    let mut out = Vec::new();
    for v in [counts.cols() as u32, counts.rows() as u32, max] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend(heatmap_rgba(&counts.map(|c| f64::from(c) / scale)));
    Ok(out)
}
