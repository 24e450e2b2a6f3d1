//! Audio fingerprints as constellation maps.
//!
//! A clip is turned into a dB spectrogram, every time band and/or frequency
//! band is scanned with a sliding-maximum window, and the surviving points are
//! reported as (time, frequency, amplitude) triples. Masks of many clips can be
//! summed into a per-class count matrix.

pub mod error;
pub mod fingerprint;
pub mod grid;
pub mod peaks;
pub mod signal;
pub mod spectrogram;
pub mod stats;
pub mod synth;
pub mod wav;

pub use error::{Error, Result};
pub use fingerprint::{
    aggregate_class, extract_fingerprint, parse_fingerprint, render_constellation, serialize_fingerprint,
    ClassFingerprint, Fingerprint, FingerprintParams, Format, Peak,
};
pub use grid::Grid;
pub use peaks::{peak_mask, peak_mask_axis, sliding_band_max, Axis, Condition, PeakMask, PeakSearchConfig};
pub use signal::{load_audio, Signal};
pub use spectrogram::{compute_spectrogram, Spectrogram, SpectrogramParams, WindowKind};
pub use stats::TimingStats;

/// Intermediate and final products of one clip.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub spectrogram: Spectrogram,
    pub mask: PeakMask,
    pub fingerprint: Fingerprint,
}

/// Spectrogram, peak search and triple extraction in one call.
pub fn extract(signal: &Signal, params: &SpectrogramParams, search: &PeakSearchConfig) -> Result<Extraction> {
    let spectrogram = compute_spectrogram(signal, params)?;
    let mask = peak_mask(&spectrogram, search)?;
    let fingerprint = extract_fingerprint(&spectrogram, &mask)?
        .with_params(FingerprintParams::new(signal.sample_rate(), params, search));
    Ok(Extraction {
        spectrogram,
        mask,
        fingerprint,
    })
}
