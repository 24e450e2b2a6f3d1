pub mod aggregate;
pub mod batch;
pub mod fingerprint;
pub mod render;
pub mod synth;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use spectromap::fingerprint::fingerprint_to_bytes;
use spectromap::{
    compute_spectrogram, extract_fingerprint, load_audio, peak_mask, Fingerprint, FingerprintParams, Format,
    PeakSearchConfig, Signal, Spectrogram, SpectrogramParams,
};

use crate::error::{CliError, CliResult, Stage};

/// Result of running one file through the pipeline.
pub struct Processed {
    pub fingerprint: Fingerprint,
    pub spectrogram: Spectrogram,
    /// Spectrogram start to triple extraction end; decoding is excluded.
    pub elapsed: Duration,
}

pub fn process_signal(
    signal: &Signal,
    sp: &SpectrogramParams,
    search: &PeakSearchConfig,
    path: Option<&Path>,
) -> CliResult<Processed> {
    let t0 = Instant::now();
    let spectrogram = compute_spectrogram(signal, sp).map_err(|e| CliError::new(Stage::Spectrogram, path, e))?;
    let mask = peak_mask(&spectrogram, search).map_err(|e| CliError::new(Stage::Search, path, e))?;
    let fingerprint = extract_fingerprint(&spectrogram, &mask)
        .map_err(|e| CliError::new(Stage::Search, path, e))?
        .with_params(FingerprintParams::new(signal.sample_rate(), sp, search));
    Ok(Processed {
        fingerprint,
        spectrogram,
        elapsed: t0.elapsed(),
    })
}

pub fn process_file(path: &Path, sp: &SpectrogramParams, search: &PeakSearchConfig) -> CliResult<Processed> {
    let signal = load_audio(path).map_err(|e| CliError::new(Stage::Load, Some(path), e))?;
    process_signal(&signal, sp, search, Some(path))
}

pub fn fingerprint_path(out_dir: &Path, input: &Path, format: Format) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out_dir.join(format!("{stem}.fingerprint.{}", format.extension()))
}

pub fn write_fingerprint(fp: &Fingerprint, format: Format, out: &Path) -> CliResult<()> {
    let bytes = fingerprint_to_bytes(fp, format);
    std::fs::write(out, bytes).map_err(|e| CliError::new(Stage::Serialize, Some(out), e.into()))
}

pub fn create_dir(dir: &Path, stage: Stage) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::new(stage, Some(dir), e.into()))
}

/// Orders names so that `fold2` precedes `fold10`.
pub fn natural_key(name: &str) -> Vec<(String, u64)> {
    let mut parts = Vec::new();
    let mut text = String::new();
    let mut digits = String::new();
    for ch in name.chars() {
        if ch.is_ascii_digit() {
            digits.push(ch);
        } else {
            if !digits.is_empty() {
                parts.push((std::mem::take(&mut text), digits.parse().unwrap_or(u64::MAX)));
                digits.clear();
            }
            text.push(ch);
        }
    }
    parts.push((text, if digits.is_empty() { 0 } else { digits.parse().unwrap_or(u64::MAX) }));
    parts
}
