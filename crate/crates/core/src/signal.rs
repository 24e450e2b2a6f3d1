use std::path::Path;

use crate::error::{Error, Result};
use crate::wav;

/// Mono audio at a fixed sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidParams("sample rate must be positive".into()));
        }
        if samples.is_empty() {
            return Err(Error::EmptyAudio);
        }
        Ok(Signal {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    /// Decodes an in-memory WAV image.
    pub fn from_wav_bytes(bytes: &[u8]) -> Result<Self> {
        let decoded = wav::decode(bytes)?;
        Signal::new(decoded.mono, decoded.sample_rate)
    }
}

/// Reads a WAV file into a mono signal at its native rate.
///
/// Channels are averaged per frame and integer samples are divided by the
/// magnitude of the type's minimum (`2^(bits-1)`).
pub fn load_audio(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    Signal::from_wav_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_rate_and_empty() {
        assert!(matches!(Signal::new(vec![0.0], 0), Err(Error::InvalidParams(_))));
        assert!(matches!(Signal::new(vec![], 8000), Err(Error::EmptyAudio)));
    }

    #[test]
    fn missing_file() {
        let err = load_audio("/definitely/not/here.wav").unwrap_err();
        assert!(matches!(err, Error::FileNotFound(p) if p.ends_with("here.wav")));
    }

    #[test]
    fn load_keeps_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let mut f = std::fs::File::create(&path).unwrap();
        wav::write_pcm16(&mut f, 44100, &vec![0.0; 44100]).unwrap();
        drop(f);
        let s = load_audio(&path).unwrap();
        assert_eq!(s.sample_rate(), 44100);
        assert_eq!(s.len(), 44100);
        assert!((s.duration_s() - 1.0).abs() < 1e-12);
    }
}
