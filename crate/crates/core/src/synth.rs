//! Seeded synthetic clips: a few enveloped sinusoids over white noise.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// White-noise standard deviation, −30 dB re full scale.
pub const NOISE_DB: f64 = -30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Tone {
    pub frequency_hz: f64,
    pub amplitude: f64,
    pub onset_s: f64,
    pub length_s: f64,
    pub phase: f64,
}

/// Draws 2..=5 tones for a clip of `duration_s` at `sample_rate`.
pub fn random_tones(rng: &mut impl Rng, duration_s: f64, sample_rate: u32) -> Vec<Tone> {
    let n = rng.gen_range(2..=5);
    let f_hi = (0.45 * f64::from(sample_rate)).min(8000.0).max(100.0);
    let f_lo = 80.0f64.min(f_hi / 2.0);
    (0..n)
        .map(|_| {
            // log-uniform pitch
            let frequency_hz = (f_lo.ln() + rng.gen::<f64>() * (f_hi.ln() - f_lo.ln())).exp();
            let length_s = duration_s * rng.gen_range(0.2..=1.0);
            let onset_s = rng.gen_range(0.0..=(duration_s - length_s).max(0.0));
            Tone {
                frequency_hz,
                amplitude: rng.gen_range(0.2..=1.0),
                onset_s,
                length_s,
                phase: rng.gen_range(0.0..2.0 * PI),
            }
        })
        .collect()
}

/// Renders a clip from `seed`. Identical arguments give identical samples.
pub fn synth_clip(seed: u64, duration_s: f64, sample_rate: u32) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (duration_s * f64::from(sample_rate)).round() as usize;
    let fs = f64::from(sample_rate);
    let tones = random_tones(&mut rng, duration_s, sample_rate);
    let norm = 0.7 / tones.iter().map(|t| t.amplitude).sum::<f64>();
    let noise = Normal::new(0.0, 10f64.powf(NOISE_DB / 20.0)).expect("valid sigma");

    let mut out = vec![0.0; n];
    for tone in &tones {
        let start = (tone.onset_s * fs).round() as usize;
        let len = ((tone.length_s * fs).round() as usize).max(1);
        let w = 2.0 * PI * tone.frequency_hz / fs;
        for (i, s) in out.iter_mut().enumerate().skip(start).take(len) {
            let k = (i - start) as f64;
            // raised-cosine envelope over the tone's extent
            let env = 0.5 - 0.5 * (2.0 * PI * k / len as f64).cos();
            *s += norm * tone.amplitude * env * (w * k + tone.phase).sin();
        }
    }
    for s in &mut out {
        *s = (*s + noise.sample(&mut rng)).clamp(-1.0, 1.0);
    }
    out
}

/// Per-file seeds for a `n_folders × n_files` dataset, folder-major.
pub fn dataset_seeds(seed: u64, n_folders: usize, n_files: usize) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_folders)
        .map(|_| (0..n_files).map(|_| rng.gen()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let a = synth_clip(7, 0.5, 8000);
        let b = synth_clip(7, 0.5, 8000);
        assert_eq!(a, b);
        assert_eq!(a.len(), 4000);
        assert_ne!(a, synth_clip(8, 0.5, 8000));
        assert!(a.iter().all(|s| (-1.0..=1.0).contains(s)));
    }

    #[test]
    fn tone_count_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let tones = random_tones(&mut rng, 5.0, 22050);
            assert!((2..=5).contains(&tones.len()));
            for t in &tones {
                assert!(t.onset_s + t.length_s <= 5.0 + 1e-9);
                assert!(t.frequency_hz < 22050.0 / 2.0);
            }
        }
    }

    #[test]
    fn seeds_shape() {
        let s = dataset_seeds(42, 5, 80);
        assert_eq!(s.len(), 5);
        assert!(s.iter().all(|f| f.len() == 80));
        assert_eq!(s, dataset_seeds(42, 5, 80));
    }
}
