//! Minimal RIFF/WAVE codec.
//!
//! Decodes linear PCM (8/16/24/32-bit) and IEEE float (32/64-bit), including
//! `WAVE_FORMAT_EXTENSIBLE` headers wrapping either. Encodes 16-bit PCM and
//! 32-bit float.

use std::io::Write;

use crate::error::{Error, Result};

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_IEEE_FLOAT: u16 = 0x0003;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Int,
    Float,
}

#[derive(Debug, Clone, Copy)]
struct Format {
    encoding: Encoding,
    channels: u16,
    sample_rate: u32,
    bits: u16,
    block_align: u16,
}

/// A decoded file, downmixed to mono.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedWav {
    pub sample_rate: u32,
    pub channels: u16,
    /// Mono samples, each the mean of its frame's channels.
    pub mono: Vec<f64>,
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(chunk: &[u8]) -> Result<Format> {
    if chunk.len() < 16 {
        return Err(Error::UnsupportedFormat("fmt chunk shorter than 16 bytes".into()));
    }
    let mut tag = u16_at(chunk, 0);
    let channels = u16_at(chunk, 2);
    let sample_rate = u32_at(chunk, 4);
    let block_align = u16_at(chunk, 12);
    let bits = u16_at(chunk, 14);
    if tag == FORMAT_EXTENSIBLE {
        if chunk.len() < 26 {
            return Err(Error::UnsupportedFormat("truncated extensible fmt chunk".into()));
        }
        // first two bytes of the sub-format GUID carry the actual format tag
        tag = u16_at(chunk, 24);
    }
    let encoding = match (tag, bits) {
        (FORMAT_PCM, 8 | 16 | 24 | 32) => Encoding::Int,
        (FORMAT_IEEE_FLOAT, 32 | 64) => Encoding::Float,
        (FORMAT_PCM | FORMAT_IEEE_FLOAT, b) => {
            return Err(Error::UnsupportedFormat(format!("{b}-bit samples for format tag {tag:#06x}")))
        }
        (t, _) => return Err(Error::UnsupportedFormat(format!("format tag {t:#06x}"))),
    };
    if channels == 0 {
        return Err(Error::UnsupportedFormat("zero channels".into()));
    }
    if sample_rate == 0 {
        return Err(Error::UnsupportedFormat("zero sample rate".into()));
    }
    if usize::from(block_align) != usize::from(channels) * usize::from(bits / 8) {
        return Err(Error::UnsupportedFormat(format!(
            "block align {block_align} inconsistent with {channels} x {bits}-bit"
        )));
    }
    Ok(Format {
        encoding,
        channels,
        sample_rate,
        bits,
        block_align,
    })
}

fn decode_sample(fmt: &Format, b: &[u8]) -> f64 {
    match (fmt.encoding, fmt.bits) {
        (Encoding::Int, 8) => (f64::from(b[0]) - 128.0) / 128.0,
        (Encoding::Int, 16) => f64::from(i16::from_le_bytes([b[0], b[1]])) / 32768.0,
        (Encoding::Int, 24) => {
            let v = i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8;
            f64::from(v) / 8_388_608.0
        }
        (Encoding::Int, 32) => f64::from(i32::from_le_bytes([b[0], b[1], b[2], b[3]])) / 2_147_483_648.0,
        (Encoding::Float, 32) => f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])),
        (Encoding::Float, 64) => f64::from_le_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]]),
        _ => unreachable!("validated in parse_fmt"),
    }
}

/// Decodes a complete WAV file image.
pub fn decode(bytes: &[u8]) -> Result<DecodedWav> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::UnsupportedFormat("not a RIFF/WAVE file".into()));
    }
    let mut fmt = None;
    let mut data = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let declared = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start.saturating_add(declared).min(bytes.len());
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => fmt = Some(parse_fmt(body)?),
            b"data" => {
                // streaming writers leave the size at 0 or u32::MAX
                let body = if declared == 0 || declared == u32::MAX as usize {
                    &bytes[body_start..]
                } else {
                    body
                };
                data = Some(body);
            }
            _ => {}
        }
        if data.is_some() && fmt.is_some() {
            break;
        }
        pos = body_start.saturating_add(declared).saturating_add(declared & 1);
    }
    let fmt = fmt.ok_or_else(|| Error::UnsupportedFormat("missing fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::UnsupportedFormat("missing data chunk".into()))?;

    let block = usize::from(fmt.block_align);
    let width = usize::from(fmt.bits / 8);
    let channels = f64::from(fmt.channels);
    let mono: Vec<f64> = data
        .chunks_exact(block)
        .map(|frame| {
            let sum: f64 = frame.chunks_exact(width).map(|s| decode_sample(&fmt, s)).sum();
            sum / channels
        })
        .collect();
    if mono.is_empty() {
        return Err(Error::EmptyAudio);
    }
    Ok(DecodedWav {
        sample_rate: fmt.sample_rate,
        channels: fmt.channels,
        mono,
    })
}

fn write_header<W: Write>(
    w: &mut W,
    tag: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
    data_len: u32,
) -> std::io::Result<()> {
    let block_align = channels * (bits / 8);
    let byte_rate = sample_rate * u32::from(block_align);
    w.write_all(b"RIFF")?;
    w.write_all(&(36 + data_len).to_le_bytes())?;
    w.write_all(b"WAVEfmt ")?;
    w.write_all(&16u32.to_le_bytes())?;
    w.write_all(&tag.to_le_bytes())?;
    w.write_all(&channels.to_le_bytes())?;
    w.write_all(&sample_rate.to_le_bytes())?;
    w.write_all(&byte_rate.to_le_bytes())?;
    w.write_all(&block_align.to_le_bytes())?;
    w.write_all(&bits.to_le_bytes())?;
    w.write_all(b"data")?;
    w.write_all(&data_len.to_le_bytes())
}

fn data_len(n_samples: usize, width: usize) -> std::io::Result<u32> {
    u32::try_from(n_samples * width)
        .map_err(|_| std::io::Error::new(std::io::ErrorKind::InvalidInput, "audio too long for RIFF"))
}

/// Writes mono 16-bit PCM. Samples are clipped to [-1, 1] and scaled by 32767.
pub fn write_pcm16<W: Write>(w: &mut W, sample_rate: u32, samples: &[f64]) -> std::io::Result<()> {
    write_header(w, FORMAT_PCM, 1, sample_rate, 16, data_len(samples.len(), 2)?)?;
    let mut buf = Vec::with_capacity(samples.len() * 2);
    for &s in samples {
        let q = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        buf.extend_from_slice(&q.to_le_bytes());
    }
    w.write_all(&buf)
}

/// Writes interleaved 32-bit float frames with `channels` channels.
pub fn write_f32<W: Write>(
    w: &mut W,
    sample_rate: u32,
    channels: u16,
    interleaved: &[f32],
) -> std::io::Result<()> {
    write_header(
        w,
        FORMAT_IEEE_FLOAT,
        channels,
        sample_rate,
        32,
        data_len(interleaved.len(), 4)?,
    )?;
    let mut buf = Vec::with_capacity(interleaved.len() * 4);
    for s in interleaved {
        buf.extend_from_slice(&s.to_le_bytes());
    }
    w.write_all(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pcm_image(tag: u16, channels: u16, bits: u16, payload: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        write_header(&mut out, tag, channels, 8000, bits, payload.len() as u32).unwrap();
        out.extend_from_slice(payload);
        out
    }

    #[test]
    fn pcm16_scaling() {
        let payload: Vec<u8> = [16384i16, -16384].iter().flat_map(|v| v.to_le_bytes()).collect();
        let wav = decode(&pcm_image(FORMAT_PCM, 1, 16, &payload)).unwrap();
        assert_eq!(wav.mono, vec![0.5, -0.5]);
        assert_eq!(wav.sample_rate, 8000);
    }

    #[test]
    fn pcm24_sign_extension() {
        // -4194304 = 0xC00000 -> -0.5
        let payload = [0x00, 0x00, 0xC0, 0x00, 0x00, 0x40];
        let wav = decode(&pcm_image(FORMAT_PCM, 1, 24, &payload)).unwrap();
        assert_eq!(wav.mono, vec![-0.5, 0.5]);
    }

    #[test]
    fn pcm8_is_offset_binary() {
        let wav = decode(&pcm_image(FORMAT_PCM, 1, 8, &[128, 192, 64])).unwrap();
        assert_eq!(wav.mono, vec![0.0, 0.5, -0.5]);
    }

    #[test]
    fn float64_and_stereo_downmix() {
        let payload: Vec<u8> = [1.0f64, 0.0, 0.0, 1.0].iter().flat_map(|v| v.to_le_bytes()).collect();
        let wav = decode(&pcm_image(FORMAT_IEEE_FLOAT, 2, 64, &payload)).unwrap();
        assert_eq!(wav.channels, 2);
        assert_eq!(wav.mono, vec![0.5, 0.5]);
    }

    #[test]
    fn extensible_header_resolves_subformat() {
        let mut out = Vec::new();
        let payload: Vec<u8> = [8192i16].iter().flat_map(|v| v.to_le_bytes()).collect();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&(4 + 8 + 40 + 8 + payload.len() as u32).to_le_bytes());
        out.extend_from_slice(b"WAVEfmt ");
        out.extend_from_slice(&40u32.to_le_bytes());
        out.extend_from_slice(&FORMAT_EXTENSIBLE.to_le_bytes());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&44100u32.to_le_bytes());
        out.extend_from_slice(&88200u32.to_le_bytes());
        out.extend_from_slice(&2u16.to_le_bytes());
        out.extend_from_slice(&16u16.to_le_bytes());
        out.extend_from_slice(&22u16.to_le_bytes());
        out.extend_from_slice(&16u16.to_le_bytes());
        out.extend_from_slice(&4u32.to_le_bytes());
        out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
        out.extend_from_slice(&[0u8; 14]);
        out.extend_from_slice(b"data");
        out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&payload);
        let wav = decode(&out).unwrap();
        assert_eq!(wav.mono, vec![0.25]);
        assert_eq!(wav.sample_rate, 44100);
    }

    #[test]
    fn skips_unknown_and_odd_chunks() {
        let mut out = Vec::new();
        let payload: Vec<u8> = 16384i16.to_le_bytes().to_vec();
        write_header(&mut out, FORMAT_PCM, 1, 8000, 16, 2).unwrap();
        // splice a padded 3-byte LIST chunk before data
        let data_at = out.len() - 8;
        let tail = out.split_off(data_at);
        out.extend_from_slice(b"LIST");
        out.extend_from_slice(&3u32.to_le_bytes());
        out.extend_from_slice(&[1, 2, 3, 0]);
        out.extend_from_slice(&tail);
        out.extend_from_slice(&payload);
        assert_eq!(decode(&out).unwrap().mono, vec![0.5]);
    }

    #[test]
    fn rejects_non_wav_and_bad_encodings() {
        assert!(matches!(decode(b"OggS\0\0\0\0\0\0\0\0"), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(
            decode(&pcm_image(0x0002, 1, 4, &[0, 0])),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            decode(&pcm_image(FORMAT_IEEE_FLOAT, 1, 16, &[0, 0])),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn zero_frames_is_empty_audio() {
        assert!(matches!(decode(&pcm_image(FORMAT_PCM, 1, 16, &[])), Err(Error::EmptyAudio)));
    }

    #[test]
    fn pcm16_writer_round_trips_within_quantization() {
        let samples = [0.0, 0.25, -0.75, 1.0, -1.0];
        let mut out = Vec::new();
        write_pcm16(&mut out, 22050, &samples).unwrap();
        let wav = decode(&out).unwrap();
        for (a, b) in samples.iter().zip(&wav.mono) {
            assert!((a - b).abs() <= 1.0 / 32768.0 + 1e-12);
        }
    }
}
