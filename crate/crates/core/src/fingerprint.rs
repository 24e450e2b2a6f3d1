//! Fingerprint triples, their CSV/JSON encodings, class aggregation and
//! constellation rendering.

use std::cmp::Ordering;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::peaks::{Condition, PeakMask, PeakSearchConfig};
use crate::spectrogram::{Spectrogram, SpectrogramParams, WindowKind};

pub const CSV_HEADER: &str = "time_s,frequency_hz,amplitude_db";

/// One prominent spectrogram point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub time_s: f64,
    pub frequency_hz: f64,
    pub amplitude_db: f64,
}

impl Peak {
    pub fn new(time_s: f64, frequency_hz: f64, amplitude_db: f64) -> Self {
        Peak {
            time_s,
            frequency_hz,
            amplitude_db,
        }
    }

    fn order(&self, other: &Peak) -> Ordering {
        self.time_s
            .total_cmp(&other.time_s)
            .then(self.frequency_hz.total_cmp(&other.frequency_hz))
    }
}

impl Serialize for Peak {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.time_s, self.frequency_hz, self.amplitude_db].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Peak {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [t, f, a] = <[f64; 3]>::deserialize(d)?;
        Ok(Peak::new(t, f, a))
    }
}

/// Everything needed to map a fingerprint back onto its spectrogram grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerprintParams {
    pub sample_rate: u32,
    pub window: WindowKind,
    pub nfft: usize,
    pub noverlap: usize,
    pub fraction: f64,
    pub condition: Condition,
}

impl FingerprintParams {
    pub fn new(sample_rate: u32, spectrogram: &SpectrogramParams, search: &PeakSearchConfig) -> Self {
        FingerprintParams {
            sample_rate,
            window: spectrogram.window,
            nfft: spectrogram.nfft,
            noverlap: spectrogram.noverlap,
            fraction: search.fraction,
            condition: search.condition,
        }
    }

    pub fn spectrogram(&self) -> SpectrogramParams {
        SpectrogramParams {
            window: self.window,
            nfft: self.nfft,
            noverlap: self.noverlap,
        }
    }

    pub fn search(&self) -> PeakSearchConfig {
        PeakSearchConfig {
            fraction: self.fraction,
            condition: self.condition,
        }
    }
}

/// Ordered, duplicate-free peak list of one clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    #[serde(default)]
    params: Option<FingerprintParams>,
    /// `(n_freq_bins, n_frames)` of the source spectrogram.
    #[serde(default)]
    shape: Option<(usize, usize)>,
    peaks: Vec<Peak>,
}

impl Fingerprint {
    /// Sorts the peaks by (time, frequency) and rejects duplicate coordinates
    /// and non-finite values.
    pub fn new(
        mut peaks: Vec<Peak>,
        shape: Option<(usize, usize)>,
        params: Option<FingerprintParams>,
    ) -> Result<Self> {
        if let Some(i) = peaks
            .iter()
            .position(|p| !(p.time_s.is_finite() && p.frequency_hz.is_finite() && p.amplitude_db.is_finite()))
        {
            return Err(Error::InvalidParams(format!("peak {i} has a non-finite coordinate")));
        }
        peaks.sort_by(Peak::order);
        if let Some(w) = peaks.windows(2).find(|w| w[0].order(&w[1]) == Ordering::Equal) {
            return Err(Error::InvalidParams(format!(
                "duplicate peak at t={} s, f={} Hz",
                w[0].time_s, w[0].frequency_hz
            )));
        }
        Ok(Fingerprint {
            params,
            shape,
            peaks,
        })
    }

    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn shape(&self) -> Option<(usize, usize)> {
        self.shape
    }

    pub fn params(&self) -> Option<&FingerprintParams> {
        self.params.as_ref()
    }

    pub fn with_params(mut self, params: FingerprintParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn with_shape(mut self, shape: (usize, usize)) -> Self {
        self.shape = Some(shape);
        self
    }

    /// Rebuilds the identification matrix from the peak coordinates.
    ///
    /// Needs the recorded params and shape; bins and frames are recovered by
    /// rounding the inverse coordinate maps.
    pub fn to_mask(&self) -> Result<PeakMask> {
        let params = self
            .params
            .ok_or_else(|| Error::Schema("fingerprint carries no params".into()))?;
        let (rows, cols) = self
            .shape
            .ok_or_else(|| Error::Schema("fingerprint carries no shape".into()))?;
        let sp = params.spectrogram();
        sp.validate()?;
        let fs = f64::from(params.sample_rate);
        let hop = sp.hop() as f64;
        let mut mask = PeakMask::empty(rows, cols);
        for p in &self.peaks {
            let row = (p.frequency_hz * sp.nfft as f64 / fs).round();
            let col = ((p.time_s * fs - sp.nfft as f64 / 2.0) / hop).round();
            if row < 0.0 || col < 0.0 || row as usize >= rows || col as usize >= cols {
                return Err(Error::ShapeMismatch(format!(
                    "peak (t={} s, f={} Hz) falls outside a {rows}x{cols} grid",
                    p.time_s, p.frequency_hz
                )));
            }
            mask.set(row as usize, col as usize);
        }
        Ok(mask)
    }
}

/// Reads every set bit of `mask` off `spec` as a (time, frequency, dB) triple.
pub fn extract_fingerprint(spec: &Spectrogram, mask: &PeakMask) -> Result<Fingerprint> {
    if spec.shape() != mask.shape() {
        return Err(Error::ShapeMismatch(format!(
            "spectrogram is {:?} but mask is {:?}",
            spec.shape(),
            mask.shape()
        )));
    }
    let values = spec.values();
    // column-major walk is already (time, frequency) order
    let peaks = mask
        .positions()
        .into_iter()
        .map(|(r, c)| Peak::new(spec.times()[c], spec.freqs()[r], values.get(r, c)))
        .collect();
    Fingerprint::new(peaks, Some(spec.shape()), None)
}

/// Formats `x` with six significant digits, keeping trailing zeros
/// (the C `%#.6g` conversion).
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, x)
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParams(format!("unknown format '{other}'"))),
        }
    }
}

pub fn serialize_fingerprint<W: Write>(fp: &Fingerprint, format: Format, w: &mut W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut out = String::with_capacity(32 * (fp.len() + 1));
            out.push_str(CSV_HEADER);
            out.push('\n');
            for p in fp.peaks() {
                out.push_str(&format_sig6(p.time_s));
                out.push(',');
                out.push_str(&format_sig6(p.frequency_hz));
                out.push(',');
                out.push_str(&format_sig6(p.amplitude_db));
                out.push('\n');
            }
            w.write_all(out.as_bytes())?;
        }
        Format::Json => {
            serde_json::to_writer(&mut *w, fp).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn fingerprint_to_bytes(fp: &Fingerprint, format: Format) -> Vec<u8> {
    let mut out = Vec::new();
    serialize_fingerprint(fp, format, &mut out).expect("writing to a Vec cannot fail");
    out
}

fn parse_csv(text: &str) -> Result<Fingerprint> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Schema(format!(
                "expected header '{CSV_HEADER}', found '{}'",
                header.trim()
            )))
        }
        None => return Err(Error::Schema(format!("missing header '{CSV_HEADER}'"))),
    }
    let mut peaks = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                format!("line {lineno}"),
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let mut vals = [0.0; 3];
        for (i, (slot, field)) in vals.iter_mut().zip(&fields).enumerate() {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::parse(
                        format!("line {lineno}, field {}", i + 1),
                        format!("'{field}' is not a finite number"),
                    )
                })?;
        }
        peaks.push(Peak::new(vals[0], vals[1], vals[2]));
    }
    Fingerprint::new(peaks, None, None).map_err(|e| Error::parse("csv body", e.to_string()))
}

fn parse_json(bytes: &[u8]) -> Result<Fingerprint> {
    let fp: Fingerprint = serde_json::from_slice(bytes).map_err(|e| {
        let location = format!("line {}, column {}", e.line(), e.column());
        match e.classify() {
            serde_json::error::Category::Data => Error::Schema(format!("{e}")),
            _ => Error::parse(location, e.to_string()),
        }
    })?;
    Fingerprint::new(fp.peaks, fp.shape, fp.params).map_err(|e| Error::parse("peaks", e.to_string()))
}

/// Parses a fingerprint. CSV rows may arrive in any order and are re-sorted.
pub fn parse_fingerprint(bytes: &[u8], format: Format) -> Result<Fingerprint> {
    match format {
        Format::Csv => {
            let text = std::str::from_utf8(bytes).map_err(|e| Error::parse("csv", e.to_string()))?;
            parse_csv(text)
        }
        Format::Json => parse_json(bytes),
    }
}

/// Per-cell count of how many members selected each coordinate as a peak.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFingerprint {
    pub label: String,
    pub n_members: usize,
    pub counts: Grid<u32>,
}

impl ClassFingerprint {
    pub fn total_peaks(&self) -> u64 {
        self.counts.as_slice().iter().map(|&c| u64::from(c)).sum()
    }

    pub fn max_count(&self) -> u32 {
        self.counts.as_slice().iter().copied().max().unwrap_or(0)
    }

    /// Writes counts as comma-separated integers, one line per frequency bin.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write_matrix_csv(&self.counts, w)
    }
}

/// Sums binary masks element-wise.
pub fn aggregate_class(masks: &[PeakMask], label: &str) -> Result<ClassFingerprint> {
    let first = masks.first().ok_or(Error::EmptyClass)?;
    let shape = first.shape();
    if let Some((i, m)) = masks.iter().enumerate().find(|(_, m)| m.shape() != shape) {
        return Err(Error::ShapeMismatch(format!(
            "member {i} has shape {:?}, member 0 has {:?}",
            m.shape(),
            shape
        )));
    }
    let mut acc = vec![0u32; shape.0 * shape.1];
    for m in masks {
        for (a, &b) in acc.iter_mut().zip(m.bits().as_slice()) {
            *a += u32::from(b);
        }
    }
    Ok(ClassFingerprint {
        label: label.to_string(),
        n_members: masks.len(),
        counts: Grid::from_vec(shape.0, shape.1, acc).expect("shape checked"),
    })
}

pub fn write_matrix_csv<T: Copy + std::fmt::Display, W: Write>(grid: &Grid<T>, w: &mut W) -> std::io::Result<()> {
    let mut line = String::new();
    for r in 0..grid.rows() {
        line.clear();
        for (i, v) in grid.row(r).iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Reads a headerless numeric matrix written by [`write_matrix_csv`].
pub fn read_matrix_csv(text: &str) -> Result<Grid<f64>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(format!("line {}", idx + 1), format!("bad value '{}'", f.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Schema("matrix is empty".into()));
    }
    Grid::from_rows(&rows).ok_or_else(|| Error::parse("matrix", "rows have different lengths"))
}

/// Encodes a non-negative matrix as an 8-bit binary PGM.
///
/// Pixels are `round(255 * v / max)` (halves round up), so zero stays black and
/// the maximum maps to white. Row 0 is drawn at the bottom of the image.
pub fn render_pgm<T: Copy + Into<f64>>(grid: &Grid<T>) -> Vec<u8> {
    let (rows, cols) = grid.shape();
    let max = grid
        .as_slice()
        .iter()
        .map(|&v| v.into())
        .fold(0.0f64, f64::max);
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.reserve(rows * cols);
    for r in (0..rows).rev() {
        for &v in grid.row(r) {
            let v: f64 = v.into();
            let px = if max > 0.0 {
                (255.0 * v / max + 0.5).floor().clamp(0.0, 255.0) as u8
            } else {
                0
            };
            out.push(px);
        }
    }
    out
}

pub fn render_constellation<T: Copy + Into<f64>>(grid: &Grid<T>, out: impl AsRef<Path>) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParams("cannot render an empty matrix".into()));
    }
    std::fs::write(out, render_pgm(grid))?;
    Ok(())
}
