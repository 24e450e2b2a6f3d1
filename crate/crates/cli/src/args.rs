use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spectromap::{Condition, Format, PeakSearchConfig, SpectrogramParams, WindowKind};

use crate::error::{CliError, CliResult, Stage};

#[derive(Debug, Parser)]
#[command(name = "spectromap", version, about = "Constellation-map audio fingerprints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fingerprint one WAV file.
    Fingerprint(FingerprintArgs),
    /// Fingerprint every WAV under a dataset root and report per-set timings.
    Batch(BatchArgs),
    /// Sum fingerprints of one class into a count matrix and render it.
    Aggregate(AggregateArgs),
    /// Render a fingerprint or count matrix as a PGM image.
    Render(RenderArgs),
    /// Generate a seeded synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| format!("bad numerator in '{s}'"))?;
            let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in '{s}'"))?;
            n / d
        }
        None => s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?,
    };
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("fraction must lie in (0, 1], got {v}"))
    }
}

fn parse_condition(s: &str) -> Result<Condition, String> {
    s.parse().map_err(|e: spectromap::Error| e.to_string())
}

fn parse_window(s: &str) -> Result<WindowKind, String> {
    s.parse().map_err(|e: spectromap::Error| e.to_string())
}

/// STFT and peak-search settings shared by every processing subcommand.
#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// FFT window length in samples.
    #[arg(long, default_value_t = 1024)]
    pub nfft: usize,
    /// Samples shared by consecutive frames.
    #[arg(long, default_value_t = 0)]
    pub noverlap: usize,
    /// hamming, hann, blackman or rectangular.
    #[arg(long, default_value = "hamming", value_parser = parse_window)]
    pub window: WindowKind,
    /// Share of the axis length used as sliding-window length (e.g. 0.15 or 1/3).
    #[arg(long, default_value = "1/3", value_parser = parse_fraction)]
    pub fraction: f64,
    /// 0 = time bands, 1 = frequency bands, 2 = both.
    #[arg(long, default_value = "2", value_parser = parse_condition)]
    pub condition: Condition,
}

impl PipelineArgs {
    pub fn spectrogram(&self) -> CliResult<SpectrogramParams> {
        SpectrogramParams::new(self.window, self.nfft, self.noverlap)
            .map_err(|e| CliError::new(Stage::Args, None, e))
    }

    pub fn search(&self) -> CliResult<PeakSearchConfig> {
        PeakSearchConfig::new(self.fraction, self.condition).map_err(|e| CliError::new(Stage::Args, None, e))
    }
}

#[derive(Debug, Clone, Args)]
pub struct FingerprintArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Also write `<stem>.spectrogram.csv`.
    #[arg(long)]
    pub spectrogram: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    /// One subfolder per set (Urban Sound 8K `audio/foldN`, synthetic trees).
    Folders,
    /// Flat directory whose file names start with the fold number (ESC-50 `audio/`).
    Esc50,
}

#[derive(Debug, Clone, Args)]
pub struct BatchArgs {
    pub root: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Output directory for fingerprints and `stats.csv`.
    #[arg(long, default_value = "spectromap-out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Worker count; falls back to SPECTROMAP_JOBS, then to the number of CPUs.
    #[arg(long, env = "SPECTROMAP_JOBS", value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
    #[arg(long, value_enum, default_value_t = Layout::Folders)]
    pub layout: Layout,
    /// ESC-50 metadata CSV; with `--layout esc50`, keeps only rows flagged esc10.
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AggregateArgs {
    /// Fingerprint files or glob patterns (`.csv` or `.json`).
    #[arg(required = true)]
    pub inputs: Vec<String>,
    #[arg(long)]
    pub label: String,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Output directory for `<label>.counts.csv` and `<label>.pgm`.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Crop every member to the smallest shape instead of failing.
    #[arg(long)]
    pub crop_to_min: bool,
    /// Sample rate of CSV fingerprints, which do not record it.
    #[arg(long)]
    pub sample_rate: Option<u32>,
    /// Frame count of CSV fingerprints, which do not record it.
    #[arg(long)]
    pub frames: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Fingerprint (`.json`, or `.csv` with the fingerprint header) or count-matrix CSV.
    pub input: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Output PGM path; defaults to the input path with a `.pgm` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub sample_rate: Option<u32>,
    #[arg(long)]
    pub frames: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub folders: u32,
    #[arg(long, default_value_t = 80, value_parser = clap::value_parser!(u32).range(1..))]
    pub files: u32,
    /// Clip length in seconds.
    #[arg(long, default_value_t = 5.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 22050, value_parser = clap::value_parser!(u32).range(1..))]
    pub sample_rate: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, env = "SPECTROMAP_JOBS", value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
}

pub fn resolve_jobs(jobs: Option<u32>) -> usize {
    jobs.map(|j| j as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["spectromap", "fingerprint", "a.wav"]).unwrap();
        let Command::Fingerprint(a) = cli.command else {
            panic!("expected fingerprint")
        };
        assert_eq!(a.pipeline.nfft, 1024);
        assert_eq!(a.pipeline.noverlap, 0);
        assert_eq!(a.pipeline.window, WindowKind::Hamming);
        assert!((a.pipeline.fraction - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(a.pipeline.condition, Condition::Both);
        assert_eq!(a.format, FormatArg::Csv);
    }

    #[test]
    fn fraction_forms() {
        assert_eq!(parse_fraction("0.15").unwrap(), 0.15);
        assert_eq!(parse_fraction("1/4").unwrap(), 0.25);
        assert!(parse_fraction("0").is_err());
        assert!(parse_fraction("3/2").is_err());
        assert!(parse_fraction("x").is_err());
    }

    #[test]
    fn rejects_bad_condition_and_zero_jobs() {
        assert!(Cli::try_parse_from(["spectromap", "fingerprint", "a.wav", "--condition", "3"]).is_err());
        assert!(Cli::try_parse_from(["spectromap", "batch", "d", "--jobs", "0"]).is_err());
    }
}
