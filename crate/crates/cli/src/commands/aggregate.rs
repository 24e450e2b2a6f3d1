use std::path::{Path, PathBuf};

use spectromap::fingerprint::write_matrix_csv;
use spectromap::{aggregate_class, parse_fingerprint, render_constellation, Error, FingerprintParams, Format, PeakMask};

use super::{create_dir, natural_key};
use crate::args::{AggregateArgs, PipelineArgs};
use crate::error::{CliError, CliResult, Stage};

pub fn format_for(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Csv,
    }
}

/// Reads a fingerprint file and rebuilds its identification matrix.
///
/// CSV fingerprints carry no grid metadata, so `sample_rate` and `frames`
/// (plus the pipeline flags) must describe the grid they were taken from.
pub fn load_mask(
    path: &Path,
    pipeline: &PipelineArgs,
    sample_rate: Option<u32>,
    frames: Option<usize>,
) -> CliResult<PeakMask> {
    let bytes = std::fs::read(path).map_err(|e| {
        let err = match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
            _ => e.into(),
        };
        CliError::new(Stage::Load, Some(path), err)
    })?;
    let mut fp = parse_fingerprint(&bytes, format_for(path)).map_err(|e| CliError::new(Stage::Load, Some(path), e))?;
    if fp.params().is_none() {
        let sr = sample_rate.ok_or_else(|| {
            CliError::new(
                Stage::Load,
                Some(path),
                Error::Schema("fingerprint records no sample rate; pass --sample-rate".into()),
            )
        })?;
        fp = fp.with_params(FingerprintParams::new(sr, &pipeline.spectrogram()?, &pipeline.search()?));
    }
    if fp.shape().is_none() {
        let n = frames.ok_or_else(|| {
            CliError::new(
                Stage::Load,
                Some(path),
                Error::Schema("fingerprint records no shape; pass --frames".into()),
            )
        })?;
        let bins = fp.params().expect("set above").nfft / 2 + 1;
        fp = fp.with_shape((bins, n));
    }
    fp.to_mask().map_err(|e| CliError::new(Stage::Load, Some(path), e))
}

pub fn expand_inputs(patterns: &[String]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for pat in patterns {
        if pat.contains(['*', '?', '[']) {
            let paths = glob::glob(pat).map_err(|e| CliError::input(Stage::Args, format!("bad pattern '{pat}': {e}")))?;
            out.extend(paths.filter_map(Result::ok).filter(|p| p.is_file()));
        } else {
            out.push(PathBuf::from(pat));
        }
    }
    out.sort_by_key(|p| natural_key(&p.to_string_lossy()));
    out.dedup();
    if out.is_empty() {
        return Err(CliError::input(
            Stage::Args,
            format!("no fingerprint files match {}", patterns.join(" ")),
        ));
    }
    Ok(out)
}

pub fn run(args: &AggregateArgs) -> CliResult<()> {
    let files = expand_inputs(&args.inputs)?;
    let mut masks = files
        .iter()
        .map(|f| load_mask(f, &args.pipeline, args.sample_rate, args.frames))
        .collect::<CliResult<Vec<_>>>()?;

    let first = masks[0].shape();
    let mismatched: Vec<(&PathBuf, (usize, usize))> = files
        .iter()
        .zip(&masks)
        .filter(|(_, m)| m.shape() != first)
        .map(|(f, m)| (f, m.shape()))
        .collect();
    if !mismatched.is_empty() {
        if args.crop_to_min {
            let rows = masks.iter().map(|m| m.shape().0).min().expect("non-empty");
            let cols = masks.iter().map(|m| m.shape().1).min().expect("non-empty");
            log::info!("cropping {} members to {rows}x{cols}", masks.len());
            masks = masks.iter().map(|m| m.crop(rows, cols)).collect();
        } else {
            let listed: Vec<String> = mismatched
                .iter()
                .map(|(f, s)| format!("{} has {:?}", f.display(), s))
                .collect();
            return Err(CliError::new(
                Stage::Aggregate,
                None,
                Error::ShapeMismatch(format!(
                    "{} has {:?}; {} (use --crop-to-min to crop)",
                    files[0].display(),
                    first,
                    listed.join("; ")
                )),
            ));
        }
    }

    let class = aggregate_class(&masks, &args.label).map_err(|e| CliError::new(Stage::Aggregate, None, e))?;
    create_dir(&args.out, Stage::Aggregate)?;
    let counts_path = args.out.join(format!("{}.counts.csv", args.label));
    let mut buf = Vec::new();
    write_matrix_csv(&class.counts, &mut buf)
        .and_then(|_| std::fs::write(&counts_path, buf))
        .map_err(|e| CliError::new(Stage::Aggregate, Some(&counts_path), e.into()))?;
    let pgm_path = args.out.join(format!("{}.pgm", args.label));
    render_constellation(&class.counts, &pgm_path).map_err(|e| CliError::new(Stage::Render, Some(&pgm_path), e))?;
    println!(
        "{}: {} members, shape {:?}, max count {}, {} peaks -> {}",
        class.label,
        class.n_members,
        class.counts.shape(),
        class.max_count(),
        class.total_peaks(),
        counts_path.display()
    );
    Ok(())
}
