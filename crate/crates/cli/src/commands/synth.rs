use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use spectromap::synth::{dataset_seeds, synth_clip};
use spectromap::wav::write_pcm16;

use super::create_dir;
use crate::args::{resolve_jobs, SynthArgs};
use crate::error::{CliError, CliResult, Stage};

pub const MANIFEST: &str = "manifest.txt";

/// Writes `fold{i}/clip_{j:03}.wav` for every folder and file, plus a
/// manifest with one `path<TAB>seed` line per clip.
pub fn run(args: &SynthArgs) -> CliResult<()> {
    if !(args.duration > 0.0 && args.duration.is_finite()) {
        return Err(CliError::input(Stage::Args, "duration must be positive"));
    }
    let seeds = dataset_seeds(args.seed, args.folders as usize, args.files as usize);
    let mut jobs_list: Vec<(PathBuf, String, u64)> = Vec::new();
    for (i, folder) in seeds.iter().enumerate() {
        let dir = format!("fold{}", i + 1);
        create_dir(&args.out.join(&dir), Stage::Synth)?;
        for (j, &seed) in folder.iter().enumerate() {
            let rel = format!("{dir}/clip_{j:03}.wav");
            jobs_list.push((args.out.join(&rel), rel, seed));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_jobs(args.jobs))
        .build()
        .map_err(|e| CliError::input(Stage::Args, e.to_string()))?;
    pool.install(|| {
        jobs_list.par_iter().try_for_each(|(path, _, seed)| {
            let samples = synth_clip(*seed, args.duration, args.sample_rate);
            let mut buf = Vec::with_capacity(44 + 2 * samples.len());
            write_pcm16(&mut buf, args.sample_rate, &samples)
                .and_then(|_| std::fs::write(path, buf))
                .map_err(|e| CliError::new(Stage::Synth, Some(path), e.into()))
        })
    })?;
    let mut manifest = String::new();
    for (_, rel, seed) in &jobs_list {
        let _ = writeln!(manifest, "{rel}\t{seed}");
    }
    let manifest_path = args.out.join(MANIFEST);
    std::fs::write(&manifest_path, manifest).map_err(|e| CliError::new(Stage::Synth, Some(&manifest_path), e.into()))?;
    println!(
        "{} clips ({} folders x {}) of {} s at {} Hz -> {}",
        jobs_list.len(),
        args.folders,
        args.files,
        args.duration,
        args.sample_rate,
        args.out.display()
    );
    Ok(())
}
