use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use spectromap::stats::{format_table, STATS_CSV_HEADER};
use spectromap::{Format, PeakSearchConfig, SpectrogramParams, TimingStats};

use super::{create_dir, fingerprint_path, natural_key, process_file, write_fingerprint};
use crate::args::{resolve_jobs, BatchArgs, Layout};
use crate::error::{CliError, CliResult, Stage, EXIT_PROCESSING};

/// One fold or class folder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileSet {
    pub name: String,
    pub files: Vec<PathBuf>,
}

#[derive(Debug)]
pub struct BatchReport {
    pub rows: Vec<(String, TimingStats)>,
    pub failures: Vec<CliError>,
    pub succeeded: usize,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    let err = if e.kind() == std::io::ErrorKind::NotFound {
        spectromap::Error::FileNotFound(path.to_path_buf())
    } else {
        e.into()
    };
    CliError::new(Stage::Load, Some(path), err)
}

fn is_wav(p: &Path) -> bool {
    p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav"))
}

fn sorted_entries(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut entries = std::fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect::<Vec<_>>();
    entries.sort_by_key(|p| natural_key(&p.file_name().unwrap_or_default().to_string_lossy()));
    Ok(entries)
}

fn name_of(p: &Path) -> String {
    p.file_name().unwrap_or_default().to_string_lossy().into_owned()
}

/// Subfolders of `root` as sets; a root without subfolders is a single set.
pub fn discover_folders(root: &Path) -> CliResult<Vec<FileSet>> {
    let entries = sorted_entries(root)?;
    let dirs: Vec<&PathBuf> = entries.iter().filter(|p| p.is_dir()).collect();
    if dirs.is_empty() {
        return Ok(vec![FileSet {
            name: name_of(root),
            files: entries.iter().filter(|p| is_wav(p)).cloned().collect(),
        }]);
    }
    dirs.into_iter()
        .map(|d| {
            Ok(FileSet {
                name: name_of(d),
                files: sorted_entries(d)?.into_iter().filter(|p| is_wav(p)).collect(),
            })
        })
        .collect()
}

/// Names flagged `esc10` in an ESC-50 metadata CSV.
fn esc10_names(meta: &Path) -> CliResult<HashSet<String>> {
    let text = std::fs::read_to_string(meta).map_err(|e| io_err(meta, e))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').map(str::trim).collect();
    let col = |name: &str| {
        header.iter().position(|h| *h == name).ok_or_else(|| {
            CliError::new(
                Stage::Load,
                Some(meta),
                spectromap::Error::Schema(format!("metadata has no '{name}' column")),
            )
        })
    };
    let (file_col, flag_col) = (col("filename")?, col("esc10")?);
    Ok(lines
        .filter_map(|l| {
            let fields: Vec<&str> = l.split(',').map(str::trim).collect();
            let flag = fields.get(flag_col)?;
            matches!(flag.to_ascii_lowercase().as_str(), "true" | "1").then(|| fields.get(file_col).map(|s| s.to_string()))?
        })
        .collect())
}

/// Groups a flat ESC-50 audio directory by the fold number that leads each file name.
pub fn discover_esc50(root: &Path, meta: Option<&Path>) -> CliResult<Vec<FileSet>> {
    let keep = meta.map(esc10_names).transpose()?;
    let mut folds: BTreeMap<u64, Vec<PathBuf>> = BTreeMap::new();
    for p in sorted_entries(root)?.into_iter().filter(|p| is_wav(p)) {
        let name = name_of(&p);
        if keep.as_ref().is_some_and(|k| !k.contains(&name)) {
            continue;
        }
        match name.split('-').next().and_then(|f| f.parse::<u64>().ok()) {
            Some(fold) => folds.entry(fold).or_default().push(p),
            None => log::warn!("skipping {}: no leading fold number", p.display()),
        }
    }
    Ok(folds
        .into_iter()
        .map(|(fold, files)| FileSet {
            name: format!("fold{fold}"),
            files,
        })
        .collect())
}

/// Fingerprints every file of every set with `jobs` workers.
///
/// Per-file failures are logged and collected; they never stop the batch.
pub fn run_sets(
    sets: &[FileSet],
    sp: &SpectrogramParams,
    search: &PeakSearchConfig,
    format: Format,
    out: &Path,
    jobs: usize,
) -> CliResult<BatchReport> {
    for set in sets {
        create_dir(&out.join(&set.name), Stage::Serialize)?;
    }
    let tasks: Vec<(usize, &Path)> = sets
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.files.iter().map(move |f| (i, f.as_path())))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::input(Stage::Args, format!("cannot start {jobs} workers: {e}")))?;
    let results: Vec<(usize, CliResult<f64>)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(set, path)| {
                let r = process_file(path, sp, search).and_then(|p| {
                    let target = fingerprint_path(&out.join(&sets[set].name), path, format);
                    write_fingerprint(&p.fingerprint, format, &target)?;
                    Ok(p.elapsed.as_secs_f64())
                });
                (set, r)
            })
            .collect()
    });

    let mut durations = vec![Vec::new(); sets.len()];
    let mut failures = Vec::new();
    for (set, r) in results {
        match r {
            Ok(d) => durations[set].push(d),
            Err(e) => {
                log::warn!("{e}");
                failures.push(e);
            }
        }
    }
    let succeeded = durations.iter().map(Vec::len).sum();
    let rows = sets
        .iter()
        .zip(&durations)
        .map(|(s, d)| (s.name.clone(), TimingStats::from_durations(d)))
        .collect();
    Ok(BatchReport {
        rows,
        failures,
        succeeded,
    })
}

pub fn stats_csv(rows: &[(String, TimingStats)]) -> String {
    let mut out = String::from(STATS_CSV_HEADER);
    out.push('\n');
    for (name, s) in rows {
        out.push_str(&s.csv_row(name));
        out.push('\n');
    }
    out
}

pub fn run(args: &BatchArgs) -> CliResult<i32> {
    let sp = args.pipeline.spectrogram()?;
    let search = args.pipeline.search()?;
    if !args.root.is_dir() {
        return Err(CliError::new(
            Stage::Load,
            Some(&args.root),
            spectromap::Error::FileNotFound(args.root.clone()),
        ));
    }
    let sets = match args.layout {
        Layout::Folders => discover_folders(&args.root)?,
        Layout::Esc50 => discover_esc50(&args.root, args.meta.as_deref())?,
    };
    let jobs = resolve_jobs(args.jobs);
    let report = run_sets(&sets, &sp, &search, args.format.into(), &args.out, jobs)?;

    print!("{}", format_table(&report.rows));
    let stats_path = args.out.join("stats.csv");
    std::fs::write(&stats_path, stats_csv(&report.rows))
        .map_err(|e| CliError::new(Stage::Serialize, Some(&stats_path), e.into()))?;
    println!(
        "{} files processed, {} failed, {} workers; stats in {}",
        report.succeeded,
        report.failures.len(),
        jobs,
        stats_path.display()
    );
    if report.succeeded == 0 && !report.failures.is_empty() {
        eprintln!("error: all {} files failed", report.failures.len());
        return Ok(EXIT_PROCESSING);
    }
    Ok(0)
}
