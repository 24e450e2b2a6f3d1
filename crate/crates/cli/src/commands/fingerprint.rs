use spectromap::Format;

use super::{create_dir, fingerprint_path, process_file, write_fingerprint};
use crate::args::FingerprintArgs;
use crate::error::{CliError, CliResult, Stage};

pub fn run(args: &FingerprintArgs) -> CliResult<()> {
    let sp = args.pipeline.spectrogram()?;
    let search = args.pipeline.search()?;
    let format = Format::from(args.format);
    let processed = process_file(&args.input, &sp, &search)?;
    create_dir(&args.out, Stage::Serialize)?;
    let out = fingerprint_path(&args.out, &args.input, format);
    write_fingerprint(&processed.fingerprint, format, &out)?;
    if args.spectrogram {
        let stem = args.input.file_stem().unwrap_or_default().to_string_lossy();
        let path = args.out.join(format!("{stem}.spectrogram.csv"));
        let mut buf = Vec::new();
        processed
            .spectrogram
            .write_csv(&mut buf)
            .and_then(|_| std::fs::write(&path, buf))
            .map_err(|e| CliError::new(Stage::Serialize, Some(&path), e.into()))?;
    }
    println!(
        "{}: {} peaks in {:.6} s -> {}",
        args.input.display(),
        processed.fingerprint.len(),
        processed.elapsed.as_secs_f64(),
        out.display()
    );
    Ok(())
}
