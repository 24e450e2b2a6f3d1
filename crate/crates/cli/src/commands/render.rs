use spectromap::fingerprint::{read_matrix_csv, CSV_HEADER};
use spectromap::render_constellation;

use super::aggregate::load_mask;
use crate::args::RenderArgs;
use crate::error::{CliError, CliResult, Stage};

pub fn run(args: &RenderArgs) -> CliResult<()> {
    let input = &args.input;
    let out = args.out.clone().unwrap_or_else(|| input.with_extension("pgm"));
    let text = std::fs::read_to_string(input).map_err(|e| {
        let err = match e.kind() {
            std::io::ErrorKind::NotFound => spectromap::Error::FileNotFound(input.clone()),
            _ => e.into(),
        };
        CliError::new(Stage::Load, Some(input), err)
    })?;
    let is_json = input.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let is_fp_csv = text.lines().find(|l| !l.trim().is_empty()).map(str::trim) == Some(CSV_HEADER);
    let shape = if is_json || is_fp_csv {
        let mask = load_mask(input, &args.pipeline, args.sample_rate, args.frames)?;
        render_constellation(mask.bits(), &out).map_err(|e| CliError::new(Stage::Render, Some(&out), e))?;
        mask.shape()
    } else {
        let grid = read_matrix_csv(&text).map_err(|e| CliError::new(Stage::Load, Some(input), e))?;
        render_constellation(&grid, &out).map_err(|e| CliError::new(Stage::Render, Some(&out), e))?;
        grid.shape()
    };
    println!("{} ({}x{}) -> {}", input.display(), shape.0, shape.1, out.display());
    Ok(())
}
