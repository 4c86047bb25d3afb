use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use log::{info, warn};
use pwflow::flowio::{
    colorize_flow, evaluate_aep, motion_edges, read_flo, read_gray_image, read_kitti_flow_png, read_mask, read_matches,
    write_flo, write_mask, write_rgb_image, MaskProvenance,
};
use pwflow::potts1d::{solve_affine_potts, solve_tv_line, LineSignal};
use pwflow::{coarse_to_fine_estimate, FlowField, PixelMask, RegularizerMode};

use crate::args::{ColorizeArgs, DenoiseArgs, EdgesArgs, EstimateArgs, EvaluateArgs, ParamFlags};
use crate::error::{CliError, WithPath};

fn is_png(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// `.png` is read as KITTI flow (with its validity mask), anything else as
/// Middlebury `.flo`.
fn read_flow(path: &Path) -> Result<(FlowField<f64>, Option<PixelMask>), CliError> {
    if is_png(path) {
        let (flow, valid) = read_kitti_flow_png(path).at(path)?;
        Ok((flow, Some(valid)))
    } else {
        Ok((read_flo(path).at(path)?, None))
    }
}

pub fn estimate(args: EstimateArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => ParamFlags::from_config_file(path)?,
        None => ParamFlags::default(),
    };
    let (solver, pyramid) = args.params.over(file).configs()?;
    let first = read_gray_image::<f64>(&args.frame1).at(&args.frame1)?;
    let second = read_gray_image::<f64>(&args.frame2).at(&args.frame2)?;
    let matches = match &args.matches {
        Some(path) => {
            let (w, h) = first.shape();
            let ingest = read_matches::<f64>(path, w, h).at(path)?;
            info!(
                "{} matches ({} out of bounds)",
                ingest.matches.len(),
                ingest.out_of_bounds
            );
            Some(ingest.matches)
        }
        None => None,
    };
    info!(
        "estimating {}x{} flow, mode {}, lambda {}",
        first.width(),
        first.height(),
        solver.mode,
        solver.lambda
    );
    let estimate = coarse_to_fine_estimate(&first, &second, matches.as_ref(), &solver, &pyramid)?;
    if !estimate.all_converged() {
        warn!(
            "some warps stopped at the iteration cap; worst coupling residual {}",
            estimate.worst_coupling_residual()
        );
    }
    info!("worst coupling residual {}", estimate.worst_coupling_residual());
    write_flo(&args.out, &estimate.flow).at(&args.out)?;
    info!("wrote {}", args.out.display());
    Ok(())
}

pub fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let (est, _) = read_flow(&args.estimate)?;
    let (truth, valid) = read_flow(&args.truth)?;
    let occluded = match &args.mask {
        Some(path) => Some(read_mask(path).at(path)?),
        None => None,
    };
    let mask = match (valid, occluded) {
        (None, None) => None,
        (Some(v), None) => Some((v, MaskProvenance::Valid)),
        (None, Some(o)) => Some((o.not(), MaskProvenance::NonOccluded)),
        (Some(v), Some(o)) => {
            if v.shape() != o.shape() {
                return Err(pwflow::Error::ShapeMismatch {
                    expected: v.shape(),
                    found: o.shape(),
                }
                .into());
            }
            Some((v.and(&o.not()), MaskProvenance::ValidNonOccluded))
        }
    };
    let report = evaluate_aep(&est, &truth, mask.as_ref().map(|(m, p)| (m, *p)))?;
    println!("aep={:.6}", report.aep);
    println!("count={}", report.count);
    println!("mask={}", report.mask);
    Ok(())
}

pub fn colorize(args: ColorizeArgs) -> Result<(), CliError> {
    let (flow, _) = read_flow(&args.flow)?;
    if args.max_magnitude.is_some_and(|m| !(m > 0.0)) {
        return Err(CliError::Usage("--max-magnitude must be positive".into()));
    }
    write_rgb_image(&args.out, &colorize_flow(&flow, args.max_magnitude)).at(&args.out)
}

pub fn edges(args: EdgesArgs) -> Result<(), CliError> {
    let (flow, _) = read_flow(&args.flow)?;
    let mask = motion_edges(&flow, args.threshold);
    write_mask(&args.out, &mask).at(&args.out)?;
    println!("edges={}", mask.count());
    Ok(())
}

fn read_columns(path: &Path, header: bool) -> Result<Vec<Vec<f64>>, CliError> {
    let input = |source: pwflow::Error| CliError::Input {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| input(io::Error::other(e).into()))?;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1 + usize::from(header);
        let record = record.map_err(|e| CliError::Csv {
            path: path.to_path_buf(),
            row,
            column: 0,
            reason: e.to_string(),
        })?;
        if columns.is_empty() {
            columns = vec![Vec::new(); record.len()];
        }
        for (c, cell) in record.iter().enumerate() {
            let value = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Csv {
                    path: path.to_path_buf(),
                    row,
                    column: c + 1,
                    reason: format!("not a finite number: {cell:?}"),
                })?;
            columns[c].push(value);
        }
    }
    if columns.first().is_none_or(Vec::is_empty) {
        return Err(CliError::Csv {
            path: path.to_path_buf(),
            row: 0,
            column: 0,
            reason: "no data rows".into(),
        });
    }
    Ok(columns)
}

/// Breakpoints are reported as the 1-based index of the last sample
/// before each jump.
pub fn denoise1d(args: DenoiseArgs) -> Result<(), CliError> {
    if !(args.kappa >= 0.0 && args.kappa.is_finite()) {
        return Err(CliError::Usage("kappa must be finite and >= 0".into()));
    }
    let columns = read_columns(&args.input, args.header)?;
    let signal = LineSignal::new(columns.clone())?;
    let n = signal.len();
    let (fitted, breakpoints, energy) = match args.mode {
        RegularizerMode::AffineL0 => {
            let seg = solve_affine_potts(&signal, args.kappa);
            let fitted: Vec<Vec<f64>> = (0..signal.num_channels()).map(|t| seg.fitted(t)).collect();
            (fitted, seg.breakpoints(), seg.energy())
        }
        RegularizerMode::Tv => {
            let out = solve_tv_line(&signal, args.kappa / 2.0);
            let fitted = out.channels().to_vec();
            let breakpoints = (1..n)
                .filter(|&p| {
                    fitted
                        .iter()
                        .any(|c| (c[p] - c[p - 1]).abs() > 1e-9 * (1.0 + c[p].abs()))
                })
                .collect();
            let mut energy = 0.0;
            for (x, g) in fitted.iter().zip(&columns) {
                energy += args.kappa * x.windows(2).map(|d| (d[1] - d[0]).abs()).sum::<f64>();
                energy += x.iter().zip(g).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            }
            (fitted, breakpoints, energy)
        }
    };

    let mut csv_out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path).map_err(|e| CliError::Input {
            path: path.clone(),
            source: e.into(),
        })?),
        None => Box::new(io::stdout().lock()),
    };
    let write_err = |e: io::Error| CliError::Input {
        path: args.out.clone().unwrap_or_else(|| "<stdout>".into()),
        source: e.into(),
    };
    for p in 0..n {
        let row: Vec<String> = fitted.iter().map(|c| c[p].to_string()).collect();
        writeln!(csv_out, "{}", row.join(",")).map_err(write_err)?;
    }
    csv_out.flush().map_err(write_err)?;
    drop(csv_out);

    let summary = format!(
        "segments={}\nbreakpoints={}\nenergy={energy:.9}",
        breakpoints.len() + 1,
        breakpoints.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
