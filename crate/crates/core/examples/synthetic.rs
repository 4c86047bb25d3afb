//! Runs the estimator on the bundled synthetic pairs and prints endpoint
//! errors. Usage: `synthetic [lambda] [affine-l0|tv] [size]`.

use std::time::Instant;

use pwflow::flowio::evaluate_aep;
use pwflow::synthetic::{affine_pair, translation_pair, two_region_pair, SyntheticPair};
use pwflow::{coarse_to_fine_estimate, PyramidConfig, RegularizerMode, SolverConfig};

fn main() -> pwflow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut solver = SolverConfig::<f64>::default();
    if let Some(l) = args.first() {
        solver.lambda = l.parse().expect("lambda must be a number");
    }
    if let Some(m) = args.get(1) {
        solver.mode = m.parse::<RegularizerMode>()?;
    }
    let size = args.get(2).map_or(64, |s| s.parse().expect("size must be an integer"));

    let fixtures: [(&str, SyntheticPair<f64>); 3] = [
        ("translation", translation_pair(size, size, 7, [0.5, -0.25])?),
        ("two-region", two_region_pair(size, size, 11)?),
        ("affine", affine_pair(size, size, 13)?),
    ];
    for (name, pair) in &fixtures {
        let start = Instant::now();
        let est = coarse_to_fine_estimate(&pair.first, &pair.second, None, &solver, &PyramidConfig::default())?;
        let report = evaluate_aep(&est.flow, &pair.flow, None)?;
        println!(
            "{name:12} aep {:.4}  coupling {:.4}  {:.2?}",
            report.aep,
            est.worst_coupling_residual(),
            start.elapsed()
        );
    }
    Ok(())
}
