use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use pwflow::{DirectionSet, PyramidConfig, RegularizerMode, SolverConfig};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "pwflow", version, about = "Piecewise-affine optical flow")]
pub struct Cli {
    /// Raise log verbosity (-v debug, -vv trace). Logs go to stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Estimate flow from FRAME1 to FRAME2 and write it as .flo.
    Estimate(EstimateArgs),
    /// Print the endpoint error of an estimate against ground truth.
    Evaluate(EvaluateArgs),
    /// Render a flow field with the Middlebury colour wheel.
    Colorize(ColorizeArgs),
    /// Write the motion-edge mask of a flow field.
    Edges(EdgesArgs),
    /// Fit a piecewise-affine (or TV) model to the columns of a CSV file.
    Denoise1d(DenoiseArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    pub frame1: PathBuf,
    pub frame2: PathBuf,
    /// Output .flo path.
    #[arg(long, short, default_value = "flow.flo")]
    pub out: PathBuf,
    /// Sparse matches, one `x1 y1 x2 y2 [score]` per line.
    #[arg(long)]
    pub matches: Option<PathBuf>,
    /// key=value file with parameter defaults; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamFlags,
}

/// Overrides for every solver and pyramid parameter.
#[derive(Debug, Args, Default)]
pub struct ParamFlags {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub eta0: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Ratio of the match penalty to the main penalty.
    #[arg(long)]
    pub eta2_ratio: Option<f64>,
    /// Coupling tolerance in pixels.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// affine-l0 or tv.
    #[arg(long)]
    pub mode: Option<RegularizerMode>,
    /// 2 (axial) or 4 (axial and diagonal).
    #[arg(long)]
    pub directions: Option<usize>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub min_size: Option<usize>,
    #[arg(long)]
    pub warps: Option<usize>,
    #[arg(long)]
    pub prefilter_variance: Option<f64>,
    /// Odd window side; 1 disables the median.
    #[arg(long)]
    pub median_window: Option<usize>,
    #[arg(long)]
    pub median_sigma: Option<f64>,
    /// Also median-filter the final estimate.
    #[arg(long)]
    pub median_on_output: Option<bool>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Estimated flow (.flo or KITTI .png).
    pub estimate: PathBuf,
    /// Ground truth (.flo or KITTI .png; invalid KITTI pixels are skipped).
    pub truth: PathBuf,
    /// Occlusion mask PNG; nonzero pixels are excluded.
    #[arg(long)]
    pub mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ColorizeArgs {
    pub flow: PathBuf,
    pub out: PathBuf,
    /// Magnitude mapped to full saturation (default: 99th percentile).
    #[arg(long)]
    pub max_magnitude: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EdgesArgs {
    pub flow: PathBuf,
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    /// Numeric CSV, one column per channel.
    pub input: PathBuf,
    /// Jump penalty (affine-l0) or twice the TV weight (tv).
    pub kappa: f64,
    /// Fitted CSV; standard output when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = RegularizerMode::AffineL0)]
    pub mode: RegularizerMode,
    /// Skip the first row.
    #[arg(long)]
    pub header: bool,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value {value:?} for {key}")))
}

impl ParamFlags {
    /// Reads `key = value` lines; keys are the long flag names.
    pub fn from_config_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input {
            path: path.to_path_buf(),
            source: e.into(),
        })?;
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
            entries.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        let mut flags = Self::default();
        for (k, v) in &entries {
            match k.as_str() {
                "lambda" => flags.lambda = Some(parse(k, v)?),
                "gamma" => flags.gamma = Some(parse(k, v)?),
                "eta0" => flags.eta0 = Some(parse(k, v)?),
                "tau" => flags.tau = Some(parse(k, v)?),
                "eta2-ratio" => flags.eta2_ratio = Some(parse(k, v)?),
                "tol" => flags.tol = Some(parse(k, v)?),
                "max-iters" => flags.max_iters = Some(parse(k, v)?),
                "mode" => flags.mode = Some(parse(k, v)?),
                "directions" => flags.directions = Some(parse(k, v)?),
                "scale" => flags.scale = Some(parse(k, v)?),
                "min-size" => flags.min_size = Some(parse(k, v)?),
                "warps" => flags.warps = Some(parse(k, v)?),
                "prefilter-variance" => flags.prefilter_variance = Some(parse(k, v)?),
                "median-window" => flags.median_window = Some(parse(k, v)?),
                "median-sigma" => flags.median_sigma = Some(parse(k, v)?),
                "median-on-output" => flags.median_on_output = Some(parse(k, v)?),
                _ => return Err(CliError::Usage(format!("{}: unknown key {k:?}", path.display()))),
            }
        }
        Ok(flags)
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Self) -> Self {
        Self {
            lambda: self.lambda.or(base.lambda),
            gamma: self.gamma.or(base.gamma),
            eta0: self.eta0.or(base.eta0),
            tau: self.tau.or(base.tau),
            eta2_ratio: self.eta2_ratio.or(base.eta2_ratio),
            tol: self.tol.or(base.tol),
            max_iters: self.max_iters.or(base.max_iters),
            mode: self.mode.or(base.mode),
            directions: self.directions.or(base.directions),
            scale: self.scale.or(base.scale),
            min_size: self.min_size.or(base.min_size),
            warps: self.warps.or(base.warps),
            prefilter_variance: self.prefilter_variance.or(base.prefilter_variance),
            median_window: self.median_window.or(base.median_window),
            median_sigma: self.median_sigma.or(base.median_sigma),
            median_on_output: self.median_on_output.or(base.median_on_output),
        }
    }

    pub fn configs(&self) -> Result<(SolverConfig<f64>, PyramidConfig<f64>), CliError> {
        let mut solver = SolverConfig::default();
        let mut pyramid = PyramidConfig::default();
        macro_rules! set {
            ($cfg:ident . $field:ident = $flag:ident) => {
                if let Some(v) = self.$flag {
                    $cfg.$field = v;
                }
            };
        }
        set!(solver.lambda = lambda);
        set!(solver.gamma = gamma);
        set!(solver.eta0 = eta0);
        set!(solver.tau = tau);
        set!(solver.eta2_ratio = eta2_ratio);
        set!(solver.tolerance = tol);
        set!(solver.max_iters = max_iters);
        set!(solver.mode = mode);
        set!(pyramid.scale = scale);
        set!(pyramid.min_size = min_size);
        set!(pyramid.warps = warps);
        set!(pyramid.prefilter_variance = prefilter_variance);
        set!(pyramid.median_window = median_window);
        set!(pyramid.median_sigma = median_sigma);
        set!(pyramid.median_on_output = median_on_output);
        solver.directions = match self.directions {
            None | Some(4) => DirectionSet::four(),
            Some(2) => DirectionSet::axial(),
            Some(n) => return Err(CliError::Usage(format!("--directions must be 2 or 4, got {n}"))),
        };
        solver.validate()?;
        pyramid.validate()?;
        Ok((solver, pyramid))
    }
}
