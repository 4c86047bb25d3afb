//! File formats, evaluation metrics and visualizations.

mod color;
mod flo;
mod images;
mod kitti;
mod matches;
mod metrics;

pub use color::{colorize_flow, COLOR_WHEEL};
pub use flo::{decode_flo, encode_flo, read_flo, write_flo, FLO_MAGIC};
pub use images::{read_gray_image, read_mask, write_gray_image, write_mask, write_rgb_image};
pub use kitti::{read_kitti_flow_png, write_kitti_flow_png};
pub use matches::{parse_matches, read_matches, MatchIngest};
pub use metrics::{evaluate_aep, motion_edges, EvaluationReport, MaskProvenance};
