//! Middlebury-style flow visualization.

use image::RgbImage;

use crate::grid::FlowField;
use crate::scalar::Scalar;

/// 55-bin colour wheel: red→yellow (15), yellow→green (6), green→cyan (4),
/// cyan→blue (11), blue→magenta (13), magenta→red (6).
#[rustfmt::skip]
pub const COLOR_WHEEL: [[u8; 3]; 55] = [
    [255, 0, 0], [255, 17, 0], [255, 34, 0], [255, 51, 0], [255, 68, 0],
    [255, 85, 0], [255, 102, 0], [255, 119, 0], [255, 136, 0], [255, 153, 0],
    [255, 170, 0], [255, 187, 0], [255, 204, 0], [255, 221, 0], [255, 238, 0],
    [255, 255, 0], [213, 255, 0], [170, 255, 0], [128, 255, 0], [85, 255, 0],
    [43, 255, 0], [0, 255, 0], [0, 255, 63], [0, 255, 127], [0, 255, 191],
    [0, 255, 255], [0, 232, 255], [0, 209, 255], [0, 186, 255], [0, 163, 255],
    [0, 140, 255], [0, 116, 255], [0, 93, 255], [0, 70, 255], [0, 47, 255],
    [0, 24, 255], [0, 0, 255], [19, 0, 255], [39, 0, 255], [58, 0, 255],
    [78, 0, 255], [98, 0, 255], [117, 0, 255], [137, 0, 255], [156, 0, 255],
    [176, 0, 255], [196, 0, 255], [215, 0, 255], [235, 0, 255], [255, 0, 255],
    [255, 0, 213], [255, 0, 170], [255, 0, 128], [255, 0, 85], [255, 0, 43],
];

fn percentile_99(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let idx = ((values.len() - 1) as f64 * 0.99).round() as usize;
    values[idx]
}

fn wheel_color(u: f64, v: f64) -> [u8; 3] {
    let rad = u.hypot(v);
    let n = COLOR_WHEEL.len();
    let angle = (-v).atan2(-u) / std::f64::consts::PI;
    let fk = (angle + 1.0) / 2.0 * (n - 1) as f64;
    let k0 = (fk.floor() as usize).min(n - 1);
    let k1 = (k0 + 1) % n;
    let f = fk - k0 as f64;
    let mut rgb = [0u8; 3];
    for (c, out) in rgb.iter_mut().enumerate() {
        let col0 = COLOR_WHEEL[k0][c] as f64 / 255.0;
        let col1 = COLOR_WHEEL[k1][c] as f64 / 255.0;
        let col = (1.0 - f) * col0 + f * col1;
        let col = if rad <= 1.0 {
            1.0 - rad * (1.0 - col)
        } else {
            col * 0.75
        };
        *out = (255.0 * col) as u8;
    }
    rgb
}

/// Hue encodes direction and saturation encodes `‖w‖ / max_magnitude`
/// (99th percentile of the magnitudes when `None`). Zero flow is white.
pub fn colorize_flow<T: Scalar>(field: &FlowField<T>, max_magnitude: Option<T>) -> RgbImage {
    let (w, h) = field.shape();
    let max = max_magnitude.map(Scalar::as_f64).unwrap_or_else(|| {
        percentile_99(
            (0..field.len())
                .map(|i| {
                    let [u, v] = field.at(i);
                    u.as_f64().hypot(v.as_f64())
                })
                .collect(),
        )
    });
    let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
    RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let [u, v] = field.get(x as usize, y as usize);
        image::Rgb(wheel_color(u.as_f64() * scale, v.as_f64() * scale))
    })
}
