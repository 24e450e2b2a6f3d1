use spectromap::Grid;

// viridis sampled at 9 evenly spaced stops
const STOPS: [[f64; 3]; 9] = [
    [68.0, 1.0, 84.0],
    [71.0, 44.0, 122.0],
    [59.0, 81.0, 139.0],
    [44.0, 113.0, 142.0],
    [33.0, 144.0, 141.0],
    [39.0, 173.0, 129.0],
    [92.0, 200.0, 99.0],
    [170.0, 220.0, 50.0],
    [253.0, 231.0, 37.0],
];

/// Viridis color for `t` in [0, 1]; out-of-range values are clamped.
pub fn viridis(t: f64) -> [u8; 3] {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let x = t * (STOPS.len() - 1) as f64;
    let i = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - i as f64;
    let mut rgb = [0u8; 3];
    for (k, c) in rgb.iter_mut().enumerate() {
        *c = (STOPS[i][k] + f * (STOPS[i + 1][k] - STOPS[i][k])).round() as u8;
    }
    rgb
}

/// RGBA image of a grid of values in [0, 1], row 0 at the bottom.
pub fn heatmap_rgba(grid: &Grid<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(grid.rows() * grid.cols() * 4);
    for r in (0..grid.rows()).rev() {
        for &v in grid.row(r) {
            let [red, green, blue] = viridis(v);
            out.extend_from_slice(&[red, green, blue, 255]);
        }
    }
    out
}
