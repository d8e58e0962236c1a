//! Quadrature, contour winding and small linear-algebra helpers.

pub mod contour;
pub mod quad;

/// Four-point Lagrange interpolation on a uniform grid `x_k = x0 + k·h`.
///
/// Returns `None` outside the sampled range.
pub fn interp_uniform(x0: f64, h: f64, values: &[f64], x: f64) -> Option<f64> {
    let n = values.len();
    if n < 4 {
        return None;
    }
    let s = (x - x0) / h;
    if s < 0.0 || s > (n - 1) as f64 {
        return None;
    }
    let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = s - i as f64;
    let mut acc = 0.0;
    for j in 0..4 {
        let mut w = 1.0;
        for m in 0..4 {
            if m != j {
                w *= (t - m as f64) / (j as f64 - m as f64);
            }
        }
        acc += w * values[i + j];
    }
    Some(acc)
}
