//! Winding numbers of analytic functions around axis-aligned rectangles.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::CONTOUR_MIN_SEGMENT;

/// Closed axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_max > re_min) || !(im_max > im_min) || ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("search", "rectangle must have finite, positive extent"));
        }
        Ok(Rect { re_min, re_max, im_min, im_max })
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn diagonal(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    /// Strict containment.
    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }

    /// Containment after enlarging every side by `margin`.
    pub fn contains_with_margin(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.re_min - margin
            && z.re <= self.re_max + margin
            && z.im >= self.im_min - margin
            && z.im <= self.im_max + margin
    }

    /// Four children obtained by cutting at the fractional positions
    /// `(sx, sy)` of the width and height.
    pub fn split(&self, sx: f64, sy: f64) -> [Rect; 4] {
        let xm = self.re_min + sx * (self.re_max - self.re_min);
        let ym = self.im_min + sy * (self.im_max - self.im_min);
        [
            Rect { re_min: self.re_min, re_max: xm, im_min: self.im_min, im_max: ym },
            Rect { re_min: xm, re_max: self.re_max, im_min: self.im_min, im_max: ym },
            Rect { re_min: self.re_min, re_max: xm, im_min: ym, im_max: self.im_max },
            Rect { re_min: xm, re_max: self.re_max, im_min: ym, im_max: self.im_max },
        ]
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

const INITIAL_SEGMENTS: usize = 48;
const MAX_STEP: f64 = std::f64::consts::FRAC_PI_4;

/// Winding number of `f` around the counter-clockwise boundary of `rect`,
/// i.e. (zeros − poles) inside. `f` returns `None` where it cannot be
/// evaluated (a pole hit), which is reported as [`Error::ContourTooClose`].
pub fn winding_number<F: Fn(Complex64) -> Option<Complex64>>(f: &F, rect: &Rect) -> Result<i64> {
    let min_len = CONTOUR_MIN_SEGMENT * rect.diagonal().max(1e-300);
    let corners = rect.corners();
    let mut total = 0.0;
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let mut za = a;
        let mut fa = eval(f, za)?;
        for k in 1..=INITIAL_SEGMENTS {
            let zb = a + (b - a) * (k as f64 / INITIAL_SEGMENTS as f64);
            let fb = eval(f, zb)?;
            total += arg_increment(f, za, fa, zb, fb, min_len)?;
            za = zb;
            fa = fb;
        }
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(Error::ContourTooClose { near: rect.center() });
    }
    Ok(rounded as i64)
}

fn eval<F: Fn(Complex64) -> Option<Complex64>>(f: &F, z: Complex64) -> Result<Complex64> {
    match f(z) {
        Some(v) if v.is_finite() && v != Complex64::new(0.0, 0.0) => Ok(v),
        _ => Err(Error::ContourTooClose { near: z }),
    }
}

fn arg_increment<F: Fn(Complex64) -> Option<Complex64>>(
    f: &F,
    za: Complex64,
    fa: Complex64,
    zb: Complex64,
    fb: Complex64,
    min_len: f64,
) -> Result<f64> {
    // Explicit stack instead of recursion; segments are processed left to right.
    let mut total = 0.0;
    let mut stack = vec![(za, fa, zb, fb)];
    while let Some((a, fa, b, fb)) = stack.pop() {
        let whole = (fb / fa).arg();
        let m = 0.5 * (a + b);
        let fm = eval(f, m)?;
        let d1 = (fm / fa).arg();
        let d2 = (fb / fm).arg();
        let consistent = (d1 + d2 - whole).abs() < 1e-9;
        if consistent && d1.abs() < MAX_STEP && d2.abs() < MAX_STEP {
            total += d1 + d2;
            continue;
        }
        if (b - a).norm() < min_len {
            return Err(Error::ContourTooClose { near: m });
        }
        stack.push((m, fm, b, fb));
        stack.push((a, fa, m, fm));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_polynomial_zeros_and_poles() {
        let rect = Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap();
        let f = |z: Complex64| Some((z - 1.0) * (z + Complex64::new(0.0, 1.5)) * (z - 3.0));
        assert_eq!(winding_number(&f, &rect).unwrap(), 2);
        let g = |z: Complex64| Some((z - 0.5) / ((z - Complex64::new(0.1, 0.2)) * (z + 1.0)));
        assert_eq!(winding_number(&g, &rect).unwrap(), -1);
    }

    #[test]
    fn zero_on_the_boundary_is_reported() {
        let rect = Rect::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let f = |z: Complex64| Some(z - Complex64::new(0.5, 0.0));
        assert!(matches!(winding_number(&f, &rect), Err(Error::ContourTooClose { .. })));
    }
}
