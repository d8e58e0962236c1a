//! Depolarization dyads `L = ∮ n̂ ⊗ R̂ /(4πR²) dS` of exclusion volumes
//! surrounding the source point.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exclusion volume used to define the principal value at `x = x′`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ExclusionShape {
    /// Sphere centered on the source (any radius gives the same `L`).
    Sphere,
    /// Axis-aligned box with the given half extents; the source sits at
    /// `offset` from the box center and must be strictly inside.
    Box { half: [f64; 3], offset: [f64; 3] },
}

impl ExclusionShape {
    pub fn cube() -> Self {
        ExclusionShape::Box { half: [0.5; 3], offset: [0.0; 3] }
    }

    /// Thin square slab `width × width × thickness`, normal along `ẑ`.
    pub fn slab(thickness: f64, width: f64) -> Self {
        ExclusionShape::Box { half: [0.5 * width, 0.5 * width, 0.5 * thickness], offset: [0.0; 3] }
    }
}

/// 26-point Lebedev rule on the unit sphere (exact through degree 7);
/// weights sum to one.
pub fn lebedev26() -> Vec<(Vector3<f64>, f64)> {
    let mut pts = Vec::with_capacity(26);
    for a in 0..3 {
        for s in [-1.0, 1.0] {
            let mut v = Vector3::zeros();
            v[a] = s;
            pts.push((v, 1.0 / 21.0));
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        for sb in [-1.0, 1.0] {
            for sc in [-1.0, 1.0] {
                let mut v = Vector3::zeros();
                v[b] = sb * h;
                v[c] = sc * h;
                pts.push((v, 4.0 / 105.0));
            }
        }
    }
    let t = 1.0 / 3f64.sqrt();
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                pts.push((Vector3::new(sx * t, sy * t, sz * t), 9.0 / 280.0));
            }
        }
    }
    pts
}

/// `L` for the given exclusion shape.
pub fn depolarization_dyad(shape: &ExclusionShape) -> Result<Matrix3<f64>> {
    match *shape {
        ExclusionShape::Sphere => {
            // n̂ = R̂ and R² dΩ cancels 1/R²: L = (1/4π)∮ R̂R̂ dΩ.
            Ok(lebedev26().iter().fold(Matrix3::zeros(), |acc, (v, w)| acc + v * v.transpose() * *w))
        }
        ExclusionShape::Box { half, offset } => {
            for a in 0..3 {
                if !(half[a] > 0.0 && half[a].is_finite()) {
                    return Err(Error::invalid("half", "box half extents must be finite and > 0"));
                }
                if !(offset[a].abs() < half[a]) {
                    return Err(Error::invalid("offset", "source must lie strictly inside the box"));
                }
            }
            let mut l = Matrix3::zeros();
            for a in 0..3 {
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                // Face rectangle in the (b, c) coordinates relative to the source.
                let (u1, u2) = (-half[b] - offset[b], half[b] - offset[b]);
                let (v1, v2) = (-half[c] - offset[c], half[c] - offset[c]);
                for s in [-1.0, 1.0] {
                    let h = s * half[a] - offset[a]; // signed normal distance
                    let n = s; // outward normal along axis a
                    let hh = h.abs();
                    // ∫∫ R_vec/(4πR³) dS over the face, R_vec = (h, u, v).
                    let normal = s * solid_angle(hh, u1, u2, v1, v2) / (4.0 * std::f64::consts::PI);
                    let tb = tangential(hh, u1, u2, v1, v2) / (4.0 * std::f64::consts::PI);
                    let tc = tangential(hh, v1, v2, u1, u2) / (4.0 * std::f64::consts::PI);
                    l[(a, a)] += n * normal;
                    l[(a, b)] += n * tb;
                    l[(a, c)] += n * tc;
                }
            }
            Ok(l)
        }
    }
}

/// Solid angle of the rectangle `[u1,u2]×[v1,v2]` seen from height `h > 0`.
fn solid_angle(h: f64, u1: f64, u2: f64, v1: f64, v2: f64) -> f64 {
    let f = |u: f64, v: f64| (u * v / (h * (u * u + v * v + h * h).sqrt())).atan();
    f(u2, v2) - f(u1, v2) - f(u2, v1) + f(u1, v1)
}

/// `∫∫ u/(u² + v² + h²)^{3/2} du dv` over the rectangle.
fn tangential(h: f64, u1: f64, u2: f64, v1: f64, v2: f64) -> f64 {
    let f = |v: f64| (v / (u1 * u1 + h * h).sqrt()).asinh() - (v / (u2 * u2 + h * h).sqrt()).asinh();
    f(v2) - f(v1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lebedev_weights_sum_to_one() {
        let s: f64 = lebedev26().iter().map(|(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lebedev_integrates_degree_six() {
        // ⟨x⁶⟩ over the sphere = 1/7.
        let s: f64 = lebedev26().iter().map(|(v, w)| w * v.x.powi(6)).sum();
        assert!((s - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn cube_is_isotropic() {
        let l = depolarization_dyad(&ExclusionShape::cube()).unwrap();
        assert!((l - Matrix3::identity() / 3.0).norm() < 1e-14);
    }
}
