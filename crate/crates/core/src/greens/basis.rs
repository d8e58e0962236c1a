//! Born–von-Karman plane-wave basis.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    T1,
    T2,
    Longitudinal,
}

/// One plane-wave mode `(k_α, j)`; its photon frequency is `ω_α = |k_α|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeIndex {
    pub k: Vector3<f64>,
    pub polarization: Polarization,
}

impl ModeIndex {
    pub fn omega_alpha(&self) -> f64 {
        self.k.norm()
    }

    /// `ε̂_{α,1}`, `ε̂_{α,2}` or `k̂_α`.
    pub fn unit_vector(&self) -> Vector3<f64> {
        let (e1, e2, kh) = polarization_vectors(&self.k);
        match self.polarization {
            Polarization::T1 => e1,
            Polarization::T2 => e2,
            Polarization::Longitudinal => kh,
        }
    }
}

/// Right-handed triad `(ε̂₁, ε̂₂, k̂)` with `ε̂₁ ∝ k × ẑ` (or `k × x̂` when
/// `k ∥ ẑ`) and `ε̂₂ = k̂ × ε̂₁`, so that `ε̂₁ × ε̂₂ = k̂`.
pub fn polarization_vectors(k: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let kh = k.normalize();
    let mut e1 = kh.cross(&Vector3::z());
    if e1.norm() < 1e-8 {
        e1 = kh.cross(&Vector3::x());
    }
    let e1 = e1.normalize();
    let e2 = kh.cross(&e1);
    (e1, e2, kh)
}

/// Periodic box `L_x × L_y × L_z` with every wavevector `k = 2π(n_x/L_x,
/// n_y/L_y, n_z/L_z)`, `0 < |k| ≤ k_max`. Mode functions are
/// `Φ_α(x) = e^{ik·x}/√V`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxModeBasis {
    lengths: [f64; 3],
    k_max: f64,
    wavevectors: Vec<Vector3<f64>>,
}

impl BoxModeBasis {
    pub fn new(lengths: [f64; 3], k_max: f64) -> Result<Self> {
        if !lengths.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Err(Error::invalid("basis.lengths", "box sides must be finite and > 0"));
        }
        if !(k_max.is_finite() && k_max > 0.0) {
            return Err(Error::invalid("basis.k_max", "cutoff must be finite and > 0"));
        }
        let tau = std::f64::consts::TAU;
        let nmax: Vec<i64> = lengths.iter().map(|l| (k_max * l / tau).floor() as i64).collect();
        let count: i64 = nmax.iter().map(|n| 2 * n + 1).product();
        if count > 50_000_000 {
            return Err(Error::invalid("basis.k_max", "cutoff produces too many modes"));
        }
        let mut wavevectors = Vec::new();
        for nx in -nmax[0]..=nmax[0] {
            for ny in -nmax[1]..=nmax[1] {
                for nz in -nmax[2]..=nmax[2] {
                    if nx == 0 && ny == 0 && nz == 0 {
                        continue;
                    }
                    let k = Vector3::new(
                        tau * nx as f64 / lengths[0],
                        tau * ny as f64 / lengths[1],
                        tau * nz as f64 / lengths[2],
                    );
                    if k.norm() <= k_max * (1.0 + 1e-12) {
                        wavevectors.push(k);
                    }
                }
            }
        }
        Ok(BoxModeBasis { lengths, k_max, wavevectors })
    }

    pub fn cubic(side: f64, k_max: f64) -> Result<Self> {
        Self::new([side; 3], k_max)
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn wavevectors(&self) -> &[Vector3<f64>] {
        &self.wavevectors
    }

    /// All modes, three per wavevector (two transverse, one longitudinal).
    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        self.wavevectors.iter().flat_map(|&k| {
            [Polarization::T1, Polarization::T2, Polarization::Longitudinal]
                .into_iter()
                .map(move |polarization| ModeIndex { k, polarization })
        })
    }

    /// `Φ_α(x) Φ_α*(x′) = e^{ik·(x − x′)}/V`.
    pub fn phi_phi(&self, k: &Vector3<f64>, x: &Vector3<f64>, xp: &Vector3<f64>) -> Complex64 {
        Complex64::from_polar(1.0 / self.volume(), k.dot(&(x - xp)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triad_is_right_handed_and_orthonormal() {
        for k in [Vector3::new(1.0, 2.0, -0.5), Vector3::new(0.0, 0.0, 3.0), Vector3::new(-1.0, 0.0, 0.0)] {
            let (e1, e2, kh) = polarization_vectors(&k);
            assert!(e1.dot(&e2).abs() < 1e-15 && e1.dot(&kh).abs() < 1e-15 && e2.dot(&kh).abs() < 1e-15);
            assert!((e1.cross(&e2) - kh).norm() < 1e-15);
        }
    }

    #[test]
    fn basis_is_inversion_symmetric() {
        let b = BoxModeBasis::cubic(5.0, 4.0).unwrap();
        for k in b.wavevectors() {
            assert!(b.wavevectors().iter().any(|q| (q + k).norm() < 1e-12));
            assert!(k.norm() <= 4.0 + 1e-9);
        }
    }
}
