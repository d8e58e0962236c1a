//! Real (standing-wave) field mode bases.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::{polarization_vectors, BoxModeBasis};

/// Spatial profile of one real mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeShape {
    /// `√(2/V) cos(k·x)`.
    Cos(Vector3<f64>),
    /// `√(2/V) sin(k·x)`.
    Sin(Vector3<f64>),
    /// `√(2/L) sin(k x)` on `[0, L]` (perfectly conducting walls), unit cross-section.
    Line { k: f64, length: f64 },
    /// A mode without spatial structure, usable with homogeneous media only.
    Abstract,
}

/// One real, orthonormal, transverse field mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealMode {
    pub omega: f64,
    pub polarization: Vector3<f64>,
    pub shape: ModeShape,
}

/// Which transverse polarizations of a periodic box to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationFilter {
    #[default]
    Both,
    First,
    Second,
}

/// An ordered list of real modes. Mode functions are orthonormal over the
/// quantization volume.
#[derive(Clone, Debug, PartialEq)]
pub struct RealModeBasis {
    modes: Vec<RealMode>,
    volume: f64,
}

impl RealModeBasis {
    /// Structureless modes at the given photon frequencies.
    pub fn from_frequencies(omegas: &[f64]) -> Result<Self> {
        if omegas.is_empty() || !omegas.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(Error::invalid("basis.frequencies", "need at least one finite frequency > 0"));
        }
        let modes = omegas
            .iter()
            .map(|&omega| RealMode { omega, polarization: Vector3::y(), shape: ModeShape::Abstract })
            .collect();
        Ok(RealModeBasis { modes, volume: 1.0 })
    }

    /// Standing waves `√(2/L) sin(nπx/L)`, `n = 1..=n_modes`, polarized along `ŷ`.
    pub fn line(length: f64, n_modes: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid("basis.length", "must be finite and > 0"));
        }
        if n_modes == 0 {
            return Err(Error::invalid("basis.modes", "need at least one mode"));
        }
        let modes = (1..=n_modes)
            .map(|n| {
                let k = n as f64 * std::f64::consts::PI / length;
                RealMode { omega: k, polarization: Vector3::y(), shape: ModeShape::Line { k, length } }
            })
            .collect();
        Ok(RealModeBasis { modes, volume: length })
    }

    /// Real combinations `√2 cos(k·x)`, `√2 sin(k·x)` of the periodic plane
    /// waves, one pair per `±k`, with the selected transverse polarizations.
    pub fn from_box(basis: &BoxModeBasis, filter: PolarizationFilter) -> Result<Self> {
        let mut modes = Vec::new();
        for k in basis.wavevectors() {
            // keep one representative of each ±k pair
            let key = [k.x, k.y, k.z].iter().copied().find(|c| c.abs() > 1e-12).unwrap_or(0.0);
            if key < 0.0 {
                continue;
            }
            let (e1, e2, _) = polarization_vectors(k);
            let pols: &[Vector3<f64>] = match filter {
                PolarizationFilter::Both => &[e1, e2],
                PolarizationFilter::First => &[e1],
                PolarizationFilter::Second => &[e2],
            };
            for &e in pols {
                for shape in [ModeShape::Cos(*k), ModeShape::Sin(*k)] {
                    modes.push(RealMode { omega: k.norm(), polarization: e, shape });
                }
            }
        }
        if modes.is_empty() {
            return Err(Error::invalid("basis.k_max", "no modes below the cutoff"));
        }
        Ok(RealModeBasis { modes, volume: basis.volume() })
    }

    pub fn modes(&self) -> &[RealMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn is_line(&self) -> bool {
        matches!(self.modes.first().map(|m| m.shape), Some(ModeShape::Line { .. }))
    }

    pub fn is_abstract(&self) -> bool {
        matches!(self.modes.first().map(|m| m.shape), Some(ModeShape::Abstract))
    }

    /// Scalar profile of mode `m` at `x` (multiply by the polarization).
    pub fn profile(&self, m: usize, x: &Vector3<f64>) -> f64 {
        let norm = (2.0 / self.volume).sqrt();
        match self.modes[m].shape {
            ModeShape::Cos(k) => norm * k.dot(x).cos(),
            ModeShape::Sin(k) => norm * k.dot(x).sin(),
            ModeShape::Line { k, length } => (2.0 / length).sqrt() * (k * x.x).sin(),
            ModeShape::Abstract => 0.0,
        }
    }

    /// `∫_cell profile` over the axis-aligned cell `[lo, hi]` (for line
    /// bases only the `x` extent matters).
    pub fn cell_integral(&self, m: usize, lo: &Vector3<f64>, hi: &Vector3<f64>) -> f64 {
        // ∫_a^b e^{ik x} dx
        let factor = |k: f64, a: f64, b: f64| -> num_complex::Complex64 {
            if k.abs() < 1e-14 {
                num_complex::Complex64::new(b - a, 0.0)
            } else {
                let i = num_complex::Complex64::i();
                ((i * k * b).exp() - (i * k * a).exp()) / (i * k)
            }
        };
        let norm = (2.0 / self.volume).sqrt();
        match self.modes[m].shape {
            ModeShape::Cos(k) | ModeShape::Sin(k) => {
                let z = factor(k.x, lo.x, hi.x) * factor(k.y, lo.y, hi.y) * factor(k.z, lo.z, hi.z);
                match self.modes[m].shape {
                    ModeShape::Cos(_) => norm * z.re,
                    _ => norm * z.im,
                }
            }
            ModeShape::Line { k, length } => (2.0 / length).sqrt() * ((k * lo.x).cos() - (k * hi.x).cos()) / k,
            ModeShape::Abstract => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_cell_integrals_are_complete() {
        // Σ_n (∫_cell v_n)² → cell length as the basis grows. The missing
        // tail Σ_{n>N} (2/L)(cos ka − cos kb)²/k² averages to 2L/(π²N).
        let (length, cell) = (4.0, 0.5);
        let (lo, hi) = (Vector3::new(1.0, 0.0, 0.0), Vector3::new(1.5, 0.0, 0.0));
        for n in [1000, 4000] {
            let b = RealModeBasis::line(length, n).unwrap();
            let s: f64 = (0..b.len()).map(|m| b.cell_integral(m, &lo, &hi).powi(2)).sum();
            let tail = 2.0 * length / (std::f64::consts::PI.powi(2) * n as f64);
            assert!(s < cell, "{s}");
            assert!(((cell - s) / tail - 1.0).abs() < 0.05, "n = {n}: deficit {} vs tail {tail}", cell - s);
        }
    }

    #[test]
    fn box_modes_pair_up() {
        let bx = BoxModeBasis::cubic(6.0, 2.2).unwrap();
        let b = RealModeBasis::from_box(&bx, PolarizationFilter::Both).unwrap();
        assert_eq!(b.len(), 2 * bx.wavevectors().len());
    }
}
