//! Weak-loss quasi modes: windowed commutator integrals, group-velocity
//! factors and Brillouin energy coefficients.
//!
//! In a weakly absorbing medium a polariton resonance is a narrow Lorentzian
//! in the spectral weight
//!
//! ```text
//! transverse:    (1/π) ω⁴ ε″(ω) / |ω_α² − ε(ω)ω²|²   ≈ (Ω/2) dΩ²/dω_α²
//! longitudinal:  (1/π) ε″(ω) / |ε(ω)|²               ≈ 1/|dε′/dω|
//! ```
//!
//! when integrated over a frequency window that contains exactly one
//! resonance and is much wider than its linewidth.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{longitudinal_roots, transverse_roots, PolaritonRoot};
use crate::error::{Error, Result};
use crate::medium::Medium;
use crate::numerics::quad::integrate;
use crate::tolerances::{
    QUADRATURE_REL, WINDOW_EDGE_MASS, WINDOW_EDGE_ZONE, WINDOW_WIDTH_IN_LINEWIDTHS, WINDOW_WIDTH_MIN_FRACTION,
};

/// Window weight as a function of position inside the window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum WindowShape {
    /// Indicator of the window.
    Hard,
    /// Flat top with raised-cosine edges occupying `taper` of each half-width.
    CosineTaper { taper: f64 },
}

/// Frequency window `[center − half_width, center + half_width]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyWindow {
    pub center: f64,
    pub half_width: f64,
    pub shape: WindowShape,
    /// Linewidth `|Im Ω|` of the enclosed resonance, used to place breakpoints.
    pub linewidth: f64,
}

impl FrequencyWindow {
    pub fn new(center: f64, half_width: f64, linewidth: f64) -> Result<Self> {
        if !(center > 0.0 && center.is_finite()) {
            return Err(Error::invalid("center", "must be finite and > 0"));
        }
        if !(half_width > 0.0 && half_width < center) {
            return Err(Error::invalid("half_width", "must be > 0 and below the center frequency"));
        }
        if !(linewidth >= 0.0 && linewidth.is_finite()) {
            return Err(Error::invalid("linewidth", "must be finite and ≥ 0"));
        }
        Ok(FrequencyWindow { center, half_width, shape: WindowShape::Hard, linewidth })
    }

    /// Default window around a root: full width
    /// `δ = max(1000|Im Ω|, 10⁻³ Re Ω)`.
    pub fn around(root: &PolaritonRoot) -> Result<Self> {
        let gamma = root.omega.im.abs();
        let width = (WINDOW_WIDTH_IN_LINEWIDTHS * gamma).max(WINDOW_WIDTH_MIN_FRACTION * root.omega.re);
        FrequencyWindow::new(root.omega.re, 0.5 * width, gamma)
    }

    pub fn with_shape(mut self, shape: WindowShape) -> Result<Self> {
        if let WindowShape::CosineTaper { taper } = shape {
            if !(taper > 0.0 && taper <= 1.0) {
                return Err(Error::invalid("taper", "must lie in (0, 1]"));
            }
        }
        self.shape = shape;
        Ok(self)
    }

    /// Same center and linewidth, width multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        FrequencyWindow::new(self.center, self.half_width * factor, self.linewidth)?.with_shape(self.shape)
    }

    pub fn lower(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.center + self.half_width
    }

    /// Window weight at frequency `w`.
    pub fn weight(&self, w: f64) -> f64 {
        let u = (w - self.center).abs() / self.half_width;
        if u > 1.0 {
            return 0.0;
        }
        match self.shape {
            WindowShape::Hard => 1.0,
            WindowShape::CosineTaper { taper } => {
                let start = 1.0 - taper;
                if u <= start {
                    1.0
                } else {
                    0.5 * (1.0 + (std::f64::consts::PI * (u - start) / taper).cos())
                }
            }
        }
    }

    /// Breakpoints clustered geometrically around the center so the adaptive
    /// quadrature resolves the Lorentzian peak from the first pass.
    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = vec![self.lower(), self.center, self.upper()];
        let edge = WINDOW_EDGE_ZONE * self.half_width;
        pts.push(self.lower() + edge);
        pts.push(self.upper() - edge);
        if self.linewidth > 0.0 {
            let mut d = self.linewidth;
            while d < self.half_width * (1.0 - WINDOW_EDGE_ZONE) {
                pts.push(self.center - d);
                pts.push(self.center + d);
                d *= 4.0;
            }
        }
        if let WindowShape::CosineTaper { taper } = self.shape {
            let s = (1.0 - taper) * self.half_width;
            pts.push(self.center - s);
            pts.push(self.center + s);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// Result of a windowed spectral integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowedIntegral {
    pub value: f64,
    pub error: f64,
    /// Fraction of the integral carried by the outer edge zones.
    pub edge_fraction: f64,
}

/// Windowed integral of a spectral density, without the edge-mass check.
pub fn windowed_integral<F: Fn(f64) -> Result<f64>>(density: F, window: &FrequencyWindow) -> Result<WindowedIntegral> {
    let mut failure = None;
    let mut eval = |w: f64| match density(w) {
        Ok(v) => v * window.weight(w),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let total = integrate(&mut eval, &window.breakpoints(), 0.0, QUADRATURE_REL, 20_000)?;
    let edge = WINDOW_EDGE_ZONE * window.half_width;
    let lo = integrate(&mut eval, &[window.lower(), window.lower() + edge], 0.0, 1e-6, 2000)?;
    let hi = integrate(&mut eval, &[window.upper() - edge, window.upper()], 0.0, 1e-6, 2000)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let edge_fraction = if total.value != 0.0 { (lo.value.abs() + hi.value.abs()) / total.value.abs() } else { 0.0 };
    Ok(WindowedIntegral { value: total.value, error: total.error, edge_fraction })
}

fn check_edges(r: WindowedIntegral) -> Result<WindowedIntegral> {
    if r.edge_fraction > WINDOW_EDGE_MASS {
        return Err(Error::WindowViolation { edge_fraction: r.edge_fraction });
    }
    Ok(r)
}

/// Transverse spectral density `(1/π) ω⁴ε″/|ω_α² − εω²|²`.
pub fn transverse_density(medium: &Medium, omega_alpha: f64, w: f64) -> Result<f64> {
    let eps = medium.epsilon(Complex64::new(w, 0.0))?;
    let den = Complex64::from(omega_alpha * omega_alpha) - eps * w * w;
    Ok(w.powi(4) * eps.im / (std::f64::consts::PI * den.norm_sqr()))
}

/// Longitudinal spectral density `(1/π) ε″/|ε|²`.
pub fn longitudinal_density(medium: &Medium, w: f64) -> Result<f64> {
    let eps = medium.epsilon(Complex64::new(w, 0.0))?;
    Ok(eps.im / (std::f64::consts::PI * eps.norm_sqr()))
}

/// Windowed transverse commutator integral; fails with a window violation
/// when more than 1% of the mass sits in the outer edge zones.
pub fn transverse_commutator_integral(
    medium: &Medium,
    omega_alpha: f64,
    window: &FrequencyWindow,
) -> Result<WindowedIntegral> {
    if !(omega_alpha > 0.0 && omega_alpha.is_finite()) {
        return Err(Error::invalid("omega_alpha", "must be finite and > 0"));
    }
    check_edges(windowed_integral(|w| transverse_density(medium, omega_alpha, w), window)?)
}

/// Windowed longitudinal commutator integral, with the same edge check.
pub fn longitudinal_commutator_integral(medium: &Medium, window: &FrequencyWindow) -> Result<WindowedIntegral> {
    check_edges(windowed_integral(|w| longitudinal_density(medium, w), window)?)
}

/// Group-velocity data at a real frequency `Ω′` (with `c = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroupVelocity {
    /// Photon frequency on the real dispersion curve, `ω_α = Ω′√ε′(Ω′)`.
    pub omega_alpha: f64,
    /// `dΩ²/dω_α²` by implicit differentiation of `ω_α² = ε′(Ω)Ω²`.
    pub factor: f64,
    /// Refractive index `√ε′`.
    pub n: f64,
    /// Group velocity `dΩ/dk` with `k = Ω n(Ω)`.
    pub v_g: f64,
    /// Brillouin coefficient `d(Ωε′)/dΩ + ω_α²/Ω²`.
    pub brillouin: f64,
    /// `|brillouin − 2n/v_g|`.
    pub identity_defect: f64,
}

/// Group-velocity factor and Brillouin coefficient at `Ω′`.
pub fn group_velocity_factor(medium: &Medium, omega: f64) -> Result<GroupVelocity> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega", "must be finite and > 0"));
    }
    let z = Complex64::new(omega, 0.0);
    let eps = medium.epsilon(z)?.re;
    let deps = medium.d_epsilon(z)?.re;
    if eps <= 0.0 {
        return Err(Error::invalid("omega", "lies in a stop band (ε′ ≤ 0)"));
    }
    let dwa2 = deps * omega * omega + 2.0 * eps * omega;
    let factor = 2.0 * omega / dwa2;
    let n = eps.sqrt();
    let dk = n + omega * deps / (2.0 * n);
    let v_g = 1.0 / dk;
    let brillouin = (eps + omega * deps) + eps;
    Ok(GroupVelocity {
        omega_alpha: omega * n,
        factor,
        n,
        v_g,
        brillouin,
        identity_defect: (brillouin - 2.0 * n / v_g).abs(),
    })
}

/// Transverse target `(Ω/2) dΩ²/dω_α²` at the real frequency `Ω′`.
pub fn transverse_target(medium: &Medium, omega: f64) -> Result<f64> {
    Ok(0.5 * omega * group_velocity_factor(medium, omega)?.factor)
}

/// Longitudinal target `1/|dε′/dω|` at `Ω′`.
pub fn longitudinal_target(medium: &Medium, omega: f64) -> Result<f64> {
    let m = medium.d_epsilon(Complex64::new(omega, 0.0))?.re;
    if m == 0.0 {
        return Err(Error::invalid("omega", "dε′/dω vanishes"));
    }
    Ok(1.0 / m.abs())
}

/// One row of a quasi-mode comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuasimodeRow {
    pub omega_alpha: f64,
    pub branch: usize,
    pub omega: Complex64,
    pub integral: f64,
    pub target: f64,
    pub rel_err: f64,
}

/// Windowed integral vs target for every transverse branch at `ω_α`, each
/// with its default window scaled by `width_factor`.
pub fn transverse_quasimodes(medium: &Medium, omega_alpha: f64, width_factor: f64) -> Result<Vec<QuasimodeRow>> {
    transverse_roots(medium, omega_alpha, None)?
        .iter()
        .map(|r| {
            let window = FrequencyWindow::around(r)?.scaled(width_factor)?;
            let integral = transverse_commutator_integral(medium, omega_alpha, &window)?.value;
            let target = transverse_target(medium, r.omega.re)?;
            Ok(QuasimodeRow {
                omega_alpha,
                branch: r.branch,
                omega: r.omega,
                integral,
                target,
                rel_err: (integral - target).abs() / target.abs(),
            })
        })
        .collect()
}

/// Windowed integral vs target for every longitudinal root.
pub fn longitudinal_quasimodes(medium: &Medium, width_factor: f64) -> Result<Vec<QuasimodeRow>> {
    longitudinal_roots(medium, None)?
        .iter()
        .map(|r| {
            let window = FrequencyWindow::around(r)?.scaled(width_factor)?;
            let integral = longitudinal_commutator_integral(medium, &window)?.value;
            let target = longitudinal_target(medium, r.omega.re)?;
            Ok(QuasimodeRow {
                omega_alpha: 0.0,
                branch: r.branch,
                omega: r.omega,
                integral,
                target,
                rel_err: (integral - target).abs() / target.abs(),
            })
        })
        .collect()
}

/// `Σ Ω_m |f_m|²` over `(Ω, |f|²)` pairs.
pub fn quasimode_energy(populations: &[(f64, f64)]) -> Result<f64> {
    let mut total = 0.0;
    for (i, &(omega, pop)) in populations.iter().enumerate() {
        if !(omega >= 0.0 && pop >= 0.0 && omega.is_finite() && pop.is_finite()) {
            return Err(Error::invalid(
                "populations",
                format!("entry {i}: frequency and population must be finite and ≥ 0"),
            ));
        }
        total += omega * pop;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_group_velocity() {
        let g = group_velocity_factor(&Medium::vacuum(), 1.7).unwrap();
        assert_eq!(g.factor, 1.0);
        assert_eq!(g.brillouin, 2.0);
        assert_eq!(g.v_g, 1.0);
    }

    #[test]
    fn energy_is_additive() {
        assert_eq!(quasimode_energy(&[]).unwrap(), 0.0);
        assert_eq!(quasimode_energy(&[(1.3, 1.0)]).unwrap(), 1.3);
        assert!(quasimode_energy(&[(1.0, -1.0)]).is_err());
    }

    #[test]
    fn taper_weight() {
        let w =
            FrequencyWindow::new(1.0, 0.1, 1e-4).unwrap().with_shape(WindowShape::CosineTaper { taper: 0.5 }).unwrap();
        assert_eq!(w.weight(1.0), 1.0);
        assert!((w.weight(1.075) - 0.5).abs() < 1e-12);
        assert_eq!(w.weight(1.2), 0.0);
    }
}
