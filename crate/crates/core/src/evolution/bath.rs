//! Discretization of the continuum oscillator bath.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::Medium;
use crate::numerics::quad::gauss_legendre_on;

/// Default number of bath lines per site.
pub const DEFAULT_LINES: usize = 400;

/// Documented fidelity of the default discretization: relative sup error of
/// the reconstructed kernel over half the recurrence time. It is dominated
/// by the spectral weight beyond the cutoff, `≈ (4/π)Σf_nγ_n/(ω_cut Σf_n)`,
/// which shows up as a slope defect at small `τ`.
pub const KERNEL_BOUND: f64 = 5e-3;

/// Cutoff `max ω_n + 40 max γ_n` of the quadrature interval.
pub fn default_cutoff(medium: &Medium) -> f64 {
    medium.max_omega() + 40.0 * medium.max_gamma()
}

/// User-facing bath settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    #[serde(default = "default_lines")]
    pub lines: usize,
    #[serde(default)]
    pub cutoff: Option<f64>,
}

fn default_lines() -> usize {
    DEFAULT_LINES
}

impl Default for BathConfig {
    fn default() -> Self {
        BathConfig { lines: DEFAULT_LINES, cutoff: None }
    }
}

/// Quadrature of the bath continuum: `∫dω (2σ(ω)/π) ↦ Σ w_i`, with
/// `σ(ω) = ω Im ε(ω)` and couplings `g_i = √(w_i·2σ(ω_i)/π)`, so that
/// `Σ g_i² sin(ω_i τ)/ω_i ≈ χ(τ)`.
///
/// Lossless resonances have a delta-function `σ`; each becomes one line at
/// `ω_n` with `g² = f_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BathDiscretization {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl BathDiscretization {
    pub fn empty() -> Self {
        BathDiscretization { nodes: vec![], weights: vec![], couplings: vec![] }
    }

    /// Gauss–Legendre nodes on `[0, cutoff]` for the lossy resonances plus
    /// one line per lossless resonance.
    pub fn for_medium(medium: &Medium, cfg: &BathConfig) -> Result<Self> {
        let mut out = BathDiscretization::empty();
        let lossy: Vec<_> = medium.resonances().iter().filter(|r| r.gamma > 0.0).copied().collect();
        if !lossy.is_empty() {
            if cfg.lines == 0 {
                return Err(Error::invalid("bath.lines", "a lossy medium needs at least one bath line"));
            }
            let cutoff = cfg.cutoff.unwrap_or_else(|| default_cutoff(medium));
            if !(cutoff.is_finite() && cutoff > 0.0) {
                return Err(Error::invalid("bath.cutoff", "must be finite and > 0"));
            }
            let lossy_medium = Medium::new("lossy part", lossy)?;
            let (x, w) = gauss_legendre_on(cfg.lines, 0.0, cutoff);
            for (&xi, &wi) in x.iter().zip(&w) {
                let sigma = xi * lossy_medium.epsilon(Complex64::new(xi, 0.0))?.im;
                out.nodes.push(xi);
                out.weights.push(wi);
                out.couplings.push((wi * 2.0 * sigma / std::f64::consts::PI).max(0.0).sqrt());
            }
        }
        for r in medium.resonances().iter().filter(|r| r.gamma == 0.0) {
            out.nodes.push(r.omega);
            out.weights.push(0.0);
            out.couplings.push(r.f.sqrt());
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Reconstructed kernel `Σ g_i² sin(ω_i τ)/ω_i` (zero for `τ ≤ 0`).
    pub fn kernel(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        self.nodes.iter().zip(&self.couplings).map(|(&w, &g)| g * g * (w * tau).sin() / w).sum()
    }

    /// `max_τ |χ_bath(τ) − χ(τ)|` over `n` samples of `[0, t_max]`,
    /// relative to `max |χ|` on the same grid.
    pub fn kernel_error(&self, medium: &Medium, t_max: f64, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for j in 0..=n {
            let t = t_max * j as f64 / n as f64;
            let exact = medium.chi_time(t);
            scale = scale.max(exact.abs());
            worst = worst.max((self.kernel(t) - exact).abs());
        }
        if scale == 0.0 {
            worst
        } else {
            worst / scale
        }
    }

    /// First time after the kernel has decayed at which the reconstructed
    /// kernel deviates from the exact one by more than `threshold·max|χ|`
    /// (a recurrence of the discrete, quasi-periodic bath). Scans up to
    /// `t_limit`; `None` if no recurrence is seen.
    pub fn recurrence_time(&self, medium: &Medium, threshold: f64, t_limit: f64) -> Option<f64> {
        let gamma = medium.min_gamma()?;
        let start = 5.0 / gamma;
        let step = 0.05 / default_cutoff(medium).max(1e-12);
        let peak = (0..2000).map(|j| medium.chi_time(j as f64 * start / 2000.0).abs()).fold(0.0, f64::max);
        let mut t = start.min(t_limit);
        while t < t_limit {
            if (self.kernel(t) - medium.chi_time(t)).abs() > threshold * peak {
                return Some(t);
            }
            t += step;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::LorentzResonance;

    #[test]
    fn lossless_resonance_is_one_line() {
        let m = Medium::lossless("h", vec![LorentzResonance::new(2.0, 1.5, 0.0)]).unwrap();
        let b = BathDiscretization::for_medium(&m, &BathConfig::default()).unwrap();
        assert_eq!(b.len(), 1);
        let t: f64 = 0.7;
        assert!((b.kernel(t) - m.chi_time(t)).abs() < 1e-15);
    }

    #[test]
    fn vacuum_has_no_bath() {
        assert!(BathDiscretization::for_medium(&Medium::vacuum(), &BathConfig::default()).unwrap().is_empty());
    }
}
