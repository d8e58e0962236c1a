//! Modal propagators `H_α`, `U_α`: residue expansions over polariton roots,
//! an independent Bromwich (damped FFT) inversion, the two sum rules and the
//! scalar Green function.
//!
//! With `Ĥ(ω) = 1/(ω_α² − ε(ω)ω²)` and `Û(ω) = ε(ω)Ĥ(ω)`, closing the
//! inversion contour in the lower half plane gives
//!
//! ```text
//! H(τ) = Σ_m Re[ i e^{−iΩ_m τ} / (ω_α D_m) ]
//! U(τ) = Σ_m Re[ i ε(Ω_m) e^{−iΩ_m τ} / (ω_α D_m) ],   ε(Ω_m) = ω_α²/Ω_m²
//! ```
//!
//! for `τ > 0`, where the sum runs over the representative roots and the
//! real part accounts for the mirror roots `−Ω*`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dispersion::{Family, PolaritonRoot};
use crate::error::{Error, Result};
use crate::medium::Medium;
use crate::numerics::interp_uniform;
use crate::tolerances::SUM_RULE;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `Σ_m Im[1/D_m]/ω_α`; vanishes for a complete root set.
pub fn sum_rule_im(roots: &[PolaritonRoot], omega_alpha: f64) -> f64 {
    transverse(roots).map(|r| r.d.inv().im).sum::<f64>() / omega_alpha
}

/// `Σ_m Re[ε(Ω_m)Ω_m/D_m]/ω_α`; equals one for a complete root set.
pub fn sum_rule_re(roots: &[PolaritonRoot], omega_alpha: f64) -> f64 {
    transverse(roots).map(|r| (eps_at_root(r, omega_alpha) * r.omega / r.d).re).sum::<f64>() / omega_alpha
}

fn transverse(roots: &[PolaritonRoot]) -> impl Iterator<Item = &PolaritonRoot> {
    roots.iter().filter(|r| r.family == Family::Transverse)
}

/// At a transverse root `ε(Ω)Ω² = ω_α²` exactly.
fn eps_at_root(r: &PolaritonRoot, omega_alpha: f64) -> Complex64 {
    omega_alpha * omega_alpha / (r.omega * r.omega)
}

/// A root set that passed both sum rules, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct ResidueExpansion {
    omega_alpha: f64,
    /// `(Ω_m, i/(ω_α D_m), ε(Ω_m))`
    terms: Vec<(Complex64, Complex64, Complex64)>,
    im_sum: f64,
    re_sum: f64,
}

impl ResidueExpansion {
    /// Validates the sum rules at the default tolerance.
    pub fn new(roots: &[PolaritonRoot], omega_alpha: f64) -> Result<Self> {
        Self::with_tolerance(roots, omega_alpha, SUM_RULE)
    }

    pub fn with_tolerance(roots: &[PolaritonRoot], omega_alpha: f64, tol: f64) -> Result<Self> {
        let e = Self::unchecked(roots, omega_alpha)?;
        if !(e.im_sum.abs() < tol && (e.re_sum - 1.0).abs() < tol) {
            return Err(Error::IncompleteRootSet { im_sum: e.im_sum, re_defect: e.re_sum - 1.0 });
        }
        Ok(e)
    }

    /// Builds the expansion without the completeness gate (diagnostics only).
    pub fn unchecked(roots: &[PolaritonRoot], omega_alpha: f64) -> Result<Self> {
        if !(omega_alpha > 0.0 && omega_alpha.is_finite()) {
            return Err(Error::invalid("omega_alpha", "must be finite and > 0"));
        }
        let terms =
            transverse(roots).map(|r| (r.omega, I / (omega_alpha * r.d), eps_at_root(r, omega_alpha))).collect();
        Ok(ResidueExpansion {
            omega_alpha,
            terms,
            im_sum: sum_rule_im(roots, omega_alpha),
            re_sum: sum_rule_re(roots, omega_alpha),
        })
    }

    pub fn omega_alpha(&self) -> f64 {
        self.omega_alpha
    }

    pub fn sum_rules(&self) -> (f64, f64) {
        (self.im_sum, self.re_sum)
    }

    /// `(Ω_m, i/(ω_α D_m))` for each representative root.
    pub fn poles(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.terms.iter().map(|&(o, a, _)| (o, a))
    }

    /// `(Ω_m, iε(Ω_m)/(ω_α D_m))` for each representative root.
    pub fn u_poles(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.terms.iter().map(|&(o, a, e)| (o, a * e))
    }

    fn eval(&self, tau: f64, weight_eps: bool, derivative: u32) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        self.terms
            .iter()
            .map(|&(o, a, e)| {
                let w = if weight_eps { a * e } else { a };
                (w * (-I * o).powu(derivative) * (-I * o * tau).exp()).re
            })
            .sum()
    }

    /// `H_α(τ)`, zero for `τ < 0`.
    pub fn h(&self, tau: f64) -> f64 {
        self.eval(tau, false, 0)
    }

    /// `dH_α/dτ`.
    pub fn dh(&self, tau: f64) -> f64 {
        self.eval(tau, false, 1)
    }

    /// `U_α(τ)`, zero for `τ < 0`.
    pub fn u(&self, tau: f64) -> f64 {
        self.eval(tau, true, 0)
    }

    /// `dU_α/dτ`; its value at `0⁺` is the real sum rule.
    pub fn du(&self, tau: f64) -> f64 {
        self.eval(tau, true, 1)
    }

    /// `d²U_α/dτ²`.
    pub fn ddu(&self, tau: f64) -> f64 {
        self.eval(tau, true, 2)
    }
}

/// Residue-sum `H_α(τ)`; fails if the roots violate the sum rules.
pub fn h_residue(roots: &[PolaritonRoot], omega_alpha: f64, tau: f64) -> Result<f64> {
    Ok(ResidueExpansion::new(roots, omega_alpha)?.h(tau))
}

/// Residue-sum `U_α(τ)`; fails if the roots violate the sum rules.
pub fn u_residue(roots: &[PolaritonRoot], omega_alpha: f64, tau: f64) -> Result<f64> {
    Ok(ResidueExpansion::new(roots, omega_alpha)?.u(tau))
}

/// Per-mode retarded kernel of the scalar propagator; with `c = 1` it is
/// `H_α` itself.
pub fn delta_chi_mode(roots: &[PolaritonRoot], omega_alpha: f64, tau: f64) -> Result<f64> {
    h_residue(roots, omega_alpha, tau)
}

/// Quantity carried by a [`PropagatorCurve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropagatorKind {
    H,
    U,
    DuDtau,
    DeltaChi,
}

/// Propagator samples on the uniform grid `τ_k = start + k·step`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorCurve {
    pub kind: PropagatorKind,
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl PropagatorCurve {
    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| self.start + k as f64 * self.step)
    }

    /// Residue-sum curve of the requested kind on `n` points.
    pub fn from_residues(exp: &ResidueExpansion, kind: PropagatorKind, start: f64, step: f64, n: usize) -> Self {
        let values = (0..n)
            .map(|k| {
                let t = start + k as f64 * step;
                match kind {
                    PropagatorKind::H | PropagatorKind::DeltaChi => exp.h(t),
                    PropagatorKind::U => exp.u(t),
                    PropagatorKind::DuDtau => exp.du(t),
                }
            })
            .collect();
        PropagatorCurve { kind, start, step, values }
    }
}

/// Settings of the damped-FFT Bromwich inversion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BromwichConfig {
    /// Contour shift `γ_shift` above the real axis; default `min γ_n / 4`.
    pub shift: Option<f64>,
    /// Frequency step; default `min γ_n / 16`.
    pub d_omega: Option<f64>,
    /// Transform length (power of two); default `2²⁰`.
    pub n_fft: usize,
}

impl Default for BromwichConfig {
    fn default() -> Self {
        BromwichConfig { shift: None, d_omega: None, n_fft: 1 << 20 }
    }
}

/// Result of one Bromwich inversion: the whole periodic window
/// `τ ∈ [−π/Δω, π/Δω)` sampled at `Δτ = 2π/(NΔω)`.
#[derive(Clone, Debug)]
pub struct BromwichWindow {
    omega_alpha: f64,
    d_tau: f64,
    /// Samples ordered from `τ = −N/2·Δτ` to `(N/2 − 1)·Δτ`.
    samples: Vec<f64>,
    /// Analytic part added back (the vacuum propagator), if any.
    vacuum_added: bool,
}

impl BromwichWindow {
    pub fn half_width(&self) -> f64 {
        0.5 * self.samples.len() as f64 * self.d_tau
    }

    pub fn step(&self) -> f64 {
        self.d_tau
    }

    /// Raw sample at signed grid index `j` (τ = jΔτ).
    pub fn sample(&self, j: i64) -> f64 {
        let n = self.samples.len() as i64;
        let v = self.samples[(j + n / 2) as usize];
        v + self.vacuum_part(j as f64 * self.d_tau)
    }

    fn vacuum_part(&self, tau: f64) -> f64 {
        if self.vacuum_added && tau > 0.0 {
            (self.omega_alpha * tau).sin() / self.omega_alpha
        } else {
            0.0
        }
    }

    /// Value at any `τ` inside the window (four-point interpolation).
    pub fn at(&self, tau: f64) -> Result<f64> {
        let hw = self.half_width();
        if tau.abs() >= 0.5 * hw {
            return Err(Error::Aliasing { requested: tau.abs(), window: 0.5 * hw });
        }
        let v = interp_uniform(-hw, self.d_tau, &self.samples, tau)
            .ok_or(Error::Aliasing { requested: tau.abs(), window: 0.5 * hw })?;
        Ok(v + self.vacuum_part(tau))
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Transform {
    H,
    U,
    /// Anticausal `H` built from `ε*`, inverted below the real axis.
    HAnticausal,
}

fn bromwich(medium: &Medium, omega_alpha: f64, cfg: &BromwichConfig, which: Transform) -> Result<BromwichWindow> {
    if !(omega_alpha > 0.0 && omega_alpha.is_finite()) {
        return Err(Error::invalid("omega_alpha", "must be finite and > 0"));
    }
    let n = cfg.n_fft;
    if !n.is_power_of_two() || n < 1024 {
        return Err(Error::invalid("n_fft", "must be a power of two ≥ 1024"));
    }
    let g_min = match medium.min_gamma() {
        None => 1.0, // vacuum: the subtracted remainder vanishes identically
        Some(g) if g > 0.0 => g,
        Some(_) => return Err(Error::LosslessUnsupported("the Bromwich inversion")),
    };
    let eta = cfg.shift.unwrap_or(0.25 * g_min);
    let dw = cfg.d_omega.unwrap_or(g_min / 16.0);
    if !(eta > 0.0) {
        return Err(Error::invalid("gamma_shift", "must be > 0"));
    }
    if !(dw > 0.0 && dw < g_min / 8.0 + 1e-300) && !medium.is_vacuum() {
        return Err(Error::invalid("d_omega", "frequency step must resolve the narrowest resonance (Δω < γ_min/8)"));
    }
    let wa2 = omega_alpha * omega_alpha;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    if !medium.is_vacuum() {
        for (k, slot) in buf.iter_mut().enumerate() {
            let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
            let w = kk * dw;
            let (z, eps) = match which {
                Transform::H | Transform::U => {
                    let z = Complex64::new(w, eta);
                    (z, medium.epsilon(z)?)
                }
                Transform::HAnticausal => {
                    let z = Complex64::new(w, -eta);
                    (z, medium.epsilon(z.conj())?.conj())
                }
            };
            let vac = 1.0 / (wa2 - z * z);
            let full = 1.0 / (wa2 - eps * z * z);
            *slot = match which {
                Transform::H | Transform::HAnticausal => full - vac,
                Transform::U => eps * full - vac,
            };
        }
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    }
    let d_tau = std::f64::consts::TAU / (n as f64 * dw);
    let sign = if which == Transform::HAnticausal { -1.0 } else { 1.0 };
    let mut samples = vec![0.0; n];
    for (idx, s) in samples.iter_mut().enumerate() {
        let j = idx as i64 - (n / 2) as i64;
        let tau = j as f64 * d_tau;
        let raw = buf[j.rem_euclid(n as i64) as usize].re;
        *s = (sign * eta * tau).exp() * dw / std::f64::consts::TAU * raw;
    }
    // The anticausal vacuum part is −sin(ω_α τ)/ω_α for τ < 0; add it here.
    if which == Transform::HAnticausal {
        for (idx, s) in samples.iter_mut().enumerate() {
            let tau = (idx as i64 - (n / 2) as i64) as f64 * d_tau;
            if tau < 0.0 {
                *s -= (omega_alpha * tau).sin() / omega_alpha;
            }
        }
    }
    Ok(BromwichWindow { omega_alpha, d_tau, samples, vacuum_added: which != Transform::HAnticausal })
}

/// Bromwich inversion of `Ĥ` along `Im ω = γ_shift` over the whole window.
pub fn h_bromwich(medium: &Medium, omega_alpha: f64, cfg: &BromwichConfig) -> Result<BromwichWindow> {
    bromwich(medium, omega_alpha, cfg, Transform::H)
}

/// Bromwich inversion of `Û = εĤ`.
pub fn u_bromwich(medium: &Medium, omega_alpha: f64, cfg: &BromwichConfig) -> Result<BromwichWindow> {
    bromwich(medium, omega_alpha, cfg, Transform::U)
}

/// The anticausal propagator built from `ε*` (inverted along
/// `Im ω = −γ_shift`); it equals `H(−τ)`.
pub fn h_anticausal_bromwich(medium: &Medium, omega_alpha: f64, cfg: &BromwichConfig) -> Result<BromwichWindow> {
    bromwich(medium, omega_alpha, cfg, Transform::HAnticausal)
}

/// Numerical `H_α` on the uniform grid `τ_k = start + k·step` (negative
/// times allowed, where the result should vanish).
pub fn h_numeric(
    medium: &Medium,
    omega_alpha: f64,
    start: f64,
    step: f64,
    n: usize,
    cfg: &BromwichConfig,
) -> Result<PropagatorCurve> {
    curve(h_bromwich(medium, omega_alpha, cfg)?, PropagatorKind::H, start, step, n)
}

/// Numerical `U_α` on a uniform grid.
pub fn u_numeric(
    medium: &Medium,
    omega_alpha: f64,
    start: f64,
    step: f64,
    n: usize,
    cfg: &BromwichConfig,
) -> Result<PropagatorCurve> {
    curve(u_bromwich(medium, omega_alpha, cfg)?, PropagatorKind::U, start, step, n)
}

fn curve(w: BromwichWindow, kind: PropagatorKind, start: f64, step: f64, n: usize) -> Result<PropagatorCurve> {
    let values = (0..n).map(|k| w.at(start + k as f64 * step)).collect::<Result<Vec<_>>>()?;
    Ok(PropagatorCurve { kind, start, step, values })
}

/// `k = ω√ε(ω)` on the branch with `Im k ≥ 0`; for real `k` the sign
/// follows `Re ω` (outgoing waves).
pub fn wavenumber(medium: &Medium, omega: Complex64) -> Result<Complex64> {
    let eps = medium.epsilon(omega)?;
    let mut k = omega * eps.sqrt();
    let scale = k.norm();
    if k.im.abs() > 1e-14 * scale {
        if k.im < 0.0 {
            k = -k;
        }
    } else if scale > 0.0 {
        if omega.re == 0.0 {
            return Err(Error::BranchAmbiguity { omega });
        }
        k = Complex64::new(k.re.abs() * omega.re.signum(), k.im.abs());
    }
    Ok(k)
}

/// Scalar Green function `e^{ikR}/(4πR)` with `k = ω√ε` on the decaying
/// branch.
pub fn scalar_green(medium: &Medium, r: f64, omega: Complex64) -> Result<Complex64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("R", "distance must be finite and > 0"));
    }
    let k = wavenumber(medium, omega)?;
    Ok((I * k * r).exp() / (4.0 * std::f64::consts::PI * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::transverse_roots;

    #[test]
    fn vacuum_residues_give_sine() {
        let roots = transverse_roots(&Medium::vacuum(), 1.0, None).unwrap();
        let e = ResidueExpansion::new(&roots, 1.0).unwrap();
        assert!((e.h(std::f64::consts::FRAC_PI_2) - 1.0).abs() < 1e-14);
        assert!(e.h(0.0).abs() < 1e-15);
        assert!((e.u(0.7) - 0.7f64.sin()).abs() < 1e-14);
        assert_eq!(sum_rule_im(&roots, 1.0), 0.0);
        assert!((sum_rule_re(&roots, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn truncated_set_is_rejected() {
        let m = Medium::single(1.0, 1.0, 0.1).unwrap();
        let roots = transverse_roots(&m, 1.0, None).unwrap();
        assert!(matches!(ResidueExpansion::new(&roots[..1], 1.0), Err(Error::IncompleteRootSet { .. })));
    }

    #[test]
    fn vacuum_green_at_full_wave() {
        let r = 1.0;
        let g = scalar_green(&Medium::vacuum(), r, Complex64::new(std::f64::consts::TAU, 0.0)).unwrap();
        let expect = 1.0 / (4.0 * std::f64::consts::PI);
        assert!((g - expect).norm() < 1e-15);
    }

    #[test]
    fn branch_decays() {
        let m = Medium::single(1.0, 1.0, 0.1).unwrap();
        for w in [0.3, 1.0, 1.2, 3.0, -0.8] {
            let k = wavenumber(&m, Complex64::new(w, 0.0)).unwrap();
            assert!(k.im > 0.0);
        }
    }
}
