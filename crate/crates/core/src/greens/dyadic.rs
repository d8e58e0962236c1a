//! Homogeneous-medium Green dyadics: closed form, plane-wave split and the
//! vacuum time-domain mode kernels.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::basis::{BoxModeBasis, ModeIndex, Polarization};
use super::{complexify, Dyad, DyadKind, DyadicSample};
use crate::error::{Error, Result};
use crate::medium::Medium;
use crate::propagators::wavenumber;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Separations below this (in units of the wavelength `1/|k|`) are in the
/// regularization region where the point form should not be trusted.
const NEAR_FIELD_KR: f64 = 1e-3;

/// `[I + ∇∇/k²] e^{ikR}/(4πR)` for separation vector `r = x − x′`.
pub fn green_closed_form(k: Complex64, r: &Vector3<f64>) -> Dyad {
    let rr = r.norm();
    let rh = r / rr;
    let kr = k * rr;
    let g = (I * kr).exp() / (4.0 * std::f64::consts::PI * rr);
    let a = 1.0 + I / kr - 1.0 / (kr * kr);
    let b = -1.0 - 3.0 * I / kr + 3.0 / (kr * kr);
    let outer = complexify(&(rh * rh.transpose()));
    (Dyad::identity() * a + outer * b) * g
}

/// Dyadic Green function of a homogeneous medium at `x ≠ x′`.
pub fn g_dyadic_homogeneous(
    medium: &Medium,
    x: &Vector3<f64>,
    xp: &Vector3<f64>,
    omega: Complex64,
) -> Result<DyadicSample> {
    let r = x - xp;
    if r.norm() == 0.0 {
        return Err(Error::invalid("x", "field and source points coincide"));
    }
    let k = wavenumber(medium, omega)?;
    if k.norm() == 0.0 {
        return Err(Error::invalid("omega", "static limit k = 0 is not supported"));
    }
    if (k * r.norm()).norm() < NEAR_FIELD_KR {
        log::warn!("|k|R = {:e}: point evaluated inside the regularization region", (k * r.norm()).norm());
    }
    Ok(DyadicSample { source: *xp, field: *x, omega, tensor: green_closed_form(k, &r), kind: DyadKind::G })
}

/// `S = ∇×∇×G = εω²G` away from the source.
pub fn s_dyadic_homogeneous(
    medium: &Medium,
    x: &Vector3<f64>,
    xp: &Vector3<f64>,
    omega: Complex64,
) -> Result<DyadicSample> {
    let g = g_dyadic_homogeneous(medium, x, xp, omega)?;
    let eps = medium.epsilon(omega)?;
    Ok(DyadicSample { tensor: g.tensor * (eps * omega * omega), kind: DyadKind::S, ..g })
}

/// One plane-wave contribution to the split Green tensor.
#[derive(Clone, Debug)]
pub struct ModeTerm {
    pub mode: ModeIndex,
    /// `ΦΦ*` for this wavevector.
    pub phase: Complex64,
    /// Contribution to `G_⊥` or `G_∥`.
    pub g: Dyad,
}

/// Per-mode contributions `ΦΦ* ε̂ε̂/(ω_α² − εω²)` (transverse) and
/// `−ΦΦ* k̂k̂/(εω²)` (longitudinal).
pub fn mode_terms(
    basis: &BoxModeBasis,
    medium: &Medium,
    x: &Vector3<f64>,
    xp: &Vector3<f64>,
    omega: Complex64,
) -> Result<Vec<ModeTerm>> {
    let eps_w2 = medium.epsilon(omega)? * omega * omega;
    if eps_w2.norm() == 0.0 {
        return Err(Error::invalid("omega", "εω² vanishes; the longitudinal part is singular"));
    }
    basis
        .modes()
        .map(|mode| {
            let phase = basis.phi_phi(&mode.k, x, xp);
            let e = mode.unit_vector();
            let proj = complexify(&(e * e.transpose()));
            let weight = match mode.polarization {
                Polarization::Longitudinal => -1.0 / eps_w2,
                _ => {
                    let den = mode.omega_alpha().powi(2) - eps_w2;
                    if den.norm() == 0.0 {
                        return Err(Error::PoleHit { omega, resonance: usize::MAX });
                    }
                    1.0 / den
                }
            };
            Ok(ModeTerm { mode, phase, g: proj * (phase * weight) })
        })
        .collect()
}

/// Transverse and longitudinal parts of `G` from the plane-wave sum.
pub fn planewave_split(
    basis: &BoxModeBasis,
    medium: &Medium,
    x: &Vector3<f64>,
    xp: &Vector3<f64>,
    omega: Complex64,
) -> Result<(DyadicSample, DyadicSample)> {
    let mut perp = Dyad::zeros();
    let mut par = Dyad::zeros();
    for t in mode_terms(basis, medium, x, xp, omega)? {
        match t.mode.polarization {
            Polarization::Longitudinal => par += t.g,
            _ => perp += t.g,
        }
    }
    let mk = |tensor, kind| DyadicSample { source: *xp, field: *x, omega, tensor, kind };
    Ok((mk(perp, DyadKind::GPerp), mk(par, DyadKind::GPar)))
}

/// Plane-wave split with every mode weighted by `e^{−k²a²/2}`, i.e. both
/// parts convolved with a normalized Gaussian of width `a` in `x`.
///
/// The sharply truncated sum does not converge pointwise (the longitudinal
/// symbol does not decay in `k`); the regularized sum converges like
/// `e^{−k_max²a²/2}` and is compared with [`g_dyadic_smoothed`].
pub fn planewave_split_smoothed(
    basis: &BoxModeBasis,
    medium: &Medium,
    x: &Vector3<f64>,
    xp: &Vector3<f64>,
    omega: Complex64,
    a: f64,
) -> Result<(DyadicSample, DyadicSample)> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid("smoothing", "must be finite and > 0"));
    }
    let mut perp = Dyad::zeros();
    let mut par = Dyad::zeros();
    for t in mode_terms(basis, medium, x, xp, omega)? {
        let damp = Complex64::from((-0.5 * t.mode.k.norm_squared() * a * a).exp());
        match t.mode.polarization {
            Polarization::Longitudinal => par += t.g * damp,
            _ => perp += t.g * damp,
        }
    }
    let mk = |tensor, kind| DyadicSample { source: *xp, field: *x, omega, tensor, kind };
    Ok((mk(perp, DyadKind::GPerp), mk(par, DyadKind::GPar)))
}

/// Closed-form `G` convolved with a normalized 3D Gaussian of width `a`:
/// `G_a = g_a I + (1/k²)[g_a″ R̂R̂ + (g_a′/R)(I − R̂R̂)]`, where the smoothed
/// scalar `g_a` follows from the radial convolution
/// `R g_a(R) = (1/(4π a√(2π))) ∫₀^∞ e^{ikρ}[e^{−(R−ρ)²/2a²} − e^{−(R+ρ)²/2a²}] dρ`.
pub fn g_dyadic_smoothed(medium: &Medium, r: &Vector3<f64>, omega: Complex64, a: f64) -> Result<Dyad> {
    let k = wavenumber(medium, omega)?;
    let rr = r.norm();
    if rr == 0.0 || !(a > 0.0) {
        return Err(Error::invalid("R", "need R > 0 and a > 0"));
    }
    let norm = 1.0 / (4.0 * std::f64::consts::PI * a * (std::f64::consts::TAU).sqrt());
    // u(R) and its first two R-derivatives.
    let mut u = [Complex64::new(0.0, 0.0); 3];
    for (sign, lo, hi) in [(1.0, (rr - 14.0 * a).max(0.0), rr + 14.0 * a), (-1.0, 0.0, (14.0 * a - rr).max(0.0))] {
        if hi <= lo {
            continue;
        }
        for (order, slot) in u.iter_mut().enumerate() {
            let f = |rho: f64| {
                let s = rr - sign * rho; // R ∓ ρ
                let gauss = (-s * s / (2.0 * a * a)).exp();
                let poly = match order {
                    0 => 1.0,
                    1 => -s / (a * a),
                    _ => s * s / a.powi(4) - 1.0 / (a * a),
                };
                (Complex64::new(0.0, 1.0) * k * rho).exp() * (gauss * poly)
            };
            let res = crate::numerics::quad::integrate(f, &[lo, 0.5 * (lo + hi), hi], 1e-15, 1e-13, 4000)?;
            // The mirrored term enters with a minus sign.
            *slot += res.value * (if sign > 0.0 { norm } else { -norm });
        }
    }
    let g = u[0] / rr;
    let g1 = u[1] / rr - u[0] / (rr * rr);
    let g2 = u[2] / rr - 2.0 * u[1] / (rr * rr) + 2.0 * u[0] / rr.powi(3);
    let rh = r / rr;
    let outer = complexify(&(rh * rh.transpose()));
    let id = Dyad::identity();
    Ok(id * g + (outer * g2 + (id - outer) * (g1 / rr)) / (k * k))
}

/// `∇_x×∇_x×` acting on a plane-wave term `e^{ik·x}M`: `−[k]×[k]× M`.
pub fn curl_curl_plane_wave(k: &Vector3<f64>, m: &Dyad) -> Dyad {
    let kx = complexify(&k.cross_matrix());
    -(kx * kx) * m
}

/// Largest per-mode defect of `∇×∇×G_α = εω²G_α + ΦΦ*P_α`, where `P_α` is
/// the mode's projector (the mode's share of the delta dyad), relative to
/// the size of the terms involved.
pub fn s_identity_defect(
    basis: &BoxModeBasis,
    medium: &Medium,
    x: &Vector3<f64>,
    xp: &Vector3<f64>,
    omega: Complex64,
) -> Result<f64> {
    let eps_w2 = medium.epsilon(omega)? * omega * omega;
    let mut worst: f64 = 0.0;
    for t in mode_terms(basis, medium, x, xp, omega)? {
        let e = t.mode.unit_vector();
        let delta = complexify(&(e * e.transpose())) * t.phase;
        let lhs = curl_curl_plane_wave(&t.mode.k, &t.g);
        let rhs = t.g * eps_w2 + delta;
        let scale = super::max_abs(&lhs).max(super::max_abs(&delta)).max(1e-300);
        worst = worst.max(super::max_abs(&(lhs - rhs)) / scale);
    }
    Ok(worst)
}

/// `Σ_α ΦΦ*(ε̂₁ε̂₁ + ε̂₂ε̂₂ + k̂k̂)`: the truncated delta dyad.
pub fn closure(basis: &BoxModeBasis, x: &Vector3<f64>, xp: &Vector3<f64>) -> Dyad {
    let mut acc = Dyad::zeros();
    for mode in basis.modes() {
        let e = mode.unit_vector();
        acc += complexify(&(e * e.transpose())) * basis.phi_phi(&mode.k, x, xp);
    }
    acc
}

/// Per-mode vacuum kernels at time `τ ≥ 0`.
///
/// Transverse: `U = sin(ω_α τ)/ω_α`, `Q = ∇×∇×U = ω_α sin(ω_α τ)`;
/// longitudinal: `U = τ`, `Q = 0`.
pub fn vacuum_mode_kernels(mode: &ModeIndex, tau: f64) -> (f64, f64) {
    let w = mode.omega_alpha();
    match mode.polarization {
        Polarization::Longitudinal => (0.0, tau),
        _ => (w * (w * tau).sin(), (w * tau).sin() / w),
    }
}

/// Time derivatives `(∂_τ U, ∂²_τ U)` of the per-mode vacuum kernel.
pub fn vacuum_mode_kernel_derivatives(mode: &ModeIndex, tau: f64) -> (f64, f64) {
    let w = mode.omega_alpha();
    match mode.polarization {
        Polarization::Longitudinal => (1.0, 0.0),
        _ => ((w * tau).cos(), -w * (w * tau).sin()),
    }
}

/// Mode sums of the vacuum time propagators between two points.
#[derive(Clone, Debug)]
pub struct VacuumKernels {
    pub q: Dyad,
    pub u_perp: Dyad,
    pub u_par: Dyad,
    /// `∂_τ(U_⊥ + U_∥)`; at `τ = 0` the truncated delta dyad.
    pub du: Dyad,
}

pub fn vacuum_time_propagators(
    basis: &BoxModeBasis,
    x: &Vector3<f64>,
    xp: &Vector3<f64>,
    tau: f64,
) -> Result<VacuumKernels> {
    if tau < 0.0 {
        return Err(Error::invalid("tau", "vacuum kernels are retarded; τ ≥ 0"));
    }
    let mut out = VacuumKernels { q: Dyad::zeros(), u_perp: Dyad::zeros(), u_par: Dyad::zeros(), du: Dyad::zeros() };
    for mode in basis.modes() {
        let e = mode.unit_vector();
        let p = complexify(&(e * e.transpose())) * basis.phi_phi(&mode.k, x, xp);
        let (q, u) = vacuum_mode_kernels(&mode, tau);
        let (du, _) = vacuum_mode_kernel_derivatives(&mode, tau);
        out.q += p * Complex64::from(q);
        out.du += p * Complex64::from(du);
        match mode.polarization {
            Polarization::Longitudinal => out.u_par += p * Complex64::from(u),
            _ => out.u_perp += p * Complex64::from(u),
        }
    }
    Ok(out)
}

/// Real 3×3 outer product helper used by several modules.
pub fn outer(a: &Vector3<f64>, b: &Vector3<f64>) -> Matrix3<f64> {
    a * b.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_is_symmetric() {
        let k = Complex64::new(1.3, 0.2);
        let r = Vector3::new(0.3, -1.2, 0.7);
        let g = green_closed_form(k, &r);
        assert!(super::super::max_abs(&(g - g.transpose())) < 1e-16);
        // Even in r: G(x, x′) = G(x′, x).
        assert!(super::super::max_abs(&(g - green_closed_form(k, &(-r)))) < 1e-16);
    }

    #[test]
    fn s_identity_holds_per_mode() {
        let b = BoxModeBasis::cubic(4.0, 5.0).unwrap();
        let m = Medium::single(1.0, 1.0, 0.1).unwrap();
        let d = s_identity_defect(&b, &m, &Vector3::new(0.1, 0.2, 0.3), &Vector3::zeros(), Complex64::new(0.9, 0.0))
            .unwrap();
        assert!(d < 1e-13, "{d:e}");
    }

    #[test]
    fn vacuum_kernels_vanish_at_zero() {
        let b = BoxModeBasis::cubic(3.0, 4.0).unwrap();
        let k = vacuum_time_propagators(&b, &Vector3::new(0.2, 0.0, 0.1), &Vector3::zeros(), 0.0).unwrap();
        assert_eq!(super::super::max_abs(&k.q), 0.0);
        assert_eq!(super::super::max_abs(&k.u_perp), 0.0);
        assert_eq!(super::super::max_abs(&k.u_par), 0.0);
        let c = closure(&b, &Vector3::new(0.2, 0.0, 0.1), &Vector3::zeros());
        assert!(super::super::max_abs(&(k.du - c)) < 1e-14);
    }
}
