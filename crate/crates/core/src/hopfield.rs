//! Exact diagonalization of the lossless single-resonance (Hopfield) model
//!
//! ```text
//! ε(Ω) = 1 + ω_p²/(ω_0² − Ω²),   ω_L² = ω_0² + ω_p²
//! Ω⁴ − Ω²(ω_α² + ω_L²) + ω_α²ω_0² = 0
//! ```
//!
//! Each transverse real mode carries `(E, B, P, Ṗ)` obeying
//! `Ḋ = ω_α B`, `Ḃ = −ω_α E`, `D = E + P`, `P̈ + ω_0²P = ω_p²E`, with energy
//! `½(E² + B²) + (Ṗ² + ω_0²P²)/(2ω_p²)`. The normal coordinates `φ_±`
//! evolve as `φ_±(t) = φ_±(0) e^{−iΩ_± t}` and reconstruct the fields as
//!
//! ```text
//! E = Σ 2 Re φ        P = Σ 2a Re φ         a = ω_p²/(ω_0² − Ω²) = ε(Ω) − 1
//! B = Σ 2(ω_α/Ω) Im φ  Ṗ = Σ 2aΩ Im φ
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::{LorentzResonance, Medium};

/// Lossless Drude–Lorentz parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfieldMedium {
    pub omega0: f64,
    pub omegap: f64,
}

impl HopfieldMedium {
    pub fn new(omega0: f64, omegap: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::invalid("omega0", "must be finite and > 0"));
        }
        if !(omegap > 0.0 && omegap.is_finite()) {
            return Err(Error::invalid("omegap", "must be finite and > 0"));
        }
        Ok(HopfieldMedium { omega0, omegap })
    }

    /// Longitudinal plasmon frequency `√(ω_0² + ω_p²)`.
    pub fn omega_l(&self) -> f64 {
        self.omega0.hypot(self.omegap)
    }

    /// The same model as a general (lossless) [`Medium`].
    pub fn to_medium(&self) -> Medium {
        Medium::lossless("hopfield", vec![LorentzResonance::new(self.omegap.powi(2), self.omega0, 0.0)])
            .expect("validated parameters")
    }

    /// `ε(Ω)` on the real axis.
    pub fn epsilon(&self, w: f64) -> f64 {
        1.0 + self.omegap.powi(2) / (self.omega0.powi(2) - w * w)
    }

    /// `a(Ω) = ω_p²/(ω_0² − Ω²)`.
    fn a(&self, w: f64) -> f64 {
        self.omegap.powi(2) / (self.omega0.powi(2) - w * w)
    }

    /// Energy per `|φ|²` of a branch: `2(1 + ω_0²ω_p²/(ω_0² − Ω²)²)`.
    pub fn energy_coefficient(&self, w: f64) -> f64 {
        let a = self.a(w);
        2.0 * (1.0 + self.omega0.powi(2) * a * a / self.omegap.powi(2))
    }
}

/// `(Ω₊, Ω₋, ω_L)` for photon frequency `ω_α`.
pub fn hopfield_frequencies(omega_alpha: f64, m: &HopfieldMedium) -> Result<(f64, f64, f64)> {
    if !(omega_alpha > 0.0 && omega_alpha.is_finite()) {
        return Err(Error::invalid("omega_alpha", "must be finite and > 0"));
    }
    let wl2 = m.omega_l().powi(2);
    let s = omega_alpha.powi(2) + wl2;
    let disc = (s * s - 4.0 * omega_alpha.powi(2) * m.omega0.powi(2)).sqrt();
    let plus2 = 0.5 * (s + disc);
    // Vieta for the small root avoids cancellation.
    let minus2 = omega_alpha.powi(2) * m.omega0.powi(2) / plus2;
    Ok((plus2.sqrt(), minus2.sqrt(), m.omega_l()))
}

/// `dΩ_±²/dω_α²` of the closed form.
pub fn hopfield_group_factor(omega_alpha: f64, m: &HopfieldMedium) -> Result<(f64, f64)> {
    let (p, q, _) = hopfield_frequencies(omega_alpha, m)?;
    // Differentiate Ω⁴ − Ω²(ω_α² + ω_L²) + ω_α²ω_0² = 0 in x = ω_α², y = Ω².
    let d = |y: f64| (y - m.omega0.powi(2)) / (2.0 * y - omega_alpha.powi(2) - m.omega_l().powi(2));
    Ok((d(p * p), d(q * q)))
}

/// Raw amplitudes of one real transverse mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeFields {
    pub e: f64,
    pub b: f64,
    pub p: f64,
    pub p_dot: f64,
}

/// Polarization of one longitudinal real mode (`E_∥ = −P_∥`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LongitudinalFields {
    pub p: f64,
    pub p_dot: f64,
}

/// Normal coordinates of a set of modes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolaritonAmplitudes {
    /// `(φ₊, φ₋)` per transverse mode.
    pub transverse: Vec<(Complex64, Complex64)>,
    /// `β` per longitudinal mode.
    pub longitudinal: Vec<Complex64>,
}

/// One transverse mode of the Hopfield model at photon frequency `ω_α`.
#[derive(Clone, Copy, Debug)]
pub struct HopfieldMode {
    pub medium: HopfieldMedium,
    pub omega_alpha: f64,
    pub plus: f64,
    pub minus: f64,
}

impl HopfieldMode {
    pub fn new(medium: HopfieldMedium, omega_alpha: f64) -> Result<Self> {
        let (plus, minus, _) = hopfield_frequencies(omega_alpha, &medium)?;
        Ok(HopfieldMode { medium, omega_alpha, plus, minus })
    }

    /// Fields carried by `(φ₊, φ₋)`.
    pub fn fields(&self, phi: (Complex64, Complex64)) -> ModeFields {
        let mut f = ModeFields::default();
        for (w, p) in [(self.plus, phi.0), (self.minus, phi.1)] {
            let a = self.medium.a(w);
            f.e += 2.0 * p.re;
            f.p += 2.0 * a * p.re;
            f.b += 2.0 * self.omega_alpha / w * p.im;
            f.p_dot += 2.0 * a * w * p.im;
        }
        f
    }

    /// Inverse of [`HopfieldMode::fields`]: two real 2×2 solves.
    pub fn amplitudes(&self, f: &ModeFields) -> Result<(Complex64, Complex64)> {
        let (wp, wm) = (self.plus, self.minus);
        let (ap, am) = (self.medium.a(wp), self.medium.a(wm));
        // [E; P] = 2[[1, 1], [a₊, a₋]] [Re φ₊; Re φ₋]
        let (re_p, re_m) = solve2(2.0, 2.0, 2.0 * ap, 2.0 * am, f.e, f.p)?;
        // [B; Ṗ] = 2[[ω_α/Ω₊, ω_α/Ω₋], [a₊Ω₊, a₋Ω₋]] [Im φ₊; Im φ₋]
        let (im_p, im_m) = solve2(
            2.0 * self.omega_alpha / wp,
            2.0 * self.omega_alpha / wm,
            2.0 * ap * wp,
            2.0 * am * wm,
            f.b,
            f.p_dot,
        )?;
        Ok((Complex64::new(re_p, im_p), Complex64::new(re_m, im_m)))
    }

    /// Exact lossless evolution of the raw fields over time `t`.
    pub fn evolve(&self, f: &ModeFields, t: f64) -> Result<ModeFields> {
        let (p, m) = self.amplitudes(f)?;
        Ok(self
            .fields((p * Complex64::from_polar(1.0, -self.plus * t), m * Complex64::from_polar(1.0, -self.minus * t))))
    }

    /// Factor turning `φ_±` into unit-commutator ladder amplitudes `f_±`
    /// (so that the branch energy is `Ω|f|²`).
    pub fn ladder_factors(&self) -> (f64, f64) {
        let s = |w: f64| (self.medium.energy_coefficient(w) / w).sqrt();
        (s(self.plus), s(self.minus))
    }
}

fn solve2(a: f64, b: f64, c: f64, d: f64, x: f64, y: f64) -> Result<(f64, f64)> {
    let det = a * d - b * c;
    if det.abs() <= 1e-14 * (a.abs() * d.abs() + b.abs() * c.abs()) {
        return Err(Error::SingularTransform);
    }
    Ok(((d * x - b * y) / det, (a * y - c * x) / det))
}

/// `β = P/2 + iṖ/(2ω_L)`.
pub fn longitudinal_amplitude(m: &HopfieldMedium, f: &LongitudinalFields) -> Complex64 {
    Complex64::new(0.5 * f.p, 0.5 * f.p_dot / m.omega_l())
}

/// Inverse of [`longitudinal_amplitude`].
pub fn longitudinal_fields(m: &HopfieldMedium, beta: Complex64) -> LongitudinalFields {
    LongitudinalFields { p: 2.0 * beta.re, p_dot: 2.0 * m.omega_l() * beta.im }
}

/// Forward transform of a whole mode set.
pub fn hopfield_transform(
    m: &HopfieldMedium,
    omega_alphas: &[f64],
    transverse: &[ModeFields],
    longitudinal: &[LongitudinalFields],
) -> Result<PolaritonAmplitudes> {
    if omega_alphas.len() != transverse.len() {
        return Err(Error::invalid("transverse", "one field set per photon frequency"));
    }
    let t = omega_alphas
        .iter()
        .zip(transverse)
        .map(|(&w, f)| HopfieldMode::new(*m, w)?.amplitudes(f))
        .collect::<Result<Vec<_>>>()?;
    let l = longitudinal.iter().map(|f| longitudinal_amplitude(m, f)).collect();
    Ok(PolaritonAmplitudes { transverse: t, longitudinal: l })
}

/// Inverse transform of a whole mode set.
pub fn hopfield_inverse(
    m: &HopfieldMedium,
    omega_alphas: &[f64],
    amps: &PolaritonAmplitudes,
) -> Result<(Vec<ModeFields>, Vec<LongitudinalFields>)> {
    if omega_alphas.len() != amps.transverse.len() {
        return Err(Error::invalid("transverse", "one amplitude pair per photon frequency"));
    }
    let t = omega_alphas
        .iter()
        .zip(&amps.transverse)
        .map(|(&w, &phi)| Ok(HopfieldMode::new(*m, w)?.fields(phi)))
        .collect::<Result<Vec<_>>>()?;
    let l = amps.longitudinal.iter().map(|&b| longitudinal_fields(m, b)).collect();
    Ok((t, l))
}

/// `½(E² + B²) + (Ṗ² + ω_0²P²)/(2ω_p²)` for one transverse mode.
pub fn mode_energy(m: &HopfieldMedium, f: &ModeFields) -> f64 {
    0.5 * (f.e * f.e + f.b * f.b) + (f.p_dot * f.p_dot + m.omega0.powi(2) * f.p * f.p) / (2.0 * m.omegap.powi(2))
}

/// `½P² + (Ṗ² + ω_0²P²)/(2ω_p²)` for one longitudinal mode.
pub fn longitudinal_energy(m: &HopfieldMedium, f: &LongitudinalFields) -> f64 {
    0.5 * f.p * f.p + (f.p_dot * f.p_dot + m.omega0.powi(2) * f.p * f.p) / (2.0 * m.omegap.powi(2))
}

/// Energy from the raw fields and from the normal coordinates, and their
/// relative deviation.
pub fn hamiltonian_diagonal(
    m: &HopfieldMedium,
    omega_alphas: &[f64],
    amps: &PolaritonAmplitudes,
    transverse: &[ModeFields],
    longitudinal: &[LongitudinalFields],
) -> Result<(f64, f64, f64)> {
    let raw: f64 = transverse.iter().map(|f| mode_energy(m, f)).sum::<f64>()
        + longitudinal.iter().map(|f| longitudinal_energy(m, f)).sum::<f64>();
    let mut diag = 0.0;
    for (&w, &(p, q)) in omega_alphas.iter().zip(&amps.transverse) {
        let mode = HopfieldMode::new(*m, w)?;
        diag += m.energy_coefficient(mode.plus) * p.norm_sqr() + m.energy_coefficient(mode.minus) * q.norm_sqr();
    }
    let wl2 = m.omega_l().powi(2);
    diag += amps.longitudinal.iter().map(|b| 2.0 * wl2 / m.omegap.powi(2) * b.norm_sqr()).sum::<f64>();
    let dev = if raw == 0.0 && diag == 0.0 { 0.0 } else { (raw - diag).abs() / raw.abs().max(diag.abs()) };
    Ok((raw, diag, dev))
}

/// Free longitudinal oscillation `P(t) = cos(ω_L Δt)P₀ + sin(ω_L Δt)Ṗ₀/ω_L`.
pub fn longitudinal_oscillation(p0: f64, p_dot0: f64, m: &HopfieldMedium, t: f64, t0: f64) -> f64 {
    let wl = m.omega_l();
    let dt = t - t0;
    (wl * dt).cos() * p0 + (wl * dt).sin() * p_dot0 / wl
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_branches() {
        let m = HopfieldMedium::new(1.0, 1.0).unwrap();
        let (p, q, l) = hopfield_frequencies(1.0, &m).unwrap();
        assert!((p * p - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((q * q - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((l - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_fields_give_zero_amplitudes() {
        let mode = HopfieldMode::new(HopfieldMedium::new(1.0, 0.5).unwrap(), 0.8).unwrap();
        let (p, q) = mode.amplitudes(&ModeFields::default()).unwrap();
        assert_eq!((p.norm(), q.norm()), (0.0, 0.0));
    }

    #[test]
    fn quarter_period_vanishes() {
        let m = HopfieldMedium::new(1.0, 1.0).unwrap();
        let t = std::f64::consts::FRAC_PI_2 / m.omega_l();
        assert!(longitudinal_oscillation(1.3, 0.0, &m, t, 0.0).abs() < 1e-15);
        assert_eq!(longitudinal_oscillation(1.3, 0.4, &m, 2.0, 2.0), 1.3);
    }
}
